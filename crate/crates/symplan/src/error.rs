use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Two configurations (or a configuration and a weight vector) disagree
    /// in object count, ambient dimension, or rotation kind.
    #[error("configuration shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The two endpoint rotations are antipodal within `tol`, so the
    /// connecting geodesic is not unique.
    #[error("antipodal rotation pair within tolerance {tol}: geodesic is not unique")]
    AntipodalGeodesic { tol: f64 },

    /// A caller-supplied argument violates the operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A requested group could not be built (bad parameters or a rotation
    /// set that is not closed under composition).
    #[error("group construction failed: {0}")]
    GroupConstruction(String),

    /// An object index addressed a factor or pose past the end.
    #[error("object index {index} out of range for {objects} objects")]
    ObjectIndexOutOfRange { index: usize, objects: usize },

    /// A group was applied to a configuration with a different object
    /// layout than the group was built for.
    #[error("group does not match configuration layout: {0}")]
    GroupMismatch(String),

    /// A roadmap edge referenced a vertex pair that is not connected.
    #[error("no edge from vertex {from} to vertex {to}")]
    MissingEdge { from: usize, to: usize },

    /// Graph search found no directed path between the given vertices.
    #[error("vertex {to} is unreachable from vertex {from}")]
    Unreachable { from: usize, to: usize },

    /// World generation produced a degenerate point set too many times.
    #[error("degenerate point set persisted after {retries} retries")]
    DegeneratePoints { retries: usize },

    /// Rejection sampling exhausted its attempt budget.
    #[error("rejection sampling exhausted its budget of {budget} attempts")]
    RejectionBudget { budget: usize },

    /// No collision-free configuration was found within the sample budget.
    #[error("no free configuration found in {samples} samples")]
    NoFreeSamples { samples: usize },

    /// JSON (de)serialization failure.
    #[error(transparent)]
    Serde(#[from] serde_json::Error),

    /// Filesystem failure while reading or writing an artifact.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
