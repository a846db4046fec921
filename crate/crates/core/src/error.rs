use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no primitive direction")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(i64),

    #[error("point set is degenerate: affine dimension {found}, ambient dimension {ambient}")]
    Degenerate { found: usize, ambient: usize },

    #[error("polytope is empty")]
    Empty,

    #[error("not a face of the polytope: {0}")]
    NotAFace(String),

    #[error("polytope is not simple")]
    NotSimple,

    #[error("polytope is not smooth at vertex {0}")]
    NotSmooth(String),

    #[error("cone is not in the fan")]
    ConeNotInFan,

    #[error("stellar subdivision along a ray is a no-op")]
    RaySubdivision,

    #[error("not strictly isomorphic: normal fans differ")]
    NotStrictlyIsomorphic,

    #[error("invalid blow-up level {level}: {reason}")]
    InvalidBlowUp { level: i64, reason: String },

    #[error("label {0} is not realized by a triangulation of the sphere")]
    UnrealizableLabel(String),

    #[error("cannot parse {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
