use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window: scan length {requested} exceeds sequence length {available}")]
    InvalidWindow { requested: usize, available: usize },

    #[error("invalid power {0}: only squares (2) and cubes (3) are checked")]
    InvalidPower(usize),

    #[error("invalid Coxeter matrix entry m[{row}][{col}]: {reason}")]
    InvalidMatrix { row: usize, col: usize, reason: String },

    #[error("invalid Coxeter system: {0}")]
    InvalidSystem(String),

    #[error("generator index {index} out of range for a system with {rank} generators")]
    UnknownGenerator { index: usize, rank: usize },

    #[error("unknown generator name {0:?}")]
    UnknownGeneratorName(String),

    #[error("ball size limit {cap} exceeded at radius {radius} ({count} elements enumerated)")]
    SizeLimit { cap: usize, radius: usize, count: usize },

    #[error("element {0} is not in the enumerated ball")]
    OutOfBall(String),

    #[error("ball of radius {actual} is too small; radius {required} is required")]
    BallTooSmall { required: usize, actual: usize },

    #[error("coset representatives are not a transversal: {0}")]
    NotTransversal(String),

    #[error("tree is not connected: vertex {0} is unreachable from the root")]
    Disconnected(usize),

    #[error("orbit point for {0} lies outside the enumerated tree")]
    OrbitOutsideTree(String),

    #[error("palette invalid at radius {radius}: walls {first} and {second} share a color and intersect")]
    PaletteInvalid {
        radius: usize,
        first: String,
        second: String,
    },

    #[error("palette assigns conflicting colors to wall {0}")]
    PaletteConflict(String),

    #[error("wall tree structure error: {0}")]
    TreeStructure(String),

    #[error("separation of {0} is inconclusive inside this ball; enlarge the radius")]
    Inconclusive(String),

    #[error("weight function is not antisymmetric on color {0}")]
    NotAntisymmetric(usize),

    #[error("patch depths differ: {0} vs {1}")]
    DepthMismatch(usize, usize),

    #[error("depth {depth} too large for a tiling labelled up to radius {radius}")]
    DepthTooLarge { depth: usize, radius: usize },

    #[error("no right-angled regular {0}-gon exists in the hyperbolic plane")]
    NoSuchPolygon(usize),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("geometry error: {0}")]
    Geometry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
