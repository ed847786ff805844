//! Coxeter systems, ShortLex normal forms, Cayley-graph balls, radial
//! geodesics and reflection cocycles.

mod ball;
mod group;
mod system;

pub use ball::{
    enumerate_ball, radial_segment, reflection_cocycle, Ball, BallDump, Cocycle, GeodesicSegment,
    DEFAULT_BALL_CAP,
};
pub use group::{displacement_exponent, DisplacementVerdict, Lattice, LatticePoint, WordGroup};
pub use system::{CoxeterSystem, Gen, SystemDescription, Word};
