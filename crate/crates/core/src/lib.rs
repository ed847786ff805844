//! Limit-aperiodic colorings of Coxeter groups and strictly balanced tilings
//! of their Davis complexes, checked at desk scale by enumeration and exact
//! arithmetic.

pub mod colorings;
pub mod coxeter;
pub mod error;
pub mod hyperbolic;
pub mod lp;
pub mod seqs;
pub mod tiles;
pub mod tiling_space;
pub mod walls;

pub use coxeter::{Ball, CoxeterSystem, Gen, Word};
pub use error::{Error, Result};
