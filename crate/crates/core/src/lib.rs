//! Numerical solver for the geometric Cauchy problem of timelike CMC surfaces
//! in Minkowski 3-space and pseudospherical surfaces in Euclidean 3-space,
//! built on loop-group potentials and Birkhoff factorization.

pub mod cauchydata;
pub mod conventions;
pub mod error;
pub mod framegen;
pub mod jet;
pub mod loopcore;
pub mod mat2;
pub mod minkalg;
pub mod par;
pub mod surface;
pub mod cli;

pub use error::{Error, Result};
