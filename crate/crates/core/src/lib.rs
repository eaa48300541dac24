//! Numerical engine for the Cauchy integral calculus of the Hodge-Dirac
//! system: exterior/Clifford algebra, Nystrom-discretized boundary
//! operators on Lipschitz-type surfaces, and the scalar and k-vector
//! Hilbert-transform pipelines built on them.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod boundary_ops;
pub mod kernels;

pub use error::{Error, Result};
