//! Exact computations for unipotent automorphism groups of complex tori.

pub mod error;
pub mod filtration;
pub mod field;
pub mod gallery;
pub mod growth;
pub mod groupfile;
pub mod group;
pub mod linalg;
pub mod matrix;
pub mod rational;
pub mod report;
pub mod torus;

pub use error::{Error, Result};
pub use field::{Field, Gaussian};
pub use matrix::{CMatrix, Matrix, QMatrix};
pub use rational::Rational;
