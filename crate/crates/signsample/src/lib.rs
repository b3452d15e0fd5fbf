//! Exact sample points and feasible sign conditions for real polynomial
//! families.
//!
//! Given f_1, ..., f_m in ℚ[x_1, ..., x_n], the library computes finite sets
//! of algebraic points meeting (the closure of) every connected component of
//! every feasible sign condition over the family, by deforming Lagrange/KKT
//! critical-point systems from initial systems with known solution structure
//! and reading the limit at t = 0 off a univariate rational parametrization
//! (a geometric resolution). Signs at the computed algebraic points are
//! determined exactly by Sturm/Tarski queries; every reported condition
//! carries an exactly verified witness. All arithmetic is exact over ℚ.

pub mod cli;
pub mod dual;
pub mod error;
pub mod homotopy;
pub mod linalg;
pub mod multipoly;
pub mod oracle;
pub mod poly;
pub mod quotient;
pub mod rational;
pub mod resolution;
pub mod sampler;
pub mod ring;
pub mod series;
pub mod signs;
pub mod slp;
pub mod sturm;
pub mod systems;

pub use error::{Error, Result};

pub use cli::cli_main;
