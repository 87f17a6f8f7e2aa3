//! Exact arithmetic and search machinery for matching Nahm sums against
//! conformal-field-theory character combinations.
//!
//! The crate is organised around the pipeline it implements:
//!
//! - [`qseries`]: truncated Puiseux series over exact rationals, the
//!   eta/theta building blocks, and rational reconstruction of reals;
//! - [`liealg`]: Cartan matrices of the A and tadpole families, exact
//!   rational linear algebra and Kronecker products;
//! - [`nahmsum`]: exact evaluation of the series `f_{A,B,C}`;
//! - [`tba`]: high-precision solutions of the constant TBA equations
//!   `x_i = prod_j (1 - x_j)^{A_ij}` and the two asymptotic formulas used
//!   to screen candidate `B` vectors;
//! - [`characters`]: minimal-model, affine su(2), u(1) and coset
//!   characters, plus the predicted target combinations;
//! - [`search`]: the grid search gluing all of the above together.

pub mod characters;
pub mod error;
pub mod liealg;
pub mod nahmsum;
pub mod qseries;
pub mod search;
pub mod tba;

pub use error::{Error, Result};
pub use qseries::{PuiseuxSeries, Rat};
