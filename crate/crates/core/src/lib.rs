//! Volume potentials, layer potentials and fundamental solutions of
//! constant-coefficient second-order elliptic operators in the plane and in
//! space, with executable checks of their identities and regularity.

#![allow(clippy::needless_range_loop, clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cli;
pub mod config;
pub mod error;
pub mod fundsol;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod potentials;
pub mod quadrature;
pub mod schauder;
pub mod verify;

pub use error::{Error, Result};
pub use fundsol::{FundamentalSolution, Kind};
pub use operators::OperatorCoefficients;
pub use geometry::Domain;
pub use potentials::{PotentialField, Side};
pub use schauder::{Modulus, NegativeExponentDensity};
