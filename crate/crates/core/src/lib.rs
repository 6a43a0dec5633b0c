#![allow(clippy::needless_range_loop)]

//! Exact computations around Kudla–Millson Schwartz functions: a polynomial-Gaussian
//! calculus over Q(i, sqrt 2)[pi, 1/pi], Howe operators and wedge algebra, the
//! Ikeda map and its vanishing on the Kudla–Millson form, archimedean Weil
//! representation formulas, and hermitian lattice combinatorics over CM fields.

pub mod budget;
pub mod error;
pub mod field;
pub mod gausspoly;
pub mod howe_km;
pub mod ikeda;
pub mod numlat;
pub mod perm;
pub mod scalar;
pub mod weil;

pub use error::{KmError, Result};
