//! High-precision evaluation engine for massless one-, two- and three-loop
//! two-point Feynman integrals in their negative-dimensional hypergeometric
//! representations.
//!
//! Layers, bottom to top:
//!
//! * [`numerics`]: signed-logarithm gamma and Pochhammer evaluation.
//! * [`hyper`]: unit-argument `pFq`, Gauss summation, coalescence and the
//!   outer-sum structure of the two-loop series.
//! * [`appell`]: Appell `F4` and the triangle representations.
//! * [`master`]: the one-loop bubble and the two-loop master diagram.
//! * [`threeloop`]: the three-loop diagram obtained by bubble insertion.
//! * [`verify`]: cross-validation suites used by the command-line tool.

pub mod appell;
pub mod error;
pub mod exec;
pub mod hyper;
pub mod master;
pub mod numerics;
pub mod precision;
pub mod threeloop;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use precision::Precision;
pub use value::{Affine, Diagnostics, Flag, LoopValue};
