//! Numerical laboratory for heat-semigroup Besov/BV analysis on finite
//! metric measure spaces.
//!
//! The crate builds graph approximations of spaces with different local and
//! global scaling (cycles, Sierpinski pre-fractals and their truncated
//! blow-ups, l1 products), computes their spectral heat semigroups, and
//! verifies the functional inequalities that connect two-scale kernel
//! estimates, Orlicz norms, Besov seminorms, Korevaar-Schoen energies,
//! perimeters and isoperimetric bounds. Everything is driven by explicit
//! grids and seeded randomness so reports are reproducible byte for byte.

pub mod besov_bv;
pub mod error;
pub mod field;
pub mod heat;
pub mod ks;
pub mod orlicz;
pub mod probe;
pub mod report;
pub mod scale;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use field::Field;
pub use scale::{ScalingFn, TwoScaleFn};
pub use spaces::{MMSpace, SpaceExponents};
