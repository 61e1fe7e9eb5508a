//! Exact computations with finite Galois extensions of `Q_p`: tower
//! construction, Galois groups by root lifting, lower ramification
//! filtrations, unit-group quotients `U^i/U^N` as finite G-modules, and
//! first cohomology by integer linear algebra.

pub mod abelian;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod galois;
pub mod group;
pub mod padic;
pub mod residue;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
