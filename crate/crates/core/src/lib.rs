//! p-adic and rational power-series algebra for ordinary CY3 crystals and
//! one-parameter mirror-symmetry computations.
//!
//! Layers, bottom up:
//! - [`padic`], [`ring`], [`series`], [`matrix`]: scalars, truncated series and series matrices.
//! - [`crystal`]: connection and Frobenius matrices of an F-crystal, change of lift,
//!   the product formula for `T(0)`, divisibility and Newton-Hodge diagnostics.
//! - [`cy3`]: the CY3 block structure, prepotential, Yukawa coupling, canonical
//!   coordinates and Frobenius, the omega basis and a seeded instance generator.
//! - [`mirror`]: Frobenius-method solutions, mirror map, instanton numbers and
//!   the per-prime prepotential integrality test.
//! - [`battery`], [`report`]: seeded verification batteries and JSON reports.

pub mod battery;
pub mod crystal;
pub mod cy3;
pub mod error;
pub mod matrix;
pub mod mirror;
pub mod padic;
pub mod par;
pub mod report;
pub mod ring;
pub mod series;
pub mod verdict;

pub use error::{Error, Result};
pub use matrix::SeriesMatrix;
pub use padic::{Padic, PadicRing};
pub use ring::{CoeffRing, RationalRing};
pub use series::Series;
pub use verdict::{Verdict, VerdictSet};
