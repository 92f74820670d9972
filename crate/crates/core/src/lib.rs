//! Numerical companions for Möbius disjointness of skew products
//! `T(x, y) = (x + α, y + h(x))` on the 2-torus.
//!
//! * [`cf`]: continued fractions with certified convergents.
//! * [`circle`]: fixed-point circle arithmetic.
//! * [`ostrowski`]: Ostrowski numeration, digit windows, residue arcs.
//! * [`dynamics`]: Fourier models, Birkhoff sums and their approximations.
//! * [`moebius`]: the Möbius sieve and correlation statistics.
//! * [`experiments`]: configuration and report runners used by the CLI.

pub mod cf;
pub mod circle;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod moebius;
mod num;
pub mod ostrowski;
pub mod tau;

pub use cf::{cf_from_quotients, cf_from_real, ContinuedFraction, DyadicInterval, PartialQuotients, Preset};
pub use circle::CirclePoint;
pub use error::{Error, Result};
pub use tau::Tau;
