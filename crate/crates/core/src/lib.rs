//! Exact lattice slopes and freeness for rational points on `P^n`, and a
//! survey harness for the thin family of point pairs on `Hilb²(P^n)` whose
//! freeness stays large while its count grows like `B log B`.
//!
//! Module map:
//! - [`lattice`]: Gram lattices, short vectors, minimal covolumes, slope profiles.
//! - [`projective`]: points of `P^n`, anticanonical heights, tangent lattices, freeness.
//! - [`pairs`]: congruence modulus, chordal distance, the `c(x₁,x₂)` height, membership in `S_{C,δ}`.
//! - [`harness`]: Euler products, sieve densities, dyadic surveys and their reports.

pub mod arith;
mod error;
pub mod harness;
pub mod lattice;
pub mod pairs;
pub mod projective;

pub use error::{Error, Result};
pub use lattice::{GramLattice, Limits, SlopeProfile};
pub use pairs::PointPair;
pub use projective::ProjectivePoint;
