//! Exact-arithmetic engines for desingularization-style constructions:
//! toric fan subdivision and resolution, branch-locus degree descent over the
//! rationals, and combinatorial section separation in genus-0 fibrations.
//!
//! Everything is computed in exact integer/rational arithmetic; there are no
//! floating-point code paths. Values are immutable and operations are pure,
//! so concurrent use on shared values is unrestricted.


pub mod belyi;
pub mod cone;
pub mod exactmath;
pub mod fan;
pub mod fibration;
pub mod json;
pub mod lp;
pub mod verify;

pub use exactmath::{BigInt, IntMatrix, LatticeVector, Rational};
