//! The affine toric constructor: from monomial exponent vectors to the
//! saturated monoid M⁺, its dual cone N⁺, and the smoothness verdict.

use super::FanError;
use crate::cone::{Cone, HilbertBasis};
use crate::exactmath::{IntMatrix, LatticeVector};
use num_traits::Zero;

/// An affine model `Spec C[M⁺] × A^extra`: the monomials, the Hilbert basis
/// of their saturation, and the dual monoid cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricModel {
    pub m_lattice_rank: usize,
    pub monomials: Vec<LatticeVector>,
    pub m_plus: HilbertBasis,
    pub n_plus: Cone,
    pub extra_affine_rank: usize,
    pub smooth: bool,
}

/// Builds the model. The monomials must generate a finite-index subgroup of
/// the exponent lattice (their saturation is then the lattice points of
/// their cone) and span a pointed cone.
pub fn toric_from_monomials(
    rank: usize,
    monomials: Vec<LatticeVector>,
    extra_affine_rank: usize,
) -> Result<ToricModel, FanError> {
    for m in &monomials {
        if m.rank() != rank {
            return Err(FanError::RankMismatch {
                expected: rank,
                got: m.rank(),
            });
        }
    }
    let matrix = IntMatrix::from_rows(rank, &monomials)?;
    let divisors = matrix.snf().elementary_divisors();
    if divisors.len() != rank || divisors.iter().any(|d| d.is_zero()) {
        return Err(FanError::InfiniteIndex(format!(
            "exponent lattice has rank {} inside Z^{}; the finite-cover hypothesis fails",
            divisors.len(),
            rank
        )));
    }
    let m_cone = Cone::new(rank, monomials.clone()).map_err(FanError::from)?;
    let m_plus = m_cone.hilbert_basis()?;
    let n_plus = m_cone.dual_cone();
    let smooth = n_plus.is_smooth();
    Ok(ToricModel {
        m_lattice_rank: rank,
        monomials,
        m_plus,
        n_plus,
        extra_affine_rank,
        smooth,
    })
}
