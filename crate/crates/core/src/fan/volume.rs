//! Refinement checking. Containment of cones is a ray-wise test; equality of
//! supports is decided by exact volume bookkeeping: each coarse cone must be
//! exactly covered by its intersections with the fine cones, measured on a
//! cross-section where a positive functional equals one.

use super::{Fan, FanError};
use crate::cone::Cone;
use crate::exactmath::{rational_det, saturation_basis, LatticeVector, Rational};
use crate::lp::{Cmp, GeneralLp};
use num_traits::{One, Signed, Zero};

/// True iff every cone of `fine` is contained in some cone of `coarse` and
/// the two supports are equal. Both fans must be valid and share a rank.
pub fn is_refinement(fine: &Fan, coarse: &Fan) -> Result<bool, FanError> {
    if fine.rank() != coarse.rank() {
        return Err(FanError::RankMismatch {
            expected: coarse.rank(),
            got: fine.rank(),
        });
    }
    if fine.cones() == coarse.cones() {
        return Ok(true);
    }
    for c in fine.cones() {
        let contained = coarse
            .cones()
            .iter()
            .any(|big| c.rays().iter().all(|r| big.contains(r)));
        if !contained {
            return Ok(false);
        }
    }
    // Containment gives support(fine) ⊆ support(coarse); equality remains.
    for target in coarse.cones() {
        if !covered_by(target, fine)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact coverage of a pointed cone by a valid fan: the pieces
/// `target ∩ σ` have disjoint interiors, so coverage is equivalent to their
/// section volumes summing to the section volume of the target.
fn covered_by(target: &Cone, fan: &Fan) -> Result<bool, FanError> {
    let dim = target.dim();
    if dim == 0 {
        return Ok(true);
    }
    if !target.is_pointed() {
        return Err(FanError::Precondition(
            "support comparison needs pointed cones".into(),
        ));
    }
    let basis = saturation_basis(&target.ray_matrix());
    let phi = positive_functional(dim, target, &basis)?;

    let total = section_volume(target, &basis, &phi)?;
    let mut covered = Rational::zero();
    for c in fan.cones() {
        // Cones already inside the target intersect in themselves.
        let piece = if c.rays().iter().all(|r| target.contains(r)) {
            c.clone()
        } else {
            target.intersect(c)?
        };
        if piece.dim() < dim {
            continue;
        }
        covered += section_volume(&piece, &basis, &phi)?;
    }
    Ok(covered == total)
}

/// A functional strictly positive on the target's rays, in span coordinates.
fn positive_functional(
    dim: usize,
    target: &Cone,
    basis: &[LatticeVector],
) -> Result<Vec<Rational>, FanError> {
    let mut lp = GeneralLp::new(dim);
    for ray in target.rays() {
        let coords = span_coordinates(basis, ray).ok_or_else(|| {
            FanError::Precondition("target ray outside its own span".into())
        })?;
        lp.constrain(coords, Cmp::Ge, Rational::one());
    }
    lp.feasible_point()
        .ok_or_else(|| FanError::Precondition("pointed cone admits a positive functional".into()))
}

/// Coordinates of a lattice vector in a span basis, `None` if outside the
/// span.
fn span_coordinates(basis: &[LatticeVector], v: &LatticeVector) -> Option<Vec<Rational>> {
    let rank = v.rank();
    let m = crate::exactmath::IntMatrix::from_rows(rank, basis)
        .expect("basis of ambient rank")
        .transpose();
    m.solve_rational(v).ok().flatten().and_then(|coords| {
        // solve_rational pins free variables; verify the solution is exact.
        let mut check = vec![Rational::zero(); rank];
        for (i, c) in coords.iter().enumerate() {
            for (j, e) in basis[i].entries().iter().enumerate() {
                check[j] += c * Rational::from_integer(e.clone());
            }
        }
        let matches = check
            .iter()
            .zip(v.entries())
            .all(|(a, b)| *a == Rational::from_integer(b.clone()));
        matches.then_some(coords)
    })
}

/// Volume of `cone ∩ { phi <= 1 }` inside the span, via a triangulation into
/// simplices with apex zero and vertices scaled onto `{ phi = 1 }`.
fn section_volume(
    cone: &Cone,
    basis: &[LatticeVector],
    phi: &[Rational],
) -> Result<Rational, FanError> {
    let dim = basis.len();
    let mut total = Rational::zero();
    for piece in cone.triangulate() {
        if piece.dim() < dim {
            continue;
        }
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(dim);
        for ray in piece.rays() {
            let coords = span_coordinates(basis, ray).ok_or_else(|| {
                FanError::Precondition("piece ray outside the target span".into())
            })?;
            let value: Rational = coords
                .iter()
                .zip(phi)
                .map(|(c, p)| c * p)
                .sum();
            if !value.is_positive() {
                return Err(FanError::Precondition(
                    "sectioning functional not positive on a piece ray".into(),
                ));
            }
            rows.push(coords.into_iter().map(|c| c / &value).collect());
        }
        total += rational_det(rows).abs();
    }
    // The common 1/dim! factor cancels in comparisons but is kept so the
    // quantity really is the simplex volume.
    let mut factorial = Rational::one();
    for k in 1..=dim {
        factorial *= Rational::from_integer(k.into());
    }
    Ok(total / factorial)
}
