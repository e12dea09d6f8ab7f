//! Branch-locus degree descent over the rationals, on the fiber line over a
//! point base: the branch state is a set of irreducible monic factors plus
//! rational sections (with the section at infinity always present), and one
//! descent step pushes everything forward through a maximal-degree factor,
//! strictly shrinking the measure (max degree, count at max degree) in
//! lexicographic order.

mod factor;
mod poly;

pub use factor::{factorize, Factorization};
pub use poly::{PolyError, RatPoly};

use crate::exactmath::Rational;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BelyiError {
    #[error("state is already fully sectioned (no factor of degree >= 2)")]
    AlreadySeparated,
    #[error("the section at infinity must be present")]
    MissingInfinity,
    #[error("zero polynomial cannot be a branch component")]
    ZeroComponent,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The branch measure: maximum factor degree (one when no factors remain)
/// and the number of factors attaining it. Ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DegreeMeasure {
    pub d: usize,
    pub m: usize,
}

/// Branch locus over a point base: pairwise-coprime irreducible monic
/// factors of degree at least two, a set of finite rational sections, and
/// the section at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BelyiState {
    factors: Vec<RatPoly>,
    sections: Vec<Rational>,
    infinity: bool,
}

impl BelyiState {
    /// Normalizing constructor: factors are factorized completely, linear
    /// pieces are promoted to sections, duplicates are merged. The infinity
    /// flag must be set.
    pub fn new(
        factors: Vec<RatPoly>,
        sections: Vec<Rational>,
        infinity: bool,
    ) -> Result<BelyiState, BelyiError> {
        if !infinity {
            return Err(BelyiError::MissingInfinity);
        }
        let mut factor_set: BTreeSet<RatPoly> = BTreeSet::new();
        let mut section_set: BTreeSet<Rational> = sections.into_iter().collect();
        for f in factors {
            if f.is_zero() {
                return Err(BelyiError::ZeroComponent);
            }
            if f.is_constant() {
                continue;
            }
            for (irreducible, _) in factorize(&f)?.factors {
                if irreducible.degree() == Some(1) {
                    section_set.insert(-irreducible.coeff(0));
                } else {
                    factor_set.insert(irreducible);
                }
            }
        }
        Ok(BelyiState {
            factors: factor_set.into_iter().collect(),
            sections: section_set.into_iter().collect(),
            infinity,
        })
    }

    pub fn factors(&self) -> &[RatPoly] {
        &self.factors
    }

    pub fn sections(&self) -> &[Rational] {
        &self.sections
    }

    pub fn has_infinity(&self) -> bool {
        self.infinity
    }

    pub fn measure(&self) -> DegreeMeasure {
        let d = self
            .factors
            .iter()
            .filter_map(|f| f.degree())
            .max()
            .unwrap_or(1);
        let m = self
            .factors
            .iter()
            .filter(|f| f.degree() == Some(d))
            .count();
        DegreeMeasure { d, m }
    }
}

/// The squarefree monic polynomial whose roots are exactly `{ g(a) : f(a) = 0 }`,
/// computed by eliminating x from `f(x)` and `y - g(x)` through resultants
/// at interpolation nodes.
pub fn image_poly(f: &RatPoly, g: &RatPoly) -> Result<RatPoly, BelyiError> {
    if f.is_constant() || g.is_constant() {
        return Err(PolyError::ConstantInput.into());
    }
    let deg = f.degree().expect("nonconstant");
    let mut points = Vec::with_capacity(deg + 1);
    for i in 0..=deg {
        let y0 = Rational::from_integer((i as i64).into());
        // res_x(f(x), y0 - g(x))
        let shifted = RatPoly::constant(y0.clone()).sub(g);
        let value = f.resultant(&shifted)?;
        points.push((y0, value));
    }
    let resultant_in_y = RatPoly::interpolate(&points);
    debug_assert!(!resultant_in_y.is_zero());
    Ok(resultant_in_y.squarefree_part()?)
}

/// Squarefree monic polynomial of the finite critical values of a
/// polynomial map of degree at least two: the images of the roots of the
/// derivative. Its degree is at most deg(g) - 1.
pub fn critical_values(g: &RatPoly) -> Result<RatPoly, BelyiError> {
    match g.degree() {
        Some(d) if d >= 2 => {}
        _ => return Err(PolyError::ConstantInput.into()),
    }
    let critical_points = g.derivative().squarefree_part()?;
    let out = image_poly(&critical_points, g)?;
    debug_assert!(out.degree().unwrap_or(0) + 1 <= g.degree().unwrap());
    Ok(out)
}

/// Record of one descent step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BelyiStep {
    pub chosen: RatPoly,
    pub before: DegreeMeasure,
    pub after: DegreeMeasure,
}

/// One descent step: push every component and section forward through a
/// maximal-degree factor (ties broken by lexicographically smallest
/// coefficient list) and add the new critical values. The measure strictly
/// decreases.
pub fn belyi_step(state: &BelyiState) -> Result<(BelyiState, BelyiStep), BelyiError> {
    let before = state.measure();
    if before.d < 2 {
        return Err(BelyiError::AlreadySeparated);
    }
    let chosen = state
        .factors
        .iter()
        .filter(|f| f.degree() == Some(before.d))
        .min_by(|a, b| a.coeffs().cmp(b.coeffs()))
        .expect("measure d >= 2 means such a factor exists")
        .clone();

    let mut union = RatPoly::one();
    for f in &state.factors {
        union = union.mul(&image_poly(f, &chosen)?);
    }
    union = union.mul(&critical_values(&chosen)?);
    let new_sections: Vec<Rational> = state.sections.iter().map(|s| chosen.eval(s)).collect();

    let next = BelyiState::new(vec![union], new_sections, state.infinity)?;
    let after = next.measure();
    debug_assert!(after < before, "descent measure must drop: {:?} -> {:?}", before, after);
    Ok((
        next,
        BelyiStep {
            chosen,
            before,
            after,
        },
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BelyiTrace {
    pub steps: Vec<BelyiStep>,
}

/// Runs descent steps until no factor of degree two or more remains. The
/// trace measures strictly lex-decrease, which bounds the loop.
pub fn belyi_run(state: &BelyiState) -> Result<(BelyiState, BelyiTrace), BelyiError> {
    let mut current = state.clone();
    let mut trace = BelyiTrace::default();
    while current.measure().d >= 2 {
        let (next, step) = belyi_step(&current)?;
        if let Some(last) = trace.steps.last() {
            assert!(step.before < last.after || step.before == last.after);
        }
        trace.steps.push(step);
        current = next;
    }
    Ok((current, trace))
}
