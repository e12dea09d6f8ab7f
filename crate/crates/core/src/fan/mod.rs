//! Subdivisions of a monoid cone: fan validity, barycentric and stellar
//! subdivision, and the full desingularization loop that refines a fan until
//! every cone is smooth.

mod projective;
mod strata;
mod toric;
mod volume;

pub use projective::{is_projective_subdivision, ProjectivityOutcome, SupportCertificate};
pub use strata::{
    check_compatible_family, restrict_subdivision, CompatibleFamily, FamilyViolation,
    StrataRelation, StrataSystem, Stratum,
};
pub use toric::{toric_from_monomials, ToricModel};
pub use volume::is_refinement;

use crate::cone::{Cone, ConeError};
use crate::exactmath::{BigInt, ExactError, LatticeVector, Rational};
use num_traits::One;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("cone of rank {got} in a rank-{expected} fan")]
    RankMismatch { expected: usize, got: usize },
    #[error("fan has no support cone")]
    MissingSupport,
    #[error("point {0} lies outside the support of the fan")]
    OutsideSupport(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("monomials generate an infinite-index subgroup: {0}")]
    InfiniteIndex(String),
    #[error("unknown stratum label `{0}`")]
    UnknownStratum(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// First witness of a fan validity failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanViolation {
    pub first: Cone,
    pub second: Cone,
    pub reason: String,
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} between {:?} and {:?}",
            self.reason, self.first, self.second
        )
    }
}

/// A collection of maximal cones, kept sorted with face-nested cones
/// removed, optionally remembering the cone it subdivides.
#[derive(Clone, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    cones: Vec<Cone>,
    support: Option<Cone>,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fan[rank {}]{:?}", self.rank, self.cones)
    }
}

impl Fan {
    pub fn new(rank: usize, cones: Vec<Cone>, support: Option<Cone>) -> Result<Fan, FanError> {
        for c in &cones {
            if c.rank() != rank {
                return Err(FanError::RankMismatch {
                    expected: rank,
                    got: c.rank(),
                });
            }
        }
        if let Some(s) = &support {
            if s.rank() != rank {
                return Err(FanError::RankMismatch {
                    expected: rank,
                    got: s.rank(),
                });
            }
        }
        let mut cones = crate::cone::sorted_cones(cones);
        // Keep only maximal cones: drop anything that is a face of another.
        // A proper face has strictly smaller dimension, so only such pairs
        // are tested.
        let dims: Vec<usize> = cones.iter().map(|c| c.dim()).collect();
        let nested: Vec<usize> = (0..cones.len())
            .filter(|&i| {
                (0..cones.len())
                    .any(|j| j != i && dims[i] < dims[j] && cones[i].is_face_of(&cones[j]))
            })
            .collect();
        for &i in nested.iter().rev() {
            cones.remove(i);
        }
        Ok(Fan {
            rank,
            cones,
            support,
        })
    }

    /// The fan consisting of a single cone, supported on itself.
    pub fn from_cone(cone: Cone) -> Fan {
        Fan {
            rank: cone.rank(),
            cones: vec![cone.clone()],
            support: Some(cone),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn support(&self) -> Option<&Cone> {
        self.support.as_ref()
    }

    pub fn with_support(mut self, support: Option<Cone>) -> Fan {
        self.support = support;
        self
    }

    /// Checks that every pairwise intersection is a face of both cones,
    /// reporting the first violating pair. Decided through the fan
    /// separation lemma, which agrees with computing each intersection
    /// explicitly (see `validate_by_intersection`) but stays cheap on large
    /// fans.
    pub fn validate(&self) -> Result<(), FanViolation> {
        for i in 0..self.cones.len() {
            for j in i + 1..self.cones.len() {
                let a = &self.cones[i];
                let b = &self.cones[j];
                if !crate::cone::meets_in_common_face(a, b) {
                    return Err(FanViolation {
                        first: a.clone(),
                        second: b.clone(),
                        reason: "intersection is not a common face".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Reference validity check that forms every pairwise intersection from
    /// the combined facet normals and tests it as a face of both cones.
    pub fn validate_by_intersection(&self) -> Result<(), FanViolation> {
        for i in 0..self.cones.len() {
            for j in i + 1..self.cones.len() {
                let a = &self.cones[i];
                let b = &self.cones[j];
                let meet = a.intersect(b).map_err(|e| FanViolation {
                    first: a.clone(),
                    second: b.clone(),
                    reason: format!("intersection failed: {e}"),
                })?;
                if !meet.is_face_of(a) || !meet.is_face_of(b) {
                    return Err(FanViolation {
                        first: a.clone(),
                        second: b.clone(),
                        reason: format!("intersection {:?} is not a common face", meet),
                    });
                }
            }
        }
        Ok(())
    }

    /// True when some cone of the fan contains the point.
    pub fn support_contains(&self, v: &LatticeVector) -> bool {
        self.cones.iter().any(|c| c.contains(v))
    }

    /// Largest multiplicity over the (simplicial) maximal cones.
    pub fn max_multiplicity(&self) -> Result<BigInt, ConeError> {
        let mut max = BigInt::one();
        for c in &self.cones {
            let m = c.multiplicity()?;
            if m > max {
                max = m;
            }
        }
        Ok(max)
    }
}

/// Barycentric subdivision: one cone per maximal flag of nonzero faces, on
/// the primitive barycenters of the flag. The result is a valid refinement
/// with every cone simplicial.
pub fn barycentric_subdivision(fan: &Fan) -> Result<Fan, FanError> {
    let mut out: Vec<Cone> = Vec::new();
    for cone in fan.cones() {
        if !cone.is_pointed() {
            return Err(FanError::Precondition(
                "barycentric subdivision needs pointed cones".into(),
            ));
        }
        if cone.rays().is_empty() {
            out.push(cone.clone());
            continue;
        }
        let dim = cone.dim();
        // Faces by dimension, as ray index sets (the zero face excluded).
        let mut by_dim: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new(); dim + 1];
        for s in cone.face_index_sets() {
            if s.is_empty() {
                continue;
            }
            let set: BTreeSet<usize> = s.iter().copied().collect();
            let d = face_dim(cone, &set);
            by_dim[d].push(set);
        }
        let barycenter = |s: &BTreeSet<usize>| -> LatticeVector {
            let mut sum = LatticeVector::zero(cone.rank());
            for &i in s {
                sum = sum.add(&cone.rays()[i]);
            }
            sum.primitive().expect("nonzero face has nonzero barycenter")
        };
        // Walk maximal flags upward from the rays.
        let mut stack: Vec<Vec<BTreeSet<usize>>> =
            by_dim[1].iter().map(|s| vec![s.clone()]).collect();
        while let Some(chain) = stack.pop() {
            let top = chain.last().expect("chains are nonempty");
            let d = chain.len();
            if d == dim {
                let rays: Vec<LatticeVector> = chain.iter().map(&barycenter).collect();
                out.push(Cone::from_generators(fan.rank(), rays)?);
                continue;
            }
            for next in &by_dim[d + 1] {
                if top.is_subset(next) {
                    let mut extended = chain.clone();
                    extended.push(next.clone());
                    stack.push(extended);
                }
            }
        }
    }
    Fan::new(fan.rank(), out, fan.support().cloned())
}

fn face_dim(cone: &Cone, s: &BTreeSet<usize>) -> usize {
    let rays: Vec<LatticeVector> = s.iter().map(|&i| cone.rays()[i].clone()).collect();
    crate::exactmath::IntMatrix::from_rows(cone.rank(), &rays)
        .expect("rays of cone rank")
        .rank()
}

/// Stellar subdivision at a primitive ray `v`: every cone containing `v` is
/// replaced by the joins of `v` with its facets that do not contain `v`.
pub fn stellar_subdivision(fan: &Fan, v: &LatticeVector) -> Result<Fan, FanError> {
    let v = v.primitive().map_err(FanError::from)?;
    if !fan.support_contains(&v) {
        return Err(FanError::OutsideSupport(format!("{:?}", v)));
    }
    let mut out: Vec<Cone> = Vec::new();
    for cone in fan.cones() {
        if !cone.contains(&v) {
            out.push(cone.clone());
            continue;
        }
        if cone.rays().is_empty() {
            out.push(cone.clone());
            continue;
        }
        for facet in cone.facet_index_sets() {
            let mut rays: Vec<LatticeVector> =
                facet.iter().map(|&i| cone.rays()[i].clone()).collect();
            let facet_cone = Cone::from_generators(fan.rank(), rays.clone())?;
            if facet_cone.contains(&v) {
                continue;
            }
            rays.push(v.clone());
            out.push(Cone::from_generators(fan.rank(), rays)?);
        }
    }
    Fan::new(fan.rank(), out, fan.support().cloned())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Barycentric,
    Stellar,
}

/// One entry of a resolution trace. `max_multiplicity` is measured after
/// the step has been applied.
#[derive(Clone, Debug)]
pub struct ResolutionStep {
    pub step: usize,
    pub kind: StepKind,
    pub ray: Option<LatticeVector>,
    pub max_multiplicity: BigInt,
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub fan: Fan,
    pub trace: Vec<ResolutionStep>,
}

/// Refines the fan until every cone is smooth: one barycentric pass to reach
/// simplicial cones, then stellar subdivisions at parallelepiped points of
/// the lexicographically first cone of multiplicity above one. The chosen
/// point minimizes the coordinate sum (ties broken lexicographically on the
/// coordinate vector), which strictly decreases every affected multiplicity.
pub fn resolve(fan: &Fan) -> Result<Resolution, FanError> {
    let mut current = barycentric_subdivision(fan)?;
    let mut trace = Vec::new();
    trace.push(ResolutionStep {
        step: 1,
        kind: StepKind::Barycentric,
        ray: None,
        max_multiplicity: current.max_multiplicity()?,
    });
    loop {
        let target = current
            .cones()
            .iter()
            .find(|c| !c.multiplicity().map(|m| m.is_one()).unwrap_or(false));
        let Some(cone) = target else { break };
        let points = cone.parallelepiped_points()?;
        let (xi, _) = points
            .iter()
            .map(|(p, q)| {
                let total: Rational = q.iter().cloned().sum();
                (p, (total, q.clone()))
            })
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("multiplicity > 1 puts a lattice point in the parallelepiped");
        let ray = xi.primitive()?;
        current = stellar_subdivision(&current, &ray)?;
        let max = current.max_multiplicity()?;
        trace.push(ResolutionStep {
            step: trace.len() + 1,
            kind: StepKind::Stellar,
            ray: Some(ray),
            max_multiplicity: max,
        });
    }
    Ok(Resolution {
        fan: current,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(v)
    }

    fn cone(rays: &[&[i64]]) -> Cone {
        Cone::new(rays[0].len(), rays.iter().map(|r| lv(r)).collect()).unwrap()
    }

    #[test]
    fn single_orthant_is_valid() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[0, 1]]));
        assert!(f.validate().is_ok());
    }

    #[test]
    fn shared_ray_fan_is_valid() {
        let f = Fan::new(
            2,
            vec![cone(&[&[1, 0], &[1, 1]]), cone(&[&[1, 1], &[0, 1]])],
            None,
        )
        .unwrap();
        assert!(f.validate().is_ok());
    }

    #[test]
    fn overlapping_cones_are_invalid() {
        let f = Fan::new(
            2,
            vec![cone(&[&[1, 0], &[0, 1]]), cone(&[&[1, 1], &[-1, 1]])],
            None,
        )
        .unwrap();
        let violation = f.validate().unwrap_err();
        assert!(violation.reason.contains("not a common face"));
    }

    #[test]
    fn face_nested_cones_are_dropped() {
        let f = Fan::new(
            2,
            vec![
                cone(&[&[1, 0], &[0, 1]]),
                Cone::new(2, vec![lv(&[1, 0])]).unwrap(),
            ],
            None,
        )
        .unwrap();
        assert_eq!(f.cones().len(), 1);
    }

    #[test]
    fn barycentric_of_one_dimensional_fan_is_unchanged() {
        let f = Fan::from_cone(Cone::new(2, vec![lv(&[1, 0])]).unwrap());
        let b = barycentric_subdivision(&f).unwrap();
        assert_eq!(b.cones(), f.cones());
    }

    #[test]
    fn barycentric_of_orthant() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[0, 1]]));
        let b = barycentric_subdivision(&f).unwrap();
        let expected = vec![cone(&[&[1, 0], &[1, 1]]), cone(&[&[0, 1], &[1, 1]])];
        assert_eq!(b.cones(), crate::cone::sorted_cones(expected).as_slice());
        assert!(b.validate().is_ok());
    }

    #[test]
    fn barycentric_of_skew_cone_is_smooth() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[1, 2]]));
        let b = barycentric_subdivision(&f).unwrap();
        let expected = vec![cone(&[&[1, 0], &[1, 1]]), cone(&[&[1, 2], &[1, 1]])];
        assert_eq!(b.cones(), crate::cone::sorted_cones(expected).as_slice());
        for c in b.cones() {
            assert!(c.is_smooth());
        }
    }

    #[test]
    fn barycentric_of_three_dim_orthant_has_six_cones() {
        let f = Fan::from_cone(cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        let b = barycentric_subdivision(&f).unwrap();
        assert_eq!(b.cones().len(), 6);
        assert!(b.validate().is_ok());
        for c in b.cones() {
            assert!(c.is_simplicial());
            assert!(c.is_smooth());
        }
    }

    #[test]
    fn stellar_at_interior_ray_splits_orthant() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[0, 1]]));
        let s = stellar_subdivision(&f, &lv(&[1, 1])).unwrap();
        let expected = vec![cone(&[&[1, 0], &[1, 1]]), cone(&[&[0, 1], &[1, 1]])];
        assert_eq!(s.cones(), crate::cone::sorted_cones(expected).as_slice());
        for c in s.cones() {
            assert!(c.is_smooth());
        }
    }

    #[test]
    fn stellar_at_existing_ray_is_identity() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[0, 1]]));
        let s = stellar_subdivision(&f, &lv(&[1, 0])).unwrap();
        assert_eq!(s.cones(), f.cones());
    }

    #[test]
    fn stellar_splits_multiplicity_three_cone() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[1, 3]]));
        let s = stellar_subdivision(&f, &lv(&[1, 1])).unwrap();
        let expected = vec![cone(&[&[1, 0], &[1, 1]]), cone(&[&[1, 1], &[1, 3]])];
        assert_eq!(s.cones(), crate::cone::sorted_cones(expected).as_slice());
        assert_eq!(s.cones()[1].multiplicity().unwrap(), int(2));
    }

    #[test]
    fn stellar_outside_support_is_rejected() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[0, 1]]));
        let err = stellar_subdivision(&f, &lv(&[-1, 0])).unwrap_err();
        assert!(matches!(err, FanError::OutsideSupport(_)));
    }

    #[test]
    fn resolve_smooth_orthant_is_barycentric_only() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[0, 1]]));
        let r = resolve(&f).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.trace[0].kind, StepKind::Barycentric);
        assert_eq!(r.fan.cones(), barycentric_subdivision(&f).unwrap().cones());
    }

    #[test]
    fn resolve_a1_cone() {
        // Dual side of the A1 singularity: barycentric inserts (1,0).
        let f = Fan::from_cone(cone(&[&[0, 1], &[2, -1]]));
        let r = resolve(&f).unwrap();
        assert_eq!(r.fan.cones().len(), 2);
        for c in r.fan.cones() {
            assert!(c.is_smooth());
        }
        let rays: BTreeSet<LatticeVector> = r
            .fan
            .cones()
            .iter()
            .flat_map(|c| c.rays().iter().cloned())
            .collect();
        assert!(rays.contains(&lv(&[1, 0])));
    }

    #[test]
    fn resolve_skew_cone_inserts_barycenter() {
        let f = Fan::from_cone(cone(&[&[1, 0], &[1, 2]]));
        let r = resolve(&f).unwrap();
        assert_eq!(r.fan.cones().len(), 2);
        for c in r.fan.cones() {
            assert!(c.is_smooth());
        }
        let rays: BTreeSet<LatticeVector> = r
            .fan
            .cones()
            .iter()
            .flat_map(|c| c.rays().iter().cloned())
            .collect();
        assert!(rays.contains(&lv(&[1, 1])));
    }

    #[test]
    fn resolve_high_multiplicity_cone_needs_stellar_steps() {
        let f = Fan::from_cone(cone(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 5]]));
        let r = resolve(&f).unwrap();
        assert!(r.trace.len() > 1, "needs stellar work: {:?}", r.trace);
        assert!(r.fan.validate().is_ok());
        for c in r.fan.cones() {
            assert!(c.is_smooth());
        }
        // Max multiplicity never increases along the trace.
        for w in r.trace.windows(2) {
            assert!(w[1].max_multiplicity <= w[0].max_multiplicity);
        }
    }
}
