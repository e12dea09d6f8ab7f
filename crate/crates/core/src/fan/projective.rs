//! Projectivity certification for a subdivision of a single cone: a
//! piecewise-linear functional, linear on each maximal cone, agreeing on
//! shared faces and strictly convex across interior walls. The search is an
//! exact rational linear program maximizing the minimum wall slack under a
//! box normalization of the coefficients; a certificate exists exactly when
//! the optimum is positive.

use super::{is_refinement, Fan, FanError};
use crate::cone::Cone;
use crate::exactmath::Rational;
use crate::lp::{Certificate, Cmp, GeneralLp, LpOutcome};
use num_traits::{One, Signed, Zero};

/// Per-maximal-cone linear functionals witnessing a projective subdivision,
/// indexed like `fan.cones()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportCertificate {
    pub functionals: Vec<Vec<Rational>>,
    /// The certified minimum wall slack; strictly positive.
    pub min_wall_slack: Rational,
}

impl SupportCertificate {
    /// Re-validates the certificate from scratch: agreement on every shared
    /// face and strict convexity across every interior wall, recomputed from
    /// the fan without consulting the solver.
    pub fn validate(&self, fine: &Fan) -> Result<(), String> {
        if self.functionals.len() != fine.cones().len() {
            return Err("one functional per maximal cone required".into());
        }
        if !self.min_wall_slack.is_positive() {
            return Err("certified slack must be positive".into());
        }
        for (pair, meet) in shared_faces(fine).map_err(|e| e.to_string())? {
            let (i, j) = pair;
            for ray in meet.rays() {
                let a = evaluate(&self.functionals[i], ray);
                let b = evaluate(&self.functionals[j], ray);
                if a != b {
                    return Err(format!(
                        "functionals {i} and {j} disagree on shared ray {:?}",
                        ray
                    ));
                }
            }
            if is_wall(fine, i, j, &meet) {
                for (near, far) in [(i, j), (j, i)] {
                    for ray in fine.cones()[far].rays() {
                        if meet.contains(ray) {
                            continue;
                        }
                        let own = evaluate(&self.functionals[far], ray);
                        let other = evaluate(&self.functionals[near], ray);
                        if &own - &other < self.min_wall_slack {
                            return Err(format!(
                                "wall between cones {near} and {far} lacks slack at {:?}",
                                ray
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn evaluate(functional: &[Rational], ray: &crate::exactmath::LatticeVector) -> Rational {
    functional
        .iter()
        .zip(ray.entries())
        .map(|(f, e)| f * Rational::from_integer(e.clone()))
        .sum()
}

/// Outcome of a projectivity search, keeping the solver's dual data so a
/// negative verdict can be checked independently.
#[derive(Clone, Debug)]
pub enum ProjectivityOutcome {
    Certified(SupportCertificate),
    /// No strictly convex support function exists. The optimum of the slack
    /// program (non-positive) and its dual multipliers are retained; the
    /// multipliers prove the bound by weak duality.
    None {
        optimum: Rational,
        dual: Certificate,
    },
}

impl ProjectivityOutcome {
    pub fn certificate(self) -> Option<SupportCertificate> {
        match self {
            ProjectivityOutcome::Certified(c) => Some(c),
            ProjectivityOutcome::None { .. } => None,
        }
    }
}

/// Decides whether `fine`, a valid refinement of the single-cone fan on
/// `coarse`, admits a strictly convex support function, returning a
/// certificate when one exists.
pub fn is_projective_subdivision(
    fine: &Fan,
    coarse: &Cone,
) -> Result<ProjectivityOutcome, FanError> {
    let coarse_fan = Fan::from_cone(coarse.clone());
    fine.validate()
        .map_err(|v| FanError::Precondition(format!("fine fan is invalid: {v}")))?;
    if !is_refinement(fine, &coarse_fan)? {
        return Err(FanError::Precondition(
            "fine is not a refinement of the support cone".into(),
        ));
    }

    let n = fine.rank();
    let k = fine.cones().len();
    // Variables: k functionals of n coefficients each, then the slack t.
    let vars = k * n + 1;
    let t = vars - 1;
    let mut lp = GeneralLp::new(vars);
    lp.objective[t] = Rational::one();

    let mut bound_row = |var: usize| {
        let mut up = vec![Rational::zero(); vars];
        up[var] = Rational::one();
        lp.constrain(up, Cmp::Le, Rational::one());
        let mut down = vec![Rational::zero(); vars];
        down[var] = Rational::one();
        lp.constrain(down, Cmp::Ge, -Rational::one());
    };
    for v in 0..k * n {
        bound_row(v);
    }
    let mut up = vec![Rational::zero(); vars];
    up[t] = Rational::one();
    lp.constrain(up, Cmp::Le, Rational::one());

    for (pair, meet) in shared_faces(fine)? {
        let (i, j) = pair;
        for ray in meet.rays() {
            let mut row = vec![Rational::zero(); vars];
            for (c, e) in ray.entries().iter().enumerate() {
                row[i * n + c] = Rational::from_integer(e.clone());
                row[j * n + c] = -Rational::from_integer(e.clone());
            }
            lp.constrain(row, Cmp::Eq, Rational::zero());
        }
        if is_wall(fine, i, j, &meet) {
            for (near, far) in [(i, j), (j, i)] {
                for ray in fine.cones()[far].rays() {
                    if meet.contains(ray) {
                        continue;
                    }
                    // own functional minus neighbor's at a far ray: >= t.
                    let mut row = vec![Rational::zero(); vars];
                    for (c, e) in ray.entries().iter().enumerate() {
                        row[far * n + c] = Rational::from_integer(e.clone());
                        row[near * n + c] = -Rational::from_integer(e.clone());
                    }
                    row[t] = -Rational::one();
                    lp.constrain(row, Cmp::Ge, Rational::zero());
                }
            }
        }
    }

    match lp.solve() {
        LpOutcome::Optimal {
            x,
            value,
            certificate,
        } => {
            if value.is_positive() {
                let functionals: Vec<Vec<Rational>> = (0..k)
                    .map(|i| x[i * n..(i + 1) * n].to_vec())
                    .collect();
                Ok(ProjectivityOutcome::Certified(SupportCertificate {
                    functionals,
                    min_wall_slack: value,
                }))
            } else {
                Ok(ProjectivityOutcome::None {
                    optimum: value,
                    dual: certificate,
                })
            }
        }
        LpOutcome::Infeasible { .. } | LpOutcome::Unbounded => unreachable!(
            "slack program is feasible (zero functionals) and box-bounded"
        ),
    }
}

/// Nonzero pairwise intersections of the maximal cones.
fn shared_faces(fan: &Fan) -> Result<Vec<((usize, usize), Cone)>, FanError> {
    let mut out = Vec::new();
    for i in 0..fan.cones().len() {
        for j in i + 1..fan.cones().len() {
            let meet = fan.cones()[i].intersect(&fan.cones()[j])?;
            if !meet.rays().is_empty() {
                out.push(((i, j), meet));
            }
        }
    }
    Ok(out)
}

fn is_wall(fan: &Fan, i: usize, j: usize, meet: &Cone) -> bool {
    let d = meet.dim();
    fan.cones()[i].dim() == d + 1 && fan.cones()[j].dim() == d + 1
}
