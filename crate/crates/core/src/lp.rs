//! Exact rational linear programming by dense two-phase simplex with Bland's
//! rule. Small and slow, which is fine at the scales the cone and fan
//! machinery needs, and every verdict is exact.
//!
//! Optimal and infeasible outcomes carry multiplier certificates against the
//! standard-form program so callers can re-verify a verdict by plain
//! arithmetic, independent of the pivoting path.

use crate::exactmath::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// A linear program over free rational variables: maximize `objective · x`
/// subject to the listed constraints.
#[derive(Clone, Debug)]
pub struct GeneralLp {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<(Vec<Rational>, Cmp, Rational)>,
}

/// Standard-form data (min c·x, A x = b, x >= 0, b >= 0) together with dual
/// multipliers `y`, one per row.
///
/// For an optimality certificate: `y A <= c` componentwise and `y · b` equals
/// the standard-form minimum, which bounds the general program's maximum by
/// weak duality. For an infeasibility certificate: `y A <= 0` and `y · b > 0`
/// (Farkas). `verify` checks either claim arithmetically.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl Certificate {
    fn y_dot_a(&self, col: usize) -> Rational {
        self.y
            .iter()
            .zip(self.a.iter())
            .map(|(yi, row)| yi * &row[col])
            .sum()
    }

    pub fn y_dot_b(&self) -> Rational {
        self.y
            .iter()
            .zip(self.b.iter())
            .map(|(yi, bi)| yi * bi)
            .sum()
    }

    /// Dual feasibility `y A <= c` checked entry by entry.
    pub fn dual_feasible(&self) -> bool {
        (0..self.c.len()).all(|j| self.y_dot_a(j) <= self.c[j])
    }

    /// True when the multipliers prove the claimed standard-form lower bound
    /// (optimality) or a Farkas contradiction (infeasibility).
    pub fn verify(&self, claimed_min: Option<&Rational>) -> bool {
        match claimed_min {
            Some(v) => self.dual_feasible() && self.y_dot_b() == *v,
            None => {
                (0..self.c.len()).all(|j| self.y_dot_a(j) <= Rational::zero())
                    && self.y_dot_b() > Rational::zero()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// `value` is the maximum of the general objective; `x` attains it.
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        certificate: Certificate,
    },
    Infeasible {
        certificate: Certificate,
    },
    Unbounded,
}

impl GeneralLp {
    pub fn new(num_vars: usize) -> Self {
        GeneralLp {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, cmp: Cmp, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push((coeffs, cmp, rhs));
    }

    /// Solves the program. Free variables are split into positive and
    /// negative parts; inequalities gain slack columns; the `maximize` is run
    /// as a standard-form minimization of the negated objective.
    pub fn solve(&self) -> LpOutcome {
        let n_free = self.num_vars;
        let m = self.constraints.len();
        let n_slack = self
            .constraints
            .iter()
            .filter(|(_, cmp, _)| *cmp != Cmp::Eq)
            .count();
        let n = 2 * n_free + n_slack;

        let mut a = vec![vec![Rational::zero(); n]; m];
        let mut b = vec![Rational::zero(); m];
        let mut c = vec![Rational::zero(); n];
        for j in 0..n_free {
            c[2 * j] = -self.objective[j].clone();
            c[2 * j + 1] = self.objective[j].clone();
        }

        let mut slack = 2 * n_free;
        for (i, (coeffs, cmp, rhs)) in self.constraints.iter().enumerate() {
            for j in 0..n_free {
                a[i][2 * j] = coeffs[j].clone();
                a[i][2 * j + 1] = -coeffs[j].clone();
            }
            match cmp {
                Cmp::Le => {
                    a[i][slack] = Rational::one();
                    slack += 1;
                }
                Cmp::Ge => {
                    a[i][slack] = -Rational::one();
                    slack += 1;
                }
                Cmp::Eq => {}
            }
            b[i] = rhs.clone();
        }
        for i in 0..m {
            if b[i].is_negative() {
                for j in 0..n {
                    a[i][j] = -a[i][j].clone();
                }
                b[i] = -b[i].clone();
            }
        }

        match simplex_standard(&a, &b, &c) {
            StandardOutcome::Optimal { x, value, y } => {
                let solution: Vec<Rational> = (0..n_free)
                    .map(|j| &x[2 * j] - &x[2 * j + 1])
                    .collect();
                LpOutcome::Optimal {
                    x: solution,
                    value: -value,
                    certificate: Certificate { a, b, c, y },
                }
            }
            StandardOutcome::Infeasible { y } => LpOutcome::Infeasible {
                certificate: Certificate { a, b, c, y },
            },
            StandardOutcome::Unbounded => LpOutcome::Unbounded,
        }
    }

    /// Feasibility check: a point satisfying every constraint, if one exists.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let mut probe = self.clone();
        probe.objective = vec![Rational::zero(); probe.num_vars];
        match probe.solve() {
            LpOutcome::Optimal { x, .. } => Some(x),
            LpOutcome::Infeasible { .. } => None,
            LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
        }
    }
}

enum StandardOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        y: Vec<Rational>,
    },
    Infeasible {
        y: Vec<Rational>,
    },
    Unbounded,
}

/// min c·x s.t. A x = b, x >= 0, with b >= 0 on entry. The tableau keeps the
/// artificial columns so final dual multipliers can be read off them.
fn simplex_standard(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> StandardOutcome {
    let m = a.len();
    let n = if m == 0 { c.len() } else { a[0].len() };
    // Columns: n original, m artificial, then rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            row.extend(a[i].iter().cloned());
            for k in 0..m {
                row.push(if k == i {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let phase1_cost = |j: usize| {
        if j >= n {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    run_simplex(&mut t, &mut basis, n + m, &phase1_cost);
    let phase1_value: Rational = basis
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            if j >= n {
                t[i][width - 1].clone()
            } else {
                Rational::zero()
            }
        })
        .sum();
    if !phase1_value.is_zero() {
        let y = read_duals(&t, &basis, n, m, &phase1_cost);
        return StandardOutcome::Infeasible { y };
    }
    // Drive zero-level artificials out of the basis where possible; rows that
    // are zero across all original columns are redundant and stay put.
    for i in 0..m {
        if basis[i] < n {
            continue;
        }
        if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
            pivot(&mut t, &mut basis, i, j);
        }
    }

    // Phase 2 over the original columns only.
    let phase2_cost = |j: usize| {
        if j < n {
            c[j].clone()
        } else {
            Rational::zero()
        }
    };
    if !run_simplex(&mut t, &mut basis, n, &phase2_cost) {
        return StandardOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][width - 1].clone();
        }
    }
    let value: Rational = (0..n).map(|j| &c[j] * &x[j]).sum();
    let y = read_duals(&t, &basis, n, m, &phase2_cost);
    StandardOutcome::Optimal { x, value, y }
}

/// Bland's rule iteration. `col_limit` restricts entering columns. Returns
/// false when an entering column proves the program unbounded.
fn run_simplex<F: Fn(usize) -> Rational>(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    col_limit: usize,
    cost: &F,
) -> bool {
    let m = t.len();
    if m == 0 {
        return true;
    }
    let width = t[0].len();
    loop {
        // Reduced cost of column j: c_j - sum_i c_B(i) * t[i][j].
        let mut entering = None;
        for j in 0..col_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut r = cost(j);
            for i in 0..m {
                let cb = cost(basis[i]);
                if !cb.is_zero() {
                    r -= cb * &t[i][j];
                }
            }
            if r.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else { return true };
        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][j].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][j];
                match &leaving {
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leaving = Some((i, ratio));
                        }
                    }
                    None => leaving = Some((i, ratio)),
                }
            }
        }
        let Some((i, _)) = leaving else { return false };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], row: usize, col: usize) {
    let width = t[row].len();
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = &*v / &p;
    }
    for i in 0..t.len() {
        if i == row || t[i][col].is_zero() {
            continue;
        }
        let f = t[i][col].clone();
        for j in 0..width {
            let v = &t[i][j] - &f * &t[row][j];
            t[i][j] = v;
        }
    }
    basis[row] = col;
}

/// y = c_B * B^{-1}, read from the artificial columns which carry B^{-1}.
fn read_duals<F: Fn(usize) -> Rational>(
    t: &[Vec<Rational>],
    basis: &[usize],
    n: usize,
    m: usize,
    cost: &F,
) -> Vec<Rational> {
    (0..m)
        .map(|i| {
            let mut y = Rational::zero();
            for (k, &bk) in basis.iter().enumerate() {
                let cb = cost(bk);
                if !cb.is_zero() {
                    y += cb * &t[k][n + i];
                }
            }
            y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_int};

    fn r(n: i64) -> Rational {
        rat_int(n)
    }

    #[test]
    fn bounded_maximum_with_certificate() {
        // max x + y s.t. x + y <= 1, x <= 1, y <= 1.
        let mut lp = GeneralLp::new(2);
        lp.objective = vec![r(1), r(1)];
        lp.constrain(vec![r(1), r(1)], Cmp::Le, r(1));
        lp.constrain(vec![r(1), r(0)], Cmp::Le, r(1));
        lp.constrain(vec![r(0), r(1)], Cmp::Le, r(1));
        match lp.solve() {
            LpOutcome::Optimal {
                x,
                value,
                certificate,
            } => {
                assert_eq!(value, r(1));
                assert_eq!(&x[0] + &x[1], r(1));
                // Weak duality proves max = 1, i.e. standard-form min = -1.
                assert!(certificate.verify(Some(&r(-1))));
            }
            other => panic!("expected optimum, got {:?}", other),
        }
    }

    #[test]
    fn infeasible_with_farkas() {
        let mut lp = GeneralLp::new(1);
        lp.constrain(vec![r(1)], Cmp::Ge, r(1));
        lp.constrain(vec![r(1)], Cmp::Le, r(0));
        match lp.solve() {
            LpOutcome::Infeasible { certificate } => {
                assert!(certificate.verify(None));
            }
            other => panic!("expected infeasible, got {:?}", other),
        }
        assert!(lp.feasible_point().is_none());
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = GeneralLp::new(1);
        lp.objective = vec![r(1)];
        lp.constrain(vec![r(1)], Cmp::Ge, r(0));
        assert!(matches!(lp.solve(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_rows_are_harmless() {
        // x + y = 1 duplicated, y >= 0, max x.
        let mut lp = GeneralLp::new(2);
        lp.objective = vec![r(1), r(0)];
        lp.constrain(vec![r(1), r(1)], Cmp::Eq, r(1));
        lp.constrain(vec![r(2), r(2)], Cmp::Eq, r(2));
        lp.constrain(vec![r(0), r(1)], Cmp::Ge, r(0));
        match lp.solve() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, r(1));
                assert_eq!(x, vec![r(1), r(0)]);
            }
            other => panic!("expected optimum, got {:?}", other),
        }
    }

    #[test]
    fn fractional_optimum() {
        // max y s.t. 2y <= 1, y >= -3.
        let mut lp = GeneralLp::new(1);
        lp.objective = vec![r(1)];
        lp.constrain(vec![r(2)], Cmp::Le, r(1));
        lp.constrain(vec![r(1)], Cmp::Ge, r(-3));
        match lp.solve() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, rat(1, 2));
                assert_eq!(x, vec![rat(1, 2)]);
            }
            other => panic!("expected optimum, got {:?}", other),
        }
    }

    #[test]
    fn equality_only_system() {
        let mut lp = GeneralLp::new(2);
        lp.constrain(vec![r(1), r(1)], Cmp::Eq, r(2));
        lp.constrain(vec![r(1), r(-1)], Cmp::Eq, r(0));
        let p = lp.feasible_point().expect("consistent system");
        assert_eq!(p, vec![r(1), r(1)]);
    }
}
