//! The executable acceptance corpus: deterministic random instances, brute
//! force oracles kept independent of the engine code paths, and one runner
//! per criterion. The CLI exposes this as `verify-corpus`; the integration
//! suite asserts every criterion.

use crate::belyi::{belyi_run, critical_values, BelyiState, RatPoly};
use crate::cone::Cone;
use crate::exactmath::{int, BigInt, IntMatrix, LatticeVector};
use crate::fan::{
    barycentric_subdivision, check_compatible_family, is_projective_subdivision, is_refinement,
    resolve, stellar_subdivision, toric_from_monomials, CompatibleFamily, Fan,
    ProjectivityOutcome, StrataRelation, StrataSystem, Stratum,
};
use crate::fibration::{
    fiber_tree_check, separate_all, ComponentRecord, ContactClass, SeparationState,
};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

/// Constant seed recorded in run reports; all corpora derive from it.
pub const TIE_BREAK_SEED: u64 = 0xD551;

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub details: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {}: {} - {} ({})",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1_hilbert_oracle(),
        criterion_2_toric_resolution(),
        criterion_3_barycentric_projectivity(),
        criterion_4_a1_end_to_end(),
        criterion_5_belyi_descent(),
        criterion_6_separation_descent(),
        criterion_7_normal_forms(),
        criterion_8_compatible_family(),
    ]
}

/// Brute-force reference computations on small integer data. These stay
/// deliberately separate from the engine implementations: membership is
/// Carathéodory subset search with integer Cramer determinants, and Hilbert
/// bases come from box enumeration plus pairwise reduction.
pub mod oracles {
    use std::collections::BTreeSet;

    fn det_i128(m: &[Vec<i128>]) -> i128 {
        match m.len() {
            0 => 1,
            1 => m[0][0],
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            n => {
                let mut acc = 0i128;
                for (col, cell) in m[0].iter().enumerate() {
                    if *cell == 0 {
                        continue;
                    }
                    let minor: Vec<Vec<i128>> = m[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|&(c, _)| c != col)
                                .map(|(_, &v)| v)
                                .collect()
                        })
                        .collect();
                    let sign = if col % 2 == 0 { 1 } else { -1 };
                    acc += sign * cell * det_i128(&minor);
                    let _ = n;
                }
                acc
            }
        }
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(k);
        fn rec(n: usize, k: usize, start: usize, buf: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if buf.len() == k {
                out.push(buf.clone());
                return;
            }
            for i in start..n {
                buf.push(i);
                rec(n, k, i + 1, buf, out);
                buf.pop();
            }
        }
        rec(n, k, 0, &mut buf, &mut out);
        out
    }

    fn integer_rank(rows: &[Vec<i128>]) -> usize {
        let mut m: Vec<Vec<i128>> = rows.to_vec();
        let cols = m.first().map(|r| r.len()).unwrap_or(0);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let Some(p) = (row..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(row, p);
            for r in row + 1..m.len() {
                if m[r][col] == 0 {
                    continue;
                }
                let (a, b) = (m[row][col], m[r][col]);
                for c in col..cols {
                    m[r][c] = m[r][c] * a - m[row][c] * b;
                }
            }
            row += 1;
            rank += 1;
        }
        rank
    }

    /// Exact membership of `x` in the cone generated by `rays`: some
    /// independent subset of full rank carries `x` with nonnegative Cramer
    /// coordinates.
    pub fn cone_contains(rays: &[Vec<i64>], x: &[i64]) -> bool {
        if x.iter().all(|&v| v == 0) {
            return true;
        }
        if rays.is_empty() {
            return false;
        }
        let n = x.len();
        let wide: Vec<Vec<i128>> = rays
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        let r = integer_rank(&wide);
        for subset in combinations(rays.len(), r) {
            // Columns of the candidate generator matrix.
            let cols: Vec<&Vec<i128>> = subset.iter().map(|&i| &wide[i]).collect();
            // An invertible r x r row subsystem.
            let mut found = false;
            for row_set in combinations(n, r) {
                let square: Vec<Vec<i128>> = row_set
                    .iter()
                    .map(|&ri| cols.iter().map(|c| c[ri]).collect())
                    .collect();
                let d = det_i128(&square);
                if d == 0 {
                    continue;
                }
                let mut coord_dets = Vec::with_capacity(r);
                for i in 0..r {
                    let replaced: Vec<Vec<i128>> = row_set
                        .iter()
                        .enumerate()
                        .map(|(q, &ri)| {
                            let mut row: Vec<i128> =
                                cols.iter().map(|c| c[ri]).collect();
                            row[i] = x[ri] as i128;
                            let _ = q;
                            row
                        })
                        .collect();
                    coord_dets.push(det_i128(&replaced));
                }
                // Verify the Cramer solution on every coordinate (this also
                // certifies x lies in the span of the subset).
                let consistent = (0..n).all(|coord| {
                    let lhs: i128 = (0..r)
                        .map(|i| coord_dets[i] * cols[i][coord])
                        .sum();
                    lhs == d * x[coord] as i128
                });
                if consistent {
                    found = true;
                    if coord_dets.iter().all(|&cd| cd * d >= 0) {
                        return true;
                    }
                }
                if found {
                    break; // in span but with a negative coordinate
                }
            }
        }
        false
    }

    /// Hilbert basis by brute force: lattice points of the subset-sum box
    /// that lie in the cone, reduced to the elements that are not a sum of
    /// two nonzero cone points.
    pub fn hilbert_basis_box(rays: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
        if rays.is_empty() {
            return BTreeSet::new();
        }
        let n = rays[0].len();
        let lo: Vec<i64> = (0..n)
            .map(|j| rays.iter().map(|r| r[j].min(0)).sum())
            .collect();
        let hi: Vec<i64> = (0..n)
            .map(|j| rays.iter().map(|r| r[j].max(0)).sum())
            .collect();
        let mut points: Vec<Vec<i64>> = Vec::new();
        let mut x = lo.clone();
        'enumerate: loop {
            if x.iter().any(|&v| v != 0) && cone_contains(rays, &x) {
                points.push(x.clone());
            }
            let mut k = 0;
            loop {
                if k == n {
                    break 'enumerate;
                }
                x[k] += 1;
                if x[k] <= hi[k] {
                    break;
                }
                x[k] = lo[k];
                k += 1;
            }
        }
        points.sort_by_key(|p| (p.iter().map(|v| v.abs()).sum::<i64>(), p.clone()));
        let mut basis = BTreeSet::new();
        for (i, p) in points.iter().enumerate() {
            let reducible = points.iter().enumerate().any(|(j, q)| {
                if i == j {
                    return false;
                }
                let diff: Vec<i64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
                diff.iter().any(|&v| v != 0) && cone_contains(rays, &diff)
            });
            if !reducible {
                basis.insert(p.clone());
            }
        }
        basis
    }
}

/// Deterministic random instances for the corpus.
pub mod corpus {
    use super::*;

    pub fn random_pointed_cone(
        rng: &mut ChaCha8Rng,
        rank: usize,
        require_full_dim: bool,
    ) -> Cone {
        loop {
            let ray_count = rng.gen_range(rank.max(2)..=rank + 1);
            let rays: Vec<LatticeVector> = (0..ray_count)
                .map(|_| {
                    LatticeVector::from_i64(
                        &(0..rank)
                            .map(|_| rng.gen_range(-5..=5))
                            .collect::<Vec<i64>>(),
                    )
                })
                .collect();
            if rays.iter().any(|r| r.is_zero()) {
                continue;
            }
            let Ok(cone) = Cone::from_generators(rank, rays) else {
                continue;
            };
            if !cone.is_pointed() || cone.rays().is_empty() {
                continue;
            }
            if require_full_dim && cone.dim() != rank {
                continue;
            }
            return cone;
        }
    }

    /// A valid fan: a random pointed cone refined by a few random stellar
    /// subdivisions, which preserve validity.
    pub fn random_valid_fan(rng: &mut ChaCha8Rng, rank: usize) -> Fan {
        let cone = random_pointed_cone(rng, rank, true);
        let mut fan = Fan::from_cone(cone.clone());
        for _ in 0..rng.gen_range(0..=2) {
            let weights: Vec<BigInt> = (0..cone.rays().len())
                .map(|_| int(rng.gen_range(0..=3)))
                .collect();
            let mut point = LatticeVector::zero(rank);
            for (w, r) in weights.iter().zip(cone.rays()) {
                point = point.add(&r.scale(w));
            }
            if point.is_zero() {
                continue;
            }
            let point = point.primitive().expect("nonzero");
            fan = stellar_subdivision(&fan, &point).expect("point lies in the support");
        }
        fan
    }

    pub fn random_squarefree_poly(rng: &mut ChaCha8Rng) -> RatPoly {
        loop {
            let deg = rng.gen_range(2..=5);
            let mut coeffs: Vec<i64> = (0..deg).map(|_| rng.gen_range(-8..=8)).collect();
            coeffs.push(1);
            let f = RatPoly::from_i64(&coeffs);
            let g = f.gcd(&f.derivative()).expect("nonzero");
            if g.is_constant() {
                return f;
            }
        }
    }

    fn random_ultrametric(
        rng: &mut ChaCha8Rng,
        members: &[u32],
        level: u64,
        out: &mut BTreeMap<(u32, u32), u64>,
    ) {
        if members.len() <= 1 {
            return;
        }
        let assign_all = |members: &[u32], value: u64, out: &mut BTreeMap<(u32, u32), u64>| {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let key = if i < j { (i, j) } else { (j, i) };
                    out.insert(key, value);
                }
            }
        };
        if level >= 5 {
            assign_all(members, 5, out);
            return;
        }
        // Split into at least two nonempty groups; pairs across groups meet
        // at this level, pairs inside recurse deeper.
        let mut groups: Vec<Vec<u32>>;
        loop {
            let g = rng.gen_range(2..=members.len());
            groups = vec![Vec::new(); g];
            let mut shuffled = members.to_vec();
            shuffled.shuffle(rng);
            for (idx, m) in shuffled.into_iter().enumerate() {
                if idx < g {
                    groups[idx].push(m);
                } else {
                    groups[rng.gen_range(0..g)].push(m);
                }
            }
            groups.retain(|gr| !gr.is_empty());
            if groups.len() >= 2 {
                break;
            }
        }
        for (a, ga) in groups.iter().enumerate() {
            for gb in &groups[a + 1..] {
                for &i in ga {
                    for &j in gb {
                        let key = if i < j { (i, j) } else { (j, i) };
                        out.insert(key, level);
                    }
                }
            }
        }
        for group in &groups {
            let mut sorted = group.clone();
            sorted.sort_unstable();
            random_ultrametric(rng, &sorted, level + 1, out);
        }
    }

    pub fn random_separation_state(rng: &mut ChaCha8Rng) -> SeparationState {
        let sections = rng.gen_range(2..=8u32);
        let component_count = rng.gen_range(1..=5u32);
        let mut components = Vec::new();
        for id in 1..=component_count {
            let mut pool: Vec<u32> = (1..=sections).collect();
            pool.shuffle(rng);
            let mut classes = Vec::new();
            while pool.len() >= 2 && rng.gen_bool(0.8) {
                let size = rng.gen_range(2..=pool.len().min(5));
                let members: Vec<u32> = pool.drain(..size).collect();
                let mut sorted = members.clone();
                sorted.sort_unstable();
                let mut mult = BTreeMap::new();
                let base_level = rng.gen_range(1..=2);
                random_ultrametric(rng, &sorted, base_level, &mut mult);
                classes.push(ContactClass::new(sorted, mult));
            }
            components.push(ComponentRecord { id, classes });
        }
        let state = SeparationState {
            sections,
            components,
        };
        debug_assert!(state.validate().is_ok());
        state
    }
}

fn cone_rays_i64(cone: &Cone) -> Vec<Vec<i64>> {
    cone.rays()
        .iter()
        .map(|r| {
            r.entries()
                .iter()
                .map(|e| i64::try_from(e).expect("corpus entries stay small"))
                .collect()
        })
        .collect()
}

pub fn criterion_1_hilbert_oracle() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(TIE_BREAK_SEED ^ 1);
    let start = Instant::now();
    let mut checked = 0;
    for _ in 0..200 {
        let rank = rng.gen_range(2..=3);
        let cone = corpus::random_pointed_cone(&mut rng, rank, false);
        let rays = cone_rays_i64(&cone);
        let expected = oracles::hilbert_basis_box(&rays);
        let got: BTreeSet<Vec<i64>> = match cone.hilbert_basis() {
            Ok(hb) => hb
                .elements
                .iter()
                .map(|v| {
                    v.entries()
                        .iter()
                        .map(|e| i64::try_from(e).expect("small"))
                        .collect()
                })
                .collect(),
            Err(e) => {
                return CriterionReport {
                    id: 1,
                    name: "Hilbert basis matches the box-enumeration oracle",
                    pass: false,
                    details: format!("hilbert_basis failed on {:?}: {e}", cone),
                }
            }
        };
        if got != expected {
            return CriterionReport {
                id: 1,
                name: "Hilbert basis matches the box-enumeration oracle",
                pass: false,
                details: format!(
                    "mismatch on {:?}: engine {:?} vs oracle {:?}",
                    cone, got, expected
                ),
            };
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    CriterionReport {
        id: 1,
        name: "Hilbert basis matches the box-enumeration oracle",
        pass: elapsed < Duration::from_secs(60),
        details: format!("{checked} cones in {:.2?} (budget 60s)", elapsed),
    }
}

pub fn criterion_2_toric_resolution() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(TIE_BREAK_SEED ^ 2);
    let mut worst = Duration::ZERO;
    for index in 0..100 {
        let cone = corpus::random_pointed_cone(&mut rng, 3, true);
        let fan = Fan::from_cone(cone.clone());
        let start = Instant::now();
        let resolution = match resolve(&fan) {
            Ok(r) => r,
            Err(e) => {
                return CriterionReport {
                    id: 2,
                    name: "toric resolution reaches a smooth refinement",
                    pass: false,
                    details: format!("resolve failed on {:?}: {e}", cone),
                }
            }
        };
        let elapsed = start.elapsed();
        worst = worst.max(elapsed);
        let fail = |details: String| CriterionReport {
            id: 2,
            name: "toric resolution reaches a smooth refinement",
            pass: false,
            details,
        };
        if elapsed >= Duration::from_secs(10) {
            return fail(format!("instance {index} took {:.2?}", elapsed));
        }
        if let Some(bad) = resolution.fan.cones().iter().find(|c| !c.is_smooth()) {
            return fail(format!("non-smooth cone {:?} in output", bad));
        }
        match is_refinement(&resolution.fan, &fan) {
            Ok(true) => {}
            other => return fail(format!("refinement check: {:?} on {:?}", other, cone)),
        }
        if let Err(v) = resolution.fan.validate() {
            return fail(format!("output fan invalid: {v}"));
        }
    }
    CriterionReport {
        id: 2,
        name: "toric resolution reaches a smooth refinement",
        pass: true,
        details: format!("100 cones resolved; slowest {:.2?} (budget 10s each)", worst),
    }
}

pub fn criterion_3_barycentric_projectivity() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(TIE_BREAK_SEED ^ 3);
    let mut certified = 0;
    for _ in 0..50 {
        let rank = rng.gen_range(2..=3);
        let fan = corpus::random_valid_fan(&mut rng, rank);
        for cone in fan.cones() {
            let single = Fan::from_cone(cone.clone());
            let fine = match barycentric_subdivision(&single) {
                Ok(f) => f,
                Err(e) => {
                    return CriterionReport {
                        id: 3,
                        name: "barycentric subdivisions carry projectivity certificates",
                        pass: false,
                        details: format!("barycentric failed: {e}"),
                    }
                }
            };
            match is_projective_subdivision(&fine, cone) {
                Ok(ProjectivityOutcome::Certified(cert)) => {
                    if let Err(reason) = cert.validate(&fine) {
                        return CriterionReport {
                            id: 3,
                            name: "barycentric subdivisions carry projectivity certificates",
                            pass: false,
                            details: format!("certificate failed revalidation: {reason}"),
                        };
                    }
                    certified += 1;
                }
                other => {
                    return CriterionReport {
                        id: 3,
                        name: "barycentric subdivisions carry projectivity certificates",
                        pass: false,
                        details: format!("no certificate for {:?}: {:?}", cone, other),
                    }
                }
            }
        }
    }
    CriterionReport {
        id: 3,
        name: "barycentric subdivisions carry projectivity certificates",
        pass: true,
        details: format!("{certified} support cones certified across 50 fans"),
    }
}

pub fn criterion_4_a1_end_to_end() -> CriterionReport {
    let fail = |details: String| CriterionReport {
        id: 4,
        name: "A1 model: dual cone, multiplicity, and resolution are exact",
        pass: false,
        details,
    };
    let monomials = vec![
        LatticeVector::from_i64(&[1, 0]),
        LatticeVector::from_i64(&[1, 2]),
    ];
    let model = match toric_from_monomials(2, monomials, 0) {
        Ok(m) => m,
        Err(e) => return fail(format!("toric_from_monomials failed: {e}")),
    };
    let expected_n_plus = Cone::new(
        2,
        vec![
            LatticeVector::from_i64(&[0, 1]),
            LatticeVector::from_i64(&[2, -1]),
        ],
    )
    .expect("valid cone");
    if model.n_plus != expected_n_plus {
        return fail(format!("N+ is {:?}", model.n_plus));
    }
    match model.n_plus.multiplicity() {
        Ok(m) if m == int(2) => {}
        other => return fail(format!("multiplicity: {:?}", other)),
    }
    let resolution = match resolve(&Fan::from_cone(model.n_plus.clone())) {
        Ok(r) => r,
        Err(e) => return fail(format!("resolve failed: {e}")),
    };
    if resolution.fan.cones().len() != 2 {
        return fail(format!("{} cones in resolution", resolution.fan.cones().len()));
    }
    if !resolution.fan.cones().iter().all(|c| c.is_smooth()) {
        return fail("resolution output is not smooth".into());
    }
    let inserted = LatticeVector::from_i64(&[1, 0]);
    let has_ray = resolution
        .fan
        .cones()
        .iter()
        .any(|c| c.rays().contains(&inserted));
    if !has_ray {
        return fail("ray (1,0) was not inserted".into());
    }
    CriterionReport {
        id: 4,
        name: "A1 model: dual cone, multiplicity, and resolution are exact",
        pass: true,
        details: "N+ = cone{(0,1),(2,-1)}, multiplicity 2, two smooth cones via (1,0)".into(),
    }
}

pub fn criterion_5_belyi_descent() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(TIE_BREAK_SEED ^ 5);
    let mut worst = Duration::ZERO;
    let mut steps_total = 0;
    for _ in 0..100 {
        let f = corpus::random_squarefree_poly(&mut rng);
        let state = match BelyiState::new(vec![f.clone()], Vec::new(), true) {
            Ok(s) => s,
            Err(e) => {
                return CriterionReport {
                    id: 5,
                    name: "branch-degree descent terminates with rational sections",
                    pass: false,
                    details: format!("state construction failed on {:?}: {e}", f),
                }
            }
        };
        let start = Instant::now();
        let run = belyi_run(&state);
        let elapsed = start.elapsed();
        worst = worst.max(elapsed);
        let fail = |details: String| CriterionReport {
            id: 5,
            name: "branch-degree descent terminates with rational sections",
            pass: false,
            details,
        };
        let (final_state, trace) = match run {
            Ok(r) => r,
            Err(e) => return fail(format!("belyi_run failed on {:?}: {e}", f)),
        };
        if elapsed >= Duration::from_secs(5) {
            return fail(format!("instance {:?} took {:.2?}", f, elapsed));
        }
        if !final_state.factors().is_empty() {
            return fail(format!("irrational branch points remain for {:?}", f));
        }
        for step in &trace.steps {
            if step.after >= step.before {
                return fail(format!(
                    "measure did not drop: {:?} -> {:?}",
                    step.before, step.after
                ));
            }
            let d = step.chosen.degree().expect("chosen factor is nonconstant");
            let crit = match critical_values(&step.chosen) {
                Ok(c) => c,
                Err(e) => return fail(format!("critical values failed: {e}")),
            };
            if crit.degree().unwrap_or(0) > d - 1 {
                return fail(format!(
                    "critical degree bound violated for {:?}",
                    step.chosen
                ));
            }
        }
        steps_total += trace.steps.len();
    }
    CriterionReport {
        id: 5,
        name: "branch-degree descent terminates with rational sections",
        pass: true,
        details: format!(
            "100 polynomials, {steps_total} steps total; slowest {:.2?} (budget 5s each)",
            worst
        ),
    }
}

pub fn criterion_6_separation_descent() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(TIE_BREAK_SEED ^ 6);
    for _ in 0..200 {
        let state = corpus::random_separation_state(&mut rng);
        let initial_total = state.measure().total;
        let fail = |details: String| CriterionReport {
            id: 6,
            name: "section separation descends to disjoint sections",
            pass: false,
            details,
        };
        let run = match separate_all(&state) {
            Ok(r) => r,
            Err(e) => return fail(format!("separate_all failed: {e}")),
        };
        if run.ledger.entries.len() as u64 > initial_total {
            return fail(format!(
                "{} steps exceeds initial total {initial_total}",
                run.ledger.entries.len()
            ));
        }
        if run.final_state.measure().n_p != 1 {
            return fail("final state is not fully separated".into());
        }
        for w in run.measures.windows(2) {
            if w[1].total >= w[0].total {
                return fail("total multiplicity failed to drop".into());
            }
            if (w[1].n_p, w[1].count_at_max) > (w[0].n_p, w[0].count_at_max) {
                return fail("(n_P, N_P) lex-increased".into());
            }
        }
        for s in &run.states {
            if let Err(v) = s.validate() {
                return fail(format!("intermediate state invalid: {v}"));
            }
        }
        for (state_at, trees_at) in run.states.iter().zip(&run.tree_history) {
            for tree in trees_at {
                if !fiber_tree_check(tree, state_at) {
                    return fail("fiber tree check failed mid-run".into());
                }
            }
        }
    }
    CriterionReport {
        id: 6,
        name: "section separation descends to disjoint sections",
        pass: true,
        details: "200 random states separated with monotone measures".into(),
    }
}

pub fn criterion_7_normal_forms() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(TIE_BREAK_SEED ^ 7);
    for _ in 0..500 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let entries: Vec<BigInt> = (0..rows * cols)
            .map(|_| int(rng.gen_range(-20..=20)))
            .collect();
        let a = IntMatrix::from_entries(rows, cols, entries).expect("sized entries");
        let fail = |details: String| CriterionReport {
            id: 7,
            name: "normal forms recompose with unimodular transforms",
            pass: false,
            details,
        };
        let hnf = a.hnf();
        if hnf.u.mul(&a).expect("sizes match") != hnf.h {
            return fail(format!("H != U*A for {:?}", a));
        }
        if !hnf.u.det().expect("square").abs().is_one() {
            return fail("U is not unimodular".into());
        }
        let snf = a.snf();
        if snf.u.mul(&a).expect("sizes").mul(&snf.v).expect("sizes") != snf.s {
            return fail(format!("S != U*A*V for {:?}", a));
        }
        if !snf.u.det().expect("square").abs().is_one()
            || !snf.v.det().expect("square").abs().is_one()
        {
            return fail("SNF transforms are not unimodular".into());
        }
        let divisors = snf.elementary_divisors();
        for w in divisors.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return fail(format!("divisibility chain broken: {:?}", divisors));
            }
        }
        if rows == cols {
            let product: BigInt = if divisors.len() < rows {
                BigInt::from(0)
            } else {
                divisors.iter().product()
            };
            if a.det().expect("square").abs() != product.abs() {
                return fail(format!("det mismatch for {:?}", a));
            }
        }
    }
    CriterionReport {
        id: 7,
        name: "normal forms recompose with unimodular transforms",
        pass: true,
        details: "500 random matrices up to 4x4 verified".into(),
    }
}

fn orthant(rank: usize) -> Cone {
    let rays: Vec<LatticeVector> = (0..rank)
        .map(|i| {
            let mut e = vec![0i64; rank];
            e[i] = 1;
            LatticeVector::from_i64(&e)
        })
        .collect();
    Cone::new(rank, rays).expect("orthant is valid")
}

fn face_inclusion(rows: usize, cols: usize) -> IntMatrix {
    let mut m = IntMatrix::zero(rows, cols);
    for i in 0..cols {
        m.set(i, i, int(1));
    }
    m
}

pub fn criterion_8_compatible_family() -> CriterionReport {
    let system = StrataSystem {
        strata: vec![
            Stratum {
                label: "curve".into(),
                codim: 1,
                support: orthant(1),
            },
            Stratum {
                label: "surface".into(),
                codim: 2,
                support: orthant(2),
            },
            Stratum {
                label: "point".into(),
                codim: 3,
                support: orthant(3),
            },
        ],
        relations: vec![
            StrataRelation {
                small: "curve".into(),
                big: "surface".into(),
                map: face_inclusion(2, 1),
            },
            StrataRelation {
                small: "surface".into(),
                big: "point".into(),
                map: face_inclusion(3, 2),
            },
            StrataRelation {
                small: "curve".into(),
                big: "point".into(),
                map: face_inclusion(3, 1),
            },
        ],
    };
    let fail = |details: String| CriterionReport {
        id: 8,
        name: "barycentric family over the orthant chain is compatible",
        pass: false,
        details,
    };
    let barycentric_family = || -> Result<CompatibleFamily, String> {
        let mut subdivisions = BTreeMap::new();
        for s in &system.strata {
            let fan = barycentric_subdivision(&Fan::from_cone(s.support.clone()))
                .map_err(|e| e.to_string())?;
            subdivisions.insert(s.label.clone(), fan);
        }
        Ok(CompatibleFamily { subdivisions })
    };
    let family = match barycentric_family() {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match check_compatible_family(&system, &family) {
        Ok(Ok(())) => {}
        other => return fail(format!("barycentric family rejected: {:?}", other)),
    }
    let mut broken = family.clone();
    broken
        .subdivisions
        .insert("surface".into(), Fan::from_cone(orthant(2)));
    match check_compatible_family(&system, &broken) {
        Ok(Err(violation)) => {
            // The broken level must appear in the reported relation.
            if violation.small != "surface" && violation.big != "surface" {
                return fail(format!("violation not located: {violation}"));
            }
        }
        other => {
            return fail(format!(
                "trivial level was not rejected: {:?}",
                other.map(|r| r.is_ok())
            ))
        }
    }
    CriterionReport {
        id: 8,
        name: "barycentric family over the orthant chain is compatible",
        pass: true,
        details: "3-level chain accepted; trivial middle level rejected with location".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_membership_agrees_with_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let rank = rng.gen_range(2..=3);
            let cone = corpus::random_pointed_cone(&mut rng, rank, false);
            let rays = cone_rays_i64(&cone);
            for _ in 0..25 {
                let x: Vec<i64> = (0..rank).map(|_| rng.gen_range(-6..=6)).collect();
                let engine = cone.contains(&LatticeVector::from_i64(&x));
                let oracle = oracles::cone_contains(&rays, &x);
                assert_eq!(engine, oracle, "between {:?} and point {:?}", cone, x);
            }
        }
    }

    #[test]
    fn oracle_hilbert_matches_on_known_cones() {
        let basis = oracles::hilbert_basis_box(&[vec![1, 0], vec![1, 3]]);
        let expected: BTreeSet<Vec<i64>> =
            [vec![1, 0], vec![1, 1], vec![1, 2], vec![1, 3]].into_iter().collect();
        assert_eq!(basis, expected);
    }

    #[test]
    fn fast_fan_validation_agrees_with_intersections() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..15 {
            let rank = rng.gen_range(2..=3);
            let fan = corpus::random_valid_fan(&mut rng, rank);
            assert_eq!(
                fan.validate().is_ok(),
                fan.validate_by_intersection().is_ok(),
                "on {:?}",
                fan
            );
            assert!(fan.validate().is_ok());
        }
        // An invalid fan rejected by both.
        let overlap = Fan::new(
            2,
            vec![
                Cone::new(
                    2,
                    vec![LatticeVector::from_i64(&[1, 0]), LatticeVector::from_i64(&[0, 1])],
                )
                .unwrap(),
                Cone::new(
                    2,
                    vec![LatticeVector::from_i64(&[1, 1]), LatticeVector::from_i64(&[-1, 1])],
                )
                .unwrap(),
            ],
            None,
        )
        .unwrap();
        assert!(overlap.validate().is_err());
        assert!(overlap.validate_by_intersection().is_err());
    }
}
