//! Rational polyhedral cones in a lattice N: primitivization, duality,
//! faces, Hilbert bases, and the smoothness/simpliciality/multiplicity tests
//! that drive the resolution criterion.
//!
//! A note on words: `is_simplicial` tests linear independence of the ray
//! generators, the standard meaning. Some sources use "simplicial" for the
//! stronger condition that the rays extend to a basis of the lattice; that
//! condition is `is_smooth` here, and the two predicates are kept separate.

use crate::exactmath::{
    saturation_basis, BigInt, ExactError, IntMatrix, LatticeVector, Rational,
};
use crate::lp::{Cmp, GeneralLp};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("zero vector is not a valid ray")]
    ZeroRay,
    #[error("ray of rank {got} in a rank-{expected} cone")]
    RankMismatch { expected: usize, got: usize },
    #[error("ray {0} is a nonnegative combination of the other rays")]
    RedundantRay(String),
    #[error("cone is not pointed (contains a line)")]
    NotPointed,
    #[error("operation requires a simplicial cone")]
    NotSimplicial,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Facet-normal description of a cone: the cone is exactly
/// `{ x : <n, x> >= 0 for every listed normal n }`, each normal primitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualDescription {
    pub facet_normals: Vec<LatticeVector>,
}

/// Minimal generating set of the monoid `cone ∩ N` of a pointed cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertBasis {
    pub elements: Vec<LatticeVector>,
}

/// A rational polyhedral cone, stored canonically: primitive rays, sorted,
/// no ray a nonnegative combination of the others. Pointedness is checked at
/// construction; non-pointed cones arise only as dual outputs and carry a
/// flag.
pub struct Cone {
    rank: usize,
    rays: Vec<LatticeVector>,
    pointed: bool,
    dual: OnceLock<DualDescription>,
    dim: OnceLock<usize>,
    faces: OnceLock<BTreeSet<Vec<usize>>>,
}

impl Clone for Cone {
    fn clone(&self) -> Self {
        let dual = OnceLock::new();
        if let Some(d) = self.dual.get() {
            let _ = dual.set(d.clone());
        }
        let dim = OnceLock::new();
        if let Some(d) = self.dim.get() {
            let _ = dim.set(*d);
        }
        let faces = OnceLock::new();
        if let Some(f) = self.faces.get() {
            let _ = faces.set(f.clone());
        }
        Cone {
            rank: self.rank,
            rays: self.rays.clone(),
            pointed: self.pointed,
            dual,
            dim,
            faces,
        }
    }
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays
    }
}
impl Eq for Cone {}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cone {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, &self.rays).cmp(&(other.rank, &other.rays))
    }
}

impl std::hash::Hash for Cone {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.rays.hash(state);
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone{{")?;
        for (i, r) in self.rays.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", r)?;
        }
        write!(f, "}}")
    }
}

impl Cone {
    /// Builds a cone from generators, rejecting invalid input: zero rays,
    /// rank mismatches, a ray that is a nonnegative combination of the
    /// others, or a cone containing a line. Rays are primitivized and
    /// de-duplicated.
    pub fn new(rank: usize, rays: Vec<LatticeVector>) -> Result<Cone, ConeError> {
        let normalized = Self::normalize_rays(rank, rays)?;
        if let Some(i) = find_redundant_ray(&normalized) {
            return Err(ConeError::RedundantRay(format!("{:?}", normalized[i])));
        }
        let pointed = rays_are_pointed(rank, &normalized);
        if !pointed {
            return Err(ConeError::NotPointed);
        }
        Ok(Cone {
            rank,
            rays: normalized,
            pointed,
            dual: OnceLock::new(),
            dim: OnceLock::new(),
            faces: OnceLock::new(),
        })
    }

    /// Builds the cone generated by arbitrary vectors, silently dropping
    /// redundant generators and flagging (rather than rejecting) a
    /// non-pointed result. This is the constructor used by operations whose
    /// outputs are naturally over-described: duals, intersections, stellar
    /// pieces.
    pub fn from_generators(rank: usize, rays: Vec<LatticeVector>) -> Result<Cone, ConeError> {
        let mut normalized = Self::normalize_rays(rank, rays)?;
        while let Some(i) = find_redundant_ray(&normalized) {
            normalized.remove(i);
        }
        let pointed = rays_are_pointed(rank, &normalized);
        Ok(Cone {
            rank,
            rays: normalized,
            pointed,
            dual: OnceLock::new(),
            dim: OnceLock::new(),
            faces: OnceLock::new(),
        })
    }

    fn normalize_rays(rank: usize, rays: Vec<LatticeVector>) -> Result<Vec<LatticeVector>, ConeError> {
        let mut set = BTreeSet::new();
        for r in rays {
            if r.rank() != rank {
                return Err(ConeError::RankMismatch {
                    expected: rank,
                    got: r.rank(),
                });
            }
            if r.is_zero() {
                return Err(ConeError::ZeroRay);
            }
            set.insert(r.primitive()?);
        }
        Ok(set.into_iter().collect())
    }

    pub fn zero(rank: usize) -> Cone {
        Cone {
            rank,
            rays: Vec::new(),
            pointed: true,
            dual: OnceLock::new(),
            dim: OnceLock::new(),
            faces: OnceLock::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rank, &self.rays).expect("rays all have cone rank")
    }

    /// Dimension of the linear span of the cone (cached).
    pub fn dim(&self) -> usize {
        *self.dim.get_or_init(|| self.ray_matrix().rank())
    }

    /// The facet-normal description, computed once by Fourier–Motzkin
    /// elimination of the generator coefficients and cached.
    pub fn dual_description(&self) -> &DualDescription {
        self.dual.get_or_init(|| DualDescription {
            facet_normals: fm_dual_normals(self.rank, &self.rays),
        })
    }

    /// The dual cone `{ n : <n, m> >= 0 for all generators m }`, as a
    /// generator list. Duals of lower-dimensional cones are non-pointed and
    /// flagged as such.
    pub fn dual_cone(&self) -> Cone {
        let normals = self.dual_description().facet_normals.clone();
        let dual = Cone::from_generators(self.rank, normals)
            .expect("facet normals are nonzero primitive vectors");
        // The facet description of the dual is this cone's generator list.
        let _ = dual.dual.set(DualDescription {
            facet_normals: self.rays.clone(),
        });
        dual
    }

    /// True when the vector satisfies every facet inequality.
    pub fn contains(&self, v: &LatticeVector) -> bool {
        debug_assert_eq!(v.rank(), self.rank);
        self.dual_description()
            .facet_normals
            .iter()
            .all(|n| !n.dot(v).is_negative())
    }

    /// All faces as sets of ray indices, including the cone itself (cached).
    pub fn face_index_sets(&self) -> BTreeSet<Vec<usize>> {
        self.faces
            .get_or_init(|| {
                let full: Vec<usize> = (0..self.rays.len()).collect();
                let mut out = BTreeSet::new();
                out.insert(full.clone());
                let normals = self.dual_description().facet_normals.clone();
                let mut queue = vec![full];
                while let Some(s) = queue.pop() {
                    for n in &normals {
                        let cut: Vec<usize> = s
                            .iter()
                            .copied()
                            .filter(|&i| n.dot(&self.rays[i]).is_zero())
                            .collect();
                        if out.insert(cut.clone()) {
                            queue.push(cut);
                        }
                    }
                }
                out
            })
            .clone()
    }

    /// All proper faces, including the zero face of a pointed cone.
    pub fn faces(&self) -> Vec<Cone> {
        let full: Vec<usize> = (0..self.rays.len()).collect();
        let mut faces: Vec<Cone> = self
            .face_index_sets()
            .into_iter()
            .filter(|s| *s != full)
            .map(|s| self.subcone(&s))
            .collect();
        faces.sort_by_key(|f| (f.rays().len(), f.clone()));
        faces
    }

    /// Faces of codimension one in the cone.
    pub fn facet_index_sets(&self) -> Vec<Vec<usize>> {
        let d = self.dim();
        if d == 0 {
            return Vec::new();
        }
        self.face_index_sets()
            .into_iter()
            .filter(|s| self.subcone(s).dim() + 1 == d && s.len() < self.rays.len())
            .collect()
    }

    fn subcone(&self, indices: &[usize]) -> Cone {
        let rays: Vec<LatticeVector> = indices.iter().map(|&i| self.rays[i].clone()).collect();
        Cone::from_generators(self.rank, rays).expect("subset of canonical rays")
    }

    /// True when `self` equals a face of `other` (the improper face
    /// included).
    pub fn is_face_of(&self, other: &Cone) -> bool {
        if self.rank != other.rank {
            return false;
        }
        if self == other {
            return true;
        }
        if self.rays.is_empty() {
            return other.pointed;
        }
        other
            .face_index_sets()
            .into_iter()
            .any(|s| &other.subcone(&s) == self)
    }

    /// Exact intersection, via the combined facet normals of both cones.
    pub fn intersect(&self, other: &Cone) -> Result<Cone, ConeError> {
        assert_eq!(self.rank, other.rank, "intersection needs matching ranks");
        let mut normals = self.dual_description().facet_normals.clone();
        normals.extend(other.dual_description().facet_normals.iter().cloned());
        let generators = fm_dual_normals(self.rank, &normals);
        Cone::from_generators(self.rank, generators)
    }

    /// True iff the rays are linearly independent over the rationals.
    pub fn is_simplicial(&self) -> bool {
        self.ray_matrix().rank() == self.rays.len()
    }

    /// True iff the rays extend to a basis of the lattice: linearly
    /// independent with all elementary divisors equal to one.
    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        self.ray_matrix()
            .snf()
            .elementary_divisors()
            .iter()
            .all(|d| d.is_one())
    }

    /// Index of the ray span in the lattice points of the span: the product
    /// of the elementary divisors of the ray matrix. One exactly for smooth
    /// cones.
    pub fn multiplicity(&self) -> Result<BigInt, ConeError> {
        if !self.is_simplicial() {
            return Err(ConeError::NotSimplicial);
        }
        Ok(self
            .ray_matrix()
            .snf()
            .elementary_divisors()
            .iter()
            .product())
    }

    /// Coordinates of `v` in the ray basis of a simplicial cone, or `None`
    /// when `v` lies outside the span.
    pub fn simplicial_coordinates(&self, v: &LatticeVector) -> Result<Option<Vec<Rational>>, ConeError> {
        if !self.is_simplicial() {
            return Err(ConeError::NotSimplicial);
        }
        Ok(self.ray_matrix().transpose().solve_rational(v)?)
    }

    /// Nonzero lattice points of the half-open fundamental parallelepiped
    /// `{ sum q_i v_i : 0 <= q_i < 1 }` of a simplicial cone, with their ray
    /// coordinates. Enumerated through the quotient of the span lattice by
    /// the ray lattice, so the cost is proportional to the multiplicity.
    pub fn parallelepiped_points(&self) -> Result<Vec<(LatticeVector, Vec<Rational>)>, ConeError> {
        if !self.is_simplicial() {
            return Err(ConeError::NotSimplicial);
        }
        if self.rays.is_empty() {
            return Ok(Vec::new());
        }
        let v = self.ray_matrix();
        let snf = v.snf();
        let divisors = snf.elementary_divisors();
        debug_assert_eq!(divisors.len(), self.rays.len());
        let span_basis = saturation_basis(&v);
        let vt = v.transpose();

        let mut out = Vec::new();
        let mut counters: Vec<BigInt> = vec![BigInt::zero(); divisors.len()];
        loop {
            // Representative of the quotient class, then reduced into the
            // parallelepiped by taking fractional parts of its coordinates.
            let mut rep = LatticeVector::zero(self.rank);
            for (i, t) in counters.iter().enumerate() {
                rep = rep.add(&span_basis[i].scale(t));
            }
            let coords = vt
                .solve_rational(&rep)?
                .expect("representative lies in the span");
            let mut point = rep.clone();
            let mut frac = Vec::with_capacity(coords.len());
            for (i, q) in coords.iter().enumerate() {
                let fl = q.floor();
                frac.push(q - &fl);
                let fl_int = fl.to_integer();
                point = point.sub(&self.rays[i].scale(&fl_int));
            }
            if !point.is_zero() {
                out.push((point, frac));
            }
            // Advance the mixed-radix counter over the divisor profile.
            let mut i = 0;
            loop {
                if i == counters.len() {
                    out.sort();
                    out.dedup_by(|a, b| a.0 == b.0);
                    return Ok(out);
                }
                counters[i] += 1;
                if counters[i] < divisors[i] {
                    break;
                }
                counters[i] = BigInt::zero();
                i += 1;
            }
        }
    }

    /// Pulling triangulation into simplicial subcones on the same rays.
    pub fn triangulate(&self) -> Vec<Cone> {
        if self.is_simplicial() {
            return vec![self.clone()];
        }
        let apex = self.rays[0].clone();
        let mut pieces = Vec::new();
        for facet in self.facet_index_sets() {
            let facet_cone = self.subcone(&facet);
            if facet_cone.rays().contains(&apex) {
                continue;
            }
            for piece in facet_cone.triangulate() {
                let mut rays = piece.rays().to_vec();
                rays.push(apex.clone());
                pieces.push(
                    Cone::from_generators(self.rank, rays)
                        .expect("pulling piece built from cone rays"),
                );
            }
        }
        pieces.sort();
        pieces.dedup();
        pieces
    }

    /// The unique minimal generating set of `cone ∩ N` for a pointed cone.
    /// Simplicial cones enumerate the fundamental parallelepiped; others are
    /// triangulated first and the union reduced.
    pub fn hilbert_basis(&self) -> Result<HilbertBasis, ConeError> {
        if !self.pointed {
            return Err(ConeError::NotPointed);
        }
        let mut generators: BTreeSet<LatticeVector> = self.rays.iter().cloned().collect();
        for piece in self.triangulate() {
            for (p, _) in piece.parallelepiped_points()? {
                generators.insert(p);
            }
        }
        let generators: Vec<LatticeVector> = generators.into_iter().collect();
        let mut elements = Vec::new();
        for g in &generators {
            let reducible = generators.iter().any(|h| {
                let diff = g.sub(h);
                !diff.is_zero() && !h.is_zero() && self.contains(&diff) && h != g
            });
            if !reducible {
                elements.push(g.clone());
            }
        }
        Ok(HilbertBasis { elements })
    }
}

/// Decides whether two cones intersect exactly in a common face, without
/// computing the intersection. The common rays must span a face of both;
/// beyond that, the pair is compatible exactly when some functional vanishes
/// on the common rays, is strictly positive on the remaining rays of one
/// cone and strictly negative on the remaining rays of the other (the fan
/// separation lemma). Sums of facet normals decide most pairs by plain dot
/// products; the rest fall through to a small exact feasibility program.
pub fn meets_in_common_face(a: &Cone, b: &Cone) -> bool {
    if a.rank() != b.rank() {
        return false;
    }
    if a == b {
        return true;
    }
    let rank = a.rank();
    let common: Vec<LatticeVector> = a
        .rays()
        .iter()
        .filter(|r| b.rays().contains(r))
        .cloned()
        .collect();
    let candidate =
        Cone::from_generators(rank, common.clone()).expect("subset of canonical rays");
    if !candidate.is_face_of(a) || !candidate.is_face_of(b) {
        return false;
    }
    let a_extra: Vec<&LatticeVector> =
        a.rays().iter().filter(|r| !common.contains(r)).collect();
    let b_extra: Vec<&LatticeVector> =
        b.rays().iter().filter(|r| !common.contains(r)).collect();
    if a_extra.is_empty() {
        return true; // a = cone(common) is itself the (checked) common face
    }
    if b_extra.is_empty() {
        return true;
    }

    // Fast witnesses: the sum of one cone's facet normals vanishing on the
    // common rays.
    let witness = |own: &Cone, own_extra: &[&LatticeVector], other_extra: &[&LatticeVector]| {
        let mut sum = LatticeVector::zero(rank);
        for n in &own.dual_description().facet_normals {
            if common.iter().all(|c| n.dot(c).is_zero()) {
                sum = sum.add(n);
            }
        }
        if sum.is_zero() {
            return false;
        }
        own_extra.iter().all(|r| sum.dot(r).is_positive())
            && other_extra.iter().all(|r| sum.dot(r).is_negative())
    };
    if witness(a, &a_extra, &b_extra) || witness(b, &b_extra, &a_extra) {
        return true;
    }

    // Exact separation program.
    let mut lp = GeneralLp::new(rank);
    let as_coeffs = |v: &LatticeVector| -> Vec<Rational> {
        v.entries()
            .iter()
            .map(|e| Rational::from_integer(e.clone()))
            .collect()
    };
    for c in &common {
        lp.constrain(as_coeffs(c), Cmp::Eq, Rational::zero());
    }
    for r in &a_extra {
        lp.constrain(as_coeffs(r), Cmp::Ge, Rational::one());
    }
    for r in &b_extra {
        lp.constrain(as_coeffs(r), Cmp::Le, -Rational::one());
    }
    lp.feasible_point().is_some()
}

/// Index of a ray lying in the cone generated by the other rays, if any.
fn find_redundant_ray(rays: &[LatticeVector]) -> Option<usize> {
    if rays.len() < 2 {
        return None;
    }
    // Linearly independent rays are never redundant.
    let rank = rays[0].rank();
    let m = IntMatrix::from_rows(rank, rays).expect("uniform rank");
    if m.rank() == rays.len() {
        return None;
    }
    (0..rays.len()).find(|&i| {
        let others: Vec<&LatticeVector> = rays
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r)
            .collect();
        in_cone_of(&rays[i], &others)
    })
}

/// Exact feasibility of `target = sum λ_j v_j` with `λ >= 0`.
fn in_cone_of(target: &LatticeVector, generators: &[&LatticeVector]) -> bool {
    let k = generators.len();
    if k == 0 {
        return target.is_zero();
    }
    let rank = target.rank();
    let mut lp = GeneralLp::new(k);
    for coord in 0..rank {
        let coeffs: Vec<Rational> = generators
            .iter()
            .map(|g| Rational::from_integer(g.entries()[coord].clone()))
            .collect();
        lp.constrain(
            coeffs,
            Cmp::Eq,
            Rational::from_integer(target.entries()[coord].clone()),
        );
    }
    for j in 0..k {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs[j] = Rational::one();
        lp.constrain(coeffs, Cmp::Ge, Rational::zero());
    }
    lp.feasible_point().is_some()
}

/// A cone is pointed iff some functional is strictly positive on every ray.
fn rays_are_pointed(rank: usize, rays: &[LatticeVector]) -> bool {
    if rays.is_empty() {
        return true;
    }
    let m = IntMatrix::from_rows(rank, rays).expect("uniform rank");
    if m.rank() == rays.len() {
        return true;
    }
    let mut lp = GeneralLp::new(rank);
    for r in rays {
        let coeffs: Vec<Rational> = r
            .entries()
            .iter()
            .map(|e| Rational::from_integer(e.clone()))
            .collect();
        lp.constrain(coeffs, Cmp::Ge, Rational::one());
    }
    lp.feasible_point().is_some()
}

/// Facet normals of `cone(rays)` by Fourier–Motzkin elimination of the
/// generator coefficients, with primitive reduction and de-duplication at
/// every step and a final minimality pass.
///
/// Variables are ordered `(x_1..x_rank, λ_1..λ_k)`; the system starts from
/// the equalities `x = sum λ_i v_i` and the sign constraints `λ >= 0`.
/// Equalities are used to substitute away as many λ as possible before the
/// quadratic elimination rounds run.
pub(crate) fn fm_dual_normals(rank: usize, rays: &[LatticeVector]) -> Vec<LatticeVector> {
    let k = rays.len();
    let width = rank + k;

    let mut equalities: Vec<Vec<Rational>> = (0..rank)
        .map(|j| {
            let mut row = vec![Rational::zero(); width];
            row[j] = Rational::one();
            for (i, r) in rays.iter().enumerate() {
                row[rank + i] = -Rational::from_integer(r.entries()[j].clone());
            }
            row
        })
        .collect();
    let mut inequalities: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut row = vec![Rational::zero(); width];
            row[rank + i] = Rational::one();
            row
        })
        .collect();

    // Substitute λ variables out through the equalities.
    let mut eliminated = vec![false; k];
    let mut x_equalities: Vec<Vec<Rational>> = Vec::new();
    while let Some(eq_idx) = equalities
        .iter()
        .position(|row| (0..k).any(|i| !eliminated[i] && !row[rank + i].is_zero()))
    {
        let eq = equalities.swap_remove(eq_idx);
        let var = (0..k)
            .find(|&i| !eliminated[i] && !eq[rank + i].is_zero())
            .expect("position above found one");
        let col = rank + var;
        let pivot = eq[col].clone();
        let substitute = |row: &mut Vec<Rational>| {
            if row[col].is_zero() {
                return;
            }
            let f = &row[col] / &pivot;
            for j in 0..width {
                let v = &row[j] - &f * &eq[j];
                row[j] = v;
            }
        };
        equalities.iter_mut().for_each(&substitute);
        inequalities.iter_mut().for_each(&substitute);
        eliminated[var] = true;
    }
    for eq in equalities {
        if eq.iter().any(|v| !v.is_zero()) {
            x_equalities.push(eq);
        }
    }

    // Quadratic elimination for whatever λ remain.
    for var in 0..k {
        if eliminated[var] {
            continue;
        }
        let col = rank + var;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for row in inequalities.drain(..) {
            if row[col].is_positive() {
                pos.push(row);
            } else if row[col].is_negative() {
                neg.push(row);
            } else {
                zero.push(row);
            }
        }
        let mut next: BTreeSet<Vec<Rational>> = zero
            .into_iter()
            .filter_map(|r| normalize_row(&r))
            .collect();
        for p in &pos {
            for n in &neg {
                let combined: Vec<Rational> = (0..width)
                    .map(|j| &p[j] * -&n[col] + &n[j] * &p[col])
                    .collect();
                if let Some(c) = normalize_row(&combined) {
                    next.insert(c);
                }
            }
        }
        inequalities = next.into_iter().collect();
        if inequalities.len() > 48 {
            inequalities = prune_redundant_rows(inequalities);
        }
    }

    let mut normals: BTreeSet<LatticeVector> = BTreeSet::new();
    for row in inequalities {
        if let Some(n) = row_to_normal(rank, &row) {
            normals.insert(n);
        }
    }
    for row in x_equalities {
        if let Some(n) = row_to_normal(rank, &row) {
            normals.insert(n.neg().primitive().expect("nonzero normal"));
            normals.insert(n);
        }
    }
    let normals: Vec<LatticeVector> = normals.into_iter().collect();
    reduce_to_minimal_generators(normals)
}

/// Scales a row to its primitive integer direction; `None` for zero rows.
fn normalize_row(row: &[Rational]) -> Option<Vec<Rational>> {
    if row.iter().all(|v| v.is_zero()) {
        return None;
    }
    let mut lcm = BigInt::one();
    for v in row {
        lcm = lcm.lcm(v.denom());
    }
    let ints: Vec<BigInt> = row.iter().map(|v| (v * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, e| acc.gcd(e));
    Some(
        ints.into_iter()
            .map(|e| Rational::from_integer(e / &gcd))
            .collect(),
    )
}

fn row_to_normal(rank: usize, row: &[Rational]) -> Option<LatticeVector> {
    let x_part = &row[..rank];
    if x_part.iter().all(|v| v.is_zero()) {
        return None;
    }
    debug_assert!(
        row[rank..].iter().all(|v| v.is_zero()),
        "λ columns must be fully eliminated"
    );
    let normalized = normalize_row(x_part)?;
    Some(
        LatticeVector::new(normalized.iter().map(|v| v.to_integer()).collect())
            .primitive()
            .expect("nonzero row"),
    )
}

/// Drops rows that are nonnegative combinations of the others (valid for
/// homogeneous inequality systems by Farkas).
fn prune_redundant_rows(rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let as_vectors: Vec<LatticeVector> = rows
        .iter()
        .map(|r| {
            let normalized = normalize_row(r).expect("rows are nonzero");
            LatticeVector::new(normalized.iter().map(|v| v.to_integer()).collect())
        })
        .collect();
    let kept = reduce_to_minimal_generators(as_vectors);
    kept.into_iter()
        .map(|v| {
            v.entries()
                .iter()
                .map(|e| Rational::from_integer(e.clone()))
                .collect()
        })
        .collect()
}

/// Removes vectors that lie in the cone generated by the rest.
fn reduce_to_minimal_generators(mut vecs: Vec<LatticeVector>) -> Vec<LatticeVector> {
    loop {
        let redundant = (0..vecs.len()).find(|&i| {
            let others: Vec<&LatticeVector> = vecs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v)
                .collect();
            in_cone_of(&vecs[i], &others)
        });
        match redundant {
            Some(i) => {
                vecs.remove(i);
            }
            None => return vecs,
        }
    }
}

/// Canonical map for comparing collections of cones.
pub fn sorted_cones(mut cones: Vec<Cone>) -> Vec<Cone> {
    cones.sort();
    cones.dedup();
    cones
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(v)
    }

    fn cone2(rays: &[&[i64]]) -> Cone {
        let rank = rays[0].len();
        Cone::new(rank, rays.iter().map(|r| lv(r)).collect()).unwrap()
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = cone2(&[&[1, 0], &[0, 1]]);
        let d = c.dual_cone();
        assert_eq!(d, c);
        assert!(d.is_pointed());
    }

    #[test]
    fn dual_of_skew_cone() {
        let c = cone2(&[&[1, 0], &[1, 2]]);
        let d = c.dual_cone();
        assert_eq!(d, cone2(&[&[0, 1], &[2, -1]]));
        // Brute check: every dual generator pairs nonnegatively with every
        // primal generator, and involution returns the original.
        for n in d.rays() {
            for v in c.rays() {
                assert!(!n.dot(v).is_negative());
            }
        }
        assert_eq!(d.dual_cone(), c);
    }

    #[test]
    fn dual_of_single_ray_is_half_plane() {
        let c = Cone::new(2, vec![lv(&[1, 0])]).unwrap();
        let d = c.dual_cone();
        let expected: BTreeSet<LatticeVector> =
            [lv(&[1, 0]), lv(&[0, 1]), lv(&[0, -1])].into_iter().collect();
        let got: BTreeSet<LatticeVector> = d.rays().iter().cloned().collect();
        assert_eq!(got, expected);
        assert!(!d.is_pointed());
    }

    #[test]
    fn dual_of_zero_cone_is_everything() {
        let c = Cone::zero(2);
        let d = c.dual_cone();
        assert_eq!(d.rays().len(), 4);
        assert!(!d.is_pointed());
    }

    #[test]
    fn constructor_rejects_redundant_ray() {
        let err = Cone::new(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])]).unwrap_err();
        assert!(matches!(err, ConeError::RedundantRay(_)));
        // The lenient constructor drops it instead.
        let c = Cone::from_generators(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])]).unwrap();
        assert_eq!(c, cone2(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn constructor_rejects_lines() {
        let err = Cone::new(2, vec![lv(&[1, 0]), lv(&[-1, 0])]).unwrap_err();
        assert!(matches!(err, ConeError::NotPointed));
    }

    #[test]
    fn constructor_primitivizes() {
        let c = Cone::new(1, vec![lv(&[2])]).unwrap();
        assert_eq!(c.rays(), &[lv(&[1])]);
    }

    #[test]
    fn contains_examples() {
        let orthant = cone2(&[&[1, 0], &[0, 1]]);
        assert!(orthant.contains(&lv(&[2, 3])));
        assert!(!orthant.contains(&lv(&[-1, 0])));
        let skew = cone2(&[&[1, 0], &[1, 2]]);
        assert!(skew.contains(&lv(&[1, 1])));
        assert!(!skew.contains(&lv(&[0, 1])));
    }

    #[test]
    fn faces_of_orthant() {
        let orthant = cone2(&[&[1, 0], &[0, 1]]);
        let faces = orthant.faces();
        assert_eq!(faces.len(), 3);
        assert_eq!(faces[0], Cone::zero(2));
        assert_eq!(faces[1], Cone::new(2, vec![lv(&[0, 1])]).unwrap());
        assert_eq!(faces[2], Cone::new(2, vec![lv(&[1, 0])]).unwrap());
    }

    #[test]
    fn faces_of_single_ray() {
        let ray = Cone::new(2, vec![lv(&[1, 0])]).unwrap();
        assert_eq!(ray.faces(), vec![Cone::zero(2)]);
    }

    #[test]
    fn faces_of_three_dim_orthant() {
        let c = cone2(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let faces = c.faces();
        assert_eq!(faces.len(), 7);
        let by_rays = |n: usize| faces.iter().filter(|f| f.rays().len() == n).count();
        assert_eq!(by_rays(0), 1);
        assert_eq!(by_rays(1), 3);
        assert_eq!(by_rays(2), 3);
    }

    #[test]
    fn hilbert_basis_orthant() {
        let c = cone2(&[&[1, 0], &[0, 1]]);
        let hb = c.hilbert_basis().unwrap();
        assert_eq!(hb.elements, vec![lv(&[0, 1]), lv(&[1, 0])]);
    }

    #[test]
    fn hilbert_basis_skew_cones() {
        let c = cone2(&[&[1, 0], &[1, 2]]);
        let hb = c.hilbert_basis().unwrap();
        assert_eq!(hb.elements, vec![lv(&[1, 0]), lv(&[1, 1]), lv(&[1, 2])]);

        let c = cone2(&[&[1, 0], &[1, 3]]);
        let hb = c.hilbert_basis().unwrap();
        assert_eq!(
            hb.elements,
            vec![lv(&[1, 0]), lv(&[1, 1]), lv(&[1, 2]), lv(&[1, 3])]
        );
    }

    #[test]
    fn hilbert_basis_rejects_nonpointed() {
        let half_plane = Cone::from_generators(2, vec![lv(&[1, 0]), lv(&[-1, 0]), lv(&[0, 1])])
            .unwrap();
        assert!(!half_plane.is_pointed());
        assert!(matches!(
            half_plane.hilbert_basis(),
            Err(ConeError::NotPointed)
        ));
    }

    #[test]
    fn hilbert_basis_elements_are_irreducible() {
        for rays in [
            vec![lv(&[1, 0]), lv(&[1, 3])],
            vec![lv(&[2, -1]), lv(&[0, 1])],
            vec![lv(&[1, 0, 0]), lv(&[1, 2, 0]), lv(&[1, 1, 3])],
        ] {
            let c = Cone::new(rays[0].rank(), rays).unwrap();
            let hb = c.hilbert_basis().unwrap().elements;
            for v in &hb {
                assert!(c.contains(v));
                for u in &hb {
                    let diff = v.sub(u);
                    assert!(
                        diff.is_zero() || !c.contains(&diff) || diff == *v,
                        "{:?} = {:?} + rest inside {:?}",
                        v,
                        u,
                        c
                    );
                }
            }
        }
    }

    #[test]
    fn simplicial_and_smooth_predicates() {
        assert!(cone2(&[&[1, 0], &[0, 1]]).is_simplicial());
        assert!(cone2(&[&[1, 0], &[0, 1]]).is_smooth());
        assert!(cone2(&[&[1, 0], &[1, 2]]).is_simplicial());
        assert!(!cone2(&[&[1, 0], &[1, 2]]).is_smooth());
        assert!(!cone2(&[&[1, 1], &[1, -1]]).is_smooth());
        // Cone over a square: four extreme rays in rank three, minimal but
        // not linearly independent.
        let square = cone2(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        assert_eq!(square.rays().len(), 4);
        assert!(!square.is_simplicial());
        assert!(!square.is_smooth());
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(cone2(&[&[1, 0], &[0, 1]]).multiplicity().unwrap(), int(1));
        assert_eq!(cone2(&[&[1, 0], &[1, 2]]).multiplicity().unwrap(), int(2));
        assert_eq!(cone2(&[&[1, 0], &[1, 3]]).multiplicity().unwrap(), int(3));
        let square = cone2(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        assert!(matches!(
            square.multiplicity(),
            Err(ConeError::NotSimplicial)
        ));
    }

    #[test]
    fn smooth_iff_simplicial_with_multiplicity_one() {
        for rays in [
            vec![lv(&[1, 0]), lv(&[0, 1])],
            vec![lv(&[1, 0]), lv(&[1, 2])],
            vec![lv(&[2, 1]), lv(&[1, 1])],
            vec![lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[1, 1, 2])],
        ] {
            let c = Cone::new(rays[0].rank(), rays).unwrap();
            assert_eq!(
                c.is_smooth(),
                c.is_simplicial() && c.multiplicity().unwrap().is_one()
            );
        }
    }

    #[test]
    fn parallelepiped_point_counts_match_multiplicity() {
        let c = cone2(&[&[1, 0], &[1, 3]]);
        let pts = c.parallelepiped_points().unwrap();
        assert_eq!(pts.len(), 2);
        let points: BTreeSet<LatticeVector> = pts.iter().map(|(p, _)| p.clone()).collect();
        assert!(points.contains(&lv(&[1, 1])));
        assert!(points.contains(&lv(&[1, 2])));
        for (_, q) in &pts {
            for qi in q {
                assert!(!qi.is_negative() && *qi < Rational::one());
            }
        }
    }

    #[test]
    fn intersection_of_adjacent_cones_is_shared_ray() {
        let a = cone2(&[&[1, 0], &[1, 1]]);
        let b = cone2(&[&[1, 1], &[0, 1]]);
        let i = a.intersect(&b).unwrap();
        assert_eq!(i, Cone::new(2, vec![lv(&[1, 1])]).unwrap());
        assert!(i.is_face_of(&a));
        assert!(i.is_face_of(&b));
    }

    #[test]
    fn intersection_of_overlapping_cones_is_two_dimensional() {
        let a = cone2(&[&[1, 0], &[0, 1]]);
        let b = cone2(&[&[1, 1], &[-1, 1]]);
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.dim(), 2);
        assert!(!i.is_face_of(&a));
    }

    #[test]
    fn triangulate_square_cone() {
        let square = cone2(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let pieces = square.triangulate();
        assert_eq!(pieces.len(), 2);
        for p in &pieces {
            assert!(p.is_simplicial());
            assert_eq!(p.dim(), 3);
            for r in p.rays() {
                assert!(square.rays().contains(r));
            }
        }
    }

    #[test]
    fn dual_involution_on_pointed_full_cones() {
        for rays in [
            vec![lv(&[1, 0]), lv(&[0, 1])],
            vec![lv(&[1, 0]), lv(&[1, 2])],
            vec![lv(&[2, -1]), lv(&[0, 1])],
            vec![lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[1, 1, 2])],
            vec![lv(&[0, 0, 1]), lv(&[1, 0, 1]), lv(&[0, 1, 1]), lv(&[1, 1, 1])],
        ] {
            let c = Cone::new(rays[0].rank(), rays).unwrap();
            assert_eq!(c.dual_cone().dual_cone(), c);
            // Dual of a full-dimensional cone is pointed.
            assert!(c.dual_cone().is_pointed());
        }
    }
}
