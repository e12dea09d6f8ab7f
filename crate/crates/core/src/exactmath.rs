//! Exact integer and rational arithmetic with the lattice linear algebra
//! (Hermite and Smith normal forms, determinants, rational solving) that the
//! cone, fan, belyi and fibration engines consume.
//!
//! All values are arbitrary precision and immutable after construction; every
//! operation here is a pure function.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

pub use num_bigint::BigInt;
/// Exact rational number, always kept with positive denominator and coprime
/// parts (num-rational maintains that canonical form on construction).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid number literal `{0}`")]
    BadLiteral(String),
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses a decimal integer string (arbitrary length, optional sign).
pub fn parse_bigint(s: &str) -> Result<BigInt, ExactError> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| ExactError::BadLiteral(s.to_string()))
}

/// Parses `p` or `p/q` into a canonical rational (q > 0 after reduction).
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    match t.split_once('/') {
        None => Ok(Rational::from_integer(parse_bigint(t)?)),
        Some((p, q)) => {
            let num = parse_bigint(p)?;
            let den = parse_bigint(q)?;
            if den.is_zero() {
                return Err(ExactError::BadLiteral(s.to_string()));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Formats a rational as `p` when integral, else `p/q` with q > 0.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A point of a lattice (M or N): an exact integer vector whose rank is its
/// length.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector {
    entries: Vec<BigInt>,
}

impl LatticeVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        LatticeVector { entries }
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector {
            entries: vec![BigInt::zero(); rank],
        }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        LatticeVector {
            entries: entries.iter().map(|&n| BigInt::from(n)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn dot(&self, other: &Self) -> BigInt {
        debug_assert_eq!(self.rank(), other.rank());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank(), other.rank());
        LatticeVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank(), other.rank());
        LatticeVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector {
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        LatticeVector {
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// gcd of the entries (zero for the zero vector).
    pub fn content(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::zero(), |acc, e| acc.gcd(e))
    }

    /// The vector divided by the gcd of its entries; direction preserved.
    pub fn primitive(&self) -> Result<LatticeVector, ExactError> {
        let g = self.content();
        if g.is_zero() {
            return Err(ExactError::ZeroVector);
        }
        Ok(LatticeVector {
            entries: self.entries.iter().map(|e| e / &g).collect(),
        })
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Result of a Hermite normal form computation: `h = u * a` with `u`
/// unimodular.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub h: IntMatrix,
    pub u: IntMatrix,
}

/// Result of a Smith normal form computation: `s = u * a * v` with `u`, `v`
/// unimodular and the diagonal of `s` a divisibility chain.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries, in chain order.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        let n = self.s.rows.min(self.s.cols);
        (0..n)
            .map(|i| self.s.get(i, i).clone())
            .filter(|d| !d.is_zero())
            .collect()
    }
}

/// Dense row-major exact integer matrix. Empty matrices (0 rows or 0
/// columns) are legal and yield empty normal forms.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    /// Builds the matrix whose rows are the given vectors (all of rank `cols`).
    pub fn from_rows(cols: usize, rows: &[LatticeVector]) -> Result<Self, ExactError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.rank() != cols {
                return Err(ExactError::DimensionMismatch(format!(
                    "row of rank {} in a {}-column matrix",
                    r.rank(),
                    cols
                )));
            }
            entries.extend(r.entries().iter().cloned());
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&n| BigInt::from(n)));
        }
        IntMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> LatticeVector {
        LatticeVector::new(self.entries[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<LatticeVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vector(&self, v: &LatticeVector) -> Result<LatticeVector, ExactError> {
        if self.cols != v.rank() {
            return Err(ExactError::DimensionMismatch(format!(
                "{}x{} matrix times rank-{} vector",
                self.rows,
                self.cols,
                v.rank()
            )));
        }
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = BigInt::zero();
            for c in 0..self.cols {
                acc += self.get(r, c) * &v.entries()[c];
            }
            out.push(acc);
        }
        Ok(LatticeVector::new(out))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// row[target] += k * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(target, c) + k * self.get(source, c);
            self.set(target, c, v);
        }
    }

    /// col[target] += k * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, target) + k * self.get(r, source);
            self.set(r, target, v);
        }
    }

    /// Rank over the rationals, by fraction-free elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let pivot = (row..m.rows).find(|&r| !m.get(r, col).is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(row, p);
            for r in row + 1..m.rows {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let a = m.get(row, col).clone();
                let b = m.get(r, col).clone();
                for c in col..m.cols {
                    let v = m.get(r, c) * &a - m.get(row, c) * &b;
                    m.set(r, c, v);
                }
            }
            row += 1;
            rank += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    /// Row Hermite normal form: echelon, pivots positive, entries above each
    /// pivot reduced into `[0, pivot)`. Pivoting picks the smallest nonzero
    /// absolute value in the working column.
    pub fn hnf(&self) -> HnfResult {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut pivot_row = 0;
        for col in 0..h.cols {
            if pivot_row == h.rows {
                break;
            }
            // Euclidean loop in the working column.
            loop {
                let mut best: Option<(usize, BigInt)> = None;
                for r in pivot_row..h.rows {
                    let v = h.get(r, col);
                    if v.is_zero() {
                        continue;
                    }
                    let a = v.abs();
                    match &best {
                        Some((_, ba)) if *ba <= a => {}
                        _ => best = Some((r, a)),
                    }
                }
                let Some((r, _)) = best else { break };
                h.swap_rows(pivot_row, r);
                u.swap_rows(pivot_row, r);
                let mut done = true;
                let p = h.get(pivot_row, col).clone();
                for r in pivot_row + 1..h.rows {
                    let v = h.get(r, col).clone();
                    if v.is_zero() {
                        continue;
                    }
                    let q = -v.div_floor(&p);
                    h.add_row_multiple(r, pivot_row, &q);
                    u.add_row_multiple(r, pivot_row, &q);
                    if !h.get(r, col).is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h.get(pivot_row, col).is_zero() {
                continue;
            }
            if h.get(pivot_row, col).is_negative() {
                h.negate_row(pivot_row);
                u.negate_row(pivot_row);
            }
            // Reduce entries above the pivot into [0, pivot).
            let p = h.get(pivot_row, col).clone();
            for r in 0..pivot_row {
                let v = h.get(r, col).clone();
                let q = -v.div_floor(&p);
                h.add_row_multiple(r, pivot_row, &q);
                u.add_row_multiple(r, pivot_row, &q);
            }
            pivot_row += 1;
        }
        HnfResult { h, u }
    }

    /// Smith normal form: `s = u * a * v` diagonal with nonnegative entries
    /// forming a divisibility chain.
    pub fn snf(&self) -> SnfResult {
        let mut s = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = s.rows.min(s.cols);
        let mut t = 0;
        while t < n {
            // Move the smallest nonzero entry of the trailing block to (t, t).
            let mut best: Option<(usize, usize, BigInt)> = None;
            for r in t..s.rows {
                for c in t..s.cols {
                    let e = s.get(r, c);
                    if e.is_zero() {
                        continue;
                    }
                    let a = e.abs();
                    match &best {
                        Some((_, _, ba)) if *ba <= a => {}
                        _ => best = Some((r, c, a)),
                    }
                }
            }
            let Some((r, c, _)) = best else { break };
            s.swap_rows(t, r);
            u.swap_rows(t, r);
            s.swap_cols(t, c);
            v.swap_cols(t, c);

            // Clear row and column t; restart the pass whenever a remainder
            // smaller than the pivot appears.
            loop {
                let mut clean = true;
                let p = s.get(t, t).clone();
                for r in t + 1..s.rows {
                    let e = s.get(r, t).clone();
                    if e.is_zero() {
                        continue;
                    }
                    let q = -e.div_floor(&p);
                    s.add_row_multiple(r, t, &q);
                    u.add_row_multiple(r, t, &q);
                    if !s.get(r, t).is_zero() {
                        s.swap_rows(t, r);
                        u.swap_rows(t, r);
                        clean = false;
                        break;
                    }
                }
                if !clean {
                    continue;
                }
                let p = s.get(t, t).clone();
                for c in t + 1..s.cols {
                    let e = s.get(t, c).clone();
                    if e.is_zero() {
                        continue;
                    }
                    let q = -e.div_floor(&p);
                    s.add_col_multiple(c, t, &q);
                    v.add_col_multiple(c, t, &q);
                    if !s.get(t, c).is_zero() {
                        s.swap_cols(t, c);
                        v.swap_cols(t, c);
                        clean = false;
                        break;
                    }
                }
                if clean {
                    break;
                }
            }
            if s.get(t, t).is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
            // Divisibility: fold any non-multiple into the working position.
            let p = s.get(t, t).clone();
            if !p.is_zero() {
                let offender = (t + 1..s.rows)
                    .flat_map(|r| (t + 1..s.cols).map(move |c| (r, c)))
                    .find(|&(r, c)| !s.get(r, c).mod_floor(&p).is_zero());
                if let Some((r, _)) = offender {
                    s.add_row_multiple(t, r, &BigInt::one());
                    u.add_row_multiple(t, r, &BigInt::one());
                    continue;
                }
            }
            t += 1;
        }
        SnfResult { s, u, v }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, ExactError> {
        if self.rows != self.cols {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let swap = (k + 1..n).find(|&r| !m.get(r, k).is_zero());
                match swap {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        Ok(sign * m.get(n - 1, n - 1).clone())
    }

    /// Solves `A x = b` exactly over the rationals. Returns `Ok(None)` for an
    /// inconsistent system; free variables are set to zero.
    pub fn solve_rational(&self, b: &LatticeVector) -> Result<Option<Vec<Rational>>, ExactError> {
        if b.rank() != self.rows {
            return Err(ExactError::DimensionMismatch(format!(
                "rhs of rank {} for {} equations",
                b.rank(),
                self.rows
            )));
        }
        let rhs: Vec<Rational> = b
            .entries()
            .iter()
            .map(|e| Rational::from_integer(e.clone()))
            .collect();
        let lhs: Vec<Vec<Rational>> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| Rational::from_integer(self.get(r, c).clone()))
                    .collect()
            })
            .collect();
        Ok(solve_rational_system(lhs, rhs))
    }
}

/// A basis of the saturation of the row lattice: span(rows) ∩ Z^cols.
///
/// Computed from the Smith decomposition `s = u * m * v`: the first
/// rank-many rows of `v^{-1}` span exactly the lattice points of the row
/// span.
pub fn saturation_basis(m: &IntMatrix) -> Vec<LatticeVector> {
    let SnfResult { s, v, .. } = m.snf();
    let rank = (0..s.rows().min(s.cols()))
        .take_while(|&i| !s.get(i, i).is_zero())
        .count();
    let v_inv = invert_unimodular(&v);
    (0..rank).map(|i| v_inv.row(i)).collect()
}

/// Inverse of a unimodular matrix, exact and integral.
pub fn invert_unimodular(m: &IntMatrix) -> IntMatrix {
    let n = m.rows();
    debug_assert_eq!(n, m.cols());
    let mut out = IntMatrix::zero(n, n);
    for c in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[c] = BigInt::one();
        let col = m
            .solve_rational(&LatticeVector::new(e))
            .expect("square system")
            .expect("unimodular matrix is invertible");
        for (r, value) in col.into_iter().enumerate() {
            debug_assert!(value.denom().is_one(), "unimodular inverse is integral");
            out.set(r, c, value.numer().clone());
        }
    }
    out
}

/// Exact determinant of a dense rational matrix by Gaussian elimination.
pub fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pv = m[k][k].clone();
        det *= &pv;
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = &m[r][k] / &pv;
            for c in k..n {
                let v = &m[r][c] - &f * &m[k][c];
                m[r][c] = v;
            }
        }
    }
    det
}

/// Gaussian elimination over the rationals; `None` when inconsistent, free
/// variables pinned to zero.
pub fn solve_rational_system(
    mut a: Vec<Vec<Rational>>,
    mut b: Vec<Rational>,
) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].clone();
        for r in 0..rows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..cols {
                let v = &a[r][c] - &factor * &a[row][c];
                a[r][c] = v;
            }
            let v = &b[r] - &factor * &b[row];
            b[r] = v;
        }
        pivot_cols.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    // Inconsistent when a zero row has nonzero rhs.
    for r in row..rows {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, c) in pivot_cols {
        x[c] = &b[r] / &a[r][c];
    }
    Some(x)
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn is_unimodular(m: &IntMatrix) -> bool {
        m.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    fn assert_hnf_shape(h: &IntMatrix) {
        // Echelon with positive pivots and reduced entries above.
        let mut last_col: isize = -1;
        for r in 0..h.rows() {
            let pivot = (0..h.cols()).find(|&c| !h.get(r, c).is_zero());
            match pivot {
                None => {
                    for rr in r..h.rows() {
                        for c in 0..h.cols() {
                            assert!(h.get(rr, c).is_zero(), "nonzero below a zero row");
                        }
                    }
                    return;
                }
                Some(c) => {
                    assert!((c as isize) > last_col, "pivot columns must advance");
                    last_col = c as isize;
                    let p = h.get(r, c);
                    assert!(p.is_positive(), "pivot must be positive");
                    for rr in 0..r {
                        let v = h.get(rr, c);
                        assert!(
                            !v.is_negative() && v < p,
                            "entry above pivot not reduced: {} vs {}",
                            v,
                            p
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hnf_permutation_of_identity() {
        let a = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let HnfResult { h, u } = a.hnf();
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u.mul(&a).unwrap(), h);
        assert!(is_unimodular(&u));
    }

    #[test]
    fn hnf_identity_fixed() {
        let a = IntMatrix::identity(3);
        let HnfResult { h, u } = a.hnf();
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));
    }

    #[test]
    fn hnf_two_by_two() {
        // Row lattice of [[2,4],[1,3]] has canonical basis [[1,1],[0,2]]:
        // pivots 1 and 2, entry above the second pivot reduced mod 2.
        let a = IntMatrix::from_i64(&[&[2, 4], &[1, 3]]);
        let HnfResult { h, u } = a.hnf();
        assert_eq!(h, IntMatrix::from_i64(&[&[1, 1], &[0, 2]]));
        assert_eq!(u.mul(&a).unwrap(), h);
        assert!(is_unimodular(&u));
        assert_hnf_shape(&h);
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(3);
        let SnfResult { s, u, v } = a.snf();
        assert_eq!(s, IntMatrix::identity(3));
        assert!(is_unimodular(&u));
        assert!(is_unimodular(&v));
    }

    #[test]
    fn snf_examples() {
        let a = IntMatrix::from_i64(&[&[1, 0], &[1, 2]]);
        let r = a.snf();
        assert_eq!(r.s, IntMatrix::from_i64(&[&[1, 0], &[0, 2]]));
        assert_eq!(r.u.mul(&a).unwrap().mul(&r.v).unwrap(), r.s);

        let b = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let r = b.snf();
        assert_eq!(r.s, IntMatrix::from_i64(&[&[1, 0], &[0, 6]]));
        assert_eq!(r.u.mul(&b).unwrap().mul(&r.v).unwrap(), r.s);
    }

    #[test]
    fn det_examples() {
        assert_eq!(IntMatrix::identity(4).det().unwrap(), int(1));
        assert_eq!(
            IntMatrix::from_i64(&[&[1, 0], &[1, 2]]).det().unwrap(),
            int(2)
        );
        assert_eq!(
            IntMatrix::from_i64(&[&[0, 1], &[2, -1]]).det().unwrap(),
            int(-2)
        );
        assert!(IntMatrix::from_i64(&[&[1, 2, 3]]).det().is_err());
    }

    #[test]
    fn solve_examples() {
        let a = IntMatrix::identity(2);
        let x = a
            .solve_rational(&LatticeVector::from_i64(&[3, 4]))
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![rat_int(3), rat_int(4)]);

        let a = IntMatrix::from_i64(&[&[2]]);
        let x = a
            .solve_rational(&LatticeVector::from_i64(&[1]))
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![rat(1, 2)]);

        let a = IntMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        let x = a.solve_rational(&LatticeVector::from_i64(&[1, 3])).unwrap();
        assert!(x.is_none(), "inconsistent system must report no solution");

        let consistent = IntMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        let x = consistent
            .solve_rational(&LatticeVector::from_i64(&[1, 2]))
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(0)]);
    }

    #[test]
    fn empty_matrices_are_legal() {
        let a = IntMatrix::zero(0, 3);
        let HnfResult { h, u } = a.hnf();
        assert_eq!(h.rows(), 0);
        assert_eq!(u.rows(), 0);
        let r = a.snf();
        assert_eq!(r.s.rows(), 0);
        let b = IntMatrix::zero(3, 0);
        let r = b.snf();
        assert_eq!(r.s.cols(), 0);
        assert_eq!(IntMatrix::zero(0, 0).det().unwrap(), int(1));
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(
            LatticeVector::from_i64(&[1, 0]).primitive().unwrap(),
            LatticeVector::from_i64(&[1, 0])
        );
        assert_eq!(
            LatticeVector::from_i64(&[2, 2]).primitive().unwrap(),
            LatticeVector::from_i64(&[1, 1])
        );
        assert_eq!(
            LatticeVector::from_i64(&[-4, 6]).primitive().unwrap(),
            LatticeVector::from_i64(&[-2, 3])
        );
        assert!(LatticeVector::from_i64(&[0, 0]).primitive().is_err());
    }

    #[test]
    fn rational_literals_round_trip() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4/2").unwrap(), rat_int(-2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        // Canonical form: positive denominator, coprime parts.
        let r = parse_rational("6/-4").unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (int(-3), int(2)));
    }

    #[test]
    fn normal_forms_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD5);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let entries: Vec<BigInt> = (0..rows * cols)
                .map(|_| int(rng.gen_range(-20..=20)))
                .collect();
            let a = IntMatrix::from_entries(rows, cols, entries).unwrap();

            let HnfResult { h, u } = a.hnf();
            assert_eq!(u.mul(&a).unwrap(), h);
            assert!(is_unimodular(&u));
            assert_hnf_shape(&h);

            let SnfResult { s, u, v } = a.snf();
            assert_eq!(u.mul(&a).unwrap().mul(&v).unwrap(), s);
            assert!(is_unimodular(&u));
            assert!(is_unimodular(&v));
            let divisors = SnfResult {
                s: s.clone(),
                u: u.clone(),
                v: v.clone(),
            }
            .elementary_divisors();
            for w in divisors.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
            }
            for i in 0..rows.min(cols) {
                for j in 0..cols.min(rows) {
                    if i != j && i < s.rows() && j < s.cols() {
                        assert!(s.get(i, j).is_zero());
                    }
                }
            }
            if rows == cols {
                let prod: BigInt = divisors.iter().product();
                let d = a.det().unwrap();
                let expected = if divisors.len() < rows {
                    BigInt::zero()
                } else {
                    prod
                };
                assert_eq!(d.abs(), expected.abs(), "det vs elementary divisors");
            }
        }
    }
}
