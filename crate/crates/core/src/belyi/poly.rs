//! Dense univariate polynomials with exact rational coefficients: the
//! Euclidean toolkit (gcd, squarefree part), Sylvester resultants, and
//! Lagrange interpolation.

use crate::exactmath::{rational_det, Rational};
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("at least one argument must be nonzero")]
    BothZero,
    #[error("a nonconstant polynomial is required")]
    ConstantInput,
    #[error("no prime in the search range fits the factorization")]
    NoUsablePrime,
}

/// Coefficients lowest degree first, highest coefficient nonzero; the zero
/// polynomial stores no coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly {
            coeffs: vec![Rational::one()],
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `x - root`, the monic linear polynomial with the given root.
    pub fn linear_from_root(root: &Rational) -> Self {
        Self::from_coeffs(vec![-root.clone(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let d = divisor.coeffs.len();
        if self.coeffs.len() < d {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading_coefficient().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Rational::zero(); self.coeffs.len() - d + 1];
        for k in (0..quo.len()).rev() {
            let c = &rem[k + d - 1] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let v = &rem[k + j] - &c * b;
                rem[k + j] = v;
            }
            quo[k] = c;
        }
        (Self::from_coeffs(quo), Self::from_coeffs(rem))
    }

    pub fn monic(&self) -> Result<Self, PolyError> {
        let lead = self
            .leading_coefficient()
            .ok_or(PolyError::ZeroPolynomial)?;
        Ok(self.scale(&(Rational::one() / lead)))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rational::from_integer((i + 1).into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Monic gcd by the Euclidean algorithm over the rationals.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic `self / gcd(self, self')`.
    pub fn squarefree_part(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative())?;
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero(), "gcd divides");
        q.monic()
    }

    /// Resultant as the determinant of the Sylvester matrix with descending
    /// coefficient rows, `self` first.
    pub fn resultant(&self, other: &Self) -> Result<Rational, PolyError> {
        let m = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let n = other.degree().ok_or(PolyError::ZeroPolynomial)?;
        let size = m + n;
        if size == 0 {
            return Ok(Rational::one());
        }
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(size);
        for shift in 0..n {
            let mut row = vec![Rational::zero(); size];
            for k in 0..=m {
                row[shift + k] = self.coeff(m - k);
            }
            rows.push(row);
        }
        for shift in 0..m {
            let mut row = vec![Rational::zero(); size];
            for k in 0..=n {
                row[shift + k] = other.coeff(n - k);
            }
            rows.push(row);
        }
        Ok(rational_det(rows))
    }

    /// The unique polynomial of degree < points.len() through the points.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Self {
        let mut out = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut term = Self::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let denom = xi - xj;
                let factor = Self::from_coeffs(vec![-xj / &denom, Rational::one() / &denom]);
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*x", c)?,
                _ => write!(f, "{}*x^{}", c, i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_int};

    #[test]
    fn division_round_trips() {
        let f = RatPoly::from_i64(&[-1, 0, 0, 2]); // 2x^3 - 1
        let g = RatPoly::from_i64(&[1, 3]); // 3x + 1
        let (q, r) = f.div_rem(&g);
        assert_eq!(q.mul(&g).add(&r), f);
        assert!(r.degree() < g.degree());
    }

    #[test]
    fn gcd_examples() {
        // gcd(x^2 - 1, x - 1) = x - 1.
        let f = RatPoly::from_i64(&[-1, 0, 1]);
        let g = RatPoly::from_i64(&[-1, 1]);
        assert_eq!(f.gcd(&g).unwrap(), g);
        // x^2 - 2 and x^2 - 3 are coprime.
        let f = RatPoly::from_i64(&[-2, 0, 1]);
        let g = RatPoly::from_i64(&[-3, 0, 1]);
        assert_eq!(f.gcd(&g).unwrap(), RatPoly::one());
        // gcd(f, f) is the monic normalization.
        let f = RatPoly::from_i64(&[2, 0, 4]);
        assert_eq!(f.gcd(&f).unwrap(), RatPoly::from_coeffs(vec![
            rat(1, 2),
            rat_int(0),
            rat_int(1),
        ]));
        assert!(RatPoly::zero().gcd(&RatPoly::zero()).is_err());
    }

    #[test]
    fn squarefree_part_examples() {
        // x^2 -> x.
        let f = RatPoly::from_i64(&[0, 0, 1]);
        assert_eq!(f.squarefree_part().unwrap(), RatPoly::from_i64(&[0, 1]));
        // (x-1)^2 (x+2) -> (x-1)(x+2).
        let f = RatPoly::from_i64(&[-1, 1]);
        let g = RatPoly::from_i64(&[2, 1]);
        let p = f.mul(&f).mul(&g);
        assert_eq!(p.squarefree_part().unwrap(), f.mul(&g));
        // Already squarefree stays put (made monic).
        let f = RatPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(f.squarefree_part().unwrap(), f);
    }

    #[test]
    fn resultant_examples() {
        // Sylvester determinant convention: res(x-1, x-2) = -1.
        let f = RatPoly::from_i64(&[-1, 1]);
        let g = RatPoly::from_i64(&[-2, 1]);
        assert_eq!(f.resultant(&g).unwrap(), rat_int(-1));
        // Common root means zero resultant.
        let x = RatPoly::from_i64(&[0, 1]);
        assert_eq!(x.resultant(&x).unwrap(), rat_int(0));
        let f = RatPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(f.resultant(&f).unwrap(), rat_int(0));
        assert!(f.resultant(&RatPoly::zero()).is_err());
    }

    #[test]
    fn resultant_is_product_of_root_differences() {
        // f = (x-1)(x-3), g = (x-2)(x-5): res = prod (alpha - beta).
        let f = RatPoly::from_i64(&[3, -4, 1]);
        let g = RatPoly::from_i64(&[10, -7, 1]);
        let expected = rat_int((1 - 2) * (1 - 5) * (3 - 2) * (3 - 5));
        assert_eq!(f.resultant(&g).unwrap(), expected);
    }

    #[test]
    fn interpolation_reconstructs() {
        let f = RatPoly::from_i64(&[1, -2, 0, 3]);
        let points: Vec<(Rational, Rational)> = (0..4)
            .map(|i| {
                let x = rat_int(i);
                let y = f.eval(&x);
                (x, y)
            })
            .collect();
        assert_eq!(RatPoly::interpolate(&points), f);
    }

    #[test]
    fn eval_uses_horner_exactly() {
        let f = RatPoly::from_coeffs(vec![rat(1, 2), rat_int(0), rat(-3, 4)]);
        assert_eq!(f.eval(&rat_int(2)), rat(1, 2) + rat_int(4) * rat(-3, 4));
    }
}
