//! Complete factorization over the rationals: Yun's squarefree
//! decomposition, then Berlekamp factorization modulo a good small prime,
//! Hensel lifting to a Landau–Mignotte-sized modulus, and subset
//! recombination. Everything is exact; the unit times the product of monic
//! irreducible powers reproduces the input on the nose.

use super::poly::{PolyError, RatPoly};
use crate::exactmath::{BigInt, Rational};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::OnceLock;

/// `unit * prod factor_i ^ multiplicity_i` equals the factored polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(RatPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> RatPoly {
        let mut out = RatPoly::constant(self.unit.clone());
        for (f, e) in &self.factors {
            for _ in 0..*e {
                out = out.mul(f);
            }
        }
        out
    }
}

/// Factors a nonzero polynomial into monic irreducibles over Q.
pub fn factorize(f: &RatPoly) -> Result<Factorization, PolyError> {
    let lead = f
        .leading_coefficient()
        .cloned()
        .ok_or(PolyError::ZeroPolynomial)?;
    let monic = f.monic()?;
    let mut factors: Vec<(RatPoly, usize)> = Vec::new();
    for (part, multiplicity) in yun_squarefree(&monic) {
        for irreducible in factor_squarefree(&part)? {
            factors.push((irreducible, multiplicity));
        }
    }
    factors.sort_by(|a, b| {
        (a.0.degree(), a.0.coeffs(), a.1).cmp(&(b.0.degree(), b.0.coeffs(), b.1))
    });
    Ok(Factorization {
        unit: lead,
        factors,
    })
}

/// Yun's algorithm: `f = prod out_i ^ i` with each part squarefree monic.
fn yun_squarefree(f: &RatPoly) -> Vec<(RatPoly, usize)> {
    if f.is_constant() {
        return Vec::new();
    }
    let df = f.derivative();
    let u = f.gcd(&df).expect("f is nonzero");
    let mut v = f.div_rem(&u).0;
    let mut w = df.div_rem(&u).0;
    let mut out = Vec::new();
    let mut i = 1;
    while !v.is_constant() {
        let z = w.sub(&v.derivative());
        if z.is_zero() {
            out.push((v.monic().expect("nonconstant"), i));
            break;
        }
        let g = v.gcd(&z).expect("v is nonzero");
        if !g.is_constant() {
            out.push((g.clone(), i));
        }
        v = v.div_rem(&g).0;
        w = z.div_rem(&g).0;
        i += 1;
    }
    out
}

/// Irreducible monic factors of a squarefree monic rational polynomial.
fn factor_squarefree(f: &RatPoly) -> Result<Vec<RatPoly>, PolyError> {
    let n = match f.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(1) => return Ok(vec![f.clone()]),
        Some(n) => n,
    };
    // Clear denominators, then substitute x -> y / lc to reach a monic
    // integer polynomial; factors transform back through the same
    // substitution.
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * &lcm).to_integer()).collect();
    let c = ints[n].clone();
    debug_assert!(c.is_positive());
    let hat: Vec<BigInt> = (0..=n)
        .map(|i| &ints[i] * c.pow((n - 1 - i.min(n - 1)) as u32))
        .collect();
    // hat is monic: hat[n] = c * c^{n-1-(n-1)} ... adjust the top term.
    let mut hat = hat;
    hat[n] = BigInt::one();

    let mut out = Vec::new();
    for g in factor_monic_squarefree_z(&hat)? {
        // g(y) with y = c x, then normalized monic.
        let deg = g.len() - 1;
        let coeffs: Vec<Rational> = g
            .iter()
            .enumerate()
            .map(|(i, a)| {
                Rational::new(a * c.pow(i as u32), c.pow(deg as u32))
            })
            .collect();
        out.push(RatPoly::from_coeffs(coeffs).monic()?);
    }
    out.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));
    debug_assert_eq!(
        out.iter().fold(RatPoly::one(), |acc, g| acc.mul(g)),
        f.clone(),
        "factors multiply back to the squarefree part"
    );
    Ok(out)
}

type ZPoly = Vec<BigInt>;

fn z_trim(mut p: ZPoly) -> ZPoly {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn z_mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(out)
}

fn z_sub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let coeff = |p: &[BigInt], i: usize| p.get(i).cloned().unwrap_or_else(BigInt::zero);
    z_trim((0..n).map(|i| coeff(a, i) - coeff(b, i)).collect())
}

/// Coefficient-wise symmetric reduction into `(-m/2, m/2]`.
fn z_mod_sym(p: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2;
    z_trim(
        p.iter()
            .map(|c| {
                let mut r = c.mod_floor(m);
                if r > half {
                    r -= m;
                }
                r
            })
            .collect(),
    )
}

/// Division by a monic divisor with remainder, all over Z.
fn z_divrem_monic(a: &[BigInt], d: &[BigInt]) -> (ZPoly, ZPoly) {
    debug_assert!(d.last().map(|c| c.is_one()).unwrap_or(false), "monic divisor");
    if a.len() < d.len() {
        return (Vec::new(), a.to_vec());
    }
    let mut rem = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len() - d.len() + 1];
    for k in (0..quo.len()).rev() {
        let c = rem[k + d.len() - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, b) in d.iter().enumerate() {
            let v = &rem[k + j] - &c * b;
            rem[k + j] = v;
        }
        quo[k] = c;
    }
    (z_trim(quo), z_trim(rem))
}

/// Exact division test over Z for a monic candidate divisor.
fn z_divides(f: &[BigInt], g: &[BigInt]) -> Option<ZPoly> {
    let (q, r) = z_divrem_monic(f, g);
    r.is_empty().then_some(q)
}

fn primes_to(limit: usize) -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(move || {
        let mut sieve = vec![true; limit];
        let mut out = Vec::new();
        for n in 2..limit {
            if sieve[n] {
                out.push(n as u64);
                let mut k = n * n;
                while k < limit {
                    sieve[k] = false;
                    k += n;
                }
            }
        }
        out
    })
}

/// Irreducible monic integer factors of a monic squarefree integer
/// polynomial of degree >= 2.
fn factor_monic_squarefree_z(f: &ZPoly) -> Result<Vec<ZPoly>, PolyError> {
    let n = f.len() - 1;
    debug_assert!(f[n].is_one());

    // A prime where f stays squarefree.
    let mut chosen = None;
    for &p in primes_to(10_000) {
        let fp = p_reduce(f, p);
        if fp.len() != n + 1 {
            continue;
        }
        let dfp = p_derivative(&fp, p);
        if dfp.is_empty() {
            continue;
        }
        if p_gcd(&fp, &dfp, p).len() == 1 {
            chosen = Some(p);
            break;
        }
    }
    let p = chosen.ok_or(PolyError::NoUsablePrime)?;

    let modular = berlekamp(&p_reduce(f, p), p);
    if modular.len() == 1 {
        return Ok(vec![f.clone()]);
    }

    // Landau–Mignotte: coefficients of monic divisors are bounded by
    // 2^n * ||f||_2; lift past twice that.
    let norm2: BigInt = f.iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound: BigInt = (BigInt::one() << n) * norm2 * 2 + 1;
    let mut modulus = BigInt::from(p);
    let mut doublings = 0;
    while modulus < bound {
        modulus = &modulus * &modulus;
        doublings += 1;
    }
    let lifted = hensel_tree(f, &modular, p, doublings);
    let modulus = modulus;

    // Subset recombination by increasing cardinality.
    let mut remaining: Vec<ZPoly> = lifted;
    let mut current = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= remaining.len() {
        let indices: Vec<usize> = (0..remaining.len()).collect();
        for subset in combinations(&indices, size) {
            let mut candidate: ZPoly = vec![BigInt::one()];
            for &i in &subset {
                candidate = z_mod_sym(&z_mul(&candidate, &remaining[i]), &modulus);
            }
            if let Some(quotient) = z_divides(&current, &candidate) {
                out.push(candidate);
                current = quotient;
                let drop: std::collections::BTreeSet<usize> = subset.into_iter().collect();
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !drop.contains(i))
                    .map(|(_, g)| g)
                    .collect();
                continue 'outer;
            }
        }
        size += 1;
    }
    if current.len() > 1 {
        out.push(current);
    }
    Ok(out)
}

fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(size);
    fn rec(items: &[usize], size: usize, start: usize, buf: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if buf.len() == size {
            out.push(buf.clone());
            return;
        }
        for i in start..items.len() {
            buf.push(items[i]);
            rec(items, size, i + 1, buf, out);
            buf.pop();
        }
    }
    rec(items, size, 0, &mut buf, &mut out);
    out
}

// ---- arithmetic modulo a small prime (coefficients in u64) ----

type PPoly = Vec<u64>;

fn p_trim(mut v: PPoly) -> PPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn p_reduce(f: &[BigInt], p: u64) -> PPoly {
    let m = BigInt::from(p);
    p_trim(
        f.iter()
            .map(|c| {
                let r = c.mod_floor(&m);
                u64::try_from(r).expect("residue fits")
            })
            .collect(),
    )
}

fn p_derivative(f: &[u64], p: u64) -> PPoly {
    if f.len() <= 1 {
        return Vec::new();
    }
    p_trim(
        f[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * ((i as u64 + 1) % p) % p)
            .collect(),
    )
}

fn p_inv(a: u64, p: u64) -> u64 {
    // Extended Euclid over i128.
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of a unit");
    t.rem_euclid(p as i128) as u64
}

fn p_scale(f: &[u64], c: u64, p: u64) -> PPoly {
    p_trim(f.iter().map(|&a| a * c % p).collect())
}

fn p_monic(f: &[u64], p: u64) -> PPoly {
    match f.last() {
        None => Vec::new(),
        Some(&lead) => p_scale(f, p_inv(lead, p), p),
    }
}

fn p_sub(a: &[u64], b: &[u64], p: u64) -> PPoly {
    let n = a.len().max(b.len());
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    p_trim((0..n).map(|i| (at(a, i) + p - at(b, i)) % p).collect())
}

fn p_mul(a: &[u64], b: &[u64], p: u64) -> PPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    p_trim(out)
}

fn p_divrem(a: &[u64], d: &[u64], p: u64) -> (PPoly, PPoly) {
    assert!(!d.is_empty());
    if a.len() < d.len() {
        return (Vec::new(), a.to_vec());
    }
    let inv = p_inv(*d.last().expect("nonzero divisor"), p);
    let mut rem = a.to_vec();
    let mut quo = vec![0u64; a.len() - d.len() + 1];
    for k in (0..quo.len()).rev() {
        let c = rem[k + d.len() - 1] * inv % p;
        if c == 0 {
            continue;
        }
        for (j, &b) in d.iter().enumerate() {
            rem[k + j] = (rem[k + j] + p - c * b % p) % p;
        }
        quo[k] = c;
    }
    (p_trim(quo), p_trim(rem))
}

fn p_gcd(a: &[u64], b: &[u64], p: u64) -> PPoly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let (_, r) = p_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    p_monic(&a, p)
}

/// Extended Euclid mod p: returns (s, t) with s*a + t*b = 1.
fn p_bezout(a: &[u64], b: &[u64], p: u64) -> (PPoly, PPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1): (PPoly, PPoly) = (vec![1], Vec::new());
    let (mut t0, mut t1): (PPoly, PPoly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = p_divrem(&r0, &r1, p);
        let s = p_sub(&s0, &p_mul(&q, &s1, p), p);
        let t = p_sub(&t0, &p_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    debug_assert_eq!(r0.len(), 1, "coprime inputs");
    let inv = p_inv(r0[0], p);
    (p_scale(&s0, inv, p), p_scale(&t0, inv, p))
}

fn p_powmod_x(f: &[u64], p: u64) -> PPoly {
    // x^p mod f by square and multiply.
    let mut result: PPoly = vec![1];
    let mut base: PPoly = vec![0, 1];
    base = p_divrem(&base, f, p).1;
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = p_divrem(&p_mul(&result, &base, p), f, p).1;
        }
        base = p_divrem(&p_mul(&base, &base, p), f, p).1;
        e >>= 1;
    }
    result
}

/// Monic irreducible factors of a monic squarefree polynomial mod p.
fn berlekamp(f: &PPoly, p: u64) -> Vec<PPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    // Petr–Berlekamp matrix: rows are x^{p*j} mod f.
    let xp = p_powmod_x(f, p);
    let mut rows: Vec<PPoly> = Vec::with_capacity(n);
    let mut acc: PPoly = vec![1];
    for _ in 0..n {
        rows.push(acc.clone());
        acc = p_divrem(&p_mul(&acc, &xp, p), f, p).1;
    }
    // Nullspace of (Q - I)^T over F_p; vectors are coefficient columns.
    let mut m = vec![vec![0u64; n]; n];
    for (j, row) in rows.iter().enumerate() {
        for i in 0..n {
            m[i][j] = *row.get(i).unwrap_or(&0);
        }
        m[j][j] = (m[j][j] + p - 1) % p;
    }
    let basis = p_nullspace(m, p);
    let count = basis.len();
    let mut factors: Vec<PPoly> = vec![f.clone()];
    for v in &basis {
        if factors.len() == count {
            break;
        }
        let vp = p_trim(v.clone());
        if vp.len() <= 1 {
            continue; // constant vector splits nothing
        }
        let mut next = Vec::new();
        for u in factors {
            if u.len() - 1 <= 1 {
                next.push(u);
                continue;
            }
            let mut parts = Vec::new();
            let mut rest = u.clone();
            for s in 0..p {
                if rest.len() <= 1 {
                    break;
                }
                let shifted = p_sub(&vp, &[s], p);
                let g = p_gcd(&rest, &shifted, p);
                if g.len() > 1 && g.len() < rest.len() {
                    let (q, r) = p_divrem(&rest, &g, p);
                    debug_assert!(r.is_empty());
                    parts.push(g);
                    rest = p_monic(&q, p);
                }
            }
            if rest.len() > 1 {
                parts.push(rest);
            }
            next.extend(parts);
        }
        factors = next;
    }
    factors.sort();
    factors
}

fn p_nullspace(mut m: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, r);
        let inv = p_inv(m[row][col], p);
        for c in 0..n {
            m[row][c] = m[row][c] * inv % p;
        }
        for r2 in 0..n {
            if r2 != row && m[r2][col] != 0 {
                let f = m[r2][col];
                for c in 0..n {
                    m[r2][c] = (m[r2][c] + p - f * m[row][c] % p) % p;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for col in 0..n {
            if let Some(r) = pivot_of_col[col] {
                v[col] = (p - m[r][free]) % p;
            }
        }
        basis.push(v);
    }
    basis
}

// ---- Hensel lifting ----

/// Lifts the modular factorization of a monic `f` to the modulus
/// `p^(2^doublings)`, returning factors with symmetric coefficients.
fn hensel_tree(f: &ZPoly, modular: &[PPoly], p: u64, doublings: u32) -> Vec<ZPoly> {
    if modular.len() == 1 {
        let mut modulus = BigInt::from(p);
        for _ in 0..doublings {
            modulus = &modulus * &modulus;
        }
        return vec![z_mod_sym(f, &modulus)];
    }
    let mid = modular.len() / 2;
    let (left, right) = modular.split_at(mid);
    let g0 = left
        .iter()
        .fold(vec![1u64], |acc, m| p_mul(&acc, m, p));
    let h0 = right
        .iter()
        .fold(vec![1u64], |acc, m| p_mul(&acc, m, p));
    let (s0, t0) = p_bezout(&g0, &h0, p);

    let to_z = |v: &PPoly| -> ZPoly { v.iter().map(|&c| BigInt::from(c)).collect() };
    let mut g = z_mod_sym(&to_z(&g0), &BigInt::from(p));
    let mut h = z_mod_sym(&to_z(&h0), &BigInt::from(p));
    let mut s = z_mod_sym(&to_z(&s0), &BigInt::from(p));
    let mut t = z_mod_sym(&to_z(&t0), &BigInt::from(p));
    let mut modulus = BigInt::from(p);
    for _ in 0..doublings {
        let m2 = &modulus * &modulus;
        // e = f - g h, then g += t e + q g, h += r where s e = q h + r.
        let e = z_mod_sym(&z_sub(f, &z_mul(&g, &h)), &m2);
        let (q, r) = z_divrem_monic(&z_mul(&s, &e), &h);
        let g_new = z_mod_sym(
            &z_trim({
                let mut v = z_mul(&t, &e);
                let qg = z_mul(&q, &g);
                let n = v.len().max(qg.len()).max(g.len());
                let at = |p: &ZPoly, i: usize| p.get(i).cloned().unwrap_or_else(BigInt::zero);
                v = (0..n).map(|i| at(&v, i) + at(&qg, i) + at(&g, i)).collect();
                v
            }),
            &m2,
        );
        let h_new = z_mod_sym(
            &z_trim({
                let n = h.len().max(r.len());
                let at = |p: &ZPoly, i: usize| p.get(i).cloned().unwrap_or_else(BigInt::zero);
                (0..n).map(|i| at(&h, i) + at(&r, i)).collect()
            }),
            &m2,
        );
        debug_assert!(z_mod_sym(&z_sub(f, &z_mul(&g_new, &h_new)), &m2).is_empty());
        // Refresh the Bezout pair modulo m2.
        let b = z_mod_sym(
            &z_sub(
                &{
                    let sg = z_mul(&s, &g_new);
                    let th = z_mul(&t, &h_new);
                    let n = sg.len().max(th.len());
                    let at = |p: &ZPoly, i: usize| p.get(i).cloned().unwrap_or_else(BigInt::zero);
                    z_trim((0..n).map(|i| at(&sg, i) + at(&th, i)).collect())
                },
                &[BigInt::one()],
            ),
            &m2,
        );
        let (c, d) = z_divrem_monic(&z_mul(&s, &b), &h_new);
        let s_new = z_mod_sym(&z_sub(&s, &d), &m2);
        let t_new = z_mod_sym(
            &z_sub(&z_sub(&t, &z_mul(&t, &b)), &z_mul(&c, &g_new)),
            &m2,
        );
        g = g_new;
        h = h_new;
        s = s_new;
        t = t_new;
        modulus = m2;
    }

    let mut out = hensel_tree(&g, left, p, doublings);
    out.extend(hensel_tree(&h, right, p, doublings));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(coeffs: &[i64]) -> RatPoly {
        RatPoly::from_i64(coeffs)
    }

    #[test]
    fn factor_difference_of_squares() {
        let f = factorize(&poly(&[-1, 0, 1])).unwrap();
        assert_eq!(f.unit, rat_int(1));
        assert_eq!(
            f.factors,
            vec![(poly(&[-1, 1]), 1), (poly(&[1, 1]), 1)]
        );
    }

    #[test]
    fn irreducible_quadratic_stays_whole() {
        let f = factorize(&poly(&[-2, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(poly(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn factor_x4_minus_1() {
        let f = factorize(&poly(&[-1, 0, 0, 0, 1])).unwrap();
        assert_eq!(
            f.factors,
            vec![
                (poly(&[-1, 1]), 1),
                (poly(&[1, 1]), 1),
                (poly(&[1, 0, 1]), 1)
            ]
        );
    }

    #[test]
    fn multiplicities_via_yun() {
        // (x-1)^2 (x+2)
        let f = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[2, 1]));
        let fac = factorize(&f).unwrap();
        assert_eq!(
            fac.factors,
            vec![(poly(&[-1, 1]), 2), (poly(&[2, 1]), 1)]
        );
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn rational_coefficients_and_unit() {
        // 3/2 (x - 1/2)(x + 1/2) = 3/2 x^2 - 3/8.
        let f = RatPoly::from_coeffs(vec![rat(-3, 8), rat_int(0), rat(3, 2)]);
        let fac = factorize(&f).unwrap();
        assert_eq!(fac.unit, rat(3, 2));
        assert_eq!(
            fac.factors,
            vec![
                (RatPoly::from_coeffs(vec![rat(-1, 2), rat_int(1)]), 1),
                (RatPoly::from_coeffs(vec![rat(1, 2), rat_int(1)]), 1)
            ]
        );
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn cyclotomic_six() {
        let f = factorize(&poly(&[-1, 0, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(
            f.factors,
            vec![
                (poly(&[-1, 1]), 1),
                (poly(&[1, 1]), 1),
                (poly(&[1, -1, 1]), 1),
                (poly(&[1, 1, 1]), 1)
            ]
        );
    }

    #[test]
    fn cubic_product_splits() {
        let a = poly(&[1, 1, 0, 1]); // x^3 + x + 1
        let b = poly(&[7, -1, 0, 1]); // x^3 - x + 7
        let c = poly(&[-2, 1]);
        let f = a.mul(&b).mul(&c);
        let fac = factorize(&f).unwrap();
        assert_eq!(fac.factors.len(), 3);
        assert_eq!(fac.expand(), f);
    }

    #[test]
    fn random_products_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xFAC);
        for _ in 0..40 {
            let deg = rng.gen_range(1..=6);
            let mut coeffs: Vec<i64> = (0..deg).map(|_| rng.gen_range(-9..=9)).collect();
            coeffs.push(1);
            let f = poly(&coeffs);
            let fac = factorize(&f).unwrap();
            assert_eq!(fac.expand(), f, "failed on {:?}", f);
            // Factors are pairwise coprime and nonconstant.
            for (i, (a, _)) in fac.factors.iter().enumerate() {
                assert!(!a.is_constant());
                for (b, _) in fac.factors.iter().skip(i + 1) {
                    assert_eq!(a.gcd(b).unwrap(), RatPoly::one());
                }
            }
            // Degree <= 3 factors that are irreducible have no rational root
            // unless linear.
            for (a, _) in &fac.factors {
                if a.degree() == Some(2) || a.degree() == Some(3) {
                    assert!(rational_roots(a).is_empty(), "reducible factor {:?}", a);
                }
            }
        }
    }

    /// Rational roots of a monic rational polynomial by divisor search on
    /// the integerized constant and leading terms.
    fn rational_roots(f: &RatPoly) -> Vec<Rational> {
        use num_integer::Integer;
        let mut lcm = BigInt::one();
        for c in f.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * &lcm).to_integer()).collect();
        let a0 = ints[0].clone();
        let an = ints.last().unwrap().clone();
        if a0.is_zero() {
            return vec![Rational::zero()];
        }
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n = n.abs();
            let mut out = Vec::new();
            let mut d = BigInt::one();
            while &d * &d <= n {
                if (&n % &d).is_zero() {
                    out.push(d.clone());
                    out.push(&n / &d);
                }
                d += 1;
            }
            out
        };
        let mut roots = Vec::new();
        for p in divisors(&a0) {
            for q in divisors(&an) {
                for sign in [1i64, -1] {
                    let cand = Rational::new(&p * BigInt::from(sign), q.clone());
                    if f.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots
    }
}
