//! Dense univariate polynomials over a finite field.
//!
//! `APoly` models A = F_q[θ]; the same type serves as F_{q'}[x] wherever a
//! univariate polynomial over a finite field is needed (characteristic
//! polynomials in the Meataxe, minimal polynomials, ...).

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::field::{Fq, FqElem};
use crate::ring::{FieldLike, Ring};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct APoly {
    field: Fq,
    /// coeffs[i] is the coefficient of θ^i; no trailing zeros.
    coeffs: Vec<FqElem>,
}

impl APoly {
    pub fn new(field: Fq, mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        APoly { field, coeffs }
    }
    pub fn zero(field: Fq) -> Self {
        APoly { field, coeffs: vec![] }
    }
    pub fn one(field: Fq) -> Self {
        Self::constant(field.one())
    }
    pub fn constant(c: FqElem) -> Self {
        Self::new(c.field(), vec![c])
    }
    /// The generator θ.
    pub fn theta(field: Fq) -> Self {
        Self::monomial(field.one(), 1)
    }
    pub fn monomial(c: FqElem, k: usize) -> Self {
        let mut v = vec![c.field().zero(); k + 1];
        v[k] = c;
        Self::new(c.field(), v)
    }
    /// Coefficients given as integer codes, low degree first.
    pub fn from_codes(field: Fq, codes: &[u32]) -> Self {
        Self::new(field, codes.iter().map(|&c| field.elem(c)).collect())
    }
    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(self.field.zero())
    }
    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn lead(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(self.field.zero())
    }
    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.lead().inv().unwrap())
    }
    pub fn scale(&self, c: FqElem) -> Self {
        Self::new(self.field, self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(self.field, (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(self.field, (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
    pub fn neg(&self) -> Self {
        Self::new(self.field, self.coeffs.iter().map(|&a| -a).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        let mut r = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                r[i + j] = r[i + j] + a * b;
            }
        }
        Self::new(self.field, r)
    }
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
    /// Shift by θ^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.field.zero(); k];
        v.extend_from_slice(&self.coeffs);
        Self::new(self.field, v)
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        let inv = d.lead().inv().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(self.field), self.clone());
        }
        let mut qv = vec![self.field.zero(); r.len() - dd];
        for k in (0..qv.len()).rev() {
            let c = r[k + dd] * inv;
            qv[k] = c;
            if c.is_zero() {
                continue;
            }
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i] - c * di;
            }
        }
        r.truncate(dd);
        (Self::new(self.field, qv), Self::new(self.field, r))
    }
    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }
    pub fn divides(&self, a: &Self) -> bool {
        a.rem(self).is_zero()
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `g = s·self + t·o` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(f), Self::zero(f));
        let (mut t0, mut t1) = (Self::zero(f), Self::one(f));
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&qt.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&qt.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = r0.lead().inv().unwrap();
        (r0.scale(c), s0.scale(c), t0.scale(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.field,
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * self.field.from_int(i as i64)).collect(),
        )
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        self.coeffs.iter().rev().fold(x.field().zero(), |acc, &c| acc * x + c)
    }

    /// Evaluation `a(x) = a_0 + a_1 x + ...` in any ring receiving F_q
    /// through `embed`. Matrices are valid targets.
    pub fn eval_in<R: Ring>(&self, x: &R, embed: impl Fn(FqElem) -> R) -> R {
        let mut acc = x.zero_like();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(&embed(c));
        }
        acc
    }

    /// Composition `self(g)`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero(self.field);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Self::constant(c));
        }
        acc
    }

    /// `self^e mod m` for an exponent up to 2^128.
    pub fn powmod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        acc
    }

    /// Irreducibility over F_q via Rabin's test.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let q = self.field.q() as u128;
        let x = Self::theta(self.field);
        // x^{q^k} mod f, iteratively.
        let frob = |g: &Self| g.powmod(q, &f);
        let mut prime_divs = vec![];
        let mut m = n;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                prime_divs.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            prime_divs.push(m);
        }
        let mut pows = vec![x.clone()];
        for _ in 0..n {
            let next = frob(pows.last().unwrap());
            pows.push(next);
        }
        if !pows[n].sub(&x).rem(&f).is_zero() {
            return false;
        }
        prime_divs.iter().all(|&r| {
            let h = pows[n / r].sub(&x);
            f.gcd(&h).is_constant()
        })
    }

    /// Factorization into monic irreducibles with multiplicity, sorted by
    /// (degree, coefficients). Deterministic (fixed-seed splitting).
    pub fn factor(&self) -> Vec<(APoly, usize)> {
        assert!(!self.is_zero(), "cannot factor zero");
        let mut out: Vec<(APoly, usize)> = vec![];
        for (sqf, mult) in self.monic().squarefree_decomposition() {
            for (deg, prod) in sqf.distinct_degree() {
                for fac in prod.equal_degree(deg) {
                    out.push((fac, mult));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        // Merge duplicates coming from different multiplicity classes (cannot
        // happen for a correct squarefree decomposition, kept for safety of
        // downstream consumers).
        let mut merged: Vec<(APoly, usize)> = vec![];
        for (f, m) in out {
            match merged.last_mut() {
                Some((g, k)) if *g == f => *k += m,
                _ => merged.push((f, m)),
            }
        }
        merged
    }

    /// Yun-style squarefree decomposition over a perfect field of char p.
    fn squarefree_decomposition(&self) -> Vec<(APoly, usize)> {
        let p = self.field.p() as usize;
        let mut out = vec![];
        let f = self.monic();
        if f.is_constant() {
            return out;
        }
        let d = f.derivative();
        if d.is_zero() {
            // f = g^p
            for (g, m) in f.pth_root().squarefree_decomposition() {
                out.push((g, m * p));
            }
            return out;
        }
        let mut c = f.gcd(&d);
        let mut w = f.div_rem(&c).0;
        let mut i = 1;
        while !w.is_constant() {
            let y = w.gcd(&c);
            let z = w.div_rem(&y).0;
            if !z.is_constant() {
                out.push((z.monic(), i));
            }
            w = y;
            c = c.div_rem(&w).0;
            i += 1;
        }
        if !c.is_constant() {
            for (g, m) in c.pth_root().squarefree_decomposition() {
                out.push((g, m * p));
            }
        }
        out
    }

    /// For a polynomial in θ^p, its p-th root.
    fn pth_root(&self) -> Self {
        let p = self.field.p() as usize;
        let e = self.field.e() as u64;
        // Inverse Frobenius on F_q is a -> a^{p^{e-1}}.
        let inv_frob = |a: FqElem| a.pow((self.field.p() as u64).pow((e - 1) as u32));
        let coeffs = self.coeffs.iter().step_by(p).map(|&c| inv_frob(c)).collect();
        Self::new(self.field, coeffs)
    }

    fn distinct_degree(&self) -> Vec<(usize, APoly)> {
        let q = self.field.q() as u128;
        let mut out = vec![];
        let mut f = self.clone();
        let x = Self::theta(self.field);
        let mut h = x.clone();
        let mut d = 0;
        while f.degree().unwrap_or(0) >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(q, &f);
            let g = f.gcd(&h.sub(&x));
            if !g.is_constant() {
                f = f.div_rem(&g).0;
                h = h.rem(&f);
                out.push((d, g));
            }
        }
        if let Some(n) = f.degree() {
            if n > 0 {
                out.push((n, f.monic()));
            }
        }
        out
    }

    fn equal_degree(&self, d: usize) -> Vec<APoly> {
        let n = self.degree().unwrap_or(0);
        if n == d {
            return vec![self.monic()];
        }
        let field = self.field;
        let q = field.q() as u128;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n as u64);
        loop {
            let r = APoly::new(field, (0..n).map(|_| field.elem(rng.gen_range(0..field.q()))).collect());
            if r.is_constant() {
                continue;
            }
            let g = if field.p() == 2 {
                // Trace map to F_2: sum_{i < e d} r^{2^i}.
                let mut t = r.rem(self);
                let mut acc = t.clone();
                for _ in 1..(field.e() as usize * d) {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                self.gcd(&acc)
            } else {
                let qd = q.checked_pow(d as u32).expect("extension degree too large for splitting");
                let h = r.powmod((qd - 1) / 2, self).sub(&Self::one(field));
                self.gcd(&h)
            };
            if !g.is_constant() && g.degree() != self.degree() {
                let other = self.div_rem(&g).0;
                let mut out = g.equal_degree(d);
                out.extend(other.equal_degree(d));
                return out;
            }
        }
    }
}

impl PartialOrd for APoly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
/// Degree first, then coefficient vectors from the top down.
impl Ord for APoly {
    fn cmp(&self, o: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&o.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(o.coeffs.iter().rev()))
    }
}

impl fmt::Debug for APoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
impl fmt::Display for APoly {
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
            match (i, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "θ")?,
                (1, false) => write!(f, "{c}θ")?,
                (_, true) => write!(f, "θ^{i}")?,
                (_, false) => write!(f, "{c}θ^{i}")?,
            }
        }
        Ok(())
    }
}

/// Canonical encoding: list of `[exponent, coefficient-vector]` pairs.
impl Serialize for APoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(usize, Vec<u32>)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.coeffs()))
            .collect();
        pairs.serialize(s)
    }
}

impl Ring for APoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.field)
    }
    fn one_like(&self) -> Self {
        Self::one(self.field)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, r: &Self) -> Self {
        self.add(r)
    }
    fn sub_ref(&self, r: &Self) -> Self {
        self.sub(r)
    }
    fn mul_ref(&self, r: &Self) -> Self {
        self.mul(r)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn from_int_like(&self, n: i64) -> Self {
        Self::constant(self.field.from_int(n))
    }
}

/// Units of A are the nonzero constants.
impl FieldLike for APoly {
    fn inv_opt(&self) -> Option<Self> {
        if self.coeffs.len() == 1 {
            Some(Self::constant(self.coeffs[0].inv().unwrap()))
        } else {
            None
        }
    }
}

/// All monic polynomials of degree `d`, in lexicographic order of the
/// coefficient vector `(a_0, .., a_{d-1})` read as a base-q integer with
/// `a_0` least significant.
pub fn monic_enum(field: Fq, d: usize) -> impl Iterator<Item = APoly> {
    let q = field.q() as u64;
    let count = q.pow(d as u32);
    (0..count).map(move |mut code| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push(field.elem((code % q) as u32));
            code /= q;
        }
        v.push(field.one());
        APoly::new(field, v)
    })
}

/// All polynomials of degree < `d` (including zero), same order as
/// [`monic_enum`].
pub fn poly_enum(field: Fq, d: usize) -> impl Iterator<Item = APoly> {
    let q = field.q() as u64;
    let count = q.pow(d as u32);
    (0..count).map(move |mut code| {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            v.push(field.elem((code % q) as u32));
            code /= q;
        }
        APoly::new(field, v)
    })
}

/// Monic irreducibles of degree 1..=d_max, by degree then [`monic_enum`] order.
pub fn irreducible_enum(field: Fq, d_max: usize) -> Vec<APoly> {
    (1..=d_max).flat_map(|d| monic_enum(field, d).filter(|f| f.is_irreducible())).collect()
}

/// Number of monic irreducibles of degree d: (1/d) sum_{k|d} mu(k) q^{d/k}.
pub fn necklace_count(q: u64, d: u64) -> u64 {
    let mobius = |mut n: u64| -> i64 {
        let mut r = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                r = -r;
            }
            p += 1;
        }
        if n > 1 {
            r = -r;
        }
        r
    };
    let s: i64 = (1..=d).filter(|k| d.is_multiple_of(*k)).map(|k| mobius(k) * (q as i64).pow((d / k) as u32)).sum();
    (s / d as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    fn brute_irreducible(f: &APoly) -> bool {
        let n = f.degree().unwrap();
        (1..=n / 2).all(|k| monic_enum(f.field(), k).all(|g| !g.divides(f)))
    }

    #[test]
    fn monic_enum_q2_d1_and_q3_d0() {
        let f2 = FieldConfig::builtin(2).unwrap();
        let v: Vec<String> = monic_enum(f2, 1).map(|a| a.to_string()).collect();
        assert_eq!(v, vec!["θ", "θ + 1"]);
        let f3 = FieldConfig::builtin(3).unwrap();
        let v: Vec<APoly> = monic_enum(f3, 0).collect();
        assert_eq!(v, vec![APoly::one(f3)]);
    }

    #[test]
    fn product_of_linear_monics_is_theta_q_minus_theta() {
        for q in [2u32, 3, 4, 5, 7] {
            let f = FieldConfig::builtin(q).unwrap();
            let prod = monic_enum(f, 1).fold(APoly::one(f), |acc, a| acc.mul(&a));
            let expect = APoly::theta(f).pow(q as u64).sub(&APoly::theta(f));
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn irreducible_enum_matches_brute_force_and_necklace() {
        let f2 = FieldConfig::builtin(2).unwrap();
        let v: Vec<String> = irreducible_enum(f2, 2).iter().map(|a| a.to_string()).collect();
        assert_eq!(v, vec!["θ", "θ + 1", "θ^2 + θ + 1"]);
        assert_eq!(monic_enum(f2, 3).filter(|a| a.is_irreducible()).count(), 2);
        assert_eq!(necklace_count(2, 3), 2);
        for q in [2u32, 3, 4, 5] {
            let f = FieldConfig::builtin(q).unwrap();
            for d in 1..=4usize {
                if (q as u64).pow(d as u32) > 700 {
                    continue;
                }
                let fast = monic_enum(f, d).filter(|a| a.is_irreducible()).count() as u64;
                let brute = monic_enum(f, d).filter(brute_irreducible).count() as u64;
                assert_eq!(fast, brute, "q={q} d={d}");
                assert_eq!(fast, necklace_count(q as u64, d as u64));
            }
        }
        let f3 = FieldConfig::builtin(3).unwrap();
        let v: Vec<String> = irreducible_enum(f3, 1).iter().map(|a| a.to_string()).collect();
        assert_eq!(v, vec!["θ", "θ + 1", "θ + 2"]);
    }

    #[test]
    fn factorization_reassembles() {
        for q in [2u32, 3, 4, 9] {
            let f = FieldConfig::builtin(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            for _ in 0..30 {
                let n = rng.gen_range(1..9);
                let mut c: Vec<FqElem> = (0..n).map(|_| f.elem(rng.gen_range(0..q))).collect();
                c.push(f.one());
                let a = APoly::new(f, c);
                let fac = a.factor();
                let prod = fac.iter().fold(APoly::one(f), |acc, (g, m)| acc.mul(&g.pow(*m as u64)));
                assert_eq!(prod, a);
                assert!(fac.iter().all(|(g, _)| g.is_irreducible() && g.is_monic()));
            }
        }
        // A p-th power: (θ^2 + 1)^3 over F_3.
        let f3 = FieldConfig::builtin(3).unwrap();
        let g = APoly::from_codes(f3, &[1, 0, 1]);
        assert_eq!(g.pow(3).factor(), vec![(g, 3)]);
    }

    #[test]
    fn xgcd_bezout() {
        let f = FieldConfig::builtin(5).unwrap();
        let a = APoly::from_codes(f, &[1, 2, 0, 1]);
        let b = APoly::from_codes(f, &[3, 1, 4]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
        assert_eq!(g, a.gcd(&b));
    }
}
