//! Sparse multivariate polynomials over F_q in the variables t_1, .., t_s.
//!
//! Monomials are packed into a `u128`: up to [`MAX_VARS`] variables, each
//! exponent in an 12-bit slot whose top bit is a guard used to detect
//! overflow after addition.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::apoly::APoly;
use crate::field::{Fq, FqElem};
use crate::ring::Ring;

pub const MAX_VARS: usize = 10;
const SLOT: u32 = 12;
const MAX_EXP: u32 = (1 << (SLOT - 1)) - 1;
const SLOT_MASK: u128 = (1 << SLOT) - 1;

fn guard_mask() -> u128 {
    (0..MAX_VARS).fold(0u128, |m, i| m | (1u128 << (SLOT as usize * i + SLOT as usize - 1)))
}

/// Exponent vector of a monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(i: usize) -> Mono {
        Self::var_pow(i, 1)
    }
    pub fn var_pow(i: usize, k: u32) -> Mono {
        assert!(i < MAX_VARS, "too many variables");
        assert!(k <= MAX_EXP, "exponent overflow");
        Mono((k as u128) << (SLOT as usize * i))
    }
    pub fn from_exps(e: &[u32]) -> Mono {
        e.iter().enumerate().fold(Mono::ONE, |m, (i, &k)| m.mul(Mono::var_pow(i, k)))
    }
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (SLOT as usize * i)) & SLOT_MASK) as u32
    }
    pub fn exps(self) -> Vec<u32> {
        let mut v: Vec<u32> = (0..MAX_VARS).map(|i| self.exp(i)).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }
    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exp(i)).sum()
    }
    pub fn mul(self, o: Mono) -> Mono {
        let r = self.0 + o.0;
        assert!(r & guard_mask() == 0, "monomial exponent overflow");
        Mono(r)
    }
    /// `self / o` when `o` divides `self`.
    pub fn div(self, o: Mono) -> Option<Mono> {
        (0..MAX_VARS).all(|i| self.exp(i) >= o.exp(i)).then(|| Mono(self.0 - o.0))
    }
    pub fn scale_exps(self, k: u32) -> Mono {
        Mono::from_exps(&self.exps().iter().map(|&e| e * k).collect::<Vec<_>>())
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

/// Polynomial as a list of terms sorted by monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    field: Fq,
    terms: Vec<(Mono, FqElem)>,
}

impl MPoly {
    pub fn zero(field: Fq) -> Self {
        MPoly { field, terms: vec![] }
    }
    pub fn one(field: Fq) -> Self {
        Self::constant(field.one())
    }
    pub fn constant(c: FqElem) -> Self {
        Self::term(c, Mono::ONE)
    }
    pub fn term(c: FqElem, m: Mono) -> Self {
        let terms = if c.is_zero() { vec![] } else { vec![(m, c)] };
        MPoly { field: c.field(), terms }
    }
    /// The variable t_{i+1} (0-based index).
    pub fn var(field: Fq, i: usize) -> Self {
        Self::term(field.one(), Mono::var(i))
    }
    pub fn from_terms(field: Fq, mut terms: Vec<(Mono, FqElem)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Mono, FqElem)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = *lc + c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        MPoly { field, terms: out }
    }
    /// Univariate embedding of `a` in the variable with index `i`.
    pub fn from_apoly(a: &APoly, i: usize) -> Self {
        let terms = a.coeffs().iter().enumerate().map(|(k, &c)| (Mono::var_pow(i, k as u32), c)).collect();
        Self::from_terms(a.field(), terms)
    }
    /// If only variable `i` occurs, the corresponding univariate polynomial.
    pub fn to_apoly(&self, i: usize) -> Option<APoly> {
        let mut v = vec![];
        for &(m, c) in &self.terms {
            let k = m.exp(i) as usize;
            if Mono::var_pow(i, k as u32) != m {
                return None;
            }
            if v.len() <= k {
                v.resize(k + 1, self.field.zero());
            }
            v[k] = c;
        }
        Some(APoly::new(self.field, v))
    }

    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn terms(&self) -> &[(Mono, FqElem)] {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == Mono::ONE)
    }
    pub fn constant_value(&self) -> Option<FqElem> {
        match self.terms.as_slice() {
            [] => Some(self.field.zero()),
            [(m, c)] if *m == Mono::ONE => Some(*c),
            _ => None,
        }
    }
    pub fn constant_term(&self) -> FqElem {
        match self.terms.first() {
            Some((m, c)) if *m == Mono::ONE => *c,
            _ => self.field.zero(),
        }
    }
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(i)).max().unwrap_or(0)
    }
    /// Number of variables, counted as one past the largest index used.
    pub fn nvars(&self) -> usize {
        self.terms.iter().map(|t| t.0.exps().len()).max().unwrap_or(0)
    }
    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.iter().any(|t| t.0.exp(i) > 0)
    }
    /// Leading term for the monomial order (largest packed monomial).
    pub fn lead_term(&self) -> Option<(Mono, FqElem)> {
        self.terms.last().copied()
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1 + b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MPoly { field: self.field, terms: out }
    }
    pub fn neg(&self) -> Self {
        MPoly { field: self.field, terms: self.terms.iter().map(|&(m, c)| (m, -c)).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: FqElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.field);
        }
        MPoly { field: self.field, terms: self.terms.iter().map(|&(m, a)| (m, a * c)).collect() }
    }
    pub fn mul_term(&self, m: Mono, c: FqElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.field);
        }
        MPoly { field: self.field, terms: self.terms.iter().map(|&(a, b)| (a.mul(m), b * c)).collect() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        if let Some(c) = self.constant_value() {
            return o.scale(c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(c);
        }
        let mut v = Vec::with_capacity(self.terms.len() * o.terms.len());
        for &(m1, c1) in &self.terms {
            for &(m2, c2) in &o.terms {
                v.push((m1.mul(m2), c1 * c2));
            }
        }
        Self::from_terms(self.field, v)
    }
    pub fn pow(&self, e: u64) -> Self {
        self.pow_u(e)
    }
    /// `self^{p^k}`, computed coefficientwise (Frobenius is additive).
    pub fn frobenius_pow(&self, k: u32) -> Self {
        let pk = self.field.p().pow(k);
        let terms = self.terms.iter().map(|&(m, c)| (m.scale_exps(pk), c.pow(pk as u64))).collect();
        Self::from_terms(self.field, terms)
    }

    /// Exact division by a monomial-free divisor if it divides; `None` otherwise.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.constant_value() {
            return Some(self.scale(c.inv().unwrap()));
        }
        let (lm, lc) = d.lead_term().unwrap();
        let inv = lc.inv().unwrap();
        let mut r = self.clone();
        let mut q = Self::zero(self.field);
        while let Some((m, c)) = r.lead_term() {
            let qm = m.div(lm)?;
            let qc = c * inv;
            q = q.add(&Self::term(qc, qm));
            r = r.sub(&d.mul_term(qm, qc));
        }
        Some(q)
    }

    /// Evaluate with `point[i]` substituted for t_{i+1}, mapping
    /// coefficients through `embed` (identity for the same field).
    pub fn eval_with(&self, point: &[FqElem], embed: impl Fn(FqElem) -> FqElem) -> FqElem {
        let target = point.first().map(|x| x.field()).unwrap_or(self.field);
        let mut acc = target.zero();
        for &(m, c) in &self.terms {
            let mut v = embed(c);
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    v = v * point[i].pow(e as u64);
                }
            }
            acc = acc + v;
        }
        acc
    }
    pub fn eval(&self, point: &[FqElem]) -> FqElem {
        self.eval_with(point, |c| c)
    }

    /// Substitute polynomials for variables; variable `i` is replaced by
    /// `images[i]` (variables beyond `images` are kept).
    pub fn subst(&self, images: &[MPoly]) -> Self {
        let mut acc = Self::zero(self.field);
        for &(m, c) in &self.terms {
            let mut t = Self::constant(c);
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let f = match images.get(i) {
                    Some(img) => img.pow(e as u64),
                    None => Self::term(self.field.one(), Mono::var_pow(i, e)),
                };
                t = t.mul(&f);
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(i) > 0)
            .map(|&(m, c)| {
                let e = m.exp(i);
                (m.div(Mono::var(i)).unwrap(), c * self.field.from_int(e as i64))
            })
            .collect();
        Self::from_terms(self.field, terms)
    }

    pub fn map_coeffs(&self, target: Fq, f: impl Fn(FqElem) -> FqElem) -> Self {
        Self::from_terms(target, self.terms.iter().map(|&(m, c)| (m, f(c))).collect())
    }

    /// Formatting with a caller-chosen variable naming.
    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for &(m, c) in self.terms.iter().rev() {
            let mut mono = String::new();
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(&names(i));
                if e > 1 {
                    mono.push_str(&format!("^{e}"));
                }
            }
            parts.push(match (mono.is_empty(), c.is_one()) {
                (true, _) => c.to_string(),
                (false, true) => mono,
                (false, false) => format!("{c}*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

/// Default variable names: `t` when only one variable occurs, else `t1, t2, ..`.
pub fn default_var_name(nvars: usize) -> impl Fn(usize) -> String {
    move |i| if nvars <= 1 { "t".to_string() } else { format!("t{}", i + 1) }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars();
        f.write_str(&self.fmt_with(&default_var_name(n)))
    }
}
impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical encoding: list of `[exponent-vector, coefficient-vector]`.
impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(Vec<u32>, Vec<u32>)> = self.terms.iter().map(|(m, c)| (m.exps(), c.coeffs())).collect();
        v.serialize(s)
    }
}

impl Ring for MPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.field)
    }
    fn one_like(&self) -> Self {
        Self::one(self.field)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
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

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_mpoly(f: Fq, rng: &mut ChaCha8Rng, nvars: usize, deg: u32, nterms: usize) -> MPoly {
        let terms = (0..nterms)
            .map(|_| {
                let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=deg)).collect();
                (Mono::from_exps(&e), f.elem(rng.gen_range(0..f.q())))
            })
            .collect();
        MPoly::from_terms(f, terms)
    }

    #[test]
    fn ring_laws_and_exact_division() {
        let f = FieldConfig::builtin(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_mpoly(f, &mut rng, 3, 3, 4);
            let b = random_mpoly(f, &mut rng, 3, 3, 4);
            let c = random_mpoly(f, &mut rng, 3, 2, 3);
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.mul(&b), b.mul(&a));
            if !b.is_zero() {
                assert_eq!(a.mul(&b).div_exact(&b), Some(a.clone()));
            }
            let pt = [f.elem(1), f.elem(2), f.elem(2)];
            assert_eq!(a.mul(&b).eval(&pt), a.eval(&pt) * b.eval(&pt));
        }
    }

    #[test]
    fn frobenius_and_substitution() {
        let f = FieldConfig::builtin(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_mpoly(f, &mut rng, 2, 3, 5);
        assert_eq!(a.frobenius_pow(1), a.pow(2));
        assert_eq!(a.frobenius_pow(2), a.pow(4));
        let t = MPoly::var(f, 0);
        let img = [t.pow(4), t.add(&MPoly::one(f))];
        let pt = [f.elem(2)];
        let direct = a.eval(&[f.elem(2).pow(4), f.elem(2) + f.one()]);
        assert_eq!(a.subst(&img).eval(&pt), direct);
    }

    #[test]
    fn univariate_round_trip_and_derivative() {
        let f = FieldConfig::builtin(5).unwrap();
        let a = APoly::from_codes(f, &[1, 0, 3, 2]);
        let m = MPoly::from_apoly(&a, 1);
        assert_eq!(m.to_apoly(1), Some(a.clone()));
        assert_eq!(m.to_apoly(0), None);
        assert_eq!(m.partial_derivative(1).to_apoly(1), Some(a.derivative()));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn exponent_overflow_is_detected() {
        let m = Mono::var_pow(2, MAX_EXP);
        let _ = m.mul(Mono::var(2));
    }
}
