//! Truncated Laurent series in θ^{-1/r} (r ∈ {1, 2}) with coefficients in K_s.
//!
//! Index `n` stands for θ^{-n/r}, so index equals r times the valuation
//! (normalized by v(θ) = -1). Coefficients are known for `n < prec`; the
//! sentinel [`EXACT`] marks exact (finite) values. A series with no known
//! nonzero coefficient and finite `prec` is zero to precision, which is
//! distinct from the exact zero.

use std::fmt;

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::mpoly::MPoly;
use crate::ratfunc::RatFunc;
use crate::ring::{FieldLike, Ring};

pub const EXACT: i64 = i64::MAX / 4;

pub fn padd(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        a + b
    }
}
fn pmul(a: i64, k: i64) -> i64 {
    if a >= EXACT {
        EXACT
    } else {
        a * k
    }
}

/// Working precision: target valuation plus guard digits (both in θ^{-1} units).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Precision {
    pub target: i64,
    pub guard: i64,
}

impl Precision {
    pub fn new(target: i64, guard: i64) -> Self {
        Precision { target, guard: guard.max(0) }
    }
    pub fn working(&self) -> i64 {
        self.target + self.guard
    }
}
impl Default for Precision {
    fn default() -> Self {
        Precision { target: 60, guard: 8 }
    }
}

#[derive(Clone)]
pub struct TruncSeries {
    field: Fq,
    ram: u32,
    start: i64,
    coeffs: Vec<RatFunc>,
    prec: i64,
}

impl TruncSeries {
    fn build(field: Fq, ram: u32, start: i64, coeffs: Vec<RatFunc>, prec: i64) -> Self {
        let mut s = TruncSeries { field, ram, start, coeffs, prec };
        s.normalize();
        s
    }
    fn normalize(&mut self) {
        if self.prec < EXACT {
            let keep = (self.prec - self.start).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.start = if self.prec >= EXACT { 0 } else { self.prec };
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.start += k as i64;
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn zero(field: Fq, ram: u32) -> Self {
        TruncSeries { field, ram, start: 0, coeffs: vec![], prec: EXACT }
    }
    /// Zero known only up to index `prec`.
    pub fn zero_to(field: Fq, ram: u32, prec: i64) -> Self {
        Self::build(field, ram, prec, vec![], prec)
    }
    pub fn one(field: Fq) -> Self {
        Self::constant(RatFunc::one(field))
    }
    pub fn constant(c: RatFunc) -> Self {
        Self::build(c.field(), 1, 0, vec![c], EXACT)
    }
    pub fn from_fq(c: FqElem) -> Self {
        Self::constant(RatFunc::constant(c))
    }
    /// c·θ^{-n/r}.
    pub fn monomial(c: RatFunc, n: i64, ram: u32) -> Self {
        Self::build(c.field(), ram, n, vec![c], EXACT)
    }
    /// θ^k, exactly.
    pub fn theta_pow(field: Fq, k: i64) -> Self {
        Self::monomial(RatFunc::one(field), -k, 1)
    }
    /// The element a(θ) of A.
    pub fn from_apoly(a: &APoly) -> Self {
        let f = a.field();
        if a.is_zero() {
            return Self::zero(f, 1);
        }
        let d = a.degree().unwrap();
        let coeffs = (0..=d).rev().map(|i| RatFunc::constant(a.coeff(i))).collect();
        Self::build(f, 1, -(d as i64), coeffs, EXACT)
    }
    /// Series from explicit coefficients c_n, n = start.., known below `prec`.
    pub fn from_coeffs(field: Fq, ram: u32, start: i64, coeffs: Vec<RatFunc>, prec: i64) -> Self {
        Self::build(field, ram, start, coeffs, prec)
    }

    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn ram(&self) -> u32 {
        self.ram
    }
    pub fn start(&self) -> i64 {
        self.start
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }
    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }
    /// Known coefficient at index n.
    pub fn coeff(&self, n: i64) -> Option<RatFunc> {
        if n >= self.prec {
            return None;
        }
        if n < self.start || n >= self.start + self.coeffs.len() as i64 {
            return Some(RatFunc::zero(self.field));
        }
        Some(self.coeffs[(n - self.start) as usize].clone())
    }
    /// Lowest index that may carry a nonzero coefficient.
    pub fn vlow(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.prec
        } else {
            self.start
        }
    }
    /// Valuation when the leading term is determined.
    pub fn valuation(&self) -> Option<Ratio<i64>> {
        (!self.coeffs.is_empty()).then(|| Ratio::new(self.start, self.ram as i64))
    }
    /// Lower bound on the valuation: exact valuation, or the precision for
    /// zero to precision (`None` for the exact zero).
    pub fn valuation_bound(&self) -> Option<Ratio<i64>> {
        let v = self.vlow();
        (v < EXACT).then(|| Ratio::new(v, self.ram as i64))
    }
    /// Precision as a valuation (`None` when exact).
    pub fn prec_valuation(&self) -> Option<Ratio<i64>> {
        (!self.is_exact()).then(|| Ratio::new(self.prec, self.ram as i64))
    }
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_exact()
    }
    /// No known nonzero coefficient (exact zero or zero to precision).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn lead_coeff(&self) -> Option<&RatFunc> {
        self.coeffs.first()
    }

    /// Lift to ramification `r` (must be a multiple of the current one).
    pub fn with_ram(&self, r: u32) -> Self {
        if r == self.ram {
            return self.clone();
        }
        assert!(r.is_multiple_of(self.ram), "incompatible ramification");
        let k = (r / self.ram) as i64;
        let mut coeffs = vec![RatFunc::zero(self.field); (self.coeffs.len().max(1) - 1) * k as usize + self.coeffs.len().min(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        Self::build(self.field, r, self.start * k, coeffs, pmul(self.prec, k))
    }
    fn common(&self, o: &Self) -> (Self, Self) {
        let r = self.ram.max(o.ram);
        (self.with_ram(r), o.with_ram(r))
    }
    /// Forget coefficients from index `prec` on.
    pub fn truncate(&self, prec: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(prec);
        s.normalize();
        s
    }
    /// Truncate at a valuation bound (in θ^{-1} units).
    pub fn truncate_val(&self, v: i64) -> Self {
        self.truncate(v * self.ram as i64)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.ram != o.ram {
            let (a, b) = self.common(o);
            return a.add(&b);
        }
        let prec = self.prec.min(o.prec);
        let lo = self.vlow().min(o.vlow()).min(prec);
        let hi_x = self.start + self.coeffs.len() as i64;
        let hi_y = o.start + o.coeffs.len() as i64;
        let hi = if prec >= EXACT { hi_x.max(hi_y) } else { prec };
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return Self::zero_to(self.field, self.ram, prec).exact_if(prec);
        }
        let lo = lo.min(hi);
        let mut coeffs = Vec::with_capacity((hi - lo).max(0) as usize);
        for n in lo..hi {
            let a = self.get_or_zero(n);
            let b = o.get_or_zero(n);
            coeffs.push(match (a, b) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => RatFunc::zero(self.field),
            });
        }
        Self::build(self.field, self.ram, lo, coeffs, prec)
    }
    fn exact_if(self, prec: i64) -> Self {
        if prec >= EXACT {
            Self::zero(self.field, self.ram)
        } else {
            self
        }
    }
    fn get_or_zero(&self, n: i64) -> Option<&RatFunc> {
        if n < self.start {
            return None;
        }
        self.coeffs.get((n - self.start) as usize)
    }
    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        s.coeffs = s.coeffs.iter().map(|c| c.neg()).collect();
        s
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &RatFunc) -> Self {
        if c.is_zero() {
            return Self::zero(self.field, self.ram);
        }
        let mut s = self.clone();
        s.coeffs = s.coeffs.iter().map(|x| x.mul(c)).collect();
        s
    }
    pub fn scale_fq(&self, c: FqElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.field, self.ram);
        }
        let mut s = self.clone();
        s.coeffs = s.coeffs.iter().map(|x| x.scale(c)).collect();
        s
    }
    /// Multiply by θ^k exactly.
    pub fn shift_theta(&self, k: i64) -> Self {
        let d = k * self.ram as i64;
        let mut s = self.clone();
        s.start -= d;
        if !s.is_exact() {
            s.prec -= d;
        }
        if s.coeffs.is_empty() && !s.is_exact() {
            s.start = s.prec;
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.ram != o.ram {
            let (a, b) = self.common(o);
            return a.mul(&b);
        }
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero(self.field, self.ram);
        }
        let prec = padd(self.prec, o.vlow()).min(padd(o.prec, self.vlow()));
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::zero_to(self.field, self.ram, prec);
        }
        let lo = self.start + o.start;
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let len = if prec >= EXACT { full } else { ((prec - lo).max(0) as usize).min(full) };
        let mut coeffs = vec![RatFunc::zero(self.field); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::build(self.field, self.ram, lo, coeffs, prec)
    }

    /// Multiplicative inverse. The result is known to index `prec - 2v`
    /// (v the leading index), capped at `cap` (required for exact
    /// non-monomial inputs).
    pub fn inv(&self, cap: Option<i64>) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::ZeroDivision);
        }
        let Some(c0) = self.coeffs.first() else {
            return Err(Error::InsufficientPrecision("leading term of inversion operand is not determined".into()));
        };
        let v = self.start;
        let c0inv = c0.inv().ok_or(Error::ZeroDivision)?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::build(self.field, self.ram, -v, vec![c0inv], EXACT));
        }
        let mut prec = padd(self.prec, -2 * v);
        if let Some(c) = cap {
            prec = prec.min(c);
        }
        if prec >= EXACT {
            return Err(Error::InsufficientPrecision("inverse of an exact series needs a precision cap".into()));
        }
        let len = (prec + v).max(0) as usize;
        let mut y: Vec<RatFunc> = Vec::with_capacity(len);
        for k in 0..len {
            if k == 0 {
                y.push(c0inv.clone());
                continue;
            }
            let mut acc = RatFunc::zero(self.field);
            for j in 1..=k.min(self.coeffs.len() - 1) {
                let cj = &self.coeffs[j];
                if cj.is_zero() || y[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&cj.mul(&y[k - j]));
            }
            y.push(acc.mul(&c0inv).neg());
        }
        Ok(Self::build(self.field, self.ram, -v, y, prec))
    }
    pub fn div(&self, o: &Self, cap: Option<i64>) -> Result<Self> {
        Ok(self.mul(&o.inv(cap)?))
    }
    pub fn pow(&self, e: u64) -> Self {
        self.pow_u(e)
    }

    /// τ^k: fixes coefficients and sends θ^{-n/r} to θ^{-n q^k / r}.
    pub fn tau(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let qk = (self.field.q() as i64).pow(k);
        self.index_scale(qk, |c| c.clone())
    }
    fn index_scale(&self, m: i64, f: impl Fn(&RatFunc) -> RatFunc) -> Self {
        if self.coeffs.is_empty() {
            return if self.is_exact() { self.clone() } else { Self::zero_to(self.field, self.ram, self.prec * m) };
        }
        let len = (self.coeffs.len() - 1) * m as usize + 1;
        let mut coeffs = vec![RatFunc::zero(self.field); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = f(c);
        }
        let prec = if self.is_exact() { EXACT } else { self.prec * m };
        Self::build(self.field, self.ram, self.start * m, coeffs, prec)
    }
    /// x^{q^k} computed as a Frobenius map (coefficients raised too).
    pub fn frobenius_q(&self, k: u32) -> Self {
        let qk = (self.field.q() as i64).pow(k);
        let pe = self.field.e() * k;
        self.index_scale(qk, |c| c.frobenius_pow(pe))
    }

    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Self {
        let coeffs = self.coeffs.iter().map(f).collect();
        Self::build(self.field, self.ram, self.start, coeffs, self.prec)
    }
    /// Substitute polynomials for the t-variables in every coefficient.
    pub fn subst(&self, images: &[MPoly]) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.subst(images).ok_or(Error::ZeroDivision))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(self.field, self.ram, self.start, coeffs, self.prec))
    }
    /// τ-fixed within the common precision window.
    pub fn tau_fixed(&self) -> bool {
        self.tau(1).sub(self).is_known_zero()
    }
    /// Odd-index part (ram 2): the component outside F_q((θ^{-1})).
    pub fn odd_part(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if (self.start + i as i64).rem_euclid(2) == 1 { c.clone() } else { RatFunc::zero(self.field) })
            .collect();
        Self::build(self.field, self.ram, self.start, coeffs, self.prec)
    }
    /// Keep only the coefficients of θ^{-n/r} with n < 0 (polynomial part) or n > 0 (tail).
    pub fn split_at_zero(&self) -> (Self, Self) {
        let mut poly = vec![];
        let mut tail = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = self.start + i as i64;
            if n <= 0 {
                poly.push((n, c.clone()));
            } else {
                tail.push((n, c.clone()));
            }
        }
        let mk = |v: Vec<(i64, RatFunc)>, prec| {
            let st = v.first().map_or(prec, |x| x.0);
            Self::build(self.field, self.ram, st, v.into_iter().map(|x| x.1).collect(), prec)
        };
        let poly_prec = if self.prec > 0 { EXACT } else { self.prec };
        (mk(poly, poly_prec), mk(tail, self.prec))
    }
}

impl PartialEq for TruncSeries {
    fn eq(&self, o: &Self) -> bool {
        if self.ram != o.ram {
            let (a, b) = self.common(o);
            return a == b;
        }
        self.prec == o.prec && self.start == o.start && self.coeffs == o.coeffs
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = self.start + i as i64;
            let e = Ratio::new(-n, self.ram as i64);
            let cs = c.to_string();
            let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
            parts.push(if e == Ratio::from_integer(0) {
                cs
            } else if c.is_one() {
                format!("θ^{e}")
            } else {
                format!("{cs}·θ^{e}")
            });
        }
        if parts.is_empty() && self.is_exact() {
            parts.push("0".into());
        }
        if !self.is_exact() {
            parts.push(format!("O(θ^{})", Ratio::new(-self.prec, self.ram as i64)));
        }
        f.write_str(&parts.join(" + "))
    }
}
impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `{ram, start, prec, coeffs: [[n, ratfunc]]}`; `prec` is null when exact.
impl Serialize for TruncSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TruncSeries", 4)?;
        st.serialize_field("ram", &self.ram)?;
        st.serialize_field("start", &self.start)?;
        st.serialize_field("prec", &(!self.is_exact()).then_some(self.prec))?;
        let cs: Vec<(i64, &RatFunc)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.start + i as i64, c))
            .collect();
        st.serialize_field("coeffs", &cs)?;
        st.end()
    }
}

impl Ring for TruncSeries {
    fn zero_like(&self) -> Self {
        Self::zero(self.field, self.ram)
    }
    fn one_like(&self) -> Self {
        Self::one(self.field).with_ram(self.ram)
    }
    /// Exact zero only; zero to precision still carries information.
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
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
        Self::from_fq(self.field.from_int(n)).with_ram(self.ram)
    }
}

impl FieldLike for TruncSeries {
    fn inv_opt(&self) -> Option<Self> {
        self.inv(None).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use crate::mpoly::MPoly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_series(f: Fq, rng: &mut ChaCha8Rng, prec: i64) -> TruncSeries {
        let start = rng.gen_range(-3..3);
        let t = RatFunc::var(f, 0);
        let coeffs = (start..prec)
            .map(|_| {
                let a = RatFunc::constant(f.elem(rng.gen_range(0..f.q())));
                let b = RatFunc::constant(f.elem(rng.gen_range(0..f.q())));
                a.add(&b.mul(&t))
            })
            .collect();
        TruncSeries::from_coeffs(f, 1, start, coeffs, prec)
    }

    #[test]
    fn geometric_series_inverse() {
        let f = FieldConfig::builtin(3).unwrap();
        let x = TruncSeries::one(f).sub(&TruncSeries::theta_pow(f, -1)).truncate(20);
        let y = x.inv(None).unwrap();
        assert_eq!(y.prec(), 20);
        for n in 0..20 {
            assert!(y.coeff(n).unwrap().is_one());
        }
        assert!(TruncSeries::zero(f, 1).inv(None).is_err());
        assert!(matches!(TruncSeries::zero_to(f, 1, 5).inv(None), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn ultrametric_and_inverse_property() {
        let f = FieldConfig::builtin(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let x = rand_series(f, &mut rng, 15);
            let y = rand_series(f, &mut rng, 12);
            let s = x.add(&y);
            assert!(s.vlow() >= x.vlow().min(y.vlow()));
            if x.vlow() != y.vlow() && x.valuation().is_some() && y.valuation().is_some() {
                assert_eq!(s.vlow(), x.vlow().min(y.vlow()));
            }
            if x.lead_coeff().is_some() {
                let xi = x.inv(None).unwrap();
                let one = x.mul(&xi).sub(&TruncSeries::one(f));
                assert!(one.is_known_zero());
                assert!(one.prec() >= x.prec() - 2 * x.start() + x.start());
            }
        }
    }

    #[test]
    fn tau_is_a_ring_homomorphism() {
        let f = FieldConfig::builtin(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let x = rand_series(f, &mut rng, 10);
            let y = rand_series(f, &mut rng, 9);
            assert_eq!(x.mul(&y).tau(1), x.tau(1).mul(&y.tau(1)));
            assert_eq!(x.add(&y).tau(2), x.tau(2).add(&y.tau(2)));
        }
        let t = TruncSeries::theta_pow(f, -1);
        assert_eq!(t.tau(1), TruncSeries::theta_pow(f, -3));
        let c = TruncSeries::constant(RatFunc::from_poly(MPoly::var(f, 0)));
        assert_eq!(c.tau(3), c);
    }

    #[test]
    fn tau_fixed_points_are_constants() {
        let f7 = FieldConfig::builtin(7).unwrap();
        assert!(TruncSeries::from_fq(f7.elem(5)).tau_fixed());
        assert!(!TruncSeries::theta_pow(f7, -1).tau_fixed());
        // Solve τ(x) = x coefficientwise on indices 0..N for x = Σ c_n θ^{-n}:
        // coefficient n of τ(x) is c_{n/q} when q | n, else 0, so c_n = 0 for n > 0.
        let f = FieldConfig::builtin(3).unwrap();
        let n = 12;
        let mut c: Vec<Option<bool>> = vec![None; n];
        c[0] = Some(true);
        for k in 1..n {
            // equation at index k: [q | k] c_{k/q} = c_k, and c_{k/q} is forced zero for k/q >= 1
            let from = if k % 3 == 0 { c[k / 3].unwrap() && k / 3 == 0 } else { false };
            c[k] = Some(from);
        }
        let x = TruncSeries::from_coeffs(
            f,
            1,
            0,
            c.iter().map(|b| if b.unwrap() { RatFunc::one(f) } else { RatFunc::zero(f) }).collect(),
            n as i64,
        );
        assert!(x.tau_fixed());
        assert_eq!(x.coeffs().len(), 1);
    }

    #[test]
    fn higher_precision_agrees_on_overlap() {
        let f = FieldConfig::builtin(2).unwrap();
        let x = TruncSeries::from_apoly(&APoly::from_codes(f, &[1, 1, 1]));
        let low = x.inv(Some(10)).unwrap().pow(3);
        let high = x.inv(Some(30)).unwrap().pow(3);
        assert!(high.truncate(low.prec()).sub(&low).is_known_zero());
        assert_eq!(high.truncate(low.prec()), low);
    }

    #[test]
    fn ramified_lift_and_odd_part() {
        let f = FieldConfig::builtin(3).unwrap();
        let half = TruncSeries::monomial(RatFunc::one(f), -1, 2); // θ^{1/2}
        assert_eq!(half.mul(&half), TruncSeries::theta_pow(f, 1).with_ram(2));
        assert_eq!(half.valuation(), Some(Ratio::new(-1, 2)));
        let z = half.add(&TruncSeries::theta_pow(f, 2));
        assert_eq!(z.odd_part(), half);
    }
}
