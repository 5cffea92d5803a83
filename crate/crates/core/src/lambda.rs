//! K_{s,∞}(λ_θ) with λ_θ^{q-1} = -θ, as vectors of q-1 series.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::ratfunc::RatFunc;
use crate::ring::{FieldLike, Ring};
use crate::series::TruncSeries;

/// Σ_j comps[j]·λ^j, 0 <= j < q-1.
#[derive(Clone, PartialEq)]
pub struct LambdaElem {
    comps: Vec<TruncSeries>,
}

impl LambdaElem {
    fn deg(field: Fq) -> usize {
        field.q() as usize - 1
    }
    pub fn zero(field: Fq) -> Self {
        LambdaElem { comps: vec![TruncSeries::zero(field, 1); Self::deg(field)] }
    }
    pub fn one(field: Fq) -> Self {
        Self::from_series(TruncSeries::one(field))
    }
    pub fn from_series(s: TruncSeries) -> Self {
        Self::from_component(s, 0)
    }
    pub fn from_rf(c: RatFunc) -> Self {
        Self::from_series(TruncSeries::constant(c))
    }
    /// c·λ^k for any k >= 0, reduced through λ^{q-1} = -θ.
    pub fn from_component(c: TruncSeries, k: usize) -> Self {
        let f = c.field();
        let n = Self::deg(f);
        let (a, b) = (k / n, k % n);
        let red = if a == 0 { c } else { c.mul(&minus_theta_pow(f, a as i64)) };
        let mut comps = vec![TruncSeries::zero(f, red.ram()); n];
        comps[b] = red;
        LambdaElem { comps }
    }
    pub fn lambda(field: Fq) -> Self {
        Self::from_component(TruncSeries::one(field), 1)
    }
    pub fn field(&self) -> Fq {
        self.comps[0].field()
    }
    pub fn comps(&self) -> &[TruncSeries] {
        &self.comps
    }
    pub fn comp(&self, j: usize) -> &TruncSeries {
        &self.comps[j]
    }

    pub fn add(&self, o: &Self) -> Self {
        LambdaElem { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        LambdaElem { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect() }
    }
    pub fn neg(&self) -> Self {
        LambdaElem { comps: self.comps.iter().map(|a| a.neg()).collect() }
    }
    pub fn scale(&self, c: &TruncSeries) -> Self {
        LambdaElem { comps: self.comps.iter().map(|a| a.mul(c)).collect() }
    }
    pub fn scale_rf(&self, c: &RatFunc) -> Self {
        LambdaElem { comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }
    pub fn shift_theta(&self, k: i64) -> Self {
        LambdaElem { comps: self.comps.iter().map(|a| a.shift_theta(k)).collect() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let f = self.field();
        let n = Self::deg(f);
        let mut out = Self::zero(f);
        let mut wrapped = Self::zero(f);
        for (i, a) in self.comps.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.comps.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let p = a.mul(b);
                let k = i + j;
                if k < n {
                    out.comps[k] = out.comps[k].add(&p);
                } else {
                    wrapped.comps[k - n] = wrapped.comps[k - n].add(&p);
                }
            }
        }
        let mt = minus_theta_pow(f, 1);
        for k in 0..n {
            if !wrapped.comps[k].is_exact_zero() {
                out.comps[k] = out.comps[k].add(&wrapped.comps[k].mul(&mt));
            }
        }
        out
    }
    pub fn pow(&self, e: u64) -> Self {
        self.pow_u(e)
    }

    /// τ^k, using τ(λ) = -θλ, hence τ^k(λ^j) = λ^j ((-θ)^{(q^k-1)/(q-1)})^j.
    pub fn tau(&self, k: u32) -> Self {
        let f = self.field();
        let q = f.q() as i64;
        let e = (q.pow(k) - 1) / (q - 1);
        LambdaElem {
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let t = c.tau(k);
                    if j == 0 || t.is_exact_zero() {
                        t
                    } else {
                        t.mul(&minus_theta_pow(f, e * j as i64))
                    }
                })
                .collect(),
        }
    }

    fn comp_offset(&self, j: usize) -> Ratio<i64> {
        Ratio::new(j as i64, Self::deg(self.field()) as i64)
    }
    /// Lower bound on the valuation (None for the exact zero).
    pub fn valuation_bound(&self) -> Option<Ratio<i64>> {
        self.comps.iter().enumerate().filter_map(|(j, c)| c.valuation_bound().map(|v| v - self.comp_offset(j))).min()
    }
    /// Guaranteed precision as a valuation (None when exact).
    pub fn prec_valuation(&self) -> Option<Ratio<i64>> {
        self.comps.iter().enumerate().filter_map(|(j, c)| c.prec_valuation().map(|v| v - self.comp_offset(j))).min()
    }
    pub fn is_known_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_known_zero())
    }
    pub fn is_exact_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_exact_zero())
    }
    /// Forget everything of valuation >= v.
    pub fn truncate_val(&self, v: Ratio<i64>) -> Self {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.is_exact_zero() {
                    return c.clone();
                }
                let r = c.ram() as i64;
                let idx = ((v + self.comp_offset(j)) * r).ceil().to_integer();
                c.truncate(idx)
            })
            .collect();
        LambdaElem { comps }
    }
    /// The single nonzero component, if there is exactly one (or none).
    pub fn single_component(&self) -> Option<(usize, &TruncSeries)> {
        let nz: Vec<usize> = (0..self.comps.len()).filter(|&j| !self.comps[j].is_exact_zero()).collect();
        match nz.as_slice() {
            [] => Some((0, &self.comps[0])),
            [j] => Some((*j, &self.comps[*j])),
            _ => None,
        }
    }
    /// Inverse of an element c·λ^j (one nonzero component).
    pub fn inv(&self, cap: Option<i64>) -> Result<Self> {
        let f = self.field();
        let n = Self::deg(f);
        let (j, c) = self.single_component().ok_or_else(|| Error::Unsupported("inverse of a mixed λ-element".into()))?;
        let ci = c.inv(cap)?;
        if j == 0 {
            return Ok(Self::from_series(ci));
        }
        // (cλ^j)^{-1} = c^{-1} λ^{n-j} (-θ)^{-1}
        let mt_inv = TruncSeries::from_fq(-f.one()).shift_theta(-1);
        Ok(Self::from_component(ci.mul(&mt_inv), n - j))
    }
}

/// (-θ)^k as an exact series, k may be negative.
pub fn minus_theta_pow(field: Fq, k: i64) -> TruncSeries {
    let sign = if k.rem_euclid(2) == 1 { -field.one() } else { field.one() };
    TruncSeries::from_fq(sign).shift_theta(k)
}

impl fmt::Display for LambdaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(j, c)| match j {
                0 => format!("[{c}]"),
                1 => format!("[{c}]·λ"),
                _ => format!("[{c}]·λ^{j}"),
            })
            .collect();
        if parts.is_empty() {
            return write!(f, "0");
        }
        f.write_str(&parts.join(" + "))
    }
}
impl fmt::Debug for LambdaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
impl Serialize for LambdaElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.comps.serialize(s)
    }
}

impl Ring for LambdaElem {
    fn zero_like(&self) -> Self {
        Self::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Self::one(self.field())
    }
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
        Self::from_series(TruncSeries::from_fq(self.field().from_int(n)))
    }
}

impl FieldLike for LambdaElem {
    fn inv_opt(&self) -> Option<Self> {
        self.inv(None).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    #[test]
    fn lambda_power_relation() {
        for q in [2u32, 3, 4, 5] {
            let f = FieldConfig::builtin(q).unwrap();
            let l = LambdaElem::lambda(f);
            let lhs = l.pow(q as u64 - 1).add(&LambdaElem::from_series(TruncSeries::theta_pow(f, 1)));
            assert!(lhs.is_exact_zero(), "q={q}");
            let prod = l.mul(&l.pow(q as u64 - 2));
            assert_eq!(prod, LambdaElem::from_series(minus_theta_pow(f, 1)));
        }
        let f2 = FieldConfig::builtin(2).unwrap();
        assert_eq!(LambdaElem::lambda(f2).comps().len(), 1);
        assert_eq!(LambdaElem::lambda(f2), LambdaElem::from_series(TruncSeries::theta_pow(f2, 1)));
    }

    #[test]
    fn tau_of_lambda() {
        for q in [3u32, 4, 5] {
            let f = FieldConfig::builtin(q).unwrap();
            let l = LambdaElem::lambda(f);
            assert_eq!(l.tau(1), l.scale(&minus_theta_pow(f, 1)));
            // τ(λ)^{q-1} = τ(λ^{q-1}) = τ(-θ) = -θ^q
            assert_eq!(l.tau(1).pow(q as u64 - 1), LambdaElem::from_series(minus_theta_pow(f, 1).tau(1)));
            // τ is multiplicative on λ-powers
            let x = l.pow(2).add(&LambdaElem::one(f));
            let y = l.add(&LambdaElem::from_series(TruncSeries::theta_pow(f, -1)));
            assert_eq!(x.mul(&y).tau(2), x.tau(2).mul(&y.tau(2)));
        }
    }

    #[test]
    fn valuations_and_inverse() {
        let f = FieldConfig::builtin(4).unwrap();
        let l = LambdaElem::lambda(f);
        assert_eq!(l.valuation_bound(), Some(Ratio::new(-1, 3)));
        let x = l.pow(2).scale(&TruncSeries::one(f).add(&TruncSeries::theta_pow(f, -1)).truncate(10));
        let xi = x.inv(None).unwrap();
        let one = x.mul(&xi).sub(&LambdaElem::one(f));
        assert!(one.is_known_zero());
    }
}
