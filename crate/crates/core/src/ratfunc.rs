//! Elements of K_s = F_q(t_1, .., t_s).
//!
//! With at most one variable, fractions are kept reduced with a monic
//! denominator. With several variables reduction is lazy: only constant
//! denominators are normalized, and equality goes through cross-multiplication.

use std::fmt;

use serde::Serialize;

use crate::apoly::APoly;
use crate::field::{Fq, FqElem};
use crate::mpoly::{Mono, MPoly};
use crate::ring::{FieldLike, Ring};

#[derive(Clone)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFunc { num, den };
        r.normalize();
        r
    }
    pub fn from_poly(num: MPoly) -> Self {
        let den = MPoly::one(num.field());
        RatFunc { num, den }
    }
    pub fn zero(field: Fq) -> Self {
        Self::from_poly(MPoly::zero(field))
    }
    pub fn one(field: Fq) -> Self {
        Self::from_poly(MPoly::one(field))
    }
    pub fn constant(c: FqElem) -> Self {
        Self::from_poly(MPoly::constant(c))
    }
    pub fn var(field: Fq, i: usize) -> Self {
        Self::from_poly(MPoly::var(field, i))
    }
    pub fn field(&self) -> Fq {
        self.num.field()
    }
    pub fn num(&self) -> &MPoly {
        &self.num
    }
    pub fn den(&self) -> &MPoly {
        &self.den
    }
    pub fn is_poly(&self) -> bool {
        self.den.constant_value().is_some_and(|c| c.is_one())
    }
    pub fn as_poly(&self) -> Option<&MPoly> {
        self.is_poly().then_some(&self.num)
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn constant_value(&self) -> Option<FqElem> {
        if self.is_poly() {
            self.num.constant_value()
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        let f = self.field();
        if self.num.is_zero() {
            self.den = MPoly::one(f);
            return;
        }
        if let Some(c) = self.den.constant_value() {
            if !c.is_one() {
                self.num = self.num.scale(c.inv().unwrap());
                self.den = MPoly::one(f);
            }
            return;
        }
        // Reduce when numerator and denominator live in one common variable.
        let var = (0..crate::mpoly::MAX_VARS).find(|&i| self.den.uses_var(i)).unwrap();
        if let (Some(n), Some(d)) = (self.num.to_apoly(var), self.den.to_apoly(var)) {
            let g = n.gcd(&d);
            let (n, d) = (n.div_rem(&g).0, d.div_rem(&g).0);
            let c = d.lead().inv().unwrap();
            self.num = MPoly::from_apoly(&n.scale(c), var);
            self.den = MPoly::from_apoly(&d.scale(c), var);
        } else if let Some((m, _)) = self.common_monomial_factor() {
            self.num = self.num.div_exact(&MPoly::term(f.one(), m)).unwrap();
            self.den = self.den.div_exact(&MPoly::term(f.one(), m)).unwrap();
        }
    }

    /// Largest monomial dividing both numerator and denominator, if nontrivial.
    fn common_monomial_factor(&self) -> Option<(Mono, ())> {
        let all = self.num.terms().iter().chain(self.den.terms()).map(|t| t.0);
        let mut mins: Option<Vec<u32>> = None;
        for m in all {
            let e = m.exps();
            mins = Some(match mins {
                None => e,
                Some(prev) => (0..prev.len().max(e.len()))
                    .map(|i| prev.get(i).copied().unwrap_or(0).min(e.get(i).copied().unwrap_or(0)))
                    .collect(),
            });
        }
        let m = Mono::from_exps(&mins?);
        (m != Mono::ONE).then_some((m, ()))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_poly() && o.is_poly() {
            return Self::from_poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_poly() && o.is_poly() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    pub fn scale(&self, c: FqElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.field());
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }
    pub fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self::new(self.den.clone(), self.num.clone()))
    }
    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }
    pub fn pow(&self, e: u64) -> Self {
        self.pow_u(e)
    }
    pub fn frobenius_pow(&self, k: u32) -> Self {
        RatFunc { num: self.num.frobenius_pow(k), den: self.den.frobenius_pow(k) }
    }

    /// Value at a point; `None` when the denominator vanishes there.
    pub fn eval_with(&self, point: &[FqElem], embed: impl Fn(FqElem) -> FqElem + Copy) -> Option<FqElem> {
        let d = self.den.eval_with(point, embed);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_with(point, embed) / d)
    }
    pub fn eval(&self, point: &[FqElem]) -> Option<FqElem> {
        self.eval_with(point, |c| c)
    }
    pub fn subst(&self, images: &[MPoly]) -> Option<Self> {
        let d = self.den.subst(images);
        if d.is_zero() {
            return None;
        }
        Some(Self::new(self.num.subst(images), d))
    }
    pub fn nvars(&self) -> usize {
        self.num.nvars().max(self.den.nvars())
    }
    pub fn uses_var(&self, i: usize) -> bool {
        self.num.uses_var(i) || self.den.uses_var(i)
    }
    pub fn partial_derivative(&self, i: usize) -> Self {
        let n = self.num.partial_derivative(i).mul(&self.den).sub(&self.num.mul(&self.den.partial_derivative(i)));
        Self::new(n, self.den.mul(&self.den))
    }
    /// Univariate view `num/den` in variable `var` when possible.
    pub fn to_apoly_pair(&self, var: usize) -> Option<(APoly, APoly)> {
        Some((self.num.to_apoly(var)?, self.den.to_apoly(var)?))
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.is_poly() {
            return self.num.fmt_with(names);
        }
        format!("({})/({})", self.num.fmt_with(names), self.den.fmt_with(names))
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars();
        f.write_str(&self.fmt_with(&crate::mpoly::default_var_name(n)))
    }
}
impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize)]
struct RatFuncRepr<'a> {
    num: &'a MPoly,
    den: &'a MPoly,
}

/// Encoded as `{num, den}` with sparse polynomial encodings.
impl Serialize for RatFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncRepr { num: &self.num, den: &self.den }.serialize(s)
    }
}

impl Ring for RatFunc {
    fn zero_like(&self) -> Self {
        Self::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Self::one(self.field())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
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
        Self::constant(self.field().from_int(n))
    }
    fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}

impl FieldLike for RatFunc {
    fn inv_opt(&self) -> Option<Self> {
        self.inv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use crate::mpoly::tests::random_mpoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_rf(f: Fq, rng: &mut ChaCha8Rng, nvars: usize) -> RatFunc {
        loop {
            let d = random_mpoly(f, rng, nvars, 2, 3);
            if !d.is_zero() {
                return RatFunc::new(random_mpoly(f, rng, nvars, 2, 3), d);
            }
        }
    }

    #[test]
    fn univariate_fractions_are_reduced() {
        let f = FieldConfig::builtin(3).unwrap();
        let t = MPoly::var(f, 0);
        let one = MPoly::one(f);
        // (t^2 - 1)/(2t + 2) = (t - 1)/2 = 2t + 1
        let r = RatFunc::new(t.mul(&t).sub(&one), t.scale(f.elem(2)).add(&one.scale(f.elem(2))));
        assert!(r.is_poly());
        assert_eq!(r.num(), &t.scale(f.elem(2)).add(&one));
    }

    #[test]
    fn field_laws_randomized() {
        for (q, nv) in [(3u32, 1usize), (2, 2), (5, 2)] {
            let f = FieldConfig::builtin(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            for _ in 0..40 {
                let a = random_rf(f, &mut rng, nv);
                let b = random_rf(f, &mut rng, nv);
                let c = random_rf(f, &mut rng, nv);
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                assert_eq!(a.add(&b).sub(&b), a);
                if let Some(bi) = b.inv() {
                    assert_eq!(a.mul(&b).mul(&bi), a);
                }
                // Equality is transitive through a rescaled representative.
                let k = MPoly::var(f, 0).add(&MPoly::one(f));
                let a2 = RatFunc { num: a.num.mul(&k), den: a.den.mul(&k) };
                assert_eq!(a, a2);
                assert_eq!(a2.add(&c), a.add(&c));
            }
        }
    }
}
