//! The Carlitz module: factorials D_i, C_a as twisted polynomials, exp_C,
//! the period π̃ and the uniformizer u(z) = 1/e_C(z).

use num_rational::Ratio;

use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::lambda::{minus_theta_pow, LambdaElem};
use crate::matrix::Matrix;
use crate::ratfunc::RatFunc;
use crate::series::TruncSeries;

/// D_i = (θ^{q^i} - θ)·D_{i-1}^q, D_0 = 1.
pub fn carlitz_factorial(field: Fq, i: u32) -> APoly {
    let q = field.q() as u64;
    let theta = APoly::theta(field);
    (1..=i).fold(APoly::one(field), |d, k| theta.pow(q.pow(k)).sub(&theta).mul(&d.pow(q)))
}

/// D_i^{-1} as a series known to index `cap`.
fn factorial_inverse(field: Fq, i: u32, cap: i64) -> TruncSeries {
    let d = TruncSeries::from_apoly(&carlitz_factorial(field, i));
    d.inv(Some(cap)).expect("D_i is a nonzero polynomial")
}

/// Σ_i c_i τ^i with c_i ∈ A.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedPoly {
    pub coeffs: Vec<APoly>,
}

impl TwistedPoly {
    pub fn constant(c: APoly) -> Self {
        TwistedPoly { coeffs: vec![c] }
    }
    /// C_θ = θ + τ.
    pub fn c_theta(field: Fq) -> Self {
        TwistedPoly { coeffs: vec![APoly::theta(field), APoly::one(field)] }
    }
    fn trim(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().is_zero() {
            self.coeffs.pop();
        }
        self
    }
    pub fn add(&self, o: &Self) -> Self {
        let f = self.coeffs[0].field();
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Vec<APoly>, i: usize| v.get(i).cloned().unwrap_or(APoly::zero(f));
        TwistedPoly { coeffs: (0..n).map(|i| get(&self.coeffs, i).add(&get(&o.coeffs, i))).collect() }.trim()
    }
    /// Composition (cτ^i)(c'τ^j) = c·τ^i(c')·τ^{i+j}, τ acting on A by θ ↦ θ^q.
    pub fn compose(&self, o: &Self) -> Self {
        let f = self.coeffs[0].field();
        let q = f.q() as u64;
        let mut out = vec![APoly::zero(f); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let twist = APoly::theta(f).pow(q.pow(i as u32));
            for (j, d) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&c.mul(&d.compose(&twist)));
            }
        }
        TwistedPoly { coeffs: out }.trim()
    }
    /// C_a by Horner's rule in C_θ.
    pub fn carlitz(a: &APoly) -> Self {
        let f = a.field();
        let ct = Self::c_theta(f);
        let mut acc = Self::constant(APoly::zero(f));
        for c in a.coeffs().iter().rev() {
            acc = ct.compose(&acc).add(&Self::constant(APoly::constant(*c)));
        }
        acc
    }
    pub fn apply(&self, m: &LambdaElem) -> LambdaElem {
        let mut acc = LambdaElem::zero(m.field());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&m.tau(i as u32).scale(&TruncSeries::from_apoly(c)));
        }
        acc
    }
}

/// C_θ(m) = θm + τ(m).
pub fn c_theta(m: &LambdaElem) -> LambdaElem {
    m.shift_theta(1).add(&m.tau(1))
}

/// C_a(m) by Horner evaluation, entrywise on a matrix.
pub fn carlitz_action(a: &APoly, m: &LambdaElem) -> LambdaElem {
    let mut acc = LambdaElem::zero(m.field());
    for c in a.coeffs().iter().rev() {
        acc = c_theta(&acc).add(&m.scale(&TruncSeries::from_fq(*c)));
    }
    acc
}
pub fn carlitz_action_matrix(a: &APoly, m: &Matrix<LambdaElem>) -> Matrix<LambdaElem> {
    m.map(m.zero_elem().clone(), |x| carlitz_action(a, x))
}

/// Index i from which q^i(v + i) is strictly increasing.
fn monotone_from(v: Ratio<i64>, q: i64) -> u32 {
    let bound = -v - Ratio::new(q, q - 1);
    let mut i = 0i64;
    while Ratio::from_integer(i) <= bound {
        i += 1;
    }
    i as u32
}

fn ratio_ceil(r: Ratio<i64>) -> i64 {
    r.ceil().to_integer()
}

/// exp_C(f) = Σ D_i^{-1} τ^i(f), summed until the term valuation bound
/// q^i (v(f) + i) is past its minimum and at least `target`. The tail is then
/// bounded by the first discarded term.
pub fn exp_c(f: &LambdaElem, target: i64) -> Result<LambdaElem> {
    let field = f.field();
    let q = field.q() as i64;
    let Some(v) = f.valuation_bound() else { return Ok(f.clone()) };
    let start = monotone_from(v, q);
    let mut acc = LambdaElem::zero(field);
    let mut i = 0u32;
    loop {
        let qi = q.checked_pow(i).ok_or_else(|| Error::InsufficientPrecision("exp_C term index overflow".into()))?;
        let bound = (v + Ratio::from_integer(i as i64)) * qi;
        if i >= start && bound >= Ratio::from_integer(target) {
            break;
        }
        // D_i^{-1} is needed to index target - q^i v(f) (+1 for the λ offset).
        let cap = ratio_ceil(Ratio::from_integer(target) - v * qi) + 2;
        let term = f.tau(i).scale(&factorial_inverse(field, i, cap));
        acc = acc.add(&term);
        i += 1;
        if i > 64 {
            return Err(Error::InsufficientPrecision("exp_C did not reach the target".into()));
        }
    }
    Ok(acc.truncate_val(Ratio::from_integer(target)))
}

pub fn exp_c_matrix(m: &Matrix<LambdaElem>, target: i64) -> Result<Matrix<LambdaElem>> {
    m.try_map(m.zero_elem().clone(), |x| exp_c(x, target))
}

/// U = θ ∏_{i>0} (1 - θ^{1-q^i})^{-1} to valuation `target`, so that π̃ = λ_θ U.
pub fn pitilde_unit(field: Fq, target: i64) -> TruncSeries {
    let q = field.q() as i64;
    let one = TruncSeries::one(field);
    // Relative precision target + 1 gives absolute precision target for U.
    let rel = target + 1;
    let mut acc = one.truncate(rel);
    let mut i = 1;
    while q.pow(i) - 1 < rel {
        let factor = one.sub(&TruncSeries::theta_pow(field, 1 - q.pow(i))).truncate(rel);
        acc = acc.mul(&factor.inv(None).unwrap());
        i += 1;
    }
    acc.shift_theta(1)
}

/// The Carlitz period π̃ = θλ_θ ∏_{i>0}(1 - θ^{1-q^i})^{-1}.
pub fn pitilde(field: Fq, target: i64) -> LambdaElem {
    LambdaElem::from_component(pitilde_unit(field, target + 1), 1).truncate_val(Ratio::from_integer(target))
}

/// e_C(z) = π̃^{-1} exp_C(π̃ z), the exponential of the lattice A, for z
/// with constant coefficients. Written as U^{-1} Σ_i D_i^{-1} (-θ)^{(q^i-1)/(q-1)} τ^i(Uz)
/// so that no λ_θ appears.
pub fn e_c(z: &TruncSeries, target: i64) -> Result<TruncSeries> {
    let field = z.field();
    let q = field.q() as i64;
    let r = z.ram() as i64;
    let Some(vz) = z.valuation() else {
        return Ok(z.clone());
    };
    // Guard for the valuation of z and the final division by U.
    let extra = ratio_ceil(-vz).max(0) + 4;
    let u = pitilde_unit(field, target + extra);
    let w = u.mul(z);
    let vw = w.valuation().ok_or_else(|| Error::InsufficientPrecision("U·z undetermined".into()))?;
    let c = Ratio::new(1, q - 1);
    let inner_target = target - 1;
    let start = monotone_from(vw - c, q);
    let mut acc = TruncSeries::zero(field, z.ram());
    let mut i = 0u32;
    loop {
        let qi = q.pow(i);
        let bound = (vw - c + Ratio::from_integer(i as i64)) * qi + c;
        if i >= start && bound >= Ratio::from_integer(inner_target) {
            break;
        }
        let cap = ratio_ceil(Ratio::from_integer(inner_target) - vw * qi) + 2;
        let term = w
            .tau(i)
            .mul(&minus_theta_pow(field, (qi - 1) / (q - 1)))
            .mul(&factorial_inverse(field, i, cap).with_ram(z.ram()));
        acc = acc.add(&term);
        i += 1;
        if i > 40 {
            return Err(Error::InsufficientPrecision("e_C did not reach the target".into()));
        }
    }
    let acc = acc.truncate(inner_target * r);
    let uinv = u.inv(None)?;
    Ok(acc.mul(&uinv).truncate(target * r))
}

/// u(z) = 1/e_C(z) for z outside K_∞.
pub fn u_eval(z: &TruncSeries, target: i64) -> Result<TruncSeries> {
    if z.ram() != 2 || z.odd_part().is_known_zero() {
        return Err(Error::PointOnBoundary);
    }
    let e = e_c(z, target)?;
    if e.is_known_zero() {
        return Err(Error::InsufficientPrecision("e_C(z) vanishes to precision".into()));
    }
    e.inv(None)
}

/// A scalar in K_s as a λ-element.
pub fn lambda_const(c: RatFunc) -> LambdaElem {
    LambdaElem::from_rf(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apoly::monic_enum;
    use crate::field::FieldConfig;
    use crate::mpoly::MPoly;
    use crate::ring::Ring;

    #[test]
    fn factorials_match_products_of_monics() {
        for q in [2u32, 3, 4, 5] {
            let f = FieldConfig::builtin(q).unwrap();
            assert_eq!(carlitz_factorial(f, 0), APoly::one(f));
            for i in 1..=2 {
                if q == 5 && i == 2 || q == 4 && i == 2 {
                    continue;
                }
                let brute = monic_enum(f, i as usize).fold(APoly::one(f), |a, b| a.mul(&b));
                assert_eq!(carlitz_factorial(f, i), brute, "q={q} i={i}");
            }
            let th = APoly::theta(f);
            assert_eq!(carlitz_factorial(f, 1), th.pow(q as u64).sub(&th));
        }
        // i = 2 for q = 4, 5 as well (q^2 = 16, 25 monics of degree 2).
        for q in [4u32, 5] {
            let f = FieldConfig::builtin(q).unwrap();
            let brute = monic_enum(f, 2).fold(APoly::one(f), |a, b| a.mul(&b));
            assert_eq!(carlitz_factorial(f, 2), brute);
        }
    }

    #[test]
    fn carlitz_is_a_monoid_homomorphism() {
        let f = FieldConfig::builtin(3).unwrap();
        let a = APoly::from_codes(f, &[1, 2, 1]);
        let b = APoly::from_codes(f, &[2, 1]);
        let ca = TwistedPoly::carlitz(&a);
        let cb = TwistedPoly::carlitz(&b);
        assert_eq!(ca.compose(&cb), TwistedPoly::carlitz(&a.mul(&b)));
        assert_eq!(TwistedPoly::carlitz(&APoly::theta(f)), TwistedPoly::c_theta(f));
        let t = RatFunc::var(f, 0);
        let m = LambdaElem::lambda(f).scale(&TruncSeries::constant(t).add(&TruncSeries::theta_pow(f, -1)).truncate(30));
        assert_eq!(ca.apply(&m), carlitz_action(&a, &m));
        let lhs = carlitz_action(&a.mul(&b), &m);
        let rhs = carlitz_action(&a, &carlitz_action(&b, &m));
        assert!(lhs.sub(&rhs).is_known_zero());
        assert_eq!(carlitz_action(&APoly::one(f), &m), m);
    }

    #[test]
    fn exp_kills_the_period() {
        for q in [2u32, 3, 4, 5] {
            let f = FieldConfig::builtin(q).unwrap();
            let pi = pitilde(f, 40);
            assert_eq!(pi.valuation_bound(), Some(Ratio::new(-(q as i64), q as i64 - 1)));
            let e = exp_c(&pi, 30).unwrap();
            assert!(e.is_known_zero(), "q={q}: {e}");
            assert!(e.prec_valuation().unwrap() >= Ratio::from_integer(30));
            assert!(exp_c(&LambdaElem::zero(f), 30).unwrap().is_exact_zero());
        }
    }

    #[test]
    fn pitilde_leading_terms() {
        let f = FieldConfig::builtin(2).unwrap();
        let u12 = pitilde_unit(f, 12).shift_theta(-1);
        let u20 = pitilde_unit(f, 20).shift_theta(-1);
        assert_eq!(u20.truncate(u12.prec()), u12);
        // 1 + θ^{1-q} + ...
        assert!(u12.coeff(0).unwrap().is_one());
        assert!(u12.coeff(1).unwrap().is_one());
    }

    #[test]
    fn exp_intertwines_theta() {
        let f = FieldConfig::builtin(3).unwrap();
        let t = RatFunc::from_poly(MPoly::var(f, 0));
        let x = TruncSeries::constant(t).shift_theta(-1).add(&TruncSeries::theta_pow(f, 2)).truncate(40);
        let m = LambdaElem::lambda(f).scale(&x);
        let lhs = exp_c(&m.shift_theta(1), 30).unwrap();
        let rhs = c_theta(&exp_c(&m, 31).unwrap());
        let d = lhs.sub(&rhs);
        assert!(d.is_known_zero(), "{d}");
    }

    #[test]
    fn e_c_is_a_periodic_and_u_is_small() {
        let f = FieldConfig::builtin(3).unwrap();
        let z = TruncSeries::monomial(RatFunc::one(f), -5, 2);
        let e0 = e_c(&z, 20).unwrap();
        for a in [APoly::one(f), APoly::theta(f), APoly::from_codes(f, &[2, 1, 1])] {
            let za = z.add(&TruncSeries::from_apoly(&a));
            let d = e_c(&za, 20).unwrap().sub(&e0);
            assert!(d.is_known_zero(), "a={a}: {d}");
        }
        let u = u_eval(&z, 20).unwrap();
        assert!(u.valuation().unwrap() > Ratio::from_integer(0));
        assert!(matches!(u_eval(&TruncSeries::theta_pow(f, 2), 20), Err(Error::PointOnBoundary)));
    }
}
