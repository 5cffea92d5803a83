//! Algebra representations σ: A → Mat_d(K_s), determined by ϑ = σ(θ).

use serde::Serialize;

use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::{FieldConfig, Fq, FqElem};
use crate::matrix::Matrix;
use crate::mpoly::MPoly;
use crate::ratfunc::RatFunc;
use crate::ring::Ring;

/// A monic polynomial P = θ^d + P_{d-1}θ^{d-1} + .. + P_0 over K_s.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompanionSpec {
    /// P_0, .., P_{d-1}, 1 (low degree first).
    pub coeffs: Vec<RatFunc>,
}

impl CompanionSpec {
    pub fn new(coeffs: Vec<RatFunc>) -> Result<Self> {
        if coeffs.len() < 2 || !coeffs.last().unwrap().is_one() {
            return Err(Error::NotMonic);
        }
        Ok(CompanionSpec { coeffs })
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraRep {
    pub theta_image: Matrix<RatFunc>,
    pub companion_of: Option<CompanionSpec>,
}

impl AlgebraRep {
    pub fn new(theta_image: Matrix<RatFunc>) -> Self {
        assert!(theta_image.is_square());
        AlgebraRep { theta_image, companion_of: None }
    }
    /// χ_t: the scalar representation a ↦ a(t_{i+1}).
    pub fn chi(field: Fq, var: usize) -> Self {
        Self::new(Matrix::scalar(1, RatFunc::var(field, var)))
    }
    pub fn dim(&self) -> usize {
        self.theta_image.rows()
    }
    pub fn field(&self) -> Fq {
        self.theta_image.zero_elem().field()
    }
    /// σ(a) = a(ϑ).
    pub fn eval(&self, a: &APoly) -> Matrix<RatFunc> {
        sigma_eval(self, a)
    }
    pub fn charpoly(&self) -> Vec<RatFunc> {
        self.theta_image.charpoly()
    }
    /// Number of t-variables occurring in ϑ.
    pub fn nvars(&self) -> usize {
        self.theta_image.entries().iter().map(|c| c.nvars()).max().unwrap_or(0)
    }
}

/// The companion matrix: ones on the superdiagonal, last row (-P_0, .., -P_{d-1}).
pub fn companion_sigma(spec: &CompanionSpec) -> AlgebraRep {
    let d = spec.degree();
    let f = spec.coeffs[0].field();
    let m = Matrix::from_fn(d, d, RatFunc::zero(f), |i, j| {
        if i + 1 == d {
            spec.coeffs[j].neg()
        } else if j == i + 1 {
            RatFunc::one(f)
        } else {
            RatFunc::zero(f)
        }
    });
    AlgebraRep { theta_image: m, companion_of: Some(spec.clone()) }
}

pub fn sigma_eval(rep: &AlgebraRep, a: &APoly) -> Matrix<RatFunc> {
    let n = rep.dim();
    a.eval_in(&rep.theta_image, |c| Matrix::scalar(n, RatFunc::constant(c)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Faithfulness {
    /// The characteristic polynomial has this coefficient (index) outside F_q.
    Faithful { coefficient_index: usize, coefficient: RatFunc },
    /// The characteristic polynomial lies in F_q[x]; its factorization.
    NotFaithful { factors: Vec<(APoly, usize)> },
}

/// σ fails to be injective iff all eigenvalues of ϑ are algebraic over F_q,
/// iff (F_q being algebraically closed in K_s) charpoly(ϑ) ∈ F_q[x].
pub fn is_faithful(rep: &AlgebraRep) -> Faithfulness {
    let cp = rep.charpoly();
    for (i, c) in cp.iter().enumerate() {
        if c.constant_value().is_none() {
            return Faithfulness::Faithful { coefficient_index: i, coefficient: c.clone() };
        }
    }
    let f = rep.field();
    let p = APoly::new(f, cp.iter().map(|c| c.constant_value().unwrap()).collect());
    Faithfulness::NotFaithful { factors: p.factor() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PolyVerdict {
    /// Exhaustive search over all admissible monic factors found none, or a
    /// specialization into a finite field stays irreducible of full degree.
    Irreducible { method: String },
    /// A nontrivial monic factor (coefficients low degree first).
    Reducible { factor: Vec<RatFunc> },
    Unknown { reason: String },
}

/// Univariate polynomial over K_s, coefficients low degree first.
pub type KPoly = Vec<RatFunc>;

fn kpoly_trim(mut p: KPoly) -> KPoly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

/// Remainder of monic division in K_s[x].
pub fn kpoly_rem(a: &KPoly, b: &KPoly) -> KPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lc_inv = b[db].inv().expect("nonzero leading coefficient");
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let c = r[k].mul(&lc_inv);
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                r[k - db + i] = r[k - db + i].sub(&c.mul(bi));
            }
        }
        r.pop();
    }
    kpoly_trim(r)
}

fn exhaustive_budget() -> u128 {
    200_000
}

/// Irreducibility of a monic P ∈ K_s[x].
pub fn poly_irreducible(p: &KPoly) -> PolyVerdict {
    let d = p.len() - 1;
    let f = p[0].field();
    if d <= 1 {
        return PolyVerdict::Irreducible { method: "degree".into() };
    }
    let nv = p.iter().map(|c| c.nvars()).max().unwrap_or(0);
    let polys: Option<Vec<MPoly>> = p.iter().map(|c| c.as_poly().cloned()).collect();
    if let (true, Some(polys)) = (nv <= 1, polys.as_ref()) {
        if let Some(v) = exhaustive_factor_search(f, polys, d) {
            return v;
        }
    }
    if let Some(m) = specialization_certificate(f, p, nv) {
        return PolyVerdict::Irreducible { method: m };
    }
    PolyVerdict::Unknown { reason: "no irreducible specialization found and factor search too large".into() }
}

/// Monic factors of a monic P ∈ F_q[t][x] have coefficients in F_q[t] with
/// deg e_j <= j·B, B = max_i deg(P_i)/(d - i) (root size bound at t = ∞).
fn exhaustive_factor_search(f: Fq, p: &[MPoly], d: usize) -> Option<PolyVerdict> {
    let degs: Vec<i64> = p.iter().map(|c| c.total_degree().map_or(-1, |x| x as i64)).collect();
    let b = (0..d).filter(|&i| degs[i] >= 0).map(|i| num_rational::Ratio::new(degs[i], (d - i) as i64)).max()?;
    let q = f.q() as u128;
    // Count candidates first.
    let mut total: u128 = 0;
    for k in 1..=d / 2 {
        let mut cnt: u128 = 1;
        for j in 0..k {
            let db = (b * (k - j) as i64).floor().to_integer() as u32;
            cnt = cnt.saturating_mul(q.saturating_pow(db + 1));
        }
        total = total.saturating_add(cnt);
    }
    if total > exhaustive_budget() {
        return None;
    }
    let target: KPoly = p.iter().map(|c| RatFunc::from_poly(c.clone())).collect();
    for k in 1..=d / 2 {
        let bounds: Vec<u32> = (0..k).map(|j| (b * (k - j) as i64).floor().to_integer() as u32).collect();
        let counts: Vec<u128> = bounds.iter().map(|&db| q.pow(db + 1)).collect();
        let n: u128 = counts.iter().product();
        for code in 0..n {
            let mut c = code;
            let mut g: KPoly = Vec::with_capacity(k + 1);
            for (j, &db) in bounds.iter().enumerate() {
                let mut v = c % counts[j];
                c /= counts[j];
                let mut coeffs = vec![];
                for _ in 0..=db {
                    coeffs.push(f.elem((v % q) as u32));
                    v /= q;
                }
                g.push(RatFunc::from_poly(MPoly::from_apoly(&APoly::new(f, coeffs), 0)));
            }
            g.push(RatFunc::one(f));
            let r = kpoly_rem(&target, &g);
            if r.iter().all(|x| x.is_zero()) {
                return Some(PolyVerdict::Reducible { factor: g });
            }
        }
    }
    Some(PolyVerdict::Irreducible { method: format!("exhaustive search over {total} bounded monic factors") })
}

/// Specialize the t-variables at points of F_{q^k}; an irreducible
/// specialization of the same degree proves irreducibility over K_s.
fn specialization_certificate(f: Fq, p: &KPoly, nv: usize) -> Option<String> {
    for k in 1..=3u32 {
        let Ok(big) = FieldConfig::get(f.p(), f.e() * k) else { continue };
        if big.q() > 1024 {
            break;
        }
        let emb = f.embedding_into(big).ok()?;
        let pts: Vec<Vec<FqElem>> = specialization_points(big, nv, 64);
        for pt in pts {
            let vals: Option<Vec<FqElem>> = p.iter().map(|c| c.eval_with(&pt, |x| emb.apply(x))).collect();
            let Some(vals) = vals else { continue };
            let sp = APoly::new(big, vals);
            if sp.degree() != Some(p.len() - 1) {
                continue;
            }
            if sp.is_irreducible() {
                return Some(format!("specialization t = {pt:?} over F_{} is irreducible", big.q()));
            }
        }
    }
    None
}

/// Deterministic list of up to `limit` points of big^nv.
pub fn specialization_points(big: Fq, nv: usize, limit: usize) -> Vec<Vec<FqElem>> {
    let q = big.q() as usize;
    let total = q.checked_pow(nv as u32).unwrap_or(usize::MAX).min(limit);
    // Walk a stride through the grid so that different coordinates vary.
    (0..total)
        .map(|idx| {
            let mut c = idx * 7919 % q.pow(nv as u32).max(1);
            (0..nv)
                .map(|_| {
                    let v = c % q;
                    c /= q;
                    big.elem(v as u32)
                })
                .collect()
        })
        .collect()
}

/// σ is irreducible iff charpoly(ϑ) is irreducible over K_s.
pub fn is_irreducible_sigma(rep: &AlgebraRep) -> PolyVerdict {
    poly_irreducible(&rep.charpoly())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::MPoly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(f: Fq) -> RatFunc {
        RatFunc::var(f, 0)
    }
    fn c(f: Fq, v: i64) -> RatFunc {
        RatFunc::constant(f.from_int(v))
    }
    fn x2_minus(f: Fq, a: RatFunc) -> CompanionSpec {
        CompanionSpec::new(vec![a.neg(), c(f, 0), c(f, 1)]).unwrap()
    }

    #[test]
    fn companion_shapes_and_reduction_identity() {
        let f = FieldConfig::builtin(3).unwrap();
        let lin = companion_sigma(&CompanionSpec::new(vec![c(f, 2).neg(), c(f, 1)]).unwrap());
        assert_eq!(lin.theta_image.get(0, 0), &c(f, 2));
        let p1 = t(f).add(&c(f, 1));
        let p0 = t(f).mul(&t(f));
        let s = companion_sigma(&CompanionSpec::new(vec![p0.clone(), p1.clone(), c(f, 1)]).unwrap());
        assert_eq!(s.theta_image.row(0), &[c(f, 0), c(f, 1)]);
        assert_eq!(s.theta_image.row(1), &[p0.neg(), p1.neg()]);
        assert_eq!(CompanionSpec::new(vec![c(f, 1), c(f, 2)]), Err(Error::NotMonic));

        // σ_P(a)·w ≡ a·w mod P with w = (1, θ): check via θ ↦ root substitution,
        // i.e. the identity holds in K_s[θ]/(P).
        let sp = x2_minus(f, t(f));
        let rep = companion_sigma(&sp);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = APoly::new(f, (0..5).map(|_| f.elem(rng.gen_range(0..3))).collect());
            let m = rep.eval(&a);
            // a(θ) mod (θ^2 - t) = r0 + r1 θ; a·w = (r0 + r1θ, t r1 + r0 θ).
            let at: KPoly = a.coeffs().iter().map(|&x| RatFunc::constant(x)).collect();
            let r = if at.is_empty() { vec![] } else { kpoly_rem(&at, &sp.coeffs) };
            let r0 = r.first().cloned().unwrap_or(c(f, 0));
            let r1 = r.get(1).cloned().unwrap_or(c(f, 0));
            assert_eq!(m.row(0), &[r0.clone(), r1.clone()]);
            assert_eq!(m.row(1), &[t(f).mul(&r1), r0]);
        }
    }

    #[test]
    fn sigma_is_a_homomorphism() {
        let f = FieldConfig::builtin(5).unwrap();
        let sp = CompanionSpec::new(vec![c(f, -1), t(f).neg(), c(f, 1)]).unwrap();
        let rep = companion_sigma(&sp);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = APoly::new(f, (0..4).map(|_| f.elem(rng.gen_range(0..5))).collect());
            let b = APoly::new(f, (0..4).map(|_| f.elem(rng.gen_range(0..5))).collect());
            assert_eq!(rep.eval(&a).mul(&rep.eval(&b)), rep.eval(&a.mul(&b)));
            assert_eq!(rep.eval(&a).add(&rep.eval(&b)), rep.eval(&a.add(&b)));
        }
        assert!(rep.eval(&APoly::one(f)).is_identity());
        // Cayley–Hamilton cross-check: θ^2 + θ evaluated directly vs reduced mod charpoly.
        let a = APoly::from_codes(f, &[0, 1, 1]);
        let direct = rep.eval(&a);
        let th = &rep.theta_image;
        assert_eq!(direct, th.mul(th).add(th));
    }

    #[test]
    fn faithfulness_by_coefficients() {
        let f = FieldConfig::builtin(3).unwrap();
        assert!(matches!(is_faithful(&companion_sigma(&x2_minus(f, t(f)))), Faithfulness::Faithful { .. }));
        let cst = AlgebraRep::new(Matrix::from_rows(vec![vec![c(f, 1), c(f, 1)], vec![c(f, 0), c(f, 2)]]));
        assert!(matches!(is_faithful(&cst), Faithfulness::NotFaithful { .. }));
        let sp = CompanionSpec::new(vec![c(f, -1), t(f).neg(), c(f, 1)]).unwrap();
        assert!(matches!(is_faithful(&companion_sigma(&sp)), Faithfulness::Faithful { .. }));
    }

    #[test]
    fn irreducibility_of_companions() {
        for q in [3u32, 5, 2] {
            let f = FieldConfig::builtin(q).unwrap();
            let v = is_irreducible_sigma(&companion_sigma(&x2_minus(f, t(f))));
            assert!(matches!(v, PolyVerdict::Irreducible { .. }), "q={q}: {v:?}");
            let v = is_irreducible_sigma(&companion_sigma(&x2_minus(f, t(f).mul(&t(f)))));
            match v {
                PolyVerdict::Reducible { factor } => {
                    let sp = x2_minus(f, t(f).mul(&t(f)));
                    assert!(kpoly_rem(&sp.coeffs, &factor).iter().all(|x| x.is_zero()));
                }
                other => panic!("q={q}: {other:?}"),
            }
        }
        // Two variables: one-sided specialization.
        let f = FieldConfig::builtin(3).unwrap();
        let t2 = RatFunc::from_poly(MPoly::var(f, 1));
        let v = poly_irreducible(&vec![t(f).mul(&t2).neg(), t2.neg(), c(f, 1)]);
        assert!(matches!(v, PolyVerdict::Irreducible { .. }), "{v:?}");
    }
}
