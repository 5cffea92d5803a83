//! Irreducibility of matrix algebras over finite fields (Norton's test in
//! the Holt–Rees form) and of representations of Γ over K_s by specialization.

use std::collections::{HashSet, VecDeque};

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algrep::{poly_irreducible, specialization_points, PolyVerdict};
use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::{FieldConfig, Fq, FqElem};
use crate::gamma::{Functor, GammaElem, GammaRep, Mat2};
use crate::matrix::Matrix;
use crate::ratfunc::RatFunc;
use crate::ring::FieldLike;

/// Span of the orbit of `seeds` under `gens` (vectors as columns), as the
/// rows of an echelon basis.
pub fn spin<T: FieldLike>(seeds: &[Vec<T>], gens: &[Matrix<T>]) -> Matrix<T> {
    let zero = gens[0].zero_elem().clone();
    let n = gens[0].rows();
    let mut basis = Matrix::zeros(0, n, zero.clone());
    let mut queue: VecDeque<Vec<T>> = seeds.iter().cloned().collect();
    while let Some(v) = queue.pop_front() {
        let cand = basis.vstack(&Matrix::from_vec(1, n, v.clone(), zero.clone()));
        let rs = cand.row_space();
        if rs.rows() == basis.rows() {
            continue;
        }
        basis = rs;
        if basis.rows() == n {
            break;
        }
        for g in gens {
            queue.push_back(g.mul_vec(&v));
        }
    }
    basis
}

/// Every g·w (w a row of `basis`) lies in the row space of `basis`.
pub fn is_invariant<T: FieldLike>(basis: &Matrix<T>, gens: &[Matrix<T>]) -> bool {
    let r = basis.rank();
    let n = basis.cols();
    gens.iter().all(|g| {
        (0..basis.rows()).all(|i| {
            let img = g.mul_vec(basis.row(i));
            basis.vstack(&Matrix::from_vec(1, n, img, basis.zero_elem().clone())).rank() == r
        })
    })
}

/// Annihilator {x : u·x = 0 for every row u}, as rows.
fn annihilator<T: FieldLike>(rows: &Matrix<T>) -> Matrix<T> {
    let ns = rows.nullspace();
    let n = rows.cols();
    let zero = rows.zero_elem().clone();
    let data: Vec<T> = ns.into_iter().flatten().collect();
    Matrix::from_vec(data.len() / n.max(1), n, data, zero)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MeataxeVerdict {
    /// Norton: for a random algebra element X and an irreducible factor f of
    /// its characteristic polynomial with nullity(f(X)) = deg f, some v in
    /// ker f(X) spins to the whole space and some w in ker f(X)^T does too.
    Irreducible { factor: APoly, nullity: usize, attempts: usize },
    /// A proper nonzero invariant subspace (rows), verified by closure.
    Reducible { basis: Matrix<FqElem>, verified: bool },
}

impl MeataxeVerdict {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, MeataxeVerdict::Irreducible { .. })
    }
}

fn charpoly_apoly(m: &Matrix<FqElem>) -> APoly {
    let f = m.zero_elem().field();
    APoly::new(f, m.charpoly())
}

pub fn meataxe(gens: &[Matrix<FqElem>], rng: &mut ChaCha8Rng, budget: usize) -> Result<MeataxeVerdict> {
    let n = gens[0].rows();
    let f = gens[0].zero_elem().field();
    if n <= 1 {
        return Ok(MeataxeVerdict::Irreducible { factor: APoly::theta(f), nullity: n, attempts: 0 });
    }
    let transposed: Vec<Matrix<FqElem>> = gens.iter().map(|g| g.transpose()).collect();
    let mut pool: Vec<Matrix<FqElem>> = gens.to_vec();
    let reducible = |basis: Matrix<FqElem>| {
        let verified = basis.rows() > 0 && basis.rows() < n && is_invariant(&basis, gens);
        MeataxeVerdict::Reducible { basis, verified }
    };
    for attempt in 1..=budget {
        let i = rng.gen_range(0..pool.len());
        let j = rng.gen_range(0..pool.len());
        let prod = pool[i].mul(&pool[j]);
        pool.push(prod);
        let mut x = Matrix::zeros(n, n, f.zero());
        for m in &pool {
            let c = f.elem(rng.gen_range(0..f.q()));
            if !c.is_zero() {
                x = x.add(&m.scale(&c));
            }
        }
        let mut factors: Vec<APoly> = charpoly_apoly(&x).factor().into_iter().map(|(p, _)| p).collect();
        factors.sort();
        for fac in factors {
            let ev = fac.eval_in(&x, |c| Matrix::scalar(n, c));
            let ker = ev.nullspace();
            let Some(v) = ker.first() else { continue };
            let w = spin(std::slice::from_ref(v), gens);
            if w.rows() < n {
                return Ok(reducible(w));
            }
            let kt = ev.transpose().nullspace();
            let wt = spin(&kt[..1], &transposed);
            if wt.rows() < n {
                return Ok(reducible(annihilator(&wt)));
            }
            if ker.len() == fac.degree().unwrap() {
                return Ok(MeataxeVerdict::Irreducible { factor: fac, nullity: ker.len(), attempts: attempt });
            }
        }
    }
    Err(Error::RandomnessExhausted(budget))
}

/// γ ↦ γ(ζ): entrywise evaluation of θ at ζ ∈ F_{q'}.
pub fn ev_zeta(g: &GammaElem, zeta: FqElem) -> Mat2<FqElem> {
    let big = zeta.field();
    let emb = g.a.field().embedding_into(big).expect("base field embeds");
    g.map(|a| a.coeffs().iter().rev().fold(big.zero(), |acc, c| acc * zeta + emb.apply(*c)))
}

/// Order of the group generated by invertible matrices, by breadth-first
/// closure (None if it exceeds `limit`).
pub fn group_closure_order(gens: &[Matrix<FqElem>], limit: usize) -> Option<usize> {
    let key = |m: &Matrix<FqElem>| m.entries().iter().map(|x| x.code()).collect::<Vec<u32>>();
    let n = gens[0].rows();
    let id = Matrix::identity(n, gens[0].zero_elem().field().zero());
    let mut seen: HashSet<Vec<u32>> = HashSet::from([key(&id)]);
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for g in gens {
            let h = m.mul(g);
            if seen.insert(key(&h)) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(h);
            }
        }
    }
    Some(seen.len())
}

/// Generators of ρ̄_l: ρ^I_l on E₁₂(x), E₂₁(x), x over an F_p-basis of F_{q'}.
pub fn rho_bar_generators(big: Fq, l: u64) -> Vec<Matrix<FqElem>> {
    let fun = Functor::Digits(l);
    let (z, o) = (big.zero(), big.one());
    (0..big.e())
        .flat_map(|i| {
            let x = big.primitive().pow(i as u64);
            [Mat2::new(o, x, z, o), Mat2::new(o, z, x, o)]
        })
        .map(|g| fun.apply(&g))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GenericVerdict {
    /// Irreducible at a specialization t = point over F_{q'}; irreducibility
    /// being an open condition, the representation over K_s is irreducible.
    Irreducible { big_q: u32, point: Vec<String>, samples: usize },
    /// A K_s-subspace invariant under every sample element (rows).
    Reducible { basis: Matrix<RatFunc>, verified_fresh: bool },
    Unknown { reason: String },
}

#[derive(Clone, Copy, Debug)]
pub struct GenericOptions {
    /// E₁₂(cθ^k), E₂₁(cθ^k) for k <= kmax.
    pub kmax: usize,
    pub points: usize,
    pub seed: u64,
    pub budget: usize,
}

impl Default for GenericOptions {
    fn default() -> Self {
        GenericOptions { kmax: 4, points: 12, seed: 1, budget: 200 }
    }
}

/// Smallest F_{q'} ⊇ F_q with q' > max(l, q).
pub fn specialization_field(f: Fq, weight: u64) -> Result<Fq> {
    let mut k = 1;
    loop {
        let e = f.e() * k;
        let q = (f.p() as u64).pow(e);
        if q > 1024 {
            return Err(Error::Unsupported(format!("no specialization field below 1024 for weight {weight}")));
        }
        if q > weight.max(f.q() as u64) {
            return FieldConfig::get(f.p(), e);
        }
        k += 1;
    }
}

pub fn generic_irreducible(rep: &GammaRep, f: Fq, opts: GenericOptions) -> Result<GenericVerdict> {
    let sample0 = GammaElem::sample_family(f, opts.kmax);
    let images: Vec<Matrix<RatFunc>> = sample0.iter().map(|g| rep.apply(g)).collect();
    let nv = images.iter().flat_map(|m| m.entries().iter().map(|c| c.nvars())).max().unwrap_or(0);
    let big = specialization_field(f, rep.max_weight())?;
    let emb = f.embedding_into(big)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pts = specialization_points(big, nv, opts.points * 8);
    // Prefer points with pairwise distinct, non-F_q coordinates.
    pts.retain(|pt| pt.iter().all(|x| x.pow(f.q() as u64) != *x));
    for pt in pts.into_iter().take(opts.points) {
        let spec: Option<Vec<Matrix<FqElem>>> = images
            .iter()
            .map(|m| m.try_map(big.zero(), |c| c.eval_with(&pt, |x| emb.apply(x)).ok_or(())).ok())
            .collect();
        let Some(spec) = spec else { continue };
        match meataxe(&spec, &mut rng, opts.budget) {
            Ok(v) if v.is_irreducible() => {
                return Ok(GenericVerdict::Irreducible { big_q: big.q(), point: pt.iter().map(|x| x.to_string()).collect(), samples: spec.len() });
            }
            _ => continue,
        }
    }
    if let Some(basis) = symbolic_invariant_subspace(&images, &mut rng) {
        let fresh: Vec<Matrix<RatFunc>> = (0..5).map(|_| rep.apply(&GammaElem::random(f, &mut rng, 2))).collect();
        let verified_fresh = is_invariant(&basis, &fresh);
        return Ok(GenericVerdict::Reducible { basis, verified_fresh });
    }
    Ok(GenericVerdict::Unknown { reason: "no irreducible specialization and no symbolic invariant subspace found".into() })
}

/// Over K_s: kernels of factors of the characteristic polynomial of random
/// F_q-combinations of the images, spun under the images.
fn symbolic_invariant_subspace(images: &[Matrix<RatFunc>], rng: &mut ChaCha8Rng) -> Option<Matrix<RatFunc>> {
    let n = images[0].rows();
    let f = images[0].zero_elem().field();
    let transposed: Vec<Matrix<RatFunc>> = images.iter().map(|g| g.transpose()).collect();
    for _ in 0..6 {
        let mut x = Matrix::zeros(n, n, RatFunc::zero(f));
        for m in images {
            let c = f.elem(rng.gen_range(0..f.q()));
            if !c.is_zero() {
                x = x.add(&m.scale(&RatFunc::constant(c)));
            }
        }
        let cp = x.charpoly();
        let PolyVerdict::Reducible { factor } = poly_irreducible(&cp) else { continue };
        let ev = factor.iter().rev().fold(Matrix::zeros(n, n, RatFunc::zero(f)), |acc, c| acc.mul(&x).add(&Matrix::scalar(n, c.clone())));
        if let Some(v) = ev.nullspace().first() {
            let w = spin(std::slice::from_ref(v), images);
            if w.rows() > 0 && w.rows() < n {
                return Some(w);
            }
        }
        if let Some(v) = ev.transpose().nullspace().first() {
            let wt = spin(std::slice::from_ref(v), &transposed);
            if wt.rows() > 0 && wt.rows() < n {
                return Some(annihilator(&wt));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algrep::{companion_sigma, CompanionSpec};
    use crate::ring::Ring;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn evaluation_generates_sl2() {
        for (p, order) in [(2u32, 6usize), (3, 24)] {
            let f = FieldConfig::builtin(p).unwrap();
            let zeta = f.one();
            let gens: Vec<Matrix<FqElem>> = [GammaElem::e12(APoly::one(f)), GammaElem::e21(APoly::one(f))]
                .iter()
                .map(|g| ev_zeta(g, zeta).to_matrix())
                .collect();
            assert_eq!(group_closure_order(&gens, 10_000), Some(order));
        }
        // θ ↦ ζ generating F_4 over F_2: E₁₂(θ), E₂₁(θ), E₁₂(1), E₂₁(1) give SL₂(F_4).
        let f = FieldConfig::builtin(2).unwrap();
        let big = FieldConfig::builtin(4).unwrap();
        let th = APoly::theta(f);
        let gens: Vec<Matrix<FqElem>> = [GammaElem::e12(th.clone()), GammaElem::e21(th), GammaElem::e12(APoly::one(f)), GammaElem::e21(APoly::one(f))]
            .iter()
            .map(|g| ev_zeta(g, big.primitive()).to_matrix())
            .collect();
        assert_eq!(group_closure_order(&gens, 10_000), Some(60));
    }

    #[test]
    fn rho_bar_over_f4() {
        let big = FieldConfig::builtin(4).unwrap();
        let v = meataxe(&rho_bar_generators(big, 3), &mut rng(), 100).unwrap();
        assert!(v.is_irreducible(), "{v:?}");
        // l = 4 = q′: a single digit at position 2, and Frobenius² is trivial on F_4.
        assert!(meataxe(&rho_bar_generators(big, 4), &mut rng(), 100).unwrap().is_irreducible());
        // l = 3 over F_2: ρ₁ ⊗ ρ₁ contains det.
        let f2 = FieldConfig::builtin(2).unwrap();
        match meataxe(&rho_bar_generators(f2, 3), &mut rng(), 100).unwrap() {
            MeataxeVerdict::Reducible { basis, verified } => {
                assert!(verified);
                assert!(basis.rows() > 0 && basis.rows() < 4);
            }
            v => panic!("{v:?}"),
        }
        let one = vec![Matrix::identity(1, big.zero())];
        assert!(meataxe(&one, &mut rng(), 5).unwrap().is_irreducible());
    }

    #[test]
    fn reducible_example_has_invariant_subspace() {
        // Sym² over F_2 contains the Frobenius twist: span of X², Y².
        let big = FieldConfig::builtin(4).unwrap();
        let fun = Functor::Sym(2);
        let (z, o) = (big.zero(), big.one());
        let x = big.primitive();
        let gens: Vec<_> = [Mat2::new(o, x, z, o), Mat2::new(o, z, x, o), Mat2::new(o, o, z, o)].iter().map(|g| fun.apply(g)).collect();
        match meataxe(&gens, &mut rng(), 100).unwrap() {
            MeataxeVerdict::Reducible { verified, .. } => assert!(verified),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn generic_verdicts() {
        let f2 = FieldConfig::builtin(2).unwrap();
        let opts = GenericOptions { kmax: 2, points: 6, ..Default::default() };
        let v = generic_irreducible(&GammaRep::digits_t(0, 3), f2, opts).unwrap();
        assert!(matches!(v, GenericVerdict::Irreducible { .. }), "{v:?}");
        let v = generic_irreducible(&GammaRep::tensor_ii(&[1, 1]), f2, opts).unwrap();
        assert!(matches!(v, GenericVerdict::Irreducible { .. }), "{v:?}");
        let f3 = FieldConfig::builtin(3).unwrap();
        let t = RatFunc::var(f3, 0);
        let spec = CompanionSpec::new(vec![t.mul_ref(&t).neg(), RatFunc::zero(f3), RatFunc::one(f3)]).unwrap();
        let v = generic_irreducible(&GammaRep::rho_sigma(companion_sigma(&spec)), f3, opts).unwrap();
        match v {
            GenericVerdict::Reducible { basis, verified_fresh } => {
                assert!(verified_fresh);
                assert_eq!(basis.rows(), 2);
            }
            v => panic!("{v:?}"),
        }
    }
}
