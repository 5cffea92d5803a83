//! Vectorial Poincaré and Eisenstein series evaluated at points of Ω in the
//! ramified slice F_q((θ^{-1/2})), with the checks built on them.

use num_rational::Ratio;
use serde::Serialize;

use crate::apoly::{poly_enum, APoly};
use crate::carlitz::u_eval;
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::algrep::AlgebraRep;
use crate::combinat::{binom_mod_p, digits_base_p};
use crate::gamma::{rho_digits, Functor, GammaElem, GammaRep, Mat2};
use crate::lfunc::{L_value, SemiCharacter};
use crate::matrix::Matrix;
use crate::ratfunc::RatFunc;
use crate::report::{residual_val_matrix, residual_val_series, CheckReport, Status, Val};
use crate::series::TruncSeries;

/// A point z ∈ Ω, z = Σ c_n θ^{-n/2} with a nonzero odd part.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaPoint {
    z: TruncSeries,
}

impl OmegaPoint {
    pub fn new(z: TruncSeries) -> Result<Self> {
        let z = if z.ram() == 1 { z.with_ram(2) } else { z };
        if z.ram() != 2 || z.odd_part().is_known_zero() {
            return Err(Error::PointOnBoundary);
        }
        Ok(OmegaPoint { z })
    }
    /// θ^{k/2} for odd k.
    pub fn theta_half(field: Fq, k: i64) -> Result<Self> {
        Self::new(TruncSeries::monomial(RatFunc::one(field), -k, 2))
    }
    pub fn series(&self) -> &TruncSeries {
        &self.z
    }
    pub fn field(&self) -> Fq {
        self.z.field()
    }
    /// v(z), so |z| = q^{-v(z)}.
    pub fn valuation(&self) -> Ratio<i64> {
        self.z.valuation().expect("nonzero point")
    }
    /// v_ℑ(z) with |z|_ℑ = inf_{λ ∈ K_∞} |z - λ| = q^{-v_ℑ(z)}: the valuation
    /// of the odd part.
    pub fn imag_valuation(&self) -> Ratio<i64> {
        self.z.odd_part().valuation().expect("odd part is nonzero")
    }
}

/// A coset Hδ of H = {(u b; 0 1)} in Γ: the bottom row (c, d), coprime,
/// with the canonical completion (a b; c d) of determinant 1, deg a < deg c.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetRep {
    pub a: APoly,
    pub b: APoly,
    pub c: APoly,
    pub d: APoly,
}

impl CosetRep {
    pub fn complete(c: APoly, d: APoly) -> Option<Self> {
        let f = c.field();
        if c.is_zero() {
            let di = d.is_constant().then(|| d.lead().inv()).flatten()?;
            return Some(CosetRep { a: APoly::constant(di), b: APoly::zero(f), c, d });
        }
        let (g, u, v) = c.xgcd(&d);
        if g.degree() != Some(0) {
            return None;
        }
        // u c + v d = 1, so (a, b) = (v, -u); then reduce a modulo c.
        let (k, a) = v.div_rem(&c);
        let b = u.neg().sub(&k.mul(&d));
        Some(CosetRep { a, b, c, d })
    }
    pub fn degree(&self) -> usize {
        self.c.degree().unwrap_or(0).max(self.d.degree().unwrap_or(0))
    }
    pub fn elem(&self) -> GammaElem {
        Mat2::new(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }
}

/// All cosets with max(deg c, deg d) <= cutoff, by degree and then
/// lexicographically in (c, d).
pub fn coset_enum(field: Fq, cutoff: usize) -> Vec<CosetRep> {
    let polys: Vec<APoly> = poly_enum(field, cutoff + 1).collect();
    let mut out = vec![];
    for c in &polys {
        for d in &polys {
            if let Some(r) = CosetRep::complete(c.clone(), d.clone()) {
                out.push(r);
            }
        }
    }
    out.sort_by_key(|r| r.degree());
    out
}

fn lift(a: &APoly) -> TruncSeries {
    TruncSeries::from_apoly(a).with_ram(2)
}

/// J_γ(z) = cz + d.
pub fn automorphy_factor(g: &GammaElem, z: &OmegaPoint) -> TruncSeries {
    lift(&g.c).mul(z.series()).add(&lift(&g.d))
}

/// (γ(z), J_γ(z)), γ(z) known to index `cap` (θ^{-cap/2}).
pub fn mobius_and_factor(g: &GammaElem, z: &OmegaPoint, cap: i64) -> Result<(OmegaPoint, TruncSeries)> {
    let j = automorphy_factor(g, z);
    let num = lift(&g.a).mul(z.series()).add(&lift(&g.b));
    let gz = num.div(&j, Some(cap))?.truncate(cap);
    Ok((OmegaPoint::new(gz)?, j))
}

/// ρ(h) = (* *; 0 I_L) for every h in {(u b; 0 1): u ∈ F_q^×, b ∈ {0, 1, θ, .., θ^kmax}}.
pub fn normal_depth(rep: &GammaRep, field: Fq, depth: usize, kmax: usize) -> bool {
    let mut bs = vec![APoly::zero(field)];
    bs.extend((0..=kmax).map(|k| APoly::monomial(field.one(), k)));
    field.nonzero_elements().all(|u| {
        bs.iter().all(|b| {
            let h = Mat2::new(APoly::constant(u), b.clone(), APoly::zero(field), APoly::one(field));
            let m = rep.apply(&h);
            let n = m.rows();
            depth <= n
                && (n - depth..n).all(|i| {
                    (0..n).all(|j| {
                        let want = if j + depth >= n && i == j { RatFunc::one(field) } else { RatFunc::zero(field) };
                        *m.get(i, j) == want
                    })
                })
        })
    })
}

fn functor_weight(f: &Functor, p: i64) -> i64 {
    match f {
        Functor::Tautological => 1,
        Functor::Sym(r) => *r as i64,
        Functor::Star(l) | Functor::Digits(l) => *l as i64,
        Functor::FrobeniusTwist(i, inner) => p.pow(*i) * functor_weight(inner, p),
        Functor::Tensor(fs) => fs.iter().map(|g| functor_weight(g, p)).sum(),
    }
}

/// k with ρ(μI) = μ^k I for μ ∈ F_q^×.
pub fn central_exponent(rep: &GammaRep, p: i64) -> i64 {
    match rep {
        GammaRep::Chi { functor, .. } => functor_weight(functor, p),
        GammaRep::Sigma(_) => 1,
        GammaRep::Tensor(rs) => rs.iter().map(|r| central_exponent(r, p)).sum(),
        GammaRep::DetTwist { m, inner } => central_exponent(inner, p) - 2 * m,
    }
}

/// The F_q^×-orbit sums of the coset terms cancel exactly unless
/// w - 2m ≡ k (mod q - 1).
pub fn vanishing_class(rep: &GammaRep, field: Fq, w: u32, m: u32) -> bool {
    let q1 = field.q() as i64 - 1;
    let k = central_exponent(rep, field.p() as i64);
    (w as i64 - 2 * m as i64 - k).rem_euclid(q1) != 0
}

/// κ = Σ_{μ ∈ F_q^×} μ^{k-w}: the coefficient of (0, .., 0, I_L) in the
/// sum of the cosets with c = 0.
pub fn kappa(rep: &GammaRep, field: Fq, w: u32) -> FqElem {
    let k = central_exponent(rep, field.p() as i64) - w as i64;
    let q1 = field.q() as i64 - 1;
    field.nonzero_elements().fold(field.zero(), |acc, mu| acc + mu.pow(k.rem_euclid(q1) as u64))
}

/// The rows of ρ(δ) kept in 𝓔: the last L.
pub fn bottom_rows(n: usize, depth: usize) -> Vec<usize> {
    (n - depth..n).collect()
}

/// Rows of ⊗_{i<s} ρ_{σ_i} (each of dimension 2d) whose index lies in the
/// bottom half of every factor.
pub fn tensor_bottom_rows(d: usize, s: usize) -> Vec<usize> {
    let n = (2 * d).pow(s as u32);
    (0..n)
        .filter(|&i| {
            let mut x = i;
            (0..s).all(|_| {
                let ok = x % (2 * d) >= d;
                x /= 2 * d;
                ok
            })
        })
        .collect()
}

/// Every omitted coset term (max(deg c, deg d) > cutoff) of 𝓔_{w,0,ρ}(z) has
/// valuation at least w(D + 1 + min(0, -v_ℑ, v(z) - v_ℑ)).
pub fn tail_bound(z: &OmegaPoint, w: u32, cutoff: usize) -> Ratio<i64> {
    let vi = z.imag_valuation();
    let zero = Ratio::from_integer(0);
    let slack = zero.min(-vi).min(z.valuation() - vi);
    (Ratio::from_integer(cutoff as i64 + 1) + slack) * w as i64
}

fn ratio_idx(v: Ratio<i64>) -> i64 {
    (v * 2).ceil().to_integer()
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesEval {
    pub value: Matrix<TruncSeries>,
    pub cutoff: usize,
    /// Valuation of the partial sum at cutoff k minus the one at k - 1, for k = 1..=cutoff.
    pub deltas: Vec<Val>,
    /// Lower bound on the valuation of every omitted term (m = 0).
    pub tail_bound: Option<Val>,
    pub terms: usize,
}

/// f_δ(z) = J_δ(z)^{-w} u(δ(z))^m ρ(δ)_rows (det δ = 1), known to index `cap`.
fn coset_term(rep: &GammaRep, rows: &[usize], w: u32, m: u32, z: &OmegaPoint, cos: &CosetRep, cap: i64) -> Result<Matrix<TruncSeries>> {
    let f = z.field();
    let g = cos.elem();
    let j = automorphy_factor(&g, z);
    let extra = w as i64 * j.start().abs() + 4;
    let jinv = j.inv(Some(cap + extra))?.truncate(cap + extra);
    let mut s = jinv.pow(w as u64).truncate(cap);
    if m > 0 {
        let (gz, _) = mobius_and_factor(&g, z, cap + extra)?;
        let u = u_eval(gz.series(), cap / 2 + 4)?;
        s = s.mul(&u.pow(m as u64)).truncate(cap);
    }
    let r = rep.apply(&g);
    Ok(Matrix::from_fn(rows.len(), r.cols(), TruncSeries::zero(f, 2), |i, k| s.scale(r.get(rows[i], k))))
}

/// 𝓔_{w,m,ρ}(z) = Σ_{δ ∈ H\Γ} det(δ)^m J_δ(z)^{-w} u(δ(z))^m ρ(δ)_L over the
/// cosets of degree <= cutoff, every term known to index `cap`.
#[allow(non_snake_case)]
pub fn eisenstein_E(rep: &GammaRep, rows: &[usize], w: u32, m: u32, z: &OmegaPoint, cutoff: usize, cap: i64) -> Result<SeriesEval> {
    if w == 0 {
        return Err(Error::Config("weight must be positive".into()));
    }
    let f = z.field();
    let cosets = coset_enum(f, cutoff);
    let n = rep.dim(f.p() as u64);
    let zero = || Matrix::zeros(rows.len(), n, TruncSeries::zero(f, 2));
    let mut layers = vec![zero(); cutoff + 1];
    for cos in &cosets {
        let t = coset_term(rep, rows, w, m, z, cos, cap)?;
        let k = cos.degree();
        layers[k] = layers[k].add(&t);
    }
    let deltas = layers[1..].iter().map(residual_val_matrix).collect();
    let value = layers.iter().fold(zero(), |acc, l| acc.add(l));
    let tb = (m == 0).then(|| Val::Finite(tail_bound(z, w, cutoff)));
    Ok(SeriesEval { value, cutoff, deltas, tail_bound: tb, terms: cosets.len() })
}

/// 𝓖_{w,σ}(z) = Σ'_{(a,b)} (az + b)^{-w} (σ_1(a), σ_1(b)) ⊗ ⋯ ⊗ (σ_s(a), σ_s(b))
/// over nonzero pairs with max(deg a, deg b) <= cutoff.
#[allow(non_snake_case)]
pub fn eisenstein_G(sc: &SemiCharacter, w: u32, z: &OmegaPoint, cutoff: usize, cap: i64) -> Result<SeriesEval> {
    let f = z.field();
    let d = sc.d();
    let s = sc.s();
    let polys: Vec<APoly> = poly_enum(f, cutoff + 1).collect();
    let images: Vec<Vec<Matrix<RatFunc>>> = polys.iter().map(|a| sc.factors().iter().map(|r| r.eval(a)).collect()).collect();
    let (rows, cols) = (d.pow(s as u32), (2 * d).pow(s as u32));
    let zero = || Matrix::zeros(rows, cols, TruncSeries::zero(f, 2));
    let mut layers = vec![zero(); cutoff + 1];
    let mut terms = 0;
    for (ia, a) in polys.iter().enumerate() {
        for (ib, b) in polys.iter().enumerate() {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let j = lift(a).mul(z.series()).add(&lift(b));
            let extra = w as i64 * j.start().abs() + 4;
            let x = j.inv(Some(cap + extra))?.truncate(cap + extra).pow(w as u64).truncate(cap);
            let one = Matrix::identity(1, RatFunc::zero(f));
            let blk = (0..s).fold(one, |acc, i| acc.kron(&images[ia][i].hstack(&images[ib][i])));
            let k = a.degree().unwrap_or(0).max(b.degree().unwrap_or(0));
            layers[k] = layers[k].add(&blk.map(TruncSeries::zero(f, 2), |c| x.scale(c)));
            terms += 1;
        }
    }
    let deltas = layers[1..].iter().map(residual_val_matrix).collect();
    let value = layers.iter().fold(zero(), |acc, l| acc.add(l));
    Ok(SeriesEval { value, cutoff, deltas, tail_bound: Some(Val::Finite(tail_bound(z, w, cutoff))), terms })
}

/// σ_1 ⊗ ⋯ ⊗ σ_s as a semi-character of dimension d^s (factor i acting on the i-th tensor slot).
pub fn kronecker_semi_character(sc: &SemiCharacter) -> Result<SemiCharacter> {
    let s = sc.s();
    if s <= 1 {
        return Ok(sc.clone());
    }
    let f = sc.field();
    let d = sc.d();
    let id = |k: usize| Matrix::identity(d.pow(k as u32), RatFunc::zero(f));
    let lifted = sc
        .factors()
        .iter()
        .enumerate()
        .map(|(i, r)| AlgebraRep::new(id(i).kron(&r.theta_image).kron(&id(s - i - 1))))
        .collect();
    SemiCharacter::new(f, d.pow(s as u32), lifted)
}

/// ρ = ρ_{σ_1} ⊗ ⋯ ⊗ ρ_{σ_s}.
pub fn rho_of(sc: &SemiCharacter) -> GammaRep {
    let rs: Vec<GammaRep> = sc.factors().iter().map(|r| GammaRep::rho_sigma(r.clone())).collect();
    if rs.len() == 1 {
        rs.into_iter().next().unwrap()
    } else {
        GammaRep::Tensor(rs)
    }
}

fn min_val(m: &Matrix<TruncSeries>) -> Val {
    m.entries().iter().map(|x| Val::from_opt(x.valuation())).min().unwrap_or(Val::Infinite)
}

fn vmin(a: Val, b: Val) -> Val {
    a.min(b)
}

fn vadd(a: Val, b: Val) -> Val {
    match (a, b) {
        (Val::Finite(x), Val::Finite(y)) => Val::Finite(x + y),
        _ => Val::Infinite,
    }
}

/// 𝓖_{w,σ} - L_σ(w)·𝓔_{w,0,ρ} against the valuation both truncations
/// guarantee: min(B, w(D+1) + v(𝓔), B + v(L)) with B the coset tail bound.
pub fn factorization_check(sc: &SemiCharacter, w: u32, z: &OmegaPoint, cutoff: usize, guard: i64) -> Result<CheckReport> {
    let f = sc.field();
    let b = tail_bound(z, w, cutoff);
    let cap = ratio_idx(b) + 2 * guard;
    let rep = rho_of(sc);
    let rows = tensor_bottom_rows(sc.d(), sc.s());
    let e = eisenstein_E(&rep, &rows, w, 0, z, cutoff, cap)?;
    let g = eisenstein_G(sc, w, z, cutoff, cap)?;
    let l = L_value(&kronecker_semi_character(sc)?, w, cutoff).map(TruncSeries::zero(f, 2), |x| x.with_ram(2));
    let bv = Val::Finite(b);
    let ve = vmin(min_val(&e.value), bv);
    let vl = vmin(min_val(&l), Val::int(0));
    let lt = Val::int(w as i64 * (cutoff as i64 + 1));
    let bound = vmin(bv, vmin(vadd(lt, ve), vadd(bv, vl)));
    let residual = residual_val_matrix(&g.value.sub(&l.mul(&e.value)));
    let Val::Finite(target) = bound else { unreachable!("the tail bound is finite") };
    let mut r = CheckReport::new("eisenstein_factorization")
        .param("q", f.q())
        .param("w", w)
        .param("s", sc.s())
        .param("d", sc.d())
        .param("z", z.series().to_string())
        .param("cutoff", cutoff)
        .with_residual(residual, target);
    r.note(format!("{} coset terms, {} lattice terms", e.terms, g.terms));
    Ok(r)
}

/// A lower bound on the rank of M + E for every E whose row i has entries
/// of valuation >= err[i]: the largest k with a k×k minor whose valuation
/// lies below that of every expansion term containing an entry of E. Returns
/// the rank and the certifying (rows, cols, valuation).
pub fn certified_rank(m: &Matrix<TruncSeries>, err: &[Ratio<i64>]) -> (usize, Option<(Vec<usize>, Vec<usize>, Val)>) {
    for k in (1..=m.rows().min(m.cols())).rev() {
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let det = m.submatrix(&rs, &cs).det_generic();
                if det.is_known_zero() {
                    continue;
                }
                let v = det.valuation().expect("nonzero determinant");
                if Val::Finite(v) < perturbation_bound(m, err, &rs, &cs) {
                    return (k, Some((rs, cs, Val::Finite(v))));
                }
            }
        }
    }
    (0, None)
}

/// min over permutations π and rows i of err[i] + Σ_{i' ≠ i} min(v(M_{i',π(i')}), err[i']).
fn perturbation_bound(m: &Matrix<TruncSeries>, err: &[Ratio<i64>], rs: &[usize], cs: &[usize]) -> Val {
    let v = |i: usize, j: usize| Val::from_opt(m.get(i, j).valuation()).min(Val::Finite(err[i]));
    let mut best = Val::Infinite;
    for perm in permutations(cs.len()) {
        for (a, &i) in rs.iter().enumerate() {
            let rest = rs.iter().enumerate().filter(|(b, _)| *b != a).fold(Val::Finite(err[i]), |acc, (b, &i2)| vadd(acc, v(i2, cs[perm[b]])));
            best = best.min(rest);
        }
    }
    best
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Working index for series evaluations at z: the tail bound plus guard.
pub fn point_cap(z: &OmegaPoint, w: u32, cutoff: usize, guard: i64) -> i64 {
    ratio_idx(tail_bound(z, w, cutoff)) + 2 * guard
}

/// θ^{1/2} + θ, θ^{-3/2}, θ^{-3/2} + 1, θ^{-3/2} + θ^{-1}.
pub fn default_rank_points(f: Fq) -> Vec<OmegaPoint> {
    let th = |k: i64| TruncSeries::monomial(RatFunc::one(f), -k, 2);
    [th(1).add(&th(2)), th(-3), th(-3).add(&th(0)), th(-3).add(&th(-2))]
        .into_iter()
        .map(|z| OmegaPoint::new(z).expect("odd part"))
        .collect()
}

/// Rank of 𝓔_{w,0,ρ} certified at some point, and 𝕂-linear independence of
/// the entries of its first row certified by evaluation at all points.
pub fn rank_check(rep: &GammaRep, depth: usize, w: u32, points: &[OmegaPoint], cutoff: usize, guard: i64) -> Result<CheckReport> {
    let f = points[0].field();
    let n = rep.dim(f.p() as u64);
    let rows = bottom_rows(n, depth);
    let mut r = CheckReport::new("rank").param("q", f.q()).param("w", w).param("cutoff", cutoff).param("depth", depth);
    r = r.param("points", points.iter().map(|z| z.series().to_string()).collect::<Vec<_>>());
    if vanishing_class(rep, f, w, 0) {
        let e = eisenstein_E(rep, &rows, w, 0, &points[0], cutoff, point_cap(&points[0], w, cutoff, guard))?;
        let zero = e.value.entries().iter().all(|x| x.is_known_zero());
        return Ok(r.param("rank", 0).with_status(zero));
    }
    let mut best = 0;
    let mut row = vec![];
    let mut errs = vec![];
    for z in points {
        let b = tail_bound(z, w, cutoff);
        let e = eisenstein_E(rep, &rows, w, 0, z, cutoff, point_cap(z, w, cutoff, guard))?;
        best = best.max(certified_rank(&e.value, &vec![b; depth]).0);
        row.extend((0..n).map(|j| e.value.get(0, j).clone()));
        errs.push(b);
    }
    let stacked = Matrix::from_vec(points.len(), n, row, TruncSeries::zero(f, 2));
    let (ind, cert) = certified_rank(&stacked, &errs);
    r = r.param("certified_rank", best).param("row_rank", ind);
    if let Some((_, cs, v)) = cert {
        r.note(format!("row minor on columns {cs:?} has valuation {v}"));
    }
    let want_ind = points.len() >= n;
    Ok(r.and(best >= depth, "rank below the depth").and(!want_ind || ind == n, "row entries not certified independent"))
}

/// 𝓔_{w,0,ρ}(z) - κ(0, .., 0, I_L): every coset with c ≠ 0 has valuation
/// at least -w·v_ℑ(z).
pub fn u_limit_check(rep: &GammaRep, depth: usize, w: u32, z: &OmegaPoint, cutoff: usize, guard: i64) -> Result<CheckReport> {
    let f = z.field();
    let n = rep.dim(f.p() as u64);
    let rows = bottom_rows(n, depth);
    let e = eisenstein_E(rep, &rows, w, 0, z, cutoff, point_cap(z, w, cutoff, guard))?;
    let k = kappa(rep, f, w);
    let limit = Matrix::from_fn(depth, n, TruncSeries::zero(f, 2), |i, j| {
        if j + depth >= n && j + depth - n == i {
            TruncSeries::from_fq(k).with_ram(2)
        } else {
            TruncSeries::zero(f, 2)
        }
    });
    let target = -z.imag_valuation() * w as i64;
    let residual = residual_val_matrix(&e.value.sub(&limit));
    Ok(CheckReport::new("u_limit")
        .param("q", f.q())
        .param("w", w)
        .param("z", z.series().to_string())
        .param("kappa", k.to_string())
        .param("cutoff", cutoff)
        .with_residual(residual, target)
        .and(target > Ratio::from_integer(0), "the point is too close to K_∞"))
}

/// 𝓔(γz) against det(γ)^{-m} J_γ(z)^w 𝓔(z) ρ(γ)^{-1} at each cutoff; a
/// diagnostic since the two truncations differ termwise.
pub fn functional_eq_check(rep: &GammaRep, depth: usize, w: u32, m: u32, z: &OmegaPoint, g: &GammaElem, cutoffs: &[usize], guard: i64) -> Result<CheckReport> {
    let f = z.field();
    let n = rep.dim(f.p() as u64);
    let rows = bottom_rows(n, depth);
    let ginv = g.inverse().ok_or(Error::NotInvertible)?;
    let rinv = rep.apply(&ginv);
    let mut residuals = vec![];
    for &d in cutoffs {
        let cap = point_cap(z, w, d, guard);
        let (gz, j) = mobius_and_factor(g, z, cap + 2 * guard)?;
        let cap = cap.min(point_cap(&gz, w, d, guard));
        let lhs = eisenstein_E(rep, &rows, w, m, &gz, d, cap)?.value;
        let mut scal = j.pow(w as u64);
        if m > 0 {
            let dt = g.det().lead().inv().unwrap().pow(m as u64);
            scal = scal.scale_fq(dt);
        }
        let rhs = eisenstein_E(rep, &rows, w, m, z, d, cap)?.value;
        let rhs = rhs.map(TruncSeries::zero(f, 2), |x| x.mul(&scal)).mul(&rinv.map(TruncSeries::zero(f, 2), |c| TruncSeries::constant(c.clone()).with_ram(2)));
        residuals.push(residual_val_matrix(&lhs.sub(&rhs)));
    }
    let improves = residuals.windows(2).all(|x| x[1] > x[0]);
    let mut r = CheckReport::new("functional_equation")
        .param("q", f.q())
        .param("w", w)
        .param("m", m)
        .param("gamma", format!("({} {}; {} {})", g.a, g.b, g.c, g.d))
        .param("cutoffs", cutoffs.to_vec())
        .param("residuals", residuals.iter().map(|v| v.to_string()).collect::<Vec<_>>())
        .param("strictly_improves", improves);
    r.status = Status::Diagnostic;
    Ok(r)
}

/// Exact vanishing of every truncation when w - 2m ≢ k (mod q - 1).
pub fn vanishing_check(rep: &GammaRep, depth: usize, w: u32, m: u32, z: &OmegaPoint, cutoffs: &[usize], guard: i64) -> Result<CheckReport> {
    let f = z.field();
    let n = rep.dim(f.p() as u64);
    let rows = bottom_rows(n, depth);
    let class = vanishing_class(rep, f, w, m);
    let mut all_zero = true;
    for &d in cutoffs {
        let e = eisenstein_E(rep, &rows, w, m, z, d, point_cap(z, w, d, guard))?;
        all_zero &= e.value.entries().iter().all(|x| x.is_known_zero());
    }
    Ok(CheckReport::new("vanishing")
        .param("q", f.q())
        .param("w", w)
        .param("m", m)
        .param("cutoffs", cutoffs.to_vec())
        .param("vanishing_class", class)
        .with_status(class && all_zero))
}

/// F_l(z) = ⊗_j (binom(l_j, i) z^{p^j (l_j - i)})_{i = 0..l_j} over the nonzero base-p digits.
pub fn f_vector(z: &OmegaPoint, l: u64) -> Vec<TruncSeries> {
    let f = z.field();
    let p = f.p() as u64;
    let mut out = vec![TruncSeries::one(f).with_ram(2)];
    for (j, &lj) in digits_base_p(l, p).iter().enumerate() {
        if lj == 0 {
            continue;
        }
        let zj = z.series().pow(p.pow(j as u32));
        let v: Vec<TruncSeries> = (0..=lj)
            .map(|i| zj.pow(lj - i).scale_fq(f.from_int(binom_mod_p(lj, i, p) as i64)))
            .collect();
        out = out.iter().flat_map(|a| v.iter().map(move |b| a.mul(b))).collect();
    }
    out
}

/// (𝓔_{w,m,ρ^II} · F_l)|_{t_i = θ} against P_{w',m} = Σ J^{-w'} u^m,
/// w' = w - l_1 - ⋯ - l_s, term by term over the same cosets.
pub fn poincare_specialize_check(ls: &[u64], w: u32, m: u32, z: &OmegaPoint, cutoff: usize, guard: i64) -> Result<CheckReport> {
    let f = z.field();
    let total: u64 = ls.iter().sum();
    let wp = w as i64 - total as i64;
    if wp < 1 {
        return Err(Error::Config(format!("w' = {wp} must be positive")));
    }
    let cap = point_cap(z, w, cutoff, guard);
    let fl: Vec<TruncSeries> = ls.iter().fold(vec![TruncSeries::one(f).with_ram(2)], |acc, &l| {
        let v = f_vector(z, l);
        acc.iter().flat_map(|a| v.iter().map(move |b| a.mul(b))).collect()
    });
    let mut lhs = TruncSeries::zero(f, 2);
    let mut rhs = TruncSeries::zero(f, 2);
    for cos in coset_enum(f, cutoff) {
        let g = cos.elem();
        let j = automorphy_factor(&g, z);
        let extra = w as i64 * j.start().abs() + 4;
        let jinv = j.inv(Some(cap + extra))?.truncate(cap + extra);
        let mut um = TruncSeries::one(f).with_ram(2);
        if m > 0 {
            let (gz, _) = mobius_and_factor(&g, z, cap + extra)?;
            um = u_eval(gz.series(), cap / 2 + 4)?.pow(m as u64);
        }
        // Last row of ρ^II(δ) with every t_i = θ.
        let row = ls.iter().fold(vec![APoly::one(f)], |acc, &l| {
            let r = rho_digits(&g, l);
            let last = r.row(r.rows() - 1).to_vec();
            acc.iter().flat_map(|a| last.iter().map(move |b| a.mul(b))).collect()
        });
        let dot = row.iter().zip(&fl).fold(TruncSeries::zero(f, 2), |acc, (a, x)| acc.add(&lift(a).mul(x)));
        lhs = lhs.add(&jinv.pow(w as u64).mul(&um).mul(&dot).truncate(cap));
        rhs = rhs.add(&jinv.pow(wp as u64).mul(&um).truncate(cap));
    }
    let residual = residual_val_series(&lhs.sub(&rhs));
    let mut r = CheckReport::new("poincare_specialization")
        .param("q", f.q())
        .param("ls", ls.to_vec())
        .param("w", w)
        .param("w_prime", wp)
        .param("m", m)
        .param("cutoff", cutoff)
        .param("residual", residual.to_string());
    r.residual_valuation = Some(residual);
    r.status = Status::Diagnostic;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algrep::{companion_sigma, CompanionSpec};
    use crate::field::FieldConfig;
    use crate::meataxe::group_closure_order;

    fn chi_rep(f: Fq) -> GammaRep {
        GammaRep::rho_sigma(AlgebraRep::chi(f, 0))
    }

    fn companion(f: Fq, c0: RatFunc, c1: RatFunc) -> AlgebraRep {
        companion_sigma(&CompanionSpec::new(vec![c0, c1, RatFunc::one(f)]).unwrap())
    }

    #[test]
    fn cosets_of_small_degree() {
        let f = FieldConfig::builtin(2).unwrap();
        let c: Vec<(String, String)> = coset_enum(f, 0).iter().map(|r| (r.c.to_string(), r.d.to_string())).collect();
        assert_eq!(c.len(), 3);
        let f3 = FieldConfig::builtin(3).unwrap();
        let cos = coset_enum(f3, 1);
        let polys: Vec<APoly> = poly_enum(f3, 2).collect();
        let brute = polys
            .iter()
            .flat_map(|a| polys.iter().map(move |b| (a, b)))
            .filter(|(a, b)| !(a.is_zero() && b.is_zero()) && a.gcd(b).degree() == Some(0))
            .count();
        assert_eq!(cos.len(), brute);
        for r in &cos {
            assert_eq!(r.elem().det(), APoly::one(f3));
            if !r.c.is_zero() {
                assert!(r.a.is_zero() || r.a.degree() < r.c.degree());
            }
        }
        let id = CosetRep::complete(APoly::zero(f3), APoly::one(f3)).unwrap();
        assert_eq!(id.elem(), GammaElem::identity(f3));
        // Left multiplication by H fixes the bottom row.
        let h = Mat2::new(APoly::constant(f3.elem(2)), APoly::theta(f3), APoly::zero(f3), APoly::one(f3));
        for r in &cos {
            let x = h.mul(&r.elem());
            assert_eq!((x.c, x.d), (r.c.clone(), r.d.clone()));
        }
    }

    #[test]
    fn mobius_action_and_cocycle() {
        let f = FieldConfig::builtin(3).unwrap();
        let z = OmegaPoint::new(TruncSeries::monomial(RatFunc::one(f), -1, 2).add(&TruncSeries::theta_pow(f, 1).with_ram(2))).unwrap();
        assert_eq!(OmegaPoint::theta_half(f, 1).unwrap().imag_valuation(), Ratio::new(-1, 2));
        assert_eq!(z.imag_valuation(), Ratio::new(-1, 2));
        let (gz, j) = mobius_and_factor(&GammaElem::identity(f), &z, 40).unwrap();
        assert!(gz.series().sub(z.series()).is_known_zero());
        assert_eq!(j, TruncSeries::one(f).with_ram(2));
        let g1 = GammaElem::e21(APoly::theta(f)).mul(&GammaElem::swap(f));
        let g2 = GammaElem::e12(APoly::from_codes(f, &[1, 2])).mul(&GammaElem::e21(APoly::one(f)));
        let (g2z, j2) = mobius_and_factor(&g2, &z, 60).unwrap();
        let lhs = automorphy_factor(&g1.mul(&g2), &z);
        let rhs = automorphy_factor(&g1, &g2z).mul(&j2);
        assert!(lhs.sub(&rhs).valuation_bound().unwrap() >= Ratio::from_integer(20));
        assert!(OmegaPoint::new(TruncSeries::theta_pow(f, 1)).is_err());
    }

    #[test]
    fn normal_depths() {
        let f = FieldConfig::builtin(3).unwrap();
        let s = companion(f, RatFunc::var(f, 0).neg(), RatFunc::zero(f));
        assert!(normal_depth(&GammaRep::rho_sigma(s), f, 2, 3));
        assert!(normal_depth(&GammaRep::tensor_ii(&[1, 2]), f, 1, 3));
        assert!(!normal_depth(&GammaRep::tensor_ii(&[1, 2]), f, 2, 3));
        // Depth N: the trivial representation, whose image is finite.
        let triv = GammaRep::Chi { var: 0, functor: Functor::Tensor(vec![]) };
        assert!(normal_depth(&triv, f, 1, 3));
        let imgs: Vec<Matrix<FqElem>> = GammaElem::sample_family(f, 3)
            .iter()
            .map(|g| triv.apply(g).map(f.zero(), |c| c.constant_value().unwrap()))
            .collect();
        assert_eq!(group_closure_order(&imgs, 100), Some(1));
    }

    #[test]
    fn exact_vanishing() {
        let f = FieldConfig::builtin(3).unwrap();
        let z = OmegaPoint::theta_half(f, 1).unwrap();
        let rep = chi_rep(f);
        let r = vanishing_check(&rep, 1, 2, 0, &z, &[0, 1, 2], 2).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = vanishing_check(&rep, 1, 2, 1, &z, &[1], 2).unwrap();
        assert!(r.passed(), "{r:?}");
        let e = eisenstein_E(&rep, &[1], 1, 0, &z, 1, 10).unwrap();
        assert!(!e.value.entries().iter().all(|x| x.is_known_zero()));
    }

    #[test]
    fn factorization_scalar_case() {
        let f = FieldConfig::builtin(3).unwrap();
        let z = OmegaPoint::theta_half(f, 1).unwrap();
        let sc = SemiCharacter::single(AlgebraRep::chi(f, 0));
        let r = factorization_check(&sc, 1, &z, 2, 2).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn rank_of_companion() {
        let f = FieldConfig::builtin(3).unwrap();
        let s = companion(f, RatFunc::var(f, 0).neg(), RatFunc::zero(f));
        let pts = default_rank_points(f);
        let r = rank_check(&GammaRep::rho_sigma(s), 2, 1, &pts, 2, 2).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn u_limits() {
        let f = FieldConfig::builtin(2).unwrap();
        let z = OmegaPoint::theta_half(f, 5).unwrap();
        let r = u_limit_check(&chi_rep(f), 1, 1, &z, 2, 2).unwrap();
        assert!(r.passed(), "{r:?}");
        let f3 = FieldConfig::builtin(3).unwrap();
        let z = OmegaPoint::theta_half(f3, 5).unwrap();
        let r = u_limit_check(&chi_rep(f3), 1, 1, &z, 1, 2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.params["kappa"], "2");
    }

    #[test]
    fn functional_equation_improves() {
        let f = FieldConfig::builtin(2).unwrap();
        let z = OmegaPoint::theta_half(f, 1).unwrap();
        for g in [GammaElem::e12(APoly::one(f)), GammaElem::swap(f)] {
            let r = functional_eq_check(&chi_rep(f), 1, 1, 0, &z, &g, &[1, 2, 3], 2).unwrap();
            assert_eq!(r.params["strictly_improves"], true, "{r:?}");
        }
    }

    #[test]
    fn poincare_specialization() {
        let f = FieldConfig::builtin(3).unwrap();
        let z = OmegaPoint::theta_half(f, 1).unwrap();
        assert_eq!(f_vector(&z, 1), vec![z.series().clone(), TruncSeries::one(f).with_ram(2)]);
        let r = poincare_specialize_check(&[1], 2, 0, &z, 2, 2).unwrap();
        assert!(r.residual_valuation.unwrap().at_least(Ratio::from_integer(3)), "{r:?}");
        let r = poincare_specialize_check(&[], 1, 0, &z, 1, 2).unwrap();
        assert!(r.residual_valuation.unwrap().at_least(Ratio::from_integer(4)), "{r:?}");
    }
}
