//! Representations of Γ = GL₂(A): symmetric powers, the Lucas extraction ρ⋆,
//! digit tensor products ρ^I, their χ_t-specializations and tensor products
//! ρ^II, determinant twists and ρ_σ.

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algrep::AlgebraRep;
use crate::apoly::APoly;
use crate::combinat::{binom_mod_p, digits_base_p, lucas_row, phi_p};
use crate::field::{Fq, FqElem};
use crate::matrix::Matrix;
use crate::mpoly::MPoly;
use crate::ratfunc::RatFunc;
use crate::ring::Ring;

/// γ = (a b; c d) with entries in a commutative ring.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mat2<B> {
    pub a: B,
    pub b: B,
    pub c: B,
    pub d: B,
}

impl<B: Ring> Mat2<B> {
    pub fn new(a: B, b: B, c: B, d: B) -> Self {
        Mat2 { a, b, c, d }
    }
    pub fn identity_like(x: &B) -> Self {
        Mat2::new(x.one_like(), x.zero_like(), x.zero_like(), x.one_like())
    }
    pub fn mul(&self, o: &Self) -> Self {
        let m = |x: &B, y: &B, z: &B, w: &B| x.mul_ref(y).add_ref(&z.mul_ref(w));
        Mat2::new(m(&self.a, &o.a, &self.b, &o.c), m(&self.a, &o.b, &self.b, &o.d), m(&self.c, &o.a, &self.d, &o.c), m(&self.c, &o.b, &self.d, &o.d))
    }
    pub fn det(&self) -> B {
        self.a.mul_ref(&self.d).sub_ref(&self.b.mul_ref(&self.c))
    }
    pub fn map<C: Ring>(&self, f: impl Fn(&B) -> C) -> Mat2<C> {
        Mat2::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }
    pub fn to_matrix(&self) -> Matrix<B> {
        Matrix::from_rows(vec![vec![self.a.clone(), self.b.clone()], vec![self.c.clone(), self.d.clone()]])
    }
}

/// An element of Γ = GL₂(A).
pub type GammaElem = Mat2<APoly>;

impl GammaElem {
    pub fn e12(x: APoly) -> Self {
        let f = x.field();
        Mat2::new(APoly::one(f), x, APoly::zero(f), APoly::one(f))
    }
    pub fn e21(x: APoly) -> Self {
        let f = x.field();
        Mat2::new(APoly::one(f), APoly::zero(f), x, APoly::one(f))
    }
    pub fn diag(u: FqElem, v: FqElem) -> Self {
        let f = u.field();
        Mat2::new(APoly::constant(u), APoly::zero(f), APoly::zero(f), APoly::constant(v))
    }
    pub fn swap(f: Fq) -> Self {
        Mat2::new(APoly::zero(f), APoly::one(f), APoly::one(f), APoly::zero(f))
    }
    pub fn identity(f: Fq) -> Self {
        Self::identity_like(&APoly::one(f))
    }
    /// γ^{-1} = det^{-1}(d -b; -c a), det ∈ F_q^×.
    pub fn inverse(&self) -> Option<Self> {
        let dt = self.det();
        if dt.degree() != Some(0) {
            return None;
        }
        let di = dt.lead().inv()?;
        Some(Mat2::new(self.d.scale(di), self.b.neg().scale(di), self.c.neg().scale(di), self.a.scale(di)))
    }
    /// Generators of the documented sample family: GL₂(F_q) generators and
    /// E₁₂(cθ^k), E₂₁(cθ^k) for k <= kmax, c running over an F_p-basis of F_q.
    pub fn sample_family(f: Fq, kmax: usize) -> Vec<GammaElem> {
        let mut v = vec![Self::swap(f), Self::diag(f.primitive(), f.one())];
        let basis: Vec<FqElem> = (0..f.e()).map(|i| f.primitive().pow(i as u64)).collect();
        for k in 0..=kmax {
            for c in &basis {
                v.push(Self::e12(APoly::monomial(*c, k)));
                v.push(Self::e21(APoly::monomial(*c, k)));
            }
        }
        v
    }
    /// A random element as a word in elementary and diagonal matrices with
    /// polynomial entries of degree <= deg.
    pub fn random(f: Fq, rng: &mut ChaCha8Rng, deg: usize) -> Self {
        let rpoly = |rng: &mut ChaCha8Rng| APoly::new(f, (0..=deg).map(|_| f.elem(rng.gen_range(0..f.q()))).collect());
        let u = f.nonzero_elements().nth(rng.gen_range(0..f.q() as usize - 1)).unwrap();
        let mut g = Self::diag(u, f.one());
        for _ in 0..2 {
            g = g.mul(&Self::e12(rpoly(rng))).mul(&Self::e21(rpoly(rng)));
        }
        if rng.gen_bool(0.5) {
            g = g.mul(&Self::swap(f));
        }
        g
    }
}

/// ρ_r(γ): column i holds (aX + cY)^{r-i}(bX + dY)^i in the basis X^{r-j}Y^j.
pub fn sym_power<B: Ring>(g: &Mat2<B>, r: usize) -> Matrix<B> {
    let zero = g.a.zero_like();
    let p_char = char_of(&zero);
    // (uX + vY)^n as coefficients of X^{n-k}Y^k.
    let expand = |u: &B, v: &B, n: usize| -> Vec<B> {
        let upow = powers(u, n);
        let vpow = powers(v, n);
        (0..=n)
            .map(|k| {
                let bin = binom_in(&zero, n as u64, k as u64, p_char);
                if bin.is_zero() {
                    zero.clone()
                } else {
                    bin.mul_ref(&upow[n - k]).mul_ref(&vpow[k])
                }
            })
            .collect()
    };
    let mut m = Matrix::zeros(r + 1, r + 1, zero.clone());
    for i in 0..=r {
        let left = expand(&g.a, &g.c, r - i);
        let right = expand(&g.b, &g.d, i);
        for (j1, x) in left.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j2, y) in right.iter().enumerate() {
                let cur = m.get(j1 + j2, i).add_ref(&x.mul_ref(y));
                m.set(j1 + j2, i, cur);
            }
        }
    }
    m
}

fn powers<B: Ring>(x: &B, n: usize) -> Vec<B> {
    let mut v = vec![x.one_like()];
    for k in 1..=n {
        v.push(v[k - 1].mul_ref(x));
    }
    v
}

/// The characteristic of the ring of `zero` (smallest n > 0 with n·1 = 0).
fn char_of<B: Ring>(zero: &B) -> u64 {
    (2..).find(|&n| zero.from_int_like(n as i64).is_zero()).unwrap()
}

fn binom_in<B: Ring>(zero: &B, n: u64, k: u64, p: u64) -> B {
    zero.from_int_like(binom_mod_p(n, k, p) as i64)
}

/// Indices r with binom(l, r) ≢ 0 mod p, the rows and columns kept by ρ⋆_l.
pub fn star_indices(l: u64, p: u64) -> Vec<usize> {
    lucas_row(l, p).iter().enumerate().filter(|(_, b)| **b != 0).map(|(r, _)| r).collect()
}

/// ρ⋆_l(γ): ρ_l(γ) with the rows and columns r with binom(l, r) ≡ 0 mod p removed.
pub fn rho_star<B: Ring>(g: &Mat2<B>, l: u64) -> Matrix<B> {
    let p = char_of(&g.a.zero_like());
    let keep = star_indices(l, p);
    sym_power(g, l as usize).submatrix(&keep, &keep)
}

/// M^{(i)}: entries raised to the power p^i.
pub fn frobenius_twist<B: Ring>(m: &Mat2<B>, i: u32) -> Mat2<B> {
    let p = char_of(&m.a.zero_like());
    let e = p.pow(i);
    m.map(|x| x.pow_u(e))
}

/// ρ^I_l(γ) = ρ_{l_0}(γ) ⊗ ρ_{l_1}(γ^{(1)}) ⊗ ⋯, leftmost factor slowest.
pub fn rho_digits<B: Ring>(g: &Mat2<B>, l: u64) -> Matrix<B> {
    let p = char_of(&g.a.zero_like());
    let one = Matrix::identity(1, g.a.zero_like());
    digits_base_p(l, p)
        .iter()
        .enumerate()
        .fold(one, |acc, (i, &li)| if li == 0 { acc } else { acc.kron(&sym_power(&frobenius_twist(g, i as u32), li as usize)) })
}

/// A polynomial functor of the tautological representation.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functor {
    Tautological,
    Sym(usize),
    Star(u64),
    Digits(u64),
    FrobeniusTwist(u32, Box<Functor>),
    Tensor(Vec<Functor>),
}

impl Functor {
    pub fn apply<B: Ring>(&self, g: &Mat2<B>) -> Matrix<B> {
        match self {
            Functor::Tautological => g.to_matrix(),
            Functor::Sym(r) => sym_power(g, *r),
            Functor::Star(l) => rho_star(g, *l),
            Functor::Digits(l) => rho_digits(g, *l),
            Functor::FrobeniusTwist(i, inner) => inner.apply(&frobenius_twist(g, *i)),
            Functor::Tensor(fs) => {
                let one = Matrix::identity(1, g.a.zero_like());
                fs.iter().fold(one, |acc, f| acc.kron(&f.apply(g)))
            }
        }
    }
    pub fn dim(&self, p: u64) -> usize {
        match self {
            Functor::Tautological => 2,
            Functor::Sym(r) => r + 1,
            Functor::Star(l) | Functor::Digits(l) => phi_p(*l, p) as usize,
            Functor::FrobeniusTwist(_, inner) => inner.dim(p),
            Functor::Tensor(fs) => fs.iter().map(|f| f.dim(p)).product(),
        }
    }
    /// Largest l appearing (for choosing a specialization field).
    pub fn max_weight(&self) -> u64 {
        match self {
            Functor::Tautological => 1,
            Functor::Sym(r) => *r as u64,
            Functor::Star(l) | Functor::Digits(l) => *l,
            Functor::FrobeniusTwist(_, inner) => inner.max_weight(),
            Functor::Tensor(fs) => fs.iter().map(|f| f.max_weight()).max().unwrap_or(0),
        }
    }
}

/// A representation Γ → GL_N(K_s).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRep {
    /// functor ∘ χ_{t_var}.
    Chi { var: usize, functor: Functor },
    /// ρ_σ(a b; c d) = (σ(a) σ(b); σ(c) σ(d)).
    Sigma(AlgebraRep),
    Tensor(Vec<GammaRep>),
    /// ρ ⊗ det^{-m}.
    DetTwist { m: i64, inner: Box<GammaRep> },
}

/// χ_t(a) = a(t_var).
pub fn chi(a: &APoly, var: usize) -> RatFunc {
    RatFunc::from_poly(MPoly::from_apoly(a, var))
}

impl GammaRep {
    /// ρ^I_{t,l}.
    pub fn digits_t(var: usize, l: u64) -> Self {
        GammaRep::Chi { var, functor: Functor::Digits(l) }
    }
    /// ρ^II_{t,l} = ⊗_i ρ^I_{t_i, l_i}.
    pub fn tensor_ii(ls: &[u64]) -> Self {
        GammaRep::Tensor(ls.iter().enumerate().map(|(i, &l)| Self::digits_t(i, l)).collect())
    }
    pub fn rho_sigma(rep: AlgebraRep) -> Self {
        GammaRep::Sigma(rep)
    }
    pub fn det_twist(self, m: i64) -> Self {
        GammaRep::DetTwist { m, inner: Box::new(self) }
    }
    pub fn dim(&self, p: u64) -> usize {
        match self {
            GammaRep::Chi { functor, .. } => functor.dim(p),
            GammaRep::Sigma(r) => 2 * r.dim(),
            GammaRep::Tensor(rs) => rs.iter().map(|r| r.dim(p)).product(),
            GammaRep::DetTwist { inner, .. } => inner.dim(p),
        }
    }
    pub fn max_weight(&self) -> u64 {
        match self {
            GammaRep::Chi { functor, .. } => functor.max_weight(),
            GammaRep::Sigma(_) => 1,
            GammaRep::Tensor(rs) => rs.iter().map(|r| r.max_weight()).max().unwrap_or(0),
            GammaRep::DetTwist { inner, .. } => inner.max_weight(),
        }
    }
    pub fn apply(&self, g: &GammaElem) -> Matrix<RatFunc> {
        let f = g.a.field();
        match self {
            GammaRep::Chi { var, functor } => functor.apply(&g.map(|x| chi(x, *var))),
            GammaRep::Sigma(rep) => {
                let s = |x: &APoly| rep.eval(x);
                let (a, b, c, d) = (s(&g.a), s(&g.b), s(&g.c), s(&g.d));
                Matrix::block2(&a, &b, &c, &d)
            }
            GammaRep::Tensor(rs) => {
                let one = Matrix::identity(1, RatFunc::zero(f));
                rs.iter().fold(one, |acc, r| acc.kron(&r.apply(g)))
            }
            GammaRep::DetTwist { m, inner } => {
                let dt = g.det();
                let q = f.q() as i64;
                let e = (-m).rem_euclid(q - 1) as u64;
                let scale = RatFunc::constant(dt.coeff(0).pow(e));
                inner.apply(g).scale(&scale)
            }
        }
    }
}

/// Homomorphism residuals: ρ(1) = 1 and ρ(g h) = ρ(g)ρ(h) on `pairs`.
pub fn homomorphism_check(rep: &GammaRep, pairs: &[(GammaElem, GammaElem)]) -> bool {
    let Some((g0, _)) = pairs.first() else { return true };
    let f = g0.a.field();
    if !rep.apply(&GammaElem::identity(f)).is_identity() {
        return false;
    }
    pairs.iter().all(|(g, h)| rep.apply(&g.mul(h)) == rep.apply(g).mul(&rep.apply(h)))
}

pub fn functor_homomorphism_check(fun: &Functor, pairs: &[(GammaElem, GammaElem)]) -> bool {
    let Some((g0, _)) = pairs.first() else { return true };
    let f = g0.a.field();
    if !fun.apply(&GammaElem::identity(f)).is_identity() {
        return false;
    }
    pairs.iter().all(|(g, h)| fun.apply(&g.mul(h)) == fun.apply(g).mul(&fun.apply(h)))
}

pub fn random_pairs(f: Fq, rng: &mut ChaCha8Rng, n: usize, deg: usize) -> Vec<(GammaElem, GammaElem)> {
    (0..n).map(|_| (GammaElem::random(f, rng, deg), GammaElem::random(f, rng, deg))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwinerResult {
    /// Dimension over F_q of the space of intertwiners on the sample.
    pub solution_dim: usize,
    /// An invertible intertwiner M with F1(g) M = M F2(g), if found.
    pub matrix: Option<Matrix<FqElem>>,
    /// M intertwines on every fresh element as well.
    pub verified_fresh: bool,
}

/// Constant matrices M over F_q with F1(g)M = M F2(g) for g in `sample`,
/// an invertible one if it exists (found by seeded random combination),
/// re-verified on `fresh`.
pub fn intertwiner(f1: &Functor, f2: &Functor, sample: &[GammaElem], fresh: &[GammaElem], rng: &mut ChaCha8Rng) -> IntertwinerResult {
    let f = sample[0].a.field();
    let p = f.p() as u64;
    let (n1, n2) = (f1.dim(p), f2.dim(p));
    let nv = n1 * n2;
    let var = |j: usize, k: usize| j * n2 + k;
    let mut rows: Vec<Vec<FqElem>> = vec![];
    for g in sample {
        let (a, b) = (f1.apply(g), f2.apply(g));
        for i in 0..n1 {
            for k in 0..n2 {
                // Σ_j a_ij M_jk - Σ_j M_ij b_jk, one row per θ-degree.
                let mut terms: Vec<(usize, &APoly, bool)> = vec![];
                for j in 0..n1 {
                    terms.push((var(j, k), a.get(i, j), false));
                }
                for j in 0..n2 {
                    terms.push((var(i, j), b.get(j, k), true));
                }
                let maxdeg = terms.iter().filter_map(|t| t.1.degree()).max();
                let Some(maxdeg) = maxdeg else { continue };
                for e in 0..=maxdeg {
                    let mut row = vec![f.zero(); nv];
                    for (v, c, neg) in &terms {
                        let x = c.coeff(e);
                        row[*v] = if *neg { row[*v] - x } else { row[*v] + x };
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
    }
    let sys = if rows.is_empty() { Matrix::zeros(1, nv, f.zero()) } else { Matrix::from_rows(rows) };
    let basis = sys.nullspace();
    let to_matrix = |v: &[FqElem]| Matrix::from_vec(n1, n2, v.to_vec(), f.zero());
    let mut found = None;
    if n1 == n2 && !basis.is_empty() {
        for attempt in 0..64 {
            let v: Vec<FqElem> = if attempt < basis.len() {
                basis[attempt].clone()
            } else {
                let mut acc = vec![f.zero(); nv];
                for b in &basis {
                    let c = f.elem(rng.gen_range(0..f.q()));
                    for (x, y) in acc.iter_mut().zip(b) {
                        *x = *x + c * *y;
                    }
                }
                acc
            };
            let m = to_matrix(&v);
            if !m.det().is_zero() {
                found = Some(m);
                break;
            }
        }
    }
    let verified_fresh = found.as_ref().is_some_and(|m| {
        let lift = m.map(APoly::zero(f), |c| APoly::constant(*c));
        fresh.iter().all(|g| f1.apply(g).mul(&lift) == lift.mul(&f2.apply(g)))
    });
    IntertwinerResult { solution_dim: basis.len(), matrix: found, verified_fresh }
}

/// Tensor-factor layout of ρ^II_{t,l} after t_i ↦ t^{q^{k_i}}: each nonzero
/// digit l_{i,j} becomes a factor ρ_{l_{i,j}}^{(j + e k_i)}. Returns
/// (digit position, factor dimension) in ρ^II order.
fn tensor_ii_layout(ls: &[u64], ks: &[u32], p: u64, e: u32) -> Vec<(u32, usize)> {
    let mut out = vec![];
    for (l, k) in ls.iter().zip(ks) {
        for (j, d) in digits_base_p(*l, p).iter().enumerate() {
            if *d > 0 {
                out.push((j as u32 + e * k, *d as usize + 1));
            }
        }
    }
    out
}

/// perm[i] = index in the position-sorted Kronecker basis of the i-th basis
/// vector of the Kronecker product taken in `layout` order.
pub fn kron_permutation(layout: &[(u32, usize)]) -> Vec<usize> {
    let n: usize = layout.iter().map(|x| x.1).product();
    let mut order: Vec<usize> = (0..layout.len()).collect();
    order.sort_by_key(|&i| layout[i].0);
    (0..n)
        .map(|mut idx| {
            // Digits of idx in the mixed radix of layout (leftmost slowest).
            let mut tuple = vec![0; layout.len()];
            for i in (0..layout.len()).rev() {
                tuple[i] = idx % layout[i].1;
                idx /= layout[i].1;
            }
            order.iter().fold(0, |acc, &i| acc * layout[i].1 + tuple[i])
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CarryFreeReport {
    pub ls: Vec<u64>,
    pub ks: Vec<u32>,
    pub l_total: u64,
    pub permutation: Vec<usize>,
    pub samples: usize,
    pub all_equal: bool,
}

/// ρ^II_{t,l}(γ) with t_i ↦ t^{q^{k_i}} against ρ^I_{t,l_total}(γ), up to the
/// basis permutation of the tensor factors.
pub fn carry_free_check(f: Fq, ls: &[u64], samples: &[GammaElem]) -> CarryFreeReport {
    let (p, q) = (f.p() as u64, f.q() as u64);
    let (ks, total) = crate::combinat::carry_free_exponents(ls, q, p);
    let layout = tensor_ii_layout(ls, &ks, p, f.e());
    let perm = kron_permutation(&layout);
    let images: Vec<MPoly> = ks.iter().map(|k| MPoly::var(f, 0).pow(q.pow(*k))).collect();
    let rii = GammaRep::tensor_ii(ls);
    let ri = GammaRep::digits_t(0, total);
    let all_equal = samples.iter().all(|g| {
        let lhs = rii.apply(g).map(RatFunc::zero(f), |x| x.subst(&images).expect("polynomial substitution"));
        let rhs = ri.apply(g);
        let n = lhs.rows();
        n == rhs.rows() && (0..n).all(|i| (0..n).all(|j| lhs.get(i, j) == rhs.get(perm[i], perm[j])))
    });
    CarryFreeReport { ls: ls.to_vec(), ks, l_total: total, permutation: perm, samples: samples.len(), all_equal }
}
