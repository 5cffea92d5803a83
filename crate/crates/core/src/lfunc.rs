//! Semi-characters σ: A^+ → Mat_d(K_s), their L-values L_σ(n), the
//! ω-values ω_σ = λ_θ Π_σ, and the identities relating them.

use num_rational::Ratio;
use serde::Serialize;

use crate::algrep::{is_faithful, AlgebraRep, Faithfulness, KPoly};
use crate::apoly::{irreducible_enum, monic_enum, APoly};
use crate::carlitz::{c_theta, exp_c, pitilde};
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::lambda::LambdaElem;
use crate::matrix::Matrix;
use crate::mpoly::{MPoly, Mono};
use crate::ratfunc::RatFunc;
use crate::report::{residual_val_lmatrix, residual_val_series, CheckReport, Val};
use crate::series::{Precision, TruncSeries};

/// σ = σ_1⋯σ_s with pairwise commuting ϑ_i = σ_i(θ).
#[derive(Clone, Debug, Serialize)]
pub struct SemiCharacter {
    #[serde(skip)]
    field: Fq,
    d: usize,
    factors: Vec<AlgebraRep>,
    /// σ_i(θ^k), k = 0..=cached degree.
    #[serde(skip)]
    powers: Vec<Vec<Matrix<RatFunc>>>,
}

impl SemiCharacter {
    pub fn new(field: Fq, d: usize, factors: Vec<AlgebraRep>) -> Result<Self> {
        for f in &factors {
            if f.dim() != d {
                return Err(Error::Config(format!("factor of dimension {} in a semi-character of dimension {d}", f.dim())));
            }
        }
        for (i, a) in factors.iter().enumerate() {
            for b in &factors[i + 1..] {
                let (x, y) = (&a.theta_image, &b.theta_image);
                if x.mul(y) != y.mul(x) {
                    return Err(Error::Config("the θ-images of a semi-character must commute".into()));
                }
            }
        }
        Ok(SemiCharacter { field, d, factors, powers: vec![] })
    }
    pub fn single(rep: AlgebraRep) -> Self {
        let f = rep.field();
        let d = rep.dim();
        Self::new(f, d, vec![rep]).expect("one factor always commutes")
    }
    /// a ↦ a(t_1)⋯a(t_s), the scalar semi-character of the first s variables.
    pub fn chi_product(field: Fq, s: usize) -> Self {
        Self::new(field, 1, (0..s).map(|i| AlgebraRep::chi(field, i)).collect()).unwrap()
    }
    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn s(&self) -> usize {
        self.factors.len()
    }
    pub fn factors(&self) -> &[AlgebraRep] {
        &self.factors
    }
    fn identity(&self) -> Matrix<RatFunc> {
        Matrix::identity(self.d, RatFunc::zero(self.field))
    }
    /// Cache σ_i(θ^k) for k <= deg so that σ(a) is a product of linear combinations.
    pub fn with_powers(mut self, deg: usize) -> Self {
        self.powers = self
            .factors
            .iter()
            .map(|f| {
                let mut v = vec![self.identity()];
                for k in 1..=deg {
                    v.push(v[k - 1].mul(&f.theta_image));
                }
                v
            })
            .collect();
        self
    }
    /// σ(a) = σ_1(a)⋯σ_s(a); the empty product is I_d.
    pub fn eval(&self, a: &APoly) -> Matrix<RatFunc> {
        let deg = a.degree().unwrap_or(0);
        let mut acc = self.identity();
        for (i, f) in self.factors.iter().enumerate() {
            let m = match self.powers.get(i) {
                Some(pw) if pw.len() > deg => {
                    let mut m = Matrix::zeros(self.d, self.d, RatFunc::zero(self.field));
                    for (k, c) in a.coeffs().iter().enumerate() {
                        if !c.is_zero() {
                            m = m.add(&pw[k].map(RatFunc::zero(self.field), |x| x.scale(*c)));
                        }
                    }
                    m
                }
                _ => f.eval(a),
            };
            acc = acc.mul(&m);
        }
        acc
    }
}

/// The conductor: product of the pairwise distinct minimal polynomials of the ϑ_i.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conductor {
    pub value: KPoly,
    pub factors: Vec<KPoly>,
}

/// Minimal polynomial of a square matrix over K_s (monic, low degree first).
pub fn minimal_polynomial(m: &Matrix<RatFunc>) -> KPoly {
    let n = m.rows();
    let f = m.zero_elem().field();
    let mut powers = vec![Matrix::identity(n, RatFunc::zero(f))];
    loop {
        let k = powers.len();
        let cols: Vec<&Matrix<RatFunc>> = powers.iter().collect();
        let krylov = Matrix::from_fn(n * n, k, RatFunc::zero(f), |r, c| cols[c].entries()[r].clone());
        let ns = krylov.nullspace();
        if let Some(v) = ns.first() {
            let lead = v[k - 1].inv().expect("a minimal relation involves the top power");
            return v.iter().map(|c| c.mul(&lead)).collect();
        }
        let next = powers[k - 1].mul(m);
        powers.push(next);
    }
}

pub fn kpoly_mul(a: &KPoly, b: &KPoly) -> KPoly {
    let f = a[0].field();
    let mut out = vec![RatFunc::zero(f); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

pub fn conductor(sc: &SemiCharacter) -> Result<Conductor> {
    let mut factors: Vec<KPoly> = vec![];
    for f in sc.factors() {
        let mp = minimal_polynomial(&f.theta_image);
        if !factors.contains(&mp) {
            factors.push(mp);
        }
    }
    let one = vec![RatFunc::one(sc.field())];
    let value = factors.iter().fold(one, |acc, p| kpoly_mul(&acc, p));
    Ok(Conductor { value, factors })
}

/// Σ_{a ∈ A^+, deg a <= D} w(a)·a^{-n} for a vector-valued weight, every
/// series known to index n(D+1).
fn dirichlet_sum(field: Fq, n: u32, cutoff: usize, len: usize, weight: impl Fn(&APoly) -> Vec<RatFunc>) -> Vec<TruncSeries> {
    let prec = n as i64 * (cutoff as i64 + 1);
    let mut acc: Vec<Vec<RatFunc>> = vec![vec![RatFunc::zero(field); prec as usize]; len];
    for deg in 0..=cutoff {
        for a in monic_enum(field, deg) {
            let ainv = TruncSeries::from_apoly(&a).pow(n as u64).inv(Some(prec)).expect("a is monic");
            let w = weight(&a);
            for (k, c) in ainv.coeffs().iter().enumerate() {
                let idx = ainv.start() + k as i64;
                let Some(cv) = c.constant_value() else { unreachable!("a^{{-n}} has F_q coefficients") };
                if cv.is_zero() || idx >= prec {
                    continue;
                }
                for (slot, wi) in acc.iter_mut().zip(&w) {
                    if !wi.is_zero() {
                        slot[idx as usize] = slot[idx as usize].add(&wi.scale(cv));
                    }
                }
            }
        }
    }
    acc.into_iter().map(|c| TruncSeries::from_coeffs(field, 1, 0, c, prec)).collect()
}

/// L_σ(n) truncated to deg a <= D; agrees with the full sum to valuation n(D+1).
#[allow(non_snake_case)]
pub fn L_value(sc: &SemiCharacter, n: u32, cutoff: usize) -> Matrix<TruncSeries> {
    let sc = sc.clone().with_powers(cutoff);
    let d = sc.d();
    let f = sc.field();
    if cutoff == 0 {
        return lift(&sc.identity());
    }
    let entries = dirichlet_sum(f, n, cutoff, d * d, |a| sc.eval(a).entries().to_vec());
    Matrix::from_vec(d, d, entries, TruncSeries::zero(f, 1))
}

fn lift(m: &Matrix<RatFunc>) -> Matrix<TruncSeries> {
    let f = m.zero_elem().field();
    m.map(TruncSeries::zero(f, 1), |x| if x.is_zero() { TruncSeries::zero(f, 1) } else { TruncSeries::constant(x.clone()) })
}

fn scale_series(m: &Matrix<TruncSeries>, c: &TruncSeries) -> Matrix<TruncSeries> {
    m.map(m.zero_elem().clone(), |x| x.mul(c))
}

fn truncate_matrix(m: &Matrix<TruncSeries>, prec: i64) -> Matrix<TruncSeries> {
    m.map(m.zero_elem().clone(), |x| x.truncate(prec))
}

/// ∏_{P irreducible, deg P <= D} (I - σ(P)P^{-n})^{-1}, known to index n(D+1).
pub fn euler_product(sc: &SemiCharacter, n: u32, cutoff: usize) -> Matrix<TruncSeries> {
    let sc = sc.clone().with_powers(cutoff);
    let f = sc.field();
    let d = sc.d();
    let prec = n as i64 * (cutoff as i64 + 1);
    let ident = Matrix::identity(d, TruncSeries::zero(f, 1));
    let mut acc = truncate_matrix(&ident, prec);
    for p in irreducible_enum(f, cutoff) {
        let pinv = TruncSeries::from_apoly(&p).pow(n as u64).inv(Some(prec)).expect("P is monic").truncate(prec);
        let x = scale_series(&lift(&sc.eval(&p)), &pinv);
        // (I - X)^{-1} = Σ X^k, X of valuation n·deg P > 0.
        let mut geo = truncate_matrix(&ident, prec);
        let mut pw = x.clone();
        while !pw.entries().iter().all(|e| e.is_known_zero()) {
            geo = geo.add(&pw);
            pw = truncate_matrix(&pw.mul(&x), prec);
        }
        acc = acc.mul(&geo);
    }
    acc
}

/// 𝓛_s(n) = Σ a(x_1)⋯a(x_s) a^{-n} over deg a <= D, with x_j the t-variable of index j.
#[allow(non_snake_case)]
pub fn pellarin_L(field: Fq, s: usize, n: u32, cutoff: usize) -> TruncSeries {
    dirichlet_sum(field, n, cutoff, 1, |a| {
        let w = (0..s).fold(MPoly::one(field), |acc, j| acc.mul(&MPoly::from_apoly(a, j)));
        vec![RatFunc::from_poly(w)]
    })
    .pop()
    .unwrap()
}

/// Square root of a monomial c·m² with c a square in F_q.
fn monomial_sqrt(x: &RatFunc) -> Option<MPoly> {
    let p = x.as_poly()?;
    let [(m, c)] = p.terms() else { return None };
    let exps = m.exps();
    if exps.iter().any(|e| e % 2 == 1) {
        return None;
    }
    let f = p.field();
    let r = f.elements().into_iter().find(|y| *y * *y == *c)?;
    let half: Vec<u32> = exps.iter().map(|e| e / 2).collect();
    Some(MPoly::term(r, Mono::from_exps(&half)))
}

/// The joint eigenvalue tuples of the ϑ_i in the designed solvable family:
/// d = 1, or d = 2 with every ϑ_i trace-free and ϑ_i² a scalar monomial square.
fn eigen_tuples(sc: &SemiCharacter) -> Result<Vec<Vec<MPoly>>> {
    let f = sc.field();
    let unsupported = || Error::Unsupported("det_L_check needs the solvable family (d = 1, or d = 2 with ϑ_i² = u_i²)".into());
    match sc.d() {
        1 => {
            let t = sc.factors().iter().map(|r| r.theta_image.get(0, 0).as_poly().cloned()).collect::<Option<Vec<_>>>().ok_or_else(unsupported)?;
            Ok(vec![t])
        }
        2 => {
            if f.p() == 2 {
                return Err(unsupported());
            }
            let Some(base) = sc.factors().iter().find(|r| !r.theta_image.get(0, 1).is_zero() || !r.theta_image.get(1, 0).is_zero()) else {
                return Err(unsupported());
            };
            let th = &base.theta_image;
            let sq = th.mul(th);
            if !th.trace().is_zero() || !sq.get(0, 1).is_zero() || !sq.get(1, 0).is_zero() || sq.get(0, 0) != sq.get(1, 1) {
                return Err(unsupported());
            }
            let m = RatFunc::from_poly(monomial_sqrt(sq.get(0, 0)).ok_or_else(unsupported)?);
            let (r, c) = if th.get(0, 1).is_zero() { (1, 0) } else { (0, 1) };
            let mut plus = vec![];
            for fac in sc.factors() {
                let b = fac.theta_image.get(r, c).div(th.get(r, c)).ok_or_else(unsupported)?;
                let scaled = th.map(RatFunc::zero(f), |x| x.mul(&b));
                if scaled != fac.theta_image {
                    return Err(unsupported());
                }
                plus.push(b.mul(&m).as_poly().cloned().ok_or_else(unsupported)?);
            }
            let minus = plus.iter().map(|x| x.neg()).collect();
            Ok(vec![plus, minus])
        }
        _ => Err(unsupported()),
    }
}

/// det L_σ(n) against ∏_i 𝓛_s(n) at the i-th eigenvalue tuple, to valuation n(D+1).
#[allow(non_snake_case)]
pub fn det_L_check(sc: &SemiCharacter, n: u32, cutoff: usize) -> Result<CheckReport> {
    let f = sc.field();
    let tuples = eigen_tuples(sc)?;
    let s = sc.s();
    let big = pellarin_L(f, s, n, cutoff);
    let mut rhs = TruncSeries::one(f);
    for t in &tuples {
        rhs = rhs.mul(&big.subst(t)?);
    }
    let lhs = L_value(sc, n, cutoff).det_generic();
    let target = n as i64 * (cutoff as i64 + 1);
    let res = residual_val_series(&lhs.sub(&rhs));
    Ok(CheckReport::new("detL")
        .param("q", f.q())
        .param("d", sc.d())
        .param("s", s)
        .param("n", n)
        .param("cutoff", cutoff)
        .with_residual(res, Ratio::from_integer(target)))
}

fn lambda_matrix(m: &Matrix<TruncSeries>, k: usize) -> Matrix<LambdaElem> {
    let f = m.zero_elem().field();
    m.map(LambdaElem::zero(f), |x| if x.is_exact_zero() { LambdaElem::zero(f) } else { LambdaElem::from_component(x.clone(), k) })
}

fn scale_lambda(m: &Matrix<LambdaElem>, c: &LambdaElem) -> Matrix<LambdaElem> {
    m.map(m.zero_elem().clone(), |x| x.mul(c))
}

/// Σ_{k} ϑ^k θ^{-k·step} over k·step < prec: the expansion of (I - ϑθ^{-step})^{-1}.
fn geometric(theta: &Matrix<RatFunc>, step: i64, prec: i64) -> Matrix<TruncSeries> {
    let f = theta.zero_elem().field();
    let d = theta.rows();
    let mut acc = Matrix::zeros(d, d, TruncSeries::zero(f, 1));
    let mut pw = Matrix::identity(d, RatFunc::zero(f));
    let mut k = 0;
    while k * step < prec {
        let term = pw.map(TruncSeries::zero(f, 1), |x| {
            if x.is_zero() {
                TruncSeries::zero(f, 1)
            } else {
                TruncSeries::monomial(x.clone(), k * step, 1)
            }
        });
        acc = acc.add(&term);
        pw = pw.mul(theta);
        k += 1;
    }
    truncate_matrix(&acc, prec)
}

/// (θI - ϑ)^{-1} = Σ_k ϑ^k θ^{-k-1}, known to index `prec`.
pub fn resolvent(theta: &Matrix<RatFunc>, prec: i64) -> Matrix<TruncSeries> {
    let f = theta.zero_elem().field();
    let g = geometric(theta, 1, prec - 1);
    scale_series(&g, &TruncSeries::theta_pow(f, -1))
}

/// Π_σ and Π_σ^{-1} to a common index; ω_σ = λ_θ Π_σ.
#[derive(Clone, Debug)]
pub struct OmegaValue {
    pub theta: Matrix<RatFunc>,
    pub pi: Matrix<TruncSeries>,
    pub pi_inv: Matrix<TruncSeries>,
    pub prec: i64,
    pub faithful: bool,
}

impl OmegaValue {
    pub fn field(&self) -> Fq {
        self.theta.zero_elem().field()
    }
    pub fn omega(&self) -> Matrix<LambdaElem> {
        lambda_matrix(&self.pi, 1)
    }
    /// ω_σ^{-1} = λ_θ^{-1} Π_σ^{-1}.
    pub fn omega_inv(&self) -> Matrix<LambdaElem> {
        let f = self.field();
        let linv = LambdaElem::lambda(f).inv(None).expect("λ is a unit");
        scale_lambda(&lambda_matrix(&self.pi_inv, 0), &linv)
    }
}

/// Π_σ = ∏_{i>=0} (I - ϑθ^{-q^i})^{-1}, its inverse being the finite product
/// of the factors themselves, both to index `prec.working()`.
pub fn omega_value(rep: &AlgebraRep, prec: Precision) -> Result<OmegaValue> {
    let f = rep.field();
    let q = f.q() as i64;
    let w = prec.working();
    if w <= 0 {
        return Err(Error::InsufficientPrecision("ω needs a positive working precision".into()));
    }
    let theta = rep.theta_image.clone();
    let d = rep.dim();
    let ident = truncate_matrix(&Matrix::identity(d, TruncSeries::zero(f, 1)), w);
    let mut pi = ident.clone();
    let mut pi_inv = ident.clone();
    let mut step = 1;
    while step < w {
        pi = truncate_matrix(&pi.mul(&geometric(&theta, step, w)), w);
        let factor = lift(&Matrix::identity(d, RatFunc::zero(f))).sub(&scale_series(&lift(&theta), &TruncSeries::theta_pow(f, -step)));
        pi_inv = truncate_matrix(&pi_inv.mul(&factor), w);
        step *= q;
    }
    let faithful = matches!(is_faithful(rep), Faithfulness::Faithful { .. });
    Ok(OmegaValue { theta, pi, pi_inv, prec: w, faithful })
}

fn entrywise_tau(m: &Matrix<LambdaElem>) -> Matrix<LambdaElem> {
    m.map(m.zero_elem().clone(), |x| x.tau(1))
}

/// ϑ - θI as a λ-matrix.
fn theta_minus(theta: &Matrix<RatFunc>) -> Matrix<LambdaElem> {
    let f = theta.zero_elem().field();
    let th = scale_series(&Matrix::identity(theta.rows(), TruncSeries::zero(f, 1)), &TruncSeries::theta_pow(f, 1));
    lambda_matrix(&lift(theta).sub(&th), 0)
}

/// v(τ(ω) - (ϑ - θI)ω).
pub fn tau_residual(om: &OmegaValue) -> Val {
    let w = om.omega();
    residual_val_lmatrix(&entrywise_tau(&w).sub(&theta_minus(&om.theta).mul(&w)))
}

pub fn check_tau_equation(om: &OmegaValue, target: i64) -> CheckReport {
    let mut r = CheckReport::new("tau")
        .param("q", om.field().q())
        .param("d", om.theta.rows())
        .param("working_precision", om.prec)
        .with_residual(tau_residual(om), Ratio::from_integer(target));
    if !om.faithful {
        r.note("σ is not faithful");
    }
    r
}

/// v(ω_σ - exp_C(π̃(θI - ϑ)^{-1})).
pub fn exp_formula_residual(rep: &AlgebraRep, prec: Precision) -> Result<(Val, bool)> {
    let f = rep.field();
    let om = omega_value(rep, prec)?;
    let w = prec.working();
    let pit = pitilde(f, w);
    let arg = scale_lambda(&lambda_matrix(&resolvent(&rep.theta_image, w + 2), 0), &pit);
    let e = arg.try_map(LambdaElem::zero(f), |x| exp_c(x, w))?;
    Ok((residual_val_lmatrix(&om.omega().sub(&e)), om.faithful))
}

pub fn check_exp_formula(rep: &AlgebraRep, prec: Precision) -> Result<CheckReport> {
    let (res, faithful) = exp_formula_residual(rep, prec)?;
    let mut r = CheckReport::new("exp")
        .param("q", rep.field().q())
        .param("d", rep.dim())
        .with_residual(res, Ratio::from_integer(prec.target));
    if !faithful {
        r.note("σ is not faithful: outside the precondition");
        r.status = crate::report::Status::Diagnostic;
    }
    Ok(r)
}

fn lambda_product(ms: &[Matrix<LambdaElem>], d: usize, f: Fq) -> Matrix<LambdaElem> {
    ms.iter().fold(Matrix::identity(d, LambdaElem::zero(f)), |acc, m| acc.mul(m))
}

fn omegas(sc: &SemiCharacter, working: i64) -> Result<Vec<OmegaValue>> {
    sc.factors().iter().map(|r| omega_value(r, Precision::new(working, 0))).collect()
}

/// Σ_{deg a <= D} a^{-1} C_a(ω_1)⋯C_a(ω_s) against L_σ(1)ω_1⋯ω_s. The tail of
/// the left side has valuation >= (D+1) - s/(q-1).
pub fn series_identity_s(sc: &SemiCharacter, cutoff: usize, prec: Precision) -> Result<CheckReport> {
    let f = sc.field();
    let (q, d, s) = (f.q() as i64, sc.d(), sc.s());
    if s == 0 {
        return Err(Error::Unsupported("the series identity needs s >= 1".into()));
    }
    let bound = Ratio::from_integer(prec.target.min(cutoff as i64 + 1)) - Ratio::new(s as i64, q - 1);
    let working = prec.target.min(cutoff as i64 + 1) + prec.guard + cutoff as i64 + 2;
    let oms = omegas(sc, working)?;
    // C_{θ^j}(ω_i) for j <= D, so that C_a(ω_i) = Σ a_j C_{θ^j}(ω_i).
    let iterates: Vec<Vec<Matrix<LambdaElem>>> = oms
        .iter()
        .map(|om| {
            let mut v = vec![om.omega()];
            for j in 1..=cutoff {
                let prev: &Matrix<LambdaElem> = &v[j - 1];
                v.push(prev.map(LambdaElem::zero(f), c_theta));
            }
            v
        })
        .collect();
    let mut lhs = Matrix::zeros(d, d, LambdaElem::zero(f));
    for deg in 0..=cutoff {
        for a in monic_enum(f, deg) {
            let ainv = LambdaElem::from_series(TruncSeries::from_apoly(&a).inv(Some(working))?);
            let mut prod = Matrix::identity(d, LambdaElem::zero(f));
            for it in &iterates {
                let mut ca = Matrix::zeros(d, d, LambdaElem::zero(f));
                for (j, c) in a.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        ca = ca.add(&it[j].map(LambdaElem::zero(f), |x| x.scale_rf(&RatFunc::constant(*c))));
                    }
                }
                prod = prod.mul(&ca);
            }
            lhs = lhs.add(&scale_lambda(&prod, &ainv));
        }
    }
    let big_omega = lambda_product(&oms.iter().map(|o| o.omega()).collect::<Vec<_>>(), d, f);
    let l1 = lambda_matrix(&L_value(sc, 1, cutoff), 0);
    let rhs = l1.mul(&big_omega);
    let res = residual_val_lmatrix(&lhs.sub(&rhs));
    let invertible = !rhs.det_generic().is_known_zero();
    Ok(CheckReport::new("series1")
        .param("q", q)
        .param("d", d)
        .param("s", s)
        .param("cutoff", cutoff)
        .with_residual(res, bound)
        .and(invertible, "L_σ(1)ω_1⋯ω_s is not invertible to precision"))
}

/// Lowest valuation of the part of x outside K_s[θ]: λ-components j >= 1 and
/// the θ^{-n} tail (n > 0) of the λ^0 component.
pub fn non_polynomial_valuation(x: &LambdaElem) -> Val {
    let n = x.comps().len() as i64;
    let mut v = residual_val_series(&x.comp(0).split_at_zero().1);
    for (j, c) in x.comps().iter().enumerate().skip(1) {
        if let Val::Finite(w) = residual_val_series(c) {
            v = v.min(Val::Finite(w - Ratio::new(j as i64, n)));
        }
    }
    v
}

fn non_polynomial_valuation_matrix(m: &Matrix<LambdaElem>) -> Val {
    m.entries().iter().map(non_polynomial_valuation).min().unwrap_or(Val::Infinite)
}

#[derive(Clone, Debug, Serialize)]
pub struct TaelmanResult {
    pub s_matrix: Matrix<LambdaElem>,
    pub b_matrix: Option<Matrix<LambdaElem>>,
    pub report: CheckReport,
}

/// S_σ = Ω^{-1} exp_C(Ω L_σ(1)) with Ω = ω_1⋯ω_s, known to valuation D+1.
/// S_σ must be polynomial; S_σ = I for s = 1; S_σ = 0 when s > 1 and
/// s ≡ 1 mod q-1, in which case 𝔹_σ = π̃^{-1} Ω L_σ(1) is polynomial too.
#[allow(non_snake_case)]
pub fn taelman_S(sc: &SemiCharacter, cutoff: usize, prec: Precision) -> Result<TaelmanResult> {
    let f = sc.field();
    let (q, d, s) = (f.q() as i64, sc.d(), sc.s());
    if s == 0 {
        return Err(Error::Unsupported("S_σ needs s >= 1".into()));
    }
    let guaranteed = prec.target.min(cutoff as i64 + 1);
    let working = guaranteed + prec.guard;
    let oms = omegas(sc, working)?;
    let big_omega = lambda_product(&oms.iter().map(|o| o.omega()).collect::<Vec<_>>(), d, f);
    let omega_inv = lambda_product(&oms.iter().rev().map(|o| o.omega_inv()).collect::<Vec<_>>(), d, f);
    let l1 = lambda_matrix(&L_value(sc, 1, cutoff), 0);
    let m = big_omega.mul(&l1);
    let e = m.try_map(LambdaElem::zero(f), |x| exp_c(x, working))?;
    let s_mat = omega_inv.mul(&e);
    let g = Ratio::from_integer(guaranteed);

    let poly_v = non_polynomial_valuation_matrix(&s_mat);
    let mut report = CheckReport::new("taelman")
        .param("q", q)
        .param("d", d)
        .param("s", s)
        .param("cutoff", cutoff)
        .with_residual(poly_v, g);
    report.note(format!("S_σ polynomial to valuation {poly_v}"));
    let zero_expected = s > 1 && (s as i64 - 1) % (q - 1) == 0;
    let mut b_matrix = None;
    if s == 1 {
        let ident = Matrix::identity(d, LambdaElem::zero(f));
        let v = residual_val_lmatrix(&s_mat.sub(&ident));
        report.note(format!("S_σ - I vanishes to valuation {v}"));
        report = report.and(v.at_least(g), "S_σ = I for s = 1");
    } else if zero_expected {
        let v = residual_val_lmatrix(&s_mat);
        report.note(format!("S_σ vanishes to valuation {v}"));
        report = report.and(v.at_least(g), "S_σ = 0 for s ≡ 1 mod q-1, s > 1");
        let pinv = pitilde(f, working + 2).inv(None)?;
        let b = scale_lambda(&m, &pinv);
        let k = (s as i64 - 1) / (q - 1);
        let b_bound = Ratio::from_integer(prec.target.min(cutoff as i64 + 2 - k));
        let bv = non_polynomial_valuation_matrix(&b);
        report.note(format!("𝔹_σ polynomial to valuation {bv}"));
        report = report.and(bv.at_least(b_bound), "𝔹_σ polynomial");
        b_matrix = Some(b);
    }
    Ok(TaelmanResult { s_matrix: s_mat, b_matrix, report })
}

/// L_σ(1) - ω_σ^{-1}(θI - ϑ)^{-1}π̃ for s = 1, to valuation min(target, D+1).
#[allow(non_snake_case)]
pub fn L1_explicit_check(rep: &AlgebraRep, cutoff: usize, prec: Precision) -> Result<CheckReport> {
    let f = rep.field();
    let guaranteed = prec.target.min(cutoff as i64 + 1);
    let working = guaranteed + prec.guard;
    let om = omega_value(rep, Precision::new(working, 0))?;
    let res_m = lambda_matrix(&resolvent(&rep.theta_image, working + 2), 0);
    let rhs = scale_lambda(&om.omega_inv().mul(&res_m), &pitilde(f, working + 2));
    let lhs = lambda_matrix(&L_value(&SemiCharacter::single(rep.clone()), 1, cutoff), 0);
    let res = residual_val_lmatrix(&lhs.sub(&rhs));
    Ok(CheckReport::new("L1")
        .param("q", f.q())
        .param("d", rep.dim())
        .param("cutoff", cutoff)
        .with_residual(res, Ratio::from_integer(guaranteed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algrep::{companion_sigma, CompanionSpec};
    use crate::field::{FieldConfig, FqElem};
    use crate::report::residual_val_matrix;

    fn t(f: Fq, i: usize) -> RatFunc {
        RatFunc::var(f, i)
    }
    /// companion(x² + c1 x + c0)
    fn comp2(c0: RatFunc, c1: RatFunc) -> AlgebraRep {
        let f = c0.field();
        companion_sigma(&CompanionSpec::new(vec![c0, c1, RatFunc::one(f)]).unwrap())
    }
    fn j_family(f: Fq, s: usize) -> SemiCharacter {
        let reps = (0..s)
            .map(|i| {
                let u = t(f, i);
                let z = RatFunc::zero(f);
                AlgebraRep::new(Matrix::from_rows(vec![vec![z.clone(), u.clone()], vec![u, z]]))
            })
            .collect();
        SemiCharacter::new(f, 2, reps).unwrap()
    }

    /// Power series of N/Dn in θ^{-1}, by schoolbook long division over F_q.
    fn expand_fraction(num: &APoly, den: &APoly, len: usize) -> Vec<FqElem> {
        let f = num.field();
        let shift = den.degree().unwrap() as i64 - num.degree().unwrap() as i64;
        assert!(shift >= 0);
        let dn = den.degree().unwrap();
        let mut rem: Vec<FqElem> = (0..len + dn + 1).map(|i| if i <= num.degree().unwrap() { num.coeff(num.degree().unwrap() - i) } else { f.zero() }).collect();
        let lead = den.lead();
        let mut out = vec![f.zero(); shift as usize];
        for k in 0..len {
            let c = rem[k] / lead;
            out.push(c);
            for j in 0..=dn {
                let v = rem[k + j] - c * den.coeff(dn - j);
                rem[k + j] = v;
            }
        }
        out.truncate(len);
        out
    }

    #[test]
    fn zeta_truncation_matches_fraction_sum() {
        let f = FieldConfig::builtin(3).unwrap();
        let sc = SemiCharacter::new(f, 1, vec![]).unwrap();
        let l = L_value(&sc, 1, 2);
        let monics: Vec<APoly> = (0..=2).flat_map(|d| monic_enum(f, d)).collect();
        assert_eq!(monics.len(), 13);
        let den = monics.iter().fold(APoly::one(f), |a, b| a.mul(b));
        let num = monics.iter().fold(APoly::zero(f), |acc, a| acc.add(&den.div_rem(a).0));
        let want = expand_fraction(&num, &den, 3);
        let got: Vec<FqElem> = (0..3).map(|k| l.get(0, 0).coeff(k).unwrap().constant_value().unwrap()).collect();
        assert_eq!(got, want);
        assert_eq!(l.get(0, 0).prec(), 3);
    }

    #[test]
    fn cutoff_zero_is_identity() {
        let f = FieldConfig::builtin(3).unwrap();
        let sc = SemiCharacter::single(comp2(t(f, 0).neg(), RatFunc::zero(f)));
        let l = L_value(&sc, 2, 0);
        assert!(l.is_identity());
        assert!(l.entries().iter().all(|e| e.is_exact()));
        assert!(euler_product(&sc, 1, 0).entries().iter().zip(l.entries()).all(|(a, b)| a.sub(b).is_known_zero()));
    }

    #[test]
    fn chi_t_is_pellarin() {
        for q in [2, 3] {
            let f = FieldConfig::builtin(q).unwrap();
            let l = L_value(&SemiCharacter::chi_product(f, 2), 1, 3);
            assert_eq!(*l.get(0, 0), pellarin_L(f, 2, 1, 3));
        }
    }

    #[test]
    fn euler_product_agrees_with_sum() {
        let f2 = FieldConfig::builtin(2).unwrap();
        let sc = SemiCharacter::chi_product(f2, 1);
        let diff = L_value(&sc, 1, 4).sub(&euler_product(&sc, 1, 4));
        assert!(residual_val_matrix(&diff).at_least(Ratio::from_integer(5)));
        let f3 = FieldConfig::builtin(3).unwrap();
        let z = SemiCharacter::new(f3, 1, vec![]).unwrap();
        let diff = L_value(&z, 2, 3).sub(&euler_product(&z, 2, 3));
        assert!(residual_val_matrix(&diff).at_least(Ratio::from_integer(8)));
        let sc = SemiCharacter::single(comp2(t(f3, 0).neg(), t(f3, 0).neg()));
        for n in [1, 2] {
            let diff = L_value(&sc, n, 3).sub(&euler_product(&sc, n, 3));
            assert!(residual_val_matrix(&diff).at_least(Ratio::from_integer(4 * n as i64)));
        }
    }

    #[test]
    fn multiplicativity() {
        let f = FieldConfig::builtin(3).unwrap();
        let sc = j_family(f, 2).with_powers(4);
        let a = APoly::from_codes(f, &[1, 2, 1]);
        let b = APoly::from_codes(f, &[2, 1]);
        assert_eq!(sc.eval(&a.mul(&b)), sc.eval(&a).mul(&sc.eval(&b)));
        let sc2 = j_family(f, 2);
        assert_eq!(sc2.eval(&a.mul(&b)), sc.eval(&a).mul(&sc.eval(&b)));
    }

    #[test]
    fn non_commuting_factors_rejected() {
        let f = FieldConfig::builtin(3).unwrap();
        let a = comp2(t(f, 0).neg(), RatFunc::zero(f));
        let b = comp2(t(f, 1).neg(), RatFunc::zero(f));
        assert!(SemiCharacter::new(f, 2, vec![a, b]).is_err());
    }

    #[test]
    fn conductors() {
        let f = FieldConfig::builtin(3).unwrap();
        let p1 = comp2(t(f, 0).neg(), RatFunc::zero(f));
        let p2 = comp2(t(f, 0).neg(), RatFunc::one(f));
        let c = conductor(&SemiCharacter::single(p1.clone())).unwrap();
        assert_eq!(c.value, p1.companion_of.clone().unwrap().coeffs);
        let both = SemiCharacter::new(f, 2, vec![p1.clone(), p1.clone()]).unwrap();
        assert_eq!(conductor(&both).unwrap().factors.len(), 1);
        let chis = SemiCharacter::chi_product(f, 2);
        let c2 = conductor(&chis).unwrap();
        let want = kpoly_mul(&vec![t(f, 0).neg(), RatFunc::one(f)], &vec![t(f, 1).neg(), RatFunc::one(f)]);
        assert_eq!(c2.value, want);
        assert_eq!(minimal_polynomial(&p2.theta_image), p2.companion_of.unwrap().coeffs);
        let empty = SemiCharacter::new(f, 2, vec![]).unwrap();
        assert_eq!(conductor(&empty).unwrap().value, vec![RatFunc::one(f)]);
    }

    #[test]
    fn determinant_lemma() {
        let f = FieldConfig::builtin(3).unwrap();
        let u2 = t(f, 0).mul(&t(f, 0));
        let sc = SemiCharacter::single(comp2(u2.neg(), RatFunc::zero(f)));
        for n in [1, 2] {
            assert!(det_L_check(&sc, n, 4).unwrap().passed());
        }
        assert!(det_L_check(&j_family(f, 2), 1, 4).unwrap().passed());
        assert!(det_L_check(&SemiCharacter::chi_product(f, 2), 1, 3).unwrap().passed());
        let bad = SemiCharacter::single(comp2(t(f, 0).neg(), RatFunc::zero(f)));
        assert!(matches!(det_L_check(&bad, 1, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn omega_leading_term() {
        for q in [2, 3, 4] {
            let f = FieldConfig::builtin(q).unwrap();
            let rep = comp2(t(f, 0).neg(), t(f, 0).neg());
            let om = omega_value(&rep, Precision::new(20, 4)).unwrap();
            let lead = scale_lambda(&lambda_matrix(&resolvent(&rep.theta_image, 30), 0), &LambdaElem::lambda(f).shift_theta(1));
            let v = residual_val_lmatrix(&om.omega().sub(&lead));
            assert!(!v.at_least(Ratio::from_integer(10)));
            assert!(v > Val::Finite(Ratio::new(-1, q as i64 - 1)), "q={q}: {v}");
            let prod = om.omega().mul(&om.omega_inv());
            assert!(residual_val_lmatrix(&prod.sub(&Matrix::identity(2, LambdaElem::zero(f)))).at_least(Ratio::from_integer(20)));
        }
    }

    #[test]
    fn tau_equation() {
        let f = FieldConfig::builtin(3).unwrap();
        for rep in [AlgebraRep::chi(f, 0), comp2(t(f, 0).neg(), RatFunc::zero(f)), comp2(RatFunc::one(f).neg(), t(f, 0).neg())] {
            let om = omega_value(&rep, Precision::new(30, 4)).unwrap();
            let r = check_tau_equation(&om, 30);
            assert!(r.passed(), "{r:?}");
            // ω·m solves the same equation for m ∈ Mat(K_s)
            let m = Matrix::from_fn(rep.dim(), rep.dim(), LambdaElem::zero(f), |i, j| LambdaElem::from_rf(t(f, 1).add(&RatFunc::constant(f.from_int((i + 2 * j) as i64)))));
            let w = om.omega().mul(&m);
            let res = residual_val_lmatrix(&entrywise_tau(&w).sub(&theta_minus(&om.theta).mul(&w)));
            assert!(res.at_least(Ratio::from_integer(30)));
        }
    }

    #[test]
    fn exp_formula() {
        for q in [2, 3] {
            let f = FieldConfig::builtin(q).unwrap();
            for rep in [AlgebraRep::chi(f, 0), comp2(t(f, 0).neg(), RatFunc::zero(f))] {
                let r = check_exp_formula(&rep, Precision::new(25, 6)).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn series_identity() {
        let f = FieldConfig::builtin(3).unwrap();
        for sc in [
            SemiCharacter::chi_product(f, 1),
            SemiCharacter::chi_product(f, 2),
            SemiCharacter::single(comp2(t(f, 0).neg(), RatFunc::zero(f))),
        ] {
            let r = series_identity_s(&sc, 3, Precision::new(60, 4)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn taelman_matrices() {
        let f3 = FieldConfig::builtin(3).unwrap();
        let one = taelman_S(&SemiCharacter::single(comp2(t(f3, 0).neg(), RatFunc::zero(f3))), 4, Precision::new(60, 4)).unwrap();
        assert!(one.report.passed(), "{:?}", one.report);
        let three = taelman_S(&SemiCharacter::chi_product(f3, 3), 4, Precision::new(60, 4)).unwrap();
        assert!(three.report.passed(), "{:?}", three.report);
        assert!(three.b_matrix.is_some());
        let f2 = FieldConfig::builtin(2).unwrap();
        let two = taelman_S(&SemiCharacter::chi_product(f2, 2), 5, Precision::new(60, 4)).unwrap();
        assert!(two.report.passed(), "{:?}", two.report);
    }

    #[test]
    fn l1_explicit() {
        let f = FieldConfig::builtin(3).unwrap();
        for rep in [AlgebraRep::chi(f, 0), comp2(t(f, 0).neg(), RatFunc::zero(f))] {
            let r = L1_explicit_check(&rep, 6, Precision::new(60, 4)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
