//! The verification suite: one entry per acceptance criterion, each a list of
//! [`CheckReport`]s, plus single named checks.

use std::time::Instant;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algrep::{companion_sigma, AlgebraRep, CompanionSpec};
use crate::amalgam::{essential_dimension_diag, nagao_decompose, phi_infty, phi_retract, sample_entries, word_product};
use crate::apoly::APoly;
use crate::carlitz::{exp_c, pitilde};
use crate::combinat::{digit_sequence, phi_p};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, Fq};
use crate::gamma::{carry_free_check, homomorphism_check, intertwiner, random_pairs, Functor, GammaElem, GammaRep};
use crate::lfunc::{check_exp_formula, check_tau_equation, det_L_check, euler_product, omega_value, series_identity_s, taelman_S, L1_explicit_check, L_value, SemiCharacter};
use crate::matrix::Matrix;
use crate::meataxe::{generic_irreducible, meataxe, rho_bar_generators, GenericOptions, GenericVerdict, MeataxeVerdict};
use crate::modular::{default_rank_points, factorization_check, functional_eq_check, poincare_specialize_check, rank_check, u_limit_check, vanishing_check, vanishing_class, OmegaPoint};
use crate::parse::{parse_gamma, parse_point, parse_rep, parse_sigma};
use crate::ratfunc::RatFunc;
use crate::report::{residual_val_lambda, residual_val_matrix, CheckReport, Status};
use crate::series::Precision;

pub const SCHEMA_VERSION: u32 = 1;

/// Run parameters; every field has a default so partial config files work.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub q: Option<u32>,
    pub p: Option<u32>,
    pub e: Option<u32>,
    /// Coefficients of the defining polynomial over F_p, low degree first.
    pub modulus: Option<Vec<u32>>,
    pub s: usize,
    pub prec: i64,
    pub guard: i64,
    pub cutoff: usize,
    pub sample_degree: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { q: Some(3), p: None, e: None, modulus: None, s: 1, prec: 60, guard: 8, cutoff: 6, sample_degree: 2, seed: 1 }
    }
}

impl RunConfig {
    pub fn field(&self) -> Result<Fq> {
        match (&self.modulus, self.q, self.p, self.e) {
            (Some(m), _, Some(p), e) => FieldConfig::with_modulus(p, e.unwrap_or(m.len() as u32 - 1), m),
            (Some(_), _, None, _) => Err(Error::Config("a modulus needs --p".into())),
            (None, Some(q), None, None) => FieldConfig::builtin(q),
            (None, q, Some(p), e) => {
                let f = FieldConfig::get(p, e.unwrap_or(1))?;
                match q {
                    Some(q) if q != f.q() => Err(Error::Config(format!("q = {q} but p^e = {}", f.q()))),
                    _ => Ok(f),
                }
            }
            (None, _, None, Some(_)) => Err(Error::Config("--e needs --p".into())),
            (None, None, None, None) => Err(Error::Config("no field given".into())),
        }
    }
    pub fn validate(&self) -> Result<Fq> {
        let f = self.field()?;
        if self.s == 0 || self.s > 6 {
            return Err(Error::Config(format!("s = {} out of range 1..=6", self.s)));
        }
        if self.prec < 1 || self.guard < 0 {
            return Err(Error::Config("precision must be positive and guard nonnegative".into()));
        }
        Ok(f)
    }
    pub fn precision(&self) -> Precision {
        Precision::new(self.prec, self.guard)
    }
    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    /// The statement being checked.
    pub anchor: String,
    pub status: Status,
    pub checks: Vec<CheckReport>,
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed())
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let mark = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Diagnostic => "DIAG",
            };
            out.push_str(&format!("[{mark}] {:>2} {} ({} checks, {} ms)\n", c.id, c.title, c.checks.len(), c.runtime_ms));
            for r in c.checks.iter().filter(|r| r.status == Status::Fail) {
                out.push_str(&format!("       fail: {} {}\n", r.check, serde_json::to_string(&r.params).unwrap_or_default()));
                for n in &r.notes {
                    out.push_str(&format!("             {n}\n"));
                }
            }
        }
        out
    }
}

pub const CRITERIA: [(u32, &str, &str); 18] = [
    (1, "omega difference equation", "τ(X)=(σ(θ)−θI_d)X"),
    (2, "exp_C formula", "ω_σ=exp_C(π̃(θI_d−σ(θ))^{-1}); kernel π̃ Mat"),
    (3, "L-value consistency", "L_σ(n)=∏_P(I_d−σ(P)P^{-n})^{-1}=I_d+⋯"),
    (4, "s=1 formula and Taelman units", "L_σ(1)=ω_σ^{-1}(θI_d−ϑ)^{-1}π̃; S_σ=0 if s≡1 (mod q−1) and s>1"),
    (5, "determinant lemma", "det L_σ(n)=∏_i 𝓛_s(n) at the eigenvalues"),
    (6, "representation homomorphism", "ρ(γγ′)=ρ(γ)ρ(γ′)"),
    (7, "Brauer-Nesbitt boundary", "irreducible if and only if l<q′"),
    (8, "star representation inside digits", "isomorphic to a sub-representation of ρ_l"),
    (9, "generic irreducibility", "the representation ρ^I_{t,l} is irreducible; ρ^{II} is irreducible"),
    (10, "carry-free evaluation", "no carry over in the p-expansion"),
    (11, "digit combinatorics", "φ_p(1+p)=4"),
    (12, "Eisenstein factorization", "𝓖_{w,σ}=L_σ(w)𝓔_{w,0,ρ}"),
    (13, "exact vanishing", "then 𝓔_{w,m,ρ}=0, identically"),
    (14, "rank and independence", "the rank is d; 𝕂-linearly independent"),
    (15, "u to 0 limit", "𝓔_{w,0,ρ}→(0,…,0,1)"),
    (16, "functional equation diagnostic", "𝓔(γz)=J_γ(z)^w det(γ)^{-m} 𝓔(z)ρ(γ)^{-1}"),
    (17, "Nagao amalgam", "GL₂(k[t])=GL₂(k)∗_{B(k)}B(k[t])"),
    (18, "reproducibility", "identical config and seed give identical reports"),
];

fn criterion_fn(id: u32) -> fn(&RunConfig) -> Result<Vec<CheckReport>> {
    match id {
        1 => crit_tau,
        2 => crit_exp,
        3 => crit_lvalues,
        4 => crit_taelman,
        5 => crit_det,
        6 => crit_homomorphism,
        7 => crit_brauer_nesbitt,
        8 => crit_star,
        9 => crit_generic,
        10 => crit_carry_free,
        11 => crit_digits,
        12 => crit_factorization,
        13 => crit_vanishing,
        14 => crit_rank,
        15 => crit_ulimit,
        16 => crit_functional,
        17 => crit_nagao,
        _ => crit_reproducibility,
    }
}

/// Run one acceptance criterion.
pub fn run_criterion(cfg: &RunConfig, id: u32) -> Result<CriterionReport> {
    cfg.validate()?;
    let &(_, title, anchor) = CRITERIA.iter().find(|c| c.0 == id).ok_or_else(|| Error::UnknownCheck(format!("criterion {id}")))?;
    let start = Instant::now();
    let checks = match criterion_fn(id)(cfg) {
        Ok(c) => c,
        Err(e) => {
            let mut r = CheckReport::new("error").with_status(false);
            r.note(e.to_string());
            vec![r]
        }
    };
    let status = if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else if checks.iter().all(|c| c.status == Status::Diagnostic) {
        Status::Diagnostic
    } else {
        Status::Pass
    };
    Ok(CriterionReport { id, title: title.into(), anchor: anchor.into(), status, checks, runtime_ms: start.elapsed().as_millis() })
}

/// Run the criteria `ids` concurrently; the report order follows `ids`.
pub fn verify_ids(cfg: &RunConfig, ids: &[u32]) -> Result<SuiteReport> {
    cfg.validate()?;
    let criteria = std::thread::scope(|sc| {
        let handles: Vec<_> = ids.iter().map(|&id| sc.spawn(move || run_criterion(cfg, id))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect::<Result<Vec<_>>>()
    })?;
    Ok(SuiteReport { schema_version: SCHEMA_VERSION, config: cfg.clone(), criteria })
}

/// The full suite.
pub fn verify_all(cfg: &RunConfig) -> Result<SuiteReport> {
    verify_ids(cfg, &CRITERIA.iter().map(|c| c.0).collect::<Vec<_>>())
}

fn builtin(q: u32) -> Fq {
    FieldConfig::builtin(q).expect("builtin field")
}

/// The fields `qs`, plus the configured one.
fn fields(cfg: &RunConfig, qs: &[u32]) -> Result<Vec<Fq>> {
    let mut v: Vec<Fq> = qs.iter().map(|&q| builtin(q)).collect();
    let f = cfg.field()?;
    if !v.iter().any(|g| g.same(f)) {
        v.push(f);
    }
    Ok(v)
}

fn rf(f: Fq, coeffs: &[RatFunc]) -> AlgebraRep {
    let mut c = coeffs.to_vec();
    c.push(RatFunc::one(f));
    companion_sigma(&CompanionSpec::new(c).expect("monic"))
}

/// χ_t, companion(x² − t), companion(x² − tx − 1).
fn sigma_family(f: Fq) -> Vec<(&'static str, AlgebraRep)> {
    let t = RatFunc::var(f, 0);
    vec![
        ("chi", AlgebraRep::chi(f, 0)),
        ("companion:x^2-t", rf(f, &[t.neg(), RatFunc::zero(f)])),
        ("companion:x^2-t*x-1", rf(f, &[RatFunc::one(f).neg(), t.neg()])),
    ]
}

fn crit_tau(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for f in fields(cfg, &[2, 3, 4])? {
        for (name, rep) in sigma_family(f) {
            let om = omega_value(&rep, cfg.precision())?;
            out.push(check_tau_equation(&om, cfg.prec).param("sigma", name));
        }
    }
    Ok(out)
}

fn crit_exp(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for f in fields(cfg, &[2, 3, 4])? {
        for (name, rep) in sigma_family(f) {
            out.push(check_exp_formula(&rep, cfg.precision())?.param("sigma", name));
        }
        let w = cfg.precision().working();
        let e = exp_c(&pitilde(f, w), w)?;
        out.push(CheckReport::new("exp_pitilde").param("q", f.q()).with_residual(residual_val_lambda(&e), Ratio::from_integer(cfg.prec)));
    }
    Ok(out)
}

fn crit_lvalues(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    let d = cfg.cutoff;
    for f in fields(cfg, &[2, 3, 4])? {
        for (name, rep) in sigma_family(f) {
            let sc = SemiCharacter::single(rep);
            for n in [1u32, 2] {
                let diff = L_value(&sc, n, d).sub(&euler_product(&sc, n, d));
                out.push(
                    CheckReport::new("lseries")
                        .param("q", f.q())
                        .param("sigma", name)
                        .param("n", n)
                        .param("cutoff", d)
                        .with_residual(residual_val_matrix(&diff), Ratio::from_integer(n as i64 * (d as i64 + 1))),
                );
                let l0 = L_value(&sc, n, 0);
                let exact = l0.is_identity() && l0.entries().iter().all(|e| e.is_exact());
                out.push(CheckReport::new("lseries_cutoff0").param("q", f.q()).param("sigma", name).param("n", n).with_status(exact));
            }
        }
    }
    Ok(out)
}

fn crit_taelman(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    let prec = cfg.precision();
    for f in fields(cfg, &[2, 3])? {
        for (name, rep) in sigma_family(f) {
            out.push(L1_explicit_check(&rep, cfg.cutoff, prec)?.param("sigma", name));
        }
    }
    let f3 = builtin(3);
    for (name, rep) in sigma_family(f3) {
        out.push(taelman_S(&SemiCharacter::single(rep), cfg.cutoff, prec)?.report.param("sigma", name));
    }
    out.push(taelman_S(&SemiCharacter::chi_product(f3, 3), cfg.cutoff, prec)?.report.param("sigma", "chi^3"));
    let f2 = builtin(2);
    for s in [2, 3] {
        out.push(taelman_S(&SemiCharacter::chi_product(f2, s), cfg.cutoff, prec)?.report.param("sigma", format!("chi^{s}")));
    }
    Ok(out)
}

fn crit_det(_cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let f = builtin(3);
    let t = |i| RatFunc::var(f, i);
    let z = RatFunc::zero(f);
    let swap_rep = |i| AlgebraRep::new(Matrix::from_rows(vec![vec![z.clone(), t(i)], vec![t(i), z.clone()]]));
    let families = [
        ("companion:x^2-t^2", SemiCharacter::single(rf(f, &[t(0).mul(&t(0)).neg(), z.clone()]))),
        ("[[0,t1],[t1,0]]x[[0,t2],[t2,0]]", SemiCharacter::new(f, 2, vec![swap_rep(0), swap_rep(1)])?),
    ];
    let mut out = vec![];
    for (name, sc) in &families {
        for n in [1, 2] {
            out.push(det_L_check(sc, n, 4)?.param("sigma", *name));
        }
    }
    Ok(out)
}

fn crit_homomorphism(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for f in fields(cfg, &[2, 3])? {
        let p = f.p() as u64;
        let t = RatFunc::var(f, 0);
        let sigma = rf(f, &[t.neg(), RatFunc::zero(f)]);
        let chi = |functor| GammaRep::Chi { var: 0, functor };
        let reps = [
            ("sigma:companion:x^2-t", GammaRep::rho_sigma(sigma.clone())),
            ("sym:3", chi(Functor::Sym(3))),
            ("star", chi(Functor::Star(p + 1))),
            ("digits", GammaRep::digits_t(0, 2 * p + 1)),
            ("ii:1,2", GammaRep::tensor_ii(&[1, 2])),
            ("det:1:sigma", GammaRep::rho_sigma(sigma).det_twist(1)),
            ("det:2:ii:1,1", GammaRep::tensor_ii(&[1, 1]).det_twist(2)),
        ];
        let pairs = random_pairs(f, &mut cfg.rng(6 + f.q() as u64), 50, cfg.sample_degree);
        for (name, rep) in &reps {
            out.push(CheckReport::new("homomorphism").param("q", f.q()).param("rep", *name).param("pairs", pairs.len()).with_status(homomorphism_check(rep, &pairs)));
        }
    }
    Ok(out)
}

fn crit_brauer_nesbitt(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for qq in [2u32, 3, 4, 5] {
        let big = builtin(qq);
        for l in 0..=(qq as u64 + 2) {
            let gens = rho_bar_generators(big, l);
            let verdict = meataxe(&gens, &mut cfg.rng(700 + 10 * qq as u64 + l), 400)?;
            let expected = l < qq as u64;
            let mut r = CheckReport::new("meataxe").param("q_prime", qq).param("l", l).param("dim", gens[0].rows()).param("expected_irreducible", expected);
            match &verdict {
                MeataxeVerdict::Irreducible { attempts, .. } => {
                    r = r.param("verdict", "irreducible").param("attempts", *attempts).with_status(expected);
                    if !expected {
                        r.note("irreducible although l >= q′: the digits of l give a twisted tensor product of irreducibles");
                    }
                }
                MeataxeVerdict::Reducible { basis, verified } => {
                    r = r.param("verdict", "reducible").param("subspace_dim", basis.rows()).with_status(!expected).and(*verified, "invariant subspace verified");
                }
            }
            out.push(r);
        }
    }
    Ok(out)
}

fn crit_star(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for p in [2u32, 3, 5] {
        let f = builtin(p);
        let sample = GammaElem::sample_family(f, 3);
        let mut rng = cfg.rng(800 + p as u64);
        let fresh: Vec<GammaElem> = (0..20).map(|_| GammaElem::random(f, &mut rng, cfg.sample_degree)).collect();
        for l in 0..=(2 * p as u64 + 1) {
            let res = intertwiner(&Functor::Star(l), &Functor::Digits(l), &sample, &fresh, &mut rng);
            out.push(
                CheckReport::new("intertwiner")
                    .param("p", p)
                    .param("l", l)
                    .param("solution_dim", res.solution_dim)
                    .with_status(res.matrix.is_some())
                    .and(res.verified_fresh, "intertwiner verified on fresh elements"),
            );
        }
    }
    Ok(out)
}

/// The verdict as a report (failing only on an unverified certificate or no
/// verdict), with Some(irreducible) when a verdict was reached.
fn generic_verdict(name: &str, f: Fq, rep: &GammaRep, seed: u64) -> Result<(CheckReport, Option<bool>)> {
    let opts = GenericOptions { seed, ..GenericOptions::default() };
    let r = CheckReport::new("generic_irreducibility").param("q", f.q()).param("rep", name);
    Ok(match generic_irreducible(rep, f, opts)? {
        GenericVerdict::Irreducible { big_q, point, .. } => (r.param("verdict", "irreducible").param("specialization_q", big_q).param("point", point), Some(true)),
        GenericVerdict::Reducible { basis, verified_fresh } => {
            let r = r.param("verdict", "reducible").param("subspace_dim", basis.rows()).with_status(verified_fresh);
            (r, Some(false))
        }
        GenericVerdict::Unknown { reason } => {
            let mut r = r.param("verdict", "unknown").with_status(false);
            r.note(reason);
            (r, None)
        }
    })
}

fn generic_report(name: &str, f: Fq, rep: &GammaRep, want_irreducible: bool, seed: u64) -> Result<CheckReport> {
    let (r, v) = generic_verdict(name, f, rep, seed)?;
    Ok(r.param("expected_irreducible", want_irreducible).and(v == Some(want_irreducible), "verdict matches"))
}

fn crit_generic(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let (f2, f3) = (builtin(2), builtin(3));
    let t = RatFunc::var(f3, 0);
    let mut out = vec![];
    for l in 1..=3 {
        out.push(generic_report(&format!("digits:{l}"), f2, &GammaRep::digits_t(0, l), true, cfg.seed)?);
    }
    out.push(generic_report("ii:1,1", f2, &GammaRep::tensor_ii(&[1, 1]), true, cfg.seed)?);
    out.push(generic_report("ii:1,2", f3, &GammaRep::tensor_ii(&[1, 2]), true, cfg.seed)?);
    let irr = rf(f3, &[t.neg(), RatFunc::zero(f3)]);
    out.push(generic_report("sigma:companion:x^2-t", f3, &GammaRep::rho_sigma(irr), true, cfg.seed)?);
    let red = rf(f3, &[t.mul(&t).neg(), RatFunc::zero(f3)]);
    out.push(generic_report("sigma:companion:x^2-t^2", f3, &GammaRep::rho_sigma(red), false, cfg.seed)?);
    Ok(out)
}

fn crit_carry_free(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for (q, ls) in [(2u32, vec![1u64, 1]), (3, vec![2, 2]), (3, vec![1, 2])] {
        let f = builtin(q);
        let mut rng = cfg.rng(1000 + q as u64);
        let samples: Vec<GammaElem> = (0..20).map(|_| GammaElem::random(f, &mut rng, cfg.sample_degree.min(2))).collect();
        let rep = carry_free_check(f, &ls, &samples);
        out.push(
            CheckReport::new("carry_free")
                .param("q", q)
                .param("l", ls.clone())
                .param("k", rep.ks.clone())
                .param("l_total", rep.l_total)
                .param("samples", rep.samples)
                .with_status(rep.all_equal),
        );
    }
    Ok(out)
}

fn crit_digits(_cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for p in [2u64, 3, 5] {
        let n = p.pow(5) as usize;
        let seq = digit_sequence(n, p);
        let ok = (0..n).all(|l| phi_p(l as u64, p) == seq[l]);
        out.push(CheckReport::new("digit_sequence").param("p", p).param("terms", n).with_status(ok));
        let dim = Functor::Star(1 + p).apply(&GammaElem::identity(builtin(p as u32))).rows();
        out.push(CheckReport::new("phi_1_plus_p").param("p", p).param("value", phi_p(1 + p, p)).param("star_dim", dim).with_status(phi_p(1 + p, p) == 4 && dim == 4));
    }
    Ok(out)
}

fn chi_rep(f: Fq) -> GammaRep {
    GammaRep::rho_sigma(AlgebraRep::chi(f, 0))
}

fn crit_factorization(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let f = builtin(3);
    let z = OmegaPoint::theta_half(f, 1)?;
    let t = RatFunc::var(f, 0);
    let comp = rf(f, &[t.neg(), RatFunc::zero(f)]);
    Ok(vec![
        factorization_check(&SemiCharacter::single(AlgebraRep::chi(f, 0)), 1, &z, 3, cfg.guard)?.param("sigma", "chi"),
        factorization_check(&SemiCharacter::single(comp), 3, &z, 3, cfg.guard)?.param("sigma", "companion:x^2-t"),
    ])
}

fn crit_vanishing(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    let f3 = builtin(3);
    let t = RatFunc::var(f3, 0);
    let comp = GammaRep::rho_sigma(rf(f3, &[t.neg(), RatFunc::zero(f3)]));
    let cases = [
        (chi_rep(f3), "chi", 1, 2u32, 0u32, vec![0usize, 1, 2]),
        (chi_rep(f3), "chi", 1, 2, 1, vec![0, 1, 2]),
        (chi_rep(f3), "chi", 1, 4, 0, vec![0, 1]),
        (comp, "companion:x^2-t", 2, 2, 0, vec![0, 1]),
        (chi_rep(builtin(4)), "chi", 1, 2, 0, vec![0, 1]),
        (chi_rep(builtin(5)), "chi", 1, 2, 1, vec![0, 1]),
        (GammaRep::tensor_ii(&[1, 1]), "ii:1,1", 1, 1, 0, vec![0, 1]),
    ];
    for (rep, name, depth, w, m, cutoffs) in cases {
        let f = rep_field(&rep);
        if !vanishing_class(&rep, f, w, m) {
            return Err(Error::Config(format!("{name} w={w} m={m} is not in the vanishing class")));
        }
        let z = OmegaPoint::theta_half(f, 1)?;
        out.push(vanishing_check(&rep, depth, w, m, &z, &cutoffs, cfg.guard)?.param("rep", name));
    }
    Ok(out)
}

fn rep_field(rep: &GammaRep) -> Fq {
    match rep {
        GammaRep::Sigma(s) => s.field(),
        _ => builtin(3),
    }
}

fn crit_rank(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let f = builtin(3);
    let t = RatFunc::var(f, 0);
    let rep = GammaRep::rho_sigma(rf(f, &[t.neg(), RatFunc::zero(f)]));
    Ok(vec![rank_check(&rep, 2, 1, &default_rank_points(f), 2, cfg.guard)?.param("sigma", "companion:x^2-t")])
}

fn crit_ulimit(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for (q, d) in [(2u32, 5usize), (3, 3)] {
        let f = builtin(q);
        let z = OmegaPoint::theta_half(f, 5)?;
        out.push(u_limit_check(&chi_rep(f), 1, 1, &z, d, cfg.guard)?.param("rep", "chi"));
    }
    let f = builtin(2);
    let t = RatFunc::var(f, 0);
    let comp = GammaRep::rho_sigma(rf(f, &[RatFunc::one(f), t]));
    out.push(u_limit_check(&comp, 2, 1, &OmegaPoint::theta_half(f, 5)?, 4, cfg.guard)?.param("rep", "sigma:companion:x^2+t*x+1"));
    Ok(out)
}

fn crit_functional(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let f = builtin(2);
    let z = OmegaPoint::theta_half(f, 1)?;
    let th = APoly::theta(f);
    let gammas = [("T", GammaElem::e12(APoly::one(f))), ("S", GammaElem::swap(f)), ("E12:theta", GammaElem::e12(th.clone())), ("E21:theta", GammaElem::e21(th))];
    let mut out = vec![];
    let mut improving = 0;
    for (name, g) in &gammas {
        let r = functional_eq_check(&chi_rep(f), 1, 1, 0, &z, g, &[2, 4, 6], cfg.guard)?.param("gamma", *name);
        if r.params.get("strictly_improves") == Some(&serde_json::Value::Bool(true)) {
            improving += 1;
        }
        out.push(r);
    }
    out.push(CheckReport::new("functional_equation_improving").param("improving", improving).param("required", 3).with_status(improving >= 3));
    Ok(out)
}

fn crit_nagao(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![];
    for f in fields(cfg, &[2, 3, 5])? {
        let mut rng = cfg.rng(1700 + f.q() as u64);
        let mut ok = true;
        for _ in 0..200 {
            let g = GammaElem::random(f, &mut rng, cfg.sample_degree);
            ok &= word_product(&nagao_decompose(&g)?) == g;
        }
        out.push(CheckReport::new("nagao_round_trip").param("q", f.q()).param("samples", 200).with_status(ok));
        let pairs = random_pairs(f, &mut rng, 50, cfg.sample_degree);
        let mut hom = true;
        let mut inj = true;
        for (g, h) in &pairs {
            let (pg, ph) = (phi_infty(g)?, phi_infty(h)?);
            hom &= phi_infty(&g.mul(h))? == pg.mul(&ph);
            inj &= phi_retract(&pg).as_ref() == Some(g);
        }
        out.push(CheckReport::new("phi_homomorphism").param("q", f.q()).param("pairs", pairs.len()).with_status(hom).and(inj, "x_i ↦ t^i recovers γ"));
    }
    let f = cfg.field()?;
    let sample = GammaElem::sample_family(f, 2);
    let bounds = |rep: &GammaRep| essential_dimension_diag(&sample_entries(&sample.iter().map(|g| rep.apply(g)).collect::<Vec<_>>()));
    let b = bounds(&GammaRep::digits_t(0, 1));
    out.push(CheckReport::new("essdim").param("q", f.q()).param("rep", "tautological").param("lower", b.lower).param("upper", b.upper).with_status(b.lower == 1 && b.upper == 1));
    for s in 1..=3 {
        let b = bounds(&GammaRep::tensor_ii(&vec![1; s]));
        out.push(CheckReport::new("essdim").param("q", f.q()).param("rep", format!("ii:{s}")).param("lower", b.lower).param("upper", b.upper).with_status(b.lower == s && b.upper == s));
    }
    Ok(out)
}

const REPRO_IDS: [u32; 4] = [6, 11, 13, 17];

fn crit_reproducibility(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let a = verify_ids(cfg, &REPRO_IDS)?.to_json();
    let b = verify_ids(cfg, &REPRO_IDS)?.to_json();
    Ok(vec![CheckReport::new("reproducibility").param("criteria", REPRO_IDS.to_vec()).param("bytes", a.len()).with_status(a == b)])
}

/// Parameters of a single named check; unset ones take check-specific defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckParams {
    pub sigma: Option<String>,
    pub rep: Option<String>,
    pub z: Option<String>,
    pub gamma: Option<String>,
    pub w: Option<u32>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub l: Option<Vec<u64>>,
    pub depth: Option<usize>,
}

pub const CHECK_IDS: [&str; 20] = [
    "tau", "exp", "lseries", "L1", "series1", "taelman", "detL", "homomorphism", "meataxe", "intertwiner", "generic", "carryfree", "digits", "factorization",
    "vanishing", "rank", "ulimit", "functional", "specialize", "essdim",
];

fn sigma_of(f: Fq, p: &CheckParams, default: &str) -> Result<(String, AlgebraRep)> {
    let s = p.sigma.clone().unwrap_or_else(|| default.to_string());
    Ok((s.clone(), parse_sigma(f, &s)?))
}

fn rep_of(f: Fq, p: &CheckParams, default: &str) -> Result<(String, GammaRep)> {
    match (&p.rep, &p.sigma) {
        (Some(r), _) => Ok((r.clone(), parse_rep(f, r)?)),
        (None, Some(s)) => Ok((format!("sigma:{s}"), GammaRep::rho_sigma(parse_sigma(f, s)?))),
        (None, None) => Ok((default.to_string(), parse_rep(f, default)?)),
    }
}

/// Depth: the σ-dimension for ρ_σ, otherwise 1.
fn default_depth(rep: &GammaRep) -> usize {
    match rep {
        GammaRep::Sigma(s) => s.dim(),
        GammaRep::DetTwist { inner, .. } => default_depth(inner),
        _ => 1,
    }
}

fn point_of(f: Fq, p: &CheckParams, default: &str) -> Result<OmegaPoint> {
    parse_point(f, p.z.as_deref().unwrap_or(default))
}

/// One named check with the configured field, s, precision, cutoff and seed.
pub fn run_single(cfg: &RunConfig, id: &str, p: &CheckParams) -> Result<CheckReport> {
    let f = cfg.validate()?;
    let prec = cfg.precision();
    let d = cfg.cutoff;
    let r = match id {
        "tau" => {
            let (name, rep) = sigma_of(f, p, "chi")?;
            check_tau_equation(&omega_value(&rep, prec)?, cfg.prec).param("sigma", name)
        }
        "exp" => {
            let (name, rep) = sigma_of(f, p, "chi")?;
            check_exp_formula(&rep, prec)?.param("sigma", name)
        }
        "lseries" => {
            let (name, rep) = sigma_of(f, p, "chi")?;
            let n = p.n.unwrap_or(1);
            let sc = SemiCharacter::single(rep);
            let diff = L_value(&sc, n, d).sub(&euler_product(&sc, n, d));
            CheckReport::new("lseries").param("q", f.q()).param("sigma", name).param("n", n).param("cutoff", d).with_residual(residual_val_matrix(&diff), Ratio::from_integer(n as i64 * (d as i64 + 1)))
        }
        "L1" => {
            let (name, rep) = sigma_of(f, p, "chi")?;
            L1_explicit_check(&rep, d, prec)?.param("sigma", name)
        }
        "series1" | "taelman" | "detL" => {
            let sc = match &p.sigma {
                Some(s) => SemiCharacter::single(parse_sigma(f, s)?),
                None => SemiCharacter::chi_product(f, cfg.s),
            };
            match id {
                "series1" => series_identity_s(&sc, d, prec)?,
                "taelman" => taelman_S(&sc, d, prec)?.report,
                _ => det_L_check(&sc, p.n.unwrap_or(1), d)?,
            }
        }
        "homomorphism" => {
            let (name, rep) = rep_of(f, p, "sigma:chi")?;
            let pairs = random_pairs(f, &mut cfg.rng(6), 50, cfg.sample_degree);
            CheckReport::new("homomorphism").param("q", f.q()).param("rep", name).param("pairs", pairs.len()).with_status(homomorphism_check(&rep, &pairs))
        }
        "meataxe" => {
            let l = p.l.as_ref().and_then(|v| v.first().copied()).unwrap_or(1);
            let gens = rho_bar_generators(f, l);
            let v = meataxe(&gens, &mut cfg.rng(7), 400)?;
            let r = CheckReport::new("meataxe").param("q_prime", f.q()).param("l", l).param("dim", gens[0].rows());
            match v {
                MeataxeVerdict::Irreducible { attempts, .. } => r.param("verdict", "irreducible").param("attempts", attempts),
                MeataxeVerdict::Reducible { basis, verified } => r.param("verdict", "reducible").param("subspace_dim", basis.rows()).with_status(verified),
            }
        }
        "intertwiner" => {
            let l = p.l.as_ref().and_then(|v| v.first().copied()).unwrap_or(f.p() as u64 + 1);
            let mut rng = cfg.rng(8);
            let fresh: Vec<GammaElem> = (0..20).map(|_| GammaElem::random(f, &mut rng, cfg.sample_degree)).collect();
            let res = intertwiner(&Functor::Star(l), &Functor::Digits(l), &GammaElem::sample_family(f, 3), &fresh, &mut rng);
            CheckReport::new("intertwiner").param("q", f.q()).param("l", l).param("solution_dim", res.solution_dim).with_status(res.matrix.is_some()).and(res.verified_fresh, "verified on fresh elements")
        }
        "generic" => {
            let (name, rep) = rep_of(f, p, "digits:1")?;
            generic_verdict(&name, f, &rep, cfg.seed)?.0
        }
        "carryfree" => {
            let ls = p.l.clone().unwrap_or_else(|| vec![1, 1]);
            let mut rng = cfg.rng(10);
            let samples: Vec<GammaElem> = (0..20).map(|_| GammaElem::random(f, &mut rng, cfg.sample_degree)).collect();
            let rep = carry_free_check(f, &ls, &samples);
            CheckReport::new("carry_free").param("q", f.q()).param("l", ls).param("k", rep.ks.clone()).param("l_total", rep.l_total).with_status(rep.all_equal)
        }
        "digits" => crit_digits(cfg)?.into_iter().find(|r| r.params["p"] == f.p()).unwrap_or_else(|| CheckReport::new("digit_sequence").with_status(false)),
        "factorization" => {
            let (name, rep) = sigma_of(f, p, "chi")?;
            let z = point_of(f, p, "theta^1/2")?;
            factorization_check(&SemiCharacter::single(rep), p.w.unwrap_or(1), &z, d, cfg.guard)?.param("sigma", name)
        }
        "vanishing" | "rank" | "ulimit" | "functional" => {
            let (name, rep) = rep_of(f, p, "sigma:chi")?;
            let depth = p.depth.unwrap_or_else(|| default_depth(&rep));
            let w = p.w.unwrap_or(1);
            let m = p.m.unwrap_or(0);
            let r = match id {
                "vanishing" => vanishing_check(&rep, depth, w, m, &point_of(f, p, "theta^1/2")?, &(0..=d).collect::<Vec<_>>(), cfg.guard)?,
                "rank" => {
                    let pts = match &p.z {
                        Some(z) => z.split(';').map(|s| parse_point(f, s)).collect::<Result<Vec<_>>>()?,
                        None => default_rank_points(f),
                    };
                    rank_check(&rep, depth, w, &pts, d, cfg.guard)?
                }
                "ulimit" => u_limit_check(&rep, depth, w, &point_of(f, p, "theta^5/2")?, d, cfg.guard)?,
                _ => {
                    let g = parse_gamma(f, p.gamma.as_deref().unwrap_or("S"))?;
                    let cutoffs: Vec<usize> = (1..=d).filter(|k| k % 2 == 0 || d < 2).collect();
                    functional_eq_check(&rep, depth, w, m, &point_of(f, p, "theta^1/2")?, &g, &cutoffs, cfg.guard)?
                }
            };
            r.param("rep", name)
        }
        "specialize" => {
            let ls = p.l.clone().unwrap_or_else(|| vec![1]);
            poincare_specialize_check(&ls, p.w.unwrap_or(2), p.m.unwrap_or(0), &point_of(f, p, "theta^1/2")?, d, cfg.guard)?
        }
        "essdim" => {
            let (name, rep) = rep_of(f, p, "tautological")?;
            let sample = GammaElem::sample_family(f, cfg.sample_degree);
            let b = essential_dimension_diag(&sample_entries(&sample.iter().map(|g| rep.apply(g)).collect::<Vec<_>>()));
            CheckReport::new("essdim").param("q", f.q()).param("rep", name).param("lower", b.lower).param("upper", b.upper).with_status(b.lower <= b.upper)
        }
        _ => return Err(Error::UnknownCheck(id.to_string())),
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(q: u32) -> RunConfig {
        RunConfig { q: Some(q), ..RunConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert_eq!(cfg(3).validate().unwrap().q(), 3);
        let bad = RunConfig { q: None, p: Some(2), e: Some(2), modulus: Some(vec![1, 0, 1]), ..RunConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let good = RunConfig { q: None, p: Some(2), e: Some(2), modulus: Some(vec![1, 1, 1]), ..RunConfig::default() };
        assert_eq!(good.validate().unwrap().q(), 4);
        assert!(RunConfig { q: Some(6), ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { q: Some(4), p: Some(3), ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { s: 0, ..RunConfig::default() }.validate().is_err());
        assert!(matches!(verify_all(&RunConfig { q: None, ..RunConfig::default() }), Err(Error::Config(_))));
        let parsed: RunConfig = serde_json::from_str(r#"{"q": 2, "cutoff": 3}"#).unwrap();
        assert_eq!((parsed.q, parsed.cutoff, parsed.prec), (Some(2), 3, 60));
    }

    #[test]
    fn single_checks() {
        let c = RunConfig { q: Some(3), s: 3, cutoff: 4, ..RunConfig::default() };
        let r = run_single(&c, "taelman", &CheckParams::default()).unwrap();
        assert!(r.passed() && r.residual_valuation.unwrap().at_least(Ratio::from_integer(5)), "{r:?}");
        let c = RunConfig { cutoff: 2, guard: 2, ..cfg(3) };
        let p = CheckParams { sigma: Some("companion:x^2-t".into()), w: Some(1), m: Some(0), ..CheckParams::default() };
        let r = run_single(&c, "rank", &p).unwrap();
        assert_eq!(r.params["certified_rank"], 2);
        let r = run_single(&cfg(3), "essdim", &CheckParams { rep: Some("tautological".into()), ..CheckParams::default() }).unwrap();
        assert_eq!((r.params["lower"].clone(), r.params["upper"].clone()), (1.into(), 1.into()));
        assert!(matches!(run_single(&cfg(3), "nope", &CheckParams::default()), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn criteria_in_order_and_deterministic() {
        let c = cfg(2);
        let a = verify_ids(&c, &[11, 10, 17]).unwrap();
        assert_eq!(a.criteria.iter().map(|c| c.id).collect::<Vec<_>>(), vec![11, 10, 17]);
        assert!(a.passed(), "{}", a.to_text());
        assert_eq!(a.to_json(), verify_ids(&c, &[11, 10, 17]).unwrap().to_json());
        assert!(!a.to_json().contains("runtime"));
        assert!(matches!(run_criterion(&c, 19), Err(Error::UnknownCheck(_))));
    }
}
