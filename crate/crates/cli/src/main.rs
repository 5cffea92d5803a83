use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tatereps::algrep::{is_faithful, is_irreducible_sigma};
use tatereps::amalgam::{essential_dimension_diag, nagao_decompose, phi_infty, sample_entries};
use tatereps::carlitz::{carlitz_factorial, e_c};
use tatereps::field::Fq;
use tatereps::gamma::GammaElem;
use tatereps::lfunc::{omega_value, L_value, SemiCharacter};
use tatereps::meataxe::{meataxe, rho_bar_generators};
use tatereps::modular::{bottom_rows, eisenstein_E, point_cap};
use tatereps::parse::{parse_apoly, parse_gamma, parse_point, parse_rep, parse_sigma};
use tatereps::report::CheckReport;
use tatereps::series::TruncSeries;
use tatereps::verify::{run_single, verify_all, verify_ids, CheckParams, RunConfig, SCHEMA_VERSION};
use tatereps::Error;

#[derive(Parser)]
#[command(name = "tatereps", version, about = "Function-field L-values, GL2(Fq[θ]) representations and vectorial Eisenstein series")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML file with any of the keys below; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    q: Option<u32>,
    #[arg(long, global = true)]
    p: Option<u32>,
    #[arg(long, global = true)]
    e: Option<u32>,
    /// Defining polynomial over F_p, comma separated, low degree first.
    #[arg(long, global = true, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    #[arg(long, global = true)]
    s: Option<usize>,
    #[arg(long, global = true)]
    prec: Option<i64>,
    #[arg(long, global = true)]
    guard: Option<i64>,
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    #[arg(long = "sample-degree", global = true)]
    sample_degree: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// The Carlitz module.
    Carlitz {
        #[command(subcommand)]
        cmd: CarlitzCmd,
    },
    /// Algebra representations σ.
    Algrep {
        #[command(subcommand)]
        cmd: AlgrepCmd,
    },
    /// L-values and ω-values.
    Lfunc {
        #[command(subcommand)]
        cmd: LfuncCmd,
    },
    /// Representations of GL2(Fq[θ]).
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Vectorial Eisenstein series.
    Mf {
        #[command(subcommand)]
        cmd: MfCmd,
    },
    /// The amalgam decomposition and its embedding.
    Amalgam {
        #[command(subcommand)]
        cmd: AmalgamCmd,
    },
    /// Run the whole acceptance suite (or the listed criteria).
    Verify {
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
    },
    /// Run one named check.
    Check {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args, Default)]
struct ParamArgs {
    /// chi[:N] or companion:<poly in x over Fq[t1..ts]>
    #[arg(long)]
    sigma: Option<String>,
    /// tautological, sym:R, star:L, digits:L, ii:L1,L2, sigma:<sigma>, det:M:<rep>
    #[arg(long)]
    rep: Option<String>,
    /// theta^K/2 (several separated by ';' for rank)
    #[arg(long)]
    z: Option<String>,
    /// S, T, E12:<poly>, E21:<poly>, diag:U,V, mat:A,B,C,D
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    w: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    l: Option<Vec<u64>>,
    #[arg(long)]
    depth: Option<usize>,
}

impl ParamArgs {
    fn to_params(&self) -> CheckParams {
        CheckParams {
            sigma: self.sigma.clone(),
            rep: self.rep.clone(),
            z: self.z.clone(),
            gamma: self.gamma.clone(),
            w: self.w,
            m: self.m,
            n: self.n,
            l: self.l.clone(),
            depth: self.depth,
        }
    }
}

#[derive(Subcommand)]
enum CarlitzCmd {
    /// e_C(z θ^{-shift}) for z a polynomial in θ.
    Exp {
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = 0)]
        shift: i64,
    },
    /// The Carlitz factorial D_i.
    Factorial {
        #[arg(long)]
        i: u32,
    },
}

#[derive(Subcommand)]
enum AlgrepCmd {
    /// The companion matrix of a monic P(x) over Fq[t1..ts].
    Companion {
        #[arg(long = "P")]
        poly: String,
    },
    /// Faithfulness and irreducibility of σ.
    Check {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        faithful: bool,
        #[arg(long)]
        irreducible: bool,
    },
}

#[derive(Subcommand)]
enum LfuncCmd {
    /// L_σ(n) truncated at degree cutoff (σ defaults to χ_{t1}⋯χ_{ts}).
    #[command(name = "L")]
    L {
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// ω_σ to the configured precision.
    Omega {
        #[arg(long)]
        sigma: String,
    },
    /// taelman, exp, tau, series1, detL, L1 or lseries.
    Verify {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// ρ(γ).
    Build {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        gamma: String,
    },
    /// Generic irreducibility of --rep, or the meataxe on ρ̄_l over Fq with --l.
    CheckIrreducible {
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        l: Option<u64>,
    },
    /// An intertwiner from ρ⋆_l to ρ_l.
    Intertwiner {
        #[arg(long)]
        l: u64,
    },
    /// Carry-free evaluation of ρ^II_l.
    Carryfree {
        #[arg(long, value_delimiter = ',')]
        l: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum MfCmd {
    /// The truncated series 𝓔_{w,m,ρ}(z).
    Eisenstein {
        #[arg(long, default_value_t = 1)]
        w: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value = "sigma:chi")]
        rep: String,
        #[arg(long, default_value = "theta^1/2")]
        z: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// G-eq-LE, functional, rank, ulimit, specialize or vanishing.
    Verify {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Subcommand)]
enum AmalgamCmd {
    Decompose {
        #[arg(long)]
        gamma: String,
    },
    Phi {
        #[arg(long)]
        gamma: String,
    },
    Essdim {
        #[arg(long, default_value = "tautological")]
        rep: String,
    },
}

fn load_config(g: &GlobalArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => RunConfig::default(),
    };
    if g.p.is_some() || g.e.is_some() || g.modulus.is_some() {
        cfg.q = None;
    }
    macro_rules! set {
        ($($f:ident),*) => {$(if let Some(v) = g.$f.clone() { cfg.$f = v.into(); })*};
    }
    set!(q, p, e, modulus, s, prec, guard, cutoff, sample_degree, seed);
    cfg.validate()?;
    Ok(cfg)
}

enum Outcome {
    Value(Value),
    Report(CheckReport),
    Text(String, Value),
}

fn value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn with_params(cfg: &RunConfig, id: &str, p: &ParamArgs) -> Result<Outcome, Error> {
    run_single(cfg, id, &p.to_params()).map(Outcome::Report)
}

fn run(cfg: &RunConfig, cmd: &Command) -> Result<Outcome, Error> {
    let f: Fq = cfg.field()?;
    Ok(match cmd {
        Command::Carlitz { cmd } => match cmd {
            CarlitzCmd::Exp { z, shift } => {
                let zs = TruncSeries::from_apoly(&parse_apoly(f, z)?).mul(&TruncSeries::theta_pow(f, -shift));
                let e = e_c(&zs, cfg.precision().working())?;
                Outcome::Text(e.to_string(), json!({"z": zs, "exp": e}))
            }
            CarlitzCmd::Factorial { i } => {
                let d = carlitz_factorial(f, *i);
                Outcome::Text(d.to_string(), json!({"i": i, "factorial": d}))
            }
        },
        Command::Algrep { cmd } => match cmd {
            AlgrepCmd::Companion { poly } => {
                let s = parse_sigma(f, &format!("companion:{poly}"))?;
                Outcome::Text(s.theta_image.to_string(), json!({"theta_image": s.theta_image, "charpoly": s.charpoly()}))
            }
            AlgrepCmd::Check { sigma, faithful, irreducible } => {
                let s = parse_sigma(f, sigma)?;
                let both = !faithful && !irreducible;
                let mut out = serde_json::Map::new();
                if *faithful || both {
                    out.insert("faithful".into(), value(is_faithful(&s)));
                }
                if *irreducible || both {
                    out.insert("irreducible".into(), value(is_irreducible_sigma(&s)));
                }
                Outcome::Value(Value::Object(out))
            }
        },
        Command::Lfunc { cmd } => match cmd {
            LfuncCmd::L { sigma, n } => {
                let sc = match sigma {
                    Some(s) => SemiCharacter::single(parse_sigma(f, s)?),
                    None => SemiCharacter::chi_product(f, cfg.s),
                };
                let l = L_value(&sc, *n, cfg.cutoff);
                Outcome::Text(l.to_string(), json!({"n": n, "cutoff": cfg.cutoff, "L": l}))
            }
            LfuncCmd::Omega { sigma } => {
                let om = omega_value(&parse_sigma(f, sigma)?, cfg.precision())?;
                let w = om.omega();
                Outcome::Text(w.to_string(), json!({"omega": w}))
            }
            LfuncCmd::Verify { id, params } => with_params(cfg, id, params)?,
        },
        Command::Rep { cmd } => match cmd {
            RepCmd::Build { rep, gamma } => {
                let m = parse_rep(f, rep)?.apply(&parse_gamma(f, gamma)?);
                Outcome::Text(m.to_string(), json!({"matrix": m}))
            }
            RepCmd::CheckIrreducible { rep, l } => match (rep, l) {
                (Some(r), _) => with_params(cfg, "generic", &ParamArgs { rep: Some(r.clone()), ..ParamArgs::default() })?,
                (None, Some(l)) => {
                    let gens = rho_bar_generators(f, *l);
                    Outcome::Value(json!({"q_prime": f.q(), "l": l, "verdict": meataxe(&gens, &mut cfg.rng(7), 400)?}))
                }
                (None, None) => return Err(Error::Config("give --rep or --l".into())),
            },
            RepCmd::Intertwiner { l } => with_params(cfg, "intertwiner", &ParamArgs { l: Some(vec![*l]), ..ParamArgs::default() })?,
            RepCmd::Carryfree { l } => with_params(cfg, "carryfree", &ParamArgs { l: Some(l.clone()), ..ParamArgs::default() })?,
        },
        Command::Mf { cmd } => match cmd {
            MfCmd::Eisenstein { w, m, rep, z, depth } => {
                let rep = parse_rep(f, rep)?;
                let z = parse_point(f, z)?;
                let n = rep.dim(f.p() as u64);
                let depth = depth.unwrap_or(match &rep {
                    tatereps::gamma::GammaRep::Sigma(s) => s.dim(),
                    _ => 1,
                });
                let cap = point_cap(&z, *w, cfg.cutoff, cfg.guard);
                let e = eisenstein_E(&rep, &bottom_rows(n, depth), *w, *m, &z, cfg.cutoff, cap)?;
                Outcome::Text(e.value.to_string(), value(&e))
            }
            MfCmd::Verify { id, params } => {
                let id = if id == "G-eq-LE" { "factorization" } else { id.as_str() };
                with_params(cfg, id, params)?
            }
        },
        Command::Amalgam { cmd } => match cmd {
            AmalgamCmd::Decompose { gamma } => Outcome::Value(value(nagao_decompose(&parse_gamma(f, gamma)?)?)),
            AmalgamCmd::Phi { gamma } => Outcome::Value(value(phi_infty(&parse_gamma(f, gamma)?)?)),
            AmalgamCmd::Essdim { rep } => {
                let rep = parse_rep(f, rep)?;
                let sample = GammaElem::sample_family(f, cfg.sample_degree);
                let b = essential_dimension_diag(&sample_entries(&sample.iter().map(|g| rep.apply(g)).collect::<Vec<_>>()));
                Outcome::Value(value(b))
            }
        },
        Command::Check { id, params } => with_params(cfg, id, params)?,
        Command::Verify { .. } => unreachable!("handled by the caller"),
    })
}

fn emit(g: &GlobalArgs, text: String) -> Result<(), Error> {
    match &g.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main_inner(cli: &Cli) -> Result<bool, Error> {
    let cfg = load_config(&cli.global)?;
    if let Command::Verify { criteria } = &cli.cmd {
        let suite = match criteria {
            Some(ids) => verify_ids(&cfg, ids)?,
            None => verify_all(&cfg)?,
        };
        let text = match cli.global.format {
            Format::Json => suite.to_json(),
            Format::Text => suite.to_text(),
        };
        emit(&cli.global, text)?;
        return Ok(suite.passed());
    }
    let (ok, body, text) = match run(&cfg, &cli.cmd)? {
        Outcome::Report(r) => {
            let t = format!("{} {:?} residual={} target={}", r.check, r.status, r.residual_valuation.map_or("-".into(), |v| v.to_string()), r.target.map_or("-".into(), |v| v.to_string()));
            (r.passed(), json!({"report": r}), t)
        }
        Outcome::Value(v) => (true, json!({"result": v}), serde_json::to_string_pretty(&v).unwrap_or_default()),
        Outcome::Text(t, v) => (true, json!({"result": v}), t),
    };
    let out = match cli.global.format {
        Format::Json => {
            let mut env = json!({"schema_version": SCHEMA_VERSION, "config": cfg});
            env.as_object_mut().unwrap().extend(body.as_object().unwrap().clone());
            serde_json::to_string_pretty(&env).unwrap_or_default()
        }
        Format::Text => text,
    };
    emit(&cli.global, out)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
