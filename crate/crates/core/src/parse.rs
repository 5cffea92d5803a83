//! Text forms used on the command line.
//!
//! ```text
//! poly   := ["-"] term (("+" | "-") term)*      in x, t (= t1), t1, t2, .. and θ
//! term   := factor ("*"? factor)*
//! factor := integer | x | t | tN | theta ("^" integer)?
//! sigma  := chi[:N] | companion:<poly in x>
//! rep    := tautological | sym:R | star:L | digits:L | ii:L1,L2,.. | sigma:<sigma> | det:M:<rep>
//! point  := theta^K/2
//! gamma  := S | T | E12:<poly in θ> | E21:<poly in θ> | diag:U,V | mat:A,B,C,D
//! ```

use crate::algrep::{companion_sigma, AlgebraRep, CompanionSpec};
use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::gamma::{Functor, GammaElem, GammaRep};
use crate::modular::OmegaPoint;
use crate::mpoly::{MPoly, Mono};
use crate::ratfunc::RatFunc;

fn perr(s: impl Into<String>) -> Error {
    Error::Parse(s.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Atom {
    Int(i64),
    X,
    Theta,
    T(usize),
}

/// Σ coefficient · x^i · θ^j · Π t^e as a list of (x-degree, θ-degree, polynomial in t).
type Terms = Vec<(u32, u32, MPoly)>;

fn parse_atom(s: &str) -> Result<Atom> {
    match s {
        "x" => Ok(Atom::X),
        "theta" | "θ" => Ok(Atom::Theta),
        "t" => Ok(Atom::T(0)),
        _ if s.starts_with('t') => {
            let i: usize = s[1..].parse().map_err(|_| perr(format!("bad variable `{s}`")))?;
            if i == 0 {
                return Err(perr("variables are numbered from t1"));
            }
            Ok(Atom::T(i - 1))
        }
        _ => s.parse().map(Atom::Int).map_err(|_| perr(format!("bad token `{s}`"))),
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = vec![];
    let mut cur = String::new();
    for ch in s.chars() {
        if ch.is_whitespace() {
            continue;
        }
        if "+-*^".contains(ch) {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            out.push(ch.to_string());
        } else if !cur.is_empty()
            && ((ch.is_ascii_digit() && !cur.starts_with('t') && !cur.chars().all(|c| c.is_ascii_digit()))
                || (ch.is_alphabetic() && cur.chars().all(|c| c.is_ascii_digit()))
                || ((ch == 'x' || ch == 't' || ch == 'θ') && !cur.starts_with("th")))
        {
            out.push(std::mem::take(&mut cur));
            cur.push(ch);
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_terms(f: Fq, s: &str) -> Result<Terms> {
    let toks = tokenize(s);
    if toks.is_empty() {
        return Err(perr("empty polynomial"));
    }
    let mut terms: Terms = vec![];
    let mut i = 0;
    while i < toks.len() {
        let mut sign = 1i64;
        if i > 0 || toks[i] == "-" || toks[i] == "+" {
            match toks[i].as_str() {
                "+" => {}
                "-" => sign = -1,
                t => return Err(perr(format!("expected + or -, found `{t}`"))),
            }
            i += 1;
        }
        let (mut xd, mut td) = (0u32, 0u32);
        let mut coef = MPoly::constant(f.from_int(sign));
        let mut any = false;
        while i < toks.len() && toks[i] != "+" && toks[i] != "-" {
            if toks[i] == "*" {
                i += 1;
                continue;
            }
            let atom = parse_atom(&toks[i])?;
            i += 1;
            let mut e = 1u32;
            if i < toks.len() && toks[i] == "^" {
                e = toks.get(i + 1).and_then(|x| x.parse().ok()).ok_or_else(|| perr("bad exponent"))?;
                i += 2;
            }
            any = true;
            match atom {
                Atom::Int(n) => coef = coef.scale(f.from_int(n).pow(e as u64)),
                Atom::X => xd += e,
                Atom::Theta => td += e,
                Atom::T(v) => coef = coef.mul(&MPoly::term(f.one(), Mono::var_pow(v, e))),
            }
        }
        if !any {
            return Err(perr("dangling sign"));
        }
        terms.push((xd, td, coef));
    }
    Ok(terms)
}

/// A polynomial in θ with F_q coefficients.
pub fn parse_apoly(f: Fq, s: &str) -> Result<APoly> {
    let mut c = vec![f.zero(); 1];
    for (xd, td, m) in parse_terms(f, s)? {
        if xd != 0 || !m.is_constant() {
            return Err(perr(format!("`{s}` is not a polynomial in θ over F_q")));
        }
        if c.len() <= td as usize {
            c.resize(td as usize + 1, f.zero());
        }
        c[td as usize] = c[td as usize] + m.constant_term();
    }
    Ok(APoly::new(f, c))
}

pub fn parse_sigma(f: Fq, s: &str) -> Result<AlgebraRep> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    match head {
        "chi" => {
            let i: usize = if rest.is_empty() { 1 } else { rest.trim_start_matches('t').parse().map_err(|_| perr("bad chi index"))? };
            if i == 0 {
                return Err(perr("variables are numbered from t1"));
            }
            Ok(AlgebraRep::chi(f, i - 1))
        }
        "companion" => {
            let mut coeffs: Vec<MPoly> = vec![];
            for (xd, td, m) in parse_terms(f, rest)? {
                if td != 0 {
                    return Err(perr("use t for the coefficient variable, x for the polynomial variable"));
                }
                if coeffs.len() <= xd as usize {
                    coeffs.resize(xd as usize + 1, MPoly::zero(f));
                }
                coeffs[xd as usize] = coeffs[xd as usize].add(&m);
            }
            let coeffs = coeffs.into_iter().map(RatFunc::from_poly).collect();
            Ok(companion_sigma(&CompanionSpec::new(coeffs)?))
        }
        _ => Err(perr(format!("unknown sigma `{s}`"))),
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| perr(format!("bad number `{s}`")))
}

pub fn parse_rep(f: Fq, s: &str) -> Result<GammaRep> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let chi = |functor| GammaRep::Chi { var: 0, functor };
    Ok(match head {
        "tautological" | "taut" => chi(Functor::Tautological),
        "sym" => chi(Functor::Sym(num(rest)?)),
        "star" => chi(Functor::Star(num(rest)?)),
        "digits" => GammaRep::digits_t(0, num(rest)?),
        "ii" => GammaRep::tensor_ii(&rest.split(',').map(num).collect::<Result<Vec<u64>>>()?),
        "sigma" => GammaRep::rho_sigma(parse_sigma(f, rest)?),
        "det" => {
            let (m, inner) = rest.split_once(':').ok_or_else(|| perr("det:M:<rep>"))?;
            parse_rep(f, inner)?.det_twist(num(m)?)
        }
        _ => return Err(perr(format!("unknown representation `{s}`"))),
    })
}

/// θ^{k/2} for odd k.
pub fn parse_point(f: Fq, s: &str) -> Result<OmegaPoint> {
    let body = s.trim().trim_start_matches("theta").trim_start_matches('θ').trim_start_matches('^');
    let body = body.trim_start_matches('(').trim_end_matches(')');
    let k: i64 = match body.split_once('/') {
        Some((k, "2")) => num(k)?,
        _ => return Err(perr(format!("expected theta^K/2, found `{s}`"))),
    };
    OmegaPoint::theta_half(f, k)
}

pub fn parse_gamma(f: Fq, s: &str) -> Result<GammaElem> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    Ok(match head {
        "S" => GammaElem::swap(f),
        "T" => GammaElem::e12(APoly::one(f)),
        "E12" => GammaElem::e12(parse_apoly(f, rest)?),
        "E21" => GammaElem::e21(parse_apoly(f, rest)?),
        "mat" => {
            let e: Vec<APoly> = rest.split(',').map(|x| parse_apoly(f, x)).collect::<Result<_>>()?;
            if e.len() != 4 {
                return Err(perr("mat:A,B,C,D"));
            }
            let g = GammaElem::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone());
            if g.det().degree() != Some(0) {
                return Err(Error::NotInvertible);
            }
            g
        }
        "diag" => {
            let (u, v) = rest.split_once(',').ok_or_else(|| perr("diag:U,V"))?;
            let (u, v) = (f.from_int(num(u)?), f.from_int(num(v)?));
            if u.is_zero() || v.is_zero() {
                return Err(Error::NotInvertible);
            }
            GammaElem::diag(u, v)
        }
        _ => return Err(perr(format!("unknown group element `{s}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    #[test]
    fn tokens() {
        assert_eq!(tokenize("x^2-t*x-1"), ["x", "^", "2", "-", "t", "*", "x", "-", "1"]);
        assert_eq!(tokenize("2xt2"), ["2", "x", "t2"]);
        assert_eq!(tokenize("theta^2+theta"), ["theta", "^", "2", "+", "theta"]);
    }

    #[test]
    fn companions() {
        let f = FieldConfig::builtin(3).unwrap();
        let s = parse_sigma(f, "companion:x^2-t").unwrap();
        let c = s.companion_of.unwrap().coeffs;
        assert_eq!(c, vec![RatFunc::var(f, 0).neg(), RatFunc::zero(f), RatFunc::one(f)]);
        let s = parse_sigma(f, "companion:x^2 - t x - 1").unwrap();
        assert_eq!(s.companion_of.unwrap().coeffs[1], RatFunc::var(f, 0).neg());
        assert!(matches!(parse_sigma(f, "companion:2x^2-t"), Err(Error::NotMonic)));
        assert_eq!(parse_sigma(f, "chi:2").unwrap(), AlgebraRep::chi(f, 1));
        assert!(parse_sigma(f, "companion:x^2-").is_err());
    }

    #[test]
    fn reps_points_and_elements() {
        let f = FieldConfig::builtin(2).unwrap();
        assert_eq!(parse_rep(f, "ii:1,1").unwrap(), GammaRep::tensor_ii(&[1, 1]));
        assert_eq!(parse_rep(f, "digits:3").unwrap().dim(2), 4);
        assert!(matches!(parse_rep(f, "det:1:sigma:chi").unwrap(), GammaRep::DetTwist { m: 1, .. }));
        assert_eq!(parse_point(f, "theta^5/2").unwrap().imag_valuation(), OmegaPoint::theta_half(f, 5).unwrap().imag_valuation());
        assert!(parse_point(f, "theta^2/2").is_err());
        assert_eq!(parse_gamma(f, "E12:theta").unwrap(), GammaElem::e12(APoly::theta(f)));
        assert_eq!(parse_apoly(f, "theta^2+1").unwrap(), APoly::from_codes(f, &[1, 0, 1]));
        assert!(parse_gamma(f, "U").is_err());
        let g = parse_gamma(f, "mat:theta,1,theta^2+theta+1,theta+1").unwrap();
        assert_eq!(g.det(), APoly::one(f));
        assert!(matches!(parse_gamma(f, "mat:theta,0,0,1"), Err(Error::NotInvertible)));
    }
}
