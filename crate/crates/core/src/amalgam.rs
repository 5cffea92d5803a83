//! GL₂(k[t]) as the amalgam GL₂(k) ∗_{B(k)} B(k[t]): normal forms, the
//! embedding Φ^∞ into GL₂(k[x_1, x_2, ..]) and essential-dimension bounds.

use serde::Serialize;

use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::gamma::{GammaElem, Mat2};
use crate::matrix::Matrix;
use crate::mpoly::{MPoly, Mono};
use crate::ratfunc::RatFunc;

/// A factor of an amalgam word.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// An element of GL₂(k).
    Finite(Mat2<FqElem>),
    /// An element of B(k[t]) (upper triangular).
    Borel(Mat2<APoly>),
}

impl Factor {
    fn to_gamma(&self) -> GammaElem {
        match self {
            Factor::Finite(m) => m.map(|x| APoly::constant(*x)),
            Factor::Borel(m) => m.clone(),
        }
    }
    fn is_finite(&self) -> bool {
        matches!(self, Factor::Finite(_))
    }
}

/// h·y_1⋯y_n with h ∈ B(k) and the y_i alternating coset representatives
/// of B(k)\GL₂(k) (of the form w(1 x; 0 1), w = (0 1; 1 0)) and of
/// B(k)\B(k[t]) (of the form (1 p; 0 1), p(0) = 0, p ≠ 0).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmalgamWord {
    pub head: Mat2<FqElem>,
    pub factors: Vec<Factor>,
}

/// z = h·r with h ∈ B(k) and r the chosen representative of B(k)z (None for the trivial coset).
fn split_finite(z: &Mat2<FqElem>) -> (Mat2<FqElem>, Option<Mat2<FqElem>>) {
    let f = z.a.field();
    if z.c.is_zero() {
        return (z.clone(), None);
    }
    let x = z.d * z.c.inv().unwrap();
    let h = Mat2::new(z.b - z.a * x, z.a, f.zero(), z.c);
    (h, Some(Mat2::new(f.zero(), f.one(), f.one(), x)))
}

fn split_borel(z: &Mat2<APoly>) -> (Mat2<FqElem>, Option<Mat2<APoly>>) {
    let f = z.a.field();
    let (l, m) = (z.a.lead(), z.d.lead());
    let b0 = z.b.coeff(0);
    let h = Mat2::new(l, b0, f.zero(), m);
    let p = z.b.sub(&APoly::constant(b0)).scale(l.inv().unwrap());
    if p.is_zero() {
        (h, None)
    } else {
        (h, Some(Mat2::new(APoly::one(f), p, APoly::zero(f), APoly::one(f))))
    }
}

fn lift(h: &Mat2<FqElem>) -> Mat2<APoly> {
    h.map(|x| APoly::constant(*x))
}

/// The normal form of the product of an arbitrary word, built right to left
/// by merging into the alternating suffix and pushing B(k) content leftwards.
pub fn normalize(f: Fq, word: &[Factor]) -> AmalgamWord {
    let id = Mat2::new(f.one(), f.zero(), f.zero(), f.one());
    let mut head = id;
    let mut suffix: Vec<Factor> = vec![];
    for x in word.iter().rev() {
        let mut z = match x {
            Factor::Finite(m) => Factor::Finite(m.mul(&head)),
            Factor::Borel(m) => Factor::Borel(m.mul(&lift(&head))),
        };
        if suffix.first().is_some_and(|y| y.is_finite() == z.is_finite()) {
            let y = suffix.remove(0);
            z = match (z, y) {
                (Factor::Finite(a), Factor::Finite(b)) => Factor::Finite(a.mul(&b)),
                (Factor::Borel(a), Factor::Borel(b)) => Factor::Borel(a.mul(&b)),
                _ => unreachable!(),
            };
        }
        let (h, r) = match &z {
            Factor::Finite(m) => {
                let (h, r) = split_finite(m);
                (h, r.map(Factor::Finite))
            }
            Factor::Borel(m) => {
                let (h, r) = split_borel(m);
                (h, r.map(Factor::Borel))
            }
        };
        head = h;
        if let Some(r) = r {
            suffix.insert(0, r);
        }
    }
    AmalgamWord { head, factors: suffix }
}

/// A word for γ by Euclidean reduction of the bottom row, then normalized.
pub fn nagao_decompose(g: &GammaElem) -> Result<AmalgamWord> {
    let f = g.a.field();
    let det = g.det();
    if det.degree() != Some(0) {
        return Err(Error::NotInvertible);
    }
    let w = Mat2::new(f.zero(), f.one(), f.one(), f.zero());
    let mut cur = g.clone();
    let mut rev: Vec<Factor> = vec![];
    while !cur.c.is_zero() {
        // cur = cur' (1 Q; 0 1) with deg(d - cQ) < deg c, then cur' = cur'' w.
        let (qt, _) = cur.d.div_rem(&cur.c);
        let u = Mat2::new(APoly::one(f), qt.clone(), APoly::zero(f), APoly::one(f));
        let uinv = Mat2::new(APoly::one(f), qt.neg(), APoly::zero(f), APoly::one(f));
        cur = cur.mul(&uinv).mul(&lift(&w));
        rev.push(Factor::Borel(u));
        rev.push(Factor::Finite(w.clone()));
    }
    rev.push(Factor::Borel(cur));
    rev.reverse();
    Ok(normalize(f, &rev))
}

/// Product of a word, as an element of GL₂(k[t]).
pub fn word_product(word: &AmalgamWord) -> GammaElem {
    let h = lift(&word.head);
    word.factors.iter().fold(h, |acc, x| acc.mul(&x.to_gamma()))
}

/// Φ^∞(γ): B(k[t]) factors (λ Σ b_i t^i; 0 μ) ↦ (λ b_0 + Σ_{i>0} b_i x_i; 0 μ)
/// with x_i the variable of index i - 1; GL₂(k) factors unchanged.
pub fn phi_infty(g: &GammaElem) -> Result<Mat2<MPoly>> {
    let f = g.a.field();
    let word = nagao_decompose(g)?;
    let c = |x: &FqElem| MPoly::constant(*x);
    let mut acc = word.head.map(c);
    for x in &word.factors {
        let m = match x {
            Factor::Finite(m) => m.map(c),
            Factor::Borel(m) => {
                let lin = |p: &APoly| {
                    p.coeffs().iter().enumerate().fold(MPoly::zero(f), |s, (i, b)| {
                        if i == 0 {
                            s.add(&MPoly::constant(*b))
                        } else {
                            s.add(&MPoly::var(f, i - 1).scale(*b))
                        }
                    })
                };
                Mat2::new(lin(&m.a), lin(&m.b), lin(&m.c), lin(&m.d))
            }
        };
        acc = acc.mul(&m);
    }
    Ok(acc)
}

/// Left inverse of Φ^∞: x_i ↦ t^i. Entries with variables beyond `nvars`
/// are rejected.
pub fn phi_retract(m: &Mat2<MPoly>) -> Option<GammaElem> {
    let f = m.a.field();
    let nv = [&m.a, &m.b, &m.c, &m.d].iter().map(|x| x.nvars()).max().unwrap_or(0);
    let images: Vec<MPoly> = (0..nv).map(|i| MPoly::term(f.one(), Mono::var_pow(0, i as u32 + 1))).collect();
    let r = |x: &MPoly| x.subst(&images).to_apoly(0);
    Some(Mat2::new(r(&m.a)?, r(&m.b)?, r(&m.c)?, r(&m.d)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EssDimBounds {
    /// Rank of the Jacobian over the function field.
    pub lower: usize,
    /// Number of variables occurring.
    pub upper: usize,
}

/// Bounds on the transcendence degree over k of the field generated by `entries`.
pub fn essential_dimension_diag(entries: &[RatFunc]) -> EssDimBounds {
    let Some(first) = entries.first() else {
        return EssDimBounds { lower: 0, upper: 0 };
    };
    let f = first.field();
    let nv = entries.iter().map(|e| e.nvars()).max().unwrap_or(0);
    let vars: Vec<usize> = (0..nv).filter(|&i| entries.iter().any(|e| e.uses_var(i))).collect();
    if vars.is_empty() {
        return EssDimBounds { lower: 0, upper: 0 };
    }
    let jac = Matrix::from_fn(entries.len(), vars.len(), RatFunc::zero(f), |i, j| entries[i].partial_derivative(vars[j]));
    EssDimBounds { lower: jac.rank(), upper: vars.len() }
}

/// Entries of a matrix sample as a flat list.
pub fn sample_entries(mats: &[Matrix<RatFunc>]) -> Vec<RatFunc> {
    mats.iter().flat_map(|m| m.entries().iter().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use crate::algrep::{companion_sigma, CompanionSpec};
    use crate::gamma::{random_pairs, GammaRep};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fields() -> Vec<Fq> {
        [2, 3, 5].iter().map(|&q| FieldConfig::builtin(q).unwrap()).collect()
    }

    #[test]
    fn decomposition_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in fields() {
            for _ in 0..200 {
                let deg = rng.gen_range(0..=2);
                let g = GammaElem::random(f, &mut rng, deg);
                let w = nagao_decompose(&g).unwrap();
                assert_eq!(word_product(&w), g);
                for pair in w.factors.windows(2) {
                    assert_ne!(pair[0].is_finite(), pair[1].is_finite());
                }
            }
        }
    }

    #[test]
    fn normal_form_is_unique() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in fields() {
            for _ in 0..50 {
                let mut word = vec![];
                for _ in 0..rng.gen_range(1..7) {
                    if rng.gen_bool(0.5) {
                        let g = loop {
                            let m = Mat2::new(f.elem(rng.gen_range(0..f.q())), f.elem(rng.gen_range(0..f.q())), f.elem(rng.gen_range(0..f.q())), f.elem(rng.gen_range(0..f.q())));
                            if !m.det().is_zero() {
                                break m;
                            }
                        };
                        word.push(Factor::Finite(g));
                    } else {
                        let u = f.nonzero_elements().nth(rng.gen_range(0..f.q() as usize - 1)).unwrap();
                        let b = APoly::new(f, (0..4).map(|_| f.elem(rng.gen_range(0..f.q()))).collect());
                        word.push(Factor::Borel(Mat2::new(APoly::constant(u), b, APoly::zero(f), APoly::one(f))));
                    }
                }
                let nf = normalize(f, &word);
                let g = word.iter().fold(GammaElem::identity(f), |acc, x| acc.mul(&x.to_gamma()));
                assert_eq!(word_product(&nf), g);
                assert_eq!(nagao_decompose(&g).unwrap(), nf);
            }
        }
    }

    #[test]
    fn phi_is_an_injective_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in fields() {
            for (g, h) in random_pairs(f, &mut rng, 50, 2) {
                let (pg, ph) = (phi_infty(&g).unwrap(), phi_infty(&h).unwrap());
                assert_eq!(phi_infty(&g.mul(&h)).unwrap(), pg.mul(&ph));
                assert_eq!(phi_retract(&pg).unwrap(), g);
            }
        }
        let f = FieldConfig::builtin(3).unwrap();
        let x = APoly::theta(f);
        let m = phi_infty(&GammaElem::e12(x.mul(&x))).unwrap();
        assert_eq!(m.b, MPoly::var(f, 1));
        assert!(phi_infty(&Mat2::new(x.clone(), APoly::zero(f), APoly::zero(f), APoly::one(f))).is_err());
    }

    #[test]
    fn essential_dimension_bounds() {
        let f = FieldConfig::builtin(3).unwrap();
        let sample = GammaElem::sample_family(f, 2);
        let ents = |r: &GammaRep| sample_entries(&sample.iter().map(|g| r.apply(g)).collect::<Vec<_>>());
        assert_eq!(essential_dimension_diag(&ents(&GammaRep::digits_t(0, 1))), EssDimBounds { lower: 1, upper: 1 });
        assert_eq!(essential_dimension_diag(&ents(&GammaRep::tensor_ii(&[1, 1]))), EssDimBounds { lower: 2, upper: 2 });
        assert_eq!(essential_dimension_diag(&ents(&GammaRep::tensor_ii(&[1, 2, 1]))), EssDimBounds { lower: 3, upper: 3 });
        let spec = CompanionSpec::new(vec![RatFunc::constant(f.from_int(-1)), RatFunc::zero(f), RatFunc::one(f)]).unwrap();
        let sigma = companion_sigma(&spec);
        assert_eq!(essential_dimension_diag(&ents(&GammaRep::rho_sigma(sigma))), EssDimBounds { lower: 0, upper: 0 });
    }
}
