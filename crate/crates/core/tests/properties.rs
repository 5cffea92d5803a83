use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tatereps::algrep::AlgebraRep;
use tatereps::amalgam::{nagao_decompose, phi_infty, phi_retract, word_product};
use tatereps::apoly::APoly;
use tatereps::field::{FieldConfig, Fq};
use tatereps::gamma::{homomorphism_check, GammaElem, GammaRep};
use tatereps::lfunc::{omega_value, tau_residual, L_value, SemiCharacter};
use tatereps::modular::{bottom_rows, eisenstein_E, point_cap, tail_bound, OmegaPoint};
use tatereps::parse::{parse_apoly, parse_sigma};
use tatereps::report::{residual_val_lmatrix, residual_val_matrix};
use tatereps::series::Precision;

fn field(i: usize) -> Fq {
    FieldConfig::builtin([2, 3, 4, 5][i]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amalgam_round_trip(fi in 0usize..4, seed in any::<u64>(), deg in 0usize..4) {
        let f = field(fi);
        let g = GammaElem::random(f, &mut ChaCha8Rng::seed_from_u64(seed), deg);
        let w = nagao_decompose(&g).unwrap();
        prop_assert_eq!(word_product(&w), g.clone());
        prop_assert_eq!(phi_retract(&phi_infty(&g).unwrap()), Some(g));
    }

    #[test]
    fn apoly_text_round_trip(fi in prop::sample::select(vec![0usize, 1, 3]), codes in prop::collection::vec(0u32..4, 0..7)) {
        let f = field(fi);
        let codes: Vec<u32> = codes.into_iter().map(|c| c % f.p()).collect();
        let a = APoly::from_codes(f, &codes);
        prop_assert_eq!(parse_apoly(f, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn digit_representations_are_homomorphisms(fi in 0usize..3, seed in any::<u64>(), l in 0u64..9) {
        let f = field(fi);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let pairs = vec![(GammaElem::random(f, &mut r, 1), GammaElem::random(f, &mut r, 1))];
        prop_assert!(homomorphism_check(&GammaRep::digits_t(0, l), &pairs));
    }
}

/// Raising the precision leaves the known part of ω_σ unchanged and raises the residual.
#[test]
fn omega_is_stable_under_precision() {
    let f = field(1);
    for s in ["chi", "companion:x^2-t", "companion:x^2-t*x-1"] {
        let rep = parse_sigma(f, s).unwrap();
        let lo = omega_value(&rep, Precision::new(20, 4)).unwrap();
        let hi = omega_value(&rep, Precision::new(35, 4)).unwrap();
        let diff = residual_val_lmatrix(&hi.omega().sub(&lo.omega()));
        assert!(diff.at_least(Ratio::from_integer(20)), "{s}: {diff}");
        assert!(tau_residual(&hi) > tau_residual(&lo) || tau_residual(&lo).at_least(Ratio::from_integer(35)), "{s}");
    }
}

/// L_σ(n) at cutoffs D and D + 1 agree to valuation n(D + 1).
#[test]
fn l_values_are_stable_under_cutoff() {
    for q in [2, 3] {
        let f = FieldConfig::builtin(q).unwrap();
        let sc = SemiCharacter::single(parse_sigma(f, "companion:x^2-t").unwrap());
        for n in [1u32, 2] {
            for d in 0..4 {
                let diff = L_value(&sc, n, d + 1).sub(&L_value(&sc, n, d));
                assert!(residual_val_matrix(&diff).at_least(Ratio::from_integer(n as i64 * (d as i64 + 1))), "q={q} n={n} D={d}");
            }
        }
    }
}

/// The degree-(D+1) layer of 𝓔 respects the tail bound at cutoff D.
#[test]
fn eisenstein_tail_bound_holds() {
    for (q, k, dmax) in [(2u32, 1i64, 4usize), (2, 5, 4), (3, 1, 2), (3, -1, 2)] {
        let f = FieldConfig::builtin(q).unwrap();
        let z = OmegaPoint::theta_half(f, k).unwrap();
        let rep = GammaRep::rho_sigma(AlgebraRep::chi(f, 0));
        let rows = bottom_rows(2, 1);
        for w in [1u32, 3] {
            let cap = point_cap(&z, w, dmax, 4);
            let e = eisenstein_E(&rep, &rows, w, 0, &z, dmax, cap).unwrap();
            for d in 0..dmax {
                let layer = e.deltas[d];
                assert!(layer >= tatereps::report::Val::Finite(tail_bound(&z, w, d)), "q={q} z=θ^{k}/2 w={w} D={d}: {layer}");
            }
        }
    }
}
