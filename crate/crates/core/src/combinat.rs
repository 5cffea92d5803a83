//! Base-p digits, Lucas binomials and the digit-product function φ_p.

/// Base-p digits of `l`, least significant first; empty for `l = 0`.
pub fn digits_base_p(mut l: u64, p: u64) -> Vec<u64> {
    let mut v = vec![];
    while l > 0 {
        v.push(l % p);
        l /= p;
    }
    v
}

pub fn from_digits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// binom(n, k) mod p for n, k < p.
fn small_binom(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * modpow(den, p - 2, p) % p
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// binom(n, k) mod p via Lucas' theorem.
pub fn binom_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1;
    while k > 0 || n > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        acc = acc * small_binom(a, b, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

/// `(binom(l, r) mod p)` for r = 0..=l.
pub fn lucas_row(l: u64, p: u64) -> Vec<u64> {
    (0..=l).map(|r| binom_mod_p(l, r, p)).collect()
}

/// φ_p(l) = ∏ (l_i + 1) over the base-p digits of l.
pub fn phi_p(l: u64, p: u64) -> u64 {
    digits_base_p(l, p).iter().map(|d| d + 1).product()
}

/// The concatenation sequence a_1 = (1, 2, .., p), a_n = [a_{n-1}, 2a_{n-1}, .., p a_{n-1}],
/// returned as its first `n_terms` entries of the limit.
pub fn digit_sequence(n_terms: usize, p: u64) -> Vec<u64> {
    let mut a: Vec<u64> = (1..=p).collect();
    while a.len() < n_terms {
        a = (1..=p).flat_map(|k| a.iter().map(move |x| k * x)).collect();
    }
    a.truncate(n_terms);
    a
}

/// Apply a permutation of digit positions: digit i of `l` moves to
/// position `perm[i]` (positions beyond `perm` are fixed).
pub fn sp_action(perm: &[usize], l: u64, p: u64) -> u64 {
    let d = digits_base_p(l, p);
    let width = d.len().max(perm.len()).max(perm.iter().map(|x| x + 1).max().unwrap_or(0));
    let mut out = vec![0; width];
    for (i, &x) in d.iter().enumerate() {
        let j = perm.get(i).copied().unwrap_or(i);
        out[j] = x;
    }
    from_digits(&out, p)
}

/// Choose 0 <= k_1 <= .. <= k_s minimal (greedily) so that the base-p digit
/// blocks of l_i q^{k_i} are pairwise disjoint. Returns the k's and the sum.
pub fn carry_free_exponents(ls: &[u64], q: u64, p: u64) -> (Vec<u32>, u64) {
    let e = (q as f64).log(p as f64).round() as u32;
    let mut used_top = 0u32; // first free digit position
    let mut ks = vec![];
    let mut total = 0u64;
    for &l in ls {
        let len = digits_base_p(l, p).len() as u32;
        let start_min = used_top;
        // Smallest k with k*e >= start_min and k >= previous k.
        let prev = ks.last().copied().unwrap_or(0);
        let k = prev.max(start_min.div_ceil(e));
        ks.push(k);
        total += l * q.pow(k);
        used_top = k * e + len;
    }
    (ks, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom_exact(n: u64, k: u64) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn digits_examples() {
        for p in [2, 3, 5] {
            assert_eq!(digits_base_p(1 + p, p), vec![1, 1]);
        }
        assert!(digits_base_p(0, 3).is_empty());
        assert_eq!(digits_base_p(13, 3), vec![1, 1, 1]);
    }

    #[test]
    fn lucas_matches_exact_binomials() {
        for p in [2u64, 3, 5, 7] {
            for l in 0..40u64 {
                let row = lucas_row(l, p);
                for (r, &v) in row.iter().enumerate() {
                    assert_eq!(v as u128, binom_exact(l, r as u64) % p as u128);
                }
            }
        }
        let nz: Vec<usize> = lucas_row(5, 2).iter().enumerate().filter(|x| *x.1 != 0).map(|x| x.0).collect();
        assert_eq!(nz, vec![0, 1, 4, 5]);
        for p in [2u64, 3, 5] {
            let nz: Vec<u64> = lucas_row(1 + p, p).iter().enumerate().filter(|x| *x.1 != 0).map(|x| x.0 as u64).collect();
            assert_eq!(nz, vec![0, 1, p, p + 1]);
        }
        assert_eq!(lucas_row(0, 2), vec![1]);
    }

    #[test]
    fn phi_counts_nonzero_lucas_entries() {
        for p in [2u64, 3, 5] {
            for l in 0..p.pow(5).min(800) {
                let nz = lucas_row(l, p).iter().filter(|&&x| x != 0).count() as u64;
                assert_eq!(nz, phi_p(l, p));
            }
        }
        assert_eq!(phi_p(3, 2), 4);
    }

    #[test]
    fn concatenation_sequence_aligns_at_zero() {
        assert_eq!(digit_sequence(4, 2), vec![1, 2, 2, 4]);
        for p in [2u64, 3, 5] {
            let n = p.pow(5) as usize;
            let a = digit_sequence(n, p);
            let phi: Vec<u64> = (0..n as u64).map(|l| phi_p(l, p)).collect();
            assert_eq!(a, phi);
        }
    }

    #[test]
    fn digit_permutations() {
        assert_eq!(sp_action(&[], 17, 3), 17);
        assert_eq!(sp_action(&[1, 0], 1 + 2 * 3, 3), 2 + 3);
        for l in 0..200 {
            let l2 = sp_action(&[2, 0, 1], l, 3);
            assert_eq!(phi_p(l2, 3), phi_p(l, 3));
        }
    }

    #[test]
    fn carry_free_examples() {
        assert_eq!(carry_free_exponents(&[1, 1], 2, 2), (vec![0, 1], 3));
        assert_eq!(carry_free_exponents(&[5], 2, 2), (vec![0], 5));
        assert_eq!(carry_free_exponents(&[2, 2], 3, 3), (vec![0, 1], 8));
        let (ks, total) = carry_free_exponents(&[3, 1, 2], 4, 2);
        // digit multiset is the disjoint union
        let ones: u64 = digits_base_p(total, 2).iter().sum();
        assert_eq!(ones, 2 + 1 + 1);
        assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    }
}
