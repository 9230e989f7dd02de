//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigUint;
use zslab::{AbelianGroup, GroupElement};

/// Tries every `k`-subset of positions.
pub fn naive_has_zero_sum(g: &AbelianGroup, elems: &[GroupElement], k: usize) -> bool {
    let len = elems.len();
    (0u32..1 << len).any(|mask| {
        mask.count_ones() as usize == k
            && (0..len)
                .filter(|i| mask >> i & 1 == 1)
                .fold(g.zero(), |acc, i| g.add(&acc, &elems[i]))
                == g.zero()
    })
}

/// All `base^m` index tuples.
pub fn tuples(base: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..base.pow(m as u32)).map(move |mut code| {
        (0..m)
            .map(|_| {
                let d = code % base;
                code /= base;
                d
            })
            .collect()
    })
}

/// `(zero-sum tuples, whether a non-constant one exists)` over `F^m`.
pub fn naive_petrov(g: &AbelianGroup, coeffs: &[u64], set: &[GroupElement]) -> (u128, bool) {
    let mut zero = 0u128;
    let mut violated = false;
    for t in tuples(set.len(), coeffs.len()) {
        let sum = t
            .iter()
            .zip(coeffs)
            .fold(g.zero(), |acc, (&i, &a)| g.add(&acc, &g.scale(&set[i], a)));
        if sum == g.zero() {
            zero += 1;
            violated |= t.iter().any(|&i| i != t[0]);
        }
    }
    (zero, violated)
}

/// Largest subset of `g` passing the condition, by trying every subset.
pub fn naive_petrov_max(g: &AbelianGroup, coeffs: &[u64]) -> usize {
    let elems: Vec<GroupElement> = g.elements().collect();
    let mut best = 0;
    for mask in 0u32..1 << elems.len() {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let set: Vec<GroupElement> = (0..elems.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| elems[i].clone())
            .collect();
        if !naive_petrov(g, coeffs, &set).1 {
            best = size;
        }
    }
    best
}

/// Monomials with exponents below `d` counted by total degree.
pub fn monomials_by_degree(n: usize, d: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * (d as usize - 1) + 1];
    for code in 0..d.pow(n as u32) {
        let (mut c, mut deg) = (code, 0);
        for _ in 0..n {
            deg += c % d;
            c /= d;
        }
        out[deg as usize] += 1;
    }
    out
}

/// `dim L_{n,D,k}` by direct enumeration.
pub fn direct_dim(n: usize, d: u64, k: u64) -> BigUint {
    let counts = monomials_by_degree(n, d);
    BigUint::from(counts.iter().take(k as usize + 1).sum::<u64>())
}
