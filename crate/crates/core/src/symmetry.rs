//! Symmetry groups acting on sequences, and orbit canonical forms.
//!
//! The maps used are `x ↦ φ(x) + t` with `φ` drawn from a group of
//! automorphisms and `t` any translation. When `k = exp(G)` translations
//! preserve zero-sum subsequences of length `k` (they shift the sum by
//! `k·t = 0`) and automorphisms preserve sums, so every such map preserves
//! the property searched for. The automorphism part may be a proper subgroup
//! of `Aut(G)`; that only weakens the reduction.
//!
//! Sequences are handled as sorted vectors of element indices, and the
//! canonical form of an orbit is its lexicographically least member.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::group::{AbelianGroup, Cayley};
use crate::sequence::ZSequence;

/// Automorphism enumeration stops (and falls back) past this many maps.
pub const AUTOMORPHISM_LIMIT: usize = 100_000;

/// Groups up to this order get a full automorphism enumeration attempt even
/// when they are not elementary abelian.
pub const SMALL_GROUP_ORDER: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearPart {
    /// All of `Aut(G)` (the general linear group for `(Z_p)^n`).
    FullAutomorphisms,
    /// Permutations of coordinates with equal invariant factors, combined
    /// with coordinate-wise multiplication by units.
    Monomial,
    /// Coordinate-wise multiplication by units.
    CoordinateUnits,
    /// Multiplication by a common unit scalar.
    Scalars,
    /// Identity only.
    Trivial,
}

#[derive(Clone, Debug)]
pub struct Symmetries {
    cayley: Arc<Cayley>,
    linear: LinearPart,
    /// Each automorphism as the image table of element indices. Entry 0 is
    /// the identity.
    maps: Vec<Vec<u32>>,
}

impl Symmetries {
    /// Symmetries preserving "has a zero-sum subsequence of length exp(G)":
    /// translations with all automorphisms when they can be enumerated,
    /// otherwise translations with monomial maps, or with coordinate-wise
    /// unit scalings when even those are too many.
    pub fn for_zero_sum(group: &AbelianGroup) -> Result<Self> {
        let cayley = Arc::new(group.cayley()?);
        Ok(Self::for_zero_sum_with(cayley))
    }

    pub fn for_zero_sum_with(cayley: Arc<Cayley>) -> Self {
        let group = cayley.group();
        let elementary = group.as_homocyclic().filter(|&(k, _)| crate::arith::is_prime(k));
        let feasible = match elementary {
            Some((p, n)) => general_linear_order(p, n).is_some_and(|o| o <= AUTOMORPHISM_LIMIT),
            None => cayley.order() <= SMALL_GROUP_ORDER,
        };
        if feasible {
            if let Some(maps) = enumerate_automorphisms(&cayley, AUTOMORPHISM_LIMIT) {
                return Symmetries {
                    cayley,
                    linear: LinearPart::FullAutomorphisms,
                    maps,
                };
            }
        }
        if let Some(maps) = monomial_maps(&cayley, AUTOMORPHISM_LIMIT) {
            return Symmetries {
                cayley,
                linear: LinearPart::Monomial,
                maps,
            };
        }
        Self::with_linear(cayley, LinearPart::CoordinateUnits)
    }

    /// Translations combined with the requested linear part.
    pub fn with_linear(cayley: Arc<Cayley>, linear: LinearPart) -> Self {
        let maps = match linear {
            LinearPart::FullAutomorphisms => enumerate_automorphisms(&cayley, usize::MAX)
                .expect("unbounded enumeration always completes"),
            LinearPart::Monomial => monomial_maps(&cayley, usize::MAX)
                .expect("unbounded enumeration always completes"),
            LinearPart::CoordinateUnits => coordinate_unit_maps(&cayley),
            LinearPart::Scalars => scalar_maps(&cayley),
            LinearPart::Trivial => vec![(0..cayley.order() as u32).collect()],
        };
        Symmetries {
            cayley,
            linear,
            maps,
        }
    }

    pub fn cayley(&self) -> &Arc<Cayley> {
        &self.cayley
    }

    pub fn linear_part(&self) -> LinearPart {
        self.linear
    }

    pub fn automorphism_count(&self) -> usize {
        self.maps.len()
    }

    /// Number of maps `x ↦ φ(x) + t`.
    pub fn size(&self) -> usize {
        self.maps.len() * self.cayley.order()
    }

    /// Image of a multiset under `x ↦ φ_aut(x) + t`, sorted.
    pub fn apply(&self, aut: usize, t: usize, seq: &[usize]) -> Vec<usize> {
        let phi = &self.maps[aut];
        let mut out: Vec<usize> = seq
            .iter()
            .map(|&x| self.cayley.add(phi[x] as usize, t))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn random_map<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        (
            rng.gen_range(0..self.maps.len()),
            rng.gen_range(0..self.cayley.order()),
        )
    }

    /// Whether a sorted multiset is the least member of its orbit.
    pub fn is_canonical(&self, seq: &[usize]) -> bool {
        self.find_smaller(seq).is_none()
    }

    /// The least member of the orbit of a sorted multiset.
    pub fn canonical(&self, seq: &[usize]) -> Vec<usize> {
        let mut best = seq.to_vec();
        while let Some(smaller) = self.find_smaller(&best) {
            best = smaller;
        }
        best
    }

    /// Some orbit member strictly smaller than `seq`, if any.
    fn find_smaller(&self, seq: &[usize]) -> Option<Vec<usize>> {
        if seq.is_empty() {
            return None;
        }
        debug_assert!(seq.windows(2).all(|w| w[0] <= w[1]));
        let runs = runs(seq);
        let top = runs.iter().map(|r| r.1).max().expect("nonempty");
        // a least orbit member starts with 0 repeated max-multiplicity times
        if seq[0] != 0 || runs[0].1 != top {
            let (s, _) = *runs.iter().find(|r| r.1 == top).expect("max exists");
            return Some(self.apply(0, self.cayley.neg(s), seq));
        }
        let mut image = Vec::with_capacity(seq.len());
        for &(s, m) in &runs {
            if m != top {
                continue;
            }
            let shifted: Vec<usize> = seq.iter().map(|&x| self.cayley.sub(x, s)).collect();
            for phi in &self.maps {
                image.clear();
                image.extend(shifted.iter().map(|&x| phi[x] as usize));
                image.sort_unstable();
                if image.as_slice() < seq {
                    return Some(image);
                }
            }
        }
        None
    }

    /// All distinct members of the orbit.
    pub fn orbit(&self, seq: &[usize]) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for aut in 0..self.maps.len() {
            for t in 0..self.cayley.order() {
                out.insert(self.apply(aut, t, seq));
            }
        }
        out
    }

    pub fn orbit_size(&self, seq: &[usize]) -> usize {
        self.orbit(seq).len()
    }
}

/// Run-length encoding `(value, count)` of a sorted slice.
fn runs(seq: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &x in seq {
        match out.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Canonical representative of the orbit of `s` under [`Symmetries::for_zero_sum`].
pub fn canonical_form(s: &ZSequence) -> Result<ZSequence> {
    let sym = Symmetries::for_zero_sum(s.group())?;
    Ok(ZSequence::from_indices(s.group(), &sym.canonical(&s.indices())))
}

/// Enumerates automorphisms as index permutations by choosing images of
/// the standard generators one at a time; `None` past `limit`.
fn enumerate_automorphisms(cayley: &Cayley, limit: usize) -> Option<Vec<Vec<u32>>> {
    let group = cayley.group();
    let order = cayley.order();
    let factors = group.invariant_factors().to_vec();
    let orders: Vec<u64> = (0..order)
        .map(|i| group.element_order(&group.element_at(i)))
        .collect();

    struct Frame {
        images: Vec<usize>,
        span: Vec<bool>,
    }

    let mut out = Vec::new();
    let mut stack = vec![Frame {
        images: Vec::new(),
        span: {
            let mut s = vec![false; order];
            s[0] = true;
            s
        },
    }];
    while let Some(frame) = stack.pop() {
        let i = frame.images.len();
        if i == factors.len() {
            if out.len() >= limit {
                return None;
            }
            out.push(permutation_from_images(cayley, &frame.images));
            continue;
        }
        let n = factors[i];
        for g in (0..order).rev() {
            if orders[g] != n {
                continue;
            }
            // <g> must meet the current span trivially
            let mut m = g;
            let mut independent = true;
            for _ in 1..n {
                if frame.span[m] {
                    independent = false;
                    break;
                }
                m = cayley.add(m, g);
            }
            if !independent {
                continue;
            }
            let mut span = vec![false; order];
            let members: Vec<usize> = (0..order).filter(|&h| frame.span[h]).collect();
            let mut mult = 0;
            for _ in 0..n {
                for &h in &members {
                    span[cayley.add(h, mult)] = true;
                }
                mult = cayley.add(mult, g);
            }
            let mut images = frame.images.clone();
            images.push(g);
            stack.push(Frame { images, span });
        }
    }
    let identity: Vec<u32> = (0..order as u32).collect();
    let pos = out.iter().position(|m| *m == identity).expect("identity is an automorphism");
    out.swap(0, pos);
    Some(out)
}

/// The homomorphism sending the i-th standard generator to `images[i]`.
fn permutation_from_images(cayley: &Cayley, images: &[usize]) -> Vec<u32> {
    let group = cayley.group();
    (0..cayley.order())
        .map(|x| {
            let coords = group.element_at(x);
            coords
                .coords()
                .iter()
                .zip(images)
                .fold(0usize, |acc, (&c, &img)| cayley.add(acc, cayley.scale(img, c)))
                as u32
        })
        .collect()
}

/// `|GL(n, p)| = Π_{i<n} (p^n - p^i)`, if it fits.
fn general_linear_order(p: u64, n: usize) -> Option<usize> {
    let pn = p.checked_pow(n as u32)?;
    let mut acc: u64 = 1;
    let mut pi: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(pn - pi)?;
        pi *= p;
    }
    usize::try_from(acc).ok()
}

/// All orderings of `0..n`, starting with the identity.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot has a successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Coordinate permutations inside blocks of equal invariant factors,
/// composed with unit scalings; `None` past `limit`.
fn monomial_maps(cayley: &Cayley, limit: usize) -> Option<Vec<Vec<u32>>> {
    let group = cayley.group();
    let factors = group.invariant_factors();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for (i, &f) in factors.iter().enumerate() {
        match blocks.last_mut() {
            Some((start, len)) if factors[*start] == f => *len += 1,
            _ => blocks.push((i, 1)),
        }
    }
    let mut count: usize = 1;
    for &(start, len) in &blocks {
        let units = (1..factors[start].max(2))
            .filter(|&u| crate::arith::gcd(u, factors[start]) == 1)
            .count();
        for i in 1..=len {
            count = count.checked_mul(i)?.checked_mul(units)?;
        }
    }
    if count > limit {
        return None;
    }
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for &(start, len) in &blocks {
        let local = permutations(len);
        perms = perms
            .into_iter()
            .flat_map(|p| {
                local.iter().map(move |q| {
                    let mut next = p.clone();
                    next.extend(q.iter().map(|&j| start + j));
                    next
                })
            })
            .collect();
    }
    let scalings = coordinate_unit_maps(cayley);
    let mut out = Vec::with_capacity(count);
    for perm in &perms {
        let moved: Vec<u32> = (0..cayley.order())
            .map(|x| {
                let c = group.element_at(x);
                let image: Vec<i64> = perm.iter().map(|&j| c.coords()[j] as i64).collect();
                group.index_of(&group.element(&image).expect("rank matches")) as u32
            })
            .collect();
        for scale in &scalings {
            out.push(moved.iter().map(|&y| scale[y as usize]).collect());
        }
    }
    Some(out)
}

fn coordinate_unit_maps(cayley: &Cayley) -> Vec<Vec<u32>> {
    let group = cayley.group();
    let unit_lists: Vec<Vec<u64>> = group
        .invariant_factors()
        .iter()
        .map(|&n| (1..n).filter(|&u| crate::arith::gcd(u, n) == 1).collect())
        .collect();
    let mut choices: Vec<Vec<u64>> = vec![Vec::new()];
    for units in &unit_lists {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                units.iter().map(move |&u| {
                    let mut next = c.clone();
                    next.push(u);
                    next
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .map(|us| {
            (0..cayley.order())
                .map(|x| {
                    let e = group.element_at(x);
                    let scaled: Vec<i64> = e
                        .coords()
                        .iter()
                        .zip(&us)
                        .map(|(&c, &u)| (c * u) as i64)
                        .collect();
                    group.index_of(&group.element(&scaled).expect("rank matches")) as u32
                })
                .collect()
        })
        .collect()
}

fn scalar_maps(cayley: &Cayley) -> Vec<Vec<u32>> {
    let exp = cayley.group().exponent();
    (1..exp.max(2))
        .filter(|&u| crate::arith::gcd(u, exp) == 1)
        .map(|u| {
            (0..cayley.order())
                .map(|x| cayley.scale(x, u) as u32)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;
    use rand::SeedableRng;

    fn sym(spec: &str) -> Symmetries {
        Symmetries::for_zero_sum(&parse_group(spec).unwrap()).unwrap()
    }

    #[test]
    fn automorphism_group_orders() {
        // |GL(n, p)| and known small Aut(G) orders
        let cases = [
            ("2", 1),
            ("3", 2),
            ("7", 6),
            ("2^2", 6),
            ("2^3", 168),
            ("3^2", 48),
            ("2^4", 20160),
            ("4^2", 96),
            ("2x4", 8),
            ("6", 2),
        ];
        for (spec, n) in cases {
            let s = sym(spec);
            assert_eq!(s.linear_part(), LinearPart::FullAutomorphisms, "{spec}");
            assert_eq!(s.automorphism_count(), n, "{spec}");
            assert_eq!(s.maps[0], (0..s.cayley.order() as u32).collect::<Vec<_>>());
        }
    }

    #[test]
    fn automorphisms_are_homomorphic_bijections() {
        let s = sym("2x4");
        let c = s.cayley();
        for phi in &s.maps {
            let mut seen = phi.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..8).collect::<Vec<u32>>());
            for a in 0..8 {
                for b in 0..8 {
                    assert_eq!(phi[c.add(a, b)] as usize, c.add(phi[a] as usize, phi[b] as usize));
                }
            }
        }
    }

    #[test]
    fn large_groups_fall_back() {
        let s = sym("2^5");
        assert_eq!(s.linear_part(), LinearPart::Monomial);
        assert_eq!(s.automorphism_count(), 120);
        let s = sym("3^4");
        assert_eq!(s.linear_part(), LinearPart::Monomial);
        assert_eq!(s.automorphism_count(), 24 * 16);
        let s = sym("5x25");
        assert_eq!(s.linear_part(), LinearPart::Monomial);
        assert_eq!(s.automorphism_count(), 4 * 20);
        let s = sym("2^9");
        assert_eq!(s.linear_part(), LinearPart::CoordinateUnits);
        assert_eq!(s.automorphism_count(), 1);
        for spec in ["2^5", "3^4", "2x2x4x4"] {
            let s = sym(spec);
            let c = s.cayley();
            assert_eq!(s.maps[0], (0..c.order() as u32).collect::<Vec<_>>());
            for phi in s.maps.iter().step_by(13) {
                for a in (0..c.order()).step_by(7) {
                    for b in 0..c.order() {
                        assert_eq!(phi[c.add(a, b)] as usize, c.add(phi[a] as usize, phi[b] as usize));
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let z3 = parse_group("3").unwrap();
        let a = canonical_form(&ZSequence::cyclic(&z3, &[1, 1, 2, 2]).unwrap()).unwrap();
        let b = canonical_form(&ZSequence::cyclic(&z3, &[0, 0, 1, 1]).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.indices(), vec![0, 0, 1, 1]);

        for spec in ["3", "2^3", "4x4"] {
            let g = parse_group(spec).unwrap();
            for x in 0..g.order().unwrap() as usize {
                let c = canonical_form(&ZSequence::from_indices(&g, &[x])).unwrap();
                assert_eq!(c.indices(), vec![0]);
            }
        }
    }

    #[test]
    fn canonical_is_idempotent_and_orbit_invariant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for spec in ["5", "3^2", "2x4", "4^2", "2^4"] {
            let s = sym(spec);
            let n = s.cayley.order();
            for _ in 0..5 {
                let len = rng.gen_range(1..7);
                let mut seq: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
                seq.sort_unstable();
                let c = s.canonical(&seq);
                assert!(s.is_canonical(&c));
                assert_eq!(s.canonical(&c), c);
                for _ in 0..100 {
                    let (aut, t) = s.random_map(&mut rng);
                    assert_eq!(s.canonical(&s.apply(aut, t, &seq)), c, "{spec} {seq:?}");
                }
                assert!(s.orbit(&seq).iter().all(|m| m >= &c));
            }
        }
    }
}
