//! Finite abelian groups in invariant-factor form.
//!
//! A group `Z_{n_1} ⊕ … ⊕ Z_{n_r}` with `1 < n_1 | n_2 | … | n_r` is stored by
//! its factor list. Elements are coordinate vectors; they are also addressed by
//! a mixed-radix index (last coordinate least significant), so index order
//! coincides with lexicographic order on coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::error::{Error, Result};

/// Largest group the exhaustive machinery (Cayley tables, reach tables,
/// symmetry enumeration) will materialize.
pub const ENUMERATION_LIMIT: usize = 2048;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::from_factors(&[n])
    }

    /// `(Z_k)^n`.
    pub fn homocyclic(k: u64, n: usize) -> Result<Self> {
        Self::from_factors(&vec![k; n])
    }

    /// Builds the group `Z_{c_1} ⊕ … ⊕ Z_{c_t}` for an arbitrary list of cyclic
    /// factors, regrouping prime-power components into invariant-factor form.
    pub fn from_factors(cyclic: &[u64]) -> Result<Self> {
        if let Some(bad) = cyclic.iter().find(|&&c| c < 2) {
            return Err(Error::Parse {
                spec: format_factor_list(cyclic),
                reason: format!("cyclic factor {bad} is smaller than 2"),
            });
        }
        // prime -> exponents of the p-primary cyclic components
        let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &c in cyclic {
            for (p, e) in factorize(c) {
                primary.entry(p).or_default().push(e);
            }
        }
        let rank = primary.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for (p, mut exps) in primary {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            // largest exponent goes to the last invariant factor
            for (slot, e) in exps.into_iter().enumerate() {
                let idx = rank - 1 - slot;
                factors[idx] = factors[idx]
                    .checked_mul(p.checked_pow(e).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
        }
        debug_assert!(factors.windows(2).all(|w| w[1] % w[0] == 0));
        Ok(AbelianGroup { factors })
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Largest invariant factor; 1 for the trivial group.
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    /// Group order, `None` when it does not fit in a `u64`.
    pub fn order(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// `Some((k, n))` when the group is `(Z_k)^n` with `n >= 1`.
    pub fn as_homocyclic(&self) -> Option<(u64, usize)> {
        let first = *self.factors.first()?;
        self.factors
            .iter()
            .all(|&f| f == first)
            .then_some((first, self.factors.len()))
    }

    /// Order as an enumeration size, failing beyond [`ENUMERATION_LIMIT`].
    pub fn enumerable_order(&self) -> Result<usize> {
        match self.order() {
            Some(o) if o as u128 <= ENUMERATION_LIMIT as u128 => Ok(o as usize),
            other => Err(Error::GroupTooLarge {
                order: other.map_or_else(|| "> 2^64".to_string(), |o| o.to_string()),
                limit: ENUMERATION_LIMIT,
            }),
        }
    }

    /// Canonical text form, e.g. `3^2`, `2x4^2`, `6`, `1` for the trivial group.
    pub fn spec(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let f = self.factors[i];
            let run = self.factors[i..].iter().take_while(|&&g| g == f).count();
            parts.push(if run == 1 {
                f.to_string()
            } else {
                format!("{f}^{run}")
            });
            i += run;
        }
        parts.join("x")
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.factors.len()],
        }
    }

    /// Reduces arbitrary integer coordinates into canonical range.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.factors.len() {
            return Err(Error::Sequence(format!(
                "element has {} coordinates, group {} has rank {}",
                coords.len(),
                self.spec(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    /// Checks that `e` has canonical coordinates for this group.
    pub fn contains(&self, e: &GroupElement) -> bool {
        e.coords.len() == self.factors.len()
            && e.coords.iter().zip(&self.factors).all(|(&c, &n)| c < n)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        }
    }

    pub fn scale(&self, a: &GroupElement, m: u64) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(&x, &n)| ((x as u128 * m as u128) % n as u128) as u64)
                .collect(),
        }
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.coords.iter().zip(&self.factors).fold(1, |acc, (&x, &n)| {
            let o = n / crate::arith::gcd(x, n);
            num_integer::lcm(acc, o)
        })
    }

    /// Mixed-radix index of `e`.
    pub fn index_of(&self, e: &GroupElement) -> usize {
        e.coords
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut coords = vec![0; self.factors.len()];
        for (slot, &n) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (idx % n as usize) as u64;
            idx /= n as usize;
        }
        GroupElement { coords }
    }

    /// All elements in index order. Panics past [`ENUMERATION_LIMIT`].
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let order = self
            .enumerable_order()
            .expect("group too large to enumerate");
        (0..order).map(|i| self.element_at(i))
    }

    /// Precomputed index arithmetic for exhaustive algorithms.
    pub fn cayley(&self) -> Result<Cayley> {
        let order = self.enumerable_order()?;
        let elems: Vec<GroupElement> = (0..order).map(|i| self.element_at(i)).collect();
        let mut add = vec![0u32; order * order];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate().skip(i) {
                let s = self.index_of(&self.add(a, b)) as u32;
                add[i * order + j] = s;
                add[j * order + i] = s;
            }
        }
        let neg = elems
            .iter()
            .map(|a| self.index_of(&self.neg(a)) as u32)
            .collect();
        Ok(Cayley {
            group: self.clone(),
            order,
            add,
            neg,
        })
    }
}

fn overflow() -> Error {
    Error::domain("group order overflows 64 bits")
}

fn format_factor_list(list: &[u64]) -> String {
    list.iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianGroup({})", self.spec())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

/// Parses `<int>(^<int>)?(x<int>(^<int>)?)*`, e.g. `3^2`, `2x4x4`, `9`.
pub fn parse_group(spec: &str) -> Result<AbelianGroup> {
    let err = |reason: &str| Error::Parse {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let text = spec.trim();
    if text.is_empty() {
        return Err(err("empty spec"));
    }
    let mut cyclic = Vec::new();
    for term in text.split('x') {
        let (base, power) = match term.split_once('^') {
            Some((b, p)) => (b, Some(p)),
            None => (term, None),
        };
        let base: u64 = parse_uint(base).ok_or_else(|| err("expected an integer factor"))?;
        let power: usize = match power {
            Some(p) => parse_uint(p).ok_or_else(|| err("expected an integer exponent"))? as usize,
            None => 1,
        };
        if power == 0 {
            return Err(err("exponent must be at least 1"));
        }
        if base < 2 {
            return Err(err("cyclic factors must be at least 2"));
        }
        if power > 4096 {
            return Err(err("exponent too large"));
        }
        cyclic.extend(std::iter::repeat_n(base, power));
    }
    AbelianGroup::from_factors(&cyclic).map_err(|e| match e {
        Error::Parse { reason, .. } => err(&reason),
        other => other,
    })
}

fn parse_uint(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for AbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_group(s)
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec())
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "1" {
            return Ok(AbelianGroup::trivial());
        }
        parse_group(&s).map_err(serde::de::Error::custom)
    }
}

/// Addition and negation tables over element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cayley {
    group: AbelianGroup,
    order: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl Cayley {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `m·a` by repeated doubling.
    pub fn scale(&self, a: usize, mut m: u64) -> usize {
        let mut acc = 0;
        let mut base = a;
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            m >>= 1;
        }
        acc
    }
}
