//! Sequences over a group: finite multisets of elements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupElement};

/// A multiset `S = ∏ g^{ν_g(S)}` over a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZSequence {
    group: AbelianGroup,
    mult: BTreeMap<GroupElement, usize>,
}

impl ZSequence {
    pub fn empty(group: &AbelianGroup) -> Self {
        ZSequence {
            group: group.clone(),
            mult: BTreeMap::new(),
        }
    }

    pub fn from_elements<I>(group: &AbelianGroup, elems: I) -> Result<Self>
    where
        I: IntoIterator<Item = GroupElement>,
    {
        let mut s = Self::empty(group);
        for e in elems {
            s.push(e)?;
        }
        Ok(s)
    }

    /// Builds a sequence from mixed-radix element indices (repeats allowed).
    pub fn from_indices(group: &AbelianGroup, indices: &[usize]) -> Self {
        let mut s = Self::empty(group);
        for &i in indices {
            *s.mult.entry(group.element_at(i)).or_insert(0) += 1;
        }
        s
    }

    /// Convenience constructor for cyclic groups: `[0, 1, 1]` over `Z_3`.
    pub fn cyclic(group: &AbelianGroup, residues: &[i64]) -> Result<Self> {
        Self::from_elements(
            group,
            residues
                .iter()
                .map(|&r| group.element(&[r]))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn push(&mut self, e: GroupElement) -> Result<()> {
        if !self.group.contains(&e) {
            return Err(Error::Sequence(format!(
                "{e} is not an element of {}",
                self.group
            )));
        }
        *self.mult.entry(e).or_insert(0) += 1;
        Ok(())
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// `|S|`.
    pub fn len(&self) -> usize {
        self.mult.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    /// `σ(S)`.
    pub fn sum(&self) -> GroupElement {
        self.mult.iter().fold(self.group.zero(), |acc, (g, &m)| {
            self.group.add(&acc, &self.group.scale(g, m as u64))
        })
    }

    /// `ν_g(S)`.
    pub fn multiplicity(&self, g: &GroupElement) -> usize {
        self.mult.get(g).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.mult.keys()
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = (&GroupElement, usize)> {
        self.mult.iter().map(|(g, &m)| (g, m))
    }

    pub fn is_squarefree(&self) -> bool {
        self.mult.values().all(|&m| m == 1)
    }

    pub fn is_zero_sum(&self) -> bool {
        self.sum() == self.group.zero()
    }

    /// `T | S` in the free abelian monoid.
    pub fn divides(&self, other: &ZSequence) -> bool {
        self.mult.iter().all(|(g, &m)| other.multiplicity(g) >= m)
    }

    /// Elements in index order with repeats.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.mult
            .iter()
            .flat_map(|(g, &m)| std::iter::repeat_n(g.clone(), m))
            .collect()
    }

    /// Sorted mixed-radix indices with repeats.
    pub fn indices(&self) -> Vec<usize> {
        self.mult
            .iter()
            .flat_map(|(g, &m)| std::iter::repeat_n(self.group.index_of(g), m))
            .collect()
    }

    /// `S^m`: every multiplicity multiplied by `m`.
    pub fn power(&self, m: usize) -> Self {
        ZSequence {
            group: self.group.clone(),
            mult: self
                .mult
                .iter()
                .filter(|_| m > 0)
                .map(|(g, &v)| (g.clone(), v * m))
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SequenceJson::from(self)).expect("sequence serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: SequenceJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Sequence(e.to_string()))?;
        raw.try_into()
    }
}

impl std::fmt::Display for ZSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Wire form: `{"group": "3^2", "elems": [[0,1],[0,1],[1,2]]}`, repeats listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceJson {
    pub group: String,
    pub elems: Vec<Vec<i64>>,
}

impl From<&ZSequence> for SequenceJson {
    fn from(s: &ZSequence) -> Self {
        SequenceJson {
            group: s.group.spec(),
            elems: s
                .elements()
                .iter()
                .map(|e| e.coords().iter().map(|&c| c as i64).collect())
                .collect(),
        }
    }
}

impl TryFrom<SequenceJson> for ZSequence {
    type Error = Error;

    fn try_from(raw: SequenceJson) -> Result<Self> {
        let group = if raw.group == "1" {
            AbelianGroup::trivial()
        } else {
            crate::group::parse_group(&raw.group)?
        };
        let elems = raw
            .elems
            .iter()
            .map(|c| {
                if c.iter()
                    .zip(group.invariant_factors())
                    .any(|(&x, &n)| x < 0 || x as u64 >= n)
                {
                    return Err(Error::Sequence(format!(
                        "coordinates {c:?} out of range for {group}"
                    )));
                }
                group.element(c)
            })
            .collect::<Result<Vec<_>>>()?;
        ZSequence::from_elements(&group, elems)
    }
}

impl Serialize for ZSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SequenceJson::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}
