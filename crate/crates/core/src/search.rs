//! Exact `s(A)` and `g(A)` by exhaustive symmetry-reduced search.
//!
//! `s(A) - 1` is the largest length of a sequence over `A` without a
//! zero-sum subsequence of length `exp(A)`; `g(A) - 1` is the same maximum
//! taken over square-free sequences. Both are found by orderly generation
//! (see [`crate::orderly`]) with an incremental [`SumReachTable`] per node.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Cayley};
use crate::orderly::{Constraint, Goal, Orderly};
use crate::reach::SumReachTable;
use crate::sequence::ZSequence;
use crate::symmetry::Symmetries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_seconds: f64,
    pub parallel_width: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 10_000_000,
            max_seconds: 60.0,
            parallel_width: 1,
        }
    }
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            ..Self::default()
        }
    }

    pub fn with_threads(mut self, width: usize) -> Self {
        self.parallel_width = width.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStatus {
    Exact,
    LowerBoundOnly,
    Unknown,
    Vacuous,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Exact => "EXACT",
            SearchStatus::LowerBoundOnly => "LOWER_BOUND_ONLY",
            SearchStatus::Unknown => "UNKNOWN",
            SearchStatus::Vacuous => "VACUOUS",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactResult {
    pub value: Option<u64>,
    pub status: SearchStatus,
    pub witness: Option<ZSequence>,
    pub nodes_explored: u64,
}

impl ExactResult {
    /// Wire form `{"group","quantity","value","status","witness","nodes"}`.
    pub fn to_json(&self, group: &AbelianGroup, quantity: &str) -> serde_json::Value {
        json!({
            "group": group.spec(),
            "quantity": quantity,
            "value": self.value,
            "status": self.status.as_str(),
            "witness": self.witness.as_ref().map(|w| w.to_json()["elems"].clone()),
            "nodes": self.nodes_explored,
        })
    }
}

/// Zero-sum-free condition for length-`k` subsequences.
pub(crate) struct ZeroSumFree {
    pub cayley: Arc<Cayley>,
    pub k: usize,
}

impl Constraint for ZeroSumFree {
    type State = SumReachTable;

    fn root(&self) -> SumReachTable {
        SumReachTable::new(self.cayley.clone(), self.k)
    }

    fn admissible_copies(&self, state: &SumReachTable, x: usize, cap: usize) -> usize {
        (1..=cap)
            .take_while(|&c| state.accepts_copies(x, c))
            .last()
            .unwrap_or(0)
    }

    fn extend(&self, state: &SumReachTable, x: usize) -> SumReachTable {
        state.extend(x)
    }
}

fn check_k(group: &AbelianGroup, k: usize) -> Result<()> {
    let exp = group.exponent() as usize;
    if k == 0 || k % exp != 0 {
        return Err(Error::domain(format!(
            "subsequence length {k} must be a positive multiple of exp({group}) = {exp}"
        )));
    }
    Ok(())
}

struct Prepared {
    sym: Symmetries,
    constraint: ZeroSumFree,
}

fn prepare(group: &AbelianGroup, k: usize) -> Result<Prepared> {
    check_k(group, k)?;
    let cayley = Arc::new(group.cayley()?);
    Ok(Prepared {
        sym: Symmetries::for_zero_sum_with(cayley.clone()),
        constraint: ZeroSumFree { cayley, k },
    })
}

/// Longest sequence (multiplicities at most `max_mult`) without a zero-sum
/// subsequence of length `k`.
fn longest_free(
    group: &AbelianGroup,
    k: usize,
    max_mult: usize,
    budget: &SearchBudget,
) -> Result<ExactResult> {
    let p = prepare(group, k)?;
    let out = Orderly {
        sym: &p.sym,
        constraint: &p.constraint,
        max_mult: max_mult.min(k - 1),
        goal: Goal::Maximize,
    }
    .run(budget);
    Ok(ExactResult {
        value: Some(out.best.len() as u64),
        status: if out.complete {
            SearchStatus::Exact
        } else {
            SearchStatus::LowerBoundOnly
        },
        witness: Some(ZSequence::from_indices(group, &out.best)),
        nodes_explored: out.nodes,
    })
}

/// Maximum length of a sequence over `group` with no zero-sum subsequence of
/// length `k`. `k` must be a multiple of `exp(group)`.
pub fn max_zero_sum_free_length(
    group: &AbelianGroup,
    k: usize,
    budget: &SearchBudget,
) -> Result<ExactResult> {
    longest_free(group, k, usize::MAX, budget)
}

fn require_nontrivial(group: &AbelianGroup) -> Result<()> {
    if group.is_trivial() {
        return Err(Error::domain("the trivial group has no Erdős–Ginzburg–Ziv search"));
    }
    Ok(())
}

fn plus_one(mut r: ExactResult) -> ExactResult {
    r.value = r.value.map(|v| v + 1);
    r
}

/// `s(A)`: one more than the longest sequence free of zero-sum
/// subsequences of length `exp(A)`.
pub fn exact_s(group: &AbelianGroup, budget: &SearchBudget) -> Result<ExactResult> {
    require_nontrivial(group)?;
    Ok(plus_one(max_zero_sum_free_length(
        group,
        group.exponent() as usize,
        budget,
    )?))
}

/// `g(A)`: the square-free analogue of [`exact_s`].
///
/// When `A` itself (as a set) has no zero-sum subset of size `exp(A)` the
/// defining condition is vacuous past `|A|`; the result is then `|A| + 1`
/// with status [`SearchStatus::Vacuous`].
pub fn exact_g(group: &AbelianGroup, budget: &SearchBudget) -> Result<ExactResult> {
    require_nontrivial(group)?;
    let k = group.exponent() as usize;
    let order = group.enumerable_order()?;
    let all: Vec<usize> = (0..order).collect();
    let everything = ZSequence::from_indices(group, &all);
    if !crate::reach::has_zero_sum_subsequence(&everything, k)? {
        return Ok(ExactResult {
            value: Some(order as u64 + 1),
            status: SearchStatus::Vacuous,
            witness: Some(everything),
            nodes_explored: 0,
        });
    }
    Ok(plus_one(longest_free(group, k, 1, budget)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalSet {
    /// Orbit representatives, ascending.
    pub representatives: Vec<ZSequence>,
    pub orbit_count: usize,
    /// Total number of sequences, the sum of the orbit sizes.
    pub raw_count: u64,
    pub status: SearchStatus,
    pub nodes_explored: u64,
}

/// All sequences of the given length with no zero-sum subsequence of length
/// `k`, up to symmetry.
pub fn enumerate_extremal(
    group: &AbelianGroup,
    k: usize,
    length: usize,
    budget: &SearchBudget,
) -> Result<ExtremalSet> {
    let p = prepare(group, k)?;
    let out = Orderly {
        sym: &p.sym,
        constraint: &p.constraint,
        max_mult: k - 1,
        goal: Goal::Enumerate(length),
    }
    .run(budget);
    let raw_count = if out.complete {
        out.found.iter().map(|s| p.sym.orbit_size(s) as u64).sum()
    } else {
        0
    };
    Ok(ExtremalSet {
        orbit_count: out.found.len(),
        representatives: out
            .found
            .iter()
            .map(|s| ZSequence::from_indices(group, s))
            .collect(),
        raw_count,
        status: if out.complete {
            SearchStatus::Exact
        } else {
            SearchStatus::Unknown
        },
        nodes_explored: out.nodes,
    })
}

/// Evidence that a witness of length `s - 1` is extremal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub zero_sum_free: bool,
    pub extensions_checked: usize,
    pub extensions_forced: bool,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.zero_sum_free && self.extensions_forced
    }
}

/// Checks that `witness` avoids length-`k` zero-sums and that appending any
/// single element creates one. Every element is tried when `|G| <= 27`,
/// otherwise `samples` seeded random elements.
pub fn certify_witness(witness: &ZSequence, k: usize, seed: u64, samples: usize) -> Result<Certificate> {
    let table = SumReachTable::from_sequence(witness, k)?;
    let order = witness.group().enumerable_order()?;
    let candidates: Vec<usize> = if order <= 27 {
        (0..order).collect()
    } else {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..samples).map(|_| rng.gen_range(0..order)).collect()
    };
    Ok(Certificate {
        zero_sum_free: !table.has_zero_sum(),
        extensions_checked: candidates.len(),
        extensions_forced: candidates.iter().all(|&x| table.extend(x).has_zero_sum()),
    })
}
