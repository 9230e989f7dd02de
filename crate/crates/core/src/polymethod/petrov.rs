//! Sets `F ⊆ (Z_p)^n` with no non-constant tuple `(b_1, ..., b_m) ∈ F^m`
//! satisfying `Σ a_i b_i = 0`, for fixed coefficients with `p | Σ a_i`.
//!
//! Constant tuples always satisfy the equation, so a set passes exactly when
//! the number of zero-sum tuples equals `|F|`.

use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::json;

use crate::arith::is_prime;
use crate::bounds::{upper_from_int, upper_from_real, BoundResult};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Cayley, GroupElement};
use crate::orderly::{Constraint, Goal, Orderly};
use crate::polymethod::dim::{degree_threshold, dim_exact, hoeffding_exponent, MonomialSpaceParams};
use crate::real::Real;
use crate::search::{ExactResult, SearchBudget, SearchStatus};
use crate::sequence::ZSequence;
use crate::symmetry::Symmetries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetrovInstance {
    p: u64,
    n: usize,
    coeffs: Vec<u64>,
    group: AbelianGroup,
}

impl PetrovInstance {
    /// Coefficients are reduced mod `p`; their sum must vanish mod `p`.
    pub fn new(p: u64, n: usize, coeffs: &[i64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("p must be prime, got {p}")));
        }
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if coeffs.len() < 2 {
            return Err(Error::domain(format!("need at least two coefficients, got {}", coeffs.len())));
        }
        let coeffs: Vec<u64> = coeffs.iter().map(|&a| a.rem_euclid(p as i64) as u64).collect();
        if coeffs.iter().sum::<u64>() % p != 0 {
            return Err(Error::domain(format!("coefficient sum must be divisible by {p}")));
        }
        Ok(PetrovInstance {
            p,
            n,
            coeffs,
            group: AbelianGroup::homocyclic(p, n)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn is_all_ones(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 1)
    }

    fn has_nonzero(&self) -> bool {
        self.coeffs.iter().any(|&a| a != 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetrovCheck {
    pub passes: bool,
    /// Ordered tuples in `F^m` with `Σ a_i b_i = 0`, constant ones included.
    pub zero_sum_tuples: u128,
    pub witness: Option<Vec<GroupElement>>,
}

/// Number of tuples over `set` for each value of `Σ a_i b_i`.
fn sum_histogram(cay: &Cayley, coeffs: &[u64], set: &[usize]) -> Vec<u128> {
    let order = cay.order();
    let mut hist = vec![0u128; order];
    hist[0] = 1;
    let mut next = vec![0u128; order];
    for &a in coeffs {
        next.iter_mut().for_each(|v| *v = 0);
        let shifts: Vec<usize> = set.iter().map(|&b| cay.scale(b, a)).collect();
        for (h, &c) in hist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &t in &shifts {
                next[cay.add(h, t)] += c;
            }
        }
        std::mem::swap(&mut hist, &mut next);
    }
    hist
}

/// Decides the condition by meeting two half-tuple sum tables in the middle,
/// and extracts a violating tuple when there is one.
pub fn petrov_verify(inst: &PetrovInstance, set: &[GroupElement]) -> Result<PetrovCheck> {
    let cay = inst.group.cayley()?;
    let mut idx = Vec::with_capacity(set.len());
    for e in set {
        if !inst.group.contains(e) {
            return Err(Error::Sequence(format!("{e} is not an element of {}", inst.group)));
        }
        idx.push(inst.group.index_of(e));
    }
    idx.sort_unstable();
    idx.dedup();
    let (left, right) = inst.coeffs.split_at(inst.m() / 2);
    let lh = sum_histogram(&cay, left, &idx);
    let rh = sum_histogram(&cay, right, &idx);
    let total: u128 = (0..cay.order()).map(|h| lh[h] * rh[cay.neg(h)]).sum();
    let passes = total == idx.len() as u128;
    let witness = (!passes).then(|| {
        extract_witness(&cay, &inst.coeffs, &idx)
            .into_iter()
            .map(|i| inst.group.element_at(i))
            .collect()
    });
    Ok(PetrovCheck {
        passes,
        zero_sum_tuples: total,
        witness,
    })
}

/// First non-constant zero-sum tuple in lexicographic order of positions,
/// guided by suffix sum tables.
fn extract_witness(cay: &Cayley, coeffs: &[u64], set: &[usize]) -> Vec<usize> {
    let m = coeffs.len();
    let suffix: Vec<Vec<u128>> = (0..=m).map(|i| sum_histogram(cay, &coeffs[i..], set)).collect();
    let mut tuple = Vec::with_capacity(m);
    let mut partial = 0usize;
    for i in 0..m {
        let chosen = set.iter().copied().find(|&b| {
            let s = cay.add(partial, cay.scale(b, coeffs[i]));
            let completions = suffix[i + 1][cay.neg(s)];
            let constant_so_far = tuple.iter().all(|&x| x == b);
            // the all-b completion is always zero-sum and must be excluded
            completions > u128::from(constant_so_far)
        });
        let b = chosen.expect("a violating tuple exists");
        partial = cay.add(partial, cay.scale(b, coeffs[i]));
        tuple.push(b);
    }
    tuple
}

/// Incremental check for search: adding `x` to a passing set creates a
/// violation iff some tuple uses `x` and at least one other member.
struct PetrovFree {
    cayley: Arc<Cayley>,
    coeffs: Vec<u64>,
}

impl PetrovFree {
    fn violates_with(&self, set: &[usize], x: usize) -> bool {
        let order = self.cayley.order();
        // reach[flags][h]: bit 0 = x used, bit 1 = another member used
        let mut reach = vec![vec![false; order]; 4];
        reach[0][0] = true;
        for &a in &self.coeffs {
            let mut next = vec![vec![false; order]; 4];
            let ax = self.cayley.scale(x, a);
            let shifts: Vec<usize> = set.iter().map(|&y| self.cayley.scale(y, a)).collect();
            for (flags, row) in reach.iter().enumerate() {
                for h in (0..order).filter(|&h| row[h]) {
                    next[flags | 1][self.cayley.add(h, ax)] = true;
                    for &t in &shifts {
                        next[flags | 2][self.cayley.add(h, t)] = true;
                    }
                }
            }
            reach = next;
        }
        reach[3][0]
    }
}

impl Constraint for PetrovFree {
    type State = Vec<usize>;

    fn root(&self) -> Vec<usize> {
        Vec::new()
    }

    fn admissible_copies(&self, state: &Vec<usize>, x: usize, cap: usize) -> usize {
        usize::from(cap > 0 && !self.violates_with(state, x))
    }

    fn extend(&self, state: &Vec<usize>, x: usize) -> Vec<usize> {
        let mut s = state.clone();
        s.push(x);
        s
    }
}

/// Largest passing set, by orderly search up to affine maps. Since
/// `p | Σ a_i`, `Σ a_i (φ(b_i) + t) = φ(Σ a_i b_i)` for every automorphism
/// `φ` and translation `t`, so the condition is affine invariant.
pub fn petrov_max_search(inst: &PetrovInstance, budget: &SearchBudget) -> Result<ExactResult> {
    let cayley = Arc::new(inst.group.cayley()?);
    let sym = Symmetries::for_zero_sum_with(cayley.clone());
    let constraint = PetrovFree {
        cayley,
        coeffs: inst.coeffs.clone(),
    };
    let out = Orderly {
        sym: &sym,
        constraint: &constraint,
        max_mult: 1,
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
        witness: Some(ZSequence::from_indices(&inst.group, &out.best)),
        nodes_explored: out.nodes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundForm {
    /// `m · dim L_{n,p,⌊n(p-1)/m⌋}`, exact.
    ExactDim,
    /// `m · p^{cn}` with `c = 1 - (m-2)^2/(2m^2 ln p)`.
    ClosedForm,
}

/// Upper bound on the size of a passing set.
pub fn petrov_cardinality_bound(inst: &PetrovInstance, form: BoundForm) -> Result<BoundResult> {
    if !inst.has_nonzero() {
        return Err(Error::domain("the bound needs a coefficient that is nonzero mod p"));
    }
    let (p, n, m) = (inst.p, inst.n, inst.m() as u64);
    let inputs = json!({"p": p, "n": n, "m": m, "coeffs": inst.coeffs});
    Ok(match form {
        BoundForm::ExactDim => {
            let k = degree_threshold(n, p, m);
            let dim = dim_exact(MonomialSpaceParams::new(n, p, k)?);
            upper_from_int(
                BigUint::from(m) * dim,
                "petrov_dim_bound",
                "|F| <= m dim L(n, p, floor(n(p-1)/m))",
                inputs,
            )
        }
        BoundForm::ClosedForm => {
            let c = hoeffding_exponent(p, m);
            let v = Real::from_u64(m).mul(
                &Real::from_u64(p).pow(&c.mul(&Real::from_u64(n as u64))),
            );
            upper_from_real(
                v,
                "petrov_closed_form",
                "|F| <= m p^((1 - (m-2)^2/(2m^2 ln p))n)",
                inputs,
            )
        }
    })
}
