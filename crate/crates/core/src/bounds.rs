//! Effective bounds for `s(A)` and their compositions.
//!
//! Every bound carries the chain of formula applications that produced it.
//! Bounds that rest on Property D for some `(Z_p)^n` list that assumption in
//! `conditional_on` unless a completed check discharged it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::arith::{is_power_of_two, is_prime, prime_divisors, prime_power};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::real::Real;
use crate::search::{ExactResult, SearchStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Lower => "LOWER",
            BoundKind::Upper => "UPPER",
            BoundKind::Exact => "EXACT",
        }
    }

    fn bounds_above(self) -> bool {
        matches!(self, BoundKind::Upper | BoundKind::Exact)
    }

    fn bounds_below(self) -> bool {
        matches!(self, BoundKind::Lower | BoundKind::Exact)
    }
}

/// Property D for `(Z_p)^n`, an assumption some upper bounds rest on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyD {
    pub p: u64,
    pub n: usize,
}

impl fmt::Display for PropertyD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PROPERTY_D({},{})", self.p, self.n)
    }
}

impl Serialize for PropertyD {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One application of a formula.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub thm: String,
    pub quote: String,
    pub inputs: Value,
    #[serde(serialize_with = "ser_real")]
    pub value: Real,
}

impl Step {
    fn new(thm: &str, quote: &str, inputs: Value, value: Real) -> Self {
        Step {
            thm: thm.to_string(),
            quote: quote.to_string(),
            inputs,
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    #[serde(serialize_with = "ser_real")]
    pub value_real: Real,
    /// Floor of `value_real` for uppers, ceiling for lowers.
    #[serde(serialize_with = "ser_biguint")]
    pub value_int: BigUint,
    pub conditional_on: BTreeSet<PropertyD>,
    pub provenance: Vec<Step>,
}

impl BoundResult {
    fn from_int(kind: BoundKind, v: BigUint, step: Step) -> Self {
        BoundResult {
            kind,
            value_real: Real::from_biguint(&v),
            value_int: v,
            conditional_on: BTreeSet::new(),
            provenance: vec![step],
        }
    }

    fn upper_real(v: Real, step: Step) -> Self {
        BoundResult {
            kind: BoundKind::Upper,
            value_int: floor_sound(&v),
            value_real: v,
            conditional_on: BTreeSet::new(),
            provenance: vec![step],
        }
    }

    pub fn is_conditional(&self) -> bool {
        !self.conditional_on.is_empty()
    }

    /// Theorem ids along the provenance chain, in order.
    pub fn chain(&self) -> Vec<&str> {
        self.provenance.iter().map(|s| s.thm.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("bound serializes")
    }

    fn key(&self) -> String {
        self.to_json().to_string()
    }

    fn relabel(mut self, kind: BoundKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Relative widening applied before rounding a real bound to an integer, so
/// that a value that is mathematically an integer never rounds the wrong way.
const ROUNDING_SLACK: &str = "1e-60";

fn floor_sound(v: &Real) -> BigUint {
    let widened = v.add(&v.mul(&Real::from_decimal(ROUNDING_SLACK)));
    widened.floor_biguint()
}

fn ceil_sound(v: &Real) -> BigUint {
    let narrowed = v.sub(&v.mul(&Real::from_decimal(ROUNDING_SLACK)));
    narrowed.ceil_biguint()
}

pub(crate) fn real_number(r: &Real) -> Value {
    Value::Number(serde_json::Number::from_str(&r.to_sig_string(40)).expect("decimal rendering"))
}

pub(crate) fn big_number(v: &BigUint) -> Value {
    Value::Number(serde_json::Number::from_str(&v.to_string()).expect("integer rendering"))
}

pub(crate) fn ser_real<S: Serializer>(v: &Real, s: S) -> std::result::Result<S::Ok, S::Error> {
    real_number(v).serialize(s)
}

pub(crate) fn ser_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    big_number(v).serialize(s)
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// `s(Z_{n1} ⊕ Z_{n2}) = 2n1 + 2n2 - 3`; `n1 = 1` gives the cyclic case.
pub fn rank2_exact(n1: u64, n2: u64) -> Result<BoundResult> {
    if n1 == 0 || n2 < 2 || n2 % n1 != 0 {
        return Err(Error::domain(format!("rank-two formula needs 1 <= n1 | n2 and n2 >= 2, got ({n1}, {n2})")));
    }
    let v = 2 * n1 + 2 * n2 - 3;
    Ok(BoundResult::from_int(
        BoundKind::Exact,
        big(v),
        Step::new("rank2_exact", "s = 2n1 + 2n2 - 3", json!({"n1": n1, "n2": n2}), Real::from_u64(v)),
    ))
}

/// `(k-1)2^n + 1 <= s((Z_k)^n) <= (k-1)k^n + 1`.
pub fn harborth_bounds(k: u64, n: usize) -> Result<(BoundResult, BoundResult)> {
    if k < 2 || n == 0 {
        return Err(Error::domain(format!("need k >= 2 and n >= 1, got k={k}, n={n}")));
    }
    let lo = big(k - 1) * (BigUint::one() << n) + 1u32;
    let hi = big(k - 1) * big(k).pow(n as u32) + 1u32;
    let inputs = json!({"k": k, "n": n});
    Ok((
        BoundResult::from_int(
            BoundKind::Lower,
            lo.clone(),
            Step::new("harborth_lower", "(k-1)2^n + 1 <= s", inputs.clone(), Real::from_biguint(&lo)),
        ),
        BoundResult::from_int(
            BoundKind::Upper,
            hi.clone(),
            Step::new("harborth_upper", "s <= (k-1)k^n + 1", inputs, Real::from_biguint(&hi)),
        ),
    ))
}

/// `s((Z_{2^a})^n) = (2^a - 1)2^n + 1`.
pub fn har2_exact(a: u32, n: usize) -> Result<BoundResult> {
    if a == 0 || n == 0 {
        return Err(Error::domain(format!("need a >= 1 and n >= 1, got a={a}, n={n}")));
    }
    let v = ((BigUint::one() << a) - 1u32) * (BigUint::one() << n) + 1u32;
    Ok(BoundResult::from_int(
        BoundKind::Exact,
        v.clone(),
        Step::new("har2_exact", "s = (2^a - 1)2^n + 1", json!({"a": a, "n": n}), Real::from_biguint(&v)),
    ))
}

/// `ε(p) = (p-2)^2 / (2p^2 ln p)`.
pub fn egz_epsilon(p: u64) -> Real {
    let d = Real::from_u64(p - 2);
    d.mul(&d)
        .div(&Real::from_u64(2 * p * p).mul(&Real::from_u64(p).ln()))
}

/// `s((Z_p)^n) <= (p-1)p^{(1-ε)n+1} + 1` for odd primes `p`, valid for
/// groups with Property D. The assumption is recorded unless `(p, n)` is in
/// `verified`.
pub fn upper_egz_prime(p: u64, n: usize, verified: &BTreeSet<(u64, usize)>) -> Result<BoundResult> {
    if !is_prime(p) || p == 2 {
        return Err(Error::domain(format!("p must be an odd prime, got {p}")));
    }
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let eps = egz_epsilon(p);
    let exponent = Real::from_u64(1)
        .sub(&eps)
        .mul(&Real::from_u64(n as u64))
        .add(&Real::from_u64(1));
    let v = Real::from_u64(p - 1)
        .mul(&Real::from_u64(p).pow(&exponent))
        .add(&Real::from_u64(1));
    let mut b = BoundResult::upper_real(
        v.clone(),
        Step::new(
            "upper_egz_prime",
            "s <= (p-1)p^((1-eps)n+1) + 1, eps = (p-2)^2/(2p^2 ln p)",
            json!({"p": p, "n": n, "eps": real_number(&eps)}),
            v,
        ),
    );
    if !verified.contains(&(p, n)) {
        b.conditional_on.insert(PropertyD { p, n });
    }
    Ok(b)
}

/// `s(G) <= exp(G/H)(s(H) - 1) + s(G/H)`, on the integer parts of the inputs.
pub fn exp_upper_step(exp_quot: u64, s_h: &BoundResult, s_quot: &BoundResult) -> Result<BoundResult> {
    for b in [s_h, s_quot] {
        if !b.kind.bounds_above() {
            return Err(Error::Kind {
                found: b.kind.as_str().into(),
                expected: "UPPER or EXACT".into(),
            });
        }
    }
    if exp_quot == 0 || s_h.value_int.is_zero() {
        return Err(Error::domain("quotient exponent and s(H) must be positive"));
    }
    let v = big(exp_quot) * (&s_h.value_int - 1u32) + &s_quot.value_int;
    let mut provenance = s_h.provenance.clone();
    provenance.extend(s_quot.provenance.iter().cloned());
    provenance.push(Step::new(
        "exp_upper_step",
        "s(G) <= exp(G/H)(s(H)-1) + s(G/H)",
        json!({"exp_quot": exp_quot, "s_H": big_number(&s_h.value_int), "s_quot": big_number(&s_quot.value_int)}),
        Real::from_biguint(&v),
    ));
    Ok(BoundResult {
        kind: BoundKind::Upper,
        value_real: Real::from_biguint(&v),
        value_int: v,
        conditional_on: s_h.conditional_on.union(&s_quot.conditional_on).copied().collect(),
        provenance,
    })
}

/// Known values and verified assumptions fed into the compositions.
#[derive(Clone, Debug, Default)]
pub struct BoundContext {
    /// `(p, n)` for which Property D of `(Z_p)^n` was verified.
    pub verified_propd: BTreeSet<(u64, usize)>,
    /// Search results for `s` on individual groups.
    pub searched: BTreeMap<AbelianGroup, ExactResult>,
}

impl BoundContext {
    fn exact_s(&self, group: &AbelianGroup) -> Option<BoundResult> {
        let r = self.searched.get(group)?;
        (r.status == SearchStatus::Exact).then(|| search_bound(group, r, BoundKind::Exact))?
    }
}

fn search_bound(group: &AbelianGroup, r: &ExactResult, kind: BoundKind) -> Option<BoundResult> {
    let v = r.value?;
    Some(BoundResult::from_int(
        kind,
        big(v),
        Step::new(
            "exact_search",
            "s = 1 + max length of a zero-sum free sequence",
            json!({"group": group.spec(), "status": r.status.as_str(), "nodes": r.nodes_explored}),
            Real::from_u64(v),
        ),
    ))
}

/// Smallest of the candidates; ties go to exact values, then to fewer
/// assumptions.
fn least_upper(cands: Vec<BoundResult>) -> Option<BoundResult> {
    cands.into_iter().min_by(|a, b| {
        a.value_int
            .cmp(&b.value_int)
            .then((a.kind != BoundKind::Exact).cmp(&(b.kind != BoundKind::Exact)))
            .then(a.conditional_on.len().cmp(&b.conditional_on.len()))
    })
}

/// Best available upper bound for `s((Z_p)^n)`.
pub fn base_bound(p: u64, n: usize, ctx: &BoundContext, allow_conditional: bool) -> Result<BoundResult> {
    if !is_prime(p) || n == 0 {
        return Err(Error::domain(format!("need a prime p and n >= 1, got p={p}, n={n}")));
    }
    let mut cands = Vec::new();
    if let Ok(g) = AbelianGroup::homocyclic(p, n) {
        cands.extend(ctx.exact_s(&g));
    }
    match n {
        1 => cands.push(rank2_exact(1, p)?),
        2 => cands.push(rank2_exact(p, p)?),
        _ => {}
    }
    if p == 2 {
        cands.push(har2_exact(1, n)?);
    }
    cands.push(harborth_bounds(p, n)?.1);
    if p == 3 {
        cands.push(maincor2_bound(n)?);
    }
    if p > 2 {
        let b = upper_egz_prime(p, n, &ctx.verified_propd)?;
        if allow_conditional || !b.is_conditional() {
            cands.push(b);
        }
    }
    Ok(least_upper(cands).expect("at least the Harborth bound"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PpowerBound {
    pub bound: BoundResult,
    /// `(U(p^r,n)(p-1)/(p^r-1))^{1/n}`.
    pub d_eff: Real,
}

/// Upper bound on `s((Z_{p^r})^n)` by iterating the quotient step
/// `U(p^{j+1}, n) = p(U(p^j, n) - 1) + U(p, n)`.
pub fn ppower_bound(p: u64, r: u32, n: usize, ctx: &BoundContext, allow_conditional: bool) -> Result<PpowerBound> {
    if !is_prime(p) || p == 2 || r == 0 || n == 0 {
        return Err(Error::domain(format!("need an odd prime p, r >= 1, n >= 1, got ({p}, {r}, {n})")));
    }
    let base = base_bound(p, n, ctx, allow_conditional)?;
    let mut u = base.clone();
    for _ in 1..r {
        u = exp_upper_step(p, &u, &base)?;
    }
    let pr = big(p).pow(r);
    let ratio = Real::from_biguint(&u.value_int)
        .mul(&Real::from_u64(p - 1))
        .div(&Real::from_biguint(&(pr - 1u32)));
    let d_eff = ratio.root(n as u64);
    if r > 1 {
        let v = u.value_real.clone();
        u.provenance.push(Step::new(
            "ppower_bound",
            "U(p^(j+1),n) = p(U(p^j,n)-1) + U(p,n)",
            json!({"p": p, "r": r, "n": n, "d_eff": real_number(&d_eff)}),
            v,
        ));
    }
    Ok(PpowerBound { bound: u, d_eff })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EgzCombine {
    pub bound: BoundResult,
    /// `c_1, ..., c_r`.
    pub c: Vec<BigUint>,
}

/// Combines per-prime bounds `s((Z_p)^i) <= c_i(p-1) + 1` into
/// `s(A) <= Σ_i (c_{r+1-i} - c_{r-i}) n_i - c_r + 1` for
/// `A = Z_{n_1} ⊕ ... ⊕ Z_{n_r}`.
pub fn egzupper_combine(factors: &[u64], per_prime: &BTreeMap<(u64, usize), BoundResult>) -> Result<EgzCombine> {
    let r = factors.len();
    if r == 0 || factors[0] < 2 || factors.windows(2).any(|w| w[1] % w[0] != 0) {
        return Err(Error::domain(format!("{factors:?} is not an invariant-factor chain")));
    }
    let primes = prime_divisors(factors[r - 1]);
    let mut provenance = Vec::new();
    let mut conditional_on = BTreeSet::new();
    let mut c = vec![BigUint::zero(); r + 1];
    for i in 1..=r {
        for &p in &primes {
            let b = per_prime
                .get(&(p, i))
                .ok_or(Error::MissingBound { p, rank: i })?;
            if !b.kind.bounds_above() {
                return Err(Error::Kind {
                    found: b.kind.as_str().into(),
                    expected: "UPPER or EXACT".into(),
                });
            }
            let ci = if b.value_int.is_zero() {
                BigUint::zero()
            } else {
                (&b.value_int - 1u32).div_ceil(&big(p - 1))
            };
            provenance.extend(b.provenance.iter().cloned());
            conditional_on.extend(b.conditional_on.iter().copied());
            provenance.push(Step::new(
                "egzupper_coefficient",
                "c_i = ceil((s((Z_p)^i) - 1)/(p-1))",
                json!({"p": p, "i": i, "s": big_number(&b.value_int)}),
                Real::from_biguint(&ci),
            ));
            if ci > c[i] {
                c[i] = ci;
            }
        }
    }
    let mut total = num_bigint::BigInt::from(1) - num_bigint::BigInt::from(c[r].clone());
    for i in 1..=r {
        let diff = num_bigint::BigInt::from(c[r + 1 - i].clone()) - num_bigint::BigInt::from(c[r - i].clone());
        total += diff * factors[i - 1];
    }
    let v = total
        .to_biguint()
        .ok_or_else(|| Error::domain("combined bound is not positive"))?;
    provenance.push(Step::new(
        "egzupper_combine",
        "s <= sum_i (c_(r+1-i) - c_(r-i)) n_i - c_r + 1",
        json!({"factors": factors, "c": c[1..].iter().map(big_number).collect::<Vec<_>>()}),
        Real::from_biguint(&v),
    ));
    Ok(EgzCombine {
        bound: BoundResult {
            kind: BoundKind::Upper,
            value_real: Real::from_biguint(&v),
            value_int: v,
            conditional_on,
            provenance,
        },
        c: c.split_off(1),
    })
}

/// Per-prime inputs for [`egzupper_combine`] on a group of the given rank
/// and exponent.
pub fn per_prime_bounds(
    exponent: u64,
    rank: usize,
    ctx: &BoundContext,
    allow_conditional: bool,
) -> Result<BTreeMap<(u64, usize), BoundResult>> {
    let mut out = BTreeMap::new();
    for p in prime_divisors(exponent) {
        for i in 1..=rank {
            out.insert((p, i), base_bound(p, i, ctx, allow_conditional)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeBound {
    pub bound: BoundResult,
    /// `C` in the closed reading `2^n(m-1)k + C(k-1) + 1`.
    pub coefficient: BigUint,
    /// `C^{1/n}`, the effective per-dimension constant.
    pub c_eff: Real,
    /// Value of the closed reading.
    pub closed_form: BigUint,
    /// Whether `1 < c_eff < k`.
    pub within_stated_range: bool,
}

/// Upper bound on `s((Z_{mk})^n)` for `m` a power of two and `k > 1` odd:
/// `H = kA ≅ (Z_m)^n`, `A/H ≅ (Z_k)^n`, then one quotient step.
pub fn composite_bound(m: u64, k: u64, n: usize, ctx: &BoundContext, allow_conditional: bool) -> Result<CompositeBound> {
    if !is_power_of_two(m) || k < 3 || k % 2 == 0 || n == 0 {
        return Err(Error::domain(format!(
            "need m a power of two, k > 1 odd and n >= 1, got m={m}, k={k}, n={n}"
        )));
    }
    let s_h = if m == 1 {
        BoundResult::from_int(
            BoundKind::Exact,
            BigUint::one(),
            Step::new("trivial_group", "s(0) = 1", json!({}), Real::from_u64(1)),
        )
    } else {
        har2_exact(m.trailing_zeros(), n)?
    };
    let per_prime = per_prime_bounds(k, n, ctx, allow_conditional)?;
    let quot = egzupper_combine(&vec![k; n], &per_prime)?;
    let coefficient = quot.c[n - 1].clone();
    let mut bound = exp_upper_step(k, &s_h, &quot.bound)?;
    let closed_form = (BigUint::one() << n) * big(m - 1) * big(k) + &coefficient * big(k - 1) + 1u32;
    let c_eff = Real::from_biguint(&coefficient).root(n as u64);
    let within_stated_range = c_eff > Real::from_u64(1) && c_eff < Real::from_u64(k);
    bound.provenance.push(Step::new(
        "composite_bound",
        "s((Z_mk)^n) <= 2^n(m-1)k + C(k-1) + 1",
        json!({"m": m, "k": k, "n": n, "C": big_number(&coefficient), "c_eff": real_number(&c_eff)}),
        Real::from_biguint(&closed_form),
    ));
    Ok(CompositeBound {
        bound,
        coefficient,
        c_eff,
        closed_form,
        within_stated_range,
    })
}

/// `s((Z_3)^n) <= 2·2.765^n`.
pub fn maincor2_bound(n: usize) -> Result<BoundResult> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let v = Real::from_u64(2).mul(&Real::from_decimal("2.765").powi(n));
    Ok(BoundResult::upper_real(
        v.clone(),
        Step::new("maincor2_bound", "s((Z_3)^n) <= 2(2.765)^n", json!({"n": n}), v),
    ))
}

/// `s(A) <= (exp(A) - 1)|A| + 1`: a longer sequence repeats some element
/// `exp(A)` times.
pub fn pigeonhole_bound(group: &AbelianGroup) -> BoundResult {
    let order: BigUint = group.invariant_factors().iter().map(|&f| big(f)).product();
    let v = big(group.exponent() - 1) * order + 1u32;
    BoundResult::from_int(
        BoundKind::Upper,
        v.clone(),
        Step::new("pigeonhole", "s <= (exp-1)|A| + 1", json!({"group": group.spec()}), Real::from_biguint(&v)),
    )
}

#[derive(Clone, Debug, Default)]
pub struct BoundOptions {
    pub context: BoundContext,
    /// Admit bounds that assume Property D into the headline upper bound.
    pub assume_propd: bool,
    /// Further candidates, e.g. from an earlier run.
    pub extra: Vec<BoundResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestBounds {
    pub group: AbelianGroup,
    pub lower: BoundResult,
    /// Headline upper bound; unconditional unless `assume_propd` was set.
    pub upper: BoundResult,
    /// Best upper bound allowing Property D assumptions.
    pub upper_conditional: BoundResult,
    pub exact: Option<BigUint>,
    pub candidates: Vec<BoundResult>,
}

impl BestBounds {
    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.spec(),
            "status": if self.exact.is_some() { "EXACT" } else { "INTERVAL" },
            "interval": [big_number(&self.lower.value_int), big_number(&self.upper.value_int)],
            "exact": self.exact.as_ref().map(big_number),
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "upper_conditional": self.upper_conditional.to_json(),
            "candidates": self.candidates.iter().map(BoundResult::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Every applicable formula for `group`, both with and without Property D
/// assumptions.
pub fn candidate_bounds(group: &AbelianGroup, ctx: &BoundContext) -> Result<Vec<BoundResult>> {
    let mut out = Vec::new();
    if group.is_trivial() {
        out.push(BoundResult::from_int(
            BoundKind::Exact,
            BigUint::one(),
            Step::new("trivial_group", "s(0) = 1", json!({}), Real::from_u64(1)),
        ));
        return Ok(out);
    }
    let f = group.invariant_factors();
    let r = f.len();
    let k = group.exponent();
    if let Some(res) = ctx.searched.get(group) {
        let kind = match res.status {
            SearchStatus::Exact => Some(BoundKind::Exact),
            SearchStatus::LowerBoundOnly => Some(BoundKind::Lower),
            _ => None,
        };
        out.extend(kind.and_then(|kd| search_bound(group, res, kd)));
    }
    match r {
        1 => out.push(rank2_exact(1, f[0])?),
        2 => out.push(rank2_exact(f[0], f[1])?),
        _ => {
            let sub = rank2_exact(f[r - 2], f[r - 1])?;
            let mut lower = sub.relabel(BoundKind::Lower);
            lower.provenance.push(Step::new(
                "subgroup_monotone",
                "s(B) <= s(A) for B <= A with exp(B) = exp(A)",
                json!({"subgroup": [f[r - 2], f[r - 1]]}),
                lower.value_real.clone(),
            ));
            out.push(lower);
        }
    }
    if let Some((k, n)) = group.as_homocyclic() {
        let (lo, hi) = harborth_bounds(k, n)?;
        out.push(lo);
        out.push(hi);
        if is_power_of_two(k) {
            out.push(har2_exact(k.trailing_zeros(), n)?);
        }
        if k == 3 {
            out.push(maincor2_bound(n)?);
        }
        if is_prime(k) && k > 2 {
            out.push(upper_egz_prime(k, n, &ctx.verified_propd)?);
        }
        for allow in [false, true] {
            if let Some((p, e)) = prime_power(k) {
                if p > 2 && e > 1 {
                    out.push(ppower_bound(p, e, n, ctx, allow)?.bound);
                }
            }
            let m = 1u64 << k.trailing_zeros();
            if m > 1 && k / m > 1 {
                out.push(composite_bound(m, k / m, n, ctx, allow)?.bound);
            }
        }
    }
    for allow in [false, true] {
        let per_prime = per_prime_bounds(k, r, ctx, allow)?;
        out.push(egzupper_combine(f, &per_prime)?.bound);
    }
    out.push(pigeonhole_bound(group));
    Ok(out)
}

fn dedup(cands: Vec<BoundResult>) -> Vec<BoundResult> {
    let mut seen = BTreeSet::new();
    cands.into_iter().filter(|c| seen.insert(c.key())).collect()
}

/// Ties among equal upper values go to the longest derivation.
fn pick_upper<'a>(cands: impl Iterator<Item = &'a BoundResult>) -> Option<&'a BoundResult> {
    let mut best: Option<&BoundResult> = None;
    for c in cands {
        best = match best {
            None => Some(c),
            Some(b) => {
                let better = c.value_int < b.value_int
                    || (c.value_int == b.value_int
                        && (c.conditional_on.len(), std::cmp::Reverse(c.provenance.len()))
                            < (b.conditional_on.len(), std::cmp::Reverse(b.provenance.len())));
                Some(if better { c } else { b })
            }
        };
    }
    best
}

fn pick_lower<'a>(cands: impl Iterator<Item = &'a BoundResult>) -> Option<&'a BoundResult> {
    let mut best: Option<&BoundResult> = None;
    for c in cands {
        best = match best {
            None => Some(c),
            Some(b) => {
                let better = c.value_int > b.value_int
                    || (c.value_int == b.value_int && c.kind == BoundKind::Exact && b.kind != BoundKind::Exact);
                Some(if better { c } else { b })
            }
        };
    }
    best
}

/// Tightest interval for `s(group)` from every applicable formula.
pub fn best_bounds(group: &AbelianGroup, options: &BoundOptions) -> Result<BestBounds> {
    let mut cands = candidate_bounds(group, &options.context)?;
    cands.extend(options.extra.iter().cloned());
    let cands = dedup(cands);
    let lower = pick_lower(cands.iter().filter(|c| c.kind.bounds_below()))
        .cloned()
        .unwrap_or_else(|| {
            BoundResult::from_int(
                BoundKind::Lower,
                BigUint::one(),
                Step::new("trivial_lower", "s >= 1", json!({}), Real::from_u64(1)),
            )
        });
    let upper_any = pick_upper(cands.iter().filter(|c| c.kind.bounds_above()))
        .cloned()
        .expect("pigeonhole bound always applies");
    let upper = if options.assume_propd {
        upper_any.clone()
    } else {
        pick_upper(cands.iter().filter(|c| c.kind.bounds_above() && !c.is_conditional()))
            .cloned()
            .expect("pigeonhole bound always applies")
    };
    let exact = cands
        .iter()
        .find(|c| c.kind == BoundKind::Exact)
        .map(|c| c.value_int.clone())
        .or_else(|| (lower.value_int == upper.value_int && !upper.is_conditional()).then(|| upper.value_int.clone()));
    Ok(BestBounds {
        group: group.clone(),
        lower,
        upper,
        upper_conditional: upper_any,
        exact,
        candidates: cands,
    })
}

/// A lower bound from a rounded-up real value.
pub fn lower_from_real(v: Real, step_thm: &str, quote: &str, inputs: Value) -> BoundResult {
    BoundResult {
        kind: BoundKind::Lower,
        value_int: ceil_sound(&v),
        value_real: v.clone(),
        conditional_on: BTreeSet::new(),
        provenance: vec![Step::new(step_thm, quote, inputs, v)],
    }
}

/// An upper bound from a real value, rounded down.
pub fn upper_from_real(v: Real, step_thm: &str, quote: &str, inputs: Value) -> BoundResult {
    BoundResult::upper_real(v.clone(), Step::new(step_thm, quote, inputs, v))
}

/// An upper bound from an exact integer value.
pub fn upper_from_int(v: BigUint, step_thm: &str, quote: &str, inputs: Value) -> BoundResult {
    let r = Real::from_biguint(&v);
    BoundResult::from_int(BoundKind::Upper, v, Step::new(step_thm, quote, inputs, r))
}

/// `value_int` as `u64` when it fits.
pub fn as_u64(b: &BoundResult) -> Option<u64> {
    b.value_int.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;

    fn int(b: &BoundResult) -> u64 {
        as_u64(b).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(int(&rank2_exact(1, 5).unwrap()), 9);
        assert_eq!(int(&rank2_exact(3, 3).unwrap()), 9);
        assert_eq!(int(&rank2_exact(2, 4).unwrap()), 9);
        assert!(rank2_exact(2, 5).is_err());

        let (lo, hi) = harborth_bounds(3, 2).unwrap();
        assert_eq!((int(&lo), int(&hi)), (9, 19));
        let (lo, hi) = harborth_bounds(5, 3).unwrap();
        assert_eq!((int(&lo), int(&hi)), (33, 501));
        for n in 1..6 {
            let (lo, hi) = harborth_bounds(2, n).unwrap();
            assert_eq!(lo.value_int, hi.value_int);
        }

        assert_eq!(int(&har2_exact(2, 2).unwrap()), 13);
        assert_eq!(int(&har2_exact(1, 3).unwrap()), 9);
        assert_eq!(int(&har2_exact(3, 1).unwrap()), int(&rank2_exact(1, 8).unwrap()));
    }

    #[test]
    fn egz_prime_values() {
        let none = BTreeSet::new();
        let b = upper_egz_prime(3, 2, &none).unwrap();
        let eps = 1.0 / (18.0 * 3f64.ln());
        let expected = 2.0 * 3f64.powf((1.0 - eps) * 2.0 + 1.0) + 1.0;
        assert!((b.value_real.to_f64() - expected).abs() < 1e-9, "{:?}", b.value_real);
        assert_eq!(int(&b), 49);
        assert!(b.conditional_on.contains(&PropertyD { p: 3, n: 2 }));
        let b = upper_egz_prime(3, 1, &none).unwrap();
        assert_eq!(int(&b), 18);
        assert!((egz_epsilon(5).to_f64() - 9.0 / (50.0 * 5f64.ln())).abs() < 1e-15);
        let verified = BTreeSet::from([(3, 2)]);
        assert!(!upper_egz_prime(3, 2, &verified).unwrap().is_conditional());
        assert!(upper_egz_prime(2, 2, &none).is_err());
    }

    #[test]
    fn quotient_step() {
        let z3 = rank2_exact(1, 3).unwrap();
        assert_eq!(int(&exp_upper_step(3, &z3, &z3).unwrap()), 17);
        let z2 = rank2_exact(1, 2).unwrap();
        assert_eq!(int(&exp_upper_step(3, &z2, &z3).unwrap()), 11);
        let trivial = BoundResult::from_int(
            BoundKind::Exact,
            BigUint::one(),
            Step::new("trivial_group", "", json!({}), Real::from_u64(1)),
        );
        assert_eq!(int(&exp_upper_step(7, &trivial, &z3).unwrap()), 5);
        let (lo, _) = harborth_bounds(3, 1).unwrap();
        assert!(matches!(exp_upper_step(3, &lo, &z3), Err(Error::Kind { .. })));
    }

    #[test]
    fn ppower_chain() {
        let ctx = BoundContext::default();
        let b = ppower_bound(3, 2, 1, &ctx, false).unwrap();
        assert_eq!(int(&b.bound), 17);
        assert!(b.bound.chain().contains(&"exp_upper_step"));
        let base = ppower_bound(3, 1, 2, &ctx, true).unwrap();
        assert_eq!(base.bound.value_int, base_bound(3, 2, &ctx, true).unwrap().value_int);
    }

    #[test]
    fn combine_examples() {
        let ctx = BoundContext::default();
        let pp = per_prime_bounds(3, 2, &ctx, false).unwrap();
        let c = egzupper_combine(&[3, 3], &pp).unwrap();
        assert_eq!(int(&c.bound), 9);
        assert_eq!(c.c, vec![big(2), big(4)]);

        let pp = per_prime_bounds(2, 2, &ctx, false).unwrap();
        assert_eq!(int(&egzupper_combine(&[2, 4], &pp).unwrap().bound), 9);

        for m in [5u64, 7, 15] {
            let pp = per_prime_bounds(m, 1, &ctx, false).unwrap();
            assert_eq!(int(&egzupper_combine(&[m], &pp).unwrap().bound), 2 * m - 1);
        }
        assert!(matches!(
            egzupper_combine(&[3, 3], &BTreeMap::new()),
            Err(Error::MissingBound { p: 3, rank: 1 })
        ));
    }

    #[test]
    fn composite_examples() {
        let ctx = BoundContext::default();
        let b = composite_bound(2, 3, 1, &ctx, false).unwrap();
        assert_eq!(int(&b.bound), 11);
        assert_eq!(b.closed_form, b.bound.value_int);
        let b = composite_bound(2, 3, 2, &ctx, false).unwrap();
        assert_eq!(int(&b.bound), 21);
        let b = composite_bound(1, 5, 1, &ctx, false).unwrap();
        assert_eq!(int(&b.bound), 9);
    }

    #[test]
    fn capset_rate_values() {
        assert!((maincor2_bound(1).unwrap().value_real.to_f64() - 5.53).abs() < 1e-12);
        assert_eq!(int(&maincor2_bound(2).unwrap()), 15);
        assert!((maincor2_bound(4).unwrap().value_real.to_f64() - 116.89).abs() < 0.01);
    }

    #[test]
    fn aggregation_examples() {
        let opts = BoundOptions::default();
        let b = best_bounds(&parse_group("3^2").unwrap(), &opts).unwrap();
        assert_eq!((int(&b.lower), int(&b.upper)), (9, 9));
        let b = best_bounds(&parse_group("4^2").unwrap(), &opts).unwrap();
        assert_eq!(b.exact, Some(big(13)));
        let b = best_bounds(&parse_group("6").unwrap(), &opts).unwrap();
        assert_eq!(b.exact, Some(big(11)));
        let b = best_bounds(&parse_group("9").unwrap(), &opts).unwrap();
        assert_eq!(int(&b.upper), 17);
        assert!(b.upper.chain().contains(&"exp_upper_step"));
    }

    #[test]
    fn aggregation_is_idempotent() {
        for spec in ["3^2", "9", "3^3", "2x2x4", "15^2", "2^5"] {
            let g = parse_group(spec).unwrap();
            let first = best_bounds(&g, &BoundOptions::default()).unwrap();
            let again = best_bounds(
                &g,
                &BoundOptions {
                    extra: first.candidates.clone(),
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(first, again, "{spec}");
        }
    }
}
