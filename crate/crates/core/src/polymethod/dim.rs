//! Dimensions of the monomial spaces `L_{n,D,k}`: monomials in `n` variables
//! with every exponent at most `D - 1` and total degree at most `k`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{compare_log_upper, Real, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSpaceParams {
    pub n: usize,
    pub d: u64,
    pub k: u64,
}

impl MonomialSpaceParams {
    pub fn new(n: usize, d: u64, k: u64) -> Result<Self> {
        if n == 0 || d < 2 {
            return Err(Error::domain(format!("need n >= 1 and D >= 2, got n={n}, D={d}")));
        }
        Ok(MonomialSpaceParams { n, d, k })
    }

    /// Top total degree `n(D-1)`.
    pub fn max_degree(&self) -> u64 {
        self.n as u64 * (self.d - 1)
    }
}

/// Counts of monomials by total degree, built one variable at a time.
#[derive(Clone, Debug)]
pub struct DegreeProfile {
    d: u64,
    n: usize,
    counts: Vec<BigUint>,
    scratch: Vec<BigUint>,
}

impl DegreeProfile {
    /// Profile of zero variables: a single monomial of degree 0.
    pub fn new(d: u64) -> Self {
        assert!(d >= 2);
        DegreeProfile {
            d,
            n: 0,
            counts: vec![BigUint::one()],
            scratch: Vec::new(),
        }
    }

    pub fn variables(&self) -> usize {
        self.n
    }

    /// Number of monomials of each total degree `0..=n(D-1)`.
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Adds a variable: `new[j] = Σ_{0 <= t < D} old[j - t]`, evaluated with a
    /// sliding window so each entry costs one addition and one subtraction.
    pub fn push_variable(&mut self) {
        let d = self.d as usize;
        let len = self.counts.len() + d - 1;
        self.scratch.resize(len, BigUint::zero());
        let mut window = BigUint::zero();
        for j in 0..len {
            if let Some(v) = self.counts.get(j) {
                window += v;
            }
            if j >= d {
                window -= &self.counts[j - d];
            }
            self.scratch[j].clone_from(&window);
        }
        std::mem::swap(&mut self.counts, &mut self.scratch);
        self.n += 1;
    }

    /// `dim L_{n,D,k}` for the current `n`.
    pub fn dim_at_most(&self, k: u64) -> BigUint {
        let top = (k as usize).min(self.counts.len() - 1);
        self.counts[..=top].iter().sum()
    }
}

/// Exact `dim L_{n,D,k}` by the degree-profile recursion.
pub fn dim_exact(params: MonomialSpaceParams) -> BigUint {
    let mut profile = DegreeProfile::new(params.d);
    let k = params.k.min(params.max_degree());
    for _ in 0..params.n {
        profile.push_variable();
        truncate_profile(&mut profile, k);
    }
    profile.dim_at_most(k)
}

// degrees above k never feed back into degrees <= k
fn truncate_profile(profile: &mut DegreeProfile, k: u64) {
    let keep = (k as usize + 1).min(profile.counts.len());
    profile.counts.truncate(keep);
}

/// `C(a, b)` for non-negative `a`.
fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc = acc * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    acc
}

/// Exact `dim L_{n,D,k}` by inclusion–exclusion over the variables that
/// exceed the cap: `Σ_j (-1)^j C(n, j) C(k - jD + n, n)`.
pub fn dim_inclusion_exclusion(params: MonomialSpaceParams) -> BigUint {
    let MonomialSpaceParams { n, d, k } = params;
    let k = k.min(params.max_degree());
    let n64 = n as u64;
    let mut total = BigInt::zero();
    for j in 0..=n64 {
        let Some(rest) = k.checked_sub(j * d) else {
            break;
        };
        let term = BigInt::from(binomial(n64, j) * binomial(rest + n64, n64));
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    assert!(!total.is_negative());
    total.to_biguint().expect("non-negative")
}

/// `c = 1 - (m-2)^2 / (2 m^2 ln D)`.
pub fn hoeffding_exponent(d: u64, m: u64) -> Real {
    let m2 = Real::from_u64(m - 2);
    let num = m2.mul(&m2);
    let den = Real::from_u64(2 * m * m).mul(&Real::from_u64(d).ln());
    Real::from_u64(1).sub(&num.div(&den))
}

/// `ln(D^{cn}) = n ln D - n (m-2)^2 / (2 m^2)`.
pub fn hoeffding_ln_bound(n: usize, d: u64, m: u64) -> Result<Real> {
    if m < 2 {
        return Err(Error::domain(format!("m must be at least 2, got {m}")));
    }
    if d < 2 {
        return Err(Error::domain(format!("D must be at least 2, got {d}")));
    }
    Ok(hoeffding_exponent(d, m)
        .mul(&Real::from_u64(n as u64))
        .mul(&Real::from_u64(d).ln()))
}

/// The closed-form bound `D^{cn}` on `dim L_{n,D,n(D-1)/m}`.
pub fn hoeffding_dim_bound(n: usize, d: u64, m: u64) -> Result<Real> {
    Ok(hoeffding_ln_bound(n, d, m)?.exp())
}

/// Degree threshold `⌊n(D-1)/m⌋`.
pub fn degree_threshold(n: usize, d: u64, m: u64) -> u64 {
    n as u64 * (d - 1) / m
}

#[derive(Clone, Debug, Serialize)]
pub struct DimBoundCheck {
    pub n: usize,
    pub d: u64,
    pub m: u64,
    pub k: u64,
    #[serde(serialize_with = "crate::bounds::ser_biguint")]
    pub dim: BigUint,
    #[serde(serialize_with = "crate::bounds::ser_real")]
    pub bound: Real,
    pub verdict: Verdict,
}

/// Checks `dim L_{n,D,⌊n(D-1)/m⌋} <= D^{cn}` for every `n <= max_n` and
/// every `m` listed, sharing one degree profile per `D`.
pub fn sweep_dim_bound(max_n: usize, d: u64, ms: &[u64]) -> Result<Vec<DimBoundCheck>> {
    if d < 2 {
        return Err(Error::domain(format!("D must be at least 2, got {d}")));
    }
    let mut out = Vec::with_capacity(max_n * ms.len());
    let mut profile = DegreeProfile::new(d);
    let ln_d = Real::from_u64(d).ln();
    let exps: Vec<(u64, Real)> = ms
        .iter()
        .map(|&m| {
            if m < 2 {
                Err(Error::domain(format!("m must be at least 2, got {m}")))
            } else {
                Ok((m, hoeffding_exponent(d, m).mul(&ln_d)))
            }
        })
        .collect::<Result<_>>()?;
    let top = ms
        .iter()
        .map(|&m| degree_threshold(max_n, d, m))
        .max()
        .unwrap_or(0);
    for n in 1..=max_n {
        profile.push_variable();
        truncate_profile(&mut profile, top);
        let mut thresholds: Vec<(usize, u64)> = exps
            .iter()
            .enumerate()
            .map(|(i, &(m, _))| (i, degree_threshold(n, d, m)))
            .collect();
        thresholds.sort_by_key(|&(_, k)| k);
        let mut running = BigUint::zero();
        let mut upto = 0usize;
        let mut dims = vec![BigUint::zero(); exps.len()];
        for &(i, k) in &thresholds {
            while upto <= k as usize {
                running += &profile.counts()[upto];
                upto += 1;
            }
            dims[i].clone_from(&running);
        }
        for (i, (m, c_ln_d)) in exps.iter().enumerate() {
            let ln_bound = c_ln_d.mul(&Real::from_u64(n as u64));
            let ln_dim = Real::from_biguint(&dims[i]).ln();
            out.push(DimBoundCheck {
                n,
                d,
                m: *m,
                k: degree_threshold(n, d, *m),
                dim: std::mem::take(&mut dims[i]),
                verdict: compare_log_upper(&ln_dim, &ln_bound),
                bound: ln_bound.exp(),
            });
        }
    }
    Ok(out)
}

/// [`sweep_dim_bound`] for several `D` at once, one worker per `D`; rows
/// come back ordered by `D` as listed, then `n`, then `m`.
pub fn sweep_dim_bound_grid(max_n: usize, ds: &[u64], ms: &[u64]) -> Result<Vec<DimBoundCheck>> {
    use rayon::prelude::*;
    let parts: Vec<Vec<DimBoundCheck>> = ds
        .par_iter()
        .map(|&d| sweep_dim_bound(max_n, d, ms))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// `dim` as `u64` when it fits, for display.
pub fn dim_to_u64(v: &BigUint) -> Option<u64> {
    v.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: usize, d: u64, k: u64) -> u64 {
        let mut count = 0;
        let total = d.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut deg = 0;
            for _ in 0..n {
                deg += c % d;
                c /= d;
            }
            if deg <= k {
                count += 1;
            }
        }
        count
    }

    fn p(n: usize, d: u64, k: u64) -> MonomialSpaceParams {
        MonomialSpaceParams::new(n, d, k).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(dim_exact(p(2, 3, 2)), BigUint::from(6u32));
        assert_eq!(dim_exact(p(2, 3, 1)), BigUint::from(3u32));
        assert_eq!(dim_exact(p(1, 3, 0)), BigUint::from(1u32));
        for (n, d) in [(1, 2), (3, 5), (7, 3)] {
            assert_eq!(dim_exact(p(n, d, 0)), BigUint::one());
            assert_eq!(dim_exact(p(n, d, n as u64 * (d - 1))), BigUint::from(d).pow(n as u32));
            assert_eq!(dim_exact(p(n, d, 10_000)), BigUint::from(d).pow(n as u32));
        }
    }

    #[test]
    fn routes_agree_with_enumeration() {
        for n in 1..=6 {
            for d in 2..=4 {
                for k in 0..=(n as u64 * (d - 1) + 1) {
                    let b = BigUint::from(brute(n, d, k));
                    assert_eq!(dim_exact(p(n, d, k)), b, "n={n} D={d} k={k}");
                    assert_eq!(dim_inclusion_exclusion(p(n, d, k)), b);
                }
            }
        }
    }

    #[test]
    fn hoeffding_examples() {
        let b = hoeffding_dim_bound(2, 3, 3).unwrap();
        assert!((b.to_f64() - 8.0535).abs() < 1e-3, "{b}");
        let c = hoeffding_exponent(3, 3);
        assert!((c.to_f64() - 0.949431).abs() < 1e-6);
        assert_eq!(hoeffding_dim_bound(4, 5, 2).unwrap().to_sig_string(20), "625");
        let b = hoeffding_dim_bound(1, 2, 4).unwrap();
        let expected = 2f64.powf(1.0 - 4.0 / (32.0 * 2f64.ln()));
        assert!((b.to_f64() - expected).abs() < 1e-12);
        assert!(hoeffding_dim_bound(1, 2, 1).is_err());
    }

    #[test]
    fn sweep_small() {
        let rows = sweep_dim_bound(30, 3, &[3, 4, 5]).unwrap();
        assert_eq!(rows.len(), 90);
        for r in &rows {
            assert_eq!(r.dim, dim_exact(p(r.n, r.d, r.k)));
            assert_eq!(r.verdict, Verdict::Ok);
        }
    }
}
