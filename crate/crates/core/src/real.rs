//! High-precision reals for bound formulas.
//!
//! Values carry a 256-bit mantissa. Comparisons against exact integers go
//! through [`Real::ln`] so that huge quantities such as `D^{cn}` for
//! `n = 2000` never leave log space.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::BigUint;
use num_traits::Zero;

pub const PRECISION_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn from_u64(v: u64) -> Self {
        Real(BigFloat::from_u64(v, PRECISION_BITS))
    }

    pub fn from_i64(v: i64) -> Self {
        Real(BigFloat::from_i64(v, PRECISION_BITS))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        if v.is_zero() {
            return Self::from_u64(0);
        }
        let words: Vec<Word> = v.iter_u64_digits().map(|w| w as Word).collect();
        let exp = (words.len() * 64) as i32;
        let mut f = BigFloat::from_words(&words, Sign::Pos, exp);
        f.set_precision(PRECISION_BITS, RM).expect("precision");
        Real(f)
    }

    /// Parses a decimal literal such as `2.765`.
    pub fn from_decimal(s: &str) -> Self {
        let f = with_consts(|cc| BigFloat::parse(s, Radix::Dec, PRECISION_BITS, RM, cc));
        assert!(!f.is_nan(), "bad decimal literal {s:?}");
        Real(f)
    }

    pub fn add(&self, o: &Real) -> Real {
        Real(self.0.add(&o.0, PRECISION_BITS, RM))
    }

    pub fn sub(&self, o: &Real) -> Real {
        Real(self.0.sub(&o.0, PRECISION_BITS, RM))
    }

    pub fn mul(&self, o: &Real) -> Real {
        Real(self.0.mul(&o.0, PRECISION_BITS, RM))
    }

    pub fn div(&self, o: &Real) -> Real {
        Real(self.0.div(&o.0, PRECISION_BITS, RM))
    }

    pub fn ln(&self) -> Real {
        Real(with_consts(|cc| self.0.ln(PRECISION_BITS, RM, cc)))
    }

    pub fn exp(&self) -> Real {
        Real(with_consts(|cc| self.0.exp(PRECISION_BITS, RM, cc)))
    }

    /// `self^y` for positive `self`.
    pub fn pow(&self, y: &Real) -> Real {
        y.mul(&self.ln()).exp()
    }

    pub fn powi(&self, n: usize) -> Real {
        Real(self.0.powi(n, PRECISION_BITS, RM))
    }

    /// `self^(1/n)` for positive `self`.
    pub fn root(&self, n: u64) -> Real {
        self.ln().div(&Real::from_u64(n)).exp()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    /// `⌊self⌋` for a non-negative value.
    pub fn floor_biguint(&self) -> BigUint {
        to_biguint(&self.0.floor())
    }

    /// `⌈self⌉` for a non-negative value.
    pub fn ceil_biguint(&self) -> BigUint {
        to_biguint(&self.0.ceil())
    }

    pub fn to_f64(&self) -> f64 {
        self.to_sig_string(20).parse().unwrap_or(f64::NAN)
    }

    /// Decimal rendering rounded to `digits` significant digits; positional
    /// when the magnitude is moderate, scientific otherwise.
    pub fn to_sig_string(&self, digits: usize) -> String {
        let raw = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into());
        render_decimal(&raw, digits.max(1))
    }
}

fn to_biguint(f: &BigFloat) -> BigUint {
    assert!(!f.is_negative(), "expected a non-negative value");
    if f.is_zero() {
        return BigUint::zero();
    }
    let (words, _, _, exp, _) = f.as_raw_parts().expect("finite value");
    let mut m = BigUint::zero();
    for &w in words.iter().rev() {
        m = (m << 64u32) + BigUint::from(w);
    }
    let shift = exp as i64 - (words.len() * 64) as i64;
    if shift >= 0 {
        m << shift as u64
    } else {
        m >> (-shift) as u64
    }
}

/// Rounds astro-float's `d.ddd…e±x` output to `digits` significant digits.
fn render_decimal(raw: &str, digits: usize) -> String {
    let (negative, body) = match raw.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, raw),
    };
    let (mant, exp) = match body.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    if !mant.bytes().next().is_some_and(|b| b.is_ascii_digit()) {
        return raw.to_string();
    }
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let all: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    // decimal exponent of the first digit in `all`
    let lead = all.iter().position(|&d| d != 0);
    let Some(lead) = lead else {
        return "0".to_string();
    };
    let mut exp10 = exp + int_part.len() as i64 - 1 - lead as i64;
    let mut sig: Vec<u8> = all[lead..].iter().copied().chain(std::iter::repeat(0)).take(digits + 1).collect();
    let round_up = sig[digits] >= 5;
    sig.truncate(digits);
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                sig.insert(0, 1);
                sig.truncate(digits);
                exp10 += 1;
                break;
            }
            i -= 1;
            if sig[i] == 9 {
                sig[i] = 0;
            } else {
                sig[i] += 1;
                break;
            }
        }
    }
    while sig.len() > 1 && *sig.last().expect("nonempty") == 0 {
        sig.pop();
    }
    let ds: String = sig.iter().map(|d| (b'0' + d) as char).collect();
    let sign = if negative { "-" } else { "" };
    if (-6..=40).contains(&exp10) {
        if exp10 < 0 {
            format!("{sign}0.{}{ds}", "0".repeat((-exp10 - 1) as usize))
        } else {
            let int_len = exp10 as usize + 1;
            if ds.len() <= int_len {
                format!("{sign}{ds}{}", "0".repeat(int_len - ds.len()))
            } else {
                format!("{sign}{}.{}", &ds[..int_len], &ds[int_len..])
            }
        }
    } else {
        let (head, tail) = ds.split_at(1);
        let frac = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        format!("{sign}{head}{frac}e{exp10}")
    }
}

/// Relative slack under which an apparent violation is reported as a tie.
pub const NEAR_TIE_RELATIVE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Ok,
    NearTie,
    Violated,
}

/// Compares `ln(value) <= ln(bound)` with [`NEAR_TIE_RELATIVE`] slack.
pub fn compare_log_upper(ln_value: &Real, ln_bound: &Real) -> Verdict {
    if ln_value <= ln_bound {
        return Verdict::Ok;
    }
    let magnitude = if ln_bound.is_negative() {
        Real::from_u64(0).sub(ln_bound)
    } else {
        ln_bound.clone()
    };
    let slack = magnitude
        .mul(&Real::from_decimal("1e-9"))
        .add(&Real::from_decimal("1e-30"));
    if ln_value <= &ln_bound.add(&slack) {
        Verdict::NearTie
    } else {
        Verdict::Violated
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sig_string(40))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sig_string(f.precision().unwrap_or(40)))
    }
}
