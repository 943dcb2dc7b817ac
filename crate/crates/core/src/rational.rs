//! Exact rational scalars used throughout the crate.
//!
//! All equilibrium data (utilities, probabilities, LP tableaus, certificates)
//! is kept in arbitrary-precision rationals so that equilibrium conditions can
//! be checked with zero tolerance. Floating point appears only in the doubly
//! nonnegative test and the order-m column oracle.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"` with optional sign, normalizing the result.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".to_string());
    }
    match s.split_once('/') {
        None => s
            .parse::<BigInt>()
            .map(BigRational::from_integer)
            .map_err(|e| format!("invalid rational {s:?}: {e}")),
        Some((num, den)) => {
            let n = num
                .trim()
                .parse::<BigInt>()
                .map_err(|e| format!("invalid numerator {num:?}: {e}"))?;
            let d = den
                .trim()
                .parse::<BigInt>()
                .map_err(|e| format!("invalid denominator {den:?}: {e}"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Canonical string form: `"p"` when the denominator is 1, otherwise `"p/q"`
/// with a positive denominator. This is the form used in all JSON files.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = bigint_to_f64(r.numer());
    let d = bigint_to_f64(r.denom());
    n / d
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    // Good enough for diagnostics and the float oracle; exact for small values.
    let s = b.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via the Stern-Brocot walk. Used to turn float oracle output back into
/// exact certificate entries.
pub fn rationalize(x: f64, max_den: u64) -> Rat {
    assert!(max_den >= 1);
    if !x.is_finite() {
        return Rat::zero();
    }
    let neg = x < 0.0;
    let x = x.abs();
    let whole = x.floor();
    if whole > 1e15 {
        return Rat::zero();
    }
    let frac = x - whole;
    // Walk the Stern-Brocot tree for the fractional part.
    let (mut lo_n, mut lo_d, mut hi_n, mut hi_d) = (0u64, 1u64, 1u64, 1u64);
    let (mut best_n, mut best_d) = (0u64, 1u64);
    let mut best_err = frac;
    loop {
        let mid_n = lo_n + hi_n;
        let mid_d = lo_d + hi_d;
        if mid_d > max_den {
            break;
        }
        let mid = mid_n as f64 / mid_d as f64;
        let err = (frac - mid).abs();
        if err < best_err {
            best_err = err;
            best_n = mid_n;
            best_d = mid_d;
        }
        if mid < frac {
            lo_n = mid_n;
            lo_d = mid_d;
        } else if mid > frac {
            hi_n = mid_n;
            hi_d = mid_d;
        } else {
            break;
        }
    }
    if (frac - 1.0).abs() < best_err && max_den >= 1 {
        best_n = 1;
        best_d = 1;
    }
    let mut out = BigRational::from_integer(BigInt::from(whole as u64))
        + BigRational::new(BigInt::from(best_n), BigInt::from(best_d));
    if neg {
        out = -out;
    }
    out
}

/// True when every entry is nonnegative and the entries sum to one exactly.
pub fn is_exact_distribution(v: &[Rat]) -> bool {
    !v.is_empty()
        && v.iter().all(|p| !p.is_negative())
        && v.iter().fold(Rat::zero(), |a, b| a + b).is_one()
}
