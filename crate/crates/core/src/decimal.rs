//! Rendering exact rationals as decimal strings.
//!
//! Built on big-integer long division because converting a `BigRational`
//! through f64 fails for the denominators this crate produces (52!-sized
//! values overflow to inf/inf). Output follows printf `%g` conventions:
//! fixed notation for exponents in [-4, sig), scientific otherwise,
//! trailing zeros stripped.

use num::{BigInt, BigRational, One, Signed, Zero};

/// Default number of significant digits for decimal output.
pub const DEFAULT_SIG_DIGITS: usize = 12;

/// Renders `r` with `sig` significant digits, round-half-away-from-zero.
pub fn to_decimal_string(r: &BigRational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs();
    let den = r.denom().abs();

    let mut exp10 = digits10(&num) - digits10(&den);
    if !ge_pow10(&num, &den, exp10) {
        exp10 -= 1;
    }
    // Integer mantissa with exactly `sig` digits: round(|r| * 10^(sig-1-exp10)).
    let scale = sig as i64 - 1 - exp10;
    let (a, b) = if scale >= 0 {
        (&num * pow10(scale as u64), den.clone())
    } else {
        (num.clone(), &den * pow10((-scale) as u64))
    };
    let mut mantissa = (&a * 2u8 + &b) / (&b * 2u8);
    if mantissa >= pow10(sig as u64) {
        mantissa = mantissa / 10u8;
        exp10 += 1;
    }

    let digits = format!("{:0>width$}", mantissa.to_string(), width = sig);
    if (-4..sig as i64).contains(&exp10) {
        let s = if exp10 >= 0 {
            let split = (exp10 + 1) as usize;
            let frac = digits[split..].trim_end_matches('0');
            if frac.is_empty() {
                digits[..split].to_string()
            } else {
                format!("{}.{}", &digits[..split], frac)
            }
        } else {
            let zeros = "0".repeat((-exp10 - 1) as usize);
            // mantissa >= 10^(sig-1), so the stripped digits are nonempty.
            format!("0.{zeros}{}", digits.trim_end_matches('0'))
        };
        format!("{sign}{s}")
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{}e{exp10}", &digits[..1])
        } else {
            format!("{sign}{}.{frac}e{exp10}", &digits[..1])
        }
    }
}

/// Exact rational string, e.g. "5/6"; integers render without denominator.
pub fn to_rational_string(r: &BigRational) -> String {
    r.to_string()
}

/// f64 approximation that survives 52!-sized numerators and denominators.
pub fn approx_f64(r: &BigRational) -> f64 {
    to_decimal_string(r, 17).parse().unwrap_or(f64::NAN)
}

fn digits10(x: &BigInt) -> i64 {
    // Count of decimal digits of |x|; x must be nonzero here.
    x.to_str_radix(10).trim_start_matches('-').len() as i64
}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10u8).pow(e as u32)
}

/// num >= den * 10^e, i.e. num/den >= 10^e, with e possibly negative.
fn ge_pow10(num: &BigInt, den: &BigInt, e: i64) -> bool {
    if e >= 0 {
        *num >= den * pow10(e as u64)
    } else {
        num * pow10((-e) as u64) >= *den
    }
}

/// True when the value lies in [0, 1]; used to validate probabilities and
/// distance points at construction sites.
pub fn in_unit_interval(r: &BigRational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}
