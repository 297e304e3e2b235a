//! sin(πx), cos, sin, Γ and the fractional part.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::fixed::{self, bits_for_digits, from_fixed, to_fixed};
use super::real::{ndigits, pow10, Precision, Real, GUARD_DIGITS};
use super::NumericError;

/// Integers up to this value get Γ from an exact factorial.
const EXACT_FACTORIAL_LIMIT: u64 = 101;

/// sin and cos reject |x| ≥ 10^this. Exact reduction needs π to as many
/// digits as x has before the point, and the cost grows quadratically.
pub const TRIG_EXPONENT_LIMIT: i64 = 10_000;

/// |x| beyond this is reported as overflow by [`gamma`].
const GAMMA_ARG_LIMIT: f64 = 1e15;

/// π rounded to `prec` digits.
pub fn pi(prec: Precision) -> Real {
    let bits = bits_for_digits(prec.digits() + 3);
    from_fixed(&fixed::pi(bits), bits, prec)
}

/// sin(π·x). Reduction mod 2 is exact in decimal, so large arguments lose nothing.
pub fn sin_pi(x: &Real) -> Real {
    let prec = x.precision();
    let (neg, coeff, exp) = x.parts();
    if x.is_zero() || exp >= 0 {
        return Real::zero(prec);
    }
    let adj = x.adjusted_exponent().unwrap_or(0);
    if adj < -(prec.digits() as i64) - 2 {
        // sin(πx) = πx to far below the last digit.
        let wp = prec.guarded();
        return (&pi(wp) * &x.with_precision(wp)).with_precision(prec);
    }
    let den = (*pow10(exp.unsigned_abs() as u32)).clone();
    half_turns(neg, coeff.clone(), den, prec)
}

/// cos(π·x).
pub fn cos_pi(x: &Real) -> Real {
    let prec = x.precision();
    let (_, coeff, exp) = x.parts();
    if x.is_zero() {
        return Real::one(prec);
    }
    if exp > 0 {
        return Real::one(prec);
    }
    if exp == 0 {
        return if coeff.is_odd() { -Real::one(prec) } else { Real::one(prec) };
    }
    // cos(πt) = sin(π(t + 1/2))
    let den = (*pow10(exp.unsigned_abs() as u32)).clone();
    let num = (coeff << 1u32) + &den;
    half_turns(false, num, den << 1u32, prec)
}

/// (−1)^neg · sin(π·num/den) for a non-negative rational argument.
fn half_turns(neg: bool, num: BigUint, den: BigUint, prec: Precision) -> Real {
    let two_den: BigUint = &den << 1u32;
    let mut num = num % &two_den;
    let mut neg = neg;
    if num >= den {
        num -= &den;
        neg = !neg;
    }
    if num.is_zero() {
        return Real::zero(prec);
    }
    let twice: BigUint = &num << 1u32;
    if twice == den {
        let one = Real::one(prec);
        return if neg { -one } else { one };
    }
    if twice > den {
        num = &den - &num;
    }
    // Now t = num/den lies in (0, 1/2); fold (1/4, 1/2) onto the cosine.
    let four: BigUint = &num << 2u32;
    let (use_cos, kn, kd) = if four > den {
        (true, &den - (&num << 1u32), &den << 1u32)
    } else {
        (false, num, den)
    };
    let leading_zeros = if use_cos { 0 } else { ndigits(&kd).saturating_sub(ndigits(&kn)) };
    let bits = bits_for_digits(prec.digits() + GUARD_DIGITS + leading_zeros);
    let t = BigInt::from((kn << bits) / kd);
    let y = fixed::mul(&t, &fixed::pi(bits), bits);
    let v = if use_cos { fixed::cos_series(&y, bits) } else { fixed::sin_series(&y, bits) };
    let out = from_fixed(&v, bits, prec);
    if neg {
        -out
    } else {
        out
    }
}

/// Reduces a radian argument to half-turns with enough extra digits that the
/// integer part of x/π does not eat into the requested precision.
fn to_half_turns(x: &Real) -> Real {
    let prec = x.precision();
    let extra = x.adjusted_exponent().unwrap_or(0).max(0) as u32 + GUARD_DIGITS;
    let wp = prec.plus(extra);
    &x.with_precision(wp) / &pi(wp)
}

fn check_trig_arg(x: &Real) -> Result<(), NumericError> {
    match x.adjusted_exponent() {
        Some(e) if e >= TRIG_EXPONENT_LIMIT => Err(NumericError::ArgumentTooLarge(TRIG_EXPONENT_LIMIT)),
        _ => Ok(()),
    }
}

/// sin(x) in radians.
pub fn sin_r(x: &Real) -> Result<Real, NumericError> {
    if x.is_zero() {
        return Ok(Real::zero(x.precision()));
    }
    check_trig_arg(x)?;
    Ok(sin_pi(&to_half_turns(x)).with_precision(x.precision()))
}

/// cos(x) in radians.
pub fn cos_r(x: &Real) -> Result<Real, NumericError> {
    if x.is_zero() {
        return Ok(Real::one(x.precision()));
    }
    check_trig_arg(x)?;
    Ok(cos_pi(&to_half_turns(x)).with_precision(x.precision()))
}

/// x − floor(x), in [0, 1).
pub fn frac(x: &Real) -> Real {
    x.frac()
}

/// Γ(x) at the precision of `x`.
pub fn gamma(x: &Real) -> Result<Real, NumericError> {
    let prec = x.precision();
    if x.is_integer() {
        if !x.is_positive() {
            return Err(NumericError::Pole(x.to_string()));
        }
        let n = x.to_i64_saturating() as u64;
        if n <= EXACT_FACTORIAL_LIMIT {
            let mut f = BigUint::one();
            for i in 2..n {
                f *= i;
            }
            return Ok(Real::from_parts(false, f, 0, prec));
        }
    }
    if x.abs().to_f64() > GAMMA_ARG_LIMIT {
        return Err(NumericError::Overflow);
    }
    let work = prec.guarded();
    let xw = x.with_precision(work);
    let half = Real::parse("0.5", work).expect("literal");
    if xw < half {
        // Γ(x) = π / (sin(πx) Γ(1 − x))
        let s = sin_pi(&xw);
        let g = gamma_positive(&(&Real::one(work) - &xw), work)?;
        let denom = &s * &g;
        let out = pi(work).checked_div(&denom).ok_or(NumericError::DivisionByZero)?;
        return Ok(out.with_precision(prec));
    }
    Ok(gamma_positive(&xw, work)?.with_precision(prec))
}

/// Γ(x) for x ≥ 1/2: shift the argument up until Stirling's series converges
/// far enough, then divide the shift back out.
fn gamma_positive(x: &Real, work: Precision) -> Result<Real, NumericError> {
    let p = work.digits();
    let xf = x.to_f64();
    let x0 = (p / 2 + 2) as f64;
    let shift: u64 = if xf < x0 { (x0 - xf.floor()) as u64 } else { 0 };
    let yf = xf + shift as f64;
    let magnitude_digits = (yf * yf.ln()).abs().log10().ceil().max(1.0) as u32;
    let bits = bits_for_digits(p + magnitude_digits + 2);
    let xfix = to_fixed(x, bits);
    let y = &xfix + (BigInt::from(shift) << bits);
    let l = fixed::ln_gamma_stirling(&y, bits);
    let ln10 = fixed::ln10(bits);
    let k = l.div_floor(&*ln10);
    let r = &l - &k * &*ln10;
    let mantissa = fixed::exp(&r, bits);
    let k = k.to_i64().ok_or(NumericError::Overflow)?;
    let inner = work.plus(2);
    let mut g = from_fixed(&mantissa, bits, inner).scale10(k);
    if shift > 0 {
        let mut prod = xfix.clone();
        for i in 1..shift {
            prod = fixed::mul(&prod, &(&xfix + (BigInt::from(i) << bits)), bits);
        }
        g = g.checked_div(&from_fixed(&prod, bits, inner)).ok_or(NumericError::DivisionByZero)?;
    }
    if !g.in_range() {
        return Err(NumericError::Overflow);
    }
    Ok(g.with_precision(work))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn r(s: &str, d: u32) -> Real {
        Real::parse(s, p(d)).unwrap()
    }

    // Reference digits below were produced by an independent
    // arbitrary-precision evaluator (mpmath at 60 digits).

    #[test]
    fn sin_pi_examples() {
        assert_eq!(sin_pi(&r("0.5", 20)).to_string(), "1");
        assert_eq!(sin_pi(&r("1", 20)).to_string(), "0");
        assert_eq!(sin_pi(&r("0.25", 20)).to_string(), "0.7071067811865475244");
        assert_eq!(sin_pi(&r("-0.25", 20)).to_string(), "-0.7071067811865475244");
        assert_eq!(sin_pi(&r("1.5", 20)).to_string(), "-1");
        assert_eq!(sin_pi(&r("800000.93556582", 40)).to_string(), "0.2010463329690301952825702979099514078078");
        assert_eq!(sin_pi(&r("1e-30", 20)).to_string(), "3.1415926535897932385e-30");
    }

    #[test]
    fn cos_examples() {
        assert_eq!(cos_r(&r("0", 20)).unwrap().to_string(), "1");
        assert_eq!(cos_r(&r("1", 20)).unwrap().to_string(), "0.5403023058681397174");
        assert_eq!(sin_r(&r("0", 20)).unwrap().to_string(), "0");
        assert_eq!(sin_r(&r("1", 20)).unwrap().to_string(), "0.84147098480789650665");
        assert_eq!(cos_r(&r("0.5403023058681397174009366074429766037323", 40)).unwrap().to_string(),
            "0.8575532158463934157441062727619897911059");
        assert_eq!(cos_r(&r("100", 30)).unwrap().to_string(), "0.862318872287683934101938513951");
        assert_eq!(cos_pi(&r("3", 20)).to_string(), "-1");
        assert_eq!(cos_pi(&r("0.5", 20)).to_string(), "0");
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&r("1", 20)).unwrap().to_string(), "1");
        assert_eq!(gamma(&r("5", 20)).unwrap().to_string(), "24");
        assert_eq!(gamma(&r("0.5", 20)).unwrap().to_string(), "1.7724538509055160273");
        assert_eq!(gamma(&r("2.5", 40)).unwrap().to_string(), "1.329340388179137020473625612505858887098");
        assert_eq!(gamma(&r("-1.5", 30)).unwrap().to_string(), "2.36327180120735470306422331112");
        assert_eq!(gamma(&r("150.25", 30)).unwrap().to_string(), "1.33215077619516348430117503937e+261");
        assert_eq!(gamma(&r("1e-10", 20)).unwrap().to_string(), "9999999999.4227843352");
        assert!(matches!(gamma(&r("0", 20)), Err(NumericError::Pole(_))));
        assert!(matches!(gamma(&r("-3", 20)), Err(NumericError::Pole(_))));
        assert!(matches!(gamma(&r("1e16", 20)), Err(NumericError::Overflow)));
    }

    #[test]
    fn frac_examples() {
        assert_eq!(frac(&r("800000.93556582", 20)).to_string(), "0.93556582");
        assert_eq!(frac(&r("-0.25", 20)).to_string(), "0.75");
        assert_eq!(frac(&r("3", 20)).to_string(), "0");
    }
}
