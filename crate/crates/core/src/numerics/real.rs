//! Decimal floating-point numbers with a per-value significant-digit budget.
//!
//! A [`Real`] is `±coefficient × 10^exponent` where the coefficient never has
//! more digits than the value's [`Precision`]. Every arithmetic operation rounds
//! its exact result to nearest, ties to even, so identical operands always give
//! identical digit strings on every platform.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::rc::Rc;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NumericError;

/// Smallest digit budget a [`Real`] may carry.
pub const MIN_DIGITS: u32 = 15;

/// Extra digits carried by internal computations beyond the requested precision.
pub const GUARD_DIGITS: u32 = 5;

/// Largest decimal exponent magnitude a value may reach before it is reported
/// as an overflow by the checked entry points.
pub const EXPONENT_LIMIT: i64 = 100_000_000_000_000_000;

const LOG10_2: f64 = std::f64::consts::LOG10_2;
const POW10_CACHE_LIMIT: u32 = 2048;

/// Number of significant decimal digits kept by a [`Real`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precision(u32);

impl Precision {
    /// 40 significant digits, the default for every experiment.
    pub const DEFAULT: Precision = Precision(40);

    pub fn new(digits: u32) -> Result<Self, NumericError> {
        if digits < MIN_DIGITS {
            return Err(NumericError::PrecisionTooSmall(digits));
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    /// This precision plus [`GUARD_DIGITS`].
    pub fn guarded(self) -> Precision {
        Precision(self.0 + GUARD_DIGITS)
    }

    pub(crate) fn plus(self, extra: u32) -> Precision {
        Precision(self.0 + extra)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

thread_local! {
    static POW10: RefCell<Vec<Rc<BigUint>>> = RefCell::new(vec![Rc::new(BigUint::one())]);
}

/// `10^k`, cached per thread for small `k`.
pub(crate) fn pow10(k: u32) -> Rc<BigUint> {
    if k > POW10_CACHE_LIMIT {
        return Rc::new(BigUint::from(10u32).pow(k));
    }
    POW10.with(|cell| {
        let mut table = cell.borrow_mut();
        while table.len() <= k as usize {
            let next = &**table.last().expect("table starts non-empty") * 10u32;
            table.push(Rc::new(next));
        }
        table[k as usize].clone()
    })
}

/// Number of decimal digits of `c` (zero has zero digits).
pub(crate) fn ndigits(c: &BigUint) -> u32 {
    if c.is_zero() {
        return 0;
    }
    let bits = c.bits();
    let est = ((bits - 1) as f64 * LOG10_2).floor() as u32 + 1;
    if *c >= *pow10(est) {
        est + 1
    } else {
        est
    }
}

/// Signed decimal number rounded to a fixed count of significant digits.
#[derive(Clone)]
pub struct Real {
    neg: bool,
    coeff: BigUint,
    exp: i64,
    prec: Precision,
}

impl Real {
    pub fn zero(prec: Precision) -> Real {
        Real { neg: false, coeff: BigUint::zero(), exp: 0, prec }
    }

    pub fn one(prec: Precision) -> Real {
        Real::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: Precision) -> Real {
        Real::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0, prec)
    }

    /// Rounds `±coeff × 10^exp` to `prec` digits.
    pub fn from_parts(neg: bool, coeff: BigUint, exp: i64, prec: Precision) -> Real {
        round_parts(neg, coeff, exp, prec)
    }

    /// Parses a decimal literal such as `-12.5`, `0.4` or `1.25e-7`.
    pub fn parse(text: &str, prec: Precision) -> Result<Real, NumericError> {
        let (neg, coeff, exp) = parse_decimal(text)?;
        Ok(round_parts(neg, coeff, exp, prec))
    }

    /// Best-effort conversion of an `f64` through its shortest round-trip
    /// decimal representation.
    pub fn from_f64(v: f64, prec: Precision) -> Result<Real, NumericError> {
        if !v.is_finite() {
            return Err(NumericError::NotFinite);
        }
        Real::parse(&format!("{v:e}"), prec)
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// The same value rounded (or widened) to `prec` digits.
    pub fn with_precision(&self, prec: Precision) -> Real {
        if prec >= self.prec {
            let mut out = self.clone();
            out.prec = prec;
            return out;
        }
        round_parts(self.neg, self.coeff.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn is_positive(&self) -> bool {
        !self.neg && !self.coeff.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Real {
        let mut out = self.clone();
        out.neg = false;
        out
    }

    /// Decimal exponent of the leading digit: `floor(log10 |x|)` for nonzero `x`.
    pub fn adjusted_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + ndigits(&self.coeff) as i64 - 1)
        }
    }

    /// Whether the exponent stays inside [`EXPONENT_LIMIT`].
    pub fn in_range(&self) -> bool {
        self.exp.abs() < EXPONENT_LIMIT
    }

    pub fn is_integer(&self) -> bool {
        if self.exp >= 0 || self.is_zero() {
            return true;
        }
        let k = self.exp.unsigned_abs();
        if k > u32::MAX as u64 {
            return false;
        }
        (&self.coeff % &*pow10(k as u32)).is_zero()
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> Real {
        if self.exp >= 0 || self.is_zero() {
            return self.clone();
        }
        let (int, rem) = self.split_fraction();
        let int = if self.neg && !rem.is_zero() { int + 1u32 } else { int };
        round_parts(self.neg, int, 0, self.prec)
    }

    /// `self − floor(self)`, always in `[0, 1)`.
    pub fn frac(&self) -> Real {
        if self.exp >= 0 || self.is_zero() {
            return Real::zero(self.prec);
        }
        let k = self.exp.unsigned_abs();
        let (_, rem) = self.split_fraction();
        if rem.is_zero() {
            return Real::zero(self.prec);
        }
        let rem = if self.neg {
            if k > u32::MAX as u64 {
                // |x| is far below 1: 1 − |x| rounded to the working digits.
                return &Real::one(self.prec) - &self.abs();
            }
            &*pow10(k as u32) - rem
        } else {
            rem
        };
        round_parts(false, rem, self.exp, self.prec)
    }

    /// `floor(self)` as an `i64` together with `frac(self)` as an `f64`.
    ///
    /// Used for reduced-precision residual streams; the floor saturates for
    /// values outside the `i64` range.
    pub fn floor_frac_f64(&self) -> (i64, f64) {
        if self.exp >= 0 || self.is_zero() {
            let v = self.to_f64();
            let floor = if v >= i64::MAX as f64 {
                i64::MAX
            } else if v <= i64::MIN as f64 {
                i64::MIN
            } else {
                self.floor_i64_exact()
            };
            return (floor, 0.0);
        }
        let k = self.exp.unsigned_abs();
        if k > 300 {
            // Magnitude is tiny relative to the fractional grid; fall back to
            // the exact split.
            let fl = self.floor();
            return (fl.to_i64_saturating(), self.frac().to_f64());
        }
        let (int, rem) = self.split_fraction();
        let scale = 10f64.powi(k as i32);
        let remf = rem.to_f64().unwrap_or(f64::MAX) / scale;
        let intv = int.to_i64().unwrap_or(i64::MAX);
        if self.neg {
            if rem.is_zero() {
                (intv.checked_neg().unwrap_or(i64::MIN), 0.0)
            } else {
                let fl = intv.checked_neg().and_then(|v| v.checked_sub(1)).unwrap_or(i64::MIN);
                let f = 1.0 - remf;
                // 1 − tiny can round to 1.0 in binary
                (fl, if f >= 1.0 { 0.0 } else { f })
            }
        } else {
            (intv, remf)
        }
    }

    fn floor_i64_exact(&self) -> i64 {
        self.floor().to_i64_saturating()
    }

    /// Integer value, saturating at the `i64` bounds; fractions are floored.
    pub fn to_i64_saturating(&self) -> i64 {
        let fl = if self.is_integer() { self.clone() } else { self.floor() };
        if fl.is_zero() {
            return 0;
        }
        if fl.exp > 19 {
            return if fl.neg { i64::MIN } else { i64::MAX };
        }
        let mag = if fl.exp >= 0 {
            &fl.coeff * &*pow10(fl.exp as u32)
        } else {
            fl.coeff.clone() / &*pow10(fl.exp.unsigned_abs() as u32)
        };
        match mag.to_i64() {
            Some(v) if fl.neg => -v,
            Some(v) => v,
            None if fl.neg => i64::MIN,
            None => i64::MAX,
        }
    }

    /// Nearest `f64` (through the decimal string, so it is correctly rounded).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let text = format!("{}e{}", self.signed_coeff_string(), self.exp);
        text.parse::<f64>().unwrap_or(if self.neg { f64::NEG_INFINITY } else { f64::INFINITY })
    }

    /// `log10 |x|` as an `f64`, usable for values whose exponent overflows `f64`.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let digits = self.coeff.to_string();
        let lead: f64 = format!("0.{}", &digits[..digits.len().min(17)]).parse().unwrap_or(0.1);
        lead.log10() + (self.exp + digits.len() as i64) as f64
    }

    /// Multiplies by `10^k` exactly.
    pub fn scale10(&self, k: i64) -> Real {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        out.exp += k;
        out
    }

    pub fn checked_div(&self, rhs: &Real) -> Option<Real> {
        if rhs.is_zero() {
            None
        } else {
            Some(div_impl(self, rhs))
        }
    }

    /// `self^n` by binary powering, rounding after every product.
    pub fn powi(&self, n: i32) -> Option<Real> {
        let mut result = Real::one(self.prec);
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            Real::one(self.prec).checked_div(&result)
        } else {
            Some(result)
        }
    }

    pub fn max_of(a: &Real, b: &Real) -> Real {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min_of(a: &Real, b: &Real) -> Real {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub(crate) fn parts(&self) -> (bool, &BigUint, i64) {
        (self.neg, &self.coeff, self.exp)
    }

    /// Integer part and remainder of the coefficient at the decimal point.
    /// Only meaningful when `exp < 0`.
    fn split_fraction(&self) -> (BigUint, BigUint) {
        let k = self.exp.unsigned_abs();
        if k > u32::MAX as u64 || k as u32 > ndigits(&self.coeff) + 1 {
            return (BigUint::zero(), self.coeff.clone());
        }
        self.coeff.div_rem(&*pow10(k as u32))
    }

    fn signed_coeff_string(&self) -> String {
        if self.neg {
            format!("-{}", self.coeff)
        } else {
            self.coeff.to_string()
        }
    }

    /// Digits of the coefficient with trailing zeros moved into the exponent.
    fn normalized_digits(&self) -> (String, i64) {
        let digits = self.coeff.to_string();
        let trimmed = digits.trim_end_matches('0');
        let dropped = (digits.len() - trimmed.len()) as i64;
        (trimmed.to_string(), self.exp + dropped)
    }
}

fn round_parts(neg: bool, coeff: BigUint, exp: i64, prec: Precision) -> Real {
    if coeff.is_zero() {
        return Real::zero(prec);
    }
    let p = prec.digits();
    let nd = ndigits(&coeff);
    if nd <= p {
        return Real { neg, coeff, exp, prec };
    }
    let drop = nd - p;
    let scale = pow10(drop);
    let (mut q, r) = coeff.div_rem(&*scale);
    let twice: BigUint = r << 1u32;
    let round_up = match twice.cmp(&*scale) {
        Ordering::Greater => true,
        Ordering::Equal => q.is_odd(),
        Ordering::Less => false,
    };
    let mut exp = exp + drop as i64;
    if round_up {
        q += 1u32;
        if q == *pow10(p) {
            q = (*pow10(p - 1)).clone();
            exp += 1;
        }
    }
    Real { neg, coeff: q, exp, prec }
}

fn parse_decimal(text: &str) -> Result<(bool, BigUint, i64), NumericError> {
    let bad = || NumericError::Parse(text.to_string());
    let s = text.trim();
    let (neg, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp_part) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let mut exp: i64 = match exp_part {
        Some(e) => {
            let (eneg, ebody) = match e.as_bytes().first() {
                Some(b'-') => (true, &e[1..]),
                Some(b'+') => (false, &e[1..]),
                _ => (false, e),
            };
            if ebody.is_empty() || !all_digits(ebody) {
                return Err(bad());
            }
            let v: i64 = ebody.parse().map_err(|_| bad())?;
            if v >= EXPONENT_LIMIT {
                return Err(NumericError::Overflow);
            }
            if eneg {
                -v
            } else {
                v
            }
        }
        None => 0,
    };
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    exp -= frac_part.len() as i64;
    let coeff = if digits.is_empty() {
        BigUint::zero()
    } else {
        digits.parse::<BigUint>().map_err(|_| bad())?
    };
    let neg = neg && !coeff.is_zero();
    Ok((neg, coeff, exp))
}

/// Exact signed sum `a + (±b)` rounded to the larger of the two precisions.
fn add_impl(a: &Real, b: &Real, negate_b: bool) -> Real {
    let prec = a.prec.max(b.prec);
    let bneg = b.neg ^ negate_b;
    if b.is_zero() {
        return a.with_precision(prec);
    }
    if a.is_zero() {
        let mut out = b.with_precision(prec);
        out.neg = bneg;
        return out;
    }
    let top_a = a.exp + ndigits(&a.coeff) as i64;
    let top_b = b.exp + ndigits(&b.coeff) as i64;
    let margin = prec.digits() as i64 + 2;
    // An operand entirely below half an ulp of the other cannot move the result.
    if top_b <= top_a - margin {
        return a.with_precision(prec);
    }
    if top_a <= top_b - margin {
        let mut out = b.with_precision(prec);
        out.neg = bneg;
        return out;
    }
    let e = a.exp.min(b.exp);
    let ca = if a.exp > e { &a.coeff * &*pow10((a.exp - e) as u32) } else { a.coeff.clone() };
    let cb = if b.exp > e { &b.coeff * &*pow10((b.exp - e) as u32) } else { b.coeff.clone() };
    if a.neg == bneg {
        round_parts(a.neg, ca + cb, e, prec)
    } else {
        match ca.cmp(&cb) {
            Ordering::Equal => Real::zero(prec),
            Ordering::Greater => round_parts(a.neg, ca - cb, e, prec),
            Ordering::Less => round_parts(bneg, cb - ca, e, prec),
        }
    }
}

fn mul_impl(a: &Real, b: &Real) -> Real {
    let prec = a.prec.max(b.prec);
    if a.is_zero() || b.is_zero() {
        return Real::zero(prec);
    }
    round_parts(a.neg ^ b.neg, &a.coeff * &b.coeff, a.exp + b.exp, prec)
}

fn div_impl(a: &Real, b: &Real) -> Real {
    let prec = a.prec.max(b.prec);
    if a.is_zero() {
        return Real::zero(prec);
    }
    // Scale the dividend so the quotient carries at least prec + 1 digits, then
    // append a sticky digit for an inexact remainder.
    let na = ndigits(&a.coeff) as i64;
    let nb = ndigits(&b.coeff) as i64;
    let shift = (prec.digits() as i64 + 1 + nb - na).max(0);
    let num = &a.coeff * &*pow10(shift as u32);
    let (q, r) = num.div_rem(&b.coeff);
    let mut exp = a.exp - b.exp - shift;
    let q = if r.is_zero() {
        q
    } else {
        exp -= 1;
        q * 10u32 + 1u32
    };
    round_parts(a.neg ^ b.neg, q, exp, prec)
}

fn cmp_abs(a: &Real, b: &Real) -> Ordering {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let top_a = a.exp + ndigits(&a.coeff) as i64;
    let top_b = b.exp + ndigits(&b.coeff) as i64;
    if top_a != top_b {
        return top_a.cmp(&top_b);
    }
    let e = a.exp.min(b.exp);
    let ca = if a.exp > e { &a.coeff * &*pow10((a.exp - e) as u32) } else { a.coeff.clone() };
    let cb = if b.exp > e { &b.coeff * &*pow10((b.exp - e) as u32) } else { b.coeff.clone() };
    ca.cmp(&cb)
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (x, y) if x != y => x.cmp(&y),
            (0, _) => Ordering::Equal,
            (1, _) => cmp_abs(self, other),
            _ => cmp_abs(other, self),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                $body(self, rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                $body(&self, rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| add_impl(a, b, false));
forward_binop!(Sub, sub, |a, b| add_impl(a, b, true));
forward_binop!(Mul, mul, mul_impl);
// Panics on a zero divisor; evaluators use `checked_div`.
forward_binop!(Div, div, |a: &Real, b: &Real| a.checked_div(b).expect("division by zero"));

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        let mut out = self.clone();
        out.neg = !out.neg && !out.is_zero();
        out
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(mut self) -> Real {
        self.neg = !self.neg && !self.is_zero();
        self
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let (digits, exp) = self.normalized_digits();
        let sign = if self.neg { "-" } else { "" };
        let n = digits.len() as i64;
        let adjusted = exp + n - 1;
        if !(-24..64).contains(&adjusted) {
            let (head, tail) = digits.split_at(1);
            return if tail.is_empty() {
                write!(f, "{sign}{head}e{adjusted:+}")
            } else {
                write!(f, "{sign}{head}.{tail}e{adjusted:+}")
            };
        }
        if exp >= 0 {
            write!(f, "{sign}{digits}{}", "0".repeat(exp as usize))
        } else if -exp < n {
            let (int, frac) = digits.split_at((n + exp) as usize);
            write!(f, "{sign}{int}.{frac}")
        } else {
            write!(f, "{sign}0.{}{digits}", "0".repeat((-exp - n) as usize))
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({self}; D={})", self.prec)
    }
}

impl FromStr for Real {
    type Err = NumericError;

    /// Parses with a precision wide enough for every written digit (at least
    /// the default).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (neg, coeff, exp) = parse_decimal(s)?;
        let digits = ndigits(&coeff).max(Precision::DEFAULT.digits());
        Ok(round_parts(neg, coeff, exp, Precision(digits)))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn r(s: &str) -> Real {
        Real::parse(s, p(20)).unwrap()
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(Precision::new(14).is_err());
        assert_eq!(Precision::new(15).unwrap().digits(), 15);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(r("0.4").to_string(), "0.4");
        assert_eq!(r("-12.500").to_string(), "-12.5");
        assert_eq!(r("1.25e-7").to_string(), "0.000000125");
        assert_eq!(r("3e2").to_string(), "300");
        assert_eq!(r("-0").to_string(), "0");
        assert_eq!(Real::parse("1.5e400", p(20)).unwrap().to_string(), "1.5e+400");
        assert!(Real::parse("1..2", p(20)).is_err());
        assert!(Real::parse("abc", p(20)).is_err());
        assert!(Real::parse("", p(20)).is_err());
    }

    #[test]
    fn rounding_is_half_even() {
        let q = p(15);
        assert_eq!(Real::parse("1.000000000000005", q).unwrap().to_string(), "1");
        assert_eq!(Real::parse("1.000000000000015", q).unwrap().to_string(), "1.00000000000002");
        assert_eq!(Real::parse("1.0000000000000051", q).unwrap().to_string(), "1.00000000000001");
        assert_eq!(Real::parse("9.9999999999999999", q).unwrap().to_string(), "10");
    }

    #[test]
    fn arithmetic_basics() {
        assert_eq!((&r("0.1") + &r("0.2")).to_string(), "0.3");
        assert_eq!((&r("1") - &r("1e-30")).to_string(), "1");
        assert_eq!((&r("1e-30") - &r("1")).to_string(), "-1");
        assert_eq!((&r("2.5") * &r("-4")).to_string(), "-10");
        assert_eq!((&r("1") / &r("3")).to_string(), "0.33333333333333333333");
        assert_eq!((&r("2") / &r("3")).to_string(), "0.66666666666666666667");
        assert_eq!((&r("5") - &r("5")).to_string(), "0");
        assert!(r("1").checked_div(&r("0")).is_none());
        assert_eq!(r("1.5").powi(3).unwrap().to_string(), "3.375");
        assert_eq!(r("2").powi(-2).unwrap().to_string(), "0.25");
    }

    #[test]
    fn tiny_addend_does_not_change_result() {
        let big = Real::parse("123456.7890123456789", p(20)).unwrap();
        let tiny = Real::parse("1e-40", p(20)).unwrap();
        assert_eq!(&big + &tiny, big);
        assert_eq!(&big - &tiny, big);
        // A power of ten minus a tiny amount rounds back up.
        let ten = r("10");
        assert_eq!((&ten - &tiny).to_string(), "10");
    }

    #[test]
    fn floor_and_frac() {
        assert_eq!(r("800000.93556582").frac().to_string(), "0.93556582");
        assert_eq!(r("-0.25").frac().to_string(), "0.75");
        assert_eq!(r("-0.25").floor().to_string(), "-1");
        assert_eq!(r("3").frac().to_string(), "0");
        assert_eq!(r("-3").floor().to_string(), "-3");
        assert!(r("3.000").is_integer());
        assert!(!r("3.001").is_integer());
        assert_eq!(r("-2.5").floor_frac_f64(), (-3, 0.5));
        assert_eq!(r("12.25").floor_frac_f64(), (12, 0.25));
    }

    #[test]
    fn ordering() {
        let mut v = [r("3"), r("-1"), r("0"), r("2.5"), r("-1.5"), r("1e-9")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["-1.5", "-1", "0", "0.000000001", "2.5", "3"]);
        assert_eq!(r("2.50"), r("2.5"));
    }

    #[test]
    fn mixed_precision_uses_wider() {
        let a = Real::parse("1", p(15)).unwrap();
        let b = Real::parse("3", p(30)).unwrap();
        let q = &a / &b;
        assert_eq!(q.precision(), p(30));
        assert_eq!(q.to_string(), format!("0.{}", "3".repeat(30)));
    }

    #[test]
    fn log10_and_f64() {
        assert!((r("1000").log10_abs() - 3.0).abs() < 1e-12);
        assert!((Real::parse("2e500", p(20)).unwrap().log10_abs() - 500.30103).abs() < 1e-5);
        assert_eq!(r("0.5").to_f64(), 0.5);
        assert_eq!(r("-123.75").to_i64_saturating(), -124);
    }

    #[test]
    fn serde_roundtrip_as_string() {
        let x = r("-0.0625");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"-0.0625\"");
        let back: Real = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
