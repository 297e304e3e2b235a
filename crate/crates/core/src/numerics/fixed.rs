//! Binary fixed-point kernels. An integer `v` at scale `bits` stands for
//! `v / 2^bits`. Transcendental series run here because shifts are much
//! cheaper than decimal rescaling.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::real::{ndigits, pow10, Precision, Real};

pub(crate) const GUARD_BITS: u32 = 24;
const LOG2_10: f64 = std::f64::consts::LOG2_10;
const CONST_EXTRA_BITS: u32 = 16;
const EXP_HALVINGS: u32 = 8;

pub(crate) fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
}

pub(crate) fn one(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// `x` truncated toward zero onto the fixed-point grid.
pub(crate) fn to_fixed(x: &Real, bits: u32) -> BigInt {
    let (neg, coeff, exp) = x.parts();
    let mag: BigUint = if exp >= 0 {
        (coeff * &*pow10(exp as u32)) << bits
    } else {
        let k = exp.unsigned_abs();
        if k > ndigits(coeff) as u64 + bits as u64 {
            BigUint::zero()
        } else {
            (coeff << bits) / &*pow10(k as u32)
        }
    };
    let sign = if neg { Sign::Minus } else { Sign::Plus };
    BigInt::from_biguint(sign, mag)
}

/// Decimal value of a fixed-point number, rounded to `prec` digits.
pub(crate) fn from_fixed(v: &BigInt, bits: u32, prec: Precision) -> Real {
    if v.is_zero() {
        return Real::zero(prec);
    }
    let neg = v.is_negative();
    let mag = v.magnitude();
    let int_digits = ((mag.bits() as f64 - bits as f64) / LOG2_10).floor() as i64;
    // Enough decimal digits that truncation sits well below the final rounding.
    let s = prec.digits() as i64 + 4 - int_digits;
    let q = if s >= 0 {
        (mag * &*pow10(s as u32)) >> bits
    } else {
        (mag >> bits) / &*pow10((-s) as u32)
    };
    Real::from_parts(neg, q, -s, prec)
}

/// Product truncated toward zero (an arithmetic shift would leave series
/// terms stuck at −1).
pub(crate) fn mul(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    let p = a * b;
    if p.is_negative() {
        -((-p) >> bits)
    } else {
        p >> bits
    }
}

fn series_atan_inv(n: u64, bits: u32, alternating: bool) -> BigInt {
    let n2 = BigInt::from(n) * n;
    let mut term = one(bits) / n;
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        term /= &n2;
        if term.is_zero() {
            break;
        }
        let t = &term / (2 * k + 1);
        if alternating && k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

thread_local! {
    static CONSTS: RefCell<HashMap<(u8, u32), Rc<BigInt>>> = RefCell::new(HashMap::new());
}

fn cached(tag: u8, bits: u32, make: impl FnOnce(u32) -> BigInt) -> Rc<BigInt> {
    if let Some(v) = CONSTS.with(|c| c.borrow().get(&(tag, bits)).cloned()) {
        return v;
    }
    let v = Rc::new(make(bits + CONST_EXTRA_BITS) >> CONST_EXTRA_BITS);
    CONSTS.with(|c| c.borrow_mut().insert((tag, bits), v.clone()));
    v
}

pub(crate) fn pi(bits: u32) -> Rc<BigInt> {
    cached(0, bits, |b| {
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        series_atan_inv(5, b, true) * 16 - series_atan_inv(239, b, true) * 4
    })
}

pub(crate) fn ln2(bits: u32) -> Rc<BigInt> {
    cached(1, bits, |b| series_atan_inv(3, b, false) * 2)
}

pub(crate) fn ln10(bits: u32) -> Rc<BigInt> {
    cached(2, bits, |b| {
        // ln 10 = 3 ln 2 + ln(5/4), and ln(5/4) = 2 atanh(1/9)
        series_atan_inv(3, b, false) * 6 + series_atan_inv(9, b, false) * 2
    })
}

pub(crate) fn half_ln_2pi(bits: u32) -> Rc<BigInt> {
    cached(3, bits, |b| {
        let two_pi = series_atan_inv(5, b, true) * 32 - series_atan_inv(239, b, true) * 8;
        ln(&two_pi, b) >> 1
    })
}

/// Natural logarithm of a positive fixed-point value.
pub(crate) fn ln(x: &BigInt, bits: u32) -> BigInt {
    debug_assert!(x.is_positive());
    let mut e = x.bits() as i64 - bits as i64 - 1;
    let mut m = if e >= 0 { x >> e as u32 } else { x << (-e) as u32 };
    if m > (BigInt::from(3) << (bits - 1)) {
        m >>= 1;
        e += 1;
    }
    let unit = one(bits);
    let z = ((&m - &unit) << bits) / (&m + &unit);
    let z2 = mul(&z, &z, bits);
    let mut sum = z.clone();
    let mut term = z;
    let mut k: u64 = 1;
    loop {
        term = mul(&term, &z2, bits);
        if term.is_zero() {
            break;
        }
        k += 2;
        sum += &term / k;
    }
    (sum << 1) + &*ln2(bits) * e
}

/// `e^r` for a modest fixed-point `r` (|r| up to a few units).
pub(crate) fn exp(r: &BigInt, bits: u32) -> BigInt {
    let wb = bits + EXP_HALVINGS + 8;
    let y = (r << (wb - bits)) >> EXP_HALVINGS;
    let mut sum = one(wb);
    let mut term = one(wb);
    let mut k: u64 = 1;
    loop {
        term = mul(&term, &y, wb) / k;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..EXP_HALVINGS {
        sum = mul(&sum, &sum, wb);
    }
    sum >> (wb - bits)
}

/// sin y for |y| ≤ 1.
pub(crate) fn sin_series(y: &BigInt, bits: u32) -> BigInt {
    let y2 = mul(y, y, bits);
    let mut sum = y.clone();
    let mut term = y.clone();
    let mut k: u64 = 1;
    loop {
        term = -(mul(&term, &y2, bits) / ((2 * k) * (2 * k + 1)));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

/// cos y for |y| ≤ 1.
pub(crate) fn cos_series(y: &BigInt, bits: u32) -> BigInt {
    let y2 = mul(y, y, bits);
    let mut sum = one(bits);
    let mut term = one(bits);
    let mut k: u64 = 1;
    loop {
        term = -(mul(&term, &y2, bits) / ((2 * k - 1) * (2 * k)));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

fn bernoulli_table() -> &'static Mutex<Vec<BigRational>> {
    static TABLE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![BigRational::one()]))
}

/// Bernoulli number B_n (with B_1 = −1/2).
pub(crate) fn bernoulli(n: usize) -> BigRational {
    let mut table = bernoulli_table().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= n {
        let m = table.len();
        // sum_{j<m} C(m+1, j) B_j + (m+1) B_m = 0
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        table.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    table[n].clone()
}

thread_local! {
    static STIRLING: RefCell<HashMap<u32, Vec<BigInt>>> = RefCell::new(HashMap::new());
}

/// B_2k / (2k (2k−1)) at the given scale, for k = 1, 2, …
fn stirling_coeff(k: usize, bits: u32) -> BigInt {
    if let Some(v) = STIRLING.with(|s| s.borrow().get(&bits).and_then(|v| v.get(k - 1).cloned())) {
        return v;
    }
    STIRLING.with(|s| {
        let mut s = s.borrow_mut();
        let list = s.entry(bits).or_default();
        while list.len() < k {
            let kk = list.len() + 1;
            let b = bernoulli(2 * kk);
            let denom = b.denom() * BigInt::from(2 * kk * (2 * kk - 1));
            list.push((b.numer() << bits) / denom);
        }
        list[k - 1].clone()
    })
}

const STIRLING_MAX_TERMS: usize = 2000;

/// ln Γ(y) by the Stirling series; `y` must be large enough that the series
/// reaches the fixed-point resolution before it starts to diverge.
pub(crate) fn ln_gamma_stirling(y: &BigInt, bits: u32) -> BigInt {
    let unit = one(bits);
    let half = &unit >> 1;
    let ln_y = ln(y, bits);
    let mut sum = mul(&(y - &half), &ln_y, bits) - y + &*half_ln_2pi(bits);
    let inv = (&unit << bits) / y;
    let inv2 = mul(&inv, &inv, bits);
    let mut pw = inv;
    let mut last = BigInt::zero();
    for k in 1..=STIRLING_MAX_TERMS {
        let term = mul(&stirling_coeff(k, bits), &pw, bits);
        if term.is_zero() || (k > 1 && term.abs() > last) {
            break;
        }
        last = term.abs();
        sum += term;
        pw = mul(&pw, &inv2, bits);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    #[test]
    fn constants_match_reference_digits() {
        let bits = bits_for_digits(50);
        assert_eq!(
            from_fixed(&pi(bits), bits, p(40)).to_string(),
            "3.141592653589793238462643383279502884197"
        );
        assert_eq!(
            from_fixed(&ln2(bits), bits, p(40)).to_string(),
            "0.6931471805599453094172321214581765680755"
        );
        assert_eq!(
            from_fixed(&ln10(bits), bits, p(40)).to_string(),
            "2.302585092994045684017991454684364207601"
        );
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(1).to_string(), "-1/2");
        assert_eq!(bernoulli(2).to_string(), "1/6");
        assert_eq!(bernoulli(3).to_string(), "0");
        assert_eq!(bernoulli(12).to_string(), "-691/2730");
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        let bits = bits_for_digits(45);
        let x = to_fixed(&Real::parse("2.25", p(45)).unwrap(), bits);
        let back = ln(&exp(&x, bits), bits);
        assert_eq!(from_fixed(&back, bits, p(40)).to_string(), "2.25");
        let e = exp(&one(bits), bits);
        assert_eq!(
            from_fixed(&e, bits, p(40)).to_string(),
            "2.718281828459045235360287471352662497757"
        );
    }
}
