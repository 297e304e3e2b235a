//! Special-function values against an independent arbitrary-precision
//! evaluator (mpmath at 60 to 1200 digits), frozen here.

use helixlab::numerics::{cos_r, gamma, sin_pi, sin_r, NumericError, Precision, Real, TRIG_EXPONENT_LIMIT};

fn r(s: &str, d: u32) -> Real {
    Real::parse(s, Precision::new(d).unwrap()).unwrap()
}

#[test]
fn gamma_oracle_values() {
    let cases = [
        ("-2.5", "-0.9453087204829418812256893244486107641587"),
        ("10.3", "716430.6890623752445476296547161644534224"),
        ("0.001", "999.4237724845954661149822012996440004652"),
        ("-4.99", "-0.8478047198470859950185609515052061020734"),
        ("33.25", "628873596537488077339135743201473418.3632"),
    ];
    for (x, want) in cases {
        assert_eq!(gamma(&r(x, 40)).unwrap().to_string(), want, "gamma({x})");
    }
}

#[test]
fn sin_pi_oracle_values() {
    let cases = [
        ("1.234567", "-0.6720057638417538243708469331991401845758"),
        ("-7.77", "0.6613118653236518765686217371023240621958"),
        ("123456.789", "0.6153863701791714901334438463911073633037"),
    ];
    for (x, want) in cases {
        assert_eq!(sin_pi(&r(x, 40)).to_string(), want, "sin_pi({x})");
    }
}

#[test]
fn trig_with_large_arguments() {
    assert_eq!(sin_r(&r("100", 40)).unwrap().to_string(), "-0.506365641109758793656557610459785432065");
    let cases = [
        ("1.2345e10", "-0.981631350096574579049049982824"),
        ("1.2345e100", "0.694922883669370500736645930804"),
        ("1.2345e1000", "0.507116007422338709716125045313"),
    ];
    for (x, want) in cases {
        assert_eq!(cos_r(&r(x, 30)).unwrap().to_string(), want, "cos({x})");
    }
    let huge = r(&format!("1e{TRIG_EXPONENT_LIMIT}"), 30);
    assert_eq!(cos_r(&huge), Err(NumericError::ArgumentTooLarge(TRIG_EXPONENT_LIMIT)));
    assert!(sin_r(&-&huge).is_err());
    assert!(cos_r(&r(&format!("9.9e{}", TRIG_EXPONENT_LIMIT - 1), 20)).is_ok());
}
