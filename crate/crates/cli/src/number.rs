//! Parsing of numeric arguments and deterministic decimal formatting.

use num_complex::Complex64;
use rug::{Float, Integer, Rational};

/// A parsed real argument: exact when given as an integer, fraction or decimal.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Approx(Float),
}

impl Number {
    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Number::Exact(r) => Float::with_val(prec, r),
            Number::Approx(x) => Float::with_val(prec, x),
        }
    }
}

/// Decimal digits carried by `prec` bits.
pub fn digits_for(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

/// Exact value of a decimal literal such as "-1.25e-3", or of "p/q".
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: Integer = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: Integer = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::from((n, d)));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| format!("bad exponent in {s:?}"))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.trim_start_matches(['+', '-']).is_empty() || frac_part.contains(['+', '-']) {
        return Err(format!("not a number: {s:?}"));
    }
    let n: Integer = digits.parse().map_err(|_| format!("not a number: {s:?}"))?;
    let shift = exp - frac_part.len() as i32;
    let ten = |k: i32| Integer::from(Integer::u_pow_u(10, k.unsigned_abs()));
    Ok(if shift >= 0 { Rational::from(n * ten(shift)) } else { Rational::from((n, ten(shift))) })
}

/// A real argument: "p/q", a decimal, or one of golden, phi, sqrt2, pi, e.
pub fn parse_real(s: &str, prec: u32) -> Result<Number, String> {
    let five = Float::with_val(prec, 5);
    let named = match s.trim() {
        "golden" => Some((five.sqrt() - 1u32) / 2u32),
        "phi" => Some((five.sqrt() + 1u32) / 2u32),
        "sqrt2" => Some(Float::with_val(prec, 2).sqrt()),
        "pi" => Some(Float::with_val(prec, rug::float::Constant::Pi)),
        "e" => Some(Float::with_val(prec, 1).exp()),
        _ => None,
    };
    match named {
        Some(x) => Ok(Number::Approx(x)),
        None => parse_rational(s).map(Number::Exact),
    }
}

/// A complex argument "a+bi", "a-bi", "bi", "a" or "i", with exact parts.
pub fn parse_complex(s: &str) -> Result<(Rational, Rational), String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok((parse_rational(&t)?, Rational::new()));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let b = body.as_bytes();
    let split = (1..b.len()).rev().find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_rational(&body[..k])?, &body[k..]),
        None => (Rational::new(), body),
    };
    let im = match im {
        "" | "+" => Rational::from(1),
        "-" => Rational::from(-1),
        other => parse_rational(other)?,
    };
    Ok((re, im))
}

pub fn complex_f64(z: &(Rational, Rational)) -> Complex64 {
    Complex64::new(z.0.to_f64(), z.1.to_f64())
}

/// `x` rounded to `digits` significant digits, trailing zeros removed.
pub fn real(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, s, exp) = x.to_sign_string_exp(10, Some(digits.max(1)));
    let s = s.trim_end_matches('0');
    let exp = exp.unwrap_or(0);
    let sign = if neg { "-" } else { "" };
    let body = if (-5..=21).contains(&exp) {
        let len = s.len() as i32;
        if exp <= 0 {
            format!("0.{}{s}", "0".repeat((-exp) as usize))
        } else if exp >= len {
            format!("{s}{}", "0".repeat((exp - len) as usize))
        } else {
            format!("{}.{}", &s[..exp as usize], &s[exp as usize..])
        }
    } else if s.len() == 1 {
        format!("{s}e{}", exp - 1)
    } else {
        format!("{}.{}e{}", &s[..1], &s[1..], exp - 1)
    };
    format!("{sign}{body}")
}

/// A double in short scientific notation, for error estimates and residuals.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn complex(re: &str, im: &str) -> String {
    match im.strip_prefix('-') {
        Some(abs) => format!("{re}-{abs}i"),
        None => format!("{re}+{im}i"),
    }
}

pub fn complex64(z: Complex64) -> String {
    complex(&format!("{}", z.re), &format!("{}", z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.1").unwrap(), Rational::from((1, 10)));
        assert_eq!(parse_rational("-1.25e-3").unwrap(), Rational::from((-1, 800)));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational("42").unwrap(), Rational::from(42));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn complex_forms() {
        let q = |n: i64, d: u64| Rational::from((n, d));
        assert_eq!(parse_complex("-1+2i").unwrap(), (q(-1, 1), q(2, 1)));
        assert_eq!(parse_complex("0.3 - 1.5i").unwrap(), (q(3, 10), q(-3, 2)));
        assert_eq!(parse_complex("3i").unwrap(), (q(0, 1), q(3, 1)));
        assert_eq!(parse_complex("-i").unwrap(), (q(0, 1), q(-1, 1)));
        assert_eq!(parse_complex("2-i").unwrap(), (q(2, 1), q(-1, 1)));
        assert_eq!(parse_complex("-5").unwrap(), (q(-5, 1), q(0, 1)));
        assert_eq!(parse_complex("1e-1+1e+1i").unwrap(), (q(1, 10), q(10, 1)));
    }

    #[test]
    fn named_constants() {
        let Number::Approx(g) = parse_real("golden", 128).unwrap() else { panic!() };
        assert!((g.to_f64() - 0.6180339887498949).abs() < 1e-15);
        assert!(matches!(parse_real("1/2", 128).unwrap(), Number::Exact(_)));
    }

    #[test]
    fn formatting() {
        let f = |x: f64| Float::with_val(64, x);
        assert_eq!(real(&f(0.5), 20), "0.5");
        assert_eq!(real(&f(-1.5), 20), "-1.5");
        assert_eq!(real(&f(107.25), 20), "107.25");
        assert_eq!(real(&f(1e-30), 5), "1e-30");
        assert_eq!(real(&f(0.000125), 15), "0.000125");
        assert_eq!(real(&f(2.0f64.powi(60)), 30), "1152921504606846976");
        assert_eq!(real(&f(2.0f64.powi(70)), 30), "1.180591620717411303424e21");
        assert_eq!(real(&(Float::with_val(64, 1) / 3u32), 6), "0.333333");
        assert_eq!(complex("1", "-2"), "1-2i");
        assert_eq!(digits_for(192), 57);
    }
}
