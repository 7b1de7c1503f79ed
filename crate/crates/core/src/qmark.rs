//! Minkowski's question mark function ?(x) and the distribution F(x) = ?(x/(x+1)).

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::{Float, Integer, Rational};

/// Finite continued fraction [a0; a1, ..., ar].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub quotients: Vec<Integer>,
}

impl ContinuedFraction {
    pub fn new(quotients: Vec<Integer>) -> Result<Self> {
        if quotients.is_empty() || quotients[0] < 0 || quotients[1..].iter().any(|a| *a < 1) {
            return Err(Error::Invalid("partial quotients must be a0 >= 0, ai >= 1".into()));
        }
        Ok(ContinuedFraction { quotients })
    }

    pub fn from_u64(q: &[u64]) -> Result<Self> {
        Self::new(q.iter().map(|&a| Integer::from(a)).collect())
    }

    /// Canonical form: last quotient >= 2 when r >= 1.
    pub fn canonical(mut self) -> Self {
        while self.quotients.len() > 1 && *self.quotients.last().unwrap() == 1 {
            self.quotients.pop();
            *self.quotients.last_mut().unwrap() += 1;
        }
        self
    }

    pub fn digit_sum(&self) -> u64 {
        self.quotients.iter().map(|a| a.to_u64().unwrap_or(u64::MAX)).fold(0u64, u64::saturating_add)
    }

    pub fn to_rational(&self) -> Rational {
        let mut it = self.quotients.iter().rev();
        let mut x = Rational::from(it.next().unwrap());
        for a in it {
            x = Rational::from(x.recip_ref()) + a;
        }
        x
    }
}

impl std::fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}", self.quotients[0])?;
        for (i, a) in self.quotients[1..].iter().enumerate() {
            write!(f, "{}{a}", if i == 0 { ";" } else { "," })?;
        }
        write!(f, "]")
    }
}

/// A dyadic rational numerator / 2^exponent in [0, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicValue {
    pub numerator: Integer,
    pub exponent: u64,
}

impl DyadicValue {
    fn normalized(mut numerator: Integer, mut exponent: u64) -> Self {
        if numerator == 0 {
            return DyadicValue { numerator, exponent: 0 };
        }
        let tz = numerator.find_one(0).unwrap() as u64;
        let k = tz.min(exponent);
        numerator >>= k as u32;
        exponent -= k;
        DyadicValue { numerator, exponent }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from((self.numerator.clone(), Integer::from(1) << self.exponent as u32))
    }

    pub fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.numerator) >> self.exponent as u32
    }
}

/// Canonical continued fraction of x >= 0 by the Euclidean algorithm.
pub fn cf_of_rational(x: &Rational) -> ContinuedFraction {
    assert!(*x >= 0, "cf_of_rational needs x >= 0");
    let (mut p, mut q) = (x.numer().clone(), x.denom().clone());
    let mut out = Vec::new();
    while q != 0 {
        let (a, r) = p.div_rem_floor(q.clone());
        out.push(a);
        p = q;
        q = r;
    }
    ContinuedFraction { quotients: out }.canonical()
}

// Partial quotients of x, lazily.
struct Digits {
    p: Integer,
    q: Integer,
}

impl Iterator for Digits {
    type Item = Integer;
    fn next(&mut self) -> Option<Integer> {
        if self.q == 0 {
            return None;
        }
        let (a, r) = Integer::from(&self.p).div_rem_floor(self.q.clone());
        self.p = std::mem::replace(&mut self.q, r);
        Some(a)
    }
}

/// F(x) from its digits, keeping the terms with digit sum <= cap.
/// The omitted tail is below 2^{-cap}.
fn f_from_digits(digits: impl Iterator<Item = Integer>, cap: u64) -> (Rational, bool) {
    let mut terms: Vec<u64> = Vec::new();
    let mut s = Integer::new();
    let mut complete = true;
    for a in digits {
        s += a;
        match s.to_u64() {
            Some(v) if v <= cap => terms.push(v),
            _ => {
                complete = false;
                break;
            }
        }
    }
    // 1 - 2^{-s0} + 2^{-s1} - ...
    let e = terms.last().copied().unwrap_or(0);
    let mut num = Integer::from(1) << e as u32;
    for (k, sk) in terms.iter().enumerate() {
        let t = Integer::from(1) << (e - sk) as u32;
        if k % 2 == 0 {
            num -= t;
        } else {
            num += t;
        }
    }
    (Rational::from((num, Integer::from(1) << e as u32)), complete)
}

/// Exact F(x) for rational x >= 0.
pub fn f_exact(x: &Rational) -> Result<DyadicValue> {
    if *x < 0 {
        return Err(Error::Domain("F needs x >= 0".into()));
    }
    let cf = cf_of_rational(x);
    if cf.digit_sum() > 1 << 32 {
        return Err(Error::SizeLimit(format!("digit sum of {x} too large for an exact dyadic")));
    }
    let (v, _) = f_from_digits(cf.quotients.into_iter(), u64::MAX);
    let e = v.denom().significant_bits() as u64 - 1;
    Ok(DyadicValue::normalized(v.numer().clone(), e))
}

/// F(x) with |error| <= 2^{-prec}, treating x as known to its own precision.
///
/// The exact value of the float is widened by its relative rounding error and F is
/// evaluated exactly at both ends; the call fails if F moves by more than 2^{-prec}
/// across that interval.
pub fn f_eval(x: &Float, prec: u32) -> Result<Float> {
    let xr = x.to_rational().ok_or_else(|| Error::Domain("x must be finite".into()))?;
    if xr < 0 {
        return Err(Error::Domain("F needs x >= 0".into()));
    }
    if xr == 0 {
        return Ok(Float::new(prec));
    }
    let eps = Rational::from(xr.abs_ref()) >> (x.prec() - 1);
    let lo = Rational::from(&xr - &eps);
    let hi = Rational::from(&xr + &eps);
    let lo = if lo < 0 { Rational::new() } else { lo };
    let cap = prec as u64 + 16;
    let flo = f_from_digits(Digits { p: lo.numer().clone(), q: lo.denom().clone() }, cap).0;
    let fhi = f_from_digits(Digits { p: hi.numer().clone(), q: hi.denom().clone() }, cap).0;
    let width = Rational::from(&fhi - &flo).abs();
    let limit = Rational::from((1, Integer::from(1) << prec));
    if width > limit {
        return Err(Error::CfInstability(format!("x carries {} bits; raise its precision to reach {prec} bits of F", x.prec())));
    }
    Ok(Float::with_val(prec, (flo + fhi) / 2u32))
}

/// F(x) for an exactly known x, to 2^{-prec}.
pub fn f_eval_rational(x: &Rational, prec: u32) -> Result<Float> {
    if *x < 0 {
        return Err(Error::Domain("F needs x >= 0".into()));
    }
    let (v, _) = f_from_digits(Digits { p: x.numer().clone(), q: x.denom().clone() }, prec as u64 + 16);
    Ok(Float::with_val(prec, v))
}

/// ?(x) = 2F(x) on [0, 1].
pub fn qmark_eval(x: &Float, prec: u32) -> Result<Float> {
    if *x < 0 || *x > 1 {
        return Err(Error::Domain("?(x) is evaluated on [0, 1]".into()));
    }
    Ok(f_eval(x, prec + 1)? * 2u32)
}

/// Exact ?(x) for rational x in [0, 1].
pub fn qmark_exact(x: &Rational) -> Result<DyadicValue> {
    if *x < 0 || *x > 1 {
        return Err(Error::Domain("?(x) is evaluated on [0, 1]".into()));
    }
    let f = f_exact(x)?;
    if f.numerator == 0 {
        return Ok(f);
    }
    if f.exponent == 0 {
        return Ok(DyadicValue { numerator: f.numerator << 1u32, exponent: 0 });
    }
    Ok(DyadicValue::normalized(f.numerator, f.exponent - 1))
}

/// ?^{-1}(y) for an exact dyadic y in [0, 1], by run-length decoding of its bits.
pub fn qmark_inverse_dyadic(y: &Rational) -> Result<Rational> {
    if *y < 0 || *y > 1 {
        return Err(Error::Domain("?^{-1} is evaluated on [0, 1]".into()));
    }
    let den = y.denom();
    if !den.is_power_of_two() {
        return Err(Error::Invalid(format!("{y} is not dyadic")));
    }
    if *y == 0 || *y == 1 {
        return Ok(y.clone());
    }
    let bits = den.significant_bits() - 1;
    let num = y.numer();
    // bit j (1-based after the binary point) is bit (bits - j) of the numerator
    let bit = |j: u32| num.get_bit(bits - j);
    let mut runs: Vec<u32> = Vec::new();
    let mut current = false;
    let mut len = 0u32;
    for j in 1..=bits {
        if bit(j) == current {
            len += 1;
        } else {
            runs.push(len);
            current = !current;
            len = 1;
        }
    }
    runs.push(len);
    // runs alternate zeros, ones, zeros, ... and end on ones
    let mut q = vec![Integer::new()];
    q.push(Integer::from(runs[0] + 1));
    q.extend(runs[1..].iter().map(|&r| Integer::from(r)));
    Ok(ContinuedFraction { quotients: q }.to_rational())
}

/// ?^{-1}(y) with |?(x) - y| <= 2^{-prec}; y is read as the exact dyadic it stores.
pub fn qmark_inverse(y: &Float, prec: u32) -> Result<Float> {
    let yr = y.to_rational().ok_or_else(|| Error::Domain("y must be finite".into()))?;
    Ok(Float::with_val(prec, qmark_inverse_dyadic(&yr)?))
}

// Bisection for ?(x) = x on (a, b) with g(a), g(b) of opposite signs. All points are
// dyadic, so g is evaluated exactly.
fn bisect_fixed(a: Rational, b: Rational, bits: u32) -> Result<Rational> {
    let g = |x: &Rational| -> Result<std::cmp::Ordering> { Ok(qmark_exact(x)?.to_rational().cmp(x)) };
    let (mut lo, mut hi) = (a, b);
    let glo = g(&lo)?;
    if glo == g(&hi)? {
        return Err(Error::NoConvergence("fixed point not bracketed".into()));
    }
    for _ in 0..bits {
        let mid = Rational::from(&lo + &hi) / 2u32;
        let gm = g(&mid)?;
        if gm == std::cmp::Ordering::Equal {
            return Ok(mid);
        }
        if gm == glo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / 2u32)
}

/// The two solutions of ?(x) = x in (0, 1) other than 0, 1/2, 1.
pub fn fixed_points(prec: u32) -> Result<Vec<Float>> {
    let mut out = Vec::new();
    for (a, b) in [(1i64, 31i64), (33, 63)] {
        // scan a 1/64 grid inside (0, 1/2) or (1/2, 1) for the sign change
        let g = |k: i64| -> Result<std::cmp::Ordering> {
            let x = Rational::from((k, 64));
            Ok(qmark_exact(&x)?.to_rational().cmp(&x))
        };
        let mut found = None;
        for k in a..b {
            if g(k)? != g(k + 1)? {
                found = Some(k);
                break;
            }
        }
        let k = found.ok_or_else(|| Error::NoConvergence("no sign change of ?(x) - x".into()))?;
        let r = bisect_fixed(Rational::from((k, 64)), Rational::from((k + 1, 64)), prec + 8)?;
        out.push(Float::with_val(prec, r));
    }
    Ok(out)
}

/// Residuals of 2F(x) = F(x-1) + 1 (x >= 1) or 2F(x) = F(x/(1-x)) (0 < x < 1), and of
/// F(x+n) = 1 - 2^{-n} + 2^{-n} F(x).
#[derive(Clone, Debug)]
pub struct DistributionResiduals {
    pub functional: Float,
    pub shift: Float,
}

pub fn check_distribution_eq(x: &Rational, n: u32, prec: u32) -> Result<DistributionResiduals> {
    if *x <= 0 {
        return Err(Error::Domain("check needs x > 0".into()));
    }
    let f = |t: &Rational| f_eval_rational(t, prec);
    let fx = f(x)?;
    let functional = if *x >= 1 {
        Float::with_val(prec, &fx * 2u32) - f(&Rational::from(x - 1u32))? - 1u32
    } else if *x < 1 {
        let y = x / (1 - x.clone());
        Float::with_val(prec, &fx * 2u32) - f(&y)?
    } else {
        Float::new(prec)
    };
    let lhs = f(&Rational::from(x + n))?;
    let p = Float::with_val(prec, 1) >> n;
    let rhs = Float::with_val(prec, 1) - &p + Float::with_val(prec, &p * &fx);
    Ok(DistributionResiduals { functional: functional.abs(), shift: (lhs - rhs).abs() })
}

/// 2^{-n} Σ_k ω(?^{-1}((2k+1)/2^{n+1})).
pub fn dyadic_midpoint_quadrature(omega: &dyn Fn(&Float) -> Float, n: u32, prec: u32) -> Float {
    let mut acc = Float::new(prec + 16);
    for_each_midpoint(n, &mut |a, b| acc += omega(&(Float::with_val(prec, a) / b)));
    Float::with_val(prec, acc >> n)
}

/// Double-precision variant of `dyadic_midpoint_quadrature` with pairwise summation.
pub fn dyadic_midpoint_quadrature_f64(omega: &dyn Fn(f64) -> f64, n: u32) -> f64 {
    fn rec(omega: &dyn Fn(f64) -> f64, l: (u64, u64), r: (u64, u64), depth: u32) -> f64 {
        let m = (l.0 + r.0, l.1 + r.1);
        if depth == 0 {
            return omega(m.0 as f64 / m.1 as f64);
        }
        rec(omega, l, m, depth - 1) + rec(omega, m, r, depth - 1)
    }
    assert!(n <= 60, "n too large");
    rec(omega, (0, 1), (1, 1), n) / (1u64 << n) as f64
}

/// Calls f(a, b) for the points a/b = ?^{-1}((2k+1)/2^{n+1}) in increasing order.
/// These are the Stern-Brocot mediants at depth n+1 inside [0, 1].
pub fn for_each_midpoint(n: u32, f: &mut dyn FnMut(u64, u64)) {
    fn rec(f: &mut dyn FnMut(u64, u64), l: (u64, u64), r: (u64, u64), depth: u32) {
        let m = (l.0 + r.0, l.1 + r.1);
        if depth == 0 {
            f(m.0, m.1);
            return;
        }
        rec(f, l, m, depth - 1);
        rec(f, m, r, depth - 1);
    }
    assert!(n <= 60, "n too large");
    rec(f, (0, 1), (1, 1), n);
}

/// log 2 / (2 log γ), γ the golden ratio.
pub fn salem_exponent(prec: u32) -> Float {
    let wp = prec + 16;
    let gamma = (Float::with_val(wp, 5).sqrt() + 1u32) / 2u32;
    Float::with_val(prec, Float::with_val(wp, Constant::Log2) / (gamma.ln() * 2u32))
}

pub fn golden_ratio(prec: u32) -> Float {
    (Float::with_val(prec + 8, 5).sqrt() + 1u32) / 2u32
}
