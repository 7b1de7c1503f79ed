use crate::error::{Error, Result};
use num_complex::Complex64;
use rug::{Float, Integer};
use std::f64::consts::PI;

/// c_L = Li_L(1/2) = sum_{n>=1} 2^{-n} n^{-L}.
pub fn polylog_half(l: u32, prec: u32) -> Float {
    assert!(l >= 1, "polylog_half needs L >= 1");
    polylog_half_table(l as usize, prec).pop().unwrap()
}

/// [c_1, ..., c_{max}] in one pass over n.
pub fn polylog_half_table(max: usize, prec: u32) -> Vec<Float> {
    let wp = prec + 16;
    let mut c: Vec<Float> = (0..max).map(|_| Float::new(wp)).collect();
    let stop = -(prec as i32) - 8;
    let mut n: u32 = 1;
    loop {
        // 2^{-n} n^{-L} is below the threshold for every L once 2^{-n} is
        if -(n as i32) < stop {
            break;
        }
        let mut t = Float::with_val(wp, 1) >> n;
        for ck in c.iter_mut() {
            t /= n;
            if t.is_zero() || t.get_exp().is_none_or(|e| e < stop) {
                break;
            }
            *ck += &t;
        }
        n += 1;
    }
    c.into_iter().map(|x| Float::with_val(prec, x)).collect()
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// Ordered Bell number B_L.
pub fn fubini(l: usize) -> Integer {
    fubini_table(l).pop().unwrap()
}

/// [B_0, ..., B_max] from B_L = sum_{s<L} C(L,s) B_s.
pub fn fubini_table(max: usize) -> Vec<Integer> {
    let mut b: Vec<Integer> = vec![Integer::from(1)];
    for l in 1..=max {
        let mut acc = Integer::new();
        for (s, bs) in b.iter().enumerate() {
            acc += binomial(l as u32, s as u32) * bs;
        }
        b.push(acc);
    }
    b
}

/// J_0 or J_1 at x >= 0 from the ascending series.
///
/// The largest term sets the cancellation; if it exceeds prec/2 bits the call
/// fails with `PrecisionLoss` and the caller should raise `prec`.
/// J_ν(x) in double precision from the trapezoid rule on
/// (1/2π)∫₀^{2π} cos(ντ - x sin τ) dτ, which is exact up to J_{M±ν}(x) terms.
pub fn bessel_j_f64(order: u32, x: f64) -> f64 {
    let m = 40 + 2 * x.abs().ceil() as usize + order as usize;
    let h = std::f64::consts::TAU / m as f64;
    let nu = order as f64;
    let s: f64 = (0..m)
        .map(|k| {
            let t = k as f64 * h;
            (nu * t - x * t.sin()).cos()
        })
        .sum();
    s / m as f64
}

pub fn bessel_j(order: u32, x: &Float, prec: u32) -> Result<Float> {
    if order > 1 {
        return Err(Error::Invalid(format!("bessel order {order} not supported")));
    }
    if *x < 0 {
        return Err(Error::Domain("bessel_j needs x >= 0".into()));
    }
    if x.is_zero() {
        return Ok(Float::with_val(prec, if order == 0 { 1 } else { 0 }));
    }
    let xf = x.to_f64();
    let h = xf / 2.0;
    // log2 of the largest term |(x/2)^{2k+nu}/(k!(k+nu)!)|
    let mut lt = (order as f64) * h.log2();
    let mut best = lt;
    let mut k = 0.0;
    while k < 4.0 * h + 10.0 {
        lt += 2.0 * h.log2() - (k + 1.0f64).log2() - (k + 1.0 + order as f64).log2();
        best = best.max(lt);
        k += 1.0;
    }
    let cancel = best.max(0.0).ceil() as u32;
    if cancel > prec / 2 {
        return Err(Error::PrecisionLoss(format!("J_{order}({xf}) loses {cancel} bits, more than prec/2 = {}", prec / 2)));
    }
    let wp = prec + cancel + 16;
    let half = Float::with_val(wp, x) / 2u32;
    let q = Float::with_val(wp, half.square_ref());
    let mut term = if order == 0 { Float::with_val(wp, 1) } else { half.clone() };
    let mut sum = term.clone();
    let stop = -(prec as i32) - 8;
    let mut k: u32 = 0;
    loop {
        k += 1;
        term *= &q;
        term /= k;
        term /= k + order;
        term = -term;
        sum += &term;
        if term.is_zero() || (term.get_exp().unwrap() < stop && k as f64 > h) {
            break;
        }
    }
    Ok(Float::with_val(prec, sum))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k}/(2k)! for k = 1..=20
const BERN_OVER_FACT: [f64; 20] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_768e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_468e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_229e-18,
    -1.395_446_468_581_252_3e-19,
    3.534_707_039_629_467e-21,
    -8.953_517_427_037_546e-23,
    2.267_952_452_337_683e-24,
    -5.744_790_668_872_202e-26,
    1.455_172_475_614_865e-27,
    -3.685_994_940_665_31e-29,
    9.336_734_257_095_045e-31,
    -2.365_022_415_700_63e-32,
];

fn gamma_c(s: Complex64) -> Complex64 {
    if s.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi / ((pi * s).sin() * gamma_c(Complex64::new(1.0, 0.0) - s));
    }
    let z = s - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

fn zeta_em(s: Complex64) -> Complex64 {
    let n = 40.0 + s.norm().ceil();
    let nn = n as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..nn {
        sum += Complex64::new(k as f64, 0.0).powc(-s);
    }
    let nc = Complex64::new(n, 0.0);
    let n_s = nc.powc(-s);
    sum += nc * n_s / (s - 1.0) + 0.5 * n_s;
    // rising factorial s(s+1)...(s+2k-2) times N^{-s-2k+1}
    let mut fac = s * n_s / nc;
    for (k, b) in BERN_OVER_FACT.iter().enumerate() {
        let t = *b * fac;
        sum += t;
        if t.norm() < 1e-17 * sum.norm() {
            break;
        }
        let k2 = 2.0 * (k as f64 + 1.0);
        fac = fac * (s + k2 - 1.0) * (s + k2) / (nc * nc);
    }
    sum
}

fn zeta_c(s: Complex64) -> Complex64 {
    if s.re < 0.0 {
        let one = Complex64::new(1.0, 0.0);
        let two = Complex64::new(2.0, 0.0);
        let pi = Complex64::new(PI, 0.0);
        return two.powc(s) * pi.powc(s - 1.0) * (pi * s / 2.0).sin() * gamma_c(one - s) * zeta_em(one - s);
    }
    zeta_em(s)
}

const POLE_EPS: f64 = 1e-8;

/// Riemann zeta in double precision (Euler-Maclaurin, functional equation for Re s < 0).
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() < POLE_EPS {
        return Err(Error::Pole(format!("zeta at {s}")));
    }
    Ok(zeta_c(s))
}

/// Gamma in double precision (Lanczos with reflection).
pub fn gamma(s: Complex64) -> Result<Complex64> {
    if s.re < POLE_EPS {
        let k = (-s.re).round();
        if (s + k).norm() < POLE_EPS {
            return Err(Error::Pole(format!("gamma at {s}")));
        }
    }
    Ok(gamma_c(s))
}

/// (zeta(s), Gamma(s)) in double precision, relative error about 1e-13 for |s| <= 20.
pub fn zeta_and_gamma(s: Complex64) -> Result<(Complex64, Complex64)> {
    Ok((zeta(s)?, gamma(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn close(a: &Float, b: &Float, bits: i32) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        d.is_zero() || d.get_exp().unwrap() < -bits
    }

    #[test]
    fn polylog_values() {
        let p = 192;
        let l2 = Float::with_val(p, Constant::Log2);
        assert!(close(&polylog_half(1, p), &l2, 188));
        let pi = Float::with_val(p, Constant::Pi);
        let c2 = Float::with_val(p, pi.square_ref()) / 12 - Float::with_val(p, l2.square_ref()) / 2;
        assert!(close(&polylog_half(2, p), &c2, 188));
        let c60 = polylog_half(60, p);
        // 1/2 + 2^{-2} 2^{-60} + 2^{-3} 3^{-60} + ...
        let want = Float::with_val(p, 0.5) + (Float::with_val(p, 1) >> 62u32);
        assert!(close(&c60, &want, 96));
        assert!(!close(&c60, &want, 99));
    }

    #[test]
    fn polylog_decreasing() {
        let c = polylog_half_table(80, 128);
        for w in c.windows(2) {
            assert!(w[1] < w[0]);
            assert!(w[1] > 0.5);
        }
    }

    #[test]
    fn fubini_values() {
        assert_eq!(fubini(0), 1);
        assert_eq!(fubini(3), 13);
        assert_eq!(fubini(5), 541);
    }

    #[test]
    fn fubini_generating_identity() {
        // sum B_L t^L/L! times (2 - e^t) = 1 as truncated series, in exact rationals
        use rug::Rational;
        let n = 20;
        let b = fubini_table(n);
        let mut fact = vec![Integer::from(1)];
        for k in 1..=n {
            let f = Integer::from(&fact[k - 1] * k as u32);
            fact.push(f);
        }
        let bser: Vec<Rational> = (0..=n).map(|l| Rational::from((b[l].clone(), fact[l].clone()))).collect();
        let mut g: Vec<Rational> = (0..=n).map(|l| -Rational::from((1, fact[l].clone()))).collect();
        g[0] += 2;
        for k in 0..=n {
            let mut acc = Rational::new();
            for j in 0..=k {
                acc += Rational::from(&bser[j] * &g[k - j]);
            }
            assert_eq!(acc, if k == 0 { 1 } else { 0 });
        }
    }

    #[test]
    fn bessel_basics() {
        let p = 128;
        assert_eq!(bessel_j(0, &Float::new(p), p).unwrap(), 1);
        assert_eq!(bessel_j(1, &Float::new(p), p).unwrap(), 0);
        // first zero of J0 by bisection on the series
        let (mut lo, mut hi) = (Float::with_val(p, 2), Float::with_val(p, 3));
        for _ in 0..100 {
            let mid = Float::with_val(p, &lo + &hi) / 2;
            if bessel_j(0, &mid, p).unwrap() > 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo.to_f64() - 2.404_825_557_695_773).abs() < 1e-14);
        // J1 at 1 against a known value
        let j1 = bessel_j(1, &Float::with_val(p, 1), p).unwrap();
        assert!((j1.to_f64() - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn bessel_derivative_relation() {
        let p = 160;
        let h = Float::with_val(p, 1e-12);
        for k in 0..=20 {
            let x = Float::with_val(p, k as f64 * 0.5 + 0.01);
            let xp = Float::with_val(p, &x + &h);
            let xm = Float::with_val(p, &x - &h);
            let d = (bessel_j(0, &xp, p).unwrap() - bessel_j(0, &xm, p).unwrap()) / Float::with_val(p, &h * 2u32);
            let r = d + bessel_j(1, &x, p).unwrap();
            assert!(r.abs() < 1e-20, "x = {x}");
        }
    }

    #[test]
    fn bessel_f64_matches_series() {
        let p = 512;
        for k in 0..40 {
            let x = k as f64 * 2.3 + 0.1;
            for order in 0..=1 {
                let want = bessel_j(order, &Float::with_val(p, x), p).unwrap().to_f64();
                let got = bessel_j_f64(order, x);
                assert!((got - want).abs() < 1e-14 * (1.0 + x), "J{order}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn bessel_precision_guard() {
        assert!(matches!(bessel_j(0, &Float::with_val(64, 200), 64), Err(Error::PrecisionLoss(_))));
        assert!(bessel_j(0, &Float::with_val(512, 100), 512).is_ok());
    }

    #[test]
    fn zeta_gamma_classical() {
        let (z2, _) = zeta_and_gamma(Complex64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-13);
        let (_, g) = zeta_and_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-13);
        let zm1 = zeta(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-13);
        let (_, g5) = zeta_and_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-11);
        // zeta(1/2 + 14.134725i) is near the first nontrivial zero
        let (z, _) = zeta_and_gamma(Complex64::new(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.norm() < 1e-10);
    }

    #[test]
    fn zeta_gamma_poles() {
        assert!(zeta_and_gamma(Complex64::new(1.0, 0.0)).is_err());
        assert!(zeta_and_gamma(Complex64::new(-2.0, 0.0)).is_err());
        assert!(zeta_and_gamma(Complex64::new(0.0, 0.0)).is_err());
    }
}
