//! The dyadic period function G(z) = Σ_{L>=1} m_L z^{L-1} = ∫₀¹ x/(1-xz) d?(x):
//! three evaluation routes, the three-term functional equations and the
//! Eisenstein series G₁.

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numerics::{ln2, pi, BigComplex};
use num_complex::Complex64;
use rug::Float;
use std::f64::consts::PI;
use std::fmt;

/// Route used to evaluate G.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    PowerSeries,
    RationalSeries,
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::PowerSeries => "power-series",
            Method::RationalSeries => "rational-series",
            Method::Quadrature => "quadrature",
        })
    }
}

/// A value of G with an error bound.
#[derive(Clone, Debug)]
pub struct PeriodEvaluation {
    pub z: BigComplex,
    pub value: BigComplex,
    pub method: Method,
    pub err: Float,
}

/// Disk on which the automatic route trusts the power series. It must exceed
/// the modulus 0.618 of the attracting fixed point of w ↦ 1/(w - 1).
pub const SERIES_RADIUS: f64 = 2.0 / 3.0;

/// The truncated moments err on the same side, so the series is far more
/// accurate at Re z <= 0 where the terms alternate; the automatic route sends
/// Re z > 0 through the rational series instead.
fn series_ok(z: &BigComplex) -> bool {
    z.re <= 0 && z.abs().to_f64() <= SERIES_RADIUS
}

/// Distance to the cut (1, ∞) below which quadrature warns.
pub const CUT_WARNING: f64 = 1e-3;

fn work_prec(table: &MomentTable) -> u32 {
    table.prec + 32
}

fn err_float(x: f64) -> Float {
    Float::with_val(53, x)
}

/// Σ_{L>N} m_L, bounded by M₁ - Σ_{L<=N} m_L = 3/2 - Σ m_L.
fn series_tail(table: &MomentTable) -> f64 {
    let mut s = Float::with_val(work_prec(table), 1.5);
    for m in &table.m[1..] {
        s -= m;
    }
    s.to_f64().max(0.0)
}

/// Horner sum of Σ_{L=1}^{N} m_L z^{L-1} and its bound from err_L and the tail.
fn power_sum(table: &MomentTable, z: &BigComplex, wp: u32) -> (BigComplex, f64) {
    let n = table.order;
    let mut acc = BigComplex::zero(wp);
    for l in (1..=n).rev() {
        acc = acc.mul(z).add_real(&Float::with_val(wp, &table.m[l]));
    }
    let r = z.abs().to_f64();
    let mut bound = 0.0;
    let mut rp = 1.0;
    for l in 1..=n {
        bound += table.err[l].to_f64() * rp;
        rp *= r;
    }
    bound += rp * series_tail(table);
    (acc, bound)
}

/// G(z) by its power series, |z| <= 1.
pub fn g_power_series(z: &BigComplex, table: &MomentTable) -> Result<PeriodEvaluation> {
    let wp = work_prec(table);
    if z.abs().to_f64() > 1.0 {
        return Err(Error::Domain(format!("power series of G diverges at |z| > 1, got {z}")));
    }
    let (value, bound) = power_sum(table, &at(z, wp), wp);
    Ok(PeriodEvaluation { z: z.clone(), value, method: Method::PowerSeries, err: err_float(bound) })
}

fn at(z: &BigComplex, wp: u32) -> BigComplex {
    BigComplex::new(Float::with_val(wp, &z.re), Float::with_val(wp, &z.im))
}

/// Terms of -G(z) = Σ 2^{-n} [(z-n)^{-1} + (z-n)^{-2} G(1/(z-n))] until 2^{-n}
/// drops below 2^{-wp}; `inner` evaluates G at 1/(z-n) with a bound.
fn rational_sum(z: &BigComplex, wp: u32, inner: &mut dyn FnMut(&BigComplex) -> Result<(BigComplex, f64)>) -> Result<(BigComplex, f64)> {
    let mut acc = BigComplex::zero(wp);
    let mut bound = 0.0;
    let mut n = 1u32;
    loop {
        let w = z.add_real(&Float::with_val(wp, -(n as i64))).recip();
        let (g, gb) = inner(&w)?;
        let weight = Float::with_val(wp, 1) >> n;
        let w2 = w.square();
        let wa = w.abs().to_f64();
        acc = acc.add(&w.add(&w2.mul(&g)).scale(&weight));
        bound += 0.5f64.powi(n as i32) * wa * wa * gb;
        if n >= wp {
            // each further term is at most 2^{-n}(1/n + 3/(2n²))
            bound += 2.0 * 0.5f64.powi(n as i32) * 2.5;
            break;
        }
        n += 1;
    }
    Ok((acc.neg(), bound))
}

/// G(z) for Re z <= 0 by the rational series with inner values from the power
/// series (|1/(z-n)| <= 1 there).
pub fn g_rational_series(z: &BigComplex, table: &MomentTable) -> Result<PeriodEvaluation> {
    if z.re > 0 {
        return Err(Error::Domain(format!("rational series of G needs Re z <= 0, got {z}")));
    }
    let wp = work_prec(table);
    let (value, bound) = rational_sum(&at(z, wp), wp, &mut |w| Ok(power_sum(table, w, wp)))?;
    Ok(PeriodEvaluation { z: z.clone(), value, method: Method::RationalSeries, err: err_float(bound) })
}

fn auto_rec(table: &MomentTable, z: &BigComplex, wp: u32, depth: u32) -> Result<(BigComplex, f64)> {
    if series_ok(z) {
        return Ok(power_sum(table, z, wp));
    }
    if depth > 200 {
        return Err(Error::NoConvergence("rational series did not reach the series disk".into()));
    }
    // for Re z < 1 every 1/(z-n) has negative real part, so the recursion stays inside Re < 0
    rational_sum(z, wp, &mut |w| auto_rec(table, w, wp, depth + 1))
}

/// G(z) on the cut plane: power series for |z| <= 2/3 with Re z <= 0, the rational series
/// (continued analytically to Re z < 1) with recursive inner values, and the
/// quadrature at depth `quad_depth` elsewhere.
pub fn g_eval(z: &BigComplex, table: &MomentTable, quad_depth: u32) -> Result<PeriodEvaluation> {
    let wp = work_prec(table);
    let zw = at(z, wp);
    if series_ok(&zw) {
        return g_power_series(z, table);
    }
    if zw.re < 1 {
        let (value, bound) = auto_rec(table, &zw, wp, 0)?;
        return Ok(PeriodEvaluation { z: z.clone(), value, method: Method::RationalSeries, err: err_float(bound) });
    }
    g_quadrature(z, quad_depth)
}

fn cut_distance(z: Complex64) -> f64 {
    if z.re >= 1.0 {
        z.im.abs()
    } else {
        (z - 1.0).norm()
    }
}

fn midpoint_sum(z: Complex64, l: (u64, u64), r: (u64, u64), depth: u32) -> Complex64 {
    let m = (l.0 + r.0, l.1 + r.1);
    if depth == 0 {
        let x = m.0 as f64 / m.1 as f64;
        return x / (1.0 - x * z);
    }
    midpoint_sum(z, l, m, depth - 1) + midpoint_sum(z, m, r, depth - 1)
}

fn midpoint_rule(z: Complex64, n: u32) -> Complex64 {
    midpoint_sum(z, (0, 1), (1, 1), n) / (1u64 << n) as f64
}

/// G(z) = ∫₀¹ x/(1-xz) d?(x) by the dyadic midpoint rule at depth n, in double
/// precision; err is |Q_n - Q_{n-1}|. Refused on the cut (1, ∞).
pub fn g_quadrature(z: &BigComplex, n: u32) -> Result<PeriodEvaluation> {
    if !(2..=30).contains(&n) {
        return Err(Error::Invalid(format!("quadrature depth must be in 2..=30, got {n}")));
    }
    let zc = z.to_f64();
    let d = cut_distance(zc);
    if zc.re > 1.0 && zc.im == 0.0 {
        return Err(Error::OnCut(format!("{z}")));
    }
    if d < CUT_WARNING {
        log::warn!("G quadrature at distance {d:e} from the cut");
    }
    let q = midpoint_rule(zc, n);
    let q1 = midpoint_rule(zc, n - 1);
    let err = (q - q1).norm() + 1e-15 * q.norm();
    Ok(PeriodEvaluation { z: z.clone(), value: BigComplex::from_f64(53, q.re, q.im), method: Method::Quadrature, err: err_float(err) })
}

/// Residuals of the functional equations at z.
#[derive(Clone, Debug)]
pub struct ThreeTermResiduals {
    /// |1/z + z^{-2}G(1/z) + 2G(z+1) - G(z)|.
    pub merged: f64,
    /// |-1/(1-z) - (1-z)^{-2}G(1/(1-z)) + 2G(z+1) - G(z)|.
    pub three_term: f64,
    /// |G(z+1) + z^{-2}G(1/z + 1) + 1/z|.
    pub symmetry: f64,
}

/// The three residuals from automatic-route values of G.
pub fn check_three_term(z: &BigComplex, table: &MomentTable) -> Result<ThreeTermResiduals> {
    let wp = work_prec(table);
    let z = at(z, wp);
    let one = Float::with_val(wp, 1);
    let g = |w: &BigComplex| -> Result<BigComplex> {
        if w.re >= 1 {
            return Err(Error::Domain(format!("argument {w} outside the high-precision routes")));
        }
        Ok(g_eval(w, table, 20)?.value)
    };
    let zi = z.recip();
    let zi2 = zi.square();
    let gz = g(&z)?;
    let gz1 = g(&z.add_real(&one))?;
    let merged = zi.add(&zi2.mul(&g(&zi)?)).add(&gz1.scale(&Float::with_val(wp, 2))).sub(&gz);
    let u = z.neg().add_real(&one).recip();
    let three = u.neg().sub(&u.square().mul(&g(&u)?)).add(&gz1.scale(&Float::with_val(wp, 2))).sub(&gz);
    let sym = gz1.add(&zi2.mul(&g(&zi.add_real(&one))?)).add(&zi);
    Ok(ThreeTermResiduals { merged: merged.abs().to_f64(), three_term: three.abs().to_f64(), symmetry: sym.abs().to_f64() })
}

/// π²/12 − ½log²2 = Σ 2^{-n} n^{-2} = 0.58224…, the contraction constant of the
/// homogeneous telescoped map on [-1, 0].
pub fn contraction_constant(prec: u32) -> Float {
    let l2 = ln2(prec);
    Float::with_val(prec, pi(prec).square() / 12u32) - (l2.square() / 2u32)
}

/// sup over `points` in [-1, 0] of Σ_n 2^{-n} |z-n|^{-2}, the homogeneous map
/// applied to the constant 1.
pub fn contraction_sup(points: usize) -> f64 {
    (0..=points)
        .map(|i| {
            let z = -(i as f64) / points.max(1) as f64;
            (1..=60).map(|n| 0.5f64.powi(n) / (z - n as f64).powi(2)).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// k! M_{k+1} = Σ_L C(L-1, k) m_L, the k-th left derivative of G at z = 1.
pub fn left_derivative_at_one(table: &MomentTable, k: usize) -> Result<Float> {
    if k + 1 >= table.big_m.len() {
        return Err(Error::Invalid(format!("derivative order {k} exceeds the table")));
    }
    let fact = rug::Integer::from(rug::Integer::factorial(k as u32));
    Ok(Float::with_val(table.prec, &table.big_m[k + 1] * fact))
}

/// σ₁(1..=n) by a divisor sieve.
pub fn sigma1_table(n: usize) -> Vec<u64> {
    let mut s = vec![0u64; n + 1];
    for d in 1..=n {
        for k in (d..=n).step_by(d) {
            s[k] += d as u64;
        }
    }
    s
}

/// Terms needed so that n σ₁(n)|q|^n summed past the cut-off stays below tol.
pub fn eisenstein_terms(z: Complex64, tol: f64) -> Result<usize> {
    let y = z.im.abs();
    if y < 0.05 {
        return Err(Error::NoConvergence(format!("q-series converges too slowly at Im z = {y}")));
    }
    let r = (-2.0 * PI * y).exp();
    let mut n = 1usize;
    // σ₁(n) <= n², and the tail of n² r^n is below 2 n² r^n / (1 - r)³
    while 8.0 * PI * PI * 2.0 * (n * n) as f64 * r.powi(n as i32) / (1.0 - r).powi(3) > tol {
        n += 1;
    }
    Ok(n)
}

/// G₁(z) = π²/3 − 8π² Σ σ₁(n) qⁿ with q = e^{2πiz}; G₁(z̄) conjugated below the axis.
pub fn eisenstein_g1(z: Complex64, terms: usize) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Domain("G₁ is undefined on the real axis".into()));
    }
    if z.im < 0.0 {
        return Ok(eisenstein_g1(z.conj(), terms)?.conj());
    }
    if z.im < 0.05 {
        return Err(Error::NoConvergence(format!("q-series converges too slowly at Im z = {}", z.im)));
    }
    let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
    let sigma = sigma1_table(terms);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for s in sigma.iter().skip(1) {
        qn *= q;
        acc += *s as f64 * qn;
    }
    Ok(PI * PI / 3.0 - 8.0 * PI * PI * acc)
}

fn g1_auto(z: Complex64) -> Result<Complex64> {
    eisenstein_g1(z, eisenstein_terms(z, 1e-17)?)
}

/// |G₁(-1/z) - z²G₁(z) + 2πiz|.
pub fn quasi_modular_residual(z: Complex64) -> Result<f64> {
    let lhs = g1_auto(-1.0 / z)?;
    let rhs = z * z * g1_auto(z)? - Complex64::new(0.0, 2.0 * PI) * z;
    Ok((lhs - rhs).norm())
}

/// Residual of the three-term equation for (i/2π)G₁ at z in the upper half-plane.
pub fn eisenstein_three_term_residual(z: Complex64) -> Result<f64> {
    let c = Complex64::new(0.0, 1.0 / (2.0 * PI));
    let g = |w: Complex64| -> Result<Complex64> { Ok(c * g1_auto(w)?) };
    let u = 1.0 / (1.0 - z);
    let r = -u - u * u * g(u)? + 2.0 * g(z + 1.0)? - g(z)?;
    Ok(r.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::solve_moments;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn table() -> &'static MomentTable {
        static T: OnceLock<MomentTable> = OnceLock::new();
        T.get_or_init(|| solve_moments(64, 192).unwrap())
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(192, re, im)
    }

    fn diff(a: &PeriodEvaluation, b: &PeriodEvaluation) -> f64 {
        (a.value.to_f64() - b.value.to_f64()).norm()
    }

    #[test]
    fn power_series_values() {
        let t = table();
        let g0 = g_power_series(&c(0.0, 0.0), t).unwrap();
        assert!((g0.value.to_f64().re - 0.5).abs() < 1e-20);
        let g1 = g_power_series(&c(1.0, 0.0), t).unwrap();
        assert!((g1.value.to_f64().re - 1.5).abs() <= g1.err.to_f64());
        let gm = g_power_series(&c(-1.0, 0.0), t).unwrap();
        let mut alt = 0.0;
        for l in 1..=t.order {
            alt += if l % 2 == 1 { 1.0 } else { -1.0 } * t.m[l].to_f64();
        }
        assert!((gm.value.to_f64().re - alt).abs() < 1e-12);
        assert!(matches!(g_power_series(&c(1.01, 0.0), t), Err(Error::Domain(_))));
    }

    #[test]
    fn rational_series_values() {
        let t = table();
        let r0 = g_rational_series(&c(0.0, 0.0), t).unwrap();
        assert!((r0.value.to_f64().re - 0.5).abs() <= r0.err.to_f64().max(1e-12));
        let r5 = g_rational_series(&c(-5.0, 0.0), t).unwrap();
        let q5 = g_quadrature(&c(-5.0, 0.0), 24).unwrap();
        assert!(diff(&r5, &q5) < 1e-10, "{}", diff(&r5, &q5));
        let far = g_rational_series(&c(-1e6, 0.0), t).unwrap();
        assert!(far.value.to_f64().norm() < 1e-3);
        assert!(matches!(g_rational_series(&c(0.5, 0.0), t), Err(Error::Domain(_))));
    }

    #[test]
    fn quadrature_values() {
        let q0 = g_quadrature(&c(0.0, 0.0), 20).unwrap();
        assert!((q0.value.to_f64().re - 0.5).abs() <= q0.err.to_f64() + 1e-12);
        assert!(matches!(g_quadrature(&c(2.0, 0.0), 20), Err(Error::OnCut(_))));
        let qi = g_quadrature(&c(0.0, 1.0), 20).unwrap();
        let pi_ = g_power_series(&c(0.0, 1.0), table()).unwrap();
        assert!(diff(&qi, &pi_) <= qi.err.to_f64() + pi_.err.to_f64(), "{} vs {} + {}", diff(&qi, &pi_), qi.err, pi_.err);
        let off_cut = g_quadrature(&c(3.0, 0.5), 20).unwrap();
        assert!(off_cut.value.to_f64().norm().is_finite());
    }

    #[test]
    fn auto_route_matches_quadrature() {
        let t = table();
        for &(re, im) in &[(-0.9, 0.3), (0.5, -0.6), (0.9, 0.8), (-2.0, 3.0), (-0.62, 0.0)] {
            let a = g_eval(&c(re, im), t, 20).unwrap();
            let q = g_quadrature(&c(re, im), 20).unwrap();
            assert!(diff(&a, &q) <= a.err.to_f64() + q.err.to_f64(), "z = {re}+{im}i: {}", diff(&a, &q));
        }
    }

    #[test]
    fn functional_equations_hold() {
        let t = table();
        for &(re, im) in &[(-1.5, 0.0), (-1.0, 1.0), (-3.0, 0.5), (-1.0, 0.0)] {
            let r = check_three_term(&c(re, im), t).unwrap();
            assert!(r.merged < 1e-20 && r.three_term < 1e-20 && r.symmetry < 1e-20, "z = {re}+{im}i: {r:?}");
        }
    }

    #[test]
    fn contraction() {
        let k = contraction_constant(128).to_f64();
        assert!((k - 0.5822405264650125).abs() < 1e-15);
        assert!(k < 1.0);
        assert!((contraction_sup(1000) - k).abs() < 1e-15);
    }

    #[test]
    fn left_derivatives_from_power_series() {
        let t = table();
        let d1 = left_derivative_at_one(t, 1).unwrap().to_f64();
        assert!((d1 - 4.290926).abs() < 1e-6);
        // difference quotients at 1⁻ approach G'(1) = M₂ with error about h G''(1)/2 = h M₃ ≈ 18.6h
        let g1 = g_power_series(&c(1.0, 0.0), t).unwrap();
        let mut last = f64::INFINITY;
        for &h in &[0.1, 0.03, 0.01] {
            let gh = g_power_series(&c(1.0 - h, 0.0), t).unwrap();
            let q = (g1.value.to_f64().re - gh.value.to_f64().re) / h;
            let gap = (q - d1).abs();
            assert!(gap < last && gap < 25.0 * h, "h = {h}: {q}");
            last = gap;
        }
    }

    #[test]
    fn sigma_sieve() {
        assert_eq!(&sigma1_table(12)[1..], &[1, 3, 4, 7, 6, 12, 8, 15, 13, 18, 12, 28]);
    }

    #[test]
    fn eisenstein_identities() {
        let i = Complex64::new(0.0, 1.0);
        assert!(quasi_modular_residual(i).unwrap() < 1e-10);
        for &z in &[Complex64::new(-1.0, 2.0), Complex64::new(0.3, 1.0), Complex64::new(2.5, 1.5)] {
            assert!(eisenstein_three_term_residual(z).unwrap() < 1e-10);
        }
        let z = Complex64::new(0.2, 0.7);
        let t = eisenstein_terms(z, 1e-15).unwrap();
        assert!((eisenstein_g1(z + 1.0, t).unwrap() - eisenstein_g1(z, t).unwrap()).norm() < 1e-12);
        let lower = eisenstein_g1(z.conj(), t).unwrap();
        assert_eq!(lower, eisenstein_g1(z, t).unwrap().conj());
        assert!(matches!(eisenstein_g1(Complex64::new(0.0, 0.01), 10), Err(Error::NoConvergence(_))));
        assert!(matches!(eisenstein_g1(Complex64::new(1.0, 0.0), 10), Err(Error::Domain(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn methods_agree_in_left_half_plane(re in -6.0f64..0.0, im in -4.0f64..4.0) {
            let t = table();
            let z = c(re, im);
            let mut evals = vec![g_rational_series(&z, t).unwrap(), g_quadrature(&z, 18).unwrap(), g_eval(&z, t, 18).unwrap()];
            if re * re + im * im <= 1.0 {
                evals.push(g_power_series(&z, t).unwrap());
            }
            for a in &evals {
                for b in &evals {
                    prop_assert!(diff(a, b) <= a.err.to_f64() + b.err.to_f64() + 1e-14, "{} vs {} at {z}", a.method, b.method);
                }
            }
        }
    }
}
