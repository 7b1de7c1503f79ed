//! The operator matrix ℰ, its eigenpairs and the dyadic eigenfunctions G_λ, plus
//! quadrature checks of the Bessel-kernel identities.

use crate::error::{Error, Result};
use crate::moments::{system_matrix, system_precision, DqQuadrature, ExpMeasure, MomentTable};
use crate::numerics::{
    bessel_j, bessel_j_f64, eigen_refine, hessenberg_qr_eigenvalues, ln2, norm_inf, pi, polylog_half_table, BigComplex, DenseMatrix,
    GaussLegendre,
};
use rug::Float;

/// π²/12 − log²2 = 0.342014…, the bound on |λ| for every eigenvalue.
pub fn eigenvalue_bound(prec: u32) -> Float {
    let l2 = ln2(prec);
    Float::with_val(prec, pi(prec).square() / 12u32) - Float::with_val(prec, l2.square_ref())
}

/// Truncation of ℰ: e_{s,L} = (-1)^{L-1} c_{L+s} C(L+s-1, s-1).
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub order: usize,
    /// Target precision; entries are held at a higher working precision.
    pub prec: u32,
    pub entries: DenseMatrix,
}

impl OperatorMatrix {
    /// e_{s,L} for 1 <= s, L <= N.
    pub fn get(&self, s: usize, l: usize) -> &Float {
        self.entries.get(s - 1, l - 1)
    }
}

/// Entries reach about 2^{2N}, so they are built with 2N + 32 guard bits.
pub fn build_operator(n: usize, prec: u32) -> Result<OperatorMatrix> {
    if n < 1 {
        return Err(Error::Invalid("order must be positive".into()));
    }
    let wp = system_precision(n, prec);
    let c = polylog_half_table(2 * n, wp);
    let a = system_matrix(n, &c, wp);
    let entries = DenseMatrix::from_fn(n, n, wp, |i, j| -a.get(i, j).clone());
    Ok(OperatorMatrix { order: n, prec, entries })
}

/// An eigenvalue of the truncated ℰ with its coefficient vector m^{(λ)}.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: Float,
    /// m_1^{(λ)} = 1, ..., m_N^{(λ)}.
    pub coeffs: Vec<Float>,
    /// ‖ℰv − λv‖∞ / ‖v‖∞ at order N.
    pub residual: Float,
    /// Significant digits shared by λ at orders N and N + 16.
    pub digits_stable: u32,
    /// Seeds away from λ that still converged onto it.
    pub collisions: usize,
}

/// Digits an eigenvalue must keep under N → N + 16 to be reported.
pub const STABLE_DIGITS: u32 = 10;

const SEED_ORDERS: [usize; 7] = [12, 14, 16, 18, 20, 22, 24];

/// Real double-precision eigenvalues of small truncations, largest first.
fn seed_values(n: usize, bound: f64) -> Vec<f64> {
    let mut seeds = Vec::new();
    for &ns in SEED_ORDERS.iter().filter(|&&ns| ns < n) {
        let Ok(e) = build_operator(ns, 64) else { continue };
        let Ok(ev) = hessenberg_qr_eigenvalues(&e.entries.to_f64(), ns) else { continue };
        for z in ev {
            if z.im.abs() <= 1e-9 * z.norm() && z.re.abs() < bound && z.re != 0.0 {
                seeds.push(z.re);
            }
        }
    }
    seeds.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    seeds
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn shared_digits(a: &Float, b: &Float, prec: u32) -> u32 {
    let cap = (prec as f64 * std::f64::consts::LOG10_2).floor();
    let d = Float::with_val(a.prec(), a - b).abs();
    if d.is_zero() {
        return cap as u32;
    }
    let rel = Float::with_val(53, &d / a.clone().abs()).to_f64();
    (-rel.log10()).floor().clamp(0.0, cap) as u32
}

/// The k largest-|λ| eigenpairs of ℰ_N that are stable under N → N + 16.
///
/// Seeds come from double-precision QR on orders 12..24, largest first; each is
/// refined by inverse iteration at orders N and N + 16 and kept only if the two
/// values share `STABLE_DIGITS` digits.
pub fn eigenvalues(n: usize, prec: u32, k: usize) -> Result<Vec<EigenPair>> {
    if k == 0 || k > 8 {
        return Err(Error::Invalid("count must be in 1..=8".into()));
    }
    if n < 16 {
        return Err(Error::Invalid("eigenvalues need N >= 16".into()));
    }
    let e = build_operator(n, prec)?;
    let e2 = build_operator(n + 16, prec)?;
    let bound = eigenvalue_bound(64).to_f64();
    let mut pairs: Vec<EigenPair> = Vec::new();
    let mut rejected: Vec<f64> = Vec::new();
    for s in seed_values(n, bound) {
        if pairs.len() == k {
            break;
        }
        if pairs.iter().any(|p| relative_gap(p.lambda.to_f64(), s) < 0.05) || rejected.iter().any(|&r| relative_gap(r, s) < 0.05) {
            continue;
        }
        let (lam, v) = match eigen_refine(&e.entries, &Float::with_val(prec, s), prec) {
            Ok(r) => r,
            Err(err) => {
                log::debug!("seed {s} did not refine: {err}");
                continue;
            }
        };
        let lf = lam.to_f64();
        if let Some(p) = pairs.iter_mut().find(|p| relative_gap(p.lambda.to_f64(), lf) < 1e-12) {
            p.collisions += 1;
            log::info!("seed {s} collapsed onto eigenvalue {lf}");
            continue;
        }
        if rejected.iter().any(|&r| relative_gap(r, lf) < 1e-12) {
            continue;
        }
        let digits = match eigen_refine(&e2.entries, &lam, prec) {
            Ok((lam2, _)) => shared_digits(&lam, &lam2, prec),
            Err(_) => 0,
        };
        if digits < STABLE_DIGITS {
            log::debug!("eigenvalue {lf} moves under N -> N+16 ({digits} digits)");
            rejected.push(lf);
            continue;
        }
        let ev = e.entries.mul_vec(&v);
        let wp = e.entries.prec();
        let diff: Vec<Float> = ev.iter().zip(&v).map(|(a, b)| Float::with_val(wp, a - Float::with_val(wp, b * &lam))).collect();
        let residual = Float::with_val(prec, norm_inf(&diff) / norm_inf(&v));
        let coeffs = v.iter().map(|x| Float::with_val(prec, x)).collect();
        pairs.push(EigenPair { lambda: Float::with_val(prec, &lam), coeffs, residual, digits_stable: digits, collisions: 0 });
    }
    if pairs.len() < k {
        return Err(Error::NoConvergence(format!("found {} of {k} stable eigenvalues", pairs.len())));
    }
    pairs.sort_by(|a, b| b.lambda.clone().abs().partial_cmp(&a.lambda.clone().abs()).unwrap());
    Ok(pairs)
}

/// ‖m + ℰm − c‖∞ for the table's m_1..m_N and c_1..c_N.
pub fn moment_vector_consistency(table: &MomentTable, e: &OperatorMatrix) -> Result<Float> {
    let n = e.order;
    if table.order != n {
        return Err(Error::Dimension(format!("table order {} vs operator order {n}", table.order)));
    }
    let wp = e.entries.prec();
    let m: Vec<Float> = table.m[1..=n].iter().map(|x| Float::with_val(wp, x)).collect();
    let em = e.entries.mul_vec(&m);
    let r: Vec<Float> = (0..n).map(|s| Float::with_val(wp, &m[s] + &em[s]) - Float::with_val(wp, table.c(s + 1))).collect();
    Ok(Float::with_val(table.prec, norm_inf(&r)))
}

/// A value of G_λ with a bound on its truncation error.
#[derive(Clone, Debug)]
pub struct GValue {
    pub value: BigComplex,
    pub bound: f64,
}

/// Below this modulus G_λ is summed from its Taylor coefficients.
///
/// The continuation maps w ↦ 1/(w − 1), whose attracting fixed point has
/// modulus 0.618, so the radius must exceed that for the recursion to stop.
pub const SERIES_RADIUS: f64 = 2.0 / 3.0;

fn power_series(pair: &EigenPair, z: &BigComplex, wp: u32) -> GValue {
    let mut acc = BigComplex::zero(wp);
    for c in pair.coeffs.iter().rev() {
        acc = acc.mul(z).add_real(c);
    }
    let r = z.abs().to_f64();
    let n = pair.coeffs.len();
    // the upper half of a truncated eigenvector is not trusted
    let mut bound = 0.0;
    let mut rp = r.powi((n / 2) as i32);
    for c in &pair.coeffs[n / 2..] {
        bound += c.to_f64().abs() * rp;
        rp *= r;
    }
    bound += pair.coeffs[n - 1].to_f64().abs() * rp / (1.0 - r);
    GValue { value: acc, bound }
}

fn disk_sup(pair: &EigenPair) -> f64 {
    let mut rp = 1.0;
    let mut s = 0.0;
    for c in &pair.coeffs {
        s += c.to_f64().abs() * rp;
        rp *= SERIES_RADIUS;
    }
    s
}

fn telescoped(pair: &EigenPair, z: &BigComplex, wp: u32, depth: u32) -> Result<GValue> {
    if depth > 200 {
        return Err(Error::NoConvergence("continuation of G_lambda did not reach the series disk".into()));
    }
    let lam = pair.lambda.to_f64().abs();
    let sup = disk_sup(pair);
    let tol = 2f64.powi(-(pair.lambda.prec() as i32)) * sup / lam;
    let mut acc = BigComplex::zero(wp);
    let mut bound = 0.0;
    let mut n = 1u32;
    loop {
        let d = z.add_real(&Float::with_val(wp, -(n as i64)));
        let w = d.recip();
        let weight = Float::with_val(wp, 1) >> n;
        let g = if w.abs().to_f64() <= SERIES_RADIUS { power_series(pair, &w, wp) } else { telescoped(pair, &w, wp, depth + 1)? };
        let f = w.square().scale(&weight);
        let fa = f.abs().to_f64();
        acc = acc.add(&f.mul(&g.value));
        bound += fa * g.bound;
        // the remaining terms are at most 2^{-n}|w|² sup|G| each, summing to the same
        if n >= 2 && fa * sup < tol {
            bound += fa * sup;
            break;
        }
        n += 1;
    }
    let inv = Float::with_val(wp, 1) / &pair.lambda;
    Ok(GValue { value: acc.scale(&inv), bound: bound / lam })
}

/// G_λ(z) by its power series for |z| <= 2/3 and the telescoped continuation
/// G_λ(z) = λ^{-1} Σ_{n>=1} 2^{-n} (z-n)^{-2} G_λ(1/(z-n)) for Re z <= 0.
pub fn g_lambda_eval(pair: &EigenPair, z: &BigComplex) -> Result<GValue> {
    let wp = pair.lambda.prec() + 32;
    let z = BigComplex::new(Float::with_val(wp, &z.re), Float::with_val(wp, &z.im));
    if z.abs().to_f64() <= SERIES_RADIUS {
        return Ok(power_series(pair, &z, wp));
    }
    if z.re > 0 {
        return Err(Error::Domain(format!("G_lambda needs |z| <= 2/3 or Re z <= 0, got {z}")));
    }
    telescoped(pair, &z, wp, 0)
}

/// |2G(z+1) − G(z) − G(1/z)/(λz²)| divided by the sum of the three magnitudes.
pub fn eigen_equation_residual(pair: &EigenPair, z: &BigComplex) -> Result<f64> {
    let wp = pair.lambda.prec() + 32;
    let one = Float::with_val(wp, 1);
    let a = g_lambda_eval(pair, &z.add_real(&one))?.value;
    let b = g_lambda_eval(pair, z)?.value;
    let zi = z.recip();
    let c = g_lambda_eval(pair, &zi)?.value.mul(&zi.square()).scale(&(Float::with_val(wp, 1) / &pair.lambda));
    let a2 = a.scale(&Float::with_val(wp, 2));
    let r = a2.sub(&b).sub(&c).abs().to_f64();
    let scale = a2.abs().to_f64() + b.abs().to_f64() + c.abs().to_f64();
    Ok(if scale == 0.0 { r } else { r / scale })
}

/// A sample of the symmetric kernel K(s,t) = J₁(2√(st)) / (ψ(s)ψ(t)).
#[derive(Clone, Debug)]
pub struct KernelSample {
    pub s: Float,
    pub t: Float,
    pub k: Float,
    pub psi_s: Float,
    pub psi_t: Float,
}

/// ψ(s) = (2e^s − 1)^{1/2}.
pub fn psi(s: &Float) -> Float {
    let e = Float::with_val(s.prec(), s.exp_ref());
    (e * 2u32 - 1u32).sqrt()
}

pub fn kernel_k(s: &Float, t: &Float, prec: u32) -> Result<KernelSample> {
    if *s < 0 || *t < 0 {
        return Err(Error::Domain("kernel needs s, t >= 0".into()));
    }
    let wp = prec + 16;
    let st = Float::with_val(wp, s * t);
    let x = st.sqrt() * 2u32;
    let j = bessel_j(1, &x, wp)?;
    let psi_s = psi(&Float::with_val(wp, s));
    let psi_t = psi(&Float::with_val(wp, t));
    // the product ψ(s)ψ(t) is formed in a fixed order so K(s,t) = K(t,s) bit for bit
    let (lo, hi) = if psi_s <= psi_t { (&psi_s, &psi_t) } else { (&psi_t, &psi_s) };
    let den = Float::with_val(wp, lo * hi);
    let k = Float::with_val(prec, j / den);
    Ok(KernelSample { s: s.clone(), t: t.clone(), k, psi_s: Float::with_val(prec, psi_s), psi_t: Float::with_val(prec, psi_t) })
}

fn gl_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let g = GaussLegendre::new(n, 64);
    (g.nodes.iter().map(Float::to_f64).collect(), g.weights.iter().map(Float::to_f64).collect())
}

/// Composite Gauss-Legendre on [a, b] with panels of at most `width`.
fn composite(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, width: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + h / 2.0;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            acc += w * f(mid + h / 2.0 * x) * h / 2.0;
        }
    }
    acc
}

/// ∬_{[0,T]²} K(s,t)² ds dt in double precision.
pub fn kernel_hs_norm(t_cut: f64) -> f64 {
    let rule = gl_f64(16);
    let k2 = |s: f64, t: f64| {
        let j = bessel_j_f64(1, 2.0 * (s * t).sqrt());
        j * j / ((2.0 * s.exp() - 1.0) * (2.0 * t.exp() - 1.0))
    };
    composite(&mut |s| composite(&mut |t| k2(s, t), 0.0, t_cut, 1.0, &rule), 0.0, t_cut, 1.0, &rule)
}

/// The two sides of a quadrature identity and their relative disagreement.
#[derive(Clone, Copy, Debug)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / |lhs|.
    pub relative: f64,
    /// Bound on the neglected integral beyond the cut, relative to |lhs|.
    pub tail_bound: f64,
    /// Difference between two Gauss-Legendre orders, relative to |lhs|.
    pub quadrature_err: f64,
}

const RULE_LOW: usize = 12;
const RULE_HIGH: usize = 20;
const MGF_RTOL: f64 = 1e-5;

/// d? discretized for 𝔪(−t) and 𝔪′(−t) on [0, t_max].
pub fn negative_axis_measure(table: &MomentTable, t_max: f64) -> Result<ExpMeasure> {
    let rule = DqQuadrature::from_table(table, 4)?;
    ExpMeasure::new(&rule, t_max, MGF_RTOL)
}

fn panel_width(s: f64, cap: f64) -> f64 {
    (std::f64::consts::PI.powi(2) / (4.0 * s)).min(cap)
}

/// Relative residual of 𝔪(−s) = (2e^s − 1) ∫₀^∞ 𝔪′(−t) J₀(2√(st)) dt.
///
/// 𝔪 and 𝔪′ on the negative axis come from self-similar quadrature against d?.
/// Past the cut, |J₀| <= 1 and 𝔪′(−t) > 0 give the tail bound (2e^s − 1) 𝔪(−T).
pub fn bessel_equation_residual(s: f64, table: &MomentTable, t_cut: f64) -> Result<IdentityCheck> {
    if s <= 0.0 || t_cut <= 0.0 {
        return Err(Error::Domain("need s > 0 and T_cut > 0".into()));
    }
    let mu = negative_axis_measure(table, t_cut.max(s))?;
    let width = panel_width(s, 4.0);
    let run = |n: usize| {
        let gl = gl_f64(n);
        composite(&mut |t| mu.mgf_derivative_neg(t).unwrap() * bessel_j_f64(0, 2.0 * (s * t).sqrt()), 0.0, t_cut, width, &gl)
    };
    let lo = run(RULE_LOW);
    let hi = run(RULE_HIGH);
    let factor = 2.0 * s.exp() - 1.0;
    let lhs = mu.mgf_neg(s)?;
    let rhs = factor * hi;
    let tail = factor * mu.mgf_neg(t_cut)? / lhs.abs();
    if tail > 1e-3 {
        return Err(Error::TailBound(format!("tail beyond T = {t_cut} may reach {tail:.1e} of the value")));
    }
    Ok(IdentityCheck {
        lhs,
        rhs,
        relative: (lhs - rhs).abs() / lhs.abs(),
        tail_bound: tail,
        quadrature_err: factor * (hi - lo).abs() / lhs.abs(),
    })
}

/// ℓ(s) = (Σ_{n>=1} e^{−s/n} 2^{−n} − 1) / (√s ψ(s)).
pub fn ell_series(s: f64) -> f64 {
    let mut acc = 0.0;
    let mut w = 1.0;
    for n in 1..=1100 {
        w *= 0.5;
        acc += (-s / n as f64).exp() * w;
    }
    (acc - 1.0) / (s.sqrt() * (2.0 * s.exp() - 1.0).sqrt())
}

/// ℓ(s) = −ψ(s)^{-1} ∫₀^∞ J₁(2√(st)) / (√t (2e^t − 1)) dt by quadrature.
pub fn ell_quadrature(s: f64, t_cut: f64) -> f64 {
    let gl = gl_f64(RULE_HIGH);
    let v = composite(
        &mut |t| bessel_j_f64(1, 2.0 * (s * t).sqrt()) / (t.sqrt() * (2.0 * t.exp() - 1.0)),
        0.0,
        t_cut,
        panel_width(s, 2.0),
        &gl,
    );
    -v / (2.0 * s.exp() - 1.0).sqrt()
}

/// Residuals of ∫₀^∞ 𝔪(−t) t^{−1/2} J₁(2√(st)) dt = s^{−1/2} − 𝔪(−s)/(√s (2e^s − 1))
/// and of the two expressions for ℓ(s).
#[derive(Clone, Copy, Debug)]
pub struct HankelResidual {
    pub identity: IdentityCheck,
    pub ell_series: f64,
    pub ell_quadrature: f64,
    /// |ℓ_series − ℓ_quadrature| / |ℓ_series|.
    pub ell_relative: f64,
}

pub fn hankel_identity_residual(s: f64, table: &MomentTable, t_cut: f64) -> Result<HankelResidual> {
    if s <= 0.0 || t_cut <= 0.0 {
        return Err(Error::Domain("need s > 0 and T_cut > 0".into()));
    }
    let mu = negative_axis_measure(table, t_cut.max(s))?;
    let width = panel_width(s, 4.0);
    let run = |n: usize| {
        let gl = gl_f64(n);
        composite(&mut |t| mu.mgf_neg(t).unwrap() * bessel_j_f64(1, 2.0 * (s * t).sqrt()) / t.sqrt(), 0.0, t_cut, width, &gl)
    };
    let lo = run(RULE_LOW);
    let hi = run(RULE_HIGH);
    let ms = mu.mgf_neg(s)?;
    let rhs = 1.0 / s.sqrt() - ms / (s.sqrt() * (2.0 * s.exp() - 1.0));
    // ∫_T^∞ 𝔪(−t) t^{−1/2} dt <= T^{−1/2} ∫ e^{−xT}/x d?(x)
    let rule = DqQuadrature::from_table(table, 4)?;
    let tail_int = rule.integrate(&|x| (-x * t_cut).exp() / x, 1e-12)?.value / t_cut.sqrt();
    let tail = tail_int / hi.abs();
    if tail > 1e-3 {
        return Err(Error::TailBound(format!("tail beyond T = {t_cut} may reach {tail:.1e} of the value")));
    }
    let identity =
        IdentityCheck { lhs: hi, rhs, relative: (hi - rhs).abs() / hi.abs(), tail_bound: tail, quadrature_err: (hi - lo).abs() / hi.abs() };
    let es = ell_series(s);
    let eq = ell_quadrature(s, t_cut);
    Ok(HankelResidual { identity, ell_series: es, ell_quadrature: eq, ell_relative: (es - eq).abs() / es.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::solve_moments;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn pairs() -> &'static Vec<EigenPair> {
        static P: OnceLock<Vec<EigenPair>> = OnceLock::new();
        P.get_or_init(|| eigenvalues(96, 160, 4).unwrap())
    }

    fn table64() -> &'static MomentTable {
        static T: OnceLock<MomentTable> = OnceLock::new();
        T.get_or_init(|| solve_moments(64, 192).unwrap())
    }

    #[test]
    fn operator_entries() {
        let e = build_operator(16, 128).unwrap();
        let c = polylog_half_table(4, 128);
        assert!((e.get(1, 1).to_f64() - 0.582_240_526_465_012_5).abs() < 1e-15);
        let at = |s, l| Float::with_val(128, e.get(s, l));
        assert_eq!(at(1, 1), c[1]);
        assert_eq!(at(1, 2), -c[2].clone());
        // e_{2,2} = -C(3,1) c_4; entries are not bounded by 1
        let e22 = Float::with_val(128, &c[3] * 3u32);
        assert_eq!(at(2, 2), -e22);
        assert!(e.get(2, 2).clone().abs() > 1);
        for l in 1..=16 {
            for s in 1..=16 {
                let positive = e.get(s, l).is_sign_positive();
                assert_eq!(positive, l % 2 == 1, "s = {s}, L = {l}");
            }
        }
    }

    #[test]
    fn bound_value() {
        assert!((eigenvalue_bound(64).to_f64() - 0.342_014_019_505_911_8).abs() < 1e-15);
    }

    #[test]
    fn leading_eigenvalues() {
        let want = [0.255_532_10, -0.088_926_66, 0.032_615_86, -0.012_176_21];
        let bound = eigenvalue_bound(64);
        for (p, w) in pairs().iter().zip(want) {
            let l = p.lambda.to_f64();
            // the printed digits are truncated
            assert!((l - w).abs() < 1e-8 && (l - w) * w.signum() >= 0.0, "{l} vs {w}");
            assert!(p.lambda.clone().abs() < bound);
            assert!(p.residual < Float::with_val(64, 1) >> 80u32);
            assert!(p.digits_stable >= STABLE_DIGITS);
            assert_eq!(p.coeffs[0], 1);
        }
    }

    #[test]
    fn eigen_argument_checks() {
        assert!(matches!(eigenvalues(96, 128, 0), Err(Error::Invalid(_))));
        assert!(matches!(eigenvalues(96, 128, 9), Err(Error::Invalid(_))));
        assert!(matches!(eigenvalues(8, 128, 2), Err(Error::Invalid(_))));
    }

    const TEST_POINTS: [(f64, f64); 10] =
        [(-1.0, 0.0), (-2.0, 0.0), (-2.5, 0.0), (-3.0, 1.0), (-1.0, -2.0), (-1.0, 1.0), (-5.0, 2.0), (-1.5, 0.5), (-4.0, 0.0), (-0.5, 0.0)];

    #[test]
    fn eigenfunction_equation() {
        for p in pairs() {
            for (re, im) in TEST_POINTS {
                let r = eigen_equation_residual(p, &BigComplex::from_f64(160, re, im)).unwrap();
                assert!(r < 1e-10, "λ = {}, z = {re}+{im}i: {r}", p.lambda.to_f64());
            }
        }
    }

    #[test]
    fn eigenfunction_evaluation_routes() {
        let p = &pairs()[0];
        let g0 = g_lambda_eval(p, &BigComplex::zero(160)).unwrap();
        assert_eq!(g0.value.re, 1);
        assert!(g0.value.im.is_zero());
        let wp = p.lambda.prec() + 32;
        let z = BigComplex::from_f64(wp, -0.5, 0.0);
        let a = power_series(p, &z, wp);
        let b = telescoped(p, &z, wp, 0).unwrap();
        let d = a.value.sub(&b.value).abs().to_f64();
        assert!(d <= a.bound + b.bound + 1e-30, "{d} vs {} + {}", a.bound, b.bound);
        assert!(matches!(g_lambda_eval(p, &BigComplex::from_f64(160, 2.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn moment_vector_identity() {
        let t = table64();
        let e = build_operator(64, 192).unwrap();
        let r = moment_vector_consistency(t, &e).unwrap();
        assert!(r < 1e-40, "{r}");
        let mut bumped = t.clone();
        bumped.m[2] += 1e-10;
        assert!(moment_vector_consistency(&bumped, &e).unwrap() > 1e-11);
        let small = solve_moments(16, 128).unwrap();
        let r16 = moment_vector_consistency(&small, &build_operator(16, 128).unwrap()).unwrap();
        assert!(r16 <= small.truncation_error);
        assert!(matches!(moment_vector_consistency(&small, &e), Err(Error::Dimension(_))));
    }

    #[test]
    fn kernel_samples() {
        let p = 128;
        let zero = Float::new(p);
        let s = Float::with_val(p, 3);
        assert!(kernel_k(&zero, &s, p).unwrap().k.is_zero());
        let x = kernel_k(&Float::with_val(p, 1.7), &Float::with_val(p, 0.3), p).unwrap();
        let y = kernel_k(&Float::with_val(p, 0.3), &Float::with_val(p, 1.7), p).unwrap();
        assert_eq!(x.k, y.k);
        assert!(kernel_k(&Float::with_val(p, -1), &s, p).is_err());
    }

    #[test]
    fn hilbert_schmidt_norm_converges() {
        let v: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&t| kernel_hs_norm(t)).collect();
        assert!(v[0] < v[1] && v[1] < v[2]);
        assert!((v[2] - v[0]) / v[2] < 0.01);
    }

    #[test]
    fn bessel_integral_equation() {
        let t = table64();
        let r = bessel_equation_residual(1.0, t, 80.0).unwrap();
        assert!(r.relative < 1e-3, "{r:?}");
        let r = bessel_equation_residual(0.001, t, 80.0).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-2 && r.relative < 1e-3);
        assert!(matches!(bessel_equation_residual(1.0, t, 2.0), Err(Error::TailBound(_))));
        assert!(bessel_equation_residual(-1.0, t, 80.0).is_err());
    }

    #[test]
    fn hankel_identity() {
        let r = hankel_identity_residual(1.0, table64(), 80.0).unwrap();
        assert!(r.identity.relative < 1e-3, "{r:?}");
        assert!(r.ell_relative < 1e-3);
        assert!(r.ell_series < 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ell_negative(s in 0.01f64..60.0) {
            prop_assert!(ell_series(s) < 0.0);
        }

        #[test]
        fn kernel_symmetric(s in 0.0f64..20.0, t in 0.0f64..20.0) {
            let p = 96;
            let a = kernel_k(&Float::with_val(p, s), &Float::with_val(p, t), p).unwrap();
            let b = kernel_k(&Float::with_val(p, t), &Float::with_val(p, s), p).unwrap();
            prop_assert_eq!(a.k, b.k);
        }
    }
}
