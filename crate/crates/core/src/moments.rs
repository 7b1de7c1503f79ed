//! Moments m_L = ∫₀¹ x^L d?(x) and M_L = ∫₀^∞ x^L dF(x), their relations, the
//! exponential generating functions and Kinney's constant.

use crate::error::{Error, Result};
use crate::numerics::{binomial, fubini_table, ln2, polylog_half_table, solve_dense, DenseMatrix};
use crate::qmark;
use rug::ops::Pow;
use rug::{Float, Integer};

/// Solved moment system with its metadata.
#[derive(Clone, Debug)]
pub struct MomentTable {
    /// Truncation order N.
    pub order: usize,
    pub prec: u32,
    /// m_0 = 1, m_1, ..., m_N, held at the solver's working precision.
    pub m: Vec<Float>,
    /// M_0, ..., M_N.
    pub big_m: Vec<Float>,
    /// c_1, ..., c_{2N} (index 0 holds c_1), at working precision.
    pub c: Vec<Float>,
    /// B_0, ..., B_N.
    pub fubini: Vec<Integer>,
    /// |m_L^{(N)} - m_L^{(N+8)}| for L = 0..=N.
    pub err: Vec<Float>,
    /// max over err.
    pub truncation_error: Float,
}

impl MomentTable {
    /// c_L for L >= 1.
    pub fn c(&self, l: usize) -> &Float {
        &self.c[l - 1]
    }

    /// Largest L with err_L below `tol`, scanning upward from 1.
    pub fn trusted_order(&self, tol: f64) -> usize {
        let mut l = 0;
        while l < self.order && self.err[l + 1].to_f64() < tol {
            l += 1;
        }
        l
    }
}

/// Working precision for the system of order n: entries reach about 2^{2n}.
pub fn system_precision(n: usize, prec: u32) -> u32 {
    prec + 2 * n as u32 + 32
}

/// The matrix A_{s,L} = (-1)^L c_{L+s} C(L+s-1, s-1), s, L in 1..=n, at precision wp.
pub fn system_matrix(n: usize, c: &[Float], wp: u32) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, wp, |i, j| {
        let (s, l) = (i + 1, j + 1);
        let v = Float::with_val(wp, &c[l + s - 1]) * binomial((l + s - 1) as u32, (s - 1) as u32);
        if l % 2 == 1 {
            -v
        } else {
            v
        }
    })
}

fn solve_plain(n: usize, wp: u32, c: &[Float]) -> Result<Vec<Float>> {
    let a = system_matrix(n, c, wp);
    let i_minus_a = DenseMatrix::from_fn(n, n, wp, |i, j| {
        let v = Float::with_val(wp, -a.get(i, j));
        if i == j {
            v + 1u32
        } else {
            v
        }
    });
    let rhs: Vec<Float> = (0..n).map(|s| c[s].clone()).collect();
    solve_dense(&i_minus_a, &rhs)
}

/// Solve the truncated system m_s = Σ_{L=0}^{N} (-1)^L c_{L+s} C(L+s-1, s-1) m_L, m_0 = 1.
pub fn solve_moments(n: usize, prec: u32) -> Result<MomentTable> {
    if n < 8 {
        return Err(Error::Invalid("solve_moments needs N >= 8".into()));
    }
    let n2 = n + 8;
    let wp = system_precision(n2, prec);
    let c_w = polylog_half_table(2 * n2, wp);
    let m_n = solve_plain(n, wp, &c_w)?;
    let m_n2 = solve_plain(n2, wp, &c_w)?;
    let mut m = vec![Float::with_val(wp, 1)];
    m.extend(m_n.iter().cloned());
    let mut err = vec![Float::new(prec)];
    for (a, b) in m_n.iter().zip(&m_n2) {
        err.push(Float::with_val(prec, a - b).abs());
    }
    let truncation_error = err.iter().fold(Float::new(prec), |a, b| if *b > a { b.clone() } else { a });
    let c: Vec<Float> = c_w[..2 * n].to_vec();
    let fubini = fubini_table(n);
    let mut table = MomentTable { order: n, prec, m, big_m: Vec::new(), c, fubini, err, truncation_error };
    table.big_m = (0..=n).map(|l| big_m_from_m(&table, l)).collect();
    Ok(table)
}

/// M_L = Σ_i m_i C(L, i) B_{L-i}.
pub fn big_m_from_m(table: &MomentTable, l: usize) -> Float {
    assert!(l <= table.order);
    let p = table.prec;
    let mut acc = Float::new(p + 32);
    for i in 0..=l {
        let w = binomial(l as u32, i as u32) * &table.fubini[l - i];
        acc += Float::with_val(p + 32, &table.m[i] * w);
    }
    Float::with_val(p, acc)
}

/// m_L = M_L - Σ_{s<L} M_s C(L, s).
pub fn m_from_big_m(big_m: &[Float], l: usize) -> Float {
    let p = big_m[0].prec();
    let mut acc = Float::with_val(p + 32, &big_m[l]);
    for (s, ms) in big_m.iter().enumerate().take(l) {
        acc -= Float::with_val(p + 32, ms * binomial(l as u32, s as u32));
    }
    Float::with_val(p, acc)
}

/// M_L from Σ_{s>=L} C(s-1, L-1) m_s with a modelled tail.
#[derive(Clone, Debug)]
pub struct RysEstimate {
    pub value: Float,
    /// Size of the modelled tail beyond the trusted moments; used as the error bound.
    pub tail: Float,
    /// Number of table moments summed directly.
    pub summed: usize,
}

/// Cross-check of M_L through the moments m_s.
///
/// Moments are summed while the table trusts them (err_s < 1e-12); beyond that m_s is
/// extrapolated by A exp(-B √s), fitted on the last two trusted values.
pub fn big_m_via_rys(table: &MomentTable, l: usize) -> Result<RysEstimate> {
    if l == 0 {
        return Err(Error::Invalid("M_via_rys needs L >= 1".into()));
    }
    let p = table.prec;
    let k = table.trusted_order(1e-12);
    if k < l + 4 {
        return Err(Error::Invalid(format!("tail dominates: only {k} trusted moments for L = {l}")));
    }
    let mut acc = Float::new(p);
    for s in l..=k {
        acc += Float::with_val(p, &table.m[s] * binomial((s - 1) as u32, (l - 1) as u32));
    }
    // fit m_s ≈ A exp(-B √s) on s = k-4, k
    let (s1, s2) = ((k - 4) as f64, k as f64);
    let (y1, y2) = (table.m[k - 4].to_f64().ln(), table.m[k].to_f64().ln());
    let b = (y1 - y2) / (s2.sqrt() - s1.sqrt());
    let a = y2 + b * s2.sqrt();
    let mut tail = 0.0f64;
    let mut s = k + 1;
    loop {
        let ln_binom = ln_binomial((s - 1) as f64, (l - 1) as f64);
        let t = (a - b * (s as f64).sqrt() + ln_binom).exp();
        tail += t;
        if t < 1e-18 * tail || s > 1_000_000 {
            break;
        }
        s += 1;
    }
    acc += tail;
    Ok(RysEstimate { value: acc, tail: Float::with_val(p, tail), summed: k })
}

fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// ln Γ(x) for x > 0: shift to x >= 10, then Stirling with three correction terms.
fn ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut x = x;
    while x < 10.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// r_L = m_L - Σ_s C(L, s) (-1)^s m_s for L = 0..=N.
pub fn symmetry_residuals(table: &MomentTable) -> Vec<Float> {
    let p = table.prec;
    (0..=table.order)
        .map(|l| {
            let mut acc = Float::with_val(p + 32, &table.m[l]);
            for s in 0..=l {
                let t = Float::with_val(p + 32, &table.m[s] * binomial(l as u32, s as u32));
                if s % 2 == 0 {
                    acc -= t;
                } else {
                    acc += t;
                }
            }
            Float::with_val(p, acc)
        })
        .collect()
}

/// 2 m_3 + 1/2 - 3 m_2.
pub fn m3_relation_residual(table: &MomentTable) -> Float {
    let p = table.prec;
    Float::with_val(p, &table.m[3] * 2u32) + 0.5 - Float::with_val(p, &table.m[2] * 3u32)
}

/// A series value with a bound on the truncated tail.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Float,
    pub tail: Float,
}

/// 𝔪(t) = Σ m_L t^L/L! from the table.
///
/// The tail bound assumes m_L <= m_N beyond the table and excludes the table's own
/// moment errors.
pub fn mgf(t: &Float, table: &MomentTable) -> SeriesValue {
    let p = table.prec;
    let at = t.to_f64().abs();
    let wp = p + (2.0 * at / std::f64::consts::LN_2) as u32 + 16;
    let mut term = Float::with_val(wp, 1);
    let mut acc = Float::with_val(wp, 1);
    for l in 1..=table.order {
        term *= t;
        term /= l as u32;
        acc += Float::with_val(wp, &term * &table.m[l]);
    }
    let n = table.order as f64;
    let next = (at.ln() * (n + 1.0) - ln_gamma(n + 2.0)).exp() * table.m[table.order].to_f64();
    let tail = if at < n + 2.0 { next / (1.0 - at / (n + 2.0)) } else { f64::INFINITY };
    SeriesValue { value: Float::with_val(p, acc), tail: Float::with_val(p, tail) }
}

/// 𝔪'(t) = Σ m_{L+1} t^L/L! from the table.
pub fn mgf_derivative(t: &Float, table: &MomentTable) -> Float {
    let p = table.prec;
    let wp = p + (2.0 * t.to_f64().abs() / std::f64::consts::LN_2) as u32 + 16;
    let mut term = Float::with_val(wp, 1);
    let mut acc = Float::with_val(wp, &table.m[1]);
    for l in 1..table.order {
        term *= t;
        term /= l as u32;
        acc += Float::with_val(wp, &term * &table.m[l + 1]);
    }
    Float::with_val(p, acc)
}

/// M(t) = 𝔪(t)/(2 - e^t).
pub fn big_mgf(t: &Float, table: &MomentTable) -> Result<Float> {
    let p = table.prec;
    let d = Float::with_val(p, t - ln2(p));
    if d.abs() < 1e-6 {
        return Err(Error::Pole("M(t) has a pole at t = log 2".into()));
    }
    let den = Float::with_val(p, 2u32) - Float::with_val(p, t.exp_ref());
    Ok(mgf(t, table).value / den)
}

/// κ = 𝔪(log 2)/(2 log 2) and r_L = M_L (log 2)^L / L!.
#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub kappa: Float,
    pub r: Vec<Float>,
}

pub fn asymptotic_constant(table: &MomentTable) -> AsymptoticReport {
    let p = table.prec;
    let l2 = ln2(p);
    let kappa = mgf(&l2, table).value / Float::with_val(p, &l2 * 2u32);
    let mut scale = Float::with_val(p, 1);
    let mut r = Vec::with_capacity(table.order + 1);
    for l in 0..=table.order {
        if l > 0 {
            scale *= &l2;
            scale /= l as u32;
        }
        r.push(Float::with_val(p, &table.big_m[l] * &scale));
    }
    AsymptoticReport { kappa, r }
}

/// K-point Gauss rule for d? on [0, 1], applied adaptively on the Farey subdivision.
///
/// ∫_I f d? over the Farey interval I = [a/b, c/d] at depth k equals
/// 2^{-k} ∫₀¹ f(g(x)) d?(x) with g(x) = (a(1-x) + cx)/(b(1-x) + dx).
#[derive(Clone, Debug)]
pub struct DqQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// A double-precision integral with its error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl DqQuadrature {
    /// Gauss rule from m_0..m_{2k-1} of the table.
    pub fn from_table(table: &MomentTable, k: usize) -> Result<Self> {
        if 2 * k > table.order {
            return Err(Error::Invalid("table too short for the requested rule".into()));
        }
        let p = table.prec;
        // monic orthogonal polynomial: Σ_j coef_j m_{i+j} = -m_{i+k}
        let h = DenseMatrix::from_fn(k, k, p, |i, j| table.m[i + j].clone());
        let rhs: Vec<Float> = (0..k).map(|i| -table.m[i + k].clone()).collect();
        let coef = solve_dense(&h, &rhs)?;
        let poly = |x: &Float| {
            let mut v = Float::with_val(p, 1);
            for cj in coef.iter().rev() {
                v *= x;
                v += cj;
            }
            v
        };
        let mut nodes = Vec::new();
        let grid = 4096;
        let mut prev = poly(&Float::new(p));
        for g in 1..=grid {
            let x = Float::with_val(p, g) / grid as u32;
            let cur = poly(&x);
            if prev.is_sign_negative() != cur.is_sign_negative() {
                let (mut lo, mut hi) = (Float::with_val(p, g - 1) / grid as u32, x.clone());
                let slo = prev.is_sign_negative();
                for _ in 0..80 {
                    let mid = Float::with_val(p, &lo + &hi) / 2u32;
                    if poly(&mid).is_sign_negative() == slo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                nodes.push(Float::with_val(p, lo + hi) / 2u32);
            }
            prev = cur;
        }
        if nodes.len() != k {
            return Err(Error::NoConvergence(format!("found {} of {k} Gauss nodes", nodes.len())));
        }
        let v = DenseMatrix::from_fn(k, k, p, |i, j| Float::with_val(p, nodes[j].clone().pow(i as u32)));
        let mom: Vec<Float> = (0..k).map(|i| table.m[i].clone()).collect();
        let w = solve_dense(&v, &mom)?;
        Ok(DqQuadrature { nodes: nodes.iter().map(Float::to_f64).collect(), weights: w.iter().map(Float::to_f64).collect() })
    }

    fn leaf(&self, f: &dyn Fn(f64) -> f64, l: (u64, u64), r: (u64, u64)) -> f64 {
        let (a, b, c, d) = (l.0 as f64, l.1 as f64, r.0 as f64, r.1 as f64);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f((a * (1.0 - x) + c * x) / (b * (1.0 - x) + d * x))).sum()
    }

    /// ∫₀¹ f d? to an absolute tolerance.
    pub fn integrate(&self, f: &dyn Fn(f64) -> f64, tol: f64) -> Result<Estimate> {
        let whole = self.leaf(f, (0, 1), (1, 1));
        let mut err = 0.0;
        let v = self.refine(f, (0, 1), (1, 1), whole, 0, tol, &mut err)?;
        Ok(Estimate { value: v, err })
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&self, f: &dyn Fn(f64) -> f64, l: (u64, u64), r: (u64, u64), whole: f64, depth: u32, tol: f64, err: &mut f64) -> Result<f64> {
        let m = match (l.0.checked_add(r.0), l.1.checked_add(r.1)) {
            (Some(a), Some(b)) if b < 1 << 52 => (a, b),
            _ => return Err(Error::NoConvergence("Farey subdivision exhausted machine integers".into())),
        };
        let left = self.leaf(f, l, m) / 2.0;
        let right = self.leaf(f, m, r) / 2.0;
        let diff = (left + right - whole).abs();
        // values here are relative to the interval mass 2^{-depth}
        let mass = 0.5f64.powi(depth as i32);
        // local budget tol·mass, relaxed deep in the tree so integrable endpoint
        // growth (x/(1-x))^L near 1 terminates
        let budget = tol * mass.max(2f64.powi(-40));
        if diff * mass <= budget || diff * mass < 1e-300 {
            *err += diff * mass;
            return Ok((left + right) * mass);
        }
        if depth >= 400 {
            return Err(Error::NoConvergence("Farey subdivision too deep".into()));
        }
        let a = self.refine(f, l, m, 2.0 * left, depth + 1, tol, err)?;
        let b = self.refine(f, m, r, 2.0 * right, depth + 1, tol, err)?;
        Ok(a + b)
    }
}

/// A discrete approximation Σ w_i δ_{x_i} of d? adequate for e^{-xt} and x e^{-xt}
/// with 0 <= t <= t_max.
#[derive(Clone, Debug)]
pub struct ExpMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub t_max: f64,
}

impl ExpMeasure {
    /// Farey leaves are refined until every probe e^{-xt}, t in {0, 1/4, 1, 4, ...} up to
    /// t_max, meets the relative tolerance `rtol` against its lower envelope.
    pub fn new(rule: &DqQuadrature, t_max: f64, rtol: f64) -> Result<Self> {
        let mut probes = vec![0.0];
        let mut t = 0.25;
        while t < t_max {
            probes.push(t);
            t *= 2.0;
        }
        probes.push(t_max);
        let tols: Vec<f64> = probes.iter().flat_map(|&t| [rtol * lemma_lower(t), rtol * lemma_lower(t) / (1.0 + t.sqrt())]).collect();
        let mut m = ExpMeasure { nodes: Vec::new(), weights: Vec::new(), t_max };
        m.refine(rule, &probes, &tols, (0, 1), (1, 1), 0)?;
        Ok(m)
    }

    fn leaf_values(rule: &DqQuadrature, probes: &[f64], l: (u64, u64), r: (u64, u64)) -> Vec<f64> {
        probes.iter().flat_map(|&t| [rule.leaf(&|x| (-x * t).exp(), l, r), rule.leaf(&|x| x * (-x * t).exp(), l, r)]).collect()
    }

    fn refine(&mut self, rule: &DqQuadrature, probes: &[f64], tols: &[f64], l: (u64, u64), r: (u64, u64), depth: u32) -> Result<()> {
        let m = match (l.0.checked_add(r.0), l.1.checked_add(r.1)) {
            (Some(a), Some(b)) if b < 1 << 52 => (a, b),
            _ => return Err(Error::NoConvergence("Farey subdivision exhausted machine integers".into())),
        };
        let mass = 0.5f64.powi(depth as i32);
        let whole = Self::leaf_values(rule, probes, l, r);
        let left = Self::leaf_values(rule, probes, l, m);
        let right = Self::leaf_values(rule, probes, m, r);
        let ok = (0..tols.len()).all(|i| ((left[i] + right[i]) / 2.0 - whole[i]).abs() * mass <= tols[i] * mass.max(2f64.powi(-40)));
        if ok {
            for (a, b) in [(l, m), (m, r)] {
                let (p, q, u, v) = (a.0 as f64, a.1 as f64, b.0 as f64, b.1 as f64);
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    self.nodes.push((p * (1.0 - x) + u * x) / (q * (1.0 - x) + v * x));
                    self.weights.push(w * mass / 2.0);
                }
            }
            return Ok(());
        }
        if depth >= 400 {
            return Err(Error::NoConvergence("Farey subdivision too deep".into()));
        }
        self.refine(rule, probes, tols, l, m, depth + 1)?;
        self.refine(rule, probes, tols, m, r, depth + 1)
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.t_max)));
        }
        Ok(())
    }

    /// 𝔪(-t).
    pub fn mgf_neg(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.nodes.iter().zip(&self.weights).map(|(x, w)| w * (-x * t).exp()).sum())
    }

    /// 𝔪'(-t).
    pub fn mgf_derivative_neg(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.nodes.iter().zip(&self.weights).map(|(x, w)| w * x * (-x * t).exp()).sum())
    }

    /// ∫₀¹ f d? over the stored nodes.
    pub fn integrate(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// 𝔪(-t) = ∫₀¹ e^{-xt} d?(x) by adaptive self-similar quadrature.
pub fn mgf_neg_quadrature(rule: &DqQuadrature, t: f64, rtol: f64) -> Result<Estimate> {
    rule.integrate(&|x| (-x * t).exp(), rtol * lemma_lower(t))
}

/// 𝔪'(-t) = ∫₀¹ x e^{-xt} d?(x) by adaptive self-similar quadrature.
pub fn mgf_derivative_neg_quadrature(rule: &DqQuadrature, t: f64, rtol: f64) -> Result<Estimate> {
    rule.integrate(&|x| x * (-x * t).exp(), rtol * lemma_lower(t) / (1.0 + t.max(0.0).sqrt()))
}

/// C = e^{-√log 2}.
pub fn lemma_constant() -> f64 {
    (-std::f64::consts::LN_2.sqrt()).exp()
}

/// C^{2√t}, the lower envelope of 𝔪(-t).
pub fn lemma_lower(t: f64) -> f64 {
    lemma_constant().powf(2.0 * t.max(0.0).sqrt())
}

/// Two evaluations of ∫₀¹ log₂(1+x) d?(x) and the resulting α = ½ / integral.
#[derive(Clone, Debug)]
pub struct KinneyEstimate {
    pub integral_series: f64,
    pub integral_quadrature: f64,
    pub alpha_series: f64,
    pub alpha_quadrature: f64,
    /// |series - quadrature| for the integral.
    pub agreement: f64,
    /// Moments used by the series.
    pub series_terms: usize,
}

/// Kinney's constant by the alternating moment series and by dyadic-midpoint quadrature.
///
/// The series Σ (-1)^{L+1} m_L / L is summed over the moments the table trusts to
/// 1e-14 and its tail is removed by repeated averaging of the last partial sums.
pub fn kinney_constant(table: &MomentTable, n_quad: u32) -> Result<KinneyEstimate> {
    let p = table.prec;
    let k = table.trusted_order(1e-14);
    if k < 12 {
        return Err(Error::Invalid(format!("only {k} trusted moments")));
    }
    let mut partial = Vec::with_capacity(k);
    let mut acc = Float::new(p);
    for l in 1..=k {
        let t = Float::with_val(p, &table.m[l] / l as u32);
        if l % 2 == 1 {
            acc += t;
        } else {
            acc -= t;
        }
        partial.push(acc.clone());
    }
    // repeated averaging of the last partial sums
    let depth = 10.min(k - 1);
    let mut row: Vec<Float> = partial[k - 1 - depth..].to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| Float::with_val(p, &w[0] + &w[1]) / 2u32).collect();
    }
    let series = row[0].to_f64() / std::f64::consts::LN_2;
    let quad = qmark::dyadic_midpoint_quadrature_f64(&|x| (1.0 + x).log2(), n_quad);
    Ok(KinneyEstimate {
        integral_series: series,
        integral_quadrature: quad,
        alpha_series: 0.5 / series,
        alpha_quadrature: 0.5 / quad,
        agreement: (series - quad).abs(),
        series_terms: k,
    })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn table64() -> &'static MomentTable {
        static T: OnceLock<MomentTable> = OnceLock::new();
        T.get_or_init(|| solve_moments(64, 192).unwrap())
    }

    fn table128() -> &'static MomentTable {
        static T: OnceLock<MomentTable> = OnceLock::new();
        T.get_or_init(|| solve_moments(128, 192).unwrap())
    }

    fn f(x: &Float) -> f64 {
        x.to_f64()
    }

    #[test]
    fn printed_moments() {
        let t = table64();
        assert!((f(&t.m[1]) - 0.5).abs() < 1e-20);
        assert!((f(&t.m[2]) - 0.290926).abs() < 1e-6);
        assert!((f(&t.m[3]) - 0.186389).abs() < 1e-6);
        assert!((f(&t.m[4]) - 0.126992).abs() < 1e-6);
        assert_eq!(t.big_m[0], 1);
        assert!((f(&t.big_m[1]) - 1.5).abs() < 1e-20);
        assert!((f(&t.big_m[2]) - 4.290926).abs() < 1e-6);
    }

    #[test]
    fn monotone_positive_and_hankel() {
        let t = table64();
        for l in 0..t.order {
            assert!(t.m[l + 1] > 0 && t.m[l + 1] < t.m[l], "L = {l}");
        }
        let h = DenseMatrix::from_fn(5, 5, 256, |i, j| t.m[i + j].clone());
        // positive definite: every pivot of an unpivoted elimination is positive
        let mut a: Vec<Vec<Float>> = (0..5).map(|i| h.row(i).to_vec()).collect();
        for k in 0..5 {
            assert!(a[k][k] > 0, "pivot {k}");
            for i in k + 1..5 {
                let r = Float::with_val(256, &a[i][k] / &a[k][k]);
                for j in k..5 {
                    let d = Float::with_val(256, &r * &a[k][j]);
                    a[i][j] -= d;
                }
            }
        }
    }

    #[test]
    fn truncation_error_decreases() {
        // max-norm is dominated by the top moments, so compare well separated orders
        let errs: Vec<f64> = [16, 32, 64, 96].iter().map(|&n| f(&solve_moments(n, 128).unwrap().truncation_error)).collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{errs:?}");
        }
    }

    #[test]
    fn small_order_rejected() {
        assert!(matches!(solve_moments(7, 64), Err(Error::Invalid(_))));
    }

    #[test]
    fn fubini_convolution_round_trip() {
        let t = table64();
        assert_eq!(m_from_big_m(&t.big_m, 0), 1);
        assert!((f(&m_from_big_m(&t.big_m, 1)) - 0.5).abs() < 1e-20);
        let back = m_from_big_m(&t.big_m, 5);
        let d = Float::with_val(192, &back - &t.m[5]).abs();
        assert!(d < Float::with_val(64, 1) >> 96);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn round_trip_any_order(l in 0usize..=40) {
            // the inverse cancels terms of size Σ M_s C(L, s), which is the scale to compare against
            let t = table64();
            let back = m_from_big_m(&t.big_m, l);
            let scale: Float = (0..=l).map(|s| Float::with_val(192, &t.big_m[s] * binomial(l as u32, s as u32))).fold(Float::new(192), |a, b| a + b);
            let d = Float::with_val(192, &back - &t.m[l]).abs();
            prop_assert!(d <= scale >> 184u32);
        }

        #[test]
        fn mgf_symmetry_within_table_error(t in -4.0f64..4.0) {
            let tab = table64();
            let p = tab.prec;
            let tf = Float::with_val(p, t);
            let a = mgf(&tf, tab).value;
            let b = mgf(&Float::with_val(p, -t), tab).value * Float::with_val(p, tf.exp_ref());
            let r = Float::with_val(p, &a - &b).abs().to_f64();
            prop_assert!(r <= symmetry_bound(tab, t), "t = {}: {}", t, r);
        }
    }

    /// Σ err_L |t|^L / L! (1 + e^t), doubled, plus 2^{-prec/2}.
    fn symmetry_bound(tab: &MomentTable, t: f64) -> f64 {
        let mut term = 1.0;
        let mut acc = 0.0;
        for l in 0..=tab.order {
            if l > 0 {
                term *= t.abs() / l as f64;
            }
            acc += f(&tab.err[l]) * term;
        }
        2.0 * acc * (1.0 + t.exp()) + 2f64.powi(-(tab.prec as i32) / 2)
    }

    #[test]
    fn mgf_symmetry_at_listed_points() {
        let tab = table64();
        let p = tab.prec;
        for t in [1.0, 5.0, 10.0, -1.0, -5.0, -10.0] {
            let tf = Float::with_val(p, t);
            let a = mgf(&tf, tab).value;
            let b = mgf(&Float::with_val(p, -t), tab).value * Float::with_val(p, tf.exp_ref());
            let r = Float::with_val(p, &a - &b).abs().to_f64();
            assert!(r <= symmetry_bound(tab, t), "t = {t}: {r}");
        }
    }

    #[test]
    fn rys_sum_matches_fubini_route() {
        for tab in [table64(), table128()] {
            for l in 1..=2 {
                let r = big_m_via_rys(tab, l).unwrap();
                let d = Float::with_val(64, &r.value - &tab.big_m[l]).abs().to_f64();
                assert!(d <= r.tail.to_f64(), "L = {l}, N = {}", tab.order);
            }
        }
        let r = big_m_via_rys(table128(), 1).unwrap();
        assert!((f(&r.value) - 1.5).abs() < 1e-4);
        assert!(matches!(big_m_via_rys(table64(), 9), Err(Error::Invalid(_))));
        assert!(big_m_via_rys(table64(), 0).is_err());
    }

    #[test]
    fn reflection_relations() {
        let t = table64();
        let r = symmetry_residuals(t);
        assert!(r[0].is_zero());
        let e = |l: usize| f(&t.err[l]);
        assert!(f(&r[1]).abs() <= 4.0 * e(1) + 1e-29);
        assert!(f(&m3_relation_residual(t)).abs() <= 4.0 * e(3) + 6.0 * e(2) + 1e-29);
        // residuals grow with L only as far as the trusted moments allow
        for l in 1..=8 {
            assert!(f(&r[l]).abs() < 1e-12, "L = {l}");
        }
    }

    #[test]
    fn generating_functions_at_zero() {
        let t = table64();
        let z = Float::new(192);
        assert_eq!(mgf(&z, t).value, 1);
        assert_eq!(big_mgf(&z, t).unwrap(), 1);
    }

    #[test]
    fn big_mgf_taylor_coefficients() {
        let t = table64();
        for x in [0.05, 0.1, -0.1] {
            let xf = Float::with_val(192, x);
            let direct = big_mgf(&xf, t).unwrap().to_f64();
            let mut term = 1.0;
            let mut series = 0.0;
            for l in 0..=40 {
                if l > 0 {
                    term *= x / l as f64;
                }
                series += f(&t.big_m[l]) * term;
            }
            assert!((direct - series).abs() < 1e-12, "t = {x}");
        }
    }

    #[test]
    fn big_mgf_pole() {
        let t = table64();
        let l2 = ln2(192);
        assert!(matches!(big_mgf(&l2, t), Err(Error::Pole(_))));
        let below = Float::with_val(192, &l2 - 1e-4);
        let v = big_mgf(&below, t).unwrap();
        assert!(v > 1000);
    }

    #[test]
    fn asymptotic_ratio_converges() {
        let rep = asymptotic_constant(table64());
        assert!(rep.kappa > 0);
        let gaps: Vec<f64> = (10..=40).step_by(5).map(|l| Float::with_val(192, &rep.r[l] - &rep.kappa).abs().to_f64()).collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
    }

    #[test]
    fn lemma_envelope() {
        let tab = table64();
        let rule = DqQuadrature::from_table(tab, 4).unwrap();
        let c = lemma_constant();
        assert!((c - 0.4349).abs() < 1e-4);
        for t in [4.0, 10.0, 25.0, 50.0, 100.0] {
            let v = mgf_neg_quadrature(&rule, t, 1e-6).unwrap().value;
            assert!(v >= c.powf(2.0 * t.sqrt()), "t = {t}");
            assert!(v <= 10.0 * c.powf(t.sqrt()), "t = {t}");
        }
    }

    #[test]
    fn series_and_quadrature_agree_for_moderate_t() {
        let tab = table64();
        let rule = DqQuadrature::from_table(tab, 4).unwrap();
        for t in [-10.0, -4.0, -1.0, 0.5, 2.0] {
            let s = mgf(&Float::with_val(192, t), tab);
            let q = rule.integrate(&|x| (x * t).exp(), 1e-12).unwrap().value;
            assert!((s.value.to_f64() - q).abs() < 1e-9 * q, "t = {t}");
        }
        let mu = ExpMeasure::new(&rule, 20.0, 1e-5).unwrap();
        for t in [1.0, 5.0] {
            let s = mgf(&Float::with_val(192, -t), tab).value.to_f64();
            assert!((mu.mgf_neg(t).unwrap() - s).abs() < 1e-6 * s);
            let d = mgf_derivative(&Float::with_val(192, -t), tab).to_f64();
            assert!((mu.mgf_derivative_neg(t).unwrap() - d).abs() < 1e-6 * d);
        }
        assert!(matches!(mu.mgf_neg(21.0), Err(Error::Domain(_))));
    }

    #[test]
    fn stieltjes_rule_is_symmetric_and_exact() {
        let tab = table64();
        let rule = DqQuadrature::from_table(tab, 4).unwrap();
        let ws: f64 = rule.weights.iter().sum();
        assert!((ws - 1.0).abs() < 1e-14);
        // symmetry holds to the truncation error of m_0..m_7, amplified by the Hankel solve
        for i in 0..4 {
            assert!((rule.nodes[i] + rule.nodes[3 - i] - 1.0).abs() < 1e-10);
            assert!((rule.weights[i] - rule.weights[3 - i]).abs() < 1e-10);
        }
        for l in 0..8 {
            let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(l)).sum();
            assert!((q - f(&tab.m[l as usize])).abs() < 1e-14, "L = {l}");
        }
        let m3 = rule.integrate(&|y| (y / (1.0 - y)).powi(3), 1e-9).unwrap().value;
        assert!((m3 - f(&tab.big_m[3])).abs() < 1e-6);
    }

    #[test]
    fn kinney_two_routes() {
        let k = kinney_constant(table128(), 22).unwrap();
        assert!(k.agreement < 1e-8, "{k:?}");
        assert!(k.alpha_series > 0.5 && k.alpha_series < 1.0);
        assert!(matches!(kinney_constant(table64(), 22), Err(Error::Invalid(_))));
    }
}
