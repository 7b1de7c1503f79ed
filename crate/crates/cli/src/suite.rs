//! The verification suite: one named check per acceptance criterion, plus checks of
//! structural invariants. Every check is timed against its budget.

use crate::golden::{Golden, GoldenError};
use crate::number::{real, sci};
use minklab::moments::{kinney_constant, m3_relation_residual, solve_moments, symmetry_residuals, MomentTable};
use minklab::numerics::BigComplex;
use minklab::{padic, period, qmark, spectral, tree};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Integer, Rational};
use std::cell::OnceCell;
use std::time::{Duration, Instant};

/// Precision and truncation order the criteria are stated at.
pub const PREC: u32 = 192;
pub const ORDER: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Everything except the two slowest criteria.
    Fast,
    All,
}

/// One measured quantity inside a check.
#[derive(Clone, Debug, PartialEq)]
pub struct SubCheck {
    pub name: String,
    pub observed: String,
    pub target: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub subchecks: Vec<SubCheck>,
    /// Set when the check could not run to completion.
    pub error: Option<String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Check {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.within_budget() && self.subchecks.iter().all(|s| s.passed)
    }

    /// `PASS C1 moment reproduction (0.03 s, budget 10 s)`.
    pub fn summary(&self) -> String {
        format!(
            "{} {} {} ({:.2} s, budget {} s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }

    /// One line per subcheck, then the error or budget overrun if any.
    pub fn details(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .subchecks
            .iter()
            .map(|s| {
                let mark = if s.passed { "ok  " } else { "FAIL" };
                format!("  {mark} {}: {} (target {})", s.name, s.observed, s.target)
            })
            .collect();
        if let Some(e) = &self.error {
            out.push(format!("  FAIL error: {e}"));
        }
        if !self.within_budget() {
            out.push(format!("  FAIL runtime {:.2} s over budget {} s", self.elapsed.as_secs_f64(), self.budget.as_secs()));
        }
        out
    }
}

#[derive(Debug)]
pub struct SuiteError(String);

impl From<minklab::Error> for SuiteError {
    fn from(e: minklab::Error) -> Self {
        SuiteError(e.to_string())
    }
}

impl From<GoldenError> for SuiteError {
    fn from(e: GoldenError) -> Self {
        SuiteError(e.to_string())
    }
}

type Body = fn(&Context, &mut Vec<SubCheck>) -> Result<(), SuiteError>;

/// A named check with its runtime budget.
pub struct CheckDef {
    pub id: &'static str,
    pub name: &'static str,
    pub budget_secs: u64,
    /// Excluded from the fast suite.
    pub slow: bool,
    body: Body,
}

pub const CRITERIA: [CheckDef; 13] = [
    CheckDef { id: "C1", name: "moment reproduction", budget_secs: 10, slow: false, body: moment_reproduction },
    CheckDef { id: "C2", name: "eigenvalue reproduction", budget_secs: 60, slow: true, body: eigenvalue_reproduction },
    CheckDef { id: "C3", name: "p=7 characteristic polynomial", budget_secs: 1, slow: false, body: characteristic_polynomial },
    CheckDef { id: "C4", name: "p-adic closed forms vs enumeration", budget_secs: 30, slow: false, body: padic_closed_forms },
    CheckDef { id: "C5", name: "functional-equation residuals", budget_secs: 10, slow: false, body: functional_equations },
    CheckDef { id: "C6", name: "Eisenstein series identities", budget_secs: 5, slow: false, body: eisenstein },
    CheckDef { id: "C7", name: "Bessel integral equations", budget_secs: 60, slow: true, body: bessel },
    CheckDef { id: "C8", name: "tree convergence bound", budget_secs: 30, slow: false, body: convergence_bound },
    CheckDef { id: "C9", name: "fixed point of ?(x) = x", budget_secs: 1, slow: false, body: fixed_point },
    CheckDef { id: "C10", name: "inverse round trip", budget_secs: 5, slow: false, body: inverse_round_trip },
    CheckDef { id: "C11", name: "moment vector consistency", budget_secs: 5, slow: false, body: consistency },
    CheckDef { id: "C12", name: "Z_p shell sum", budget_secs: 1, slow: false, body: zp_shell_sum },
    CheckDef { id: "C13", name: "Kinney constant agreement", budget_secs: 30, slow: false, body: kinney },
];

pub const INVARIANTS: [CheckDef; 5] = [
    CheckDef { id: "I1", name: "distribution functional equations", budget_secs: 5, slow: false, body: distribution_equations },
    CheckDef { id: "I2", name: "moment reflection and m3 relation", budget_secs: 5, slow: false, body: moment_relations },
    CheckDef { id: "I3", name: "p-adic chains doubly stochastic and primitive", budget_secs: 10, slow: false, body: chain_structure },
    CheckDef { id: "I4", name: "zeta_T closed and product forms", budget_secs: 1, slow: false, body: zeta_t_forms },
    CheckDef { id: "I5", name: "period-function contraction", budget_secs: 1, slow: false, body: contraction },
];

/// Shared state: the reference data and the N=64 moment table, built on first use.
pub struct Context {
    pub golden: Golden,
    table: OnceCell<MomentTable>,
}

impl Context {
    pub fn new(golden: Golden) -> Context {
        Context { golden, table: OnceCell::new() }
    }

    fn table(&self) -> Result<&MomentTable, SuiteError> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = solve_moments(ORDER, PREC)?;
        Ok(self.table.get_or_init(|| t))
    }
}

pub fn run_check(def: &CheckDef, ctx: &Context) -> Check {
    let start = Instant::now();
    let mut subchecks = Vec::new();
    let result = (def.body)(ctx, &mut subchecks);
    Check {
        id: def.id,
        name: def.name,
        subchecks,
        error: result.err().map(|e| e.0),
        elapsed: start.elapsed(),
        budget: Duration::from_secs(def.budget_secs),
    }
}

/// The checks a suite runs, criteria first.
pub fn definitions(suite: Suite) -> Vec<&'static CheckDef> {
    CRITERIA.iter().filter(|s| suite == Suite::All || !s.slow).chain(INVARIANTS.iter()).collect()
}

pub fn run_suite(suite: Suite, golden: Golden) -> Vec<Check> {
    let ctx = Context::new(golden);
    definitions(suite).into_iter().map(|d| run_check(d, &ctx)).collect()
}

fn below(subs: &mut Vec<SubCheck>, name: impl Into<String>, observed: f64, bound: f64) {
    subs.push(SubCheck { name: name.into(), observed: sci(observed), target: format!("< {}", sci(bound)), passed: observed < bound });
}

/// Compare a high-precision value with a golden entry, exactly.
fn golden_close(ctx: &Context, subs: &mut Vec<SubCheck>, name: &str, key: &str, observed: &Float) -> Result<(), SuiteError> {
    let (target, tol) = ctx.golden.rational(key)?;
    let diff = Float::with_val(observed.prec(), observed - &target).abs().to_f64();
    subs.push(SubCheck {
        name: name.into(),
        observed: format!("{} (diff {})", real(observed, 25), sci(diff)),
        target: format!("{} ± {}", ctx.golden.entry(key)?.value, sci(tol)),
        passed: diff <= tol,
    });
    Ok(())
}

fn moment_reproduction(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let t = ctx.table()?;
    for l in 1..=4 {
        golden_close(ctx, subs, &format!("m{l}"), &format!("moment.m{l}"), &t.m[l])?;
    }
    for l in 1..=4 {
        golden_close(ctx, subs, &format!("M{l}"), &format!("moment.M{l}"), &t.big_m[l])?;
    }
    Ok(())
}

fn eigenvalue_reproduction(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let pairs = spectral::eigenvalues(128, PREC, 4)?;
    for k in 1..=4 {
        let (target, _) = ctx.golden.f64(&format!("eigen.{k}"))?;
        let nearest = pairs
            .iter()
            .min_by(|a, b| {
                let da = (a.lambda.to_f64() - target).abs();
                let db = (b.lambda.to_f64() - target).abs();
                da.total_cmp(&db)
            })
            .ok_or_else(|| SuiteError("no eigenvalues".into()))?;
        golden_close(ctx, subs, &format!("λ{k}"), &format!("eigen.{k}"), &nearest.lambda)?;
        subs.push(SubCheck {
            name: format!("λ{k} stable digits under N -> N+16"),
            observed: nearest.digits_stable.to_string(),
            target: ">= 8".into(),
            passed: nearest.digits_stable >= 8,
        });
    }
    let (bound, _) = ctx.golden.rational("eigen.bound")?;
    let largest = pairs.iter().map(|p| Float::with_val(PREC, p.lambda.abs_ref())).fold(Float::new(PREC), |a, b| a.max(&b));
    subs.push(SubCheck {
        name: "max |λ|".into(),
        observed: real(&largest, 12),
        target: format!("< {}", ctx.golden.entry("eigen.bound")?.value),
        passed: largest < bound,
    });
    Ok(())
}

fn poly_string(p: &[Rational]) -> String {
    let terms: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("[{}]", terms.join(", "))
}

fn characteristic_polynomial(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let chain = padic::markov_matrix(7)?;
    let computed = padic::characteristic_polynomial(&chain.dense()?);
    let expected = ctx.golden.polynomial("charpoly.p7")?;
    subs.push(SubCheck {
        name: "coefficients, constant term first".into(),
        observed: poly_string(&computed),
        target: poly_string(&expected),
        passed: computed == expected,
    });
    Ok(())
}

fn padic_closed_forms(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let cases =
        [(2u64, Rational::new(), 0i64, "mu.2.0.0"), (3, Rational::new(), 1, "mu.3.0.1"), (5, Rational::from((1, 5)), 0, "mu.5.1/5.0")];
    for (p, z, nu, key) in cases {
        let closed = padic::mu_closed_form(p, &z, nu)?;
        let (expected, tol) = ctx.golden.rational(key)?;
        let label = format!("μ_{p}({z}, {nu})");
        subs.push(SubCheck {
            name: format!("{label} closed form"),
            observed: closed.to_string(),
            target: expected.to_string(),
            passed: closed == expected,
        });
        let mut gaps = Vec::new();
        for n in [12, 16, 20] {
            let emp = padic::empirical_mu(p, &z, nu, n)?;
            gaps.push(Rational::from(&emp - &closed).abs().to_f64());
        }
        let shown: Vec<String> = gaps.iter().map(|g| sci(*g)).collect();
        subs.push(SubCheck {
            name: format!("{label} gap at n = 12, 16, 20"),
            observed: shown.join(", "),
            target: format!("nonincreasing, last < {}", sci(tol)),
            passed: gaps.windows(2).all(|w| w[1] <= w[0]) && gaps[2] < tol,
        });
    }
    Ok(())
}

/// Re z ∈ {-1, -1.5, -2, -3, -5}, Im z ∈ {0, 0.5, 1, 2}.
pub fn functional_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for re in [-1.0, -1.5, -2.0, -3.0, -5.0] {
        for im in [0.0, 0.5, 1.0, 2.0] {
            grid.push((re, im));
        }
    }
    grid
}

fn functional_equations(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let t = ctx.table()?;
    let (_, tol) = ctx.golden.f64("functional.residual")?;
    let mut worst = [0.0f64; 3];
    for (re, im) in functional_grid() {
        let r = period::check_three_term(&BigComplex::from_f64(PREC, re, im), t)?;
        for (w, v) in worst.iter_mut().zip([r.merged, r.three_term, r.symmetry]) {
            *w = w.max(v);
        }
    }
    let names = ["merged equation", "three-term equation", "symmetry law"];
    for (name, w) in names.iter().zip(worst) {
        below(subs, format!("{name}, max over 20 points"), w, tol);
    }
    Ok(())
}

fn eisenstein(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let (_, tol) = ctx.golden.f64("eisenstein.residual")?;
    let points = [(-1.0, 2.0), (0.3, 1.0), (2.5, 1.5), (-0.7, 1.2), (0.0, 3.0)];
    let mut worst = 0.0f64;
    for (re, im) in points {
        worst = worst.max(period::eisenstein_three_term_residual(Complex64::new(re, im))?);
    }
    below(subs, "three-term equation for (i/2π)G1, max over 5 points", worst, tol);
    let q = period::quasi_modular_residual(Complex64::new(0.0, 1.0))?;
    below(subs, "G1(-1/z) = z²G1(z) - 2πiz at z = i", q, tol);
    Ok(())
}

fn bessel(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let t = ctx.table()?;
    let (_, tol) = ctx.golden.f64("bessel.relative")?;
    for s in [0.5, 1.0, 2.0] {
        let r = spectral::bessel_equation_residual(s, t, 80.0)?;
        below(subs, format!("integral equation at s = {s}"), r.relative, tol);
    }
    for s in [1.0, 4.0] {
        let r = spectral::hankel_identity_residual(s, t, 80.0)?;
        below(subs, format!("integrated identity at s = {s}"), r.identity.relative, tol);
    }
    Ok(())
}

fn convergence_bound(_: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let grid: Vec<Rational> = (1..=10_000).map(|k| Rational::from((k, 500))).collect();
    for n in [8u32, 12, 16] {
        let sup = tree::deviations(n, &grid)?.into_iter().map(|d| d.delta.abs()).max().unwrap_or_default();
        let bound = Rational::from((Integer::from(1), Integer::from(1) << n));
        subs.push(SubCheck {
            name: format!("n = {n}: sup |F - F_n| on k/500, k <= 10^4"),
            observed: sci(sup.to_f64()),
            target: format!("<= 2^-{n}"),
            passed: sup <= bound,
        });
    }
    Ok(())
}

fn fixed_point(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let points = qmark::fixed_points(PREC)?;
    let x = points.iter().find(|x| **x < 0.5).ok_or_else(|| SuiteError("no fixed point below 1/2".into()))?;
    golden_close(ctx, subs, "fixed point in (0, 1/2)", "fixed.point", x)
}

fn inverse_round_trip(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let scale: Integer = Integer::from(1) << 96;
    let mut worst = Rational::new();
    for _ in 0..1000 {
        let k = Integer::from(rng.gen::<u128>() >> 32);
        let y = Rational::from((k, scale.clone()));
        let x = qmark::qmark_inverse_dyadic(&y)?;
        let back = qmark::qmark_exact(&x)?.to_rational();
        worst = worst.max((back - &y).abs());
    }
    let bound = Rational::from((1, Integer::from(1) << (PREC / 2)));
    subs.push(SubCheck {
        name: "max |?(?^-1(y)) - y| over 1000 dyadics k/2^96".into(),
        observed: sci(worst.to_f64()),
        target: format!("<= 2^-{}", PREC / 2),
        passed: worst <= bound,
    });
    let y = Float::with_val(PREC, Rational::from((2, 3)));
    let x = qmark::qmark_inverse(&y, PREC)?;
    golden_close(ctx, subs, "?^-1(2/3) = (√5-1)/2", "inverse.two_thirds", &x)
}

fn consistency(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let t = ctx.table()?;
    let e = spectral::build_operator(ORDER, PREC)?;
    let r = spectral::moment_vector_consistency(t, &e)?;
    let (_, tol) = ctx.golden.f64("consistency.residual")?;
    below(subs, "|m + Em - c| sup norm", r.to_f64(), tol);
    Ok(())
}

fn zp_shell_sum(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let (_, tol) = ctx.golden.f64("zp.residual")?;
    for (p, s) in [(3u64, 0.3), (5, 0.5)] {
        let s = Complex64::new(s, 0.0);
        let closed = padic::z_p(p, s)?;
        let shells = padic::z_p_shell_sum(p, s)?;
        below(subs, format!("p = {p}, s = {}: shell sum vs closed form", s.re), (closed - shells).norm(), tol);
        let mirror = padic::z_p(p, -s)?;
        below(subs, format!("p = {p}, s = {}: Z_p(s) - Z_p(-s)", s.re), (closed - mirror).norm(), tol);
    }
    Ok(())
}

fn kinney(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let t = solve_moments(128, PREC)?;
    let k = kinney_constant(&t, 22)?;
    let (_, tol) = ctx.golden.f64("kinney.agreement")?;
    below(subs, format!("series {:.12} vs quadrature {:.12}", k.alpha_series, k.alpha_quadrature), k.agreement, tol);
    Ok(())
}

fn distribution_equations(_: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let bound = 2f64.powi(-(PREC as i32) / 2);
    let mut worst = 0.0f64;
    for (a, b) in [(1, 3), (2, 7), (5, 8), (7, 3), (22, 7), (355, 113)] {
        let r = qmark::check_distribution_eq(&Rational::from((a, b)), 3, PREC)?;
        worst = worst.max(r.functional.to_f64()).max(r.shift.to_f64());
    }
    below(subs, "max residual over 6 rationals", worst, bound);
    Ok(())
}

fn moment_relations(ctx: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let t = ctx.table()?;
    let e = |l: usize| t.err[l].to_f64();
    let r1 = symmetry_residuals(t)[1].to_f64().abs();
    below(subs, "reflection residual at L = 1 within 4 err_1", r1, 4.0 * e(1) + f64::MIN_POSITIVE);
    let r3 = m3_relation_residual(t).to_f64().abs();
    below(subs, "2m3 + 1/2 - 3m2 within 4 err_3 + 6 err_2", r3, 4.0 * e(3) + 6.0 * e(2) + f64::MIN_POSITIVE);
    Ok(())
}

fn chain_structure(_: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    for (p, kappa) in [(2u64, 2i64), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)] {
        let chain = padic::orbit(p, kappa)?;
        let exponent = chain.primitive_exponent(4 * chain.len())?;
        subs.push(SubCheck {
            name: format!("p = {p}, κ = {kappa}, {} states", chain.len()),
            observed: format!("doubly stochastic {}, primitive exponent {:?}", chain.is_doubly_stochastic(), exponent),
            target: "doubly stochastic true, some exponent".into(),
            passed: chain.is_doubly_stochastic() && exponent.is_some(),
        });
    }
    Ok(())
}

fn zeta_t_forms(_: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    for s in [Complex64::new(0.5, 0.0), Complex64::new(0.25, 1.0), Complex64::new(2.0, 0.0)] {
        let d = (padic::zeta_t(s)? - padic::zeta_t_product_form(s)?).norm();
        below(subs, format!("s = {s}"), d, 1e-10);
    }
    Ok(())
}

fn contraction(_: &Context, subs: &mut Vec<SubCheck>) -> Result<(), SuiteError> {
    let c = period::contraction_constant(PREC).to_f64();
    below(subs, "contraction constant", c, 1.0);
    below(subs, "sup over [-1, 0] minus the constant", (period::contraction_sup(1000) - c).abs(), 1e-12);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_name_every_check() {
        let fast: Vec<&str> = definitions(Suite::Fast).iter().map(|s| s.id).collect();
        let all: Vec<&str> = definitions(Suite::All).iter().map(|s| s.id).collect();
        assert_eq!(all.len(), 18);
        assert!(!fast.contains(&"C2") && !fast.contains(&"C7"));
        assert!(all.contains(&"C2") && all.contains(&"C7"));
        let mut ids = all.clone();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
    }

    #[test]
    fn quick_checks_pass() {
        let ctx = Context::new(Golden::builtin());
        for id in ["C9", "C12", "I4", "I5"] {
            let def = definitions(Suite::All).into_iter().find(|s| s.id == id).unwrap();
            let c = run_check(def, &ctx);
            assert!(c.passed(), "{}\n{}", c.summary(), c.details().join("\n"));
        }
    }

    #[test]
    fn corrupted_reference_fails_by_name() {
        let text = crate::golden::BUILTIN.replace("fixed.point = 0.42037233", "fixed.point = 0.42037300");
        let ctx = Context::new(Golden::parse(&text).unwrap());
        let c = run_check(&CRITERIA[8], &ctx);
        assert!(!c.passed());
        assert!(c.summary().starts_with("FAIL C9 fixed point"));
    }
}
