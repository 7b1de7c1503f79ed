//! Argument definitions and the subcommand handlers.

use crate::config::Format;
use crate::config::RunConfig;
use crate::golden::Golden;
use crate::number::{self, complex, complex64, digits_for, real, sci, Number};
use crate::report::{Report, Table};
use crate::suite::{self, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use minklab::moments::solve_moments;
use minklab::numerics::BigComplex;
use minklab::padic::{self, Residue};
use minklab::period::{self, PeriodEvaluation};
use minklab::{qmark, spectral, tree};
use num_complex::Complex64;
use rug::{Float, Integer, Rational};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "minklab",
    version,
    about = "The Minkowski question mark function: values, moments, period function, spectrum and p-adic statistics"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Working precision in bits [default 192]
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Truncation order N of the moment system [default 64]
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Tree generation depth [default 20]
    #[arg(long, global = true)]
    pub gen: Option<u32>,
    /// Emit JSON
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV
    #[arg(long, global = true)]
    pub csv: bool,
    /// key = value file with prec, order, gen and format
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The question mark function, its inverse and fixed points
    #[command(subcommand)]
    Qmark(QmarkCmd),
    /// Calkin-Wilf tree generations and the convergence of their distribution
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Solve the moment system at --order and --prec
    Moments,
    /// The dyadic period function G
    #[command(subcommand)]
    Gfun(GfunCmd),
    /// Leading eigenvalues of the moment operator at --order and --prec
    Eigen {
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Include eigenvector coefficients
        #[arg(long)]
        coeffs: bool,
    },
    /// p-adic limit measures, Markov chains and zeta functions
    #[command(subcommand)]
    Padic(PadicCmd),
    /// Run the verification suite
    Verify {
        #[arg(value_enum, default_value_t = Suite::Fast)]
        suite: Suite,
        /// Reference data file to use instead of the built-in one
        #[arg(long, value_name = "PATH")]
        golden: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum QmarkCmd {
    /// ?(x) for x in [0, 1]: p/q, a decimal, or golden, phi, sqrt2, pi, e
    Eval {
        #[arg(long, allow_hyphen_values = true, value_parser = real_arg)]
        x: RealArg,
    },
    /// ?^{-1}(y) for y in [0, 1]
    Inverse {
        #[arg(long, allow_hyphen_values = true, value_parser = real_arg)]
        y: RealArg,
    },
    /// All solutions of ?(x) = x
    Fixed,
}

#[derive(Subcommand, Debug)]
pub enum TreeCmd {
    /// Members of generation n in tree order
    Gen {
        /// Generation, defaults to --gen
        #[arg(long)]
        n: Option<u32>,
    },
    /// sup |F(x) - F_n(x)| over the grid k/denom, k = 1..=points
    Deviation {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        points: u32,
        #[arg(long, default_value_t = 500)]
        denom: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Power,
    Rational,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// Re z in {-1, -1.5, -2, -3, -5}, Im z in {0, 0.5, 1, 2}
    Default,
}

#[derive(Subcommand, Debug)]
pub enum GfunCmd {
    /// G(z) at one point
    Eval {
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        z: ComplexArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Dyadic depth of the quadrature route
        #[arg(long, default_value_t = 22)]
        depth: u32,
    },
    /// Functional-equation residuals on a grid
    Check {
        #[arg(long, value_enum, default_value_t = Grid::Default)]
        grid: Grid,
        #[arg(long, default_value_t = 1e-20)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    /// state_id, i, kappa, is_outside
    Csv,
    /// row, col, num, den
    Matrix,
}

#[derive(Subcommand, Debug)]
pub enum PadicCmd {
    /// μ_p(z, ν) in closed form, optionally against generation n of the tree
    Mu {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        z: Rational,
        #[arg(long, allow_hyphen_values = true)]
        nu: i64,
        #[arg(long, value_name = "N")]
        empirical: Option<u32>,
    },
    /// The chain on the orbit of the outside state G(0, -κ)
    Orbit {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        kappa: i64,
        #[arg(long, value_enum)]
        dump: Option<Dump>,
    },
    /// Z_p(s) in closed form and as a shell sum, -1 < Re s < 1
    Zeta {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        s: ComplexArg,
    },
    /// ζ_T(s) and the formal product value
    ZetaT {
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        s: ComplexArg,
    },
    /// Exact characteristic polynomial of the κ = 1 chain
    Charpoly {
        #[arg(long)]
        p: u64,
    },
}

/// A real argument before the working precision is known.
#[derive(Clone, Debug, PartialEq)]
pub struct RealArg(pub String);

impl RealArg {
    fn resolve(&self, prec: u32) -> Number {
        number::parse_real(&self.0, prec).expect("validated when parsed")
    }
}

fn real_arg(s: &str) -> Result<RealArg, String> {
    number::parse_real(s, 64).map(|_| RealArg(s.to_string()))
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    number::parse_rational(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexArg(pub Rational, pub Rational);

impl ComplexArg {
    fn big(&self, prec: u32) -> BigComplex {
        BigComplex::new(Float::with_val(prec, &self.0), Float::with_val(prec, &self.1))
    }

    fn f64(&self) -> Complex64 {
        number::complex_f64(&(self.0.clone(), self.1.clone()))
    }
}

fn complex_arg(s: &str) -> Result<ComplexArg, String> {
    number::parse_complex(s).map(|(a, b)| ComplexArg(a, b))
}

/// Why a command did not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or configuration: exit code 1.
    Usage(String),
    /// The computation failed or refused its input: exit code 2.
    Library(String),
}

impl From<minklab::Error> for Failure {
    fn from(e: minklab::Error) -> Self {
        Failure::Library(e.to_string())
    }
}

fn big_complex(z: &BigComplex, digits: usize) -> String {
    complex(&real(&z.re, digits), &real(&z.im, digits))
}

pub fn execute(command: &Command, cfg: &RunConfig, mut report: Report) -> Result<Report, Failure> {
    match command {
        Command::Qmark(c) => qmark_cmd(c, cfg, &mut report)?,
        Command::Tree(c) => tree_cmd(c, cfg, &mut report)?,
        Command::Moments => moments_cmd(cfg, &mut report)?,
        Command::Gfun(c) => gfun_cmd(c, cfg, &mut report)?,
        Command::Eigen { count, coeffs } => eigen_cmd(*count, *coeffs, cfg, &mut report)?,
        Command::Padic(c) => padic_cmd(c, &mut report)?,
        Command::Verify { suite, golden } => verify_cmd(*suite, golden.as_ref(), &mut report)?,
    }
    Ok(report)
}

fn qmark_cmd(c: &QmarkCmd, cfg: &RunConfig, r: &mut Report) -> Result<(), Failure> {
    let prec = cfg.precision_bits;
    let digits = digits_for(prec);
    let bound = format!("2^-{prec}");
    r.table = Table::new(&["quantity", "value", "err"]);
    match c {
        QmarkCmd::Eval { x } => {
            r.field("x", x.0.clone());
            let (value, exact, err) = match x.resolve(2 * prec + 64) {
                Number::Exact(q) => match qmark::qmark_exact(&q) {
                    Ok(d) => (d.to_float(prec), Some(d.to_rational().to_string()), "0".to_string()),
                    Err(minklab::Error::SizeLimit(_)) => {
                        let v = Float::with_val(prec, qmark::f_eval_rational(&q, prec + 1)? * 2u32);
                        (v, None, bound.clone())
                    }
                    Err(e) => return Err(e.into()),
                },
                Number::Approx(xf) => (qmark::qmark_eval(&xf, prec)?, None, bound.clone()),
            };
            r.table.push([format!("?({})", x.0), real(&value, digits), err.clone()]);
            r.field("value", real(&value, digits));
            r.field("err", err);
            if let Some(e) = exact {
                r.table.push(["exact".to_string(), e.clone(), "0".to_string()]);
                r.field("exact", e);
            }
        }
        QmarkCmd::Inverse { y } => {
            r.field("y", y.0.clone());
            let dyadic = match y.resolve(prec + 64) {
                Number::Exact(q) if q.denom().is_power_of_two() => Some(q),
                _ => None,
            };
            match dyadic {
                Some(q) => {
                    let x = qmark::qmark_inverse_dyadic(&q)?;
                    let v = Float::with_val(prec, &x);
                    r.table.push([format!("?^-1({})", y.0), real(&v, digits), "0".into()]);
                    r.table.push(["exact".to_string(), x.to_string(), "0".into()]);
                    r.field("value", real(&v, digits));
                    r.field("exact", x.to_string());
                    r.field("err", "0");
                }
                None => {
                    let yf = y.resolve(prec + 64).to_float(prec + 64);
                    let v = qmark::qmark_inverse(&yf, prec)?;
                    r.table.push([format!("?^-1({})", y.0), real(&v, digits), bound.clone()]);
                    r.field("value", real(&v, digits));
                    r.field("err", bound);
                }
            }
        }
        QmarkCmd::Fixed => {
            let inner = qmark::fixed_points(prec)?;
            let half = Float::with_val(prec, 0.5);
            let all = [Float::new(prec), inner[0].clone(), half, inner[1].clone(), Float::with_val(prec, 1)];
            let shown: Vec<String> = all.iter().map(|x| real(x, digits)).collect();
            for s in &shown {
                r.table.push(["?(x) = x".to_string(), s.clone(), bound.clone()]);
            }
            r.field("fixed_points", shown);
            r.field("err", bound);
        }
    }
    Ok(())
}

fn tree_cmd(c: &TreeCmd, cfg: &RunConfig, r: &mut Report) -> Result<(), Failure> {
    match c {
        TreeCmd::Gen { n } => {
            let n = n.unwrap_or(cfg.generation_depth);
            let g = tree::generation(n)?;
            r.table = Table::new(&["index", "numerator", "denominator"]);
            let mut members = Vec::with_capacity(g.members.len());
            for (k, f) in g.members.iter().enumerate() {
                r.table.push([k.to_string(), f.num.to_string(), f.den.to_string()]);
                members.push(json!([f.num, f.den]));
            }
            r.field("n", n);
            r.field("members", members);
        }
        TreeCmd::Deviation { n, points, denom } => {
            let n = n.unwrap_or(cfg.generation_depth);
            if *denom == 0 || *points == 0 {
                return Err(Failure::Usage("points and denom must be positive".into()));
            }
            let grid: Vec<Rational> = (1..=*points).map(|k| Rational::from((k, *denom))).collect();
            let devs = tree::deviations(n, &grid)?;
            let worst = devs.iter().max_by(|a, b| a.delta.clone().abs().cmp(&b.delta.clone().abs()));
            let worst = worst.ok_or_else(|| Failure::Usage("empty grid".into()))?;
            let sup = worst.delta.clone().abs();
            let bound = Rational::from((Integer::from(1), Integer::from(1) << n));
            r.ok = sup <= bound;
            r.table = Table::new(&["n", "sup", "at", "bound", "within"]);
            r.table.push([n.to_string(), sci(sup.to_f64()), worst.x.to_string(), format!("2^-{n}"), r.ok.to_string()]);
            r.field("n", n);
            r.field("sup", sci(sup.to_f64()));
            r.field("at", worst.x.to_string());
            r.field("within_bound", r.ok);
        }
    }
    Ok(())
}

fn moments_cmd(cfg: &RunConfig, r: &mut Report) -> Result<(), Failure> {
    let (n, prec) = (cfg.truncation_order, cfg.precision_bits);
    let t = solve_moments(n, prec)?;
    let digits = digits_for(prec);
    let fmt = |v: &[Float]| v.iter().map(|x| real(x, digits)).collect::<Vec<_>>();
    let m = fmt(&t.m[..=n]);
    let big_m = fmt(&t.big_m);
    let c = fmt(&t.c);
    let err: Vec<String> = t.err.iter().map(|e| sci(e.to_f64())).collect();
    let b: Vec<String> = t.fubini.iter().map(|x| x.to_string()).collect();
    r.table = Table::new(&["L", "m", "M", "c", "B", "err"]);
    for l in 0..=n {
        let cl = if l == 0 { String::new() } else { c[l - 1].clone() };
        r.table.push([l.to_string(), m[l].clone(), big_m[l].clone(), cl, b[l].clone(), err[l].clone()]);
    }
    r.notes.push(format!("# truncation error {}", sci(t.truncation_error.to_f64())));
    r.field("order", n);
    r.field("prec_bits", prec);
    r.field("m", m);
    r.field("M", big_m);
    r.field("c", c);
    r.field("B", b);
    r.field("err", err);
    r.field("truncation_error", sci(t.truncation_error.to_f64()));
    Ok(())
}

fn period_row(r: &mut Report, e: &PeriodEvaluation, digits: usize) {
    let value = big_complex(&e.value, digits);
    r.table = Table::new(&["quantity", "value"]);
    r.table.push(["z".to_string(), big_complex(&e.z, digits)]);
    r.table.push(["G(z)".to_string(), value.clone()]);
    r.table.push(["method".to_string(), e.method.to_string()]);
    r.table.push(["err".to_string(), sci(e.err.to_f64())]);
    r.field("z", big_complex(&e.z, digits));
    r.field("value", value);
    r.field("method", e.method.to_string());
    r.field("err", sci(e.err.to_f64()));
}

fn gfun_cmd(c: &GfunCmd, cfg: &RunConfig, r: &mut Report) -> Result<(), Failure> {
    let prec = cfg.precision_bits;
    match c {
        GfunCmd::Eval { z, method, depth } => {
            let zb = z.big(prec);
            let e = match method {
                MethodArg::Quadrature => period::g_quadrature(&zb, *depth)?,
                m => {
                    let t = solve_moments(cfg.truncation_order, prec)?;
                    match m {
                        MethodArg::Power => period::g_power_series(&zb, &t)?,
                        MethodArg::Rational => period::g_rational_series(&zb, &t)?,
                        _ => period::g_eval(&zb, &t, *depth)?,
                    }
                }
            };
            let digits = if e.method == period::Method::Quadrature { 17 } else { digits_for(prec) };
            period_row(r, &e, digits);
        }
        GfunCmd::Check { grid: Grid::Default, tol } => {
            let t = solve_moments(cfg.truncation_order, prec)?;
            r.table = Table::new(&["z", "merged", "three_term", "symmetry"]);
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for (re, im) in suite::functional_grid() {
                let res = period::check_three_term(&BigComplex::from_f64(prec, re, im), &t)?;
                let z = complex(&re.to_string(), &im.to_string());
                worst = worst.max(res.merged).max(res.three_term).max(res.symmetry);
                r.table.push([z.clone(), sci(res.merged), sci(res.three_term), sci(res.symmetry)]);
                rows.push(json!({"z": z, "merged": sci(res.merged), "three_term": sci(res.three_term), "symmetry": sci(res.symmetry)}));
            }
            r.ok = worst < *tol;
            r.notes.push(format!("# max residual {} (tolerance {})", sci(worst), sci(*tol)));
            r.field("residuals", rows);
            r.field("max_residual", sci(worst));
            r.field("tolerance", sci(*tol));
        }
    }
    Ok(())
}

fn eigen_cmd(count: usize, coeffs: bool, cfg: &RunConfig, r: &mut Report) -> Result<(), Failure> {
    let (n, prec) = (cfg.truncation_order, cfg.precision_bits);
    let pairs = spectral::eigenvalues(n, prec, count)?;
    let digits = digits_for(prec);
    r.table = Table::new(&["k", "value", "residual", "digits_stable"]);
    let mut list = Vec::new();
    for (k, p) in pairs.iter().enumerate() {
        let value = real(&p.lambda, digits);
        let residual = sci(p.residual.to_f64());
        r.table.push([(k + 1).to_string(), value.clone(), residual.clone(), p.digits_stable.to_string()]);
        let mut entry = json!({"value": value, "residual": residual, "digits_stable": p.digits_stable});
        if coeffs {
            let v: Vec<String> = p.coeffs.iter().map(|x| real(x, digits)).collect();
            entry["coeffs"] = Value::from(v);
        }
        list.push(entry);
    }
    if coeffs {
        for (k, p) in pairs.iter().enumerate() {
            let v: Vec<String> = p.coeffs.iter().map(|x| real(x, 12)).collect();
            r.notes.push(format!("# coefficients {}: {}", k + 1, v.join(" ")));
        }
    }
    r.field("order", n);
    r.field("eigenvalues", list);
    Ok(())
}

fn residue_cell(i: &Residue) -> String {
    match i {
        Residue::Value(q) => q.to_string(),
        Residue::Infinity => "inf".into(),
        Residue::Outside => String::new(),
    }
}

fn padic_cmd(c: &PadicCmd, r: &mut Report) -> Result<(), Failure> {
    match c {
        PadicCmd::Mu { p, z, nu, empirical } => {
            let closed = padic::mu_closed_form(*p, z, *nu)?;
            r.table = Table::new(&["quantity", "exact", "decimal"]);
            r.table.push(["closed form".to_string(), closed.to_string(), closed.to_f64().to_string()]);
            r.field("p", *p);
            r.field("z", z.to_string());
            r.field("nu", *nu);
            r.field("closed_form", closed.to_string());
            if let Some(n) = empirical {
                let emp = padic::empirical_mu(*p, z, *nu, *n)?;
                let gap = Rational::from(&emp - &closed).abs();
                r.table.push([format!("generation {n}"), emp.to_string(), emp.to_f64().to_string()]);
                r.table.push(["gap".to_string(), gap.to_string(), sci(gap.to_f64())]);
                r.field("empirical", emp.to_string());
                r.field("generation", *n);
                r.field("gap", gap.to_string());
            }
        }
        PadicCmd::Orbit { p, kappa, dump } => {
            let chain = padic::orbit(*p, *kappa)?;
            r.csv_default = dump.is_some();
            match dump {
                Some(Dump::Csv) => {
                    r.table = Table::new(&["state_id", "i", "kappa", "is_outside"]);
                    for (k, s) in chain.states.iter().enumerate() {
                        let outside = s.i == Residue::Outside;
                        r.table.push([k.to_string(), residue_cell(&s.i), s.kappa.to_string(), outside.to_string()]);
                    }
                }
                Some(Dump::Matrix) => {
                    r.table = Table::new(&["row", "col", "num", "den"]);
                    for (row, entries) in chain.rows.iter().enumerate() {
                        for (col, w) in entries {
                            r.table.push([row.to_string(), col.to_string(), w.numer().to_string(), w.denom().to_string()]);
                        }
                    }
                }
                None => {
                    r.table = Table::new(&["quantity", "value"]);
                    r.table.push(["states".to_string(), chain.len().to_string()]);
                    r.table.push(["doubly stochastic".to_string(), chain.is_doubly_stochastic().to_string()]);
                    r.field("doubly_stochastic", chain.is_doubly_stochastic());
                    if chain.len() <= padic::MAX_PRIMITIVITY_STATES {
                        let e = chain.primitive_exponent(4 * chain.len())?;
                        let shown = e.map_or("none".to_string(), |m| m.to_string());
                        r.table.push(["primitive exponent".to_string(), shown.clone()]);
                        r.field("primitive_exponent", shown);
                    }
                }
            }
            let rows: Vec<Value> = r.table.rows.iter().map(|row| Value::from(row.clone())).collect();
            r.field("p", *p);
            r.field("kappa", *kappa);
            r.field("states", chain.len());
            r.field("header", r.table.header.clone());
            r.field("rows", rows);
        }
        PadicCmd::Zeta { p, s } => {
            let s = s.f64();
            let closed = padic::z_p(*p, s)?;
            let shells = padic::z_p_shell_sum(*p, s)?;
            let gap = (closed - shells).norm();
            r.table = Table::new(&["quantity", "value"]);
            r.table.push(["Z_p(s)".to_string(), complex64(closed)]);
            r.table.push(["shell sum".to_string(), complex64(shells)]);
            r.table.push(["difference".to_string(), sci(gap)]);
            r.field("p", *p);
            r.field("s", complex64(s));
            r.field("closed_form", complex64(closed));
            r.field("shell_sum", complex64(shells));
            r.field("difference", sci(gap));
        }
        PadicCmd::ZetaT { s } => {
            let s = s.f64();
            let v = padic::zeta_t(s)?;
            let prod = padic::zeta_t_product_form(s)?;
            r.table = Table::new(&["quantity", "value"]);
            r.table.push(["zeta_T(s)".to_string(), complex64(v)]);
            r.table.push(["product form".to_string(), complex64(prod)]);
            r.field("s", complex64(s));
            r.field("value", complex64(v));
            r.field("product_form", complex64(prod));
        }
        PadicCmd::Charpoly { p } => {
            let chain = padic::markov_matrix(*p)?;
            let poly = padic::characteristic_polynomial(&chain.dense()?);
            r.table = Table::new(&["degree", "coefficient"]);
            for (k, c) in poly.iter().enumerate() {
                r.table.push([k.to_string(), c.to_string()]);
            }
            r.field("p", *p);
            r.field("coefficients", poly.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        }
    }
    Ok(())
}

fn verify_cmd(which: Suite, golden: Option<&PathBuf>, r: &mut Report) -> Result<(), Failure> {
    r.table = Table::new(&["status", "id", "check", "seconds", "budget"]);
    r.field("suite", which.to_possible_value().map(|v| v.get_name().to_string()));
    let data = match golden {
        Some(path) => Golden::load(path),
        None => Ok(Golden::builtin()),
    };
    let data = match data {
        Ok(d) => d,
        Err(e) => {
            r.ok = false;
            r.table.push(["FAIL", "G0", "golden data", "0", "0"]);
            r.notes.push(format!("  FAIL {e}"));
            r.field("checks", vec![json!({"id": "G0", "name": "golden data", "passed": false, "error": e.to_string()})]);
            return Ok(());
        }
    };
    let checks = suite::run_suite(which, data);
    let mut list = Vec::new();
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        r.table.push([
            status.to_string(),
            c.id.to_string(),
            c.name.to_string(),
            format!("{:.2}", c.elapsed.as_secs_f64()),
            c.budget.as_secs().to_string(),
        ]);
        r.notes.push(c.summary());
        r.notes.extend(c.details());
        let subs: Vec<Value> =
            c.subchecks.iter().map(|s| json!({"name": s.name, "observed": s.observed, "target": s.target, "passed": s.passed})).collect();
        list.push(json!({"id": c.id, "name": c.name, "passed": c.passed(), "subchecks": subs, "error": c.error}));
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    r.ok = failed == 0;
    r.notes.push(format!("# {} checks, {} failed", checks.len(), failed));
    r.field("checks", list);
    r.field("failed", failed);
    Ok(())
}

pub(crate) fn format_flag(global: &GlobalArgs) -> Option<Format> {
    if global.json {
        Some(Format::Json)
    } else if global.csv {
        Some(Format::Csv)
    } else {
        None
    }
}
