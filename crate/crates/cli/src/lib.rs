//! Command-line front end for `minklab` and its verification suite.
//!
//! [`run`] takes the argument vector and returns the rendered output with its exit
//! code: 0 on success, 1 on a usage error, 2 when a computation or a check fails.
//!
//! ```
//! let out = minklab_cli::run(["minklab", "qmark", "eval", "--x", "1/2"]);
//! assert_eq!(out.code, 0);
//! let row: Vec<&str> = out.stdout.lines().nth(1).unwrap().split_whitespace().collect();
//! assert_eq!(row, ["?(1/2)", "0.5", "0"]);
//! ```
//!
//! ```
//! let out = minklab_cli::run(["minklab", "padic", "mu", "--p", "2", "--z", "0", "--nu", "0"]);
//! assert_eq!(out.code, 0);
//! assert!(out.stdout.contains("2/3"));
//! ```
//!
//! ```
//! let out = minklab_cli::run(["minklab", "moments", "--order", "16", "--prec", "96", "--json"]);
//! assert_eq!(out.code, 0);
//! let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
//! let m1: f64 = v["m"][1].as_str().unwrap().parse().unwrap();
//! assert!((m1 - 0.5).abs() < 1e-6);
//! assert_eq!(v["prec_bits"], 96);
//! ```
//!
//! ```
//! let out = minklab_cli::run(["minklab", "moments", "--bogus"]);
//! assert_eq!(out.code, 1);
//! ```

pub mod commands;
pub mod config;
pub mod golden;
pub mod number;
pub mod report;
pub mod suite;

use clap::error::ErrorKind;
use clap::Parser;
use commands::{Cli, Failure};
use config::{Overrides, RunConfig};
use report::Report;
use std::ffi::OsString;
use std::time::Instant;

/// Rendered output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: String) -> Outcome {
        Outcome { code: 1, stdout: String::new(), stderr: msg }
    }
}

/// Run with the MINKLAB_PREC variable taken from the environment.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var("MINKLAB_PREC").ok();
    run_with_env(argv, env.as_deref())
}

pub fn run_with_env<I, T>(argv: I, env_prec: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: 0, stdout: text, stderr: String::new() },
                _ => Outcome::usage(text),
            };
        }
    };
    let file = match &cli.global.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match config::parse_file(&text) {
                Ok(o) => Some(o),
                Err(e) => return Outcome::usage(format!("error: {}: {e}\n", path.display())),
            },
            Err(e) => return Outcome::usage(format!("error: {}: {e}\n", path.display())),
        },
        None => None,
    };
    let flags =
        Overrides { prec: cli.global.prec, order: cli.global.order, gen: cli.global.gen, format: commands::format_flag(&cli.global) };
    let cfg = match RunConfig::resolve(env_prec, file.as_ref(), &flags) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(format!("error: {e}\n")),
    };
    let echo = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    match commands::execute(&cli.command, &cfg, Report::new(echo, cfg.clone())) {
        Ok(mut report) => {
            report.wall_time = start.elapsed();
            let code = if report.ok { 0 } else { 2 };
            Outcome { code, stdout: report.render(cfg.output_format), stderr: String::new() }
        }
        Err(Failure::Usage(m)) => Outcome::usage(format!("error: {m}\n")),
        Err(Failure::Library(m)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}
