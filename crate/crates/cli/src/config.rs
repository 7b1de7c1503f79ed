//! Run configuration: defaults, the MINKLAB_PREC variable, a key=value file and flags,
//! in increasing order of precedence.

use serde_json::{json, Value};
use std::fmt;

pub const DEFAULT_PREC: u32 = 192;
pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_GEN: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub truncation_order: usize,
    pub generation_depth: u32,
    pub output_format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: DEFAULT_PREC,
            truncation_order: DEFAULT_ORDER,
            generation_depth: DEFAULT_GEN,
            output_format: Format::Text,
        }
    }
}

/// Values set by one configuration source.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub prec: Option<u32>,
    pub order: Option<usize>,
    pub gen: Option<u32>,
    pub format: Option<Format>,
}

impl Overrides {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(p) = self.prec {
            c.precision_bits = p;
        }
        if let Some(n) = self.order {
            c.truncation_order = n;
        }
        if let Some(g) = self.gen {
            c.generation_depth = g;
        }
        if let Some(f) = self.format {
            c.output_format = f;
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T, String> {
    v.parse().map_err(|_| format!("config line {line}: bad value {v:?} for {key}"))
}

/// Parse a configuration file. Keys: prec, order, gen, format; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Overrides, String> {
    let mut o = Overrides::default();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| format!("config line {line}: expected key = value"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "prec" => o.prec = Some(parse_value(key, value, line)?),
            "order" => o.order = Some(parse_value(key, value, line)?),
            "gen" => o.gen = Some(parse_value(key, value, line)?),
            "format" => {
                o.format = Some(match value {
                    "text" => Format::Text,
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(format!("config line {line}: format must be text, json or csv")),
                })
            }
            _ => return Err(format!("config line {line}: unknown key {key:?}")),
        }
    }
    Ok(o)
}

impl RunConfig {
    /// Layer the sources and validate the result.
    pub fn resolve(env_prec: Option<&str>, file: Option<&Overrides>, flags: &Overrides) -> Result<RunConfig, String> {
        let mut c = RunConfig::default();
        if let Some(v) = env_prec {
            c.precision_bits = v.trim().parse().map_err(|_| format!("MINKLAB_PREC: bad value {v:?}"))?;
        }
        if let Some(f) = file {
            f.apply(&mut c);
        }
        flags.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(53..=1 << 16).contains(&self.precision_bits) {
            return Err(format!("precision {} outside 53..=65536 bits", self.precision_bits));
        }
        if !(8..=512).contains(&self.truncation_order) {
            return Err(format!("order {} outside 8..=512", self.truncation_order));
        }
        if !(1..=minklab::tree::MAX_STREAMED).contains(&self.generation_depth) {
            return Err(format!("generation {} outside 1..={}", self.generation_depth, minklab::tree::MAX_STREAMED));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "prec_bits": self.precision_bits,
            "order": self.truncation_order,
            "gen": self.generation_depth,
            "format": self.output_format.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = parse_file("# comment\nprec = 256\norder=32\n\nformat = csv # trailing\n").unwrap();
        let flags = Overrides { order: Some(16), ..Default::default() };
        let c = RunConfig::resolve(Some("100"), Some(&file), &flags).unwrap();
        assert_eq!(c.precision_bits, 256);
        assert_eq!(c.truncation_order, 16);
        assert_eq!(c.generation_depth, DEFAULT_GEN);
        assert_eq!(c.output_format, Format::Csv);
        let c = RunConfig::resolve(Some("100"), None, &Overrides::default()).unwrap();
        assert_eq!(c.precision_bits, 100);
        assert_eq!(RunConfig::resolve(None, None, &Overrides::default()).unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_file("prec 12").is_err());
        assert!(parse_file("colour = red").is_err());
        assert!(parse_file("prec = many").is_err());
        assert!(RunConfig::resolve(Some("x"), None, &Overrides::default()).is_err());
        let flags = Overrides { prec: Some(8), ..Default::default() };
        assert!(RunConfig::resolve(None, None, &flags).is_err());
    }
}
