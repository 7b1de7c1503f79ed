//! Reference values read from a `key = value ; tolerance ; origin` file.

use crate::number::parse_rational;
use rug::Rational;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// The reference file shipped with the crate.
pub const BUILTIN: &str = include_str!("../data/golden.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Published,
    Derived,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: String,
    pub tol: f64,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenError(pub String);

impl fmt::Display for GoldenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "golden data: {}", self.0)
    }
}

impl std::error::Error for GoldenError {}

#[derive(Clone, Debug, Default)]
pub struct Golden {
    entries: BTreeMap<String, Entry>,
}

impl Golden {
    pub fn parse(text: &str) -> Result<Golden, GoldenError> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| GoldenError(format!("line {}: {m}", k + 1));
            let (key, rest) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let parts: Vec<&str> = rest.split(';').map(str::trim).collect();
            let [value, tol, origin] = parts[..] else {
                return Err(err("expected value ; tolerance ; origin"));
            };
            let tol: f64 = tol.parse().map_err(|_| err("bad tolerance"))?;
            let origin = match origin {
                "published" => Origin::Published,
                "derived" => Origin::Derived,
                _ => return Err(err("origin must be published or derived")),
            };
            let entry = Entry { value: value.to_string(), tol, origin };
            if entries.insert(key.trim().to_string(), entry).is_some() {
                return Err(err("duplicate key"));
            }
        }
        Ok(Golden { entries })
    }

    pub fn builtin() -> Golden {
        Golden::parse(BUILTIN).expect("built-in golden data parses")
    }

    pub fn load(path: &Path) -> Result<Golden, GoldenError> {
        let text = std::fs::read_to_string(path).map_err(|e| GoldenError(format!("{}: {e}", path.display())))?;
        Golden::parse(&text)
    }

    pub fn entry(&self, key: &str) -> Result<&Entry, GoldenError> {
        self.entries.get(key).ok_or_else(|| GoldenError(format!("missing key {key}")))
    }

    /// (value, tolerance) with the value read as a double.
    pub fn f64(&self, key: &str) -> Result<(f64, f64), GoldenError> {
        let e = self.entry(key)?;
        let v = e.value.parse().map_err(|_| GoldenError(format!("{key}: {:?} is not a number", e.value)))?;
        Ok((v, e.tol))
    }

    /// (value, tolerance) with the value read exactly.
    pub fn rational(&self, key: &str) -> Result<(Rational, f64), GoldenError> {
        let e = self.entry(key)?;
        let v = parse_rational(&e.value).map_err(|m| GoldenError(format!("{key}: {m}")))?;
        Ok((v, e.tol))
    }

    /// A polynomial written as `scale [c0,c1,..] [c0,..] ..`, expanded, constant term first.
    pub fn polynomial(&self, key: &str) -> Result<Vec<Rational>, GoldenError> {
        let e = self.entry(key)?;
        let bad = |m: &str| GoldenError(format!("{key}: {m}"));
        let (scale, factors) = e.value.split_once('[').ok_or_else(|| bad("expected [coefficients]"))?;
        let mut poly = vec![parse_rational(scale).map_err(|m| bad(&m))?];
        for f in format!("[{factors}").split('[').skip(1) {
            let body = f.trim().strip_suffix(']').ok_or_else(|| bad("unclosed ["))?;
            let coeffs = body.split(',').map(|c| parse_rational(c).map_err(|m| bad(&m))).collect::<Result<Vec<_>, _>>()?;
            poly = minklab::padic::poly_mul(&poly, &coeffs);
        }
        Ok(poly)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
