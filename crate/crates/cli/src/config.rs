//! Run configuration.
//!
//! Settings are resolved in three layers, later ones winning:
//! built-in defaults, then a `key = value` file given by `--config`, then
//! command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use milne_core::special_fn::ALPHA_MAX;
use serde::Serialize;

use crate::acceptance::Fixture;
use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

/// Partial settings from one layer.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// Scattering exponent.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Far-field temperature gradient.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Directions: `a,b,c`, `lin:a:b:n` or `geom:a:b:n`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid_mu: Option<String>,
    /// Depths, same syntax as `--grid-mu`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid_x: Option<String>,
    /// Saddle root residual and source-iteration tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Nodes of the automatic θ table.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Source-iteration cap for `oracle`.
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Gauss nodes per half-range of directions for `oracle`.
    #[arg(long, global = true)]
    pub angles: Option<usize>,
    /// Spatial cells for `oracle`.
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    #[arg(skip)]
    pub fixture: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub k: f64,
    pub grid_mu: Option<Vec<f64>>,
    pub grid_x: Option<Vec<f64>>,
    pub tol: f64,
    pub nodes: usize,
    pub max_iter: usize,
    pub angles: usize,
    pub cells: usize,
    pub format: Format,
    // Where and how fast results are produced does not change them, so
    // these are not echoed.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Fixture::is_default")]
    pub fixture: Fixture,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.0,
            k: 1.0,
            grid_mu: None,
            grid_x: None,
            tol: 1e-10,
            nodes: 1600,
            max_iter: 1000,
            angles: 16,
            cells: 600,
            format: Format::Csv,
            out: None,
            threads: None,
            fixture: Fixture::default(),
        }
    }
}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Parses `a,b,c`, `lin:a:b:n` or `geom:a:b:n`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| usage(format!("grid value {t:?}: {e}")));
    let s = s.trim();
    if let Some((kind, rest)) = s.split_once(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(usage(format!("grid {s:?}: expected {kind}:start:end:count")));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|e| usage(format!("grid count {n:?}: {e}")))?;
        if n == 0 {
            return Err(usage(format!("grid {s:?} is empty")));
        }
        let t = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        return match kind {
            "lin" => Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * t(i) }).collect()),
            "geom" if a > 0.0 && b > 0.0 => {
                Ok((0..n).map(|i| if i + 1 == n { b } else { a * (b / a).powf(t(i)) }).collect())
            }
            "geom" => Err(usage(format!("geometric grid {s:?} needs positive ends"))),
            _ => Err(usage(format!("unknown grid kind {kind:?}"))),
        };
    }
    let v = s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(usage("grid is empty"));
    }
    Ok(v)
}

/// Reads a `key = value` file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!("config line {}: expected key = value", lineno + 1)));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: &dyn fmt::Display| usage(format!("config line {}: {key}: {e}", lineno + 1));
        let float = || value.parse::<f64>().map_err(|e| bad(&e));
        let count = || value.parse::<usize>().map_err(|e| bad(&e));
        match key {
            "alpha" => o.alpha = Some(float()?),
            "k" => o.k = Some(float()?),
            "grid_mu" => o.grid_mu = Some(value.to_string()),
            "grid_x" => o.grid_x = Some(value.to_string()),
            "tol" => o.tol = Some(float()?),
            "format" => o.format = Some(value.parse().map_err(|e: String| bad(&e))?),
            "out" => o.out = Some(PathBuf::from(value)),
            "threads" => o.threads = Some(count()?),
            "nodes" => o.nodes = Some(count()?),
            "max_iter" => o.max_iter = Some(count()?),
            "angles" => o.angles = Some(count()?),
            "cells" => o.cells = Some(count()?),
            _ => match key.strip_prefix("fixture.") {
                Some(name) if Fixture::has_key(name) => o.fixture.push((name.to_string(), float()?)),
                _ => return Err(usage(format!("config line {}: unknown key {key:?}", lineno + 1))),
            },
        }
    }
    Ok(o)
}

impl RunConfig {
    /// Applies one layer on top of `self`.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(g) = &o.grid_mu {
            self.grid_mu = Some(parse_grid(g)?);
        }
        if let Some(g) = &o.grid_x {
            self.grid_x = Some(parse_grid(g)?);
        }
        if let Some(v) = o.tol {
            self.tol = v;
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = o.threads {
            self.threads = Some(v);
        }
        if let Some(v) = o.nodes {
            self.nodes = v;
        }
        if let Some(v) = o.max_iter {
            self.max_iter = v;
        }
        if let Some(v) = o.angles {
            self.angles = v;
        }
        if let Some(v) = o.cells {
            self.cells = v;
        }
        for (name, v) in &o.fixture {
            self.fixture.set(name, *v);
        }
        Ok(())
    }

    /// Defaults, then the file named by `file`, then `flags`.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(p) = file {
            cfg.apply(&read_config_file(p)?)?;
        }
        cfg.apply(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(0.0..=ALPHA_MAX).contains(&self.alpha) {
            return Err(usage(format!("alpha = {} is outside [0, {ALPHA_MAX}]", self.alpha)));
        }
        if !self.k.is_finite() {
            return Err(usage(format!("k = {} is not finite", self.k)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(usage(format!("tol = {} must be positive", self.tol)));
        }
        for (name, g) in [("grid_mu", &self.grid_mu), ("grid_x", &self.grid_x)] {
            if let Some(g) = g {
                if g.is_empty() || g.iter().any(|v| !v.is_finite()) {
                    return Err(usage(format!("{name} must be nonempty and finite")));
                }
            }
        }
        if let Some(x) = self.grid_x.iter().flatten().find(|x| **x < 0.0) {
            return Err(usage(format!("grid_x contains negative depth {x}")));
        }
        if self.nodes < 4 {
            return Err(usage(format!("nodes = {} (need at least 4)", self.nodes)));
        }
        for (name, v) in [("max_iter", self.max_iter), ("angles", self.angles), ("cells", self.cells)] {
            if v == 0 {
                return Err(usage(format!("{name} must be positive")));
            }
        }
        if self.threads == Some(0) {
            return Err(usage("threads must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_grid("lin:-1:1:5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g = parse_grid("geom:1e-3:10:5").unwrap();
        assert_eq!(g[4], 10.0);
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("lin:0:1:0").is_err());
        assert!(parse_grid("geom:0:1:3").is_err());
    }

    #[test]
    fn layers_override_in_order() {
        let file = parse_config("alpha = 1\n# comment\nk = 2  # trailing\ntol=1e-8\n").unwrap();
        let flags = Overrides { alpha: Some(0.5), ..Overrides::default() };
        let mut cfg = RunConfig::default();
        cfg.apply(&file).unwrap();
        cfg.apply(&flags).unwrap();
        assert_eq!((cfg.alpha, cfg.k, cfg.tol), (0.5, 2.0, 1e-8));
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("alpha").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            RunConfig { alpha: -1.0, ..RunConfig::default() },
            RunConfig { tol: 0.0, ..RunConfig::default() },
            RunConfig { grid_mu: Some(vec![]), ..RunConfig::default() },
            RunConfig { grid_x: Some(vec![-1.0]), ..RunConfig::default() },
            RunConfig { threads: Some(0), ..RunConfig::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(CliError::Usage(_))), "{c:?}");
        }
        RunConfig::default().validate().unwrap();
    }
}
