//! Run configuration: defaults, then a `key=value` file, then command-line flags.

use std::path::{Path, PathBuf};

use ilw_core::evolve::Scheme;

use crate::CliError;

/// Inclusive, evenly spaced moduli `a, …, b` (`n` points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl KRange {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Invalid(format!("k-range {s:?} must look like a:b:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(start.is_finite() && end.is_finite() && start < end && count >= 2) {
            return Err(CliError::Invalid(format!("k-range {s:?} needs a < b and n >= 2")));
        }
        Ok(Self { start, end, count })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.end } else { self.start + step * i as f64 }).collect()
    }
}

/// Every setting a command may read.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub period: f64,
    pub delta: f64,
    pub k: Option<f64>,
    pub k_range: KRange,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub mode: u32,
    pub record_every: usize,
    pub window: usize,
    pub rel_tol: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            period: std::f64::consts::PI,
            delta: 1.0,
            k: None,
            k_range: KRange { start: 0.05, end: 0.94, count: 90 },
            n: 256,
            dt: 1e-3,
            t_end: 50.0,
            scheme: Scheme::LawsonGauss4,
            epsilon: 0.0,
            mode: 2,
            record_every: 100,
            window: 40,
            rel_tol: 1e-8,
            out: PathBuf::from("ilw-out"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| CliError::Invalid(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    /// Apply one `key = value` setting; keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key.trim() {
            "L" => self.period = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "k" => self.k = Some(parse(key, value)?),
            "k-range" => self.k_range = KRange::parse(value.trim())?,
            "N" => self.n = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "t-end" => self.t_end = parse(key, value)?,
            "scheme" => self.scheme = value.trim().parse().map_err(|e| CliError::Invalid(format!("{e}")))?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "mode" => self.mode = parse(key, value)?,
            "record-every" => self.record_every = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "rel-tol" => self.rel_tol = parse(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            other => return Err(CliError::Invalid(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Read flat `key=value` lines; blank lines and `#` comments are skipped.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Invalid(format!("{}:{}: expected key=value", path.display(), line_no + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Invalid(format!("{name} = {v} must be positive and finite")))
            }
        };
        positive("L", self.period)?;
        positive("delta", self.delta)?;
        positive("dt", self.dt)?;
        positive("t-end", self.t_end)?;
        positive("rel-tol", self.rel_tol)?;
        if self.n < 64 || !self.n.is_multiple_of(2) {
            return Err(CliError::Invalid(format!("N = {} must be even and at least 64", self.n)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::Invalid(format!("epsilon = {} must be nonnegative", self.epsilon)));
        }
        if self.mode == 0 {
            return Err(CliError::Invalid("mode must be at least 1".into()));
        }
        if self.record_every == 0 || self.window == 0 {
            return Err(CliError::Invalid("record-every and window must be at least 1".into()));
        }
        if let Some(k) = self.k {
            if !k.is_finite() {
                return Err(CliError::Invalid(format!("k = {k} must be finite")));
            }
        }
        Ok(())
    }

    pub fn k_or(&self, default: f64) -> f64 {
        self.k.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_includes_both_ends() {
        let r = KRange::parse("0.1:0.5:5").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[4], 0.5);
        assert!((v[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn k_range_rejects_malformed_input() {
        for s in ["0.1:0.5", "0.5:0.1:4", "a:b:3", "0.1:0.5:1"] {
            assert!(KRange::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn config_lines_are_applied() {
        let dir = std::env::temp_dir().join(format!("ilw-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nL = 6.0\n\nk=0.4\nscheme = ifrk4\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(&path).unwrap();
        assert_eq!((cfg.period, cfg.k, cfg.scheme), (6.0, Some(0.4), Scheme::IntegratingFactorRk4));
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(cfg.load_file(&path).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
