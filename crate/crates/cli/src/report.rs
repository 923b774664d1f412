//! JSON report, CSV writer and fixed float formatting.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Float text with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
}

/// Machine-readable record of one command run. Keys serialize in a fixed order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    pub wall_ms: u64,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            assertions: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_string(), value.into());
    }

    /// Record `value < tolerance`.
    pub fn below(&mut self, name: &str, value: f64, tolerance: f64) {
        self.check(name, value < tolerance, value, tolerance);
    }

    pub fn check(&mut self, name: &str, pass: bool, value: f64, tolerance: f64) {
        self.assertions.push(Assertion { name: name.to_string(), pass, value, tolerance });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.assertions.iter().filter(|a| !a.pass).map(|a| a.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per assertion.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for a in &self.assertions {
            s.push_str(&format!(
                "[{}] {}: {:.6e} (tolerance {:.1e})\n",
                if a.pass { "PASS" } else { "FAIL" },
                a.name,
                a.value,
                a.tolerance
            ));
        }
        s
    }
}

/// Write a CSV with optional `# key = value` preamble lines and 17-digit floats.
pub fn write_csv(path: &Path, preamble: &[(&str, f64)], header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut text = String::new();
    for (k, v) in preamble {
        text.push_str(&format!("# {k} = {}\n", fmt17(*v)));
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).map_err(CliError::from_display)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt17(*v))).map_err(CliError::from_display)?;
    }
    let body = w.into_inner().map_err(CliError::from_display)?;
    text.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    std::fs::write(path, text).map_err(CliError::from_display)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(-2.5), "-2.5000000000000000e0");
        let x = 0.944_085_037_408_123_4_f64;
        assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn report_keys_are_sorted_and_failures_listed() {
        let mut r = Report::new("demo");
        r.output("zeta", 1.0);
        r.output("alpha", 2.0);
        r.below("small", 1e-3, 1e-6);
        r.below("fine", 1e-9, 1e-6);
        let json = r.to_json();
        assert!(json.find("alpha").unwrap() < json.find("zeta").unwrap());
        assert!(!r.passed());
        assert_eq!(r.failures(), vec!["small"]);
    }
}
