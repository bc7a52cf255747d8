//! Result envelopes and tabular output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use milne_core::quadrature::QuadConfig;
use milne_core::special_fn::DEFAULT_OMEGA_CUT;
use serde::{Serialize, Serializer};

use crate::config::RunConfig;

/// Error attached to a reported value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Uncertainty {
    Estimate(f64),
    /// Exact up to rounding, e.g. a closed form or a count.
    Exact,
}

impl Serialize for Uncertainty {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Uncertainty::Estimate(e) => s.serialize_f64(*e),
            Uncertainty::Exact => s.serialize_str("exact-by-construction"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reported {
    pub value: f64,
    pub error: Uncertainty,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub quadrature_order: usize,
    pub quadrature_max_depth: usize,
    pub omega_cut: f64,
}

impl Default for Provenance {
    fn default() -> Self {
        let q = QuadConfig::default();
        Provenance {
            version: env!("CARGO_PKG_VERSION"),
            quadrature_order: q.order,
            quadrature_max_depth: q.max_depth,
            omega_cut: DEFAULT_OMEGA_CUT,
        }
    }
}

/// How table cells are printed in CSV.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Digits {
    /// Shortest decimal that round-trips.
    #[default]
    Shortest,
    /// 17 significant digits.
    Full,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    #[serde(skip)]
    pub digits: Digits,
}

/// Shortest round-trip decimal; exponent form outside `[1e-3, 1e16)`.
pub fn shortest(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-3..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Table {
    pub fn new(columns: Vec<&'static str>, digits: Digits) -> Self {
        Table { columns, rows: Vec::new(), digits }
    }

    /// Header row, comma delimiter, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match self.digits {
                    Digits::Shortest => out.push_str(&shortest(*v)),
                    Digits::Full => write!(out, "{v:.16e}").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelope {
    pub command: &'static str,
    pub inputs: RunConfig,
    pub values: BTreeMap<String, Reported>,
    pub provenance: Provenance,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl Envelope {
    pub fn new(command: &'static str, inputs: &RunConfig) -> Self {
        Envelope {
            command,
            inputs: inputs.clone(),
            values: BTreeMap::new(),
            provenance: Provenance::default(),
            diagnostics: Vec::new(),
            table: None,
        }
    }

    pub fn put(&mut self, name: &str, value: f64, error: Uncertainty) {
        self.values.insert(name.to_string(), Reported { value, error });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    /// The table, or the named values as `name,value,error` rows.
    pub fn to_csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.to_csv();
        }
        let mut out = String::from("name,value,error\n");
        for (name, r) in &self.values {
            let err = match r.error {
                Uncertainty::Estimate(e) => shortest(e),
                Uncertainty::Exact => "exact-by-construction".into(),
            };
            writeln!(out, "{name},{},{err}", shortest(r.value)).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #[test]
        fn every_finite_value_round_trips(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            prop_assert_eq!(shortest(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
            let full = format!("{x:.16e}");
            prop_assert_eq!(full.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn shortest_round_trips() {
        for x in [0.71045, 1e-7, -3.5e20, 0.1 + 0.2, 12345.678, 0.0] {
            assert_eq!(shortest(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(shortest(1e-7), "1e-7");
        assert_eq!(shortest(0.5), "0.5");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["mu", "theta"], Digits::Full);
        t.rows.push(vec![0.5, 1.0 / 3.0]);
        assert_eq!(t.to_csv(), "mu,theta\n5.0000000000000000e-1,3.3333333333333331e-1\n");
        t.digits = Digits::Shortest;
        assert_eq!(t.to_csv(), "mu,theta\n0.5,0.3333333333333333\n");
    }

    #[test]
    fn exact_marker() {
        let mut e = Envelope::new("v1", &RunConfig::default());
        e.put("kappa", -1.0, Uncertainty::Exact);
        e.put("v1", 0.71, Uncertainty::Estimate(1e-9));
        let j: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(j["values"]["kappa"]["error"], "exact-by-construction");
        assert_eq!(j["values"]["v1"]["error"], 1e-9);
        assert_eq!(e.to_csv(), "name,value,error\nkappa,-1,exact-by-construction\nv1,0.71,1e-9\n");
    }
}
