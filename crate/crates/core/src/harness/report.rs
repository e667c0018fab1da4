use super::config::ExperimentConfig;
use super::ExperimentKind;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Which statement an experiment exercises: a stable id and a one-line
/// description of the claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Anchor {
    pub id: &'static str,
    pub statement: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// `|measured − target| ≤ tolerance`.
    Within(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, relation: Relation, target: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => measured <= target,
            Relation::AtLeast => measured >= target,
            Relation::Within(tol) => (measured - target).abs() <= tol,
        };
        Self { name: name.into(), measured, target, relation, pass }
    }

    /// A yes/no outcome encoded as `1`/`0` against the expected value.
    pub fn flag(name: impl Into<String>, measured: bool, expected: bool) -> Self {
        Self::new(name, measured as u8 as f64, Relation::Within(0.0), expected as u8 as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

/// A plot-ready table written next to the JSON report.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub kind: ExperimentKind,
    pub paper_anchor: Vec<Anchor>,
    pub config: BTreeMap<String, String>,
    pub measured: Vec<Quantity>,
    pub target: Vec<Quantity>,
    pub checks: Vec<Check>,
    /// Kind-specific structured results.
    pub details: serde_json::Value,
    pub pass: bool,
    pub runtime_ms: u64,
    #[serde(skip)]
    pub traces: Vec<Trace>,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig, anchors: &[Anchor]) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            kind: cfg.kind,
            paper_anchor: anchors.to_vec(),
            config: cfg.params.clone(),
            measured: Vec::new(),
            target: Vec::new(),
            checks: Vec::new(),
            details: serde_json::Value::Null,
            pass: true,
            runtime_ms: 0,
            traces: Vec::new(),
        }
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measured.push(Quantity { name: name.into(), value });
    }

    /// Records a check; the report passes only if every check does.
    pub fn check(&mut self, c: Check) -> bool {
        self.measured.push(Quantity { name: c.name.clone(), value: c.measured });
        self.target.push(Quantity { name: c.name.clone(), value: c.target });
        self.pass &= c.pass;
        let pass = c.pass;
        self.checks.push(c);
        pass
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Writes every trace as `<kind>_<name>.csv` under `dir`.
    pub fn write_traces(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        self.traces
            .iter()
            .map(|t| {
                let path = dir.join(format!("{}_{}.csv", self.kind, t.name));
                std::fs::write(&path, t.to_csv())?;
                Ok(path)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_conjunction_of_checks() {
        let cfg = ExperimentConfig::defaults(ExperimentKind::DensityBound);
        let mut r = ExperimentReport::new(&cfg, &[]);
        assert!(r.check(Check::new("a", 1.0, Relation::AtMost, 2.0)));
        assert!(r.pass);
        assert!(!r.check(Check::new("b", 1.0, Relation::Within(0.1), 2.0)));
        assert!(!r.pass);
        assert_eq!(r.failed_checks().len(), 1);
        assert_eq!(r.target.len(), 2);
    }

    #[test]
    fn csv_has_header() {
        let mut t = Trace::new("x", &["t", "value"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(t.to_csv(), "t,value\n1e0,5e-1\n");
    }

    #[test]
    fn json_nulls_non_finite() {
        let cfg = ExperimentConfig::defaults(ExperimentKind::DensityBound);
        let mut r = ExperimentReport::new(&cfg, &[]);
        r.measure("norm", f64::INFINITY);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["measured"][0]["value"].is_null());
    }
}
