use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::mass::MassVector;
use super::ricci::Calibration;
use crate::reference::CausalClass;

pub const REPORT_SCHEMA: &str = "hypmass-report/1";

/// Outcome of one identity or consistency check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckOutcome {
    /// Passes when `value <= tolerance`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value <= tolerance, value, tolerance, detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Per-radius tables are indexed `[radius][a]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub schema: String,
    pub metric: String,
    pub dimension: usize,
    pub resolution: usize,
    pub radii: Vec<f64>,
    pub flux: Vec<Vec<f64>>,
    pub equator: Vec<Vec<f64>>,
    pub mass: Vec<Vec<f64>>,
    pub extrapolated: Vec<f64>,
    pub error: Vec<f64>,
    pub exponent: Vec<f64>,
    pub converged: Vec<bool>,
    pub lorentz_norm: Option<f64>,
    pub causal_class: Option<CausalClass>,
    pub ricci_mass: Option<Vec<Vec<f64>>>,
    pub d_n: Option<f64>,
    pub calibration: Option<Calibration>,
    pub residuals: BTreeMap<String, f64>,
    pub checks: Vec<CheckOutcome>,
    pub config: serde_json::Value,
    pub errors: Vec<String>,
}

impl MassReport {
    pub fn new(metric: impl Into<String>, dimension: usize, resolution: usize, radii: &[f64]) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            metric: metric.into(),
            dimension,
            resolution,
            radii: radii.to_vec(),
            flux: Vec::new(),
            equator: Vec::new(),
            mass: Vec::new(),
            extrapolated: Vec::new(),
            error: Vec::new(),
            exponent: Vec::new(),
            converged: Vec::new(),
            lorentz_norm: None,
            causal_class: None,
            ricci_mass: None,
            d_n: None,
            calibration: None,
            residuals: BTreeMap::new(),
            checks: Vec::new(),
            config: serde_json::Value::Null,
            errors: Vec::new(),
        }
    }

    pub fn record_mass(&mut self, mv: &MassVector) {
        self.radii = mv.samples.iter().map(|s| s.radius).collect();
        self.flux = mv.samples.iter().map(|s| s.flux.clone()).collect();
        self.equator = mv.samples.iter().map(|s| s.equator.clone()).collect();
        self.mass = mv.samples.iter().map(|s| s.mass()).collect();
        self.extrapolated = mv.fits.iter().map(|f| f.mass_inf).collect();
        self.error = mv.fits.iter().map(|f| f.error).collect();
        self.exponent = mv.fits.iter().map(|f| f.exponent).collect();
        self.converged = mv.fits.iter().map(|f| f.converged).collect();
        self.lorentz_norm = Some(mv.vector.norm_squared());
        self.causal_class = Some(mv.class);
    }

    pub fn record_calibration(&mut self, c: &Calibration) {
        self.d_n = Some(c.d_n);
        self.calibration = Some(c.clone());
    }

    pub fn push_check(&mut self, c: CheckOutcome) {
        self.residuals.insert(c.name.clone(), c.value);
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned plain-text convergence table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let n = self.dimension;
        let _ = writeln!(out, "metric {}  n = {}  N = {}", self.metric, n, self.resolution);
        if !self.mass.is_empty() {
            let mut head = format!("{:>12}", "r");
            for a in 0..n {
                head += &format!(
                    " {:>16} {:>16} {:>16}",
                    format!("flux[{a}]"),
                    format!("equator[{a}]"),
                    format!("mass[{a}]")
                );
            }
            let _ = writeln!(out, "{}", head);
            for (j, r) in self.radii.iter().enumerate() {
                let mut line = format!("{:>12.4}", r);
                for a in 0..n {
                    let cell = |t: &Vec<Vec<f64>>| t.get(j).and_then(|row| row.get(a)).copied().unwrap_or(f64::NAN);
                    line += &format!(
                        " {:>16.9e} {:>16.9e} {:>16.9e}",
                        cell(&self.flux),
                        cell(&self.equator),
                        cell(&self.mass)
                    );
                }
                let _ = writeln!(out, "{}", line);
            }
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:>4} {:>18} {:>12} {:>10} {:>10}",
                "a", "extrapolated", "error", "exponent", "converged"
            );
            for a in 0..self.extrapolated.len() {
                let _ = writeln!(
                    out,
                    "{:>4} {:>18.10e} {:>12.3e} {:>10.4} {:>10}",
                    a, self.extrapolated[a], self.error[a], self.exponent[a], self.converged[a]
                );
            }
        }
        if let (Some(q), Some(c)) = (self.lorentz_norm, self.causal_class) {
            let _ = writeln!(out, "lorentz norm {:.10e}  class {}", q, c);
        }
        if let Some(d) = self.d_n {
            let _ = writeln!(out, "d_n {:.6}", d);
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out);
            let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "{:<w$}  {:<4}  {:>12.4e}  <= {:>10.3e}  {}",
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.value,
                    c.tolerance,
                    c.detail,
                    w = w
                );
            }
        }
        for e in &self.errors {
            let _ = writeln!(out, "error: {}", e);
        }
        out
    }
}
