//! Per-input audits of the size and time bounds.

use serde::{Deserialize, Serialize};

use super::{fit_exponent, Measurement};
use crate::cost::COST_MODEL_VERSION;
use crate::element::HElement;
use crate::engine::{evaluate, EvalOptions};
use crate::error::EvalError;
use crate::system::GnfSystem;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AuditOptions {
    pub force: bool,
    pub fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub w: String,
    #[serde(flatten)]
    pub measurement: Measurement,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Size,
    Time,
    Runtime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub input: String,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub count: usize,
    pub violations: usize,
    pub max_time_ratio: f64,
    pub max_size_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub system: String,
    pub function: String,
    pub cost_model_version: String,
    pub inputs: Vec<AuditRow>,
    pub violations: Vec<Violation>,
    pub fitted_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    pub summary: AuditSummary,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The inputs array, one row per input.
    pub fn to_csv(&self) -> String {
        let mut out = csv::Writer::from_writer(Vec::new());
        out.write_record(["w", "size", "rank", "steps", "output_size", "bound_size", "bound_time", "ok"])
            .expect("in-memory write");
        for r in &self.inputs {
            let m = &r.measurement;
            out.write_record([
                r.w.clone(),
                m.input_size.to_string(),
                m.input_rank.to_string(),
                m.steps.to_string(),
                m.output_size.to_string(),
                m.bound_size.to_string(),
                m.bound_time.to_string(),
                r.ok.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Evaluates `f_i` on each input. Per-input evaluation errors become
/// `runtime` violations; only a rejected system or unknown symbol aborts.
pub fn audit(
    sys: &GnfSystem,
    system: &str,
    i: usize,
    inputs: &[HElement],
    opts: AuditOptions,
) -> Result<AuditReport, EvalError> {
    if !opts.force && !sys.accepted() {
        return Err(EvalError::NotAccepted);
    }
    let family = sys.function(i)?.family;
    let eval_opts = EvalOptions {
        force: opts.force,
        ..EvalOptions::default()
    };
    let mut rows = Vec::with_capacity(inputs.len());
    let mut violations = Vec::new();
    for w in inputs {
        let input = w.render();
        let (measurement, error) = match evaluate(sys, i, w, eval_opts) {
            Ok(out) => (out.measurement, None),
            Err(e) => (Measurement::new(family, w, None, 0), Some(e.to_string())),
        };
        if let Some(e) = &error {
            violations.push(Violation {
                input: input.clone(),
                kind: ViolationKind::Runtime,
                detail: e.clone(),
            });
        }
        if !measurement.size_ok() {
            violations.push(Violation {
                input: input.clone(),
                kind: ViolationKind::Size,
                detail: format!("output size {} > {}", measurement.output_size, measurement.bound_size),
            });
        }
        if !measurement.time_ok() {
            violations.push(Violation {
                input: input.clone(),
                kind: ViolationKind::Time,
                detail: format!("steps {} > {}", measurement.steps, measurement.bound_time),
            });
        }
        rows.push(AuditRow {
            w: input,
            ok: error.is_none() && measurement.size_ok() && measurement.time_ok(),
            measurement,
            error,
        });
    }

    let (mut fitted_exponent, mut fit_residual, mut fit_error) = (None, None, None);
    if opts.fit {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.error.is_none())
            .map(|r| (r.measurement.input_size as f64, r.measurement.steps as f64))
            .collect();
        match fit_exponent(&points) {
            Ok(fit) => {
                fitted_exponent = Some(fit.exponent);
                fit_residual = Some(fit.residual);
            }
            Err(e) => fit_error = Some(e.to_string()),
        }
    }
    let max = |f: fn(&Measurement) -> f64| rows.iter().map(|r| f(&r.measurement)).fold(0.0, f64::max);
    let summary = AuditSummary {
        count: rows.len(),
        violations: violations.len(),
        max_time_ratio: max(Measurement::time_ratio),
        max_size_ratio: max(Measurement::size_ratio),
    };
    Ok(AuditReport {
        system: system.to_string(),
        function: format!("f{i}"),
        cost_model_version: COST_MODEL_VERSION.to_string(),
        inputs: rows,
        violations,
        fitted_exponent,
        fit_residual,
        fit_error,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::inputs;
    use crate::element::Atom;
    use crate::fixtures;

    fn ab() -> Vec<Atom> {
        vec![Atom::new("a").unwrap(), Atom::new("b").unwrap()]
    }

    #[test]
    fn empty_input_list() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let r = audit(&sys, "mirror", 1, &[], AuditOptions::default()).unwrap();
        assert!(r.inputs.is_empty() && r.is_clean());
        assert_eq!(r.summary.count, 0);
        assert_eq!(r.cost_model_version, "gnf-cost-1");
    }

    #[test]
    fn doubling_chain_records_the_runtime_violation() {
        let sys = GnfSystem::parse(fixtures::DOUBLING).unwrap();
        assert!(matches!(
            audit(&sys, "doubling", 1, &[inputs::chain(12)], AuditOptions::default()),
            Err(EvalError::NotAccepted)
        ));
        let opts = AuditOptions { force: true, fit: false };
        let r = audit(&sys, "doubling", 1, &[inputs::chain(12)], opts).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::Runtime);
        assert!(r.violations[0].detail.contains("conc(<a,b>,<a,b>)"), "{}", r.violations[0].detail);
        assert!(!r.inputs[0].ok);
    }

    #[test]
    fn violation_iff_inequality_fails() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let ws = inputs::random_family(&ab(), 1..=14, 4, 3);
        let r = audit(&sys, "mirror", 1, &ws, AuditOptions::default()).unwrap();
        for row in &r.inputs {
            let m = &row.measurement;
            let flagged = r.violations.iter().any(|v| v.input == row.w);
            let fails = Bound::from(m.output_size) > m.bound_size || Bound::from(m.steps) > m.bound_time;
            assert_eq!(flagged, fails);
        }
        assert!(r.is_clean());
        assert!(r.summary.max_time_ratio > 0.0 && r.summary.max_time_ratio <= 1.0);
    }

    #[test]
    fn json_and_csv() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let ws: Vec<_> = (4..=16).map(|n| inputs::flat(&ab(), n)).collect();
        let opts = AuditOptions { force: false, fit: true };
        let r = audit(&sys, "mirror", 1, &ws, opts).unwrap();
        let back: AuditReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v["inputs"][0]["bound_time"].is_string());
        assert!(v["fitted_exponent"].is_number());
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), ws.len() + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("\"<a,b,a>\",4,1,"));
    }

    use crate::Bound;
}
