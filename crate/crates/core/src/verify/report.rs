use serde::{Deserialize, Serialize};

use crate::background::Background;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

/// Whether node values are inequality slacks (want ≥ 0) or identity
/// residuals (want ≈ 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Inequality,
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub t: f64,
    pub series: String,
    /// Non-finite values are written as the strings "NaN", "inf", "-inf".
    #[serde(with = "lenient_f64")]
    pub value: f64,
}

mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub background: Background,
    pub scenario_id: String,
    pub kind: CheckKind,
    pub nodes: Vec<NodeRecord>,
    /// Worst slack: the smallest inequality margin, or −max|residual|.
    pub min_margin: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Failures of report-only checks are recorded but do not fail a run.
    #[serde(default)]
    pub report_only: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn with_scenario(mut self, id: &str) -> Self {
        self.scenario_id = id.to_string();
        self
    }

    pub fn series(&self, name: &str) -> impl Iterator<Item = &NodeRecord> {
        let name = name.to_string();
        self.nodes.iter().filter(move |n| n.series == name)
    }
}

/// Accumulates node values and settles the verdict on `finish`.
pub struct ReportBuilder {
    report: VerificationReport,
}

impl ReportBuilder {
    pub fn new(check_name: &str, background: Background, kind: CheckKind, tolerance: f64) -> Self {
        Self {
            report: VerificationReport {
                check_name: check_name.to_string(),
                background,
                scenario_id: String::new(),
                kind,
                nodes: Vec::new(),
                min_margin: None,
                tolerance,
                verdict: Verdict::Inapplicable,
                report_only: false,
                notes: Vec::new(),
            },
        }
    }

    pub fn push(&mut self, t: f64, series: &str, value: f64) {
        self.report.nodes.push(NodeRecord {
            t,
            series: series.to_string(),
            value,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.report.notes.push(note.into());
    }

    pub fn set_tolerance(&mut self, tolerance: f64) {
        self.report.tolerance = tolerance;
    }

    pub fn inapplicable(mut self, reason: impl Into<String>) -> VerificationReport {
        self.report.notes.push(reason.into());
        self.report.verdict = Verdict::Inapplicable;
        self.report.min_margin = None;
        self.report
    }

    pub fn finish(mut self) -> VerificationReport {
        let r = &mut self.report;
        if r.nodes.is_empty() {
            r.notes.push("no nodes to check".into());
            r.verdict = Verdict::Inapplicable;
            return self.report;
        }
        if let Some(bad) = r.nodes.iter().find(|n| !n.value.is_finite()) {
            r.notes.push(format!(
                "non-finite value in series `{}` at t = {}",
                bad.series, bad.t
            ));
            r.min_margin = None;
            r.verdict = Verdict::Fail;
            return self.report;
        }
        let slack = |v: f64| match r.kind {
            CheckKind::Inequality => v,
            CheckKind::Identity => -v.abs(),
        };
        let min = r
            .nodes
            .iter()
            .map(|n| slack(n.value))
            .fold(f64::INFINITY, f64::min);
        r.min_margin = Some(min);
        r.verdict = if min >= -r.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self.report
    }
}

/// Union of two report sets, ordered by (scenario, check). Associative and
/// independent of argument order.
pub fn merge_reports(
    mut a: Vec<VerificationReport>,
    b: Vec<VerificationReport>,
) -> Vec<VerificationReport> {
    a.extend(b);
    a.sort_by(|x, y| {
        (&x.scenario_id, &x.check_name)
            .cmp(&(&y.scenario_id, &y.check_name))
            .then_with(|| {
                serde_key(x).cmp(&serde_key(y))
            })
    });
    a
}

// total order on the remaining content so equal keys still merge deterministically
fn serde_key(r: &VerificationReport) -> String {
    format!("{:?}", r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(id: &str, name: &str) -> VerificationReport {
        let mut b = ReportBuilder::new(name, Background::Plane { n: 1 }, CheckKind::Inequality, 0.0);
        b.push(-1.0, "x", 1.0);
        b.finish().with_scenario(id)
    }

    #[test]
    fn verdict_follows_min_margin() {
        let mut b = ReportBuilder::new("c", Background::Plane { n: 1 }, CheckKind::Inequality, 1e-3);
        b.push(-1.0, "x", -5e-4);
        b.push(-0.5, "x", 2.0);
        let r = b.finish();
        assert_eq!(r.min_margin, Some(-5e-4));
        assert!(r.passed());

        let mut b = ReportBuilder::new("c", Background::Plane { n: 1 }, CheckKind::Identity, 1e-3);
        b.push(-1.0, "x", 2e-3);
        let r = b.finish();
        assert_eq!(r.min_margin, Some(-2e-3));
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn empty_and_nonfinite() {
        let b = ReportBuilder::new("c", Background::Plane { n: 1 }, CheckKind::Identity, 1.0);
        assert_eq!(b.finish().verdict, Verdict::Inapplicable);
        let mut b = ReportBuilder::new("c", Background::Plane { n: 1 }, CheckKind::Identity, 1.0);
        b.push(-1.0, "x", f64::NAN);
        assert_eq!(b.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn merge_is_order_independent() {
        let a = vec![report("b", "x"), report("a", "y")];
        let b = vec![report("a", "x")];
        let c = vec![report("c", "z")];
        let left = merge_reports(merge_reports(a.clone(), b.clone()), c.clone());
        let right = merge_reports(a.clone(), merge_reports(c.clone(), b.clone()));
        let swapped = merge_reports(merge_reports(c, b), a);
        assert_eq!(left, right);
        assert_eq!(left, swapped);
        assert_eq!(left[0].scenario_id, "a");
    }
}
