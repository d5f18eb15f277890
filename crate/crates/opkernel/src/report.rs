//! Deterministic verification reports.
//!
//! Every verifier in this crate reduces to a list of named diagram
//! instances, each either passing or failing with a serialized
//! counterexample. Records are sorted before output so reports are
//! byte-identical for identical inputs regardless of evaluation order.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    /// Which family of diagrams this instance belongs to.
    pub condition: String,
    /// The index tuple of the instance, in the family's documented order.
    pub tuple: Vec<usize>,
    /// Evaluation scope (an arity, a degree, or "global").
    pub scope: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

impl CheckRecord {
    pub fn pass(condition: impl Into<String>, tuple: Vec<usize>, scope: impl Into<String>) -> Self {
        CheckRecord {
            condition: condition.into(),
            tuple,
            scope: scope.into(),
            ok: true,
            counterexample: None,
        }
    }

    pub fn fail(
        condition: impl Into<String>,
        tuple: Vec<usize>,
        scope: impl Into<String>,
        counterexample: serde_json::Value,
    ) -> Self {
        CheckRecord {
            condition: condition.into(),
            tuple,
            scope: scope.into(),
            ok: false,
            counterexample: Some(counterexample),
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<CheckRecord>,
    pub total: usize,
    pub failures: usize,
}

impl Report {
    pub fn from_records(mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| {
            (&a.condition, &a.tuple, &a.scope).cmp(&(&b.condition, &b.tuple, &b.scope))
        });
        let total = checks.len();
        let failures = checks.iter().filter(|c| !c.ok).count();
        Report {
            checks,
            total,
            failures,
        }
    }

    pub fn merged(reports: Vec<Report>) -> Self {
        Report::from_records(reports.into_iter().flat_map(|r| r.checks).collect())
    }

    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.ok)
    }

    /// Records restricted to one condition family.
    pub fn for_condition<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a CheckRecord> {
        self.checks.iter().filter(move |c| c.condition == condition)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}
