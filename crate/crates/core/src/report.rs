//! Outcome of checking one identity or inequality numerically.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Both sides of a claim, their gap, and the verdict.
///
/// For inequalities `gap` is the signed slack, positive when the claim is
/// satisfied; for equalities it is `lhs - rhs`. Extra named quantities go
/// in `details`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimReport {
    pub claim_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub verdict: Verdict,
    pub notes: String,
    pub details: Vec<(String, f64)>,
}

impl ClaimReport {
    pub fn new(claim_id: impl Into<String>, lhs: f64, rhs: f64, gap: f64, verdict: Verdict) -> Self {
        ClaimReport {
            claim_id: claim_id.into(),
            lhs,
            rhs,
            gap,
            verdict,
            notes: String::new(),
            details: Vec::new(),
        }
    }

    /// Equality within `tol`; indeterminate when either side is not finite.
    pub fn equality(claim_id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = lhs - rhs;
        let verdict = if !(lhs.is_finite() && rhs.is_finite()) {
            Verdict::Indeterminate
        } else if gap.abs() <= tol {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        ClaimReport::new(claim_id, lhs, rhs, gap, verdict)
    }

    /// `lhs <= rhs + tol`; gap is `rhs - lhs`.
    pub fn at_most(claim_id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = rhs - lhs;
        let verdict = if !(lhs.is_finite() && rhs.is_finite()) {
            Verdict::Indeterminate
        } else if gap >= -tol {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        ClaimReport::new(claim_id, lhs, rhs, gap, verdict)
    }

    /// `lhs >= rhs - tol`; gap is `lhs - rhs`.
    pub fn at_least(claim_id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let mut report = ClaimReport::at_most(claim_id, rhs, lhs, tol);
        std::mem::swap(&mut report.lhs, &mut report.rhs);
        report
    }

    pub fn indeterminate(claim_id: impl Into<String>, notes: impl Into<String>) -> Self {
        ClaimReport::new(claim_id, f64::NAN, f64::NAN, f64::NAN, Verdict::Indeterminate).with_note(notes)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if !note.is_empty() {
            if !self.notes.is_empty() {
                self.notes.push_str("; ");
            }
            self.notes.push_str(&note);
        }
        self
    }

    pub fn with_detail(mut self, name: impl Into<String>, value: f64) -> Self {
        self.details.push((name.into(), value));
        self
    }

    pub fn detail(&self, name: &str) -> Option<f64> {
        self.details.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Force the verdict to indeterminate, e.g. when a precondition failed.
    pub fn make_indeterminate(mut self, note: impl Into<String>) -> Self {
        self.verdict = Verdict::Indeterminate;
        self.with_note(note)
    }
}
