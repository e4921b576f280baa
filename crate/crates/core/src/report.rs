//! Pass/fail/unknown bookkeeping for verification runs.
//!
//! Every verifier in this crate produces the same shape of output: a titled
//! list of named checks, each counting passed, failed, and undecidable test
//! items, with up to a few failure witnesses kept verbatim. The display form
//! is deterministic so that identical runs produce byte-identical reports.

use serde::Serialize;
use std::fmt;

/// Maximum number of witness strings kept per check.
pub const WITNESS_CAP: usize = 8;

/// Counters and witnesses for one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub pass: u64,
    pub fail: u64,
    pub unknown: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl CheckSummary {
    pub fn new(name: impl Into<String>) -> Self {
        CheckSummary {
            name: name.into(),
            pass: 0,
            fail: 0,
            unknown: 0,
            note: None,
            witnesses: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Return the same summary under a different check name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn record_pass(&mut self) {
        self.pass += 1;
    }

    /// Count a failure, keeping the witness if the cap allows.
    pub fn record_fail(&mut self, witness: impl Into<String>) {
        self.fail += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(witness.into());
        }
    }

    pub fn record_unknown(&mut self) {
        self.unknown += 1;
    }

    pub fn passed(&self) -> bool {
        self.fail == 0
    }
}

impl fmt::Display for CheckSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "  {}: pass={} fail={} unknown={}",
            self.name, self.pass, self.fail, self.unknown
        )?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        for w in &self.witnesses {
            write!(f, "\n    witness: {w}")?;
        }
        Ok(())
    }
}

/// A titled collection of check summaries.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub title: String,
    pub checks: Vec<CheckSummary>,
    /// Total number of sampled test items consumed across all checks.
    pub samples: u64,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        VerificationReport {
            title: title.into(),
            checks: Vec::new(),
            samples: 0,
        }
    }

    pub fn push(&mut self, check: CheckSummary) {
        self.checks.push(check);
    }

    /// True when no check recorded a failure.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report {}", self.title)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        writeln!(f, "  samples: {}", self.samples)?;
        write!(
            f,
            "result: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_cap_is_enforced() {
        let mut c = CheckSummary::new("demo");
        for i in 0..20 {
            c.record_fail(format!("w{i}"));
        }
        assert_eq!(c.fail, 20);
        assert_eq!(c.witnesses.len(), WITNESS_CAP);
    }

    #[test]
    fn report_pass_fail_logic() {
        let mut r = VerificationReport::new("t");
        let mut a = CheckSummary::new("a");
        a.record_pass();
        r.push(a);
        assert!(r.passed());
        let mut b = CheckSummary::new("b");
        b.record_fail("bad");
        r.push(b);
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.contains("result: FAIL"));
        assert!(text.contains("witness: bad"));
    }
}
