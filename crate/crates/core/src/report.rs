//! Check reports shared by every verifier and the CLI.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Wall time; shown in text output only so JSON reports stay byte-stable.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub overall: Status,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            overall: Status::Pass,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: Entry) {
        if entry.status == Status::Fail {
            self.overall = Status::Fail;
        }
        self.entries.push(entry);
    }

    /// Records a pass/fail outcome; the witness closure only runs on failure.
    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        self.push(Entry {
            check: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: (!ok).then(witness),
            elapsed: Duration::ZERO,
        });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.check(name, true, String::new);
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        let w = witness.into();
        self.check(name, false, || w);
    }

    /// A passing entry that still carries an observation.
    pub fn note(&mut self, name: impl Into<String>, status: Status, witness: impl Into<String>) {
        self.push(Entry {
            check: name.into(),
            status,
            witness: Some(witness.into()),
            elapsed: Duration::ZERO,
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.note(name, Status::Skip, reason);
    }

    /// Runs `f`, timing it; `Err` becomes a failing entry with the message.
    pub fn timed<E: std::fmt::Display>(
        &mut self,
        name: impl Into<String>,
        f: impl FnOnce() -> Result<(bool, Option<String>), E>,
    ) {
        let start = Instant::now();
        let (status, witness) = match f() {
            Ok((true, w)) => (Status::Pass, w),
            Ok((false, w)) => (Status::Fail, w),
            Err(e) => (Status::Fail, Some(e.to_string())),
        };
        self.push(Entry {
            check: name.into(),
            status,
            witness,
            elapsed: start.elapsed(),
        });
    }

    pub fn extend(&mut self, other: Report) {
        for e in other.entries {
            self.push(e);
        }
    }

    /// Appends `other`'s entries under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut e in other.entries {
            e.check = format!("{prefix}: {}", e.check);
            self.push(e);
        }
    }

    pub fn is_pass(&self) -> bool {
        self.overall != Status::Fail
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn find(&self, check: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.check == check)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.title);
        for e in &self.entries {
            let tag = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(out, "[{tag}] {}", e.check);
            if !e.elapsed.is_zero() {
                let _ = write!(out, " ({:.1} ms)", e.elapsed.as_secs_f64() * 1e3);
            }
            if let Some(w) = &e.witness {
                let _ = write!(out, "  -- {w}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.is_pass() { "pass" } else { "fail" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_tracks_failures() {
        let mut r = Report::new("t");
        r.pass("a");
        r.skip("b", "n/a");
        assert!(r.is_pass());
        r.fail("c", "witness");
        assert!(!r.is_pass());
        assert_eq!(r.failures().count(), 1);
        let json = r.to_json().to_string();
        assert!(json.contains("\"overall\":\"fail\""));
        assert!(!json.contains("elapsed"));
    }

    #[test]
    fn timed_errors_fail() {
        let mut r = Report::new("t");
        r.timed("boom", || Err::<(bool, Option<String>), _>("bad input"));
        assert_eq!(r.entries[0].witness.as_deref(), Some("bad input"));
        assert!(!r.is_pass());
    }
}
