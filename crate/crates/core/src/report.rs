use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::linop::Mismatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// First differing component of two operators, indices as they appear in
/// the algebra (vector directions 1-based, auxiliary direction 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub component: String,
    pub left: String,
    pub right: String,
}

impl Witness {
    pub fn new(component: impl Into<String>, left: impl ToString, right: impl ToString) -> Self {
        Witness {
            component: component.into(),
            left: left.to_string(),
            right: right.to_string(),
        }
    }

    /// `offset` is added to every index; pass 1 for operators over `V_N`.
    pub fn from_mismatch(m: &Mismatch, offset: usize) -> Self {
        let fmt = |v: &[usize]| {
            v.iter()
                .map(|i| (i + offset).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        Witness::new(
            format!("out[{}] in[{}]", fmt(&m.out_index), fmt(&m.in_index)),
            &m.left,
            &m.right,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckItem {
    pub id: String,
    pub subject: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckItem {
    pub fn new(id: impl Into<String>, subject: impl Into<String>, status: Status) -> Self {
        CheckItem {
            id: id.into(),
            subject: subject.into(),
            status,
            witness: None,
            note: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn pass(id: impl Into<String>, subject: impl Into<String>) -> Self {
        CheckItem::new(id, subject, Status::Pass)
    }

    pub fn fail(id: impl Into<String>, subject: impl Into<String>, witness: Option<Witness>) -> Self {
        CheckItem {
            witness,
            ..CheckItem::new(id, subject, Status::Fail)
        }
    }

    pub fn skipped(id: impl Into<String>, subject: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckItem::new(id, subject, Status::Skipped).with_note(reason)
    }

    /// Pass when `mismatch` is `None`, otherwise fail with its witness.
    pub fn compare(
        id: impl Into<String>,
        subject: impl Into<String>,
        mismatch: Option<Witness>,
    ) -> Self {
        match mismatch {
            None => CheckItem::pass(id, subject),
            Some(w) => CheckItem::fail(id, subject, Some(w)),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_elapsed(mut self, d: Duration) -> Self {
        self.elapsed = d;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<CheckItem>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, item: CheckItem) {
        self.checks.push(item);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn find(&self, id: &str) -> impl Iterator<Item = &CheckItem> {
        let id = id.to_string();
        self.checks.iter().filter(move |c| c.id == id)
    }

    /// Human-readable listing, one line per check.
    pub fn render(&self, timings: bool) -> String {
        let mut out = format!("# {}\n", self.subject);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("{tag} {} [{}]", c.id, c.subject));
            if timings {
                out.push_str(&format!(" ({:.3}s)", c.elapsed.as_secs_f64()));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!(" at {}: {} != {}", w.component, w.left, w.right));
            }
            if let Some(n) = &c.note {
                out.push_str(&format!(" -- {n}"));
            }
            out.push('\n');
        }
        let s = self.summary();
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped\n",
            s.pass, s.fail, s.skipped
        ));
        out
    }
}
