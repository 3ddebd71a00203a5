use std::fmt;
use std::time::Duration;

/// Result of one generated case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseOutcome {
    Pass,
    /// Outside what the suite can decide (domain too small, cap exceeded).
    Skip(String),
    Fail(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub case: u64,
    pub repro: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub suite: String,
    pub run: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub first_failure: Option<Failure>,
    pub wall: Duration,
    /// Extra per-suite counters, printed after the totals.
    pub notes: Vec<(String, usize)>,
}

impl RunReport {
    pub fn new(suite: &str) -> Self {
        RunReport {
            suite: suite.to_string(),
            run: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            first_failure: None,
            wall: Duration::ZERO,
            notes: Vec::new(),
        }
    }

    /// Adds outcomes in case order.
    pub fn record(&mut self, case: u64, outcome: CaseOutcome, repro: impl FnOnce() -> String) {
        self.run += 1;
        match outcome {
            CaseOutcome::Pass => self.passed += 1,
            CaseOutcome::Skip(_) => self.skipped += 1,
            CaseOutcome::Fail(detail) => {
                self.failed += 1;
                if self.first_failure.is_none() {
                    self.first_failure = Some(Failure {
                        case,
                        repro: repro(),
                        detail,
                    });
                }
            }
        }
    }

    pub fn note(&mut self, key: &str, n: usize) {
        self.notes.push((key.to_string(), n));
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Cases that were actually decided.
    pub fn checked(&self) -> usize {
        self.passed + self.failed
    }

    pub fn plain(&self) -> String {
        let mut s = format!(
            "{}: run={} passed={} failed={} skipped={}",
            self.suite, self.run, self.passed, self.failed, self.skipped
        );
        for (k, v) in &self.notes {
            s.push_str(&format!(" {k}={v}"));
        }
        if let Some(f) = &self.first_failure {
            s.push_str(&format!(
                "\n  first failure (case {}): {}\n  rerun: {}",
                f.case, f.detail, f.repro
            ));
        }
        s
    }

    /// One `key=value` per line.
    pub fn machine(&self) -> String {
        let mut s = format!(
            "suite={}\nrun={}\npassed={}\nfailed={}\nskipped={}\n",
            self.suite, self.run, self.passed, self.failed, self.skipped
        );
        for (k, v) in &self.notes {
            s.push_str(&format!("{k}={v}\n"));
        }
        if let Some(f) = &self.first_failure {
            s.push_str(&format!(
                "first_failure_case={}\nfirst_failure_repro={}\n",
                f.case, f.repro
            ));
        }
        s
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.plain())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_the_first_failure() {
        let mut r = RunReport::new("t");
        r.record(0, CaseOutcome::Pass, || unreachable!());
        r.record(1, CaseOutcome::Skip("cap".into()), || unreachable!());
        r.record(2, CaseOutcome::Fail("a".into()), || "rerun 2".into());
        r.record(3, CaseOutcome::Fail("b".into()), || "rerun 3".into());
        assert!(!r.ok());
        assert_eq!(r.checked(), 3);
        assert_eq!(r.first_failure.as_ref().unwrap().case, 2);
        assert!(r.machine().contains("first_failure_repro=rerun 2\n"));
    }
}
