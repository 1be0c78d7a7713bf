//! Structured pass/fail reports shared by the verification suites and the CLI.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            witness: witness.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let tag = if check.passed { "PASS" } else { "FAIL" };
            write!(f, "{tag} {}::{}", self.suite, check.name)?;
            if check.witness.is_empty() {
                writeln!(f)?;
            } else {
                writeln!(f, " ({})", check.witness)?;
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        writeln!(
            f,
            "{}: {} checks, {} failed",
            self.suite,
            self.checks.len(),
            failed
        )
    }
}
