/// Outcome of one named verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// `true` when every check passed.
pub fn all_passed(checks: &[CheckOutcome]) -> bool {
    checks.iter().all(|c| c.passed)
}
