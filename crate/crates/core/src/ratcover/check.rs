use serde::Serialize;

/// How a certificate step was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Exact interval arithmetic over every materialized index or set.
    Exact,
    /// Exact arithmetic at finitely many sample points.
    Sampled,
}

/// One named step of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub mode: CheckMode,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn exact(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            mode: CheckMode::Exact,
            holds,
            detail: None,
        }
    }

    pub fn sampled(name: impl Into<String>, holds: bool) -> Self {
        Check {
            mode: CheckMode::Sampled,
            ..Check::exact(name, holds)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

pub(crate) fn all_hold(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.holds)
}
