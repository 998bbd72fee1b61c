use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite labeled ground set `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidGround("ground set must be nonempty".into()));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidGround(format!("duplicate label {l:?}")));
            }
        }
        Ok(Arc::new(GroundSet { labels }))
    }

    /// Default labels: `a, b, c, ..` up to 26 points, `p0, p1, ..` beyond.
    pub fn with_size(n: usize) -> Result<Arc<Self>> {
        if n <= 26 {
            Self::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
        } else {
            Self::new((0..n).map(|i| format!("p{i}")))
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

pub(crate) fn same_ground(a: &Arc<GroundSet>, b: &Arc<GroundSet>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GroundMismatch)
    }
}
