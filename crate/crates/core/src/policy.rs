//! Scheduler selection by name.

use std::fmt;
use std::str::FromStr;

use crate::aco::{AcoParams, AcoPolicy};
use crate::baselines::{Baseline, BaselineKind, ScanVariant};
use crate::error::{Error, Result};
use crate::sim::SchedulerPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Baseline(BaselineKind),
    Aco,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 9] = [
        PolicyKind::Baseline(BaselineKind::Fifo),
        PolicyKind::Baseline(BaselineKind::Edf),
        PolicyKind::Baseline(BaselineKind::Sstf),
        PolicyKind::Baseline(BaselineKind::Scan(ScanVariant::Scan)),
        PolicyKind::Baseline(BaselineKind::Scan(ScanVariant::CScan)),
        PolicyKind::Baseline(BaselineKind::Scan(ScanVariant::Look)),
        PolicyKind::Baseline(BaselineKind::Scan(ScanVariant::CLook)),
        PolicyKind::Baseline(BaselineKind::ScanEdf),
        PolicyKind::Aco,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Baseline(kind) => kind.name(),
            PolicyKind::Aco => "aco",
        }
    }

    /// Whether repeated runs on the same problem can differ.
    pub fn is_stochastic(self) -> bool {
        matches!(self, PolicyKind::Aco)
    }

    pub fn names() -> String {
        Self::ALL.map(|k| k.name()).join("|")
    }

    /// Builds a fresh policy instance. `seed` only matters for stochastic
    /// policies and replaces `aco.seed`.
    pub fn build(self, aco: &AcoParams, seed: u64) -> Result<Box<dyn SchedulerPolicy + Send>> {
        Ok(match self {
            PolicyKind::Baseline(kind) => Box::new(Baseline::new(kind)),
            PolicyKind::Aco => Box::new(AcoPolicy::new(AcoParams {
                seed,
                ..aco.clone()
            })?),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.to_ascii_lowercase().replace(['-', '_'], "");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == wanted)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown scheduler `{s}` (valid: {})",
                    Self::names()
                ))
            })
    }
}
