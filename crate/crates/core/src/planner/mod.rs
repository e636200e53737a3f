//! Chromosome evaluation (scenarios × contingencies × capacity sizing) and
//! the genetic search over candidate-line selections.

mod evaluate;
mod ga;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contingency::SamplerConfig;
use crate::sizing::SizingConfig;

pub use evaluate::{
    base_dispatch, evaluate_chromosome, AdequacyAssessment, Evaluator, FitnessRecord, LineOutcome, SizingSummary,
};
pub use ga::{run, GaConfig, GenerationSummary, PlanResult};

/// Which lines the sizing loop may grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpgradePolicy {
    /// New lines only.
    Nl,
    /// New lines plus upgrades of existing lines.
    Wel,
}

impl fmt::Display for UpgradePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpgradePolicy::Nl => "nl",
            UpgradePolicy::Wel => "wel",
        })
    }
}

impl FromStr for UpgradePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "nl" => Ok(UpgradePolicy::Nl),
            "wel" => Ok(UpgradePolicy::Wel),
            other => Err(format!("unknown upgrade policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub sampler: SamplerConfig,
    pub policy: UpgradePolicy,
    pub sizing: SizingConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            sampler: SamplerConfig::default(),
            policy: UpgradePolicy::Wel,
            sizing: SizingConfig::default(),
        }
    }
}
