use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::divergence::Norm;
use crate::error::{Error, Result};
use crate::planners::DEFAULT_MAX_CANDIDATES;
use crate::setfn::FunctionClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Random,
    OfflineGreedy,
    OfflineOptimal,
    OracleGreedy,
    OracleOptimal,
}

impl PlannerKind {
    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Random => "random",
            PlannerKind::OfflineGreedy => "offline_greedy",
            PlannerKind::OfflineOptimal => "offline_optimal",
            PlannerKind::OracleGreedy => "oracle_greedy",
            PlannerKind::OracleOptimal => "oracle_optimal",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(name.to_string()))
            .map_err(|_| Error::InvalidConfig(format!("unknown planner {name:?}")))
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    /// Defaults to the distribution's usual class.
    #[serde(default)]
    pub class: Option<FunctionClass>,
    #[serde(default)]
    pub norm: Norm,
    pub planners: Vec<PlannerKind>,
    pub t_max: usize,
    /// Budget cap for the optimal planners, which enumerate all reveal sets.
    #[serde(default)]
    pub optimal_t_max: Option<usize>,
    pub kappa: usize,
    pub eval_samples: usize,
    /// Seeds the random planner.
    #[serde(default)]
    pub seed: u64,
    /// Normalize samples before planning. Defaults to true for class `s`,
    /// the only class closed under the normalizing map.
    #[serde(default)]
    pub normalize: Option<bool>,
    #[serde(default = "default_max_candidates")]
    pub max_candidates: u128,
}

fn default_max_candidates() -> u128 {
    DEFAULT_MAX_CANDIDATES
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn class(&self) -> FunctionClass {
        self.class.clone().unwrap_or_else(|| self.distribution.default_class())
    }

    pub fn normalizes(&self) -> bool {
        self.normalize.unwrap_or(self.class() == FunctionClass::S)
    }

    pub fn optimal_budget(&self) -> usize {
        self.optimal_t_max.map_or(self.t_max, |t| t.min(self.t_max))
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        let n = self.distribution.n;
        let unknown = (1usize << n).saturating_sub(n + 2);
        if self.t_max > unknown {
            return Err(Error::InvalidConfig(format!(
                "t_max {} exceeds the {unknown} unknown sets",
                self.t_max
            )));
        }
        if self.kappa == 0 {
            return Err(Error::InvalidConfig("kappa must be at least 1".into()));
        }
        if self.eval_samples < 2 {
            return Err(Error::InvalidConfig("eval_samples must be at least 2 for standard errors".into()));
        }
        if self.planners.is_empty() {
            return Err(Error::InvalidConfig("no planners requested".into()));
        }
        Ok(())
    }
}
