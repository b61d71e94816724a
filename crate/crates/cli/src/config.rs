use std::path::{Path, PathBuf};

use armax_core::copulas::{CopulaSpec, DerivedCopula, ExtremeValueCopula};
use armax_core::estimation::VarianceConvention;
use armax_core::ProcessConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Simulate,
    Estimate,
    ExtremalIndex,
    TailDep,
    Copula,
    Montecarlo,
}

impl CommandKind {
    pub fn needs_seed(self) -> bool {
        matches!(self, CommandKind::Simulate | CommandKind::Montecarlo)
    }
}

/// Attractor copula of the stationary law: a base copula or a ratio-rule
/// copula `{ "base": ..., "theta": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttractorSpec {
    Derived(DerivedCopula),
    Base(CopulaSpec),
}

impl AttractorSpec {
    pub fn validate(&self) -> armax_core::Result<()> {
        match self {
            AttractorSpec::Derived(d) => d.validate(),
            AttractorSpec::Base(b) => b.validate(),
        }
    }

    pub fn as_copula(&self) -> &dyn ExtremeValueCopula {
        match self {
            AttractorSpec::Derived(d) => d,
            AttractorSpec::Base(b) => b,
        }
    }
}

/// Input of the `copula` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopulaTable {
    pub base: CopulaSpec,
    pub theta: Vec<f64>,
    /// 1-based index subsets for extremal coefficients; all of `1..=d` by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsets: Option<Vec<Vec<usize>>>,
    /// Points `u` at which both copulas are evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

/// Everything a run needs. Component indices (`pairs`, `subsets`) are
/// 1-based, matching the `x1..xd` columns of path files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Path CSV to analyse instead of simulating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_path: Option<PathBuf>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_est: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attractor: Option<AttractorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs_quantile: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_gap: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lags: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_k: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_convention: Option<VarianceConvention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hill_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copula_table: Option<CopulaTable>,
}

pub const DEFAULT_RUNS_QUANTILE: f64 = 0.995;
pub const DEFAULT_RUN_GAP: usize = 1;
pub const DEFAULT_TDC_T: f64 = 0.02;
pub const DEFAULT_LAGS: [usize; 3] = [0, 1, 2];
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_REPLICATES: usize = 100;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn process(&self) -> Result<&ProcessConfig, CliError> {
        self.process.as_ref().ok_or_else(|| bad("config needs a `process`"))
    }

    /// Checks the fields the command reads.
    pub fn validate(&self, cmd: CommandKind) -> Result<(), CliError> {
        if let Some(c) = self.command {
            if c != cmd {
                return Err(bad(format!("config is for {c:?}, invoked as {cmd:?}")));
            }
        }
        if let Some(p) = &self.process {
            p.validate().map_err(|e| bad(e.to_string()))?;
        }
        let simulates = cmd != CommandKind::Copula && (cmd.needs_seed() || self.input_path.is_none());
        if simulates {
            self.process()?;
            if self.seed.is_none() {
                return Err(bad("a seed is required to simulate (config `seed` or --seed)"));
            }
            match self.n {
                None => return Err(bad("config needs `n`")),
                Some(n) if n < 2 => return Err(bad("n must be at least 2")),
                _ => {}
            }
        }
        if matches!(cmd, CommandKind::ExtremalIndex | CommandKind::TailDep) {
            self.process()?;
        }
        if let Some(a) = &self.attractor {
            a.validate().map_err(|e| bad(e.to_string()))?;
        }
        if let Some(q) = self.runs_quantile {
            if !(q > 0.0 && q < 1.0) {
                return Err(bad("runs_quantile must lie in (0,1)"));
            }
        }
        if self.run_gap == Some(0) {
            return Err(bad("run_gap must be positive"));
        }
        if let Some(l) = self.level {
            if !(0.0..1.0).contains(&l) {
                return Err(bad("level must lie in [0,1)"));
            }
        }
        if self.replicates == Some(0) {
            return Err(bad("replicates must be positive"));
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t < 1.0) {
                return Err(bad("t must lie in (0,1)"));
            }
        }
        if cmd == CommandKind::Copula {
            let table = self.copula_table.as_ref().ok_or_else(|| bad("copula command needs `copula_table`"))?;
            DerivedCopula::new(table.base, table.theta.clone()).map_err(|e| bad(e.to_string()))?;
        }
        Ok(())
    }
}
