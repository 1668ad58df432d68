//! Solver output shared by every solver and the benchmark harness.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::SpinConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Proven ground state.
    Optimal,
    /// Best configuration found, no optimality proof.
    Heuristic,
    /// The exact solver declined: the instance exceeds its size or width cap.
    Capped,
    Error,
}

/// How many independent runs reached the target energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessTally {
    pub runs: usize,
    pub hits: usize,
}

impl SuccessTally {
    pub fn probability(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.hits as f64 / self.runs as f64
        }
    }
}

/// Run-dependent data kept apart so the rest of a report is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub status: Status,
    /// Energy numerator over `gamma`.
    pub energy: Option<i64>,
    pub gamma: i64,
    pub lower_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spins: Option<SpinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success: Option<SuccessTally>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default)]
    pub meta: ReportMeta,
}

impl SolveReport {
    pub fn optimal(solver: &str, energy: i64, gamma: i64, spins: SpinConfig) -> Self {
        Self {
            solver: solver.into(),
            status: Status::Optimal,
            energy: Some(energy),
            gamma,
            lower_bound: Some(energy),
            spins: Some(spins),
            success: None,
            message: None,
            meta: ReportMeta::default(),
        }
    }

    pub fn heuristic(solver: &str, energy: i64, gamma: i64, spins: SpinConfig) -> Self {
        Self {
            status: Status::Heuristic,
            lower_bound: None,
            ..Self::optimal(solver, energy, gamma, spins)
        }
    }

    pub fn capped(solver: &str, gamma: i64, message: String) -> Self {
        Self::failed(solver, Status::Capped, gamma, message)
    }

    pub fn error(solver: &str, gamma: i64, message: String) -> Self {
        Self::failed(solver, Status::Error, gamma, message)
    }

    fn failed(solver: &str, status: Status, gamma: i64, message: String) -> Self {
        Self {
            solver: solver.into(),
            status,
            energy: None,
            gamma,
            lower_bound: None,
            spins: None,
            success: None,
            message: Some(message),
            meta: ReportMeta::default(),
        }
    }

    pub fn with_elapsed(mut self, elapsed: Duration) -> Self {
        self.meta.elapsed_ms = elapsed.as_secs_f64() * 1e3;
        self
    }

    pub fn energy_value(&self) -> Option<f64> {
        self.energy.map(|e| e as f64 / self.gamma as f64)
    }

    pub fn has_energy(&self) -> bool {
        matches!(self.status, Status::Optimal | Status::Heuristic) && self.energy.is_some()
    }

    /// Checks `energy >= lower_bound` and that an optimal report is tight.
    pub fn validate(&self) -> Result<()> {
        if let (Some(e), Some(lb)) = (self.energy, self.lower_bound) {
            if e < lb {
                return Err(Error::InvalidInstance(format!(
                    "report energy {e} is below its lower bound {lb}"
                )));
            }
            if self.status == Status::Optimal && e != lb {
                return Err(Error::InvalidInstance(
                    "optimal report must have energy equal to its lower bound".into(),
                ));
            }
        }
        Ok(())
    }

    /// JSON without the run-dependent `meta` block.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("meta");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}
