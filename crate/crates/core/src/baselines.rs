//! The comparison algorithms. All four variants share the same engine; they
//! differ only in the edge-server selection rule and the multiple-access
//! discipline:
//!
//! * `jccraa` — social-mobility-aware selection, NOMA sharing.
//! * `noma-mdss-tscra` — minimum-distance selection ignoring social and
//!   mobility trust, NOMA sharing.
//! * `rsu-sapc` — RSU offloading only (no V2V), single-stream on each
//!   shared sub-channel.
//! * `oma-jccra` — social-mobility-aware selection with the two streams
//!   time-sharing the sub-channel instead of superposing.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::model::AccessMode;
use crate::scalar::Scalar;
use crate::scenario::Scenario;
use crate::solver::{solve_scenario, EngineOptions, SelectionRule, SolveRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Jccraa,
    NomaMdssTscra,
    RsuSapc,
    OmaJccra,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Jccraa,
        Algorithm::NomaMdssTscra,
        Algorithm::RsuSapc,
        Algorithm::OmaJccra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Jccraa => "jccraa",
            Algorithm::NomaMdssTscra => "noma-mdss-tscra",
            Algorithm::RsuSapc => "rsu-sapc",
            Algorithm::OmaJccra => "oma-jccra",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn options(self) -> EngineOptions {
        match self {
            Algorithm::Jccraa => EngineOptions {
                selection: SelectionRule::SocialAware,
                access: AccessMode::Noma,
            },
            Algorithm::NomaMdssTscra => EngineOptions {
                selection: SelectionRule::NearestDistance,
                access: AccessMode::Noma,
            },
            Algorithm::RsuSapc => EngineOptions {
                selection: SelectionRule::RsuOnly,
                access: AccessMode::Noma,
            },
            Algorithm::OmaJccra => EngineOptions {
                selection: SelectionRule::SocialAware,
                access: AccessMode::Oma,
            },
        }
    }

    pub fn run<S: Scalar>(self, scenario: &Scenario<S>, cfg: &Config) -> SolveRun<S> {
        solve_scenario(scenario, cfg, self.options())
    }
}

/// Minimum-distance server selection with the shared task-splitting and
/// communication machinery.
pub fn noma_mdss_tscra<S: Scalar>(scenario: &Scenario<S>, cfg: &Config) -> SolveRun<S> {
    Algorithm::NomaMdssTscra.run(scenario, cfg)
}

/// RSU-only offloading with the shared communication machinery.
pub fn rsu_sapc<S: Scalar>(scenario: &Scenario<S>, cfg: &Config) -> SolveRun<S> {
    Algorithm::RsuSapc.run(scenario, cfg)
}

/// The social-mobility-aware pipeline over orthogonal (time-shared) access.
pub fn oma_jccra<S: Scalar>(scenario: &Scenario<S>, cfg: &Config) -> SolveRun<S> {
    Algorithm::OmaJccra.run(scenario, cfg)
}
