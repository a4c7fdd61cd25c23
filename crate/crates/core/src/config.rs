//! Run configuration: every tunable constant of the simulator, with defaults
//! and TOML loading. Values that the underlying system model fixes (band per
//! sub-channel, CU transmit power, task-size range) keep those values as
//! defaults; everything else is an explicit, overridable choice.
//!
//! All powers are configured in dBm and converted to linear watts exactly
//! once, at this boundary.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::scalar::dbm_to_watts;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    /// Number of task vehicular users (M).
    pub num_tvus: usize,
    /// Number of idle service vehicular users (N).
    pub num_svus: usize,
    /// Number of cellular users (U).
    pub num_cus: usize,
    /// Number of sub-channels (F). The model assumes F = U.
    pub num_scs: usize,
    /// Number of roadside units (S).
    pub num_rsus: usize,
    /// Number of time slots per drop (T).
    pub num_slots: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            num_tvus: 20,
            num_svus: 20,
            num_cus: 50,
            num_scs: 50,
            num_rsus: 4,
            num_slots: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    /// Per-sub-channel bandwidth in Hz (one LTE resource block).
    pub bandwidth_hz: f64,
    /// Noise power per sub-channel in dBm.
    pub noise_dbm: f64,
    /// CU transmit power in dBm (fixed, not optimized).
    pub cu_power_dbm: f64,
    /// T-VU maximum transmit power in dBm.
    pub tvu_max_power_dbm: f64,
    /// Minimum CU rate R_th in bit/s (QoS floor per CU).
    pub cu_rate_min_bps: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 180e3,
            noise_dbm: -114.0,
            cu_power_dbm: 20.0,
            tvu_max_power_dbm: 23.0,
            cu_rate_min_bps: 1e4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// Path-loss exponent for vehicle-to-vehicle links.
    pub pl_exp_v2v: f64,
    /// Path-loss exponent for vehicle-to-infrastructure links.
    pub pl_exp_v2i: f64,
    /// Path-loss exponent for CU links.
    pub pl_exp_cu: f64,
    /// Log-normal shadowing std-dev for V2V links, dB.
    pub shadow_sigma_v2v_db: f64,
    /// Log-normal shadowing std-dev for V2I and CU links, dB.
    pub shadow_sigma_v2i_db: f64,
    /// Carrier frequency in GHz (sets the 1 m reference path loss).
    pub carrier_ghz: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            pl_exp_v2v: 3.0,
            pl_exp_v2i: 3.5,
            pl_exp_cu: 3.5,
            shadow_sigma_v2v_db: 3.0,
            shadow_sigma_v2i_db: 8.0,
            carrier_ghz: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    /// Side length of the square simulation area, meters.
    pub area_m: f64,
    /// Number of lanes on the road.
    pub lane_count: usize,
    /// Lane width, meters.
    pub lane_width_m: f64,
    /// RSU coverage radius, meters.
    pub rsu_radius_m: f64,
    /// Vehicle speed range, m/s. Speeds are drawn uniformly per vehicle.
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
    /// Slot duration, seconds.
    pub slot_duration_s: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            area_m: 1000.0,
            lane_count: 6,
            lane_width_m: 4.0,
            rsu_radius_m: 150.0,
            speed_min_mps: 10.0,
            speed_max_mps: 25.0,
            slot_duration_s: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SocialConfig {
    /// Distance weight in the proximity score (the velocity term gets 1 - w).
    pub psi_weight: f64,
    /// Physical-domain threshold: the mobility indicator fires when the
    /// proximity score is strictly below this.
    pub zeta_th: f64,
    /// Bernoulli density of the social willingness graph.
    pub social_density: f64,
}

impl Default for SocialConfig {
    fn default() -> Self {
        Self {
            psi_weight: 0.5,
            zeta_th: 0.5,
            social_density: 0.6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    /// Task size range in bits; sizes are drawn uniformly per T-VU per slot.
    pub size_min_bits: f64,
    pub size_max_bits: f64,
    /// CPU cycles needed per bit.
    pub cycles_per_bit: f64,
    /// Maximum tolerable delay per task, seconds.
    pub deadline_s: f64,
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            size_min_bits: 1e4,
            size_max_bits: 1e5,
            cycles_per_bit: 500.0,
            deadline_s: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeConfig {
    /// Local CPU rate per T-VU, cycles/s.
    pub local_rate_hz: f64,
    /// Total RSU-server CPU rate, cycles/s; shared fairly among the T-VUs
    /// an RSU serves in a slot.
    pub rsu_rate_hz: f64,
    /// S-VU CPU rate allocated per served T-VU, cycles/s.
    pub svu_rate_hz: f64,
    /// Effective switched capacitance of the CPU architecture.
    pub kappa: f64,
    /// Circuit power per T-VU, watts.
    pub circuit_power_w: f64,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        Self {
            local_rate_hz: 2.4e8,
            rsu_rate_hz: 1e9,
            svu_rate_hz: 8e8,
            kappa: 1e-27,
            circuit_power_w: 0.1,
        }
    }
}

/// Which transmit-power bookkeeping to use in the total-power sum. The
/// physically meaningful total is `eps1 + eps2`; `DoubleEps1` reproduces the
/// alternative `2*eps1` reading and exists only for comparison runs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PowerModel {
    EpsSum,
    DoubleEps1,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Outer (Dinkelbach) iteration cap L1.
    pub max_outer_iters: usize,
    /// Outer convergence threshold on |xi_i - xi_{i-1}|, relative to xi.
    pub outer_tol: f64,
    /// Successive-convex-approximation iteration cap in the power solver.
    pub max_sca_iters: usize,
    /// SCA stop tolerance (relative change of the surrogate objective).
    pub sca_tol: f64,
    /// Dual subgradient iteration cap per SCA step.
    pub dual_iters: usize,
    /// Base dual step size (diminishing as step / sqrt(k)).
    pub dual_step: f64,
    /// Relative feasibility tolerance for constraint checks.
    pub feas_tol: f64,
    /// Slack subtracted from the deadline so strict inequalities are testable.
    pub delay_slack_s: f64,
    /// Transmit-power bookkeeping variant.
    pub power_model: PowerModel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 20,
            outer_tol: 1e-3,
            max_sca_iters: 20,
            sca_tol: 1e-5,
            dual_iters: 500,
            dual_step: 0.5,
            feas_tol: 1e-6,
            delay_slack_s: 1e-9,
            power_model: PowerModel::EpsSum,
        }
    }
}

/// Complete configuration of one simulation run. Unknown keys inside each
/// section are rejected; unknown top-level sections (such as a sweep plan
/// interpreted by the harness) are ignored here.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Config {
    pub network: NetworkConfig,
    pub radio: RadioConfig,
    pub channel: ChannelConfig,
    pub mobility: MobilityConfig,
    pub social: SocialConfig,
    pub task: TaskConfig,
    pub compute: ComputeConfig,
    pub solver: SolverConfig,
}

impl Config {
    /// Noise power in linear watts.
    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.radio.noise_dbm)
    }

    /// CU transmit power in linear watts.
    pub fn cu_power_watts(&self) -> f64 {
        dbm_to_watts(self.radio.cu_power_dbm)
    }

    /// T-VU maximum transmit power in linear watts.
    pub fn tvu_max_power_watts(&self) -> f64 {
        dbm_to_watts(self.radio.tvu_max_power_dbm)
    }

    /// Effective deadline after the strict-inequality slack.
    pub fn effective_deadline_s(&self) -> f64 {
        self.task.deadline_s - self.solver.delay_slack_s
    }
}

/// One configuration problem. `fatal` issues reject the config; warnings are
/// reported but do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub fatal: bool,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.fatal { "error" } else { "warning" };
        write!(f, "{kind}: {}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
}

fn fatal(field: &str, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue { fatal: true, field: field.to_string(), message: message.into() }
}

fn warning(field: &str, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue { fatal: false, field: field.to_string(), message: message.into() }
}

/// Validate a config, reporting every violation rather than the first.
/// Returns the full issue list (warnings included) on success.
///
/// Positivity checks use negated comparisons so NaN values fail them.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate_config(cfg: &Config) -> Result<Vec<ConfigIssue>, ConfigError> {
    let mut issues = Vec::new();
    let n = &cfg.network;

    if n.num_scs != n.num_cus {
        issues.push(fatal(
            "network.num_scs",
            format!(
                "the model assumes one sub-channel per CU (F = U); got F = {} and U = {}",
                n.num_scs, n.num_cus
            ),
        ));
    }
    if n.num_tvus > n.num_cus {
        issues.push(fatal(
            "network.num_tvus",
            format!(
                "each T-VU must be able to underlay a distinct CU sub-channel (M <= U); got M = {} and U = {}",
                n.num_tvus, n.num_cus
            ),
        ));
    }
    if n.num_tvus == 0 {
        issues.push(fatal("network.num_tvus", "at least one T-VU is required"));
    }
    if n.num_cus == 0 {
        issues.push(fatal("network.num_cus", "at least one CU is required"));
    }
    if n.num_rsus == 0 {
        issues.push(fatal("network.num_rsus", "at least one RSU is required"));
    }
    if n.num_slots == 0 {
        issues.push(fatal("network.num_slots", "at least one time slot is required"));
    }

    for (field, value) in [
        ("radio.bandwidth_hz", cfg.radio.bandwidth_hz),
        ("radio.cu_rate_min_bps", cfg.radio.cu_rate_min_bps),
        ("task.size_min_bits", cfg.task.size_min_bits),
        ("task.size_max_bits", cfg.task.size_max_bits),
        ("task.cycles_per_bit", cfg.task.cycles_per_bit),
        ("task.deadline_s", cfg.task.deadline_s),
        ("compute.local_rate_hz", cfg.compute.local_rate_hz),
        ("compute.rsu_rate_hz", cfg.compute.rsu_rate_hz),
        ("compute.svu_rate_hz", cfg.compute.svu_rate_hz),
        ("compute.kappa", cfg.compute.kappa),
        ("mobility.area_m", cfg.mobility.area_m),
        ("mobility.lane_width_m", cfg.mobility.lane_width_m),
        ("mobility.rsu_radius_m", cfg.mobility.rsu_radius_m),
        ("mobility.slot_duration_s", cfg.mobility.slot_duration_s),
    ] {
        if !(value > 0.0) {
            issues.push(fatal(field, format!("must be positive, got {value}")));
        }
    }
    if cfg.compute.circuit_power_w < 0.0 {
        issues.push(fatal("compute.circuit_power_w", "must be nonnegative"));
    }
    if cfg.task.size_min_bits > cfg.task.size_max_bits {
        issues.push(fatal("task.size_min_bits", "size_min_bits exceeds size_max_bits"));
    }
    if cfg.mobility.speed_min_mps < 0.0 || cfg.mobility.speed_max_mps < cfg.mobility.speed_min_mps {
        issues.push(fatal("mobility.speed_min_mps", "need 0 <= speed_min <= speed_max"));
    }
    if !(0.0..=1.0).contains(&cfg.social.psi_weight) {
        issues.push(fatal("social.psi_weight", "weight must lie in [0, 1]"));
    }
    if !(cfg.social.zeta_th > 0.0 && cfg.social.zeta_th <= 1.0) {
        issues.push(fatal("social.zeta_th", "threshold must lie in (0, 1]"));
    }
    if !(0.0..=1.0).contains(&cfg.social.social_density) {
        issues.push(fatal("social.social_density", "density must lie in [0, 1]"));
    }
    if cfg.solver.max_outer_iters == 0 {
        issues.push(fatal("solver.max_outer_iters", "need at least one iteration"));
    }
    if !(cfg.solver.outer_tol > 0.0) {
        issues.push(fatal("solver.outer_tol", "tolerance must be positive"));
    }
    if cfg.solver.delay_slack_s < 0.0 || cfg.solver.delay_slack_s >= cfg.task.deadline_s {
        issues.push(fatal("solver.delay_slack_s", "slack must be in [0, deadline)"));
    }

    // Out-of-range but not fatal: the evaluated T-VU power band is 15-30 dBm.
    let p = cfg.radio.tvu_max_power_dbm;
    if !(15.0..=30.0).contains(&p) {
        issues.push(warning(
            "radio.tvu_max_power_dbm",
            format!("{p} dBm lies outside the evaluated 15-30 dBm band"),
        ));
    }

    if issues.iter().any(|i| i.fatal) {
        Err(ConfigError::Invalid(issues))
    } else {
        Ok(issues)
    }
}

/// Parse a TOML config string. Missing sections and fields take defaults, so
/// the empty string yields the default config.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    Ok(toml::from_str(text)?)
}

/// Load and validate a config file. Returns the config and any warnings.
pub fn load_config(path: &Path) -> Result<(Config, Vec<ConfigIssue>), ConfigError> {
    let text = std::fs::read_to_string(path)?;
    let cfg = parse_config(&text)?;
    let warnings = validate_config(&cfg)?;
    Ok((cfg, warnings))
}
