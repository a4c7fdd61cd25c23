//! Reproducible world generation: road topology and vehicle placement,
//! per-slot mobility and channel gains, the social willingness graph, the
//! social-mobility trust indicator, and task workloads.
//!
//! Everything is a deterministic function of `(Config, seed)`. The channel
//! model is a documented simplification: log-distance path loss with
//! free-space reference at 1 m, log-normal shadowing, and unit-mean
//! exponential (Rayleigh-power) fast fading redrawn each slot.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Config, ConfigError, validate_config};
use crate::mat::Mat;
use crate::model::{ChannelSlot, ComputeBudget, TaskSpec};
use crate::scalar::{s, Scalar};

/// Population and horizon sizes of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub num_tvus: usize,
    pub num_svus: usize,
    pub num_cus: usize,
    pub num_scs: usize,
    pub num_rsus: usize,
    pub num_slots: usize,
}

impl Dims {
    pub fn from_config(cfg: &Config) -> Self {
        Self {
            num_tvus: cfg.network.num_tvus,
            num_svus: cfg.network.num_svus,
            num_cus: cfg.network.num_cus,
            num_scs: cfg.network.num_scs,
            num_rsus: cfg.network.num_rsus,
            num_slots: cfg.network.num_slots,
        }
    }
}

/// A vehicle's kinematic state: lane, position along the road axis, speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle<S> {
    pub lane: usize,
    pub pos: S,
    pub speed: S,
}

/// Per-slot world state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotData<S> {
    pub tvu_pos: Vec<(S, S)>,
    pub svu_pos: Vec<(S, S)>,
    pub channels: ChannelSlot<S>,
    /// Proximity score rho per (m, n).
    pub proximity: Mat<S>,
    /// Trust indicator (mobility AND social willingness) per (m, n).
    pub trust: Mat<u8>,
    /// Nearest covering RSU per T-VU; None when outside every disc.
    pub serving_rsu: Vec<Option<usize>>,
    pub tasks: Vec<TaskSpec<S>>,
}

/// Immutable per-drop world state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<S> {
    pub seed: u64,
    pub dims: Dims,
    pub mbs: (S, S),
    pub rsus: Vec<(S, S)>,
    pub cus: Vec<(S, S)>,
    pub tvus: Vec<Vehicle<S>>,
    pub svus: Vec<Vehicle<S>>,
    /// Social willingness delta per (m, n), fixed within the drop.
    pub social: Mat<u8>,
    pub slots: Vec<SlotData<S>>,
}

/// Versioned envelope for scenario trace files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDump<S> {
    pub schema_version: u32,
    pub config: Config,
    pub scenario: Scenario<S>,
}

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

impl<S: Scalar + Serialize + for<'de> Deserialize<'de>> Scenario<S> {
    pub fn dump_json(&self, config: &Config) -> String {
        let dump = ScenarioDump {
            schema_version: SCENARIO_SCHEMA_VERSION,
            config: config.clone(),
            scenario: self.clone(),
        };
        serde_json::to_string_pretty(&dump).expect("scenario serialization")
    }

    pub fn from_dump_json(text: &str) -> Result<ScenarioDump<S>, serde_json::Error> {
        serde_json::from_str(text)
    }
}

// ---------------------------------------------------------------------------
// Seed derivation and raw draws
// ---------------------------------------------------------------------------

/// SplitMix64 step; used to derive independent stream seeds from the master
/// seed so components stay stable when sampled in different orders.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Every random quantity draws from its own (stream, index) substream, so
/// growing one population (more T-VUs, more CUs) appends entities without
/// redrawing anything that already existed. Sweeps along a size axis then
/// compare nested worlds, which removes most Monte Carlo noise from the
/// axis trends.
fn substream(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(mix_seed(seed, stream), index.wrapping_add(1)))
}

const STREAM_TVU_PLACE: u64 = 0x10;
const STREAM_SVU_PLACE: u64 = 0x11;
const STREAM_CU_PLACE: u64 = 0x12;
const STREAM_SOCIAL: u64 = 0x13;
const STREAM_TASKS: u64 = 0x14;
const STREAM_LINK: u64 = 0x20;

/// Link kinds for channel substream derivation.
#[derive(Clone, Copy)]
enum LinkKind {
    CuMbs = 0,
    TvuMbs = 1,
    TvuRsu = 2,
    TvuSvu = 3,
    CuRsu = 4,
    CuSvu = 5,
}

fn link_rng(seed: u64, t: usize, kind: LinkKind, i: usize, j: usize) -> ChaCha8Rng {
    let index = (t as u64) << 44 | (kind as u64) << 40 | (i as u64) << 20 | j as u64;
    substream(seed, STREAM_LINK, index)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Exponential draw by inverse transform; `mean > 0`.
fn exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    let u: f64 = rng.random();
    -mean * (1.0 - u).ln()
}

/// Standard normal via Box-Muller.
fn normal(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gap to the previous vehicle in the same lane; mean 2.5 * speed meters.
pub fn inter_vehicle_gap(rng: &mut ChaCha8Rng, speed_mps: f64) -> f64 {
    exponential(rng, 2.5 * speed_mps)
}

// ---------------------------------------------------------------------------
// Channel model
// ---------------------------------------------------------------------------

/// Free-space path loss at the 1 m reference distance, dB.
pub fn reference_path_loss_db(carrier_ghz: f64) -> f64 {
    let f_hz = carrier_ghz * 1e9;
    20.0 * (4.0 * std::f64::consts::PI * f_hz / 3e8).log10()
}

/// One link-gain draw: log-distance path loss, log-normal shadowing, and
/// unit-mean exponential fast fading. Distances clamp to the 1 m reference.
pub fn link_gain(
    rng: &mut ChaCha8Rng,
    distance_m: f64,
    pl_exponent: f64,
    shadow_sigma_db: f64,
    pl0_db: f64,
) -> f64 {
    let d = distance_m.max(1.0);
    let pl_db = pl0_db + 10.0 * pl_exponent * d.log10() + normal(rng, shadow_sigma_db);
    let fade = exponential(rng, 1.0);
    10f64.powf(-pl_db / 10.0) * fade
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Draw the full gain tensor set for one slot. Every link draws from its
/// own substream of the scenario seed, so the tensors are stable under
/// population growth.
#[allow(clippy::too_many_arguments)]
pub fn step_channels<S: Scalar>(
    cfg: &Config,
    seed: u64,
    t: usize,
    tvu_pos: &[(f64, f64)],
    svu_pos: &[(f64, f64)],
    cu_pos: &[(f64, f64)],
    rsu_pos: &[(f64, f64)],
    mbs: (f64, f64),
) -> ChannelSlot<S> {
    let ch = &cfg.channel;
    let pl0 = reference_path_loss_db(ch.carrier_ghz);
    let sig_i = ch.shadow_sigma_v2i_db;
    let sig_v = ch.shadow_sigma_v2v_db;
    let draw = |kind: LinkKind, i: usize, j: usize, d: f64, alpha: f64, sigma: f64| -> S {
        let mut rng = link_rng(seed, t, kind, i, j);
        s(link_gain(&mut rng, d, alpha, sigma, pl0))
    };

    let h_cu: Vec<S> = cu_pos
        .iter()
        .enumerate()
        .map(|(u, &p)| draw(LinkKind::CuMbs, u, 0, dist(p, mbs), ch.pl_exp_cu, sig_i))
        .collect();
    // The CU receiver is the MBS uplink; interference from a T-VU is drawn
    // per (m, u) pair because each CU's sub-channel fades independently.
    let h_tvu_cu = Mat::from_fn(tvu_pos.len(), cu_pos.len(), |m, u| {
        draw(LinkKind::TvuMbs, m, u, dist(tvu_pos[m], mbs), ch.pl_exp_cu, sig_i)
    });
    let h_tvu_rsu = Mat::from_fn(tvu_pos.len(), rsu_pos.len(), |m, r| {
        draw(LinkKind::TvuRsu, m, r, dist(tvu_pos[m], rsu_pos[r]), ch.pl_exp_v2i, sig_i)
    });
    let h_tvu_svu = Mat::from_fn(tvu_pos.len(), svu_pos.len(), |m, n| {
        draw(LinkKind::TvuSvu, m, n, dist(tvu_pos[m], svu_pos[n]), ch.pl_exp_v2v, sig_v)
    });
    let h_cu_rsu = Mat::from_fn(cu_pos.len(), rsu_pos.len(), |u, r| {
        draw(LinkKind::CuRsu, u, r, dist(cu_pos[u], rsu_pos[r]), ch.pl_exp_cu, sig_i)
    });
    let h_cu_svu = Mat::from_fn(cu_pos.len(), svu_pos.len(), |u, n| {
        draw(LinkKind::CuSvu, u, n, dist(cu_pos[u], svu_pos[n]), ch.pl_exp_cu, sig_i)
    });

    ChannelSlot {
        h_cu,
        h_tvu_cu,
        h_tvu_rsu,
        h_tvu_svu,
        h_cu_rsu,
        h_cu_svu,
        sigma2: s(cfg.noise_watts()),
        bandwidth: s(cfg.radio.bandwidth_hz),
    }
}

// ---------------------------------------------------------------------------
// Mobility and the social-mobility indicator
// ---------------------------------------------------------------------------

/// Advance positions along the road axis by one slot; the road wraps as a
/// torus so the population density stays constant.
pub fn step_mobility<S: Scalar>(vehicles: &mut [Vehicle<S>], dt_s: S, area_m: S) {
    for v in vehicles {
        let mut next = v.pos + v.speed * dt_s;
        while next >= area_m {
            next = next - area_m;
        }
        v.pos = next;
    }
}

/// Normalization parameters of the proximity score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityParams<S> {
    /// Distance weight psi in [0, 1].
    pub psi_weight: S,
    /// Physical-domain threshold zeta in (0, 1].
    pub zeta_th: S,
    /// Distance normalizer (2 * RSU radius).
    pub max_distance: S,
    /// Velocity-difference normalizer (config speed span).
    pub max_speed_delta: S,
}

impl<S: Scalar> ProximityParams<S> {
    pub fn from_config(cfg: &Config) -> Self {
        Self {
            psi_weight: s(cfg.social.psi_weight),
            zeta_th: s(cfg.social.zeta_th),
            max_distance: s(2.0 * cfg.mobility.rsu_radius_m),
            max_speed_delta: s(cfg.mobility.speed_max_mps - cfg.mobility.speed_min_mps),
        }
    }
}

fn clamp01<S: Scalar>(x: S) -> S {
    x.min(S::one()).max(S::zero())
}

/// Proximity score rho in [0, 1]: a weighted blend of normalized distance
/// and normalized speed difference. Small rho means close and co-moving.
pub fn proximity_score<S: Scalar>(params: &ProximityParams<S>, delta_d: S, delta_v: S) -> S {
    let f_d = clamp01(delta_d / params.max_distance);
    let f_v = if params.max_speed_delta > S::zero() {
        clamp01(delta_v.abs() / params.max_speed_delta)
    } else {
        S::zero()
    };
    params.psi_weight * f_d + (S::one() - params.psi_weight) * f_v
}

/// Mobility indicator: 1 when the proximity score is strictly below the
/// physical-domain threshold.
pub fn mobility_indicator<S: Scalar>(params: &ProximityParams<S>, rho: S) -> u8 {
    u8::from(rho < params.zeta_th)
}

/// Trust indicator: the product of the mobility indicator and the social
/// willingness bit.
pub fn trust_indicator(k: u8, delta: u8) -> u8 {
    k * delta
}

/// I.i.d. Bernoulli social willingness graph; each pair draws from its own
/// substream.
pub fn generate_social_graph(
    num_tvus: usize,
    num_svus: usize,
    density: f64,
    seed: u64,
) -> Mat<u8> {
    Mat::from_fn(num_tvus, num_svus, |m, n| {
        let mut rng = substream(seed, STREAM_SOCIAL, (m as u64) << 20 | n as u64);
        u8::from(rng.random::<f64>() < density)
    })
}

// ---------------------------------------------------------------------------
// Scenario generation
// ---------------------------------------------------------------------------

fn lane_center_y(cfg: &Config, lane: usize) -> f64 {
    let road_width = cfg.mobility.lane_count as f64 * cfg.mobility.lane_width_m;
    let road_south = cfg.mobility.area_m / 2.0 - road_width / 2.0;
    road_south + (lane as f64 + 0.5) * cfg.mobility.lane_width_m
}

fn vehicle_xy<S: Scalar>(cfg: &Config, v: &Vehicle<S>) -> (f64, f64) {
    (v.pos.to_f64_lossy(), lane_center_y(cfg, v.lane))
}

/// Place `count` vehicles of one population across the lanes: round-robin
/// lane assignment, exponential headway (mean 2.5 * speed) chained within
/// each lane, torus wrap. Each vehicle draws from its own substream, so a
/// larger count appends vehicles without moving the existing ones.
fn place_vehicles<S: Scalar>(
    cfg: &Config,
    count: usize,
    seed: u64,
    stream: u64,
) -> Vec<Vehicle<S>> {
    let area = cfg.mobility.area_m;
    let mut lane_cursor: Vec<Option<f64>> = vec![None; cfg.mobility.lane_count];
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = substream(seed, stream, i as u64);
        let lane = i % cfg.mobility.lane_count;
        let speed = uniform(&mut rng, cfg.mobility.speed_min_mps, cfg.mobility.speed_max_mps);
        let pos = match lane_cursor[lane] {
            None => uniform(&mut rng, 0.0, area),
            Some(prev) => (prev + inter_vehicle_gap(&mut rng, speed)) % area,
        };
        lane_cursor[lane] = Some(pos);
        out.push(Vehicle { lane, pos: s(pos), speed: s(speed) });
    }
    out
}

fn serving_rsu(cfg: &Config, pos: (f64, f64), rsus: &[(f64, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &r) in rsus.iter().enumerate() {
        let d = dist(pos, r);
        if d <= cfg.mobility.rsu_radius_m && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Generate a full reproducible scenario from `(config, seed)`.
pub fn generate_scenario<S: Scalar>(cfg: &Config, seed: u64) -> Result<Scenario<S>, ConfigError> {
    validate_config(cfg)?;
    let dims = Dims::from_config(cfg);
    let area = cfg.mobility.area_m;
    let mbs = (area / 2.0, area / 2.0);

    // RSUs evenly spaced along the roadside, just south of the outermost lane.
    let road_width = cfg.mobility.lane_count as f64 * cfg.mobility.lane_width_m;
    let rsu_y = area / 2.0 - road_width / 2.0 - 2.0;
    let rsus: Vec<(f64, f64)> = (0..dims.num_rsus)
        .map(|i| ((i as f64 + 0.5) * area / dims.num_rsus as f64, rsu_y))
        .collect();

    let tvus: Vec<Vehicle<S>> = place_vehicles(cfg, dims.num_tvus, seed, STREAM_TVU_PLACE);
    let svus: Vec<Vehicle<S>> = place_vehicles(cfg, dims.num_svus, seed, STREAM_SVU_PLACE);
    let cus: Vec<(f64, f64)> = (0..dims.num_cus)
        .map(|u| {
            let mut rng = substream(seed, STREAM_CU_PLACE, u as u64);
            (uniform(&mut rng, 0.0, area), uniform(&mut rng, 0.0, area))
        })
        .collect();

    let social = generate_social_graph(dims.num_tvus, dims.num_svus, cfg.social.social_density, seed);
    let prox = ProximityParams::<S>::from_config(cfg);

    let dt = s::<S>(cfg.mobility.slot_duration_s);
    let area_s = s::<S>(area);

    let mut cur_tvus = tvus.clone();
    let mut cur_svus = svus.clone();
    let mut slots = Vec::with_capacity(dims.num_slots);
    for t in 0..dims.num_slots {
        if t > 0 {
            step_mobility(&mut cur_tvus, dt, area_s);
            step_mobility(&mut cur_svus, dt, area_s);
        }
        let tvu_xy: Vec<(f64, f64)> = cur_tvus.iter().map(|v| vehicle_xy(cfg, v)).collect();
        let svu_xy: Vec<(f64, f64)> = cur_svus.iter().map(|v| vehicle_xy(cfg, v)).collect();

        let channels = step_channels::<S>(cfg, seed, t, &tvu_xy, &svu_xy, &cus, &rsus, mbs);

        let proximity = Mat::from_fn(dims.num_tvus, dims.num_svus, |m, n| {
            let dd = s::<S>(dist(tvu_xy[m], svu_xy[n]));
            let dv = cur_tvus[m].speed - cur_svus[n].speed;
            proximity_score(&prox, dd, dv)
        });
        let trust = Mat::from_fn(dims.num_tvus, dims.num_svus, |m, n| {
            let k = mobility_indicator(&prox, proximity.get(m, n));
            trust_indicator(k, social.get(m, n))
        });
        let serving: Vec<Option<usize>> =
            tvu_xy.iter().map(|&p| serving_rsu(cfg, p, &rsus)).collect();

        let tasks: Vec<TaskSpec<S>> = (0..dims.num_tvus)
            .map(|m| {
                let mut rng = substream(seed, STREAM_TASKS, (m as u64) << 20 | t as u64);
                TaskSpec {
                    size_bits: s(uniform(&mut rng, cfg.task.size_min_bits, cfg.task.size_max_bits)),
                    cycles_per_bit: s(cfg.task.cycles_per_bit),
                    deadline_s: s(cfg.task.deadline_s),
                }
            })
            .collect();

        slots.push(SlotData {
            tvu_pos: tvu_xy.iter().map(|&(x, y)| (s(x), s(y))).collect(),
            svu_pos: svu_xy.iter().map(|&(x, y)| (s(x), s(y))).collect(),
            channels,
            proximity,
            trust,
            serving_rsu: serving,
            tasks,
        });
    }

    Ok(Scenario {
        seed,
        dims,
        mbs: (s(mbs.0), s(mbs.1)),
        rsus: rsus.iter().map(|&(x, y)| (s(x), s(y))).collect(),
        cus: cus.iter().map(|&(x, y)| (s(x), s(y))).collect(),
        tvus,
        svus,
        social,
        slots,
    })
}

/// Uniform per-T-VU compute budgets from the config, with the full RSU
/// rate granted to each T-VU (single-tenant view; used by unit tests).
pub fn budgets_from_config<S: Scalar>(cfg: &Config, count: usize) -> Vec<ComputeBudget<S>> {
    (0..count)
        .map(|_| ComputeBudget {
            local_rate: s(cfg.compute.local_rate_hz),
            rsu_rate: s(cfg.compute.rsu_rate_hz),
            svu_rate: s(cfg.compute.svu_rate_hz),
            kappa: s(cfg.compute.kappa),
            circuit_power: s(cfg.compute.circuit_power_w),
        })
        .collect()
}

/// Per-T-VU compute budgets for one slot. Each RSU's server rate is shared
/// fairly among the T-VUs it serves that slot, so denser cells grant
/// smaller execution shares. An S-VU serves at most one T-VU and grants its
/// full rate.
pub fn slot_budgets<S: Scalar>(
    cfg: &Config,
    serving_rsu: &[Option<usize>],
) -> Vec<ComputeBudget<S>> {
    let mut load = vec![0usize; cfg.network.num_rsus];
    for rsu in serving_rsu.iter().flatten() {
        load[*rsu] += 1;
    }
    serving_rsu
        .iter()
        .map(|rsu| {
            let share = match rsu {
                Some(r) => cfg.compute.rsu_rate_hz / load[*r].max(1) as f64,
                None => cfg.compute.rsu_rate_hz,
            };
            ComputeBudget {
                local_rate: s(cfg.compute.local_rate_hz),
                rsu_rate: s(share),
                svu_rate: s(cfg.compute.svu_rate_hz),
                kappa: s(cfg.compute.kappa),
                circuit_power: s(cfg.compute.circuit_power_w),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> Config {
        let mut cfg = Config::default();
        cfg.network.num_tvus = 4;
        cfg.network.num_svus = 3;
        cfg.network.num_cus = 6;
        cfg.network.num_scs = 6;
        cfg.network.num_rsus = 4;
        cfg.network.num_slots = 3;
        cfg
    }

    #[test]
    fn determinism_same_seed_same_scenario() {
        let cfg = small_cfg();
        let a: Scenario<f64> = generate_scenario(&cfg, 7).unwrap();
        let b: Scenario<f64> = generate_scenario(&cfg, 7).unwrap();
        assert_eq!(a, b);
        // Byte-for-byte after serialization.
        assert_eq!(a.dump_json(&cfg), b.dump_json(&cfg));
        let c: Scenario<f64> = generate_scenario(&cfg, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn dump_round_trip_preserves_scenario() {
        let cfg = small_cfg();
        let a: Scenario<f64> = generate_scenario(&cfg, 3).unwrap();
        let text = a.dump_json(&cfg);
        let back = Scenario::<f64>::from_dump_json(&text).unwrap();
        assert_eq!(back.schema_version, SCENARIO_SCHEMA_VERSION);
        assert_eq!(back.scenario, a);
        assert_eq!(back.config, cfg);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = small_cfg();
        cfg.network.num_scs = 5; // != num_cus
        assert!(generate_scenario::<f64>(&cfg, 1).is_err());
    }

    #[test]
    fn gains_positive_positions_in_bounds() {
        let cfg = small_cfg();
        let sc: Scenario<f64> = generate_scenario(&cfg, 11).unwrap();
        for slot in &sc.slots {
            for &g in slot.channels.h_cu.iter() {
                assert!(g > 0.0);
            }
            for g in slot.channels.h_tvu_rsu.iter().chain(slot.channels.h_tvu_svu.iter()) {
                assert!(*g > 0.0);
            }
            for &(x, y) in slot.tvu_pos.iter().chain(slot.svu_pos.iter()) {
                assert!((0.0..cfg.mobility.area_m).contains(&x));
                assert!((0.0..=cfg.mobility.area_m).contains(&y));
            }
        }
    }

    #[test]
    fn trust_bounded_by_delta_and_mobility() {
        let cfg = small_cfg();
        let sc: Scenario<f64> = generate_scenario(&cfg, 5).unwrap();
        let prox = ProximityParams::<f64>::from_config(&cfg);
        for slot in &sc.slots {
            for m in 0..cfg.network.num_tvus {
                for n in 0..cfg.network.num_svus {
                    let t = slot.trust.get(m, n);
                    let k = mobility_indicator(&prox, slot.proximity.get(m, n));
                    assert!(t <= sc.social.get(m, n));
                    assert!(t <= k);
                    let rho = slot.proximity.get(m, n);
                    assert!((0.0..=1.0).contains(&rho));
                }
            }
        }
    }

    #[test]
    fn mobility_step_kinematics_and_wrap() {
        let mut v = vec![Vehicle { lane: 0, pos: 100.0f64, speed: 0.0 }];
        step_mobility(&mut v, 1.0, 1000.0);
        assert_eq!(v[0].pos, 100.0);

        let mut v = vec![Vehicle { lane: 0, pos: 100.0f64, speed: 10.0 }];
        step_mobility(&mut v, 1.0, 1000.0);
        assert!((v[0].pos - 110.0).abs() < 1e-12);

        let mut v = vec![Vehicle { lane: 0, pos: 995.0f64, speed: 10.0 }];
        step_mobility(&mut v, 1.0, 1000.0);
        assert!((v[0].pos - 5.0).abs() < 1e-12);
    }

    #[test]
    fn proximity_score_cases() {
        let p = ProximityParams {
            psi_weight: 0.5f64,
            zeta_th: 0.5,
            max_distance: 300.0,
            max_speed_delta: 15.0,
        };
        assert_eq!(proximity_score(&p, 0.0, 0.0), 0.0);
        let p1 = ProximityParams { psi_weight: 1.0, ..p };
        assert!((proximity_score(&p1, 60.0, 7.0) - 0.2).abs() < 1e-12);
        // psi=0.5, f_d=0.4, f_v=0.8 -> 0.6
        assert!((proximity_score(&p, 120.0, 12.0) - 0.6).abs() < 1e-12);
        // Clamps keep rho in [0, 1] even far outside the normalizers.
        assert!(proximity_score(&p, 1e9, 1e9) <= 1.0);
    }

    #[test]
    fn mobility_indicator_strict_threshold() {
        let p = ProximityParams {
            psi_weight: 0.5f64,
            zeta_th: 0.5,
            max_distance: 300.0,
            max_speed_delta: 15.0,
        };
        assert_eq!(mobility_indicator(&p, 0.3), 1);
        assert_eq!(mobility_indicator(&p, 0.5), 0);
        assert_eq!(mobility_indicator(&p, 0.9), 0);
    }

    #[test]
    fn trust_indicator_product() {
        assert_eq!(trust_indicator(1, 1), 1);
        assert_eq!(trust_indicator(1, 0), 0);
        assert_eq!(trust_indicator(0, 1), 0);
    }

    #[test]
    fn social_graph_extremes_and_density() {
        let ones = generate_social_graph(20, 20, 1.0, 1);
        assert!(ones.iter().all(|&d| d == 1));
        let zeros = generate_social_graph(20, 20, 0.0, 1);
        assert!(zeros.iter().all(|&d| d == 0));

        let g = generate_social_graph(100, 100, 0.5, 42);
        let density = g.iter().map(|&d| d as f64).sum::<f64>() / 1e4;
        assert!((density - 0.5).abs() < 0.02, "density {density}");
    }

    #[test]
    fn lane_spacing_mean_matches_speed_rule() {
        // At 20 m/s the mean headway must be 50 m, within 5% over 1e4 draws.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        let mean: f64 = (0..n).map(|_| inter_vehicle_gap(&mut rng, 20.0)).sum::<f64>() / n as f64;
        assert!((mean - 50.0).abs() < 2.5, "mean gap {mean}");
    }

    #[test]
    fn fading_mean_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| exponential(&mut rng, 1.0)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "fading mean {mean}");
    }

    #[test]
    fn reference_distance_gain_without_randomness() {
        // With shadowing and fading forced off, the gain at 1 m is exactly
        // the free-space reference.
        let pl0 = reference_path_loss_db(2.0);
        assert!((pl0 - 38.462_372_099_328_3).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // sigma 0 removes shadowing; divide the fading back out.
        let g = link_gain(&mut rng, 1.0, 3.5, 0.0, pl0);
        let mut rng2 = ChaCha8Rng::seed_from_u64(0);
        let fade = {
            let _shadow: f64 = {
                // consume the same draws in the same order as link_gain
                let u1: f64 = 1.0 - rng2.random::<f64>();
                let u2: f64 = rng2.random();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            };
            let u: f64 = rng2.random();
            -(1.0 - u).ln()
        };
        assert!((g / fade - 10f64.powf(-pl0 / 10.0)).abs() < 1e-15);
    }

    #[test]
    fn pathloss_slope_statistical() {
        // Doubling the distance shifts the mean dB gain by -10*alpha*log10(2).
        let pl0 = reference_path_loss_db(2.0);
        let alpha = 3.5;
        let n = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mean_db = |rng: &mut ChaCha8Rng, d: f64| -> f64 {
            (0..n)
                .map(|_| 10.0 * link_gain(rng, d, alpha, 8.0, pl0).log10())
                .sum::<f64>()
                / n as f64
        };
        let m1 = mean_db(&mut rng, 100.0);
        let m2 = mean_db(&mut rng, 200.0);
        let expected = -10.0 * alpha * 2f64.log10();
        assert!(((m2 - m1) - expected).abs() < 0.5, "shift {}", m2 - m1);
    }

    #[test]
    fn task_sizes_within_range() {
        let cfg = small_cfg();
        let sc: Scenario<f64> = generate_scenario(&cfg, 19).unwrap();
        for slot in &sc.slots {
            for t in &slot.tasks {
                assert!(t.size_bits >= cfg.task.size_min_bits);
                assert!(t.size_bits <= cfg.task.size_max_bits);
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let cfg = small_cfg();
        let sc: Scenario<f32> = generate_scenario(&cfg, 7).unwrap();
        assert_eq!(sc.slots.len(), 3);
        assert!(sc.slots[0].channels.h_cu[0] > 0.0);
    }
}
