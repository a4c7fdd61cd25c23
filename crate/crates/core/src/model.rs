//! Closed-form evaluation of the communication and computation model: SINRs
//! and rates for CU uplinks, V2I and V2V offload links under NOMA spectrum
//! sharing with SIC, task delays, total consumed power and the resulting
//! system energy efficiency. Everything here is a pure function of a channel
//! snapshot and an allocation; the solver and the verification oracles both
//! build on these evaluators.

use serde::{Deserialize, Serialize};

use crate::config::PowerModel;
use crate::mat::Mat;
use crate::scalar::Scalar;

/// Channel state for one time slot: linear power gains for every link the
/// model evaluates, plus noise power and per-sub-channel bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSlot<S> {
    /// CU uplink gain, indexed by CU.
    pub h_cu: Vec<S>,
    /// Interference gain from T-VU m into CU u's receiver, (m, u).
    pub h_tvu_cu: Mat<S>,
    /// Gain from T-VU m to RSU s, (m, s).
    pub h_tvu_rsu: Mat<S>,
    /// Gain from T-VU m to S-VU n, (m, n).
    pub h_tvu_svu: Mat<S>,
    /// Interference gain from CU u into RSU s, (u, s).
    pub h_cu_rsu: Mat<S>,
    /// Interference gain from CU u into S-VU n, (u, n).
    pub h_cu_svu: Mat<S>,
    /// Noise power in watts.
    pub sigma2: S,
    /// Per-sub-channel bandwidth in Hz.
    pub bandwidth: S,
}

impl<S: Scalar> ChannelSlot<S> {
    pub fn num_tvus(&self) -> usize {
        self.h_tvu_rsu.rows()
    }

    pub fn num_cus(&self) -> usize {
        self.h_cu.len()
    }

    pub fn num_svus(&self) -> usize {
        self.h_tvu_svu.cols()
    }

    pub fn num_rsus(&self) -> usize {
        self.h_tvu_rsu.cols()
    }
}

/// One computation task: size, per-bit CPU work and deadline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec<S> {
    /// Task size in bits.
    pub size_bits: S,
    /// CPU cycles per bit.
    pub cycles_per_bit: S,
    /// Maximum tolerable delay in seconds.
    pub deadline_s: S,
}

/// CPU rates and power coefficients for one T-VU's three execution sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputeBudget<S> {
    /// Local CPU rate, cycles/s.
    pub local_rate: S,
    /// RSU-server CPU rate allocated to this T-VU, cycles/s.
    pub rsu_rate: S,
    /// S-VU CPU rate allocated to this T-VU, cycles/s.
    pub svu_rate: S,
    /// Effective switched capacitance.
    pub kappa: S,
    /// Circuit power in watts.
    pub circuit_power: S,
}

/// Multiple-access discipline on a shared sub-channel. Under `Noma` the V2I
/// and V2V streams superpose at full bandwidth and are separated by SIC;
/// under `Oma` they time-share the slot in equal halves, interference-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccessMode {
    Noma,
    Oma,
}

/// SIC decoding order on a shared sub-channel, fixed by the increasing order
/// of the channel coefficients toward the two receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SicOrder {
    /// V2I decoded first (RSU channel weaker): the V2I receiver still sees
    /// the V2V stream; the V2V receiver is clean after cancellation.
    V2iFirst,
    /// V2V decoded first (mirror case).
    V2vFirst,
}

/// The decision variables of one slot: server selection, task split,
/// spectrum assignment and NOMA power coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation<S> {
    pub mode: AccessMode,
    /// Selected S-VU per T-VU (at most one; None = no V2V offload).
    pub svu_of_tvu: Vec<Option<usize>>,
    /// RSU association per T-VU (None = outside every coverage disc).
    pub rsu_of_tvu: Vec<Option<usize>>,
    /// Task split toward the RSU per T-VU.
    pub beta1: Vec<S>,
    /// Task split toward the S-VU per T-VU.
    pub beta2: Vec<S>,
    /// Sub-channel of each CU (one each, a permutation of 0..F).
    pub sc_of_cu: Vec<usize>,
    /// Sub-channel of each T-VU (None = unassigned / not transmitting).
    pub sc_of_tvu: Vec<Option<usize>>,
    /// NOMA power coefficient toward the RSU per T-VU.
    pub eps1: Vec<S>,
    /// NOMA power coefficient toward the S-VU per T-VU.
    pub eps2: Vec<S>,
}

impl<S: Scalar> Allocation<S> {
    /// An all-idle allocation: no spectrum, no offloading, zero power.
    pub fn idle(mode: AccessMode, num_tvus: usize, num_cus: usize) -> Self {
        Self {
            mode,
            svu_of_tvu: vec![None; num_tvus],
            rsu_of_tvu: vec![None; num_tvus],
            beta1: vec![S::zero(); num_tvus],
            beta2: vec![S::zero(); num_tvus],
            sc_of_cu: (0..num_cus).collect(),
            sc_of_tvu: vec![None; num_tvus],
            eps1: vec![S::zero(); num_tvus],
            eps2: vec![S::zero(); num_tvus],
        }
    }

    pub fn num_tvus(&self) -> usize {
        self.beta1.len()
    }

    /// The T-VU sharing CU u's sub-channel, if any.
    pub fn cochannel_tvu(&self, u: usize) -> Option<usize> {
        let sc = self.sc_of_cu[u];
        self.sc_of_tvu.iter().position(|x| *x == Some(sc))
    }

    /// The CU owning the sub-channel T-VU m transmits on, if assigned.
    pub fn cochannel_cu(&self, m: usize) -> Option<usize> {
        let sc = self.sc_of_tvu[m]?;
        self.sc_of_cu.iter().position(|x| *x == sc)
    }
}

/// Per-slot achieved rates, delays, power and energy efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport<S> {
    pub rate_cu: Vec<S>,
    pub rate_v2i: Vec<S>,
    pub rate_v2v: Vec<S>,
    pub delay_local: Vec<S>,
    pub delay_v2i: Vec<S>,
    pub delay_v2v: Vec<S>,
    /// Sum of all offload rates (CU rates are QoS-constrained, not counted).
    pub total_rate: S,
    pub total_power: S,
    /// total_rate / total_power.
    pub ee: S,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("T-VU {0} has no assigned sub-channel")]
    UnassignedSubChannel(usize),
    #[error("T-VU {0} has no serving RSU")]
    NoServingRsu(usize),
    #[error("total power is zero; energy efficiency is undefined")]
    ZeroPower,
}

/// Inputs shared by every per-slot evaluation: the channel snapshot, the
/// trust indicators gating V2V links, and the slot's tasks.
#[derive(Debug, Clone, Copy)]
pub struct SlotContext<'a, S> {
    pub channels: &'a ChannelSlot<S>,
    /// Trust indicator (mobility compatibility AND social willingness) per
    /// (m, n). A V2V link to an untrusted S-VU carries no effective rate.
    pub trust: &'a Mat<u8>,
    pub tasks: &'a [TaskSpec<S>],
}

/// SIC decoding order for T-VU m offloading to RSU s and S-VU n: the weaker
/// channel is decoded first. Ties resolve to V2I-first.
pub fn sic_order<S: Scalar>(slot: &ChannelSlot<S>, m: usize, n: usize, s: usize) -> SicOrder {
    if slot.h_tvu_rsu.get(m, s) <= slot.h_tvu_svu.get(m, n) {
        SicOrder::V2iFirst
    } else {
        SicOrder::V2vFirst
    }
}

fn log2_rate<S: Scalar>(bandwidth: S, sinr: S) -> S {
    if sinr <= S::zero() {
        S::zero()
    } else {
        bandwidth * (S::one() + sinr).log2_()
    }
}

/// Achieved uplink rate of CU u given the co-channel T-VU's transmit power.
pub fn cu_rate<S: Scalar>(
    ctx: &SlotContext<'_, S>,
    alloc: &Allocation<S>,
    cu_power: S,
    tvu_max_power: S,
    u: usize,
) -> S {
    let ch = ctx.channels;
    let signal = cu_power * ch.h_cu[u];
    match alloc.mode {
        AccessMode::Noma => {
            let interference = match alloc.cochannel_tvu(u) {
                Some(m) => (alloc.eps1[m] + alloc.eps2[m]) * tvu_max_power * ch.h_tvu_cu.get(m, u),
                None => S::zero(),
            };
            log2_rate(ch.bandwidth, signal / (interference + ch.sigma2))
        }
        AccessMode::Oma => {
            // The two T-VU streams occupy the shared sub-channel in equal
            // half-slots; the CU sees each stream's interference for half
            // the time.
            match alloc.cochannel_tvu(u) {
                Some(m) => {
                    let half = ch.bandwidth * S::half();
                    let g = tvu_max_power * ch.h_tvu_cu.get(m, u);
                    let r1 = log2_rate(half, signal / (alloc.eps1[m] * g + ch.sigma2));
                    let r2 = log2_rate(half, signal / (alloc.eps2[m] * g + ch.sigma2));
                    r1 + r2
                }
                None => log2_rate(ch.bandwidth, signal / ch.sigma2),
            }
        }
    }
}

/// Achieved V2I offload rate of T-VU m toward its serving RSU.
///
/// Under NOMA, when the V2I link is decoded first it still sees the same
/// T-VU's V2V stream as interference; when decoded second that term is
/// cancelled. Under OMA the stream has half the bandwidth and no intra
/// interference.
pub fn v2i_rate<S: Scalar>(
    ctx: &SlotContext<'_, S>,
    alloc: &Allocation<S>,
    cu_power: S,
    tvu_max_power: S,
    m: usize,
) -> Result<S, ModelError> {
    let ch = ctx.channels;
    let s = alloc.rsu_of_tvu[m].ok_or(ModelError::NoServingRsu(m))?;
    if alloc.sc_of_tvu[m].is_none() {
        return Err(ModelError::UnassignedSubChannel(m));
    }
    let gain = ch.h_tvu_rsu.get(m, s);
    let signal = alloc.eps1[m] * tvu_max_power * gain;
    let cu_interference = match alloc.cochannel_cu(m) {
        Some(u) => cu_power * ch.h_cu_rsu.get(u, s),
        None => S::zero(),
    };
    match alloc.mode {
        AccessMode::Noma => {
            let intra = match (alloc.svu_of_tvu[m], effective_order(ctx, alloc, m)) {
                (Some(_), Some(SicOrder::V2iFirst)) => {
                    alloc.eps2[m] * tvu_max_power * gain
                }
                _ => S::zero(),
            };
            Ok(log2_rate(ch.bandwidth, signal / (cu_interference + intra + ch.sigma2)))
        }
        AccessMode::Oma => Ok(log2_rate(
            ch.bandwidth * S::half(),
            signal / (cu_interference + ch.sigma2),
        )),
    }
}

/// Achieved V2V offload rate of T-VU m toward S-VU n.
///
/// The rate is gated by the trust indicator: offloading to an S-VU that is
/// socially unwilling or mobility-incompatible carries no effective rate. An
/// inactive link (m not selecting n) yields zero rather than an error.
pub fn v2v_rate<S: Scalar>(
    ctx: &SlotContext<'_, S>,
    alloc: &Allocation<S>,
    cu_power: S,
    tvu_max_power: S,
    m: usize,
    n: usize,
) -> S {
    if alloc.svu_of_tvu[m] != Some(n) || alloc.sc_of_tvu[m].is_none() {
        return S::zero();
    }
    if ctx.trust.get(m, n) == 0 {
        return S::zero();
    }
    let ch = ctx.channels;
    let gain = ch.h_tvu_svu.get(m, n);
    let signal = alloc.eps2[m] * tvu_max_power * gain;
    let cu_interference = match alloc.cochannel_cu(m) {
        Some(u) => cu_power * ch.h_cu_svu.get(u, n),
        None => S::zero(),
    };
    match alloc.mode {
        AccessMode::Noma => {
            let intra = match effective_order(ctx, alloc, m) {
                Some(SicOrder::V2vFirst) => alloc.eps1[m] * tvu_max_power * gain,
                _ => S::zero(),
            };
            log2_rate(ch.bandwidth, signal / (cu_interference + intra + ch.sigma2))
        }
        AccessMode::Oma => log2_rate(
            ch.bandwidth * S::half(),
            signal / (cu_interference + ch.sigma2),
        ),
    }
}

/// SIC order for T-VU m's configured links, when both exist.
pub fn effective_order<S: Scalar>(
    ctx: &SlotContext<'_, S>,
    alloc: &Allocation<S>,
    m: usize,
) -> Option<SicOrder> {
    let n = alloc.svu_of_tvu[m]?;
    let s = alloc.rsu_of_tvu[m]?;
    Some(sic_order(ctx.channels, m, n, s))
}

/// Per-destination task delays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delays<S> {
    pub local: S,
    pub v2i: S,
    pub v2v: S,
}

/// Execution and offload delays for one task under a given split and the
/// achieved link rates. A positive split with a zero rate yields an infinite
/// delay (the point is infeasible, not an error).
pub fn delays<S: Scalar>(
    task: &TaskSpec<S>,
    budget: &ComputeBudget<S>,
    beta1: S,
    beta2: S,
    rate_v2i: S,
    rate_v2v: S,
) -> Delays<S> {
    let local_share = (S::one() - beta1 - beta2).max(S::zero());
    let local = task.size_bits * local_share * task.cycles_per_bit / budget.local_rate;
    let v2i = offload_delay(task, beta1, rate_v2i, budget.rsu_rate);
    let v2v = offload_delay(task, beta2, rate_v2v, budget.svu_rate);
    Delays { local, v2i, v2v }
}

fn offload_delay<S: Scalar>(task: &TaskSpec<S>, beta: S, rate: S, exec_rate: S) -> S {
    if beta <= S::zero() {
        return S::zero();
    }
    if rate <= S::zero() {
        return S::infinity();
    }
    task.size_bits * beta / rate + task.size_bits * beta * task.cycles_per_bit / exec_rate
}

/// Transmit power drawn by T-VU m under the configured bookkeeping. OMA
/// streams are active half the slot each, so their energy averages to half.
pub fn transmit_power<S: Scalar>(
    alloc: &Allocation<S>,
    tvu_max_power: S,
    power_model: PowerModel,
    m: usize,
) -> S {
    let coeff = match power_model {
        PowerModel::EpsSum => alloc.eps1[m] + alloc.eps2[m],
        PowerModel::DoubleEps1 => alloc.eps1[m] * S::two(),
    };
    match alloc.mode {
        AccessMode::Noma => coeff * tvu_max_power,
        AccessMode::Oma => coeff * tvu_max_power * S::half(),
    }
}

/// Total consumed power across all T-VUs: circuit power, the cubic CPU terms
/// for the three execution sites, and transmit power.
pub fn total_power<S: Scalar>(
    alloc: &Allocation<S>,
    budgets: &[ComputeBudget<S>],
    tvu_max_power: S,
    power_model: PowerModel,
) -> S {
    (0..alloc.num_tvus())
        .map(|m| {
            let b = &budgets[m];
            let cpu = b.kappa
                * (b.local_rate.powi(3) + b.rsu_rate.powi(3) + b.svu_rate.powi(3));
            b.circuit_power + cpu + transmit_power(alloc, tvu_max_power, power_model, m)
        })
        .sum()
}

/// Energy efficiency of one slot, bits per joule.
pub fn system_ee<S: Scalar>(total_rate: S, total_power: S) -> Result<S, ModelError> {
    if total_power <= S::zero() {
        return Err(ModelError::ZeroPower);
    }
    Ok(total_rate / total_power)
}

/// The parametric subtractive form of the EE ratio: rate minus xi times
/// power, for one slot.
pub fn subtractive_objective<S: Scalar>(total_rate: S, total_power: S, xi: S) -> S {
    total_rate - xi * total_power
}

/// Evaluate every closed-form quantity of one slot under an allocation.
pub fn evaluate_slot<S: Scalar>(
    ctx: &SlotContext<'_, S>,
    alloc: &Allocation<S>,
    budgets: &[ComputeBudget<S>],
    cu_power: S,
    tvu_max_power: S,
    power_model: PowerModel,
) -> Result<RateReport<S>, ModelError> {
    let num_tvus = alloc.num_tvus();
    let num_cus = alloc.sc_of_cu.len();

    let rate_cu: Vec<S> = (0..num_cus)
        .map(|u| cu_rate(ctx, alloc, cu_power, tvu_max_power, u))
        .collect();

    let mut rate_v2i = vec![S::zero(); num_tvus];
    let mut rate_v2v = vec![S::zero(); num_tvus];
    for m in 0..num_tvus {
        if alloc.sc_of_tvu[m].is_some() && alloc.rsu_of_tvu[m].is_some() && alloc.eps1[m] > S::zero()
        {
            rate_v2i[m] = v2i_rate(ctx, alloc, cu_power, tvu_max_power, m)?;
        }
        if let Some(n) = alloc.svu_of_tvu[m] {
            rate_v2v[m] = v2v_rate(ctx, alloc, cu_power, tvu_max_power, m, n);
        }
    }

    let mut delay_local = vec![S::zero(); num_tvus];
    let mut delay_v2i = vec![S::zero(); num_tvus];
    let mut delay_v2v = vec![S::zero(); num_tvus];
    for m in 0..num_tvus {
        let d = delays(
            &ctx.tasks[m],
            &budgets[m],
            alloc.beta1[m],
            alloc.beta2[m],
            rate_v2i[m],
            rate_v2v[m],
        );
        delay_local[m] = d.local;
        delay_v2i[m] = d.v2i;
        delay_v2v[m] = d.v2v;
    }

    let total_rate = rate_v2i.iter().copied().sum::<S>() + rate_v2v.iter().copied().sum::<S>();
    let total_power = total_power(alloc, budgets, tvu_max_power, power_model);
    let ee = system_ee(total_rate, total_power)?;

    Ok(RateReport {
        rate_cu,
        rate_v2i,
        rate_v2v,
        delay_local,
        delay_v2i,
        delay_v2v,
        total_rate,
        total_power,
        ee,
    })
}
