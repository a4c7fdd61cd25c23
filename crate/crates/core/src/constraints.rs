//! Independent feasibility checker: re-derives every rate, delay and power
//! quantity straight from the model evaluators and tests the full
//! constraint set of the allocation problem. The solver never calls this;
//! tests and the harness run it against every accepted allocation.

use crate::config::Config;
use crate::model::{self, AccessMode, Allocation, SlotContext};
use crate::scalar::{s, Scalar};
use crate::scenario::{slot_budgets, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub what: String,
    pub tvu: Option<usize>,
    pub cu: Option<usize>,
}

impl Violation {
    fn tvu(m: usize, what: impl Into<String>) -> Self {
        Self { what: what.into(), tvu: Some(m), cu: None }
    }

    fn cu(u: usize, what: impl Into<String>) -> Self {
        Self { what: what.into(), tvu: None, cu: Some(u) }
    }

    fn global(what: impl Into<String>) -> Self {
        Self { what: what.into(), tvu: None, cu: None }
    }
}

/// Check one slot's allocation against the complete constraint set.
/// `excluded` lists T-VUs the solver explicitly dropped as infeasible (they
/// must be idle and are exempt from the delay requirement).
/// `require_social` additionally demands that every selected V2V link is
/// trusted (the social-aware algorithms' invariant; distance-based
/// selection legitimately violates it).
pub fn check_allocation<S: Scalar>(
    scenario: &Scenario<S>,
    t: usize,
    alloc: &Allocation<S>,
    cfg: &Config,
    excluded: &[usize],
    require_social: bool,
) -> Vec<Violation> {
    let slot = &scenario.slots[t];
    let ctx = SlotContext { channels: &slot.channels, trust: &slot.trust, tasks: &slot.tasks };
    let budgets = slot_budgets::<S>(cfg, &slot.serving_rsu);
    let p_u = s::<S>(cfg.cu_power_watts());
    let p_th = s::<S>(cfg.tvu_max_power_watts());
    let r_th = s::<S>(cfg.radio.cu_rate_min_bps);
    let tol = s::<S>(cfg.solver.feas_tol);
    let deadline = s::<S>(cfg.task.deadline_s);
    let num_tvus = alloc.num_tvus();
    let num_cus = alloc.sc_of_cu.len();

    let mut violations = Vec::new();

    // Split and power coefficient ranges.
    for m in 0..num_tvus {
        let (b1, b2) = (alloc.beta1[m], alloc.beta2[m]);
        if b1 < S::zero() || b2 < S::zero() || b1 > S::one() || b2 > S::one() {
            violations.push(Violation::tvu(m, "task split outside [0,1]"));
        }
        if b1 + b2 > S::one() + s(1e-12) {
            violations.push(Violation::tvu(m, "task split fractions exceed one"));
        }
        let (e1, e2) = (alloc.eps1[m], alloc.eps2[m]);
        if e1 < S::zero() || e2 < S::zero() {
            violations.push(Violation::tvu(m, "negative power coefficient"));
        }
        match alloc.mode {
            AccessMode::Noma => {
                if e1 + e2 > S::one() + s(1e-12) {
                    violations.push(Violation::tvu(m, "power coefficients exceed budget"));
                }
            }
            AccessMode::Oma => {
                if e1 > S::one() + s(1e-12) || e2 > S::one() + s(1e-12) {
                    violations.push(Violation::tvu(m, "per-use power coefficient exceeds budget"));
                }
            }
        }
    }

    // Spectrum structure: each CU on exactly one sub-channel, permutation;
    // at most one T-VU per sub-channel; transmitting T-VUs are assigned.
    {
        let mut seen = vec![0usize; num_cus];
        let mut ok = true;
        for &sc in &alloc.sc_of_cu {
            if sc >= num_cus {
                ok = false;
            } else {
                seen[sc] += 1;
            }
        }
        if !ok || seen.iter().any(|&c| c != 1) {
            violations.push(Violation::global("CU sub-channel map is not a permutation"));
        }
        let mut tvus_on_sc = vec![0usize; num_cus];
        for m in 0..num_tvus {
            if let Some(sc) = alloc.sc_of_tvu[m] {
                if sc >= num_cus {
                    violations.push(Violation::tvu(m, "sub-channel index out of range"));
                } else {
                    tvus_on_sc[sc] += 1;
                }
            } else if alloc.eps1[m] > S::zero() || alloc.eps2[m] > S::zero() {
                violations.push(Violation::tvu(m, "transmitting without a sub-channel"));
            }
        }
        for (sc, &count) in tvus_on_sc.iter().enumerate() {
            if count > 1 {
                violations.push(Violation::global(format!(
                    "sub-channel {sc} shared by {count} T-VUs"
                )));
            }
        }
    }

    // Each S-VU serves at most one T-VU; V2V links carrying data must be
    // trusted; for social-aware rules, selection itself must be trusted.
    {
        let num_svus = slot.channels.num_svus();
        let mut served = vec![0usize; num_svus];
        for m in 0..num_tvus {
            if let Some(n) = alloc.svu_of_tvu[m] {
                served[n] += 1;
                if alloc.beta2[m] > S::zero() && slot.trust.get(m, n) == 0 {
                    violations.push(Violation::tvu(m, "offloads data over an untrusted V2V link"));
                }
                if require_social && slot.trust.get(m, n) == 0 {
                    violations.push(Violation::tvu(m, "selected an untrusted S-VU"));
                }
            }
        }
        for (n, &count) in served.iter().enumerate() {
            if count > 1 {
                violations.push(Violation::global(format!("S-VU {n} serves {count} T-VUs")));
            }
        }
    }

    // CU QoS: allocation-caused violations only. A CU that cannot meet the
    // floor even interference-free is a scenario property; it must simply
    // not be shared.
    for u in 0..num_cus {
        let clean = slot.channels.bandwidth
            * (S::one() + p_u * slot.channels.h_cu[u] / slot.channels.sigma2).log2_();
        let achieved = model::cu_rate(&ctx, alloc, p_u, p_th, u);
        if clean >= r_th {
            if achieved < r_th * (S::one() - tol) {
                violations.push(Violation::cu(u, "CU QoS rate floor violated"));
            }
        } else if alloc.cochannel_tvu(u).is_some() {
            violations.push(Violation::cu(u, "sub-channel of a QoS-dead CU is shared"));
        }
    }

    // Delay constraints for every non-excluded T-VU.
    let report = match model::evaluate_slot(&ctx, alloc, &budgets, p_u, p_th, cfg.solver.power_model)
    {
        Ok(r) => r,
        Err(e) => {
            violations.push(Violation::global(format!("evaluation failed: {e}")));
            return violations;
        }
    };
    for m in 0..num_tvus {
        if excluded.contains(&m) {
            if alloc.beta1[m] > S::zero() || alloc.beta2[m] > S::zero() {
                violations.push(Violation::tvu(m, "excluded T-VU still offloads"));
            }
            continue;
        }
        let limit = deadline * (S::one() + tol);
        if report.delay_local[m] > limit {
            violations.push(Violation::tvu(m, "local execution exceeds the deadline"));
        }
        if report.delay_v2i[m] > limit {
            violations.push(Violation::tvu(m, "V2I offload exceeds the deadline"));
        }
        if report.delay_v2v[m] > limit {
            violations.push(Violation::tvu(m, "V2V offload exceeds the deadline"));
        }
        // Data-carrying streams must have transmit power behind them.
        if alloc.beta1[m] > S::zero() && alloc.eps1[m] <= S::zero() {
            violations.push(Violation::tvu(m, "V2I split without transmit power"));
        }
        if alloc.beta2[m] > S::zero() && alloc.eps2[m] <= S::zero() {
            violations.push(Violation::tvu(m, "V2V split without transmit power"));
        }
    }

    violations
}
