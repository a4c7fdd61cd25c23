//! The iterative joint allocation engine: per slot it alternates the
//! computation-side decisions (edge server selection and task splitting)
//! with the communication-side decisions (per-pair power allocation and
//! spectrum matching), driving the energy-efficiency parameter by a
//! Dinkelbach update until the residual drops below tolerance.
//!
//! The same engine runs every algorithm variant; they differ only in the
//! server-selection rule and the multiple-access mode.

use serde::{Deserialize, Serialize};

use crate::assignment::{kuhn_munkres, WeightMatrix};
use crate::config::Config;
use crate::mat::Mat;
use crate::model::{
    self, AccessMode, Allocation, ComputeBudget, RateReport, SicOrder, SlotContext, TaskSpec,
};
use crate::power::{
    cu_interference_cap, solve_power, PairProblem, PowerOutcome, PowerSolution, StreamSpec,
};
use crate::scalar::{s, Scalar};
use crate::scenario::{slot_budgets, Scenario, SlotData};

/// How a T-VU picks its V2V edge server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionRule {
    /// Candidates must be trusted (socially willing and mobility
    /// compatible), ranked by marginal subtractive-objective contribution.
    SocialAware,
    /// Nearest available S-VU by Euclidean distance, ignoring trust.
    NearestDistance,
    /// No V2V offloading at all.
    RsuOnly,
}

/// Engine configuration: selection rule plus multiple-access mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineOptions {
    pub selection: SelectionRule,
    pub access: AccessMode,
}

/// One outer-loop iteration record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord<S> {
    pub iteration: usize,
    pub xi: S,
    pub alpha: S,
    /// Smallest relative deadline slack across offloading T-VUs.
    pub min_delay_slack: S,
    /// Smallest relative CU QoS slack.
    pub min_cu_slack: S,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub tvu: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSolution<S> {
    pub alloc: Allocation<S>,
    pub report: RateReport<S>,
    pub trace: Vec<IterRecord<S>>,
    pub excluded: Vec<Exclusion>,
    /// CUs that miss their QoS floor even with zero interference; no T-VU
    /// may share their sub-channel.
    pub dead_cus: Vec<usize>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRun<S> {
    pub slots: Vec<SlotSolution<S>>,
    /// Sum of per-slot energy efficiencies, bit/J.
    pub ee_total: S,
}

/// Feasible task split maximizing offloaded fraction. Returns `None` when
/// no split satisfies the three delay constraints at the given rates.
pub fn choose_task_split<S: Scalar>(
    task: &TaskSpec<S>,
    budget: &ComputeBudget<S>,
    rate_v2i: S,
    rate_v2v: S,
    deadline_eff: S,
) -> Option<(S, S)> {
    choose_task_split_capped(task, budget, rate_v2i, rate_v2v, deadline_eff, S::one(), S::one())
}

/// As [`choose_task_split`], with per-destination upper bounds on the split
/// fractions (used when adapting a nominal split to one pair's achievable
/// rates).
pub fn choose_task_split_capped<S: Scalar>(
    task: &TaskSpec<S>,
    budget: &ComputeBudget<S>,
    rate_v2i: S,
    rate_v2v: S,
    deadline_eff: S,
    cap1: S,
    cap2: S,
) -> Option<(S, S)> {
    let work = task.size_bits * task.cycles_per_bit;
    // Largest fraction local execution can absorb within the deadline.
    let local_cap = (budget.local_rate * deadline_eff / work).min(S::one());
    let required = (S::one() - local_cap).max(S::zero());

    let beta_max = |rate: S, exec: S| -> S {
        if rate <= S::zero() {
            return S::zero();
        }
        let per_unit = task.size_bits * (S::one() / rate + task.cycles_per_bit / exec);
        (deadline_eff / per_unit).min(S::one())
    };
    let beta1_max = beta_max(rate_v2i, budget.rsu_rate).min(cap1);
    let beta2_max = beta_max(rate_v2v, budget.svu_rate).min(cap2);

    if beta1_max + beta2_max < required {
        return None;
    }
    let target = (beta1_max + beta2_max).min(S::one());
    let beta1 = beta1_max.min(target);
    let beta2 = beta2_max.min(target - beta1);
    Some((beta1, beta2))
}

/// Minimum link rate implied by a split and the deadline; infinite when the
/// execution time alone exceeds the deadline.
fn min_rate_for_split<S: Scalar>(task: &TaskSpec<S>, exec_rate: S, beta: S, deadline_eff: S) -> S {
    if beta <= S::zero() {
        return S::zero();
    }
    let slack = deadline_eff - task.size_bits * beta * task.cycles_per_bit / exec_rate;
    if slack <= S::zero() {
        return S::infinity();
    }
    task.size_bits * beta / slack
}

/// Computation-side decisions for one slot: selected S-VU and task split
/// per T-VU, plus the T-VUs excluded as outright infeasible.
pub struct ComputationDecision<S> {
    pub svu_of_tvu: Vec<Option<usize>>,
    pub beta1: Vec<S>,
    pub beta2: Vec<S>,
    pub excluded: Vec<Exclusion>,
}

struct SlotEngine<'a, S> {
    cfg: &'a Config,
    slot: &'a SlotData<S>,
    budgets: Vec<ComputeBudget<S>>,
    options: EngineOptions,
    p_u: S,
    p_th: S,
    r_th: S,
    deadline: S,
    num_tvus: usize,
    num_cus: usize,
    num_svus: usize,
}

impl<'a, S: Scalar> SlotEngine<'a, S> {
    fn new(cfg: &'a Config, slot: &'a SlotData<S>, options: EngineOptions) -> Self {
        let num_tvus = slot.tasks.len();
        Self {
            cfg,
            slot,
            budgets: slot_budgets(cfg, &slot.serving_rsu),
            options,
            p_u: s(cfg.cu_power_watts()),
            p_th: s(cfg.tvu_max_power_watts()),
            r_th: s(cfg.radio.cu_rate_min_bps),
            deadline: s(cfg.effective_deadline_s()),
            num_tvus,
            num_cus: slot.channels.num_cus(),
            num_svus: slot.channels.num_svus(),
        }
    }

    fn ctx(&self) -> SlotContext<'_, S> {
        SlotContext { channels: &self.slot.channels, trust: &self.slot.trust, tasks: &self.slot.tasks }
    }

    fn bandwidth(&self) -> S {
        self.slot.channels.bandwidth
    }

    fn sigma2(&self) -> S {
        self.slot.channels.sigma2
    }

    /// Current power coefficients for rate estimation: the previous
    /// allocation's when available, otherwise the fixed initial split.
    fn current_eps(&self, prev: Option<&Allocation<S>>, m: usize) -> (S, S) {
        match prev {
            Some(a) if a.sc_of_tvu[m].is_some() => (a.eps1[m], a.eps2[m]),
            _ => (S::half(), s(0.25)),
        }
    }

    /// Estimated V2I rate of T-VU m under the current communication
    /// solution; interference comes from the previously matched CU when
    /// one exists, and zero otherwise.
    fn estimate_v2i(&self, prev: Option<&Allocation<S>>, m: usize) -> S {
        let Some(rsu) = self.slot.serving_rsu[m] else { return S::zero() };
        let (eps1, _) = self.current_eps(prev, m);
        if eps1 <= S::zero() {
            return S::zero();
        }
        let ch = &self.slot.channels;
        let cu_i = prev
            .and_then(|a| a.cochannel_cu(m))
            .map_or(S::zero(), |u| self.p_u * ch.h_cu_rsu.get(u, rsu));
        let gamma = eps1 * self.p_th * ch.h_tvu_rsu.get(m, rsu) / (cu_i + self.sigma2());
        self.effective_bw() * (S::one() + gamma).log2_()
    }

    /// Estimated achieved V2V rate toward S-VU n (zero when untrusted).
    fn estimate_v2v(&self, prev: Option<&Allocation<S>>, m: usize, n: usize) -> S {
        if self.slot.trust.get(m, n) == 0 {
            return S::zero();
        }
        let (_, eps2) = self.current_eps(prev, m);
        if eps2 <= S::zero() {
            return S::zero();
        }
        let ch = &self.slot.channels;
        let cu_i = prev
            .and_then(|a| a.cochannel_cu(m))
            .map_or(S::zero(), |u| self.p_u * ch.h_cu_svu.get(u, n));
        let gamma = eps2 * self.p_th * ch.h_tvu_svu.get(m, n) / (cu_i + self.sigma2());
        self.effective_bw() * (S::one() + gamma).log2_()
    }

    fn effective_bw(&self) -> S {
        match self.options.access {
            AccessMode::Noma => self.bandwidth(),
            AccessMode::Oma => self.bandwidth() * S::half(),
        }
    }

    /// Edge server selection and task splitting for one slot, processed in
    /// T-VU index order; each S-VU serves at most one T-VU.
    fn select_and_split(&self, xi: S, prev: Option<&Allocation<S>>) -> ComputationDecision<S> {
        let mut pool = vec![true; self.num_svus];
        let mut svu_of_tvu = vec![None; self.num_tvus];
        let mut beta1 = vec![S::zero(); self.num_tvus];
        let mut beta2 = vec![S::zero(); self.num_tvus];
        let mut excluded = Vec::new();

        for m in 0..self.num_tvus {
            let task = &self.slot.tasks[m];
            let budget = &self.budgets[m];
            let r_v2i = self.estimate_v2i(prev, m);

            let candidates = self.candidate_svus(xi, prev, m, &pool);

            let mut chosen: Option<(usize, S, S)> = None;
            for n in candidates {
                let r_v2v = self.estimate_v2v(prev, m, n);
                if let Some((b1, b2)) =
                    choose_task_split(task, budget, r_v2i, r_v2v, self.deadline)
                {
                    chosen = Some((n, b1, b2));
                    break;
                }
            }

            match chosen {
                Some((n, b1, b2)) => {
                    svu_of_tvu[m] = Some(n);
                    pool[n] = false;
                    beta1[m] = b1;
                    beta2[m] = b2;
                }
                None => {
                    // Fall back to local + RSU only.
                    match choose_task_split(task, budget, r_v2i, S::zero(), self.deadline) {
                        Some((b1, _)) => {
                            beta1[m] = b1;
                        }
                        None => {
                            excluded.push(Exclusion {
                                tvu: m,
                                reason: "deadline unattainable with local and RSU resources"
                                    .into(),
                            });
                        }
                    }
                }
            }
        }
        ComputationDecision { svu_of_tvu, beta1, beta2, excluded }
    }

    /// Candidate S-VUs for T-VU m, ordered per the selection rule.
    fn candidate_svus(
        &self,
        xi: S,
        prev: Option<&Allocation<S>>,
        m: usize,
        pool: &[bool],
    ) -> Vec<usize> {
        match self.options.selection {
            SelectionRule::RsuOnly => Vec::new(),
            SelectionRule::SocialAware => {
                let (_, eps2) = self.current_eps(prev, m);
                let mut scored: Vec<(usize, S)> = (0..self.num_svus)
                    .filter(|&n| pool[n] && self.slot.trust.get(m, n) == 1)
                    .map(|n| {
                        // Marginal contribution of the candidate V2V link to
                        // the subtractive objective at the current power.
                        let rate = self.estimate_v2v(prev, m, n);
                        let phi = rate - xi * eps2 * self.p_th;
                        (n, phi)
                    })
                    .collect();
                scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                scored.into_iter().map(|(n, _)| n).collect()
            }
            SelectionRule::NearestDistance => {
                let mpos = self.slot.tvu_pos[m];
                let mut scored: Vec<(usize, S)> = (0..self.num_svus)
                    .filter(|&n| pool[n])
                    .map(|n| {
                        let npos = self.slot.svu_pos[n];
                        let dx = mpos.0 - npos.0;
                        let dy = mpos.1 - npos.1;
                        (n, dx * dx + dy * dy)
                    })
                    .collect();
                scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
                scored.into_iter().map(|(n, _)| n).collect()
            }
        }
    }

    /// Assemble the pair problem for T-VU m sharing CU u's sub-channel.
    fn pair_problem(
        &self,
        xi: S,
        svu: Option<usize>,
        beta1: S,
        beta2: S,
        m: usize,
        u: usize,
    ) -> Option<PairProblem<S>> {
        let ch = &self.slot.channels;
        let cap = match cu_interference_cap(
            self.p_u,
            ch.h_cu[u],
            ch.h_tvu_cu.get(m, u),
            self.sigma2(),
            self.r_th,
            self.p_th,
            self.bandwidth(),
        ) {
            None => S::one(),
            Some(c) if c <= S::zero() => return None,
            Some(c) => c.min(S::one()),
        };

        let task = &self.slot.tasks[m];
        let budget = &self.budgets[m];
        let v2i = match (beta1 > S::zero(), self.slot.serving_rsu[m]) {
            (true, Some(rsu)) => Some(StreamSpec {
                gain: self.p_th * ch.h_tvu_rsu.get(m, rsu),
                noise: self.p_u * ch.h_cu_rsu.get(u, rsu) + self.sigma2(),
                min_rate: min_rate_for_split(task, budget.rsu_rate, beta1, self.deadline),
            }),
            _ => None,
        };
        let v2v = match (beta2 > S::zero(), svu) {
            (true, Some(n)) => Some(StreamSpec {
                gain: self.p_th * ch.h_tvu_svu.get(m, n),
                noise: self.p_u * ch.h_cu_svu.get(u, n) + self.sigma2(),
                min_rate: min_rate_for_split(task, budget.svu_rate, beta2, self.deadline),
            }),
            _ => None,
        };
        if v2i.is_none() && v2v.is_none() {
            return None;
        }
        if v2i.as_ref().is_some_and(|x| !x.min_rate.is_finite())
            || v2v.as_ref().is_some_and(|x| !x.min_rate.is_finite())
        {
            return None;
        }

        let order = match (svu, self.slot.serving_rsu[m]) {
            (Some(n), Some(rsu)) => model::sic_order(ch, m, n, rsu),
            _ => SicOrder::V2iFirst,
        };
        Some(PairProblem {
            v2i,
            v2v,
            order,
            eps_cap: cap,
            xi,
            p_th: self.p_th,
            bandwidth: self.bandwidth(),
            mode: self.options.access,
            power_model: self.cfg.solver.power_model,
        })
    }

    /// Solve one (T-VU, CU) pair at the nominal split; when the nominal
    /// split's implied rate floors are unreachable under this pair's
    /// interference, re-derive the split from the pair's own achievable
    /// rates (never exceeding the nominal fractions) and solve again.
    fn solve_pair(
        &self,
        xi: S,
        decision: &ComputationDecision<S>,
        m: usize,
        u: usize,
    ) -> Option<(PowerSolution<S>, S, S)> {
        let svu = decision.svu_of_tvu[m];
        let (b1, b2) = (decision.beta1[m], decision.beta2[m]);
        let nominal = self.pair_problem(xi, svu, b1, b2, m, u)?;
        if let PowerOutcome::Solved(sol) = solve_power(&nominal, &self.cfg.solver) {
            return Some((sol, b1, b2));
        }

        // Repair: anchor the split on rates this pair can actually achieve,
        // trying several ordering-honoring power splits and keeping the one
        // admitting the most offload.
        let task = &self.slot.tasks[m];
        let budget = &self.budgets[m];
        let mut best_split: Option<(S, S)> = None;
        for (r1, r2) in crate::power::anchor_rates(&nominal) {
            if let Some((nb1, nb2)) =
                choose_task_split_capped(task, budget, r1, r2, self.deadline, b1, b2)
            {
                if best_split.is_none_or(|(a, b)| nb1 + nb2 > a + b) {
                    best_split = Some((nb1, nb2));
                }
            }
        }
        let (nb1, nb2) = best_split?;
        if nb1 <= S::zero() && nb2 <= S::zero() {
            return None;
        }
        let repaired = self.pair_problem(xi, svu, nb1, nb2, m, u)?;
        match solve_power(&repaired, &self.cfg.solver) {
            PowerOutcome::Solved(sol) => Some((sol, nb1, nb2)),
            PowerOutcome::Infeasible(_) => None,
        }
    }

    /// Weight matrix over (CU, offloading T-VU) pairs, with the per-pair
    /// power solutions and realized splits kept for assembly after the
    /// matching.
    #[allow(clippy::type_complexity)]
    fn build_weight_matrix(
        &self,
        xi: S,
        decision: &ComputationDecision<S>,
        pool: &[usize],
    ) -> (WeightMatrix<S>, Mat<Option<(PowerSolution<S>, S, S)>>) {
        let mut solutions: Mat<Option<(PowerSolution<S>, S, S)>> =
            Mat::filled(self.num_cus, pool.len(), None);
        let weights = WeightMatrix::from_entries(self.num_cus, pool.len(), |u, idx| {
            let m = pool[idx];
            let solved = self.solve_pair(xi, decision, m, u)?;
            let obj = solved.0.objective;
            *solutions.at_mut(u, idx) = Some(solved);
            Some(obj)
        });
        (weights, solutions)
    }

    /// One full inner solve at a fixed xi: computation decisions, per-pair
    /// power, spectrum matching, allocation assembly.
    fn solve_at_xi(
        &self,
        xi: S,
        prev: Option<&Allocation<S>>,
    ) -> (Allocation<S>, Vec<Exclusion>) {
        let decision = self.select_and_split(xi, prev);
        let mut excluded = decision.excluded.clone();
        let excluded_set: Vec<bool> = {
            let mut v = vec![false; self.num_tvus];
            for e in &excluded {
                v[e.tvu] = true;
            }
            v
        };

        // T-VUs that actually offload need a sub-channel.
        let pool: Vec<usize> = (0..self.num_tvus)
            .filter(|&m| {
                !excluded_set[m] && (decision.beta1[m] > S::zero() || decision.beta2[m] > S::zero())
            })
            .collect();

        let mut alloc = Allocation::idle(self.options.access, self.num_tvus, self.num_cus);
        alloc.rsu_of_tvu = self.slot.serving_rsu.clone();

        if !pool.is_empty() {
            let (weights, solutions) = self.build_weight_matrix(xi, &decision, &pool);
            let matching = kuhn_munkres(&weights);
            for (idx, &m) in pool.iter().enumerate() {
                match matching.cu_of_tvu[idx] {
                    Some(u) => {
                        let (sol, b1, b2) = solutions
                            .at(u, idx)
                            .as_ref()
                            .expect("matched pair must carry a power solution");
                        alloc.sc_of_tvu[m] = Some(alloc.sc_of_cu[u]);
                        alloc.svu_of_tvu[m] = decision.svu_of_tvu[m];
                        alloc.beta1[m] = if sol.rate_v2i > S::zero() { *b1 } else { S::zero() };
                        alloc.beta2[m] = if sol.rate_v2v > S::zero() { *b2 } else { S::zero() };
                        alloc.eps1[m] = sol.eps1;
                        alloc.eps2[m] = sol.eps2;
                    }
                    None => {
                        // Unmatchable this round: fall back to pure local
                        // execution or exclude outright.
                        let d = model::delays(
                            &self.slot.tasks[m],
                            &self.budgets[m],
                            S::zero(),
                            S::zero(),
                            S::zero(),
                            S::zero(),
                        );
                        if d.local > self.deadline {
                            excluded.push(Exclusion {
                                tvu: m,
                                reason: "no feasible sub-channel pairing this iteration".into(),
                            });
                        }
                    }
                }
            }
        }

        // Idle T-VUs keep their V2V selection only if it carries data.
        (alloc, excluded)
    }

    /// CUs that miss QoS with zero interference; their sub-channels are
    /// never shared (nothing the allocation does can save them).
    fn dead_cus(&self) -> Vec<usize> {
        let ch = &self.slot.channels;
        (0..self.num_cus)
            .filter(|&u| {
                let clean = self.bandwidth()
                    * (S::one() + self.p_u * ch.h_cu[u] / self.sigma2()).log2_();
                clean < self.r_th
            })
            .collect()
    }
}

/// The computation subproblem under any selection rule: edge server
/// selection and task splitting at a given xi.
pub fn server_selection<S: Scalar>(
    scenario: &Scenario<S>,
    cfg: &Config,
    t: usize,
    xi: S,
    prev: Option<&Allocation<S>>,
    options: EngineOptions,
) -> ComputationDecision<S> {
    let engine = SlotEngine::new(cfg, &scenario.slots[t], options);
    engine.select_and_split(xi, prev)
}

/// Public form of the computation subproblem (Algorithm-1 step): social
/// mobility aware edge server selection and task splitting at a given xi.
pub fn sm_sstsa<S: Scalar>(
    scenario: &Scenario<S>,
    cfg: &Config,
    t: usize,
    xi: S,
    prev: Option<&Allocation<S>>,
) -> ComputationDecision<S> {
    server_selection(
        scenario,
        cfg,
        t,
        xi,
        prev,
        EngineOptions { selection: SelectionRule::SocialAware, access: AccessMode::Noma },
    )
}

/// Solve one slot with the given options: the Dinkelbach loop around the
/// alternating computation/communication subproblems.
pub fn solve_slot<S: Scalar>(
    scenario: &Scenario<S>,
    cfg: &Config,
    t: usize,
    options: EngineOptions,
) -> SlotSolution<S> {
    let slot = &scenario.slots[t];
    let engine = SlotEngine::new(cfg, slot, options);
    let ctx = engine.ctx();
    let power_model = cfg.solver.power_model;

    let mut xi = S::zero();
    let mut best: Option<(Allocation<S>, RateReport<S>, Vec<Exclusion>)> = None;
    let mut best_ee = S::zero();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0usize;

    for i in 1..=cfg.solver.max_outer_iters {
        iterations = i;
        let prev_alloc = best.as_ref().map(|(a, _, _)| a);
        let (alloc, excluded) = engine.solve_at_xi(xi, prev_alloc);
        let report = model::evaluate_slot(
            &ctx,
            &alloc,
            &engine.budgets,
            engine.p_u,
            engine.p_th,
            power_model,
        )
        .expect("total power is positive with circuit power configured");

        let cand_ee = report.ee;
        if best.is_none() || cand_ee > best_ee {
            best_ee = cand_ee;
            best = Some((alloc, report, excluded));
        }
        let xi_new = best_ee;
        let alpha = (xi_new - xi).abs();

        let (min_delay_slack, min_cu_slack) = slack_summary(
            &engine,
            best.as_ref().map(|(a, r, _)| (a, r)).unwrap(),
        );
        trace.push(IterRecord { iteration: i, xi: xi_new, alpha, min_delay_slack, min_cu_slack });

        xi = xi_new;
        if alpha <= s::<S>(cfg.solver.outer_tol) * xi.max(s(1e-30)) {
            converged = true;
            break;
        }
    }

    let (alloc, report, excluded) = best.expect("at least one outer iteration runs");
    SlotSolution {
        alloc,
        report,
        trace,
        excluded,
        dead_cus: engine.dead_cus(),
        converged,
        iterations,
    }
}

fn slack_summary<S: Scalar>(
    engine: &SlotEngine<'_, S>,
    current: (&Allocation<S>, &RateReport<S>),
) -> (S, S) {
    let (alloc, report) = current;
    let deadline = s::<S>(engine.cfg.task.deadline_s);
    let mut min_delay = S::one();
    for m in 0..engine.num_tvus {
        if alloc.beta1[m] > S::zero() || alloc.beta2[m] > S::zero() {
            let worst = report.delay_local[m].max(report.delay_v2i[m]).max(report.delay_v2v[m]);
            min_delay = min_delay.min((deadline - worst) / deadline);
        }
    }
    let mut min_cu = S::infinity();
    for u in 0..engine.num_cus {
        if alloc.cochannel_tvu(u).is_some() {
            min_cu = min_cu.min((report.rate_cu[u] - engine.r_th) / engine.r_th.max(s(1e-30)));
        }
    }
    if !min_cu.is_finite() {
        min_cu = S::one();
    }
    (min_delay, min_cu)
}

/// Solve a whole scenario under the given engine options; slots are
/// independent and solved in order.
pub fn solve_scenario<S: Scalar>(
    scenario: &Scenario<S>,
    cfg: &Config,
    options: EngineOptions,
) -> SolveRun<S> {
    let slots: Vec<SlotSolution<S>> = (0..scenario.slots.len())
        .map(|t| solve_slot(scenario, cfg, t, options))
        .collect();
    let ee_total = slots.iter().map(|s| s.report.ee).sum();
    SolveRun { slots, ee_total }
}

/// The full social-mobility-aware joint allocation algorithm.
pub fn jccraa<S: Scalar>(scenario: &Scenario<S>, cfg: &Config) -> SolveRun<S> {
    solve_scenario(
        scenario,
        cfg,
        EngineOptions { selection: SelectionRule::SocialAware, access: AccessMode::Noma },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{budgets_from_config, generate_scenario};

    fn test_cfg(m: usize, n: usize, u: usize) -> Config {
        let mut cfg = Config::default();
        cfg.network.num_tvus = m;
        cfg.network.num_svus = n;
        cfg.network.num_cus = u;
        cfg.network.num_scs = u;
        cfg.network.num_rsus = 4;
        cfg.network.num_slots = 1;
        cfg
    }

    fn budget_for(cfg: &Config) -> ComputeBudget<f64> {
        budgets_from_config::<f64>(cfg, 1)[0]
    }

    #[test]
    fn task_split_all_local_when_capacity_suffices() {
        let cfg = test_cfg(1, 1, 2);
        let mut b = budget_for(&cfg);
        b.local_rate = 1e12; // local absorbs everything
        let task = TaskSpec { size_bits: 1e5, cycles_per_bit: 500.0, deadline_s: 0.1 };
        let (b1, b2) = choose_task_split(&task, &b, 0.0f64, 0.0, 0.1).unwrap();
        assert_eq!((b1, b2), (0.0, 0.0));
    }

    #[test]
    fn task_split_infeasible_when_no_rates_and_slow_local() {
        let cfg = test_cfg(1, 1, 2);
        let mut b = budget_for(&cfg);
        b.local_rate = 1e6; // local alone takes 50 s
        let task = TaskSpec { size_bits: 1e5, cycles_per_bit: 500.0, deadline_s: 0.1 };
        assert!(choose_task_split(&task, &b, 0.0, 0.0, 0.1).is_none());
    }

    #[test]
    fn task_split_hand_worked_region() {
        // D=1e5, C=500, T=0.1s, y_m=1e8 -> local cap 0.2, required 0.8.
        // With beta1_max=0.6 and beta2_max=0.5 the maximal-offload choice is
        // (0.6, 0.4).
        let task = TaskSpec { size_bits: 1e5, cycles_per_bit: 500.0, deadline_s: 0.1 };
        let b = ComputeBudget {
            local_rate: 1e8,
            rsu_rate: 1e12,
            svu_rate: 1e12,
            kappa: 1e-27,
            circuit_power: 0.1,
        };
        // Rates chosen so beta_max comes out to 0.6 and 0.5; the huge
        // execution rates make the compute term negligible (not zero).
        let r1 = 1e5 * 0.6 / 0.1; // beta1_max ~= T*r/D = 0.6
        let r2 = 1e5 * 0.5 / 0.1;
        let (b1, b2) = choose_task_split(&task, &b, r1, r2, 0.1).unwrap();
        assert!((b1 - 0.6f64).abs() < 1e-3, "beta1 {b1}");
        assert!((b2 - 0.4f64).abs() < 1e-3, "beta2 {b2}");
        assert!(b1 + b2 <= 1.0 + 1e-12);
    }

    #[test]
    fn min_rate_round_trips_beta_max() {
        let task = TaskSpec { size_bits: 1e5, cycles_per_bit: 500.0, deadline_s: 0.1 };
        let b = ComputeBudget {
            local_rate: 1e8,
            rsu_rate: 1e9,
            svu_rate: 8e8,
            kappa: 1e-27,
            circuit_power: 0.1,
        };
        let rate = 2.2e6;
        let (b1, _) = choose_task_split(&task, &b, rate, 0.0, 0.1).unwrap();
        let need: f64 = min_rate_for_split(&task, b.rsu_rate, b1, 0.1);
        assert!(
            (need - rate).abs() <= 1e-6 * rate || need < rate,
            "implied min rate {need} vs achieved {rate}"
        );
    }

    #[test]
    fn sm_sstsa_single_trusted_candidate_selected() {
        let cfg = test_cfg(1, 1, 2);
        let mut scenario = generate_scenario::<f64>(&cfg, 21).unwrap();
        scenario.slots[0].trust.set(0, 0, 1);
        // Make the V2V channel strong enough to matter.
        scenario.slots[0].channels.h_tvu_svu.set(0, 0, 1e-7);
        let d = sm_sstsa(&scenario, &cfg, 0, 0.0, None);
        assert_eq!(d.svu_of_tvu[0], Some(0));
    }

    #[test]
    fn sm_sstsa_no_willingness_no_v2v() {
        let cfg = test_cfg(2, 2, 3);
        let mut scenario = generate_scenario::<f64>(&cfg, 22).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                scenario.slots[0].trust.set(m, n, 0);
            }
        }
        let d = sm_sstsa(&scenario, &cfg, 0, 0.0, None);
        assert!(d.svu_of_tvu.iter().all(|x| x.is_none()));
        assert!(d.beta2.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn sm_sstsa_contention_first_tvu_wins() {
        let cfg = test_cfg(2, 1, 3);
        let mut scenario = generate_scenario::<f64>(&cfg, 23).unwrap();
        let slot = &mut scenario.slots[0];
        slot.trust.set(0, 0, 1);
        slot.trust.set(1, 0, 1);
        slot.channels.h_tvu_svu.set(0, 0, 1e-7);
        slot.channels.h_tvu_svu.set(1, 0, 1e-7);
        let d = sm_sstsa(&scenario, &cfg, 0, 0.0, None);
        assert_eq!(d.svu_of_tvu[0], Some(0), "first-processed T-VU takes the S-VU");
        assert_eq!(d.svu_of_tvu[1], None, "second falls back");
    }

    #[test]
    fn weight_matrix_entries_match_independent_recomputation() {
        let cfg = test_cfg(2, 2, 3);
        let scenario = generate_scenario::<f64>(&cfg, 71).unwrap();
        let options = EngineOptions {
            selection: SelectionRule::SocialAware,
            access: AccessMode::Noma,
        };
        let engine = SlotEngine::new(&cfg, &scenario.slots[0], options);
        let xi = 5e5;
        let decision = engine.select_and_split(xi, None);
        let pool: Vec<usize> = (0..2)
            .filter(|&m| decision.beta1[m] > 0.0 || decision.beta2[m] > 0.0)
            .collect();
        assert!(!pool.is_empty(), "scenario produced no offloading T-VUs");
        let (weights, _solutions) = engine.build_weight_matrix(xi, &decision, &pool);
        for u in 0..3 {
            for (idx, &m) in pool.iter().enumerate() {
                let expect = engine.solve_pair(xi, &decision, m, u).map(|(sol, _, _)| sol.objective);
                match expect {
                    Some(obj) => {
                        assert!(weights.feasible.get(u, idx));
                        assert!(
                            (weights.weights.get(u, idx) - obj).abs()
                                <= 1e-9 * obj.abs().max(1.0),
                            "entry ({u},{m}) mismatch"
                        );
                    }
                    None => assert!(!weights.feasible.get(u, idx)),
                }
            }
        }
    }

    #[test]
    fn runs_end_to_end_in_f32() {
        let cfg = test_cfg(2, 2, 4);
        let scenario = generate_scenario::<f32>(&cfg, 31).unwrap();
        let run = jccraa(&scenario, &cfg);
        assert!(run.ee_total.is_finite());
        assert!(run.ee_total >= 0.0);
    }

    #[test]
    fn solver_is_deterministic() {
        let cfg = test_cfg(4, 4, 8);
        let scenario = generate_scenario::<f64>(&cfg, 31).unwrap();
        let a = jccraa(&scenario, &cfg);
        let b = jccraa(&scenario, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn xi_trajectory_monotone_nondecreasing() {
        for seed in 0..20u64 {
            let cfg = test_cfg(4, 4, 8);
            let scenario = generate_scenario::<f64>(&cfg, 100 + seed).unwrap();
            let run = jccraa(&scenario, &cfg);
            for slot in &run.slots {
                for w in slot.trace.windows(2) {
                    assert!(
                        w[1].xi >= w[0].xi - 1e-9 * w[0].xi.abs().max(1.0),
                        "seed {seed}: xi decreased: {} -> {}",
                        w[0].xi,
                        w[1].xi
                    );
                }
            }
        }
    }

    #[test]
    fn dinkelbach_fixed_point_on_degenerate_instance() {
        // Single T-VU, single candidate pairing; the inner solve lands on
        // the same allocation at every xi in the visited range, so xi
        // converges to rate/power in two iterations.
        let mut cfg = test_cfg(1, 0, 1);
        cfg.network.num_svus = 0;
        let scenario = generate_scenario::<f64>(&cfg, 77).unwrap();
        let run = jccraa(&scenario, &cfg);
        let slot = &run.slots[0];
        if slot.report.total_rate > 0.0 {
            assert!(slot.converged, "did not converge: {:?}", slot.trace);
            assert!(slot.iterations <= 3, "iterations {}", slot.iterations);
            let expect = slot.report.total_rate / slot.report.total_power;
            assert!((slot.trace.last().unwrap().xi - expect).abs() <= 1e-9 * expect.max(1.0));
        }
    }

    #[test]
    fn psi_bounded_by_trust_for_social_rule() {
        let cfg = test_cfg(4, 4, 8);
        let scenario = generate_scenario::<f64>(&cfg, 41).unwrap();
        let run = jccraa(&scenario, &cfg);
        for (t, slot) in run.slots.iter().enumerate() {
            for m in 0..4 {
                if let Some(n) = slot.alloc.svu_of_tvu[m] {
                    assert_eq!(
                        scenario.slots[t].trust.get(m, n),
                        1,
                        "social-aware engine selected an untrusted S-VU"
                    );
                }
            }
        }
    }

    #[test]
    fn each_svu_serves_at_most_one_tvu() {
        let cfg = test_cfg(6, 3, 10);
        let scenario = generate_scenario::<f64>(&cfg, 51).unwrap();
        let run = jccraa(&scenario, &cfg);
        for slot in &run.slots {
            let mut seen = vec![0usize; 3];
            for m in 0..6 {
                if let Some(n) = slot.alloc.svu_of_tvu[m] {
                    seen[n] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c <= 1), "S-VU double-booked: {seen:?}");
        }
    }
}
