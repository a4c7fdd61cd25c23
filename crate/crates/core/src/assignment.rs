//! Maximum-weight bipartite matching between CUs (rows) and T-VUs
//! (columns) via the Kuhn-Munkres algorithm with potentials, O(n^3).
//! Maximization runs as minimization on negated, shifted costs; dummy
//! zero-weight columns pad the matrix square so unmatched CUs are
//! represented explicitly.

use serde::{Deserialize, Serialize};

use crate::mat::Mat;
use crate::scalar::{s, Scalar};

/// Pairwise matching weights: `weights[u][m]` is the best achievable
/// subtractive-objective contribution when T-VU m shares CU u's
/// sub-channel. Infeasible pairs carry a finite large-negative sentinel so
/// the arithmetic stays total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix<S> {
    pub weights: Mat<S>,
    pub feasible: Mat<bool>,
    pub sentinel: S,
}

impl<S: Scalar> WeightMatrix<S> {
    /// Build from per-pair values; `None` marks an infeasible pair. The
    /// sentinel is sized to dominate every finite weight by a factor 1e6.
    pub fn from_entries(
        num_cus: usize,
        num_tvus: usize,
        entry: impl FnMut(usize, usize) -> Option<S>,
    ) -> Self {
        let raw = Mat::from_fn(num_cus, num_tvus, entry);
        let max_abs = raw
            .iter()
            .filter_map(|v| v.map(|x| x.abs()))
            .fold(S::one(), |a, b| a.max(b));
        let sentinel = -max_abs * s::<S>(1e6);
        let weights = Mat::from_fn(num_cus, num_tvus, |u, m| raw.get(u, m).unwrap_or(sentinel));
        let feasible = Mat::from_fn(num_cus, num_tvus, |u, m| raw.get(u, m).is_some());
        Self { weights, feasible, sentinel }
    }

    pub fn num_cus(&self) -> usize {
        self.weights.rows()
    }

    pub fn num_tvus(&self) -> usize {
        self.weights.cols()
    }
}

/// Result of the spectrum matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching<S> {
    /// Matched CU per T-VU; `None` when every pairing was infeasible.
    pub cu_of_tvu: Vec<Option<usize>>,
    /// Total weight over matched, feasible pairs.
    pub total: S,
    /// T-VUs left unmatched (entire column infeasible).
    pub unmatched: Vec<usize>,
}

/// Exact maximum-weight matching; every T-VU is assigned one CU, every CU
/// takes at most one T-VU. Requires at least as many CUs as T-VUs.
pub fn kuhn_munkres<S: Scalar>(w: &WeightMatrix<S>) -> Matching<S> {
    let rows = w.num_cus();
    let real_cols = w.num_tvus();
    assert!(
        rows >= real_cols,
        "matching needs at least as many CUs ({rows}) as T-VUs ({real_cols})"
    );
    if real_cols == 0 {
        return Matching { cu_of_tvu: Vec::new(), total: S::zero(), unmatched: Vec::new() };
    }

    // Square minimization problem: cost = shift - weight, dummy columns at
    // weight zero.
    let n = rows;
    let shift = w
        .weights
        .iter()
        .fold(S::zero(), |a, &b| a.max(b.abs()))
        * S::two()
        + S::one();
    let cost = |i: usize, j: usize| -> S {
        if j < real_cols {
            shift - w.weights.get(i, j)
        } else {
            shift
        }
    };

    // Hungarian algorithm with row/column potentials and shortest
    // augmenting paths; deterministic given the fixed scan order.
    let inf = S::infinity();
    let mut u_pot = vec![S::zero(); n + 1];
    let mut v_pot = vec![S::zero(); n + 1];
    let mut matched_row = vec![n; n + 1]; // column -> row (n = free)
    let mut way = vec![0usize; n + 1];

    for i in 0..n {
        // Augment from row i through a virtual column n.
        let mut j0 = n;
        matched_row[n] = i;
        let mut min_v = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = n;
            for j in 0..n {
                if !used[j] {
                    let cur = cost(i0, j) - u_pot[i0] - v_pot[j];
                    if cur < min_v[j] {
                        min_v[j] = cur;
                        way[j] = j0;
                    }
                    if min_v[j] < delta {
                        delta = min_v[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u_pot[matched_row[j]] = u_pot[matched_row[j]] + delta;
                    v_pot[j] = v_pot[j] - delta;
                } else {
                    min_v[j] = min_v[j] - delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == n {
                break;
            }
        }
        // Unwind the augmenting path.
        while j0 != n {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut cu_of_tvu = vec![None; real_cols];
    let mut unmatched = Vec::new();
    let mut total = S::zero();
    for m in 0..real_cols {
        let row = matched_row[m];
        if row < n && w.feasible.get(row, m) {
            cu_of_tvu[m] = Some(row);
            total = total + w.weights.get(row, m);
        } else {
            unmatched.push(m);
        }
    }
    Matching { cu_of_tvu, total, unmatched }
}
