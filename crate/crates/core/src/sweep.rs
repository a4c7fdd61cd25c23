//! Monte Carlo sweep harness: runs the selected algorithms over seeded
//! scenario drops along one experiment axis, aggregates energy-efficiency
//! statistics, and emits deterministic CSV tables and SVG plots.
//!
//! Reproducibility contract: the master seed fully determines every output
//! byte. Drops run in parallel but results are collected and sorted by
//! (axis index, drop index) before aggregation, so thread scheduling never
//! changes the output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::Algorithm;
use crate::config::{validate_config, Config, ConfigError, ConfigIssue};
use crate::scalar::Scalar;
use crate::scenario::{generate_scenario, mix_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NumTvus,
    TaskSize,
    NumScs,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NumTvus => "num_tvus",
            SweepAxis::TaskSize => "task_size",
            SweepAxis::NumScs => "num_scs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "num_tvus" => Some(SweepAxis::NumTvus),
            "task_size" => Some(SweepAxis::TaskSize),
            "num_scs" => Some(SweepAxis::NumScs),
            _ => None,
        }
    }

    /// Apply one axis value to a base config.
    pub fn apply(self, base: &Config, value: f64) -> Config {
        let mut cfg = base.clone();
        match self {
            SweepAxis::NumTvus => {
                cfg.network.num_tvus = value.round() as usize;
            }
            SweepAxis::TaskSize => {
                cfg.task.size_min_bits = value;
                cfg.task.size_max_bits = value;
            }
            SweepAxis::NumScs => {
                let f = value.round() as usize;
                cfg.network.num_scs = f;
                cfg.network.num_cus = f;
            }
        }
        cfg
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub drops: usize,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    pub base: Config,
}

impl SweepConfig {
    /// The default experiment grid for one axis, mirroring the evaluated
    /// ranges: M in 10..50, task sizes 20..100 kbit, F in 30..60.
    pub fn default_for(axis: SweepAxis, base: Config, drops: usize, master_seed: u64) -> Self {
        let values = match axis {
            SweepAxis::NumTvus => vec![10.0, 20.0, 30.0, 40.0, 50.0],
            SweepAxis::TaskSize => vec![2e4, 4e4, 6e4, 8e4, 1e5],
            SweepAxis::NumScs => vec![30.0, 40.0, 50.0, 60.0],
        };
        Self { axis, values, drops, algorithms: Algorithm::ALL.to_vec(), master_seed, base }
    }
}

/// Validate the sweep plus every per-point config; reports all problems.
pub fn validate_sweep(cfg: &SweepConfig) -> Result<Vec<ConfigIssue>, ConfigError> {
    let mut issues = Vec::new();
    if cfg.values.is_empty() {
        issues.push(ConfigIssue {
            fatal: true,
            field: "sweep.values".into(),
            message: "at least one axis value is required".into(),
        });
    }
    if !cfg.values.windows(2).all(|w| w[0] < w[1]) {
        issues.push(ConfigIssue {
            fatal: true,
            field: "sweep.values".into(),
            message: "axis values must be strictly increasing".into(),
        });
    }
    if cfg.drops == 0 {
        issues.push(ConfigIssue {
            fatal: true,
            field: "sweep.drops".into(),
            message: "at least one drop per point is required".into(),
        });
    }
    if cfg.algorithms.is_empty() {
        issues.push(ConfigIssue {
            fatal: true,
            field: "sweep.algorithms".into(),
            message: "at least one algorithm is required".into(),
        });
    }
    for &v in &cfg.values {
        match validate_config(&cfg.axis.apply(&cfg.base, v)) {
            Ok(mut w) => issues.append(&mut w),
            Err(ConfigError::Invalid(mut v)) => issues.append(&mut v),
            Err(e) => return Err(e),
        }
    }
    if issues.iter().any(|i| i.fatal) {
        Err(ConfigError::Invalid(issues))
    } else {
        Ok(issues)
    }
}

/// Raw `[sweep]` section of a config file. Empty `values` or `algorithms`
/// select the defaults for the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub values: Vec<f64>,
    pub drops: usize,
    pub algorithms: Vec<String>,
    pub master_seed: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: "num_tvus".into(),
            values: Vec::new(),
            drops: 100,
            algorithms: Vec::new(),
            master_seed: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct SweepFile {
    #[serde(default)]
    sweep: Option<SweepSection>,
}

/// Extract the optional sweep plan from a config file's text.
pub fn sweep_from_file(text: &str, base: &Config) -> Result<Option<SweepConfig>, ConfigError> {
    let file: SweepFile = toml::from_str(text)?;
    let Some(section) = file.sweep else { return Ok(None) };
    Ok(Some(resolve_sweep(&section, base)?))
}

/// Interpret a raw sweep section against a base config.
pub fn resolve_sweep(section: &SweepSection, base: &Config) -> Result<SweepConfig, ConfigError> {
    let mut issues = Vec::new();
    let axis = match SweepAxis::from_name(&section.axis) {
        Some(a) => a,
        None => {
            issues.push(ConfigIssue {
                fatal: true,
                field: "sweep.axis".into(),
                message: format!(
                    "unknown axis '{}'; expected num_tvus, task_size or num_scs",
                    section.axis
                ),
            });
            SweepAxis::NumTvus
        }
    };
    let mut algorithms = Vec::new();
    if section.algorithms.is_empty() {
        algorithms = Algorithm::ALL.to_vec();
    } else {
        for name in &section.algorithms {
            match Algorithm::from_name(name) {
                Some(a) => algorithms.push(a),
                None => issues.push(ConfigIssue {
                    fatal: true,
                    field: "sweep.algorithms".into(),
                    message: format!("unknown algorithm '{name}'"),
                }),
            }
        }
    }
    if !issues.is_empty() {
        return Err(ConfigError::Invalid(issues));
    }
    let defaults = SweepConfig::default_for(axis, base.clone(), section.drops, section.master_seed);
    Ok(SweepConfig {
        axis,
        values: if section.values.is_empty() { defaults.values } else { section.values.clone() },
        drops: section.drops,
        algorithms,
        master_seed: section.master_seed,
        base: base.clone(),
    })
}

/// One drop of one algorithm at one axis point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropResult {
    pub algorithm: Algorithm,
    pub axis_value: f64,
    pub drop_index: usize,
    pub seed: u64,
    pub ee: f64,
    pub mean_iters: f64,
    pub infeasible_rate: f64,
    pub converged: bool,
}

/// Aggregated statistics for one (algorithm, axis value) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub axis_name: String,
    pub axis_value: f64,
    pub mean_ee: f64,
    pub std_ee: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub infeasible_rate: f64,
    pub mean_iters: f64,
    pub drops: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<AggregateRow>,
    pub raw: Vec<DropResult>,
}

impl SweepResult {
    /// Mean EE of one algorithm along the axis, in axis order.
    pub fn series(&self, alg: Algorithm) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == alg)
            .map(|r| (r.axis_value, r.mean_ee))
            .collect()
    }

    /// True when every drop excluded every T-VU: the experiment produced
    /// nothing but infeasibility.
    pub fn fully_infeasible(&self) -> bool {
        !self.raw.is_empty() && self.raw.iter().all(|d| d.infeasible_rate >= 1.0)
    }
}

/// Run a sweep. Drops are dispatched onto the rayon pool; pass `jobs = 0`
/// to use the default thread count.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepResult, ConfigError> {
    validate_sweep(cfg)?;
    if jobs == 0 {
        Ok(run_sweep_inner(cfg))
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool construction");
        Ok(pool.install(|| run_sweep_inner(cfg)))
    }
}

fn run_sweep_inner(cfg: &SweepConfig) -> SweepResult {
    let tasks: Vec<(usize, usize)> = (0..cfg.values.len())
        .flat_map(|ai| (0..cfg.drops).map(move |d| (ai, d)))
        .collect();

    let mut raw: Vec<((usize, usize), Vec<DropResult>)> = tasks
        .par_iter()
        .map(|&(axis_idx, drop_idx)| {
            let value = cfg.values[axis_idx];
            let point_cfg = cfg.axis.apply(&cfg.base, value);
            // The same drop index reuses the same seed at every axis point
            // and for every algorithm (common random numbers).
            let seed = mix_seed(cfg.master_seed, drop_idx as u64 + 1);
            let scenario = generate_scenario::<f64>(&point_cfg, seed)
                .expect("per-point config was validated");
            let results = cfg
                .algorithms
                .iter()
                .map(|&alg| {
                    let run = alg.run(&scenario, &point_cfg);
                    let slots = run.slots.len().max(1) as f64;
                    let mean_iters =
                        run.slots.iter().map(|s| s.iterations as f64).sum::<f64>() / slots;
                    let tvu_slots = (point_cfg.network.num_tvus * run.slots.len()).max(1) as f64;
                    let infeasible =
                        run.slots.iter().map(|s| s.excluded.len() as f64).sum::<f64>() / tvu_slots;
                    let converged = run.slots.iter().all(|s| s.converged);
                    DropResult {
                        algorithm: alg,
                        axis_value: value,
                        drop_index: drop_idx,
                        seed,
                        ee: run.ee_total.to_f64_lossy(),
                        mean_iters,
                        infeasible_rate: infeasible,
                        converged,
                    }
                })
                .collect();
            ((axis_idx, drop_idx), results)
        })
        .collect();

    // Deterministic order independent of scheduling.
    raw.sort_by_key(|(k, _)| *k);
    let raw: Vec<DropResult> = raw.into_iter().flat_map(|(_, r)| r).collect();

    let mut rows = Vec::new();
    for &value in &cfg.values {
        for &alg in &cfg.algorithms {
            let cell: Vec<&DropResult> = raw
                .iter()
                .filter(|d| d.algorithm == alg && d.axis_value == value)
                .collect();
            let n = cell.len();
            let mean = cell.iter().map(|d| d.ee).sum::<f64>() / n as f64;
            let var = if n > 1 {
                cell.iter().map(|d| (d.ee - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            let std = var.sqrt();
            let half = 1.96 * std / (n as f64).sqrt();
            rows.push(AggregateRow {
                algorithm: alg,
                axis_name: cfg.axis.name().to_string(),
                axis_value: value,
                mean_ee: mean,
                std_ee: std,
                ci95_lo: mean - half,
                ci95_hi: mean + half,
                infeasible_rate: cell.iter().map(|d| d.infeasible_rate).sum::<f64>() / n as f64,
                mean_iters: cell.iter().map(|d| d.mean_iters).sum::<f64>() / n as f64,
                drops: n,
                seed: cfg.master_seed,
            });
        }
    }

    SweepResult { axis: cfg.axis, rows, raw }
}

// ---------------------------------------------------------------------------
// CSV and SVG emission
// ---------------------------------------------------------------------------

pub fn aggregate_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "algorithm,axis_name,axis_value,mean_ee_bits_per_joule,std_ee,ci95_lo,ci95_hi,infeasible_rate,mean_iters,drops,seed\n",
    );
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.algorithm.name(),
            r.axis_name,
            r.axis_value,
            r.mean_ee,
            r.std_ee,
            r.ci95_lo,
            r.ci95_hi,
            r.infeasible_rate,
            r.mean_iters,
            r.drops,
            r.seed
        ));
    }
    out
}

pub fn raw_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "algorithm,axis_name,axis_value,drop_index,seed,ee_bits_per_joule,mean_iters,infeasible_rate,converged\n",
    );
    let axis_name = result.axis.name();
    for d in &result.raw {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            d.algorithm.name(),
            axis_name,
            d.axis_value,
            d.drop_index,
            d.seed,
            d.ee,
            d.mean_iters,
            d.infeasible_rate,
            d.converged
        ));
    }
    out
}

const SERIES_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Standalone SVG line plot of mean EE versus the sweep axis, one series
/// per algorithm. No external plotting dependencies.
pub fn plot_svg(result: &SweepResult) -> String {
    let width = 800.0;
    let height = 500.0;
    let ml = 90.0;
    let mr = 30.0;
    let mt = 40.0;
    let mb = 70.0;
    let pw = width - ml - mr;
    let ph = height - mt - mb;

    let algs: Vec<Algorithm> = {
        let mut seen = Vec::new();
        for r in &result.rows {
            if !seen.contains(&r.algorithm) {
                seen.push(r.algorithm);
            }
        }
        seen
    };
    let xs: Vec<f64> = result.rows.iter().map(|r| r.axis_value).collect();
    let ys: Vec<f64> = result.rows.iter().map(|r| r.mean_ee).collect();
    let (xmin, xmax) = bounds(&xs);
    let (ymin0, ymax0) = bounds(&ys);
    let ypad = ((ymax0 - ymin0).abs()).max(ymax0.abs().max(1e-12) * 0.05) * 0.08;
    let (ymin, ymax) = (ymin0 - ypad, ymax0 + ypad);

    let x_of = |x: f64| ml + (x - xmin) / (xmax - xmin).max(1e-300) * pw;
    let y_of = |y: f64| mt + ph - (y - ymin) / (ymax - ymin).max(1e-300) * ph;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">mean energy efficiency vs {}</text>\n",
        ml + pw / 2.0,
        result.axis.name()
    ));

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{ml:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        mt + ph,
        ml + pw,
        mt + ph
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml:.1}\" y1=\"{mt:.1}\" x2=\"{ml:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        mt + ph
    ));
    for k in 0..=4 {
        let fx = xmin + (xmax - xmin) * k as f64 / 4.0;
        let px = x_of(fx);
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            mt + ph,
            mt + ph + 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            mt + ph + 22.0,
            format_tick(fx)
        ));
        let fy = ymin + (ymax - ymin) * k as f64 / 4.0;
        let py = y_of(fy);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{ml:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            ml - 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            ml - 10.0,
            py + 4.0,
            format_tick(fy)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        ml + pw / 2.0,
        height - 18.0,
        result.axis.name()
    ));
    svg.push_str(&format!(
        "<text x=\"22\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 22 {:.1})\">mean EE (bit/J)</text>\n",
        mt + ph / 2.0,
        mt + ph / 2.0
    ));

    // Series.
    for (i, alg) in algs.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let pts: Vec<String> = result
            .series(*alg)
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", x_of(x), y_of(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            pts.join(" ")
        ));
        for &(x, y) in result.series(*alg).iter() {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                x_of(x),
                y_of(y)
            ));
        }
        // Legend.
        let ly = mt + 14.0 + 18.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            ml + pw - 170.0,
            ml + pw - 140.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            ml + pw - 132.0,
            ly + 4.0,
            alg.name()
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e5 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_base() -> Config {
        let mut cfg = Config::default();
        cfg.network.num_tvus = 2;
        cfg.network.num_svus = 2;
        cfg.network.num_cus = 4;
        cfg.network.num_scs = 4;
        cfg.network.num_slots = 1;
        cfg
    }

    #[test]
    fn single_point_single_algorithm_single_drop() {
        let sweep = SweepConfig {
            axis: SweepAxis::NumTvus,
            values: vec![2.0],
            drops: 1,
            algorithms: vec![Algorithm::Jccraa],
            master_seed: 5,
            base: tiny_base(),
        };
        let result = run_sweep(&sweep, 1).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.raw.len(), 1);
        let csv = aggregate_csv(&result);
        assert_eq!(csv.lines().count(), 2, "header plus one row:\n{csv}");
    }

    #[test]
    fn row_counts_match_grid() {
        let sweep = SweepConfig {
            axis: SweepAxis::NumTvus,
            values: vec![1.0, 2.0],
            drops: 3,
            algorithms: vec![Algorithm::Jccraa, Algorithm::RsuSapc],
            master_seed: 1,
            base: tiny_base(),
        };
        let result = run_sweep(&sweep, 1).unwrap();
        assert_eq!(result.rows.len(), 2 * 2);
        assert_eq!(result.raw.len(), 2 * 2 * 3);
        for row in &result.rows {
            assert_eq!(row.drops, 3);
        }
    }

    #[test]
    fn same_seed_byte_identical_even_parallel() {
        let sweep = SweepConfig {
            axis: SweepAxis::NumTvus,
            values: vec![1.0, 2.0],
            drops: 4,
            algorithms: vec![Algorithm::Jccraa, Algorithm::OmaJccra],
            master_seed: 42,
            base: tiny_base(),
        };
        let a = run_sweep(&sweep, 1).unwrap();
        let b = run_sweep(&sweep, 2).unwrap();
        assert_eq!(aggregate_csv(&a), aggregate_csv(&b));
        assert_eq!(raw_csv(&a), raw_csv(&b));
        assert_eq!(plot_svg(&a), plot_svg(&b));
    }

    #[test]
    fn invalid_axis_values_rejected() {
        let mut sweep = SweepConfig {
            axis: SweepAxis::NumTvus,
            values: vec![2.0, 2.0],
            drops: 1,
            algorithms: vec![Algorithm::Jccraa],
            master_seed: 1,
            base: tiny_base(),
        };
        assert!(run_sweep(&sweep, 1).is_err());
        // A point that breaks M <= U must also be rejected.
        sweep.values = vec![2.0, 40.0];
        assert!(run_sweep(&sweep, 1).is_err());
    }

    #[test]
    fn sweep_section_parsed_from_config_text() {
        let text = r#"
[network]
num_tvus = 2
num_svus = 2
num_cus = 4
num_scs = 4

[sweep]
axis = "task_size"
values = [2e4, 5e4]
drops = 3
algorithms = ["jccraa"]
master_seed = 9
"#;
        let base: Config = crate::config::parse_config(text).unwrap();
        let plan = sweep_from_file(text, &base).unwrap().unwrap();
        assert_eq!(plan.axis, SweepAxis::TaskSize);
        assert_eq!(plan.values, vec![2e4, 5e4]);
        assert_eq!(plan.drops, 3);
        assert_eq!(plan.algorithms, vec![Algorithm::Jccraa]);
        assert_eq!(plan.master_seed, 9);

        // No [sweep] section -> None.
        assert!(sweep_from_file("", &base).unwrap().is_none());

        // Unknown names are configuration errors.
        let bad = "[sweep]\naxis = 'bogus'\n";
        assert!(sweep_from_file(bad, &base).is_err());
        let bad = "[sweep]\nalgorithms = ['bogus']\n";
        assert!(sweep_from_file(bad, &base).is_err());
    }

    #[test]
    fn svg_has_all_series() {
        let sweep = SweepConfig {
            axis: SweepAxis::TaskSize,
            values: vec![2e4, 4e4],
            drops: 1,
            algorithms: Algorithm::ALL.to_vec(),
            master_seed: 3,
            base: tiny_base(),
        };
        let result = run_sweep(&sweep, 1).unwrap();
        let svg = plot_svg(&result);
        for alg in Algorithm::ALL {
            assert!(svg.contains(alg.name()), "missing series {}", alg.name());
        }
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
