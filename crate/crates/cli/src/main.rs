//! Command-line harness: Monte Carlo sweeps, single-scenario solves,
//! micro-instance oracle verification and scenario trace dumps.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when the whole
//! experiment is infeasible at runtime.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vecnoma::baselines::Algorithm;
use vecnoma::config::{validate_config, Config, ConfigError, ConfigIssue};
use vecnoma::oracle::{exhaustive_small_instance_ee, OracleError};
use vecnoma::scenario::generate_scenario;
use vecnoma::sweep::{
    aggregate_csv, plot_svg, raw_csv, run_sweep, sweep_from_file, SweepAxis, SweepConfig,
};
use vecnoma::Real;

#[derive(Parser)]
#[command(name = "vecnoma", version, about = "NOMA-enabled vehicular edge computing EE simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (sweeps) or scenario seed (solve/oracle/dump-scenario).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Comma-separated algorithm list (default: all four).
    #[arg(long, global = true, value_delimiter = ',')]
    algorithms: Vec<String>,
    /// Worker threads for Monte Carlo drops (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run Monte Carlo sweeps and write CSV tables and SVG plots.
    Sweep {
        /// Sweep axis: num_tvus, task_size or num_scs. When omitted, the
        /// config file's [sweep] section runs, or all three default axes.
        #[arg(long)]
        axis: Option<String>,
        /// Drops per sweep point.
        #[arg(long)]
        drops: Option<usize>,
    },
    /// Solve one seeded scenario and report per-algorithm energy efficiency.
    Solve {
        /// Also write the scenario trace to this file.
        #[arg(long)]
        dump_scenario: Option<PathBuf>,
    },
    /// Verify a micro instance against the exhaustive oracle.
    Oracle {
        /// Grid step for the oracle's split/power enumeration.
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
    },
    /// Write a scenario trace file for replay.
    DumpScenario {
        /// Output file (defaults to <out>/scenario_<seed>.json).
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("experiment infeasible: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(common: &Common) -> Result<(Config, String), CliError> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let cfg: Config = vecnoma::config::parse_config(&text)?;
    let warnings = validate_config(&cfg)?;
    print_warnings(&warnings);
    Ok((cfg, text))
}

fn print_warnings(warnings: &[ConfigIssue]) {
    for w in warnings {
        eprintln!("{w}");
    }
}

fn algorithms_arg(common: &Common) -> Result<Vec<Algorithm>, CliError> {
    if common.algorithms.is_empty() {
        return Ok(Algorithm::ALL.to_vec());
    }
    common
        .algorithms
        .iter()
        .map(|name| {
            Algorithm::from_name(name)
                .ok_or_else(|| CliError::Config(format!("unknown algorithm '{name}'")))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (cfg, text) = load(&cli.common)?;
    std::fs::create_dir_all(&cli.common.out)?;
    match &cli.command {
        Command::Sweep { axis, drops } => cmd_sweep(cli, &cfg, &text, axis.as_deref(), *drops),
        Command::Solve { dump_scenario } => cmd_solve(cli, &cfg, dump_scenario.as_deref()),
        Command::Oracle { grid_step } => cmd_oracle(cli, &cfg, *grid_step),
        Command::DumpScenario { file } => cmd_dump(cli, &cfg, file.as_deref()),
    }
}

fn cmd_sweep(
    cli: &Cli,
    cfg: &Config,
    text: &str,
    axis: Option<&str>,
    drops: Option<usize>,
) -> Result<(), CliError> {
    let algorithms = algorithms_arg(&cli.common)?;
    let master_seed = cli.common.seed.unwrap_or(1);

    let mut plans: Vec<SweepConfig> = Vec::new();
    if let Some(axis_name) = axis {
        let axis = SweepAxis::from_name(axis_name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown axis '{axis_name}'; expected num_tvus, task_size or num_scs"
            ))
        })?;
        let mut plan =
            SweepConfig::default_for(axis, cfg.clone(), drops.unwrap_or(100), master_seed);
        plan.algorithms = algorithms.clone();
        plans.push(plan);
    } else if let Some(mut plan) = sweep_from_file(text, cfg)? {
        if let Some(seed) = cli.common.seed {
            plan.master_seed = seed;
        }
        if let Some(d) = drops {
            plan.drops = d;
        }
        if !cli.common.algorithms.is_empty() {
            plan.algorithms = algorithms.clone();
        }
        plans.push(plan);
    } else {
        for axis in [SweepAxis::NumTvus, SweepAxis::TaskSize, SweepAxis::NumScs] {
            let mut plan =
                SweepConfig::default_for(axis, cfg.clone(), drops.unwrap_or(100), master_seed);
            plan.algorithms = algorithms.clone();
            plans.push(plan);
        }
    }

    let mut all_infeasible = true;
    for plan in &plans {
        let result = run_sweep(plan, cli.common.jobs)?;
        all_infeasible &= result.fully_infeasible();
        let stem = format!("sweep_{}", plan.axis.name());
        write_out(&cli.common.out, &format!("{stem}.csv"), &aggregate_csv(&result))?;
        write_out(&cli.common.out, &format!("{stem}_raw.csv"), &raw_csv(&result))?;
        write_out(&cli.common.out, &format!("{stem}.svg"), &plot_svg(&result))?;
        println!("wrote {stem}.csv, {stem}_raw.csv, {stem}.svg ({} rows)", result.rows.len());
        for row in &result.rows {
            println!(
                "  {:<16} {}={:<10} mean EE {:.4e} bit/J (infeasible {:.3})",
                row.algorithm.name(),
                row.axis_name,
                row.axis_value,
                row.mean_ee,
                row.infeasible_rate
            );
        }
    }
    if all_infeasible {
        return Err(CliError::Runtime(
            "every drop of every sweep point excluded all T-VUs".into(),
        ));
    }
    Ok(())
}

fn cmd_solve(cli: &Cli, cfg: &Config, dump: Option<&Path>) -> Result<(), CliError> {
    let algorithms = algorithms_arg(&cli.common)?;
    let seed = cli.common.seed.unwrap_or(1);
    let scenario = generate_scenario::<Real>(cfg, seed)?;
    if let Some(path) = dump {
        std::fs::write(path, scenario.dump_json(cfg))?;
        println!("scenario written to {}", path.display());
    }

    let mut any_rate = false;
    for alg in algorithms {
        let run = alg.run(&scenario, cfg);
        any_rate |= run.slots.iter().any(|s| s.report.total_rate > 0.0);
        println!("{:<16} EE {:.6e} bit/J over {} slot(s)", alg.name(), run.ee_total, run.slots.len());
        for (t, slot) in run.slots.iter().enumerate() {
            println!(
                "  slot {t}: iters {} converged {} rate {:.4e} bit/s power {:.4} W excluded {}",
                slot.iterations,
                slot.converged,
                slot.report.total_rate,
                slot.report.total_power,
                slot.excluded.len()
            );
        }
        let mut diag = String::new();
        for (t, slot) in run.slots.iter().enumerate() {
            for rec in &slot.trace {
                let line = serde_json::json!({
                    "slot": t,
                    "iteration": rec.iteration,
                    "xi": rec.xi,
                    "alpha": rec.alpha,
                    "min_delay_slack": rec.min_delay_slack,
                    "min_cu_slack": rec.min_cu_slack,
                });
                writeln!(diag, "{line}").expect("string write");
            }
            let summary = serde_json::json!({
                "slot": t,
                "event": "summary",
                "converged": slot.converged,
                "iterations": slot.iterations,
                "ee": slot.report.ee,
                "excluded": slot.excluded.iter().map(|e| e.tvu).collect::<Vec<_>>(),
                "dead_cus": slot.dead_cus,
            });
            writeln!(diag, "{summary}").expect("string write");
        }
        write_out(&cli.common.out, &format!("diag_{}.jsonl", alg.name()), &diag)?;
    }
    if !any_rate {
        return Err(CliError::Runtime("no algorithm achieved a positive offload rate".into()));
    }
    Ok(())
}

fn cmd_oracle(cli: &Cli, cfg: &Config, grid_step: f64) -> Result<(), CliError> {
    let seed = cli.common.seed.unwrap_or(1);
    let scenario = generate_scenario::<Real>(cfg, seed)?;
    let oracle = match exhaustive_small_instance_ee(&scenario, cfg, grid_step) {
        Ok(r) => r,
        Err(OracleError::TooLarge { what, got, limit }) => {
            return Err(CliError::Config(format!(
                "oracle verification needs a micro instance: {what} = {got} exceeds {limit}"
            )));
        }
        Err(OracleError::Infeasible) => {
            return Err(CliError::Runtime("oracle found no feasible point".into()));
        }
    };
    let run = vecnoma::solver::jccraa(&scenario, cfg);
    let ratio = if oracle.ee > 0.0 { run.ee_total / oracle.ee } else { f64::NAN };
    println!("oracle EE    {:.6e} bit/J", oracle.ee);
    println!("solver EE    {:.6e} bit/J", run.ee_total);
    println!("ratio        {ratio:.4}");
    Ok(())
}

fn cmd_dump(cli: &Cli, cfg: &Config, file: Option<&Path>) -> Result<(), CliError> {
    let seed = cli.common.seed.unwrap_or(1);
    let scenario = generate_scenario::<Real>(cfg, seed)?;
    let default_path = cli.common.out.join(format!("scenario_{seed}.json"));
    let path = file.unwrap_or(&default_path);
    std::fs::write(path, scenario.dump_json(cfg))?;
    println!("scenario written to {}", path.display());
    Ok(())
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses_sweep_flags() {
        let cli = Cli::try_parse_from([
            "vecnoma", "sweep", "--axis", "num_tvus", "--drops", "5", "--seed", "7", "--jobs", "2",
            "--algorithms", "jccraa,rsu-sapc",
        ])
        .unwrap();
        match cli.command {
            Command::Sweep { axis, drops } => {
                assert_eq!(axis.as_deref(), Some("num_tvus"));
                assert_eq!(drops, Some(5));
            }
            _ => panic!("wrong command"),
        }
        assert_eq!(cli.common.seed, Some(7));
        assert_eq!(cli.common.jobs, 2);
        assert_eq!(cli.common.algorithms, vec!["jccraa", "rsu-sapc"]);
    }

    #[test]
    fn cli_parses_solve_and_oracle() {
        let cli = Cli::try_parse_from(["vecnoma", "solve", "--dump-scenario", "x.json"]).unwrap();
        assert!(matches!(cli.command, Command::Solve { .. }));
        let cli = Cli::try_parse_from(["vecnoma", "oracle", "--grid-step", "0.1"]).unwrap();
        match cli.command {
            Command::Oracle { grid_step } => assert_eq!(grid_step, 0.1),
            _ => panic!("wrong command"),
        }
    }
}
