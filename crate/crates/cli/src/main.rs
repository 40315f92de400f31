use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use edgeplan::experiments::{
    compare_methods, default_urs_cap, mean_final_gap, optimize_heterogeneous, optimize_homogeneous,
    run_baseline, simulate, sweep_spread, sweep_weights, table1_checks, table2_checks,
    trajectory_rows, BoundAudit, TABLE2_REFERENCE, TRAJECTORY_COLUMNS,
};
use edgeplan::report::{csv_bytes, write_outputs, ResultRow};
use edgeplan::scenario::{bundled_scenario, generate_fleet, load_scenario, Scenario, CLAMP_FLOOR};
use edgeplan::{CliError, Result};
use edgeplan_core::baselines::BaselineKind;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "edgeplan",
    version,
    about = "Sensing-time and training-round allocation for edge learning"
)]
struct Cli {
    /// Scenario TOML file.
    #[arg(long, global = true, conflicts_with = "bundled")]
    scenario: Option<PathBuf>,
    /// Bundled scenario: homogeneous_v, heterogeneous_v or table2_calibrated.
    #[arg(long, global = true)]
    bundled: Option<String>,
    /// Overrides the scenario's fleet and simulation seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for results.csv and summary.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Homog,
    Heterog,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Eas,
    Gss,
    Pss,
    Urs,
    /// The proposed plan and every baseline on the same fleet.
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize sensing times and the round count.
    Optimize {
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Run a reference allocator.
    Baseline {
        #[arg(long, value_enum)]
        kind: Kind,
        /// URS round count; defaults to ten times the proposed plan's.
        #[arg(long)]
        round_cap: Option<u64>,
        /// PSS data fraction.
        #[arg(long, default_value_t = 0.15)]
        fraction: f64,
    },
    /// Partial-data gradient descent over the data-fraction ladder.
    Simulate,
    /// Sweep surrogate weights or device heterogeneity.
    Sweep {
        /// `alpha:beta` pairs, comma separated; the published five rows when empty.
        #[arg(long, num_args = 0..=1, default_missing_value = "", conflicts_with = "std_dev")]
        alpha_beta: Option<String>,
        /// Spread multipliers, comma separated.
        #[arg(long, value_delimiter = ',')]
        std_dev: Option<Vec<f64>>,
        /// Fleets per spread.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
    /// Check the convergence bound and per-step inequalities on synthetic runs.
    ValidateBound,
    /// Recompute the surrogate table and the homogeneous optimum table.
    ReproduceTables,
}

fn resolve_scenario(cli: &Cli, default: &str) -> Result<Scenario> {
    let mut sc = match (&cli.scenario, &cli.bundled) {
        (Some(path), _) => load_scenario(path)?,
        (None, Some(name)) => bundled_scenario(name)?,
        (None, None) => bundled_scenario(default)?,
    };
    if let Some(seed) = cli.seed {
        sc.heterogeneity.seed = seed;
        sc.sim.base_seed = seed;
    }
    Ok(sc)
}

fn parse_weights(text: &str) -> Result<Vec<(f64, f64)>> {
    if text.trim().is_empty() {
        return Ok(TABLE2_REFERENCE.iter().map(|r| (r.alpha, r.beta)).collect());
    }
    text.split(',')
        .map(|pair| {
            let bad = || CliError::Usage(format!("expected alpha:beta, got `{pair}`"));
            let (a, b) = pair.trim().split_once(':').ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn print_rows(rows: &[ResultRow]) {
    for r in rows {
        println!(
            "{:<40} {:<16} t_sens {:>9.3}..{:<9.3} rounds {:>6} objective {:>10.4} feasible {}",
            r.scenario_id,
            r.method,
            r.t_sens_min_s,
            r.t_sens_max_s,
            r.rounds,
            r.objective,
            r.feasible
        );
    }
}

fn heterogeneity_note(sc: &Scenario) -> serde_json::Value {
    json!({
        "mode": sc.heterogeneity.mode,
        "std_scale": sc.heterogeneity.std_scale,
        "seed": sc.heterogeneity.seed,
        "clamp_floor_fraction_of_mean": CLAMP_FLOOR,
    })
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Optimize { mode: Mode::Homog } => {
            let sc = resolve_scenario(cli, "homogeneous_v")?;
            let (sol, row) = optimize_homogeneous(&sc)?;
            print_rows(std::slice::from_ref(&row));
            write_outputs(
                &cli.out,
                "optimize-homog",
                &[row],
                json!({ "solution": sol }),
                &[],
            )
        }
        Command::Optimize {
            mode: Mode::Heterog,
        } => {
            let sc = resolve_scenario(cli, "heterogeneous_v")?;
            let fleet = generate_fleet(&sc);
            let (plan, trace, row) = optimize_heterogeneous(&sc, &fleet)?;
            print_rows(std::slice::from_ref(&row));
            let details = json!({
                "plan": plan,
                "trace": trace,
                "heterogeneity": heterogeneity_note(&sc),
            });
            write_outputs(&cli.out, "optimize-heterog", &[row], details, &[])
        }
        Command::Baseline {
            kind,
            round_cap,
            fraction,
        } => {
            let sc = resolve_scenario(cli, "heterogeneous_v")?;
            let fleet = generate_fleet(&sc);
            let rows = match kind {
                Kind::All => compare_methods(&sc, &fleet)?,
                Kind::Eas => vec![run_baseline(&sc, &fleet, BaselineKind::Eas)?],
                Kind::Gss => vec![run_baseline(&sc, &fleet, BaselineKind::Gss)?],
                Kind::Pss => vec![run_baseline(
                    &sc,
                    &fleet,
                    BaselineKind::Pss {
                        fraction: *fraction,
                    },
                )?],
                Kind::Urs => {
                    let cap = round_cap.unwrap_or_else(|| default_urs_cap(&sc, &fleet));
                    vec![run_baseline(
                        &sc,
                        &fleet,
                        BaselineKind::Urs { round_cap: cap },
                    )?]
                }
            };
            print_rows(&rows);
            let details = json!({
                "heterogeneity": heterogeneity_note(&sc),
                "note": "urs ignores both budgets and is never expected to be feasible",
            });
            write_outputs(&cli.out, "baseline", &rows, details, &[])
        }
        Command::Simulate | Command::ValidateBound => {
            let sc = resolve_scenario(cli, "homogeneous_v")?;
            let runs = simulate(&sc)?;
            let audit = BoundAudit::of(&runs);
            let gaps = mean_final_gap(&runs, &sc.sim.data_fraction_ladder);
            let trajectories = csv_bytes(&trajectory_rows(&runs), &TRAJECTORY_COLUMNS)?;
            for (f, g) in &gaps {
                println!("fraction {f:<6} mean final gap {g:.6e}");
            }
            println!(
                "runs {} contractive {} violations: bound {} error {} recursion {} contraction {} unvalidated envelopes {}",
                audit.runs,
                audit.contractive_runs,
                audit.bound_violations,
                audit.error_bound_violations,
                audit.recursion_violations,
                audit.contraction_violations,
                audit.envelope_unvalidated
            );
            let command = if matches!(cli.command, Command::Simulate) {
                "simulate"
            } else {
                "validate-bound"
            };
            let details = json!({
                "sim": sc.sim,
                "audit": audit,
                "all_bounds_hold": audit.clean(),
                "mean_final_gap": gaps,
            });
            write_outputs(
                &cli.out,
                command,
                &[],
                details,
                &[("trajectories.csv", trajectories)],
            )
        }
        Command::Sweep {
            alpha_beta,
            std_dev,
            seeds,
        } => match (alpha_beta, std_dev) {
            (Some(text), None) => {
                let sc = resolve_scenario(cli, "homogeneous_v")?;
                let cells = sweep_weights(&sc, &parse_weights(text)?)?;
                let (weights, rows): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
                print_rows(&rows);
                write_outputs(
                    &cli.out,
                    "sweep-alpha-beta",
                    &rows,
                    json!({ "cells": weights }),
                    &[],
                )
            }
            (None, Some(spreads)) => {
                let sc = resolve_scenario(cli, "heterogeneous_v")?;
                if spreads.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                    return Err(CliError::Usage(
                        "--std-dev values must be finite and >= 0".into(),
                    ));
                }
                let seed_list: Vec<u64> = (0..*seeds).map(|i| sc.heterogeneity.seed + i).collect();
                let cells = sweep_spread(&sc, spreads, &seed_list)?;
                let (cells, rows): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
                let means: Vec<_> = spreads
                    .iter()
                    .map(|&s| {
                        let r: Vec<u64> = cells.iter().filter(|c| c.std_scale == s).map(|c| c.rounds).collect();
                        json!({ "std_scale": s, "mean_rounds": r.iter().sum::<u64>() as f64 / r.len().max(1) as f64 })
                    })
                    .collect();
                for m in &means {
                    println!("{m}");
                }
                write_outputs(
                    &cli.out,
                    "sweep-std-dev",
                    &rows,
                    json!({ "cells": cells, "mean_rounds": means }),
                    &[],
                )
            }
            _ => Err(CliError::Usage(
                "sweep needs exactly one of --alpha-beta or --std-dev".into(),
            )),
        },
        Command::ReproduceTables => {
            let table1 = table1_checks()?;
            let calibrated = resolve_scenario(cli, "table2_calibrated")?;
            let (table2, mut rows) = table2_checks(&calibrated)?;
            // The literal payload is informational: its sensing times drift outside the bands.
            let literal = bundled_scenario("homogeneous_v")?;
            let (literal_checks, literal_rows) = table2_checks(&literal)?;
            rows.extend(literal_rows);
            for c in table1.iter().chain(&table2) {
                println!(
                    "{} {:<32} expected {:>10.4} got {:>10.4}",
                    if c.pass { "ok      " } else { "MISMATCH" },
                    c.name,
                    c.expected,
                    c.actual
                );
            }
            let pass = table1.iter().chain(&table2).all(|c| c.pass);
            let details = json!({
                "all_checks_passed": pass,
                "table1": table1,
                "table2": table2,
                "table2_literal_payload_informational": literal_checks,
            });
            write_outputs(&cli.out, "reproduce-tables", &rows, details, &[])
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("EDGEPLAN_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "EDGEPLAN_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
