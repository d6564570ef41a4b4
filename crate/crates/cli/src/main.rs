//! cosym: verify cosymplectic-family structures, run moment-map
//! reductions, integrate Reeb flows, and check cone / mapping-torus
//! commutation, from built-in fixtures or JSON scenario files.
//!
//! Exit codes: 0 all checks passed, 2 at least one check failed,
//! 1 configuration or usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cosym_core::report::Tolerances;
use cosym_core::sample::SamplePlan;
use cosym_core::scenario::{self, RunOutput};

#[derive(Parser)]
#[command(
    name = "cosym",
    about = "numerical cosymplectic / coKähler / 3-cosymplectic geometry engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Sample count for verification point sets.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// RNG seed (overridden by the COSYM_SEED environment variable).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a structure's axioms over a sampled point set.
    Verify {
        /// Built-in fixture name (see list-builtins).
        #[arg(long, conflicts_with = "scenario")]
        builtin: Option<String>,
        /// JSON scenario file.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a moment-map reduction and verify the reduced structure.
    Reduce {
        #[arg(long, conflicts_with = "scenario")]
        builtin: Option<String>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Integrate the evolution (Reeb) flow of a time-dependent system.
    Flow {
        #[arg(long)]
        builtin: String,
        /// Start point, comma-separated chart coordinates.
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<f64>>,
        /// Flow duration.
        #[arg(long = "T", default_value_t = std::f64::consts::TAU)]
        t: f64,
        /// Fixed integrator step.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Write the trajectory CSV here (defaults to <out>.csv).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compare reduce-then-construct against construct-then-reduce.
    Commute {
        /// One of: kahler-to-cokahler, cokahler-to-kahler,
        /// hyperkahler-to-3cosymplectic, 3cosymplectic-to-hyperkahler, torus.
        #[arg(long)]
        direction: String,
        /// Comparison grid size.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// The heavy-top scenario on T*SO(3)×R: moment map, reduction to the
    /// momentum sphere, conservation and the Euler-equation oracle.
    RigidBody {
        /// Inertia coefficients M1,M2,M3.
        #[arg(long = "M", value_delimiter = ',', default_value = "1,2,3")]
        inertia: Vec<f64>,
        /// Reduction level ζ (three components, nonzero).
        #[arg(long, value_delimiter = ',', default_value = "0,0,1")]
        zeta: Vec<f64>,
        /// Flow duration.
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        /// Fixed integrator step.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// List the built-in fixtures.
    ListBuiltins {
        /// Machine-readable JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn seed_from_env() -> Option<u64> {
    std::env::var("COSYM_SEED").ok().and_then(|s| s.parse().ok())
}

/// Print without panicking when the pipe closes early (e.g. `| head`).
fn print_line(content: &str) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = writeln!(lock, "{content}");
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| format!("cannot write {path:?}: {e}"))?;
            print_line(&format!("report written to {}", path.display()));
            Ok(())
        }
        None => {
            print_line(content);
            Ok(())
        }
    }
}

fn finish(output: RunOutput, common: &CommonOpts, csv_path: Option<&Path>) -> Result<bool, String> {
    write_or_print(&common.out, &output.json)?;
    if let Some(csv) = &output.csv {
        let path = match (csv_path, &common.out) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(out)) => Some(out.with_extension("csv")),
            (None, None) => None,
        };
        if let Some(path) = path {
            std::fs::write(&path, csv).map_err(|e| format!("cannot write {path:?}: {e}"))?;
            print_line(&format!("trajectory written to {}", path.display()));
        }
    }
    Ok(output.pass)
}

fn load_scenario(path: &Path, seed_override: Option<u64>) -> Result<RunOutput, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    scenario::run_scenario(&text, seed_override).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool, String> {
    let env_seed = seed_from_env();
    match cli.command {
        Command::Verify {
            builtin,
            scenario: scenario_path,
            common,
        } => {
            let output = match (builtin, scenario_path) {
                (Some(name), None) => {
                    let plan = SamplePlan::new(common.samples, env_seed.unwrap_or(common.seed));
                    scenario::run_verify_builtin(&name, &plan, &Tolerances::default())
                        .map_err(|e| e.to_string())?
                }
                (None, Some(path)) => load_scenario(&path, env_seed)?,
                _ => return Err("verify needs exactly one of --builtin or --scenario".into()),
            };
            finish(output, &common, None)
        }
        Command::Reduce {
            builtin,
            scenario: scenario_path,
            common,
        } => {
            let output = match (builtin, scenario_path) {
                (Some(name), None) => {
                    let plan = SamplePlan::new(common.samples, env_seed.unwrap_or(common.seed));
                    scenario::run_reduce_builtin(&name, &plan, &Tolerances::default())
                        .map_err(|e| e.to_string())?
                }
                (None, Some(path)) => load_scenario(&path, env_seed)?,
                _ => return Err("reduce needs exactly one of --builtin or --scenario".into()),
            };
            finish(output, &common, None)
        }
        Command::Flow {
            builtin,
            start,
            t,
            h,
            csv,
            common,
        } => {
            let output =
                scenario::run_flow(&builtin, start, t, h).map_err(|e| e.to_string())?;
            finish(output, &common, csv.as_deref())
        }
        Command::Commute {
            direction,
            grid,
            common,
        } => {
            let output = scenario::run_commute(&direction, grid, 1e-6)
                .map_err(|e| e.to_string())?;
            finish(output, &common, None)
        }
        Command::RigidBody {
            inertia,
            zeta,
            t,
            h,
            csv,
            common,
        } => {
            if inertia.len() != 3 || zeta.len() != 3 {
                return Err("--M and --zeta need exactly three components".into());
            }
            if inertia.iter().any(|m| *m <= 0.0) {
                return Err("inertia coefficients must be positive".into());
            }
            let output = scenario::run_rigid_body(
                [inertia[0], inertia[1], inertia[2]],
                [zeta[0], zeta[1], zeta[2]],
                t,
                h,
            )
            .map_err(|e| e.to_string())?;
            finish(output, &common, csv.as_deref())
        }
        Command::ListBuiltins { json } => {
            let entries = scenario::catalog();
            if json {
                print_line(&cosym_core::report::to_json_17(&entries));
            } else {
                for e in &entries {
                    print_line(&format!(
                        "{:<24} {:<8} {:<14} {}",
                        e.name,
                        e.kind,
                        if e.expect_pass { "passes" } else { "fails-by-design" },
                        e.description
                    ));
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version are not errors
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::from(0);
                }
                _ => {
                    eprint!("{e}");
                    return ExitCode::from(1);
                }
            }
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
