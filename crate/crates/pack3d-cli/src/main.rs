//! Command-line surface: solve, verify, oracle, bench and gen.

mod backend;
mod bench;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pack3d::absolute::{rotation_5approx, solve_absolute_bp, solve_absolute_sp, AbsParams};
use pack3d::asymptotic::{parse_container_plan, solve_asymptotic_bp, ContainerSource};
use pack3d::error::Error;
use pack3d::gen::{generate_instance, Family};
use pack3d::geometry::{verify_packing, Packing};
use pack3d::io::{instance_to_json, packing_to_json, parse_instance, parse_packing, Instance};
use pack3d::mvbb::{solve_mvbb, MvbbMode, MvbbParams};
use pack3d::oracle::{oracle_opt_bins, OracleLimits};
use pack3d::rational::{parse_rational, rat, Rat};
use pack3d::subroutines::{licheng_strip, volume_bin_pack, LichengMode};

use backend::backend_from_flags;
use report::{mvbb_report, packing_report, write_json};

#[derive(Parser)]
#[command(name = "pack3d", version, about = "3D packing solvers with an exact verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BackendFlags {
    /// Strip-packing backend: "licheng" or "external".
    #[arg(long, default_value = "licheng")]
    backend: String,
    /// Command run for the external backend (instance JSON on stdin,
    /// strip packing JSON on stdout).
    #[arg(long)]
    backend_cmd: Option<String>,
    /// Declared multiplicative guarantee of the external backend.
    #[arg(long, default_value = "3/2")]
    backend_mult: String,
    /// Declared additive constant of the external backend.
    #[arg(long, default_value = "1")]
    backend_add: String,
    /// Declared h_max coefficient of the external backend.
    #[arg(long, default_value = "60")]
    backend_hmax_coeff: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solves an instance with the chosen algorithm.
    Solve {
        /// One of: volume, licheng, licheng-halfthin, absolute,
        /// absolute-sp, asymptotic, rotation, mvbb, mvbb-absolute.
        #[arg(long)]
        algo: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Accuracy parameter (rational, e.g. "1/6").
        #[arg(long, default_value = "1/40")]
        epsilon: String,
        /// Cap on guessed OPT for the absolute pipelines.
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        /// Allow axis-permutation rotations where the algorithm supports
        /// them (the rotation algorithm always does).
        #[arg(long, default_value_t = false)]
        rotations: bool,
        /// Container-packing descriptor for `--algo asymptotic`.
        #[arg(long)]
        containers: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendFlags,
    },
    /// Re-checks a packing file against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        packing: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact optimum for tiny instances.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[arg(long, default_value_t = 8)]
        max_bins: usize,
        #[arg(long, default_value_t = false)]
        rotations: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generates a seeded instance.
    Gen {
        #[arg(long, default_value = "uniform")]
        family: String,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        denominator: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs algorithms over seeded instance families and emits CSV.
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Solve {
            algo,
            input,
            output,
            report,
            epsilon,
            k_max,
            rotations,
            containers,
            backend,
        } => solve(
            &algo, &input, output, report, &epsilon, k_max, rotations, containers, &backend,
        ),
        Command::Verify { input, packing, report } => verify(&input, &packing, report),
        Command::Oracle { input, cap, max_bins, rotations, output } => {
            oracle(&input, cap, max_bins, rotations, output)
        }
        Command::Gen { family, n, seed, denominator, output } => {
            let family = Family::from_str_name(&family)?;
            let items = generate_instance(family, n, seed, denominator);
            let table = pack3d::geometry::ItemTable::new(items)?;
            let json = instance_to_json(&pack3d::geometry::BinSpec::unit(), &table);
            write_json(output.as_deref(), &serde_json::to_value(&json)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => bench::run_bench(&args),
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    algo: &str,
    input: &PathBuf,
    output: Option<PathBuf>,
    report_path: Option<PathBuf>,
    epsilon: &str,
    k_max: usize,
    rotations: bool,
    containers: Option<PathBuf>,
    backend_flags: &BackendFlags,
) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(input)?;
    let Instance { bin: _, items } = parse_instance(&text)?;
    let eps: Rat = parse_rational(epsilon)?;
    let backend = backend_from_flags(backend_flags)?;

    let params = default_abs_params(&eps, k_max);
    let item_vec = items.items().to_vec();
    let (packing, extra): (Packing, serde_json::Value) = match algo {
        "volume" => {
            let cut = volume_bin_pack(&item_vec)?;
            (cut.bins, serde_json::json!({"sliced_planes": cut.sliced_item_sets.len()}))
        }
        "licheng" => {
            let strip = licheng_strip(&item_vec, LichengMode::General)?;
            (strip, serde_json::json!({}))
        }
        "licheng-halfthin" => {
            let strip = licheng_strip(&item_vec, LichengMode::HalfThin)?;
            (strip, serde_json::json!({}))
        }
        "absolute" => {
            let res = solve_absolute_bp(&item_vec, &params, backend.as_ref())?;
            let bound = report::bound_json(&res.bound);
            (res.packing, serde_json::json!({"bound": bound}))
        }
        "absolute-sp" => {
            let res = solve_absolute_sp(&item_vec, &params, backend.as_ref())?;
            let bound = report::bound_json(&res.bound);
            let height = report::rat_json(&res.height);
            (
                res.strip,
                serde_json::json!({"bound": bound, "height": height, "guesses": res.guesses_tried}),
            )
        }
        "asymptotic" => {
            let source = match containers {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    ContainerSource::Explicit(parse_container_plan(&text)?)
                }
                None => ContainerSource::Heuristic,
            };
            let res = solve_asymptotic_bp(&item_vec, &eps, &source)?;
            let accounting = report::asymptotic_json(&res.report);
            (res.packing, serde_json::json!({"accounting": accounting}))
        }
        "rotation" => {
            let res = rotation_5approx(&item_vec, &params)?;
            let bound = report::bound_json(&res.bound);
            (res.packing, serde_json::json!({"bound": bound}))
        }
        "mvbb" | "mvbb-absolute" => {
            let mode = if algo == "mvbb" { MvbbMode::Aptas } else { MvbbMode::Absolute3 };
            let mp = MvbbParams { epsilon: eps.clone(), mode, delta: None };
            let res = solve_mvbb(&item_vec, &mp, backend.as_ref())?;
            let extra = mvbb_report(&res);
            (res.packing, extra)
        }
        other => {
            return Err(Error::Parse(format!("unknown algorithm {other:?}")));
        }
    };
    let _ = rotations;

    let verification = verify_packing(&packing, &items)?;
    let report = packing_report(algo, &packing, &items, &verification, extra);
    write_json(report_path.as_deref(), &report)?;
    if let Some(path) = output {
        let json = packing_to_json(&packing);
        std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
    }
    if verification.feasible {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn verify(
    input: &PathBuf,
    packing_path: &PathBuf,
    report_path: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(input)?;
    let Instance { bin, items } = parse_instance(&text)?;
    let packing_text = std::fs::read_to_string(packing_path)?;
    let packing = parse_packing(&packing_text, &bin)?;
    let verification = verify_packing(&packing, &items)?;
    let report = packing_report("verify", &packing, &items, &verification, serde_json::json!({}));
    write_json(report_path.as_deref(), &report)?;
    if verification.feasible {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn oracle(
    input: &PathBuf,
    cap: usize,
    max_bins: usize,
    rotations: bool,
    output: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(input)?;
    let Instance { bin, items } = parse_instance(&text)?;
    let limits = OracleLimits { max_items: cap, ..Default::default() };
    let found = oracle_opt_bins(items.items(), &bin, max_bins, rotations, &limits)?;
    match found {
        Some((opt, witness)) => {
            println!("{}", serde_json::json!({"opt": opt}));
            if let Some(path) = output {
                let json = packing_to_json(&witness);
                std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            eprintln!("no packing within {max_bins} bins");
            Ok(ExitCode::from(1))
        }
    }
}

/// Shared absolute-parameter defaults live here so bench and solve agree.
pub(crate) fn default_abs_params(eps: &Rat, k_max: usize) -> AbsParams {
    AbsParams {
        k_max,
        epsilon: eps.clone(),
        delta: rat(1, 40_000),
        ..AbsParams::default()
    }
}
