//! Seeded benchmark runner emitting one CSV row per (instance, algorithm).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Args;
use rand_like::DeterministicPicker;

use pack3d::absolute::{rotation_5approx, solve_absolute_bp, solve_absolute_sp};
use pack3d::asymptotic::{solve_asymptotic_bp, ContainerSource};
use pack3d::error::{Error, Result};
use pack3d::gen::{generate_instance, Family};
use pack3d::geometry::{verify_packing, BinSpec, Item, ItemTable};
use pack3d::io::parse_instance;
use pack3d::mvbb::{solve_mvbb, MvbbMode, MvbbParams};
use pack3d::oracle::{oracle_opt_bins, OracleLimits};
use pack3d::rational::{format_rational, parse_rational, rint, Rat};
use pack3d::subroutines::{licheng_strip, volume_bin_pack, LichengBackend, LichengMode};

/// Tiny deterministic value picker so bench stays reproducible without
/// threading a full RNG around.
mod rand_like {
    pub struct DeterministicPicker(u64);

    impl DeterministicPicker {
        pub fn new(seed: u64) -> Self {
            DeterministicPicker(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1))
        }

        pub fn pick(&mut self, lo: usize, hi: usize) -> usize {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            lo + ((self.0 >> 33) as usize) % (hi - lo + 1)
        }
    }
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated families: uniform, cube-heavy, thin-heavy.
    #[arg(long, default_value = "uniform")]
    pub families: String,
    /// Instances per family.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Maximum item count per generated instance.
    #[arg(long, default_value_t = 8)]
    pub max_items: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated algorithms to run.
    #[arg(long, default_value = "volume,licheng,rotation")]
    pub algos: String,
    /// Oracle column is filled only for instances up to this size.
    #[arg(long, default_value_t = 6)]
    pub oracle_cap: usize,
    /// Read instances from a directory instead of generating them.
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Measure wall-clock time; off by default so reruns with the same
    /// seed are byte-identical.
    #[arg(long, default_value_t = false)]
    pub timing: bool,
    #[arg(long, default_value = "1/40")]
    pub epsilon: String,
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    #[arg(long, default_value_t = 64)]
    pub denominator: i64,
}

pub fn run_bench(args: &BenchArgs) -> std::result::Result<ExitCode, Error> {
    let eps: Rat = parse_rational(&args.epsilon)?;
    let algos: Vec<&str> = args.algos.split(',').map(|s| s.trim()).collect();

    let mut instances: Vec<(String, Vec<Item>)> = Vec::new();
    if let Some(dir) = &args.input_dir {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
            .collect();
        paths.sort();
        for path in paths {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "instance".into());
            let text = std::fs::read_to_string(&path)?;
            let inst = parse_instance(&text)?;
            instances.push((name, inst.items.items().to_vec()));
        }
    } else {
        for family_name in args.families.split(',') {
            let family = Family::from_str_name(family_name.trim())?;
            for i in 0..args.count {
                let seed = args
                    .seed
                    .wrapping_add(family_index(family) as u64 * 100_000)
                    .wrapping_add(i as u64);
                let mut picker = DeterministicPicker::new(seed);
                let n = picker.pick(1, args.max_items.max(1));
                let items = generate_instance(family, n, seed, args.denominator);
                instances.push((format!("{}-{seed:05}", family.as_str()), items));
            }
        }
    }

    let limits = OracleLimits::default();
    let mut rows: Vec<String> = Vec::new();
    for (name, items) in &instances {
        let volume = pack3d::geometry::total_volume(items.iter());
        let oracle_opt = if items.len() <= args.oracle_cap.min(limits.max_items) {
            oracle_opt_bins(items, &BinSpec::unit(), 8, false, &limits)?.map(|(opt, _)| opt)
        } else {
            None
        };
        for algo in &algos {
            let start = Instant::now();
            let outcome = run_algo(algo, items, &eps, args.k_max)?;
            let runtime_ms = if args.timing { start.elapsed().as_millis() as u64 } else { 0 };
            let (result, bins_numeric) = outcome;
            let ratio = match (oracle_opt, bins_numeric) {
                (Some(opt), Some(bins)) if opt > 0 => {
                    format_rational(&(rint(bins as i64) / rint(opt as i64)))
                }
                _ => String::new(),
            };
            let oracle_cell = oracle_opt.map(|o| o.to_string()).unwrap_or_default();
            rows.push(format!(
                "{name},{algo},{result},{lb},{oracle_cell},{ratio},{runtime_ms}",
                lb = format_rational(&volume)
            ));
        }
    }
    rows.sort();

    let mut csv = String::from("instance,algo,result,volume_lb,oracle_opt,ratio,runtime_ms\n");
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    match &args.output {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn family_index(family: Family) -> usize {
    Family::ALL.iter().position(|f| *f == family).expect("known family")
}

/// Runs one algorithm, verifies the packing, and returns the result cell
/// plus the bin count when the result is a bin packing.
fn run_algo(
    algo: &str,
    items: &[Item],
    eps: &Rat,
    k_max: usize,
) -> Result<(String, Option<usize>)> {
    let table = ItemTable::new(items.to_vec())?;
    let check = |p: &pack3d::geometry::Packing| -> Result<()> {
        let report = verify_packing(p, &table)?;
        if !report.feasible {
            return Err(Error::Infeasible(format!(
                "bench: {algo} produced an infeasible packing"
            )));
        }
        Ok(())
    };
    let params = crate::default_abs_params(eps, k_max);
    match algo {
        "volume" => {
            let cut = volume_bin_pack(items)?;
            check(&cut.bins)?;
            let bins = cut.bins.used_bins();
            Ok((bins.to_string(), Some(bins)))
        }
        "licheng" => {
            let strip = licheng_strip(items, LichengMode::General)?;
            check(&strip)?;
            let report = verify_packing(&strip, &table)?;
            let height = report.strip_height.unwrap_or_else(|| rint(0));
            Ok((format_rational(&height), None))
        }
        "absolute" => {
            let res = solve_absolute_bp(items, &params, &LichengBackend)?;
            check(&res.packing)?;
            let bins = res.packing.used_bins();
            Ok((bins.to_string(), Some(bins)))
        }
        "absolute-sp" => {
            let res = solve_absolute_sp(items, &params, &LichengBackend)?;
            check(&res.strip)?;
            Ok((format_rational(&res.height), None))
        }
        "asymptotic" => {
            let asym_eps = if eps > &pack3d::rational::rat(1, 4) {
                pack3d::rational::rat(1, 4)
            } else {
                eps.clone()
            };
            let res = solve_asymptotic_bp(items, &asym_eps, &ContainerSource::Heuristic)?;
            check(&res.packing)?;
            let bins = res.packing.used_bins();
            Ok((bins.to_string(), Some(bins)))
        }
        "rotation" => {
            let res = rotation_5approx(items, &params)?;
            check(&res.packing)?;
            let bins = res.packing.used_bins();
            Ok((bins.to_string(), Some(bins)))
        }
        "mvbb" => {
            let mp = MvbbParams { epsilon: eps.clone(), mode: MvbbMode::Aptas, delta: None };
            let res = solve_mvbb(items, &mp, &LichengBackend)?;
            check(&res.packing)?;
            Ok((format_rational(&res.volume), None))
        }
        other => Err(Error::Parse(format!("unknown bench algorithm {other:?}"))),
    }
}
