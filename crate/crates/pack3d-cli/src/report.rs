//! JSON report assembly. Rationals are emitted exactly, with float
//! approximations alongside flagged as approximate.

use std::path::Path;

use serde_json::{json, Value};

use pack3d::absolute::BoundDescriptor;
use pack3d::asymptotic::AsymptoticReport;
use pack3d::error::Result;
use pack3d::geometry::{ItemTable, Packing, VerifyReport};
use pack3d::mvbb::MvbbResult;
use pack3d::rational::{approx_f64, format_rational, Rat};

pub fn rat_json(v: &Rat) -> Value {
    json!({ "exact": format_rational(v), "approx": approx_f64(v) })
}

pub fn bound_json(bound: &BoundDescriptor) -> Value {
    json!({
        "backend": bound.backend,
        "case": bound.case,
        "k_accepted": bound.k_accepted,
        "bin_bound": bound.bin_bound,
        "fallback": bound.fallback,
        "notes": bound.notes,
    })
}

pub fn asymptotic_json(report: &AsymptoticReport) -> Value {
    json!({
        "n": report.n,
        "epsilon": rat_json(&report.epsilon),
        "delta": rat_json(&report.delta),
        "mu": rat_json(&report.mu),
        "slice_height": rat_json(&report.slice_height),
        "slice_count": report.slice_count,
        "lp_objective": report.lp_objective.as_ref().map(rat_json),
        "config_count": report.config_count,
        "config_height_total": report.config_height_total,
        "tall_not_sliced": report.tall_not_sliced,
        "overflow_volume": rat_json(&report.overflow_volume),
        "overflow_bound": rat_json(&report.overflow_bound),
        "fractional_big_items": report.fractional_big_items,
        "intermediate_volume": rat_json(&report.intermediate_volume),
        "extension_total": rat_json(&report.extension_total),
        "bins_from_configs": report.bins_from_configs,
        "bins_extra": report.bins_extra,
        "bins_total": report.bins_total,
    })
}

pub fn mvbb_report(result: &MvbbResult) -> Value {
    json!({
        "box": {
            "w": rat_json(&result.box_dims.0),
            "d": rat_json(&result.box_dims.1),
            "h": rat_json(&result.box_dims.2),
        },
        "volume": rat_json(&result.volume),
        "lower_bound": rat_json(&result.lower_bound),
        "guesses": result.guesses_evaluated,
        "certified_ratio": result.certified,
        "analysis_case": result.analysis_case,
    })
}

pub fn packing_report(
    algo: &str,
    packing: &Packing,
    items: &ItemTable,
    verification: &VerifyReport,
    extra: Value,
) -> Value {
    let mut report = json!({
        "algo": algo,
        "feasible": verification.feasible,
        "used_bins": verification.used_bins,
        "strip_height": verification.strip_height.as_ref().map(rat_json),
        "total_volume": rat_json(&verification.total_volume),
        "placements": packing.placements.len(),
        "items": items.len(),
        "violations": verification.violations.len(),
    });
    if let Value::Object(extra) = extra {
        if let Value::Object(base) = &mut report {
            for (k, v) in extra {
                base.insert(k, v);
            }
        }
    }
    report
}

pub fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}
