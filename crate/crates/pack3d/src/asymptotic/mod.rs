//! Asymptotic bin-packing pipeline.
//!
//! Heights are harmonically rounded and sliced into a 2D instance; a
//! container packing over explicit configurations covers the sliced demand
//! (from a pluggable source: a supplied descriptor or the built-in greedy
//! generator, which makes no ratio promise); items are placed into the
//! lifted 3D containers so that no tall item crosses an integer plane, and
//! the configuration strips are finally cut into unit bins with the sliced
//! shorts grouped `1/eps` planes per extra bin.

mod config_lp;
mod placement;

pub use config_lp::{
    config_lp_solve, simplex_solve, Cmp, ConfigVector, Configuration2D, Container2D,
    ContainerKind, Demands, LpOutcome, LpProblem, LpSolution, TypeSpaces,
};
pub use placement::{
    assign_big_lp, place_thin_containers, place_tiny_containers, stack_big, BigAssignment,
    BigItem, FaceContainer, StackTarget, TinyContainer,
};

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Axis, BinSpec, Item, ItemTable, Packing, Placement};
use crate::harmonic::{round_instance_heights, TailVariant};
use crate::rational::{ceil_u64, parse_rational, rat, rint, Rat};
use crate::strip_transform::{check_tall_not_sliced, cut_strip_to_bins, CutMode};
use crate::subroutines::volume_bin_pack;

/// Slicing parameters of one pipeline run.
#[derive(Debug, Clone)]
pub struct SliceParams {
    pub epsilon: Rat,
    pub n: usize,
    pub slice_height: Rat,
    pub delta: Rat,
    pub mu: Rat,
}

/// One group of identical 2D slices: `count` copies of the item's base.
#[derive(Debug, Clone)]
pub struct SliceRect {
    pub item_index: usize,
    pub w: Rat,
    pub d: Rat,
    pub count: u64,
}

impl SliceRect {
    pub fn area(&self) -> Rat {
        &self.w * &self.d * rint(self.count as i64)
    }
}

/// 2D size class of a rect under thresholds `delta` and `mu = delta^4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class2D {
    Big,
    Vertical,
    Horizontal,
    Tiny,
    Intermediate,
}

pub fn classify_rect(w: &Rat, d: &Rat, delta: &Rat, mu: &Rat) -> Class2D {
    let w_mid = w >= mu && w < delta;
    let d_mid = d >= mu && d < delta;
    if w_mid || d_mid {
        return Class2D::Intermediate;
    }
    match (w >= delta, d >= delta) {
        (true, true) => Class2D::Big,
        (false, true) => Class2D::Vertical,
        (true, false) => Class2D::Horizontal,
        (false, false) => Class2D::Tiny,
    }
}

/// Chooses `delta` from the chain `d_0 = eps, d_{j+1} = d_j^4` (each value
/// adjusted so `1/delta` is a multiple of 24) such that the rect area with
/// a side in `[delta^4, delta)` is at most `eps` times the total area.
pub fn compute_delta(rects: &[SliceRect], epsilon: &Rat) -> Result<Rat> {
    if !epsilon.is_positive() || epsilon >= &rint(1) {
        return Err(Error::Precondition("epsilon must lie in (0, 1)".into()));
    }
    if !epsilon.recip().is_integer() {
        return Err(Error::Precondition("1/epsilon must be an integer".into()));
    }
    let total_area: Rat = rects.iter().map(|r| r.area()).sum();
    let budget = epsilon * &total_area;
    let adjust = |v: &Rat| -> Rat {
        // Round 1/v up to the next multiple of 24.
        let inv = v.recip();
        let units = (inv / rint(24)).ceil();
        (units * rint(24)).recip()
    };
    let mut candidate = adjust(epsilon);
    loop {
        let delta4 = &candidate * &candidate * &candidate * &candidate;
        let band_area: Rat = rects
            .iter()
            .filter(|r| {
                let w_in = r.w >= delta4 && r.w < candidate;
                let d_in = r.d >= delta4 && r.d < candidate;
                w_in || d_in
            })
            .map(|r| r.area())
            .sum();
        if band_area <= budget {
            return Ok(candidate);
        }
        candidate = adjust(&delta4);
    }
}

/// Builds the sliced 2D instance from harmonically rounded items: each
/// item's rounded height is lifted to the next multiple of the slice
/// height and contributes that many copies of its base.
pub fn build_sliced_2d_instance(
    rounded: &[Item],
    epsilon: &Rat,
) -> Result<(Vec<SliceRect>, SliceParams)> {
    if rounded.is_empty() {
        return Err(Error::Precondition("empty instance".into()));
    }
    let v_inf = crate::geometry::total_volume(rounded.iter());
    let slice_height = epsilon * &v_inf / rint(rounded.len() as i64);
    if !slice_height.is_positive() {
        return Err(Error::Precondition("degenerate slice height".into()));
    }
    let mut rects = Vec::with_capacity(rounded.len());
    for (idx, item) in rounded.iter().enumerate() {
        let count = ceil_u64(&(&item.h / &slice_height));
        rects.push(SliceRect {
            item_index: idx,
            w: item.w.clone(),
            d: item.d.clone(),
            count: count.max(1),
        });
    }
    let delta = compute_delta(&rects, epsilon)?;
    let mu = &delta * &delta * &delta * &delta;
    Ok((
        rects,
        SliceParams {
            epsilon: epsilon.clone(),
            n: rounded.len(),
            slice_height,
            delta,
            mu,
        },
    ))
}

/// A container packing: shared type spaces, validated configurations, and
/// (for externally supplied packings) their multiplicities.
#[derive(Debug, Clone)]
pub struct ContainerPlan {
    pub spaces: TypeSpaces,
    pub configs: Vec<Configuration2D>,
    pub multiplicities: Option<Vec<Rat>>,
}

/// Where the container packing comes from.
#[derive(Debug, Clone)]
pub enum ContainerSource {
    Heuristic,
    Explicit(ContainerPlan),
}

/// Per-stage accounting of a pipeline run.
#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub n: usize,
    pub epsilon: Rat,
    pub delta: Rat,
    pub mu: Rat,
    pub slice_height: Rat,
    pub rounded_volume: Rat,
    pub slice_count: u64,
    pub lp_objective: Option<Rat>,
    pub config_count: usize,
    pub config_height_total: u64,
    pub tall_not_sliced: bool,
    pub overflow_volume: Rat,
    /// Provable cap on the overflow volume from the removal geometry:
    /// a strip of width at most `3 mu` per shelf or layer, over at most
    /// `H + 2` of stacked height per thin or tiny container.
    pub overflow_bound: Rat,
    pub fractional_big_items: usize,
    pub intermediate_volume: Rat,
    pub extension_total: Rat,
    pub bins_from_configs: usize,
    pub bins_extra: usize,
    pub bins_total: usize,
    pub routed_to_volume_packer: bool,
}

#[derive(Debug, Clone)]
pub struct AsymptoticResult {
    pub packing: Packing,
    pub report: AsymptoticReport,
}

struct ClassifiedItems {
    big: Vec<usize>,
    vertical: Vec<usize>,
    horizontal: Vec<usize>,
    tiny: Vec<usize>,
    intermediate: Vec<usize>,
}

fn classify_items(rounded: &[Item], delta: &Rat, mu: &Rat) -> ClassifiedItems {
    let mut cls = ClassifiedItems {
        big: Vec::new(),
        vertical: Vec::new(),
        horizontal: Vec::new(),
        tiny: Vec::new(),
        intermediate: Vec::new(),
    };
    for (idx, item) in rounded.iter().enumerate() {
        match classify_rect(&item.w, &item.d, delta, mu) {
            Class2D::Big => cls.big.push(idx),
            Class2D::Vertical => cls.vertical.push(idx),
            Class2D::Horizontal => cls.horizontal.push(idx),
            Class2D::Tiny => cls.tiny.push(idx),
            Class2D::Intermediate => cls.intermediate.push(idx),
        }
    }
    cls
}

fn round_up_to_grid(v: &Rat, grid: u32) -> Rat {
    if grid == 0 {
        return v.clone();
    }
    let g = rint(grid as i64);
    (v * &g).ceil() / g
}

/// Full pipeline. `epsilon` must be in `(0, 1/4]` with integer `1/epsilon`.
pub fn solve_asymptotic_bp(
    items: &[Item],
    epsilon: &Rat,
    source: &ContainerSource,
) -> Result<AsymptoticResult> {
    if !epsilon.is_positive() || epsilon > &rat(1, 4) {
        return Err(Error::Precondition("epsilon must lie in (0, 1/4]".into()));
    }
    let inv = epsilon.recip();
    if !inv.is_integer() {
        return Err(Error::Precondition("1/epsilon must be an integer".into()));
    }
    let k = inv.to_integer().to_u64().expect("1/eps fits u64");

    if items.is_empty() {
        return Ok(AsymptoticResult {
            packing: Packing::new_bins(BinSpec::unit()),
            report: AsymptoticReport {
                n: 0,
                epsilon: epsilon.clone(),
                delta: Rat::zero(),
                mu: Rat::zero(),
                slice_height: Rat::zero(),
                rounded_volume: Rat::zero(),
                slice_count: 0,
                lp_objective: None,
                config_count: 0,
                config_height_total: 0,
                tall_not_sliced: true,
                overflow_volume: Rat::zero(),
                overflow_bound: Rat::zero(),
                fractional_big_items: 0,
                intermediate_volume: Rat::zero(),
                extension_total: Rat::zero(),
                bins_from_configs: 0,
                bins_extra: 0,
                bins_total: 0,
                routed_to_volume_packer: false,
            },
        });
    }

    let rounding = round_instance_heights(items, k, TailVariant::IdentityTail)?;
    let rounded = rounding.rounded;
    let (rects, params) = build_sliced_2d_instance(&rounded, epsilon)?;
    let cls = classify_items(&rounded, &params.delta, &params.mu);

    // Assemble the plan: spaces, type assignments and demands.
    let plan = match source {
        ContainerSource::Heuristic => build_heuristic_plan(&rounded, &rects, &cls, &params)?,
        ContainerSource::Explicit(plan) => plan.clone(),
    };
    for config in &plan.configs {
        config.validate(&plan.spaces, &params.mu)?;
    }
    let assignment = assign_types(&rounded, &cls, &plan.spaces)?;
    let demands = compute_demands(&rects, &cls, &assignment, &plan.spaces);

    // Multiplicities: supplied (and checked) or from the covering LP.
    let (multiplicities, lp_objective) = match &plan.multiplicities {
        Some(x) => {
            verify_cover(&plan.configs, &plan.spaces, &demands, &params.mu, x)?;
            (x.clone(), None)
        }
        None => {
            let outcome = config_lp_solve(&plan.configs, &plan.spaces, &demands, &params.mu)?;
            let objective = outcome.objective.clone();
            (outcome.multiplicities, Some(objective))
        }
    };

    // Lift configurations with positive multiplicity to integer heights.
    let mut lifted: Vec<LiftedContainer> = Vec::new();
    let mut strips: Vec<(usize, u64)> = Vec::new(); // (config index, height)
    let mut config_height_total = 0u64;
    for (c_idx, x) in multiplicities.iter().enumerate() {
        if !x.is_positive() {
            continue;
        }
        let height = ceil_u64(&(x * &params.slice_height)).max(1);
        config_height_total += height;
        let strip_idx = strips.len();
        strips.push((c_idx, height));
        for container in plan.configs[c_idx].containers.iter() {
            lifted.push(LiftedContainer {
                strip: strip_idx,
                kind: container.kind.clone(),
                x: container.x.clone(),
                y: container.y.clone(),
                w: container.w.clone(),
                d: container.d.clone(),
                height,
            });
        }
    }

    let overflow_bound: Rat = lifted
        .iter()
        .map(|c| {
            let span = rint(c.height as i64 + 2);
            let three_mu = rint(3) * &params.mu;
            match c.kind {
                ContainerKind::Vertical(_) => &three_mu * &c.d * &span,
                ContainerKind::Horizontal(_) => &three_mu * &c.w * &span,
                ContainerKind::Tiny => {
                    three_mu * (&c.w + &c.d + rint(2) * &params.mu) * &span
                }
                ContainerKind::Big(_) => Rat::zero(),
            }
        })
        .sum();
    let mut overflow_idx: Vec<usize> = Vec::new();
    let mut fractional_idx: Vec<usize> = Vec::new();
    let mut extension_total = Rat::zero();
    let mut strip_placements: Vec<Vec<Placement>> = vec![Vec::new(); strips.len()];

    // Big items.
    let fractional_big_items = {
        let big_specs: Vec<BigItem> = cls
            .big
            .iter()
            .map(|&i| BigItem {
                id: rounded[i].id.clone(),
                height: rounded[i].h.clone(),
                admissible: vec![assignment.big_type[&i]],
            })
            .collect();
        let capacities: Vec<Rat> = demands
            .big_counts
            .iter()
            .map(|c| c * &params.slice_height)
            .collect();
        let assigned = assign_big_lp(&big_specs, &capacities)?;
        for &f in &assigned.fractional {
            fractional_idx.push(cls.big[f]);
        }
        for t in 0..plan.spaces.big.len() {
            let members: Vec<Item> = cls
                .big
                .iter()
                .enumerate()
                .filter(|(pos, _)| assigned.type_of_item.get(*pos) == Some(&Some(t)))
                .map(|(_, &i)| rounded[i].clone())
                .collect();
            if members.is_empty() {
                continue;
            }
            let targets: Vec<StackTarget> = lifted
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kind == ContainerKind::Big(t))
                .map(|(idx, c)| StackTarget { container: idx, height: c.height })
                .collect();
            let res = stack_big(&members, &targets, epsilon)?;
            for e in &res.extensions {
                extension_total += e;
            }
            for p in res.placements {
                let c = &lifted[p.container];
                strip_placements[c.strip].push(Placement::new(
                    p.id,
                    0,
                    c.x.clone(),
                    c.y.clone(),
                    p.z,
                ));
            }
        }
        assigned.fractional.len()
    };

    // Vertical items per rounded depth.
    for (d_idx, _) in plan.spaces.depths.iter().enumerate() {
        let members: Vec<usize> = cls
            .vertical
            .iter()
            .copied()
            .filter(|i| assignment.depth_type[i] == d_idx)
            .collect();
        if members.is_empty() {
            continue;
        }
        let faces: Vec<(String, Rat, Rat)> = members
            .iter()
            .map(|&i| (rounded[i].id.clone(), rounded[i].w.clone(), rounded[i].h.clone()))
            .collect();
        let containers: Vec<FaceContainer> = lifted
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ContainerKind::Vertical(d_idx))
            .map(|(idx, c)| FaceContainer { container: idx, width: c.w.clone(), height: c.height })
            .collect();
        let res = place_thin_containers(&faces, &containers, &params.mu, epsilon)?;
        for e in &res.extensions {
            extension_total += e;
        }
        for id in &res.overflow {
            overflow_idx.push(index_of(&rounded, id));
        }
        for p in res.placements {
            let c = &lifted[p.container];
            strip_placements[c.strip].push(Placement::new(
                p.id,
                0,
                &c.x + &p.x,
                c.y.clone(),
                p.z,
            ));
        }
    }

    // Horizontal items per rounded width: the frame is rotated 90 degrees
    // about z, so faces use depths and run along the container's y side.
    for (w_idx, _) in plan.spaces.widths.iter().enumerate() {
        let members: Vec<usize> = cls
            .horizontal
            .iter()
            .copied()
            .filter(|i| assignment.width_type[i] == w_idx)
            .collect();
        if members.is_empty() {
            continue;
        }
        let faces: Vec<(String, Rat, Rat)> = members
            .iter()
            .map(|&i| (rounded[i].id.clone(), rounded[i].d.clone(), rounded[i].h.clone()))
            .collect();
        let containers: Vec<FaceContainer> = lifted
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ContainerKind::Horizontal(w_idx))
            .map(|(idx, c)| FaceContainer { container: idx, width: c.d.clone(), height: c.height })
            .collect();
        let res = place_thin_containers(&faces, &containers, &params.mu, epsilon)?;
        for e in &res.extensions {
            extension_total += e;
        }
        for id in &res.overflow {
            overflow_idx.push(index_of(&rounded, id));
        }
        for p in res.placements {
            let c = &lifted[p.container];
            strip_placements[c.strip].push(Placement::new(
                p.id,
                0,
                c.x.clone(),
                &c.y + &p.x,
                p.z,
            ));
        }
    }

    // Tiny items.
    {
        let members: Vec<Item> = cls.tiny.iter().map(|&i| rounded[i].clone()).collect();
        if !members.is_empty() {
            let containers: Vec<TinyContainer> = lifted
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kind == ContainerKind::Tiny)
                .map(|(idx, c)| TinyContainer {
                    container: idx,
                    w: c.w.clone(),
                    d: c.d.clone(),
                    height: c.height,
                })
                .collect();
            let res = place_tiny_containers(&members, &containers, &params.mu, epsilon)?;
            for e in &res.extensions {
                extension_total += e;
            }
            for id in &res.overflow {
                overflow_idx.push(index_of(&rounded, id));
            }
            for p in res.placements {
                let c = &lifted[p.container];
                strip_placements[c.strip].push(Placement::new(
                    p.id,
                    0,
                    &c.x + &p.x,
                    &c.y + &p.y,
                    p.z,
                ));
            }
        }
    }

    // Check the tall-not-sliced property and cut every configuration strip.
    let rounded_table = ItemTable::new(rounded.clone())?;
    let mut packing = Packing::new_bins(BinSpec::unit());
    let mut offset = 0usize;
    let mut tall_ok = true;
    let mut bins_from_configs = 0usize;
    for placements in strip_placements {
        if placements.is_empty() {
            continue;
        }
        let mut strip = Packing::new_strip(BinSpec::unit(), Axis::Z);
        strip.placements = placements;
        let (ok, _) = check_tall_not_sliced(&strip, &rounded_table, epsilon)?;
        tall_ok &= ok;
        let cut = cut_strip_to_bins(&strip, &rounded_table, CutMode::EpsilonLayers(epsilon.clone()))?;
        let used = cut.bins.used_bins();
        for mut p in cut.bins.placements {
            p.bin += offset;
            packing.push(p);
        }
        offset += used;
        bins_from_configs += used;
    }

    // Leftovers: overflows, fractional bigs, intermediates.
    let overflow_volume = crate::geometry::total_volume(overflow_idx.iter().map(|&i| &rounded[i]));
    let intermediate_volume =
        crate::geometry::total_volume(cls.intermediate.iter().map(|&i| &rounded[i]));
    let mut extras: Vec<usize> = Vec::new();
    extras.extend(&overflow_idx);
    extras.extend(&fractional_idx);
    extras.extend(&cls.intermediate);
    extras.sort_unstable();
    extras.dedup();
    let extra_items: Vec<Item> = extras.iter().map(|&i| rounded[i].clone()).collect();
    let bins_extra = if extra_items.is_empty() {
        0
    } else {
        let cut = volume_bin_pack(&extra_items)?;
        let used = cut.bins.used_bins();
        for mut p in cut.bins.placements {
            p.bin += offset;
            packing.push(p);
        }
        used
    };
    packing.compact_bins();

    let report = AsymptoticReport {
        n: items.len(),
        epsilon: epsilon.clone(),
        delta: params.delta.clone(),
        mu: params.mu.clone(),
        slice_height: params.slice_height.clone(),
        rounded_volume: crate::geometry::total_volume(rounded.iter()),
        slice_count: rects.iter().map(|r| r.count).sum(),
        lp_objective,
        config_count: strips.len(),
        config_height_total,
        tall_not_sliced: tall_ok,
        overflow_volume,
        overflow_bound,
        fractional_big_items,
        intermediate_volume,
        extension_total,
        bins_from_configs,
        bins_extra,
        bins_total: packing.used_bins(),
        routed_to_volume_packer: false,
    };
    Ok(AsymptoticResult { packing, report })
}

#[derive(Debug, Clone)]
struct LiftedContainer {
    strip: usize,
    kind: ContainerKind,
    x: Rat,
    y: Rat,
    w: Rat,
    d: Rat,
    height: u64,
}

fn index_of(rounded: &[Item], id: &str) -> usize {
    rounded
        .iter()
        .position(|i| i.id == id)
        .expect("placement id refers to a known item")
}

struct TypeAssignment {
    big_type: HashMap<usize, usize>,
    width_type: HashMap<usize, usize>,
    depth_type: HashMap<usize, usize>,
}

/// Maps each classified item to the smallest covering type in the spaces.
fn assign_types(
    rounded: &[Item],
    cls: &ClassifiedItems,
    spaces: &TypeSpaces,
) -> Result<TypeAssignment> {
    let mut big_type = HashMap::new();
    for &i in &cls.big {
        let item = &rounded[i];
        let best = spaces
            .big
            .iter()
            .enumerate()
            .filter(|(_, (w, d))| w >= &item.w && d >= &item.d)
            .min_by(|(_, (w1, d1)), (_, (w2, d2))| (w1 * d1).cmp(&(w2 * d2)));
        match best {
            Some((t, _)) => {
                big_type.insert(i, t);
            }
            None => {
                return Err(Error::Precondition(format!(
                    "no big type covers item {:?}",
                    item.id
                )))
            }
        }
    }
    let mut width_type = HashMap::new();
    for &i in &cls.horizontal {
        let item = &rounded[i];
        let best = spaces
            .widths
            .iter()
            .enumerate()
            .filter(|(_, w)| w >= &&item.w)
            .min_by(|(_, a), (_, b)| a.cmp(b));
        match best {
            Some((t, _)) => {
                width_type.insert(i, t);
            }
            None => {
                return Err(Error::Precondition(format!(
                    "no width type covers item {:?}",
                    item.id
                )))
            }
        }
    }
    let mut depth_type = HashMap::new();
    for &i in &cls.vertical {
        let item = &rounded[i];
        let best = spaces
            .depths
            .iter()
            .enumerate()
            .filter(|(_, d)| d >= &&item.d)
            .min_by(|(_, a), (_, b)| a.cmp(b));
        match best {
            Some((t, _)) => {
                depth_type.insert(i, t);
            }
            None => {
                return Err(Error::Precondition(format!(
                    "no depth type covers item {:?}",
                    item.id
                )))
            }
        }
    }
    Ok(TypeAssignment { big_type, width_type, depth_type })
}

fn compute_demands(
    rects: &[SliceRect],
    cls: &ClassifiedItems,
    assignment: &TypeAssignment,
    spaces: &TypeSpaces,
) -> Demands {
    let mut demands = Demands {
        big_counts: vec![Rat::zero(); spaces.big.len()],
        vertical_widths: vec![Rat::zero(); spaces.depths.len()],
        horizontal_depths: vec![Rat::zero(); spaces.widths.len()],
        tiny_area: Rat::zero(),
    };
    let count_of = |i: usize| -> Rat {
        rint(rects.iter().find(|r| r.item_index == i).map(|r| r.count).unwrap_or(0) as i64)
    };
    for &i in &cls.big {
        demands.big_counts[assignment.big_type[&i]] += count_of(i);
    }
    for &i in &cls.vertical {
        let r = rects.iter().find(|r| r.item_index == i).expect("rect");
        demands.vertical_widths[assignment.depth_type[&i]] += &r.w * rint(r.count as i64);
    }
    for &i in &cls.horizontal {
        let r = rects.iter().find(|r| r.item_index == i).expect("rect");
        demands.horizontal_depths[assignment.width_type[&i]] += &r.d * rint(r.count as i64);
    }
    for &i in &cls.tiny {
        let r = rects.iter().find(|r| r.item_index == i).expect("rect");
        demands.tiny_area += &r.w * &r.d * rint(r.count as i64);
    }
    demands
}

fn verify_cover(
    configs: &[Configuration2D],
    spaces: &TypeSpaces,
    demands: &Demands,
    mu: &Rat,
    multiplicities: &[Rat],
) -> Result<()> {
    if multiplicities.len() != configs.len() {
        return Err(Error::Precondition(
            "multiplicity count does not match the configuration count".into(),
        ));
    }
    let vectors: Vec<ConfigVector> = configs.iter().map(|c| c.vector(spaces, mu)).collect();
    let dot = |f: &dyn Fn(&ConfigVector) -> Rat| -> Rat {
        vectors
            .iter()
            .zip(multiplicities)
            .map(|(v, x)| f(v) * x)
            .sum()
    };
    for (t, demand) in demands.big_counts.iter().enumerate() {
        let have = dot(&|v| rint(v.big_counts[t] as i64));
        if &have < demand {
            return Err(Error::Infeasible(format!(
                "descriptor covers {have} of {demand} big slices for type {t}"
            )));
        }
    }
    for (d, demand) in demands.vertical_widths.iter().enumerate() {
        let have = dot(&|v| rint(v.vertical_width_units[d] as i64) * mu);
        if &have < demand {
            return Err(Error::Infeasible(format!(
                "descriptor covers vertical width {have} of {demand} for depth {d}"
            )));
        }
    }
    for (w, demand) in demands.horizontal_depths.iter().enumerate() {
        let have = dot(&|v| rint(v.horizontal_depth_units[w] as i64) * mu);
        if &have < demand {
            return Err(Error::Infeasible(format!(
                "descriptor covers horizontal depth {have} of {demand} for width {w}"
            )));
        }
    }
    let mu2 = mu * mu;
    let have = dot(&|v| rint(v.tiny_area_units as i64) * &mu2);
    if have < demands.tiny_area {
        return Err(Error::Infeasible(format!(
            "descriptor covers tiny area {have} of {}",
            demands.tiny_area
        )));
    }
    Ok(())
}

/// Builds spaces and a configuration set from the instance itself: rounded
/// type grids sized to keep the LP small, per-family full-bin layouts that
/// guarantee feasibility, and greedy demand-shaped mixed layouts. No ratio
/// promise is made for this generator.
fn build_heuristic_plan(
    rounded: &[Item],
    rects: &[SliceRect],
    cls: &ClassifiedItems,
    params: &SliceParams,
) -> Result<ContainerPlan> {
    let mu = &params.mu;

    // Big type space: exact sizes while small, else the coarsest grid that
    // stays under the cap.
    let big_sizes: Vec<(Rat, Rat)> = cls
        .big
        .iter()
        .map(|&i| (rounded[i].w.clone(), rounded[i].d.clone()))
        .collect();
    let big_types = {
        let mut chosen: Option<Vec<(Rat, Rat)>> = None;
        for grid in [0u32, 24, 12, 8, 6, 4, 3, 2, 1] {
            let mut types: Vec<(Rat, Rat)> = big_sizes
                .iter()
                .map(|(w, d)| (round_up_to_grid(w, grid), round_up_to_grid(d, grid)))
                .collect();
            types.sort();
            types.dedup();
            if types.len() <= 36 {
                chosen = Some(types);
                break;
            }
        }
        chosen.expect("grid 1 yields a single type")
    };

    let round_set = |values: Vec<Rat>| -> Vec<Rat> {
        for grid in [0u32, 24, 12, 8, 6, 4, 3, 2, 1] {
            let mut rounded: Vec<Rat> = values.iter().map(|v| round_up_to_grid(v, grid)).collect();
            rounded.sort();
            rounded.dedup();
            if rounded.len() <= 24 {
                return rounded;
            }
        }
        unreachable!("grid 1 yields a single value")
    };
    let widths = round_set(cls.horizontal.iter().map(|&i| rounded[i].w.clone()).collect());
    let depths = round_set(cls.vertical.iter().map(|&i| rounded[i].d.clone()).collect());

    let spaces = TypeSpaces { big: big_types, widths, depths };
    let assignment = assign_types(rounded, cls, &spaces)?;
    let demands = compute_demands(rects, cls, &assignment, &spaces);

    let mut configs: Vec<Configuration2D> = Vec::new();

    // Pure per-type grids for the big types.
    for (t, (w, d)) in spaces.big.iter().enumerate() {
        let nx = (rint(1) / w).floor().to_integer().to_u64().unwrap_or(1).clamp(1, 64);
        let ny = (rint(1) / d).floor().to_integer().to_u64().unwrap_or(1).clamp(1, 64);
        let mut containers = Vec::new();
        for ix in 0..nx {
            for iy in 0..ny {
                containers.push(Container2D {
                    kind: ContainerKind::Big(t),
                    x: rint(ix as i64) * w,
                    y: rint(iy as i64) * d,
                    w: w.clone(),
                    d: d.clone(),
                });
            }
        }
        configs.push(Configuration2D { containers });
    }

    // Full-bin single-family configurations guaranteeing LP feasibility.
    let full_span = {
        // Largest multiple of mu that is at most 1.
        let units = (rint(1) / mu).floor();
        units * mu
    };
    for (d_idx, d) in spaces.depths.iter().enumerate() {
        let ny = (rint(1) / d).floor().to_integer().to_u64().unwrap_or(1).clamp(1, 64);
        let mut containers = Vec::new();
        for iy in 0..ny {
            containers.push(Container2D {
                kind: ContainerKind::Vertical(d_idx),
                x: Rat::zero(),
                y: rint(iy as i64) * d,
                w: full_span.clone(),
                d: d.clone(),
            });
        }
        configs.push(Configuration2D { containers });
    }
    for (w_idx, w) in spaces.widths.iter().enumerate() {
        let nx = (rint(1) / w).floor().to_integer().to_u64().unwrap_or(1).clamp(1, 64);
        let mut containers = Vec::new();
        for ix in 0..nx {
            containers.push(Container2D {
                kind: ContainerKind::Horizontal(w_idx),
                x: rint(ix as i64) * w,
                y: Rat::zero(),
                w: w.clone(),
                d: full_span.clone(),
            });
        }
        configs.push(Configuration2D { containers });
    }
    if demands.tiny_area.is_positive() {
        configs.push(Configuration2D {
            containers: vec![Container2D {
                kind: ContainerKind::Tiny,
                x: Rat::zero(),
                y: Rat::zero(),
                w: full_span.clone(),
                d: full_span.clone(),
            }],
        });
    }

    // Greedy demand-shaped mixed configurations over the big types.
    let mut remaining: Vec<u64> = demands
        .big_counts
        .iter()
        .map(|c| c.to_integer().to_u64().unwrap_or(0))
        .collect();
    let mut rounds = 0;
    while remaining.iter().any(|&r| r > 0) && rounds < 24 {
        rounds += 1;
        let mut containers = Vec::new();
        let mut counts = vec![0u64; spaces.big.len()];
        let mut y = Rat::zero();
        loop {
            // Open a row with the most-demanded type that still fits.
            let mut order: Vec<usize> = (0..spaces.big.len()).collect();
            order.sort_by_key(|&t| std::cmp::Reverse(remaining[t].saturating_sub(counts[t])));
            let first = order.iter().copied().find(|&t| {
                remaining[t] > counts[t] && &y + &spaces.big[t].1 <= rint(1)
            });
            let Some(first) = first else { break };
            let row_depth = spaces.big[first].1.clone();
            let mut x = Rat::zero();
            loop {
                let next = order.iter().copied().find(|&t| {
                    remaining[t] > counts[t]
                        && spaces.big[t].1 <= row_depth
                        && &x + &spaces.big[t].0 <= rint(1)
                });
                let Some(t) = next else { break };
                containers.push(Container2D {
                    kind: ContainerKind::Big(t),
                    x: x.clone(),
                    y: y.clone(),
                    w: spaces.big[t].0.clone(),
                    d: spaces.big[t].1.clone(),
                });
                x += &spaces.big[t].0;
                counts[t] += 1;
            }
            y += &row_depth;
        }
        if containers.is_empty() {
            break;
        }
        for (t, c) in counts.iter().enumerate() {
            remaining[t] = remaining[t].saturating_sub(*c);
        }
        configs.push(Configuration2D { containers });
    }

    Ok(ContainerPlan { spaces, configs, multiplicities: None })
}

/// JSON form of an externally supplied container packing.
#[derive(Debug, Serialize, Deserialize)]
pub struct ContainerPlanJson {
    pub big_types: Vec<[String; 2]>,
    #[serde(default)]
    pub widths: Vec<String>,
    #[serde(default)]
    pub depths: Vec<String>,
    pub configurations: Vec<ConfigJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigJson {
    pub multiplicity: String,
    pub containers: Vec<ContainerJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ContainerJson {
    pub kind: String,
    #[serde(default)]
    pub index: usize,
    pub x: String,
    pub y: String,
    pub w: String,
    pub d: String,
}

pub fn parse_container_plan(text: &str) -> Result<ContainerPlan> {
    let raw: ContainerPlanJson = serde_json::from_str(text)?;
    let parse_pair = |p: &[String; 2]| -> Result<(Rat, Rat)> {
        Ok((parse_rational(&p[0])?, parse_rational(&p[1])?))
    };
    let spaces = TypeSpaces {
        big: raw.big_types.iter().map(parse_pair).collect::<Result<_>>()?,
        widths: raw.widths.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
        depths: raw.depths.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
    };
    let mut configs = Vec::new();
    let mut multiplicities = Vec::new();
    for cfg in &raw.configurations {
        multiplicities.push(parse_rational(&cfg.multiplicity)?);
        let mut containers = Vec::new();
        for c in &cfg.containers {
            let kind = match c.kind.as_str() {
                "big" => ContainerKind::Big(c.index),
                "horizontal" => ContainerKind::Horizontal(c.index),
                "vertical" => ContainerKind::Vertical(c.index),
                "tiny" => ContainerKind::Tiny,
                other => return Err(Error::Parse(format!("unknown container kind {other:?}"))),
            };
            containers.push(Container2D {
                kind,
                x: parse_rational(&c.x)?,
                y: parse_rational(&c.y)?,
                w: parse_rational(&c.w)?,
                d: parse_rational(&c.d)?,
            });
        }
        configs.push(Configuration2D { containers });
    }
    Ok(ContainerPlan { spaces, configs, multiplicities: Some(multiplicities) })
}

#[cfg(test)]
mod tests;
