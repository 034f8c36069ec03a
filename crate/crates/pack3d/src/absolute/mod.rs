//! Absolute-approximation pipeline for 3D bin packing, its strip-packing
//! implication, and the rotation variant.
//!
//! The solver guesses the optimal bin count `k`, classifies items by a
//! computed threshold `mu` into large and per-axis thin classes, and packs
//! thin classes through the strip backend while large items are placed by
//! exact search. A guess is accepted when every stage's precondition held;
//! otherwise the next `k` is tried, and the volume-based packer is the
//! final fallback.

mod slots;

pub use slots::{
    enumerate_slot_packings, gap_assign, repack_leftovers, Footprint, GapAssignment, Slot,
    SlotCandidate,
};

use std::ops::ControlFlow;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{
    total_volume, Axis, BinSpec, Item, ItemTable, Orientation, Packing, PackingKind, Placement,
};
use crate::oracle::{oracle_opt_bins, OracleLimits};
use crate::rational::{rat, rint, Rat};
use crate::subroutines::{licheng_strip, volume_bin_pack, LichengMode, StripBackend};

/// Tuning for the absolute solver.
#[derive(Debug, Clone)]
pub struct AbsParams {
    /// Cap on guessed OPT; instances needing more bins fall back to the
    /// volume packer.
    pub k_max: usize,
    pub lambda: Rat,
    pub delta: Rat,
    pub epsilon: Rat,
    pub oracle: OracleLimits,
    pub slot_cap: usize,
    /// Maximum number of large-item placements examined per guess.
    pub candidate_budget: usize,
}

impl Default for AbsParams {
    fn default() -> Self {
        let lambda = rat(1, 40);
        AbsParams {
            k_max: 3,
            delta: &lambda / rint(1000),
            epsilon: lambda.clone(),
            lambda,
            oracle: OracleLimits::default(),
            slot_cap: 64,
            candidate_budget: 512,
        }
    }
}

/// Item classes of the absolute pipeline. `thin[a]` holds the items whose
/// extent along axis `a` is at most `mu^4`; `rem[a]` the medium remainder
/// with that extent in `(mu^4, mu]`.
#[derive(Debug, Clone)]
pub struct AbsClassification {
    pub mu: Rat,
    pub large: Vec<Item>,
    pub i_h: Vec<Item>,
    pub i_w: Vec<Item>,
    pub i_d: Vec<Item>,
    pub rem_h: Vec<Item>,
    pub rem_w: Vec<Item>,
    pub rem_d: Vec<Item>,
}

impl AbsClassification {
    pub fn medium_volume(&self) -> Rat {
        total_volume(self.rem_h.iter().chain(&self.rem_w).chain(&self.rem_d))
    }
}

/// Finds `mu <= delta` such that items with a dimension in `(mu^4, mu]`
/// have volume at most `delta`; exists by the pigeonhole argument over the
/// chain `mu_0 = delta, mu_{j+1} = mu_j^4`.
pub fn compute_mu(items: &[Item], delta: &Rat, volume_cap: &Rat) -> Result<Rat> {
    let volume = total_volume(items.iter());
    if &volume > volume_cap {
        return Err(Error::Precondition(format!(
            "total volume {volume} exceeds the cap {volume_cap}"
        )));
    }
    let mut mu = delta.clone();
    loop {
        let mu4 = &mu * &mu * &mu * &mu;
        let band_volume: Rat = items
            .iter()
            .filter(|i| {
                [&i.w, &i.d, &i.h]
                    .into_iter()
                    .any(|dim| dim > &mu4 && dim <= &mu)
            })
            .map(|i| i.volume())
            .sum();
        if &band_volume <= delta {
            return Ok(mu);
        }
        mu = mu4;
    }
}

/// Deterministic class assignment: large first, then thin-by-height, thin
/// by width, thin by depth, then the medium remainder split the same way
/// against `mu`.
pub fn classify_absolute(items: &[Item], mu: &Rat) -> AbsClassification {
    let mu4 = mu * mu * mu * mu;
    let mut cls = AbsClassification {
        mu: mu.clone(),
        large: Vec::new(),
        i_h: Vec::new(),
        i_w: Vec::new(),
        i_d: Vec::new(),
        rem_h: Vec::new(),
        rem_w: Vec::new(),
        rem_d: Vec::new(),
    };
    for item in items {
        if item.w > *mu && item.d > *mu && item.h > *mu {
            cls.large.push(item.clone());
        } else if item.h <= mu4 {
            cls.i_h.push(item.clone());
        } else if item.w <= mu4 {
            cls.i_w.push(item.clone());
        } else if item.d <= mu4 {
            cls.i_d.push(item.clone());
        } else if item.h <= *mu {
            cls.rem_h.push(item.clone());
        } else if item.w <= *mu {
            cls.rem_w.push(item.clone());
        } else {
            debug_assert!(item.d <= *mu);
            cls.rem_d.push(item.clone());
        }
    }
    cls
}

/// Result of packing one thin class into bins.
#[derive(Debug, Clone)]
pub struct SeparateResult {
    pub bins: Packing,
    pub bins_used: usize,
    pub axis: Axis,
    /// Content height of the last bin, measured along the packing axis; the
    /// empty strip above it is what remains of the bin.
    pub last_fill: Rat,
    pub sliced_planes: usize,
}

/// Packs items whose extent along `axis` is at most `mu`: rotates the frame
/// so the axis is vertical, runs the strip backend, cuts at integer heights
/// and absorbs the sliced layers into the last bin (or one extra bin).
pub fn pack_separate(
    items: &[Item],
    axis: Axis,
    mu: &Rat,
    backend: &dyn StripBackend,
) -> Result<SeparateResult> {
    pack_separate_with_slab(items, axis, Some(mu), &[], backend)
}

/// [`pack_separate`] with an optional slab of extra items (each with frame
/// height at most ~`4 epsilon`) stacked on top of the strip before cutting;
/// used to merge the large-item slabs of the small-`v(L)` case.
pub fn pack_separate_with_slab(
    items: &[Item],
    axis: Axis,
    mu: Option<&Rat>,
    slab: &[Item],
    backend: &dyn StripBackend,
) -> Result<SeparateResult> {
    let framed: Vec<Item> = items
        .iter()
        .map(|i| {
            let (w, d, h) = axis.dims_to_frame(&i.w, &i.d, &i.h);
            Item::new(i.id.clone(), w, d, h)
        })
        .collect();
    if let Some(mu) = mu {
        if let Some(bad) = framed.iter().find(|i| &i.h > mu) {
            return Err(Error::Precondition(format!(
                "item {:?} has extent {} > mu {} along {axis}",
                bad.id, bad.h, mu
            )));
        }
    }
    let strip = backend.pack_strip(&framed)?;
    let mut all_items = framed.clone();
    let mut placements = strip.placements;

    if !slab.is_empty() {
        let framed_slab: Vec<Item> = slab
            .iter()
            .map(|i| {
                let (w, d, h) = axis.dims_to_frame(&i.w, &i.d, &i.h);
                Item::new(i.id.clone(), w, d, h)
            })
            .collect();
        let base = top_of(&placements, &all_items);
        let slab_strip = licheng_strip(&framed_slab, LichengMode::General)?;
        for mut p in slab_strip.placements {
            p.z += &base;
            placements.push(p);
        }
        all_items.extend(framed_slab);
    }

    let (bins, last_fill, sliced_planes) = cut_and_absorb(placements, &all_items)?;
    // Map the frame back to world coordinates.
    let mut world = Packing::new_bins(BinSpec::unit());
    for p in bins {
        let (x, y, z) = axis.point_from_frame(p.x, p.y, p.z);
        world.push(Placement { item: p.item, bin: p.bin, x, y, z, orientation: p.orientation });
    }
    let bins_used = world.used_bins();
    Ok(SeparateResult { bins: world, bins_used, axis, last_fill, sliced_planes })
}

fn top_of(placements: &[Placement], items: &[Item]) -> Rat {
    let mut top = Rat::zero();
    for p in placements {
        let item = items.iter().find(|i| i.id == p.item).expect("known item");
        let t = &p.z + &item.h;
        if t > top {
            top = t;
        }
    }
    top
}

/// Cuts a frame strip at integer heights; whole segments become bins, and
/// the sliced layers are stacked into the last bin when they fit there, or
/// into one extra bin otherwise.
fn cut_and_absorb(
    placements: Vec<Placement>,
    items: &[Item],
) -> Result<(Vec<Placement>, Rat, usize)> {
    let mut segments: Vec<Vec<Placement>> = Vec::new();
    let mut sliced: Vec<(u64, Vec<Placement>)> = Vec::new();
    for p in placements {
        let item = items.iter().find(|i| i.id == p.item).expect("known item");
        if item.h > rint(1) {
            return Err(Error::Precondition(format!("item {:?} taller than a bin", p.item)));
        }
        let seg = crate::rational::floor_int(&p.z);
        let seg: usize = num_traits::ToPrimitive::to_usize(&seg)
            .ok_or_else(|| Error::Precondition("negative strip coordinate".into()))?;
        let plane = rint(seg as i64 + 1);
        if &p.z + &item.h > plane {
            let plane = seg as u64 + 1;
            match sliced.iter_mut().find(|(q, _)| *q == plane) {
                Some((_, set)) => set.push(p),
                None => sliced.push((plane, vec![p])),
            }
        } else {
            if segments.len() <= seg {
                segments.resize(seg + 1, Vec::new());
            }
            segments[seg].push(p);
        }
    }
    sliced.sort_by_key(|(q, _)| *q);
    let sliced_planes = sliced.len();

    let mut out: Vec<Placement> = Vec::new();
    let mut next_bin = 0usize;
    let mut last_fill = Rat::zero();
    for (seg_idx, seg) in segments.iter().enumerate() {
        if seg.is_empty() {
            continue;
        }
        let mut fill = Rat::zero();
        for p in seg {
            let item = items.iter().find(|i| i.id == p.item).expect("known item");
            let mut q = p.clone();
            q.bin = next_bin;
            q.z = &p.z - rint(seg_idx as i64);
            let top = &q.z + &item.h;
            if top > fill {
                fill = top;
            }
            out.push(q);
        }
        last_fill = fill;
        next_bin += 1;
    }
    if !sliced.is_empty() {
        let mut layer_heights = Vec::new();
        let mut total = Rat::zero();
        for (_, set) in &sliced {
            let h = set
                .iter()
                .map(|p| {
                    let item = items.iter().find(|i| i.id == p.item).expect("known item");
                    item.h.clone()
                })
                .max()
                .expect("nonempty layer");
            total += &h;
            layer_heights.push(h);
        }
        let (target_bin, mut cursor) = if &last_fill + &total <= rint(1) && next_bin > 0 {
            (next_bin - 1, last_fill.clone())
        } else if total <= rint(1) {
            let bin = next_bin;
            next_bin += 1;
            (bin, Rat::zero())
        } else {
            return Err(Error::Infeasible("sliced layers exceed one bin".into()));
        };
        for ((_, set), h) in sliced.into_iter().zip(layer_heights) {
            for mut p in set {
                p.bin = target_bin;
                p.z = cursor.clone();
                out.push(p);
            }
            cursor += &h;
        }
        if target_bin + 1 == next_bin {
            last_fill = cursor;
        }
    }
    Ok((out, last_fill, sliced_planes))
}

/// Result of grouping the small-base thin items into nearly full bins, each
/// keeping an empty strip above the reported content top.
#[derive(Debug, Clone)]
pub struct GroupedBins {
    pub packing: Packing,
    /// `(bin index, content top)` per bin, in packing order.
    pub tops: Vec<(usize, Rat)>,
}

/// Packs thin items with small bases (height at most `mu^4`, width or depth
/// at most 1/2) into at most `k` bins, each filled to height at most
/// `1 - 59 delta`.
pub fn pack_ihs_grouped(items: &[Item], k: usize, delta: &Rat, mu: &Rat) -> Result<GroupedBins> {
    let mu4 = mu * mu * mu * mu;
    let half = rat(1, 2);
    let volume = total_volume(items.iter());
    let cap = (rat(1, 3) - rint(21) * delta) * rint(k as i64);
    if volume > cap {
        return Err(Error::Precondition(format!(
            "pack_ihs_grouped volume {volume} exceeds (1/3 - 21 delta) k = {cap}"
        )));
    }
    for item in items {
        if item.h > mu4 {
            return Err(Error::Precondition(format!("item {:?} taller than mu^4", item.id)));
        }
        if item.w > half && item.d > half {
            return Err(Error::Precondition(format!(
                "item {:?} has both base sides above 1/2",
                item.id
            )));
        }
    }

    let group_cap = rat(1, 3) - rint(20) * delta;
    let mut groups: Vec<Vec<Item>> = Vec::new();
    let mut group: Vec<Item> = Vec::new();
    let mut group_volume = Rat::zero();
    for item in items {
        let v = item.volume();
        if !group.is_empty() && &group_volume + &v > group_cap {
            groups.push(std::mem::take(&mut group));
            group_volume = Rat::zero();
        }
        group_volume += &v;
        group.push(item.clone());
    }
    if !group.is_empty() {
        groups.push(group);
    }
    if groups.len() > k {
        return Err(Error::Precondition(format!(
            "grouping produced {} groups for {k} bins",
            groups.len()
        )));
    }

    let limit = rint(1) - rint(59) * delta;
    let mut packing = Packing::new_bins(BinSpec::unit());
    let mut tops = Vec::new();
    for (bin, group) in groups.iter().enumerate() {
        let strip = licheng_strip(group, LichengMode::HalfThin)?;
        let height = top_of(&strip.placements, group);
        if height > limit {
            return Err(Error::Precondition(format!(
                "group strip height {height} exceeds 1 - 59 delta"
            )));
        }
        for mut p in strip.placements {
            p.bin = bin;
            packing.push(p);
        }
        tops.push((bin, height));
    }
    Ok(GroupedBins { packing, tops })
}

/// Splits low-volume large items into three classes by which dimension is
/// at most `4 epsilon` (priority height, width, depth) and packs each class
/// into a thin slab along the corresponding axis.
pub fn pack_large_thin(large: &[Item], epsilon: &Rat, volume_cap: &Rat) -> Result<[Packing; 3]> {
    let volume = total_volume(large.iter());
    if &volume > volume_cap {
        return Err(Error::Precondition(format!(
            "large volume {volume} exceeds the cap {volume_cap}"
        )));
    }
    let split = split_large_by_thin_axis(large, epsilon)?;
    let mut out = Vec::new();
    for (axis, class) in [Axis::Z, Axis::X, Axis::Y].into_iter().zip(split) {
        let framed: Vec<Item> = class
            .iter()
            .map(|i| {
                let (w, d, h) = axis.dims_to_frame(&i.w, &i.d, &i.h);
                Item::new(i.id.clone(), w, d, h)
            })
            .collect();
        let strip = licheng_strip(&framed, LichengMode::General)?;
        let mut world = Packing::new_strip(BinSpec::unit(), axis);
        for p in strip.placements {
            let (x, y, z) = axis.point_from_frame(p.x, p.y, p.z);
            world.push(Placement { item: p.item, bin: 0, x, y, z, orientation: p.orientation });
        }
        out.push(world);
    }
    let [a, b, c]: [Packing; 3] = out.try_into().expect("three classes");
    Ok([a, b, c])
}

/// Splits large items by which dimension is at most `4 epsilon`, priority
/// height then width then depth; errors when an item has none.
fn split_large_by_thin_axis(large: &[Item], epsilon: &Rat) -> Result<[Vec<Item>; 3]> {
    let bound = rint(4) * epsilon;
    let mut by_h = Vec::new();
    let mut by_w = Vec::new();
    let mut by_d = Vec::new();
    for item in large {
        if item.h <= bound {
            by_h.push(item.clone());
        } else if item.w <= bound {
            by_w.push(item.clone());
        } else if item.d <= bound {
            by_d.push(item.clone());
        } else {
            return Err(Error::Precondition(format!(
                "large item {:?} has no dimension at most 4 epsilon",
                item.id
            )));
        }
    }
    Ok([by_h, by_w, by_d])
}

/// Which pipeline produced a packing and the bound it certifies.
#[derive(Debug, Clone)]
pub struct BoundDescriptor {
    pub backend: String,
    pub case: Option<u8>,
    pub k_accepted: Option<usize>,
    /// Bin bound implied by the accepted guess: `13k + 3` under the
    /// volume-based fallback backend, `6k` under a ratio backend.
    pub bin_bound: Option<u64>,
    pub fallback: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AbsResult {
    pub packing: Packing,
    pub bound: BoundDescriptor,
}

/// Absolute bin-packing solver: guesses `k`, runs the case analysis, falls
/// back to the volume packer when no guess is accepted. Always returns a
/// feasible packing.
pub fn solve_absolute_bp(
    items: &[Item],
    params: &AbsParams,
    backend: &dyn StripBackend,
) -> Result<AbsResult> {
    let volume = total_volume(items.iter());
    let k_cap = rint(params.k_max as i64);
    let mut notes = Vec::new();

    if items.is_empty() {
        return Ok(AbsResult {
            packing: Packing::new_bins(BinSpec::unit()),
            bound: BoundDescriptor {
                backend: backend.name().to_string(),
                case: None,
                k_accepted: Some(0),
                bin_bound: Some(0),
                fallback: false,
                notes,
            },
        });
    }

    if volume <= k_cap {
        let mu = compute_mu(items, &params.delta, &k_cap)?;
        let cls = classify_absolute(items, &mu);
        let large_volume = total_volume(cls.large.iter());
        let threshold = rint(64) * &params.delta * &k_cap;
        for k in 1..=params.k_max {
            if volume > rint(k as i64) {
                continue;
            }
            let attempt = if large_volume > threshold {
                solve_case1(&cls, k, params, backend)
            } else {
                solve_case2(&cls, k, params, backend)
            };
            match attempt {
                Ok((mut packing, case)) => {
                    packing.compact_bins();
                    let bins = packing.used_bins() as u64;
                    let bound = if backend.guarantee().volume_based {
                        13 * k as u64 + 3
                    } else {
                        6 * k as u64
                    };
                    if bins > bound {
                        notes.push(format!("guess {k}: produced {bins} bins above bound {bound}"));
                        continue;
                    }
                    return Ok(AbsResult {
                        packing,
                        bound: BoundDescriptor {
                            backend: backend.name().to_string(),
                            case: Some(case),
                            k_accepted: Some(k),
                            bin_bound: Some(bound),
                            fallback: false,
                            notes,
                        },
                    });
                }
                Err(e) => notes.push(format!("guess {k}: {e}")),
            }
        }
    } else {
        notes.push(format!("volume {volume} exceeds K = {}", params.k_max));
    }

    let cut = volume_bin_pack(items)?;
    Ok(AbsResult {
        packing: cut.bins,
        bound: BoundDescriptor {
            backend: backend.name().to_string(),
            case: None,
            k_accepted: None,
            bin_bound: None,
            fallback: true,
            notes,
        },
    })
}

/// Case `v(L) <= 64 delta K`: three separate-class packings, each with its
/// large-item slab stacked on the strip before cutting.
fn solve_case2(
    cls: &AbsClassification,
    k: usize,
    params: &AbsParams,
    backend: &dyn StripBackend,
) -> Result<(Packing, u8)> {
    let slabs = split_large_by_thin_axis(&cls.large, &params.epsilon)?;
    let [slab_h, slab_w, slab_d] = slabs;

    let classes: [(Axis, Vec<Item>, Vec<Item>); 3] = [
        (Axis::Z, merge(&cls.i_h, &cls.rem_h), slab_h),
        (Axis::X, merge(&cls.i_w, &cls.rem_w), slab_w),
        (Axis::Y, merge(&cls.i_d, &cls.rem_d), slab_d),
    ];

    let mut combined = Packing::new_bins(BinSpec::unit());
    let mut offset = 0usize;
    for (axis, class, slab) in classes {
        if class.is_empty() && slab.is_empty() {
            continue;
        }
        let res = pack_separate_with_slab(&class, axis, Some(&cls.mu), &slab, backend)?;
        if res.bins_used > 4 * k + 1 {
            return Err(Error::Infeasible(format!(
                "axis {axis} used {} bins, above 4k+1 = {}",
                res.bins_used,
                4 * k + 1
            )));
        }
        for mut p in res.bins.placements {
            p.bin += offset;
            combined.push(p);
        }
        offset += res.bins_used;
    }
    Ok((combined, 2))
}

/// Case `v(L) > 64 delta K`: two classes via the backend, the lightest
/// class packed around the large items through slots and the exact
/// assignment.
fn solve_case1(
    cls: &AbsClassification,
    k: usize,
    params: &AbsParams,
    backend: &dyn StripBackend,
) -> Result<(Packing, u8)> {
    // Pick the class axis of minimum volume, in the order h, w, d.
    let candidates = [
        (Axis::Z, &cls.i_h, &cls.rem_h, Axis::X, Axis::Y),
        (Axis::X, &cls.i_w, &cls.rem_w, Axis::Z, Axis::Y),
        (Axis::Y, &cls.i_d, &cls.rem_d, Axis::Z, Axis::X),
    ];
    let (axis_j, class_j, rem_j) = {
        let mut best = None;
        for (axis, class, rem, _, _) in &candidates {
            let v = total_volume(class.iter());
            let better = match &best {
                None => true,
                Some((_, _, _, bv)) => &v < bv,
            };
            if better {
                best = Some((*axis, (*class).clone(), (*rem).clone(), v));
            }
        }
        let (axis, class, rem, v) = best.expect("three candidates");
        let cap = (rat(1, 3) - rint(21) * &params.delta) * rint(k as i64);
        if v > cap {
            return Err(Error::Infeasible(format!(
                "lightest thin class has volume {v} above (1/3 - 21 delta) k"
            )));
        }
        (axis, class, rem)
    };

    let mut combined = Packing::new_bins(BinSpec::unit());
    let mut offset = 0usize;

    // The two other thin classes go through the backend.
    for (axis, class, rem, ..) in &candidates {
        if *axis == axis_j {
            continue;
        }
        let joined = merge(class, rem);
        if joined.is_empty() {
            continue;
        }
        let res = pack_separate(&joined, *axis, &cls.mu, backend)?;
        if res.bins_used > 4 * k + 1 {
            return Err(Error::Infeasible(format!(
                "axis {axis} used {} bins, above 4k+1",
                res.bins_used
            )));
        }
        for mut p in res.bins.placements {
            p.bin += offset;
            combined.push(p);
        }
        offset += res.bins_used;
    }

    // Work in the frame where the chosen axis is vertical.
    let frame = |items: &[Item]| -> Vec<Item> {
        items
            .iter()
            .map(|i| {
                let (w, d, h) = axis_j.dims_to_frame(&i.w, &i.d, &i.h);
                Item::new(i.id.clone(), w, d, h)
            })
            .collect()
    };
    let framed_class = frame(&class_j);
    let framed_rem = frame(&rem_j);
    let framed_large = frame(&cls.large);

    let half = rat(1, 2);
    let (ell, small): (Vec<Item>, Vec<Item>) = framed_class
        .into_iter()
        .partition(|i| i.w > half && i.d > half);

    let grouped = pack_ihs_grouped(&small, k, &params.delta, &cls.mu)?;

    // Enumerate large placements until one admits a near-complete
    // assignment of the fat thin items.
    let leftover_cap = rint(5 * k as i64) * &params.delta;
    let mut chosen: Option<(SlotCandidate, GapAssignment)> = None;
    let mut seen = 0usize;
    let budget = params.candidate_budget;
    enumerate_slot_packings(
        &framed_large,
        k,
        params.oracle.max_items,
        params.oracle.node_budget,
        |candidate| {
            seen += 1;
            if let Ok(assignment) = gap_assign(&candidate.slots, &ell, params.slot_cap) {
                let unassigned_volume: Rat = assignment
                    .unassigned
                    .iter()
                    .map(|&i| ell[i].volume())
                    .sum();
                if unassigned_volume <= leftover_cap {
                    chosen = Some((candidate.clone(), assignment));
                    return ControlFlow::Break(());
                }
            }
            if seen >= budget {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;
    let (candidate, assignment) = chosen.ok_or_else(|| {
        Error::Infeasible(format!(
            "no large-item placement with small leftovers found in {seen} candidates"
        ))
    })?;

    // Assemble the frame packing: grouped bins, then the k slot bins.
    let mut frame_packing = grouped.packing.clone();
    let mut host_tops = grouped.tops.clone();
    let slot_base = host_tops.len();
    for mut p in candidate.placements.clone() {
        p.bin += slot_base;
        frame_packing.push(p);
    }
    // Stack assigned fat items inside their slots.
    let mut cursor: Vec<Rat> = candidate.slots.iter().map(|s| s.lo.clone()).collect();
    for (idx, slot_idx) in assignment.slot_of_item.iter().enumerate() {
        if let Some(s) = slot_idx {
            let slot = &candidate.slots[*s];
            let item = &ell[idx];
            let (x, y) = slot
                .base_position(&item.w, &item.d)
                .expect("assignment only uses fitting slots");
            frame_packing.push(Placement {
                item: item.id.clone(),
                bin: slot.bin + slot_base,
                x,
                y,
                z: cursor[*s].clone(),
                orientation: Orientation::Xyz,
            });
            cursor[*s] += &item.h;
        }
    }

    let leftovers: Vec<Item> = assignment.unassigned.iter().map(|&i| ell[i].clone()).collect();
    let mut next_fresh = slot_base + k.max(candidate_used_bins(&candidate));
    repack_leftovers(
        &mut frame_packing,
        &mut host_tops,
        &leftovers,
        &framed_rem,
        &params.delta,
        k,
        &mut next_fresh,
    )?;

    // Map the frame packing to world coordinates.
    for p in frame_packing.placements {
        let (x, y, z) = axis_j.point_from_frame(p.x, p.y, p.z);
        combined.push(Placement {
            item: p.item,
            bin: p.bin + offset,
            x,
            y,
            z,
            orientation: p.orientation,
        });
    }
    Ok((combined, 1))
}

fn candidate_used_bins(candidate: &SlotCandidate) -> usize {
    candidate
        .placements
        .iter()
        .map(|p| p.bin + 1)
        .max()
        .unwrap_or(0)
}

fn merge(a: &[Item], b: &[Item]) -> Vec<Item> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out
}

/// Strip-packing result with the bound descriptor of the accepted guess.
#[derive(Debug, Clone)]
pub struct SpResult {
    pub strip: Packing,
    pub height: Rat,
    pub bound: BoundDescriptor,
    pub guesses_tried: usize,
}

/// Guesses the optimal strip height over a geometric grid, scales heights
/// into the unit bin, solves absolute bin packing with `k = 1` and stacks
/// the bins, keeping the best feasible height.
pub fn solve_absolute_sp(
    items: &[Item],
    params: &AbsParams,
    backend: &dyn StripBackend,
) -> Result<SpResult> {
    if items.is_empty() {
        return Ok(SpResult {
            strip: Packing::new_strip(BinSpec::unit(), Axis::Z),
            height: Rat::zero(),
            bound: BoundDescriptor {
                backend: backend.name().to_string(),
                case: None,
                k_accepted: Some(0),
                bin_bound: Some(0),
                fallback: false,
                notes: Vec::new(),
            },
            guesses_tried: 0,
        });
    }
    let h_max = items.iter().map(|i| i.h.clone()).max().expect("nonempty");
    let top = rint(items.len() as i64) * &h_max;
    let growth = rint(1) + &params.epsilon;

    let mut sp_params = params.clone();
    sp_params.k_max = 1;

    let mut best: Option<(Rat, Packing, BoundDescriptor)> = None;
    let mut guess = h_max.clone();
    let mut guesses_tried = 0usize;
    loop {
        guesses_tried += 1;
        let scaled: Vec<Item> = items
            .iter()
            .map(|i| Item::new(i.id.clone(), i.w.clone(), i.d.clone(), &i.h / &guess))
            .collect();
        if let Ok(result) = solve_absolute_bp(&scaled, &sp_params, backend) {
            if !result.bound.fallback {
                let (strip, height) = stack_bins_to_strip(&result.packing, &scaled, &guess);
                let better = match &best {
                    None => true,
                    Some((h, _, _)) => &height < h,
                };
                if better {
                    best = Some((height, strip, result.bound));
                }
            }
        }
        if guess > top {
            break;
        }
        guess *= &growth;
    }

    match best {
        Some((height, strip, bound)) => Ok(SpResult { strip, height, bound, guesses_tried }),
        None => {
            // No guess accepted: the layered construction is the fallback.
            let strip = licheng_strip(items, LichengMode::General)?;
            let height = top_of(&strip.placements, items);
            Ok(SpResult {
                strip,
                height,
                bound: BoundDescriptor {
                    backend: backend.name().to_string(),
                    case: None,
                    k_accepted: None,
                    bin_bound: None,
                    fallback: true,
                    notes: vec!["all strip-height guesses rejected".into()],
                },
                guesses_tried,
            })
        }
    }
}

/// Stacks the bins of a scaled bin packing along z, least-filled bin last,
/// and rescales heights back to the original frame.
fn stack_bins_to_strip(packing: &Packing, scaled_items: &[Item], guess: &Rat) -> (Packing, Rat) {
    let bins = packing.used_bins();
    let mut fills: Vec<Rat> = vec![Rat::zero(); bins];
    for p in &packing.placements {
        let item = scaled_items.iter().find(|i| i.id == p.item).expect("known");
        let (_, _, ez) = p.orientation.extents(item);
        let top = &p.z + &ez;
        if top > fills[p.bin] {
            fills[p.bin] = top;
        }
    }
    // Order bins so the least filled one comes last.
    let mut order: Vec<usize> = (0..bins).collect();
    order.sort_by(|&a, &b| fills[b].cmp(&fills[a]).then(a.cmp(&b)));
    let mut position = vec![0usize; bins];
    for (new_pos, &old) in order.iter().enumerate() {
        position[old] = new_pos;
    }

    let mut strip = Packing::new_strip(BinSpec::unit(), Axis::Z);
    let mut height = Rat::zero();
    for p in &packing.placements {
        let item = scaled_items.iter().find(|i| i.id == p.item).expect("known");
        let (_, _, ez) = p.orientation.extents(item);
        let base = rint(position[p.bin] as i64);
        let z_scaled = &base + &p.z;
        let top = (&z_scaled + &ez) * guess;
        if top > height {
            height = top;
        }
        strip.push(Placement {
            item: p.item.clone(),
            bin: 0,
            x: p.x.clone(),
            y: p.y.clone(),
            z: z_scaled * guess,
            orientation: p.orientation,
        });
    }
    (strip, height)
}

/// Rotation-enabled 5-approximation: groups small items into nearly
/// quarter-volume batches, one bin each, and packs the low-volume remainder
/// plus the large items into a single shared bin (or the large items alone
/// by exact search).
pub fn rotation_5approx(items: &[Item], params: &AbsParams) -> Result<AbsResult> {
    let k_max = params.k_max;
    let mu = Rat::new(1.into(), (12i64 * 12 * 12 * 12 * k_max as i64).into());
    let volume = total_volume(items.iter());
    let mut notes = Vec::new();

    // The exact search over the large items is shared by all guesses.
    let large: Vec<Item> = items
        .iter()
        .filter(|i| i.w > mu && i.d > mu && i.h > mu)
        .cloned()
        .collect();
    let large_packed: Option<(usize, Packing)> = if large.len() <= params.oracle.max_items {
        match oracle_opt_bins(&large, &BinSpec::unit(), k_max, true, &params.oracle) {
            Ok(found) => found,
            Err(e) => {
                notes.push(format!("large-item search: {e}"));
                None
            }
        }
    } else {
        notes.push(format!("{} large items exceed the search cap", large.len()));
        None
    };

    for k in 1..=k_max {
        if volume > rint(k as i64) {
            continue;
        }
        match rotation_attempt(items, k, &mu, &large_packed) {
            Ok(packing) => {
                return Ok(AbsResult {
                    packing,
                    bound: BoundDescriptor {
                        backend: "licheng".into(),
                        case: None,
                        k_accepted: Some(k),
                        bin_bound: Some(5 * k as u64),
                        fallback: false,
                        notes,
                    },
                });
            }
            Err(e) => notes.push(format!("guess {k}: {e}")),
        }
    }
    // Fallback: the better of the volume packer and one item per bin.
    let cut = volume_bin_pack(items)?;
    let packing = if cut.bins.used_bins() <= items.len() {
        cut.bins
    } else {
        let mut one_each = Packing::new_bins(BinSpec::unit());
        for (bin, item) in items.iter().enumerate() {
            one_each.push(Placement::new(item.id.clone(), bin, Rat::zero(), Rat::zero(), Rat::zero()));
        }
        one_each
    };
    Ok(AbsResult {
        packing,
        bound: BoundDescriptor {
            backend: "licheng".into(),
            case: None,
            k_accepted: None,
            bin_bound: None,
            fallback: true,
            notes,
        },
    })
}

fn rotation_attempt(
    items: &[Item],
    k: usize,
    mu: &Rat,
    large_packed: &Option<(usize, Packing)>,
) -> Result<Packing> {
    let (large, small): (Vec<&Item>, Vec<&Item>) = items
        .iter()
        .partition(|i| i.w > *mu && i.d > *mu && i.h > *mu);

    // Orient every small item so a dimension of at most mu points up.
    let oriented_small: Vec<(Item, Orientation)> = small
        .iter()
        .map(|i| orient_with_small_axis_up(i, mu).expect("small item has a thin dimension"))
        .collect();

    let quarter = rat(1, 4);
    let low = &quarter - rint(3) * mu;
    let mut groups: Vec<Vec<(Item, Orientation)>> = Vec::new();
    let mut group: Vec<(Item, Orientation)> = Vec::new();
    let mut group_volume = Rat::zero();
    let mut leftovers: Vec<(Item, Orientation)> = Vec::new();
    for entry in oriented_small {
        if groups.len() == 4 * k {
            leftovers.push(entry);
            continue;
        }
        group_volume += entry.0.volume();
        group.push(entry);
        if group_volume >= low {
            groups.push(std::mem::take(&mut group));
            group_volume = Rat::zero();
        }
    }
    if !group.is_empty() {
        if groups.len() < 4 * k {
            groups.push(group);
        } else {
            leftovers.extend(group);
        }
    }

    let mut packing = Packing::new_bins(BinSpec::unit());
    let mut next_bin = 0usize;
    for group in &groups {
        let virtual_items: Vec<Item> = group.iter().map(|(i, _)| i.clone()).collect();
        let strip = licheng_strip(&virtual_items, LichengMode::General)?;
        let height = top_of(&strip.placements, &virtual_items);
        if height > rint(1) {
            return Err(Error::Infeasible(format!("group strip height {height} above 1")));
        }
        for p in strip.placements {
            let orientation = group
                .iter()
                .find(|(i, _)| i.id == p.item)
                .map(|(_, o)| *o)
                .expect("group member");
            packing.push(Placement {
                item: p.item,
                bin: next_bin,
                x: p.x,
                y: p.y,
                z: p.z,
                orientation,
            });
        }
        next_bin += 1;
    }

    let large_items: Vec<Item> = large.iter().map(|&i| i.clone()).collect();
    if leftovers.is_empty() {
        // Pack the large items alone by exact search.
        if large_items.is_empty() {
            return Ok(packing);
        }
        match large_packed {
            Some((opt, witness)) if *opt <= k => {
                for p in witness.placements.clone() {
                    let mut p = p;
                    p.bin += next_bin;
                    packing.push(p);
                }
                Ok(packing)
            }
            _ => Err(Error::Infeasible("large items do not fit k bins".into())),
        }
    } else {
        // Shared bin: large items below 3/4, leftover smalls above.
        let tail_volume =
            total_volume(large_items.iter()) + total_volume(leftovers.iter().map(|(i, _)| i));
        if tail_volume > rint(12 * k as i64) * mu {
            return Err(Error::Infeasible(format!(
                "unpacked volume {tail_volume} above 12 mu k"
            )));
        }
        let twelfth = rat(1, 12);
        let oriented_large: Vec<(Item, Orientation)> = large_items
            .iter()
            .map(|i| {
                orient_with_small_axis_up(i, &twelfth).ok_or_else(|| {
                    Error::Infeasible(format!("large item {:?} has no side at most 1/12", i.id))
                })
            })
            .collect::<Result<_>>()?;

        let large_virtual: Vec<Item> = oriented_large.iter().map(|(i, _)| i.clone()).collect();
        let large_strip = licheng_strip(&large_virtual, LichengMode::General)?;
        let large_height = top_of(&large_strip.placements, &large_virtual);
        if large_height > rat(3, 4) {
            return Err(Error::Infeasible(format!(
                "large strip height {large_height} above 3/4"
            )));
        }
        let leftover_virtual: Vec<Item> = leftovers.iter().map(|(i, _)| i.clone()).collect();
        let leftover_strip = licheng_strip(&leftover_virtual, LichengMode::General)?;
        let leftover_height = top_of(&leftover_strip.placements, &leftover_virtual);
        if leftover_height > rat(1, 4) {
            return Err(Error::Infeasible(format!(
                "leftover strip height {leftover_height} above 1/4"
            )));
        }
        let shared = next_bin;
        for p in large_strip.placements {
            let orientation = oriented_large
                .iter()
                .find(|(i, _)| i.id == p.item)
                .map(|(_, o)| *o)
                .expect("large member");
            packing.push(Placement { item: p.item, bin: shared, x: p.x, y: p.y, z: p.z, orientation });
        }
        for p in leftover_strip.placements {
            let orientation = leftovers
                .iter()
                .find(|(i, _)| i.id == p.item)
                .map(|(_, o)| *o)
                .expect("leftover member");
            packing.push(Placement {
                item: p.item,
                bin: shared,
                x: p.x,
                y: p.y,
                z: &p.z + rat(3, 4),
                orientation,
            });
        }
        Ok(packing)
    }
}

/// Returns the item's dims permuted so an axis with extent at most `bound`
/// points up, along with the orientation achieving it.
fn orient_with_small_axis_up(item: &Item, bound: &Rat) -> Option<(Item, Orientation)> {
    let axis = if &item.h <= bound {
        Axis::Z
    } else if &item.w <= bound {
        Axis::X
    } else if &item.d <= bound {
        Axis::Y
    } else {
        return None;
    };
    let orientation = Orientation::with_axis_up(axis);
    let (w, d, h) = orientation.extents(item);
    Some((Item::new(item.id.clone(), w, d, h), orientation))
}

/// Convenience: verify helper shared by the tests of this module.
pub fn assert_feasible(packing: &Packing, items: &[Item]) -> Result<()> {
    let table = ItemTable::new(items.to_vec())?;
    let report = crate::geometry::verify_packing(packing, &table)?;
    if !report.feasible {
        return Err(Error::Infeasible(format!(
            "packing has {} violations",
            report.violations.len()
        )));
    }
    if packing.placements.len() != items.len() && matches!(packing.kind, PackingKind::Bins) {
        return Err(Error::Infeasible(format!(
            "{} of {} items placed",
            packing.placements.len(),
            items.len()
        )));
    }
    Ok(())
}
