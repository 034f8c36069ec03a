//! Slot enumeration and the exact assignment step of the absolute pipeline.
//!
//! Large-item placements are enumerated over canonical coordinates; each
//! candidate partitions its bins into z-slots bounded by planes through
//! large-item faces. Fat thin items (width and depth above 1/2) are then
//! assigned to slots by an exact branch-and-bound: any two such items
//! overlap in the base plane, so the items of one slot stack vertically and
//! each slot is a knapsack with capacity equal to its height.

use std::ops::ControlFlow;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{Item, Packing, Placement};
use crate::rational::{rint, Rat};

/// Base rectangle of a large item penetrating a slot top to bottom.
#[derive(Debug, Clone)]
pub struct Footprint {
    pub x: Rat,
    pub y: Rat,
    pub w: Rat,
    pub d: Rat,
}

impl Footprint {
    fn overlaps(&self, x: &Rat, y: &Rat, w: &Rat, d: &Rat) -> bool {
        self.x < (x + w)
            && x < &(&self.x + &self.w)
            && self.y < (y + d)
            && y < &(&self.y + &self.d)
    }
}

/// A z-slab of one bin delimited by planes through large-item faces. No
/// large item begins or ends strictly inside the slab.
#[derive(Debug, Clone)]
pub struct Slot {
    pub bin: usize,
    pub lo: Rat,
    pub hi: Rat,
    pub footprints: Vec<Footprint>,
}

impl Slot {
    pub fn height(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// A position for a `w x d` base avoiding every footprint, if any.
    /// Candidates are the bin wall and the right/back edges of footprints;
    /// pushing an arbitrary valid position left and front always lands on
    /// one of these.
    pub fn base_position(&self, w: &Rat, d: &Rat) -> Option<(Rat, Rat)> {
        let mut xs: Vec<Rat> = vec![Rat::zero()];
        let mut ys: Vec<Rat> = vec![Rat::zero()];
        for f in &self.footprints {
            xs.push(&f.x + &f.w);
            ys.push(&f.y + &f.d);
        }
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        let one = rint(1);
        for x in &xs {
            if (x + w) > one {
                continue;
            }
            for y in &ys {
                if (y + d) > one {
                    continue;
                }
                if self.footprints.iter().all(|f| !f.overlaps(x, y, w, d)) {
                    return Some((x.clone(), y.clone()));
                }
            }
        }
        None
    }
}

/// One feasible placement of the large items plus the induced slots.
#[derive(Debug, Clone)]
pub struct SlotCandidate {
    pub placements: Vec<Placement>,
    pub slots: Vec<Slot>,
}

/// Enumerates feasible placements of `large` into `bins` unit bins over
/// canonical coordinates (pushed placements first), invoking `visit` per
/// candidate until it breaks or the budget runs out. Returns the number of
/// candidates produced.
pub fn enumerate_slot_packings(
    large: &[Item],
    bins: usize,
    max_items: usize,
    node_budget: u64,
    mut visit: impl FnMut(&SlotCandidate) -> ControlFlow<()>,
) -> Result<usize> {
    if large.len() > max_items {
        return Err(Error::Precondition(format!(
            "slot enumeration cap is {max_items} large items, got {}",
            large.len()
        )));
    }
    if large.is_empty() {
        let candidate = SlotCandidate {
            placements: Vec::new(),
            slots: (0..bins)
                .map(|b| Slot { bin: b, lo: Rat::zero(), hi: rint(1), footprints: Vec::new() })
                .collect(),
        };
        let _ = visit(&candidate);
        return Ok(1);
    }

    let volume = crate::geometry::total_volume(large.iter());
    if volume > rint(bins as i64) {
        return Ok(0);
    }

    let mut order: Vec<&Item> = large.iter().collect();
    order.sort_by(|a, b| b.volume().cmp(&a.volume()).then_with(|| a.id.cmp(&b.id)));
    let one = rint(1);
    let xs = axis_sums(order.iter().map(|i| i.w.clone()), &one);
    let ys = axis_sums(order.iter().map(|i| i.d.clone()), &one);
    let zs = axis_sums(order.iter().map(|i| i.h.clone()), &one);

    let mut enumerator = Enumerator {
        order: &order,
        bins,
        xs: &xs,
        ys: &ys,
        zs: &zs,
        placed: Vec::new(),
        budget: node_budget,
        emitted: 0,
        stopped: false,
    };
    enumerator.run(0, &mut visit);
    Ok(enumerator.emitted)
}

fn axis_sums(values: impl Iterator<Item = Rat>, limit: &Rat) -> Vec<Rat> {
    use std::collections::BTreeSet;
    let mut sums: BTreeSet<Rat> = BTreeSet::new();
    sums.insert(Rat::zero());
    for v in values {
        let additions: Vec<Rat> = sums.iter().map(|s| s + &v).filter(|s| s < limit).collect();
        sums.extend(additions);
        if sums.len() > 4096 {
            break;
        }
    }
    sums.into_iter().collect()
}

struct PlacedLarge {
    order_idx: usize,
    bin: usize,
    lo: [Rat; 3],
    hi: [Rat; 3],
}

struct Enumerator<'a> {
    order: &'a [&'a Item],
    bins: usize,
    xs: &'a [Rat],
    ys: &'a [Rat],
    zs: &'a [Rat],
    placed: Vec<PlacedLarge>,
    budget: u64,
    emitted: usize,
    stopped: bool,
}

impl<'a> Enumerator<'a> {
    fn run(&mut self, idx: usize, visit: &mut impl FnMut(&SlotCandidate) -> ControlFlow<()>) {
        if self.stopped || self.budget == 0 {
            return;
        }
        if idx == self.order.len() {
            let placements: Vec<Placement> = self
                .placed
                .iter()
                .map(|p| Placement {
                    item: self.order[p.order_idx].id.clone(),
                    bin: p.bin,
                    x: p.lo[0].clone(),
                    y: p.lo[1].clone(),
                    z: p.lo[2].clone(),
                    orientation: Default::default(),
                })
                .collect();
            let candidate = SlotCandidate {
                slots: build_slots(&self.placed, self.order, self.bins),
                placements,
            };
            self.emitted += 1;
            if visit(&candidate).is_break() {
                self.stopped = true;
            }
            return;
        }
        let item = self.order[idx];
        let used_bins = self.placed.iter().map(|p| p.bin + 1).max().unwrap_or(0);
        let bin_limit = (used_bins + 1).min(self.bins);
        // Identical shapes are interchangeable: force non-decreasing
        // (bin, x, y, z) order between them.
        let has_min = idx > 0 && {
            let prev = self.order[idx - 1];
            prev.w == item.w && prev.d == item.d && prev.h == item.h
        };
        let one = rint(1);
        for bin in 0..bin_limit {
            for x in self.xs {
                let hx = x + &item.w;
                if hx > one {
                    continue;
                }
                for y in self.ys {
                    let hy = y + &item.d;
                    if hy > one {
                        continue;
                    }
                    'zs: for z in self.zs {
                        if self.budget == 0 || self.stopped {
                            return;
                        }
                        self.budget -= 1;
                        let hz = z + &item.h;
                        if hz > one {
                            continue;
                        }
                        if has_min {
                            let prev = &self.placed[idx - 1];
                            if (bin, x, y, z) < (prev.bin, &prev.lo[0], &prev.lo[1], &prev.lo[2]) {
                                continue;
                            }
                        }
                        for prev in &self.placed {
                            if prev.bin != bin {
                                continue;
                            }
                            if prev.lo[0] < hx
                                && x < &prev.hi[0]
                                && prev.lo[1] < hy
                                && y < &prev.hi[1]
                                && prev.lo[2] < hz
                                && z < &prev.hi[2]
                            {
                                continue 'zs;
                            }
                        }
                        self.placed.push(PlacedLarge {
                            order_idx: idx,
                            bin,
                            lo: [x.clone(), y.clone(), z.clone()],
                            hi: [hx.clone(), hy.clone(), hz.clone()],
                        });
                        self.run(idx + 1, visit);
                        self.placed.pop();
                        if self.stopped {
                            return;
                        }
                    }
                }
            }
        }
    }
}

fn build_slots(placed: &[PlacedLarge], order: &[&Item], bins: usize) -> Vec<Slot> {
    let mut slots = Vec::new();
    for bin in 0..bins {
        let mut planes: Vec<Rat> = vec![Rat::zero(), rint(1)];
        for p in placed.iter().filter(|p| p.bin == bin) {
            planes.push(p.lo[2].clone());
            planes.push(p.hi[2].clone());
        }
        planes.sort();
        planes.dedup();
        planes.retain(|z| z >= &Rat::zero() && z <= &rint(1));
        for pair in planes.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            if lo >= hi {
                continue;
            }
            let footprints: Vec<Footprint> = placed
                .iter()
                .filter(|p| p.bin == bin)
                .filter_map(|p| {
                    if &p.lo[2] <= lo && &p.hi[2] >= hi {
                        let item = order[p.order_idx];
                        Some(Footprint {
                            x: p.lo[0].clone(),
                            y: p.lo[1].clone(),
                            w: item.w.clone(),
                            d: item.d.clone(),
                        })
                    } else {
                        None
                    }
                })
                .collect();
            slots.push(Slot { bin, lo: lo.clone(), hi: hi.clone(), footprints });
        }
    }
    slots
}

/// Exact maximum-volume assignment of fat thin items to slots.
#[derive(Debug, Clone)]
pub struct GapAssignment {
    /// Per item (indexed like the input), the chosen slot if any.
    pub slot_of_item: Vec<Option<usize>>,
    pub packed_volume: Rat,
    pub unassigned: Vec<usize>,
}

/// Solves the slot-assignment knapsack exactly by branch and bound with
/// volume-based pruning. Item sizes are their heights where the base fits
/// beside the slot's footprints, infinite otherwise.
pub fn gap_assign(slots: &[Slot], items: &[Item], slot_cap: usize) -> Result<GapAssignment> {
    if slots.len() > slot_cap {
        return Err(Error::Precondition(format!(
            "gap_assign slot cap is {slot_cap}, got {}",
            slots.len()
        )));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        items[b]
            .volume()
            .cmp(&items[a].volume())
            .then_with(|| items[a].id.cmp(&items[b].id))
    });

    // fits[oi][s] = item order[oi] has a feasible base position in slot s.
    let fits: Vec<Vec<bool>> = order
        .iter()
        .map(|&i| {
            slots
                .iter()
                .map(|s| s.base_position(&items[i].w, &items[i].d).is_some())
                .collect()
        })
        .collect();

    let suffix_volume: Vec<Rat> = {
        let mut acc = vec![Rat::zero(); order.len() + 1];
        for oi in (0..order.len()).rev() {
            acc[oi] = &acc[oi + 1] + items[order[oi]].volume();
        }
        acc
    };

    let mut search = GapSearch {
        items,
        order: &order,
        fits: &fits,
        suffix_volume: &suffix_volume,
        capacity: slots.iter().map(|s| s.height()).collect(),
        assignment: vec![None; items.len()],
        volume: Rat::zero(),
        best_volume: Rat::zero(),
        best_assignment: vec![None; items.len()],
    };
    search.descend(0);

    let assignment = search.best_assignment;
    let packed_volume = search.best_volume;
    let unassigned: Vec<usize> = (0..items.len()).filter(|&i| assignment[i].is_none()).collect();
    Ok(GapAssignment { slot_of_item: assignment, packed_volume, unassigned })
}

struct GapSearch<'a> {
    items: &'a [Item],
    order: &'a [usize],
    fits: &'a [Vec<bool>],
    suffix_volume: &'a [Rat],
    capacity: Vec<Rat>,
    assignment: Vec<Option<usize>>,
    volume: Rat,
    best_volume: Rat,
    best_assignment: Vec<Option<usize>>,
}

impl<'a> GapSearch<'a> {
    fn descend(&mut self, oi: usize) {
        if &self.volume + &self.suffix_volume[oi] <= self.best_volume && oi < self.order.len() {
            return;
        }
        if oi == self.order.len() {
            if self.volume > self.best_volume || self.best_assignment.iter().all(|a| a.is_none()) {
                self.best_volume = self.volume.clone();
                self.best_assignment = self.assignment.clone();
            }
            return;
        }
        let item_idx = self.order[oi];
        let item = &self.items[item_idx];
        for s in 0..self.capacity.len() {
            if !self.fits[oi][s] || self.capacity[s] < item.h {
                continue;
            }
            self.capacity[s] -= &item.h;
            self.assignment[item_idx] = Some(s);
            self.volume += item.volume();
            self.descend(oi + 1);
            self.volume -= item.volume();
            self.assignment[item_idx] = None;
            self.capacity[s] += &item.h;
        }
        // Skip the item.
        self.descend(oi + 1);
    }
}

/// Groups small leftovers and packs them into the empty strips of the host
/// bins; `host_tops` carries `(bin index, content top)` pairs and is updated
/// in place. Leftover groups use at most `25 delta` of height each, the
/// medium remainder at most `12 delta` more in a single bin. Appends to
/// `packing` (frame coordinates shared with the hosts).
pub fn repack_leftovers(
    packing: &mut Packing,
    host_tops: &mut Vec<(usize, Rat)>,
    leftovers: &[Item],
    medium_rem: &[Item],
    delta: &Rat,
    k: usize,
    next_fresh_bin: &mut usize,
) -> Result<usize> {
    use crate::subroutines::{licheng_strip, LichengMode};

    let leftover_volume = crate::geometry::total_volume(leftovers.iter());
    if leftover_volume > rint(5 * k as i64) * delta {
        return Err(Error::Precondition(format!(
            "leftover volume {leftover_volume} exceeds 5*delta*k"
        )));
    }

    let mut new_bins = 0usize;
    let six_delta = rint(6) * delta;

    // Greedy maximal groups of volume at most 6 delta.
    let mut groups: Vec<Vec<Item>> = Vec::new();
    let mut group: Vec<Item> = Vec::new();
    let mut group_volume = Rat::zero();
    for item in leftovers {
        let v = item.volume();
        if !group.is_empty() && &group_volume + &v > six_delta {
            groups.push(std::mem::take(&mut group));
            group_volume = Rat::zero();
        }
        group_volume += &v;
        group.push(item.clone());
    }
    if !group.is_empty() {
        groups.push(group);
    }

    let mut host_cursor = 0usize;
    for group in &groups {
        let strip = licheng_strip(group, LichengMode::General)?;
        let height = strip_top(&strip, group);
        let target = loop {
            match host_tops.get(host_cursor) {
                Some((bin, top)) if top + &height <= rint(1) => break (*bin, top.clone()),
                Some(_) => host_cursor += 1,
                None => {
                    let bin = *next_fresh_bin;
                    *next_fresh_bin += 1;
                    new_bins += 1;
                    host_tops.push((bin, Rat::zero()));
                    break (bin, Rat::zero());
                }
            }
        };
        for p in strip.placements {
            packing.push(Placement {
                item: p.item,
                bin: target.0,
                x: p.x,
                y: p.y,
                z: &target.1 + &p.z,
                orientation: p.orientation,
            });
        }
        if let Some(entry) = host_tops.iter_mut().find(|(b, _)| *b == target.0) {
            entry.1 = &target.1 + &height;
        }
        host_cursor += 1;
    }

    if !medium_rem.is_empty() {
        let strip = licheng_strip(medium_rem, LichengMode::General)?;
        let height = strip_top(&strip, medium_rem);
        let slot = host_tops
            .iter_mut()
            .find(|(_, top)| top.clone() + &height <= rint(1));
        let (bin, base) = match slot {
            Some(entry) => {
                let base = entry.1.clone();
                entry.1 = &base + &height;
                (entry.0, base)
            }
            None => {
                let bin = *next_fresh_bin;
                *next_fresh_bin += 1;
                new_bins += 1;
                host_tops.push((bin, height.clone()));
                (bin, Rat::zero())
            }
        };
        for p in strip.placements {
            packing.push(Placement {
                item: p.item,
                bin,
                x: p.x,
                y: p.y,
                z: &base + &p.z,
                orientation: p.orientation,
            });
        }
    }
    Ok(new_bins)
}

fn strip_top(strip: &Packing, items: &[Item]) -> Rat {
    let mut top = Rat::zero();
    for p in &strip.placements {
        let item = items.iter().find(|i| i.id == p.item).expect("strip item");
        let t = &p.z + &item.h;
        if t > top {
            top = t;
        }
    }
    top
}
