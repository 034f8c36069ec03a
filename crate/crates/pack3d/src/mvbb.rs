//! Minimum-volume bounding box solvers.
//!
//! The APTAS-style mode tries the three strip orientations over geometric
//! grids of base dimensions, scales into the unit base, runs the strip
//! backend and keeps the minimum-volume box. The absolute mode additionally
//! guesses all three box dimensions, classifies the scaled items into
//! large/thin/medium classes, packs the three class groups into near-unit
//! boxes through the backend and stacks them, with the medium classes in
//! thin slabs appended to the matching boxes.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{total_volume, Axis, BinSpec, Item, Packing, PackingKind, Placement};
use crate::rational::{rint, Rat};
use crate::subroutines::{licheng_strip, LichengMode, StripBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvbbMode {
    Aptas,
    Absolute3,
}

#[derive(Debug, Clone)]
pub struct MvbbParams {
    pub epsilon: Rat,
    pub mode: MvbbMode,
    /// Flatness threshold separating the two analysis regimes; defaults to
    /// epsilon^2. Instances with some per-axis maximum below it are boxed
    /// essentially tightly by the matching orientation.
    pub delta: Option<Rat>,
}

/// One guessed box dimension set, on the `(1+eps)`-geometric grid anchored
/// at the per-axis maxima.
#[derive(Debug, Clone)]
pub struct BoxGuess {
    pub w: Rat,
    pub d: Rat,
    pub h: Rat,
}

/// A candidate box: volume, dimensions, and the packing inside it.
type BoxCandidate = (Rat, (Rat, Rat, Rat), Packing);

#[derive(Debug, Clone)]
pub struct MvbbResult {
    pub box_dims: (Rat, Rat, Rat),
    pub volume: Rat,
    pub packing: Packing,
    /// `max(total item volume, h_max * w_max * d_max)`; always a valid
    /// lower bound on the optimum.
    pub lower_bound: Rat,
    pub guesses_evaluated: usize,
    /// True when the backend carries a ratio guarantee (not volume-based),
    /// making the 3+O(eps) analysis applicable; otherwise the volume is
    /// simply the measured one.
    pub certified: bool,
    /// 2 when some per-axis maximum is at most the flatness threshold
    /// (a strip orientation wastes almost nothing), 1 otherwise.
    pub analysis_case: u8,
}

/// Geometric grid `anchor * (1+eps)^j` for `j = 0..` until `n * anchor` is
/// passed (one overshoot value included).
fn guess_grid(anchor: &Rat, epsilon: &Rat, n: usize) -> Vec<Rat> {
    let mut grid = Vec::new();
    let top = rint(n as i64) * anchor;
    let growth = rint(1) + epsilon;
    let mut value = anchor.clone();
    loop {
        grid.push(value.clone());
        if value > top {
            break;
        }
        value *= &growth;
    }
    grid
}

pub fn solve_mvbb(
    items: &[Item],
    params: &MvbbParams,
    backend: &dyn StripBackend,
) -> Result<MvbbResult> {
    if items.is_empty() {
        return Err(Error::Precondition("empty instance has no bounding box".into()));
    }
    let w_max = items.iter().map(|i| i.w.clone()).max().expect("nonempty");
    let d_max = items.iter().map(|i| i.d.clone()).max().expect("nonempty");
    let h_max = items.iter().map(|i| i.h.clone()).max().expect("nonempty");
    let volume = total_volume(items.iter());
    let lower_bound = volume.clone().max(&w_max * &d_max * &h_max);

    let mut best: Option<BoxCandidate> = None;
    let mut guesses = 0usize;

    match params.mode {
        MvbbMode::Aptas => {
            for axis in [Axis::Z, Axis::X, Axis::Y] {
                let framed: Vec<Item> = items
                    .iter()
                    .map(|i| {
                        let (w, d, h) = axis.dims_to_frame(&i.w, &i.d, &i.h);
                        Item::new(i.id.clone(), w, d, h)
                    })
                    .collect();
                let fw_max = framed.iter().map(|i| i.w.clone()).max().expect("nonempty");
                let fd_max = framed.iter().map(|i| i.d.clone()).max().expect("nonempty");
                let fh_max = framed.iter().map(|i| i.h.clone()).max().expect("nonempty");
                for gw in guess_grid(&fw_max, &params.epsilon, items.len()) {
                    for gd in guess_grid(&fd_max, &params.epsilon, items.len()) {
                        // Anything this guess produces has volume at least
                        // gw * gd * max(h_max, scaled volume).
                        let base = &gw * &gd;
                        let floor = (&base * &fh_max).max(volume.clone());
                        if let Some((best_vol, _, _)) = &best {
                            if &floor >= best_vol {
                                continue;
                            }
                        }
                        guesses += 1;
                        let scaled: Vec<Item> = framed
                            .iter()
                            .map(|i| {
                                Item::new(i.id.clone(), &i.w / &gw, &i.d / &gd, i.h.clone())
                            })
                            .collect();
                        let strip = backend.pack_strip(&scaled)?;
                        let height = strip_top(&strip.placements, &scaled);
                        let box_volume = &base * &height;
                        let better = match &best {
                            None => true,
                            Some((v, _, _)) => &box_volume < v,
                        };
                        if better {
                            // Unscale and rotate back to world coordinates.
                            let mut packing = Packing {
                                bin: BinSpec::unit(),
                                kind: PackingKind::Bins,
                                placements: Vec::new(),
                            };
                            for p in strip.placements {
                                let (x, y, z) = axis.point_from_frame(&p.x * &gw, &p.y * &gd, p.z);
                                packing.push(Placement { item: p.item, bin: 0, x, y, z, orientation: p.orientation });
                            }
                            let (bw, bd, bh) = axis.point_from_frame(gw.clone(), gd.clone(), height);
                            packing.bin = BinSpec::new(bw.clone(), bd.clone(), bh.clone());
                            best = Some((box_volume, (bw, bd, bh), packing));
                        }
                    }
                }
            }
        }
        MvbbMode::Absolute3 => {
            for gw in guess_grid(&w_max, &params.epsilon, items.len()) {
                for gd in guess_grid(&d_max, &params.epsilon, items.len()) {
                    for gh in guess_grid(&h_max, &params.epsilon, items.len()) {
                        if &gw * &gd * &gh < volume {
                            continue; // cannot hold the items
                        }
                        guesses += 1;
                        let guess = BoxGuess { w: gw.clone(), d: gd.clone(), h: gh.clone() };
                        if let Some((vol, dims, packing)) =
                            absolute3_attempt(items, &guess, params, backend)?
                        {
                            let better = match &best {
                                None => true,
                                Some((v, _, _)) => &vol < v,
                            };
                            if better {
                                best = Some((vol, dims, packing));
                            }
                        }
                    }
                }
            }
        }
    }

    let (volume, box_dims, packing) =
        best.ok_or_else(|| Error::Infeasible("no feasible bounding box guess".into()))?;
    let flatness = params
        .delta
        .clone()
        .unwrap_or_else(|| &params.epsilon * &params.epsilon);
    let analysis_case =
        if w_max <= flatness || d_max <= flatness || h_max <= flatness { 2 } else { 1 };
    Ok(MvbbResult {
        box_dims,
        volume,
        packing,
        lower_bound,
        guesses_evaluated: guesses,
        certified: !backend.guarantee().volume_based,
        analysis_case,
    })
}

fn strip_top(placements: &[Placement], items: &[Item]) -> Rat {
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

/// The three-class decomposition for one dimension guess: classes thin in
/// height, width and depth (each joined with its medium remainder slab) go
/// into three stacked near-unit boxes; large items ride with the height
/// class through the backend.
fn absolute3_attempt(
    items: &[Item],
    guess: &BoxGuess,
    params: &MvbbParams,
    backend: &dyn StripBackend,
) -> Result<Option<BoxCandidate>> {
    let scaled: Vec<Item> = items
        .iter()
        .map(|i| Item::new(i.id.clone(), &i.w / &guess.w, &i.d / &guess.d, &i.h / &guess.h))
        .collect();
    if scaled.iter().any(|i| i.w > rint(1) || i.d > rint(1) || i.h > rint(1)) {
        return Ok(None);
    }
    let eps = &params.epsilon;
    let mu = match compute_mu_six(&scaled, eps) {
        Some(mu) => mu,
        None => return Ok(None), // scaled volume above 1
    };
    let mu6 = &mu * &mu * &mu * &mu * &mu * &mu;

    // Classification: large, thin per axis at mu^6, medium per axis at mu.
    let mut large_and_h: Vec<Item> = Vec::new();
    let mut class_w: Vec<Item> = Vec::new();
    let mut class_d: Vec<Item> = Vec::new();
    let mut rem_h: Vec<Item> = Vec::new();
    let mut rem_w: Vec<Item> = Vec::new();
    let mut rem_d: Vec<Item> = Vec::new();
    for item in &scaled {
        let large = item.w > mu && item.d > mu && item.h > mu;
        if large || item.h <= mu6 {
            large_and_h.push(item.clone());
        } else if item.w <= mu6 {
            class_w.push(item.clone());
        } else if item.d <= mu6 {
            class_d.push(item.clone());
        } else if item.h <= mu {
            rem_h.push(item.clone());
        } else if item.w <= mu {
            rem_w.push(item.clone());
        } else {
            rem_d.push(item.clone());
        }
    }

    // Box 1: z-strip of large plus height-thin items, plus the medium
    // height slab on top.
    let mut placements: Vec<Placement> = Vec::new();
    let mut tower = Rat::zero();
    let mut box_w = Rat::zero();
    let mut box_d = Rat::zero();

    let extend = |packing: Packing,
                      class_items: &[Item],
                      slab: Packing,
                      slab_items: &[Item],
                      axis: Axis,
                      tower: &mut Rat,
                      box_w: &mut Rat,
                      box_d: &mut Rat,
                      placements: &mut Vec<Placement>| {
        if packing.placements.is_empty() && slab.placements.is_empty() {
            return;
        }
        // The strip grows along `axis`; its framed height plus the slab's
        // framed height give the block extent along that axis.
        let strip_extent = framed_top(&packing, class_items, axis);
        let slab_extent = framed_top(&slab, slab_items, axis);
        let total_extent = &strip_extent + &slab_extent;
        let (bw, bd, bh) = match axis {
            Axis::Z => (rint(1), rint(1), total_extent.clone()),
            Axis::X => (total_extent.clone(), rint(1), rint(1)),
            Axis::Y => (rint(1), total_extent.clone(), rint(1)),
        };
        for p in packing.placements {
            placements.push(Placement { z: &p.z + &*tower, ..p });
        }
        for p in slab.placements {
            // Shift the slab beyond the strip along its axis.
            let shifted = match axis {
                Axis::Z => Placement { z: &p.z + &strip_extent + &*tower, ..p },
                Axis::X => Placement { x: &p.x + &strip_extent, z: &p.z + &*tower, ..p },
                Axis::Y => Placement { y: &p.y + &strip_extent, z: &p.z + &*tower, ..p },
            };
            placements.push(shifted);
        }
        *tower += bh;
        if bw > *box_w {
            *box_w = bw;
        }
        if bd > *box_d {
            *box_d = bd;
        }
    };

    // Heights class (with large items): strip along z.
    let strip1 = backend.pack_strip(&large_and_h)?;
    let slab1 = licheng_strip(&rem_h, LichengMode::General)?;
    extend(
        strip1,
        &large_and_h,
        slab1,
        &rem_h,
        Axis::Z,
        &mut tower,
        &mut box_w,
        &mut box_d,
        &mut placements,
    );

    // Width class: strip along x, with its slab.
    let strip2 = pack_along(&class_w, Axis::X, backend)?;
    let slab2 = pack_along_licheng(&rem_w, Axis::X)?;
    extend(
        strip2,
        &class_w,
        slab2,
        &rem_w,
        Axis::X,
        &mut tower,
        &mut box_w,
        &mut box_d,
        &mut placements,
    );

    // Depth class: strip along y, with its slab.
    let strip3 = pack_along(&class_d, Axis::Y, backend)?;
    let slab3 = pack_along_licheng(&rem_d, Axis::Y)?;
    extend(
        strip3,
        &class_d,
        slab3,
        &rem_d,
        Axis::Y,
        &mut tower,
        &mut box_w,
        &mut box_d,
        &mut placements,
    );

    if box_w.is_zero() {
        box_w = rint(1);
    }
    if box_d.is_zero() {
        box_d = rint(1);
    }

    // Unscale into world coordinates.
    let dims = (&box_w * &guess.w, &box_d * &guess.d, &tower * &guess.h);
    let volume = &dims.0 * &dims.1 * &dims.2;
    let mut packing = Packing {
        bin: BinSpec::new(dims.0.clone(), dims.1.clone(), dims.2.clone()),
        kind: PackingKind::Bins,
        placements: Vec::new(),
    };
    for p in placements {
        packing.push(Placement {
            item: p.item,
            bin: 0,
            x: &p.x * &guess.w,
            y: &p.y * &guess.d,
            z: &p.z * &guess.h,
            orientation: p.orientation,
        });
    }
    Ok(Some((volume, dims, packing)))
}

/// Strip packing along an arbitrary axis, returned in world coordinates.
fn pack_along(items: &[Item], axis: Axis, backend: &dyn StripBackend) -> Result<Packing> {
    let framed: Vec<Item> = items
        .iter()
        .map(|i| {
            let (w, d, h) = axis.dims_to_frame(&i.w, &i.d, &i.h);
            Item::new(i.id.clone(), w, d, h)
        })
        .collect();
    let strip = backend.pack_strip(&framed)?;
    let mut world = Packing::new_strip(BinSpec::unit(), axis);
    for p in strip.placements {
        let (x, y, z) = axis.point_from_frame(p.x, p.y, p.z);
        world.push(Placement { item: p.item, bin: 0, x, y, z, orientation: p.orientation });
    }
    Ok(world)
}

fn pack_along_licheng(items: &[Item], axis: Axis) -> Result<Packing> {
    let framed: Vec<Item> = items
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
    Ok(world)
}

/// Top of a packing measured along the given axis.
fn framed_top(packing: &Packing, items: &[Item], axis: Axis) -> Rat {
    let mut top = Rat::zero();
    for p in &packing.placements {
        let item = items.iter().find(|i| i.id == p.item).expect("known item");
        let (ex, ey, ez) = p.orientation.extents(item);
        let t = match axis {
            Axis::X => &p.x + ex,
            Axis::Y => &p.y + ey,
            Axis::Z => &p.z + ez,
        };
        if t > top {
            top = t;
        }
    }
    top
}

/// The medium-band threshold of the absolute mode: `mu <= eps` such that
/// items with a dimension in `(mu^6, mu]` have volume at most `eps`.
/// Returns `None` when the scaled volume exceeds 1.
fn compute_mu_six(scaled: &[Item], epsilon: &Rat) -> Option<Rat> {
    let volume = total_volume(scaled.iter());
    if volume > rint(1) {
        return None;
    }
    let mut mu = epsilon.clone();
    loop {
        let mu6 = &mu * &mu * &mu * &mu * &mu * &mu;
        let band: Rat = scaled
            .iter()
            .filter(|i| {
                [&i.w, &i.d, &i.h]
                    .into_iter()
                    .any(|dim| dim > &mu6 && dim <= &mu)
            })
            .map(|i| i.volume())
            .sum();
        if &band <= epsilon {
            return Some(mu);
        }
        mu = mu6;
    }
}
