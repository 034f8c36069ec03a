//! Item placement into lifted 3D containers.
//!
//! Big items are matched to rounded types by a basic LP solution and then
//! stacked through aligned cuts; vertical/horizontal items fill container
//! faces shelf-wise with aligned shelves; tiny items fill containers in
//! top-aligned layers. All three maintain the tall-not-sliced property for
//! containers of integer height.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Item, ItemId};
use crate::rational::{rint, unit_fraction_q, Rat};
use crate::strip_transform::align_stack_tall;
use crate::subroutines::{nfdh_2d, Rect2D};

use super::config_lp::{simplex_solve, Cmp, LpProblem};

/// A big 3D item together with the rounded types it may be assigned to.
#[derive(Debug, Clone)]
pub struct BigItem {
    pub id: ItemId,
    pub height: Rat,
    pub admissible: Vec<usize>,
}

/// Outcome of the assignment LP: all but at most `|types|` items receive a
/// single type; the rest are listed as fractional.
#[derive(Debug, Clone)]
pub struct BigAssignment {
    pub type_of_item: Vec<Option<usize>>,
    pub fractional: Vec<usize>,
}

/// Distributes big-item heights over types with the assignment LP
/// (row sums equal the item heights, column sums bounded by the type
/// capacities) and reads types off a basic solution.
pub fn assign_big_lp(items: &[BigItem], capacities: &[Rat]) -> Result<BigAssignment> {
    if items.is_empty() {
        return Ok(BigAssignment { type_of_item: Vec::new(), fractional: Vec::new() });
    }
    // Variables are (item, admissible type) pairs.
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for (i, item) in items.iter().enumerate() {
        if item.admissible.is_empty() {
            return Err(Error::Precondition(format!(
                "big item {:?} admits no type",
                item.id
            )));
        }
        for &t in &item.admissible {
            if t >= capacities.len() {
                return Err(Error::Precondition(format!("type index {t} out of range")));
            }
            vars.push((i, t));
        }
    }
    let n = vars.len();
    let mut rows: Vec<(Vec<Rat>, Cmp, Rat)> = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let coeffs: Vec<Rat> = vars
            .iter()
            .map(|&(vi, _)| if vi == i { rint(1) } else { Rat::zero() })
            .collect();
        rows.push((coeffs, Cmp::Eq, item.height.clone()));
    }
    for (t, cap) in capacities.iter().enumerate() {
        let coeffs: Vec<Rat> = vars
            .iter()
            .map(|&(_, vt)| if vt == t { rint(1) } else { Rat::zero() })
            .collect();
        rows.push((coeffs, Cmp::Le, cap.clone()));
    }
    let problem = LpProblem { objective: vec![Rat::zero(); n], rows };
    let solution = simplex_solve(&problem)?
        .ok_or_else(|| Error::Infeasible("assignment LP infeasible: capacities too small".into()))?;

    let mut type_of_item = vec![None; items.len()];
    let mut fractional = Vec::new();
    for (i, _) in items.iter().enumerate() {
        let nonzero: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(v, &(vi, _))| vi == i && !solution.x[*v].is_zero())
            .map(|(v, _)| v)
            .collect();
        match nonzero.len() {
            1 => type_of_item[i] = Some(vars[nonzero[0]].1),
            _ => fractional.push(i),
        }
    }
    Ok(BigAssignment { type_of_item, fractional })
}

/// A container reference for stacking: index into the caller's container
/// list plus its integer height.
#[derive(Debug, Clone)]
pub struct StackTarget {
    pub container: usize,
    pub height: u64,
}

/// Placement of one big item: target container and local z offset.
#[derive(Debug, Clone)]
pub struct StackedItem {
    pub id: ItemId,
    pub container: usize,
    pub z: Rat,
}

#[derive(Debug, Clone)]
pub struct StackBigResult {
    pub placements: Vec<StackedItem>,
    /// Height used beyond each container's nominal height.
    pub extensions: Vec<Rat>,
    pub gap_total: Rat,
}

/// Stacks the items of one rounded type into its containers: sort by
/// non-increasing height, align tall items, cut the stack at the successive
/// (integer) container heights. A short item crossing a cut moves atop its
/// container; residual items extend the final container.
pub fn stack_big(items: &[Item], targets: &[StackTarget], eps: &Rat) -> Result<StackBigResult> {
    if items.is_empty() {
        return Ok(StackBigResult {
            placements: Vec::new(),
            extensions: vec![Rat::zero(); targets.len()],
            gap_total: Rat::zero(),
        });
    }
    if targets.is_empty() {
        return Err(Error::Precondition("no containers for a nonempty type".into()));
    }
    let capacity: u64 = targets.iter().map(|t| t.height).sum();
    let total_height: Rat = items.iter().map(|i| i.h.clone()).sum();
    if total_height > rint(capacity as i64) {
        return Err(Error::Precondition(format!(
            "container capacity {capacity} below item height sum {total_height}"
        )));
    }

    let mut sorted: Vec<&Item> = items.iter().collect();
    sorted.sort_by(|a, b| b.h.cmp(&a.h).then_with(|| a.id.cmp(&b.id)));
    let heights: Vec<(ItemId, Rat)> =
        sorted.iter().map(|i| (i.id.clone(), i.h.clone())).collect();
    let stack = align_stack_tall(&heights, eps)?;

    let mut extensions = vec![Rat::zero(); targets.len()];
    let mut placements = Vec::with_capacity(items.len());
    let mut cut_base = Rat::zero();
    let mut target_idx = 0usize;
    let mut cut_top = rint(targets[0].height as i64);
    for (id, z, h) in &stack.placements {
        // Advance to the container whose span contains the item bottom.
        while z >= &cut_top && target_idx + 1 < targets.len() {
            cut_base = cut_top.clone();
            target_idx += 1;
            cut_top += rint(targets[target_idx].height as i64);
        }
        let local = z - &cut_base;
        let container_height = rint(targets[target_idx].height as i64);
        if &local + h > cut_top.clone() - &cut_base && target_idx + 1 < targets.len() {
            // Crossing a cut: only short items can, since the cut positions
            // are integers and tall items are aligned.
            if h > eps {
                return Err(Error::Precondition(format!(
                    "tall item {id:?} crosses a container cut"
                )));
            }
            let ext_z = &container_height + &extensions[target_idx];
            placements.push(StackedItem { id: id.clone(), container: targets[target_idx].container, z: ext_z });
            extensions[target_idx] += h;
        } else {
            let top = &local + h;
            let over = &top - &container_height;
            if over.is_positive() && extensions[target_idx] < over {
                extensions[target_idx] = over;
            }
            placements.push(StackedItem {
                id: id.clone(),
                container: targets[target_idx].container,
                z: local,
            });
        }
    }
    Ok(StackBigResult { placements, extensions, gap_total: stack.gap_total })
}

/// A container face for the vertical/horizontal shelf placement: local
/// width and the (integer) container height.
#[derive(Debug, Clone)]
pub struct FaceContainer {
    pub container: usize,
    pub width: Rat,
    pub height: u64,
}

#[derive(Debug, Clone)]
pub struct PlacedFace {
    pub id: ItemId,
    pub container: usize,
    pub x: Rat,
    pub z: Rat,
}

#[derive(Debug, Clone)]
pub struct ThinPlacementResult {
    pub placements: Vec<PlacedFace>,
    pub overflow: Vec<ItemId>,
    /// Extension beyond each face's nominal height, indexed like the input.
    pub extensions: Vec<Rat>,
}

/// Shelf placement of thin item faces into container faces: per container,
/// tallest-first items are taken until their area reaches the face area,
/// NFDH-packed into the widened face, right-edge overflow is removed, and
/// every shelf whose tallest member is taller than `eps` is shifted to
/// start at a multiple of that height.
pub fn place_thin_containers(
    faces: &[(ItemId, Rat, Rat)], // (id, width, rounded height)
    containers: &[FaceContainer],
    mu: &Rat,
    eps: &Rat,
) -> Result<ThinPlacementResult> {
    for (id, w, _) in faces {
        if w >= mu {
            return Err(Error::Precondition(format!(
                "thin item {id:?} has width {w} >= mu {mu}"
            )));
        }
    }
    let mut remaining: Vec<&(ItemId, Rat, Rat)> = faces.iter().collect();
    remaining.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));

    let mut placements = Vec::new();
    let mut overflow = Vec::new();
    let mut extensions = vec![Rat::zero(); containers.len()];
    let mut container_iter = containers.iter().enumerate();
    let two_mu = rint(2) * mu;

    while !remaining.is_empty() {
        let Some((c_idx, face)) = container_iter.next() else {
            return Err(Error::Infeasible(
                "ran out of container faces before all thin items were placed".into(),
            ));
        };
        let face_area = &face.width * rint(face.height as i64);
        // Take tallest items until the area reaches the face area.
        let mut batch: Vec<&(ItemId, Rat, Rat)> = Vec::new();
        let mut batch_area = Rat::zero();
        while batch_area < face_area && !remaining.is_empty() {
            let item = remaining.remove(0);
            batch_area += &item.1 * &item.2;
            batch.push(item);
        }
        let rects: Vec<Rect2D> = batch
            .iter()
            .map(|(id, w, h)| Rect2D::new(id.clone(), w.clone(), h.clone()))
            .collect();
        let widened = &face.width + &two_mu;
        let (shelves, nfdh_height) = nfdh_2d(&rects, &widened)?;
        let allowance = rint(face.height as i64 + 2);
        if nfdh_height > allowance {
            return Err(Error::Infeasible(format!(
                "NFDH height {nfdh_height} exceeded the widened face allowance {allowance}"
            )));
        }
        // Shift shelves so aligned ones start at multiples of their tallest
        // member's height, then emit, removing right-edge overflow.
        let mut shift = Rat::zero();
        let mut top = Rat::zero();
        for shelf in &shelves {
            let tallest = &shelf.height;
            let base = &shelf.base_z + &shift;
            let base = if tallest > eps {
                match unit_fraction_q(tallest) {
                    Some(q) => {
                        let step = Rat::new(BigInt::one(), q);
                        let aligned = (&base / &step).ceil() * &step;
                        shift = &aligned - &shelf.base_z;
                        aligned
                    }
                    None => {
                        return Err(Error::Precondition(format!(
                            "tall face height {tallest} is not of the form 1/q"
                        )))
                    }
                }
            } else {
                base
            };
            for member in &shelf.members {
                if &member.x + &member.w > face.width {
                    overflow.push(member.id.clone());
                    continue;
                }
                placements.push(PlacedFace {
                    id: member.id.clone(),
                    container: face.container,
                    x: member.x.clone(),
                    z: base.clone(),
                });
            }
            let shelf_top = &base + tallest;
            if shelf_top > top {
                top = shelf_top;
            }
        }
        let over = top - rint(face.height as i64);
        if over.is_positive() {
            extensions[c_idx] = over;
        }
    }
    Ok(ThinPlacementResult { placements, overflow, extensions })
}

/// A tiny container: local base extents and the integer height.
#[derive(Debug, Clone)]
pub struct TinyContainer {
    pub container: usize,
    pub w: Rat,
    pub d: Rat,
    pub height: u64,
}

#[derive(Debug, Clone)]
pub struct PlacedTiny {
    pub id: ItemId,
    pub container: usize,
    pub x: Rat,
    pub y: Rat,
    pub z: Rat,
}

#[derive(Debug, Clone)]
pub struct TinyPlacementResult {
    pub placements: Vec<PlacedTiny>,
    pub overflow: Vec<ItemId>,
    pub extensions: Vec<Rat>,
}

/// Layer placement of tiny items: per container, top-aligned layers are
/// built from the tallest remaining items until the top-face area reaches
/// the container base area; border-crossing items overflow; layers are
/// then shifted upward so each layer whose tallest item is taller than
/// `eps` has that item's bottom at a multiple of its height.
pub fn place_tiny_containers(
    items: &[Item],
    containers: &[TinyContainer],
    mu: &Rat,
    eps: &Rat,
) -> Result<TinyPlacementResult> {
    for item in items {
        if &item.w >= mu || &item.d >= mu {
            return Err(Error::Precondition(format!(
                "tiny item {:?} has a base side not below mu",
                item.id
            )));
        }
    }
    let mut remaining: Vec<&Item> = items.iter().collect();
    remaining.sort_by(|a, b| b.h.cmp(&a.h).then_with(|| a.id.cmp(&b.id)));

    let mut placements = Vec::new();
    let mut overflow = Vec::new();
    let mut extensions = vec![Rat::zero(); containers.len()];
    let two_mu = rint(2) * mu;
    let mut container_iter = containers.iter().enumerate();

    while !remaining.is_empty() {
        let Some((c_idx, cont)) = container_iter.next() else {
            return Err(Error::Infeasible(
                "ran out of tiny containers before all tiny items were placed".into(),
            ));
        };
        let base_area = &cont.w * &cont.d;
        let close_at = rint(cont.height as i64 + 1);
        let mut level = Rat::zero();
        // Layers: (top height, members with local xy).
        let mut layers: Vec<(Rat, Rat, Vec<PlacedTiny>)> = Vec::new();
        while level <= close_at && !remaining.is_empty() {
            let tallest = remaining[0].h.clone();
            level += &tallest;
            let mut batch: Vec<&Item> = Vec::new();
            let mut batch_area = Rat::zero();
            while batch_area < base_area && !remaining.is_empty() {
                let item = remaining.remove(0);
                batch_area += &item.w * &item.d;
                batch.push(item);
            }
            let rects: Vec<Rect2D> = batch
                .iter()
                .map(|i| Rect2D::new(i.id.clone(), i.w.clone(), i.d.clone()))
                .collect();
            let widened = &cont.w + &two_mu;
            let (shelves, _) = nfdh_2d(&rects, &widened)?;
            let mut members = Vec::new();
            for shelf in shelves {
                for m in shelf.members {
                    if &m.x + &m.w > cont.w || &m.y + &m.h > cont.d {
                        overflow.push(m.id.clone());
                        continue;
                    }
                    let item = batch.iter().find(|i| i.id == m.id).expect("batch member");
                    members.push(PlacedTiny {
                        id: m.id.clone(),
                        container: cont.container,
                        x: m.x.clone(),
                        y: m.y.clone(),
                        z: &level - &item.h,
                    });
                }
            }
            layers.push((level.clone(), tallest, members));
        }

        // Tall-not-sliced pass: translate layers by the accumulated shift
        // and align each tall layer's top to a multiple of its height.
        let mut h_s = Rat::zero();
        let mut top_after = Rat::zero();
        for (layer_top, tallest, members) in &mut layers {
            let shifted_top = &*layer_top + &h_s;
            let new_top = if &*tallest > eps {
                let q = unit_fraction_q(tallest).ok_or_else(|| {
                    Error::Precondition(format!(
                        "tall tiny height {tallest} is not of the form 1/q"
                    ))
                })?;
                let step = Rat::new(BigInt::one(), q);
                let aligned = (&shifted_top / &step).ceil() * &step;
                h_s += &aligned - &shifted_top;
                aligned
            } else {
                shifted_top
            };
            let delta = &new_top - &*layer_top;
            for m in members.iter_mut() {
                m.z += &delta;
            }
            if new_top > top_after {
                top_after = new_top;
            }
            placements.extend(members.iter().cloned());
        }
        let over = top_after - rint(cont.height as i64);
        if over.is_positive() {
            extensions[c_idx] = over;
        }
    }
    Ok(TinyPlacementResult { placements, overflow, extensions })
}
