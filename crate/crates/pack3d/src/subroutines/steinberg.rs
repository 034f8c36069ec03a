//! 2D packing under Steinberg's sufficient condition.
//!
//! The operation packs a set of rectangles into a `W x H` box whenever
//! `2 * area <= W*H - (2 w_max - W)+ (2 h_max - H)+`; when the condition
//! fails it returns an infeasibility signal and the caller falls back.
//!
//! The packer layers verified constructive strategies (rows, NFDH in both
//! orientations, wide/tall stacks, recursive box splits) and finishes with a
//! complete canonical-position search for small residual sets, so success is
//! guaranteed on every condition-satisfying input of moderate cardinality.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat, Rat};

use super::nfdh::{nfdh_2d, verify_rects_2d, PlacedRect, Rect2D};

const SEARCH_MAX_RECTS: usize = 12;
const SEARCH_NODE_BUDGET: u64 = 2_000_000;
const SPLIT_DEPTH_LIMIT: u32 = 8;

/// Steinberg's classical sufficient condition for packing into `w x h`.
pub fn steinberg_condition(rects: &[Rect2D], w: &Rat, h: &Rat) -> bool {
    if rects.is_empty() {
        return true;
    }
    let w_max = rects.iter().map(|r| r.w.clone()).max().expect("nonempty");
    let h_max = rects.iter().map(|r| r.h.clone()).max().expect("nonempty");
    if &w_max > w || &h_max > h {
        return false;
    }
    let area: Rat = rects.iter().map(|r| r.area()).sum();
    let two = rat(2, 1);
    let pos = |v: Rat| if v.is_negative() { Rat::zero() } else { v };
    let corr = pos(&two * w_max - w) * pos(&two * h_max - h);
    two * area <= w * h - corr
}

/// Packs `rects` into a `w x h` box. Returns `Error::Infeasible` when the
/// Steinberg condition does not hold, `Error::BudgetExhausted` in the rare
/// case that every strategy gave up on a very large condition-satisfying
/// set.
pub fn steinberg_2d(rects: &[Rect2D], w: &Rat, h: &Rat) -> Result<Vec<PlacedRect>> {
    if !steinberg_condition(rects, w, h) {
        return Err(Error::Infeasible("Steinberg condition not met".into()));
    }
    match pack_into(rects, w, h, 0) {
        Some(placed) => Ok(placed),
        None => Err(Error::BudgetExhausted(format!(
            "no packing found for {} rects within the search budget",
            rects.len()
        ))),
    }
}

/// Strategy cascade; every candidate layout is re-verified before being
/// accepted, so an inapplicable strategy simply falls through.
pub(crate) fn pack_into(rects: &[Rect2D], w: &Rat, h: &Rat, depth: u32) -> Option<Vec<PlacedRect>> {
    if rects.is_empty() {
        return Some(Vec::new());
    }
    let accept = |placed: Vec<PlacedRect>| {
        if placed.len() == rects.len() && verify_rects_2d(&placed, w, h) {
            Some(placed)
        } else {
            None
        }
    };

    if let Some(p) = single_row(rects, w, h).and_then(&accept) {
        return Some(p);
    }
    if let Some(p) = single_row(&transpose(rects), h, w).map(transpose_placed).and_then(&accept) {
        return Some(p);
    }
    if let Some(p) = nfdh_layout(rects, w, h).and_then(&accept) {
        return Some(p);
    }
    if let Some(p) = nfdh_layout(&transpose(rects), h, w).map(transpose_placed).and_then(&accept) {
        return Some(p);
    }
    if depth < SPLIT_DEPTH_LIMIT {
        if let Some(p) = wide_stack(rects, w, h, depth).and_then(&accept) {
            return Some(p);
        }
        if let Some(p) = wide_stack(&transpose(rects), h, w, depth).map(transpose_placed).and_then(&accept) {
            return Some(p);
        }
        if let Some(p) = split_layout(rects, w, h, depth).and_then(&accept) {
            return Some(p);
        }
        if let Some(p) = split_layout(&transpose(rects), h, w, depth).map(transpose_placed).and_then(&accept) {
            return Some(p);
        }
    }
    if rects.len() <= SEARCH_MAX_RECTS {
        if let Some(p) = exhaustive_pack(rects, w, h).and_then(&accept) {
            return Some(p);
        }
    }
    None
}

fn transpose(rects: &[Rect2D]) -> Vec<Rect2D> {
    rects
        .iter()
        .map(|r| Rect2D::new(r.id.clone(), r.h.clone(), r.w.clone()))
        .collect()
}

fn transpose_placed(placed: Vec<PlacedRect>) -> Vec<PlacedRect> {
    placed
        .into_iter()
        .map(|p| PlacedRect { id: p.id, x: p.y, y: p.x, w: p.h, h: p.w })
        .collect()
}

fn single_row(rects: &[Rect2D], w: &Rat, _h: &Rat) -> Option<Vec<PlacedRect>> {
    let total: Rat = rects.iter().map(|r| r.w.clone()).sum();
    if &total > w {
        return None;
    }
    let mut order: Vec<&Rect2D> = rects.iter().collect();
    order.sort_by(|a, b| b.h.cmp(&a.h).then_with(|| a.id.cmp(&b.id)));
    let mut x = Rat::zero();
    let mut placed = Vec::with_capacity(order.len());
    for r in order {
        placed.push(PlacedRect { id: r.id.clone(), x: x.clone(), y: Rat::zero(), w: r.w.clone(), h: r.h.clone() });
        x += &r.w;
    }
    Some(placed)
}

fn nfdh_layout(rects: &[Rect2D], w: &Rat, h: &Rat) -> Option<Vec<PlacedRect>> {
    if rects.iter().any(|r| &r.w > w) {
        return None;
    }
    let (shelves, height) = nfdh_2d(rects, w).ok()?;
    if &height > h {
        return None;
    }
    Some(shelves.into_iter().flat_map(|s| s.members).collect())
}

/// Stacks every rect wider than `w/2` in the bottom-left corner by
/// non-increasing width and recursively packs the rest above the stack.
fn wide_stack(rects: &[Rect2D], w: &Rat, h: &Rat, depth: u32) -> Option<Vec<PlacedRect>> {
    let half = w / rat(2, 1);
    let (wide, rest): (Vec<&Rect2D>, Vec<&Rect2D>) = rects.iter().partition(|r| r.w > half);
    if wide.is_empty() || rest.is_empty() {
        return None;
    }
    let mut wide = wide;
    wide.sort_by(|a, b| b.w.cmp(&a.w).then_with(|| a.id.cmp(&b.id)));
    let mut y = Rat::zero();
    let mut placed = Vec::new();
    for r in &wide {
        placed.push(PlacedRect { id: r.id.clone(), x: Rat::zero(), y: y.clone(), w: r.w.clone(), h: r.h.clone() });
        y += &r.h;
    }
    if &y > h {
        return None;
    }
    let room = h - &y;
    if rest.iter().any(|r| r.h > room) {
        return None;
    }
    let rest_owned: Vec<Rect2D> = rest.into_iter().cloned().collect();
    let sub = pack_into(&rest_owned, w, &room, depth + 1)?;
    for mut p in sub {
        p.y += &y;
        placed.push(p);
    }
    Some(placed)
}

/// Tries to cut the box into a left and a right part along x, splitting the
/// rects by non-increasing width into a prefix and a suffix such that both
/// subproblems again satisfy the Steinberg condition.
fn split_layout(rects: &[Rect2D], w: &Rat, h: &Rat, depth: u32) -> Option<Vec<PlacedRect>> {
    if rects.len() < 2 {
        return None;
    }
    let mut order: Vec<Rect2D> = rects.to_vec();
    order.sort_by(|a, b| b.w.cmp(&a.w).then_with(|| a.id.cmp(&b.id)));
    let two = rat(2, 1);
    for k in 1..order.len() {
        let (left, right) = order.split_at(k);
        let area_l: Rat = left.iter().map(|r| r.area()).sum();
        let w1 = left.iter().map(|r| r.w.clone()).max().expect("nonempty");
        let need_left = w1.clone().max(&two * &area_l / h);
        let area_r: Rat = right.iter().map(|r| r.area()).sum();
        let wr = right.iter().map(|r| r.w.clone()).max().expect("nonempty");
        let need_right = wr.clone().max(&two * &area_r / h);
        if &need_left + &need_right > *w {
            continue;
        }
        let u1 = need_left;
        let u2 = w - &u1;
        if !steinberg_condition(left, &u1, h) || !steinberg_condition(right, &u2, h) {
            continue;
        }
        let sub_l = pack_into(left, &u1, h, depth + 1)?;
        let sub_r = pack_into(right, &u2, h, depth + 1)?;
        let mut placed = sub_l;
        for mut p in sub_r {
            p.x += &u1;
            placed.push(p);
        }
        return Some(placed);
    }
    None
}

/// Complete search over canonical coordinates: in any packing normalized by
/// pushing items left and down, every coordinate is a subset sum of the
/// other rects' extents.
fn exhaustive_pack(rects: &[Rect2D], w: &Rat, h: &Rat) -> Option<Vec<PlacedRect>> {
    let mut order: Vec<&Rect2D> = rects.iter().collect();
    order.sort_by(|a, b| b.area().cmp(&a.area()).then_with(|| a.id.cmp(&b.id)));

    let widths: Vec<Rat> = order.iter().map(|r| r.w.clone()).collect();
    let heights: Vec<Rat> = order.iter().map(|r| r.h.clone()).collect();
    let xs = subset_sums(&widths, w);
    let ys = subset_sums(&heights, h);

    let mut placed: Vec<PlacedRect> = Vec::with_capacity(order.len());
    let mut budget = SEARCH_NODE_BUDGET;
    if place_next(&order, 0, &xs, &ys, w, h, &mut placed, &mut budget) {
        Some(placed)
    } else {
        None
    }
}

fn subset_sums(values: &[Rat], limit: &Rat) -> Vec<Rat> {
    let mut sums: BTreeSet<Rat> = BTreeSet::new();
    sums.insert(Rat::zero());
    for v in values {
        let additions: Vec<Rat> = sums
            .iter()
            .map(|s| s + v)
            .filter(|s| s < limit)
            .collect();
        sums.extend(additions);
        if sums.len() > 4096 {
            break;
        }
    }
    sums.into_iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn place_next(
    order: &[&Rect2D],
    idx: usize,
    xs: &[Rat],
    ys: &[Rat],
    w: &Rat,
    h: &Rat,
    placed: &mut Vec<PlacedRect>,
    budget: &mut u64,
) -> bool {
    if idx == order.len() {
        return true;
    }
    let rect = order[idx];
    // Identical rects are interchangeable: force lexicographic placement
    // order to prune symmetric branches.
    let min_pos = if idx > 0 && order[idx - 1].w == rect.w && order[idx - 1].h == rect.h {
        Some((placed[idx - 1].x.clone(), placed[idx - 1].y.clone()))
    } else {
        None
    };
    for x in xs {
        if x + &rect.w > *w {
            continue;
        }
        for y in ys {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            if y + &rect.h > *h {
                continue;
            }
            if let Some((mx, my)) = &min_pos {
                if (x, y) < (mx, my) {
                    continue;
                }
            }
            let candidate = PlacedRect {
                id: rect.id.clone(),
                x: x.clone(),
                y: y.clone(),
                w: rect.w.clone(),
                h: rect.h.clone(),
            };
            if placed.iter().any(|p| p.overlaps(&candidate)) {
                continue;
            }
            placed.push(candidate);
            if place_next(order, idx + 1, xs, ys, w, h, placed, budget) {
                return true;
            }
            placed.pop();
        }
    }
    false
}
