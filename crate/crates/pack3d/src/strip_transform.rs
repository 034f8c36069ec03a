//! Transformations between strip packings and bin packings.
//!
//! The naive cut slices a strip at integer heights, sending each unit
//! segment to its own bin and each plane's sliced layer to an extra bin.
//! The epsilon-layers cut requires every sliced item to be short and packs
//! the sliced layers of `1/eps` consecutive planes into one shared bin. The
//! alignment helper stacks harmonically rounded items so that no tall item
//! ever crosses an integer plane.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Axis, BinSpec, ItemId, ItemTable, Packing, PackingKind, Placement};
use crate::rational::{rint, unit_fraction_q, Rat};

/// Cutting strategy for [`cut_strip_to_bins`].
#[derive(Debug, Clone)]
pub enum CutMode {
    /// Segment bins plus one bin per sliced plane; at most `2 ceil(H)` bins.
    NaiveDouble,
    /// Requires every sliced item to have height at most epsilon; sliced
    /// layers of `1/eps` consecutive planes share one extra bin.
    EpsilonLayers(Rat),
}

/// Result of cutting a strip packing into unit bins.
#[derive(Debug, Clone)]
pub struct CutResult {
    pub bins: Packing,
    /// Per integer plane (ascending), the ids of the items it sliced.
    pub sliced_item_sets: Vec<(u64, Vec<ItemId>)>,
    /// Number of bins that hold sliced layers rather than a strip segment.
    pub extra_bins_used: usize,
}

/// Cuts a feasible z-strip over a 1x1 base into unit bins.
pub fn cut_strip_to_bins(strip: &Packing, items: &ItemTable, mode: CutMode) -> Result<CutResult> {
    let axis = match strip.kind {
        PackingKind::Strip(Axis::Z) => Axis::Z,
        _ => {
            return Err(Error::Precondition(
                "cut_strip_to_bins expects a strip packing along z".into(),
            ))
        }
    };
    let _ = axis;

    // Partition placements into whole segments and sliced sets.
    let mut segments: Vec<Vec<Placement>> = Vec::new();
    let mut sliced: Vec<(u64, Vec<Placement>)> = Vec::new();
    for p in &strip.placements {
        let item = items.get(&p.item)?;
        let (_, _, ez) = p.orientation.extents(item);
        if ez > rint(1) {
            return Err(Error::Precondition(format!(
                "item {:?} is taller than a bin",
                p.item
            )));
        }
        let low = p.z.clone();
        let high = &p.z + &ez;
        let floor_low = low.floor().to_integer();
        let seg = floor_low.to_u64().ok_or_else(|| {
            Error::Precondition(format!("negative placement for {:?}", p.item))
        })?;
        // The first plane strictly inside (low, high), if any.
        let plane = &floor_low + BigInt::one();
        if Rat::from_integer(plane.clone()) < high {
            let plane = plane.to_u64().expect("plane fits u64");
            match sliced.iter_mut().find(|(q, _)| *q == plane) {
                Some((_, set)) => set.push(p.clone()),
                None => sliced.push((plane, vec![p.clone()])),
            }
        } else {
            if segments.len() <= seg as usize {
                segments.resize(seg as usize + 1, Vec::new());
            }
            segments[seg as usize].push(p.clone());
        }
    }
    sliced.sort_by_key(|(q, _)| *q);

    let mut bins = Packing::new_bins(BinSpec::unit());
    let mut next_bin = 0usize;
    let mut extra_bins = 0usize;

    match mode {
        CutMode::NaiveDouble => {
            // Interleave segment bins and slice bins in plane order, skipping
            // empty slots so bin indices stay dense. The walk must extend to
            // the highest sliced plane even when no segment reaches it.
            let max_plane = sliced.last().map(|(q, _)| *q as usize).unwrap_or(0);
            let empty_segment: Vec<Placement> = Vec::new();
            let mut slice_iter = sliced.iter().peekable();
            for seg_idx in 0..segments.len().max(max_plane) {
                let seg = segments.get(seg_idx).unwrap_or(&empty_segment);
                if !seg.is_empty() {
                    for p in seg {
                        let mut q = p.clone();
                        q.bin = next_bin;
                        q.z = &p.z - rint(seg_idx as i64);
                        bins.push(q);
                    }
                    next_bin += 1;
                }
                let plane = seg_idx as u64 + 1;
                while let Some((pq, set)) = slice_iter.peek() {
                    if *pq != plane {
                        break;
                    }
                    for p in set.iter() {
                        let mut q = p.clone();
                        q.bin = next_bin;
                        q.z = Rat::zero();
                        bins.push(q);
                    }
                    next_bin += 1;
                    extra_bins += 1;
                    slice_iter.next();
                }
            }
        }
        CutMode::EpsilonLayers(ref eps) => {
            if !eps.is_positive() {
                return Err(Error::Precondition("epsilon must be positive".into()));
            }
            for (plane, set) in &sliced {
                for p in set {
                    let item = items.get(&p.item)?;
                    let (_, _, ez) = p.orientation.extents(item);
                    if &ez > eps {
                        return Err(Error::Precondition(format!(
                            "sliced item {:?} has height {} > epsilon {} at plane {}",
                            p.item, ez, eps, plane
                        )));
                    }
                }
            }
            for (seg_idx, seg) in segments.iter().enumerate() {
                if seg.is_empty() {
                    continue;
                }
                for p in seg {
                    let mut q = p.clone();
                    q.bin = next_bin;
                    q.z = &p.z - rint(seg_idx as i64);
                    bins.push(q);
                }
                next_bin += 1;
            }
            // 1/eps layers of height eps stack inside one bin.
            let per_bin = (rint(1) / eps).floor().to_integer().to_u64().unwrap_or(1).max(1);
            for chunk in sliced.chunks(per_bin as usize) {
                let mut level = Rat::zero();
                for (_, set) in chunk {
                    for p in set {
                        let mut q = p.clone();
                        q.bin = next_bin;
                        q.z = level.clone();
                        bins.push(q);
                    }
                    level += eps;
                }
                next_bin += 1;
                extra_bins += 1;
            }
        }
    }

    Ok(CutResult {
        bins,
        sliced_item_sets: sliced
            .into_iter()
            .map(|(q, set)| (q, set.into_iter().map(|p| p.item).collect()))
            .collect(),
        extra_bins_used: extra_bins,
    })
}

/// A stack of items aligned so that tall rounded items never cross integer
/// planes.
#[derive(Debug, Clone)]
pub struct AlignedStack {
    /// `(item id, bottom z, height)` in stack order.
    pub placements: Vec<(ItemId, Rat, Rat)>,
    pub gap_total: Rat,
    pub top: Rat,
}

/// Stacks items (given as `(id, height)`, sorted by non-increasing height)
/// and shifts the first item of each tall height `1/q`, `q >= 3`, so its
/// bottom lands on a multiple of `1/q`.
pub fn align_stack_tall(items: &[(ItemId, Rat)], eps: &Rat) -> Result<AlignedStack> {
    for win in items.windows(2) {
        if win[0].1 < win[1].1 {
            return Err(Error::Precondition(
                "align_stack_tall requires non-increasing heights".into(),
            ));
        }
    }
    let mut z = Rat::zero();
    let mut gap_total = Rat::zero();
    let mut aligned_qs: Vec<BigInt> = Vec::new();
    let mut placements = Vec::with_capacity(items.len());
    for (id, h) in items {
        if h > eps {
            let q = unit_fraction_q(h).ok_or_else(|| {
                Error::Precondition(format!(
                    "tall item {id:?} has height {h}, not of the form 1/q"
                ))
            })?;
            if q >= BigInt::from(3) && !aligned_qs.contains(&q) {
                let step = Rat::new(BigInt::one(), q.clone());
                let target = (&z / &step).ceil() * &step;
                gap_total += &target - &z;
                z = target;
                aligned_qs.push(q);
            }
        }
        placements.push((id.clone(), z.clone(), h.clone()));
        z += h;
    }
    Ok(AlignedStack { placements, gap_total, top: z })
}

/// Witness for a tall item with an integer plane in its interior.
#[derive(Debug, Clone)]
pub struct SliceWitness {
    pub item: ItemId,
    pub plane: BigInt,
}

/// True iff no interval with height exceeding `eps` contains an integer in
/// its open interior. Works on any `(id, bottom, height)` triples.
pub fn check_tall_not_sliced_intervals(
    intervals: impl IntoIterator<Item = (ItemId, Rat, Rat)>,
    eps: &Rat,
) -> (bool, Vec<SliceWitness>) {
    let mut witnesses = Vec::new();
    for (id, z, h) in intervals {
        if &h <= eps {
            continue;
        }
        let top = &z + &h;
        let plane = z.floor().to_integer() + BigInt::one();
        if Rat::from_integer(plane.clone()) < top && Rat::from_integer(plane.clone()) > z {
            witnesses.push(SliceWitness { item: id, plane });
        }
    }
    (witnesses.is_empty(), witnesses)
}

/// [`check_tall_not_sliced_intervals`] applied to a packing's z-extents.
pub fn check_tall_not_sliced(
    packing: &Packing,
    items: &ItemTable,
    eps: &Rat,
) -> Result<(bool, Vec<SliceWitness>)> {
    let mut intervals = Vec::with_capacity(packing.placements.len());
    for p in &packing.placements {
        let item = items.get(&p.item)?;
        let (_, _, ez) = p.orientation.extents(item);
        intervals.push((p.item.clone(), p.z.clone(), ez));
    }
    Ok(check_tall_not_sliced_intervals(intervals, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{verify_packing, Item};
    use crate::rational::rat;

    fn table(items: Vec<Item>) -> ItemTable {
        ItemTable::new(items).unwrap()
    }

    fn strip_with(items: &ItemTable, placements: Vec<Placement>) -> Packing {
        let mut strip = Packing::new_strip(BinSpec::unit(), Axis::Z);
        for p in placements {
            strip.push(p);
        }
        assert!(verify_packing(&strip, items).unwrap().feasible);
        strip
    }

    #[test]
    fn clean_strip_cuts_without_extras() {
        // Heights 1, 1, 0.3 stacked: strip height 2.3, nothing crosses planes.
        let t = table(vec![
            Item::new("a", rint(1), rint(1), rint(1)),
            Item::new("b", rint(1), rint(1), rint(1)),
            Item::new("c", rint(1), rint(1), rat(3, 10)),
        ]);
        let strip = strip_with(
            &t,
            vec![
                Placement::new("a", 0, rint(0), rint(0), rint(0)),
                Placement::new("b", 0, rint(0), rint(0), rint(1)),
                Placement::new("c", 0, rint(0), rint(0), rint(2)),
            ],
        );
        let cut = cut_strip_to_bins(&strip, &t, CutMode::NaiveDouble).unwrap();
        assert_eq!(cut.bins.used_bins(), 3);
        assert_eq!(cut.extra_bins_used, 0);
        assert!(cut.sliced_item_sets.is_empty());
        assert!(verify_packing(&cut.bins, &t).unwrap().feasible);
    }

    #[test]
    fn crossing_item_goes_to_own_bin() {
        let t = table(vec![
            Item::new("a", rint(1), rint(1), rat(4, 5)),
            Item::new("b", rat(1, 2), rat(1, 2), rat(2, 5)),
        ]);
        // b spans [0.8, 1.2]: sliced by plane 1.
        let strip = strip_with(
            &t,
            vec![
                Placement::new("a", 0, rint(0), rint(0), rint(0)),
                Placement::new("b", 0, rint(0), rint(0), rat(4, 5)),
            ],
        );
        let cut = cut_strip_to_bins(&strip, &t, CutMode::NaiveDouble).unwrap();
        assert_eq!(cut.sliced_item_sets.len(), 1);
        assert_eq!(cut.sliced_item_sets[0].1, vec!["b".to_string()]);
        assert_eq!(cut.bins.used_bins(), 2);
        assert_eq!(cut.extra_bins_used, 1);
        assert!(verify_packing(&cut.bins, &t).unwrap().feasible);
    }

    #[test]
    fn epsilon_layers_group_planes() {
        // 8 planes each slicing one short item, eps = 1/4: two extra bins.
        let mut items = Vec::new();
        let mut placements = Vec::new();
        for i in 0..8u32 {
            let id = format!("s{i}");
            items.push(Item::new(id.clone(), rat(1, 2), rat(1, 2), rat(1, 5)));
            // spans [i+1-0.1, i+1+0.1]
            placements.push(Placement::new(id, 0, rint(0), rint(0), rat(10 * (i as i64 + 1) - 1, 10)));
        }
        let t = table(items);
        let strip = strip_with(&t, placements);
        let cut = cut_strip_to_bins(&strip, &t, CutMode::EpsilonLayers(rat(1, 4))).unwrap();
        assert_eq!(cut.sliced_item_sets.len(), 8);
        assert_eq!(cut.extra_bins_used, 2);
        assert!(verify_packing(&cut.bins, &t).unwrap().feasible);
    }

    #[test]
    fn epsilon_layers_reject_tall_sliced() {
        let t = table(vec![Item::new("a", rint(1), rint(1), rat(2, 5))]);
        let strip = strip_with(&t, vec![Placement::new("a", 0, rint(0), rint(0), rat(4, 5))]);
        assert!(cut_strip_to_bins(&strip, &t, CutMode::EpsilonLayers(rat(1, 4))).is_err());
    }

    #[test]
    fn align_hand_example() {
        // {1/2, 1/3, 1/3} -> [0,1/2], [2/3,1], [1,4/3]; gap 1/6.
        let items = vec![
            ("a".to_string(), rat(1, 2)),
            ("b".to_string(), rat(1, 3)),
            ("c".to_string(), rat(1, 3)),
        ];
        let stack = align_stack_tall(&items, &rat(1, 6)).unwrap();
        assert_eq!(stack.placements[0].1, rint(0));
        assert_eq!(stack.placements[1].1, rat(2, 3));
        assert_eq!(stack.placements[2].1, rint(1));
        assert_eq!(stack.gap_total, rat(1, 6));
        assert_eq!(stack.top, rat(4, 3));
        let (ok, _) = check_tall_not_sliced_intervals(
            stack.placements.iter().map(|(i, z, h)| (i.clone(), z.clone(), h.clone())),
            &rat(1, 6),
        );
        assert!(ok);
    }

    #[test]
    fn align_units_and_halves_do_not_shift() {
        let items = vec![("a".to_string(), rint(1)), ("b".to_string(), rint(1))];
        let stack = align_stack_tall(&items, &rat(1, 4)).unwrap();
        assert_eq!(stack.gap_total, rint(0));
        assert_eq!(stack.placements[1].1, rint(1));

        let single = vec![("a".to_string(), rat(1, 2))];
        let stack = align_stack_tall(&single, &rat(1, 4)).unwrap();
        assert_eq!(stack.top, rat(1, 2));
    }

    #[test]
    fn align_rejects_unsorted() {
        let items = vec![("a".to_string(), rat(1, 3)), ("b".to_string(), rat(1, 2))];
        assert!(align_stack_tall(&items, &rat(1, 6)).is_err());
    }

    #[test]
    fn tall_not_sliced_witnesses() {
        let (ok, wit) = check_tall_not_sliced_intervals(
            vec![("a".to_string(), rat(3, 4), rat(1, 2))],
            &rat(1, 4),
        );
        assert!(!ok);
        assert_eq!(wit[0].plane, BigInt::one());

        let (ok, _) = check_tall_not_sliced_intervals(
            vec![("a".to_string(), rat(1, 2), rat(1, 2))],
            &rat(1, 4),
        );
        assert!(ok);
    }
}
