//! Exact brute-force packing decisions for tiny instances.
//!
//! Feasibility of a single bin is decided by a complete search over
//! canonical placements: in any packing normalized by pushing every item
//! towards -x/-y/-z until blocked, each coordinate is a subset sum of other
//! items' extents. Optimal bin counts come from a partition search with
//! symmetry pruning. Both are exact on instances up to the configured cap.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::geometry::{
    verify_packing, BinSpec, Item, ItemTable, Orientation, Packing, Placement,
};
use crate::rational::Rat;
use num_traits::Zero;

/// Caps keeping the exhaustive searches at desk scale.
#[derive(Debug, Clone)]
pub struct OracleLimits {
    pub max_items: usize,
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_items: 6, node_budget: 4_000_000 }
    }
}

/// Decides whether all items fit into one bin; returns a witness packing
/// when they do.
pub fn oracle_fits_one_bin(
    items: &[Item],
    bin: &BinSpec,
    allow_rotations: bool,
    limits: &OracleLimits,
) -> Result<Option<Packing>> {
    if items.len() > limits.max_items {
        return Err(Error::Precondition(format!(
            "oracle cap is {} items, got {}",
            limits.max_items,
            items.len()
        )));
    }
    if items.is_empty() {
        return Ok(Some(Packing::new_bins(bin.clone())));
    }
    let volume = crate::geometry::total_volume(items.iter());
    if volume > &bin.w * &bin.d * &bin.h {
        return Ok(None);
    }
    // Two boxes sharing a bin must be separable along some axis; a pair
    // with no separating axis in any orientation rules the bin out.
    for (i, a) in items.iter().enumerate() {
        for b in &items[i + 1..] {
            if !can_coexist(a, b, bin, allow_rotations) {
                return Ok(None);
            }
        }
    }

    let mut order: Vec<&Item> = items.iter().collect();
    order.sort_by(|a, b| b.volume().cmp(&a.volume()).then_with(|| a.id.cmp(&b.id)));

    let dims_for_axis = |f: fn(&Item) -> &Rat| -> Vec<Rat> {
        if allow_rotations {
            order
                .iter()
                .flat_map(|i| [i.w.clone(), i.d.clone(), i.h.clone()])
                .collect()
        } else {
            order.iter().map(|i| f(i).clone()).collect()
        }
    };
    let xs = subset_sums(&dims_for_axis(|i| &i.w), &bin.w);
    let ys = subset_sums(&dims_for_axis(|i| &i.d), &bin.d);
    let zs = subset_sums(&dims_for_axis(|i| &i.h), &bin.h);

    let mut state = SearchState {
        order: &order,
        xs: &xs,
        ys: &ys,
        zs: &zs,
        bin,
        allow_rotations,
        placed: Vec::new(),
        budget: limits.node_budget,
    };
    if state.place(0) {
        let mut packing = Packing::new_bins(bin.clone());
        for p in &state.placed {
            packing.push(Placement {
                item: order[p.order_idx].id.clone(),
                bin: 0,
                x: p.lo[0].clone(),
                y: p.lo[1].clone(),
                z: p.lo[2].clone(),
                orientation: p.orientation,
            });
        }
        debug_assert!({
            let table = ItemTable::new(items.to_vec())?;
            verify_packing(&packing, &table)?.feasible
        });
        Ok(Some(packing))
    } else if state.budget == 0 {
        Err(Error::BudgetExhausted("single-bin oracle search".into()))
    } else {
        Ok(None)
    }
}

/// One placed box in the search: low corner plus cached high corner.
struct PlacedBox {
    order_idx: usize,
    orientation: Orientation,
    lo: [Rat; 3],
    hi: [Rat; 3],
}

struct SearchState<'a> {
    order: &'a [&'a Item],
    xs: &'a [Rat],
    ys: &'a [Rat],
    zs: &'a [Rat],
    bin: &'a BinSpec,
    allow_rotations: bool,
    placed: Vec<PlacedBox>,
    budget: u64,
}

impl<'a> SearchState<'a> {
    fn place(&mut self, idx: usize) -> bool {
        if idx == self.order.len() {
            return true;
        }
        let item = self.order[idx];
        let orientations: Vec<Orientation> = if self.allow_rotations {
            distinct_orientations(item)
        } else {
            vec![Orientation::Xyz]
        };
        // Interchangeable duplicates are forced into lexicographic position
        // order.
        let has_min = idx > 0 && same_shape(self.order[idx - 1], item, self.allow_rotations);
        for orientation in orientations {
            let (ex, ey, ez) = orientation.extents(item);
            for x in self.xs {
                let hx = x + &ex;
                if hx > self.bin.w {
                    continue;
                }
                for y in self.ys {
                    let hy = y + &ey;
                    if hy > self.bin.d {
                        continue;
                    }
                    'zs: for z in self.zs {
                        if self.budget == 0 {
                            return false;
                        }
                        self.budget -= 1;
                        let hz = z + &ez;
                        if hz > self.bin.h {
                            continue;
                        }
                        if has_min {
                            let prev = &self.placed[idx - 1];
                            if (x, y, z) < (&prev.lo[0], &prev.lo[1], &prev.lo[2]) {
                                continue;
                            }
                        }
                        for prev in &self.placed {
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
                        self.placed.push(PlacedBox {
                            order_idx: idx,
                            orientation,
                            lo: [x.clone(), y.clone(), z.clone()],
                            hi: [hx.clone(), hy.clone(), hz.clone()],
                        });
                        if self.place(idx + 1) {
                            return true;
                        }
                        self.placed.pop();
                    }
                }
            }
        }
        false
    }
}

fn can_coexist(a: &Item, b: &Item, bin: &BinSpec, allow_rotations: bool) -> bool {
    let orients_a = if allow_rotations { distinct_orientations(a) } else { vec![Orientation::Xyz] };
    let orients_b = if allow_rotations { distinct_orientations(b) } else { vec![Orientation::Xyz] };
    for oa in &orients_a {
        let (ax, ay, az) = oa.extents(a);
        for ob in &orients_b {
            let (bx, by, bz) = ob.extents(b);
            if &ax + &bx <= bin.w || &ay + &by <= bin.d || &az + &bz <= bin.h {
                return true;
            }
        }
    }
    false
}

fn same_shape(a: &Item, b: &Item, up_to_rotation: bool) -> bool {
    if up_to_rotation {
        let mut da = [a.w.clone(), a.d.clone(), a.h.clone()];
        let mut db = [b.w.clone(), b.d.clone(), b.h.clone()];
        da.sort();
        db.sort();
        da == db
    } else {
        a.w == b.w && a.d == b.d && a.h == b.h
    }
}

fn distinct_orientations(item: &Item) -> Vec<Orientation> {
    let mut seen: Vec<(Rat, Rat, Rat)> = Vec::new();
    let mut result = Vec::new();
    for o in Orientation::ALL {
        let e = o.extents(item);
        if !seen.contains(&e) {
            seen.push(e);
            result.push(o);
        }
    }
    result
}

fn subset_sums(values: &[Rat], limit: &Rat) -> Vec<Rat> {
    let mut sums: BTreeSet<Rat> = BTreeSet::new();
    sums.insert(Rat::zero());
    for v in values {
        let additions: Vec<Rat> = sums.iter().map(|s| s + v).filter(|s| s < limit).collect();
        sums.extend(additions);
        if sums.len() > 20_000 {
            break;
        }
    }
    sums.into_iter().collect()
}

/// Minimum number of bins needed, up to `max_bins`, with a witness packing.
/// Exact: searches set partitions with symmetry pruning, deciding each
/// group with the single-bin oracle.
pub fn oracle_opt_bins(
    items: &[Item],
    bin: &BinSpec,
    max_bins: usize,
    allow_rotations: bool,
    limits: &OracleLimits,
) -> Result<Option<(usize, Packing)>> {
    if items.len() > limits.max_items {
        return Err(Error::Precondition(format!(
            "oracle cap is {} items, got {}",
            limits.max_items,
            items.len()
        )));
    }
    if items.is_empty() {
        return Ok(Some((0, Packing::new_bins(bin.clone()))));
    }
    let mut searcher = PartitionSearch {
        items,
        bin,
        allow_rotations,
        limits,
        feasibility_cache: HashMap::new(),
        best: None,
        groups: Vec::new(),
    };
    searcher.assign(0, max_bins)?;
    match searcher.best {
        None => Ok(None),
        Some((count, groups)) => {
            let mut packing = Packing::new_bins(bin.clone());
            for (bin_idx, group) in groups.iter().enumerate() {
                let members: Vec<Item> = group.iter().map(|&i| items[i].clone()).collect();
                let witness = oracle_fits_one_bin(&members, bin, allow_rotations, limits)?
                    .expect("cached-feasible group must pack");
                for mut p in witness.placements {
                    p.bin = bin_idx;
                    packing.push(p);
                }
            }
            Ok(Some((count, packing)))
        }
    }
}

struct PartitionSearch<'a> {
    items: &'a [Item],
    bin: &'a BinSpec,
    allow_rotations: bool,
    limits: &'a OracleLimits,
    feasibility_cache: HashMap<Vec<usize>, bool>,
    best: Option<(usize, Vec<Vec<usize>>)>,
    groups: Vec<Vec<usize>>,
}

impl<'a> PartitionSearch<'a> {
    fn group_feasible(&mut self, group: &[usize]) -> Result<bool> {
        let key: Vec<usize> = group.to_vec();
        if let Some(&known) = self.feasibility_cache.get(&key) {
            return Ok(known);
        }
        let members: Vec<Item> = group.iter().map(|&i| self.items[i].clone()).collect();
        let feasible =
            oracle_fits_one_bin(&members, self.bin, self.allow_rotations, self.limits)?.is_some();
        self.feasibility_cache.insert(key, feasible);
        Ok(feasible)
    }

    fn assign(&mut self, idx: usize, max_bins: usize) -> Result<()> {
        if let Some((best, _)) = &self.best {
            if self.groups.len() >= *best {
                return Ok(());
            }
        }
        if idx == self.items.len() {
            let count = self.groups.len();
            let better = self.best.as_ref().map(|(b, _)| count < *b).unwrap_or(true);
            if better {
                self.best = Some((count, self.groups.clone()));
            }
            return Ok(());
        }
        // Existing groups first, then (canonically) at most one new group.
        for g in 0..self.groups.len() {
            self.groups[g].push(idx);
            let feasible = self.group_feasible(&self.groups[g].clone())?;
            if feasible {
                self.assign(idx + 1, max_bins)?;
            }
            self.groups[g].pop();
        }
        if self.groups.len() < max_bins {
            self.groups.push(vec![idx]);
            if self.group_feasible(&[idx])? {
                self.assign(idx + 1, max_bins)?;
            }
            self.groups.pop();
        }
        Ok(())
    }
}

/// Grid-restricted exhaustive search used to cross-validate the canonical
/// placement scheme on instances whose dimensions are multiples of `1/q`.
pub fn oracle_fits_one_bin_grid(
    items: &[Item],
    bin: &BinSpec,
    grid_q: i64,
    limits: &OracleLimits,
) -> Result<Option<Packing>> {
    if items.len() > limits.max_items {
        return Err(Error::Precondition("grid oracle cap exceeded".into()));
    }
    if items.is_empty() {
        return Ok(Some(Packing::new_bins(bin.clone())));
    }
    let step = crate::rational::rat(1, grid_q);
    let grid = |limit: &Rat| -> Vec<Rat> {
        let mut out = Vec::new();
        let mut v = Rat::zero();
        while &v < limit {
            out.push(v.clone());
            v += &step;
        }
        out
    };
    let xs = grid(&bin.w);
    let ys = grid(&bin.d);
    let zs = grid(&bin.h);
    let mut order: Vec<&Item> = items.iter().collect();
    order.sort_by(|a, b| b.volume().cmp(&a.volume()).then_with(|| a.id.cmp(&b.id)));
    let mut state = SearchState {
        order: &order,
        xs: &xs,
        ys: &ys,
        zs: &zs,
        bin,
        allow_rotations: false,
        placed: Vec::new(),
        budget: limits.node_budget,
    };
    if state.place(0) {
        let mut packing = Packing::new_bins(bin.clone());
        for p in &state.placed {
            packing.push(Placement {
                item: order[p.order_idx].id.clone(),
                bin: 0,
                x: p.lo[0].clone(),
                y: p.lo[1].clone(),
                z: p.lo[2].clone(),
                orientation: p.orientation,
            });
        }
        Ok(Some(packing))
    } else if state.budget == 0 {
        Err(Error::BudgetExhausted("grid oracle search".into()))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube(id: &str, side: (i64, i64)) -> Item {
        Item::new(id, rat(side.0, side.1), rat(side.0, side.1), rat(side.0, side.1))
    }

    #[test]
    fn eight_half_cubes_fit() {
        let items: Vec<Item> = (0..8).map(|i| cube(&format!("c{i}"), (1, 2))).collect();
        let limits = OracleLimits { max_items: 8, ..Default::default() };
        let witness = oracle_fits_one_bin(&items, &BinSpec::unit(), false, &limits)
            .unwrap()
            .expect("2x2x2 grid exists");
        let table = ItemTable::new(items).unwrap();
        assert!(verify_packing(&witness, &table).unwrap().feasible);
    }

    #[test]
    fn two_fat_items_do_not_fit() {
        let items = vec![cube("a", (3, 5)), cube("b", (3, 5))];
        let result =
            oracle_fits_one_bin(&items, &BinSpec::unit(), false, &OracleLimits::default()).unwrap();
        assert!(result.is_none());
    }

    #[test]
    fn heights_exceeding_one_do_not_fit() {
        let items = vec![
            Item::new("a", rint(1), rint(1), rat(1, 2)),
            Item::new("b", rint(1), rint(1), rat(3, 5)),
        ];
        let result =
            oracle_fits_one_bin(&items, &BinSpec::unit(), false, &OracleLimits::default()).unwrap();
        assert!(result.is_none());
    }

    #[test]
    fn rotation_allows_fit() {
        // 1 x 0.4 x 0.4 and 0.4 x 1 x 0.7: without rotations x-extents force
        // overlap in a unit bin only if... construct a case solvable only by
        // rotating the second item.
        let items = vec![
            Item::new("a", rint(1), rint(1), rat(3, 5)),
            Item::new("b", rat(2, 5), rat(2, 5), rat(1, 2)),
        ];
        // b is 0.5 tall; stacked on a gives 1.1 - infeasible without turning b.
        let upright =
            oracle_fits_one_bin(&items, &BinSpec::unit(), false, &OracleLimits::default()).unwrap();
        assert!(upright.is_none());
        let rotated =
            oracle_fits_one_bin(&items, &BinSpec::unit(), true, &OracleLimits::default())
                .unwrap()
                .expect("laying b on its side fits");
        let table = ItemTable::new(items).unwrap();
        assert!(verify_packing(&rotated, &table).unwrap().feasible);
    }

    #[test]
    fn opt_bins_examples() {
        let limits = OracleLimits { max_items: 8, ..Default::default() };
        let two_fat = vec![cube("a", (3, 5)), cube("b", (3, 5))];
        let (opt, _) = oracle_opt_bins(&two_fat, &BinSpec::unit(), 4, false, &limits)
            .unwrap()
            .unwrap();
        assert_eq!(opt, 2);

        let eight: Vec<Item> = (0..8).map(|i| cube(&format!("c{i}"), (1, 2))).collect();
        let (opt, witness) = oracle_opt_bins(&eight, &BinSpec::unit(), 4, false, &limits)
            .unwrap()
            .unwrap();
        assert_eq!(opt, 1);
        let table = ItemTable::new(eight).unwrap();
        assert!(verify_packing(&witness, &table).unwrap().feasible);

        let mixed = vec![cube("a", (3, 5)), cube("b", (3, 5)), cube("c", (3, 10))];
        let (opt, _) = oracle_opt_bins(&mixed, &BinSpec::unit(), 4, false, &limits)
            .unwrap()
            .unwrap();
        assert_eq!(opt, 2);
    }

    #[test]
    fn opt_bins_monotone_under_item_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0bac);
        let limits = OracleLimits::default();
        for case in 0..20 {
            let mut items: Vec<Item> = Vec::new();
            let mut prev_opt = 0usize;
            for i in 0..4 {
                items.push(Item::new(
                    format!("m{case}_{i}"),
                    rat(rng.gen_range(1..=12), 12),
                    rat(rng.gen_range(1..=12), 12),
                    rat(rng.gen_range(1..=12), 12),
                ));
                let (opt, _) = oracle_opt_bins(&items, &BinSpec::unit(), 6, false, &limits)
                    .unwrap()
                    .unwrap();
                assert!(opt >= prev_opt, "opt dropped after adding an item");
                prev_opt = opt;
            }
        }
    }

    #[test]
    fn canonical_matches_grid_search_on_twelfths() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x96d);
        let limits = OracleLimits::default();
        for case in 0..40 {
            let n = rng.gen_range(1..=4);
            let items: Vec<Item> = (0..n)
                .map(|i| {
                    Item::new(
                        format!("g{case}_{i}"),
                        rat(rng.gen_range(1..=12), 12),
                        rat(rng.gen_range(1..=12), 12),
                        rat(rng.gen_range(1..=12), 12),
                    )
                })
                .collect();
            let canonical = oracle_fits_one_bin(&items, &BinSpec::unit(), false, &limits)
                .unwrap()
                .is_some();
            let grid = oracle_fits_one_bin_grid(&items, &BinSpec::unit(), 12, &limits)
                .unwrap()
                .is_some();
            assert_eq!(canonical, grid, "case {case}: canonical != grid");
        }
    }
}
