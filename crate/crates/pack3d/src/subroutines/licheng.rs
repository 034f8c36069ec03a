//! Layered 3D strip packing with volume-based height guarantees.
//!
//! General mode packs any item set over a unit base into height at most
//! `4 v(T) + 8 h_max`; half-thin mode (every item has width or depth at most
//! 1/2) achieves `3 v(T) + 8 h_max`. Items are sorted by height, formed into
//! layers (fat items one or two per layer, small-base items in Steinberg
//! groups of base area at most 1/2) and the layers are stacked.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{Axis, BinSpec, Item, ItemTable, Packing, Placement};
use crate::rational::{rat, rint, Rat};
use crate::strip_transform::{cut_strip_to_bins, CutMode, CutResult};

use super::nfdh::{nfdh_2d, Rect2D};
use super::sort_by_height_desc;
use super::steinberg::steinberg_2d;

/// Which height bound the layered construction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LichengMode {
    /// `4 v + 8 h_max`; no shape precondition.
    General,
    /// `3 v + 8 h_max`; every item needs width or depth at most 1/2.
    HalfThin,
}

/// One layer: items share a base placement at a common z.
struct Layer {
    height: Rat,
    placements: Vec<(String, Rat, Rat)>, // (id, x, y)
}

/// Packs items into a z-strip over a 1x1 base using the layered
/// construction.
pub fn licheng_strip(items: &[Item], mode: LichengMode) -> Result<Packing> {
    let half = rat(1, 2);
    for item in items {
        if item.w > rint(1) || item.d > rint(1) {
            return Err(Error::Precondition(format!(
                "item {:?} does not fit the unit base",
                item.id
            )));
        }
    }
    if mode == LichengMode::HalfThin {
        if let Some(bad) = items.iter().find(|i| i.w > half && i.d > half) {
            return Err(Error::Precondition(format!(
                "half-thin mode requires width or depth <= 1/2, item {:?} has neither",
                bad.id
            )));
        }
    }

    let mut layers: Vec<Layer> = Vec::new();
    match mode {
        LichengMode::General => {
            let (fat, rest): (Vec<&Item>, Vec<&Item>) =
                items.iter().partition(|i| i.w > half && i.d > half);
            let mut fat = fat;
            sort_by_height_desc(&mut fat);
            for item in fat {
                layers.push(Layer {
                    height: item.h.clone(),
                    placements: vec![(item.id.clone(), Rat::zero(), Rat::zero())],
                });
            }
            half_thin_layers(&rest, &mut layers)?;
        }
        LichengMode::HalfThin => {
            let refs: Vec<&Item> = items.iter().collect();
            half_thin_layers(&refs, &mut layers)?;
        }
    }

    let mut strip = Packing::new_strip(BinSpec::unit(), Axis::Z);
    let mut z = Rat::zero();
    for layer in layers {
        for (id, x, y) in layer.placements {
            strip.push(Placement::new(id, 0, x, y, z.clone()));
        }
        z += &layer.height;
    }
    Ok(strip)
}

/// Layers for items that each have width or depth at most 1/2: split by
/// which side is small, then by base area 1/6, pair the big-base items and
/// Steinberg-pack groups of the small-base items.
fn half_thin_layers(items: &[&Item], layers: &mut Vec<Layer>) -> Result<()> {
    let half = rat(1, 2);
    let (thin_w, thin_d): (Vec<&Item>, Vec<&Item>) =
        items.iter().partition(|i| i.w <= half);
    class_layers(&thin_w, Axis::X, layers)?;
    class_layers(&thin_d, Axis::Y, layers)?;
    Ok(())
}

/// Layers for one side class. `pair_axis` is the axis along which two
/// big-base items sit next to each other (X when widths are small, Y when
/// depths are small).
fn class_layers(items: &[&Item], pair_axis: Axis, layers: &mut Vec<Layer>) -> Result<()> {
    let sixth = rat(1, 6);
    let (big_base, small_base): (Vec<&Item>, Vec<&Item>) = items
        .iter()
        .partition(|i| &i.w * &i.d > sixth);

    // Big-base items: two per layer, side by side along the thin axis.
    let mut big_base = big_base;
    sort_by_height_desc(&mut big_base);
    for pair in big_base.chunks(2) {
        let mut placements = Vec::new();
        let mut offset = Rat::zero();
        for item in pair {
            let (x, y) = match pair_axis {
                Axis::X => (offset.clone(), Rat::zero()),
                _ => (Rat::zero(), offset.clone()),
            };
            placements.push((item.id.clone(), x, y));
            offset += match pair_axis {
                Axis::X => &item.w,
                _ => &item.d,
            };
        }
        layers.push(Layer { height: pair[0].h.clone(), placements });
    }

    // Small-base items: greedy maximal groups of base area at most 1/2,
    // each packed into a unit layer with Steinberg.
    let mut small_base = small_base;
    sort_by_height_desc(&mut small_base);
    let cap = rat(1, 2);
    let mut group: Vec<&Item> = Vec::new();
    let mut group_area = Rat::zero();
    let mut groups: Vec<Vec<&Item>> = Vec::new();
    for item in small_base {
        let area = &item.w * &item.d;
        if !group.is_empty() && &group_area + &area > cap {
            groups.push(std::mem::take(&mut group));
            group_area = Rat::zero();
        }
        group_area += &area;
        group.push(item);
    }
    if !group.is_empty() {
        groups.push(group);
    }
    for group in groups {
        pack_group_layers(&group, layers)?;
    }
    Ok(())
}

/// Packs one base-area group as a single Steinberg layer, splitting the
/// group in half when the packer runs out of budget on a very large group.
fn pack_group_layers(group: &[&Item], layers: &mut Vec<Layer>) -> Result<()> {
    let bases: Vec<Rect2D> = group
        .iter()
        .map(|i| Rect2D::new(i.id.clone(), i.w.clone(), i.d.clone()))
        .collect();
    match steinberg_2d(&bases, &rint(1), &rint(1)) {
        Ok(placed) => {
            let height = group
                .iter()
                .map(|i| i.h.clone())
                .max()
                .unwrap_or_else(Rat::zero);
            let placements = placed.into_iter().map(|p| (p.id, p.x, p.y)).collect();
            layers.push(Layer { height, placements });
            Ok(())
        }
        Err(Error::BudgetExhausted(_)) if group.len() >= 2 => {
            // NFDH the bases into a unit layer instead; fall back to halving
            // the group when even that overflows.
            let (shelves, total) = nfdh_2d(&bases, &rint(1))?;
            if total <= rint(1) {
                let height = group
                    .iter()
                    .map(|i| i.h.clone())
                    .max()
                    .unwrap_or_else(Rat::zero);
                let placements = shelves
                    .into_iter()
                    .flat_map(|s| s.members)
                    .map(|p| (p.id, p.x, p.y))
                    .collect();
                layers.push(Layer { height, placements });
                Ok(())
            } else {
                let mid = group.len() / 2;
                pack_group_layers(&group[..mid], layers)?;
                pack_group_layers(&group[mid..], layers)
            }
        }
        Err(e) => Err(e),
    }
}

/// Packs any item set (all extents at most 1) into unit bins via the
/// general strip construction followed by the naive integer-height cut;
/// uses at most `8 v(T) + 18` bins.
pub fn volume_bin_pack(items: &[Item]) -> Result<CutResult> {
    for item in items {
        if item.w > rint(1) || item.d > rint(1) || item.h > rint(1) {
            return Err(Error::Precondition(format!(
                "item {:?} exceeds the unit bin",
                item.id
            )));
        }
    }
    let strip = licheng_strip(items, LichengMode::General)?;
    let table = ItemTable::new(items.to_vec())?;
    cut_strip_to_bins(&strip, &table, CutMode::NaiveDouble)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::verify_packing;
    use crate::rational::rat;
    use crate::subroutines::licheng_height_bound;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn item(id: &str, w: (i64, i64), d: (i64, i64), h: (i64, i64)) -> Item {
        Item::new(id, rat(w.0, w.1), rat(d.0, d.1), rat(h.0, h.1))
    }

    fn strip_height(packing: &Packing, items: &[Item]) -> Rat {
        let table = ItemTable::new(items.to_vec()).unwrap();
        let report = verify_packing(packing, &table).unwrap();
        assert!(report.feasible, "violations: {:?}", report.violations);
        assert_eq!(packing.placements.len(), items.len(), "all items must be placed");
        report.strip_height.unwrap()
    }

    #[test]
    fn fat_items_one_per_layer() {
        let items = vec![
            item("a", (3, 5), (3, 5), (3, 10)),
            item("b", (3, 5), (3, 5), (1, 5)),
        ];
        let strip = licheng_strip(&items, LichengMode::General).unwrap();
        let height = strip_height(&strip, &items);
        assert_eq!(height, rat(1, 2));
    }

    #[test]
    fn empty_set_gives_empty_strip() {
        let strip = licheng_strip(&[], LichengMode::General).unwrap();
        assert!(strip.placements.is_empty());
    }

    #[test]
    fn halfthin_rejects_fat_items() {
        let items = vec![item("a", (3, 5), (3, 5), (1, 2))];
        assert!(licheng_strip(&items, LichengMode::HalfThin).is_err());
    }

    #[test]
    fn random_instances_meet_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11c);
        for case in 0..60 {
            let n = rng.gen_range(1..=50);
            let mut items = Vec::new();
            for i in 0..n {
                items.push(Item::new(
                    format!("i{case}_{i}"),
                    rat(rng.gen_range(1..=64), 64),
                    rat(rng.gen_range(1..=64), 64),
                    rat(rng.gen_range(1..=64), 64),
                ));
            }
            let strip = licheng_strip(&items, LichengMode::General).unwrap();
            let height = strip_height(&strip, &items);
            assert!(height <= licheng_height_bound(&items, LichengMode::General));

            let thin: Vec<Item> = items
                .iter()
                .filter(|i| i.w <= rat(1, 2) || i.d <= rat(1, 2))
                .cloned()
                .collect();
            let strip = licheng_strip(&thin, LichengMode::HalfThin).unwrap();
            let height = strip_height(&strip, &thin);
            assert!(height <= licheng_height_bound(&thin, LichengMode::HalfThin));
        }
    }

    #[test]
    fn volume_pack_single_item() {
        let items = vec![item("a", (1, 2), (1, 2), (1, 2))];
        let cut = volume_bin_pack(&items).unwrap();
        assert_eq!(cut.bins.used_bins(), 1);
    }

    #[test]
    fn volume_pack_empty() {
        let cut = volume_bin_pack(&[]).unwrap();
        assert_eq!(cut.bins.used_bins(), 0);
    }

    #[test]
    fn volume_pack_respects_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb195);
        for case in 0..40 {
            let n = rng.gen_range(1..=60);
            let mut items = Vec::new();
            for i in 0..n {
                items.push(Item::new(
                    format!("v{case}_{i}"),
                    rat(rng.gen_range(1..=32), 32),
                    rat(rng.gen_range(1..=32), 32),
                    rat(rng.gen_range(1..=32), 32),
                ));
            }
            let cut = volume_bin_pack(&items).unwrap();
            let table = ItemTable::new(items.clone()).unwrap();
            let report = verify_packing(&cut.bins, &table).unwrap();
            assert!(report.feasible);
            assert_eq!(cut.bins.placements.len(), items.len());
            let volume = crate::geometry::total_volume(items.iter());
            let bound = rat(8, 1) * volume + rat(18, 1);
            assert!(rat(cut.bins.used_bins() as i64, 1) <= bound);
        }
    }
}
