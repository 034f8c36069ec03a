//! Cuboid data model and the exact feasibility verifier.
//!
//! All comparisons are exact rational comparisons: a packing that touches a
//! bin wall or a neighbouring item face is feasible, one that exceeds it by
//! any positive amount is not.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rint, Rat};

/// Coordinate axis. Width runs along X, depth along Y, height along Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Permutes item dimensions so that `self` plays the role of the strip
    /// axis Z. The permutation is an involution (swap with Z).
    pub fn dims_to_frame(&self, w: &Rat, d: &Rat, h: &Rat) -> (Rat, Rat, Rat) {
        match self {
            Axis::Z => (w.clone(), d.clone(), h.clone()),
            Axis::X => (h.clone(), d.clone(), w.clone()),
            Axis::Y => (w.clone(), h.clone(), d.clone()),
        }
    }

    /// Maps a point in the packing frame back to world coordinates; inverse
    /// of the swap performed by [`Axis::dims_to_frame`].
    pub fn point_from_frame(&self, x: Rat, y: Rat, z: Rat) -> (Rat, Rat, Rat) {
        match self {
            Axis::Z => (x, y, z),
            Axis::X => (z, y, x),
            Axis::Y => (x, z, y),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// Opaque item identifier. Duplicate dimension values are allowed; identity
/// is carried solely by the id.
pub type ItemId = String;

/// Axis-aligned cuboid with exact rational extents in `(0, 1]` after
/// normalization to the bin or strip base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: ItemId,
    pub w: Rat,
    pub d: Rat,
    pub h: Rat,
}

impl Item {
    pub fn new(id: impl Into<ItemId>, w: Rat, d: Rat, h: Rat) -> Self {
        Item { id: id.into(), w, d, h }
    }

    pub fn volume(&self) -> Rat {
        &self.w * &self.d * &self.h
    }

    /// Extent along the given axis.
    pub fn dim(&self, axis: Axis) -> &Rat {
        match axis {
            Axis::X => &self.w,
            Axis::Y => &self.d,
            Axis::Z => &self.h,
        }
    }
}

/// Total volume of a set of items.
pub fn total_volume<'a>(items: impl IntoIterator<Item = &'a Item>) -> Rat {
    let mut v = Rat::zero();
    for i in items {
        v += i.volume();
    }
    v
}

/// One of the six axis permutations of an item. `Xyz` is the identity; the
/// variant name lists which item dimension (x=width, y=depth, z=height) lies
/// along each bin axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Xyz,
    Xzy,
    Yxz,
    Yzx,
    Zxy,
    Zyx,
}

impl Orientation {
    pub const ALL: [Orientation; 6] = [
        Orientation::Xyz,
        Orientation::Xzy,
        Orientation::Yxz,
        Orientation::Yzx,
        Orientation::Zxy,
        Orientation::Zyx,
    ];

    /// Item axes along bin (x, y, z) respectively.
    fn perm(&self) -> [Axis; 3] {
        match self {
            Orientation::Xyz => [Axis::X, Axis::Y, Axis::Z],
            Orientation::Xzy => [Axis::X, Axis::Z, Axis::Y],
            Orientation::Yxz => [Axis::Y, Axis::X, Axis::Z],
            Orientation::Yzx => [Axis::Y, Axis::Z, Axis::X],
            Orientation::Zxy => [Axis::Z, Axis::X, Axis::Y],
            Orientation::Zyx => [Axis::Z, Axis::Y, Axis::X],
        }
    }

    /// Extents of `item` along the bin axes once oriented.
    pub fn extents(&self, item: &Item) -> (Rat, Rat, Rat) {
        let p = self.perm();
        (
            item.dim(p[0]).clone(),
            item.dim(p[1]).clone(),
            item.dim(p[2]).clone(),
        )
    }

    /// Orientation that puts the given item axis along bin z, leaving the
    /// relative order of the other two axes intact.
    pub fn with_axis_up(axis: Axis) -> Orientation {
        match axis {
            Axis::Z => Orientation::Xyz,
            Axis::X => Orientation::Zyx,
            Axis::Y => Orientation::Xzy,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Orientation::Xyz => "xyz",
            Orientation::Xzy => "xzy",
            Orientation::Yxz => "yxz",
            Orientation::Yzx => "yzx",
            Orientation::Zxy => "zxy",
            Orientation::Zyx => "zyx",
        }
    }

    pub fn from_str_code(code: &str) -> Result<Orientation> {
        Orientation::ALL
            .into_iter()
            .find(|o| o.as_str() == code)
            .ok_or_else(|| Error::Parse(format!("invalid orientation {code:?}")))
    }
}

/// A placed item: position of the low corner inside bin `bin` (or the strip
/// when the packing kind is strip), with an optional axis permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub item: ItemId,
    pub bin: usize,
    pub x: Rat,
    pub y: Rat,
    pub z: Rat,
    pub orientation: Orientation,
}

impl Placement {
    pub fn new(item: impl Into<ItemId>, bin: usize, x: Rat, y: Rat, z: Rat) -> Self {
        Placement { item: item.into(), bin, x, y, z, orientation: Orientation::Xyz }
    }

    /// Occupied region `[x, x+w') × [y, y+d') × [z, z+h')` low/high corners.
    pub fn region(&self, item: &Item) -> ((Rat, Rat, Rat), (Rat, Rat, Rat)) {
        let (ex, ey, ez) = self.orientation.extents(item);
        (
            (self.x.clone(), self.y.clone(), self.z.clone()),
            (&self.x + ex, &self.y + ey, &self.z + ez),
        )
    }
}

/// Extents of one bin. Unit cube by default; `1×1×T` bins are representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSpec {
    pub w: Rat,
    pub d: Rat,
    pub h: Rat,
}

impl BinSpec {
    pub fn unit() -> Self {
        BinSpec { w: rint(1), d: rint(1), h: rint(1) }
    }

    pub fn new(w: Rat, d: Rat, h: Rat) -> Self {
        BinSpec { w, d, h }
    }
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec::unit()
    }
}

/// Whether a packing fills indexed bins or a single vertical strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingKind {
    Bins,
    Strip(Axis),
}

/// A full packing: the universal output of every algorithm in this crate.
#[derive(Debug, Clone)]
pub struct Packing {
    pub bin: BinSpec,
    pub kind: PackingKind,
    pub placements: Vec<Placement>,
}

impl Packing {
    pub fn new_bins(bin: BinSpec) -> Self {
        Packing { bin, kind: PackingKind::Bins, placements: Vec::new() }
    }

    pub fn new_strip(bin: BinSpec, axis: Axis) -> Self {
        Packing { bin, kind: PackingKind::Strip(axis), placements: Vec::new() }
    }

    pub fn push(&mut self, p: Placement) {
        self.placements.push(p);
    }

    /// 1 + the largest bin index used, 0 when empty.
    pub fn used_bins(&self) -> usize {
        self.placements.iter().map(|p| p.bin + 1).max().unwrap_or(0)
    }

    /// Renumbers bin indices densely, preserving their relative order.
    pub fn compact_bins(&mut self) {
        let mut used: Vec<usize> = self.placements.iter().map(|p| p.bin).collect();
        used.sort_unstable();
        used.dedup();
        let remap: HashMap<usize, usize> =
            used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        for p in &mut self.placements {
            p.bin = remap[&p.bin];
        }
    }
}

/// Identity-keyed lookup table for the items of one instance.
#[derive(Debug, Clone, Default)]
pub struct ItemTable {
    items: Vec<Item>,
    index: HashMap<ItemId, usize>,
}

impl ItemTable {
    pub fn new(items: Vec<Item>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, item) in items.iter().enumerate() {
            if index.insert(item.id.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate item id {:?}", item.id)));
            }
        }
        Ok(ItemTable { items, index })
    }

    pub fn get(&self, id: &str) -> Result<&Item> {
        self.index
            .get(id)
            .map(|&i| &self.items[i])
            .ok_or_else(|| Error::UnknownItem(id.to_string()))
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_volume(&self) -> Rat {
        total_volume(self.items.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Overlap,
    Containment,
    Duplicate,
}

/// One feasibility violation with the items involved and a witness
/// coordinate triple locating the offence.
#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    pub item_ids: Vec<ItemId>,
    pub witness: (Rat, Rat, Rat),
}

/// Result of [`verify_packing`]. `feasible` holds iff `violations` is empty.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub used_bins: usize,
    pub strip_height: Option<Rat>,
    pub total_volume: Rat,
}

/// True iff the two placements occupy the same bin and their open boxes
/// intersect along all three axes. Touching faces do not overlap.
pub fn items_overlap(p1: &Placement, p2: &Placement, items: &ItemTable) -> Result<bool> {
    let i1 = items.get(&p1.item)?;
    let i2 = items.get(&p2.item)?;
    if p1.bin != p2.bin {
        return Ok(false);
    }
    let (lo1, hi1) = p1.region(i1);
    let (lo2, hi2) = p2.region(i2);
    Ok(open_intersects(&lo1.0, &hi1.0, &lo2.0, &hi2.0)
        && open_intersects(&lo1.1, &hi1.1, &lo2.1, &hi2.1)
        && open_intersects(&lo1.2, &hi1.2, &lo2.2, &hi2.2))
}

fn open_intersects(lo1: &Rat, hi1: &Rat, lo2: &Rat, hi2: &Rat) -> bool {
    lo1 < hi2 && lo2 < hi1
}

/// Checks every placement for containment, duplicates and pairwise overlap
/// and reports all violations. Violations are data, not errors; only an
/// unknown item id is an error.
pub fn verify_packing(packing: &Packing, items: &ItemTable) -> Result<VerifyReport> {
    let mut violations = Vec::new();
    let mut seen: HashMap<&str, ()> = HashMap::new();
    let mut placed_volume = Rat::zero();

    for p in &packing.placements {
        let item = items.get(&p.item)?;
        placed_volume += item.volume();
        if seen.insert(p.item.as_str(), ()).is_some() {
            violations.push(Violation {
                kind: ViolationKind::Duplicate,
                item_ids: vec![p.item.clone()],
                witness: (p.x.clone(), p.y.clone(), p.z.clone()),
            });
        }
        let (lo, hi) = p.region(item);
        let mut contained = !lo.0.is_negative() && !lo.1.is_negative() && !lo.2.is_negative();
        match packing.kind {
            PackingKind::Bins => {
                contained &= hi.0 <= packing.bin.w && hi.1 <= packing.bin.d && hi.2 <= packing.bin.h;
            }
            PackingKind::Strip(axis) => {
                // The strip axis is unbounded above; the cross axes must fit
                // the base, and strip placements live in bin 0.
                contained &= p.bin == 0;
                match axis {
                    Axis::Z => contained &= hi.0 <= packing.bin.w && hi.1 <= packing.bin.d,
                    Axis::X => contained &= hi.1 <= packing.bin.d && hi.2 <= packing.bin.h,
                    Axis::Y => contained &= hi.0 <= packing.bin.w && hi.2 <= packing.bin.h,
                }
            }
        }
        if !contained {
            violations.push(Violation {
                kind: ViolationKind::Containment,
                item_ids: vec![p.item.clone()],
                witness: hi.clone(),
            });
        }
    }

    // Pairwise overlap within each bin, swept along z: only placements
    // whose z-intervals intersect need the full test.
    type Region = ((Rat, Rat, Rat), (Rat, Rat, Rat));
    let regions: Vec<Region> = packing
        .placements
        .iter()
        .map(|p| items.get(&p.item).map(|item| p.region(item)))
        .collect::<Result<_>>()?;
    let mut by_bin: HashMap<usize, Vec<usize>> = HashMap::new();
    for (idx, p) in packing.placements.iter().enumerate() {
        by_bin.entry(p.bin).or_default().push(idx);
    }
    let mut bins: Vec<_> = by_bin.into_iter().collect();
    bins.sort_by_key(|(b, _)| *b);
    for (_, mut members) in bins {
        members.sort_by(|&a, &b| regions[a].0 .2.cmp(&regions[b].0 .2).then(a.cmp(&b)));
        let mut active: Vec<usize> = Vec::new();
        for &cur in &members {
            let (lo_c, hi_c) = &regions[cur];
            active.retain(|&a| regions[a].1 .2 > lo_c.2);
            for &a in &active {
                let (lo_a, hi_a) = &regions[a];
                let overlap = lo_a.0 < hi_c.0
                    && lo_c.0 < hi_a.0
                    && lo_a.1 < hi_c.1
                    && lo_c.1 < hi_a.1
                    && lo_a.2 < hi_c.2
                    && lo_c.2 < hi_a.2;
                if overlap {
                    let pa = &packing.placements[a];
                    let pc = &packing.placements[cur];
                    let witness = (
                        lo_a.0.clone().max(lo_c.0.clone()),
                        lo_a.1.clone().max(lo_c.1.clone()),
                        lo_a.2.clone().max(lo_c.2.clone()),
                    );
                    violations.push(Violation {
                        kind: ViolationKind::Overlap,
                        item_ids: vec![pa.item.clone(), pc.item.clone()],
                        witness,
                    });
                }
            }
            active.push(cur);
        }
    }

    let strip_height = match packing.kind {
        PackingKind::Bins => None,
        PackingKind::Strip(axis) => {
            let mut top = Rat::zero();
            for p in &packing.placements {
                let item = items.get(&p.item)?;
                let (_, hi) = p.region(item);
                let t = match axis {
                    Axis::X => hi.0,
                    Axis::Y => hi.1,
                    Axis::Z => hi.2,
                };
                if t > top {
                    top = t;
                }
            }
            Some(top)
        }
    };

    Ok(VerifyReport {
        feasible: violations.is_empty(),
        violations,
        used_bins: packing.used_bins(),
        strip_height,
        total_volume: placed_volume,
    })
}
