//! JSON instance and packing schemas.
//!
//! Dimensions travel as decimal strings (`"0.5"`) or fraction strings
//! (`"1/3"`) and are parsed exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    Axis, BinSpec, Item, ItemTable, Orientation, Packing, PackingKind, Placement,
};
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Serialize, Deserialize)]
pub struct BinJson {
    pub w: String,
    pub d: String,
    pub h: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ItemJson {
    pub id: String,
    pub w: String,
    pub d: String,
    pub h: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(default)]
    pub bin: Option<BinJson>,
    pub items: Vec<ItemJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PlacementJson {
    pub id: String,
    pub bin: usize,
    pub x: String,
    pub y: String,
    pub z: String,
    #[serde(default = "default_orient")]
    pub orient: String,
}

fn default_orient() -> String {
    "xyz".to_string()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PackingJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip_axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin: Option<BinJson>,
    pub placements: Vec<PlacementJson>,
}

/// Parsed instance: the bin specification plus the item table.
pub struct Instance {
    pub bin: BinSpec,
    pub items: ItemTable,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: InstanceJson = serde_json::from_str(text)?;
    let bin = match raw.bin {
        Some(b) => BinSpec::new(
            parse_rational(&b.w)?,
            parse_rational(&b.d)?,
            parse_rational(&b.h)?,
        ),
        None => BinSpec::unit(),
    };
    let mut items = Vec::with_capacity(raw.items.len());
    for it in raw.items {
        let item = Item::new(
            it.id,
            parse_rational(&it.w)?,
            parse_rational(&it.d)?,
            parse_rational(&it.h)?,
        );
        use num_traits::Signed;
        if !item.w.is_positive() || !item.d.is_positive() || !item.h.is_positive() {
            return Err(Error::Parse(format!(
                "item {:?} has a non-positive dimension",
                item.id
            )));
        }
        items.push(item);
    }
    Ok(Instance { bin, items: ItemTable::new(items)? })
}

pub fn instance_to_json(bin: &BinSpec, items: &ItemTable) -> InstanceJson {
    InstanceJson {
        bin: Some(BinJson {
            w: format_rational(&bin.w),
            d: format_rational(&bin.d),
            h: format_rational(&bin.h),
        }),
        items: items
            .items()
            .iter()
            .map(|i| ItemJson {
                id: i.id.clone(),
                w: format_rational(&i.w),
                d: format_rational(&i.d),
                h: format_rational(&i.h),
            })
            .collect(),
    }
}

fn parse_axis(s: &str) -> Result<Axis> {
    match s {
        "x" => Ok(Axis::X),
        "y" => Ok(Axis::Y),
        "z" => Ok(Axis::Z),
        other => Err(Error::Parse(format!("invalid axis {other:?}"))),
    }
}

pub fn parse_packing(text: &str, default_bin: &BinSpec) -> Result<Packing> {
    let raw: PackingJson = serde_json::from_str(text)?;
    let kind = match raw.kind.as_str() {
        "bins" => PackingKind::Bins,
        "strip" => {
            let axis = raw.strip_axis.as_deref().unwrap_or("z");
            PackingKind::Strip(parse_axis(axis)?)
        }
        other => return Err(Error::Parse(format!("invalid packing kind {other:?}"))),
    };
    let bin = match raw.bin {
        Some(b) => BinSpec::new(
            parse_rational(&b.w)?,
            parse_rational(&b.d)?,
            parse_rational(&b.h)?,
        ),
        None => default_bin.clone(),
    };
    let mut packing = Packing { bin, kind, placements: Vec::new() };
    for p in raw.placements {
        packing.push(Placement {
            item: p.id,
            bin: p.bin,
            x: parse_rational(&p.x)?,
            y: parse_rational(&p.y)?,
            z: parse_rational(&p.z)?,
            orientation: Orientation::from_str_code(&p.orient)?,
        });
    }
    Ok(packing)
}

pub fn packing_to_json(packing: &Packing) -> PackingJson {
    let (kind, strip_axis) = match packing.kind {
        PackingKind::Bins => ("bins".to_string(), None),
        PackingKind::Strip(axis) => ("strip".to_string(), Some(axis.to_string())),
    };
    PackingJson {
        kind,
        strip_axis,
        bin: Some(BinJson {
            w: format_rational(&packing.bin.w),
            d: format_rational(&packing.bin.d),
            h: format_rational(&packing.bin.h),
        }),
        placements: packing
            .placements
            .iter()
            .map(|p| PlacementJson {
                id: p.item.clone(),
                bin: p.bin,
                x: format_rational(&p.x),
                y: format_rational(&p.y),
                z: format_rational(&p.z),
                orient: p.orientation.as_str().to_string(),
            })
            .collect(),
    }
}
