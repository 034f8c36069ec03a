//! Classical packing subroutines composed by the solvers: 2D NFDH,
//! Steinberg's 2D packing, layered 3D strip packing, and the volume-bound
//! bin packer, plus the pluggable strip-backend interface.

mod licheng;
mod nfdh;
mod steinberg;

pub use licheng::{licheng_strip, volume_bin_pack, LichengMode};
pub use nfdh::{nfdh_2d, nfdh_fits, PlacedRect, Rect2D, Shelf};
pub use steinberg::{steinberg_2d, steinberg_condition};

use crate::error::{Error, Result};
use crate::geometry::{Item, Packing};
use crate::rational::{rat, rint, Rat};

/// Contract of a 3D strip-packing backend: the produced height is at most
/// `mult * OPT_sp + add_const + add_hmax_coeff * h_max`, where `OPT_sp` is
/// replaced by the total item volume for volume-based backends.
#[derive(Debug, Clone)]
pub struct StripBackendGuarantee {
    pub mult: Rat,
    pub add_const: Rat,
    pub add_hmax_coeff: Rat,
    pub volume_based: bool,
}

impl StripBackendGuarantee {
    pub fn new(mult: Rat, add_const: Rat, add_hmax_coeff: Rat, volume_based: bool) -> Result<Self> {
        use num_traits::Signed;
        if mult < rint(1) || add_const.is_negative() || add_hmax_coeff.is_negative() {
            return Err(Error::Precondition(
                "strip backend guarantee requires mult >= 1 and non-negative additive terms".into(),
            ));
        }
        Ok(StripBackendGuarantee { mult, add_const, add_hmax_coeff, volume_based })
    }
}

/// A 3D strip-packing backend over a unit-square base, growing along z.
pub trait StripBackend {
    fn name(&self) -> &str;
    fn guarantee(&self) -> StripBackendGuarantee;
    /// Packs all items into a strip with 1x1 base; items must have w, d <= 1.
    fn pack_strip(&self, items: &[Item]) -> Result<Packing>;
}

/// Default backend: the layered construction of [`licheng_strip`] in
/// general mode, certified as `height <= 4 v(T) + 8 h_max`.
#[derive(Debug, Default, Clone)]
pub struct LichengBackend;

impl StripBackend for LichengBackend {
    fn name(&self) -> &str {
        "licheng"
    }

    fn guarantee(&self) -> StripBackendGuarantee {
        StripBackendGuarantee {
            mult: rint(4),
            add_const: rint(0),
            add_hmax_coeff: rint(8),
            volume_based: true,
        }
    }

    fn pack_strip(&self, items: &[Item]) -> Result<Packing> {
        licheng_strip(items, LichengMode::General)
    }
}

/// Sorts item references by non-increasing height, breaking ties by id for
/// determinism.
pub(crate) fn sort_by_height_desc(items: &mut [&Item]) {
    items.sort_by(|a, b| b.h.cmp(&a.h).then_with(|| a.id.cmp(&b.id)));
}

/// Upper bound `4 v + 8 h_max` (general) or `3 v + 8 h_max` (half-thin) for
/// strip heights produced by the layered construction.
pub fn licheng_height_bound(items: &[Item], mode: LichengMode) -> Rat {
    use num_traits::Zero;
    let volume = crate::geometry::total_volume(items.iter());
    let h_max = items.iter().map(|i| i.h.clone()).max().unwrap_or_else(Rat::zero);
    let mult = match mode {
        LichengMode::General => rint(4),
        LichengMode::HalfThin => rint(3),
    };
    mult * volume + rat(8, 1) * h_max
}
