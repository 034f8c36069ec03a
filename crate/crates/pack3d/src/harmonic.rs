//! Harmonic height transformation and its constants.
//!
//! The transformation `f_k` rounds a length in `(1/(q+1), 1/q]` up to `1/q`
//! for `q <= k-1`. Lengths at most `1/k` form the tail: the identity-tail
//! variant keeps them, the scaled-tail variant multiplies by `k/(k-1)`. The
//! constant `T_k` (and its limit `T_inf ~ 1.69103`) bounds the rounded sum
//! of any sequence whose raw sum is at most one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::Item;
use crate::rational::{rint, Rat};

/// Tail behaviour of the transformation for values at most `1/k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailVariant {
    /// `f_k(a) = a` for `a <= 1/k`.
    #[default]
    IdentityTail,
    /// `f_k(a) = a * k/(k-1)` for `a <= 1/k`.
    ScaledTail,
}

/// Sylvester-derived sequence `t_1 = 1, t_{i+1} = t_i (t_i + 1)`:
/// 1, 2, 6, 42, 1806, ...
pub fn sylvester_sequence(len: usize) -> Vec<BigInt> {
    let mut seq = Vec::with_capacity(len);
    let mut t = BigInt::one();
    for _ in 0..len {
        seq.push(t.clone());
        t = &t * (&t + BigInt::one());
    }
    seq
}

/// Constants for a fixed `k`, including a truncated `T_inf`.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    pub k: u64,
    pub sylvester: Vec<BigInt>,
    pub t_k: Rat,
    pub t_inf_approx: Rat,
    /// Number of Sylvester terms in `t_inf_approx`.
    pub truncation_m: usize,
}

/// Default truncation for `T_inf`; the tail error is below 1e-12.
pub const DEFAULT_T_INF_TERMS: usize = 8;

impl HarmonicTable {
    pub fn new(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition(format!("harmonic k must be >= 2, got {k}")));
        }
        let m = DEFAULT_T_INF_TERMS;
        let terms = m.max(8) + 2;
        let sylvester = sylvester_sequence(terms);
        Ok(HarmonicTable {
            k,
            t_k: harmonic_constant_k(k),
            t_inf_approx: harmonic_constant_truncated(m),
            truncation_m: m,
            sylvester,
        })
    }
}

/// `T_k = sum_{q<=m} 1/t_q + k / (t_{m+1} (k-1))` where `m` is the largest
/// index with `t_m <= k-1`.
pub fn harmonic_constant_k(k: u64) -> Rat {
    assert!(k >= 2);
    let bound = BigInt::from(k - 1);
    let seq = sylvester_sequence(12);
    let mut m = 0;
    while m + 1 < seq.len() && seq[m] <= bound {
        m += 1;
    }
    // seq[0..m] are the terms t_1..t_m with t_m <= k-1.
    let mut sum = Rat::zero();
    for t in &seq[..m] {
        sum += Rat::new(BigInt::one(), t.clone());
    }
    sum + Rat::new(BigInt::from(k), &seq[m] * BigInt::from(k - 1))
}

/// Truncated harmonic constant `sum_{i<=m} 1/t_i`.
pub fn harmonic_constant_truncated(m: usize) -> Rat {
    let seq = sylvester_sequence(m);
    let mut sum = Rat::zero();
    for t in &seq {
        sum += Rat::new(BigInt::one(), t.clone());
    }
    sum
}

/// Applies `f_k` to a single length in `(0, 1]`.
pub fn harmonic_round(alpha: &Rat, k: u64, variant: TailVariant) -> Result<Rat> {
    if k < 2 {
        return Err(Error::Precondition(format!("harmonic k must be >= 2, got {k}")));
    }
    if !alpha.is_positive() || alpha > &rint(1) {
        return Err(Error::Precondition(format!(
            "harmonic argument must lie in (0, 1], got {alpha}"
        )));
    }
    // alpha in (1/(q+1), 1/q]  <=>  q = floor(1/alpha).
    let q = alpha.recip().floor().to_integer();
    if q <= BigInt::from(k - 1) {
        Ok(Rat::new(BigInt::one(), q))
    } else {
        match variant {
            TailVariant::IdentityTail => Ok(alpha.clone()),
            TailVariant::ScaledTail => {
                Ok(alpha * Rat::new(BigInt::from(k), BigInt::from(k - 1)))
            }
        }
    }
}

/// Instance with harmonically rounded heights; widths and depths unchanged.
#[derive(Debug, Clone)]
pub struct RoundedInstance {
    pub original: Vec<Item>,
    pub rounded: Vec<Item>,
    pub variant: TailVariant,
    pub k: u64,
    /// Pairs of (original height, rounded height), indexed like the items.
    pub height_map: Vec<(Rat, Rat)>,
}

/// Rounds every item height with `f_k`; ids are preserved.
pub fn round_instance_heights(items: &[Item], k: u64, variant: TailVariant) -> Result<RoundedInstance> {
    let mut rounded = Vec::with_capacity(items.len());
    let mut height_map = Vec::with_capacity(items.len());
    for item in items {
        let new_h = harmonic_round(&item.h, k, variant)?;
        height_map.push((item.h.clone(), new_h.clone()));
        rounded.push(Item::new(item.id.clone(), item.w.clone(), item.d.clone(), new_h));
    }
    Ok(RoundedInstance { original: items.to_vec(), rounded, variant, k, height_map })
}

/// True when the rational is of the form `1/q` with `q` integer in `[1, bound]`.
pub fn is_tall_rounded_height(h: &Rat, bound: u64) -> bool {
    h.numer().is_one() && h.denom() <= &BigInt::from(bound) && h.denom() >= &BigInt::one()
}

/// Exposes `m(k)`; used by tests to pin the `T_k` formula.
pub fn sylvester_prefix_len(k: u64) -> usize {
    let bound = BigInt::from(k - 1);
    let seq = sylvester_sequence(12);
    let mut m = 0;
    while m + 1 < seq.len() && seq[m] <= bound {
        m += 1;
    }
    m
}

/// Checks that a rational is an integer multiple of another (helper shared
/// by the alignment checks).
pub fn is_multiple_of(value: &BigRational, step: &BigRational) -> bool {
    if step.is_zero() {
        return value.is_zero();
    }
    (value / step).is_integer()
}


#[cfg(test)]
mod stack_tests {
    use super::*;
    use crate::rational::{parse_rational, rat};

    #[test]
    fn rounded_unit_stack_stays_below_t_k() {
        // Heights {0.6, 0.4} sum to 1; rounded to {1, 1/2}, sum 3/2, which
        // stays below T_10 = 5/3 + 10/378.
        let a = harmonic_round(&parse_rational("0.6").unwrap(), 10, TailVariant::IdentityTail).unwrap();
        let b = harmonic_round(&parse_rational("0.4").unwrap(), 10, TailVariant::IdentityTail).unwrap();
        assert_eq!(a, rat(1, 1));
        assert_eq!(b, rat(1, 2));
        let t10 = harmonic_constant_k(10);
        assert_eq!(t10, rat(5, 3) + rat(10, 378));
        assert!(a + b <= t10);
    }
}
