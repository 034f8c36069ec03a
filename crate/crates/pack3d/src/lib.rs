//! Constructive 3D packing toolkit.
//!
//! The crate packs axis-aligned cuboids into unit bins, vertical strips and
//! minimum-volume bounding boxes using exact rational arithmetic throughout.
//! Every solver's output can be re-checked with [`geometry::verify_packing`];
//! a brute-force oracle provides ground truth on tiny instances.

pub mod absolute;
pub mod asymptotic;
pub mod error;
pub mod gen;
pub mod geometry;
pub mod harmonic;
pub mod io;
pub mod mvbb;
pub mod oracle;
pub mod rational;
pub mod strip_transform;
pub mod subroutines;

pub use error::{Error, Result};
