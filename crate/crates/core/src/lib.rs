//! Source coding for multisets.
//!
//! When the order of letters carries no information, a block of n letters
//! collapses to a multiset, and every branch of source coding changes
//! character: lossless coding of a finite alphabet needs only O(log n)
//! bits, universal coding reaches one bit per letter, and quantizers earn
//! distribution-free rate savings from sorting. This crate implements
//! those pieces at desk scale: type-class codecs for known parents, a
//! universal dictionary/pattern codec, log-blocklength redundancy
//! calculators, order-statistics distribution theory, Lloyd-Max and
//! cone-constrained quantizer design, and rate-distortion bounds, all
//! cross-checked against independent numerical oracles in the test suite.
//!
//! Rates are in bits throughout. Total rates (not per-letter) are used
//! wherever a curve is emitted, matching the sublinear growth that makes
//! per-letter normalization degenerate.

pub mod bitstream;
pub mod distributions;
pub mod lossless;
pub mod math;
pub mod multiset;
pub mod universal;

pub use bitstream::Bitstream;
pub use distributions::{ContinuousParent, DiscretePmf, SeedSpec};
pub use multiset::TypeVector;
