//! Zero-rate error exponents for mismatched decoding over discrete memoryless
//! channels.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! - [`channel`]: exact-rational channel/metric pairs and their support sets.
//! - [`mu`]: the per-letter exponent kernel `mu_{a,b}(s)`, its derivatives,
//!   asymptotes, tilted distributions and concave maximization in `s`.
//! - [`zero_error`]: exact decision procedures for zero mismatched zero-error
//!   capacity and the balanced-pair property.
//! - [`exponent`]: the expurgated value, the hatted (asymptote) relaxation,
//!   the zero-rate exponent and the gap certificate.
//! - [`codebook`]: joint types, pairwise distances, Plotkin counting and
//!   Komlós-style symmetric subcode extraction.
//! - [`decoder`]: exact and Monte Carlo error probabilities of the metric
//!   decoder, plus the two-codeword lower bounds.
//!
//! All logarithms are natural.

#![no_std]

#[cfg(test)]
extern crate std;

extern crate alloc;

pub mod channel;
pub mod clique;
pub mod codebook;
pub mod conditional_types;
pub mod decoder;
mod error;
pub mod exponent;
mod ext;
pub mod fixtures;
mod math;
pub mod mu;
pub mod rational;
pub mod simplex;
pub mod zero_error;

pub use channel::{ChannelMetricPair, InputDistribution, SupportSets};
pub use error::{Error, Result};
pub use ext::ExtendedReal;
pub use mu::{LimitClass, MuFamily, PairKernel, Supremum};
