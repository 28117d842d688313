//! Fuzzy ARTMAP ensembles for protein family classification.
//!
//! Sequences become 438 normalized features ([`features`]); a population
//! of fuzzy ARTMAP networks ([`artmap`]) is trained on seeded
//! permutations of the same data; a genetic search ([`ga`]) picks voting
//! members that fail in different places than the best network, measured
//! by Cohen's kappa ([`agreement`]). The resulting five-voter
//! [`ensemble`] classifies by majority and absorbs new databases
//! incrementally without forgetting earlier ones. Every stage is
//! reproducible from its seed, down to the bytes of the saved bundle.
//!
//! The crate's `examples/` directory walks each stage end to end; the
//! `artmap-seq` binary ([`cli`]) wraps the same workflows for files.

pub mod agreement;
pub mod artmap;
pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod ga;
pub mod report;
pub mod sequence;
pub mod synth;

pub use error::{Error, Result};
