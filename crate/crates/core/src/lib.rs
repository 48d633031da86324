//! Semantic probability spaces over a discrete source, knowledge-base
//! entropy reduction, and Fano-family source coding over a noisy channel.
//!
//! * [`space`]: categories, entities, embeddings, perspectives, subspaces.
//! * [`entropy`]: classical, categorizing and message entropies.
//! * [`kb`]: synonyms, attribute scaling, KB mutual information and gain.
//! * [`coding`]: flat, parity and semantic Fano codebooks.
//! * [`channel`]: binary symmetric channel and link trials.
//! * [`sources`]: synthetic spaces and knowledge bases.
//! * [`harness`]: experiment sweeps writing CSV.
//! * [`format`]: JSON documents for spaces, KBs and ensembles.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

pub mod channel;
pub mod coding;
pub mod entropy;
pub mod error;
pub mod format;
pub mod harness;
pub mod kb;
pub mod sources;
pub mod space;

pub use error::{Error, Result};
