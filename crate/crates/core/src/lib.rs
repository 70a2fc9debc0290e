//! Party-system reduction from legislative roll-call data.
//!
//! The pipeline is: compute partisan and party discipline from leader votes
//! ([`model`]), merge parties that never disagreed ([`merge`]), pick a small set
//! of parties able to host every partisan within a discipline tolerance δ
//! ([`cover`]), then score the resulting configuration ([`metrics`]) against
//! random null models ([`baselines`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the sweep driver
//! and the command line live in the `arrange` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod baselines;
pub mod cover;
pub mod dataset;
mod error;
pub mod merge;
pub mod metrics;
pub mod model;
pub mod synth;

pub use crate::cover::{Configuration, EligibilitySet, OptionTable, PartyOption, Placement};
pub use crate::dataset::{Dataset, IngestDiagnostics, LeaderVoteRecord, RollCallRecord};
pub use crate::error::{Error, Result};
pub use crate::merge::MergedPartySet;
pub use crate::model::{
    Date, DisciplineValue, Partisan, PartisanId, Party, Proposition, PropositionIdx, VoteMap,
    VoteValue,
};

/// Slack used for every floating-point threshold and equality comparison.
pub const TOLERANCE: f64 = 1e-9;
