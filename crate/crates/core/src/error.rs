use alloc::string::String;

use crate::model::PartisanId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vote sets have no proposition in common")]
    EmptyIntersection,
    #[error("no members to aggregate")]
    NoMembers,
    #[error("parties {left} and {right} disagree on proposition #{proposition}")]
    ConflictingVotes {
        left: String,
        right: String,
        proposition: u32,
    },
    #[error("partisan {0} has no eligible party")]
    UncoverablePartisan(PartisanId),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("configurations cover different partisans")]
    UniverseMismatch,
    #[error("sizes must be non-empty, non-negative and sum to a positive value")]
    EmptyOrZero,
    #[error("shares must be positive and sum to 1")]
    BadShares,
    #[error("date window is empty")]
    EmptyWindow,
    #[error("conflicting leader votes for party {party} on proposition {proposition}")]
    ConflictingLeaderVotes { proposition: String, party: String },
    #[error("partisan vote records cannot hold F ({0})")]
    FreeVoteForPartisan(String),
    #[error("unknown party {0}")]
    UnknownParty(String),
    #[error("invalid date {0}")]
    BadDate(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}
