//! Construction and validation of the in-memory dataset from roll-call and
//! leader-vote records.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{
    Date, Partisan, PartisanId, Party, Proposition, PropositionIdx, VoteMap, VoteValue,
};

/// One partisan vote as found in the votes file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RollCallRecord {
    pub proposition_id: String,
    pub date: Date,
    pub congressman_id: String,
    pub congressman_name: String,
    pub party: String,
    pub vote: VoteValue,
}

/// One vote declared by a party leader.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaderVoteRecord {
    pub proposition_id: String,
    pub party: String,
    pub vote: VoteValue,
}

/// Counts of records dropped or reconciled while building a dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestDiagnostics {
    /// Partisan votes with no leader vote for (proposition, party).
    pub votes_without_leader_vote: usize,
    /// Leader votes on propositions no partisan voted on (undatable).
    pub leader_votes_without_roll_call: usize,
    /// Repeated votes of the same membership on the same proposition.
    pub duplicate_votes: usize,
    /// Roll-call rows whose date disagreed with an earlier row of the same
    /// proposition; the first date wins.
    pub date_conflicts: usize,
    /// Memberships left with no vote after filtering.
    pub zero_vote_partisans: Vec<PartisanId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// Sorted by (date, id); a proposition's index is its position here.
    pub propositions: Vec<Proposition>,
    /// Original parties sorted by id.
    pub parties: Vec<Party>,
    /// Grouped by congressman id, each congressman's memberships in
    /// chronological order. `partisans[i].id == PartisanId(i)`.
    pub partisans: Vec<Partisan>,
    /// Congressman id → name.
    pub congressmen: BTreeMap<String, String>,
    pub diagnostics: IngestDiagnostics,
}

impl Dataset {
    pub fn party(&self, id: &str) -> Option<&Party> {
        self.parties
            .binary_search_by(|p| p.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.parties[i])
    }

    pub fn partisan(&self, id: PartisanId) -> Option<&Partisan> {
        self.partisans.get(id.0 as usize)
    }

    pub fn proposition(&self, idx: PropositionIdx) -> Option<&Proposition> {
        self.propositions.get(idx.0 as usize)
    }

    /// Original parties that declared at least one vote.
    pub fn voting_parties(&self) -> Vec<Party> {
        self.parties
            .iter()
            .filter(|p| !p.votes.is_empty())
            .cloned()
            .collect()
    }

    /// Partisans of each congressman, in membership order.
    pub fn memberships(&self) -> BTreeMap<&str, Vec<&Partisan>> {
        let mut by: BTreeMap<&str, Vec<&Partisan>> = BTreeMap::new();
        for a in &self.partisans {
            by.entry(a.congressman.as_str()).or_default().push(a);
        }
        for list in by.values_mut() {
            list.sort_by_key(|a| (a.first_vote, a.ordinal));
        }
        by
    }

    /// Converts the dataset back into records (votes kept after filtering,
    /// and every leader vote).
    pub fn to_records(&self) -> (Vec<RollCallRecord>, Vec<LeaderVoteRecord>) {
        let mut votes = Vec::new();
        for a in &self.partisans {
            let name = self.congressmen.get(&a.congressman).cloned().unwrap_or_default();
            for (k, v) in a.votes.iter() {
                let prop = &self.propositions[k.0 as usize];
                votes.push(RollCallRecord {
                    proposition_id: prop.id.clone(),
                    date: prop.date,
                    congressman_id: a.congressman.clone(),
                    congressman_name: name.clone(),
                    party: a.party.clone(),
                    vote: v,
                });
            }
        }
        let leaders = self
            .parties
            .iter()
            .flat_map(|p| {
                p.votes.iter().map(move |(k, v)| LeaderVoteRecord {
                    proposition_id: self.propositions[k.0 as usize].id.clone(),
                    party: p.id.clone(),
                    vote: v,
                })
            })
            .collect();
        (votes, leaders)
    }
}

/// Builds a dataset from parsed records.
///
/// A congressman's votes are ordered by date and split into a new membership
/// whenever the party changes. Partisan votes whose party leader did not vote
/// on the proposition are dropped, so every partisan's propositions are a
/// subset of their party's.
pub fn build_dataset(
    records: &[RollCallRecord],
    leaders: &[LeaderVoteRecord],
) -> Result<Dataset> {
    let mut diagnostics = IngestDiagnostics::default();

    let mut dates: BTreeMap<&str, Date> = BTreeMap::new();
    for r in records {
        if r.vote == VoteValue::Free {
            return Err(Error::FreeVoteForPartisan(r.congressman_id.clone()));
        }
        match dates.get(r.proposition_id.as_str()) {
            Some(&d) if d != r.date => diagnostics.date_conflicts += 1,
            Some(_) => {}
            None => {
                dates.insert(&r.proposition_id, r.date);
            }
        }
    }
    let mut propositions: Vec<Proposition> = dates
        .iter()
        .map(|(id, &date)| Proposition {
            id: String::from(*id),
            date,
        })
        .collect();
    propositions.sort_by(|a, b| (a.date, &a.id).cmp(&(b.date, &b.id)));
    let index: BTreeMap<&str, PropositionIdx> = propositions
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), PropositionIdx(i as u32)))
        .collect();

    let mut party_votes: BTreeMap<&str, VoteMap> = BTreeMap::new();
    for l in leaders {
        let votes = party_votes.entry(l.party.as_str()).or_default();
        let Some(&idx) = index.get(l.proposition_id.as_str()) else {
            diagnostics.leader_votes_without_roll_call += 1;
            continue;
        };
        if let Some(prev) = votes.insert(idx, l.vote) {
            if prev != l.vote {
                return Err(Error::ConflictingLeaderVotes {
                    proposition: l.proposition_id.clone(),
                    party: l.party.clone(),
                });
            }
        }
    }
    for r in records {
        party_votes.entry(r.party.as_str()).or_default();
    }
    let parties: Vec<Party> = party_votes
        .iter()
        .map(|(id, votes)| Party::original(*id, votes.clone()))
        .collect();

    let mut congressmen: BTreeMap<String, String> = BTreeMap::new();
    let mut by_congressman: BTreeMap<&str, Vec<(usize, &RollCallRecord)>> = BTreeMap::new();
    for (pos, r) in records.iter().enumerate() {
        congressmen
            .entry(r.congressman_id.clone())
            .or_insert_with(|| r.congressman_name.clone());
        by_congressman
            .entry(r.congressman_id.as_str())
            .or_default()
            .push((pos, r));
    }

    let mut partisans = Vec::new();
    for (congressman, mut rows) in by_congressman {
        rows.sort_by_key(|&(pos, r)| (dates[r.proposition_id.as_str()], index[r.proposition_id.as_str()], pos));
        for (ordinal, run) in rows.chunk_by(|a, b| a.1.party == b.1.party).enumerate() {
            let party = run[0].1.party.as_str();
            let leader = &party_votes[party];
            let mut votes = VoteMap::new();
            for &(_, r) in run {
                let idx = index[r.proposition_id.as_str()];
                if !leader.contains(idx) {
                    diagnostics.votes_without_leader_vote += 1;
                } else if votes.contains(idx) {
                    diagnostics.duplicate_votes += 1;
                } else {
                    votes.insert(idx, r.vote);
                }
            }
            let id = PartisanId(partisans.len() as u32);
            let first = dates[run[0].1.proposition_id.as_str()];
            let last = dates[run[run.len() - 1].1.proposition_id.as_str()];
            let mut partisan = Partisan::new(id, congressman, party, votes, first, last)?;
            partisan.ordinal = ordinal as _;
            if partisan.votes.is_empty() {
                diagnostics.zero_vote_partisans.push(id);
            }
            partisans.push(partisan);
        }
    }

    Ok(Dataset {
        propositions,
        parties,
        partisans,
        congressmen,
        diagnostics,
    })
}

/// A broken dataset invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateProposition(String),
    UnknownParty { partisan: String, party: String },
    FreeVote { partisan: String },
    VoteWithoutLeaderVote { partisan: String, proposition: String },
    InvertedInterval { partisan: String },
    OverlappingMemberships { congressman: String },
    BadPartisanId { partisan: String },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::DuplicateProposition(id) => write!(f, "proposition {id} appears twice"),
            Self::UnknownParty { partisan, party } => {
                write!(f, "partisan {partisan} belongs to unknown party {party}")
            }
            Self::FreeVote { partisan } => write!(f, "partisan {partisan} holds an F vote"),
            Self::VoteWithoutLeaderVote {
                partisan,
                proposition,
            } => write!(
                f,
                "partisan {partisan} voted on {proposition} without a leader vote"
            ),
            Self::InvertedInterval { partisan } => {
                write!(f, "partisan {partisan} has last vote before first vote")
            }
            Self::OverlappingMemberships { congressman } => {
                write!(f, "congressman {congressman} has overlapping memberships")
            }
            Self::BadPartisanId { partisan } => write!(f, "partisan {partisan} is out of place"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub propositions: usize,
    pub parties: usize,
    pub partisans: usize,
    pub congressmen: usize,
    pub partisan_votes: usize,
    pub leader_votes: usize,
    pub zero_vote_partisans: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub summary: Summary,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(dataset: &Dataset) -> ValidationReport {
    let mut violations = Vec::new();

    let mut ids = BTreeSet::new();
    for p in &dataset.propositions {
        if !ids.insert(p.id.as_str()) {
            violations.push(Violation::DuplicateProposition(p.id.clone()));
        }
    }

    for (i, a) in dataset.partisans.iter().enumerate() {
        let label = a.label();
        if a.id.0 as usize != i {
            violations.push(Violation::BadPartisanId {
                partisan: label.clone(),
            });
        }
        if a.first_vote > a.last_vote {
            violations.push(Violation::InvertedInterval {
                partisan: label.clone(),
            });
        }
        if a.votes.iter().any(|(_, v)| v == VoteValue::Free) {
            violations.push(Violation::FreeVote {
                partisan: label.clone(),
            });
        }
        match dataset.party(&a.party) {
            None => violations.push(Violation::UnknownParty {
                partisan: label,
                party: a.party.clone(),
            }),
            Some(p) => {
                if let Some(k) = a.votes.propositions().find(|&k| !p.votes.contains(k)) {
                    let proposition = dataset
                        .proposition(k)
                        .map(|p| p.id.clone())
                        .unwrap_or_default();
                    violations.push(Violation::VoteWithoutLeaderVote {
                        partisan: label,
                        proposition,
                    });
                }
            }
        }
    }

    for (congressman, list) in dataset.memberships() {
        if list.windows(2).any(|w| w[1].first_vote < w[0].last_vote) {
            violations.push(Violation::OverlappingMemberships {
                congressman: String::from(congressman),
            });
        }
    }

    let summary = Summary {
        propositions: dataset.propositions.len(),
        parties: dataset.parties.len(),
        partisans: dataset.partisans.len(),
        congressmen: dataset.congressmen.len(),
        partisan_votes: dataset.partisans.iter().map(|a| a.votes.len()).sum(),
        leader_votes: dataset.parties.iter().map(|p| p.votes.len()).sum(),
        zero_vote_partisans: dataset
            .partisans
            .iter()
            .filter(|a| a.votes.is_empty())
            .count(),
    };
    ValidationReport {
        violations,
        summary,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use VoteValue::*;

    pub(crate) fn rec(prop: &str, date: (i32, u8, u8), who: &str, party: &str, vote: VoteValue) -> RollCallRecord {
        RollCallRecord {
            proposition_id: prop.into(),
            date: Date::new(date.0, date.1, date.2).unwrap(),
            congressman_id: who.into(),
            congressman_name: alloc::format!("Name {who}"),
            party: party.into(),
            vote,
        }
    }

    pub(crate) fn lead(prop: &str, party: &str, vote: VoteValue) -> LeaderVoteRecord {
        LeaderVoteRecord {
            proposition_id: prop.into(),
            party: party.into(),
            vote,
        }
    }

    #[test]
    fn splits_memberships_on_party_change() {
        let records = [
            rec("P1", (1999, 3, 2), "C7", "PT", Yes),
            rec("P2", (2000, 1, 5), "C7", "PSB", No),
            rec("P3", (2001, 1, 5), "C7", "PSB", No),
        ];
        let leaders = [lead("P1", "PT", Yes), lead("P2", "PSB", No), lead("P3", "PSB", Yes)];
        let ds = build_dataset(&records, &leaders).unwrap();
        assert_eq!(ds.partisans.len(), 2);
        assert_eq!(ds.partisans[0].party, "PT");
        assert_eq!(ds.partisans[1].party, "PSB");
        assert_eq!(ds.partisans[1].votes.len(), 2);
        assert_eq!(ds.partisans[1].ordinal, 1);
        assert_eq!(ds.partisans[1].first_vote, Date::new(2000, 1, 5).unwrap());
        assert_eq!(ds.partisans[1].last_vote, Date::new(2001, 1, 5).unwrap());
        assert!(validate(&ds).is_valid());
    }

    #[test]
    fn returning_to_a_party_is_a_new_membership() {
        let records = [
            rec("P1", (1999, 1, 1), "C1", "X", Yes),
            rec("P2", (1999, 2, 1), "C1", "Y", Yes),
            rec("P3", (1999, 3, 1), "C1", "X", Yes),
        ];
        let leaders = [lead("P1", "X", Yes), lead("P2", "Y", Yes), lead("P3", "X", Yes)];
        let ds = build_dataset(&records, &leaders).unwrap();
        let parties: Vec<_> = ds.partisans.iter().map(|a| a.party.as_str()).collect();
        assert_eq!(parties, ["X", "Y", "X"]);
    }

    #[test]
    fn drops_votes_without_leader_vote() {
        let records = [
            rec("P1", (1999, 1, 1), "C1", "X", Yes),
            rec("P2", (1999, 1, 2), "C1", "X", No),
        ];
        let leaders = [lead("P1", "X", Yes), lead("P2", "Y", Yes), lead("P9", "X", Yes)];
        let ds = build_dataset(&records, &leaders).unwrap();
        assert_eq!(ds.partisans[0].votes.len(), 1);
        assert_eq!(ds.diagnostics.votes_without_leader_vote, 1);
        assert_eq!(ds.diagnostics.leader_votes_without_roll_call, 1);
        for a in &ds.partisans {
            assert!(a.votes.is_subset_of(&ds.party(&a.party).unwrap().votes));
        }
    }

    #[test]
    fn flags_zero_vote_partisans() {
        let records = [rec("P1", (1999, 1, 1), "C1", "X", Yes)];
        let ds = build_dataset(&records, &[lead("P1", "Y", No)]).unwrap();
        assert_eq!(ds.diagnostics.zero_vote_partisans, [PartisanId(0)]);
        assert_eq!(validate(&ds).summary.zero_vote_partisans, 1);
    }

    #[test]
    fn conflicting_leader_votes_fail() {
        let records = [rec("P1", (1999, 1, 1), "C1", "X", Yes)];
        let leaders = [lead("P1", "X", Yes), lead("P1", "X", Yes), lead("P1", "X", No)];
        assert_eq!(
            build_dataset(&records, &leaders),
            Err(Error::ConflictingLeaderVotes {
                proposition: "P1".into(),
                party: "X".into()
            })
        );
    }

    #[test]
    fn free_partisan_votes_fail() {
        let records = [rec("P1", (1999, 1, 1), "C1", "X", Free)];
        assert!(matches!(build_dataset(&records, &[]), Err(Error::FreeVoteForPartisan(_))));
    }

    #[test]
    fn overlap_is_reported() {
        let records = [
            rec("P1", (1999, 1, 1), "C1", "X", Yes),
            rec("P2", (1999, 6, 1), "C1", "Y", Yes),
        ];
        let leaders = [lead("P1", "X", Yes), lead("P2", "Y", Yes)];
        let mut ds = build_dataset(&records, &leaders).unwrap();
        ds.partisans[0].last_vote = Date::new(1999, 12, 1).unwrap();
        let report = validate(&ds);
        assert_eq!(
            report.violations,
            [Violation::OverlappingMemberships {
                congressman: "C1".into()
            }]
        );
    }

    #[test]
    fn leader_subset_violation_is_reported() {
        let records = [rec("P1", (1999, 1, 1), "C1", "X", Yes)];
        let mut ds = build_dataset(&records, &[lead("P1", "X", Yes)]).unwrap();
        ds.parties[0].votes = VoteMap::new();
        let report = validate(&ds);
        assert!(matches!(report.violations[..], [Violation::VoteWithoutLeaderVote { .. }]));
    }

    #[test]
    fn records_round_trip() {
        let records = [
            rec("P1", (1999, 1, 1), "C1", "X", Yes),
            rec("P2", (1999, 1, 2), "C2", "Y", Obstruction),
        ];
        let leaders = [lead("P1", "X", Yes), lead("P2", "Y", Free)];
        let ds = build_dataset(&records, &leaders).unwrap();
        let (r2, l2) = ds.to_records();
        assert_eq!(build_dataset(&r2, &l2).unwrap(), ds);
    }
}
