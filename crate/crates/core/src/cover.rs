//! Option construction under a tolerance δ, the greedy set cover over
//! eligibility sets, and the final partisan-to-party assignment.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::merge::MergedPartySet;
use crate::model::{partisan_discipline, sim, Partisan, PartisanId};
use crate::TOLERANCE;

/// A party able to receive a partisan: it voted on every proposition the
/// partisan voted on.
#[derive(Clone, Debug, PartialEq)]
pub struct PartyOption {
    pub partisan: PartisanId,
    pub target: String,
    pub similarity: f64,
    /// The target has the partisan's original party among its components.
    pub own_party: bool,
}

/// Options of every party in `pm` whose vote set covers the partisan's.
pub fn build_options(a: &Partisan, pm: &MergedPartySet) -> Vec<PartyOption> {
    pm.parties
        .iter()
        .filter(|p| a.votes.is_subset_of(&p.votes))
        .filter_map(|p| {
            let similarity = sim(&a.votes, &p.votes).ok()?;
            Some(PartyOption {
                partisan: a.id,
                target: p.id.clone(),
                similarity,
                own_party: p.has_component(&a.party),
            })
        })
        .collect()
}

/// Options whose similarity is at least `discipline - delta`.
pub fn good_options(discipline: f64, options: &[PartyOption], delta: f64) -> Vec<&PartyOption> {
    options
        .iter()
        .filter(|o| is_good(o.similarity, discipline, delta))
        .collect()
}

fn is_good(similarity: f64, discipline: f64, delta: f64) -> bool {
    similarity >= discipline - delta - TOLERANCE
}

/// δ-independent option data for one partisan of the cover universe.
#[derive(Clone, Debug)]
pub struct PartisanOptions {
    pub partisan: PartisanId,
    /// Discipline towards the original party.
    pub discipline: f64,
    pub weight: usize,
    pub options: Vec<PartyOption>,
}

impl PartisanOptions {
    pub fn good(&self, delta: f64) -> impl Iterator<Item = &PartyOption> {
        self.options
            .iter()
            .filter(move |o| is_good(o.similarity, self.discipline, delta))
    }

    /// Good options that are not descendants of the partisan's own party.
    pub fn good_option_count(&self, delta: f64) -> usize {
        self.good(delta).filter(|o| !o.own_party).count()
    }
}

/// Options of every partisan against a merged party set, computed once and
/// reused for every δ.
#[derive(Clone, Debug)]
pub struct OptionTable {
    pub entries: Vec<PartisanOptions>,
    /// Zero-vote partisans, kept out of the cover universe.
    pub excluded: Vec<(PartisanId, String)>,
    /// Candidate party ids in merged-set order.
    pub parties: Vec<String>,
}

impl OptionTable {
    pub fn build(dataset: &Dataset, pm: &MergedPartySet) -> Result<Self> {
        let mut entries = Vec::new();
        let mut excluded = Vec::new();
        for a in &dataset.partisans {
            if a.votes.is_empty() {
                excluded.push((a.id, a.party.clone()));
                continue;
            }
            let own = dataset
                .party(&a.party)
                .ok_or_else(|| Error::UnknownParty(a.party.clone()))?;
            let d = partisan_discipline(a, own)?;
            entries.push(PartisanOptions {
                partisan: a.id,
                discipline: d.value,
                weight: d.weight,
                options: build_options(a, pm),
            });
        }
        Ok(OptionTable {
            entries,
            excluded,
            parties: pm.parties.iter().map(|p| p.id.clone()).collect(),
        })
    }

    pub fn universe(&self) -> BTreeSet<PartisanId> {
        self.entries.iter().map(|e| e.partisan).collect()
    }
}

/// Partisans eligible for one candidate party under a given δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EligibilitySet {
    pub party: String,
    pub members: BTreeSet<PartisanId>,
}

/// One eligibility set per candidate party, in the table's party order.
///
/// Fails with [`Error::UncoverablePartisan`] if a partisan has no good
/// option, which means the dataset broke the ingestion guarantee.
pub fn eligibility_sets(table: &OptionTable, delta: f64) -> Result<Vec<EligibilitySet>> {
    let mut members: BTreeMap<&str, BTreeSet<PartisanId>> =
        table.parties.iter().map(|p| (p.as_str(), BTreeSet::new())).collect();
    for entry in &table.entries {
        let mut covered = false;
        for o in entry.good(delta) {
            covered = true;
            members
                .get_mut(o.target.as_str())
                .expect("options target merged-set parties")
                .insert(entry.partisan);
        }
        if !covered {
            return Err(Error::UncoverablePartisan(entry.partisan));
        }
    }
    Ok(table
        .parties
        .iter()
        .map(|p| EligibilitySet {
            party: p.clone(),
            members: members.remove(p.as_str()).unwrap_or_default(),
        })
        .collect())
}

/// Greedy set cover: repeatedly picks the set with the most uncovered
/// partisans until the universe is covered.
///
/// Ties go to the larger set, then to the lexicographically smaller party id.
pub fn greedy_cover(
    universe: &BTreeSet<PartisanId>,
    sets: &[EligibilitySet],
) -> Result<Vec<String>> {
    let reachable: BTreeSet<_> = sets.iter().flat_map(|s| s.members.iter()).collect();
    if let Some(missing) = universe.iter().find(|a| !reachable.contains(a)) {
        return Err(Error::Infeasible(alloc::format!(
            "partisan {missing} belongs to no eligibility set"
        )));
    }

    let mut uncovered = universe.clone();
    let mut taken = alloc::vec![false; sets.len()];
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let best = sets
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, s)| {
                let gain = s.members.iter().filter(|a| uncovered.contains(a)).count();
                (i, gain)
            })
            .max_by(|&(i, gi), &(j, gj)| {
                gi.cmp(&gj)
                    .then(sets[i].members.len().cmp(&sets[j].members.len()))
                    .then(sets[j].party.cmp(&sets[i].party))
            });
        let Some((i, gain)) = best.filter(|&(_, g)| g > 0) else {
            return Err(Error::Infeasible("no set covers the remaining partisans".into()));
        };
        debug_assert!(gain > 0);
        taken[i] = true;
        for a in &sets[i].members {
            uncovered.remove(a);
        }
        chosen.push(sets[i].party.clone());
    }
    Ok(chosen)
}

/// Where one partisan sits in a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub party: String,
    /// Similarity with the assigned party; `None` for zero-vote partisans.
    pub similarity: Option<f64>,
    /// Number of votes the partisan cast.
    pub weight: usize,
}

/// An assignment of every partisan to a party.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    /// Tolerance the configuration was built with; `None` for configurations
    /// not produced by the cover (status quo, random models).
    pub delta: Option<f64>,
    pub placements: BTreeMap<PartisanId, Placement>,
    pub selected: BTreeSet<String>,
}

impl Configuration {
    /// The historical assignment: every partisan in the party they were in.
    pub fn status_quo(dataset: &Dataset) -> Result<Self> {
        let mut placements = BTreeMap::new();
        for a in &dataset.partisans {
            let similarity = if a.votes.is_empty() {
                None
            } else {
                let own = dataset
                    .party(&a.party)
                    .ok_or_else(|| Error::UnknownParty(a.party.clone()))?;
                Some(partisan_discipline(a, own)?.value)
            };
            placements.insert(
                a.id,
                Placement {
                    party: a.party.clone(),
                    similarity,
                    weight: a.votes.len(),
                },
            );
        }
        let selected = placements.values().map(|p| p.party.clone()).collect();
        Ok(Configuration {
            delta: None,
            placements,
            selected,
        })
    }

    /// Number of partisans per party that has at least one member.
    pub fn party_sizes(&self) -> BTreeMap<&str, usize> {
        let mut sizes = BTreeMap::new();
        for p in self.placements.values() {
            *sizes.entry(p.party.as_str()).or_insert(0) += 1;
        }
        sizes
    }

    pub fn party_of(&self, id: PartisanId) -> Option<&str> {
        self.placements.get(&id).map(|p| p.party.as_str())
    }
}

/// Assigns each partisan to the party of `pstar` among their good options
/// with the highest similarity. Ties prefer a descendant of the partisan's
/// own party, then the smaller party id. Zero-vote partisans keep their
/// original party.
pub fn assign(table: &OptionTable, pstar: &[String], delta: f64) -> Result<Configuration> {
    let selected: BTreeSet<String> = pstar.iter().cloned().collect();
    let mut placements = BTreeMap::new();
    for entry in &table.entries {
        let best = entry
            .good(delta)
            .filter(|o| selected.contains(&o.target))
            .reduce(|best, o| if prefer(o, best) { o } else { best })
            .ok_or_else(|| {
                Error::Infeasible(alloc::format!(
                    "partisan {} has no good option among the selected parties",
                    entry.partisan
                ))
            })?;
        placements.insert(
            entry.partisan,
            Placement {
                party: best.target.clone(),
                similarity: Some(best.similarity),
                weight: entry.weight,
            },
        );
    }
    for (id, party) in &table.excluded {
        placements.insert(
            *id,
            Placement {
                party: party.clone(),
                similarity: None,
                weight: 0,
            },
        );
    }
    Ok(Configuration {
        delta: Some(delta),
        placements,
        selected,
    })
}

fn prefer(candidate: &PartyOption, incumbent: &PartyOption) -> bool {
    let diff = candidate.similarity - incumbent.similarity;
    if diff > TOLERANCE {
        return true;
    }
    if diff < -TOLERANCE {
        return false;
    }
    match (candidate.own_party, incumbent.own_party) {
        (true, false) => true,
        (false, true) => false,
        _ => candidate.target < incumbent.target,
    }
}

/// The cover result for one δ.
#[derive(Clone, Debug)]
pub struct Solution {
    pub sets: Vec<EligibilitySet>,
    pub pstar: Vec<String>,
    pub config: Configuration,
}

/// Eligibility, greedy cover and assignment for one δ.
pub fn solve(table: &OptionTable, delta: f64) -> Result<Solution> {
    let sets = eligibility_sets(table, delta)?;
    let pstar = greedy_cover(&table.universe(), &sets)?;
    let config = assign(table, &pstar, delta)?;
    Ok(Solution { sets, pstar, config })
}
