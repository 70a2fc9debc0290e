//! Merging of parties that never disagreed on a common proposition.
//!
//! Two parties can merge when they voted on disjoint propositions, or when
//! they declared the same vote on every proposition they share. [`merge_all`]
//! grows merged parties one original party at a time until no original can be
//! added, and returns every maximal combination it reached.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::Party;

/// Candidate parties for the cover: merged parties plus originals that could
/// not be merged with anything.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedPartySet {
    pub parties: Vec<Party>,
    /// Set when `max_k` stopped at least one party that could still grow.
    pub truncated: bool,
}

impl MergedPartySet {
    /// Merged party id → component original-party ids.
    pub fn provenance(&self) -> BTreeMap<&str, &[String]> {
        self.parties
            .iter()
            .map(|p| (p.id.as_str(), p.components.as_slice()))
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&Party> {
        self.parties.iter().find(|p| p.id == id)
    }

    /// Originals that survived unmerged.
    pub fn unmerged(&self) -> impl Iterator<Item = &Party> {
        self.parties.iter().filter(|p| !p.is_merged())
    }

    /// Number of parties per component count.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for p in &self.parties {
            *hist.entry(p.components.len()).or_insert(0) += 1;
        }
        hist
    }

    pub fn len(&self) -> usize {
        self.parties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parties.is_empty()
    }
}

/// True if the parties share no proposition, or vote identically on every
/// proposition they share.
pub fn can_merge(p: &Party, q: &Party) -> bool {
    p.votes.first_conflict(&q.votes).is_none()
}

/// Union of two mergeable parties.
pub fn merge(p: &Party, q: &Party) -> Result<Party> {
    let votes = p
        .votes
        .union(&q.votes)
        .map_err(|prop| Error::ConflictingVotes {
            left: p.id.clone(),
            right: q.id.clone(),
            proposition: prop.0,
        })?;
    let mut ids: Vec<String> = p.components.iter().chain(&q.components).cloned().collect();
    ids.sort_unstable();
    ids.dedup();
    let mut acronyms: Vec<&str> = [p, q]
        .iter()
        .flat_map(|party| {
            if party.is_merged() {
                party.acronym.split('_').collect::<Vec<_>>()
            } else {
                alloc::vec![party.acronym.as_str()]
            }
        })
        .collect();
    acronyms.sort_unstable();
    acronyms.dedup();
    Ok(Party {
        id: ids.join("_"),
        acronym: acronyms.join("_"),
        votes,
        components: ids,
    })
}

/// Builds the set of all maximal mergeable combinations of `parties`.
///
/// Growth starts from every original party and, each round, tries to add one
/// original that is not yet a component. A combination is emitted when no
/// original can be added to it. Combinations with the same component set are
/// kept once. With `max_k`, combinations stop growing at `max_k` components
/// and are emitted as they are; a warning is logged when that happens.
pub fn merge_all(parties: &[Party], max_k: Option<usize>) -> MergedPartySet {
    let mut originals: Vec<&Party> = parties.iter().collect();
    originals.sort_by(|a, b| a.id.cmp(&b.id));
    let n = originals.len();

    // compatible[i][j]: originals i and j satisfy C1 or C2. A combination
    // conflicts with an original iff one of its components does.
    let mut compatible = alloc::vec![alloc::vec![true; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let ok = can_merge(originals[i], originals[j]);
            compatible[i][j] = ok;
            compatible[j][i] = ok;
        }
    }

    let mut seen: BTreeSet<Vec<usize>> = (0..n).map(|i| alloc::vec![i]).collect();
    let mut frontier: Vec<Vec<usize>> = seen.iter().cloned().collect();
    let mut maximal: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut truncated = false;

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for combo in frontier {
            let extensions = (0..n).filter(|q| {
                combo.binary_search(q).is_err() && combo.iter().all(|&c| compatible[c][*q])
            });
            if max_k.is_some_and(|k| combo.len() >= k) {
                if extensions.clone().next().is_some() {
                    truncated = true;
                }
                maximal.insert(combo);
                continue;
            }
            let mut merged = false;
            for q in extensions {
                merged = true;
                let mut grown = combo.clone();
                let pos = grown.binary_search(&q).unwrap_err();
                grown.insert(pos, q);
                if seen.insert(grown.clone()) {
                    next.push(grown);
                }
            }
            if !merged {
                maximal.insert(combo);
            }
        }
        frontier = next;
    }

    if truncated {
        log::warn!(
            "party merging stopped at {} components; some merged parties are not maximal",
            max_k.unwrap_or_default()
        );
    }

    let parties = maximal
        .into_iter()
        .map(|combo| {
            let mut acc = originals[combo[0]].clone();
            for &c in &combo[1..] {
                acc = merge(&acc, originals[c]).expect("components are pairwise compatible");
            }
            acc
        })
        .collect();
    MergedPartySet { parties, truncated }
}
