//! Domain vocabulary and the agreement, similarity and discipline formulas.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::cover::Configuration;
use crate::error::{Error, Result};

/// A single vote. Partisans vote `Yes`, `No` or `Obstruction`; party leaders
/// may also declare `Free`, which agrees with anything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VoteValue {
    Yes,
    No,
    Obstruction,
    Free,
}

impl VoteValue {
    pub const ALL: [VoteValue; 4] = [Self::Yes, Self::No, Self::Obstruction, Self::Free];

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "Y" => Some(Self::Yes),
            "N" => Some(Self::No),
            "O" => Some(Self::Obstruction),
            "F" => Some(Self::Free),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Self::Yes => "Y",
            Self::No => "N",
            Self::Obstruction => "O",
            Self::Free => "F",
        }
    }
}

impl fmt::Display for VoteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Whether two votes are in accordance. A free vote agrees with anything.
pub fn agrees(v1: VoteValue, v2: VoteValue) -> bool {
    v1 == v2 || v1 == VoteValue::Free || v2 == VoteValue::Free
}

/// Index of a proposition inside a [`Dataset`](crate::Dataset).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropositionIdx(pub u32);

/// Votes keyed by proposition, sorted and without duplicate keys.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VoteMap {
    entries: Vec<(PropositionIdx, VoteValue)>,
}

impl VoteMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a vote, returning the vote previously stored for `prop` (which
    /// is then replaced).
    pub fn insert(&mut self, prop: PropositionIdx, vote: VoteValue) -> Option<VoteValue> {
        match self.entries.binary_search_by_key(&prop, |&(k, _)| k) {
            Ok(i) => Some(core::mem::replace(&mut self.entries[i].1, vote)),
            Err(i) => {
                self.entries.insert(i, (prop, vote));
                None
            }
        }
    }

    pub fn get(&self, prop: PropositionIdx) -> Option<VoteValue> {
        self.entries
            .binary_search_by_key(&prop, |&(k, _)| k)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn contains(&self, prop: PropositionIdx) -> bool {
        self.get(prop).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PropositionIdx, VoteValue)> + '_ {
        self.entries.iter().copied()
    }

    pub fn propositions(&self) -> impl Iterator<Item = PropositionIdx> + '_ {
        self.entries.iter().map(|&(k, _)| k)
    }

    /// Pairs of votes on the propositions both maps hold, in key order.
    pub fn common<'a>(
        &'a self,
        other: &'a VoteMap,
    ) -> impl Iterator<Item = (PropositionIdx, VoteValue, VoteValue)> + 'a {
        Common {
            left: &self.entries,
            right: &other.entries,
        }
    }

    /// `true` if every proposition in `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &VoteMap) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut rest = other.entries.iter();
        'outer: for &(k, _) in &self.entries {
            for &(o, _) in rest.by_ref() {
                match o.cmp(&k) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    /// First common proposition on which the two maps hold different votes.
    pub fn first_conflict(&self, other: &VoteMap) -> Option<PropositionIdx> {
        self.common(other)
            .find(|&(_, a, b)| a != b)
            .map(|(k, _, _)| k)
    }

    /// Union of two maps. Fails on the first proposition where they differ.
    pub fn union(&self, other: &VoteMap) -> core::result::Result<VoteMap, PropositionIdx> {
        let (mut i, mut j) = (0, 0);
        let (l, r) = (&self.entries, &other.entries);
        let mut entries = Vec::with_capacity(l.len().max(r.len()));
        while i < l.len() && j < r.len() {
            match l[i].0.cmp(&r[j].0) {
                Ordering::Less => {
                    entries.push(l[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    entries.push(r[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    if l[i].1 != r[j].1 {
                        return Err(l[i].0);
                    }
                    entries.push(l[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        entries.extend_from_slice(&l[i..]);
        entries.extend_from_slice(&r[j..]);
        Ok(VoteMap { entries })
    }
}

/// Collects votes, keeping the first vote seen for a repeated proposition.
impl FromIterator<(PropositionIdx, VoteValue)> for VoteMap {
    fn from_iter<I: IntoIterator<Item = (PropositionIdx, VoteValue)>>(iter: I) -> Self {
        let mut entries: Vec<_> = iter.into_iter().collect();
        entries.sort_by_key(|&(k, _)| k);
        entries.dedup_by_key(|&mut (k, _)| k);
        VoteMap { entries }
    }
}

struct Common<'a> {
    left: &'a [(PropositionIdx, VoteValue)],
    right: &'a [(PropositionIdx, VoteValue)],
}

impl Iterator for Common<'_> {
    type Item = (PropositionIdx, VoteValue, VoteValue);

    fn next(&mut self) -> Option<Self::Item> {
        while let (Some(&(a, va)), Some(&(b, vb))) = (self.left.first(), self.right.first()) {
            match a.cmp(&b) {
                Ordering::Less => self.left = &self.left[1..],
                Ordering::Greater => self.right = &self.right[1..],
                Ordering::Equal => {
                    self.left = &self.left[1..];
                    self.right = &self.right[1..];
                    return Some((a, va, vb));
                }
            }
        }
        None
    }
}

/// Fraction of common propositions on which the two vote maps agree.
///
/// Disjoint maps are incomparable and yield [`Error::EmptyIntersection`].
pub fn sim(votes_i: &VoteMap, votes_j: &VoteMap) -> Result<f64> {
    let (mut common, mut agreeing) = (0u64, 0u64);
    for (_, a, b) in votes_i.common(votes_j) {
        common += 1;
        agreeing += u64::from(agrees(a, b));
    }
    if common == 0 {
        return Err(Error::EmptyIntersection);
    }
    Ok(agreeing as f64 / common as f64)
}

/// Calendar date, ordered chronologically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

impl Date {
    /// Builds a date, checking month and day ranges (leap years included).
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self> {
        let days_in_month = match month {
            1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
            4 | 6 | 9 | 11 => 30,
            2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
            2 => 28,
            _ => 0,
        };
        if day == 0 || day > days_in_month {
            return Err(Error::BadDate(alloc::format!("{year:04}-{month:02}-{day:02}")));
        }
        Ok(Date { year, month, day })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    pub fn day(self) -> u8 {
        self.day
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposition {
    pub id: String,
    pub date: Date,
}

/// A party and the votes its leader declared. Merged parties list every
/// original party they were built from in `components` (sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Party {
    pub id: String,
    pub acronym: String,
    pub votes: VoteMap,
    pub components: Vec<String>,
}

impl Party {
    /// An original party, identified by its acronym.
    pub fn original(acronym: impl Into<String>, votes: VoteMap) -> Self {
        let acronym = acronym.into();
        Party {
            id: acronym.clone(),
            components: alloc::vec![acronym.clone()],
            acronym,
            votes,
        }
    }

    pub fn is_merged(&self) -> bool {
        self.components.len() > 1
    }

    pub fn has_component(&self, party_id: &str) -> bool {
        self.components
            .binary_search_by(|c| c.as_str().cmp(party_id))
            .is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartisanId(pub u32);

impl fmt::Display for PartisanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One membership of a congressman in a party, with the votes cast during it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partisan {
    pub id: PartisanId,
    pub congressman: String,
    pub party: String,
    /// Position of this membership among the congressman's memberships.
    pub ordinal: u32,
    pub votes: VoteMap,
    pub first_vote: Date,
    pub last_vote: Date,
}

impl Partisan {
    /// Rejects vote maps holding `F`, which only party leaders may declare.
    pub fn new(
        id: PartisanId,
        congressman: impl Into<String>,
        party: impl Into<String>,
        votes: VoteMap,
        first_vote: Date,
        last_vote: Date,
    ) -> Result<Self> {
        let congressman = congressman.into();
        if votes.iter().any(|(_, v)| v == VoteValue::Free) {
            return Err(Error::FreeVoteForPartisan(congressman));
        }
        Ok(Partisan {
            id,
            congressman,
            party: party.into(),
            ordinal: 0,
            votes,
            first_vote,
            last_vote,
        })
    }

    /// Stable human-readable key, `congressman:party:ordinal`.
    pub fn label(&self) -> String {
        alloc::format!("{}:{}:{}", self.congressman, self.party, self.ordinal)
    }
}

/// A discipline value in `[0, 1]` and the number of votes it aggregates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisciplineValue {
    pub value: f64,
    pub weight: usize,
}

impl DisciplineValue {
    /// Vote-weighted mean of several discipline values.
    pub fn weighted_mean(values: impl IntoIterator<Item = DisciplineValue>) -> Result<Self> {
        let (mut num, mut weight) = (0.0, 0usize);
        for d in values {
            num += d.value * d.weight as f64;
            weight += d.weight;
        }
        if weight == 0 {
            return Err(Error::NoMembers);
        }
        Ok(DisciplineValue {
            value: num / weight as f64,
            weight,
        })
    }
}

/// Discipline of a partisan towards a party.
pub fn partisan_discipline(a: &Partisan, p: &Party) -> Result<DisciplineValue> {
    Ok(DisciplineValue {
        value: sim(&a.votes, &p.votes)?,
        weight: a.votes.len(),
    })
}

/// Vote-weighted mean of the members' disciplines towards `p`.
pub fn party_discipline(p: &Party, members: &[&Partisan]) -> Result<DisciplineValue> {
    if members.is_empty() {
        return Err(Error::NoMembers);
    }
    let values = members
        .iter()
        .map(|a| partisan_discipline(a, p))
        .collect::<Result<Vec<_>>>()?;
    DisciplineValue::weighted_mean(values)
}

/// Vote-weighted discipline over every partisan of a configuration that has a
/// similarity value, regardless of party.
pub fn overall_discipline(config: &Configuration) -> Result<DisciplineValue> {
    DisciplineValue::weighted_mean(config.placements.values().filter_map(|pl| {
        pl.similarity.map(|value| DisciplineValue {
            value,
            weight: pl.weight,
        })
    }))
}
