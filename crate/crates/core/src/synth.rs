//! Seeded synthetic roll-call data with a known bloc structure.
//!
//! Parties belong to latent ideological blocs placed on a line. Each
//! proposition cuts the line at a random point; blocs on one side vote Y and
//! the other side N, and all parties of a bloc share the leader vote, so
//! bloc-mates are always mergeable. The first `n_blocs - 1` propositions cut
//! exactly between neighbouring blocs, which keeps distinct blocs from ever
//! merging.
//!
//! Time spans four two-year terms starting in 1999. Congressmen serve a
//! contiguous run of terms and may switch party between terms; a few are
//! short-tenure substitutes who only vote on a handful of propositions.
//! A partisan deviates from the leader with probability `noise_rate`, usually
//! towards a neighbouring bloc.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{build_dataset, Dataset, LeaderVoteRecord, RollCallRecord};
use crate::error::{Error, Result};
use crate::model::{Date, VoteValue};

const FIRST_YEAR: i32 = 1999;
const TERMS: usize = 4;
/// Days per synthetic year: twelve months of 28 days keep every date valid.
const YEAR_DAYS: usize = 12 * 28;
const ATTENDANCE: f64 = 0.9;
const SUBSTITUTE_RATE: f64 = 0.1;
const OBSTRUCTION_RATE: f64 = 0.04;
const FREE_RATE: f64 = 0.04;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthParams {
    pub n_parties: usize,
    pub n_blocs: usize,
    pub n_propositions: usize,
    /// Number of congressmen; switches add further memberships.
    pub n_partisans: usize,
    pub noise_rate: f64,
    pub switch_rate: f64,
    pub seed: u64,
}

impl SynthParams {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadParams(msg));
        if self.n_parties == 0 || self.n_blocs == 0 || self.n_propositions == 0 || self.n_partisans == 0 {
            return bad(format!("all counts must be positive: {self:?}"));
        }
        if self.n_parties < self.n_blocs {
            return bad(format!("{} parties cannot fill {} blocs", self.n_parties, self.n_blocs));
        }
        if self.n_partisans < self.n_parties {
            return bad(format!(
                "{} congressmen cannot staff {} parties",
                self.n_partisans, self.n_parties
            ));
        }
        if self.n_propositions < self.n_blocs {
            return bad(format!(
                "need at least {} propositions to separate the blocs",
                self.n_blocs
            ));
        }
        for (name, rate) in [("noise_rate", self.noise_rate), ("switch_rate", self.switch_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} = {rate} is outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Named parameter sets shipped with the tool.
pub fn presets() -> Vec<(&'static str, SynthParams)> {
    let p = |n_parties, n_blocs, n_propositions, n_partisans, noise_rate, switch_rate, seed| SynthParams {
        n_parties,
        n_blocs,
        n_propositions,
        n_partisans,
        noise_rate,
        switch_rate,
        seed,
    };
    vec![
        ("mini", p(6, 3, 60, 40, 0.08, 0.15, 1)),
        ("blocs", p(8, 4, 120, 80, 0.0, 0.1, 2)),
        ("noisy", p(12, 4, 200, 150, 0.1, 0.1, 3)),
        ("chamber", p(36, 6, 500, 1000, 0.1, 0.1, 4)),
    ]
}

pub fn preset(name: &str) -> Option<SynthParams> {
    presets().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}

/// Generated records plus the bookkeeping needed to check them.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthData {
    pub records: Vec<RollCallRecord>,
    pub leaders: Vec<LeaderVoteRecord>,
    /// Number of (congressman, party run) memberships generated.
    pub memberships: usize,
    /// Bloc of each party, indexed like `party_id`.
    pub party_bloc: Vec<usize>,
}

pub fn party_id(i: usize) -> String {
    format!("P{:02}", i + 1)
}

fn width(n: usize) -> usize {
    let mut w = 1;
    let mut n = n / 10;
    while n > 0 {
        w += 1;
        n /= 10;
    }
    w.max(3)
}

fn vote_date(term: usize, k: usize, m: usize) -> Date {
    let d = k * 2 * YEAR_DAYS / m;
    let year = FIRST_YEAR + (2 * term + d / YEAR_DAYS) as i32;
    let in_year = d % YEAR_DAYS;
    Date::new(year, (in_year / 28 + 1) as u8, (in_year % 28 + 1) as u8).expect("synthetic date")
}

fn other(rng: &mut ChaCha8Rng, v: VoteValue) -> VoteValue {
    let pool: Vec<VoteValue> = [VoteValue::Yes, VoteValue::No, VoteValue::Obstruction]
        .into_iter()
        .filter(|&x| x != v)
        .collect();
    *pool.choose(rng).expect("two alternatives")
}

pub fn synth_records(params: &SynthParams) -> Result<SynthData> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_props = params.n_propositions;
    let n_blocs = params.n_blocs;
    let terms = TERMS.min(n_props);

    let party_bloc: Vec<usize> = (0..params.n_parties).map(|i| i % n_blocs).collect();

    // Proposition j belongs to term_of[j]; its date depends on its rank there.
    let term_start: Vec<usize> = (0..=terms).map(|t| t * n_props / terms).collect();
    let mut prop_term = vec![0; n_props];
    let mut dates = Vec::with_capacity(n_props);
    for t in 0..terms {
        let m = term_start[t + 1] - term_start[t];
        for k in 0..m {
            prop_term[term_start[t] + k] = t;
            dates.push(vote_date(t, k, m));
        }
    }
    let w = width(n_props);
    let prop_ids: Vec<String> = (0..n_props).map(|j| format!("V{:0w$}", j + 1)).collect();

    let mut bloc_votes: Vec<Vec<VoteValue>> = Vec::with_capacity(n_props);
    for j in 0..n_props {
        let separating = j + 1 < n_blocs;
        let cut = if separating {
            (j + 1) as f64 / n_blocs as f64
        } else {
            rng.gen::<f64>()
        };
        let flip = rng.gen_bool(0.5);
        let row = (0..n_blocs)
            .map(|k| {
                let pos = (k as f64 + 0.5) / n_blocs as f64;
                let base = if (pos < cut) != flip { VoteValue::Yes } else { VoteValue::No };
                if separating {
                    return base;
                }
                let u: f64 = rng.gen();
                if u < OBSTRUCTION_RATE {
                    VoteValue::Obstruction
                } else if u < OBSTRUCTION_RATE + FREE_RATE {
                    VoteValue::Free
                } else {
                    base
                }
            })
            .collect();
        bloc_votes.push(row);
    }

    let mut leaders = Vec::with_capacity(n_props * params.n_parties);
    for (j, pid) in prop_ids.iter().enumerate() {
        for (i, &b) in party_bloc.iter().enumerate() {
            leaders.push(LeaderVoteRecord {
                proposition_id: pid.clone(),
                party: party_id(i),
                vote: bloc_votes[j][b],
            });
        }
    }

    let mut records = Vec::new();
    let mut memberships = 0;
    let mut attended = vec![false; n_props];
    // Party of the first congressman in each term.
    let mut anchor = vec![0; terms];
    for c in 0..params.n_partisans {
        let cid = format!("C{:04}", c + 1);
        let name = format!("Deputy {}", c + 1);
        let founder = c < params.n_parties;
        let mut party = if founder { c } else { rng.gen_range(0..params.n_parties) };
        let direction: bool = rng.gen_bool(0.5);

        // Propositions this congressman sits through, by term.
        let spans: Vec<(usize, usize, usize)> = if !founder && rng.gen_bool(SUBSTITUTE_RATE) {
            let t = rng.gen_range(0..terms);
            let (lo, hi) = (term_start[t], term_start[t + 1]);
            let len = rng.gen_range(1..=((hi - lo) / 10).max(1));
            let start = rng.gen_range(lo..=hi - len);
            vec![(t, start, start + len)]
        } else {
            let (first, last) = if founder {
                (0, terms - 1)
            } else {
                let first = rng.gen_range(0..terms);
                (first, rng.gen_range(first..terms))
            };
            (first..=last).map(|t| (t, term_start[t], term_start[t + 1])).collect()
        };

        let mut prev_party = None;
        for (n, &(t, lo, hi)) in spans.iter().enumerate() {
            if n > 0 && params.n_parties > 1 && rng.gen_bool(params.switch_rate) {
                let next = rng.gen_range(0..params.n_parties - 1);
                party = if next >= party { next + 1 } else { next };
            }
            if prev_party != Some(party) {
                memberships += 1;
            }
            let new_run = prev_party != Some(party);
            prev_party = Some(party);
            if c == 0 {
                anchor[t] = party;
            }
            let bloc = party_bloc[party];
            let lean = match (n_blocs, bloc) {
                (1, _) => None,
                (_, 0) => Some(1),
                (b, k) if k == b - 1 => Some(k - 1),
                (_, k) => Some(if direction { k + 1 } else { k - 1 }),
            };
            for j in lo..hi {
                // A run's first proposition is always attended so no
                // membership ends up without votes.
                if !(new_run && j == lo) && !rng.gen_bool(ATTENDANCE) {
                    continue;
                }
                let leader = bloc_votes[j][bloc];
                let vote = if leader == VoteValue::Free {
                    if rng.gen_bool(0.5) { VoteValue::Yes } else { VoteValue::No }
                } else if params.noise_rate > 0.0 && rng.gen_bool(params.noise_rate) {
                    match lean.map(|l| bloc_votes[j][l]) {
                        Some(v) if v != leader && v != VoteValue::Free => v,
                        _ => other(&mut rng, leader),
                    }
                } else {
                    leader
                };
                attended[j] = true;
                records.push(RollCallRecord {
                    proposition_id: prop_ids[j].clone(),
                    date: dates[j],
                    congressman_id: cid.clone(),
                    congressman_name: name.clone(),
                    party: party_id(party),
                    vote,
                });
            }
        }
    }

    // Every proposition needs at least one roll-call row to be dated. The
    // first congressman serves throughout, so they cover any gap.
    for j in (0..n_props).filter(|&j| !attended[j]) {
        let party = anchor[prop_term[j]];
        let vote = match bloc_votes[j][party_bloc[party]] {
            VoteValue::Free => VoteValue::Yes,
            v => v,
        };
        records.push(RollCallRecord {
            proposition_id: prop_ids[j].clone(),
            date: dates[j],
            congressman_id: String::from("C0001"),
            congressman_name: String::from("Deputy 1"),
            party: party_id(party),
            vote,
        });
    }

    Ok(SynthData {
        records,
        leaders,
        memberships,
        party_bloc,
    })
}

pub fn synth_dataset(params: &SynthParams) -> Result<Dataset> {
    let data = synth_records(params)?;
    build_dataset(&data.records, &data.leaders)
}
