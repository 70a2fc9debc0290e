//! Random null models and replicated confidence intervals.
//!
//! All randomness comes from a [`ChaCha8Rng`] seeded by the caller; there is
//! no global generator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{Configuration, OptionTable, Placement};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{partisan_discipline, sim, PartisanId};

/// Name of the generator behind every random model, for reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3)";

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

/// A candidate destination with the similarity the partisan would have there.
#[derive(Clone, Debug)]
struct Choice {
    party: String,
    similarity: f64,
}

#[derive(Clone, Debug)]
struct Slot {
    id: PartisanId,
    own_party: String,
    own_similarity: Option<f64>,
    weight: usize,
    choices: Vec<Choice>,
}

fn sample(slots: &[Slot], seed: u64, delta: Option<f64>) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placements = BTreeMap::new();
    let mut selected = BTreeSet::new();
    for s in slots {
        let placement = if s.choices.is_empty() {
            Placement {
                party: s.own_party.clone(),
                similarity: s.own_similarity,
                weight: s.weight,
            }
        } else {
            let c = &s.choices[rng.gen_range(0..s.choices.len())];
            Placement {
                party: c.party.clone(),
                similarity: Some(c.similarity),
                weight: s.weight,
            }
        };
        selected.insert(placement.party.clone());
        placements.insert(s.id, placement);
    }
    Configuration {
        delta,
        placements,
        selected,
    }
}

/// Random redistribution over the original parties: each partisan moves to a
/// uniformly chosen other party whose votes cover theirs, or stays when there
/// is none.
#[derive(Clone, Debug)]
pub struct RandomSq {
    slots: Vec<Slot>,
}

impl RandomSq {
    pub fn new(dataset: &Dataset) -> Result<Self> {
        let mut slots = Vec::with_capacity(dataset.partisans.len());
        for a in &dataset.partisans {
            let own = dataset
                .party(&a.party)
                .ok_or_else(|| Error::UnknownParty(a.party.clone()))?;
            let (own_similarity, choices) = if a.votes.is_empty() {
                (None, Vec::new())
            } else {
                let choices = dataset
                    .parties
                    .iter()
                    .filter(|p| p.id != a.party && a.votes.is_subset_of(&p.votes))
                    .map(|p| {
                        Ok(Choice {
                            party: p.id.clone(),
                            similarity: sim(&a.votes, &p.votes)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                (Some(partisan_discipline(a, own)?.value), choices)
            };
            slots.push(Slot {
                id: a.id,
                own_party: a.party.clone(),
                own_similarity,
                weight: a.votes.len(),
                choices,
            });
        }
        Ok(RandomSq { slots })
    }

    pub fn sample(&self, seed: u64) -> Configuration {
        sample(&self.slots, seed, None)
    }
}

pub fn random_sq(dataset: &Dataset, seed: u64) -> Result<Configuration> {
    Ok(RandomSq::new(dataset)?.sample(seed))
}

/// Random redistribution over a selected party set: each partisan goes to a
/// uniformly chosen party of `pstar` they are eligible for under δ,
/// regardless of similarity.
#[derive(Clone, Debug)]
pub struct RandomDelta {
    slots: Vec<Slot>,
    delta: f64,
}

impl RandomDelta {
    pub fn new(table: &OptionTable, pstar: &[String], delta: f64) -> Result<Self> {
        let selected: BTreeSet<&str> = pstar.iter().map(String::as_str).collect();
        let mut slots = Vec::with_capacity(table.entries.len() + table.excluded.len());
        for e in &table.entries {
            let choices: Vec<Choice> = e
                .good(delta)
                .filter(|o| selected.contains(o.target.as_str()))
                .map(|o| Choice {
                    party: o.target.clone(),
                    similarity: o.similarity,
                })
                .collect();
            if choices.is_empty() {
                return Err(Error::Infeasible(alloc::format!(
                    "partisan {} has no eligible party among the selected ones",
                    e.partisan
                )));
            }
            slots.push(Slot {
                id: e.partisan,
                own_party: String::new(),
                own_similarity: None,
                weight: e.weight,
                choices,
            });
        }
        for (id, party) in &table.excluded {
            slots.push(Slot {
                id: *id,
                own_party: party.clone(),
                own_similarity: None,
                weight: 0,
                choices: Vec::new(),
            });
        }
        Ok(RandomDelta { slots, delta })
    }

    pub fn sample(&self, seed: u64) -> Configuration {
        sample(&self.slots, seed, Some(self.delta))
    }
}

pub fn random_delta(
    table: &OptionTable,
    pstar: &[String],
    delta: f64,
    seed: u64,
) -> Result<Configuration> {
    Ok(RandomDelta::new(table, pstar, delta)?.sample(seed))
}

/// Sample mean of a metric over replicates with the half-width of its 99%
/// normal-approximation confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicatedMetric {
    pub mean: f64,
    pub half_width: f64,
    pub reps: usize,
}

impl ReplicatedMetric {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return ReplicatedMetric {
                mean: f64::NAN,
                half_width: 0.0,
                reps: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let half_width = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            Z_99 * libm::sqrt(var) / libm::sqrt(n as f64)
        };
        ReplicatedMetric {
            mean,
            half_width,
            reps: n,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.half_width / Z_99
    }
}

/// Runs `model` with seeds `base_seed..base_seed + reps` and summarizes
/// `metric` over the resulting configurations.
pub fn replicate<M, F>(reps: usize, base_seed: u64, model: M, metric: F) -> Result<ReplicatedMetric>
where
    M: Fn(u64) -> Result<Configuration>,
    F: Fn(&Configuration) -> Result<f64>,
{
    if reps < 2 {
        return Err(Error::BadParams(alloc::format!("need at least 2 replicates, got {reps}")));
    }
    let values = (0..reps as u64)
        .map(|i| model(base_seed.wrapping_add(i)).and_then(|c| metric(&c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicatedMetric::from_samples(&values))
}
