//! Evaluation of configurations: quality signals, inequality and
//! fragmentation indices, per-year series, party switching, and the vote
//! matrix used for external dimensionality reduction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::cover::Configuration;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{overall_discipline, Date, DisciplineValue, Partisan, Proposition, VoteValue};
use crate::TOLERANCE;

/// Discipline summary of one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisciplineSummary {
    /// Vote-weighted over all partisans.
    pub overall: f64,
    /// Plain mean of partisan disciplines.
    pub mean_partisan: f64,
    /// Plain mean over parties of their (vote-weighted) discipline.
    pub mean_party: f64,
}

/// Binary quality signals of a new configuration against the old one; each
/// bit is set when the new value is strictly greater.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualitySignals {
    pub q1: bool,
    pub q2: bool,
    pub q3: bool,
    pub new: DisciplineSummary,
    pub old: DisciplineSummary,
}

/// Vote-weighted discipline of every party with at least one voting member.
pub fn party_disciplines(config: &Configuration) -> BTreeMap<&str, DisciplineValue> {
    let mut acc: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for pl in config.placements.values() {
        if let Some(s) = pl.similarity {
            let e = acc.entry(pl.party.as_str()).or_default();
            e.0 += s * pl.weight as f64;
            e.1 += pl.weight;
        }
    }
    acc.into_iter()
        .filter(|(_, (_, w))| *w > 0)
        .map(|(p, (num, w))| {
            (
                p,
                DisciplineValue {
                    value: num / w as f64,
                    weight: w,
                },
            )
        })
        .collect()
}

pub fn discipline_summary(config: &Configuration) -> Result<DisciplineSummary> {
    let overall = overall_discipline(config)?.value;
    let sims: Vec<f64> = config
        .placements
        .values()
        .filter_map(|p| p.similarity)
        .collect();
    let parties = party_disciplines(config);
    Ok(DisciplineSummary {
        overall,
        mean_partisan: sims.iter().sum::<f64>() / sims.len() as f64,
        mean_party: parties.values().map(|d| d.value).sum::<f64>() / parties.len() as f64,
    })
}

pub fn quality_signals(new: &Configuration, old: &Configuration) -> Result<QualitySignals> {
    let universe = |c: &Configuration| -> BTreeSet<_> {
        c.placements
            .iter()
            .filter(|(_, p)| p.similarity.is_some())
            .map(|(id, _)| *id)
            .collect()
    };
    if universe(new) != universe(old) {
        return Err(Error::UniverseMismatch);
    }
    let n = discipline_summary(new)?;
    let o = discipline_summary(old)?;
    Ok(QualitySignals {
        q1: n.overall > o.overall + TOLERANCE,
        q2: n.mean_partisan > o.mean_partisan + TOLERANCE,
        q3: n.mean_party > o.mean_party + TOLERANCE,
        new: n,
        old: o,
    })
}

/// Gini coefficient of a list of sizes, `Σ_i Σ_j |x_i − x_j| / (2 n² mean)`.
pub fn gini(sizes: &[f64]) -> Result<f64> {
    let total: f64 = sizes.iter().sum();
    if sizes.is_empty() || sizes.iter().any(|&x| x.is_nan() || x < 0.0) || total <= 0.0 {
        return Err(Error::EmptyOrZero);
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    // Σ_i Σ_j |x_i − x_j| = 2 Σ_i (2i − n − 1) x_(i) over ascending order (1-based i).
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok((weighted / (n * total)).max(0.0))
}

/// Gini coefficient of party sizes in a configuration (parties with members).
pub fn configuration_gini(config: &Configuration) -> Result<f64> {
    let sizes: Vec<f64> = config.party_sizes().values().map(|&s| s as f64).collect();
    gini(&sizes)
}

/// Golosov effective number of parties for shares summing to one.
pub fn golosov(shares: &[f64]) -> Result<f64> {
    let total: f64 = shares.iter().sum();
    if shares.is_empty() || shares.iter().any(|&s| s.is_nan() || s <= 0.0) || (total - 1.0).abs() > TOLERANCE
    {
        return Err(Error::BadShares);
    }
    let largest = shares.iter().copied().fold(0.0, f64::max);
    Ok(shares
        .iter()
        .map(|&s| 1.0 / (1.0 + largest * largest / s - s))
        .sum())
}

/// Value per calendar year.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct YearSeries(pub BTreeMap<i32, f64>);

impl YearSeries {
    pub fn mean(&self) -> Option<f64> {
        (!self.0.is_empty()).then(|| self.0.values().sum::<f64>() / self.0.len() as f64)
    }
}

/// Years in which each partisan cast at least one vote, computed once per
/// dataset and reusable across configurations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct YearActivity {
    /// Indexed by partisan id.
    years: Vec<BTreeSet<i32>>,
    span: Option<(i32, i32)>,
}

impl YearActivity {
    pub fn new(dataset: &Dataset) -> Self {
        let years = dataset
            .partisans
            .iter()
            .map(|a| {
                a.votes
                    .propositions()
                    .filter_map(|k| dataset.proposition(k))
                    .map(|p| p.date.year())
                    .collect()
            })
            .collect();
        let first = dataset.propositions.iter().map(|p| p.date.year()).min();
        let last = dataset.propositions.iter().map(|p| p.date.year()).max();
        YearActivity {
            years,
            span: first.zip(last),
        }
    }

    /// Active members per party per year under the configuration's assignment.
    fn members<'c>(&self, config: &'c Configuration) -> BTreeMap<i32, BTreeMap<&'c str, usize>> {
        let mut out: BTreeMap<i32, BTreeMap<&'c str, usize>> = BTreeMap::new();
        for (id, placement) in &config.placements {
            let Some(years) = self.years.get(id.0 as usize) else { continue };
            for &y in years {
                *out.entry(y).or_default().entry(placement.party.as_str()).or_insert(0) += 1;
            }
        }
        out
    }

    /// Number of parties with at least one member voting in each year, over
    /// the full span of proposition years.
    pub fn parties_per_year(&self, config: &Configuration) -> YearSeries {
        let Some((first, last)) = self.span else {
            return YearSeries::default();
        };
        let active = self.members(config);
        YearSeries(
            (first..=last)
                .map(|y| (y, active.get(&y).map_or(0, |m| m.len()) as f64))
                .collect(),
        )
    }

    /// Golosov index per year, with shares taken from active-member counts.
    /// Years without any active partisan are omitted.
    pub fn effective_parties_per_year(&self, config: &Configuration) -> YearSeries {
        let mut series = BTreeMap::new();
        for (year, members) in self.members(config) {
            let total: usize = members.values().sum();
            if total == 0 {
                continue;
            }
            let shares: Vec<f64> = members.values().map(|&m| m as f64 / total as f64).collect();
            if let Ok(n) = golosov(&shares) {
                series.insert(year, n);
            }
        }
        YearSeries(series)
    }
}

/// Number of parties with at least one member voting in each year, over the
/// full span of proposition years.
pub fn parties_per_year(config: &Configuration, dataset: &Dataset) -> YearSeries {
    YearActivity::new(dataset).parties_per_year(config)
}

/// Golosov index per year, with shares taken from active-member counts.
/// Years without any active partisan are omitted.
pub fn effective_parties_per_year(config: &Configuration, dataset: &Dataset) -> YearSeries {
    YearActivity::new(dataset).effective_parties_per_year(config)
}

/// Transitions between consecutive memberships of a congressman whose
/// assigned parties differ, summed over congressmen.
pub fn party_changes(config: &Configuration, dataset: &Dataset) -> usize {
    dataset
        .memberships()
        .values()
        .map(|list| {
            list.windows(2)
                .filter(|w| config.party_of(w[0].id) != config.party_of(w[1].id))
                .count()
        })
        .sum()
}

/// Inclusive date window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DateRange {
    pub start: Date,
    pub end: Date,
}

/// Partisan-by-proposition matrix with Y → 1, N → −1 and F, O or absence → 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub entries: Vec<Vec<i8>>,
}

pub fn encode_vote(vote: Option<VoteValue>) -> i8 {
    match vote {
        Some(VoteValue::Yes) => 1,
        Some(VoteValue::No) => -1,
        _ => 0,
    }
}

/// Vote matrix restricted to propositions dated inside `window`; partisans
/// with no vote in the window are left out.
pub fn export_vote_matrix(
    partisans: &[Partisan],
    propositions: &[Proposition],
    window: DateRange,
) -> Result<VoteMatrix> {
    if window.start > window.end {
        return Err(Error::EmptyWindow);
    }
    let cols: Vec<usize> = (0..propositions.len())
        .filter(|&i| (window.start..=window.end).contains(&propositions[i].date))
        .collect();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for a in partisans {
        let row: Vec<Option<VoteValue>> = cols
            .iter()
            .map(|&i| a.votes.get(crate::model::PropositionIdx(i as u32)))
            .collect();
        if row.iter().all(Option::is_none) {
            continue;
        }
        rows.push(a.label());
        entries.push(row.into_iter().map(encode_vote).collect());
    }
    Ok(VoteMatrix {
        rows,
        columns: cols.iter().map(|&i| propositions[i].id.clone()).collect(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Placement;
    use crate::dataset::build_dataset;
    use crate::dataset::tests::{lead, rec};
    use crate::model::PartisanId;
    use crate::model::VoteValue::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn config(entries: &[(u32, &str, f64, usize)]) -> Configuration {
        let placements: BTreeMap<_, _> = entries
            .iter()
            .map(|&(id, party, s, w)| {
                (
                    PartisanId(id),
                    Placement {
                        party: party.into(),
                        similarity: Some(s),
                        weight: w,
                    },
                )
            })
            .collect();
        Configuration {
            delta: None,
            selected: placements.values().map(|p| p.party.clone()).collect(),
            placements,
        }
    }

    fn pairwise_gini(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let mut s = 0.0;
        for a in x {
            for b in x {
                s += (a - b).abs();
            }
        }
        s / (2.0 * n * n * mean)
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[5.0, 5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert!((gini(&[1.0, 3.0]).unwrap() - 0.25).abs() < 1e-12);
        // Pairwise sum: 9 small entries each differ from 91 by 90 → 2·9·90 = 1620;
        // 1620 / (2·100·10) = 0.81.
        let skewed = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 91.0];
        assert!((pairwise_gini(&skewed) - 0.81).abs() < 1e-12);
        assert!((gini(&skewed).unwrap() - 0.81).abs() < 1e-12);
        assert_eq!(gini(&[]), Err(Error::EmptyOrZero));
        assert_eq!(gini(&[0.0, 0.0]), Err(Error::EmptyOrZero));
        assert_eq!(gini(&[-1.0, 2.0]), Err(Error::EmptyOrZero));
    }

    #[test]
    fn golosov_examples() {
        assert_eq!(golosov(&[1.0]).unwrap(), 1.0);
        assert!((golosov(&[0.75, 0.25]).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        for n in 1..=50 {
            let shares = vec![1.0 / n as f64; n];
            assert!((golosov(&shares).unwrap() - n as f64).abs() < 1e-12);
        }
        assert_eq!(golosov(&[0.5, 0.4]), Err(Error::BadShares));
        assert_eq!(golosov(&[1.0, 0.0]), Err(Error::BadShares));
        assert_eq!(golosov(&[]), Err(Error::BadShares));
    }

    #[test]
    fn quality_signals_examples() {
        let c = config(&[(1, "X", 0.9, 10), (2, "Y", 0.8, 5)]);
        let q = quality_signals(&c, &c).unwrap();
        assert!(!q.q1 && !q.q2 && !q.q3);

        let better = config(&[(1, "X", 0.95, 10), (2, "Y", 0.9, 5)]);
        let q = quality_signals(&better, &c).unwrap();
        assert!(q.q1 && q.q2 && q.q3);

        let other = config(&[(1, "X", 0.9, 10), (3, "Y", 0.8, 5)]);
        assert_eq!(quality_signals(&other, &c), Err(Error::UniverseMismatch));
    }

    #[test]
    fn regrouping_can_raise_only_party_discipline() {
        // Old: A = {1: 1.0 w10, 2: 0.5 w10}, B = {3: 0.6 w1, 4: 0.6 w1}
        //   overall = (10 + 5 + 0.6 + 0.6)/22 = 16.2/22 ≈ 0.73636
        //   mean partisan = 2.7/4 = 0.675; mean party = (0.75 + 0.6)/2 = 0.675
        // New: partisan 2 moves alone to C with similarity 0.45; others unchanged.
        //   overall = (10 + 4.5 + 1.2)/22 = 15.7/22 ≈ 0.71364 (lower)
        //   mean partisan = 2.65/4 = 0.6625 (lower)
        //   mean party = (1.0 + 0.6 + 0.45)/3 ≈ 0.68333 (higher)
        let old = config(&[(1, "A", 1.0, 10), (2, "A", 0.5, 10), (3, "B", 0.6, 1), (4, "B", 0.6, 1)]);
        let new = config(&[(1, "A", 1.0, 10), (2, "C", 0.45, 10), (3, "B", 0.6, 1), (4, "B", 0.6, 1)]);
        let q = quality_signals(&new, &old).unwrap();
        assert!((q.old.overall - 16.2 / 22.0).abs() < 1e-12);
        assert!((q.new.overall - 15.7 / 22.0).abs() < 1e-12);
        assert!((q.new.mean_party - 2.05 / 3.0).abs() < 1e-12);
        assert_eq!((q.q1, q.q2, q.q3), (false, false, true));
    }

    fn small_dataset() -> Dataset {
        let records = [
            rec("P1", (1999, 3, 1), "C1", "X", Yes),
            rec("P2", (2001, 3, 1), "C1", "X", Yes),
            rec("P1", (1999, 3, 1), "C2", "Y", No),
            rec("P3", (2001, 6, 1), "C2", "X", No),
            rec("P4", (2001, 7, 1), "C2", "Y", Yes),
        ];
        let leaders = [
            lead("P1", "X", Yes),
            lead("P2", "X", Yes),
            lead("P3", "X", No),
            lead("P1", "Y", No),
            lead("P4", "Y", Yes),
        ];
        build_dataset(&records, &leaders).unwrap()
    }

    #[test]
    fn per_year_counts() {
        let ds = small_dataset();
        let sq = Configuration::status_quo(&ds).unwrap();
        // 1999: X (C1), Y (C2); 2000: nothing; 2001: X (C1, C2), Y (C2).
        let series = parties_per_year(&sq, &ds);
        assert_eq!(series.0, [(1999, 2.0), (2000, 0.0), (2001, 2.0)].into());

        let eff = effective_parties_per_year(&sq, &ds);
        // 1999: shares 1/2,1/2 → 2; 2001: X has 2 active, Y 1 → [2/3, 1/3].
        assert!((eff.0[&1999] - 2.0).abs() < 1e-12);
        let expected = golosov(&[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((eff.0[&2001] - expected).abs() < 1e-12);
        assert!(!eff.0.contains_key(&2000));
    }

    #[test]
    fn single_party_activity_gaps() {
        let records = [
            rec("P1", (1999, 3, 1), "C1", "X", Yes),
            rec("P2", (2001, 3, 1), "C1", "X", Yes),
        ];
        let ds = build_dataset(&records, &[lead("P1", "X", Yes), lead("P2", "X", Yes)]).unwrap();
        let sq = Configuration::status_quo(&ds).unwrap();
        assert_eq!(parties_per_year(&sq, &ds).0, [(1999, 1.0), (2000, 0.0), (2001, 1.0)].into());
        assert_eq!(effective_parties_per_year(&sq, &ds).0, [(1999, 1.0), (2001, 1.0)].into());
    }

    #[test]
    fn empty_dataset_has_empty_series() {
        let ds = build_dataset(&[], &[]).unwrap();
        let sq = Configuration::status_quo(&ds).unwrap();
        assert!(parties_per_year(&sq, &ds).0.is_empty());
    }

    #[test]
    fn party_change_counts() {
        let ds = small_dataset();
        let mut c = Configuration::status_quo(&ds).unwrap();
        // C2 goes Y → X → Y.
        assert_eq!(party_changes(&c, &ds), 2);
        for p in c.placements.values_mut() {
            p.party = "X_Y".into();
        }
        assert_eq!(party_changes(&c, &ds), 0);
    }

    #[test]
    fn vote_matrix_encoding() {
        let ds = small_dataset();
        let window = DateRange {
            start: Date::new(1999, 1, 1).unwrap(),
            end: Date::new(2001, 6, 30).unwrap(),
        };
        let m = export_vote_matrix(&ds.partisans, &ds.propositions, window).unwrap();
        assert_eq!(m.columns, ["P1", "P2", "P3"]);
        // C1:X votes Y,Y on P1,P2; C2:Y votes N on P1; C2:X votes N on P3; C2:Y:2 has only P4.
        assert_eq!(m.rows, ["C1:X:0", "C2:Y:0", "C2:X:1"]);
        assert_eq!(m.entries, vec![vec![1, 1, 0], vec![-1, 0, 0], vec![0, 0, -1]]);
        assert_eq!(encode_vote(Some(Obstruction)), 0);
        assert_eq!(encode_vote(Some(Free)), 0);
        let bad = DateRange {
            start: window.end,
            end: window.start,
        };
        assert_eq!(export_vote_matrix(&ds.partisans, &ds.propositions, bad), Err(Error::EmptyWindow));
    }

    proptest! {
        #[test]
        fn gini_properties(sizes in prop::collection::vec(1u32..200, 1..20), k in 1u32..10, rot in 0usize..20) {
            let x: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
            let g = gini(&x).unwrap();
            prop_assert!((g - pairwise_gini(&x)).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&g));
            let scaled: Vec<f64> = x.iter().map(|v| v * k as f64).collect();
            prop_assert!((gini(&scaled).unwrap() - g).abs() < 1e-9);
            let mut r = x.clone();
            r.rotate_left(rot % x.len());
            prop_assert!((gini(&r).unwrap() - g).abs() < 1e-9);
            let all_equal = sizes.iter().all(|&s| s == sizes[0]);
            prop_assert_eq!(g.abs() < 1e-12, all_equal);
        }

        #[test]
        fn golosov_bounds(raw in prop::collection::vec(1u32..100, 1..20), rot in 0usize..20) {
            let total: u32 = raw.iter().sum();
            let shares: Vec<f64> = raw.iter().map(|&r| r as f64 / total as f64).collect();
            let n = golosov(&shares).unwrap();
            prop_assert!(n >= 1.0 - 1e-9 && n <= shares.len() as f64 + 1e-9);
            let equal = raw.iter().all(|&r| r == raw[0]);
            prop_assert_eq!((n - shares.len() as f64).abs() < 1e-9, equal);
            let mut r = shares.clone();
            r.rotate_left(rot % shares.len());
            prop_assert!((golosov(&r).unwrap() - n).abs() < 1e-9);
        }
    }
}
