//! The δ sweep: merge once, then cover, assign and score every δ of the grid
//! in parallel, and compare against the status quo and the random models.

use std::collections::BTreeMap;

use arrange_core::baselines::{RandomDelta, RandomSq, ReplicatedMetric, RNG_ALGORITHM};
use arrange_core::cover::{solve, Configuration, OptionTable};
use arrange_core::merge::{merge_all, MergedPartySet};
use arrange_core::metrics::{
    configuration_gini, discipline_summary, party_changes, quality_signals, YearActivity,
};
use arrange_core::Dataset;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// δ values reported individually alongside the sweep.
pub const DEFAULT_HIGHLIGHTS: [f64; 3] = [0.15, 0.19, 0.41];
pub const DEFAULT_REPS: usize = 100;
pub const DEFAULT_SEED: u64 = 1;

/// Rounds away the float noise of `start + i * step`.
fn tidy(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

/// `start, start + step, …` up to `end` inclusive.
pub fn grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if [start, step, end].iter().any(|x| x.is_nan()) || step <= 0.0 || start > end || start < 0.0 || end > 1.0 {
        return Err(Error::BadArg(format!(
            "grid {start}:{step}:{end} must satisfy 0 <= start <= end <= 1 and step > 0"
        )));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| tidy(start + i as f64 * step)).collect())
}

/// Parses `START:STEP:END`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, step, end] = parts[..] else {
        return Err(Error::BadArg(format!("grid {spec:?} is not START:STEP:END")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::BadArg(format!("grid {spec:?}: {s:?} is not a number")))
    };
    grid(num(start)?, num(step)?, num(end)?)
}

/// Parses a comma-separated list of δ values.
pub fn parse_deltas(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let d: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::BadArg(format!("{s:?} is not a number")))?;
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::BadArg(format!("delta {d} is outside [0, 1]")));
            }
            Ok(d)
        })
        .collect()
}

/// 100 values: 0.00, 0.01, …, 0.99.
pub fn default_grid() -> Vec<f64> {
    grid(0.0, 0.01, 0.99).expect("static grid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub grid: Vec<f64>,
    /// δ values that also get per-year series, assignments and Random-δ runs.
    pub highlights: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub max_merge_k: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grid: default_grid(),
            highlights: DEFAULT_HIGHLIGHTS.to_vec(),
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
            max_merge_k: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub reps: usize,
    pub grid: Vec<f64>,
    pub deltas: Vec<f64>,
    pub max_merge_k: Option<usize>,
    pub dataset_digest: String,
    pub rng: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Disciplines {
    pub overall: f64,
    pub mean_partisan: f64,
    pub mean_party: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Signals {
    pub q1: bool,
    pub q2: bool,
    pub q3: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Move {
    pub partisan: String,
    pub from: String,
    pub to: String,
    pub similarity: Option<f64>,
}

/// Extra output for highlighted δ values.
#[derive(Clone, Debug, Serialize)]
pub struct Detail {
    pub parties_per_year: BTreeMap<i32, f64>,
    pub effective_parties_per_year: BTreeMap<i32, f64>,
    pub mean_effective_parties: Option<f64>,
    pub assignment: Vec<Move>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub delta: f64,
    pub n_star: usize,
    pub pstar: Vec<String>,
    pub discipline: Disciplines,
    pub quality: Signals,
    pub gini: f64,
    pub party_changes: usize,
    /// Number of good options (own-party descendants excluded) → partisans.
    pub good_options: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Detail>,
}

/// Baseline metrics, either exact (status quo) or replicated (random models).
#[derive(Clone, Debug, Serialize)]
pub struct BaselineMetrics<T> {
    pub overall_discipline: T,
    pub mean_partisan_discipline: T,
    pub mean_party_discipline: T,
    pub gini: T,
    pub party_changes: T,
    pub parties: T,
    pub mean_effective_parties: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct Interval {
    pub mean: f64,
    pub half_width: f64,
    pub reps: usize,
}

impl From<ReplicatedMetric> for Interval {
    fn from(m: ReplicatedMetric) -> Self {
        Interval {
            mean: m.mean,
            half_width: m.half_width,
            reps: m.reps,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StatusQuo {
    pub metrics: BaselineMetrics<f64>,
    pub parties_per_year: BTreeMap<i32, f64>,
    pub effective_parties_per_year: BTreeMap<i32, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomDeltaRow {
    pub delta: f64,
    pub metrics: BaselineMetrics<Interval>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Baselines {
    pub status_quo: StatusQuo,
    pub random_sq: BaselineMetrics<Interval>,
    pub random_delta: Vec<RandomDeltaRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeStats {
    pub parties: usize,
    pub unmerged: Vec<String>,
    /// Number of original components → merged parties.
    pub size_histogram: BTreeMap<usize, usize>,
    pub truncated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IngestCounts {
    pub propositions: usize,
    pub parties: usize,
    pub partisans: usize,
    pub congressmen: usize,
    pub votes_without_leader_vote: usize,
    pub leader_votes_without_roll_call: usize,
    pub duplicate_votes: usize,
    pub date_conflicts: usize,
    pub zero_vote_partisans: usize,
    pub skipped_lines: usize,
}

/// The quantities most often quoted from a sweep, gathered in one place.
#[derive(Clone, Debug, Serialize)]
pub struct Headline {
    pub status_quo_parties: usize,
    pub n_star: BTreeMap<String, usize>,
    pub merged_parties: usize,
    pub unmerged_originals: usize,
    pub gini_status_quo: f64,
    pub gini: BTreeMap<String, f64>,
    pub mean_effective_parties: BTreeMap<String, Option<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub ingest: IngestCounts,
    pub merge: MergeStats,
    /// Adjacent grid pairs where N* grew with δ (greedy is not monotone in
    /// general).
    pub n_star_increases: Vec<(f64, f64)>,
    pub headline: Headline,
    pub notes: Vec<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub meta: Meta,
    pub rows: Vec<Row>,
    pub baselines: Baselines,
    pub diagnostics: Diagnostics,
}

const NOTES: [&str; 2] = [
    "per-year counts treat a partisan as active in a year when they cast at least one retained vote that year; official registration dates are not used",
    "random-delta replicates draw uniformly among the eligible parties of the arrange selection at the same delta",
];

fn key(delta: f64) -> String {
    format!("{delta:.2}")
}

fn is_highlight(delta: f64, highlights: &[f64]) -> bool {
    highlights.iter().any(|h| (h - delta).abs() < 1e-9)
}

/// Grid and highlights merged, sorted and deduplicated.
fn all_deltas(options: &SweepOptions) -> Vec<f64> {
    let mut all: Vec<f64> = options.grid.iter().chain(&options.highlights).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    all
}

struct Context<'a> {
    dataset: &'a Dataset,
    activity: YearActivity,
}

impl Context<'_> {
    fn metrics(&self, config: &Configuration) -> Result<BaselineMetrics<f64>> {
        let d = discipline_summary(config)?;
        Ok(BaselineMetrics {
            overall_discipline: d.overall,
            mean_partisan_discipline: d.mean_partisan,
            mean_party_discipline: d.mean_party,
            gini: configuration_gini(config)?,
            party_changes: party_changes(config, self.dataset) as f64,
            parties: config.party_sizes().len() as f64,
            mean_effective_parties: self
                .activity
                .effective_parties_per_year(config)
                .mean()
                .unwrap_or(0.0),
        })
    }

    fn replicated(
        &self,
        reps: usize,
        seed: u64,
        model: impl Fn(u64) -> Configuration + Sync,
    ) -> Result<BaselineMetrics<Interval>> {
        if reps < 2 {
            return Err(Error::BadArg(format!("need at least 2 replicates, got {reps}")));
        }
        let samples = (0..reps as u64)
            .into_par_iter()
            .map(|i| self.metrics(&model(seed.wrapping_add(i))))
            .collect::<Result<Vec<_>>>()?;
        let column = |f: fn(&BaselineMetrics<f64>) -> f64| -> Interval {
            let values: Vec<f64> = samples.iter().map(f).collect();
            ReplicatedMetric::from_samples(&values).into()
        };
        Ok(BaselineMetrics {
            overall_discipline: column(|m| m.overall_discipline),
            mean_partisan_discipline: column(|m| m.mean_partisan_discipline),
            mean_party_discipline: column(|m| m.mean_party_discipline),
            gini: column(|m| m.gini),
            party_changes: column(|m| m.party_changes),
            parties: column(|m| m.parties),
            mean_effective_parties: column(|m| m.mean_effective_parties),
        })
    }
}

fn row(
    ctx: &Context,
    table: &OptionTable,
    status_quo: &Configuration,
    delta: f64,
    detail: bool,
) -> arrange_core::Result<(Row, Configuration)> {
    let sol = solve(table, delta)?;
    let q = quality_signals(&sol.config, status_quo)?;
    let mut good_options = BTreeMap::new();
    for e in &table.entries {
        *good_options.entry(e.good_option_count(delta)).or_insert(0) += 1;
    }
    let detail = detail.then(|| {
        let effective = ctx.activity.effective_parties_per_year(&sol.config);
        Detail {
            parties_per_year: ctx.activity.parties_per_year(&sol.config).0,
            mean_effective_parties: effective.mean(),
            effective_parties_per_year: effective.0,
            assignment: ctx
                .dataset
                .partisans
                .iter()
                .filter_map(|a| {
                    let p = sol.config.placements.get(&a.id)?;
                    Some(Move {
                        partisan: a.label(),
                        from: a.party.clone(),
                        to: p.party.clone(),
                        similarity: p.similarity,
                    })
                })
                .collect(),
        }
    });
    let r = Row {
        delta,
        n_star: sol.pstar.len(),
        pstar: sol.pstar,
        discipline: Disciplines {
            overall: q.new.overall,
            mean_partisan: q.new.mean_partisan,
            mean_party: q.new.mean_party,
        },
        quality: Signals {
            q1: q.q1,
            q2: q.q2,
            q3: q.q3,
        },
        gini: configuration_gini(&sol.config)?,
        party_changes: party_changes(&sol.config, ctx.dataset),
        good_options,
        detail,
    };
    Ok((r, sol.config))
}

/// Merged-party candidates for a dataset; only parties with leader votes take
/// part.
pub fn merged_parties(dataset: &Dataset, max_k: Option<usize>) -> MergedPartySet {
    merge_all(&dataset.voting_parties(), max_k)
}

pub fn run_sweep(dataset: &Dataset, options: &SweepOptions) -> Result<SweepReport> {
    run_sweep_with(dataset, options, 0)
}

/// As [`run_sweep`], recording how many input lines were skipped while
/// parsing the files the dataset came from.
pub fn run_sweep_with(dataset: &Dataset, options: &SweepOptions, skipped_lines: usize) -> Result<SweepReport> {
    if options.grid.is_empty() {
        return Err(Error::BadArg("empty delta grid".into()));
    }
    if let Some(d) = options.grid.iter().chain(&options.highlights).find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::BadArg(format!("delta {d} is outside [0, 1]")));
    }
    let digest = crate::csvio::digest(dataset)?;
    let ctx = Context {
        dataset,
        activity: YearActivity::new(dataset),
    };
    let status_quo = Configuration::status_quo(dataset)?;

    let pm = merged_parties(dataset, options.max_merge_k);
    log::info!("{} merged parties ({} originals)", pm.len(), dataset.parties.len());
    let table = OptionTable::build(dataset, &pm)?;

    let deltas = all_deltas(options);
    let solved = deltas
        .par_iter()
        .map(|&delta| {
            row(&ctx, &table, &status_quo, delta, is_highlight(delta, &options.highlights))
                .map_err(|source| Error::AtDelta { delta, source })
        })
        .collect::<Result<Vec<_>>>()?;

    let sq_metrics = ctx.metrics(&status_quo)?;
    let random_sq = RandomSq::new(dataset)?;
    let random_sq = ctx.replicated(options.reps, options.seed, |s| random_sq.sample(s))?;
    let mut random_delta = Vec::new();
    for (r, _) in solved.iter().filter(|(r, _)| r.detail.is_some()) {
        let model = RandomDelta::new(&table, &r.pstar, r.delta)
            .map_err(|source| Error::AtDelta { delta: r.delta, source })?;
        random_delta.push(RandomDeltaRow {
            delta: r.delta,
            metrics: ctx.replicated(options.reps, options.seed, |s| model.sample(s))?,
        });
    }

    let rows: Vec<Row> = solved.into_iter().map(|(r, _)| r).collect();
    let n_star_increases = rows
        .windows(2)
        .filter(|w| w[1].n_star > w[0].n_star)
        .map(|w| (w[0].delta, w[1].delta))
        .collect();

    let d = &dataset.diagnostics;
    let summary = arrange_core::dataset::validate(dataset).summary;
    let headline = Headline {
        status_quo_parties: status_quo.party_sizes().len(),
        n_star: rows.iter().filter(|r| r.delta == 0.0 || r.detail.is_some()).map(|r| (key(r.delta), r.n_star)).collect(),
        merged_parties: pm.len(),
        unmerged_originals: pm.unmerged().count(),
        gini_status_quo: sq_metrics.gini,
        gini: rows.iter().filter(|r| r.detail.is_some()).map(|r| (key(r.delta), r.gini)).collect(),
        mean_effective_parties: rows
            .iter()
            .filter_map(|r| Some((key(r.delta), r.detail.as_ref()?.mean_effective_parties)))
            .collect(),
    };
    let sq_effective = ctx.activity.effective_parties_per_year(&status_quo);

    Ok(SweepReport {
        meta: Meta {
            tool: "arrange",
            version: env!("CARGO_PKG_VERSION"),
            seed: options.seed,
            reps: options.reps,
            grid: options.grid.clone(),
            deltas: options.highlights.clone(),
            max_merge_k: options.max_merge_k,
            dataset_digest: digest,
            rng: RNG_ALGORITHM,
        },
        rows,
        baselines: Baselines {
            status_quo: StatusQuo {
                metrics: sq_metrics,
                parties_per_year: ctx.activity.parties_per_year(&status_quo).0,
                effective_parties_per_year: sq_effective.0,
            },
            random_sq,
            random_delta,
        },
        diagnostics: Diagnostics {
            ingest: IngestCounts {
                propositions: summary.propositions,
                parties: summary.parties,
                partisans: summary.partisans,
                congressmen: summary.congressmen,
                votes_without_leader_vote: d.votes_without_leader_vote,
                leader_votes_without_roll_call: d.leader_votes_without_roll_call,
                duplicate_votes: d.duplicate_votes,
                date_conflicts: d.date_conflicts,
                zero_vote_partisans: d.zero_vote_partisans.len(),
                skipped_lines,
            },
            merge: MergeStats {
                parties: pm.len(),
                unmerged: pm.unmerged().map(|p| p.id.clone()).collect(),
                size_histogram: pm.size_histogram(),
                truncated: pm.truncated,
            },
            n_star_increases,
            headline,
            notes: NOTES.to_vec(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_100_points() {
        let g = default_grid();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[7], 0.07);
        assert_eq!(g[99], 0.99);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:0.25:1").unwrap(), [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.1:0.1:0.3").unwrap(), [0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("0.5:1:0.5").unwrap(), [0.5]);
        for bad in ["0:0:1", "0:0.1", "1:0.1:0", "0:0.1:2", "a:b:c"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_deltas("0.15, 0.19,0.41").unwrap(), [0.15, 0.19, 0.41]);
        assert!(parse_deltas("1.5").is_err());
    }

    #[test]
    fn highlights_join_the_grid() {
        let o = SweepOptions {
            grid: vec![0.0, 0.5, 1.0],
            highlights: vec![0.5, 0.15],
            ..SweepOptions::default()
        };
        assert_eq!(all_deltas(&o), [0.0, 0.15, 0.5, 1.0]);
    }
}
