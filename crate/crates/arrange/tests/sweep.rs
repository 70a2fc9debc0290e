use std::path::Path;

use arrange::csvio::load;
use arrange::sweep::{grid, merged_parties};
use arrange::{run_sweep, to_json, SweepOptions, SweepReport};
use arrange_core::dataset::validate;
use arrange_core::Dataset;
use serde_json::Value;

fn mini() -> Dataset {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini");
    let loaded = load(&dir.join("votes.csv"), &dir.join("leaders.csv")).unwrap();
    assert!(loaded.line_diagnostics.is_empty());
    loaded.dataset
}

fn options(grid_values: Vec<f64>) -> SweepOptions {
    SweepOptions {
        grid: grid_values,
        reps: 10,
        ..SweepOptions::default()
    }
}

fn report() -> SweepReport {
    run_sweep(&mini(), &options(grid(0.0, 0.05, 1.0).unwrap())).unwrap()
}

fn walk_numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.as_f64().unwrap()),
        Value::Array(a) => a.iter().for_each(|x| walk_numbers(x, out)),
        Value::Object(m) => m.values().for_each(|x| walk_numbers(x, out)),
        _ => {}
    }
}

#[test]
fn ingestion_guarantee_on_bundled_data() {
    let ds = mini();
    assert!(validate(&ds).is_valid());
    for a in &ds.partisans {
        let p = ds.party(&a.party).unwrap();
        assert!(a.votes.is_subset_of(&p.votes), "{}", a.label());
    }
}

#[test]
fn report_shape() {
    let r = report();
    let json: Value = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["baselines", "diagnostics", "meta", "rows"]);
    assert!(r.rows.windows(2).all(|w| w[0].delta < w[1].delta));
    // 0.15 is already on the grid; 0.19 and 0.41 are added.
    assert_eq!(r.rows.len(), 21 + 2);

    let mut numbers = Vec::new();
    walk_numbers(&json, &mut numbers);
    assert!(numbers.iter().all(|x| x.is_finite()));
    for x in numbers {
        let digits = format!("{x:e}").split('e').next().unwrap().replace(['-', '.'], "").len();
        assert!(digits <= 12, "{x}");
    }
    assert_eq!(json["meta"]["dataset_digest"].as_str().unwrap().len(), 64);
    assert_eq!(json["meta"]["rng"], "ChaCha8Rng (rand_chacha 0.3)");
}

#[test]
fn merge_is_shared_by_every_row() {
    let ds = mini();
    let r = report();
    let pm = merged_parties(&ds, None);
    assert_eq!(r.diagnostics.merge.parties, pm.len());
    for row in &r.rows {
        assert_eq!(row.n_star, row.pstar.len());
        assert!(row.pstar.iter().all(|p| pm.get(p).is_some()));
        let total: usize = row.good_options.values().sum();
        assert_eq!(total, ds.partisans.len());
    }
}

#[test]
fn extreme_delta_collapses_the_system() {
    let r = report();
    let first = &r.rows[0];
    let last = r.rows.last().unwrap();
    assert_eq!(first.delta, 0.0);
    assert_eq!(last.delta, 1.0);
    assert_eq!(last.n_star, 1);
    assert!(last.n_star < first.n_star);
    assert!(last.discipline.overall < first.discipline.overall);
}

#[test]
fn highlighted_rows_carry_detail_and_baselines() {
    let r = report();
    let highlighted: Vec<f64> = r.rows.iter().filter(|x| x.detail.is_some()).map(|x| x.delta).collect();
    assert_eq!(highlighted, [0.15, 0.19, 0.41]);
    let baseline_deltas: Vec<f64> = r.baselines.random_delta.iter().map(|b| b.delta).collect();
    assert_eq!(baseline_deltas, highlighted);
    for row in r.rows.iter().filter(|x| x.detail.is_some()) {
        let d = row.detail.as_ref().unwrap();
        assert_eq!(d.assignment.len(), mini().partisans.len());
        assert!(d.assignment.iter().all(|m| row.pstar.contains(&m.to)));
        assert!(d.parties_per_year.values().all(|&n| n <= row.n_star as f64));
    }
    assert_eq!(r.baselines.random_sq.overall_discipline.reps, 10);
    assert!(r.baselines.random_sq.overall_discipline.half_width >= 0.0);
}

#[test]
fn sweep_is_deterministic() {
    let a = to_json(&report()).unwrap();
    let b = to_json(&report()).unwrap();
    assert_eq!(a, b);
    let other = run_sweep(
        &mini(),
        &SweepOptions {
            seed: 99,
            ..options(grid(0.0, 0.05, 1.0).unwrap())
        },
    )
    .unwrap();
    assert_ne!(to_json(&other).unwrap(), a);
}

#[test]
fn rejects_bad_options() {
    let ds = mini();
    assert!(run_sweep(&ds, &options(vec![])).is_err());
    assert!(run_sweep(&ds, &options(vec![1.5])).is_err());
    assert!(run_sweep(&ds, &SweepOptions { reps: 1, ..options(vec![0.0]) }).is_err());
}
