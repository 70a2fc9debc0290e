//! Writing a [`SweepReport`] as JSON and as plot-ready CSV tables.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::sweep::{BaselineMetrics, Interval, SweepReport};

/// Significant digits kept for every floating-point number in the output.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty-printed JSON with rounded floats and a trailing newline.
pub fn to_json(report: &SweepReport) -> Result<String> {
    let mut v = serde_json::to_value(report)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

fn num(x: f64) -> String {
    round_sig(x).to_string()
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

fn metric_rows<T>(m: &BaselineMetrics<T>) -> [(&'static str, &T); 7] {
    [
        ("overall_discipline", &m.overall_discipline),
        ("mean_partisan_discipline", &m.mean_partisan_discipline),
        ("mean_party_discipline", &m.mean_party_discipline),
        ("gini", &m.gini),
        ("party_changes", &m.party_changes),
        ("parties", &m.parties),
        ("mean_effective_parties", &m.mean_effective_parties),
    ]
}

/// Writes `sweep.csv`, `good_options.csv`, `per_year.csv`, `baselines.csv`
/// and `assignment.csv` into `dir`.
pub fn write_tables(report: &SweepReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let path = dir.join("sweep.csv");
    let mut w = create(&path)?;
    w.write_record([
        "delta",
        "n_star",
        "overall_discipline",
        "mean_partisan_discipline",
        "mean_party_discipline",
        "q1",
        "q2",
        "q3",
        "gini",
        "party_changes",
    ])?;
    for r in &report.rows {
        w.write_record([
            num(r.delta),
            r.n_star.to_string(),
            num(r.discipline.overall),
            num(r.discipline.mean_partisan),
            num(r.discipline.mean_party),
            (r.quality.q1 as u8).to_string(),
            (r.quality.q2 as u8).to_string(),
            (r.quality.q3 as u8).to_string(),
            num(r.gini),
            r.party_changes.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join("good_options.csv");
    let mut w = create(&path)?;
    w.write_record(["delta", "good_options", "partisans"])?;
    for r in &report.rows {
        for (k, n) in &r.good_options {
            w.write_record([num(r.delta), k.to_string(), n.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join("per_year.csv");
    let mut w = create(&path)?;
    w.write_record(["configuration", "year", "parties", "effective_parties"])?;
    let sq = &report.baselines.status_quo;
    let mut series = vec![("status_quo".to_string(), &sq.parties_per_year, &sq.effective_parties_per_year)];
    for r in &report.rows {
        if let Some(d) = &r.detail {
            series.push((format!("delta_{}", num(r.delta)), &d.parties_per_year, &d.effective_parties_per_year));
        }
    }
    for (name, parties, effective) in series {
        for (year, n) in parties {
            let eff = effective.get(year).map(|&e| num(e)).unwrap_or_default();
            w.write_record([name.clone(), year.to_string(), num(*n), eff])?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join("baselines.csv");
    let mut w = create(&path)?;
    w.write_record(["model", "delta", "metric", "mean", "half_width", "reps"])?;
    for (metric, v) in metric_rows(&sq.metrics) {
        w.write_record(["status_quo", "", metric, &num(*v), "0", "1"])?;
    }
    let mut interval = |model: &str, delta: String, m: &BaselineMetrics<Interval>| -> Result<()> {
        for (metric, v) in metric_rows(m) {
            w.write_record([
                model,
                &delta,
                metric,
                &num(v.mean),
                &num(v.half_width),
                &v.reps.to_string(),
            ])?;
        }
        Ok(())
    };
    interval("random_sq", String::new(), &report.baselines.random_sq)?;
    for r in &report.baselines.random_delta {
        interval("random_delta", num(r.delta), &r.metrics)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join("assignment.csv");
    let mut w = create(&path)?;
    w.write_record(["delta", "partisan", "from", "to", "similarity"])?;
    for r in &report.rows {
        let Some(d) = &r.detail else { continue };
        for m in &d.assignment {
            w.write_record([
                num(r.delta),
                m.partisan.clone(),
                m.from.clone(),
                m.to.clone(),
                m.similarity.map(num).unwrap_or_default(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    Ok(written)
}

/// Writes the report into `dir` in the requested format and returns the
/// files created.
pub fn write_report(report: &SweepReport, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join("report.json");
        fs::write(&path, to_json(report)?).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    if matches!(format, Format::Csv | Format::Both) {
        written.extend(write_tables(report, dir)?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(123456789.1234567), 123456789.123);
        assert_eq!(round_sig(0.0), 0.0);
        let mut v = serde_json::json!({"a": [1.0 / 3.0, 7], "b": {"c": 1e-20 / 3.0}});
        round_value(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.333333333333,7],"b":{"c":3.33333333333e-21}}"#);
    }
}
