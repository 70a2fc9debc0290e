//! The two CSV input files.
//!
//! `votes.csv`: `proposition_id,date,congressman_id,congressman_name,party,vote`
//! with vote in {Y, N, O}. `leaders.csv`: `proposition_id,party,vote` with
//! vote in {Y, N, O, F}. Dates are ISO-8601 (`YYYY-MM-DD`). Absence is a
//! missing row, not a vote value.
//!
//! A wrong header is a format error. Any other malformed line becomes a
//! [`LineDiagnostic`] and is skipped.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use arrange_core::dataset::build_dataset;
use arrange_core::{Dataset, Date, LeaderVoteRecord, RollCallRecord, VoteValue};
use chrono::{Datelike, NaiveDate};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const VOTES_HEADER: [&str; 6] = [
    "proposition_id",
    "date",
    "congressman_id",
    "congressman_name",
    "party",
    "vote",
];
pub const LEADERS_HEADER: [&str; 3] = ["proposition_id", "party", "vote"];

/// A skipped input line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineDiagnostic {
    pub file: &'static str,
    /// 1-based, counting the header as line 1.
    pub line: u64,
    pub message: String,
}

impl fmt::Display for LineDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

/// Records accepted from one file plus the lines that were rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub diagnostics: Vec<LineDiagnostic>,
}

fn parse_date(s: &str) -> std::result::Result<Date, String> {
    // chrono's %Y takes any digit count, so pin YYYY-MM-DD first.
    let shape = s.len() == 10
        && s.bytes().enumerate().all(|(i, b)| if i == 4 || i == 7 { b == b'-' } else { b.is_ascii_digit() });
    if !shape {
        return Err(format!("bad date {s:?}: expected YYYY-MM-DD"));
    }
    let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("bad date {s:?}: {e}"))?;
    Date::new(d.year(), d.month() as u8, d.day() as u8).map_err(|e| e.to_string())
}

fn parse_vote(s: &str, allow_free: bool) -> std::result::Result<VoteValue, String> {
    match VoteValue::from_token(s) {
        Some(VoteValue::Free) if !allow_free => {
            Err("vote F is only valid for party leaders".to_string())
        }
        Some(v) => Ok(v),
        None => Err(format!("unknown vote {s:?}")),
    }
}

fn read_rows<R: Read, T>(
    input: R,
    file: &'static str,
    header: &[&str],
    mut convert: impl FnMut(&csv::StringRecord) -> std::result::Result<T, String>,
) -> Result<Parsed<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let found = reader
        .headers()
        .map_err(|e| Error::Format(format!("{file}: unreadable header: {e}")))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Format(format!(
            "{file}: expected header {:?}, found {:?}",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut row = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                let line = row.position().map_or(line, |p| p.line());
                let result = if row.len() != header.len() {
                    Err(format!("expected {} fields, found {}", header.len(), row.len()))
                } else if let Some(i) = row.iter().position(str::is_empty) {
                    Err(format!("empty field {}", header[i]))
                } else {
                    convert(&row)
                };
                match result {
                    Ok(r) => records.push(r),
                    Err(message) => diagnostics.push(LineDiagnostic {
                        file,
                        line,
                        message,
                    }),
                }
            }
            Err(e) => {
                let line = e.position().map_or(line, |p| p.line());
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    return Err(e.into());
                }
                diagnostics.push(LineDiagnostic {
                    file,
                    line,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(Parsed {
        records,
        diagnostics,
    })
}

pub fn parse_votes<R: Read>(input: R) -> Result<Parsed<RollCallRecord>> {
    read_rows(input, "votes", &VOTES_HEADER, |r| {
        Ok(RollCallRecord {
            proposition_id: r[0].to_string(),
            date: parse_date(&r[1])?,
            congressman_id: r[2].to_string(),
            congressman_name: r[3].to_string(),
            party: r[4].to_string(),
            vote: parse_vote(&r[5], false)?,
        })
    })
}

pub fn parse_leaders<R: Read>(input: R) -> Result<Parsed<LeaderVoteRecord>> {
    read_rows(input, "leaders", &LEADERS_HEADER, |r| {
        Ok(LeaderVoteRecord {
            proposition_id: r[0].to_string(),
            party: r[1].to_string(),
            vote: parse_vote(&r[2], true)?,
        })
    })
}

pub fn write_votes<W: Write>(out: W, records: &[RollCallRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VOTES_HEADER)?;
    for r in records {
        let date = r.date.to_string();
        w.write_record([
            r.proposition_id.as_str(),
            date.as_str(),
            r.congressman_id.as_str(),
            r.congressman_name.as_str(),
            r.party.as_str(),
            r.vote.token(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_leaders<W: Write>(out: W, records: &[LeaderVoteRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEADERS_HEADER)?;
    for r in records {
        w.write_record([r.proposition_id.as_str(), r.party.as_str(), r.vote.token()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// A dataset read from disk with everything that was skipped on the way.
#[derive(Debug)]
pub struct Loaded {
    pub dataset: Dataset,
    pub line_diagnostics: Vec<LineDiagnostic>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn load(votes: &Path, leaders: &Path) -> Result<Loaded> {
    let v = parse_votes(open(votes)?)?;
    let l = parse_leaders(open(leaders)?)?;
    for d in v.diagnostics.iter().chain(&l.diagnostics) {
        log::warn!("skipped {d}");
    }
    let dataset = build_dataset(&v.records, &l.records)?;
    let mut line_diagnostics = v.diagnostics;
    line_diagnostics.extend(l.diagnostics);
    Ok(Loaded {
        dataset,
        line_diagnostics,
    })
}

pub fn save(dataset: &Dataset, votes: &Path, leaders: &Path) -> Result<()> {
    let (records, leader_records) = dataset.to_records();
    save_records(&records, &leader_records, votes, leaders)
}

pub fn save_records(
    records: &[RollCallRecord],
    leaders: &[LeaderVoteRecord],
    votes_path: &Path,
    leaders_path: &Path,
) -> Result<()> {
    let create = |p: &Path| File::create(p).map_err(|e| Error::io(p, e));
    write_votes(std::io::BufWriter::new(create(votes_path)?), records)?;
    write_leaders(std::io::BufWriter::new(create(leaders_path)?), leaders)?;
    Ok(())
}

/// SHA-256 of the dataset's canonical CSV serialization, hex encoded.
pub fn digest(dataset: &Dataset) -> Result<String> {
    let (records, leaders) = dataset.to_records();
    let mut buf = Vec::new();
    write_votes(&mut buf, &records)?;
    write_leaders(&mut buf, &leaders)?;
    Ok(hex::encode(Sha256::digest(&buf)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_vote_row() {
        let text = "proposition_id,date,congressman_id,congressman_name,party,vote\nP1,1999-03-02,C7,Silva,PT,Y\n";
        let p = parse_votes(text.as_bytes()).unwrap();
        assert!(p.diagnostics.is_empty());
        assert_eq!(
            p.records,
            [RollCallRecord {
                proposition_id: "P1".into(),
                date: Date::new(1999, 3, 2).unwrap(),
                congressman_id: "C7".into(),
                congressman_name: "Silva".into(),
                party: "PT".into(),
                vote: VoteValue::Yes,
            }]
        );
    }

    #[test]
    fn free_vote_for_partisan_is_a_line_diagnostic() {
        let text = "proposition_id,date,congressman_id,congressman_name,party,vote\nP1,1999-03-02,C7,Silva,PT,F\n";
        let p = parse_votes(text.as_bytes()).unwrap();
        assert!(p.records.is_empty());
        assert_eq!(p.diagnostics.len(), 1);
        assert_eq!(p.diagnostics[0].line, 2);
    }

    #[test]
    fn header_only() {
        let p = parse_leaders("proposition_id,party,vote\n".as_bytes()).unwrap();
        assert!(p.records.is_empty() && p.diagnostics.is_empty());
    }

    #[test]
    fn bad_header_is_a_format_error() {
        let err = parse_leaders("proposition,party,vote\nP1,PT,Y\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(parse_votes("".as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn malformed_lines_are_reported_with_line_numbers() {
        let text = "proposition_id,party,vote\n\
                    P1,PT,Y\n\
                    P2,PT\n\
                    P3,,N\n\
                    P4,PT,maybe\n\
                    \"P5\",\"P,T\",O\n";
        let p = parse_leaders(text.as_bytes()).unwrap();
        let lines: Vec<u64> = p.diagnostics.iter().map(|d| d.line).collect();
        assert_eq!(lines, [3, 4, 5]);
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[1].party, "P,T");
    }

    #[test]
    fn bad_dates() {
        for date in ["1999-02-30", "99-01-01", "1999/01/01", "2000-13-01"] {
            let text = format!("{}\nP1,{date},C1,A,PT,N\n", VOTES_HEADER.join(","));
            let p = parse_votes(text.as_bytes()).unwrap();
            assert_eq!(p.diagnostics.len(), 1, "{date}");
        }
        let text = format!("{}\nP1,2000-02-29,C1,A,PT,N\n", VOTES_HEADER.join(","));
        assert!(parse_votes(text.as_bytes()).unwrap().diagnostics.is_empty());
    }
}
