use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arrange::csvio::{self, Loaded};
use arrange::sweep::{self, SweepOptions};
use arrange::{Error, Format, Result};
use arrange_core::dataset::validate;
use arrange_core::metrics::{export_vote_matrix, DateRange};
use arrange_core::synth::{self, SynthParams};
use arrange_core::Date;
use clap::{Args, Parser, Subcommand};

/// Party-system reduction from roll-call votes.
#[derive(Parser)]
#[command(name = "arrange", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the delta sweep and write a report.
    Analyze(AnalyzeArgs),
    /// Check input files and print a summary.
    Validate(InputArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Write the partisan-by-proposition vote matrix for a date window.
    ExportMatrix(MatrixArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    votes: PathBuf,
    #[arg(long)]
    leaders: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, requires = "leaders", required_unless_present = "preset")]
    votes: Option<PathBuf>,
    #[arg(long, requires = "votes")]
    leaders: Option<PathBuf>,
    /// Analyze a bundled synthetic dataset instead of files.
    #[arg(long, conflicts_with_all = ["votes", "leaders"])]
    preset: Option<String>,
    /// START:STEP:END
    #[arg(long, default_value = "0:0.01:0.99")]
    delta_grid: String,
    /// Highlighted deltas, comma separated.
    #[arg(long, default_value = "0.15,0.19,0.41")]
    deltas: String,
    #[arg(long, default_value_t = sweep::DEFAULT_REPS)]
    reps: usize,
    #[arg(long, default_value_t = sweep::DEFAULT_SEED)]
    seed: u64,
    /// Stop growing merged parties at this many components.
    #[arg(long)]
    max_merge_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Start from a bundled parameter set; explicit flags override it.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    parties: Option<usize>,
    #[arg(long)]
    blocs: Option<usize>,
    #[arg(long)]
    propositions: Option<usize>,
    /// Number of congressmen.
    #[arg(long)]
    partisans: Option<usize>,
    #[arg(long)]
    noise_rate: Option<f64>,
    #[arg(long)]
    switch_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    input: InputArgs,
    /// First date, YYYY-MM-DD.
    #[arg(long)]
    from: String,
    /// Last date, YYYY-MM-DD.
    #[arg(long)]
    to: String,
    #[arg(long)]
    out: PathBuf,
}

fn preset(name: &str) -> Result<SynthParams> {
    synth::preset(name).ok_or_else(|| {
        let known: Vec<&str> = synth::presets().iter().map(|(n, _)| *n).collect();
        Error::BadArg(format!("unknown preset {name:?}; known: {}", known.join(", ")))
    })
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let (dataset, skipped) = match (&args.preset, &args.votes, &args.leaders) {
        (Some(name), _, _) => (synth::synth_dataset(&preset(name)?)?, 0),
        (None, Some(votes), Some(leaders)) => {
            let Loaded {
                dataset,
                line_diagnostics,
            } = csvio::load(votes, leaders)?;
            (dataset, line_diagnostics.len())
        }
        _ => return Err(Error::BadArg("need --votes and --leaders, or --preset".into())),
    };
    let options = SweepOptions {
        grid: sweep::parse_grid(&args.delta_grid)?,
        highlights: sweep::parse_deltas(&args.deltas)?,
        reps: args.reps,
        seed: args.seed,
        max_merge_k: args.max_merge_k,
    };
    let report = arrange::run_sweep_with(&dataset, &options, skipped)?;
    for path in arrange::write_report(&report, &args.out, args.format)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Returns whether the input is clean.
fn validate_files(args: InputArgs) -> Result<bool> {
    let Loaded {
        dataset,
        line_diagnostics,
    } = csvio::load(&args.votes, &args.leaders)?;
    for d in &line_diagnostics {
        println!("skipped {d}");
    }
    let report = validate(&dataset);
    for v in &report.violations {
        println!("violation: {v}");
    }
    let s = &report.summary;
    let d = &dataset.diagnostics;
    println!(
        "propositions {}, parties {}, partisans {}, congressmen {}, partisan votes {}, leader votes {}",
        s.propositions, s.parties, s.partisans, s.congressmen, s.partisan_votes, s.leader_votes
    );
    println!(
        "dropped: {} votes without leader vote, {} undatable leader votes, {} duplicate votes, {} date conflicts; {} zero-vote partisans",
        d.votes_without_leader_vote,
        d.leader_votes_without_roll_call,
        d.duplicate_votes,
        d.date_conflicts,
        d.zero_vote_partisans.len()
    );
    Ok(report.is_valid() && line_diagnostics.is_empty())
}

fn synth_files(args: SynthArgs) -> Result<()> {
    let mut p = match &args.preset {
        Some(name) => preset(name)?,
        None => synth::preset("mini").expect("bundled preset"),
    };
    p.n_parties = args.parties.unwrap_or(p.n_parties);
    p.n_blocs = args.blocs.unwrap_or(p.n_blocs);
    p.n_propositions = args.propositions.unwrap_or(p.n_propositions);
    p.n_partisans = args.partisans.unwrap_or(p.n_partisans);
    p.noise_rate = args.noise_rate.unwrap_or(p.noise_rate);
    p.switch_rate = args.switch_rate.unwrap_or(p.switch_rate);
    p.seed = args.seed.unwrap_or(p.seed);
    let data = synth::synth_records(&p)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let votes = args.out.join("votes.csv");
    let leaders = args.out.join("leaders.csv");
    csvio::save_records(&data.records, &data.leaders, &votes, &leaders)?;
    println!("wrote {} and {}", votes.display(), leaders.display());
    Ok(())
}

fn date(s: &str) -> Result<Date> {
    let d = chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|e| Error::BadArg(format!("bad date {s:?}: {e}")))?;
    use chrono::Datelike;
    Ok(Date::new(d.year(), d.month() as u8, d.day() as u8)?)
}

fn export_matrix(args: MatrixArgs) -> Result<()> {
    let Loaded { dataset, .. } = csvio::load(&args.input.votes, &args.input.leaders)?;
    let window = DateRange {
        start: date(&args.from)?,
        end: date(&args.to)?,
    };
    let m = export_vote_matrix(&dataset.partisans, &dataset.propositions, window)?;
    let out: &Path = &args.out;
    let file = File::create(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(std::iter::once("partisan").chain(m.columns.iter().map(String::as_str)))?;
    for (label, row) in m.rows.iter().zip(&m.entries) {
        w.write_record(std::iter::once(label.clone()).chain(row.iter().map(i8::to_string)))?;
    }
    w.flush().map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    println!("wrote {} ({} x {})", out.display(), m.rows.len(), m.columns.len());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a).map(|()| true),
        Command::Validate(a) => validate_files(a),
        Command::Synth(a) => synth_files(a).map(|()| true),
        Command::ExportMatrix(a) => export_matrix(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
