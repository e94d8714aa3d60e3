//! `winplace`: batch pipeline over PUBG-style CSV files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use winplace_core::eval::write_reports_csv;
use winplace_core::featsel::{apply_selection, Method};
use winplace_core::pipeline::{self, ModelEnvelope, PipelineConfig};
use winplace_core::synth::{generate, SynthConfig};
use winplace_core::table::{clean, load_csv_unlabelled, summarize, write_csv, ColumnData, IDENTIFIERS};
use winplace_core::{Error, Family, Result};

#[derive(Parser, Debug)]
#[command(name = "winplace", version, about = "Win-placement regression pipeline")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// -v for progress, -vv for debug output. GBM prints per-iteration metrics.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Input CSV.
    #[arg(long = "in")]
    input: PathBuf,

    /// Pipeline config (JSON). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a CSV and write summary statistics as JSON.
    Ingest {
        #[command(flatten)]
        common: Common,
        /// Output JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drop AFK rows and identifier columns.
    Clean {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add the engineered feature columns.
    Engineer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank attributes and write the selection as JSON.
    Select {
        #[command(flatten)]
        common: Common,
        /// Overrides `selection.method` (correlation, info_gain, cfs, classifier).
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit one model on the whole file and save it.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_family)]
        model: Family,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict every row of a CSV with a saved model.
    Predict {
        #[arg(long = "in")]
        input: PathBuf,
        /// Model file written by `train`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// k-fold cross-validation of one model.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_family)]
        model: Family,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        folds: Option<usize>,
        /// Report JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-fold CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// All four models before and after feature selection.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        folds: Option<usize>,
        /// Per-fold CSV; the full comparison goes to the same path with a .json extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded synthetic dataset.
    GenSynth {
        #[arg(long, default_value_t = 500)]
        matches: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 0.02)]
        afk_fraction: f64,
        #[arg(long, default_value_t = 2)]
        min_players: usize,
        #[arg(long, default_value_t = 100)]
        max_players: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV; the ground truth goes next to it as <stem>.truth.json.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::from_file(p),
        None => Ok(PipelineConfig::default()),
    }
}

/// Applies the command-line overrides shared by the model commands.
fn override_config(cfg: &mut PipelineConfig, seed: Option<u64>, folds: Option<usize>, verbose: u8) {
    if let Some(s) = seed {
        cfg.model.forest.seed = s;
        if let Some(g) = cfg.model.gbm.as_mut() {
            g.seed = s;
        }
        if let Some(m) = cfg.model.mlp.as_mut() {
            m.seed = s;
        }
        cfg.selection.seed = s;
        cfg.eval.seed = s;
    }
    if let Some(k) = folds {
        cfg.eval.folds = k;
    }
    if verbose > 0 {
        if let Some(g) = cfg.model.gbm.as_mut() {
            g.verbose = g.verbose.max(1);
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<S: Serialize>(value: &S, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

fn parse_method(s: &str) -> Result<Method> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::Config(format!("unknown selection method `{s}`")))
}

fn run(cli: Cli) -> Result<()> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Ingest { common, out } => {
            let cfg = load_config(common.config.as_deref())?;
            let table = pipeline::load_table(&common.input, &cfg)?;
            write_json(&summarize(&table)?, out.as_deref())
        }
        Command::Clean { common, out } => {
            let cfg = load_config(common.config.as_deref())?;
            let table = pipeline::load_table(&common.input, &cfg)?;
            let cleaned = clean(&table, cfg.clean)?;
            log::info!("kept {} of {} rows", cleaned.n_rows(), table.n_rows());
            write_csv(&cleaned, create(&out)?)
        }
        Command::Engineer { common, out } => {
            let cfg = load_config(common.config.as_deref())?;
            let table = pipeline::load_table(&common.input, &cfg)?;
            write_csv(&pipeline::engineer_stage(&table, &cfg.features)?, create(&out)?)
        }
        Command::Select { common, method, seed, out } => {
            let mut cfg = load_config(common.config.as_deref())?;
            override_config(&mut cfg, seed, None, verbose);
            let method = match method {
                Some(m) => parse_method(&m)?,
                None => cfg.selection.method.unwrap_or(Method::Classifier),
            };
            let table = pipeline::prepare(&pipeline::load_table(&common.input, &cfg)?, &cfg)?;
            let result = pipeline::select(&table, &cfg.selection, method)?;
            if out.is_some() {
                eprint!("{}", result.to_text());
            }
            write_json(&result, out.as_deref())
        }
        Command::Train { common, model, seed, out } => {
            let mut cfg = load_config(common.config.as_deref())?;
            override_config(&mut cfg, seed, None, verbose);
            let spec = cfg.spec(model)?;
            let mut table = pipeline::prepare(&pipeline::load_table(&common.input, &cfg)?, &cfg)?;
            if let Some(method) = cfg.selection.method {
                let selection = pipeline::select(&table, &cfg.selection, method)?;
                table = apply_selection(&table, &selection)?;
            }
            let envelope = pipeline::train(&table, &spec, &cfg.features)?;
            log::info!("trained {} on {} rows x {} features", model, table.n_rows(), envelope.features.len());
            envelope.save(&out)
        }
        Command::Predict { input, model, out } => {
            let envelope = ModelEnvelope::load(&model)?;
            let (table, _) = load_csv_unlabelled(&input)?;
            let preds = envelope.predict(&table)?;
            let ids = match table.column(IDENTIFIERS[0]) {
                Ok(ColumnData::Categorical(c)) => Some(c),
                _ => None,
            };
            let mut w = csv::Writer::from_writer(create(&out)?);
            w.write_record([if ids.is_some() { IDENTIFIERS[0] } else { "row" }, table.schema().target()])?;
            for (r, p) in preds.iter().enumerate() {
                let id = ids.map(|c| c.value(r).to_string()).unwrap_or_else(|| r.to_string());
                w.write_record([id, p.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Evaluate { common, model, seed, folds, out, csv } => {
            let mut cfg = load_config(common.config.as_deref())?;
            override_config(&mut cfg, seed, folds, verbose);
            let spec = cfg.spec(model)?;
            let mut table = pipeline::prepare(&pipeline::load_table(&common.input, &cfg)?, &cfg)?;
            let mut set = "pre";
            if let Some(method) = cfg.selection.method {
                let selection = pipeline::select(&table, &cfg.selection, method)?;
                table = apply_selection(&table, &selection)?;
                set = "post";
            }
            let report = pipeline::evaluate(&table, &spec, &cfg.eval, set)?;
            eprintln!("{model}: mae {:.6} (sd {:.6}), rmse {:.6}", report.mean_mae, report.sd_mae, report.mean_rmse);
            if let Some(p) = csv {
                write_reports_csv(std::slice::from_ref(&report), create(&p)?)?;
            }
            write_json(&report, out.as_deref())
        }
        Command::Compare { common, seed, folds, out } => {
            let mut cfg = load_config(common.config.as_deref())?;
            override_config(&mut cfg, seed, folds, verbose);
            let table = pipeline::prepare(&pipeline::load_table(&common.input, &cfg)?, &cfg)?;
            let comparison = pipeline::compare(&table, &cfg)?;
            for r in &comparison.reports {
                eprintln!("{:<7} {:<4} mae {:.6}  rmse {:.6}", r.model, r.feature_set, r.mean_mae, r.mean_rmse);
            }
            write_reports_csv(&comparison.reports, create(&out)?)?;
            write_json(&comparison, Some(&out.with_extension("json")))
        }
        Command::GenSynth { matches, noise, afk_fraction, min_players, max_players, seed, out } => {
            let cfg = SynthConfig { n_matches: matches, min_players, max_players, noise_sd: noise, seed, afk_fraction };
            let (table, truth) = generate(&cfg)?;
            write_csv(&table, create(&out)?)?;
            write_json(&truth, Some(&out.with_extension("truth.json")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
