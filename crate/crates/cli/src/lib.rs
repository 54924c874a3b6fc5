//! The `argmine` command line. Each command is a thin wrapper over
//! `argmine_core`; the file builders here are shared with the tests so
//! outputs can be reconstructed from library calls.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use argmine_core::corpus::{corpus_stats, generate_synthetic, load_corpus, write_corpus, Corpus, SignalStyle, SynthConfig};
use argmine_core::features::{render_feature_catalog, FeatureGroup};
use argmine_core::harness::{
    render_report, run_ablation, run_experiment_with, run_matrix, threads_from_env, AblationReport, CvReport,
    Experiment, MatrixOptions, MatrixReport,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "argmine", version, about = "Argument component classification experiments")]
pub struct Cli {
    /// Worker threads for fold-parallel runs (overrides ARGMINE_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a corpus and print its statistics.
    Validate {
        corpus: PathBuf,
    },
    /// Write a synthetic corpus.
    Synth(SynthArgs),
    /// Run one cross-validated experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also rerun once per removed feature group.
        #[arg(long)]
        ablate: bool,
    },
    /// Run every row of the results table.
    Matrix {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSON matrix options (seed, hyperparams, permutation_iterations, pairing).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Feature-group ablation for one experiment.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated groups; all groups of the experiment when omitted.
        #[arg(long, value_delimiter = ',')]
        groups: Vec<String>,
    },
    /// Render a report.json or matrix.json as markdown.
    Report {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the feature catalog markdown.
    Features {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// JSON synthetic-corpus config; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub transcripts: Option<usize>,
    #[arg(long)]
    pub moves: Option<f64>,
    #[arg(long)]
    pub signal: Option<f64>,
    #[arg(long, value_parser = ["lexical", "word_length"])]
    pub style: Option<String>,
    /// Equal label frequencies.
    #[arg(long)]
    pub balanced: bool,
    /// 73 transcripts with the reference label counts.
    #[arg(long, conflicts_with_all = ["config", "transcripts", "moves", "balanced"])]
    pub table2: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unreadable or invalid corpus, config or arguments.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<argmine_core::Error> for CliError {
    fn from(e: argmine_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

fn input<T>(what: &Path, r: argmine_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("{}: {e}", what.display())))
}

fn io<T>(what: &Path, r: std::io::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Runtime(format!("{}: {e}", what.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// An output file name (relative to `--out`) and its bytes.
pub type OutputFile = (String, Vec<u8>);

/// `corpus.jsonl` and the effective `synth.json`.
pub fn synth_files(cfg: &SynthConfig, corpus: &Corpus) -> Result<Vec<OutputFile>, CliError> {
    let mut data = Vec::new();
    write_corpus(corpus, &mut data)?;
    let mut json = serde_json::to_string_pretty(cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    json.push('\n');
    Ok(vec![("corpus.jsonl".into(), data), ("synth.json".into(), json.into_bytes())])
}

pub fn experiment_files(report: &CvReport) -> Result<Vec<OutputFile>, CliError> {
    let mut json = report.to_json()?;
    json.push('\n');
    Ok(vec![
        ("report.json".into(), json.into_bytes()),
        ("report.md".into(), render_report(report).into_bytes()),
    ])
}

/// Markdown summary of an ablation: fold-mean kappa and F per removed group.
pub fn render_ablation(ab: &AblationReport) -> String {
    let mut s = format!("# Ablation: {}\n\n", ab.reference.experiment.model.label());
    s.push_str("| Removed group | Kappa | Delta kappa | F | Delta F |\n|---|---|---|---|---|\n");
    let base = &ab.reference.aggregate;
    s.push_str(&format!("| (none) | {:.3} | | {:.3} | |\n", base.kappa, base.macro_f));
    for (g, r) in &ab.removed {
        let a = &r.aggregate;
        s.push_str(&format!(
            "| {} | {:.3} | {:+.3} | {:.3} | {:+.3} |\n",
            g,
            a.kappa,
            a.kappa - base.kappa,
            a.macro_f,
            a.macro_f - base.macro_f
        ));
    }
    s
}

/// `ablation.md` plus one report directory per removed group.
pub fn ablation_files(ab: &AblationReport) -> Result<Vec<OutputFile>, CliError> {
    let mut files = vec![("ablation.md".to_string(), render_ablation(ab).into_bytes())];
    for (g, r) in &ab.removed {
        for (name, bytes) in experiment_files(r)? {
            files.push((format!("ablation/{}/{name}", g.as_str()), bytes));
        }
    }
    Ok(files)
}

pub fn matrix_files(m: &MatrixReport) -> Result<Vec<OutputFile>, CliError> {
    let mut json = serde_json::to_string_pretty(m).map_err(|e| CliError::Runtime(e.to_string()))?;
    json.push('\n');
    Ok(vec![
        ("matrix.json".into(), json.into_bytes()),
        ("matrix.md".into(), m.to_markdown().into_bytes()),
    ])
}

#[derive(Debug, Serialize)]
struct ManifestEntry<'a> {
    path: &'a str,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config_sha256: Option<String>,
    corpus_sha256: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
    elapsed_seconds: f64,
    files: Vec<ManifestEntry<'a>>,
}

struct RunInfo<'a> {
    command: &'a str,
    config: Option<&'a [u8]>,
    corpus: Option<&'a [u8]>,
    seed: Option<u64>,
    threads: Option<usize>,
    started: Instant,
}

fn write_outputs(out: &Path, files: &[OutputFile], info: &RunInfo<'_>) -> Result<(), CliError> {
    for (name, bytes) in files {
        let path = out.join(name);
        if let Some(dir) = path.parent() {
            io(dir, fs::create_dir_all(dir))?;
        }
        io(&path, fs::write(&path, bytes))?;
    }
    let manifest = Manifest {
        command: info.command,
        version: VERSION,
        config_sha256: info.config.map(sha256_hex),
        corpus_sha256: info.corpus.map(sha256_hex),
        seed: info.seed,
        threads: info.threads,
        elapsed_seconds: info.started.elapsed().as_secs_f64(),
        files: files
            .iter()
            .map(|(name, bytes)| ManifestEntry {
                path: name,
                sha256: sha256_hex(bytes),
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    json.push('\n');
    let path = out.join("manifest.json");
    io(&path, fs::write(&path, json))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_corpus(path: &Path) -> Result<(Corpus, Vec<u8>), CliError> {
    let bytes = read_bytes(path)?;
    let corpus = input(path, load_corpus(path))?;
    Ok((corpus, bytes))
}

/// Reads an experiment config, applying a seed override.
pub fn load_experiment(path: &Path, seed: Option<u64>) -> Result<(Experiment, Vec<u8>), CliError> {
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut exp = input(path, Experiment::from_json(&text))?;
    if let Some(s) = seed {
        exp.seed = s;
    }
    Ok((exp, bytes))
}

pub fn load_matrix_options(path: Option<&Path>, seed: Option<u64>) -> Result<(MatrixOptions, Vec<u8>), CliError> {
    let (mut opts, bytes) = match path {
        Some(p) => {
            let bytes = read_bytes(p)?;
            let opts: MatrixOptions = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Input(format!("{}: invalid config: {e}", p.display())))?;
            (opts, bytes)
        }
        None => (MatrixOptions::default(), Vec::new()),
    };
    if let Some(s) = seed {
        opts.seed = s;
    }
    Ok((opts, bytes))
}

pub fn parse_groups(names: &[String]) -> Result<Vec<FeatureGroup>, CliError> {
    names
        .iter()
        .map(|n| n.trim().parse::<FeatureGroup>().map_err(CliError::from))
        .collect()
}

pub fn synth_config(args: &SynthArgs) -> Result<SynthConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => serde_json::from_slice(&read_bytes(p)?)
            .map_err(|e| CliError::Input(format!("{}: invalid config: {e}", p.display())))?,
        None if args.table2 => SynthConfig::table2(0),
        None => SynthConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.transcripts {
        cfg.n_transcripts = n;
    }
    if let Some(m) = args.moves {
        cfg.moves_per_transcript_mean = m;
    }
    if let Some(s) = args.signal {
        cfg.class_signal_strength = s;
    }
    if let Some(style) = &args.style {
        cfg.style = if style == "word_length" { SignalStyle::WordLength } else { SignalStyle::Lexical };
    }
    if args.balanced {
        cfg = cfg.balanced();
    }
    Ok(cfg)
}

/// Executes `cli`, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let threads = cli.threads.or_else(threads_from_env);
    let say = |stdout: &mut dyn Write, text: &str| -> Result<(), CliError> {
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("stdout: {e}")))
    };
    match cli.command {
        Command::Validate { corpus } => {
            let (c, _) = read_corpus(&corpus)?;
            say(stdout, &corpus_stats(&c).render())
        }
        Command::Synth(args) => {
            let cfg = synth_config(&args)?;
            let corpus = generate_synthetic(&cfg).map_err(|e| CliError::Input(e.to_string()))?;
            let files = synth_files(&cfg, &corpus)?;
            write_outputs(
                &args.out,
                &files,
                &RunInfo {
                    command: "synth",
                    config: Some(&files[1].1),
                    corpus: Some(&files[0].1),
                    seed: Some(cfg.seed),
                    threads: None,
                    started,
                },
            )?;
            say(stdout, &corpus_stats(&corpus).render())
        }
        Command::Run {
            config,
            corpus,
            out,
            seed,
            ablate,
        } => {
            let (exp, cfg_bytes) = load_experiment(&config, seed)?;
            let (c, corpus_bytes) = read_corpus(&corpus)?;
            let (report, mut files) = if ablate {
                let ab = run_ablation(&c, &exp, &[], threads)?;
                let mut files = experiment_files(&ab.reference)?;
                files.extend(ablation_files(&ab)?);
                (ab.reference, files)
            } else {
                let r = run_experiment_with(&c, &exp, threads)?;
                let files = experiment_files(&r)?;
                (r, files)
            };
            files.sort_by(|a, b| a.0.cmp(&b.0));
            write_outputs(
                &out,
                &files,
                &RunInfo {
                    command: "run",
                    config: Some(&cfg_bytes),
                    corpus: Some(&corpus_bytes),
                    seed: Some(exp.seed),
                    threads,
                    started,
                },
            )?;
            say(stdout, &render_report_summary(&report))
        }
        Command::Matrix {
            corpus,
            out,
            config,
            seed,
        } => {
            let (opts, cfg_bytes) = load_matrix_options(config.as_deref(), seed)?;
            let (c, corpus_bytes) = read_corpus(&corpus)?;
            let report = run_matrix(&c, &opts, threads, |row, label, ok| {
                log::info!("row {row} {label}: {}", if ok { "done" } else { "failed" });
            });
            let files = matrix_files(&report)?;
            let cfg_hashed = if config.is_some() {
                cfg_bytes
            } else {
                serde_json::to_vec(&opts).map_err(|e| CliError::Runtime(e.to_string()))?
            };
            write_outputs(
                &out,
                &files,
                &RunInfo {
                    command: "matrix",
                    config: Some(&cfg_hashed),
                    corpus: Some(&corpus_bytes),
                    seed: Some(opts.seed),
                    threads,
                    started,
                },
            )?;
            say(stdout, &report.to_markdown())
        }
        Command::Ablate {
            config,
            corpus,
            out,
            seed,
            groups,
        } => {
            let (exp, cfg_bytes) = load_experiment(&config, seed)?;
            let groups = parse_groups(&groups)?;
            let (c, corpus_bytes) = read_corpus(&corpus)?;
            let ab = run_ablation(&c, &exp, &groups, threads)?;
            let mut files = experiment_files(&ab.reference)?;
            files.extend(ablation_files(&ab)?);
            write_outputs(
                &out,
                &files,
                &RunInfo {
                    command: "ablate",
                    config: Some(&cfg_bytes),
                    corpus: Some(&corpus_bytes),
                    seed: Some(exp.seed),
                    threads,
                    started,
                },
            )?;
            say(stdout, &render_ablation(&ab))
        }
        Command::Report { input, out } => {
            let bytes = read_bytes(&input)?;
            let md = render_saved_report(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            match out {
                Some(p) => io(&p, fs::write(&p, md)),
                None => say(stdout, &md),
            }
        }
        Command::Features { out } => {
            let md = render_feature_catalog();
            match out {
                Some(p) => io(&p, fs::write(&p, md)),
                None => say(stdout, &md),
            }
        }
    }
}

fn render_report_summary(r: &CvReport) -> String {
    let a = &r.aggregate;
    format!(
        "{}: kappa {:.3}, macro F {:.3} over {} folds\n",
        r.experiment.model.label(),
        a.kappa,
        a.macro_f,
        r.folds.len()
    )
}

/// Markdown for a saved `report.json` or `matrix.json`.
pub fn render_saved_report(bytes: &[u8]) -> Result<String, String> {
    if let Ok(r) = serde_json::from_slice::<CvReport>(bytes) {
        return Ok(render_report(&r));
    }
    serde_json::from_slice::<MatrixReport>(bytes)
        .map(|m| m.to_markdown())
        .map_err(|e| format!("neither a report nor a matrix file: {e}"))
}
