//! Command-line interface: materialize, verify, stats, gen-example.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use metalog_core::engine::compress_dataset;
use metalog_core::export::{render_facts, render_triples};
use metalog_core::meta::MuMapping;
use metalog_core::metrics::{mu_stats, repsize_compressed, repsize_flat};
use metalog_core::{mat_reference, materialise, parse_program, parse_triples, synth, verify};
use metalog_core::{Dataset, Fact, Program, Vocabulary};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "metalog",
    version,
    about = "Datalog materialisation with compressed fact storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Compressed,
    Reference,
}

#[derive(Subcommand)]
enum Command {
    /// Load data and rules, run an engine, write the derived facts.
    Materialize {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "compressed")]
        engine: EngineKind,
        #[arg(long)]
        out: PathBuf,
        /// Write triples (inverting vertical partitioning) instead of facts.
        #[arg(long)]
        as_triples: bool,
    },
    /// Run both engines and compare their outputs.
    Verify {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Print a one-line JSON record of size metrics and engine counters.
    Stats {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Write the bundled example family (data.nt and rules.dl) for given n, m.
    GenExample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Output directory; created if missing.
        #[arg(long)]
        out: PathBuf,
    },
}

enum AppError {
    Usage(String),
    Io(String),
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> AppError {
        AppError::Io(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}

fn load(rules: &Path, data: &Path) -> Result<(Vocabulary, Dataset, Program), AppError> {
    let mut vocab = Vocabulary::new();
    let triples = read_file(data)?;
    let dataset = parse_triples(&triples, &mut vocab)
        .map_err(|e| AppError::Usage(format!("{}: {e}", data.display())))?;
    let rule_text = read_file(rules)?;
    let program = parse_program(&rule_text, &mut vocab)
        .map_err(|e| AppError::Usage(format!("{}: {e}", rules.display())))?;
    Ok((vocab, dataset, program))
}

fn run(cli: Cli) -> Result<u8, AppError> {
    match cli.command {
        Command::Materialize {
            rules,
            data,
            engine,
            out,
            as_triples,
        } => {
            let (vocab, dataset, program) = load(&rules, &data)?;
            let facts: Vec<Fact> = match engine {
                EngineKind::Compressed => materialise(&program, &dataset)
                    .map_err(|e| AppError::Usage(e.to_string()))?
                    .expand(),
                EngineKind::Reference => mat_reference(&program, &dataset)
                    .map_err(|e| AppError::Usage(e.to_string()))?
                    .iter()
                    .cloned()
                    .collect(),
            };
            let rendered = if as_triples {
                render_triples(&facts, &vocab).map_err(|e| AppError::Usage(e.to_string()))?
            } else {
                render_facts(&facts, &vocab)
            };
            fs::write(&out, rendered)
                .map_err(|e| AppError::Io(format!("{}: {e}", out.display())))?;
            Ok(0)
        }
        Command::Verify { rules, data } => {
            let (vocab, dataset, program) = load(&rules, &data)?;
            let report =
                verify(&program, &dataset, 10).map_err(|e| AppError::Usage(e.to_string()))?;
            if report.equal {
                println!("equal, {} facts", report.reference_count);
                Ok(0)
            } else {
                println!(
                    "unequal, reference {} facts, compressed {} facts",
                    report.reference_count, report.compressed_count
                );
                for fact in &report.missing {
                    println!(
                        "missing: {}",
                        metalog_core::model::display_fact(fact, &vocab)
                    );
                }
                for fact in &report.extra {
                    println!("extra: {}", metalog_core::model::display_fact(fact, &vocab));
                }
                Ok(EXIT_MISMATCH)
            }
        }
        Command::Stats { rules, data } => {
            let (_vocab, dataset, program) = load(&rules, &data)?;
            let explicit: Vec<Fact> = dataset.iter().cloned().collect();
            let mut fresh_mu = MuMapping::new();
            let explicit_meta = compress_dataset(&dataset, &mut fresh_mu);
            let repsize_compressed_explicit = repsize_compressed(&explicit_meta, &fresh_mu);
            let mat =
                materialise(&program, &dataset).map_err(|e| AppError::Usage(e.to_string()))?;
            let materialised = mat.expand();
            let stats = mu_stats(&mat.meta, &mat.mu);
            let record = serde_json::json!({
                "facts_explicit": dataset.len(),
                "facts_materialised": materialised.len(),
                "repsize_flat_explicit": repsize_flat(&explicit),
                "repsize_flat_materialised": repsize_flat(&materialised),
                "repsize_compressed_explicit": repsize_compressed_explicit,
                "repsize_compressed_materialised": repsize_compressed(&mat.meta, &mat.mu),
                "mu_avg_len": stats.avg_len,
                "mu_max_len": stats.max_len,
                "mu_max_depth": stats.max_depth,
                "mu_nodes": mat.stats.mu_nodes,
                "meta_facts": mat.stats.meta_facts,
                "rounds": mat.stats.rounds,
                "rule_applications": mat.stats.rule_applications,
                "queue_steps": mat.stats.queue_steps,
            });
            println!("{record}");
            Ok(0)
        }
        Command::GenExample { n, m, out } => {
            fs::create_dir_all(&out)
                .map_err(|e| AppError::Io(format!("{}: {e}", out.display())))?;
            let data_path = out.join("data.nt");
            let rules_path = out.join("rules.dl");
            fs::write(&data_path, synth::example_triples(n, m))
                .map_err(|e| AppError::Io(format!("{}: {e}", data_path.display())))?;
            fs::write(&rules_path, synth::example_rules())
                .map_err(|e| AppError::Io(format!("{}: {e}", rules_path.display())))?;
            println!("{}", data_path.display());
            println!("{}", rules_path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(AppError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
