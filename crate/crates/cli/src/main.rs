//! `qnc`: builds universes and catalogs, emits entropy, transmission and
//! statistics reports, and recalibrates the slack table.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qnc_core::lab::{
    calibrate, entropy_json, entropy_rows, gap_csv, gap_rows, monte_carlo_hits, population, read_states,
    write_states, AlgstatsLab, QuantumLab, QUANTUM_CONFIG, STATS_CONFIG,
};
use qnc_core::machine::{enumerate_universe, left_totalize, HaltingApprox, MachineConfig, MACHINE_VERSION};
use qnc_core::quantum::{PureState, NORM_TOLERANCE_BITS};
use qnc_core::SlackTable;

const MONTE_CARLO_DRAWS: usize = 100;

#[derive(Parser)]
#[command(name = "qnc", version, about = "Algorithmic-information laboratory")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "qnc-out")]
    out: PathBuf,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Slack table to use instead of the frozen one.
    #[arg(long, global = true)]
    slack: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a universe; write the snapshot, its left-total remap and Ĥ.
    Universe {
        #[arg(long, default_value_t = 14)]
        lmax: usize,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
    },
    /// Write the two-qubit lab catalog and its default state population.
    Catalog,
    /// Entropy table with chain checks.
    Entropy {
        /// States file; defaults to the lab population.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Classical-only versus mixed transmission costs.
    Transmit {
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Selection, border and total-prefix harnesses.
    Algstats {
        /// Seed for the random-family cross-check; skipped when absent.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure the slack constants and print the table.
    Calibrate {
        /// Write the table here as well.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct RunConfig<'a> {
    machine: &'static str,
    command: &'a str,
    budgets: Vec<MachineConfig>,
    norm_tolerance_bits: i64,
    slack: &'a SlackTable,
    states: Option<String>,
    seed: Option<u64>,
}

impl RunConfig<'_> {
    fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }
}

fn load_slack(path: Option<&Path>) -> Result<SlackTable> {
    match path {
        None => Ok(SlackTable::frozen()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(SlackTable::parse(&text)?)
        }
    }
}

fn load_states(path: Option<&Path>, lab: &QuantumLab) -> Result<(Vec<(String, PureState)>, Option<String>)> {
    match path {
        None => Ok((population(&lab.catalog), None)),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
            Ok((read_states(&text)?, Some(digest)))
        }
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json(dir: &Path, name: &str, hash: &str, report: Value) -> Result<()> {
    let doc = json!({ "config_hash": hash, "report": report });
    write(dir, name, &(serde_json::to_string_pretty(&doc)? + "\n"))
}

/// Returns the number of hard invariant violations.
fn run(cli: &Cli) -> Result<usize> {
    let slack = load_slack(cli.slack.as_deref())?;
    let workers = cli.workers;
    let out = &cli.out;
    match &cli.command {
        Command::Universe { lmax, steps } => {
            if *lmax == 0 || *steps == 0 {
                bail!("config error: budgets must be positive");
            }
            let config = MachineConfig { lmax: *lmax, steps: *steps };
            let snap = enumerate_universe(config, &[], &[], workers)?;
            let mut text = Vec::new();
            snap.write_text(&mut text)?;
            write(out, "universe.txt", &String::from_utf8(text)?)?;
            let mut text = Vec::new();
            left_totalize(&snap).snapshot().write_text(&mut text)?;
            write(out, "left_total.txt", &String::from_utf8(text)?)?;
            write(out, "halting.txt", &HaltingApprox::from_snapshot(&snap).to_text())?;
            Ok(usize::from(snap.prefix_violation().is_some()))
        }
        Command::Catalog => {
            let lab = QuantumLab::build(workers)?;
            write(out, "catalog.txt", &lab.catalog.to_text())?;
            write(out, "states.txt", &write_states(&population(&lab.catalog)))?;
            Ok(0)
        }
        Command::Entropy { states } => {
            let lab = QuantumLab::build(workers)?;
            let (states, digest) = load_states(states.as_deref(), &lab)?;
            let k = slack.chain();
            let rows = entropy_rows(&states, &lab.catalog, workers)?;
            let hash = RunConfig {
                machine: MACHINE_VERSION,
                command: "entropy",
                budgets: vec![QUANTUM_CONFIG],
                norm_tolerance_bits: NORM_TOLERANCE_BITS,
                slack: &slack,
                states: digest,
                seed: None,
            }
            .hash();
            write_json(out, "entropy.json", &hash, entropy_json(&rows, &k))?;
            Ok(rows
                .iter()
                .filter(|(_, r)| r.violations(&k).any() || r.hg != r.hg_mu)
                .count())
        }
        Command::Transmit { states } => {
            let lab = QuantumLab::build(workers)?;
            let (mut states, digest) = load_states(states.as_deref(), &lab)?;
            if digest.is_none() {
                states.push(("exotic".into(), lab.exotic.clone()));
            }
            let rows = gap_rows(&states, &lab, &slack.gap(), workers)?;
            let hash = RunConfig {
                machine: MACHINE_VERSION,
                command: "transmit",
                budgets: vec![QUANTUM_CONFIG],
                norm_tolerance_bits: NORM_TOLERANCE_BITS,
                slack: &slack,
                states: digest,
                seed: None,
            }
            .hash();
            write(out, "transmit.csv", &format!("# config {hash}\n{}", gap_csv(&rows)))?;
            Ok(rows
                .iter()
                .filter(|r| r.fails() || r.mixed.total() > r.classical.total())
                .count())
        }
        Command::Algstats { seed } => {
            let lab = AlgstatsLab::build(workers)?;
            let reports = lab.run(slack.selection(), slack.border(), slack.total_prefix(), workers)?;
            let mut report = reports.to_json(&lab.instances);
            if let Some(seed) = seed {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut hits = Vec::new();
                for (inst, r) in lab.instances.iter().zip(&reports.selection) {
                    hits.push(monte_carlo_hits(inst, r, &mut rng, MONTE_CARLO_DRAWS)?);
                }
                report["monte_carlo"] = json!({ "draws": MONTE_CARLO_DRAWS, "hits": hits });
            }
            let hash = RunConfig {
                machine: MACHINE_VERSION,
                command: "algstats",
                budgets: vec![STATS_CONFIG],
                norm_tolerance_bits: NORM_TOLERANCE_BITS,
                slack: &slack,
                states: None,
                seed: *seed,
            }
            .hash();
            write_json(out, "algstats.json", &hash, report)?;
            Ok(reports.hard_failures())
        }
        Command::Calibrate { write: target } => {
            let cal = calibrate(&slack, workers)?;
            for name in &cal.unmeasured {
                eprintln!("no finite witness for {name}; kept {}", cal.table.get(name));
            }
            let text = cal.table.to_toml();
            print!("{text}");
            if let Some(path) = target {
                fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} hard invariant violations");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
