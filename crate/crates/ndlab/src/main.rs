use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};
use ndlab::config::{load_config, split_assignment};
use ndlab::runner::load_graph;
use ndlab::{run, Algorithm, ArtifactKind, GraphSource, RunConfig};
use ndlab_core::generate::Family;

#[derive(Parser)]
#[command(name = "ndlab", version, about = "Deterministic network decomposition and MIS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm, write its artifact and report.
    Run {
        #[arg(long)]
        algorithm: Option<Algorithm>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-certify an artifact against a graph.
    Verify {
        #[arg(long)]
        artifact: Option<PathBuf>,
        #[arg(long)]
        kind: Option<ArtifactKind>,
        #[command(flatten)]
        common: Common,
    },
    /// Run an algorithm over families and seeds, one JSON line per run.
    Bench {
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long, required = true)]
        family: Vec<Family>,
        /// Seeds 1..=seeds.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat "key = value" file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// paper or desk.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Artifact output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report path; the report goes to stdout without it.
    #[arg(long)]
    report: Option<PathBuf>,
}

impl Common {
    fn entries(&self, extra: Vec<(String, String)>) -> Result<Vec<(String, String)>> {
        let mut e = match &self.config {
            Some(p) => load_config(p)?,
            None => Vec::new(),
        };
        let path = |p: &Path| p.display().to_string();
        let flags = [
            ("graph", self.graph.as_deref().map(path)),
            ("family", self.family.clone()),
            ("seed", self.seed.map(|s| s.to_string())),
            ("mode", self.mode.clone()),
            ("out", self.out.as_deref().map(path)),
            ("report", self.report.as_deref().map(path)),
        ];
        e.extend(extra);
        e.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        for s in &self.set {
            let (k, v) = split_assignment(s)?;
            e.push((format!("set.{k}"), v));
        }
        Ok(e)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn execute(cfg: &RunConfig) -> Result<bool> {
    let out = run(cfg)?;
    if let (Some(p), Some(text)) = (&cfg.out, &out.artifact) {
        write(p, text)?;
    }
    let json = out.report.to_json();
    match &cfg.report {
        Some(p) => write(p, &json)?,
        None => print!("{json}"),
    }
    for v in out.report.verification.iter().filter(|v| !v.passed) {
        eprintln!("verification failed: {}: {}", v.invariant, v.counterexample.as_deref().unwrap_or("?"));
    }
    Ok(out.report.passed)
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { family, seed, out } => {
            let g = load_graph(&GraphSource::Family(family), seed)?;
            let text = g.to_edge_list();
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Run { algorithm, common } => {
            let extra = algorithm.map(|a| ("algorithm".to_string(), a.name().to_string())).into_iter().collect();
            execute(&RunConfig::from_entries(&common.entries(extra)?)?)
        }
        Command::Verify { artifact, kind, common } => {
            let mut extra = vec![("algorithm".to_string(), "verify".to_string())];
            if let Some(a) = artifact {
                extra.push(("artifact".into(), a.display().to_string()));
            }
            if let Some(k) = kind {
                extra.push(("kind".into(), k.name().to_string()));
            }
            execute(&RunConfig::from_entries(&common.entries(extra)?)?)
        }
        Command::Bench { algorithm, family, seeds, mode, set } => {
            let mut all = true;
            for f in &family {
                for seed in 1..=seeds {
                    let mut e = vec![
                        ("algorithm".to_string(), algorithm.name().to_string()),
                        ("family".to_string(), f.to_string()),
                        ("seed".to_string(), seed.to_string()),
                    ];
                    if let Some(m) = &mode {
                        e.push(("mode".into(), m.clone()));
                    }
                    for s in &set {
                        let (k, v) = split_assignment(s)?;
                        e.push((format!("set.{k}"), v));
                    }
                    let r = run(&RunConfig::from_entries(&e)?)?.report;
                    all &= r.passed;
                    let line = serde_json::json!({
                        "algorithm": algorithm.name(),
                        "family": f.to_string(),
                        "seed": seed,
                        "nodes": r.graph.nodes,
                        "edges": r.graph.edges,
                        "passed": r.passed,
                        "failed_checks": r.checks.iter().map(|c| c.failures).sum::<usize>(),
                        "ledger_rounds": r.ledger.total,
                        "result": r.result,
                        "wall_clock_ms": r.wall_clock_ms,
                    });
                    println!("{line}");
                }
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
