//! Dispatch of one configured run.

use std::fmt::Write as _;
use std::time::Instant;

use ndlab_core::cluster::{clustering_metrics, mpx_random_headstarts, partition_from_headstarts};
use ndlab_core::generate::{generate, FamilySpec};
use ndlab_core::graph::{component_diameter, load_edge_list};
use ndlab_core::ledger::Context;
use ndlab_core::mis::{is_to_text, luby_randomized, mis};
use ndlab_core::nd::network_decomposition;
use ndlab_core::ruling::{ruling_set, stage_bound};
use ndlab_core::Graph;
use serde_json::json;

use crate::config::{Algorithm, GraphSource, RunConfig};
use crate::error::HarnessError;
use crate::report::{summarize_checks, Artifacts, ConfigEcho, GraphSummary, LedgerSummary, RunReport};
use crate::verify::{all_passed, verify_artifact};

/// Head-start scale of the MPX partition.
pub const MPX_SCALE: u64 = 5;

pub struct RunOutcome {
    pub report: RunReport,
    /// Text of the produced artifact; `None` for `verify` runs.
    pub artifact: Option<String>,
}

pub fn load_graph(source: &GraphSource, seed: u64) -> Result<Graph, HarnessError> {
    Ok(match source {
        GraphSource::File(p) => load_edge_list(p)?,
        GraphSource::Family(f) => generate(&FamilySpec::new(f.clone(), seed))?,
    })
}

/// `p = n^{-1/k}` with `k = ⌈√log n⌉`, the MPX baseline parameter.
pub fn mpx_parameter(n: usize) -> (f64, u32) {
    let lgn = (n.max(2) as f64).log2();
    let k = lgn.sqrt().ceil().max(1.0) as u32;
    ((n.max(2) as f64).powf(-1.0 / k as f64).min(0.5), k)
}

fn ids_text(g: &Graph, header: &str, set: &[usize]) -> String {
    let mut out = header.to_string();
    out.push_str(&is_to_text(g, set));
    out
}

/// Runs the configured algorithm, writes nothing, and re-certifies the
/// artifact in memory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    let params = cfg.params()?;
    let g = load_graph(&cfg.source, cfg.seed)?;
    let start = Instant::now();
    let mut ctx = Context::new(params.clone(), g.id_bound());
    let (artifact, result) = match cfg.algorithm {
        Algorithm::Mis => {
            let r = mis(&g, &mut ctx)?;
            let depth = r.trace.iter().map(|e| e.depth).max().unwrap_or(0);
            let res = json!({
                "size": r.independent_set.len(),
                "calls": r.trace.len(),
                "depth": depth,
                "depth_bound": r.consts.depth_bound(r.consts.id_bound),
                "k": r.consts.k,
                "base_threshold": r.consts.base_threshold,
                "almost_remaining_edges": r.almost_remaining_edges,
                "completion_steps": r.completion_steps,
            });
            (Some(is_to_text(&g, &r.independent_set)), res)
        }
        Algorithm::Luby => {
            let set = luby_randomized(&g, cfg.seed);
            (Some(is_to_text(&g, &set)), json!({ "size": set.len() }))
        }
        Algorithm::NetDecomp => {
            let r = network_decomposition(&g, &mut ctx)?;
            let d = &r.decomposition;
            let diameter = d.classes().iter().flat_map(|c| component_diameter(&g, c)).max().unwrap_or(0);
            let res = json!({
                "colors_used": d.colors_used(),
                "max_color": d.max_color(),
                "color_budget": d.budget,
                "uncolored": d.uncolored().len(),
                "max_component_diameter": diameter,
                "calls": r.trace.len(),
                "depth": r.trace.iter().map(|e| e.depth).max().unwrap_or(0),
                "safety_net_nodes": r.safety_net_nodes,
                "safety_net_colors": r.safety_net_colors,
            });
            (Some(d.to_text(&g)), res)
        }
        Algorithm::RulingSet => {
            let delta = g.max_degree();
            let r = ruling_set(&g, delta, &mut ctx)?;
            let res = json!({
                "size": r.set.len(),
                "delta": delta,
                "stages": r.stages,
                "stage_bound": stage_bound(delta as f64, params.rs_min_degree),
                "measured_radius": r.measured_radius,
                "per_stage_max_degree": r.per_stage_max_degree,
                "fallbacks": r.fallbacks,
            });
            (Some(ids_text(&g, &format!("# stages {}\n", r.stages), &r.set)), res)
        }
        Algorithm::Mpx => {
            let (p, k) = mpx_parameter(g.n());
            let h = mpx_random_headstarts(&g, p, cfg.seed)?;
            let c = partition_from_headstarts(&g, &h, MPX_SCALE)?;
            let m = clustering_metrics(&g, &c)?;
            let mut text = format!("# max-headstart {}\n# scale {MPX_SCALE}\n", h.max());
            let mut rows: Vec<(u64, usize)> = Vec::with_capacity(g.n());
            for (i, cl) in c.clusters.iter().enumerate() {
                rows.extend(cl.members.iter().map(|&v| (g.id(v), i)));
            }
            rows.sort_unstable();
            for (id, i) in rows {
                let _ = writeln!(text, "{id} {i}");
            }
            let res = json!({
                "p": p,
                "k": k,
                "clusters": c.clusters.len(),
                "max_headstart": h.max(),
                "max_strong_diameter": m.max_strong_diameter,
                "diameter_bound": MPX_SCALE * h.max(),
                "max_cluster_degree": m.max_cluster_degree,
            });
            (Some(text), res)
        }
        Algorithm::Verify => (None, json!({})),
    };
    let kind = cfg.algorithm.artifact_kind().or(cfg.kind).expect("verify runs carry a kind");
    let text = match (&artifact, &cfg.artifact) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?,
        (None, None) => return Err(HarnessError::Config("verify needs an artifact".into())),
    };
    let verification = verify_artifact(&g, &text, kind, &params)?;
    let wall_clock_ms = start.elapsed().as_secs_f64() * 1e3;
    let shown = |p: &Option<std::path::PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let report = RunReport {
        tool: "ndlab",
        version: env!("CARGO_PKG_VERSION"),
        config: ConfigEcho::new(cfg.algorithm.name(), cfg.source.to_string(), cfg.seed, &params, &cfg.overrides),
        graph: GraphSummary { nodes: g.n(), edges: g.m(), id_bound: g.id_bound(), max_degree: g.max_degree() },
        artifacts: Artifacts {
            kind: Some(kind.name().to_string()),
            output: shown(if artifact.is_some() { &cfg.out } else { &cfg.artifact }),
            report: shown(&cfg.report),
        },
        passed: all_passed(&verification),
        verification,
        result,
        checks: summarize_checks(&ctx.checks),
        ledger: LedgerSummary::new(&ctx.ledger),
        wall_clock_ms,
    };
    Ok(RunOutcome { report, artifact })
}
