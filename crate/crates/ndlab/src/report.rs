//! The JSON run report. Field order is declaration order, so serialization
//! is stable; only `wall_clock_ms` differs between replays.

use std::collections::BTreeMap;

use ndlab_core::ledger::{ChargingRules, Check, RoundLedger};
use ndlab_core::params::Params;
use serde::Serialize;

use crate::verify::Verification;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverriddenConstant {
    pub name: &'static str,
    pub paper: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub algorithm: String,
    pub graph: String,
    pub seed: u64,
    pub mode: String,
    /// `--set` overrides as given.
    pub set: BTreeMap<String, String>,
    /// Every constant whose value differs from the paper preset.
    pub overridden_constants: Vec<OverriddenConstant>,
    pub constants: BTreeMap<&'static str, String>,
}

impl ConfigEcho {
    pub fn new(algorithm: &str, graph: String, seed: u64, params: &Params, set: &[(String, String)]) -> Self {
        ConfigEcho {
            algorithm: algorithm.to_string(),
            graph,
            seed,
            mode: params.mode.to_string(),
            set: set.iter().cloned().collect(),
            overridden_constants: params
                .overrides()
                .into_iter()
                .map(|(name, paper, value)| OverriddenConstant { name, paper, value })
                .collect(),
            constants: params.entries().into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub id_bound: u64,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Artifacts {
    pub kind: Option<String>,
    pub output: Option<String>,
    pub report: Option<String>,
}

/// All checks sharing a name, with the instance closest to (or furthest
/// past) its bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub relation: &'static str,
    pub count: usize,
    pub failures: usize,
    pub worst_measured: f64,
    pub worst_bound: f64,
}

pub fn summarize_checks(checks: &[Check]) -> Vec<CheckSummary> {
    let mut out: Vec<CheckSummary> = Vec::new();
    let mut slot: BTreeMap<(&str, bool), usize> = BTreeMap::new();
    let slack = |c: &Check| if c.lower { c.measured - c.bound } else { c.bound - c.measured };
    for c in checks {
        let i = *slot.entry((&c.name, c.lower)).or_insert_with(|| {
            out.push(CheckSummary {
                name: c.name.clone(),
                relation: if c.lower { ">=" } else { "<=" },
                count: 0,
                failures: 0,
                worst_measured: c.measured,
                worst_bound: c.bound,
            });
            out.len() - 1
        });
        let s = &mut out[i];
        s.count += 1;
        s.failures += usize::from(!c.holds());
        let probe = Check { name: String::new(), measured: s.worst_measured, bound: s.worst_bound, lower: c.lower };
        if slack(c) < slack(&probe) {
            s.worst_measured = c.measured;
            s.worst_bound = c.bound;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseCharge {
    pub phase: String,
    pub tag: &'static str,
    pub charges: usize,
    pub max_dilation: u64,
    pub rounds: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerSummary {
    pub charging_rules: Vec<&'static str>,
    /// One entry per (phase, tag), in order of first charge.
    pub phases: Vec<PhaseCharge>,
    pub total: u64,
}

impl LedgerSummary {
    pub fn new(ledger: &RoundLedger) -> Self {
        let mut phases: Vec<PhaseCharge> = Vec::new();
        for e in &ledger.entries {
            match phases.iter_mut().find(|p| p.phase == e.phase && p.tag == e.tag) {
                Some(p) => {
                    p.charges += 1;
                    p.max_dilation = p.max_dilation.max(e.dilation);
                    p.rounds += e.rounds;
                }
                None => phases.push(PhaseCharge {
                    phase: e.phase.clone(),
                    tag: e.tag,
                    charges: 1,
                    max_dilation: e.dilation,
                    rounds: e.rounds,
                }),
            }
        }
        LedgerSummary { charging_rules: ChargingRules::describe(), phases, total: ledger.total() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub graph: GraphSummary,
    pub artifacts: Artifacts,
    /// True iff every verification passed; decides the exit code.
    pub passed: bool,
    pub verification: Vec<Verification>,
    pub result: serde_json::Value,
    pub checks: Vec<CheckSummary>,
    pub ledger: LedgerSummary,
    pub wall_clock_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
