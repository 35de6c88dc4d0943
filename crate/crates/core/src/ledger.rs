//! Simulated LOCAL round accounting and per-run contract checks.

use crate::params::{lg, log_star, Params};

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub phase: String,
    pub tag: &'static str,
    /// Rounds of G needed to simulate one round of the virtual graph.
    pub dilation: u64,
    pub rounds: u64,
}

/// Charging rules, kept as data so reports can print them.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargingRules {
    /// ζ of the rounding engine's conflict-graph coloring.
    pub zeta: f64,
}

impl ChargingRules {
    pub fn new(id_bound: u64) -> Self {
        ChargingRules { zeta: id_bound.max(2) as f64 }
    }

    pub fn describe() -> Vec<&'static str> {
        vec![
            "one round of a virtual graph with dilation D costs D rounds of G",
            "a rounding step with minimum label probability λ costs ⌈log²(1/λ)⌉ + ⌈log(1/λ)⌉·log* ζ rounds, ζ = N",
            "constant-degree MIS costs log* N + 1 rounds",
            "main sampling costs one rounding step with λ = 1/T² for each of the T³ steps of every e^(-T) call",
            "a clustering step over clusters of diameter D costs D + 1 rounds per aggregation",
            "recursive calls that the paper runs in parallel are charged along the critical path only",
        ]
    }

    pub fn rounding(&self, lambda_min: f64) -> u64 {
        let inv = lg(1.0 / lambda_min.clamp(1e-300, 0.5));
        (inv * inv).ceil() as u64 + inv.ceil() as u64 * log_star(self.zeta)
    }

    pub fn sampling(&self, expt_calls: usize, t_inner: u32) -> u64 {
        let t = t_inner.max(1) as u64;
        expt_calls as u64 * t.pow(3) * self.rounding(1.0 / (t * t) as f64)
    }

    pub fn constant_degree_mis(&self) -> u64 {
        log_star(self.zeta) + 1
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoundLedger {
    pub entries: Vec<LedgerEntry>,
}

impl RoundLedger {
    pub fn charge(&mut self, phase: impl Into<String>, tag: &'static str, dilation: u64, virtual_rounds: u64) {
        self.entries.push(LedgerEntry { phase: phase.into(), tag, dilation, rounds: dilation.max(1) * virtual_rounds });
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.rounds).sum()
    }

    pub fn absorb(&mut self, other: RoundLedger) {
        self.entries.extend(other.entries);
    }
}

/// One evaluated inequality: `measured ≤ bound` (or `≥` when `lower`).
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub lower: bool,
}

impl Check {
    pub fn holds(&self) -> bool {
        if self.lower {
            self.measured >= self.bound
        } else {
            self.measured <= self.bound
        }
    }
}

/// Mutable run state threaded through the recursive algorithms.
#[derive(Clone, Debug)]
pub struct Context {
    pub params: Params,
    pub rules: ChargingRules,
    pub ledger: RoundLedger,
    pub checks: Vec<Check>,
}

impl Context {
    pub fn new(params: Params, id_bound: u64) -> Self {
        Context { params, rules: ChargingRules::new(id_bound), ledger: RoundLedger::default(), checks: Vec::new() }
    }

    pub fn at_most(&mut self, name: impl Into<String>, measured: f64, bound: f64) -> bool {
        let c = Check { name: name.into(), measured, bound, lower: false };
        let ok = c.holds();
        self.checks.push(c);
        ok
    }

    pub fn at_least(&mut self, name: impl Into<String>, measured: f64, bound: f64) -> bool {
        let c = Check { name: name.into(), measured, bound, lower: true };
        let ok = c.holds();
        self.checks.push(c);
        ok
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }

    /// Checks whose name starts with `prefix`.
    pub fn checks_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }
}
