//! Producer-independent re-certification of output artifacts.
//!
//! Everything here works from the graph and the artifact text alone: the
//! parsers, the searches and the diameter computation are separate from the
//! code that produced the artifact.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use ndlab_core::nd::color_budget;
use ndlab_core::params::Params;
use ndlab_core::{Graph, Node};
use serde::Serialize;

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    /// One node id per line.
    Is,
    /// "id color" per line.
    Nd,
    /// One node id per line, optional "# stages S" header.
    Ruling,
    /// "id cluster" per line, optional "# max-headstart H" and "# scale s" headers.
    Partition,
}

impl ArtifactKind {
    pub fn name(self) -> &'static str {
        match self {
            ArtifactKind::Is => "is",
            ArtifactKind::Nd => "nd",
            ArtifactKind::Ruling => "ruling",
            ArtifactKind::Partition => "partition",
        }
    }
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArtifactKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        [ArtifactKind::Is, ArtifactKind::Nd, ArtifactKind::Ruling, ArtifactKind::Partition]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown artifact kind {s:?}")))
    }
}

/// Outcome of one re-certified invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub invariant: &'static str,
    pub passed: bool,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    /// First counterexample found, when the invariant fails.
    pub counterexample: Option<String>,
}

impl Verification {
    fn pass(invariant: &'static str, measured: Option<f64>, bound: Option<f64>) -> Self {
        Verification { invariant, passed: true, measured, bound, counterexample: None }
    }

    fn fail(invariant: &'static str, measured: Option<f64>, bound: Option<f64>, why: String) -> Self {
        Verification { invariant, passed: false, measured, bound, counterexample: Some(why) }
    }

    fn bounded(invariant: &'static str, measured: f64, bound: f64, why: impl FnOnce() -> String) -> Self {
        if measured <= bound {
            Self::pass(invariant, Some(measured), Some(bound))
        } else {
            Self::fail(invariant, Some(measured), Some(bound), why())
        }
    }
}

pub fn all_passed(vs: &[Verification]) -> bool {
    vs.iter().all(|v| v.passed)
}

struct Artifact {
    headers: BTreeMap<String, String>,
    /// (node, value) per data line; the value is absent for id-only kinds.
    rows: Vec<(Node, Option<u64>)>,
}

fn parse_artifact(g: &Graph, text: &str, with_value: bool) -> Result<Artifact, HarnessError> {
    let mut headers = BTreeMap::new();
    let mut rows = Vec::new();
    let mut seen = vec![false; g.n()];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let bad = |msg: String| HarnessError::Artifact { line: i + 1, msg };
        if let Some(h) = line.strip_prefix('#') {
            let mut it = h.split_whitespace();
            if let (Some(k), Some(v)) = (it.next(), it.next()) {
                headers.insert(k.to_string(), v.to_string());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let want = if with_value { 2 } else { 1 };
        if fields.len() != want {
            return Err(bad(format!("expected {want} field(s), found {}", fields.len())));
        }
        let id: u64 = fields[0].parse().map_err(|_| bad(format!("bad node id {:?}", fields[0])))?;
        let v = g.index_of(id).ok_or_else(|| bad(format!("node {id} is not in the graph")))?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(bad(format!("node {id} listed twice")));
        }
        let value = if with_value {
            Some(fields[1].parse().map_err(|_| bad(format!("bad value {:?}", fields[1])))?)
        } else {
            None
        };
        rows.push((v, value));
    }
    Ok(Artifact { headers, rows })
}

fn header<T: FromStr>(a: &Artifact, key: &str) -> Result<Option<T>, HarnessError> {
    a.headers
        .get(key)
        .map(|v| v.parse().map_err(|_| HarnessError::Artifact { line: 0, msg: format!("bad header {key} {v:?}") }))
        .transpose()
}

/// First edge with both ends chosen, scanning nodes by ascending id.
fn first_inner_edge(g: &Graph, chosen: &[bool]) -> Option<(u64, u64)> {
    let mut order: Vec<Node> = (0..g.n()).filter(|&v| chosen[v]).collect();
    order.sort_by_key(|&v| g.id(v));
    order.into_iter().find_map(|v| {
        g.neighbors(v).iter().filter(|&&w| chosen[w]).map(|&w| g.id(w)).min().map(|w| (g.id(v).min(w), g.id(v).max(w)))
    })
}

fn independence(g: &Graph, chosen: &[bool]) -> Verification {
    match first_inner_edge(g, chosen) {
        None => Verification::pass("independence", None, None),
        Some((a, b)) => Verification::fail("independence", None, None, format!("edge {a} {b} has both ends in the set")),
    }
}

/// Hop distance from the set to every node.
fn distances(g: &Graph, sources: &[Node], allowed: impl Fn(Node) -> bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap_or(0);
        for &w in g.neighbors(v) {
            if dist[w].is_none() && allowed(w) {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Components of the subgraph induced by each label; per component the
/// smallest node id and the exact strong diameter.
fn labelled_components(g: &Graph, label: &[Option<u64>]) -> Vec<(u64, u64, usize)> {
    let mut done = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        let Some(c) = label[s] else { continue };
        if done[s] {
            continue;
        }
        let same = |w: Node| label[w] == Some(c);
        let d = distances(g, &[s], same);
        let comp: Vec<Node> = (0..g.n()).filter(|&v| d[v].is_some()).collect();
        for &v in &comp {
            done[v] = true;
        }
        let diameter =
            comp.iter().map(|&v| distances(g, &[v], same).into_iter().flatten().max().unwrap_or(0)).max().unwrap_or(0);
        let min_id = comp.iter().map(|&v| g.id(v)).min().unwrap_or(0);
        out.push((c, min_id, diameter));
    }
    out
}

/// Re-certifies `text` as an artifact of `kind` on `g`. Malformed artifacts
/// are errors; violated invariants are failed verifications.
pub fn verify_artifact(
    g: &Graph,
    text: &str,
    kind: ArtifactKind,
    params: &Params,
) -> Result<Vec<Verification>, HarnessError> {
    let n = g.n();
    match kind {
        ArtifactKind::Is => {
            let a = parse_artifact(g, text, false)?;
            let mut chosen = vec![false; n];
            for &(v, _) in &a.rows {
                chosen[v] = true;
            }
            let lonely = (0..n)
                .filter(|&v| !chosen[v] && !g.neighbors(v).iter().any(|&w| chosen[w]))
                .map(|v| g.id(v))
                .min();
            let maximal = match lonely {
                None => Verification::pass("maximality", None, None),
                Some(id) => Verification::fail("maximality", None, None, format!("node {id} has no neighbor in the set")),
            };
            Ok(vec![independence(g, &chosen), maximal])
        }
        ArtifactKind::Ruling => {
            let a = parse_artifact(g, text, false)?;
            let mut chosen = vec![false; n];
            for &(v, _) in &a.rows {
                chosen[v] = true;
            }
            let set: Vec<Node> = a.rows.iter().map(|r| r.0).collect();
            let dist = distances(g, &set, |_| true);
            let stages: Option<usize> = header(&a, "stages")?;
            let radius = match (0..n).filter(|&v| dist[v].is_none()).map(|v| g.id(v)).min() {
                Some(id) => Verification::fail(
                    "radius",
                    None,
                    stages.map(|s| s as f64),
                    format!("node {id} cannot reach the set"),
                ),
                None => {
                    let r = dist.iter().flatten().copied().max().unwrap_or(0);
                    let far = || {
                        let id = (0..n).filter(|&v| dist[v] == Some(r)).map(|v| g.id(v)).min().unwrap_or(0);
                        format!("node {id} is at distance {r} from the set")
                    };
                    match stages {
                        Some(s) => Verification::bounded("radius", r as f64, s as f64, far),
                        None => Verification::pass("radius", Some(r as f64), None),
                    }
                }
            };
            Ok(vec![independence(g, &chosen), radius])
        }
        ArtifactKind::Nd => {
            let a = parse_artifact(g, text, true)?;
            let mut label = vec![None; n];
            for &(v, c) in &a.rows {
                label[v] = c;
            }
            let missing: Vec<u64> = (0..n).filter(|&v| label[v].is_none()).map(|v| g.id(v)).collect();
            let coverage = Verification::bounded("coverage", missing.len() as f64, 0.0, || {
                format!("node {} has no color", missing.iter().min().copied().unwrap_or(0))
            });
            let limit = params.c_diam * (n.max(2) as f64).log2();
            let comps = labelled_components(g, &label);
            let worst = comps.iter().copied().max_by_key(|&(c, id, d)| (d, std::cmp::Reverse((c, id))));
            let (wc, wid, wd) = worst.unwrap_or((0, 0, 0));
            let diameter = Verification::bounded("diameter", wd as f64, limit, || {
                format!("color {wc} component containing node {wid} has diameter {wd}, above c_diam·log n = {limit:.2}")
            });
            let budget = color_budget(g.id_bound() as f64, params);
            let mut used: Vec<u64> = a.rows.iter().filter_map(|r| r.1).collect();
            used.sort_unstable();
            used.dedup();
            let count = Verification::bounded("colors", used.len() as f64, budget as f64, || {
                format!("{} colors used, above the budget C(N) = {budget}", used.len())
            });
            let range = match a.rows.iter().filter(|r| r.1 >= Some(budget as u64)).map(|r| (g.id(r.0), r.1)).min() {
                None => Verification::pass("color-range", used.last().map(|&c| c as f64), Some(budget as f64 - 1.0)),
                Some((id, c)) => Verification::fail(
                    "color-range",
                    c.map(|c| c as f64),
                    Some(budget as f64 - 1.0),
                    format!("node {id} has color {}, outside the budget C(N) = {budget}", c.unwrap_or(0)),
                ),
            };
            Ok(vec![coverage, diameter, count, range])
        }
        ArtifactKind::Partition => {
            let a = parse_artifact(g, text, true)?;
            let mut label = vec![None; n];
            for &(v, c) in &a.rows {
                label[v] = c;
            }
            let missing = (0..n).filter(|&v| label[v].is_none()).map(|v| g.id(v)).min();
            let coverage = match missing {
                None => Verification::pass("coverage", Some(0.0), Some(0.0)),
                Some(id) => Verification::fail("coverage", None, Some(0.0), format!("node {id} is in no cluster")),
            };
            let comps = labelled_components(g, &label);
            let mut per_label: BTreeMap<u64, u64> = BTreeMap::new();
            let mut split = None;
            for &(c, id, _) in &comps {
                if let Some(&first) = per_label.get(&c) {
                    split.get_or_insert((c, first, id));
                } else {
                    per_label.insert(c, id);
                }
            }
            let connectivity = match split {
                None => Verification::pass("connectivity", None, None),
                Some((c, x, y)) => Verification::fail(
                    "connectivity",
                    None,
                    None,
                    format!("cluster {c} is disconnected: nodes {x} and {y} lie in different pieces"),
                ),
            };
            let (wc, wid, wd) = comps
                .iter()
                .copied()
                .max_by_key(|&(c, id, d)| (d, std::cmp::Reverse((c, id))))
                .unwrap_or((0, 0, 0));
            let max_h: Option<u64> = header(&a, "max-headstart")?;
            let scale: u64 = header(&a, "scale")?.unwrap_or(1);
            let diameter = match max_h {
                Some(h) => Verification::bounded("diameter", wd as f64, (scale * h) as f64, || {
                    format!("cluster {wc} containing node {wid} has diameter {wd}, above {scale}·max h = {}", scale * h)
                }),
                None => Verification::pass("diameter", Some(wd as f64), None),
            };
            Ok(vec![coverage, connectivity, diameter])
        }
    }
}
