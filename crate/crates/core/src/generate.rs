//! Seeded graph families.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Node};

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    /// Random recursive tree: node i attaches to a uniform earlier node.
    Tree { n: usize },
    Clique { n: usize },
    /// Star with center id 1.
    Star { n: usize },
    ErdosRenyi { n: usize, p: f64 },
    RandomBipartite { left: usize, right: usize, p: f64 },
    /// Near-regular graph whose shortest cycle has length at least `girth`.
    HighGirth { n: usize, degree: usize, girth: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub seed: u64,
}

const REGULAR_RETRIES: usize = 200;

impl FamilySpec {
    pub fn new(family: Family, seed: u64) -> Self {
        FamilySpec { family, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        match self.family {
            Family::Cycle { n } if n < 3 => bad("cycle needs n >= 3"),
            Family::ErdosRenyi { p, .. } | Family::RandomBipartite { p, .. } if !(0.0..=1.0).contains(&p) => {
                bad("edge probability must lie in [0, 1]")
            }
            Family::HighGirth { n, degree, girth } => {
                if girth < 3 {
                    bad("girth must be at least 3")
                } else if degree >= n || (n * degree) % 2 == 1 {
                    bad("high-girth needs degree < n and n*degree even")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, edges): (usize, Vec<(Node, Node)>) = match spec.family {
        Family::Path { n } => (n, (1..n).map(|i| (i - 1, i)).collect()),
        Family::Cycle { n } => (n, (0..n).map(|i| (i, (i + 1) % n)).collect()),
        Family::Grid { rows, cols } => {
            let mut e = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        e.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        e.push((v, v + cols));
                    }
                }
            }
            (rows * cols, e)
        }
        Family::Tree { n } => (n, (1..n).map(|i| (rng.random_range(0..i), i)).collect()),
        Family::Clique { n } => (n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()),
        Family::Star { n } => (n, (1..n).map(|i| (0, i)).collect()),
        Family::ErdosRenyi { n, p } => (n, erdos_renyi_edges(n, p, &mut rng)),
        Family::RandomBipartite { left, right, p } => {
            let mut e = Vec::new();
            for a in 0..left {
                for b in 0..right {
                    if rng.random::<f64>() < p {
                        e.push((a, left + b));
                    }
                }
            }
            (left + right, e)
        }
        Family::HighGirth { n, degree, girth } => (n, high_girth_edges(n, degree, girth, &mut rng)?),
    };
    Graph::from_index_edges(n, &edges)
}

/// One uniform draw per unordered pair, pairs in lexicographic order.
fn erdos_renyi_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(Node, Node)> {
    let mut e = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                e.push((a, b));
            }
        }
    }
    e
}

fn random_regular(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(Node, Node)>> {
    for _ in 0..REGULAR_RETRIES {
        let mut stubs: Vec<Node> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        stubs.shuffle(rng);
        let mut e: Vec<(Node, Node)> = stubs.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        if e.iter().any(|&(a, b)| a == b) {
            continue;
        }
        e.sort_unstable();
        if e.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        e.shuffle(rng);
        return Some(e);
    }
    None
}

/// Random regular pairing, then keeps an edge only if it closes no cycle
/// shorter than `girth`.
fn high_girth_edges(n: usize, degree: usize, girth: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(Node, Node)>> {
    let candidates = random_regular(n, degree, rng)
        .ok_or_else(|| Error::InvalidParams(format!("no simple {degree}-regular pairing found in {REGULAR_RETRIES} tries")))?;
    let mut kept: Vec<(Node, Node)> = Vec::new();
    let mut adj: Vec<Vec<Node>> = vec![Vec::new(); n];
    let mut dist = vec![usize::MAX; n];
    let mut frontier = Vec::new();
    for (a, b) in candidates {
        // keep (a, b) only if d(a, b) > girth - 2 in the edges kept so far
        frontier.clear();
        frontier.push(a);
        dist[a] = 0;
        let mut head = 0;
        let mut close = false;
        while head < frontier.len() {
            let v = frontier[head];
            head += 1;
            if v == b {
                close = true;
                break;
            }
            if dist[v] + 2 >= girth {
                continue;
            }
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    frontier.push(w);
                }
            }
        }
        for &v in &frontier {
            dist[v] = usize::MAX;
        }
        if !close {
            kept.push((a, b));
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    Ok(kept)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path { n } => write!(f, "path:{n}"),
            Family::Cycle { n } => write!(f, "cycle:{n}"),
            Family::Grid { rows, cols } => write!(f, "grid:{rows}x{cols}"),
            Family::Tree { n } => write!(f, "tree:{n}"),
            Family::Clique { n } => write!(f, "clique:{n}"),
            Family::Star { n } => write!(f, "star:{n}"),
            Family::ErdosRenyi { n, p } => write!(f, "er:{n}:{p}"),
            Family::RandomBipartite { left, right, p } => write!(f, "bipartite:{left}:{right}:{p}"),
            Family::HighGirth { n, degree, girth } => write!(f, "girth:{n}:{degree}:{girth}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `er:1000:0.01` or `grid:10x20`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unrecognized family spec {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let us = |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let fl = |i: usize| -> Result<f64> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let arity = |k: usize| if parts.len() == k { Ok(()) } else { Err(bad()) };
        match parts[0] {
            "path" => arity(2).and(Ok(Family::Path { n: us(1)? })),
            "cycle" => arity(2).and(Ok(Family::Cycle { n: us(1)? })),
            "tree" => arity(2).and(Ok(Family::Tree { n: us(1)? })),
            "clique" => arity(2).and(Ok(Family::Clique { n: us(1)? })),
            "star" => arity(2).and(Ok(Family::Star { n: us(1)? })),
            "grid" => {
                arity(2)?;
                let (r, c) = parts[1].split_once('x').ok_or_else(bad)?;
                Ok(Family::Grid { rows: r.parse().map_err(|_| bad())?, cols: c.parse().map_err(|_| bad())? })
            }
            "er" => arity(3).and(Ok(Family::ErdosRenyi { n: us(1)?, p: fl(2)? })),
            "bipartite" => arity(4).and(Ok(Family::RandomBipartite { left: us(1)?, right: us(2)?, p: fl(3)? })),
            "girth" => arity(4).and(Ok(Family::HighGirth { n: us(1)?, degree: us(2)?, girth: us(3)? })),
            _ => Err(bad()),
        }
    }
}
