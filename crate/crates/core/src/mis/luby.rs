//! Partial rounding and one derandomized Luby step over a given partition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::Clustering;
use crate::error::{precondition, Error, Result};
use crate::graph::{mask, Graph, Node};
use crate::ledger::Context;
use crate::params::{lg, Engine};
use crate::rounding::BinaryObjective;

#[derive(Clone, Debug, PartialEq)]
pub struct PartialRounding {
    pub y: Vec<f64>,
    /// Random draws until the verifier accepted; 0 when nothing was below q.
    pub tries: usize,
}

/// 0.01·Σ_S x + 10⁶·q·log(2|sets|).
pub fn deviation_bound(sum_x: f64, q: f64, sets: usize) -> f64 {
    0.01 * sum_x + 1e6 * q * lg(2.0 * sets as f64)
}

/// Describes the first way `y` fails the partial rounding contract.
pub fn partial_round_violation(x: &[f64], y: &[f64], sets: &[Vec<usize>], q: f64) -> Option<String> {
    if x.len() != y.len() {
        return Some(format!("y has {} entries, x has {}", y.len(), x.len()));
    }
    if let Some(j) = y.iter().position(|&v| !(v == 0.0 || (q..=1.0).contains(&v))) {
        return Some(format!("entry {j} = {} is neither 0 nor in [q, 1]", y[j]));
    }
    for (i, s) in sets.iter().enumerate() {
        let sx: f64 = s.iter().map(|&j| x[j]).sum();
        let sy: f64 = s.iter().map(|&j| y[j]).sum();
        let bound = deviation_bound(sx, q, sets.len());
        if (sx - sy).abs() > bound {
            return Some(format!("set {i} deviates by {} > {bound}", (sx - sy).abs()));
        }
    }
    None
}

/// Las Vegas partial rounding: entries ≥ q pass through, entries below q
/// become q with probability x/q, and the draw is kept only if every set
/// passes the verifier.
pub fn partial_round(x: &[f64], sets: &[Vec<usize>], q: f64, seed: u64, max_tries: usize) -> Result<PartialRounding> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(precondition("partial_round", format!("q = {q} outside (0, 1]")));
    }
    if let Some(j) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(precondition("partial_round", format!("x[{j}] = {} outside [0, 1]", x[j])));
    }
    for (i, s) in sets.iter().enumerate() {
        if let Some(&j) = s.iter().find(|&&j| j >= x.len()) {
            return Err(precondition("partial_round", format!("set {i} names entry {j} outside the ground set")));
        }
    }
    if !x.iter().any(|&v| v > 0.0 && v < q) {
        return Ok(PartialRounding { y: x.to_vec(), tries: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tries in 1..=max_tries {
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                if v == 0.0 || v >= q {
                    v
                } else if rng.random::<f64>() < v / q {
                    q
                } else {
                    0.0
                }
            })
            .collect();
        if partial_round_violation(x, &y, sets, q).is_none() {
            return Ok(PartialRounding { y, tries });
        }
    }
    Err(Error::RetriesExhausted { tries: max_tries })
}

/// Degrees inside U and the good vertices of the (deg, id) orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct Orientation {
    /// Degree in G[U], indexed by node; 0 outside U.
    pub deg: Vec<usize>,
    /// Nodes with at least deg/3 incoming edges, sorted.
    pub good: Vec<Node>,
}

impl Orientation {
    fn key(&self, g: &Graph, v: Node) -> (usize, u64) {
        (self.deg[v], g.id(v))
    }

    /// u → v iff (deg u, id u) < (deg v, id v).
    pub fn points_to(&self, g: &Graph, u: Node, v: Node) -> bool {
        self.key(g, u) < self.key(g, v)
    }
}

pub fn orientation(g: &Graph, u: &[Node]) -> Orientation {
    let inside = mask(g.n(), u);
    let mut deg = vec![0usize; g.n()];
    for &v in u {
        deg[v] = g.neighbors(v).iter().filter(|&&w| inside[w]).count();
    }
    let mut o = Orientation { deg, good: Vec::new() };
    let mut good: Vec<Node> = u
        .iter()
        .copied()
        .filter(|&v| {
            let incoming = g.neighbors(v).iter().filter(|&&w| inside[w] && o.points_to(g, w, v)).count();
            o.deg[v] > 0 && 3 * incoming >= o.deg[v]
        })
        .collect();
    good.sort_unstable();
    o.good = good;
    o
}

/// Number of clusters meeting the closed neighborhood of each node of U
/// inside U. Errors if a node of U is not clustered.
pub(crate) fn cluster_degrees(g: &Graph, u: &[Node], labels: &[Option<usize>]) -> Result<Vec<usize>> {
    let inside = mask(g.n(), u);
    let mut out = Vec::with_capacity(u.len());
    let mut seen: Vec<usize> = Vec::new();
    for &v in u {
        let lv = labels[v].ok_or_else(|| precondition("luby_derand_step", format!("node {} is not clustered", g.id(v))))?;
        seen.clear();
        seen.push(lv);
        seen.extend(g.neighbors(v).iter().filter(|&&w| inside[w]).filter_map(|&w| labels[w]));
        seen.sort_unstable();
        seen.dedup();
        out.push(seen.len());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LubyStep {
    /// Nodes added to the independent set, sorted.
    pub added: Vec<Node>,
    /// U without the added nodes and their neighbors, sorted.
    pub remainder: Vec<Node>,
    pub edges_before: usize,
    pub edges_after: usize,
    pub good: usize,
    pub q: f64,
    pub tries: usize,
    pub utility_y: f64,
    pub cost_y: f64,
    /// The removed-edge estimator at the integral marking.
    pub z_b: f64,
}

impl LubyStep {
    pub fn removed_edges(&self) -> usize {
        self.edges_before - self.edges_after
    }
}

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One derandomized Luby step on G[U], rounding inside the clusters of `c`
/// first and then globally by conditional expectations.
pub fn luby_derand_step(g: &Graph, u: &[Node], c: &Clustering, deg_bound: usize, ctx: &mut Context) -> Result<LubyStep> {
    let n = g.n();
    let inside = mask(n, u);
    let labels = c.labels(n);
    let measured = cluster_degrees(g, u, &labels)?.into_iter().max().unwrap_or(0);
    if measured > deg_bound {
        return Err(precondition("luby_derand_step", format!("cluster degree {measured} exceeds DEG = {deg_bound}")));
    }
    let o = orientation(g, u);
    let edges_before = u.iter().map(|&v| o.deg[v]).sum::<usize>() / 2;
    let q = 1.0 / (deg_bound.max(1) as f64 * 1e8 * lg(4.0 * g.id_bound() as f64));
    let mut added: Vec<Node> = u.iter().copied().filter(|&v| o.deg[v] == 0).collect();
    let active: Vec<Node> = u.iter().copied().filter(|&v| o.deg[v] > 0).collect();
    let mut idx = vec![usize::MAX; n];
    for (i, &v) in active.iter().enumerate() {
        idx[v] = i;
    }
    let inv = |v: Node| 1.0 / o.deg[v] as f64;

    let in_star: Vec<Vec<Node>> = o
        .good
        .iter()
        .map(|&v| {
            let mut ins: Vec<Node> = g.neighbors(v).iter().copied().filter(|&w| inside[w] && o.points_to(g, w, v)).collect();
            ins.sort_unstable_by_key(|&w| o.key(g, w));
            let mut sum = 0.0;
            let mut take = 0;
            while take < ins.len() && sum < 1.0 / 3.0 {
                sum += inv(ins[take]);
                take += 1;
            }
            ins.truncate(take);
            ins
        })
        .collect();
    let out: Vec<Vec<Node>> =
        active.iter().map(|&v| g.neighbors(v).iter().copied().filter(|&w| inside[w] && o.points_to(g, v, w)).collect()).collect();
    if !in_star.is_empty() {
        let sums: Vec<f64> = in_star.iter().map(|s| s.iter().map(|&w| inv(w)).sum()).collect();
        ctx.at_least("mis.luby.in_window_low", sums.iter().copied().fold(f64::INFINITY, f64::min), 1.0 / 3.0);
        ctx.at_most("mis.luby.in_window_high", sums.iter().copied().fold(0.0, f64::max), 4.0 / 3.0);
    }
    if !active.is_empty() {
        let worst = out.iter().map(|s| s.iter().map(|&w| inv(w)).sum::<f64>()).fold(0.0, f64::max);
        ctx.at_most("mis.luby.out_sum", worst, 1.0);
    }

    // Intra-cluster partial rounding of x = 1/(20 deg), then y = ỹ/5.
    let x: Vec<f64> = active.iter().map(|&v| inv(v) / 20.0).collect();
    let mut by_cluster: Vec<Vec<Node>> = vec![Vec::new(); c.clusters.len()];
    let mut pos = vec![usize::MAX; n];
    for &v in &active {
        let l = labels[v].expect("clustered");
        pos[v] = by_cluster[l].len();
        by_cluster[l].push(v);
    }
    let mut cluster_sets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); c.clusters.len()];
    for s in in_star.iter().chain(out.iter()) {
        let mut parts: Vec<(usize, usize)> = s.iter().map(|&w| (labels[w].expect("clustered"), pos[w])).collect();
        parts.sort_unstable();
        for chunk in parts.chunk_by(|a, b| a.0 == b.0) {
            cluster_sets[chunk[0].0].push(chunk.iter().map(|p| p.1).collect());
        }
    }
    let mut y = vec![0.0; active.len()];
    let mut tries = 0;
    for (l, members) in by_cluster.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let xc: Vec<f64> = members.iter().map(|&v| x[idx[v]]).collect();
        let seed = mix(mix(ctx.params.seed, g.id(members[0])), edges_before as u64);
        let r = partial_round(&xc, &cluster_sets[l], q, seed, ctx.params.max_tries)?;
        tries = tries.max(r.tries);
        for (&v, yv) in members.iter().zip(r.y) {
            y[idx[v]] = yv / 5.0;
        }
    }

    let mut obj = BinaryObjective::new(active.len());
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    let mut pair = |a: usize, b: usize, w: f64| pairs.push((a.min(b), a.max(b), w));
    for (&v, ins) in o.good.iter().zip(&in_star) {
        let w = o.deg[v] as f64 / 2.0;
        for (i, &a) in ins.iter().enumerate() {
            obj.utility.linear[idx[a]] += w;
            for &b in &ins[i + 1..] {
                pair(idx[a], idx[b], 2.0 * w);
            }
            for &b in &out[idx[a]] {
                pair(idx[a], idx[b], w);
            }
        }
    }
    pairs.sort_by_key(|p| (p.0, p.1));
    for chunk in pairs.chunk_by(|a, b| (a.0, a.1) == (b.0, b.1)) {
        obj.cost.pairs.push((chunk[0].0, chunk[0].1, chunk.iter().map(|p| p.2).sum()));
    }
    let utility_y = obj.utility.at(&y);
    let cost_y = obj.cost.at(&y);
    if !active.is_empty() {
        ctx.at_least("mis.luby.net_fraction", utility_y - cost_y, utility_y / 3.0);
    }
    let b = match ctx.params.engine {
        Engine::Sequential => obj.round_sequential(&y),
        Engine::Colored => obj.round_colored(&y, ctx.params.defect_r, ctx.params.defect_colors)?.labels,
    };
    let z_b = obj.net_at(&b);
    ctx.ledger.charge("mis luby step", "local rounding in G²", 2, ctx.rules.rounding(q));

    added.extend(active.iter().enumerate().filter(|&(i, _)| b[i] && !out[i].iter().any(|&w| b[idx[w]])).map(|(_, &v)| v));
    added.sort_unstable();
    let mut gone = mask(n, &added);
    for &v in &added {
        for &w in g.neighbors(v) {
            gone[w] = true;
        }
    }
    let remainder: Vec<Node> = u.iter().copied().filter(|&v| !gone[v]).collect();
    let left = mask(n, &remainder);
    let edges_after = remainder.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| left[w]).count()).sum::<usize>() / 2;
    if edges_before > 0 {
        ctx.at_least("mis.luby.estimator", z_b, edges_before as f64 / 24000.0);
        ctx.at_least("mis.luby.removed", (edges_before - edges_after) as f64, z_b);
    }
    Ok(LubyStep {
        added,
        remainder,
        edges_before,
        edges_after,
        good: o.good.len(),
        q,
        tries,
        utility_y,
        cost_y,
        z_b,
    })
}
