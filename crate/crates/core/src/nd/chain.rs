//! Base-case clustering chain: frontier reduction, cluster subsampling,
//! small-boundary growth and the low-degree halving loop.

use std::collections::{BTreeMap, HashMap};

use crate::cluster::{all_frontiers, assign_centers, clustering_from_centers, frontier_with, near_clusters, separation, Cluster, Clustering, HeadStart};
use crate::error::{precondition, Error, Result};
use crate::graph::{components, mask, Bfs, Graph, Node};
use crate::ledger::Context;
use crate::nd::NdConsts;
use crate::params::{Engine, Mode};
use crate::rounding::BinaryObjective;
use crate::sampling::{gate_threshold, repeat_unchecked, BipartiteInstance, SpanSet};

/// F_{h,s}(u) for each u in `us`, each sorted. Label setting over all
/// nodes while the frontiers stay small, one BFS per u otherwise.
pub fn frontiers_of(g: &Graph, h: &HeadStart, s: u64, us: &[Node]) -> Vec<Vec<Node>> {
    if 8 * us.len() >= g.n() {
        if let Ok(mut all) = all_frontiers(g, h, s, 512 * g.n()) {
            return us.iter().map(|&u| std::mem::take(&mut all[u])).collect();
        }
    }
    frontiers_by_bfs(g, h, s, us)
}

fn frontiers_by_bfs(g: &Graph, h: &HeadStart, s: u64, us: &[Node]) -> Vec<Vec<Node>> {
    let hmax = h.max();
    let mut bfs = Bfs::new(g.n());
    us.iter().map(|&u| frontier_with(g, h, hmax, s, u, &mut bfs)).collect()
}

/// Merges U-nodes with equal neighborhoods, summing their importance. Sampling
/// treats such nodes identically, so the merged instance samples the same set.
fn dedup_lists(lists: Vec<Vec<u32>>, imp: &[f64]) -> (Vec<Vec<u32>>, Vec<f64>, Vec<usize>) {
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut unique = Vec::new();
    let mut merged = Vec::new();
    let mut slot = Vec::with_capacity(lists.len());
    for (l, &w) in lists.into_iter().zip(imp) {
        let next = unique.len();
        let i = *index.entry(l.clone()).or_insert(next);
        if i == next {
            unique.push(l);
            merged.push(0.0);
        }
        merged[i] += w;
        slot.push(i);
    }
    (unique, merged, slot)
}

fn filtered(list: &[Node], keep: &[bool]) -> Vec<u32> {
    list.iter().filter(|&&v| keep[v]).map(|&v| v as u32).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub u_sub: Vec<Node>,
    pub h: HeadStart,
    /// Nodes turning bad in each round.
    pub bad_per_round: Vec<usize>,
}

/// Shrinks narrow frontiers by repeated halving of the active set, bumping
/// the head starts of the surviving active nodes after every round.
pub fn base_reduce_frontier(g: &Graph, h: &HeadStart, u: &[Node], k: &NdConsts, ctx: &mut Context) -> Result<Reduced> {
    if u.is_empty() {
        return Ok(Reduced { u_sub: Vec::new(), h: h.clone(), bad_per_round: Vec::new() });
    }
    let n = g.n();
    let wide = frontiers_by_bfs(g, h, k.wide, u);
    let widest = wide.iter().map(Vec::len).max().unwrap_or(0);
    ctx.at_most("nd.reduce.wide_frontier", widest as f64, k.frontier_size);
    let mut active = vec![true; n];
    let mut h_cur = h.clone();
    let mut bad = vec![false; u.len()];
    let mut bad_per_round = Vec::with_capacity(k.reduce_rounds);
    // copies under the sampler gate are exempt
    let cap = k.frontier_cap.max(gate_threshold(0.1, ctx.params.gate_exponent));
    for _ in 0..k.reduce_rounds {
        let live: Vec<usize> = (0..u.len()).filter(|&i| !bad[i]).collect();
        let us: Vec<Node> = live.iter().map(|&i| u[i]).collect();
        let narrow = frontiers_of(g, &h_cur, k.narrow, &us);
        let mut lists: Vec<Vec<u32>> = Vec::with_capacity(2 * live.len());
        for (j, &i) in live.iter().enumerate() {
            lists.push(filtered(&wide[i], &active));
            lists.push(filtered(&narrow[j], &active));
        }
        let size: usize = lists.iter().map(Vec::len).sum();
        if size > ctx.params.virtual_cap {
            return Err(Error::CapExceeded { what: "frontier sampling instance", size, cap: ctx.params.virtual_cap });
        }
        let imp: Vec<f64> = lists.iter().map(|l| if l.len() as f64 >= cap { 1.0 } else { 0.0 }).collect();
        let before: Vec<usize> = lists.iter().map(Vec::len).collect();
        let (unique, merged, slot) = dedup_lists(lists, &imp);
        let inst = BipartiteInstance::from_lists(n as u64, &unique)?;
        let ground = SpanSet::from_points((0..n).filter(|&v| active[v]).map(|v| v as u64));
        let res = repeat_unchecked(&inst, &ground, &merged, 0.1, 7, ctx.params.gate_exponent);
        let counts = inst.counts(&res.v_sub);
        let after: Vec<u64> = slot.iter().map(|&i| counts[i]).collect();
        let mut newly = 0;
        for (j, &i) in live.iter().enumerate() {
            let (b1, a1) = (before[2 * j] as f64, after[2 * j] as f64);
            let (b2, a2) = (before[2 * j + 1] as f64, after[2 * j + 1] as f64);
            if (b1 >= cap && a1 > b1 * 2.0 / 3.0) || (b2 >= cap && a2 == 0.0) {
                bad[i] = true;
                newly += 1;
            }
        }
        bad_per_round.push(newly);
        ctx.at_most("nd.reduce.round_bad", newly as f64, 2.0 * live.len() as f64 / k.wide as f64);
        active = vec![false; n];
        for p in res.v_sub.points() {
            active[p as usize] = true;
            h_cur.0[p as usize] += k.bump;
        }
        let rounds = 7 * ctx.rules.rounding(0.1);
        ctx.ledger.charge("nd frontier reduction", "sampling on frontier copies", k.wide + 1, rounds);
    }
    let u_sub: Vec<Node> = u.iter().zip(&bad).filter(|(_, &b)| !b).map(|(&v, _)| v).collect();
    ctx.at_least("nd.reduce.kept", u_sub.len() as f64, 0.9 * u.len() as f64);
    let after = frontiers_of(g, &h_cur, k.narrow, &u_sub);
    let largest = after.iter().map(Vec::len).max().unwrap_or(0);
    ctx.at_most("nd.reduce.narrow_frontier", largest as f64, k.frontier_cap);
    Ok(Reduced { u_sub, h: h_cur, bad_per_round })
}

/// Selects whole clusters by rounding x = 1/(2·DEG) and keeps a node iff no
/// other selected cluster lies within distance `s`.
pub fn cluster_subsample(g: &Graph, c: &Clustering, s: usize, deg: usize, ctx: &mut Context) -> Result<Clustering> {
    let near = near_clusters(g, c, s);
    let labels = c.labels(g.n());
    let measured = c.clusters.iter().flat_map(|cl| cl.members.iter()).map(|&v| near[v].len()).max().unwrap_or(0);
    if measured > deg.max(1) {
        return Err(precondition("cluster_subsample", format!("s-hop degree {measured} exceeds DEG = {deg}")));
    }
    let k = c.clusters.len();
    let x = 1.0 / (2.0 * deg.max(1) as f64);
    let mut obj = BinaryObjective::new(k);
    for (i, cl) in c.clusters.iter().enumerate() {
        obj.utility.linear[i] = cl.members.len() as f64;
    }
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (v, lab) in labels.iter().enumerate() {
        let Some(i) = *lab else { continue };
        for &(j, _) in &near[v] {
            if j != i {
                *pairs.entry((i.min(j), i.max(j))).or_default() += 1.0;
            }
        }
    }
    obj.cost.pairs = pairs.into_iter().map(|((a, b), w)| (a, b, w)).collect();
    let p = vec![x; k];
    let chosen = match ctx.params.engine {
        Engine::Sequential => obj.round_sequential(&p),
        Engine::Colored => obj.round_colored(&p, ctx.params.defect_r, ctx.params.defect_colors)?.labels,
    };
    ctx.ledger.charge("nd cluster subsampling", "rounding on the cluster conflict graph", s as u64 + 1, ctx.rules.rounding(x));
    let mut out = Clustering::default();
    for (i, cl) in c.clusters.iter().enumerate() {
        let mut members = Vec::new();
        for &v in &cl.members {
            let keep = chosen[i] && near[v].iter().all(|&(j, _)| j == i || !chosen[j]);
            if keep {
                members.push(v);
            } else {
                out.unclustered.push(v);
            }
        }
        if !members.is_empty() {
            out.clusters.push(Cluster { center: cl.center, members });
        }
    }
    out.unclustered.extend(c.unclustered.iter().copied());
    out.unclustered.sort_unstable();
    let total = c.clustered_count() as f64;
    ctx.at_least("nd.subsample.kept", out.clustered_count() as f64, total / (8.0 * deg.max(1) as f64));
    if let Some(sep) = separation(g, &out) {
        ctx.at_least("nd.subsample.separation", sep as f64, s as f64 + 1.0);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallBoundary {
    pub clustering: Clustering,
    /// C-clustered nodes adjacent to an output cluster but outside every one.
    pub boundary: usize,
}

/// First k ≤ `reach` with |≤k+1| ≤ growth·|≤k| given per-layer counts
/// (`layer.len() ≥ reach + 2`); failing that, the k of smallest ratio.
fn growth_radius(layer: &[usize], reach: usize, growth: f64) -> usize {
    let mut upto = 0usize;
    let mut best = (f64::INFINITY, 0);
    for k in 0..=reach {
        upto += layer[k];
        if upto == 0 {
            continue;
        }
        let ratio = (upto + layer[k + 1]) as f64 / upto as f64;
        if ratio <= growth {
            return k;
        }
        if ratio < best.0 {
            best = (ratio, k);
        }
    }
    best.1
}

/// Subsamples clusters, then grows each survivor inside the C-clustered
/// nodes to the first radius k ≤ ⌊s/3⌋ with |C'_{≤k+1}| ≤ 1.1·|C'_{≤k}|,
/// or to the radius of least growth if there is none.
pub fn cluster_small_boundary(g: &Graph, c: &Clustering, s: usize, deg: usize, ctx: &mut Context) -> Result<SmallBoundary> {
    let sub = cluster_subsample(g, c, s, deg, ctx)?;
    let in_c = mask(g.n(), &c.clustered_nodes());
    let mut bfs = Bfs::new(g.n());
    let reach = s / 3;
    let mut out = Clustering::default();
    let mut boundary = 0;
    for cl in &sub.clusters {
        let order = bfs.run(g, &cl.members, Some(reach + 1)).to_vec();
        let mut layer = vec![0usize; reach + 2];
        for &v in &order {
            if in_c[v] {
                layer[bfs.dist(v).unwrap_or(0)] += 1;
            }
        }
        let k = growth_radius(&layer, reach, 1.1);
        let mut members: Vec<Node> = order.iter().copied().filter(|&v| in_c[v] && bfs.dist(v).is_some_and(|d| d <= k)).collect();
        members.sort_unstable();
        boundary += layer[k + 1];
        out.clusters.push(Cluster { center: cl.center, members });
    }
    let taken = mask(g.n(), &out.clustered_nodes());
    out.unclustered = c.clustered_nodes().into_iter().chain(c.unclustered.iter().copied()).filter(|&v| !taken[v]).collect();
    out.unclustered.sort_unstable();
    let gained = out.clustered_count() as f64;
    ctx.at_least("nd.small_boundary.kept", gained, c.clustered_count() as f64 / (16.0 * deg.max(1) as f64));
    ctx.at_most("nd.small_boundary.boundary", boundary as f64, 0.1 * gained);
    ctx.ledger.charge("nd ball growing", "cluster aggregation", reach as u64 + 1, 1);
    Ok(SmallBoundary { clustering: out, boundary })
}

/// Splits a node set into balls of strong radius at most `radius_cap`,
/// growing each from its smallest node until the next layer adds at most
/// `growth − 1` of the ball. The layer after each ball is discarded.
pub fn carve_balls(g: &Graph, set: &[Node], growth: f64, radius_cap: usize) -> (Vec<Vec<Node>>, Vec<Node>) {
    let mut left = mask(g.n(), set);
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let mut bfs = Bfs::new(g.n());
    let mut balls = Vec::new();
    let mut dropped = Vec::new();
    for &r in &sorted {
        if !left[r] {
            continue;
        }
        let order = bfs.run_within(g, &[r], Some(radius_cap + 1), |w| left[w]).to_vec();
        let mut layer = vec![0usize; radius_cap + 2];
        for &v in &order {
            layer[bfs.dist(v).unwrap_or(0)] += 1;
        }
        let rho = growth_radius(&layer, radius_cap, growth);
        let mut ball = Vec::new();
        for &v in &order {
            let d = bfs.dist(v).unwrap_or(0);
            if d <= rho {
                ball.push(v);
            } else if d == rho + 1 {
                dropped.push(v);
            } else {
                continue;
            }
            left[v] = false;
        }
        ball.sort_unstable();
        balls.push(ball);
    }
    dropped.sort_unstable();
    (balls, dropped)
}

/// Iterates the small-boundary clustering on what is left, then carves the
/// collected clusters into pieces of strong diameter ≤ c_diam·log n.
pub fn low_degree_to_half(g: &Graph, c: &Clustering, s: usize, deg: usize, ctx: &mut Context) -> Result<Clustering> {
    let n = g.n();
    let mut cur = c.clone();
    let mut collected: Vec<Cluster> = Vec::new();
    let limit = ctx.params.low_degree_factor * deg.max(1);
    for _ in 0..limit {
        if cur.clusters.is_empty() {
            break;
        }
        let before = cur.clustered_count() as f64;
        let step = cluster_small_boundary(g, &cur, s, deg, ctx)?;
        let gain = step.clustering.clustered_count();
        if gain == 0 {
            break;
        }
        ctx.at_least("nd.low_degree.gain", gain as f64, before / (16.0 * deg.max(1) as f64));
        ctx.at_most("nd.low_degree.removal", step.boundary as f64, 0.1 * gain as f64);
        let mut removed = mask(n, &step.clustering.clustered_nodes());
        for cl in &step.clustering.clusters {
            for &v in &cl.members {
                for &w in g.neighbors(v) {
                    removed[w] = true;
                }
            }
        }
        let keep: Vec<bool> = removed.iter().map(|&r| !r).collect();
        collected.extend(step.clustering.clusters);
        cur = cur.restrict(&keep);
    }
    let radius_cap = (ctx.params.c_diam * (n.max(2) as f64).log2() / 2.0).floor().max(1.0) as usize;
    let mut out = Clustering::default();
    let mut before = 0usize;
    for cl in &collected {
        before += cl.members.len();
        for comp in components(g, &cl.members) {
            let (balls, _) = carve_balls(g, &comp, 1.01, radius_cap);
            for b in balls {
                let center = cl.center.filter(|x| b.binary_search(x).is_ok()).or(Some(b[0]));
                out.clusters.push(Cluster { center, members: b });
            }
        }
    }
    let taken = mask(n, &out.clustered_nodes());
    out.unclustered = c.clustered_nodes().into_iter().chain(c.unclustered.iter().copied()).filter(|&v| !taken[v]).collect();
    out.unclustered.sort_unstable();
    let after = out.clustered_count();
    if before > 0 {
        ctx.at_least("nd.low_degree.extraction", after as f64, 0.99 * before as f64);
    }
    ctx.at_least("nd.low_degree.kept", after as f64, 0.6 * c.clustered_count() as f64);
    Ok(out)
}

/// Clusters U by the head-start partition of h and hands the restricted
/// clusters to [`low_degree_to_half`].
pub fn cluster_three(g: &Graph, h: &HeadStart, u: &[Node], k: &NdConsts, ctx: &mut Context) -> Result<Vec<Node>> {
    if u.is_empty() {
        return Ok(Vec::new());
    }
    let centers = assign_centers(g, h, 1);
    let c = clustering_from_centers(&centers, u.iter().copied());
    let s = k.s;
    let near = near_clusters(g, &c, s);
    let deg = u.iter().map(|&v| near[v].len()).max().unwrap_or(1).max(1);
    ctx.at_most("nd.cluster_three.degree", deg as f64, k.frontier_cap);
    let out = low_degree_to_half(g, &c, s, deg, ctx)?;
    let got = out.clustered_nodes();
    ctx.at_least("nd.cluster_three.kept", got.len() as f64, 0.6 * u.len() as f64);
    Ok(got)
}

/// Frontier reduction followed by [`cluster_three`].
pub fn cluster_one(g: &Graph, h: &HeadStart, u: &[Node], k: &NdConsts, ctx: &mut Context) -> Result<Vec<Node>> {
    let red = base_reduce_frontier(g, h, u, k, ctx)?;
    let got = cluster_three(g, &red.h, &red.u_sub, k, ctx)?;
    ctx.at_least("nd.cluster_one.kept", got.len() as f64, u.len() as f64 / 2.0);
    Ok(got)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseCase {
    /// `(node, color)` with colors counted from 0.
    pub colored: Vec<(Node, usize)>,
    pub colors: usize,
    pub leftover: usize,
}

/// Scales h and peels one color class per [`cluster_one`] call.
pub fn nd_base_case(g: &Graph, u: &[Node], n_u: f64, h: &HeadStart, k: &NdConsts, ctx: &mut Context) -> Result<BaseCase> {
    let hmax = u.iter().map(|&v| h.get(v)).max().unwrap_or(0);
    ctx.at_most("nd.base.headstart", hmax as f64, k.lg_n);
    let scaled = h.scaled(k.scale);
    let mut rest: Vec<Node> = u.to_vec();
    rest.sort_unstable();
    let mut colored = Vec::new();
    let mut colors = 0;
    for i in 0..k.base_rounds {
        if rest.is_empty() {
            break;
        }
        let got = cluster_one(g, &scaled, &rest, k, ctx)?;
        if got.is_empty() {
            break;
        }
        let taken = mask(g.n(), &got);
        colored.extend(got.iter().map(|&v| (v, i)));
        rest.retain(|&v| !taken[v]);
        colors = i + 1;
    }
    let bound = match ctx.params.mode {
        Mode::Paper => n_u / k.lg_n.powf(20.0),
        Mode::Desk => ctx.params.nd_delta * n_u,
    };
    ctx.at_most("nd.base.leftover", rest.len() as f64, bound);
    Ok(BaseCase { colored, colors, leftover: rest.len() })
}
