//! Ruling sets by iterated degree sparsification.

use crate::error::{precondition, Error, Result};
use crate::graph::{mask, members, Bfs, Graph, Node};
use crate::ledger::Context;
use crate::params::Mode;
use crate::sampling::{sample_main, BipartiteInstance, SpanSet};

#[derive(Clone, Debug, PartialEq)]
pub struct RulingSetResult {
    pub set: Vec<Node>,
    pub stages: usize,
    pub measured_radius: usize,
    /// Max induced degree of W at the start of every stage, then at the end.
    pub per_stage_max_degree: Vec<usize>,
    /// Sparsification stages that ran out of scheduled iterations and
    /// finished their high nodes greedily.
    pub fallbacks: usize,
}

/// Degree of every node inside the masked set; 0 outside.
pub fn induced_degrees(g: &Graph, inside: &[bool]) -> Vec<usize> {
    (0..g.n()).map(|v| if inside[v] { g.neighbors(v).iter().filter(|&&w| inside[w]).count() } else { 0 }).collect()
}

/// Exact max over all nodes of the hop distance to `set`. Errors if a node
/// cannot reach the set.
pub fn ruling_radius(g: &Graph, set: &[Node]) -> Result<usize> {
    if g.n() == 0 {
        return Ok(0);
    }
    let mut bfs = Bfs::new(g.n());
    let reached = bfs.run(g, set, None).len();
    if reached < g.n() {
        let far = (0..g.n()).find(|&v| bfs.dist(v).is_none()).expect("unreached node");
        return Err(Error::Invariant(format!("node {} has no path to the ruling set", g.id(far))));
    }
    Ok(bfs.visited().last().and_then(|&v| bfs.dist(v)).unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sparsified {
    pub w_prime: Vec<Node>,
    pub high: usize,
    pub missed: usize,
    pub missed_bound: f64,
    pub dense: usize,
}

/// One sparsification step: sample W against its high-degree nodes, then
/// drop sampled nodes with more than `Δ_W^0.9` sampled neighbors.
pub fn rs_sparsify_step(g: &Graph, w: &[Node], delta_w: f64, n_high: f64, ctx: &mut Context) -> Result<Sparsified> {
    let c = ctx.params.rs_min_degree;
    if delta_w < c {
        return Err(precondition("rs_sparsify_step", format!("Δ_W = {delta_w} below c = {c}")));
    }
    let inside = mask(g.n(), w);
    let deg = induced_degrees(g, &inside);
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    if max_deg as f64 > delta_w {
        return Err(precondition("rs_sparsify_step", format!("G[W] has degree {max_deg} above Δ_W = {delta_w}")));
    }
    let cap = delta_w.powf(0.9);
    let mut pos = vec![u64::MAX; g.n()];
    let mut order: Vec<Node> = w.to_vec();
    order.sort_unstable();
    order.dedup();
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i as u64;
    }
    let high: Vec<Node> = order.iter().copied().filter(|&v| deg[v] as f64 >= cap).collect();
    let edges: usize = high.iter().map(|&v| deg[v]).sum();
    if edges > ctx.params.virtual_cap {
        return Err(Error::CapExceeded { what: "ruling-set sampling instance", size: edges, cap: ctx.params.virtual_cap });
    }
    let lists: Vec<Vec<u64>> =
        high.iter().map(|&v| g.neighbors(v).iter().filter(|&&x| inside[x]).map(|&x| pos[x]).collect()).collect();
    let inst = BipartiteInstance::from_lists(order.len() as u64, &lists)?;
    let ground = SpanSet::full(order.len() as u64);
    let res = sample_main(&inst, &ground, &vec![1.0; high.len()], n_high, delta_w, &ctx.params)?;
    let rounds = ctx.rules.sampling(res.trace.expt_calls(), res.shape.t_inner) + 1;
    ctx.ledger.charge("ruling-set sparsification", "sampling for ruling set", 1, rounds);

    let mut sub = vec![false; g.n()];
    for p in res.v_sub.points() {
        sub[order[p as usize]] = true;
    }
    let sub_deg = induced_degrees(g, &sub);
    let mut kept = sub.clone();
    let mut dense = 0;
    for &v in &order {
        if sub[v] && sub_deg[v] as f64 > cap {
            kept[v] = false;
            dense += 1;
        }
    }
    let missed = high.iter().filter(|&&v| !g.neighbors(v).iter().any(|&x| kept[x])).count();
    let missed_bound = match ctx.params.mode {
        Mode::Paper => n_high / delta_w,
        Mode::Desk => ctx.params.rs_delta * n_high,
    };
    let w_prime = members(&kept);
    let kept_max = induced_degrees(g, &kept).into_iter().max().unwrap_or(0);
    ctx.at_most("ruling.sparsify.degree", kept_max as f64, cap);
    ctx.at_most("ruling.sparsify.missed", missed as f64, missed_bound);
    Ok(Sparsified { w_prime, high: high.len(), missed, missed_bound, dense })
}

/// Maximal independent set of `G[W]` by ascending identifier.
pub fn constant_degree_mis(g: &Graph, w: &[Node], degree_cap: usize) -> Result<Vec<Node>> {
    let inside = mask(g.n(), w);
    let deg = induced_degrees(g, &inside);
    if let Some(v) = (0..g.n()).find(|&v| deg[v] > degree_cap) {
        return Err(precondition("constant_degree_mis", format!("node {} has degree {} > {degree_cap}", g.id(v), deg[v])));
    }
    Ok(greedy_within(g, &inside))
}

fn greedy_within(g: &Graph, inside: &[bool]) -> Vec<Node> {
    let mut blocked = vec![false; g.n()];
    let mut out = Vec::new();
    for v in 0..g.n() {
        if inside[v] && !blocked[v] {
            out.push(v);
            for &x in g.neighbors(v) {
                blocked[x] = true;
            }
        }
    }
    out
}

/// `⌈log_{10/9}(log Δ / log c)⌉ + 1`, the number of stages needed to bring
/// Δ down to c, plus the finishing MIS.
pub fn stage_bound(delta: f64, c: f64) -> usize {
    let ratio = delta.max(2.0).log2() / c.max(2.0).log2();
    if ratio <= 1.0 {
        1
    } else {
        ratio.log(10.0 / 9.0).ceil() as usize + 1
    }
}

/// Independent set within distance `stages` of every node.
pub fn ruling_set(g: &Graph, delta: usize, ctx: &mut Context) -> Result<RulingSetResult> {
    if g.max_degree() > delta {
        return Err(precondition("ruling_set", format!("Δ = {delta} below the max degree {}", g.max_degree())));
    }
    let c = ctx.params.rs_min_degree;
    let big_n = g.id_bound().max(2) as f64;
    let mut inside = vec![true; g.n()];
    let mut stages = 0;
    let mut fallbacks = 0;
    let mut per_stage = Vec::new();
    loop {
        let deg = induced_degrees(g, &inside);
        let d = deg.iter().copied().max().unwrap_or(0);
        per_stage.push(d);
        stages += 1;
        if d as f64 <= c {
            let w = members(&inside);
            let set = constant_degree_mis(g, &w, c as usize)?;
            ctx.ledger.charge("ruling-set finishing MIS", "constant-degree MIS", 1, ctx.rules.constant_degree_mis());
            per_stage.push(0);
            let radius = ruling_radius(g, &set)?;
            ctx.at_most("ruling.radius", radius as f64, stages as f64);
            ctx.at_most("ruling.stages", stages as f64, stage_bound(delta as f64, c) as f64);
            return Ok(RulingSetResult { set, stages, measured_radius: radius, per_stage_max_degree: per_stage, fallbacks });
        }
        let df = d as f64;
        let cap = df.powf(0.9);
        let begin = inside.clone();
        let mut w = inside.clone();
        let mut out = vec![false; g.n()];
        let iterations = (big_n.ln() / df.ln()).ceil() as usize + 1;
        for j in 0..=iterations {
            let wdeg = induced_degrees(g, &w);
            if !(0..g.n()).any(|v| w[v] && wdeg[v] as f64 >= cap) {
                break;
            }
            let chosen = if j < iterations {
                let n_high = big_n / df.powi(j as i32);
                rs_sparsify_step(g, &members(&w), df, n_high, ctx)?.w_prime
            } else {
                fallbacks += 1;
                let high: Vec<bool> = (0..g.n()).map(|v| w[v] && wdeg[v] as f64 >= cap).collect();
                greedy_within(g, &high)
            };
            for &v in &chosen {
                out[v] = true;
                w[v] = false;
                for &x in g.neighbors(v) {
                    w[x] = false;
                }
            }
        }
        for v in 0..g.n() {
            if w[v] {
                out[v] = true;
            }
        }
        let uncovered = (0..g.n()).filter(|&v| begin[v] && !out[v] && !g.neighbors(v).iter().any(|&x| out[x])).count();
        ctx.at_most(format!("ruling.stage{stages}.uncovered"), uncovered as f64, 0.0);
        let after = induced_degrees(g, &out).into_iter().max().unwrap_or(0);
        ctx.at_most(format!("ruling.stage{stages}.degree"), after as f64, cap);
        inside = out;
    }
}

/// Ruling set without a known Δ: guesses `Δ = 2^(2^i)`, and after each guess
/// removes every node within the achieved radius of the set found so far.
pub fn ruling_set_doubling(g: &Graph, ctx: &mut Context) -> Result<RulingSetResult> {
    let mut remaining = vec![true; g.n()];
    let mut set: Vec<Node> = Vec::new();
    let mut stages = 0;
    let mut fallbacks = 0;
    let mut per_stage = Vec::new();
    let mut bfs = Bfs::new(g.n());
    let mut i = 1u32;
    while remaining.iter().any(|&b| b) {
        let guess = if i >= 6 { usize::MAX } else { 1usize << (1u32 << i) };
        let deg = induced_degrees(g, &remaining);
        let low: Vec<Node> = (0..g.n()).filter(|&v| remaining[v] && deg[v] <= guess).collect();
        i += 1;
        if low.is_empty() {
            continue;
        }
        let (sub, back) = induced(g, &low)?;
        let r = ruling_set(&sub, sub.max_degree(), ctx)?;
        stages += r.stages;
        fallbacks += r.fallbacks;
        per_stage.extend(r.per_stage_max_degree);
        let found: Vec<Node> = r.set.iter().map(|&v| back[v]).collect();
        for &v in bfs.run(g, &found, Some(r.measured_radius.max(1))) {
            remaining[v] = false;
        }
        set.extend(found);
    }
    set.sort_unstable();
    let radius = ruling_radius(g, &set)?;
    Ok(RulingSetResult { set, stages, measured_radius: radius, per_stage_max_degree: per_stage, fallbacks })
}

/// `G[set]` with the original identifiers, and the map back to `g`'s nodes.
pub fn induced(g: &Graph, set: &[Node]) -> Result<(Graph, Vec<Node>)> {
    let mut nodes = set.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        for &x in g.neighbors(v) {
            if local[x] != usize::MAX && local[x] > i {
                edges.push((g.id(v), g.id(x)));
            }
        }
    }
    let ids: Vec<u64> = nodes.iter().map(|&v| g.id(v)).collect();
    Ok((Graph::from_id_edges(&ids, &edges, Some(g.id_bound()))?, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family, FamilySpec};
    use crate::params::Params;

    fn gen(f: Family, seed: u64) -> Graph {
        generate(&FamilySpec::new(f, seed)).unwrap()
    }

    fn independent(g: &Graph, set: &[Node]) -> bool {
        let m = mask(g.n(), set);
        g.edges().all(|(a, b)| !(m[a] && m[b]))
    }

    #[test]
    fn edgeless_is_one_stage() {
        let g = Graph::from_index_edges(20, &[]).unwrap();
        let mut ctx = Context::new(Params::desk(), g.id_bound());
        let r = ruling_set(&g, 0, &mut ctx).unwrap();
        assert_eq!((r.set.len(), r.stages, r.measured_radius), (20, 1, 0));
    }

    #[test]
    fn clique_gives_singleton() {
        let g = gen(Family::Clique { n: 40 }, 0);
        let mut ctx = Context::new(Params::desk(), g.id_bound());
        let r = ruling_set(&g, 39, &mut ctx).unwrap();
        assert_eq!(r.set.len(), 1);
        assert_eq!(r.measured_radius, 1);
        assert!(ctx.failed_checks().is_empty(), "{:?}", ctx.failed_checks());
    }

    #[test]
    fn random_graph_contracts_per_stage() {
        let g = gen(Family::ErdosRenyi { n: 2000, p: 0.01 }, 3);
        let mut ctx = Context::new(Params::desk(), g.id_bound());
        let r = ruling_set(&g, g.max_degree(), &mut ctx).unwrap();
        assert!(independent(&g, &r.set));
        assert_eq!(r.measured_radius, ruling_radius(&g, &r.set).unwrap());
        assert!(r.measured_radius <= r.stages);
        assert!(r.stages <= stage_bound(g.max_degree() as f64, ctx.params.rs_min_degree));
        for w in r.per_stage_max_degree.windows(2) {
            if w[0] as f64 > ctx.params.rs_min_degree {
                assert!(w[1] as f64 <= (w[0] as f64).powf(0.9));
            }
        }
        assert!(ctx.failed_checks().is_empty(), "{:?}", ctx.failed_checks());
    }

    #[test]
    fn sparsify_on_dense_random_graph() {
        let g = gen(Family::ErdosRenyi { n: 500, p: 0.1 }, 1);
        let mut ctx = Context::new(Params::desk(), g.id_bound());
        let all: Vec<Node> = (0..g.n()).collect();
        let d = g.max_degree() as f64;
        let s = rs_sparsify_step(&g, &all, d, g.n() as f64, &mut ctx).unwrap();
        let kept = mask(g.n(), &s.w_prime);
        let cap = d.powf(0.9);
        assert!(induced_degrees(&g, &kept).into_iter().all(|x| x as f64 <= cap));
        let deg = induced_degrees(&g, &vec![true; g.n()]);
        let missed = (0..g.n()).filter(|&v| deg[v] as f64 >= cap && !g.neighbors(v).iter().any(|&x| kept[x])).count();
        assert_eq!(missed, s.missed);
        assert!(missed as f64 <= s.missed_bound);
    }

    #[test]
    fn sparsify_trivial_cases() {
        let g = gen(Family::Path { n: 30 }, 0);
        let mut ctx = Context::new(Params::desk(), g.id_bound());
        let all: Vec<Node> = (0..30).collect();
        let s = rs_sparsify_step(&g, &all, 32.0, 30.0, &mut ctx).unwrap();
        assert_eq!((s.high, s.w_prime.len()), (0, 30));
        let indep: Vec<Node> = (0..30).step_by(2).collect();
        let s = rs_sparsify_step(&g, &indep, 32.0, 30.0, &mut ctx).unwrap();
        assert_eq!(s.w_prime, indep);
    }

    #[test]
    fn constant_degree_mis_cases() {
        let tri = gen(Family::Clique { n: 3 }, 0);
        assert_eq!(constant_degree_mis(&tri, &[0, 1, 2], 2).unwrap().len(), 1);
        assert!(constant_degree_mis(&tri, &[0, 1, 2], 1).is_err());
        let p6 = gen(Family::Path { n: 6 }, 0);
        let all: Vec<Node> = (0..6).collect();
        let s = constant_degree_mis(&p6, &all, 2).unwrap();
        assert!(independent(&p6, &s));
        assert_eq!(ruling_radius(&p6, &s).unwrap(), 1);
        assert_eq!(constant_degree_mis(&p6, &[0, 2, 4], 2).unwrap(), vec![0, 2, 4]);
    }

    #[test]
    fn doubling_wrapper_rules() {
        let g = gen(Family::ErdosRenyi { n: 400, p: 0.05 }, 2);
        let mut ctx = Context::new(Params::desk(), g.id_bound());
        let r = ruling_set_doubling(&g, &mut ctx).unwrap();
        assert!(independent(&g, &r.set));
        assert!(r.measured_radius <= r.stages);
    }

    #[test]
    fn stage_bound_formula() {
        assert_eq!(stage_bound(8.0, 8.0), 1);
        assert_eq!(stage_bound(256.0, 16.0), (2f64.ln() / (10.0f64 / 9.0).ln()).ceil() as usize + 1);
    }
}
