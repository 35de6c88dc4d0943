//! Maximal independent set: head-start refinement, the base case on a
//! head-start partition, the almost-MIS recursion, the top-level driver,
//! the randomized and greedy baselines and the output verifier.

mod luby;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use luby::{
    deviation_bound, luby_derand_step, orientation, partial_round, partial_round_violation, LubyStep, Orientation,
    PartialRounding,
};

use crate::cluster::{assign_centers, badness_of, clustering_from_centers, sphere_maximizers, Cluster, Clustering, HeadStart};
use crate::error::{Error, Result};
use crate::graph::{induced_edge_count, mask, Bfs, Graph, Node};
use crate::ledger::Context;
use crate::nd::{NdConsts, Refined};
use crate::params::{lg, Mode, Params};
use crate::sampling::{sample_main, BipartiteInstance, SpanSet};

/// Scale of the head-start partition used by the base case.
pub const PARTITION_SCALE: u64 = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct MisConsts {
    pub id_bound: f64,
    pub lg_n: f64,
    pub k: u64,
    /// Copies per node in the refinement, and the badness radius.
    pub d: usize,
    pub base_threshold: f64,
    pub halvings: usize,
}

impl MisConsts {
    pub fn new(id_bound: u64, p: &Params) -> Self {
        let big_n = id_bound.max(2) as f64;
        let lg_n = lg(big_n);
        let k = if p.mis_k > 0 { p.mis_k } else { lg_n.powf(2.0 / 3.0).ceil() as u64 };
        MisConsts {
            id_bound: big_n,
            lg_n,
            k,
            d: (p.mis_radius_factor * k) as usize,
            base_threshold: big_n.powf(p.mis_base_exponent / k as f64).max(p.mis_base_floor),
            halvings: (p.luby_rounds_factor * lg_n / k as f64).ceil() as usize,
        }
    }

    /// Number of budget reductions from `b` down to the base threshold.
    pub fn depth_bound(&self, mut b: f64) -> usize {
        let mut depth = 0;
        while b > self.base_threshold {
            b = NdConsts::child_budget(b);
            depth += 1;
        }
        depth
    }
}

fn edges_in(g: &Graph, set: &[Node]) -> usize {
    induced_edge_count(g, &mask(g.n(), set))
}

/// U without `is` and the neighbors of `is`.
pub fn strip(g: &Graph, u: &[Node], is: &[Node]) -> Vec<Node> {
    let mut gone = mask(g.n(), is);
    for &v in is {
        for &w in g.neighbors(v) {
            gone[w] = true;
        }
    }
    u.iter().copied().filter(|&v| !gone[v]).collect()
}

/// An independent set inside U and what it leaves behind.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IsResult {
    pub independent_set: Vec<Node>,
    /// U \ (IS ∪ Γ(IS)), sorted.
    pub remainder: Vec<Node>,
    pub removed_edges: usize,
    pub remaining_edges: usize,
}

impl IsResult {
    fn from_set(g: &Graph, u: &[Node], mut is: Vec<Node>) -> Self {
        is.sort_unstable();
        let remainder = strip(g, u, &is);
        let remaining_edges = edges_in(g, &remainder);
        IsResult { removed_edges: edges_in(g, u) - remaining_edges, independent_set: is, remainder, remaining_edges }
    }
}

/// Doubles h and adds one on the nodes sampled against d copies of U, copy
/// d' of u seeing the h-maximizers of the sphere of radius d' around u with
/// importance |Γ(u) ∩ U|/(2d).
pub fn mis_refine_headstarts(
    g: &Graph,
    u: &[Node],
    m_u: f64,
    b: f64,
    h: &HeadStart,
    k: &MisConsts,
    ctx: &mut Context,
) -> Result<Refined> {
    let n = g.n();
    let inside = mask(n, u);
    ctx.at_most("mis.refine.headstart_input", h.max() as f64, 10.0 * k.k as f64);
    ctx.at_least("mis.refine.budget", b, k.k as f64);
    let mut bfs = Bfs::new(n);
    let mut lists: Vec<Vec<u32>> = Vec::new();
    let mut imp: Vec<f64> = Vec::new();
    let mut size = 0usize;
    for &x in u {
        let weight = g.neighbors(x).iter().filter(|&&w| inside[w]).count() as f64 / (2 * k.d) as f64;
        for sphere in sphere_maximizers(g, h, k.d, x, &mut bfs) {
            size += sphere.len();
            if size > ctx.params.virtual_cap {
                return Err(Error::CapExceeded { what: "MIS head-start refinement instance", size, cap: ctx.params.virtual_cap });
            }
            lists.push(sphere.into_iter().map(|v| v as u32).collect());
            imp.push(weight);
        }
    }
    let widest = lists.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let inst = BipartiteInstance::from_lists(n as u64, &lists)?;
    let delta_u = b.max(widest).max(ctx.params.c_min_delta);
    let imp_total = match ctx.params.mode {
        Mode::Paper => m_u,
        Mode::Desk => imp.iter().sum(),
    };
    let res = sample_main(&inst, &SpanSet::full(n as u64), &imp, imp_total, delta_u, &ctx.params)?;
    let rounds = ctx.rules.sampling(res.trace.expt_calls(), res.shape.t_inner) + 1;
    ctx.ledger.charge("mis head-start refinement", "sampling on sphere copies", k.d as u64, rounds);
    let sampled = res.mask(n);
    let h_new = HeadStart((0..n).map(|v| 2 * h.get(v) + sampled[v] as u64).collect());
    let limit = NdConsts::child_budget(b);
    let bad = badness_of(g, &h_new, k.d, u);
    let good: Vec<Node> = u.iter().zip(&bad).filter(|(_, &x)| x as f64 <= limit).map(|(&v, _)| v).collect();
    let lost = edges_in(g, u) - edges_in(g, &good);
    let bound = match ctx.params.mode {
        Mode::Paper => m_u / b.powi(3),
        Mode::Desk => ctx.params.mis_delta * m_u,
    };
    ctx.at_most("mis.refine.bad_edges", lost as f64, bound);
    ctx.at_most("mis.refine.headstart", h_new.max() as f64, 2.0 * h.max() as f64 + 1.0);
    Ok(Refined { h: h_new, good, instance_size: size })
}

/// Partitions U by head starts and runs halving rounds of derandomized
/// Luby steps until no edge is left or the round budget is spent.
pub fn mis_base_case(g: &Graph, u: &[Node], b: f64, h: &HeadStart, k: &MisConsts, ctx: &mut Context) -> Result<IsResult> {
    if u.is_empty() {
        return Ok(IsResult::default());
    }
    let centers = assign_centers(g, h, PARTITION_SCALE);
    let c = clustering_from_centers(&centers, u.iter().copied());
    let deg = luby::cluster_degrees(g, u, &c.labels(g.n()))?.into_iter().max().unwrap_or(1);
    let hmax = h.max().max(1);
    ctx.at_most("mis.base.cluster_degree", deg as f64, (2 * PARTITION_SCALE * hmax) as f64 * b.max(1.0));
    let diameter = PARTITION_SCALE * h.max();
    let edges0 = edges_in(g, u);
    let mut cur = u.to_vec();
    let mut is: Vec<Node> = Vec::new();
    for _ in 0..k.halvings {
        let start = edges_in(g, &cur);
        if start == 0 {
            break;
        }
        loop {
            let st = luby_derand_step(g, &cur, &c, deg, ctx)?;
            ctx.ledger.charge("mis base case", "cluster aggregation", diameter + 1, 1);
            if st.edges_after == st.edges_before {
                return Err(Error::Invariant(format!("a Luby step on {} edges removed none", st.edges_before)));
            }
            is.extend(st.added);
            cur = st.remainder;
            if 2 * st.edges_after <= start {
                break;
            }
        }
    }
    let left = mask(g.n(), &cur);
    is.extend(cur.iter().copied().filter(|&v| !g.neighbors(v).iter().any(|&w| left[w])));
    let res = IsResult::from_set(g, u, is);
    let bound = match ctx.params.mode {
        Mode::Paper => edges0 as f64 * k.id_bound.powf(-100.0 / k.k as f64),
        Mode::Desk => ctx.params.mis_delta * edges0 as f64,
    };
    ctx.at_most("mis.base.remaining", res.remaining_edges as f64, bound);
    Ok(res)
}

/// One node of the almost-MIS recursion trace.
#[derive(Clone, Debug, PartialEq)]
pub struct MisTraceEntry {
    pub depth: usize,
    pub b: f64,
    pub m_u: f64,
    pub size: usize,
    pub edges: usize,
    pub base: bool,
    pub is_size: usize,
    pub remaining_edges: usize,
}

/// Almost-maximal independent set of U with badness budget B.
#[allow(clippy::too_many_arguments)]
pub fn almost_mis(
    g: &Graph,
    u: &[Node],
    m_u: f64,
    b: f64,
    h: &HeadStart,
    k: &MisConsts,
    ctx: &mut Context,
    trace: &mut Vec<MisTraceEntry>,
) -> Result<IsResult> {
    almost_at(g, u, m_u, b, h, k, ctx, trace, 0)
}

#[allow(clippy::too_many_arguments)]
fn almost_at(
    g: &Graph,
    u: &[Node],
    m_u: f64,
    b: f64,
    h: &HeadStart,
    k: &MisConsts,
    ctx: &mut Context,
    trace: &mut Vec<MisTraceEntry>,
    depth: usize,
) -> Result<IsResult> {
    let edges = edges_in(g, u);
    ctx.at_least("mis.almost.edge_bound", m_u, edges as f64);
    let slot = trace.len();
    trace.push(MisTraceEntry { depth, b, m_u, size: u.len(), edges, base: false, is_size: 0, remaining_edges: 0 });
    let res = if b <= k.base_threshold {
        trace[slot].base = true;
        mis_base_case(g, u, b, h, k, ctx)?
    } else {
        let refined = mis_refine_headstarts(g, u, m_u, b, h, k, ctx)?;
        let child = NdConsts::child_budget(b);
        let first = almost_at(g, &refined.good, m_u, child, &refined.h, k, ctx, trace, depth + 1)?;
        let m2 = match ctx.params.mode {
            Mode::Paper => m_u / (child * child),
            Mode::Desk => ctx.params.mis_delta * m_u,
        };
        ctx.at_most("mis.almost.second_edges", first.remaining_edges as f64, m2);
        let second = almost_at(g, &first.remainder, m2, child, &refined.h, k, ctx, trace, depth + 1)?;
        let mut is = first.independent_set;
        is.extend(second.independent_set);
        IsResult::from_set(g, u, is)
    };
    let bound = match ctx.params.mode {
        Mode::Paper => m_u / (b * b),
        Mode::Desk => ctx.params.mis_delta * m_u,
    };
    ctx.at_most("mis.almost.remaining", res.remaining_edges as f64, bound);
    trace[slot].is_size = res.independent_set.len();
    trace[slot].remaining_edges = res.remaining_edges;
    Ok(res)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MisResult {
    /// Sorted node indices.
    pub independent_set: Vec<Node>,
    pub trace: Vec<MisTraceEntry>,
    /// Edges left by the almost-MIS recursion.
    pub almost_remaining_edges: usize,
    /// Luby steps on the singleton partition needed to clear those edges.
    pub completion_steps: usize,
    pub consts: MisConsts,
}

/// Maximal independent set: almost_mis(V, N², N, h ≡ 1), then the leftover
/// edges are cleared by Luby steps on singletons and isolated nodes join.
pub fn mis(g: &Graph, ctx: &mut Context) -> Result<MisResult> {
    let n = g.n();
    let k = MisConsts::new(g.id_bound(), &ctx.params);
    let all: Vec<Node> = (0..n).collect();
    let mut trace = Vec::new();
    let big_n = k.id_bound;
    let almost = almost_mis(g, &all, big_n * big_n, big_n, &HeadStart::constant(n, 1), &k, ctx, &mut trace)?;
    let mut is = almost.independent_set;
    let mut cur = almost.remainder;
    let mut steps = 0;
    while edges_in(g, &cur) > 0 {
        let single = Clustering {
            clusters: cur.iter().map(|&v| Cluster { center: Some(v), members: vec![v] }).collect(),
            unclustered: Vec::new(),
        };
        let left = mask(n, &cur);
        let deg = cur.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| left[w]).count()).max().unwrap_or(0) + 1;
        let st = luby_derand_step(g, &cur, &single, deg, ctx)?;
        if st.edges_after == st.edges_before {
            return Err(Error::Invariant(format!("a Luby step on {} edges removed none", st.edges_before)));
        }
        is.extend(st.added);
        cur = st.remainder;
        steps += 1;
    }
    is.extend(cur);
    is.sort_unstable();
    verify_maximal_independent(g, &is)?;
    Ok(MisResult {
        independent_set: is,
        trace,
        almost_remaining_edges: almost.remaining_edges,
        completion_steps: steps,
        consts: k,
    })
}

/// Randomized Luby: mark with probability 1/(20 deg), keep marked nodes with
/// no marked neighbor of larger (deg, id), repeat until nothing is left.
pub fn luby_randomized(g: &Graph, seed: u64) -> Vec<Node> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut marked = vec![false; n];
    let mut active: Vec<Node> = (0..n).collect();
    let mut is = Vec::new();
    while !active.is_empty() {
        for &v in &active {
            marked[v] = deg[v] == 0 || rng.random::<f64>() < 1.0 / (20.0 * deg[v] as f64);
        }
        let key = |v: Node| (deg[v], g.id(v));
        let joins: Vec<Node> = active
            .iter()
            .copied()
            .filter(|&v| marked[v] && !g.neighbors(v).iter().any(|&w| alive[w] && marked[w] && key(w) > key(v)))
            .collect();
        for &v in &active {
            marked[v] = false;
        }
        for &v in &joins {
            alive[v] = false;
            for &w in g.neighbors(v) {
                alive[w] = false;
            }
        }
        is.extend(joins);
        active.retain(|&v| alive[v]);
        for &v in &active {
            deg[v] = g.neighbors(v).iter().filter(|&&w| alive[w]).count();
        }
    }
    is.sort_unstable();
    is
}

/// Sequential greedy by ascending identifier.
pub fn greedy_mis(g: &Graph) -> Vec<Node> {
    let mut order: Vec<Node> = (0..g.n()).collect();
    order.sort_unstable_by_key(|&v| g.id(v));
    let mut blocked = vec![false; g.n()];
    let mut is = Vec::new();
    for v in order {
        if !blocked[v] {
            is.push(v);
            blocked[v] = true;
            for &w in g.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    is.sort_unstable();
    is
}

/// Errors with the first adjacent pair, or a repeated node.
pub fn verify_independent(g: &Graph, set: &[Node]) -> Result<()> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        g.check_node(v)?;
        if inside[v] {
            return Err(Error::Invariant(format!("node {} appears twice", g.id(v))));
        }
        inside[v] = true;
    }
    for &v in set {
        if let Some(&w) = g.neighbors(v).iter().find(|&&w| inside[w]) {
            return Err(Error::Invariant(format!("nodes {} and {} are adjacent", g.id(v), g.id(w))));
        }
    }
    Ok(())
}

/// Independence, then the first node neither in the set nor adjacent to it.
pub fn verify_maximal_independent(g: &Graph, set: &[Node]) -> Result<()> {
    verify_independent(g, set)?;
    let mut covered = mask(g.n(), set);
    for &v in set {
        for &w in g.neighbors(v) {
            covered[w] = true;
        }
    }
    let mut missing: Vec<Node> = (0..g.n()).filter(|&v| !covered[v]).collect();
    missing.sort_unstable_by_key(|&v| g.id(v));
    match missing.first() {
        Some(&v) => Err(Error::Invariant(format!("node {} is not dominated", g.id(v)))),
        None => Ok(()),
    }
}

/// One identifier per line, ascending.
pub fn is_to_text(g: &Graph, set: &[Node]) -> String {
    let mut ids: Vec<u64> = set.iter().map(|&v| g.id(v)).collect();
    ids.sort_unstable();
    let mut out = String::new();
    for id in ids {
        let _ = writeln!(out, "{id}");
    }
    out
}

/// Parses [`is_to_text`] output; blank lines and `#` comments are skipped.
pub fn parse_is(g: &Graph, text: &str) -> Result<Vec<Node>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let id: u64 = line.parse().map_err(|_| bad(format!("expected one node id, got {line:?}")))?;
        let v = g.index_of(id).ok_or_else(|| bad(format!("unknown node id {id}")))?;
        if seen[v] {
            return Err(Error::DuplicateId(id));
        }
        seen[v] = true;
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family, FamilySpec};

    fn ctx(g: &Graph) -> Context {
        Context::new(Params::desk(), g.id_bound())
    }

    fn fam(f: Family, seed: u64) -> Graph {
        generate(&FamilySpec::new(f, seed)).unwrap()
    }

    #[test]
    fn consts_at_desk_scale() {
        let k = MisConsts::new(5000, &Params::desk());
        assert_eq!(k.k, 6);
        assert_eq!(k.d, 60);
        assert_eq!(k.base_threshold, 256.0);
        assert_eq!(k.depth_bound(5000.0), 1);
        assert_eq!(k.depth_bound(1e6), 2);
    }

    #[test]
    fn edgeless_graph_is_everything() {
        let g = Graph::from_index_edges(100, &[]).unwrap();
        let r = mis(&g, &mut ctx(&g)).unwrap();
        assert_eq!(r.independent_set, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn clique_gives_one_node() {
        let g = fam(Family::Clique { n: 5 }, 0);
        let r = mis(&g, &mut ctx(&g)).unwrap();
        assert_eq!(r.independent_set.len(), 1);
    }

    #[test]
    fn random_graph_is_maximal() {
        let g = fam(Family::ErdosRenyi { n: 2000, p: 0.01 }, 7);
        let r = mis(&g, &mut ctx(&g)).unwrap();
        verify_maximal_independent(&g, &r.independent_set).unwrap();
        verify_maximal_independent(&g, &greedy_mis(&g)).unwrap();
        verify_maximal_independent(&g, &luby_randomized(&g, 7)).unwrap();
    }

    #[test]
    fn almost_mis_recount() {
        let g = fam(Family::ErdosRenyi { n: 1000, p: 0.01 }, 2);
        let mut c = ctx(&g);
        let k = MisConsts::new(g.id_bound(), &c.params);
        let all: Vec<Node> = (0..g.n()).collect();
        let mut trace = Vec::new();
        let m = g.m() as f64;
        let r = almost_mis(&g, &all, m, 1000.0, &HeadStart::constant(g.n(), 1), &k, &mut c, &mut trace).unwrap();
        verify_independent(&g, &r.independent_set).unwrap();
        assert_eq!(r.remainder, strip(&g, &all, &r.independent_set));
        assert!(edges_in(&g, &r.remainder) as f64 <= c.params.mis_delta * m);
        assert_eq!(trace.iter().map(|e| e.depth).max().unwrap(), k.depth_bound(1000.0));
    }

    #[test]
    fn base_threshold_branch_is_the_base_case() {
        let g = fam(Family::Grid { rows: 6, cols: 6 }, 0);
        let k = MisConsts::new(g.id_bound(), &Params::desk());
        let all: Vec<Node> = (0..g.n()).collect();
        let h = HeadStart::constant(g.n(), 1);
        let a = almost_mis(&g, &all, 100.0, 4.0, &h, &k, &mut ctx(&g), &mut Vec::new()).unwrap();
        let b = mis_base_case(&g, &all, 4.0, &h, &k, &mut ctx(&g)).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.remaining_edges, 0);
    }

    #[test]
    fn base_case_trivial_inputs() {
        let g = Graph::from_index_edges(4, &[]).unwrap();
        let k = MisConsts::new(g.id_bound(), &Params::desk());
        let h = HeadStart::zeros(4);
        assert_eq!(mis_base_case(&g, &[], 1.0, &h, &k, &mut ctx(&g)).unwrap(), IsResult::default());
        let all = mis_base_case(&g, &[0, 1, 2, 3], 1.0, &h, &k, &mut ctx(&g)).unwrap();
        assert_eq!(all.independent_set, vec![0, 1, 2, 3]);
    }

    #[test]
    fn refine_on_edgeless_and_recount() {
        let g = Graph::from_index_edges(10, &[]).unwrap();
        let mut c = ctx(&g);
        let k = MisConsts::new(g.id_bound(), &c.params);
        let u: Vec<Node> = (0..10).collect();
        let r = mis_refine_headstarts(&g, &u, 0.0, 10.0, &HeadStart::zeros(10), &k, &mut c).unwrap();
        assert_eq!(r.good, u);

        let g = fam(Family::ErdosRenyi { n: 300, p: 0.05 }, 2);
        let mut c = ctx(&g);
        let k = MisConsts::new(g.id_bound(), &c.params);
        let u: Vec<Node> = (0..g.n()).collect();
        let h = HeadStart::constant(g.n(), 1);
        let r = mis_refine_headstarts(&g, &u, g.m() as f64, 300.0, &h, &k, &mut c).unwrap();
        assert!((0..g.n()).all(|v| r.h.get(v) <= 2 * h.get(v) + 1));
        let lost = edges_in(&g, &u) - edges_in(&g, &r.good);
        assert!(lost as f64 <= c.params.mis_delta * g.m() as f64);
    }

    #[test]
    fn greedy_examples() {
        let p3 = fam(Family::Path { n: 3 }, 0);
        assert_eq!(is_to_text(&p3, &greedy_mis(&p3)), "1\n3\n");
        let star = fam(Family::Star { n: 6 }, 0);
        assert_eq!(is_to_text(&star, &greedy_mis(&star)), "1\n");
    }

    #[test]
    fn luby_baseline_small_cases() {
        let g = Graph::from_index_edges(5, &[]).unwrap();
        assert_eq!(luby_randomized(&g, 1).len(), 5);
        let k3 = fam(Family::Clique { n: 3 }, 0);
        assert_eq!(luby_randomized(&k3, 1).len(), 1);
        assert_eq!(luby_randomized(&k3, 4), luby_randomized(&k3, 4));
    }

    #[test]
    fn verifier_names_counterexamples() {
        let p3 = fam(Family::Path { n: 3 }, 0);
        let err = verify_maximal_independent(&p3, &[0, 1]).unwrap_err();
        assert_eq!(err.to_string(), "invariant violated: nodes 1 and 2 are adjacent");
        let err = verify_maximal_independent(&p3, &[0]).unwrap_err();
        assert_eq!(err.to_string(), "invariant violated: node 3 is not dominated");
    }

    #[test]
    fn text_round_trip() {
        let g = fam(Family::Cycle { n: 8 }, 0);
        let set = vec![0, 2, 5];
        assert_eq!(parse_is(&g, &is_to_text(&g, &set)).unwrap(), set);
        assert!(parse_is(&g, "1\n1\n").is_err());
        assert!(parse_is(&g, "42\n").is_err());
        assert!(parse_is(&g, "1 2\n").is_err());
    }
}
