//! Network decomposition: head-start refinement by sampling, the recursive
//! partial decomposition and the top-level driver.

mod chain;

use std::fmt::Write as _;

pub use chain::{
    base_reduce_frontier, carve_balls, cluster_one, cluster_small_boundary, cluster_subsample, cluster_three, frontiers_of,
    low_degree_to_half, nd_base_case, BaseCase, Reduced, SmallBoundary,
};

use crate::cluster::{badness_of, sphere_maximizers, HeadStart};
use crate::error::{Error, Result};
use crate::graph::{mask, Bfs, Graph, Node};
use crate::ledger::Context;
use crate::params::{lg, lglg, Mode, Params};
use crate::sampling::{sample_main, BipartiteInstance, SpanSet};

/// Thresholds derived from the identifier bound N and the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct NdConsts {
    pub id_bound: f64,
    pub lg_n: f64,
    pub lglg_n: f64,
    /// Sphere radius bound of the badness measure.
    pub d: usize,
    pub base_threshold: f64,
    pub scale: u64,
    pub wide: u64,
    pub narrow: u64,
    pub reduce_rounds: usize,
    pub bump: u64,
    pub frontier_cap: f64,
    pub frontier_size: f64,
    /// Separation of the small-boundary clustering.
    pub s: usize,
    pub base_rounds: usize,
}

impl NdConsts {
    pub fn new(id_bound: u64, p: &Params) -> Self {
        let big_n = id_bound.max(2) as f64;
        let lg_n = lg(big_n);
        let l = lglg(big_n);
        let up = |e: f64| l.powf(e).ceil() as u64;
        let narrow = up(p.frontier_narrow_exponent);
        NdConsts {
            id_bound: big_n,
            lg_n,
            lglg_n: l,
            d: (lg_n * l.powf(p.nd_d_exponent)).ceil() as usize,
            base_threshold: lg_n.powf(p.nd_base_exponent).max(p.nd_base_floor),
            scale: up(p.headstart_scale_exponent),
            wide: up(p.frontier_wide_exponent),
            narrow,
            reduce_rounds: up(p.reduce_rounds_exponent) as usize,
            bump: (p.bump_factor * l.powf(p.frontier_narrow_exponent)).ceil() as u64,
            frontier_cap: l.powf(p.frontier_cap_exponent),
            frontier_size: lg_n.powf(p.frontier_size_exponent),
            s: p.s_min.max(narrow as usize / 3),
            base_rounds: (p.base_color_factor * l).ceil() as usize,
        }
    }

    /// ε_B = 1/log²log B.
    pub fn eps(b: f64) -> f64 {
        1.0 / lglg(b).powi(2)
    }

    /// B^{0.5+ε_B}, the badness budget of both recursive calls.
    pub fn child_budget(b: f64) -> f64 {
        b.powf(0.5 + Self::eps(b))
    }

    /// Recursion depth allowed from `b` down to the base threshold.
    pub fn depth_bound(&self, b: f64) -> usize {
        if b <= self.base_threshold {
            return 0;
        }
        let shrink = 1.0 / (0.5 + Self::eps(self.base_threshold));
        ((lg(b) / lg(self.base_threshold)).ln() / shrink.ln()).ceil() as usize + 1
    }
}

/// C(B) = color_scale · max(1, ⌈(1 − slack/log log B) · log B⌉).
pub fn color_budget(b: f64, p: &Params) -> usize {
    let inner = ((1.0 - p.loglog_slack / lglg(b)) * lg(b)).ceil().max(1.0);
    p.color_scale as usize * inner as usize
}

/// The head-start cap (4.5 − 2·log B/log N)(1 + slack/log log B)·log N/log B.
pub fn head_start_cap(b: f64, id_bound: f64, p: &Params) -> f64 {
    let (lb, ln) = (lg(b), lg(id_bound));
    (4.5 - 2.0 * lb / ln) * (1.0 + p.loglog_slack / lglg(b)) * ln / lb
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refined {
    pub h: HeadStart,
    /// Nodes of U with bad_{h',d} ≤ B^{0.5+ε_B}, sorted.
    pub good: Vec<Node>,
    pub instance_size: usize,
}

/// Doubles h and adds one on the nodes sampled against d copies of U, copy
/// d' of u seeing the h-maximizers of the sphere of radius d' around u.
pub fn nd_refine_headstarts(g: &Graph, u: &[Node], n_u: f64, b: f64, h: &HeadStart, k: &NdConsts, ctx: &mut Context) -> Result<Refined> {
    let n = g.n();
    let mut bfs = Bfs::new(n);
    let mut lists: Vec<Vec<u32>> = Vec::new();
    let mut size = 0usize;
    for &x in u {
        for sphere in sphere_maximizers(g, h, k.d, x, &mut bfs) {
            size += sphere.len();
            if size > ctx.params.virtual_cap {
                return Err(Error::CapExceeded { what: "head-start refinement instance", size, cap: ctx.params.virtual_cap });
            }
            lists.push(sphere.into_iter().map(|v| v as u32).collect());
        }
    }
    let widest = lists.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let inst = BipartiteInstance::from_lists(n as u64, &lists)?;
    let imp = vec![1.0 / k.d as f64; lists.len()];
    let delta_u = b.max(widest).max(ctx.params.c_min_delta);
    let res = sample_main(&inst, &SpanSet::full(n as u64), &imp, n_u, delta_u, &ctx.params)?;
    let rounds = ctx.rules.sampling(res.trace.expt_calls(), res.shape.t_inner) + 1;
    ctx.ledger.charge("nd head-start refinement", "sampling on sphere copies", k.d as u64, rounds);
    let sampled = res.mask(n);
    let h_new = HeadStart((0..n).map(|v| 2 * h.get(v) + sampled[v] as u64).collect());
    let limit = NdConsts::child_budget(b);
    let bad = badness_of(g, &h_new, k.d, u);
    let good: Vec<Node> = u.iter().zip(&bad).filter(|(_, &x)| x as f64 <= limit).map(|(&v, _)| v).collect();
    let bound = match ctx.params.mode {
        Mode::Paper => n_u / b.powi(3),
        Mode::Desk => ctx.params.nd_delta * n_u,
    };
    ctx.at_most("nd.refine.bad", (u.len() - good.len()) as f64, bound);
    ctx.at_most("nd.refine.headstart", h_new.max() as f64, 2.0 * h.max() as f64 + 1.0);
    Ok(Refined { h: h_new, good, instance_size: size })
}

/// One node of the recursion trace.
#[derive(Clone, Debug, PartialEq)]
pub struct NdTraceEntry {
    pub depth: usize,
    pub b: f64,
    pub n_u: f64,
    pub size: usize,
    pub budget: usize,
    pub base: bool,
    pub colored: usize,
    pub leftover: usize,
    /// Largest color used, relative to this call.
    pub max_color: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialNd {
    pub colored: Vec<(Node, usize)>,
    pub leftover: Vec<Node>,
}

/// Recursive partial decomposition of U with badness budget B.
pub fn partial_nd(
    g: &Graph,
    u: &[Node],
    n_u: f64,
    b: f64,
    h: &HeadStart,
    k: &NdConsts,
    ctx: &mut Context,
    trace: &mut Vec<NdTraceEntry>,
) -> Result<PartialNd> {
    partial_at(g, u, n_u, b, h, k, ctx, trace, 0)
}

#[allow(clippy::too_many_arguments)]
fn partial_at(
    g: &Graph,
    u: &[Node],
    n_u: f64,
    b: f64,
    h: &HeadStart,
    k: &NdConsts,
    ctx: &mut Context,
    trace: &mut Vec<NdTraceEntry>,
    depth: usize,
) -> Result<PartialNd> {
    let budget = color_budget(b, &ctx.params);
    let hmax = u.iter().map(|&v| h.get(v)).max().unwrap_or(0);
    ctx.at_most("nd.partial.headstart", hmax as f64, head_start_cap(b, k.id_bound, &ctx.params));
    let slot = trace.len();
    trace.push(NdTraceEntry { depth, b, n_u, size: u.len(), budget, base: false, colored: 0, leftover: 0, max_color: None });
    let colored = if b <= k.base_threshold {
        trace[slot].base = true;
        nd_base_case(g, u, n_u, h, k, ctx)?.colored
    } else {
        let refined = nd_refine_headstarts(g, u, n_u, b, h, k, ctx)?;
        let child = NdConsts::child_budget(b);
        let first = partial_at(g, &refined.good, n_u, child, &refined.h, k, ctx, trace, depth + 1)?;
        let taken = mask(g.n(), &first.colored.iter().map(|&(v, _)| v).collect::<Vec<_>>());
        let second_u: Vec<Node> = refined.good.iter().copied().filter(|&v| !taken[v]).collect();
        let n_second = match ctx.params.mode {
            Mode::Paper => n_u / (child * child),
            Mode::Desk => ctx.params.nd_delta * n_u,
        };
        ctx.at_most("nd.partial.second_size", second_u.len() as f64, n_second.max(1.0));
        let second = partial_at(g, &second_u, n_second.max(1.0), child, &refined.h, k, ctx, trace, depth + 1)?;
        let offset = budget / 2;
        let first_max = first.colored.iter().map(|&(_, c)| c).max();
        ctx.at_most("nd.partial.child_budget", color_budget(child, &ctx.params) as f64, offset as f64);
        if let Some(m) = first_max {
            ctx.at_most("nd.partial.offset", m as f64 + 1.0, offset as f64);
        }
        let mut all = first.colored;
        all.extend(second.colored.into_iter().map(|(v, c)| (v, c + offset)));
        all
    };
    let taken = mask(g.n(), &colored.iter().map(|&(v, _)| v).collect::<Vec<_>>());
    let leftover: Vec<Node> = u.iter().copied().filter(|&v| !taken[v]).collect();
    let max_color = colored.iter().map(|&(_, c)| c).max();
    let bound = match ctx.params.mode {
        Mode::Paper => n_u / (b * b),
        Mode::Desk => ctx.params.nd_delta * n_u,
    };
    ctx.at_most("nd.partial.leftover", leftover.len() as f64, bound);
    ctx.at_most("nd.partial.colors", max_color.map_or(0.0, |c| c as f64 + 1.0), budget as f64);
    let e = &mut trace[slot];
    e.colored = colored.len();
    e.leftover = leftover.len();
    e.max_color = max_color;
    Ok(PartialNd { colored, leftover })
}

/// A (possibly partial) coloring of the nodes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Decomposition {
    pub color: Vec<Option<usize>>,
    /// The color budget C the run was held to.
    pub budget: usize,
}

impl Decomposition {
    pub fn uncolored(&self) -> Vec<Node> {
        self.color.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(v, _)| v).collect()
    }

    /// Number of distinct colors in use.
    pub fn colors_used(&self) -> usize {
        let mut c: Vec<usize> = self.color.iter().flatten().copied().collect();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn max_color(&self) -> Option<usize> {
        self.color.iter().flatten().copied().max()
    }

    /// Nodes of each color, indexed by color.
    pub fn classes(&self) -> Vec<Vec<Node>> {
        let mut out = vec![Vec::new(); self.max_color().map_or(0, |c| c + 1)];
        for (v, c) in self.color.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(v);
            }
        }
        out
    }

    /// One "id color" line per colored node, by identifier.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (v, c) in self.color.iter().enumerate() {
            if let Some(c) = c {
                let _ = writeln!(out, "{} {}", g.id(v), c);
            }
        }
        out
    }

    pub fn parse(g: &Graph, text: &str) -> Result<Self> {
        let mut color = vec![None; g.n()];
        for (i, line) in text.lines().enumerate() {
            let l = line.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let mut it = l.split_whitespace();
            let id: u64 = it.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("expected node id"))?;
            let c: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("expected color"))?;
            if it.next().is_some() {
                return Err(bad("trailing tokens"));
            }
            let v = g.index_of(id).ok_or(Error::UnknownNode(id as usize))?;
            if color[v].replace(c).is_some() {
                return Err(bad("node colored twice"));
            }
        }
        let budget = color.iter().flatten().max().map_or(0, |&c| c + 1);
        Ok(Decomposition { color, budget })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NdResult {
    pub decomposition: Decomposition,
    pub trace: Vec<NdTraceEntry>,
    /// Nodes left by the recursion and colored by the fallback carving.
    pub safety_net_nodes: usize,
    pub safety_net_colors: usize,
    pub consts: NdConsts,
}

/// Colors the nodes left by the recursion: each new color greedily carves
/// balls that at most double in their last layer; the dropped layers wait
/// for the next color.
fn safety_net(g: &Graph, rest: &[Node], first_color: usize, color: &mut [Option<usize>]) -> usize {
    let mut left = rest.to_vec();
    let mut c = first_color;
    while !left.is_empty() {
        let cap = (g.n().max(2) as f64).log2().ceil() as usize + 1;
        let (balls, dropped) = carve_balls(g, &left, 2.0, cap);
        for b in balls {
            for v in b {
                color[v] = Some(c);
            }
        }
        left = dropped;
        c += 1;
    }
    c - first_color
}

/// Full decomposition: the recursion from B = N with h ≡ 1, then the
/// fallback carving for anything left over.
pub fn network_decomposition(g: &Graph, ctx: &mut Context) -> Result<NdResult> {
    let k = NdConsts::new(g.id_bound(), &ctx.params);
    let u: Vec<Node> = (0..g.n()).collect();
    let h = HeadStart::constant(g.n(), 1);
    let b = k.id_bound;
    let worst = badness_of(g, &h, k.d, &u).into_iter().max().unwrap_or(0);
    ctx.at_most("nd.root.badness", worst as f64, b);
    let mut trace = Vec::new();
    let res = partial_nd(g, &u, b, b, &h, &k, ctx, &mut trace)?;
    let mut color = vec![None; g.n()];
    for &(v, c) in &res.colored {
        color[v] = Some(c);
    }
    let next = res.colored.iter().map(|&(_, c)| c + 1).max().unwrap_or(0);
    let safety_net_colors = safety_net(g, &res.leftover, next, &mut color);
    let depth = trace.iter().map(|e| e.depth).max().unwrap_or(0);
    ctx.at_most("nd.depth", depth as f64, k.depth_bound(b) as f64);
    let budget = color_budget(b, &ctx.params);
    Ok(NdResult {
        decomposition: Decomposition { color, budget },
        trace,
        safety_net_nodes: res.leftover.len(),
        safety_net_colors,
        consts: k,
    })
}
