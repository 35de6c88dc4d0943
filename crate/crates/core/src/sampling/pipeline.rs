//! Sampling with probability e^{-T}, the pipelined recursion and the main
//! sampling routine.

use crate::error::{precondition, Result};
use crate::params::{lg, lglg, Mode, Params};
use crate::sampling::once::repeat_unchecked;
use crate::sampling::instance::BipartiteInstance;
use crate::sampling::spanset::SpanSet;

/// Two-sided importances with their declared budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct Importance {
    pub low: Vec<f64>,
    pub up: Vec<f64>,
    pub low_total: f64,
    pub up_total: f64,
}

impl Importance {
    /// The same vector on both sides.
    pub fn symmetric(imp: &[f64], total: f64) -> Self {
        Importance { low: imp.to_vec(), up: imp.to_vec(), low_total: total, up_total: total }
    }

    fn mixed(&self) -> Vec<f64> {
        let part = |x: f64, t: f64| if t > 0.0 { x / t } else { 0.0 };
        self.low.iter().zip(&self.up).map(|(&l, &u)| part(l, self.low_total) + 0.2 * part(u, self.up_total)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpTResult {
    pub v_sub: SpanSet,
    pub bad: Vec<u32>,
    pub eps: f64,
    pub steps: u32,
}

/// Sampling with probability about e^{-T}: `T³` steps of repeated sampling
/// with ε = 1/T² on the mixed importance `low/IMP_low + 0.2·up/IMP_up`.
pub fn subsample_exp_t(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    imp: &Importance,
    t: u32,
    params: &Params,
) -> Result<ExpTResult> {
    if t < params.t_inner_min {
        return Err(precondition("subsample_exp_t", format!("T = {t} below the minimum {}", params.t_inner_min)));
    }
    let need = (params.c_exp * t as f64).exp();
    let deg = inst.counts(ground);
    if let Some(u) = (0..inst.u_count()).find(|&u| (deg[u] as f64) < need) {
        return Err(precondition("subsample_exp_t", format!("U-node {u} has {} < e^(c·T) = {need:.1} neighbors", deg[u])));
    }
    Ok(exp_t_unchecked(inst, ground, imp, t, params.gate_exponent))
}

fn exp_t_unchecked(inst: &BipartiteInstance, ground: &SpanSet, imp: &Importance, t: u32, gate_exponent: f64) -> ExpTResult {
    let eps = 1.0 / (t as f64 * t as f64);
    let steps = t.pow(3);
    let r = repeat_unchecked(inst, ground, &imp.mixed(), eps, steps, gate_exponent);
    ExpTResult { v_sub: r.v_sub, bad: r.bad, eps, steps }
}

/// One node of the pipelining recursion trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    pub t_outer: u32,
    pub t_rep: u32,
    /// Index of the ground set this call samples from.
    pub ground: usize,
    /// Whether this call ran the e^{-T} subsampling step.
    pub sampled: bool,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub nodes: Vec<TraceNode>,
    pub grounds: usize,
}

impl Trace {
    pub fn expt_calls(&self) -> usize {
        self.nodes.iter().filter(|n| n.sampled).count()
    }

    /// Distinct ground sets used by sampling calls.
    pub fn sampling_grounds(&self) -> usize {
        let mut g: Vec<usize> = self.nodes.iter().filter(|n| n.sampled).map(|n| n.ground).collect();
        g.sort_unstable();
        g.dedup();
        g.len()
    }

    /// Every call decreases `T_outer + T_rep` by exactly one.
    pub fn sum_decreases_by_one(&self) -> bool {
        self.nodes.iter().all(|p| {
            p.children.iter().all(|&c| self.nodes[c].t_outer + self.nodes[c].t_rep + 1 == p.t_outer + p.t_rep)
        })
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Trace, i: usize) -> usize {
            1 + t.nodes[i].children.iter().map(|&c| go(t, c)).max().unwrap_or(0)
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(self, 0)
        }
    }

    /// Nested `(T_outer, T_rep)` rendering, e.g. `(1,1)[(0,1),(1,0)]`.
    pub fn shape(&self) -> String {
        fn go(t: &Trace, i: usize, out: &mut String) {
            let n = &t.nodes[i];
            out.push_str(&format!("({},{})", n.t_outer, n.t_rep));
            if !n.children.is_empty() {
                out.push('[');
                for (k, &c) in n.children.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    go(t, c, out);
                }
                out.push(']');
            }
        }
        let mut s = String::new();
        if !self.nodes.is_empty() {
            go(self, 0, &mut s);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineResult {
    pub v_sub: SpanSet,
    pub bad: Vec<u32>,
    pub u_bad: Vec<bool>,
    pub trace: Trace,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineShape {
    pub t_inner: u32,
    pub t_outer: u32,
    pub t_rep: u32,
}

/// U-nodes exempt from sampling: fewer than e^{c·T_inner} neighbors.
fn active_mask(inst: &BipartiteInstance, t_inner: u32, c_exp: f64) -> Vec<bool> {
    let need = (c_exp * t_inner as f64).exp();
    inst.degrees().iter().map(|&d| d as f64 >= need).collect()
}

/// The pipelined recursion: an e^{-T_inner} step on the ground set, then a
/// call that further subsamples the result and a call that samples the
/// ground set anew; the output is the union of both.
pub fn pipeline_sample(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    imp: &Importance,
    shape: PipelineShape,
    params: &Params,
) -> Result<PipelineResult> {
    if shape.t_inner < params.t_inner_min {
        return Err(precondition("pipeline_sample", format!("T_inner = {} below {}", shape.t_inner, params.t_inner_min)));
    }
    let active = active_mask(inst, shape.t_inner, params.c_exp);
    let masked = Importance {
        low: imp.low.iter().zip(&active).map(|(&x, &a)| if a { x } else { 0.0 }).collect(),
        up: imp.up.iter().zip(&active).map(|(&x, &a)| if a { x } else { 0.0 }).collect(),
        ..imp.clone()
    };
    let mut trace = Trace::default();
    let degrees = inst.counts(ground);
    let (v_sub, bad) = recurse(inst, ground, 0, &masked, shape.t_outer, shape.t_rep, shape.t_inner, params, &mut trace);
    let inside = inst.counts(&v_sub);
    let rate = (-((shape.t_inner + 1) as f64) * shape.t_outer as f64).exp();
    let floor = ((shape.t_inner + 1) as f64 * shape.t_outer as f64 + params.c_exp * shape.t_inner as f64).exp();
    let u_bad = (0..inst.u_count())
        .map(|u| degrees[u] > 0 && (inside[u] as f64) < rate * degrees[u] as f64 && degrees[u] as f64 >= floor)
        .collect();
    Ok(PipelineResult { v_sub, bad, u_bad, trace })
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    ground_id: usize,
    imp: &Importance,
    t_outer: u32,
    t_rep: u32,
    t_inner: u32,
    params: &Params,
    trace: &mut Trace,
) -> (SpanSet, Vec<u32>) {
    let me = trace.nodes.len();
    trace.grounds = trace.grounds.max(ground_id + 1);
    trace.nodes.push(TraceNode { t_outer, t_rep, ground: ground_id, sampled: false, children: Vec::new() });
    let n = inst.u_count();
    if t_outer == 0 {
        return (ground.clone(), vec![0; n]);
    }
    if t_rep == 0 {
        return (SpanSet::empty(), vec![0; n]);
    }
    trace.nodes[me].sampled = true;
    let step = exp_t_unchecked(inst, ground, imp, t_inner, params.gate_exponent);
    let v1 = step.v_sub;
    let further = Importance {
        low: imp.low.clone(),
        up: imp.up.iter().zip(&step.bad).map(|(&x, &b)| x * 2f64.powi(b as i32)).collect(),
        low_total: imp.low_total,
        up_total: 10.0 * imp.up_total,
    };
    let degrees = inst.counts(ground);
    let kept = inst.counts(&v1);
    let cut = (-((t_inner + 1) as f64)).exp();
    let anew = Importance {
        low: (0..n)
            .map(|u| {
                let starved = degrees[u] > 0 && (kept[u] as f64) < cut * degrees[u] as f64;
                if starved {
                    imp.low[u]
                } else {
                    0.0
                }
            })
            .collect(),
        up: imp.up.clone(),
        low_total: 0.9 * imp.low_total,
        up_total: imp.up_total,
    };
    let child_ground = trace.grounds;
    let next = trace.nodes.len();
    trace.nodes[me].children.push(next);
    let (v_a, bad_a) = recurse(inst, &v1, child_ground, &further, t_outer - 1, t_rep, t_inner, params, trace);
    let next = trace.nodes.len();
    trace.nodes[me].children.push(next);
    let (v_b, bad_b) = recurse(inst, ground, ground_id, &anew, t_outer, t_rep - 1, t_inner, params, trace);
    let bad = (0..n).map(|u| (step.bad[u] + bad_a[u]).max(bad_b[u])).collect();
    (v_a.union(&v_b), bad)
}

/// Parameters of the main sampling routine for a given Δ_U.
pub fn main_shape(delta_u: f64, params: &Params) -> PipelineShape {
    let t_inner = (lglg(delta_u).powf(params.t_inner_exponent).ceil() as u32).max(params.t_inner_min);
    let t_outer = (params.t_outer_factor * delta_u.max(1.0).ln() / t_inner as f64).ceil() as u32;
    let t_rep = (params.t_rep_factor * lg(delta_u)).ceil() as u32;
    PipelineShape { t_inner, t_outer, t_rep }
}

/// TR(Δ) = Δ^{0.5 + 1/log²log Δ}.
pub fn threshold(delta_u: f64) -> f64 {
    delta_u.powf(0.5 + 1.0 / lglg(delta_u).powi(2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainResult {
    pub v_sub: SpanSet,
    pub u_bad: Vec<bool>,
    pub bad: Vec<u32>,
    pub shape: PipelineShape,
    pub threshold: f64,
    pub bad_importance: f64,
    /// `IMP/Δ_U^5` in paper mode, `δ·IMP` in desk mode.
    pub bad_bound: f64,
    pub trace: Trace,
}

impl MainResult {
    pub fn holds(&self) -> bool {
        self.bad_importance <= self.bad_bound
    }

    /// Sampled V positions as a mask over `[0, n)`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for p in self.v_sub.points() {
            m[p as usize] = true;
        }
        m
    }
}

/// U^bad of the main routine: too many sampled neighbors, or none sampled
/// out of at least TR.
pub fn main_bad_set(inst: &BipartiteInstance, ground: &SpanSet, v_sub: &SpanSet, tr: f64) -> Vec<bool> {
    let deg = inst.counts(ground);
    let inside = inst.counts(v_sub);
    (0..inst.u_count()).map(|u| (deg[u] as f64 >= tr && inside[u] == 0) || inside[u] as f64 >= tr).collect()
}

pub fn sample_main(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    imp: &[f64],
    imp_total: f64,
    delta_u: f64,
    params: &Params,
) -> Result<MainResult> {
    let max_deg = inst.counts(ground).into_iter().max().unwrap_or(0) as f64;
    if delta_u < params.c_min_delta.max(max_deg) {
        return Err(precondition(
            "sample_main",
            format!("Δ_U = {delta_u} below max({}, max degree {max_deg})", params.c_min_delta),
        ));
    }
    let shape = main_shape(delta_u, params);
    let res = pipeline_sample(inst, ground, &Importance::symmetric(imp, imp_total), shape, params)?;
    let tr = threshold(delta_u);
    let u_bad = main_bad_set(inst, ground, &res.v_sub, tr);
    let bad_importance = (0..inst.u_count()).filter(|&u| u_bad[u]).map(|u| imp[u]).sum();
    let bad_bound = match params.mode {
        Mode::Paper => imp_total / delta_u.powf(params.badness_exponent),
        Mode::Desk => params.sample_delta * imp_total,
    };
    Ok(MainResult { v_sub: res.v_sub, u_bad, bad: res.bad, shape, threshold: tr, bad_importance, bad_bound, trace: res.trace })
}
