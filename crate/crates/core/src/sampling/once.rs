//! Sampling with probability 1 − ε, single step and repeated.

use crate::error::{precondition, Result};
use crate::sampling::instance::{choose2, BipartiteInstance};
use crate::sampling::spanset::SpanSet;

/// Smallest restricted degree at which a U-node enters the cost and can be
/// declared bad: `max(2, (1/ε)^gate_exponent)`.
pub fn gate_threshold(eps: f64, gate_exponent: f64) -> f64 {
    (1.0 / eps).powf(gate_exponent).max(2.0)
}

fn check_eps(op: &'static str, eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 0.1 {
        Ok(())
    } else {
        Err(precondition(op, format!("ε = {eps} outside (0, 0.1]")))
    }
}

/// Cost of a U-node: `imp/C(deg,2) · (C(a,2) + (1−ε)/ε · C(deg−a,2))`.
pub fn node_cost(imp: f64, degree: u64, inside: u64, eps: f64) -> f64 {
    let pairs = choose2(degree);
    if pairs == 0 {
        return 0.0;
    }
    let r = (1.0 - eps) / eps;
    imp * (choose2(inside) as f64 + r * choose2(degree - inside) as f64) / pairs as f64
}

/// Total cost of `sub` over the gated U-nodes of the ground set.
pub fn sample_cost(inst: &BipartiteInstance, ground: &SpanSet, sub: &SpanSet, imp: &[f64], eps: f64, gate_exponent: f64) -> f64 {
    let thr = gate_threshold(eps, gate_exponent);
    let deg = inst.counts(ground);
    let inside = inst.counts(sub);
    (0..inst.u_count()).filter(|&u| deg[u] as f64 >= thr).map(|u| node_cost(imp[u], deg[u], inside[u], eps)).sum()
}

/// U-nodes whose kept fraction leaves `[1−ε−ε², 1−ε+ε²]`, among those with
/// at least the gate threshold of neighbors in the ground set.
pub fn bad_nodes(inst: &BipartiteInstance, ground: &SpanSet, sub: &SpanSet, eps: f64, gate_exponent: f64) -> Vec<bool> {
    let thr = gate_threshold(eps, gate_exponent);
    let before = inst.counts(ground);
    let after = inst.counts(sub);
    (0..inst.u_count())
        .map(|u| {
            let b = before[u] as f64;
            if b < thr {
                return false;
            }
            let ratio = after[u] as f64 / b;
            ratio < 1.0 - eps - eps * eps || ratio > 1.0 - eps + eps * eps
        })
        .collect()
}

/// Derandomized sampling of the ground set with probability 1 − ε.
///
/// Carriers are fixed left to right. Carriers of one elementary piece share
/// their U-neighborhood, so the conditional cost depends only on how many of
/// them are kept; the piece takes the count minimizing that convex quadratic
/// and keeps its leftmost carriers. The cost never exceeds its expectation
/// `(1−ε)·Σ imp` over gated U-nodes.
pub fn subsample_once(inst: &BipartiteInstance, ground: &SpanSet, imp: &[f64], eps: f64, gate_exponent: f64) -> Result<SpanSet> {
    check_eps("subsample_once", eps)?;
    Ok(once_unchecked(inst, ground, imp, eps, gate_exponent))
}

pub(crate) fn once_unchecked(inst: &BipartiteInstance, ground: &SpanSet, imp: &[f64], eps: f64, gate_exponent: f64) -> SpanSet {
    once_counted(inst, ground, &inst.counts(ground), imp, eps, gate_exponent).0
}

/// One sampling step given `deg = counts(ground)`; also returns the counts
/// of the sampled set.
fn once_counted(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    deg: &[u64],
    imp: &[f64],
    eps: f64,
    gate_exponent: f64,
) -> (SpanSet, Vec<u64>) {
    let thr = gate_threshold(eps, gate_exponent);
    let pieces = inst.pieces(ground);
    // weight, kept and dropped share a slot so each covering entry touches one cache line
    let mut state: Vec<(f64, u64, u64)> = (0..inst.u_count())
        .map(|u| {
            let w = if deg[u] as f64 >= thr && imp[u] > 0.0 { imp[u] / choose2(deg[u]) as f64 } else { 0.0 };
            (w, 0, 0)
        })
        .collect();
    let r = (1.0 - eps) / eps;
    let mut removed = SpanSet::empty();
    for &(a, b, i) in &pieces {
        let k = b - a;
        let (mut alpha, mut beta) = (0.0f64, 0.0f64);
        let cover = inst.covering(i);
        for &u in cover {
            let (w, kept, dropped) = state[u as usize];
            if w == 0.0 {
                continue;
            }
            let t = (dropped + k) as f64;
            alpha += 0.5 * w * (1.0 + r);
            beta += 0.5 * w * ((2.0 * kept as f64 - 1.0) - r * (2.0 * t - 1.0));
        }
        let j = if alpha == 0.0 {
            k
        } else {
            let f = |j: u64| alpha * (j as f64) * (j as f64) + beta * j as f64;
            let star = (-beta / (2.0 * alpha)).clamp(0.0, k as f64);
            let lo = star.floor() as u64;
            let hi = (lo + 1).min(k);
            if f(hi) <= f(lo) {
                hi
            } else {
                lo
            }
        };
        removed.push(a + j, b);
        for &u in cover {
            let slot = &mut state[u as usize];
            slot.1 += j;
            slot.2 += k - j;
        }
    }
    let kept = state.into_iter().map(|s| s.1).collect();
    (ground.difference(&removed), kept)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepeatResult {
    pub v_sub: SpanSet,
    pub bad: Vec<u32>,
}

/// The degree precondition `(1/ε)^gate · (1/(1−ε−ε²))^T` of repeated sampling.
pub fn repeat_degree_bound(eps: f64, steps: u32, gate_exponent: f64) -> f64 {
    (1.0 / eps).powf(gate_exponent) * (1.0 / (1.0 - eps - eps * eps)).powi(steps as i32)
}

/// `T` rounds of [`subsample_once`]; a U-node's importance doubles after
/// every round in which it was bad.
pub fn subsample_repeat(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    imp: &[f64],
    eps: f64,
    steps: u32,
    gate_exponent: f64,
) -> Result<RepeatResult> {
    check_eps("subsample_repeat", eps)?;
    let need = repeat_degree_bound(eps, steps, gate_exponent);
    let deg = inst.counts(ground);
    if let Some(u) = (0..inst.u_count()).find(|&u| (deg[u] as f64) < need) {
        return Err(precondition("subsample_repeat", format!("U-node {u} has {} < {need:.1} neighbors", deg[u])));
    }
    Ok(repeat_unchecked(inst, ground, imp, eps, steps, gate_exponent))
}

pub(crate) fn repeat_unchecked(
    inst: &BipartiteInstance,
    ground: &SpanSet,
    imp: &[f64],
    eps: f64,
    steps: u32,
    gate_exponent: f64,
) -> RepeatResult {
    let thr = gate_threshold(eps, gate_exponent);
    let mut v = ground.clone();
    let mut bad = vec![0u32; inst.u_count()];
    let mut before = inst.counts(&v);
    for _ in 0..steps {
        let scaled: Vec<f64> = imp.iter().zip(&bad).map(|(&x, &b)| x * 2f64.powi(b as i32)).collect();
        let (next, after) = once_counted(inst, &v, &before, &scaled, eps, gate_exponent);
        for u in 0..inst.u_count() {
            let b = before[u] as f64;
            if b >= thr {
                let ratio = after[u] as f64 / b;
                if ratio < 1.0 - eps - eps * eps || ratio > 1.0 - eps + eps * eps {
                    bad[u] += 1;
                }
            }
        }
        v = next;
        before = after;
        if v.is_empty() {
            break;
        }
    }
    RepeatResult { v_sub: v, bad }
}
