//! General pairwise utility/cost instances over a finite label alphabet.

use crate::error::{precondition, Error, Result};
use crate::rounding::coloring::{monochromatic_weight, weighted_defective_coloring};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Utility,
    Cost,
    /// Utility minus cost.
    Net,
}

/// Terms of one carrier, indexed by its label.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexTerm {
    pub carrier: usize,
    pub utility: Vec<f64>,
    pub cost: Vec<f64>,
}

/// Terms of a carrier pair, indexed `la * labels + lb`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTerm {
    pub a: usize,
    pub b: usize,
    pub utility: Vec<f64>,
    pub cost: Vec<f64>,
}

fn pick(u: &[f64], c: &[f64], i: usize, which: Which) -> f64 {
    match which {
        Which::Utility => u[i],
        Which::Cost => c[i],
        Which::Net => u[i] - c[i],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundingInstance {
    pub labels: usize,
    /// Per carrier, a probability vector over the labels.
    pub fractional: Vec<Vec<f64>>,
    pub vertex_terms: Vec<VertexTerm>,
    pub edge_terms: Vec<EdgeTerm>,
}

/// Outcome of the colored engine, with its coloring diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredRounding {
    pub labels: Vec<usize>,
    pub colors: usize,
    pub monochromatic_weight: f64,
    pub total_weight: f64,
    pub defect_r: usize,
}

impl RoundingInstance {
    pub fn carriers(&self) -> usize {
        self.fractional.len()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.labels;
        if l == 0 {
            return Err(Error::InvalidParams("empty label alphabet".into()));
        }
        for (i, p) in self.fractional.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            if p.len() != l || p.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParams(format!("carrier {i} has no probability vector over {l} labels")));
            }
        }
        let n = self.carriers();
        for t in &self.vertex_terms {
            if t.carrier >= n || t.utility.len() != l || t.cost.len() != l {
                return Err(Error::InvalidParams(format!("malformed vertex term on carrier {}", t.carrier)));
            }
        }
        for t in &self.edge_terms {
            if t.a >= n || t.b >= n || t.a == t.b || t.utility.len() != l * l || t.cost.len() != l * l {
                return Err(Error::InvalidParams(format!("malformed edge term on ({}, {})", t.a, t.b)));
            }
        }
        Ok(())
    }

    /// Smallest positive fractional entry.
    pub fn lambda_min(&self) -> f64 {
        self.fractional.iter().flatten().copied().filter(|&x| x > 0.0).fold(1.0, f64::min)
    }

    pub fn expected_objective(&self, which: Which) -> f64 {
        let l = self.labels;
        let mut total = 0.0;
        for t in &self.vertex_terms {
            let p = &self.fractional[t.carrier];
            total += (0..l).map(|x| p[x] * pick(&t.utility, &t.cost, x, which)).sum::<f64>();
        }
        for t in &self.edge_terms {
            let (pa, pb) = (&self.fractional[t.a], &self.fractional[t.b]);
            for x in 0..l {
                for y in 0..l {
                    total += pa[x] * pb[y] * pick(&t.utility, &t.cost, x * l + y, which);
                }
            }
        }
        total
    }

    pub fn evaluate(&self, assignment: &[usize], which: Which) -> f64 {
        let l = self.labels;
        let v: f64 = self.vertex_terms.iter().map(|t| pick(&t.utility, &t.cost, assignment[t.carrier], which)).sum();
        let e: f64 =
            self.edge_terms.iter().map(|t| pick(&t.utility, &t.cost, assignment[t.a] * l + assignment[t.b], which)).sum();
        v + e
    }

    fn incidence(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let n = self.carriers();
        let mut vt = vec![Vec::new(); n];
        let mut et = vec![Vec::new(); n];
        for (i, t) in self.vertex_terms.iter().enumerate() {
            vt[t.carrier].push(i);
        }
        for (i, t) in self.edge_terms.iter().enumerate() {
            et[t.a].push(i);
            et[t.b].push(i);
        }
        (vt, et)
    }

    /// Net value of giving `v` label `x`, with fixed carriers at their label,
    /// unfixed ones in expectation, and `frozen` edge terms excluded.
    fn conditional(
        &self,
        v: usize,
        x: usize,
        fixed: &[Option<usize>],
        vt: &[usize],
        et: &[usize],
        frozen: &dyn Fn(usize) -> bool,
    ) -> f64 {
        let l = self.labels;
        let mut s: f64 = vt.iter().map(|&i| pick(&self.vertex_terms[i].utility, &self.vertex_terms[i].cost, x, Which::Net)).sum();
        for &i in et {
            if frozen(i) {
                continue;
            }
            let t = &self.edge_terms[i];
            let (other, mine_first) = if t.a == v { (t.b, true) } else { (t.a, false) };
            let idx = |y: usize| if mine_first { x * l + y } else { y * l + x };
            s += match fixed[other] {
                Some(y) => pick(&t.utility, &t.cost, idx(y), Which::Net),
                None => (0..l).map(|y| self.fractional[other][y] * pick(&t.utility, &t.cost, idx(y), Which::Net)).sum(),
            };
        }
        s
    }

    /// Conditional expectations, one carrier at a time in index order.
    /// The result satisfies `u(ℓ) − c(ℓ) ≥ u(λ) − c(λ)`.
    pub fn round_sequential(&self) -> Vec<usize> {
        let (vt, et) = self.incidence();
        let mut fixed: Vec<Option<usize>> = vec![None; self.carriers()];
        for v in 0..self.carriers() {
            fixed[v] = Some(self.best_label(v, &fixed, &vt[v], &et[v], &|_| false));
        }
        fixed.into_iter().map(|x| x.expect("all fixed")).collect()
    }

    fn best_label(&self, v: usize, fixed: &[Option<usize>], vt: &[usize], et: &[usize], frozen: &dyn Fn(usize) -> bool) -> usize {
        let p = &self.fractional[v];
        if let Some(x) = p.iter().position(|&q| q == 1.0) {
            return x;
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for x in 0..self.labels {
            let val = self.conditional(v, x, fixed, vt, et, frozen);
            if val > best.0 {
                best = (val, x);
            }
        }
        best.1
    }

    /// Rounds color class by color class. Edge terms inside a class count
    /// at their minimum, so the loss is bounded by the monochromatic weight.
    pub fn round_colored(&self, r: usize, color_factor: usize) -> Result<ColoredRounding> {
        let u = self.expected_objective(Which::Utility);
        let net = self.expected_objective(Which::Net);
        if net < 0.1 * u - 1e-12 * u.abs() {
            return Err(precondition("round_colored", format!("u(λ) − c(λ) = {net} is below 0.1·u(λ) = {}", 0.1 * u)));
        }
        let l = self.labels;
        let spread = |t: &EdgeTerm| {
            let vals = (0..l * l).map(|i| pick(&t.utility, &t.cost, i, Which::Net));
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            hi - lo
        };
        let weighted: Vec<(usize, usize, f64)> = self.edge_terms.iter().map(|t| (t.a, t.b, spread(t))).collect();
        let total: f64 = weighted.iter().map(|e| e.2).sum();
        let n = self.carriers();
        let budget = 0.1 * (net - 0.0).max(0.0);
        let mut r_eff = r.max(1);
        if total > 0.0 {
            r_eff = if budget > 0.0 { r_eff.max((total / budget).ceil().min(n as f64 + 1.0) as usize) } else { n + 1 };
        }
        let color = weighted_defective_coloring(n, &weighted, r_eff, color_factor);
        let colors = color.iter().copied().max().map_or(0, |c| c + 1);
        let (vt, et) = self.incidence();
        let mut fixed: Vec<Option<usize>> = vec![None; n];
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); colors];
        for v in 0..n {
            classes[color[v]].push(v);
        }
        for class in &classes {
            let frozen = |i: usize| {
                let t = &self.edge_terms[i];
                color[t.a] == color[t.b]
            };
            let picks: Vec<usize> = class.iter().map(|&v| self.best_label(v, &fixed, &vt[v], &et[v], &frozen)).collect();
            for (&v, x) in class.iter().zip(picks) {
                fixed[v] = Some(x);
            }
        }
        Ok(ColoredRounding {
            labels: fixed.into_iter().map(|x| x.expect("all fixed")).collect(),
            colors,
            monochromatic_weight: monochromatic_weight(&weighted, &color),
            total_weight: total,
            defect_r: r_eff,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_edge() -> RoundingInstance {
        RoundingInstance {
            labels: 2,
            fractional: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vertex_terms: vec![],
            edge_terms: vec![EdgeTerm { a: 0, b: 1, utility: vec![0.0, 0.0, 0.0, 1.0], cost: vec![0.0; 4] }],
        }
    }

    #[test]
    fn product_indicator_expectation() {
        let inst = product_edge();
        inst.validate().unwrap();
        assert!((inst.expected_objective(Which::Utility) - 0.25).abs() < 1e-15);
        let l = inst.round_sequential();
        assert!(inst.evaluate(&l, Which::Net) >= 0.25);
    }

    #[test]
    fn integral_vectors_are_kept() {
        let mut inst = product_edge();
        inst.fractional = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(inst.round_sequential(), vec![1, 0]);
        assert_eq!(inst.expected_objective(Which::Net), inst.evaluate(&[1, 0], Which::Net));
    }

    #[test]
    fn colored_rejects_cost_heavy() {
        let mut inst = product_edge();
        inst.edge_terms[0].cost = vec![1.0; 4];
        assert!(inst.round_colored(2, 2).is_err());
    }

    #[test]
    fn single_carrier_colored_equals_sequential() {
        let inst = RoundingInstance {
            labels: 3,
            fractional: vec![vec![0.2, 0.3, 0.5]],
            vertex_terms: vec![VertexTerm { carrier: 0, utility: vec![1.0, 3.0, 2.0], cost: vec![0.0, 0.5, 0.0] }],
            edge_terms: vec![],
        };
        assert_eq!(inst.round_colored(1, 2).unwrap().labels, inst.round_sequential());
    }
}
