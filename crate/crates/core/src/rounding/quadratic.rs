//! Binary-label pairwise objectives written as quadratic forms.
//!
//! A carrier's label is `z ∈ {0, 1}`; a form is
//! `constant + Σ a_v z_v + Σ q_{vw} z_v z_w`. Independent Bernoulli labels
//! make the expectation the same form evaluated at the probabilities.

use crate::error::{precondition, Result};
use crate::rounding::coloring::{monochromatic_weight, weighted_defective_coloring};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Quadratic {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub pairs: Vec<(usize, usize, f64)>,
}

impl Quadratic {
    pub fn new(n: usize) -> Self {
        Quadratic { constant: 0.0, linear: vec![0.0; n], pairs: Vec::new() }
    }

    /// Value at a point of `[0,1]^n`; at a 0/1 point this is the objective.
    pub fn at(&self, x: &[f64]) -> f64 {
        self.constant
            + self.linear.iter().zip(x).map(|(a, p)| a * p).sum::<f64>()
            + self.pairs.iter().map(|&(v, w, q)| q * x[v] * x[w]).sum::<f64>()
    }

    pub fn at_labels(&self, z: &[bool]) -> f64 {
        let x: Vec<f64> = z.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        self.at(&x)
    }
}

/// A utility form and a cost form over the same carriers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BinaryObjective {
    pub utility: Quadratic,
    pub cost: Quadratic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryColored {
    pub labels: Vec<bool>,
    pub colors: usize,
    pub monochromatic_weight: f64,
    pub total_weight: f64,
}

impl BinaryObjective {
    pub fn new(n: usize) -> Self {
        BinaryObjective { utility: Quadratic::new(n), cost: Quadratic::new(n) }
    }

    pub fn carriers(&self) -> usize {
        self.utility.linear.len()
    }

    pub fn expected_net(&self, p: &[f64]) -> f64 {
        self.utility.at(p) - self.cost.at(p)
    }

    pub fn net_at(&self, z: &[bool]) -> f64 {
        self.utility.at_labels(z) - self.cost.at_labels(z)
    }

    /// Net form as linear coefficients plus a symmetric pair adjacency.
    fn net(&self) -> (Vec<f64>, Vec<Vec<(usize, f64)>>) {
        let n = self.carriers();
        let linear: Vec<f64> = (0..n).map(|v| self.utility.linear[v] - self.cost.linear[v]).collect();
        let mut adj = vec![Vec::new(); n];
        let pairs = self.utility.pairs.iter().copied().chain(self.cost.pairs.iter().map(|&(a, b, q)| (a, b, -q)));
        for (a, b, q) in pairs {
            adj[a].push((b, q));
            adj[b].push((a, q));
        }
        (linear, adj)
    }

    /// Sequential conditional expectations: z_v = 1 iff its gradient at the
    /// current partial point is positive. Never lowers the expected net.
    pub fn round_sequential(&self, p: &[f64]) -> Vec<bool> {
        let (linear, adj) = self.net();
        let mut x = p.to_vec();
        for v in 0..x.len() {
            if x[v] == 0.0 || x[v] == 1.0 {
                continue;
            }
            let g = linear[v] + adj[v].iter().map(|&(w, q)| q * x[w]).sum::<f64>();
            x[v] = if g > 0.0 { 1.0 } else { 0.0 };
        }
        x.into_iter().map(|t| t == 1.0).collect()
    }

    /// Color-class-parallel rounding; pairs inside a class count as
    /// `min(0, q)`, so the net loss is at most their total `|q|`.
    pub fn round_colored(&self, p: &[f64], r: usize, color_factor: usize) -> Result<BinaryColored> {
        let u = self.utility.at(p);
        let net = self.expected_net(p);
        if net < 0.1 * u - 1e-12 * u.abs() {
            return Err(precondition("round_colored", format!("u − c = {net} is below 0.1·u = {}", 0.1 * u)));
        }
        let (linear, adj) = self.net();
        let n = self.carriers();
        let weighted: Vec<(usize, usize, f64)> =
            self.utility.pairs.iter().chain(self.cost.pairs.iter()).map(|&(a, b, q)| (a, b, q.abs())).collect();
        let total: f64 = weighted.iter().map(|e| e.2).sum();
        let budget = 0.1 * net.max(0.0);
        let mut r_eff = r.max(1);
        if total > 0.0 {
            r_eff = if budget > 0.0 { r_eff.max((total / budget).ceil().min(n as f64 + 1.0) as usize) } else { n + 1 };
        }
        let color = weighted_defective_coloring(n, &weighted, r_eff, color_factor);
        let colors = color.iter().copied().max().map_or(0, |c| c + 1);
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); colors];
        for v in 0..n {
            classes[color[v]].push(v);
        }
        let mut x = p.to_vec();
        for class in &classes {
            let picks: Vec<(usize, f64)> = class
                .iter()
                .filter(|&&v| x[v] != 0.0 && x[v] != 1.0)
                .map(|&v| {
                    let g = linear[v]
                        + adj[v].iter().filter(|&&(w, _)| color[w] != color[v]).map(|&(w, q)| q * x[w]).sum::<f64>();
                    (v, if g > 0.0 { 1.0 } else { 0.0 })
                })
                .collect();
            for (v, b) in picks {
                x[v] = b;
            }
        }
        Ok(BinaryColored {
            labels: x.into_iter().map(|t| t == 1.0).collect(),
            colors,
            monochromatic_weight: monochromatic_weight(&weighted, &color),
            total_weight: total,
        })
    }
}
