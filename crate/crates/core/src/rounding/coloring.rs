//! Weighted defective coloring by greedy local recoloring.

/// Colors carriers `0..n` with at most `factor * r` colors so that the total
/// weight of monochromatic edges is at most `1/r` of the total weight.
///
/// Each sweep moves a carrier to the color class of least incident weight.
/// At a local optimum every carrier sees at most a `1/k` share of its own
/// incident weight, so the bound holds with `k = factor * r ≥ r` colors.
pub fn weighted_defective_coloring(n: usize, edges: &[(usize, usize, f64)], r: usize, factor: usize) -> Vec<usize> {
    let k = (factor.max(1) * r.max(1)).max(1);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, w) in edges {
        if a != b && w > 0.0 {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
    }
    let mut color: Vec<usize> = (0..n).map(|v| v % k).collect();
    let mut load = vec![0.0f64; k];
    loop {
        let mut moved = false;
        for v in 0..n {
            load.iter_mut().for_each(|x| *x = 0.0);
            for &(w, wt) in &adj[v] {
                load[color[w]] += wt;
            }
            let cur = load[color[v]];
            let (best, &best_load) = load
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite weights"))
                .expect("at least one color");
            if best_load < cur * (1.0 - 1e-12) {
                color[v] = best;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    color
}

/// Total weight of edges whose endpoints share a color.
pub fn monochromatic_weight(edges: &[(usize, usize, f64)], color: &[usize]) -> f64 {
    edges.iter().filter(|e| color[e.0] == color[e.1]).map(|e| e.2).sum()
}
