//! Head starts, badness, frontiers and head-start partitions.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::graph::{component_diameter, Bfs, Graph, Node};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadStart(pub Vec<u64>);

impl HeadStart {
    pub fn zeros(n: usize) -> Self {
        HeadStart(vec![0; n])
    }

    pub fn constant(n: usize, value: u64) -> Self {
        HeadStart(vec![value; n])
    }

    pub fn get(&self, v: Node) -> u64 {
        self.0[v]
    }

    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: u64) -> Self {
        HeadStart(self.0.iter().map(|&x| x * factor).collect())
    }

    /// Text form "id value" per line.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (v, &x) in self.0.iter().enumerate() {
            let _ = writeln!(out, "{} {}", g.id(v), x);
        }
        out
    }

    pub fn parse(g: &Graph, text: &str) -> Result<Self> {
        let mut h = vec![None; g.n()];
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let mut it = content.split_whitespace();
            let id: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("expected node id"))?;
            let val: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("expected value"))?;
            if it.next().is_some() {
                return Err(bad("trailing fields"));
            }
            let v = g.index_of(id).ok_or_else(|| bad("unknown node id"))?;
            h[v] = Some(val);
        }
        h.into_iter()
            .enumerate()
            .map(|(v, x)| x.ok_or_else(|| Error::InvalidParams(format!("no head start for node {}", g.id(v)))))
            .collect::<Result<Vec<_>>>()
            .map(HeadStart)
    }
}

fn check_len(g: &Graph, h: &HeadStart) -> Result<()> {
    if h.0.len() == g.n() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("head start has {} entries for {} nodes", h.0.len(), g.n())))
    }
}

/// Per radius d' = 1..=d, the nodes of the sphere S_{d'}(u) that maximize h.
/// Radii beyond u's eccentricity are omitted.
pub fn sphere_maximizers(g: &Graph, h: &HeadStart, d: usize, u: Node, bfs: &mut Bfs) -> Vec<Vec<Node>> {
    let order = bfs.run(g, &[u], Some(d)).to_vec();
    let mut out: Vec<Vec<Node>> = Vec::new();
    let mut best = 0u64;
    for &v in &order[1..] {
        let layer = bfs.dist(v).unwrap_or(0);
        if layer > out.len() {
            out.push(Vec::new());
            best = h.get(v);
        }
        let cur = out.last_mut().expect("layer opened");
        let hv = h.get(v);
        if hv > best {
            best = hv;
            cur.clear();
        }
        if hv == best {
            cur.push(v);
        }
    }
    for s in &mut out {
        s.sort_unstable();
    }
    out
}

fn badness_with(g: &Graph, h: &HeadStart, d: usize, u: Node, bfs: &mut Bfs) -> usize {
    let order = bfs.run(g, &[u], Some(d)).to_vec();
    let mut worst = 1;
    let mut layer = 0;
    let mut best = 0u64;
    let mut count = 0usize;
    for &v in &order[1..] {
        let dv = bfs.dist(v).unwrap_or(0);
        if dv != layer {
            worst = worst.max(count);
            layer = dv;
            best = h.get(v);
            count = 0;
        }
        let hv = h.get(v);
        if hv > best {
            best = hv;
            count = 0;
        }
        if hv == best {
            count += 1;
        }
    }
    worst.max(count)
}

/// bad_{h,d}(u): the largest number of h-maximizers on a sphere of radius ≤ d.
pub fn badness(g: &Graph, h: &HeadStart, d: usize, u: Node) -> Result<usize> {
    g.check_node(u)?;
    check_len(g, h)?;
    Ok(badness_with(g, h, d, u, &mut Bfs::new(g.n())))
}

/// Badness of every node in `nodes`.
pub fn badness_of(g: &Graph, h: &HeadStart, d: usize, nodes: &[Node]) -> Vec<usize> {
    let mut bfs = Bfs::new(g.n());
    nodes.iter().map(|&u| badness_with(g, h, d, u, &mut bfs)).collect()
}

/// The s-hop frontier F_{h,s}(u), sorted.
pub fn frontier(g: &Graph, h: &HeadStart, s: u64, u: Node) -> Result<Vec<Node>> {
    g.check_node(u)?;
    check_len(g, h)?;
    Ok(frontier_with(g, h, h.max(), s, u, &mut Bfs::new(g.n())))
}

/// Frontier computation reusing BFS buffers; `hmax` must bound h.
pub fn frontier_with(g: &Graph, h: &HeadStart, hmax: u64, s: u64, u: Node, bfs: &mut Bfs) -> Vec<Node> {
    // any v with d(u,v) > hmax - h(u) + s scores above -h(u) + s ≥ min + s
    let radius = (hmax - h.get(u) + s) as usize;
    let order = bfs.run(g, &[u], Some(radius)).to_vec();
    let score = |v: Node| bfs.dist(v).unwrap_or(0) as i64 - h.get(v) as i64;
    let min = order.iter().map(|&v| score(v)).min().unwrap_or(0);
    let mut out: Vec<Node> = order.iter().copied().filter(|&v| score(v) <= min + s as i64).collect();
    out.sort_unstable();
    out
}

/// F_{h,s}(u) for every node at once, each sorted.
///
/// If v ∈ F(u) and w is the next node on a shortest u–v path, then
/// v ∈ F(w); so frontiers grow by label setting over the score
/// d(u,v) − h(v), pruned at min + s. Work is Σ_w deg(w)·|F(w)|. Fails once
/// the total frontier size exceeds `cap`.
pub fn all_frontiers(g: &Graph, h: &HeadStart, s: u64, cap: usize) -> Result<Vec<Vec<Node>>> {
    check_len(g, h)?;
    let n = g.n();
    let hmax = h.max() as i64;
    let width = (hmax + s as i64 + 1) as usize;
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); width];
    for v in 0..n {
        buckets[(hmax - h.get(v) as i64) as usize].push((v as u32, v as u32));
    }
    let mut min: Vec<Option<i64>> = vec![None; n];
    let mut out: Vec<Vec<Node>> = vec![Vec::new(); n];
    let mut settled: HashSet<u64> = HashSet::new();
    let mut total = 0usize;
    for b in 0..width {
        let key = b as i64 - hmax;
        let entries = std::mem::take(&mut buckets[b]);
        for (u, v) in entries {
            let (ui, vi) = (u as usize, v as usize);
            if let Some(m) = min[ui] {
                if key > m + s as i64 {
                    continue;
                }
            }
            if !settled.insert(((u as u64) << 32) | v as u64) {
                continue;
            }
            min[ui].get_or_insert(key);
            out[ui].push(vi);
            total += 1;
            if total > cap {
                return Err(Error::CapExceeded { what: "frontier pairs", size: total, cap });
            }
            if b + 1 < width {
                for &w in g.neighbors(ui) {
                    buckets[b + 1].push((w as u32, v));
                }
            }
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub center: Option<Node>,
    pub members: Vec<Node>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
    pub unclustered: Vec<Node>,
}

impl Clustering {
    /// Cluster index of every node, `None` if unclustered or outside.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut l = vec![None; n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in &c.members {
                l[v] = Some(i);
            }
        }
        l
    }

    pub fn clustered_count(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    pub fn clustered_nodes(&self) -> Vec<Node> {
        let mut v: Vec<Node> = self.clusters.iter().flat_map(|c| c.members.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Clusters pairwise disjoint and disjoint from the unclustered set.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for v in self.clusters.iter().flat_map(|c| c.members.iter()).chain(self.unclustered.iter()) {
            if *v >= n {
                return Err(Error::UnknownNode(*v));
            }
            if seen[*v] {
                return Err(Error::Invariant(format!("node {v} appears twice in the clustering")));
            }
            seen[*v] = true;
        }
        Ok(())
    }

    /// Keeps only members inside `keep`; empty clusters disappear.
    pub fn restrict(&self, keep: &[bool]) -> Clustering {
        Clustering {
            clusters: self
                .clusters
                .iter()
                .filter_map(|c| {
                    let members: Vec<Node> = c.members.iter().copied().filter(|&v| keep[v]).collect();
                    (!members.is_empty()).then(|| Cluster { center: c.center.filter(|&x| keep[x]), members })
                })
                .collect(),
            unclustered: self.unclustered.iter().copied().filter(|&v| keep[v]).collect(),
        }
    }
}

/// Assigns every node to the center v minimizing d(u,v) − scale·h(v),
/// ties toward the smallest identifier. Returns the center of each node.
pub fn assign_centers(g: &Graph, h: &HeadStart, scale: u64) -> Vec<Node> {
    let n = g.n();
    let mut best: Vec<(i64, Node)> = (0..n).map(|v| (-((scale * h.get(v)) as i64), v)).collect();
    let mut heap: BinaryHeap<Reverse<(i64, Node, Node)>> = (0..n).map(|v| Reverse((best[v].0, best[v].1, v))).collect();
    let mut done = vec![false; n];
    while let Some(Reverse((key, center, v))) = heap.pop() {
        if done[v] || (key, center) != best[v] {
            continue;
        }
        done[v] = true;
        for &w in g.neighbors(v) {
            let cand = (key + 1, center);
            if !done[w] && cand < best[w] {
                best[w] = cand;
                heap.push(Reverse((cand.0, cand.1, w)));
            }
        }
    }
    best.into_iter().map(|(_, c)| c).collect()
}

/// Groups nodes by center; clusters ordered by center.
pub fn clustering_from_centers(centers: &[Node], nodes: impl Iterator<Item = Node>) -> Clustering {
    let mut by_center: std::collections::BTreeMap<Node, Vec<Node>> = Default::default();
    for v in nodes {
        by_center.entry(centers[v]).or_default().push(v);
    }
    Clustering {
        clusters: by_center.into_iter().map(|(c, members)| Cluster { center: Some(c), members }).collect(),
        unclustered: Vec::new(),
    }
}

pub fn partition_from_headstarts(g: &Graph, h: &HeadStart, scale: u64) -> Result<Clustering> {
    check_len(g, h)?;
    if scale == 0 {
        return Err(Error::InvalidParams("partition scale must be at least 1".into()));
    }
    let centers = assign_centers(g, h, scale);
    Ok(clustering_from_centers(&centers, 0..g.n()))
}

/// Geometric head starts: heads before the first tail, tail probability p.
pub fn mpx_random_headstarts(g: &Graph, p: f64, seed: u64) -> Result<HeadStart> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams(format!("geometric parameter {p} outside (0,1)")));
    }
    let geo = Geometric::new(p).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(HeadStart((0..g.n()).map(|_| geo.sample(&mut rng)).collect()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusteringMetrics {
    pub max_strong_diameter: usize,
    /// Per node, the number of clusters within distance 1.
    pub cluster_degree: Vec<usize>,
    pub max_cluster_degree: usize,
    /// Minimum distance between two clusters; `None` with fewer than two.
    pub separation: Option<usize>,
}

pub fn clustering_metrics(g: &Graph, c: &Clustering) -> Result<ClusteringMetrics> {
    c.validate(g.n())?;
    let max_strong_diameter = c.clusters.iter().flat_map(|cl| component_diameter(g, &cl.members)).max().unwrap_or(0);
    let cluster_degree = s_hop_degrees(g, c, 1);
    let max_cluster_degree = cluster_degree.iter().copied().max().unwrap_or(0);
    Ok(ClusteringMetrics { max_strong_diameter, cluster_degree, max_cluster_degree, separation: separation(g, c) })
}

/// Per node, the number of clusters within distance s.
pub fn s_hop_degrees(g: &Graph, c: &Clustering, s: usize) -> Vec<usize> {
    let mut deg = vec![0usize; g.n()];
    let mut bfs = Bfs::new(g.n());
    for cl in &c.clusters {
        for &v in bfs.run(g, &cl.members, Some(s)) {
            deg[v] += 1;
        }
    }
    deg
}

/// For every node, the clusters within distance `s` as `(cluster, distance)`,
/// sorted by cluster. Work is Σ_v deg(v)·|list(v)|.
pub fn near_clusters(g: &Graph, c: &Clustering, s: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    let mut layer: Vec<(Node, usize)> = Vec::new();
    for (i, cl) in c.clusters.iter().enumerate() {
        for &v in &cl.members {
            if seen.insert((v as u32, i as u32)) {
                layer.push((v, i));
                out[v].push((i, 0));
            }
        }
    }
    for dist in 1..=s {
        let mut next = Vec::new();
        for &(v, i) in &layer {
            for &w in g.neighbors(v) {
                if seen.insert((w as u32, i as u32)) {
                    next.push((w, i));
                    out[w].push((i, dist));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    for l in &mut out {
        l.sort_unstable();
    }
    out
}

/// The s-hop degree of the clustering: max over clustered nodes.
pub fn s_hop_degree(g: &Graph, c: &Clustering, s: usize) -> usize {
    let deg = s_hop_degrees(g, c, s);
    c.clusters.iter().flat_map(|cl| cl.members.iter()).map(|&v| deg[v]).max().unwrap_or(0)
}

/// Minimum pairwise cluster distance via a labelled multi-source BFS.
pub fn separation(g: &Graph, c: &Clustering) -> Option<usize> {
    if c.clusters.len() < 2 {
        return None;
    }
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for (i, cl) in c.clusters.iter().enumerate() {
        for &v in &cl.members {
            label[v] = i;
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                label[w] = label[v];
                queue.push_back(w);
            }
        }
    }
    g.edges()
        .filter(|&(a, b)| label[a] != usize::MAX && label[b] != usize::MAX && label[a] != label[b])
        .map(|(a, b)| dist[a] + dist[b] + 1)
        .min()
}

/// Largest distance, inside the cluster, from its center to a member.
pub fn cluster_radius(g: &Graph, cl: &Cluster) -> Option<usize> {
    let center = cl.center?;
    let mut inside = vec![false; g.n()];
    for &v in &cl.members {
        inside[v] = true;
    }
    let mut bfs = Bfs::new(g.n());
    bfs.run_within(g, &[center], None, |w| inside[w]);
    cl.members.iter().map(|&v| bfs.dist(v)).try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}
