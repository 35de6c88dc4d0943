//! Undirected simple graphs.
//!
//! Nodes are dense indices `0..n` ordered by identifier, so comparing
//! indices is the same as comparing identifiers. Every tie-break in the
//! crate ("smallest identifier") relies on this.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Node = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<u64>,
    offsets: Vec<usize>,
    targets: Vec<Node>,
    id_bound: u64,
}

impl Graph {
    /// Builds a graph on `ids` (any order, distinct, positive) with the given
    /// edges between identifiers. Edges are symmetrized and deduplicated.
    pub fn from_id_edges(ids: &[u64], edges: &[(u64, u64)], id_bound: Option<u64>) -> Result<Self> {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateId(w[0]));
            }
        }
        if let Some(&first) = sorted.first() {
            if first == 0 {
                return Err(Error::InvalidParams("node id 0 is not allowed".into()));
            }
        }
        let max_id = sorted.last().copied().unwrap_or(0);
        let bound = id_bound.unwrap_or(max_id);
        if max_id > bound {
            return Err(Error::IdOutOfRange { id: max_id, bound });
        }
        let index = |id: u64| -> Result<Node> {
            sorted
                .binary_search(&id)
                .map_err(|_| Error::InvalidParams(format!("edge endpoint {id} is not a declared node")))
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidParams(format!("self-loop on node {a}")));
            }
            pairs.push((index(a)?, index(b)?));
        }
        let mut g = Self::from_index_edges(sorted.len(), &pairs)?;
        g.ids = sorted;
        g.id_bound = bound;
        Ok(g)
    }

    /// Builds a graph on nodes `0..n` with identifiers `1..=n`.
    pub fn from_index_edges(n: usize, edges: &[(Node, Node)]) -> Result<Self> {
        let mut deg = vec![0usize; n];
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::UnknownNode(a));
            }
            if b >= n {
                return Err(Error::UnknownNode(b));
            }
            if a == b {
                return Err(Error::InvalidParams(format!("self-loop on node index {a}")));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut lists: Vec<Vec<Node>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        for &(a, b) in edges {
            lists[a].push(b);
            lists[b].push(a);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            l.dedup();
            targets.extend_from_slice(&l);
            offsets.push(targets.len());
        }
        Ok(Graph { ids: (1..=n as u64).collect(), offsets, targets, id_bound: n as u64 })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn id(&self, v: Node) -> u64 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn index_of(&self, id: u64) -> Option<Node> {
        self.ids.binary_search(&id).ok()
    }

    /// The identifier-space bound N the algorithms branch on.
    pub fn id_bound(&self) -> u64 {
        self.id_bound
    }

    pub fn with_id_bound(mut self, bound: u64) -> Result<Self> {
        let max_id = self.ids.last().copied().unwrap_or(0);
        if bound < max_id || bound < self.n() as u64 {
            return Err(Error::IdOutOfRange { id: max_id.max(self.n() as u64), bound });
        }
        self.id_bound = bound;
        Ok(self)
    }

    pub fn neighbors(&self, v: Node) -> &[Node] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: Node) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: Node, b: Node) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        (0..self.n()).flat_map(move |a| self.neighbors(a).iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn check_node(&self, v: Node) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    /// Edge-list text: one "u v" per line, isolated nodes as a lone id.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes {} edges {} id-bound {}", self.n(), self.m(), self.id_bound);
        for v in 0..self.n() {
            if self.degree(v) == 0 {
                let _ = writeln!(out, "{}", self.ids[v]);
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{} {}", self.ids[a], self.ids[b]);
        }
        out
    }
}

/// Parses edge-list text. Lines hold "u v"; a line with a single id declares
/// a node (so isolated nodes survive a round trip); `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() > 2 {
            return Err(Error::Parse { line, msg: format!("expected \"u v\", found {} fields", fields.len()) });
        }
        let mut parsed = Vec::with_capacity(2);
        for f in &fields {
            let x: i64 = f.parse().map_err(|_| Error::Parse { line, msg: format!("not an integer: {f:?}") })?;
            if x <= 0 {
                return Err(Error::NonPositiveId { line });
            }
            parsed.push(x as u64);
        }
        if parsed.len() == 2 {
            if parsed[0] == parsed[1] {
                return Err(Error::SelfLoop { line, id: parsed[0] });
            }
            edges.push((parsed[0], parsed[1]));
        }
        ids.extend_from_slice(&parsed);
    }
    ids.sort_unstable();
    ids.dedup();
    Graph::from_id_edges(&ids, &edges, None)
}

pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    parse_edge_list(&text)
}

/// Reusable breadth-first search buffers.
///
/// `run` returns the visited nodes in nondecreasing distance order; the
/// distances stay readable through [`Bfs::dist`] until the next run.
pub struct Bfs {
    dist: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    order: Vec<Node>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs { dist: vec![0; n], stamp: vec![0; n], epoch: 0, order: Vec::new() }
    }

    pub fn run(&mut self, g: &Graph, sources: &[Node], radius: Option<usize>) -> &[Node] {
        self.run_within(g, sources, radius, |_| true)
    }

    /// BFS in the subgraph induced by nodes accepted by `allowed`.
    /// Sources are always visited.
    pub fn run_within<F: Fn(Node) -> bool>(&mut self, g: &Graph, sources: &[Node], radius: Option<usize>, allowed: F) -> &[Node] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.order.clear();
        for &s in sources {
            if self.stamp[s] != self.epoch {
                self.stamp[s] = self.epoch;
                self.dist[s] = 0;
                self.order.push(s);
            }
        }
        let limit = radius.map(|r| r as u32).unwrap_or(u32::MAX);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let dv = self.dist[v];
            if dv >= limit {
                continue;
            }
            for &w in g.neighbors(v) {
                if self.stamp[w] != self.epoch && allowed(w) {
                    self.stamp[w] = self.epoch;
                    self.dist[w] = dv + 1;
                    self.order.push(w);
                }
            }
        }
        &self.order
    }

    pub fn dist(&self, v: Node) -> Option<usize> {
        (self.stamp[v] == self.epoch).then(|| self.dist[v] as usize)
    }

    pub fn visited(&self) -> &[Node] {
        &self.order
    }
}

/// Exact hop distances from `sources`, truncated at `radius`; `None` marks
/// nodes that are unreachable or farther than the radius.
pub fn bfs_distances(g: &Graph, sources: &[Node], radius: Option<usize>) -> Result<Vec<Option<usize>>> {
    for &s in sources {
        g.check_node(s)?;
    }
    let mut bfs = Bfs::new(g.n());
    bfs.run(g, sources, radius);
    Ok((0..g.n()).map(|v| bfs.dist(v)).collect())
}

/// Connected components of `G[set]`, each sorted, ordered by smallest node.
pub fn components(g: &Graph, set: &[Node]) -> Vec<Vec<Node>> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    let mut seen = vec![false; g.n()];
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for &s in &sorted {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &w in g.neighbors(v) {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Strong diameter of every component of `G[set]`, in [`components`] order.
pub fn component_diameter(g: &Graph, set: &[Node]) -> Vec<usize> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    let mut bfs = Bfs::new(g.n());
    components(g, set)
        .iter()
        .map(|comp| {
            let mut best = 0;
            for &v in comp {
                bfs.run_within(g, &[v], None, |w| inside[w]);
                let ecc = bfs.visited().last().and_then(|&w| bfs.dist(w)).unwrap_or(0);
                best = best.max(ecc);
            }
            best
        })
        .collect()
}

/// Number of edges of `G[set]` given as a membership mask.
pub fn induced_edge_count(g: &Graph, inside: &[bool]) -> usize {
    g.edges().filter(|&(a, b)| inside[a] && inside[b]).count()
}

pub fn mask(n: usize, set: &[Node]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

pub fn members(mask: &[bool]) -> Vec<Node> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_index_edges(n, &e).unwrap()
    }

    #[test]
    fn parse_path_and_dedup() {
        let g = parse_edge_list("1 2\n2 3").unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        let g = parse_edge_list("2 1\n1 2\n").unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(parse_edge_list("1 2\n3 3").unwrap_err(), Error::SelfLoop { line: 2, id: 3 });
        assert_eq!(parse_edge_list("# c\n0 1").unwrap_err(), Error::NonPositiveId { line: 2 });
        assert!(matches!(parse_edge_list("1 x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("1 2 3"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn sparse_ids_keep_order_and_bound() {
        let g = parse_edge_list("40 7\n7 19\n# trailing\n100").unwrap();
        assert_eq!(g.ids(), &[7, 19, 40, 100]);
        assert_eq!(g.id_bound(), 100);
        assert_eq!(g.degree(3), 0);
        let round = parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(round, g);
    }

    #[test]
    fn bfs_on_path_center() {
        let g = path(5);
        let d = bfs_distances(&g, &[2], None).unwrap();
        assert_eq!(d, vec![Some(2), Some(1), Some(0), Some(1), Some(2)]);
        let d = bfs_distances(&g, &[0], Some(2)).unwrap();
        assert_eq!(d[3], None);
        assert!(bfs_distances(&g, &[9], None).is_err());
    }

    #[test]
    fn diameters() {
        assert_eq!(component_diameter(&path(5), &[0, 1, 2, 3, 4]), vec![4]);
        assert_eq!(component_diameter(&path(5), &[3]), vec![0]);
        assert!(component_diameter(&path(5), &[]).is_empty());
        let cycle = Graph::from_index_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(component_diameter(&cycle, &[0, 1, 2, 3]), vec![3]);
        let two = Graph::from_index_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(component_diameter(&two, &[0, 1, 2, 3]), vec![1, 1]);
    }
}
