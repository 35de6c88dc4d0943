//! Bipartite sampling instances over a positional V side.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sampling::spanset::SpanSet;

/// U-nodes with neighborhoods in `V = [0, v_size)`. Position `p` carries
/// identifier `p + 1`, so position order is identifier order.
///
/// The V side is cut once into elementary segments, maximal intervals on
/// which the set of covering U-nodes is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteInstance {
    v_size: u64,
    degree: Vec<u64>,
    segs: Vec<(u64, u64)>,
    cover_off: Vec<usize>,
    cover: Vec<u32>,
}

impl BipartiteInstance {
    pub fn new(v_size: u64, gamma: &[SpanSet]) -> Result<Self> {
        if gamma.len() > u32::MAX as usize {
            return Err(Error::InvalidParams("too many U-nodes".into()));
        }
        let mut events: Vec<(u64, bool, u32)> = Vec::new();
        for (u, g) in gamma.iter().enumerate() {
            for &(s, e) in g.spans() {
                if e > v_size {
                    return Err(Error::InvalidParams(format!("neighborhood of U-node {u} leaves V = [0, {v_size})")));
                }
                events.push((s, true, u as u32));
                events.push((e, false, u as u32));
            }
        }
        events.sort_unstable();
        let mut active: Vec<u32> = Vec::new();
        let mut slot = vec![usize::MAX; gamma.len()];
        let mut segs = Vec::new();
        let mut cover_off = vec![0];
        let mut cover = Vec::new();
        let mut i = 0;
        while i < events.len() {
            let x = events[i].0;
            while i < events.len() && events[i].0 == x {
                let (_, open, u) = events[i];
                if open {
                    slot[u as usize] = active.len();
                    active.push(u);
                } else {
                    let k = slot[u as usize];
                    let last = *active.last().expect("open span");
                    active.swap_remove(k);
                    if last != u {
                        slot[last as usize] = k;
                    }
                }
                i += 1;
            }
            if i < events.len() && !active.is_empty() {
                segs.push((x, events[i].0));
                let mut sorted = active.clone();
                sorted.sort_unstable();
                cover.extend(sorted);
                cover_off.push(cover.len());
            }
        }
        let degree = gamma.iter().map(SpanSet::len).collect();
        Ok(BipartiteInstance { v_size, degree, segs, cover_off, cover })
    }

    /// Neighborhoods given as position lists; built by transposition, so
    /// no event sort is needed.
    pub fn from_lists<T: Copy + Into<u64>>(v_size: u64, lists: &[Vec<T>]) -> Result<Self> {
        let n = usize::try_from(v_size).map_err(|_| Error::InvalidParams("V too large for list form".into()))?;
        let mut count = vec![0usize; n + 1];
        let mut degree = Vec::with_capacity(lists.len());
        for (u, l) in lists.iter().enumerate() {
            if l.windows(2).any(|w| w[0].into() >= w[1].into()) {
                return Err(Error::InvalidParams(format!("neighborhood of U-node {u} is not strictly increasing")));
            }
            if l.last().is_some_and(|&p| p.into() >= v_size) {
                return Err(Error::InvalidParams(format!("neighborhood of U-node {u} leaves V = [0, {v_size})")));
            }
            for &p in l {
                count[p.into() as usize + 1] += 1;
            }
            degree.push(l.len() as u64);
        }
        for p in 0..n {
            count[p + 1] += count[p];
        }
        let mut fill = count.clone();
        let mut flat = vec![0u32; count[n]];
        for (u, l) in lists.iter().enumerate() {
            for &p in l {
                let p = p.into() as usize;
                flat[fill[p]] = u as u32;
                fill[p] += 1;
            }
        }
        let mut segs: Vec<(u64, u64)> = Vec::new();
        let mut cover_off = vec![0];
        let mut cover = Vec::with_capacity(flat.len());
        for p in 0..n {
            let here = &flat[count[p]..count[p + 1]];
            if here.is_empty() {
                continue;
            }
            let extend = segs.last().is_some_and(|&(_, e)| e == p as u64) && {
                let k = cover_off.len() - 1;
                &cover[cover_off[k - 1]..cover_off[k]] == here
            };
            if extend {
                segs.last_mut().expect("segment").1 += 1;
            } else {
                segs.push((p as u64, p as u64 + 1));
                cover.extend_from_slice(here);
                cover_off.push(cover.len());
            }
        }
        Ok(BipartiteInstance { v_size, degree, segs, cover_off, cover })
    }

    pub fn u_count(&self) -> usize {
        self.degree.len()
    }

    pub fn v_size(&self) -> u64 {
        self.v_size
    }

    /// |Γ(u)|.
    pub fn degree(&self, u: usize) -> u64 {
        self.degree[u]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degree
    }

    /// Σ_u |Γ(u)| counted over elementary segments.
    pub fn edge_count(&self) -> u64 {
        self.degree.iter().sum()
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }

    pub(crate) fn covering(&self, i: usize) -> &[u32] {
        &self.cover[self.cover_off[i]..self.cover_off[i + 1]]
    }

    /// Pieces `(start, end, segment)` of the elementary segments inside `set`.
    pub(crate) fn pieces(&self, set: &SpanSet) -> Vec<(u64, u64, usize)> {
        let mut out = Vec::new();
        let spans = set.spans();
        let mut j = 0;
        for (i, &(s, e)) in self.segs.iter().enumerate() {
            while j < spans.len() && spans[j].1 <= s {
                j += 1;
            }
            let mut k = j;
            while k < spans.len() && spans[k].0 < e {
                let (a, b) = (s.max(spans[k].0), e.min(spans[k].1));
                if a < b {
                    out.push((a, b, i));
                }
                k += 1;
            }
        }
        out
    }

    /// |Γ(u) ∩ set| for every u.
    pub fn counts(&self, set: &SpanSet) -> Vec<u64> {
        let mut c = vec![0u64; self.u_count()];
        for (a, b, i) in self.pieces(set) {
            for &u in self.covering(i) {
                c[u as usize] += b - a;
            }
        }
        c
    }

    /// Γ(u) as an interval set.
    pub fn neighborhood(&self, u: usize) -> SpanSet {
        let mut out = SpanSet::empty();
        for (i, &(s, e)) in self.segs.iter().enumerate() {
            if self.covering(i).binary_search(&(u as u32)).is_ok() {
                out.push(s, e);
            }
        }
        out
    }

    /// Text dump: header lines, then one line per U-node with its spans.
    pub fn to_text(&self, imp: &[f64], imp_total: f64) -> String {
        let mut out = format!("U {}\nV {}\nIMP {}\n", self.u_count(), self.v_size, imp_total);
        for u in 0..self.u_count() {
            let _ = write!(out, "{}", imp.get(u).copied().unwrap_or(0.0));
            for &(s, e) in self.neighborhood(u).spans() {
                let _ = write!(out, " {s}-{e}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output into `(instance, imp, IMP)`.
    pub fn parse(text: &str) -> Result<(Self, Vec<f64>, f64)> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (i, l) = lines.next().ok_or(Error::Parse { line: 0, msg: format!("missing {key} header") })?;
            let rest = l.trim().strip_prefix(key).ok_or(Error::Parse { line: i + 1, msg: format!("expected {key}") })?;
            Ok((i + 1, rest.trim().to_string()))
        };
        let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (l1, u) = header("U")?;
        let (l2, v) = header("V")?;
        let (l3, imp_total) = header("IMP")?;
        let u: usize = u.parse().map_err(|_| bad(l1, "bad U count"))?;
        let v: u64 = v.parse().map_err(|_| bad(l2, "bad V size"))?;
        let imp_total: f64 = imp_total.parse().map_err(|_| bad(l3, "bad IMP"))?;
        let mut imp = Vec::with_capacity(u);
        let mut gamma = Vec::with_capacity(u);
        for (i, l) in lines {
            let mut it = l.split_whitespace();
            imp.push(it.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad(i + 1, "bad importance"))?);
            let mut spans = Vec::new();
            for tok in it {
                let (s, e) = tok.split_once('-').ok_or_else(|| bad(i + 1, "bad span"))?;
                spans.push((s.parse().map_err(|_| bad(i + 1, "bad span"))?, e.parse().map_err(|_| bad(i + 1, "bad span"))?));
            }
            gamma.push(SpanSet::from_spans(spans));
        }
        if gamma.len() != u {
            return Err(bad(0, "U count does not match the number of rows"));
        }
        Ok((Self::new(v, &gamma)?, imp, imp_total))
    }
}

/// C(a, 2) exactly.
pub fn choose2(a: u64) -> u128 {
    let a = a as u128;
    if a < 2 {
        0
    } else {
        a * (a - 1) / 2
    }
}
