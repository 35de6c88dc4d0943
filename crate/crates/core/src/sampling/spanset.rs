//! Sorted sets of half-open `u64` intervals.

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanSet {
    spans: Vec<(u64, u64)>,
}

impl SpanSet {
    pub fn empty() -> Self {
        SpanSet::default()
    }

    /// `[0, n)`.
    pub fn full(n: u64) -> Self {
        SpanSet::from_spans(vec![(0, n)])
    }

    /// Normalizes arbitrary intervals: sorts, drops empty ones, merges overlaps.
    pub fn from_spans(mut spans: Vec<(u64, u64)>) -> Self {
        spans.retain(|s| s.0 < s.1);
        spans.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(spans.len());
        for (s, e) in spans {
            match out.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => out.push((s, e)),
            }
        }
        SpanSet { spans: out }
    }

    pub fn from_points(points: impl IntoIterator<Item = u64>) -> Self {
        SpanSet::from_spans(points.into_iter().map(|p| (p, p + 1)).collect())
    }

    /// Appends an interval lying at or after the current end.
    pub fn push(&mut self, s: u64, e: u64) {
        if s >= e {
            return;
        }
        match self.spans.last_mut() {
            Some(last) if s <= last.1 => {
                debug_assert!(s >= last.0);
                last.1 = last.1.max(e);
            }
            _ => self.spans.push((s, e)),
        }
    }

    pub fn spans(&self) -> &[(u64, u64)] {
        &self.spans
    }

    pub fn len(&self) -> u64 {
        self.spans.iter().map(|s| s.1 - s.0).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        let i = self.spans.partition_point(|s| s.1 <= x);
        i < self.spans.len() && self.spans[i].0 <= x
    }

    pub fn points(&self) -> impl Iterator<Item = u64> + '_ {
        self.spans.iter().flat_map(|&(s, e)| s..e)
    }

    pub fn intersect(&self, other: &SpanSet) -> SpanSet {
        let mut out = SpanSet::empty();
        let (a, b) = (&self.spans, &other.spans);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let s = a[i].0.max(b[j].0);
            let e = a[i].1.min(b[j].1);
            out.push(s, e);
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        out
    }

    pub fn intersect_len(&self, other: &SpanSet) -> u64 {
        let (a, b) = (&self.spans, &other.spans);
        let (mut i, mut j, mut total) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            let s = a[i].0.max(b[j].0);
            let e = a[i].1.min(b[j].1);
            total += e.saturating_sub(s);
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        total
    }

    pub fn union(&self, other: &SpanSet) -> SpanSet {
        SpanSet::from_spans(self.spans.iter().chain(other.spans.iter()).copied().collect())
    }

    pub fn difference(&self, other: &SpanSet) -> SpanSet {
        let mut out = SpanSet::empty();
        let mut j = 0;
        for &(s, e) in &self.spans {
            let mut cur = s;
            while j < other.spans.len() && other.spans[j].1 <= cur {
                j += 1;
            }
            let mut k = j;
            while k < other.spans.len() && other.spans[k].0 < e {
                out.push(cur, other.spans[k].0.max(cur));
                cur = cur.max(other.spans[k].1);
                k += 1;
            }
            out.push(cur, e);
        }
        out
    }

    pub fn is_subset(&self, other: &SpanSet) -> bool {
        self.intersect_len(other) == self.len()
    }
}
