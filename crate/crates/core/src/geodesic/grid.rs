//! Dijkstra on a rectangular grid graph with nonnegative weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::{total_cmp, Time};

pub(crate) const NO_EDGE: u32 = u32::MAX;

const MAX_BUCKET_WIDTH: u64 = 1 << 12;

/// Grid `[0,width] x [0,rows]` with its own dense edge numbering: horizontal
/// edges first (`r * width + x`), then vertical (`r * (width + 1) + x`).
#[derive(Debug, Clone)]
pub(crate) struct GridGraph<W> {
    pub width: usize,
    pub rows: usize,
    pub weights: Vec<W>,
    pub blocked: Vec<bool>,
}

impl<W: Time> GridGraph<W> {
    pub fn new(width: usize, rows: usize, weights: Vec<W>) -> Self {
        debug_assert_eq!(weights.len(), Self::edge_count(width, rows));
        Self { width, rows, weights, blocked: Vec::new() }
    }

    pub fn edge_count(width: usize, rows: usize) -> usize {
        (rows + 1) * width + rows * (width + 1)
    }

    pub fn num_vertices(&self) -> usize {
        (self.width + 1) * (self.rows + 1)
    }

    fn num_horizontal(&self) -> usize {
        (self.rows + 1) * self.width
    }

    pub fn vertex(&self, x: usize, r: usize) -> usize {
        r * (self.width + 1) + x
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % (self.width + 1), v / (self.width + 1))
    }

    pub fn horizontal(&self, x: usize, r: usize) -> usize {
        r * self.width + x
    }

    pub fn vertical(&self, x: usize, r: usize) -> usize {
        self.num_horizontal() + r * (self.width + 1) + x
    }

    /// `(x, r, is_vertical)` of a local edge.
    pub fn edge_coords(&self, e: usize) -> (usize, usize, bool) {
        let nh = self.num_horizontal();
        if e < nh {
            (e % self.width, e / self.width, false)
        } else {
            let j = e - nh;
            (j % (self.width + 1), j / (self.width + 1), true)
        }
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (x, r, vertical) = self.edge_coords(e);
        let u = self.vertex(x, r);
        if vertical {
            (u, self.vertex(x, r + 1))
        } else {
            (u, self.vertex(x + 1, r))
        }
    }

    pub fn block(&mut self, e: usize) {
        if self.blocked.is_empty() {
            self.blocked = vec![false; self.weights.len()];
        }
        self.blocked[e] = true;
    }

    fn open(&self, e: usize) -> bool {
        self.blocked.is_empty() || !self.blocked[e]
    }

    /// Calls `f(neighbour, edge)` for every unblocked incident edge.
    pub fn for_each_neighbour(&self, v: usize, mut f: impl FnMut(usize, usize)) {
        let (x, r) = self.coords(v);
        if x > 0 {
            let e = self.horizontal(x - 1, r);
            if self.open(e) {
                f(v - 1, e);
            }
        }
        if x < self.width {
            let e = self.horizontal(x, r);
            if self.open(e) {
                f(v + 1, e);
            }
        }
        if r > 0 {
            let e = self.vertical(x, r - 1);
            if self.open(e) {
                f(v - (self.width + 1), e);
            }
        }
        if r < self.rows {
            let e = self.vertical(x, r);
            if self.open(e) {
                f(v + self.width + 1, e);
            }
        }
    }

    /// Largest weight when every open edge has a small integer key.
    fn bucket_width(&self) -> Option<usize> {
        let mut max = 0u64;
        for (e, w) in self.weights.iter().enumerate() {
            if self.open(e) {
                max = max.max(w.bucket_key()?);
            }
        }
        (max <= MAX_BUCKET_WIDTH).then_some(max as usize)
    }

    /// Multi-source shortest paths; all sources start at distance zero.
    pub fn dijkstra(&self, sources: impl IntoIterator<Item = usize>, stop_at: Option<usize>) -> ShortestPaths<W> {
        match self.bucket_width() {
            Some(width) => self.dial(sources, stop_at, width),
            None => self.heap_dijkstra(sources, stop_at),
        }
    }

    /// Dijkstra with a circular bucket queue, for small integer weights.
    fn dial(&self, sources: impl IntoIterator<Item = usize>, stop_at: Option<usize>, width: usize) -> ShortestPaths<W> {
        let nv = self.num_vertices();
        let nb = width + 1;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nb];
        let mut dist: Vec<Option<W>> = vec![None; nv];
        let mut pred = vec![NO_EDGE; nv];
        let mut settled = vec![false; nv];
        let mut pending = 0usize;
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(W::zero());
                buckets[0].push(s as u32);
                pending += 1;
            }
        }
        let mut current = 0u64;
        while pending > 0 {
            let b = (current % nb as u64) as usize;
            while let Some(v) = buckets[b].pop() {
                pending -= 1;
                let v = v as usize;
                let d = dist[v].expect("queued vertices have distances");
                if settled[v] || d.bucket_key() != Some(current) {
                    continue;
                }
                settled[v] = true;
                if stop_at == Some(v) {
                    return ShortestPaths { dist, pred };
                }
                self.for_each_neighbour(v, |w, e| {
                    if settled[w] {
                        return;
                    }
                    let candidate = d + self.weights[e];
                    if dist[w].is_none_or(|cur| candidate < cur) {
                        dist[w] = Some(candidate);
                        pred[w] = e as u32;
                        let key = candidate.bucket_key().expect("integer weights");
                        buckets[(key % nb as u64) as usize].push(w as u32);
                        pending += 1;
                    }
                });
            }
            current += 1;
        }
        ShortestPaths { dist, pred }
    }

    fn heap_dijkstra(&self, sources: impl IntoIterator<Item = usize>, stop_at: Option<usize>) -> ShortestPaths<W> {
        let nv = self.num_vertices();
        let mut dist: Vec<Option<W>> = vec![None; nv];
        let mut pred = vec![NO_EDGE; nv];
        let mut settled = vec![false; nv];
        let mut heap = BinaryHeap::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(W::zero());
                heap.push(Entry { dist: W::zero(), vertex: s as u32 });
            }
        }
        while let Some(Entry { dist: d, vertex }) = heap.pop() {
            let v = vertex as usize;
            if settled[v] {
                continue;
            }
            settled[v] = true;
            if stop_at == Some(v) {
                break;
            }
            self.for_each_neighbour(v, |w, e| {
                if settled[w] {
                    return;
                }
                let candidate = d + self.weights[e];
                let improves = match dist[w] {
                    None => true,
                    Some(current) => candidate < current,
                };
                if improves {
                    dist[w] = Some(candidate);
                    pred[w] = e as u32;
                    heap.push(Entry { dist: candidate, vertex: w as u32 });
                }
            });
        }
        ShortestPaths { dist, pred }
    }
}

pub(crate) struct ShortestPaths<W> {
    pub dist: Vec<Option<W>>,
    pub pred: Vec<u32>,
}

impl<W: Time> ShortestPaths<W> {
    /// Local edges from a source to `target`, in walking order.
    pub fn path_to(&self, graph: &GridGraph<W>, target: usize) -> Vec<usize> {
        let mut edges = Vec::new();
        let mut v = target;
        while self.pred[v] != NO_EDGE {
            let e = self.pred[v] as usize;
            edges.push(e);
            let (a, b) = graph.endpoints(e);
            v = if a == v { b } else { a };
        }
        edges.reverse();
        edges
    }

    /// The vertex sequence matching [`Self::path_to`].
    pub fn vertices_to(&self, graph: &GridGraph<W>, target: usize) -> Vec<usize> {
        let mut vertices = vec![target];
        let mut v = target;
        while self.pred[v] != NO_EDGE {
            let (a, b) = graph.endpoints(self.pred[v] as usize);
            v = if a == v { b } else { a };
            vertices.push(v);
        }
        vertices.reverse();
        vertices
    }
}

struct Entry<W> {
    dist: W,
    vertex: u32,
}

impl<W: Time> PartialEq for Entry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: Time> Eq for Entry<W> {}

impl<W: Time> Ord for Entry<W> {
    // Reversed so the max-heap pops the smallest distance, then smallest vertex.
    fn cmp(&self, other: &Self) -> Ordering {
        total_cmp(&other.dist, &self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<W: Time> PartialOrd for Entry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
