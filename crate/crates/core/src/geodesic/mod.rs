//! Exact passage-time functionals on the lattice.
//!
//! A path has vertical displacement at most `k` exactly when it fits inside
//! some strip of `k + 1` consecutive rows, so every restricted crossing time
//! (`τ(n,k)`, `T(n,k)`, the cylinder variant `τ̃(n,k)`, and `T_n = τ(n,n)`)
//! is the minimum over strips of an unconstrained multi-source /
//! multi-sink shortest path inside the strip.

mod grid;
mod problem;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeWeights, Region, Vertex};
use crate::scalar::{total_cmp, Time};

use grid::GridGraph;
pub use problem::{covering_rectangles, CrossingProblem, Strip, StripFrame, Topology};

/// Geodesic-count limit below which [`canonical_geodesic`] enumerates every
/// geodesic and returns the exact minimal* one.
pub const DEFAULT_CANONICAL_CAP: u64 = 4096;

/// A path given by its edges (environment coordinates; cylinder wrap edges
/// are the square's `(x, n-1)-(x, n)` edges) and its vertex sequence in
/// lifted coordinates, walked from left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossingPath {
    pub edges: Vec<Edge>,
    pub vertices: Vec<Vertex>,
}

impl CrossingPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges sorted by the lattice edge order (the minimal* comparison key).
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut e = self.edges.clone();
        e.sort();
        e
    }

    pub fn weight<W: Time>(&self, weights: &EdgeWeights<W>) -> Option<W> {
        self.edges.iter().try_fold(W::zero(), |acc, e| weights.at(*e).map(|w| acc + w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult<W> {
    pub value: W,
    pub path: Option<CrossingPath>,
    pub strip_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalGeodesic<W> {
    pub result: PathResult<W>,
    /// `false` when there were too many geodesics to enumerate and the
    /// deterministic (hop count, first-divergence edge order) rule was used.
    pub exact: bool,
    /// Number of distinct geodesics when `exact`; otherwise the saturating
    /// sum of per-strip counts, where a path lying in several strips counts
    /// once per strip.
    pub geodesic_count: u64,
}

/// Distances to the left and right boundary columns within one strip.
#[derive(Debug, Clone)]
pub struct PotentialField<W> {
    frame: StripFrame,
    from_left: Vec<W>,
    to_right: Vec<W>,
}

impl<W: Time> PotentialField<W> {
    pub fn strip(&self) -> Strip {
        self.frame.strip()
    }

    fn index(&self, x: usize, r: usize) -> usize {
        r * (self.frame.width() + 1) + x
    }

    /// Distance from the left column to local vertex `(x, r)`.
    pub fn dist_from_left(&self, x: usize, r: usize) -> W {
        self.from_left[self.index(x, r)]
    }

    pub fn dist_to_right(&self, x: usize, r: usize) -> W {
        self.to_right[self.index(x, r)]
    }

    pub fn width(&self) -> usize {
        self.frame.width()
    }

    pub fn rows(&self) -> usize {
        self.frame.rows()
    }

    /// Strip crossing value: `min_v dist_from_left(v) + dist_to_right(v)`.
    pub fn crossing_value(&self) -> W {
        self.from_left
            .iter()
            .zip(&self.to_right)
            .map(|(a, b)| *a + *b)
            .min_by(total_cmp)
            .expect("strips have vertices")
    }

    /// Crossing value of the strip after lowering the weight of the local
    /// edge between `u` and `v` to `w`; exact because decreasing one weight
    /// only adds paths through that edge.
    pub fn lowered_value(&self, u: (usize, usize), v: (usize, usize), w: W) -> W {
        let (iu, iv) = (self.index(u.0, u.1), self.index(v.0, v.1));
        let through = (self.from_left[iu] + w + self.to_right[iv]).min_by_ref(self.from_left[iv] + w + self.to_right[iu]);
        self.crossing_value().min_by_ref(through)
    }
}

trait MinByRef: Sized {
    fn min_by_ref(self, other: Self) -> Self;
}

impl<W: Time> MinByRef for W {
    fn min_by_ref(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// An edge lying on every geodesic, with the crossing value once it is
/// removed (`None` when removal disconnects).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PivotEdge<W> {
    pub edge: Edge,
    pub forbidden_value: Option<W>,
}

struct StripSolution<W> {
    value: W,
    local_edges: Vec<usize>,
    local_vertices: Vec<usize>,
}

/// Strip-decomposed solver for one crossing problem on one environment.
pub struct CrossingSolver<'a, W> {
    weights: &'a EdgeWeights<W>,
    problem: CrossingProblem,
    strips: Vec<Strip>,
    values: Vec<W>,
    best: usize,
}

impl<'a, W: Time> CrossingSolver<'a, W> {
    pub fn new(weights: &'a EdgeWeights<W>, problem: CrossingProblem) -> Result<Self> {
        problem.validate()?;
        problem.check_fits(weights.region())?;
        let strips = problem.strips();
        let mut values = Vec::with_capacity(strips.len());
        for strip in &strips {
            let graph = strip_graph(weights, &problem.frame(strip));
            let value = solve_grid(&graph, false).map(|s| s.value).ok_or(Error::Infeasible)?;
            values.push(value);
        }
        let best = argmin(&values).ok_or(Error::Infeasible)?;
        Ok(Self { weights, problem, strips, values, best })
    }

    pub fn problem(&self) -> &CrossingProblem {
        &self.problem
    }

    pub fn strips(&self) -> &[Strip] {
        &self.strips
    }

    pub fn value(&self) -> W {
        self.values[self.best]
    }

    pub fn strip_values(&self) -> &[W] {
        &self.values
    }

    fn frame(&self, s: usize) -> StripFrame {
        self.problem.frame(&self.strips[s])
    }

    fn witness(&self, s: usize) -> PathResult<W> {
        let frame = self.frame(s);
        let graph = strip_graph(self.weights, &frame);
        let sol = solve_grid(&graph, true).expect("unblocked strips are connected");
        let path = local_path(&frame, &graph, &sol.local_edges, &sol.local_vertices);
        PathResult { value: sol.value, path: Some(path), strip_index: Some(s) }
    }

    /// Minimum crossing with its witness from the first minimizing strip.
    pub fn crossing(&self) -> PathResult<W> {
        self.witness(self.best)
    }

    pub fn strip_crossing(&self, s: usize) -> PathResult<W> {
        self.witness(s)
    }

    /// Crossing value when every edge in `forbidden` is removed.
    pub fn value_with_forbidden(&self, forbidden: &[Edge]) -> Option<W> {
        let mut touched = Vec::new();
        let mut best: Option<W> = None;
        for s in 0..self.strips.len() {
            let frame = self.frame(s);
            let lifts: Vec<_> = forbidden.iter().filter_map(|e| frame.local_edge(*e)).collect();
            if lifts.is_empty() {
                best = Some(min_opt(best, self.values[s]));
            } else {
                touched.push((s, lifts));
            }
        }
        for (s, lifts) in touched {
            // Removing edges never lowers a strip's value.
            if matches!(best, Some(b) if !(self.values[s] < b)) {
                continue;
            }
            let frame = self.frame(s);
            let mut graph = strip_graph(self.weights, &frame);
            for (x, r, vertical) in lifts {
                let e = if vertical { graph.vertical(x, r) } else { graph.horizontal(x, r) };
                graph.block(e);
            }
            if let Some(sol) = solve_grid(&graph, false) {
                best = Some(min_opt(best, sol.value));
            }
        }
        best
    }

    /// Edges on every geodesic (π), each with its forbidden crossing value,
    /// in lattice edge order.
    pub fn intersection(&self) -> Vec<PivotEdge<W>> {
        let v = self.value();
        let witness = self.crossing().path.expect("witness requested");
        let mut candidates: Vec<Edge> = witness.edges;
        candidates.sort();
        candidates.dedup();
        let tied: Vec<usize> = (0..self.strips.len()).filter(|&s| self.values[s].ties(v)).collect();
        let mut out = Vec::new();
        for e in candidates {
            let avoidable = tied.iter().any(|&s| self.frame(s).local_edge(e).is_none());
            if avoidable {
                continue;
            }
            let forbidden_value = self.value_with_forbidden(&[e]);
            let pivotal = match forbidden_value {
                None => true,
                Some(f) => f.exceeds(v),
            };
            if pivotal {
                out.push(PivotEdge { edge: e, forbidden_value });
            }
        }
        out
    }

    pub fn potentials(&self, s: usize) -> PotentialField<W> {
        let frame = self.frame(s);
        let graph = strip_graph(self.weights, &frame);
        potentials_of(&graph, frame)
    }

    /// For every environment edge, the crossing value after lowering that
    /// edge's weight to `lowered` (the current value for edges that are
    /// already no heavier, or that the problem never reads).
    pub fn lowered_values(&self, lowered: W) -> Vec<W> {
        let region = self.weights.region();
        let v = self.value();
        let mut out = vec![v; region.num_edges()];
        for s in 0..self.strips.len() {
            let frame = self.frame(s);
            let graph = strip_graph(self.weights, &frame);
            let pot = potentials_of(&graph, frame);
            for e in 0..graph.weights.len() {
                if !(lowered < graph.weights[e]) {
                    continue;
                }
                let (a, b) = graph.endpoints(e);
                let through = (pot.from_left[a] + lowered + pot.to_right[b])
                    .min_by_ref(pot.from_left[b] + lowered + pot.to_right[a]);
                let (x, r, vertical) = graph.edge_coords(e);
                let id = frame.env_edge_id(&region, x, r, vertical);
                out[id] = out[id].min_by_ref(through);
            }
        }
        out
    }

    /// Crossing value after raising the weight of `e` to `raised`, given π.
    pub fn raised_value(&self, pi: &[PivotEdge<W>], e: Edge, raised: W) -> W {
        let v = self.value();
        let Some(pivot) = pi.iter().find(|p| p.edge == e) else {
            return v;
        };
        let old = self.weights.at(e).expect("π edges lie in the region");
        let through = v + (raised - old);
        match pivot.forbidden_value {
            Some(f) => f.min_by_ref(through),
            None => through,
        }
    }

    pub fn canonical(&self, cap: u64) -> CanonicalGeodesic<W> {
        let v = self.value();
        let tied: Vec<usize> = (0..self.strips.len()).filter(|&s| self.values[s].ties(v)).collect();
        let dags: Vec<(usize, GeodesicDag<W>)> = tied
            .iter()
            .map(|&s| {
                let frame = self.frame(s);
                let graph = strip_graph(self.weights, &frame);
                (s, GeodesicDag::build(graph, frame, v))
            })
            .collect();
        let total = dags.iter().fold(0u64, |acc, (_, d)| acc.saturating_add(d.count));
        let exact = total <= cap;
        let mut best: Option<(usize, Vec<Edge>, CrossingPath, usize)> = None;
        let mut distinct: BTreeSet<Vec<Edge>> = BTreeSet::new();
        let mut consider = |path: CrossingPath, s: usize| {
            let key = path.sorted_edges();
            if exact {
                distinct.insert(key.clone());
            }
            let better = match &best {
                None => true,
                Some((len, k, _, _)) => (path.len(), &key) < (*len, k),
            };
            if better {
                best = Some((path.len(), key, path, s));
            }
        };
        for (s, dag) in &dags {
            if exact {
                dag.for_each_path(|p| consider(p, *s));
            } else if let Some(p) = dag.greedy_path() {
                consider(p, *s);
            }
        }
        let (_, _, path, s) = best.expect("minimizing strips contain geodesics");
        let geodesic_count = if exact { distinct.len() as u64 } else { total };
        CanonicalGeodesic {
            result: PathResult { value: v, path: Some(path), strip_index: Some(s) },
            exact,
            geodesic_count,
        }
    }
}

fn min_opt<W: Time>(a: Option<W>, b: W) -> W {
    match a {
        Some(a) => a.min_by_ref(b),
        None => b,
    }
}

fn argmin<W: Time>(values: &[W]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|b| *v < values[b]) {
            best = Some(i);
        }
    }
    best
}

fn strip_graph<W: Time>(weights: &EdgeWeights<W>, frame: &StripFrame) -> GridGraph<W> {
    let (width, rows) = (frame.width(), frame.rows());
    let region = weights.region();
    let mut values = Vec::with_capacity(GridGraph::<W>::edge_count(width, rows));
    for r in 0..=rows {
        for x in 0..width {
            values.push(weights.get(frame.env_edge_id(&region, x, r, false)));
        }
    }
    for r in 0..rows {
        for x in 0..=width {
            values.push(weights.get(frame.env_edge_id(&region, x, r, true)));
        }
    }
    GridGraph::new(width, rows, values)
}

fn left_column<W: Time>(g: &GridGraph<W>) -> impl Iterator<Item = usize> + '_ {
    (0..=g.rows).map(move |r| g.vertex(0, r))
}

fn right_column<W: Time>(g: &GridGraph<W>) -> impl Iterator<Item = usize> + '_ {
    (0..=g.rows).map(move |r| g.vertex(g.width, r))
}

/// Left-to-right crossing of a grid; `None` when blocked edges disconnect it.
fn solve_grid<W: Time>(graph: &GridGraph<W>, with_path: bool) -> Option<StripSolution<W>> {
    let sp = graph.dijkstra(left_column(graph), None);
    let mut sink: Option<(usize, W)> = None;
    for v in right_column(graph) {
        if let Some(d) = sp.dist[v] {
            if sink.is_none_or(|(_, b)| d < b) {
                sink = Some((v, d));
            }
        }
    }
    let (target, value) = sink?;
    let (local_edges, local_vertices) = if with_path {
        (sp.path_to(graph, target), sp.vertices_to(graph, target))
    } else {
        (Vec::new(), Vec::new())
    };
    Some(StripSolution { value, local_edges, local_vertices })
}

fn potentials_of<W: Time>(graph: &GridGraph<W>, frame: StripFrame) -> PotentialField<W> {
    let unwrap = |d: Vec<Option<W>>| d.into_iter().map(|x| x.expect("strips are connected")).collect();
    let from_left = unwrap(graph.dijkstra(left_column(graph), None).dist);
    let to_right = unwrap(graph.dijkstra(right_column(graph), None).dist);
    PotentialField { frame, from_left, to_right }
}

fn local_path<W: Time>(frame: &StripFrame, graph: &GridGraph<W>, edges: &[usize], vertices: &[usize]) -> CrossingPath {
    let edges = edges
        .iter()
        .map(|&e| {
            let (x, r, vertical) = graph.edge_coords(e);
            frame.env_edge(x, r, vertical)
        })
        .collect();
    let vertices = vertices
        .iter()
        .map(|&v| {
            let (x, r) = graph.coords(v);
            frame.lifted_vertex(x, r)
        })
        .collect();
    CrossingPath { edges, vertices }
}

/// Tight-edge DAG of one strip: `u -> w` whenever the edge lies on a strip
/// geodesic traversed from left to right.
struct GeodesicDag<W> {
    graph: GridGraph<W>,
    frame: StripFrame,
    out: Vec<Vec<(usize, usize)>>,
    sources: Vec<usize>,
    is_sink: Vec<bool>,
    hops: Vec<u64>,
    count: u64,
}

impl<W: Time> GeodesicDag<W> {
    fn build(graph: GridGraph<W>, frame: StripFrame, value: W) -> Self {
        let pot = potentials_of(&graph, frame);
        let (dl, dr) = (&pot.from_left, &pot.to_right);
        let nv = graph.num_vertices();
        let on = |v: usize| (dl[v] + dr[v]).ties(value);
        let mut out = vec![Vec::new(); nv];
        let mut is_sink = vec![false; nv];
        for v in 0..nv {
            if !on(v) {
                continue;
            }
            let (x, _) = graph.coords(v);
            if x == graph.width {
                is_sink[v] = true;
                continue;
            }
            graph.for_each_neighbour(v, |w, e| {
                if dl[w] > dl[v] && (dl[v] + graph.weights[e] + dr[w]).ties(value) {
                    out[v].push((w, e));
                }
            });
        }
        let sources: Vec<usize> = left_column(&graph).filter(|&v| on(v)).collect();
        // Tight edges strictly increase the distance from the left, so that
        // order is topological.
        let mut order: Vec<usize> = (0..nv).filter(|&v| on(v)).collect();
        order.sort_by(|a, b| total_cmp(&dl[*a], &dl[*b]).then(a.cmp(b)));
        let mut paths = vec![0u64; nv];
        let mut hops = vec![u64::MAX; nv];
        for &v in order.iter().rev() {
            if is_sink[v] {
                paths[v] = 1;
                hops[v] = 0;
                continue;
            }
            for &(w, _) in &out[v] {
                paths[v] = paths[v].saturating_add(paths[w]);
                if hops[w] != u64::MAX {
                    hops[v] = hops[v].min(hops[w] + 1);
                }
            }
        }
        let count = sources.iter().fold(0u64, |acc, &s| acc.saturating_add(paths[s]));
        Self { graph, frame, out, sources, is_sink, hops, count }
    }

    fn emit(&self, edges: &[usize], vertices: &[usize]) -> CrossingPath {
        local_path(&self.frame, &self.graph, edges, vertices)
    }

    fn for_each_path(&self, mut f: impl FnMut(CrossingPath)) {
        for &s in &self.sources {
            let mut vertices = vec![s];
            let mut edges = Vec::new();
            let mut cursor = vec![0usize];
            while let Some(&v) = vertices.last() {
                if self.is_sink[v] {
                    f(self.emit(&edges, &vertices));
                    vertices.pop();
                    edges.pop();
                    cursor.pop();
                    continue;
                }
                let i = cursor.last_mut().expect("cursor tracks the stack");
                if let Some(&(w, e)) = self.out[v].get(*i) {
                    *i += 1;
                    vertices.push(w);
                    edges.push(e);
                    cursor.push(0);
                } else {
                    vertices.pop();
                    edges.pop();
                    cursor.pop();
                }
            }
        }
    }

    /// Fewest-hop geodesic, choosing the smallest next edge at each step.
    fn greedy_path(&self) -> Option<CrossingPath> {
        let min_hops = self.sources.iter().map(|&s| self.hops[s]).min()?;
        let env_edge = |e: usize| {
            let (x, r, vertical) = self.graph.edge_coords(e);
            self.frame.env_edge(x, r, vertical)
        };
        let step = |v: usize| {
            self.out[v]
                .iter()
                .filter(|(w, _)| self.hops[*w] != u64::MAX && self.hops[*w] + 1 == self.hops[v])
                .min_by_key(|(_, e)| env_edge(*e))
                .copied()
        };
        let start = self
            .sources
            .iter()
            .filter(|&&s| self.hops[s] == min_hops)
            .min_by_key(|&&s| step(s).map(|(_, e)| env_edge(e)))
            .copied()?;
        let mut vertices = vec![start];
        let mut edges = Vec::new();
        let mut v = start;
        while !self.is_sink[v] {
            let (w, e) = step(v)?;
            edges.push(e);
            vertices.push(w);
            v = w;
        }
        Some(self.emit(&edges, &vertices))
    }
}

/// Crossing of a single strip of `problem`.
pub fn strip_crossing<W: Time>(weights: &EdgeWeights<W>, problem: &CrossingProblem, strip: &Strip) -> Result<PathResult<W>> {
    problem.check_fits(weights.region())?;
    if strip.index >= problem.strips().len() || problem.strips()[strip.index] != *strip {
        return Err(Error::invalid("strip does not belong to the problem"));
    }
    let frame = problem.frame(strip);
    let graph = strip_graph(weights, &frame);
    let sol = solve_grid(&graph, true).ok_or(Error::Infeasible)?;
    let path = local_path(&frame, &graph, &sol.local_edges, &sol.local_vertices);
    Ok(PathResult { value: sol.value, path: Some(path), strip_index: Some(strip.index) })
}

/// `τ(n,k)` and its relatives, with a witness geodesic.
pub fn restricted_crossing_time<W: Time>(weights: &EdgeWeights<W>, problem: &CrossingProblem) -> Result<PathResult<W>> {
    Ok(CrossingSolver::new(weights, *problem)?.crossing())
}

/// Value only; `None` when the forbidden edges disconnect every strip.
pub fn crossing_with_forbidden<W: Time>(
    weights: &EdgeWeights<W>,
    problem: &CrossingProblem,
    forbidden: &[Edge],
) -> Result<Option<W>> {
    for e in forbidden {
        if !weights.region().contains_edge(*e) {
            return Err(Error::invalid(format!("forbidden edge {e} outside the environment")));
        }
    }
    Ok(CrossingSolver::new(weights, *problem)?.value_with_forbidden(forbidden))
}

/// π: the edges shared by all geodesics, in lattice edge order.
pub fn geodesic_intersection<W: Time>(weights: &EdgeWeights<W>, problem: &CrossingProblem) -> Result<Vec<Edge>> {
    Ok(CrossingSolver::new(weights, *problem)?.intersection().into_iter().map(|p| p.edge).collect())
}

pub fn canonical_geodesic<W: Time>(
    weights: &EdgeWeights<W>,
    problem: &CrossingProblem,
    cap: u64,
) -> Result<CanonicalGeodesic<W>> {
    Ok(CrossingSolver::new(weights, *problem)?.canonical(cap))
}

pub fn crossing_potentials<W: Time>(
    weights: &EdgeWeights<W>,
    problem: &CrossingProblem,
    strip: &Strip,
) -> Result<PotentialField<W>> {
    problem.check_fits(weights.region())?;
    let frame = problem.frame(strip);
    Ok(potentials_of(&strip_graph(weights, &frame), frame))
}

/// Unconstrained `T(u,v)` within the environment's region.
pub fn point_to_point_time<W: Time>(weights: &EdgeWeights<W>, u: Vertex, v: Vertex) -> Result<PathResult<W>> {
    let region = weights.region();
    for p in [u, v] {
        if !region.contains_vertex(p) {
            return Err(Error::invalid(format!("vertex ({}, {}) outside the region", p.x, p.y)));
        }
    }
    let graph = GridGraph::new(region.width, region.height, weights.values().to_vec());
    let (su, sv) = (graph.vertex(u.x as usize, u.y as usize), graph.vertex(v.x as usize, v.y as usize));
    let sp = graph.dijkstra([su], Some(sv));
    let value = sp.dist[sv].ok_or(Error::Infeasible)?;
    let edges = sp.path_to(&graph, sv).into_iter().map(|e| region.edge(e)).collect();
    let vertices = sp
        .vertices_to(&graph, sv)
        .into_iter()
        .map(|i| {
            let (x, y) = graph.coords(i);
            Vertex::new(x as i64, y as i64)
        })
        .collect();
    Ok(PathResult { value, path: Some(CrossingPath { edges, vertices }), strip_index: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathGeometry {
    /// Max visited row minus min visited row.
    pub displacement: i64,
    /// Number of path vertices in each column `x`.
    pub column_counts: BTreeMap<i64, usize>,
    /// Edges carrying the heavy atom `b`; `None` without a two-point environment.
    pub b_edge_count: Option<usize>,
}

impl PathGeometry {
    pub fn max_column_count(&self) -> usize {
        self.column_counts.values().copied().max().unwrap_or(0)
    }
}

pub fn path_geometry(path: &CrossingPath, env: Option<&Environment>) -> PathGeometry {
    if path.vertices.is_empty() {
        return PathGeometry { displacement: 0, column_counts: BTreeMap::new(), b_edge_count: env.map(|_| 0) };
    }
    let (lo, hi) = path
        .vertices
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v.y), hi.max(v.y)));
    let mut column_counts = BTreeMap::new();
    for v in &path.vertices {
        *column_counts.entry(v.x).or_insert(0) += 1;
    }
    let b_edge_count = env.filter(|e| e.spec().is_two_point()).map(|env| {
        path.edges
            .iter()
            .filter(|e| env.region().edge_id(**e).is_some_and(|id| env.is_b(id)))
            .count()
    });
    PathGeometry { displacement: hi - lo, column_counts, b_edge_count }
}

/// Distinct vertices of an edge set in each column (the `|π ∩ C_x|` statistic).
pub fn column_intersections(edges: &[Edge]) -> BTreeMap<i64, usize> {
    let vertices: BTreeSet<Vertex> = edges
        .iter()
        .flat_map(|e| {
            let (u, v) = e.endpoints();
            [u, v]
        })
        .collect();
    let mut counts = BTreeMap::new();
    for v in vertices {
        *counts.entry(v.x).or_insert(0) += 1;
    }
    counts
}

/// Helper for callers holding a region but no weights.
pub fn problem_edges(problem: &CrossingProblem) -> Vec<Edge> {
    let region: Region = problem.region();
    let mut set = BTreeSet::new();
    for strip in problem.strips() {
        let frame = problem.frame(&strip);
        for r in 0..=frame.rows() {
            for x in 0..=frame.width() {
                if x < frame.width() {
                    set.insert(frame.env_edge(x, r, false));
                }
                if r < frame.rows() {
                    set.insert(frame.env_edge(x, r, true));
                }
            }
        }
    }
    debug_assert!(set.iter().all(|e| region.contains_edge(*e)));
    set.into_iter().collect()
}
