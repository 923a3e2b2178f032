//! Integer rectangles of `Z^2`, their vertices and nearest-neighbour edges.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Vertex coordinate. Rows may be negative or exceed the region height for
/// lifted cylinder paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// An edge named by its lower-left endpoint: `(x,y)-(x+1,y)` when horizontal,
/// `(x,y)-(x,y+1)` when vertical.
///
/// Ordering is by midpoint, lexicographically on `(x, y)`; this order is
/// invariant under lattice translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub x: i64,
    pub y: i64,
    pub orientation: Orientation,
}

impl Edge {
    pub const fn horizontal(x: i64, y: i64) -> Self {
        Self { x, y, orientation: Orientation::Horizontal }
    }

    pub const fn vertical(x: i64, y: i64) -> Self {
        Self { x, y, orientation: Orientation::Vertical }
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        let u = Vertex::new(self.x, self.y);
        match self.orientation {
            Orientation::Horizontal => (u, Vertex::new(self.x + 1, self.y)),
            Orientation::Vertical => (u, Vertex::new(self.x, self.y + 1)),
        }
    }

    /// Twice the midpoint, so it stays integral.
    fn doubled_midpoint(&self) -> (i64, i64) {
        match self.orientation {
            Orientation::Horizontal => (2 * self.x + 1, 2 * self.y),
            Orientation::Vertical => (2 * self.x, 2 * self.y + 1),
        }
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Self {
        Self { x: self.x + dx, y: self.y + dy, orientation: self.orientation }
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        // Horizontal and vertical midpoints never coincide (parities differ),
        // so the orientation key only matters for completeness.
        let horizontal_first = |e: &Edge| matches!(e.orientation, Orientation::Vertical);
        self.doubled_midpoint()
            .cmp(&other.doubled_midpoint())
            .then_with(|| horizontal_first(self).cmp(&horizontal_first(other)))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, v) = self.endpoints();
        write!(f, "({},{})-({},{})", u.x, u.y, v.x, v.y)
    }
}

pub type EdgeId = usize;

/// The rectangle `[0,width] x [0,height]` of `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub width: usize,
    pub height: usize,
}

impl Region {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub const fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 && self.height == 0
    }

    pub fn num_vertices(&self) -> usize {
        (self.width + 1) * (self.height + 1)
    }

    fn num_horizontal(&self) -> usize {
        self.width * (self.height + 1)
    }

    pub fn num_edges(&self) -> usize {
        self.num_horizontal() + (self.width + 1) * self.height
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        (0..=self.width as i64).contains(&v.x) && (0..=self.height as i64).contains(&v.y)
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        let (u, v) = e.endpoints();
        self.contains_vertex(u) && self.contains_vertex(v)
    }

    pub fn horizontal_id(&self, x: usize, y: usize) -> EdgeId {
        debug_assert!(x < self.width && y <= self.height);
        y * self.width + x
    }

    pub fn vertical_id(&self, x: usize, y: usize) -> EdgeId {
        debug_assert!(x <= self.width && y < self.height);
        self.num_horizontal() + y * (self.width + 1) + x
    }

    pub fn edge_id(&self, e: Edge) -> Option<EdgeId> {
        if !self.contains_edge(e) {
            return None;
        }
        let (x, y) = (e.x as usize, e.y as usize);
        Some(match e.orientation {
            Orientation::Horizontal => self.horizontal_id(x, y),
            Orientation::Vertical => self.vertical_id(x, y),
        })
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        let nh = self.num_horizontal();
        if id < nh {
            Edge::horizontal((id % self.width) as i64, (id / self.width) as i64)
        } else {
            let j = id - nh;
            Edge::vertical((j % (self.width + 1)) as i64, (j / (self.width + 1)) as i64)
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.num_edges()).map(|id| self.edge(id))
    }
}

/// Per-edge passage times over a region, in the scalar the solver runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights<W> {
    region: Region,
    values: Vec<W>,
}

impl<W: Copy> EdgeWeights<W> {
    pub fn new(region: Region, values: Vec<W>) -> Self {
        assert_eq!(values.len(), region.num_edges(), "one weight per edge");
        Self { region, values }
    }

    pub fn constant(region: Region, w: W) -> Self {
        Self { region, values: vec![w; region.num_edges()] }
    }

    pub fn from_fn(region: Region, mut f: impl FnMut(Edge) -> W) -> Self {
        let values = region.edges().map(&mut f).collect();
        Self { region, values }
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn get(&self, id: EdgeId) -> W {
        self.values[id]
    }

    pub fn set(&mut self, id: EdgeId, w: W) {
        self.values[id] = w;
    }

    pub fn at(&self, e: Edge) -> Option<W> {
        self.region.edge_id(e).map(|id| self.values[id])
    }

    pub fn values(&self) -> &[W] {
        &self.values
    }
}
