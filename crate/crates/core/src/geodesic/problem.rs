use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeId, Orientation, Region, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Plane,
    /// `[0,n]^2` with row `n` identified with row `0`.
    VerticalCylinder,
}

/// A left-right crossing of `[0,n] x [row_offset, row_offset + height]`
/// among paths whose vertical displacement (max row minus min row) is at
/// most `k`.
///
/// On the cylinder the rectangle is the whole square `[0,n]^2` with its top
/// and bottom glued, and displacement is measured on the unwrapped lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossingProblem {
    pub n: usize,
    pub height: usize,
    pub row_offset: usize,
    pub topology: Topology,
    pub k: usize,
}

impl CrossingProblem {
    pub fn new(n: usize, height: usize, row_offset: usize, topology: Topology, k: usize) -> Result<Self> {
        let p = Self { n, height, row_offset, topology, k };
        p.validate()?;
        Ok(p)
    }

    /// `τ(n,k)`: crossing of `[0,n]^2` with displacement at most `k`.
    pub fn tau(n: usize, k: usize) -> Result<Self> {
        Self::new(n, n, 0, Topology::Plane, k)
    }

    /// `T(n,k)`: crossing of `[0,n] x [0,2k]` with displacement at most `k`.
    pub fn rect(n: usize, k: usize) -> Result<Self> {
        Self::new(n, 2 * k, 0, Topology::Plane, k)
    }

    /// `τ̃(n,k)`: `τ(n,k)` on the vertically glued square.
    pub fn tau_cylinder(n: usize, k: usize) -> Result<Self> {
        Self::new(n, n, 0, Topology::VerticalCylinder, k)
    }

    /// `T_n`: unrestricted crossing of `[0,n]^2`.
    pub fn full(n: usize) -> Result<Self> {
        Self::tau(n, n)
    }

    /// `T_k(R)` for `R = [0,n] x [lo, hi]`.
    pub fn within_rows(n: usize, lo: usize, hi: usize, k: usize) -> Result<Self> {
        if hi < lo {
            return Err(Error::invalid(format!("row interval [{lo}, {hi}] is empty")));
        }
        Self::new(n, hi - lo, lo, Topology::Plane, k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("crossing width must be at least 1"));
        }
        if self.k > self.height {
            return Err(Error::invalid(format!(
                "displacement bound k={} exceeds the height {}",
                self.k, self.height
            )));
        }
        if self.topology == Topology::VerticalCylinder {
            if self.height != self.n || self.row_offset != 0 {
                return Err(Error::invalid("cylinder crossings live on the full square [0,n]^2"));
            }
            if self.k >= self.n {
                return Err(Error::invalid(format!(
                    "cylinder displacement bound k={} must be below the circumference {}",
                    self.k, self.n
                )));
            }
        }
        Ok(())
    }

    /// Smallest environment region the problem reads.
    pub fn region(&self) -> Region {
        Region::new(self.n, self.row_offset + self.height)
    }

    pub fn check_fits(&self, region: Region) -> Result<()> {
        let need = self.region();
        if region.width != need.width || region.height < need.height {
            return Err(Error::invalid(format!(
                "problem needs a region of width {} and height >= {}, environment is {}x{}",
                need.width, need.height, region.width, region.height
            )));
        }
        Ok(())
    }

    /// Rows spanned by one strip, minus one.
    pub fn span(&self) -> usize {
        self.k.min(self.height)
    }

    /// Every displacement-feasible path lies in one of these strips of
    /// `span + 1` consecutive rows, and every path inside a strip is feasible.
    pub fn strips(&self) -> Vec<Strip> {
        let span = self.span();
        let count = match self.topology {
            Topology::Plane => self.height - span + 1,
            Topology::VerticalCylinder => self.n,
        };
        (0..count).map(|i| Strip { index: i, first_row: i, span }).collect()
    }

    pub fn frame(&self, strip: &Strip) -> StripFrame {
        StripFrame { problem: *self, strip: *strip }
    }
}

/// `span + 1` consecutive rows starting at `first_row` (relative to the
/// problem's row offset; taken mod `n` on the cylinder).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strip {
    pub index: usize,
    pub first_row: usize,
    pub span: usize,
}

/// Maps a strip's local grid `[0,n] x [0,span]` to environment edges and to
/// lifted coordinates.
#[derive(Debug, Clone, Copy)]
pub struct StripFrame {
    problem: CrossingProblem,
    strip: Strip,
}

impl StripFrame {
    pub fn strip(&self) -> Strip {
        self.strip
    }

    pub fn width(&self) -> usize {
        self.problem.n
    }

    pub fn rows(&self) -> usize {
        self.strip.span
    }

    /// Environment row of local row `r`.
    pub fn env_row(&self, r: usize) -> usize {
        match self.problem.topology {
            Topology::Plane => self.problem.row_offset + self.strip.first_row + r,
            Topology::VerticalCylinder => (self.strip.first_row + r) % self.problem.n,
        }
    }

    /// Unwrapped row of local row `r`.
    pub fn lifted_row(&self, r: usize) -> i64 {
        (self.problem.row_offset + self.strip.first_row + r) as i64
    }

    pub fn lifted_vertex(&self, x: usize, r: usize) -> Vertex {
        Vertex::new(x as i64, self.lifted_row(r))
    }

    /// Environment edge of a local edge.
    pub fn env_edge(&self, x: usize, r: usize, vertical: bool) -> Edge {
        let y = self.env_row(r) as i64;
        if vertical {
            Edge::vertical(x as i64, y)
        } else {
            Edge::horizontal(x as i64, y)
        }
    }

    pub fn env_edge_id(&self, region: &Region, x: usize, r: usize, vertical: bool) -> EdgeId {
        let y = self.env_row(r);
        if vertical {
            region.vertical_id(x, y)
        } else {
            region.horizontal_id(x, y)
        }
    }

    /// Local position `(x, r, vertical)` of an environment edge, if the strip
    /// contains it. There is at most one lift because `k < n` on the cylinder.
    pub fn local_edge(&self, e: Edge) -> Option<(usize, usize, bool)> {
        let n = self.problem.n as i64;
        if e.x < 0 || e.x > n {
            return None;
        }
        let span = self.strip.span as i64;
        let vertical = e.orientation == Orientation::Vertical;
        if !vertical && e.x >= n {
            return None;
        }
        let r = match self.problem.topology {
            Topology::Plane => e.y - (self.problem.row_offset + self.strip.first_row) as i64,
            Topology::VerticalCylinder => {
                if e.y < 0 || e.y >= n {
                    return None;
                }
                (e.y - self.strip.first_row as i64).rem_euclid(n)
            }
        };
        let limit = if vertical { span - 1 } else { span };
        (0..=limit).contains(&r).then_some((e.x as usize, r as usize, vertical))
    }
}

/// The rectangle family `R_1..R_m` (as row intervals `[lo, hi]` of the
/// square `[0,n]^2`) whose height-`2k` translates cover every
/// displacement-`k` crossing: the `floor(n/2k)` disjoint blocks
/// `[2ki, 2k(i+1)]`, the top block `[n-2k, n]`, the blocks shifted by `k`,
/// and `[n-3k, n-k]`.
pub fn covering_rectangles(n: usize, k: usize) -> Result<Vec<(usize, usize)>> {
    if k == 0 || 3 * k > n {
        return Err(Error::invalid(format!("rectangle family needs 1 <= k <= n/3 (n={n}, k={k})")));
    }
    let m0 = n / (2 * k);
    let mut family: Vec<(usize, usize)> = (0..m0).map(|i| (2 * k * i, 2 * k * (i + 1))).collect();
    family.push((n - 2 * k, n));
    family.extend((0..m0.saturating_sub(1)).map(|i| (2 * k * i + k, 2 * k * (i + 1) + k)));
    family.push((n - 3 * k, n - k));
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_problems() {
        let t = CrossingProblem::tau(8, 2).unwrap();
        assert_eq!(t.region(), Region::square(8));
        assert_eq!(t.strips().len(), 7);
        let r = CrossingProblem::rect(8, 2).unwrap();
        assert_eq!(r.region(), Region::new(8, 4));
        assert_eq!(r.strips().len(), 3);
        let c = CrossingProblem::tau_cylinder(8, 2).unwrap();
        assert_eq!(c.strips().len(), 8);
        assert_eq!(CrossingProblem::full(5).unwrap().strips().len(), 1);
        assert!(CrossingProblem::tau(4, 5).is_err());
        assert!(CrossingProblem::tau_cylinder(4, 4).is_err());
    }

    #[test]
    fn cylinder_frame_wraps_rows() {
        let c = CrossingProblem::tau_cylinder(4, 2).unwrap();
        let f = c.frame(&c.strips()[3]);
        assert_eq!(f.env_row(0), 3);
        assert_eq!(f.env_row(1), 0);
        assert_eq!(f.lifted_row(2), 5);
        // The wrap edge between rows 3 and 0 is the square's (x,3)-(x,4) edge.
        assert_eq!(f.env_edge(1, 0, true), Edge::vertical(1, 3));
        assert_eq!(f.local_edge(Edge::vertical(1, 3)), Some((1, 0, true)));
        assert_eq!(f.local_edge(Edge::horizontal(0, 1)), Some((0, 2, false)));
        assert_eq!(f.local_edge(Edge::horizontal(0, 2)), None);
        assert_eq!(f.local_edge(Edge::vertical(0, 1)), None);
    }

    #[test]
    fn plane_frame_respects_offset() {
        let p = CrossingProblem::within_rows(6, 2, 5, 1).unwrap();
        let strips = p.strips();
        assert_eq!(strips.len(), 3);
        let f = p.frame(&strips[1]);
        assert_eq!(f.env_row(0), 3);
        assert_eq!(f.local_edge(Edge::vertical(6, 3)), Some((6, 0, true)));
        assert_eq!(f.local_edge(Edge::vertical(6, 4)), None);
        assert_eq!(f.local_edge(Edge::horizontal(6, 3)), None);
    }

    #[test]
    fn rectangle_family_covers_every_strip() {
        for n in [16, 32, 64, 20, 21] {
            for k in [1, 2, 4, 5] {
                let family = covering_rectangles(n, k).unwrap();
                assert!(family.len() <= 3 * n / k);
                for &(lo, hi) in &family {
                    assert_eq!(hi - lo, 2 * k);
                    assert!(hi <= n);
                }
                for j in 0..=(n - k) {
                    assert!(family.iter().any(|&(lo, hi)| lo <= j && j + k <= hi), "n={n} k={k} j={j}");
                }
            }
        }
    }
}
