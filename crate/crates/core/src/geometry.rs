//! Workspace representation and static clearance queries.
//!
//! The workspace is an occupancy grid. All "is the body free here" questions
//! are answered conservatively: a cell counts as touched by a disc when its
//! center lies within `r + resolution / sqrt(2)` of the disc center, so a grid
//! level `true` always implies the continuous disc is obstacle free.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::error::CoreError;

/// Tolerance for body overlap. Two discs whose centers are at least
/// `r1 + r2 - EPS_GEOM` apart do not conflict.
pub const EPS_GEOM: f64 = 1e-9;

/// A point (or vector) in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Linear interpolation, `s = 0` gives `self`.
    pub fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
        )
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Distance from `p` to the closed segment `a`-`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let s = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a.lerp(b, s))
}

/// Closed disc, e.g. a robot body at a fixed position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Point,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point, radius: f64) -> Result<Self, CoreError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(CoreError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }
}

/// A union of discs: start regions of lower-priority robots, goal regions of
/// higher-priority robots, endpoint exclusion zones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionSet {
    discs: Vec<Disc>,
}

impl RegionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_discs(discs: Vec<Disc>) -> Self {
        Self { discs }
    }

    pub fn push(&mut self, disc: Disc) {
        self.discs.push(disc);
    }

    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.discs.len()
    }
}

/// True iff a body of radius `r` centered at `c` does not overlap any disc of
/// `blocked`. Touching is allowed.
pub fn point_avoids_regions(c: Point, r: f64, blocked: &RegionSet) -> bool {
    blocked
        .discs
        .iter()
        .all(|d| c.dist(d.center) >= r + d.radius - EPS_GEOM)
}

/// True iff a body of radius `r` sweeping the segment `a`-`b` never overlaps
/// any disc of `blocked`.
pub fn segment_avoids_regions(a: Point, b: Point, r: f64, blocked: &RegionSet) -> bool {
    blocked
        .discs
        .iter()
        .all(|d| point_segment_distance(d.center, a, b) >= r + d.radius - EPS_GEOM)
}

/// 2-D occupancy grid. Cell `(i, j)` covers
/// `[ox + i*res, ox + (i+1)*res] x [oy + j*res, oy + (j+1)*res]`;
/// row `j = 0` is the bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    occupied: Vec<bool>,
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
}

impl Workspace {
    /// `occupied` is row-major with `occupied[j * width + i]` for cell `(i, j)`.
    pub fn new(
        occupied: Vec<bool>,
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
    ) -> Result<Self, CoreError> {
        if width == 0 || height == 0 {
            return Err(CoreError::EmptyGrid);
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(CoreError::InvalidResolution(resolution));
        }
        if occupied.len() != width * height {
            return Err(CoreError::GridSizeMismatch {
                expected: width * height,
                actual: occupied.len(),
            });
        }
        Ok(Self {
            occupied,
            width,
            height,
            resolution,
            origin,
        })
    }

    /// Obstacle-free grid covering `width_m` x `height_m` meters.
    pub fn empty(width_m: f64, height_m: f64, resolution: f64, origin: Point) -> Result<Self, CoreError> {
        if !(resolution > 0.0) {
            return Err(CoreError::InvalidResolution(resolution));
        }
        let w = libm::ceil(width_m / resolution - 1e-9).max(1.0) as usize;
        let h = libm::ceil(height_m / resolution - 1e-9).max(1.0) as usize;
        Self::new(vec![false; w * h], w, h, resolution, origin)
    }

    /// Builds a workspace from a character map, one character per `block`
    /// meters, each block subdivided into `subdiv x subdiv` cells. The first
    /// string is the top row. `'#'` is an obstacle, anything else is free.
    pub fn from_ascii(rows: &[&str], block: f64, subdiv: usize) -> Result<Self, CoreError> {
        let bh = rows.len();
        let bw = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
        if bw == 0 || bh == 0 || subdiv == 0 {
            return Err(CoreError::EmptyGrid);
        }
        let w = bw * subdiv;
        let h = bh * subdiv;
        let mut occupied = vec![false; w * h];
        for (row_idx, row) in rows.iter().enumerate() {
            let bj = bh - 1 - row_idx;
            for (bi, ch) in row.chars().enumerate() {
                if ch != '#' {
                    continue;
                }
                for dj in 0..subdiv {
                    for di in 0..subdiv {
                        occupied[(bj * subdiv + dj) * w + bi * subdiv + di] = true;
                    }
                }
            }
        }
        Self::new(occupied, w, h, block / subdiv as f64, Point::default())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupied
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occupied[j * self.width + i]
    }

    /// Upper-right corner of the bounding box.
    pub fn max_corner(&self) -> Point {
        Point::new(
            self.origin.x + self.width as f64 * self.resolution,
            self.origin.y + self.height as f64 * self.resolution,
        )
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.resolution,
            self.origin.y + (j as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing `p`, `None` outside the bounding box.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.resolution;
        let fy = (p.y - self.origin.y) / self.resolution;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (i, j) = (fx as usize, fy as usize);
        (i < self.width && j < self.height).then_some((i, j))
    }

    /// Whether the point lies in a free cell.
    pub fn point_free(&self, p: Point) -> bool {
        self.cell_of(p).is_some_and(|(i, j)| !self.is_occupied(i, j))
    }

    /// True iff the closed disc `D(c, r)` lies inside the bounding box and
    /// every cell touching it (conservatively) is free.
    pub fn disc_free(&self, c: Point, r: f64) -> bool {
        let hi = self.max_corner();
        if c.x - r < self.origin.x || c.y - r < self.origin.y || c.x + r > hi.x || c.y + r > hi.y {
            return false;
        }
        let reach = r + self.resolution * core::f64::consts::FRAC_1_SQRT_2;
        let reach_sq = reach * reach;
        let res = self.resolution;
        let lo_i = libm::floor((c.x - reach - self.origin.x) / res).max(0.0) as usize;
        let lo_j = libm::floor((c.y - reach - self.origin.y) / res).max(0.0) as usize;
        let hi_i = (libm::ceil((c.x + reach - self.origin.x) / res).max(0.0) as usize).min(self.width);
        let hi_j = (libm::ceil((c.y + reach - self.origin.y) / res).max(0.0) as usize).min(self.height);
        for j in lo_j..hi_j {
            for i in lo_i..hi_i {
                if self.is_occupied(i, j) && (self.cell_center(i, j) - c).norm_sq() <= reach_sq {
                    return false;
                }
            }
        }
        true
    }

    /// `disc_free` sampled along `p0 -> p1` at spacing at most
    /// `resolution / 2`, both endpoints included.
    pub fn swept_disc_free(&self, p0: Point, p1: Point, r: f64) -> bool {
        let len = p0.dist(p1);
        let steps = libm::ceil(len / (self.resolution * 0.5)).max(1.0) as usize;
        (0..=steps).all(|k| self.disc_free(p0.lerp(p1, k as f64 / steps as f64), r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_with(obstacles: &[(usize, usize)]) -> Workspace {
        let mut occ = vec![false; 100];
        for &(i, j) in obstacles {
            occ[j * 10 + i] = true;
        }
        Workspace::new(occ, 10, 10, 1.0, Point::default()).unwrap()
    }

    #[test]
    fn disc_free_on_empty_grid() {
        assert!(grid_with(&[]).disc_free(Point::new(5.0, 5.0), 1.0));
    }

    #[test]
    fn disc_leaving_bounding_box_is_not_free() {
        assert!(!grid_with(&[]).disc_free(Point::new(0.0, 0.0), 2.0));
    }

    #[test]
    fn disc_near_single_obstacle() {
        let w = grid_with(&[(5, 5)]);
        assert!(!w.disc_free(Point::new(5.0, 7.0), 2.2));
        // brute force over all cells with exact square/disc intersection
        let c = Point::new(5.0, 7.0);
        let hits = (0..10).flat_map(|j| (0..10).map(move |i| (i, j))).any(|(i, j)| {
            if !w.is_occupied(i, j) {
                return false;
            }
            let nx = c.x.clamp(i as f64, i as f64 + 1.0);
            let ny = c.y.clamp(j as f64, j as f64 + 1.0);
            Point::new(nx, ny).dist(c) <= 2.2
        });
        assert!(hits);
    }

    #[test]
    fn swept_disc_cases() {
        let empty = grid_with(&[]);
        assert!(empty.swept_disc_free(Point::new(2.0, 2.0), Point::new(8.0, 2.0), 1.0));
        let p = Point::new(4.3, 6.1);
        assert_eq!(empty.swept_disc_free(p, p, 1.0), empty.disc_free(p, 1.0));
        let w = grid_with(&[(5, 2)]);
        let (a, b) = (Point::new(2.0, 2.0), Point::new(8.0, 2.0));
        assert!(!w.swept_disc_free(a, b, 1.0));
        // dense oracle at resolution / 10
        let dense = (0..=60).any(|k| !w.disc_free(a.lerp(b, k as f64 / 60.0), 1.0));
        assert!(dense);
    }

    #[test]
    fn region_avoidance_boundaries() {
        let none = RegionSet::new();
        assert!(point_avoids_regions(Point::new(0.0, 0.0), 1.0, &none));
        let blocked = RegionSet::from_discs(vec![Disc::new(Point::new(0.0, 0.0), 1.0).unwrap()]);
        assert!(point_avoids_regions(Point::new(2.0, 0.0), 1.0, &blocked));
        assert!(!point_avoids_regions(Point::new(1.9, 0.0), 1.0, &blocked));
    }

    #[test]
    fn segment_avoidance_catches_interior_pass() {
        let blocked = RegionSet::from_discs(vec![Disc::new(Point::new(0.0, 0.0), 0.4).unwrap()]);
        let (a, b) = (Point::new(-2.0, 0.1), Point::new(2.0, 0.1));
        assert!(point_avoids_regions(a, 0.4, &blocked));
        assert!(point_avoids_regions(b, 0.4, &blocked));
        assert!(!segment_avoids_regions(a, b, 0.4, &blocked));
    }

    #[test]
    fn invalid_constructors() {
        assert!(Disc::new(Point::default(), 0.0).is_err());
        assert!(Workspace::new(vec![], 0, 1, 1.0, Point::default()).is_err());
        assert!(Workspace::new(vec![false], 1, 1, 0.0, Point::default()).is_err());
    }

    #[test]
    fn ascii_rows_map_top_to_bottom() {
        let w = Workspace::from_ascii(&["#.", ".."], 1.0, 2).unwrap();
        assert_eq!((w.width(), w.height()), (4, 4));
        assert!(!w.point_free(Point::new(0.5, 1.5)));
        assert!(w.point_free(Point::new(0.5, 0.5)));
        assert!(w.point_free(Point::new(1.5, 1.5)));
    }
}
