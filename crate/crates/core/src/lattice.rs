//! Pointy-top hexagonal geometry: the macro lattice, wedge folding, the
//! A1/A2/A3 region partition and small-cell tilings.
//!
//! The serving base station sits at the origin. Neighbouring sites are
//! generated by the lattice vectors `(√3, 0)` and `(√3/2, 3/2)` in units of
//! the circumscribed radius, so edge midpoints lie at angles `kπ/3` and
//! corners at `π/6 + kπ/3`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

use crate::error::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Outward normals of the three pairs of parallel hexagon edges.
const NORMALS: [(f64, f64); 3] = [(1.0, 0.0), (0.5, 0.5 * SQRT3), (-0.5, 0.5 * SQRT3)];

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    fn dot(self, n: (f64, f64)) -> f64 {
        self.x * n.0 + self.y * n.1
    }
}

/// Hexagon of circumscribed radius `radius` centred at `c` contains `p`.
///
/// Each pair of parallel edges is half-open so that a point on an edge
/// shared by two tiles of the same lattice belongs to exactly one of them.
pub fn hexagon_contains(c: Point, radius: f64, p: Point) -> bool {
    let h = 0.5 * SQRT3 * radius;
    let d = Point::new(p.x - c.x, p.y - c.y);
    NORMALS.iter().all(|&n| {
        let s = d.dot(n);
        -h <= s && s < h
    })
}

/// Closed containment with a relative slack, for domain checks.
pub(crate) fn hexagon_contains_closed(radius: f64, p: Point) -> bool {
    let h = 0.5 * SQRT3 * radius * (1.0 + 1e-9);
    NORMALS.iter().all(|&n| p.dot(n).abs() <= h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeLayout {
    pub r_mc: f64,
    pub tiers: usize,
    /// Interferer sites in units of `r_mc`, sorted by distance then angle.
    pub positions: Vec<Point>,
}

impl LatticeLayout {
    /// Site coordinates in metres, serving site first.
    pub fn sites_m(&self) -> Vec<Point> {
        std::iter::once(Point::ORIGIN)
            .chain(self.positions.iter().map(|p| p.scale(self.r_mc)))
            .collect()
    }
}

pub fn interferer_positions(r_mc: f64, tiers: usize) -> Result<LatticeLayout> {
    if tiers == 0 {
        return Err(Error::InvalidArgument("tiers must be at least 1".into()));
    }
    if !(r_mc > 0.0) {
        return Err(Error::InvalidArgument(format!("r_mc must be positive, got {r_mc}")));
    }
    let t = tiers as i32;
    let mut sites: Vec<(i32, f64, Point)> = Vec::new();
    for i in -t..=t {
        for j in -t..=t {
            let ring = axial_distance(i, j);
            if ring == 0 || ring > t {
                continue;
            }
            let p = Point::new(SQRT3 * (i as f64 + 0.5 * j as f64), 1.5 * j as f64);
            sites.push((ring, p.angle().rem_euclid(2.0 * PI), p));
        }
    }
    sites.sort_by(|a, b| {
        a.2.norm()
            .total_cmp(&b.2.norm())
            .then(a.0.cmp(&b.0))
            .then(a.1.total_cmp(&b.1))
    });
    Ok(LatticeLayout {
        r_mc,
        tiers,
        positions: sites.into_iter().map(|s| s.2).collect(),
    })
}

fn axial_distance(q: i32, r: i32) -> i32 {
    (q.abs() + r.abs() + (q + r).abs()) / 2
}

/// Maps a point to the fundamental wedge `θ ∈ [0, π/6]` using the lattice
/// symmetries (rotations by `π/3` and the mirror about `π/6`).
pub fn fold_to_wedge(p: Point) -> (f64, f64) {
    let r = p.norm();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let mut t = p.angle().rem_euclid(FRAC_PI_3);
    if t > FRAC_PI_6 {
        t = FRAC_PI_3 - t;
    }
    (r, t.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    A1,
    A2,
    A3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionPartition {
    pub r_mc: f64,
    pub gamma_g: f64,
    pub g: f64,
    pub b: f64,
    pub r_a1: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl RegionPartition {
    pub fn new(r_mc: f64, gamma_g: f64) -> Result<Self> {
        if !(r_mc > 0.0) || !(0.0..=1.0).contains(&gamma_g) {
            return Err(Error::InvalidArgument(format!(
                "need r_mc > 0 and gamma_g in [0, 1], got {r_mc}, {gamma_g}"
            )));
        }
        let area = hexagon_area(r_mc);
        Ok(RegionPartition {
            r_mc,
            gamma_g,
            g: gamma_g * 0.5 * SQRT3 * r_mc,
            b: 0.5 * (1.0 - gamma_g) * r_mc,
            r_a1: (1.0 - gamma_g) * r_mc,
            a1: (1.0 - gamma_g).powi(2) * area,
            a2: 2.0 * gamma_g * (1.0 - gamma_g) * area,
            a3: gamma_g * gamma_g * area,
        })
    }

    /// Normalized area weights of A1, A2, A3.
    pub fn weights(&self) -> [f64; 3] {
        let g = self.gamma_g;
        [(1.0 - g).powi(2), 2.0 * g * (1.0 - g), g * g]
    }
}

pub fn hexagon_area(radius: f64) -> f64 {
    1.5 * SQRT3 * radius * radius
}

/// Region of a point given in metres relative to the serving site.
pub fn region_of(p: Point, partition: &RegionPartition) -> Result<Region> {
    let q = p.scale(1.0 / partition.r_mc);
    if !hexagon_contains_closed(1.0, q) {
        return Err(Error::OutOfDomain { x: p.x, y: p.y });
    }
    let (r, t) = fold_to_wedge(q);
    let (x, y) = (r * t.cos(), r * t.sin());
    let g = partition.gamma_g;
    Ok(if x <= 0.5 * SQRT3 * (1.0 - g) {
        Region::A1
    } else if y <= 0.5 * (1.0 - g) {
        Region::A2
    } else {
        Region::A3
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tile {
    pub q: i32,
    pub r: i32,
    pub center: Point,
    /// 1 for tiles inside the macrocell, ½ for tiles crossing its boundary.
    pub edge_weight: f64,
}

/// Small-cell tiles covering the central macrocell.
#[derive(Clone, Debug)]
pub struct HexTiling {
    pub mc_radius: f64,
    pub tile_radius: f64,
    pub tiles: Vec<Tile>,
    index: HashMap<(i32, i32), usize>,
}

impl HexTiling {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn axial_of(&self, p: Point) -> (i32, i32) {
        axial_round(p, self.tile_radius)
    }

    pub fn index_of_axial(&self, q: i32, r: i32) -> Option<usize> {
        self.index.get(&(q, r)).copied()
    }

    /// Index of the tile containing `p`, if that tile touches the macrocell.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        let (q, r) = self.axial_of(p);
        self.index_of_axial(q, r)
    }

    pub fn tile_area(&self) -> f64 {
        hexagon_area(self.tile_radius)
    }

    pub fn weighted_area(&self) -> f64 {
        self.tiles.iter().map(|t| t.edge_weight).sum::<f64>() * self.tile_area()
    }

    /// Whether two tiles share an edge.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ta, tb) = (&self.tiles[a], &self.tiles[b]);
        axial_distance(ta.q - tb.q, ta.r - tb.r) == 1
    }
}

pub fn axial_center(q: i32, r: i32, tile_radius: f64) -> Point {
    Point::new(
        tile_radius * SQRT3 * (q as f64 + 0.5 * r as f64),
        tile_radius * 1.5 * r as f64,
    )
}

/// Axial coordinates of the pointy-top tile of radius `tile_radius`
/// (anchored at the origin) that contains `p`. Cube rounding picks the
/// candidate; points on shared edges go to the tile whose half-open
/// containment test accepts them.
pub fn axial_round(p: Point, tile_radius: f64) -> (i32, i32) {
    let (q, r) = cube_round(p, tile_radius);
    if hexagon_contains(axial_center(q, r, tile_radius), tile_radius, p) {
        return (q, r);
    }
    const NEIGHBOURS: [(i32, i32); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    NEIGHBOURS
        .iter()
        .map(|&(dq, dr)| (q + dq, r + dr))
        .find(|&(nq, nr)| hexagon_contains(axial_center(nq, nr, tile_radius), tile_radius, p))
        .unwrap_or((q, r))
}

fn cube_round(p: Point, tile_radius: f64) -> (i32, i32) {
    let qf = (SQRT3 / 3.0 * p.x - p.y / 3.0) / tile_radius;
    let rf = (2.0 / 3.0 * p.y) / tile_radius;
    let sf = -qf - rf;
    let (mut q, mut r, s) = (qf.round(), rf.round(), sf.round());
    let (dq, dr, ds) = ((q - qf).abs(), (r - rf).abs(), (s - sf).abs());
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    (q as i32, r as i32)
}

/// Tiles of radius `tile_radius` anchored at the macrocell centre.
///
/// Every tile overlapping the macrocell of radius `r_mc` is kept. Tiles that
/// lie fully inside carry weight 1 and the ones crossing the boundary ½.
pub fn hex_tiling(r_mc: f64, tile_radius: f64) -> Result<HexTiling> {
    if !(tile_radius > 0.0) || !(r_mc > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radii must be positive, got r_mc = {r_mc}, tile_radius = {tile_radius}"
        )));
    }
    if tile_radius > r_mc {
        return Err(Error::InvalidArgument(format!(
            "tile radius {tile_radius} exceeds macrocell radius {r_mc}"
        )));
    }
    let h_mc = 0.5 * SQRT3 * r_mc;
    let h_t = 0.5 * SQRT3 * tile_radius;
    let span = ((r_mc + tile_radius) / (1.5 * tile_radius)).ceil() as i32 + 2;
    let mut found = Vec::new();
    for r in -span..=span {
        for q in -2 * span..=2 * span {
            let c = axial_center(q, r, tile_radius);
            let d: Vec<f64> = NORMALS.iter().map(|&n| c.dot(n).abs()).collect();
            // same-orientation hexagons overlap iff their centres are closer
            // than the summed apothems along every normal
            if d.iter().any(|&s| s >= h_mc + h_t) {
                continue;
            }
            let inside = d.iter().all(|&s| s + h_t <= h_mc * (1.0 + 1e-12));
            found.push(Tile {
                q,
                r,
                center: c,
                edge_weight: if inside { 1.0 } else { 0.5 },
            });
        }
    }
    found.sort_by(|a, b| {
        axial_distance(a.q, a.r)
            .cmp(&axial_distance(b.q, b.r))
            .then(
                a.center
                    .angle()
                    .rem_euclid(2.0 * PI)
                    .total_cmp(&b.center.angle().rem_euclid(2.0 * PI)),
            )
    });
    let index = found
        .iter()
        .enumerate()
        .map(|(i, t)| ((t.q, t.r), i))
        .collect();
    Ok(HexTiling {
        mc_radius: r_mc,
        tile_radius,
        tiles: found,
        index,
    })
}

/// Grid points of spacing `step` (anchored at the origin) inside the
/// macrocell of radius `r_mc`.
pub fn grid_points(r_mc: f64, step: f64) -> Vec<Point> {
    let n = (r_mc / step).ceil() as i64;
    let mut out = Vec::new();
    for j in -n..=n {
        for i in -n..=n {
            let p = Point::new(i as f64 * step, j as f64 * step);
            if hexagon_contains(Point::ORIGIN, r_mc, p) {
                out.push(p);
            }
        }
    }
    out
}
