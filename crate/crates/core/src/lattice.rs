//! Exact arithmetic on the unit triangular grid and the quotient of the plane
//! by the symmetry group of the tetrahedral unfolding.
//!
//! Grid coordinates `(p, q)` stand for the point `p·eₓ + q·e_y`, where the two
//! unit vectors enclose 60°. The unfolding of the scaled tetrahedron is the
//! "triangle of triangles" net with corners `0`, `u = 2w`, `v = 2ωw`, where
//! `w = a·eₓ + b·e_y` is one tetrahedron edge and `ω` is the rotation by 60°.
//! Copies of that net tile the plane; the deck group is
//!
//! ```text
//! { x ↦ x + t,  x ↦ -x + t  :  t ∈ ℤu + ℤv }
//! ```
//!
//! i.e. translations by `u`, `v` together with half-turns about the points of
//! `ℤw + ℤωw`. Those centres are the images of the four tetrahedron corners.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{check_params, Result};
use crate::scalar::Real;

/// Point of the triangular grid, `p·eₓ + q·e_y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridCoord {
    pub p: i64,
    pub q: i64,
}

impl GridCoord {
    pub const ORIGIN: GridCoord = GridCoord { p: 0, q: 0 };

    pub const fn new(p: i64, q: i64) -> Self {
        GridCoord { p, q }
    }

    /// Cartesian image `(p + q/2, q·√3/2)`.
    pub fn to_euclid<T: Real>(self) -> [T; 2] {
        let p = T::lit(self.p as f64);
        let q = T::lit(self.q as f64);
        let half = T::lit(0.5);
        [p + q * half, q * T::lit(3.0).sqrt() * half]
    }

    /// Rotation by +60° about the origin: `eₓ ↦ e_y`, `e_y ↦ e_y − eₓ`.
    pub const fn rotate60(self) -> Self {
        GridCoord::new(-self.q, self.p + self.q)
    }

    /// Rotation by `k · 60°`, `k` taken modulo 6.
    pub fn rotate(self, k: i64) -> Self {
        (0..k.rem_euclid(6)).fold(self, |c, _| c.rotate60())
    }

    /// 2D cross product in grid coordinates. The Euclidean cross product is
    /// this value times `√3/2`.
    pub const fn cross(self, other: GridCoord) -> i64 {
        self.p * other.q - self.q * other.p
    }

    /// Norm `p² + pq + q²` (squared Euclidean length).
    pub const fn norm(self) -> i64 {
        self.p * self.p + self.p * self.q + self.q * self.q
    }

    fn key(self) -> (i64, i64) {
        (self.q, self.p)
    }
}

impl Add for GridCoord {
    type Output = GridCoord;
    fn add(self, o: GridCoord) -> GridCoord {
        GridCoord::new(self.p + o.p, self.q + o.q)
    }
}

impl Sub for GridCoord {
    type Output = GridCoord;
    fn sub(self, o: GridCoord) -> GridCoord {
        GridCoord::new(self.p - o.p, self.q - o.q)
    }
}

impl Neg for GridCoord {
    type Output = GridCoord;
    fn neg(self) -> GridCoord {
        GridCoord::new(-self.p, -self.q)
    }
}

impl Mul<GridCoord> for i64 {
    type Output = GridCoord;
    fn mul(self, c: GridCoord) -> GridCoord {
        GridCoord::new(self * c.p, self * c.q)
    }
}

/// Orders grid points by `(q, p)`.
impl Ord for GridCoord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for GridCoord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Up => Orientation::Down,
            Orientation::Down => Orientation::Up,
        }
    }
}

/// Unit cell of the grid. Ordered by `(anchor.q, anchor.p, orient)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeTriangle {
    pub anchor: GridCoord,
    pub orient: Orientation,
}

impl LatticeTriangle {
    pub const fn up(p: i64, q: i64) -> Self {
        LatticeTriangle { anchor: GridCoord::new(p, q), orient: Orientation::Up }
    }

    pub const fn down(p: i64, q: i64) -> Self {
        LatticeTriangle { anchor: GridCoord::new(p, q), orient: Orientation::Down }
    }

    /// Corners in counterclockwise order.
    pub fn corners(self) -> [GridCoord; 3] {
        let GridCoord { p, q } = self.anchor;
        match self.orient {
            Orientation::Up => [GridCoord::new(p, q), GridCoord::new(p + 1, q), GridCoord::new(p, q + 1)],
            Orientation::Down => [GridCoord::new(p + 1, q), GridCoord::new(p + 1, q + 1), GridCoord::new(p, q + 1)],
        }
    }

    /// Sum of the corners; three times the centroid. Identifies the triangle.
    pub fn corner_sum(self) -> GridCoord {
        let [x, y, z] = self.corners();
        x + y + z
    }

    /// The triangle whose corner sum is `sum`, if any.
    pub fn from_corner_sum(sum: GridCoord) -> Option<Self> {
        // Up(p,q) sums to (3p+1, 3q+1), Down(p,q) to (3p+2, 3q+2).
        let (rp, rq) = (sum.p.rem_euclid(3), sum.q.rem_euclid(3));
        let orient = match (rp, rq) {
            (1, 1) => Orientation::Up,
            (2, 2) => Orientation::Down,
            _ => return None,
        };
        Some(LatticeTriangle { anchor: GridCoord::new(sum.p.div_euclid(3), sum.q.div_euclid(3)), orient })
    }

    pub fn translate(self, t: GridCoord) -> Self {
        LatticeTriangle { anchor: self.anchor + t, orient: self.orient }
    }

    /// Point reflection through the origin.
    pub fn negate(self) -> Self {
        LatticeTriangle { anchor: GridCoord::new(-self.anchor.p - 1, -self.anchor.q - 1), orient: self.orient.flip() }
    }

    pub fn rotate60(self) -> Self {
        let GridCoord { p, q } = self.anchor;
        match self.orient {
            Orientation::Up => LatticeTriangle::down(-q - 1, p + q),
            Orientation::Down => LatticeTriangle::up(-q - 1, p + q + 1),
        }
    }

    pub fn rotate(self, k: i64) -> Self {
        (0..k.rem_euclid(6)).fold(self, |t, _| t.rotate60())
    }

    /// Next triangle of the horizontal row, moving towards +x.
    pub fn row_next(self) -> Self {
        match self.orient {
            Orientation::Up => LatticeTriangle { orient: Orientation::Down, ..self },
            Orientation::Down => LatticeTriangle::up(self.anchor.p + 1, self.anchor.q),
        }
    }

    fn key(self) -> (i64, i64, Orientation) {
        (self.anchor.q, self.anchor.p, self.orient)
    }
}

impl Ord for LatticeTriangle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for LatticeTriangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsometryKind {
    Translation,
    HalfTurn,
}

/// Element of the deck group, `x ↦ ±x + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Isometry {
    pub kind: IsometryKind,
    /// For a translation the translation vector; for a half-turn twice the
    /// centre (so half-integer centres stay exact).
    pub offset: GridCoord,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry::translation(GridCoord::ORIGIN);

    pub const fn translation(t: GridCoord) -> Self {
        Isometry { kind: IsometryKind::Translation, offset: t }
    }

    /// Half-turn about the point `doubled_center / 2`.
    pub const fn half_turn(doubled_center: GridCoord) -> Self {
        Isometry { kind: IsometryKind::HalfTurn, offset: doubled_center }
    }

    /// Doubled centre of a half-turn.
    pub fn doubled_center(&self) -> Option<GridCoord> {
        match self.kind {
            IsometryKind::HalfTurn => Some(self.offset),
            IsometryKind::Translation => None,
        }
    }

    pub fn apply(&self, x: GridCoord) -> GridCoord {
        match self.kind {
            IsometryKind::Translation => x + self.offset,
            IsometryKind::HalfTurn => self.offset - x,
        }
    }

    pub fn apply_triangle(&self, t: LatticeTriangle) -> LatticeTriangle {
        match self.kind {
            IsometryKind::Translation => t.translate(self.offset),
            IsometryKind::HalfTurn => t.negate().translate(self.offset),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let offset = self.apply(other.offset);
        let kind = if self.kind == other.kind { IsometryKind::Translation } else { IsometryKind::HalfTurn };
        Isometry { kind, offset }
    }

    pub fn inverse(&self) -> Isometry {
        match self.kind {
            IsometryKind::Translation => Isometry::translation(-self.offset),
            IsometryKind::HalfTurn => *self,
        }
    }
}

/// Deck group of the tetrahedral unfolding for parameters `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingGroup {
    pub a: i64,
    pub b: i64,
    /// `2w = (2a, 2b)`.
    pub u: GridCoord,
    /// `2ωw = (−2b, 2a + 2b)`.
    pub v: GridCoord,
    /// Doubled half-turn centres, one per tetrahedron corner, lying in the
    /// fundamental translation cell.
    pub half_turn_centers: [GridCoord; 4],
}

impl TilingGroup {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        check_params(a, b)?;
        let u = GridCoord::new(2 * a, 2 * b);
        let v = GridCoord::new(-2 * b, 2 * a + 2 * b);
        Ok(TilingGroup { a, b, u, v, half_turn_centers: [GridCoord::ORIGIN, u, v, u + v] })
    }

    /// One tetrahedron edge, `w = a·eₓ + b·e_y`.
    pub fn edge_vector(&self) -> GridCoord {
        GridCoord::new(self.a, self.b)
    }

    /// `det[u; v] = 4(a² + ab + b²)`, the number of unit triangles in the quotient.
    pub fn determinant(&self) -> i64 {
        self.u.cross(self.v)
    }

    /// Coordinates of `x` in the `(u, v)` basis, scaled by the determinant.
    pub fn cell_coordinates(&self, x: GridCoord) -> (i64, i64) {
        (x.cross(self.v), self.u.cross(x))
    }

    /// Translation `m·u + n·v` bringing `x` into the half-open cell `[0,1)u + [0,1)v`.
    pub fn reduction(&self, x: GridCoord) -> GridCoord {
        let det = self.determinant();
        let (cu, cv) = self.cell_coordinates(x);
        let m = cu.div_euclid(det);
        let n = cv.div_euclid(det);
        -(m * self.u + n * self.v)
    }

    pub fn reduce_point(&self, x: GridCoord) -> GridCoord {
        x + self.reduction(x)
    }

    pub fn in_cell(&self, x: GridCoord) -> bool {
        self.reduction(x) == GridCoord::ORIGIN
    }

    /// Whether `m·u + n·v` for some integers.
    pub fn is_translation(&self, t: GridCoord) -> bool {
        let det = self.determinant();
        let (cu, cv) = self.cell_coordinates(t);
        cu % det == 0 && cv % det == 0
    }

    /// Whether `g` belongs to the group.
    pub fn contains(&self, g: &Isometry) -> bool {
        self.is_translation(g.offset)
    }

    pub fn canonical_point(&self, x: GridCoord) -> GridCoord {
        self.canonicalize_point(x).0
    }

    /// Orbit representative of a grid point and a group element carrying `x` to it.
    pub fn canonicalize_point(&self, x: GridCoord) -> (GridCoord, Isometry) {
        let direct = Isometry::translation(self.reduction(x));
        let reflected = Isometry::half_turn(self.reduction(-x));
        let a = direct.apply(x);
        let b = reflected.apply(x);
        if b < a {
            (b, reflected)
        } else {
            (a, direct)
        }
    }

    pub fn canonical_triangle(&self, t: LatticeTriangle) -> LatticeTriangle {
        self.canonicalize_triangle(t).0
    }

    /// Orbit representative of `t` (smallest `(q, p, orient)` among the two
    /// orbit members anchored in the fundamental cell) and the group element
    /// mapping `t` onto it.
    pub fn canonicalize_triangle(&self, t: LatticeTriangle) -> (LatticeTriangle, Isometry) {
        let direct = Isometry::translation(self.reduction(t.anchor));
        let n = t.negate();
        let reflected = Isometry::half_turn(self.reduction(n.anchor));
        let a = direct.apply_triangle(t);
        let b = reflected.apply_triangle(t);
        if b < a {
            (b, reflected)
        } else {
            (a, direct)
        }
    }

    /// All triangles anchored in the fundamental translation cell (`2·S` of them).
    pub fn cell_triangles(&self) -> Vec<LatticeTriangle> {
        let mut out = Vec::with_capacity(2 * self.determinant() as usize);
        for anchor in self.cell_points() {
            out.push(LatticeTriangle { anchor, orient: Orientation::Up });
            out.push(LatticeTriangle { anchor, orient: Orientation::Down });
        }
        out
    }

    /// All grid points in the fundamental translation cell (`S` of them).
    pub fn cell_points(&self) -> Vec<GridCoord> {
        let corners = [GridCoord::ORIGIN, self.u, self.v, self.u + self.v];
        let pmin = corners.iter().map(|c| c.p).min().unwrap_or(0);
        let pmax = corners.iter().map(|c| c.p).max().unwrap_or(0);
        let qmin = corners.iter().map(|c| c.q).min().unwrap_or(0);
        let qmax = corners.iter().map(|c| c.q).max().unwrap_or(0);
        let mut out = Vec::with_capacity(self.determinant() as usize);
        for q in qmin..=qmax {
            for p in pmin..=pmax {
                let x = GridCoord::new(p, q);
                if self.in_cell(x) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Locate an orbit member of `x` inside the unfolding net (the triangle
    /// `0, u, v`) and return its barycentric weights on `u` and `v` as
    /// numerators over [`Self::determinant`].
    pub fn net_coordinates(&self, x: GridCoord) -> (i64, i64) {
        let det = self.determinant();
        let y = self.reduce_point(x);
        let (cu, cv) = self.cell_coordinates(y);
        if cu + cv <= det {
            (cu, cv)
        } else {
            // Second half of the cell is the half-turn image about (u + v)/2.
            self.cell_coordinates(self.u + self.v - y)
        }
    }
}

/// Convenience wrapper for [`TilingGroup::new`].
pub fn tiling_group(a: i64, b: i64) -> Result<TilingGroup> {
    TilingGroup::new(a, b)
}

/// Convenience wrapper for [`TilingGroup::canonical_triangle`].
pub fn canonical_triangle(t: LatticeTriangle, g: &TilingGroup) -> LatticeTriangle {
    g.canonical_triangle(t)
}

pub fn to_euclid<T: Real>(c: GridCoord) -> [T; 2] {
    c.to_euclid()
}
