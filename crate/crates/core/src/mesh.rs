//! Combinatorial deltahedron `(a, b)`: the quotient of the triangular grid by
//! the deck group of the tetrahedral unfolding, stored as a half-edge mesh.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{check_params, Error, Result};
use crate::lattice::{GridCoord, LatticeTriangle, TilingGroup};

pub type VertexId = usize;
pub type FaceId = usize;
pub type HalfEdgeId = usize;

/// Directed edge. Half-edge `3f + i` of face `f` runs from corner `i` to corner `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdge {
    pub origin: VertexId,
    pub twin: HalfEdgeId,
    pub next: HalfEdgeId,
    pub face: FaceId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaMesh {
    pub a: i64,
    pub b: i64,
    /// Counterclockwise (outward) vertex triples.
    pub faces: Vec<[VertexId; 3]>,
    pub half_edges: Vec<HalfEdge>,
    /// One outgoing half-edge per vertex.
    pub vertex_half_edge: Vec<HalfEdgeId>,
    /// Canonical lattice representative of each face in the tiling plane.
    pub face_lattice_rep: Vec<LatticeTriangle>,
    /// Canonical lattice representative of each vertex.
    pub vertex_lattice_rep: Vec<GridCoord>,
    /// Set by [`mirror_mesh`]; lattice representatives then describe the
    /// un-mirrored source surface.
    pub mirrored: bool,
}

/// Number of faces, `S(a, b) = 4(a² + ab + b²)`.
pub fn face_count(a: i64, b: i64) -> Result<i64> {
    check_params(a, b)?;
    Ok(4 * (a * a + a * b + b * b))
}

pub fn build_mesh(a: i64, b: i64) -> Result<DeltaMesh> {
    DeltaMesh::build(a, b)
}

/// Orientation-reversed copy of `m`.
pub fn mirror_mesh(m: &DeltaMesh) -> DeltaMesh {
    // Corner order [x, y, z] becomes [x, z, y]; new edge i is old edge 2 - i reversed.
    const SWAP: [usize; 3] = [2, 1, 0];
    let faces: Vec<[VertexId; 3]> = m.faces.iter().map(|&[x, y, z]| [x, z, y]).collect();
    let half_edges = (0..m.half_edges.len())
        .map(|h| {
            let (f, i) = (h / 3, h % 3);
            let old_twin = m.half_edges[3 * f + SWAP[i]].twin;
            HalfEdge {
                origin: faces[f][i],
                twin: 3 * (old_twin / 3) + SWAP[old_twin % 3],
                next: 3 * f + (i + 1) % 3,
                face: f,
            }
        })
        .collect();
    let mut out = DeltaMesh {
        a: m.a,
        b: m.b,
        faces,
        half_edges,
        vertex_half_edge: Vec::new(),
        face_lattice_rep: m.face_lattice_rep.clone(),
        vertex_lattice_rep: m.vertex_lattice_rep.clone(),
        mirrored: !m.mirrored,
    };
    out.vertex_half_edge = out.outgoing_representatives().expect("every vertex of a valid mesh has an edge");
    debug_assert!(out.validate().is_ok());
    out
}

impl DeltaMesh {
    pub fn build(a: i64, b: i64) -> Result<Self> {
        let group = TilingGroup::new(a, b)?;

        let face_reps: BTreeSet<LatticeTriangle> =
            group.cell_triangles().into_iter().map(|t| group.canonical_triangle(t)).collect();
        let face_reps: Vec<LatticeTriangle> = face_reps.into_iter().collect();
        let face_index: BTreeMap<LatticeTriangle, FaceId> =
            face_reps.iter().enumerate().map(|(i, t)| (*t, i)).collect();

        let vertex_reps: BTreeSet<GridCoord> =
            face_reps.iter().flat_map(|t| t.corners()).map(|c| group.canonical_point(c)).collect();
        let vertex_reps: Vec<GridCoord> = vertex_reps.into_iter().collect();
        let vertex_index: BTreeMap<GridCoord, VertexId> =
            vertex_reps.iter().enumerate().map(|(i, c)| (*c, i)).collect();

        let faces: Vec<[VertexId; 3]> =
            face_reps.iter().map(|t| t.corners().map(|c| vertex_index[&group.canonical_point(c)])).collect();

        // Twins follow lattice adjacency, which stays correct even if two
        // distinct edges happen to join the same pair of vertices.
        let mut half_edges = Vec::with_capacity(3 * faces.len());
        for (f, t) in face_reps.iter().enumerate() {
            let c = t.corners();
            for i in 0..3 {
                let (from, to, opposite) = (c[i], c[(i + 1) % 3], c[(i + 2) % 3]);
                let sum = from + to + from + to - opposite;
                let across = LatticeTriangle::from_corner_sum(sum)
                    .ok_or_else(|| Error::NonManifold(format!("no lattice triangle across edge {i} of face {f}")))?;
                let (rep, iso) = group.canonicalize_triangle(across);
                let g = face_index[&rep];
                let rc = rep.corners();
                let (tf, tt) = (iso.apply(to), iso.apply(from));
                let j = (0..3)
                    .find(|&j| rc[j] == tf && rc[(j + 1) % 3] == tt)
                    .ok_or_else(|| Error::NonManifold(format!("edge {i} of face {f} has no matching twin")))?;
                half_edges.push(HalfEdge { origin: faces[f][i], twin: 3 * g + j, next: 3 * f + (i + 1) % 3, face: f });
            }
        }

        let mut mesh = DeltaMesh {
            a,
            b,
            faces,
            half_edges,
            vertex_half_edge: Vec::new(),
            face_lattice_rep: face_reps,
            vertex_lattice_rep: vertex_reps,
            mirrored: false,
        };
        mesh.vertex_half_edge = mesh.outgoing_representatives()?;
        mesh.validate()?;
        Ok(mesh)
    }

    /// Build from raw oriented faces, pairing twins by vertex pairs. Used for
    /// derived meshes; lattice data is left empty.
    pub fn from_faces(a: i64, b: i64, faces: Vec<[VertexId; 3]>) -> Result<Self> {
        let mut directed = BTreeMap::new();
        for (f, tri) in faces.iter().enumerate() {
            for i in 0..3 {
                if directed.insert((tri[i], tri[(i + 1) % 3]), 3 * f + i).is_some() {
                    return Err(Error::NonManifold(format!(
                        "directed edge {}->{} used twice",
                        tri[i],
                        tri[(i + 1) % 3]
                    )));
                }
            }
        }
        let mut half_edges = Vec::with_capacity(3 * faces.len());
        for (f, tri) in faces.iter().enumerate() {
            for i in 0..3 {
                let twin = *directed
                    .get(&(tri[(i + 1) % 3], tri[i]))
                    .ok_or_else(|| Error::NonManifold(format!("boundary edge {}->{}", tri[i], tri[(i + 1) % 3])))?;
                half_edges.push(HalfEdge { origin: tri[i], twin, next: 3 * f + (i + 1) % 3, face: f });
            }
        }
        let mut mesh = DeltaMesh {
            a,
            b,
            faces,
            half_edges,
            vertex_half_edge: Vec::new(),
            face_lattice_rep: Vec::new(),
            vertex_lattice_rep: Vec::new(),
            mirrored: false,
        };
        mesh.vertex_half_edge = mesh.outgoing_representatives()?;
        mesh.validate()?;
        Ok(mesh)
    }

    fn outgoing_representatives(&self) -> Result<Vec<HalfEdgeId>> {
        let n = self.faces.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![usize::MAX; n];
        for (h, he) in self.half_edges.iter().enumerate() {
            if out[he.origin] == usize::MAX {
                out[he.origin] = h;
            }
        }
        if let Some(v) = out.iter().position(|&h| h == usize::MAX) {
            return Err(Error::NonManifold(format!("isolated vertex {v}")));
        }
        Ok(out)
    }

    /// Checks the closed oriented 2-manifold invariants and the counts
    /// `E = 3F/2`, `V = F/2 + 2`.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::NonManifold(msg));
        for (h, he) in self.half_edges.iter().enumerate() {
            let tw = &self.half_edges[he.twin];
            if tw.twin != h {
                return fail(format!("twin of twin of {h} is not {h}"));
            }
            if tw.origin != self.dest(h) || self.dest(he.twin) != he.origin {
                return fail(format!("half-edge {h} and its twin disagree on endpoints"));
            }
            if tw.face == he.face {
                return fail(format!("edge {h} glued to its own face"));
            }
        }
        let mut seen = vec![false; self.half_edges.len()];
        for v in 0..self.vertex_count() {
            for h in self.vertex_fan(v) {
                if self.half_edges[h].origin != v || seen[h] {
                    return fail(format!("fan of vertex {v} is inconsistent"));
                }
                seen[h] = true;
            }
        }
        if let Some(h) = seen.iter().position(|s| !s) {
            return fail(format!("vertex {} has more than one fan (half-edge {h})", self.half_edges[h].origin));
        }
        let (f, e, v) = (self.face_count(), self.edge_count(), self.vertex_count());
        if 2 * e != 3 * f || 2 * v != f + 4 {
            return fail(format!("counts F={f} E={e} V={v} violate E=3F/2, V=F/2+2"));
        }
        Ok(())
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_half_edge.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn dest(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[self.half_edges[h].next].origin
    }

    pub fn prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[self.half_edges[h].next].next
    }

    /// Outgoing half-edges of `v` in counterclockwise order.
    pub fn vertex_fan(&self, v: VertexId) -> Vec<HalfEdgeId> {
        let start = self.vertex_half_edge[v];
        let mut fan = vec![start];
        let mut h = self.half_edges[self.prev(start)].twin;
        while h != start {
            fan.push(h);
            if fan.len() > self.half_edges.len() {
                break;
            }
            h = self.half_edges[self.prev(h)].twin;
        }
        fan
    }

    /// Neighbours of `v` in counterclockwise order.
    pub fn vertex_ring(&self, v: VertexId) -> Vec<VertexId> {
        self.vertex_fan(v).into_iter().map(|h| self.dest(h)).collect()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_fan(v).len()
    }

    /// Unordered edges `(min, max)` indexed by the lower half-edge id.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.half_edges
            .iter()
            .enumerate()
            .filter(|(h, he)| *h < he.twin)
            .map(|(h, he)| (he.origin, self.dest(h)))
            .collect()
    }

    /// Faces sharing an edge with `f`, in edge order.
    pub fn face_neighbors(&self, f: FaceId) -> [FaceId; 3] {
        [0, 1, 2].map(|i| self.half_edges[self.half_edges[3 * f + i].twin].face)
    }

    /// Whether `v` is one of the four corners of the source tetrahedron.
    pub fn is_corner(&self, v: VertexId) -> bool {
        match self.vertex_lattice_rep.get(v) {
            Some(c) => TilingGroup::new(self.a, self.b).is_ok_and(|g| {
                let (cu, cv) = g.cell_coordinates(2 * *c);
                let det = g.determinant();
                cu % det == 0 && cv % det == 0
            }),
            None => self.degree(v) == 3,
        }
    }

    /// Total combinatorial angular defect `Σ (2π − deg·π/3)` measured in
    /// units of `π/3`; equals 12 (i.e. `4π`) on a closed surface.
    pub fn angular_defect_sixths(&self) -> i64 {
        (0..self.vertex_count()).map(|v| 6 - self.degree(v) as i64).sum()
    }

    pub fn to_document(&self) -> MeshDocument {
        MeshDocument {
            a: self.a,
            b: self.b,
            face_count: self.face_count(),
            edge_count: self.edge_count(),
            vertex_count: self.vertex_count(),
            mirrored: self.mirrored,
            faces: self.faces.clone(),
        }
    }
}

/// JSON form of a mesh.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub a: i64,
    pub b: i64,
    pub face_count: usize,
    pub edge_count: usize,
    pub vertex_count: usize,
    pub mirrored: bool,
    pub faces: Vec<[VertexId; 3]>,
}

/// Orientation-preserving combinatorial isomorphism from `m1` onto `m2`,
/// returned as the image of each vertex of `m1`.
pub fn find_isomorphism(m1: &DeltaMesh, m2: &DeltaMesh) -> Option<Vec<VertexId>> {
    if m1.face_count() != m2.face_count() || m1.vertex_count() != m2.vertex_count() {
        return None;
    }
    let mut deg1: Vec<usize> = (0..m1.vertex_count()).map(|v| m1.degree(v)).collect();
    let mut deg2: Vec<usize> = (0..m2.vertex_count()).map(|v| m2.degree(v)).collect();
    let start = 0;
    let start_deg = deg1[m1.half_edges[start].origin];
    deg1.sort_unstable();
    deg2.sort_unstable();
    if deg1 != deg2 {
        return None;
    }
    (0..m2.half_edges.len())
        .filter(|&h| m2.degree(m2.half_edges[h].origin) == start_deg)
        .find_map(|h| extend_isomorphism(m1, m2, start, h))
}

fn extend_isomorphism(m1: &DeltaMesh, m2: &DeltaMesh, h1: HalfEdgeId, h2: HalfEdgeId) -> Option<Vec<VertexId>> {
    let mut he_map = vec![usize::MAX; m1.half_edges.len()];
    let mut queue = VecDeque::from([(h1, h2)]);
    he_map[h1] = h2;
    while let Some((x, y)) = queue.pop_front() {
        let (ex, ey) = (&m1.half_edges[x], &m2.half_edges[y]);
        for (nx, ny) in [(ex.next, ey.next), (ex.twin, ey.twin)] {
            if he_map[nx] == usize::MAX {
                he_map[nx] = ny;
                queue.push_back((nx, ny));
            } else if he_map[nx] != ny {
                return None;
            }
        }
    }
    let mut vmap = vec![usize::MAX; m1.vertex_count()];
    let mut used = vec![false; m2.vertex_count()];
    for (x, &y) in he_map.iter().enumerate() {
        if y == usize::MAX {
            return None;
        }
        let (vx, vy) = (m1.half_edges[x].origin, m2.half_edges[y].origin);
        if vmap[vx] == usize::MAX {
            if used[vy] {
                return None;
            }
            used[vy] = true;
            vmap[vx] = vy;
        } else if vmap[vx] != vy {
            return None;
        }
    }
    Some(vmap)
}

pub fn is_isomorphic(m1: &DeltaMesh, m2: &DeltaMesh) -> bool {
    find_isomorphism(m1, m2).is_some()
}
