//! Geodesic triangle bands.
//!
//! A straight row of unit triangles in the tiling plane projects to a
//! geodesic strip on the deltahedron. Walking the row and canonicalizing each
//! triangle, the strip closes up exactly when it reaches a translational copy
//! of its first triangle, giving a band of `S(a,b) / gcd(a,b)` faces.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{check_params, Error, Result};
use crate::lattice::{GridCoord, IsometryKind, LatticeTriangle, Orientation, TilingGroup};
use crate::mesh::{DeltaMesh, FaceId};

/// One of the three families of parallel lattice rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StripDirection {
    /// Along `eₓ`.
    #[default]
    Horizontal,
    /// Along `e_y` (60°).
    Rising,
    /// Along `e_y − eₓ` (120°).
    Falling,
}

impl StripDirection {
    pub const ALL: [StripDirection; 3] = [StripDirection::Horizontal, StripDirection::Rising, StripDirection::Falling];

    /// Number of 60° turns taking horizontal rows onto this family.
    pub fn turns(self) -> i64 {
        match self {
            StripDirection::Horizontal => 0,
            StripDirection::Rising => 1,
            StripDirection::Falling => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicBand {
    pub a: i64,
    pub b: i64,
    /// Faces in strip order; consecutive faces (cyclically) share an edge.
    pub faces: Vec<FaceId>,
    pub direction: StripDirection,
    pub width_rows: usize,
    /// The traced row of triangles in the tiling plane.
    pub plane_triangles: Vec<LatticeTriangle>,
}

impl GeodesicBand {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// Straight planar unfolding of a band: one horizontal row of unit triangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarStrip {
    /// Counterclockwise corner triples, all in grid rows `q ∈ {0, 1}`.
    pub triangles: Vec<[GridCoord; 3]>,
    pub orientations: Vec<Orientation>,
    /// Translation `(x, 0)` identifying the strip's end with its start.
    pub closure: GridCoord,
}

impl PlanarStrip {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

fn gcd(mut x: i64, mut y: i64) -> i64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x.abs()
}

/// Number of bands, `gcd(a, b)` with `gcd(n, 0) = n`.
pub fn band_count(a: i64, b: i64) -> Result<i64> {
    check_params(a, b)?;
    Ok(gcd(a, b))
}

pub fn trace_bands(m: &DeltaMesh) -> Result<Vec<GeodesicBand>> {
    trace_bands_along(m, StripDirection::Horizontal)
}

/// Decompose the mesh into bands running along `direction`. Each band starts
/// at the smallest uncovered face and runs towards increasing x in the
/// direction's frame.
pub fn trace_bands_along(m: &DeltaMesh, direction: StripDirection) -> Result<Vec<GeodesicBand>> {
    let group = TilingGroup::new(m.a, m.b)?;
    if m.face_lattice_rep.len() != m.face_count() {
        return Err(Error::BandDecomposition("mesh carries no lattice representatives".into()));
    }
    let face_of: HashMap<LatticeTriangle, FaceId> =
        m.face_lattice_rep.iter().enumerate().map(|(f, t)| (*t, f)).collect();
    let turns = direction.turns();

    let mut owner: Vec<Option<usize>> = vec![None; m.face_count()];
    let mut bands = Vec::new();
    while let Some(start) = owner.iter().position(Option::is_none) {
        let mut row = m.face_lattice_rep[start].rotate(-turns);
        let mut faces = Vec::new();
        let mut plane_triangles = Vec::new();
        loop {
            let t = row.rotate(turns);
            let (rep, iso) = group.canonicalize_triangle(t);
            let f = face_of[&rep];
            if f == start && !faces.is_empty() {
                if iso.kind != IsometryKind::Translation {
                    return Err(Error::BandDecomposition(format!(
                        "band from face {start} closed on a half-turn image"
                    )));
                }
                break;
            }
            if let Some(other) = owner[f] {
                return Err(Error::BandDecomposition(format!(
                    "face {f} reached twice (band {other} and band {})",
                    bands.len()
                )));
            }
            owner[f] = Some(bands.len());
            faces.push(f);
            plane_triangles.push(t);
            row = row.row_next();
        }
        bands.push(GeodesicBand { a: m.a, b: m.b, faces, direction, width_rows: 1, plane_triangles });
    }

    let k = gcd(m.a, m.b) as usize;
    let expected = m.face_count() / k;
    if bands.len() != k || bands.iter().any(|b| b.len() != expected) {
        return Err(Error::BandDecomposition(format!(
            "expected {k} bands of {expected} faces, got lengths {:?}",
            bands.iter().map(GeodesicBand::len).collect::<Vec<_>>()
        )));
    }
    Ok(bands)
}

/// Lay the band out as a straight strip starting at the origin.
pub fn unfold_band(band: &GeodesicBand) -> PlanarStrip {
    let turns = band.direction.turns();
    let row: Vec<LatticeTriangle> = band.plane_triangles.iter().map(|t| t.rotate(-turns)).collect();
    let origin = row.first().map_or(GridCoord::ORIGIN, |t| GridCoord::new(t.anchor.p, t.anchor.q));
    let shifted: Vec<LatticeTriangle> = row.iter().map(|t| t.translate(-origin)).collect();
    PlanarStrip {
        triangles: shifted.iter().map(|t| t.corners()).collect(),
        orientations: shifted.iter().map(|t| t.orient).collect(),
        closure: GridCoord::new(band.len() as i64 / 2, 0),
    }
}

/// Whether two triangles of `triangles` are related by a half-turn of the group.
pub fn has_half_turn_pair(triangles: &[LatticeTriangle], group: &TilingGroup) -> bool {
    let mut kinds: HashMap<LatticeTriangle, IsometryKind> = HashMap::new();
    triangles.iter().any(|t| {
        let (rep, iso) = group.canonicalize_triangle(*t);
        matches!(kinds.insert(rep, iso.kind), Some(k) if k != iso.kind)
    })
}

/// Whether two triangles of `triangles` are translates of each other under the group.
pub fn has_translation_duplicate(triangles: &[LatticeTriangle], group: &TilingGroup) -> bool {
    let mut seen: HashMap<LatticeTriangle, IsometryKind> = HashMap::new();
    triangles.iter().any(|t| {
        let (rep, iso) = group.canonicalize_triangle(*t);
        matches!(seen.insert(rep, iso.kind), Some(k) if k == iso.kind)
    })
}

pub fn no_half_turn_in_band(band: &GeodesicBand) -> bool {
    match TilingGroup::new(band.a, band.b) {
        Ok(g) => !has_half_turn_pair(&band.plane_triangles, &g),
        Err(_) => false,
    }
}

/// JSON form of a band decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandReport {
    pub a: i64,
    pub b: i64,
    pub direction: StripDirection,
    pub band_count: usize,
    pub band_length: usize,
    pub bands: Vec<Vec<FaceId>>,
}

impl BandReport {
    pub fn new(m: &DeltaMesh, direction: StripDirection, bands: &[GeodesicBand]) -> Self {
        BandReport {
            a: m.a,
            b: m.b,
            direction,
            band_count: bands.len(),
            band_length: bands.first().map_or(0, GeodesicBand::len),
            bands: bands.iter().map(|b| b.faces.clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgOptions {
    /// Rendered length of one unit edge.
    pub mm_per_unit: f64,
    pub margin_mm: f64,
    pub stroke_mm: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { mm_per_unit: 10.0, margin_mm: 5.0, stroke_mm: 0.2 }
    }
}

/// Papercraft SVG of a strip: outline solid, fold lines thin, the two glued
/// closure edges dashed.
pub fn strip_svg(strip: &PlanarStrip, opts: &SvgOptions) -> String {
    let s = opts.mm_per_unit;
    let height = 3f64.sqrt() / 2.0;
    let width_units = strip.closure.p as f64 + 1.0;
    let (w, h) = (width_units * s + 2.0 * opts.margin_mm, height * s + 2.0 * opts.margin_mm);
    let pt = |c: GridCoord| {
        let [x, y] = c.to_euclid::<f64>();
        (opts.margin_mm + x * s, opts.margin_mm + (height - y) * s)
    };
    let line = |out: &mut String, p: GridCoord, q: GridCoord, class: &str| {
        let ((x1, y1), (x2, y2)) = (pt(p), pt(q));
        let _ = writeln!(out, r#"  <line class="{class}" x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}"/>"#);
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.4}mm" height="{h:.4}mm" viewBox="0 0 {w:.4} {h:.4}">"#
    );
    let _ = writeln!(
        out,
        "  <style>line {{ stroke: black; stroke-width: {sw:.3}; }} .fold {{ stroke: #888; }} .closure {{ stroke-dasharray: {d:.3} {d:.3}; }}</style>",
        sw = opts.stroke_mm,
        d = s / 10.0
    );
    let n = strip.triangles.len();
    for (i, tri) in strip.triangles.iter().enumerate() {
        // Corners (x, y, z): edge (z, x) is shared with the previous
        // triangle; Up triangles share (y, z) with the next one and Down
        // triangles (x, y). The remaining edge lies on the strip boundary.
        let [x, y, z] = *tri;
        let (boundary, trailing) = match strip.orientations[i] {
            Orientation::Up => ((x, y), (y, z)),
            Orientation::Down => ((y, z), (x, y)),
        };
        line(&mut out, boundary.0, boundary.1, "cut");
        line(&mut out, trailing.0, trailing.1, if i + 1 == n { "closure" } else { "fold" });
        if i == 0 {
            line(&mut out, z, x, "closure");
        }
    }
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use std::collections::HashSet;

    #[test]
    fn band_counts() {
        assert_eq!(band_count(2, 2).unwrap(), 2);
        assert_eq!(band_count(5, 6).unwrap(), 1);
        assert_eq!(band_count(6, 9).unwrap(), 3);
        assert_eq!(band_count(4, 0).unwrap(), 4);
        assert!(band_count(0, 0).is_err());
    }

    #[test]
    fn small_band_examples() {
        let bands = trace_bands(&build_mesh(1, 0).unwrap()).unwrap();
        assert_eq!((bands.len(), bands[0].len()), (1, 4));
        let bands = trace_bands(&build_mesh(2, 2).unwrap()).unwrap();
        assert_eq!(bands.iter().map(GeodesicBand::len).collect::<Vec<_>>(), vec![24, 24]);
        let bands = trace_bands(&build_mesh(2, 1).unwrap()).unwrap();
        assert_eq!((bands.len(), bands[0].len()), (1, 28));
    }

    /// Walks the row from a face with no knowledge of the band length and
    /// reports the step at which the first face repeats.
    fn first_repeat(a: i64, b: i64) -> usize {
        let m = build_mesh(a, b).unwrap();
        let g = TilingGroup::new(a, b).unwrap();
        let mut seen = HashSet::new();
        let mut t = m.face_lattice_rep[0];
        loop {
            if !seen.insert(g.canonical_triangle(t)) {
                return seen.len();
            }
            t = t.row_next();
        }
    }

    #[test]
    fn row_walk_repeats_after_band_length() {
        assert_eq!(first_repeat(2, 1), 28);
        assert_eq!(first_repeat(2, 2), 24);
        assert_eq!(first_repeat(6, 9), 228);
    }

    #[test]
    fn strip_examples() {
        for (a, b, n, x) in [(1, 0, 4, 2), (1, 1, 12, 6), (5, 6, 364, 182)] {
            let band = &trace_bands(&build_mesh(a, b).unwrap()).unwrap()[0];
            let strip = unfold_band(band);
            assert_eq!(strip.len(), n);
            assert_eq!(strip.closure, GridCoord::new(x, 0));
        }
    }

    #[test]
    fn strips_are_straight_alternating_and_adjacent() {
        let m = build_mesh(3, 2).unwrap();
        for dir in StripDirection::ALL {
            for band in trace_bands_along(&m, dir).unwrap() {
                let strip = unfold_band(&band);
                assert!(strip.triangles.iter().flatten().all(|c| c.q == 0 || c.q == 1));
                assert!(strip.orientations.windows(2).all(|w| w[0] != w[1]));
                let n = band.len();
                for i in 0..n {
                    let (f, g) = (band.faces[i], band.faces[(i + 1) % n]);
                    assert!(m.face_neighbors(f).contains(&g), "faces {f},{g} not adjacent");
                }
            }
        }
    }

    #[test]
    fn traced_bands_have_no_half_turn_pairs() {
        for (a, b) in [(2, 1), (3, 3)] {
            for band in trace_bands(&build_mesh(a, b).unwrap()).unwrap() {
                assert!(no_half_turn_in_band(&band));
            }
        }
    }

    #[test]
    fn over_extended_strip_is_detected() {
        let g = TilingGroup::new(2, 1).unwrap();
        let band = &trace_bands(&build_mesh(2, 1).unwrap()).unwrap()[0];
        let mut tris = band.plane_triangles.clone();
        let mut t = *tris.last().unwrap();
        for _ in 0..2 {
            t = t.row_next();
            tris.push(t);
        }
        assert_eq!(tris.len(), 30);
        assert!(has_translation_duplicate(&tris, &g) || has_half_turn_pair(&tris, &g));
        assert!(!has_translation_duplicate(&band.plane_triangles, &g));
    }

    #[test]
    fn direction_independent_band_count() {
        for a in 0..=6 {
            for b in 0..=6 {
                if a + b == 0 {
                    continue;
                }
                let m = build_mesh(a, b).unwrap();
                for dir in StripDirection::ALL {
                    let bands = trace_bands_along(&m, dir).unwrap();
                    assert_eq!(bands.len() as i64, gcd(a, b), "({a},{b}) {dir:?}");
                }
            }
        }
    }

    #[test]
    fn svg_has_one_edge_per_triangle_plus_closures() {
        let band = &trace_bands(&build_mesh(1, 1).unwrap()).unwrap()[0];
        let strip = unfold_band(band);
        let svg = strip_svg(&strip, &SvgOptions::default());
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("<line").count(), 2 * strip.len() + 1);
        assert_eq!(svg.matches(r#"class="closure""#).count(), 2);
        assert_eq!(svg.matches(r#"class="fold""#).count(), strip.len() - 1);
    }
}
