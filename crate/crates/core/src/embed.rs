//! Unit-edge embeddings of deltahedra in 3-space.
//!
//! Vertices start at their positions on the folded source tetrahedron and are
//! driven by a pseudo-dynamic simulation: every edge is a linear spring of
//! rest length one, a decaying uniform pressure inflates the surface, and
//! kinetic damping removes energy. The length constraints admit several
//! stable states (some with dimpled vertices), so the maximal-volume form is
//! searched by seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, add, cross, det3, dot, norm, normalize, scale, sub, Vec3};
use crate::lattice::{GridCoord, TilingGroup};
use crate::mesh::{DeltaMesh, VertexId};
use crate::scalar::Real;

/// Volume of the unit regular tetrahedron, `1 / (6√2)`.
pub fn unit_tetrahedron_volume<T: Real>() -> T {
    T::one() / (T::lit(6.0) * T::SQRT_2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureSchedule {
    pub initial: f64,
    /// Multiplicative decay per step.
    pub decay: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxConfig {
    /// Bound on `max |‖edge‖ − 1|`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub time_step: f64,
    pub kinetic_damping: bool,
    pub pressure: PressureSchedule,
    pub restarts: usize,
    pub seed: u64,
    /// Upper bound of the random outward offset applied by [`initial_guess`].
    pub max_perturbation: f64,
    /// Gauss-Newton steps applied when relaxation stops short of the tolerance
    /// (0 disables).
    pub polish_steps: usize,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig {
            tolerance: 1e-9,
            max_iterations: 200_000,
            time_step: 0.05,
            kinetic_damping: true,
            pressure: PressureSchedule { initial: 0.2, decay: 0.999 },
            restarts: 8,
            seed: 0,
            max_perturbation: 0.1,
            polish_steps: 8,
        }
    }
}

impl RelaxConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if self.time_step.is_nan() || self.time_step <= 0.0 {
            return bad("time_step must be positive");
        }
        if !(0.0..=1.0).contains(&self.pressure.decay) || !self.pressure.initial.is_finite() {
            return bad("pressure decay must lie in [0, 1]");
        }
        if self.max_perturbation.is_nan() || self.max_perturbation < 0.0 {
            return bad("max_perturbation must be non-negative");
        }
        Ok(())
    }

    /// Configuration of restart `k`: its own seed, and the initial pressure
    /// scaled by 1, 0.75, 1.25, 0.5, 1.5, ... (never below zero).
    pub fn attempt(&self, k: usize) -> RelaxConfig {
        let mut cfg = self.clone();
        cfg.seed = self.seed.wrapping_add(k as u64);
        let step = 0.25 * k.div_ceil(2) as f64;
        let factor = if k % 2 == 1 { 1.0 - step } else { 1.0 + step };
        cfg.pressure.initial = self.pressure.initial * factor.max(0.0);
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding<T> {
    pub positions: Vec<Vec3<T>>,
    /// `max |‖edge‖ − 1|` over all edges.
    pub residual: T,
    pub converged: bool,
    pub iterations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics<T> {
    pub volume: T,
    pub relative_volume: T,
    pub min_solid_angle: T,
    pub max_solid_angle: T,
    pub all_popped: bool,
}

/// Outcome of one restart of [`relax_max_volume`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt<T> {
    pub seed: u64,
    pub volume: T,
    pub residual: T,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxVolumeResult<T> {
    pub best: Embedding<T>,
    pub attempts: Vec<Attempt<T>>,
}

/// The source tetrahedron scaled so that grid triangles have unit edges.
/// Corners `P, Q, R, T` receive the net corner and the three side midpoints.
fn source_tetrahedron<T: Real>(g: &TilingGroup) -> [Vec3<T>; 4] {
    let edge = T::lit(g.edge_vector().norm() as f64).sqrt();
    let s = edge / (T::lit(2.0) * T::SQRT_2());
    [[s, s, s], [s, -s, -s], [-s, -s, s], [-s, s, -s]]
}

/// Position of a lattice vertex on the folded source tetrahedron.
fn geodesic_position<T: Real>(g: &TilingGroup, corners: &[Vec3<T>; 4], x: GridCoord) -> Vec3<T> {
    let [p, q, r, t] = *corners;
    let det = T::lit(g.determinant() as f64);
    let (cu, cv) = g.net_coordinates(x);
    let (lu, lv) = (T::lit(cu as f64) / det, T::lit(cv as f64) / det);
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let affine =
        |o: Vec3<T>, e1: Vec3<T>, e2: Vec3<T>, s: T, w: T| add(o, add(scale(sub(e1, o), s), scale(sub(e2, o), w)));
    if lu + lv <= half {
        // Corner triangle at the net origin: (0, u/2, v/2) -> (P, Q, T).
        affine(p, q, t, two * lu, two * lv)
    } else if lu >= half {
        // (u/2, u, (u+v)/2) -> (Q, P, R).
        affine(q, p, r, two * lu - T::one(), two * lv)
    } else if lv >= half {
        // (v/2, (u+v)/2, v) -> (T, R, P).
        affine(t, r, p, two * lu, two * lv - T::one())
    } else {
        // Central face (u/2, (u+v)/2, v/2) -> (Q, R, T).
        affine(q, r, t, two * lu + two * lv - T::one(), T::one() - two * lu)
    }
}

/// Area-weighted vertex normals (sum of face cross products, normalized).
pub fn vertex_normals<T: Real>(m: &DeltaMesh, pos: &[Vec3<T>]) -> Vec<Vec3<T>> {
    let mut acc = vec![geom::zero::<T>(); pos.len()];
    for &[i, j, k] in &m.faces {
        let n = cross(sub(pos[j], pos[i]), sub(pos[k], pos[i]));
        for v in [i, j, k] {
            acc[v] = add(acc[v], n);
        }
    }
    acc.into_iter().map(|n| normalize(n).unwrap_or([T::zero(); 3])).collect()
}

/// Geodesic positions on the source tetrahedron, pushed outward along the
/// vertex normals by a seeded random amount in `[0, max_perturbation]`.
/// Tetrahedron corners are not moved.
pub fn initial_guess<T: Real>(m: &DeltaMesh, cfg: &RelaxConfig) -> Result<Vec<Vec3<T>>> {
    let g = TilingGroup::new(m.a, m.b)?;
    let pos = geodesic_positions(m, &g)?;
    let normals = vertex_normals(m, &pos);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(pos
        .iter()
        .zip(&normals)
        .enumerate()
        .map(|(v, (p, n))| {
            let amount: f64 = rng.gen_range(0.0..=1.0) * cfg.max_perturbation;
            if m.is_corner(v) {
                *p
            } else {
                add(*p, scale(*n, T::lit(amount)))
            }
        })
        .collect())
}

/// Unperturbed positions of the mesh vertices on the folded tetrahedron.
pub fn geodesic_positions<T: Real>(m: &DeltaMesh, g: &TilingGroup) -> Result<Vec<Vec3<T>>> {
    if m.vertex_lattice_rep.len() != m.vertex_count() {
        return Err(Error::InvalidConfig("mesh carries no lattice representatives".into()));
    }
    let corners = source_tetrahedron::<T>(g);
    Ok(m.vertex_lattice_rep.iter().map(|&x| geodesic_position(g, &corners, x)).collect())
}

pub fn edge_residual<T: Real>(edges: &[(VertexId, VertexId)], pos: &[Vec3<T>]) -> T {
    edges.iter().map(|&(i, j)| (norm(sub(pos[j], pos[i])) - T::one()).abs()).fold(T::zero(), T::max)
}

/// Gradient of the enclosed volume with respect to every vertex.
fn add_volume_gradient<T: Real>(m: &DeltaMesh, pos: &[Vec3<T>], weight: T, out: &mut [Vec3<T>]) {
    let w = weight / T::lit(6.0);
    for &[i, j, k] in &m.faces {
        out[i] = add(out[i], scale(cross(pos[j], pos[k]), w));
        out[j] = add(out[j], scale(cross(pos[k], pos[i]), w));
        out[k] = add(out[k], scale(cross(pos[i], pos[j]), w));
    }
}

fn add_edge_forces<T: Real>(edges: &[(VertexId, VertexId)], pos: &[Vec3<T>], out: &mut [Vec3<T>]) {
    for &(i, j) in edges {
        let d = sub(pos[j], pos[i]);
        let l = norm(d);
        if l > T::zero() {
            let f = scale(d, (l - T::one()) / l);
            out[i] = add(out[i], f);
            out[j] = sub(out[j], f);
        }
    }
}

/// Dynamic relaxation from `p0`. Returns the lowest-residual state reached
/// once the pressure has decayed below the tolerance.
pub fn relax<T: Real>(m: &DeltaMesh, p0: &[Vec3<T>], cfg: &RelaxConfig) -> Result<Embedding<T>> {
    cfg.validate()?;
    let edges = m.edges();
    let n = p0.len();
    let dt = T::lit(cfg.time_step);
    let tol = T::lit(cfg.tolerance);
    let decay = T::lit(cfg.pressure.decay);
    let mut pressure = T::lit(cfg.pressure.initial);

    let mut x = p0.to_vec();
    let mut vel = vec![geom::zero::<T>(); n];
    let mut force = vec![geom::zero::<T>(); n];
    let mut prev_ke = T::zero();
    let mut best = (edge_residual(&edges, &x), x.clone(), 0usize);
    let mut iterations = 0;

    for it in 1..=cfg.max_iterations {
        iterations = it;
        force.iter_mut().for_each(|f| *f = geom::zero());
        add_edge_forces(&edges, &x, &mut force);
        if pressure != T::zero() {
            add_volume_gradient(m, &x, pressure, &mut force);
        }
        let mut ke = T::zero();
        for v in 0..n {
            vel[v] = add(vel[v], scale(force[v], dt));
            ke = ke + dot(vel[v], vel[v]);
        }
        if cfg.kinetic_damping && ke < prev_ke {
            vel.iter_mut().for_each(|v| *v = geom::zero());
            ke = T::zero();
        }
        prev_ke = ke;
        for v in 0..n {
            x[v] = add(x[v], scale(vel[v], dt));
        }
        pressure = pressure * decay;

        let r = edge_residual(&edges, &x);
        if !r.is_finite() {
            break;
        }
        if pressure.abs() <= tol && r < best.0 {
            best = (r, x.clone(), it);
        }
        if r <= tol && pressure.abs() <= tol {
            break;
        }
    }
    let (mut residual, mut positions, _) = best;
    if residual > tol && residual < T::lit(POLISH_THRESHOLD) && cfg.polish_steps > 0 {
        let polished = polish(&edges, &positions, cfg.polish_steps, tol);
        let r = edge_residual(&edges, &polished);
        if r < residual {
            (residual, positions) = (r, polished);
        }
    }
    Ok(Embedding { positions, residual, converged: residual <= tol, iterations, seed: cfg.seed })
}

/// Residual below which a relaxed state is treated as near an isometric
/// embedding and handed to [`polish`].
const POLISH_THRESHOLD: f64 = 1e-4;

/// Gauss-Newton on the edge-length equations `‖x_j − x_i‖ = 1` with
/// minimum-norm steps `δ = Jᵀ y`, `J Jᵀ y = −r`, solved by conjugate gradients.
pub fn polish<T: Real>(edges: &[(VertexId, VertexId)], p0: &[Vec3<T>], steps: usize, tol: T) -> Vec<Vec3<T>> {
    let mut x = p0.to_vec();
    let n = x.len();
    let ne = edges.len();
    let apply_jt = |dirs: &[Vec3<T>], y: &[T], out: &mut Vec<Vec3<T>>| {
        out.clear();
        out.resize(n, geom::zero());
        for (k, &(i, j)) in edges.iter().enumerate() {
            let f = scale(dirs[k], y[k]);
            out[j] = add(out[j], f);
            out[i] = sub(out[i], f);
        }
    };
    let apply_j = |dirs: &[Vec3<T>], d: &[Vec3<T>]| -> Vec<T> {
        edges.iter().enumerate().map(|(k, &(i, j))| dot(dirs[k], sub(d[j], d[i]))).collect()
    };
    let mut tmp = Vec::with_capacity(n);
    for _ in 0..steps {
        let mut dirs = Vec::with_capacity(ne);
        let mut rhs = Vec::with_capacity(ne);
        for &(i, j) in edges {
            let d = sub(x[j], x[i]);
            let l = norm(d);
            dirs.push(scale(d, T::one() / l));
            rhs.push(T::one() - l);
        }
        let r0 = rhs.iter().fold(T::zero(), |acc, r| acc.max(r.abs()));
        if r0 <= tol * T::lit(0.01) {
            break;
        }
        // CG on (J Jᵀ) y = rhs.
        let mut y = vec![T::zero(); ne];
        let mut res = rhs.clone();
        let mut dir = res.clone();
        let mut rr: T = res.iter().map(|v| *v * *v).sum();
        let stop = rr * T::epsilon() * T::epsilon();
        for _ in 0..2 * ne {
            apply_jt(&dirs, &dir, &mut tmp);
            let ad = apply_j(&dirs, &tmp);
            let denom: T = dir.iter().zip(&ad).map(|(a, b)| *a * *b).sum();
            if denom.is_nan() || denom <= T::zero() {
                break;
            }
            let alpha = rr / denom;
            for k in 0..ne {
                y[k] = y[k] + alpha * dir[k];
                res[k] = res[k] - alpha * ad[k];
            }
            let rr_new: T = res.iter().map(|v| *v * *v).sum();
            if rr_new <= stop {
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..ne {
                dir[k] = res[k] + beta * dir[k];
            }
        }
        apply_jt(&dirs, &y, &mut tmp);
        let candidate: Vec<Vec3<T>> = x.iter().zip(&tmp).map(|(p, d)| add(*p, *d)).collect();
        let r = edge_residual(edges, &candidate);
        if r.is_nan() || r >= r0 {
            break;
        }
        x = candidate;
    }
    x
}

/// Seeded restarts of [`initial_guess`] + [`relax`]; keeps the converged
/// state of largest volume (ties go to the lower seed).
pub fn relax_max_volume<T: Real>(m: &DeltaMesh, cfg: &RelaxConfig) -> Result<MaxVolumeResult<T>> {
    cfg.validate()?;
    let runs: Vec<Result<Embedding<T>>> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let attempt = cfg.attempt(k);
            let p0 = initial_guess::<T>(m, &attempt)?;
            relax(m, &p0, &attempt)
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let attempts: Vec<Attempt<T>> = runs
        .iter()
        .map(|e| Attempt { seed: e.seed, volume: volume(e, m), residual: e.residual, converged: e.converged })
        .collect();
    let best = runs.iter().zip(&attempts).filter(|(e, _)| e.converged).fold(
        None::<(&Embedding<T>, T)>,
        |acc, (e, a)| match acc {
            Some((_, v)) if v >= a.volume => acc,
            _ => Some((e, a.volume)),
        },
    );
    match best {
        Some((e, _)) => Ok(MaxVolumeResult { best: canonical_gauge(e), attempts }),
        None => Err(Error::NotConverged {
            best_residual: attempts.iter().map(|a| a.residual.as_f64()).fold(f64::INFINITY, f64::min),
        }),
    }
}

/// Translate the centre of mass to the origin and rotate the principal axes
/// of the vertex cloud onto the coordinate axes (largest spread first).
pub fn canonical_gauge<T: Real>(e: &Embedding<T>) -> Embedding<T> {
    let n = T::lit(e.positions.len() as f64);
    let centroid = scale(e.positions.iter().fold(geom::zero(), |acc, p| add(acc, *p)), T::one() / n);
    let centred: Vec<Vec3<T>> = e.positions.iter().map(|p| sub(*p, centroid)).collect();
    let mut cov = [[T::zero(); 3]; 3];
    for p in &centred {
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] = cov[i][j] + p[i] * p[j];
            }
        }
    }
    let (_, mut axes) = geom::symmetric_eigen(cov);
    // Fix eigenvector signs by the third moment, then complete a right-handed frame.
    for axis in axes.iter_mut().take(2) {
        let skew: T = centred.iter().map(|p| dot(*p, *axis).powi(3)).sum();
        if skew < T::zero() {
            *axis = scale(*axis, -T::one());
        }
    }
    axes[2] = cross(axes[0], axes[1]);
    let positions = centred.iter().map(|p| geom::mat_vec(&axes, *p)).collect();
    Embedding { positions, ..e.clone() }
}

/// Signed enclosed volume `Σ det(p₁, p₂, p₃) / 6`.
pub fn volume<T: Real>(e: &Embedding<T>, m: &DeltaMesh) -> T {
    positions_volume(&e.positions, m)
}

pub fn positions_volume<T: Real>(pos: &[Vec3<T>], m: &DeltaMesh) -> T {
    let six = T::lit(6.0);
    m.faces.iter().map(|&[i, j, k]| det3(pos[i], pos[j], pos[k])).sum::<T>() / six
}

/// Volume divided by that of the regular tetrahedron with the same surface
/// area, `(S/4)^{3/2} / (6√2)`.
pub fn relative_volume<T: Real>(vol: T, m: &DeltaMesh) -> T {
    let quarter = T::lit(m.face_count() as f64 / 4.0);
    vol / (quarter.powf(T::lit(1.5)) * unit_tetrahedron_volume::<T>())
}

/// Interior solid angle at `v` from the spherical polygon of its edge
/// directions, via the turning angles of the polygon (spherical excess).
pub fn solid_angle<T: Real>(e: &Embedding<T>, m: &DeltaMesh, v: VertexId) -> Result<T> {
    let ring = m.vertex_ring(v);
    cone_solid_angle(e.positions[v], ring.iter().map(|&w| e.positions[w]).collect(), v)
}

/// Solid angle of the cone from `apex` over the cyclic `ring`, ordered
/// counterclockwise as seen from outside.
pub fn cone_solid_angle<T: Real>(apex: Vec3<T>, ring: Vec<Vec3<T>>, vertex: VertexId) -> Result<T> {
    let degenerate = || Error::DegenerateCone { vertex };
    let dirs: Vec<Vec3<T>> =
        ring.iter().map(|p| normalize(sub(*p, apex)).ok_or_else(degenerate)).collect::<Result<_>>()?;
    let n = dirs.len();
    let tangent = |at: Vec3<T>, toward: Vec3<T>| normalize(sub(toward, scale(at, dot(toward, at))));
    let mut turning = T::zero();
    for i in 0..n {
        let (prev, cur, next) = (dirs[(i + n - 1) % n], dirs[i], dirs[(i + 1) % n]);
        let t_in = tangent(cur, prev).ok_or_else(degenerate)?;
        let t_out = tangent(cur, next).ok_or_else(degenerate)?;
        let t_in = scale(t_in, -T::one());
        turning = turning + dot(cross(t_in, t_out), cur).atan2(dot(t_in, t_out));
    }
    Ok(T::lit(2.0) * T::PI() + turning)
}

pub fn solid_angles<T: Real>(e: &Embedding<T>, m: &DeltaMesh) -> Result<Vec<T>> {
    (0..m.vertex_count()).map(|v| solid_angle(e, m, v)).collect()
}

/// Every vertex has interior solid angle strictly inside `(0, 2π)`.
pub fn all_popped<T: Real>(e: &Embedding<T>, m: &DeltaMesh) -> Result<bool> {
    let two_pi = T::lit(2.0) * T::PI();
    Ok(solid_angles(e, m)?.into_iter().all(|w| w > T::zero() && w < two_pi))
}

pub fn metrics<T: Real>(e: &Embedding<T>, m: &DeltaMesh) -> Result<Metrics<T>> {
    let vol = volume(e, m);
    let angles = solid_angles(e, m)?;
    let two_pi = T::lit(2.0) * T::PI();
    Ok(Metrics {
        volume: vol,
        relative_volume: relative_volume(vol, m),
        min_solid_angle: angles.iter().copied().fold(T::infinity(), T::min),
        max_solid_angle: angles.iter().copied().fold(T::neg_infinity(), T::max),
        all_popped: angles.iter().all(|&w| w > T::zero() && w < two_pi),
    })
}

/// Sum over vertices of `2π − Σ incident face angles`.
pub fn total_angle_defect<T: Real>(e: &Embedding<T>, m: &DeltaMesh) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let mut angle_sum = vec![T::zero(); m.vertex_count()];
    for &[i, j, k] in &m.faces {
        for (v, p, q) in [(i, j, k), (j, k, i), (k, i, j)] {
            let (x, y) = (sub(e.positions[p], e.positions[v]), sub(e.positions[q], e.positions[v]));
            angle_sum[v] = angle_sum[v] + norm(cross(x, y)).atan2(dot(x, y));
        }
    }
    angle_sum.into_iter().map(|s| two_pi - s).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellResult {
    Converged { relative_volume: f64, volume: f64, residual: f64, all_popped: bool },
    NotConverged { residual: f64 },
}

impl CellResult {
    pub fn is_converged(&self) -> bool {
        matches!(self, CellResult::Converged { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub a: i64,
    pub b: i64,
    pub result: CellResult,
}

/// Upper-triangular table of max-volume relative volumes, rows `a`, columns `b ≥ a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeTable {
    pub a_max: i64,
    pub b_max: i64,
    pub cells: Vec<TableCell>,
}

impl VolumeTable {
    pub fn get(&self, a: i64, b: i64) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.a == a && c.b == b).map(|c| &c.result)
    }

    pub fn relative_volume(&self, a: i64, b: i64) -> Option<f64> {
        match self.get(a, b)? {
            CellResult::Converged { relative_volume, .. } => Some(*relative_volume),
            CellResult::NotConverged { .. } => None,
        }
    }
}

/// Relative volumes for `1 ≤ a ≤ a_max`, `a ≤ b ≤ b_max` (cells run in parallel).
pub fn volume_table(a_max: i64, b_max: i64, cfg: &RelaxConfig) -> Result<VolumeTable> {
    cfg.validate()?;
    let coords: Vec<(i64, i64)> = (1..=a_max).flat_map(|a| (a..=b_max).map(move |b| (a, b))).collect();
    let cells = coords
        .into_par_iter()
        .map(|(a, b)| {
            let m = crate::mesh::build_mesh(a, b)?;
            let result = match relax_max_volume::<f64>(&m, cfg) {
                Ok(r) => {
                    let vol = volume(&r.best, &m);
                    CellResult::Converged {
                        relative_volume: relative_volume(vol, &m),
                        volume: vol,
                        residual: r.best.residual,
                        all_popped: all_popped(&r.best, &m).unwrap_or(false),
                    }
                }
                Err(Error::NotConverged { best_residual }) => CellResult::NotConverged { residual: best_residual },
                Err(e) => return Err(e),
            };
            Ok(TableCell { a, b, result })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VolumeTable { a_max, b_max, cells })
}

/// Push vertex `v` of a converged state through the plane of its neighbours
/// and relax again without pressure, producing a dimpled equilibrium.
pub fn dimple_vertex<T: Real>(m: &DeltaMesh, e: &Embedding<T>, v: VertexId, cfg: &RelaxConfig) -> Result<Embedding<T>> {
    let ring = m.vertex_ring(v);
    let centroid =
        scale(ring.iter().fold(geom::zero(), |acc, &w| add(acc, e.positions[w])), T::one() / T::lit(ring.len() as f64));
    let normal = vertex_normals(m, &e.positions)[v];
    let height = dot(sub(e.positions[v], centroid), normal);
    let mut start = e.positions.clone();
    start[v] = sub(start[v], scale(normal, T::lit(2.0) * height));
    let mut quiet = cfg.clone();
    quiet.pressure.initial = 0.0;
    relax(m, &start, &quiet)
}

/// JSON report of one embedding run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub a: i64,
    pub b: i64,
    pub config: RelaxConfig,
    pub seed: u64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub metrics: Metrics<f64>,
    pub solid_angles: Vec<f64>,
    pub attempts: Vec<Attempt<f64>>,
}

impl EmbedReport {
    pub fn new(m: &DeltaMesh, cfg: &RelaxConfig, result: &MaxVolumeResult<f64>) -> Result<Self> {
        let e = &result.best;
        Ok(EmbedReport {
            a: m.a,
            b: m.b,
            config: cfg.clone(),
            seed: e.seed,
            residual: e.residual,
            converged: e.converged,
            iterations: e.iterations,
            metrics: metrics(e, m)?,
            solid_angles: solid_angles(e, m)?,
            attempts: result.attempts.clone(),
        })
    }
}

/// Wavefront OBJ text: one `v` line per vertex, one 1-based `f` line per
/// outward-oriented face.
pub fn to_obj<T: Real>(e: &Embedding<T>, m: &DeltaMesh) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "# deltahedron ({}, {}): {} vertices, {} faces", m.a, m.b, m.vertex_count(), m.face_count());
    for p in &e.positions {
        let _ = writeln!(out, "v {:.12} {:.12} {:.12}", p[0].as_f64(), p[1].as_f64(), p[2].as_f64());
    }
    for f in &m.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    const TETRA_CORNER: f64 = 0.551_285_598_432_531_1; // 3·acos(1/3) − π

    /// Van Oosterom–Strackee fan sum; valid for convex cones only.
    fn convex_cone_oracle(dirs: &[Vec3<f64>]) -> f64 {
        let e0 = dirs[0];
        (1..dirs.len() - 1)
            .map(|i| {
                let (e1, e2) = (dirs[i], dirs[i + 1]);
                let num = det3(e0, e1, e2).abs();
                let den = 1.0 + dot(e0, e1) + dot(e1, e2) + dot(e2, e0);
                2.0 * num.atan2(den)
            })
            .sum()
    }

    fn exact(a: i64, b: i64) -> (DeltaMesh, Vec<Vec3<f64>>) {
        let m = build_mesh(a, b).unwrap();
        let g = TilingGroup::new(a, b).unwrap();
        let p = geodesic_positions(&m, &g).unwrap();
        (m, p)
    }

    fn embedding(positions: Vec<Vec3<f64>>) -> Embedding<f64> {
        Embedding { positions, residual: 0.0, converged: true, iterations: 0, seed: 0 }
    }

    fn converged_2_1() -> &'static (DeltaMesh, Embedding<f64>) {
        static CELL: OnceLock<(DeltaMesh, Embedding<f64>)> = OnceLock::new();
        CELL.get_or_init(|| {
            let m = build_mesh(2, 1).unwrap();
            let cfg = RelaxConfig { restarts: 2, ..RelaxConfig::default() };
            let e = relax_max_volume::<f64>(&m, &cfg).unwrap().best;
            (m, e)
        })
    }

    #[test]
    fn tetrahedron_geodesic_positions() {
        let (m, p) = exact(1, 0);
        let edges = m.edges();
        assert!(edge_residual(&edges, &p) < 1e-15);
        let v = positions_volume(&p, &m);
        assert!((v - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((v - 0.117851).abs() < 1e-6);
        let e = embedding(p);
        for v in 0..4 {
            assert!((solid_angle(&e, &m, v).unwrap() - TETRA_CORNER).abs() < 1e-12);
        }
        assert!(all_popped(&e, &m).unwrap());
    }

    #[test]
    fn initial_guess_keeps_corners() {
        let m = build_mesh(1, 0).unwrap();
        let cfg = RelaxConfig::default();
        let p = initial_guess::<f64>(&m, &cfg).unwrap();
        let (_, exact_p) = exact(1, 0);
        assert_eq!(p, exact_p);
    }

    #[test]
    fn one_one_vertices_are_corners_and_face_centres() {
        let (m, p) = exact(1, 1);
        let corners: Vec<Vec3<f64>> = (0..8).filter(|&v| m.is_corner(v)).map(|v| p[v]).collect();
        assert_eq!(corners.len(), 4);
        // Source edge √3: corners pairwise √3 apart.
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((norm(sub(corners[i], corners[j])) - 3f64.sqrt()).abs() < 1e-12);
            }
        }
        for v in (0..8).filter(|&v| !m.is_corner(v)) {
            let hit = (0..4).any(|skip| {
                let others: Vec<_> = (0..4).filter(|&k| k != skip).map(|k| corners[k]).collect();
                let c = scale(add(add(others[0], others[1]), others[2]), 1.0 / 3.0);
                norm(sub(c, p[v])) < 1e-12
            });
            assert!(hit, "vertex {v} is not a face centroid");
        }
        // Grid edges through a tetrahedron edge are bent, so their chords are short.
        assert!(edge_residual(&m.edges(), &p) > 0.1);
    }

    #[test]
    fn initial_guess_is_deterministic_and_outward() {
        let m = build_mesh(3, 2).unwrap();
        let cfg = RelaxConfig { seed: 42, ..RelaxConfig::default() };
        let p1 = initial_guess::<f64>(&m, &cfg).unwrap();
        let p2 = initial_guess::<f64>(&m, &cfg).unwrap();
        assert_eq!(p1, p2);
        let (_, base) = exact(3, 2);
        let normals = vertex_normals(&m, &base);
        for v in 0..m.vertex_count() {
            let off = sub(p1[v], base[v]);
            let along = dot(off, normals[v]);
            assert!((-1e-12..=0.1 + 1e-12).contains(&along));
            assert!(norm(sub(off, scale(normals[v], along))) < 1e-12);
        }
        let other = initial_guess::<f64>(&m, &RelaxConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(p1, other);
    }

    #[test]
    fn relax_from_exact_tetrahedron() {
        let (m, p) = exact(1, 0);
        let e = relax(&m, &p, &RelaxConfig::default()).unwrap();
        assert!(e.converged && e.residual < 1e-12);
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let d0 = norm(sub(p[i], p[j]));
            let d1 = norm(sub(e.positions[i], e.positions[j]));
            assert!((d0 - d1).abs() < 1e-12);
        }
        assert!((relative_volume(volume(&e, &m), &m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relax_is_deterministic() {
        let m = build_mesh(2, 1).unwrap();
        let cfg = RelaxConfig { seed: 7, ..RelaxConfig::default() };
        let p0 = initial_guess::<f64>(&m, &cfg).unwrap();
        let e1 = relax(&m, &p0, &cfg).unwrap();
        let e2 = relax(&m, &p0, &cfg).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn single_precision_embedding() {
        let m = build_mesh(1, 1).unwrap();
        let cfg = RelaxConfig { tolerance: 1e-5, ..RelaxConfig::default() };
        let p0 = initial_guess::<f32>(&m, &cfg).unwrap();
        let e = relax(&m, &p0, &cfg).unwrap();
        assert!(e.converged, "residual {}", e.residual);
        let rel = relative_volume(volume(&e, &m), &m);
        assert!((rel - 0.962_250_4).abs() < 1e-4);
    }

    #[test]
    fn flat_and_complementary_cones() {
        let hex: Vec<Vec3<f64>> = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 3.0;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let flat = cone_solid_angle([0.0; 3], hex.clone(), 0).unwrap();
        assert!((flat - 2.0 * std::f64::consts::PI).abs() < 1e-12);

        // Convex hexagonal cone opening towards −z, ring counterclockwise from +z.
        let cone: Vec<Vec3<f64>> = hex.iter().map(|p| [p[0], p[1], -0.6]).collect();
        let dirs: Vec<Vec3<f64>> = cone.iter().map(|p| normalize(*p).unwrap()).collect();
        let omega = cone_solid_angle([0.0; 3], cone.clone(), 0).unwrap();
        assert!((omega - convex_cone_oracle(&dirs)).abs() < 1e-12);
        let mut reversed = cone;
        reversed.reverse();
        let back = cone_solid_angle([0.0; 3], reversed, 0).unwrap();
        assert!((omega + back - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cone_is_an_error() {
        let ring = vec![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert_eq!(cone_solid_angle([0.0; 3], ring, 5), Err(Error::DegenerateCone { vertex: 5 }));
        let ring = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(cone_solid_angle([0.0; 3], ring, 0).is_err());
    }

    #[test]
    fn gauss_bonnet_on_embedding() {
        let (m, e) = converged_2_1();
        assert!((total_angle_defect(e, m) - 4.0 * std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        let base = RelaxConfig::default();
        assert!(base.validate().is_ok());
        assert!(RelaxConfig { tolerance: 0.0, ..base.clone() }.validate().is_err());
        assert!(RelaxConfig { max_iterations: 0, ..base.clone() }.validate().is_err());
        assert!(RelaxConfig { time_step: -1.0, ..base.clone() }.validate().is_err());
        let expected = [1.0, 0.75, 1.25, 0.5, 1.5, 0.25, 1.75, 0.0, 2.0, 0.0];
        for (k, f) in expected.iter().enumerate() {
            assert!((base.attempt(k).pressure.initial - base.pressure.initial * f).abs() < 1e-15);
        }
        assert_eq!(base.attempt(3).seed, 3);
    }

    #[test]
    fn non_convergence_is_reported() {
        let m = build_mesh(2, 2).unwrap();
        let cfg = RelaxConfig { max_iterations: 50, restarts: 2, polish_steps: 0, ..RelaxConfig::default() };
        let p0 = initial_guess::<f64>(&m, &cfg).unwrap();
        let e = relax(&m, &p0, &cfg).unwrap();
        assert!(!e.converged && e.residual > 1e-9);
        assert!(matches!(relax_max_volume::<f64>(&m, &cfg), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn gauge_centres_and_preserves_shape() {
        let (m, e) = converged_2_1();
        let g = canonical_gauge(e);
        let c = g.positions.iter().fold([0.0; 3], |acc, p| add(acc, *p));
        assert!(norm(c) < 1e-10);
        assert!((volume(&g, m) - volume(e, m)).abs() < 1e-12);
        assert!(edge_residual(&m.edges(), &g.positions) < 1e-9);
    }

    #[test]
    fn obj_lists_vertices_and_faces() {
        let (m, p) = exact(1, 0);
        let obj = to_obj(&embedding(p), &m);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 4);
        assert!(!obj.contains("f 0 "));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn rigid_motion_invariance(
            ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0, angle in 0.0f64..6.0,
            tx in -10.0f64..10.0, ty in -10.0f64..10.0, tz in -10.0f64..10.0,
        ) {
            let (m, e) = converged_2_1();
            let r = geom::rotation(normalize([ax, ay, az]).unwrap(), angle);
            let moved = embedding(e.positions.iter().map(|p| add(geom::mat_vec(&r, *p), [tx, ty, tz])).collect());
            let edges = m.edges();
            prop_assert!((edge_residual(&edges, &moved.positions) - edge_residual(&edges, &e.positions)).abs() < 1e-12);
            prop_assert!((volume(&moved, m) - volume(e, m)).abs() < 1e-12);
            let (w0, w1) = (solid_angles(e, m).unwrap(), solid_angles(&moved, m).unwrap());
            for (x, y) in w0.iter().zip(&w1) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
