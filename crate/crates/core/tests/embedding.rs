use std::f64::consts::PI;

use tetrafold_core::build_mesh;
use tetrafold_core::embed::{
    all_popped, dimple_vertex, metrics, relative_volume, relax_max_volume, solid_angle, solid_angles,
    total_angle_defect, unit_tetrahedron_volume, volume, RelaxConfig,
};

fn tv() -> f64 {
    1.0 / (6.0 * 2f64.sqrt())
}

fn max_volume(a: i64, b: i64, restarts: usize) -> (tetrafold_core::DeltaMesh, tetrafold_core::Embedding64) {
    let m = build_mesh(a, b).unwrap();
    let cfg = RelaxConfig { restarts, ..RelaxConfig::default() };
    let r = relax_max_volume::<f64>(&m, &cfg).unwrap();
    assert_eq!(r.attempts.len(), restarts);
    (m, r.best)
}

#[test]
fn five_tetrahedra() {
    let (m, e) = max_volume(1, 1, 5);
    assert!(e.converged && e.residual <= 1e-9);
    let v = volume(&e, &m);
    assert!((v - 5.0 * tv()).abs() < 1e-6, "volume {v}");
    let rel = relative_volume(v, &m);
    assert!((rel - 5.0 / (3.0 * 3f64.sqrt())).abs() < 1e-4);
    assert!((rel - 0.96225).abs() < 1e-4);
    assert!(all_popped(&e, &m).unwrap());
}

#[test]
fn icosahedron_with_four_tetrahedra() {
    let (m, e) = max_volume(2, 1, 5);
    assert!(e.converged);
    let closed = 5.0 / 12.0 * (3.0 + 5f64.sqrt()) + 4.0 * tv();
    let v = volume(&e, &m);
    assert!((v - closed).abs() < 1e-6, "volume {v} vs {closed}");
    let rel = relative_volume(v, &m);
    assert!((rel - closed / (7f64.powf(1.5) * tv())).abs() < 1e-4);
    assert!((rel - 1.21555).abs() < 1e-3);
    // Four attached tetrahedra leave four degree-3 apexes and the icosahedron's
    // other eight vertices intact.
    let corner_angle = 3.0 * (1.0f64 / 3.0).acos() - PI;
    let apexes = (0..m.vertex_count()).filter(|&v| (solid_angle(&e, &m, v).unwrap() - corner_angle).abs() < 1e-6);
    assert_eq!(apexes.count(), 4);
}

#[test]
fn two_two_matches_table() {
    let (m, e) = max_volume(2, 2, 10);
    let rel = relative_volume(volume(&e, &m), &m);
    assert!((rel - 1.29799).abs() < 2e-3, "relative volume {rel}");
    assert!(all_popped(&e, &m).unwrap());
    assert!((total_angle_defect(&e, &m) - 4.0 * PI).abs() < 1e-6);
}

#[test]
fn dimpled_two_two_state() {
    let (m, e) = max_volume(2, 2, 4);
    let best = volume(&e, &m);
    let v = (0..m.vertex_count()).find(|&v| m.degree(v) == 6).unwrap();
    let d = dimple_vertex(&m, &e, v, &RelaxConfig::default()).unwrap();
    assert!(d.converged);
    assert!(volume(&d, &m) < best - 1e-3);
    assert!(!all_popped(&d, &m).unwrap());
    let mt = metrics(&d, &m).unwrap();
    assert!(mt.max_solid_angle > 2.0 * PI);
}

#[test]
fn dimpled_apex_is_the_complement() {
    let (m, e) = max_volume(1, 1, 2);
    let apex = (0..m.vertex_count()).find(|&v| m.degree(v) == 3).unwrap();
    let before = solid_angle(&e, &m, apex).unwrap();
    assert!(before > 0.0 && before < 2.0 * PI);
    let d = dimple_vertex(&m, &e, apex, &RelaxConfig::default()).unwrap();
    assert!(d.converged);
    let after = solid_angle(&d, &m, apex).unwrap();
    assert!((after - (4.0 * PI - before)).abs() < 1e-6, "{after} vs {}", 4.0 * PI - before);
    // Pushing the apex into the central tetrahedron removes two tetrahedra' worth.
    assert!((volume(&d, &m) - 3.0 * tv()).abs() < 1e-6);
}

#[test]
fn reversed_orientation_complements_solid_angles() {
    let (m, e) = max_volume(2, 1, 2);
    let mirrored = tetrafold_core::mirror_mesh(&m);
    let w = solid_angles(&e, &m).unwrap();
    let w_rev = solid_angles(&e, &mirrored).unwrap();
    for (x, y) in w.iter().zip(&w_rev) {
        assert!((x + y - 4.0 * PI).abs() < 1e-9);
    }
    assert!((volume(&e, &mirrored) + volume(&e, &m)).abs() < 1e-12);
}

#[test]
fn relative_volume_normalisation() {
    let (m, e) = max_volume(1, 0, 1);
    assert!((volume(&e, &m) - unit_tetrahedron_volume::<f64>()).abs() < 1e-12);
    assert!((relative_volume(volume(&e, &m), &m) - 1.0).abs() < 1e-9);
    assert!(all_popped(&e, &m).unwrap());
}
