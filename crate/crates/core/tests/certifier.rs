use std::collections::BTreeMap;

use ttlab_core::atlas::Atlas;
use ttlab_core::certify::{
    boundary_action, certify, dilatation, fixed_edge_points, incidence_matrix, side_dynamics,
    IncidenceMatrix, Verdict,
};
use ttlab_core::morphism::{apply_sequence, MorphismIssue};
use ttlab_core::{EdgeLabel, EdgeWord, Exact, TrackMorphism};

fn table(base: &TrackMorphism, changes: &[(&str, &str)]) -> BTreeMap<EdgeLabel, EdgeWord> {
    let mut t: BTreeMap<EdgeLabel, EdgeWord> =
        base.images().map(|(e, w)| (e.clone(), w.clone())).collect();
    for (e, w) in changes {
        t.insert(EdgeLabel::new(e), EdgeWord::parse(w).unwrap());
    }
    t
}

#[test]
fn phi2_row_k() {
    let m = incidence_matrix(&Atlas::get().phi2).unwrap();
    let row: Vec<(String, u64)> = m
        .cols
        .iter()
        .zip(m.row("k").unwrap())
        .filter(|(_, &x)| x > 0)
        .map(|(c, &x)| (c.to_string(), x))
        .collect();
    assert_eq!(
        row,
        [
            ("a".to_string(), 2),
            ("d".into(), 1),
            ("h".into(), 1),
            ("l".into(), 1)
        ]
    );
}

#[test]
fn identity_certificate() {
    let a = Atlas::get();
    let id = TrackMorphism::identity(a.tau.clone());
    assert_eq!(
        incidence_matrix(&id).unwrap(),
        IncidenceMatrix::identity(a.tau.edges().to_vec())
    );
    let act = boundary_action(&id).unwrap();
    assert!(act
        .images
        .iter()
        .all(|i| i.rotation == 0 && i.cancellation.iter().all(|&c| c == 0)));
    let sd = side_dynamics::<Exact>(&id).unwrap();
    assert!(sd.sides.iter().all(|s| s.degenerate));
    let orbits = sd.separatrix_orbits();
    for b in 0..2 {
        assert_eq!(
            orbits
                .iter()
                .filter(|o| o.boundary == b && o.length == 1)
                .count(),
            6
        );
    }
    let c = certify(&id).unwrap();
    assert!(matches!(c.verdict, Verdict::Reducible { .. }));
    assert!(!c.single_boundary_periodic_point);
    assert!(!c.fixed_point_free);
    assert!(c.diagnostics.iter().any(|d| d.contains("degenerate")));
}

#[test]
fn diagonal_occurrence_is_a_fixed_edge() {
    let a = Atlas::get();
    let m = TrackMorphism::new(
        "x",
        a.tau.clone(),
        a.tau.clone(),
        table(&a.phi1, &[("a", "a c")]),
    )
    .unwrap();
    assert_eq!(fixed_edge_points(&m), vec![EdgeLabel::new("a")]);
}

#[test]
fn endpoint_mismatch_is_reported() {
    let a = Atlas::get();
    let m = TrackMorphism::new(
        "bad",
        a.tau.clone(),
        a.tau.clone(),
        table(&a.phi1, &[("a", "k b")]),
    )
    .unwrap();
    let r = m.check();
    assert!(r
        .issues
        .iter()
        .any(|i| matches!(i, MorphismIssue::EndpointMismatch { edge, .. } if edge == "a")));
    let ok = TrackMorphism::new(
        "ok",
        a.tau.clone(),
        a.tau.clone(),
        table(&a.phi1, &[("a", "k j")]),
    )
    .unwrap();
    assert!(!ok
        .check()
        .issues
        .iter()
        .any(|i| matches!(i, MorphismIssue::EndpointMismatch { position: 1, .. })));
}

#[test]
fn odd_family_rows_and_separatrices() {
    let a = Atlas::get();
    for n in 1..=3u64 {
        let m = a.phi(2 * n as i64 + 1).unwrap();
        let mat = incidence_matrix(&m).unwrap();
        for (c, v) in [("a", 2 * n), ("e", 2 * n), ("d", 1), ("h", 1), ("l", 1)] {
            assert_eq!(mat.get("k", c), Some(v));
        }
        let sd = side_dynamics::<Exact>(&m).unwrap();
        assert!(sd.separatrix_orbits().iter().all(|o| o.length > 1));
    }
}

#[test]
fn psi_two_is_pseudo_anosov() {
    let c = certify(&Atlas::get().psi(2).unwrap()).unwrap();
    assert!(c.verdict.is_pseudo_anosov());
    assert!(c.fixed_point_free);
    assert_eq!(c.readings.punctured, "no fixed points");
}

#[test]
fn closed_reading_of_phi2() {
    let c = certify(&Atlas::get().phi2).unwrap();
    assert_eq!(
        c.readings.closed,
        "2 fixed 6-prong singularities of positive index and no other fixed points"
    );
}

#[test]
fn float_side_dynamics_agrees_with_exact() {
    let a = Atlas::get();
    let exact = side_dynamics::<Exact>(&a.phi2).unwrap();
    let float = side_dynamics::<f64>(&a.phi2).unwrap();
    assert_eq!(exact.permutation(), float.permutation());
    for (e, f) in exact.sides.iter().zip(&float.sides) {
        assert_eq!(e.points.len(), f.points.len());
        let q: f64 = num_traits::ToPrimitive::to_f64(&e.points[0].position).unwrap();
        assert!((q - f.points[0].position).abs() < 1e-12);
    }
}

#[test]
fn dilatation_brackets_grow_along_the_family() {
    let a = Atlas::get();
    let d: Vec<_> = [3, 5, 7]
        .iter()
        .map(|&k| dilatation::<f64>(&incidence_matrix(&a.phi(k).unwrap()).unwrap(), 1e-10).unwrap())
        .collect();
    assert!(d[0].certainly_below(&d[1]) && d[1].certainly_below(&d[2]));
}

#[test]
fn splitting_preserves_cusps_and_type() {
    let a = Atlas::get();
    let (end, _) = apply_sequence(&a.tau_initial, &a.s_odd(1)).unwrap();
    assert_eq!(end.cusp_count(), a.tau_initial.cusp_count());
    assert_eq!(end.singularity_type().unwrap(), vec![6, 6]);
}

#[test]
fn json_report_has_schema_version() {
    let c = certify(&Atlas::get().phi1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"]["kind"], "reducible");
    assert_eq!(v["invariant_subgraph"].as_array().unwrap().len(), 9);
}
