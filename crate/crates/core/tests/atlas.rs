use num_rational::BigRational;
use ttlab_core::atlas::{reconstruct_base_track, Atlas, PHI1};
use ttlab_core::certify::{boundary_action, certify, fixed_edge_points, side_dynamics};
use ttlab_core::IsoMode;

#[test]
fn base_track_shape() {
    let t = reconstruct_base_track().unwrap();
    let e = t.euler_data().unwrap();
    assert_eq!((e.vertices, e.edges, e.euler_characteristic), (6, 12, -6));
    assert_eq!((e.boundary_components, e.genus), (2, 3));
    assert!(e.orientable);
    assert_eq!(t.singularity_type().unwrap(), vec![6, 6]);
    for s in t.switches() {
        assert_eq!((s.side_a.len(), s.side_b.len()), (2, 2));
    }
    // b -> f i j: t(f) and i(i) share a switch
    let (sf, _) = t.switch_of(&"t(f)".parse().unwrap()).unwrap();
    let (si, _) = t.switch_of(&"i(i)".parse().unwrap()).unwrap();
    assert_eq!(sf.id, si.id);
}

#[test]
fn automorphism_counts() {
    let t = &Atlas::get().tau;
    assert_eq!(t.automorphisms(IsoMode::Oriented).unwrap().len(), 2);
    assert_eq!(t.automorphisms(IsoMode::Embedded).unwrap().len(), 4);
    assert_eq!(t.automorphisms(IsoMode::Abstract).unwrap().len(), 16);
}

#[test]
fn phi1_from_splits_matches_table() {
    let a = Atlas::get();
    let m = a.phi1_from_splits().unwrap();
    for (e, w) in PHI1 {
        assert_eq!(m.image_of(e).unwrap().to_string(), w, "edge {e}");
    }
}

#[test]
fn phi2_chain_matches_table() {
    let a = Atlas::get();
    assert!(a.phi2_chain().unwrap().same_images(&a.phi2));
}

#[test]
fn odd_family_from_splits() {
    let a = Atlas::get();
    for n in 1..=3 {
        let m = a.odd_from_splits(n).unwrap();
        assert!(m.same_images(&a.phi(2 * n as i64 + 1).unwrap()));
    }
}

#[test]
fn phi1_is_reducible_fixed_point_free() {
    let a = Atlas::get();
    assert!(fixed_edge_points(&a.phi1).is_empty());
    let c = certify(&a.phi1).unwrap();
    println!("{c}");
    assert_eq!(c.verdict.name(), "reducible");
    let act = boundary_action(&a.phi1).unwrap();
    assert!(act.all_invariant());
    assert!((0..2).all(|b| act.rotates(b)));
}

#[test]
fn phi2_side_dynamics() {
    let a = Atlas::get();
    let sd = side_dynamics::<BigRational>(&a.phi2).unwrap();
    assert_eq!(sd.sides.len(), 12);
    for s in &sd.sides {
        assert_eq!(s.period, 3);
        assert_eq!(s.points.len(), 1, "{:?}", s);
    }
    let cd = sd.find_side("c d").unwrap();
    let p = &sd.sides[cd].points[0];
    assert_eq!(p.position.to_string(), "37/44");
    let it: Vec<String> = p.itinerary.iter().map(|l| l.label.to_string()).collect();
    assert_eq!(it, ["c", "k", "h"]);
    let c = certify(&a.phi2).unwrap();
    println!("{c}");
    assert!(c.verdict.is_pseudo_anosov());
}
