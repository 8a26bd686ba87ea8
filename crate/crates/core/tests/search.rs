use ttlab_core::atlas::Atlas;
use ttlab_core::search::{replay, search_loops, SearchConfig};
use ttlab_core::{EdgeMap, Error, SplitSequence};

#[test]
fn replay_s1_is_reducible() {
    let a = Atlas::get();
    let r = replay(&a.tau_initial, &a.s1, &a.beta).unwrap();
    assert_eq!(r.certificate.verdict.name(), "reducible");
    assert!(r.certificate.fixed_point_free);
}

#[test]
fn replay_s3_is_pseudo_anosov() {
    let a = Atlas::get();
    let r = replay(&a.tau_initial, &a.s_odd(1), &a.beta).unwrap();
    assert!(r.certificate.verdict.is_pseudo_anosov());
    // Conjugating by beta gives phi3 on tau.
    let phi3 = a.phi(3).unwrap();
    for x in a.tau_initial.edges() {
        let y = a.beta.image(x).label;
        assert_eq!(
            &a.beta.apply(r.self_map.image(x).unwrap()),
            phi3.image(&y).unwrap()
        );
    }
}

#[test]
fn replay_rejects_a_wrong_identification() {
    let a = Atlas::get();
    let id = EdgeMap::identity(a.tau_initial.edges());
    assert!(matches!(
        replay(&a.tau_initial, &a.s1, &id),
        Err(Error::NotAnIdentification(_))
    ));
}

#[test]
fn search_from_tau_finds_the_other_twist() {
    let a = Atlas::get();
    let r = search_loops(&a.tau, &SearchConfig::default()).unwrap();
    assert_eq!(r.nodes, 131_808);
    assert_eq!(r.loop_count, 160);
    assert!(r
        .loops
        .iter()
        .any(|l| l.sequence == a.t_ig && l.identification == a.alpha));
}

#[test]
fn filters_only_shrink_the_emitted_set() {
    let a = Atlas::get();
    let base = SearchConfig {
        max_depth: 4,
        ..Default::default()
    };
    let all = search_loops(&a.tau_prime, &base).unwrap();
    let fpf = search_loops(
        &a.tau_prime,
        &SearchConfig {
            require_fixed_point_free: true,
            require_irreducible: true,
            ..base
        },
    )
    .unwrap();
    assert_eq!(all.loop_count, fpf.loop_count);
    assert!(fpf.loops.len() <= all.loops.len());
    assert!(fpf
        .loops
        .iter()
        .all(|l| l.certificate.fixed_point_free && l.certificate.irreducible));
}

#[test]
fn emitted_loops_revalidate() {
    let a = Atlas::get();
    let r = search_loops(
        &a.tau_prime,
        &SearchConfig {
            max_depth: 4,
            ..Default::default()
        },
    )
    .unwrap();
    for l in r.loops.iter().take(20) {
        let again = replay(&a.tau_prime, &l.sequence, &l.identification).unwrap();
        assert!(again.self_map.same_images(&l.self_map));
        assert!(l.self_map.check().is_valid());
    }
    assert!(SplitSequence::parse(&r.loops[0].sequence.to_string()).unwrap() == r.loops[0].sequence);
}
