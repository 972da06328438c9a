//! Randomised cross-validation of the box machinery against brute-force
//! enumeration on small instances.

use prnet::constraints::{ConstraintKind, ConstraintSet, InfluenceConstraint};
use prnet::io::parse_model;
use prnet::oracle::{self, ConstraintSpec, InstanceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LIMIT: u128 = 1_000_000;

#[test]
fn enabling_box_is_exact_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let spec = InstanceSpec::default();
    for trial in 0..200 {
        let prn = oracle::random_prn(&mut rng, &spec);
        let ts = oracle::random_transitions(&mut rng, &prn, 4);
        let verdict = oracle::check_exact_enabling(&prn, &ts, LIMIT).unwrap();
        assert!(verdict.holds(), "trial {trial}: {verdict:?}");
    }
}

#[test]
fn constrained_box_is_tightest_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let spec = InstanceSpec::default();
    let cspec = ConstraintSpec::default();
    for trial in 0..120 {
        let prn = oracle::random_prn(&mut rng, &spec);
        let ts = oracle::random_transitions(&mut rng, &prn, 3);
        let rset = oracle::random_constraints(&mut rng, &prn, &cspec);
        let verdict = oracle::check_tightest_enabling(&prn, &rset, &ts, LIMIT).unwrap();
        assert!(verdict.holds(), "trial {trial}: {verdict:?}");
    }
}

#[test]
fn constrained_box_is_sound_with_minmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let spec = InstanceSpec::default();
    let cspec = ConstraintSpec {
        minmax_probability: 1.0,
        ..ConstraintSpec::default()
    };
    let mut exact = 0usize;
    for trial in 0..120 {
        let prn = oracle::random_prn(&mut rng, &spec);
        let ts = oracle::random_transitions(&mut rng, &prn, 3);
        let rset = oracle::random_constraints(&mut rng, &prn, &cspec);
        let bx = rset.enabling_box(&prn, &ts);
        let concrete = oracle::enabling_set(&prn, &rset, &ts, LIMIT).unwrap();
        for p in &concrete {
            assert!(
                bx.contains(p),
                "trial {trial}: admissible parametrisation {p} escapes box {bx}"
            );
        }
        if bx == oracle::envelope(&concrete) {
            exact += 1;
        }
    }
    assert!(exact > 0, "the Min-Max narrowing never produced a tight box");
}

/// Guards the envelope comparison itself against vacuity: a narrowing that
/// silently drops the observability rule must be distinguishable from the
/// correct one by the brute-force envelope.
#[test]
fn envelope_comparison_flags_a_narrowing_without_observability() {
    let prn = parse_model(
        "node a 1\nnode b 1\nnode c 1\n\
         edge a -> a\nedge b -> b\nedge a -> c\nedge b -> c\n",
    )
    .unwrap()
    .prn;
    let signs = vec![
        InfluenceConstraint::new(0, 2, ConstraintKind::Positive),
        InfluenceConstraint::new(1, 2, ConstraintKind::Positive),
    ];
    let mut with_obs = signs.clone();
    with_obs.push(InfluenceConstraint::new(1, 2, ConstraintKind::Observable));
    let full = ConstraintSet::new(&prn, with_obs, false).unwrap();
    let broken = ConstraintSet::new(&prn, signs, false).unwrap();

    let admissible = oracle::enabling_set(&prn, &full, &[], LIMIT).unwrap();
    let envelope = oracle::envelope(&admissible);
    assert_eq!(full.base_box(&prn), envelope);
    assert_ne!(broken.base_box(&prn), envelope, "a dropped rule went unnoticed");
}

#[test]
fn unconstrained_set_matches_plain_enabling() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let spec = InstanceSpec::default();
    for _ in 0..50 {
        let prn = oracle::random_prn(&mut rng, &spec);
        let ts = oracle::random_transitions(&mut rng, &prn, 4);
        let rset = ConstraintSet::empty(&prn);
        assert_eq!(
            rset.enabling_box(&prn, &ts),
            prnet::plattice::ParamBox::enabling(&prn, &ts)
        );
    }
}
