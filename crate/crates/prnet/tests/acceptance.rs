//! Acceptance gate: one test per release criterion, each printing a
//! `criterion N: pass` line (visible with `--nocapture`) with the measured
//! numbers. Budgets and tolerances are pinned as constants next to each test.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prnet::constraints::{ConstraintKind, ConstraintSet, InfluenceConstraint, MonoCmp};
use prnet::io::parse_model;
use prnet::model::{Dir, Parametrisation, Prn, State, Transition};
use prnet::oracle::{self, ConstraintSpec, InstanceSpec, Verdict};
use prnet::plattice::ParamBox;
use prnet::prefix::{build_cfp, reachable_states, PrefixOptions};

const ENUMERATION_LIMIT: u128 = 1_000_000;

fn levels(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

fn pbox(lower: &str, upper: &str) -> ParamBox {
    ParamBox::from_bounds(Parametrisation(levels(lower)), Parametrisation(levels(upper)))
}

/// The running example: a (levels 0..=2) and b (0..=1) with self-loops, both
/// regulating c (0..=1). Constraints are attached per criterion.
fn running_example() -> Prn {
    parse_model(
        "node a 2\nnode b 1\nnode c 1\n\
         edge a -> a\nedge b -> b\nedge a -> c\nedge b -> c\n",
    )
    .unwrap()
    .prn
}

/// The Boolean variant used by the worked observability tables.
fn boolean_example() -> Prn {
    parse_model(
        "node a 1\nnode b 1\nnode c 1\n\
         edge a -> a\nedge b -> b\nedge a -> c\nedge b -> c\n",
    )
    .unwrap()
    .prn
}

/// T = {110 -(c,+)-> 111, 111 -(b,-)-> 101}.
fn worked_transitions() -> Vec<Transition> {
    vec![
        Transition { source: State(levels("110")), node: 2, dir: Dir::Up },
        Transition { source: State(levels("111")), node: 1, dir: Dir::Down },
    ]
}

fn constraints(prn: &Prn, list: Vec<InfluenceConstraint>) -> ConstraintSet {
    ConstraintSet::new(prn, list, false).unwrap()
}

fn workspace_model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

#[test]
fn criterion_01_transition_narrowing_is_exact_and_fast() {
    const BUDGET: Duration = Duration::from_millis(1);
    let prn = running_example();
    let ts = worked_transitions();
    let started = Instant::now();
    let bx = ParamBox::enabling(&prn, &ts);
    let elapsed = started.elapsed();
    assert_eq!(bx, pbox("00000000100", "22210111111"));
    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!("criterion 1: pass — transition-narrowed box exact in {elapsed:?}");
}

#[test]
fn criterion_02_constrained_narrowing_is_exact_and_fast() {
    const BUDGET: Duration = Duration::from_millis(1);
    let prn = running_example();
    let rset = constraints(
        &prn,
        vec![
            InfluenceConstraint::new(0, 2, ConstraintKind::Positive),
            InfluenceConstraint::new(1, 1, ConstraintKind::Observable),
        ],
    );
    let ts = worked_transitions();
    let started = Instant::now();
    let bx = rset.enabling_box(&prn, &ts);
    let elapsed = started.elapsed();
    assert_eq!(bx, pbox("00010000101", "22210111111"));
    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!("criterion 2: pass — constraint-narrowed box exact in {elapsed:?}");
}

#[test]
fn criterion_03_observability_tables_reproduce() {
    let prn = boolean_example();

    // First table: only (b,c,o); c boxed to L=(0,0,1,1), U=(1,0,1,1) over
    // contexts ⟨00⟩,⟨01⟩,⟨10⟩,⟨11⟩. The unique maximal candidate ⟨00⟩ has its
    // lower bound raised, and there is no minimal candidate.
    let rset = constraints(
        &prn,
        vec![InfluenceConstraint::new(1, 2, ConstraintKind::Observable)],
    );
    let mut bx = pbox("00000011", "11111011");
    assert!(rset.narrow_observable(&prn, &mut bx, 1, 2));
    assert_eq!(bx, pbox("00001011", "11111011"));

    // Second table: both influences on c positive plus (b,c,o) on the full
    // box; ⟨11⟩ is raised and ⟨00⟩ lowered.
    let rset = constraints(
        &prn,
        vec![
            InfluenceConstraint::new(0, 2, ConstraintKind::Positive),
            InfluenceConstraint::new(1, 2, ConstraintKind::Positive),
            InfluenceConstraint::new(1, 2, ConstraintKind::Observable),
        ],
    );
    let mut bx = ParamBox::full(&prn);
    assert!(rset.narrow_observable(&prn, &mut bx, 1, 2));
    assert_eq!(bx, pbox("00000001", "11110111"));

    println!("criterion 3: pass — both worked observability tables reproduce");
}

#[test]
fn criterion_04_unconstrained_boxes_match_brute_force() {
    const TRIALS: usize = 500;
    const MAX_TRANSITIONS: usize = 4;
    const BUDGET: Duration = Duration::from_secs(60);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let spec = InstanceSpec::default();
    let started = Instant::now();
    for trial in 0..TRIALS {
        let prn = oracle::random_prn(&mut rng, &spec);
        let ts = oracle::random_transitions(&mut rng, &prn, MAX_TRANSITIONS);
        let verdict = oracle::check_exact_enabling(&prn, &ts, ENUMERATION_LIMIT).unwrap();
        assert_eq!(verdict, Verdict::Holds, "trial {trial} diverged");
    }
    let elapsed = started.elapsed();
    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!("criterion 4: pass — {TRIALS} unconstrained trials exact in {elapsed:?}");
}

#[test]
fn criterion_05_constrained_boxes_are_tightest() {
    const TRIALS: usize = 500;
    const MAX_TRANSITIONS: usize = 4;
    const BUDGET: Duration = Duration::from_secs(300);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0005);
    let spec = InstanceSpec::default();
    let mixes = [
        // observability-only, sign-only, mixed
        ConstraintSpec { sign_probability: 0.0, observable_probability: 0.7, ..Default::default() },
        ConstraintSpec { sign_probability: 0.7, observable_probability: 0.0, ..Default::default() },
        ConstraintSpec::default(),
    ];
    let started = Instant::now();
    for trial in 0..TRIALS {
        let prn = oracle::random_prn(&mut rng, &spec);
        let rset = oracle::random_constraints(&mut rng, &prn, &mixes[trial % mixes.len()]);
        let ts = oracle::random_transitions(&mut rng, &prn, MAX_TRANSITIONS);
        let verdict = oracle::check_tightest_enabling(&prn, &rset, &ts, ENUMERATION_LIMIT).unwrap();
        assert_eq!(verdict, Verdict::Holds, "trial {trial} diverged");
    }
    let elapsed = started.elapsed();
    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!("criterion 5: pass — {TRIALS} constrained trials tightest in {elapsed:?}");
}

#[test]
fn criterion_06_worked_unfolding_excerpt() {
    const BUDGET: Duration = Duration::from_secs(1);
    let model = parse_model(
        "node a 2\nnode b 1\nnode c 1\n\
         edge a -> a sign=-\nedge b -> b sign=-\n\
         edge a -> c sign=+\nedge b -> c sign=+\n",
    )
    .unwrap();
    let started = Instant::now();
    let prefix = build_cfp(
        &model.prn,
        &model.constraints,
        &model.init,
        &PrefixOptions::default(),
    );
    let elapsed = started.elapsed();
    let events = prefix.net.events();

    // e1 = a+ and e2 = b+ from the initial cut.
    let e1 = events
        .iter()
        .find(|e| e.node == 0 && e.dir == Dir::Up && e.size == 1)
        .expect("e1 missing");
    assert_eq!(e1.bx, pbox("10000000000", "22211111111"));
    let e2 = events
        .iter()
        .find(|e| e.node == 1 && e.dir == Dir::Up && e.size == 1)
        .expect("e2 missing");
    assert_eq!(e2.bx, pbox("00010000000", "22211111111"));
    // e4 = c+ above e2 alone.
    let e4 = events
        .iter()
        .find(|e| e.node == 2 && e.size == 2 && e.state == State(levels("011")))
        .expect("e4 missing");
    assert_eq!(e4.bx, pbox("00010010101", "22211111111"));
    // e3 = c+ above e1 and e2; stays in the prefix.
    let e3 = events
        .iter()
        .find(|e| e.node == 2 && e.size == 3 && e.bx == pbox("10010000101", "22211111111"))
        .expect("e3 missing");
    assert!(!e3.is_cutoff());
    assert_eq!(e3.state, State(levels("111")));
    // e5 = a+ above e4; same state as e3 with a smaller box, so cut off
    // with e3 as witness.
    let e5 = events
        .iter()
        .find(|e| e.node == 0 && e.size == 3 && e.bx == pbox("10010010101", "22211111111"))
        .expect("e5 missing");
    assert_eq!(e5.state, State(levels("111")));
    let cutoff = e5.cutoff.expect("e5 must be cut off");
    assert_eq!(cutoff.witness, e3.id);

    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!("criterion 6: pass — e1–e5 reproduced, e5 cut off by e3, in {elapsed:?}");
}

#[test]
fn criterion_07_prefix_reachability_equals_brute_force() {
    const TRIALS: usize = 100;
    const BUDGET: Duration = Duration::from_secs(600);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    let spec = InstanceSpec { max_params: 5_000, ..Default::default() };
    let cspec = ConstraintSpec::default();
    let started = Instant::now();
    for trial in 0..TRIALS {
        let prn = oracle::random_prn(&mut rng, &spec);
        let rset = oracle::random_constraints(&mut rng, &prn, &cspec);
        let x0 = oracle::random_state(&mut rng, &prn);
        let prefix = build_cfp(&prn, &rset, &x0, &PrefixOptions::default());
        let from_prefix = reachable_states(&prefix, &prn, &rset);
        let exact = oracle::reachable_union(&prn, &rset, &x0, ENUMERATION_LIMIT).unwrap();
        assert_eq!(from_prefix, exact, "trial {trial} diverged");
    }
    let elapsed = started.elapsed();
    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!("criterion 7: pass — {TRIALS} reachability trials exact in {elapsed:?}");
}

#[test]
fn criterion_08_lemma_property_suites() {
    const CASES: usize = 1000;

    // Lemma 1: P satisfies the sign constraints on v iff P is monotone on
    // Ω_v under the sign-induced order.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0801);
    let spec = InstanceSpec::default();
    let sign_only =
        ConstraintSpec { sign_probability: 0.7, observable_probability: 0.0, ..Default::default() };
    let mut lemma1_cases = 0usize;
    while lemma1_cases < CASES {
        let prn = oracle::random_prn(&mut rng, &spec);
        let rset = oracle::random_constraints(&mut rng, &prn, &sign_only);
        let p = oracle::random_parametrisation(&mut rng, &prn);
        for v in 0..prn.node_count() {
            let satisfied = rset
                .iter()
                .filter(|c| c.target == v)
                .all(|c| oracle::satisfies(&prn, &p, c));
            let monotone = monotone_on_node(&prn, &rset, v, |i| p.0[i]);
            assert_eq!(
                satisfied, monotone,
                "lemma 1 diverged on node {v} of {p} under {:?}",
                rset.iter().collect::<Vec<_>>()
            );
            lemma1_cases += 1;
        }
    }

    // Lemma 3: a parametrisation violating observability on v is repaired by
    // changing exactly one of v's coordinates.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0803);
    let obs_only = ConstraintSpec {
        sign_probability: 0.0,
        observable_probability: 0.8,
        observable_needs_levels: true,
        ..Default::default()
    };
    let mut lemma3_cases = 0usize;
    let mut attempts = 0usize;
    while lemma3_cases < CASES {
        attempts += 1;
        assert!(attempts < 200_000, "violating cases are too rare");
        let prn = oracle::random_prn(&mut rng, &spec);
        let rset = oracle::random_constraints(&mut rng, &prn, &obs_only);
        let p = oracle::random_parametrisation(&mut rng, &prn);
        for v in 0..prn.node_count() {
            // A node with domain {0} has all parameters pinned: observability
            // on it is unsatisfiable and nothing can repair it. The repair
            // property presumes non-trivial domains on both ends.
            if prn.max_of(v) == 0 {
                continue;
            }
            let obs: Vec<_> = rset
                .iter()
                .filter(|c| c.target == v && c.kind == ConstraintKind::Observable)
                .collect();
            if obs.is_empty() || obs.iter().all(|c| oracle::satisfies(&prn, &p, c)) {
                continue;
            }
            let repaired = prn.coords_of(v).any(|i| {
                (0..=prn.max_of(v)).any(|value| {
                    if p.0[i] == value {
                        return false;
                    }
                    let mut q = p.clone();
                    q.0[i] = value;
                    obs.iter().all(|c| oracle::satisfies(&prn, &q, c))
                })
            });
            assert!(
                repaired,
                "lemma 3 diverged: no single-coordinate repair of {p} on node {v}"
            );
            lemma3_cases += 1;
        }
    }

    // Lemma 4: the monotonic narrowing is at fixpoint iff both bounds are
    // monotone under the sign-induced order.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0804);
    let mut lemma4_cases = 0usize;
    while lemma4_cases < CASES {
        let prn = oracle::random_prn(&mut rng, &spec);
        let rset = oracle::random_constraints(&mut rng, &prn, &sign_only);
        let bx = oracle::random_box(&mut rng, &prn);
        let mut probe = bx.clone();
        let mut changed = false;
        for c in rset.iter() {
            let sign = match c.kind {
                ConstraintKind::Positive => 1,
                ConstraintKind::Negative => -1,
                ConstraintKind::Observable => continue,
            };
            changed |= rset.narrow_monotonic(&prn, &mut probe, c.regulator, c.target, sign);
        }
        let monotone_bounds = match bx.bounds() {
            None => true,
            Some((lower, upper)) => (0..prn.node_count()).all(|v| {
                monotone_on_node(&prn, &rset, v, |i| lower.0[i])
                    && monotone_on_node(&prn, &rset, v, |i| upper.0[i])
            }),
        };
        assert_eq!(
            !changed, monotone_bounds,
            "lemma 4 diverged on {bx} under {:?}",
            rset.iter().collect::<Vec<_>>()
        );
        lemma4_cases += 1;
    }

    println!(
        "criterion 8: pass — lemma suites held on {lemma1_cases}/{lemma3_cases}/{lemma4_cases} cases"
    );
}

/// Whether `value_at` is monotone over node `v`'s contexts under the
/// sign-induced order of `rset`.
fn monotone_on_node(
    prn: &Prn,
    rset: &ConstraintSet,
    v: usize,
    value_at: impl Fn(usize) -> u8,
) -> bool {
    let coords: Vec<usize> = prn.coords_of(v).collect();
    coords.iter().all(|&i| {
        coords.iter().all(|&j| {
            rset.compare_contexts(v, prn.coord_context(i), prn.coord_context(j)) != MonoCmp::Less
                || value_at(i) <= value_at(j)
        })
    })
}

#[test]
fn criterion_09_cortical_event_counts_within_tolerance() {
    const TARGET_EVENTS: f64 = 554.0;
    const TARGET_TOTAL: f64 = 1939.0;
    const TOLERANCE: f64 = 0.15;
    const BUDGET: Duration = Duration::from_secs(300);

    let text = std::fs::read_to_string(workspace_model("cortical.prn")).unwrap();
    let model = parse_model(&text).unwrap();
    let started = Instant::now();
    let prefix = build_cfp(
        &model.prn,
        &model.constraints,
        &model.init,
        &PrefixOptions::default(),
    );
    let elapsed = started.elapsed();
    let stats = prefix.stats();

    let events = stats.events_non_cutoff as f64;
    let total = stats.events_total as f64;
    let dev_events = (events - TARGET_EVENTS) / TARGET_EVENTS;
    let dev_total = (total - TARGET_TOTAL) / TARGET_TOTAL;
    assert!(
        dev_events.abs() <= TOLERANCE,
        "{} non-cut-off events deviate {:.1}% from {TARGET_EVENTS}",
        stats.events_non_cutoff,
        dev_events * 100.0
    );
    assert!(
        dev_total.abs() <= TOLERANCE,
        "{} total events deviate {:.1}% from {TARGET_TOTAL}",
        stats.events_total,
        dev_total * 100.0
    );
    assert!(elapsed <= BUDGET, "took {elapsed:?}, budget {BUDGET:?}");
    println!(
        "criterion 9: pass — cortical events {} ({}) vs target 554 (1939): \
         {:+.1}% ({:+.1}%) in {elapsed:?}",
        stats.events_non_cutoff,
        stats.events_total,
        dev_events * 100.0,
        dev_total * 100.0
    );
}

#[test]
fn criterion_10_unfold_outputs_are_byte_identical() {
    let binary = env!("CARGO_BIN_EXE_prnet");
    let scratch = std::env::temp_dir().join(format!("prnet-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&scratch).unwrap();

    for model in ["running_example.prn", "cortical.prn", "lambda_switch.prn"] {
        let mut artifacts: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
        for run in 0..2 {
            let dot = scratch.join(format!("{model}.{run}.dot"));
            let json = scratch.join(format!("{model}.{run}.json"));
            let status = Command::new(binary)
                .arg("unfold")
                .arg(workspace_model(model))
                .arg("--dot")
                .arg(&dot)
                .arg("--json")
                .arg(&json)
                .output()
                .unwrap();
            assert!(status.status.success(), "unfold {model} failed: {status:?}");
            artifacts.push((std::fs::read(&dot).unwrap(), std::fs::read(&json).unwrap()));
        }
        assert_eq!(artifacts[0].0, artifacts[1].0, "{model}: DOT runs differ");
        assert_eq!(artifacts[0].1, artifacts[1].1, "{model}: JSON runs differ");
    }
    std::fs::remove_dir_all(&scratch).ok();
    println!("criterion 10: pass — repeated unfolds byte-identical on all models");
}
