//! Brute-force ground truth for small networks.
//!
//! Everything here works by enumerating parametrisation space (or the state
//! space) directly from the definitions, with no sharing of logic with the
//! symbolic modules — that independence is the point: the box machinery is
//! validated against these functions on desk-scale instances. All entry
//! points that enumerate parametrisations take an explicit limit and refuse
//! to run past it.
//!
//! The module also hosts the seeded random-instance generators used by the
//! verification suites and the `verify` subcommand.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::constraints::{ConstraintKind, ConstraintSet, InfluenceConstraint};
use crate::model::{Dir, InfluenceGraph, Parametrisation, Prn, State, Transition};
use crate::plattice::ParamBox;

/// Default ceiling on the number of parametrisations an oracle call will
/// enumerate.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

/// Errors raised by oracle entry points.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    /// The instance is too large to enumerate.
    #[error("{count} parametrisations exceed the enumeration limit {limit}")]
    TooManyParametrisations { count: u128, limit: u128 },
}

/// Verdict of an exhaustive check, with a counterexample description on
/// failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

fn guard(prn: &Prn, limit: u128) -> Result<(), OracleError> {
    let count = prn.parametrisation_count();
    if count > limit {
        return Err(OracleError::TooManyParametrisations { count, limit });
    }
    Ok(())
}

/// Whether `p` lets `t` fire: a step up needs the consulted parameter at
/// least one above the source level, a step down at least one below.
pub fn enables(prn: &Prn, p: &Parametrisation, t: &Transition) -> bool {
    let level = p.0[prn.transition_coord(t)];
    let x = t.source.0[t.node];
    match t.dir {
        Dir::Up => level >= x + 1,
        Dir::Down => x >= 1 && level <= x - 1,
    }
}

/// Whether `p` satisfies one influence constraint, straight from the
/// definition: monotone across every adjacent pair of the regulator's levels
/// for a sign, some unequal adjacent pair for observability.
pub fn satisfies(prn: &Prn, p: &Parametrisation, c: &InfluenceConstraint) -> bool {
    let pos = prn
        .regulator_position(c.regulator, c.target)
        .expect("constraint refers to an influence of the network");
    let mut observed = false;
    for coord in prn.coords_of(c.target) {
        if prn.coord_context(coord)[pos] == 0 {
            continue;
        }
        let below = prn.coord_shift(coord, pos, -1);
        match c.kind {
            ConstraintKind::Positive => {
                if p.0[coord] < p.0[below] {
                    return false;
                }
            }
            ConstraintKind::Negative => {
                if p.0[coord] > p.0[below] {
                    return false;
                }
            }
            ConstraintKind::Observable => {
                if p.0[coord] != p.0[below] {
                    observed = true;
                }
            }
        }
    }
    c.kind != ConstraintKind::Observable || observed
}

/// Whether `p` satisfies the whole constraint set, including the Min-Max
/// pins when the rule is enabled.
pub fn satisfies_all(prn: &Prn, rset: &ConstraintSet, p: &Parametrisation) -> bool {
    if !rset.iter().all(|c| satisfies(prn, p, c)) {
        return false;
    }
    if rset.minmax_enabled() {
        for v in 0..prn.node_count() {
            let regs = prn.graph().regulators(v);
            if regs.is_empty() || regs.iter().any(|&u| rset.sign_of(prn, u, v).is_none()) {
                continue;
            }
            let extreme = |favourable: bool| -> Vec<u8> {
                regs.iter()
                    .map(|&u| {
                        let positive = rset.sign_of(prn, u, v) == Some(1);
                        if positive == favourable {
                            prn.max_of(u)
                        } else {
                            0
                        }
                    })
                    .collect()
            };
            if p.0[prn.coord(v, &extreme(true))] != prn.max_of(v)
                || p.0[prn.coord(v, &extreme(false))] != 0
            {
                return false;
            }
        }
    }
    true
}

/// Every parametrisation satisfying `rset` and enabling all of `ts`.
pub fn enabling_set(
    prn: &Prn,
    rset: &ConstraintSet,
    ts: &[Transition],
    limit: u128,
) -> Result<Vec<Parametrisation>, OracleError> {
    guard(prn, limit)?;
    Ok(prn
        .parametrisations()
        .filter(|p| satisfies_all(prn, rset, p) && ts.iter().all(|t| enables(prn, p, t)))
        .collect())
}

/// The componentwise min/max envelope: the smallest box containing all given
/// parametrisations (`Empty` for none).
pub fn envelope(params: &[Parametrisation]) -> ParamBox {
    let Some(first) = params.first() else {
        return ParamBox::Empty;
    };
    let mut lower = first.0.clone();
    let mut upper = first.0.clone();
    for p in &params[1..] {
        for (i, &x) in p.0.iter().enumerate() {
            lower[i] = lower[i].min(x);
            upper[i] = upper[i].max(x);
        }
    }
    ParamBox::from_bounds(Parametrisation(lower), Parametrisation(upper))
}

/// States reachable from `x0` once the parametrisation is fixed.
pub fn reachable_with(prn: &Prn, p: &Parametrisation, x0: &State) -> BTreeSet<State> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(x0.clone());
    queue.push_back(x0.clone());
    while let Some(x) = queue.pop_front() {
        for t in prn.enabled_transitions(p, &x) {
            let y = t.target();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Union over all admissible parametrisations of the states reachable from
/// `x0`. Empty when no parametrisation satisfies the constraints.
pub fn reachable_union(
    prn: &Prn,
    rset: &ConstraintSet,
    x0: &State,
    limit: u128,
) -> Result<BTreeSet<State>, OracleError> {
    guard(prn, limit)?;
    let mut union = BTreeSet::new();
    for p in prn.parametrisations() {
        if satisfies_all(prn, rset, &p) {
            union.extend(reachable_with(prn, &p, x0));
        }
    }
    Ok(union)
}

/// Exhaustively checks that the unconstrained enabling box is *exact*: it
/// contains precisely the parametrisations enabling every transition of `ts`.
pub fn check_exact_enabling(prn: &Prn, ts: &[Transition], limit: u128) -> Result<Verdict, OracleError> {
    guard(prn, limit)?;
    let bx = ParamBox::enabling(prn, ts);
    for p in prn.parametrisations() {
        let concrete = ts.iter().all(|t| enables(prn, &p, t));
        if bx.contains(&p) != concrete {
            return Ok(Verdict::Fails(format!(
                "box {bx} and concrete enabling disagree on {p} \
                 (box: {}, concrete: {concrete})",
                bx.contains(&p)
            )));
        }
    }
    Ok(Verdict::Holds)
}

/// Exhaustively checks that the constrained enabling box is the tightest box
/// around the admissible set: equal to its componentwise envelope, with
/// emptiness agreeing.
pub fn check_tightest_enabling(
    prn: &Prn,
    rset: &ConstraintSet,
    ts: &[Transition],
    limit: u128,
) -> Result<Verdict, OracleError> {
    let concrete = enabling_set(prn, rset, ts, limit)?;
    let bx = rset.enabling_box(prn, ts);
    let env = envelope(&concrete);
    if bx != env {
        return Ok(Verdict::Fails(format!(
            "computed box {bx} differs from the envelope {env} of {} admissible \
             parametrisations",
            concrete.len()
        )));
    }
    Ok(Verdict::Holds)
}

/// Exhaustively checks that the constrained enabling box is *sound*: it
/// contains every admissible parametrisation enabling all of `ts`. Unlike
/// [`check_tightest_enabling`] this also holds with Min-Max enabled, where
/// the box may strictly over-approximate the admissible set.
pub fn check_sound_enabling(
    prn: &Prn,
    rset: &ConstraintSet,
    ts: &[Transition],
    limit: u128,
) -> Result<Verdict, OracleError> {
    guard(prn, limit)?;
    let bx = rset.enabling_box(prn, ts);
    for p in prn.parametrisations() {
        if satisfies_all(prn, rset, &p)
            && ts.iter().all(|t| enables(prn, &p, t))
            && !bx.contains(&p)
        {
            return Ok(Verdict::Fails(format!(
                "admissible parametrisation {p} falls outside the box {bx}"
            )));
        }
    }
    Ok(Verdict::Holds)
}

/// Tuning knobs for random instances. Sizes are kept at enumeration scale by
/// rejection sampling against `max_params`.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub max_nodes: usize,
    pub max_level: u8,
    pub edge_probability: f64,
    /// Ceiling on the parametrisation count of generated networks.
    pub max_params: u128,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self { max_nodes: 3, max_level: 2, edge_probability: 0.5, max_params: 20_000 }
    }
}

/// Draws a network within the size budget of `spec`.
pub fn random_prn(rng: &mut impl Rng, spec: &InstanceSpec) -> Prn {
    const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
    loop {
        let n = rng.gen_range(1..=spec.max_nodes.min(NAMES.len()));
        let names: Vec<String> = NAMES[..n].iter().map(|s| s.to_string()).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if rng.gen_bool(spec.edge_probability) {
                    edges.push((u, v));
                }
            }
        }
        let graph = InfluenceGraph::new(names, edges).expect("generated edges are unique");
        let max: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=spec.max_level)).collect();
        if max.iter().all(|&m| m == 0) {
            continue;
        }
        let prn = Prn::new(graph, max).expect("domains match the node count");
        if prn.parametrisation_count() <= spec.max_params {
            return prn;
        }
    }
}

/// Draws a uniformly random state.
pub fn random_state(rng: &mut impl Rng, prn: &Prn) -> State {
    State(
        (0..prn.node_count())
            .map(|v| rng.gen_range(0..=prn.max_of(v)))
            .collect(),
    )
}

/// Draws a uniformly random parametrisation.
pub fn random_parametrisation(rng: &mut impl Rng, prn: &Prn) -> Parametrisation {
    Parametrisation(
        (0..prn.param_count())
            .map(|c| rng.gen_range(0..=prn.max_of(prn.coord_target(c))))
            .collect(),
    )
}

/// Draws a random non-empty box (bounds drawn and swapped into order).
pub fn random_box(rng: &mut impl Rng, prn: &Prn) -> ParamBox {
    let a = random_parametrisation(rng, prn);
    let b = random_parametrisation(rng, prn);
    let lower: Vec<u8> = a.0.iter().zip(&b.0).map(|(x, y)| *x.min(y)).collect();
    let upper: Vec<u8> = a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect();
    ParamBox::from_bounds(Parametrisation(lower), Parametrisation(upper))
}

/// Draws up to `max_len` distinct transitions from random source states.
pub fn random_transitions(rng: &mut impl Rng, prn: &Prn, max_len: usize) -> Vec<Transition> {
    let mut out: Vec<Transition> = Vec::new();
    let want = rng.gen_range(0..=max_len);
    for _ in 0..4 * want {
        if out.len() >= want {
            break;
        }
        let x = random_state(rng, prn);
        let options = prn.all_transitions(&x);
        if let Some(t) = options.choose(rng) {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
    }
    out
}

/// Knobs for random constraint sets.
#[derive(Debug, Clone)]
pub struct ConstraintSpec {
    pub sign_probability: f64,
    pub observable_probability: f64,
    pub minmax_probability: f64,
    /// Only place observability constraints on regulators with a non-trivial
    /// domain (required by the single-repair property).
    pub observable_needs_levels: bool,
}

impl Default for ConstraintSpec {
    fn default() -> Self {
        Self {
            sign_probability: 0.5,
            observable_probability: 0.35,
            minmax_probability: 0.0,
            observable_needs_levels: false,
        }
    }
}

/// Draws a well-formed constraint set for `prn`.
pub fn random_constraints(
    rng: &mut impl Rng,
    prn: &Prn,
    spec: &ConstraintSpec,
) -> ConstraintSet {
    let mut list = Vec::new();
    for (u, v) in prn.graph().influences() {
        if rng.gen_bool(spec.sign_probability) {
            let kind = if rng.gen_bool(0.5) {
                ConstraintKind::Positive
            } else {
                ConstraintKind::Negative
            };
            list.push(InfluenceConstraint::new(u, v, kind));
        }
        if rng.gen_bool(spec.observable_probability)
            && !(spec.observable_needs_levels && prn.max_of(u) == 0)
        {
            list.push(InfluenceConstraint::new(u, v, ConstraintKind::Observable));
        }
    }
    let minmax = spec.minmax_probability > 0.0 && rng.gen_bool(spec.minmax_probability);
    ConstraintSet::new(prn, list, minmax).expect("generated constraints are well-formed")
}
