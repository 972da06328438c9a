//! Influence constraints and constraint-driven narrowing of parameter boxes.
//!
//! A constraint qualifies one influence `(u, v)`: *positive* / *negative*
//! constraints demand the parameters of `v` be monotone (non-decreasing /
//! non-increasing) in `u`'s level, *observable* demands that `u`'s level
//! actually makes a difference somewhere. A set of such constraints carves a
//! subset of parametrisation space; this module narrows boxes against that
//! subset.
//!
//! Sign constraints induce a partial order on the regulator states of each
//! node ([`ConstraintSet::compare_contexts`]); a parametrisation satisfies
//! the sign constraints on `v` exactly when it is monotone with respect to
//! that order. Narrowing a box against one sign constraint propagates lower
//! bounds up the order and upper bounds down it; narrowing against an
//! observability constraint can only act when a single coordinate is forced
//! to carry the required difference, which is precisely when all candidate
//! coordinates share a bound and one extremal coordinate is left. Both
//! operators, iterated round-robin, reach a unique fixpoint: the tightest box
//! containing every constraint-satisfying parametrisation of the input box.
//!
//! The optional Min-Max rule additionally pins, for every node whose
//! regulators all carry signs, the parameter at the most favourable regulator
//! state to the node's maximum and the one at the least favourable state to
//! zero.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{NodeId, Prn, Transition};
use crate::plattice::ParamBox;

/// What a constraint demands of its influence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// The target's parameters are non-decreasing in the regulator's level.
    Positive,
    /// The target's parameters are non-increasing in the regulator's level.
    Negative,
    /// Some change of the regulator's level changes the target's parameter.
    Observable,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Positive => "+",
            ConstraintKind::Negative => "-",
            ConstraintKind::Observable => "o",
        })
    }
}

/// One constraint on one influence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfluenceConstraint {
    pub target: NodeId,
    pub regulator: NodeId,
    pub kind: ConstraintKind,
}

impl InfluenceConstraint {
    pub fn new(regulator: NodeId, target: NodeId, kind: ConstraintKind) -> Self {
        Self { target, regulator, kind }
    }

    /// Renders the constraint with node names, e.g. `(a,c,+)`.
    pub fn render(&self, prn: &Prn) -> String {
        format!(
            "({},{},{})",
            prn.graph().name(self.regulator),
            prn.graph().name(self.target),
            self.kind
        )
    }
}

/// Errors raised when assembling a constraint set.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintError {
    /// The constrained influence is not an edge of the graph.
    #[error("constraint on ({0}, {1}) does not match any influence")]
    UnknownInfluence(usize, usize),
    /// The same influence is constrained both positive and negative.
    #[error("influence ({0}, {1}) is constrained both positive and negative")]
    ContradictorySigns(usize, usize),
}

/// Outcome of comparing two regulator states under the sign-induced order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonoCmp {
    Equal,
    Less,
    Greater,
    Incomparable,
}

/// Why the Min-Max rule skipped a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinmaxSkip {
    /// The node has no regulators, so "all activators present" is vacuous.
    NoRegulators(NodeId),
    /// Some regulator carries no sign, so the extreme regulator states are
    /// not determined.
    UnsignedRegulator { node: NodeId, regulator: NodeId },
}

/// A well-formed set of influence constraints for one network, plus the
/// Min-Max flag. Validated against the network at construction; all
/// narrowing entry points live here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    /// Sorted by (target, regulator, kind); deterministic round-robin order.
    list: Vec<InfluenceConstraint>,
    /// Per node, per regulator position: the sign constraint, if any.
    position_signs: Vec<Vec<Option<i8>>>,
    minmax: bool,
}

impl ConstraintSet {
    /// Validates and assembles a constraint set.
    pub fn new(
        prn: &Prn,
        constraints: impl IntoIterator<Item = InfluenceConstraint>,
        minmax: bool,
    ) -> Result<Self, ConstraintError> {
        let set: BTreeSet<InfluenceConstraint> = constraints.into_iter().collect();
        let graph = prn.graph();
        let mut position_signs: Vec<Vec<Option<i8>>> = (0..prn.node_count())
            .map(|v| vec![None; graph.regulators(v).len()])
            .collect();
        for c in &set {
            let Some(pos) = prn.regulator_position(c.regulator, c.target) else {
                return Err(ConstraintError::UnknownInfluence(c.regulator, c.target));
            };
            let sign = match c.kind {
                ConstraintKind::Positive => 1,
                ConstraintKind::Negative => -1,
                ConstraintKind::Observable => continue,
            };
            match position_signs[c.target][pos] {
                Some(existing) if existing != sign => {
                    return Err(ConstraintError::ContradictorySigns(c.regulator, c.target));
                }
                _ => position_signs[c.target][pos] = Some(sign),
            }
        }
        Ok(Self { list: set.into_iter().collect(), position_signs, minmax })
    }

    /// A set with no constraints and Min-Max off.
    pub fn empty(prn: &Prn) -> Self {
        Self::new(prn, std::iter::empty(), false).expect("empty set is well-formed")
    }

    /// The constraints, sorted by (target, regulator, kind).
    pub fn iter(&self) -> impl Iterator<Item = &InfluenceConstraint> {
        self.list.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty() && !self.minmax
    }

    /// Whether the Min-Max rule is switched on.
    pub fn minmax_enabled(&self) -> bool {
        self.minmax
    }

    /// The sign constraint on `(u, v)`, if any (`+1` or `-1`).
    pub fn sign_of(&self, prn: &Prn, u: NodeId, v: NodeId) -> Option<i8> {
        let pos = prn.regulator_position(u, v)?;
        self.position_signs[v][pos]
    }

    /// Compares two regulator states of `v` under the sign-induced order:
    /// `a` is below `b` when every positively-constrained regulator is no
    /// higher in `a`, every negatively-constrained one no lower, and every
    /// unconstrained one equal.
    pub fn compare_contexts(&self, v: NodeId, a: &[u8], b: &[u8]) -> MonoCmp {
        let signs = &self.position_signs[v];
        debug_assert_eq!(a.len(), signs.len());
        let mut leq = true;
        let mut geq = true;
        for ((&x, &y), &sign) in a.iter().zip(b).zip(signs) {
            match sign {
                None => {
                    if x != y {
                        leq = false;
                        geq = false;
                    }
                }
                Some(1) => {
                    if x < y {
                        geq = false;
                    } else if x > y {
                        leq = false;
                    }
                }
                Some(_) => {
                    if x < y {
                        leq = false;
                    } else if x > y {
                        geq = false;
                    }
                }
            }
            if !leq && !geq {
                return MonoCmp::Incomparable;
            }
        }
        match (leq, geq) {
            (true, true) => MonoCmp::Equal,
            (true, false) => MonoCmp::Less,
            (false, true) => MonoCmp::Greater,
            (false, false) => MonoCmp::Incomparable,
        }
    }

    /// Narrows `bx` against the sign constraint `sign` on influence
    /// `(u, v)`: lower bounds propagate up the sign direction, upper bounds
    /// down it. One sweep per bound reaches the fixpoint of the single
    /// constraint. Returns whether any bound moved.
    pub fn narrow_monotonic(
        &self,
        prn: &Prn,
        bx: &mut ParamBox,
        u: NodeId,
        v: NodeId,
        sign: i8,
    ) -> bool {
        debug_assert!(sign == 1 || sign == -1);
        let pos = prn
            .regulator_position(u, v)
            .expect("constraint validated against the graph");
        let m_u = prn.max_of(u);
        let range = prn.coords_of(v);
        let Some((lower, upper)) = bx.bounds_mut() else {
            return false;
        };
        let mut changed = false;
        // Lower bounds inherit from the context one step down the order.
        if sign == 1 {
            for c in range.clone() {
                if prn.coord_context(c)[pos] >= 1 {
                    let src = prn.coord_shift(c, pos, -1);
                    if lower[src] > lower[c] {
                        lower[c] = lower[src];
                        changed = true;
                    }
                }
            }
        } else {
            for c in range.clone().rev() {
                if prn.coord_context(c)[pos] < m_u {
                    let src = prn.coord_shift(c, pos, 1);
                    if lower[src] > lower[c] {
                        lower[c] = lower[src];
                        changed = true;
                    }
                }
            }
        }
        // Upper bounds inherit from the context one step up the order.
        if sign == 1 {
            for c in range.clone().rev() {
                if prn.coord_context(c)[pos] < m_u {
                    let src = prn.coord_shift(c, pos, 1);
                    if upper[src] < upper[c] {
                        upper[c] = upper[src];
                        changed = true;
                    }
                }
            }
        } else {
            for c in range.clone() {
                if prn.coord_context(c)[pos] >= 1 {
                    let src = prn.coord_shift(c, pos, -1);
                    if upper[src] < upper[c] {
                        upper[c] = upper[src];
                        changed = true;
                    }
                }
            }
        }
        if changed {
            bx.canonicalize_range(range);
        }
        changed
    }

    /// Narrows `bx` against the observability constraint on `(u, v)`.
    ///
    /// A regulator state can *witness* the observability when, within the
    /// box, the parameter is still allowed to differ across two adjacent
    /// levels of `u` there. If no state can witness it the box empties. If
    /// every potential witness shares the same lower bound and exactly one
    /// ⪯ᵥ-maximal one has slack, that coordinate must rise (a parametrisation
    /// keeping it at the common bound would, by monotonicity, be constant on
    /// all witnesses); dually for upper bounds. Returns whether bounds moved.
    pub fn narrow_observable(&self, prn: &Prn, bx: &mut ParamBox, u: NodeId, v: NodeId) -> bool {
        let pos = prn
            .regulator_position(u, v)
            .expect("constraint validated against the graph");
        let m_u = prn.max_of(u) as i32;
        let base = prn.coord_base(v);
        let range = prn.coords_of(v);
        let Some((lower, upper)) = bx.bounds() else {
            return false;
        };
        let (lower, upper) = (&lower.0, &upper.0);

        // Witness states come in whole u-fibers: the condition quantifies
        // over u's level, so it does not depend on the level in the state.
        let mut witnesses: Vec<usize> = Vec::new();
        let mut fiber_hit = vec![false; range.len()];
        for c in range.clone() {
            if prn.coord_context(c)[pos] != 0 {
                continue;
            }
            let hit = (1..=m_u).any(|x| {
                let hi = prn.coord_shift(c, pos, x);
                let lo = prn.coord_shift(c, pos, x - 1);
                lower[hi] < upper[lo] || upper[hi] > lower[lo]
            });
            if hit {
                for x in 0..=m_u {
                    fiber_hit[prn.coord_shift(c, pos, x) - base] = true;
                }
            }
        }
        for c in range.clone() {
            if fiber_hit[c - base] {
                witnesses.push(c);
            }
        }

        if witnesses.is_empty() {
            *bx = ParamBox::Empty;
            return true;
        }

        let extremal = |want_lower_bound: bool| -> Option<usize> {
            let shared = if want_lower_bound { lower } else { upper };
            let first = shared[witnesses[0]];
            if witnesses.iter().any(|&c| shared[c] != first) {
                return None;
            }
            let mut found: Vec<usize> = Vec::new();
            for &c in &witnesses {
                if lower[c] >= upper[c] {
                    continue;
                }
                let ctx = prn.coord_context(c);
                let blocked = if want_lower_bound {
                    MonoCmp::Less
                } else {
                    MonoCmp::Greater
                };
                let ok = witnesses.iter().all(|&d| {
                    d == c || self.compare_contexts(v, ctx, prn.coord_context(d)) != blocked
                });
                if ok {
                    found.push(c);
                    if found.len() > 1 {
                        return None;
                    }
                }
            }
            (found.len() == 1).then(|| found[0])
        };

        let raise = extremal(true);
        let cut = extremal(false);
        let mut changed = false;
        if let Some((lower, upper)) = bx.bounds_mut() {
            if let Some(c) = raise {
                lower[c] += 1;
                changed = true;
            }
            if let Some(c) = cut {
                upper[c] -= 1;
                changed = true;
            }
        }
        if changed {
            bx.canonicalize_range(range);
        }
        changed
    }

    /// Applies the Min-Max rule to every node (passing `filter`) whose
    /// regulators all carry signs: the parameter at the regulator state with
    /// all activators at max and all inhibitors at 0 is pinned to the node's
    /// maximum, and dually pinned to 0. Returns whether bounds moved.
    pub fn narrow_minmax(&self, prn: &Prn, bx: &mut ParamBox, filter: Option<NodeId>) -> bool {
        let mut changed = false;
        for v in 0..prn.node_count() {
            if filter.is_some_and(|f| f != v) {
                continue;
            }
            let regs = prn.graph().regulators(v);
            if regs.is_empty() || self.position_signs[v].iter().any(Option::is_none) {
                continue;
            }
            let top: Vec<u8> = regs
                .iter()
                .zip(&self.position_signs[v])
                .map(|(&u, sign)| if sign == &Some(1) { prn.max_of(u) } else { 0 })
                .collect();
            let bottom: Vec<u8> = regs
                .iter()
                .zip(&self.position_signs[v])
                .map(|(&u, sign)| if sign == &Some(1) { 0 } else { prn.max_of(u) })
                .collect();
            let c_top = prn.coord(v, &top);
            let c_bottom = prn.coord(v, &bottom);
            let m_v = prn.max_of(v);
            let Some((lower, upper)) = bx.bounds_mut() else {
                return changed;
            };
            if lower[c_top] < m_v {
                lower[c_top] = m_v;
                changed = true;
            }
            if upper[c_bottom] > 0 {
                upper[c_bottom] = 0;
                changed = true;
            }
            if lower[c_top] > upper[c_top] || lower[c_bottom] > upper[c_bottom] {
                *bx = ParamBox::Empty;
                return true;
            }
        }
        changed
    }

    /// Nodes the Min-Max rule cannot handle, with the reason.
    pub fn minmax_skipped(&self, prn: &Prn) -> Vec<MinmaxSkip> {
        let mut out = Vec::new();
        for v in 0..prn.node_count() {
            let regs = prn.graph().regulators(v);
            if regs.is_empty() {
                out.push(MinmaxSkip::NoRegulators(v));
                continue;
            }
            for (&u, sign) in regs.iter().zip(&self.position_signs[v]) {
                if sign.is_none() {
                    out.push(MinmaxSkip::UnsignedRegulator { node: v, regulator: u });
                    break;
                }
            }
        }
        out
    }

    /// Narrows `bx` to the fixpoint of all constraints (optionally only those
    /// targeting `filter`), applying Min-Max once and then the sign and
    /// observability narrowings round-robin until nothing moves.
    pub fn narrow_all(&self, prn: &Prn, bx: &mut ParamBox, filter: Option<NodeId>) {
        if bx.is_empty() {
            return;
        }
        if self.minmax {
            self.narrow_minmax(prn, bx, filter);
        }
        // Every productive round tightens at least one bound, so the round
        // count is bounded by the total slack of the box.
        let max_rounds = 2 + (0..prn.param_count())
            .map(|c| prn.max_of(prn.coord_target(c)) as u64)
            .sum::<u64>();
        for _ in 0..max_rounds {
            let mut changed = false;
            for c in &self.list {
                if filter.is_some_and(|f| f != c.target) {
                    continue;
                }
                changed |= match c.kind {
                    ConstraintKind::Positive => {
                        self.narrow_monotonic(prn, bx, c.regulator, c.target, 1)
                    }
                    ConstraintKind::Negative => {
                        self.narrow_monotonic(prn, bx, c.regulator, c.target, -1)
                    }
                    ConstraintKind::Observable => {
                        self.narrow_observable(prn, bx, c.regulator, c.target)
                    }
                };
                if bx.is_empty() {
                    return;
                }
            }
            if !changed {
                return;
            }
        }
        unreachable!("constraint narrowing failed to converge");
    }

    /// The constrained full box: all constraints applied to the whole space.
    pub fn base_box(&self, prn: &Prn) -> ParamBox {
        let mut bx = ParamBox::full(prn);
        self.narrow_all(prn, &mut bx, None);
        bx
    }

    /// The tightest box containing every constraint-satisfying
    /// parametrisation that enables all of `ts`.
    ///
    /// Folds transition narrowing with constraint propagation: each
    /// transition first narrows the consulted coordinate, then the
    /// constraints targeting its node are re-propagated, then a full pass
    /// re-establishes the global fixpoint (a safety net; constraint effects
    /// are node-local, so it is normally a no-op).
    pub fn enabling_box(&self, prn: &Prn, ts: &[Transition]) -> ParamBox {
        let mut bx = self.base_box(prn);
        for t in ts {
            if bx.is_empty() {
                return bx;
            }
            bx.narrow_transition(prn, t);
            self.narrow_all(prn, &mut bx, Some(t.node));
            self.narrow_all(prn, &mut bx, None);
        }
        bx
    }
}
