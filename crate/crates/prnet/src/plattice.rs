//! The parameter-box domain: convex sublattices of parametrisation space.
//!
//! The set of parametrisations enabling a collection of transitions is, in
//! general, not a lattice interval, but it is always *over*-approximated by
//! one: a box `(L, U)` holding every parametrisation `P` with
//! `L[c] <= P[c] <= U[c]` at every coordinate `c`. Boxes are closed under
//! intersection, cheap to narrow, and — the point of the construction — the
//! box computed for a set of transitions by [`ParamBox::enabling`] is not an
//! approximation at all: it equals the concrete enabling set exactly.
//!
//! The empty box is canonical: every operation that could make a lower bound
//! overtake an upper bound collapses the value to [`ParamBox::Empty`]
//! immediately, so `Empty` is the only representation of emptiness.

use std::fmt;

use crate::model::{Dir, Parametrisation, Prn, Transition};

/// A convex sublattice of parametrisation space, or the empty set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParamBox {
    /// No parametrisation at all.
    Empty,
    /// Every parametrisation between `lower` and `upper`, componentwise.
    Bounds {
        lower: Parametrisation,
        upper: Parametrisation,
    },
}

impl ParamBox {
    /// The box of all parametrisations of the network.
    pub fn full(prn: &Prn) -> Self {
        let n = prn.param_count();
        let lower = Parametrisation(vec![0; n]);
        let upper = Parametrisation(
            (0..n).map(|c| prn.max_of(prn.coord_target(c))).collect(),
        );
        ParamBox::Bounds { lower, upper }
    }

    /// Builds a box from bounds, canonicalizing to `Empty` when they cross.
    pub fn from_bounds(lower: Parametrisation, upper: Parametrisation) -> Self {
        if lower.0.iter().zip(&upper.0).any(|(l, u)| l > u) {
            ParamBox::Empty
        } else {
            ParamBox::Bounds { lower, upper }
        }
    }

    /// The box of parametrisations enabling every transition in `ts`.
    ///
    /// Starts from the full box and narrows once per transition; the result
    /// is exact (it contains precisely the parametrisations under which each
    /// listed transition can fire from its source state).
    pub fn enabling(prn: &Prn, ts: &[Transition]) -> Self {
        let mut b = ParamBox::full(prn);
        for t in ts {
            b.narrow_transition(prn, t);
        }
        b
    }

    /// Whether this is the empty box.
    pub fn is_empty(&self) -> bool {
        matches!(self, ParamBox::Empty)
    }

    /// The bounds, unless empty.
    pub fn bounds(&self) -> Option<(&Parametrisation, &Parametrisation)> {
        match self {
            ParamBox::Empty => None,
            ParamBox::Bounds { lower, upper } => Some((lower, upper)),
        }
    }

    /// Mutable bounds, unless empty.
    pub(crate) fn bounds_mut(&mut self) -> Option<(&mut Vec<u8>, &mut Vec<u8>)> {
        match self {
            ParamBox::Empty => None,
            ParamBox::Bounds { lower, upper } => Some((&mut lower.0, &mut upper.0)),
        }
    }

    /// Whether `p` lies inside the box.
    pub fn contains(&self, p: &Parametrisation) -> bool {
        match self {
            ParamBox::Empty => false,
            ParamBox::Bounds { lower, upper } => {
                lower.0.iter().zip(&p.0).all(|(l, x)| l <= x)
                    && p.0.iter().zip(&upper.0).all(|(x, u)| x <= u)
            }
        }
    }

    /// Set inclusion between boxes.
    pub fn is_subset_of(&self, other: &ParamBox) -> bool {
        match (self, other) {
            (ParamBox::Empty, _) => true,
            (_, ParamBox::Empty) => false,
            (
                ParamBox::Bounds { lower: l1, upper: u1 },
                ParamBox::Bounds { lower: l2, upper: u2 },
            ) => {
                l2.0.iter().zip(&l1.0).all(|(a, b)| a <= b)
                    && u1.0.iter().zip(&u2.0).all(|(a, b)| a <= b)
            }
        }
    }

    /// Strict set inclusion.
    pub fn is_strict_subset_of(&self, other: &ParamBox) -> bool {
        self.is_subset_of(other) && self != other
    }

    /// Intersection of two boxes (componentwise max of lowers, min of
    /// uppers), canonicalized.
    pub fn intersect(&self, other: &ParamBox) -> ParamBox {
        let (ParamBox::Bounds { lower: l1, upper: u1 }, ParamBox::Bounds { lower: l2, upper: u2 }) =
            (self, other)
        else {
            return ParamBox::Empty;
        };
        let lower: Vec<u8> = l1.0.iter().zip(&l2.0).map(|(a, b)| *a.max(b)).collect();
        let upper: Vec<u8> = u1.0.iter().zip(&u2.0).map(|(a, b)| *a.min(b)).collect();
        ParamBox::from_bounds(Parametrisation(lower), Parametrisation(upper))
    }

    /// Intersects `other` into `self` in place.
    pub fn intersect_with(&mut self, other: &ParamBox) {
        let next = self.intersect(other);
        *self = next;
    }

    /// Number of parametrisations in the box, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        match self {
            ParamBox::Empty => 0,
            ParamBox::Bounds { lower, upper } => lower
                .0
                .iter()
                .zip(&upper.0)
                .fold(1u128, |acc, (l, u)| {
                    acc.saturating_mul((u - l) as u128 + 1)
                }),
        }
    }

    /// Narrows the box to the parametrisations enabling `t`: a step up needs
    /// the consulted parameter above the current level, a step down below it.
    /// Touches a single coordinate and canonicalizes.
    pub fn narrow_transition(&mut self, prn: &Prn, t: &Transition) {
        let c = prn.transition_coord(t);
        let level = t.new_level();
        let Some((lower, upper)) = self.bounds_mut() else {
            return;
        };
        match t.dir {
            Dir::Up => lower[c] = lower[c].max(level),
            Dir::Down => upper[c] = upper[c].min(level),
        }
        if lower[c] > upper[c] {
            *self = ParamBox::Empty;
        }
    }

    /// Re-canonicalizes after in-place bound edits restricted to the given
    /// coordinate range.
    pub(crate) fn canonicalize_range(&mut self, range: std::ops::Range<usize>) {
        if let ParamBox::Bounds { lower, upper } = self {
            if lower.0[range.clone()]
                .iter()
                .zip(&upper.0[range])
                .any(|(l, u)| l > u)
            {
                *self = ParamBox::Empty;
            }
        }
    }

    /// JSON form: `{"lower": [...], "upper": [...]}` or `{"empty": true}`.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ParamBox::Empty => serde_json::json!({ "empty": true }),
            ParamBox::Bounds { lower, upper } => serde_json::json!({
                "lower": lower.0,
                "upper": upper.0,
            }),
        }
    }
}

impl fmt::Display for ParamBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamBox::Empty => f.write_str("\u{2205}"),
            ParamBox::Bounds { lower, upper } => write!(f, "({lower}, {upper})"),
        }
    }
}
