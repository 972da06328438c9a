//! Shared fixtures for unit tests.

use crate::model::{Dir, InfluenceGraph, Parametrisation, Prn, State, Transition};
use crate::plattice::ParamBox;

/// The three-node worked example used throughout the tests: `a` (levels 0..=2)
/// and `b` (Boolean) self-regulate, both regulate the Boolean `c`.
pub(crate) fn running_example() -> Prn {
    let graph = InfluenceGraph::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![(0, 0), (1, 1), (0, 2), (1, 2)],
    )
    .unwrap();
    Prn::new(graph, vec![2, 1, 1]).unwrap()
}

/// Parses a digit string like `"22210111111"` into a level vector.
pub(crate) fn levels(s: &str) -> Vec<u8> {
    s.chars().map(|c| c.to_digit(10).unwrap() as u8).collect()
}

/// Builds a box from two digit strings.
pub(crate) fn pbox(lower: &str, upper: &str) -> ParamBox {
    ParamBox::from_bounds(Parametrisation(levels(lower)), Parametrisation(levels(upper)))
}

/// The two-transition set of the worked narrowing example:
/// `110 -(c+)-> 111` followed by `111 -(b-)-> 101`.
pub(crate) fn section3_transitions() -> Vec<Transition> {
    vec![
        Transition::new(State(levels("110")), 2, Dir::Up),
        Transition::new(State(levels("111")), 1, Dir::Down),
    ]
}
