//! Influence graphs, multi-valued nodes, parametrisations, states and
//! asynchronous transitions.
//!
//! A *parametric regulatory network* couples a directed influence graph with a
//! finite domain `0..=max(v)` for every node `v`. The dynamics of a node are
//! driven by the joint state of its *regulators* (its predecessors in the
//! graph): a [`Parametrisation`] assigns to every node `v` and every regulator
//! state `ω` of `v` a target level, and `v` moves one step towards that level
//! whenever the regulators are in state `ω`. Fixing a parametrisation turns
//! the parametric network into an ordinary discrete regulatory network.
//!
//! The pairs `(v, ω)` are the *parameter coordinates* of the network. This
//! module fixes a total order on them — nodes ascending, regulator states
//! lexicographic (regulators sorted by node id, first regulator most
//! significant) — and lays them out as `0..param_count()`, so a
//! parametrisation is just a flat vector of levels. All parameter-space
//! machinery in the other modules works on these flat coordinates.

use std::fmt;

use thiserror::Error;

/// Index of a node. Ids are dense, `0..node_count()`; the textual model
/// format is 1-based/name-based and converts at the parse/print boundary.
pub type NodeId = usize;

/// Errors raised when assembling a network.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    /// An influence endpoint is not a node of the graph.
    #[error("influence ({0}, {1}) references a node outside the graph")]
    NodeOutOfRange(usize, usize),
    /// The same influence was given twice.
    #[error("influence ({0}, {1}) is declared twice")]
    DuplicateInfluence(usize, usize),
    /// The domain vector does not match the node count.
    #[error("expected {expected} domain bounds, got {got}")]
    DomainCountMismatch { expected: usize, got: usize },
}

/// A directed graph of regulatory influences.
///
/// Nodes carry display names; edges `(u, v)` mean "u regulates v". The
/// regulators of each node are kept sorted by id, which fixes the layout of
/// regulator-state vectors everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfluenceGraph {
    names: Vec<String>,
    regulators: Vec<Vec<NodeId>>,
    targets: Vec<Vec<NodeId>>,
}

impl InfluenceGraph {
    /// Builds a graph from node names and influence pairs `(regulator, target)`.
    pub fn new(
        names: Vec<String>,
        influences: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, ModelError> {
        let n = names.len();
        let mut regulators = vec![Vec::new(); n];
        let mut targets = vec![Vec::new(); n];
        for (u, v) in influences {
            if u >= n || v >= n {
                return Err(ModelError::NodeOutOfRange(u, v));
            }
            if regulators[v].contains(&u) {
                return Err(ModelError::DuplicateInfluence(u, v));
            }
            regulators[v].push(u);
            targets[u].push(v);
        }
        for list in regulators.iter_mut().chain(targets.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self { names, regulators, targets })
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    /// Display name of a node.
    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    /// Regulators of `v`, sorted by id.
    pub fn regulators(&self, v: NodeId) -> &[NodeId] {
        &self.regulators[v]
    }

    /// Nodes regulated by `u`, sorted by id.
    pub fn targets(&self, u: NodeId) -> &[NodeId] {
        &self.targets[u]
    }

    /// Whether `u` regulates `v`.
    pub fn has_influence(&self, u: NodeId, v: NodeId) -> bool {
        self.regulators[v].binary_search(&u).is_ok()
    }

    /// All influences `(regulator, target)`, sorted by target then regulator.
    pub fn influences(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.regulators
            .iter()
            .enumerate()
            .flat_map(|(v, regs)| regs.iter().map(move |&u| (u, v)))
    }
}

/// Flat layout of the parameter coordinates `(v, ω)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ParamLayout {
    /// First coordinate of each node's block.
    offset: Vec<usize>,
    /// Per node, per regulator position: distance between coordinates that
    /// differ by one in that regulator's value.
    stride: Vec<Vec<usize>>,
    /// Regulated node of each coordinate.
    target: Vec<NodeId>,
    /// Regulator values of each coordinate, in regulator-id order.
    context: Vec<Vec<u8>>,
}

impl ParamLayout {
    fn build(graph: &InfluenceGraph, max: &[u8]) -> Self {
        let n = graph.node_count();
        let mut offset = Vec::with_capacity(n);
        let mut stride = Vec::with_capacity(n);
        let mut target = Vec::new();
        let mut context = Vec::new();
        for v in 0..n {
            offset.push(target.len());
            let regs = graph.regulators(v);
            let mut st = vec![1usize; regs.len()];
            for i in (0..regs.len().saturating_sub(1)).rev() {
                st[i] = st[i + 1] * (max[regs[i + 1]] as usize + 1);
            }
            let block = st
                .first()
                .map_or(1, |&s| s * (max[regs[0]] as usize + 1));
            let mut ctx = vec![0u8; regs.len()];
            for _ in 0..block {
                target.push(v);
                context.push(ctx.clone());
                for i in (0..regs.len()).rev() {
                    if ctx[i] < max[regs[i]] {
                        ctx[i] += 1;
                        break;
                    }
                    ctx[i] = 0;
                }
            }
            stride.push(st);
        }
        Self { offset, stride, target, context }
    }
}

/// A parametric regulatory network: influence graph plus node domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prn {
    graph: InfluenceGraph,
    max: Vec<u8>,
    layout: ParamLayout,
}

impl Prn {
    /// Assembles a network; `max[v]` is the top level of node `v`.
    pub fn new(graph: InfluenceGraph, max: Vec<u8>) -> Result<Self, ModelError> {
        if max.len() != graph.node_count() {
            return Err(ModelError::DomainCountMismatch {
                expected: graph.node_count(),
                got: max.len(),
            });
        }
        let layout = ParamLayout::build(&graph, &max);
        Ok(Self { graph, max, layout })
    }

    /// The underlying influence graph.
    pub fn graph(&self) -> &InfluenceGraph {
        &self.graph
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Top level of node `v` (its domain is `0..=max_of(v)`).
    pub fn max_of(&self, v: NodeId) -> u8 {
        self.max[v]
    }

    /// Nodes whose domain exceeds their out-degree. Levels beyond the
    /// out-degree cannot be distinguished by any target, so such domains are
    /// almost always modelling mistakes; they are legal but worth a warning.
    pub fn oversized_domains(&self) -> Vec<NodeId> {
        (0..self.node_count())
            .filter(|&v| (self.max[v] as usize) > self.graph.targets(v).len())
            .collect()
    }

    /// Total number of parameter coordinates `(v, ω)`.
    pub fn param_count(&self) -> usize {
        self.layout.target.len()
    }

    /// Number of regulator states of node `v`.
    pub fn context_count(&self, v: NodeId) -> usize {
        self.graph
            .regulators(v)
            .iter()
            .map(|&u| self.max[u] as usize + 1)
            .product()
    }

    /// First coordinate of node `v`'s block; the block is contiguous.
    pub fn coord_base(&self, v: NodeId) -> usize {
        self.layout.offset[v]
    }

    /// Coordinates of node `v`'s block.
    pub fn coords_of(&self, v: NodeId) -> std::ops::Range<usize> {
        let base = self.layout.offset[v];
        base..base + self.context_count(v)
    }

    /// Coordinate of `(v, ω)`; `values` lists regulator levels in id order.
    pub fn coord(&self, v: NodeId, values: &[u8]) -> usize {
        let regs = self.graph.regulators(v);
        debug_assert_eq!(values.len(), regs.len());
        let mut c = self.layout.offset[v];
        for (i, &x) in values.iter().enumerate() {
            debug_assert!(x <= self.max[regs[i]]);
            c += x as usize * self.layout.stride[v][i];
        }
        c
    }

    /// The node whose parameter lives at coordinate `c`.
    pub fn coord_target(&self, c: usize) -> NodeId {
        self.layout.target[c]
    }

    /// The regulator values of coordinate `c`, in regulator-id order.
    pub fn coord_context(&self, c: usize) -> &[u8] {
        &self.layout.context[c]
    }

    /// Coordinate reached from `c` by shifting the regulator at position
    /// `pos` (within the target's regulator list) by `delta` levels.
    /// The caller guarantees the shifted value stays inside the domain.
    pub fn coord_shift(&self, c: usize, pos: usize, delta: i32) -> usize {
        let v = self.layout.target[c];
        let stride = self.layout.stride[v][pos] as i64;
        (c as i64 + delta as i64 * stride) as usize
    }

    /// Position of regulator `u` within `v`'s sorted regulator list.
    pub fn regulator_position(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.graph.regulators(v).binary_search(&u).ok()
    }

    /// Number of distinct states, saturating at `u128::MAX`.
    pub fn state_count(&self) -> u128 {
        self.max
            .iter()
            .fold(1u128, |acc, &m| acc.saturating_mul(m as u128 + 1))
    }

    /// Number of distinct parametrisations, saturating at `u128::MAX`.
    pub fn parametrisation_count(&self) -> u128 {
        self.layout
            .target
            .iter()
            .fold(1u128, |acc, &v| acc.saturating_mul(self.max[v] as u128 + 1))
    }

    /// Enumerates all parametrisations in coordinate-lexicographic order.
    /// Callers are responsible for checking [`Prn::parametrisation_count`]
    /// before iterating blindly.
    pub fn parametrisations(&self) -> impl Iterator<Item = Parametrisation> + '_ {
        let radix: Vec<u8> = self
            .layout
            .target
            .iter()
            .map(|&v| self.max[v])
            .collect();
        let mut next = Some(Parametrisation(vec![0; radix.len()]));
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            let mut carried = true;
            for i in (0..radix.len()).rev() {
                if succ.0[i] < radix[i] {
                    succ.0[i] += 1;
                    carried = false;
                    break;
                }
                succ.0[i] = 0;
            }
            if !carried {
                next = Some(succ);
            } else if radix.is_empty() {
                // A network with no coordinates still has exactly one
                // (empty) parametrisation.
                next = None;
            }
            Some(current)
        })
    }

    /// Enumerates all states in node-lexicographic order. Callers are
    /// responsible for checking [`Prn::state_count`] before iterating
    /// blindly.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        let mut next = Some(State(vec![0; self.node_count()]));
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            for v in (0..self.max.len()).rev() {
                if succ.0[v] < self.max[v] {
                    succ.0[v] += 1;
                    next = Some(succ);
                    break;
                }
                succ.0[v] = 0;
            }
            Some(current)
        })
    }

    /// The regulator state `ω_v(x)` observed by node `v` in state `x`.
    pub fn regulator_state(&self, v: NodeId, x: &State) -> RegulatorState {
        RegulatorState {
            target: v,
            values: self.graph.regulators(v).iter().map(|&u| x.0[u]).collect(),
        }
    }

    /// Coordinate of the parameter node `v` consults in state `x`.
    pub fn state_coord(&self, v: NodeId, x: &State) -> usize {
        let regs = self.graph.regulators(v);
        let mut c = self.layout.offset[v];
        for (i, &u) in regs.iter().enumerate() {
            c += x.0[u] as usize * self.layout.stride[v][i];
        }
        c
    }

    /// Coordinate consulted by the transition's node in its source state.
    pub fn transition_coord(&self, t: &Transition) -> usize {
        self.state_coord(t.node, &t.source)
    }

    /// All unitary transitions available from `x` in the parametric network,
    /// i.e. every step some parametrisation can take.
    pub fn all_transitions(&self, x: &State) -> Vec<Transition> {
        let mut out = Vec::new();
        for v in 0..self.node_count() {
            if x.0[v] < self.max[v] {
                out.push(Transition::new(x.clone(), v, Dir::Up));
            }
            if x.0[v] > 0 {
                out.push(Transition::new(x.clone(), v, Dir::Down));
            }
        }
        out
    }

    /// Transitions enabled in `x` once the parametrisation is fixed: node `v`
    /// steps towards `p[v, ω_v(x)]` whenever that level differs from `x[v]`.
    pub fn enabled_transitions(&self, p: &Parametrisation, x: &State) -> Vec<Transition> {
        let mut out = Vec::new();
        for v in 0..self.node_count() {
            let level = p.0[self.state_coord(v, x)];
            if level > x.0[v] {
                out.push(Transition::new(x.clone(), v, Dir::Up));
            } else if level < x.0[v] {
                out.push(Transition::new(x.clone(), v, Dir::Down));
            }
        }
        out
    }

    /// Checks that every entry of `x` is within its node's domain.
    pub fn state_in_domain(&self, x: &State) -> bool {
        x.0.len() == self.node_count()
            && x.0.iter().zip(&self.max).all(|(&xv, &m)| xv <= m)
    }

    /// Renders a transition with node names, e.g. `110 -(c+)-> 111`.
    pub fn format_transition(&self, t: &Transition) -> String {
        format!(
            "{} -({}{})-> {}",
            t.source,
            self.graph.name(t.node),
            t.dir,
            t.target()
        )
    }
}

/// A state: one level per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<u8>);

/// A parametrisation: one target level per parameter coordinate, in the
/// flat coordinate order of the owning [`Prn`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parametrisation(pub Vec<u8>);

fn write_levels(f: &mut fmt::Formatter<'_>, values: &[u8]) -> fmt::Result {
    write!(f, "\u{27e8}")?;
    if values.iter().all(|&x| x < 10) {
        for &x in values {
            write!(f, "{x}")?;
        }
    } else {
        for (i, &x) in values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
    }
    write!(f, "\u{27e9}")
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_levels(f, &self.0)
    }
}

impl fmt::Display for Parametrisation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_levels(f, &self.0)
    }
}

/// The regulator state `ω_v(x)`: the levels of `v`'s regulators, in id order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegulatorState {
    pub target: NodeId,
    pub values: Vec<u8>,
}

/// Direction of a unitary transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Up,
    Down,
}

impl Dir {
    /// `+1` or `-1`.
    pub fn delta(self) -> i8 {
        match self {
            Dir::Up => 1,
            Dir::Down => -1,
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::Up => "+",
            Dir::Down => "-",
        })
    }
}

/// A unitary asynchronous transition: `node` moves one level in `dir` from
/// `source`. Only transitions produced by [`Prn::all_transitions`] (or
/// equivalent in-domain data) are meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: State,
    pub node: NodeId,
    pub dir: Dir,
}

impl Transition {
    pub fn new(source: State, node: NodeId, dir: Dir) -> Self {
        Self { source, node, dir }
    }

    /// The state reached by taking the transition.
    pub fn target(&self) -> State {
        let mut t = self.source.clone();
        t.0[self.node] = (t.0[self.node] as i16 + self.dir.delta() as i16) as u8;
        t
    }

    /// The level of `node` after the step.
    pub fn new_level(&self) -> u8 {
        (self.source.0[self.node] as i16 + self.dir.delta() as i16) as u8
    }
}
