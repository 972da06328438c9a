//! Occurrence-net structure for network unfoldings.
//!
//! The net is bipartite: *conditions* carry one node of the network at one
//! level, *events* are transition occurrences. An event for node `v` consumes
//! one condition for each node `v` depends on (its regulators and `v`
//! itself), reproduces the regulator conditions at unchanged levels and
//! produces the condition of `v` at the shifted level. Keeping copies of the
//! consulted regulator conditions makes every causal dependency explicit in
//! the net structure.
//!
//! Besides the structure itself this module maintains the concurrency
//! relation between conditions incrementally and enumerates the possible
//! extension sites anchored at freshly produced conditions. Ordering,
//! cut-offs and the actual prefix construction live in [`crate::prefix`].

use fixedbitset::FixedBitSet;

use crate::model::{Dir, NodeId, Prn, State};
use crate::plattice::ParamBox;

/// Index of a condition in its net.
pub type ConditionId = usize;
/// Index of an event in its net.
pub type EventId = usize;

/// A single node-level token of the occurrence net.
#[derive(Debug, Clone)]
pub struct Condition {
    pub id: ConditionId,
    pub node: NodeId,
    pub level: u8,
    /// Event that produced this condition; `None` for initial conditions.
    pub producer: Option<EventId>,
}

/// Cut-off marking of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoff {
    /// Event whose local configuration reaches the same state with a
    /// parametrisation box at least as large.
    pub witness: EventId,
    /// Whether the witness was inserted after the marked event.
    pub a_posteriori: bool,
}

/// A transition occurrence together with the cached data of its local
/// configuration.
#[derive(Debug, Clone)]
pub struct Event {
    pub id: EventId,
    pub node: NodeId,
    pub dir: Dir,
    /// Level of `node` consumed by the event.
    pub source_level: u8,
    /// Parameter coordinate consulted by the occurrence.
    pub coordinate: usize,
    /// Consumed conditions, sorted by node.
    pub preset: Vec<ConditionId>,
    /// Produced conditions, sorted by node.
    pub postset: Vec<ConditionId>,
    /// Events of the local configuration (this event included) as a bitset.
    pub config: FixedBitSet,
    /// Size of the local configuration.
    pub size: u32,
    /// Causal depth: 1 + the longest chain below this event.
    pub depth: u32,
    /// State reached by the local configuration.
    pub state: State,
    /// Parametrisation box of the local configuration.
    pub bx: ParamBox,
    pub cutoff: Option<Cutoff>,
}

impl Event {
    pub fn is_cutoff(&self) -> bool {
        self.cutoff.is_some()
    }
}

/// Everything needed to insert a new event except the data the net derives
/// itself (identifier and postset).
#[derive(Debug, Clone)]
pub struct NewEvent {
    pub node: NodeId,
    pub dir: Dir,
    pub source_level: u8,
    pub coordinate: usize,
    pub preset: Vec<ConditionId>,
    pub config: FixedBitSet,
    pub size: u32,
    pub depth: u32,
    pub state: State,
    pub bx: ParamBox,
    pub cutoff: Option<Cutoff>,
}

/// A complete preset for a potential new event, together with the levels it
/// reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSite {
    /// Chosen conditions, sorted by node, one per dependency of `node`.
    pub preset: Vec<ConditionId>,
    pub node: NodeId,
    pub dir: Dir,
    /// Level of `node` read from the preset.
    pub source_level: u8,
}

/// The growing occurrence net.
#[derive(Debug, Clone)]
pub struct OccurrenceNet {
    conditions: Vec<Condition>,
    events: Vec<Event>,
    initial: Vec<ConditionId>,
    /// Conditions per network node, in creation order.
    node_conditions: Vec<Vec<ConditionId>>,
    /// Concurrency relation, one (ragged) bitset per condition. A missing
    /// bit means "not concurrent".
    co: Vec<FixedBitSet>,
}

impl OccurrenceNet {
    /// Creates the net holding only the initial conditions (one per node,
    /// pairwise concurrent) encoding `x0`.
    pub fn new(prn: &Prn, x0: &State) -> Self {
        let n = prn.node_count();
        let mut net = OccurrenceNet {
            conditions: Vec::with_capacity(n),
            events: Vec::new(),
            initial: (0..n).collect(),
            node_conditions: vec![Vec::new(); n],
            co: Vec::with_capacity(n),
        };
        for v in 0..n {
            net.conditions.push(Condition { id: v, node: v, level: x0.0[v], producer: None });
            net.node_conditions[v].push(v);
            let mut co = FixedBitSet::with_capacity(n);
            co.insert_range(..n);
            co.set(v, false);
            net.co.push(co);
        }
        net
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn initial(&self) -> &[ConditionId] {
        &self.initial
    }

    /// Whether two distinct conditions can hold together in some reachable
    /// marking.
    pub fn co(&self, a: ConditionId, b: ConditionId) -> bool {
        b < self.co[a].len() && self.co[a].contains(b)
    }

    pub fn mark_cutoff(&mut self, e: EventId, cutoff: Cutoff) {
        debug_assert!(self.events[e].cutoff.is_none());
        self.events[e].cutoff = Some(cutoff);
    }

    /// Inserts a fully prepared event, creating its postset conditions and
    /// extending the concurrency relation. Returns the event identifier and
    /// exposes the fresh conditions through the event's `postset`.
    pub fn insert_event(&mut self, new: NewEvent) -> EventId {
        let id = self.events.len();
        let preset = new.preset.clone();
        // Conditions concurrent with the whole preset stay concurrent with
        // every produced condition; the preset itself is consumed.
        let mut inherited = FixedBitSet::with_capacity(self.conditions.len());
        inherited.insert_range(..self.conditions.len());
        for &b in &preset {
            let mut keep = self.co[b].clone();
            keep.grow(self.conditions.len());
            inherited.intersect_with(&keep);
        }
        for &b in &preset {
            inherited.set(b, false);
        }
        let first_new = self.conditions.len();
        let mut postset = Vec::with_capacity(preset.len());
        for &b in &preset {
            let cid = self.conditions.len();
            let node = self.conditions[b].node;
            let level = if node == new.node {
                (new.source_level as i16 + new.dir.delta() as i16) as u8
            } else {
                self.conditions[b].level
            };
            self.conditions.push(Condition { id: cid, node, level, producer: Some(id) });
            self.node_conditions[node].push(cid);
            self.co.push(FixedBitSet::with_capacity(cid + 1));
            postset.push(cid);
        }
        let total = self.conditions.len();
        let inherited: Vec<ConditionId> = inherited.ones().collect();
        for &d in &postset {
            // Siblings are pairwise concurrent, inherited conditions stay so.
            let co_d = &mut self.co[d];
            co_d.grow(total);
            co_d.insert_range(first_new..total);
            co_d.set(d, false);
            for &c in &inherited {
                co_d.insert(c);
            }
        }
        for &c in &inherited {
            let co_c = &mut self.co[c];
            co_c.grow(total);
            co_c.insert_range(first_new..total);
        }
        self.events.push(Event {
            id,
            node: new.node,
            dir: new.dir,
            source_level: new.source_level,
            coordinate: new.coordinate,
            preset,
            postset,
            config: new.config,
            size: new.size,
            depth: new.depth,
            state: new.state,
            bx: new.bx,
            cutoff: new.cutoff,
        });
        id
    }

    /// Nodes an event for `v` must consume: `v` and its regulators, sorted.
    pub fn dependency_nodes(prn: &Prn, v: NodeId) -> Vec<NodeId> {
        let mut dep = prn.graph().regulators(v).to_vec();
        if let Err(pos) = dep.binary_search(&v) {
            dep.insert(pos, v);
        }
        dep
    }

    /// Enumerates every complete preset that uses at least one condition of
    /// `anchors` (a set of freshly produced, pairwise concurrent conditions)
    /// and is pairwise concurrent. Each preset is reported once per feasible
    /// direction.
    ///
    /// Presets are canonicalised by their smallest anchor: choices never pick
    /// an anchor with a smaller identifier than the designated one, so a
    /// preset containing several anchors is still enumerated exactly once.
    pub fn extensions_at(&self, prn: &Prn, anchors: &[ConditionId]) -> Vec<ExtensionSite> {
        let mut out = Vec::new();
        for &anchor in anchors {
            let anchor_node = self.conditions[anchor].node;
            for v in 0..prn.node_count() {
                let dep = Self::dependency_nodes(prn, v);
                let Some(anchor_pos) = dep.iter().position(|&u| u == anchor_node) else {
                    continue;
                };
                let mut chosen = vec![usize::MAX; dep.len()];
                chosen[anchor_pos] = anchor;
                self.complete_preset(prn, v, &dep, anchor, anchors, &mut chosen, 0, &mut out);
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn complete_preset(
        &self,
        prn: &Prn,
        v: NodeId,
        dep: &[NodeId],
        anchor: ConditionId,
        anchors: &[ConditionId],
        chosen: &mut Vec<ConditionId>,
        level: usize,
        out: &mut Vec<ExtensionSite>,
    ) {
        if level == dep.len() {
            let v_pos = dep.iter().position(|&u| u == v).expect("v depends on itself");
            let source_level = self.conditions[chosen[v_pos]].level;
            for dir in [Dir::Up, Dir::Down] {
                let feasible = match dir {
                    Dir::Up => source_level < prn.max_of(v),
                    Dir::Down => source_level > 0,
                };
                if feasible {
                    out.push(ExtensionSite {
                        preset: chosen.clone(),
                        node: v,
                        dir,
                        source_level,
                    });
                }
            }
            return;
        }
        if chosen[level] != usize::MAX {
            return self.complete_preset(prn, v, dep, anchor, anchors, chosen, level + 1, out);
        }
        for &c in &self.node_conditions[dep[level]] {
            // Canonical anchor: skip anchors below the designated one.
            if anchors.contains(&c) && c <= anchor {
                continue;
            }
            let compatible = chosen
                .iter()
                .filter(|&&d| d != usize::MAX)
                .all(|&d| self.co(c, d));
            if compatible {
                chosen[level] = c;
                self.complete_preset(prn, v, dep, anchor, anchors, chosen, level + 1, out);
                chosen[level] = usize::MAX;
            }
        }
    }
}
