//! Complete finite prefix construction.
//!
//! Candidate events are explored in a total order that refines the causal
//! subset order: first by local-configuration size, then by the sorted word
//! of consulted parameter coordinates, then by the depth-layered variant of
//! that word, and finally — purely to break ties deterministically — by the
//! sorted precondition list and the transition label. Whenever an event
//! reaches a state some earlier event already reached with a parametrisation
//! box at least as large, it is marked as a cut-off and never extended;
//! conversely a newly inserted event demotes earlier events whose box is
//! strictly smaller. The result is a finite prefix that preserves every
//! reachable state of every admissible parametrisation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::constraints::ConstraintSet;
use crate::model::{Dir, NodeId, Prn, State, Transition};
use crate::plattice::ParamBox;
use crate::unfolding::{
    ConditionId, Cutoff, EventId, ExtensionSite, NewEvent, OccurrenceNet,
};

/// Resource limits for the construction.
#[derive(Debug, Clone, Default)]
pub struct PrefixOptions {
    /// Stop after this many inserted events (cut-offs included).
    pub max_events: Option<usize>,
}

/// Whether the construction ran to natural termination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    EventLimit,
}

/// Headline counters of a finished construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixStats {
    pub events_total: usize,
    pub events_non_cutoff: usize,
    pub conditions: usize,
    /// Number of distinct states witnessed by local configurations (plus the
    /// initial state). See [`reachable_states`] for the full extraction.
    pub reachable_states: usize,
}

/// A finished (or truncated) prefix.
#[derive(Debug, Clone)]
pub struct Prefix {
    pub net: OccurrenceNet,
    pub x0: State,
    /// Box of the empty configuration: the constraint-narrowed full box.
    pub base: ParamBox,
    pub outcome: Outcome,
}

impl Prefix {
    /// States witnessed by local configurations: the initial state plus
    /// `X(⌈e⌉)` of every event. A cheap under-view of [`reachable_states`]
    /// used for reporting.
    pub fn local_states(&self) -> BTreeSet<State> {
        let mut out = BTreeSet::new();
        if self.base.is_empty() {
            return out;
        }
        out.insert(self.x0.clone());
        for e in self.net.events() {
            out.insert(e.state.clone());
        }
        out
    }

    pub fn stats(&self) -> PrefixStats {
        PrefixStats {
            events_total: self.net.events().len(),
            events_non_cutoff: self
                .net
                .events()
                .iter()
                .filter(|e| !e.is_cutoff())
                .count(),
            conditions: self.net.conditions().len(),
            reachable_states: self.local_states().len(),
        }
    }
}

/// Total exploration key; the derived lexicographic order implements the
/// adequate order plus the deterministic tie-break.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    size: u32,
    parikh: Vec<u32>,
    foata: Vec<Vec<u32>>,
    preset: Vec<ConditionId>,
    node: NodeId,
    down: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    preset: Vec<ConditionId>,
    node: NodeId,
    dir: Dir,
    source_level: u8,
    coordinate: usize,
    parent_config: FixedBitSet,
    size: u32,
    depth: u32,
    state: State,
    bx: ParamBox,
}

fn key_of(net: &OccurrenceNet, e: EventId) -> Key {
    let events = net.events();
    let ev = &events[e];
    let mut parikh: Vec<u32> = ev
        .config
        .ones()
        .map(|i| events[i].coordinate as u32)
        .collect();
    parikh.sort_unstable();
    let mut foata: Vec<Vec<u32>> = vec![Vec::new(); ev.depth as usize];
    for i in ev.config.ones() {
        foata[events[i].depth as usize - 1].push(events[i].coordinate as u32);
    }
    for layer in &mut foata {
        layer.sort_unstable();
    }
    Key {
        size: ev.size,
        parikh,
        foata,
        preset: ev.preset.clone(),
        node: ev.node,
        down: ev.dir == Dir::Down,
    }
}

/// Compares the local configurations of two events in the exploration order.
/// The order refines causal inclusion: `⌈a⌉ ⊂ ⌈b⌉` implies `Less`.
pub fn adequate_compare(net: &OccurrenceNet, a: EventId, b: EventId) -> std::cmp::Ordering {
    key_of(net, a).cmp(&key_of(net, b))
}

/// Evaluates an extension site into a queued candidate. Returns `None` when
/// the site is no extension after all: its past contains a cut-off or its
/// narrowed box is empty.
fn make_candidate(
    prn: &Prn,
    rset: &ConstraintSet,
    base: &ParamBox,
    net: &OccurrenceNet,
    cutoff_bits: &FixedBitSet,
    x0: &State,
    site: &ExtensionSite,
) -> Option<(Key, Candidate)> {
    let events = net.events();
    let mut parent_config = FixedBitSet::with_capacity(events.len());
    let mut depth = 1u32;
    let mut bx: Option<ParamBox> = None;
    for &c in &site.preset {
        if let Some(p) = net.conditions()[c].producer {
            let ev = &events[p];
            let mut pc = ev.config.clone();
            pc.grow(events.len());
            parent_config.union_with(&pc);
            depth = depth.max(ev.depth + 1);
            bx = Some(match bx {
                None => ev.bx.clone(),
                Some(b) => b.intersect(&ev.bx),
            });
        }
    }
    if parent_config.ones().any(|e| cutoff_bits.contains(e)) {
        return None;
    }
    let mut state = x0.clone();
    for e in parent_config.ones() {
        let ev = &events[e];
        state.0[ev.node] = (state.0[ev.node] as i16 + ev.dir.delta() as i16) as u8;
    }
    let source = state.clone();
    debug_assert_eq!(source.0[site.node], site.source_level);
    state.0[site.node] = (site.source_level as i16 + site.dir.delta() as i16) as u8;
    let transition = Transition { source, node: site.node, dir: site.dir };
    let coordinate = prn.transition_coord(&transition);
    let mut bx = bx.unwrap_or_else(|| base.clone());
    bx.narrow_transition(prn, &transition);
    rset.narrow_all(prn, &mut bx, Some(site.node));
    rset.narrow_all(prn, &mut bx, None);
    if bx.is_empty() {
        return None;
    }
    let size = parent_config.count_ones(..) as u32 + 1;
    let mut parikh: Vec<u32> = parent_config
        .ones()
        .map(|e| events[e].coordinate as u32)
        .collect();
    parikh.push(coordinate as u32);
    parikh.sort_unstable();
    let mut foata: Vec<Vec<u32>> = vec![Vec::new(); depth as usize];
    for e in parent_config.ones() {
        let ev = &events[e];
        foata[ev.depth as usize - 1].push(ev.coordinate as u32);
    }
    foata[depth as usize - 1].push(coordinate as u32);
    for layer in &mut foata {
        layer.sort_unstable();
    }
    let key = Key {
        size,
        parikh,
        foata,
        preset: site.preset.clone(),
        node: site.node,
        down: site.dir == Dir::Down,
    };
    let candidate = Candidate {
        preset: site.preset.clone(),
        node: site.node,
        dir: site.dir,
        source_level: site.source_level,
        coordinate,
        parent_config,
        size,
        depth,
        state,
        bx,
    };
    Some((key, candidate))
}

/// Builds the complete finite prefix of the unfolding of `prn` under `rset`
/// from the initial state `x0`.
pub fn build_cfp(
    prn: &Prn,
    rset: &ConstraintSet,
    x0: &State,
    opts: &PrefixOptions,
) -> Prefix {
    assert!(prn.state_in_domain(x0), "initial state outside node domains");
    let base = rset.base_box(prn);
    let mut net = OccurrenceNet::new(prn, x0);
    let mut queue: BTreeMap<Key, Candidate> = BTreeMap::new();
    let mut cutoff_bits = FixedBitSet::with_capacity(0);
    let mut state_index: HashMap<State, Vec<EventId>> = HashMap::new();
    let mut outcome = Outcome::Complete;

    if !base.is_empty() {
        let anchors = net.initial().to_vec();
        for site in net.extensions_at(prn, &anchors) {
            if let Some((key, cand)) =
                make_candidate(prn, rset, &base, &net, &cutoff_bits, x0, &site)
            {
                let prev = queue.insert(key, cand);
                debug_assert!(prev.is_none(), "duplicate extension candidate");
            }
        }
    }

    while !queue.is_empty() {
        if let Some(limit) = opts.max_events {
            if net.events().len() >= limit {
                outcome = Outcome::EventLimit;
                break;
            }
        }
        let (_, cand) = queue.pop_first().expect("queue checked non-empty");
        // The candidate may have been built before one of its causal
        // predecessors was demoted a posteriori.
        if cand.parent_config.ones().any(|e| cutoff_bits.contains(e)) {
            continue;
        }
        let id = net.events().len();
        let mut config = cand.parent_config.clone();
        config.grow(id + 1);
        config.insert(id);
        let mut cutoff = None;
        if let Some(peers) = state_index.get(&cand.state) {
            for &e2 in peers {
                if cand.bx.is_subset_of(&net.events()[e2].bx) {
                    cutoff = Some(Cutoff { witness: e2, a_posteriori: false });
                    break;
                }
            }
        }
        let inserted = net.insert_event(NewEvent {
            node: cand.node,
            dir: cand.dir,
            source_level: cand.source_level,
            coordinate: cand.coordinate,
            preset: cand.preset,
            config,
            size: cand.size,
            depth: cand.depth,
            state: cand.state.clone(),
            bx: cand.bx.clone(),
            cutoff,
        });
        debug_assert_eq!(inserted, id);
        cutoff_bits.grow(id + 1);
        if let Some(peers) = state_index.get(&cand.state) {
            for &e2 in peers.clone().iter() {
                if !net.events()[e2].is_cutoff()
                    && net.events()[e2].bx.is_strict_subset_of(&cand.bx)
                {
                    net.mark_cutoff(e2, Cutoff { witness: id, a_posteriori: true });
                    cutoff_bits.insert(e2);
                }
            }
        }
        state_index.entry(cand.state).or_default().push(id);
        if cutoff.is_none() {
            let anchors = net.events()[id].postset.clone();
            for site in net.extensions_at(prn, &anchors) {
                if let Some((key, cand)) =
                    make_candidate(prn, rset, &base, &net, &cutoff_bits, x0, &site)
                {
                    let prev = queue.insert(key, cand);
                    debug_assert!(prev.is_none(), "duplicate extension candidate");
                }
            }
        } else {
            cutoff_bits.insert(id);
        }
    }

    Prefix { net, x0: x0.clone(), base, outcome }
}

/// The exact reachable-state set encoded by the prefix: states of all
/// markings reachable through configurations whose accumulated box stays
/// non-empty. Exhaustive over the prefix; meant for desk-scale models.
pub fn reachable_states(prefix: &Prefix, prn: &Prn, rset: &ConstraintSet) -> BTreeSet<State> {
    let mut states = BTreeSet::new();
    if prefix.base.is_empty() {
        return states;
    }
    let net = &prefix.net;
    let conditions = net.conditions();
    let events = net.events();
    let mut by_precondition: Vec<Vec<EventId>> = vec![Vec::new(); conditions.len()];
    for ev in events {
        for &c in &ev.preset {
            by_precondition[c].push(ev.id);
        }
    }
    let state_of = |cut: &[ConditionId]| State(cut.iter().map(|&c| conditions[c].level).collect());
    let initial_cut: Vec<ConditionId> = net.initial().to_vec();
    states.insert(prefix.x0.clone());
    let mut visited: HashMap<Vec<ConditionId>, Vec<ParamBox>> = HashMap::new();
    visited.insert(initial_cut.clone(), vec![prefix.base.clone()]);
    let mut stack = vec![(initial_cut, prefix.base.clone())];
    while let Some((cut, bx)) = stack.pop() {
        let mut tried = BTreeSet::new();
        for &c in &cut {
            for &e in &by_precondition[c] {
                if !tried.insert(e) {
                    continue;
                }
                let ev = &events[e];
                if !ev
                    .preset
                    .iter()
                    .all(|&p| cut[conditions[p].node] == p)
                {
                    continue;
                }
                let transition =
                    Transition { source: state_of(&cut), node: ev.node, dir: ev.dir };
                let mut bx2 = bx.clone();
                bx2.narrow_transition(prn, &transition);
                rset.narrow_all(prn, &mut bx2, None);
                if bx2.is_empty() {
                    continue;
                }
                let mut cut2 = cut.clone();
                for &d in &ev.postset {
                    cut2[conditions[d].node] = d;
                }
                let boxes = visited.entry(cut2.clone()).or_default();
                if boxes.iter().any(|b| bx2.is_subset_of(b)) {
                    continue;
                }
                boxes.retain(|b| !b.is_subset_of(&bx2));
                boxes.push(bx2.clone());
                states.insert(state_of(&cut2));
                stack.push((cut2, bx2));
            }
        }
    }
    states
}
