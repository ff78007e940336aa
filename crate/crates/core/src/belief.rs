//! Belief-set game construction: target belief choices, sensor responses and
//! the reachable belief-state graph.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameStructure;
use crate::loc::{Loc, LocSet, TriggerSet};

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BeliefError {
    #[error("belief explosion: more than {cap} belief states (frontier {frontier} at abort); refine the partition or the visibility")]
    BeliefExplosion { cap: usize, frontier: usize },
}

/// How a triggered alarm set restricts the next belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerMode {
    /// Every cell whose triggered set contains `J'`.
    #[default]
    Literal,
    /// Only cells whose triggered set equals `J'`.
    Exact,
}

impl std::str::FromStr for TriggerMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "literal" => Ok(TriggerMode::Literal),
            "exact" => Ok(TriggerMode::Exact),
            other => Err(format!("unknown trigger mode `{other}` (expected literal or exact)")),
        }
    }
}

impl std::fmt::Display for TriggerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TriggerMode::Literal => "literal",
            TriggerMode::Exact => "exact",
        })
    }
}

/// `(l_s, B_t, J)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefState {
    pub sensors: Vec<Loc>,
    pub belief: LocSet,
    pub triggers: TriggerSet,
}

impl BeliefState {
    pub fn initial<G: GameStructure + ?Sized>(game: &G) -> Self {
        let t = game.initial_target();
        BeliefState {
            sensors: game.initial_sensors(),
            belief: LocSet::singleton(t),
            triggers: game.triggered(t),
        }
    }

    pub fn with_sensors(&self, sensors: Vec<Loc>) -> Self {
        BeliefState { sensors, belief: self.belief.clone(), triggers: self.triggers }
    }
}

/// `(B', J')` picked by the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TargetChoice {
    pub next_belief: LocSet,
    pub next_triggers: TriggerSet,
}

impl TargetChoice {
    pub fn state(&self, sensors: Vec<Loc>) -> BeliefState {
        BeliefState { sensors, belief: self.next_belief.clone(), triggers: self.next_triggers }
    }
}

/// All belief choices of the target from `(sensors, belief)`, sorted.
pub fn target_choices<G: GameStructure + ?Sized>(
    game: &G,
    sensors: &[Loc],
    belief: &LocSet,
    mode: TriggerMode,
) -> Vec<TargetChoice> {
    let succ = game.target_successors(sensors, belief);
    let mut out = Vec::new();
    let mut invisible = Vec::new();
    for l in succ.iter() {
        if game.visible(sensors, l) {
            out.push(TargetChoice { next_belief: LocSet::singleton(l), next_triggers: game.triggered(l) });
        } else {
            invisible.push((l, game.triggered(l)));
        }
    }
    let quiet: LocSet = invisible.iter().filter(|(_, j)| j.is_empty()).map(|&(l, _)| l).collect();
    if !quiet.is_empty() {
        out.push(TargetChoice { next_belief: quiet, next_triggers: TriggerSet::EMPTY });
    }
    let distinct: BTreeSet<TriggerSet> =
        invisible.iter().map(|&(_, j)| j).filter(|j| !j.is_empty()).collect();
    let candidates: BTreeSet<TriggerSet> = match mode {
        TriggerMode::Exact => distinct,
        TriggerMode::Literal => distinct.iter().flat_map(|j| j.nonempty_subsets()).collect(),
    };
    for jp in candidates {
        let next: LocSet = invisible
            .iter()
            .filter(|&&(_, j)| match mode {
                TriggerMode::Exact => j == jp,
                TriggerMode::Literal => jp.is_subset(j),
            })
            .map(|&(l, _)| l)
            .collect();
        if !next.is_empty() {
            out.push(TargetChoice { next_belief: next, next_triggers: jp });
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Joint sensor responses to `choice`, ascending.
pub fn sensor_choices<G: GameStructure + ?Sized>(
    game: &G,
    sensors: &[Loc],
    belief: &LocSet,
    choice: &TargetChoice,
) -> Vec<Vec<Loc>> {
    let mut out = BTreeSet::new();
    let mut invisible_done = false;
    for to in choice.next_belief.iter() {
        let visible = game.visible(sensors, to);
        if !visible && invisible_done {
            // invisible destinations admit the same responses
            continue;
        }
        let Some(from) = belief.iter().find(|&l| game.target_moves(sensors, l).contains(&to)) else {
            continue;
        };
        out.extend(game.sensor_moves(sensors, from, to));
        invisible_done |= !visible;
    }
    out.into_iter().collect()
}

/// The target choice realized by a concrete move to `to`: the visible
/// singleton, or the invisible choice containing `to` whose triggers equal
/// `J(to)`.
pub fn observed_choice<G: GameStructure + ?Sized>(
    game: &G,
    sensors: &[Loc],
    belief: &LocSet,
    mode: TriggerMode,
    to: Loc,
) -> Option<TargetChoice> {
    let j = game.triggered(to);
    target_choices(game, sensors, belief, mode)
        .into_iter()
        .find(|c| c.next_triggers == j && c.next_belief.contains(to))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceEdge {
    pub choice: TargetChoice,
    /// Successor belief-state ids, ordered by sensor tuple.
    pub responses: Vec<usize>,
}

/// Reachable part of the belief-set game. State ids follow BFS order from the
/// initial state (id 0).
#[derive(Debug, Clone)]
pub struct BeliefGraph {
    pub states: IndexSet<BeliefState>,
    pub edges: Vec<Vec<ChoiceEdge>>,
}

impl BeliefGraph {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn intermediate_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state(&self, id: usize) -> &BeliefState {
        &self.states[id]
    }

    pub fn id_of(&self, s: &BeliefState) -> Option<usize> {
        self.states.get_index_of(s)
    }

    /// Debug listing, one `state -> choice -> response` line per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, state) in self.states.iter().enumerate() {
            for edge in &self.edges[id] {
                for &r in &edge.responses {
                    let _ = writeln!(
                        out,
                        "{} -> {}|{} -> {}",
                        format_state(state),
                        join(edge.choice.next_belief.iter().map(|l| l.raw())),
                        join(edge.choice.next_triggers.iter()),
                        join(self.states[r].sensors.iter().map(|l| l.raw())),
                    );
                }
            }
        }
        out
    }
}

fn join<T: ToString>(it: impl Iterator<Item = T>) -> String {
    it.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// `loc|b1,b2,...|t1,t2,...`
pub fn format_state(s: &BeliefState) -> String {
    format!(
        "{}|{}|{}",
        join(s.sensors.iter().map(|l| l.raw())),
        join(s.belief.iter().map(|l| l.raw())),
        join(s.triggers.iter())
    )
}

/// Breadth-first construction of the reachable belief graph, aborting once
/// more than `cap` belief states have been discovered.
pub fn reachable_belief_graph<G: GameStructure + ?Sized>(
    game: &G,
    mode: TriggerMode,
    cap: usize,
) -> Result<BeliefGraph, BeliefError> {
    let mut states = IndexSet::new();
    states.insert(BeliefState::initial(game));
    let mut edges: Vec<Vec<ChoiceEdge>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    if cap == 0 {
        return Err(BeliefError::BeliefExplosion { cap, frontier: 1 });
    }
    while let Some(id) = queue.pop_front() {
        let state = states[id].clone();
        let mut out = Vec::new();
        for choice in target_choices(game, &state.sensors, &state.belief, mode) {
            let mut responses = Vec::new();
            for sensors in sensor_choices(game, &state.sensors, &state.belief, &choice) {
                let (rid, fresh) = states.insert_full(choice.state(sensors));
                if fresh {
                    if states.len() > cap {
                        return Err(BeliefError::BeliefExplosion { cap, frontier: queue.len() + 1 });
                    }
                    queue.push_back(rid);
                }
                responses.push(rid);
            }
            out.push(ChoiceEdge { choice, responses });
        }
        debug_assert_eq!(edges.len(), id);
        edges.push(out);
    }
    Ok(BeliefGraph { states, edges })
}
