//! Belief-game arenas and the per-subgame synthesis pipeline.

use std::collections::BTreeMap;

use thiserror::Error;

use super::arena::{Arena, NodeSet, Owner};
use super::attractor::safety_region;
use super::strategy::{BeliefStrategy, SolveStats, StrategySpec};
use super::zielonka::{zielonka_within, WinningRegions};
use crate::belief::{reachable_belief_graph, BeliefError, BeliefGraph, TriggerMode};
use crate::decompose::{build_subgame, PartitionError};
use crate::game::GameStructure;
use crate::loc::Loc;
use crate::specs::{is_bad, priority_of, Obligations};
use crate::world::SurveillanceWorld;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("subgame {0} does not exist")]
    NoSuchSubgame(usize),
}

/// Node `s < S` is full belief state `s`; node `S + k` is intermediate `k`;
/// sink nodes for dead ends come last.
#[derive(Debug, Clone)]
pub struct BeliefArena {
    pub graph: BeliefGraph,
    pub arena: Arena,
    pub bad: NodeSet,
    pub obligations: Obligations,
    /// `(state id, choice index)` of each intermediate node
    pub intermediates: Vec<(usize, usize)>,
    /// index of each state's first intermediate within `intermediates`
    pub first_intermediate: Vec<usize>,
}

impl BeliefArena {
    pub fn state_count(&self) -> usize {
        self.graph.state_count()
    }

    pub fn intermediate_node(&self, state: usize, choice: usize) -> usize {
        let first = self.first_intermediate[state];
        self.state_count() + first + choice
    }
}

/// Builds the arena of the belief game of `game` for the given obligations.
pub fn build_arena<G: GameStructure + ?Sized>(
    game: &G,
    obligations: Obligations,
    mode: TriggerMode,
    cap: usize,
) -> Result<BeliefArena, BeliefError> {
    let graph = reachable_belief_graph(game, mode, cap)?;
    Ok(arena_from_graph(game, graph, obligations))
}

pub fn arena_from_graph<G: GameStructure + ?Sized>(
    game: &G,
    graph: BeliefGraph,
    obligations: Obligations,
) -> BeliefArena {
    let s_count = graph.state_count();
    let mut intermediates = Vec::with_capacity(graph.intermediate_count());
    let mut first_intermediate = Vec::with_capacity(s_count);
    for (s, edges) in graph.edges.iter().enumerate() {
        first_intermediate.push(intermediates.len());
        intermediates.extend((0..edges.len()).map(|k| (s, k)));
    }
    let base = s_count + intermediates.len();
    let mut owner = Vec::with_capacity(base + 4);
    let mut priority = Vec::with_capacity(base + 4);
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(base + 4);
    let mut sinks: BTreeMap<Owner, usize> = BTreeMap::new();
    let sink_for = |loser: Owner, sinks: &mut BTreeMap<Owner, usize>| -> usize {
        let next = base + 2 * sinks.len();
        *sinks.entry(loser).or_insert(next)
    };
    let mut bad = NodeSet::with_capacity(base);
    for (s, state) in graph.states.iter().enumerate() {
        owner.push(Owner::Antagonist);
        priority.push(priority_of(game, state, &obligations));
        if is_bad(game, state, &obligations) {
            bad.insert(s);
        }
        let out: Vec<usize> = (0..graph.edges[s].len()).map(|k| s_count + first_intermediate[s] + k).collect();
        adjacency.push(if out.is_empty() { vec![sink_for(Owner::Antagonist, &mut sinks)] } else { out });
    }
    for &(s, k) in &intermediates {
        owner.push(Owner::Protagonist);
        priority.push(0);
        let out = graph.edges[s][k].responses.clone();
        adjacency.push(if out.is_empty() { vec![sink_for(Owner::Protagonist, &mut sinks)] } else { out });
    }
    // each sink is a two-node cycle whose top priority favours the winner
    let mut sink_list: Vec<(Owner, usize)> = sinks.into_iter().collect();
    sink_list.sort_by_key(|&(_, id)| id);
    for (loser, id) in sink_list {
        debug_assert_eq!(owner.len(), id);
        owner.push(Owner::Antagonist);
        priority.push(if loser == Owner::Protagonist { 1 } else { 2 });
        adjacency.push(vec![id + 1]);
        owner.push(Owner::Protagonist);
        priority.push(0);
        adjacency.push(vec![id]);
    }
    bad.grow(owner.len());
    let arena = Arena::new(owner, priority, adjacency, 0).expect("belief arenas are total");
    BeliefArena { graph, arena, bad, obligations, intermediates, first_intermediate }
}

/// Safety restriction followed by parity solving.
pub fn solve_arena(ba: &BeliefArena) -> WinningRegions {
    let within = if ba.obligations.safety.is_some() {
        safety_region(&ba.arena, &ba.bad)
    } else {
        ba.arena.all_nodes()
    };
    zielonka_within(&ba.arena, &within)
}

/// Memoryless strategy at arena level: a successor for every protagonist
/// node of the protagonist winning region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessStrategy {
    pub moves: BTreeMap<usize, usize>,
    pub realizable: bool,
}

pub fn extract_strategy(arena: &Arena, regions: &WinningRegions) -> MemorylessStrategy {
    let moves = (0..arena.len())
        .filter(|&v| arena.owner(v) == Owner::Protagonist && regions.protagonist_wins(v))
        .map(|v| (v, regions.strategy[v].expect("winning protagonist nodes carry a move")))
        .collect();
    MemorylessStrategy { moves, realizable: !arena.is_empty() && regions.protagonist_wins(arena.initial()) }
}

/// Lifts an arena-level strategy to belief terms, consuming the arena.
pub fn belief_strategy(
    ba: BeliefArena,
    strategy: &MemorylessStrategy,
    subgame: Option<usize>,
    spec: StrategySpec,
    mode: TriggerMode,
    region_size: usize,
) -> BeliefStrategy {
    let stats = SolveStats {
        region_size,
        belief_states: ba.state_count(),
        intermediate_states: ba.intermediates.len(),
        arena_nodes: ba.arena.len(),
        arena_edges: ba.arena.edge_count(),
        winning_states: 0,
    };
    let s_count = ba.state_count();
    let first = ba.first_intermediate;
    let BeliefGraph { states, edges } = ba.graph;
    drop(ba.arena);
    let sensors: Vec<Vec<Loc>> = states.iter().map(|s| s.sensors.clone()).collect();
    let mut table = BTreeMap::new();
    for (s, (state, out)) in states.into_iter().zip(edges).enumerate() {
        let mut responses = BTreeMap::new();
        for (k, edge) in out.into_iter().enumerate() {
            let node = s_count + first[s] + k;
            if let Some(&next) = strategy.moves.get(&node) {
                if next < s_count {
                    responses.insert(edge.choice, sensors[next].clone());
                }
            }
        }
        if !responses.is_empty() {
            table.insert(state, responses);
        }
    }
    BeliefStrategy {
        subgame,
        spec,
        realizable: strategy.realizable,
        trigger_mode: mode,
        stats: SolveStats { winning_states: table.len(), ..stats },
        table,
    }
}

/// Full pipeline for subgame `i` (0-based).
pub fn solve_subgame(
    world: &SurveillanceWorld,
    i: usize,
    mode: TriggerMode,
    cap: usize,
) -> Result<BeliefStrategy, SolveError> {
    if i >= world.partition().len() {
        return Err(SolveError::NoSuchSubgame(i + 1));
    }
    let sub = build_subgame(world, i)?;
    let ba = build_arena(&sub, sub.spec.obligations(), mode, cap)?;
    let strategy = extract_strategy(&ba.arena, &solve_arena(&ba));
    Ok(belief_strategy(ba, &strategy, Some(i), StrategySpec::Local(sub.spec.form), mode, sub.region.len()))
}

/// Same pipeline on the centralized belief game of the whole world.
pub fn solve_global(world: &SurveillanceWorld, mode: TriggerMode, cap: usize) -> Result<BeliefStrategy, SolveError> {
    let spec = world.objective();
    let ba = build_arena(world, spec.obligations(), mode, cap)?;
    let strategy = extract_strategy(&ba.arena, &solve_arena(&ba));
    Ok(belief_strategy(ba, &strategy, None, StrategySpec::Global(spec), mode, world.free_cells().count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::BeliefState;
    use crate::fixtures;
    use crate::loc::{Loc, LocSet};
    use crate::specs::SurveillanceSpec;

    fn with_objective(spec: SurveillanceSpec) -> SurveillanceWorld {
        let mut parts = fixtures::fig3world().parts().clone();
        parts.objective = spec;
        SurveillanceWorld::new(parts).unwrap()
    }

    #[test]
    fn full_visibility_line_all_priority_two() {
        let w = crate::world::parse_world(
            r#"{"grid":{"width":3,"height":1},"obstacles":[],
            "move_rules":{"connectivity":"four","sensor_stay":true,"target_stay":true,"collision_mode":"block_visible_target"},
            "sensors":[{"id":"s","init":0,"visibility":{"kind":"full","range":0}}],
            "target":{"init":2},"static_sensors":[],"partition":[[0,1,2]],
            "objective":{"type":"liveness","b":1}}"#,
        )
        .unwrap();
        let ba = build_arena(&w, w.objective().obligations(), TriggerMode::Literal, 1000).unwrap();
        for s in 0..ba.state_count() {
            assert_eq!(ba.arena.priority(s), 2);
        }
        let strat = solve_subgame(&w, 0, TriggerMode::Literal, 1000).unwrap();
        assert!(strat.realizable);
        let global = solve_global(&w, TriggerMode::Literal, 1000).unwrap();
        assert_eq!(global.realizable, strat.realizable);
        assert_eq!(global.table, strat.table);
    }

    #[test]
    fn fig3_subgame1_initial_priority() {
        let w = with_objective(SurveillanceSpec::Liveness { b: 2 });
        let sub = build_subgame(&w, 0).unwrap();
        let ba = build_arena(&sub, sub.spec.obligations(), TriggerMode::Literal, 100_000).unwrap();
        let init = BeliefState {
            sensors: vec![Loc::cell(20)],
            belief: LocSet::singleton(Loc::cell(14)),
            triggers: Default::default(),
        };
        assert_eq!(ba.graph.id_of(&init), Some(0));
        assert_eq!(ba.arena.priority(0), 2);
    }

    #[test]
    fn fig3_subgame2_initial_not_bad() {
        let w = with_objective(SurveillanceSpec::Safety { b: 5 });
        let sub = build_subgame(&w, 1).unwrap();
        assert_eq!(sub.spec.obligations().safety, Some(3));
        let ba = build_arena(&sub, sub.spec.obligations(), TriggerMode::Literal, 100_000).unwrap();
        assert!(!ba.bad.contains(0));
    }

    #[test]
    fn fig3_safety_one_unrealizable() {
        let w = with_objective(SurveillanceSpec::Safety { b: 1 });
        let s = solve_subgame(&w, 0, TriggerMode::Literal, 100_000).unwrap();
        assert!(!s.realizable);
    }

    #[test]
    fn cap_one_is_explosion() {
        let w = fixtures::fig3world();
        assert!(matches!(
            solve_subgame(&w, 0, TriggerMode::Literal, 1),
            Err(SolveError::Belief(BeliefError::BeliefExplosion { .. }))
        ));
    }

    #[test]
    fn safety_monotone_in_bound() {
        let mut last = false;
        for b in 1..=12 {
            let w = with_objective(SurveillanceSpec::Safety { b });
            let all = (0..2).all(|i| solve_subgame(&w, i, TriggerMode::Literal, 100_000).unwrap().realizable);
            assert!(!last || all, "realizable at smaller bound but not at b={b}");
            last = all;
        }
        assert!(last);
    }
}
