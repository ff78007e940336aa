//! Synthesis report documents.

use serde::{Deserialize, Serialize};
use vigil_core::solver::SolveStats;
use vigil_core::TriggerMode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgameReport {
    /// 1-based.
    pub subgame: usize,
    pub realizable: bool,
    pub region_size: usize,
    pub belief_states: usize,
    pub intermediate_states: usize,
    pub arena_nodes: usize,
    pub arena_edges: usize,
    pub winning_states: usize,
}

impl SubgameReport {
    pub fn new(subgame: usize, realizable: bool, stats: &SolveStats) -> Self {
        SubgameReport {
            subgame,
            realizable,
            region_size: stats.region_size,
            belief_states: stats.belief_states,
            intermediate_states: stats.intermediate_states,
            arena_nodes: stats.arena_nodes,
            arena_edges: stats.arena_edges,
            winning_states: stats.winning_states,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Totals {
    /// Cells over the reported subgames' regions.
    pub locations: usize,
    pub belief_states: usize,
    pub arena_nodes: usize,
    pub realizable: bool,
}

/// `report.json`: byte-reproducible, so no wall times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisReport {
    pub trigger_mode: TriggerMode,
    pub cap: usize,
    pub subgames: Vec<SubgameReport>,
    pub totals: Totals,
}

impl SynthesisReport {
    pub fn new(trigger_mode: TriggerMode, cap: usize, subgames: Vec<SubgameReport>) -> Self {
        let totals = Totals {
            locations: subgames.iter().map(|s| s.region_size).sum(),
            belief_states: subgames.iter().map(|s| s.belief_states).sum(),
            arena_nodes: subgames.iter().map(|s| s.arena_nodes).sum(),
            realizable: subgames.iter().all(|s| s.realizable),
        };
        SynthesisReport { trigger_mode, cap, subgames, totals }
    }
}

/// `timings.json`: wall time per subgame in milliseconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub subgames: Vec<SubgameTiming>,
    pub total_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgameTiming {
    pub subgame: usize,
    pub wall_ms: u64,
}
