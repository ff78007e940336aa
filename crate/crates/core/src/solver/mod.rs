//! Explicit-state game solving and strategy synthesis.

pub mod arena;
pub mod attractor;
pub mod oracle;
pub mod strategy;
pub mod synth;
pub mod zielonka;

pub use arena::{Arena, ArenaError, NodeSet, Owner};
pub use attractor::{attractor, attractor_with_strategy, safety_region};
pub use oracle::{check_by_unrolling, oracle_solve, OracleTooLarge};
pub use strategy::{load_strategy, strategy_file_name, BeliefStrategy, SolveStats, StrategyDocument, StrategyFileError, StrategySpec};
pub use synth::{
    arena_from_graph, belief_strategy, build_arena, extract_strategy, solve_arena, solve_global, solve_subgame,
    BeliefArena, MemorylessStrategy, SolveError,
};
pub use zielonka::{zielonka, zielonka_within, WinningRegions};
