//! Belief-level strategies and their on-disk documents.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{BeliefState, TargetChoice, TriggerMode};
use crate::document::canonical_json;
use crate::loc::{Loc, LocSet, TriggerSet};
use crate::specs::{LocalForm, SurveillanceSpec};
use crate::world::SurveillanceWorld;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategySpec {
    Local(LocalForm),
    Global(SurveillanceSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveStats {
    pub region_size: usize,
    pub belief_states: usize,
    pub intermediate_states: usize,
    pub arena_nodes: usize,
    pub arena_edges: usize,
    pub winning_states: usize,
}

/// Response table of a memoryless strategy in the belief game: for each
/// winning belief state and each target choice there, the sensors' move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefStrategy {
    /// 0-based subgame index, `None` for a centralized strategy.
    pub subgame: Option<usize>,
    pub spec: StrategySpec,
    pub realizable: bool,
    pub trigger_mode: TriggerMode,
    pub stats: SolveStats,
    pub table: BTreeMap<BeliefState, BTreeMap<TargetChoice, Vec<Loc>>>,
}

impl BeliefStrategy {
    pub fn lookup(&self, state: &BeliefState, choice: &TargetChoice) -> Option<&[Loc]> {
        self.table.get(state)?.get(choice).map(Vec::as_slice)
    }

    pub fn covers(&self, state: &BeliefState) -> bool {
        self.table.contains_key(state)
    }

    fn entry(&self, world: &SurveillanceWorld, state: &BeliefState, responses: &BTreeMap<TargetChoice, Vec<Loc>>) -> MoveEntry {
        let ids = |t: TriggerSet| -> Vec<String> {
            let mut v: Vec<String> = t.iter().map(|j| world.static_sensors()[j].id.clone()).collect();
            v.sort();
            v
        };
        MoveEntry {
            responses: responses
                .iter()
                .map(|(choice, mv)| ResponseDoc {
                    belief: choice.next_belief.to_raw(),
                    r#move: mv[0].raw(),
                    triggers: ids(choice.next_triggers),
                })
                .collect(),
            state: StateDoc { belief: state.belief.to_raw(), loc: state.sensors[0].raw(), triggers: ids(state.triggers) },
        }
    }

    pub fn to_document(&self, world: &SurveillanceWorld) -> StrategyDocument {
        let moves = self.table.iter().map(|(state, responses)| self.entry(world, state, responses)).collect();
        StrategyDocument { moves, ..self.header() }
    }

    /// Writes the strategy file: sorted keys, one compact line per entry of
    /// `moves`. Entries are streamed, so large tables are never held as a
    /// JSON tree.
    pub fn write_json<W: Write>(&self, world: &SurveillanceWorld, mut out: W) -> io::Result<()> {
        let text = canonical_json(&self.header());
        let (before, after) = text.split_once("\"moves\": []").expect("moves key present");
        out.write_all(before.as_bytes())?;
        out.write_all(b"\"moves\": [")?;
        for (k, (state, responses)) in self.table.iter().enumerate() {
            out.write_all(if k == 0 { b"\n    " } else { b",\n    " })?;
            serde_json::to_writer(&mut out, &self.entry(world, state, responses))?;
        }
        if !self.table.is_empty() {
            out.write_all(b"\n  ")?;
        }
        out.write_all(b"]")?;
        out.write_all(after.as_bytes())?;
        out.flush()
    }

    /// The document without its move table.
    fn header(&self) -> StrategyDocument {
        StrategyDocument {
            moves: Vec::new(),
            realizable: self.realizable,
            spec: self.spec,
            stats: self.stats,
            subgame: self.subgame.map_or(0, |i| i + 1),
            trigger_mode: self.trigger_mode,
        }
    }

    pub fn to_json(&self, world: &SurveillanceWorld) -> String {
        let mut buf = Vec::new();
        self.write_json(world, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

#[derive(Debug, Error)]
pub enum StrategyFileError {
    #[error("malformed strategy file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("strategy file refers to unknown static sensor `{0}`")]
    UnknownAlarm(String),
    #[error("strategy file has invalid location {0}")]
    BadLocation(i32),
    #[error("strategy file is for subgame {found}, expected {expected}")]
    WrongSubgame { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub belief: Vec<i32>,
    pub loc: i32,
    pub triggers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseDoc {
    pub belief: Vec<i32>,
    pub r#move: i32,
    pub triggers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveEntry {
    pub responses: Vec<ResponseDoc>,
    pub state: StateDoc,
}

/// One subgame's strategy file (`subgame` is 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDocument {
    pub moves: Vec<MoveEntry>,
    pub realizable: bool,
    pub spec: StrategySpec,
    pub stats: SolveStats,
    pub subgame: usize,
    pub trigger_mode: TriggerMode,
}

impl StrategyDocument {
    pub fn parse(text: &str) -> Result<Self, StrategyFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_strategy(self, world: &SurveillanceWorld) -> Result<BeliefStrategy, StrategyFileError> {
        let alarm = |id: &String| -> Result<usize, StrategyFileError> {
            world
                .static_sensors()
                .iter()
                .position(|a| &a.id == id)
                .ok_or_else(|| StrategyFileError::UnknownAlarm(id.clone()))
        };
        let triggers = |ids: &[String]| -> Result<TriggerSet, StrategyFileError> {
            let mut t = TriggerSet::EMPTY;
            for id in ids {
                t.insert(alarm(id)?);
            }
            Ok(t)
        };
        let loc = |raw: i32| Loc::from_raw(raw).ok_or(StrategyFileError::BadLocation(raw));
        let set = |raw: &[i32]| -> Result<LocSet, StrategyFileError> { raw.iter().map(|&r| loc(r)).collect() };
        let mut table = BTreeMap::new();
        for entry in &self.moves {
            let state = BeliefState {
                sensors: vec![loc(entry.state.loc)?],
                belief: set(&entry.state.belief)?,
                triggers: triggers(&entry.state.triggers)?,
            };
            let mut responses = BTreeMap::new();
            for r in &entry.responses {
                let choice = TargetChoice { next_belief: set(&r.belief)?, next_triggers: triggers(&r.triggers)? };
                responses.insert(choice, vec![loc(r.r#move)?]);
            }
            table.insert(state, responses);
        }
        Ok(BeliefStrategy {
            subgame: self.subgame.checked_sub(1),
            spec: self.spec,
            realizable: self.realizable,
            trigger_mode: self.trigger_mode,
            stats: self.stats,
            table,
        })
    }
}

/// Reads one subgame's strategy file, checking it is for subgame `i`.
pub fn load_strategy(
    world: &SurveillanceWorld,
    i: usize,
    text: &str,
) -> Result<BeliefStrategy, StrategyFileError> {
    let doc = StrategyDocument::parse(text)?;
    if doc.subgame != i + 1 {
        return Err(StrategyFileError::WrongSubgame { expected: i + 1, found: doc.subgame });
    }
    doc.into_strategy(world)
}

/// File name of subgame `i`'s strategy inside an output directory.
pub fn strategy_file_name(i: usize) -> String {
    format!("strategy_{}.json", i + 1)
}
