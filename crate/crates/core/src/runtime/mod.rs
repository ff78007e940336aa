//! Composition of local strategies, closed-loop simulation against target
//! policies, and exhaustive verification of the composed system.

mod adversary;
mod trace;
mod verify;

pub use adversary::{adversary_move, Adversary, AdversaryPolicy};
pub use trace::{trace_record, TraceRecord};
pub use verify::{verify_closed_loop, Lasso, LassoStep, Verdict, VerdictResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{observed_choice, BeliefError, BeliefState, TriggerMode};
use crate::decompose::{build_subgame, recombine_beliefs, EmptyRecombination, PartitionError, Subgame};
use crate::game::GameStructure;
use crate::loc::{Loc, LocSet, TriggerSet};
use crate::solver::BeliefStrategy;
use crate::specs::{invisible_count, Obligations};
use crate::world::SurveillanceWorld;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionMode {
    /// Each sensor tracks its own local belief from its own observations.
    #[default]
    Autonomous,
    /// Each sensor is queried with projections of a central global belief.
    Projection,
}

impl std::str::FromStr for CompositionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "autonomous" => Ok(CompositionMode::Autonomous),
            "projection" => Ok(CompositionMode::Projection),
            other => Err(format!("unknown composition mode `{other}` (expected autonomous or projection)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("illegal target move to {to}; legal moves: {legal:?}")]
    IllegalMove { to: i32, legal: Vec<i32> },
    #[error("strategy {} has no move for local state {state}", .subgame + 1)]
    StrategyDomain { subgame: usize, state: String },
    #[error("subgame {} has no realizable strategy (use --allow-partial to idle its sensor)", .subgame + 1)]
    Unrealizable { subgame: usize },
    #[error("expected {expected} strategies, got {found}")]
    StrategyCount { expected: usize, found: usize },
    #[error("strategies were solved under different trigger modes")]
    MixedTriggerModes,
    #[error("no belief choice of subgame {} matches the observed move to {to}", .subgame + 1)]
    Unobservable { subgame: usize, to: i32 },
    #[error("verification is disabled when some sensors idle")]
    PartialComposition,
    #[error(transparent)]
    EmptyRecombination(#[from] EmptyRecombination),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Predicate verdicts on the monitored global belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    /// Invisible cells in the monitored global belief.
    pub invisible: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safety: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub liveness: Option<bool>,
    /// Steps since the liveness bound last held.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_since_liveness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationState {
    pub step: usize,
    pub true_target: Loc,
    pub sensors: Vec<Loc>,
    /// Local belief states, one per subgame. In projection mode these are the
    /// projections of the central belief.
    pub local: Vec<BeliefState>,
    /// Recombination of the local beliefs.
    pub global_belief: LocSet,
    /// Belief of a centralized observer using every sensor's observations
    /// (exact trigger semantics).
    pub central: BeliefState,
    /// Alarms triggered by the target's true location.
    pub triggers: TriggerSet,
    pub predicates: Predicates,
}

/// Local strategies run side by side on a world.
#[derive(Debug, Clone)]
pub struct Composition {
    world: SurveillanceWorld,
    subgames: Vec<Subgame>,
    strategies: Vec<Option<BeliefStrategy>>,
    mode: CompositionMode,
    trigger_mode: TriggerMode,
}

impl Composition {
    /// `strategies[i]` may be `None` or unrealizable only with
    /// `allow_partial`, in which case sensor `i` idles at its initial cell.
    pub fn new(
        world: SurveillanceWorld,
        strategies: Vec<Option<BeliefStrategy>>,
        mode: CompositionMode,
        allow_partial: bool,
    ) -> Result<Self, RuntimeError> {
        let n = world.partition().len();
        if strategies.len() != n {
            return Err(RuntimeError::StrategyCount { expected: n, found: strategies.len() });
        }
        let strategies: Vec<Option<BeliefStrategy>> = strategies
            .into_iter()
            .enumerate()
            .map(|(i, s)| match s {
                Some(s) if s.realizable => Ok(Some(s)),
                _ if allow_partial => {
                    log::warn!("sensor {} idles: no realizable strategy", i + 1);
                    Ok(None)
                }
                _ => Err(RuntimeError::Unrealizable { subgame: i }),
            })
            .collect::<Result<_, _>>()?;
        let mut modes = strategies.iter().flatten().map(|s| s.trigger_mode);
        let trigger_mode = modes.next().unwrap_or_default();
        if modes.any(|m| m != trigger_mode) {
            return Err(RuntimeError::MixedTriggerModes);
        }
        let subgames = (0..n).map(|i| build_subgame(&world, i)).collect::<Result<_, _>>()?;
        Ok(Composition { world, subgames, strategies, mode, trigger_mode })
    }

    pub fn world(&self) -> &SurveillanceWorld {
        &self.world
    }

    pub fn subgames(&self) -> &[Subgame] {
        &self.subgames
    }

    pub fn mode(&self) -> CompositionMode {
        self.mode
    }

    pub fn trigger_mode(&self) -> TriggerMode {
        self.trigger_mode
    }

    pub fn is_partial(&self) -> bool {
        self.strategies.iter().any(Option::is_none)
    }

    pub fn strategy(&self, i: usize) -> Option<&BeliefStrategy> {
        self.strategies[i].as_ref()
    }

    pub fn initial_state(&self) -> SimulationState {
        let local: Vec<BeliefState> = self.subgames.iter().map(BeliefState::initial).collect();
        let central = BeliefState::initial(&self.world);
        let t = self.world.target_init();
        let global_belief = match self.mode {
            CompositionMode::Autonomous => {
                let beliefs: Vec<LocSet> = local.iter().map(|s| s.belief.clone()).collect();
                recombine_beliefs(self.world.partition(), &beliefs).expect("initial local beliefs agree")
            }
            CompositionMode::Projection => central.belief.clone(),
        };
        let sensors = central.sensors.clone();
        let triggers = self.world.triggered(t);
        let predicates = self.predicates(&sensors, &global_belief, triggers, None);
        SimulationState { step: 0, true_target: t, sensors, local, global_belief, central, triggers, predicates }
    }

    pub fn legal_moves(&self, sim: &SimulationState) -> Vec<Loc> {
        self.world.target_moves(&sim.sensors, sim.true_target)
    }

    /// One round: the target moves to `to`, every sensor updates its belief
    /// and answers with its strategy's move.
    pub fn step(&self, sim: &SimulationState, to: Loc) -> Result<SimulationState, RuntimeError> {
        let legal = self.legal_moves(sim);
        if !legal.contains(&to) {
            return Err(RuntimeError::IllegalMove { to: to.raw(), legal: legal.iter().map(|l| l.raw()).collect() });
        }
        let triggers = self.world.triggered(to);
        let (sensors, local, global_belief, central) = match self.mode {
            CompositionMode::Autonomous => {
                let (sensors, local) = self.advance_local(&sim.local, to)?;
                let beliefs: Vec<LocSet> = local.iter().map(|s| s.belief.clone()).collect();
                let global = recombine_beliefs(self.world.partition(), &beliefs)?;
                let central = self.advance_central(&sim.central, &sensors, to)?;
                (sensors, local, global, central)
            }
            CompositionMode::Projection => {
                let (sensors, central) = self.advance_projection(&sim.central, to)?;
                let local = self.project_all(&central);
                (sensors, local, central.belief.clone(), central)
            }
        };
        let predicates = self.predicates(&sensors, &global_belief, triggers, Some(&sim.predicates));
        Ok(SimulationState {
            step: sim.step + 1,
            true_target: to,
            sensors,
            local,
            global_belief,
            central,
            triggers,
            predicates,
        })
    }

    /// Autonomous update of every local belief state.
    pub(crate) fn advance_local(
        &self,
        local: &[BeliefState],
        to: Loc,
    ) -> Result<(Vec<Loc>, Vec<BeliefState>), RuntimeError> {
        let mut sensors = Vec::with_capacity(local.len());
        let mut next = Vec::with_capacity(local.len());
        for (i, (sub, state)) in self.subgames.iter().zip(local).enumerate() {
            let local_to = sub.localize(to);
            let choice = observed_choice(sub, &state.sensors, &state.belief, self.trigger_mode, local_to)
                .ok_or(RuntimeError::Unobservable { subgame: i, to: to.raw() })?;
            let moved = match &self.strategies[i] {
                Some(strategy) => strategy
                    .lookup(state, &choice)
                    .ok_or_else(|| RuntimeError::StrategyDomain {
                        subgame: i,
                        state: crate::belief::format_state(state),
                    })?
                    .to_vec(),
                None => state.sensors.clone(),
            };
            sensors.push(moved[0]);
            next.push(choice.state(moved));
        }
        Ok((sensors, next))
    }

    /// Centralized belief update given the sensors' actual responses.
    fn advance_central(
        &self,
        central: &BeliefState,
        sensors: &[Loc],
        to: Loc,
    ) -> Result<BeliefState, RuntimeError> {
        let choice = observed_choice(&self.world, &central.sensors, &central.belief, TriggerMode::Exact, to)
            .ok_or(RuntimeError::Unobservable { subgame: 0, to: to.raw() })?;
        Ok(choice.state(sensors.to_vec()))
    }

    /// Projection-mode round: the global belief evolves by the global game,
    /// and each sensor is asked with the projections of the previous state
    /// and of the realized choice.
    pub(crate) fn advance_projection(
        &self,
        central: &BeliefState,
        to: Loc,
    ) -> Result<(Vec<Loc>, BeliefState), RuntimeError> {
        let choice = observed_choice(&self.world, &central.sensors, &central.belief, self.trigger_mode, to)
            .ok_or(RuntimeError::Unobservable { subgame: 0, to: to.raw() })?;
        let p = self.world.partition();
        let mut sensors = Vec::with_capacity(self.subgames.len());
        for (i, sub) in self.subgames.iter().enumerate() {
            let query = BeliefState {
                sensors: vec![central.sensors[i]],
                belief: crate::decompose::project_belief(p, i, &central.belief),
                triggers: central.triggers.intersect(sub.alarms),
            };
            let local_choice = crate::belief::TargetChoice {
                next_belief: crate::decompose::project_belief(p, i, &choice.next_belief),
                next_triggers: choice.next_triggers.intersect(sub.alarms),
            };
            let moved = match &self.strategies[i] {
                Some(strategy) => strategy
                    .lookup(&query, &local_choice)
                    .ok_or_else(|| RuntimeError::StrategyDomain {
                        subgame: i,
                        state: format!(
                            "{} -> {}",
                            crate::belief::format_state(&query),
                            crate::belief::format_state(&local_choice.state(vec![central.sensors[i]]))
                        ),
                    })?[0],
                None => central.sensors[i],
            };
            sensors.push(moved);
        }
        let next = choice.state(sensors.clone());
        Ok((sensors, next))
    }

    fn project_all(&self, central: &BeliefState) -> Vec<BeliefState> {
        let p = self.world.partition();
        self.subgames
            .iter()
            .enumerate()
            .map(|(i, sub)| BeliefState {
                sensors: vec![central.sensors[i]],
                belief: crate::decompose::project_belief(p, i, &central.belief),
                triggers: central.triggers.intersect(sub.alarms),
            })
            .collect()
    }

    fn obligations(&self) -> Obligations {
        self.world.objective().obligations()
    }

    fn predicates(
        &self,
        sensors: &[Loc],
        belief: &LocSet,
        triggers: TriggerSet,
        previous: Option<&Predicates>,
    ) -> Predicates {
        let state = BeliefState { sensors: sensors.to_vec(), belief: belief.clone(), triggers };
        let invisible = invisible_count(&self.world, &state);
        let ob = self.obligations();
        let liveness = ob.liveness.map(|b| invisible <= b as usize);
        let steps_since_liveness = liveness.map(|holds| {
            if holds {
                0
            } else {
                previous.and_then(|p| p.steps_since_liveness).unwrap_or(0) + 1
            }
        });
        Predicates { invisible, safety: ob.safety.map(|a| invisible <= a as usize), liveness, steps_since_liveness }
    }
}

/// Runs `steps` rounds against `adversary`. Interactive adversaries take
/// their moves from `scripted`, stopping when it runs out.
pub fn simulate(
    comp: &Composition,
    adversary: &mut Adversary,
    steps: usize,
    scripted: &[Loc],
) -> Result<Vec<SimulationState>, RuntimeError> {
    let mut trace = vec![comp.initial_state()];
    let mut script = scripted.iter();
    for _ in 0..steps {
        let sim = trace.last().unwrap();
        let to = match adversary.policy() {
            AdversaryPolicy::Interactive => match script.next() {
                Some(&to) => to,
                None => break,
            },
            _ => match adversary.choose(comp, sim) {
                Some(to) => to,
                None => break,
            },
        };
        let next = comp.step(sim, to)?;
        trace.push(next);
    }
    Ok(trace)
}
