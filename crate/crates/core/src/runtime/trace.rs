//! Newline-delimited JSON trace records.

use serde::{Deserialize, Serialize};

use super::{Predicates, SimulationState};
use crate::world::SurveillanceWorld;

/// One line of a simulation trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub step: usize,
    pub target: i32,
    pub sensors: Vec<i32>,
    pub local_beliefs: Vec<Vec<i32>>,
    pub global_belief: Vec<i32>,
    /// Ids of the alarms the target triggers, sorted.
    pub triggers: Vec<String>,
    pub predicates: Predicates,
}

pub fn trace_record(world: &SurveillanceWorld, sim: &SimulationState) -> TraceRecord {
    let mut triggers: Vec<String> = sim.triggers.iter().map(|j| world.static_sensors()[j].id.clone()).collect();
    triggers.sort();
    TraceRecord {
        step: sim.step,
        target: sim.true_target.raw(),
        sensors: sim.sensors.iter().map(|l| l.raw()).collect(),
        local_beliefs: sim.local.iter().map(|s| s.belief.to_raw()).collect(),
        global_belief: sim.global_belief.to_raw(),
        triggers,
        predicates: sim.predicates,
    }
}

impl TraceRecord {
    /// Compact single-line JSON with sorted keys.
    pub fn to_line(&self) -> String {
        let value = serde_json::to_value(self).expect("trace records serialize");
        serde_json::to_string(&value).expect("json values serialize")
    }
}
