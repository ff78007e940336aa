//! JSON documents: world files and per-subgame decomposition output.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decompose::{Partition, Subgame};
use crate::loc::Loc;
use crate::specs::SurveillanceSpec;
use crate::world::{
    GridMap, MobileSensor, MoveRules, StaticSensor, SurveillanceWorld, VisibilityConfig, WorldError,
    WorldParts,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorDoc {
    pub id: String,
    pub init: u32,
    pub visibility: VisibilityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub init: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticSensorDoc {
    pub id: String,
    pub cells: Vec<u32>,
}

/// On-disk world file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldDocument {
    pub grid: GridDoc,
    #[serde(default)]
    pub obstacles: Vec<u32>,
    #[serde(default)]
    pub move_rules: MoveRules,
    pub sensors: Vec<SensorDoc>,
    pub target: TargetDoc,
    #[serde(default)]
    pub static_sensors: Vec<StaticSensorDoc>,
    pub partition: Vec<Vec<u32>>,
    pub objective: SurveillanceSpec,
}

impl WorldDocument {
    pub fn parse(text: &str) -> Result<Self, WorldError> {
        serde_json::from_str(text).map_err(|e| WorldError::Schema(e.to_string()))
    }

    pub fn into_world(self) -> Result<SurveillanceWorld, WorldError> {
        let parts = WorldParts {
            grid: GridMap {
                width: self.grid.width,
                height: self.grid.height,
                obstacles: self.obstacles.into_iter().collect(),
            },
            move_rules: self.move_rules,
            sensors: self
                .sensors
                .into_iter()
                .map(|s| MobileSensor { id: s.id, init: Loc::cell(s.init), visibility: s.visibility })
                .collect(),
            target_init: Loc::cell(self.target.init),
            static_sensors: self
                .static_sensors
                .into_iter()
                .map(|a| StaticSensor { id: a.id, cells: a.cells.into_iter().collect() })
                .collect(),
            partition: Partition::new(
                self.partition
                    .into_iter()
                    .map(|r| r.into_iter().map(Loc::cell).collect())
                    .collect(),
            ),
            objective: self.objective,
        };
        SurveillanceWorld::new(parts)
    }

    pub fn from_world(world: &SurveillanceWorld) -> Self {
        let p = world.parts();
        let cells = |s: &crate::loc::LocSet| s.iter().map(|l| l.raw() as u32).collect::<Vec<_>>();
        WorldDocument {
            grid: GridDoc { width: p.grid.width, height: p.grid.height },
            obstacles: p.grid.obstacles.iter().copied().collect(),
            move_rules: p.move_rules,
            sensors: p
                .sensors
                .iter()
                .map(|s| SensorDoc { id: s.id.clone(), init: s.init.raw() as u32, visibility: s.visibility })
                .collect(),
            target: TargetDoc { init: p.target_init.raw() as u32 },
            static_sensors: p
                .static_sensors
                .iter()
                .map(|a| StaticSensorDoc { id: a.id.clone(), cells: a.cells.iter().copied().collect() })
                .collect(),
            partition: p.partition.regions.iter().map(cells).collect(),
            objective: p.objective,
        }
    }
}

/// Serializes with sorted keys, two-space indentation and a trailing newline.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v: Value = serde_json::to_value(value).expect("documents serialize to JSON");
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values print");
    s.push('\n');
    s
}

pub fn print_world(world: &SurveillanceWorld) -> String {
    canonical_json(&WorldDocument::from_world(world))
}

/// Decomposition output for one subgame: the world schema restricted to the
/// region, plus the `OUTSIDE` encoding, local alarms and local objective.
pub fn subgame_document(world: &SurveillanceWorld, sub: &Subgame) -> Value {
    let doc = WorldDocument::from_world(world);
    let i = sub.index;
    let region: Vec<i32> = sub.region.to_raw();
    let alarms: Vec<&str> = sub.alarms.iter().map(|j| world.static_sensors()[j].id.as_str()).collect();
    serde_json::json!({
        "subgame": i + 1,
        "grid": doc.grid,
        "obstacles": doc.obstacles,
        "move_rules": doc.move_rules,
        "sensors": [doc.sensors[i]],
        "target": {"init": sub.target_init().raw()},
        "static_sensors": doc.static_sensors.iter()
            .filter(|a| alarms.contains(&a.id.as_str()))
            .collect::<Vec<_>>(),
        "partition": [region],
        "objective": sub.spec.form,
        "outside": Loc::OUTSIDE.raw(),
        "alarms": alarms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::build_subgame;
    use crate::fixtures;
    use crate::world::parse_world;

    #[test]
    fn world_round_trip() {
        for text in [fixtures::FIG3WORLD, fixtures::EXAMPLE1WORLD, fixtures::SELOUS20X20] {
            let w = parse_world(text).unwrap();
            let printed = print_world(&w);
            let again = parse_world(&printed).unwrap();
            assert_eq!(w, again);
            assert_eq!(printed, print_world(&again));
        }
    }

    #[test]
    fn unknown_field_is_schema_error() {
        let mut v: Value = serde_json::from_str(fixtures::FIG3WORLD).unwrap();
        v["extra"] = Value::Bool(true);
        assert!(matches!(parse_world(&v.to_string()), Err(WorldError::Schema(_))));
    }

    #[test]
    fn invalid_world_names_path() {
        let mut v: Value = serde_json::from_str(fixtures::FIG3WORLD).unwrap();
        v["sensors"][1]["init"] = Value::from(12);
        let err = parse_world(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("sensors[1].init"), "{err}");
    }

    #[test]
    fn subgame_document_shape() {
        let w = fixtures::fig3world();
        let sub = build_subgame(&w, 1).unwrap();
        let doc = subgame_document(&w, &sub);
        assert_eq!(doc["outside"], -1);
        assert_eq!(doc["subgame"], 2);
        assert_eq!(doc["target"]["init"], -1);
        assert_eq!(doc["partition"][0].as_array().unwrap().len(), 10);
        assert_eq!(doc["sensors"][0]["init"], 4);
    }
}
