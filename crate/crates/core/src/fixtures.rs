//! Bundled example worlds.

use crate::world::{parse_world, SurveillanceWorld};

/// 5×5 grid with a three-cell wall, two sensors and two regions.
pub const FIG3WORLD: &str = include_str!("../fixtures/fig3world.json");
/// `fig3world` with single-cell alarms on the four region entry cells.
pub const FIG3ALARMS: &str = include_str!("../fixtures/fig3alarms.json");
/// The same grid with the target starting at 18.
pub const EXAMPLE1WORLD: &str = include_str!("../fixtures/example1world.json");
/// 20×20 open map, three regions of 142/113/145 cells and four alarm regions.
pub const SELOUS20X20: &str = include_str!("../fixtures/selous20x20.json");

pub fn fig3world() -> SurveillanceWorld {
    parse_world(FIG3WORLD).expect("bundled fixture is valid")
}

pub fn fig3alarms() -> SurveillanceWorld {
    parse_world(FIG3ALARMS).expect("bundled fixture is valid")
}

pub fn example1world() -> SurveillanceWorld {
    parse_world(EXAMPLE1WORLD).expect("bundled fixture is valid")
}

pub fn selous20x20() -> SurveillanceWorld {
    parse_world(SELOUS20X20).expect("bundled fixture is valid")
}

/// Bundled fixtures by name.
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "fig3world" => Some(FIG3WORLD),
        "fig3alarms" => Some(FIG3ALARMS),
        "example1world" => Some(EXAMPLE1WORLD),
        "selous20x20" => Some(SELOUS20X20),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["fig3world", "fig3alarms", "example1world", "selous20x20"];
