//! Gridworld surveillance game structure: cells, moves, line-of-sight
//! visibility and static alarm regions.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{Partition, PartitionError};
use crate::game::GameStructure;
use crate::loc::{Loc, LocSet, TriggerSet};
use crate::specs::SurveillanceSpec;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid world at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> WorldError {
    WorldError::Invalid { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    pub width: u32,
    pub height: u32,
    pub obstacles: BTreeSet<u32>,
}

impl GridMap {
    pub fn cell_count(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn coords(&self, cell: u32) -> (i32, i32) {
        ((cell / self.width) as i32, (cell % self.width) as i32)
    }

    pub fn cell_at(&self, row: i32, col: i32) -> Option<u32> {
        if row < 0 || col < 0 || row >= self.height as i32 || col >= self.width as i32 {
            None
        } else {
            Some(row as u32 * self.width + col as u32)
        }
    }

    pub fn is_free(&self, loc: Loc) -> bool {
        match loc.index() {
            Some(c) => c < self.cell_count() && !self.obstacles.contains(&(c as u32)),
            None => false,
        }
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Loc> + '_ {
        (0..self.cell_count() as u32)
            .filter(|c| !self.obstacles.contains(c))
            .map(Loc::cell)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionMode {
    /// Sensors may not move onto a target destination they can see, the
    /// target may not move onto a sensor, and sensors may not stack.
    #[default]
    BlockVisibleTarget,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MoveRules {
    pub connectivity: Connectivity,
    pub sensor_stay: bool,
    pub target_stay: bool,
    pub collision_mode: CollisionMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Sensor,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityKind {
    LineOfSight,
    Full,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityConfig {
    pub kind: VisibilityKind,
    #[serde(default)]
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobileSensor {
    pub id: String,
    pub init: Loc,
    pub visibility: VisibilityConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticSensor {
    pub id: String,
    pub cells: BTreeSet<u32>,
}

/// Joint sensor locations and the target location.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullState {
    pub sensor_locs: Vec<Loc>,
    pub target_loc: Loc,
}

/// Declared content of a world.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldParts {
    pub grid: GridMap,
    pub move_rules: MoveRules,
    pub sensors: Vec<MobileSensor>,
    pub target_init: Loc,
    pub static_sensors: Vec<StaticSensor>,
    pub partition: Partition,
    pub objective: SurveillanceSpec,
}

/// A validated multi-sensor surveillance game on a grid. Immutable.
#[derive(Debug, Clone)]
pub struct SurveillanceWorld {
    parts: WorldParts,
    /// `visibility[i][c]`: cells visible to sensor `i` standing on cell `c`.
    visibility: Vec<Vec<LocSet>>,
    triggers: Vec<TriggerSet>,
    alarm_cells: Vec<LocSet>,
}

impl PartialEq for SurveillanceWorld {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

/// Parses and validates a world document.
pub fn parse_world(text: &str) -> Result<SurveillanceWorld, WorldError> {
    crate::document::WorldDocument::parse(text)?.into_world()
}

impl SurveillanceWorld {
    pub fn new(parts: WorldParts) -> Result<Self, WorldError> {
        let grid = &parts.grid;
        if grid.width == 0 || grid.height == 0 {
            return Err(invalid("grid", "width and height must be positive"));
        }
        let cells = grid.cell_count();
        if let Some(&o) = grid.obstacles.iter().find(|&&o| o as usize >= cells) {
            return Err(invalid("obstacles", format!("cell {o} outside the {}x{} grid", grid.width, grid.height)));
        }
        if grid.free_cells().count() < 2 {
            return Err(invalid("obstacles", "fewer than two free cells"));
        }
        if parts.sensors.is_empty() {
            return Err(invalid("sensors", "at least one mobile sensor is required"));
        }
        let mut ids = HashSet::new();
        let mut occupied = HashSet::new();
        for (i, s) in parts.sensors.iter().enumerate() {
            let path = format!("sensors[{i}]");
            if !ids.insert(s.id.as_str()) {
                return Err(invalid(format!("{path}.id"), format!("duplicate sensor id `{}`", s.id)));
            }
            if !grid.is_free(s.init) {
                return Err(invalid(format!("{path}.init"), format!("cell {} is not a free cell", s.init)));
            }
            if !occupied.insert(s.init) {
                return Err(invalid(format!("{path}.init"), format!("cell {} already occupied", s.init)));
            }
            let r = s.visibility.range;
            if !r.is_finite() || r < 0.0 {
                return Err(invalid(format!("{path}.visibility.range"), "must be a non-negative number"));
            }
        }
        if !grid.is_free(parts.target_init) {
            return Err(invalid("target.init", format!("cell {} is not a free cell", parts.target_init)));
        }
        if occupied.contains(&parts.target_init) {
            return Err(invalid("target.init", "target starts on a sensor"));
        }
        if parts.static_sensors.len() > TriggerSet::CAPACITY {
            return Err(invalid("static_sensors", format!("at most {} static sensors", TriggerSet::CAPACITY)));
        }
        let mut alarm_ids = HashSet::new();
        for (j, a) in parts.static_sensors.iter().enumerate() {
            let path = format!("static_sensors[{j}]");
            if !alarm_ids.insert(a.id.as_str()) {
                return Err(invalid(format!("{path}.id"), format!("duplicate static sensor id `{}`", a.id)));
            }
            if a.cells.is_empty() {
                return Err(invalid(format!("{path}.cells"), "must be non-empty"));
            }
            if let Some(c) = a.cells.iter().find(|&&c| !grid.is_free(Loc::cell(c))) {
                return Err(invalid(format!("{path}.cells"), format!("cell {c} is not a free cell")));
            }
        }
        parts.objective.validate().map_err(|e| invalid("objective", e.to_string()))?;

        let mut world = SurveillanceWorld {
            visibility: Vec::new(),
            triggers: vec![TriggerSet::EMPTY; cells],
            alarm_cells: Vec::new(),
            parts,
        };
        for role in [Role::Sensor, Role::Target] {
            for l in world.parts.grid.free_cells() {
                if world.neighbors(l, role).is_empty() {
                    return Err(invalid(
                        "move_rules",
                        format!("cell {l} has no possible {} move", if role == Role::Sensor { "sensor" } else { "target" }),
                    ));
                }
            }
        }
        for (j, a) in world.parts.static_sensors.iter().enumerate() {
            for &c in &a.cells {
                world.triggers[c as usize].insert(j);
            }
            world.alarm_cells.push(a.cells.iter().map(|&c| Loc::cell(c)).collect());
        }
        world.visibility = world
            .parts
            .sensors
            .iter()
            .map(|s| visibility_table(&world.parts.grid, &s.visibility))
            .collect();
        crate::decompose::validate_partition(&world)?;
        Ok(world)
    }

    pub fn parts(&self) -> &WorldParts {
        &self.parts
    }

    pub fn grid(&self) -> &GridMap {
        &self.parts.grid
    }

    pub fn move_rules(&self) -> &MoveRules {
        &self.parts.move_rules
    }

    pub fn sensors(&self) -> &[MobileSensor] {
        &self.parts.sensors
    }

    pub fn static_sensors(&self) -> &[StaticSensor] {
        &self.parts.static_sensors
    }

    pub fn partition(&self) -> &Partition {
        &self.parts.partition
    }

    pub fn objective(&self) -> SurveillanceSpec {
        self.parts.objective
    }

    pub fn target_init(&self) -> Loc {
        self.parts.target_init
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Loc> + '_ {
        self.parts.grid.free_cells()
    }

    pub fn free_set(&self) -> LocSet {
        self.free_cells().collect()
    }

    pub fn alarm_cells(&self, j: usize) -> &LocSet {
        &self.alarm_cells[j]
    }

    pub fn initial_state(&self) -> FullState {
        FullState {
            sensor_locs: self.parts.sensors.iter().map(|s| s.init).collect(),
            target_loc: self.parts.target_init,
        }
    }

    fn blocks(&self) -> bool {
        self.parts.move_rules.collision_mode == CollisionMode::BlockVisibleTarget
    }

    /// Adjacent free cells per the move rules, plus `loc` itself when the
    /// role may stay. Ascending.
    pub fn neighbors(&self, loc: Loc, role: Role) -> Vec<Loc> {
        let grid = &self.parts.grid;
        let Some(c) = loc.index() else { return Vec::new() };
        let (r, col) = grid.coords(c as u32);
        let rules = &self.parts.move_rules;
        let four: &[(i32, i32)] = &[(-1, 0), (0, -1), (0, 1), (1, 0)];
        let eight: &[(i32, i32)] =
            &[(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
        let offsets = match rules.connectivity {
            Connectivity::Four => four,
            Connectivity::Eight => eight,
        };
        let mut out: Vec<Loc> = offsets
            .iter()
            .filter_map(|&(dr, dc)| grid.cell_at(r + dr, col + dc))
            .map(Loc::cell)
            .filter(|&l| grid.is_free(l))
            .collect();
        let stay = match role {
            Role::Sensor => rules.sensor_stay,
            Role::Target => rules.target_stay,
        };
        if stay {
            out.push(loc);
        }
        out.sort();
        out
    }

    /// `vis_i(l_i, l_t)`.
    pub fn visible_to(&self, sensor: usize, from: Loc, target: Loc) -> bool {
        match (from.index(), target.index()) {
            (Some(f), Some(_)) => self.visibility[sensor][f].contains(target),
            _ => false,
        }
    }

    /// Cells visible to sensor `i` standing at `from`.
    pub fn visible_cells(&self, sensor: usize, from: Loc) -> &LocSet {
        &self.visibility[sensor][from.index().expect("sensor on a cell")]
    }

    pub fn joint_visible(&self, s: &FullState) -> bool {
        self.visible(&s.sensor_locs, s.target_loc)
    }

    /// `succ_t` over a set: all target successors of `belief` given the
    /// current sensor positions.
    pub fn succ_t(&self, sensors: &[Loc], belief: &LocSet) -> LocSet {
        self.target_successors(sensors, belief)
    }

    /// Joint sensor successors when the target moves to `to` (`None` when the
    /// destination is unknown to the sensors). Depends on `to` only through
    /// its visibility.
    pub fn succ_s(&self, sensors: &[Loc], to: Option<Loc>) -> Vec<Vec<Loc>> {
        let block = self.blocks();
        let options: Vec<Vec<Loc>> = sensors
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                self.neighbors(l, Role::Sensor)
                    .into_iter()
                    .filter(|&n| {
                        !(block && Some(n) == to && self.visible_to(i, l, n))
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(sensors.len());
        cartesian(&options, &mut cur, &mut out, block);
        out
    }
}

fn cartesian(options: &[Vec<Loc>], cur: &mut Vec<Loc>, out: &mut Vec<Vec<Loc>>, distinct: bool) {
    if cur.len() == options.len() {
        out.push(cur.clone());
        return;
    }
    for &l in &options[cur.len()] {
        if distinct && cur.contains(&l) {
            continue;
        }
        cur.push(l);
        cartesian(options, cur, out, distinct);
        cur.pop();
    }
}

impl GameStructure for SurveillanceWorld {
    fn sensor_count(&self) -> usize {
        self.parts.sensors.len()
    }

    fn cell_count(&self) -> usize {
        self.parts.grid.cell_count()
    }

    fn initial_sensors(&self) -> Vec<Loc> {
        self.parts.sensors.iter().map(|s| s.init).collect()
    }

    fn initial_target(&self) -> Loc {
        self.parts.target_init
    }

    fn target_moves(&self, sensors: &[Loc], from: Loc) -> Vec<Loc> {
        let mut moves = self.neighbors(from, Role::Target);
        if self.blocks() {
            moves.retain(|l| !sensors.contains(l));
        }
        moves
    }

    fn sensor_moves(&self, sensors: &[Loc], from: Loc, to: Loc) -> Vec<Vec<Loc>> {
        if !self.target_moves(sensors, from).contains(&to) {
            return Vec::new();
        }
        self.succ_s(sensors, Some(to))
    }

    fn visible(&self, sensors: &[Loc], target: Loc) -> bool {
        sensors.iter().enumerate().any(|(i, &l)| self.visible_to(i, l, target))
    }

    fn triggered(&self, loc: Loc) -> TriggerSet {
        loc.index().map_or(TriggerSet::EMPTY, |c| self.triggers[c])
    }

    fn alarms(&self) -> TriggerSet {
        TriggerSet::from_bits(if self.alarm_cells.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.alarm_cells.len()) - 1
        })
    }

    fn alarm_id(&self, index: usize) -> &str {
        &self.parts.static_sensors[index].id
    }
}

fn visibility_table(grid: &GridMap, cfg: &VisibilityConfig) -> Vec<LocSet> {
    let cells = grid.cell_count();
    let mut table = vec![LocSet::new(); cells];
    for from in grid.free_cells() {
        let c = from.index().unwrap();
        let mut set = LocSet::with_cells(cells);
        set.insert(from);
        match cfg.kind {
            VisibilityKind::None => {}
            VisibilityKind::Full => set.extend(grid.free_cells()),
            VisibilityKind::LineOfSight => {
                let (r0, c0) = grid.coords(c as u32);
                let reach = cfg.range.floor() as i32;
                for r1 in (r0 - reach)..=(r0 + reach) {
                    for c1 in (c0 - reach)..=(c0 + reach) {
                        let Some(cell) = grid.cell_at(r1, c1) else { continue };
                        let to = Loc::cell(cell);
                        if grid.is_free(to) && line_of_sight(grid, (r0, c0), (r1, c1), cfg.range) {
                            set.insert(to);
                        }
                    }
                }
            }
        }
        table[c] = set;
    }
    table
}

/// Euclidean center distance within `range` and no obstacle on the
/// center-to-center segment.
pub fn line_of_sight(grid: &GridMap, from: (i32, i32), to: (i32, i32), range: f64) -> bool {
    let (dr, dc) = ((to.0 - from.0) as f64, (to.1 - from.1) as f64);
    if dr * dr + dc * dc > range * range {
        return false;
    }
    supercover(from, to)
        .into_iter()
        .all(|(r, c)| grid.cell_at(r, c).is_some_and(|cell| !grid.obstacles.contains(&cell)))
}

/// Every cell whose closed square meets the segment between the centers of
/// `from` and `to` (row, col), endpoints included, in traversal order.
pub fn supercover(from: (i32, i32), to: (i32, i32)) -> Vec<(i32, i32)> {
    let (dy, dx) = (to.0 - from.0, to.1 - from.1);
    let (ny, nx) = (dy.abs(), dx.abs());
    let (sy, sx) = (dy.signum(), dx.signum());
    let (mut y, mut x) = from;
    let mut out = vec![from];
    let (mut iy, mut ix) = (0, 0);
    while ix < nx || iy < ny {
        // compare the parameter of the next vertical vs horizontal crossing
        let decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx;
        if decision == 0 {
            // through a corner: both side cells are touched
            out.push((y, x + sx));
            out.push((y + sy, x));
            x += sx;
            y += sy;
            ix += 1;
            iy += 1;
        } else if decision < 0 {
            x += sx;
            ix += 1;
        } else {
            y += sy;
            iy += 1;
        }
        out.push((y, x));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn open_grid(w: u32, h: u32, obstacles: &[u32]) -> GridMap {
        GridMap { width: w, height: h, obstacles: obstacles.iter().copied().collect() }
    }

    #[test]
    fn fig3_neighbors() {
        let w = fixtures::fig3world();
        assert_eq!(w.neighbors(Loc::cell(14), Role::Target), vec![Loc::cell(9), Loc::cell(19)]);
        assert_eq!(w.neighbors(Loc::cell(20), Role::Sensor), vec![Loc::cell(15), Loc::cell(21)]);
    }

    #[test]
    fn stay_flag_adds_self() {
        let mut parts = fixtures::fig3world().parts().clone();
        parts.move_rules.sensor_stay = true;
        let w = SurveillanceWorld::new(parts).unwrap();
        assert!(w.neighbors(Loc::cell(0), Role::Sensor).contains(&Loc::cell(0)));
        assert!(!w.neighbors(Loc::cell(0), Role::Target).contains(&Loc::cell(0)));
    }

    #[test]
    fn los_examples() {
        let open = open_grid(5, 5, &[]);
        assert!(line_of_sight(&open, open.coords(20), open.coords(10), 2.0));
        let blocked = open_grid(5, 5, &[11]);
        assert!(!line_of_sight(&blocked, blocked.coords(10), blocked.coords(12), 2.0));
        // out of range
        assert!(!line_of_sight(&open, open.coords(20), open.coords(5), 2.0));
    }

    #[test]
    fn own_cell_always_visible() {
        let w = fixtures::fig3world();
        for l in w.free_cells() {
            assert!(w.visible_to(0, l, l));
            assert!(w.visible_to(1, l, l));
        }
    }

    #[test]
    fn fig3_succ_t() {
        let w = fixtures::fig3world();
        let s = w.initial_sensors();
        let b = LocSet::singleton(Loc::cell(14));
        assert_eq!(w.succ_t(&s, &b).to_raw(), vec![9, 19]);
    }

    #[test]
    fn example1_succ_t() {
        let w = fixtures::example1world();
        let s = w.initial_sensors();
        let b = LocSet::singleton(Loc::cell(18));
        assert_eq!(w.succ_t(&s, &b).to_raw(), vec![17, 19, 23]);
    }

    #[test]
    fn succ_t_of_everything_is_everything() {
        let w = fixtures::fig3world();
        let all = w.free_set();
        // sensors out of the way of nothing: collision removes their own cells
        let got = w.succ_t(&w.initial_sensors(), &all);
        let mut expected = all.clone();
        for s in w.initial_sensors() {
            expected.remove(s);
        }
        assert_eq!(got, expected);
        let mut parts = w.parts().clone();
        parts.move_rules.collision_mode = CollisionMode::None;
        let w = SurveillanceWorld::new(parts).unwrap();
        assert_eq!(w.succ_t(&w.initial_sensors(), &all), all);
    }

    #[test]
    fn fig3_succ_s() {
        let w = fixtures::fig3world();
        // sensor 2 at 4 sees 9, so it may not move there when the target does
        let sub = w.succ_s(&[Loc::cell(20), Loc::cell(4)], Some(Loc::cell(9)));
        assert!(sub.iter().all(|m| m[1] == Loc::cell(3)));
        let free = w.succ_s(&[Loc::cell(20), Loc::cell(4)], None);
        let mut second: Vec<Loc> = free.iter().map(|m| m[1]).collect();
        second.sort();
        second.dedup();
        assert_eq!(second, vec![Loc::cell(3), Loc::cell(9)]);
        let first: BTreeSet<Loc> = free.iter().map(|m| m[0]).collect();
        assert_eq!(first.into_iter().collect::<Vec<_>>(), vec![Loc::cell(15), Loc::cell(21)]);
    }

    #[test]
    fn visibility_none_never_sees_others() {
        let mut parts = fixtures::fig3world().parts().clone();
        for s in &mut parts.sensors {
            s.visibility = VisibilityConfig { kind: VisibilityKind::None, range: 0.0 };
        }
        let w = SurveillanceWorld::new(parts).unwrap();
        let sensors = w.initial_sensors();
        for t in w.free_cells() {
            if !sensors.contains(&t) {
                assert!(!w.joint_visible(&FullState { sensor_locs: sensors.clone(), target_loc: t }));
            }
        }
    }

    #[test]
    fn supercover_corner_case() {
        // diagonal through corners touches both side cells
        let cells = supercover((0, 0), (1, 1));
        assert_eq!(cells, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let straight = supercover((2, 0), (2, 3));
        assert_eq!(straight, vec![(2, 0), (2, 1), (2, 2), (2, 3)]);
    }

    /// Independent oracle: a cell is crossed iff the segment meets its closed
    /// unit square (exact arithmetic on doubled coordinates).
    fn crosses_square(from: (i32, i32), to: (i32, i32), cell: (i32, i32)) -> bool {
        // coordinates doubled so centers are odd integers and edges even
        let (y0, x0) = (2 * from.0 + 1, 2 * from.1 + 1);
        let (y1, x1) = (2 * to.0 + 1, 2 * to.1 + 1);
        let (lo_y, hi_y) = (2 * cell.0, 2 * cell.0 + 2);
        let (lo_x, hi_x) = (2 * cell.1, 2 * cell.1 + 2);
        // parametric clipping with rational t = num/den, kept as (num, den>0)
        let mut t_lo = (0i64, 1i64);
        let mut t_hi = (1i64, 1i64);
        let le = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 <= b.0 * a.1;
        for (p0, d, lo, hi) in [
            (y0 as i64, (y1 - y0) as i64, lo_y as i64, hi_y as i64),
            (x0 as i64, (x1 - x0) as i64, lo_x as i64, hi_x as i64),
        ] {
            if d == 0 {
                if p0 < lo || p0 > hi {
                    return false;
                }
                continue;
            }
            let (mut a, mut b) = ((lo - p0, d), (hi - p0, d));
            if d < 0 {
                a = (-a.0, -a.1);
                b = (-b.0, -b.1);
                std::mem::swap(&mut a, &mut b);
            }
            if le(t_lo, a) {
                t_lo = a;
            }
            if le(b, t_hi) {
                t_hi = b;
            }
        }
        le(t_lo, t_hi)
    }

    proptest::proptest! {
        #[test]
        fn supercover_matches_square_oracle(r0 in 0i32..9, c0 in 0i32..9, r1 in 0i32..9, c1 in 0i32..9) {
            let got: BTreeSet<(i32, i32)> = supercover((r0, c0), (r1, c1)).into_iter().collect();
            let mut expected = BTreeSet::new();
            for r in r0.min(r1)..=r0.max(r1) {
                for c in c0.min(c1)..=c0.max(c1) {
                    if crosses_square((r0, c0), (r1, c1), (r, c)) {
                        expected.insert((r, c));
                    }
                }
            }
            proptest::prop_assert_eq!(got, expected);
        }
    }
}
