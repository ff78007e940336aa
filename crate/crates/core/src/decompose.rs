//! Partitioning of the location space into per-sensor regions, subgame
//! construction with the auxiliary `OUTSIDE` location, and the projection and
//! recombination of beliefs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::belief::BeliefState;
use crate::game::GameStructure;
use crate::loc::{Loc, LocSet, TriggerSet};
use crate::specs::{local_spec, LocalSpec};
use crate::world::{CollisionMode, Role, SurveillanceWorld};

/// Regions `L̃_1..L̃_n`, region `i` assigned to mobile sensor `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub regions: Vec<LocSet>,
}

impl Partition {
    pub fn new(regions: Vec<LocSet>) -> Self {
        Partition { regions }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn region(&self, i: usize) -> &LocSet {
        &self.regions[i]
    }

    pub fn region_of(&self, l: Loc) -> Option<usize> {
        self.regions.iter().position(|r| r.contains(l))
    }

    /// Union of all regions.
    pub fn all(&self) -> LocSet {
        let mut out = LocSet::new();
        for r in &self.regions {
            out.union_with(r);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    RegionCount { sensors: usize, regions: usize },
    EmptyRegion { region: usize },
    NotFree { region: usize, cells: Vec<i32> },
    Overlap { regions: (usize, usize), cells: Vec<i32> },
    Uncovered { cells: Vec<i32> },
    SensorOutside { sensor: usize, cell: i32 },
    AlarmSpans { alarm: String, regions: Vec<usize> },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::RegionCount { sensors, regions } => {
                write!(f, "count: {regions} regions for {sensors} mobile sensors")
            }
            PartitionViolation::EmptyRegion { region } => write!(f, "non-empty: region {} is empty", region + 1),
            PartitionViolation::NotFree { region, cells } => {
                write!(f, "free cells: region {} contains non-free cells {cells:?}", region + 1)
            }
            PartitionViolation::Overlap { regions, cells } => write!(
                f,
                "disjointness: regions {} and {} share cells {cells:?}",
                regions.0 + 1,
                regions.1 + 1
            ),
            PartitionViolation::Uncovered { cells } => write!(f, "coverage: cells {cells:?} are in no region"),
            PartitionViolation::SensorOutside { sensor, cell } => write!(
                f,
                "sensor placement: sensor {} starts at {cell}, outside region {}",
                sensor + 1,
                sensor + 1
            ),
            PartitionViolation::AlarmSpans { alarm, regions } => write!(
                f,
                "alarm containment: static sensor `{alarm}` spans regions {:?}",
                regions.iter().map(|r| r + 1).collect::<Vec<_>>()
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("invalid partition: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidPartition(Vec<PartitionViolation>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("projection undefined: sensor {} at {cell} is outside its region", .sensor + 1)]
pub struct ProjectionUndefined {
    pub sensor: usize,
    pub cell: i32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("local beliefs are inconsistent: their global interpretations do not intersect")]
pub struct EmptyRecombination;

/// Checks every partition invariant, reporting all violations at once.
pub fn validate_partition(world: &SurveillanceWorld) -> Result<(), PartitionError> {
    let p = world.partition();
    let mut v = Vec::new();
    let n = world.sensors().len();
    if p.len() != n {
        v.push(PartitionViolation::RegionCount { sensors: n, regions: p.len() });
    }
    let free = world.free_set();
    for (i, r) in p.regions.iter().enumerate() {
        if r.is_empty() {
            v.push(PartitionViolation::EmptyRegion { region: i });
        }
        let mut bad = r.clone();
        bad.difference_with(&free);
        if !bad.is_empty() {
            v.push(PartitionViolation::NotFree { region: i, cells: bad.to_raw() });
        }
        for (j, q) in p.regions.iter().enumerate().skip(i + 1) {
            let mut shared = r.clone();
            shared.intersect_with(q);
            if !shared.is_empty() {
                v.push(PartitionViolation::Overlap { regions: (i, j), cells: shared.to_raw() });
            }
        }
    }
    let mut uncovered = free.clone();
    uncovered.difference_with(&p.all());
    if !uncovered.is_empty() {
        v.push(PartitionViolation::Uncovered { cells: uncovered.to_raw() });
    }
    for (i, s) in world.sensors().iter().enumerate() {
        if p.regions.get(i).is_some_and(|r| !r.contains(s.init)) {
            v.push(PartitionViolation::SensorOutside { sensor: i, cell: s.init.raw() });
        }
    }
    for a in world.static_sensors() {
        let regions: BTreeSet<usize> =
            a.cells.iter().filter_map(|&c| p.region_of(Loc::cell(c))).collect();
        if regions.len() > 1 {
            v.push(PartitionViolation::AlarmSpans { alarm: a.id.clone(), regions: regions.into_iter().collect() });
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(PartitionError::InvalidPartition(v))
    }
}

/// Static sensors operating in region `i` (`Q_i`).
pub fn region_alarms(world: &SurveillanceWorld, i: usize) -> TriggerSet {
    let region = world.partition().region(i);
    let mut q = TriggerSet::EMPTY;
    for (j, a) in world.static_sensors().iter().enumerate() {
        if a.cells.iter().all(|&c| region.contains(Loc::cell(c))) {
            q.insert(j);
        }
    }
    q
}

/// Target successors of `t` admitted for some placement of the other sensors
/// when sensor `i` is at `l`.
fn projected_target_moves(world: &SurveillanceWorld, l: Loc, t: Loc) -> Vec<Loc> {
    let mut moves = world.neighbors(t, Role::Target);
    if world.move_rules().collision_mode == CollisionMode::BlockVisibleTarget {
        moves.retain(|&m| m != l);
    }
    moves
}

/// Moves of sensor `i` from `l` when the target moves to `to`.
fn projected_sensor_moves(world: &SurveillanceWorld, i: usize, l: Loc, to: Loc) -> Vec<Loc> {
    let mut moves = world.neighbors(l, Role::Sensor);
    if world.move_rules().collision_mode == CollisionMode::BlockVisibleTarget {
        moves.retain(|&m| !(m == to && world.visible_to(i, l, to)));
    }
    moves
}

/// `T↓i` successors of `(l_i, l_t)`, as `(l_i', l_t')` pairs, ascending.
pub fn projected_successors(world: &SurveillanceWorld, i: usize, l: Loc, t: Loc) -> Vec<(Loc, Loc)> {
    let mut out = Vec::new();
    for to in projected_target_moves(world, l, t) {
        for m in projected_sensor_moves(world, i, l, to) {
            out.push((m, to));
        }
    }
    out.sort();
    out
}

/// `T↓i` over all pairs of free cells.
pub fn project_transitions(world: &SurveillanceWorld, i: usize) -> Vec<((Loc, Loc), (Loc, Loc))> {
    let free: Vec<Loc> = world.free_cells().collect();
    let mut out = Vec::new();
    for &l in &free {
        for &t in &free {
            for succ in projected_successors(world, i, l, t) {
                out.push(((l, t), succ));
            }
        }
    }
    out
}

/// Single-sensor game `G^i` over region `i` plus `OUTSIDE`.
#[derive(Debug, Clone)]
pub struct Subgame {
    pub index: usize,
    pub region: LocSet,
    pub alarms: TriggerSet,
    pub spec: LocalSpec,
    sensor_init: Loc,
    target_init: Loc,
    cells: usize,
    /// position of each cell within `region`
    slot: Vec<Option<usize>>,
    /// `visible[slot(l)]`: region cells visible from `l`
    visible: Vec<LocSet>,
    triggers: Vec<TriggerSet>,
    alarm_ids: Vec<String>,
    /// `trans[slot(l) * (m + 1) + tslot(t)]`, with `OUTSIDE` at tslot `m`;
    /// entries `(l', t')` ascending
    trans: Vec<Vec<(Loc, Loc)>>,
}

impl Subgame {
    fn tslot(&self, t: Loc) -> Option<usize> {
        if t.is_outside() {
            Some(self.region.len())
        } else {
            self.slot.get(t.index()?).copied().flatten()
        }
    }

    fn transitions(&self, l: Loc, t: Loc) -> &[(Loc, Loc)] {
        let m = self.region.len();
        match (l.index().and_then(|c| self.slot.get(c).copied().flatten()), self.tslot(t)) {
            (Some(ls), Some(ts)) => &self.trans[ls * (m + 1) + ts],
            _ => &[],
        }
    }

    /// `T̃_i` successors of `(l, t)`.
    pub fn successors(&self, l: Loc, t: Loc) -> &[(Loc, Loc)] {
        self.transitions(l, t)
    }

    pub fn sensor_init(&self) -> Loc {
        self.sensor_init
    }

    pub fn target_init(&self) -> Loc {
        self.target_init
    }

    pub fn contains(&self, l: Loc) -> bool {
        self.region.contains(l)
    }

    /// Local target location for a true target location.
    pub fn localize(&self, t: Loc) -> Loc {
        if self.region.contains(t) {
            t
        } else {
            Loc::OUTSIDE
        }
    }

    pub fn visible_from(&self, l: Loc) -> Option<&LocSet> {
        l.index().and_then(|c| self.slot.get(c).copied().flatten()).map(|s| &self.visible[s])
    }

    /// Whether the sensor's move graph restricted to the region is connected.
    pub fn region_connected(&self, world: &SurveillanceWorld) -> bool {
        let Some(start) = self.region.iter().next() else { return true };
        let mut seen = LocSet::singleton(start);
        let mut queue = VecDeque::from([start]);
        while let Some(l) = queue.pop_front() {
            for n in world.neighbors(l, Role::Sensor) {
                if self.region.contains(n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == self.region.len()
    }
}

impl GameStructure for Subgame {
    fn sensor_count(&self) -> usize {
        1
    }

    fn cell_count(&self) -> usize {
        self.cells
    }

    fn initial_sensors(&self) -> Vec<Loc> {
        vec![self.sensor_init]
    }

    fn initial_target(&self) -> Loc {
        self.target_init
    }

    fn target_moves(&self, sensors: &[Loc], from: Loc) -> Vec<Loc> {
        let mut out: Vec<Loc> = self.transitions(sensors[0], from).iter().map(|&(_, t)| t).collect();
        out.sort();
        out.dedup();
        out
    }

    fn sensor_moves(&self, sensors: &[Loc], from: Loc, to: Loc) -> Vec<Vec<Loc>> {
        self.transitions(sensors[0], from)
            .iter()
            .filter(|&&(_, t)| t == to)
            .map(|&(l, _)| vec![l])
            .collect()
    }

    fn visible(&self, sensors: &[Loc], target: Loc) -> bool {
        !target.is_outside() && self.visible_from(sensors[0]).is_some_and(|v| v.contains(target))
    }

    fn triggered(&self, loc: Loc) -> TriggerSet {
        match loc.index() {
            Some(c) if self.region.contains(loc) => self.triggers[c].intersect(self.alarms),
            _ => TriggerSet::EMPTY,
        }
    }

    fn alarms(&self) -> TriggerSet {
        self.alarms
    }

    fn alarm_id(&self, index: usize) -> &str {
        &self.alarm_ids[index]
    }
}

/// Builds `G^i` (0-based `i`) with the world objective translated locally.
pub fn build_subgame(world: &SurveillanceWorld, i: usize) -> Result<Subgame, PartitionError> {
    validate_partition(world)?;
    let n = world.partition().len();
    let region = world.partition().region(i).clone();
    let cells = world.grid().cell_count();
    let members: Vec<Loc> = region.iter().collect();
    let mut slot = vec![None; cells];
    for (k, l) in members.iter().enumerate() {
        slot[l.index().unwrap()] = Some(k);
    }
    let outside: Vec<Loc> = world.free_cells().filter(|l| !region.contains(*l)).collect();
    // cells entered from outside, and whether the target can stay outside
    let mut entry = LocSet::new();
    let mut loops_outside = false;
    for &t in &outside {
        for m in world.neighbors(t, Role::Target) {
            if region.contains(m) {
                entry.insert(m);
            } else {
                loops_outside = true;
            }
        }
    }
    let in_region = |l: &Loc| region.contains(*l);
    let m = members.len();
    let mut trans = Vec::with_capacity(m * (m + 1));
    for &l in &members {
        let region_moves: Vec<Loc> = world.neighbors(l, Role::Sensor).into_iter().filter(in_region).collect();
        // a sensor with no move inside its region stays where it is
        let responses = |to: Loc| -> Vec<Loc> {
            let moves: Vec<Loc> = projected_sensor_moves(world, i, l, to).into_iter().filter(in_region).collect();
            if moves.is_empty() {
                vec![l]
            } else {
                moves
            }
        };
        for t in members.iter().copied().chain([Loc::OUTSIDE]) {
            let mut out = Vec::new();
            if !t.is_outside() {
                for to in projected_target_moves(world, l, t) {
                    let local_to = if region.contains(to) { to } else { Loc::OUTSIDE };
                    for s in responses(to) {
                        out.push((s, local_to));
                    }
                }
            } else {
                for to in entry.iter() {
                    if world.move_rules().collision_mode == CollisionMode::BlockVisibleTarget && to == l {
                        continue;
                    }
                    for s in responses(to) {
                        out.push((s, to));
                    }
                }
                if loops_outside {
                    if region_moves.is_empty() {
                        out.push((l, Loc::OUTSIDE));
                    }
                    out.extend(region_moves.iter().map(|&s| (s, Loc::OUTSIDE)));
                }
            }
            out.sort();
            out.dedup();
            trans.push(out);
        }
    }
    let visible = members
        .iter()
        .map(|&l| {
            let mut v = world.visible_cells(i, l).clone();
            v.intersect_with(&region);
            v
        })
        .collect();
    let triggers = (0..cells).map(|c| world.triggered(Loc::cell(c as u32))).collect();
    let sub = Subgame {
        index: i,
        alarms: region_alarms(world, i),
        spec: local_spec(world.objective(), n, i),
        sensor_init: world.sensors()[i].init,
        target_init: if region.contains(world.target_init()) { world.target_init() } else { Loc::OUTSIDE },
        cells,
        slot,
        visible,
        triggers,
        alarm_ids: world.static_sensors().iter().map(|a| a.id.clone()).collect(),
        trans,
        region,
    };
    if !sub.region_connected(world) {
        log::warn!("region {} is not connected for sensor moves; its subgame may be unrealizable", i + 1);
    }
    Ok(sub)
}

/// `⟦B⟧` for a local belief of subgame `i`.
pub fn global_interpretation(partition: &Partition, i: usize, local: &LocSet) -> LocSet {
    let mut out = local.clone();
    if out.contains(Loc::OUTSIDE) {
        out.remove(Loc::OUTSIDE);
        let mut rest = partition.all();
        rest.difference_with(partition.region(i));
        out.union_with(&rest);
    }
    out
}

/// `B↓i`.
pub fn project_belief(partition: &Partition, i: usize, belief: &LocSet) -> LocSet {
    let region = partition.region(i);
    if belief.is_subset(region) {
        return belief.clone();
    }
    let mut out = belief.clone();
    out.intersect_with(region);
    out.insert(Loc::OUTSIDE);
    out
}

/// `((l_1..l_n), B, J)↓i = (l_i, B↓i, J ∩ Q_i)`.
pub fn project_full_state(
    world: &SurveillanceWorld,
    i: usize,
    state: &BeliefState,
) -> Result<BeliefState, ProjectionUndefined> {
    let p = world.partition();
    let l = state.sensors[i];
    if !p.region(i).contains(l) {
        return Err(ProjectionUndefined { sensor: i, cell: l.raw() });
    }
    Ok(BeliefState {
        sensors: vec![l],
        belief: project_belief(p, i, &state.belief),
        triggers: state.triggers.intersect(region_alarms(world, i)),
    })
}

/// `⋂_i ⟦B_i⟧`.
pub fn recombine_beliefs(partition: &Partition, locals: &[LocSet]) -> Result<LocSet, EmptyRecombination> {
    let mut out = partition.all();
    for (i, b) in locals.iter().enumerate() {
        out.intersect_with(&global_interpretation(partition, i, b));
    }
    if out.is_empty() {
        Err(EmptyRecombination)
    } else {
        Ok(out)
    }
}
