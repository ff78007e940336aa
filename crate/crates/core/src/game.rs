//! The interface shared by the full multi-sensor world and its single-sensor
//! subgames: everything the belief construction needs to know about moves,
//! visibility and static sensors.

use crate::loc::{Loc, LocSet, TriggerSet};

pub trait GameStructure {
    fn sensor_count(&self) -> usize;

    /// Number of grid cells; every location set of this game fits in it.
    fn cell_count(&self) -> usize;

    fn initial_sensors(&self) -> Vec<Loc>;

    /// Initial target location (`OUTSIDE` in a subgame whose region does not
    /// contain the target).
    fn initial_target(&self) -> Loc;

    /// `succ_t(l_s, l_t)`: target successors of a single location, ascending.
    fn target_moves(&self, sensors: &[Loc], from: Loc) -> Vec<Loc>;

    /// `succ(l_s, l_t, l_t')`: joint sensor successors given the target moves
    /// from `from` to `to`. Empty when `from → to` is not a target move.
    fn sensor_moves(&self, sensors: &[Loc], from: Loc, to: Loc) -> Vec<Vec<Loc>>;

    /// Joint visibility `Vis(l_s, l_t)`.
    fn visible(&self, sensors: &[Loc], target: Loc) -> bool;

    /// `J(l)`: static sensors triggered by the target at `loc`.
    fn triggered(&self, loc: Loc) -> TriggerSet;

    /// Static sensors that exist in this game.
    fn alarms(&self) -> TriggerSet;

    fn alarm_id(&self, index: usize) -> &str;

    /// `succ_t` lifted to a set of target locations.
    fn target_successors(&self, sensors: &[Loc], belief: &LocSet) -> LocSet {
        let mut out = LocSet::with_cells(self.cell_count());
        for l in belief.iter() {
            out.extend(self.target_moves(sensors, l));
        }
        out
    }
}
