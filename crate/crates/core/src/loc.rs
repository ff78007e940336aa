//! Locations, location sets and triggered-alarm sets.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

/// A grid cell id (row-major from the top-left) or the auxiliary `OUTSIDE`
/// location of a subgame, encoded as `-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Loc(i32);

impl Loc {
    /// Auxiliary location summarizing every cell outside a subgame's region.
    pub const OUTSIDE: Loc = Loc(-1);

    pub const fn cell(index: u32) -> Loc {
        Loc(index as i32)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    pub fn from_raw(raw: i32) -> Option<Loc> {
        (raw >= -1).then_some(Loc(raw))
    }

    pub fn is_outside(self) -> bool {
        self.0 < 0
    }

    /// Cell index, `None` for `OUTSIDE`.
    pub fn index(self) -> Option<usize> {
        (self.0 >= 0).then_some(self.0 as usize)
    }

    fn bit(self) -> usize {
        (self.0 + 1) as usize
    }
}

impl fmt::Debug for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_outside() {
            f.write_str("OUTSIDE")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Loc {
    fn from(v: u32) -> Self {
        Loc::cell(v)
    }
}

/// A set of locations, possibly containing `OUTSIDE`.
///
/// Backed by a bitset where bit 0 is `OUTSIDE` and bit `c + 1` is cell `c`, so
/// iteration yields locations in canonical ascending order with `OUTSIDE`
/// first. Equality and hashing ignore capacity; ordering is lexicographic over
/// the ascending element sequence.
#[derive(Clone, Default)]
pub struct LocSet {
    bits: FixedBitSet,
}

impl LocSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty set able to hold cells `0..cells` without reallocating.
    pub fn with_cells(cells: usize) -> Self {
        LocSet { bits: FixedBitSet::with_capacity(cells + 1) }
    }

    pub fn singleton(loc: Loc) -> Self {
        let mut s = LocSet::new();
        s.insert(loc);
        s
    }

    pub fn insert(&mut self, loc: Loc) -> bool {
        let bit = loc.bit();
        self.bits.grow(bit + 1);
        !self.bits.put(bit)
    }

    pub fn remove(&mut self, loc: Loc) {
        let bit = loc.bit();
        if bit < self.bits.len() {
            self.bits.set(bit, false);
        }
    }

    pub fn contains(&self, loc: Loc) -> bool {
        self.bits.contains(loc.bit())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Loc> + '_ {
        self.bits.ones().map(|b| Loc(b as i32 - 1))
    }

    /// The single element, if the set is a singleton.
    pub fn as_singleton(&self) -> Option<Loc> {
        let mut it = self.iter();
        match (it.next(), it.next()) {
            (Some(l), None) => Some(l),
            _ => None,
        }
    }

    pub fn is_subset(&self, other: &LocSet) -> bool {
        self.iter().all(|l| other.contains(l))
    }

    pub fn union_with(&mut self, other: &LocSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &LocSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &LocSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn to_vec(&self) -> Vec<Loc> {
        self.iter().collect()
    }

    pub fn to_raw(&self) -> Vec<i32> {
        self.iter().map(Loc::raw).collect()
    }

    fn trimmed(&self) -> &[usize] {
        let blocks = self.bits.as_slice();
        let end = blocks.iter().rposition(|&b| b != 0).map_or(0, |p| p + 1);
        &blocks[..end]
    }
}

impl PartialEq for LocSet {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for LocSet {}

impl Hash for LocSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.trimmed().hash(state);
    }
}

impl Ord for LocSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for LocSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LocSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Loc> for LocSet {
    fn from_iter<I: IntoIterator<Item = Loc>>(iter: I) -> Self {
        let mut s = LocSet::new();
        for l in iter {
            s.insert(l);
        }
        s
    }
}

impl Extend<Loc> for LocSet {
    fn extend<I: IntoIterator<Item = Loc>>(&mut self, iter: I) {
        for l in iter {
            self.insert(l);
        }
    }
}

impl Serialize for LocSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for LocSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Loc>::deserialize(d)?;
        Ok(raw.into_iter().collect())
    }
}

/// Set of static-sensor indices (declaration order in the world), at most 64.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriggerSet(u64);

impl TriggerSet {
    pub const EMPTY: TriggerSet = TriggerSet(0);
    pub const CAPACITY: usize = 64;

    pub fn from_bits(bits: u64) -> Self {
        TriggerSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn single(index: usize) -> Self {
        TriggerSet(1 << index)
    }

    pub fn insert(&mut self, index: usize) {
        self.0 |= 1 << index;
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: TriggerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersect(self, other: TriggerSet) -> TriggerSet {
        TriggerSet(self.0 & other.0)
    }

    pub fn union(self, other: TriggerSet) -> TriggerSet {
        TriggerSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 & (1 << i) != 0)
    }

    /// All non-empty subsets.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = TriggerSet> {
        // standard submask enumeration, descending
        let full = self.0;
        let mut sub = full;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = sub;
            if sub == 0 {
                done = true;
                return None;
            }
            sub = (sub - 1) & full;
            Some(TriggerSet(cur))
        })
    }
}

impl fmt::Debug for TriggerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
