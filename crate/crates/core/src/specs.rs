//! Surveillance objectives, their local translations, and state predicates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::BeliefState;
use crate::game::GameStructure;
use crate::loc::Loc;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("objective needs at least one atom")]
    Empty,
    #[error("belief bound must be positive, got {0}")]
    ZeroBound(u32),
    #[error("safety-liveness objective requires a > b (got a={a}, b={b})")]
    NotNormal { a: u32, b: u32 },
}

/// A global surveillance objective in normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SurveillanceSpec {
    /// Always at most `b` invisible cells in the belief.
    Safety { b: u32 },
    /// Infinitely often at most `b` invisible cells.
    Liveness { b: u32 },
    /// Always at most `a`, infinitely often at most `b`, with `a > b`.
    SafetyLiveness { a: u32, b: u32 },
}

impl SurveillanceSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        match *self {
            SurveillanceSpec::Safety { b } | SurveillanceSpec::Liveness { b } => {
                if b == 0 {
                    return Err(SpecError::ZeroBound(b));
                }
            }
            SurveillanceSpec::SafetyLiveness { a, b } => {
                if a == 0 || b == 0 {
                    return Err(SpecError::ZeroBound(0));
                }
                if a <= b {
                    return Err(SpecError::NotNormal { a, b });
                }
            }
        }
        Ok(())
    }

    pub fn obligations(&self) -> Obligations {
        match *self {
            SurveillanceSpec::Safety { b } => Obligations { safety: Some(b), liveness: None },
            SurveillanceSpec::Liveness { b } => Obligations { safety: None, liveness: Some(b) },
            SurveillanceSpec::SafetyLiveness { a, b } => {
                Obligations { safety: Some(a), liveness: Some(b) }
            }
        }
    }
}

/// One conjunct of an unnormalized objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    /// `□ p_b`
    Always(u32),
    /// `□◇ p_b`
    InfinitelyOften(u32),
}

/// Collapses a conjunction of atoms into one of the three normal forms.
pub fn normalize(atoms: &[Atom]) -> Result<SurveillanceSpec, SpecError> {
    if atoms.is_empty() {
        return Err(SpecError::Empty);
    }
    let mut always: Option<u32> = None;
    let mut often: Option<u32> = None;
    for atom in atoms {
        let (slot, b) = match *atom {
            Atom::Always(b) => (&mut always, b),
            Atom::InfinitelyOften(b) => (&mut often, b),
        };
        if b == 0 {
            return Err(SpecError::ZeroBound(b));
        }
        *slot = Some(slot.map_or(b, |cur| cur.min(b)));
    }
    Ok(match (always, often) {
        (Some(a), None) => SurveillanceSpec::Safety { b: a },
        (None, Some(b)) => SurveillanceSpec::Liveness { b },
        (Some(a), Some(b)) if a <= b => SurveillanceSpec::Safety { b: a },
        (Some(a), Some(b)) => SurveillanceSpec::SafetyLiveness { a, b },
        (None, None) => unreachable!(),
    })
}

/// Local objective form for one subgame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LocalForm {
    /// `□ p_c`
    LocalSafety { c: u32 },
    /// `□◇(belief ≠ {OUTSIDE}) → □◇(p_b ∧ OUTSIDE ∉ belief)`
    LocalLiveness { b: u32 },
    /// Conjunction of the two above.
    LocalBoth { c: u32, b: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalSpec {
    /// 0-based subgame index.
    pub subgame: usize,
    pub form: LocalForm,
}

impl LocalSpec {
    pub fn obligations(&self) -> Obligations {
        match self.form {
            LocalForm::LocalSafety { c } => Obligations { safety: Some(c), liveness: None },
            LocalForm::LocalLiveness { b } => Obligations { safety: None, liveness: Some(b) },
            LocalForm::LocalBoth { c, b } => Obligations { safety: Some(c), liveness: Some(b) },
        }
    }
}

/// Bound of the local safety objective for a global bound `b` split over
/// `n ≥ 2` regions.
pub fn local_safety_bound(b: u32, n: usize) -> u32 {
    b / n as u32 + 1
}

/// Translates a global objective into the local objective of subgame `i`.
///
/// For a single region the objective is passed through unchanged.
pub fn local_spec(spec: SurveillanceSpec, n: usize, i: usize) -> LocalSpec {
    assert!(n >= 1, "at least one region");
    let bound = |b: u32| if n == 1 { b } else { local_safety_bound(b, n) };
    let form = match spec {
        SurveillanceSpec::Safety { b } => LocalForm::LocalSafety { c: bound(b) },
        SurveillanceSpec::Liveness { b } => LocalForm::LocalLiveness { b },
        SurveillanceSpec::SafetyLiveness { a, b } => LocalForm::LocalBoth { c: bound(a), b },
    };
    LocalSpec { subgame: i, form }
}

/// Bounds the solver has to enforce: a safety bound and/or a liveness bound.
///
/// Liveness is always read in its local implication form; on beliefs that
/// never contain `OUTSIDE` it degenerates to plain `□◇ p_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Obligations {
    pub safety: Option<u32>,
    pub liveness: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatePredicate {
    Bound(u32),
    NotOnlyOutside,
    OutsideAbsent,
}

/// Number of belief members not visible from the state's own sensor
/// positions. `OUTSIDE` always counts as invisible.
pub fn invisible_count<G: GameStructure + ?Sized>(game: &G, state: &BeliefState) -> usize {
    state
        .belief
        .iter()
        .filter(|&l| l.is_outside() || !game.visible(&state.sensors, l))
        .count()
}

pub fn eval_pb<G: GameStructure + ?Sized>(game: &G, state: &BeliefState, b: u32) -> bool {
    invisible_count(game, state) <= b as usize
}

pub fn eval_not_only_outside(state: &BeliefState) -> bool {
    state.belief.as_singleton() != Some(Loc::OUTSIDE)
}

pub fn eval_outside_absent(state: &BeliefState) -> bool {
    !state.belief.contains(Loc::OUTSIDE)
}

pub fn eval<G: GameStructure + ?Sized>(game: &G, state: &BeliefState, p: StatePredicate) -> bool {
    match p {
        StatePredicate::Bound(b) => eval_pb(game, state, b),
        StatePredicate::NotOnlyOutside => eval_not_only_outside(state),
        StatePredicate::OutsideAbsent => eval_outside_absent(state),
    }
}

/// Max-parity priority of a full belief state: 2 when the liveness
/// consequent holds, 1 when only the antecedent holds, 0 otherwise (and
/// always 0 without a liveness obligation). Intermediate nodes get 0.
pub fn priority_of<G: GameStructure + ?Sized>(
    game: &G,
    state: &BeliefState,
    obligations: &Obligations,
) -> u8 {
    let Some(b) = obligations.liveness else { return 0 };
    if eval_outside_absent(state) && eval_pb(game, state, b) {
        2
    } else if eval_not_only_outside(state) {
        1
    } else {
        0
    }
}

/// Whether a full belief state violates the safety obligation.
pub fn is_bad<G: GameStructure + ?Sized>(
    game: &G,
    state: &BeliefState,
    obligations: &Obligations,
) -> bool {
    obligations.safety.is_some_and(|c| !eval_pb(game, state, c))
}
