//! Target policies for simulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Composition, SimulationState};
use crate::loc::Loc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryPolicy {
    /// Moves come from the caller.
    Interactive,
    /// Uniform over the legal moves.
    Random,
    /// Maximizes the invisible count of the next monitored belief; ties go
    /// to the lowest cell.
    Greedy,
}

impl std::str::FromStr for AdversaryPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "interactive" => Ok(AdversaryPolicy::Interactive),
            "random" => Ok(AdversaryPolicy::Random),
            "greedy" => Ok(AdversaryPolicy::Greedy),
            other => Err(format!("unknown adversary `{other}` (expected interactive, random or greedy)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Adversary {
    policy: AdversaryPolicy,
    rng: ChaCha8Rng,
}

impl Adversary {
    pub fn new(policy: AdversaryPolicy, seed: u64) -> Self {
        Adversary { policy, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn policy(&self) -> AdversaryPolicy {
        self.policy
    }

    /// Next target move, or `None` for interactive play or a stuck target.
    pub fn choose(&mut self, comp: &Composition, sim: &SimulationState) -> Option<Loc> {
        match self.policy {
            AdversaryPolicy::Interactive => None,
            AdversaryPolicy::Random => {
                let legal = comp.legal_moves(sim);
                if legal.is_empty() {
                    return None;
                }
                Some(legal[self.rng.random_range(0..legal.len())])
            }
            AdversaryPolicy::Greedy => adversary_move(comp, sim),
        }
    }
}

/// The greedy target's move.
pub fn adversary_move(comp: &Composition, sim: &SimulationState) -> Option<Loc> {
    let mut best: Option<(usize, Loc)> = None;
    for to in comp.legal_moves(sim) {
        // moves the strategies cannot answer are ranked lowest
        let score = comp.step(sim, to).map_or(0, |next| next.predicates.invisible);
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, to));
        }
    }
    best.map(|(_, to)| to)
}
