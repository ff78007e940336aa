//! Recursive max-parity solving with positional strategies.

use super::arena::{Arena, NodeSet, Owner};
use super::attractor::attractor_with_strategy;

/// Winner of every node plus a positional witness strategy: for each node,
/// a successor that keeps its owner winning when the owner wins there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningRegions {
    pub winner: Vec<Owner>,
    pub strategy: Vec<Option<usize>>,
}

impl WinningRegions {
    pub fn region(&self, player: Owner) -> NodeSet {
        let mut s = NodeSet::with_capacity(self.winner.len());
        for (v, &w) in self.winner.iter().enumerate() {
            if w == player {
                s.insert(v);
            }
        }
        s
    }

    pub fn protagonist(&self) -> NodeSet {
        self.region(Owner::Protagonist)
    }

    pub fn antagonist(&self) -> NodeSet {
        self.region(Owner::Antagonist)
    }

    pub fn protagonist_wins(&self, v: usize) -> bool {
        self.winner[v] == Owner::Protagonist
    }
}

/// Solves the whole arena.
pub fn zielonka(arena: &Arena) -> WinningRegions {
    zielonka_within(arena, &arena.all_nodes())
}

/// Solves the subarena induced by `within`, which must be a trap for neither
/// player to fall out of (every node keeps a successor inside, antagonist
/// nodes keep all). Nodes outside are reported as antagonist wins.
pub fn zielonka_within(arena: &Arena, within: &NodeSet) -> WinningRegions {
    let n = arena.len();
    let mut strategy = vec![None; n];
    let [w0, _] = solve(arena, within.clone(), &mut strategy);
    let winner = (0..n)
        .map(|v| if w0.contains(v) { Owner::Protagonist } else { Owner::Antagonist })
        .collect();
    for v in 0..n {
        let owner_wins = if w0.contains(v) {
            arena.owner(v) == Owner::Protagonist
        } else {
            arena.owner(v) == Owner::Antagonist && within.contains(v)
        };
        if !owner_wins {
            strategy[v] = None;
        }
    }
    WinningRegions { winner, strategy }
}

fn solve(arena: &Arena, mut game: NodeSet, strategy: &mut [Option<usize>]) -> [NodeSet; 2] {
    // regions decided so far, indexed by winner
    let mut decided = [arena.empty_set(), arena.empty_set()];
    loop {
        let Some(d) = game.ones().map(|v| arena.priority(v)).max() else {
            return decided;
        };
        let p = Owner::of_priority(d);
        let mut top = arena.empty_set();
        for v in game.ones() {
            if arena.priority(v) == d {
                top.insert(v);
            }
        }
        let (a, a_strat) = attractor_with_strategy(arena, p, &top, &game);
        let mut rest = game.clone();
        rest.difference_with(&a);
        let sub = solve(arena, rest, strategy);
        let opp = &sub[p.opponent().index()];
        if opp.is_clear() {
            // p wins everything left; the subgame strategies stay in place
            for (v, w) in a_strat {
                strategy[v] = Some(w);
            }
            for v in top.ones() {
                if arena.owner(v) == p {
                    strategy[v] = arena.successors(v).iter().copied().find(|&w| game.contains(w));
                }
            }
            decided[p.index()].union_with(&game);
            return decided;
        }
        let (b, b_strat) = attractor_with_strategy(arena, p.opponent(), opp, &game);
        for (v, w) in b_strat {
            strategy[v] = Some(w);
        }
        decided[p.opponent().index()].union_with(&b);
        game.difference_with(&b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_examples() {
        let a = Arena::parse("node 0 protagonist 0; 0").unwrap();
        let r = zielonka(&a);
        assert!(r.protagonist_wins(0));
        assert_eq!(r.strategy[0], Some(0));
        let a = Arena::parse("node 0 antagonist 1; 0").unwrap();
        assert!(!zielonka(&a).protagonist_wins(0));
    }

    #[test]
    fn later_iterations_switch_player() {
        // removing the antagonist's attractor leaves a game whose top
        // priority belongs to the protagonist
        let a = Arena::parse(
            "node 0 a 0; 0 2\nnode 1 p 0; 3 5\nnode 2 p 1; 0 1 5\nnode 3 p 0; 1 3\nnode 4 p 0; 2\nnode 5 a 0; 2 4",
        )
        .unwrap();
        let r = zielonka(&a);
        assert!((0..6).all(|v| r.protagonist_wins(v)), "{:?}", r.winner);
        let s = crate::solver::extract_strategy(&a, &r);
        crate::solver::check_by_unrolling(&a, &r.winner, &s).unwrap();
    }

    #[test]
    fn protagonist_chooses_even_cycle() {
        let a = Arena::parse("node 0 p 0; 1 2\nnode 1 a 1; 0\nnode 2 a 2; 0").unwrap();
        let r = zielonka(&a);
        assert!(r.protagonist_wins(0));
        assert_eq!(r.strategy[0], Some(2));
    }

    #[test]
    fn antagonist_escapes_to_odd_cycle() {
        let a = Arena::parse("node 0 a 0; 1 2\nnode 1 p 2; 0\nnode 2 p 1; 2").unwrap();
        let r = zielonka(&a);
        assert_eq!(r.winner, vec![Owner::Antagonist, Owner::Antagonist, Owner::Antagonist]);
        assert_eq!(r.strategy[0], Some(2));
    }

    #[test]
    fn restricted_game_marks_outside_as_lost() {
        let a = Arena::parse("node 0 p 0; 0 1\nnode 1 a 0; 1").unwrap();
        let mut within = a.empty_set();
        within.insert(0);
        let r = zielonka_within(&a, &within);
        assert!(r.protagonist_wins(0));
        assert!(!r.protagonist_wins(1));
        assert_eq!(r.strategy[0], Some(0));
    }
}
