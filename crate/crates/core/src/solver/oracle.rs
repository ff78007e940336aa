//! Brute-force reference solver and strategy checker for small arenas.

use thiserror::Error;

use super::arena::{Arena, Owner};
use super::synth::MemorylessStrategy;

/// Upper bound on the number of positional strategies per player.
pub const ORACLE_LIMIT: u64 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("arena too large for the oracle: {strategies} positional strategies for the {player:?}")]
pub struct OracleTooLarge {
    pub player: Owner,
    pub strategies: u64,
}

fn strategy_count(arena: &Arena, player: Owner) -> Option<u64> {
    (0..arena.len())
        .filter(|&v| arena.owner(v) == player)
        .try_fold(1u64, |acc, v| acc.checked_mul(arena.successors(v).len() as u64))
}

/// All positional strategies of `player`, as a successor per node (entries
/// of other players' nodes are unused).
fn strategies(arena: &Arena, player: Owner) -> Vec<Vec<usize>> {
    let nodes: Vec<usize> = (0..arena.len()).filter(|&v| arena.owner(v) == player).collect();
    let mut out = vec![(0..arena.len()).map(|v| arena.successors(v)[0]).collect::<Vec<_>>()];
    for v in nodes {
        let mut next = Vec::new();
        for s in &out {
            for &w in arena.successors(v) {
                let mut s2 = s.clone();
                s2[v] = w;
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

/// Winner of each node: the protagonist wins at `v` iff some protagonist
/// strategy beats every antagonist strategy, judged on the unique lasso of
/// the induced play.
pub fn oracle_solve(arena: &Arena) -> Result<Vec<Owner>, OracleTooLarge> {
    for player in [Owner::Protagonist, Owner::Antagonist] {
        match strategy_count(arena, player) {
            Some(c) if c <= ORACLE_LIMIT => {}
            c => return Err(OracleTooLarge { player, strategies: c.unwrap_or(u64::MAX) }),
        }
    }
    let n = arena.len();
    let mine = strategies(arena, Owner::Protagonist);
    let theirs = strategies(arena, Owner::Antagonist);
    let mut wins = vec![false; n];
    for s0 in &mine {
        let mut beats_all = vec![true; n];
        for s1 in &theirs {
            let next: Vec<usize> = (0..n)
                .map(|v| if arena.owner(v) == Owner::Protagonist { s0[v] } else { s1[v] })
                .collect();
            for (v, ok) in beats_all.iter_mut().enumerate() {
                if *ok && !lasso_even(arena, &next, v) {
                    *ok = false;
                }
            }
        }
        for v in 0..n {
            wins[v] |= beats_all[v];
        }
    }
    Ok(wins.into_iter().map(|w| if w { Owner::Protagonist } else { Owner::Antagonist }).collect())
}

/// Whether the play from `v` in the functional graph `next` ends in a cycle
/// with even top priority.
fn lasso_even(arena: &Arena, next: &[usize], v: usize) -> bool {
    let mut seen = vec![usize::MAX; next.len()];
    let mut path = Vec::new();
    let mut cur = v;
    while seen[cur] == usize::MAX {
        seen[cur] = path.len();
        path.push(cur);
        cur = next[cur];
    }
    let top = path[seen[cur]..].iter().map(|&u| arena.priority(u)).max().unwrap();
    top % 2 == 0
}

/// Explores every play consistent with `strategy` from every protagonist
/// winning node, with the antagonist unconstrained. Fails if a play leaves
/// the winning region, a strategy move is missing, or a simple cycle has an
/// odd top priority.
pub fn check_by_unrolling(
    arena: &Arena,
    winner: &[Owner],
    strategy: &MemorylessStrategy,
) -> Result<(), String> {
    let succ = |v: usize| -> Result<Vec<usize>, String> {
        if arena.owner(v) == Owner::Protagonist {
            strategy
                .moves
                .get(&v)
                .map(|&w| vec![w])
                .ok_or_else(|| format!("no strategy move at winning node {v}"))
        } else {
            Ok(arena.successors(v).to_vec())
        }
    };
    for start in (0..arena.len()).filter(|&v| winner[v] == Owner::Protagonist) {
        // iterative DFS over simple paths
        let mut path = vec![start];
        let mut on_path = vec![false; arena.len()];
        on_path[start] = true;
        let mut stack = vec![(succ(start)?, 0usize)];
        while let Some((options, idx)) = stack.last_mut() {
            if *idx == options.len() {
                stack.pop();
                let v = path.pop().unwrap();
                on_path[v] = false;
                continue;
            }
            let w = options[*idx];
            *idx += 1;
            if winner[w] != Owner::Protagonist {
                return Err(format!("play from {start} reaches losing node {w}"));
            }
            if on_path[w] {
                let pos = path.iter().position(|&u| u == w).unwrap();
                let top = path[pos..].iter().map(|&u| arena.priority(u)).max().unwrap();
                if top % 2 == 1 {
                    return Err(format!("odd cycle {:?} reachable from {start}", &path[pos..]));
                }
                continue;
            }
            on_path[w] = true;
            path.push(w);
            stack.push((succ(w)?, 0));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{extract_strategy, zielonka};

    #[test]
    fn single_nodes() {
        let a = Arena::parse("node 0 p 0; 0").unwrap();
        assert_eq!(oracle_solve(&a).unwrap(), zielonka(&a).winner);
        let a = Arena::parse("node 0 a 1; 0").unwrap();
        assert_eq!(oracle_solve(&a).unwrap(), zielonka(&a).winner);
    }

    #[test]
    fn too_large() {
        let mut text = String::new();
        for v in 0..13 {
            text.push_str(&format!("node {v} p 0; {} {}\n", (v + 1) % 13, (v + 2) % 13));
        }
        let a = Arena::parse(&text).unwrap();
        assert_eq!(
            oracle_solve(&a),
            Err(OracleTooLarge { player: Owner::Protagonist, strategies: 1 << 13 })
        );
    }

    #[test]
    fn unrolling_rejects_bad_strategy() {
        let a = Arena::parse("node 0 p 0; 1 2\nnode 1 a 1; 0\nnode 2 a 2; 0").unwrap();
        let r = zielonka(&a);
        let good = extract_strategy(&a, &r);
        assert!(check_by_unrolling(&a, &r.winner, &good).is_ok());
        let mut bad = good.clone();
        bad.moves.insert(0, 1);
        assert!(check_by_unrolling(&a, &r.winner, &bad).is_err());
    }
}
