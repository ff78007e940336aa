//! Attractors and safety regions.

use std::collections::VecDeque;

use super::arena::{Arena, NodeSet, Owner};

/// Forced-reachability set of `player` to `targets` inside `within`.
///
/// Also returns an attractor strategy: for every `player` node of the
/// attractor outside `targets`, the lowest-id successor of strictly smaller
/// rank.
pub fn attractor_with_strategy(
    arena: &Arena,
    player: Owner,
    targets: &NodeSet,
    within: &NodeSet,
) -> (NodeSet, Vec<(usize, usize)>) {
    let n = arena.len();
    let mut attr = arena.empty_set();
    let mut rank = vec![usize::MAX; n];
    let mut remaining = vec![0usize; n];
    let mut queue = VecDeque::new();
    for v in targets.ones() {
        if within.contains(v) {
            attr.insert(v);
            rank[v] = 0;
            queue.push_back(v);
        }
    }
    for v in within.ones() {
        remaining[v] = arena.successors(v).iter().filter(|&&w| within.contains(w)).count();
    }
    let mut added = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &p in arena.predecessors(u) {
            if !within.contains(p) || attr.contains(p) {
                continue;
            }
            let take = if arena.owner(p) == player {
                true
            } else {
                remaining[p] -= 1;
                remaining[p] == 0
            };
            if take {
                attr.insert(p);
                rank[p] = rank[u] + 1;
                queue.push_back(p);
                if arena.owner(p) == player {
                    added.push(p);
                }
            }
        }
    }
    let strategy = added
        .into_iter()
        .map(|p| {
            let next = arena
                .successors(p)
                .iter()
                .copied()
                .find(|&w| attr.contains(w) && within.contains(w) && rank[w] < rank[p])
                .expect("attracted node has a smaller-rank successor");
            (p, next)
        })
        .collect();
    (attr, strategy)
}

pub fn attractor(arena: &Arena, player: Owner, targets: &NodeSet) -> NodeSet {
    attractor_with_strategy(arena, player, targets, &arena.all_nodes()).0
}

/// Largest set from which the protagonist can avoid `bad` forever.
pub fn safety_region(arena: &Arena, bad: &NodeSet) -> NodeSet {
    let mut safe = arena.all_nodes();
    safe.difference_with(&attractor(arena, Owner::Antagonist, bad));
    safe
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(arena: &Arena, v: &[usize]) -> NodeSet {
        let mut s = arena.empty_set();
        for &x in v {
            s.insert(x);
        }
        s
    }

    #[test]
    fn everything_attracts_everything() {
        let a = Arena::parse("node 0 p 0; 1\nnode 1 a 0; 0 1").unwrap();
        assert_eq!(attractor(&a, Owner::Protagonist, &a.all_nodes()), a.all_nodes());
    }

    #[test]
    fn forced_protagonist_node_included() {
        let a = Arena::parse("node 0 p 0; 1\nnode 1 a 0; 1").unwrap();
        let (attr, strat) = attractor_with_strategy(&a, Owner::Protagonist, &set(&a, &[1]), &a.all_nodes());
        assert_eq!(attr, set(&a, &[0, 1]));
        assert_eq!(strat, vec![(0, 1)]);
    }

    #[test]
    fn antagonist_escape_blocks_attraction() {
        // a -> b -> c, b may escape to d
        let a = Arena::parse(
            "node 0 a 0; 1\nnode 1 a 0; 2 3\nnode 2 a 0; 2\nnode 3 a 0; 3",
        )
        .unwrap();
        assert_eq!(attractor(&a, Owner::Protagonist, &set(&a, &[2])), set(&a, &[2]));
    }

    #[test]
    fn safety_examples() {
        let a = Arena::parse("node 0 p 0; 1 2\nnode 1 a 0; 0\nnode 2 a 0; 2").unwrap();
        assert_eq!(safety_region(&a, &a.empty_set()), a.all_nodes());
        assert_eq!(safety_region(&a, &set(&a, &[2])), set(&a, &[0, 1]));
        assert!(!safety_region(&a, &set(&a, &[0])).contains(a.initial()));
    }

    #[test]
    fn strategy_is_lowest_id_with_smaller_rank() {
        let a = Arena::parse("node 0 p 0; 1 2 3\nnode 1 a 0; 1\nnode 2 p 0; 3\nnode 3 a 0; 3").unwrap();
        let (_, strat) = attractor_with_strategy(&a, Owner::Protagonist, &set(&a, &[3]), &a.all_nodes());
        assert_eq!(strat, vec![(0, 3), (2, 3)]);
    }
}
