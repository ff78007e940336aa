//! Exhaustive check of the composed closed loop against the global
//! objective.

use std::collections::VecDeque;

use indexmap::IndexSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::{Composition, CompositionMode, RuntimeError};
use crate::belief::{BeliefError, BeliefState};
use crate::decompose::recombine_beliefs;
use crate::game::GameStructure;
use crate::loc::{Loc, LocSet};
use crate::specs::invisible_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictResult {
    Holds,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoStep {
    pub target: i32,
    pub sensors: Vec<i32>,
    pub global_belief: Vec<i32>,
    pub invisible: usize,
}

/// A play of the closed loop: `stem` from the initial state, then `cycle`
/// repeated forever. Safety witnesses end at the first violating state and
/// have an empty cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lasso {
    pub property: String,
    pub stem: Vec<LassoStep>,
    pub cycle: Vec<LassoStep>,
}

impl Lasso {
    /// The target's positions along the stem and then once around the cycle,
    /// excluding the initial position.
    pub fn target_moves(&self) -> Vec<Loc> {
        self.stem
            .iter()
            .skip(1)
            .chain(&self.cycle)
            .map(|s| Loc::from_raw(s.target).expect("witness locations are valid"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub result: VerdictResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Lasso>,
    /// Number of reachable closed-loop states.
    pub states: usize,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.result == VerdictResult::Holds
    }
}

/// Closed-loop state: the true target and, per mode, the local belief
/// states or the central belief state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Local(Loc, Vec<BeliefState>),
    Central(Loc, BeliefState),
}

impl Node {
    fn target(&self) -> Loc {
        match self {
            Node::Local(t, _) | Node::Central(t, _) => *t,
        }
    }
}

struct Product {
    nodes: IndexSet<Node>,
    edges: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

fn sensors_of(node: &Node) -> Vec<Loc> {
    match node {
        Node::Local(_, local) => local.iter().map(|s| s.sensors[0]).collect(),
        Node::Central(_, c) => c.sensors.clone(),
    }
}

fn global_state(comp: &Composition, node: &Node) -> Result<BeliefState, RuntimeError> {
    let t = node.target();
    let belief: LocSet = match node {
        Node::Local(_, local) => {
            let beliefs: Vec<LocSet> = local.iter().map(|s| s.belief.clone()).collect();
            recombine_beliefs(comp.world().partition(), &beliefs)?
        }
        Node::Central(_, c) => c.belief.clone(),
    };
    Ok(BeliefState { sensors: sensors_of(node), belief, triggers: comp.world().triggered(t) })
}

fn explore(comp: &Composition, cap: usize) -> Result<Product, RuntimeError> {
    let world = comp.world();
    let t0 = world.target_init();
    let init = match comp.mode() {
        CompositionMode::Autonomous => {
            Node::Local(t0, comp.subgames().iter().map(BeliefState::initial).collect())
        }
        CompositionMode::Projection => Node::Central(t0, BeliefState::initial(world)),
    };
    let mut nodes = IndexSet::new();
    nodes.insert(init);
    let mut edges = Vec::new();
    let mut parent = vec![None];
    let mut next = 0;
    while next < nodes.len() {
        let node = nodes[next].clone();
        let sensors = sensors_of(&node);
        let mut out = Vec::new();
        for to in world.target_moves(&sensors, node.target()) {
            let succ = match &node {
                Node::Local(_, local) => Node::Local(to, comp.advance_local(local, to)?.1),
                Node::Central(_, c) => Node::Central(to, comp.advance_projection(c, to)?.1),
            };
            let (id, fresh) = nodes.insert_full(succ);
            if fresh {
                if nodes.len() > cap {
                    return Err(BeliefError::BeliefExplosion { cap, frontier: nodes.len() - next }.into());
                }
                parent.push(Some(next));
            }
            out.push(id);
        }
        edges.push(out);
        next += 1;
    }
    Ok(Product { nodes, edges, parent })
}

fn step_of(comp: &Composition, node: &Node) -> Result<LassoStep, RuntimeError> {
    let g = global_state(comp, node)?;
    Ok(LassoStep {
        target: node.target().raw(),
        sensors: g.sensors.iter().map(|l| l.raw()).collect(),
        global_belief: g.belief.to_raw(),
        invisible: invisible_count(comp.world(), &g),
    })
}

fn stem_to(product: &Product, v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    while let Some(p) = product.parent[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}

/// Shortest cycle through `v` using only nodes in `allowed`, as the nodes
/// after `v` up to and including `v` again.
fn cycle_through(product: &Product, v: usize, allowed: &[bool]) -> Vec<usize> {
    let mut prev = vec![usize::MAX; product.nodes.len()];
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        for &w in &product.edges[u] {
            if !allowed[w] {
                continue;
            }
            if w == v {
                let mut path = vec![v];
                let mut cur = u;
                while cur != v {
                    path.push(cur);
                    cur = prev[cur];
                }
                path.reverse();
                return path;
            }
            if prev[w] == usize::MAX {
                prev[w] = u;
                queue.push_back(w);
            }
        }
    }
    unreachable!("node lies on a cycle")
}

/// Explores every closed-loop play of the composition and checks the
/// world's global objective on the monitored global belief.
pub fn verify_closed_loop(comp: &Composition, cap: usize) -> Result<Verdict, RuntimeError> {
    if comp.is_partial() {
        return Err(RuntimeError::PartialComposition);
    }
    let product = explore(comp, cap)?;
    let n = product.nodes.len();
    let ob = comp.world().objective().obligations();
    let mut invisible = Vec::with_capacity(n);
    for node in &product.nodes {
        invisible.push(invisible_count(comp.world(), &global_state(comp, node)?));
    }
    let lasso = |property: &str, stem: Vec<usize>, cycle: Vec<usize>| -> Result<Lasso, RuntimeError> {
        let steps = |ids: Vec<usize>| -> Result<Vec<LassoStep>, RuntimeError> {
            ids.into_iter().map(|v| step_of(comp, &product.nodes[v])).collect()
        };
        Ok(Lasso { property: property.to_string(), stem: steps(stem)?, cycle: steps(cycle)? })
    };

    if let Some(a) = ob.safety {
        // node ids are in BFS order, so the first bad id has a shortest stem
        if let Some(v) = (0..n).find(|&v| invisible[v] > a as usize) {
            let witness = lasso("safety", stem_to(&product, v), Vec::new())?;
            return Ok(Verdict { result: VerdictResult::Violated, witness: Some(witness), states: n });
        }
    }
    if let Some(b) = ob.liveness {
        let bad: Vec<bool> = invisible.iter().map(|&k| k > b as usize).collect();
        let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
        for _ in 0..n {
            graph.add_node(());
        }
        for (u, out) in product.edges.iter().enumerate() {
            if !bad[u] {
                continue;
            }
            for &w in out {
                if bad[w] {
                    graph.add_edge((u as u32).into(), (w as u32).into(), ());
                }
            }
        }
        let mut on_cycle = vec![false; n];
        for scc in tarjan_scc(&graph) {
            let nontrivial = scc.len() > 1 || {
                let v = scc[0].index();
                bad[v] && product.edges[v].contains(&v)
            };
            if nontrivial {
                for v in scc {
                    on_cycle[v.index()] = true;
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| on_cycle[v]) {
            let witness = lasso("liveness", stem_to(&product, v), cycle_through(&product, v, &bad))?;
            return Ok(Verdict { result: VerdictResult::Violated, witness: Some(witness), states: n });
        }
    }
    Ok(Verdict { result: VerdictResult::Holds, witness: None, states: n })
}
