//! Explicit two-player arenas with max-parity priorities.

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Protagonist (sensors, player 0, wins on even) or antagonist (target).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Protagonist,
    Antagonist,
}

impl Owner {
    pub fn index(self) -> usize {
        match self {
            Owner::Protagonist => 0,
            Owner::Antagonist => 1,
        }
    }

    pub fn from_index(i: usize) -> Owner {
        if i == 0 {
            Owner::Protagonist
        } else {
            Owner::Antagonist
        }
    }

    pub fn opponent(self) -> Owner {
        Owner::from_index(1 - self.index())
    }

    /// The player favoured by a priority.
    pub fn of_priority(p: u8) -> Owner {
        Owner::from_index((p % 2) as usize)
    }
}

pub type NodeSet = FixedBitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("node {0} has no successor")]
    DeadEnd(usize),
    #[error("edge {from} -> {to} leaves the arena")]
    DanglingEdge { from: usize, to: usize },
    #[error("initial node {0} is not in the arena")]
    BadInitial(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Arena in compressed adjacency form, successors sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    owner: Vec<Owner>,
    priority: Vec<u8>,
    offsets: Vec<usize>,
    succ: Vec<usize>,
    pred_offsets: Vec<usize>,
    pred: Vec<usize>,
    initial: usize,
}

impl Arena {
    pub fn new(
        owner: Vec<Owner>,
        priority: Vec<u8>,
        adjacency: Vec<Vec<usize>>,
        initial: usize,
    ) -> Result<Arena, ArenaError> {
        let n = owner.len();
        assert_eq!(priority.len(), n);
        assert_eq!(adjacency.len(), n);
        if n > 0 && initial >= n {
            return Err(ArenaError::BadInitial(initial));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut succ = Vec::new();
        let mut indegree = vec![0usize; n];
        offsets.push(0);
        for (v, mut out) in adjacency.into_iter().enumerate() {
            out.sort_unstable();
            out.dedup();
            if out.is_empty() {
                return Err(ArenaError::DeadEnd(v));
            }
            for &w in &out {
                if w >= n {
                    return Err(ArenaError::DanglingEdge { from: v, to: w });
                }
                indegree[w] += 1;
            }
            succ.extend(out);
            offsets.push(succ.len());
        }
        let mut pred_offsets = vec![0usize; n + 1];
        for v in 0..n {
            pred_offsets[v + 1] = pred_offsets[v] + indegree[v];
        }
        let mut fill = pred_offsets.clone();
        let mut pred = vec![0usize; succ.len()];
        for v in 0..n {
            for &w in &succ[offsets[v]..offsets[v + 1]] {
                pred[fill[w]] = v;
                fill[w] += 1;
            }
        }
        Ok(Arena { owner, priority, offsets, succ, pred_offsets, pred, initial })
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> u8 {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[self.pred_offsets[v]..self.pred_offsets[v + 1]]
    }

    pub fn all_nodes(&self) -> NodeSet {
        let mut s = NodeSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    pub fn empty_set(&self) -> NodeSet {
        NodeSet::with_capacity(self.len())
    }

    /// Parses the line format `node <id> <owner> <priority>; <succ>...` with
    /// an optional `init <id>` line (default 0). Blank lines and `#` comments
    /// are ignored. Node ids must be `0..n`.
    pub fn parse(text: &str) -> Result<Arena, ArenaError> {
        let mut nodes: Vec<Option<(Owner, u8, Vec<usize>)>> = Vec::new();
        let mut initial = 0;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let err = |message: String| ArenaError::Parse { line: k + 1, message };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("init") {
                initial = rest.trim().parse().map_err(|_| err(format!("bad init `{}`", rest.trim())))?;
                continue;
            }
            let Some(rest) = line.strip_prefix("node") else {
                return Err(err(format!("expected `node` or `init`, found `{line}`")));
            };
            let (head, tail) = rest.split_once(';').ok_or_else(|| err("missing `;`".into()))?;
            let fields: Vec<&str> = head.split_whitespace().collect();
            let [id, owner, prio] = fields[..] else {
                return Err(err("expected `node <id> <owner> <priority>;`".into()));
            };
            let id: usize = id.parse().map_err(|_| err(format!("bad node id `{id}`")))?;
            let owner = match owner {
                "protagonist" | "p" | "0" => Owner::Protagonist,
                "antagonist" | "a" | "1" => Owner::Antagonist,
                other => return Err(err(format!("bad owner `{other}`"))),
            };
            let prio: u8 = prio.parse().map_err(|_| err(format!("bad priority `{prio}`")))?;
            if prio > 2 {
                return Err(err(format!("priority {prio} outside 0..=2")));
            }
            let succ = tail
                .split_whitespace()
                .map(|s| s.parse::<usize>().map_err(|_| err(format!("bad successor `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if nodes.len() <= id {
                nodes.resize(id + 1, None);
            }
            if nodes[id].is_some() {
                return Err(err(format!("node {id} declared twice")));
            }
            nodes[id] = Some((owner, prio, succ));
        }
        let mut owner = Vec::new();
        let mut priority = Vec::new();
        let mut adjacency = Vec::new();
        for (id, node) in nodes.into_iter().enumerate() {
            let (o, p, s) = node.ok_or(ArenaError::Parse { line: 0, message: format!("node {id} missing") })?;
            owner.push(o);
            priority.push(p);
            adjacency.push(s);
        }
        Arena::new(owner, priority, adjacency, initial)
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "init {}", self.initial);
        for v in 0..self.len() {
            let owner = match self.owner[v] {
                Owner::Protagonist => "protagonist",
                Owner::Antagonist => "antagonist",
            };
            let succ: Vec<String> = self.successors(v).iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "node {v} {owner} {}; {}", self.priority[v], succ.join(" "));
        }
        out
    }
}
