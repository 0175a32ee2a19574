//! Signed digraph model and its structural analysis.
//!
//! An edge `(tail -> head, sign)` means the head agent reads the tail
//! agent's state; a positive sign is cooperation, a negative sign is
//! antagonism. Everything here is combinatorial: balance, strongly connected
//! components, leader groups and reachability. Spectral quantities live in
//! [`crate::algebra`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn is_cooperative(self) -> bool {
        self == Sign::Positive
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Directed signed edge between node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedEdge {
    pub tail: usize,
    pub head: usize,
    pub sign: Sign,
}

impl SignedEdge {
    pub fn new(tail: usize, head: usize, sign: Sign) -> Self {
        Self { tail, head, sign }
    }
}

/// A structural defect found by [`SignedDigraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { node: String },
    DigonSignMismatch { a: String, b: String },
    DuplicateEdge { tail: String, head: String },
    UnknownNode { edge: usize, index: usize },
    DuplicateNode { node: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { node } => write!(f, "self-loop at {node}"),
            Violation::DigonSignMismatch { a, b } => {
                write!(f, "digon sign violation between {a} and {b}")
            }
            Violation::DuplicateEdge { tail, head } => {
                write!(f, "duplicate edge {tail} -> {head}")
            }
            Violation::UnknownNode { edge, index } => {
                write!(f, "edge {edge} references unknown node index {index}")
            }
            Violation::DuplicateNode { node } => write!(f, "duplicate node label {node}"),
        }
    }
}

/// One mode's interaction topology. Node and edge order is significant: it
/// fixes the row/column order of every matrix built from the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedDigraph {
    labels: Vec<String>,
    edges: Vec<SignedEdge>,
}

impl SignedDigraph {
    /// Builds a graph without validating it; see [`SignedDigraph::validate`].
    pub fn new(labels: Vec<String>, edges: Vec<SignedEdge>) -> Self {
        Self { labels, edges }
    }

    /// Builds a graph from label triples. Labels not listed in `nodes` are an
    /// error; everything else is left to [`SignedDigraph::validate`].
    pub fn from_labels<S: AsRef<str>>(nodes: &[S], edges: &[(S, S, Sign)]) -> Result<Self> {
        let labels: Vec<String> = nodes.iter().map(|s| s.as_ref().to_owned()).collect();
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::Precondition(format!("unknown node label '{l}'")))
        };
        let edges = edges
            .iter()
            .map(|(t, h, s)| Ok(SignedEdge::new(lookup(t.as_ref())?, lookup(h.as_ref())?, *s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { labels, edges })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn edges(&self) -> &[SignedEdge] {
        &self.edges
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// All invariant violations, empty iff the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.node_count();
        let mut out = Vec::new();
        let mut seen_labels = BTreeSet::new();
        for l in &self.labels {
            if !seen_labels.insert(l.as_str()) {
                out.push(Violation::DuplicateNode { node: l.clone() });
            }
        }
        let label = |i: usize| self.labels.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        let mut signs: HashMap<(usize, usize), Sign> = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            for idx in [e.tail, e.head] {
                if idx >= n {
                    out.push(Violation::UnknownNode { edge: k, index: idx });
                }
            }
            if e.tail == e.head {
                out.push(Violation::SelfLoop { node: label(e.tail) });
                continue;
            }
            if signs.insert((e.tail, e.head), e.sign).is_some() {
                out.push(Violation::DuplicateEdge {
                    tail: label(e.tail),
                    head: label(e.head),
                });
            }
        }
        let mut reported = BTreeSet::new();
        for (&(t, h), &s) in &signs {
            if let Some(&r) = signs.get(&(h, t)) {
                let key = (t.min(h), t.max(h));
                if r != s && reported.insert(key) {
                    out.push(Violation::DigonSignMismatch {
                        a: label(key.0),
                        b: label(key.1),
                    });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(v))
        }
    }

    fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in &self.edges {
            adj[e.tail].push(e.head);
        }
        adj
    }

    fn undirected_adjacency(&self) -> Vec<Vec<(usize, Sign)>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in &self.edges {
            adj[e.tail].push((e.head, e.sign));
            adj[e.head].push((e.tail, e.sign));
        }
        adj
    }

    /// Connectivity of the underlying undirected graph. Empty and single-node
    /// graphs count as connected.
    pub fn is_weakly_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        let adj = self.undirected_adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Nodes reachable from `source` along directed edges, `source` included.
    pub fn reachable_from(&self, source: usize) -> Vec<bool> {
        let adj = self.out_adjacency();
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// True iff some node reaches every other node along directed paths.
    pub fn has_directed_spanning_tree(&self) -> bool {
        if self.node_count() <= 1 {
            return true;
        }
        self.condensation().sources().len() == 1
    }

    /// Sign-propagating traversal of the underlying undirected signed graph.
    /// The lowest-indexed node of each weak component is gauged `+1`.
    pub fn structural_balance(&self) -> BalanceVerdict {
        let n = self.node_count();
        let adj = self.undirected_adjacency();
        let mut gauge: Vec<Option<Sign>> = vec![None; n];
        for start in 0..n {
            if gauge[start].is_some() {
                continue;
            }
            gauge[start] = Some(Sign::Positive);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let su = gauge[u].expect("visited nodes carry a gauge");
                for &(v, s) in &adj[u] {
                    let want = su * s;
                    match gauge[v] {
                        None => {
                            gauge[v] = Some(want);
                            queue.push_back(v);
                        }
                        Some(g) if g != want => {
                            return BalanceVerdict {
                                balanced: false,
                                gauge: None,
                            }
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        BalanceVerdict {
            balanced: true,
            gauge: Some(gauge.into_iter().map(|g| g.unwrap()).collect()),
        }
    }

    /// Subgraph induced by `nodes`, keeping the given node order and the
    /// original relative edge order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> SignedDigraph {
        let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let labels = nodes.iter().map(|&i| self.labels[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(SignedEdge::new(*pos.get(&e.tail)?, *pos.get(&e.head)?, e.sign))
            })
            .collect();
        SignedDigraph { labels, edges }
    }

    /// Strongly connected components (Tarjan) and the induced DAG.
    pub fn condensation(&self) -> Condensation {
        let raw = tarjan_scc(&self.out_adjacency());
        Condensation::from_components(self, raw)
    }

    /// Leader groups: condensation sources, split into root nodes and rooted
    /// SCCs classified by the balance of their induced subgraph.
    pub fn leader_structure(&self) -> LeaderStructure {
        let cond = self.condensation();
        let mut out = LeaderStructure::default();
        let mut is_leader = vec![false; self.node_count()];
        for c in cond.sources() {
            let members = &cond.components[c];
            for &v in members {
                is_leader[v] = true;
            }
            if members.len() == 1 {
                out.root_nodes.push(members[0]);
            } else if self.induced_subgraph(members).structural_balance().balanced {
                out.sb_rooted_sccs.push(members.clone());
            } else {
                out.sub_rooted_sccs.push(members.clone());
            }
        }
        out.root_nodes.sort_unstable();
        out.followers = (0..self.node_count()).filter(|&v| !is_leader[v]).collect();
        out
    }

    /// Every follower is reachable from at least one leader node. Only
    /// meaningful with more than one leader group.
    pub fn check_assumption3(&self, leaders: &LeaderStructure) -> Result<bool> {
        let m = leaders.group_count();
        if m <= 1 {
            return Err(Error::Precondition(format!(
                "leader reachability needs more than one leader group, found {m}"
            )));
        }
        let mut covered = vec![false; self.node_count()];
        for l in leaders.leaders() {
            for (v, r) in self.reachable_from(l).into_iter().enumerate() {
                covered[v] |= r;
            }
        }
        Ok(leaders.followers.iter().all(|&f| covered[f]))
    }
}

/// Result of the structural balance test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceVerdict {
    pub balanced: bool,
    /// Per-node `σ_i`; present iff balanced.
    pub gauge: Option<Vec<Sign>>,
}

impl BalanceVerdict {
    /// Nodes gauged `+1` and `-1`, in index order.
    pub fn partition(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let gauge = self.gauge.as_ref()?;
        let (pos, neg): (Vec<usize>, Vec<usize>) =
            (0..gauge.len()).partition(|&i| gauge[i] == Sign::Positive);
        Some((pos, neg))
    }
}

/// SCC decomposition. Components are numbered in a topological order of the
/// condensation DAG; members are sorted by node index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Condensation {
    fn from_components(g: &SignedDigraph, mut raw: Vec<Vec<usize>>) -> Self {
        // Tarjan emits components in reverse topological order.
        raw.reverse();
        for c in &mut raw {
            c.sort_unstable();
        }
        let mut component_of = vec![0; g.node_count()];
        for (ci, c) in raw.iter().enumerate() {
            for &v in c {
                component_of[v] = ci;
            }
        }
        let edges = g
            .edges()
            .iter()
            .map(|e| (component_of[e.tail], component_of[e.head]))
            .filter(|(a, b)| a != b)
            .collect();
        Self {
            component_of,
            components: raw,
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components without incoming condensation edges.
    pub fn sources(&self) -> Vec<usize> {
        let mut has_in = vec![false; self.len()];
        for &(_, b) in &self.edges {
            has_in[b] = true;
        }
        (0..self.len()).filter(|&c| !has_in[c]).collect()
    }
}

fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, next child position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// Leader groups of a signed digraph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderStructure {
    pub root_nodes: Vec<usize>,
    pub sb_rooted_sccs: Vec<Vec<usize>>,
    pub sub_rooted_sccs: Vec<Vec<usize>>,
    pub followers: Vec<usize>,
}

impl LeaderStructure {
    pub fn l1(&self) -> usize {
        self.root_nodes.len()
    }

    pub fn l2_sb(&self) -> usize {
        self.sb_rooted_sccs.len()
    }

    pub fn l2_sub(&self) -> usize {
        self.sub_rooted_sccs.len()
    }

    /// Number of leader groups `m`.
    pub fn group_count(&self) -> usize {
        self.l1() + self.l2_sb() + self.l2_sub()
    }

    /// Union of all leader groups, sorted.
    pub fn leaders(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .root_nodes
            .iter()
            .copied()
            .chain(self.sb_rooted_sccs.iter().flatten().copied())
            .chain(self.sub_rooted_sccs.iter().flatten().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// Each leader group as a node list: root nodes first, then SB and SUB
    /// rooted SCCs.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        self.root_nodes
            .iter()
            .map(|&r| vec![r])
            .chain(self.sb_rooted_sccs.iter().cloned())
            .chain(self.sub_rooted_sccs.iter().cloned())
            .collect()
    }
}
