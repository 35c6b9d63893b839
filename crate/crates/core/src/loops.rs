//! Signed causal graph of the model and its feedback loops.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        }
    }

    /// Loop type: reinforcing for positive, balancing for negative.
    pub fn loop_kind(self) -> &'static str {
        match self {
            Polarity::Positive => "reinforcing",
            Polarity::Negative => "balancing",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl Mul for Polarity {
    type Output = Polarity;

    fn mul(self, rhs: Polarity) -> Polarity {
        if self == rhs {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} -> {1} already exists")]
    DuplicateEdge(String, String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("no edge {0} -> {1}")]
    MissingEdge(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub polarity: Polarity,
    /// Defining formula the dependency comes from.
    pub provenance: String,
}

/// Directed graph with signed edges and at most one edge per ordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SignedDigraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
}

impl SignedDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.nodes.push(name.to_string());
        self.index.insert(name.to_string(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn add_edge(
        &mut self,
        from: &str,
        to: &str,
        polarity: Polarity,
        provenance: &str,
    ) -> Result<(), GraphError> {
        let (a, b) = (self.add_node(from), self.add_node(to));
        if self.edges.iter().any(|e| e.from == a && e.to == b) {
            return Err(GraphError::DuplicateEdge(from.into(), to.into()));
        }
        self.edges.push(Edge {
            from: a,
            to: b,
            polarity,
            provenance: provenance.to_string(),
        });
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn edge(&self, from: &str, to: &str) -> Option<&Edge> {
        let (a, b) = (self.node_index(from)?, self.node_index(to)?);
        self.edges.iter().find(|e| e.from == a && e.to == b)
    }

    pub fn remove_edge(&mut self, from: &str, to: &str) -> Result<Edge, GraphError> {
        let missing = || GraphError::MissingEdge(from.into(), to.into());
        let (a, b) = (
            self.node_index(from).ok_or_else(missing)?,
            self.node_index(to).ok_or_else(missing)?,
        );
        let pos = self
            .edges
            .iter()
            .position(|e| e.from == a && e.to == b)
            .ok_or_else(missing)?;
        Ok(self.edges.remove(pos))
    }

    pub fn set_polarity(
        &mut self,
        from: &str,
        to: &str,
        polarity: Polarity,
    ) -> Result<(), GraphError> {
        let (a, b) = (
            self.node_index(from)
                .ok_or_else(|| GraphError::UnknownNode(from.into()))?,
            self.node_index(to)
                .ok_or_else(|| GraphError::UnknownNode(to.into()))?,
        );
        let edge = self
            .edges
            .iter_mut()
            .find(|e| e.from == a && e.to == b)
            .ok_or_else(|| GraphError::MissingEdge(from.into(), to.into()))?;
        edge.polarity = polarity;
        Ok(())
    }

    /// Successor lists, each sorted by node index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        for succ in &mut adj {
            succ.sort_unstable();
        }
        adj
    }

    /// `from,to,polarity,provenance` lines with a header row.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("from,to,polarity,provenance\n");
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.nodes[e.from], self.nodes[e.to], e.polarity, e.provenance
            );
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph causal {\n  rankdir=LR;\n");
        for name in &self.nodes {
            let shape = if STOCKS.contains(&name.as_str()) {
                "box"
            } else {
                "ellipse"
            };
            let _ = writeln!(out, "  \"{name}\" [shape={shape}];");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", tooltip=\"{}\"];",
                self.nodes[e.from], self.nodes[e.to], e.polarity, e.provenance
            );
        }
        out.push_str("}\n");
        out
    }
}

const STOCKS: [&str; 5] = ["Peasants", "Bandits", "Mafia", "ihat_P", "ihat_B"];

/// The model's signed dependency graph, one node per model symbol.
///
/// Edge signs are the signs of the partial derivatives of each defining
/// formula where every quantity is positive and every control lies in (0, 1).
/// Stocks are entered through their recruitment flows; peasants are the
/// residual of the other two classes.
pub fn build_causal_graph() -> SignedDigraph {
    use Polarity::{Negative as Neg, Positive as Pos};
    const EDGES: &[(&str, &str, Polarity, &str)] = &[
        ("a_P", "Y", Pos, "Y = a_P*P"),
        ("Peasants", "Y", Pos, "Y = a_P*P"),
        ("Peasants", "F", Pos, "F = 1/(1 + theta_B*B/P)"),
        ("Bandits", "F", Neg, "F = 1/(1 + theta_B*B/P)"),
        ("theta_B", "F", Neg, "F = 1/(1 + theta_B*B/P)"),
        ("lambda_A", "m_B", Neg, "m_B = (1 - lambda_A)*theta_M*B"),
        ("theta_M", "m_B", Pos, "m_B = (1 - lambda_A)*theta_M*B"),
        ("Bandits", "m_B", Pos, "m_B = (1 - lambda_A)*theta_M*B"),
        ("Mafia", "lambda_M", Pos, "lambda_M = min(1; M/m_B)"),
        ("m_B", "lambda_M", Neg, "lambda_M = min(1; M/m_B)"),
        ("lambda_A", "pi", Neg, "pi = (1 - lambda_A)(1 - lambda_M)"),
        ("lambda_M", "pi", Neg, "pi = (1 - lambda_A)(1 - lambda_M)"),
        ("pi", "R_B", Pos, "R_B = pi*(1 - F)*Y"),
        ("F", "R_B", Neg, "R_B = pi*(1 - F)*Y"),
        ("Y", "R_B", Pos, "R_B = pi*(1 - F)*Y"),
        ("tbar_M", "T_B", Pos, "T_B = tbar_M*lambda_M*R_B"),
        ("lambda_M", "T_B", Pos, "T_B = tbar_M*lambda_M*R_B"),
        ("R_B", "T_B", Pos, "T_B = tbar_M*lambda_M*R_B"),
        ("R_B", "I_B", Pos, "I_B = R_B - T_B"),
        ("T_B", "I_B", Neg, "I_B = R_B - T_B"),
        ("I_B", "i_B", Pos, "i_B = I_B/B"),
        ("Bandits", "i_B", Neg, "i_B = I_B/B"),
        ("i_B", "ihat_B", Pos, "dihat_B/dt = (i_B - ihat_B)/tau"),
        ("ihat_P", "p_M", Pos, "p_M = max(ihat_P; ihat_B) + c_M"),
        ("ihat_B", "p_M", Pos, "p_M = max(ihat_P; ihat_B) + c_M"),
        ("c_M", "p_M", Pos, "p_M = max(ihat_P; ihat_B) + c_M"),
        ("p_M", "T_P", Pos, "T_P = p_M*M"),
        ("Mafia", "T_P", Pos, "T_P = p_M*M"),
        ("Y", "I_P", Pos, "I_P = Y - R_B - T_P"),
        ("R_B", "I_P", Neg, "I_P = Y - R_B - T_P"),
        ("T_P", "I_P", Neg, "I_P = Y - R_B - T_P"),
        ("I_P", "i_P", Pos, "i_P = I_P/P"),
        ("Peasants", "i_P", Neg, "i_P = I_P/P"),
        ("i_P", "ihat_P", Pos, "dihat_P/dt = (i_P - ihat_P)/tau"),
        ("ihat_B", "attractiveness", Pos, "ihat_B/(ihat_B + ihat_P)"),
        ("ihat_P", "attractiveness", Neg, "ihat_B/(ihat_B + ihat_P)"),
        ("Peasants", "B_star", Pos, "B_star = (P + B)*attractiveness"),
        ("Bandits", "B_star", Pos, "B_star = (P + B)*attractiveness"),
        (
            "attractiveness",
            "B_star",
            Pos,
            "B_star = (P + B)*attractiveness",
        ),
        (
            "B_star",
            "bandit_recruitment",
            Pos,
            "dB/dt = (B_star - B)/tau_B",
        ),
        (
            "Bandits",
            "bandit_recruitment",
            Neg,
            "dB/dt = (B_star - B)/tau_B",
        ),
        ("bandit_recruitment", "Bandits", Pos, "B integrates dB/dt"),
        ("R_B", "W", Pos, "W = R_B"),
        ("I_P", "L", Pos, "L = max(I_P; 0)"),
        ("W", "l", Pos, "l = min(W; L)"),
        ("L", "l", Pos, "l = min(W; L)"),
        ("l", "D_M", Pos, "D_M = l/p_M"),
        ("p_M", "D_M", Neg, "D_M = l/p_M"),
        ("D_M", "mafia_recruitment", Pos, "dM/dt = (D_M - M)/tau_M"),
        ("Mafia", "mafia_recruitment", Neg, "dM/dt = (D_M - M)/tau_M"),
        ("mafia_recruitment", "Mafia", Pos, "M integrates dM/dt"),
        ("Bandits", "Peasants", Neg, "P = N - B - M"),
        ("Mafia", "Peasants", Neg, "P = N - B - M"),
    ];
    let mut g = SignedDigraph::new();
    for stock in ["Peasants", "Bandits", "Mafia"] {
        g.add_node(stock);
    }
    for &(from, to, polarity, provenance) in EDGES {
        g.add_edge(from, to, polarity, provenance)
            .expect("model graph has no duplicate edges");
    }
    g
}

/// All elementary circuits of the graph given by successor lists.
///
/// Each circuit starts at its smallest node index and does not repeat the
/// closing node. Self-loops are reported as one-node circuits.
pub fn elementary_circuits(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut search = CircuitSearch {
        adj,
        blocked: vec![false; n],
        block_map: vec![Vec::new(); n],
        stack: Vec::new(),
        in_component: vec![false; n],
        found: Vec::new(),
    };
    for start in 0..n {
        let component = component_of(adj, start);
        if component.len() == 1 && !adj[start].contains(&start) {
            continue;
        }
        search.in_component.iter_mut().for_each(|c| *c = false);
        for &v in &component {
            search.in_component[v] = true;
            search.blocked[v] = false;
            search.block_map[v].clear();
        }
        search.circuit(start, start);
    }
    search.found
}

struct CircuitSearch<'a> {
    adj: &'a [Vec<usize>],
    blocked: Vec<bool>,
    block_map: Vec<Vec<usize>>,
    stack: Vec<usize>,
    in_component: Vec<bool>,
    found: Vec<Vec<usize>>,
}

impl CircuitSearch<'_> {
    fn circuit(&mut self, v: usize, start: usize) -> bool {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.adj[v] {
            if !self.in_component[w] {
                continue;
            }
            if w == start {
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, start) {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &self.adj[v] {
                if self.in_component[w] && !self.block_map[w].contains(&v) {
                    self.block_map[w].push(v);
                }
            }
        }
        self.stack.pop();
        closed
    }

    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        while let Some(w) = self.block_map[v].pop() {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

/// Strongly connected component containing `start` in the subgraph of
/// nodes with index `>= start`.
fn component_of(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let reach = |forward: bool| {
        let mut seen = vec![false; adj.len()];
        let mut todo = vec![start];
        seen[start] = true;
        while let Some(v) = todo.pop() {
            let next: Box<dyn Iterator<Item = usize>> = if forward {
                Box::new(adj[v].iter().copied())
            } else {
                Box::new((start..adj.len()).filter(move |&u| adj[u].contains(&v)))
            };
            for w in next {
                if w >= start && !seen[w] {
                    seen[w] = true;
                    todo.push(w);
                }
            }
        }
        seen
    };
    let (fwd, bwd) = (reach(true), reach(false));
    (start..adj.len()).filter(|&v| fwd[v] && bwd[v]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackLoop {
    /// Node names, rotated so the lexicographically smallest comes first.
    pub nodes: Vec<String>,
    pub polarity: Polarity,
    /// Code of the matching named loop, if any.
    pub name: Option<&'static str>,
}

impl fmt::Display for FeedbackLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.polarity)?;
        if let Some(name) = self.name {
            write!(f, "{name} ")?;
        }
        write!(f, "{} -> {}", self.nodes.join(" -> "), self.nodes[0])
    }
}

fn canonical_rotation(mut names: Vec<String>) -> Vec<String> {
    let start = names
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    names.rotate_left(start);
    names
}

fn cycle_polarity(g: &SignedDigraph, cycle: &[usize]) -> Polarity {
    let mut polarity = Polarity::Positive;
    for (i, &from) in cycle.iter().enumerate() {
        let to = cycle[(i + 1) % cycle.len()];
        let edge = g
            .edges
            .iter()
            .find(|e| e.from == from && e.to == to)
            .expect("circuit edges exist");
        polarity = polarity * edge.polarity;
    }
    polarity
}

/// Every feedback loop of `g`, optionally only those passing through `through`.
///
/// Loops are sorted by their canonically rotated node-name sequence.
pub fn enumerate_loops(g: &SignedDigraph, through: Option<&str>) -> Vec<FeedbackLoop> {
    let filter = through.map(|name| g.node_index(name));
    if let Some(None) = filter {
        return Vec::new();
    }
    let filter = filter.flatten();
    let mut loops: Vec<FeedbackLoop> = elementary_circuits(&g.adjacency())
        .into_iter()
        .filter(|c| filter.is_none_or(|v| c.contains(&v)))
        .map(|c| {
            let polarity = cycle_polarity(g, &c);
            let names = canonical_rotation(c.iter().map(|&v| g.nodes[v].clone()).collect());
            let name = NAMED_LOOPS
                .iter()
                .find(|nl| {
                    canonical_rotation(nl.path.iter().map(|s| s.to_string()).collect()) == names
                })
                .map(|nl| nl.code);
            FeedbackLoop {
                nodes: names,
                polarity,
                name,
            }
        })
        .collect();
    loops.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    loops
}

/// A feedback loop described by name in the model narrative.
#[derive(Debug, Clone, Copy)]
pub struct NamedLoop {
    pub code: &'static str,
    pub title: &'static str,
    /// Cycle as a node path; the last node links back to the first.
    pub path: &'static [&'static str],
    pub polarity: Polarity,
}

pub const NAMED_LOOPS: [NamedLoop; 5] = [
    NamedLoop {
        code: "R1",
        title: "peasant prosperity",
        path: &[
            "Peasants",
            "Y",
            "I_P",
            "i_P",
            "ihat_P",
            "attractiveness",
            "B_star",
            "bandit_recruitment",
            "Bandits",
        ],
        polarity: Polarity::Positive,
    },
    NamedLoop {
        code: "B1",
        title: "plenty to lose",
        path: &[
            "Peasants",
            "Y",
            "R_B",
            "I_P",
            "i_P",
            "ihat_P",
            "attractiveness",
            "B_star",
            "bandit_recruitment",
            "Bandits",
        ],
        polarity: Polarity::Negative,
    },
    NamedLoop {
        code: "R2",
        title: "attractiveness of banditry",
        path: &[
            "Bandits",
            "F",
            "R_B",
            "I_B",
            "i_B",
            "ihat_B",
            "attractiveness",
            "B_star",
            "bandit_recruitment",
        ],
        polarity: Polarity::Positive,
    },
    NamedLoop {
        code: "R3",
        title: "peasants lose",
        path: &[
            "Bandits",
            "F",
            "R_B",
            "I_P",
            "i_P",
            "ihat_P",
            "attractiveness",
            "B_star",
            "bandit_recruitment",
        ],
        polarity: Polarity::Positive,
    },
    NamedLoop {
        code: "B2",
        title: "demand for protection",
        path: &[
            "R_B",
            "W",
            "l",
            "D_M",
            "mafia_recruitment",
            "Mafia",
            "lambda_M",
            "pi",
        ],
        polarity: Polarity::Negative,
    },
];

/// Reference edge signs along each named loop, taken from [`build_causal_graph`].
fn reference_polarity(from: &str, to: &str) -> Option<Polarity> {
    thread_local! {
        static REFERENCE: BTreeMap<(String, String), Polarity> = {
            let g = build_causal_graph();
            g.edges()
                .iter()
                .map(|e| ((g.name(e.from).to_string(), g.name(e.to).to_string()), e.polarity))
                .collect()
        };
    }
    REFERENCE.with(|r| r.get(&(from.to_string(), to.to_string())).copied())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopStatus {
    Found(Polarity),
    Missing {
        from: String,
        to: String,
    },
    PolarityMismatch {
        expected: Polarity,
        found: Polarity,
        /// Edges whose sign differs from the model graph, as `(from, to, sign)`.
        changed: Vec<(String, String, Polarity)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedLoopCheck {
    pub code: &'static str,
    pub title: &'static str,
    pub status: LoopStatus,
}

impl NamedLoopCheck {
    pub fn ok(&self) -> bool {
        matches!(self.status, LoopStatus::Found(_))
    }
}

impl fmt::Display for NamedLoopCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): ", self.code, self.title)?;
        match &self.status {
            LoopStatus::Found(p) => write!(f, "found, {}", p.loop_kind()),
            LoopStatus::Missing { from, to } => write!(f, "MISSING, no edge {from} -> {to}"),
            LoopStatus::PolarityMismatch {
                expected,
                found,
                changed,
            } => {
                write!(
                    f,
                    "POLARITY MISMATCH, expected {} but found {}",
                    expected.loop_kind(),
                    found.loop_kind()
                )?;
                for (a, b, p) in changed {
                    write!(f, "; edge {a} -> {b} is {p}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedLoopReport {
    pub checks: Vec<NamedLoopCheck>,
}

impl NamedLoopReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(NamedLoopCheck::ok)
    }

    pub fn get(&self, code: &str) -> Option<&NamedLoopCheck> {
        self.checks.iter().find(|c| c.code == code)
    }
}

impl fmt::Display for NamedLoopReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        Ok(())
    }
}

/// Checks that each named loop exists in `g` with its expected polarity.
pub fn find_named_loops(g: &SignedDigraph) -> NamedLoopReport {
    let checks = NAMED_LOOPS
        .iter()
        .map(|nl| {
            let mut polarity = Polarity::Positive;
            let mut changed = Vec::new();
            let mut status = None;
            for (i, &from) in nl.path.iter().enumerate() {
                let to = nl.path[(i + 1) % nl.path.len()];
                match g.edge(from, to) {
                    None => {
                        status = Some(LoopStatus::Missing {
                            from: from.to_string(),
                            to: to.to_string(),
                        });
                        break;
                    }
                    Some(edge) => {
                        polarity = polarity * edge.polarity;
                        if reference_polarity(from, to) != Some(edge.polarity) {
                            changed.push((from.to_string(), to.to_string(), edge.polarity));
                        }
                    }
                }
            }
            let status = status.unwrap_or(if polarity == nl.polarity {
                LoopStatus::Found(polarity)
            } else {
                LoopStatus::PolarityMismatch {
                    expected: nl.polarity,
                    found: polarity,
                    changed,
                }
            });
            NamedLoopCheck {
                code: nl.code,
                title: nl.title,
                status,
            }
        })
        .collect();
    NamedLoopReport { checks }
}

/// Loop count through the mafia stock reported by the original diagram.
pub const PUBLISHED_MAFIA_LOOP_COUNT: usize = 21;

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str, Polarity)]) -> SignedDigraph {
        let mut g = SignedDigraph::new();
        for &(a, b, p) in edges {
            g.add_edge(a, b, p, "test").unwrap();
        }
        g
    }

    #[test]
    fn two_node_balancing_loop() {
        let g = graph(&[
            ("A", "B", Polarity::Positive),
            ("B", "A", Polarity::Negative),
        ]);
        let loops = enumerate_loops(&g, None);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].polarity, Polarity::Negative);
        assert_eq!(loops[0].nodes, vec!["A", "B"]);
    }

    #[test]
    fn triangle_with_chord() {
        use Polarity::*;
        let g = graph(&[
            ("A", "B", Positive),
            ("B", "C", Positive),
            ("C", "A", Positive),
            ("A", "C", Negative),
        ]);
        let loops = enumerate_loops(&g, None);
        assert_eq!(loops.len(), 2);
        let kinds: Vec<_> = loops.iter().map(|l| l.polarity).collect();
        assert!(kinds.contains(&Positive) && kinds.contains(&Negative));
    }

    #[test]
    fn self_loop_is_a_circuit() {
        let g = graph(&[
            ("A", "A", Polarity::Negative),
            ("A", "B", Polarity::Positive),
        ]);
        let loops = enumerate_loops(&g, None);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].nodes, vec!["A"]);
    }

    #[test]
    fn through_filter() {
        use Polarity::*;
        let g = graph(&[
            ("A", "B", Positive),
            ("B", "A", Positive),
            ("C", "D", Positive),
            ("D", "C", Negative),
        ]);
        assert_eq!(enumerate_loops(&g, Some("C")).len(), 1);
        assert!(enumerate_loops(&g, Some("Z")).is_empty());
    }

    #[test]
    fn model_edge_signs() {
        let g = build_causal_graph();
        assert_eq!(
            g.edge("lambda_A", "pi").unwrap().polarity,
            Polarity::Negative
        );
        assert_eq!(g.edge("R_B", "I_P").unwrap().polarity, Polarity::Negative);
        assert_eq!(
            g.edge("ihat_P", "attractiveness").unwrap().polarity,
            Polarity::Negative
        );
        assert_eq!(
            g.edge("attractiveness", "B_star").unwrap().polarity,
            Polarity::Positive
        );
        assert_eq!(
            g.edge("Bandits", "Peasants").unwrap().polarity,
            Polarity::Negative
        );
        for name in [
            "Peasants",
            "Bandits",
            "Mafia",
            "Y",
            "F",
            "pi",
            "R_B",
            "I_B",
            "i_B",
            "ihat_B",
            "I_P",
            "i_P",
            "ihat_P",
            "attractiveness",
            "B_star",
            "bandit_recruitment",
            "W",
            "L",
            "l",
            "p_M",
            "D_M",
            "mafia_recruitment",
            "lambda_M",
            "m_B",
        ] {
            assert!(g.node_index(name).is_some(), "{name}");
        }
    }

    #[test]
    fn named_loops_present() {
        let report = find_named_loops(&build_causal_graph());
        assert!(report.all_ok(), "{report}");
        assert_eq!(
            report.get("B2").unwrap().status,
            LoopStatus::Found(Polarity::Negative)
        );
    }

    #[test]
    fn removing_mafia_control_breaks_b2() {
        let mut g = build_causal_graph();
        g.remove_edge("lambda_M", "pi").unwrap();
        let report = find_named_loops(&g);
        assert_eq!(
            report.get("B2").unwrap().status,
            LoopStatus::Missing {
                from: "lambda_M".into(),
                to: "pi".into()
            }
        );
        assert!(report.get("R1").unwrap().ok());
    }

    #[test]
    fn flipping_theft_edge_breaks_r3() {
        let mut g = build_causal_graph();
        g.set_polarity("R_B", "I_P", Polarity::Positive).unwrap();
        let report = find_named_loops(&g);
        match &report.get("R3").unwrap().status {
            LoopStatus::PolarityMismatch { changed, .. } => {
                assert_eq!(
                    changed,
                    &vec![("R_B".to_string(), "I_P".to_string(), Polarity::Positive)]
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(report.to_string().contains("edge R_B -> I_P is +"));
    }

    #[test]
    fn named_loops_are_enumerated() {
        let loops = enumerate_loops(&build_causal_graph(), None);
        for nl in NAMED_LOOPS {
            let hit = loops.iter().find(|l| l.name == Some(nl.code)).unwrap();
            assert_eq!(hit.polarity, nl.polarity, "{}", nl.code);
        }
    }

    #[test]
    fn duplicate_edges_rejected() {
        let mut g = SignedDigraph::new();
        g.add_edge("A", "B", Polarity::Positive, "x").unwrap();
        assert!(g.add_edge("A", "B", Polarity::Negative, "y").is_err());
    }

    #[test]
    fn edge_list_format() {
        let g = build_causal_graph();
        let text = g.to_edge_list();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("from,to,polarity,provenance"));
        for line in lines {
            assert_eq!(line.split(',').count(), 4, "{line}");
        }
        assert!(g.to_dot().contains("\"lambda_M\" -> \"pi\" [label=\"-\""));
    }
}
