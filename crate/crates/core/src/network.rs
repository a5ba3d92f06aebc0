//! Undirected Erdős–Rényi graphs and the social-tie density that scales the
//! mutation term.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::rng::stream_rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("edge probability {0} must lie in [0, 1]")]
    Probability(f64),
    #[error("graph needs at least {need} nodes, has {have}")]
    TooFewNodes { need: usize, have: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Simple undirected graph kept both as a sorted edge list and as an
/// adjacency list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_sorted_unique(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_unique(n, (1..n).map(|j| (j - 1, j)).collect())
    }

    /// Builds a graph from unordered pairs. Each pair is normalized to
    /// `(min, max)` and the list sorted.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, NetworkError> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(NetworkError::NodeOutOfRange(a, b, n));
            }
            if a == b {
                return Err(NetworkError::SelfLoop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(NetworkError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let adjacency = adjacency_from_edges(n, &edges);
        Self { n, edges, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// `"n m"` followed by one `"i j"` line per edge, `i < j`, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + 12 * self.edges.len());
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for (i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, NetworkError> {
        let parse_err = |line: usize, msg: &str| NetworkError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let pair = |line: usize, s: &str| -> Result<(usize, usize), NetworkError> {
            let mut it = s.split_whitespace();
            let mut next = || {
                it.next()
                    .ok_or_else(|| parse_err(line, "expected two integers"))?
                    .parse::<usize>()
                    .map_err(|e| parse_err(line, &e.to_string()))
            };
            let v = (next()?, next()?);
            if it.next().is_some() {
                return Err(parse_err(line, "trailing tokens"));
            }
            Ok(v)
        };
        let (n, m) = pair(1, header)?;
        let mut edges = Vec::with_capacity(m);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            edges.push(pair(idx + 1, line)?);
        }
        if edges.len() != m {
            return Err(parse_err(1, &format!("header declares {m} edges, found {}", edges.len())));
        }
        Self::from_edges(n, edges)
    }
}

/// Rebuilds adjacency from an edge list; neighbor lists are ascending.
pub fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub nodes: usize,
    pub edge_prob: f64,
    pub seed: u64,
}

impl GraphParams {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return Err(NetworkError::Probability(self.edge_prob));
        }
        if self.nodes == 0 {
            return Err(NetworkError::TooFewNodes { need: 1, have: 0 });
        }
        Ok(())
    }
}

/// G(n, p): each pair `(i, j)`, `i < j`, visited in ascending order, is kept
/// with probability `p`.
pub fn generate_er(gp: &GraphParams) -> Result<Graph, NetworkError> {
    gp.validate()?;
    let mut rng = stream_rng(gp.seed, 0);
    let n = gp.nodes;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < gp.edge_prob {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_sorted_unique(n, edges))
}

pub fn degree_sum(g: &Graph) -> usize {
    g.adjacency.iter().map(Vec::len).sum()
}

/// Breadth-first reachability from node 0.
pub fn is_connected(g: &Graph) -> bool {
    if g.n == 0 {
        return true;
    }
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &g.adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == g.n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityConvention {
    /// `((2 t) / n) / (n (n - 1) / 2)` with `t = 2 |E|`.
    TieFactor,
    /// `2 |E| / (n (n - 1))`.
    StandardDensity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density {
    pub value: f64,
    /// The raw factor exceeded 1 and was clipped.
    pub clipped: bool,
}

pub fn density_factor(g: &Graph, convention: DensityConvention) -> Result<Density, NetworkError> {
    if g.n < 2 {
        return Err(NetworkError::TooFewNodes { need: 2, have: g.n });
    }
    let n = g.n as f64;
    let m = g.edge_count() as f64;
    let potential = n * (n - 1.0) / 2.0;
    let raw = match convention {
        DensityConvention::StandardDensity => m / potential,
        DensityConvention::TieFactor => {
            let ties = 2.0 * m;
            (2.0 * ties / n) / potential
        }
    };
    Ok(Density {
        value: raw.min(1.0),
        clipped: raw > 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handshake_small_graphs() {
        let tri = Graph::complete(3);
        assert_eq!(degree_sum(&tri), 6);
        assert_eq!(degree_sum(&Graph::empty(4)), 0);
    }

    #[test]
    fn connectivity_cases() {
        assert!(is_connected(&Graph::empty(1)));
        assert!(!is_connected(&Graph::empty(2)));
        assert!(is_connected(&Graph::path(3)));
        let two_parts = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!is_connected(&two_parts));
    }

    #[test]
    fn density_conventions() {
        let k5 = Graph::complete(5);
        let std = density_factor(&k5, DensityConvention::StandardDensity).unwrap();
        assert_eq!(std.value, 1.0);
        let ties = density_factor(&k5, DensityConvention::TieFactor).unwrap();
        assert!((ties.value - 0.8).abs() < 1e-15);
        assert!(!ties.clipped);
        for conv in [DensityConvention::TieFactor, DensityConvention::StandardDensity] {
            assert_eq!(density_factor(&Graph::empty(5), conv).unwrap().value, 0.0);
        }
        assert!(density_factor(&Graph::empty(1), DensityConvention::StandardDensity).is_err());
    }

    #[test]
    fn tie_factor_clips_on_tiny_graphs() {
        // n = 2, one edge: ((2 * 2) / 2) / 1 = 2
        let g = Graph::complete(2);
        let d = density_factor(&g, DensityConvention::TieFactor).unwrap();
        assert_eq!(d.value, 1.0);
        assert!(d.clipped);
    }

    #[test]
    fn extreme_probabilities() {
        let gp = |p| GraphParams { nodes: 100, edge_prob: p, seed: 7 };
        assert_eq!(generate_er(&gp(0.0)).unwrap().edge_count(), 0);
        assert_eq!(generate_er(&gp(1.0)).unwrap().edge_count(), 4950);
        assert!(generate_er(&gp(1.5)).is_err());
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(NetworkError::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(NetworkError::DuplicateEdge(0, 1))
        );
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn edge_list_text_roundtrip() {
        let g = generate_er(&GraphParams { nodes: 30, edge_prob: 0.2, seed: 11 }).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with(&format!("30 {}\n", g.edge_count())));
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n0 x\n").is_err());
    }
}
