use std::collections::BTreeSet;

use num_traits::Zero;

use crate::linalg::IntMatrix;

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![BTreeSet::new(); n] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns.range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    /// Connected components of the subgraph induced by `vertices`.
    pub fn components(&self, vertices: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in vertices {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![s];
            seen.insert(s);
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &u in &self.adj[v] {
                    if vertices.contains(&u) && seen.insert(u) {
                        stack.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

fn clique_graph(vertices: usize, groups: impl Iterator<Item = Vec<usize>>) -> Graph {
    let mut g = Graph::new(vertices);
    for group in groups {
        for (i, &u) in group.iter().enumerate() {
            for &v in &group[i + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Columns as vertices, adjacent when some row is nonzero in both.
pub fn primal_graph(a: &IntMatrix) -> Graph {
    clique_graph(a.cols(), (0..a.rows()).map(|i| a.row_support(i)))
}

/// Rows as vertices, adjacent when some column is nonzero in both.
pub fn dual_graph(a: &IntMatrix) -> Graph {
    clique_graph(a.rows(), (0..a.cols()).map(|j| a.column_support(j)))
}

/// Bipartite graph with columns `0..n` and rows `n..n+m`, one edge per nonzero.
pub fn incidence_graph(a: &IntMatrix) -> Graph {
    let n = a.cols();
    let mut g = Graph::new(n + a.rows());
    for i in 0..a.rows() {
        for j in 0..n {
            if !a.get(i, j).is_zero() {
                g.add_edge(j, n + i);
            }
        }
    }
    g
}
