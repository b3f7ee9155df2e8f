//! Elimination forests and exact treedepth.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::structure::graph::Graph;

pub const TREEDEPTH_VERTEX_CAP: usize = 30;

/// A rooted forest given by parent pointers. It witnesses a graph when every
/// edge joins a vertex to one of its ancestors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationForest {
    parent: Vec<Option<usize>>,
}

impl EliminationForest {
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self> {
        let f = EliminationForest { parent };
        for v in 0..f.len() {
            let mut steps = 0;
            let mut cur = v;
            while let Some(p) = f.parent[cur] {
                if p >= f.len() {
                    return Err(Error::Structure(format!("parent {p} out of range")));
                }
                cur = p;
                steps += 1;
                if steps > f.len() {
                    return Err(Error::Structure("parent pointers contain a cycle".into()));
                }
            }
        }
        Ok(f)
    }

    /// A single root-to-leaf chain visiting `order` top-down.
    pub fn path(order: &[usize]) -> Self {
        let n = order.len();
        let mut parent = vec![None; n];
        for w in order.windows(2) {
            parent[w[1]] = Some(w[0]);
        }
        EliminationForest { parent }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.parent[v].is_none()).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.parent[u] == Some(v)).collect()
    }

    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        d
    }

    /// Largest number of edges on a root-to-leaf path; 0 for an empty forest.
    pub fn height(&self) -> usize {
        (0..self.len()).map(|v| self.depth(v)).max().unwrap_or(0)
    }

    /// `height + 1`, or 0 for the empty forest.
    pub fn treedepth(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.height() + 1
        }
    }

    pub fn is_ancestor(&self, anc: usize, v: usize) -> bool {
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            if p == anc {
                return true;
            }
            cur = p;
        }
        false
    }

    pub fn witnesses(&self, g: &Graph) -> bool {
        g.vertex_count() == self.len()
            && g.edges().iter().all(|&(u, v)| self.is_ancestor(u, v) || self.is_ancestor(v, u))
    }

    /// Root-to-`v` path, root first.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }
}

/// A minimum-height elimination forest, found by exhaustive search over root
/// choices with memoisation on vertex subsets.
pub fn treedepth_decomposition(g: &Graph) -> Result<EliminationForest> {
    let n = g.vertex_count();
    if n > TREEDEPTH_VERTEX_CAP {
        return Err(Error::SizeCap(format!(
            "exact treedepth is limited to {TREEDEPTH_VERTEX_CAP} vertices (got {n}); supply a forest instead"
        )));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let mut search = Search { adj: &adj, memo: HashMap::new() };
    let mut parent = vec![None; n];
    let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
    search.build(all, None, &mut parent);
    EliminationForest::new(parent)
}

struct Search<'a> {
    adj: &'a [u64],
    memo: HashMap<u64, (usize, usize)>,
}

impl Search<'_> {
    fn components(&self, set: u64) -> Vec<u64> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adj[v] & set & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    /// Treedepth of the induced subgraph on `set`.
    fn depth(&mut self, set: u64) -> usize {
        if set == 0 {
            return 0;
        }
        let comps = self.components(set);
        if comps.len() > 1 {
            return comps.into_iter().map(|c| self.depth(c)).max().unwrap_or(0);
        }
        self.connected(set).0
    }

    fn connected(&mut self, set: u64) -> (usize, usize) {
        if let Some(&hit) = self.memo.get(&set) {
            return hit;
        }
        let size = set.count_ones() as usize;
        let mut best = (size, set.trailing_zeros() as usize);
        if size > 1 {
            let edges: u32 = {
                let mut s = set;
                let mut e = 0;
                while s != 0 {
                    let v = s.trailing_zeros() as usize;
                    s &= s - 1;
                    e += (self.adj[v] & set).count_ones();
                }
                e / 2
            };
            let complete = edges as usize == size * (size - 1) / 2;
            if !complete {
                let lower = 2;
                let mut s = set;
                while s != 0 {
                    let v = s.trailing_zeros() as usize;
                    s &= s - 1;
                    let d = 1 + self.depth(set & !(1 << v));
                    if d < best.0 {
                        best = (d, v);
                        if d == lower {
                            break;
                        }
                    }
                }
            }
        }
        self.memo.insert(set, best);
        best
    }

    fn build(&mut self, set: u64, parent: Option<usize>, out: &mut [Option<usize>]) {
        for comp in self.components(set) {
            let (_, root) = self.connected(comp);
            let root = if comp.count_ones() == 1 { comp.trailing_zeros() as usize } else { root };
            out[root] = parent;
            let rest = comp & !(1 << root);
            if rest != 0 {
                self.build(rest, Some(root), out);
            }
        }
    }
}
