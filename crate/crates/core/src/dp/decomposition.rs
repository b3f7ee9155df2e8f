//! Tree decompositions and their nice (leaf/introduce/forget/join) form.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::structure::{incidence_graph, EliminationForest, Graph};

/// Graphs up to this many vertices get an exact elimination order.
pub const EXACT_TREEWIDTH_CAP: usize = 16;

/// Bags on a rooted tree; `parent[root] == None` for exactly one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>) -> Result<Self> {
        if bags.is_empty() || bags.len() != parent.len() {
            return Err(Error::Structure("a decomposition needs one parent entry per bag".into()));
        }
        if parent.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(Error::Structure("a decomposition needs exactly one root".into()));
        }
        for v in 0..bags.len() {
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                if p >= bags.len() || steps > bags.len() {
                    return Err(Error::Structure("parent pointers do not form a tree".into()));
                }
                cur = p;
                steps += 1;
            }
        }
        let bags = bags
            .into_iter()
            .map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        Ok(TreeDecomposition { bags, parent })
    }

    /// One bag per vertex holding it and its ancestors; several roots hang
    /// below an extra empty bag.
    pub fn from_forest(forest: &EliminationForest) -> Self {
        let n = forest.len();
        let mut bags: Vec<Vec<usize>> = (0..n).map(|v| sorted(forest.path_to(v))).collect();
        let mut parent: Vec<Option<usize>> = forest.parents().to_vec();
        let roots = forest.roots();
        if roots.len() != 1 {
            bags.push(Vec::new());
            for r in roots {
                parent[r] = Some(n);
            }
            parent.push(None);
        }
        TreeDecomposition { bags, parent }
    }

    /// Decomposition induced by eliminating vertices in `order`.
    pub fn from_elimination_order(g: &Graph, order: &[usize]) -> Result<Self> {
        let n = g.vertex_count();
        if order.len() != n || order.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::Structure("elimination order must be a permutation".into()));
        }
        if n == 0 {
            return Ok(TreeDecomposition { bags: vec![Vec::new()], parent: vec![None] });
        }
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
        let mut bags = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        for (i, &v) in order.iter().enumerate() {
            let later: Vec<usize> = adj[v].iter().copied().filter(|&u| position[u] > i).collect();
            for (k, &x) in later.iter().enumerate() {
                for &y in &later[k + 1..] {
                    adj[x].insert(y);
                    adj[y].insert(x);
                }
            }
            parent[i] = later.iter().map(|&u| position[u]).min();
            let mut bag = later;
            bag.push(v);
            bags.push(sorted(bag));
        }
        let last = n - 1;
        for p in parent.iter_mut().take(last) {
            if p.is_none() {
                *p = Some(last);
            }
        }
        TreeDecomposition::new(bags, parent)
    }

    /// An optimal-width decomposition for small graphs, min-degree otherwise.
    pub fn for_graph(g: &Graph) -> Self {
        let order = if g.vertex_count() <= EXACT_TREEWIDTH_CAP {
            exact_elimination_order(g)
        } else {
            min_degree_order(g)
        };
        TreeDecomposition::from_elimination_order(g, &order).expect("elimination order is a permutation")
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn root(&self) -> usize {
        self.parent.iter().position(Option::is_none).expect("validated")
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parent[c] == Some(node)).collect()
    }

    /// Largest bag size minus one; an all-empty decomposition has width 0.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.vertex_count();
        if let Some(bad) = self.bags.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::Structure(format!("bag mentions vertex {bad} of a {n}-vertex graph")));
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok()) {
                return Err(Error::Structure(format!("edge {u}-{v} is not covered by any bag")));
            }
        }
        for v in 0..n {
            let holders: Vec<usize> = (0..self.len()).filter(|&t| self.bags[t].binary_search(&v).is_ok()).collect();
            if holders.is_empty() {
                return Err(Error::Structure(format!("vertex {v} is in no bag")));
            }
            let tops = holders
                .iter()
                .filter(|&&t| self.parent[t].is_none_or(|p| self.bags[p].binary_search(&v).is_err()))
                .count();
            if tops != 1 {
                return Err(Error::Structure(format!("bags holding vertex {v} are not connected")));
            }
        }
        Ok(())
    }

    /// The explicit nice form, nodes listed children-first, ending in an
    /// empty root bag.
    pub fn nice(&self) -> NiceDecomposition {
        let mut nodes = Vec::new();
        let top = self.nice_subtree(self.root(), &mut nodes);
        let mut cur = top;
        for &v in &self.bags[self.root()] {
            cur = push_forget(&mut nodes, cur, v);
        }
        NiceDecomposition { nodes }
    }

    fn nice_subtree(&self, node: usize, nodes: &mut Vec<NiceNode>) -> usize {
        let target = &self.bags[node];
        let mut tops = Vec::new();
        for child in self.children(node) {
            let mut cur = self.nice_subtree(child, nodes);
            for &v in &self.bags[child] {
                if target.binary_search(&v).is_err() {
                    cur = push_forget(nodes, cur, v);
                }
            }
            cur = introduce_all(nodes, cur, target);
            tops.push(cur);
        }
        if tops.is_empty() {
            nodes.push(NiceNode { kind: NiceKind::Leaf, bag: Vec::new() });
            let leaf = nodes.len() - 1;
            return introduce_all(nodes, leaf, target);
        }
        let mut acc = tops[0];
        for &next in &tops[1..] {
            nodes.push(NiceNode { kind: NiceKind::Join(acc, next), bag: target.clone() });
            acc = nodes.len() - 1;
        }
        acc
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn push_forget(nodes: &mut Vec<NiceNode>, child: usize, v: usize) -> usize {
    let bag: Vec<usize> = nodes[child].bag.iter().copied().filter(|&u| u != v).collect();
    nodes.push(NiceNode { kind: NiceKind::Forget { child, vertex: v }, bag });
    nodes.len() - 1
}

fn introduce_all(nodes: &mut Vec<NiceNode>, mut cur: usize, target: &[usize]) -> usize {
    for &v in target {
        if nodes[cur].bag.binary_search(&v).is_err() {
            let bag = sorted(nodes[cur].bag.iter().copied().chain([v]).collect());
            nodes.push(NiceNode { kind: NiceKind::Introduce { child: cur, vertex: v }, bag });
            cur = nodes.len() - 1;
        }
    }
    cur
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce { child: usize, vertex: usize },
    Forget { child: usize, vertex: usize },
    Join(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
}

impl NiceDecomposition {
    /// Children always precede their parent; the last node is the root.
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    /// Index of the node forgetting each vertex.
    pub fn forget_positions(&self, vertices: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; vertices];
        for (i, node) in self.nodes.iter().enumerate() {
            if let NiceKind::Forget { vertex, .. } = node.kind {
                out[vertex] = Some(i);
            }
        }
        out
    }
}

fn reach_outside(adj: &[u32], eliminated: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut outside = 0u32;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[u] & !seen;
        seen |= fresh;
        outside |= fresh & !eliminated;
        frontier |= fresh & eliminated;
    }
    outside
}

/// Elimination order of minimum width by dynamic programming over the set of
/// already-eliminated vertices.
pub fn exact_elimination_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    assert!(n <= EXACT_TREEWIDTH_CAP, "exact treewidth is limited to {EXACT_TREEWIDTH_CAP} vertices");
    if n == 0 {
        return Vec::new();
    }
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u))).collect();
    let full = (1usize << n) - 1;
    let mut best = vec![i32::MAX; full + 1];
    let mut choice = vec![0u8; full + 1];
    best[0] = -1;
    for set in 1..=full {
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let before = set & !(1 << v);
            let degree = (reach_outside(&adj, before as u32, v) & !(1u32 << v)).count_ones() as i32;
            let cost = best[before].max(degree);
            if cost < best[set] {
                best[set] = cost;
                choice[set] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let v = choice[set] as usize;
        order.push(v);
        set &= !(1 << v);
    }
    order.reverse();
    order
}

pub fn min_degree_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&v) = alive.iter().min_by_key(|&&v| (adj[v].len(), v)) {
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for (k, &x) in ns.iter().enumerate() {
            adj[x].remove(&v);
            for &y in &ns[k + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        alive.remove(&v);
        order.push(v);
    }
    order
}

fn find_holder(td: &TreeDecomposition, support: &[usize]) -> Result<usize> {
    (0..td.len())
        .find(|&t| support.iter().all(|v| td.bags[t].binary_search(v).is_ok()))
        .ok_or_else(|| Error::Structure(format!("no bag holds the clique {support:?}")))
}

/// Incidence decomposition from a primal one: every row gets a leaf copying
/// a bag that holds its support, plus the row vertex `n + i`.
pub fn incidence_from_primal(a: &IntMatrix, primal: &TreeDecomposition) -> Result<TreeDecomposition> {
    let n = a.cols();
    let mut bags = primal.bags.clone();
    let mut parent = primal.parent.clone();
    for i in 0..a.rows() {
        let holder = find_holder(primal, &a.row_support(i))?;
        bags.push(sorted(primal.bags[holder].iter().copied().chain([n + i]).collect()));
        parent.push(Some(holder));
    }
    TreeDecomposition::new(bags, parent)
}

/// Incidence decomposition from a dual one (bags of row indices): rows are
/// renamed to `n + i` and every column gets a leaf.
pub fn incidence_from_dual(a: &IntMatrix, dual: &TreeDecomposition) -> Result<TreeDecomposition> {
    let n = a.cols();
    let renamed: Vec<Vec<usize>> = dual.bags.iter().map(|b| b.iter().map(|&i| n + i).collect()).collect();
    let shifted = TreeDecomposition { bags: renamed, parent: dual.parent.clone() };
    let mut bags = shifted.bags.clone();
    let mut parent = shifted.parent.clone();
    for j in 0..n {
        let support: Vec<usize> = a.column_support(j).into_iter().map(|i| n + i).collect();
        let holder = find_holder(&shifted, &support)?;
        bags.push(sorted(shifted.bags[holder].iter().copied().chain([j]).collect()));
        parent.push(Some(holder));
    }
    TreeDecomposition::new(bags, parent)
}

/// The narrowest of: a direct decomposition of the incidence graph and the
/// ones derived from primal and dual decompositions.
pub fn incidence_decomposition(a: &IntMatrix) -> TreeDecomposition {
    let direct = TreeDecomposition::for_graph(&incidence_graph(a));
    let primal = TreeDecomposition::for_graph(&crate::structure::primal_graph(a));
    let dual = TreeDecomposition::for_graph(&crate::structure::dual_graph(a));
    [incidence_from_primal(a, &primal), incidence_from_dual(a, &dual)]
        .into_iter()
        .flatten()
        .fold(direct, |best, cand| if cand.width() < best.width() { cand } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{dual_graph, primal_graph, treedepth_decomposition};

    fn cycle(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn widths_of_small_graphs() {
        let c = cycle(6);
        let td = TreeDecomposition::for_graph(&c);
        td.validate(&c).unwrap();
        assert_eq!(td.width(), 2);

        let mut k4 = Graph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v);
            }
        }
        assert_eq!(TreeDecomposition::for_graph(&k4).width(), 3);

        let mut grid = Graph::new(9);
        for r in 0..3 {
            for c in 0..3 {
                if c + 1 < 3 {
                    grid.add_edge(3 * r + c, 3 * r + c + 1);
                }
                if r + 1 < 3 {
                    grid.add_edge(3 * r + c, 3 * r + c + 3);
                }
            }
        }
        let td = TreeDecomposition::for_graph(&grid);
        td.validate(&grid).unwrap();
        assert_eq!(td.width(), 3);
    }

    #[test]
    fn disconnected_and_empty_graphs() {
        let g = Graph::new(3);
        let td = TreeDecomposition::for_graph(&g);
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 0);
        let empty = Graph::new(0);
        TreeDecomposition::for_graph(&empty).validate(&empty).unwrap();
    }

    #[test]
    fn invalid_decompositions_are_rejected() {
        let g = cycle(4);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![None, Some(0), Some(1)]).unwrap();
        assert!(td.validate(&g).is_err());
        let split = TreeDecomposition::new(vec![vec![0, 1], vec![2], vec![0]], vec![None, Some(0), Some(1)]).unwrap();
        assert!(split.validate(&Graph::new(3)).is_err());
        assert!(TreeDecomposition::new(vec![vec![0], vec![1]], vec![None, None]).is_err());
    }

    #[test]
    fn forests_give_decompositions() {
        let g = cycle(5);
        let forest = treedepth_decomposition(&g).unwrap();
        let td = TreeDecomposition::from_forest(&forest);
        td.validate(&g).unwrap();
        assert_eq!(td.width() + 1, forest.treedepth());
    }

    #[test]
    fn nice_form_has_one_forget_per_vertex() {
        let g = cycle(5);
        let nice = TreeDecomposition::for_graph(&g).nice();
        let forgets = nice.forget_positions(5);
        assert!(forgets.iter().all(Option::is_some));
        let nodes = nice.nodes();
        assert!(nodes.last().unwrap().bag.is_empty());
        for (i, node) in nodes.iter().enumerate() {
            match node.kind {
                NiceKind::Leaf => assert!(node.bag.is_empty()),
                NiceKind::Introduce { child, vertex } => {
                    assert!(child < i);
                    assert!(!nodes[child].bag.contains(&vertex) && node.bag.contains(&vertex));
                    assert_eq!(node.bag.len(), nodes[child].bag.len() + 1);
                }
                NiceKind::Forget { child, vertex } => {
                    assert!(child < i);
                    assert!(nodes[child].bag.contains(&vertex) && !node.bag.contains(&vertex));
                    assert_eq!(node.bag.len() + 1, nodes[child].bag.len());
                }
                NiceKind::Join(l, r) => {
                    assert!(l < i && r < i);
                    assert_eq!(nodes[l].bag, node.bag);
                    assert_eq!(nodes[r].bag, node.bag);
                }
            }
        }
    }

    #[test]
    fn incidence_conversions_are_valid() {
        let a = IntMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[0, 0, 0, 0]]);
        let inc = incidence_graph(&a);
        let primal = TreeDecomposition::for_graph(&primal_graph(&a));
        let from_primal = incidence_from_primal(&a, &primal).unwrap();
        from_primal.validate(&inc).unwrap();
        assert!(from_primal.width() <= primal.width() + 1);
        let dual = TreeDecomposition::for_graph(&dual_graph(&a));
        let from_dual = incidence_from_dual(&a, &dual).unwrap();
        from_dual.validate(&inc).unwrap();
        assert!(from_dual.width() <= dual.width() + 1);
        incidence_decomposition(&a).validate(&inc).unwrap();
    }
}
