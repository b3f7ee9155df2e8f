//! Multi-stage stochastic and tree-fold matrices: assembly along a shape
//! tree, recognition, detection, and the elimination forests they carry.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::structure::EliminationForest;

/// A rooted tree given by nested child lists; a leaf has no children.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ShapeTree {
    pub children: Vec<ShapeTree>,
}

impl ShapeTree {
    pub fn leaf() -> Self {
        ShapeTree::default()
    }

    pub fn node(children: Vec<ShapeTree>) -> Self {
        ShapeTree { children }
    }

    /// A root with `n` leaf children.
    pub fn star(n: usize) -> Self {
        ShapeTree::node(vec![ShapeTree::leaf(); n])
    }

    /// A chain of `vertices` vertices.
    pub fn path(vertices: usize) -> Self {
        assert!(vertices >= 1, "a path needs a vertex");
        (1..vertices).fold(ShapeTree::leaf(), |t, _| ShapeTree::node(vec![t]))
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(ShapeTree::leaf_count).sum()
        }
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(ShapeTree::vertex_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Whether every leaf is at depth `height`.
    pub fn is_uniform(&self) -> bool {
        fn walk(t: &ShapeTree, depth: usize, target: usize) -> bool {
            if t.is_leaf() {
                depth == target
            } else {
                t.children.iter().all(|c| walk(c, depth + 1, target))
            }
        }
        walk(self, 0, self.height())
    }
}

impl fmt::Display for ShapeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockKind {
    NFold,
    TreeFold,
    MultiStage,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::NFold => "nfold",
            BlockKind::TreeFold => "treefold",
            BlockKind::MultiStage => "multistage",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "nfold" => Ok(BlockKind::NFold),
            "treefold" => Ok(BlockKind::TreeFold),
            "multistage" => Ok(BlockKind::MultiStage),
            other => Err(Error::Parse(format!("unknown block kind {other:?}"))),
        }
    }
}

/// A block-structured matrix together with the data that produced it.
///
/// `bricks` lists column ranges: one per tree vertex in preorder for
/// multi-stage matrices, one per leaf for tree-fold and n-fold matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    kind: BlockKind,
    tree: ShapeTree,
    blocks: Vec<IntMatrix>,
    bricks: Vec<std::ops::Range<usize>>,
    matrix: IntMatrix,
}

impl BlockStructure {
    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn tree(&self) -> &ShapeTree {
        &self.tree
    }

    pub fn blocks(&self) -> &[IntMatrix] {
        &self.blocks
    }

    pub fn bricks(&self) -> &[std::ops::Range<usize>] {
        &self.bricks
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Number of stages, `height + 1`.
    pub fn stages(&self) -> usize {
        self.blocks.len()
    }

    /// Rebuilds from a matrix known to have this kind and shape, reading the
    /// blocks off the first brick chain and checking that reassembly agrees.
    pub fn recognize(kind: BlockKind, tree: &ShapeTree, dims: &[usize], matrix: &IntMatrix) -> Result<Self> {
        let stages = tree.height() + 1;
        if dims.len() != stages {
            return Err(Error::Structure(format!("{} block sizes for a tree with {stages} stages", dims.len())));
        }
        let leaves = tree.leaf_count();
        let blocks: Vec<IntMatrix> = match kind {
            BlockKind::MultiStage => {
                if !matrix.rows().is_multiple_of(leaves) {
                    return Err(Error::Structure("row count is not a multiple of the leaf count".into()));
                }
                let l = matrix.rows() / leaves;
                let mut col = 0;
                let mut out = Vec::new();
                for &ns in dims {
                    if col + ns > matrix.cols() {
                        return Err(Error::Structure("block widths exceed the matrix".into()));
                    }
                    out.push(matrix.submatrix(0, l, col, ns));
                    col += ns;
                }
                out
            }
            BlockKind::TreeFold | BlockKind::NFold => {
                if !matrix.cols().is_multiple_of(leaves) {
                    return Err(Error::Structure("column count is not a multiple of the leaf count".into()));
                }
                let t = matrix.cols() / leaves;
                let mut row = 0;
                let mut out = Vec::new();
                for &rs in dims {
                    if row + rs > matrix.rows() {
                        return Err(Error::Structure("block heights exceed the matrix".into()));
                    }
                    out.push(matrix.submatrix(row, rs, 0, t));
                    row += rs;
                }
                out
            }
        };
        let rebuilt = match kind {
            BlockKind::MultiStage => assemble_multistage(tree, &blocks)?,
            BlockKind::TreeFold => assemble_treefold(tree, &blocks)?,
            BlockKind::NFold => {
                if stages != 2 {
                    return Err(Error::Structure("an n-fold matrix has exactly two stages".into()));
                }
                assemble_nfold(&blocks[0], &blocks[1], leaves)?
            }
        };
        if rebuilt.matrix != *matrix || rebuilt.tree != *tree {
            return Err(Error::Structure(format!("matrix is not {} over tree {tree}", kind.name())));
        }
        Ok(rebuilt)
    }

    /// Block sizes along the stages: columns `n_s` for multi-stage, rows `r_s`
    /// otherwise.
    pub fn dims(&self) -> Vec<usize> {
        match self.kind {
            BlockKind::MultiStage => self.blocks.iter().map(IntMatrix::cols).collect(),
            _ => self.blocks.iter().map(IntMatrix::rows).collect(),
        }
    }

    /// An elimination forest of the primal graph (multi-stage) or the dual
    /// graph (tree-fold, n-fold) following the shape tree: every vertex's
    /// brick becomes a chain hanging below its parent's chain.
    pub fn natural_forest(&self) -> EliminationForest {
        let sizes = self.dims();
        let total = match self.kind {
            BlockKind::MultiStage => self.matrix.cols(),
            _ => self.matrix.rows(),
        };
        let mut parent = vec![None; total];
        let mut next = 0;
        fn walk(t: &ShapeTree, depth: usize, above: Option<usize>, sizes: &[usize], next: &mut usize, parent: &mut [Option<usize>]) {
            let mut last = above;
            for _ in 0..sizes[depth] {
                parent[*next] = last;
                last = Some(*next);
                *next += 1;
            }
            for c in &t.children {
                walk(c, depth + 1, last, sizes, next, parent);
            }
        }
        walk(&self.tree, 0, None, &sizes, &mut next, &mut parent);
        EliminationForest::new(parent).expect("preorder parents are acyclic")
    }
}

fn check_tree(tree: &ShapeTree, blocks: &[IntMatrix]) -> Result<()> {
    if !tree.is_uniform() {
        return Err(Error::Structure(format!("leaves of {tree} are not all at the same depth")));
    }
    if blocks.len() != tree.height() + 1 {
        return Err(Error::Structure(format!(
            "{} blocks for a tree of height {} (need {})",
            blocks.len(),
            tree.height(),
            tree.height() + 1
        )));
    }
    Ok(())
}

fn stack_cols(parts: &[IntMatrix], rows: usize) -> IntMatrix {
    let cols: usize = parts.iter().map(IntMatrix::cols).sum();
    let mut out = IntMatrix::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        out.paste(0, c, p);
        c += p.cols();
    }
    out
}

/// `T^P(B_1, ..., B_tau)`: each row block is `B_s` repeated down the leaves,
/// beside a block diagonal of the children's matrices.
pub fn assemble_multistage(tree: &ShapeTree, blocks: &[IntMatrix]) -> Result<BlockStructure> {
    check_tree(tree, blocks)?;
    let l = blocks[0].rows();
    if let Some(bad) = blocks.iter().find(|b| b.rows() != l) {
        return Err(Error::Structure(format!("multi-stage blocks must share a row count ({l} vs {})", bad.rows())));
    }
    if let Some(bad) = blocks.iter().position(|b| b.cols() == 0) {
        return Err(Error::Structure(format!("block {} has no columns", bad + 1)));
    }
    fn build(t: &ShapeTree, s: usize, blocks: &[IntMatrix], offset: usize, bricks: &mut Vec<std::ops::Range<usize>>) -> IntMatrix {
        let b = &blocks[s];
        bricks.push(offset..offset + b.cols());
        if t.is_leaf() {
            return b.clone();
        }
        let mut col = offset + b.cols();
        let mut subs = Vec::new();
        for c in &t.children {
            let sub = build(c, s + 1, blocks, col, bricks);
            col += sub.cols();
            subs.push(sub);
        }
        let rows: usize = subs.iter().map(IntMatrix::rows).sum();
        let cols = b.cols() + subs.iter().map(IntMatrix::cols).sum::<usize>();
        let mut out = IntMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, b.cols());
        for sub in &subs {
            for k in 0..sub.rows() / b.rows() {
                out.paste(r + k * b.rows(), 0, b);
            }
            out.paste(r, c, sub);
            r += sub.rows();
            c += sub.cols();
        }
        out
    }
    let mut bricks = Vec::new();
    let matrix = build(tree, 0, blocks, 0, &mut bricks);
    Ok(BlockStructure { kind: BlockKind::MultiStage, tree: tree.clone(), blocks: blocks.to_vec(), bricks, matrix })
}

/// `T^D(A_1, ..., A_tau)`: each column block is `A_s` repeated across the
/// leaves, above a block diagonal of the children's matrices.
pub fn assemble_treefold(tree: &ShapeTree, blocks: &[IntMatrix]) -> Result<BlockStructure> {
    check_tree(tree, blocks)?;
    let t = blocks[0].cols();
    if let Some(bad) = blocks.iter().find(|b| b.cols() != t) {
        return Err(Error::Structure(format!("tree-fold blocks must share a column count ({t} vs {})", bad.cols())));
    }
    if let Some(bad) = blocks.iter().position(|b| b.rows() == 0) {
        return Err(Error::Structure(format!("block {} has no rows", bad + 1)));
    }
    fn build(tr: &ShapeTree, s: usize, blocks: &[IntMatrix]) -> IntMatrix {
        let a = &blocks[s];
        if tr.is_leaf() {
            return a.clone();
        }
        let subs: Vec<IntMatrix> = tr.children.iter().map(|c| build(c, s + 1, blocks)).collect();
        let cols: usize = subs.iter().map(IntMatrix::cols).sum();
        let top = stack_cols(&vec![a.clone(); cols / a.cols()], a.rows());
        let rows = a.rows() + subs.iter().map(IntMatrix::rows).sum::<usize>();
        let mut out = IntMatrix::zeros(rows, cols);
        out.paste(0, 0, &top);
        let (mut r, mut c) = (a.rows(), 0);
        for sub in &subs {
            out.paste(r, c, sub);
            r += sub.rows();
            c += sub.cols();
        }
        out
    }
    let matrix = if t == 0 { IntMatrix::zeros(0, 0) } else { build(tree, 0, blocks) };
    let bricks = (0..tree.leaf_count()).map(|i| i * t..(i + 1) * t).collect();
    Ok(BlockStructure { kind: BlockKind::TreeFold, tree: tree.clone(), blocks: blocks.to_vec(), bricks, matrix })
}

/// The n-fold matrix: `A1` repeated across the top, `A2` down the diagonal.
pub fn assemble_nfold(a1: &IntMatrix, a2: &IntMatrix, n: usize) -> Result<BlockStructure> {
    if n == 0 {
        return Err(Error::Structure("an n-fold matrix needs at least one brick".into()));
    }
    let tree = ShapeTree::star(n);
    let mut s = assemble_treefold(&tree, &[a1.clone(), a2.clone()])?;
    s.kind = BlockKind::NFold;
    Ok(s)
}

/// Looks for an n-fold layout with at least two bricks, preferring the most
/// bricks.
pub fn detect_nfold(a: &IntMatrix) -> Option<BlockStructure> {
    let (m, cols) = (a.rows(), a.cols());
    for n in (2..=cols).rev() {
        if cols % n != 0 {
            continue;
        }
        for r in 1..m {
            if (m - r) % n != 0 || m - r == 0 {
                continue;
            }
            let s = (m - r) / n;
            if let Ok(found) = BlockStructure::recognize(BlockKind::NFold, &ShapeTree::star(n), &[r, s], a) {
                return Some(found);
            }
        }
    }
    None
}

/// Two-stage stochastic layout (multi-stage over a star), found as the
/// transpose of an n-fold layout.
pub fn detect_two_stage(a: &IntMatrix) -> Option<BlockStructure> {
    let t = a.transpose();
    let nfold = detect_nfold(&t)?;
    let b1 = nfold.blocks()[0].transpose();
    let b2 = nfold.blocks()[1].transpose();
    let found = assemble_multistage(nfold.tree(), &[b1, b2]).ok()?;
    (found.matrix() == a).then_some(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{dual_graph, primal_graph};

    fn two_level_tree() -> ShapeTree {
        ShapeTree::node(vec![ShapeTree::star(2), ShapeTree::star(3)])
    }

    fn blocks3() -> Vec<IntMatrix> {
        vec![
            IntMatrix::from_i64(&[&[1]]),
            IntMatrix::from_i64(&[&[2]]),
            IntMatrix::from_i64(&[&[3]]),
        ]
    }

    #[test]
    fn worked_example_has_eight_bricks() {
        let s = assemble_multistage(&two_level_tree(), &blocks3()).unwrap();
        assert_eq!(s.bricks().len(), 8);
        let expected = IntMatrix::from_i64(&[
            &[1, 2, 3, 0, 0, 0, 0, 0],
            &[1, 2, 0, 3, 0, 0, 0, 0],
            &[1, 0, 0, 0, 2, 3, 0, 0],
            &[1, 0, 0, 0, 2, 0, 3, 0],
            &[1, 0, 0, 0, 2, 0, 0, 3],
        ]);
        assert_eq!(s.matrix(), &expected);
    }

    #[test]
    fn treefold_is_the_transposed_shape() {
        let t = assemble_treefold(&two_level_tree(), &blocks3()).unwrap();
        let p = assemble_multistage(&two_level_tree(), &blocks3()).unwrap();
        assert_eq!(t.matrix().rows(), 8);
        assert_eq!(t.matrix().cols(), 5);
        assert_eq!(t.matrix(), &p.matrix().transpose());
        assert_eq!(t.bricks().len(), 5);
    }

    #[test]
    fn star_gives_nfold() {
        let a1 = IntMatrix::from_i64(&[&[1, 1]]);
        let a2 = IntMatrix::from_i64(&[&[1, -1]]);
        let s = assemble_nfold(&a1, &a2, 3).unwrap();
        let expected = IntMatrix::from_i64(&[
            &[1, 1, 1, 1, 1, 1],
            &[1, -1, 0, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 0, 1, -1],
        ]);
        assert_eq!(s.matrix(), &expected);
        let found = detect_nfold(&expected).unwrap();
        assert_eq!(found.blocks(), &[a1, a2]);
        assert_eq!(found.tree().leaf_count(), 3);
    }

    #[test]
    fn single_leaf_chains_unroll() {
        let path = ShapeTree::path(3);
        let p = assemble_multistage(&path, &blocks3()).unwrap();
        assert_eq!(p.matrix(), &IntMatrix::from_i64(&[&[1, 2, 3]]));
        let t = assemble_treefold(&path, &blocks3()).unwrap();
        assert_eq!(t.matrix(), &IntMatrix::from_i64(&[&[1], &[2], &[3]]));
    }

    #[test]
    fn recognition_round_trips() {
        let blocks = vec![
            IntMatrix::from_i64(&[&[1, -1], &[0, 2]]),
            IntMatrix::from_i64(&[&[2], &[1]]),
            IntMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1]]),
        ];
        let s = assemble_multistage(&two_level_tree(), &blocks).unwrap();
        let back = BlockStructure::recognize(BlockKind::MultiStage, &two_level_tree(), &s.dims(), s.matrix()).unwrap();
        assert_eq!(back.blocks(), &blocks[..]);
        assert_eq!(back, s);
        let tblocks = vec![
            IntMatrix::from_i64(&[&[1, 0], &[-1, 2]]),
            IntMatrix::from_i64(&[&[1, 0]]),
            IntMatrix::from_i64(&[&[0, 1]]),
        ];
        let t = assemble_treefold(&two_level_tree(), &tblocks).unwrap();
        let back = BlockStructure::recognize(BlockKind::TreeFold, &two_level_tree(), &t.dims(), t.matrix()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_input_is_rejected() {
        let ragged = ShapeTree::node(vec![ShapeTree::leaf(), ShapeTree::star(2)]);
        assert!(assemble_multistage(&ragged, &blocks3()).is_err());
        let wide = vec![IntMatrix::from_i64(&[&[1]]), IntMatrix::from_i64(&[&[1], &[1]])];
        assert!(assemble_multistage(&ShapeTree::star(2), &wide).is_err());
        assert!(assemble_treefold(&ShapeTree::star(2), &blocks3()).is_err());
    }

    #[test]
    fn natural_forests_witness_and_bound_depth() {
        let blocks = vec![
            IntMatrix::from_i64(&[&[1, -1], &[0, 2]]),
            IntMatrix::from_i64(&[&[2], &[1]]),
            IntMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1]]),
        ];
        let p = assemble_multistage(&two_level_tree(), &blocks).unwrap();
        let f = p.natural_forest();
        assert!(f.witnesses(&primal_graph(p.matrix())));
        assert!(f.treedepth() <= 2 + 1 + 3 + 1);

        let tblocks = vec![IntMatrix::from_i64(&[&[1, 1]]), IntMatrix::from_i64(&[&[1, -1], &[2, 0]])];
        let t = assemble_treefold(&ShapeTree::star(3), &tblocks).unwrap();
        let f = t.natural_forest();
        assert!(f.witnesses(&dual_graph(t.matrix())));
        assert!(f.treedepth() <= 1 + 2 + 1);
    }

    #[test]
    fn two_stage_detection() {
        let s = assemble_multistage(&ShapeTree::star(3), &[IntMatrix::from_i64(&[&[1, 2]]), IntMatrix::from_i64(&[&[1, -1]])]).unwrap();
        let found = detect_two_stage(s.matrix()).unwrap();
        assert_eq!(found.matrix(), s.matrix());
        assert!(detect_nfold(&IntMatrix::from_i64(&[&[1, 2, 3]])).is_none());
    }
}
