//! Extended formulations of programs with a small elimination forest: the
//! primal embedding produces a multi-stage stochastic program, the dual one
//! a tree-fold program.
//!
//! Both cut the forest into segments, ending each segment at a branching
//! vertex or a leaf. Every segment is padded at its top with dummy vertices
//! to the common length `L`, and short root-leaf paths are extended below
//! their leaf by all-dummy segments, so every path has `S` segments. The
//! segments form the shape tree. A dummy root is added when the forest has
//! several roots.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ilp::{ExtInt, Instance};
use crate::linalg::{row_reduce, IntMatrix};
use crate::structure::blocks::{assemble_multistage, assemble_treefold, BlockStructure, ShapeTree};
use crate::structure::{dual_graph, primal_graph, EliminationForest};

/// Strict primal mode materializes every pattern row only up to this many.
pub const STRICT_PATTERN_CAP: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EmbedMode {
    /// Only pattern rows that carry an original constraint.
    #[default]
    Lazy,
    /// Every pattern row with entries in `[-a, a]`.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingResult {
    pub instance: Instance,
    pub structure: BlockStructure,
    /// Column of the extended program holding each original variable.
    pub var_map: Vec<usize>,
    /// An extended row enforcing each original row.
    pub row_map: Vec<usize>,
    /// Segment length `L`.
    pub segment_len: usize,
    /// Segments per root-leaf path `S`.
    pub depth: usize,
}

impl EmbeddingResult {
    /// Whether `x` extends to a feasible point. Every extended variable not in
    /// the image of `var_map` must be pinned by `l = u` or determined
    /// uniquely by the equations.
    pub fn extends(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.lift(x)?.is_some())
    }

    /// The feasible extension of `x`, under the same determinacy rule as
    /// [`EmbeddingResult::extends`].
    pub fn lift(&self, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        self.lifter()?.lift(x)
    }

    /// Eliminates the free extended variables once, so that many points can
    /// be lifted by a matrix-vector product each.
    pub fn lifter(&self) -> Result<Lifter<'_>> {
        let inst = &self.instance;
        let n = inst.n();
        let mut pinned: Vec<Option<BigInt>> = vec![None; n];
        let mut mapped = vec![false; n];
        for &col in &self.var_map {
            mapped[col] = true;
        }
        for col in 0..n {
            if mapped[col] {
                continue;
            }
            if let (Some(lo), Some(hi)) = (inst.l()[col].finite(), inst.u()[col].finite()) {
                if lo == hi {
                    pinned[col] = Some(lo.clone());
                }
            }
        }
        let unknown: Vec<usize> = (0..n).filter(|&c| !mapped[c] && pinned[c].is_none()).collect();
        let (m, k) = (inst.m(), unknown.len());
        let a = inst.a();
        let mut rows: Vec<Vec<BigRational>> = (0..m)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    unknown.iter().map(|&c| BigRational::from_integer(a.get(i, c).clone())).collect();
                row.extend((0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        let pivots = row_reduce(&mut rows, k);
        if pivots.len() < k {
            return Err(Error::Invalid("extension is not determined by the fixed variables".into()));
        }
        let transform = rows.into_iter().map(|r| r[k..].to_vec()).collect();
        Ok(Lifter { result: self, pinned, unknown, pivots, transform })
    }
}

/// The eliminated system behind [`EmbeddingResult::lift`].
pub struct Lifter<'a> {
    result: &'a EmbeddingResult,
    pinned: Vec<Option<BigInt>>,
    unknown: Vec<usize>,
    pivots: Vec<usize>,
    /// Row operations bringing the free columns to reduced echelon form.
    transform: Vec<Vec<BigRational>>,
}

impl Lifter<'_> {
    pub fn lift(&self, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let emb = self.result;
        let inst = &emb.instance;
        if x.len() != emb.var_map.len() {
            return Err(Error::Dimension(format!("point of length {} for {} variables", x.len(), emb.var_map.len())));
        }
        let mut full: Vec<BigInt> = self.pinned.iter().map(|v| v.clone().unwrap_or_default()).collect();
        for (j, &col) in emb.var_map.iter().enumerate() {
            full[col] = x[j].clone();
        }
        let a = inst.a();
        let rest: Vec<BigRational> = (0..inst.m())
            .map(|i| {
                let mut r = inst.b()[i].clone();
                for (c, v) in full.iter().enumerate() {
                    if !v.is_zero() {
                        r -= a.get(i, c) * v;
                    }
                }
                BigRational::from_integer(r)
            })
            .collect();
        let reduced = |row: &[BigRational]| -> BigRational {
            row.iter().zip(&rest).filter(|(t, _)| !t.is_zero()).map(|(t, r)| t * r).sum()
        };
        if self.transform[self.pivots.len()..].iter().any(|row| !reduced(row).is_zero()) {
            return Ok(None);
        }
        for (row, &p) in self.transform.iter().zip(&self.pivots) {
            let v = reduced(row);
            if !v.is_integer() {
                return Ok(None);
            }
            full[self.unknown[p]] = v.to_integer();
        }
        Ok(inst.is_feasible(&full)?.then_some(full))
    }
}

struct Segmented {
    /// Preorder; each slot holds an original vertex or a dummy.
    slots: Vec<Vec<Option<usize>>>,
    tree: ShapeTree,
    /// Per leaf in preorder: the segments from the root down.
    leaf_paths: Vec<Vec<usize>>,
    len: usize,
    depth: usize,
}

impl Segmented {
    fn new(forest: &EliminationForest) -> Result<Self> {
        if forest.is_empty() {
            return Err(Error::Invalid("cannot embed an empty forest".into()));
        }
        struct Raw {
            chain: Vec<Option<usize>>,
            children: Vec<Raw>,
        }
        fn chain_from(forest: &EliminationForest, start: usize) -> Raw {
            let mut chain = vec![Some(start)];
            let mut cur = start;
            loop {
                let kids = forest.children(cur);
                if kids.len() == 1 {
                    cur = kids[0];
                    chain.push(Some(cur));
                } else {
                    let children = kids.into_iter().map(|c| chain_from(forest, c)).collect();
                    return Raw { chain, children };
                }
            }
        }
        let roots = forest.roots();
        let raw = if roots.len() == 1 {
            chain_from(forest, roots[0])
        } else {
            Raw { chain: vec![None], children: roots.into_iter().map(|r| chain_from(forest, r)).collect() }
        };
        fn measure(r: &Raw) -> (usize, usize) {
            let below = r.children.iter().map(measure).fold((0, 0), |acc, m| (acc.0.max(m.0), acc.1.max(m.1)));
            (r.chain.len().max(below.0), 1 + below.1)
        }
        let (len, depth) = measure(&raw);
        let mut out = Segmented { slots: Vec::new(), tree: ShapeTree::leaf(), leaf_paths: Vec::new(), len, depth };
        fn emit(r: &Raw, level: usize, path: &mut Vec<usize>, out: &mut Segmented) -> ShapeTree {
            let mut padded = vec![None; out.len - r.chain.len()];
            padded.extend(r.chain.iter().copied());
            out.slots.push(padded);
            path.push(out.slots.len() - 1);
            let tree = if r.children.is_empty() {
                let mut tail = Vec::new();
                for _ in level + 1..out.depth {
                    out.slots.push(vec![None; out.len]);
                    tail.push(out.slots.len() - 1);
                }
                path.extend(&tail);
                out.leaf_paths.push(path.clone());
                path.truncate(path.len() - tail.len());
                ShapeTree::path(tail.len() + 1)
            } else {
                ShapeTree::node(r.children.iter().map(|c| emit(c, level + 1, path, out)).collect())
            };
            path.pop();
            tree
        }
        out.tree = emit(&raw, 0, &mut Vec::new(), &mut out);
        Ok(out)
    }

    /// Position of each original vertex along any root-leaf path through it.
    fn positions(&self, count: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; count];
        let mut seen = BTreeSet::new();
        for path in &self.leaf_paths {
            for (d, &seg) in path.iter().enumerate() {
                if seen.insert(seg) {
                    for (k, slot) in self.slots[seg].iter().enumerate() {
                        if let Some(v) = slot {
                            pos[*v] = d * self.len + k;
                        }
                    }
                }
            }
        }
        pos
    }

    /// Leaves (preorder indices) whose path holds every vertex of `support`.
    fn leaves_holding(&self, support: &[usize]) -> Vec<usize> {
        let mut owner = BTreeMap::new();
        for (seg, slots) in self.slots.iter().enumerate() {
            for v in slots.iter().flatten() {
                owner.insert(*v, seg);
            }
        }
        (0..self.leaf_paths.len())
            .filter(|&k| support.iter().all(|v| self.leaf_paths[k].contains(&owner[v])))
            .collect()
    }

    fn pattern(&self, positions: &[usize], entries: impl Iterator<Item = (usize, BigInt)>) -> Vec<BigInt> {
        let mut p = vec![BigInt::zero(); self.len * self.depth];
        for (v, val) in entries {
            p[positions[v]] = val;
        }
        p
    }

    fn stage_blocks(&self, patterns: &[Vec<BigInt>], rows_are_patterns: bool) -> Vec<IntMatrix> {
        let full = IntMatrix::from_rows_with_cols(patterns.to_vec(), self.len * self.depth).expect("patterns share a width");
        let full = if rows_are_patterns { full } else { full.transpose() };
        (0..self.depth)
            .map(|s| {
                if rows_are_patterns {
                    full.submatrix(0, full.rows(), s * self.len, self.len)
                } else {
                    full.submatrix(s * self.len, self.len, 0, full.cols())
                }
            })
            .collect()
    }
}

fn all_patterns(width: usize, a: &BigInt) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for _ in 0..width {
        let mut next = Vec::new();
        for p in &out {
            let mut v = -a;
            while &v <= a {
                let mut q = p.clone();
                q.push(v.clone());
                next.push(q);
                v += 1;
            }
        }
        out = next;
    }
    out
}

/// Multi-stage stochastic extended formulation from an elimination forest of
/// the primal graph.
pub fn embed_primal_td(inst: &Instance, forest: &EliminationForest, mode: EmbedMode) -> Result<EmbeddingResult> {
    let a = inst.a();
    if !forest.witnesses(&primal_graph(a)) {
        return Err(Error::Structure("forest does not witness the primal graph".into()));
    }
    let seg = Segmented::new(forest)?;
    let pos = seg.positions(inst.n());
    let width = seg.len * seg.depth;
    let row_patterns: Vec<Vec<BigInt>> = (0..inst.m())
        .map(|i| seg.pattern(&pos, a.row_support(i).into_iter().map(|j| (j, a.get(i, j).clone()))))
        .collect();
    let patterns: Vec<Vec<BigInt>> = match mode {
        EmbedMode::Lazy => row_patterns.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
        EmbedMode::Strict => {
            let count: BigInt = (BigInt::from(2) * a.norm_inf() + 1u32).pow(width as u32);
            if count > BigInt::from(STRICT_PATTERN_CAP) {
                return Err(Error::SizeCap(format!("{count} pattern rows exceed the strict cap {STRICT_PATTERN_CAP}")));
            }
            all_patterns(width, &a.norm_inf())
        }
    };
    let patterns = if patterns.is_empty() { vec![vec![BigInt::zero(); width]] } else { patterns };
    let rows_per_leaf = patterns.len();
    let index: BTreeMap<&Vec<BigInt>, usize> = patterns.iter().enumerate().map(|(i, p)| (p, i)).collect();

    let mut blocks = seg.stage_blocks(&patterns, true);
    let last = blocks.pop().expect("at least one stage");
    let mut with_slack = IntMatrix::zeros(rows_per_leaf, seg.len + rows_per_leaf);
    with_slack.paste(0, 0, &last);
    with_slack.paste(0, seg.len, &IntMatrix::identity(rows_per_leaf));
    blocks.push(with_slack);
    let structure = assemble_multistage(&seg.tree, &blocks)?;
    let cols = structure.matrix().cols();
    let brick_start: Vec<usize> = structure.bricks().iter().map(|r| r.start).collect();

    let zero = ExtInt::Finite(BigInt::zero());
    let mut l = vec![zero.clone(); cols];
    let mut u = vec![zero.clone(); cols];
    let mut w = vec![BigInt::zero(); cols];
    let mut var_map = vec![0; inst.n()];
    for (s, slots) in seg.slots.iter().enumerate() {
        for (k, slot) in slots.iter().enumerate() {
            if let Some(v) = slot {
                let c = brick_start[s] + k;
                var_map[*v] = c;
                l[c] = inst.l()[*v].clone();
                u[c] = inst.u()[*v].clone();
                w[c] = inst.w()[*v].clone();
            }
        }
    }
    let leaf_brick: Vec<usize> = seg.leaf_paths.iter().map(|p| brick_start[*p.last().expect("nonempty path")]).collect();
    let mut b = vec![BigInt::zero(); structure.matrix().rows()];
    let mut assigned: Vec<Option<BigInt>> = vec![None; b.len()];
    let mut row_map = Vec::with_capacity(inst.m());
    for (i, pattern) in row_patterns.iter().enumerate() {
        let u_idx = index[pattern];
        let holders = seg.leaves_holding(&a.row_support(i));
        row_map.push(holders[0] * rows_per_leaf + u_idx);
        for leaf in holders {
            let row = leaf * rows_per_leaf + u_idx;
            let slack = leaf_brick[leaf] + seg.len + u_idx;
            match &assigned[row] {
                Some(beta) if *beta != inst.b()[i] => {
                    l[slack] = ExtInt::Finite(BigInt::one());
                    u[slack] = zero.clone();
                }
                _ => {
                    assigned[row] = Some(inst.b()[i].clone());
                    b[row] = inst.b()[i].clone();
                }
            }
        }
    }
    for (leaf, &start) in leaf_brick.iter().enumerate() {
        for p in 0..rows_per_leaf {
            if assigned[leaf * rows_per_leaf + p].is_none() {
                l[start + seg.len + p] = ExtInt::NegInf;
                u[start + seg.len + p] = ExtInt::PosInf;
            }
        }
    }
    let instance = Instance::new(structure.matrix().clone(), b, w, l, u)?;
    Ok(EmbeddingResult { instance, structure, var_map, row_map, segment_len: seg.len, depth: seg.depth })
}

/// Tree-fold extended formulation from an elimination forest of the dual
/// graph (vertices are rows).
pub fn embed_dual_td(inst: &Instance, forest: &EliminationForest) -> Result<EmbeddingResult> {
    let a = inst.a();
    if !forest.witnesses(&dual_graph(a)) {
        return Err(Error::Structure("forest does not witness the dual graph".into()));
    }
    let seg = Segmented::new(forest)?;
    let pos = seg.positions(inst.m());
    let width = seg.len * seg.depth;
    let mut owner = Vec::with_capacity(inst.n());
    let mut col_patterns = Vec::with_capacity(inst.n());
    for j in 0..inst.n() {
        let support = a.column_support(j);
        let leaf = *seg
            .leaves_holding(&support)
            .first()
            .ok_or_else(|| Error::Structure(format!("column {j} is not on a root-leaf path")))?;
        owner.push(leaf);
        col_patterns.push(seg.pattern(&pos, support.into_iter().map(|i| (i, a.get(i, j).clone()))));
    }
    let mut multiplicity: BTreeMap<&Vec<BigInt>, usize> = BTreeMap::new();
    for leaf in 0..seg.leaf_paths.len() {
        let mut counts: BTreeMap<&Vec<BigInt>, usize> = BTreeMap::new();
        for j in (0..inst.n()).filter(|&j| owner[j] == leaf) {
            *counts.entry(&col_patterns[j]).or_default() += 1;
        }
        for (p, c) in counts {
            let e = multiplicity.entry(p).or_default();
            *e = (*e).max(c);
        }
    }
    let mut universal = Vec::new();
    let mut first_copy = BTreeMap::new();
    for (p, &count) in &multiplicity {
        first_copy.insert(*p, universal.len());
        universal.extend(std::iter::repeat_n((*p).clone(), count));
    }
    if universal.is_empty() {
        universal.push(vec![BigInt::zero(); width]);
    }
    let t = universal.len();
    let blocks = seg.stage_blocks(&universal, false);
    let structure = assemble_treefold(&seg.tree, &blocks)?;
    let cols = structure.matrix().cols();

    let zero = ExtInt::Finite(BigInt::zero());
    let mut l = vec![zero.clone(); cols];
    let mut u = vec![zero; cols];
    let mut w = vec![BigInt::zero(); cols];
    let mut used: BTreeMap<(usize, &Vec<BigInt>), usize> = BTreeMap::new();
    let mut var_map = Vec::with_capacity(inst.n());
    for j in 0..inst.n() {
        let slot = used.entry((owner[j], &col_patterns[j])).or_default();
        let c = owner[j] * t + first_copy[&col_patterns[j]] + *slot;
        *slot += 1;
        var_map.push(c);
        l[c] = inst.l()[j].clone();
        u[c] = inst.u()[j].clone();
        w[c] = inst.w()[j].clone();
    }
    let mut b = vec![BigInt::zero(); structure.matrix().rows()];
    let mut row_map = vec![0; inst.m()];
    for (s, slots) in seg.slots.iter().enumerate() {
        for (k, slot) in slots.iter().enumerate() {
            if let Some(i) = slot {
                b[s * seg.len + k] = inst.b()[*i].clone();
                row_map[*i] = s * seg.len + k;
            }
        }
    }
    let instance = Instance::new(structure.matrix().clone(), b, w, l, u)?;
    Ok(EmbeddingResult { instance, structure, var_map, row_map, segment_len: seg.len, depth: seg.depth })
}

/// Whether `x` lies in the first set exactly when it lies in the projection
/// of the second, for every `x` in the box.
pub fn projection_matches(original: &Instance, emb: &EmbeddingResult, bbox: &[(BigInt, BigInt)]) -> Result<bool> {
    if bbox.len() != original.n() {
        return Err(Error::Dimension("box does not match the variable count".into()));
    }
    let mut x: Vec<BigInt> = bbox.iter().map(|(lo, _)| lo.clone()).collect();
    if bbox.iter().any(|(lo, hi)| lo > hi) {
        return Ok(true);
    }
    let lifter = emb.lifter()?;
    loop {
        if original.is_feasible(&x)? != lifter.lift(&x)?.is_some() {
            return Ok(false);
        }
        let mut k = 0;
        loop {
            if k == x.len() {
                return Ok(true);
            }
            if x[k] < bbox[k].1 {
                x[k] += 1;
                break;
            }
            x[k] = bbox[k].0.clone();
            k += 1;
        }
    }
}

/// `max(2, |A|_inf)`.
pub fn entry_bound(a: &IntMatrix) -> BigInt {
    std::cmp::max(BigInt::from(2), a.norm_inf().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_bigints;
    use crate::structure::treedepth_decomposition;

    fn fin(v: &[i64]) -> Vec<ExtInt> {
        v.iter().map(|&x| ExtInt::Finite(x.into())).collect()
    }

    fn cube(n: usize, lo: i64, hi: i64) -> Vec<(BigInt, BigInt)> {
        vec![(lo.into(), hi.into()); n]
    }

    #[test]
    fn single_row_on_a_path() {
        let inst = Instance::new(IntMatrix::from_i64(&[&[1, 1]]), to_bigints(&[2]), to_bigints(&[0, 1]), fin(&[0, 0]), fin(&[2, 2])).unwrap();
        let forest = EliminationForest::path(&[0, 1]);
        for mode in [EmbedMode::Lazy, EmbedMode::Strict] {
            let emb = embed_primal_td(&inst, &forest, mode).unwrap();
            assert_eq!(emb.structure.tree().leaf_count(), 1);
            assert!(projection_matches(&inst, &emb, &cube(2, -1, 3)).unwrap());
        }
    }

    #[test]
    fn branching_forest_primal() {
        let a = IntMatrix::from_i64(&[&[1, 1, 0, 0], &[1, 0, 2, 0], &[1, 0, 0, -1], &[0, 0, 1, 1]]);
        let inst = Instance::new(a.clone(), to_bigints(&[1, 2, 0, 1]), to_bigints(&[1, 0, 0, 1]), fin(&[-2; 4]), fin(&[2; 4])).unwrap();
        let forest = treedepth_decomposition(&primal_graph(&a)).unwrap();
        let emb = embed_primal_td(&inst, &forest, EmbedMode::Lazy).unwrap();
        assert!(projection_matches(&inst, &emb, &cube(4, -2, 2)).unwrap());
        for i in 0..4 {
            let row = emb.instance.a().row(emb.row_map[i]);
            for j in 0..4 {
                assert_eq!(&row[emb.var_map[j]], a.get(i, j));
            }
        }
        assert!(emb.structure.blocks()[0].rows() <= 4);
        let (l, s) = (emb.segment_len, emb.depth);
        assert!(emb.structure.bricks().len() * l <= (inst.n() + 1) * l * s);
    }

    #[test]
    fn conflicting_rows_stay_infeasible() {
        let a = IntMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        let inst = Instance::new(a, to_bigints(&[1, 2]), to_bigints(&[0, 0]), fin(&[-2, -2]), fin(&[2, 2])).unwrap();
        let emb = embed_primal_td(&inst, &EliminationForest::path(&[0, 1]), EmbedMode::Lazy).unwrap();
        assert!(projection_matches(&inst, &emb, &cube(2, -2, 2)).unwrap());
    }

    #[test]
    fn identical_rows_dual() {
        let a = IntMatrix::from_i64(&[&[1], &[1]]);
        let inst = Instance::new(a, to_bigints(&[1, 1]), to_bigints(&[0]), fin(&[-3]), fin(&[3])).unwrap();
        let emb = embed_dual_td(&inst, &EliminationForest::path(&[0, 1])).unwrap();
        assert!(projection_matches(&inst, &emb, &cube(1, -3, 3)).unwrap());
        assert_eq!(emb.instance.a().column(emb.var_map[0]), to_bigints(&[1, 1]));
    }

    #[test]
    fn dual_embedding_preserves_columns() {
        let a = IntMatrix::from_i64(&[&[1, 1, 1, 0], &[1, 0, 0, 2], &[0, 1, 0, 0], &[0, 0, -1, 1]]);
        let inst = Instance::new(a.clone(), to_bigints(&[2, 1, 1, 0]), to_bigints(&[0; 4]), fin(&[-1; 4]), fin(&[2; 4])).unwrap();
        let forest = treedepth_decomposition(&dual_graph(&a)).unwrap();
        let emb = embed_dual_td(&inst, &forest).unwrap();
        assert!(projection_matches(&inst, &emb, &cube(4, -1, 2)).unwrap());
        let ext = emb.instance.a();
        for j in 0..4 {
            let image = ext.column(emb.var_map[j]);
            for (r, v) in image.iter().enumerate() {
                match emb.row_map.iter().position(|&x| x == r) {
                    Some(i) => assert_eq!(v, a.get(i, j)),
                    None => assert!(v.is_zero()),
                }
            }
        }
        assert!(emb.instance.m() <= (inst.m() + 1) * emb.segment_len * emb.depth);
    }

    #[test]
    fn forest_must_witness() {
        let inst = Instance::new(IntMatrix::from_i64(&[&[1, 1]]), to_bigints(&[0]), to_bigints(&[0, 0]), fin(&[0, 0]), fin(&[1, 1])).unwrap();
        let bad = EliminationForest::new(vec![None, None]).unwrap();
        assert!(embed_primal_td(&inst, &bad, EmbedMode::Lazy).is_err());
    }
}
