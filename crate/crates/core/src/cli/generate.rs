//! Instance generators. Each returns an instance object with a `metadata`
//! key that the instance parser ignores.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dp::TreeDecomposition;
use crate::error::{Error, Result};
use crate::ilp::{ExtInt, Instance};
use crate::json::{decomposition_value, instance_value, ints_value, structure_value};
use crate::linalg::IntMatrix;
use crate::structure::assemble_nfold;

pub const DEFAULT_SEED: u64 = 7;

fn with_metadata(inst: &Instance, metadata: Value) -> Value {
    let mut v = instance_value(inst);
    v["metadata"] = metadata;
    v
}

fn bit_length(v: &BigInt) -> usize {
    v.bits() as usize
}

/// Row indices of the subset-sum program with `k` items and `len` bits:
/// `X_i`, then `Y_i^1..Y_i^len` per item, then `Z_i`, then `S`.
struct SubsetSumLayout {
    k: usize,
    len: usize,
}

impl SubsetSumLayout {
    fn x_var(&self, i: usize) -> usize {
        i
    }
    fn y_var(&self, i: usize, j: usize) -> usize {
        self.k + i * (self.len + 1) + j
    }
    fn z_var(&self, i: usize) -> usize {
        self.k + self.k * (self.len + 1) + i
    }
    fn vars(&self) -> usize {
        self.z_var(self.k)
    }
    fn x_row(&self, i: usize) -> usize {
        i
    }
    fn y_row(&self, i: usize, j: usize) -> usize {
        self.k + i * self.len + (j - 1)
    }
    fn z_row(&self, i: usize) -> usize {
        self.k + self.k * self.len + i
    }
    fn s_row(&self) -> usize {
        self.z_row(self.k)
    }
}

fn subset_sum_layout(items: &[BigInt], target: &BigInt) -> Result<SubsetSumLayout> {
    if items.is_empty() {
        return Err(Error::Invalid("subset sum needs at least one item".into()));
    }
    if items.iter().any(|v| v <= &BigInt::zero()) {
        return Err(Error::Invalid("subset sum items must be positive".into()));
    }
    if target < &BigInt::zero() {
        return Err(Error::Invalid("subset sum target must be nonnegative".into()));
    }
    let len = items.iter().map(bit_length).max().unwrap_or(1);
    Ok(SubsetSumLayout { k: items.len(), len })
}

/// The zero-objective program that is feasible iff some subset of `items`
/// sums to `target`. `y_i^j` carries `x_i 2^j`; `z_i` adds up the bits of
/// `s_i`, so every coefficient stays in `{-2, ..., 1}`.
pub fn subset_sum_instance(items: &[BigInt], target: &BigInt) -> Result<Instance> {
    let lay = subset_sum_layout(items, target)?;
    let len = lay.len;
    let rows = lay.s_row() + 1;
    let mut a = IntMatrix::zeros(rows, lay.vars());
    let mut b = vec![BigInt::zero(); rows];
    let one = BigInt::one();
    for (i, si) in items.iter().enumerate() {
        a.set(lay.x_row(i), lay.y_var(i, 0), one.clone());
        a.set(lay.x_row(i), lay.x_var(i), -&one);
        for j in 1..=len {
            a.set(lay.y_row(i, j), lay.y_var(i, j), one.clone());
            a.set(lay.y_row(i, j), lay.y_var(i, j - 1), BigInt::from(-2));
        }
        a.set(lay.z_row(i), lay.z_var(i), one.clone());
        for j in 0..=len {
            if si.bit(j as u64) {
                a.set(lay.z_row(i), lay.y_var(i, j), -&one);
            }
        }
        a.set(lay.s_row(), lay.z_var(i), one.clone());
    }
    b[lay.s_row()] = target.clone();
    let l = vec![ExtInt::Finite(BigInt::zero()); lay.vars()];
    let mut u = l.clone();
    for (i, si) in items.iter().enumerate() {
        u[lay.x_var(i)] = ExtInt::Finite(one.clone());
        for j in 0..=len {
            u[lay.y_var(i, j)] = ExtInt::Finite(BigInt::one() << j);
        }
        u[lay.z_var(i)] = ExtInt::Finite(si.clone());
    }
    Instance::new(a, b, vec![BigInt::zero(); lay.vars()], l, u)
}

/// A path decomposition of the dual graph with bags of four rows: per item,
/// `{S, Z_i, X_i, Y_i^1}` then `{S, Z_i, Y_i^(j-1), Y_i^j}` along the chain.
pub fn subset_sum_certificate(items: &[BigInt]) -> Result<TreeDecomposition> {
    let lay = subset_sum_layout(items, &BigInt::zero())?;
    let mut bags = Vec::new();
    for i in 0..lay.k {
        let (s, z) = (lay.s_row(), lay.z_row(i));
        bags.push(vec![s, z, lay.x_row(i), lay.y_row(i, 1)]);
        for j in 2..=lay.len {
            bags.push(vec![s, z, lay.y_row(i, j - 1), lay.y_row(i, j)]);
        }
    }
    let parent = (0..bags.len()).map(|p| p.checked_sub(1)).collect();
    TreeDecomposition::new(bags, parent)
}

pub fn cmd_generate_subset_sum(items: &[BigInt], target: &BigInt) -> Result<Value> {
    let inst = subset_sum_instance(items, target)?;
    let cert = subset_sum_certificate(items)?;
    Ok(with_metadata(
        &inst,
        json!({
            "generator": "subset-sum",
            "items": ints_value(items),
            "target": crate::json::int_value(target),
            "bits": subset_sum_layout(items, target)?.len,
            "dual_decomposition": decomposition_value(&cert),
        }),
    ))
}

/// The `(n-1) x n` doubling chain: 2 on the diagonal, -1 just right of it.
pub fn lowerbound_matrix(n: usize) -> Result<IntMatrix> {
    if n < 2 {
        return Err(Error::Invalid("the doubling chain needs n >= 2".into()));
    }
    let mut a = IntMatrix::zeros(n - 1, n);
    for i in 0..n - 1 {
        a.set(i, i, BigInt::from(2));
        a.set(i, i + 1, BigInt::from(-1));
    }
    Ok(a)
}

pub fn cmd_generate_lowerbound(n: usize) -> Result<Value> {
    let a = lowerbound_matrix(n)?;
    let top = BigInt::one() << (n - 1);
    let inst = Instance::new(
        a,
        vec![BigInt::zero(); n - 1],
        vec![BigInt::zero(); n],
        vec![ExtInt::Finite(-&top); n],
        vec![ExtInt::Finite(top); n],
    )?;
    let element: Vec<BigInt> = (0..n).map(|i| BigInt::one() << i).collect();
    Ok(with_metadata(&inst, json!({ "generator": "lowerbound", "n": n, "graver_element": ints_value(&element) })))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<BigInt>> =
        (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect();
    IntMatrix::from_rows_with_cols(data, cols).expect("rows have equal length")
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()
}

#[derive(Clone, Debug)]
pub struct NfoldOptions {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub n: usize,
    pub entry_bound: i64,
    pub box_bound: i64,
    pub seed: u64,
}

impl Default for NfoldOptions {
    fn default() -> Self {
        NfoldOptions { r: 1, s: 1, t: 2, n: 3, entry_bound: 2, box_bound: 3, seed: DEFAULT_SEED }
    }
}

/// A random n-fold program, feasible by construction: `b` is the image of a
/// random point of the box.
pub fn cmd_generate_nfold(opts: &NfoldOptions) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let a1 = random_matrix(&mut rng, opts.r, opts.t, opts.entry_bound);
    let a2 = random_matrix(&mut rng, opts.s, opts.t, opts.entry_bound);
    let st = assemble_nfold(&a1, &a2, opts.n)?;
    let cols = st.matrix().cols();
    let x0 = random_vector(&mut rng, cols, opts.box_bound);
    let b = st.matrix().mul_vec(&x0)?;
    let w = random_vector(&mut rng, cols, opts.entry_bound);
    let inst = Instance::new(
        st.matrix().clone(),
        b,
        w,
        vec![ExtInt::Finite(BigInt::from(-opts.box_bound)); cols],
        vec![ExtInt::Finite(BigInt::from(opts.box_bound)); cols],
    )?;
    Ok(with_metadata(
        &inst,
        json!({
            "generator": "nfold",
            "seed": opts.seed,
            "r": opts.r, "s": opts.s, "t": opts.t, "n": opts.n,
            "structure": structure_value(&st),
        }),
    ))
}

#[derive(Clone, Debug)]
pub struct RandomOptions {
    pub n: usize,
    pub m: usize,
    pub entry_bound: i64,
    pub box_bound: i64,
    /// Plant a feasible point; otherwise `b` is drawn at random.
    pub planted: bool,
    pub seed: u64,
}

impl Default for RandomOptions {
    fn default() -> Self {
        RandomOptions { n: 4, m: 2, entry_bound: 2, box_bound: 3, planted: true, seed: DEFAULT_SEED }
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng, opts: &RandomOptions) -> Result<Instance> {
    let a = random_matrix(rng, opts.m, opts.n, opts.entry_bound);
    let lo: Vec<i64> = (0..opts.n).map(|_| rng.gen_range(-opts.box_bound..=0)).collect();
    let hi: Vec<i64> = (0..opts.n).map(|_| rng.gen_range(0..=opts.box_bound)).collect();
    let b = if opts.planted {
        let x0: Vec<BigInt> = lo.iter().zip(&hi).map(|(&l, &h)| BigInt::from(rng.gen_range(l..=h))).collect();
        a.mul_vec(&x0)?
    } else {
        random_vector(rng, opts.m, opts.entry_bound * opts.box_bound)
    };
    let w = random_vector(rng, opts.n, opts.entry_bound);
    let l = lo.into_iter().map(|v| ExtInt::Finite(v.into())).collect();
    let u = hi.into_iter().map(|v| ExtInt::Finite(v.into())).collect();
    Instance::new(a, b, w, l, u)
}

pub fn cmd_generate_random(opts: &RandomOptions) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let inst = random_instance(&mut rng, opts)?;
    Ok(with_metadata(&inst, json!({ "generator": "random", "seed": opts.seed, "planted": opts.planted })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{brute_force_solve, Status};
    use crate::json::instance_from_value;
    use crate::linalg::to_bigints;
    use crate::structure::dual_graph;

    #[test]
    fn subset_sum_shapes() {
        let items = to_bigints(&[1, 2]);
        let inst = subset_sum_instance(&items, &BigInt::from(3)).unwrap();
        // two bits: n + n(L+1) + n columns, n + nL + n + 1 rows
        assert_eq!(inst.n(), 2 + 2 * 3 + 2);
        assert_eq!(inst.m(), 2 + 2 * 2 + 2 + 1);
        assert_eq!(inst.a().norm_inf(), BigInt::from(2));
        let rep = brute_force_solve(&inst, None).unwrap();
        assert_eq!(rep.status, Status::Optimal);
        assert_eq!(&rep.point.unwrap()[..2], to_bigints(&[1, 1]).as_slice());
        let single = subset_sum_instance(&to_bigints(&[2]), &BigInt::from(1)).unwrap();
        assert_eq!(brute_force_solve(&single, None).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn certificate_is_a_width_three_path() {
        for items in [vec![1], vec![5, 3], vec![8, 1, 6, 7]] {
            let items = to_bigints(&items);
            let inst = subset_sum_instance(&items, &BigInt::zero()).unwrap();
            let td = subset_sum_certificate(&items).unwrap();
            td.validate(&dual_graph(inst.a())).unwrap();
            assert_eq!(td.width(), 3);
        }
    }

    #[test]
    fn lowerbound_matrices() {
        assert_eq!(lowerbound_matrix(3).unwrap(), IntMatrix::from_i64(&[&[2, -1, 0], &[0, 2, -1]]));
        let v = cmd_generate_lowerbound(2).unwrap();
        assert_eq!(v["metadata"]["graver_element"], json!([1, 2]));
        assert!(lowerbound_matrix(1).is_err());
    }

    #[test]
    fn generators_are_seeded() {
        let opts = NfoldOptions::default();
        assert_eq!(cmd_generate_nfold(&opts).unwrap(), cmd_generate_nfold(&opts).unwrap());
        let v = cmd_generate_random(&RandomOptions::default()).unwrap();
        let inst = instance_from_value(&v).unwrap();
        assert_eq!(brute_force_solve(&inst, None).unwrap().status, Status::Optimal);
    }
}
