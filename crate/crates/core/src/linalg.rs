//! Dense integer matrices and the exact linear algebra the solvers rely on:
//! rank, rational kernels, column Hermite normal form and integer kernels.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from row vectors; `cols` is needed to describe matrices without rows.
    pub fn from_rows_with_cols(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().cloned());
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    /// Convenience constructor for small literal matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Self::from_rows_with_cols(rows, cols).expect("ragged literal matrix")
    }

    pub fn from_columns(columns: &[Vec<BigInt>], rows: usize) -> Result<Self> {
        let mut m = IntMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    let cell = &mut out.data[i * other.cols + j];
                    *cell += prod;
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry, zero for an empty matrix.
    pub fn norm_inf(&self) -> BigInt {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| !self.get(i, j).is_zero()).collect()
    }

    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| !self.get(i, j).is_zero()).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.set(i, k, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn submatrix(&self, row0: usize, rows: usize, col0: usize, cols: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(row0 + i, col0 + j).clone());
            }
        }
        out
    }

    pub fn paste(&mut self, row0: usize, col0: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row0 + i, col0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn distinct_columns(&self) -> usize {
        (0..self.cols).map(|j| self.column(j)).collect::<BTreeSet<_>>().len()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| BigRational::from_integer(v.clone())).collect())
            .collect();
        row_reduce(&mut rows, self.cols).len()
    }

    fn column_axpy(&mut self, target: usize, factor: &BigInt, source: usize) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = factor * self.get(i, source);
            let cell = &mut self.data[i * self.cols + target];
            *cell -= delta;
        }
    }

    fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_column(&mut self, j: usize) {
        for i in 0..self.rows {
            let cell = &mut self.data[i * self.cols + j];
            *cell = -std::mem::take(cell);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn norm_inf(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

pub fn norm_1(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

pub fn to_bigints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Gauss-Jordan elimination in place, pivoting only among the first `cols`
/// columns (later columns ride along, e.g. a right-hand side); returns the
/// pivot columns. The first `pivots.len()` rows are left in reduced row
/// echelon form.
pub fn row_reduce(rows: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..rows[r].len() {
                    let delta = &f * &rows[r][k];
                    rows[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of the rational kernel, one vector per free column.
pub fn rational_kernel(a: &IntMatrix) -> Vec<Vec<BigRational>> {
    let n = a.cols();
    let mut rows: Vec<Vec<BigRational>> = (0..a.rows())
        .map(|i| a.row(i).iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    let pivots = row_reduce(&mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Column-style Hermite normal form `A * U = H` with `U` unimodular.
///
/// The nonzero columns of `H` come first; column `k` has its leading entry at
/// row `pivots[k]`, which is positive, and entries left of it in that row are
/// reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub pivots: Vec<usize>,
}

impl ColumnHnf {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn column_hnf(a: &IntMatrix) -> ColumnHnf {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(n);
    let mut pivots = Vec::new();
    let mut k = 0;
    for i in 0..m {
        if k == n {
            break;
        }
        loop {
            let nonzero: Vec<usize> = (k..n).filter(|&j| !h.get(i, j).is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero.iter().min_by_key(|&&j| h.get(i, j).abs()).unwrap();
            h.swap_columns(k, best);
            u.swap_columns(k, best);
            if nonzero.len() == 1 {
                break;
            }
            let piv = h.get(i, k).clone();
            for j in k + 1..n {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(&piv);
                h.column_axpy(j, &q, k);
                u.column_axpy(j, &q, k);
            }
        }
        if h.get(i, k).is_zero() {
            continue;
        }
        if h.get(i, k).is_negative() {
            h.negate_column(k);
            u.negate_column(k);
        }
        let piv = h.get(i, k).clone();
        for j in 0..k {
            let q = h.get(i, j).div_floor(&piv);
            h.column_axpy(j, &q, k);
            u.column_axpy(j, &q, k);
        }
        pivots.push(i);
        k += 1;
    }
    ColumnHnf { h, u, pivots }
}

/// A lattice basis of `{x in Z^n : A x = 0}`, as columns, in column echelon form.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let hnf = column_hnf(a);
    let r = hnf.rank();
    let cols: Vec<usize> = (r..a.cols()).collect();
    let basis = hnf.u.select_columns(&cols);
    column_hnf(&basis).h
}

/// Solves `A z = b` over the integers, returning any solution.
pub fn integer_solve(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} against {} rows",
            b.len(),
            a.rows()
        )));
    }
    let hnf = column_hnf(a);
    let n = a.cols();
    let mut v = vec![BigInt::zero(); n];
    for (k, &p) in hnf.pivots.iter().enumerate() {
        let partial: BigInt = (0..k).map(|j| hnf.h.get(p, j) * &v[j]).sum();
        let rest = &b[p] - partial;
        let piv = hnf.h.get(p, k);
        if !rest.is_multiple_of(piv) {
            return Ok(None);
        }
        v[k] = rest / piv;
    }
    let hv = hnf.h.mul_vec(&v)?;
    if hv.as_slice() != b {
        return Ok(None);
    }
    Ok(Some(hnf.u.mul_vec(&v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(IntMatrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(IntMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 1]]).rank(), 2);
        assert_eq!(IntMatrix::zeros(2, 3).rank(), 0);
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = IntMatrix::from_i64(&[&[2, 4, 6], &[1, -3, 5]]);
        let hnf = column_hnf(&a);
        assert_eq!(a.mul(&hnf.u).unwrap(), hnf.h);
        assert_eq!(hnf.rank(), 2);
        for (k, &p) in hnf.pivots.iter().enumerate() {
            assert!(hnf.h.get(p, k).is_positive());
            for i in 0..p {
                assert!(hnf.h.get(i, k).is_zero());
            }
        }
    }

    #[test]
    fn kernel_of_single_row() {
        let a = IntMatrix::from_i64(&[&[2, 3]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 1);
        let v = k.column(0);
        assert!(a.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        assert_eq!(norm_inf(&v), BigInt::from(3));
    }

    #[test]
    fn integer_solve_detects_lattice_gaps() {
        let a = IntMatrix::from_i64(&[&[2, 4]]);
        assert!(integer_solve(&a, &to_bigints(&[3])).unwrap().is_none());
        let z = integer_solve(&a, &to_bigints(&[6])).unwrap().unwrap();
        assert_eq!(a.mul_vec(&z).unwrap(), to_bigints(&[6]));
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![BigRational::new(2.into(), 3.into()), BigRational::new((-4).into(), 3.into())];
        assert_eq!(primitive(&v), to_bigints(&[1, -2]));
    }
}
