use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, primitive, rational_kernel, IntMatrix};

/// Circuits are found by scanning column subsets, so the column count is capped.
pub const CIRCUIT_COLUMN_CAP: usize = 16;

/// The circuits of `A`: support-minimal nonzero kernel vectors, made
/// primitive, both signs, in lexicographic order.
pub fn circuits(a: &IntMatrix) -> Result<Vec<Vec<BigInt>>> {
    let n = a.cols();
    if n > CIRCUIT_COLUMN_CAP {
        return Err(Error::SizeCap(format!("circuit enumeration over {n} > {CIRCUIT_COLUMN_CAP} columns")));
    }
    let max_size = (a.rank() + 1).min(n);
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) != 0).collect();
        let kernel = rational_kernel(&a.select_columns(&cols));
        if kernel.len() != 1 {
            continue;
        }
        let v = primitive(&kernel[0]);
        if v.iter().any(Zero::is_zero) {
            continue;
        }
        let mut full = vec![BigInt::zero(); n];
        for (k, &j) in cols.iter().enumerate() {
            full[j] = v[k].clone();
        }
        let neg: Vec<BigInt> = full.iter().map(|x| -x).collect();
        out.push(full);
        out.push(neg);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `c_inf(A)`, the largest circuit entry; zero when the kernel is trivial.
pub fn circuit_norm_inf(a: &IntMatrix) -> Result<BigInt> {
    Ok(circuits(a)?.iter().map(|c| norm_inf(c)).max().unwrap_or_else(BigInt::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_bigints;

    #[test]
    fn circuits_of_a_row() {
        let a = IntMatrix::from_i64(&[&[1, 2, 1]]);
        let cs = circuits(&a).unwrap();
        let expected: Vec<Vec<BigInt>> = [[-2, 1, 0], [-1, 0, 1], [0, -1, 2], [0, 1, -2], [1, 0, -1], [2, -1, 0]]
            .iter()
            .map(|r| to_bigints(r))
            .collect();
        assert_eq!(cs, expected);
        assert_eq!(circuit_norm_inf(&a).unwrap(), BigInt::from(2));
    }

    #[test]
    fn zero_columns_are_circuits() {
        let a = IntMatrix::from_i64(&[&[0, 1]]);
        assert_eq!(circuits(&a).unwrap(), vec![to_bigints(&[-1, 0]), to_bigints(&[1, 0])]);
    }
}
