//! A 1-norm bound for Graver elements of n-fold matrices that does not
//! depend on the number of bricks.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graver::{certified_graver_basis, complete_graver_basis, norms};
use crate::linalg::IntMatrix;

/// `g1(G(A1 G2)) * g1(A2)`, where `G2` has the Graver basis of `A2` as
/// columns. Every brick of an n-fold Graver element is a conformal sum of
/// elements of `G2`, and the multiplicities form a kernel element of
/// `A1 G2`.
pub fn nfold_norm_bound(a1: &IntMatrix, a2: &IntMatrix) -> Result<BigInt> {
    if a1.cols() != a2.cols() {
        return Err(Error::Dimension(format!(
            "A1 has {} columns but A2 has {}",
            a1.cols(),
            a2.cols()
        )));
    }
    let inner = certified_graver_basis(a2)?;
    if inner.is_empty() {
        return Ok(BigInt::zero());
    }
    let g2 = IntMatrix::from_columns(inner.elements(), a2.cols())?;
    let outer = complete_graver_basis(&a1.mul(&g2)?);
    Ok(norms(&outer).g1 * norms(&inner).g1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::assemble_nfold;

    fn brute_g1(a: &IntMatrix) -> BigInt {
        norms(&certified_graver_basis(a).unwrap()).g1
    }

    #[test]
    fn bound_covers_small_nfolds() {
        type Rows<'a> = &'a [&'a [i64]];
        let cases: [(Rows, Rows); 3] =
            [(&[&[1, 0]], &[&[1, 1]]), (&[&[1, 1]], &[&[1, 1]]), (&[&[1, 2]], &[&[1, -1]])];
        for (r1, r2) in cases {
            let (a1, a2) = (IntMatrix::from_i64(r1), IntMatrix::from_i64(r2));
            let bound = nfold_norm_bound(&a1, &a2).unwrap();
            for n in 2..=3 {
                let s = assemble_nfold(&a1, &a2, n).unwrap();
                assert!(brute_g1(s.matrix()) <= bound, "A1={a1} A2={a2} n={n}");
            }
        }
    }

    #[test]
    fn first_example_value() {
        let bound = nfold_norm_bound(&IntMatrix::from_i64(&[&[1, 0]]), &IntMatrix::from_i64(&[&[1, 1]])).unwrap();
        assert_eq!(bound, BigInt::from(4));
    }

    #[test]
    fn trivial_inner_kernel() {
        let bound = nfold_norm_bound(&IntMatrix::from_i64(&[&[1]]), &IntMatrix::from_i64(&[&[1]])).unwrap();
        assert_eq!(bound, BigInt::zero());
    }
}
