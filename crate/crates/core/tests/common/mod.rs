#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;

use graver_ilp::{ExtInt, Instance, IntMatrix};

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn matrix(rows: usize, cols: usize, a: i64) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(proptest::collection::vec(-a..=a, cols), rows).prop_map(move |data| {
        IntMatrix::from_rows_with_cols(data.into_iter().map(|r| ints(&r)).collect(), cols).unwrap()
    })
}

pub fn matrix_upto(max_rows: usize, max_cols: usize, a: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(m, n)| matrix(m, n, a))
}

/// Finite bounds inside `[-bx, bx]`; `b` is the image of a point in the box
/// when `planted`, otherwise drawn freely.
pub fn instance(max_n: usize, max_m: usize, a: i64, bx: i64) -> impl Strategy<Value = Instance> {
    (1..=max_n, 1..=max_m).prop_flat_map(move |(n, m)| {
        (
            matrix(m, n, a),
            proptest::collection::vec((-bx..=bx, -bx..=bx, 0u32..1000), n),
            proptest::collection::vec(-3i64..=3, n),
            proptest::collection::vec(-2 * bx..=2 * bx, m),
            any::<bool>(),
        )
            .prop_map(move |(mat, bounds, w, free_b, planted)| {
                let lo: Vec<i64> = bounds.iter().map(|(p, q, _)| *p.min(q)).collect();
                let hi: Vec<i64> = bounds.iter().map(|(p, q, _)| *p.max(q)).collect();
                let b = if planted {
                    let x: Vec<BigInt> = bounds
                        .iter()
                        .zip(lo.iter().zip(&hi))
                        .map(|((_, _, r), (&l, &h))| int(l + (*r as i64) % (h - l + 1)))
                        .collect();
                    mat.mul_vec(&x).unwrap()
                } else {
                    ints(&free_b)
                };
                let fin = |v: &[i64]| v.iter().map(|&x| ExtInt::Finite(int(x))).collect();
                Instance::new(mat, b, ints(&w), fin(&lo), fin(&hi)).unwrap()
            })
    })
}

pub fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x == &BigInt::from(0))
}
