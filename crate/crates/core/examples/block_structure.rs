//! Assemble an n-fold matrix, recover it, bound its Graver norm and check the
//! bound against the exact basis.

use graver_ilp::graver::{certified_graver_basis, norms};
use graver_ilp::structure::{assemble_nfold, detect_nfold, nfold_norm_bound, treedepth_decomposition, dual_graph};
use graver_ilp::IntMatrix;

fn main() -> graver_ilp::Result<()> {
    let a1 = IntMatrix::from_rows_with_cols(vec![vec![1.into(), 1.into()]], 2)?;
    let a2 = IntMatrix::from_rows_with_cols(vec![vec![1.into(), (-2).into()]], 2)?;
    let s = assemble_nfold(&a1, &a2, 3)?;
    println!("{} x {}", s.matrix().rows(), s.matrix().cols());
    if let Some(found) = detect_nfold(s.matrix()) {
        println!("detected {} bricks", found.tree().leaf_count());
    }
    let forest = treedepth_decomposition(&dual_graph(s.matrix()))?;
    println!("dual treedepth {}", forest.treedepth());
    let g1 = norms(&certified_graver_basis(s.matrix())?).g1;
    println!("g1 {} bound {}", g1, nfold_norm_bound(&a1, &a2)?);
    Ok(())
}
