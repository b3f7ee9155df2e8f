//! Graver bases of the doubling chain: the max-norm doubles with every column.

use graver_ilp::cli::lowerbound_matrix;
use graver_ilp::graver::{certified_graver_basis, ginf_bound, norms};

fn main() -> graver_ilp::Result<()> {
    for n in 2..=5 {
        let a = lowerbound_matrix(n)?;
        let basis = certified_graver_basis(&a)?;
        let nm = norms(&basis);
        println!(
            "n={n} size={} g1={} ginf={} bound={}",
            basis.len(),
            nm.g1,
            nm.ginf,
            ginf_bound(&a).map_or("none".to_string(), |b| b.to_string())
        );
    }
    Ok(())
}
