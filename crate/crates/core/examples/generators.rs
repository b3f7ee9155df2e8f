//! The instance generators, with subset sum decided by the dual DP.

use num_bigint::BigInt;

use graver_ilp::cli::{cmd_solve, subset_sum_certificate, subset_sum_instance, OracleKind, SolveOptions};

fn main() -> graver_ilp::Result<()> {
    let items: Vec<BigInt> = [3, 5, 9].map(BigInt::from).to_vec();
    println!("certificate width {}", subset_sum_certificate(&items)?.width());
    for target in [8, 10, 17] {
        let inst = subset_sum_instance(&items, &BigInt::from(target))?;
        let out = cmd_solve(&inst, &SolveOptions { oracle: OracleKind::DualDp, ..Default::default() })?;
        println!("target {target}: {} ({} variables)", out.report.status, inst.n());
    }
    Ok(())
}
