//! Walk from a feasible point to the optimum with Graver-best steps.

use graver_ilp::augment::{augment_to_optimum, ExactGraverOracle};
use graver_ilp::json::parse_instance;

fn main() -> graver_ilp::Result<()> {
    let inst = parse_instance(r#"{"A":[[1,1,1]],"b":[6],"w":[3,-1,1],"l":[0,0,0],"u":[6,6,6]}"#)?;
    let start = [6, 0, 0].map(num_bigint::BigInt::from);
    let oracle = ExactGraverOracle::for_matrix(inst.a())?;
    let report = augment_to_optimum(&inst, &start, &oracle)?;
    println!("{} {:?} objective {:?}", report.status, report.point, report.objective);
    for run in &report.runs {
        println!("steps {} of budget {}", run.steps, run.step_budget());
    }
    Ok(())
}
