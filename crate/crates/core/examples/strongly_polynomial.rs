//! The full pipeline on a program with unbounded variables: relaxation,
//! bound reduction, an integer solution of the equations, the feasibility
//! phase and the final augmentation.

use graver_ilp::augment::ExactGraverOracle;
use graver_ilp::json::parse_instance;
use graver_ilp::strongpoly::{proximity_cinf, proximity_radius, reduce_bounds, solve_lp_relaxation, solve_with, Reduction};

fn main() -> graver_ilp::Result<()> {
    let inst = parse_instance(r#"{"A":[[3,5,-2]],"b":[7],"w":[1,1,1],"l":[0,0,"-inf"],"u":["+inf","+inf",4]}"#)?;
    let lp = solve_lp_relaxation(&inst)?;
    let shown: Vec<String> = lp.point.iter().flatten().map(ToString::to_string).collect();
    println!("relaxation {:?} at [{}]", lp.status, shown.join(", "));
    println!("radius {} circuit norm {}", proximity_radius(inst.a()), proximity_cinf(inst.a())?);
    if let Some(y) = &lp.point {
        if let Reduction::Reduced(red) = reduce_bounds(&inst, y)? {
            println!("shift {:?}", red.shift);
        }
    }
    let oracle = ExactGraverOracle::for_matrix(inst.a())?;
    let report = solve_with(&inst, &oracle)?;
    println!("{} {:?} objective {:?}", report.status, report.point, report.objective);
    println!("{:?}", report.stats);
    Ok(())
}
