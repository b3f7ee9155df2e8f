//! Norm-bounded programs solved by dynamic programming over tree
//! decompositions of the primal and dual graphs.

use num_bigint::BigInt;

use graver_ilp::dp::{solve_dual_dp, solve_primal_dp, TreeDecomposition};
use graver_ilp::json::parse_instance;
use graver_ilp::structure::{dual_graph, primal_graph};

fn main() -> graver_ilp::Result<()> {
    let inst = parse_instance(
        r#"{"A":[[1,1,0,0,0],[0,1,1,0,0],[0,0,1,1,0],[0,0,0,1,1]],"b":[1,0,1,0],"w":[1,2,-1,1,-2],"l":[-3,-3,-3,-3,-3],"u":[3,3,3,3,3]}"#,
    )?;
    let primal = TreeDecomposition::for_graph(&primal_graph(inst.a()));
    let dual = TreeDecomposition::for_graph(&dual_graph(inst.a()));
    println!("primal width {} dual width {}", primal.width(), dual.width());
    for bound in 1..=3 {
        let bound = BigInt::from(bound);
        let p = solve_primal_dp(&inst, &bound)?;
        let d = solve_dual_dp(&inst, &bound)?;
        println!("max-norm {bound}: {} {:?}", p.status, p.point);
        println!("one-norm {bound}: {} {:?}", d.status, d.point);
    }
    Ok(())
}
