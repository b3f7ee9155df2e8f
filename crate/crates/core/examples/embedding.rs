//! Rewrite a program along an elimination forest of its primal graph and
//! check that the new program projects back onto the old one.

use num_bigint::BigInt;

use graver_ilp::json::parse_instance;
use graver_ilp::structure::{embed_primal_td, primal_graph, projection_matches, treedepth_decomposition, EmbedMode};

fn main() -> graver_ilp::Result<()> {
    let inst = parse_instance(r#"{"A":[[1,2,0],[0,1,-1]],"b":[3,0],"w":[0,1,0],"l":[-2,-2,-2],"u":[2,2,2]}"#)?;
    let forest = treedepth_decomposition(&primal_graph(inst.a()))?;
    for mode in [EmbedMode::Lazy, EmbedMode::Strict] {
        let emb = embed_primal_td(&inst, &forest, mode)?;
        let a = emb.instance.a();
        let cube = vec![(BigInt::from(-2), BigInt::from(2)); inst.n()];
        println!("{mode:?}: {} x {}, projects back: {}", a.rows(), a.cols(), projection_matches(&inst, &emb, &cube)?);
    }
    Ok(())
}
