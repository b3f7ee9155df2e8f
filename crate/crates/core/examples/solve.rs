//! Solve a small program with the default pipeline and print the report.

use graver_ilp::cli::{cmd_solve, SolveOptions};
use graver_ilp::json::{parse_instance, to_canonical_string};

fn main() -> graver_ilp::Result<()> {
    let inst = parse_instance(
        r#"{"A":[[1,1,1,0],[0,1,-1,1]],"b":[4,1],"w":[2,-1,1,0],"l":[0,0,0,-2],"u":[3,3,3,2]}"#,
    )?;
    let out = cmd_solve(&inst, &SolveOptions::default())?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", to_canonical_string(&out.to_json()));
    Ok(())
}
