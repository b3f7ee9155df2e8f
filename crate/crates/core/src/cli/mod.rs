//! Commands behind the `graver-ilp` binary. Each returns a JSON value; the
//! binary only parses flags, reads files and prints.

mod bench;
mod generate;

pub use bench::{cmd_bench, BenchOptions};
pub use generate::{lowerbound_matrix, random_instance, DEFAULT_SEED};
pub use generate::{
    cmd_generate_lowerbound, cmd_generate_nfold, cmd_generate_random, cmd_generate_subset_sum, subset_sum_certificate,
    subset_sum_instance, NfoldOptions, RandomOptions,
};

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::augment::{exact_graver_oracle, ExactGraverOracle, GraverBestOracle, LambdaGraverBest};
use crate::dp::{incidence_decomposition, lambda_oracle_dual, lambda_oracle_primal, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graver::{certified_graver_basis, ginf_bound, graver_basis, graver_basis_with_bound, norms, GraverBasis};
use crate::ilp::{brute_force_solve, Instance, SolveReport, Status};
use crate::json::{
    decomposition_from_value, instance_from_value, instance_value, int_value, ints_value, report_value,
    structure_from_value, structure_value, tree_value,
};
use crate::linalg::IntMatrix;
use crate::strongpoly;
use crate::structure::{
    detect_nfold, detect_two_stage, dual_graph, embed_dual_td, embed_primal_td, incidence_graph, nfold_norm_bound,
    primal_graph, treedepth_decomposition, BlockKind, BlockStructure, EmbedMode, Graph,
};

/// Graphs with more vertices get no exact treedepth in `analyze`.
pub const ANALYZE_TREEDEPTH_CAP: usize = 16;
/// `analyze` computes a Graver basis only up to this many columns.
pub const ANALYZE_GRAVER_COLUMN_CAP: usize = 10;
/// ... and up to this kernel dimension.
pub const ANALYZE_GRAVER_KERNEL_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleKind {
    Exact,
    PrimalDp,
    DualDp,
    #[default]
    Auto,
    Brute,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Exact => "exact",
            OracleKind::PrimalDp => "primal-dp",
            OracleKind::DualDp => "dual-dp",
            OracleKind::Auto => "auto",
            OracleKind::Brute => "brute",
        }
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OracleKind::Exact),
            "primal-dp" => Ok(OracleKind::PrimalDp),
            "dual-dp" => Ok(OracleKind::DualDp),
            "auto" => Ok(OracleKind::Auto),
            "brute" => Ok(OracleKind::Brute),
            other => Err(Error::Parse(format!("unknown oracle {other:?}"))),
        }
    }
}

/// Parses `LO:HI` into a box applied to every variable.
pub fn parse_box(s: &str) -> Result<(BigInt, BigInt)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Error::Parse(format!("box {s:?} is not LO:HI")))?;
    let lo = BigInt::from_str(lo.trim()).map_err(|e| Error::Parse(format!("box lower end: {e}")))?;
    let hi = BigInt::from_str(hi.trim()).map_err(|e| Error::Parse(format!("box upper end: {e}")))?;
    if lo > hi {
        return Err(Error::Parse(format!("empty box {s:?}")));
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub oracle: OracleKind,
    /// Norm bound handed to the oracle in place of the computed one.
    pub radius: Option<BigInt>,
    /// Finite box for the brute-force oracle.
    pub bbox: Option<(BigInt, BigInt)>,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub report: SolveReport,
    /// The oracle that actually ran.
    pub oracle: OracleKind,
    pub warnings: Vec<String>,
}

impl SolveOutcome {
    pub fn to_json(&self) -> Value {
        let mut v = report_value(&self.report);
        v["oracle"] = json!(self.oracle.name());
        v
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.report.status)
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Optimal => 0,
        Status::Infeasible => 2,
        Status::Unbounded => 3,
    }
}

fn uncertified(radius: &BigInt, needed: &BigInt) -> Error {
    Error::Uncertified { radius: radius.to_string(), bound: needed.to_string() }
}

/// The basis norm a radius has to reach, or the radius itself when it does.
fn checked_radius(radius: Option<&BigInt>, needed: BigInt) -> Result<BigInt> {
    match radius {
        Some(r) if *r < needed => Err(uncertified(r, &needed)),
        Some(r) => Ok(r.clone()),
        None => Ok(needed),
    }
}

/// The exact oracle; a radius is accepted once it reaches the true `g_inf`.
pub fn build_exact(a: &IntMatrix, radius: Option<&BigInt>) -> Result<ExactGraverOracle> {
    let Some(r) = radius else {
        return ExactGraverOracle::for_matrix(a);
    };
    if ginf_bound(a).is_some_and(|b| *r >= b) {
        return exact_graver_oracle(a, r);
    }
    let full = certified_graver_basis(a)?;
    let ginf = norms(&full).ginf;
    checked_radius(Some(r), ginf.clone())?;
    ExactGraverOracle::new(graver_basis_with_bound(a, r, Some(&ginf))?)
}

/// Primal DP over a tree decomposition of the primal graph, with step norm `g_inf`.
pub fn build_primal_dp(a: &IntMatrix, radius: Option<&BigInt>) -> Result<Box<dyn GraverBestOracle>> {
    let ginf = norms(&certified_graver_basis(a)?).ginf;
    let m = checked_radius(radius, ginf)?;
    let td = TreeDecomposition::for_graph(&primal_graph(a));
    Ok(Box::new(LambdaGraverBest::new(lambda_oracle_primal(a, td, m.clone())?, m)))
}

/// Dual DP over an incidence decomposition, with step norm `g_1`. On an
/// n-fold matrix the norm comes from the blocks alone.
pub fn build_dual_dp(a: &IntMatrix, radius: Option<&BigInt>) -> Result<Box<dyn GraverBestOracle>> {
    let m = match (radius, detect_nfold(a)) {
        (None, Some(s)) => nfold_norm_bound(&s.blocks()[0], &s.blocks()[1])?,
        _ => checked_radius(radius, norms(&certified_graver_basis(a)?).g1)?,
    };
    let td = incidence_decomposition(a);
    Ok(Box::new(LambdaGraverBest::new(lambda_oracle_dual(a, td, m.clone())?, m)))
}

/// The oracle `auto` settles on, with a note when no structure was found.
pub fn choose_oracle(a: &IntMatrix) -> (OracleKind, Option<String>) {
    if detect_nfold(a).is_some() {
        (OracleKind::DualDp, None)
    } else if detect_two_stage(a).is_some() {
        (OracleKind::PrimalDp, None)
    } else {
        (OracleKind::Exact, Some("no block structure detected; using the exact oracle".into()))
    }
}

pub fn cmd_solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveOutcome> {
    let mut warnings = Vec::new();
    let kind = match opts.oracle {
        OracleKind::Auto => {
            let (k, note) = choose_oracle(inst.a());
            warnings.extend(note);
            k
        }
        k => k,
    };
    let radius = opts.radius.as_ref();
    let report = match kind {
        OracleKind::Brute => {
            let bbox = opts.bbox.as_ref().map(|b| vec![b.clone(); inst.n()]);
            brute_force_solve(inst, bbox.as_deref())?
        }
        OracleKind::Exact => strongpoly::solve(inst, |a| Ok(Box::new(build_exact(a, radius)?)))?,
        OracleKind::PrimalDp => strongpoly::solve(inst, |a| build_primal_dp(a, radius))?,
        OracleKind::DualDp => strongpoly::solve(inst, |a| build_dual_dp(a, radius))?,
        OracleKind::Auto => unreachable!("auto resolves to a concrete oracle"),
    };
    Ok(SolveOutcome { report, oracle: kind, warnings })
}

fn basis_value(basis: &GraverBasis) -> Value {
    let mut elements = basis.elements().to_vec();
    elements.sort();
    let nm = norms(basis);
    json!({
        "certified": basis.certified(),
        "radius": int_value(basis.radius()),
        "size": basis.len(),
        "g1": int_value(&nm.g1),
        "ginf": int_value(&nm.ginf),
        "elements": Value::Array(elements.iter().map(|g| ints_value(g)).collect()),
    })
}

/// The Graver basis of `a`, complete unless a radius below the certified
/// bound truncates it.
pub fn cmd_graver(a: &IntMatrix, radius: Option<&BigInt>) -> Result<Value> {
    let basis = match radius {
        Some(r) => graver_basis(a, r)?,
        None => certified_graver_basis(a)?,
    };
    Ok(basis_value(&basis))
}

fn graph_report(g: &Graph) -> Value {
    let td = TreeDecomposition::for_graph(g);
    let mut v = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "treewidth": td.width(),
        "treewidth_exact": g.vertex_count() <= crate::dp::EXACT_TREEWIDTH_CAP,
    });
    if g.vertex_count() <= ANALYZE_TREEDEPTH_CAP {
        match treedepth_decomposition(g) {
            Ok(f) => {
                v["treedepth"] = json!(f.treedepth());
                v["witness"] = json!(f.parents());
            }
            Err(_) => v["treedepth"] = json!("uncomputed"),
        }
    } else {
        v["treedepth"] = json!("uncomputed");
    }
    v
}

fn block_report(s: &BlockStructure) -> Value {
    let mut v = json!({ "kind": s.kind().name(), "tree": tree_value(s.tree()), "dims": s.dims() });
    match s.kind() {
        BlockKind::NFold => {
            v["r"] = json!(s.blocks()[0].rows());
            v["s"] = json!(s.blocks()[1].rows());
            v["t"] = json!(s.blocks()[0].cols());
            v["n"] = json!(s.tree().leaf_count());
        }
        BlockKind::TreeFold => v["t"] = json!(s.blocks()[0].cols()),
        BlockKind::MultiStage => v["stages"] = json!(s.stages()),
    }
    v
}

fn metadata_structure(file: &Value, a: &IntMatrix) -> Option<BlockStructure> {
    let s = structure_from_value(file.get("metadata")?.get("structure")?).ok()?;
    (s.matrix() == a).then_some(s)
}

/// Structure report for an instance file. Metadata written by the generators
/// is checked against the matrix rather than trusted.
pub fn cmd_analyze(file: &Value) -> Result<Value> {
    let inst = instance_from_value(file)?;
    let a = inst.a();
    let mut out = json!({
        "n": inst.n(),
        "m": inst.m(),
        "norm_inf": int_value(&a.norm_inf()),
        "rank": a.rank(),
        "primal": graph_report(&primal_graph(a)),
        "dual": graph_report(&dual_graph(a)),
    });
    let inc = incidence_decomposition(a);
    out["incidence"] = json!({
        "vertices": incidence_graph(a).vertex_count(),
        "edges": incidence_graph(a).edge_count(),
        "treewidth": inc.width(),
    });
    let found = metadata_structure(file, a).or_else(|| detect_nfold(a)).or_else(|| detect_two_stage(a));
    out["structure"] = found.as_ref().map_or(Value::Null, block_report);
    out["ginf_bound"] = ginf_bound(a).map_or(json!("uncomputed"), |b| int_value(&b));
    let kernel = a.cols() - a.rank();
    out["graver"] = if a.cols() <= ANALYZE_GRAVER_COLUMN_CAP && kernel <= ANALYZE_GRAVER_KERNEL_CAP {
        let basis = certified_graver_basis(a)?;
        let nm = norms(&basis);
        json!({ "size": basis.len(), "g1": int_value(&nm.g1), "ginf": int_value(&nm.ginf) })
    } else {
        json!("uncomputed")
    };
    if let Some(s) = found.as_ref().filter(|s| s.kind() == BlockKind::NFold) {
        out["nfold_norm_bound"] = match nfold_norm_bound(&s.blocks()[0], &s.blocks()[1]) {
            Ok(b) => int_value(&b),
            Err(_) => json!("uncomputed"),
        };
    }
    if let Some(cert) = file.get("metadata").and_then(|m| m.get("dual_decomposition")) {
        let td = decomposition_from_value(cert)?;
        let valid = td.validate(&dual_graph(a)).is_ok();
        out["dual_certificate"] = json!({ "width": td.width(), "valid": valid });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedSide {
    Primal,
    Dual,
}

impl FromStr for EmbedSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" => Ok(EmbedSide::Primal),
            "dual" => Ok(EmbedSide::Dual),
            other => Err(Error::Parse(format!("unknown embedding side {other:?}"))),
        }
    }
}

/// Rewrites an instance as a multi-stage (primal) or tree-fold (dual)
/// program along an optimal elimination forest.
pub fn cmd_embed(inst: &Instance, side: EmbedSide, mode: EmbedMode) -> Result<Value> {
    let (forest, emb) = match side {
        EmbedSide::Primal => {
            let f = treedepth_decomposition(&primal_graph(inst.a()))?;
            let e = embed_primal_td(inst, &f, mode)?;
            (f, e)
        }
        EmbedSide::Dual => {
            let f = treedepth_decomposition(&dual_graph(inst.a()))?;
            let e = embed_dual_td(inst, &f)?;
            (f, e)
        }
    };
    Ok(json!({
        "instance": instance_value(&emb.instance),
        "structure": structure_value(&emb.structure),
        "var_map": emb.var_map,
        "row_map": emb.row_map,
        "segment_len": emb.segment_len,
        "segments": emb.depth,
        "treedepth": forest.treedepth(),
        "forest": forest.parents(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::parse_instance;

    #[test]
    fn sample_file_solves() {
        let inst = parse_instance(r#"{"A":[[1,1]],"b":[2],"w":[0,1],"l":[0,0],"u":[2,2]}"#).unwrap();
        for oracle in [OracleKind::Exact, OracleKind::PrimalDp, OracleKind::DualDp, OracleKind::Auto, OracleKind::Brute] {
            let out = cmd_solve(&inst, &SolveOptions { oracle, ..Default::default() }).unwrap();
            let v = out.to_json();
            assert_eq!(v["status"], json!("Optimal"));
            assert_eq!(v["objective"], json!(0));
            assert_eq!(out.exit_code(), 0);
        }
    }

    #[test]
    fn parity_exits_two() {
        let inst = parse_instance(r#"{"A":[[2]],"b":[3],"w":[0],"l":[-5],"u":[5]}"#).unwrap();
        let out = cmd_solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(out.exit_code(), 2);
        assert_eq!(exit_code(Status::Unbounded), 3);
    }

    #[test]
    fn short_radius_is_refused() {
        let inst = parse_instance(r#"{"A":[[2,-1,0],[0,2,-1]],"b":[0,0],"w":[1,1,1],"l":[-8,-8,-8],"u":[8,8,8]}"#).unwrap();
        let opts = SolveOptions { oracle: OracleKind::Exact, radius: Some(BigInt::from(2)), bbox: None };
        assert!(matches!(cmd_solve(&inst, &opts), Err(Error::Uncertified { .. })));
        let opts = SolveOptions { oracle: OracleKind::Exact, radius: Some(BigInt::from(4)), bbox: None };
        assert_eq!(cmd_solve(&inst, &opts).unwrap().report.status, Status::Optimal);
    }

    #[test]
    fn boxes_parse() {
        assert_eq!(parse_box("-3:3").unwrap(), (BigInt::from(-3), BigInt::from(3)));
        assert!(parse_box("3:-3").is_err());
        assert!(parse_box("3").is_err());
        assert_eq!("dual-dp".parse::<OracleKind>().unwrap(), OracleKind::DualDp);
    }

    #[test]
    fn graver_of_the_doubling_chain() {
        let v = cmd_graver(&IntMatrix::from_i64(&[&[2, -1, 0], &[0, 2, -1]]), None).unwrap();
        assert_eq!(v["ginf"], json!(4));
        assert_eq!(v["elements"], json!([[-1, -2, -4], [1, 2, 4]]));
    }
}
