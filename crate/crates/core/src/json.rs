//! JSON encoding of instances, matrices and reports. Integers are written as
//! arbitrary-precision JSON numbers; infinite bounds as `"-inf"` / `"+inf"`.
//! Object keys come out sorted, so serialisation is canonical.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::dp::TreeDecomposition;
use crate::ilp::{ExtInt, Instance, SolveReport};
use crate::linalg::IntMatrix;
use crate::structure::{assemble_multistage, assemble_nfold, assemble_treefold, BlockKind, BlockStructure, ShapeTree};

pub fn int_value(v: &BigInt) -> Value {
    Value::Number(serde_json::Number::from_str(&v.to_string()).expect("decimal integer"))
}

pub fn int_from_value(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::Parse(format!("expected an integer, found {n}"))),
        other => Err(Error::Parse(format!("expected an integer, found {other}"))),
    }
}

pub fn ext_value(v: &ExtInt) -> Value {
    match v {
        ExtInt::Finite(x) => int_value(x),
        ExtInt::NegInf => Value::String("-inf".into()),
        ExtInt::PosInf => Value::String("+inf".into()),
    }
}

pub fn ext_from_value(v: &Value) -> Result<ExtInt> {
    match v {
        Value::String(s) if s == "-inf" => Ok(ExtInt::NegInf),
        Value::String(s) if s == "+inf" || s == "inf" => Ok(ExtInt::PosInf),
        Value::Null => Err(Error::Parse("null is not a bound".into())),
        other => int_from_value(other).map(ExtInt::Finite),
    }
}

pub fn ints_value(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_value).collect())
}

pub fn ints_from_value(v: &Value) -> Result<Vec<BigInt>> {
    array(v)?.iter().map(int_from_value).collect()
}

pub fn matrix_value(a: &IntMatrix) -> Value {
    Value::Array((0..a.rows()).map(|i| ints_value(a.row(i))).collect())
}

/// Parses a matrix; `cols` resolves the width of a matrix with no rows.
pub fn matrix_from_value(v: &Value, cols: Option<usize>) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = array(v)?.iter().map(ints_from_value).collect::<Result<_>>()?;
    let width = rows.first().map(Vec::len).or(cols).unwrap_or(0);
    IntMatrix::from_rows_with_cols(rows, width)
}

fn array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("expected an array, found {v}")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing key \"{key}\"")))
}

pub fn instance_value(inst: &Instance) -> Value {
    json!({
        "A": matrix_value(inst.a()),
        "b": ints_value(inst.b()),
        "w": ints_value(inst.w()),
        "l": Value::Array(inst.l().iter().map(ext_value).collect()),
        "u": Value::Array(inst.u().iter().map(ext_value).collect()),
    })
}

/// Reads an instance object; unknown keys are ignored so files may carry metadata.
pub fn instance_from_value(v: &Value) -> Result<Instance> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("instance must be an object".into()))?;
    let w = ints_from_value(field(obj, "w")?)?;
    let a = matrix_from_value(field(obj, "A")?, Some(w.len()))?;
    let b = ints_from_value(field(obj, "b")?)?;
    let l = array(field(obj, "l")?)?.iter().map(ext_from_value).collect::<Result<_>>()?;
    let u = array(field(obj, "u")?)?.iter().map(ext_from_value).collect::<Result<_>>()?;
    Instance::new(a, b, w, l, u)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    instance_from_value(&serde_json::from_str(text)?)
}

pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialise")
}

pub fn report_value(report: &SolveReport) -> Value {
    let mut obj = Map::new();
    obj.insert("status".into(), Value::String(report.status.to_string()));
    if let Some(x) = &report.point {
        obj.insert("point".into(), ints_value(x));
    }
    if let Some(o) = &report.objective {
        obj.insert("objective".into(), int_value(o));
    }
    let stats: Map<String, Value> = report.stats.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    obj.insert("stats".into(), Value::Object(stats));
    Value::Object(obj)
}

/// A shape tree as nested arrays: a leaf is `[]`, a vertex lists its children.
pub fn tree_value(t: &ShapeTree) -> Value {
    Value::Array(t.children.iter().map(tree_value).collect())
}

pub fn tree_from_value(v: &Value) -> Result<ShapeTree> {
    let children = array(v)?.iter().map(tree_from_value).collect::<Result<_>>()?;
    Ok(ShapeTree::node(children))
}

pub fn structure_value(s: &BlockStructure) -> Value {
    json!({
        "kind": s.kind().name(),
        "tree": tree_value(s.tree()),
        "blocks": Value::Array(s.blocks().iter().map(matrix_value).collect()),
    })
}

/// Assembles the matrix described by a block-structure object.
pub fn structure_from_value(v: &Value) -> Result<BlockStructure> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("block structure must be an object".into()))?;
    let kind = BlockKind::from_name(field(obj, "kind")?.as_str().ok_or_else(|| Error::Parse("kind must be a string".into()))?)?;
    let tree = tree_from_value(field(obj, "tree")?)?;
    let blocks: Vec<IntMatrix> = array(field(obj, "blocks")?)?.iter().map(|b| matrix_from_value(b, None)).collect::<Result<_>>()?;
    match kind {
        BlockKind::MultiStage => assemble_multistage(&tree, &blocks),
        BlockKind::TreeFold => assemble_treefold(&tree, &blocks),
        BlockKind::NFold => {
            if blocks.len() != 2 || tree.height() != 1 {
                return Err(Error::Structure("an n-fold structure needs a star and two blocks".into()));
            }
            assemble_nfold(&blocks[0], &blocks[1], tree.leaf_count())
        }
    }
}

pub fn decomposition_value(td: &TreeDecomposition) -> Value {
    json!({
        "bags": td.bags(),
        "parent": td.parents(),
        "width": td.width(),
    })
}

pub fn decomposition_from_value(v: &Value) -> Result<TreeDecomposition> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("tree decomposition must be an object".into()))?;
    let bags: Vec<Vec<usize>> = serde_json::from_value(field(obj, "bags")?.clone())?;
    let parent: Vec<Option<usize>> = serde_json::from_value(field(obj, "parent")?.clone())?;
    TreeDecomposition::new(bags, parent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip_is_canonical() {
        let text = r#"{"w":[0,1],"u":[2,"+inf"],"l":["-inf",0],"b":[2],"A":[[1,1]]}"#;
        let inst = parse_instance(text).unwrap();
        let out = to_canonical_string(&instance_value(&inst));
        assert_eq!(out, r#"{"A":[[1,1]],"b":[2],"l":["-inf",0],"u":[2,"+inf"],"w":[0,1]}"#);
        assert_eq!(parse_instance(&out).unwrap(), inst);
    }

    #[test]
    fn big_integers_survive() {
        let text = r#"{"A":[[123456789012345678901234567890]],"b":[0],"l":[0],"u":[1],"w":[-98765432109876543210]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(to_canonical_string(&instance_value(&inst)), text);
    }

    #[test]
    fn rejects_bad_bound_strings() {
        let text = r#"{"A":[[1]],"b":[0],"l":["minus"],"u":[1],"w":[0]}"#;
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn empty_matrix_keeps_width() {
        let text = r#"{"A":[],"b":[],"l":[0,0],"u":[1,1],"w":[1,1]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!((inst.m(), inst.n()), (0, 2));
    }

    #[test]
    fn structures_round_trip() {
        let tree = ShapeTree::node(vec![ShapeTree::star(2), ShapeTree::star(1)]);
        let blocks = vec![IntMatrix::from_i64(&[&[1, 0]]), IntMatrix::from_i64(&[&[0, 1]]), IntMatrix::from_i64(&[&[2, -1]])];
        let s = assemble_treefold(&tree, &blocks).unwrap();
        let v = structure_value(&s);
        assert_eq!(to_canonical_string(&v["tree"]), "[[[],[]],[[]]]");
        assert_eq!(structure_from_value(&v).unwrap(), s);
    }

    #[test]
    fn decompositions_round_trip() {
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![None, Some(0)]).unwrap();
        let v = decomposition_value(&td);
        assert_eq!(v["width"], json!(1));
        assert_eq!(decomposition_from_value(&v).unwrap(), td);
    }
}
