//! JSON encodings of the core types. Rationals are always `"p/q"` strings.

use hopfren::characters::Functional;
use hopfren::laurent::LaurentSeries;
use hopfren::rational::fmt_q;
use hopfren::words::WordPoly;
use hopfren::{Q, TensorPoly, TreePoly};
use serde_json::{json, Value};

pub fn q(x: &Q) -> Value {
    json!(fmt_q(x))
}

pub fn tree_poly(x: &TreePoly) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(f, c)| json!({ "coeff": fmt_q(c), "forest": f.to_string() }))
        .collect();
    json!({ "text": x.to_string(), "terms": terms })
}

pub fn tensor_poly(x: &TensorPoly) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|((l, r), c)| json!({ "coeff": fmt_q(c), "left": l.to_string(), "right": r.to_string() }))
        .collect();
    json!({ "text": x.to_string(), "terms": terms })
}

pub fn word_poly(x: &WordPoly) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(w, c)| json!({ "coeff": fmt_q(c), "word": w.to_string() }))
        .collect();
    json!({ "text": x.to_string(), "terms": terms })
}

pub fn laurent(x: &LaurentSeries) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(k, c)| json!({ "power": k, "coeff": c.to_string() }))
        .collect();
    json!({ "text": x.to_string(), "terms": terms, "precision": x.precision() })
}

/// `tree = value` rows for every basis tree, in canonical order.
pub fn tree_table(f: &Functional) -> hopfren::Result<(String, Value)> {
    let mut text = String::new();
    let mut rows = Vec::new();
    for t in f.basis().trees() {
        let v = f.tree_value(t)?;
        text.push_str(&format!("  {t} = {v}\n"));
        rows.push(json!({ "tree": t.to_string(), "value": laurent(&v) }));
    }
    Ok((text, Value::Array(rows)))
}
