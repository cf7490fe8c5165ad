//! Plain-text rendering of command output for `--pretty`.

use serde_json::{Map, Value};
use weilrep::exact::ExactScalar;

/// Renders a JSON document as indented text, with matrices as aligned tables
/// and exact scalars in cyclotomic notation.
pub fn render(doc: &Value) -> String {
    let mut out = String::new();
    block(doc, 0, &mut out);
    out
}

fn scalar_text(v: &Value) -> Option<String> {
    let map = v.as_object()?;
    if map.contains_key("order") && map.contains_key("coeffs") {
        let e: ExactScalar = serde_json::from_value(v.clone()).ok()?;
        return Some(e.to_string());
    }
    if let (Some(re), Some(im)) = (map.get("re"), map.get("im")) {
        let width = map.get("width").and_then(Value::as_str).unwrap_or("?");
        return Some(format!("{re} {} {}i (±{width})", if im.as_f64()? < 0.0 { '-' } else { '+' }, im.as_f64()?.abs()));
    }
    if let (Some(ex), Some(nu)) = (map.get("exact"), map.get("numeric")) {
        return Some(format!("{} ≈ {}", scalar_text(ex)?, scalar_text(nu)?));
    }
    None
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar_text(v) {
        return Some(s);
    }
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", xs.iter().map(|x| inline(x).unwrap_or_default()).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(_) | Value::Array(_) => None,
        other => Some(other.to_string()),
    }
}

/// Rows of cells when `v` is a non-empty array of equal-length arrays of inline values.
fn table(v: &Value) -> Option<Vec<Vec<String>>> {
    let rows = v.as_array()?;
    let first = rows.first()?.as_array()?;
    rows.iter()
        .map(|r| {
            let r = r.as_array()?;
            if r.len() != first.len() {
                return None;
            }
            r.iter().map(inline).collect()
        })
        .collect()
}

fn pad(depth: usize) -> String {
    "  ".repeat(depth)
}

fn write_table(rows: &[Vec<String>], depth: usize, out: &mut String) {
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols).map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        out.push_str(&format!("{}| {} |\n", pad(depth), cells.join(" | ")));
    }
}

fn fields(map: &Map<String, Value>, depth: usize, out: &mut String) {
    for (k, v) in map {
        if let Some(s) = inline(v) {
            out.push_str(&format!("{}{k}: {s}\n", pad(depth)));
        } else {
            out.push_str(&format!("{}{k}:\n", pad(depth)));
            block(v, depth + 1, out);
        }
    }
}

fn block(v: &Value, depth: usize, out: &mut String) {
    if let Some(rows) = table(v) {
        write_table(&rows, depth, out);
        return;
    }
    match v {
        Value::Object(map) => fields(map, depth, out),
        Value::Array(xs) => {
            for x in xs {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{}- {s}\n", pad(depth))),
                    None => {
                        out.push_str(&format!("{}-\n", pad(depth)));
                        block(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{}{}\n", pad(depth), inline(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn matrices_become_tables() {
        let doc = json!({ "dim": 2, "entries": [[1, 0], [0, 1]] });
        assert_eq!(render(&doc), "dim: 2\nentries:\n  | 1 | 0 |\n  | 0 | 1 |\n");
    }

    #[test]
    fn scalars_use_cyclotomic_notation() {
        let doc = json!({ "sum": ExactScalar::zeta8(2) });
        assert_eq!(render(&doc), format!("sum: {}\n", ExactScalar::zeta8(2)));
    }
}
