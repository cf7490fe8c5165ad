//! Parsing of lattice and matrix arguments.

use std::path::Path;

use serde_json::Value;
use weilrep::lattice::GramLattice;
use weilrep::metaplectic::SL2Z;
use weilrep::{Error, Result};

/// Reads a Gram matrix from JSON: either a bare `[[..]]` array or `{"gram": [[..]]}`.
pub fn parse_lattice(text: &str) -> Result<GramLattice> {
    let doc: Value = serde_json::from_str(text.trim()).map_err(|e| Error::Validation(format!("lattice JSON: {e}")))?;
    let rows = match &doc {
        Value::Object(map) => map.get("gram").ok_or_else(|| Error::Validation("lattice object has no \"gram\" field".into()))?,
        other => other,
    };
    let gram: Vec<Vec<i64>> = serde_json::from_value(rows.clone())
        .map_err(|e| Error::Validation(format!("gram must be a matrix of integers: {e}")))?;
    GramLattice::new(gram)
}

/// `--lattice` takes inline JSON or a path to a file holding it.
pub fn load_lattice(arg: &str) -> Result<GramLattice> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return parse_lattice(arg);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("reading {arg}: {e}")))?;
    parse_lattice(&text)
}

/// `"a,b,c,d"` or `[[a,b],[c,d]]`.
pub fn parse_matrix(text: &str) -> Result<SL2Z> {
    let t = text.trim();
    let entries: Vec<i64> = if t.starts_with('[') {
        let rows: Vec<Vec<i64>> =
            serde_json::from_str(t).map_err(|e| Error::Validation(format!("matrix JSON: {e}")))?;
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(Error::Validation("matrix must be 2×2".into()));
        }
        rows.concat()
    } else {
        t.split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|e| Error::Validation(format!("matrix entry {s:?}: {e}"))))
            .collect::<Result<_>>()?
    };
    match entries[..] {
        [a, b, c, d] => SL2Z::new(a, b, c, d),
        _ => Err(Error::Validation(format!("matrix needs 4 entries, got {}", entries.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_examples() {
        let l = parse_lattice("[[2]]").unwrap();
        assert!(l.is_even());
        assert_eq!(l.rank(), 1);
        let l = parse_lattice("[[1]]").unwrap();
        assert!(!l.is_even());
        assert_eq!(l.rank(), 1);
        let l = parse_lattice(r#"{"gram": [[0,1],[1,1]]}"#).unwrap();
        assert!(!l.is_even());
        assert_eq!(l.rank(), 2);
    }

    #[test]
    fn bad_lattices() {
        for bad in ["[[1,2],[3,4]]", "[[0]]", "[[1,1],[1,1]]", "[[1.5]]", "{\"gr\": [[2]]}", "[2]"] {
            assert!(matches!(parse_lattice(bad), Err(Error::Validation(_))), "{bad}");
        }
        assert!(load_lattice("/nonexistent/file.json").is_err());
    }

    #[test]
    fn matrices() {
        assert_eq!(parse_matrix("0,-1,1,0").unwrap(), SL2Z { a: 0, b: -1, c: 1, d: 0 });
        assert_eq!(parse_matrix("[[1,1],[0,1]]").unwrap(), SL2Z { a: 1, b: 1, c: 0, d: 1 });
        assert!(parse_matrix("1,1,1,1").is_err());
        assert!(parse_matrix("1,2,3").is_err());
    }
}
