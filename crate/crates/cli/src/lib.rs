//! Request handling for the `weilrep` command-line tool.
//!
//! A [`Request`] names one computation on one lattice. [`run`] turns it into
//! a single JSON document and the process exit code: 0 on success, 2 for
//! invalid input, 3 when an enumeration would exceed its cap, 1 when an
//! identity that must hold fails.

pub mod input;
pub mod pretty;
pub mod verify;

use serde_json::{json, Value};
use weilrep::exact::ExactScalar;
use weilrep::jordan::{gauss_sum_brute, gauss_sum_closed, jordan_decompose, JordanComponent, Parity};
use weilrep::lattice::GramLattice;
use weilrep::metaplectic::{MpElement, SL2Z};
use weilrep::numth::prime_divisors;
use weilrep::weilrep::{numeric_json, WeilOperator, WeilRep};
use weilrep::{Error, Result};

pub use input::{load_lattice, parse_lattice, parse_matrix};

/// Default working precision of numeric renderings.
pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Discform,
    Jordan,
    Milgram,
    Rho,
    Gauss,
    Kernel,
    Verify,
}

/// How scalars are rendered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Exact,
    Numeric,
    Both,
}

#[derive(Clone, Debug)]
pub struct Request {
    pub command: Command,
    pub lattice: GramLattice,
    pub matrix: Option<SL2Z>,
    pub eps: Option<i8>,
    pub prime: Option<u64>,
    pub a: Option<i64>,
    pub c: Option<i64>,
    pub precision: Option<u32>,
    pub format: Format,
}

impl Request {
    pub fn new(command: Command, lattice: GramLattice) -> Self {
        Request { command, lattice, matrix: None, eps: None, prime: None, a: None, c: None, precision: None, format: Format::Exact }
    }

    fn bits(&self) -> u32 {
        self.precision.unwrap_or(DEFAULT_PRECISION)
    }

    fn scalar(&self, e: &ExactScalar) -> Value {
        match self.format {
            Format::Exact => json!(e),
            Format::Numeric => numeric_json(e, self.bits()),
            Format::Both => json!({ "exact": e, "numeric": numeric_json(e, self.bits()) }),
        }
    }

    fn operator(&self, op: &WeilOperator) -> Result<Value> {
        Ok(match self.format {
            Format::Exact => op.to_json(None)?,
            Format::Both => op.to_json(Some(self.bits()))?,
            Format::Numeric => {
                let mut doc = op.to_json(Some(self.bits()))?;
                if let Value::Object(map) = &mut doc {
                    map.remove("entries");
                }
                doc
            }
        })
    }
}

/// Output document and exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Response {
    pub doc: Value,
    pub code: i32,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) => 2,
        Error::EnumerationCap { .. } => 3,
        Error::Invariant(_) => 1,
    }
}

/// Error document; invariant failures carry the identity that broke.
pub fn error_response(e: &Error) -> Response {
    let doc = match e {
        Error::Validation(msg) => json!({ "error": "validation", "message": msg }),
        Error::EnumerationCap { what, size, cap } => json!({
            "error": "enumeration_cap",
            "message": e.to_string(),
            "what": what,
            "size": size.to_string(),
            "cap": cap.to_string(),
        }),
        Error::Invariant(identity) => json!({ "error": "invariant", "message": e.to_string(), "identity": identity }),
    };
    Response { doc, code: exit_code(e) }
}

/// Runs one request.
pub fn run(req: &Request) -> Response {
    let result = match req.command {
        Command::Discform => discform(req),
        Command::Jordan => jordan(req),
        Command::Milgram => milgram(req),
        Command::Rho => rho(req),
        Command::Gauss => gauss(req),
        Command::Kernel => kernel(req),
        Command::Verify => {
            return match WeilRep::new(&req.lattice) {
                Ok(rep) => {
                    let report = verify::run_all(&rep);
                    let code = if report.ok { 0 } else { 1 };
                    Response { doc: json!(report), code }
                }
                Err(e) => error_response(&e),
            }
        }
    };
    match result {
        Ok(doc) => Response { doc, code: 0 },
        Err(e) => error_response(&e),
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Validation(format!("this command needs {flag}")))
}

fn discform(req: &Request) -> Result<Value> {
    let form = req.lattice.discriminant_form()?;
    let elements: Vec<Value> = form
        .elements()?
        .iter()
        .map(|g| json!({ "coords": g.coords, "q": form.q(g).to_string() }))
        .collect();
    Ok(json!({
        "gram": req.lattice.gram(),
        "even": form.is_even(),
        "rank": form.rank(),
        "signature": form.signature(),
        "orders": form.orders(),
        "delta": form.delta(),
        "level": form.level(),
        "exponent": form.exponent(),
        "elements": elements,
    }))
}

fn component_json(comp: &JordanComponent) -> Value {
    let kind = match comp.parity {
        Some(Parity::Odd(_)) => json!("I"),
        Some(Parity::Even) => json!("II"),
        None => Value::Null,
    };
    json!({
        "symbol": comp.to_string(),
        "q": comp.q(),
        "rank": comp.n,
        "eps": comp.eps,
        "type": kind,
        "t": comp.parity.map(|p| p.t()),
    })
}

fn jordan(req: &Request) -> Result<Value> {
    let primes = match req.prime {
        Some(p) => vec![p],
        None => {
            let mut ps = prime_divisors(req.lattice.delta());
            if !ps.contains(&2) {
                ps.insert(0, 2);
            }
            ps
        }
    };
    let decomps: Vec<Value> = primes
        .iter()
        .map(|&p| {
            let jd = jordan_decompose(&req.lattice, p)?;
            let symbol: Vec<String> = jd.components.iter().map(|c| c.to_string()).collect();
            Ok(json!({
                "prime": p,
                "symbol": if symbol.is_empty() { format!("1^+{}", req.lattice.rank()) } else { symbol.join(" ") },
                "components": jd.components.iter().map(component_json).collect::<Vec<_>>(),
                "weil_index": req.scalar(&jd.weil_index()),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({ "gram": req.lattice.gram(), "decompositions": decomps }))
}

fn milgram(req: &Request) -> Result<Value> {
    let rep = WeilRep::new(&req.lattice)?;
    let sum = rep.form().milgram_sum()?;
    let ok = rep.milgram_check()?;
    if !ok {
        return Err(Error::Invariant(format!(
            "Σ e(q(γ)) = ζ₈^{} √{} fails: the sum is {sum}",
            rep.signature(),
            rep.dim()
        )));
    }
    Ok(json!({ "sum": req.scalar(&sum), "sgn": rep.signature(), "delta": rep.dim(), "ok": ok }))
}

fn rho(req: &Request) -> Result<Value> {
    let mat = require(req.matrix, "--matrix")?;
    let x = MpElement::new(mat, req.eps.unwrap_or(1))?;
    let rep = WeilRep::new(&req.lattice)?;
    let op = rep.rho(&x)?;
    Ok(json!({
        "gram": req.lattice.gram(),
        "matrix": [[mat.a, mat.b], [mat.c, mat.d]],
        "eps": x.eps,
        "basis": rep.elements().iter().map(|g| g.coords.clone()).collect::<Vec<_>>(),
        "operator": req.operator(&op)?,
    }))
}

fn gauss(req: &Request) -> Result<Value> {
    let p = require(req.prime, "--prime")?;
    let a = require(req.a, "--a")?;
    let c = require(req.c, "--c")?;
    let closed = gauss_sum_closed(&req.lattice, p, a, c)?;
    let (brute, note) = match gauss_sum_brute(&req.lattice, p, a, c) {
        Ok(b) => (Some(b), None),
        Err(e @ Error::EnumerationCap { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    if let Some(b) = &brute {
        if *b != closed {
            return Err(Error::Invariant(format!(
                "closed Gauss sum {closed} ≠ brute-force sum {b} at p={p}, a={a}, c={c}"
            )));
        }
    }
    let mut doc = json!({
        "prime": p,
        "a": a,
        "c": c,
        "closed": req.scalar(&closed),
        "brute": brute.as_ref().map(|b| req.scalar(b)),
        "equal": brute.is_some(),
    });
    if let Some(n) = note {
        doc["brute_skipped"] = json!(n);
    }
    Ok(doc)
}

fn kernel(req: &Request) -> Result<Value> {
    let rep = WeilRep::new(&req.lattice)?;
    let desc = rep.kernel_descriptor()?;
    Ok(json!({ "gram": req.lattice.gram(), "kernel": desc }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(command: Command, gram: &str) -> Request {
        Request::new(command, parse_lattice(gram).unwrap())
    }

    #[test]
    fn milgram_a1() {
        let out = run(&req(Command::Milgram, "[[2]]"));
        assert_eq!(out.code, 0);
        let expected = &ExactScalar::zeta8(1) * &ExactScalar::sqrt_rat(&weilrep::exact::rint(2)).unwrap();
        let sum: ExactScalar = serde_json::from_value(out.doc["sum"].clone()).unwrap();
        assert_eq!(sum, expected);
        assert_eq!(out.doc["sgn"], json!(1));
        assert_eq!(out.doc["delta"], json!(2));
        assert_eq!(out.doc["ok"], json!(true));
    }

    #[test]
    fn rho_s_on_a1() {
        let mut r = req(Command::Rho, "[[2]]");
        r.matrix = Some(SL2Z { a: 0, b: -1, c: 1, d: 0 });
        r.eps = Some(1);
        let out = run(&r);
        assert_eq!(out.code, 0);
        let rep = WeilRep::new(&r.lattice).unwrap();
        let expected = rep.rho_s().unwrap().entries().unwrap();
        let got: Vec<Vec<ExactScalar>> = serde_json::from_value(out.doc["operator"]["entries"].clone()).unwrap();
        assert_eq!(got, expected);
        assert_eq!(out.doc["operator"]["dim"], json!(2));
    }

    #[test]
    fn exit_codes() {
        let mut r = req(Command::Rho, "[[2]]");
        assert_eq!(run(&r).code, 2, "missing matrix");
        r.matrix = Some(SL2Z { a: 1, b: 1, c: 0, d: 1 });
        r.lattice = parse_lattice("[[1]]").unwrap();
        assert_eq!(run(&r).code, 2, "T on an odd lattice");
        let big = Request::new(Command::Discform, GramLattice::diagonal(&[1000, 1000, 1000]).unwrap());
        let out = run(&big);
        assert_eq!(out.code, 3, "{}", out.doc);
        let odd = req(Command::Milgram, "[[1]]");
        assert_eq!(run(&odd).code, 2);
        let e = error_response(&Error::Invariant("ρ(S)² = ρ(Z)".into()));
        assert_eq!(e.code, 1);
        assert_eq!(e.doc["identity"], json!("ρ(S)² = ρ(Z)"));
    }

    #[test]
    fn gauss_and_kernel() {
        let mut r = req(Command::Gauss, "[[2,1],[1,2]]");
        (r.prime, r.a, r.c) = (Some(3), Some(1), Some(3));
        let out = run(&r);
        assert_eq!(out.code, 0, "{}", out.doc);
        let parse = |v: &Value| serde_json::from_value::<ExactScalar>(v.clone()).unwrap();
        assert_eq!(parse(&out.doc["closed"]), parse(&out.doc["brute"]));
        assert_eq!(out.doc["equal"], json!(true));
        let out = run(&req(Command::Kernel, "[[2]]"));
        assert_eq!(out.doc["kernel"]["level"], json!(4));
        assert_eq!(out.doc["kernel"]["cover"], json!("Lift"));
    }

    #[test]
    fn jordan_symbols() {
        let out = run(&req(Command::Jordan, "[[2]]"));
        assert_eq!(out.code, 0);
        assert_eq!(out.doc["decompositions"][0]["symbol"], json!("2^+1_1"));
    }

    #[test]
    fn numeric_format() {
        let mut r = req(Command::Milgram, "[[2]]");
        r.format = Format::Both;
        let out = run(&r);
        let re: f64 = out.doc["sum"]["numeric"]["re"].as_str().map(|s| s.parse().unwrap()).unwrap_or_else(|| {
            out.doc["sum"]["numeric"]["re"].as_f64().unwrap()
        });
        assert!((re - 1.0).abs() < 1e-9);
        assert!(out.doc["sum"]["exact"].is_object());
    }
}
