//! Problem files and canonical JSON reports.
//!
//! Complex values are `[re, im]` pairs. On the rational backend scalars are
//! written as `"p/q"` strings; on the float backend as JSON numbers. Objects are
//! emitted with keys in alphabetical order, so re-serializing a parsed document
//! reproduces it byte for byte.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::asymptotics::{build_g_table_with, AsymptoticsError, GTable, Normalization};
use crate::classifier::{
    Evidence, ProblemSpec, RegularityVerdict, DEFAULT_ORDER_CAP, DEFAULT_TOLERANCE, MAX_ORDER_CAP,
};
use crate::determinant::{delta_table, BoundaryData, DeltaEntry, DeltaTable, DeterminantError};
use crate::funspace::{FunctionError, Poly, SmoothFunction, DEFAULT_INPUT_CAP};
use crate::scalar::{render, Cx, Rational, Scalar, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Determinant(#[from] DeterminantError),
}

fn invalid(path: &str, message: impl Into<String>) -> InputError {
    InputError::Invalid { path: path.to_string(), message: message.into() }
}

/// Parses JSON text, reporting syntax errors with line and column.
pub fn parse_json(text: &str) -> Result<Value, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })
}

/// Compact canonical JSON with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Rational,
    Float,
}

impl Backend {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rational" => Some(Backend::Rational),
            "float" => Some(Backend::Float),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Rational => Rational::NAME,
            Backend::Float => f64::NAME,
        }
    }
}

/// A parsed problem on the backend it asked for.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum AnyProblem {
    Rational(ProblemSpec<Rational>),
    Float(ProblemSpec<f64>),
}

impl AnyProblem {
    pub fn backend(&self) -> Backend {
        match self {
            AnyProblem::Rational(_) => Backend::Rational,
            AnyProblem::Float(_) => Backend::Float,
        }
    }

    pub fn to_f64(&self) -> ProblemSpec<f64> {
        match self {
            AnyProblem::Rational(p) => p.to_f64(),
            AnyProblem::Float(p) => p.clone(),
        }
    }

    pub fn m_cap(&self) -> usize {
        match self {
            AnyProblem::Rational(p) => p.m_cap,
            AnyProblem::Float(p) => p.m_cap,
        }
    }
}

pub fn scalar_to_json<T: Scalar>(v: &T) -> Value {
    if T::EXACT {
        Value::String(render(v))
    } else {
        // −0.0 is written as 0.0 so sums that drop the sign still round-trip.
        let x = v.to_f64();
        json!(if x == 0.0 { 0.0 } else { x })
    }
}

pub fn complex_to_json<T: Scalar>(z: &Cx<T>) -> Value {
    Value::Array(vec![scalar_to_json(&z.re), scalar_to_json(&z.im)])
}

pub fn c64_to_json(z: &C64) -> Value {
    json!([z.re, z.im])
}

/// Integers, `"p/q"` strings and terminating decimals on the rational
/// backend; any number or literal string on the float backend.
pub fn scalar_from_json<T: Scalar>(v: &Value, path: &str) -> Result<T, InputError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(invalid(path, "expected a number or a \"p/q\" string")),
    };
    T::parse_literal(&text).ok_or_else(|| {
        if T::EXACT {
            invalid(path, format!("`{text}` is not an integer, \"p/q\" string or terminating decimal"))
        } else {
            invalid(path, format!("`{text}` is not a number"))
        }
    })
}

/// `[re, im]`, or a bare real scalar.
pub fn complex_from_json<T: Scalar>(v: &Value, path: &str) -> Result<Cx<T>, InputError> {
    match v {
        Value::Array(parts) if parts.len() == 2 => Ok(Cx::new(
            scalar_from_json(&parts[0], &format!("{path}[0]"))?,
            scalar_from_json(&parts[1], &format!("{path}[1]"))?,
        )),
        Value::Array(_) => Err(invalid(path, "complex values are [re, im] pairs")),
        other => Ok(Cx::new(scalar_from_json(other, path)?, T::zero())),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object().ok_or_else(|| invalid(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

fn poly_to_json<T: Scalar>(p: &Poly<T>) -> Value {
    Value::Array(p.coeffs().iter().map(complex_to_json).collect())
}

fn poly_from_json<T: Scalar>(v: &Value, path: &str) -> Result<Poly<T>, InputError> {
    let items = array(v, path)?;
    let coeffs = items
        .iter()
        .enumerate()
        .map(|(k, c)| complex_from_json(c, &format!("{path}[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Poly::new(coeffs))
}

/// `{"kind": "poly", "coeffs": [...]}` for polynomials, otherwise
/// `{"kind": "trig", "harmonics": [{"k", "cos", "sin"}, ...]}` with polynomial
/// amplitudes.
pub fn function_to_json<T: Scalar>(f: &SmoothFunction<T>) -> Value {
    if f.max_harmonic() == 0 {
        return json!({"kind": "poly", "coeffs": poly_to_json(&f.polynomial_part())});
    }
    let harmonics: Vec<Value> =
        f.harmonics().map(|(k, c, s)| json!({"k": k, "cos": poly_to_json(c), "sin": poly_to_json(s)})).collect();
    json!({"kind": "trig", "harmonics": harmonics})
}

fn harmonic_index(v: &Value, path: &str) -> Result<u32, InputError> {
    v.as_u64()
        .and_then(|k| u32::try_from(k).ok())
        .ok_or_else(|| invalid(path, "harmonic index must be a non-negative integer"))
}

/// Reads a function in any of the accepted shapes: `poly`, `trig` with
/// `const`/`cos`/`sin` (`[k, re, im]` triples), or `trig` with `harmonics`.
pub fn function_from_json<T: Scalar>(v: &Value, path: &str) -> Result<SmoothFunction<T>, InputError> {
    let obj = object(v, path)?;
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| invalid(path, "missing \"kind\""))?;
    match kind {
        "poly" => {
            let coeffs = obj.get("coeffs").ok_or_else(|| invalid(path, "missing \"coeffs\""))?;
            Ok(SmoothFunction::from_poly(poly_from_json(coeffs, &format!("{path}.coeffs"))?))
        }
        "trig" if obj.contains_key("harmonics") => {
            let hs = array(&obj["harmonics"], &format!("{path}.harmonics"))?;
            let mut parts = Vec::with_capacity(hs.len());
            for (n, h) in hs.iter().enumerate() {
                let hp = format!("{path}.harmonics[{n}]");
                let ho = object(h, &hp)?;
                let k = harmonic_index(ho.get("k").unwrap_or(&Value::Null), &format!("{hp}.k"))?;
                let empty = Value::Array(Vec::new());
                let c = poly_from_json(ho.get("cos").unwrap_or(&empty), &format!("{hp}.cos"))?;
                let s = poly_from_json(ho.get("sin").unwrap_or(&empty), &format!("{hp}.sin"))?;
                parts.push((k, c, s));
            }
            Ok(SmoothFunction::from_harmonics(parts)?)
        }
        "trig" => {
            let constant = match obj.get("const") {
                Some(c) => complex_from_json(c, &format!("{path}.const"))?,
                None => Cx::new(T::zero(), T::zero()),
            };
            let terms = |key: &str| -> Result<Vec<(u32, Cx<T>)>, InputError> {
                let Some(list) = obj.get(key) else { return Ok(Vec::new()) };
                let tp = format!("{path}.{key}");
                array(list, &tp)?
                    .iter()
                    .enumerate()
                    .map(|(n, t)| {
                        let ep = format!("{tp}[{n}]");
                        match t.as_array().map(Vec::as_slice) {
                            Some([k, re, im]) => Ok((
                                harmonic_index(k, &format!("{ep}[0]"))?,
                                Cx::new(
                                    scalar_from_json(re, &format!("{ep}[1]"))?,
                                    scalar_from_json(im, &format!("{ep}[2]"))?,
                                ),
                            )),
                            _ => Err(invalid(&ep, "expected [k, re, im]")),
                        }
                    })
                    .collect()
            };
            Ok(SmoothFunction::trig(constant, &terms("cos")?, &terms("sin")?)?)
        }
        other => Err(invalid(&format!("{path}.kind"), format!("unknown function kind `{other}`"))),
    }
}

const BOUNDARY_KEYS: [&str; 8] = ["a11", "a10", "b11", "b10", "a21", "a20", "b21", "b20"];

fn boundary_from_json<T: Scalar>(v: &Value) -> Result<BoundaryData<T>, InputError> {
    let obj = object(v, "boundary")?;
    if let Some(unknown) = obj.keys().find(|k| !BOUNDARY_KEYS.contains(&k.as_str())) {
        return Err(invalid(&format!("boundary.{unknown}"), "unknown boundary coefficient"));
    }
    let get = |key: &str, required: bool| -> Result<Cx<T>, InputError> {
        match obj.get(key) {
            Some(v) => complex_from_json(v, &format!("boundary.{key}")),
            None if required => Err(invalid(&format!("boundary.{key}"), "missing coefficient")),
            None => Ok(Cx::new(T::zero(), T::zero())),
        }
    };
    Ok(BoundaryData {
        a11: get("a11", true)?,
        a10: get("a10", true)?,
        b11: get("b11", true)?,
        b10: get("b10", true)?,
        a21: get("a21", false)?,
        a20: get("a20", true)?,
        b21: get("b21", false)?,
        b20: get("b20", true)?,
    })
}

fn check_input_size<T: Scalar>(q: &SmoothFunction<T>) -> Result<(), InputError> {
    if q.degree() > DEFAULT_INPUT_CAP {
        return Err(invalid("q", format!("degree {} exceeds the input limit {DEFAULT_INPUT_CAP}", q.degree())));
    }
    if q.max_harmonic() as usize > DEFAULT_INPUT_CAP {
        return Err(invalid("q", format!("harmonic {} exceeds the input limit {DEFAULT_INPUT_CAP}", q.max_harmonic())));
    }
    Ok(())
}

fn spec_from_json<T: Scalar>(
    root: &Map<String, Value>,
    m_cap: usize,
    tolerance: f64,
) -> Result<ProblemSpec<T>, InputError> {
    let bc = boundary_from_json(root.get("boundary").ok_or_else(|| invalid("boundary", "missing"))?)?;
    let q = match root.get("q") {
        Some(q) => function_from_json(q, "q")?,
        None => return Err(invalid("q", "missing")),
    };
    check_input_size(&q)?;
    Ok(ProblemSpec { bc, q, m_cap, tolerance })
}

/// Parses a problem file; `backend` overrides the file's `"backend"` field.
pub fn parse_problem(text: &str, backend: Option<Backend>) -> Result<AnyProblem, InputError> {
    let value = parse_json(text)?;
    let root = object(&value, "$")?;
    const KEYS: [&str; 5] = ["backend", "boundary", "order_cap", "q", "tolerance"];
    if let Some(unknown) = root.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(invalid(unknown, "unknown field"));
    }
    let m_cap = match root.get("order_cap") {
        None => DEFAULT_ORDER_CAP,
        Some(v) => v
            .as_u64()
            .filter(|&m| m as usize <= MAX_ORDER_CAP)
            .ok_or_else(|| invalid("order_cap", format!("expected an integer in 0..={MAX_ORDER_CAP}")))?
            as usize,
    };
    let tolerance = match root.get("tolerance") {
        None => DEFAULT_TOLERANCE,
        Some(v) => v
            .as_f64()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| invalid("tolerance", "expected a positive number"))?,
    };
    let file_backend = match root.get("backend") {
        None => Backend::Rational,
        Some(v) => v
            .as_str()
            .and_then(Backend::parse)
            .ok_or_else(|| invalid("backend", "expected \"rational\" or \"float\""))?,
    };
    Ok(match backend.unwrap_or(file_backend) {
        Backend::Rational => AnyProblem::Rational(spec_from_json(root, m_cap, tolerance)?),
        Backend::Float => AnyProblem::Float(spec_from_json(root, m_cap, tolerance)?),
    })
}

/// Problem-file JSON for a problem; parsing it back yields the same problem.
pub fn problem_to_json<T: Scalar>(p: &ProblemSpec<T>) -> Value {
    let bc = &p.bc;
    let mut boundary = Map::new();
    for (key, v) in BOUNDARY_KEYS.iter().zip([&bc.a11, &bc.a10, &bc.b11, &bc.b10, &bc.a21, &bc.a20, &bc.b21, &bc.b20]) {
        boundary.insert(key.to_string(), complex_to_json(v));
    }
    json!({
        "backend": T::NAME,
        "boundary": boundary,
        "order_cap": p.m_cap,
        "q": function_to_json(&p.q),
        "tolerance": p.tolerance,
    })
}

fn evidence_to_json(e: &Evidence) -> Value {
    json!({"label": e.label, "route": e.route.name(), "satisfied": e.satisfied, "value": e.value})
}

/// `{"class", "order"?, "route", "evidence"?}`; `order` is present for
/// almost-regular verdicts only.
pub fn verdict_to_json(v: &RegularityVerdict, with_evidence: bool) -> Value {
    let mut out = Map::new();
    out.insert("class".into(), json!(v.class.name()));
    if let crate::classifier::RegularityClass::AlmostRegular(m) = v.class {
        out.insert("order".into(), json!(m));
    }
    out.insert("route".into(), json!(v.route.name()));
    if with_evidence {
        out.insert("evidence".into(), Value::Array(v.evidence.iter().map(evidence_to_json).collect()));
    }
    Value::Object(out)
}

pub fn spectrum_to_json(roots: &[C64]) -> Value {
    Value::Array(roots.iter().map(c64_to_json).collect())
}

fn normalization_name(n: Normalization) -> &'static str {
    match n {
        Normalization::ZeroAtOrigin => "zero-at-origin",
        Normalization::PlainDerivative => "plain-derivative",
    }
}

fn normalization_from_name(s: &str) -> Option<Normalization> {
    match s {
        "zero-at-origin" => Some(Normalization::ZeroAtOrigin),
        "plain-derivative" => Some(Normalization::PlainDerivative),
        _ => None,
    }
}

/// Coefficient functions and, for reduced normal-form data, the δ table.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion<T: Scalar> {
    pub g: GTable<T>,
    pub delta: Option<DeltaTable<T>>,
}

impl<T: Scalar> Expansion<T> {
    pub fn compute(p: &ProblemSpec<T>, order: usize, normalization: Normalization) -> Result<Self, InputError> {
        let g = build_g_table_with(&p.q, order, normalization)?;
        let delta = if p.bc.check_normal_form().is_ok() { Some(delta_table(&p.bc, &g)?) } else { None };
        Ok(Expansion { g, delta })
    }

    pub fn to_json(&self) -> Value {
        let mut g = Vec::new();
        for i in 1..=2 {
            for nu in 0..=1 {
                for (s, f) in self.g.column(i, nu).iter().enumerate() {
                    g.push(json!({"function": function_to_json(f), "i": i, "nu": nu, "s": s}));
                }
            }
        }
        let delta = match &self.delta {
            None => Value::Null,
            Some(dt) => {
                let row = |k: i32| Value::Array(dt.row(k).iter().map(|e| complex_to_json(&e.value)).collect());
                json!({"minus": row(-1), "plus": row(1), "zero": row(0)})
            }
        };
        json!({
            "backend": T::NAME,
            "delta": delta,
            "g": g,
            "normalization": normalization_name(self.g.normalization()),
            "order": self.g.order(),
        })
    }

    fn from_json(root: &Map<String, Value>) -> Result<Self, InputError> {
        let order = root
            .get("order")
            .and_then(Value::as_u64)
            .ok_or_else(|| invalid("order", "expected a non-negative integer"))? as usize;
        let normalization = root
            .get("normalization")
            .and_then(Value::as_str)
            .and_then(normalization_from_name)
            .ok_or_else(|| invalid("normalization", "unknown normalization"))?;
        let mut columns: [[Vec<Option<SmoothFunction<T>>>; 2]; 2] = Default::default();
        for col in columns.iter_mut().flatten() {
            col.resize(order + 1, None);
        }
        let entries = array(root.get("g").unwrap_or(&Value::Null), "g")?;
        for (n, e) in entries.iter().enumerate() {
            let path = format!("g[{n}]");
            let obj = object(e, &path)?;
            let idx = |key: &str| obj.get(key).and_then(Value::as_u64).map(|v| v as usize);
            let (i, nu, s) = match (idx("i"), idx("nu"), idx("s")) {
                (Some(i @ 1..=2), Some(nu @ 0..=1), Some(s)) if s <= order => (i, nu, s),
                _ => return Err(invalid(&path, "bad (i, nu, s) index")),
            };
            let f = function_from_json(obj.get("function").unwrap_or(&Value::Null), &format!("{path}.function"))?;
            columns[i - 1][nu][s] = Some(f);
        }
        let columns = columns.map(|pair| pair.map(|col| col.into_iter().collect::<Option<Vec<_>>>()));
        let [[a, b], [c, d]] = columns;
        let (Some(a), Some(b), Some(c), Some(d)) = (a, b, c, d) else {
            return Err(invalid("g", "missing entries"));
        };
        let g = GTable::from_columns(normalization, [[a, b], [c, d]])?;
        let delta = match root.get("delta") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let obj = object(v, "delta")?;
                let row = |key: &str| -> Result<Vec<DeltaEntry<T>>, InputError> {
                    let path = format!("delta.{key}");
                    array(obj.get(key).unwrap_or(&Value::Null), &path)?
                        .iter()
                        .enumerate()
                        .map(|(n, z)| {
                            Ok(DeltaEntry { value: complex_from_json(z, &format!("{path}[{n}]"))?, scale: 0.0 })
                        })
                        .collect()
                };
                let rows = [row("minus")?, row("zero")?, row("plus")?];
                Some(DeltaTable::from_rows(rows).ok_or_else(|| invalid("delta", "ragged rows"))?)
            }
        };
        Ok(Expansion { g, delta })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyExpansion {
    Rational(Expansion<Rational>),
    Float(Expansion<f64>),
}

impl AnyExpansion {
    pub fn to_json(&self) -> Value {
        match self {
            AnyExpansion::Rational(e) => e.to_json(),
            AnyExpansion::Float(e) => e.to_json(),
        }
    }
}

/// Reads an expansion document written by [`Expansion::to_json`].
pub fn parse_expansion(text: &str) -> Result<AnyExpansion, InputError> {
    let value = parse_json(text)?;
    let root = object(&value, "$")?;
    match root.get("backend").and_then(Value::as_str).and_then(Backend::parse) {
        Some(Backend::Rational) => Ok(AnyExpansion::Rational(Expansion::from_json(root)?)),
        Some(Backend::Float) => Ok(AnyExpansion::Float(Expansion::from_json(root)?)),
        None => Err(invalid("backend", "expected \"rational\" or \"float\"")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{cross_validate, RegularityClass};
    use crate::scalar::cx_ratio;

    const SECOND_ORDER: &str = r#"{
        "boundary": {"a11": [1, 0], "a10": [0, 0], "b11": [1, 0], "b10": [0, 0], "a20": [1, 0], "b20": [-1, 0]},
        "q": {"kind": "poly", "coeffs": [[0, 0], [1, 0]]}
    }"#;

    #[test]
    fn defaults_and_backend_override() {
        let p = parse_problem(SECOND_ORDER, None).unwrap();
        let AnyProblem::Rational(spec) = &p else { panic!("expected rational") };
        assert_eq!((spec.m_cap, spec.tolerance), (DEFAULT_ORDER_CAP, DEFAULT_TOLERANCE));
        assert_eq!(cross_validate(spec).unwrap().class, RegularityClass::AlmostRegular(2));
        assert_eq!(parse_problem(SECOND_ORDER, Some(Backend::Float)).unwrap().backend(), Backend::Float);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_problem("{\n  \"boundary\": [1,\n}", None).unwrap_err();
        match err {
            InputError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_carry_path() {
        let text = SECOND_ORDER.replace("\"a20\": [1, 0]", "\"a20\": [\"1/0x\", 0]");
        let err = parse_problem(&text, None).unwrap_err();
        assert!(matches!(err, InputError::Invalid { ref path, .. } if path == "boundary.a20[0]"), "{err}");
        let text = SECOND_ORDER.replace("\"b20\": [-1, 0]", "\"b20\": [\"-1/2\", \"1/3\"]");
        let AnyProblem::Rational(p) = parse_problem(&text, None).unwrap() else { panic!() };
        assert_eq!(p.bc.b20, Cx::new(Rational::from_ratio(-1, 2), Rational::from_ratio(1, 3)));
        let trig = r#"{"boundary": {"a11": 1, "a10": 0, "b11": 0, "b10": 0, "a20": 0, "b20": 1},
                       "q": {"kind": "trig", "const": [1, 0], "cos": [[1, 2, 0]], "sin": []}}"#;
        assert!(matches!(parse_problem(trig, None), Err(InputError::Function(FunctionError::TrigUnsupported(_)))));
        assert!(parse_problem(trig, Some(Backend::Float)).is_ok());
    }

    #[test]
    fn problem_json_round_trip() {
        let text = to_canonical_string(&problem_to_json(&ProblemSpec::new(
            BoundaryData::<Rational>::from_ints(1, 2, 3, 4, 5, 6),
            SmoothFunction::polynomial(vec![cx_ratio(1, 3), cx_ratio(-2, 7)]),
        )));
        let AnyProblem::Rational(p) = parse_problem(&text, None).unwrap() else { panic!() };
        assert_eq!(to_canonical_string(&problem_to_json(&p)), text);
    }

    #[test]
    fn expansion_round_trip_both_backends() {
        let AnyProblem::Rational(p) = parse_problem(SECOND_ORDER, None).unwrap() else { panic!() };
        let e = Expansion::compute(&p, 3, Normalization::ZeroAtOrigin).unwrap();
        let text = to_canonical_string(&e.to_json());
        let back = parse_expansion(&text).unwrap();
        assert_eq!(back, AnyExpansion::Rational(Expansion { delta: back_delta(&e), ..e.clone() }));
        assert_eq!(to_canonical_string(&back.to_json()), text);

        let pf = p.to_f64();
        let trig =
            SmoothFunction::trig(Cx::new(0.5, 0.0), &[(1, Cx::new(0.25, 0.0))], &[(2, Cx::new(0.0, 1.0))]).unwrap();
        let pf = ProblemSpec { q: &pf.q + &trig, ..pf };
        let text = to_canonical_string(&Expansion::compute(&pf, 2, Normalization::PlainDerivative).unwrap().to_json());
        assert_eq!(to_canonical_string(&parse_expansion(&text).unwrap().to_json()), text);
    }

    fn back_delta(e: &Expansion<Rational>) -> Option<DeltaTable<Rational>> {
        e.delta.as_ref().map(|dt| {
            let strip = |k| dt.row(k).iter().map(|x| DeltaEntry { value: x.value.clone(), scale: 0.0 }).collect();
            DeltaTable::from_rows([strip(-1), strip(0), strip(1)]).unwrap()
        })
    }

    #[test]
    fn verdict_json_shape() {
        let AnyProblem::Rational(p) = parse_problem(SECOND_ORDER, None).unwrap() else { panic!() };
        let v = cross_validate(&p).unwrap();
        let text = serde_json::to_string(&verdict_to_json(&v, false)).unwrap();
        assert_eq!(text, r#"{"class":"AlmostRegular","order":2,"route":"both-agree"}"#);
    }
}
