//! Bundled constants and the JSON descriptor format.
//!
//! | constant            | formula                                          |
//! |---------------------|--------------------------------------------------|
//! | `e`                 | `2 * sum 1/(2 i!)`                               |
//! | `pi`                | `16 arctan(1/5) - 4 arctan(1/239)`               |
//! | `zeta3`             | Apéry-type series, ratio `-j^5 / (32 (2j+1)^5)`  |
//! | `zeta3-uncorrected` | same with `q(j) = 32 (j+1)^5`; not zeta(3)       |
//!
//! The `zeta3-uncorrected` entry is kept so the discrepancy between the two
//! denominators can be demonstrated; see the README.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bigfix::{pow2, BigInt, Dyadic, Rational};
use crate::binsplit::{classical_series, exact_product, split_sum};
use crate::error::{Error, Result};
use crate::linspace::{evaluate_series_with, EvalOptions};
use crate::series::{check_conditions, Polynomial, SeriesDescriptor, TailModel};

/// A rational linear combination of series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantFormula {
    pub name: String,
    pub terms: Vec<(Rational, SeriesDescriptor)>,
}

impl ConstantFormula {
    pub fn single(series: SeriesDescriptor) -> Self {
        Self {
            name: series.name.clone(),
            terms: vec![(Rational::one(), series)],
        }
    }
}

pub const CONSTANT_NAMES: &[&str] = &["e", "pi", "zeta3", "zeta3-uncorrected"];

fn ratio(n: i64, d: i64) -> Rational {
    Rational::from_i64s(n, d).expect("nonzero denominator")
}

fn tail(alpha: Rational, beta: u64) -> TailModel {
    TailModel::new(alpha, beta).expect("nonnegative alpha")
}

/// `sum 2^-(i+2) = 1/2`; handy closed-form test case.
pub fn geometric_series() -> SeriesDescriptor {
    SeriesDescriptor {
        name: "geometric".into(),
        a: Polynomial::constant(1),
        b: Polynomial::constant(2),
        p: Polynomial::constant(1),
        q: Polynomial::constant(2),
        tail: tail(Rational::one(), 0),
        prefactor: Rational::one(),
    }
}

/// `e = 2 * sum 1/(2 i!)`. `q(0)` is overridden to 1 so the product is `1/i!`.
pub fn exp_series() -> SeriesDescriptor {
    SeriesDescriptor {
        name: "exp".into(),
        a: Polynomial::constant(1),
        b: Polynomial::constant(2),
        p: Polynomial::constant(1),
        q: Polynomial::from_i64s(&[0, 1]).with_override(0, BigInt::from(1)),
        // (ceil(k/4) + 7)! exceeds 2^(k+1) for every k >= 1
        tail: tail(ratio(1, 4), 6),
        prefactor: Rational::from(2),
    }
}

/// `arctan(1/x) = (2/x) sum (-1)^i / (2 (2i+1) x^(2i))`.
pub fn arctan_series(x: i64) -> SeriesDescriptor {
    assert!(x >= 2, "arctan series needs x >= 2");
    // each term gains log2(x^2) bits; alpha is a rational upper bound of 1/log2(x^2)
    let alpha = match x {
        5 => ratio(5, 23),
        239 => ratio(5, 79),
        _ => {
            let bits = 63 - ((x * x) as u64).leading_zeros() as i64; // floor(log2 x^2)
            ratio(1, bits)
        }
    };
    SeriesDescriptor {
        name: format!("arctan(1/{x})"),
        a: Polynomial::constant(1),
        b: Polynomial::from_i64s(&[2, 4]),
        p: Polynomial::constant(-1).with_override(0, BigInt::from(1)),
        q: Polynomial::constant(x * x).with_override(0, BigInt::from(1)),
        tail: tail(alpha, 1),
        prefactor: ratio(2, x),
    }
}

fn zeta3_numerator() -> Polynomial {
    Polynomial::from_i64s(&[77, 250, 205])
}

fn zeta3_p() -> Polynomial {
    Polynomial::from_i64s(&[0, 0, 0, 0, 0, -1]).with_override(0, BigInt::from(1))
}

/// `zeta(3) = sum (-1)^i (205 i^2 + 250 i + 77) ((i+1)!)^5 (i!)^5 / (2 ((2i+2)!)^5)`.
pub fn zeta3_series() -> SeriesDescriptor {
    // 32 (2j+1)^5 expanded
    let q = Polynomial::from_i64s(&[32, 320, 1280, 2560, 2560, 1024]);
    SeriesDescriptor {
        name: "zeta3".into(),
        a: zeta3_numerator(),
        b: Polynomial::constant(2),
        p: zeta3_p(),
        q,
        // term ratio tends to 2^-10
        tail: tail(ratio(1, 10), 1),
        prefactor: Rational::one(),
    }
}

/// The tabulated variant with `q(j) = 32 (j+1)^5`. Converges to about
/// 1.1950938, not to zeta(3).
pub fn zeta3_uncorrected_series() -> SeriesDescriptor {
    // 32 (j+1)^5 expanded
    let q = Polynomial::from_i64s(&[32, 160, 320, 320, 160, 32]);
    SeriesDescriptor {
        name: "zeta3-uncorrected".into(),
        a: zeta3_numerator(),
        b: Polynomial::constant(2),
        p: zeta3_p(),
        q,
        // term ratio tends to 2^-5
        tail: tail(ratio(1, 4), 1),
        prefactor: Rational::one(),
    }
}

pub fn get_constant(name: &str) -> Result<ConstantFormula> {
    match name {
        "e" => Ok(ConstantFormula {
            name: "e".into(),
            terms: vec![(Rational::one(), exp_series())],
        }),
        "pi" => Ok(ConstantFormula {
            name: "pi".into(),
            terms: vec![
                (Rational::from(16), arctan_series(5)),
                (Rational::from(-4), arctan_series(239)),
            ],
        }),
        "zeta3" => Ok(ConstantFormula::single(zeta3_series())),
        "zeta3-uncorrected" => Ok(ConstantFormula::single(zeta3_uncorrected_series())),
        other => Err(Error::Usage(format!(
            "unknown constant '{other}'; available: {}",
            CONSTANT_NAMES.join(", ")
        ))),
    }
}

/// Every series descriptor shipped in the catalog.
pub fn bundled_series() -> Vec<SeriesDescriptor> {
    vec![
        exp_series(),
        arctan_series(5),
        arctan_series(239),
        zeta3_series(),
    ]
}

const E_DIGITS: &str = "2.718281828459045235360287471352662497757247093699959574966967627724077";
const PI_DIGITS: &str = "3.141592653589793238462643383279502884197169399375105820974944592307816";
const ZETA3_DIGITS: &str = "1.202056903159594285399738161511449990764986292340498881792271555341838";
const ATAN5_DIGITS: &str = "0.197395559849880758370049765194790293447585103787852101517688940241034";
const ATAN239_DIGITS: &str =
    "0.004184076002074723864538214959285452741048065307631950827019612887181778";

/// Bits to which these digit strings are trustworthy (about 68 decimals).
pub const REFERENCE_BITS: u64 = 220;

fn parse_decimal(s: &str) -> Rational {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let num = BigInt::from_str(&format!("{int}{frac}")).expect("decimal literal");
    let den = BigInt::from_str(&format!("1{}", "0".repeat(frac.len()))).expect("power of ten");
    Rational::new(num, den).expect("nonzero denominator")
}

/// Published decimal value of a constant or of `prefactor * S` for a bundled
/// series, keyed by name.
pub fn reference_value(name: &str) -> Option<Rational> {
    let digits = match name {
        "e" | "exp" => E_DIGITS,
        "pi" => PI_DIGITS,
        "zeta3" | "zeta3-uncorrected" => ZETA3_DIGITS,
        "arctan(1/5)" => ATAN5_DIGITS,
        "arctan(1/239)" => ATAN239_DIGITS,
        _ => return None,
    };
    Some(parse_decimal(digits))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub series: String,
    pub probe_bits: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `|S(mu(k) + extra) - S(mu(k))|`, computed exactly.
pub fn tail_proxy(s: &SeriesDescriptor, k: u64, extra: u64) -> Result<Rational> {
    let mu = s.tail.terms(k);
    let head = exact_product(s, 0, mu)?;
    let rest = split_sum(s, mu + 1, mu + extra)?.into_sum();
    Ok((&head * &rest).abs())
}

fn ulp(bits: u64) -> Rational {
    Rational::new(BigInt::from(1), pow2(bits)).expect("nonzero")
}

/// Admissibility, tail-model and cross-algorithm checks at `probe_bits`, plus
/// a reference-value check when a published value is known for the name.
pub fn validate_descriptor(s: &SeriesDescriptor, probe_bits: u64) -> ValidationReport {
    let probe_bits = probe_bits.max(8);
    let mut checks = Vec::new();

    let range = s.tail.terms(probe_bits);
    let conditions = check_conditions(s, range);
    checks.push(Check {
        name: "conditions".into(),
        passed: conditions.is_ok(),
        detail: match &conditions {
            Ok(()) => format!("b(i) >= 2 and |p(j)/q(j)| <= 1 on 0..={range}"),
            Err(e) => e.to_string(),
        },
    });
    if conditions.is_err() {
        return ValidationReport {
            series: s.name.clone(),
            probe_bits,
            checks,
        };
    }

    let mut ks: Vec<u64> = [8, 16, 32, 64]
        .into_iter()
        .filter(|&k| k < probe_bits)
        .collect();
    ks.push(probe_bits);
    let mut tail_detail = Vec::new();
    let mut tail_ok = true;
    for &k in &ks {
        match tail_proxy(s, k, 20) {
            Ok(diff) => {
                let ok = diff <= ulp(k + 1);
                tail_ok &= ok;
                if !ok {
                    tail_detail.push(format!(
                        "k={k}: |S(mu+20) - S(mu)| above 2^-{} (mu={})",
                        k + 1,
                        s.tail.terms(k)
                    ));
                }
            }
            Err(e) => {
                tail_ok = false;
                tail_detail.push(format!("k={k}: {e}"));
            }
        }
    }
    checks.push(Check {
        name: "tail".into(),
        passed: tail_ok,
        detail: if tail_ok {
            format!("tail proxy within 2^-(k+1) for k in {ks:?}")
        } else {
            tail_detail.join("; ")
        },
    });

    let linspace = evaluate_series_with(s, probe_bits, EvalOptions::default());
    let classical = classical_series(s, probe_bits);
    let agreement = match (&linspace, &classical) {
        (Ok(l), Ok(c)) => {
            let diff = (&l.value - &c.value).abs().to_rational();
            let ok = diff <= ulp(probe_bits - 1);
            Check {
                name: "agreement".into(),
                passed: ok,
                detail: format!(
                    "linspace vs classical at {probe_bits} bits: |delta| {} 2^-{}",
                    if ok { "<=" } else { ">" },
                    probe_bits - 1
                ),
            }
        }
        (Err(e), _) | (_, Err(e)) => Check {
            name: "agreement".into(),
            passed: false,
            detail: e.to_string(),
        },
    };
    checks.push(agreement);

    if let (Some(reference), Ok(l)) = (reference_value(&s.name), &linspace) {
        let tol_bits = probe_bits.min(REFERENCE_BITS) - 1;
        let diff = (&l.value.to_rational() - &reference).abs();
        let ok = diff <= ulp(tol_bits);
        let detail = match diff.ceil_log2_abs() {
            Some(e) if !ok => format!("differs from the published value by about 2^{e}"),
            _ => format!("within 2^-{tol_bits} of the published value"),
        };
        checks.push(Check {
            name: "reference".into(),
            passed: ok,
            detail,
        });
    }

    ValidationReport {
        series: s.name.clone(),
        probe_bits,
        checks,
    }
}

// ---------------------------------------------------------------------------
// JSON descriptor files

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverrideJson {
    pub index: u64,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailJson {
    pub alpha: RationalJson,
    pub beta: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorJson {
    pub name: String,
    #[serde(default = "unit_prefactor")]
    pub prefactor: RationalJson,
    pub a: PolynomialJson,
    pub b: PolynomialJson,
    pub p: PolynomialJson,
    pub q: PolynomialJson,
    pub tail: TailJson,
}

fn unit_prefactor() -> RationalJson {
    RationalJson {
        num: "1".into(),
        den: "1".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesRefJson {
    Inline(Box<DescriptorJson>),
    /// Path relative to the formula file.
    File(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaTermJson {
    pub coeff: RationalJson,
    pub series: SeriesRefJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaJson {
    pub name: String,
    pub terms: Vec<FormulaTermJson>,
}

fn parse_int(field: &str, s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim())
        .map_err(|_| Error::Parse(format!("field {field}: invalid integer {s:?}")))
}

fn parse_rational(field: &str, r: &RationalJson) -> Result<Rational> {
    let num = parse_int(&format!("{field}.num"), &r.num)?;
    let den = parse_int(&format!("{field}.den"), &r.den)?;
    Rational::new(num, den).map_err(|_| Error::Parse(format!("field {field}.den: zero denominator")))
}

fn parse_polynomial(field: &str, p: &PolynomialJson) -> Result<Polynomial> {
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| parse_int(&format!("{field}.coeffs[{i}]"), c))
        .collect::<Result<Vec<_>>>()?;
    let mut poly = Polynomial::new(coeffs)
        .map_err(|_| Error::Parse(format!("field {field}.coeffs: empty coefficient list")))?;
    for (k, o) in p.overrides.iter().enumerate() {
        let v = parse_int(&format!("{field}.overrides[{k}].value"), &o.value)?;
        poly = poly.with_override(o.index, v);
    }
    Ok(poly)
}

impl DescriptorJson {
    pub fn to_descriptor(&self) -> Result<SeriesDescriptor> {
        let alpha = parse_rational("tail.alpha", &self.tail.alpha)?;
        let tail = TailModel::new(alpha, self.tail.beta)
            .map_err(|e| Error::Parse(format!("field tail.alpha: {e}")))?;
        Ok(SeriesDescriptor {
            name: self.name.clone(),
            a: parse_polynomial("a", &self.a)?,
            b: parse_polynomial("b", &self.b)?,
            p: parse_polynomial("p", &self.p)?,
            q: parse_polynomial("q", &self.q)?,
            tail,
            prefactor: parse_rational("prefactor", &self.prefactor)?,
        })
    }

    pub fn from_descriptor(s: &SeriesDescriptor) -> Self {
        Self {
            name: s.name.clone(),
            prefactor: rational_json(&s.prefactor),
            a: polynomial_json(&s.a),
            b: polynomial_json(&s.b),
            p: polynomial_json(&s.p),
            q: polynomial_json(&s.q),
            tail: TailJson {
                alpha: rational_json(s.tail.alpha()),
                beta: s.tail.beta(),
            },
        }
    }
}

fn rational_json(r: &Rational) -> RationalJson {
    RationalJson {
        num: r.num().to_string(),
        den: r.den().to_string(),
    }
}

fn polynomial_json(p: &Polynomial) -> PolynomialJson {
    PolynomialJson {
        coeffs: p.coeffs().iter().map(|c| c.to_string()).collect(),
        overrides: p
            .overrides()
            .iter()
            .map(|(i, v)| OverrideJson {
                index: *i,
                value: v.to_string(),
            })
            .collect(),
    }
}

pub fn descriptor_to_json(s: &SeriesDescriptor) -> String {
    serde_json::to_string_pretty(&DescriptorJson::from_descriptor(s)).expect("serializable")
}

pub fn formula_to_json(f: &ConstantFormula) -> String {
    let doc = FormulaJson {
        name: f.name.clone(),
        terms: f
            .terms
            .iter()
            .map(|(c, s)| FormulaTermJson {
                coeff: rational_json(c),
                series: SeriesRefJson::Inline(Box::new(DescriptorJson::from_descriptor(s))),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Contents of a descriptor file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loaded {
    Series(SeriesDescriptor),
    Formula(ConstantFormula),
}

impl Loaded {
    pub fn into_formula(self) -> ConstantFormula {
        match self {
            Loaded::Series(s) => ConstantFormula::single(s),
            Loaded::Formula(f) => f,
        }
    }
}

/// Parse without validating. `base_dir` resolves file references in formulas.
pub fn parse_descriptor(text: &str, base_dir: &Path) -> Result<Loaded> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("terms").is_some() {
        let doc: FormulaJson =
            serde_json::from_value(value).map_err(|e| Error::Parse(format!("formula: {e}")))?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for (i, term) in doc.terms.iter().enumerate() {
            let coeff = parse_rational(&format!("terms[{i}].coeff"), &term.coeff)?;
            let series = match &term.series {
                SeriesRefJson::Inline(d) => d.to_descriptor()?,
                SeriesRefJson::File(rel) => {
                    let path: PathBuf = base_dir.join(rel);
                    let text = std::fs::read_to_string(&path)?;
                    match parse_descriptor(&text, path.parent().unwrap_or(base_dir))? {
                        Loaded::Series(s) => s,
                        Loaded::Formula(_) => {
                            return Err(Error::Parse(format!(
                                "field terms[{i}].series: {} is a formula, expected a series",
                                path.display()
                            )))
                        }
                    }
                }
            };
            terms.push((coeff, series));
        }
        if terms.is_empty() {
            return Err(Error::Parse("field terms: formula has no terms".into()));
        }
        return Ok(Loaded::Formula(ConstantFormula {
            name: doc.name,
            terms,
        }));
    }
    let doc: DescriptorJson =
        serde_json::from_value(value).map_err(|e| Error::Parse(format!("descriptor: {e}")))?;
    Ok(Loaded::Series(doc.to_descriptor()?))
}

/// Bits at which loaded descriptors are probed.
pub const LOAD_PROBE_BITS: u64 = 64;

fn validate_loaded(s: &SeriesDescriptor) -> Result<()> {
    check_conditions(s, s.tail.terms(LOAD_PROBE_BITS))?;
    let report = validate_descriptor(s, LOAD_PROBE_BITS);
    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed && c.name != "reference")
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Descriptor(format!("{}: {}", s.name, failed.join("; "))))
    }
}

/// Read, parse and validate a descriptor or formula file.
pub fn load_descriptor(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    let loaded = parse_descriptor(&text, path.parent().unwrap_or(Path::new(".")))?;
    match &loaded {
        Loaded::Series(s) => validate_loaded(s)?,
        Loaded::Formula(f) => {
            for (_, s) in &f.terms {
                validate_loaded(s)?;
            }
        }
    }
    Ok(loaded)
}

/// Position (1-based, counting fractional bits) of the first bit where the
/// truncated binary expansions of `a` and `b` differ, looking at `bits`
/// fractional bits. `Some(0)` means the integer parts differ.
pub fn first_disagreement(a: &Dyadic, b: &Dyadic, bits: u64) -> Option<u64> {
    let ra = a.render_digits(2, bits).ok()?;
    let rb = b.render_digits(2, bits).ok()?;
    let (ia, fa) = ra.split_once('.').unwrap_or((&ra, ""));
    let (ib, fb) = rb.split_once('.').unwrap_or((&rb, ""));
    if ia != ib {
        return Some(0);
    }
    fa.bytes()
        .zip(fb.bytes())
        .position(|(x, y)| x != y)
        .map(|p| p as u64 + 1)
}
