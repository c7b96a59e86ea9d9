//! The `ramify` subcommands as library functions. Each returns a JSON value
//! on success or a [`CommandError`] carrying the process exit code.

use serde_json::{json, Value};
use thiserror::Error;

use crate::automorphism::{AutomorphismError, DiskAutomorphism, FiltrationReport};
use crate::lift::{fixed_point_divisor, homography_lift, LiftError, LiftRing, LiftScalar, LiftSeries};
use crate::oort::{
    genus_check, jumps_to_orbits, orbits_to_jumps, verify_artin_identity, OortError, OrbitProfile,
    OrbitProfileLiteral,
};
use crate::reports::{
    artin_table, different_valuation, hasse_arf_holds, JumpProfile, JumpProfileLiteral, ProfileError,
};
use crate::selfcheck::{run_selfcheck, Budget};
use crate::series::{SeriesLiteral, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommandError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{kind}: {message}")]
    Precondition { kind: &'static str, message: String },
    #[error("{message}")]
    HasseArfViolation { index: usize, message: String },
    /// A check ran and failed; the report is still produced.
    #[error("checks failed")]
    ChecksFailed(Value),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Parse(_) => 2,
            CommandError::Precondition { .. } => 3,
            CommandError::HasseArfViolation { .. } => 4,
            CommandError::ChecksFailed(_) => 1,
        }
    }

    /// Machine-readable diagnostic printed on stdout.
    pub fn diagnostic(&self) -> Value {
        match self {
            CommandError::Parse(message) => json!({"error": "ParseError", "message": message}),
            CommandError::Precondition { kind, message } => json!({"error": kind, "message": message}),
            CommandError::HasseArfViolation { index, message } => {
                json!({"error": "HasseArfViolation", "violation_index": index, "message": message})
            }
            CommandError::ChecksFailed(report) => report.clone(),
        }
    }
}

fn automorphism_kind(e: &AutomorphismError) -> &'static str {
    match e {
        AutomorphismError::Series(_) => "SeriesError",
        AutomorphismError::NotAnAutomorphism(_) => "NotAnAutomorphism",
        AutomorphismError::NotWild(_) => "NotWild",
        AutomorphismError::NotAPnTorsionElement { .. } => "NotAPnTorsionElement",
        AutomorphismError::IndistinguishableFromIdentity(_) => "IndistinguishableFromIdentity",
        AutomorphismError::InsufficientPrecision(_) => "InsufficientPrecision",
        AutomorphismError::WrongOrder(_) => "WrongOrder",
        AutomorphismError::InvalidFiltration(_) => "InvalidFiltration",
    }
}

impl From<AutomorphismError> for CommandError {
    fn from(e: AutomorphismError) -> Self {
        CommandError::Precondition { kind: automorphism_kind(&e), message: e.to_string() }
    }
}

impl From<OortError> for CommandError {
    fn from(e: OortError) -> Self {
        let kind = match &e {
            OortError::HasseArfViolation { index } => {
                return CommandError::HasseArfViolation { index: *index, message: e.to_string() }
            }
            OortError::InvalidPrime(_) => "InvalidPrime",
            OortError::InvalidProfile(_) => "InvalidProfile",
            OortError::StrictViolation { .. } => "StrictViolation",
            OortError::IndexOutOfRange { .. } => "IndexOutOfRange",
            OortError::ProfileMismatch { .. } => "ProfileMismatch",
            OortError::NonIntegralGenus { .. } => "NonIntegralGenus",
            OortError::BudgetExceeded(_) => "BudgetExceeded",
        };
        CommandError::Precondition { kind, message: e.to_string() }
    }
}

impl From<ProfileError> for CommandError {
    fn from(e: ProfileError) -> Self {
        let kind = match e {
            ProfileError::InvalidPrime(_) => "InvalidPrime",
            ProfileError::InvalidJumps(_) => "InvalidJumps",
            ProfileError::LengthMismatch { .. } => "LengthMismatch",
        };
        CommandError::Precondition { kind, message: e.to_string() }
    }
}

impl From<LiftError> for CommandError {
    fn from(e: LiftError) -> Self {
        if let LiftError::Automorphism(inner) = e {
            return inner.into();
        }
        let kind = match e {
            LiftError::InvalidPrime(_) => "InvalidPrime",
            LiftError::InvalidDepth { .. } => "InvalidDepth",
            LiftError::WrongCoordinateCount { .. } => "WrongCoordinateCount",
            LiftError::NotAUnit => "NotAUnit",
            LiftError::PrecisionExhausted { .. } => "PrecisionExhausted",
            LiftError::DegreeMismatch { .. } => "DegreeMismatch",
            LiftError::VerificationFailed => "VerificationFailed",
            _ => "LiftError",
        };
        CommandError::Precondition { kind, message: e.to_string() }
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CommandError> {
    serde_json::from_str(text).map_err(|e| CommandError::Parse(e.to_string()))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    /// Re-pad (or truncate) the input series to this precision.
    pub precision: Option<usize>,
    pub strict: bool,
}

/// Full ramification report for a wild automorphism given as a series
/// literal, or for a synthetic filtration given as a jump profile
/// `{"p", "jumps"}`.
///
/// The order of a series is its order in `Aut(F_p[t]/(t^N))`. Failed
/// verdicts are part of the report and do not make the command fail.
pub fn analyze(input: &str, opts: AnalyzeOptions) -> Result<Value, CommandError> {
    let raw: Value = parse(input)?;
    if raw.get("jumps").is_some() {
        return analyze_profile(raw, opts);
    }
    let literal: SeriesLiteral = serde_json::from_value(raw).map_err(|e| CommandError::Parse(e.to_string()))?;
    let mut series = TruncatedSeries::try_from(literal).map_err(|e| CommandError::Parse(e.to_string()))?;
    if let Some(n) = opts.precision {
        series = series.with_precision(n).map_err(|e| CommandError::Parse(e.to_string()))?;
    }
    let sigma = DiskAutomorphism::new(series)?;
    let p = sigma.prime();
    let precision = sigma.precision();
    sigma.break_number()?;
    let exponent = sigma.power_breaks()?.len() as u32;
    let fr = sigma.cyclic_filtration(exponent)?;
    let warnings = vec![format!(
        "order p^{exponent} is the order modulo t^{precision}; higher precision may reveal a larger order"
    )];
    let mut report = filtration_report(&fr, opts.strict, warnings)?;
    report["series"] = serde_json::to_value(sigma.series()).expect("serializable");
    report["order"] = json!({"p": p, "exponent": exponent, "group_order": p.pow(exponent), "modulo_precision": precision});
    Ok(report)
}

fn analyze_profile(raw: Value, opts: AnalyzeOptions) -> Result<Value, CommandError> {
    let literal: JumpProfileLiteral = serde_json::from_value(raw).map_err(|e| CommandError::Parse(e.to_string()))?;
    let jp = JumpProfile::try_from(literal)?;
    let fr = FiltrationReport::from_jumps(jp.p(), jp.jumps().to_vec(), usize::MAX)?;
    let warnings = vec!["synthetic filtration: no automorphism was supplied".to_string()];
    let mut report = filtration_report(&fr, opts.strict, warnings)?;
    report["series"] = Value::Null;
    report["order"] = json!({"p": fr.p, "exponent": fr.n, "group_order": fr.p.pow(fr.n), "modulo_precision": null});
    Ok(report)
}

fn filtration_report(fr: &FiltrationReport, strict: bool, mut warnings: Vec<String>) -> Result<Value, CommandError> {
    let jp = fr.jump_profile();
    if !fr.first_jump_prime_to_p() {
        warnings.push(format!(
            "j_0 = {} is divisible by p = {}; a genuine automorphism of finite order has gcd(j_0, p) = 1",
            fr.jumps[0], fr.p
        ));
    }
    let (orbits, artin_identity, genus) = match jumps_to_orbits(&jp, strict) {
        Ok(op) => {
            let identity = verify_artin_identity(fr, &op)?;
            let genus = match genus_check(fr, &op) {
                Ok(g) => serde_json::to_value(g).expect("serializable"),
                Err(e) => CommandError::from(e).diagnostic(),
            };
            (serde_json::to_value(op).expect("serializable"), serde_json::to_value(identity).expect("serializable"), genus)
        }
        Err(e) => {
            warnings.push(format!("no generic-fiber orbit profile: {e}"));
            (Value::Null, Value::Null, Value::Null)
        }
    };
    Ok(json!({
        "filtration": fr,
        "artin": artin_table(fr),
        "different": different_valuation(fr),
        "hasse_arf": hasse_arf_holds(&jp),
        "orbits": orbits,
        "artin_identity": artin_identity,
        "genus": genus,
        "warnings": warnings,
    }))
}

/// Input of `jumps2orbits`: a jump profile plus an optional `strict` flag.
#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct JumpsRequest {
    p: u64,
    #[serde(default)]
    n: Option<u32>,
    jumps: Vec<u64>,
    #[serde(default)]
    strict: bool,
}

pub fn jumps2orbits(input: &str, strict: bool) -> Result<Value, CommandError> {
    let req: JumpsRequest = parse(input)?;
    let jp = JumpProfile::try_from(JumpProfileLiteral { p: req.p, n: req.n, jumps: req.jumps })?;
    let op = jumps_to_orbits(&jp, strict || req.strict)?;
    Ok(serde_json::to_value(op).expect("serializable"))
}

pub fn orbits2jumps(input: &str, strict: bool) -> Result<Value, CommandError> {
    let mut lit: OrbitProfileLiteral = parse(input)?;
    lit.strict |= strict;
    let op = OrbitProfile::try_from(lit)?;
    Ok(serde_json::to_value(orbits_to_jumps(&op)).expect("serializable"))
}

#[derive(Debug, Clone, Default)]
pub struct LiftDemoOptions {
    /// Coordinates of `c`; a single entry is read as an integer.
    pub unit: Vec<i64>,
    pub depth: Option<u32>,
    pub precision: Option<usize>,
}

pub const DEFAULT_LIFT_DEPTH: u32 = 4;

fn coords(x: &LiftScalar) -> Value {
    json!(x.coords())
}

fn series_coords(s: &LiftSeries) -> Value {
    Value::Array(s.coeffs().iter().map(coords).collect())
}

/// Lifts the order-`p` homography `zeta T / (1 + c T)` and compares its
/// fixed-point divisor with the ramification of its reduction.
pub fn lift_demo(p: u64, opts: &LiftDemoOptions) -> Result<Value, CommandError> {
    let ring = LiftRing::new(p, opts.depth.unwrap_or(DEFAULT_LIFT_DEPTH))?;
    let precision = opts.precision.unwrap_or(2 * (ring.valuation_bound() + 1) + 2);
    let unit = match opts.unit.as_slice() {
        [] => ring.one(),
        [c] => ring.from_int(*c),
        cs => ring.scalar(cs)?,
    };
    let sigma = homography_lift(&unit, precision)?;
    let order_p = sigma.iterate(p)?.is_variable();
    let order_one = sigma.is_variable();
    let reduction = DiskAutomorphism::new(sigma.reduce())?;
    let m = reduction.break_number()?;
    let fact = fixed_point_divisor(&sigma)?;
    let expected_roots = [ring.zero(), ring.uniformizer().mul(&unit.inverse()?)];
    let splits = fact.splits_with_roots(&expected_roots);
    let fr = reduction.cyclic_filtration(1)?;
    let op = OrbitProfile::new(p, vec![fact.degree as u64], false)?;
    let balance = verify_artin_identity(&fr, &op)?;
    let degree_law = fact.degree as u64 == m + 1;
    let pass = order_p && !order_one && degree_law && splits && balance.pass;
    let report = json!({
        "p": p,
        "M": ring.depth(),
        "precision": precision,
        "unit": coords(&unit),
        "sigma": series_coords(&sigma),
        "order_p_verified": order_p && !order_one,
        "reduction": reduction.series(),
        "reduction_break": m,
        "divisor": {
            "degree": fact.degree,
            "g": fact.g.iter().map(coords).collect::<Vec<_>>(),
            "u": series_coords(&fact.u),
            "u_determined_below": fact.u_determined_below,
        },
        "degree_law": {"degree": fact.degree, "expected": m + 1, "pass": degree_law},
        "roots": {"expected": expected_roots.iter().map(coords).collect::<Vec<_>>(), "g_splits": splits},
        "balance": balance,
        "pass": pass,
    });
    if pass {
        Ok(report)
    } else {
        Err(CommandError::ChecksFailed(report))
    }
}

pub fn selfcheck(budget: Budget, seed: u64) -> Result<Value, CommandError> {
    let report = run_selfcheck(budget, seed);
    let value = serde_json::to_value(&report).expect("serializable");
    if report.pass {
        Ok(value)
    } else {
        Err(CommandError::ChecksFailed(value))
    }
}

/// Plain two-column rendering of a JSON object.
pub fn render_table(value: &Value) -> String {
    let Value::Object(map) = value else {
        return format!("{value}\n");
    };
    let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in map {
        match v {
            Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                out.push_str(&format!("{k}\n"));
                for item in items {
                    out.push_str(&format!("  {item}\n"));
                }
            }
            _ => out.push_str(&format!("{k:width$}  {v}\n")),
        }
    }
    out
}
