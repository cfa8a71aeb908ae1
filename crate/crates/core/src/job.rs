//! Job files: one polynomial, one center, one point `y`, and the knobs of an expansion run.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::approx::{approximation_report, determinant_rows, Expansion};
use crate::arith::{recenter, Poly, Precision, Scalar};
use crate::bal::{self, Branch, HalphenElement};
use crate::cfengine::{expand_element, BranchTree, CfState, Policy};
use crate::curve::{self, CurvePoint};
use crate::error::{Error, Result};
use crate::irregular::{self, expand_t_infinity, expand_t_zero};
use crate::spectral::qx_build;
use crate::symmetry::{self, symmetry_algebra_check};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PolicySpec {
    Named(String),
    Path(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobFile {
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(default)]
    variable_center: Option<String>,
    y: String,
    #[serde(default)]
    genus: Option<usize>,
    #[serde(default = "default_depth")]
    depth: usize,
    #[serde(default)]
    policy: Option<PolicySpec>,
    #[serde(default)]
    precision_bits: Option<u32>,
    #[serde(default)]
    order: Option<usize>,
    #[serde(rename = "sqrtY_branch", default)]
    sqrt_y_branch: Option<Branch>,
}

fn default_depth() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq)]
pub enum Center {
    Finite(Scalar),
    Infinity,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Finite(Scalar),
    Center,
    Infinity,
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct Job {
    /// `X` in the global variable.
    pub x: Poly,
    pub genus: usize,
    pub center: Center,
    pub y: Target,
    pub depth: usize,
    pub policy: Policy,
    pub precision: Precision,
    pub order: usize,
    pub branch: Branch,
}

fn parse_point(text: &str, prec: &Precision) -> Result<Option<Scalar>> {
    match text.trim() {
        "infinity" | "inf" => Ok(None),
        other => prec.parse(other).map(Some),
    }
}

impl Job {
    /// Parses a job; `default_bits` applies when the file has no `precision_bits`.
    pub fn parse(text: &str, default_bits: Option<u32>) -> Result<Job> {
        let file: JobFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("job file: {e}")))?;
        let precision = Precision::new(file.precision_bits.or(default_bits).unwrap_or(256))?;
        let coeffs = file.x.iter().map(|c| precision.parse(c)).collect::<Result<Vec<_>>>()?;
        let x = Poly::new(coeffs, precision.bits());
        let genus = bal::genus_of(&x)?;
        if let Some(g) = file.genus {
            if g != genus {
                return Err(Error::InvalidInput(format!("genus {g} does not match degree {} of X", x.nominal_degree())));
            }
        }
        let center = match file.variable_center.as_deref() {
            None => Center::Finite(precision.zero()),
            Some(text) => match parse_point(text, &precision)? {
                Some(c) => Center::Finite(c),
                None => Center::Infinity,
            },
        };
        let y = match file.y.trim() {
            "center" => Target::Center,
            text => match parse_point(text, &precision)? {
                Some(v) => Target::Finite(v),
                None => Target::Infinity,
            },
        };
        let policy = match file.policy {
            None => Policy::First,
            Some(PolicySpec::Named(name)) => match name.as_str() {
                "all" => Policy::All,
                "first" => Policy::First,
                other => return Err(Error::InvalidInput(format!("unknown policy {other:?}"))),
            },
            Some(PolicySpec::Path(v)) => {
                if v.contains(&0) {
                    return Err(Error::InvalidInput("policy indices are 1-based".into()));
                }
                Policy::Path(v)
            }
        };
        let depth = match &policy {
            Policy::Path(v) => file.depth.min(v.len()),
            _ => file.depth,
        };
        let order = file.order.unwrap_or((genus + 1) * (depth + 2) + 8);
        let job = Job { x, genus, center, y, depth, policy, precision, order, branch: file.sqrt_y_branch.unwrap_or(Branch::Principal) };
        if bal::is_perfect_square(&job.local_x()?, genus)? {
            return Err(Error::PerfectSquare);
        }
        Ok(job)
    }

    /// `X` in the local variable at the center (reversed when the center is at infinity).
    pub fn local_x(&self) -> Result<Poly> {
        match &self.center {
            Center::Finite(eps) => Ok(recenter(&self.x, eps)),
            Center::Infinity => {
                let n = 2 * self.genus + 2;
                if self.x.coeff(n).is_negligible(self.precision.tau(), self.x.norm()) {
                    return Err(Error::LeadingVanishes);
                }
                Ok(self.x.reversed(n))
            }
        }
    }

    /// `t = y - center` in the local variable, `None` for `t = infinity`.
    pub fn local_t(&self) -> Result<Option<Scalar>> {
        let zero = self.precision.zero();
        Ok(match (&self.center, &self.y) {
            (_, Target::Center) => Some(zero),
            (Center::Finite(_), Target::Infinity) => None,
            (Center::Infinity, Target::Infinity) => Some(zero),
            (Center::Finite(eps), Target::Finite(y)) => Some(y - eps),
            (Center::Infinity, Target::Finite(y)) => {
                if y.abs() < self.precision.match_tol() {
                    None
                } else {
                    Some(y.recip())
                }
            }
        })
    }

    fn sqrt_y(&self, y: &Scalar) -> Scalar {
        let root = self.x.eval(y).sqrt();
        match self.branch {
            Branch::Principal => root,
            Branch::Negative => -root,
        }
    }

    pub fn expand(&self) -> Result<BranchTree> {
        let x = self.local_x()?;
        let tau = self.precision.tau();
        match self.local_t()? {
            None => expand_t_infinity(&x, self.depth, &self.policy, self.order),
            Some(t) if t.abs() <= tau => expand_t_zero(&x, self.depth, &self.policy, self.order),
            Some(_) => match (&self.center, &self.y) {
                (Center::Finite(eps), Target::Finite(y)) => {
                    let h = HalphenElement::from_global(&self.x, eps, y, self.branch)?;
                    expand_element(&h, self.depth, &self.policy, self.order)
                }
                (Center::Infinity, Target::Finite(y)) => {
                    irregular::recenter_infinity(&self.x, y, &self.sqrt_y(y))?.expand(self.depth, &self.policy, self.order)
                }
                _ => unreachable!("finite nonzero t comes from a finite y"),
            },
        }
    }
}

/// Output of one subcommand together with the clauses that failed.
#[derive(Debug, Serialize)]
pub struct Outcome {
    pub document: Value,
    pub failures: Vec<String>,
    /// Human-readable rendering, where one exists.
    #[serde(skip)]
    pub table: Option<String>,
}

fn longest<'a>(tree: &'a BranchTree) -> Vec<&'a CfState> {
    tree.states_along(&tree.longest_path())
}

/// The longest path cut at its first irregular level.
fn regular_prefix<'a>(tree: &'a BranchTree) -> Vec<&'a CfState> {
    let states = longest(tree);
    let end = states.iter().skip(1).position(|s| !s.is_regular() || s.shift != 0).map_or(states.len(), |k| k + 1);
    states[..end].to_vec()
}

pub fn run_expand(job: &Job) -> Result<Outcome> {
    let tree = job.expand()?;
    let tol = job.precision.tau();
    let failures =
        crate::cfengine::chain_verify(&tree).into_iter().filter(|(_, r)| *r > tol).map(|(k, r)| format!("chain {k}: {r:.1e}")).collect();
    Ok(Outcome { document: serde_json::to_value(tree.document()).expect("tree serializes"), failures, table: None })
}

pub fn run_convergents(job: &Job) -> Result<Outcome> {
    let tree = job.expand()?;
    let path = regular_prefix(&tree);
    let exp = Expansion::from_path(&tree.x, job.genus, &path, job.order)?;
    let report = approximation_report(&exp);
    let failures = report
        .failures()
        .into_iter()
        .filter(|c| !c.clause.ends_with("_printed") && c.clause != "evaluation_plain" && c.clause != "order_sqrt_x_linear")
        .map(|c| format!("{} m={}: {} vs {}", c.clause, c.rank, c.measured, c.predicted))
        .collect();
    Ok(Outcome { document: serde_json::to_value(&report).expect("report serializes"), failures, table: Some(report.table()) })
}

pub fn run_symmetry(job: &Job) -> Result<Outcome> {
    let tree = job.expand()?;
    let path = longest(&tree);
    let report = symmetry::detect(&tree.x, &path, job.precision.match_tol())?;
    let clauses = symmetry_algebra_check(&report);
    let mut failures: Vec<String> =
        clauses.iter().filter(|c| c.holds == Some(false)).map(|c| format!("{} at {:?}", c.clause, c.centers)).collect();
    let mut even = None;
    if let Target::Finite(y) = &job.y {
        if let Center::Finite(eps) = &job.center {
            let predicted = symmetry::even_criterion(&job.x, y);
            let seen = report.even_centers.contains(&0);
            if predicted && !seen {
                failures.push("X(y) = 0 but no even center at 0".into());
            }
            even = Some(json!({ "x_at_y_vanishes": predicted, "center_at_zero": seen, "center": eps }));
        }
    }
    let locus = symmetry::odd_symmetry_locus(&tree.x).ok();
    let doc = json!({ "report": report, "clauses": clauses, "even_criterion": even, "odd_locus": locus });
    Ok(Outcome { document: doc, failures, table: None })
}

fn start_point(job: &Job, x: &Poly) -> Result<CurvePoint> {
    match job.local_t()? {
        Some(t) => Ok(CurvePoint::on(x, t)),
        None => Err(Error::PreconditionViolated("curve point needs a finite y".into())),
    }
}

pub fn run_curve(job: &Job) -> Result<Outcome> {
    let x = job.local_x()?;
    let tol = job.precision.tau();
    let ram = curve::ramification(&x)?;
    let mut failures = Vec::new();
    if ram.genus_from_even != job.genus as f64 || ram.genus_from_odd_gluing != job.genus as f64 {
        failures.push(format!("ramification genus {} / {}", ram.genus_from_even, ram.genus_from_odd_gluing));
    }
    let pt = start_point(job, &x)?;
    let (commute, on_curve) = curve::commuting_residual(&x, &pt)?;
    if commute > tol || on_curve > tol {
        failures.push(format!("commuting residual {commute:.1e}"));
    }
    let index = curve::index(&x, &pt).map_err(|e| e.to_string());
    let morph = curve::morphism(&x, &pt)?;
    let divisor = curve::divisor_of(&x, &morph.lambda).map_err(|e| e.to_string());
    let doc = json!({
        "ramification": ram,
        "point": { "s": pt.x, "w": pt.w },
        "morphism": { "t": morph.t, "lambda": morph.lambda },
        "commuting_residual": commute,
        "curve_residual": on_curve,
        "index": match &index { Ok(r) => json!(r), Err(e) => json!({ "error": e }) },
        "divisor": match &divisor { Ok(d) => json!(d), Err(e) => json!({ "error": e }) },
    });
    Ok(Outcome { document: doc, failures, table: None })
}

/// Growth profile as JSON plus its CSV rendering.
pub fn run_growth(job: &Job) -> Result<(Outcome, String)> {
    let x = job.local_x()?;
    let pt = start_point(job, &x)?;
    let profile = curve::growth_profile(&x, &pt, job.depth)?;
    let csv = profile.to_csv();
    Ok((Outcome { document: serde_json::to_value(&profile).expect("profile serializes"), failures: vec![], table: None }, csv))
}

/// Every check that applies to the job's expansion.
pub fn run_verify(job: &Job) -> Result<Outcome> {
    let tree = job.expand()?;
    let x = &tree.x;
    let tol = job.precision.tau();
    let mut failures = Vec::new();
    let mut sections = serde_json::Map::new();

    let max_bal = tree.nodes.iter().filter_map(|n| n.state.as_ref()).map(|s| s.bal_residual).fold(0.0, f64::max);
    let max_chain = tree.max_chain_residual();
    for (name, v) in [("bal", max_bal), ("chain", max_chain)] {
        if v > tol {
            failures.push(format!("{name} residual {v:.1e}"));
        }
    }
    sections.insert("bal_residual".into(), json!(max_bal));
    sections.insert("chain_residual".into(), json!(max_chain));

    let qx = qx_build(x)?;
    let mut edge = 0.0f64;
    for leaf in tree.leaf_paths() {
        let states = tree.states_along(&leaf);
        for w in states.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !b.is_regular() || !a.is_regular() {
                continue;
            }
            let (ta, tb) = (a.t.as_ref().expect("t"), b.t.as_ref().expect("t"));
            for (l, t) in [(&a.lambda, ta), (&a.lambda, tb), (&b.lambda, tb)] {
                edge = edge.max(qx.relative_value(l, t));
            }
        }
    }
    if edge > tol {
        failures.push(format!("basic curve residual {edge:.1e}"));
    }
    sections.insert("basic_curve_residual".into(), json!(edge));

    let path = regular_prefix(&tree);
    if path.len() > 1 {
        let exp = Expansion::from_path(x, job.genus, &path, job.order)?;
        let rows = determinant_rows(&exp);
        for r in rows.iter().filter(|r| !r.holds(tol)) {
            failures.push(format!("determinant m={}: order {} cofactor degree {}", r.rank, r.order, r.cofactor_degree));
        }
        sections.insert("determinant".into(), json!(rows));
    }
    let conv = run_convergents(job)?;
    failures.extend(conv.failures);
    sections.insert("convergents".into(), conv.document);
    let sym = run_symmetry(job)?;
    failures.extend(sym.failures);
    sections.insert("symmetry".into(), sym.document);
    sections.insert("failures".into(), json!(failures));
    Ok(Outcome { document: Value::Object(sections), failures, table: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let job = Job::parse(r#"{"X": ["1", "0", "0", "0", "1"], "y": "1"}"#, None).unwrap();
        assert_eq!(job.genus, 1);
        assert_eq!(job.order, 2 * 6 + 8);
        assert_eq!(job.policy, Policy::First);
        let bad = Job::parse(r#"{"X": ["1", "0", "zz", "0", "1"], "y": "1"}"#, None).unwrap_err();
        assert_eq!(bad.code(), "Parse");
        let square = Job::parse(r#"{"X": ["1", "2", "3", "2", "1"], "y": "3"}"#, None).unwrap_err();
        assert_eq!(square, Error::PerfectSquare);
        let wrong = Job::parse(r#"{"X": ["1", "0", "0", "0", "1"], "y": "1", "genus": 2}"#, None).unwrap_err();
        assert_eq!(wrong.code(), "InvalidInput");
        let bits = Job::parse(r#"{"X": ["1", "0", "0", "0", "1"], "y": "1"}"#, Some(128)).unwrap();
        assert_eq!(bits.precision.bits(), 128);
    }

    #[test]
    fn every_center_kind_expands() {
        for (center, y) in [("0", "1"), ("0", "center"), ("0", "infinity"), ("infinity", "2"), ("infinity", "infinity")] {
            let text = format!(r#"{{"X": ["3", "1", "-2", "5", "2"], "variable_center": "{center}", "y": "{y}", "depth": 3}}"#);
            let job = Job::parse(&text, None).unwrap();
            let tree = job.expand().unwrap();
            assert!(tree.max_chain_residual() < 1e-60, "{center} {y}");
        }
    }
}
