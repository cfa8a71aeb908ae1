use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use super::{determinant_rows, poly_order, vanishing_order, Expansion, Mode, Order};
use crate::arith::{recenter, Poly, Scalar, Series};
use crate::bal::{Branch, HalphenElement};
use crate::cfengine::{expand_element, Policy};
use crate::error::Result;
use crate::irregular::{expand_t_infinity, expand_t_zero};

/// One clause at one rank.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub clause: &'static str,
    pub rank: usize,
    pub predicted: String,
    pub measured: String,
    pub residual: Option<f64>,
    /// `None` when the clause was skipped.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxReport {
    pub mode: Mode,
    pub genus: usize,
    pub rank: usize,
    pub tolerance: f64,
    pub checks: Vec<Check>,
}

impl ApproxReport {
    pub fn check(&self, clause: &str, rank: usize) -> Option<&Check> {
        self.checks.iter().find(|c| c.clause == clause && c.rank == rank)
    }

    /// Clauses that ran and failed.
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.pass == Some(false)).collect()
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<24} {:>4} {:>14} {:>14} {:>10}  pass\n", "clause", "m", "predicted", "measured", "residual");
        for c in &self.checks {
            let res = c.residual.map(|r| format!("{r:.1e}")).unwrap_or_else(|| "-".into());
            let pass = match c.pass {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "skip",
            };
            let _ = write!(out, "{:<24} {:>4} {:>14} {:>14} {:>10}  {}", c.clause, c.rank, c.predicted, c.measured, res, pass);
            if let Some(n) = &c.note {
                let _ = write!(out, "  ({n})");
            }
            out.push('\n');
        }
        out
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

struct Builder {
    checks: Vec<Check>,
    tol: f64,
}

impl Builder {
    fn count(&mut self, clause: &'static str, rank: usize, predicted: usize, measured: Order) {
        self.checks.push(Check {
            clause,
            rank,
            predicted: predicted.to_string(),
            measured: measured.to_string(),
            residual: None,
            pass: Some(measured.exact && measured.value == predicted),
            note: None,
        });
    }

    fn degrees(&mut self, clause: &'static str, rank: usize, predicted: (usize, usize), measured: (usize, usize)) {
        self.checks.push(Check {
            clause,
            rank,
            predicted: format!("{}/{}", predicted.0, predicted.1),
            measured: format!("{}/{}", measured.0, measured.1),
            residual: None,
            pass: Some(predicted == measured),
            note: None,
        });
    }

    fn residual(&mut self, clause: &'static str, rank: usize, residual: f64) {
        self.checks.push(Check {
            clause,
            rank,
            predicted: "0".into(),
            measured: format!("{residual:.1e}"),
            residual: Some(residual),
            pass: Some(residual < self.tol),
            note: None,
        });
    }

    fn skip(&mut self, clause: &'static str, rank: usize, note: String) {
        self.checks.push(Check {
            clause,
            rank,
            predicted: "-".into(),
            measured: "-".into(),
            residual: None,
            pass: None,
            note: Some(note),
        });
    }

    /// Degree and zero prefix of a polynomial in one row.
    fn shape(&mut self, clause: &'static str, rank: usize, p: &Poly, degree: usize, zeros: usize) {
        let order = poly_order(p);
        let measured = (p.degree(), order.value);
        self.checks.push(Check {
            clause,
            rank,
            predicted: format!("deg {degree}, ord {zeros}"),
            measured: format!("deg {}, ord {}", measured.0, order),
            residual: None,
            pass: Some(order.exact && measured == (degree, zeros)),
            note: None,
        });
    }
}

/// Order of `sqrt(X) - lifted numerator / lifted denominator` and the size of its first coefficient.
fn sqrt_x_error(exp: &Expansion, rank: usize) -> Option<(Order, f64)> {
    let err = exp.error_series(rank);
    let den = &exp.pairs[rank].denominator;
    let den_order = poly_order(den);
    let order = vanishing_order(err.coeffs(), exp.x.precision().tau(), exp.error_scale(rank));
    if !den_order.exact || den_order.value > order.value {
        return None;
    }
    let lead = if order.exact { err.coeff(order.value).abs() / den.coeff(den_order.value).abs() } else { 0.0 };
    let lead = match &exp.t {
        Some(t) => lead * t.abs(),
        None => lead,
    };
    Some((Order { value: order.value - den_order.value, exact: order.exact }, lead))
}

/// Every degree, order and identity statement about the continuants of `exp`.
pub fn approximation_report(exp: &Expansion) -> ApproxReport {
    let tol = exp.x.precision().tau();
    let mut b = Builder { checks: Vec::new(), tol };
    let g = exp.genus;
    let order = exp.target.order();
    let det_rows = determinant_rows(exp);

    for m in 0..=exp.rank() {
        let pair = &exp.pairs[m];
        let (gm, hm) = (&pair.numerator, &pair.denominator);
        let (gp, hp) = exp.previous(m);
        let degree_clause = match exp.mode {
            Mode::GenericY => "degrees",
            Mode::SqrtCase => "degrees_sqrt",
            Mode::YInfinity => "degrees_infinity",
        };
        b.degrees(
            degree_clause,
            m,
            (exp.mode.numerator_degree(g, m), exp.mode.denominator_degree(g, m)),
            (gm.degree(), hm.degree()),
        );

        if m > 0 {
            let row = &det_rows[m - 1];
            let det = exp.determinant(m);
            let (zeros, degree) = match exp.mode {
                Mode::SqrtCase => ((g + 1) * m + 1, 2 * g * m + 1),
                _ => ((g + 1) * m, 2 * g * m),
            };
            let clause = if exp.mode == Mode::SqrtCase { "determinant_sqrt" } else { "determinant" };
            b.shape(clause, m, &det, degree, zeros);
            b.degrees("cofactor_degree", m, ((g - 1) * m, 0), (row.cofactor_degree, 0));
            b.residual("determinant_product", m, row.product_residual);
        }

        // G_m - H_m * target against the product of remainders
        let err = exp.error_series(m);
        let scale = exp.error_scale(m);
        let mut product = Series::constant(Scalar::one(exp.x.prec()), order);
        for q in &exp.remainders[..=m] {
            product = product.mul(q);
        }
        if m % 2 == 0 {
            product = product.neg();
        }
        b.residual("remainder_product", m, rel(err.max_abs_diff(&product), scale));

        let q = &exp.remainders[m];
        let prev_err = exp.target.mul_poly(&hp).neg().add_poly(&gp);
        b.residual("remainder_ratio", m, rel(err.add(&q.mul(&prev_err)).norm(), scale));

        let num = q.mul_poly(&gp).add_poly(gm);
        let den = q.mul_poly(&hp).add_poly(hm);
        match num.div(&den) {
            Ok(v) => b.residual("reconstruction", m, rel(v.max_abs_diff(&exp.target), exp.target.norm())),
            Err(e) => b.skip("reconstruction", m, e.to_string()),
        }

        let vo = vanishing_order(err.coeffs(), tol, scale);
        match exp.mode {
            Mode::SqrtCase => b.count("norm_order", m, exp.predicted_order(m), vo),
            _ => b.count("order", m, exp.predicted_order(m), vo),
        }
        match sqrt_x_error(exp, m) {
            Some((o, _)) => {
                let clause = match exp.mode {
                    Mode::GenericY => "order_sqrt_x",
                    Mode::SqrtCase => "order_sqrt_x_center",
                    Mode::YInfinity => "order_sqrt_x_infinity",
                };
                b.count(clause, m, exp.predicted_order(m), o);
                if exp.mode == Mode::YInfinity {
                    b.count("order_sqrt_x_linear", m, 2 * m + 2, o);
                }
            }
            None => b.skip("order_sqrt_x", m, "denominator vanishes at the center".into()),
        }

        lifted_identities(exp, &mut b, m);
        if m > 0 {
            evaluation(exp, &mut b, m);
        }
        match exp.mode {
            Mode::GenericY => recovery(exp, &mut b, m),
            Mode::SqrtCase => norms(exp, &mut b, m),
            Mode::YInfinity => {}
        }
    }
    ApproxReport { mode: exp.mode, genus: g, rank: exp.rank(), tolerance: tol, checks: b.checks }
}

/// `B^(m) s^(g+1)` in the normalization where `Q_m = N / (sqrt(X) + A^(m))`.
fn remainder_numerator(exp: &Expansion, m: usize) -> Poly {
    let st = &exp.states[m];
    let extra = if m == 0 { exp.mode.bonus() } else { 0 };
    st.b.shift_up(exp.genus + 1 + st.shift + extra)
}

fn lifted_identities(exp: &Expansion, b: &mut Builder, m: usize) {
    let (lg, lh) = exp.lifted(m);
    let (pg, ph) = exp.lifted_previous(m);
    let a = &exp.states[m].a;
    let nb = remainder_numerator(exp, m);
    let lhs = lg.mul(a).add(&pg.mul(&nb));
    let rhs = lh.mul(&exp.x);
    b.residual("lift_first", m, rel(lhs.max_abs_diff(&rhs), lhs.norm().max(rhs.norm())));
    let lhs = lh.mul(a).add(&ph.mul(&nb));
    b.residual("lift_second", m, rel(lhs.max_abs_diff(&lg), lhs.norm().max(lg.norm())));
    let printed = lg.mul(&exp.x);
    b.residual("lift_second_printed", m, rel(lhs.max_abs_diff(&printed), lhs.norm().max(printed.norm())));
}

fn evaluation(exp: &Expansion, b: &mut Builder, m: usize) {
    let Some(tm) = exp.states[m].t.clone() else {
        b.skip("evaluation", m, "t_m is infinite".into());
        return;
    };
    let target = -exp.states[m].a.eval(&tm);
    let other = exp.states[m - 1].a.eval(&tm);
    let scale = target.abs().max(1.0);
    b.residual("evaluation_branches", m, rel((&target - &other).abs(), scale));
    let (gp, hp) = exp.previous(m);
    let (lgp, lhp) = exp.lifted(m - 1);
    for (clause, num, den) in [("evaluation_plain", gp, hp), ("evaluation_lifted", lgp, lhp)] {
        let d = den.eval(&tm);
        if d.is_negligible(exp.x.precision().tau(), den.norm().max(1.0)) {
            b.skip(clause, m, "denominator vanishes at t_m".into());
            continue;
        }
        let v = &num.eval(&tm) / &d;
        b.residual(clause, m, rel((&v - &target).abs(), scale));
    }
}

/// The polynomials recovering `A^(m)` and `B^(m)` in the generic mode.
fn recovery(exp: &Expansion, b: &mut Builder, m: usize) {
    let g = exp.genus;
    let t = exp.t.as_ref().expect("t");
    let sy = exp.sqrt_y.as_ref().expect("sqrtY");
    let pair = &exp.pairs[m];
    let (gm, hm) = (&pair.numerator, &pair.denominator);
    let (gp, hp) = exp.previous(m);
    let y = sy.square();
    let (quot, rem) = exp.x.sub(&Poly::constant(y)).div_linear(t);
    b.residual("pole_cancellation", m, rel(rem.abs(), exp.x.norm() * t.abs().max(1.0).powi(2 * g as i32 + 2)));
    let lin = Poly::linear(t);
    let hh = hm.mul(&hp).mul(&quot);
    let gg = gm.mul(&gp).mul(&lin);
    let cross_sum = gm.mul(&hp).add(&gp.mul(hm)).scale(sy);
    let cross_diff = exp.determinant(m).scale(sy);
    let first = hh.sub(&cross_sum).sub(&gg);
    let first_printed = hh.sub(&cross_diff).sub(&gg);
    let second = gm.mul(gm).mul(&lin).add(&gm.mul(hm).scale(&sy.mul_i64(2))).sub(&hm.mul(hm).mul(&quot));

    let det = exp.determinant(m);
    let want_a = det.mul(&exp.states[m].a);
    let want_b = det.mul(&exp.states[m].b.shift_up(g + 1));
    b.residual("first_recovery", m, rel(first.max_abs_diff(&want_a), want_a.norm()));
    b.residual("first_recovery_printed", m, rel(first_printed.max_abs_diff(&want_a), want_a.norm()));
    b.residual("second_recovery", m, rel(second.max_abs_diff(&want_b), want_b.norm()));
    if m > 0 {
        b.shape("first_shape", m, &first, 2 * m * g + g + 1, (g + 1) * m);
        b.shape("second_shape", m, &second, 2 * m * g + 2 * g + 1, (g + 1) * (m + 1));
    }
}

/// Norm-type polynomials of the sqrt case.
fn norms(exp: &Expansion, b: &mut Builder, m: usize) {
    let g = exp.genus;
    let pair = &exp.pairs[m];
    let (gm, hm) = (&pair.numerator, &pair.denominator);
    let (gp, hp) = exp.previous(m);
    if m > 0 {
        let cross = hm.mul(&hp).mul(&exp.x).sub(&gm.mul(&gp));
        b.shape("cross_norm", m, &cross, 2 * m * g + g + 2, (g + 1) * m + 1);
    }
    let norm = gm.mul(gm).sub(&hm.mul(hm).mul(&exp.x));
    b.shape("norm", m, &norm, 2 * m * g + 2 * g + 2, (g + 1) * (m + 1) + 1);
}

/// A point `y` offered to the scan.
#[derive(Clone, Debug)]
pub enum Candidate {
    Finite(Scalar),
    Infinity,
}

impl Candidate {
    pub fn label(&self) -> String {
        match self {
            Candidate::Finite(y) => y.to_short(),
            Candidate::Infinity => "inf".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Ranked {
    pub candidate: String,
    pub mode: Mode,
    pub order: Order,
    pub leading: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ranking {
    pub rank: usize,
    pub entries: Vec<Ranked>,
    pub center_first: bool,
}

/// Ranks candidate points by how well rank-`rank` approximants at each reproduce `sqrt(X)` near `center`.
pub fn best_choice_scan(x_global: &Poly, center: &Scalar, candidates: &[Candidate], rank: usize, order: usize) -> Result<Ranking> {
    let x = recenter(x_global, center);
    let genus = crate::bal::genus_of(&x)?;
    let tau = x.precision().tau();
    let mut entries = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let tree = match cand {
            Candidate::Infinity => expand_t_infinity(&x, rank, &Policy::First, order)?,
            Candidate::Finite(y) if (y - center).abs() <= tau * center.abs().max(1.0) => {
                expand_t_zero(&x, rank, &Policy::First, order)?
            }
            Candidate::Finite(y) => {
                let h = HalphenElement::from_global(x_global, center, y, Branch::Principal)?;
                expand_element(&h, rank, &Policy::First, order)?
            }
        };
        let path = tree.longest_path();
        let states = tree.states_along(&path);
        let exp = Expansion::from_path(&x, genus, &states, order)?;
        let at = rank.min(exp.rank());
        let (ord, leading) = sqrt_x_error(&exp, at).unwrap_or((Order { value: 0, exact: true }, f64::INFINITY));
        entries.push(Ranked { candidate: cand.label(), mode: exp.mode, order: ord, leading });
    }
    entries.sort_by(|u, v| v.order.value.cmp(&u.order.value).then(u.leading.partial_cmp(&v.leading).unwrap_or(Ordering::Equal)));
    let center_first = entries.first().is_some_and(|e| e.mode == Mode::SqrtCase);
    Ok(Ranking { rank, entries, center_first })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Precision;

    fn worked(coeffs: &[i64], which: &str, depth: usize) -> Expansion {
        let pr = Precision::default();
        let x = Poly::from_i64s(pr.bits(), coeffs);
        let tree = match which {
            "generic" => {
                let h = HalphenElement::from_global(&x, &pr.zero(), &pr.one(), Branch::Principal).unwrap();
                expand_element(&h, depth, &Policy::First, 24).unwrap()
            }
            "sqrt" => expand_t_zero(&x, depth, &Policy::First, 24).unwrap(),
            _ => expand_t_infinity(&x, depth, &Policy::First, 24).unwrap(),
        };
        let path = tree.longest_path();
        Expansion::from_path(&x, 1, &tree.states_along(&path), 24).unwrap()
    }

    #[test]
    fn worked_orders() {
        let quartic = [1, 0, 0, 0, 1];
        let generic = [3, 1, -2, 5, 2];
        for (x, which, clause, want) in [
            (&quartic, "generic", "order", "6"),
            (&generic, "sqrt", "order_sqrt_x_center", "7"),
            (&generic, "infinity", "order_sqrt_x_linear", "6"),
        ] {
            let rep = approximation_report(&worked(x, which, 2));
            let c = rep.check(clause, 2).unwrap();
            assert_eq!(c.measured, want, "{which}\n{}", rep.table());
        }
    }

    #[test]
    fn corrected_forms_hold() {
        for which in ["generic", "sqrt", "infinity"] {
            let rep = approximation_report(&worked(&[3, 1, -2, 5, 2], which, 3));
            let failed: Vec<_> = rep.failures().into_iter().map(|c| (c.clause, c.rank)).collect();
            assert!(
                failed.iter().all(|(c, _)| c.ends_with("_printed") || *c == "evaluation_plain"),
                "{which}: {failed:?}\n{}",
                rep.table()
            );
        }
    }

    #[test]
    fn center_wins() {
        let pr = Precision::default();
        let x = Poly::from_i64s(pr.bits(), &[3, 1, -2, 5, 2]);
        let cands = [Candidate::Finite(pr.one()), Candidate::Infinity, Candidate::Finite(pr.zero())];
        let r = best_choice_scan(&x, &pr.zero(), &cands, 2, 24).unwrap();
        assert!(r.center_first);
        let orders: Vec<_> = r.entries.iter().map(|e| e.order.value).collect();
        assert_eq!(orders, vec![7, 6, 6]);
        assert!(r.entries[1].leading <= r.entries[2].leading);
    }
}
