//! Periodicity and mirror symmetry of continued fraction runs.
//!
//! Detection works on the unfolded sequence of `(t_i, lambda_i)`. A step through
//! a zero of `B` hides a pole entry `(0, inf)`; it is reinserted so that indices
//! line up with the mirror rules.

use serde::Serialize;

use crate::arith::{interpolate_unit_circle, poly_roots, resultant, Poly, Precision, Scalar};
use crate::cfengine::{CfState, StepKind};
use crate::error::Result;
use crate::spectral::{lambda_pair_at, qx_build, QxPoly};

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Finite(Scalar),
    Infinite,
}

impl Point {
    pub fn matches(&self, other: &Point, tol: f64) -> bool {
        match (self, other) {
            (Point::Infinite, Point::Infinite) => true,
            (Point::Finite(a), Point::Finite(b)) => a.approx_eq(b, tol),
            _ => false,
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Finite(v) => v.serialize(serializer),
            Point::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub t: Point,
    pub lambda: Point,
    /// Position in the path, `None` for a reinserted pole.
    pub state: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Unfolded {
    /// The other `lambda` at the first `t`, when it is known.
    pub lambda_before: Option<Point>,
    pub entries: Vec<Entry>,
}

impl Unfolded {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn t(&self, i: isize) -> Option<&Point> {
        usize::try_from(i).ok().and_then(|i| self.entries.get(i)).map(|e| &e.t)
    }

    fn lambda(&self, i: isize) -> Option<&Point> {
        if i == -1 {
            return self.lambda_before.as_ref();
        }
        usize::try_from(i).ok().and_then(|i| self.entries.get(i)).map(|e| &e.lambda)
    }
}

fn pole(prec: u32) -> Entry {
    Entry { t: Point::Finite(Scalar::zero(prec)), lambda: Point::Infinite, state: None }
}

pub fn unfold(x: &Poly, path: &[&CfState]) -> Result<Unfolded> {
    let prec = x.prec();
    let mut entries = Vec::with_capacity(path.len() + 1);
    let mut lambda_before = None;
    for (pos, st) in path.iter().enumerate() {
        let t = match &st.t {
            Some(t) => Point::Finite(t.clone()),
            None => Point::Infinite,
        };
        if pos == 0 {
            match st.kind {
                StepKind::TInf => {
                    // the two values of lambda at t = infinity: zeros of the s^(g+1) coefficient
                    let qx = qx_build(x)?;
                    let k = qx.genus + 1;
                    let pair = quadratic_roots(&qx.r2.coeff(k), &qx.r1.coeff(k), &qx.r0.coeff(k));
                    lambda_before = pair
                        .into_iter()
                        .max_by(|a, b| (a - &st.lambda).abs().total_cmp(&(b - &st.lambda).abs()))
                        .map(Point::Finite);
                }
                StepKind::TZero => entries.push(pole(prec)),
                StepKind::Regular | StepKind::EpsInf => {
                    if let Some(tv) = &st.t {
                        let qx = qx_build(x)?;
                        let (l1, l2) = lambda_pair_at(&qx, x, tv)?;
                        let other = if (&l1 - &st.lambda).abs() >= (&l2 - &st.lambda).abs() { l1 } else { l2 };
                        lambda_before = Some(Point::Finite(other));
                    }
                }
            }
        } else if st.pole_before {
            entries.push(pole(prec));
        }
        entries.push(Entry { t, lambda: Point::Finite(st.lambda.clone()), state: Some(pos) });
    }
    Ok(Unfolded { lambda_before, entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub period: Option<usize>,
    /// Indices `n` with centre `alpha_n`, counted in the unfolded sequence.
    pub even_centers: Vec<usize>,
    /// Indices `n` with centre `beta_n`: `t_(n-1) = t_n`.
    pub odd_centers: Vec<usize>,
    pub match_tolerance: f64,
    pub length: usize,
    /// Prefix whose entries all have a mirror image under some detected centre;
    /// the whole sequence when there is no centre.
    pub window: usize,
    /// Smallest period on `window`.
    pub window_period: Option<usize>,
    pub pole_entries: Vec<usize>,
    pub mirror_checks: usize,
    pub coefficient_pairs: usize,
    /// Largest relative difference between `alpha`/`beta` pairs the symmetries identify.
    pub coefficient_residual: f64,
}

impl SymmetryReport {
    pub fn features(&self) -> usize {
        self.even_centers.len() + self.odd_centers.len() + usize::from(self.period.is_some())
    }

    pub fn is_double_symmetric(&self) -> bool {
        self.even_centers.len() + self.odd_centers.len() >= 2
    }
}

/// Mirror test around a centre; `None` when a pair disagrees.
fn mirror(seq: &Unfolded, t_pairs: &[(isize, isize)], l_pairs: &[(isize, isize)], tol: f64) -> Option<usize> {
    let mut checks = 0;
    for &(a, b) in t_pairs {
        if let (Some(p), Some(q)) = (seq.t(a), seq.t(b)) {
            if !p.matches(q, tol) {
                return None;
            }
            checks += 1;
        }
    }
    for &(a, b) in l_pairs {
        if let (Some(p), Some(q)) = (seq.lambda(a), seq.lambda(b)) {
            if !p.matches(q, tol) {
                return None;
            }
            checks += 1;
        }
    }
    Some(checks)
}

fn even_center(seq: &Unfolded, n: isize, tol: f64) -> Option<usize> {
    let len = seq.len() as isize;
    let t_pairs: Vec<_> = (1..len).map(|s| (n + s, n - s)).collect();
    let l_pairs: Vec<_> = (0..len).map(|s| (n + s, n - s - 1)).collect();
    let pivot = seq.lambda(n)?.matches(seq.lambda(n - 1)?, tol);
    if !pivot {
        return None;
    }
    mirror(seq, &t_pairs, &l_pairs, tol)
}

fn odd_center(seq: &Unfolded, c: isize, tol: f64) -> Option<usize> {
    let len = seq.len() as isize;
    if !seq.t(c)?.matches(seq.t(c - 1)?, tol) {
        return None;
    }
    let t_pairs: Vec<_> = (1..len).map(|s| (c + s, c - 1 - s)).collect();
    let l_pairs: Vec<_> = (1..len).map(|s| (c - 1 + s, c - 1 - s)).collect();
    mirror(seq, &t_pairs, &l_pairs, tol)
}

fn find_period(seq: &Unfolded, len: usize, tol: f64) -> Option<usize> {
    (1..len.saturating_sub(1)).find(|&p| {
        (0..len - p).all(|i| {
            let (a, b) = (&seq.entries[i], &seq.entries[i + p]);
            a.t.matches(&b.t, tol) && a.lambda.matches(&b.lambda, tol)
        })
    })
}

struct Coefficients<'a> {
    seq: &'a Unfolded,
    path: &'a [&'a CfState],
    pairs: usize,
    worst: f64,
}

impl Coefficients<'_> {
    fn state(&self, i: isize) -> Option<&CfState> {
        let pos = self.seq.entries.get(usize::try_from(i).ok()?)?.state?;
        let st = self.path[pos];
        let clean = st.kind == StepKind::Regular && pos > 0 && self.path[pos - 1].shift == 0;
        clean.then_some(st)
    }

    fn compare(&mut self, a: isize, b: isize, pick: fn(&CfState) -> Option<&Poly>) {
        if a == b {
            return;
        }
        let (Some(p), Some(q)) = (self.state(a).and_then(pick), self.state(b).and_then(pick)) else {
            return;
        };
        let scale = p.norm().max(q.norm()).max(1.0);
        self.worst = self.worst.max(p.max_abs_diff(q) / scale);
        self.pairs += 1;
    }
}

fn alpha_of(st: &CfState) -> Option<&Poly> {
    st.alpha.as_ref()
}

fn beta_of(st: &CfState) -> Option<&Poly> {
    st.beta.as_ref()
}

/// Periodicity and symmetry centres of a path, matched with relative tolerance `tol`.
pub fn detect(x: &Poly, path: &[&CfState], tol: f64) -> Result<SymmetryReport> {
    let seq = unfold(x, path)?;
    let len = seq.len() as isize;
    let mut report = SymmetryReport {
        period: find_period(&seq, seq.len(), tol),
        even_centers: vec![],
        odd_centers: vec![],
        match_tolerance: tol,
        length: seq.len(),
        window: seq.len(),
        window_period: None,
        pole_entries: seq.entries.iter().enumerate().filter(|(_, e)| e.state.is_none()).map(|(i, _)| i).collect(),
        mirror_checks: 0,
        coefficient_pairs: 0,
        coefficient_residual: 0.0,
    };
    for n in 0..len {
        if let Some(c) = even_center(&seq, n, tol) {
            report.even_centers.push(n as usize);
            report.mirror_checks += c;
        }
        if let Some(c) = odd_center(&seq, n, tol) {
            report.odd_centers.push(n as usize);
            report.mirror_checks += c;
        }
    }
    let reach = report.even_centers.iter().map(|n| 2 * n + 1).chain(report.odd_centers.iter().map(|c| 2 * c)).max();
    if let Some(r) = reach {
        report.window = r.min(seq.len());
    }
    report.window_period = find_period(&seq, report.window, tol);
    let mut coeffs = Coefficients { seq: &seq, path, pairs: 0, worst: 0.0 };
    for &n in &report.even_centers {
        let n = n as isize;
        for s in 0..len {
            coeffs.compare(n + s, n - s, alpha_of);
            coeffs.compare(n + s + 1, n - s, beta_of);
        }
    }
    for &c in &report.odd_centers {
        let c = c as isize;
        for s in 0..len {
            coeffs.compare(c + s, c - 1 - s, alpha_of);
            coeffs.compare(c + s, c - s, beta_of);
        }
    }
    if let Some(p) = report.period {
        for i in 0..len {
            coeffs.compare(i, i + p as isize, alpha_of);
            coeffs.compare(i, i + p as isize, beta_of);
        }
    }
    report.coefficient_pairs = coeffs.pairs;
    report.coefficient_residual = coeffs.worst;
    Ok(report)
}

/// Tolerance for `X(y) = 0`: `2^(-3P/4)` relative to `|X|`.
pub fn criterion_tol(prec: Precision) -> f64 {
    (-(f64::from(prec.bits()) * 0.75)).exp2()
}

/// Whether the expansion centred at `y` is even symmetric about its start.
pub fn even_criterion(x: &Poly, y: &Scalar) -> bool {
    let tol = criterion_tol(x.precision());
    x.eval(y).abs() <= tol * x.norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Contact {
    OddSymmetric,
    Gluing,
    /// Double root at `s = 0`, the `t = 0` configuration.
    Irregular,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocusPoint {
    pub s: Scalar,
    pub lambda: Scalar,
    pub residual: f64,
    /// Roots of `Q_X(lambda, .)` besides the double root.
    pub other_roots: Vec<Scalar>,
}

impl LocusPoint {
    pub fn at_zero(&self) -> bool {
        self.s.abs() < self.s.precision().match_tol()
    }

    /// Type of the contact for a run that arrives at `lambda` through `t = arrival`.
    pub fn contact_from(&self, arrival: &Scalar) -> Contact {
        if self.at_zero() {
            Contact::Irregular
        } else if arrival.approx_eq(&self.s, self.s.precision().match_tol()) {
            Contact::OddSymmetric
        } else {
            Contact::Gluing
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Locus {
    pub genus: usize,
    /// Eliminant in `s`, stripped of the factor `s^k` that elimination introduces.
    pub s_poly: Poly,
    pub s_valuation: usize,
    /// Discriminant of `Q_X(lambda, .)` in `s`, as a polynomial in `lambda`.
    pub lambda_poly: Poly,
    pub points: Vec<LocusPoint>,
}

impl Locus {
    pub fn s_degree(&self) -> usize {
        self.s_poly.degree()
    }

    pub fn lambda_degree(&self) -> usize {
        self.lambda_poly.degree()
    }
}

fn ds_coeffs(qx: &QxPoly) -> (Poly, Poly, Poly) {
    (qx.r2.deriv(), qx.r1.deriv(), qx.r0.deriv())
}

fn ds_relative(qx: &QxPoly, lambda: &Scalar, s: &Scalar) -> f64 {
    let (a, b, c) = ds_coeffs(qx);
    let v = &(&(&a.eval(s) * lambda) + &b.eval(s)) * lambda + &c.eval(s);
    let l = lambda.abs().max(1.0);
    v.abs() / (qx.norm() * l * l * s.abs().max(1.0).powi(qx.genus as i32 + 1))
}

/// Common zeros of `Q_X` and `dQ_X/ds`.
pub fn odd_symmetry_locus(x: &Poly) -> Result<Locus> {
    let qx = qx_build(x)?;
    let g = qx.genus;
    let prec = x.prec();
    let p = x.precision();
    let tol = p.match_tol();
    let (da, db, dc) = ds_coeffs(&qx);
    let samples = 4 * g + 3;

    let raw_s = interpolate_unit_circle(prec, samples, |s| {
        let (a, b, c) = qx.in_lambda(s);
        resultant(&[c, b, a], &[dc.eval(s), db.eval(s), da.eval(s)])
    });
    let raw_s = raw_s.with_len(raw_s.degree_tol(p.tau()) + 1);
    let s_valuation = raw_s.valuation_tol(p.tau()).unwrap_or(0);
    let s_poly = raw_s.shift_down(s_valuation).0;

    let lambda_poly = interpolate_unit_circle(prec, samples, |l| {
        let q = qx.in_s(l).with_len(g + 2);
        let dq = q.deriv().with_len(g + 1);
        resultant(q.coeffs(), dq.coeffs())
    });
    let lambda_poly = lambda_poly.with_len(lambda_poly.degree_tol(p.tau()) + 1);

    let mut candidates = if s_poly.degree() > 0 { poly_roots(&s_poly)? } else { vec![] };
    if s_valuation > 0 {
        candidates.push(Scalar::zero(prec));
    }
    let mut points: Vec<LocusPoint> = vec![];
    for s in candidates {
        let (a1, b1, c1) = qx.in_lambda(&s);
        let (a2, b2, c2) = (da.eval(&s), db.eval(&s), dc.eval(&s));
        let den = &(&b1 * &a2) - &(&b2 * &a1);
        let lambdas = if den.is_negligible(tol, (b1.abs() * a2.abs()).max(b2.abs() * a1.abs())) {
            quadratic_roots(&a1, &b1, &c1)
        } else {
            vec![&(&(&c2 * &a1) - &(&c1 * &a2)) / &den]
        };
        for lambda in lambdas {
            let residual = qx.relative_value(&lambda, &s).max(ds_relative(&qx, &lambda, &s));
            if !(residual < tol) {
                continue;
            }
            if points.iter().any(|q| q.s.approx_eq(&s, tol) && q.lambda.approx_eq(&lambda, tol)) {
                continue;
            }
            let mut others = poly_roots(&qx.in_s(&lambda).trimmed()).unwrap_or_default();
            others.sort_by(|u, v| (u - &s).abs().total_cmp(&(v - &s).abs()));
            let other_roots = others.into_iter().skip(2).collect();
            points.push(LocusPoint { s: s.clone(), lambda, residual, other_roots });
        }
    }
    Ok(Locus { genus: g, s_poly, s_valuation, lambda_poly, points })
}

fn quadratic_roots(a: &Scalar, b: &Scalar, c: &Scalar) -> Vec<Scalar> {
    let tol = a.precision().tau();
    if a.is_negligible(tol, b.abs().max(c.abs())) {
        if b.is_negligible(tol, c.abs()) {
            return vec![];
        }
        return vec![-&(c / b)];
    }
    let disc = (&b.square() - &(a * c).mul_i64(4)).sqrt();
    let two_a = a.mul_i64(2);
    vec![&(&-b + &disc) / &two_a, &(&-b - &disc) / &two_a]
}

/// Contact type of a state whose `B` has a repeated root or a root at its own `t`.
pub fn classify_state(st: &CfState) -> Option<Contact> {
    let t = st.t.as_ref()?;
    let tol = t.precision().match_tol();
    let roots = poly_roots(&st.b.trimmed()).ok()?;
    if roots.iter().any(|r| r.approx_eq(t, tol)) {
        return Some(if t.abs() < tol { Contact::Irregular } else { Contact::OddSymmetric });
    }
    let repeated = roots.iter().enumerate().any(|(i, r)| roots[i + 1..].iter().any(|q| q.approx_eq(r, tol)));
    repeated.then_some(Contact::Gluing)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClauseCheck {
    pub clause: &'static str,
    pub centers: (usize, usize),
    pub expected: usize,
    pub observed: Option<usize>,
    /// `None` when the run is too short to witness the clause.
    pub holds: Option<bool>,
}

fn period_clause(report: &SymmetryReport, clause: &'static str, centers: (usize, usize), expected: usize) -> ClauseCheck {
    let holds = match report.window_period {
        Some(p) => Some(expected % p == 0),
        None if expected + 2 <= report.window => Some(false),
        None => None,
    };
    ClauseCheck { clause, centers, expected, observed: report.window_period, holds }
}

/// Largest unfolded index a centre's mirror pairs touch.
fn mirror_reach(center: usize, odd: bool, len: usize) -> usize {
    let last = len.saturating_sub(1);
    let reach = if odd {
        (center + (center.saturating_sub(1)).min(last.saturating_sub(center)))
            .max(center.saturating_sub(1) + center.min(len.saturating_sub(center)))
    } else {
        center + center.min(last.saturating_sub(center))
    };
    reach.min(last)
}

fn center_clause(report: &SymmetryReport, clause: &'static str, from: usize, expected: usize, odd: bool) -> ClauseCheck {
    let list = if odd { &report.odd_centers } else { &report.even_centers };
    let found = list.contains(&expected);
    let testable = expected < report.length && mirror_reach(expected, odd, report.length) < report.window;
    ClauseCheck { clause, centers: (from, expected), expected, observed: found.then_some(expected), holds: testable.then_some(found) }
}

/// Index arithmetic relating periods and centres, checked against a report.
///
/// Periods are read on the report's window: beyond it a path with several root
/// choices may leave the symmetric continuation.
pub fn symmetry_algebra_check(report: &SymmetryReport) -> Vec<ClauseCheck> {
    let mut out = vec![];
    let (ev, od) = (&report.even_centers, &report.odd_centers);
    for (i, &m) in ev.iter().enumerate() {
        for &n in &ev[i + 1..] {
            out.push(period_clause(report, "persym2_a", (m, n), 2 * (n - m)));
        }
    }
    for (i, &m) in od.iter().enumerate() {
        for &n in &od[i + 1..] {
            out.push(period_clause(report, "persym2_b", (m, n), 2 * (n - m)));
        }
    }
    for &n in ev {
        for &m in od {
            let expected = if m <= n { 2 * (n - m) + 1 } else { 2 * (m - n) - 1 };
            out.push(period_clause(report, "persym2_c", (n, m), expected));
        }
    }
    if let Some(p) = report.window_period {
        if p % 2 == 0 {
            let r = p / 2;
            for &n in ev {
                out.push(center_clause(report, "persym1_a", n, n + r, false));
            }
            for &n in od {
                out.push(center_clause(report, "persym1_b", n, n + r, true));
            }
        } else {
            let r = (p + 1) / 2;
            for &n in ev {
                out.push(center_clause(report, "persym1_c", n, n + r, true));
            }
            for &m in od.iter().filter(|&&m| m >= r) {
                out.push(center_clause(report, "persym1_c_converse", m, m - r, false));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bal::HalphenElement;
    use crate::cfengine::{expand_element, Policy};

    fn report(even: &[usize], odd: &[usize], period: Option<usize>, length: usize) -> SymmetryReport {
        SymmetryReport {
            period,
            even_centers: even.to_vec(),
            odd_centers: odd.to_vec(),
            match_tolerance: 0.0,
            length,
            window: length,
            window_period: period,
            pole_entries: vec![],
            mirror_checks: 0,
            coefficient_pairs: 0,
            coefficient_residual: 0.0,
        }
    }

    #[test]
    fn criterion_examples() {
        let p = Precision::default();
        assert!(even_criterion(&Poly::from_i64s(256, &[1, 0, 0, 0, -1]), &p.int(1)));
        assert!(!even_criterion(&Poly::from_i64s(256, &[1, 0, 0, 0, 1]), &p.int(1)));
        let y = p.real(0.7);
        let off = &y + &p.parse("1e-40").unwrap();
        let x = Poly::from_roots(&p.one(), &[off, p.int(2), p.int(-3), p.complex(0.0, 1.0)]);
        assert!(!even_criterion(&x, &y));
    }

    #[test]
    fn symmetric_seed_and_negative_control() {
        let p = Precision::default();
        let x = Poly::from_i64s(256, &[1, 0, 0, 0, -1]);
        let h = HalphenElement::new(x.clone(), p.zero(), p.int(1), p.zero()).unwrap();
        let tree = expand_element(&h, 6, &Policy::First, 24).unwrap();
        let r = detect(&x, &tree.states_along(&tree.longest_path()), p.match_tol()).unwrap();
        assert_eq!(r.even_centers.first(), Some(&0));
        assert_eq!(r.period, Some(2));
        assert!(r.coefficient_residual < 1e-60);

        let x = Poly::new((0..5).map(|k| p.complex(0.3 + 0.2 * k as f64, 0.1 - 0.13 * k as f64)).collect(), 256);
        let t = p.complex(0.4, -0.25);
        let h = HalphenElement::new(x.clone(), p.zero(), t.clone(), x.eval(&t).sqrt()).unwrap();
        let tree = expand_element(&h, 8, &Policy::First, 24).unwrap();
        let r = detect(&x, &tree.states_along(&tree.longest_path()), p.match_tol()).unwrap();
        assert_eq!(r.features(), 0);
    }

    #[test]
    fn locus_of_binomials() {
        for c in [vec![1, 0, 0, 0, 1], vec![1, 0, 0, 0, 0, 0, 1]] {
            let loc = odd_symmetry_locus(&Poly::from_i64s(256, &c)).unwrap();
            assert_eq!(loc.points.len(), 1);
            let pt = &loc.points[0];
            assert!(pt.at_zero() && pt.lambda.abs() < 1e-60);
            assert_eq!(pt.contact_from(&pt.s), Contact::Irregular);
        }
    }

    #[test]
    fn generic_genus_two_locus() {
        let p = Precision::default();
        let x = Poly::new((0..7).map(|k| p.complex(0.5 - 0.1 * k as f64, 0.2 + 0.07 * (k * k) as f64)).collect(), 256);
        let loc = odd_symmetry_locus(&x).unwrap();
        assert_eq!((loc.s_degree(), loc.lambda_degree()), (6, 8));
        assert_eq!(loc.points.len(), 6);
        let lead_roots: Vec<Scalar> = {
            let q = qx_build(&x).unwrap();
            let lead = Poly::new(vec![q.r0.coeff(3), q.r1.coeff(3), q.r2.coeff(3)], 256);
            poly_roots(&lead).unwrap()
        };
        for r in poly_roots(&loc.lambda_poly).unwrap() {
            let known = loc.points.iter().any(|pt| pt.lambda.approx_eq(&r, 1e-30)) || lead_roots.iter().any(|l| l.approx_eq(&r, 1e-30));
            assert!(known, "unexplained lambda root {}", r.to_short());
        }
        for pt in &loc.points {
            assert!(pt.residual < p.match_tol());
            assert_eq!(pt.other_roots.len(), 1);
            assert_eq!(pt.contact_from(&pt.other_roots[0]), Contact::Gluing);
        }
    }

    #[test]
    fn index_arithmetic_of_centres() {
        let checks = symmetry_algebra_check(&report(&[2, 5], &[], Some(6), 12));
        assert_eq!((checks[0].clause, checks[0].expected, checks[0].holds), ("persym2_a", 6, Some(true)));
        let checks = symmetry_algebra_check(&report(&[3], &[1], Some(5), 12));
        assert_eq!((checks[0].clause, checks[0].expected, checks[0].holds), ("persym2_c", 5, Some(true)));
        let checks = symmetry_algebra_check(&report(&[1, 4], &[], Some(6), 12));
        let a: Vec<_> = checks.iter().filter(|c| c.clause == "persym1_a").map(|c| (c.expected, c.holds)).collect();
        assert_eq!(a, vec![(4, Some(true)), (7, Some(false))]);
        let checks = symmetry_algebra_check(&report(&[0], &[3], None, 4));
        assert_eq!(checks[0].holds, None);
    }
}
