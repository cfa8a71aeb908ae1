//! The basic curve `Q_X(lambda, s) = 0`: morphism from `w^2 = X(x)`, ramification,
//! divisor dynamics and the relative-class index.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{interpolate_unit_circle, poly_roots, resultant, Poly, Scalar};
use crate::error::{Error, Result};
use crate::spectral::{qx_build, QxPoly};

/// Point of `w^2 = X(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: Scalar,
    pub w: Scalar,
}

impl CurvePoint {
    pub fn on(x: &Poly, at: Scalar) -> CurvePoint {
        let w = x.eval(&at).sqrt();
        CurvePoint { x: at, w }
    }

    pub fn involution(&self) -> CurvePoint {
        CurvePoint { x: self.x.clone(), w: -&self.w }
    }
}

/// Point of the basic curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasicPoint {
    pub t: Scalar,
    pub lambda: Scalar,
}

fn lambda_at(qx: &QxPoly, sqrt_p0: &Scalar, pt: &CurvePoint) -> Result<Scalar> {
    let t = &pt.x;
    if t.abs() < t.precision().match_tol() {
        return Err(Error::TAtZero);
    }
    let num = &(&pt.w / sqrt_p0) - &qx.q_g().eval(t);
    Ok(&num / &t.powi(qx.genus as u32 + 1))
}

/// The other `lambda` over the same `t`.
pub fn basic_involution(qx: &QxPoly, pt: &BasicPoint) -> Result<BasicPoint> {
    let (a, b, _) = qx.in_lambda(&pt.t);
    if a.is_negligible(pt.t.precision().tau(), qx.norm()) {
        return Err(Error::QuadraticDegenerate);
    }
    Ok(BasicPoint { t: pt.t.clone(), lambda: &-&(&b / &a) - &pt.lambda })
}

/// `(x, w) -> (x, (w/sqrt(p0) - Q_g(x)) / x^(g+1))`.
pub fn morphism(x: &Poly, pt: &CurvePoint) -> Result<BasicPoint> {
    let qx = qx_build(x)?;
    let lambda = lambda_at(&qx, &x.coeff(0).sqrt(), pt)?;
    Ok(BasicPoint { t: pt.x.clone(), lambda })
}

/// Relative size of `f(tau P) - tau f(P)` and of `Q_X` at `f(P)`.
pub fn commuting_residual(x: &Poly, pt: &CurvePoint) -> Result<(f64, f64)> {
    let qx = qx_build(x)?;
    let image = morphism(x, pt)?;
    let via_curve = morphism(x, &pt.involution())?;
    let via_basic = basic_involution(&qx, &image)?;
    let scale = via_curve.lambda.abs().max(1.0);
    Ok(((&via_curve.lambda - &via_basic.lambda).abs() / scale, qx.relative_value(&image.lambda, &image.t)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Branching {
    /// Distinct finite branch points with multiplicity.
    pub finite: Vec<(Scalar, usize)>,
    /// Multiplicity absorbed at infinity.
    pub at_infinity: usize,
    pub degree: usize,
}

fn cluster(roots: Vec<Scalar>, tol: f64) -> Vec<(Scalar, usize)> {
    let mut out: Vec<(Scalar, usize)> = vec![];
    for r in roots {
        match out.iter_mut().find(|(c, _)| c.approx_eq(&r, tol)) {
            Some(entry) => entry.1 += 1,
            None => out.push((r, 1)),
        }
    }
    out
}

fn branching(poly: &Poly, expected: usize, what: &str) -> Result<Branching> {
    let tau = poly.precision().tau();
    if poly.is_zero_tol(tau, 1.0) || poly.norm() == 0.0 {
        return Err(Error::DegenerateDiscriminant(what.to_string()));
    }
    let d = poly.degree_tol(tau);
    let roots = if d > 0 { poly_roots(&poly.with_len(d + 1))? } else { vec![] };
    Ok(Branching { finite: cluster(roots, poly.precision().match_tol()), at_infinity: expected.saturating_sub(d), degree: d })
}

#[derive(Clone, Debug, Serialize)]
pub struct Ramification {
    pub genus: usize,
    /// Branch points of the projection to `s`: zeros of the discriminant in `lambda`.
    pub even: Branching,
    /// Branch points of the projection to `lambda`: odd-symmetric and gluing values.
    pub odd_gluing: Branching,
    pub disc_lambda: Poly,
    pub disc_s: Poly,
    /// Genus of the basic curve from each Riemann-Hurwitz count.
    pub genus_from_even: f64,
    pub genus_from_odd_gluing: f64,
}

/// `disc_lambda Q_X` in `s` and `disc_s Q_X` in `lambda`, by interpolation of resultants.
pub fn ramification(x: &Poly) -> Result<Ramification> {
    let qx = qx_build(x)?;
    let g = qx.genus;
    let prec = x.prec();
    let disc_lambda = interpolate_unit_circle(prec, 2 * g + 3, |s| {
        let (a, b, c) = qx.in_lambda(s);
        &b.square() - &(&a * &c).mul_i64(4)
    });
    let res = interpolate_unit_circle(prec, 4 * g + 3, |l| {
        let q = qx.in_s(l).with_len(g + 2);
        let dq = q.deriv().with_len(g + 1);
        resultant(q.coeffs(), dq.coeffs())
    });
    let k = g + 1;
    let lead = Poly::new(vec![qx.r0.coeff(k), qx.r1.coeff(k), qx.r2.coeff(k)], prec);
    let (disc_s, rem) = res.div_rem(&lead.trimmed());
    if rem.norm() > x.precision().match_tol() * res.norm().max(1.0) {
        return Err(Error::PrecisionLoss(format!("resultant not divisible by the leading form: {:.3e}", rem.norm())));
    }
    let even = branching(&disc_lambda, 2 * g + 2, "lambda")?;
    let odd_gluing = branching(&disc_s, 4 * g, "s")?;
    let deg_e = (even.degree + even.at_infinity) as f64;
    let deg_or = (odd_gluing.degree + odd_gluing.at_infinity) as f64;
    Ok(Ramification {
        genus: g,
        genus_from_even: (deg_e - 2.0) / 2.0,
        genus_from_odd_gluing: (deg_or - 2.0 * (g as f64 + 1.0) + 2.0) / 2.0,
        even,
        odd_gluing,
        disc_lambda,
        disc_s,
    })
}

/// Fibre of `lambda` over a value: `g + 1` points of `w^2 = X(x)`.
#[derive(Clone, Debug, Serialize)]
pub struct Divisor {
    pub value: Scalar,
    pub points: Vec<CurvePoint>,
}

fn fibre(qx: &QxPoly, sqrt_p0: &Scalar, value: &Scalar) -> Result<Vec<CurvePoint>> {
    let roots = crate::spectral::t_roots_at(qx, value)?;
    let qg = qx.q_g();
    let k = qx.genus as u32 + 1;
    Ok(roots
        .into_iter()
        .map(|t| {
            let w = sqrt_p0 * &(&qg.eval(&t) + &(value * &t.powi(k)));
            CurvePoint { x: t, w }
        })
        .collect())
}

pub fn divisor_of(x: &Poly, value: &Scalar) -> Result<Divisor> {
    let qx = qx_build(x)?;
    let points = fibre(&qx, &x.coeff(0).sqrt(), value)?;
    let tol = value.precision().match_tol();
    let worst = cluster(points.iter().map(|p| p.x.clone()).collect(), tol).into_iter().map(|(_, m)| m).max().unwrap_or(1);
    if worst > 1 {
        return Err(Error::BranchValue(worst));
    }
    Ok(Divisor { value: value.clone(), points })
}

/// The `g + 1` divisors `D(lambda(tau P))` for `P` in `D`.
pub fn dynamics_step(x: &Poly, d: &Divisor) -> Result<Vec<Divisor>> {
    let qx = qx_build(x)?;
    let sqrt_p0 = x.coeff(0).sqrt();
    d.points
        .iter()
        .map(|p| {
            let value = lambda_at(&qx, &sqrt_p0, &p.involution())?;
            divisor_of(x, &value)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthLevel {
    pub level: usize,
    /// Branch count without identification, `(g+1)^level`.
    pub raw_count: u64,
    pub distinct_count: usize,
    /// Branches lost through `t = 0` or a point at infinity.
    pub escaped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    pub genus: usize,
    pub tolerance: f64,
    pub levels: Vec<GrowthLevel>,
    /// Least-squares slope of `ln distinct_count` against `ln level`.
    pub exponent: Option<f64>,
}

impl GrowthProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,raw_count,distinct_count\n");
        for l in &self.levels {
            out.push_str(&format!("{},{},{}\n", l.level, l.raw_count, l.distinct_count));
        }
        out
    }
}

fn children(qx: &QxPoly, sqrt_p0: &Scalar, value: &Scalar) -> (Vec<Scalar>, usize) {
    let Ok(points) = fibre(qx, sqrt_p0, value) else {
        return (vec![], qx.genus + 1);
    };
    let mut escaped = qx.genus + 1 - points.len();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        match lambda_at(qx, sqrt_p0, &p.involution()) {
            Ok(v) if v.is_finite() => out.push(v),
            _ => escaped += 1,
        }
    }
    (out, escaped)
}

fn distinct(values: Vec<Scalar>, tol: f64) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = vec![];
    for v in values {
        if !out.iter().any(|u| u.approx_eq(&v, tol)) {
            out.push(v);
        }
    }
    out
}

fn slope(levels: &[GrowthLevel]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .filter(|l| l.level >= 1 && l.distinct_count > 0)
        .map(|l| ((l.level as f64).ln(), (l.distinct_count as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Distinct `lambda` values reached at each level of the divisor dynamics from `start`.
pub fn growth_profile(x: &Poly, start: &CurvePoint, depth: usize) -> Result<GrowthProfile> {
    let qx = qx_build(x)?;
    let g = qx.genus;
    let sqrt_p0 = x.coeff(0).sqrt();
    let tol = x.precision().match_tol();
    let mut current = vec![lambda_at(&qx, &sqrt_p0, start)?];
    let mut levels = vec![GrowthLevel { level: 0, raw_count: 1, distinct_count: 1, escaped: 0 }];
    for level in 1..=depth {
        let expanded: Vec<(Vec<Scalar>, usize)> = current.par_iter().map(|v| children(&qx, &sqrt_p0, v)).collect();
        let escaped = expanded.iter().map(|e| e.1).sum();
        current = distinct(expanded.into_iter().flat_map(|e| e.0).collect(), tol);
        levels.push(GrowthLevel {
            level,
            raw_count: ((g + 1) as u64).saturating_pow(level as u32),
            distinct_count: current.len(),
            escaped,
        });
    }
    let exponent = slope(&levels);
    Ok(GrowthProfile { genus: g, tolerance: tol, levels, exponent })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub lambda: Scalar,
    pub lambda_tau: Scalar,
    /// Closed form with `sqrt(p_(2g+2))` as printed.
    pub printed: Scalar,
    /// Closed form with the limit value `sqrt(p_(2g+2)/p0)` of `lambda` at infinity.
    pub normalized: Scalar,
    /// Extrapolated limit definition.
    pub limit: Scalar,
    pub normalized_vs_limit: f64,
    pub printed_vs_limit: f64,
}

fn closed_form(l: &Scalar, z1: &Scalar, z2: &Scalar) -> Result<Scalar> {
    let diff = z2 - z1;
    let den = &(&l.square() - &(l * &diff)) - &(z1 * z2);
    if den.is_negligible(l.precision().tau(), l.abs().max(1.0).powi(2) + (z1 * z2).abs()) {
        return Err(Error::DenominatorZero);
    }
    Ok(&Scalar::one(l.prec()) + &(&(l * &diff).mul_i64(2) / &den))
}

/// Value at `h = 0` of the interpolating polynomial through `(h_i, v_i)`.
fn neville(h: &[Scalar], v: &[Scalar]) -> Scalar {
    let mut p = v.to_vec();
    let n = h.len();
    for k in 1..n {
        for i in 0..n - k {
            let (hi, hk) = (&h[i], &h[i + k]);
            p[i] = &(&(&p[i + 1] * hi) - &(&p[i] * hk)) / &(hi - hk);
        }
    }
    p[0].clone()
}

/// Index `I(P, tau P)`: closed forms against the limit definition.
pub fn index(x: &Poly, pt: &CurvePoint) -> Result<IndexReport> {
    let qx = qx_build(x)?;
    let g = qx.genus;
    let prec = x.precision();
    let top = x.coeff(2 * g + 2);
    if top.is_negligible(prec.tau(), x.norm()) {
        return Err(Error::DenominatorZero);
    }
    let sqrt_p0 = x.coeff(0).sqrt();
    let sqrt_top = top.sqrt();
    let z1 = lambda_at(&qx, &sqrt_p0, pt)?;
    let z2 = lambda_at(&qx, &sqrt_p0, &pt.involution())?;
    let printed = closed_form(&sqrt_top, &z1, &z2);
    let normalized = closed_form(&(&sqrt_top / &sqrt_p0), &z1, &z2)?;

    let mut hs = vec![];
    let mut values = vec![];
    for far_x in [1e3, 1e4, 1e6] {
        let at = prec.real(far_x);
        hs.push(at.recip());
        let mut far = CurvePoint::on(x, at.clone());
        let lead = &sqrt_top * &at.powi(g as u32 + 1);
        if (&far.w - &lead).abs() > (&far.w + &lead).abs() {
            far = far.involution();
        }
        let lp = lambda_at(&qx, &sqrt_p0, &far)?;
        let lm = lambda_at(&qx, &sqrt_p0, &far.involution())?;
        let plus = &(&lp - &z1) / &(&lp - &z2);
        let minus = &(&lm - &z1) / &(&lm - &z2);
        values.push(&plus / &minus);
    }
    let limit = neville(&hs, &values);
    let rel = |v: &Scalar| (v - &limit).abs() / limit.abs().max(1e-300);
    Ok(IndexReport {
        normalized_vs_limit: rel(&normalized),
        printed_vs_limit: printed.as_ref().map(rel).unwrap_or(f64::INFINITY),
        printed: printed.unwrap_or_else(|_| crate::arith::nan(x.prec())),
        lambda: z1,
        lambda_tau: z2,
        normalized,
        limit,
    })
}
