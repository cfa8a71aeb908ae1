use super::poly::Poly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 2000;

/// All roots of `b` with multiplicity, in canonical (magnitude, phase) order.
///
/// Aberth iteration at full working precision. Every returned root `r`
/// satisfies `|b(r)| <= tau * |b| * max(1, |r|)^deg`, and the product of
/// the linear factors reproduces `b` coefficientwise.
pub fn poly_roots(b: &Poly) -> Result<Vec<Scalar>> {
    let prec = b.prec();
    let precision = b.precision();
    let p = b.trimmed();
    let n = p.nominal_degree();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let lead = p.coeff(n);
    let monic = p.scale(&lead.recip());
    let mut roots = if n == 1 {
        vec![-monic.coeff(0)]
    } else {
        aberth(&monic)?
    };
    let bits = prec as f64;
    let clean = 2f64.powf(-0.75 * bits);
    for r in roots.iter_mut() {
        *r = r.cleaned(clean);
    }
    let norm = p.norm();
    let tau = precision.tau();
    for r in &roots {
        let bound = tau * norm * r.abs().max(1.0).powi(n as i32);
        let res = p.eval(r).abs();
        if !(res <= bound) {
            return Err(Error::RootsNotConverged(res / bound.max(f64::MIN_POSITIVE)));
        }
    }
    let back = Poly::from_roots(&lead, &roots);
    let gap = back.max_abs_diff(&p) / norm;
    if !(gap <= precision.match_tol()) {
        return Err(Error::RootsNotConverged(gap));
    }
    let tol = precision.match_tol();
    roots.sort_by(|a, b| a.canonical_cmp(b, tol));
    Ok(roots)
}

/// Starting moduli from the upper convex hull of `(k, log|a_k|)`, one per root.
fn polygon_radii(monic: &Poly) -> Vec<f64> {
    let n = monic.nominal_degree();
    let logs: Vec<Option<f64>> = monic.coeffs()[..=n]
        .iter()
        .map(|c| {
            let l = c.log2_abs();
            l.is_finite().then_some(l)
        })
        .collect();
    let pts: Vec<(usize, f64)> = logs.iter().enumerate().filter_map(|(k, l)| l.map(|v| (k, v))).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut radii = Vec::with_capacity(n);
    let lowest = hull.first().map_or(0, |h| h.0);
    let smallest = if hull.len() >= 2 { (hull[0].1 - hull[1].1) / (hull[1].0 - hull[0].0) as f64 } else { 0.0 };
    // exact zero roots start just inside the smallest nonzero circle
    radii.extend(std::iter::repeat(2f64.powf(smallest - 20.0)).take(lowest));
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let r = 2f64.powf((a.1 - b.1) / (b.0 - a.0) as f64);
        radii.extend(std::iter::repeat(r).take(b.0 - a.0));
    }
    radii.iter().map(|r| if r.is_finite() && *r > 0.0 { *r } else { 1.0 }).collect()
}

fn aberth(monic: &Poly) -> Result<Vec<Scalar>> {
    let prec = monic.prec();
    let n = monic.nominal_degree();
    let deriv = monic.deriv();
    let radii = polygon_radii(monic);
    let radius = radii.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let mut z: Vec<Scalar> = radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Scalar::cis(prec, theta).mul_f64(r)
        })
        .collect();

    let bits = prec as f64;
    let stop = 2f64.powf(-bits + 10.0);
    let floor = radius * 2f64.powf(-bits / 2.0);
    let mut best = f64::INFINITY;
    let mut stalled = 0usize;
    for _ in 0..MAX_ITERATIONS {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let pv = monic.eval(&z[k]);
            if pv.is_exact_zero() {
                continue;
            }
            let dv = deriv.eval(&z[k]);
            let w = &pv / &dv;
            let mut sum = Scalar::zero(prec);
            for j in 0..n {
                if j != k {
                    sum += &(&z[k] - &z[j]).recip();
                }
            }
            let denom = Scalar::one(prec) - &(&w * &sum);
            let corr = &w / &denom;
            if !corr.is_finite() {
                // coincident iterates: nudge apart
                let nudge = Scalar::cis(prec, 1.0 + k as f64).mul_f64(radius * 1e-3);
                z[k] += &nudge;
                worst = f64::INFINITY;
                continue;
            }
            let rel = corr.abs() / z[k].abs().max(floor);
            worst = worst.max(rel);
            z[k] -= &corr;
        }
        if worst <= stop {
            return Ok(z);
        }
        if worst < best * 0.5 {
            best = worst;
            stalled = 0;
        } else {
            stalled += 1;
            // multiple roots converge only linearly and stagnate at noise level
            if stalled >= 12 && residual_ok(monic, &z) {
                return Ok(z);
            }
        }
    }
    if residual_ok(monic, &z) {
        Ok(z)
    } else {
        Err(Error::RootsNotConverged(best))
    }
}

fn residual_ok(p: &Poly, z: &[Scalar]) -> bool {
    let n = p.nominal_degree() as i32;
    let tau = p.precision().tau();
    let norm = p.norm();
    z.iter().all(|r| p.eval(r).abs() <= tau * norm * r.abs().max(1.0).powi(n))
}
