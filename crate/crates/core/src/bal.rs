//! One step of the expansion: the unique triplet `(A, B, C)` with
//! `A - sqrtY = C (s - t)` and `X - A^2 = B s^(g+1) (s - t)`.

use serde::{Deserialize, Serialize};

use crate::arith::{hh_series, recenter, series_sqrt, solve_linear, Poly, Precision, Scalar, Series};
use crate::error::{Error, Result};

/// Genus from the nominal degree `2g + 2` of `X`.
pub fn genus_of(x: &Poly) -> Result<usize> {
    let n = x.nominal_degree();
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!("X must have even degree 2g+2 >= 4, got {n}")));
    }
    Ok((n - 2) / 2)
}

/// Branch choice for `sqrt(X(y))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Principal,
    Negative,
}

/// `(sqrt(X) - sqrt(Y)) / (x - y)` with `X` already recentered at `epsilon`.
#[derive(Clone, Debug)]
pub struct HalphenElement {
    pub x: Poly,
    pub genus: usize,
    pub epsilon: Scalar,
    pub t: Scalar,
    pub sqrt_y: Scalar,
    pub sqrt_p0: Scalar,
}

impl HalphenElement {
    /// `x` is in the local variable `s`; `t = y - epsilon`.
    pub fn new(x: Poly, epsilon: Scalar, t: Scalar, sqrt_y: Scalar) -> Result<Self> {
        let genus = genus_of(&x)?;
        let p0 = x.coeff(0);
        let prec = x.precision();
        if p0.is_negligible(prec.tau(), x.norm()) {
            return Err(Error::SqrtAtRoot);
        }
        let y_val = x.eval(&t);
        let scale = x.norm() * t.abs().max(1.0).powi(x.nominal_degree() as i32);
        if !(&sqrt_y.square() - &y_val).is_negligible(prec.tau(), scale) {
            return Err(Error::InvalidInput("sqrtY^2 differs from X(t)".into()));
        }
        let sqrt_p0 = p0.sqrt();
        Ok(HalphenElement { x, genus, epsilon, t, sqrt_y, sqrt_p0 })
    }

    /// Builds the element from `X` in the global variable, a center and a point `y`.
    pub fn from_global(x_global: &Poly, epsilon: &Scalar, y: &Scalar, branch: Branch) -> Result<Self> {
        let x = recenter(x_global, epsilon);
        let t = y - epsilon;
        let root = x.eval(&t).sqrt();
        let sqrt_y = match branch {
            Branch::Principal => root,
            Branch::Negative => -root,
        };
        HalphenElement::new(x, epsilon.clone(), t, sqrt_y)
    }

    pub fn precision(&self) -> Precision {
        self.x.precision()
    }

    /// The element's series about `s = 0`.
    pub fn series(&self, order: usize) -> Result<Series> {
        hh_series(&self.x, &self.t, &self.sqrt_y, order)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BalTriplet {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    /// `A_(g+1) / sqrt(p0)`.
    pub lambda: Scalar,
    /// Residual of `A - sqrtY - C (s - t)`, relative to `|X|`.
    pub residual_linear: f64,
    /// Residual of `X - A^2 - B s^(g+1) (s - t)`, relative to `|X|`.
    pub residual_quadratic: f64,
    /// `B(t) = 0`: `X - A^2` has a double root at `s = t`.
    pub double_root_at_t: bool,
}

impl BalTriplet {
    /// `deg B < g`: one spare root went to infinity.
    pub fn is_degenerate(&self, genus: usize) -> bool {
        self.b.degree() < genus
    }
}

/// `X - p` must be divisible by `s^k`; returns the quotient and the relative size of what was dropped.
fn divide_by_power(x: &Poly, k: usize) -> (Poly, f64) {
    let (q, low) = x.shift_down(k);
    let dropped = low.iter().map(Scalar::abs).fold(0.0, f64::max);
    (q, dropped)
}

/// Truncation of the series square root of `X` to degree `g` (or `g+1`).
pub fn sqrt_head(x: &Poly, len: usize) -> Result<Poly> {
    Ok(series_sqrt(x, len)?.to_poly())
}

pub fn is_perfect_square(x: &Poly, genus: usize) -> Result<bool> {
    let head = sqrt_head(x, genus + 2)?;
    let rem = x.sub(&head.mul(&head));
    Ok(rem.is_zero_tol(x.precision().tau(), x.norm()))
}

pub fn identity_residuals(x: &Poly, genus: usize, t: &Scalar, sqrt_y: &Scalar, a: &Poly, b: &Poly, c: &Poly) -> (f64, f64) {
    let lin = Poly::linear(t);
    let r1 = a.sub(&Poly::constant(sqrt_y.clone())).sub(&c.mul(&lin));
    let r2 = x.sub(&a.mul(a)).sub(&b.shift_up(genus + 1).mul(&lin));
    let n = x.norm();
    (r1.norm() / n, r2.norm() / n)
}

/// The constructive solve at a regular point `t`.
pub fn solve_bal(h: &HalphenElement) -> Result<BalTriplet> {
    solve_at(&h.x, h.genus, &h.t, &h.sqrt_y)
}

pub fn solve_at(x: &Poly, genus: usize, t: &Scalar, sqrt_y: &Scalar) -> Result<BalTriplet> {
    let prec = x.precision();
    let g = genus;
    if t.abs() < prec.match_tol() {
        return Err(Error::TAtZero);
    }
    if is_perfect_square(x, g)? {
        return Err(Error::PerfectSquare);
    }
    let head = sqrt_head(x, g + 1)?;
    let sqrt_p0 = head.coeff(0);
    let tg1 = t.powi(g as u32 + 1);
    let a_top = &(sqrt_y - &head.eval(t)) / &tg1;
    let mut a = head.with_len(g + 2);
    a.set_coeff(g + 1, a_top.clone());

    let (c, rem_c) = a.sub(&Poly::constant(sqrt_y.clone())).div_linear(t);
    let diff = x.sub(&a.mul(&a));
    let (shifted, dropped) = divide_by_power(&diff, g + 1);
    let (b, rem_b) = shifted.div_linear(t);
    let b = b.with_len(g + 1);
    let c = c.with_len(g + 1);

    let scale = x.norm() * t.abs().max(1.0).powi(2 * g as i32 + 2);
    let tol = prec.tau() * scale;
    if dropped > tol || rem_b.abs() > tol || rem_c.abs() > tol {
        return Err(Error::PrecisionLoss(format!(
            "division remainders {:.3e}, {:.3e}, {:.3e} exceed {:.3e}",
            dropped,
            rem_b.abs(),
            rem_c.abs(),
            tol
        )));
    }
    let (r1, r2) = identity_residuals(x, g, t, sqrt_y, &a, &b, &c);
    let double_root_at_t = b.eval(t).is_negligible(prec.match_tol(), b.norm() * t.abs().max(1.0).powi(g as i32));
    Ok(BalTriplet {
        lambda: &a_top / &sqrt_p0,
        a,
        b,
        c,
        residual_linear: r1,
        residual_quadratic: r2,
        double_root_at_t,
    })
}

/// Independent solve of the same triplet: Newton iteration for the square-root
/// head and dense linear systems for the coefficients of `C` and `B`.
pub fn cross_solve(x: &Poly, genus: usize, t: &Scalar, sqrt_y: &Scalar) -> Result<BalTriplet> {
    let g = genus;
    let prec = x.prec();
    let order = g + 1;
    let xs = x.to_series(order);
    let mut s = Series::constant(x.coeff(0).sqrt(), order);
    let half = Scalar::one(prec).div_i64(2);
    for _ in 0..(usize::BITS - order.leading_zeros() + 2) {
        s = s.add(&xs.div(&s)?).scale(&half);
    }
    let head = s.to_poly();
    let a_top = &(sqrt_y - &head.eval(t)) / &t.powi(g as u32 + 1);
    let mut a = head.with_len(g + 2);
    a.set_coeff(g + 1, a_top.clone());

    // coefficient of s^k in C (s - t) is C_(k-1) - t C_k, for k = 1..=g+1
    let band = |n: usize| -> Vec<Vec<Scalar>> {
        (1..=n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        if j + 1 == k {
                            Scalar::one(prec)
                        } else if j == k {
                            -t
                        } else {
                            Scalar::zero(prec)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let rhs_c: Vec<Scalar> = (1..=g + 1).map(|k| a.coeff(k)).collect();
    let c = Poly::new(solve_linear(band(g + 1), rhs_c)?, prec);
    let diff = x.sub(&a.mul(&a));
    let rhs_b: Vec<Scalar> = (1..=g + 1).map(|k| diff.coeff(g + 1 + k)).collect();
    let b = Poly::new(solve_linear(band(g + 1), rhs_b)?, prec);
    let (r1, r2) = identity_residuals(x, g, t, sqrt_y, &a, &b, &c);
    Ok(BalTriplet {
        lambda: &a_top / &x.coeff(0).sqrt(),
        a,
        b,
        c,
        residual_linear: r1,
        residual_quadratic: r2,
        double_root_at_t: false,
    })
}

/// Largest coefficientwise difference between two triplets, relative to `|X|`.
pub fn triplet_distance(u: &BalTriplet, v: &BalTriplet, x_norm: f64) -> f64 {
    [u.a.max_abs_diff(&v.a), u.b.max_abs_diff(&v.b), u.c.max_abs_diff(&v.c)]
        .into_iter()
        .fold(0.0, f64::max)
        / x_norm
}

/// First remainder `Q0 = B s^(g+1) / (sqrt(X) + A)` and its distance from `f - C`.
pub fn first_remainder(h: &HalphenElement, tri: &BalTriplet, order: usize) -> Result<(Series, f64)> {
    let root = series_sqrt(&h.x, order)?;
    let q0 = tri.b.shift_up(h.genus + 1).to_series(order).div(&root.add_poly(&tri.a))?;
    let direct = h.series(order)?.sub(&tri.c.to_series(order));
    Ok((q0.clone(), q0.max_abs_diff(&direct)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn poly(v: &[i64]) -> Poly {
        Poly::from_i64s(256, v)
    }

    #[test]
    fn genus_one_worked_example() {
        let r2 = p().int(2).sqrt();
        let tri = solve_at(&poly(&[1, 0, 0, 0, 1]), 1, &p().int(1), &r2).unwrap();
        let k = &r2 - p().int(1);
        let a = Poly::new(vec![p().int(1), p().zero(), k.clone()], 256);
        assert!(tri.a.max_abs_diff(&a) < 1e-70);
        assert!(tri.b.max_abs_diff(&poly(&[1, 1]).scale(&k.mul_i64(2))) < 1e-70);
        assert!(tri.c.max_abs_diff(&poly(&[1, 1]).scale(&k)) < 1e-70);
        assert!(tri.lambda.approx_eq(&k, 1e-70));
    }

    #[test]
    fn root_of_x_as_y() {
        let tri = solve_at(&poly(&[1, 0, 0, 0, -1]), 1, &p().int(1), &p().zero()).unwrap();
        assert!(tri.a.max_abs_diff(&poly(&[1, 0, -1])) < 1e-70);
        assert!(tri.c.max_abs_diff(&poly(&[-1, -1])) < 1e-70);
        assert!(tri.b.max_abs_diff(&poly(&[-2, -2])) < 1e-70);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(solve_at(&poly(&[1, 2, 1, 0, 0]), 1, &p().int(1), &p().int(2)), Err(Error::PerfectSquare)));
        assert!(matches!(solve_at(&poly(&[1, 0, 0, 0, 1]), 1, &p().zero(), &p().int(1)), Err(Error::TAtZero)));
        assert!(matches!(solve_at(&poly(&[0, 1, 0, 0, 1]), 1, &p().int(1), &p().int(2).sqrt()), Err(Error::SqrtAtRoot)));
    }

    #[test]
    fn first_remainder_starts_at_order_g_plus_one() {
        let r2 = p().int(2).sqrt();
        let h = HalphenElement::new(poly(&[1, 0, 0, 0, 0, 0, 1]), p().zero(), p().int(1), r2).unwrap();
        let tri = solve_bal(&h).unwrap();
        let (q0, gap) = first_remainder(&h, &tri, 16).unwrap();
        assert!(gap < 1e-70);
        assert_eq!(q0.valuation(1e-60, 1.0), Some(3));
    }
}
