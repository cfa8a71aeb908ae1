//! Steps where `t` is zero or infinite, and expansion centers at infinity.

use crate::arith::{series_sqrt, Poly, Scalar, Series};
use crate::bal::{self, genus_of, HalphenElement};
use crate::cfengine::{self, attach_roots, BranchTree, CfState, Policy, StepKind};
use crate::error::{Error, Result};
use crate::symmetry::{self, criterion_tol, SymmetryReport};

fn check_base(x: &Poly, genus: usize) -> Result<()> {
    let prec = x.precision();
    if x.coeff(0).is_negligible(prec.tau(), x.norm()) {
        return Err(Error::SqrtAtRoot);
    }
    if bal::is_perfect_square(x, genus)? {
        return Err(Error::PerfectSquare);
    }
    Ok(())
}

/// Base relation at `t = infinity`: `A = sqrt(p0) Q_g + sqrt(p_(2g+2)) s^(g+1)`, `X - A^2 = B s^(g+1)`.
pub fn t_infinity_root(x: &Poly, genus: usize) -> Result<CfState> {
    check_base(x, genus)?;
    let g = genus;
    let head = bal::sqrt_head(x, g + 1)?;
    let sqrt_p0 = head.coeff(0);
    let top = x.coeff(2 * g + 2).sqrt();
    let mut a = head.with_len(g + 2);
    a.set_coeff(g + 1, top.clone());
    let diff = x.sub(&a.mul(&a));
    let (b, low) = diff.shift_down(g + 1);
    let dropped = low.iter().map(Scalar::abs).fold(0.0, f64::max);
    let tol = x.precision().tau() * x.norm();
    if dropped > tol {
        return Err(Error::PrecisionLoss(format!("low part of X - A^2 is {dropped:.3e}")));
    }
    let b = b.with_len(g + 1);
    let st = CfState {
        index: 0,
        kind: StepKind::TInf,
        t: None,
        sqrt_y: None,
        lambda: &top / &sqrt_p0,
        a,
        b,
        c: head,
        alpha: None,
        beta: None,
        shift: 0,
        spare_roots: vec![],
        degenerate: false,
        pole_before: false,
        bal_residual: dropped / x.norm(),
        branch_residual: 0.0,
    };
    attach_roots(st, g)
}

/// `A` = series square root truncated to degree `g+1`, `X - A^2 = B s^(g+2)`.
fn zero_triplet(x: &Poly, genus: usize) -> Result<(Poly, Poly, Poly, f64)> {
    let g = genus;
    let a = bal::sqrt_head(x, g + 2)?;
    let diff = x.sub(&a.mul(&a));
    let (b, low) = diff.shift_down(g + 2);
    let dropped = low.iter().map(Scalar::abs).fold(0.0, f64::max);
    let tol = x.precision().tau() * x.norm();
    if dropped > tol {
        return Err(Error::PrecisionLoss(format!("low part of X - A^2 is {dropped:.3e}")));
    }
    let (c, _) = a.sub(&Poly::constant(a.coeff(0))).shift_down(1);
    Ok((a, b.with_len(g + 1), c, dropped / x.norm()))
}

/// Base relation at `t = 0`, expanding `(sqrt(X) - sqrt(p0)) / s`.
pub fn t_zero_root(x: &Poly, genus: usize) -> Result<CfState> {
    check_base(x, genus)?;
    let (a, b, c, res) = zero_triplet(x, genus)?;
    let sqrt_p0 = a.coeff(0);
    let st = CfState {
        index: 0,
        kind: StepKind::TZero,
        t: Some(Scalar::zero(x.prec())),
        sqrt_y: Some(sqrt_p0.clone()),
        lambda: &a.coeff(genus + 1) / &sqrt_p0,
        a,
        b,
        c,
        alpha: None,
        beta: None,
        shift: 0,
        spare_roots: vec![],
        degenerate: false,
        pole_before: false,
        bal_residual: res,
        branch_residual: 0.0,
    };
    attach_roots(st, genus)
}

/// Child through a vanishing root of the parent's `B`.
///
/// `alpha = A_parent + A0`, `beta = B_parent s^(g+1)`, and the new remainder
/// `sqrt(X) - A0` carries an extra factor `s`.
pub fn zero_child(x: &Poly, genus: usize, parent: &CfState) -> Result<CfState> {
    if parent.degenerate {
        return Err(Error::DegenerateB(parent.b.degree()));
    }
    let (a, b, c, res) = zero_triplet(x, genus)?;
    let sqrt_p0 = a.coeff(0);
    let alpha = parent.a.add(&a);
    let beta = parent.b.shift_up(genus + 1 + parent.shift);
    let st = CfState {
        index: parent.index + 1,
        kind: StepKind::TZero,
        t: Some(Scalar::zero(x.prec())),
        sqrt_y: Some(sqrt_p0.clone()),
        lambda: &a.coeff(genus + 1) / &sqrt_p0,
        a,
        b,
        c,
        alpha: Some(alpha),
        beta: Some(beta),
        shift: 1,
        spare_roots: vec![],
        degenerate: false,
        pole_before: true,
        bal_residual: res,
        branch_residual: 0.0,
    };
    attach_roots(st, genus)
}

pub fn expand_t_infinity(x: &Poly, depth: usize, policy: &Policy, order: usize) -> Result<BranchTree> {
    let g = genus_of(x)?;
    cfengine::expand(x, g, t_infinity_root(x, g)?, depth, policy, order)
}

pub fn expand_t_zero(x: &Poly, depth: usize, policy: &Policy, order: usize) -> Result<BranchTree> {
    let g = genus_of(x)?;
    cfengine::expand(x, g, t_zero_root(x, g)?, depth, policy, order)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Witness {
    pub premise: bool,
    pub conclusion: bool,
    pub report: SymmetryReport,
}

/// Expansion from `t = infinity` is even symmetric exactly when `p_(2g+2) = 0`.
pub fn infinity_symmetry_witness(x: &Poly, depth: usize, order: usize) -> Result<Witness> {
    let g = genus_of(x)?;
    let premise = x.coeff(2 * g + 2).abs() <= criterion_tol(x.precision()) * x.norm();
    let tree = expand_t_infinity(x, depth, &Policy::First, order)?;
    let report = symmetry::detect(x, &tree.states_along(&tree.longest_path()), x.precision().match_tol())?;
    let conclusion = report.even_centers.contains(&0);
    Ok(Witness { premise, conclusion, report })
}

/// Each pole entry `h` of the path, a step through `t = 0`, has an odd centre at `h + 1`.
pub fn zero_symmetry_witness(x: &Poly, path: &[&CfState]) -> Result<Witness> {
    let report = symmetry::detect(x, path, x.precision().match_tol())?;
    let premise = !report.pole_entries.is_empty();
    let conclusion = premise && report.pole_entries.iter().all(|h| report.odd_centers.contains(&(h + 1)));
    Ok(Witness { premise, conclusion, report })
}

/// Problem at `epsilon = infinity` in the variable `s = 1/x`.
#[derive(Clone, Debug)]
pub struct InfinityCenter {
    /// `s^(2g+2) X(1/s)`: coefficients reversed.
    pub x_rev: Poly,
    pub genus: usize,
    /// `1/y`.
    pub t: Scalar,
    /// `t^(g+1) sqrt(Y)`.
    pub sqrt_y: Scalar,
    pub sqrt_y_original: Scalar,
    pub y: Scalar,
}

/// Reverses `X` (in the global variable) for an expansion around `x = infinity`.
pub fn recenter_infinity(x: &Poly, y: &Scalar, sqrt_y: &Scalar) -> Result<InfinityCenter> {
    let genus = genus_of(x)?;
    let n = 2 * genus + 2;
    let prec = x.precision();
    if x.coeff(n).is_negligible(prec.tau(), x.norm()) {
        return Err(Error::LeadingVanishes);
    }
    if y.abs() < prec.match_tol() {
        return Err(Error::TAtZero);
    }
    let t = y.recip();
    let sy = &t.powi(genus as u32 + 1) * sqrt_y;
    Ok(InfinityCenter { x_rev: x.reversed(n), genus, t, sqrt_y: sy, sqrt_y_original: sqrt_y.clone(), y: y.clone() })
}

impl InfinityCenter {
    pub fn element(&self) -> Result<HalphenElement> {
        HalphenElement::new(self.x_rev.clone(), Scalar::zero(self.x_rev.prec()), self.t.clone(), self.sqrt_y.clone())
    }

    pub fn root_state(&self) -> Result<CfState> {
        let mut st = cfengine::root_state(&self.element()?)?;
        st.kind = StepKind::EpsInf;
        Ok(st)
    }

    pub fn expand(&self, depth: usize, policy: &Policy, order: usize) -> Result<BranchTree> {
        cfengine::expand(&self.x_rev, self.genus, self.root_state()?, depth, policy, order)
    }

    /// Compares `F(s) = s^g f(1/s)`, the original element near `x = infinity`,
    /// with the transformed element `f'` at `s = 0`.
    ///
    /// Returns the residual of `t^g F = h_g(s,t) sqrtY' - t^(g+1) f'` and the
    /// largest deviation of `F_k / f'_k` from `-t` over the coefficients `k > g`.
    pub fn equivalence_check(&self, order: usize) -> Result<(f64, f64)> {
        let g = self.genus;
        let prec = self.x_rev.prec();
        let root = series_sqrt(&self.x_rev, order)?;
        let top = Poly::monomial(self.sqrt_y_original.clone(), g + 1).to_series(order);
        // 1/(1 - y s)
        let geo = Series::new((0..order).map(|k| self.y.powi(k as u32)).collect(), prec);
        let big_f = root.sub(&top).mul(&geo);
        let f_prime = crate::arith::hh_series(&self.x_rev, &self.t, &self.sqrt_y, order)?;
        let hg = Poly::new((0..=g).map(|a| self.t.powi((g - a) as u32)).collect(), prec);
        let lhs = big_f.scale(&self.t.powi(g as u32));
        let rhs = hg.scale(&self.sqrt_y).to_series(order).sub(&f_prime.scale(&self.t.powi(g as u32 + 1)));
        let residual = lhs.max_abs_diff(&rhs) / lhs.norm().max(rhs.norm());
        let minus_t = -&self.t;
        let mut ratio_dev: f64 = 0.0;
        for k in g + 1..order {
            let fk = f_prime.coeff(k);
            if fk.abs() > self.x_rev.precision().tau() * f_prime.norm() {
                let r = &big_f.coeff(k) / &fk;
                ratio_dev = ratio_dev.max((&r - &minus_t).abs() / minus_t.abs());
            }
        }
        Ok((residual, ratio_dev))
    }
}

/// Residual of `y^(g+1) f = h_g(x,y) sqrtY + (y^(g+1) sqrtX - x^(g+1) sqrtY)/(x - y)`
/// as series in `s = x - epsilon`, with `X` given in `s` and `y = epsilon + t`.
pub fn identity_residual(h: &HalphenElement, order: usize) -> Result<f64> {
    let g = h.genus;
    let prec = h.x.prec();
    let eps = &h.epsilon;
    let y = eps + &h.t;
    let xv = Poly::new(vec![eps.clone(), Scalar::one(prec)], prec);
    let root = series_sqrt(&h.x, order)?;
    let f = h.series(order)?;
    let yg1 = y.powi(g as u32 + 1);
    let lhs = f.scale(&yg1);
    let mut hg = Poly::zero(prec);
    let mut xp = Poly::constant(Scalar::one(prec));
    for a in 0..=g {
        hg = hg.add(&xp.scale(&y.powi((g - a) as u32)));
        xp = xp.mul(&xv);
    }
    let xg1 = xp;
    let num = root.scale(&yg1).sub(&xg1.scale(&h.sqrt_y).to_series(order));
    let tail = num.mul(&Series::inv_linear(&h.t, order));
    let rhs = hg.scale(&h.sqrt_y).to_series(order).add(&tail);
    Ok(lhs.max_abs_diff(&rhs) / lhs.norm().max(rhs.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Precision;
    use crate::bal::Branch;

    fn sample(p: &Precision, g: usize) -> Poly {
        Poly::new((0..2 * g + 3).map(|k| p.complex(0.6 - 0.11 * k as f64, 0.05 + 0.09 * (k % 3) as f64)).collect(), 256)
    }

    #[test]
    fn infinity_root_of_binomial() {
        let x = Poly::from_i64s(256, &[1, 0, 0, 0, 1]);
        let st = t_infinity_root(&x, 1).unwrap();
        assert!(st.a.max_abs_diff(&Poly::from_i64s(256, &[1, 0, 1])) < 1e-70);
        assert!(st.lambda.approx_eq(&Precision::default().one(), 1e-70));
        assert!(st.bal_residual < 1e-70);
        assert_eq!(st.kind, StepKind::TInf);
    }

    #[test]
    fn symmetric_exactly_when_top_vanishes() {
        let x = Poly::from_i64s(256, &[1, 0, 0, 1, 0]);
        let w = infinity_symmetry_witness(&x, 5, 24).unwrap();
        assert!(w.premise && w.conclusion);
        let w = infinity_symmetry_witness(&Poly::from_i64s(256, &[1, 0, 0, 0, 1]), 5, 24).unwrap();
        assert!(!w.premise && !w.conclusion);
    }

    #[test]
    fn zero_root_matches_series() {
        let x = Poly::from_i64s(256, &[1, 0, 0, 0, 1]);
        let st = t_zero_root(&x, 1).unwrap();
        let root = series_sqrt(&x, 3).unwrap();
        assert!(st.a.to_series(3).max_abs_diff(&root) < 1e-70);
        let tree = expand_t_zero(&sample(&Precision::default(), 2), 4, &Policy::First, 24).unwrap();
        let w = zero_symmetry_witness(&tree.x, &tree.states_along(&tree.longest_path())).unwrap();
        assert!(w.premise && w.conclusion);
        assert_eq!(w.report.odd_centers, vec![1]);
    }

    #[test]
    fn squares_rejected() {
        let sq = Poly::from_i64s(256, &[1, 2, 1, 0, 0]);
        assert!(matches!(t_zero_root(&sq, 1), Err(Error::PerfectSquare)));
        let sq = Poly::from_i64s(256, &[1, 0, 2, 0, 1]);
        assert!(matches!(t_infinity_root(&sq, 1), Err(Error::PerfectSquare)));
    }

    #[test]
    fn reversal() {
        let p = Precision::default();
        let x = Poly::from_i64s(256, &[1, 2, 0, 0, 1]);
        let y = p.real(1.5);
        let c = recenter_infinity(&x, &y, &x.eval(&y).sqrt()).unwrap();
        assert_eq!(c.x_rev, Poly::from_i64s(256, &[1, 0, 0, 2, 1]));
        let padded = Poly::from_i64s(256, &[1, 0, 0, 1, 0]);
        assert!(matches!(recenter_infinity(&padded, &y, &padded.eval(&y).sqrt()), Err(Error::LeadingVanishes)));
    }

    #[test]
    fn infinity_equivalence_and_identity() {
        let p = Precision::default();
        for g in [1, 2] {
            let x = sample(&p, g);
            let y = p.complex(0.8, -0.6);
            let c = recenter_infinity(&x, &y, &x.eval(&y).sqrt()).unwrap();
            let (res, ratio) = c.equivalence_check(20).unwrap();
            assert!(res < 1e-60 && ratio < 1e-60, "g={g}: {res:e} {ratio:e}");
            let h = HalphenElement::from_global(&x, &p.real(0.25), &y, Branch::Principal).unwrap();
            assert!(identity_residual(&h, 20).unwrap() < 1e-60);
        }
    }
}
