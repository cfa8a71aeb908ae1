//! The bivariate polynomial `Q_X(lambda, s)` and the low-genus normal forms.

use serde::Serialize;

use crate::arith::{poly_roots, series_sqrt, Poly, Scalar};
use crate::bal::genus_of;
use crate::cfengine::CfState;
use crate::error::{Error, Result};

/// Coefficients of `sqrt(X) / sqrt(p0) = 1 + q1 s + q2 s^2 + ...` up to `q_(len-1)`.
pub fn q_coeffs(x: &Poly, len: usize) -> Result<Vec<Scalar>> {
    let s = series_sqrt(x, len)?;
    let inv = s.coeff(0).recip();
    Ok(s.coeffs().iter().map(|c| c * &inv).collect())
}

/// `Q_X(lambda, s) = r0(s) + lambda r1(s) + lambda^2 r2(s)`, defined by
/// `Q_X s^(g+1) = X - p0 (Q_g(s) + lambda s^(g+1))^2`.
#[derive(Clone, Debug, Serialize)]
pub struct QxPoly {
    pub genus: usize,
    pub p0: Scalar,
    pub r0: Poly,
    pub r1: Poly,
    pub r2: Poly,
    #[serde(skip)]
    pub q: Vec<Scalar>,
}

pub fn qx_build(x: &Poly) -> Result<QxPoly> {
    let g = genus_of(x)?;
    let prec = x.prec();
    let q = q_coeffs(x, 2 * g + 4)?;
    let p0 = x.coeff(0);
    let qg = Poly::new(q[..=g].to_vec(), prec);
    let (r0, low) = x.sub(&qg.mul(&qg).scale(&p0)).shift_down(g + 1);
    let dropped = low.iter().map(Scalar::abs).fold(0.0, f64::max);
    if dropped > x.precision().tau() * x.norm() {
        return Err(Error::PrecisionLoss(format!("X - p0 Q_g^2 has low part {dropped:.3e}")));
    }
    let r0 = r0.with_len(g + 2);
    let r1 = qg.scale(&p0.mul_i64(-2)).with_len(g + 2);
    let r2 = Poly::monomial(-&p0, g + 1);
    Ok(QxPoly { genus: g, p0, r0, r1, r2, q })
}

impl QxPoly {
    pub fn prec(&self) -> u32 {
        self.p0.prec()
    }

    /// Coefficient of `s^k lambda^l`.
    pub fn coefficient(&self, k: usize, l: usize) -> Scalar {
        match l {
            0 => self.r0.coeff(k),
            1 => self.r1.coeff(k),
            2 => self.r2.coeff(k),
            _ => Scalar::zero(self.prec()),
        }
    }

    pub fn norm(&self) -> f64 {
        self.r0.norm().max(self.r1.norm()).max(self.r2.norm())
    }

    /// `Q_g(t) = 1 + q1 t + ... + q_g t^g`.
    pub fn q_g(&self) -> Poly {
        Poly::new(self.q[..=self.genus].to_vec(), self.prec())
    }

    pub fn eval(&self, lambda: &Scalar, s: &Scalar) -> Scalar {
        let (a, b, c) = self.in_lambda(s);
        &(&(&a * lambda) + &b) * lambda + &c
    }

    /// Residual of `Q_X(lambda, s)` relative to the size of its terms.
    pub fn relative_value(&self, lambda: &Scalar, s: &Scalar) -> f64 {
        let v = self.eval(lambda, s).abs();
        let l = lambda.abs().max(1.0);
        let m = s.abs().max(1.0).powi(self.genus as i32 + 1);
        v / (self.norm() * l * l * m)
    }

    /// Polynomial in `s` at fixed `lambda`.
    pub fn in_s(&self, lambda: &Scalar) -> Poly {
        self.r0.add(&self.r1.scale(lambda)).add(&self.r2.scale(&lambda.square()))
    }

    /// `(a, b, c)` with `Q_X = a lambda^2 + b lambda + c` at fixed `s`.
    pub fn in_lambda(&self, s: &Scalar) -> (Scalar, Scalar, Scalar) {
        (self.r2.eval(s), self.r1.eval(s), self.r0.eval(s))
    }

    /// Residual of the construction identity at a few values of `lambda`.
    pub fn construction_residual(&self, x: &Poly) -> f64 {
        let prec = self.prec();
        let g = self.genus;
        let qg = self.q_g();
        [Scalar::zero(prec), Scalar::one(prec), Scalar::from_f64(prec, -0.3, 0.7)]
            .iter()
            .map(|l| {
                let inner = qg.add(&Poly::monomial(l.clone(), g + 1));
                let rhs = x.sub(&inner.mul(&inner).scale(&self.p0));
                let lhs = self.in_s(l).shift_up(g + 1);
                lhs.max_abs_diff(&rhs) / x.norm().max(rhs.norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Roots in `s` of `Q_X(lambda, s)`: the current `t` and the `g` next candidates.
pub fn t_roots_at(qx: &QxPoly, lambda: &Scalar) -> Result<Vec<Scalar>> {
    let p = qx.in_s(lambda);
    let lead = p.coeff(qx.genus + 1);
    let scale = qx.norm() * lambda.abs().max(1.0).powi(2);
    if lead.is_negligible(qx.p0.precision().tau(), scale) {
        return Err(Error::LeadingVanishes);
    }
    poly_roots(&p)
}

/// `lambda` attached to the branch `sqrtY` at `t`: `(sqrtY/sqrt(p0) - Q_g(t)) / t^(g+1)`.
pub fn lambda_for_branch(qx: &QxPoly, t: &Scalar, sqrt_y: &Scalar) -> Result<Scalar> {
    if t.abs() < qx.p0.precision().match_tol() {
        return Err(Error::QuadraticDegenerate);
    }
    let num = &(sqrt_y / &qx.p0.sqrt()) - &qx.q_g().eval(t);
    Ok(&num / &t.powi(qx.genus as u32 + 1))
}

/// Both roots of `Q_X(., t)`, for the principal branch and its negative.
pub fn lambda_pair_at(qx: &QxPoly, x: &Poly, t: &Scalar) -> Result<(Scalar, Scalar)> {
    let (a, _, _) = qx.in_lambda(t);
    if a.is_negligible(qx.p0.precision().match_tol(), qx.norm()) {
        return Err(Error::QuadraticDegenerate);
    }
    let sy = x.eval(t).sqrt();
    Ok((lambda_for_branch(qx, t, &sy)?, lambda_for_branch(qx, t, &-&sy)?))
}

/// `Q_X` in the explicit genus-1 and genus-2 forms, for comparison.
pub fn qx_printed(x: &Poly) -> Result<QxPoly> {
    let built = qx_build(x)?;
    let g = built.genus;
    let prec = x.prec();
    let p = |k: usize| x.coeff(k);
    let q = &built.q;
    let p0 = p(0);
    let z = || Scalar::zero(prec);
    let (r0, r1, r2) = match g {
        1 => (
            // (p4 - p0 l^2) s^2 + (p3 - p1 l) s + 2 p0 (q2 - l)
            Poly::new(vec![&p0.mul_i64(2) * &q[2], p(3), p(4)], prec),
            Poly::new(vec![p0.mul_i64(-2), -p(1), z()], prec),
            Poly::new(vec![z(), z(), -&p0], prec),
        ),
        2 => (
            Poly::new(
                vec![&p(3) - &(&p0.mul_i64(2) * &(&q[1] * &q[2])), &p(4) - &(&q[2].square() * &p0), p(5), p(6)],
                prec,
            ),
            Poly::new(vec![p0.mul_i64(-2), &p0.mul_i64(-2) * &q[1], &p0.mul_i64(-2) * &q[2], z()], prec),
            Poly::new(vec![z(), z(), z(), -&p0], prec),
        ),
        _ => return Err(Error::InvalidInput("printed forms exist for genus 1 and 2 only".into())),
    };
    Ok(QxPoly { genus: g, p0, r0, r1, r2, q: built.q })
}

/// Largest coefficientwise difference between two `Q_X`, relative to the first.
pub fn qx_distance(a: &QxPoly, b: &QxPoly) -> f64 {
    let d = a.r0.max_abs_diff(&b.r0).max(a.r1.max_abs_diff(&b.r1)).max(a.r2.max_abs_diff(&b.r2));
    d / a.norm()
}

/// `p -> q` conversion formulas as printed (genus 1 and 2), together with the
/// corrected forms found by comparing against the series square root.
pub fn q_table(x: &Poly, corrected: bool) -> Result<Vec<Scalar>> {
    let g = genus_of(x)?;
    let prec = x.prec();
    let p = |k: usize| x.coeff(k);
    let p0 = p(0);
    let int = |v: i64| Scalar::from_i64(prec, v);
    let q1 = &p(1) / &p0.mul_i64(2);
    match g {
        1 => {
            let q2 = &(&(&p0 * &p(2)).mul_i64(4) - &p(1).square()) / &p0.square().mul_i64(8);
            let lead = if corrected { p0.square() } else { p0.clone() };
            let inner = &(&(&lead * &p(3)).mul_i64(2) - &(&(&p0 * &p(1)) * &p(2))) + &p(1).powi(3).div_i64(4);
            let q3 = &inner / &p0.powi(3).mul_i64(4);
            let q4 = &(&(&p(4) - &(&(&q1 * &q3) * &p0).mul_i64(2)) - &(&q2.square() * &p0)) / &p0.mul_i64(2);
            Ok(vec![int(1), q1, q2, q3, q4])
        }
        2 => {
            let q2 = &(&(&p(2) * &p0) - &p(1).square().div_i64(4)) / &p0.square().mul_i64(2);
            let q3 = &(&(&(&p(3) * &p0.square()) - &(&(&p(1) * &p(2)) * &p0).div_i64(2)) + &p(1).powi(3).div_i64(8))
                / &p0.powi(3).mul_i64(2);
            let t2 = &(&p(2) * &p0).mul_i64(4) - &p(1).square();
            let middle = if corrected { t2.square().div_i64(64) } else { t2.div_i64(8) };
            let tail = &(&(&(&p(3) * &p0.square()).mul_i64(8) - &(&(&p(1) * &p(2)) * &p0).mul_i64(4)) + &p(1).powi(3)) * &p(1).div_i64(16);
            let q4 = &(&(&(&p(4) * &p0.powi(3)) - &middle) - &tail) / &p0.powi(4).mul_i64(2);
            let q5 = &(&(&p(5) / &p0.mul_i64(2)) - &(&q2 * &q3)) - &(&q1 * &q4);
            let q6 = &(&(&(&p(6) - &(&(&q1 * &q5) * &p0).mul_i64(2)) - &(&(&q2 * &q4) * &p0).mul_i64(2)) - &(&q3.square() * &p0))
                / &p0.mul_i64(2);
            Ok(vec![int(1), q1, q2, q3, q4, q5, q6])
        }
        _ => Err(Error::InvalidInput("printed tables exist for genus 1 and 2 only".into())),
    }
}

/// Sign convention used when comparing against printed relations.
///
/// `Direct` uses the normal-form parameters as computed here. `Printed`
/// flips `u` (genus 1) or `v` (genus 2), which is the convention under
/// which the printed recurrences were written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Direct,
    Printed,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalStep {
    pub index: usize,
    pub t: Scalar,
    pub lambda: Scalar,
    pub u: Scalar,
    pub w: Option<Scalar>,
    pub v: Scalar,
    /// Second root carried by `beta_i` (genus 2).
    pub spare: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationSummary {
    pub name: &'static str,
    pub evaluated: usize,
    pub direct: f64,
    pub printed: f64,
}

impl RelationSummary {
    pub fn holds(&self, tol: f64) -> Option<Convention> {
        if self.evaluated == 0 {
            None
        } else if self.direct <= tol {
            Some(Convention::Direct)
        } else if self.printed <= tol {
            Some(Convention::Printed)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormReport {
    pub genus: usize,
    pub steps: Vec<NormalStep>,
    /// `|alpha'_i(0) - 1|`, largest over the path.
    pub normalization_residual: f64,
    /// Distance between `c_0 f` and the value of the rescaled fraction.
    pub equivalence_residual: f64,
    pub relations: Vec<RelationSummary>,
    /// Steps where `v_i = v_(i+1)` and the genus-2 product relation does not apply.
    pub v_equal_steps: Vec<usize>,
}

impl NormalFormReport {
    pub fn relation(&self, name: &str) -> Option<&RelationSummary> {
        self.relations.iter().find(|r| r.name == name)
    }
}

struct Ctx {
    p: Vec<Scalar>,
    q: Vec<Scalar>,
    sqrt_p0: Scalar,
    t: Vec<Scalar>,
    lam: Vec<Scalar>,
    sy: Vec<Scalar>,
    spare: Vec<Option<Scalar>>,
    n: usize,
}

#[derive(Clone)]
struct Vals {
    u: Vec<Option<Scalar>>,
    w: Vec<Option<Scalar>>,
    v: Vec<Option<Scalar>>,
}

fn gap(lhs: &Scalar, rhs: &Scalar) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

type Relation = (&'static str, Box<dyn Fn(&Ctx, &Vals, usize) -> Option<(Scalar, Scalar)>>);

fn summarize(ctx: &Ctx, direct: &Vals, printed: &Vals, rels: Vec<Relation>) -> Vec<RelationSummary> {
    rels.into_iter()
        .map(|(name, f)| {
            let mut s = RelationSummary { name, evaluated: 0, direct: 0.0, printed: 0.0 };
            for i in 0..=ctx.n {
                if let (Some((a, b)), Some((c, d))) = (f(ctx, direct, i), f(ctx, printed, i)) {
                    s.evaluated += 1;
                    s.direct = s.direct.max(gap(&a, &b));
                    s.printed = s.printed.max(gap(&c, &d));
                }
            }
            s
        })
        .collect()
}

fn get(v: &[Option<Scalar>], i: usize) -> Option<Scalar> {
    v.get(i).cloned().flatten()
}

fn build_ctx(x: &Poly, path: &[&CfState], genus: usize) -> Result<Ctx> {
    if path.len() < 2 {
        return Err(Error::InvalidInput("normal form needs at least one step".into()));
    }
    for st in path {
        if !st.is_regular() || st.t.is_none() {
            return Err(Error::IrregularStep(st.index));
        }
    }
    let q = q_coeffs(x, 2 * genus + 5)?;
    let p: Vec<Scalar> = (0..=2 * genus + 2).map(|k| x.coeff(k)).collect();
    let spare = path
        .iter()
        .map(|st| {
            st.beta.as_ref().filter(|_| genus == 2).map(|b| -&(&b.coeff(3) / &b.coeff(4)))
        })
        .collect();
    Ok(Ctx {
        sqrt_p0: p[0].sqrt(),
        p,
        q,
        t: path.iter().map(|s| s.t.clone().unwrap()).collect(),
        lam: path.iter().map(|s| s.lambda.clone()).collect(),
        sy: path.iter().map(|s| s.sqrt_y.clone().unwrap()).collect(),
        spare,
        n: path.len() - 1,
    })
}

/// Rescales `alpha_i -> c_i alpha_i`, `beta_i -> c_(i-1) c_i beta_i` with `c_i = -t_i/(2 sqrt(p0))`.
fn rescale(ctx: &Ctx, path: &[&CfState]) -> (Vec<Scalar>, Vec<Poly>, Vec<Poly>) {
    let two_root = ctx.sqrt_p0.mul_i64(2);
    let c: Vec<Scalar> = ctx.t.iter().map(|t| -&(t / &two_root)).collect();
    let mut alphas = vec![Poly::zero(ctx.sqrt_p0.prec())];
    let mut betas = vec![Poly::zero(ctx.sqrt_p0.prec())];
    for i in 1..path.len() {
        alphas.push(path[i].alpha.as_ref().unwrap().scale(&c[i]));
        betas.push(path[i].beta.as_ref().unwrap().scale(&(&c[i - 1] * &c[i])));
    }
    (c, alphas, betas)
}

fn equivalence_residual(x: &Poly, genus: usize, path: &[&CfState], c: &[Scalar], alphas: &[Poly], betas: &[Poly]) -> Result<f64> {
    let order = (genus + 1) * (path.len() + 2) + 4;
    let sqrt_x = series_sqrt(x, order)?;
    let last = path.last().unwrap();
    let n = path.len() - 1;
    let mut tail = alphas[n].to_series(order).add(&last.remainder(genus, &sqrt_x)?.scale(&c[n]));
    for i in (1..n).rev() {
        tail = alphas[i].to_series(order).add(&betas[i + 1].to_series(order).div(&tail)?);
    }
    let value = path[0].c.scale(&c[0]).to_series(order).add(&betas[1].to_series(order).div(&tail)?);
    let f = crate::cfengine::evaluate_path(path, genus, &sqrt_x)?.scale(&c[0]);
    Ok(value.max_abs_diff(&f) / f.norm())
}

/// Genus-1 normal form `alpha' = 1 + u s`, `beta' = v s^2` along a regular path.
pub fn normal_form_g1(x: &Poly, path: &[&CfState]) -> Result<NormalFormReport> {
    if genus_of(x)? != 1 {
        return Err(Error::InvalidInput("genus-1 normal form needs deg X = 4".into()));
    }
    let ctx = build_ctx(x, path, 1)?;
    let (c, alphas, betas) = rescale(&ctx, path);
    let prec = x.prec();
    let one = Scalar::one(prec);
    let mut norm_res: f64 = 0.0;
    let mut direct = Vals { u: vec![None; ctx.n + 1], w: vec![None; ctx.n + 1], v: vec![None; ctx.n + 1] };
    let mut steps = vec![];
    for i in 1..=ctx.n {
        norm_res = norm_res.max((&alphas[i].coeff(0) - &one).abs());
        let u = alphas[i].coeff(1);
        let v = betas[i].coeff(2);
        direct.u[i] = Some(u.clone());
        direct.v[i] = Some(v.clone());
        steps.push(NormalStep { index: i, t: ctx.t[i].clone(), lambda: ctx.lam[i].clone(), u, w: None, v, spare: None });
    }
    let mut printed = direct.clone();
    printed.u = direct.u.iter().map(|u| u.as_ref().map(|u| -u)).collect();
    let rels: Vec<Relation> = vec![
        ("t_from_u", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            Some((c.t[i].clone(), -(&c.q[1] + &u).recip()))
        })),
        ("lambda_from_v", Box::new(|c: &Ctx, v: &Vals, i| {
            let vn = get(&v.v, i + 1)?;
            Some((c.lam[i].clone(), &c.q[2] - &vn.mul_i64(2)))
        })),
        ("rec11_sum", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, up, vi) = (get(&v.u, i)?, get(&v.u, i.checked_sub(1)?)?, get(&v.v, i)?);
            Some((&u + &up, &-&c.q[1] + &(&c.q[2] / &vi.mul_i64(2))))
        })),
        ("rec11_sum_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, up, vi) = (get(&v.u, i)?, get(&v.u, i.checked_sub(1)?)?, get(&v.v, i)?);
            Some((&u + &up, &-&c.q[1] + &(&c.q[3] / &vi.mul_i64(2))))
        })),
        ("rec11_product", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, up, vi) = (get(&v.u, i)?, get(&v.u, i.checked_sub(1)?)?, get(&v.v, i)?);
            Some((&vi + &(&u * &up), &c.q[2] + &(&c.q[4] / &vi.mul_i64(2))))
        })),
        ("rec12_sum", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
            Some((&vi + &vn, &(&c.q[2] + &(&c.q[1] * &u)) + &u.square()))
        })),
        ("rec12_product", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
            Some(((&vi * &vn).mul_i64(2), &-&c.q[4] + &(&c.q[3] * &u)))
        })),
        ("t_product", Box::new(|c: &Ctx, _v: &Vals, i| {
            let tn = c.t.get(i + 1)?;
            let l = &c.lam[i];
            let num = &(&c.p[0] * &(l - &c.q[2])).mul_i64(2);
            let den = &(&c.p[0] * &l.square()) - &c.p[4];
            Some((&c.t[i] * tn, num / &den))
        })),
        ("t_sum", Box::new(|c: &Ctx, _v: &Vals, i| {
            let tn = c.t.get(i + 1)?;
            let l = &c.lam[i];
            let num = &(&c.p[1] * l) - &c.p[3];
            let den = &c.p[4] - &(&c.p[0] * &l.square());
            Some((&c.t[i] + tn, &num / &den))
        })),
    ];
    let relations = summarize(&ctx, &direct, &printed, rels);
    let equivalence = equivalence_residual(x, 1, path, &c, &alphas, &betas)?;
    Ok(NormalFormReport {
        genus: 1,
        steps,
        normalization_residual: norm_res,
        equivalence_residual: equivalence,
        relations,
        v_equal_steps: vec![],
    })
}

/// Fixed points `v_i = v_(i+1) = v` of the genus-1 second recurrence
/// (printed convention): roots of `2v^2 = -q4 + q3 u` with `2v = q2 + q1 u + u^2`.
pub fn rec12_fixed_points(x: &Poly) -> Result<Vec<(Scalar, Scalar, f64)>> {
    let q = q_coeffs(x, 6)?;
    let prec = x.prec();
    let half = Scalar::one(prec).div_i64(2);
    // v(u) = (q2 + q1 u + u^2) / 2
    let vpoly = Poly::new(vec![q[2].clone(), q[1].clone(), Scalar::one(prec)], prec).scale(&half);
    let lhs = vpoly.mul(&vpoly).scale(&Scalar::from_i64(prec, 2));
    let rhs = Poly::new(vec![-&q[4], q[3].clone()], prec);
    let roots = poly_roots(&lhs.sub(&rhs))?;
    Ok(roots
        .into_iter()
        .map(|u| {
            let v = vpoly.eval(&u);
            let r1 = gap(&v.mul_i64(2), &(&(&q[2] + &(&q[1] * &u)) + &u.square()));
            let r2 = gap(&v.square().mul_i64(2), &(&-&q[4] + &(&q[3] * &u)));
            (u, v, r1.max(r2))
        })
        .collect())
}

fn qg2(c: &Ctx, t: &Scalar) -> Scalar {
    &(&Scalar::one(t.prec()) + &(&c.q[1] * t)) + &(&c.q[2] * &t.square())
}

fn lambda_prev(c: &Ctx, i: usize) -> Option<Scalar> {
    i.checked_sub(1).map(|k| c.lam[k].clone())
}

/// Printed normalized coefficients `(Q3, Q2, Q1, Q0)` of `Q_X(lambda, s)`.
fn printed_q(c: &Ctx, l: &Scalar, corrected: bool) -> [Scalar; 4] {
    let q = &c.q;
    let top = if corrected { l.square() } else { l.clone() };
    let q3 = &(&(&(&q[6] + &(&q[1] * &q[5])) + &(&q[4] * &q[2])) + &q[3].square().div_i64(2)) - &top.div_i64(2);
    let q2 = &(&q[5] + &(&q[1] * &q[4])) + &(&q[2] * &(&q[3] - l));
    let q1 = &q[4] + &(&q[1] * &(&q[3] - l));
    let q0 = &q[3] - l;
    [q3, q2, q1, q0]
}

fn g2_relations() -> Vec<Relation> {
    vec![
        ("alpha_printed", Box::new(|c: &Ctx, _v: &Vals, i| {
            // linear coefficient of alpha_i / sqrt(p0)
            let lp = lambda_prev(c, i)?;
            let t = &c.t[i];
            let actual = &c.q[2].mul_i64(2) + &(&(&lp + &c.lam[i]) * t);
            Some((actual, &c.q[2].mul_i64(2) + &(&lp * t)))
        })),
        ("u_from_t", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            Some((u, &qg2(c, &c.t[i]) / &c.t[i].square()))
        })),
        ("w_from_lambda", Box::new(|c: &Ctx, v: &Vals, i| {
            let (w, lp) = (get(&v.w, i)?, lambda_prev(c, i)?);
            let t = &c.t[i];
            Some((w, -(&(&c.q[2] * t) + &(&lp * &t.square()).div_i64(2))))
        })),
        ("v_from_lambda", Box::new(|c: &Ctx, v: &Vals, i| {
            let (vi, lp) = (get(&v.v, i)?, lambda_prev(c, i)?);
            Some((vi, &-&lp.div_i64(2) + &c.q[3]))
        })),
        ("lambda_from_v", Box::new(|c: &Ctx, v: &Vals, i| {
            let (vi, lp) = (get(&v.v, i)?, lambda_prev(c, i)?);
            Some((lp, &-&vi.mul_i64(2) + &c.q[3]))
        })),
        ("u_t_relation", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            let t = &c.t[i];
            let lhs = &(&(&(&c.q[2] - &u) * &t.square()) + &(&c.q[1] * t)) + &Scalar::one(t.prec());
            Some((lhs, Scalar::zero(t.prec())))
        })),
        ("w_t_relation", Box::new(|c: &Ctx, v: &Vals, i| {
            let (w, lp) = (get(&v.w, i)?, lambda_prev(c, i)?);
            let t = &c.t[i];
            let lhs = &(&(&lp * &t.square()).div_i64(2) + &(&c.q[2] * t)) + &w;
            Some((lhs, Scalar::zero(t.prec())))
        })),
        ("t_from_uwv", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, w, vi) = (get(&v.u, i)?, get(&v.w, i)?, get(&v.v, i)?);
            let h3 = c.q[3].div_i64(2);
            let num = &(&(&u - &c.q[2]) * &w) + &(&vi - &h3);
            let den = &(&c.q[2] * &(&c.q[2] - &u)) - &(&c.q[1] * &(&h3 - &vi));
            Some((c.t[i].clone(), &num / &den))
        })),
        ("lambda_quadratic_prev", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, l) = (get(&v.u, i)?, lambda_prev(c, i)?);
            Some((lambda_quadratic(c, &u, &c.t[i], &l, false), Scalar::zero(u.prec())))
        })),
        ("lambda_quadratic_current", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            Some((lambda_quadratic(c, &u, &c.t[i], &c.lam[i], false), Scalar::zero(u.prec())))
        })),
        ("t_from_lambda_prev", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, l) = (get(&v.u, i)?, lambda_prev(c, i)?);
            Some((c.t[i].clone(), t_from_lambda(c, &u, &l, false)))
        })),
        ("t_from_lambda_current", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            Some((c.t[i].clone(), t_from_lambda(c, &u, &c.lam[i], false)))
        })),
        ("uv_relation", Box::new(|c: &Ctx, v: &Vals, i| uv_relation(c, v, i, false))),
        ("uv_relation_corrected", Box::new(|c: &Ctx, v: &Vals, i| uv_relation(c, v, i, true))),
        ("uv_consequence", Box::new(|c: &Ctx, v: &Vals, i| uv_consequence(c, v, i, false))),
        ("uv_consequence_corrected", Box::new(|c: &Ctx, v: &Vals, i| uv_consequence(c, v, i, true))),
        ("recurrence_sum", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
            Some((&vi + &vn, &(&u / &c.t[i]) + &c.q[3]))
        })),
        ("recurrence_product", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
            let q = &c.q;
            let rhs = &(&(&(&q[6] + &(&q[1] * &q[5])) + &(&q[4] * &u)).mul_i64(-2) + &q[3].square())
                - &(&q[5] / &c.t[i]).mul_i64(2);
            Some(((&vi * &vn).mul_i64(4), rhs))
        })),
        ("u_pair_sum", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, un) = (get(&v.u, i)?, get(&v.u, i + 1)?);
            let q = &c.q;
            let (t, tn, l) = (&c.t[i], &c.t[i + 1], &c.lam[i]);
            let ts = t + tn;
            let k = &(&(&l.square().div_i64(2) - &q[6]) - &(&q[5] * &q[1])) - &(&q[4] * &q[2]);
            let rhs = &(&(&(&ts * &k) - &(&(&q[4] * &ts) / &(t * tn))) - &q[5].mul_i64(2)) - &(&q[1] * &q[4]).mul_i64(2);
            Some((&(&u + &un) * &(&q[3] - l), rhs))
        })),
        ("u_sum", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, un, vn) = (get(&v.u, i)?, get(&v.u, i + 1)?, get(&v.v, i + 1)?);
            let spare = c.spare.get(i + 1).cloned().flatten()?;
            let q = &c.q;
            let [cq3, cq2, _cq1, cq0] = printed_q(c, &c.lam[i], false);
            let r = &(&cq2 / &cq3) - &spare;
            let k = &(&(&(&(&q[3] - &vn.mul_i64(2)).square().div_i64(2) - &q[6]) - &(&q[5] * &q[1])) - &(&q[4] * &q[2]));
            let inner = &(&(&(&r * k) - &(&(&(&q[4] * &r) * &(&cq3 / &cq0)) * &spare)) - &q[5].mul_i64(2))
                - &(&q[1] * &q[4]).mul_i64(2);
            Some((&u + &un, &vn.div_i64(2) * &inner))
        })),
        ("qx_normalized", Box::new(|c: &Ctx, _v: &Vals, i| {
            // printed Q3..Q0 against Q_X(lambda_i, .)/(2 p0), largest coefficient gap
            let l = &c.lam[i];
            let printed = printed_q(c, l, false);
            let q = &c.q;
            let two_p0 = c.p[0].mul_i64(2);
            let actual = [
                &(&c.p[6] - &(&c.p[0] * &l.square())) / &two_p0,
                &(&c.p[5] - &(&two_p0 * &(&q[2] * l))) / &two_p0,
                &(&(&c.p[4] - &(&two_p0 * &(&q[1] * l))) - &(&q[2].square() * &c.p[0])) / &two_p0,
                &(&(&c.p[3] - &(&two_p0 * l)) - &(&two_p0 * &(&q[1] * &q[2]))) / &two_p0,
            ];
            let (k, _) = (0..4)
                .map(|k| (k, gap(&actual[k], &printed[k])))
                .fold((0, -1.0), |b, cur| if cur.1 > b.1 { cur } else { b });
            Some((actual[k].clone(), printed[k].clone()))
        })),
        ("vieta_sum", Box::new(|c: &Ctx, _v: &Vals, i| {
            let lp = lambda_prev(c, i)?;
            let t = &c.t[i];
            Some((&lp + &c.lam[i], &qg2(c, t).mul_i64(-2) / &t.powi(3)))
        })),
        ("vieta_product", Box::new(|c: &Ctx, _v: &Vals, i| {
            let lp = lambda_prev(c, i)?;
            let t = &c.t[i];
            let y = c.sy[i].square();
            Some((&lp * &c.lam[i], -(&(&qg2(c, t).square() - &(&y / &c.p[0])) / &t.powi(6))))
        })),
        ("t_product", Box::new(|c: &Ctx, _v: &Vals, i| {
            let tn = c.t.get(i + 1)?;
            let spare = c.spare.get(i + 1).cloned().flatten()?;
            let l = &c.lam[i];
            let two_p0 = c.p[0].mul_i64(2);
            let num = &(&c.p[3] - &(&two_p0 * l)) - &(&two_p0 * &(&c.q[1] * &c.q[2]));
            let den = &spare * &(&c.p[6] - &(&c.p[0] * &l.square()));
            Some((&c.t[i] * tn, &num / &den))
        })),
        ("t_y_relation", Box::new(|c: &Ctx, _v: &Vals, i| {
            let tn = c.t.get(i + 1)?;
            let syn = c.sy.get(i + 1)?;
            let t = &c.t[i];
            let lhs = &(&t.powi(3) * syn) + &(&tn.powi(3) * &c.sy[i]);
            let tt = t * tn;
            let br = &(&(&(tn.square()) + &tt) + &(&(&c.q[1] * &tt) * &(tn + t))) + &(&c.q[2] * &tt.square());
            Some((lhs, &(&c.sqrt_p0 * &(tn - t)) * &br))
        })),
        ("w_from_lambda_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (w, lp) = (get(&v.w, i)?, lambda_prev(c, i)?);
            let t = &c.t[i];
            Some((w, -(&(&c.q[2] * t) + &(&(&lp + &c.lam[i]) * &t.square()).div_i64(2))))
        })),
        ("v_from_lambda_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (vi, lp) = (get(&v.v, i)?, lambda_prev(c, i)?);
            Some((vi, (&c.q[3] - &lp).div_i64(2)))
        })),
        ("t_from_uw_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, w) = (get(&v.u, i)?, get(&v.w, i)?);
            Some((c.t[i].clone(), &w / &(&u - &c.q[2])))
        })),
        ("lambda_quadratic_prev_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, l) = (get(&v.u, i)?, lambda_prev(c, i)?);
            Some((lambda_quadratic(c, &u, &c.t[i], &l, true), Scalar::zero(u.prec())))
        })),
        ("lambda_quadratic_current_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            Some((lambda_quadratic(c, &u, &c.t[i], &c.lam[i], true), Scalar::zero(u.prec())))
        })),
        ("t_from_lambda_prev_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, l) = (get(&v.u, i)?, lambda_prev(c, i)?);
            Some((c.t[i].clone(), t_from_lambda(c, &u, &l, true)))
        })),
        ("t_from_lambda_current_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let u = get(&v.u, i)?;
            Some((c.t[i].clone(), t_from_lambda(c, &u, &c.lam[i], true)))
        })),
        ("recurrence_product_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
            let q = &c.q;
            let rhs = &(&(&q[6] + &(&q[1] * &q[5])) + &(&q[4] * &u)).mul_i64(-2) - &(&q[5] / &c.t[i]).mul_i64(2);
            Some(((&vi * &vn).mul_i64(4), rhs))
        })),
        ("u_pair_sum_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            let (u, un) = (get(&v.u, i)?, get(&v.u, i + 1)?);
            let q = &c.q;
            let (t, tn, l) = (&c.t[i], &c.t[i + 1], &c.lam[i]);
            let ts = t + tn;
            let k = &(&(&(&l.square().div_i64(2) - &q[6]) - &(&q[5] * &q[1])) - &(&q[4] * &q[2])) - &q[3].square().div_i64(2);
            let rhs = &(&(&(&ts * &k) - &(&(&q[4] * &ts) / &(t * tn))) - &q[5].mul_i64(2)) - &(&q[1] * &q[4]).mul_i64(2);
            Some((&(&u + &un) * &(&q[3] - l), rhs))
        })),
        ("u_sum_corrected", Box::new(|c: &Ctx, v: &Vals, i| {
            // Viete: t_i + t_(i+1) = -Q2/Q3 - t^1, t_i t_(i+1) = -Q0/(Q3 t^1), and Q0 = 2 v_(i+1)
            let (u, un, vn) = (get(&v.u, i)?, get(&v.u, i + 1)?, get(&v.v, i + 1)?);
            let spare = c.spare.get(i + 1).cloned().flatten()?;
            let q = &c.q;
            let l = &c.lam[i];
            let [cq3, cq2, _cq1, cq0] = printed_q(c, l, true);
            let sum = &-&(&cq2 / &cq3) - &spare;
            let k = &(&(&(&l.square().div_i64(2) - &q[6]) - &(&q[5] * &q[1])) - &(&q[4] * &q[2])) - &q[3].square().div_i64(2);
            let inner = &(&(&(&sum * &k) + &(&(&(&q[4] * &sum) * &(&cq3 / &cq0)) * &spare)) - &q[5].mul_i64(2))
                - &(&q[1] * &q[4]).mul_i64(2);
            Some((&u + &un, &inner / &vn.mul_i64(2)))
        })),
        ("qx_normalized_corrected", Box::new(|c: &Ctx, _v: &Vals, i| {
            let l = &c.lam[i];
            let printed = printed_q(c, l, true);
            let prec = l.prec();
            let qx = Poly::new(printed.iter().rev().cloned().collect(), prec);
            // every root of the printed cubic must be a root of Q_X(lambda_i, .)
            Some((qx.eval(&c.t[i]), Scalar::zero(prec)))
        })),
        ("vieta_product_corrected", Box::new(|c: &Ctx, _v: &Vals, i| {
            let lp = lambda_prev(c, i)?;
            let t = &c.t[i];
            let y = c.sy[i].square();
            Some((&lp * &c.lam[i], &(&qg2(c, t).square() - &(&y / &c.p[0])) / &t.powi(6)))
        })),
        ("t_product_corrected", Box::new(|c: &Ctx, _v: &Vals, i| {
            let tn = c.t.get(i + 1)?;
            let spare = c.spare.get(i + 1).cloned().flatten()?;
            let l = &c.lam[i];
            let two_p0 = c.p[0].mul_i64(2);
            let num = &(&c.p[3] - &(&two_p0 * l)) - &(&two_p0 * &(&c.q[1] * &c.q[2]));
            let den = &spare * &(&c.p[6] - &(&c.p[0] * &l.square()));
            Some((&c.t[i] * tn, -(&num / &den)))
        })),
        ("t_y_relation_corrected", Box::new(|c: &Ctx, _v: &Vals, i| {
            let tn = c.t.get(i + 1)?;
            let syn = c.sy.get(i + 1)?;
            let t = &c.t[i];
            let lhs = &(&t.powi(3) * syn) + &(&tn.powi(3) * &c.sy[i]);
            let tt = t * tn;
            let br = &(&(&(&(tn.square()) + &tt) + &t.square()) + &(&(&c.q[1] * &tt) * &(tn + t))) + &(&c.q[2] * &tt.square());
            Some((lhs, &(&c.sqrt_p0 * &(tn - t)) * &br))
        })),
    ]
}

fn uv_k(c: &Ctx, u: &Scalar, corrected: bool) -> Scalar {
    let q = &c.q;
    let mut k = &(&q[6] + &(&q[5] * &q[1])) + &(&q[4] * u);
    if corrected {
        k += &q[3].square().div_i64(2);
    }
    k
}

fn uv_relation(c: &Ctx, v: &Vals, i: usize, corrected: bool) -> Option<(Scalar, Scalar)> {
    let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
    let q = &c.q;
    let k = uv_k(c, &u, corrected);
    let a = (&(&(&u * &vn).mul_i64(2) + &q[5]) * &(&q[3] - &vi.mul_i64(2)).square()).div_i64(-2);
    let b = &(&u * &k).mul_i64(2) * &(&vn - &vi);
    let d = (&(&(&u * &vi).mul_i64(2) + &q[5]) * &(&q[3] - &vn.mul_i64(2)).square()).div_i64(2);
    Some((&(&a + &b) + &d, Scalar::zero(u.prec())))
}

fn uv_consequence(c: &Ctx, v: &Vals, i: usize, corrected: bool) -> Option<(Scalar, Scalar)> {
    let (u, vi, vn) = (get(&v.u, i)?, get(&v.v, i)?, get(&v.v, i + 1)?);
    if vi.approx_eq(&vn, vi.precision().match_tol()) {
        return None;
    }
    let q = &c.q;
    let k = uv_k(c, &u, corrected);
    let e = &(&(&(&(&q[3].square() * &u) - &(&(&u * &vi) * &vn).mul_i64(4)) - &(&q[5] * &(&vi + &vn)).mul_i64(2))
        + &(&q[5] * &q[3]).mul_i64(2))
        - &(&u * &k).mul_i64(2);
    Some((e, Scalar::zero(u.prec())))
}

fn lambda_quadratic(c: &Ctx, u: &Scalar, t: &Scalar, l: &Scalar, corrected: bool) -> Scalar {
    let q = &c.q;
    let mut k = &(&(&(&q[6] * t) + &(&q[5] * &(&(&q[1] * t) + &Scalar::one(t.prec())))) + &(&q[3] * u)) + &(&(&q[4] * u) * t);
    if corrected {
        k += &(&q[3].square() * t).div_i64(2);
    }
    &(&(&l.square() * &t.div_i64(-2)) - &(u * l)) + &k
}

fn t_from_lambda(c: &Ctx, u: &Scalar, l: &Scalar, corrected: bool) -> Scalar {
    let q = &c.q;
    let num = &(u * &(l - &q[3])) - &q[5];
    let mut den = &(&(&-&l.square().div_i64(2) + &q[6]) + &(&q[5] * &q[1])) + &(&q[4] * u);
    if corrected {
        den += &q[3].square().div_i64(2);
    }
    &num / &den
}

/// Genus-2 normal form `alpha' = 1 + w s + u s^2`, `beta' = v (s - t^1)/t^1 s^3`.
pub fn normal_form_g2(x: &Poly, path: &[&CfState]) -> Result<NormalFormReport> {
    if genus_of(x)? != 2 {
        return Err(Error::InvalidInput("genus-2 normal form needs deg X = 6".into()));
    }
    let ctx = build_ctx(x, path, 2)?;
    let (c, alphas, betas) = rescale(&ctx, path);
    let prec = x.prec();
    let one = Scalar::one(prec);
    let mut norm_res: f64 = 0.0;
    let mut direct = Vals { u: vec![None; ctx.n + 1], w: vec![None; ctx.n + 1], v: vec![None; ctx.n + 1] };
    let mut steps = vec![];
    for i in 1..=ctx.n {
        norm_res = norm_res.max((&alphas[i].coeff(0) - &one).abs());
        let w = alphas[i].coeff(1);
        let u = alphas[i].coeff(2);
        let v = -betas[i].coeff(3);
        direct.u[i] = Some(u.clone());
        direct.w[i] = Some(w.clone());
        direct.v[i] = Some(v.clone());
        steps.push(NormalStep {
            index: i,
            t: ctx.t[i].clone(),
            lambda: ctx.lam[i].clone(),
            u,
            w: Some(w),
            v,
            spare: ctx.spare[i].clone(),
        });
    }
    let mut printed = direct.clone();
    printed.v = direct.v.iter().map(|v| v.as_ref().map(|v| -v)).collect();
    let tol = Scalar::one(prec).precision().match_tol();
    let v_equal_steps = (1..ctx.n)
        .filter(|&i| match (get(&direct.v, i), get(&direct.v, i + 1)) {
            (Some(a), Some(b)) => a.approx_eq(&b, tol),
            _ => false,
        })
        .collect();
    let relations = summarize(&ctx, &direct, &printed, g2_relations());
    let equivalence = equivalence_residual(x, 2, path, &c, &alphas, &betas)?;
    Ok(NormalFormReport {
        genus: 2,
        steps,
        normalization_residual: norm_res,
        equivalence_residual: equivalence,
        relations,
        v_equal_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Precision;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn qx_of_simple_curves() {
        let qx = qx_build(&Poly::from_i64s(256, &[1, 0, 0, 0, 1])).unwrap();
        // (1 - l^2) s^2 - 2 l
        assert!(qx.r0.max_abs_diff(&Poly::from_i64s(256, &[0, 0, 1])) < 1e-70);
        assert!(qx.r1.max_abs_diff(&Poly::from_i64s(256, &[-2, 0, 0])) < 1e-70);
        assert!(qx.r2.max_abs_diff(&Poly::from_i64s(256, &[0, 0, -1])) < 1e-70);
        let qx6 = qx_build(&Poly::from_i64s(256, &[1, 0, 0, 0, 0, 0, 1])).unwrap();
        assert!(qx6.r0.max_abs_diff(&Poly::from_i64s(256, &[0, 0, 0, 1])) < 1e-70);
        assert!(qx6.coefficient(3, 2).approx_eq(&p().int(-1), 1e-70));
    }

    #[test]
    fn t_roots_examples() {
        let r2 = p().int(2).sqrt();
        let l = &r2 - p().int(1);
        let qx = qx_build(&Poly::from_i64s(256, &[1, 0, 0, 0, 1])).unwrap();
        let roots = t_roots_at(&qx, &l).unwrap();
        assert!(roots[0].approx_eq(&p().int(1), 1e-70) && roots[1].approx_eq(&p().int(-1), 1e-70));
        let qx6 = qx_build(&Poly::from_i64s(256, &[1, 0, 0, 0, 0, 0, 1])).unwrap();
        let roots = t_roots_at(&qx6, &l).unwrap();
        assert!(roots.iter().any(|r| r.approx_eq(&p().int(1), 1e-70)));
        assert!(roots.iter().any(|r| r.approx_eq(&Scalar::root_of_unity(256, 1, 3), 1e-70)));
        assert!(matches!(t_roots_at(&qx, &p().int(1)), Err(Error::LeadingVanishes)));
    }

    #[test]
    fn lambda_pairs() {
        let r2 = p().int(2).sqrt();
        let x = Poly::from_i64s(256, &[1, 0, 0, 0, 1]);
        let (a, b) = lambda_pair_at(&qx_build(&x).unwrap(), &x, &p().int(1)).unwrap();
        assert!(a.approx_eq(&(&r2 - p().int(1)), 1e-70));
        assert!(b.approx_eq(&(-&r2 - p().int(1)), 1e-70));
        let y = Poly::from_i64s(256, &[1, 0, 0, 0, -1]);
        let (a, b) = lambda_pair_at(&qx_build(&y).unwrap(), &y, &p().int(1)).unwrap();
        assert!(a.approx_eq(&p().int(-1), 1e-70) && b.approx_eq(&p().int(-1), 1e-70));
        assert!(matches!(lambda_pair_at(&qx_build(&x).unwrap(), &x, &p().zero()), Err(Error::QuadraticDegenerate)));
    }

    #[test]
    fn fixed_points_of_second_recurrence() {
        let x = Poly::new(vec![p().int(1), p().complex(0.2, 0.1), p().real(-0.7), p().complex(0.4, 0.3), p().real(0.9)], 256);
        let pts = rec12_fixed_points(&x).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|(_, _, r)| *r < 1e-60));
    }
}
