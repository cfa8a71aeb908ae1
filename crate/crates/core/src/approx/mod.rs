//! Continuants of an expansion path and the degree and order statements about them.

mod report;

use std::fmt;

use serde::Serialize;

use crate::arith::{series_sqrt, Poly, Scalar, Series};
use crate::cfengine::{root_function, CfState, StepKind};
use crate::error::{Error, Result};

pub use report::{approximation_report, best_choice_scan, ApproxReport, Candidate, Check, Ranked, Ranking};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[serde(rename = "generic_y")]
    GenericY,
    SqrtCase,
    YInfinity,
}

impl Mode {
    pub fn numerator_degree(self, genus: usize, rank: usize) -> usize {
        match self {
            Mode::SqrtCase => genus * (rank + 1) + 1,
            _ => genus * (rank + 1),
        }
    }

    pub fn denominator_degree(self, genus: usize, rank: usize) -> usize {
        genus * rank
    }

    /// Extra vanishing order of the sqrt case.
    pub fn bonus(self) -> usize {
        usize::from(self == Mode::SqrtCase)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::GenericY => "generic_y",
            Mode::SqrtCase => "sqrt_case",
            Mode::YInfinity => "y_infinity",
        })
    }
}

/// Numerator and denominator of the convergent of rank `rank`.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuantPair {
    pub rank: usize,
    pub numerator: Poly,
    pub denominator: Poly,
}

/// Pairs for ranks `0..=steps.len()` from the recurrence with `(1, 0)` at rank -1.
pub fn continuants(head: &Poly, steps: &[(Poly, Poly)]) -> Vec<ContinuantPair> {
    let prec = head.prec();
    let mut prev = (Poly::constant(Scalar::one(prec)), Poly::zero(prec));
    let mut cur = (head.clone(), Poly::constant(Scalar::one(prec)));
    let mut out = vec![ContinuantPair { rank: 0, numerator: cur.0.clone(), denominator: cur.1.clone() }];
    for (k, (alpha, beta)) in steps.iter().enumerate() {
        let next = (alpha.mul(&cur.0).add(&beta.mul(&prev.0)), alpha.mul(&cur.1).add(&beta.mul(&prev.1)));
        prev = std::mem::replace(&mut cur, next);
        out.push(ContinuantPair { rank: k + 1, numerator: cur.0.clone(), denominator: cur.1.clone() });
    }
    out
}

/// `[[a, b], [c, d]]` with polynomial entries.
type Matrix = [[Poly; 2]; 2];

fn mat_mul(u: &Matrix, v: &Matrix) -> Matrix {
    let e = |i: usize, j: usize| u[i][0].mul(&v[0][j]).add(&u[i][1].mul(&v[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// The product `T_C T_1 ... T_m` formed directly.
pub fn matrix_product(head: &Poly, steps: &[(Poly, Poly)]) -> Matrix {
    let one = Poly::constant(Scalar::one(head.prec()));
    let zero = Poly::zero(head.prec());
    let mut acc = [[head.clone(), one.clone()], [one.clone(), zero.clone()]];
    for (alpha, beta) in steps {
        acc = mat_mul(&acc, &[[alpha.clone(), one.clone()], [beta.clone(), zero.clone()]]);
    }
    acc
}

/// Vanishing order; `exact` is false when every coefficient is below threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Order {
    pub value: usize,
    pub exact: bool,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.value)
        } else {
            write!(f, ">= {}", self.value)
        }
    }
}

/// First coefficient above `tol * scale`.
pub fn vanishing_order(coeffs: &[Scalar], tol: f64, scale: f64) -> Order {
    match coeffs.iter().position(|c| c.abs() > tol * scale) {
        Some(k) => Order { value: k, exact: true },
        None => Order { value: coeffs.len(), exact: false },
    }
}

/// Order of a polynomial relative to its own largest coefficient.
pub fn poly_order(p: &Poly) -> Order {
    vanishing_order(p.coeffs(), p.precision().tau(), p.norm())
}

/// A regular path turned into continuants, with everything needed to test them.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub mode: Mode,
    pub genus: usize,
    pub x: Poly,
    pub head: Poly,
    pub steps: Vec<(Poly, Poly)>,
    pub pairs: Vec<ContinuantPair>,
    /// Center of the first level; `None` outside the generic mode.
    pub t: Option<Scalar>,
    pub sqrt_y: Option<Scalar>,
    /// `sqrt(p_(2g+2))` in the y = infinity mode.
    pub top: Option<Scalar>,
    pub states: Vec<CfState>,
    pub sqrt_x: Series,
    /// Series the pairs approximate: `f` in the generic and infinity modes, `sqrt(X)` otherwise.
    pub target: Series,
    pub remainders: Vec<Series>,
}

impl Expansion {
    pub fn from_path(x: &Poly, genus: usize, path: &[&CfState], order: usize) -> Result<Expansion> {
        let root = *path.first().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
        if let Some(bad) = path[1..].iter().find(|st| !st.is_regular() || st.shift != 0) {
            return Err(Error::IrregularStep(bad.index));
        }
        let sqrt_x = series_sqrt(x, order)?;
        let mode = match root.kind {
            StepKind::Regular | StepKind::EpsInf => Mode::GenericY,
            StepKind::TZero => Mode::SqrtCase,
            StepKind::TInf => Mode::YInfinity,
        };
        let mut steps: Vec<(Poly, Poly)> =
            path[1..].iter().map(|st| (st.alpha.clone().expect("alpha"), st.beta.clone().expect("beta"))).collect();
        let mut remainders = path.iter().map(|st| st.remainder(genus, &sqrt_x)).collect::<Result<Vec<_>>>()?;
        let (head, target, top) = match mode {
            Mode::SqrtCase => {
                if let Some(first) = steps.first_mut() {
                    first.1 = first.1.shift_up(1);
                }
                remainders[0] = remainders[0].shift_up(1);
                (root.a.clone(), sqrt_x.clone(), None)
            }
            Mode::YInfinity => {
                let top = &root.lambda * &sqrt_x.coeff(0);
                (root.c.clone(), root_function(root, genus, &sqrt_x)?, Some(top))
            }
            Mode::GenericY => (root.c.clone(), root_function(root, genus, &sqrt_x)?, None),
        };
        let pairs = continuants(&head, &steps);
        Ok(Expansion {
            mode,
            genus,
            x: x.clone(),
            head,
            steps,
            pairs,
            t: if mode == Mode::GenericY { root.t.clone() } else { None },
            sqrt_y: if mode == Mode::GenericY { root.sqrt_y.clone() } else { None },
            top,
            states: path.iter().map(|st| (*st).clone()).collect(),
            sqrt_x,
            target,
            remainders,
        })
    }

    pub fn rank(&self) -> usize {
        self.steps.len()
    }

    fn prec(&self) -> u32 {
        self.x.prec()
    }

    /// Pair at `rank - 1`, with `(1, 0)` standing for rank -1.
    pub fn previous(&self, rank: usize) -> (Poly, Poly) {
        if rank == 0 {
            (Poly::constant(Scalar::one(self.prec())), Poly::zero(self.prec()))
        } else {
            let p = &self.pairs[rank - 1];
            (p.numerator.clone(), p.denominator.clone())
        }
    }

    /// `G_m H_(m-1) - G_(m-1) H_m`.
    pub fn determinant(&self, rank: usize) -> Poly {
        let p = &self.pairs[rank];
        let (gp, hp) = self.previous(rank);
        p.numerator.mul(&hp).sub(&gp.mul(&p.denominator))
    }

    /// `(-1)^(m-1) beta_1 ... beta_m`.
    pub fn beta_product(&self, rank: usize) -> Poly {
        let mut acc = Poly::constant(Scalar::one(self.prec()));
        for (_, beta) in &self.steps[..rank] {
            acc = acc.mul(beta);
        }
        if rank % 2 == 0 {
            acc.neg()
        } else {
            acc
        }
    }

    /// Numerators of the lifted pair, both over `s - t` in the generic mode and over 1 otherwise.
    pub fn lifted(&self, rank: usize) -> (Poly, Poly) {
        let p = &self.pairs[rank];
        let (num, den) = (&p.numerator, &p.denominator);
        match self.mode {
            Mode::GenericY => {
                let t = self.t.as_ref().expect("generic mode has t");
                let sy = self.sqrt_y.as_ref().expect("generic mode has sqrtY");
                (num.mul(&Poly::linear(t)).add(&den.scale(sy)), den.clone())
            }
            Mode::SqrtCase => (num.clone(), den.clone()),
            Mode::YInfinity => {
                let top = self.top.as_ref().expect("infinity mode has top");
                (num.add(&den.shift_up(self.genus + 1).scale(top)), den.clone())
            }
        }
    }

    /// Lifted pair at `rank - 1`.
    pub fn lifted_previous(&self, rank: usize) -> (Poly, Poly) {
        if rank == 0 {
            let one = Poly::constant(Scalar::one(self.prec()));
            match self.mode {
                Mode::GenericY => (Poly::linear(self.t.as_ref().expect("t")), Poly::zero(self.prec())),
                _ => (one, Poly::zero(self.prec())),
            }
        } else {
            self.lifted(rank - 1)
        }
    }

    /// `G_m - H_m * target` to the working order.
    pub fn error_series(&self, rank: usize) -> Series {
        let order = self.target.order();
        let p = &self.pairs[rank];
        p.numerator.to_series(order).sub(&self.target.mul_poly(&p.denominator))
    }

    /// Largest coefficient among the terms of `G_m - H_m * target`.
    pub fn error_scale(&self, rank: usize) -> f64 {
        let p = &self.pairs[rank];
        p.numerator.norm().max(self.target.mul_poly(&p.denominator).norm())
    }

    /// Predicted order of `G_m - H_m * target`.
    pub fn predicted_order(&self, rank: usize) -> usize {
        (self.genus + 1) * (rank + 1) + self.mode.bonus()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeRow {
    pub rank: usize,
    pub numerator: usize,
    pub numerator_expected: usize,
    pub denominator: usize,
    pub denominator_expected: usize,
}

impl DegreeRow {
    pub fn holds(&self) -> bool {
        self.numerator == self.numerator_expected && self.denominator == self.denominator_expected
    }
}

/// Measured degrees of every pair against the formulas of `mode`.
pub fn degree_check(pairs: &[ContinuantPair], mode: Mode, genus: usize) -> Vec<DegreeRow> {
    pairs
        .iter()
        .map(|p| DegreeRow {
            rank: p.rank,
            numerator: p.numerator.degree(),
            numerator_expected: mode.numerator_degree(genus, p.rank),
            denominator: p.denominator.degree(),
            denominator_expected: mode.denominator_degree(genus, p.rank),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminantRow {
    pub rank: usize,
    pub order: Order,
    pub order_expected: usize,
    pub degree: usize,
    /// Degree of the cofactor `delta_m` once the power of `s` is removed.
    pub cofactor_degree: usize,
    pub cofactor_expected: usize,
    pub product_residual: f64,
}

impl DeterminantRow {
    pub fn holds(&self, tol: f64) -> bool {
        self.order.exact
            && self.order.value == self.order_expected
            && self.cofactor_degree == self.cofactor_expected
            && self.product_residual < tol
    }
}

/// The determinant identity at every rank `1..=m`.
pub fn determinant_rows(exp: &Expansion) -> Vec<DeterminantRow> {
    let g = exp.genus;
    let bonus = exp.mode.bonus();
    (1..=exp.rank())
        .map(|m| {
            let det = exp.determinant(m);
            let order = poly_order(&det);
            let degree = det.degree();
            let product = exp.beta_product(m);
            DeterminantRow {
                rank: m,
                order,
                order_expected: (g + 1) * m + bonus,
                degree,
                cofactor_degree: degree.saturating_sub(order.value),
                cofactor_expected: (g - 1) * m,
                product_residual: det.max_abs_diff(&product) / product.norm().max(f64::MIN_POSITIVE),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Precision;
    use crate::bal::HalphenElement;
    use crate::cfengine::{expand_element, Policy};

    fn run(x: &[i64], t: i64, depth: usize) -> Expansion {
        let pr = Precision::default();
        let x = Poly::from_i64s(pr.bits(), x);
        let t = pr.int(t);
        let sy = x.eval(&t).sqrt();
        let h = HalphenElement::new(x.clone(), pr.zero(), t, sy).unwrap();
        let tree = expand_element(&h, depth, &Policy::First, 32).unwrap();
        let path = tree.longest_path();
        Expansion::from_path(&x, 1, &tree.states_along(&path), 32).unwrap()
    }

    #[test]
    fn orders_of_short_lists() {
        let pr = Precision::default();
        let v = |xs: &[i64]| xs.iter().map(|&k| pr.int(k)).collect::<Vec<_>>();
        assert_eq!(vanishing_order(&v(&[0, 0, 0, 1, 5]), pr.tau(), 5.0), Order { value: 3, exact: true });
        assert_eq!(vanishing_order(&v(&[1, 0]), pr.tau(), 1.0).value, 0);
        let zero = vanishing_order(&v(&[0; 10]), pr.tau(), 1.0);
        assert_eq!(zero.to_string(), ">= 10");
    }

    #[test]
    fn worked_determinant() {
        let exp = run(&[1, 0, 0, 0, 1], 1, 2);
        let det = exp.determinant(1);
        // beta_1 = (2 sqrt 2 - 2) s^2
        let expect = 2.0 * 2f64.sqrt() - 2.0;
        assert!((det.coeff(2).re_f64() - expect).abs() < 1e-12, "{:?}", det);
        let rows = determinant_rows(&exp);
        assert!(rows.iter().all(|r| r.holds(1e-40)), "{rows:?}");
        let direct = matrix_product(&exp.head, &exp.steps);
        let last = exp.pairs.last().unwrap();
        assert!(direct[0][0].max_abs_diff(&last.numerator) < 1e-60);
        assert!(direct[1][0].max_abs_diff(&last.denominator) < 1e-60);
    }

    #[test]
    fn degrees_of_a_generic_run() {
        let exp = run(&[3, 1, -2, 5, 2], 2, 4);
        assert_eq!(exp.rank(), 4);
        assert!(degree_check(&exp.pairs, exp.mode, 1).iter().all(DegreeRow::holds));
    }
}
