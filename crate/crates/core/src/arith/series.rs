use std::fmt;

use super::poly::Poly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Power series in `s` truncated at `order` (exclusive).
#[derive(Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<Scalar>,
    prec: u32,
}

impl Series {
    pub fn new(coeffs: Vec<Scalar>, prec: u32) -> Series {
        Series { coeffs, prec }
    }

    pub fn zero(prec: u32, order: usize) -> Series {
        Series::new(vec![Scalar::zero(prec); order], prec)
    }

    pub fn constant(c: Scalar, order: usize) -> Series {
        let prec = c.prec();
        let mut s = Series::zero(prec, order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Scalar::zero(self.prec))
    }

    pub fn truncated(&self, order: usize) -> Series {
        Series::new(self.coeffs.iter().take(order).cloned().collect(), self.prec)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone(), self.prec)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    fn zip(&self, other: &Series, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Series {
        let n = self.order().min(other.order());
        Series::new((0..n).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect(), self.prec)
    }

    pub fn add(&self, other: &Series) -> Series {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Series {
        Series::new(self.coeffs.iter().map(|c| -c).collect(), self.prec)
    }

    pub fn scale(&self, k: &Scalar) -> Series {
        Series::new(self.coeffs.iter().map(|c| c * k).collect(), self.prec)
    }

    pub fn add_poly(&self, p: &Poly) -> Series {
        self.add(&p.to_series(self.order()))
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        let mut out = vec![Scalar::zero(self.prec); n];
        for i in 0..n {
            if self.coeffs[i].is_exact_zero() {
                continue;
            }
            for j in 0..n - i {
                out[i + j] += &(&self.coeffs[i] * &other.coeffs[j]);
            }
        }
        Series::new(out, self.prec)
    }

    pub fn mul_poly(&self, p: &Poly) -> Series {
        self.mul(&p.to_series(self.order()))
    }

    /// Multiplies by `s^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Series {
        let n = self.order();
        let mut c = vec![Scalar::zero(self.prec); k.min(n)];
        c.extend(self.coeffs.iter().take(n.saturating_sub(k)).cloned());
        Series::new(c, self.prec)
    }

    /// Divides by `s^k`; the order drops by `k`. The dropped coefficients are returned.
    pub fn shift_down(&self, k: usize) -> (Series, Vec<Scalar>) {
        let k = k.min(self.order());
        (Series::new(self.coeffs[k..].to_vec(), self.prec), self.coeffs[..k].to_vec())
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inv(&self) -> Result<Series> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        let tau = self.coeffs[0].precision().tau();
        if self.coeffs[0].is_negligible(tau, self.norm().max(f64::MIN_POSITIVE)) {
            return Err(Error::PreconditionViolated("series inverse of a series vanishing at 0".into()));
        }
        let c0inv = self.coeffs[0].recip();
        let mut out = vec![Scalar::zero(self.prec); n];
        out[0] = c0inv.clone();
        for k in 1..n {
            let mut acc = Scalar::zero(self.prec);
            for j in 1..=k {
                acc += &(&self.coeffs[j] * &out[k - j]);
            }
            out[k] = -(&acc * &c0inv);
        }
        Ok(Series::new(out, self.prec))
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        Ok(self.mul(&other.inv()?))
    }

    /// Square root with the principal branch at the constant term.
    pub fn sqrt(&self) -> Result<Series> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        let tau = self.coeffs[0].precision().tau();
        if self.coeffs[0].is_negligible(tau, self.norm().max(f64::MIN_POSITIVE)) {
            return Err(Error::SqrtAtRoot);
        }
        let mut out = vec![Scalar::zero(self.prec); n];
        out[0] = self.coeffs[0].sqrt();
        let two_s0_inv = out[0].mul_i64(2).recip();
        for k in 1..n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc -= &(&out[j] * &out[k - j]);
            }
            out[k] = &acc * &two_s0_inv;
        }
        Ok(Series::new(out, self.prec))
    }

    /// `1/(s - t) = -sum s^k / t^(k+1)`.
    pub fn inv_linear(t: &Scalar, order: usize) -> Series {
        let prec = t.prec();
        let r = t.recip();
        let mut out = Vec::with_capacity(order);
        let mut p = -&r;
        for _ in 0..order {
            out.push(p.clone());
            p = &p * &r;
        }
        Series::new(out, prec)
    }

    /// First index whose coefficient exceeds `tol * scale`; `None` if all are below.
    pub fn valuation(&self, tol: f64, scale: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| c.abs() > tol * scale)
    }

    pub fn max_abs_diff(&self, other: &Series) -> f64 {
        self.sub(other).norm()
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series")?;
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

/// Power series of `sqrt(X)` about `s = 0` to the given order.
pub fn series_sqrt(x: &Poly, order: usize) -> Result<Series> {
    let p0 = x.coeff(0);
    let tau = p0.precision().tau();
    if p0.is_negligible(tau, x.norm().max(f64::MIN_POSITIVE)) {
        return Err(Error::SqrtAtRoot);
    }
    x.to_series(order).sqrt()
}

/// Series of `(sqrt(X) - sqrtY)/(s - t)` about `s = 0`.
pub fn hh_series(x: &Poly, t: &Scalar, sqrt_y: &Scalar, order: usize) -> Result<Series> {
    if t.abs() < t.precision().match_tol() {
        return Err(Error::TAtZero);
    }
    let root = series_sqrt(x, order)?;
    let num = root.sub(&Series::constant(sqrt_y.clone(), order));
    Ok(num.mul(&Series::inv_linear(t, order)))
}
