use std::fmt;

use super::scalar::{Precision, Scalar};
use super::series::Series;

/// Dense polynomial in the local variable `s`, ascending coefficients.
///
/// The stored length is the nominal degree plus one; trailing coefficients
/// may be numerically zero. [`Poly::degree`] measures the actual degree.
#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
    prec: u32,
}

impl Poly {
    pub fn new(coeffs: Vec<Scalar>, prec: u32) -> Poly {
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(Scalar::zero(prec));
        }
        Poly { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Poly {
        Poly::new(vec![], prec)
    }

    pub fn constant(c: Scalar) -> Poly {
        let prec = c.prec();
        Poly::new(vec![c], prec)
    }

    pub fn from_i64s(prec: u32, values: &[i64]) -> Poly {
        Poly::new(values.iter().map(|&v| Scalar::from_i64(prec, v)).collect(), prec)
    }

    /// `c * s^k`.
    pub fn monomial(c: Scalar, k: usize) -> Poly {
        let prec = c.prec();
        let mut coeffs = vec![Scalar::zero(prec); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs, prec)
    }

    /// `s - t`.
    pub fn linear(t: &Scalar) -> Poly {
        let prec = t.prec();
        Poly::new(vec![-t, Scalar::one(prec)], prec)
    }

    /// `prod (s - r)` times `lead`.
    pub fn from_roots(lead: &Scalar, roots: &[Scalar]) -> Poly {
        let mut p = Poly::constant(lead.clone());
        for r in roots {
            p = p.mul(&Poly::linear(r));
        }
        p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn precision(&self) -> Precision {
        Scalar::zero(self.prec).precision()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Number of stored coefficients (nominal degree + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Scalar::zero(self.prec))
    }

    pub fn set_coeff(&mut self, k: usize, c: Scalar) {
        if k >= self.coeffs.len() {
            self.coeffs.resize(k + 1, Scalar::zero(self.prec));
        }
        self.coeffs[k] = c;
    }

    /// Largest coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Largest index whose coefficient exceeds `tol` times the largest coefficient.
    pub fn degree_tol(&self, tol: f64) -> usize {
        let n = self.norm();
        if n == 0.0 {
            return 0;
        }
        self.coeffs.iter().rposition(|c| c.abs() > tol * n).unwrap_or(0)
    }

    /// Degree under the arithmetic zero threshold `2^(-P/2)`.
    pub fn degree(&self) -> usize {
        self.degree_tol(self.precision().tau())
    }

    pub fn is_zero_tol(&self, tol: f64, scale: f64) -> bool {
        self.norm() <= tol * scale
    }

    /// Index of the first coefficient exceeding `tol` times the largest coefficient.
    pub fn valuation_tol(&self, tol: f64) -> Option<usize> {
        let n = self.norm();
        if n == 0.0 {
            return None;
        }
        self.coeffs.iter().position(|c| c.abs() > tol * n)
    }

    pub fn leading(&self) -> Scalar {
        self.coeff(self.degree())
    }

    /// Drops stored coefficients beyond the measured degree.
    pub fn trimmed(&self) -> Poly {
        let d = self.degree();
        Poly::new(self.coeffs[..=d].to_vec(), self.prec)
    }

    /// Keeps exactly `len` coefficients, padding with zeros.
    pub fn with_len(&self, len: usize) -> Poly {
        let mut c = self.coeffs.clone();
        c.resize(len.max(1), Scalar::zero(self.prec));
        Poly::new(c, self.prec)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.len().max(other.len());
        let c = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Poly::new(c, self.prec)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.len().max(other.len());
        let c = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Poly::new(c, self.prec)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect(), self.prec)
    }

    pub fn scale(&self, k: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect(), self.prec)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Scalar::zero(self.prec); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out, self.prec)
    }

    /// Multiplies by `s^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        let mut c = vec![Scalar::zero(self.prec); k];
        c.extend(self.coeffs.iter().cloned());
        Poly::new(c, self.prec)
    }

    /// Divides by `s^k`, returning the quotient and the dropped low coefficients.
    pub fn shift_down(&self, k: usize) -> (Poly, Vec<Scalar>) {
        let k = k.min(self.len());
        let low = self.coeffs[..k].to_vec();
        (Poly::new(self.coeffs[k..].to_vec(), self.prec), low)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    pub fn deriv(&self) -> Poly {
        if self.len() == 1 {
            return Poly::zero(self.prec);
        }
        let c = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.mul_i64(k as i64)).collect();
        Poly::new(c, self.prec)
    }

    /// `P(s + eps)` as a polynomial in `s`.
    pub fn shifted(&self, eps: &Scalar) -> Poly {
        // repeated synthetic division (Taylor shift)
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let t = &c[k + 1] * eps;
                c[k] += &t;
            }
        }
        Poly::new(c, self.prec)
    }

    /// Synthetic division by `s - t`: `(quotient, remainder)`.
    pub fn div_linear(&self, t: &Scalar) -> (Poly, Scalar) {
        let n = self.len();
        if n == 1 {
            return (Poly::zero(self.prec), self.coeffs[0].clone());
        }
        let mut q = vec![Scalar::zero(self.prec); n - 1];
        let mut acc = Scalar::zero(self.prec);
        for k in (0..n).rev() {
            acc = &acc * t + &self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        (Poly::new(q, self.prec), acc)
    }

    /// Long division by a divisor with nonzero stored leading coefficient.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.trimmed();
        let dn = d.len() - 1;
        if self.len() <= dn {
            return (Poly::zero(self.prec), self.clone());
        }
        let lead = d.coeffs[dn].clone();
        let mut r = self.coeffs.clone();
        let qn = r.len() - dn;
        let mut q = vec![Scalar::zero(self.prec); qn];
        for k in (0..qn).rev() {
            let f = &r[k + dn] / &lead;
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &f * dc;
                r[k + j] -= &t;
            }
            q[k] = f;
        }
        r.truncate(dn.max(1));
        (Poly::new(q, self.prec), Poly::new(r, self.prec))
    }

    /// Coefficients reversed with respect to nominal degree `n`: `s^n P(1/s)`.
    pub fn reversed(&self, n: usize) -> Poly {
        let c = (0..=n).map(|k| self.coeff(n - k)).collect();
        Poly::new(c, self.prec)
    }

    pub fn to_series(&self, order: usize) -> Series {
        Series::new((0..order).map(|k| self.coeff(k)).collect(), self.prec)
    }

    /// Largest coefficientwise difference.
    pub fn max_abs_diff(&self, other: &Poly) -> f64 {
        self.sub(other).norm()
    }

    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(Scalar::to_decimal).collect()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter())
    }
}

/// Polynomial of nominal degree `< n` through the values of `f` at the `n`-th roots of unity.
pub fn interpolate_unit_circle(prec: u32, n: usize, mut f: impl FnMut(&Scalar) -> Scalar) -> Poly {
    let nodes: Vec<Scalar> = (0..n).map(|j| Scalar::root_of_unity(prec, j as i64, n as i64)).collect();
    let values: Vec<Scalar> = nodes.iter().map(&mut f).collect();
    let coeffs = (0..n)
        .map(|k| {
            let mut acc = Scalar::zero(prec);
            for (j, v) in values.iter().enumerate() {
                acc += &(v * &nodes[(n - (j * k) % n) % n]);
            }
            acc.div_i64(n as i64)
        })
        .collect();
    Poly::new(coeffs, prec)
}

/// `X(s + eps)`: the polynomial re-expressed around `eps`.
pub fn recenter(x: &Poly, eps: &Scalar) -> Poly {
    x.shifted(eps)
}
