//! Complex scalars at a fixed binary precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::{Round, Special};
use rug::ops::Pow;
use rug::Assign;
use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Working precision and the tolerances derived from it.
///
/// With `P` bits of precision the arithmetic zero threshold is `2^(-P/2)`;
/// state matching and clustering use the looser `2^(-P/4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    bits: u32,
}

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const MIN_PRECISION_BITS: u32 = 64;
pub const MAX_PRECISION_BITS: u32 = 2048;

impl Default for Precision {
    fn default() -> Self {
        Precision { bits: DEFAULT_PRECISION_BITS }
    }
}

impl Precision {
    pub fn new(bits: u32) -> Result<Self> {
        if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&bits) {
            return Err(Error::InvalidInput(format!(
                "precision must be in {MIN_PRECISION_BITS}..={MAX_PRECISION_BITS} bits, got {bits}"
            )));
        }
        Ok(Precision { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Arithmetic zero threshold `2^(-P/2)`.
    pub fn tau(&self) -> f64 {
        2f64.powf(-(self.bits as f64) / 2.0)
    }

    /// Matching / clustering threshold `2^(-P/4)`.
    pub fn match_tol(&self) -> f64 {
        2f64.powf(-(self.bits as f64) / 4.0)
    }

    /// Roundoff bound used for exact-up-to-rounding identities, `2^(-P+4)`.
    pub fn roundoff(&self) -> f64 {
        2f64.powf(-(self.bits as f64) + 4.0)
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(self.bits)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self.bits)
    }

    pub fn int(&self, v: i64) -> Scalar {
        Scalar::from_i64(self.bits, v)
    }

    pub fn real(&self, v: f64) -> Scalar {
        Scalar::from_f64(self.bits, v, 0.0)
    }

    pub fn complex(&self, re: f64, im: f64) -> Scalar {
        Scalar::from_f64(self.bits, re, im)
    }

    pub fn parse(&self, text: &str) -> Result<Scalar> {
        Scalar::parse(self.bits, text)
    }
}

/// A complex number with `re` and `im` held at the same binary precision.
#[derive(Clone, PartialEq)]
pub struct Scalar(Complex);

impl Scalar {
    pub fn zero(prec: u32) -> Self {
        Scalar(Complex::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Scalar(Complex::with_val(prec, 1))
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        Scalar(Complex::with_val(prec, v))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Scalar(Complex::with_val(prec, (re, im)))
    }

    pub fn from_complex(c: Complex) -> Self {
        Scalar(c)
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec().0
    }

    pub fn precision(&self) -> Precision {
        Precision { bits: self.prec() }
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    pub fn re_f64(&self) -> f64 {
        self.0.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.0.imag().to_f64()
    }

    pub fn abs(&self) -> f64 {
        Float::with_val(self.prec(), self.0.abs_ref()).to_f64()
    }

    /// `log2 |z|`; `-inf` for zero. Safe for magnitudes outside the f64 range.
    pub fn log2_abs(&self) -> f64 {
        let a = Float::with_val(self.prec(), self.0.abs_ref());
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        a.log2().to_f64()
    }

    /// Phase in `(-pi, pi]`.
    pub fn arg(&self) -> f64 {
        let im = self.im_f64();
        let re = self.re_f64();
        let a = im.atan2(re);
        if a == -std::f64::consts::PI {
            std::f64::consts::PI
        } else {
            a
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    /// Relative zero test `|z| <= tol * scale`.
    pub fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        self.abs() <= tol * scale
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= tol * scale
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn conj(&self) -> Scalar {
        Scalar(Complex::with_val(self.prec(), self.0.conj_ref()))
    }

    pub fn recip(&self) -> Scalar {
        Scalar(Complex::with_val(self.prec(), self.0.recip_ref()))
    }

    pub fn square(&self) -> Scalar {
        Scalar(Complex::with_val(self.prec(), self.0.square_ref()))
    }

    /// Principal square root, argument in `(-pi/2, pi/2]`.
    pub fn sqrt(&self) -> Scalar {
        let mut z = self.0.clone();
        // a negative zero imaginary part would select the lower branch
        if z.imag().is_zero() {
            z.mut_imag().assign(Special::Zero);
        }
        let r = z.sqrt();
        Scalar(r)
    }

    pub fn powi(&self, n: u32) -> Scalar {
        Scalar(Complex::with_val(self.prec(), (&self.0).pow(n)))
    }

    pub fn mul_i64(&self, v: i64) -> Scalar {
        Scalar(Complex::with_val(self.prec(), &self.0 * v))
    }

    pub fn div_i64(&self, v: i64) -> Scalar {
        Scalar(Complex::with_val(self.prec(), &self.0 / v))
    }

    pub fn mul_f64(&self, v: f64) -> Scalar {
        Scalar(Complex::with_val(self.prec(), &self.0 * v))
    }

    /// Exponential of `i*theta`.
    pub fn cis(prec: u32, theta: f64) -> Scalar {
        let f = Float::with_val(prec, theta);
        let (s, c) = f.sin_cos(Float::new(prec));
        Scalar(Complex::with_val(prec, (c, s)))
    }

    /// `exp(2*pi*i*k/n)` at full precision.
    pub fn root_of_unity(prec: u32, k: i64, n: i64) -> Scalar {
        let mut theta = Float::with_val(prec, rug::float::Constant::Pi);
        theta *= 2 * k;
        theta /= n;
        let (s, c) = theta.sin_cos(Float::new(prec));
        Scalar(Complex::with_val(prec, (c, s)))
    }

    /// Drops components that are negligible relative to the modulus.
    pub fn cleaned(&self, rel: f64) -> Scalar {
        let m = self.abs();
        let mut z = self.0.clone();
        if z.imag().to_f64().abs() <= rel * m {
            z.mut_imag().assign(Special::Zero);
        }
        if z.real().to_f64().abs() <= rel * m {
            z.mut_real().assign(Special::Zero);
        }
        Scalar(z)
    }

    /// Canonical order: magnitude first, then phase, both compared with a
    /// relative tolerance so that roundoff does not reorder equal keys.
    pub fn canonical_cmp(&self, other: &Scalar, tol: f64) -> Ordering {
        let (ma, mb) = (self.abs(), other.abs());
        let scale = ma.max(mb).max(f64::MIN_POSITIVE);
        if (ma - mb).abs() > tol * scale {
            return ma.partial_cmp(&mb).unwrap_or(Ordering::Equal);
        }
        let (pa, pb) = (self.arg(), other.arg());
        if (pa - pb).abs() > tol {
            return pa.partial_cmp(&pb).unwrap_or(Ordering::Equal);
        }
        Ordering::Equal
    }

    /// Parses `"re"`, `"re+imi"`, `"re-imi"` or `"imi"` (decimal, optional exponent).
    pub fn parse(prec: u32, text: &str) -> Result<Scalar> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("malformed scalar {text:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        let parse_real = |part: &str| -> Result<Float> {
            if part.is_empty() || part == "+" || part == "-" {
                return Err(bad());
            }
            let valid = Float::parse(part).map_err(|_| bad())?;
            Ok(Float::with_val(prec, valid))
        };
        if let Some(body) = s.strip_suffix('i') {
            // find the sign that separates re from im (not an exponent sign)
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                let c = bytes[k];
                if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                    split = Some(k);
                    break;
                }
            }
            let (re, im) = match split {
                Some(k) => (parse_real(&body[..k])?, &body[k..]),
                None => (Float::new(prec), body),
            };
            let im = match im {
                "" | "+" => Float::with_val(prec, 1),
                "-" => Float::with_val(prec, -1),
                other => parse_real(other)?,
            };
            Ok(Scalar(Complex::with_val(prec, (re, im))))
        } else {
            Ok(Scalar(Complex::with_val(prec, (parse_real(&s)?, 0))))
        }
    }

    /// Shortest decimal rendering that parses back to the same value.
    pub fn to_decimal(&self) -> String {
        let re = shortest_decimal(self.0.real());
        if self.0.imag().is_zero() {
            return re;
        }
        let im = shortest_decimal(self.0.imag());
        let (sign, mag) = match im.strip_prefix('-') {
            Some(m) => ('-', m.to_string()),
            None => ('+', im),
        };
        if self.0.real().is_zero() {
            if sign == '-' {
                format!("-{mag}i")
            } else {
                format!("{mag}i")
            }
        } else {
            format!("{re}{sign}{mag}i")
        }
    }

    /// Short human-readable rendering (about 12 significant digits).
    pub fn to_short(&self) -> String {
        let re = self.re_f64();
        let im = self.im_f64();
        if im == 0.0 {
            format!("{re:.12e}")
        } else {
            format!("{re:.12e}{:+.12e}i", im)
        }
    }
}

fn render_digits(negative: bool, digits: &str, exp: i32) -> String {
    // value = 0.digits * 10^exp
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };
    let sci_exp = exp - 1;
    if (-6..=20).contains(&sci_exp) {
        let n = digits.len() as i32;
        if exp <= 0 {
            format!("{sign}0.{}{}", "0".repeat((-exp) as usize), digits)
        } else if exp >= n {
            format!("{sign}{}{}", digits, "0".repeat((exp - n) as usize))
        } else {
            format!("{sign}{}.{}", &digits[..exp as usize], &digits[exp as usize..])
        }
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{sci_exp}")
        } else {
            format!("{sign}{head}.{tail}e{sci_exp}")
        }
    }
}

fn shortest_decimal(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    let prec = x.prec();
    let render = |n: usize| -> String {
        let (neg, digits, exp) = x.to_sign_string_exp_round(10, Some(n), Round::Nearest);
        render_digits(neg, &digits, exp.unwrap_or(0))
    };
    let round_trips = |s: &str| -> bool {
        Float::parse(s)
            .map(|v| Float::with_val_round(prec, v, Round::Nearest).0 == *x)
            .unwrap_or(false)
    };
    let max_digits = (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
    let (mut lo, mut hi) = (1usize, max_digits);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if round_trips(&render(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    render(lo)
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_short())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(Complex::with_val(self.prec(), &self.0 $op &rhs.0))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(Complex::with_val(self.prec(), -&self.0))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

/// NaN placeholder, used only to signal invalid numeric results in reports.
pub fn nan(prec: u32) -> Scalar {
    Scalar(Complex::with_val(prec, (Special::Nan, Special::Nan)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_sqrt_of_negative_real_is_upper() {
        let p = Precision::default();
        let r = p.int(-4).sqrt();
        assert!(r.approx_eq(&p.complex(0.0, 2.0), 1e-70));
        let neg_zero = Scalar(Complex::with_val(256, (-4.0, -0.0)));
        assert!(neg_zero.sqrt().approx_eq(&p.complex(0.0, 2.0), 1e-70));
    }

    #[test]
    fn decimal_round_trip_is_shortest() {
        let p = Precision::default();
        assert_eq!(p.real(0.5).to_decimal(), "0.5");
        assert_eq!(p.int(-3).to_decimal(), "-3");
        assert_eq!(p.complex(1.0, -2.0).to_decimal(), "1-2i");
        assert_eq!(p.complex(0.0, 1.5).to_decimal(), "1.5i");
        let r2 = p.int(2).sqrt();
        let text = r2.to_decimal();
        assert_eq!(p.parse(&text).unwrap(), r2);
        assert!(text.len() > 70);
    }

    #[test]
    fn parse_forms() {
        let p = Precision::default();
        assert!(p.parse("1.5e-3+2i").unwrap().approx_eq(&(p.int(3).div_i64(2000) + p.complex(0.0, 2.0)), 1e-70));
        assert!(p.parse("-2e+3-1e-2i").unwrap().approx_eq(&(p.int(-2000) - p.complex(0.0, 1.0).div_i64(100)), 1e-70));
        assert_eq!(p.parse("-i").unwrap(), p.complex(0.0, -1.0));
        assert_eq!(p.parse(" 7 ").unwrap(), p.int(7));
        assert!(p.parse("1+").is_err());
        assert!(p.parse("abc").is_err());
        assert!(p.parse("").is_err());
    }

    #[test]
    fn tiny_and_huge_render_scientific() {
        let p = Precision::default();
        assert_eq!(p.real(1e-40).to_decimal().contains('e'), true);
        let big = p.int(10).powi(30);
        assert_eq!(big.to_decimal(), "1e30");
    }

    #[test]
    fn canonical_order_magnitude_then_phase() {
        let p = Precision::default();
        let mut v = vec![p.int(-1), p.int(1), p.complex(0.0, 0.5)];
        v.sort_by(|a, b| a.canonical_cmp(b, 1e-20));
        assert_eq!(v, vec![p.complex(0.0, 0.5), p.int(1), p.int(-1)]);
    }
}
