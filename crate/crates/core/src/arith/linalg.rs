use super::scalar::Scalar;
use crate::error::{Error, Result};

fn eliminate(mut a: Vec<Vec<Scalar>>, mut rhs: Option<&mut Vec<Scalar>>) -> Result<(Vec<Vec<Scalar>>, Scalar)> {
    let n = a.len();
    let prec = a.first().and_then(|r| r.first()).map(Scalar::prec).unwrap_or(64);
    let norm = a.iter().flatten().map(Scalar::abs).fold(0.0, f64::max);
    let tau = Scalar::zero(prec).precision().tau();
    let mut det = Scalar::one(prec);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= tau * norm {
            return Err(Error::EliminationDegenerate(format!("pivot {col} vanishes")));
        }
        if piv != col {
            a.swap(piv, col);
            if let Some(b) = rhs.as_deref_mut() {
                b.swap(piv, col);
            }
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        let pinv = p.recip();
        for r in col + 1..n {
            let f = &a[r][col] * &pinv;
            if f.is_exact_zero() {
                continue;
            }
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= &t;
            }
            if let Some(b) = rhs.as_deref_mut() {
                let t = &f * &b[col];
                b[r] -= &t;
            }
        }
    }
    Ok((a, det))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: Vec<Vec<Scalar>>, b: Vec<Scalar>) -> Result<Vec<Scalar>> {
    let n = a.len();
    let mut b = b;
    let (u, _) = eliminate(a, Some(&mut b))?;
    let prec = b.first().map(Scalar::prec).unwrap_or(64);
    let mut x = vec![Scalar::zero(prec); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= &(&u[r][c] * &x[c]);
        }
        x[r] = &acc / &u[r][r];
    }
    Ok(x)
}

/// Determinant; exactly zero when elimination finds no usable pivot.
pub fn determinant(a: Vec<Vec<Scalar>>) -> Scalar {
    let prec = a.first().and_then(|r| r.first()).map(Scalar::prec).unwrap_or(64);
    match eliminate(a, None) {
        Ok((_, d)) => d,
        Err(_) => Scalar::zero(prec),
    }
}

/// Sylvester matrix of two coefficient lists (ascending, nominal degrees `len - 1`).
pub fn sylvester(a: &[Scalar], b: &[Scalar]) -> Vec<Vec<Scalar>> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let prec = a[0].prec();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (src, copies) in [(a, n), (b, m)] {
        for r in 0..copies {
            let mut row = vec![Scalar::zero(prec); size];
            for (k, c) in src.iter().rev().enumerate() {
                row[r + k] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// Resultant with respect to the nominal degrees of `a` and `b`.
pub fn resultant(a: &[Scalar], b: &[Scalar]) -> Scalar {
    if a.len() == 1 {
        return a[0].powi(b.len() as u32 - 1);
    }
    if b.len() == 1 {
        return b[0].powi(a.len() as u32 - 1);
    }
    determinant(sylvester(a, b))
}
