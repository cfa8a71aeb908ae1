#![allow(dead_code)]

use hhcf::arith::{Poly, Precision, Scalar};
use hhcf::bal::HalphenElement;
use hhcf::cfengine::{expand_element, BranchTree, Policy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn prec() -> Precision {
    Precision::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the unit box of the complex plane.
pub fn unit_box(rng: &mut ChaCha8Rng, pr: &Precision) -> Scalar {
    pr.complex(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Degree `2g + 2` with end coefficients kept away from zero.
pub fn random_x(rng: &mut ChaCha8Rng, pr: &Precision, genus: usize) -> Poly {
    loop {
        let coeffs: Vec<Scalar> = (0..2 * genus + 3).map(|_| unit_box(rng, pr)).collect();
        if coeffs[0].abs() > 0.2 && coeffs[2 * genus + 2].abs() > 0.2 {
            return Poly::new(coeffs, pr.bits());
        }
    }
}

pub fn element(x: &Poly, t: &Scalar) -> HalphenElement {
    let sy = x.eval(t).sqrt();
    HalphenElement::new(x.clone(), Scalar::zero(x.prec()), t.clone(), sy).expect("regular element")
}

/// A random element at a point of modulus at least 0.3.
pub fn random_element(rng: &mut ChaCha8Rng, pr: &Precision, genus: usize) -> HalphenElement {
    let x = random_x(rng, pr, genus);
    loop {
        let t = unit_box(rng, pr);
        if t.abs() > 0.3 {
            return element(&x, &t);
        }
    }
}

pub fn expand(h: &HalphenElement, depth: usize, policy: &Policy) -> BranchTree {
    expand_element(h, depth, policy, (h.genus + 1) * (depth + 2) + 8).expect("expansion")
}

pub fn from_ints(values: &[i64]) -> Poly {
    Poly::from_i64s(prec().bits(), values)
}

/// Random polynomial of degree `deg` with roots in the unit box.
pub fn random_roots(rng: &mut ChaCha8Rng, pr: &Precision, count: usize) -> Vec<Scalar> {
    (0..count).map(|_| unit_box(rng, pr)).collect()
}

/// `X` with `X(y) = 0` for a random `y`, returned with `y`.
pub fn vanishing_at_y(rng: &mut ChaCha8Rng, pr: &Precision, genus: usize) -> (Poly, Scalar) {
    loop {
        let y = unit_box(rng, pr);
        let mut roots = random_roots(rng, pr, 2 * genus + 1);
        roots.push(y.clone());
        let x = Poly::from_roots(&unit_box(rng, pr), &roots);
        if y.abs() > 0.2 && x.coeff(0).abs() > 1e-3 * x.norm() {
            return (x, y);
        }
    }
}

/// `X = A^2 + K s^(g+1) (s - t0)(s - t1)` with `A(t0) = A(t1) = 0`, so both `t0` and `t1`
/// are roots of `X`; with `t1 = t0` the tail is `(s - t0)^2`.
pub fn double_symmetric(rng: &mut ChaCha8Rng, pr: &Precision, genus: usize, same: bool) -> (Poly, Scalar) {
    let t0 = pr.complex(rng.gen_range(0.4..0.9), rng.gen_range(-0.5..0.5));
    let t1 = if same { t0.clone() } else { pr.complex(rng.gen_range(-0.9..-0.4), rng.gen_range(-0.5..0.5)) };
    let mut a = Poly::from_roots(&unit_box(rng, pr), &[t0.clone(), t1.clone()]);
    if genus == 2 {
        a = a.mul(&Poly::new(vec![pr.one(), unit_box(rng, pr)], pr.bits()));
    }
    let k = Poly::new((0..genus).map(|_| unit_box(rng, pr)).collect(), pr.bits());
    let tail = Poly::from_roots(&pr.one(), &[t0.clone(), t1]).shift_up(genus + 1).mul(&k);
    (a.mul(&a).add(&tail), t0)
}
