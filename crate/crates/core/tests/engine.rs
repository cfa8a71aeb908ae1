mod common;

use common::*;
use hhcf::approx::{continuants, determinant_rows, matrix_product, Expansion};
use hhcf::arith::series_sqrt;
use hhcf::bal::{cross_solve, solve_bal, triplet_distance};
use hhcf::cfengine::{evaluate_path, Policy};
use hhcf::spectral::qx_build;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bal_solutions_agree_and_satisfy_both_identities(seed in any::<u64>(), genus in 1usize..=3) {
        let pr = prec();
        let h = random_element(&mut rng(seed), &pr, genus);
        let tri = solve_bal(&h).unwrap();
        prop_assert!(tri.residual_linear < pr.tau() && tri.residual_quadratic < pr.tau());
        let other = cross_solve(&h.x, genus, &h.t, &h.sqrt_y).unwrap();
        prop_assert!(triplet_distance(&tri, &other, h.x.norm()) < 1e-60);
        prop_assert_eq!(tri.a.degree(), genus + 1);
    }

    #[test]
    fn every_edge_lies_on_the_basic_curve(seed in any::<u64>(), genus in 1usize..=2) {
        let pr = prec();
        let h = random_element(&mut rng(seed), &pr, genus);
        let tree = expand(&h, 3, &Policy::All);
        let qx = qx_build(&h.x).unwrap();
        for leaf in tree.leaf_paths() {
            let states = tree.states_along(&leaf);
            for w in states.windows(2) {
                let (ta, tb) = (w[0].t.clone().unwrap(), w[1].t.clone().unwrap());
                prop_assert!(qx.relative_value(&w[0].lambda, &ta) < pr.tau());
                prop_assert!(qx.relative_value(&w[0].lambda, &tb) < pr.tau());
                prop_assert!(qx.relative_value(&w[1].lambda, &tb) < pr.tau());
            }
        }
        prop_assert!(tree.max_chain_residual() < pr.tau());
    }

    #[test]
    fn truncated_fraction_reproduces_the_element(seed in any::<u64>(), genus in 1usize..=3) {
        let pr = prec();
        let h = random_element(&mut rng(seed), &pr, genus);
        let order = 30;
        let tree = expand(&h, 4, &Policy::First);
        let states = tree.states_along(&tree.longest_path());
        let sqrt_x = series_sqrt(&h.x, order).unwrap();
        let value = evaluate_path(&states, genus, &sqrt_x).unwrap();
        let direct = h.series(order).unwrap();
        let rho = states.iter().filter_map(|s| s.t.as_ref().map(|t| t.abs())).fold(1.0f64, f64::min);
        let weighted = |f: &dyn Fn(usize) -> f64| (0..order).map(|k| f(k) * rho.powi(k as i32)).fold(0.0, f64::max);
        let gap = weighted(&|k| (&value.coeff(k) - &direct.coeff(k)).abs()) / weighted(&|k| direct.coeff(k).abs());
        prop_assert!(gap < 1e-60, "{gap:e}");
    }

    #[test]
    fn continuant_identities(seed in any::<u64>(), genus in 1usize..=3) {
        let pr = prec();
        let h = random_element(&mut rng(seed), &pr, genus);
        let depth = 4;
        let order = (genus + 1) * (depth + 2) + 8;
        let tree = expand(&h, depth, &Policy::First);
        let states = tree.states_along(&tree.longest_path());
        let exp = Expansion::from_path(&h.x, genus, &states, order).unwrap();
        let direct = matrix_product(&exp.head, &exp.steps);
        let pairs = continuants(&exp.head, &exp.steps);
        let (last, prev) = (&pairs[depth], &pairs[depth - 1]);
        for (got, want) in [(&direct[0][0], &last.numerator), (&direct[1][0], &last.denominator),
                            (&direct[0][1], &prev.numerator), (&direct[1][1], &prev.denominator)] {
            prop_assert!(got.max_abs_diff(want) / want.norm() < 1e-60);
        }
        for row in determinant_rows(&exp) {
            prop_assert!(row.holds(pr.tau()), "{:?}", row);
        }
    }
}
