mod common;

use std::time::Instant;

use common::*;
use hhcf::approx::{approximation_report, best_choice_scan, degree_check, determinant_rows, Candidate, Expansion, Mode};
use hhcf::arith::{poly_roots, Poly, Scalar};
use hhcf::bal::{cross_solve, solve_bal, triplet_distance, HalphenElement};
use hhcf::cfengine::{BranchTree, Policy};
use hhcf::curve::{commuting_residual, growth_profile, index, ramification, CurvePoint};
use hhcf::irregular::{expand_t_infinity, expand_t_zero, infinity_symmetry_witness, zero_symmetry_witness};
use hhcf::spectral::{lambda_for_branch, lambda_pair_at, qx_build, qx_distance, qx_printed};
use hhcf::symmetry::{detect, symmetry_algebra_check};

const STRICT: f64 = 7.888609052210118e-31; // 2^-100

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(failures: Vec<String>, summary: String) -> Verdict {
    if failures.is_empty() {
        Verdict { pass: true, detail: summary }
    } else {
        let shown: Vec<_> = failures.iter().take(4).cloned().collect();
        Verdict { pass: false, detail: format!("{summary}; {} failures: {}", failures.len(), shown.join(" | ")) }
    }
}

fn bal_suite() -> Verdict {
    let pr = prec();
    let clock = Instant::now();
    let mut bad = vec![];
    let mut worst: f64 = 0.0;
    for genus in 1..=4 {
        let mut r = rng(1000 + genus as u64);
        for i in 0..50 {
            let h = random_element(&mut r, &pr, genus);
            let tri = match solve_bal(&h) {
                Ok(t) => t,
                Err(e) => {
                    bad.push(format!("g={genus} #{i}: {e}"));
                    continue;
                }
            };
            let other = cross_solve(&h.x, genus, &h.t, &h.sqrt_y).unwrap();
            let dist = triplet_distance(&tri, &other, h.x.norm());
            let res = tri.residual_linear.max(tri.residual_quadratic);
            worst = worst.max(res).max(dist);
            if res >= STRICT || dist >= STRICT {
                bad.push(format!("g={genus} #{i}: residual {res:.1e} cross {dist:.1e}"));
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    if secs >= 30.0 {
        bad.push(format!("took {secs:.1} s"));
    }
    verdict(bad, format!("200 elements, worst {worst:.1e}, {secs:.2} s"))
}

fn coeffs_match(got: &Poly, want: &[Scalar], tol: f64) -> bool {
    got.nominal_degree() + 1 >= want.len()
        && (0..got.len()).all(|k| {
            let w = want.get(k).cloned().unwrap_or_else(|| Scalar::zero(got.prec()));
            got.coeff(k).approx_eq(&w, tol)
        })
}

fn worked_examples() -> Verdict {
    let pr = prec();
    let tol = 1e-60;
    let r2 = pr.int(2).sqrt();
    let one = pr.one();
    let k = &r2 - &one;
    let kk = k.mul_i64(2);
    let z = pr.zero();
    let mut bad = vec![];

    let quartic = from_ints(&[1, 0, 0, 0, 1]);
    let tri = solve_bal(&HalphenElement::new(quartic.clone(), z.clone(), one.clone(), r2.clone()).unwrap()).unwrap();
    if !coeffs_match(&tri.a, &[one.clone(), z.clone(), k.clone()], tol) {
        bad.push("quartic A".into());
    }
    if !coeffs_match(&tri.b, &[kk.clone(), kk.clone()], tol) {
        bad.push("quartic B".into());
    }
    if !coeffs_match(&tri.c, &[k.clone(), k.clone()], tol) {
        bad.push("quartic C".into());
    }
    let (l1, l2) = lambda_pair_at(&qx_build(&quartic).unwrap(), &quartic, &one).unwrap();
    let (pa, pb) = (&r2 - &one, -&(&r2 + &one));
    let pair_ok = (l1.approx_eq(&pa, tol) && l2.approx_eq(&pb, tol)) || (l1.approx_eq(&pb, tol) && l2.approx_eq(&pa, tol));
    if !pair_ok {
        bad.push(format!("lambda pair {l1} {l2}"));
    }

    let sextic = from_ints(&[1, 0, 0, 0, 0, 0, 1]);
    let tri = solve_bal(&HalphenElement::new(sextic, z.clone(), one.clone(), r2.clone()).unwrap()).unwrap();
    if !coeffs_match(&tri.a, &[one.clone(), z.clone(), z.clone(), k.clone()], tol) {
        bad.push("sextic A".into());
    }
    if !coeffs_match(&tri.b, &[kk.clone(), kk.clone(), kk.clone()], tol) {
        bad.push("sextic B".into());
    }
    if !coeffs_match(&tri.c, &[k.clone(), k.clone(), k.clone()], tol) {
        bad.push("sextic C".into());
    }
    let w = Scalar::root_of_unity(pr.bits(), 1, 3);
    let roots = poly_roots(&tri.b).unwrap();
    let cube = roots.len() == 2 && [w.clone(), w.conj()].iter().all(|c| roots.iter().any(|r| r.approx_eq(c, tol)));
    if !cube {
        bad.push("sextic B roots".into());
    }
    verdict(bad, "quartic and sextic triplets, lambda pair, cube roots of unity".into())
}

fn basic_curve_suite() -> Verdict {
    let pr = prec();
    let mut bad = vec![];
    let (mut edges, mut worst, mut worst_qx) = (0usize, 0f64, 0f64);
    for genus in 1..=2 {
        for i in 0..20 {
            let h = random_element(&mut rng(2000 + 100 * genus as u64 + i), &pr, genus);
            let qx = qx_build(&h.x).unwrap();
            let d = qx_distance(&qx, &qx_printed(&h.x).unwrap());
            worst_qx = worst_qx.max(d);
            if d >= STRICT {
                bad.push(format!("g={genus} #{i}: explicit form differs by {d:.1e}"));
            }
            let tree = expand(&h, 5, &Policy::All);
            for leaf in tree.leaf_paths() {
                let states = tree.states_along(&leaf);
                for pair in states.windows(2) {
                    let (ta, tb) = (pair[0].t.clone().unwrap(), pair[1].t.clone().unwrap());
                    let v = qx
                        .relative_value(&pair[0].lambda, &ta)
                        .max(qx.relative_value(&pair[0].lambda, &tb))
                        .max(qx.relative_value(&pair[1].lambda, &tb));
                    worst = worst.max(v);
                    edges += 1;
                    if v >= STRICT {
                        bad.push(format!("g={genus} #{i} leaf {leaf:?}: {v:.1e}"));
                    }
                }
            }
        }
    }
    verdict(bad, format!("{edges} edges, worst {worst:.1e}, explicit forms {worst_qx:.1e}"))
}

fn first_path(h: &HalphenElement, depth: usize) -> Expansion {
    let tree = expand(h, depth, &Policy::First);
    let order = (h.genus + 1) * (depth + 2) + 8;
    Expansion::from_path(&h.x, h.genus, &tree.states_along(&tree.longest_path()), order).unwrap()
}

fn determinant_suite() -> Verdict {
    let pr = prec();
    let mut bad = vec![];
    let mut rows = 0;
    for genus in 1..=3 {
        for i in 0..5 {
            let exp = first_path(&random_element(&mut rng(3000 + 10 * genus as u64 + i), &pr, genus), 6);
            for row in determinant_rows(&exp) {
                rows += 1;
                let ok = row.order.exact
                    && row.order.value == (genus + 1) * row.rank
                    && row.cofactor_degree == (genus - 1) * row.rank;
                if !ok {
                    bad.push(format!("g={genus} m={}: order {} cofactor {}", row.rank, row.order, row.cofactor_degree));
                }
            }
        }
    }
    verdict(bad, format!("{rows} rows, g = 1..3, m = 1..6"))
}

fn mode_run(seed: u64, genus: usize, mode: Mode, depth: usize) -> Expansion {
    let pr = prec();
    let mut r = rng(seed);
    let order = (genus + 1) * (depth + 2) + 8;
    let (x, tree): (Poly, BranchTree) = match mode {
        Mode::GenericY => return first_path(&random_element(&mut r, &pr, genus), depth),
        Mode::SqrtCase => {
            let x = random_x(&mut r, &pr, genus);
            let t = expand_t_zero(&x, depth, &Policy::First, order).unwrap();
            (x, t)
        }
        Mode::YInfinity => {
            let x = random_x(&mut r, &pr, genus);
            let t = expand_t_infinity(&x, depth, &Policy::First, order).unwrap();
            (x, t)
        }
    };
    Expansion::from_path(&x, genus, &tree.states_along(&tree.longest_path()), order).unwrap()
}

fn approximation_suite() -> Verdict {
    let pr = prec();
    let mut bad = vec![];
    let mut checked = 0;
    for genus in 1..=3 {
        for mode in [Mode::GenericY, Mode::SqrtCase, Mode::YInfinity] {
            for i in 0..3 {
                let exp = mode_run(4000 + 100 * genus as u64 + i, genus, mode, 5);
                for row in degree_check(&exp.pairs, mode, genus) {
                    checked += 1;
                    if !row.holds() {
                        bad.push(format!("{mode} g={genus} m={}: degrees {:?}", row.rank, row));
                    }
                }
                let rep = approximation_report(&exp);
                for m in 0..=5 {
                    let mut rows = match mode {
                        Mode::GenericY => vec![("order", (genus + 1) * (m + 1))],
                        Mode::SqrtCase => vec![("order_sqrt_x_center", (genus + 1) * (m + 1) + 1)],
                        Mode::YInfinity => vec![("order_sqrt_x_infinity", (genus + 1) * (m + 1))],
                    };
                    if mode == Mode::YInfinity && genus == 1 {
                        rows.push(("order_sqrt_x_linear", 2 * m + 2));
                    }
                    for (clause, want) in rows {
                        checked += 1;
                        match rep.check(clause, m) {
                            Some(c) if c.measured == want.to_string() => {}
                            Some(c) => bad.push(format!("{mode} g={genus} m={m} {clause}: {} vs {want}", c.measured)),
                            None => bad.push(format!("{mode} g={genus} m={m} {clause}: missing")),
                        }
                    }
                }
            }
        }
    }
    for genus in 1..=3 {
        let x = random_x(&mut rng(4500 + genus as u64), &pr, genus);
        let eps = pr.complex(0.2, 0.1);
        let cands = [
            Candidate::Finite(&eps + &pr.complex(0.5, 0.0)),
            Candidate::Infinity,
            Candidate::Finite(eps.clone()),
            Candidate::Finite(&eps + &pr.complex(-0.3, 0.6)),
        ];
        let ranking = best_choice_scan(&x, &eps, &cands, 3, 40).unwrap();
        checked += 1;
        if !ranking.center_first {
            bad.push(format!("g={genus}: scan ranks {} first", ranking.entries[0].candidate));
        }
    }
    verdict(bad, format!("{checked} exact integer checks and scans"))
}

fn symmetry_suite() -> Verdict {
    let pr = prec();
    let mut bad = vec![];
    for genus in 1..=2 {
        for i in 0..20 {
            let (x, y) = vanishing_at_y(&mut rng(5000 + 100 * genus as u64 + i), &pr, genus);
            let tree = expand(&element(&x, &y), 5, &Policy::First);
            let r = detect(&x, &tree.states_along(&tree.longest_path()), pr.match_tol()).unwrap();
            if r.even_centers.is_empty() {
                bad.push(format!("g={genus} #{i}: no even centre"));
            }
        }
    }

    let mut witnessed = 0;
    for genus in 1..=2 {
        for same in [false, true] {
            for i in 0..3 {
                let (x, t0) = double_symmetric(&mut rng(5500 + i), &pr, genus, same);
                let h = HalphenElement::new(x.clone(), pr.zero(), t0, pr.zero()).unwrap();
                let tree = hhcf::cfengine::expand_element(&h, 6, &Policy::All, (genus + 1) * 8 + 8).unwrap();
                let mut seen = false;
                for leaf in tree.leaf_paths() {
                    let r = detect(&x, &tree.states_along(&leaf), pr.match_tol()).unwrap();
                    for c in symmetry_algebra_check(&r).iter().filter(|c| c.clause.starts_with("persym2")) {
                        match c.holds {
                            Some(false) => bad.push(format!("g={genus} same={same} #{i}: {} expected {}", c.clause, c.expected)),
                            Some(true) => seen = true,
                            None => {}
                        }
                    }
                }
                witnessed += usize::from(seen);
                if !seen {
                    bad.push(format!("g={genus} same={same} #{i}: no period clause witnessed"));
                }
            }
        }
    }

    for i in 0..20 {
        let genus = 1 + (i % 2) as usize;
        let mut x = random_x(&mut rng(6000 + i), &pr, genus);
        let w = infinity_symmetry_witness(&x, 4, 30).unwrap();
        if w.premise || w.conclusion {
            bad.push(format!("t=inf #{i}: symmetric without vanishing top coefficient"));
        }
        x.set_coeff(2 * genus + 2, pr.zero());
        let w = infinity_symmetry_witness(&x, 4, 30).unwrap();
        if !(w.premise && w.conclusion) {
            bad.push(format!("t=inf #{i}: vanishing top coefficient without symmetry"));
        }
    }

    for i in 0..20 {
        let genus = 1 + (i % 2) as usize;
        let x = random_x(&mut rng(6500 + i), &pr, genus);
        let qx = qx_build(&x).unwrap();
        let lambda = qx.q[genus + 1].clone();
        let roots = poly_roots(&qx.in_s(&lambda).trimmed()).unwrap();
        let Some(t) = roots.into_iter().find(|r| r.abs() > 0.05) else {
            bad.push(format!("t=0 #{i}: no nonzero root"));
            continue;
        };
        let root = x.eval(&t).sqrt();
        let Some(sy) = [root.clone(), -&root]
            .into_iter()
            .find(|s| lambda_for_branch(&qx, &t, s).map(|l| l.approx_eq(&lambda, 1e-30)).unwrap_or(false))
        else {
            bad.push(format!("t=0 #{i}: no branch reaches the pole"));
            continue;
        };
        let h = HalphenElement::new(x.clone(), pr.zero(), t, sy).unwrap();
        let tree = hhcf::cfengine::expand_element(&h, 3, &Policy::All, (genus + 1) * 5 + 8).unwrap();
        let mut any = false;
        for leaf in tree.leaf_paths() {
            let w = zero_symmetry_witness(&x, &tree.states_along(&leaf)).unwrap();
            if genus == 1 && w.premise && !w.conclusion {
                bad.push(format!("t=0 #{i}: pole without odd centre"));
            }
            any |= w.premise && w.conclusion;
        }
        if !any {
            bad.push(format!("t=0 #{i}: not witnessed"));
        }
    }
    verdict(bad, format!("40 even, {witnessed} double symmetric, 20 + 20 irregular"))
}

fn curve_suite() -> Verdict {
    let pr = prec();
    let mut bad = vec![];
    let (mut worst_commute, mut worst_index, mut worst_printed) = (0f64, 0f64, 0f64);
    for genus in 1..=3 {
        for i in 0..20 {
            let mut r = rng(7000 + 100 * genus as u64 + i);
            let x = random_x(&mut r, &pr, genus);
            let ram = ramification(&x).unwrap();
            let count = |b: &hhcf::curve::Branching| b.finite.iter().map(|(_, m)| m).sum::<usize>() + b.at_infinity;
            if count(&ram.even) != 2 * genus + 2 || count(&ram.odd_gluing) != 4 * genus {
                bad.push(format!("g={genus} #{i}: counts {} / {}", count(&ram.even), count(&ram.odd_gluing)));
            }
            let pt = CurvePoint::on(&x, unit_box(&mut r, &pr));
            let (commute, on_curve) = commuting_residual(&x, &pt).unwrap();
            worst_commute = worst_commute.max(commute).max(on_curve);
            if commute >= STRICT || on_curve >= STRICT {
                bad.push(format!("g={genus} #{i}: commuting {commute:.1e}"));
            }
            match index(&x, &pt) {
                Ok(ix) => {
                    worst_index = worst_index.max(ix.normalized_vs_limit);
                    worst_printed = worst_printed.max(ix.printed_vs_limit);
                    if !(ix.normalized_vs_limit < 1e-8) {
                        bad.push(format!("g={genus} #{i}: index {:.1e}", ix.normalized_vs_limit));
                    }
                }
                Err(e) => bad.push(format!("g={genus} #{i}: index {e}")),
            }
        }
    }
    verdict(
        bad,
        format!(
            "60 curves, commuting {worst_commute:.1e}, index {worst_index:.1e} (printed closed form off by up to {worst_printed:.1e})"
        ),
    )
}

fn growth_suite() -> Verdict {
    let pr = prec();
    let clock = Instant::now();
    let x = random_x(&mut rng(8000), &pr, 2);
    let start = CurvePoint::on(&x, pr.complex(0.3, 0.5));
    let depth = 8;
    let profile = match growth_profile(&x, &start, depth) {
        Ok(p) => p,
        Err(e) => return verdict(vec![e.to_string()], "growth".into()),
    };
    let secs = clock.elapsed().as_secs_f64();
    let last = profile.levels.last().map_or(0, |l| l.distinct_count);
    let bound = 0.25 * 3f64.powi(depth as i32);
    let mut bad = vec![];
    if profile.levels.len() != depth + 1 {
        bad.push(format!("{} levels", profile.levels.len()));
    }
    if !((last as f64) < bound) {
        bad.push(format!("{last} distinct >= {bound}"));
    }
    let slope = match profile.exponent {
        Some(e) => format!("{e:.2}"),
        None => {
            bad.push("no slope".into());
            "none".into()
        }
    };
    if secs >= 60.0 {
        bad.push(format!("took {secs:.1} s"));
    }
    verdict(bad, format!("depth {depth}: {last} distinct (bound {bound}), log-log slope {slope}, {secs:.2} s"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("BAL identity suite", bal_suite),
        ("worked example regression", worked_examples),
        ("basic curve relations", basic_curve_suite),
        ("determinant identity", determinant_suite),
        ("approximation orders", approximation_suite),
        ("symmetry", symmetry_suite),
        ("curve counts", curve_suite),
        ("growth profile", growth_suite),
    ];
    let mut failed = vec![];
    for (n, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("{} {}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, n + 1, v.detail);
        if !v.pass {
            failed.push(n + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
