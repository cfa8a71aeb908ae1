//! Iteration of the step, the branch tree and the chain identity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{poly_roots, series_sqrt, Poly, Precision, Scalar, Series};
use crate::bal::{self, HalphenElement};
use crate::error::{Error, Result};
use crate::irregular;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Regular,
    TZero,
    TInf,
    EpsInf,
}

/// One level of the expansion.
///
/// The remainder after this level is `Q = s^shift * B s^(g+1) / (sqrt(X) + A)`.
#[derive(Clone, Debug)]
pub struct CfState {
    pub index: usize,
    pub kind: StepKind,
    /// `None` stands for `t = infinity`.
    pub t: Option<Scalar>,
    pub sqrt_y: Option<Scalar>,
    pub lambda: Scalar,
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    /// Partial quotients entering this level; absent at the root.
    pub alpha: Option<Poly>,
    pub beta: Option<Poly>,
    pub shift: usize,
    /// Roots of `B` in canonical order: the candidates for the next `t`.
    pub spare_roots: Vec<Scalar>,
    pub degenerate: bool,
    /// Reached through a vanishing root: the step before carries a pole in lambda.
    pub pole_before: bool,
    pub bal_residual: f64,
    pub branch_residual: f64,
}

impl CfState {
    pub fn is_regular(&self) -> bool {
        matches!(self.kind, StepKind::Regular | StepKind::EpsInf)
    }

    /// `Q` as a series, given the series of `sqrt(X)`.
    pub fn remainder(&self, genus: usize, sqrt_x: &Series) -> Result<Series> {
        let order = sqrt_x.order();
        let num = self.b.shift_up(genus + 1 + self.shift).to_series(order);
        num.div(&sqrt_x.add_poly(&self.a))
    }
}

/// Finishes a state from its triplet: roots of `B` and the degeneracy flag.
pub(crate) fn attach_roots(mut st: CfState, genus: usize) -> Result<CfState> {
    let deg = st.b.degree();
    if deg < genus || st.b.norm() == 0.0 {
        st.degenerate = true;
        st.spare_roots = vec![];
        return Ok(st);
    }
    st.spare_roots = poly_roots(&st.b.trimmed())?;
    Ok(st)
}

/// Root state of a regular element.
pub fn root_state(h: &HalphenElement) -> Result<CfState> {
    let tri = bal::solve_bal(h)?;
    let st = CfState {
        index: 0,
        kind: StepKind::Regular,
        t: Some(h.t.clone()),
        sqrt_y: Some(h.sqrt_y.clone()),
        lambda: tri.lambda.clone(),
        a: tri.a,
        b: tri.b,
        c: tri.c,
        alpha: None,
        beta: None,
        shift: 0,
        spare_roots: vec![],
        degenerate: false,
        pole_before: false,
        bal_residual: tri.residual_linear.max(tri.residual_quadratic),
        branch_residual: 0.0,
    };
    attach_roots(st, h.genus)
}

/// `(A(s) - A(t)) / (s - t)`.
pub fn difference_quotient(a: &Poly, t: &Scalar) -> Poly {
    let (q, _) = a.sub(&Poly::constant(a.eval(t))).div_linear(t);
    q
}

/// One step along root `choice` (0-based) of the parent's `B`.
pub fn cf_step(x: &Poly, genus: usize, parent: &CfState, choice: usize) -> Result<CfState> {
    if parent.degenerate {
        return Err(Error::DegenerateB(parent.b.degree()));
    }
    let n = parent.spare_roots.len();
    let t = parent.spare_roots.get(choice).ok_or(Error::NoSuchChoice(choice + 1, n))?.clone();
    let prec = x.precision();
    if t.abs() < prec.match_tol() {
        return Err(Error::IrregularRootZero);
    }
    let sqrt_y = -parent.a.eval(&t);
    let y_val = x.eval(&t);
    let branch_residual =
        (&sqrt_y.square() - &y_val).abs() / (x.norm() * t.abs().max(1.0).powi(x.nominal_degree() as i32));
    let tri = bal::solve_at(x, genus, &t, &sqrt_y)?;
    let alpha = difference_quotient(&parent.a, &t).with_len(genus + 1).add(&tri.c);
    let (spare, _) = parent.b.div_linear(&t);
    let beta = spare.shift_up(genus + 1 + parent.shift);
    let st = CfState {
        index: parent.index + 1,
        kind: StepKind::Regular,
        t: Some(t),
        sqrt_y: Some(sqrt_y),
        lambda: tri.lambda.clone(),
        a: tri.a,
        b: tri.b,
        c: tri.c,
        alpha: Some(alpha),
        beta: Some(beta),
        shift: 0,
        spare_roots: vec![],
        degenerate: false,
        pole_before: false,
        bal_residual: tri.residual_linear.max(tri.residual_quadratic),
        branch_residual,
    };
    attach_roots(st, genus)
}

/// Step that also handles a vanishing root by switching to the `t = 0` relation.
pub fn step_any(x: &Poly, genus: usize, parent: &CfState, choice: usize) -> Result<CfState> {
    match cf_step(x, genus, parent, choice) {
        Err(Error::IrregularRootZero) => irregular::zero_child(x, genus, parent),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    All,
    First,
    /// 1-based root indices, one per level.
    Path(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub path: Vec<usize>,
    pub state: Option<CfState>,
    pub error: Option<Error>,
    /// Relative residual of `Q_parent (alpha + Q) - beta`; at the root, of `f - C - Q`.
    pub chain_residual: Option<f64>,
}

impl Node {
    pub fn key(&self) -> String {
        path_key(&self.path)
    }
}

pub fn path_key(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Clone, Debug)]
pub struct BranchTree {
    pub x: Poly,
    pub genus: usize,
    pub order: usize,
    /// Breadth-first, children in canonical root order.
    pub nodes: Vec<Node>,
}

impl BranchTree {
    pub fn root(&self) -> &CfState {
        self.nodes[0].state.as_ref().expect("root state")
    }

    pub fn get(&self, path: &[usize]) -> Option<&Node> {
        self.nodes.iter().find(|n| n.path == path)
    }

    /// States along `path` starting at the root; stops at the first missing state.
    pub fn states_along(&self, path: &[usize]) -> Vec<&CfState> {
        let mut out = vec![];
        for k in 0..=path.len() {
            match self.get(&path[..k]).and_then(|n| n.state.as_ref()) {
                Some(s) => out.push(s),
                None => break,
            }
        }
        out
    }

    /// Paths of nodes without children in the tree.
    pub fn leaf_paths(&self) -> Vec<Vec<usize>> {
        self.nodes
            .iter()
            .filter(|n| !self.nodes.iter().any(|m| m.path.len() == n.path.len() + 1 && m.path.starts_with(&n.path)))
            .map(|n| n.path.clone())
            .collect()
    }

    /// The longest path in breadth-first order (first one of maximal length).
    pub fn longest_path(&self) -> Vec<usize> {
        self.nodes.iter().filter(|n| n.state.is_some()).max_by_key(|n| n.path.len()).map(|n| n.path.clone()).unwrap_or_default()
    }

    pub fn max_chain_residual(&self) -> f64 {
        self.nodes.iter().filter_map(|n| n.chain_residual).fold(0.0, f64::max)
    }
}

/// Series of the function the root state expands.
pub fn root_function(root: &CfState, genus: usize, sqrt_x: &Series) -> Result<Series> {
    let order = sqrt_x.order();
    let p0_root = sqrt_x.coeff(0);
    match root.kind {
        StepKind::Regular | StepKind::EpsInf => {
            let t = root.t.as_ref().expect("regular root has finite t");
            let sy = root.sqrt_y.as_ref().expect("regular root has sqrtY");
            Ok(sqrt_x.sub(&Series::constant(sy.clone(), order)).mul(&Series::inv_linear(t, order)))
        }
        StepKind::TZero => {
            let num = sqrt_x.sub(&Series::constant(p0_root, order));
            Ok(num.shift_down(1).0)
        }
        StepKind::TInf => {
            let top = Poly::monomial(&root.lambda * &p0_root, genus + 1);
            Ok(sqrt_x.sub(&top.to_series(order)))
        }
    }
}

fn relative_gap(lhs: &Series, rhs: &Series) -> f64 {
    lhs.max_abs_diff(rhs) / rhs.norm().max(lhs.norm()).max(f64::MIN_POSITIVE)
}

/// Expands the tree below `root` to `depth` levels.
pub fn expand(x: &Poly, genus: usize, root: CfState, depth: usize, policy: &Policy, order: usize) -> Result<BranchTree> {
    let sqrt_x = series_sqrt(x, order)?;
    let q_root = root.remainder(genus, &sqrt_x)?;
    let f = root_function(&root, genus, &sqrt_x)?;
    let root_gap = relative_gap(&root.c.to_series(order).add(&q_root), &f);
    let mut nodes = vec![Node { path: vec![], state: Some(root.clone()), error: None, chain_residual: Some(root_gap) }];
    let mut frontier: Vec<(Vec<usize>, CfState, Series)> = vec![(vec![], root, q_root)];
    for level in 0..depth {
        let children: Vec<Vec<(Node, Option<(CfState, Series)>)>> = frontier
            .par_iter()
            .map(|(path, st, q)| {
                let choices: Vec<usize> = match policy {
                    Policy::All => (0..st.spare_roots.len()).collect(),
                    Policy::First => {
                        if st.spare_roots.is_empty() {
                            vec![]
                        } else {
                            vec![0]
                        }
                    }
                    Policy::Path(p) => p.get(level).map(|j| vec![j.saturating_sub(1)]).unwrap_or_default(),
                };
                choices
                    .into_iter()
                    .map(|j| {
                        let mut child_path = path.clone();
                        child_path.push(j + 1);
                        match step_any(x, genus, st, j).and_then(|child| {
                            let qc = child.remainder(genus, &sqrt_x)?;
                            Ok((child, qc))
                        }) {
                            Ok((child, qc)) => {
                                let alpha = child.alpha.as_ref().expect("child alpha").to_series(order);
                                let beta = child.beta.as_ref().expect("child beta").to_series(order);
                                let lhs = q.mul(&alpha.add(&qc));
                                let gap = relative_gap(&lhs, &beta);
                                let node = Node { path: child_path, state: Some(child.clone()), error: None, chain_residual: Some(gap) };
                                (node, Some((child, qc)))
                            }
                            Err(e) => (Node { path: child_path, state: None, error: Some(e), chain_residual: None }, None),
                        }
                    })
                    .collect()
            })
            .collect();
        let mut next = vec![];
        for group in children {
            for (node, cont) in group {
                if let Some((st, q)) = cont {
                    next.push((node.path.clone(), st, q));
                }
                nodes.push(node);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(BranchTree { x: x.clone(), genus, order, nodes })
}

/// Expansion of a regular element.
pub fn expand_element(h: &HalphenElement, depth: usize, policy: &Policy, order: usize) -> Result<BranchTree> {
    expand(&h.x, h.genus, root_state(h)?, depth, policy, order)
}

/// Residual report for every edge: `(path key, relative residual)`.
pub fn chain_verify(tree: &BranchTree) -> Vec<(String, f64)> {
    tree.nodes.iter().filter_map(|n| n.chain_residual.map(|r| (n.key(), r))).collect()
}

/// Value of `C + beta_1/(alpha_1 + ... + beta_d/(alpha_d + Q_d))` as a series.
pub fn evaluate_path(states: &[&CfState], genus: usize, sqrt_x: &Series) -> Result<Series> {
    let last = states.last().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
    let order = sqrt_x.order();
    let mut tail = last.remainder(genus, sqrt_x)?;
    for st in states[1..].iter().rev() {
        let alpha = st.alpha.as_ref().expect("alpha").to_series(order);
        let beta = st.beta.as_ref().expect("beta").to_series(order);
        tail = beta.div(&alpha.add(&tail))?;
    }
    Ok(states[0].c.to_series(order).add(&tail))
}

/// `alpha_i` from its closed form in `q`, `t_i`, `lambda_(i-1)`, `lambda_i`.
pub fn alpha_closed_form(x: &Poly, genus: usize, t: &Scalar, lambda_prev: &Scalar, lambda: &Scalar) -> Result<Poly> {
    let head = bal::sqrt_head(x, genus + 1)?;
    let sqrt_p0 = head.coeff(0);
    let qg = head.scale(&sqrt_p0.recip());
    let prec = x.prec();
    let part = difference_quotient(&qg, t).with_len(genus + 1).scale(&Scalar::from_i64(prec, 2));
    // h_g(s, t) = sum_a s^a t^(g-a)
    let h: Vec<Scalar> = (0..=genus).map(|a| t.powi((genus - a) as u32)).collect();
    let sum = lambda_prev + lambda;
    let hg = Poly::new(h, prec).scale(&sum);
    Ok(part.add(&hg).scale(&sqrt_p0))
}

/// Serializable view of a tree.
#[derive(Serialize)]
pub struct TreeDocument {
    pub precision_bits: u32,
    pub genus: usize,
    pub order: usize,
    pub x: Poly,
    pub nodes: BTreeMap<String, NodeDocument>,
}

#[derive(Serialize)]
pub struct NodeDocument {
    pub kind: Option<StepKind>,
    pub t: Option<String>,
    pub lambda: Option<Scalar>,
    pub sqrt_y: Option<Scalar>,
    pub alpha: Option<Poly>,
    pub beta: Option<Poly>,
    pub c: Option<Poly>,
    pub spare_roots: Vec<Scalar>,
    pub degenerate: bool,
    pub pole_before: bool,
    pub residuals: BTreeMap<&'static str, f64>,
    pub error: Option<String>,
}

impl BranchTree {
    pub fn document(&self) -> TreeDocument {
        let prec: Precision = self.x.precision();
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let mut residuals = BTreeMap::new();
                if let Some(r) = n.chain_residual {
                    residuals.insert("chain", r);
                }
                let doc = match &n.state {
                    Some(st) => {
                        residuals.insert("bal", st.bal_residual);
                        residuals.insert("branch", st.branch_residual);
                        NodeDocument {
                            kind: Some(st.kind),
                            t: Some(st.t.as_ref().map(Scalar::to_decimal).unwrap_or_else(|| "infinity".into())),
                            lambda: Some(st.lambda.clone()),
                            sqrt_y: st.sqrt_y.clone(),
                            alpha: st.alpha.clone(),
                            beta: st.beta.clone(),
                            c: if st.index == 0 { Some(st.c.clone()) } else { None },
                            spare_roots: st.spare_roots.clone(),
                            degenerate: st.degenerate,
                            pole_before: st.pole_before,
                            residuals,
                            error: None,
                        }
                    }
                    None => NodeDocument {
                        kind: None,
                        t: None,
                        lambda: None,
                        sqrt_y: None,
                        alpha: None,
                        beta: None,
                        c: None,
                        spare_roots: vec![],
                        degenerate: false,
                        pole_before: false,
                        residuals,
                        error: n.error.as_ref().map(|e| format!("{}: {}", e.code(), e)),
                    },
                };
                (n.key(), doc)
            })
            .collect();
        TreeDocument { precision_bits: prec.bits(), genus: self.genus, order: self.order, x: self.x.clone(), nodes }
    }
}
