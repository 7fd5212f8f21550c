use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::QapInstance;
use crate::cbop::{AffineExpr, BinaryProblem, Constraint, VariableMap, WeightPolynomial};
use crate::rational::{self, Rational};

/// `n^2` variables `pi[x*n+i]`, one-hot rows and columns, weight `-C`.
pub fn canonical_formulation(inst: &QapInstance) -> BinaryProblem {
    let n = inst.n;
    let vars = (0..n).flat_map(|x| (0..n).map(move |i| format!("p{}_{}", x + 1, i + 1))).collect();
    let mut constraints = Vec::new();
    for x in 0..n {
        constraints.push(Constraint::sum_eq((0..n).map(|i| x * n + i).collect(), 1));
    }
    for i in 0..n {
        constraints.push(Constraint::sum_eq((0..n).map(|x| x * n + i).collect(), 1));
    }
    let mut terms = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if inst.f[x][y].is_zero() {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    let c = &inst.f[x][y] * &inst.d[i][j];
                    if !c.is_zero() {
                        terms.push((vec![x * n + i, y * n + j], -c));
                    }
                }
            }
        }
    }
    BinaryProblem { vars, constraints, weight: WeightPolynomial::from_terms(terms, Rational::zero()) }
}

/// Coefficients of the reduced weight `w = c_I - C` over the leading
/// `(n-1) x (n-1)` block, variable `x*(n-1)+i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedCoefficients {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub c_i: Rational,
    pub linear: Vec<String>,
    /// `(u, v, w)` with `u < v` in different rows and columns.
    pub quadratic: Vec<(usize, usize, String)>,
    #[serde(skip)]
    lin: Vec<Rational>,
    #[serde(skip)]
    quad: HashMap<(usize, usize), Rational>,
}

impl ReducedCoefficients {
    pub fn m(&self) -> usize {
        self.n - 1
    }

    pub fn w_lin(&self, x: usize, i: usize) -> Rational {
        self.lin[x * self.m() + i].clone()
    }

    /// Symmetric pair coefficient; zero for pairs sharing a row or a column.
    pub fn w_quad(&self, x: usize, i: usize, y: usize, j: usize) -> Rational {
        let m = self.m();
        let (u, v) = (x * m + i, y * m + j);
        let key = if u < v { (u, v) } else { (v, u) };
        self.quad.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// `max_{x,i} |w_xi| + sum_{y,j} |w_xi,yj|`.
    pub fn wire_bound(&self) -> Rational {
        let m = self.m();
        let mut best = Rational::zero();
        for x in 0..m {
            for i in 0..m {
                let mut s = self.w_lin(x, i).abs();
                for y in 0..m {
                    for j in 0..m {
                        s += self.w_quad(x, i, y, j).abs();
                    }
                }
                if s > best {
                    best = s;
                }
            }
        }
        best
    }
}

/// Canonical variable `(a, k)` as an affine expression of reduced variables.
fn substitution(n: usize, a: usize, k: usize) -> Vec<(Option<usize>, Rational)> {
    let m = n - 1;
    let one = Rational::one();
    match (a < m, k < m) {
        (true, true) => vec![(Some(a * m + k), one)],
        (true, false) => {
            let mut v = vec![(None, one.clone())];
            v.extend((0..m).map(|i| (Some(a * m + i), -one.clone())));
            v
        }
        (false, true) => {
            let mut v = vec![(None, one.clone())];
            v.extend((0..m).map(|x| (Some(x * m + k), -one.clone())));
            v
        }
        (false, false) => {
            let mut v = vec![(None, rational::int(2 - n as i64))];
            v.extend((0..m * m).map(|u| (Some(u), one.clone())));
            v
        }
    }
}

/// Reduced formulation: row sums `<= 1`, column sums `<= 1`, total `>= n-2`,
/// weight obtained by substituting the eliminated variables into `C`.
/// Pair terms that vanish on every feasible point (shared row or column) are dropped.
pub fn reduced_formulation(inst: &QapInstance) -> (BinaryProblem, ReducedCoefficients) {
    let n = inst.n;
    let m = n - 1;
    let nv = m * m;
    let subs: Vec<Vec<Vec<(Option<usize>, Rational)>>> =
        (0..n).map(|a| (0..n).map(|k| substitution(n, a, k)).collect()).collect();
    let mut constant = Rational::zero();
    let mut lin = vec![Rational::zero(); nv];
    let mut quad: HashMap<(usize, usize), Rational> = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            if inst.f[a][b].is_zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let c = &inst.f[a][b] * &inst.d[k][l];
                    if c.is_zero() {
                        continue;
                    }
                    for (u, cu) in &subs[a][k] {
                        let cuc = &c * cu;
                        for (v, cv) in &subs[b][l] {
                            let t = &cuc * cv;
                            match (u, v) {
                                (None, None) => constant += t,
                                (Some(u), None) | (None, Some(u)) => lin[*u] += t,
                                (Some(u), Some(v)) if u == v => lin[*u] += t,
                                (Some(u), Some(v)) => {
                                    let key = if u < v { (*u, *v) } else { (*v, *u) };
                                    *quad.entry(key).or_insert_with(Rational::zero) += t;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    quad.retain(|&(u, v), w| u / m != v / m && u % m != v % m && !w.is_zero());
    let lin: Vec<Rational> = lin.into_iter().map(|v| -v).collect();
    for w in quad.values_mut() {
        *w = -w.clone();
    }
    let mut qlist: Vec<(usize, usize, Rational)> = quad.iter().map(|(&(u, v), w)| (u, v, w.clone())).collect();
    qlist.sort_by_key(|q| (q.0, q.1));
    let terms = lin
        .iter()
        .enumerate()
        .map(|(u, w)| (vec![u], w.clone()))
        .chain(qlist.iter().map(|(u, v, w)| (vec![*u, *v], w.clone())));
    let weight = WeightPolynomial::from_terms(terms, Rational::zero());
    let vars = (0..m).flat_map(|x| (0..m).map(move |i| format!("p{}_{}", x + 1, i + 1))).collect();
    let mut constraints = Vec::new();
    for x in 0..m {
        constraints.push(Constraint::sum_le((0..m).map(|i| x * m + i).collect(), 1));
    }
    for i in 0..m {
        constraints.push(Constraint::sum_le((0..m).map(|x| x * m + i).collect(), 1));
    }
    constraints.push(Constraint::sum_ge((0..nv).collect(), n as i64 - 2));
    let coeffs = ReducedCoefficients {
        n,
        c_i: constant,
        linear: lin.iter().map(rational::fmt_rational).collect(),
        quadratic: qlist.iter().map(|(u, v, w)| (*u, *v, rational::fmt_rational(w))).collect(),
        lin,
        quad,
    };
    (BinaryProblem { vars, constraints, weight }, coeffs)
}

/// Maps reduced assignments to full permutation matrices by completing the last
/// row and column.
pub fn reduced_to_canonical_map(n: usize) -> VariableMap {
    let targets = (0..n)
        .flat_map(|a| (0..n).map(move |k| (a, k)))
        .map(|(a, k)| {
            let s = substitution(n, a, k);
            let constant = s.iter().filter(|(v, _)| v.is_none()).map(|(_, c)| c.clone()).sum();
            AffineExpr { constant, terms: s.into_iter().filter_map(|(v, c)| v.map(|v| (v, c))).collect() }
        })
        .collect();
    VariableMap { targets }
}

/// Agreement of the symbolic coefficients with the hand-derived closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub pairs_checked: usize,
    /// `-(f'_xy d'_yj + f'_yx d'_ji)` as printed.
    pub quad_printed_mismatches: usize,
    /// `-(f'_xy d'_ij + f'_yx d'_ji)`.
    pub quad_index_fixed_mismatches: usize,
    pub linear_checked: usize,
    pub linear_mismatches: usize,
}

pub fn closed_form_comparison(inst: &QapInstance, coeffs: &ReducedCoefficients) -> ClosedFormReport {
    let n = inst.n;
    let m = n - 1;
    let (f, d) = (&inst.f, &inst.d);
    let fp = |x: usize, y: usize| &f[x][y] - &f[x][m] - &f[m][y] + &f[m][m];
    let dp = |i: usize, j: usize| &d[i][j] - &d[i][m] - &d[m][j] + &d[m][m];
    let mut rep = ClosedFormReport {
        pairs_checked: 0,
        quad_printed_mismatches: 0,
        quad_index_fixed_mismatches: 0,
        linear_checked: 0,
        linear_mismatches: 0,
    };
    for x in 0..m {
        for y in x + 1..m {
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let got = coeffs.w_quad(x, i, y, j);
                    let printed = -(fp(x, y) * dp(y, j) + fp(y, x) * dp(j, i));
                    let fixed = -(fp(x, y) * dp(i, j) + fp(y, x) * dp(j, i));
                    rep.pairs_checked += 1;
                    rep.quad_printed_mismatches += usize::from(printed != got);
                    rep.quad_index_fixed_mismatches += usize::from(fixed != got);
                }
            }
        }
    }
    for x in 0..m {
        for i in 0..m {
            let mut w = -rational::int(2) * fp(x, x) * dp(i, i);
            for k in 0..n {
                w += fp(x, k) * dp(i, k) - (&f[x][k] - &f[x][m]) * (&d[i][k] - &d[m][k]);
                w += fp(k, x) * dp(k, i) - (&f[k][x] - &f[m][x]) * (&d[k][i] - &d[k][m]);
            }
            rep.linear_checked += 1;
            rep.linear_mismatches += usize::from(w != coeffs.w_lin(x, i));
        }
    }
    rep
}
