//! Constrained binary optimization problems and the "encodes" relation.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type Assignment = Vec<bool>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Constraint {
    /// `sum coeffs[k] * x[vars[k]] == bound`
    Eq {
        vars: Vec<usize>,
        #[serde(with = "coeff_vec")]
        coeffs: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        bound: Rational,
    },
    Le {
        vars: Vec<usize>,
        #[serde(with = "coeff_vec")]
        coeffs: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        bound: Rational,
    },
    Ge {
        vars: Vec<usize>,
        #[serde(with = "coeff_vec")]
        coeffs: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        bound: Rational,
    },
    /// The tuple `(x[vars[0]], ..)` must equal one of `rows`.
    Table { vars: Vec<usize>, rows: Vec<Vec<bool>> },
}

mod coeff_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(rational::fmt_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| rational::parse_rational(s, false).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Constraint {
    pub fn sum_eq(vars: Vec<usize>, bound: i64) -> Self {
        let coeffs = vec![Rational::one(); vars.len()];
        Constraint::Eq { vars, coeffs, bound: rational::int(bound) }
    }

    pub fn sum_le(vars: Vec<usize>, bound: i64) -> Self {
        let coeffs = vec![Rational::one(); vars.len()];
        Constraint::Le { vars, coeffs, bound: rational::int(bound) }
    }

    pub fn sum_ge(vars: Vec<usize>, bound: i64) -> Self {
        let coeffs = vec![Rational::one(); vars.len()];
        Constraint::Ge { vars, coeffs, bound: rational::int(bound) }
    }

    pub fn vars(&self) -> &[usize] {
        match self {
            Constraint::Eq { vars, .. }
            | Constraint::Le { vars, .. }
            | Constraint::Ge { vars, .. }
            | Constraint::Table { vars, .. } => vars,
        }
    }

    pub fn holds(&self, x: &[bool]) -> bool {
        self.feasible(&|v| Some(x[v]))
    }

    /// Whether some completion of the partial assignment can satisfy this constraint.
    fn feasible(&self, val: &dyn Fn(usize) -> Option<bool>) -> bool {
        match self {
            Constraint::Table { vars, rows } => rows.iter().any(|row| {
                vars.iter().zip(row).all(|(&v, &b)| val(v).is_none_or(|a| a == b))
            }),
            Constraint::Eq { vars, coeffs, bound }
            | Constraint::Le { vars, coeffs, bound }
            | Constraint::Ge { vars, coeffs, bound } => {
                let mut lo = Rational::zero();
                let mut hi = Rational::zero();
                for (&v, c) in vars.iter().zip(coeffs) {
                    match val(v) {
                        Some(true) => {
                            lo += c;
                            hi += c;
                        }
                        Some(false) => {}
                        None if *c > Rational::zero() => hi += c,
                        None => lo += c,
                    }
                }
                match self {
                    Constraint::Eq { .. } => lo <= *bound && *bound <= hi,
                    Constraint::Le { .. } => lo <= *bound,
                    _ => hi >= *bound,
                }
            }
        }
    }

    fn validate(&self, num_vars: usize) -> Result<()> {
        if let Some(&v) = self.vars().iter().find(|&&v| v >= num_vars) {
            return Err(Error::Problem(format!("constraint references variable {v} of {num_vars}")));
        }
        match self {
            Constraint::Table { vars, rows } => {
                if rows.iter().any(|r| r.len() != vars.len()) {
                    return Err(Error::Problem("table row length differs from its scope".into()));
                }
            }
            Constraint::Eq { vars, coeffs, .. }
            | Constraint::Le { vars, coeffs, .. }
            | Constraint::Ge { vars, coeffs, .. } => {
                if vars.len() != coeffs.len() {
                    return Err(Error::Problem("coefficient count differs from scope".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub vars: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
}

/// Multilinear polynomial over binary variables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightPolynomial {
    pub monomials: Vec<Monomial>,
    #[serde(with = "rational::serde_str")]
    pub constant: Rational,
}

impl WeightPolynomial {
    /// Builds a normalized polynomial: repeated variables collapse (x*x = x),
    /// like terms merge, zero terms vanish, monomials sort by variable list.
    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<usize>, Rational)>, constant: Rational) -> Self {
        let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        let mut constant = constant;
        for (mut vars, c) in terms {
            vars.sort_unstable();
            vars.dedup();
            if vars.is_empty() {
                constant += c;
            } else {
                *acc.entry(vars).or_insert_with(Rational::zero) += c;
            }
        }
        let monomials = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(vars, coeff)| Monomial { vars, coeff })
            .collect();
        WeightPolynomial { monomials, constant }
    }

    pub fn evaluate(&self, x: &[bool]) -> Rational {
        let mut s = self.constant.clone();
        for m in &self.monomials {
            if m.vars.iter().all(|&v| x[v]) {
                s += &m.coeff;
            }
        }
        s
    }

    pub fn coeff(&self, vars: &[usize]) -> Rational {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.monomials
            .iter()
            .find(|m| m.vars == key)
            .map(|m| m.coeff.clone())
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryProblem {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub weight: WeightPolynomial,
}

impl BinaryProblem {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.constraints {
            c.validate(self.vars.len())?;
        }
        for m in &self.weight.monomials {
            if m.vars.iter().any(|&v| v >= self.vars.len()) {
                return Err(Error::Problem("weight monomial references unknown variable".into()));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, x: &[bool]) -> bool {
        x.len() == self.vars.len() && self.constraints.iter().all(|c| c.holds(x))
    }
}

pub const DEFAULT_VAR_CAP: usize = 24;

/// All valid assignments in lexicographic order (false < true, variable 0 most significant).
///
/// Depth-first with forward feasibility checks, so the cost tracks the number of
/// valid assignments rather than `2^num_vars`.
pub fn enumerate_valid(p: &BinaryProblem, cap: usize) -> Result<Vec<Assignment>> {
    let n = p.num_vars();
    if n > cap {
        return Err(Error::CapExceeded { what: "variable count", size: n, cap });
    }
    p.validate()?;
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in p.constraints.iter().enumerate() {
        let mut vs: Vec<usize> = c.vars().to_vec();
        vs.sort_unstable();
        vs.dedup();
        for v in vs {
            touching[v].push(ci);
        }
    }
    if !p.constraints.iter().all(|c| c.feasible(&|_| None)) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut cur: Vec<Option<bool>> = vec![None; n];
    fn rec(
        p: &BinaryProblem,
        touching: &[Vec<usize>],
        cur: &mut Vec<Option<bool>>,
        i: usize,
        out: &mut Vec<Assignment>,
    ) {
        if i == cur.len() {
            out.push(cur.iter().map(|b| b.unwrap()).collect());
            return;
        }
        for b in [false, true] {
            cur[i] = Some(b);
            let ok = touching[i].iter().all(|&ci| p.constraints[ci].feasible(&|v| cur[v]));
            if ok {
                rec(p, touching, cur, i + 1, out);
            }
        }
        cur[i] = None;
    }
    rec(p, &touching, &mut cur, 0, &mut out);
    Ok(out)
}

/// A target variable as an affine function of source variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "AffineDto", try_from = "AffineDto")]
pub struct AffineExpr {
    pub constant: Rational,
    pub terms: Vec<(usize, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct AffineDto {
    constant: String,
    terms: Vec<(usize, String)>,
}

impl From<AffineExpr> for AffineDto {
    fn from(e: AffineExpr) -> Self {
        AffineDto {
            constant: rational::fmt_rational(&e.constant),
            terms: e.terms.iter().map(|(v, c)| (*v, rational::fmt_rational(c))).collect(),
        }
    }
}

impl TryFrom<AffineDto> for AffineExpr {
    type Error = String;
    fn try_from(d: AffineDto) -> std::result::Result<Self, String> {
        Ok(AffineExpr {
            constant: rational::parse_rational(&d.constant, false)?,
            terms: d
                .terms
                .iter()
                .map(|(v, c)| Ok((*v, rational::parse_rational(c, false)?)))
                .collect::<std::result::Result<_, String>>()?,
        })
    }
}

impl AffineExpr {
    pub fn var(v: usize) -> Self {
        AffineExpr { constant: Rational::zero(), terms: vec![(v, Rational::one())] }
    }

    pub fn eval(&self, x: &[bool]) -> Rational {
        let mut s = self.constant.clone();
        for (v, c) in &self.terms {
            if x[*v] {
                s += c;
            }
        }
        s
    }
}

/// `f: {0,1}^m -> {0,1}^n`, one affine expression per target variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableMap {
    pub targets: Vec<AffineExpr>,
}

impl VariableMap {
    pub fn identity(n: usize) -> Self {
        VariableMap { targets: (0..n).map(AffineExpr::var).collect() }
    }

    /// Projection onto the listed source variables.
    pub fn select(sources: &[usize]) -> Self {
        VariableMap { targets: sources.iter().map(|&v| AffineExpr::var(v)).collect() }
    }

    /// `None` when some target evaluates outside `{0,1}`.
    pub fn apply(&self, x: &[bool]) -> Option<Assignment> {
        self.targets
            .iter()
            .map(|e| {
                let v = e.eval(x);
                if v.is_zero() {
                    Some(false)
                } else if v.is_one() {
                    Some(true)
                } else {
                    None
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EncodingResult {
    /// `w_B(f(x)) = w_A(x) + offset` on every valid `x`.
    Encodes {
        #[serde(with = "rational::serde_str")]
        offset: Rational,
    },
    Fails { witness: Assignment, reason: String },
}

impl EncodingResult {
    pub fn holds(&self) -> bool {
        matches!(self, EncodingResult::Encodes { .. })
    }
}

/// Decides whether `a` encodes `b` under `f`: `f` restricted to `X_A` is onto `X_B`
/// and the weights differ by a constant. Non-injective maps are allowed.
pub fn check_encoding(a: &BinaryProblem, b: &BinaryProblem, f: &VariableMap, cap: usize) -> Result<EncodingResult> {
    if f.targets.len() != b.num_vars() {
        return Err(Error::Problem(format!(
            "map has {} targets but problem B has {} variables",
            f.targets.len(),
            b.num_vars()
        )));
    }
    if f.targets.iter().flat_map(|t| t.terms.iter()).any(|(v, _)| *v >= a.num_vars()) {
        return Err(Error::Problem("map references unknown source variable".into()));
    }
    let xa = enumerate_valid(a, cap)?;
    let xb: BTreeSet<Assignment> = enumerate_valid(b, cap)?.into_iter().collect();
    let mut offset: Option<Rational> = None;
    let mut hit = BTreeSet::new();
    for x in &xa {
        let Some(y) = f.apply(x) else {
            return Ok(EncodingResult::Fails { witness: x.clone(), reason: "map leaves {0,1}".into() });
        };
        if !xb.contains(&y) {
            return Ok(EncodingResult::Fails {
                witness: x.clone(),
                reason: "image of a valid assignment is not valid in B".into(),
            });
        }
        let d = b.weight.evaluate(&y) - a.weight.evaluate(x);
        match &offset {
            None => offset = Some(d),
            Some(o) if *o != d => {
                return Ok(EncodingResult::Fails {
                    witness: x.clone(),
                    reason: format!(
                        "weight offset {} differs from {}",
                        rational::fmt_rational(&d),
                        rational::fmt_rational(o)
                    ),
                });
            }
            Some(_) => {}
        }
        hit.insert(y);
    }
    if let Some(y) = xb.iter().find(|y| !hit.contains(*y)) {
        return Ok(EncodingResult::Fails { witness: y.clone(), reason: "valid assignment of B has no preimage".into() });
    }
    Ok(EncodingResult::Encodes { offset: offset.unwrap_or_else(Rational::zero) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn one_hot(n: usize) -> BinaryProblem {
        BinaryProblem {
            vars: (0..n).map(|i| format!("x{i}")).collect(),
            constraints: vec![Constraint::sum_eq((0..n).collect(), 1)],
            weight: WeightPolynomial::from_terms((0..n).map(|i| (vec![i], int(i as i64))), int(0)),
        }
    }

    #[test]
    fn enumerates_one_hot() {
        let p = one_hot(3);
        let v = enumerate_valid(&p, 24).unwrap();
        assert_eq!(v, vec![vec![false, false, true], vec![false, true, false], vec![true, false, false]]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_valid(&one_hot(5), 4), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn identity_encodes_self() {
        let p = one_hot(4);
        let r = check_encoding(&p, &p, &VariableMap::identity(4), 24).unwrap();
        assert_eq!(r, EncodingResult::Encodes { offset: int(0) });
    }

    #[test]
    fn removing_a_valid_assignment_breaks_encoding() {
        let p = one_hot(3);
        let mut a = p.clone();
        a.constraints.push(Constraint::Table { vars: vec![0], rows: vec![vec![false]] });
        let r = check_encoding(&a, &p, &VariableMap::identity(3), 24).unwrap();
        match r {
            EncodingResult::Fails { witness, .. } => assert_eq!(witness, vec![true, false, false]),
            _ => panic!("expected failure"),
        }
    }

    #[test]
    fn offset_is_reported() {
        let p = one_hot(3);
        let mut b = p.clone();
        b.weight.constant = int(7);
        let r = check_encoding(&p, &b, &VariableMap::identity(3), 24).unwrap();
        assert_eq!(r, EncodingResult::Encodes { offset: int(7) });
    }

    #[test]
    fn polynomial_normalizes() {
        let w = WeightPolynomial::from_terms(
            vec![(vec![1, 0], int(2)), (vec![0, 1, 1], int(3)), (vec![2], int(0)), (vec![], int(4))],
            int(1),
        );
        assert_eq!(w.monomials.len(), 1);
        assert_eq!(w.coeff(&[0, 1]), int(5));
        assert_eq!(w.constant, int(5));
    }

    #[test]
    fn json_round_trip() {
        let p = one_hot(2);
        let s = serde_json::to_string(&p).unwrap();
        let q: BinaryProblem = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
