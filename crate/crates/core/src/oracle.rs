//! Exhaustive QAP oracle over all `n!` placements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qap::{Placement, QapInstance};
use crate::rational::{self, Rational};

pub const MAX_ORACLE_N: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Lexicographically smallest optimal placement.
    pub placement: Placement,
    #[serde(with = "rational::serde_str")]
    pub cost: Rational,
    pub optimal_count: usize,
    pub evaluated: usize,
}

/// Advances to the next permutation in lexicographic order; false after the last.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn brute_force(inst: &QapInstance) -> Result<OracleResult> {
    inst.validate()?;
    if inst.n > MAX_ORACLE_N {
        return Err(Error::CapExceeded { what: "oracle size n", size: inst.n, cap: MAX_ORACLE_N });
    }
    let mut p: Vec<usize> = (0..inst.n).collect();
    let mut evaluated = 0usize;
    let mut count = 0usize;
    if let Some(iv) = inst.integer_view() {
        let mut best: Option<(i128, Vec<usize>)> = None;
        loop {
            let c = iv.cost(&p);
            evaluated += 1;
            match &best {
                Some((b, _)) if c > *b => {}
                Some((b, _)) if c == *b => count += 1,
                _ => {
                    best = Some((c, p.clone()));
                    count = 1;
                }
            }
            if !next_permutation(&mut p) {
                break;
            }
        }
        let (c, loc) = best.expect("at least one permutation");
        return Ok(OracleResult { placement: Placement { loc }, cost: iv.to_rational(c), optimal_count: count, evaluated });
    }
    let mut best: Option<(Rational, Vec<usize>)> = None;
    loop {
        let c = inst.cost(&Placement { loc: p.clone() });
        evaluated += 1;
        match &best {
            Some((b, _)) if c > *b => {}
            Some((b, _)) if c == *b => count += 1,
            _ => {
                best = Some((c, p.clone()));
                count = 1;
            }
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    let (cost, loc) = best.expect("at least one permutation");
    Ok(OracleResult { placement: Placement { loc }, cost, optimal_count: count, evaluated })
}
