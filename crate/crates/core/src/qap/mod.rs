//! Quadratic assignment instances, their binary formulations and their circuits.

mod circuits;
mod formulation;

pub use circuits::{naive_circuit, reduced_circuit, Layout, QapCircuit};
pub use formulation::{
    canonical_formulation, closed_form_comparison, reduced_formulation, reduced_to_canonical_map, ClosedFormReport,
    ReducedCoefficients,
};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QapInstance {
    pub n: usize,
    /// Flow between facilities.
    #[serde(with = "matrix_str")]
    pub f: Vec<Vec<Rational>>,
    /// Distance between locations.
    #[serde(with = "matrix_str")]
    pub d: Vec<Vec<Rational>>,
}

mod matrix_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(rational::fmt_rational).collect()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let v = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        v.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| match x {
                        serde_json::Value::String(s) => rational::parse_rational(&s, false),
                        serde_json::Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().unwrap())),
                        other => Err(format!("matrix entries must be rational strings or integers, got {other}")),
                    })
                    .collect::<std::result::Result<Vec<_>, String>>()
            })
            .collect::<std::result::Result<_, String>>()
            .map_err(serde::de::Error::custom)
    }
}

impl QapInstance {
    pub fn new(f: Vec<Vec<Rational>>, d: Vec<Vec<Rational>>) -> Result<Self> {
        let n = f.len();
        let inst = QapInstance { n, f, d };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Instance("n must be at least 1".into()));
        }
        for (name, m) in [("F", &self.f), ("D", &self.d)] {
            if m.len() != self.n || m.iter().any(|r| r.len() != self.n) {
                return Err(Error::Instance(format!("{name} is not {0}x{0}", self.n)));
            }
        }
        Ok(())
    }

    pub fn from_ints(f: &[Vec<i64>], d: &[Vec<i64>]) -> Result<Self> {
        let conv = |m: &[Vec<i64>]| m.iter().map(|r| r.iter().map(|&v| rational::int(v)).collect()).collect();
        Self::new(conv(f), conv(d))
    }

    pub fn swapped(&self) -> Self {
        QapInstance { n: self.n, f: self.d.clone(), d: self.f.clone() }
    }

    /// `C(P) = sum f[x][y] d[P(x)][P(y)]`.
    pub fn cost(&self, p: &Placement) -> Rational {
        let mut c = Rational::zero();
        for x in 0..self.n {
            for y in 0..self.n {
                c += &self.f[x][y] * &self.d[p.loc[x]][p.loc[y]];
            }
        }
        c
    }

    /// Integer copies of `F` and `D` scaled by their denominators' lcm, when they fit.
    pub fn integer_view(&self) -> Option<IntegerView> {
        let sf = rational::lcm_of_denoms(self.f.iter().flatten());
        let sd = rational::lcm_of_denoms(self.d.iter().flatten());
        let conv = |m: &Vec<Vec<Rational>>, s: &BigInt| -> Option<Vec<i64>> {
            m.iter().flatten().map(|v| rational::scaled_i128(v, s).and_then(|x| i64::try_from(x).ok())).collect()
        };
        let f = conv(&self.f, &sf)?;
        let d = conv(&self.d, &sd)?;
        let fm = f.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let dm = d.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let n = self.n as u128;
        // Every partial sum stays below i128::MAX.
        if fm.checked_mul(dm)?.checked_mul(n * n)? >= i128::MAX as u128 {
            return None;
        }
        Some(IntegerView { n: self.n, f, d, scale: Rational::from_integer(sf * sd) })
    }
}

/// Exact integer form of an instance: true cost = integer cost / `scale`.
#[derive(Clone, Debug)]
pub struct IntegerView {
    pub n: usize,
    pub f: Vec<i64>,
    pub d: Vec<i64>,
    pub scale: Rational,
}

impl IntegerView {
    pub fn cost(&self, loc: &[usize]) -> i128 {
        let n = self.n;
        let mut c: i128 = 0;
        for x in 0..n {
            let fx = &self.f[x * n..x * n + n];
            let dx = &self.d[loc[x] * n..loc[x] * n + n];
            for y in 0..n {
                c += fx[y] as i128 * dx[loc[y]] as i128;
            }
        }
        c
    }

    pub fn to_rational(&self, c: i128) -> Rational {
        Rational::from_integer(BigInt::from(c)) / &self.scale
    }
}

/// A bijection facilities to locations: `loc[x]` is the location of facility `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Placement {
    pub loc: Vec<usize>,
}

impl Placement {
    pub fn new(loc: Vec<usize>) -> Result<Self> {
        let n = loc.len();
        let mut seen = vec![false; n];
        for &l in &loc {
            if l >= n || seen[l] {
                return Err(Error::Instance(format!("{loc:?} is not a permutation")));
            }
            seen[l] = true;
        }
        Ok(Placement { loc })
    }

    pub fn identity(n: usize) -> Self {
        Placement { loc: (0..n).collect() }
    }

    /// Row-major permutation matrix `pi[x*n + i] = (loc[x] == i)`.
    pub fn to_matrix(&self) -> Vec<bool> {
        let n = self.loc.len();
        let mut m = vec![false; n * n];
        for (x, &i) in self.loc.iter().enumerate() {
            m[x * n + i] = true;
        }
        m
    }

    pub fn from_matrix(n: usize, m: &[bool]) -> Option<Self> {
        let mut loc = vec![usize::MAX; n];
        for x in 0..n {
            let ones: Vec<usize> = (0..n).filter(|&i| m[x * n + i]).collect();
            if ones.len() != 1 {
                return None;
            }
            loc[x] = ones[0];
        }
        Placement::new(loc).ok()
    }

    /// Leading `(n-1) x (n-1)` block of the permutation matrix.
    pub fn to_reduced(&self) -> Vec<bool> {
        let n = self.loc.len();
        let m = n - 1;
        let mut v = vec![false; m * m];
        for x in 0..m {
            if self.loc[x] < m {
                v[x * m + self.loc[x]] = true;
            }
        }
        v
    }

    /// Completes a reduced assignment to the unique permutation extending it.
    pub fn from_reduced(n: usize, bits: &[bool]) -> Option<Self> {
        let m = n - 1;
        let mut loc = vec![m; n];
        let mut used = vec![false; n];
        for x in 0..m {
            let ones: Vec<usize> = (0..m).filter(|&i| bits[x * m + i]).collect();
            match ones.len() {
                0 => {}
                1 => {
                    loc[x] = ones[0];
                    if used[ones[0]] {
                        return None;
                    }
                    used[ones[0]] = true;
                }
                _ => return None,
            }
        }
        let free: Vec<usize> = (0..m).filter(|&i| !used[i]).collect();
        match free.len() {
            0 => loc[m] = m,
            1 => loc[m] = free[0],
            _ => return None,
        }
        Placement::new(loc).ok()
    }

    /// One-based rendering, e.g. `[2, 1, 3]`.
    pub fn one_based(&self) -> Vec<usize> {
        self.loc.iter().map(|l| l + 1).collect()
    }
}

/// Random instance with integer entries in `0..=max_entry`, from a seeded ChaCha stream.
pub fn random_instance(n: usize, max_entry: i64, rng: &mut ChaCha8Rng) -> QapInstance {
    let mut m = || -> Vec<Vec<Rational>> {
        (0..n).map(|_| (0..n).map(|_| rational::int(rng.gen_range(0..=max_entry))).collect()).collect()
    };
    let f = m();
    let d = m();
    QapInstance { n, f, d }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_f64_matrix(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_round_trip_all_perms_n4() {
        let mut p: Vec<usize> = (0..4).collect();
        let mut count = 0;
        loop {
            let pl = Placement::new(p.clone()).unwrap();
            assert_eq!(Placement::from_reduced(4, &pl.to_reduced()), Some(pl.clone()));
            assert_eq!(Placement::from_matrix(4, &pl.to_matrix()), Some(pl));
            count += 1;
            if !crate::oracle::next_permutation(&mut p) {
                break;
            }
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn integer_view_matches_rational_cost() {
        let mut rng = seeded_rng(3);
        let inst = random_instance(4, 9, &mut rng);
        let iv = inst.integer_view().unwrap();
        let p = Placement::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(iv.to_rational(iv.cost(&p.loc)), inst.cost(&p));
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(QapInstance::from_ints(&[], &[]).is_err());
        assert!(QapInstance::from_ints(&[vec![1]], &[vec![1]]).is_ok());
        assert!(QapInstance::from_ints(&[vec![1, 2], vec![3]], &[vec![1, 2], vec![3, 4]]).is_err());
    }
}
