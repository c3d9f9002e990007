//! The parameter data `(E, B)`: roots of unity `eps_j = exp(2 pi i m_j/d_j)`
//! and `beta_jk = exp(2 pi i m_jk/d_jk)`, with mode flags.
//!
//! Generator indices are 0-based in this API and 1-based in JSON.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A root of unity `exp(2 pi i m/d)` kept as a reduced fraction. The
/// numerator is not reduced modulo `d`: the q-deformation and the Poisson
/// bracket depend on the representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frac {
    pub m: i64,
    pub d: u32,
}

impl Frac {
    pub const ONE: Frac = Frac { m: 0, d: 1 };

    pub fn new(m: i64, d: i64) -> Result<Self> {
        if d <= 0 {
            return Err(Error::InvalidParams(format!("denominator {d} must be positive")));
        }
        if m == 0 {
            return Ok(Frac::ONE);
        }
        let g = m.gcd(&d);
        Ok(Frac {
            m: m / g,
            d: (d / g) as u32,
        })
    }

    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new(self.m, self.d as i64)
    }

    pub fn neg(&self) -> Frac {
        Frac { m: -self.m, d: self.d }
    }

    /// Exponent of this root with respect to a primitive `big_d`-th root.
    pub fn exponent(&self, big_d: u32) -> i64 {
        debug_assert_eq!(big_d % self.d, 0);
        self.m * (big_d / self.d) as i64
    }
}

/// Mode flags selecting the coefficient ring of the algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Mode {
    /// Replace `z_0 = 1` by a central indeterminate `c`.
    pub c_formal: bool,
    /// Replace every root by a power of an indeterminate `q`.
    pub q_deformed: bool,
    /// Names of invertible formal scalars available in the coefficient ring.
    pub formal_units: Vec<String>,
}

/// Which generator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gen {
    X,
    Y,
}

/// `(b_1..b_n, a_1..a_n)`: the normal monomial `y^b x^a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpVec {
    pub b: Vec<u32>,
    pub a: Vec<u32>,
}

impl ExpVec {
    pub fn zero(n: usize) -> Self {
        ExpVec {
            b: vec![0; n],
            a: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.b.iter().chain(&self.a).sum()
    }

    /// The Z^n-degree `b - a`.
    pub fn grading(&self) -> Vec<i64> {
        self.b.iter().zip(&self.a).map(|(&b, &a)| b as i64 - a as i64).collect()
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec {
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }
}

/// On-disk form of [`WeylParams`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawParams {
    pub n: usize,
    pub eps: Vec<[i64; 2]>,
    #[serde(default)]
    pub beta: Vec<[i64; 4]>,
    #[serde(default)]
    pub mode: Mode,
}

/// Validated parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylParams {
    n: usize,
    eps: Vec<Frac>,
    beta: Vec<Vec<Frac>>,
    big_d: u32,
    mode: Mode,
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl WeylParams {
    pub fn validate(raw: &RawParams) -> Result<Self> {
        let n = raw.n;
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if raw.eps.len() != n {
            return Err(Error::InvalidParams(format!(
                "expected {n} eps entries, found {}",
                raw.eps.len()
            )));
        }
        let mut eps = Vec::with_capacity(n);
        for (j, &[m, d]) in raw.eps.iter().enumerate() {
            let f = Frac::new(m, d)?;
            if f.d < 2 {
                return Err(Error::AssumptionViolated { index: j + 1 });
            }
            eps.push(f);
        }
        let mut given: Vec<Vec<Option<Frac>>> = vec![vec![None; n]; n];
        for &[j, k, m, d] in &raw.beta {
            for idx in [j, k] {
                if idx < 1 || idx as usize > n {
                    return Err(Error::IndexOutOfRange {
                        index: idx.max(0) as usize,
                        n,
                    });
                }
            }
            let (j, k) = (j as usize - 1, k as usize - 1);
            let f = Frac::new(m, d)?;
            if j == k && f != Frac::ONE {
                return Err(Error::NotSkewSymmetric { j: j + 1, k: k + 1 });
            }
            if let Some(prev) = given[j][k] {
                if prev.ratio() != f.ratio() {
                    return Err(Error::InvalidParams(format!(
                        "conflicting beta entries for ({}, {})",
                        j + 1,
                        k + 1
                    )));
                }
            }
            given[j][k] = Some(f);
        }
        let mut beta = vec![vec![Frac::ONE; n]; n];
        for j in 0..n {
            for k in j + 1..n {
                let f = match (given[j][k], given[k][j]) {
                    (Some(a), Some(b)) => {
                        if !(a.ratio() + b.ratio()).is_integer() {
                            return Err(Error::NotSkewSymmetric { j: j + 1, k: k + 1 });
                        }
                        a
                    }
                    (Some(a), None) => a,
                    (None, Some(b)) => b.neg(),
                    (None, None) => Frac::ONE,
                };
                beta[j][k] = f;
                beta[k][j] = f.neg();
            }
        }
        let mut big_d = 1;
        for f in &eps {
            big_d = lcm(big_d, f.d);
        }
        for row in &beta {
            for f in row {
                big_d = lcm(big_d, f.d);
            }
        }
        let mut seen = std::collections::HashSet::new();
        for u in &raw.mode.formal_units {
            let ok = !u.is_empty()
                && u.chars().next().unwrap().is_ascii_alphabetic()
                && u.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || !seen.insert(u.clone()) || is_reserved_name(u) {
                return Err(Error::InvalidParams(format!("bad formal unit name `{u}`")));
            }
        }
        Ok(WeylParams {
            n,
            eps,
            beta,
            big_d,
            mode: raw.mode.clone(),
        })
    }

    /// Convenience constructor: `eps` as `(m, d)` pairs, `beta` as
    /// `(j, k, m, d)` with 0-based `j < k`.
    pub fn new(eps: &[(i64, i64)], beta: &[(usize, usize, i64, i64)]) -> Result<Self> {
        Self::validate(&RawParams {
            n: eps.len(),
            eps: eps.iter().map(|&(m, d)| [m, d]).collect(),
            beta: beta
                .iter()
                .map(|&(j, k, m, d)| [j as i64 + 1, k as i64 + 1, m, d])
                .collect(),
            mode: Mode::default(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawParams = serde_json::from_str(text)?;
        Self::validate(&raw)
    }

    pub fn to_raw(&self) -> RawParams {
        let mut beta = Vec::new();
        for j in 0..self.n {
            for k in j + 1..self.n {
                let f = self.beta[j][k];
                if f != Frac::ONE {
                    beta.push([j as i64 + 1, k as i64 + 1, f.m, f.d as i64]);
                }
            }
        }
        RawParams {
            n: self.n,
            eps: self.eps.iter().map(|f| [f.m, f.d as i64]).collect(),
            beta,
            mode: self.mode.clone(),
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        let mut raw = self.to_raw();
        raw.mode = mode;
        Self::validate(&raw)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self, j: usize) -> Frac {
        self.eps[j]
    }

    pub fn beta(&self, j: usize, k: usize) -> Frac {
        self.beta[j][k]
    }

    pub fn d(&self, j: usize) -> u32 {
        self.eps[j].d
    }

    pub fn m(&self, j: usize) -> i64 {
        self.eps[j].m
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    /// `D(E, B)`: the lcm of all denominators.
    pub fn big_d(&self) -> u32 {
        self.big_d
    }

    /// `d_j | d_l` and `d_jk | d_l` for all `j <= l` and all `k`.
    pub fn is_free_over_center(&self) -> bool {
        let n = self.n;
        for l in 0..n {
            for j in 0..=l {
                if !self.d(l).is_multiple_of(self.d(j)) {
                    return false;
                }
                for k in 0..n {
                    if !self.d(l).is_multiple_of(self.beta[j][k].d) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Reduced denominator of `m_j/d_j + m_jk/d_jk`, taken with `j < k`
    /// (and `d'_kj := d'_jk`).
    pub fn d_prime(&self, j: usize, k: usize) -> Result<u32> {
        self.check_index(j)?;
        self.check_index(k)?;
        if j == k {
            return Err(Error::InvalidParams("d' is defined only for j != k".into()));
        }
        let (j, k) = (j.min(k), j.max(k));
        let s = self.eps[j].ratio() + self.beta[j][k].ratio();
        Ok(*s.denom() as u32)
    }

    /// Smallest `L` with `x_j^L` (resp. `y_j^L`) central.
    pub fn min_central_power(&self, j: usize, which: Gen) -> u32 {
        let mut l = self.d(j);
        for k in (0..self.n).filter(|&k| k != j) {
            let dk = match which {
                Gen::X => self.d_prime(j, k).expect("valid indices"),
                Gen::Y => self.beta[j][k].d,
            };
            l = lcm(l, dk);
        }
        l
    }

    /// Smallest `L` making both `x_j^L` and `y_j^L` central.
    pub fn min_central_pair(&self, j: usize) -> u32 {
        lcm(self.min_central_power(j, Gen::X), self.min_central_power(j, Gen::Y))
    }

    /// Checks that every `L_j` gives central `x_j^{L_j}` and `y_j^{L_j}`.
    pub fn check_central_powers(&self, l: &[u32]) -> Result<()> {
        if l.len() != self.n {
            return Err(Error::InvalidParams(format!(
                "expected {} exponents L, found {}",
                self.n,
                l.len()
            )));
        }
        for (j, &lj) in l.iter().enumerate() {
            let req = self.min_central_pair(j);
            if lj == 0 || lj % req != 0 {
                return Err(Error::NonCentralPower {
                    index: j + 1,
                    value: lj,
                    required: req,
                });
            }
        }
        Ok(())
    }

    /// Membership in the exponent set `C(E, B)` indexing the center.
    pub fn in_ceb(&self, e: &ExpVec) -> bool {
        let n = self.n;
        let diff = e.grading();
        for j in 0..n {
            if diff[j].rem_euclid(self.d(j) as i64) != 0 {
                return false;
            }
        }
        for k in 0..n {
            let mut s = Ratio::from_integer(0i64);
            for j in 0..n {
                s += self.beta[j][k].ratio() * diff[j];
            }
            let tail: i64 = e.a[k..].iter().map(|&x| x as i64).sum();
            s += self.eps[k].ratio() * tail;
            if !s.is_integer() {
                return false;
            }
        }
        true
    }

    pub fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j + 1, n: self.n });
        }
        Ok(())
    }

    /// Exponent of `eps_j` with respect to a primitive `big_d`-th root;
    /// `big_d` must be a multiple of `d_j`.
    pub fn eps_exponent(&self, j: usize, big_d: u32) -> i64 {
        self.eps[j].exponent(big_d)
    }

    pub fn beta_exponent(&self, j: usize, k: usize, big_d: u32) -> i64 {
        self.beta[j][k].exponent(big_d)
    }

    /// Root order used when the algebra is q-deformed: `d_n`, provided every
    /// exponent `d_n m/d` is integral.
    pub fn q_order(&self) -> Result<u32> {
        let dn = self.d(self.n - 1) as i64;
        let check = |f: Frac| -> Result<()> {
            if dn % f.d as i64 != 0 {
                Err(Error::NonIntegralQExponent {
                    num: dn * f.m,
                    den: f.d as i64,
                })
            } else {
                Ok(())
            }
        };
        for f in &self.eps {
            check(*f)?;
        }
        for row in &self.beta {
            for f in row {
                check(*f)?;
            }
        }
        Ok(dn as u32)
    }
}

pub(crate) fn is_reserved_name(s: &str) -> bool {
    if s == "c" || s == "q" || s == "e" {
        return true;
    }
    let mut it = s.chars();
    match it.next() {
        Some('x' | 'y' | 'z' | 'X' | 'Y' | 'Z') => {
            let rest: String = it.collect();
            !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eps: &[(i64, i64)], beta: &[(usize, usize, i64, i64)]) -> WeylParams {
        WeylParams::new(eps, beta).unwrap()
    }

    #[test]
    fn validation() {
        let a = p(&[(1, 2)], &[]);
        assert_eq!(a.big_d(), 2);
        let b = p(&[(1, 4), (1, 4)], &[]);
        assert!(b.is_free_over_center());
        assert!(matches!(
            WeylParams::new(&[(0, 1)], &[]),
            Err(Error::AssumptionViolated { index: 1 })
        ));
        assert!(matches!(
            WeylParams::new(&[(2, 2)], &[]),
            Err(Error::AssumptionViolated { index: 1 })
        ));
        assert!(matches!(
            WeylParams::new(&[(1, 0)], &[]),
            Err(Error::InvalidParams(_))
        ));
        // reduction keeps the sign of the numerator
        let c = p(&[(2, 6)], &[]);
        assert_eq!(c.eps(0), Frac { m: 1, d: 3 });
        let raw = RawParams {
            n: 2,
            eps: vec![[1, 2], [1, 2]],
            beta: vec![[1, 2, 1, 4], [2, 1, 1, 4]],
            mode: Mode::default(),
        };
        assert!(matches!(
            WeylParams::validate(&raw),
            Err(Error::NotSkewSymmetric { j: 1, k: 2 })
        ));
        let raw = RawParams {
            beta: vec![[1, 2, 1, 4], [2, 1, -1, 4]],
            ..raw
        };
        let v = WeylParams::validate(&raw).unwrap();
        assert_eq!(v.beta(1, 0), Frac { m: -1, d: 4 });
        assert_eq!(v.big_d(), 4);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n":2,"eps":[[1,2],[1,4]],"beta":[[1,2,1,2]],"mode":{"c_formal":true}}"#;
        let a = WeylParams::from_json(text).unwrap();
        assert!(a.mode().c_formal);
        let back = WeylParams::validate(&a.to_raw()).unwrap();
        assert_eq!(a, back);
        assert!(WeylParams::from_json("{\"n\":1}").is_err());
    }

    #[test]
    fn freeness() {
        assert!(p(&[(1, 2)], &[]).is_free_over_center());
        assert!(!p(&[(1, 2), (1, 3)], &[]).is_free_over_center());
        assert!(p(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]).is_free_over_center());
        assert!(!p(&[(1, 2), (1, 2)], &[(0, 1, 1, 4)]).is_free_over_center());
        let q = p(&[(1, 3), (2, 3)], &[]);
        assert!(q.is_free_over_center());
        assert_eq!(q.big_d(), 3);
    }

    #[test]
    fn derived_denominators() {
        assert_eq!(p(&[(1, 2), (1, 2)], &[]).d_prime(0, 1).unwrap(), 2);
        assert_eq!(p(&[(1, 2), (1, 2)], &[(0, 1, 1, 2)]).d_prime(0, 1).unwrap(), 1);
        assert_eq!(p(&[(1, 4), (1, 4)], &[(0, 1, 1, 4)]).d_prime(0, 1).unwrap(), 2);
        assert_eq!(p(&[(1, 4), (1, 4)], &[(0, 1, 1, 4)]).d_prime(1, 0).unwrap(), 2);
        assert!(p(&[(1, 2), (1, 2)], &[]).d_prime(0, 0).is_err());
    }

    #[test]
    fn central_powers() {
        let a = p(&[(1, 2)], &[]);
        assert_eq!(a.min_central_power(0, Gen::X), 2);
        assert_eq!(a.min_central_power(0, Gen::Y), 2);
        let b = p(&[(1, 2), (1, 2)], &[(0, 1, 1, 2)]);
        assert_eq!(b.min_central_power(0, Gen::Y), 2);
        assert_eq!(b.min_central_power(0, Gen::X), 2);
        let c = p(&[(1, 2), (1, 4)], &[]);
        assert_eq!(c.min_central_power(0, Gen::X), 2);
        assert_eq!(c.min_central_power(1, Gen::X), 4);
        assert!(c.check_central_powers(&[2, 4]).is_ok());
        assert!(c.check_central_powers(&[2, 8]).is_ok());
        assert!(matches!(
            c.check_central_powers(&[2, 2]),
            Err(Error::NonCentralPower { index: 2, .. })
        ));
    }

    #[test]
    fn ceb_membership() {
        let a = p(&[(1, 2)], &[]);
        let e = |b: &[u32], x: &[u32]| ExpVec { b: b.to_vec(), a: x.to_vec() };
        assert!(a.in_ceb(&e(&[2], &[0])));
        assert!(!a.in_ceb(&e(&[1], &[1])));
        assert!(a.in_ceb(&e(&[0], &[0])));
        assert!(a.in_ceb(&e(&[2], &[2])));
        // beta = 1, d = (2, 3): y1 x1 x2^3 is central, x2^3 alone is not
        let b = p(&[(1, 2), (1, 3)], &[]);
        assert!(b.in_ceb(&e(&[1, 0], &[1, 3])));
        assert!(!b.in_ceb(&e(&[0, 0], &[0, 3])));
        assert!(b.in_ceb(&e(&[0, 3], &[0, 0])));
        assert!(b.in_ceb(&e(&[0, 0], &[0, 6])));
    }

    #[test]
    fn q_order() {
        assert_eq!(p(&[(1, 2), (1, 4)], &[]).q_order().unwrap(), 4);
        assert!(matches!(
            p(&[(1, 2), (1, 3)], &[]).q_order(),
            Err(Error::NonIntegralQExponent { .. })
        ));
    }

    #[test]
    fn free_implies_ceb_identity() {
        // Under freeness, C(E,B) consists of vectors with d_j | a_j, b_j.
        for params in [
            p(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]),
            p(&[(1, 3), (1, 3)], &[]),
            p(&[(1, 2), (1, 2)], &[(0, 1, 1, 2)]),
        ] {
            for code in 0..(6u32.pow(4)) {
                let digits: Vec<u32> = (0..4).map(|i| (code / 6u32.pow(i)) % 6).collect();
                let e = ExpVec {
                    b: vec![digits[0], digits[1]],
                    a: vec![digits[2], digits[3]],
                };
                let expect = (0..2).all(|j| e.a[j].is_multiple_of(params.d(j)) && e.b[j].is_multiple_of(params.d(j)));
                assert_eq!(params.in_ceb(&e), expect, "{e:?}");
            }
            for j in 0..2 {
                assert_eq!(params.min_central_power(j, Gen::X), params.d(j));
                assert_eq!(params.min_central_power(j, Gen::Y), params.d(j));
            }
            assert_eq!(params.big_d(), params.d(1));
        }
    }
}
