//! Exact arithmetic in cyclotomic fields `Q(e)` with `e` a primitive `D`-th
//! root of unity.
//!
//! Elements are stored in the power basis `1, e, ..., e^(phi(D)-1)` modulo the
//! cyclotomic polynomial `Phi_D`, which makes equality decidable coefficient by
//! coefficient. Integrality (membership in `Z[e]`) is a property that can be
//! asserted, it is not enforced by the type.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

struct CycloData {
    phi: usize,
    /// Monic `Phi_D`, lowest degree first.
    poly: Vec<i64>,
}

fn cyclo_cache() -> &'static RwLock<HashMap<u32, Arc<CycloData>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<CycloData>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cyclo_data(order: u32) -> Arc<CycloData> {
    assert!(order >= 1, "cyclotomic order must be positive");
    if let Some(d) = cyclo_cache().read().get(&order) {
        return d.clone();
    }
    let poly = cyclotomic_polynomial(order);
    let data = Arc::new(CycloData {
        phi: poly.len() - 1,
        poly,
    });
    cyclo_cache().write().insert(order, data.clone());
    data
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> usize {
    let mut n = n as u64;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

/// Integer coefficients of the `order`-th cyclotomic polynomial, constant term
/// first. Obtained by dividing `t^D - 1` by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(order: u32) -> Vec<i64> {
    assert!(order >= 1, "cyclotomic order must be positive");
    let d = order as usize;
    let mut num = vec![0i64; d + 1];
    num[0] = -1;
    num[d] = 1;
    for k in 1..order {
        if order.is_multiple_of(k) {
            let div = cyclotomic_polynomial(k);
            num = divide_monic_exact(&num, &div);
        }
    }
    num
}

fn divide_monic_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// `e^k = sign * e^exponent` with `0 <= exponent < D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub exponent: u32,
    pub negated: bool,
}

/// An element of `Q(e_D)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycElem {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycElem {
    pub fn zero(order: u32) -> Self {
        let phi = cyclo_data(order).phi;
        CycElem {
            order,
            coeffs: vec![BigRational::zero(); phi],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_int(order, 1)
    }

    pub fn from_int(order: u32, value: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_rational(order: u32, value: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = value;
        z
    }

    /// Builds an element from power-basis coefficients of any length; the
    /// vector is reduced modulo `Phi_D`.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Self {
        let data = cyclo_data(order);
        let mut c = coeffs;
        reduce_in_place(&mut c, &data.poly);
        c.resize(data.phi, BigRational::zero());
        CycElem { order, coeffs: c }
    }

    /// The distinguished primitive root `e = exp(2 pi i / D)`.
    pub fn root(order: u32) -> Self {
        Self::root_power(order, 1)
    }

    /// `e^k` for any integer `k`.
    pub fn root_power(order: u32, k: i64) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Self::from_coeffs(order, c)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Membership in `Z[e]`: the power basis is an integral basis.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycElem {
            order: self.order,
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let phi = self.coeffs.len();
        if phi == 1 {
            return CycElem {
                order: self.order,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            };
        }
        if let Some(r) = other.as_rational() {
            return self.scale(r);
        }
        if let Some(r) = self.as_rational() {
            return other.scale(r);
        }
        let mut prod = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce_in_place(&mut prod, &cyclo_data(self.order).poly);
        prod.truncate(phi);
        CycElem {
            order: self.order,
            coeffs: prod,
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Multiplication by `e^k`, done by shifting rather than a full product.
    pub fn mul_root_power(&self, k: i64) -> Self {
        let shift = k.rem_euclid(self.order as i64) as usize;
        if shift == 0 {
            return self.clone();
        }
        let data = cyclo_data(self.order);
        let phi = data.phi;
        let mut c = self.coeffs.clone();
        for _ in 0..shift {
            let top = std::mem::replace(&mut c[phi - 1], BigRational::zero());
            c.rotate_right(1);
            if !top.is_zero() {
                for (ci, &pi) in c.iter_mut().zip(&data.poly) {
                    if pi != 0 {
                        *ci -= &top * BigRational::from_integer(BigInt::from(pi));
                    }
                }
            }
        }
        CycElem {
            order: self.order,
            coeffs: c,
        }
    }

    pub fn pow(&self, exp: u64) -> Self {
        let mut result = Self::one(self.order);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Integer power; negative exponents need an invertible element.
    pub fn pow_signed(&self, exp: i64) -> Option<Self> {
        if exp >= 0 {
            Some(self.pow(exp as u64))
        } else {
            self.inverse().map(|inv| inv.pow(exp.unsigned_abs()))
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Phi_D`. Returns `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Self::from_rational(self.order, r.recip()));
        }
        let modulus: Vec<BigRational> = cyclo_data(self.order)
            .poly
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        // Invariant: s_i * a == r_i (mod Phi).
        let mut r0 = trim(modulus);
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() != 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            if r1.is_empty() {
                // gcd is nonconstant; impossible for a nonzero element of a field.
                return None;
            }
        }
        let c = r1[0].recip();
        let inv: Vec<BigRational> = s1.into_iter().map(|x| x * &c).collect();
        Some(Self::from_coeffs(self.order, inv))
    }

    /// Recognises `a = +-e^k`. When `D` is even every `-e^k` is itself a power
    /// of `e`, so the sign is only reported for odd `D`.
    pub fn as_root_of_unity(&self) -> Option<RootOfUnity> {
        let neg = -self;
        let mut negated_hit = None;
        for k in 0..self.order {
            let p = Self::root_power(self.order, k as i64);
            if p == *self {
                return Some(RootOfUnity {
                    exponent: k,
                    negated: false,
                });
            }
            if negated_hit.is_none() && p == neg {
                negated_hit = Some(k);
            }
        }
        negated_hit.map(|k| RootOfUnity {
            exponent: k,
            negated: true,
        })
    }

    /// Image under `e_D -> e_target^(target/D)`.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(target, r.clone()));
        }
        if !target.is_multiple_of(self.order) {
            return Err(Error::EmbedOrder {
                from: self.order,
                to: target,
            });
        }
        let step = (target / self.order) as usize;
        let mut c = vec![BigRational::zero(); step * (self.coeffs.len().max(1) - 1) + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i * step] = a.clone();
        }
        Ok(Self::from_coeffs(target, c))
    }

    /// Preimage under [`CycElem::embed`] into `base`, if this element lies in
    /// the image of `Q(e_base)`.
    pub fn descend(&self, base: u32) -> Option<Self> {
        if !self.order.is_multiple_of(base) {
            return None;
        }
        if base == self.order {
            return Some(self.clone());
        }
        let phi_base = euler_phi(base);
        // Columns: images of e_base^i; solve the overdetermined system exactly.
        let columns: Vec<Vec<BigRational>> = (0..phi_base)
            .map(|i| {
                CycElem::root_power(base, i as i64)
                    .embed(self.order)
                    .expect("base divides order")
                    .coeffs
            })
            .collect();
        let rows = self.coeffs.len();
        let mut aug: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<BigRational> = columns.iter().map(|c| c[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let sol = crate::linalg::solve_rational(&mut aug, phi_base)?;
        Some(CycElem {
            order: base,
            coeffs: sol,
        })
    }

    /// Galois conjugate `e -> e^k`, `gcd(k, D) = 1`.
    pub fn conjugate(&self, k: u32) -> Self {
        let mut acc = Self::zero(self.order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                acc += Self::root_power(self.order, (i as i64) * k as i64).scale(a);
            }
        }
        acc
    }

    /// Field norm down to `Q`: the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut acc = Self::one(self.order);
        for k in 1..=self.order {
            if k.gcd(&self.order) == 1 {
                acc = acc.mul_unchecked(&self.conjugate(k));
            }
        }
        acc.as_rational()
            .cloned()
            .expect("norm of a cyclotomic element is rational")
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![], trim(rem));
    }
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

fn reduce_in_place(c: &mut Vec<BigRational>, poly: &[i64]) {
    let phi = poly.len() - 1;
    for k in (phi..c.len()).rev() {
        let top = std::mem::replace(&mut c[k], BigRational::zero());
        if top.is_zero() {
            continue;
        }
        for (i, &pi) in poly[..phi].iter().enumerate() {
            if pi != 0 {
                c[k - phi + i] -= &top * BigRational::from_integer(BigInt::from(pi));
            }
        }
    }
    c.truncate(phi);
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&CycElem> for &CycElem {
            type Output = CycElem;
            fn $method(self, rhs: &CycElem) -> CycElem {
                assert_eq!(self.order, rhs.order, "cyclotomic order mismatch");
                self.$inner(rhs)
            }
        }
        impl $tr<CycElem> for CycElem {
            type Output = CycElem;
            fn $method(self, rhs: CycElem) -> CycElem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycElem> for CycElem {
            type Output = CycElem;
            fn $method(self, rhs: &CycElem) -> CycElem {
                (&self).$method(rhs)
            }
        }
        impl $tr<CycElem> for &CycElem {
            type Output = CycElem;
            fn $method(self, rhs: CycElem) -> CycElem {
                self.$method(&rhs)
            }
        }
    };
}

impl CycElem {
    fn sub_unchecked(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycElem {
            order: self.order,
            coeffs,
        }
    }
}

forward_binop!(Add, add, add_unchecked);
forward_binop!(Sub, sub, sub_unchecked);
forward_binop!(Mul, mul, mul_unchecked);

impl Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        CycElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        -&self
    }
}

impl AddAssign<&CycElem> for CycElem {
    fn add_assign(&mut self, rhs: &CycElem) {
        assert_eq!(self.order, rhs.order, "cyclotomic order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl AddAssign<CycElem> for CycElem {
    fn add_assign(&mut self, rhs: CycElem) {
        *self += &rhs;
    }
}

impl SubAssign<&CycElem> for CycElem {
    fn sub_assign(&mut self, rhs: &CycElem) {
        assert_eq!(self.order, rhs.order, "cyclotomic order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycElem {
    /// Highest power first, e.g. `2*e^2 - e + 1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => "e".to_string(),
                _ => format!("e^{i}"),
            };
            let body = if mono.is_empty() {
                fmt_rational(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", fmt_rational(&abs), mono)
            };
            parts.push((neg, body));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (idx, (neg, body)) in parts.iter().enumerate() {
            match (idx, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElem[{}]({})", self.order, self)
    }
}

/// JSON integers: plain numbers when they fit in `i64`, decimal strings otherwise.
pub(crate) fn bigint_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

pub(crate) fn bigint_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub(crate) fn rational_to_json(r: &BigRational) -> serde_json::Value {
    serde_json::Value::Array(vec![bigint_to_json(r.numer()), bigint_to_json(r.denom())])
}

impl Serialize for CycElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CycElem", 2)?;
        st.serialize_field("order", &self.order)?;
        let coeffs: Vec<serde_json::Value> = self.coeffs.iter().map(rational_to_json).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            order: u32,
            coeffs: Vec<(serde_json::Value, serde_json::Value)>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.order == 0 {
            return Err(de::Error::custom("order must be positive"));
        }
        let mut coeffs = Vec::with_capacity(raw.coeffs.len());
        for (n, den) in &raw.coeffs {
            let n = bigint_from_json(n).ok_or_else(|| de::Error::custom("bad numerator"))?;
            let den = bigint_from_json(den).ok_or_else(|| de::Error::custom("bad denominator"))?;
            if den.is_zero() {
                return Err(de::Error::custom("zero denominator"));
            }
            coeffs.push(BigRational::new(n, den));
        }
        Ok(CycElem::from_coeffs(raw.order, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn product_over_divisors_is_t_d_minus_one() {
        for d in 1..=30u32 {
            let mut prod = vec![1i64];
            for k in 1..=d {
                if d % k == 0 {
                    let p = cyclotomic_polynomial(k);
                    let mut out = vec![0i64; prod.len() + p.len() - 1];
                    for (i, a) in prod.iter().enumerate() {
                        for (j, b) in p.iter().enumerate() {
                            out[i + j] += a * b;
                        }
                    }
                    prod = out;
                }
            }
            let mut expect = vec![0i64; d as usize + 1];
            expect[0] = -1;
            expect[d as usize] = 1;
            assert_eq!(prod, expect, "D = {d}");
            assert_eq!(cyclotomic_polynomial(d).len() - 1, euler_phi(d));
        }
    }

    #[test]
    fn one_minus_root_products() {
        // (1 - e) for D = 2 is 2; (1 - w)(1 - w^2) = 3 for D = 3.
        let e = CycElem::root(2);
        assert_eq!(CycElem::one(2) - e, CycElem::from_int(2, 2));
        let w = CycElem::root(3);
        let p = (CycElem::one(3) - &w) * (CycElem::one(3) - w.pow(2));
        assert_eq!(p, CycElem::from_int(3, 3));
    }

    #[test]
    fn mismatched_orders_error() {
        let a = CycElem::one(3);
        let b = CycElem::one(4);
        assert!(matches!(
            a.try_mul(&b),
            Err(Error::OrderMismatch { left: 3, right: 4 })
        ));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(
            CycElem::from_int(5, 2).inverse().unwrap(),
            CycElem::from_rational(5, rat(1, 2))
        );
        assert!(CycElem::zero(7).inverse().is_none());
        let one_minus = CycElem::one(2) - CycElem::root(2);
        let inv = one_minus.inverse().unwrap();
        assert_eq!(inv, CycElem::from_rational(2, rat(1, 2)));
        // d * (1 - e)^(1 - d) = 1 for d = 2, an integral unit.
        let v = inv.scale_int(2);
        assert!(v.is_integral() && v.is_one());
        let a = CycElem::one(12) + CycElem::root(12).scale_int(3);
        assert!((a.inverse().unwrap() * a).is_one());
    }

    #[test]
    fn root_recognition() {
        assert_eq!(
            CycElem::root_power(4, 3).as_root_of_unity(),
            Some(RootOfUnity {
                exponent: 3,
                negated: false
            })
        );
        assert_eq!(
            CycElem::from_int(4, -1).as_root_of_unity(),
            Some(RootOfUnity {
                exponent: 2,
                negated: false
            })
        );
        let a = CycElem::one(4) + CycElem::root(4);
        assert_eq!(a.as_root_of_unity(), None);
        assert_eq!(a.norm(), rat(2, 1));
        assert_eq!(
            CycElem::root(3).scale_int(-1).as_root_of_unity(),
            Some(RootOfUnity {
                exponent: 1,
                negated: true
            })
        );
    }

    #[test]
    fn embeddings() {
        assert_eq!(
            CycElem::from_int(2, -1).embed(6).unwrap(),
            CycElem::root_power(6, 3)
        );
        assert!(CycElem::one(5).embed(12).unwrap().is_one());
        let w = CycElem::root(3).embed(6).unwrap();
        assert_eq!(w, CycElem::root_power(6, 2));
        // minimal polynomial t^2 + t + 1 is preserved
        let val = &w * &w + &w + CycElem::one(6);
        assert!(val.is_zero());
        assert!(matches!(
            CycElem::root(4).embed(6),
            Err(Error::EmbedOrder { from: 4, to: 6 })
        ));
    }

    #[test]
    fn descent_round_trip() {
        let a = CycElem::from_coeffs(3, vec![rat(1, 2), rat(-3, 1)]);
        let big = a.embed(12).unwrap();
        assert_eq!(big.descend(3), Some(a));
        assert_eq!(CycElem::root(12).descend(3), None);
    }

    #[test]
    fn primitivity() {
        for d in 1..=12u32 {
            let e = CycElem::root(d);
            assert!(e.pow(d as u64).is_one());
            for k in 1..d {
                assert!(!e.pow(k as u64).is_one(), "D = {d}, k = {k}");
            }
            assert_eq!(e.mul_root_power(d as i64 - 1), CycElem::one(d));
        }
    }

    #[test]
    fn display_and_json() {
        let a = CycElem::from_coeffs(3, vec![rat(1, 2), rat(-1, 1)]);
        assert_eq!(a.to_string(), "-e + 1/2");
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"order":3,"coeffs":[[1,2],[-1,1]]}"#);
        let back: CycElem = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
    }
}
