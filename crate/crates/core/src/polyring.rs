//! Sparse commutative polynomials over cyclotomic fields, with optional
//! Laurent (invertible) variables, exact division and fraction-free
//! determinants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Signed;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::cyclotomic::{fmt_rational, CycElem, RootOfUnity};
use crate::error::{Error, Result};

/// Ordered variable names; a subset may carry negative exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
    invertible: Vec<bool>,
}

impl VarTable {
    pub fn new<S: AsRef<str>>(vars: &[(S, bool)]) -> Result<Arc<Self>> {
        let mut names = Vec::with_capacity(vars.len());
        let mut invertible = Vec::with_capacity(vars.len());
        for (name, inv) in vars {
            let name = name.as_ref().to_string();
            if names.contains(&name) {
                return Err(Error::InvalidParams(format!("duplicate variable `{name}`")));
            }
            names.push(name);
            invertible.push(*inv);
        }
        Ok(Arc::new(VarTable { names, invertible }))
    }

    /// A table with no variables: polynomials over it are plain constants.
    pub fn empty() -> Arc<Self> {
        Arc::new(VarTable {
            names: vec![],
            invertible: vec![],
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }
}

/// Exponent vector ordered graded-lexicographically (total degree first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    deg: i64,
    exps: Vec<i32>,
}

impl Mono {
    pub fn new(exps: Vec<i32>) -> Self {
        let deg = exps.iter().map(|&e| e as i64).sum();
        Mono { deg, exps }
    }

    pub fn one(nvars: usize) -> Self {
        Mono {
            deg: 0,
            exps: vec![0; nvars],
        }
    }

    pub fn exps(&self) -> &[i32] {
        &self.exps
    }

    pub fn degree(&self) -> i64 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono {
            deg: self.deg + other.deg,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono {
            deg: self.deg - other.deg,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
        }
    }

    fn divides(&self, other: &Mono) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }
}

/// A polynomial in the variables of a [`VarTable`] with [`CycElem`] coefficients.
#[derive(Clone)]
pub struct MPoly {
    ring: Arc<VarTable>,
    order: u32,
    terms: BTreeMap<Mono, CycElem>,
}

fn same_ring(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.order == other.order && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl MPoly {
    pub fn zero(ring: &Arc<VarTable>, order: u32) -> Self {
        MPoly {
            ring: ring.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<VarTable>, order: u32) -> Self {
        Self::constant(ring, CycElem::one(order))
    }

    pub fn constant(ring: &Arc<VarTable>, c: CycElem) -> Self {
        let order = c.order();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(ring.len()), c);
        }
        MPoly {
            ring: ring.clone(),
            order,
            terms,
        }
    }

    pub fn from_int(ring: &Arc<VarTable>, order: u32, v: i64) -> Self {
        Self::constant(ring, CycElem::from_int(order, v))
    }

    pub fn var(ring: &Arc<VarTable>, order: u32, name: &str) -> Result<Self> {
        let i = ring
            .index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut exps = vec![0; ring.len()];
        exps[i] = 1;
        Ok(Self::monomial(ring, exps, CycElem::one(order)))
    }

    pub fn monomial(ring: &Arc<VarTable>, exps: Vec<i32>, c: CycElem) -> Self {
        assert_eq!(exps.len(), ring.len(), "exponent vector length");
        for (i, &e) in exps.iter().enumerate() {
            assert!(
                e >= 0 || ring.is_invertible(i),
                "negative exponent on non-invertible variable {}",
                ring.name(i)
            );
        }
        let order = c.order();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::new(exps), c);
        }
        MPoly {
            ring: ring.clone(),
            order,
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<VarTable> {
        &self.ring
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &CycElem)> {
        self.terms.iter()
    }

    /// The constant value, if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<CycElem> {
        match self.terms.len() {
            0 => Some(CycElem::zero(self.order)),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn coefficient(&self, exps: &[i32]) -> CycElem {
        self.terms
            .get(&Mono::new(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| CycElem::zero(self.order))
    }

    pub fn leading_term(&self) -> Option<(&Mono, &CycElem)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.leading_term().map(|(m, _)| m.deg)
    }

    /// Largest exponent of variable `i` among the terms.
    pub fn degree_in(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.exps[i]).max()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    fn add_term(&mut self, m: Mono, c: CycElem) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: HashMap<Mono, CycElem> = HashMap::with_capacity(small.terms.len() * big.terms.len());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        MPoly {
            ring: self.ring.clone(),
            order: self.order,
            terms,
        }
    }

    pub fn scale(&self, c: &CycElem) -> Self {
        assert_eq!(self.order, c.order(), "cyclotomic order mismatch");
        if c.is_zero() {
            return Self::zero(&self.ring, self.order);
        }
        MPoly {
            ring: self.ring.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Multiplication by `e^k` for the distinguished root of the coefficient field.
    pub fn mul_root_power(&self, k: i64) -> Self {
        MPoly {
            ring: self.ring.clone(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x.mul_root_power(k)))
                .collect(),
        }
    }

    /// Multiplication by a monomial `x^exps` (negative entries allowed on
    /// invertible variables).
    pub fn shift(&self, exps: &[i32]) -> Self {
        let s = Mono::new(exps.to_vec());
        MPoly {
            ring: self.ring.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(m, x)| (m.mul(&s), x.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one(&self.ring, self.order);
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

    /// Laurent inverse of a single-term polynomial whose variables are all invertible.
    pub fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if m
            .exps
            .iter()
            .enumerate()
            .any(|(i, &e)| e != 0 && !self.ring.is_invertible(i))
        {
            return None;
        }
        let inv = c.inverse()?;
        let exps: Vec<i32> = m.exps.iter().map(|e| -e).collect();
        Some(Self::monomial(&self.ring, exps, inv))
    }

    fn min_invertible_exponents(&self) -> Vec<i32> {
        let mut shift = vec![0i32; self.ring.len()];
        for (i, s) in shift.iter_mut().enumerate() {
            if self.ring.is_invertible(i) {
                *s = self.terms.keys().map(|m| m.exps[i]).min().unwrap_or(0);
            }
        }
        shift
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    ///
    /// Laurent variables are first normalised away by factoring out the
    /// minimal exponent of each, then ordinary graded-lex division runs on
    /// honest polynomials.
    pub fn exact_divide(&self, d: &MPoly) -> Result<Option<MPoly>> {
        self.check(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(self.clone()));
        }
        if let Some(c) = d.as_constant() {
            return Ok(Some(self.scale(&c.inverse().expect("nonzero constant"))));
        }
        let sp = self.min_invertible_exponents();
        let sd = d.min_invertible_exponents();
        let neg = |v: &[i32]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let mut rem = self.shift(&neg(&sp));
        let divisor = d.shift(&neg(&sd));
        let (lm, lc) = divisor.leading_term().expect("nonzero divisor");
        let lm = lm.clone();
        let lc_inv = lc.inverse().expect("nonzero leading coefficient");
        let mut quot = MPoly::zero(&self.ring, self.order);
        while let Some((rm, rc)) = rem.leading_term() {
            if !lm.divides(rm) {
                return Ok(None);
            }
            let tm = rm.div(&lm);
            let tc = rc * &lc_inv;
            for (m, c) in &divisor.terms {
                rem.add_term(m.mul(&tm), -(c * &tc));
            }
            quot.add_term(tm, tc);
        }
        let back: Vec<i32> = sp.iter().zip(&sd).map(|(a, b)| a - b).collect();
        Ok(Some(quot.shift(&back)))
    }

    /// Exact division by `(v - epsilon)` where `v` is the named variable, by
    /// synthetic division in `v`.
    pub fn divide_by_linear(&self, var: &str, epsilon: &CycElem) -> Result<MPoly> {
        let vi = self
            .ring
            .index(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        if epsilon.order() != self.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: epsilon.order(),
            });
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        // Coefficients of v^k as polynomials in the remaining variables.
        let mut by_power: BTreeMap<i32, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.exps[vi];
            let mut e = m.exps.clone();
            e[vi] = 0;
            by_power
                .entry(k)
                .or_insert_with(|| MPoly::zero(&self.ring, self.order))
                .add_term(Mono::new(e), c.clone());
        }
        let lo = *by_power.keys().next().unwrap();
        let hi = *by_power.keys().next_back().unwrap();
        let n = (hi - lo) as usize;
        let coeff = |k: usize| -> MPoly {
            by_power
                .get(&(k as i32 + lo))
                .cloned()
                .unwrap_or_else(|| MPoly::zero(&self.ring, self.order))
        };
        // Horner: b_{n-1} = a_n, b_{i-1} = a_i + eps * b_i, remainder a_0 + eps * b_0.
        let mut b: Vec<MPoly> = vec![MPoly::zero(&self.ring, self.order); n];
        let mut carry = MPoly::zero(&self.ring, self.order);
        for i in (0..=n).rev() {
            let cur = coeff(i).try_add(&carry.scale(epsilon))?;
            if i == 0 {
                if !cur.is_zero() {
                    return Err(Error::NotDivisibleByLinear(cur.to_string()));
                }
            } else {
                b[i - 1] = cur.clone();
                carry = cur;
            }
        }
        let mut out = MPoly::zero(&self.ring, self.order);
        for (i, bi) in b.into_iter().enumerate() {
            let mut e = vec![0; self.ring.len()];
            e[vi] = i as i32 + lo;
            for (m, c) in bi.terms {
                out.add_term(m.mul(&Mono::new(e.clone())), c);
            }
        }
        Ok(out)
    }

    /// Ring homomorphism into `target`: named variables go to the given images,
    /// every other variable to the variable of the same name in `target`.
    pub fn substitute(&self, assignments: &[(&str, MPoly)], target: &Arc<VarTable>) -> Result<MPoly> {
        let mut images: Vec<MPoly> = Vec::with_capacity(self.ring.len());
        for name in self.ring.names() {
            let img = match assignments.iter().find(|(n, _)| n == name) {
                Some((_, p)) => {
                    if !same_ring(p.ring(), target) {
                        return Err(Error::RingMismatch);
                    }
                    if p.order != self.order {
                        return Err(Error::OrderMismatch {
                            left: self.order,
                            right: p.order,
                        });
                    }
                    p.clone()
                }
                None => MPoly::var(target, self.order, name)?,
            };
            images.push(img);
        }
        let mut cache: HashMap<(usize, i32), MPoly> = HashMap::new();
        let mut out = MPoly::zero(target, self.order);
        for (m, c) in &self.terms {
            let mut acc = MPoly::constant(target, c.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match cache.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = if e > 0 {
                            images[i].pow(e as u32)
                        } else {
                            images[i]
                                .unit_inverse()
                                .ok_or_else(|| Error::NonInvertibleImage(self.ring.name(i).to_string()))?
                                .pow((-e) as u32)
                        };
                        cache.insert((i, e), p.clone());
                        p
                    }
                };
                acc = acc.mul_unchecked(&p);
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient, producing a polynomial over `order`.
    pub fn map_coeffs(&self, order: u32, f: impl Fn(&CycElem) -> CycElem) -> MPoly {
        let mut out = MPoly::zero(&self.ring, order);
        for (m, c) in &self.terms {
            let v = f(c);
            assert_eq!(v.order(), order);
            out.add_term(m.clone(), v);
        }
        out
    }

    /// Re-indexes the polynomial into a larger table containing every variable
    /// of the current one (matched by name).
    pub fn extend_ring(&self, target: &Arc<VarTable>) -> Result<MPoly> {
        let map: Vec<usize> = self
            .ring
            .names()
            .iter()
            .map(|n| target.index(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
            .collect::<Result<_>>()?;
        let mut out = MPoly::zero(target, self.order);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.exps.iter().enumerate() {
                e[map[i]] = x;
            }
            out.add_term(Mono::new(e), c.clone());
        }
        Ok(out)
    }

    /// Raw term insertion for callers assembling polynomials term by term.
    pub fn push_term(&mut self, exps: Vec<i32>, c: CycElem) {
        assert_eq!(c.order(), self.order);
        self.add_term(Mono::new(exps), c);
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&MPoly> for &MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                self.$try(rhs).expect("incompatible polynomial rings")
            }
        }
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<MPoly> for &MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

fn fmt_mono(ring: &VarTable, m: &Mono, sep: &str) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ring.name(i).to_string()),
            _ => parts.push(format!("{}^{}", ring.name(i), e)),
        }
    }
    parts.join(sep)
}

/// Renders a coefficient as a factor: `None` for 1, signed rationals bare,
/// anything else in parentheses.
pub(crate) fn coeff_factor(c: &CycElem) -> (bool, Option<String>) {
    if let Some(r) = c.as_rational() {
        let neg = r.is_negative();
        let a = r.abs();
        if num_traits::One::is_one(&a) {
            (neg, None)
        } else {
            (neg, Some(fmt_rational(&a)))
        }
    } else {
        (false, Some(format!("({c})")))
    }
}

impl fmt::Display for MPoly {
    /// Graded-lex descending, e.g. `c^2 - 4*Y1*X1 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, factor) = coeff_factor(c);
            let mono = fmt_mono(&self.ring, m, "*");
            let body = match (factor, mono.is_empty()) {
                (None, true) => "1".to_string(),
                (None, false) => mono,
                (Some(fac), true) => fac,
                (Some(fac), false) => format!("{fac}*{mono}"),
            };
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

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly[{}]({})", self.order, self)
    }
}

impl Serialize for MPoly {
    /// `{"vars": [...], "terms": [[[exps...], coeff], ...]}`, terms graded-lex descending.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MPoly", 2)?;
        st.serialize_field("vars", self.ring.names())?;
        let terms: Vec<(&[i32], &CycElem)> =
            self.terms.iter().rev().map(|(m, c)| (m.exps(), c)).collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// A square matrix of polynomials over one shared ring.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    entries: Vec<Vec<MPoly>>,
}

impl PolyMatrix {
    pub fn new(entries: Vec<Vec<MPoly>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Internal("matrix is not square".into()));
        }
        if let Some(first) = entries.first().and_then(|r| r.first()) {
            for e in entries.iter().flatten() {
                first.check(e)?;
            }
        }
        Ok(PolyMatrix { entries })
    }

    pub fn identity(ring: &Arc<VarTable>, order: u32, n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            MPoly::one(ring, order)
                        } else {
                            MPoly::zero(ring, order)
                        }
                    })
                    .collect()
            })
            .collect();
        PolyMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &MPoly {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<MPoly>] {
        &self.entries
    }

    pub fn trace(&self) -> Option<MPoly> {
        let mut it = self.entries.iter().enumerate().map(|(i, r)| r[i].clone());
        let first = it.next()?;
        Some(it.fold(first, |a, b| a + b))
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        let n = self.size();
        let entries = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = MPoly::zero(self.entries[0][0].ring(), self.entries[0][0].order());
                        for k in 0..n {
                            let a = &self.entries[i][k];
                            let b = &other.entries[k][j];
                            if !a.is_zero() && !b.is_zero() {
                                acc = acc + a * b;
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        PolyMatrix { entries }
    }
}

/// Determinant by single-step fraction-free (Bareiss) elimination. Every
/// intermediate division is exact; a failed division is reported as an
/// internal error.
pub fn bareiss_determinant(m: &PolyMatrix) -> Result<MPoly> {
    let n = m.size();
    if n == 0 {
        return Err(Error::Internal("empty matrix has no ring".into()));
    }
    let ring = m.entries[0][0].ring().clone();
    let order = m.entries[0][0].order();
    let mut a = m.entries.clone();
    let mut negate = false;
    let mut prev = MPoly::one(&ring, order);
    for k in 0..n.saturating_sub(1) {
        // Cheapest nonzero pivot in column k.
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| (a[i][k].num_terms(), i));
        let Some(p) = pivot else {
            return Ok(MPoly::zero(&ring, order));
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let akk = &pivot_row[k];
        let prev_ref = &prev;
        tail.par_iter_mut().try_for_each(|row| -> Result<()> {
            let aik = row[k].clone();
            for j in k + 1..n {
                let mut num = &row[j] * akk;
                if !aik.is_zero() && !pivot_row[j].is_zero() {
                    num = num - &aik * &pivot_row[j];
                }
                row[j] = num
                    .exact_divide(prev_ref)?
                    .ok_or_else(|| Error::Internal("Bareiss division was not exact".into()))?;
            }
            row[k] = MPoly::zero(&ring, order);
            Ok(())
        })?;
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Witness for `p = u * q` with `u` a constant times a Laurent monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Associate {
    /// The constant part of `u`.
    pub scalar: CycElem,
    /// Exponents of the monomial part of `u` (only on invertible variables).
    pub monomial: Vec<i32>,
    /// Set when the constant is `+-e^k`, i.e. a certified unit of `Z[e]`.
    pub root: Option<RootOfUnity>,
}

impl Associate {
    pub fn is_certified_unit(&self) -> bool {
        self.root.is_some()
    }
}

impl Serialize for Associate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Associate", 4)?;
        st.serialize_field("scalar", &self.scalar.to_string())?;
        st.serialize_field("monomial", &self.monomial)?;
        st.serialize_field("certified_unit", &self.is_certified_unit())?;
        st.serialize_field("root", &self.root)?;
        st.end()
    }
}

/// Decides whether `p = u * q` for `u` a nonzero constant times a Laurent
/// monomial in invertible variables. The constant is certified as a unit only
/// when it is `+-e^k`; otherwise it is reported for the caller to judge.
pub fn is_associate(p: &MPoly, q: &MPoly) -> Option<Associate> {
    p.check(q).ok()?;
    let n = p.ring.len();
    if q.is_zero() || p.is_zero() {
        if p.is_zero() && q.is_zero() {
            let one = CycElem::one(p.order);
            return Some(Associate {
                root: one.as_root_of_unity(),
                scalar: one,
                monomial: vec![0; n],
            });
        }
        return None;
    }
    if p.num_terms() != q.num_terms() {
        return None;
    }
    let (pm, pc) = p.leading_term().unwrap();
    let (qm, qc) = q.leading_term().unwrap();
    let mono = pm.div(qm);
    if mono
        .exps
        .iter()
        .enumerate()
        .any(|(i, &e)| e != 0 && !p.ring.is_invertible(i))
    {
        return None;
    }
    let scalar = pc * &qc.inverse().expect("nonzero");
    let candidate = q.shift(&mono.exps).scale(&scalar);
    if candidate != *p {
        return None;
    }
    Some(Associate {
        root: scalar.as_root_of_unity(),
        scalar,
        monomial: mono.exps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring_xy() -> Arc<VarTable> {
        VarTable::new(&[("X", false), ("Y", false), ("c", false)]).unwrap()
    }

    fn v(r: &Arc<VarTable>, name: &str) -> MPoly {
        MPoly::var(r, 2, name).unwrap()
    }

    fn k(r: &Arc<VarTable>, x: i64) -> MPoly {
        MPoly::from_int(r, 2, x)
    }

    #[test]
    fn basic_products() {
        let r = ring_xy();
        let x = v(&r, "X");
        assert_eq!((&x - k(&r, 1)) * (&x + k(&r, 1)), x.pow(2) - k(&r, 1));
        let c = v(&r, "c");
        let y = v(&r, "Y");
        let t = &c - k(&r, 2) * &y * &x;
        let expect = c.pow(2) - k(&r, 4) * &c * &y * &x + k(&r, 4) * y.pow(2) * x.pow(2);
        assert_eq!(t.pow(2), expect);
        assert!((&x * MPoly::zero(&r, 2)).is_zero());
    }

    #[test]
    fn ring_mismatch_errors() {
        let a = MPoly::var(&ring_xy(), 2, "X").unwrap();
        let other = VarTable::new(&[("Z", false)]).unwrap();
        let b = MPoly::var(&other, 2, "Z").unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::RingMismatch)));
    }

    #[test]
    fn exact_division_cases() {
        let r = ring_xy();
        let x = v(&r, "X");
        let one = k(&r, 1);
        let q = (x.pow(2) - &one).exact_divide(&(&x - &one)).unwrap();
        assert_eq!(q, Some(&x + &one));
        let c = v(&r, "c");
        let y = v(&r, "Y");
        let f = c.pow(2) - k(&r, 4) * &y * &x;
        assert_eq!(f.pow(2).exact_divide(&f).unwrap(), Some(f.clone()));
        assert_eq!((x.pow(2) + &one).exact_divide(&(&x + &one)).unwrap(), None);
        assert!(matches!(
            x.exact_divide(&MPoly::zero(&r, 2)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn laurent_division() {
        let r = VarTable::new(&[("q", true), ("X", false)]).unwrap();
        let q = MPoly::var(&r, 3, "q").unwrap();
        let qi = q.unit_inverse().unwrap();
        let x = MPoly::var(&r, 3, "X").unwrap();
        let d = &qi + &x;
        let p = &d * (&q * &q - &qi * &x);
        assert_eq!(p.exact_divide(&d).unwrap(), Some(&q * &q - &qi * &x));
    }

    #[test]
    fn linear_factor_division() {
        let r = VarTable::new(&[("q", true), ("c", false)]).unwrap();
        let eps = CycElem::root(4);
        let q = MPoly::var(&r, 4, "q").unwrap();
        let lin = &q - MPoly::constant(&r, eps.clone());
        assert!(lin.divide_by_linear("q", &eps).unwrap().is_one());
        let p = q.pow(2) - MPoly::constant(&r, eps.pow(2));
        assert_eq!(
            p.divide_by_linear("q", &eps).unwrap(),
            &q + MPoly::constant(&r, eps.clone())
        );
        let c = MPoly::var(&r, 4, "c").unwrap();
        let one = MPoly::from_int(&r, 4, 1);
        let p = &lin * (&q + &one) * &c;
        assert_eq!(p.divide_by_linear("q", &eps).unwrap(), (&q + &one) * &c);
        assert!(matches!(
            (&q + &one).divide_by_linear("q", &eps),
            Err(Error::NotDivisibleByLinear(_))
        ));
        // negative powers of q are fine
        let qi = q.unit_inverse().unwrap();
        let p = &lin * &qi;
        assert_eq!(p.divide_by_linear("q", &eps).unwrap(), qi);
    }

    #[test]
    fn substitution_cases() {
        let src = VarTable::new(&[("cp", false), ("X", false)]).unwrap();
        let dst = VarTable::new(&[("c", false), ("X", false), ("Y", false)]).unwrap();
        let cp = MPoly::var(&src, 2, "cp").unwrap();
        let p = cp.pow(2) + MPoly::from_int(&src, 2, 1);
        let c = MPoly::var(&dst, 2, "c").unwrap();
        let x = MPoly::var(&dst, 2, "X").unwrap();
        let y = MPoly::var(&dst, 2, "Y").unwrap();
        let img = c.pow(2) - MPoly::from_int(&dst, 2, 4) * &y * &x;
        let out = p.substitute(&[("cp", img.clone())], &dst).unwrap();
        assert_eq!(out, img.pow(2) + MPoly::one(&dst, 2));
        assert!(matches!(
            p.substitute(&[], &dst),
            Err(Error::UnknownVariable(_))
        ));
        // identity
        assert_eq!(p.substitute(&[], &src).unwrap(), p);
        // specialisation q -> e
        let qr = VarTable::new(&[("q", true)]).unwrap();
        let q = MPoly::var(&qr, 3, "q").unwrap();
        let e = CycElem::root(3);
        let empty = VarTable::empty();
        let out = q
            .substitute(&[("q", MPoly::constant(&empty, e.clone()))], &empty)
            .unwrap();
        assert_eq!(out.as_constant(), Some(e.clone()));
        let inv = q.unit_inverse().unwrap();
        let out = inv
            .substitute(&[("q", MPoly::constant(&empty, e.clone()))], &empty)
            .unwrap();
        assert_eq!(out.as_constant(), e.inverse());
    }

    #[test]
    fn laurent_needs_invertible_image() {
        let qr = VarTable::new(&[("q", true), ("X", false)]).unwrap();
        let q = MPoly::var(&qr, 2, "q").unwrap();
        let x = MPoly::var(&qr, 2, "X").unwrap();
        let inv = q.unit_inverse().unwrap();
        assert!(matches!(
            inv.substitute(&[("q", &x + MPoly::one(&qr, 2))], &qr),
            Err(Error::NonInvertibleImage(_))
        ));
    }

    #[test]
    fn small_determinants() {
        let r = ring_xy();
        let x = v(&r, "X");
        let one = k(&r, 1);
        let m = PolyMatrix::new(vec![vec![x.clone(), one.clone()], vec![one.clone(), x.clone()]]).unwrap();
        assert_eq!(bareiss_determinant(&m).unwrap(), x.pow(2) - &one);
        assert!(bareiss_determinant(&PolyMatrix::identity(&r, 2, 5)).unwrap().is_one());
        // a zero pivot forces a row swap
        let z = MPoly::zero(&r, 2);
        let m = PolyMatrix::new(vec![vec![z.clone(), x.clone()], vec![one.clone(), z.clone()]]).unwrap();
        assert_eq!(bareiss_determinant(&m).unwrap(), -x);
    }

    #[test]
    fn associates() {
        let r = ring_xy();
        let x = v(&r, "X");
        let a = is_associate(&(-x.pow(2)), &x.pow(2)).unwrap();
        assert_eq!(a.scalar, CycElem::from_int(2, -1));
        assert!(a.is_certified_unit());
        let y = v(&r, "Y");
        let c = v(&r, "c");
        let f = c.pow(2) - k(&r, 4) * &y * &x;
        let a = is_associate(&(k(&r, 16) * f.pow(2)), &f.pow(2)).unwrap();
        assert_eq!(a.scalar, CycElem::from_int(2, 16));
        assert!(!a.is_certified_unit());
        assert!(is_associate(&x, &y).is_none());
    }

    #[test]
    fn display_order() {
        let r = ring_xy();
        let f = v(&r, "c").pow(2) - k(&r, 4) * v(&r, "Y") * v(&r, "X") + k(&r, 1);
        assert_eq!(f.to_string(), "-4*X*Y + c^2 + 1");
        let js = serde_json::to_string(&v(&r, "X")).unwrap();
        assert_eq!(js, r#"{"vars":["X","Y","c"],"terms":[[[1,0,0],{"order":2,"coeffs":[[1,1]]}]]}"#);
    }

    // Random polynomials over Q(e_3) in three variables, small degree.
    fn arb_poly(r: Arc<VarTable>) -> impl Strategy<Value = MPoly> {
        let nv = r.len();
        proptest::collection::vec(
            (
                proptest::collection::vec(0i32..3, nv),
                -3i64..4,
                -2i64..3,
            ),
            0..5,
        )
        .prop_map(move |terms| {
            let mut p = MPoly::zero(&r, 3);
            for (e, a, b) in terms {
                let c = CycElem::from_int(3, a) + CycElem::root(3).scale_int(b);
                p.push_term(e, c);
            }
            p
        })
    }

    fn ring3() -> Arc<VarTable> {
        VarTable::new(&[("q", true), ("a", false), ("b", false)]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_divide_recovers_factor(p in arb_poly(ring3()), d in arb_poly(ring3())) {
            prop_assume!(!d.is_zero());
            let prod = &p * &d;
            prop_assert_eq!(prod.exact_divide(&d).unwrap(), Some(p));
        }

        #[test]
        fn linear_division_recovers_factor(p in arb_poly(ring3())) {
            let r = ring3();
            let eps = CycElem::root(3);
            let lin = MPoly::var(&r, 3, "q").unwrap() - MPoly::constant(&r, eps.clone());
            prop_assert_eq!((&p * &lin).divide_by_linear("q", &eps).unwrap(), p);
        }

        #[test]
        fn substitution_is_multiplicative(p in arb_poly(ring3()), s in arb_poly(ring3())) {
            let r = ring3();
            let a_img = MPoly::var(&r, 3, "b").unwrap() * MPoly::from_int(&r, 3, 2) + MPoly::one(&r, 3);
            let q_img = MPoly::var(&r, 3, "q").unwrap().pow(2).scale(&CycElem::root(3));
            let assign = [("a", a_img), ("q", q_img)];
            let lhs = (&p * &s).substitute(&assign, &r).unwrap();
            let rhs = p.substitute(&assign, &r).unwrap() * s.substitute(&assign, &r).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
