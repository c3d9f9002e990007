//! PBW normal form `y_1^{b_1}..y_n^{b_n} x_1^{a_1}..x_n^{a_n}` and
//! multiplication in the quantized Weyl algebra, its c-deformed version and
//! its q-deformed version.
//!
//! All structure constants are powers of one root `zeta` (a primitive
//! `D`-th root of unity, or the indeterminate `q`): `eps_j = zeta^{e_j}`,
//! `beta_jk = zeta^{f_jk}`. Products are normal-ordered by closed formulas
//! derived from the defining relations; the only recursion is on the
//! y-letters of `x^a y^b`, whose results are memoized.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::params::{ExpVec, Gen, WeylParams};
use crate::polyring::{coeff_factor, MPoly, VarTable};

/// Exponent vector `[b_1..b_n, a_1..a_n]` ordered by total degree, then lex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwKey {
    deg: u32,
    e: Vec<u32>,
}

impl PbwKey {
    pub fn new(e: Vec<u32>) -> Self {
        PbwKey {
            deg: e.iter().sum(),
            e,
        }
    }

    pub fn from_exp(v: &ExpVec) -> Self {
        let mut e = v.b.clone();
        e.extend_from_slice(&v.a);
        Self::new(e)
    }

    pub fn to_exp(&self) -> ExpVec {
        let n = self.e.len() / 2;
        ExpVec {
            b: self.e[..n].to_vec(),
            a: self.e[n..].to_vec(),
        }
    }

    pub fn raw(&self) -> &[u32] {
        &self.e
    }

    pub fn b(&self) -> &[u32] {
        &self.e[..self.e.len() / 2]
    }

    pub fn a(&self) -> &[u32] {
        &self.e[self.e.len() / 2..]
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }
}

type Terms = BTreeMap<PbwKey, MPoly>;

fn add_into(out: &mut Terms, k: PbwKey, c: MPoly) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match out.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// The algebra itself: parameters, coefficient ring and the product cache.
pub struct WeylAlgebra {
    params: WeylParams,
    coeff_ring: Arc<VarTable>,
    order: u32,
    root_order: u32,
    q_mode: bool,
    c_formal: bool,
    e: Vec<i64>,
    f: Vec<Vec<i64>>,
    memo: RwLock<HashMap<(Vec<u32>, Vec<u32>), Arc<Terms>>>,
}

impl fmt::Debug for WeylAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylAlgebra")
            .field("params", &self.params)
            .field("order", &self.order)
            .finish()
    }
}

impl PartialEq for WeylAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.order == other.order && self.coeff_ring == other.coeff_ring
    }
}

impl WeylAlgebra {
    /// The algebra for `params` in the mode recorded in `params`.
    pub fn new(params: &WeylParams) -> Result<Arc<Self>> {
        let root_order = if params.mode().q_deformed {
            params.q_order()?
        } else {
            params.big_d()
        };
        Self::with_order(params, root_order)
    }

    /// As [`WeylAlgebra::new`] but with coefficients in `Q(e_order)`;
    /// `order` must be a multiple of the root order.
    pub fn with_order(params: &WeylParams, order: u32) -> Result<Arc<Self>> {
        let mode = params.mode();
        let q_mode = mode.q_deformed;
        let root_order = if q_mode { params.q_order()? } else { params.big_d() };
        if order == 0 || !order.is_multiple_of(root_order) {
            return Err(Error::EmbedOrder {
                from: root_order,
                to: order,
            });
        }
        let mut vars: Vec<(String, bool)> = Vec::new();
        if q_mode {
            vars.push(("q".into(), true));
        }
        if mode.c_formal {
            vars.push(("c".into(), false));
        }
        for u in &mode.formal_units {
            vars.push((u.clone(), true));
        }
        let coeff_ring = VarTable::new(&vars)?;
        let n = params.n();
        let e = (0..n).map(|j| params.eps_exponent(j, root_order)).collect();
        let f = (0..n)
            .map(|j| (0..n).map(|k| params.beta_exponent(j, k, root_order)).collect())
            .collect();
        Ok(Arc::new(WeylAlgebra {
            params: params.clone(),
            coeff_ring,
            order,
            root_order,
            q_mode,
            c_formal: mode.c_formal,
            e,
            f,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    pub fn params(&self) -> &WeylParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn coeff_ring(&self) -> &Arc<VarTable> {
        &self.coeff_ring
    }

    /// Cyclotomic order of the coefficient field.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Order of the root `zeta` all structure constants are powers of.
    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn is_q_mode(&self) -> bool {
        self.q_mode
    }

    pub fn is_c_formal(&self) -> bool {
        self.c_formal
    }

    /// `e_j` with `eps_j = zeta^{e_j}`.
    pub fn eps_exp(&self, j: usize) -> i64 {
        self.e[j]
    }

    /// `f_jk` with `beta_jk = zeta^{f_jk}`.
    pub fn beta_exp(&self, j: usize, k: usize) -> i64 {
        self.f[j][k]
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().len()
    }

    /// Multiplies a coefficient by `zeta^k`.
    pub fn twist(&self, p: &MPoly, k: i64) -> MPoly {
        if k == 0 {
            return p.clone();
        }
        if self.q_mode {
            let mut s = vec![0; self.coeff_ring.len()];
            s[0] = k as i32;
            p.shift(&s)
        } else {
            p.mul_root_power(k * (self.order / self.root_order) as i64)
        }
    }

    pub fn coeff_one(&self) -> MPoly {
        MPoly::one(&self.coeff_ring, self.order)
    }

    pub fn coeff_const(&self, c: CycElem) -> Result<MPoly> {
        Ok(MPoly::constant(&self.coeff_ring, c.embed(self.order)?))
    }

    pub fn coeff_int(&self, v: i64) -> MPoly {
        MPoly::from_int(&self.coeff_ring, self.order, v)
    }

    /// A named coefficient variable (`q`, `c` or a formal unit).
    pub fn coeff_var(&self, name: &str) -> Result<MPoly> {
        MPoly::var(&self.coeff_ring, self.order, name)
    }

    /// `zeta^k` as a coefficient.
    pub fn root_scalar(&self, k: i64) -> MPoly {
        self.twist(&self.coeff_one(), k)
    }

    /// `eps_j` as a coefficient (a power of `q` in q-mode).
    pub fn eps_scalar(&self, j: usize) -> MPoly {
        self.root_scalar(self.e[j])
    }

    fn z0(&self) -> MPoly {
        if self.c_formal {
            self.coeff_var("c").expect("c is a coefficient variable")
        } else {
            self.coeff_one()
        }
    }

    fn elem(self: &Arc<Self>, terms: Terms) -> WeylElem {
        WeylElem {
            alg: self.clone(),
            terms,
        }
    }

    pub fn zero(self: &Arc<Self>) -> WeylElem {
        self.elem(Terms::new())
    }

    pub fn one(self: &Arc<Self>) -> WeylElem {
        self.scalar(self.coeff_one())
    }

    pub fn scalar(self: &Arc<Self>, c: MPoly) -> WeylElem {
        let mut t = Terms::new();
        add_into(&mut t, PbwKey::new(vec![0; 2 * self.n()]), c);
        self.elem(t)
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> WeylElem {
        self.scalar(self.coeff_int(v))
    }

    pub fn monomial(self: &Arc<Self>, e: &ExpVec) -> WeylElem {
        self.term(PbwKey::from_exp(e), self.coeff_one())
    }

    pub fn term(self: &Arc<Self>, k: PbwKey, c: MPoly) -> WeylElem {
        assert_eq!(k.e.len(), 2 * self.n());
        let mut t = Terms::new();
        add_into(&mut t, k, c);
        self.elem(t)
    }

    pub fn generator(self: &Arc<Self>, which: Gen, j: usize) -> Result<WeylElem> {
        self.params.check_index(j)?;
        let n = self.n();
        let mut e = vec![0; 2 * n];
        match which {
            Gen::Y => e[j] = 1,
            Gen::X => e[n + j] = 1,
        }
        Ok(self.term(PbwKey::new(e), self.coeff_one()))
    }

    pub fn x(self: &Arc<Self>, j: usize) -> WeylElem {
        self.generator(Gen::X, j).expect("generator index in range")
    }

    pub fn y(self: &Arc<Self>, j: usize) -> WeylElem {
        self.generator(Gen::Y, j).expect("generator index in range")
    }

    /// `z_j = z_0 + sum_{i <= j} (eps_i - 1) y_i x_i` for `0 <= j <= n`, where
    /// `z_0` is `1` (or `c` in formal-c mode). Here `j` counts generators, so
    /// `z_j` involves `y_0 x_0 .. y_{j-1} x_{j-1}`.
    pub fn z(self: &Arc<Self>, j: usize) -> Result<WeylElem> {
        let n = self.n();
        if j > n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        let mut t = Terms::new();
        add_into(&mut t, PbwKey::new(vec![0; 2 * n]), self.z0());
        for i in 0..j {
            let mut e = vec![0; 2 * n];
            e[i] = 1;
            e[n + i] = 1;
            add_into(&mut t, PbwKey::new(e), self.eps_scalar(i) - self.coeff_one());
        }
        Ok(self.elem(t))
    }

    /// `x^a y^b` in normal form, memoized.
    fn xy(&self, a: &[u32], b: &[u32]) -> Arc<Terms> {
        let key = (a.to_vec(), b.to_vec());
        if let Some(t) = self.memo.read().get(&key) {
            return t.clone();
        }
        let n = self.n();
        let result = match b.iter().rposition(|&v| v > 0) {
            None => {
                let mut e = vec![0; 2 * n];
                e[n..].copy_from_slice(a);
                let mut t = Terms::new();
                t.insert(PbwKey::new(e), self.coeff_one());
                t
            }
            Some(k) => {
                let mut b1 = b.to_vec();
                b1[k] -= 1;
                let prev = self.xy(a, &b1);
                let mut out = Terms::new();
                for (key, c) in prev.iter() {
                    self.rmul_y(key, c, k, &mut out);
                }
                out
            }
        };
        let result = Arc::new(result);
        self.memo.write().entry(key).or_insert_with(|| result.clone());
        result
    }

    /// Accumulates `c * (y^beta x^alpha) * y_k` into `out`.
    fn rmul_y(&self, key: &PbwKey, c: &MPoly, k: usize, out: &mut Terms) {
        let n = self.n();
        let (beta, alpha) = (key.b(), key.a());
        let (e, f) = (&self.e, &self.f);
        let s1: i64 = (k + 1..n).map(|j| alpha[j] as i64 * (e[k] + f[k][j])).sum();

        // y_k passes all of x^alpha, then the y_j with j > k.
        let mut ex = s1 + alpha[k] as i64 * e[k];
        ex += (0..k).map(|j| alpha[j] as i64 * f[k][j]).sum::<i64>();
        ex += (k + 1..n).map(|j| beta[j] as i64 * f[j][k]).sum::<i64>();
        let mut ka = key.e.clone();
        ka[k] += 1;
        add_into(out, PbwKey::new(ka), self.twist(c, ex));

        if alpha[k] == 0 {
            return;
        }
        // x_k^a y_k = eps^a y_k x_k^a + [a]_eps z_{k-1} x_k^{a-1}, and z_{k-1}
        // then moves left past x_i (i < k) picking up eps_i.
        let base = s1 + (0..k).map(|i| alpha[i] as i64 * e[i]).sum::<i64>();
        let mut cb = MPoly::zero(&self.coeff_ring, self.order);
        for t in 0..alpha[k] as i64 {
            cb = cb + self.twist(c, base + t * e[k]);
        }
        let mut rest = key.e.clone();
        rest[n + k] -= 1;
        add_into(out, PbwKey::new(rest.clone()), &cb * &self.z0());
        let alpha1 = &rest[n..];
        for i in 0..k {
            let sy: i64 = (i + 1..n).map(|j| beta[j] as i64 * f[j][i]).sum();
            let sx: i64 = -(0..i).map(|j| alpha1[j] as i64 * (e[j] + f[j][i])).sum::<i64>();
            let coeff = self.twist(&cb, e[i] + sy + sx) - self.twist(&cb, sy + sx);
            let mut ki = rest.clone();
            ki[i] += 1;
            ki[n + i] += 1;
            add_into(out, PbwKey::new(ki), coeff);
        }
    }

    /// Normal form of the product of two normal monomials.
    pub fn mul_monomials(&self, l: &PbwKey, r: &PbwKey) -> Vec<(PbwKey, MPoly)> {
        let n = self.n();
        let (b, a) = (l.b(), l.a());
        let (b2, a2) = (r.b(), r.a());
        let mid = self.xy(a, b2);
        let mut out = Vec::with_capacity(mid.len());
        for (k, c) in mid.iter() {
            let (bm, am) = (k.b(), k.a());
            let mut s: i64 = 0;
            for kk in 0..n {
                if bm[kk] > 0 {
                    for j in kk + 1..n {
                        s += self.f[j][kk] * (b[j] * bm[kk]) as i64;
                    }
                }
                if a2[kk] > 0 {
                    for j in kk + 1..n {
                        s -= (self.e[kk] + self.f[kk][j]) * (am[j] * a2[kk]) as i64;
                    }
                }
            }
            let mut e = Vec::with_capacity(2 * n);
            e.extend(b.iter().zip(bm).map(|(x, y)| x + y));
            e.extend(am.iter().zip(a2).map(|(x, y)| x + y));
            out.push((PbwKey::new(e), self.twist(c, s)));
        }
        out
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

/// An element of the algebra: normal monomials with polynomial coefficients.
#[derive(Clone)]
pub struct WeylElem {
    alg: Arc<WeylAlgebra>,
    terms: Terms,
}

impl PartialEq for WeylElem {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same(&other.alg) && self.terms == other.terms
    }
}

impl WeylElem {
    pub fn algebra(&self) -> &Arc<WeylAlgebra> {
        &self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending (total degree, lex) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&PbwKey, &MPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExpVec) -> MPoly {
        self.terms
            .get(&PbwKey::from_exp(e))
            .cloned()
            .unwrap_or_else(|| MPoly::zero(&self.alg.coeff_ring, self.alg.order))
    }

    /// The constant coefficient if the element is a scalar.
    pub fn as_scalar(&self) -> Option<MPoly> {
        match self.terms.len() {
            0 => Some(MPoly::zero(&self.alg.coeff_ring, self.alg.order)),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                (k.deg == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.alg.same(&other.alg) {
            Ok(())
        } else {
            Err(Error::ModeMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut t = self.terms.clone();
        for (k, c) in &other.terms {
            add_into(&mut t, k.clone(), c.clone());
        }
        Ok(self.alg.elem(t))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut t = self.terms.clone();
        for (k, c) in &other.terms {
            add_into(&mut t, k.clone(), -c);
        }
        Ok(self.alg.elem(t))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let alg = &self.alg;
        let left: Vec<(&PbwKey, &MPoly)> = self.terms.iter().collect();
        let partial = |chunk: &[(&PbwKey, &MPoly)]| -> Terms {
            let mut t = Terms::new();
            for (k1, c1) in chunk {
                for (k2, c2) in &other.terms {
                    let c12 = *c1 * c2;
                    for (k, c) in alg.mul_monomials(k1, k2) {
                        add_into(&mut t, k, &c12 * &c);
                    }
                }
            }
            t
        };
        let work = left.len() * other.terms.len();
        let terms = if work < 64 {
            partial(&left)
        } else {
            let chunk = left.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
            let parts: Vec<Terms> = left.par_chunks(chunk).map(partial).collect();
            let mut acc = Terms::new();
            for p in parts {
                for (k, c) in p {
                    add_into(&mut acc, k, c);
                }
            }
            acc
        };
        Ok(alg.elem(terms))
    }

    pub fn scale(&self, c: &MPoly) -> Self {
        let mut t = Terms::new();
        for (k, x) in &self.terms {
            add_into(&mut t, k.clone(), x * c);
        }
        self.alg.elem(t)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = self.alg.one();
        for _ in 0..exp {
            result = &result * self;
        }
        result
    }

    /// `uv - vu`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// Common Z^n-degree `sum (b_j - a_j) e_j` if the element is homogeneous.
    pub fn grading_degree(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys().map(|k| {
            k.b().iter()
                .zip(k.a())
                .map(|(&b, &a)| b as i64 - a as i64)
                .collect::<Vec<_>>()
        });
        let first = it.next().unwrap_or_else(|| vec![0; self.alg.n()]);
        for g in it {
            if g != first {
                return None;
            }
        }
        Some(first)
    }

    /// `max sum chi_j (a_j + b_j)` over the terms; `None` for zero.
    pub fn filtration_degree(&self, weights: &[u64]) -> Option<u64> {
        let n = self.alg.n();
        assert_eq!(weights.len(), n, "one weight per index");
        self.terms
            .keys()
            .map(|k| (0..n).map(|j| weights[j] * (k.e[j] + k.e[n + j]) as u64).sum())
            .max()
    }

    /// Applies `f` to every coefficient, keeping the algebra.
    pub fn map_coeffs(&self, f: impl Fn(&MPoly) -> MPoly) -> Self {
        let mut t = Terms::new();
        for (k, c) in &self.terms {
            add_into(&mut t, k.clone(), f(c));
        }
        self.alg.elem(t)
    }

    /// Rebuilds the element in another algebra with the same `n` by copying
    /// normal monomials and mapping coefficients.
    pub fn transfer(&self, target: &Arc<WeylAlgebra>, f: impl Fn(&MPoly) -> Result<MPoly>) -> Result<WeylElem> {
        if target.n() != self.alg.n() {
            return Err(Error::ModeMismatch);
        }
        let mut t = Terms::new();
        for (k, c) in &self.terms {
            add_into(&mut t, k.clone(), f(c)?);
        }
        Ok(target.elem(t))
    }

    /// The algebra map determined by generator images, evaluated on `self`.
    /// Coefficients are carried into the target coefficient ring by variable
    /// name and cyclotomic embedding.
    pub fn apply_generator_images(&self, images: &GeneratorImages) -> Result<WeylElem> {
        let n = self.alg.n();
        if images.x.len() != n || images.y.len() != n {
            return Err(Error::InvalidParams("need one image per generator".into()));
        }
        let target = images.x[0].alg.clone();
        for img in images.x.iter().chain(&images.y) {
            if !img.alg.same(&target) {
                return Err(Error::ModeMismatch);
            }
        }
        let mut cache: HashMap<(bool, usize, u32), WeylElem> = HashMap::new();
        let mut power = |is_y: bool, j: usize, e: u32| -> WeylElem {
            cache
                .entry((is_y, j, e))
                .or_insert_with(|| {
                    let g = if is_y { &images.y[j] } else { &images.x[j] };
                    g.pow(e)
                })
                .clone()
        };
        let mut out = target.zero();
        for (k, c) in &self.terms {
            let cc = convert_coeff(c, &target)?;
            let mut acc = target.scalar(cc);
            for j in 0..n {
                if k.e[j] > 0 {
                    acc = &acc * &power(true, j, k.e[j]);
                }
            }
            for j in 0..n {
                if k.e[n + j] > 0 {
                    acc = &acc * &power(false, j, k.e[n + j]);
                }
            }
            out = out + acc;
        }
        Ok(out)
    }
}

/// Moves a coefficient into the coefficient ring of `target`, matching
/// variables by name and embedding the cyclotomic field.
pub fn convert_coeff(c: &MPoly, target: &WeylAlgebra) -> Result<MPoly> {
    let embedded = c.map_coeffs(target.order, |x| x.embed(target.order).expect("order divides"));
    if c.order() != target.order && !target.order.is_multiple_of(c.order()) {
        return Err(Error::EmbedOrder {
            from: c.order(),
            to: target.order,
        });
    }
    embedded.extend_ring(&target.coeff_ring)
}

/// Images of `x_j` and `y_j` under a candidate algebra map.
#[derive(Clone)]
pub struct GeneratorImages {
    pub x: Vec<WeylElem>,
    pub y: Vec<WeylElem>,
}

impl GeneratorImages {
    pub fn identity(alg: &Arc<WeylAlgebra>) -> Self {
        GeneratorImages {
            x: (0..alg.n()).map(|j| alg.x(j)).collect(),
            y: (0..alg.n()).map(|j| alg.y(j)).collect(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&WeylElem> for &WeylElem {
            type Output = WeylElem;
            fn $method(self, rhs: &WeylElem) -> WeylElem {
                self.$try(rhs).expect("elements of different algebras")
            }
        }
        impl $tr<WeylElem> for WeylElem {
            type Output = WeylElem;
            fn $method(self, rhs: WeylElem) -> WeylElem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&WeylElem> for WeylElem {
            type Output = WeylElem;
            fn $method(self, rhs: &WeylElem) -> WeylElem {
                (&self).$method(rhs)
            }
        }
        impl $tr<WeylElem> for &WeylElem {
            type Output = WeylElem;
            fn $method(self, rhs: WeylElem) -> WeylElem {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &WeylElem {
    type Output = WeylElem;
    fn neg(self) -> WeylElem {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for WeylElem {
    type Output = WeylElem;
    fn neg(self) -> WeylElem {
        -&self
    }
}

pub(crate) fn render_monomial(k: &PbwKey) -> String {
    let n = k.e.len() / 2;
    let mut parts = Vec::new();
    for (letter, off) in [("y", 0), ("x", n)] {
        for j in 0..n {
            match k.e[off + j] {
                0 => {}
                1 => parts.push(format!("{letter}{}", j + 1)),
                p => parts.push(format!("{letter}{}^{p}", j + 1)),
            }
        }
    }
    parts.join("*")
}

impl fmt::Display for WeylElem {
    /// Highest (degree, lex) term first, e.g. `-2*y1*x1 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let (neg, factor) = match c.as_constant() {
                Some(cc) => coeff_factor(&cc),
                None if c.num_terms() == 1 => {
                    let (_, lc) = c.leading_term().unwrap();
                    let neg = lc.as_rational().is_some_and(|r| r < &num_rational::BigRational::from_integer(0.into()));
                    let shown = if neg { -c } else { c.clone() };
                    (neg, Some(shown.to_string()))
                }
                None => (false, Some(format!("({c})"))),
            };
            let mono = render_monomial(k);
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

impl fmt::Debug for WeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElem({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Mode;

    fn alg(eps: &[(i64, i64)], beta: &[(usize, usize, i64, i64)]) -> Arc<WeylAlgebra> {
        WeylAlgebra::new(&WeylParams::new(eps, beta).unwrap()).unwrap()
    }

    #[test]
    fn basic_relations() {
        let a = alg(&[(1, 2)], &[]);
        let (x, y) = (a.x(0), a.y(0));
        let eps = a.eps_scalar(0);
        assert_eq!(&x * &y, (&y * &x).scale(&eps) + a.one());
        assert_eq!((&x * &y).to_string(), "-y1*x1 + 1");
        // x^2 y = eps^2 y x^2 + (1 + eps) x
        let a3 = alg(&[(1, 3)], &[]);
        let (x, y) = (a3.x(0), a3.y(0));
        let e = a3.eps_scalar(0);
        let lhs = &(&x * &x) * &y;
        let rhs = (&y * &x * &x).scale(&(&e * &e)) + x.scale(&(a3.coeff_one() + &e));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn y_swap_and_commutators() {
        let a = alg(&[(1, 2), (1, 2)], &[(0, 1, 1, 4)]);
        let (y1, y2) = (a.y(0), a.y(1));
        let b21 = a.root_scalar(a.beta_exp(1, 0));
        assert_eq!(&y2 * &y1, (&y1 * &y2).scale(&b21));
        assert!(a.one().commutator(&y1).unwrap().is_zero());
        let z1 = a.z(1).unwrap();
        assert_eq!(a.x(0).commutator(&y1).unwrap(), z1);
        // [x1, y2] vanishes iff beta_21 = 1
        assert!(!a.x(0).commutator(&y2).unwrap().is_zero());
        let b = alg(&[(1, 2), (1, 2)], &[]);
        assert!(b.x(0).commutator(&b.y(1)).unwrap().is_zero());
    }

    #[test]
    fn z_elements() {
        let a = alg(&[(1, 2)], &[]);
        assert!(a.z(0).unwrap().as_scalar().unwrap().is_one());
        assert_eq!(a.z(1).unwrap().to_string(), "-2*y1*x1 + 1");
        assert!(a.z(2).is_err());
        let mut p = WeylParams::new(&[(1, 2)], &[]).unwrap();
        p = p
            .with_mode(Mode {
                c_formal: true,
                ..Mode::default()
            })
            .unwrap();
        let ac = WeylAlgebra::new(&p).unwrap();
        assert_eq!(ac.z(1).unwrap().to_string(), "-2*y1*x1 + c");
        let (x, y) = (ac.x(0), ac.y(0));
        assert_eq!(x.commutator(&y).unwrap(), ac.z(1).unwrap());
    }

    #[test]
    fn grading_and_filtration() {
        let a = alg(&[(1, 3), (1, 3)], &[]);
        assert_eq!(a.x(0).grading_degree(), Some(vec![-1, 0]));
        assert_eq!(a.z(2).unwrap().grading_degree(), Some(vec![0, 0]));
        assert_eq!((a.x(0) + a.y(0)).grading_degree(), None);
        assert_eq!(a.z(2).unwrap().filtration_degree(&[1, 1]), Some(2));
        assert_eq!(a.one().filtration_degree(&[1, 1]), Some(0));
        assert_eq!(a.zero().filtration_degree(&[1, 1]), None);
        let m = &a.y(0) * &a.x(0) * &a.y(1) * &a.x(1);
        assert_eq!(m.filtration_degree(&[1, 2]), Some(6));
    }

    #[test]
    fn q_mode_relation() {
        let p = WeylParams::new(&[(1, 2)], &[])
            .unwrap()
            .with_mode(Mode {
                q_deformed: true,
                ..Mode::default()
            })
            .unwrap();
        let a = WeylAlgebra::new(&p).unwrap();
        let (x, y) = (a.x(0), a.y(0));
        let q = a.coeff_var("q").unwrap();
        assert_eq!(&x * &y, (&y * &x).scale(&q) + a.one());
    }

    #[test]
    fn generator_images() {
        let a = alg(&[(1, 2)], &[]);
        let id = GeneratorImages::identity(&a);
        let u = a.z(1).unwrap() * a.x(0) + a.y(0).pow(3);
        assert_eq!(u.apply_generator_images(&id).unwrap(), u);
        let swap = GeneratorImages {
            x: vec![a.y(0)],
            y: vec![a.x(0)],
        };
        assert_eq!(a.x(0).apply_generator_images(&swap).unwrap(), a.y(0));
    }

    #[test]
    fn mode_mismatch() {
        let a = alg(&[(1, 2)], &[]);
        let b = alg(&[(1, 3)], &[]);
        assert!(matches!(a.x(0).try_mul(&b.x(0)), Err(Error::ModeMismatch)));
    }
}
