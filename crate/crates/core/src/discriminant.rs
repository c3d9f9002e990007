//! Regular representation over `C = T[c, x^L, y^L]`, the internal trace and
//! the discriminant, with the closed-form right-hand sides it is compared to.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use num_integer::Integer;
use parking_lot::RwLock;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::center::{center_ring, z_center_poly, CenterPoly};
use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::params::{ExpVec, Mode, WeylParams};
use crate::polyring::{bareiss_determinant, is_associate, Associate, MPoly, PolyMatrix, VarTable};
use crate::weyl::{PbwKey, WeylAlgebra, WeylElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisConvention {
    /// Normal-form monomials `y^b x^a`.
    YFirst,
    /// `x_1^{a_1} y_1^{b_1} ... x_n^{a_n} y_n^{b_n}`.
    XFirst,
}

/// A basis of the algebra over `C`, exponents bounded by `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CBasis {
    pub l: Vec<u32>,
    pub elements: Vec<ExpVec>,
    pub convention: BasisConvention,
}

impl CBasis {
    pub fn new(params: &WeylParams, l: &[u32], convention: BasisConvention) -> Result<Self> {
        params.check_central_powers(l)?;
        let n = l.len();
        let mut elements = Vec::new();
        let mut cur = vec![0u32; 2 * n];
        loop {
            elements.push(ExpVec {
                b: cur[..n].to_vec(),
                a: cur[n..].to_vec(),
            });
            let mut i = 0;
            loop {
                if i == 2 * n {
                    elements.sort_by(|p, q| (p.total_degree(), p).cmp(&(q.total_degree(), q)));
                    return Ok(CBasis {
                        l: l.to_vec(),
                        elements,
                        convention,
                    });
                }
                cur[i] += 1;
                if cur[i] < l[i % n] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    /// `Lambda = prod L_j^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, alg: &Arc<WeylAlgebra>, i: usize) -> WeylElem {
        let e = &self.elements[i];
        match self.convention {
            BasisConvention::YFirst => alg.monomial(e),
            BasisConvention::XFirst => {
                let n = e.n();
                let mut u = alg.one();
                for j in 0..n {
                    let mut x = ExpVec::zero(n);
                    x.a[j] = e.a[j];
                    let mut y = ExpVec::zero(n);
                    y.b[j] = e.b[j];
                    u = u * alg.monomial(&x) * alg.monomial(&y);
                }
                u
            }
        }
    }
}

/// Coordinates over `C` and the internal trace for a fixed `L`.
pub struct TraceForm {
    alg: Arc<WeylAlgebra>,
    l: Vec<u32>,
    ring: Arc<VarTable>,
    ybasis: CBasis,
    index: HashMap<PbwKey, usize>,
    cache: RwLock<HashMap<Vec<u32>, MPoly>>,
}

impl TraceForm {
    pub fn new(alg: &Arc<WeylAlgebra>, l: &[u32]) -> Result<Self> {
        let params = alg.params();
        if alg.is_q_mode() || !params.mode().formal_units.is_empty() {
            return Err(Error::InvalidParams(
                "traces are computed over T or T[c] only".into(),
            ));
        }
        let ybasis = CBasis::new(params, l, BasisConvention::YFirst)?;
        let index = ybasis
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| (PbwKey::from_exp(e), i))
            .collect();
        Ok(TraceForm {
            alg: alg.clone(),
            l: l.to_vec(),
            ring: center_ring(alg.n(), alg.is_c_formal()),
            ybasis,
            index,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn algebra(&self) -> &Arc<WeylAlgebra> {
        &self.alg
    }

    pub fn ring(&self) -> &Arc<VarTable> {
        &self.ring
    }

    pub fn lambda(&self) -> usize {
        self.ybasis.len()
    }

    /// `y^b x^a = Y^beta X^alpha y^r x^s` with `b = beta L + r`, `a = alpha L + s`.
    fn split(&self, k: &PbwKey) -> (Vec<i32>, PbwKey) {
        let n = self.l.len();
        let off = usize::from(self.alg.is_c_formal());
        let e = k.raw();
        let mut exps = vec![0i32; self.ring.len()];
        let mut rest = vec![0u32; 2 * n];
        for j in 0..n {
            let l = self.l[j];
            exps[off + n + j] = (e[j] / l) as i32;
            exps[off + j] = (e[n + j] / l) as i32;
            rest[j] = e[j] % l;
            rest[n + j] = e[n + j] % l;
        }
        (exps, PbwKey::new(rest))
    }

    fn lift_coeff(&self, c: &MPoly) -> MPoly {
        c.extend_ring(&self.ring).expect("coefficient ring embeds in center ring")
    }

    /// Coordinates in the normal-form basis.
    pub fn coords_y(&self, u: &WeylElem) -> Vec<MPoly> {
        let order = self.alg.order();
        let mut out = vec![MPoly::zero(&self.ring, order); self.lambda()];
        for (k, c) in u.terms() {
            let (exps, rest) = self.split(k);
            let i = self.index[&rest];
            out[i] = &out[i] + self.lift_coeff(c).shift(&exps);
        }
        out
    }

    /// Coordinates in `basis`.
    pub fn coords(&self, u: &WeylElem, basis: &CBasis) -> Result<Vec<MPoly>> {
        let w = self.coords_y(u);
        match basis.convention {
            BasisConvention::YFirst => Ok(self.reorder(w, basis)),
            BasisConvention::XFirst => self.solve_x_first(w, basis),
        }
    }

    fn reorder(&self, w: Vec<MPoly>, basis: &CBasis) -> Vec<MPoly> {
        basis
            .elements
            .iter()
            .map(|e| w[self.index[&PbwKey::from_exp(e)]].clone())
            .collect()
    }

    /// Back substitution against the change of basis, which is triangular
    /// for the total-degree order with root-of-unity diagonal.
    fn solve_x_first(&self, w: Vec<MPoly>, basis: &CBasis) -> Result<Vec<MPoly>> {
        let cols: Vec<Vec<MPoly>> = (0..basis.len())
            .map(|i| self.coords_y(&basis.element(&self.alg, i)))
            .collect();
        let mut w = w;
        let mut v = vec![MPoly::zero(&self.ring, self.alg.order()); basis.len()];
        for i in (0..basis.len()).rev() {
            let row = self.index[&PbwKey::from_exp(&basis.elements[i])];
            let diag = cols[i][row]
                .as_constant()
                .and_then(|c| c.inverse())
                .ok_or_else(|| Error::Internal("change of basis is not unitriangular".into()))?;
            let vi = w[row].scale(&diag);
            if !vi.is_zero() {
                for (wr, cr) in w.iter_mut().zip(&cols[i]) {
                    if !cr.is_zero() {
                        *wr = &*wr - &vi * cr;
                    }
                }
            }
            v[i] = vi;
        }
        if w.iter().any(|x| !x.is_zero()) {
            return Err(Error::Internal("basis change left a residue".into()));
        }
        Ok(v)
    }

    /// `M` with `u b_k = sum_j M_jk b_j`.
    pub fn regular_representation(&self, u: &WeylElem, basis: &CBasis) -> Result<PolyMatrix> {
        let cols: Vec<Vec<MPoly>> = (0..basis.len())
            .into_par_iter()
            .map(|k| self.coords(&(u * &basis.element(&self.alg, k)), basis))
            .collect::<Result<_>>()?;
        let rows = (0..basis.len())
            .map(|j| cols.iter().map(|c| c[j].clone()).collect())
            .collect();
        PolyMatrix::new(rows)
    }

    /// Trace of `y^r x^r` with `r < L`.
    fn monomial_trace(&self, r: &PbwKey) -> MPoly {
        if let Some(t) = self.cache.read().get(r.raw()) {
            return t.clone();
        }
        let m = self.alg.term(r.clone(), self.alg.coeff_one());
        let mut t = MPoly::zero(&self.ring, self.alg.order());
        for (i, e) in self.ybasis.elements.iter().enumerate() {
            let prod = &m * &self.alg.monomial(e);
            t = t + self.coords_y(&prod)[i].clone();
        }
        self.cache.write().insert(r.raw().to_vec(), t.clone());
        t
    }

    /// The internal trace; vanishes on monomials of nonzero Z^n-degree.
    pub fn trace(&self, u: &WeylElem) -> MPoly {
        let n = self.l.len();
        let mut out = MPoly::zero(&self.ring, self.alg.order());
        for (k, c) in u.terms() {
            let (exps, rest) = self.split(k);
            if rest.b() != rest.a() {
                continue;
            }
            debug_assert_eq!(rest.raw().len(), 2 * n);
            out = out + (self.lift_coeff(c) * self.monomial_trace(&rest)).shift(&exps);
        }
        out
    }

    /// `[tr(b_i b_j)]`.
    pub fn trace_matrix(&self, basis: &CBasis) -> Result<PolyMatrix> {
        let elems: Vec<WeylElem> = (0..basis.len()).map(|i| basis.element(&self.alg, i)).collect();
        let size = elems.len();
        let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (i..size).map(move |j| (i, j))).collect();
        let vals: Vec<MPoly> = pairs
            .par_iter()
            .map(|&(i, j)| self.trace(&(&elems[i] * &elems[j])))
            .collect();
        let mut rows = vec![vec![MPoly::zero(&self.ring, self.alg.order()); size]; size];
        for (&(i, j), v) in pairs.iter().zip(vals) {
            rows[j][i] = v.clone();
            rows[i][j] = v;
        }
        PolyMatrix::new(rows)
    }
}

/// `regular_representation` for a one-off element.
pub fn regular_representation(u: &WeylElem, basis: &CBasis) -> Result<PolyMatrix> {
    TraceForm::new(u.algebra(), &basis.l)?.regular_representation(u, basis)
}

/// The internal trace of `u` as a center polynomial.
pub fn internal_trace(u: &WeylElem, l: &[u32]) -> Result<CenterPoly> {
    let tf = TraceForm::new(u.algebra(), l)?;
    Ok(CenterPoly {
        poly: tf.trace(u),
        l: l.to_vec(),
    })
}

/// `det [tr(b_i b_j)]` in the normal-form basis.
pub fn discriminant(params: &WeylParams, l: &[u32]) -> Result<CenterPoly> {
    discriminant_with(params, l, BasisConvention::YFirst)
}

pub fn discriminant_with(params: &WeylParams, l: &[u32], convention: BasisConvention) -> Result<CenterPoly> {
    let alg = WeylAlgebra::new(params)?;
    let tf = TraceForm::new(&alg, l)?;
    let basis = CBasis::new(params, l, convention)?;
    let m = tf.trace_matrix(&basis)?;
    Ok(CenterPoly {
        poly: bareiss_determinant(&m)?,
        l: l.to_vec(),
    })
}

/// `[k]_q = 1 + q + ... + q^{k-1}`.
pub fn q_integer(q: &CycElem, k: u32) -> CycElem {
    let mut acc = CycElem::zero(q.order());
    let mut p = CycElem::one(q.order());
    for _ in 0..k {
        acc += &p;
        p = &p * q;
    }
    acc
}

/// `[k]_q! = [1]_q ... [k]_q`.
pub fn q_factorial(q: &CycElem, k: u32) -> CycElem {
    (1..=k).fold(CycElem::one(q.order()), |acc, i| acc * q_integer(q, i))
}

fn eps_elem(params: &WeylParams, j: usize, order: u32) -> CycElem {
    CycElem::root_power(order, params.eps_exponent(j, order))
}

/// `(N prod [d_j - 1]_{eps_j}!)^{N^2}` with `N = prod d_j`.
pub fn eta_factorial(params: &WeylParams) -> CycElem {
    let order = params.big_d();
    let big_n: u32 = (0..params.n()).map(|j| params.d(j)).product();
    let base = (0..params.n()).fold(CycElem::from_int(order, big_n as i64), |acc, j| {
        acc * q_factorial(&eps_elem(params, j, order), params.d(j) - 1)
    });
    base.pow((big_n as u64).pow(2))
}

/// `(N^2 prod (1 - eps_j)^{1 - d_j})^{N^2}`.
pub fn eta_alternate(params: &WeylParams) -> CycElem {
    let order = params.big_d();
    let big_n: u32 = (0..params.n()).map(|j| params.d(j)).product();
    let base = (0..params.n()).fold(CycElem::from_int(order, (big_n as i64).pow(2)), |acc, j| {
        let f = CycElem::one(order) - eps_elem(params, j, order);
        acc * f.pow_signed(1 - params.d(j) as i64).expect("1 - eps is invertible")
    });
    base.pow((big_n as u64).pow(2))
}

/// `eta prod Z_j^{N^2 (d_j - 1)/d_j}` for `L_j = d_j`.
pub fn theorem_b_rhs(params: &WeylParams) -> Result<CenterPoly> {
    if !params.is_free_over_center() {
        return Err(Error::NotFree);
    }
    let eta = eta_factorial(params);
    if eta != eta_alternate(params) {
        return Err(Error::Internal("the two expressions for eta disagree".into()));
    }
    let n = params.n();
    let big_n: u32 = (0..n).map(|j| params.d(j)).product();
    let ring = z_center_poly(params, 0)?.poly.ring().clone();
    let mut acc = MPoly::constant(&ring, eta);
    for j in 1..=n {
        let d = params.d(j - 1);
        let z = z_center_poly(params, j)?.poly;
        acc = acc * z.pow(big_n * big_n * (d - 1) / d);
    }
    Ok(CenterPoly {
        poly: acc,
        l: (0..n).map(|j| params.d(j)).collect(),
    })
}

/// The recursive closed form of the discriminant over `T[c, x^L, y^L]`.
/// Always evaluated with a formal `c`.
pub fn theorem_71_rhs(params: &WeylParams, l: &[u32]) -> Result<CenterPoly> {
    params.check_central_powers(l)?;
    let n = params.n();
    let ring = center_ring(n, true);
    let mut names: Vec<(String, bool)> = ring.names().iter().map(|s| (s.clone(), false)).collect();
    names.push(("w".into(), false));
    let ext = VarTable::new(&names)?;
    let poly = rec71(params, l, 0, &ext)?;
    let g = l.iter().fold(0u32, |g, &x| g.gcd(&x));
    if !c_exponents_divisible(&poly, g) {
        return Err(Error::Divisibility(format!(
            "closed form is not a polynomial in c^{g}"
        )));
    }
    let mut out = MPoly::zero(&ring, poly.order());
    for (m, c) in poly.terms() {
        let e = m.exps();
        out.push_term(e[..e.len() - 1].to_vec(), c.clone());
    }
    Ok(CenterPoly { poly: out, l: l.to_vec() })
}

fn rec71(params: &WeylParams, l: &[u32], j: usize, ext: &Arc<VarTable>) -> Result<MPoly> {
    let order = params.big_d();
    let n = params.n();
    if j == n {
        return Ok(MPoly::one(ext, order));
    }
    let var = |name: &str| MPoly::var(ext, order, name).expect("known variable");
    let (d, lj) = (params.d(j), l[j]);
    let lambda: u32 = l[j..].iter().map(|&x| x * x).product();
    let one_minus = CycElem::one(order) - eps_elem(params, j, order);
    let theta = CycElem::from_int(order, lj as i64).pow(lambda as u64)
        * (one_minus.pow_signed(1 - d as i64).expect("invertible").scale_int(lj as i64)).pow(lambda as u64);
    let (xj, yj) = (var(&format!("X{}", j + 1)), var(&format!("Y{}", j + 1)));
    let xy_pow = (lj - d) * lambda / lj;
    let c = var("c");
    let edge = c.pow(lj) - (&yj * &xj).scale(&one_minus.pow(lj as u64));
    let prefactor = (xj.pow(xy_pow) * yj.pow(xy_pow) * edge.pow((d - 1) * lambda / lj)).scale(&theta);

    let inner = rec71(params, l, j + 1, ext)?;
    if !c_exponents_divisible(&inner, d) {
        return Err(Error::Divisibility(format!(
            "inner discriminant is not a polynomial in c^{d}"
        )));
    }
    let r = lj / d;
    let big = order.lcm(&r);
    let inner_big = inner.map_coeffs(big, |x| x.embed(big).expect("embedding"));
    let c_idx = ext.index("c").expect("c");
    let w_big = MPoly::var(ext, big, "w")?;
    let c_big = MPoly::var(ext, big, "c")?;
    let k = one_minus.embed(big)?.pow(d as u64);
    let mut product = MPoly::one(ext, big);
    for i in 0..r {
        let zeta_i = CycElem::root_power(big, (big / r * i) as i64);
        let target = c_big.pow(d) - w_big.scale(&(&zeta_i * &k));
        let mut powers = vec![MPoly::one(ext, big)];
        let mut sub = MPoly::zero(ext, big);
        for (m, coef) in inner_big.terms() {
            let mut e = m.exps().to_vec();
            let t = (e[c_idx] as u32 / d) as usize;
            e[c_idx] = 0;
            while powers.len() <= t {
                let next = powers.last().unwrap() * &target;
                powers.push(next);
            }
            sub = sub + powers[t].shift(&e).scale(coef);
        }
        product = product * sub;
    }
    // w^{r s} becomes (X_j Y_j)^s; coefficients return to the base field.
    let w_idx = ext.index("w").expect("w");
    let (x_idx, y_idx) = (
        ext.index(&format!("X{}", j + 1)).expect("X"),
        ext.index(&format!("Y{}", j + 1)).expect("Y"),
    );
    let mut collapsed = MPoly::zero(ext, order);
    for (m, coef) in product.terms() {
        let mut e = m.exps().to_vec();
        if !(e[w_idx] as u32).is_multiple_of(r) {
            return Err(Error::DescentFailure);
        }
        let s = e[w_idx] / r as i32;
        e[w_idx] = 0;
        e[x_idx] += s;
        e[y_idx] += s;
        let c = coef.descend(order).ok_or(Error::DescentFailure)?;
        collapsed = collapsed + MPoly::monomial(ext, e, c);
    }
    Ok(prefactor * collapsed.pow(d * lj))
}

/// True iff every exponent of `c` (if present) is divisible by `g`.
pub fn c_exponents_divisible(p: &MPoly, g: u32) -> bool {
    match p.ring().index("c") {
        None => true,
        Some(i) => g == 0 || p.terms().all(|(m, _)| (m.exps()[i] as u32).is_multiple_of(g)),
    }
}

/// Sets `c = 1`, landing in the center ring without `c`.
pub fn specialize_c(p: &CenterPoly) -> Result<CenterPoly> {
    let n = p.l.len();
    let target = center_ring(n, false);
    let one = MPoly::one(&target, p.poly.order());
    Ok(CenterPoly {
        poly: p.poly.substitute(&[("c", one)], &target)?,
        l: p.l.clone(),
    })
}

/// Part of `p` of top weight, where `X_j` and `Y_j` have weight `(j+1) L_j`
/// and `c` has weight zero.
pub fn top_weighted_part(p: &CenterPoly) -> MPoly {
    let ring = p.poly.ring();
    let weight = |e: &[i32]| -> i64 {
        (0..p.l.len())
            .map(|j| {
                let w = (j as i64 + 1) * p.l[j] as i64;
                let x = ring.index(&format!("X{}", j + 1)).map_or(0, |i| e[i]);
                let y = ring.index(&format!("Y{}", j + 1)).map_or(0, |i| e[i]);
                w * (x + y) as i64
            })
            .sum()
    };
    let top = p.poly.terms().map(|(m, _)| weight(m.exps())).max();
    let mut out = MPoly::zero(ring, p.poly.order());
    if let Some(t) = top {
        for (m, c) in p.poly.terms() {
            if weight(m.exps()) == t {
                out.push_term(m.exps().to_vec(), c.clone());
            }
        }
    }
    out
}

/// `Lambda^Lambda prod (X_j Y_j)^{Lambda (L_j - 1)/L_j}`, the discriminant of
/// the associated graded algebra.
pub fn graded_prediction(ring: &Arc<VarTable>, order: u32, l: &[u32]) -> MPoly {
    let lambda: u64 = l.iter().map(|&x| (x as u64).pow(2)).product();
    let mut out = MPoly::constant(ring, CycElem::from_int(order, lambda as i64).pow(lambda));
    for (j, &lj) in l.iter().enumerate() {
        let e = (lambda * (lj as u64 - 1) / lj as u64) as u32;
        for name in [format!("X{}", j + 1), format!("Y{}", j + 1)] {
            out = out * MPoly::var(ring, order, &name).expect("center variable").pow(e);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    TheoremB,
    Theorem71,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantReport {
    pub formula: Formula,
    pub lambda: usize,
    pub elapsed_ms: Option<u128>,
    pub associate: bool,
    pub certified_unit: bool,
    pub unit: Option<Associate>,
    /// `None` outside formal-c mode.
    pub c_power_divisible: Option<bool>,
    pub lhs: CenterPoly,
    pub rhs: CenterPoly,
}

/// Computes the discriminant and the chosen closed form and compares them up
/// to a unit.
pub fn verify_discriminant(params: &WeylParams, l: &[u32], formula: Formula) -> Result<DiscriminantReport> {
    let start = Instant::now();
    let (params, rhs) = match formula {
        Formula::TheoremB => {
            let expect: Vec<u32> = (0..params.n()).map(|j| params.d(j)).collect();
            if l != expect.as_slice() {
                return Err(Error::InvalidParams("the unit-c closed form needs L_j = d_j".into()));
            }
            (params.clone(), theorem_b_rhs(params)?)
        }
        Formula::Theorem71 => {
            let p = params.with_mode(Mode {
                c_formal: true,
                ..params.mode().clone()
            })?;
            let rhs = theorem_71_rhs(&p, l)?;
            (p, rhs)
        }
    };
    let lhs = discriminant(&params, l)?;
    let unit = is_associate(&lhs.poly, &rhs.poly);
    let g = l.iter().fold(0u32, |g, &x| g.gcd(&x));
    Ok(DiscriminantReport {
        formula,
        lambda: l.iter().map(|&x| (x * x) as usize).product(),
        elapsed_ms: Some(start.elapsed().as_millis()),
        associate: unit.is_some(),
        certified_unit: unit.as_ref().is_some_and(|u| u.is_certified_unit()),
        unit,
        c_power_divisible: params.mode().c_formal.then(|| c_exponents_divisible(&lhs.poly, g)),
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::MPoly;

    fn p(eps: &[(i64, i64)], beta: &[(usize, usize, i64, i64)]) -> WeylParams {
        WeylParams::new(eps, beta).unwrap()
    }

    fn cmode(params: &WeylParams) -> WeylParams {
        params
            .with_mode(Mode {
                c_formal: true,
                ..Mode::default()
            })
            .unwrap()
    }

    #[test]
    fn q_numbers() {
        let w = CycElem::root(3);
        assert_eq!(q_factorial(&w, 2), CycElem::one(3) + w.clone());
        assert_eq!(q_integer(&w, 3), CycElem::zero(3));
        let m = CycElem::root(2);
        assert!(q_factorial(&m, 1).is_one());
    }

    #[test]
    fn basis_shape() {
        let params = p(&[(1, 2), (1, 2)], &[]);
        let b = CBasis::new(&params, &[2, 2], BasisConvention::YFirst).unwrap();
        assert_eq!(b.len(), 16);
        assert!(b.elements.iter().all(|e| e.a.iter().chain(&e.b).all(|&x| x < 2)));
        assert!(CBasis::new(&params, &[3, 2], BasisConvention::YFirst).is_err());
    }

    #[test]
    fn representation_basics() {
        let params = p(&[(1, 2)], &[]);
        let alg = WeylAlgebra::new(&params).unwrap();
        let tf = TraceForm::new(&alg, &[2]).unwrap();
        let b = CBasis::new(&params, &[2], BasisConvention::YFirst).unwrap();
        let id = tf.regular_representation(&alg.one(), &b).unwrap();
        assert_eq!(id, PolyMatrix::identity(tf.ring(), 2, 4));
        let rx = tf.regular_representation(&alg.x(0), &b).unwrap();
        let rx2 = tf.regular_representation(&alg.x(0).pow(2), &b).unwrap();
        assert_eq!(rx.mul(&rx), rx2);
        let z = alg.z(1).unwrap();
        let rz = tf.regular_representation(&z, &b).unwrap();
        let rz2 = tf.regular_representation(&z.pow(2), &b).unwrap();
        assert_eq!(rz.mul(&rz), rz2);
        let big_z = z_center_poly(&params, 1).unwrap().poly;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { big_z.clone() } else { MPoly::zero(tf.ring(), 2) };
                assert_eq!(rz2.get(i, j), &want);
            }
        }
        assert_eq!(tf.trace(&alg.one()), MPoly::from_int(tf.ring(), 2, 4));
        assert!(tf.trace(&alg.x(0)).is_zero());
        let yx = alg.y(0) * alg.x(0);
        assert_eq!(Some(tf.trace(&yx)), tf.regular_representation(&yx, &b).unwrap().trace());
    }

    #[test]
    fn x_first_representation_matches_trace() {
        let params = p(&[(1, 3)], &[]);
        let alg = WeylAlgebra::new(&params).unwrap();
        let tf = TraceForm::new(&alg, &[3]).unwrap();
        let bx = CBasis::new(&params, &[3], BasisConvention::XFirst).unwrap();
        let u = alg.y(0).pow(2) * alg.x(0).pow(2) + alg.y(0) * alg.x(0);
        let m = tf.regular_representation(&u, &bx).unwrap();
        assert_eq!(m.trace(), Some(tf.trace(&u)));
        let v = alg.x(0) * alg.y(0).pow(2);
        let mv = tf.regular_representation(&v, &bx).unwrap();
        assert_eq!(m.mul(&mv), tf.regular_representation(&(&u * &v), &bx).unwrap());
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta_factorial(&p(&[(1, 2)], &[])), CycElem::from_int(2, 16));
        let three = p(&[(1, 3)], &[]);
        let w = CycElem::root(3);
        let want = (CycElem::one(3) + w).scale_int(3).pow(9);
        assert_eq!(eta_factorial(&three), want);
        assert_eq!(eta_alternate(&three), want);
        let two = p(&[(1, 2), (1, 2)], &[]);
        assert_eq!(eta_factorial(&two), CycElem::from_int(2, 4).pow(16));
    }

    #[test]
    fn unit_c_closed_form_small() {
        let params = p(&[(1, 2)], &[]);
        assert_eq!(theorem_b_rhs(&params).unwrap().to_string(), "256*X1^2*Y1^2 - 128*X1*Y1 + 16");
        let r = verify_discriminant(&params, &[2], Formula::TheoremB).unwrap();
        assert!(r.associate && r.certified_unit, "{} vs {}", r.lhs, r.rhs);
    }

    #[test]
    fn formal_c_closed_form_hand_values() {
        let one = cmode(&p(&[(1, 2)], &[]));
        let ring = center_ring(1, true);
        let v = |s: &str| MPoly::var(&ring, 2, s).unwrap();
        let k = |x: i64| MPoly::from_int(&ring, 2, x);
        let edge = v("c").pow(2) - k(4) * v("Y1") * v("X1");
        assert_eq!(theorem_71_rhs(&one, &[2]).unwrap().poly, k(16) * edge.pow(2));
        let edge4 = v("c").pow(4) - k(16) * v("Y1") * v("X1");
        let want = MPoly::constant(&ring, CycElem::from_int(2, 2).pow(48))
            * v("X1").pow(8)
            * v("Y1").pow(8)
            * edge4.pow(4);
        assert_eq!(theorem_71_rhs(&one, &[4]).unwrap().poly, want);
    }

    #[test]
    fn small_discriminants() {
        let params = p(&[(1, 2)], &[]);
        let d = discriminant(&cmode(&params), &[2]).unwrap();
        let rhs = theorem_71_rhs(&cmode(&params), &[2]).unwrap();
        assert!(is_associate(&d.poly, &rhs.poly).is_some(), "{d}");
        let top = top_weighted_part(&d);
        assert!(is_associate(&top, &graded_prediction(d.poly.ring(), 2, &[2])).is_some());
        let dx = discriminant_with(&params, &[2], BasisConvention::XFirst).unwrap();
        let dy = discriminant(&params, &[2]).unwrap();
        assert!(is_associate(&dx.poly, &dy.poly).is_some());
    }

    #[test]
    fn closed_forms_agree_at_c_one() {
        for params in [p(&[(1, 2)], &[]), p(&[(1, 3)], &[])] {
            let d = params.d(0);
            let b = theorem_b_rhs(&params).unwrap();
            let t = specialize_c(&theorem_71_rhs(&params, &[d]).unwrap()).unwrap();
            assert!(is_associate(&b.poly, &t.poly).is_some_and(|a| a.is_certified_unit()));
        }
    }
}
