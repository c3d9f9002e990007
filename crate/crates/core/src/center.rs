//! Centrality, the spanning set of the center indexed by `C(E, B)`, the
//! central elements `Z_j`, and recognition of elements of
//! `T[c, x_j^{L_j}, y_j^{L_j}]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::linalg::{kernel, rref};
use crate::params::{ExpVec, WeylParams};
use crate::polyring::{MPoly, VarTable};
use crate::weyl::{PbwKey, WeylAlgebra, WeylElem};

/// A polynomial in `c` (optional), `X_j = x_j^{L_j}` and `Y_j = y_j^{L_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterPoly {
    pub poly: MPoly,
    pub l: Vec<u32>,
}

impl fmt::Display for CenterPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

impl Serialize for CenterPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CenterPoly", 3)?;
        st.serialize_field("text", &self.poly.to_string())?;
        st.serialize_field("L", &self.l)?;
        st.serialize_field("poly", &self.poly)?;
        st.end()
    }
}

/// Variables of the center ring: `[c] X1..Xn Y1..Yn`.
pub fn center_ring(n: usize, c_formal: bool) -> Arc<VarTable> {
    let mut vars: Vec<(String, bool)> = Vec::new();
    if c_formal {
        vars.push(("c".into(), false));
    }
    for j in 1..=n {
        vars.push((format!("X{j}"), false));
    }
    for j in 1..=n {
        vars.push((format!("Y{j}"), false));
    }
    VarTable::new(&vars).expect("distinct names")
}

fn cvar(ring: &Arc<VarTable>, order: u32, name: &str) -> MPoly {
    MPoly::var(ring, order, name).expect("center variable")
}

/// True iff `u` commutes with every generator.
pub fn is_central(u: &WeylElem) -> bool {
    let alg = u.algebra();
    (0..alg.n()).all(|j| {
        u.commutator(&alg.x(j)).map(|c| c.is_zero()).unwrap_or(false)
            && u.commutator(&alg.y(j)).map(|c| c.is_zero()).unwrap_or(false)
    })
}

/// All exponent vectors of total degree at most `bound`.
pub fn exponents_up_to(n: usize, bound: u32) -> Vec<ExpVec> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; 2 * n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<ExpVec>) {
        if i == cur.len() {
            let n = cur.len() / 2;
            out.push(ExpVec {
                b: cur[..n].to_vec(),
                a: cur[n..].to_vec(),
            });
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, bound, &mut cur, &mut out);
    out.sort();
    out
}

/// `prod y_j^{max(b-a,0)} prod z_j^{min(b,a)} prod x_j^{max(a-b,0)}`.
pub fn spanning_element(alg: &Arc<WeylAlgebra>, e: &ExpVec) -> Result<WeylElem> {
    let n = alg.n();
    let mut ys = ExpVec::zero(n);
    let mut xs = ExpVec::zero(n);
    let mut u = alg.one();
    for j in 0..n {
        ys.b[j] = e.b[j].saturating_sub(e.a[j]);
        xs.a[j] = e.a[j].saturating_sub(e.b[j]);
    }
    u = u * alg.monomial(&ys);
    for j in 0..n {
        let m = e.b[j].min(e.a[j]);
        if m > 0 {
            u = u * alg.z(j + 1)?.pow(m);
        }
    }
    Ok(u * alg.monomial(&xs))
}

/// A member of the spanning set of the center.
#[derive(Clone, Debug)]
pub struct SpanningMonomial {
    pub exp: ExpVec,
    pub element: WeylElem,
}

/// The spanning set of the center over `Q(eps)` restricted to total degree
/// at most `bound`.
pub fn center_spanning_monomials(params: &WeylParams, bound: u32) -> Result<Vec<SpanningMonomial>> {
    let alg = WeylAlgebra::new(params)?;
    exponents_up_to(params.n(), bound)
        .into_iter()
        .filter(|e| params.in_ceb(e))
        .map(|e| {
            let element = spanning_element(&alg, &e)?;
            Ok(SpanningMonomial { exp: e, element })
        })
        .collect()
}

/// `Z_0 = 1` (or `c`), `Z_j = -(1 - eps_j)^{d_j} Y_j X_j + Z_{j-1}^{d_j/d_{j-1}}`
/// for `1 <= j <= n`, with `d_0 = 1`. Requires freeness over the center.
pub fn z_center_poly(params: &WeylParams, j: usize) -> Result<CenterPoly> {
    if !params.is_free_over_center() {
        return Err(Error::NotFree);
    }
    let n = params.n();
    if j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let c_formal = params.mode().c_formal;
    let ring = center_ring(n, c_formal);
    let order = params.big_d();
    let mut z = if c_formal {
        cvar(&ring, order, "c")
    } else {
        MPoly::one(&ring, order)
    };
    let mut d_prev = 1u32;
    for i in 0..j {
        let d = params.d(i);
        let eps = CycElem::root_power(order, params.eps_exponent(i, order));
        let k = (CycElem::one(order) - eps).pow(d as u64);
        let yx = cvar(&ring, order, &format!("Y{}", i + 1)) * cvar(&ring, order, &format!("X{}", i + 1));
        z = z.pow(d / d_prev) - yx.scale(&k);
        d_prev = d;
    }
    Ok(CenterPoly {
        poly: z,
        l: (0..n).map(|i| params.d(i)).collect(),
    })
}

/// Recognizes `u` as a polynomial in `c`, `x_j^{L_j}`, `y_j^{L_j}`.
pub fn to_center_poly(u: &WeylElem, l: &[u32]) -> Option<CenterPoly> {
    let alg = u.algebra();
    let n = alg.n();
    if l.len() != n || alg.is_q_mode() || !alg.params().mode().formal_units.is_empty() {
        return None;
    }
    let ring = center_ring(n, alg.is_c_formal());
    let mut out = MPoly::zero(&ring, alg.order());
    for (k, c) in u.terms() {
        let e = k.raw();
        let mut exps = vec![0i32; ring.len()];
        let off = usize::from(alg.is_c_formal());
        for j in 0..n {
            let (b, a) = (e[j], e[n + j]);
            if b % l[j] != 0 || a % l[j] != 0 {
                return None;
            }
            exps[off + j] = (a / l[j]) as i32;
            exps[off + n + j] = (b / l[j]) as i32;
        }
        let cc = c.extend_ring(&ring).ok()?;
        out = out + cc.shift(&exps);
    }
    Some(CenterPoly {
        poly: out,
        l: l.to_vec(),
    })
}

/// Realizes a center polynomial in `alg`, sending `X^alpha Y^beta` to
/// `y^{beta L} x^{alpha L}`.
pub fn center_element(alg: &Arc<WeylAlgebra>, z: &CenterPoly) -> Result<WeylElem> {
    let n = alg.n();
    let ring = z.poly.ring();
    let idx = |name: String| ring.index(&name);
    let c_idx = ring.index("c");
    let mut out = alg.zero();
    for (m, c) in z.poly.terms() {
        let e = m.exps();
        let mut key = vec![0u32; 2 * n];
        for j in 0..n {
            if let Some(i) = idx(format!("X{}", j + 1)) {
                key[n + j] = e[i] as u32 * z.l[j];
            }
            if let Some(i) = idx(format!("Y{}", j + 1)) {
                key[j] = e[i] as u32 * z.l[j];
            }
        }
        let mut coeff = alg.coeff_const(c.clone())?;
        if let Some(ci) = c_idx {
            if e[ci] > 0 {
                coeff = coeff * alg.coeff_var("c")?.pow(e[ci] as u32);
            }
        }
        out = out + alg.term(PbwKey::new(key), coeff);
    }
    Ok(out)
}

/// Checks `z_j^{d_j} = -(1 - eps_j)^{d_j} y_j^{d_j} x_j^{d_j} + z_{j-1}^{d_j}`
/// in the algebra and that `z_j^{d_j}` recognizes to `Z_j`. Here `j` is the
/// 1-based index of `z_j`; `j = 0` holds trivially.
pub fn verify_specz(params: &WeylParams, j: usize) -> Result<bool> {
    let expected = z_center_poly(params, j)?;
    if j == 0 {
        return Ok(true);
    }
    let alg = WeylAlgebra::new(params)?;
    let d = params.d(j - 1);
    let zj = alg.z(j)?.pow(d);
    let mut yx = ExpVec::zero(params.n());
    yx.b[j - 1] = d;
    yx.a[j - 1] = d;
    let k = (alg.coeff_one() - alg.eps_scalar(j - 1)).pow(d);
    let rhs = alg.z(j - 1)?.pow(d) - alg.monomial(&yx).scale(&k);
    if zj != rhs {
        return Ok(false);
    }
    let l: Vec<u32> = (0..params.n()).map(|i| params.d(i)).collect();
    Ok(to_center_poly(&zj, &l).is_some_and(|got| got == expected))
}

/// Outcome of the brute-force central-element scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub bound: u32,
    /// Leading exponents of a basis of central elements, found by linear algebra.
    pub found: Vec<ExpVec>,
    /// Exponents predicted by `C(E, B)`.
    pub predicted: Vec<ExpVec>,
    pub agree: bool,
}

/// Finds all central elements of total degree at most `bound` by solving
/// the linear system `[u, x_j] = [u, y_j] = 0` one Z^n-degree at a time,
/// and compares their leading exponents (weights `chi_j = j`) with `C(E, B)`.
pub fn scan_center(params: &WeylParams, bound: u32) -> Result<ScanReport> {
    let alg = WeylAlgebra::new(params)?;
    let n = params.n();
    let mut classes: BTreeMap<Vec<i64>, Vec<ExpVec>> = BTreeMap::new();
    for e in exponents_up_to(n, bound) {
        classes.entry(e.grading()).or_default().push(e);
    }
    let weight = |e: &ExpVec| -> u64 {
        (0..n).map(|j| (j as u64 + 1) * (e.a[j] + e.b[j]) as u64).sum()
    };
    let classes: Vec<Vec<ExpVec>> = classes.into_values().collect();
    let found: Vec<Vec<ExpVec>> = classes
        .par_iter()
        .map(|monos| -> Result<Vec<ExpVec>> {
            // Column order: decreasing weighted degree, then decreasing exponent.
            let mut cols = monos.clone();
            cols.sort_by(|p, q| (weight(q), q).cmp(&(weight(p), p)));
            let gens: Vec<WeylElem> = (0..n).flat_map(|j| [alg.x(j), alg.y(j)]).collect();
            let mut row_index: HashMap<(usize, PbwKey), usize> = HashMap::new();
            let mut entries: Vec<(usize, usize, CycElem)> = Vec::new();
            for (ci, e) in cols.iter().enumerate() {
                let m = alg.monomial(e);
                for (gi, g) in gens.iter().enumerate() {
                    for (k, c) in m.commutator(g)?.terms() {
                        let next = row_index.len();
                        let r = *row_index.entry((gi, k.clone())).or_insert(next);
                        entries.push((r, ci, c.as_constant().expect("constant coefficients")));
                    }
                }
            }
            let order = alg.order();
            let mut rows = vec![vec![CycElem::zero(order); cols.len()]; row_index.len()];
            for (r, c, v) in entries {
                rows[r][c] = v;
            }
            let ker = kernel(rows, cols.len(), CycElem::zero(order), CycElem::one(order));
            let mut basis = ker;
            let pivots = rref(&mut basis, cols.len());
            Ok(pivots.into_iter().map(|p| cols[p].clone()).collect())
        })
        .collect::<Result<_>>()?;
    let mut found: Vec<ExpVec> = found.into_iter().flatten().collect();
    found.sort();
    let predicted: Vec<ExpVec> = exponents_up_to(n, bound)
        .into_iter()
        .filter(|e| params.in_ceb(e))
        .collect();
    let agree = found == predicted;
    Ok(ScanReport {
        bound,
        found,
        predicted,
        agree,
    })
}
