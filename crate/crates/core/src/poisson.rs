//! The Poisson bracket induced on the center by the one-parameter
//! deformation `eps_j = q^{d_n m_j / d_j}` and specialization `q = eps`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::center::{center_ring, to_center_poly, z_center_poly, CenterPoly};
use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::params::{Mode, WeylParams};
use crate::polyring::{MPoly, VarTable};
use crate::weyl::{PbwKey, WeylAlgebra, WeylElem};

/// The q-mode copy of `params`. Fails unless every `d_j` and `d_jk` divides `d_n`.
pub fn q_deform(params: &WeylParams) -> Result<WeylParams> {
    let p = params.with_mode(Mode {
        q_deformed: true,
        ..Mode::default()
    })?;
    p.q_order()?;
    Ok(p)
}

/// A q-element specializing to a given central element.
#[derive(Clone, Debug)]
pub struct CentralLift {
    pub target: CenterPoly,
    pub lift: WeylElem,
}

/// The pair `(A_q, A_eps)` together with the center ring.
pub struct PoissonContext {
    params: WeylParams,
    aq: Arc<WeylAlgebra>,
    a: Arc<WeylAlgebra>,
    ring: Arc<VarTable>,
    eps: CycElem,
}

impl PoissonContext {
    pub fn new(params: &WeylParams) -> Result<Self> {
        if !params.is_free_over_center() {
            return Err(Error::NotFree);
        }
        let qp = q_deform(params)?;
        let up = params.with_mode(Mode::default())?;
        let aq = WeylAlgebra::new(&qp)?;
        let a = WeylAlgebra::new(&up)?;
        let order = aq.order();
        if a.order() != order {
            return Err(Error::OrderMismatch {
                left: a.order(),
                right: order,
            });
        }
        Ok(PoissonContext {
            params: up,
            ring: center_ring(params.n(), false),
            eps: CycElem::root(order),
            aq,
            a,
        })
    }

    pub fn params(&self) -> &WeylParams {
        &self.params
    }

    pub fn q_algebra(&self) -> &Arc<WeylAlgebra> {
        &self.aq
    }

    pub fn algebra(&self) -> &Arc<WeylAlgebra> {
        &self.a
    }

    pub fn ring(&self) -> &Arc<VarTable> {
        &self.ring
    }

    pub fn order(&self) -> u32 {
        self.aq.order()
    }

    /// The primitive `d_n`-th root `eps` with `eps_j = eps^{d_n m_j / d_j}`.
    pub fn eps(&self) -> &CycElem {
        &self.eps
    }

    fn l(&self) -> Vec<u32> {
        (0..self.params.n()).map(|j| self.params.d(j)).collect()
    }

    /// `q = eps`, coefficient-wise.
    pub fn specialize(&self, u: &WeylElem) -> Result<WeylElem> {
        let target = self.a.coeff_ring().clone();
        let at = MPoly::constant(&target, self.eps.clone());
        u.transfer(&self.a, |c| c.substitute(&[("q", at.clone())], &target))
    }

    /// Copies the normal form of `u` into `A_q` with the same coefficients.
    pub fn lift_element(&self, u: &WeylElem) -> Result<WeylElem> {
        let mut out = self.aq.zero();
        for (k, c) in u.terms() {
            let cc = c.as_constant().ok_or(Error::ModeMismatch)?;
            out = out + self.aq.term(k.clone(), self.aq.coeff_const(cc)?);
        }
        Ok(out)
    }

    /// `X^alpha Y^beta` goes to `y^{beta d} x^{alpha d}` in `A_q`.
    pub fn canonical_lift(&self, z: &CenterPoly) -> Result<CentralLift> {
        let n = self.params.n();
        let z = self.to_ring(z)?;
        let mut lift = self.aq.zero();
        for (m, c) in z.poly.terms() {
            let e = m.exps();
            let mut key = vec![0u32; 2 * n];
            for j in 0..n {
                let d = self.params.d(j);
                key[n + j] = e[j] as u32 * d;
                key[j] = e[n + j] as u32 * d;
            }
            lift = lift + self.aq.term(PbwKey::new(key), self.aq.coeff_const(c.clone())?);
        }
        Ok(CentralLift { target: z, lift })
    }

    fn to_ring(&self, z: &CenterPoly) -> Result<CenterPoly> {
        if z.l != self.l() {
            return Err(Error::InvalidParams("brackets need L_j = d_j".into()));
        }
        if z.poly.ring().index("c").is_some_and(|i| z.poly.degree_in(i).unwrap_or(0) > 0) {
            return Err(Error::UnknownVariable("c".into()));
        }
        let poly = if z.poly.ring() == &self.ring {
            z.poly.clone()
        } else {
            let one = MPoly::one(&self.ring, z.poly.order());
            z.poly.substitute(&[("c", one)], &self.ring)?
        };
        Ok(CenterPoly { poly, l: z.l.clone() })
    }

    fn divide(&self, u: &WeylElem) -> Result<WeylElem> {
        let mut out = self.aq.zero();
        for (k, c) in u.terms() {
            let qd = c.divide_by_linear("q", &self.eps).map_err(|e| match e {
                Error::NotDivisibleByLinear(_) => Error::LiftsNotCentral,
                other => other,
            })?;
            out = out + self.aq.term(k.clone(), qd);
        }
        Ok(out)
    }

    /// `sigma([c1, c2] / (q - eps))` for arbitrary lifts.
    pub fn bracket_of_lifts(&self, c1: &WeylElem, c2: &WeylElem) -> Result<CenterPoly> {
        let s = self.specialize(&self.divide(&c1.commutator(c2)?)?)?;
        to_center_poly(&s, &self.l())
            .ok_or_else(|| Error::Recognition(format!("bracket value {s} is not in the center")))
    }

    pub fn bracket(&self, z1: &CenterPoly, z2: &CenterPoly) -> Result<CenterPoly> {
        let c1 = self.canonical_lift(z1)?;
        let c2 = self.canonical_lift(z2)?;
        self.bracket_of_lifts(&c1.lift, &c2.lift)
    }

    /// `sigma([c, a~] / (q - eps))` with `a~` the coefficient-wise lift of `u`.
    pub fn hamiltonian_derivation(&self, lift: &CentralLift, u: &WeylElem) -> Result<WeylElem> {
        let ut = self.lift_element(u)?;
        self.specialize(&self.divide(&lift.lift.commutator(&ut)?)?)
    }

    pub fn var(&self, name: &str) -> CenterPoly {
        CenterPoly {
            poly: MPoly::var(&self.ring, self.order(), name).expect("center variable"),
            l: self.l(),
        }
    }

    /// `Z_j` in the center ring, `0 <= j <= n`.
    pub fn z(&self, j: usize) -> Result<CenterPoly> {
        self.to_ring(&z_center_poly(&self.params, j)?)
    }

    pub fn poly(&self, p: MPoly) -> CenterPoly {
        CenterPoly { poly: p, l: self.l() }
    }
}

/// `{z1, z2}` for the parameters of `params`.
pub fn poisson_bracket(params: &WeylParams, z1: &CenterPoly, z2: &CenterPoly) -> Result<CenterPoly> {
    PoissonContext::new(params)?.bracket(z1, z2)
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketCheck {
    pub left: String,
    pub right: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop33Report {
    pub checks: Vec<BracketCheck>,
    pub pass: bool,
}

/// Every bracket among `X_j, Y_j, Z_j` against its closed form, compared exactly.
pub fn verify_prop33(params: &WeylParams) -> Result<Prop33Report> {
    let ctx = PoissonContext::new(params)?;
    let p = ctx.params().clone();
    let n = p.n();
    let order = ctx.order();
    let dn = p.d(n - 1) as i64;
    let eps_inv = CycElem::root_power(order, dn - 1);
    let ring = ctx.ring().clone();
    let rat = |num: i64, den: i64| -> CycElem {
        CycElem::from_rational(order, num_rational::BigRational::new(num.into(), den.into()))
    };
    let xv = |j: usize| ctx.var(&format!("X{}", j + 1)).poly;
    let yv = |j: usize| ctx.var(&format!("Y{}", j + 1)).poly;
    let d = |j: usize| p.d(j) as i64;
    // `d_j d_k d_n m_jk / d_jk`
    let beta_coeff = |j: usize, k: usize| {
        let b = p.beta(j, k);
        rat(d(j) * d(k) * dn * b.m, b.d as i64)
    };

    let mut cases: Vec<(String, String, MPoly, MPoly, MPoly)> = Vec::new();
    let name = |s: &str, j: usize| format!("{s}{}", j + 1);
    for j in 0..n {
        let eps_j = CycElem::root_power(order, p.eps_exponent(j, order));
        let k_j = (CycElem::one(order) - eps_j).pow_signed(-d(j)).expect("invertible");
        // z_{j-1}^{d_j} = Z_{j-1}^{d_j / d_{j-1}}
        let zprev = ctx.z(j)?.poly.pow(if j == 0 { 1 } else { p.d(j) / p.d(j - 1) });
        let want = (xv(j) * yv(j) - zprev.scale(&k_j)).scale(&(rat(p.m(j) * d(j) * dn, 1) * &eps_inv));
        cases.push((name("X", j), name("Y", j), xv(j), yv(j), want));
        for k in 0..n {
            if j == k {
                continue;
            }
            let want = (yv(j) * yv(k)).scale(&(beta_coeff(j, k) * &eps_inv));
            if j < k {
                cases.push((name("Y", j), name("Y", k), yv(j), yv(k), want));
                let want = -(xv(j) * yv(k)).scale(&(beta_coeff(j, k) * &eps_inv));
                cases.push((name("X", j), name("Y", k), xv(j), yv(k), want));
                let b = p.beta(j, k);
                let c = rat(d(j) * d(k) * dn, 1) * (rat(p.m(j), d(j)) + rat(b.m, b.d as i64));
                let want = (xv(j) * xv(k)).scale(&(c * &eps_inv));
                cases.push((name("X", j), name("X", k), xv(j), xv(k), want));
            } else {
                let b = p.beta(k, j);
                let c = rat(d(j) * d(k) * dn, 1) * (rat(p.m(k), d(k)) + rat(b.m, b.d as i64));
                let want = (xv(j) * yv(k)).scale(&(c * &eps_inv));
                cases.push((name("X", j), name("Y", k), xv(j), yv(k), want));
            }
        }
    }
    for j in 1..=n {
        let zj = ctx.z(j)?.poly;
        for k in 0..n {
            let coef = if k < j {
                rat(p.m(k) * p.d(j - 1) as i64 * dn, 1) * &eps_inv
            } else {
                CycElem::zero(order)
            };
            cases.push((format!("Z{j}"), name("X", k), zj.clone(), xv(k), -(&zj * &xv(k)).scale(&coef)));
            cases.push((format!("Z{j}"), name("Y", k), zj.clone(), yv(k), (&zj * &yv(k)).scale(&coef)));
        }
        for k in 1..=n {
            if k != j {
                let zk = ctx.z(k)?.poly;
                cases.push((format!("Z{j}"), format!("Z{k}"), zj.clone(), zk, MPoly::zero(&ring, order)));
            }
        }
    }
    let checks: Vec<BracketCheck> = cases
        .into_par_iter()
        .map(|(ln, rn, f, g, want)| {
            let got = ctx.bracket(&ctx.poly(f), &ctx.poly(g));
            let (computed, pass) = match got {
                Ok(v) => (v.poly.to_string(), v.poly == want),
                Err(e) => (format!("error: {e}"), false),
            };
            BracketCheck {
                left: ln,
                right: rn,
                computed,
                expected: want.to_string(),
                pass,
            }
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(Prop33Report { checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eps: &[(i64, i64)], beta: &[(usize, usize, i64, i64)]) -> WeylParams {
        WeylParams::new(eps, beta).unwrap()
    }

    #[test]
    fn deformation_exponents() {
        let q = q_deform(&p(&[(1, 2), (1, 4)], &[])).unwrap();
        assert_eq!(q.eps_exponent(0, 4), 2);
        assert_eq!(q.eps_exponent(1, 4), 1);
        assert!(q_deform(&p(&[(1, 2), (1, 3)], &[])).is_err());
    }

    #[test]
    fn specialization() {
        let ctx = PoissonContext::new(&p(&[(1, 2)], &[])).unwrap();
        let aq = ctx.q_algebra();
        let q = aq.scalar(aq.coeff_var("q").unwrap());
        let rel = aq.x(0) * aq.y(0) - q * aq.y(0) * aq.x(0);
        assert_eq!(rel, aq.one());
        let zq = aq.z(1).unwrap();
        assert_eq!(ctx.specialize(&zq).unwrap(), ctx.algebra().z(1).unwrap());
        let u = aq.x(0) * aq.y(0).pow(3);
        let v = aq.y(0) * aq.x(0).pow(2) + aq.from_int(3);
        assert_eq!(
            ctx.specialize(&(&u * &v)).unwrap(),
            ctx.specialize(&u).unwrap() * ctx.specialize(&v).unwrap()
        );
    }

    #[test]
    fn lifts() {
        let ctx = PoissonContext::new(&p(&[(1, 2)], &[])).unwrap();
        let aq = ctx.q_algebra();
        assert_eq!(ctx.canonical_lift(&ctx.var("X1")).unwrap().lift, aq.x(0).pow(2));
        let z1 = ctx.canonical_lift(&ctx.z(1).unwrap()).unwrap().lift;
        let want = aq.one() - (aq.y(0).pow(2) * aq.x(0).pow(2)).scale(&aq.coeff_int(4));
        assert_eq!(z1, want);
    }

    #[test]
    fn n1_d2_brackets() {
        let ctx = PoissonContext::new(&p(&[(1, 2)], &[])).unwrap();
        let xy = ctx.bracket(&ctx.var("X1"), &ctx.var("Y1")).unwrap();
        assert_eq!(xy.to_string(), "-4*X1*Y1 + 1");
        let zx = ctx.bracket(&ctx.z(1).unwrap(), &ctx.var("X1")).unwrap();
        let want = (ctx.z(1).unwrap().poly * ctx.var("X1").poly).scale(&CycElem::from_int(2, 4));
        assert_eq!(zx.poly, want);
    }

    #[test]
    fn not_central_fails() {
        let ctx = PoissonContext::new(&p(&[(1, 2)], &[])).unwrap();
        let aq = ctx.q_algebra();
        assert!(matches!(
            ctx.bracket_of_lifts(&aq.x(0), &aq.y(0)),
            Err(Error::LiftsNotCentral)
        ));
    }

    #[test]
    fn prop33_tables() {
        for params in [
            p(&[(1, 2)], &[]),
            p(&[(1, 3)], &[]),
            p(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]),
            p(&[(1, 2), (1, 2)], &[]),
        ] {
            let r = verify_prop33(&params).unwrap();
            for c in &r.checks {
                assert!(c.pass, "{{{}, {}}}: {} vs {}", c.left, c.right, c.computed, c.expected);
            }
        }
    }

    #[test]
    fn derivation_on_generators() {
        let params = p(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]);
        let ctx = PoissonContext::new(&params).unwrap();
        let (a, aq) = (ctx.algebra(), ctx.q_algebra());
        let order = ctx.order();
        let eps_inv = CycElem::root_power(order, -1);
        for j in 1..=2usize {
            let dj = params.d(j - 1);
            let power = CentralLift {
                target: ctx.z(j).unwrap(),
                lift: aq.z(j).unwrap().pow(dj),
            };
            assert!(ctx.hamiltonian_derivation(&power, &a.one()).unwrap().is_zero());
            let zj = a.z(j).unwrap().pow(dj);
            for k in 0..2 {
                let got = ctx.hamiltonian_derivation(&power, &a.x(k)).unwrap();
                let s = if k < j {
                    CycElem::from_int(order, -(dj as i64) * 4 * params.m(k) / params.d(k) as i64) * &eps_inv
                } else {
                    CycElem::zero(order)
                };
                assert_eq!(got, (a.x(k) * &zj).scale(&a.coeff_const(s).unwrap()));
            }
            // Two lifts of Z_j differ by an inner derivation.
            let canon = ctx.canonical_lift(&ctx.z(j).unwrap()).unwrap();
            let diff = ctx.specialize(&ctx.divide(&(&canon.lift - &power.lift)).unwrap()).unwrap();
            for u in [a.x(0), a.y(1), a.y(0) * a.x(1)] {
                let lhs = ctx.hamiltonian_derivation(&canon, &u).unwrap()
                    - ctx.hamiltonian_derivation(&power, &u).unwrap();
                assert_eq!(lhs, diff.commutator(&u).unwrap());
            }
        }
    }

    #[test]
    fn printed_form_needs_power_of_previous_z() {
        // With d_1 = 2 < d_2 = 4 the bracket involves Z_1^2, not Z_1.
        let ctx = PoissonContext::new(&p(&[(1, 2), (1, 4)], &[])).unwrap();
        let got = ctx.bracket(&ctx.var("X2"), &ctx.var("Y2")).unwrap().poly;
        let z1 = ctx.z(1).unwrap().poly;
        let lin = (z1.clone() - z1.pow(2)).scale(&CycElem::from_int(4, 4));
        let xy = ctx.var("X2").poly * ctx.var("Y2").poly;
        let eps_inv = CycElem::root_power(4, -1);
        assert_eq!(got, (xy.scale(&CycElem::from_int(4, 16)) + z1.pow(2).scale(&CycElem::from_int(4, 4))).scale(&eps_inv));
        assert!(!lin.is_zero());
    }
}
