//! Isomorphisms `x_j -> mu_j x'_j, y_j -> nu_j y'_j` (tau_j = 1) or
//! `x_j -> mu_j y'_j, y_j -> nu_j x'_j` (tau_j = -1), the isomorphism test
//! between parameter sets and the shape of the automorphism group.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::params::{Mode, RawParams, WeylParams};
use crate::polyring::{MPoly, VarTable};
use crate::weyl::{GeneratorImages, WeylAlgebra, WeylElem};

fn congruent(a: Ratio<i64>, b: Ratio<i64>) -> bool {
    (a - b).is_integer()
}

/// `eps'_j = eps_j^{tau_j}` and the `beta'` rule, as exponents mod 1.
fn identity_violation(source: &WeylParams, target: &WeylParams, tau: &[i8]) -> Option<(usize, Option<usize>)> {
    let n = source.n();
    for j in 0..n {
        let t = Ratio::from(tau[j] as i64);
        if !congruent(target.eps(j).ratio(), source.eps(j).ratio() * t) {
            return Some((j + 1, None));
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let t = Ratio::from(tau[j] as i64);
            let b = source.beta(j, k).ratio();
            let want = if tau[k] == 1 { b * t } else { -(source.eps(j).ratio() + b) * t };
            if !congruent(target.beta(j, k).ratio(), want) {
                return Some((j + 1, Some(k + 1)));
            }
        }
    }
    None
}

/// `tau_j prod_{k <= j, tau_k = -1} eps_k^{-1}` in `Q(zeta_order)`.
pub fn required_product(source: &WeylParams, tau: &[i8], j: usize, order: u32) -> CycElem {
    let mut e = 0i64;
    for k in 0..=j {
        if tau[k] == -1 {
            e -= source.eps_exponent(k, order);
        }
    }
    CycElem::root_power(order, e).scale_int(tau[j] as i64)
}

fn check_tau(tau: &[i8], n: usize) -> Result<()> {
    if tau.len() != n || tau.iter().any(|&t| t != 1 && t != -1) {
        return Err(Error::InvalidParams(format!("tau must be {n} signs")));
    }
    Ok(())
}

/// The parameters `(E', B')` forced by `tau`.
pub fn transport_params(source: &WeylParams, tau: &[i8]) -> Result<WeylParams> {
    let n = source.n();
    check_tau(tau, n)?;
    let frac = |r: Ratio<i64>| [*r.numer(), *r.denom()];
    let eps = (0..n)
        .map(|j| frac(source.eps(j).ratio() * tau[j] as i64))
        .collect();
    let mut beta = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let b = source.beta(j, k).ratio();
            let t = tau[j] as i64;
            let r = if tau[k] == 1 { b * t } else { -(source.eps(j).ratio() + b) * t };
            let [m, d] = frac(r);
            beta.push([j as i64 + 1, k as i64 + 1, m, d]);
        }
    }
    WeylParams::validate(&RawParams {
        n,
        eps,
        beta,
        mode: Mode::default(),
    })
}

/// A candidate isomorphism with its defining data.
#[derive(Clone, Debug)]
pub struct AutSpec {
    pub tau: Vec<i8>,
    pub mu: Vec<MPoly>,
    pub nu: Vec<MPoly>,
    pub source: WeylParams,
    pub target: WeylParams,
}

/// Coefficient ring for scalars: the formal units, all invertible.
pub fn unit_ring(units: &[String]) -> Result<Arc<VarTable>> {
    let vars: Vec<(String, bool)> = units.iter().map(|u| (u.clone(), true)).collect();
    VarTable::new(&vars)
}

/// `lcm(D, D')`.
pub fn scalar_order(source: &WeylParams, target: &WeylParams) -> u32 {
    source.big_d().lcm(&target.big_d())
}

/// Validates the identities and builds the spec.
pub fn build_automorphism(
    source: &WeylParams,
    target: &WeylParams,
    tau: &[i8],
    mu: Vec<MPoly>,
    nu: Vec<MPoly>,
) -> Result<AutSpec> {
    let n = source.n();
    if target.n() != n {
        return Err(Error::InvalidParams(format!("rank {} vs {}", n, target.n())));
    }
    check_tau(tau, n)?;
    if mu.len() != n || nu.len() != n {
        return Err(Error::InvalidParams(format!("need {n} values of mu and nu")));
    }
    let order = scalar_order(source, target);
    let ring = mu[0].ring().clone();
    for s in mu.iter().chain(&nu) {
        if s.ring() != &ring || s.order() != order {
            return Err(Error::InvalidParams(format!(
                "scalars must live over the same units in Q(e_{order})"
            )));
        }
        if s.unit_inverse().is_none() {
            return Err(Error::NonInvertibleImage(s.to_string()));
        }
    }
    if let Some((j, k)) = identity_violation(source, target, tau) {
        return Err(Error::IdentityViolation { j, k });
    }
    for j in 0..n {
        let want = MPoly::constant(&ring, required_product(source, tau, j, order));
        if &mu[j] * &nu[j] != want {
            return Err(Error::IdentityViolation { j: j + 1, k: None });
        }
    }
    Ok(AutSpec {
        tau: tau.to_vec(),
        mu,
        nu,
        source: source.clone(),
        target: target.clone(),
    })
}

/// The spec with `mu_j` a formal unit `u_j` and `nu_j` forced by the identities.
pub fn formal_automorphism(source: &WeylParams, tau: &[i8]) -> Result<AutSpec> {
    let target = transport_params(source, tau)?;
    formal_isomorphism(source, &target, tau)
}

/// As [`formal_automorphism`] for a given target.
pub fn formal_isomorphism(source: &WeylParams, target: &WeylParams, tau: &[i8]) -> Result<AutSpec> {
    let n = source.n();
    check_tau(tau, n)?;
    let units: Vec<String> = (1..=n).map(|j| format!("u{j}")).collect();
    let ring = unit_ring(&units)?;
    let order = scalar_order(source, target);
    let mu: Vec<MPoly> = units.iter().map(|u| MPoly::var(&ring, order, u)).collect::<Result<_>>()?;
    let nu = (0..n)
        .map(|j| mu[j].unit_inverse().expect("unit").scale(&required_product(source, tau, j, order)))
        .collect();
    build_automorphism(source, target, tau, mu, nu)
}

impl AutSpec {
    pub fn order(&self) -> u32 {
        scalar_order(&self.source, &self.target)
    }

    pub fn units(&self) -> Vec<String> {
        self.mu[0].ring().names().to_vec()
    }

    fn algebra_for(&self, p: &WeylParams) -> Result<Arc<WeylAlgebra>> {
        let q = p.with_mode(Mode {
            formal_units: self.units(),
            ..Mode::default()
        })?;
        WeylAlgebra::with_order(&q, self.order())
    }

    /// Source and target algebras over the shared scalar ring.
    pub fn algebras(&self) -> Result<(Arc<WeylAlgebra>, Arc<WeylAlgebra>)> {
        Ok((self.algebra_for(&self.source)?, self.algebra_for(&self.target)?))
    }

    /// Images of the source generators in `target`.
    pub fn images(&self, target: &Arc<WeylAlgebra>) -> Result<GeneratorImages> {
        let n = self.source.n();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for j in 0..n {
            let mu = target.scalar(self.mu[j].extend_ring(target.coeff_ring())?);
            let nu = target.scalar(self.nu[j].extend_ring(target.coeff_ring())?);
            if self.tau[j] == 1 {
                x.push(mu * target.x(j));
                y.push(nu * target.y(j));
            } else {
                x.push(mu * target.y(j));
                y.push(nu * target.x(j));
            }
        }
        Ok(GeneratorImages { x, y })
    }

    /// Applies the map to an element of the source algebra (as returned by
    /// [`AutSpec::algebras`]).
    pub fn apply(&self, u: &WeylElem) -> Result<WeylElem> {
        let (_, t) = self.algebras()?;
        u.apply_generator_images(&self.images(&t)?)
    }
}

/// Checks every defining relation of the source on the images.
pub fn verify_homomorphism(spec: &AutSpec) -> Result<bool> {
    let (_, t) = spec.algebras()?;
    let img = spec.images(&t)?;
    let p = &spec.source;
    let n = p.n();
    let order = t.order();
    let root = |e: i64| t.scalar(t.coeff_const(CycElem::root_power(order, e)).expect("order"));
    let eps = |j: usize| p.eps_exponent(j, order);
    let beta = |j: usize, k: usize| p.beta_exponent(j, k, order);
    let (x, y) = (&img.x, &img.y);
    let mut z = t.one();
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            if &y[j] * &y[k] != root(beta(j, k)) * &y[k] * &y[j] {
                return Ok(false);
            }
            if j < k {
                if &x[j] * &x[k] != root(eps(j) + beta(j, k)) * &x[k] * &x[j] {
                    return Ok(false);
                }
                if &x[j] * &y[k] != root(beta(k, j)) * &y[k] * &x[j] {
                    return Ok(false);
                }
            } else if &x[j] * &y[k] != root(eps(k) + beta(k, j)) * &y[k] * &x[j] {
                return Ok(false);
            }
        }
        if &x[j] * &y[j] - root(eps(j)) * &y[j] * &x[j] != z {
            return Ok(false);
        }
        z = z + (root(eps(j)) - t.one()) * &y[j] * &x[j];
    }
    Ok(true)
}

/// The inverse map, from target to source.
pub fn invert(spec: &AutSpec) -> Result<AutSpec> {
    let n = spec.tau.len();
    let inv = |s: &MPoly| s.unit_inverse().ok_or_else(|| Error::NonInvertibleImage(s.to_string()));
    let mut mu = Vec::with_capacity(n);
    let mut nu = Vec::with_capacity(n);
    for j in 0..n {
        if spec.tau[j] == 1 {
            mu.push(inv(&spec.mu[j])?);
            nu.push(inv(&spec.nu[j])?);
        } else {
            mu.push(inv(&spec.nu[j])?);
            nu.push(inv(&spec.mu[j])?);
        }
    }
    build_automorphism(&spec.target, &spec.source, &spec.tau, mu, nu)
}

/// `second` after `first`.
pub fn compose(first: &AutSpec, second: &AutSpec) -> Result<AutSpec> {
    if first.target.to_raw().eps != second.source.to_raw().eps || first.order() != second.order() {
        return Err(Error::ModeMismatch);
    }
    let n = first.tau.len();
    let ring = first.mu[0].ring().clone();
    let lift = |s: &MPoly| s.extend_ring(&ring);
    let (mut mu, mut nu, mut tau) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..n {
        let (m2, n2) = (lift(&second.mu[j])?, lift(&second.nu[j])?);
        if first.tau[j] == 1 {
            mu.push(&first.mu[j] * &m2);
            nu.push(&first.nu[j] * &n2);
        } else {
            mu.push(&first.mu[j] * &n2);
            nu.push(&first.nu[j] * &m2);
        }
        tau.push(first.tau[j] * second.tau[j]);
    }
    build_automorphism(&first.source, &second.target, &tau, mu, nu)
}

/// All sign sequences in lexicographic order, `+1` before `-1`.
pub fn sign_sequences(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u64..1 << n).map(move |bits| {
        (0..n)
            .map(|j| if bits >> (n - 1 - j) & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

/// The first `tau` making the two parameter sets isomorphic, if any.
pub fn isomorphic(p1: &WeylParams, p2: &WeylParams) -> Result<Option<Vec<i8>>> {
    if !p1.is_free_over_center() || !p2.is_free_over_center() {
        return Err(Error::NotFree);
    }
    if p1.n() != p2.n() {
        return Ok(None);
    }
    Ok(sign_sequences(p1.n()).find(|tau| identity_violation(p1, p2, tau).is_none()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AutShape {
    /// `(T^x)^n x| Z_2`, with the swap at `k` (1-based).
    SemidirectZ2 { k: usize },
    /// `(T^x)^n`.
    Torus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeReport {
    pub shape: AutShape,
    /// Every `k` satisfying the swap condition (1-based).
    pub candidates: Vec<usize>,
    /// The condition forces `eps_j = -1` for `j < k` when `d_j | d_k`.
    pub forces_minus_one_below: bool,
}

/// Whether `eps_k = -1`, `beta_jk^2 = eps_j` (j < k) and `beta_jk^2 = 1` (j > k).
pub fn swap_condition(p: &WeylParams, k: usize) -> bool {
    let half = Ratio::new(1, 2);
    if !congruent(p.eps(k).ratio(), half) {
        return false;
    }
    (0..p.n()).filter(|&j| j != k).all(|j| {
        let b2 = p.beta(j, k).ratio() * 2;
        if j < k {
            congruent(b2, p.eps(j).ratio())
        } else {
            b2.is_integer()
        }
    })
}

pub fn aut_group_shape(p: &WeylParams) -> ShapeReport {
    let candidates: Vec<usize> = (0..p.n()).filter(|&k| swap_condition(p, k)).map(|k| k + 1).collect();
    let shape = match candidates.first() {
        Some(&k) => AutShape::SemidirectZ2 { k },
        None => AutShape::Torus,
    };
    let forces = candidates.iter().all(|&k| {
        (0..k - 1).all(|j| congruent(p.eps(j).ratio(), Ratio::new(1, 2)) || !p.d(k - 1).is_multiple_of(p.d(j)))
    });
    ShapeReport {
        shape,
        candidates,
        forces_minus_one_below: forces,
    }
}

/// JSON form of an [`AutSpec`]; scalars are expressions over the units.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutSpecJson {
    pub source: RawParams,
    pub target: RawParams,
    pub tau: Vec<i8>,
    #[serde(default)]
    pub units: Vec<String>,
    pub mu: Vec<String>,
    pub nu: Vec<String>,
}

impl AutSpecJson {
    pub fn parse(text: &str) -> Result<AutSpec> {
        let raw: AutSpecJson = serde_json::from_str(text)?;
        raw.build()
    }

    pub fn build(&self) -> Result<AutSpec> {
        let source = WeylParams::validate(&self.source)?;
        let target = WeylParams::validate(&self.target)?;
        let order = scalar_order(&source, &target);
        let ring = unit_ring(&self.units)?;
        let parse = |s: &String| crate::expr::parse_scalar(s, &ring, order);
        let mu = self.mu.iter().map(parse).collect::<Result<_>>()?;
        let nu = self.nu.iter().map(parse).collect::<Result<_>>()?;
        build_automorphism(&source, &target, &self.tau, mu, nu)
    }
}

impl Serialize for AutSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AutSpecJson {
            source: self.source.to_raw(),
            target: self.target.to_raw(),
            tau: self.tau.clone(),
            units: self.units(),
            mu: self.mu.iter().map(|m| m.to_string()).collect(),
            nu: self.nu.iter().map(|m| m.to_string()).collect(),
        }
        .serialize(s)
    }
}
