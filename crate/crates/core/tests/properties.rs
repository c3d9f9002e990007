//! Randomized invariants: determinants against cofactor expansion, trace
//! symmetry, specialization, automorphism round trips, parsing round trips
//! and the leading graded part of discriminants.

use std::sync::Arc;

use proptest::prelude::*;
use qweyl::autos::{formal_automorphism, invert, sign_sequences};
use qweyl::discriminant::{discriminant, graded_prediction, top_weighted_part, TraceForm};
use qweyl::expr::parse_element;
use qweyl::poisson::PoissonContext;
use qweyl::{bareiss_determinant, is_associate, CycElem, ExpVec, MPoly, Mode, PolyMatrix, VarTable, WeylAlgebra, WeylElem, WeylParams};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn ring() -> Arc<VarTable> {
    VarTable::new(&[("X", false), ("Y", false)]).unwrap()
}

fn cofactor_det(m: &[Vec<MPoly>]) -> MPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MPoly::zero(m[0][0].ring(), m[0][0].order());
    for col in 0..n {
        let minor: Vec<Vec<MPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][col] * &cofactor_det(&minor);
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn poly_strategy() -> impl Strategy<Value = MPoly> {
    proptest::collection::vec((0i32..3, 0i32..3, -3i64..4, 0i64..3), 0..3).prop_map(|terms| {
        let r = ring();
        let mut p = MPoly::zero(&r, 3);
        for (a, b, c, k) in terms {
            p = p + MPoly::monomial(&r, vec![a, b], CycElem::from_int(3, c).mul_root_power(k));
        }
        p
    })
}

fn exp_strategy(n: usize, max: u32) -> impl Strategy<Value = ExpVec> {
    (proptest::collection::vec(0..=max, n), proptest::collection::vec(0..=max, n)).prop_map(|(b, a)| ExpVec { b, a })
}

fn element(alg: &Arc<WeylAlgebra>, terms: &[(ExpVec, i64, i64)]) -> WeylElem {
    let mut u = alg.zero();
    for (e, c, k) in terms {
        let s = alg.root_scalar(*k).scale(&CycElem::from_int(alg.order(), *c));
        u = u + alg.monomial(e).scale(&s);
    }
    u
}

fn terms_strategy(n: usize, max: u32) -> impl Strategy<Value = Vec<(ExpVec, i64, i64)>> {
    proptest::collection::vec((exp_strategy(n, max), -3i64..4, 0i64..12), 1..4)
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn bareiss_matches_cofactor_expansion(size in 1usize..5, entries in proptest::collection::vec(poly_strategy(), 16)) {
        let rows: Vec<Vec<MPoly>> = (0..size).map(|i| entries[i * size..(i + 1) * size].to_vec()).collect();
        let m = PolyMatrix::new(rows.clone()).unwrap();
        prop_assert_eq!(bareiss_determinant(&m).unwrap(), cofactor_det(&rows));
    }

    #[test]
    fn trace_is_symmetric(a in terms_strategy(2, 3), b in terms_strategy(2, 3)) {
        let p = WeylParams::new(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]).unwrap();
        let alg = WeylAlgebra::new(&p).unwrap();
        let tf = TraceForm::new(&alg, &[2, 4]).unwrap();
        let (u, v) = (element(&alg, &a), element(&alg, &b));
        prop_assert_eq!(tf.trace(&(&u * &v)), tf.trace(&(&v * &u)));
    }

    #[test]
    fn trace_is_symmetric_n1(a in terms_strategy(1, 5), b in terms_strategy(1, 5)) {
        let p = WeylParams::new(&[(1, 3)], &[]).unwrap();
        let alg = WeylAlgebra::new(&p).unwrap();
        let tf = TraceForm::new(&alg, &[6]).unwrap();
        let (u, v) = (element(&alg, &a), element(&alg, &b));
        prop_assert_eq!(tf.trace(&(&u * &v)), tf.trace(&(&v * &u)));
    }

    #[test]
    fn specialization_is_multiplicative(a in terms_strategy(2, 2), b in terms_strategy(2, 2)) {
        let p = WeylParams::new(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]).unwrap();
        let ctx = PoissonContext::new(&p).unwrap();
        let aq = ctx.q_algebra();
        let (u, v) = (element(aq, &a), element(aq, &b));
        prop_assert_eq!(ctx.specialize(&(&u * &v)).unwrap(), ctx.specialize(&u).unwrap() * ctx.specialize(&v).unwrap());
    }

    #[test]
    fn rendered_elements_parse_back(a in terms_strategy(2, 3)) {
        let p = WeylParams::new(&[(1, 3), (2, 3)], &[(0, 1, 1, 3)]).unwrap();
        let alg = WeylAlgebra::new(&p).unwrap();
        let u = element(&alg, &a);
        prop_assert_eq!(parse_element(&u.to_string(), &alg).unwrap(), u);
    }

    #[test]
    fn automorphisms_invert(a in terms_strategy(2, 2), tau_index in 0usize..4) {
        let p = WeylParams::new(&[(1, 2), (1, 2)], &[(0, 1, 1, 4)]).unwrap();
        let tau = sign_sequences(2).nth(tau_index).unwrap();
        let spec = formal_automorphism(&p, &tau).unwrap();
        let back = invert(&spec).unwrap();
        let (src, _) = spec.algebras().unwrap();
        let u = element(&src, &a);
        let image = spec.apply(&u).unwrap();
        prop_assert_eq!(back.apply(&image).unwrap(), u);
    }

    #[test]
    fn automorphisms_are_multiplicative(a in terms_strategy(2, 2), b in terms_strategy(2, 2), tau_index in 0usize..4) {
        let p = WeylParams::new(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]).unwrap();
        let tau = sign_sequences(2).nth(tau_index).unwrap();
        let spec = formal_automorphism(&p, &tau).unwrap();
        let (src, _) = spec.algebras().unwrap();
        let (u, v) = (element(&src, &a), element(&src, &b));
        prop_assert_eq!(spec.apply(&(&u * &v)).unwrap(), spec.apply(&u).unwrap() * spec.apply(&v).unwrap());
    }
}

#[test]
fn discriminant_leading_part_is_graded_discriminant() {
    for (eps, l) in [((1, 2), 2), ((1, 3), 3), ((1, 4), 4), ((1, 2), 4), ((2, 3), 3)] {
        let p = WeylParams::new(&[eps], &[]).unwrap();
        let d = discriminant(&p, &[l]).unwrap();
        let want = graded_prediction(d.poly.ring(), d.poly.order(), &[l]);
        let top = top_weighted_part(&d);
        assert!(is_associate(&top, &want).is_some(), "eps={eps:?} L={l}: {top} vs {want}");
    }
    let p = WeylParams::new(&[(1, 2), (1, 2)], &[(0, 1, 1, 2)]).unwrap();
    let d = discriminant(&p, &[2, 2]).unwrap();
    let want = graded_prediction(d.poly.ring(), d.poly.order(), &[2, 2]);
    assert!(is_associate(&top_weighted_part(&d), &want).is_some());
}

#[test]
fn formal_c_discriminant_specializes() {
    // setting c = 1 commutes with taking the discriminant
    let p = WeylParams::new(&[(1, 3)], &[]).unwrap();
    let c = p
        .with_mode(Mode {
            c_formal: true,
            ..Mode::default()
        })
        .unwrap();
    let dc = discriminant(&c, &[3]).unwrap();
    let d1 = qweyl::discriminant::specialize_c(&dc).unwrap();
    let d = discriminant(&p, &[3]).unwrap();
    assert_eq!(d1.poly, d.poly);
}
