use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;

fn cusp() -> Poly {
    // y^2 - x^3 in (x, y)
    Poly::from_int_terms(2, &[(1, &[0, 2]), (-1, &[3, 0])])
}

/// Oracle: smallest |alpha| with a nonzero derivative at the point.
fn order_by_derivatives(f: &Poly, p: &RationalPoint) -> Order {
    if f.is_zero() {
        return Order::Infinite;
    }
    let n = f.nvars();
    let max = f.total_degree().unwrap();
    for k in 0..=max {
        for alpha in multi_indices(n, k) {
            if !f.derivative_multi(&alpha).evaluate(p.coords()).unwrap().is_zero() {
                return Order::Finite(k);
            }
        }
    }
    unreachable!("a nonzero polynomial has a nonzero derivative of order <= degree")
}

fn multi_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in multi_indices(n - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn origin(n: usize) -> RationalPoint {
    RationalPoint::origin(n)
}

#[test]
fn order_at_point_examples() {
    assert_eq!(cusp().order_at_point(&origin(2)).unwrap(), Order::Finite(2));
    assert_eq!(order_by_derivatives(&cusp(), &origin(2)), Order::Finite(2));
    let p = RationalPoint::new(vec![rat(5), ratio(-1, 3)]);
    assert_eq!(Poly::one(2).order_at_point(&p).unwrap(), Order::Finite(0));
    let x3 = Poly::from_int_terms(1, &[(1, &[3])]);
    assert_eq!(x3.order_at_point(&origin(1)).unwrap(), Order::Finite(3));
    assert_eq!(Poly::zero(2).order_at_point(&origin(2)).unwrap(), Order::Infinite);
    assert!(matches!(
        cusp().order_at_point(&origin(3)),
        Err(PolyError::DimensionMismatch { .. })
    ));
}

#[test]
fn order_along_examples() {
    let y = CoordSubspace::new([1]).unwrap();
    let xy = CoordSubspace::new([0, 1]).unwrap();
    assert_eq!(cusp().order_along(&y).unwrap(), Order::Finite(0));
    assert_eq!(cusp().order_along(&xy).unwrap(), Order::Finite(2));
    // x^2 y^3 z^2 - x^3 y^4
    let f = Poly::from_int_terms(3, &[(1, &[2, 3, 2]), (-1, &[3, 4, 0])]);
    assert_eq!(f.order_along(&xy).unwrap(), Order::Finite(5));
    assert!(f.order_along(&CoordSubspace::new([7]).unwrap()).is_err());
}

#[test]
fn substitute_examples() {
    // x -> x', y -> x' y'
    let mut images = BTreeMap::new();
    images.insert(0, Poly::var(2, 0));
    images.insert(1, Poly::from_int_terms(2, &[(1, &[1, 1])]));
    let expected = Poly::from_int_terms(2, &[(1, &[2, 2]), (-1, &[3, 0])]);
    assert_eq!(cusp().substitute(&images, 2).unwrap(), expected);

    let c = Poly::constant(2, ratio(7, 3));
    assert_eq!(c.substitute(&BTreeMap::new(), 4).unwrap(), Poly::constant(4, ratio(7, 3)));

    // z -> z' - x in (x, z)
    let z = Poly::var(2, 1);
    let mut shift = BTreeMap::new();
    shift.insert(1, &Poly::var(2, 1) - &Poly::var(2, 0));
    assert_eq!(z.substitute(&shift, 2).unwrap(), &Poly::var(2, 1) - &Poly::var(2, 0));

    assert_eq!(cusp().substitute(&BTreeMap::new(), 2), Err(PolyError::MissingImage(0)));
}

#[test]
fn monomial_content_examples() {
    let f = Poly::from_int_terms(3, &[(1, &[2, 3, 2]), (-1, &[3, 4, 0])]);
    let xy: BTreeSet<usize> = [0, 1].into();
    assert_eq!(f.monomial_content(&xy).unwrap(), Monomial::from_exponents(vec![2, 3, 0]));
    // z^2 - x^3 in (x, z), allowed {x}
    let g = Poly::from_int_terms(2, &[(1, &[0, 2]), (-1, &[3, 0])]);
    assert!(g.monomial_content(&[0].into()).unwrap().is_one());
    let x = Poly::var(1, 0);
    assert_eq!(x.monomial_content(&[0].into()).unwrap(), Monomial::var(1, 0));
    assert_eq!(Poly::zero(2).monomial_content(&xy), Err(PolyError::ZeroPolynomial));
}

#[test]
fn divide_exact_examples() {
    let f = Poly::from_int_terms(2, &[(1, &[2, 2]), (-1, &[3, 0])]);
    let q = f.divide_exact_monomial(&Monomial::from_exponents(vec![2, 0])).unwrap();
    assert_eq!(q, Poly::from_int_terms(2, &[(1, &[0, 2]), (-1, &[1, 0])]));
    assert!(Poly::zero(2).divide_exact_monomial(&Monomial::var(2, 1)).unwrap().is_zero());
    let g = Poly::from_int_terms(2, &[(1, &[2, 1])]);
    assert!(matches!(
        g.divide_exact_monomial(&Monomial::from_exponents(vec![3, 0])),
        Err(PolyError::NonExact { .. })
    ));
    // polynomial divisor: (x+y)(x-y) / (x-y)
    let a = &Poly::var(2, 0) + &Poly::var(2, 1);
    let b = &Poly::var(2, 0) - &Poly::var(2, 1);
    assert_eq!((&a * &b).divide_exact(&b).unwrap(), a);
    assert!((&a * &b + Poly::one(2)).divide_exact(&b).is_err());
}

#[test]
fn coefficients_in_splits_powers() {
    // z^2 + 2 x z + x^3 in (x, z)
    let f = Poly::from_int_terms(2, &[(1, &[0, 2]), (2, &[1, 1]), (1, &[3, 0])]);
    let c = f.coefficients_in(1);
    assert_eq!(c.len(), 3);
    assert_eq!(c[0], Poly::from_int_terms(2, &[(1, &[3, 0])]));
    assert_eq!(c[1], Poly::from_int_terms(2, &[(2, &[1, 0])]));
    assert_eq!(c[2], Poly::one(2));
}

#[test]
fn display_uses_names() {
    let names = vec!["x".to_string(), "y".to_string()];
    assert_eq!(cusp().display(&names).to_string(), "-x^3 + y^2");
    let half = Poly::from_terms(2, [(Monomial::from_exponents(vec![1, 1]), ratio(1, 2))]);
    assert_eq!(half.display(&names).to_string(), "1/2*x*y");
    assert_eq!(Poly::zero(2).display(&names).to_string(), "0");
}

fn small_poly(nvars: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((-4i64..=4, prop::collection::vec(0u32..=3, nvars)), 0..5).prop_map(move |terms| {
        Poly::from_terms(
            nvars,
            terms.into_iter().map(|(c, e)| (Monomial::from_exponents(e), rat(c))),
        )
    })
}

fn small_point(nvars: usize) -> impl Strategy<Value = RationalPoint> {
    prop::collection::vec((-3i64..=3, 1i64..=3), nvars)
        .prop_map(|c| RationalPoint::new(c.into_iter().map(|(n, d)| ratio(n, d)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_matches_derivative_oracle(f in small_poly(2), p in small_point(2)) {
        prop_assert_eq!(f.order_at_point(&p).unwrap(), order_by_derivatives(&f, &p));
    }

    #[test]
    fn order_is_multiplicative(f in small_poly(2), g in small_poly(2), p in small_point(2)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let of = f.order_at_point(&p).unwrap().finite().unwrap();
        let og = g.order_at_point(&p).unwrap().finite().unwrap();
        prop_assert_eq!((&f * &g).order_at_point(&p).unwrap(), Order::Finite(of + og));
    }

    #[test]
    fn order_along_bounds_points_of_subspace(f in small_poly(3), p in small_point(3), mask in 1usize..8) {
        let zeroed: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let s = CoordSubspace::new(zeroed.clone()).unwrap();
        let mut coords = p.coords().to_vec();
        for &v in &zeroed {
            coords[v] = rat(0);
        }
        let on_subspace = RationalPoint::new(coords);
        prop_assert!(f.order_along(&s).unwrap() <= f.order_at_point(&on_subspace).unwrap());
    }

    #[test]
    fn content_reconstructs(f in small_poly(3)) {
        prop_assume!(!f.is_zero());
        let allowed: BTreeSet<usize> = [0, 2].into();
        let m = f.monomial_content(&allowed).unwrap();
        let q = f.divide_exact_monomial(&m).unwrap();
        prop_assert_eq!(q.mul_term(&m, &rat(1)), f);
    }

    #[test]
    fn substitute_is_ring_homomorphism(f in small_poly(2), g in small_poly(2), a in small_poly(3), b in small_poly(3)) {
        let images = vec![a, b];
        let sub = |p: &Poly| p.compose(&images).unwrap();
        prop_assert_eq!(sub(&(&f + &g)), &sub(&f) + &sub(&g));
        prop_assert_eq!(sub(&(&f * &g)), &sub(&f) * &sub(&g));
    }

    #[test]
    fn substitute_agrees_with_evaluation(f in small_poly(2), a in small_poly(2), b in small_poly(2), p in small_point(2)) {
        let images = vec![a.clone(), b.clone()];
        let composed = f.compose(&images).unwrap();
        let inner = vec![a.evaluate(p.coords()).unwrap(), b.evaluate(p.coords()).unwrap()];
        prop_assert_eq!(composed.evaluate(p.coords()).unwrap(), f.evaluate(&inner).unwrap());
    }
}
