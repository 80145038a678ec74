use proptest::prelude::*;

use super::*;
use crate::poly::{rat, ratio, Monomial};

fn old(id: LabelId) -> DivisorLabel {
    DivisorLabel { id, origin: LabelOrigin::Old }
}

fn subspace(vars: &[usize]) -> CoordSubspace {
    CoordSubspace::new(vars.iter().copied()).unwrap()
}

#[test]
fn plane_origin_blowup() {
    let chart = Chart::with_names(&["x", "y"]).unwrap();
    let mut alloc = LabelAlloc::starting_at(1);
    let children = blowup_charts(&chart, &subspace(&[0, 1]), &mut alloc, 1).unwrap();
    assert_eq!(children.len(), 2);
    let xy = Poly::from_int_terms(2, &[(1, &[1, 1])]);
    let (c0, m0) = &children[0];
    assert_eq!(m0.images, vec![Poly::var(2, 0), xy.clone()]);
    let (c1, m1) = &children[1];
    assert_eq!(m1.images, vec![xy, Poly::var(2, 1)]);
    let label = m0.exceptional.unwrap().0;
    assert_eq!(label, m1.exceptional.unwrap().0);
    assert_eq!(label.origin, LabelOrigin::Exceptional { step: 1 });
    assert_eq!(c0.label_on(0), Some(label));
    assert_eq!(c1.label_on(1), Some(label));
    assert_eq!(alloc.peek(), 2);
}

#[test]
fn axis_blowup_fixes_third_variable() {
    let chart = Chart::with_names(&["x", "y", "z"]).unwrap();
    let mut alloc = LabelAlloc::default();
    let children = blowup_charts(&chart, &subspace(&[0, 1]), &mut alloc, 1).unwrap();
    assert_eq!(children.len(), 2);
    for (_, map) in &children {
        assert_eq!(map.images[2], Poly::var(3, 2));
    }
}

#[test]
fn small_center_is_rejected() {
    let chart = Chart::with_names(&["x", "y"]).unwrap();
    let mut alloc = LabelAlloc::default();
    assert_eq!(blowup_charts(&chart, &subspace(&[0]), &mut alloc, 1).unwrap_err(), ChartError::CenterTooSmall(1));
}

#[test]
fn labels_on_center_follow_strict_transform() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_label(old(1), 0).unwrap();
    let mut alloc = LabelAlloc::after(&chart);
    let children = blowup_charts(&chart, &subspace(&[0, 1]), &mut alloc, 1).unwrap();
    // chart x: the old label on x is dropped
    assert_eq!(children[0].0.divisor().len(), 1);
    assert_eq!(children[0].0.label_on(0).unwrap().id, 2);
    // chart y: the old label persists on x
    assert_eq!(children[1].0.label_on(0), Some(old(1)));
    assert_eq!(children[1].0.label_on(1).unwrap().id, 2);
}

#[test]
fn immersed_chart_loses_charts_inside_n() {
    let chart = Chart::with_names(&["x", "y", "z"]).unwrap().with_subspace(Some(subspace(&[2]))).unwrap();
    let mut alloc = LabelAlloc::default();
    let maps = blowup_maps(&chart, &subspace(&[0, 1, 2]), &mut alloc, 1).unwrap();
    assert_eq!(maps.len(), 3);
    assert!(chart.apply(&maps[2]).unwrap().is_none());
    assert_eq!(blowup_charts(&chart, &subspace(&[0, 1, 2]), &mut alloc, 1).unwrap().len(), 2);
}

#[test]
fn projection_examples() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_label(old(1), 0).unwrap();
    let (one, _) = open_projection(&chart, 1).unwrap();
    assert_eq!(one.nvars(), 3);
    assert_eq!(one.divisor(), chart.divisor());
    let (two, map) = open_projection(&chart, 2).unwrap();
    assert_eq!(two.divisor(), chart.divisor());
    assert_eq!(map.kind, MapKind::Projection);
    assert!(map.exceptional.is_none());
    let (chained, _) = open_projection(&one, 1).unwrap();
    assert_eq!(chained.nvars(), two.nvars());
    assert_eq!(chained.variables(), two.variables());
}

#[test]
fn restriction_examples() {
    let chart = Chart::with_names(&["x", "z"]).unwrap().with_label(old(1), 0).unwrap();
    let r = chart.restrict_to_subspace(&subspace(&[1])).unwrap();
    assert_eq!(r.variables(), &["x".to_string()]);
    assert_eq!(r.label_on(0), Some(old(1)));
    assert!(matches!(chart.restrict_to_subspace(&subspace(&[0])), Err(ChartError::NotTransverse { .. })));
    let plain = Chart::with_names(&["x", "y", "z"]).unwrap();
    let r = plain.restrict_to_subspace(&subspace(&[2])).unwrap();
    assert_eq!(r.variables(), &["x".to_string(), "y".to_string()]);
}

#[test]
fn transversality_is_enforced() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_label(old(1), 0).unwrap();
    assert!(chart.clone().with_subspace(Some(subspace(&[0]))).is_err());
    assert!(chart.with_label(old(2), 0).is_err());
}

#[test]
fn identity_division_reuses_existing_label() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_label(old(1), 0).unwrap();
    let mut alloc = LabelAlloc::after(&chart);
    let (same, map) = identity_division(&chart, 0, &mut alloc, 1).unwrap();
    assert_eq!(same.divisor(), chart.divisor());
    assert_eq!(map.exceptional, Some((old(1), 0)));
    let (fresh, map) = identity_division(&chart, 1, &mut alloc, 1).unwrap();
    assert_eq!(fresh.divisor().len(), 2);
    assert_eq!(map.exceptional.unwrap().0.id, 2);
    assert_eq!(map.exceptional_var(), Some(1));
}

#[test]
fn coordinate_change_keeps_hyperplanes() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_label(old(1), 0).unwrap();
    let shift = Poly::from_int_terms(2, &[(1, &[2, 0])]);
    let (child, map) = coordinate_change(&chart, 1, &shift).unwrap();
    assert_eq!(child.divisor(), chart.divisor());
    assert_eq!(map.images[1], Poly::from_int_terms(2, &[(1, &[0, 1]), (1, &[2, 0])]));
    assert!(coordinate_change(&chart, 0, &Poly::one(2)).is_err());
    assert!(coordinate_change(&chart, 1, &Poly::var(2, 1)).is_err());
}

#[test]
fn cover_splits_along_a_labeled_variable() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_label(old(1), 0).unwrap();
    let [(away, _), (rest, _)] = cover(&chart, 0, &rat(-1)).unwrap();
    assert!(away.divisor().is_empty());
    assert_eq!(away.region(), &Poly::var(2, 0));
    assert_eq!(rest.divisor(), chart.divisor());
    assert_eq!(rest.region(), &Poly::from_int_terms(2, &[(1, &[1, 0]), (1, &[0, 0])]));
    assert_eq!(cover(&chart, 0, &rat(0)).unwrap_err(), ChartError::ZeroCoverValue);
}

#[test]
fn region_is_pulled_back() {
    let chart = Chart::with_names(&["x", "y"]).unwrap().with_region(Poly::var(2, 1));
    let mut alloc = LabelAlloc::default();
    let children = blowup_charts(&chart, &subspace(&[0, 1]), &mut alloc, 1).unwrap();
    assert_eq!(children[0].0.region(), &Poly::from_int_terms(2, &[(1, &[1, 1])]));
    assert!(!children[0].0.is_whole_chart());
}

/// Controlled transform f(σ(z)) / z_ℓ^d of a blow-up chart.
fn transform(f: &Poly, map: &ChartMap, d: u32) -> Poly {
    let ell = map.exceptional_var().unwrap();
    let pulled = f.compose(&map.images).unwrap();
    pulled.divide_exact_monomial(&Monomial::var(f.nvars(), ell).pow_by(d)).unwrap()
}

trait PowBy {
    fn pow_by(&self, d: u32) -> Monomial;
}

impl PowBy for Monomial {
    fn pow_by(&self, d: u32) -> Monomial {
        Monomial::from_exponents(self.exponents().iter().map(|e| e * d).collect())
    }
}

fn gluing_holds(f: &Poly, a: &Rational, b: &Rational) -> bool {
    let chart = Chart::with_names(&["x", "y"]).unwrap();
    let mut alloc = LabelAlloc::default();
    let d = f.order_at_origin().finite().unwrap();
    let maps = blowup_maps(&chart, &subspace(&[0, 1]), &mut alloc, 1).unwrap();
    let (fx, fy) = (transform(f, &maps[0], d), transform(f, &maps[1], d));
    // chart x point (a, b) is chart y point (1/b, a·b); f_y = f_x / b^d there
    let lhs = fy.evaluate(&[b.recip(), a * b]).unwrap();
    let rhs = fx.evaluate(&[a.clone(), b.clone()]).unwrap() / num_traits::pow(b.clone(), d as usize);
    lhs == rhs
}

#[test]
fn gluing_on_plane_examples() {
    let cusp = Poly::from_int_terms(2, &[(1, &[0, 2]), (-1, &[3, 0])]);
    let tacnode = Poly::from_int_terms(2, &[(1, &[0, 2]), (-1, &[4, 0])]);
    let node = Poly::from_int_terms(2, &[(1, &[0, 2]), (-1, &[2, 0]), (-1, &[3, 0])]);
    let points = [(rat(1), rat(2)), (ratio(-3, 2), ratio(5, 7)), (rat(4), rat(-1))];
    for f in [cusp, tacnode, node] {
        for (a, b) in &points {
            assert!(gluing_holds(&f, a, b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_stay_on_distinct_variables(
        centers in prop::collection::vec(prop::collection::btree_set(0usize..4, 2..=4), 1..5),
        picks in prop::collection::vec(0usize..4, 5),
    ) {
        let mut chart = Chart::with_names(&["a", "b", "c", "d"]).unwrap().with_label(old(1), 3).unwrap();
        let mut alloc = LabelAlloc::after(&chart);
        let mut last_step = 0;
        for (step, (center, pick)) in centers.iter().zip(&picks).enumerate() {
            let step = step as u32 + 1;
            let children = blowup_charts(&chart, &CoordSubspace::new(center.iter().copied()).unwrap(), &mut alloc, step).unwrap();
            chart = children[pick % children.len()].0.clone();
            let vars: BTreeSet<usize> = chart.divisor().values().copied().collect();
            prop_assert_eq!(vars.len(), chart.divisor().len());
            let newest = chart.labels().filter_map(|l| match l.origin {
                LabelOrigin::Exceptional { step } => Some(step),
                LabelOrigin::Old => None,
            }).max().unwrap();
            prop_assert!(newest > last_step);
            last_step = newest;
        }
    }

    #[test]
    fn gluing_on_random_curves(
        coeffs in prop::collection::vec(-3i64..=3, 6),
        a in 1i64..5, b in 1i64..5,
    ) {
        // terms of degree 2 and 3 so the origin is a singular point
        let exps: [&[u32]; 6] = [&[2, 0], &[1, 1], &[0, 2], &[3, 0], &[1, 2], &[0, 3]];
        let f = Poly::from_terms(2, coeffs.iter().zip(exps).map(|(c, e)| (Monomial::from_exponents(e.to_vec()), rat(*c))));
        prop_assume!(!f.is_zero());
        prop_assert!(gluing_holds(&f, &rat(a), &ratio(-b, 3)));
    }
}

#[test]
fn tree_paths_and_leaves() {
    let chart = Chart::with_names(&["x", "y"]).unwrap();
    let mut tree: ChartTree<(), &'static str> = ChartTree::new(chart.clone(), ());
    let mut alloc = LabelAlloc::default();
    for (c, m) in blowup_charts(&chart, &subspace(&[0, 1]), &mut alloc, 1).unwrap() {
        tree.add_child(0, m, c, ());
    }
    tree.push_trace("blow up {x, y}");
    assert_eq!(tree.len(), 3);
    assert_eq!(tree.leaves().count(), 2);
    assert_eq!(tree.path_to(2), vec![0, 2]);
    assert_eq!(tree.trace().len(), 1);
}
