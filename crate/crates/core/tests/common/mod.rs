//! Corpus builders and independent oracles shared by the integration tests
//! and the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeMap;

use desing::chart::{Chart, DivisorLabel, LabelAlloc, LabelOrigin};
use desing::ideal::IdealBasis;
use desing::idealistic::{IdealisticSpace, MarkedIdeal};
use desing::io::parse_poly;
use desing::monomial::{monomial_resolve, LogState, MonomialResolution};
use desing::poly::{rat, CoordSubspace, Monomial, Poly, Rational};
use rand::Rng;

pub fn names(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|s| s.to_string()).collect()
}

pub fn poly(vars: &[&str], text: &str) -> Poly {
    parse_poly(text, &names(vars)).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Space on the full chart with old labels E1, E2, ... on the `labeled` variables.
pub fn space(vars: &[&str], ideals: &[(&str, u32)], labeled: &[&str]) -> IdealisticSpace {
    let mut chart = Chart::with_names(vars).unwrap();
    for (i, name) in labeled.iter().enumerate() {
        let var = chart.var_index(name).unwrap();
        chart = chart.with_label(DivisorLabel { id: i as u32 + 1, origin: LabelOrigin::Old }, var).unwrap();
    }
    let ideals = ideals.iter().map(|(text, mark)| MarkedIdeal::new(poly(vars, text), *mark)).collect();
    IdealisticSpace::new(chart, ideals).unwrap()
}

/// Same data immersed in the subspace where `zeroed` vanish.
pub fn immersed(vars: &[&str], ideals: &[(&str, u32)], zeroed: &[&str]) -> IdealisticSpace {
    let s = space(vars, ideals, &[]);
    let chart = s.chart();
    let sub = CoordSubspace::new(zeroed.iter().map(|n| chart.var_index(n).unwrap()).collect::<Vec<_>>()).unwrap();
    s.with_chart(chart.clone().with_subspace(Some(sub)).unwrap()).unwrap()
}

pub fn center(space: &IdealisticSpace, vars: &[&str]) -> CoordSubspace {
    CoordSubspace::new(vars.iter().map(|n| space.chart().var_index(n).unwrap()).collect::<Vec<_>>()).unwrap()
}

pub fn cusp() -> IdealisticSpace {
    space(&["x", "y"], &[("y^2 - x^3", 2)], &[])
}

pub fn cusp_immersed() -> IdealisticSpace {
    immersed(&["x", "y"], &[("x^3", 2)], &["y"])
}

pub fn tacnode() -> IdealisticSpace {
    space(&["x", "y"], &[("y^2 - x^4", 2)], &[])
}

pub fn umbrella() -> IdealisticSpace {
    space(&["x", "y", "z"], &[("x^2 - y^2*z", 2)], &[])
}

pub fn e8() -> IdealisticSpace {
    space(&["x", "y", "z"], &[("z^2 + x^3 + y^5", 2)], &[])
}

/// x·(z² − x³) with the old label on x.
pub fn adjust_example() -> IdealisticSpace {
    space(&["x", "z"], &[("x*(z^2 - x^3)", 2)], &["x"])
}

// ---------------------------------------------------------------------------
// Monomial engine against literal monomials.

fn label(id: u32) -> DivisorLabel {
    DivisorLabel { id, origin: LabelOrigin::Old }
}

/// Labels E1..Ek with the given exponents and control.
pub fn log_state(exponents: &[u32], control: u32) -> LogState {
    LogState::new(exponents.iter().enumerate().map(|(i, &a)| (label(i as u32 + 1), a)).collect(), control).unwrap()
}

pub fn random_log_state(rng: &mut impl Rng) -> LogState {
    let labels = rng.gen_range(1..=5);
    let exponents: Vec<u32> = (0..labels).map(|_| rng.gen_range(0..=10)).collect();
    log_state(&exponents, rng.gen_range(1..=12))
}

/// The monomial ∏ x_D^{a_D} with mark d, label E_i on variable x_i.
pub fn literal_space(state: &LogState) -> IdealisticSpace {
    let vars: Vec<String> = state.exponents().keys().map(|l| format!("x{}", l.id)).collect();
    let mut chart = Chart::new(vars).unwrap();
    for (var, label) in state.exponents().keys().enumerate() {
        chart = chart.with_label(*label, var).unwrap();
    }
    let monomial = predicted_monomial(&chart, state);
    IdealisticSpace::new(chart, vec![MarkedIdeal::new(Poly::term(monomial, rat(1)), state.control())]).unwrap()
}

fn predicted_monomial(chart: &Chart, state: &LogState) -> Monomial {
    Monomial::from_exponents((0..chart.nvars()).map(|v| chart.label_on(v).map_or(0, |l| state.exponent(&l))).collect())
}

fn matches_prediction(space: &IdealisticSpace, state: &LogState) -> Result<(), String> {
    let chart = space.chart();
    let labels_present = state
        .exponents()
        .iter()
        .filter(|(_, &a)| a > 0)
        .all(|(l, _)| chart.label_by_id(l.id).is_some_and(|(found, _)| found == *l));
    if !labels_present {
        return Err(format!("labels of {state:?} missing from chart {:?}", chart.divisor()));
    }
    let expected = MarkedIdeal::new(Poly::term(predicted_monomial(chart, state), rat(1)), state.control());
    if space.ideals() != [expected.clone()] {
        return Err(format!("expected {expected:?}, found {:?}", space.ideals()));
    }
    Ok(())
}

/// Runs the exponent game, then replays every center as a coordinate blow-up
/// of the literal monomial and compares each chart with the predicted state.
pub fn analytic_crosscheck(state: &LogState, fuel: usize) -> Result<MonomialResolution, String> {
    let root = literal_space(state);
    let run = monomial_resolve(state, &mut LabelAlloc::after(root.chart()), fuel).map_err(|e| e.to_string())?;
    let mut alloc = LabelAlloc::after(root.chart());
    let mut spaces: Vec<Option<IdealisticSpace>> = vec![None; run.nodes.len()];
    spaces[0] = Some(root);
    for (i, step) in run.steps.iter().enumerate() {
        let parent = spaces[step.node].clone().ok_or("step on an unreached node")?;
        let chart = parent.chart();
        let var_of = |l: &DivisorLabel| chart.label_by_id(l.id).map(|(_, v)| v).ok_or(format!("label {l:?} not in chart"));
        let vars = step.center.iter().map(var_of).collect::<Result<Vec<_>, _>>()?;
        let center = CoordSubspace::new(vars).map_err(|e| e.to_string())?;
        let children = parent.blow_up(&center, &mut alloc, i as u32 + 1).map_err(|e| e.to_string())?;
        for &child in &run.nodes[step.node].children {
            let node = &run.nodes[child];
            let wanted = node.dropped.as_ref().map(var_of).transpose()?;
            let (_, transform) = children
                .iter()
                .find(|(map, _)| wanted.is_none() || map.exceptional_var() == wanted)
                .ok_or(format!("no chart for node {child}"))?;
            let transform = transform.clone().ok_or(format!("node {child} has no transform"))?;
            matches_prediction(&transform, &node.state).map_err(|e| format!("node {child}: {e}"))?;
            spaces[child] = Some(transform);
        }
    }
    Ok(run)
}

// ---------------------------------------------------------------------------
// Emptiness against a finite grid.

/// A random form among x_i − c (c ∈ {−1, 0, 1}), x_i − x_j, x_i + x_j.
/// Every intersection of such hyperplanes that is nonempty over ℂ has a
/// point in {−1, 0, 1}ⁿ: free classes go to 0, pinned ones to ±c.
fn random_linear_form(rng: &mut impl Rng, n: usize) -> Poly {
    let i = rng.gen_range(0..n);
    let xi = Poly::var(n, i);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    match rng.gen_range(0..3) {
        0 => &xi - &Poly::constant(n, rat(rng.gen_range(-1..=1))),
        1 => &xi - &Poly::var(n, j),
        _ => &xi + &Poly::var(n, j),
    }
}

/// Two to five generators, each a product of one or two linear forms, in
/// two or three variables.
pub fn random_linear_product_ideal(rng: &mut impl Rng) -> IdealBasis {
    let n = rng.gen_range(2..=3);
    let generators: Vec<Poly> = (0..rng.gen_range(2..=5))
        .map(|_| (0..rng.gen_range(1..=2)).fold(Poly::one(n), |acc, _| &acc * &random_linear_form(rng, n)))
        .collect();
    IdealBasis::new(n, generators).unwrap()
}

pub fn grid_has_zero(ideal: &IdealBasis) -> bool {
    let n = ideal.nvars();
    let values = [rat(-1), rat(0), rat(1)];
    (0..3usize.pow(n as u32)).any(|code| {
        let point: Vec<Rational> = (0..n).map(|k| values[code / 3usize.pow(k as u32) % 3].clone()).collect();
        ideal.generators().iter().all(|g| g.evaluate(&point).unwrap() == rat(0))
    })
}

/// Ideal-by-ideal agreement of `is_empty_variety` with the grid search;
/// returns the number of empty varieties seen.
pub fn grid_agreement(seed: u64, count: usize) -> Result<usize, String> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut empty = 0;
    for k in 0..count {
        let ideal = random_linear_product_ideal(&mut rng);
        let claimed = desing::ideal::is_empty_variety(&ideal).map_err(|e| e.to_string())?;
        if claimed == grid_has_zero(&ideal) {
            return Err(format!("ideal {k} {:?}: is_empty_variety = {claimed}", ideal.generators()));
        }
        empty += usize::from(claimed);
    }
    Ok(empty)
}

/// Exponents by label name, for failure messages.
pub fn describe(state: &LogState) -> BTreeMap<String, u32> {
    state.exponents().iter().map(|(l, a)| (l.name(), *a)).collect()
}
