use num_traits::{One, Zero};

use super::{IdealisticError, IdealisticSpace};
use crate::chart::{open_projection, LabelAlloc};
use crate::poly::{CoordSubspace, Rational, RationalPoint};

/// Step j ≥ 1 of the curve-divisor construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrickStep {
    pub j: usize,
    pub predicted: Rational,
    /// Generic order along the current divisor D_j.
    pub actual: Rational,
    pub divisor_permissible: bool,
    pub delta_point: Rational,
    pub delta_curve: Rational,
    /// δ_P ≥ δ_X + δ_D at the point where the curve meets D_j.
    pub inequality_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrickTrace {
    pub e: Rational,
    /// Actual permissibility of D_j for 2 ≤ j < j0.
    pub branches: Vec<bool>,
    pub predicted_branches: Vec<bool>,
    pub j0: usize,
    pub matched: bool,
    pub translation: RationalPoint,
    pub steps: Vec<TrickStep>,
}

/// a_2 = e − 1; a_{j+1} = a_j − 1 when a_j ≥ 1, else a_j + e − 1; stops at
/// the first j ≥ 2 with a_j = 0.
fn predict(e: &Rational, fuel: usize) -> Result<Vec<Rational>, IdealisticError> {
    let one = Rational::one();
    let mut seq = vec![Rational::zero(), e - &one];
    while !seq.last().expect("nonempty").is_zero() {
        if seq.len() > fuel {
            return Err(IdealisticError::Fuel { what: "trick recurrence", limit: fuel });
        }
        let a = seq.last().expect("nonempty").clone();
        seq.push(if a >= one { a - &one } else { a + e - &one });
    }
    Ok(seq)
}

/// Runs the construction on M × line: blow up the divisor D_j while it is
/// permissible, otherwise the point where the curve P × line meets it.
pub fn trick_validate(space: &IdealisticSpace, point: &RationalPoint, fuel: usize) -> Result<TrickTrace, IdealisticError> {
    let e = space.delta(point)?;
    if e < Rational::one() {
        return Err(IdealisticError::NotSingular(e));
    }
    let predicted = predict(&e, fuel)?;
    let local = space.translated(point)?;
    let (_, map) = open_projection(local.chart(), 1)?;
    let mut current = local.controlled_transform(&map)?.expect("projection keeps N");
    let t = current.nvars() - 1;
    let zeroed = current.chart().zeroed();
    let divisor = CoordSubspace::new(zeroed.iter().copied().chain([t]))?;
    let curve = CoordSubspace::new((0..t).collect::<Vec<_>>())?;
    let point_center = CoordSubspace::new(0..=t)?;
    let mut alloc = LabelAlloc::after(current.chart());
    let mut steps = Vec::new();
    let mut j = 1usize;
    loop {
        let actual = current.delta_along(&divisor)?;
        let delta_point = current.delta_at_origin();
        let delta_curve = current.delta_along(&curve)?;
        let permissible = j >= 2 && current.is_permissible_center(&divisor)?;
        steps.push(TrickStep {
            j,
            predicted: predicted.get(j - 1).cloned().unwrap_or_else(Rational::zero),
            actual: actual.clone(),
            divisor_permissible: permissible,
            inequality_holds: delta_point >= &delta_curve + &actual,
            delta_point,
            delta_curve,
        });
        if j >= 2 && actual.is_zero() {
            break;
        }
        if j > fuel {
            return Err(IdealisticError::Fuel { what: "trick steps", limit: fuel });
        }
        let center = if permissible { &divisor } else { &point_center };
        let children = current.blow_up(center, &mut alloc, j as u32)?;
        current = children
            .into_iter()
            .find(|(m, _)| m.exceptional_var() == Some(t))
            .and_then(|(_, c)| c)
            .expect("the chart of the curve direction is present");
        j += 1;
    }
    let j0 = j;
    let branches: Vec<bool> = steps[1..steps.len() - 1].iter().map(|s| s.divisor_permissible).collect();
    let predicted_branches: Vec<bool> = predicted[1..predicted.len() - 1].iter().map(|a| a >= &Rational::one()).collect();
    let matched = branches == predicted_branches
        && steps.len() == predicted.len()
        && steps.iter().all(|s| s.predicted == s.actual && s.inequality_holds)
        && steps.last().is_some_and(|s| s.actual.is_zero());
    Ok(TrickTrace { e, branches, predicted_branches, j0, matched, translation: point.clone(), steps })
}
