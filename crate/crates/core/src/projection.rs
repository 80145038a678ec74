//! Logarithmic factors, co-factorial order and adjustment; projection of a
//! marked-ideal list onto a hypersurface z = 0 through its z-coefficients;
//! Tschirnhaus rectification and the search for a maximal contact direction.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::chart::{coordinate_change, ChartError, ChartMap, DivisorLabel, LabelAlloc, MapKind};
use crate::ideal::{radical_member, same_variety, IdealBasis, IdealError};
use crate::idealistic::{IdealisticError, IdealisticSpace, MarkedIdeal};
use crate::poly::{CoordSubspace, Monomial, Order, Poly, PolyError, Rational, RationalPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("the marked ideals do not share a common mark")]
    NotNormalized,
    #[error("adjustment mark {mark} is below the co-factorial order {mu}")]
    BelowMu { mark: u32, mu: u32 },
    #[error("adjustment needs a mark of at least 1")]
    ZeroAdjustMark,
    #[error("all coefficients below the marks vanish: the space is not reduced along {0}")]
    NotReduced(String),
    #[error("projected singular locus differs from the hypersurface section")]
    SingLawViolated,
    #[error("polynomial is not monic of degree {degree} in {var}")]
    NotMonic { var: String, degree: u32 },
    #[error("no monic direction within the substitution ladder")]
    NoMonicDirection,
    #[error("order at the point is {0}, adjusted spaces need 1")]
    NotAdjusted(Rational),
    #[error("center must lie in the hypersurface and have positive codimension in it")]
    CenterOutsideHypersurface,
    #[error("center is not permissible for the source")]
    CenterNotPermissible,
    #[error(transparent)]
    Idealistic(#[from] IdealisticError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Monomial Z = ∏ x_D^{a_D} in the divisor variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogFactor {
    pub exponents: BTreeMap<DivisorLabel, u32>,
}

impl LogFactor {
    pub fn monomial(&self, space: &IdealisticSpace) -> Monomial {
        let chart = space.chart();
        let mut e = vec![0; chart.nvars()];
        for (label, &a) in &self.exponents {
            if let Some(&v) = chart.divisor().get(label) {
                e[v] = a;
            }
        }
        Monomial::from_exponents(e)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.values().all(|&a| a == 0)
    }
}

/// Z together with the co-factors J_j = f_j / Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factor: LogFactor,
    pub cofactors: Vec<Poly>,
}

/// Largest divisor monomial dividing every f_j of a normalized space.
pub fn extract_log_factor(space: &IdealisticSpace) -> Result<Factorization, ProjectionError> {
    if !space.is_normalized() {
        return Err(ProjectionError::NotNormalized);
    }
    let chart = space.chart();
    let divisor_vars = chart.divisor_vars();
    let mut content: Option<Monomial> = None;
    for m in space.ideals().iter().filter(|m| !m.poly.is_zero()) {
        let c = m.poly.monomial_content(&divisor_vars)?;
        content = Some(match content {
            Some(prev) => prev.gcd(&c),
            None => c,
        });
    }
    let content = content.expect("a space has a nonzero ideal");
    let exponents = chart
        .divisor()
        .iter()
        .filter(|(_, &v)| content.exponent(v) > 0)
        .map(|(l, &v)| (*l, content.exponent(v)))
        .collect();
    let cofactors = space
        .ideals()
        .iter()
        .map(|m| if m.poly.is_zero() { Ok(m.poly.clone()) } else { m.poly.divide_exact_monomial(&content) })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Factorization { factor: LogFactor { exponents }, cofactors })
}

/// μ_Z: −∞ when the space is nonsingular, else the largest m with a singular
/// point where every co-factor has order ≥ m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CofactorialOrder {
    NegInfinity,
    Finite(u32),
}

impl fmt::Display for CofactorialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CofactorialOrder::NegInfinity => write!(f, "-inf"),
            CofactorialOrder::Finite(m) => write!(f, "{m}"),
        }
    }
}

fn meets_region(space: &IdealisticSpace, ideal: &IdealBasis) -> Result<bool, ProjectionError> {
    Ok(!radical_member(space.chart().region(), ideal)?)
}

/// Searches m = 1, 2, … for the first empty locus; the co-factor degrees
/// bound the search.
pub fn cofactorial_order(space: &IdealisticSpace, fact: &Factorization) -> Result<CofactorialOrder, ProjectionError> {
    let sing = space.singular_ideal();
    if !meets_region(space, &sing)? {
        return Ok(CofactorialOrder::NegInfinity);
    }
    let free = space.free_vars();
    let mut gens = sing.generators().to_vec();
    let mut level: Vec<Poly> = fact.cofactors.iter().filter(|j| !j.is_zero()).cloned().collect();
    let mut m = 0u32;
    loop {
        // level holds the derivatives of order exactly m
        gens.extend(level.iter().filter(|g| !g.is_zero()).cloned());
        let ideal = IdealBasis::new(space.nvars(), gens.clone())?;
        if !meets_region(space, &ideal)? {
            return Ok(CofactorialOrder::Finite(m));
        }
        level = level.iter().flat_map(|g| free.iter().map(move |&v| g.derivative(v))).filter(|g| !g.is_zero()).collect();
        level.sort_by(|a, b| a.leading().map(|l| l.0).cmp(&b.leading().map(|l| l.0)));
        level.dedup();
        m += 1;
        if level.is_empty() {
            // every co-factor vanishes identically near Sing
            return Ok(CofactorialOrder::Finite(m));
        }
    }
}

/// Appends (J_j, m) to the list, skipping pairs already present.
pub fn adjust(space: &IdealisticSpace, fact: &Factorization, mark: u32) -> Result<IdealisticSpace, ProjectionError> {
    if mark == 0 {
        return Err(ProjectionError::ZeroAdjustMark);
    }
    if let CofactorialOrder::Finite(mu) = cofactorial_order(space, fact)? {
        if mark < mu {
            return Err(ProjectionError::BelowMu { mark, mu });
        }
    }
    let mut ideals = space.ideals().to_vec();
    for j in fact.cofactors.iter().filter(|j| !j.is_zero()) {
        let pair = MarkedIdeal::new(j.clone(), mark);
        if !ideals.contains(&pair) {
            ideals.push(pair);
        }
    }
    Ok(space.with_ideals(ideals)?)
}

/// Source space and rectified hypersurface H = V(z); `over_divisor` is set
/// when z carries a divisor label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionContext {
    pub source: IdealisticSpace,
    pub z: usize,
    pub over_divisor: Option<DivisorLabel>,
}

impl ProjectionContext {
    pub fn new(source: IdealisticSpace, z: usize) -> Self {
        let over_divisor = source.chart().label_on(z);
        ProjectionContext { source, z, over_divisor }
    }
}

/// Pairs (G_s, d − s) for s < d from f = Σ G_s z^s; zero coefficients are
/// dropped and each generator is scaled to be monic.
pub fn coefficient_pairs(ideals: &[MarkedIdeal], z: usize) -> Vec<MarkedIdeal> {
    let mut out = Vec::new();
    for m in ideals {
        let coeffs = m.poly.coefficients_in(z);
        for s in 0..m.mark {
            if let Some(g) = coeffs.get(s as usize).filter(|g| !g.is_zero()) {
                let pair = MarkedIdeal::new(g.monic(), m.mark - s);
                if !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
    }
    out
}

/// Projected space on H, immersed with z added to the zeroed variables.
/// The law Sing(projected) = H ∩ Sing(source) is checked on every call.
pub fn coefficient_ideals(ctx: &ProjectionContext) -> Result<IdealisticSpace, ProjectionError> {
    let source = &ctx.source;
    let chart = source.chart();
    let pairs = coefficient_pairs(source.ideals(), ctx.z);
    if pairs.is_empty() {
        return Err(ProjectionError::NotReduced(chart.variables()[ctx.z].clone()));
    }
    let zeroed = CoordSubspace::new(chart.zeroed().into_iter().chain([ctx.z]))?;
    let mut below = chart.clone();
    if let Some(label) = ctx.over_divisor {
        below = below.without_label(label.id);
    }
    let below = below.with_subspace(Some(zeroed))?;
    let projected = IdealisticSpace::new(below, pairs)?;
    let section = source.singular_ideal().with([Poly::var(source.nvars(), ctx.z)])?;
    if !same_variety(&projected.singular_ideal(), &section)? {
        return Err(ProjectionError::SingLawViolated);
    }
    Ok(projected)
}

/// Transform-then-project equals project-then-transform along `map`, which
/// must keep H a coordinate hyperplane (a blow-up chart other than z's, an
/// open projection, or a coordinate change fixing z).
pub fn commutes_along(ctx: &ProjectionContext, map: &ChartMap) -> Result<bool, ProjectionError> {
    let projected = coefficient_ideals(ctx)?;
    let below = projected.controlled_transform(map)?;
    let Some(above) = ctx.source.controlled_transform(map)? else {
        return Ok(below.is_none());
    };
    let Some(below) = below else { return Ok(false) };
    let pairs = coefficient_pairs(above.ideals(), ctx.z);
    let transformed: Vec<MarkedIdeal> = below.ideals().iter().map(|m| MarkedIdeal::new(m.poly.monic(), m.mark)).collect();
    Ok(same_pairs(&pairs, &transformed))
}

fn same_pairs(a: &[MarkedIdeal], b: &[MarkedIdeal]) -> bool {
    let norm = |v: &[MarkedIdeal]| {
        let mut out: Vec<MarkedIdeal> = Vec::new();
        for m in v.iter().filter(|m| !m.poly.is_zero()) {
            let m = MarkedIdeal::new(m.poly.monic(), m.mark);
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    };
    let (a, b) = (norm(a), norm(b));
    a.len() == b.len() && a.iter().all(|m| b.contains(m))
}

/// Checks commutation in every blow-up chart along a permissible center
/// inside H where H has a strict transform.
pub fn projection_commutes(ctx: &ProjectionContext, center: &CoordSubspace, alloc: &mut LabelAlloc) -> Result<bool, ProjectionError> {
    let zeroed = ctx.source.chart().zeroed();
    if !center.contains(ctx.z) || center.vars().iter().filter(|v| !zeroed.contains(v)).count() < 2 {
        return Err(ProjectionError::CenterOutsideHypersurface);
    }
    if !ctx.source.is_permissible_center(center)? {
        return Err(ProjectionError::CenterNotPermissible);
    }
    for map in ctx.source.blowup_maps(center, alloc, 0)? {
        if map.exceptional_var() == Some(ctx.z) {
            continue;
        }
        if !commutes_along(ctx, &map)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f` rewritten with z ↦ z − shift so that its z^{d−1} coefficient vanishes;
/// the result is scaled to be monic in z.
pub fn tschirnhaus(f: &Poly, z: usize, d: u32, names: &[String]) -> Result<(Poly, Poly), ProjectionError> {
    let not_monic = || ProjectionError::NotMonic { var: names.get(z).cloned().unwrap_or_default(), degree: d };
    let coeffs = f.coefficients_in(z);
    if coeffs.len() != d as usize + 1 || d == 0 {
        return Err(not_monic());
    }
    let lead = coeffs[d as usize].constant_value().filter(|c| !c.is_zero()).ok_or_else(not_monic)?;
    let shift = coeffs[d as usize - 1].scale(&(Rational::one() / (lead.clone() * Rational::from_integer(d.into()))));
    let n = f.nvars();
    let mut images: Vec<Poly> = (0..n).map(|v| Poly::var(n, v)).collect();
    images[z] = &images[z] - &shift;
    let rectified = f.compose(&images)?.scale(&lead.recip());
    Ok((rectified, shift))
}

/// f_j has degree exactly d in `z` with a nonzero constant leading coefficient.
pub fn is_monic_in(f: &Poly, z: usize, d: u32) -> bool {
    let coeffs = f.coefficients_in(z);
    coeffs.len() == d as usize + 1 && coeffs[d as usize].is_nonzero_constant()
}

/// Linear ladder λ for the substitutions u ↦ u + λ·z.
pub const LADDER: [i64; 6] = [1, -1, 2, -2, 3, -3];

/// Outcome of the maximal contact search: the context on the translated,
/// rectified chart plus the coordinate changes applied after translation.
#[derive(Clone, Debug)]
pub struct MaximalContact {
    pub context: ProjectionContext,
    pub translation: RationalPoint,
    pub changes: Vec<ChartMap>,
    pub index: usize,
}

fn apply_change(space: &IdealisticSpace, map: &ChartMap) -> Result<IdealisticSpace, ProjectionError> {
    debug_assert_eq!(map.kind, MapKind::CoordinateChange);
    Ok(space.controlled_transform(map)?.expect("coordinate changes keep N"))
}

/// Moves P to the origin and finds an unlabeled direction z making some
/// f_j with ν_P f_j = d_j monic of degree d_j, trying first the variables
/// themselves and then the ladder u ↦ u + λ·z on other unlabeled u.
pub fn maximal_contact_chart(space: &IdealisticSpace, point: &RationalPoint) -> Result<MaximalContact, ProjectionError> {
    let delta = space.delta(point)?;
    if delta != Rational::one() {
        return Err(ProjectionError::NotAdjusted(delta));
    }
    let local = space.translated(point)?;
    let chart = local.chart();
    let candidates: Vec<usize> = local.free_vars().into_iter().filter(|&v| chart.label_on(v).is_none()).collect();
    let tight: Vec<usize> = local
        .ideals()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.poly.order_at_origin() == Order::Finite(m.mark))
        .map(|(i, _)| i)
        .collect();
    let finish = |current: IdealisticSpace, z: usize, index: usize, mut changes: Vec<ChartMap>| {
        let m = &current.ideals()[index];
        let (_, shift) = tschirnhaus(&m.poly, z, m.mark, current.chart().variables())?;
        let mut rectified = current.clone();
        if !shift.is_zero() {
            let (_, map) = coordinate_change(current.chart(), z, &-&shift)?;
            rectified = apply_change(&current, &map)?;
            changes.push(map);
        }
        Ok::<_, ProjectionError>(MaximalContact {
            context: ProjectionContext::new(rectified, z),
            translation: point.clone(),
            changes,
            index,
        })
    };
    for &index in &tight {
        for &z in &candidates {
            let m = &local.ideals()[index];
            if is_monic_in(&m.poly, z, m.mark) {
                return finish(local.clone(), z, index, Vec::new());
            }
        }
    }
    for &index in &tight {
        for &z in &candidates {
            for &u in candidates.iter().filter(|&&u| u != z) {
                for lambda in LADDER {
                    let offset = Poly::var(local.nvars(), z).scale(&Rational::from_integer(lambda.into()));
                    let (_, map) = coordinate_change(chart, u, &offset)?;
                    let moved = apply_change(&local, &map)?;
                    let m = &moved.ideals()[index];
                    if is_monic_in(&m.poly, z, m.mark) {
                        return finish(moved, z, index, vec![map]);
                    }
                }
            }
        }
    }
    Err(ProjectionError::NoMonicDirection)
}
