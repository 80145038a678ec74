//! Marked ideals on a chart (plain or immersed), their singular locus as an
//! ideal, the rational order δ, and controlled transforms under chart maps.

mod testsys;
mod trick;

use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::chart::{blowup_maps, identity_division, Chart, ChartError, ChartMap, LabelAlloc};
use crate::ideal::{radical_member, IdealBasis, IdealError};
use crate::poly::{CoordSubspace, Monomial, Order, Poly, PolyError, Rational, RationalPoint};

pub use testsys::{equiv_bounded, run_test_system, CenterGenerator, EquivVerdict, TestOutcome, TestStep, TestSystem};
pub use trick::{trick_validate, TrickStep, TrickTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealisticError {
    #[error("an idealistic space needs at least one nonzero marked ideal")]
    AllIdealsZero,
    #[error("marks must be at least 1")]
    ZeroMark,
    #[error("ideal {index} involves zeroed variable {var}")]
    InvolvesZeroed { index: usize, var: String },
    #[error("ideal {index} lives in {found} variables, chart has {expected}")]
    WrongRing { index: usize, expected: usize, found: usize },
    #[error("controlled transform of ideal {index} is not divisible by the exceptional power: center not permissible")]
    NotPermissible { index: usize },
    #[error("point does not lie on the immersed subspace")]
    PointOffSubspace,
    #[error("point is not singular (order {0})")]
    NotSingular(Rational),
    #[error("spaces do not share an ambient chart")]
    ChartMismatch,
    #[error("fuel exhausted: {what} exceeded {limit}")]
    Fuel { what: &'static str, limit: usize },
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A principal ideal `(poly)` with assigned multiplicity `mark`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedIdeal {
    pub poly: Poly,
    pub mark: u32,
}

impl MarkedIdeal {
    pub fn new(poly: Poly, mark: u32) -> Self {
        MarkedIdeal { poly, mark }
    }
}

/// Marked ideals on a chart; with a subspace they are read on N and never
/// involve the zeroed variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealisticSpace {
    chart: Chart,
    ideals: Vec<MarkedIdeal>,
}

impl IdealisticSpace {
    pub fn new(chart: Chart, ideals: Vec<MarkedIdeal>) -> Result<Self, IdealisticError> {
        if ideals.iter().all(|m| m.poly.is_zero()) {
            return Err(IdealisticError::AllIdealsZero);
        }
        let zeroed = chart.zeroed();
        for (index, m) in ideals.iter().enumerate() {
            if m.mark == 0 {
                return Err(IdealisticError::ZeroMark);
            }
            if m.poly.nvars() != chart.nvars() {
                return Err(IdealisticError::WrongRing { index, expected: chart.nvars(), found: m.poly.nvars() });
            }
            if let Some(&v) = zeroed.iter().find(|&&v| m.poly.involves(v)) {
                return Err(IdealisticError::InvolvesZeroed { index, var: chart.variables()[v].clone() });
            }
        }
        Ok(IdealisticSpace { chart, ideals })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn ideals(&self) -> &[MarkedIdeal] {
        &self.ideals
    }

    pub fn nvars(&self) -> usize {
        self.chart.nvars()
    }

    /// Dimension e of the space (of N when immersed).
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn with_chart(&self, chart: Chart) -> Result<Self, IdealisticError> {
        IdealisticSpace::new(chart, self.ideals.clone())
    }

    /// Same chart with a different list of marked ideals.
    pub fn with_ideals(&self, ideals: Vec<MarkedIdeal>) -> Result<Self, IdealisticError> {
        IdealisticSpace::new(self.chart.clone(), ideals)
    }

    /// Variables along which derivatives are taken.
    pub fn free_vars(&self) -> Vec<usize> {
        let zeroed = self.chart.zeroed();
        (0..self.nvars()).filter(|v| !zeroed.contains(v)).collect()
    }

    /// Generators: the zeroed variables and every ∂^α f_j with |α| < d_j in
    /// the free variables.
    pub fn singular_ideal(&self) -> IdealBasis {
        let n = self.nvars();
        let free = self.free_vars();
        let mut gens: Vec<Poly> = self.chart.zeroed().iter().map(|&v| Poly::var(n, v)).collect();
        let mut seen: HashSet<Poly> = HashSet::new();
        for m in &self.ideals {
            let mut level = vec![m.poly.clone()];
            for order in 0..m.mark {
                let mut next = Vec::new();
                for g in level {
                    if g.is_zero() || !seen.insert(g.clone()) {
                        continue;
                    }
                    gens.push(g.clone());
                    if order + 1 < m.mark {
                        next.extend(free.iter().map(|&v| g.derivative(v)));
                    }
                }
                level = next;
            }
        }
        IdealBasis::new(n, gens).expect("generators share the chart ring")
    }

    /// Sing misses the open region of the chart.
    pub fn is_nonsingular(&self) -> Result<bool, IdealisticError> {
        Ok(radical_member(self.chart.region(), &self.singular_ideal())?)
    }

    /// min_j ν_P(f_j)/d_j at a point of N, in chart coordinates.
    pub fn delta(&self, point: &RationalPoint) -> Result<Rational, IdealisticError> {
        if self.chart.zeroed().iter().any(|&v| !point.coords()[v].is_zero()) {
            return Err(IdealisticError::PointOffSubspace);
        }
        let mut best: Option<Rational> = None;
        for m in &self.ideals {
            if let Order::Finite(o) = m.poly.order_at_point(point)? {
                let r = Rational::new(o.into(), m.mark.into());
                best = Some(best.map_or(r.clone(), |b| b.min(r)));
            }
        }
        best.ok_or(IdealisticError::AllIdealsZero)
    }

    pub fn delta_at_origin(&self) -> Rational {
        self.delta(&RationalPoint::origin(self.nvars())).expect("origin lies on every coordinate subspace")
    }

    /// Generic order along V(Y): min_j order_along(f_j, Y)/d_j.
    pub fn delta_along(&self, center: &CoordSubspace) -> Result<Rational, IdealisticError> {
        let mut best: Option<Rational> = None;
        for m in &self.ideals {
            if let Order::Finite(o) = m.poly.order_along(center)? {
                let r = Rational::new(o.into(), m.mark.into());
                best = Some(best.map_or(r.clone(), |b| b.min(r)));
            }
        }
        best.ok_or(IdealisticError::AllIdealsZero)
    }

    /// V(Y) ⊆ N and the generic order along it is at least 1.
    pub fn is_permissible_center(&self, center: &CoordSubspace) -> Result<bool, IdealisticError> {
        if let Some(n) = self.chart.subspace() {
            if !center.is_superset(n.vars()) {
                return Ok(false);
            }
        }
        Ok(self.delta_along(center)? >= Rational::one())
    }

    /// V(Y) meets the open region of the chart.
    pub fn center_meets_region(&self, center: &CoordSubspace) -> bool {
        self.chart.meets(center)
    }

    /// Pulls back along `map` and divides by the exceptional power; None when
    /// N has no strict transform in the child chart.
    pub fn controlled_transform(&self, map: &ChartMap) -> Result<Option<IdealisticSpace>, IdealisticError> {
        let Some(chart) = self.chart.apply(map)? else {
            return Ok(None);
        };
        let target = map.target_nvars();
        let mut ideals = Vec::with_capacity(self.ideals.len());
        for (index, m) in self.ideals.iter().enumerate() {
            let mut poly = m.poly.compose(&map.images)?;
            if let Some(w) = map.exceptional_var() {
                let divisor = Monomial::from_exponents((0..target).map(|v| if v == w { m.mark } else { 0 }).collect());
                poly = poly.divide_exact_monomial(&divisor).map_err(|_| IdealisticError::NotPermissible { index })?;
            }
            ideals.push(MarkedIdeal::new(poly, m.mark));
        }
        Ok(Some(IdealisticSpace::new(chart, ideals)?))
    }

    /// Blow-up maps for a coordinate center: identity division when it has a
    /// single coordinate, standard charts otherwise.
    pub fn blowup_maps(
        &self,
        center: &CoordSubspace,
        alloc: &mut LabelAlloc,
        step: u32,
    ) -> Result<Vec<ChartMap>, IdealisticError> {
        if center.len() == 1 {
            let var = *center.vars().iter().next().expect("nonempty");
            let (_, map) = identity_division(&self.chart, var, alloc, step)?;
            Ok(vec![map])
        } else {
            Ok(blowup_maps(&self.chart, center, alloc, step)?)
        }
    }

    /// Transforms along every chart of the blow-up with center V(Y).
    pub fn blow_up(
        &self,
        center: &CoordSubspace,
        alloc: &mut LabelAlloc,
        step: u32,
    ) -> Result<Vec<(ChartMap, Option<IdealisticSpace>)>, IdealisticError> {
        self.blowup_maps(center, alloc, step)?
            .into_iter()
            .map(|map| {
                let child = self.controlled_transform(&map)?;
                Ok((map, child))
            })
            .collect()
    }

    /// Germ at `point` moved to the origin: ideals and region are shifted and
    /// labels whose hyperplane misses the point are forgotten.
    pub fn translated(&self, point: &RationalPoint) -> Result<IdealisticSpace, IdealisticError> {
        if self.chart.zeroed().iter().any(|&v| !point.coords()[v].is_zero()) {
            return Err(IdealisticError::PointOffSubspace);
        }
        let mut chart = self.chart.clone();
        for (label, &v) in self.chart.divisor() {
            if !point.coords()[v].is_zero() {
                chart = chart.without_label(label.id);
            }
        }
        let region = self.chart.region().translate(point)?;
        let chart = chart.with_region(region);
        let ideals = self
            .ideals
            .iter()
            .map(|m| Ok(MarkedIdeal::new(m.poly.translate(point)?, m.mark)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        IdealisticSpace::new(chart, ideals)
    }

    /// Common mark d = lcm(d_j) with f_j raised to d/d_j.
    pub fn normalize(&self) -> IdealisticSpace {
        let d = self.common_mark();
        let ideals = self.ideals.iter().map(|m| MarkedIdeal::new(m.poly.pow(d / m.mark), d)).collect();
        IdealisticSpace { chart: self.chart.clone(), ideals }
    }

    pub fn common_mark(&self) -> u32 {
        self.ideals.iter().fold(1, |acc, m| num_integer::lcm(acc, m.mark))
    }

    pub fn is_normalized(&self) -> bool {
        self.ideals.windows(2).all(|w| w[0].mark == w[1].mark)
    }

    /// Exceptional hypersurface of a blow-up chart, read on N.
    pub fn exceptional_subspace(&self, map: &ChartMap) -> Option<CoordSubspace> {
        let w = map.exceptional_var()?;
        Some(CoordSubspace::new(std::iter::once(w).chain(self.chart.zeroed())).expect("nonempty"))
    }

    /// Every subset of variables containing the zeroed ones, by size.
    pub fn coordinate_centers(&self) -> Vec<CoordSubspace> {
        let zeroed = self.chart.zeroed();
        let free = self.free_vars();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << free.len()) {
            let vars: BTreeSet<usize> =
                free.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).chain(zeroed.iter().copied()).collect();
            out.push(CoordSubspace::new(vars).expect("nonempty"));
        }
        out.sort_by_key(|c| c.len());
        out
    }
}
