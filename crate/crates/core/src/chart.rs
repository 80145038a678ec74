//! Affine charts of an ambient space with a normal-crossings divisor made of
//! labeled coordinate hyperplanes; blow-ups with coordinate centers, open
//! projections, coordinate changes and principal localizations.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{CoordSubspace, Poly, PolyError, Rational};

pub type LabelId = u32;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelOrigin {
    Old,
    Exceptional { step: u32 },
}

/// A divisor component; ids are never reused within a run.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct DivisorLabel {
    pub id: LabelId,
    pub origin: LabelOrigin,
}

impl DivisorLabel {
    pub fn name(&self) -> String {
        format!("E{}", self.id)
    }
}

/// Source of fresh label ids.
#[derive(Clone, Debug, Default)]
pub struct LabelAlloc {
    next: LabelId,
}

impl LabelAlloc {
    pub fn starting_at(next: LabelId) -> Self {
        LabelAlloc { next }
    }

    /// First id strictly above every label of `chart`.
    pub fn after(chart: &Chart) -> Self {
        LabelAlloc { next: chart.labels().map(|l| l.id + 1).max().unwrap_or(1) }
    }

    pub fn fresh(&mut self, origin: LabelOrigin) -> DivisorLabel {
        let id = self.next;
        self.next += 1;
        DivisorLabel { id, origin }
    }

    pub fn peek(&self) -> LabelId {
        self.next
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("blow-up center needs at least two coordinates, got {0}")]
    CenterTooSmall(usize),
    #[error("variable {0} is not a chart variable")]
    UnknownVariable(String),
    #[error("duplicate variable name {0}")]
    DuplicateVariable(String),
    #[error("variable {var} already carries label {existing}")]
    LabelCollision { var: String, existing: String },
    #[error("divisor label {label} lies on zeroed variable {var}; subspace is not transverse")]
    NotTransverse { label: String, var: String },
    #[error("coordinate change would move the divisor or subspace hyperplane of {0}")]
    MovesHyperplane(String),
    #[error("cover value must be nonzero")]
    ZeroCoverValue,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Affine chart: named variables, labeled coordinate hyperplanes, an optional
/// immersed coordinate subspace N and the open region where `region` ≠ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    variables: Vec<String>,
    divisor: BTreeMap<DivisorLabel, usize>,
    subspace: Option<CoordSubspace>,
    region: Poly,
}

impl Chart {
    pub fn new(variables: Vec<String>) -> Result<Self, ChartError> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.clone()) {
                return Err(ChartError::DuplicateVariable(v.clone()));
            }
        }
        let n = variables.len();
        Ok(Chart { variables, divisor: BTreeMap::new(), subspace: None, region: Poly::one(n) })
    }

    pub fn with_names(names: &[&str]) -> Result<Self, ChartError> {
        Chart::new(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_label(mut self, label: DivisorLabel, var: usize) -> Result<Self, ChartError> {
        self.check_var(var)?;
        if let Some(existing) = self.label_on(var) {
            return Err(ChartError::LabelCollision { var: self.variables[var].clone(), existing: existing.name() });
        }
        self.divisor.insert(label, var);
        self.check_transverse()?;
        Ok(self)
    }

    pub fn with_subspace(mut self, subspace: Option<CoordSubspace>) -> Result<Self, ChartError> {
        if let Some(s) = &subspace {
            s.check_within(self.nvars())?;
        }
        self.subspace = subspace;
        self.check_transverse()?;
        Ok(self)
    }

    pub fn with_region(mut self, region: Poly) -> Self {
        self.region = region;
        self
    }

    fn check_var(&self, var: usize) -> Result<(), ChartError> {
        if var >= self.nvars() {
            return Err(ChartError::Poly(PolyError::VariableOutOfRange { index: var, nvars: self.nvars() }));
        }
        Ok(())
    }

    fn check_transverse(&self) -> Result<(), ChartError> {
        if let Some(s) = &self.subspace {
            for (label, &v) in &self.divisor {
                if s.contains(v) {
                    return Err(ChartError::NotTransverse { label: label.name(), var: self.variables[v].clone() });
                }
            }
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_index(&self, name: &str) -> Result<usize, ChartError> {
        self.variables.iter().position(|v| v == name).ok_or_else(|| ChartError::UnknownVariable(name.to_string()))
    }

    pub fn divisor(&self) -> &BTreeMap<DivisorLabel, usize> {
        &self.divisor
    }

    pub fn labels(&self) -> impl Iterator<Item = &DivisorLabel> {
        self.divisor.keys()
    }

    pub fn label_on(&self, var: usize) -> Option<DivisorLabel> {
        self.divisor.iter().find(|(_, &v)| v == var).map(|(l, _)| *l)
    }

    pub fn label_by_id(&self, id: LabelId) -> Option<(DivisorLabel, usize)> {
        self.divisor.iter().find(|(l, _)| l.id == id).map(|(l, v)| (*l, *v))
    }

    pub fn divisor_vars(&self) -> BTreeSet<usize> {
        self.divisor.values().copied().collect()
    }

    pub fn subspace(&self) -> Option<&CoordSubspace> {
        self.subspace.as_ref()
    }

    /// Zeroed variables of N, empty for a plain chart.
    pub fn zeroed(&self) -> BTreeSet<usize> {
        self.subspace.as_ref().map(|s| s.vars().clone()).unwrap_or_default()
    }

    /// Dimension of N (or of the chart).
    pub fn dim(&self) -> usize {
        self.nvars() - self.zeroed().len()
    }

    pub fn region(&self) -> &Poly {
        &self.region
    }

    pub fn is_whole_chart(&self) -> bool {
        self.region.is_nonzero_constant()
    }

    /// Removes a label (used when a localized chart no longer meets it).
    pub fn without_label(mut self, id: LabelId) -> Self {
        self.divisor.retain(|l, _| l.id != id);
        self
    }

    /// Variables of a label set; None when some label is absent here.
    pub fn vars_of_labels(&self, ids: &BTreeSet<LabelId>) -> Option<BTreeSet<usize>> {
        ids.iter().map(|&id| self.label_by_id(id).map(|(_, v)| v)).collect()
    }

    pub fn names_of(&self, vars: &BTreeSet<usize>) -> Vec<String> {
        vars.iter().map(|&v| self.variables[v].clone()).collect()
    }

    /// V(center) meets the open region.
    pub fn meets(&self, center: &CoordSubspace) -> bool {
        let n = self.nvars();
        let images: Vec<Poly> =
            (0..n).map(|v| if center.contains(v) { Poly::zero(n) } else { Poly::var(n, v) }).collect();
        !self.region.compose(&images).expect("images match the chart").is_zero()
    }

    /// The chart seen through a map; None when N has no strict transform here.
    pub fn apply(&self, map: &ChartMap) -> Result<Option<Chart>, ChartError> {
        let child_nvars = map.images.first().map_or(self.nvars(), Poly::nvars);
        let mut variables = self.variables.clone();
        variables.extend(map.new_variables.iter().cloned());
        debug_assert_eq!(variables.len(), child_nvars);
        let mut divisor = self.divisor.clone();
        divisor.retain(|l, _| !map.dropped.contains(&l.id));
        let subspace = self.subspace.clone();
        match map.kind {
            MapKind::BlowupChart => {
                let (label, ell) = map.exceptional.expect("blow-up charts carry an exceptional label");
                if subspace.as_ref().is_some_and(|s| s.contains(ell)) {
                    return Ok(None);
                }
                divisor.retain(|_, v| *v != ell);
                divisor.insert(label, ell);
            }
            MapKind::IdentityDivision => {
                let (label, v) = map.exceptional.expect("identity division carries a label");
                if !divisor.contains_key(&label) {
                    divisor.retain(|_, w| *w != v);
                    divisor.insert(label, v);
                }
            }
            MapKind::Projection | MapKind::CoordinateChange | MapKind::Localization => {}
        }
        let mut region = self.region.compose(&map.images)?;
        if let Some(g) = &map.inverted {
            region = &region * g;
        }
        let chart = Chart { variables, divisor, subspace, region };
        chart.check_transverse()?;
        Ok(Some(chart))
    }

    /// Plain chart on the complementary variables of `n`, with induced labels.
    pub fn restrict_to_subspace(&self, n: &CoordSubspace) -> Result<Chart, ChartError> {
        n.check_within(self.nvars())?;
        for (label, &v) in &self.divisor {
            if n.contains(v) {
                return Err(ChartError::NotTransverse { label: label.name(), var: self.variables[v].clone() });
            }
        }
        let keep: Vec<usize> = (0..self.nvars()).filter(|v| !n.contains(*v)).collect();
        let variables = keep.iter().map(|&v| self.variables[v].clone()).collect();
        let divisor = self
            .divisor
            .iter()
            .map(|(l, v)| (*l, keep.iter().position(|k| k == v).expect("label variable kept")))
            .collect();
        let region = restrict_poly(&self.region, &keep);
        Ok(Chart { variables, divisor, subspace: None, region })
    }
}

/// Sets the dropped variables to zero and reindexes onto `keep`.
pub fn restrict_poly(p: &Poly, keep: &[usize]) -> Poly {
    let n = keep.len();
    Poly::from_terms(
        n,
        p.terms().filter(|(m, _)| (0..m.nvars()).all(|v| keep.contains(&v) || m.exponent(v) == 0)).map(|(m, c)| {
            (crate::poly::Monomial::from_exponents(keep.iter().map(|&v| m.exponent(v)).collect()), c.clone())
        }),
    )
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    BlowupChart,
    Projection,
    IdentityDivision,
    CoordinateChange,
    Localization,
}

/// Parent-to-child substitution with its divisor bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMap {
    pub kind: MapKind,
    /// Image of each parent variable, as a polynomial in the child variables.
    pub images: Vec<Poly>,
    pub exceptional: Option<(DivisorLabel, usize)>,
    pub center: Option<CoordSubspace>,
    pub new_variables: Vec<String>,
    pub dropped: BTreeSet<LabelId>,
    /// Extra factor of the child's region, in child variables.
    pub inverted: Option<Poly>,
}

impl ChartMap {
    fn identity_images(n: usize) -> Vec<Poly> {
        (0..n).map(|v| Poly::var(n, v)).collect()
    }

    fn base(kind: MapKind, images: Vec<Poly>) -> Self {
        ChartMap {
            kind,
            images,
            exceptional: None,
            center: None,
            new_variables: Vec::new(),
            dropped: BTreeSet::new(),
            inverted: None,
        }
    }

    /// Variable whose power is divided out by controlled transforms.
    pub fn exceptional_var(&self) -> Option<usize> {
        match self.kind {
            MapKind::BlowupChart | MapKind::IdentityDivision => self.exceptional.map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn target_nvars(&self) -> usize {
        self.images.first().map_or(0, Poly::nvars)
    }
}

/// One map per standard chart of the blow-up along V(center).
pub fn blowup_maps(
    chart: &Chart,
    center: &CoordSubspace,
    alloc: &mut LabelAlloc,
    step: u32,
) -> Result<Vec<ChartMap>, ChartError> {
    center.check_within(chart.nvars())?;
    if center.len() < 2 {
        return Err(ChartError::CenterTooSmall(center.len()));
    }
    let n = chart.nvars();
    let label = alloc.fresh(LabelOrigin::Exceptional { step });
    Ok(center
        .vars()
        .iter()
        .map(|&ell| {
            let images = (0..n)
                .map(|v| {
                    if v != ell && center.contains(v) {
                        &Poly::var(n, ell) * &Poly::var(n, v)
                    } else {
                        Poly::var(n, v)
                    }
                })
                .collect();
            let mut map = ChartMap::base(MapKind::BlowupChart, images);
            map.exceptional = Some((label, ell));
            map.center = Some(center.clone());
            map
        })
        .collect())
}

/// Standard charts of the blow-up; charts missing the strict transform of N
/// are omitted.
pub fn blowup_charts(
    chart: &Chart,
    center: &CoordSubspace,
    alloc: &mut LabelAlloc,
    step: u32,
) -> Result<Vec<(Chart, ChartMap)>, ChartError> {
    let mut out = Vec::new();
    for map in blowup_maps(chart, center, alloc, step)? {
        if let Some(c) = chart.apply(&map)? {
            out.push((c, map));
        }
    }
    Ok(out)
}

/// Blow-up of the hypersurface V(var): the identity on the chart. An existing
/// label on `var` is kept, otherwise a fresh one is created.
pub fn identity_division(
    chart: &Chart,
    var: usize,
    alloc: &mut LabelAlloc,
    step: u32,
) -> Result<(Chart, ChartMap), ChartError> {
    chart.check_var(var)?;
    let label = chart.label_on(var).unwrap_or_else(|| alloc.fresh(LabelOrigin::Exceptional { step }));
    let mut map = ChartMap::base(MapKind::IdentityDivision, ChartMap::identity_images(chart.nvars()));
    map.exceptional = Some((label, var));
    map.center = Some(CoordSubspace::new([var])?);
    let child = chart.apply(&map)?.expect("identity division keeps N");
    Ok((child, map))
}

/// Product with affine m-space; fresh variables are appended.
pub fn open_projection(chart: &Chart, m: usize) -> Result<(Chart, ChartMap), ChartError> {
    let n = chart.nvars();
    let mut names = Vec::with_capacity(m);
    let mut k = 1;
    while names.len() < m {
        let candidate = format!("w{k}");
        if !chart.variables.contains(&candidate) {
            names.push(candidate);
        }
        k += 1;
    }
    let images = (0..n).map(|v| Poly::var(n + m, v)).collect();
    let mut map = ChartMap::base(MapKind::Projection, images);
    map.new_variables = names;
    let child = chart.apply(&map)?.expect("projection keeps N");
    Ok((child, map))
}

/// Coordinate change `var ↦ var + offset`; the hyperplanes of the divisor and
/// of N stay fixed.
pub fn coordinate_change(chart: &Chart, var: usize, offset: &Poly) -> Result<(Chart, ChartMap), ChartError> {
    chart.check_var(var)?;
    let name = chart.variables[var].clone();
    if chart.label_on(var).is_some() || chart.zeroed().contains(&var) || offset.involves(var) {
        return Err(ChartError::MovesHyperplane(name));
    }
    let n = chart.nvars();
    let mut images = ChartMap::identity_images(n);
    images[var] = &images[var] + offset;
    let map = ChartMap::base(MapKind::CoordinateChange, images);
    let child = chart.apply(&map)?.expect("coordinate change keeps N");
    Ok((child, map))
}

/// Open cover {var ≠ 0} ∪ {var ≠ value}. The first piece forgets the label on
/// `var`, which it no longer meets; the second piece misses the hyperplane
/// var = value.
pub fn cover(chart: &Chart, var: usize, value: &Rational) -> Result<[(Chart, ChartMap); 2], ChartError> {
    chart.check_var(var)?;
    if value.is_zero() {
        return Err(ChartError::ZeroCoverValue);
    }
    let n = chart.nvars();
    let mut away = ChartMap::base(MapKind::Localization, ChartMap::identity_images(n));
    away.inverted = Some(Poly::var(n, var));
    if let Some(l) = chart.label_on(var) {
        away.dropped.insert(l.id);
    }
    let mut rest = ChartMap::base(MapKind::Localization, ChartMap::identity_images(n));
    rest.inverted = Some(&Poly::var(n, var) - &Poly::constant(n, value.clone()));
    let a = chart.apply(&away)?.expect("localization keeps N");
    let b = chart.apply(&rest)?.expect("localization keeps N");
    Ok([(a, away), (b, rest)])
}

/// Node of a chart tree.
#[derive(Clone, Debug)]
pub struct TreeNode<P> {
    pub id: usize,
    pub parent: Option<usize>,
    pub map: Option<ChartMap>,
    pub chart: Chart,
    pub payload: P,
    pub children: Vec<usize>,
}

/// Tree of charts grown by blow-ups, projections and localizations, with the
/// ordered trace of the steps that grew it.
#[derive(Clone, Debug)]
pub struct ChartTree<P, S> {
    nodes: Vec<TreeNode<P>>,
    trace: Vec<S>,
}

impl<P, S> ChartTree<P, S> {
    pub fn new(root: Chart, payload: P) -> Self {
        ChartTree {
            nodes: vec![TreeNode { id: 0, parent: None, map: None, chart: root, payload, children: Vec::new() }],
            trace: Vec::new(),
        }
    }

    pub fn root(&self) -> &TreeNode<P> {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &TreeNode<P> {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: usize) -> &mut TreeNode<P> {
        &mut self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode<P>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_child(&mut self, parent: usize, map: ChartMap, chart: Chart, payload: P) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode { id, parent: Some(parent), map: Some(map), chart, payload, children: Vec::new() });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode<P>> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn push_trace(&mut self, step: S) {
        self.trace.push(step);
    }

    pub fn trace(&self) -> &[S] {
        &self.trace
    }
}

#[cfg(test)]
mod tests;
