//! Inductive resolution over a stack of levels sharing one ambient chart.
//!
//! Level 0 is the input. Deeper levels are adjusted copies of the level
//! above or projections of it onto a coordinate hyperplane. Only the top
//! level chooses centers; each center is checked permissible at every level
//! before the ambient blow-up is applied to all of them.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{
    blowup_maps, coordinate_change, cover, identity_division, Chart, ChartError, ChartMap, ChartTree, LabelAlloc,
    LabelId,
};
use crate::ideal::{dimension, radical_member, IdealBasis, IdealError};
use crate::idealistic::{IdealisticError, IdealisticSpace};
use crate::io::{parse_poly, parse_rational, ParseError};
use crate::monomial::{choose_center_where, LogState, MonomialError};
use crate::poly::univariate::Dense;
use crate::poly::{CoordSubspace, Poly, PolyError, Rational};
use crate::projection::{
    adjust, coefficient_ideals, cofactorial_order, extract_log_factor, is_monic_in, tschirnhaus, CofactorialOrder,
    ProjectionContext, ProjectionError, LADDER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DriverError {
    #[error("resolution exceeded {0} operations")]
    Fuel(usize),
    #[error("level stack cycled {0} times without an ambient operation")]
    Stalled(usize),
    #[error("center {{{}}} is not permissible at level {level}", center.join(","))]
    CenterNotPermissible { center: Vec<String>, level: usize },
    #[error("co-factorial order {mu} did not drop below {last}")]
    MuNotDecreasing { mu: u32, last: u32 },
    #[error("singular points of a curve are not rational: roots of {0}")]
    IrrationalPoint(String),
    #[error("codimension-one singular component is not a coordinate hyperplane")]
    NonCoordinateComponent,
    #[error("no monic direction for maximal contact")]
    NoMonicDirection,
    #[error("monomial case without a singular stratum in the chart")]
    EmptyMonomialStratum,
    #[error("level of dimension {0} is singular")]
    DegenerateLevel(usize),
    #[error("adjusted level has order {0} on a singular stratum")]
    AdjustednessLost(Rational),
    #[error("leaf {0} is still singular")]
    NotResolved(usize),
    #[error("trace step {step} does not replay: {reason}")]
    Replay { step: usize, reason: String },
    #[error(transparent)]
    Idealistic(#[from] IdealisticError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Monomial(#[from] MonomialError),
}

/// Why a level sits on the stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Input,
    /// adjust(level above, Z, μ): δ = 1 on its singular locus.
    Adjusted,
    /// Projection over an old divisor component meeting Sing.
    SeparateOld,
    /// Projection onto a maximal contact hypersurface.
    MaxContact,
}

/// Reason the top level emitted an operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Singular point of a curve.
    Base,
    /// Stratum of the divisor monomial when μ = 0.
    Monomial,
    /// Codimension-one component of Sing.
    Reduce,
    /// Rectification towards a maximal contact hypersurface.
    MaxContact,
}

/// Ambient operation, with variables by name and numbers as exact text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    /// Blow-up with center V(center); a single variable divides by it.
    Blowup { center: Vec<String> },
    /// The pieces var ≠ 0 and var ≠ value.
    Cover { var: String, value: String },
    /// var ↦ var + offset.
    Substitute { var: String, offset: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub node: usize,
    #[serde(flatten)]
    pub operation: Operation,
    pub phase: Phase,
    /// Roles of the level stack, outermost first.
    pub levels: Vec<Role>,
    pub children: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct DriverConfig {
    /// Bound on the number of ambient operations.
    pub fuel: usize,
    /// Check δ = 1 on every singular coordinate stratum of an adjusted level
    /// before it acts.
    pub check_adjusted: bool,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig { fuel: 5_000, check_adjusted: true }
    }
}

/// Chart tree whose payloads are the transforms of the input.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub tree: ChartTree<IdealisticSpace, TraceStep>,
}

impl Resolution {
    pub fn trace(&self) -> &[TraceStep] {
        self.tree.trace()
    }

    /// (leaf id, Sing empty) for every leaf.
    pub fn verify(&self) -> Result<Vec<(usize, bool)>, DriverError> {
        self.tree.leaves().map(|leaf| Ok((leaf.id, leaf.payload.is_nonsingular()?))).collect()
    }

    pub fn is_resolved(&self) -> Result<bool, DriverError> {
        Ok(self.verify()?.iter().all(|(_, ok)| *ok))
    }

    /// Centers of the blow-ups, in trace order.
    pub fn centers(&self) -> impl Iterator<Item = &[String]> {
        self.trace().iter().filter_map(|s| match &s.operation {
            Operation::Blowup { center } => Some(center.as_slice()),
            _ => None,
        })
    }

    /// Canonical text of the whole tree; equal snapshots mean equal trees.
    pub fn snapshot(&self) -> String {
        let nodes: Vec<serde_json::Value> = self
            .tree
            .nodes()
            .iter()
            .map(|node| {
                let chart = node.payload.chart();
                let names = chart.variables();
                serde_json::json!({
                    "id": node.id,
                    "parent": node.parent,
                    "children": node.children,
                    "variables": names,
                    "divisor": chart.divisor().iter().map(|(l, &v)| (l.name(), names[v].clone())).collect::<Vec<_>>(),
                    "zeroed": chart.names_of(&chart.zeroed()),
                    "region": chart.region().display(names).to_string(),
                    "ideals": node.payload.ideals().iter()
                        .map(|m| (m.poly.display(names).to_string(), m.mark)).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::to_string(&nodes).expect("json values serialize")
    }
}

#[derive(Clone, Debug)]
struct Level {
    space: IdealisticSpace,
    role: Role,
    /// Labels present when an adjusted level was created.
    old: BTreeSet<LabelId>,
    /// μ of the last adjusted round started from this level.
    last_mu: Option<u32>,
}

impl Level {
    fn new(space: IdealisticSpace, role: Role) -> Self {
        Level { space, role, old: BTreeSet::new(), last_mu: None }
    }
}

enum Action {
    Pop,
    Push(Level),
    Replace(IdealisticSpace),
    Emit(Operation, Phase),
}

/// Push/pop rounds allowed between two ambient operations.
const STALL_LIMIT: usize = 256;

fn center_of(chart: &Chart, names: &[String]) -> Result<CoordSubspace, DriverError> {
    let vars = names.iter().map(|n| chart.var_index(n)).collect::<Result<Vec<_>, _>>()?;
    Ok(CoordSubspace::new(vars)?)
}

fn blowup_op(chart: &Chart, vars: &BTreeSet<usize>) -> Operation {
    Operation::Blowup { center: chart.names_of(vars) }
}

fn operation_maps(
    chart: &Chart,
    operation: &Operation,
    alloc: &mut LabelAlloc,
    step: u32,
) -> Result<Vec<ChartMap>, DriverError> {
    Ok(match operation {
        Operation::Blowup { center } => {
            let center = center_of(chart, center)?;
            if center.len() == 1 {
                let var = *center.vars().iter().next().expect("nonempty");
                vec![identity_division(chart, var, alloc, step)?.1]
            } else {
                blowup_maps(chart, &center, alloc, step)?
            }
        }
        Operation::Cover { var, value } => {
            let [a, b] = cover(chart, chart.var_index(var)?, &parse_rational(value)?)?;
            vec![a.1, b.1]
        }
        Operation::Substitute { var, offset } => {
            let offset = parse_poly(offset, chart.variables())?;
            vec![coordinate_change(chart, chart.var_index(var)?, &offset)?.1]
        }
    })
}

/// Applies `operation` at `node`; children missing the strict transform of
/// the input are not created.
fn grow(
    tree: &mut ChartTree<IdealisticSpace, TraceStep>,
    alloc: &mut LabelAlloc,
    node: usize,
    operation: &Operation,
) -> Result<Vec<(usize, ChartMap)>, DriverError> {
    let step = tree.trace().len() as u32 + 1;
    let space = tree.node(node).payload.clone();
    let mut out = Vec::new();
    for map in operation_maps(space.chart(), operation, alloc, step)? {
        if let Some(child) = space.controlled_transform(&map)? {
            let id = tree.add_child(node, map.clone(), child.chart().clone(), child);
            out.push((id, map));
        }
    }
    Ok(out)
}

/// Rebuilds the tree from the input by applying the recorded operations.
pub fn replay(input: &IdealisticSpace, trace: &[TraceStep]) -> Result<Resolution, DriverError> {
    let mut tree = ChartTree::new(input.chart().clone(), input.clone());
    let mut alloc = LabelAlloc::after(input.chart());
    for (i, step) in trace.iter().enumerate() {
        if step.node >= tree.len() || !tree.node(step.node).children.is_empty() {
            return Err(DriverError::Replay { step: i, reason: format!("node {} is not a leaf", step.node) });
        }
        let grown = grow(&mut tree, &mut alloc, step.node, &step.operation)?;
        let ids: Vec<usize> = grown.iter().map(|(id, _)| *id).collect();
        if ids != step.children {
            return Err(DriverError::Replay { step: i, reason: format!("children {ids:?} != {:?}", step.children) });
        }
        tree.push_trace(step.clone());
    }
    Ok(Resolution { tree })
}

/// V(ideal) meets the region where `region` does not vanish.
fn meets_region(ideal: &IdealBasis, region: &Poly) -> Result<bool, DriverError> {
    Ok(!radical_member(region, ideal)?)
}

/// Dimension of V(ideal) inside the region, via one extra variable t with
/// t·region = 1.
fn dimension_in_region(ideal: &IdealBasis, region: &Poly) -> Result<i64, DriverError> {
    let n = ideal.nvars();
    let t = Poly::var(n + 1, n);
    let mut gens: Vec<Poly> = ideal.generators().iter().map(|g| g.extend_vars(1)).collect();
    gens.push(&Poly::one(n + 1) - &(&t * &region.extend_vars(1)));
    Ok(dimension(&IdealBasis::new(n + 1, gens)?)?)
}

/// A hyperplane of N contained in Sing, as the center Z_N ∪ {v}.
fn coordinate_component(space: &IdealisticSpace) -> Result<Option<BTreeSet<usize>>, DriverError> {
    let zeroed = space.chart().zeroed();
    for v in space.free_vars() {
        let vars: BTreeSet<usize> = zeroed.iter().copied().chain([v]).collect();
        let center = CoordSubspace::new(vars.iter().copied())?;
        if space.center_meets_region(&center) && space.is_permissible_center(&center)? {
            return Ok(Some(vars));
        }
    }
    Ok(None)
}

/// Curve case: move to the nearest rational singular point and blow it up.
fn curve_action(ambient: &Chart, space: &IdealisticSpace) -> Result<Action, DriverError> {
    let t = space.free_vars()[0];
    let n = space.nvars();
    let zeroed = space.chart().zeroed();
    let mut g = Dense::new(Vec::new());
    for p in space.singular_ideal().generators() {
        if let Some(d) = Dense::from_poly(p, t) {
            g = g.gcd(&d);
        }
    }
    if g.is_zero() {
        return Err(DriverError::DegenerateLevel(1));
    }
    let images: Vec<Poly> = (0..n).map(|v| if zeroed.contains(&v) { Poly::zero(n) } else { Poly::var(n, v) }).collect();
    let region = Dense::from_poly(&space.chart().region().compose(&images)?, t).expect("only t survives on N");
    let all_roots = g.rational_roots();
    let mut residual = g.deflate(&all_roots);
    while residual.degree().unwrap_or(0) > 0 {
        let common = residual.gcd(&region);
        if common.degree() == Some(0) {
            let names = space.chart().variables();
            let text = (0..residual.coeffs().len())
                .map(|i| Poly::from_terms(n, [(monomial_power(n, t, i as u32), residual.coeffs()[i].clone())]))
                .fold(Poly::zero(n), |acc, p| &acc + &p);
            return Err(DriverError::IrrationalPoint(text.display(names).to_string()));
        }
        residual = residual.div_rem(&common).0;
    }
    let root = all_roots
        .into_iter()
        .filter(|r| !region.eval(r).is_zero())
        .min_by_key(|r| (r.abs(), r.is_negative()))
        .ok_or(DriverError::DegenerateLevel(1))?;
    let name = space.chart().variables()[t].clone();
    Ok(if root.is_zero() {
        Action::Emit(blowup_op(ambient, &zeroed.iter().copied().chain([t]).collect()), Phase::Base)
    } else if ambient.label_on(t).is_some() {
        Action::Emit(Operation::Cover { var: name, value: root.to_string() }, Phase::Base)
    } else {
        Action::Emit(Operation::Substitute { var: name, offset: root.to_string() }, Phase::Base)
    })
}

fn monomial_power(n: usize, var: usize, e: u32) -> crate::poly::Monomial {
    crate::poly::Monomial::from_exponents((0..n).map(|v| if v == var { e } else { 0 }).collect())
}

/// Normalize, then either play the monomial game (μ = 0) or open an
/// adjusted round at μ.
fn general_action(level: &mut Level) -> Result<Action, DriverError> {
    if !level.space.is_normalized() {
        return Ok(Action::Replace(level.space.normalize()));
    }
    let space = &level.space;
    let fact = extract_log_factor(space)?;
    match cofactorial_order(space, &fact)? {
        CofactorialOrder::NegInfinity => Err(DriverError::DegenerateLevel(space.dim())),
        CofactorialOrder::Finite(0) => {
            let chart = space.chart();
            let zeroed = chart.zeroed();
            let state = LogState::new(fact.factor.exponents.clone(), space.common_mark())?;
            let vars_of = |labels: &BTreeSet<_>| -> BTreeSet<usize> {
                labels.iter().map(|l| chart.divisor()[l]).chain(zeroed.iter().copied()).collect()
            };
            let labels = choose_center_where(&state, |labels| {
                CoordSubspace::new(vars_of(labels)).is_ok_and(|c| chart.meets(&c))
            })
            .ok_or(DriverError::EmptyMonomialStratum)?;
            Ok(Action::Emit(blowup_op(chart, &vars_of(&labels)), Phase::Monomial))
        }
        CofactorialOrder::Finite(mu) => {
            if let Some(last) = level.last_mu {
                if mu >= last {
                    return Err(DriverError::MuNotDecreasing { mu, last });
                }
            }
            let adjusted = adjust(space, &fact, mu)?;
            let old = space.chart().labels().map(|l| l.id).collect();
            level.last_mu = Some(mu);
            Ok(Action::Push(Level { space: adjusted, role: Role::Adjusted, old, last_mu: None }))
        }
    }
}

enum Direction {
    /// V(z) contains Sing: project onto it.
    Project(usize),
    /// An ambient change bringing such a z closer.
    Change(Operation),
}

/// Looks for f_j monic of degree d_j in a free z. A Tschirnhaus shift is
/// applied as a substitution when z is unlabeled; on a labeled z only a
/// constant shift is usable, through a cover that frees z from its label.
fn find_direction(ambient: &Chart, space: &IdealisticSpace) -> Result<Direction, DriverError> {
    let names = ambient.variables();
    let free = space.free_vars();
    let mut monic: Vec<(bool, usize, usize)> = Vec::new();
    for (j, m) in space.ideals().iter().enumerate() {
        for &z in &free {
            if is_monic_in(&m.poly, z, m.mark) {
                monic.push((ambient.label_on(z).is_some(), j, z));
            }
        }
    }
    monic.sort();
    for &(labeled, j, z) in &monic {
        let m = &space.ideals()[j];
        let (_, shift) = tschirnhaus(&m.poly, z, m.mark, names)?;
        if shift.is_zero() {
            return Ok(Direction::Project(z));
        }
        if !labeled {
            let offset = (-&shift).display(names).to_string();
            return Ok(Direction::Change(Operation::Substitute { var: names[z].clone(), offset }));
        }
        if let Some(c) = shift.constant_value() {
            return Ok(Direction::Change(Operation::Cover { var: names[z].clone(), value: (-c).to_string() }));
        }
    }
    let n = space.nvars();
    for m in space.ideals() {
        for &z in &free {
            for &u in free.iter().filter(|&&u| u != z && ambient.label_on(u).is_none()) {
                for lambda in LADDER {
                    let offset = Poly::var(n, z).scale(&Rational::from_integer(lambda.into()));
                    let mut images: Vec<Poly> = (0..n).map(|v| Poly::var(n, v)).collect();
                    images[u] = &images[u] + &offset;
                    if is_monic_in(&m.poly.compose(&images)?, z, m.mark) {
                        let offset = offset.display(names).to_string();
                        return Ok(Direction::Change(Operation::Substitute { var: names[u].clone(), offset }));
                    }
                }
            }
        }
    }
    Err(DriverError::NoMonicDirection)
}

/// Adjusted level: rectify a codimension-one component, separate old
/// components meeting Sing, then descend to a maximal contact hypersurface.
fn adjusted_action(ambient: &Chart, level: &Level) -> Result<Action, DriverError> {
    let space = &level.space;
    let chart = space.chart();
    let sing = space.singular_ideal();
    if dimension_in_region(&sing, chart.region())? == space.dim() as i64 - 1 {
        return match find_direction(ambient, space)? {
            Direction::Change(op) => Ok(Action::Emit(op, Phase::Reduce)),
            Direction::Project(_) => Err(DriverError::NonCoordinateComponent),
        };
    }
    let n = space.nvars();
    for &id in &level.old {
        let Some((_, v)) = chart.label_by_id(id) else { continue };
        if chart.zeroed().contains(&v) {
            continue;
        }
        if meets_region(&sing.with([Poly::var(n, v)])?, chart.region())? {
            let projected = coefficient_ideals(&ProjectionContext::new(space.clone(), v))?;
            return Ok(Action::Push(Level::new(projected, Role::SeparateOld)));
        }
    }
    match find_direction(ambient, space)? {
        Direction::Project(z) => {
            let projected = coefficient_ideals(&ProjectionContext::new(space.clone(), z))?;
            Ok(Action::Push(Level::new(projected, Role::MaxContact)))
        }
        Direction::Change(op) => Ok(Action::Emit(op, Phase::MaxContact)),
    }
}

/// δ along each coordinate stratum inside Sing is exactly 1.
fn check_adjusted(space: &IdealisticSpace) -> Result<(), DriverError> {
    for center in space.coordinate_centers() {
        if space.center_meets_region(&center) && space.is_permissible_center(&center)? {
            let delta = space.delta_along(&center)?;
            if delta != Rational::from_integer(1.into()) {
                return Err(DriverError::AdjustednessLost(delta));
            }
        }
    }
    Ok(())
}

struct Driver {
    tree: ChartTree<IdealisticSpace, TraceStep>,
    alloc: LabelAlloc,
    fuel: usize,
    check_adjusted: bool,
}

impl Driver {
    fn next_action(&self, node: usize, stack: &mut [Level]) -> Result<Action, DriverError> {
        let ambient = self.tree.node(node).payload.chart();
        let level = stack.last_mut().expect("nonempty stack");
        let space = &level.space;
        if space.is_nonsingular()? {
            return Ok(Action::Pop);
        }
        match space.dim() {
            0 => return Err(DriverError::DegenerateLevel(0)),
            1 => return curve_action(ambient, space),
            _ => {}
        }
        if let Some(vars) = coordinate_component(space)? {
            return Ok(Action::Emit(blowup_op(ambient, &vars), Phase::Reduce));
        }
        match level.role {
            Role::Adjusted => {
                if self.check_adjusted {
                    check_adjusted(space)?;
                }
                adjusted_action(ambient, level)
            }
            Role::Input | Role::SeparateOld | Role::MaxContact => general_action(level),
        }
    }

    /// Runs the stack at `node` until it empties or an operation is emitted;
    /// returns the children with their transformed stacks.
    fn advance(&mut self, node: usize, mut stack: Vec<Level>) -> Result<Vec<(usize, Vec<Level>)>, DriverError> {
        let mut rounds = 0;
        while !stack.is_empty() {
            rounds += 1;
            if rounds > STALL_LIMIT {
                return Err(DriverError::Stalled(STALL_LIMIT));
            }
            match self.next_action(node, &mut stack)? {
                Action::Pop => {
                    stack.pop();
                }
                Action::Push(level) => stack.push(level),
                Action::Replace(space) => stack.last_mut().expect("nonempty stack").space = space,
                Action::Emit(operation, phase) => return self.emit(node, &stack, operation, phase),
            }
        }
        Ok(Vec::new())
    }

    fn emit(
        &mut self,
        node: usize,
        stack: &[Level],
        operation: Operation,
        phase: Phase,
    ) -> Result<Vec<(usize, Vec<Level>)>, DriverError> {
        if self.tree.trace().len() >= self.fuel {
            return Err(DriverError::Fuel(self.fuel));
        }
        if let Operation::Blowup { center } = &operation {
            let c = center_of(self.tree.node(node).payload.chart(), center)?;
            for (i, level) in stack.iter().enumerate() {
                if level.space.center_meets_region(&c) && !level.space.is_permissible_center(&c)? {
                    return Err(DriverError::CenterNotPermissible { center: center.clone(), level: i });
                }
            }
        }
        let grown = grow(&mut self.tree, &mut self.alloc, node, &operation)?;
        let mut out = Vec::with_capacity(grown.len());
        for (id, map) in &grown {
            let mut child = Vec::with_capacity(stack.len());
            for level in stack {
                match level.space.controlled_transform(map)? {
                    Some(space) => child.push(Level { space, ..level.clone() }),
                    None => break,
                }
            }
            out.push((*id, child));
        }
        self.tree.push_trace(TraceStep {
            node,
            operation,
            phase,
            levels: stack.iter().map(|l| l.role).collect(),
            children: grown.iter().map(|(id, _)| *id).collect(),
        });
        Ok(out)
    }
}

/// Resolves `input`: every leaf of the returned tree has empty Sing, which
/// is checked before returning.
pub fn redsing(input: &IdealisticSpace, config: &DriverConfig) -> Result<Resolution, DriverError> {
    let mut driver = Driver {
        tree: ChartTree::new(input.chart().clone(), input.clone()),
        alloc: LabelAlloc::after(input.chart()),
        fuel: config.fuel,
        check_adjusted: config.check_adjusted,
    };
    let mut work = vec![(0usize, vec![Level::new(input.clone(), Role::Input)])];
    while let Some((node, stack)) = work.pop() {
        let children = driver.advance(node, stack)?;
        work.extend(children.into_iter().rev());
    }
    let resolution = Resolution { tree: driver.tree };
    if let Some((leaf, _)) = resolution.verify()?.into_iter().find(|(_, ok)| !ok) {
        return Err(DriverError::NotResolved(leaf));
    }
    Ok(resolution)
}
