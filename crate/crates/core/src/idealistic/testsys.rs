use serde::{Deserialize, Serialize};

use super::{IdealisticError, IdealisticSpace};
use crate::chart::{identity_division, open_projection, Chart, ChartMap, ChartTree, LabelAlloc};
use crate::poly::CoordSubspace;

/// One step of a test system; centers are named by chart variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TestStep {
    Center { vars: Vec<String> },
    Projection { m: usize },
}

pub type TestSystem = Vec<TestStep>;

#[derive(Debug)]
pub enum TestOutcome {
    Permissible(ChartTree<IdealisticSpace, TestStep>),
    /// 1-based index of the first step that is not permissible in some chart.
    Fails { step: usize },
}

fn center_in(chart: &Chart, names: &[String]) -> Result<CoordSubspace, IdealisticError> {
    let vars = names.iter().map(|n| chart.var_index(n)).collect::<Result<Vec<_>, _>>()?;
    Ok(CoordSubspace::new(vars)?)
}

/// Applies the steps to every leaf; a center is skipped on leaves whose
/// region it misses.
pub fn run_test_system(space: &IdealisticSpace, system: &[TestStep]) -> Result<TestOutcome, IdealisticError> {
    let mut tree = ChartTree::new(space.chart().clone(), space.clone());
    let mut leaves = vec![0usize];
    let mut alloc = LabelAlloc::after(space.chart());
    for (k, step) in system.iter().enumerate() {
        let mut next = Vec::new();
        let label_start = alloc.peek();
        for &leaf in &leaves {
            let current = tree.node(leaf).payload.clone();
            let mut children: Vec<(ChartMap, IdealisticSpace)> = Vec::new();
            match step {
                TestStep::Projection { m } => {
                    let (_, map) = open_projection(current.chart(), *m)?;
                    let child = current.controlled_transform(&map)?.expect("projections keep N");
                    children.push((map, child));
                }
                TestStep::Center { vars } => {
                    let center = center_in(current.chart(), vars)?;
                    if !current.center_meets_region(&center) {
                        next.push(leaf);
                        continue;
                    }
                    if !current.is_permissible_center(&center)? {
                        return Ok(TestOutcome::Fails { step: k + 1 });
                    }
                    let mut local = LabelAlloc::starting_at(label_start);
                    for (map, child) in current.blow_up(&center, &mut local, k as u32 + 1)? {
                        if let Some(child) = child {
                            children.push((map, child));
                        }
                    }
                    if local.peek() > alloc.peek() {
                        alloc = local;
                    }
                }
            }
            for (map, child) in children {
                let id = tree.add_child(leaf, map, child.chart().clone(), child);
                next.push(id);
            }
        }
        tree.push_trace(step.clone());
        leaves = next;
    }
    Ok(TestOutcome::Permissible(tree))
}

/// Candidate centers offered at a chart.
pub type CenterGenerator<'a> = &'a dyn Fn(&Chart) -> Vec<CoordSubspace>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Same { systems: usize },
    /// A system whose last center is permissible for exactly one side, with
    /// the chart index chosen after each blow-up.
    Counterexample { system: TestSystem, charts: Vec<usize>, permissible_for_first: bool },
}

/// Every nonempty subset of the chart variables, smallest first.
pub fn all_coordinate_centers(chart: &Chart) -> Vec<CoordSubspace> {
    let n = chart.nvars();
    let mut out: Vec<CoordSubspace> = (1u64..(1u64 << n))
        .map(|mask| CoordSubspace::new((0..n).filter(|v| mask & (1 << v) != 0)).expect("nonempty"))
        .collect();
    out.sort_by_key(|c| c.len());
    out
}

struct Search<'a> {
    generator: CenterGenerator<'a>,
    fuel: usize,
    systems: usize,
    path: TestSystem,
    charts: Vec<usize>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), IdealisticError> {
        self.systems += 1;
        if self.systems > self.fuel {
            return Err(IdealisticError::Fuel { what: "test systems", limit: self.fuel });
        }
        Ok(())
    }

    fn explore(
        &mut self,
        ambient: &Chart,
        first: Option<&IdealisticSpace>,
        second: Option<&IdealisticSpace>,
        depth: usize,
        projected: bool,
    ) -> Result<Option<EquivVerdict>, IdealisticError> {
        if first.is_none() && second.is_none() {
            return Ok(None);
        }
        let verdict = |s: Option<&IdealisticSpace>, c: &CoordSubspace| match s {
            Some(space) => space.is_permissible_center(c),
            None => Ok(false),
        };
        if depth > 0 {
            for center in (self.generator)(ambient) {
                if !ambient.meets(&center) {
                    continue;
                }
                self.tick()?;
                let (va, vb) = (verdict(first, &center)?, verdict(second, &center)?);
                self.path.push(TestStep::Center { vars: ambient.names_of(center.vars()) });
                if va != vb {
                    return Ok(Some(EquivVerdict::Counterexample {
                        system: self.path.clone(),
                        charts: self.charts.clone(),
                        permissible_for_first: va,
                    }));
                }
                if va && depth > 1 {
                    let step = self.path.len() as u32;
                    let mut alloc = LabelAlloc::after(ambient);
                    let maps = if center.len() == 1 {
                        let var = *center.vars().iter().next().expect("nonempty");
                        vec![identity_division(ambient, var, &mut alloc, step)?.1]
                    } else {
                        crate::chart::blowup_maps(ambient, &center, &mut alloc, step)?
                    };
                    for (i, map) in maps.iter().enumerate() {
                        let child = ambient.apply(map)?.expect("ambient charts have no subspace");
                        let a = transform(first, map)?;
                        let b = transform(second, map)?;
                        self.charts.push(i);
                        let found = self.explore(&child, a.as_ref(), b.as_ref(), depth - 1, projected)?;
                        self.charts.pop();
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
                self.path.pop();
            }
        }
        if !projected {
            let (child, map) = open_projection(ambient, 1)?;
            let a = transform(first, &map)?;
            let b = transform(second, &map)?;
            self.path.push(TestStep::Projection { m: 1 });
            let found = self.explore(&child, a.as_ref(), b.as_ref(), depth, true)?;
            self.path.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

fn transform(space: Option<&IdealisticSpace>, map: &ChartMap) -> Result<Option<IdealisticSpace>, IdealisticError> {
    match space {
        Some(s) => s.controlled_transform(map),
        None => Ok(None),
    }
}

/// Compares permissibility verdicts along single-chart paths: up to `depth`
/// centers and at most one m=1 projection. Permissible centers are blown up
/// on both sides and every chart is explored.
pub fn equiv_bounded(
    first: &IdealisticSpace,
    second: &IdealisticSpace,
    depth: usize,
    generator: Option<CenterGenerator<'_>>,
    fuel: usize,
) -> Result<EquivVerdict, IdealisticError> {
    let ambient = first.chart().clone().with_subspace(None)?;
    let other = second.chart().clone().with_subspace(None)?;
    if ambient != other {
        return Err(IdealisticError::ChartMismatch);
    }
    let default: CenterGenerator<'_> = &all_coordinate_centers;
    let mut search = Search { generator: generator.unwrap_or(default), fuel, systems: 0, path: Vec::new(), charts: Vec::new() };
    match search.explore(&ambient, Some(first), Some(second), depth, false)? {
        Some(counter) => Ok(counter),
        None => Ok(EquivVerdict::Same { systems: search.systems }),
    }
}
