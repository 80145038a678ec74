//! Exponent game for marked ideals that are monomials in the divisor.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::chart::{DivisorLabel, LabelAlloc, LabelOrigin};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomialError {
    #[error("control must be at least 1")]
    ZeroControl,
    #[error("monomial strategy exceeded {0} blow-ups")]
    Fuel(usize),
}

/// Exponents a_D of Z = ∏ x_D^{a_D} with control d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogState {
    exponents: BTreeMap<DivisorLabel, u32>,
    control: u32,
}

impl LogState {
    pub fn new(exponents: BTreeMap<DivisorLabel, u32>, control: u32) -> Result<Self, MonomialError> {
        if control == 0 {
            return Err(MonomialError::ZeroControl);
        }
        Ok(LogState { exponents, control })
    }

    pub fn exponents(&self) -> &BTreeMap<DivisorLabel, u32> {
        &self.exponents
    }

    pub fn control(&self) -> u32 {
        self.control
    }

    pub fn exponent(&self, label: &DivisorLabel) -> u32 {
        self.exponents.get(label).copied().unwrap_or(0)
    }

    fn sum(&self, labels: &BTreeSet<DivisorLabel>) -> u32 {
        labels.iter().map(|l| self.exponent(l)).sum()
    }

    pub fn is_singular(&self) -> bool {
        self.exponents.values().sum::<u32>() >= self.control
    }
}

/// Inclusion-minimal label sets whose exponents sum to at least d.
pub fn log_sing_strata(state: &LogState) -> Vec<BTreeSet<DivisorLabel>> {
    let support: Vec<DivisorLabel> = state.exponents.iter().filter(|(_, &a)| a > 0).map(|(l, _)| *l).collect();
    let d = state.control;
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << support.len()) {
        let set: BTreeSet<DivisorLabel> =
            support.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| *l).collect();
        let total = state.sum(&set);
        // minimal iff dropping any single member falls below d
        if total >= d && set.iter().all(|l| total - state.exponent(l) < d) {
            out.push(set);
        }
    }
    out
}

/// Smallest stratum, then largest exponent sum, then smallest label ids.
pub fn choose_center(state: &LogState) -> Option<BTreeSet<DivisorLabel>> {
    choose_center_where(state, |_| true)
}

/// As [`choose_center`], among the strata accepted by `keep`.
pub fn choose_center_where(
    state: &LogState,
    keep: impl Fn(&BTreeSet<DivisorLabel>) -> bool,
) -> Option<BTreeSet<DivisorLabel>> {
    log_sing_strata(state).into_iter().filter(|s| keep(s)).min_by(|a, b| {
        let ids = |s: &BTreeSet<DivisorLabel>| s.iter().map(|l| l.id).collect::<Vec<_>>();
        a.len().cmp(&b.len()).then(state.sum(b).cmp(&state.sum(a))).then(ids(a).cmp(&ids(b)))
    })
}

/// Child of a monomial blow-up; `dropped` is the label whose chart this is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogChild {
    pub dropped: Option<DivisorLabel>,
    pub state: LogState,
}

/// Exponent law of the controlled transform along the stratum `center`.
pub fn log_blowup(state: &LogState, center: &BTreeSet<DivisorLabel>, alloc: &mut LabelAlloc, step: u32) -> Vec<LogChild> {
    let d = state.control;
    let total = state.sum(center);
    debug_assert!(total >= d, "center must be singular");
    if center.len() == 1 {
        let label = *center.iter().next().expect("nonempty");
        let mut exponents = state.exponents.clone();
        exponents.insert(label, state.exponent(&label) - d);
        return vec![LogChild { dropped: None, state: LogState { exponents, control: d } }];
    }
    let fresh = alloc.fresh(LabelOrigin::Exceptional { step });
    center
        .iter()
        .map(|&ell| {
            let mut exponents = state.exponents.clone();
            exponents.remove(&ell);
            exponents.insert(fresh, total - d);
            LogChild { dropped: Some(ell), state: LogState { exponents, control: d } }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogNode {
    pub state: LogState,
    pub parent: Option<usize>,
    pub dropped: Option<DivisorLabel>,
    pub children: Vec<usize>,
}

/// One blow-up of the game: the node it was applied at and its center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogStep {
    pub node: usize,
    pub center: BTreeSet<DivisorLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialResolution {
    pub nodes: Vec<LogNode>,
    pub steps: Vec<LogStep>,
}

impl MonomialResolution {
    pub fn leaves(&self) -> impl Iterator<Item = &LogNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }
}

/// Plays the game on every singular leaf, oldest leaf first, until no leaf
/// is singular or `fuel` blow-ups are spent.
pub fn monomial_resolve(state: &LogState, alloc: &mut LabelAlloc, fuel: usize) -> Result<MonomialResolution, MonomialError> {
    let mut nodes = vec![LogNode { state: state.clone(), parent: None, dropped: None, children: Vec::new() }];
    let mut steps = Vec::new();
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let Some(center) = choose_center(&nodes[id].state) else { continue };
        if steps.len() >= fuel {
            return Err(MonomialError::Fuel(fuel));
        }
        steps.push(LogStep { node: id, center: center.clone() });
        let step = steps.len() as u32;
        for child in log_blowup(&nodes[id].state, &center, alloc, step) {
            let cid = nodes.len();
            nodes.push(LogNode { state: child.state, parent: Some(id), dropped: child.dropped, children: Vec::new() });
            nodes[id].children.push(cid);
            queue.push_back(cid);
        }
    }
    Ok(MonomialResolution { nodes, steps })
}
