use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{PolyError, Rational};

/// Extended natural number; `Infinite` is the order of the zero polynomial.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }

    pub fn is_at_least(self, n: u32) -> bool {
        self >= Order::Finite(n)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalPoint(Vec<Rational>);

impl RationalPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalPoint(coords)
    }

    pub fn origin(nvars: usize) -> Self {
        RationalPoint(vec![Rational::zero(); nvars])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn extend_zero(&self, extra: usize) -> Self {
        let mut c = self.0.clone();
        c.extend(std::iter::repeat_n(Rational::zero(), extra));
        RationalPoint(c)
    }
}

/// Coordinate subspace V(x_i : i in zeroed), given by its zeroed variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct CoordSubspace(BTreeSet<usize>);

impl CoordSubspace {
    pub fn new(vars: impl IntoIterator<Item = usize>) -> Result<Self, PolyError> {
        let set: BTreeSet<usize> = vars.into_iter().collect();
        if set.is_empty() {
            return Err(PolyError::EmptySubspace);
        }
        Ok(CoordSubspace(set))
    }

    pub fn vars(&self) -> &BTreeSet<usize> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn is_superset(&self, other: &BTreeSet<usize>) -> bool {
        self.0.is_superset(other)
    }

    pub fn check_within(&self, nvars: usize) -> Result<(), PolyError> {
        match self.0.iter().find(|&&v| v >= nvars) {
            Some(&index) => Err(PolyError::VariableOutOfRange { index, nvars }),
            None => Ok(()),
        }
    }

    pub fn union(&self, other: &BTreeSet<usize>) -> CoordSubspace {
        CoordSubspace(self.0.union(other).copied().collect())
    }
}
