//! Gröbner-basis kernel: emptiness, radical membership and dimension of
//! affine varieties over the algebraic closure.

mod groebner;

use thiserror::Error;

pub use groebner::{GroebnerBasis, TermOrder};

use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("Gröbner fuel exhausted: {what} exceeded {limit}")]
    Fuel { what: &'static str, limit: usize },
    #[error("generator has {found} variables, ideal has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Guards that turn runaway completions into explicit errors.
#[derive(Clone, Debug)]
pub struct Limits {
    pub max_basis: usize,
    pub max_degree: u32,
    pub max_pairs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_basis: 2_000, max_degree: 256, max_pairs: 200_000 }
    }
}

/// Finite generating set; zero generators are dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealBasis {
    nvars: usize,
    generators: Vec<Poly>,
}

impl IdealBasis {
    pub fn new(nvars: usize, generators: impl IntoIterator<Item = Poly>) -> Result<Self, IdealError> {
        let mut gens = Vec::new();
        for g in generators {
            if g.nvars() != nvars {
                return Err(IdealError::DimensionMismatch { expected: nvars, found: g.nvars() });
            }
            if !g.is_zero() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        Ok(IdealBasis { nvars, generators: gens })
    }

    pub fn zero(nvars: usize) -> Self {
        IdealBasis { nvars, generators: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Poly>) -> Result<Self, IdealError> {
        IdealBasis::new(self.nvars, self.generators.iter().cloned().chain(extra))
    }
}

pub fn groebner(ideal: &IdealBasis) -> Result<GroebnerBasis, IdealError> {
    groebner::buchberger(ideal, &Limits::default())
}

pub fn groebner_with(ideal: &IdealBasis, limits: &Limits) -> Result<GroebnerBasis, IdealError> {
    groebner::buchberger(ideal, limits)
}

/// V(I) = ∅ over the algebraic closure, i.e. 1 ∈ I.
pub fn is_empty_variety(ideal: &IdealBasis) -> Result<bool, IdealError> {
    if ideal.generators.iter().any(Poly::is_nonzero_constant) {
        return Ok(true);
    }
    if ideal.generators.is_empty() {
        return Ok(false);
    }
    Ok(groebner(ideal)?.is_unit())
}

/// V(I) ⊆ V(f), decided by the Rabinowitsch trick.
pub fn radical_member(f: &Poly, ideal: &IdealBasis) -> Result<bool, IdealError> {
    if f.nvars() != ideal.nvars {
        return Err(IdealError::DimensionMismatch { expected: ideal.nvars, found: f.nvars() });
    }
    if f.is_zero() {
        return Ok(true);
    }
    if f.is_constant() {
        return is_empty_variety(ideal);
    }
    if ideal.generators.contains(f) {
        return Ok(true);
    }
    let n = ideal.nvars;
    let t = Poly::var(n + 1, n);
    let inverse = &Poly::one(n + 1) - &(&t * &f.extend_vars(1));
    let lifted = IdealBasis::new(
        n + 1,
        ideal.generators.iter().map(|g| g.extend_vars(1)).chain(std::iter::once(inverse)),
    )?;
    is_empty_variety(&lifted)
}

/// Krull dimension of V(I); -1 for the empty variety.
pub fn dimension(ideal: &IdealBasis) -> Result<i64, IdealError> {
    let gb = groebner(ideal)?;
    Ok(dimension_of_basis(&gb))
}

pub fn dimension_of_basis(gb: &GroebnerBasis) -> i64 {
    if gb.is_unit() {
        return -1;
    }
    let n = gb.nvars();
    let leads: Vec<Vec<usize>> = gb.leading_monomials().map(|m| m.support().collect()).collect();
    // Largest set of variables containing the support of no leading monomial.
    (0..=n)
        .rev()
        .find(|&size| {
            subsets(n, size).any(|set| !leads.iter().any(|supp| supp.iter().all(|v| set & (1 << v) != 0)))
        })
        .map_or(0, |s| s as i64)
}

fn subsets(n: usize, size: usize) -> impl Iterator<Item = u64> {
    (0u64..(1u64 << n)).filter(move |s| s.count_ones() as usize == size)
}

/// V(I) = V(J), checked generator by generator.
pub fn same_variety(a: &IdealBasis, b: &IdealBasis) -> Result<bool, IdealError> {
    for f in a.generators() {
        if !radical_member(f, b)? {
            return Ok(false);
        }
    }
    for f in b.generators() {
        if !radical_member(f, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}
