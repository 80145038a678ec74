use std::collections::BTreeSet;

use num_traits::Zero;

use super::{IdealBasis, IdealError, Limits};
use crate::poly::{Monomial, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermOrder {
    GradedReverseLex,
}

/// Reduced Gröbner basis, sorted by leading monomial, every element monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    nvars: usize,
    elements: Vec<Poly>,
    order: TermOrder,
}

impl GroebnerBasis {
    pub fn elements(&self) -> &[Poly] {
        &self.elements
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn is_unit(&self) -> bool {
        self.elements.iter().any(Poly::is_nonzero_constant)
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.elements.iter().filter_map(|p| p.leading().map(|(m, _)| m))
    }

    /// Normal form of `f` modulo the basis.
    pub fn reduce(&self, f: &Poly) -> Poly {
        normal_form(f, &self.elements)
    }

    pub fn contains(&self, f: &Poly) -> bool {
        self.reduce(f).is_zero()
    }
}

fn normal_form(f: &Poly, basis: &[Poly]) -> Poly {
    let mut rem = f.clone();
    let mut out = Poly::zero(f.nvars());
    while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = basis.iter().find_map(|g| {
            let (lm, lc) = g.leading()?;
            lm.quotient_of(&m).map(|q| (g, q, lc.clone()))
        });
        match divisor {
            Some((g, q, lc)) => rem.sub_scaled(g, &q, &(c / lc)),
            None => {
                rem.sub_scaled(&Poly::one(f.nvars()), &m, &c);
                out = &out + &Poly::term(m, c);
            }
        }
    }
    out
}

fn s_polynomial(f: &Poly, g: &Poly) -> Poly {
    let (lf, cf) = f.leading().expect("nonzero basis element");
    let (lg, cg) = g.leading().expect("nonzero basis element");
    let lcm = lf.lcm(lg);
    let mf = lf.quotient_of(&lcm).expect("lcm is a multiple");
    let mg = lg.quotient_of(&lcm).expect("lcm is a multiple");
    let mut s = f.mul_term(&mf, &cf.recip());
    s.sub_scaled(g, &mg, &cg.recip());
    s
}

/// Pending critical pair; ordered by lcm first so the normal strategy falls
/// out of `BTreeSet` iteration.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    lcm: Monomial,
    i: usize,
    j: usize,
}

pub(super) fn buchberger(ideal: &IdealBasis, limits: &Limits) -> Result<GroebnerBasis, IdealError> {
    let nvars = ideal.nvars();
    let mut basis: Vec<Poly> = Vec::new();
    for g in ideal.generators() {
        let r = normal_form(g, &basis);
        if !r.is_zero() {
            if r.is_constant() {
                return Ok(unit_basis(nvars));
            }
            basis.push(r.monic());
        }
    }
    let mut pairs: BTreeSet<Pair> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert(make_pair(&basis, i, j));
        }
    }
    let mut processed = 0usize;
    while let Some(pair) = pairs.pop_first() {
        processed += 1;
        if processed > limits.max_pairs {
            return Err(IdealError::Fuel { what: "critical pairs", limit: limits.max_pairs });
        }
        let (li, lj) = (lead(&basis[pair.i]), lead(&basis[pair.j]));
        if li.is_coprime(lj) || chain_criterion(&basis, &pairs, &pair) {
            continue;
        }
        let s = s_polynomial(&basis[pair.i], &basis[pair.j]);
        let h = normal_form(&s, &basis);
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return Ok(unit_basis(nvars));
        }
        let h = h.monic();
        if h.total_degree().unwrap_or(0) > limits.max_degree {
            return Err(IdealError::Fuel { what: "basis degree", limit: limits.max_degree as usize });
        }
        basis.push(h);
        if basis.len() > limits.max_basis {
            return Err(IdealError::Fuel { what: "basis size", limit: limits.max_basis });
        }
        let k = basis.len() - 1;
        for i in 0..k {
            pairs.insert(make_pair(&basis, i, k));
        }
    }
    Ok(GroebnerBasis { nvars, elements: interreduce(basis), order: TermOrder::GradedReverseLex })
}

fn lead(p: &Poly) -> &Monomial {
    p.leading().expect("nonzero basis element").0
}

fn make_pair(basis: &[Poly], i: usize, j: usize) -> Pair {
    Pair { lcm: lead(&basis[i]).lcm(lead(&basis[j])), i, j }
}

fn pending(pairs: &BTreeSet<Pair>, basis: &[Poly], a: usize, b: usize) -> bool {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    pairs.contains(&make_pair(basis, i, j))
}

/// Buchberger's second criterion: some third leading monomial divides the
/// lcm and both side pairs were already treated.
fn chain_criterion(basis: &[Poly], pairs: &BTreeSet<Pair>, pair: &Pair) -> bool {
    (0..basis.len()).any(|k| {
        k != pair.i
            && k != pair.j
            && lead(&basis[k]).divides(&pair.lcm)
            && !pending(pairs, basis, pair.i, k)
            && !pending(pairs, basis, pair.j, k)
    })
}

fn unit_basis(nvars: usize) -> GroebnerBasis {
    GroebnerBasis { nvars, elements: vec![Poly::one(nvars)], order: TermOrder::GradedReverseLex }
}

fn interreduce(mut basis: Vec<Poly>) -> Vec<Poly> {
    basis.sort_by(|a, b| lead(a).cmp(lead(b)));
    let mut minimal: Vec<Poly> = Vec::new();
    for p in basis {
        if !minimal.iter().any(|q| lead(q).divides(lead(&p))) {
            minimal.push(p);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        let (lm, lc) = minimal[i].leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        let mut tail = minimal[i].clone();
        tail.sub_scaled(&Poly::one(tail.nvars()), &lm, &lc);
        let tail = normal_form(&tail, &others);
        let mut p = Poly::term(lm, lc);
        p = &p + &tail;
        reduced.push(p.monic());
    }
    reduced.sort_by(|a, b| lead(a).cmp(lead(b)));
    debug_assert!(reduced.iter().all(|p| !p.leading().map(|(_, c)| c.is_zero()).unwrap_or(true)));
    reduced
}
