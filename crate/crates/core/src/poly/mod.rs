//! Exact sparse multivariate polynomials over the rationals.

mod monomial;
mod subspace;
pub mod univariate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use monomial::Monomial;
pub use subspace::{CoordSubspace, Order, RationalPoint};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no image supplied for variable {0}")]
    MissingImage(usize),
    #[error("division is not exact; remainder term {witness}")]
    NonExact { witness: String },
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("coordinate subspace must be non-empty")]
    EmptySubspace,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
}

/// Sparse polynomial: a map from monomial to nonzero coefficient.
///
/// Invariant: no stored zero coefficient, every monomial has `nvars` slots.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::term(Monomial::var(nvars, index), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    /// Builds from integer-coefficient exponent lists, handy in tests.
    pub fn from_int_terms(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            nvars,
            terms
                .iter()
                .map(|(c, e)| (Monomial::from_exponents(e.to_vec()), rat(*c))),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Some(c) when the polynomial is the constant c (including zero).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn is_nonzero_constant(&self) -> bool {
        self.constant_value().is_some_and(|c| !c.is_zero())
    }

    /// Leading term in the graded reverse lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(var)).max()
    }

    /// Variables occurring in some term.
    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.support().collect::<Vec<_>>()).collect()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    /// `self - c * m * other`, the reduction step of division algorithms.
    pub fn sub_scaled(&mut self, other: &Poly, m: &Monomial, c: &Rational) {
        for (t, a) in other.terms.iter() {
            self.add_term(t.mul(m), -(a * c));
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Leading coefficient normalized to one; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e > 0 {
                out.add_term(m.with_exponent(var, e - 1), c * rat(e as i64));
            }
        }
        out
    }

    /// Mixed partial derivative for a multi-index `alpha`.
    pub fn derivative_multi(&self, alpha: &[u32]) -> Poly {
        let mut out = self.clone();
        for (v, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(v);
                if out.is_zero() {
                    return out;
                }
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        self.check_len(point.len())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    fn check_len(&self, n: usize) -> Result<(), PolyError> {
        if n != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: n });
        }
        Ok(())
    }

    /// Ring homomorphism sending variable `i` to `images[i]`.
    pub fn compose(&self, images: &[Poly]) -> Result<Poly, PolyError> {
        self.check_len(images.len())?;
        let target = images.first().map(Poly::nvars).unwrap_or(0);
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(PolyError::DimensionMismatch { expected: target, found: bad.nvars });
        }
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                while cache.len() <= e as usize {
                    let next = cache.last().map(|p| p * &images[v]).unwrap_or_else(|| Poly::one(target));
                    cache.push(next);
                }
                t = &t * &cache[e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Substitution by a partial map; every variable of `self` needs an image.
    pub fn substitute(&self, images: &BTreeMap<usize, Poly>, target_nvars: usize) -> Result<Poly, PolyError> {
        let support = self.support();
        let mut full = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            match images.get(&v) {
                Some(p) => {
                    if p.nvars != target_nvars {
                        return Err(PolyError::DimensionMismatch { expected: target_nvars, found: p.nvars });
                    }
                    full.push(p.clone());
                }
                None if support.contains(&v) => return Err(PolyError::MissingImage(v)),
                None => full.push(Poly::zero(target_nvars)),
            }
        }
        if self.nvars == 0 {
            return Ok(Poly::constant(target_nvars, self.constant_value().unwrap_or_else(Rational::zero)));
        }
        self.compose(&full)
    }

    /// `f(X + P)`.
    pub fn translate(&self, point: &RationalPoint) -> Result<Poly, PolyError> {
        self.check_len(point.len())?;
        let images: Vec<Poly> = (0..self.nvars)
            .map(|v| &Poly::var(self.nvars, v) + &Poly::constant(self.nvars, point.coords()[v].clone()))
            .collect();
        self.compose(&images)
    }

    /// Multiplicity at a rational point: lowest total degree of `f(X + P)`.
    pub fn order_at_point(&self, point: &RationalPoint) -> Result<Order, PolyError> {
        let shifted = self.translate(point)?;
        Ok(shifted.order_at_origin())
    }

    pub fn order_at_origin(&self) -> Order {
        self.terms.keys().map(Monomial::degree).min().map_or(Order::Infinite, Order::Finite)
    }

    /// Generic multiplicity along the coordinate subspace V(S).
    pub fn order_along(&self, subspace: &CoordSubspace) -> Result<Order, PolyError> {
        if let Some(&bad) = subspace.vars().iter().find(|&&v| v >= self.nvars) {
            return Err(PolyError::VariableOutOfRange { index: bad, nvars: self.nvars });
        }
        Ok(self
            .terms
            .keys()
            .map(|m| m.degree_in(subspace.vars()))
            .min()
            .map_or(Order::Infinite, Order::Finite))
    }

    /// Largest monomial in the `allowed` variables dividing `self`.
    pub fn monomial_content(&self, allowed: &std::collections::BTreeSet<usize>) -> Result<Monomial, PolyError> {
        let mut iter = self.terms.keys();
        let first = iter.next().ok_or(PolyError::ZeroPolynomial)?;
        let mut g = first.clone();
        for m in iter {
            g = g.gcd(m);
        }
        let e = (0..self.nvars).map(|v| if allowed.contains(&v) { g.exponent(v) } else { 0 }).collect();
        Ok(Monomial::from_exponents(e))
    }

    pub fn divide_exact_monomial(&self, m: &Monomial) -> Result<Poly, PolyError> {
        self.check_len(m.nvars())?;
        let mut out = Poly::zero(self.nvars);
        for (t, c) in &self.terms {
            match m.quotient_of(t) {
                Some(q) => {
                    out.terms.insert(q, c.clone());
                }
                None => {
                    return Err(PolyError::NonExact { witness: format!("{:?}", Poly::term(t.clone(), c.clone())) })
                }
            }
        }
        Ok(out)
    }

    /// Exact quotient by a polynomial via leading-term division.
    pub fn divide_exact(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        self.check_len(divisor.nvars)?;
        let (lm, lc) = divisor.leading().ok_or(PolyError::ZeroPolynomial)?;
        let mut rem = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let Some(t) = lm.quotient_of(&m) else {
                return Err(PolyError::NonExact { witness: format!("{:?}", Poly::term(m, c)) });
            };
            let coef = &c / lc;
            rem.sub_scaled(divisor, &t, &coef);
            q.add_term(t, coef);
        }
        Ok(q)
    }

    /// Coefficients of `self` as a polynomial in `var`: entry `s` is the
    /// coefficient of `var^s`, which no longer involves `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let s = m.exponent(var) as usize;
            out[s].add_term(m.with_exponent(var, 0), c.clone());
        }
        out
    }

    /// Same polynomial in a ring with `extra` more variables appended.
    pub fn extend_vars(&self, extra: usize) -> Poly {
        Poly {
            nvars: self.nvars + extra,
            terms: self.terms.iter().map(|(m, c)| (m.extend(extra), c.clone())).collect(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

/// Text rendering in the parser's grammar, highest term first.
pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    let name = self.names.get(v).cloned().unwrap_or_else(|| format!("x{v}"));
                    if e == 1 { name } else { format!("{name}^{e}") }
                })
                .collect();
            let coef_is_one = abs.is_one();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if coef_is_one {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch in addition");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch in subtraction");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch in multiplication");
        let mut out = Poly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests;
