//! Dense univariate helpers: gcd and rational roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Poly, Rational};

/// Dense coefficient vector, index = power; trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense(Vec<Rational>);

impl Dense {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Dense(coeffs)
    }

    /// Reads a polynomial involving at most `var` as a univariate one.
    pub fn from_poly(p: &Poly, var: usize) -> Option<Self> {
        if p.support().iter().any(|&v| v != var) {
            return None;
        }
        let mut c = vec![Rational::zero(); p.degree_in(var).unwrap_or(0) as usize + 1];
        for (m, a) in p.terms() {
            c[m.exponent(var) as usize] = a.clone();
        }
        Some(Dense::new(c))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    fn monic(&self) -> Dense {
        match self.0.last() {
            Some(lc) => Dense(self.0.iter().map(|c| c / lc).collect()),
            None => self.clone(),
        }
    }

    pub fn rem(&self, d: &Dense) -> Dense {
        self.div_rem(d).1
    }

    pub fn div_rem(&self, d: &Dense) -> (Dense, Dense) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.0[dd].clone();
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let c = &r[k] / &lc;
            if !c.is_zero() {
                for i in 0..=dd {
                    let t = &c * &d.0[i];
                    r[k - dd + i] -= t;
                }
                q[k - dd] = c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Dense::new(q), Dense::new(r))
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Dense) -> Dense {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Distinct rational roots in increasing order.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let Some(deg) = self.degree() else { return Vec::new() };
        if deg == 0 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut c = self.0.clone();
        if c[0].is_zero() {
            roots.push(Rational::zero());
            while c.first().is_some_and(Zero::is_zero) {
                c.remove(0);
            }
        }
        let lcm_den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * Rational::from_integer(lcm_den.clone())).to_integer()).collect();
        let reduced = Dense::new(c);
        if reduced.degree().unwrap_or(0) > 0 {
            let a0 = ints[0].abs();
            let an = ints[ints.len() - 1].abs();
            for p in divisors(&a0) {
                for q in divisors(&an) {
                    for sign in [1i64, -1] {
                        let cand = Rational::new(&p * BigInt::from(sign), q.clone());
                        if reduced.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Removes the factor `(x - r)^k` for every listed root.
    pub fn deflate(&self, roots: &[Rational]) -> Dense {
        let mut out = self.clone();
        for r in roots {
            let lin = Dense::new(vec![-r.clone(), Rational::one()]);
            loop {
                let (q, rem) = out.div_rem(&lin);
                if !rem.is_zero() || out.degree().unwrap_or(0) == 0 {
                    break;
                }
                out = q;
            }
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let small = n.to_u64().expect("root search limited to 64-bit constant terms");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= small {
        if small.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    out.sort();
    out
}
