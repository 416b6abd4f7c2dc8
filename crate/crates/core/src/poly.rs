//! Exact sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with the chart's declared variable order (the first
//! variable is the largest). The map never stores a zero coefficient, so two
//! equal polynomials always have identical term maps.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always reduced, denominator positive.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Order of a polynomial or ideal: a natural number, or infinity for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(v) => Some(v),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }

    /// Sum of orders, with infinity absorbing.
    pub fn plus(self, other: Order) -> Order {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(v) => write!(f, "{v}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent vector `x_0^e_0 ... x_{d-1}^e_{d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Sum of the exponents of the variables in `vars`.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&j| self.0[j]).sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A polynomial in `dim` variables with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, Rat>,
}

/// A rational point of affine `d`-space.
pub type PointQ = Vec<Rat>;

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rat::one())
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(dim), c);
        }
        p
    }

    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(dim, i), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let dim = m.dim();
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        debug_assert_eq!(m.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Leading term under graded lex.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in_var(&self, j: usize) -> u32 {
        self.terms.keys().map(|m| m.0[j]).max().unwrap_or(0)
    }

    pub fn check_dim(&self, other: &Poly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(t, v)| (t.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Rescales so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn eval(&self, p: &[Rat]) -> Rat {
        assert_eq!(p.len(), self.dim, "point dimension");
        let Some(deg) = self.total_degree() else { return Rat::zero() };
        // integer arithmetic throughout: p_i = a_i / q, coefficients over dc
        let q = p.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let dc = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let powers: Vec<Vec<BigInt>> = (0..self.dim)
            .map(|i| {
                let a = p[i].numer() * (&q / p[i].denom());
                successive_powers(&a, self.degree_in_var(i))
            })
            .collect();
        let q_powers = successive_powers(&q, deg);
        let mut sum = BigInt::zero();
        for (m, c) in &self.terms {
            let mut v = c.numer() * (&dc / c.denom());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    v *= &powers[i][e as usize];
                }
            }
            v *= &q_powers[(deg - m.degree()) as usize];
            sum += v;
        }
        Rat::new(sum, dc * &q_powers[deg as usize])
    }

    /// Composition: variable `i` is replaced by `images[i]`. All images must
    /// share a dimension, which becomes the dimension of the result.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.dim, "one image per variable");
        let target = images.first().map_or(0, |p| p.dim);
        let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let power = cache
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e))
                    .clone();
                term = &term * &power;
                if term.is_zero() {
                    break;
                }
            }
            out = &out + &term;
        }
        out
    }

    /// `f(x + p)`: moves the point `p` to the origin. Each variable is
    /// shifted in turn by binomial expansion of `(x_i + p_i)^e`.
    pub fn translate(&self, p: &[Rat]) -> Poly {
        assert_eq!(p.len(), self.dim, "point dimension");
        let mut cur = self.clone();
        for (i, c) in p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let powers = successive_powers(c, cur.degree_in_var(i));
            let mut next = Poly::zero(self.dim);
            for (m, coeff) in &cur.terms {
                let e = m.0[i];
                for j in 0..=e {
                    let mut k = m.0.clone();
                    k[i] = j;
                    let v = coeff * &powers[(e - j) as usize] * Rat::from_integer(binomial(e, j));
                    next.add_term(Monomial(k), v);
                }
            }
            cur = next;
        }
        cur
    }

    /// Minimal total degree of a term, `Infinite` for zero.
    pub fn order_at_origin(&self) -> Order {
        match self.terms.keys().next() {
            // grlex: the first key has minimal total degree
            Some(m) => Order::Finite(m.degree()),
            None => Order::Infinite,
        }
    }

    /// Order of `f` in the local ring at `p`.
    pub fn order_at(&self, p: &[Rat]) -> Result<Order> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, p.len()));
        }
        if p.iter().all(Zero::is_zero) {
            return Ok(self.order_at_origin());
        }
        if !self.eval(p).is_zero() {
            return Ok(Order::Finite(0));
        }
        Ok(self.translate(p).order_at_origin())
    }

    /// The Taylor operator: coefficient of `T^alpha` in `f(x + T)`, computed
    /// as the divided-power derivative `(1/alpha!) d^alpha f`.
    pub fn delta(&self, alpha: &Monomial) -> Poly {
        assert_eq!(alpha.dim(), self.dim, "multi-index dimension");
        if alpha.is_one() {
            return self.clone();
        }
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some(q) = alpha.quotient_of(m) {
                let mut coeff = c.clone();
                for (&b, &a) in m.0.iter().zip(&alpha.0) {
                    if a > 0 {
                        coeff *= Rat::from_integer(binomial(b, a));
                    }
                }
                out.add_term(q, coeff);
            }
        }
        out
    }

    /// Ordinary partial derivative in variable `j`.
    pub fn partial(&self, j: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[j];
            if e > 0 {
                let mut q = m.0.clone();
                q[j] -= 1;
                out.add_term(Monomial(q), c * rat_int(e as i64));
            }
        }
        out
    }

    /// Order at the generic point of `V(x_j : j in vars)`.
    pub fn order_along_subspace(&self, vars: &[usize]) -> Order {
        self.terms
            .keys()
            .map(|m| m.degree_in(vars))
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Exact division by a monomial; `None` if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            terms.insert(m.quotient_of(t)?, c.clone());
        }
        Some(Poly { dim: self.dim, terms })
    }

    /// Exact quotient `self / d`; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let mut rem = self.clone();
        let mut q = Poly::zero(self.dim);
        while let Some((m, c)) = rem.leading() {
            let t = lm.quotient_of(m)?;
            let c = c / lc;
            rem = &rem - &d.mul_monomial(&t, &c);
            q = &q + &Poly::monomial(t, c);
        }
        Some(q)
    }

    /// Coefficients of the powers of `x_v`, as polynomials free of `x_v`.
    fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(self.dim); self.degree_in_var(v) as usize + 1];
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = std::mem::replace(&mut e[v], 0) as usize;
            out[k].terms.insert(Monomial(e), c.clone());
        }
        out
    }

    fn highest_var(&self) -> Option<usize> {
        (0..self.dim).rev().find(|&v| self.degree_in_var(v) > 0)
    }

    /// Greatest common divisor, normalized by [`Poly::primitive`]; constants
    /// have gcd one.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let v = match (self.highest_var(), other.highest_var()) {
            (None, _) | (_, None) => return Poly::one(self.dim),
            (Some(a), Some(b)) => a.max(b),
        };
        let (ca, cb) = (self.content_in(v), other.content_in(v));
        let c = ca.gcd(&cb);
        if self.degree_in_var(v) == 0 || other.degree_in_var(v) == 0 {
            return c;
        }
        let mut a = self.div_exact(&ca).expect("content divides").primitive();
        let mut b = other.div_exact(&cb).expect("content divides").primitive();
        if a.degree_in_var(v) < b.degree_in_var(v) {
            std::mem::swap(&mut a, &mut b);
        }
        while b.degree_in_var(v) > 0 {
            let r = a.pseudo_remainder(&b, v);
            a = b;
            b = if r.is_zero() { r } else { r.div_exact(&r.content_in(v)).expect("content divides").primitive() };
        }
        if !b.is_zero() {
            // the remainder sequence ended in a nonzero polynomial free of x_v
            return c;
        }
        (&c * &a).primitive()
    }

    /// Gcd of the coefficients in `x_v`.
    fn content_in(&self, v: usize) -> Poly {
        self.coefficients_in(v).iter().fold(Poly::zero(self.dim), |g, c| g.gcd(c))
    }

    /// `lc^k * self` reduced modulo `d` as polynomials in `x_v`.
    fn pseudo_remainder(&self, d: &Poly, v: usize) -> Poly {
        let dd = d.degree_in_var(v);
        let lc = d.coefficients_in(v).pop().expect("nonzero");
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in_var(v) >= dd {
            let k = r.degree_in_var(v);
            let lr = r.coefficients_in(v).pop().expect("nonzero");
            let mut shift = vec![0; self.dim];
            shift[v] = k - dd;
            let sub = &(&lr * d).mul_monomial(&Monomial(shift), &Rat::one());
            r = &(&lc * &r) - sub;
        }
        r
    }

    /// Is every term divisible by at least one of the variables in `vars`?
    pub fn in_monomial_prime(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|m| vars.iter().any(|&j| m.0[j] > 0))
    }

    /// Drops variable `j`, which must not occur in `self`.
    pub fn remove_var(&self, j: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            debug_assert_eq!(m.0[j], 0);
            let mut e = m.0.clone();
            e.remove(j);
            terms.insert(Monomial(e), c.clone());
        }
        Poly { dim: self.dim - 1, terms }
    }

    /// Embeds into one more dimension, inserting a fresh variable at `j`.
    pub fn insert_var(&self, j: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.insert(j, 0);
            terms.insert(Monomial(e), c.clone());
        }
        Poly { dim: self.dim + 1, terms }
    }

    /// Clears denominators and content: a primitive integer multiple with
    /// positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let v = (c * Rat::from_integer(den.clone())).to_integer();
            g = g.gcd(&v);
        }
        let lead_neg = self.leading().is_some_and(|(_, c)| c.is_negative());
        let mut factor = Rat::new(den, g);
        if lead_neg {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// `[1, x, x^2, ..., x^n]`.
fn successive_powers<T: Clone + One + for<'a> std::ops::Mul<&'a T, Output = T>>(x: &T, n: u32) -> Vec<T> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(T::one());
    for k in 0..n as usize {
        let next = out[k].clone() * x;
        out.push(next);
    }
    out
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// All multi-indices of dimension `dim` with total degree exactly `deg`,
/// in graded-lex descending order (so `(1,0)` precedes `(0,1)`).
pub fn multi_indices(dim: usize, deg: u32) -> Vec<Monomial> {
    fn rec(dim: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == dim {
            cur.push(left);
            out.push(Monomial(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(dim, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        if deg == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(dim, 0, deg, &mut Vec::new(), &mut out);
    out
}

/// Multi-indices of total degree `< bound`, by degree then graded lex.
pub fn multi_indices_below(dim: usize, bound: u32) -> Vec<Monomial> {
    (0..bound).flat_map(|k| multi_indices(dim, k)).collect()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
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
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rat::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = Poly::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // highest term first
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.names[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Default variable names: `x y z` for small dimensions, `x0 x1 ...` beyond.
pub fn default_names(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (0..dim).map(|i| format!("x{i}")).collect()
    }
}

/// Formats a rational as `p/q`, or `p` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
