//! Finitely generated ideals of `Q[x_1..x_d]`.

use crate::error::{Error, Result};
use crate::groebner::{self, Limits, Membership};
use crate::poly::{multi_indices_below, Monomial, Order, Poly, Rat};

/// An ideal given by a finite list of nonzero generators. The zero ideal is
/// the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    dim: usize,
    gens: Vec<Poly>,
}

impl Ideal {
    pub fn new(dim: usize, gens: impl IntoIterator<Item = Poly>) -> Result<Self> {
        let mut out = Vec::new();
        for g in gens {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch(dim, g.dim()));
            }
            if !g.is_zero() {
                out.push(g);
            }
        }
        Ok(Ideal { dim, gens: out })
    }

    pub fn zero(dim: usize) -> Self {
        Ideal { dim, gens: Vec::new() }
    }

    pub fn unit(dim: usize) -> Self {
        Ideal { dim, gens: vec![Poly::one(dim)] }
    }

    pub fn principal(f: Poly) -> Self {
        let dim = f.dim();
        Ideal::new(dim, [f]).expect("same dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn into_gens(self) -> Vec<Poly> {
        self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    fn check(&self, other: &Ideal) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// Generator concatenation.
    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.check(other)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(Ideal { dim: self.dim, gens })
    }

    /// All pairwise generator products.
    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.check(other)?;
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a * b);
            }
        }
        Ok(Ideal { dim: self.dim, gens: dedup(gens) })
    }

    /// All `k`-fold generator products; `k = 0` gives the unit ideal.
    pub fn power(&self, k: u32) -> Ideal {
        let mut acc = Ideal::unit(self.dim);
        for _ in 0..k {
            acc = acc.product(self).expect("same dimension");
        }
        acc
    }

    /// Minimal order of a generator at `p`.
    pub fn order_at(&self, p: &[Rat]) -> Result<Order> {
        let mut best = Order::Infinite;
        for g in &self.gens {
            best = best.min(g.order_at(p)?);
        }
        Ok(best)
    }

    /// Extension by all Taylor operators of order at most `r`.
    pub fn diff_ideal(&self, r: u32) -> Ideal {
        let alphas = multi_indices_below(self.dim, r + 1);
        let mut gens = Vec::new();
        for g in &self.gens {
            for a in &alphas {
                let d = g.delta(a);
                if !d.is_zero() {
                    gens.push(d);
                }
            }
        }
        Ideal { dim: self.dim, gens: dedup(gens) }
    }

    /// Splits off the largest monomial in the coordinate hyperplanes
    /// `{x_j = 0 : j in vars}` dividing every generator. Returns its exponents
    /// (in the order of `vars`) and the generators divided by it.
    pub fn extract_monomial_part(&self, vars: &[usize]) -> Result<(Vec<u32>, Ideal)> {
        if self.is_zero() {
            return Err(Error::ZeroIdeal("monomial part of the zero ideal is undefined"));
        }
        let exps: Vec<u32> = vars
            .iter()
            .map(|&j| {
                self.gens
                    .iter()
                    .map(|g| g.order_along_subspace(&[j]).finite().unwrap())
                    .min()
                    .unwrap()
            })
            .collect();
        let mut e = vec![0; self.dim];
        for (&j, &k) in vars.iter().zip(&exps) {
            e[j] = k;
        }
        let m = Monomial::new(e);
        let gens = self
            .gens
            .iter()
            .map(|g| g.div_monomial(&m).ok_or_else(|| Error::Internal("exact division".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok((exps, Ideal { dim: self.dim, gens }))
    }

    pub fn contains(&self, f: &Poly, limits: Limits) -> Membership {
        groebner::is_member(f, &self.gens, limits)
    }

    /// Every generator of `other` lies in `self`.
    pub fn contains_ideal(&self, other: &Ideal, limits: Limits) -> Membership {
        other
            .gens
            .iter()
            .fold(Membership::Member, |acc, g| acc.and(self.contains(g, limits)))
    }

    pub fn is_unit(&self, limits: Limits) -> Membership {
        groebner::is_unit_ideal(&self.gens, limits)
    }

    /// Monic generator of the intersection with `Q[x_i]`, found as the first
    /// linear dependency among the normal forms of `1, x_i, x_i^2, ...`.
    /// `None` when there is none up to `max_degree`.
    pub fn eliminant(&self, i: usize, max_degree: u32, limits: Limits) -> Result<Option<Poly>> {
        let basis = groebner::groebner_basis(&self.gens, limits)
            .map_err(|_| Error::LimitExceeded("Gröbner basis for an eliminant".into()))?;
        let dim = self.dim;
        let len = max_degree as usize + 1;
        // rows in echelon form, each led by a distinct pivot monomial
        let mut rows: Vec<(Poly, Vec<Rat>)> = Vec::new();
        for k in 0..=max_degree {
            let mut v = groebner::reduce(&Poly::var(dim, i).pow(k), &basis);
            let mut combo = vec![Rat::from_integer(0.into()); len];
            combo[k as usize] = Rat::from_integer(1.into());
            while let Some((row, rc)) = rows
                .iter()
                .filter(|(r, _)| !num_traits::Zero::is_zero(&v.coefficient(r.leading().unwrap().0)))
                .max_by(|a, b| a.0.leading().unwrap().0.cmp(b.0.leading().unwrap().0))
            {
                let (lm, lc) = row.leading().unwrap();
                let c = v.coefficient(lm) / lc;
                v = &v - &row.scale(&c);
                for (x, y) in combo.iter_mut().zip(rc) {
                    *x -= &c * y;
                }
            }
            if v.is_zero() {
                let e = Poly::from_terms(
                    dim,
                    combo.into_iter().enumerate().map(|(j, c)| (Monomial::new(power(dim, i, j as u32)), c)),
                );
                return Ok(Some(e.monic()));
            }
            rows.push((v, combo));
        }
        Ok(None)
    }

    pub fn vanishes_at(&self, p: &[Rat]) -> bool {
        self.gens.iter().all(|g| num_traits::Zero::is_zero(&g.eval(p)))
    }
}

fn power(dim: usize, i: usize, k: u32) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[i] = k;
    e
}

/// Removes repeated generators, keeping first occurrences.
pub(crate) fn dedup(gens: Vec<Poly>) -> Vec<Poly> {
    let mut seen = std::collections::HashSet::new();
    gens.into_iter().filter(|g| seen.insert(g.clone())).collect()
}
