//! Buchberger's algorithm under graded lex, with the product and chain
//! criteria and a hard resource cap.
//!
//! Bases are memoized per generator list. The memo only ever stores complete
//! results, so concurrent callers see either nothing or a finished basis.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::One;

use crate::poly::{Monomial, Poly, Rat};

/// Resource cap for a single basis computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Limits {
    /// Maximal number of S-polynomial reductions.
    pub max_reductions: usize,
    /// Maximal total degree of any polynomial entering the basis.
    pub max_degree: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_reductions: 5000, max_degree: 40 }
    }
}

/// The cap was reached before the basis was complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitHit;

/// Outcome of an ideal-membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NotMember,
    /// The Gröbner computation hit its resource cap.
    Undecided,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::Member
        } else {
            Membership::NotMember
        }
    }

    pub fn is_member(self) -> bool {
        self == Membership::Member
    }

    /// Conjunction, with `NotMember` dominating `Undecided`.
    pub fn and(self, other: Membership) -> Membership {
        use Membership::*;
        match (self, other) {
            (NotMember, _) | (_, NotMember) => NotMember,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Member,
        }
    }
}

type Memo = Mutex<HashMap<(Vec<Poly>, Limits), Arc<Result<Vec<Poly>, LimitHit>>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

const MEMO_CAPACITY: usize = 4096;

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner_basis(gens: &[Poly], limits: Limits) -> Result<Vec<Poly>, LimitHit> {
    let mut key: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).map(Poly::monic).collect();
    key.sort_by(|a, b| a.leading().map(|t| t.0).cmp(&b.leading().map(|t| t.0)));
    key.dedup();
    if let Some(hit) = memo().lock().unwrap().get(&(key.clone(), limits)) {
        return (**hit).clone();
    }
    let result = buchberger(&key, limits);
    let mut m = memo().lock().unwrap();
    if m.len() >= MEMO_CAPACITY {
        m.clear();
    }
    m.insert((key, limits), Arc::new(result.clone()));
    result
}

/// Normal form of `f` modulo `basis` (full reduction).
pub fn reduce(f: &Poly, basis: &[Poly]) -> Poly {
    let dim = f.dim();
    let mut p = f.clone();
    let mut rem = Poly::zero(dim);
    while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = basis.iter().find(|g| g.leading().is_some_and(|(gm, _)| gm.divides(&lm)));
        match divisor {
            Some(g) => {
                let (gm, gc) = g.leading().unwrap();
                let q = gm.quotient_of(&lm).unwrap();
                p = &p - &g.mul_monomial(&q, &(&lc / gc));
            }
            None => {
                let t = Poly::monomial(lm, lc);
                p = &p - &t;
                rem = &rem + &t;
            }
        }
    }
    rem
}

/// Membership of `f` in the ideal generated by `gens`.
pub fn is_member(f: &Poly, gens: &[Poly], limits: Limits) -> Membership {
    if f.is_zero() {
        return Membership::Member;
    }
    match groebner_basis(gens, limits) {
        Ok(basis) => Membership::from_bool(reduce(f, &basis).is_zero()),
        Err(LimitHit) => Membership::Undecided,
    }
}

/// Does the ideal generated by `gens` contain 1?
pub fn is_unit_ideal(gens: &[Poly], limits: Limits) -> Membership {
    if gens.iter().any(|g| !g.is_zero() && g.is_constant()) {
        return Membership::Member;
    }
    if gens.iter().all(Poly::is_zero) {
        return Membership::NotMember;
    }
    match groebner_basis(gens, limits) {
        Ok(basis) => Membership::from_bool(basis.iter().any(Poly::is_constant)),
        Err(LimitHit) => Membership::Undecided,
    }
}

fn s_polynomial(f: &Poly, g: &Poly) -> Poly {
    let (fm, fc) = f.leading().unwrap();
    let (gm, gc) = g.leading().unwrap();
    let l = fm.lcm(gm);
    let a = f.mul_monomial(&fm.quotient_of(&l).unwrap(), &fc.recip());
    let b = g.mul_monomial(&gm.quotient_of(&l).unwrap(), &gc.recip());
    &a - &b
}

fn lead(p: &Poly) -> &Monomial {
    p.leading().unwrap().0
}

fn buchberger(gens: &[Poly], limits: Limits) -> Result<Vec<Poly>, LimitHit> {
    let mut basis: Vec<Poly> = Vec::new();
    for g in gens {
        if g.total_degree().unwrap_or(0) > limits.max_degree {
            return Err(LimitHit);
        }
        if g.is_constant() {
            return Ok(vec![Poly::one(g.dim())]);
        }
    }
    // pairs ordered by degree of the lcm of leading monomials, then indices
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    fn push(basis: &mut Vec<Poly>, pairs: &mut BTreeSet<(u32, usize, usize)>, p: Poly) {
        let j = basis.len();
        for (i, b) in basis.iter().enumerate() {
            pairs.insert((lead(b).lcm(lead(&p)).degree(), i, j));
        }
        basis.push(p);
    }
    for g in gens {
        let r = reduce(g, &basis);
        if !r.is_zero() {
            push(&mut basis, &mut pairs, r.monic());
        }
    }
    let mut reductions = 0usize;
    while let Some(&(deg, i, j)) = pairs.iter().next() {
        pairs.remove(&(deg, i, j));
        done.insert((i, j));
        let (li, lj) = (lead(&basis[i]).clone(), lead(&basis[j]).clone());
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lead(&basis[k]).divides(&l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        reductions += 1;
        if reductions > limits.max_reductions || deg > limits.max_degree {
            return Err(LimitHit);
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let r = reduce(&s, &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(vec![Poly::one(r.dim())]);
        }
        if r.total_degree().unwrap_or(0) > limits.max_degree {
            return Err(LimitHit);
        }
        push(&mut basis, &mut pairs, r.monic());
    }
    Ok(interreduce(basis))
}

fn interreduce(basis: Vec<Poly>) -> Vec<Poly> {
    // drop elements whose leading monomial is divisible by another's
    let mut minimal: Vec<Poly> = Vec::new();
    for (i, p) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(k, q)| {
            k != i && lead(q).divides(lead(p)) && (lead(q) != lead(p) || k < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out: Vec<Poly> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> = minimal
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, q)| q.clone())
            .collect();
        let (lm, _) = minimal[i].leading().unwrap();
        let tail = &minimal[i] - &Poly::monomial(lm.clone(), Rat::one());
        let r = &Poly::monomial(lm.clone(), Rat::one()) + &reduce(&tail, &others);
        out.push(r);
    }
    out.sort_by(|a, b| lead(a).cmp(lead(b)));
    debug_assert!(out.iter().all(|p| !p.is_zero() && p.leading().unwrap().1.is_one()));
    out
}
