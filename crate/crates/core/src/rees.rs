//! Rees algebras `O[f_1 W^{n_1}, ..., f_s W^{n_s}]` given by weighted
//! generators, and the operators acting on them.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::groebner::{Limits, Membership};
use crate::ideal::{dedup, Ideal};
use crate::poly::{multi_indices, Poly, Rat};

/// A weighted generator `f W^n`.
pub type WeightedGen = (Poly, u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReesAlgebra {
    dim: usize,
    gens: Vec<WeightedGen>,
}

/// A pair `(J, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub ideal: Ideal,
    pub b: u32,
}

impl Pair {
    pub fn new(ideal: Ideal, b: u32) -> Self {
        Pair { ideal, b }
    }
}

impl ReesAlgebra {
    /// Zero polynomials are dropped; weights must be positive.
    pub fn new(dim: usize, gens: impl IntoIterator<Item = WeightedGen>) -> Result<Self> {
        let mut out = Vec::new();
        for (f, n) in gens {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch(dim, f.dim()));
            }
            if n == 0 {
                return Err(Error::Undefined("generator weight must be positive"));
            }
            if !f.is_zero() {
                out.push((f, n));
            }
        }
        Ok(ReesAlgebra { dim, gens: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[WeightedGen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn weights_lcm(&self) -> u32 {
        self.gens.iter().fold(1u32, |acc, (_, n)| acc.lcm(n))
    }

    /// Keeps the first copy of each repeated generator.
    pub fn dedup(&self) -> ReesAlgebra {
        let mut seen = std::collections::HashSet::new();
        let gens = self.gens.iter().filter(|g| seen.insert((*g).clone())).cloned().collect();
        ReesAlgebra { dim: self.dim, gens }
    }

    pub fn map_polys(&self, f: impl Fn(&Poly) -> Poly) -> ReesAlgebra {
        let dim = self.gens.first().map_or(self.dim, |(g, _)| f(g).dim());
        let gens = self.gens.iter().map(|(g, n)| (f(g), *n)).filter(|(g, _)| !g.is_zero());
        ReesAlgebra { dim, gens: gens.collect() }
    }
}

pub fn from_pair(pair: &Pair) -> Result<ReesAlgebra> {
    if pair.ideal.is_zero() {
        return Err(Error::ZeroIdeal("a pair needs a nonzero ideal"));
    }
    if pair.b == 0 {
        return Err(Error::Undefined("pair weight must be positive"));
    }
    ReesAlgebra::new(pair.ideal.dim(), pair.ideal.gens().iter().map(|g| (g.clone(), pair.b)))
}

/// Nonnegative integer vectors `a` with `sum a_i w_i = total`.
pub(crate) fn weighted_compositions(weights: &[u32], total: u32) -> Vec<Vec<u32>> {
    fn rec(weights: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left / weights[i] {
            cur.push(k);
            rec(weights, i + 1, left - k * weights[i], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, total, &mut Vec::new(), &mut out);
    out
}

struct PowerCache<'a> {
    gens: &'a [WeightedGen],
    cache: HashMap<(usize, u32), Poly>,
}

impl<'a> PowerCache<'a> {
    fn new(gens: &'a [WeightedGen]) -> Self {
        PowerCache { gens, cache: HashMap::new() }
    }

    fn product(&mut self, dim: usize, a: &[u32]) -> Poly {
        let mut acc = Poly::one(dim);
        for (i, &k) in a.iter().enumerate() {
            if k > 0 {
                let gens = self.gens;
                let pw = self.cache.entry((i, k)).or_insert_with(|| gens[i].0.pow(k));
                acc = &acc * pw;
            }
        }
        acc
    }
}

/// Degree-`n` component: generated by `prod f_i^{a_i}` with `sum a_i n_i = n`.
pub fn graded_piece(g: &ReesAlgebra, n: u32) -> Ideal {
    let weights: Vec<u32> = g.gens.iter().map(|(_, w)| *w).collect();
    let mut cache = PowerCache::new(&g.gens);
    let gens: Vec<Poly> = weighted_compositions(&weights, n)
        .iter()
        .map(|a| cache.product(g.dim, a))
        .collect();
    Ideal::new(g.dim, dedup(gens)).expect("same dimension")
}

/// Subalgebra generated by both: generator concatenation.
pub fn odot(a: &ReesAlgebra, b: &ReesAlgebra) -> Result<ReesAlgebra> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let mut gens = a.gens.clone();
    gens.extend(b.gens.iter().cloned());
    Ok(ReesAlgebra { dim: a.dim, gens })
}

/// Hilbert basis of `{a in N^s : m | sum a_i w_i}`.
///
/// Every indecomposable element has `|a| <= m`: among any `m` residues mod
/// `m` some nonempty subfamily sums to zero. So it suffices to enumerate by
/// increasing `|a|` up to `m` and keep elements not above an earlier one.
pub(crate) fn veronese_hilbert_basis(weights: &[u32], m: u32) -> Vec<Vec<u32>> {
    let s = weights.len();
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for total in 1..=m {
        let ones = vec![1u32; s];
        for a in weighted_compositions(&ones, total) {
            let w: u64 = a.iter().zip(weights).map(|(&x, &y)| x as u64 * y as u64).sum();
            if !w.is_multiple_of(m as u64) {
                continue;
            }
            if basis.iter().any(|b| b.iter().zip(&a).all(|(x, y)| x <= y)) {
                continue;
            }
            basis.push(a);
        }
    }
    basis
}

/// Veronese subalgebra `V^(m)`: components in degrees divisible by `m`.
/// Generators are sorted by weight, then by exponent vector descending.
pub fn veronese(g: &ReesAlgebra, m: u32) -> ReesAlgebra {
    assert!(m >= 1, "veronese index must be positive");
    if m == 1 {
        return g.clone();
    }
    let weights: Vec<u32> = g.gens.iter().map(|(_, w)| *w).collect();
    let mut basis = veronese_hilbert_basis(&weights, m);
    let weight_of = |a: &[u32]| -> u32 { a.iter().zip(&weights).map(|(x, y)| x * y).sum() };
    basis.sort_by(|a, b| weight_of(a).cmp(&weight_of(b)).then_with(|| b.cmp(a)));
    let mut cache = PowerCache::new(&g.gens);
    let gens = basis
        .iter()
        .map(|a| (cache.product(g.dim, a), weight_of(a)))
        .filter(|(f, _)| !f.is_zero())
        .collect();
    ReesAlgebra { dim: g.dim, gens }
}

/// Adds `f W^{n'}` for every `1 <= n' <= n`.
pub fn natural_closure(g: &ReesAlgebra) -> ReesAlgebra {
    let mut gens = Vec::new();
    for (f, n) in &g.gens {
        for k in 1..=*n {
            gens.push((f.clone(), k));
        }
    }
    ReesAlgebra { dim: g.dim, gens }
}

/// Differential closure: `Delta^alpha(f) W^{n' - |alpha|}` for
/// `0 <= |alpha| < n' <= n`.
pub fn diff_closure(g: &ReesAlgebra) -> ReesAlgebra {
    closure_impl(g, false)
}

/// Like [`diff_closure`] but only with the top weight `n - |alpha|` for each
/// `Delta^alpha`. Lower weights never lower `ord` at points of the singular
/// locus, so both have the same `Sing` and the same order there.
pub fn diff_closure_reduced(g: &ReesAlgebra) -> ReesAlgebra {
    closure_impl(g, true)
}

fn closure_impl(g: &ReesAlgebra, reduced: bool) -> ReesAlgebra {
    let mut gens = Vec::new();
    for (f, n) in &g.gens {
        for k in 0..*n {
            for alpha in multi_indices(g.dim, k) {
                let d = f.delta(&alpha);
                if d.is_zero() {
                    continue;
                }
                if reduced {
                    gens.push((d, n - k));
                } else {
                    for w in (1..=n - k).rev() {
                        gens.push((d.clone(), w));
                    }
                }
            }
        }
    }
    ReesAlgebra { dim: g.dim, gens }.dedup()
}

/// Twisted algebra `G(omega)`: with `omega = p/q` in lowest terms, the
/// Veronese `V^(q)` reweighted by `n -> n p / q`.
pub fn twist(g: &ReesAlgebra, omega: &Rat) -> Result<ReesAlgebra> {
    if !omega.is_positive() {
        return Err(Error::Undefined("twist needs a positive rational"));
    }
    let p = omega.numer().to_u32().ok_or(Error::Undefined("twist numerator too large"))?;
    let q = omega.denom().to_u32().ok_or(Error::Undefined("twist denominator too large"))?;
    if omega.is_one() {
        return Ok(g.clone());
    }
    let v = veronese(g, q);
    let mut gens = Vec::with_capacity(v.gens.len());
    for (f, n) in v.gens {
        if (n * p) % q != 0 {
            return Err(Error::Internal(format!("twist weight {n}*{p}/{q} not integral")));
        }
        gens.push((f, n * p / q));
    }
    Ok(ReesAlgebra { dim: g.dim, gens })
}

/// `a` is contained in `b`: each generator `f W^n` of `a` lies in the
/// degree-`n` component of `b`.
pub fn is_subalgebra(a: &ReesAlgebra, b: &ReesAlgebra, limits: Limits) -> Membership {
    let mut out = Membership::Member;
    let mut pieces: HashMap<u32, Ideal> = HashMap::new();
    for (f, n) in &a.gens {
        let piece = pieces.entry(*n).or_insert_with(|| graded_piece(b, *n));
        out = out.and(piece.contains(f, limits));
        if out == Membership::NotMember {
            break;
        }
    }
    out
}

/// Both algebras contain each other.
pub fn same_algebra(a: &ReesAlgebra, b: &ReesAlgebra, limits: Limits) -> Membership {
    let ab = is_subalgebra(a, b, limits);
    if ab == Membership::NotMember {
        return ab;
    }
    ab.and(is_subalgebra(b, a, limits))
}

/// Default degree bound for piece-by-piece comparison: `2 * lcm` of all
/// weights of both algebras.
pub fn default_degree_bound(a: &ReesAlgebra, b: &ReesAlgebra) -> u32 {
    2 * a.weights_lcm().lcm(&b.weights_lcm())
}

/// Components of degree `1..=bound` agree, checked by membership both ways.
pub fn graded_pieces_equal(
    a: &ReesAlgebra,
    b: &ReesAlgebra,
    bound: u32,
    limits: Limits,
) -> Membership {
    let mut out = Membership::Member;
    for n in 1..=bound {
        let (pa, pb) = (graded_piece(a, n), graded_piece(b, n));
        out = out.and(pa.contains_ideal(&pb, limits)).and(pb.contains_ideal(&pa, limits));
        if out == Membership::NotMember {
            break;
        }
    }
    out
}
