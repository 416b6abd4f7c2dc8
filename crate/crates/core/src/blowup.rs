//! Affine charts, exceptional divisors and blowups at coordinate centers.

use num_traits::One;

use crate::basicobj::{word_along, MarkedObject};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, Rat};
use crate::rees::ReesAlgebra;
use crate::singular::sing_ideal;

/// Images of the source chart's variables, as polynomials in the target
/// chart's variables.
pub type Substitution = Vec<Poly>;

pub fn identity_substitution(dim: usize) -> Substitution {
    (0..dim).map(|i| Poly::var(dim, i)).collect()
}

/// Composition: first `first`, then `then`.
pub fn compose(first: &[Poly], then: &[Poly]) -> Substitution {
    first.iter().map(|p| p.substitute(then)).collect()
}

/// An exceptional hypersurface `{x_var = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorRecord {
    pub var: usize,
    /// Birth step; input divisors are labelled `0..r`.
    pub label: usize,
    pub a: Rat,
    pub in_d: bool,
}

/// The coordinate subspace `V(x_j : j in vars)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CenterSpec {
    vars: Vec<usize>,
}

impl CenterSpec {
    pub fn new(mut vars: Vec<usize>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::EmptyCenter);
        }
        vars.sort_unstable();
        vars.dedup();
        Ok(CenterSpec { vars })
    }

    pub fn point(dim: usize) -> Self {
        CenterSpec { vars: (0..dim).collect() }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn codim(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub id: String,
    pub names: Vec<String>,
    pub divisors: Vec<DivisorRecord>,
    /// Parent chart id and the substitution from its variables.
    pub parent: Option<(String, Substitution)>,
    /// Images of the root chart's variables.
    pub to_root: Substitution,
    /// The chart is the open set where these do not vanish.
    pub units: Vec<Poly>,
}

impl Chart {
    pub fn root(names: Vec<String>) -> Self {
        let dim = names.len();
        Chart {
            id: "0".to_string(),
            names,
            divisors: Vec::new(),
            parent: None,
            to_root: identity_substitution(dim),
            units: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn divisor_on(&self, var: usize) -> Option<&DivisorRecord> {
        self.divisors.iter().find(|h| h.var == var)
    }

    pub fn divisor_vars(&self) -> Vec<usize> {
        self.divisors.iter().map(|h| h.var).collect()
    }

    pub fn d_vars(&self) -> Vec<usize> {
        self.divisors.iter().filter(|h| h.in_d).map(|h| h.var).collect()
    }

    pub fn next_label(&self) -> usize {
        self.divisors.iter().map(|h| h.label + 1).max().unwrap_or(0)
    }

    /// Applies a coordinate change `x_i -> change[i]` in place; divisors are
    /// unaffected, so the change must fix their variables.
    pub fn change_coordinates(&mut self, change: &[Poly]) {
        self.to_root = compose(&self.to_root, change);
        self.units = self.units.iter().map(|u| u.substitute(change)).collect();
    }
}

/// The center lies in `Sing(G)`: each generator of the singular ideal is in
/// the monomial prime `(x_j : j in S)`, tested termwise.
pub fn is_permissible(g: &ReesAlgebra, c: &CenterSpec) -> bool {
    sing_ideal(g).gens().iter().all(|f| f.in_monomial_prime(c.vars()))
}

/// Standard charts of the blowup at `c`: for each `j` in `S`,
/// `x_i -> x_i x_j` for `i` in `S \ {j}`, other variables fixed. The new
/// divisor sits on `x_j` with exponent 0 until the caller sets it.
pub fn blowup_charts(chart: &Chart, c: &CenterSpec) -> Result<Vec<(Chart, Substitution)>> {
    let dim = chart.dim();
    if c.vars().is_empty() {
        return Err(Error::EmptyCenter);
    }
    if let Some(&bad) = c.vars().iter().find(|&&j| j >= dim) {
        return Err(Error::DimensionMismatch(dim, bad + 1));
    }
    let label = chart.next_label();
    let mut out = Vec::with_capacity(c.codim());
    for &j in c.vars() {
        let sub: Substitution = (0..dim)
            .map(|i| {
                if i != j && c.vars().contains(&i) {
                    &Poly::var(dim, i) * &Poly::var(dim, j)
                } else {
                    Poly::var(dim, i)
                }
            })
            .collect();
        let mut divisors: Vec<DivisorRecord> =
            chart.divisors.iter().filter(|h| h.var != j).cloned().collect();
        divisors.push(DivisorRecord { var: j, label, a: Rat::from_integer(0.into()), in_d: false });
        divisors.sort_by_key(|h| h.var);
        let child = Chart {
            id: format!("{}.{}", chart.id, j),
            names: chart.names.clone(),
            divisors,
            parent: Some((chart.id.clone(), sub.clone())),
            to_root: compose(&chart.to_root, &sub),
            units: chart.units.iter().map(|u| u.substitute(&sub)).collect(),
        };
        out.push((child, sub));
    }
    Ok(out)
}

pub fn total_transform(g: &ReesAlgebra, sub: &[Poly]) -> ReesAlgebra {
    g.map_polys(|f| f.substitute(sub))
}

/// `(f_i o sub) / x_h^{n_i}`; failure of exact division means the center
/// was not contained in `Sing(G)`.
pub fn weighted_transform(g: &ReesAlgebra, sub: &[Poly], h: usize) -> Result<ReesAlgebra> {
    let dim = sub.first().map_or(g.dim(), Poly::dim);
    let mut gens = Vec::with_capacity(g.len());
    for (f, n) in g.gens() {
        let mut e = vec![0; dim];
        e[h] = *n;
        let t = f.substitute(sub);
        let q = t.div_monomial(&Monomial::new(e)).ok_or_else(|| {
            Error::NotPermissible(format!("total transform not divisible by x{h}^{n}"))
        })?;
        gens.push((q, *n));
    }
    ReesAlgebra::new(dim, gens)
}

/// Transforms a marked object at a permissible center. Old divisors keep
/// their exponents; the new one gets `omega - 1 + sum_{H > C} a_H` with
/// `omega` the word along the center. Membership in `D` is inherited here
/// and settled later against the child's maximal word.
pub fn transform_marked(m: &MarkedObject, c: &CenterSpec) -> Result<Vec<MarkedObject>> {
    if !is_permissible(m.algebra(), c) {
        return Err(Error::NotPermissible("center not contained in Sing".into()));
    }
    let omega = word_along(m, c.vars())?;
    let through: Rat = m
        .chart()
        .divisors
        .iter()
        .filter(|h| c.vars().contains(&h.var))
        .map(|h| h.a.clone())
        .sum();
    let a_new = &omega - Rat::one() + through;
    let mut out = Vec::new();
    for (mut chart, sub) in blowup_charts(m.chart(), c)? {
        let j = chart.id.rsplit('.').next().unwrap().parse::<usize>().unwrap();
        let alg = weighted_transform(m.algebra(), &sub, j)?;
        for h in chart.divisors.iter_mut() {
            if h.var == j {
                h.a = a_new.clone();
            }
        }
        out.push(MarkedObject::from_parts(alg, chart, m.max_word().cloned()));
    }
    Ok(out)
}
