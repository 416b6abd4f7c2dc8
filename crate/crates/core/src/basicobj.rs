//! Marked objects `(G, E, D)`: maximal monomial part, weak part, word and
//! the invariant `t = (word, n)`, and the auxiliary algebras `D_m`, `T(G)`.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::blowup::{CenterSpec, Chart};
use crate::error::{Error, Result};
use crate::groebner::{Limits, Membership};
use crate::ideal::Ideal;
use crate::poly::{fmt_rat, rat, Monomial, PointQ, Poly, Rat};
use crate::rees::{from_pair, graded_piece, odot, twist, Pair, ReesAlgebra};
use crate::singular::{
    contains_point, meets_open, ord_along_subspace, ord_at, ord_at_least_ideal, sing_is_empty_on,
};

/// The lexicographically ordered pair `(word, n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TValue {
    pub word: Rat,
    pub n: usize,
}

impl TValue {
    pub fn new(word: Rat, n: usize) -> Self {
        TValue { word, n }
    }
}

impl std::fmt::Display for TValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.word), self.n)
    }
}

#[derive(Serialize, Deserialize)]
struct TValueRepr {
    word: String,
    n: usize,
}

impl Serialize for TValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TValueRepr { word: fmt_rat(&self.word), n: self.n }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TValueRepr::deserialize(d)?;
        let word = crate::parse::parse_rat(&r.word)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational '{}'", r.word)))?;
        Ok(TValue { word, n: r.n })
    }
}

/// A Rees algebra on a chart together with its exceptional divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedObject {
    algebra: ReesAlgebra,
    chart: Chart,
    /// Maximal word of the parent chart, until `D` has been settled.
    inherited_word: Option<Rat>,
    max_word: Option<Rat>,
}

impl MarkedObject {
    /// Wraps `algebra`, recomputing the exponents `a` of all divisors.
    pub fn new(algebra: ReesAlgebra, chart: Chart) -> Result<Self> {
        if algebra.dim() != chart.dim() {
            return Err(Error::DimensionMismatch(chart.dim(), algebra.dim()));
        }
        let mut m = MarkedObject { algebra, chart, inherited_word: None, max_word: None };
        m.refresh_exponents();
        Ok(m)
    }

    /// Keeps the divisor exponents as given.
    pub(crate) fn from_parts(algebra: ReesAlgebra, chart: Chart, inherited_word: Option<Rat>) -> Self {
        MarkedObject { algebra, chart, inherited_word, max_word: None }
    }

    pub fn algebra(&self) -> &ReesAlgebra {
        &self.algebra
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn chart_mut(&mut self) -> &mut Chart {
        &mut self.chart
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn max_word(&self) -> Option<&Rat> {
        self.max_word.as_ref()
    }

    pub fn inherited_word(&self) -> Option<&Rat> {
        self.inherited_word.as_ref()
    }

    /// Takes over the parent's maximal word and `D`, given by labels.
    pub fn inherit(&mut self, word: Option<Rat>, d_labels: &[usize]) {
        self.inherited_word = word;
        for h in &mut self.chart.divisors {
            h.in_d = d_labels.contains(&h.label);
        }
    }

    /// Records the maximal word of this chart. If it dropped below the
    /// parent's, every divisor joins `D`.
    pub fn settle(&mut self, max_word: Rat) {
        if let Some(w) = self.inherited_word.take() {
            if max_word < w {
                for h in &mut self.chart.divisors {
                    h.in_d = true;
                }
            }
        }
        self.max_word = Some(max_word);
    }

    pub fn refresh_exponents(&mut self) {
        let vars = self.chart.divisor_vars();
        let a = monomial_exponents(&self.algebra, &vars);
        for (h, ai) in self.chart.divisors.iter_mut().zip(a) {
            h.a = ai;
        }
    }

    /// Replaces the algebra, e.g. after a coordinate change fixing divisors.
    pub fn set_algebra(&mut self, algebra: ReesAlgebra) {
        self.algebra = algebra;
    }

    /// `(var, a)` for every divisor.
    pub fn exponents(&self) -> Vec<(usize, Rat)> {
        self.chart.divisors.iter().map(|h| (h.var, h.a.clone())).collect()
    }
}

/// `a_H = min_k nu_H(g_k) / n_k` for each `H = {x_j = 0}`, `j` in `vars`.
pub fn monomial_exponents(g: &ReesAlgebra, vars: &[usize]) -> Vec<Rat> {
    vars.iter()
        .map(|&j| {
            g.gens()
                .iter()
                .map(|(f, n)| rat(f.order_along_subspace(&[j]).finite().unwrap() as i64, *n as i64))
                .min()
                .unwrap_or_else(Rat::zero)
        })
        .collect()
}

/// Weak part via the degree-`N` component, `N` the lcm of the weights:
/// `a = alpha / N` and `G^v = G_(cofactor, N)`.
pub fn weak_part(m: &MarkedObject) -> Result<(Vec<Rat>, ReesAlgebra)> {
    if m.algebra.is_empty() {
        return Err(Error::ZeroIdeal("weak part of the zero algebra"));
    }
    let n = m.algebra.weights_lcm();
    let piece = graded_piece(&m.algebra, n);
    let (alpha, cofactor) = piece.extract_monomial_part(&m.chart.divisor_vars())?;
    let a = alpha.iter().map(|&e| rat(e as i64, n as i64)).collect();
    Ok((a, from_pair(&Pair::new(cofactor, n))?))
}

fn denom_u32(r: &Rat) -> u32 {
    r.denom().to_u32().expect("small denominator")
}

/// Compact weak part twisted by `omega`: each generator `(g, n)` yields
/// `(g^e / M^{e n a}, e n omega)` with `e` the least positive integer making
/// all exponents and the weight integral. This generates, up to integral
/// closure, the same algebra as `twist(weak_part, omega)`, without forming
/// graded pieces. `omega = 1` gives the untwisted weak part.
pub fn weak_twisted_compact(g: &ReesAlgebra, divs: &[(usize, Rat)], omega: &Rat) -> ReesAlgebra {
    let dim = g.dim();
    let mut gens = Vec::with_capacity(g.len());
    for (f, n) in g.gens() {
        let nr = Rat::from_integer((*n).into());
        let mut e = 1u32;
        for (_, a) in divs {
            e = e.lcm(&denom_u32(&(a * &nr)));
        }
        e = e.lcm(&denom_u32(&(omega * &nr)));
        let en = Rat::from_integer((e * n).into());
        let mut mono = vec![0u32; dim];
        for (j, a) in divs {
            mono[*j] = (a * &en).to_integer().to_u32().expect("small exponent");
        }
        let q = f
            .pow(e)
            .div_monomial(&Monomial::new(mono))
            .expect("the maximal monomial divides every generator");
        let w = (omega * &en).to_integer().to_u32().expect("small weight");
        gens.push((q, w));
    }
    ReesAlgebra::new(dim, gens).expect("positive weights")
}

/// `word_p = ord_p(G^v)`.
pub fn word_at(m: &MarkedObject, p: &[Rat]) -> Result<Rat> {
    let weak = weak_twisted_compact(&m.algebra, &m.exponents(), &Rat::one());
    ord_at(&weak, p)
}

/// Word at the generic point of `V(x_j : j in vars)`.
pub fn word_along(m: &MarkedObject, vars: &[usize]) -> Result<Rat> {
    let weak = weak_twisted_compact(&m.algebra, &m.exponents(), &Rat::one());
    ord_along_subspace(&weak, vars)
}

/// Number of `D` divisors through `p`.
pub fn d_count_at(m: &MarkedObject, p: &[Rat]) -> usize {
    m.chart.divisors.iter().filter(|h| h.in_d && p[h.var].is_zero()).count()
}

pub fn t_at(m: &MarkedObject, p: &[Rat]) -> Result<TValue> {
    Ok(TValue::new(word_at(m, p)?, d_count_at(m, p)))
}

/// Where `max_t` is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    Point(PointQ),
    Subspace(CenterSpec),
}

/// Result of a maximum search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxT {
    /// No candidate lies in `Sing(G)`.
    Resolved,
    Value(TValue, Vec<Candidate>),
}

/// The origin, every coordinate subspace, and the given points.
pub fn default_candidates(dim: usize, points: &[PointQ]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << dim) {
        let vars: Vec<usize> = (0..dim).filter(|i| mask & (1 << i) != 0).collect();
        out.push(Candidate::Subspace(CenterSpec::new(vars).unwrap()));
    }
    out.extend(points.iter().cloned().map(Candidate::Point));
    out
}

fn candidate_key(c: &Candidate) -> (usize, Vec<usize>, Vec<Rat>) {
    match c {
        Candidate::Subspace(s) => (0, s.vars().to_vec(), Vec::new()),
        Candidate::Point(p) => (1, Vec::new(), p.clone()),
    }
}

/// Maximal `t` over the candidates lying in `Sing(G)`, with the candidates
/// attaining it (subspaces first, smallest variable set first).
pub fn max_t(m: &MarkedObject, candidates: &[Candidate]) -> Result<MaxT> {
    let mut best: Option<TValue> = None;
    let mut at: Vec<Candidate> = Vec::new();
    for c in candidates {
        let t = match c {
            Candidate::Point(p) => {
                if !contains_point(&m.algebra, p)? {
                    continue;
                }
                t_at(m, p)?
            }
            Candidate::Subspace(s) => {
                if ord_along_subspace(&m.algebra, s.vars())? < Rat::one() {
                    continue;
                }
                let n = m.chart.divisors.iter().filter(|h| h.in_d && s.vars().contains(&h.var)).count();
                TValue::new(word_along(m, s.vars())?, n)
            }
        };
        match best.as_ref().map(|b| t.cmp(b)) {
            None | Some(Ordering::Greater) => {
                best = Some(t);
                at = vec![c.clone()];
            }
            Some(Ordering::Equal) => at.push(c.clone()),
            Some(Ordering::Less) => {}
        }
    }
    at.sort_by_key(candidate_key);
    Ok(match best {
        None => MaxT::Resolved,
        Some(t) => MaxT::Value(t, at),
    })
}

/// Maximal word on one stratum of the divisor arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumMax {
    /// Variables of the divisors containing the stratum.
    pub divisors: Vec<usize>,
    pub word: Rat,
}

/// Maximal word on each stratum `{x_j = 0 exactly for j in S}` of the
/// divisors that meets `Sing(G)`, found by bisection over the finitely many
/// possible order values. `None` when `Sing(G)` is empty.
pub fn max_word_strata(m: &MarkedObject, limits: Limits) -> Result<Option<Vec<StratumMax>>> {
    let g = &m.algebra;
    let units = &m.chart.units;
    match sing_is_empty_on(g, units, limits) {
        Membership::Member => return Ok(None),
        Membership::Undecided => return Err(Error::LimitExceeded("Gröbner basis for Sing".into())),
        Membership::NotMember => {}
    }
    let mut values: Vec<Rat> = Vec::new();
    for (f, n) in g.gens() {
        for nu in *n..=f.total_degree().unwrap_or(0) {
            values.push(rat(nu as i64, *n as i64));
        }
    }
    values.sort();
    values.dedup();
    let divs = m.exponents();
    let r = divs.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << r) {
        let on: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).map(|i| divs[i].0).collect();
        let mut off: Vec<Poly> =
            (0..r).filter(|i| mask & (1 << i) == 0).map(|i| Poly::var(g.dim(), divs[i].0)).collect();
        off.extend(units.iter().cloned());
        let meets = |v: &Rat| meets_open(&ord_at_least_ideal(g, v), &on, &off, limits);
        if values.is_empty() || !meets(&values[0])? {
            continue;
        }
        let (mut lo, mut hi) = (0usize, values.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if meets(&values[mid])? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a_sum: Rat = (0..r).filter(|i| mask & (1 << i) != 0).map(|i| divs[i].1.clone()).sum();
        let mut on_sorted = on;
        on_sorted.sort_unstable();
        out.push(StratumMax { divisors: on_sorted, word: &values[lo] - a_sum });
    }
    out.sort_by(|a, b| a.divisors.cmp(&b.divisors));
    Ok(Some(out))
}

/// Maximal `t` given the strata maxima and the current `D`.
pub fn max_t_from_strata(m: &MarkedObject, strata: &[StratumMax]) -> Option<TValue> {
    let omega = strata.iter().map(|s| s.word.clone()).max()?;
    let d = m.chart.d_vars();
    let n = strata
        .iter()
        .filter(|s| s.word == omega)
        .map(|s| s.divisors.iter().filter(|j| d.contains(j)).count())
        .max()
        .unwrap_or(0);
    Some(TValue::new(omega, n))
}

/// `D_m`: the product over all `m`-subsets of `D` of the ideals
/// `(x_{j_1}, ..., x_{j_m})`, in weight 1.
pub fn dm_algebra(chart: &Chart, m: usize) -> Result<ReesAlgebra> {
    let d = chart.d_vars();
    if m == 0 || m > d.len() {
        return Err(Error::Undefined("D_m needs 1 <= m <= |D|"));
    }
    let dim = chart.dim();
    let mut acc = Ideal::unit(dim);
    for subset in subsets(&d, m) {
        let factor = Ideal::new(dim, subset.iter().map(|&j| Poly::var(dim, j))).unwrap();
        acc = acc.product(&factor)?;
    }
    from_pair(&Pair::new(acc, 1))
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out: Vec<Vec<usize>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets(&items[1..], k));
    out
}

/// `T(G) = G ⊙ G^v(omega) ⊙ D_m`, with the weak part in graded-piece form.
pub fn t_algebra(m: &MarkedObject, t: &TValue) -> Result<ReesAlgebra> {
    if !t.word.is_positive() {
        return Err(Error::Undefined("T(G) needs a positive word"));
    }
    let (_, weak) = weak_part(m)?;
    let mut acc = odot(&m.algebra, &twist(&weak, &t.word)?)?;
    if t.n > 0 {
        acc = odot(&acc, &dm_algebra(&m.chart, t.n)?)?;
    }
    Ok(acc)
}

/// `T(G)` with the compact twisted weak part; same singular locus and
/// orders as [`t_algebra`].
pub fn t_algebra_compact(m: &MarkedObject, t: &TValue) -> Result<ReesAlgebra> {
    if !t.word.is_positive() {
        return Err(Error::Undefined("T(G) needs a positive word"));
    }
    let weak = weak_twisted_compact(&m.algebra, &m.exponents(), &t.word);
    let mut acc = odot(&m.algebra, &weak)?;
    if t.n > 0 {
        acc = odot(&acc, &dm_algebra(&m.chart, t.n)?)?;
    }
    Ok(acc)
}

/// Points where two marked objects disagree on `Sing`, `ord` or the word.
/// Integrally equivalent algebras on the same chart agree everywhere.
pub fn invariant_disagreements(a: &MarkedObject, b: &MarkedObject, points: &[PointQ]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for p in points {
        let show = || p.iter().map(fmt_rat).collect::<Vec<_>>().join(", ");
        let (ia, ib) = (contains_point(&a.algebra, p)?, contains_point(&b.algebra, p)?);
        if ia != ib {
            out.push(format!("Sing differs at ({})", show()));
            continue;
        }
        let (oa, ob) = (ord_at(&a.algebra, p)?, ord_at(&b.algebra, p)?);
        if oa != ob {
            out.push(format!("ord differs at ({}): {} vs {}", show(), fmt_rat(&oa), fmt_rat(&ob)));
            continue;
        }
        if ia {
            let (wa, wb) = (word_at(a, p)?, word_at(b, p)?);
            if wa != wb {
                out.push(format!("word differs at ({}): {} vs {}", show(), fmt_rat(&wa), fmt_rat(&wb)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{transform_marked, DivisorRecord};
    use crate::parse::parse_poly;
    use crate::poly::{default_names, rat_int};
    use crate::rees::veronese;
    use crate::singular::{default_grid, is_simple_at, random_points};

    fn p(s: &str) -> Poly {
        parse_poly(s, &default_names(2)).unwrap()
    }

    fn alg(gs: &[(&str, u32)]) -> ReesAlgebra {
        ReesAlgebra::new(2, gs.iter().map(|(s, n)| (p(s), *n))).unwrap()
    }

    fn chart_with(divs: &[(usize, bool)]) -> Chart {
        let mut c = Chart::root(default_names(2));
        c.divisors = divs
            .iter()
            .enumerate()
            .map(|(i, &(var, in_d))| DivisorRecord { var, label: i, a: Rat::zero(), in_d })
            .collect();
        c
    }

    fn marked(gs: &[(&str, u32)], divs: &[(usize, bool)]) -> MarkedObject {
        MarkedObject::new(alg(gs), chart_with(divs)).unwrap()
    }

    fn origin() -> PointQ {
        vec![rat_int(0), rat_int(0)]
    }

    #[test]
    fn weak_part_example() {
        let m = marked(&[("x^2*y^3*(x+y)", 6)], &[(0, false), (1, false)]);
        let (a, w) = weak_part(&m).unwrap();
        assert_eq!(a, vec![rat(1, 3), rat(1, 2)]);
        assert_eq!(w, alg(&[("x+y", 6)]));
        assert_eq!(a, m.exponents().into_iter().map(|(_, a)| a).collect::<Vec<_>>());
    }

    #[test]
    fn weak_part_without_divisors() {
        let m = marked(&[("x^2+y^3", 2), ("x*y", 1)], &[]);
        let (a, w) = weak_part(&m).unwrap();
        assert!(a.is_empty());
        assert_eq!(w, from_pair(&Pair::new(graded_piece(m.algebra(), 2), 2)).unwrap());
    }

    #[test]
    fn exponents_are_maximal() {
        let m = marked(&[("x^3*y + x^4", 2), ("x^2*y^2", 3)], &[(0, false), (1, false)]);
        let (a, _) = weak_part(&m).unwrap();
        let n = m.algebra().weights_lcm();
        let piece = graded_piece(m.algebra(), n);
        for (i, j) in [0usize, 1].into_iter().enumerate() {
            let bumped = (&a[i] * Rat::from_integer(n.into())).to_integer().to_u32().unwrap() + 1;
            let mut e = vec![0; 2];
            e[j] = bumped;
            let mono = Monomial::new(e);
            assert!(piece.gens().iter().any(|g| g.div_monomial(&mono).is_none()));
        }
    }

    #[test]
    fn exponents_survive_veronese() {
        let m = marked(&[("x^3*y + x^4", 2), ("x^2*y^2", 3)], &[(0, false), (1, false)]);
        let v = MarkedObject::new(veronese(m.algebra(), 2), m.chart().clone()).unwrap();
        assert_eq!(m.exponents(), v.exponents());
        assert_eq!(weak_part(&m).unwrap().0, weak_part(&v).unwrap().0);
    }

    #[test]
    fn words() {
        let cusp = marked(&[("x^2+y^3", 2)], &[]);
        assert_eq!(word_at(&cusp, &origin()).unwrap(), rat_int(1));
        // after the cusp blowup, y-chart
        let after = marked(&[("x^2+y", 2)], &[(1, false)]);
        assert_eq!(after.exponents()[0].1, rat_int(0));
        assert_eq!(word_at(&after, &origin()).unwrap(), rat(1, 2));
        // the compact weak part agrees with ord minus the divisor exponents
        let m = marked(&[("x^3*y^2*(x+y^2)", 4), ("x^2*y^5", 3)], &[(0, false), (1, false)]);
        let a: Vec<Rat> = m.exponents().into_iter().map(|(_, a)| a).collect();
        for q in random_points(2, 20, 5).into_iter().chain([origin()]) {
            let mut expect = ord_at(m.algebra(), &q).unwrap();
            for (j, aj) in a.iter().enumerate() {
                if q[j].is_zero() {
                    expect -= aj;
                }
            }
            assert_eq!(word_at(&m, &q).unwrap(), expect, "{q:?}");
        }
    }

    #[test]
    fn t_values() {
        let m = marked(&[("x^2+y^3", 2)], &[]);
        assert_eq!(t_at(&m, &origin()).unwrap(), TValue::new(rat_int(1), 0));
        let m = marked(&[("x^3*y^3", 2)], &[(0, true), (1, true)]);
        assert_eq!(t_at(&m, &origin()).unwrap().n, 2);
        assert!(TValue::new(rat_int(1), 0) < TValue::new(rat_int(1), 1));
        assert!(TValue::new(rat(1, 2), 5) < TValue::new(rat_int(1), 0));
    }

    #[test]
    fn candidate_maximum() {
        let m = marked(&[("x^2+y^3", 2)], &[]);
        let cands = default_candidates(2, &[]);
        assert_eq!(
            max_t(&m, &cands).unwrap(),
            MaxT::Value(TValue::new(rat_int(1), 0), vec![Candidate::Subspace(CenterSpec::point(2))])
        );
        let smooth = marked(&[("x^2+y", 2)], &[]);
        assert_eq!(max_t(&smooth, &cands).unwrap(), MaxT::Resolved);
        let v = MarkedObject::new(veronese(m.algebra(), 3), m.chart().clone()).unwrap();
        assert_eq!(max_t(&v, &cands).unwrap(), max_t(&m, &cands).unwrap());
    }

    #[test]
    fn strata_maxima() {
        let lim = Limits::default();
        let cusp = marked(&[("x^2+y^3", 2)], &[]);
        let s = max_word_strata(&cusp, lim).unwrap().unwrap();
        assert_eq!(s, vec![StratumMax { divisors: vec![], word: rat_int(1) }]);
        // node after one blowup, y-chart: y (x^2 - 1) with E = {y}
        let node = marked(&[("y*(x^2-1)", 1)], &[(1, true)]);
        let s = max_word_strata(&node, lim).unwrap().unwrap();
        assert_eq!(
            s,
            vec![
                StratumMax { divisors: vec![], word: rat_int(1) },
                StratumMax { divisors: vec![1], word: rat_int(1) },
            ]
        );
        assert_eq!(max_t_from_strata(&node, &s), Some(TValue::new(rat_int(1), 1)));
        assert_eq!(max_word_strata(&marked(&[("x+y^2", 1), ("x+y^2+1", 1)], &[]), lim).unwrap(), None);
    }

    #[test]
    fn dm_examples() {
        let c = chart_with(&[(0, true)]);
        assert_eq!(dm_algebra(&c, 1).unwrap(), alg(&[("x", 1)]));
        let c = chart_with(&[(0, true), (1, true)]);
        assert_eq!(dm_algebra(&c, 1).unwrap(), alg(&[("x*y", 1)]));
        assert_eq!(dm_algebra(&c, 2).unwrap(), alg(&[("x", 1), ("y", 1)]));
        assert!(dm_algebra(&c, 3).is_err());
        assert!(dm_algebra(&chart_with(&[(0, false)]), 1).is_err());
    }

    #[test]
    fn t_algebra_is_simple_on_the_max_locus() {
        let cusp = marked(&[("x^2+y^3", 2)], &[]);
        let t = TValue::new(rat_int(1), 0);
        for tg in [t_algebra(&cusp, &t).unwrap(), t_algebra_compact(&cusp, &t).unwrap()] {
            assert!(is_simple_at(&tg, &origin()).unwrap());
        }
        let m = marked(&[("x^3", 2)], &[]);
        let t = TValue::new(rat(3, 2), 0);
        for tg in [t_algebra(&m, &t).unwrap(), t_algebra_compact(&m, &t).unwrap()] {
            assert_eq!(ord_at(&tg, &origin()).unwrap(), rat_int(1));
            // Sing(T) is the max locus {x = 0}
            assert!(contains_point(&tg, &[rat_int(0), rat_int(5)]).unwrap());
            assert!(!contains_point(&tg, &[rat_int(1), rat_int(0)]).unwrap());
        }
    }

    #[test]
    fn compact_and_graded_weak_parts_agree_pointwise() {
        let m = marked(&[("x^3*y^2*(x+y^2)", 4), ("x^2*y^5", 3)], &[(0, false), (1, false)]);
        let (_, weak) = weak_part(&m).unwrap();
        let compact = weak_twisted_compact(m.algebra(), &m.exponents(), &Rat::one());
        for omega in [rat_int(1), rat(1, 2), rat(3, 4)] {
            let a = twist(&weak, &omega).unwrap();
            let b = weak_twisted_compact(m.algebra(), &m.exponents(), &omega);
            for q in random_points(2, 15, 2).into_iter().chain([origin()]) {
                assert_eq!(ord_at(&a, &q).unwrap(), ord_at(&b, &q).unwrap());
                assert_eq!(contains_point(&a, &q).unwrap(), contains_point(&b, &q).unwrap());
            }
        }
        for q in random_points(2, 15, 3) {
            assert_eq!(ord_at(&weak, &q).unwrap(), ord_at(&compact, &q).unwrap());
        }
    }

    #[test]
    fn transform_bookkeeping() {
        let cusp = marked(&[("x^2+y^3", 2)], &[]);
        let kids = transform_marked(&cusp, &CenterSpec::point(2)).unwrap();
        assert_eq!(kids.len(), 2);
        for k in &kids {
            assert_eq!(k.chart().divisors.len(), 1);
            assert_eq!(k.chart().divisors[0].a, rat_int(0));
        }
        assert_eq!(kids[1].algebra(), &alg(&[("x^2+y", 2)]));
        // codimension one: (x^2, 1) along {x = 0}
        let m = marked(&[("x^2", 1)], &[]);
        let kids = transform_marked(&m, &CenterSpec::new(vec![0]).unwrap()).unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].chart().divisors[0].a, rat_int(1));
        assert_eq!(kids[0].algebra(), &alg(&[("x", 1)]));
        let mut fresh = kids[0].clone();
        fresh.refresh_exponents();
        assert_eq!(fresh.exponents(), kids[0].exponents());
    }

    #[test]
    fn d_settles_on_word_drop() {
        let mut m = MarkedObject::from_parts(alg(&[("y*(x^2-1)", 1)]), chart_with(&[(1, false)]), Some(rat_int(2)));
        m.settle(rat_int(1));
        assert_eq!(m.chart().d_vars(), vec![1]);
        let mut m = MarkedObject::from_parts(alg(&[("y*(x^2-1)", 1)]), chart_with(&[(1, false)]), Some(rat_int(1)));
        m.settle(rat_int(1));
        assert!(m.chart().d_vars().is_empty());
    }

    #[test]
    fn invariants_agree_on_equivalent_algebras() {
        let g = from_pair(&Pair::new(Ideal::new(2, [p("x^2+y^3")]).unwrap(), 2)).unwrap();
        let a = MarkedObject::new(g.clone(), Chart::root(default_names(2))).unwrap();
        let b = MarkedObject::new(veronese(&g, 2), Chart::root(default_names(2))).unwrap();
        let grid = default_grid(2, 2, 0);
        assert!(invariant_disagreements(&a, &b, &grid).unwrap().is_empty());
        let h = from_pair(&Pair::new(Ideal::new(2, [p("x^2+y^3")]).unwrap(), 1)).unwrap();
        let c = MarkedObject::new(h, Chart::root(default_names(2))).unwrap();
        assert!(!invariant_disagreements(&a, &c, &grid).unwrap().is_empty());
    }
}
