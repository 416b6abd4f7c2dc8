//! The resolution driver: maximal contact, restriction to a hypersurface,
//! induction on the dimension, the monomial endgame, and traces.
//!
//! Each chart is handled statelessly. Its maximal `t` is computed over the
//! whole chart by stratifying along the exceptional divisors; the center is
//! the first component of the locus where `t` is maximal, found through the
//! simple algebra `T(G)`, a maximal contact hypersurface in graph form, and
//! a recursive call one dimension down.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basicobj::{
    max_t_from_strata, max_word_strata, monomial_exponents, t_algebra_compact, MarkedObject, TValue,
};
use crate::blowup::{compose, identity_substitution, transform_marked, CenterSpec, Chart, DivisorRecord, Substitution};
use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, Limits, Membership};
use crate::poly::{rat, Monomial, PointQ, Poly, Rat};
use crate::rees::{diff_closure_reduced, graded_piece, ReesAlgebra};
use crate::singular::{meets_open, sing_ideal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Blowup,
    Codim1Adjust,
    Monomial,
    /// Restriction of a chart to two open pieces covering it.
    Restrict,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub chart: String,
    pub center: Vec<String>,
    pub t: Option<TValue>,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Resolved,
    LimitExceeded,
    UnsupportedGeometry,
}

/// Bookkept and recomputed exponent of a new exceptional divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransWeakCheck {
    pub chart: String,
    pub bookkept: Rat,
    pub recomputed: Rat,
}

/// A chart certified free of singular points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub chart: String,
    pub algebra: ReesAlgebra,
    pub divisors: Vec<DivisorRecord>,
    pub units: Vec<Poly>,
}

/// Side information gathered during a run; not part of the serialized
/// trace. Entries carry the index of the step they belong to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    /// Charts whose maximal `t` is strictly below their parent's.
    pub drops: Vec<(usize, String)>,
    pub transweak: Vec<(usize, TransWeakCheck)>,
    pub leaves: Vec<(usize, Leaf)>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTrace {
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
    #[serde(skip)]
    pub report: RunReport,
}

impl ResolutionTrace {
    /// Steps that change the chart (everything but leaves).
    pub fn num_operations(&self) -> usize {
        self.steps.iter().filter(|s| s.kind != StepKind::Resolved).count()
    }

    pub fn num_blowups(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, StepKind::Blowup | StepKind::Codim1Adjust | StepKind::Monomial))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable trace")
    }
}

/// Step-by-step equality of charts, centers, `t` values and kinds, plus the
/// outcome.
pub fn traces_equal(a: &ResolutionTrace, b: &ResolutionTrace) -> bool {
    a.steps == b.steps && a.outcome == b.outcome
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolveOptions {
    /// Maximal number of chart operations (blowups and restrictions).
    pub max_steps: usize,
    pub limits: Limits,
    /// Resolve sibling charts concurrently.
    pub parallel: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_steps: 200, limits: Limits::default(), parallel: false }
    }
}

/// A center in the current chart after the coordinate change
/// `x_i -> change[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedCenter {
    pub change: Substitution,
    pub center: CenterSpec,
    pub monomial: bool,
}

/// Among the weight-one generators of order exactly one at `p`, the first.
pub fn maximal_contact(gd: &ReesAlgebra, p: &[Rat]) -> Result<Poly> {
    for (f, n) in gd.gens() {
        if *n == 1 && f.order_at(p)? == crate::poly::Order::Finite(1) {
            return Ok(f.clone());
        }
    }
    Err(Error::Internal("no weight-one generator of order one".into()))
}

/// `ell = c (x_j - h)` with `h` free of `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphForm {
    pub j: usize,
    pub h: Poly,
    /// `x_j -> x_j + h`, other variables fixed; pulls `ell` back to `c x_j`.
    pub change: Substitution,
}

/// Largest `j` (skipping `avoid` unless `h` is constant) such that `d ell / d x_j`
/// is a nonzero constant.
pub fn graph_form_avoiding(ell: &Poly, avoid: &[usize]) -> Result<GraphForm> {
    let dim = ell.dim();
    for j in (0..dim).rev() {
        let d = ell.partial(j);
        if d.is_zero() || !d.is_constant() {
            continue;
        }
        let c = d.coefficient(&Monomial::one(dim));
        let h = &Poly::var(dim, j) - &ell.scale(&c.recip());
        // a divisor variable may only be translated by a constant
        if avoid.contains(&j) && !h.is_constant() {
            continue;
        }
        let mut change = identity_substitution(dim);
        change[j] = &Poly::var(dim, j) + &h;
        return Ok(GraphForm { j, h, change });
    }
    Err(Error::NonGraph(format!("{ell:?}")))
}

/// Graph form of a hypersurface of order one at `p`.
pub fn to_graph_form(ell: &Poly, p: &[Rat]) -> Result<GraphForm> {
    if ell.order_at(p)? != crate::poly::Order::Finite(1) {
        return Err(Error::Undefined("maximal contact must have order one"));
    }
    graph_form_avoiding(ell, &[])
}

/// Substitutes `x_j -> h` and drops `x_j`.
pub fn restrict_to_hypersurface(g: &ReesAlgebra, j: usize, h: &Poly) -> ReesAlgebra {
    let dim = g.dim();
    let mut images = identity_substitution(dim);
    images[j] = h.clone();
    let gens: Vec<(Poly, u32)> = g
        .gens()
        .iter()
        .map(|(f, n)| (f.substitute(&images), *n))
        .filter(|(f, _)| !f.is_zero())
        .map(|(f, n)| (f.remove_var(j), n))
        .collect();
    ReesAlgebra::new(dim - 1, gens).expect("positive weights")
}

/// The monomial rule: the smallest (by sorted label list) minimal set of
/// divisors whose exponents sum to at least one.
pub fn monomial_center(m: &MarkedObject) -> Option<CenterSpec> {
    let divs = &m.chart().divisors;
    let r = divs.len();
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for mask in 1u32..(1 << r) {
        let idx: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        let sum: Rat = idx.iter().map(|&i| divs[i].a.clone()).sum();
        if sum < Rat::one() {
            continue;
        }
        let minimal = idx.iter().all(|&skip| {
            let s: Rat = idx.iter().filter(|&&i| i != skip).map(|&i| divs[i].a.clone()).sum();
            s < Rat::one()
        });
        if !minimal {
            continue;
        }
        let mut labels: Vec<usize> = idx.iter().map(|&i| divs[i].label).collect();
        labels.sort_unstable();
        let vars: Vec<usize> = idx.iter().map(|&i| divs[i].var).collect();
        if best.as_ref().is_none_or(|(l, _)| labels < *l) {
            best = Some((labels, vars));
        }
    }
    best.map(|(_, vars)| CenterSpec::new(vars).unwrap())
}

/// Applies the monomial rule along every chart until it no longer applies,
/// depth first; returns `(chart id, center)` pairs.
pub fn monomial_resolve(m: &MarkedObject) -> Result<Vec<(String, CenterSpec)>> {
    let mut out = Vec::new();
    let mut stack = vec![m.clone()];
    while let Some(cur) = stack.pop() {
        if out.len() > 1000 {
            return Err(Error::LimitExceeded("monomial rule did not terminate".into()));
        }
        let Some(c) = monomial_center(&cur) else { continue };
        out.push((cur.chart().id.clone(), c.clone()));
        let mut kids = transform_marked(&cur, &c)?;
        kids.reverse();
        stack.extend(kids);
    }
    Ok(out)
}

/// Rational roots of a univariate polynomial, ascending. Fails when the
/// squarefree part has roots that are not rational.
pub fn rational_roots(g: &Poly) -> Result<Vec<Rat>> {
    assert_eq!(g.dim(), 1, "univariate");
    if g.is_zero() {
        return Err(Error::Unsupported("every point is a root".into()));
    }
    let deg = g.total_degree().unwrap();
    let prim = g.primitive();
    let coeff = |k: u32| -> BigInt { prim.coefficient(&Monomial::new(vec![k])).to_integer() };
    let low = (0..=deg).find(|&k| !coeff(k).is_zero()).unwrap();
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Rat::zero());
    }
    let (a0, an) = (coeff(low).abs(), coeff(deg).abs());
    if deg > low {
        let ps = divisors_of(&a0)?;
        let qs = divisors_of(&an)?;
        let mut cands: Vec<Rat> = Vec::new();
        for p in &ps {
            for q in &qs {
                let r = Rat::new(p.clone(), q.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            if g.eval(std::slice::from_ref(&r)).is_zero() {
                roots.push(r);
            }
        }
    }
    roots.sort();
    let dg = g.partial(0);
    let gcd_deg = if dg.is_zero() {
        deg
    } else {
        match groebner_basis(&[g.clone(), dg], Limits::default()) {
            Ok(b) => b[0].total_degree().unwrap_or(0),
            Err(_) => return Err(Error::LimitExceeded("univariate gcd".into())),
        }
    };
    if (roots.len() as u32) < deg - gcd_deg {
        return Err(Error::Unsupported("singular points with irrational coordinates".into()));
    }
    Ok(roots)
}

fn divisors_of(n: &BigInt) -> Result<Vec<BigInt>> {
    let v = n.to_u64().filter(|&v| v <= 1_000_000_000_000).ok_or_else(|| {
        Error::Unsupported("coefficients too large for the rational root search".into())
    })?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

fn is_identity(change: &[Poly]) -> bool {
    change.iter().enumerate().all(|(i, p)| *p == Poly::var(p.dim(), i))
}

/// Lifts a lower-dimensional change on `{x_j = 0}` to the ambient chart.
fn lift_change(lower: &[Poly], j: usize) -> Substitution {
    let dim = lower.len() + 1;
    (0..dim)
        .map(|i| match i.cmp(&j) {
            std::cmp::Ordering::Less => lower[i].insert_var(j),
            std::cmp::Ordering::Equal => Poly::var(dim, j),
            std::cmp::Ordering::Greater => lower[i - 1].insert_var(j),
        })
        .collect()
}

/// The lower-dimensional marked object on `Z = {x_j = 0}`.
fn lower_object(m: &MarkedObject, alg: ReesAlgebra, j: usize, change: &[Poly], extra_units: &[Poly]) -> Result<MarkedObject> {
    let up = m.chart();
    let shift = |k: usize| if k > j { k - 1 } else { k };
    let mut names = up.names.clone();
    names.remove(j);
    let divisors = up
        .divisors
        .iter()
        .filter(|h| h.var != j)
        .map(|h| DivisorRecord { var: shift(h.var), label: h.label, a: Rat::zero(), in_d: false })
        .collect();
    let mut on_z = identity_substitution(up.dim());
    on_z[j] = Poly::zero(up.dim());
    let units = up
        .units
        .iter()
        .chain(extra_units)
        .map(|u| u.substitute(change).substitute(&on_z).remove_var(j))
        .collect();
    let mut chart = Chart::root(names);
    chart.id = format!("{}/{}", up.id, j);
    chart.divisors = divisors;
    chart.units = units;
    MarkedObject::new(alg, chart)
}

/// A center for the locus of maximal `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Center {
    /// A coordinate subspace after a coordinate change.
    Coordinate(PlannedCenter),
    /// A smooth hypersurface `V(ell)`, which need not be a coordinate
    /// hyperplane; blowing it up only divides it out.
    Hypersurface(Poly),
}

/// `sum_k (Delta_{x_j}^k g |_{x_j = 0}, n - k)` over the generators
/// `(g, n)`, for `k < n`: the coefficient algebra along `{x_j = 0}`.
pub fn coefficient_algebra(g: &ReesAlgebra, j: usize) -> ReesAlgebra {
    let dim = g.dim();
    let mut gens = Vec::new();
    for (f, n) in g.gens() {
        for k in 0..*n {
            let mut alpha = vec![0; dim];
            alpha[j] = k;
            gens.push((f.delta(&Monomial::new(alpha)), n - k));
        }
    }
    let full = ReesAlgebra::new(dim, gens).expect("positive weights");
    restrict_to_hypersurface(&full, j, &Poly::zero(dim)).dedup()
}

/// Does `ell` define a hypersurface that is smooth along `Sing(T)` on the
/// chart?
fn smooth_along(ell: &Poly, sing_t: &crate::ideal::Ideal, units: &[Poly], limits: Limits) -> Result<bool> {
    let mut ideal = sing_t.clone();
    for i in 0..ell.dim() {
        ideal = ideal.sum(&crate::ideal::Ideal::principal(ell.partial(i)))?;
    }
    Ok(!meets_open(&ideal, &[], units, limits)?)
}

/// Removes the factors of `f` that are units on the chart.
fn strip_units(f: &Poly, units: &[Poly]) -> Poly {
    let mut f = f.clone();
    for u in units.iter().filter(|u| !u.is_constant()) {
        while let Some(q) = f.div_exact(u) {
            f = q;
        }
    }
    f
}

/// The zeros of `ideal` on the chart, sorted, when there are finitely many.
/// Fails when some coordinate is irrational.
fn rational_points(ideal: &crate::ideal::Ideal, units: &[Poly], limits: Limits) -> Result<Option<Vec<PointQ>>> {
    let dim = ideal.dim();
    let mut coords = Vec::with_capacity(dim);
    for i in 0..dim {
        let Some(e) = ideal.eliminant(i, limits.max_degree, limits)? else { return Ok(None) };
        let univariate = e.substitute(&(0..dim).map(|k| if k == i { Poly::var(1, 0) } else { Poly::zero(1) }).collect::<Vec<_>>());
        coords.push(rational_roots(&univariate)?);
    }
    let mut points: Vec<PointQ> = vec![Vec::new()];
    for roots in &coords {
        points = points
            .into_iter()
            .flat_map(|p| roots.iter().map(move |r| [p.clone(), vec![r.clone()]].concat()))
            .collect();
    }
    points.retain(|p| ideal.vanishes_at(p) && units.iter().all(|u| !u.eval(p).is_zero()));
    Ok(Some(points))
}

/// Splits `f` into pairwise coprime factors by taking gcds with each of
/// `others`; the product of the pieces is `f` up to a constant.
fn coprime_pieces(f: &Poly, others: &[&Poly]) -> Vec<Poly> {
    let mut pieces = vec![f.primitive()];
    for e in others {
        let mut next = Vec::new();
        for p in pieces {
            let g = p.gcd(e);
            if g.is_constant() || g == p {
                next.push(p);
            } else {
                next.push(p.div_exact(&g).expect("gcd divides").primitive());
                next.push(g);
            }
        }
        pieces = next;
    }
    pieces
}

/// The union of the codimension-one components of `Sing(T)`, when there is
/// one: `V(h)` for `h` the squarefree part of the gcd of the generators,
/// provided `h^n` divides
/// every `(g, n)`. A variable factor of `h` comes first, so that its
/// exceptional divisor is recorded.
fn hypersurface_component(tg: &ReesAlgebra, avoid: &[usize], units: &[Poly], limits: Limits) -> Result<Option<Center>> {
    let dim = tg.dim();
    let h = tg.gens().iter().fold(Poly::zero(dim), |acc, (g, _)| acc.gcd(g));
    let repeated = (0..dim).fold(h.clone(), |acc, i| acc.gcd(&h.partial(i)));
    let h = strip_units(&h.div_exact(&repeated).expect("gcd divides"), units);
    if h.is_constant() || !tg.gens().iter().all(|(g, n)| g.div_exact(&h.pow(*n)).is_some()) {
        return Ok(None);
    }
    if !smooth_along(&h, &crate::ideal::Ideal::principal(h.clone()), units, limits)? {
        return Err(Error::Unsupported("singular hypersurface in the locus of maximal t".into()));
    }
    let coordinate = |change: Substitution, j: usize| -> Result<Option<Center>> {
        let pc = PlannedCenter { change, center: CenterSpec::new(vec![j])?, monomial: false };
        Ok(Some(Center::Coordinate(pc)))
    };
    if let Some(j) = (0..dim).rev().find(|&j| !avoid.contains(&j) && h.div_exact(&Poly::var(dim, j)).is_some()) {
        return coordinate(identity_substitution(dim), j);
    }
    match graph_form_avoiding(&h, avoid) {
        Ok(gf) => coordinate(gf.change, gf.j),
        Err(_) => Ok(Some(Center::Hypersurface(h))),
    }
}

/// What a lower level keeps from one chart to the next while the levels
/// above it keep their `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelState {
    pub t: TValue,
    /// Maximal word at that level; `None` after a restriction to an open
    /// piece, where a smaller maximum is not a drop.
    pub word: Option<Rat>,
    pub d_labels: Vec<usize>,
}

/// Centers for the locus of maximal `t`, in order, for a chart with no
/// history.
pub fn find_centers(m: &MarkedObject, t: &TValue, limits: Limits) -> Result<Vec<Center>> {
    Ok(find_centers_with(m, t, &[], limits)?.0)
}

/// Centers for the locus of maximal `t`, given the states of the lower
/// levels in the parent chart; also returns the states in this chart.
pub fn find_centers_with(
    m: &MarkedObject,
    t: &TValue,
    inherited: &[LevelState],
    limits: Limits,
) -> Result<(Vec<Center>, Vec<LevelState>)> {
    let dim = m.dim();
    if t.word.is_zero() {
        let c = monomial_center(m)
            .ok_or_else(|| Error::Internal("monomial case without a qualifying divisor set".into()))?;
        let pc = PlannedCenter { change: identity_substitution(dim), center: c, monomial: true };
        return Ok((vec![Center::Coordinate(pc)], Vec::new()));
    }
    let tg = t_algebra_compact(m, t)?;
    let sing_t = sing_ideal(&tg);
    let units = &m.chart().units;
    if dim == 1 {
        let basis = groebner_basis(sing_t.gens(), limits)
            .map_err(|_| Error::LimitExceeded("Gröbner basis of Sing(T)".into()))?;
        let g = basis.first().cloned().unwrap_or_else(|| Poly::zero(1));
        let mut out = Vec::new();
        for r in rational_roots(&g)? {
            if units.iter().any(|u| u.eval(std::slice::from_ref(&r)).is_zero()) {
                continue;
            }
            let change = vec![&Poly::var(1, 0) + &Poly::constant(1, r)];
            let pc = PlannedCenter { change, center: CenterSpec::point(1), monomial: false };
            out.push(Center::Coordinate(pc));
        }
        if out.is_empty() {
            return Err(Error::Internal("empty locus of maximal t".into()));
        }
        return Ok((out, Vec::new()));
    }
    let avoid = m.chart().divisor_vars();
    if let Some(c) = hypersurface_component(&tg, &avoid, units, limits)? {
        return Ok((vec![c], Vec::new()));
    }
    let gd = diff_closure_reduced(&tg);
    let others: Vec<&Poly> = gd.gens().iter().filter(|(_, w)| *w == 1).map(|(f, _)| f).collect();
    let mut chosen = None;
    for ell in &others {
        if !smooth_along(ell, &sing_t, units, limits)? {
            continue;
        }
        let ell = strip_units(ell, units);
        if let Ok(gf) = graph_form_avoiding(&ell, &avoid) {
            chosen = Some((gf, Vec::new()));
            break;
        }
        // factors of ell that miss Sing(T) are units near it
        let (mut kept, mut dropped) = (Poly::one(dim), Vec::new());
        for piece in coprime_pieces(&ell, &others) {
            let mut on = sing_t.clone();
            on = on.sum(&crate::ideal::Ideal::principal(piece.clone()))?;
            if meets_open(&on, &[], units, limits)? {
                kept = &kept * &piece;
            } else {
                dropped.push(piece);
            }
        }
        if let Ok(gf) = graph_form_avoiding(&kept, &avoid) {
            chosen = Some((gf, dropped));
            break;
        }
    }
    let Some((gf, dropped)) = chosen else {
        // an isolated rational point needs no hypersurface
        if let Some(points) = rational_points(&sing_t, units, limits)? {
            let out = points
                .into_iter()
                .map(|p| {
                    let change = (0..dim).map(|i| &Poly::var(dim, i) + &Poly::constant(dim, p[i].clone())).collect();
                    Center::Coordinate(PlannedCenter { change, center: CenterSpec::point(dim), monomial: false })
                })
                .collect();
            return Ok((out, Vec::new()));
        }
        return Err(Error::Unsupported("no maximal contact hypersurface in graph form".into()));
    };
    let moved = tg.map_polys(|f| f.substitute(&gf.change));
    let restricted = coefficient_algebra(&moved, gf.j);
    if restricted.is_empty() {
        let center = CenterSpec::new(vec![gf.j])?;
        return Ok((vec![Center::Coordinate(PlannedCenter { change: gf.change, center, monomial: false })], Vec::new()));
    }
    let mut lower = lower_object(m, restricted, gf.j, &gf.change, &dropped)?;
    let strata = max_word_strata(&lower, limits)?
        .ok_or_else(|| Error::Internal("maximal contact restriction lost Sing".into()))?;
    let omega = strata.iter().map(|s| s.word.clone()).max().unwrap();
    let state = inherited.first();
    if let Some(st) = state {
        lower.inherit(st.word.clone(), &st.d_labels);
    }
    lower.settle(omega.clone());
    let lt = max_t_from_strata(&lower, &strata).unwrap();
    let deeper = match state {
        Some(st) if st.t == lt => &inherited[1..],
        _ => &[],
    };
    let (centers, below) = find_centers_with(&lower, &lt, deeper, limits)?;
    let d_labels = lower.chart().divisors.iter().filter(|h| h.in_d).map(|h| h.label).collect();
    let mut states = vec![LevelState { t: lt, word: Some(omega), d_labels }];
    states.extend(below);
    let mut out = Vec::new();
    for lc in centers {
        let Center::Coordinate(lc) = lc else {
            return Err(Error::Unsupported("center of codimension two is not a coordinate subspace".into()));
        };
        let change = compose(&gf.change, &lift_change(&lc.change, gf.j));
        let mut vars: Vec<usize> = lc.center.vars().iter().map(|&k| if k >= gf.j { k + 1 } else { k }).collect();
        vars.push(gf.j);
        let pc = PlannedCenter { change, center: CenterSpec::new(vars)?, monomial: false };
        out.push(Center::Coordinate(pc));
    }
    Ok((out, states))
}

/// Resolves a marked object.
pub fn resolve(m: MarkedObject, opts: &ResolveOptions) -> ResolutionTrace {
    let run = run_chart(m, &Inherited::default(), opts.max_steps, opts);
    ResolutionTrace { steps: run.steps, outcome: run.outcome, report: run.report }
}

/// Resolves an algebra on affine space with no divisors.
pub fn resolve_algebra(g: &ReesAlgebra, names: Vec<String>, opts: &ResolveOptions) -> Result<ResolutionTrace> {
    Ok(resolve(MarkedObject::new(g.clone(), Chart::root(names))?, opts))
}

struct Run {
    steps: Vec<TraceStep>,
    outcome: Outcome,
    report: RunReport,
}

impl Run {
    fn empty() -> Self {
        Run { steps: Vec::new(), outcome: Outcome::Resolved, report: RunReport::default() }
    }

    fn failed(chart: &str, e: Error) -> Self {
        let outcome = match e {
            Error::LimitExceeded(_) => Outcome::LimitExceeded,
            _ => Outcome::UnsupportedGeometry,
        };
        Run { steps: Vec::new(), outcome, report: RunReport { message: Some(format!("chart {chart}: {e}")), ..Default::default() } }
    }

    fn operations(&self) -> usize {
        self.steps.iter().filter(|s| s.kind != StepKind::Resolved).count()
    }

    /// Keeps the first `budget` operations, and the leaves before the next.
    fn truncate(&mut self, budget: usize) {
        let mut count = 0;
        let cut = self.steps.iter().position(|s| {
            if s.kind != StepKind::Resolved {
                count += 1;
            }
            count > budget
        });
        if let Some(cut) = cut {
            self.steps.truncate(cut);
            self.report.drops.retain(|(i, _)| *i < cut);
            self.report.transweak.retain(|(i, _)| *i < cut);
            self.report.leaves.retain(|(i, _)| *i < cut);
            self.outcome = Outcome::LimitExceeded;
            self.report.message = Some("step limit reached".into());
        }
    }

    /// Appends `other`, shifting its step indices.
    fn append(&mut self, other: Run) {
        let off = self.steps.len();
        self.steps.extend(other.steps);
        let shift = |v: Vec<(usize, _)>| v.into_iter().map(|(i, x)| (i + off, x));
        self.report.drops.extend(shift(other.report.drops));
        self.report.transweak.extend(other.report.transweak.into_iter().map(|(i, x)| (i + off, x)));
        self.report.leaves.extend(other.report.leaves.into_iter().map(|(i, x)| (i + off, x)));
        self.outcome = other.outcome;
        if other.report.message.is_some() {
            self.report.message = other.report.message;
        }
    }
}

/// The parent chart's `t` and lower-level states.
#[derive(Debug, Clone, Default)]
struct Inherited {
    t: Option<TValue>,
    levels: Vec<LevelState>,
}

fn run_children(children: Vec<(MarkedObject, Inherited)>, budget: usize, opts: &ResolveOptions) -> Run {
    let mut out = Run::empty();
    let mut left = budget;
    if opts.parallel {
        let runs: Vec<Run> = children
            .into_par_iter()
            .map(|(m, inh)| run_chart(m, &inh, budget, opts))
            .collect();
        for mut r in runs {
            r.truncate(left);
            left -= r.operations();
            out.append(r);
            if out.outcome != Outcome::Resolved {
                break;
            }
        }
    } else {
        for (m, inh) in children {
            let r = run_chart(m, &inh, left, opts);
            left -= r.operations();
            out.append(r);
            if out.outcome != Outcome::Resolved {
                break;
            }
        }
    }
    out
}

fn step(m: &MarkedObject, vars: &[usize], t: Option<TValue>, kind: StepKind) -> TraceStep {
    TraceStep {
        chart: m.chart().id.clone(),
        center: vars.iter().map(|&j| m.chart().names[j].clone()).collect(),
        t,
        kind,
    }
}

/// Divisor variable translated by a nonzero constant, with the constant.
fn translated_divisor(m: &MarkedObject, c: &PlannedCenter) -> Result<Option<(usize, Rat)>> {
    for h in &m.chart().divisors {
        let k = h.var;
        let diff = &c.change[k] - &Poly::var(m.dim(), k);
        if diff.is_zero() {
            continue;
        }
        if diff.is_constant() && c.center.vars().contains(&k) {
            return Ok(Some((k, diff.coefficient(&Monomial::one(m.dim())))));
        }
        return Err(Error::Unsupported("coordinate change moves an exceptional divisor".into()));
    }
    Ok(None)
}

fn run_chart(mut m: MarkedObject, parent: &Inherited, budget: usize, opts: &ResolveOptions) -> Run {
    let strata = match max_word_strata(&m, opts.limits) {
        Err(e) => return Run::failed(&m.chart().id, e),
        Ok(None) => {
            let mut r = Run::empty();
            r.steps.push(step(&m, &[], None, StepKind::Resolved));
            let c = m.chart();
            let leaf = Leaf {
                chart: c.id.clone(),
                algebra: m.algebra().clone(),
                divisors: c.divisors.clone(),
                units: c.units.clone(),
            };
            r.report.leaves.push((0, leaf));
            return r;
        }
        Ok(Some(s)) => s,
    };
    let omega = strata.iter().map(|s| s.word.clone()).max().unwrap();
    m.settle(omega);
    let t = max_t_from_strata(&m, &strata).unwrap();
    if budget == 0 {
        let mut r = Run::empty();
        r.outcome = Outcome::LimitExceeded;
        r.report.message = Some("step limit reached".into());
        return r;
    }
    let mut run = Run::empty();
    let dropped = parent.t.as_ref().is_some_and(|p| t < *p);
    let levels: &[LevelState] = if parent.t.as_ref() == Some(&t) { &parent.levels } else { &[] };
    let (plan, states) = match find_centers_with(&m, &t, levels, opts.limits) {
        Ok(p) => p,
        Err(e) => return Run::failed(&m.chart().id, e),
    };
    let c = match &plan[0] {
        Center::Coordinate(c) => c,
        Center::Hypersurface(ell) => {
            let names = m.chart().names.clone();
            run.steps.push(TraceStep {
                chart: m.chart().id.clone(),
                center: vec![ell.display_with(&names).to_string()],
                t: Some(t.clone()),
                kind: StepKind::Codim1Adjust,
            });
            if dropped {
                run.report.drops.push((0, m.chart().id.clone()));
            }
            match divide_out(&m, ell, opts.limits) {
                Ok(kid) => {
                    let inh = Inherited { t: Some(t), levels: states };
                    run.append(run_children(vec![(kid, inh)], budget - 1, opts))
                }
                Err(e) => run.append(Run::failed(&m.chart().id, e)),
            }
            return run;
        }
    };
    let split = match translated_divisor(&m, c) {
        Ok(s) => s,
        Err(e) => return Run::failed(&m.chart().id, e),
    };
    if let Some((k, r)) = split {
        // the center misses {x_k = 0}: cover the chart by {x_k != 0}, where
        // that divisor is invisible, and {x_k != r}, which misses the center
        run.steps.push(step(&m, &[k], Some(t.clone()), StepKind::Restrict));
        if dropped {
            run.report.drops.push((0, m.chart().id.clone()));
        }
        let dim = m.dim();
        let mut off = m.clone();
        let id = m.chart().id.clone();
        off.chart_mut().id = format!("{id}.a");
        off.chart_mut().divisors.retain(|h| h.var != k);
        off.chart_mut().units.push(Poly::var(dim, k));
        let mut away = m.clone();
        away.chart_mut().id = format!("{id}.b");
        away.chart_mut().units.push(&Poly::var(dim, k) - &Poly::constant(dim, r));
        let levels: Vec<LevelState> = states.into_iter().map(|st| LevelState { word: None, ..st }).collect();
        let inh = Inherited { t: Some(t), levels };
        let kids = vec![(off, inh.clone()), (away, inh)];
        run.append(run_children(kids, budget - 1, opts));
        return run;
    }
    if !is_identity(&c.change) {
        let moved = m.algebra().map_polys(|f| f.substitute(&c.change));
        m.set_algebra(moved);
        m.chart_mut().change_coordinates(&c.change);
    }
    let kind = if c.monomial {
        StepKind::Monomial
    } else if c.center.codim() >= 2 {
        StepKind::Blowup
    } else {
        StepKind::Codim1Adjust
    };
    run.steps.push(step(&m, c.center.vars(), Some(t.clone()), kind));
    if dropped {
        run.report.drops.push((0, m.chart().id.clone()));
    }
    let kids = match transform_marked(&m, &c.center) {
        Ok(k) => k,
        Err(e) => {
            run.append(Run::failed(&m.chart().id, e));
            return run;
        }
    };
    for kid in &kids {
        match transweak_check(kid) {
            Ok(chk) => run.report.transweak.push((0, chk)),
            Err(e) => {
                run.append(Run::failed(&m.chart().id, e));
                return run;
            }
        }
    }
    let inh = Inherited { t: Some(t), levels: states };
    let kids = kids.into_iter().map(|k| (k, inh.clone())).collect();
    run.append(run_children(kids, budget - 1, opts));
    run
}

/// Transform along the hypersurface `V(ell)`. The new exceptional
/// hypersurface is not recorded, so it must miss the new singular locus.
fn divide_out(m: &MarkedObject, ell: &Poly, limits: Limits) -> Result<MarkedObject> {
    let mut gens = Vec::new();
    for (g, n) in m.algebra().gens() {
        let q = g
            .div_exact(&ell.pow(*n))
            .ok_or_else(|| Error::NotPermissible("hypersurface center".into()))?;
        gens.push((q, *n));
    }
    let alg = ReesAlgebra::new(m.dim(), gens)?;
    let mut on_ell = sing_ideal(&alg);
    on_ell = on_ell.sum(&crate::ideal::Ideal::principal(ell.clone()))?;
    if meets_open(&on_ell, &[], &m.chart().units, limits)? {
        return Err(Error::Unsupported("exceptional hypersurface is not a coordinate hyperplane".into()));
    }
    let mut chart = m.chart().clone();
    chart.id = format!("{}.h", chart.id);
    let mut kid = MarkedObject::from_parts(alg, chart, m.max_word().cloned());
    kid.refresh_exponents();
    Ok(kid)
}

/// Recomputes the newest divisor's exponent from the degree-`N` component.
fn transweak_check(kid: &MarkedObject) -> Result<TransWeakCheck> {
    let newest = kid
        .chart()
        .divisors
        .iter()
        .max_by_key(|h| h.label)
        .ok_or_else(|| Error::Internal("blowup without a new divisor".into()))?;
    let g = kid.algebra();
    let n = g.weights_lcm();
    let recomputed = if g.is_empty() {
        monomial_exponents(g, &[newest.var])[0].clone()
    } else {
        let (alpha, _) = graded_piece(g, n).extract_monomial_part(&[newest.var])?;
        rat(alpha[0] as i64, n as i64)
    };
    Ok(TransWeakCheck { chart: kid.chart().id.clone(), bookkept: newest.a.clone(), recomputed })
}

/// Parent chart id: the lineage prefix.
pub fn parent_chart(id: &str) -> Option<&str> {
    id.rfind('.').map(|i| &id[..i])
}

/// Checks that `t` never increases from a chart to its children and that it
/// drops exactly at the charts the driver reported.
pub fn check_monotone(trace: &ResolutionTrace) -> std::result::Result<(), String> {
    let mut t_of = std::collections::HashMap::new();
    for s in &trace.steps {
        if let Some(t) = &s.t {
            t_of.insert(s.chart.as_str(), t.clone());
        }
    }
    let declared: std::collections::HashSet<&str> = trace.report.drops.iter().map(|(_, c)| c.as_str()).collect();
    for s in &trace.steps {
        let Some(t) = &s.t else { continue };
        let Some(parent) = parent_chart(&s.chart) else { continue };
        let pt = t_of.get(parent).ok_or_else(|| format!("chart {} has no recorded parent", s.chart))?;
        if t > pt {
            return Err(format!("t rises from {pt} to {t} at chart {}", s.chart));
        }
        if (t < pt) != declared.contains(s.chart.as_str()) {
            return Err(format!("undeclared change of t at chart {}", s.chart));
        }
    }
    Ok(())
}

/// Gröbner certificate that every leaf chart has empty singular locus.
pub fn certify_leaves(trace: &ResolutionTrace, limits: Limits) -> Membership {
    let mut acc = Membership::Member;
    for (_, leaf) in &trace.report.leaves {
        acc = acc.and(crate::singular::sing_is_empty_on(&leaf.algebra, &leaf.units, limits));
    }
    acc
}

/// Rational point helper for tests and the command line.
pub fn origin(dim: usize) -> PointQ {
    vec![Rat::zero(); dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::{default_names, rat_int};
    use crate::rees::diff_closure;

    fn p(s: &str) -> Poly {
        parse_poly(s, &default_names(2)).unwrap()
    }

    fn alg(gs: &[(&str, u32)]) -> ReesAlgebra {
        ReesAlgebra::new(2, gs.iter().map(|(s, n)| (p(s), *n))).unwrap()
    }

    #[test]
    fn maximal_contact_examples() {
        let gd = diff_closure(&alg(&[("x^2+y^3", 2)]));
        assert_eq!(maximal_contact(&gd, &origin(2)).unwrap(), p("2*x"));
        assert_eq!(maximal_contact(&alg(&[("x", 1)]), &origin(2)).unwrap(), p("x"));
        assert!(maximal_contact(&alg(&[("x^2", 2)]), &origin(2)).is_err());
    }

    #[test]
    fn graph_forms() {
        let g = to_graph_form(&p("2*x"), &origin(2)).unwrap();
        assert_eq!((g.j, g.h.clone()), (0, Poly::zero(2)));
        assert_eq!(g.change, identity_substitution(2));
        let g = to_graph_form(&p("y+x^2"), &origin(2)).unwrap();
        assert_eq!((g.j, g.h.clone()), (1, p("-x^2")));
        let g = to_graph_form(&p("x+y"), &origin(2)).unwrap();
        assert_eq!(g.j, 1);
        assert_eq!(p("x+y").substitute(&g.change), p("y"));
        assert!(matches!(to_graph_form(&p("x+x*y+y^2*x"), &origin(2)), Err(Error::NonGraph(_))));
        assert!(to_graph_form(&p("x^2"), &origin(2)).is_err());
    }

    #[test]
    fn restriction_examples() {
        let gd = diff_closure(&alg(&[("x^2+y^3", 2)]));
        let r = restrict_to_hypersurface(&gd, 0, &Poly::zero(2));
        let y = |s: &str| parse_poly(s, &["y".to_string()]).unwrap();
        let expect = ReesAlgebra::new(1, [(y("y^3"), 2), (y("y^3"), 1), (y("3*y^2"), 1)]).unwrap();
        assert_eq!(r, expect);
        assert!(restrict_to_hypersurface(&alg(&[("x", 1)]), 0, &Poly::zero(2)).is_empty());
    }

    #[test]
    fn roots() {
        let x = |s: &str| parse_poly(s, &["x".to_string()]).unwrap();
        assert_eq!(rational_roots(&x("x^2-1")).unwrap(), vec![rat_int(-1), rat_int(1)]);
        assert_eq!(rational_roots(&x("x^3*(2*x-3)^2")).unwrap(), vec![rat_int(0), rat(3, 2)]);
        assert!(matches!(rational_roots(&x("x^2-2")), Err(Error::Unsupported(_))));
        assert!(matches!(rational_roots(&x("(x-1)*(x^2+1)")), Err(Error::Unsupported(_))));
    }

    fn marked(gs: &[(&str, u32)], divs: &[(usize, &str)]) -> MarkedObject {
        let mut c = Chart::root(default_names(2));
        c.divisors = divs
            .iter()
            .enumerate()
            .map(|(i, (v, a))| DivisorRecord {
                var: *v,
                label: i,
                a: crate::parse::parse_rat(a).unwrap(),
                in_d: false,
            })
            .collect();
        MarkedObject::from_parts(alg(gs), c, None)
    }

    #[test]
    fn monomial_rule() {
        let m = marked(&[("x^2", 1)], &[(0, "2")]);
        assert_eq!(monomial_center(&m), Some(CenterSpec::new(vec![0]).unwrap()));
        let m = marked(&[("x*y", 1)], &[(0, "1/2"), (1, "2/3")]);
        assert_eq!(monomial_center(&m), Some(CenterSpec::new(vec![0, 1]).unwrap()));
        assert_eq!(monomial_center(&marked(&[("1", 1)], &[])), None);
        let seq = monomial_resolve(&MarkedObject::new(alg(&[("x^2", 1)]), marked(&[("x^2", 1)], &[(0, "2")]).chart().clone()).unwrap()).unwrap();
        assert_eq!(seq.len(), 2);
    }

    #[test]
    fn cusp_trace() {
        let tr = resolve_algebra(&alg(&[("x^2+y^3", 2)]), default_names(2), &ResolveOptions::default()).unwrap();
        assert_eq!(tr.outcome, Outcome::Resolved);
        assert_eq!(tr.num_blowups(), 1);
        assert_eq!(tr.steps[0].t, Some(TValue::new(rat_int(1), 0)));
        assert_eq!(tr.steps[0].center, vec!["x", "y"]);
        assert_eq!(tr.steps.len(), 3);
        assert!(tr.steps[1..].iter().all(|s| s.kind == StepKind::Resolved));
        assert_eq!(certify_leaves(&tr, Limits::default()), Membership::Member);
        check_monotone(&tr).unwrap();
    }

    fn pair(d: usize, f: &str, b: u32) -> ReesAlgebra {
        let names = default_names(d);
        let j = crate::ideal::Ideal::new(d, [parse_poly(f, &names).unwrap()]).unwrap();
        crate::rees::from_pair(&crate::rees::Pair { ideal: j, b }).unwrap()
    }

    fn run(d: usize, f: &str, b: u32) -> ResolutionTrace {
        resolve_algebra(&pair(d, f, b), default_names(d), &ResolveOptions::default()).unwrap()
    }

    #[test]
    fn node_traces_agree_under_powers() {
        let a = run(2, "x^2-y^2", 1);
        let b = run(2, "(x^2-y^2)^3", 3);
        assert_eq!(a.outcome, Outcome::Resolved);
        assert!(traces_equal(&a, &b));
        let mut c = a.clone();
        c.steps[0].center.pop();
        assert!(!traces_equal(&a, &c));
        assert!(traces_equal(&a, &a));
    }

    #[test]
    fn normal_crossings_go_straight_to_the_monomial_rule() {
        let mut chart = Chart::root(default_names(2));
        chart.divisors = (0..2).map(|v| DivisorRecord { var: v, label: v, a: Rat::zero(), in_d: false }).collect();
        let m = MarkedObject::new(alg(&[("x*y", 1)]), chart).unwrap();
        let tr = resolve(m, &ResolveOptions::default());
        assert_eq!(tr.outcome, Outcome::Resolved);
        assert_eq!(tr.steps[0].kind, StepKind::Monomial);
        assert_eq!(tr.steps[0].t, Some(TValue::new(Rat::zero(), 0)));
        assert!(tr.steps.iter().all(|s| matches!(s.kind, StepKind::Monomial | StepKind::Resolved)));
        assert_eq!(certify_leaves(&tr, Limits::default()), Membership::Member);
    }

    #[test]
    fn whitney_umbrella_resolves() {
        let tr = run(3, "x^2-y^2*z", 2);
        assert_eq!(tr.outcome, Outcome::Resolved);
        assert_eq!(tr.steps[0].center, vec!["x", "y", "z"]);
        check_monotone(&tr).unwrap();
        assert!(tr.report.transweak.iter().all(|(_, c)| c.bookkept == c.recomputed));
        assert_eq!(certify_leaves(&tr, Limits::default()), Membership::Member);
    }

    #[test]
    fn coefficient_algebra_keeps_transversal_derivatives() {
        let names = default_names(3);
        let g = ReesAlgebra::new(3, [(parse_poly("x^2-y^2*z", &names).unwrap(), 2)]).unwrap();
        let yz = ["y".to_string(), "z".to_string()];
        let expect = ReesAlgebra::new(2, [(parse_poly("-y^2*z", &yz).unwrap(), 2)]).unwrap();
        assert_eq!(coefficient_algebra(&g, 0), expect);
        assert!(coefficient_algebra(&alg(&[("x^2", 2)]), 0).is_empty());
    }

    #[test]
    fn hypersurface_components_and_points() {
        let lim = Limits::default();
        // the two lines y = 1 and y = -1 come out as one smooth hypersurface
        let c = hypersurface_component(&alg(&[("(1-y^2)^2", 2)]), &[], &[], lim).unwrap();
        assert_eq!(c, Some(Center::Hypersurface(p("y^2-1"))));
        // a coordinate factor comes first
        let c = hypersurface_component(&alg(&[("y*(x*y-2)", 1)]), &[], &[], lim).unwrap();
        let Some(Center::Coordinate(pc)) = c else { panic!("expected a coordinate center") };
        assert_eq!(pc.center.vars(), &[1]);
        assert_eq!(hypersurface_component(&alg(&[("x^2+y^3", 2)]), &[], &[], lim).unwrap(), None);
        let i = crate::ideal::Ideal::new(2, [p("x+1"), p("y^2-y")]).unwrap();
        let pts = rational_points(&i, &[p("y")], lim).unwrap().unwrap();
        assert_eq!(pts, vec![vec![rat_int(-1), rat_int(1)]]);
        let i = crate::ideal::Ideal::new(2, [p("x"), p("y^2-2")]).unwrap();
        assert!(matches!(rational_points(&i, &[], lim), Err(Error::Unsupported(_))));
    }

    #[test]
    fn coprime_splitting() {
        let f = p("(y+1)*(2*y+1)");
        let mut pieces = coprime_pieces(&f, &[&p("x^2*(4*y+2)")]);
        pieces.sort_by(|a, b| a.leading().cmp(&b.leading()));
        assert_eq!(pieces, vec![p("y+1"), p("2*y+1")]);
    }

    #[test]
    fn step_limit_is_reported() {
        let opts = ResolveOptions { max_steps: 3, ..Default::default() };
        let tr = resolve_algebra(&pair(2, "x^2-y^2", 1), default_names(2), &opts).unwrap();
        assert_eq!(tr.outcome, Outcome::LimitExceeded);
        assert_eq!(tr.num_operations(), 3);
        let par = resolve_algebra(&pair(2, "x^2-y^2", 1), default_names(2), &ResolveOptions { parallel: true, ..opts }).unwrap();
        assert_eq!(par.to_json(), tr.to_json());
    }

    #[test]
    fn json_shape() {
        let tr = resolve_algebra(&alg(&[("x^2+y^3", 2)]), default_names(2), &ResolveOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&tr.to_json()).unwrap();
        assert_eq!(v["outcome"], "resolved");
        assert_eq!(v["steps"][0]["t"]["word"], "1");
        assert_eq!(v["steps"][0]["kind"], "blowup");
        assert_eq!(v["steps"][1]["t"], serde_json::Value::Null);
        let back: ResolutionTrace = serde_json::from_str(&tr.to_json()).unwrap();
        assert!(traces_equal(&back, &tr));
    }
}
