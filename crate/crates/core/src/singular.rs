//! Singular loci and the order function of a Rees algebra.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groebner::{Limits, Membership};
use crate::ideal::Ideal;
use crate::poly::{rat, rat_int, PointQ, Poly, Rat};
use crate::rees::ReesAlgebra;

/// `sum_i Diff^{n_i - 1}(f_i)`; its zero set is `Sing(G)`.
pub fn sing_ideal(g: &ReesAlgebra) -> Ideal {
    let mut acc = Ideal::zero(g.dim());
    for (f, n) in g.gens() {
        let d = Ideal::principal(f.clone()).diff_ideal(n - 1);
        acc = acc.sum(&d).expect("same dimension");
    }
    acc
}

/// Ideal whose zero set is `{x : ord_x(G) >= v}`, for `v > 0`.
pub fn ord_at_least_ideal(g: &ReesAlgebra, v: &Rat) -> Ideal {
    assert!(v.is_positive(), "threshold must be positive");
    let mut acc = Ideal::zero(g.dim());
    for (f, n) in g.gens() {
        let r = (v * rat_int(*n as i64)).ceil().to_integer().to_u32().expect("small threshold") - 1;
        let d = Ideal::principal(f.clone()).diff_ideal(r);
        acc = acc.sum(&d).expect("same dimension");
    }
    acc
}

/// `p` lies in `Sing(G)`: every generator has order at least its weight.
pub fn contains_point(g: &ReesAlgebra, p: &[Rat]) -> Result<bool> {
    for (f, n) in g.gens() {
        if f.order_at(p)? < crate::poly::Order::Finite(*n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ord_p(G) = min_i nu_p(f_i) / n_i`.
pub fn ord_at(g: &ReesAlgebra, p: &[Rat]) -> Result<Rat> {
    let mut best: Option<Rat> = None;
    for (f, n) in g.gens() {
        let v = f.order_at(p)?.finite().expect("nonzero generator");
        let q = rat(v as i64, *n as i64);
        if best.as_ref().is_none_or(|b| q < *b) {
            best = Some(q);
        }
    }
    best.ok_or(Error::Undefined("order of the zero algebra"))
}

/// `ord_p(G) = 1`, for `p` in `Sing(G)`.
pub fn is_simple_at(g: &ReesAlgebra, p: &[Rat]) -> Result<bool> {
    if !contains_point(g, p)? {
        return Err(Error::NotInSing);
    }
    Ok(ord_at(g, p)?.is_one())
}

/// Order at the generic point of `V(x_j : j in vars)`.
pub fn ord_along_subspace(g: &ReesAlgebra, vars: &[usize]) -> Result<Rat> {
    if vars.is_empty() {
        return Err(Error::EmptyCenter);
    }
    g.gens()
        .iter()
        .map(|(f, n)| rat(f.order_along_subspace(vars).finite().unwrap() as i64, *n as i64))
        .min()
        .ok_or(Error::Undefined("order of the zero algebra"))
}

/// Decides `Sing(G) = {}` by unit membership of the singular ideal.
pub fn sing_is_empty(g: &ReesAlgebra, limits: Limits) -> Membership {
    if g.is_empty() {
        return Membership::NotMember;
    }
    if g.gens().iter().any(|(f, _)| f.is_constant()) {
        return Membership::Member;
    }
    sing_ideal(g).is_unit(limits)
}

/// Is `V(I) ∩ {x_j = 0, j in on} ∩ {u != 0, u in off}` nonempty over the
/// algebraic closure? The open condition is encoded with one extra variable
/// `t` and the relation `1 - t * prod(off)`.
pub fn meets_open(ideal: &Ideal, on: &[usize], off: &[Poly], limits: Limits) -> Result<bool> {
    let dim = ideal.dim();
    let ext = dim + usize::from(!off.is_empty());
    let lift = |f: &Poly| if ext > dim { f.insert_var(dim) } else { f.clone() };
    let mut gens: Vec<Poly> = ideal.gens().iter().map(lift).collect();
    gens.extend(on.iter().map(|&j| Poly::var(ext, j)));
    if !off.is_empty() {
        let mut prod = Poly::var(ext, dim);
        for u in off {
            prod = &prod * &lift(u);
        }
        gens.push(&Poly::one(ext) - &prod);
    }
    match crate::groebner::is_unit_ideal(&gens, limits) {
        Membership::Member => Ok(false),
        Membership::NotMember => Ok(true),
        Membership::Undecided => Err(Error::LimitExceeded("Gröbner basis cap reached".into())),
    }
}

/// `Sing(G)` misses the open set where all `units` are nonzero.
pub fn sing_is_empty_on(g: &ReesAlgebra, units: &[Poly], limits: Limits) -> Membership {
    if units.is_empty() {
        return sing_is_empty(g, limits);
    }
    if g.is_empty() {
        return Membership::NotMember;
    }
    if g.gens().iter().any(|(f, _)| f.is_constant()) {
        return Membership::Member;
    }
    match meets_open(&sing_ideal(g), &[], units, limits) {
        Ok(b) => Membership::from_bool(!b),
        Err(_) => Membership::Undecided,
    }
}

/// All points with integer coordinates in `[-radius, radius]`.
pub fn integer_grid(dim: usize, radius: i64) -> Vec<PointQ> {
    let mut pts: Vec<PointQ> = vec![Vec::new()];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-radius..=radius).map(move |c| {
                    let mut q = p.clone();
                    q.push(rat_int(c));
                    q
                })
            })
            .collect();
    }
    pts
}

/// Seeded rational points with numerators in `[-6, 6]` and denominators in
/// `[1, 4]`.
pub fn random_points(dim: usize, count: usize, seed: u64) -> Vec<PointQ> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect())
        .collect()
}

/// The default sampling grid: the integer box (for `dim <= 3`) plus 50
/// seeded random points.
pub fn default_grid(dim: usize, radius: i64, seed: u64) -> Vec<PointQ> {
    let mut pts = if dim <= 3 { integer_grid(dim, radius) } else { vec![vec![Rat::zero(); dim]] };
    pts.extend(random_points(dim, 50, seed));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::default_names;
    use crate::rees::{diff_closure, odot};

    fn p(s: &str) -> Poly {
        parse_poly(s, &default_names(2)).unwrap()
    }

    fn alg(gs: &[(&str, u32)]) -> ReesAlgebra {
        ReesAlgebra::new(2, gs.iter().map(|(s, n)| (p(s), *n))).unwrap()
    }

    fn pt(a: i64, b: i64) -> PointQ {
        vec![rat_int(a), rat_int(b)]
    }

    #[test]
    fn sing_ideal_examples() {
        let i = sing_ideal(&alg(&[("x^2", 2)]));
        assert_eq!(i.gens(), &[p("x^2"), p("2*x")]);
        let i = sing_ideal(&alg(&[("x^2+y^3", 2)]));
        assert!(i.gens().contains(&p("2*x")) && i.gens().contains(&p("3*y^2")));
        assert_eq!(sing_ideal(&alg(&[("x", 1)])).gens(), &[p("x")]);
    }

    #[test]
    fn pointwise_sing_and_order() {
        let cusp = alg(&[("x^2+y^3", 2)]);
        assert!(contains_point(&cusp, &pt(0, 0)).unwrap());
        assert!(!contains_point(&cusp, &pt(1, 1)).unwrap());
        assert_eq!(ord_at(&cusp, &pt(0, 0)).unwrap(), rat_int(1));
        assert_eq!(ord_at(&alg(&[("x^3", 2)]), &pt(0, 0)).unwrap(), rat(3, 2));
        assert!(ord_at(&ReesAlgebra::new(2, []).unwrap(), &pt(0, 0)).is_err());
        assert!(is_simple_at(&cusp, &pt(0, 0)).unwrap());
        assert!(!is_simple_at(&alg(&[("x^3", 2)]), &pt(0, 0)).unwrap());
        assert_eq!(is_simple_at(&cusp, &pt(1, 1)), Err(Error::NotInSing));
    }

    #[test]
    fn sing_ideal_agrees_with_pointwise_test() {
        let gs = [alg(&[("x^2+y^3", 2)]), alg(&[("x^2-y^2", 1), ("x*y^2", 2)]), alg(&[("x^2*y", 3)])];
        for g in &gs {
            let i = sing_ideal(g);
            for q in default_grid(2, 2, 7).iter().chain(&random_points(2, 200, 11)) {
                assert_eq!(contains_point(g, q).unwrap(), i.vanishes_at(q), "{q:?}");
            }
        }
    }

    #[test]
    fn along_subspaces() {
        assert_eq!(ord_along_subspace(&alg(&[("x^2*y", 3)]), &[0]).unwrap(), rat(2, 3));
        assert_eq!(ord_along_subspace(&alg(&[("x^2+y^3", 2)]), &[0]).unwrap(), rat_int(0));
        assert!(ord_along_subspace(&alg(&[("x", 1)]), &[]).is_err());
        // never above the order at points of the subspace
        let g = alg(&[("x^2*y + x^3", 2), ("x*y^2", 1)]);
        let along = ord_along_subspace(&g, &[0]).unwrap();
        for q in random_points(2, 30, 3) {
            let on = vec![rat_int(0), q[1].clone()];
            assert!(along <= ord_at(&g, &on).unwrap());
        }
    }

    #[test]
    fn threshold_ideals() {
        let g = alg(&[("x^2+y^3", 2)]);
        let o = pt(0, 0);
        assert!(ord_at_least_ideal(&g, &rat_int(1)).vanishes_at(&o));
        assert!(ord_at_least_ideal(&g, &rat(3, 2)).is_unit(Limits::default()).is_member());
        let w = alg(&[("x^3", 2)]);
        assert!(ord_at_least_ideal(&w, &rat(3, 2)).vanishes_at(&o));
        assert!(!ord_at_least_ideal(&w, &rat_int(2)).vanishes_at(&o));
    }

    #[test]
    fn emptiness_and_closures() {
        let lim = Limits::default();
        assert_eq!(sing_is_empty(&alg(&[("x^2+y", 2)]), lim), Membership::Member);
        assert_eq!(sing_is_empty(&alg(&[("x^2+y^3", 2)]), lim), Membership::NotMember);
        assert_eq!(sing_is_empty(&alg(&[("1+x*y^3", 2)]), lim), Membership::Member);
        let g = alg(&[("x^2-y^2", 1), ("x*y", 2)]);
        let d = diff_closure(&g);
        let h = alg(&[("x", 1)]);
        let gh = odot(&g, &h).unwrap();
        for q in default_grid(2, 2, 1) {
            assert_eq!(contains_point(&g, &q).unwrap(), contains_point(&d, &q).unwrap());
            let both = contains_point(&g, &q).unwrap() && contains_point(&h, &q).unwrap();
            assert_eq!(contains_point(&gh, &q).unwrap(), both);
        }
    }

    #[test]
    fn open_subsets() {
        let lim = Limits::default();
        let g = alg(&[("y*(x^2-1)", 1), ("x^2-1", 1), ("y", 1)]);
        // Sing = {(1,0), (-1,0)}
        assert_eq!(sing_is_empty_on(&g, &[], lim), Membership::NotMember);
        assert_eq!(sing_is_empty_on(&g, &[p("x^2-1")], lim), Membership::Member);
        assert_eq!(sing_is_empty_on(&g, &[p("x-1")], lim), Membership::NotMember);
        let i = sing_ideal(&g);
        assert!(meets_open(&i, &[1], &[p("x+1")], lim).unwrap());
        assert!(!meets_open(&i, &[0], &[], lim).unwrap());
    }

    #[test]
    fn grids() {
        assert_eq!(integer_grid(2, 2).len(), 25);
        assert_eq!(default_grid(3, 2, 0).len(), 125 + 50);
        assert_eq!(random_points(2, 5, 9), random_points(2, 5, 9));
    }
}
