use proptest::prelude::*;

use reesolve_core::blowup::{blowup_charts, is_permissible, total_transform, weighted_transform};
use reesolve_core::ideal::Ideal;
use reesolve_core::parse::parse_poly;
use reesolve_core::poly::{default_names, multi_indices, rat, Monomial, Order, Poly, Rat};
use reesolve_core::problem::{Problem, ProblemBody};
use reesolve_core::rees::{diff_closure, natural_closure, odot, twist, veronese, ReesAlgebra};
use reesolve_core::singular::{contains_point, ord_at};
use reesolve_core::{CenterSpec, Chart, Limits, Membership};

fn poly(dim: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, dim), -4i64..=4), 1..5).prop_map(move |terms| {
        Poly::from_terms(dim, terms.into_iter().map(|(e, c)| (Monomial::new(e), rat(c, 1))))
    })
}

fn nonzero_poly(dim: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    poly(dim, max_deg).prop_filter("nonzero", |f| !f.is_zero())
}

fn point(dim: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-3i64..=3, 1i64..=3), dim).prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

/// Generators vanishing to some order at the origin, so `Sing` is not empty.
fn algebra(dim: usize) -> impl Strategy<Value = ReesAlgebra> {
    prop::collection::vec((nonzero_poly(dim, 2), 1u32..=3), 1..=3).prop_map(move |gens| {
        let gens = gens.into_iter().map(|(f, n)| {
            let shift = Poly::monomial(Monomial::new(vec![1; dim]), rat(1, 1));
            (&f * &shift, n)
        });
        ReesAlgebra::new(dim, gens).unwrap()
    })
}

fn shifted(f: &Poly, p: &[Rat]) -> Poly {
    let neg: Vec<Rat> = p.iter().map(|c| -c).collect();
    f.translate(&neg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_laws(f in poly(2, 3), g in poly(2, 3), h in poly(2, 3)) {
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&(&f + &g) - &g, f.clone());
    }

    #[test]
    fn leibniz(f in poly(2, 3), g in poly(2, 3), a in 0u32..=2, b in 0u32..=2) {
        let alpha = Monomial::new(vec![a, b]);
        let mut rhs = Poly::zero(2);
        for i in 0..=a {
            for j in 0..=b {
                let beta = Monomial::new(vec![i, j]);
                let gamma = Monomial::new(vec![a - i, b - j]);
                rhs = &rhs + &(&f.delta(&beta) * &g.delta(&gamma));
            }
        }
        prop_assert_eq!((&f * &g).delta(&alpha), rhs);
    }

    #[test]
    fn order_is_first_nonvanishing_delta(f in poly(2, 3), p in point(2), r in 0u32..=4) {
        let f = shifted(&f, &p);
        let high = match f.order_at(&p).unwrap() {
            Order::Finite(v) => v >= r,
            Order::Infinite => true,
        };
        let vanish = (0..r).flat_map(|k| multi_indices(2, k)).all(|a| f.delta(&a).eval(&p) == rat(0, 1));
        prop_assert_eq!(high, vanish);
    }

    #[test]
    fn translation_round_trips(f in poly(3, 3), p in point(3)) {
        let t = f.translate(&p);
        prop_assert_eq!(t.eval(&vec![rat(0, 1); 3]), f.eval(&p));
        prop_assert_eq!(shifted(&t, &p), f);
    }

    #[test]
    fn gcd_divides_both(f in nonzero_poly(2, 2), g in nonzero_poly(2, 2), h in nonzero_poly(2, 2)) {
        let (a, b) = (&f * &h, &g * &h);
        let d = a.gcd(&b);
        prop_assert!(a.div_exact(&d).is_some());
        prop_assert!(b.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&h).is_some(), "common factor lost");
    }

    #[test]
    fn display_parses_back(f in poly(3, 3)) {
        let names = default_names(3);
        prop_assert_eq!(parse_poly(&f.display_with(&names).to_string(), &names).unwrap(), f);
    }

    #[test]
    fn products_are_ideal_members(f in nonzero_poly(2, 2), g in poly(2, 2)) {
        let i = Ideal::new(2, [f.clone()]).unwrap();
        prop_assert_eq!(i.contains(&(&f * &g), Limits::default()), Membership::Member);
    }

    #[test]
    fn odot_singular_locus_is_intersection(g1 in algebra(2), g2 in algebra(2), p in point(2)) {
        let both = odot(&g1, &g2).unwrap();
        let want = contains_point(&g1, &p).unwrap() && contains_point(&g2, &p).unwrap();
        prop_assert_eq!(contains_point(&both, &p).unwrap(), want);
    }

    #[test]
    fn equivalent_algebras_share_sing_and_order(g in algebra(2), p in point(2), m in 2u32..=3) {
        let gg = diff_closure(&g);
        let in_sing = contains_point(&g, &p).unwrap();
        prop_assert_eq!(contains_point(&gg, &p).unwrap(), in_sing);
        let origin = vec![rat(0, 1); 2];
        for q in [p, origin] {
            if contains_point(&g, &q).unwrap() {
                let o = ord_at(&g, &q).unwrap();
                prop_assert_eq!(ord_at(&veronese(&g, m), &q).unwrap(), o.clone());
                prop_assert_eq!(ord_at(&natural_closure(&g), &q).unwrap(), o.clone());
                prop_assert_eq!(ord_at(&gg, &q).unwrap(), o);
            }
        }
    }

    #[test]
    fn twist_scales_order(g in algebra(2), p in point(2), num in 1i64..=4, den in 1i64..=3) {
        let omega = rat(num, den);
        let tw = twist(&g, &omega).unwrap();
        prop_assert_eq!(&omega * ord_at(&tw, &p).unwrap(), ord_at(&g, &p).unwrap());
    }

    #[test]
    fn weighted_transform_factors_the_total_transform(g in algebra(2)) {
        let c = CenterSpec::point(2);
        prop_assume!(is_permissible(&g, &c));
        for (chart, sub) in blowup_charts(&Chart::root(default_names(2)), &c).unwrap() {
            let h = chart.divisors[0].var;
            let w = weighted_transform(&g, &sub, h).unwrap();
            let total = total_transform(&g, &sub);
            for ((f, n), (t, _)) in w.gens().iter().zip(total.gens()) {
                let mut e = vec![0; 2];
                e[h] = *n;
                prop_assert_eq!(&f.clone() * &Poly::monomial(Monomial::new(e), rat(1, 1)), t.clone());
            }
        }
    }

    #[test]
    fn problem_dump_round_trips(g in algebra(3)) {
        let p = Problem {
            names: default_names(3),
            body: ProblemBody::Algebra(g),
            divisors: Vec::new(),
            points: vec![vec![rat(1, 2), rat(-1, 1), rat(0, 1)]],
        };
        prop_assert_eq!(Problem::parse(&p.dump()).unwrap(), p);
    }
}
