use proptest::prelude::*;
use susyfactor::associated::{assoc_entry, assoc_top_down};
use susyfactor::degenerate::detect;
use susyfactor::exact::{format_rational, frac, parse_rational, rat};
use susyfactor::numeric::Grid;
use susyfactor::principal::{factor_table, ladder_pair, superpotential_w0};
use susyfactor::{Branch, DiffOp, Error, Poly, Problem, QuasiFunction, Rational};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn arb_problem() -> impl Strategy<Value = Problem> {
    (
        arb_rational(),
        arb_rational(),
        arb_rational(),
        arb_rational(),
        arb_rational(),
    )
        .prop_filter_map("p must be nonzero", |(a2, a1, a0, b1, b0)| {
            Problem::new(Poly::new(vec![a0, a1, a2]), Poly::new(vec![b0, b1])).ok()
        })
}

/// `-l q' - l(l-1) p''/2`
fn lambda_closed(prob: &Problem, l: i64) -> Rational {
    -rat(l) * prob.q1() - rat(l * (l - 1)) * prob.p2() / rat(2)
}

proptest! {
    #[test]
    fn rationals_stay_reduced(n in -1000i64..1000, d in 1i64..1000) {
        let r = parse_rational(&format!("{n}/{d}")).unwrap();
        let back = parse_rational(&format_rational(&r)).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert!(*r.denom() > 0.into());
        prop_assert_eq!(num_integer::Integer::gcd(r.numer(), r.denom()), 1.into());
    }

    #[test]
    fn accessors_match_coefficients(prob in arb_problem()) {
        prop_assert_eq!(prob.p2(), prob.p().coeff(2) * rat(2));
        prop_assert_eq!(prob.p1(), prob.p().coeff(1));
        prop_assert_eq!(prob.p0(), prob.p().coeff(0));
        prop_assert_eq!(prob.q1(), prob.q().coeff(1));
        prop_assert_eq!(prob.q0(), prob.q().coeff(0));
    }

    #[test]
    fn table_base_levels(prob in arb_problem()) {
        let minus = factor_table(&prob, Branch::Minus, 0).unwrap();
        prop_assert_eq!(&minus[0].energy, &rat(0));
        prop_assert_eq!(&minus[0].lambda, &rat(0));
        prop_assert!(minus[0].delta.is_none());
        if let Ok(plus) = factor_table(&prob, Branch::Plus, 0) {
            prop_assert_eq!(plus[0].level, -1);
            prop_assert_eq!(&plus[0].energy, &rat(0));
            prop_assert_eq!(&plus[0].lambda, &rat(0));
        }
    }

    #[test]
    fn minus_eigenvalues_match_closed_form(prob in arb_problem(), levels in 0usize..6) {
        match factor_table(&prob, Branch::Minus, levels) {
            Ok(t) => for e in &t {
                prop_assert_eq!(&e.lambda, &lambda_closed(&prob, e.level));
            },
            Err(Error::Breakdown { level, .. }) => {
                // c_{level-1} = ((level-1) p'' + q')/2 vanishes
                let c = (rat(level - 1) * prob.p2() + prob.q1()) / rat(2);
                prop_assert_eq!(c, rat(0));
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn ladder_sum_and_difference(prob in arb_problem(), l in 0i64..5) {
        let Ok(pair) = ladder_pair(&prob, Branch::Minus, l) else { return Ok(()) };
        let w = QuasiFunction::poly(pair.superpotential.scale(&rat(2)));
        let sum = pair.lower.add(&pair.raise, &prob);
        prop_assert!(sum.op_equals(&DiffOp::first_order(QuasiFunction::zero(), w), &prob));
        let diff = pair.lower.sub(&pair.raise, &prob);
        let expect = DiffOp::first_order(
            QuasiFunction::poly(prob.p().scale(&rat(2))),
            QuasiFunction::poly(superpotential_w0(&prob).scale(&rat(-2))),
        );
        prop_assert!(diff.op_equals(&expect, &prob));
    }

    #[test]
    fn association_eigenvalues(prob in arb_problem(), l in 0i64..7, m in 0i64..7) {
        prop_assume!(m <= l);
        for sign in [1, -1] {
            let e = assoc_entry(&prob, l, sign * m).unwrap();
            prop_assert_eq!(&e.lambda_lm, &(lambda_closed(&prob, l) - lambda_closed(&prob, m)));
        }
        prop_assert_eq!(assoc_entry(&prob, l, l).unwrap().lambda_lm, rat(0));
        prop_assert!(assoc_entry(&prob, l, l + 1).is_err());
    }

    #[test]
    fn top_down_degree_and_sign(prob in arb_problem(), l in 0i64..6, m in 0i64..6) {
        prop_assume!(m <= l && !prob.is_constant_p());
        // a repeated eigenvalue below l lowers the degree
        prop_assume!((0..l).all(|k| lambda_closed(&prob, k) != lambda_closed(&prob, l)));
        let pos = assoc_top_down(&prob, l, m).unwrap();
        let neg = assoc_top_down(&prob, l, -m).unwrap();
        if let Some(part) = pos.polynomial_part(&prob) {
            if !part.is_zero() {
                prop_assert_eq!(part.degree(), Some((l - m) as usize));
            }
        }
        if !pos.value.is_zero() {
            let sign = if m % 2 == 0 { rat(1) } else { rat(-1) };
            prop_assert_eq!(neg.value.ratio_to(&pos.value, &prob), Some(sign));
        }
    }

    #[test]
    fn degeneracy_needs_positive_constant_p(prob in arb_problem()) {
        let d = detect(&prob);
        let expect = prob.p().degree() == Some(0) && prob.p0() > rat(0);
        prop_assert_eq!(d.is_degenerate, expect);
    }

    #[test]
    fn grids_are_strictly_increasing(mut nodes in prop::collection::vec(-10.0f64..10.0, 3..20)) {
        let increasing = nodes.windows(2).all(|w| w[0] < w[1]);
        prop_assert_eq!(Grid::from_nodes(nodes.clone()).is_ok(), increasing);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        if nodes.len() >= 3 {
            prop_assert!(Grid::from_nodes(nodes).is_ok());
        }
    }
}
