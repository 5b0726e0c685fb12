use proptest::prelude::*;

use tnorm_core::rearrangement::aggregate;
use tnorm_core::{
    make_operator, parse_operator_spec, render, standard_dual, tnorm_from_generator, Family,
    FamilyId, Generator, Operator,
};

fn catalog_operator() -> impl Strategy<Value = Operator> {
    let ids: Vec<(FamilyId, Option<f64>)> = FamilyId::all()
        .flat_map(|id| id.family.sampled_alphas().into_iter().map(move |a| (id, a)))
        .collect();
    proptest::sample::select(ids).prop_map(|(id, a)| make_operator(id, a).unwrap())
}

fn spec_text() -> impl Strategy<Value = String> {
    let leaf = proptest::sample::select(vec![
        "product",
        "minimum",
        "lukasiewicz",
        "frank:2",
        "yager:5",
        "gumbel:2",
        "joe:1",
        "clayton:-1",
        "sugeno_weber:0",
        "ali_mikhail_haq:1.5",
        "dubois_prade:0.25",
        "gen(nlog)",
        "gen(yager:3)",
    ])
    .prop_map(str::to_string);
    let norm = leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), 0.05f64..0.45).prop_map(|(s, a)| format!("ordinal({s}@0-{a})")),
            (0.0f64..1.0, inner.clone(), inner).prop_map(|(w, a, b)| format!("blend({w},{a},{b})")),
        ]
    });
    prop_oneof![
        norm.clone(),
        norm.clone().prop_map(|s| format!("dual({s})")),
        (0.0f64..1.0, norm.clone(), norm)
            .prop_map(|(w, a, b)| format!("blend({w},dual({a}),dual({b}))")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn catalog_values_stay_in_range_and_commute(op in catalog_operator(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let v = op.eval(x, y);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((v - op.eval(y, x)).abs() <= 1e-9);
    }

    #[test]
    fn double_dual_is_identity(op in catalog_operator(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let dd = standard_dual(&standard_dual(&op));
        prop_assert!((dd.eval(x, y) - op.eval(x, y)).abs() <= 1e-9);
    }

    #[test]
    fn aggregate_ignores_order(op in catalog_operator(), values in prop::collection::vec(0.0f64..=1.0, 1..7), seed in any::<u64>()) {
        let mut shuffled = values.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = aggregate(&op, &values).unwrap();
        let b = aggregate(&op, &shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn pseudo_inverse_is_nonincreasing(alpha in 1.0f64..6.0, s in 0.0f64..4.0, t in 0.0f64..4.0) {
        for gen in [Generator::lukasiewicz(), Generator::neg_log(), Generator::yager(alpha).unwrap()] {
            let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
            prop_assert!(gen.pseudo_inverse(lo).unwrap().get() >= gen.pseudo_inverse(hi).unwrap().get());
        }
    }

    #[test]
    fn generated_norm_vanishes_past_the_generator_height(x in 0.0f64..=1.0, y in 0.0f64..=1.0, alpha in 1.0f64..4.0) {
        for gen in [Generator::lukasiewicz(), Generator::yager(alpha).unwrap()] {
            let v = tnorm_from_generator(&gen).eval(x, y);
            prop_assert!((0.0..=1.0).contains(&v));
            if gen.mu(x) + gen.mu(y) >= gen.mu_at_zero() {
                prop_assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn rendered_specs_parse_back_to_the_same_operator(text in spec_text()) {
        let op = parse_operator_spec(&text).unwrap();
        let back = parse_operator_spec(&render(&op)).unwrap();
        for i in 0..33 {
            for j in 0..33 {
                let (x, y) = (i as f64 / 32.0, j as f64 / 32.0);
                prop_assert_eq!(op.eval(x, y).to_bits(), back.eval(x, y).to_bits());
            }
        }
    }
}

#[test]
fn product_family_generator_matches_closed_form() {
    let p = make_operator(FamilyId::norm(Family::Product), None).unwrap();
    let g = tnorm_from_generator(&Generator::neg_log());
    for i in 1..=64 {
        let x = i as f64 / 64.0;
        assert!((g.eval(x, 0.37) - p.eval(x, 0.37)).abs() <= 1e-9);
    }
}
