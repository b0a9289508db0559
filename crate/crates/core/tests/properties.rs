use critnet::{
    build_basis, build_hamiltonian, effective_threshold, energy_of_number_state, enumerate_patterns, overlap_sq,
    parse_model, pattern_count, solve_critical_split, write_model, BigRational, ClassicalPattern, Complex,
    EnumerateOptions, ExactModel, Model, Scalar, SolveOptions,
};
use proptest::prelude::*;

fn q(text: &str) -> BigRational {
    BigRational::parse_literal(text).unwrap()
}

/// Rational model with integer thresholds and weights in thousandths.
fn exact_model() -> impl Strategy<Value = ExactModel> {
    (2usize..=4).prop_flat_map(|n| {
        (proptest::collection::vec(1u32..=20, n), proptest::collection::vec(0u32..=5, n * (n - 1) / 2)).prop_map(
            move |(eps, upper)| {
                let mut w = vec![vec![q("0"); n]; n];
                let mut it = upper.iter();
                for j in 0..n {
                    for k in j + 1..n {
                        let v = q(&format!("{}/1000", it.next().unwrap()));
                        w[j][k] = v.clone();
                        w[k][j] = v;
                    }
                }
                ExactModel::new(eps.iter().map(|e| q(&e.to_string())).collect(), w).unwrap()
            },
        )
    })
}

fn pattern(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len)
}

fn classical(parts: &[(f64, f64)]) -> ClassicalPattern<f64> {
    ClassicalPattern::new(parts.iter().map(|&(re, im)| Complex::new(re, im)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn model_file_round_trip(model in exact_model()) {
        let text = write_model(&model);
        prop_assert_eq!(parse_model::<BigRational>(&text).unwrap(), model);
    }

    #[test]
    fn raising_one_level_costs_the_effective_threshold(
        model in exact_model(),
        levels in proptest::collection::vec(0u32..=6, 4),
        mode in 0usize..4,
    ) {
        let n = model.n();
        let mode = mode % n;
        let y: Vec<BigRational> = levels[..n].iter().map(|l| q(&l.to_string())).collect();
        let mut raised = y.clone();
        raised[mode] = raised[mode].clone() + q("1");
        let step = energy_of_number_state(&model, &raised).unwrap() - energy_of_number_state(&model, &y).unwrap();
        prop_assert_eq!(step, effective_threshold(&model, &y, mode).unwrap());
    }

    #[test]
    fn feasible_splits_close_gaps_exactly(model in exact_model()) {
        let n = model.n();
        let gapless: Vec<usize> = (1..n).collect();
        if let Ok(s) = solve_critical_split(&model, &gapless, &SolveOptions::default()) {
            let y = s.reference_occupations();
            for &j in &gapless {
                prop_assert_eq!(effective_threshold(&model, &y, j).unwrap(), q("0"));
            }
            prop_assert!(s.xi.iter().all(|x| *x >= q("0")));
        }
    }

    #[test]
    fn pattern_counts_grow_with_budget_and_level(model in exact_model(), b1 in 0u32..40, b2 in 0u32..40, d in 1u32..4) {
        let n = model.n();
        let gapless: Vec<usize> = (n / 2..n).collect();
        let mut w = vec![vec![q("0"); n]; n];
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    w[j][k] = q("1/1000");
                }
            }
        }
        // Split on a uniform model of the same size so a critical state exists.
        let uniform = ExactModel::new(vec![q("1"); n], w).unwrap();
        let model = if solve_critical_split(&model, &gapless, &SolveOptions::default()).is_ok() { model } else { uniform };
        let Ok(s) = solve_critical_split(&model, &gapless, &SolveOptions::default()) else { return Ok(()) };
        let opts = EnumerateOptions::default();
        let count = |level: u32, budget: u32| {
            enumerate_patterns(&model, &s, level, q(&format!("{budget}/1000")), &opts).unwrap().count.unwrap()
        };
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        prop_assert!(count(d, lo) <= count(d, hi));
        prop_assert!(count(d, hi) <= count(d + 1, hi));
        prop_assert!(count(d, hi) <= pattern_count(gapless.len(), d));
        let everything = enumerate_patterns(&model, &s, d, q("1000000"), &opts).unwrap();
        prop_assert_eq!(everything.count.unwrap(), pattern_count(gapless.len(), d));
    }

    #[test]
    fn hamiltonian_is_hermitian(
        eps in proptest::collection::vec(0.5f64..2.0, 2),
        w in 0.0f64..0.05,
        coupling in 0.0f64..0.5,
        input_gap in 0.0f64..0.5,
    ) {
        let model = Model::new(eps, vec![vec![0.0, w], vec![w, 0.0]]).unwrap().with_input_layer(coupling, input_gap).unwrap();
        let basis = build_basis(4, &[3, 3, 3, 3]).unwrap();
        let h = build_hamiltonian(&model, &basis).unwrap();
        prop_assert!(h.hermiticity_defect() <= 1e-14);
        for (i, d) in h.diagonal().iter().enumerate() {
            let s = basis.state(i);
            let y: Vec<f64> = s[..2].iter().map(|&v| v as f64).collect();
            let x: f64 = s[2..].iter().map(|&v| v as f64).sum();
            let expected = energy_of_number_state(&model, &y).unwrap() + input_gap * x;
            prop_assert!((d.re - expected).abs() <= 1e-12 && d.im == 0.0);
        }
    }

    #[test]
    fn overlap_is_symmetric_and_multiplicative(a in pattern(3), b in pattern(3), c in pattern(2), d in pattern(2)) {
        let (pa, pb) = (classical(&a), classical(&b));
        let ab = overlap_sq(&pa, &pb).unwrap();
        prop_assert!((ab - overlap_sq(&pb, &pa).unwrap()).abs() <= 1e-15);
        prop_assert!((overlap_sq(&pa, &pa).unwrap() - 1.0).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&ab));
        let cd = overlap_sq(&classical(&c), &classical(&d)).unwrap();
        let joined = overlap_sq(&classical(&[a, c].concat()), &classical(&[b, d].concat())).unwrap();
        prop_assert!((joined - ab * cd).abs() <= 1e-12 * joined.max(1e-300) + 1e-300);
    }
}
