use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use satscale::gen::{
    configuration_model, generate, prune_exact_cover, sample_truncated_poisson_degrees, truncated_poisson_rate, GenConfig,
};
use satscale::rng::stream;
use satscale::{Family, ModelSpec};

/// Root of λ(1 − e^{−λ}) / (1 − e^{−λ} − λe^{−λ}) = 3, by bisection on the
/// closed form.
fn lambda_oracle() -> f64 {
    let mean = |l: f64| l * (1.0 - (-l).exp()) / (1.0 - (-l).exp() - l * (-l).exp());
    let (mut lo, mut hi) = (0.5, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < 3.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn truncated_pmf(lambda: f64, k: u32) -> f64 {
    let log_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    let p = (-lambda + k as f64 * lambda.ln() - log_fact).exp();
    p / (1.0 - (-lambda).exp() * (1.0 + lambda))
}

#[test]
fn rate_for_mean_three() {
    let oracle = lambda_oracle();
    assert!((oracle - 2.14913).abs() < 5e-6, "{oracle}");
    assert!((truncated_poisson_rate(3.0) - oracle).abs() < 1e-9);
}

#[test]
fn degrees_follow_truncated_poisson() {
    let n = 20_000;
    let lambda = lambda_oracle();
    let seq = sample_truncated_poisson_degrees(n, 3 * n, &mut stream(11, &[]), 1_000_000).unwrap();
    let mut observed = [0usize; 6];
    for &d in &seq.degrees {
        observed[(d - 2).min(5)] += 1;
    }
    let mut expected: Vec<f64> = (2..7).map(|k| n as f64 * truncated_pmf(lambda, k)).collect();
    expected.push(n as f64 - expected.iter().sum::<f64>());
    let chi2: f64 = observed.iter().zip(&expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    // 99.9% point of chi-square with 5 degrees of freedom
    assert!(chi2 < 20.515, "chi2 = {chi2}, observed {observed:?}, expected {expected:?}");
}

#[test]
fn large_degree_sequence_has_mean_three() {
    let n = 100_000;
    let seq = sample_truncated_poisson_degrees(n, 3 * n, &mut stream(5, &[]), 1_000_000).unwrap();
    let mean = seq.degrees.iter().sum::<usize>() as f64 / n as f64;
    assert!((mean - 3.0).abs() <= 0.01);
    assert!(seq.degrees.iter().all(|&d| d >= 2));
}

#[test]
fn threshold_instances_have_family_shape() {
    for family in Family::ALL {
        for n in [24, 64, 128] {
            let spec = ModelSpec::at_threshold(family, n).unwrap();
            let inst = generate(&spec, &mut stream(3, &[n as u64]), &GenConfig::default()).unwrap();
            inst.validate().unwrap();
            let mut degree = vec![0usize; inst.n_vars];
            inst.clauses.iter().flat_map(|c| &c.vars).for_each(|&v| degree[v as usize] += 1);
            match family {
                Family::Unlocked1in3 => assert!(inst.n_vars <= n),
                Family::Xorsat3Reg => assert!(degree.iter().all(|&d| d == 3)),
                _ => {
                    assert_eq!(inst.clauses.len(), spec.n_clauses);
                    assert_eq!(degree.iter().sum::<usize>(), spec.n_clauses * family.arity());
                    assert!(degree.iter().all(|&d| d >= 2), "{family}");
                }
            }
            assert!(inst.clauses.iter().all(|c| !c.parity));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configuration_model_respects_degrees(seed in any::<u64>(), extra in proptest::collection::vec(0usize..4, 6..30)) {
        let arity = 3;
        let mut degrees: Vec<usize> = extra.iter().map(|e| 2 + e).collect();
        while degrees.iter().sum::<usize>() % arity != 0 {
            degrees[0] += 1;
        }
        if let Ok(groups) = configuration_model(&degrees, arity, &mut stream(seed, &[]), 10_000) {
            prop_assert_eq!(groups.len() * arity, degrees.iter().sum::<usize>());
            let mut seen = vec![0usize; degrees.len()];
            for g in &groups {
                prop_assert_eq!(g.len(), arity);
                for (i, v) in g.iter().enumerate() {
                    prop_assert!(!g[..i].contains(v));
                    seen[*v as usize] += 1;
                }
            }
            prop_assert_eq!(seen, degrees);
        }
    }

    #[test]
    fn pruning_reaches_an_order_free_fixed_point(seed in any::<u64>(), n in 6usize..30, m in 1usize..30) {
        let mut rng = stream(seed, &[]);
        let vars: Vec<u32> = (0..n as u32).collect();
        let mut clauses: Vec<[u32; 3]> = (0..m)
            .map(|_| {
                let pick: Vec<u32> = vars.choose_multiple(&mut rng, 3).copied().collect();
                [pick[0], pick[1], pick[2]]
            })
            .collect();
        let pruned = prune_exact_cover(n, &clauses);
        let mut degree = vec![0usize; pruned.n_vars];
        pruned.clauses.iter().flat_map(|c| &c.vars).for_each(|&v| degree[v as usize] += 1);
        prop_assert!(degree.iter().all(|&d| d >= 1));
        for c in &pruned.clauses {
            prop_assert!(c.vars.iter().filter(|&&v| degree[v as usize] >= 2).count() >= 2);
        }
        let again: Vec<[u32; 3]> = pruned.clauses.iter().map(|c| [c.vars[0], c.vars[1], c.vars[2]]).collect();
        prop_assert_eq!(prune_exact_cover(pruned.n_vars, &again), pruned.clone());

        clauses.shuffle(&mut rng);
        let mut a: Vec<_> = pruned.clauses.clone();
        let mut b: Vec<_> = prune_exact_cover(n, &clauses).clauses;
        a.sort_by(|x, y| x.vars.cmp(&y.vars));
        b.sort_by(|x, y| x.vars.cmp(&y.vars));
        prop_assert_eq!(a, b);
    }
}
