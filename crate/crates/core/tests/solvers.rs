use proptest::prelude::*;
use satscale::cnf::encode_instance;
use satscale::exact::{brute_force_count, dpll_count_upto2, gf2_solve, CountClass, Gf2System};
use satscale::gen::{check_usa, generate, GenConfig, UsaCheck};
use satscale::rng::stream;
use satscale::{CnfFormula, Family, Literal, ModelSpec};

fn arb_cnf() -> impl Strategy<Value = CnfFormula> {
    (1usize..12).prop_flat_map(|n| {
        let clause = (proptest::sample::subsequence((0..n as u32).collect::<Vec<_>>(), 1..=n.min(3)), any::<[bool; 3]>())
            .prop_map(|(vars, signs)| vars.iter().zip(signs).map(|(&v, neg)| Literal::new(v, neg)).collect());
        proptest::collection::vec(clause, 0..40)
            .prop_map(move |clauses| CnfFormula::new(n, clauses).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dpll_matches_brute_force(f in arb_cnf()) {
        let outcome = dpll_count_upto2(&f, u64::MAX);
        let o = outcome.outcome().unwrap();
        prop_assert_eq!(o.count_class, CountClass::from_count(brute_force_count(&f, 2).unwrap()));
        for w in o.witness.iter().chain(&o.second_witness) {
            prop_assert!(f.is_satisfied_by(w));
        }
        if let (Some(a), Some(b)) = (&o.witness, &o.second_witness) {
            prop_assert_ne!(a, b);
        }
    }

    #[test]
    fn gf2_matches_cnf_counting(seed in any::<u64>(), n in 4usize..18, poisson in any::<bool>()) {
        let family = if poisson { Family::XorsatPoisson } else { Family::Xorsat3Reg };
        let spec = ModelSpec::at_threshold(family, n).unwrap();
        let cfg = GenConfig { raw_parity: true, ..GenConfig::default() };
        let Ok(inst) = generate(&spec, &mut stream(seed, &[]), &cfg) else { return Ok(()) };
        let formula = encode_instance(&inst);
        let gf2 = gf2_solve(&Gf2System::from_instance(&inst));
        let brute = CountClass::from_count(brute_force_count(&formula, 2).unwrap());
        prop_assert_eq!(gf2.count_class(), brute);
        prop_assert_eq!(dpll_count_upto2(&formula, u64::MAX).count_class(), Some(brute));
        if let Some(total) = gf2.solution_count() {
            prop_assert_eq!(total.min(2) as u64, brute_force_count(&formula, 2).unwrap());
        }
    }
}

#[test]
fn usa_witness_is_the_only_model() {
    let mut kept = 0;
    for family in [Family::Unlocked1in3, Family::Locked1in3, Family::Locked2in4, Family::XorsatPoisson] {
        for i in 0..40u64 {
            let spec = ModelSpec::at_threshold(family, 16).unwrap();
            let Ok(inst) = generate(&spec, &mut stream(9, &[family.stream_label(), i]), &GenConfig::default()) else {
                continue;
            };
            if let UsaCheck::Unique(w) = check_usa(&inst, u64::MAX) {
                kept += 1;
                assert!(inst.is_satisfied_by(&w));
                let models = brute_force_count(&encode_instance(&inst), 3).unwrap();
                let expected = if family.has_global_flip_symmetry() { 2 } else { 1 };
                assert_eq!(models, expected, "{family} #{i}");
            }
        }
    }
    assert!(kept > 0);
}
