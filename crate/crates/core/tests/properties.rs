use polarline::generators::gen_random;
use polarline::io::{parse_metric, parse_profile, write_metric, write_profile};
use polarline::{
    check_consistency, distortion_fixed, optimal_bruteforce, optimal_utilitarian, order_alternatives, social_cost,
    ConsistencyMode, Objective, RuleId, Scalar,
};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..25, 1usize..9, any::<u64>()).prop_flat_map(|(n, m, seed)| (Just(n), Just(m), 1..=m, Just(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_profiles_are_strictly_consistent((n, m, k, seed) in instance()) {
        let (e, d) = gen_random(n, m, k, seed).unwrap();
        prop_assert!(check_consistency(&e, &d, ConsistencyMode::Strict).unwrap());
    }

    #[test]
    fn files_round_trip((n, m, k, seed) in instance()) {
        let (e, d) = gen_random(n, m, k, seed).unwrap();
        prop_assert_eq!(parse_profile(&write_profile(&e)).unwrap(), e);
        prop_assert_eq!(parse_metric(&write_metric(&d)).unwrap(), d);
    }

    #[test]
    fn fast_optimum_matches_enumeration((n, m, k, seed) in instance()) {
        let (e, d) = gen_random(n, m, k, seed).unwrap();
        let fast = optimal_utilitarian(&e, &d).unwrap();
        let brute = optimal_bruteforce(&e, &d, Objective::UtilitarianAdditive, u64::MAX).unwrap();
        prop_assert_eq!(fast.cost, brute.cost);
    }

    #[test]
    fn recovered_order_is_positional_up_to_reversal((n, m, seed) in (1usize..25, 1usize..9, any::<u64>())) {
        let (e, d) = gen_random(n, m, 1, seed).unwrap();
        let order = order_alternatives(&e).unwrap();
        let truth: Vec<String> = d.positional_order().into_iter().filter(|id| order.position(id).is_some()).collect();
        prop_assert!(order.same_up_to_reversal(&truth));
    }

    #[test]
    fn rule_outputs_never_beat_the_optimum((n, m, seed) in (1usize..25, 2usize..9, any::<u64>())) {
        let (e, d) = gen_random(n, m, 2, seed).unwrap();
        for rule in [RuleId::PolarK2, RuleId::PolarGeneral] {
            let s = rule.apply(&e).unwrap();
            let r = distortion_fixed(&e, &d, &s, Objective::UtilitarianAdditive).unwrap();
            prop_assert!(r.ratio >= Scalar::one());
            prop_assert_eq!(social_cost(&d, &s, Objective::UtilitarianAdditive).unwrap(), r.chosen_cost);
        }
    }
}
