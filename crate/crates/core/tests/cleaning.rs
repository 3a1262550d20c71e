use chainlens::cleaning::{impute_max_supply, impute_mean, max_normalize, mean_normalize, FeatureTable};
use chainlens::scalar::{mean, population_std};
use proptest::prelude::*;

fn table(values: Vec<Option<f64>>) -> FeatureTable<f64> {
    let ids = (0..values.len()).map(|i| i.to_string()).collect();
    FeatureTable::new(ids).with_column("v", values).unwrap()
}

fn column_with_gaps() -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.7, -1e6f64..1e6), 1..60)
        .prop_filter("needs a present value", |v| v.iter().any(Option::is_some))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn impute_mean_idempotent_and_mean_preserving(values in column_with_gaps()) {
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let once = impute_mean(&table(values.clone()), &["v"]).unwrap();
        let twice = impute_mean(&once, &["v"]).unwrap();
        prop_assert_eq!(&once, &twice);
        let filled = once.dense("v").unwrap();
        let before = mean(&present).unwrap();
        let after = mean(&filled).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.abs().max(1.0));
        for (orig, new) in values.iter().zip(&filled) {
            if let Some(o) = orig {
                prop_assert_eq!(o, new);
            }
        }
    }

    #[test]
    fn mean_normalize_post_conditions(values in prop::collection::vec(-1e3f64..1e3, 2..80)) {
        prop_assume!(population_std(&values).unwrap() > 1e-6);
        let z = mean_normalize(&values).unwrap();
        prop_assert!(mean(&z).unwrap().abs() <= 1e-12);
        prop_assert!((population_std(&z).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn max_normalize_post_conditions(values in prop::collection::vec(0.0f64..1e9, 1..80)) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let m = max_normalize(&values).unwrap();
        prop_assert_eq!(m.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
        prop_assert!(m.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}

fn fill(values: Vec<Option<f64>>) -> Vec<f64> {
    let ids = (0..values.len()).map(|i| i.to_string()).collect();
    let t = FeatureTable::new(ids).with_column("max_supply", values).unwrap();
    impute_max_supply(&t).unwrap().dense("max_supply").unwrap()
}

#[test]
fn max_supply_rule_examples() {
    assert_eq!(fill(vec![Some(100.0), None, Some(50.0)]), vec![100.0, 100_000.0, 50.0]);
    assert_eq!(fill(vec![None, Some(1.0)]), vec![1000.0, 1.0]);
    assert_eq!(fill(vec![Some(3.0), Some(2.5), Some(7.0)]), vec![3.0, 2.5, 7.0]);
}
