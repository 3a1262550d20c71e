use chainlens::correlation::{
    average_ranks, correlate, interpret, kendall_tau_b, pearson, spearman, CorrelationMethod, Strength,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// O(n^2) tau-b straight from the pair counts.
fn kendall_brute(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut conc, mut disc, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).signum() as i64 * i64::from(x[i] != x[j]);
            let dy = (y[i] - y[j]).signum() as i64 * i64::from(y[i] != y[j]);
            if dx == 0 {
                tx += 1;
            }
            if dy == 0 {
                ty += 1;
            }
            match dx * dy {
                1 => conc += 1,
                -1 => disc += 1,
                _ => {}
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    (conc - disc) as f64 / (((n0 - tx) as f64) * ((n0 - ty) as f64)).sqrt()
}

/// Midrank by counting: 1 + #below + (#equal - 1) / 2.
fn midranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let below = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            1.0 + below + (equal - 1.0) / 2.0
        })
        .collect()
}

fn textbook_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn nonconstant(v: &[f64]) -> bool {
    v.iter().any(|&a| a != v[0])
}

fn tied_pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..200).prop_flat_map(|n| {
        (
            prop::collection::vec((0i32..12).prop_map(f64::from), n),
            prop::collection::vec((-5i32..6).prop_map(f64::from), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn kendall_matches_brute_force((x, y) in tied_pairs()) {
        prop_assume!(nonconstant(&x) && nonconstant(&y));
        let fast = kendall_tau_b(&x, &y).unwrap();
        prop_assert!((fast - kendall_brute(&x, &y)).abs() <= 1e-12);
    }

    #[test]
    fn spearman_is_pearson_of_midranks((x, y) in tied_pairs()) {
        prop_assume!(nonconstant(&x) && nonconstant(&y));
        let expect = textbook_pearson(&midranks(&x), &midranks(&y));
        prop_assert!((spearman(&x, &y).unwrap() - expect).abs() <= 1e-12);
    }

    #[test]
    fn coefficients_bounded_and_symmetric((x, y) in tied_pairs()) {
        prop_assume!(nonconstant(&x) && nonconstant(&y));
        for m in CorrelationMethod::ALL {
            let a = correlate(m, &x.iter().map(|&v| Some(v)).collect::<Vec<_>>(), &y.iter().map(|&v| Some(v)).collect::<Vec<_>>()).unwrap();
            let b = correlate(m, &y.iter().map(|&v| Some(v)).collect::<Vec<_>>(), &x.iter().map(|&v| Some(v)).collect::<Vec<_>>()).unwrap();
            prop_assert!((-1.0..=1.0).contains(&a));
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn rank_methods_invariant_under_monotone_maps((x, y) in tied_pairs()) {
        prop_assume!(nonconstant(&x) && nonconstant(&y));
        let fx: Vec<f64> = x.iter().map(|v| (v * 0.3).exp() + 7.0).collect();
        prop_assert_eq!(kendall_tau_b(&x, &y).unwrap(), kendall_tau_b(&fx, &y).unwrap());
        prop_assert!((spearman(&x, &y).unwrap() - spearman(&fx, &y).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn ranks_sum_to_triangular(x in prop::collection::vec(-3i32..3, 1..100)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let n = x.len() as f64;
        prop_assert_eq!(average_ranks(&x).iter().sum::<f64>(), n * (n + 1.0) / 2.0);
        prop_assert_eq!(average_ranks(&x), midranks(&x));
    }
}

#[test]
fn continuous_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let n = rng.random_range(2..200);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.random::<f64>() * 0.5).collect();
        assert!((kendall_tau_b(&x, &y).unwrap() - kendall_brute(&x, &y)).abs() <= 1e-12);
        assert!((pearson(&x, &y).unwrap() - textbook_pearson(&x, &y)).abs() <= 1e-12);
    }
}

#[test]
fn pairwise_deletion() {
    let x = [Some(1.0), None, Some(3.0), Some(4.0)];
    let y = [Some(2.0), Some(9.0), None, Some(8.0)];
    assert_eq!(correlate(CorrelationMethod::Pearson, &x, &y).unwrap(), 1.0);
    assert!(correlate(CorrelationMethod::Pearson, &x[..3], &y[..3]).is_err());
}

#[test]
fn narrated_values_fall_in_their_bands() {
    for (value, strength) in [(-0.63634, Strength::Strong), (-0.63254, Strength::Strong), (0.40029, Strength::Medium)] {
        assert_eq!(interpret(value).unwrap().strength, strength);
    }
    assert_eq!(interpret(-0.63634).unwrap().to_string(), "strong (negative)");
    assert_eq!(interpret(0.4).unwrap().strength, Strength::Medium);
    assert_eq!(interpret(0.39999).unwrap().strength, Strength::Weak);
    assert_eq!(interpret(1.0).unwrap().strength, Strength::VeryStrong);
}
