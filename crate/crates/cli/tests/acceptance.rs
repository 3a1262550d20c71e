//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chainlens::classify::models::{logistic_gradient, logistic_loss};
use chainlens::classify::{evaluate, fit, fit_majority, train_test_split, ClassifierKind, ConfusionCounts, ConstantClassifier};
use chainlens::cleaning::{impute_max_supply, impute_mean, max_normalize, mean_normalize, FeatureTable};
use chainlens::cluster::{adjusted_rand_index, elbow, kmeans_fit, kmeans_runs, KMeansConfig, DEFAULT_K_MAX};
use chainlens::correlation::{interpret, kendall_tau_b, spearman, Strength};
use chainlens::survival::{lifetimes, pareto, survival_summary, ParetoFilter, DEFAULT_BUCKET_WIDTH_DAYS};
use chainlens::synthetic::{blobs, generate_synthetic, separable_rows, SyntheticSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---- independent oracles ----

fn brute_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut n0) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            n0 += 1;
            let dx = (x[i] - x[j]).signum() as i64 * i64::from(x[i] != x[j]);
            let dy = (y[i] - y[j]).signum() as i64 * i64::from(y[i] != y[j]);
            s += dx * dy;
            tx += i64::from(dx == 0);
            ty += i64::from(dy == 0);
        }
    }
    let denom = ((n0 - tx) as f64 * (n0 - ty) as f64).sqrt();
    (denom > 0.0).then(|| s as f64 / denom)
}

fn midranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let below = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn plain_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // a third of the vectors draw from few distinct values so ties are common
    match rng.random_range(0..3) {
        0 => (0..n).map(|_| rng.random_range(0..5) as f64).collect(),
        1 => (0..n).map(|_| (rng.random_range(-3.0..3.0f64) * 4.0).round()).collect(),
        _ => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}

// ---- criteria ----

fn c1_rank_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_k, mut worst_s, mut compared) = (0.0f64, 0.0f64, 0);
    for _ in 0..1000 {
        let n = rng.random_range(2..=200);
        let x = random_vector(&mut rng, n);
        let y = random_vector(&mut rng, n);
        match (brute_tau_b(&x, &y), kendall_tau_b(&x, &y)) {
            (Some(b), Ok(f)) => worst_k = worst_k.max((b - f).abs()),
            (None, Err(_)) => {}
            (b, f) => return Err(format!("kendall definedness differs at n={n}: {b:?} vs {f:?}")),
        }
        match (plain_pearson(&midranks(&x), &midranks(&y)), spearman(&x, &y)) {
            (Some(b), Ok(f)) => worst_s = worst_s.max((b - f).abs()),
            (None, Err(_)) => {}
            (b, f) => return Err(format!("spearman definedness differs at n={n}: {b:?} vs {f:?}")),
        }
        compared += 1;
    }
    let t = start.elapsed();
    ensure(worst_k <= 1e-12, format!("kendall max |diff| {worst_k:e} > 1e-12"))?;
    ensure(worst_s <= 1e-12, format!("spearman max |diff| {worst_s:e} > 1e-12"))?;
    ensure(t < Duration::from_secs(60), format!("took {t:?}"))?;
    Ok(format!(
        "{compared} vectors, kendall max diff {worst_k:.1e}, spearman max diff {worst_s:.1e}, {:.2}s",
        t.as_secs_f64()
    ))
}

fn c2_kendall_performance() -> Check {
    let n = 1_000_000;
    let rho = std::f64::consts::FRAC_1_SQRT_2; // tau = 2/pi * asin(rho) = 0.5
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = unit.sample(&mut rng);
        let b: f64 = rho * a + (1.0 - rho * rho).sqrt() * unit.sample(&mut rng);
        // rounding leaves plenty of ties
        x.push((a * 1000.0).round() / 1000.0);
        y.push((b * 1000.0).round() / 1000.0);
    }
    let start = Instant::now();
    let tau = kendall_tau_b(&x, &y).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let idx: Vec<usize> = (0..3000).map(|_| rng.random_range(0..n)).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let sub = brute_tau_b(&xs, &ys).ok_or("subsample undefined")?;
    let band = |c: f64| interpret(c).map(|i| i.strength).map_err(|e| e.to_string());
    ensure(t < Duration::from_secs(10), format!("took {t:?}"))?;
    ensure(tau.signum() == sub.signum(), format!("sign differs: {tau} vs {sub}"))?;
    ensure(band(tau)? == band(sub)?, format!("band differs: {tau} vs {sub}"))?;
    Ok(format!("n=1e6 tau={tau:.5} in {:.2}s, subsample(3000) tau={sub:.5}", t.as_secs_f64()))
}

fn c3_bands() -> Check {
    let cases = [(-0.63634, Strength::Strong), (-0.63254, Strength::Strong), (0.40029, Strength::Medium)];
    let mut got = Vec::new();
    for (c, want) in cases {
        let i = interpret(c).map_err(|e| e.to_string())?;
        ensure(i.strength == want, format!("{c} -> {i}"))?;
        got.push(format!("{c} -> {i}"));
    }
    Ok(got.join(", "))
}

fn c4_clustering() -> Check {
    let start = Instant::now();
    let (mut hits, mut min_ari, mut traces) = (0, f64::INFINITY, 0usize);
    for seed in 0..10u64 {
        let (pts, truth) = blobs(5, 40, 2, 10.0, 1.0, seed).map_err(|e| e.to_string())?;
        let curve = elbow(&pts, 1, DEFAULT_K_MAX, seed, 10).map_err(|e| e.to_string())?;
        if curve.chosen_k == 5 {
            hits += 1;
        }
        let model = kmeans_fit(&pts, curve.chosen_k, seed, 10).map_err(|e| e.to_string())?;
        min_ari = min_ari.min(adjusted_rand_index(&model.assignments, &truth));
        for k in 1..=DEFAULT_K_MAX {
            let runs = kmeans_runs(&pts, k, seed, &KMeansConfig::default()).map_err(|e| e.to_string())?;
            for run in runs {
                traces += 1;
                for w in run.wcss_trace.windows(2) {
                    ensure(w[1] <= w[0] * (1.0 + 1e-12), format!("wcss rose {} -> {} (k={k})", w[0], w[1]))?;
                }
            }
        }
    }
    let t = start.elapsed();
    ensure(hits >= 9, format!("elbow chose 5 in {hits}/10 seeds"))?;
    ensure(min_ari >= 0.95, format!("min ARI {min_ari}"))?;
    ensure(t < Duration::from_secs(30), format!("took {t:?}"))?;
    Ok(format!(
        "k=5 in {hits}/10 seeds, min ARI {min_ari:.4}, {traces} Lloyd runs monotone, {:.2}s",
        t.as_secs_f64()
    ))
}

fn c5_classification() -> Check {
    let rows = separable_rows(10_000, 0.2, 7, 2.0, 5).map_err(|e| e.to_string())?;
    let (train, test) = train_test_split(&rows, 0.8, 5).map_err(|e| e.to_string())?;
    let truth: Vec<u8> = test.iter().map(|r| r.label).collect();
    let knn = fit(&ClassifierKind::Knn.default_spec(), &train, 0).map_err(|e| e.to_string())?;
    let k = evaluate(&knn.predict_rows(&test).map_err(|e| e.to_string())?, &truth).map_err(|e| e.to_string())?;
    let base = fit_majority(&train).map_err(|e| e.to_string())?;
    let b = evaluate(&base.predict_rows(&test).map_err(|e| e.to_string())?, &truth).map_err(|e| e.to_string())?;
    ensure(k.f1 >= 0.95, format!("knn f1 {}", k.f1))?;
    ensure(k.f1 > b.f1 && b.f1 == 0.0, format!("baseline f1 {}", b.f1))?;

    let negative = ConstantClassifier { label: 0 };
    let preds: Vec<u8> = test.iter().map(|_| negative.label).collect();
    let c = evaluate(&preds, &truth).map_err(|e| e.to_string())?;
    ensure(
        c.precision == 0.0 && c.recall == 0.0 && c.f1 == 0.0 && c.accuracy > 0.0,
        format!("constant negative gave {c:?}"),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..1000 {
        let counts = ConfusionCounts {
            tp: rng.random_range(0..300),
            tn: rng.random_range(0..300),
            fp: rng.random_range(0..300),
            fn_: rng.random_range(0..300),
        };
        if counts.total() == 0 {
            continue;
        }
        let m = counts.metrics().map_err(|e| e.to_string())?;
        let (tp, tn, fp, fn_) = (counts.tp as f64, counts.tn as f64, counts.fp as f64, counts.fn_ as f64);
        let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let r = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        let a = (tp + tn) / (tp + tn + fp + fn_);
        ensure(
            m.precision == p && m.recall == r && m.f1 == f && m.accuracy == a,
            format!("identities fail for {counts:?}"),
        )?;
    }
    Ok(format!(
        "knn f1 {:.4} vs baseline f1 {}; constant negative accuracy {:.4}; 1000 tables exact",
        k.f1, b.f1, c.accuracy
    ))
}

fn c6_gradient() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=20);
        let d = rng.random_range(1..=7);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        let view: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = rng.random_range(-1.0..1.0);
        let lambda = 1e-4;
        let (gw, gb) = logistic_gradient(&w, b, &view, &labels, lambda);
        let h = 1e-5;
        let loss = |w: &[f64], b: f64| logistic_loss(w, b, &view, &labels, lambda);
        let mut numeric = Vec::with_capacity(d + 1);
        for j in 0..d {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            numeric.push((loss(&up, b) - loss(&down, b)) / (2.0 * h));
        }
        numeric.push((loss(&w, b + h) - loss(&w, b - h)) / (2.0 * h));
        let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / (norm(&analytic) + norm(&numeric)).max(1e-12);
        worst = worst.max(rel);
    }
    ensure(worst <= 1e-6, format!("max relative error {worst:e}"))?;
    Ok(format!("100 instances, max relative error {worst:.2e}"))
}

fn c7_cleaning() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let table = |name: &str, values: Vec<Option<f64>>| {
        let ids = (0..values.len()).map(|i| i.to_string()).collect();
        FeatureTable::new(ids).with_column(name, values).unwrap()
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let std = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let mut col: Vec<Option<f64>> = (0..n)
            .map(|_| rng.random_bool(0.7).then(|| rng.random_range(-1e6..1e6)))
            .collect();
        col[0] = Some(rng.random_range(-1e6..1e6));
        let present: Vec<f64> = col.iter().flatten().copied().collect();
        let once = impute_mean(&table("v", col.clone()), &["v"]).map_err(|e| e.to_string())?;
        let twice = impute_mean(&once, &["v"]).map_err(|e| e.to_string())?;
        ensure(once == twice, "impute_mean not idempotent")?;
        let filled = once.dense("v").map_err(|e| e.to_string())?;
        let (before, after) = (mean(&present), mean(&filled));
        ensure(
            (before - after).abs() <= 1e-12 * before.abs().max(1.0),
            format!("mean moved {before} -> {after}"),
        )?;
    }
    let fill = |values: Vec<Option<f64>>| {
        impute_max_supply(&table("max_supply", values)).and_then(|t| t.dense("max_supply"))
    };
    let examples = [
        (vec![Some(100.0), None, Some(50.0)], vec![100.0, 100_000.0, 50.0]),
        (vec![None, Some(1.0)], vec![1000.0, 1.0]),
        (vec![Some(4.0), Some(2.0), Some(9.0)], vec![4.0, 2.0, 9.0]),
    ];
    for (input, want) in examples {
        let got = fill(input.clone()).map_err(|e| e.to_string())?;
        ensure(got == want, format!("max supply {input:?} -> {got:?}"))?;
    }
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(2..80);
        let col: Vec<f64> = (0..n).map(|_| rng.random_range(-1e3..1e3)).collect();
        let z = mean_normalize(&col).map_err(|e| e.to_string())?;
        worst = worst.max(mean(&z).abs()).max((std(&z) - 1.0).abs());
        let pos: Vec<f64> = col.iter().map(|v| v.abs()).collect();
        let m = max_normalize(&pos).map_err(|e| e.to_string())?;
        ensure(m.iter().copied().fold(f64::MIN, f64::max) == 1.0, "max_normalize max != 1")?;
    }
    ensure(worst <= 1e-12, format!("normalization error {worst:e}"))?;
    Ok(format!("1000 imputation columns, 3 max-supply examples, 1000 normalized columns (max err {worst:.1e})"))
}

fn c8_survival() -> Check {
    let spec = SyntheticSpec {
        coins: 2000,
        row_stride_days: 30,
        ..SyntheticSpec::default()
    };
    let ds = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let recs = lifetimes(&ds, None);
    let s = survival_summary(&recs).map_err(|e| e.to_string())?;
    ensure(s.disappeared_fraction == 0.39, format!("disappeared {}", s.disappeared_fraction))?;
    ensure(s.disappeared_under_80_days == Some(0.4), format!("under 80 {:?}", s.disappeared_under_80_days))?;
    ensure(s.disappeared_under_1_year == Some(0.75), format!("under 365 {:?}", s.disappeared_under_1_year))?;
    ensure(s.surviving_over_1000_days == Some(0.1), format!("over 1000 {:?}", s.surviving_over_1000_days))?;
    let mut ends = Vec::new();
    for filter in [ParetoFilter::Disappeared, ParetoFilter::Existing, ParetoFilter::All] {
        let p = pareto(&recs, DEFAULT_BUCKET_WIDTH_DAYS, filter).map_err(|e| e.to_string())?;
        let last = p.buckets.last().ok_or("empty pareto")?.cumulative_pct;
        ensure((last - 100.0).abs() <= 1e-9, format!("pareto ends at {last}"))?;
        ends.push(last);
    }
    Ok(format!("2000 coins: 0.39 / 0.4 / 0.75 / 0.1 recovered exactly; pareto ends {ends:?}"))
}

fn c9_end_to_end() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |out: &Path| -> Result<Duration, String> {
        let start = Instant::now();
        let o = Command::new(env!("CARGO_BIN_EXE_chainlens"))
            .args(["pipeline", "--seed", "42", "--out"])
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), String::from_utf8_lossy(&o.stderr).to_string())?;
        Ok(start.elapsed())
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let t1 = run(&a)?;
    let t2 = run(&b)?;
    let files = list(&a);
    ensure(files == list(&b), "different file sets")?;
    for f in &files {
        let (x, y) = (std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
        ensure(x == y, format!("{f} differs"))?;
    }
    ensure(t1.max(t2) < Duration::from_secs(60), format!("pipeline took {:?}", t1.max(t2)))?;
    Ok(format!(
        "{} artifacts byte-identical across two runs, {:.2}s / {:.2}s",
        files.len(),
        t1.as_secs_f64(),
        t2.as_secs_f64()
    ))
}

fn list(dir: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(dir).unwrap().to_string_lossy().into_owned());
            }
        }
    }
    out.sort();
    out
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("rank-correlation oracle", c1_rank_oracle),
        ("kendall performance", c2_kendall_performance),
        ("interpretation bands", c3_bands),
        ("clustering", c4_clustering),
        ("classification", c5_classification),
        ("gradient check", c6_gradient),
        ("cleaning", c7_cleaning),
        ("survival", c8_survival),
        ("end-to-end determinism", c9_end_to_end),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
