//! Acceptance suite: one test per release criterion, each printing a
//! PASS line and enforcing its runtime budget. Run with
//! `cargo test -p modrec --test acceptance -- --nocapture` to see the lines.

use modrec::experiments::{run_sweep, Denoiser, ExperimentSpec};
use modrec::knn_denoiser::auto_k;
use modrec::lp_denoiser::{denoise, lp_weights, LpConfig};
use modrec::metrics_bounds::aligned_error;
use modrec::signal_model::{sample_modulo, NoiseModel, TestFunction, UniformGrid};
use modrec::unwrapper::unwrap_phases;
use modrec::{build_qi, knn_denoise, wrap_distance, FractionalPhase, Kernel, KnnConfig};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn finish(start: Instant, budget_s: f64, id: u32, name: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed <= budget_s,
        "criterion {id:02} exceeded its {budget_s}s budget: {elapsed:.1}s"
    );
    println!("acceptance {id:02} {name}: PASS ({elapsed:.2}s)");
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}

struct RandomLpSetup {
    grid: UniformGrid,
    x: f64,
    cfg: LpConfig,
}

fn random_lp_setups(count: usize, seed: u64) -> Vec<RandomLpSetup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(50..=1000);
            let order = rng.random_range(0..=3u32);
            let kernel = Kernel::ALL[rng.random_range(0..3usize)];
            let x: f64 = rng.random_range(0.0..1.0);
            let b = (4.0 * (order as f64 + 1.0) / n as f64).max(0.12);
            RandomLpSetup {
                grid: UniformGrid::new(n).unwrap(),
                x,
                cfg: LpConfig::new(order, b, kernel).unwrap(),
            }
        })
        .collect()
}

/// Criterion 1: smoother weights sum to one and annihilate the centered
/// monomials up to the polynomial order.
#[test]
fn acceptance_01_weight_identities() {
    let start = Instant::now();
    for setup in random_lp_setups(100, 101) {
        let w = lp_weights(&setup.grid, setup.x, &setup.cfg).unwrap();
        let n = setup.grid.n() as f64;
        assert!(
            (w.sum() - 1.0).abs() <= 1e-8,
            "sum {} (n {} order {})",
            w.sum(),
            n,
            setup.cfg.order
        );
        for k in 1..=setup.cfg.order {
            let moment: f64 = w
                .indices
                .iter()
                .zip(&w.weights)
                .map(|(&i, &wi)| (setup.grid.points()[i] - setup.x).powi(k as i32) * wi)
                .sum();
            assert!(
                moment.abs() <= 1e-7 * n,
                "moment {k} = {moment} (n {n} order {})",
                setup.cfg.order
            );
        }
    }
    finish(start, 10.0, 1, "weight identities");
}

/// Criterion 2: weight magnitude and l1 bounds with the constant computed
/// from the realized smallest eigenvalue, and hard zero outside the window.
#[test]
fn acceptance_02_weight_bounds() {
    let start = Instant::now();
    for setup in random_lp_setups(100, 202) {
        let w = lp_weights(&setup.grid, setup.x, &setup.cfg).unwrap();
        let n = setup.grid.n() as f64;
        let c_star = 8.0 * setup.cfg.kernel.k_max() / w.min_eig;
        let sup = w.weights.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let l1: f64 = w.weights.iter().map(|v| v.abs()).sum();
        assert!(
            sup <= c_star / (n * setup.cfg.bandwidth) + 1e-12,
            "sup bound violated: {sup}"
        );
        assert!(l1 <= c_star + 1e-12, "l1 bound violated: {l1}");
        for i in 0..setup.grid.n() {
            if (setup.grid.points()[i] - setup.x).abs() > setup.cfg.bandwidth {
                assert_eq!(w.weight_for(i), 0.0);
            }
        }
    }
    finish(start, 10.0, 2, "weight bounds");
}

/// Criterion 3: noiseless exactness chain. Constants survive the
/// local-polynomial route exactly; degree-<=l polynomials survive the
/// identity (k = 1) route exactly; both unwrap + interpolate back to the
/// truth up to one global integer.
#[test]
fn acceptance_03_noiseless_exactness_chain() {
    let start = Instant::now();
    let n = 128;
    let grid = UniformGrid::new(n).unwrap();
    let noise = NoiseModel::new(0.0, 1).unwrap();

    let check_chain = |phases: &[FractionalPhase], f: &TestFunction, tol_phase: f64| {
        for (i, &x) in grid.points().iter().enumerate() {
            let d = wrap_distance(phases[i], FractionalPhase::wrap(f.eval(x)));
            assert!(d <= tol_phase, "phase error {d} at x = {x}");
        }
        let unwrapped = unwrap_phases(phases, &grid).unwrap();
        let recovered = build_qi(&unwrapped, 2).unwrap();
        let truth: Vec<f64> = grid.points().iter().map(|&x| f.eval(x)).collect();
        let est: Vec<f64> = grid.points().iter().map(|&x| recovered.eval(x)).collect();
        let report = aligned_error(&est, &truth).unwrap();
        assert!(report.max <= 1e-7, "aligned max {} for {f}", report.max);
    };

    // constants through the local polynomial route
    for c in [0.25, -0.3, 3.7] {
        let f = TestFunction::Constant(c);
        let samples = sample_modulo(&f, &grid, &noise);
        let cfg = LpConfig::new(2, 0.1, Kernel::Epanechnikov).unwrap();
        let den = denoise(&samples, &cfg).unwrap();
        check_chain(&den.phases, &f, 1e-8);
    }

    // degree-<=2 polynomials through the identity denoiser
    for f in [
        TestFunction::Poly(vec![0.3, -0.5, 0.8]),
        TestFunction::Linear {
            slope: 1.1,
            intercept: -0.4,
        },
        TestFunction::Constant(0.9),
    ] {
        let samples = sample_modulo(&f, &grid, &noise);
        let den = knn_denoise(&samples, &KnnConfig::fixed(1)).unwrap();
        check_chain(&den.phases, &f, 1e-12);
    }
    finish(start, 5.0, 3, "noiseless exactness chain");
}

/// Criterion 4: the noiseless smoothing error of the raw circle fit decays
/// with bandwidth at the smoothness rate (fitted slope >= 1.9 over four
/// octaves, interior points only).
#[test]
fn acceptance_04_bias_rate() {
    let start = Instant::now();
    let n = 4096;
    let grid = UniformGrid::new(n).unwrap();
    let f = TestFunction::PaperFn;
    let samples = sample_modulo(&f, &grid, &NoiseModel::new(0.0, 1).unwrap());
    let h: Vec<Complex64> = grid
        .points()
        .iter()
        .map(|&x| {
            let p = FractionalPhase::wrap(f.eval(x)).lift();
            Complex64::new(p.re(), p.im())
        })
        .collect();
    // four octaves inside the asymptotic regime: larger bandwidths let the
    // lifted signal wind fully inside a window and saturate the bias
    let octaves = [0.00125, 0.0025, 0.005, 0.01];
    let mut logs = Vec::new();
    for &b in &octaves {
        let cfg = LpConfig::new(2, b, Kernel::Epanechnikov).unwrap();
        let den = denoise(&samples, &cfg).unwrap();
        let mut err = 0.0f64;
        for (i, &x) in grid.points().iter().enumerate() {
            if (0.1..=0.9).contains(&x) {
                err = err.max((den.raw[i] - h[i]).norm());
            }
        }
        logs.push((b.ln(), err.ln()));
    }
    let slope = fit_slope(&logs);
    assert!(slope >= 1.9, "bias slope {slope}");
    finish(start, 30.0, 4, "bias rate");
}

/// Criterion 5: sup-error of the quasi-interpolant on exact samples decays
/// with log-log slope at most -2.
#[test]
fn acceptance_05_qi_convergence() {
    let start = Instant::now();
    let f = TestFunction::PaperFn;
    let mut logs = Vec::new();
    for n in [100usize, 200, 400, 800] {
        let grid = UniformGrid::new(n).unwrap();
        let samples = modrec::UnwrappedSamples {
            grid: grid.clone(),
            values: grid.points().iter().map(|&x| f.eval(x)).collect(),
        };
        let recovered = build_qi(&samples, 2).unwrap();
        let mut sup = 0.0f64;
        for i in 0..=2000 {
            let x = i as f64 / 2000.0;
            sup = sup.max((recovered.eval(x) - f.eval(x)).abs());
        }
        logs.push(((n as f64).ln(), sup.ln()));
    }
    let slope = fit_slope(&logs);
    assert!(slope <= -2.0, "convergence slope {slope}");
    finish(start, 10.0, 5, "qi convergence");
}

/// Criterion 6: desk-scale benchmark trend. Mean wrap RMSE over 5 seeds is
/// strictly decreasing in n for both denoisers, and the local-polynomial
/// mean at n = 1200 stays below 0.15.
#[test]
fn acceptance_06_wrap_rmse_trend() {
    let start = Instant::now();
    let spec = ExperimentSpec {
        function_id: "paper_fn".into(),
        sigma: 0.12,
        n_list: vec![150, 300, 600, 1200],
        seeds: vec![1, 2, 3, 4, 5],
        denoisers: vec![Denoiser::Lp, Denoiser::Knn],
        qi_degree: 2,
        ..ExperimentSpec::default()
    };
    let result = run_sweep(&spec).unwrap();
    assert_eq!(result.rows.len(), 40);
    assert!(result.rows.iter().all(|r| r.metrics.is_some()));
    for denoiser in [Denoiser::Lp, Denoiser::Knn] {
        let means: Vec<f64> = spec
            .n_list
            .iter()
            .map(|&n| {
                result
                    .summary
                    .iter()
                    .find(|s| s.denoiser == denoiser && s.n == n)
                    .unwrap()
                    .wrap_rmse_mean
            })
            .collect();
        for w in means.windows(2) {
            assert!(
                w[1] < w[0],
                "{denoiser}: wrap rmse means not strictly decreasing: {means:?}"
            );
        }
        if denoiser == Denoiser::Lp {
            assert!(
                means[3] < 0.15,
                "lp mean wrap rmse at n = 1200 is {}",
                means[3]
            );
        }
    }
    finish(start, 120.0, 6, "wrap rmse trend");
}

/// Criterion 7: end-to-end rate. Mean aligned max error over 5 seeds decays
/// with a fitted slope inside [-0.60, -0.25] across doubling grid sizes.
/// The signal is a catalogue cosine whose constants keep the unwrapping
/// hypothesis satisfied over the whole range, and the bandwidth uses the
/// rate-optimal exponent 1/(2 beta + 1).
#[test]
fn acceptance_07_end_to_end_rate() {
    let start = Instant::now();
    let f = TestFunction::CosK(1);
    let beta = 2.4;
    let mut logs = Vec::new();
    for n in [200usize, 400, 800, 1600, 3200] {
        let grid = UniformGrid::new(n).unwrap();
        let truth: Vec<f64> = grid.points().iter().map(|&x| f.eval(x)).collect();
        let b = 0.05 * ((n as f64).ln() / n as f64).powf(1.0 / (2.0 * beta + 1.0));
        let cfg = LpConfig::new(2, b, Kernel::Epanechnikov).unwrap();
        let mut acc = 0.0;
        for seed in 1..=5u64 {
            let run_seed = modrec::experiments::derive_run_seed(seed, n);
            let samples = sample_modulo(&f, &grid, &NoiseModel::new(0.12, run_seed).unwrap());
            let den = denoise(&samples, &cfg).unwrap();
            let unw = unwrap_phases(&den.phases, &grid).unwrap();
            acc += aligned_error(&unw.values, &truth).unwrap().max;
        }
        logs.push(((n as f64).ln(), (acc / 5.0).ln()));
    }
    let slope = fit_slope(&logs);
    assert!(
        (-0.60..=-0.25).contains(&slope),
        "end-to-end slope {slope} outside [-0.60, -0.25]"
    );
    finish(start, 180.0, 7, "end to end rate");
}

/// Criterion 8: Monte-Carlo validation of the circular-moment convention
/// E[exp(i 2 pi eta)] = exp(-2 pi^2 sigma^2) to one unit in the third
/// significant digit with 10^6 draws per noise level.
#[test]
fn acceptance_08_circular_moment_oracle() {
    let start = Instant::now();
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for sigma in [0.05, 0.12, 0.3] {
        let normal = Normal::new(0.0, sigma).unwrap();
        let draws = 1_000_000;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for _ in 0..draws {
            let eta: f64 = normal.sample(&mut rng);
            let (s, c) = (std::f64::consts::TAU * eta).sin_cos();
            re += c;
            im += s;
        }
        re /= draws as f64;
        im /= draws as f64;
        let theory = (-2.0 * std::f64::consts::PI.powi(2) * sigma * sigma).exp();
        let tol = 10f64.powi(theory.log10().floor() as i32 - 2);
        assert!(
            (re - theory).abs() <= tol,
            "sigma {sigma}: {re} vs {theory} (tol {tol})"
        );
        assert!(im.abs() <= 2e-3);
    }
    finish(start, 5.0, 8, "circular moment oracle");
}

/// Criterion 9: repeated sweep invocations of the real CLI binary with the
/// same config produce byte-identical results and summary CSVs.
#[test]
fn acceptance_09_sweep_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"function_id":"paper_fn","sigma":0.12,"n_list":[64,96],"seeds":[1,2],"denoisers":["lp","knn"],"qi_degree":2}"#,
    )
    .unwrap();
    let run = |out: &std::path::Path| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_modrec"))
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
        (
            std::fs::read(out.join("results.csv")).unwrap(),
            std::fs::read(out.join("summary.csv")).unwrap(),
        )
    };
    let (res_a, sum_a) = run(&dir.path().join("a"));
    let (res_b, sum_b) = run(&dir.path().join("b"));
    assert_eq!(res_a, res_b, "results.csv bytes differ between runs");
    assert_eq!(sum_a, sum_b, "summary.csv bytes differ between runs");
    assert!(!res_a.is_empty() && !sum_a.is_empty());
    finish(start, 120.0, 9, "sweep determinism");
}

/// Criterion 10: the automatic neighbor rule lands on k = 12 at n = 600.
#[test]
fn acceptance_10_knn_parameter_rule() {
    let start = Instant::now();
    assert_eq!(auto_k(600), 12);
    finish(start, 1.0, 10, "knn parameter rule");
}
