use rand_distr::{Distribution, Normal};
use satscale::harness::fit::{fit_window, FitWindow};
use satscale::rng::stream;

/// Synthetic medians ln m = ln A + mu·N + ε with Gaussian ε: the reported
/// standard error should cover the true growth rate at close to the normal
/// rate.
#[test]
fn stderr_covers_true_rate() {
    let (a, mu, sigma) = (40.0f64, 0.12, 0.3);
    let ladder: Vec<usize> = (0..40).map(|i| 20 + 4 * i).collect();
    let noise = Normal::new(0.0, sigma).unwrap();
    let trials = 2000;
    let mut covered = 0;
    for t in 0..trials {
        let mut rng = stream(17, &[t]);
        let points: Vec<(usize, f64)> =
            ladder.iter().map(|&n| (n, (a.ln() + mu * n as f64 + noise.sample(&mut rng)).exp())).collect();
        let fit = fit_window(&points, &FitWindow::All).unwrap();
        if (fit.mu - mu).abs() <= 2.0 * fit.stderr {
            covered += 1;
        }
    }
    let rate = covered as f64 / trials as f64;
    assert!((0.92..=0.975).contains(&rate), "coverage {rate}");
}

#[test]
fn noiseless_series_is_recovered() {
    let points: Vec<(usize, f64)> = [24, 32, 40, 48].iter().map(|&n| (n, 3.0 * (0.25 * n as f64).exp())).collect();
    let fit = fit_window(&points, &FitWindow::All).unwrap();
    assert!((fit.mu - 0.25).abs() < 1e-12);
    assert!((fit.prefactor - 3.0).abs() < 1e-9);
    assert!(fit.stderr < 1e-9);
}
