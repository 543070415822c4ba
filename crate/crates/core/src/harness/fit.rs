//! Exponential growth fits `flips ≈ A·exp(μ·N)` by least squares on
//! `ln(flips)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("fit window < {MIN_FIT_POINTS} points (have {0})")]
    TooFewPoints(usize),
    #[error("median at N={n} is {median}, not a positive finite value")]
    NonPositive { n: usize, median: f64 },
    #[error("sizes must be distinct")]
    DegenerateSizes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    #[serde(rename = "A")]
    pub prefactor: f64,
    pub mu: f64,
    /// Standard error of `mu` from the regression residuals.
    pub stderr: f64,
    /// Sizes the fit used.
    pub window: Vec<usize>,
    /// `ln(median) - ln(A) - mu·N` per window point.
    pub residuals: Vec<f64>,
    /// Sizes dropped from the window because their median was censored.
    #[serde(default)]
    pub excluded: Vec<usize>,
}

impl ScalingFit {
    pub fn predict(&self, n: usize) -> f64 {
        self.prefactor * (self.mu * n as f64).exp()
    }
}

/// Which sizes of a ladder enter the fit.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitWindow {
    /// The largest ⌈len/2⌉ sizes, but never fewer than three.
    #[default]
    LargestHalf,
    /// Every size `>= min_n`.
    From(usize),
    All,
}

impl FitWindow {
    pub fn select(&self, ladder: &[usize]) -> Vec<usize> {
        let mut sizes = ladder.to_vec();
        sizes.sort_unstable();
        match *self {
            FitWindow::LargestHalf => {
                let take = sizes.len().div_ceil(2).max(MIN_FIT_POINTS).min(sizes.len());
                sizes.split_off(sizes.len() - take)
            }
            FitWindow::From(min_n) => sizes.into_iter().filter(|&n| n >= min_n).collect(),
            FitWindow::All => sizes,
        }
    }
}

/// Ordinary least squares of `ln(median)` against `N` over all `points`.
pub fn fit_exponential(points: &[(usize, f64)]) -> Result<ScalingFit, FitError> {
    if points.len() < MIN_FIT_POINTS {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if let Some(&(n, median)) = points.iter().find(|(_, m)| !(m.is_finite() && *m > 0.0)) {
        return Err(FitError::NonPositive { n, median });
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, m)| m.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateSizes);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let mu = sxy / sxx;
    let intercept = y_mean - mu * x_mean;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - intercept - mu * x).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    Ok(ScalingFit {
        prefactor: intercept.exp(),
        mu,
        stderr: (ssr / (k - 2.0) / sxx).sqrt(),
        window: points.iter().map(|&(n, _)| n).collect(),
        residuals,
        excluded: Vec::new(),
    })
}

/// Fits the sizes selected by `window`, dropping (and recording) sizes whose
/// median is not finite.
pub fn fit_window(points: &[(usize, f64)], window: &FitWindow) -> Result<ScalingFit, FitError> {
    let ladder: Vec<usize> = points.iter().map(|&(n, _)| n).collect();
    let chosen = window.select(&ladder);
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for &(n, m) in points.iter().filter(|(n, _)| chosen.contains(n)) {
        if m.is_infinite() {
            excluded.push(n);
        } else {
            used.push((n, m));
        }
    }
    let mut fit = fit_exponential(&used)?;
    fit.excluded = excluded;
    Ok(fit)
}
