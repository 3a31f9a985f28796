//! Experiment orchestration: non-uniform-continuity demonstrations and
//! verification suites, producing [`ExperimentReport`]s with slope fits and
//! pass/fail verdicts.
//!
//! Instances (distinct carrier frequencies) are independent and run on a
//! bounded worker pool; results are joined in input order so reports are
//! identical regardless of scheduling.

mod line;
mod lowreg;
mod periodic;
mod verify;

pub use line::{run_line_nonuniform, LineNonuniformConfig};
pub use lowreg::{run_periodic_lowreg, PeriodicLowRegConfig};
pub use periodic::{run_periodic_nonuniform, PeriodicNonuniformConfig};
pub use verify::{
    run_symbol_conditions, run_verify_conservation, run_verify_error_decay, run_verify_galilean,
    run_verify_norm_lemmas, run_verify_scaling, ConservationConfig, ErrorDecayConfig,
    ErrorDecayFamily, GalileanConfig, NormLemmasConfig, ScalingConfig, SymbolConditionsConfig,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::SlopeFit;
use crate::solver::Diagnostics;

/// Named diagnostic time series produced alongside a report, one per
/// evolved instance, ready to be written as CSV files.
pub type Trajectories = Vec<(String, Diagnostics)>;

/// Least-squares slope of `log y` against `log x`, with a standard-error
/// half-width. Requires at least three points, strictly increasing `x`, and
/// strictly positive `y` (a zero would mean the decay hit the numerical
/// floor; the caller must prune such points).
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::BadFitData(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for w in points.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::BadFitData(
                "abscissae must be strictly increasing".into(),
            ));
        }
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::BadFitData(format!(
            "points must be positive, got ({x}, {y})"
        )));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let halfwidth = if points.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit { slope, halfwidth })
}

/// Map instances on a pool capped at `jobs` workers (0 = all cores),
/// preserving input order.
pub(crate) fn parallel_map<T, O, F>(items: Vec<T>, jobs: usize, f: F) -> Vec<O>
where
    T: Send,
    O: Send,
    F: Fn(T) -> O + Sync + Send,
{
    if jobs == 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        Err(_) => items.into_iter().map(f).collect(),
    }
}

/// Smallest power of two (>= 8) reaching `target`.
pub(crate) fn pow2_modes(target: f64) -> usize {
    let mut n = 8usize;
    while (n as f64) < target {
        n *= 2;
    }
    n
}

/// Strictly-decreasing check used by several verdicts; returns the largest
/// adjacent ratio (pass when < 1).
pub(crate) fn max_adjacent_ratio(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_laws() {
        let fit = fit_loglog_slope(&[(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.halfwidth < 1e-12);

        let fit = fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);

        let fit = fit_loglog_slope(&[(1.0, 1.0), (2.0, 1.0), (4.0, 1.0)]).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn slope_rejects_bad_input() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (1.0, 2.0), (3.0, 2.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]).is_err());
    }

    #[test]
    fn halfwidth_reflects_scatter() {
        let noisy = [(1.0, 1.05), (2.0, 0.48), (4.0, 0.26), (8.0, 0.121)];
        let fit = fit_loglog_slope(&noisy).unwrap();
        assert!(fit.halfwidth > 0.0);
        assert!((fit.slope + 1.0).abs() < 0.1);
    }

    #[test]
    fn parallel_map_preserves_order() {
        let out = parallel_map((0..64).collect::<Vec<_>>(), 0, |i| i * 2);
        assert_eq!(out, (0..64).map(|i| i * 2).collect::<Vec<_>>());
    }

    #[test]
    fn pow2_helper() {
        assert_eq!(pow2_modes(5.0), 8);
        assert_eq!(pow2_modes(8.0), 8);
        assert_eq!(pow2_modes(1000.0), 1024);
    }
}
