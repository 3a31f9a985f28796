//! Cached FFT plans and the transform convention used throughout the crate.
//!
//! Convention: `f(x_j) = sum_k c_k exp(i kappa_k x_j)` with coefficients
//! `c_k = (1/N) sum_j f(x_j) exp(-i kappa_k x_j)`. The forward direction is
//! therefore normalized by `1/N`, the synthesis direction is a plain
//! unnormalized inverse DFT.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanKey = (usize, bool);

fn plan_cache() -> &'static Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fetch a cached plan of the given length and direction.
pub(crate) fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = plan_cache().lock().unwrap();
    Arc::clone(cache.entry((len, inverse)).or_insert_with(|| {
        let mut planner = FftPlanner::new();
        planner.plan_fft(
            len,
            if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            },
        )
    }))
}

/// In-place unnormalized forward DFT.
pub(crate) fn forward_raw(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place unnormalized inverse DFT (this is the synthesis direction).
pub(crate) fn inverse_raw(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Collocation values -> spectral coefficients.
pub(crate) fn coefficients_of(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_raw(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Spectral coefficients -> collocation values (real part of the synthesis).
pub(crate) fn values_of(spectrum: &[Complex64]) -> Vec<f64> {
    let mut buf = spectrum.to_vec();
    inverse_raw(&mut buf);
    buf.iter().map(|c| c.re).collect()
}
