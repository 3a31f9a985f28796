//! Real-valued grid functions with a synchronized spectral representation.
//!
//! A [`Field`] stores both collocation values and Fourier coefficients under
//! the convention `f(x_j) = sum_k c_k exp(i kappa_k x_j)`. Operations never
//! mutate their inputs; fields are value-semantic and cheap to share across
//! threads (the grid sits behind an `Arc`).

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use crate::symbols::Symbol;

#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn zero(grid: &Arc<Grid>) -> Field {
        Field {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.n_modes()],
            spectrum: vec![Complex64::new(0.0, 0.0); grid.n_modes()],
        }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Field {
        let mut f = Field::zero(grid);
        f.values.fill(c);
        f.spectrum[0] = Complex64::new(c, 0.0);
        f
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.n_modes() {
            return Err(Error::Config(format!(
                "value array length {} does not match grid with {} modes",
                values.len(),
                grid.n_modes()
            )));
        }
        let spectrum = fft::coefficients_of(&values);
        Ok(Field {
            grid: Arc::clone(grid),
            values,
            spectrum,
        })
    }

    /// Sample a function of `x` at the collocation points.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Field {
        let values: Vec<f64> = (0..grid.n_modes()).map(|j| f(grid.point(j))).collect();
        let spectrum = fft::coefficients_of(&values);
        Field {
            grid: Arc::clone(grid),
            values,
            spectrum,
        }
    }

    /// Build a field from Fourier coefficients. Conjugate symmetry is
    /// enforced so the synthesis is real.
    pub fn from_spectrum(grid: &Arc<Grid>, mut spectrum: Vec<Complex64>) -> Result<Field> {
        let n = grid.n_modes();
        if spectrum.len() != n {
            return Err(Error::Config(format!(
                "spectrum length {} does not match grid with {n} modes",
                spectrum.len()
            )));
        }
        spectrum[0] = Complex64::new(spectrum[0].re, 0.0);
        let nyq = grid.nyquist_slot();
        spectrum[nyq] = Complex64::new(spectrum[nyq].re, 0.0);
        for k in 1..n / 2 {
            let avg = 0.5 * (spectrum[k] + spectrum[n - k].conj());
            spectrum[k] = avg;
            spectrum[n - k] = avg.conj();
        }
        let values = fft::values_of(&spectrum);
        Ok(Field {
            grid: Arc::clone(grid),
            values,
            spectrum,
        })
    }

    pub(crate) fn from_synced_spectrum(grid: &Arc<Grid>, spectrum: Vec<Complex64>) -> Field {
        let values = fft::values_of(&spectrum);
        Field {
            grid: Arc::clone(grid),
            values,
            spectrum,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn n_modes(&self) -> usize {
        self.grid.n_modes()
    }

    /// Mean value over the torus (the zeroth coefficient).
    pub fn mean(&self) -> f64 {
        self.spectrum[0].re
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Apply the multiplier operator: each coefficient is scaled by
    /// `m(kappa_k)`. Even multipliers keep the field real; the Nyquist mode
    /// keeps its (even) multiplier value.
    pub fn apply_multiplier(&self, symbol: &Symbol) -> Result<Field> {
        let mut spectrum = self.spectrum.clone();
        for (c, &kappa) in spectrum.iter_mut().zip(self.grid.wavenumbers()) {
            *c *= symbol.eval(kappa)?;
        }
        Ok(Field::from_synced_spectrum(&self.grid, spectrum))
    }

    /// Spectral derivative: multiply by `i kappa_k`, zeroing the unpaired
    /// Nyquist mode (odd multipliers have no well-defined sign there).
    pub fn derivative(&self) -> Field {
        let mut spectrum = self.spectrum.clone();
        for (c, &kappa) in spectrum.iter_mut().zip(self.grid.wavenumbers()) {
            *c *= Complex64::new(0.0, kappa);
        }
        spectrum[self.grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
        Field::from_synced_spectrum(&self.grid, spectrum)
    }

    /// Smoothing scale: multiply coefficients by `(1 + kappa^2)^(s/2)`.
    pub fn bessel_potential(&self, s: f64) -> Field {
        let mut spectrum = self.spectrum.clone();
        for (c, &kappa) in spectrum.iter_mut().zip(self.grid.wavenumbers()) {
            *c *= (1.0 + kappa * kappa).powf(0.5 * s);
        }
        Field::from_synced_spectrum(&self.grid, spectrum)
    }

    /// `sqrt( length * sum_k (1 + kappa_k^2)^s |c_k|^2 )`; exact on resolved
    /// trigonometric polynomials and, on a long torus, the continuum norm of
    /// compactly supported fields.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let mut total = 0.0;
        for (c, &kappa) in self.spectrum.iter().zip(self.grid.wavenumbers()) {
            total += (1.0 + kappa * kappa).powf(s) * c.norm_sqr();
        }
        (self.grid.length() * total).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// Pointwise product on a 3/2 zero-padded grid, truncated back, so the
    /// quadratic interaction deposits no aliased energy in retained modes.
    pub fn dealiased_product(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.n_modes();
        let padded = 3 * n / 2;

        let mut a = pad_spectrum(&self.spectrum, padded);
        let mut b = pad_spectrum(&other.spectrum, padded);
        fft::inverse_raw(&mut a);
        fft::inverse_raw(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x = Complex64::new(x.re * y.re, 0.0);
        }
        fft::forward_raw(&mut a);
        let scale = 1.0 / padded as f64;

        let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
        truncate_spectrum(&a, &mut spectrum, scale);
        Ok(Field::from_synced_spectrum(&self.grid, spectrum))
    }

    /// Translate by `a`: returns `g` with `g(x) = f(x - a)`, realized as the
    /// phase factor `exp(-i kappa a)`. The Nyquist mode is projected onto
    /// its cosine representative to stay real.
    pub fn shift(&self, a: f64) -> Field {
        let mut spectrum = self.spectrum.clone();
        let nyq = self.grid.nyquist_slot();
        for (slot, (c, &kappa)) in spectrum
            .iter_mut()
            .zip(self.grid.wavenumbers())
            .enumerate()
        {
            if slot == nyq {
                *c *= (kappa * a).cos();
            } else {
                *c *= Complex64::new(0.0, -kappa * a).exp();
            }
        }
        Field::from_synced_spectrum(&self.grid, spectrum)
    }

    pub fn scaled(&self, factor: f64) -> Field {
        let values = self.values.iter().map(|v| v * factor).collect();
        let spectrum = self.spectrum.iter().map(|c| c * factor).collect();
        Field {
            grid: Arc::clone(&self.grid),
            values,
            spectrum,
        }
    }

    /// Add a constant (shifts the zero mode only).
    pub fn offset(&self, c: f64) -> Field {
        let mut out = self.clone();
        for v in &mut out.values {
            *v += c;
        }
        out.spectrum[0] += c;
        out
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        let spectrum = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values,
            spectrum,
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        let spectrum = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values,
            spectrum,
        })
    }

    /// Trapezoid (= rectangle, on a periodic grid) quadrature of the values.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }
}

/// Copy an `n`-slot spectrum into `m > n` slots, splitting the unpaired
/// Nyquist coefficient evenly between `+n/2` and `-n/2` so the padded
/// function interpolates the original.
pub(crate) fn pad_spectrum(spectrum: &[Complex64], padded: usize) -> Vec<Complex64> {
    let n = spectrum.len();
    debug_assert!(padded > n);
    let mut out = vec![Complex64::new(0.0, 0.0); padded];
    out[..n / 2].copy_from_slice(&spectrum[..n / 2]);
    for j in 1..n / 2 {
        out[padded - j] = spectrum[n - j];
    }
    let half_nyquist = 0.5 * spectrum[n / 2];
    out[n / 2] = half_nyquist;
    out[padded - n / 2] = half_nyquist;
    out
}

/// Inverse of [`pad_spectrum`]: keep modes `|k| < n/2`, zero the Nyquist
/// slot, scale by `scale`.
pub(crate) fn truncate_spectrum(padded: &[Complex64], out: &mut [Complex64], scale: f64) {
    let n = out.len();
    let m = padded.len();
    for k in 0..n / 2 {
        out[k] = padded[k] * scale;
    }
    out[n / 2] = Complex64::new(0.0, 0.0);
    for j in 1..n / 2 {
        out[n - j] = padded[m - j] * scale;
    }
}
