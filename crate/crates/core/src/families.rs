//! Closed-form approximate-solution families and their residuals.
//!
//! Two families are provided. On the standard torus, a carrier wave riding
//! on a constant drift:
//!
//! ```text
//!     u(x, t) = omega/n + n^(-s) cos(-n m(n) t + n x - omega t)
//! ```
//!
//! whose residual under the equation has the closed form
//! `-(1/2) n^(1-2s) sin(2 Phi)`. On a long torus emulating the line, a
//! two-scale wave packet: a smooth envelope of width `lambda^delta` carrying
//! the frequency `lambda`, `lambda^(-delta/2-s) phi_lambda(x) cos(Phi)`,
//! paired with low-frequency data `omega lambda^(-1) phitilde_lambda(x)`
//! that is evolved numerically.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::symbols::Symbol;

// ---------------------------------------------------------------------------
// Bump functions
// ---------------------------------------------------------------------------

/// `exp(-1/y)` for positive `y`, zero otherwise; the classical smooth cutoff.
fn smooth_step_kernel(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// Smooth partition ramp: 0 at `y <= 0`, 1 at `y >= 1`, strictly monotone
/// between.
fn ramp(y: f64) -> f64 {
    let a = smooth_step_kernel(y);
    let b = smooth_step_kernel(1.0 - y);
    a / (a + b)
}

/// Smooth bump: 1 on `|x| <= 1`, 0 on `|x| >= 2`, monotone transition.
pub fn bump(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        ramp(2.0 - x)
    }
}

/// Companion bump: 1 on `|x| <= 2` (the support of [`bump`]), 0 on
/// `|x| >= 3`.
pub fn bump_tilde(x: f64) -> f64 {
    let x = x.abs();
    if x <= 2.0 {
        1.0
    } else if x >= 3.0 {
        0.0
    } else {
        ramp(3.0 - x)
    }
}

/// Adaptive Simpson quadrature, used as the reference for the envelope norm.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// L2 norm of the envelope `bump`, from adaptive quadrature to 1e-12.
pub fn bump_l2_norm() -> f64 {
    static NORM: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *NORM.get_or_init(|| {
        let square = |x: f64| bump(x) * bump(x);
        // Split at the kinks so the adaptive rule converges fast.
        let tail = adaptive_simpson(&square, 1.0, 2.0, 1e-14);
        (2.0 * (1.0 + tail)).sqrt()
    })
}

/// L2 norm of the companion envelope `bump_tilde`.
pub fn bump_tilde_l2_norm() -> f64 {
    static NORM: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *NORM.get_or_init(|| {
        let square = |x: f64| bump_tilde(x) * bump_tilde(x);
        let tail = adaptive_simpson(&square, 2.0, 3.0, 1e-14);
        (2.0 * (2.0 + tail)).sqrt()
    })
}

// ---------------------------------------------------------------------------
// Time-parameterized families
// ---------------------------------------------------------------------------

/// A family that can be sampled at a time together with its analytic (or
/// equation-supplied) time derivative; what [`residual`] needs.
pub trait ApproxFamily {
    fn value(&self, t: f64, grid: &Arc<Grid>) -> Result<Field>;
    fn time_derivative(&self, t: f64, grid: &Arc<Grid>) -> Result<Field>;
}

/// Residual of a family under the equation:
/// `du/dt + u u_x + L(u_x)` with the product dealiased.
pub fn residual<F: ApproxFamily>(
    family: &F,
    symbol: &Symbol,
    t: f64,
    grid: &Arc<Grid>,
) -> Result<Field> {
    let u = family.value(t, grid)?;
    let du_dt = family.time_derivative(t, grid)?;
    let ux = u.derivative();
    let advection = u.dealiased_product(&ux)?;
    let dispersion = ux.apply_multiplier(symbol)?;
    du_dt.add(&advection)?.add(&dispersion)
}

// ---------------------------------------------------------------------------
// Periodic carrier wave
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicWaveParams {
    /// Carrier frequency.
    pub n: u32,
    /// Constant drift (the low-frequency part is `omega/n`).
    pub omega: f64,
    /// Sobolev index setting the carrier amplitude `n^(-s)`.
    pub s: f64,
}

impl PeriodicWaveParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("carrier frequency must be at least 1".into()));
        }
        if !(self.s > 0.0) {
            return Err(Error::Config(format!(
                "Sobolev index must be positive, got {}",
                self.s
            )));
        }
        Ok(())
    }
}

/// The carrier-on-drift family with the dispersion speed `m(n)` baked in.
#[derive(Debug, Clone)]
pub struct PeriodicWave {
    pub params: PeriodicWaveParams,
    speed: f64,
}

impl PeriodicWave {
    pub fn new(params: PeriodicWaveParams, symbol: &Symbol) -> Result<PeriodicWave> {
        params.validate()?;
        let speed = symbol.eval(params.n as f64)?;
        Ok(PeriodicWave { params, speed })
    }

    /// `m(n)`, the linear phase speed of the carrier.
    pub fn dispersion(&self) -> f64 {
        self.speed
    }

    /// Time part of the phase `Phi = n x - (n m(n) + omega) t`.
    fn phase_offset(&self, t: f64) -> f64 {
        -(self.params.n as f64 * self.speed + self.params.omega) * t
    }

    fn ensure_band(&self, grid: &Arc<Grid>) -> Result<()> {
        // The doubled carrier frequency (quadratic interaction and the
        // closed-form residual) must stay inside the resolved band.
        if 2.0 * self.params.n as f64 >= grid.max_wavenumber() {
            return Err(Error::UnresolvedFrequency {
                frequency: self.params.n as f64,
                n_modes: grid.n_modes(),
                length: grid.length(),
            });
        }
        Ok(())
    }

    /// Realize `low + amp * trig(h * Phi)` through its exact two-mode
    /// spectrum (the zero mode plus the carrier pair at `+-h n`), then
    /// synthesize collocation values. Sampling the trig form pointwise
    /// instead would seed every mode with rounding noise of order
    /// `eps * max|u|`, which the derivative amplifies by `kappa`; the
    /// closed-form residual identity is tight enough to see that.
    fn sample_trig(
        &self,
        t: f64,
        grid: &Arc<Grid>,
        harmonic: u32,
        amp: f64,
        low: f64,
        use_sin: bool,
    ) -> Result<Field> {
        let hn = harmonic as f64 * self.params.n as f64;
        let slot_float = hn * grid.length() / (2.0 * std::f64::consts::PI);
        let slot = slot_float.round();
        if (slot_float - slot).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "carrier frequency {hn} is not a mode of a torus with length {}",
                grid.length()
            )));
        }
        let plus = grid
            .slot_of(slot as isize)
            .expect("band was checked before sampling");
        let minus = grid.slot_of(-(slot as isize)).expect("paired slot");
        let mut spectrum = vec![crate::Complex64::new(0.0, 0.0); grid.n_modes()];
        spectrum[0] = crate::Complex64::new(low, 0.0);
        let phase0 = harmonic as f64 * self.phase_offset(t);
        let mut coefficient = crate::Complex64::from_polar(0.5 * amp, phase0);
        if use_sin {
            // sin = cos shifted: c_+ picks up a factor -i.
            coefficient *= crate::Complex64::new(0.0, -1.0);
        }
        spectrum[plus] = coefficient;
        spectrum[minus] = coefficient.conj();
        Ok(Field::from_synced_spectrum(grid, spectrum))
    }

    /// Sample `omega/n + n^(-s) cos(Phi)` at the collocation points.
    pub fn sample(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.ensure_band(grid)?;
        let amp = (self.params.n as f64).powf(-self.params.s);
        let low = self.params.omega / self.params.n as f64;
        self.sample_trig(t, grid, 1, amp, low, false)
    }

    /// Analytic time derivative `n^(-s) (n m(n) + omega) sin(Phi)`.
    pub fn sample_dt(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.ensure_band(grid)?;
        let n = self.params.n as f64;
        let amp = n.powf(-self.params.s) * (n * self.speed + self.params.omega);
        self.sample_trig(t, grid, 1, amp, 0.0, true)
    }

    /// Closed form of the residual: `-(1/2) n^(1-2s) sin(2 Phi)`.
    pub fn error_term(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.ensure_band(grid)?;
        let n = self.params.n as f64;
        let amp = -0.5 * n.powf(1.0 - 2.0 * self.params.s);
        self.sample_trig(t, grid, 2, amp, 0.0, true)
    }

    /// Exact squared separation between the `omega = +1` and `omega = -1`
    /// members at time `t` in the `H^s` norm: the constant parts differ by
    /// `2/n` and the carriers combine into `2 n^(-s) sin(Phi0) sin(t)`.
    pub fn separation_closed_form(n: u32, s: f64, t: f64) -> f64 {
        let n = n as f64;
        let two_pi = 2.0 * std::f64::consts::PI;
        let constant = (2.0 / n).powi(2) * two_pi;
        let carrier = 4.0 * n.powf(-2.0 * s)
            * t.sin().powi(2)
            * std::f64::consts::PI
            * (1.0 + n * n).powf(s);
        (constant + carrier).sqrt()
    }
}

impl ApproxFamily for PeriodicWave {
    fn value(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.sample(t, grid)
    }

    fn time_derivative(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.sample_dt(t, grid)
    }
}

// ---------------------------------------------------------------------------
// Two-scale wave packet on the long torus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketParams {
    /// Carrier frequency.
    pub lambda: f64,
    /// Envelope-width exponent: the envelope lives on the scale
    /// `lambda^delta`, `1 < delta < 2`.
    pub delta: f64,
    /// Amplitude sign/size of the low-frequency companion.
    pub omega: f64,
    /// Sobolev index setting the packet amplitude `lambda^(-delta/2-s)`.
    pub s: f64,
}

impl WavePacketParams {
    /// Check the parameter window, including `max(1, gamma) < delta < 2`
    /// when the symbol declares a tail Lipschitz exponent.
    pub fn validate(&self, symbol: &Symbol) -> Result<()> {
        if !(self.lambda >= 1.0) {
            return Err(Error::Config(format!(
                "carrier frequency must be >= 1, got {}",
                self.lambda
            )));
        }
        if !(self.s > 0.0) {
            return Err(Error::Config(format!(
                "Sobolev index must be positive, got {}",
                self.s
            )));
        }
        let mut lower = 1.0f64;
        if let Some(gamma) = symbol.tail_lipschitz_gamma {
            lower = lower.max(gamma);
        }
        if !(self.delta > lower && self.delta < 2.0) {
            return Err(Error::Config(format!(
                "envelope exponent delta = {} must lie in ({lower}, 2) for this symbol",
                self.delta
            )));
        }
        Ok(())
    }

    /// Envelope length scale `lambda^delta`.
    pub fn envelope_scale(&self) -> f64 {
        self.lambda.powf(self.delta)
    }

    fn check_packet_fits(&self, grid: &Arc<Grid>) -> Result<()> {
        let required = 8.0 * self.envelope_scale();
        if grid.length() < required {
            return Err(Error::PacketTooWide {
                length: grid.length(),
                required,
            });
        }
        Ok(())
    }

    fn check_carrier_resolved(&self, grid: &Arc<Grid>) -> Result<()> {
        // Dealiasing headroom: the retained band must cover the doubled
        // carrier frequency.
        if grid.max_wavenumber() < 2.0 * self.lambda {
            return Err(Error::UnresolvedFrequency {
                frequency: self.lambda,
                n_modes: grid.n_modes(),
                length: grid.length(),
            });
        }
        Ok(())
    }
}

/// `lambda^(-delta/2-s) phi((x-c)/lambda^delta) cos(Phi)`, the packet
/// centered on the torus; `Phi = -lambda m(lambda) t + lambda (x-c) - omega t`.
pub fn high_freq(
    params: &WavePacketParams,
    symbol: &Symbol,
    t: f64,
    grid: &Arc<Grid>,
) -> Result<Field> {
    params.validate(symbol)?;
    params.check_packet_fits(grid)?;
    params.check_carrier_resolved(grid)?;
    let center = 0.5 * grid.length();
    let scale = params.envelope_scale();
    let amp = params.lambda.powf(-0.5 * params.delta - params.s);
    let speed = symbol.eval(params.lambda)?;
    let lambda = params.lambda;
    let omega = params.omega;
    Ok(Field::from_fn(grid, |x| {
        let y = x - center;
        let phase = -lambda * speed * t + lambda * y - omega * t;
        amp * bump(y / scale) * phase.cos()
    }))
}

/// Analytic time derivative of [`high_freq`]:
/// `(lambda m(lambda) + omega) lambda^(-delta/2-s) phi_lambda sin(Phi)`.
pub fn high_freq_dt(
    params: &WavePacketParams,
    symbol: &Symbol,
    t: f64,
    grid: &Arc<Grid>,
) -> Result<Field> {
    params.validate(symbol)?;
    params.check_packet_fits(grid)?;
    params.check_carrier_resolved(grid)?;
    let center = 0.5 * grid.length();
    let scale = params.envelope_scale();
    let speed = symbol.eval(params.lambda)?;
    let amp = params.lambda.powf(-0.5 * params.delta - params.s)
        * (params.lambda * speed + params.omega);
    let lambda = params.lambda;
    let omega = params.omega;
    Ok(Field::from_fn(grid, |x| {
        let y = x - center;
        let phase = -lambda * speed * t + lambda * y - omega * t;
        amp * bump(y / scale) * phase.sin()
    }))
}

/// Low-frequency initial data `omega lambda^(-1) phitilde((x-c)/lambda^delta)`.
pub fn low_freq_initial(params: &WavePacketParams, grid: &Arc<Grid>) -> Result<Field> {
    params.check_packet_fits(grid)?;
    if params.omega == 0.0 {
        return Ok(Field::zero(grid));
    }
    let center = 0.5 * grid.length();
    let scale = params.envelope_scale();
    let amp = params.omega / params.lambda;
    Ok(Field::from_fn(grid, |x| {
        amp * bump_tilde((x - center) / scale)
    }))
}

/// The two-scale family frozen at one instant: the low-frequency part is a
/// concrete field (initial data at `t = 0`, or a numerically evolved state),
/// the packet is closed-form. Its time derivative combines the analytic
/// packet derivative with the equation right-hand side of the low part,
/// which is exactly how the low part moves.
pub struct PacketSnapshot {
    pub params: WavePacketParams,
    symbol: Symbol,
    t: f64,
    low: Field,
}

impl PacketSnapshot {
    /// Snapshot at `t = 0` with the closed-form low-frequency data.
    pub fn initial(
        params: WavePacketParams,
        symbol: &Symbol,
        grid: &Arc<Grid>,
    ) -> Result<PacketSnapshot> {
        params.validate(symbol)?;
        let low = low_freq_initial(&params, grid)?;
        Ok(PacketSnapshot {
            params,
            symbol: symbol.clone(),
            t: 0.0,
            low,
        })
    }

    /// Snapshot at a later time, with the evolved low-frequency state.
    pub fn at_time(
        params: WavePacketParams,
        symbol: &Symbol,
        t: f64,
        low: Field,
    ) -> Result<PacketSnapshot> {
        params.validate(symbol)?;
        Ok(PacketSnapshot {
            params,
            symbol: symbol.clone(),
            t,
            low,
        })
    }

    pub fn low(&self) -> &Field {
        &self.low
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (t - self.t).abs() > 1e-12 * self.t.abs().max(1.0) {
            return Err(Error::UnsupportedFamily(t));
        }
        Ok(())
    }
}

impl ApproxFamily for PacketSnapshot {
    fn value(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.check_time(t)?;
        high_freq(&self.params, &self.symbol, self.t, grid)?.add(&self.low)
    }

    fn time_derivative(&self, t: f64, grid: &Arc<Grid>) -> Result<Field> {
        self.check_time(t)?;
        let packet_dt = high_freq_dt(&self.params, &self.symbol, self.t, grid)?;
        // d(low)/dt = -low low_x - L(low_x), since the low part solves the
        // equation (numerically).
        let low_x = self.low.derivative();
        let advect = self.low.dealiased_product(&low_x)?;
        let disperse = low_x.apply_multiplier(&self.symbol)?;
        packet_dt.sub(&advect)?.sub(&disperse)
    }
}

// ---------------------------------------------------------------------------
// Spectral rescaling
// ---------------------------------------------------------------------------

/// Realize `v(x) = u(x / a)` where `a = target.length() / u.grid().length()`,
/// by re-indexing modes onto the longer torus (zero padding). Exact for all
/// resolved modes; the source Nyquist coefficient is split onto its paired
/// slots.
pub fn rescale_field(u: &Field, target: &Arc<Grid>) -> Result<Field> {
    let src = u.grid();
    if target.n_modes() < src.n_modes() {
        return Err(Error::Config(format!(
            "rescale target grid with {} modes cannot hold {} source modes",
            target.n_modes(),
            src.n_modes()
        )));
    }
    let n = src.n_modes();
    let mut spectrum = vec![crate::Complex64::new(0.0, 0.0); target.n_modes()];
    for slot in 0..n {
        let k = src.signed_index(slot);
        if slot == src.nyquist_slot() {
            // The unpaired source Nyquist coefficient splits onto its two
            // paired slots on a larger grid; on an equal-sized grid it
            // stays where it is.
            match target.slot_of(-k) {
                Some(plus) => {
                    let half = 0.5 * u.spectrum()[slot];
                    spectrum[target.slot_of(k).unwrap()] += half;
                    spectrum[plus] += half;
                }
                None => spectrum[target.slot_of(k).unwrap()] = u.spectrum()[slot],
            }
        } else {
            spectrum[target.slot_of(k).unwrap()] = u.spectrum()[slot];
        }
    }
    Ok(Field::from_synced_spectrum(target, spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const SQRT_PI: f64 = 1.7724538509055159;

    fn grid_2pi(n: usize) -> Arc<Grid> {
        Grid::new(2.0 * PI, n).unwrap()
    }

    #[test]
    fn bump_plateau_and_support() {
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(-1.0), 1.0);
        assert_eq!(bump(3.0), 0.0);
        assert_eq!(bump(2.0), 0.0);
        assert!(bump(1.5) > 0.0 && bump(1.5) < 1.0);
        assert_eq!(bump_tilde(2.0), 1.0);
        assert_eq!(bump_tilde(-1.7), 1.0);
        assert_eq!(bump_tilde(3.0), 0.0);
        // Monotone on the transitions.
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = bump(1.0 + i as f64 / 100.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn bump_transitions_are_flat_to_high_order() {
        // Finite-difference derivatives at the transition endpoints shrink
        // with the stencil: all derivatives vanish there.
        for order in 1..=4u32 {
            let mut prev = f64::INFINITY;
            for &h in &[1e-1, 5e-2, 2.5e-2] {
                // Central differences of the given order at x = 1 and x = 2.
                let d_at = |x0: f64| match order {
                    1 => (bump(x0 + h) - bump(x0 - h)) / (2.0 * h),
                    2 => (bump(x0 + h) - 2.0 * bump(x0) + bump(x0 - h)) / (h * h),
                    3 => {
                        (bump(x0 + 2.0 * h) - 2.0 * bump(x0 + h) + 2.0 * bump(x0 - h)
                            - bump(x0 - 2.0 * h))
                            / (2.0 * h * h * h)
                    }
                    _ => {
                        (bump(x0 + 2.0 * h) - 4.0 * bump(x0 + h) + 6.0 * bump(x0)
                            - 4.0 * bump(x0 - h)
                            + bump(x0 - 2.0 * h))
                            / (h * h * h * h)
                    }
                };
                let worst = d_at(1.0).abs().max(d_at(2.0).abs());
                assert!(
                    worst < prev + 1e-12,
                    "order {order}: {worst} did not shrink from {prev}"
                );
                prev = worst;
            }
        }
    }

    #[test]
    fn bump_norm_is_stable_reference() {
        let norm = bump_l2_norm();
        // Recorded once from the quadrature itself; guards against
        // regressions in the integrator.
        assert_relative_eq!(norm, 1.6767261271736368, epsilon = 1e-10);
        assert!(bump_tilde_l2_norm() > norm);
    }

    #[test]
    fn periodic_wave_samples() {
        let g = grid_2pi(64);
        let symbol = Symbol::whitham();
        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 2,
                omega: 0.0,
                s: 2.0,
            },
            &symbol,
        )
        .unwrap();
        let f = wave.sample(0.0, &g).unwrap();
        for (v, x) in f.values().iter().zip(g.points()) {
            assert_relative_eq!(*v, 0.25 * (2.0 * x).cos(), epsilon = 1e-14);
        }

        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 4,
                omega: 1.0,
                s: 2.0,
            },
            &symbol,
        )
        .unwrap();
        let f = wave.sample(0.0, &g).unwrap();
        for (v, x) in f.values().iter().zip(g.points()) {
            assert_relative_eq!(*v, 0.25 + 0.0625 * (4.0 * x).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn periodic_wave_norm_closed_form() {
        let g = grid_2pi(2048);
        let symbol = Symbol::whitham();
        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 64,
                omega: 1.0,
                s: 2.0,
            },
            &symbol,
        )
        .unwrap();
        let f = wave.sample(0.0, &g).unwrap();
        // Two modes: the constant 1/n and the carrier pair at +-n with
        // amplitude n^(-s)/2 each.
        let n = 64.0f64;
        let expected = (2.0 * PI / (n * n) + PI * (1.0 + n * n).powi(2) / n.powi(4)).sqrt();
        assert_relative_eq!(f.sobolev_norm(2.0), expected, max_relative = 1e-12);
        // Bounded uniformly in n: close to sqrt(pi).
        assert!((f.sobolev_norm(2.0) - SQRT_PI).abs() < 0.01);
    }

    #[test]
    fn periodic_error_term_closed_forms() {
        let g = grid_2pi(64);
        let symbol = Symbol::whitham();
        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 2,
                omega: 0.0,
                s: 2.0,
            },
            &symbol,
        )
        .unwrap();
        let e = wave.error_term(0.0, &g).unwrap();
        for (v, x) in e.values().iter().zip(g.points()) {
            assert_relative_eq!(*v, -(1.0 / 16.0) * (4.0 * x).sin(), epsilon = 1e-14);
        }

        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 1,
                omega: 0.0,
                s: 0.5,
            },
            &symbol,
        )
        .unwrap();
        let e = wave.error_term(0.0, &g).unwrap();
        for (v, x) in e.values().iter().zip(g.points()) {
            assert_relative_eq!(*v, -0.5 * (2.0 * x).sin(), epsilon = 1e-14);
        }

        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 8,
                omega: 0.0,
                s: 2.0,
            },
            &symbol,
        )
        .unwrap();
        let e = wave.error_term(0.3, &g).unwrap();
        let expected = 0.5 * 8.0f64.powf(-3.0) * SQRT_PI;
        assert_relative_eq!(e.sobolev_norm(0.0), expected, max_relative = 1e-12);
    }

    #[test]
    fn residual_matches_closed_form_identity() {
        let symbol = Symbol::whitham();
        for &n in &[2u32, 4, 8, 16] {
            let g = grid_2pi((16 * n as usize).max(64));
            for &s in &[1.0, 2.0, 2.5] {
                for &omega in &[-1.0, 0.0, 1.0] {
                    for &t in &[0.0, 0.3] {
                        let wave =
                            PeriodicWave::new(PeriodicWaveParams { n, omega, s }, &symbol)
                                .unwrap();
                        let r = residual(&wave, &symbol, t, &g).unwrap();
                        let closed = wave.error_term(t, &g).unwrap();
                        let gap = r.sub(&closed).unwrap().l2_norm();
                        let scale = closed.l2_norm();
                        assert!(
                            gap <= 1e-12 * scale,
                            "n={n} s={s} omega={omega} t={t}: {gap} vs {scale}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn residual_of_constant_vanishes() {
        let g = grid_2pi(64);
        struct Constant;
        impl ApproxFamily for Constant {
            fn value(&self, _t: f64, grid: &Arc<Grid>) -> Result<Field> {
                Ok(Field::constant(grid, 2.0))
            }
            fn time_derivative(&self, _t: f64, grid: &Arc<Grid>) -> Result<Field> {
                Ok(Field::zero(grid))
            }
        }
        let r = residual(&Constant, &Symbol::whitham(), 0.0, &g).unwrap();
        assert!(r.max_abs() < 1e-13);
    }

    #[test]
    fn unresolved_frequency_is_rejected() {
        let g = grid_2pi(32); // max wavenumber 16
        let symbol = Symbol::whitham();
        let wave = PeriodicWave::new(
            PeriodicWaveParams {
                n: 9,
                omega: 0.0,
                s: 2.0,
            },
            &symbol,
        )
        .unwrap();
        assert!(matches!(
            wave.sample(0.0, &g),
            Err(Error::UnresolvedFrequency { .. })
        ));
    }

    #[test]
    fn packet_values_and_support() {
        let params = WavePacketParams {
            lambda: 16.0,
            delta: 1.5,
            omega: 0.0,
            s: 2.0,
        };
        let symbol = Symbol::whitham();
        // length 8 * 16^1.5 = 512; resolve 2 * lambda = 32: n >= 32*512/pi.
        let grid = Grid::new(8.0 * params.envelope_scale(), 8192).unwrap();
        let f = high_freq(&params, &symbol, 0.0, &grid).unwrap();
        let center_slot = grid.n_modes() / 2;
        let amp = 16.0f64.powf(-0.5 * 1.5 - 2.0);
        assert_relative_eq!(f.values()[center_slot], amp, epsilon = 1e-15);
        // Vanishes outside the envelope support.
        let scale = params.envelope_scale();
        for (j, &v) in f.values().iter().enumerate() {
            if (grid.point(j) - 0.5 * grid.length()).abs() >= 2.0 * scale {
                assert_eq!(v, 0.0);
            }
        }

        let low = low_freq_initial(
            &WavePacketParams {
                omega: 1.0,
                ..params
            },
            &grid,
        )
        .unwrap();
        assert_relative_eq!(low.values()[center_slot], 1.0 / 16.0, epsilon = 1e-15);
        assert!(low_freq_initial(&params, &grid).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn packet_rejects_bad_domains() {
        let symbol = Symbol::whitham();
        let params = WavePacketParams {
            lambda: 16.0,
            delta: 1.5,
            omega: 1.0,
            s: 2.0,
        };
        let short = Grid::new(100.0, 4096).unwrap();
        assert!(matches!(
            high_freq(&params, &symbol, 0.0, &short),
            Err(Error::PacketTooWide { .. })
        ));
        let coarse = Grid::new(8.0 * params.envelope_scale(), 1024).unwrap();
        assert!(matches!(
            high_freq(&params, &symbol, 0.0, &coarse),
            Err(Error::UnresolvedFrequency { .. })
        ));
        // delta outside the admissible window.
        let bad = WavePacketParams {
            delta: 2.3,
            ..params
        };
        assert!(bad.validate(&symbol).is_err());
        // KdV declares gamma = 2: no admissible delta at all.
        assert!(params.validate(&Symbol::kdv()).is_err());
    }

    #[test]
    fn packet_norm_approaches_envelope_limit() {
        // The normalized H^s norm of the packet tends to |phi|_L2 / sqrt(2).
        let symbol = Symbol::whitham();
        let target = bump_l2_norm() / 2.0f64.sqrt();
        let mut prev_err = f64::INFINITY;
        for &lambda in &[16.0, 32.0, 64.0] {
            let params = WavePacketParams {
                lambda,
                delta: 1.5,
                omega: 0.0,
                s: 2.0,
            };
            let length = 8.0 * params.envelope_scale();
            let n_modes = pow2_at_least(2.0 * lambda * length / PI);
            let grid = Grid::new(length, n_modes).unwrap();
            let f = high_freq(&params, &symbol, 0.0, &grid).unwrap();
            let err = (f.sobolev_norm(2.0) - target).abs() / target;
            assert!(err < prev_err, "error not shrinking at lambda = {lambda}");
            prev_err = err;
        }
        assert!(prev_err < 0.01);
    }

    fn pow2_at_least(x: f64) -> usize {
        let mut n = 8usize;
        while (n as f64) < x {
            n *= 2;
        }
        n
    }

    #[test]
    fn rescale_preserves_modes_and_scales_norm() {
        let src = grid_2pi(64);
        let f = Field::from_fn(&src, |x| x.sin());
        // Identity when target matches the source.
        let same = rescale_field(&f, &src).unwrap();
        for (a, b) in f.values().iter().zip(same.values()) {
            assert!((a - b).abs() < 1e-13);
        }
        // Stretch by 4: sin(x/4) on the 4x torus, L2 norm doubles.
        let target = Grid::new(8.0 * PI, 256).unwrap();
        let v = rescale_field(&f, &target).unwrap();
        for (j, &val) in v.values().iter().enumerate() {
            assert_relative_eq!(val, (target.point(j) / 4.0).sin(), epsilon = 1e-12);
        }
        assert_relative_eq!(v.l2_norm(), 2.0 * f.l2_norm(), max_relative = 1e-13);
        // Too-small target is rejected.
        let tiny = grid_2pi(32);
        assert!(rescale_field(&f, &tiny).is_err());
    }

    #[test]
    fn rescale_matches_low_freq_initial() {
        // Stretching the unit-scale data omega/lambda phitilde(x) onto the
        // long torus reproduces the long-torus initial data.
        let lambda = 16.0;
        let params = WavePacketParams {
            lambda,
            delta: 1.5,
            omega: 1.0,
            s: 2.0,
        };
        let scale = params.envelope_scale();
        let short = Grid::new(32.0, 2048).unwrap();
        let long = Grid::new(32.0 * scale, 65536).unwrap();
        let u0 = Field::from_fn(&short, |x| {
            params.omega / lambda * bump_tilde(x - 16.0)
        });
        let direct = low_freq_initial(&params, &long).unwrap();
        let stretched = rescale_field(&u0, &long).unwrap();
        // Agreement is limited by the spectral tail of the envelope beyond
        // the short grid's band.
        let gap = direct.sub(&stretched).unwrap().l2_norm();
        assert!(gap < 1e-8 * direct.l2_norm(), "gap {gap}");
    }

    #[test]
    fn packet_snapshot_residual_at_initial_time() {
        let symbol = Symbol::whitham();
        let params = WavePacketParams {
            lambda: 16.0,
            delta: 1.5,
            omega: 1.0,
            s: 2.0,
        };
        let length = 32.0 * params.envelope_scale();
        let grid = Grid::new(length, 32768).unwrap();
        let snap = PacketSnapshot::initial(params, &symbol, &grid).unwrap();
        let f = residual(&snap, &symbol, 0.0, &grid).unwrap();
        // Small but nonzero: the packet is only an approximate solution.
        let norm = f.l2_norm();
        assert!(norm > 0.0 && norm < 1e-3, "residual norm {norm}");
        // Snapshot refuses other times.
        assert!(matches!(
            residual(&snap, &symbol, 0.5, &grid),
            Err(Error::UnsupportedFamily(_))
        ));
    }
}
