//! Time integration of `u_t = -u u_x - L(u_x)` by fourth-order exponential
//! time differencing.
//!
//! The linear multiplier `-i kappa m(kappa)` is purely imaginary and is
//! integrated exactly through the exponential factors; stability is governed
//! by the nonlinear advective CFL alone. The nonlinear term is the
//! divergence form `-(1/2) d/dx (u^2)` evaluated through the dealiased
//! product, which keeps the mean and the discrete L2 functional exact at the
//! semi-discrete level.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::Fft;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{pad_spectrum, truncate_spectrum, Field};
use crate::grid::Grid;
use crate::symbols::Symbol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = safety / (kappa_max * max|u|)`, recomputed every step.
    Cfl { safety: f64 },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt_policy: DtPolicy,
    pub t_end: f64,
    /// Steps between diagnostic snapshots (and blow-up checks).
    pub monitor_every: usize,
    /// Abort once `max |u_x|` exceeds this (wave-breaking signature).
    pub blowup_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt_policy: DtPolicy::Cfl { safety: 0.5 },
            t_end: 1.0,
            monitor_every: 1,
            blowup_threshold: 1e6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        match self.dt_policy {
            DtPolicy::Fixed(dt) if !(dt.is_finite() && dt > 0.0) => {
                return Err(Error::Config(format!("fixed dt must be positive, got {dt}")))
            }
            DtPolicy::Cfl { safety } if !(safety > 0.0 && safety <= 1.0) => {
                return Err(Error::Config(format!(
                    "CFL safety must lie in (0, 1], got {safety}"
                )))
            }
            _ => {}
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end must be a nonnegative real, got {}",
                self.t_end
            )));
        }
        if self.monitor_every == 0 {
            return Err(Error::Config("monitor_every must be at least 1".into()));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::Config("blowup threshold must be positive".into()));
        }
        Ok(())
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_cfl(mut self, safety: f64) -> Self {
        self.dt_policy = DtPolicy::Cfl { safety };
        self
    }
}

/// Snapshot history recorded during an evolution.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub l2: Vec<f64>,
    pub hamiltonian: Vec<f64>,
    pub hs_norm: Vec<f64>,
    /// Sobolev index used for `hs_norm`.
    pub sobolev_index: f64,
    /// Smallest constant for which the a-priori norm bound holds over the
    /// recorded trajectory; `None` until fitted (or when the fit fails).
    pub fitted_cs: Option<f64>,
}

impl Diagnostics {
    fn record(&mut self, t: f64, u: &Field, symbol: &Symbol, s: f64) -> Result<()> {
        let (mean, l2, hamiltonian) = conserved_quantities(u, symbol)?;
        self.times.push(t);
        self.mean.push(mean);
        self.l2.push(l2);
        self.hamiltonian.push(hamiltonian);
        self.hs_norm.push(u.sobolev_norm(s));
        Ok(())
    }
}

/// Trapezoid quadrature of the invariants: the mean, `int u^2`, and the
/// energy `1/2 int u L(u) + 1/6 int u^3`.
///
/// The cubic sign is forced by the equation: along solutions of
/// `u_t + u u_x + L(u_x) = 0` one has `d/dt (1/2) int u L u = +(1/2) int
/// u^2 L(u_x)` and `d/dt (1/6) int u^3 = -(1/2) int u^2 L(u_x)`, so this
/// combination is the conserved one.
pub fn conserved_quantities(u: &Field, symbol: &Symbol) -> Result<(f64, f64, f64)> {
    let lu = u.apply_multiplier(symbol)?;
    let w = u.grid().spacing();
    let mut mean = 0.0;
    let mut l2 = 0.0;
    let mut ulu = 0.0;
    let mut cubic = 0.0;
    for (&v, &g) in u.values().iter().zip(lu.values()) {
        mean += v;
        l2 += v * v;
        ulu += v * g;
        cubic += v * v * v;
    }
    Ok((mean * w, l2 * w, 0.5 * ulu * w + cubic * w / 6.0))
}

/// The a-priori norm bound `norm0 / (1 - t c norm0)`, or infinity once the
/// guaranteed window is exhausted.
pub fn riccati_bound(norm0: f64, c: f64, t: f64) -> f64 {
    let denom = 1.0 - t * c * norm0;
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        norm0 / denom
    }
}

/// Smallest `c >= 0` such that `hs_norm[i] <= riccati_bound(hs_norm[0], c,
/// times[i])` for every snapshot, located by bisection to 1e-6 relative.
pub fn fit_cs(diag: &Diagnostics) -> Result<f64> {
    let usable: Vec<(f64, f64)> = diag
        .times
        .iter()
        .zip(&diag.hs_norm)
        .filter(|(_, h)| h.is_finite())
        .map(|(&t, &h)| (t, h))
        .collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(
            "norm-bound fit needs at least two finite snapshots".into(),
        ));
    }
    let norm0 = usable[0].1;
    let holds = |c: f64| {
        usable
            .iter()
            .all(|&(t, h)| h <= riccati_bound(norm0, c, t) * (1.0 + 1e-12))
    };
    if holds(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while !holds(hi) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::FitFailure(
                "norm exceeds the bound for every tested constant".into(),
            ));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

// ---------------------------------------------------------------------------
// phi functions
// ---------------------------------------------------------------------------

/// Order of the truncated Taylor expansions; for |z| < 1/2 the tail is below
/// double-precision resolution.
const TAYLOR_ORDER: usize = 20;
const CONTOUR_POINTS: usize = 32;

/// `phi_j(z) = sum_n z^n / (n + j)!` for j = 1, 2, 3 from the closed forms.
fn phi123_direct(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let e = z.exp();
    let one = Complex64::new(1.0, 0.0);
    let p1 = (e - one) / z;
    let p2 = (e - one - z) / (z * z);
    let p3 = (e - one - z - 0.5 * z * z) / (z * z * z);
    (p1, p2, p3)
}

fn phi123_taylor(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let mut factorial = [0.0f64; TAYLOR_ORDER + 4];
    factorial[0] = 1.0;
    for i in 1..factorial.len() {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    let mut p = [Complex64::new(0.0, 0.0); 3];
    let mut zn = Complex64::new(1.0, 0.0);
    for n in 0..=TAYLOR_ORDER {
        for (j, pj) in p.iter_mut().enumerate() {
            *pj += zn / factorial[n + j + 1];
        }
        zn *= z;
    }
    (p[0], p[1], p[2])
}

/// Evaluate the phi functions by averaging the closed forms over a unit
/// circle around `z` (exact for entire functions, and the contour keeps the
/// evaluation points away from the cancellation-prone origin); fall back to
/// the truncated Taylor series for small `|z|`.
fn phi123(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < 0.5 {
        return phi123_taylor(z);
    }
    let mut acc = (
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    for j in 0..CONTOUR_POINTS {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        let r = z + Complex64::new(theta.cos(), theta.sin());
        let (p1, p2, p3) = phi123_direct(r);
        acc.0 += p1;
        acc.1 += p2;
        acc.2 += p3;
    }
    let w = 1.0 / CONTOUR_POINTS as f64;
    (acc.0 * w, acc.1 * w, acc.2 * w)
}

fn phi1(z: Complex64) -> Complex64 {
    phi123(z).0
}

// ---------------------------------------------------------------------------
// The stepper
// ---------------------------------------------------------------------------

/// Workspaces and tabulated coefficients for the exponential integrator on a
/// fixed grid and symbol. Rebuilding the coefficient tables is an O(N)
/// sweep through the phi functions, so the driver reuses a cached dt when
/// the CFL bound allows it.
struct EtdStepper {
    grid: Arc<Grid>,
    /// Linear multiplier `-i kappa m(kappa)` per slot (zero at Nyquist).
    linear: Vec<Complex64>,
    dt: f64,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
    padded: usize,
    plan_fwd: Arc<dyn Fft<f64>>,
    plan_inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    pad_buf: Vec<Complex64>,
    stage: Vec<Complex64>,
    stage_c: Vec<Complex64>,
    n_u: Vec<Complex64>,
    n_a: Vec<Complex64>,
    n_b: Vec<Complex64>,
    n_c: Vec<Complex64>,
    /// max |u| over the padded collocation values seen in the last stage-0
    /// nonlinear evaluation; drives the CFL choice for the next step.
    last_max_abs: f64,
}

impl EtdStepper {
    fn new(grid: &Arc<Grid>, symbol: &Symbol) -> Result<Self> {
        let n = grid.n_modes();
        let padded = 3 * n / 2;
        let mut linear = Vec::with_capacity(n);
        for &kappa in grid.wavenumbers() {
            linear.push(Complex64::new(0.0, -kappa * symbol.eval(kappa)?));
        }
        linear[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
        let plan_fwd = fft::plan(padded, false);
        let plan_inv = fft::plan(padded, true);
        let scratch_len = plan_fwd
            .get_inplace_scratch_len()
            .max(plan_inv.get_inplace_scratch_len());
        Ok(EtdStepper {
            grid: Arc::clone(grid),
            linear,
            dt: f64::NAN,
            e_full: vec![Complex64::default(); n],
            e_half: vec![Complex64::default(); n],
            q: vec![Complex64::default(); n],
            f1: vec![Complex64::default(); n],
            f2: vec![Complex64::default(); n],
            f3: vec![Complex64::default(); n],
            padded,
            plan_fwd,
            plan_inv,
            scratch: vec![Complex64::default(); scratch_len],
            pad_buf: vec![Complex64::default(); padded],
            stage: vec![Complex64::default(); n],
            stage_c: vec![Complex64::default(); n],
            n_u: vec![Complex64::default(); n],
            n_a: vec![Complex64::default(); n],
            n_b: vec![Complex64::default(); n],
            n_c: vec![Complex64::default(); n],
            last_max_abs: 0.0,
        })
    }

    fn set_dt(&mut self, dt: f64) {
        if dt == self.dt {
            return;
        }
        for (slot, &lin) in self.linear.iter().enumerate() {
            let z = lin * dt;
            self.e_full[slot] = z.exp();
            self.e_half[slot] = (0.5 * z).exp();
            self.q[slot] = 0.5 * dt * phi1(0.5 * z);
            let (p1, p2, p3) = phi123(z);
            self.f1[slot] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
            self.f2[slot] = 2.0 * dt * (p2 - 2.0 * p3);
            self.f3[slot] = dt * (4.0 * p3 - p2);
        }
        self.dt = dt;
    }

    /// `dst = -(1/2) i kappa (src_values^2)^` through the padded grid.
    fn nonlinear(&mut self, src: &[Complex64], dst_sel: NonlinearSlot, record_max: bool) {
        debug_assert_eq!(src.len(), self.grid.n_modes());
        let padded_spec = pad_spectrum(src, self.padded);
        self.pad_buf.copy_from_slice(&padded_spec);
        self.plan_inv
            .process_with_scratch(&mut self.pad_buf, &mut self.scratch);
        if record_max {
            let mut max_abs: f64 = 0.0;
            for c in &self.pad_buf {
                max_abs = max_abs.max(c.re.abs());
            }
            self.last_max_abs = max_abs;
        }
        for c in &mut self.pad_buf {
            *c = Complex64::new(c.re * c.re, 0.0);
        }
        self.plan_fwd
            .process_with_scratch(&mut self.pad_buf, &mut self.scratch);
        let scale = 1.0 / self.padded as f64;
        let dst = match dst_sel {
            NonlinearSlot::U => &mut self.n_u,
            NonlinearSlot::A => &mut self.n_a,
            NonlinearSlot::B => &mut self.n_b,
            NonlinearSlot::C => &mut self.n_c,
        };
        truncate_spectrum(&self.pad_buf, dst, scale);
        for (c, &kappa) in dst.iter_mut().zip(self.grid.wavenumbers()) {
            *c *= Complex64::new(0.0, -0.5 * kappa);
        }
        dst[self.grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
    }

    /// One step of the Cox-Matthews scheme at the dt set by `set_dt`.
    fn step(&mut self, u_hat: &mut [Complex64]) {
        let n = u_hat.len();
        self.nonlinear(u_hat, NonlinearSlot::U, true);

        for k in 0..n {
            self.stage[k] = self.e_half[k] * u_hat[k] + self.q[k] * self.n_u[k];
        }
        let a = std::mem::take(&mut self.stage);
        self.nonlinear(&a, NonlinearSlot::A, false);
        self.stage = a;

        for k in 0..n {
            self.stage_c[k] = self.e_half[k] * u_hat[k] + self.q[k] * self.n_a[k];
        }
        let b = std::mem::take(&mut self.stage_c);
        self.nonlinear(&b, NonlinearSlot::B, false);
        self.stage_c = b;

        // stage_c := E2 * a + Q * (2 N(b) - N(u))
        for k in 0..n {
            self.stage_c[k] = self.e_half[k] * self.stage[k]
                + self.q[k] * (2.0 * self.n_b[k] - self.n_u[k]);
        }
        let c = std::mem::take(&mut self.stage_c);
        self.nonlinear(&c, NonlinearSlot::C, false);
        self.stage_c = c;

        for k in 0..n {
            u_hat[k] = self.e_full[k] * u_hat[k]
                + self.f1[k] * self.n_u[k]
                + self.f2[k] * (self.n_a[k] + self.n_b[k])
                + self.f3[k] * self.n_c[k];
        }
    }
}

enum NonlinearSlot {
    U,
    A,
    B,
    C,
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// A resumable evolution. Diagnostics stay accessible after an abort, so a
/// blow-up still yields the partial history and breakdown time.
pub struct Evolution {
    stepper: EtdStepper,
    symbol: Symbol,
    cfg: SolverConfig,
    sobolev_index: f64,
    u_hat: Vec<Complex64>,
    t: f64,
    steps: usize,
    diagnostics: Diagnostics,
    max_abs: f64,
}

impl Evolution {
    pub fn new(u0: &Field, symbol: &Symbol, cfg: &SolverConfig, s: f64) -> Result<Self> {
        cfg.validate()?;
        let stepper = EtdStepper::new(u0.grid(), symbol)?;
        let mut diagnostics = Diagnostics {
            sobolev_index: s,
            ..Diagnostics::default()
        };
        diagnostics.record(0.0, u0, symbol, s)?;
        Ok(Evolution {
            stepper,
            symbol: symbol.clone(),
            cfg: cfg.clone(),
            sobolev_index: s,
            u_hat: u0.spectrum().to_vec(),
            t: 0.0,
            steps: 0,
            diagnostics,
            max_abs: u0.max_abs(),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Materialize the current state.
    pub fn field(&self) -> Field {
        Field::from_synced_spectrum(&self.stepper.grid, self.u_hat.clone())
    }

    /// Advance to `t_target`, recording snapshots every `monitor_every`
    /// steps and at the target itself.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        if t_target < self.t {
            return Err(Error::Config(format!(
                "cannot advance backwards: t = {}, target {t_target}",
                self.t
            )));
        }
        let time_scale = t_target.abs().max(1.0);
        while self.t < t_target - 1e-12 * time_scale {
            let remaining = t_target - self.t;
            let bound = match self.cfg.dt_policy {
                DtPolicy::Fixed(dt) => dt,
                DtPolicy::Cfl { safety } => {
                    let kappa_max = self.stepper.grid.max_wavenumber();
                    safety / (kappa_max * self.max_abs).max(f64::MIN_POSITIVE)
                }
            };
            let mut dt = bound.min(remaining);
            // Reuse the cached coefficient tables when they are CFL-safe and
            // not wastefully small; exact landing on the target overrides.
            let cached = self.stepper.dt;
            if cached.is_finite() && cached <= bound && cached >= 0.5 * dt && cached <= remaining {
                dt = cached;
            }
            if !(dt.is_finite() && dt > 1e-13 * time_scale) {
                return Err(Error::StepUnderflow { time: self.t, dt });
            }
            self.stepper.set_dt(dt);
            self.stepper.step(&mut self.u_hat);
            self.t += dt;
            self.steps += 1;
            self.max_abs = self.stepper.last_max_abs;

            if !self.u_hat.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Blowup { time: self.t });
            }
            let at_target = self.t >= t_target - 1e-12 * time_scale;
            if self.steps % self.cfg.monitor_every == 0 || at_target {
                self.snapshot()?;
            }
        }
        Ok(())
    }

    fn snapshot(&mut self) -> Result<()> {
        let u = self.field();
        self.diagnostics
            .record(self.t, &u, &self.symbol, self.sobolev_index)?;
        let slope = u.derivative().max_abs();
        if slope > self.cfg.blowup_threshold {
            return Err(Error::Blowup { time: self.t });
        }
        Ok(())
    }

    /// Fit the norm-bound constant over the recorded history.
    pub fn fit_norm_constant(&mut self) {
        self.diagnostics.fitted_cs = fit_cs(&self.diagnostics).ok();
    }

    pub fn into_parts(mut self) -> (Field, Diagnostics) {
        self.fit_norm_constant();
        let field = self.field();
        (field, self.diagnostics)
    }
}

/// Advance one step of the exponential integrator.
pub fn step(u: &Field, dt: f64, symbol: &Symbol) -> Result<Field> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("step needs dt > 0, got {dt}")));
    }
    let mut stepper = EtdStepper::new(u.grid(), symbol)?;
    stepper.set_dt(dt);
    let mut u_hat = u.spectrum().to_vec();
    stepper.step(&mut u_hat);
    if !u_hat.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::Blowup { time: dt });
    }
    Ok(Field::from_synced_spectrum(u.grid(), u_hat))
}

/// Evolve `u0` to `cfg.t_end` and return the final state plus diagnostics
/// (with the norm-bound constant fitted).
pub fn evolve(
    u0: &Field,
    symbol: &Symbol,
    cfg: &SolverConfig,
    s: f64,
) -> Result<(Field, Diagnostics)> {
    let mut evolution = Evolution::new(u0, symbol, cfg, s)?;
    evolution.advance_to(cfg.t_end)?;
    Ok(evolution.into_parts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid_2pi(n: usize) -> Arc<Grid> {
        Grid::new(2.0 * PI, n).unwrap()
    }

    #[test]
    fn phi_functions_match_series_across_threshold() {
        // Compare contour evaluation against the Taylor series just above
        // and below the switch, for imaginary arguments as used here.
        for &y in &[0.4, 0.499, 0.501, 0.7, 2.0, 50.0] {
            let z = Complex64::new(0.0, y);
            let (c1, c2, c3) = phi123(z);
            let (d1, d2, d3) = phi123_direct(z);
            assert!((c1 - d1).norm() < 1e-12);
            assert!((c2 - d2).norm() < 1e-12);
            assert!((c3 - d3).norm() < 1e-12);
        }
        let (p1, p2, p3) = phi123(Complex64::new(0.0, 0.0));
        assert_relative_eq!(p1.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p2.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p3.re, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_field_is_fixed_point() {
        let g = grid_2pi(32);
        let u = Field::zero(&g);
        let next = step(&u, 0.1, &Symbol::whitham()).unwrap();
        assert_eq!(next.max_abs(), 0.0);
        let (fin, diag) = evolve(&u, &Symbol::whitham(), &SolverConfig::default(), 2.0).unwrap();
        assert_eq!(fin.max_abs(), 0.0);
        assert!(diag.l2.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_state_is_preserved() {
        let g = grid_2pi(32);
        let u = Field::constant(&g, 3.0);
        let next = step(&u, 0.05, &Symbol::whitham()).unwrap();
        for v in next.values() {
            assert_relative_eq!(*v, 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn linear_regime_phase_speed() {
        // Tiny amplitude: the dynamics is the exactly-integrated linear
        // part, u(x, t) = eps * sin(x - m(1) t).
        let g = grid_2pi(64);
        let eps = 1e-8;
        let u0 = Field::from_fn(&g, |x| eps * x.sin());
        let cfg = SolverConfig {
            dt_policy: DtPolicy::Fixed(0.01),
            t_end: 1.0,
            ..Default::default()
        };
        let (u, _) = evolve(&u0, &Symbol::whitham(), &cfg, 2.0).unwrap();
        let speed = 0.8726936208978297;
        let exact = Field::from_fn(&g, |x| eps * (x - speed).sin());
        let err = u.sub(&exact).unwrap().l2_norm() / exact.l2_norm();
        assert!(err < 1e-6, "relative phase error {err}");
    }

    #[test]
    fn conserved_quantities_closed_forms() {
        let g = grid_2pi(128);
        let u = Field::from_fn(&g, |x| x.sin());
        let (mean, l2, ham) = conserved_quantities(&u, &Symbol::whitham()).unwrap();
        assert!(mean.abs() < 1e-14);
        assert_relative_eq!(l2, PI, max_relative = 1e-12);
        assert_relative_eq!(ham, 0.5 * 0.8726936208978297 * PI, max_relative = 1e-12);

        let z = Field::zero(&g);
        assert_eq!(conserved_quantities(&z, &Symbol::whitham()).unwrap(), (0.0, 0.0, 0.0));

        let u = Field::from_fn(&g, |x| (2.0 * x).cos());
        let (_, _, ham) = conserved_quantities(&u, &Symbol::fkdv(2.0).unwrap()).unwrap();
        assert_relative_eq!(ham, 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn riccati_bound_values() {
        assert_eq!(riccati_bound(1.0, 1.0, 0.5), 2.0);
        assert_eq!(riccati_bound(1.0, 1.0, 0.0), 1.0);
        assert_eq!(riccati_bound(2.0, 1.0, 0.5), f64::INFINITY);
    }

    #[test]
    fn fit_cs_recovers_generator() {
        let diag = Diagnostics {
            times: vec![0.0, 0.1, 0.2],
            hs_norm: vec![
                riccati_bound(1.0, 2.0, 0.0),
                riccati_bound(1.0, 2.0, 0.1),
                riccati_bound(1.0, 2.0, 0.2),
            ],
            ..Default::default()
        };
        let c = fit_cs(&diag).unwrap();
        assert!((c - 2.0).abs() < 1e-5, "fitted {c}");
    }

    #[test]
    fn fit_cs_degenerate_trajectories() {
        let flat = Diagnostics {
            times: vec![0.0, 1.0, 2.0],
            hs_norm: vec![3.0, 3.0, 3.0],
            ..Default::default()
        };
        assert_eq!(fit_cs(&flat).unwrap(), 0.0);
        let decreasing = Diagnostics {
            times: vec![0.0, 1.0],
            hs_norm: vec![3.0, 2.0],
            ..Default::default()
        };
        assert_eq!(fit_cs(&decreasing).unwrap(), 0.0);
        let impossible = Diagnostics {
            times: vec![0.0, 1.0],
            hs_norm: vec![0.0, 1.0],
            ..Default::default()
        };
        assert!(matches!(fit_cs(&impossible), Err(Error::FitFailure(_))));
    }

    #[test]
    fn burgers_matches_characteristics() {
        // m = 0 degenerates to Burgers; the solution of u_t + u u_x = 0 with
        // u0 = sin is u(x, t) = sin(x0) where x = x0 + t sin(x0).
        let g = grid_2pi(512);
        let u0 = Field::from_fn(&g, |x| x.sin());
        let cfg = SolverConfig {
            dt_policy: DtPolicy::Cfl { safety: 0.5 },
            t_end: 0.5,
            monitor_every: 64,
            ..Default::default()
        };
        let (u, _) = evolve(&u0, &Symbol::zero(), &cfg, 2.0).unwrap();
        let t = 0.5;
        let mut max_err: f64 = 0.0;
        for (j, &v) in u.values().iter().enumerate() {
            let x = g.point(j);
            // Newton iteration for the characteristic foot point.
            let mut x0 = x;
            for _ in 0..60 {
                let f = x0 + t * x0.sin() - x;
                let fp = 1.0 + t * x0.cos();
                let dx = f / fp;
                x0 -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            max_err = max_err.max((v - x0.sin()).abs());
        }
        assert!(max_err < 1e-6, "max-norm error {max_err}");
    }

    #[test]
    fn temporal_order_is_fourth() {
        let g = grid_2pi(256);
        let u0 = Field::from_fn(&g, |x| x.sin());
        let symbol = Symbol::whitham();
        let run = |dt: f64| {
            let cfg = SolverConfig {
                dt_policy: DtPolicy::Fixed(dt),
                t_end: 1.0,
                monitor_every: 10_000,
                ..Default::default()
            };
            evolve(&u0, &symbol, &cfg, 2.0).unwrap().0
        };
        let dt = 2.5e-3;
        let reference = run(dt / 8.0);
        let e1 = run(dt).sub(&reference).unwrap().l2_norm();
        let e2 = run(dt / 2.0).sub(&reference).unwrap().l2_norm();
        let factor = e1 / e2;
        assert!(
            (12.0..=20.0).contains(&factor),
            "refinement factor {factor} (e1 = {e1}, e2 = {e2})"
        );
    }

    #[test]
    fn conservation_drift_within_gates() {
        let g = grid_2pi(4096);
        let u0 = Field::from_fn(&g, |x| x.sin());
        let cfg = SolverConfig {
            dt_policy: DtPolicy::Cfl { safety: 0.5 },
            t_end: 1.0,
            monitor_every: 16,
            ..Default::default()
        };
        let (_, diag) = evolve(&u0, &Symbol::whitham(), &cfg, 2.0).unwrap();
        let l2_drift = diag
            .l2
            .iter()
            .map(|v| (v - diag.l2[0]).abs() / diag.l2[0])
            .fold(0.0f64, f64::max);
        let ham_drift = diag
            .hamiltonian
            .iter()
            .map(|v| (v - diag.hamiltonian[0]).abs() / diag.hamiltonian[0].abs())
            .fold(0.0f64, f64::max);
        assert!(l2_drift <= 1e-10, "l2 drift {l2_drift}");
        assert!(ham_drift <= 1e-8, "hamiltonian drift {ham_drift}");
        let mean_drift = diag
            .mean
            .iter()
            .map(|v| (v - diag.mean[0]).abs())
            .fold(0.0f64, f64::max);
        assert!(mean_drift <= 1e-13, "mean drift {mean_drift}");
    }

    #[test]
    fn galilean_frame_change_commutes_with_flow() {
        let g = grid_2pi(256);
        let symbol = Symbol::whitham();
        let omega = 1.0;
        let t = 0.5;
        let u0 = Field::from_fn(&g, |x| x.sin());
        let cfg = SolverConfig {
            dt_policy: DtPolicy::Cfl { safety: 0.25 },
            t_end: t,
            monitor_every: 64,
            ..Default::default()
        };
        let (base, _) = evolve(&u0, &symbol, &cfg, 2.0).unwrap();
        let (boosted, _) = evolve(&u0.offset(omega), &symbol, &cfg, 2.0).unwrap();
        let expected = base.shift(omega * t).offset(omega);
        let gap = boosted.sub(&expected).unwrap().sobolev_norm(2.0);
        assert!(gap <= 1e-8, "frame discrepancy {gap}");
    }

    #[test]
    fn blowup_is_reported_with_time() {
        // Steep Burgers data breaks quickly; the slope monitor must abort.
        let g = grid_2pi(256);
        let u0 = Field::from_fn(&g, |x| 3.0 * x.sin());
        let cfg = SolverConfig {
            dt_policy: DtPolicy::Cfl { safety: 0.5 },
            t_end: 2.0,
            monitor_every: 4,
            blowup_threshold: 50.0,
        };
        let mut evolution = Evolution::new(&u0, &Symbol::zero(), &cfg, 2.0).unwrap();
        let err = evolution.advance_to(2.0).unwrap_err();
        match err {
            Error::Blowup { time } => assert!(time > 0.0 && time < 2.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
        // Partial diagnostics survive the abort.
        assert!(evolution.diagnostics().times.len() > 1);
    }
}
