//! Fourier multiplier symbols `m` and numerical checks of their structure.
//!
//! All symbols here are even and real-valued; evaluation goes through
//! `|xi|` so evenness holds bitwise. Each [`Symbol`] carries declared tail
//! metadata: a growth exponent `p` with `|m| <~ |xi|^p` for large `|xi|`, an
//! optional tail Lipschitz exponent `gamma` with
//! `|m(xi+y) - m(xi)| <= C |y| |xi|^(gamma-1)` beyond the threshold, and an
//! optional lower exponent `r` with `|m| >~ |xi|^r`. The checker measures
//! how well the declarations hold on samples.

use crate::error::{Error, Result};
use crate::experiments::fit_loglog_slope;
use crate::report::SlopeFit;

/// Piecewise-linear table for user-supplied symbols. Samples are stored for
/// `xi >= 0`; evaluation never extrapolates.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    xi: Vec<f64>,
    values: Vec<f64>,
}

impl SymbolTable {
    /// Build a table from `(xi, m(xi))` samples. Rows with negative `xi` are
    /// dropped (the symbol is even); the rest must be strictly increasing in
    /// `xi` with at least two entries.
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        samples.retain(|&(x, _)| x >= 0.0);
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.len() < 2 {
            return Err(Error::InsufficientData(
                "custom symbol table needs at least two samples with xi >= 0".into(),
            ));
        }
        for w in samples.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Config(format!(
                    "duplicate abscissa {} in custom symbol table",
                    w[0].0
                )));
            }
        }
        if samples.iter().any(|&(x, m)| !x.is_finite() || !m.is_finite()) {
            return Err(Error::Config("non-finite entry in custom symbol table".into()));
        }
        let (xi, values) = samples.into_iter().unzip();
        Ok(SymbolTable { xi, values })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xi[0], *self.xi.last().unwrap())
    }

    fn eval(&self, xi_abs: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if xi_abs < lo || xi_abs > hi {
            return Err(Error::SymbolOutOfRange {
                xi: xi_abs,
                min: lo,
                max: hi,
            });
        }
        let i = match self.xi.binary_search_by(|x| x.total_cmp(&xi_abs)) {
            Ok(i) => return Ok(self.values[i]),
            Err(i) => i - 1, // xi_abs > xi[0] here, so i >= 1
        };
        let t = (xi_abs - self.xi[i]) / (self.xi[i + 1] - self.xi[i]);
        Ok(self.values[i] + t * (self.values[i + 1] - self.values[i]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `m(xi) = sqrt(tanh(xi)/xi)`, the exact dispersion of gravity waves.
    Whitham,
    /// `m(xi) = |xi|^alpha`.
    FractionalKdv(f64),
    /// `m(xi) = xi^2`.
    Kdv,
    /// `m(xi) = |xi|`.
    BenjaminOno,
    /// `m = 0`; the equation degenerates to the inviscid Burgers equation.
    Zero,
    /// Linear interpolation of tabulated samples.
    Custom(SymbolTable),
}

/// A multiplier symbol together with its declared tail metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub kind: SymbolKind,
    /// Declared `p` with `|m(xi)| <~ |xi|^p` for `|xi| > tail_threshold`.
    pub growth_exponent: f64,
    /// Declared `gamma` of the tail Lipschitz condition, if any.
    pub tail_lipschitz_gamma: Option<f64>,
    /// Declared `r` with `|m(xi)| >~ |xi|^r` for `|xi| > tail_threshold`, if any.
    pub lower_exponent: Option<f64>,
    /// Threshold beyond which the tail conditions are claimed.
    pub tail_threshold: f64,
}

impl Symbol {
    pub fn whitham() -> Symbol {
        Symbol {
            kind: SymbolKind::Whitham,
            growth_exponent: 0.0,
            tail_lipschitz_gamma: Some(0.0),
            lower_exponent: None,
            tail_threshold: 1.0,
        }
    }

    pub fn fkdv(alpha: f64) -> Result<Symbol> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Config(format!(
                "fractional exponent must be a nonnegative real, got {alpha}"
            )));
        }
        Ok(Symbol {
            kind: SymbolKind::FractionalKdv(alpha),
            growth_exponent: alpha,
            tail_lipschitz_gamma: Some(alpha),
            lower_exponent: Some(alpha),
            tail_threshold: 1.0,
        })
    }

    pub fn kdv() -> Symbol {
        Symbol {
            kind: SymbolKind::Kdv,
            growth_exponent: 2.0,
            tail_lipschitz_gamma: Some(2.0),
            lower_exponent: Some(2.0),
            tail_threshold: 1.0,
        }
    }

    pub fn benjamin_ono() -> Symbol {
        Symbol {
            kind: SymbolKind::BenjaminOno,
            growth_exponent: 1.0,
            tail_lipschitz_gamma: Some(1.0),
            lower_exponent: Some(1.0),
            tail_threshold: 1.0,
        }
    }

    pub fn zero() -> Symbol {
        Symbol {
            kind: SymbolKind::Zero,
            growth_exponent: 0.0,
            tail_lipschitz_gamma: Some(0.0),
            lower_exponent: None,
            tail_threshold: 1.0,
        }
    }

    /// A custom symbol with default (unverified) metadata; adjust the public
    /// fields to declare tail behaviour.
    pub fn custom(table: SymbolTable) -> Symbol {
        Symbol {
            kind: SymbolKind::Custom(table),
            growth_exponent: 0.0,
            tail_lipschitz_gamma: None,
            lower_exponent: None,
            tail_threshold: 1.0,
        }
    }

    /// Parse the command-line spelling: `whitham`, `kdv`, `bo`, `zero`,
    /// `fkdv:<alpha>`, `custom:<path>` (two-column text file).
    pub fn parse(spec: &str) -> Result<Symbol> {
        match spec {
            "whitham" => Ok(Symbol::whitham()),
            "kdv" => Ok(Symbol::kdv()),
            "bo" => Ok(Symbol::benjamin_ono()),
            "zero" => Ok(Symbol::zero()),
            _ => {
                if let Some(alpha) = spec.strip_prefix("fkdv:") {
                    let alpha: f64 = alpha.parse().map_err(|_| {
                        Error::Config(format!("cannot parse fractional exponent in `{spec}`"))
                    })?;
                    Symbol::fkdv(alpha)
                } else if let Some(path) = spec.strip_prefix("custom:") {
                    Ok(Symbol::custom(crate::io::load_symbol_table(path)?))
                } else {
                    Err(Error::Config(format!(
                        "unknown symbol `{spec}` (expected whitham, kdv, bo, zero, fkdv:<alpha>, custom:<path>)"
                    )))
                }
            }
        }
    }

    /// Short spelling for reports.
    pub fn name(&self) -> String {
        match &self.kind {
            SymbolKind::Whitham => "whitham".into(),
            SymbolKind::FractionalKdv(a) => format!("fkdv:{a}"),
            SymbolKind::Kdv => "kdv".into(),
            SymbolKind::BenjaminOno => "bo".into(),
            SymbolKind::Zero => "zero".into(),
            SymbolKind::Custom(_) => "custom".into(),
        }
    }

    /// Evaluate `m(xi)`. Even by construction: the kernel only sees `|xi|`.
    pub fn eval(&self, xi: f64) -> Result<f64> {
        if !xi.is_finite() {
            return Err(Error::Config(format!("symbol evaluated at non-finite xi = {xi}")));
        }
        let x = xi.abs();
        Ok(match &self.kind {
            SymbolKind::Whitham => whitham_symbol(x),
            SymbolKind::FractionalKdv(alpha) => x.powf(*alpha),
            SymbolKind::Kdv => x * x,
            SymbolKind::BenjaminOno => x,
            SymbolKind::Zero => 0.0,
            SymbolKind::Custom(table) => table.eval(x)?,
        })
    }
}

/// `sqrt(tanh(x)/x)` with the removable singularity at the origin handled by
/// the even series `tanh(x)/x = 1 - x^2/3 + 2 x^4/15 - ...` for tiny `x`.
fn whitham_symbol(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0).sqrt()
    } else {
        (x.tanh() / x).sqrt()
    }
}

/// Outcome of [`check_symbol_conditions`].
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Largest `|m(xi) - m(-xi)|` over the evenness samples.
    pub evenness_defect: f64,
    /// Least-squares exponent of `log |m|` against `log |xi|` on the tail.
    pub tail_exponent: SlopeFit,
    /// Number of tail samples that entered the fit.
    pub tail_samples: usize,
    /// Empirical constant of the tail Lipschitz condition, when `gamma` is
    /// declared: `max |m(xi+y) - m(xi)| / (|y| |xi|^(gamma-1))` over samples.
    pub lipschitz_constant: Option<f64>,
    /// Set when a non-finite Lipschitz ratio was encountered.
    pub lipschitz_violated: bool,
    /// `gamma < 2`, the window in which the dispersive tail is weaker than
    /// the KdV operator and the wave-packet construction applies. `None`
    /// when no `gamma` is declared.
    pub gamma_in_window: Option<bool>,
    pub declared_growth: f64,
    pub declared_gamma: Option<f64>,
    pub declared_lower: Option<f64>,
    /// Per-sample rows `(xi, m(xi), lipschitz ratio or NaN)` for reporting.
    pub samples: Vec<(f64, f64, f64)>,
}

impl ConditionReport {
    /// Fit consistent with declarations: below the growth exponent, and
    /// matching the lower exponent when one is declared.
    pub fn exponent_consistent(&self, tol: f64) -> bool {
        let fit = self.tail_exponent.slope;
        let upper_ok = fit <= self.declared_growth + tol;
        let lower_ok = match self.declared_lower {
            Some(r) => (fit - r).abs() <= tol,
            None => true,
        };
        upper_ok && lower_ok
    }
}

/// Probe offsets for the "sufficiently small |y|" of the tail Lipschitz
/// condition: three decades below the local sample spacing.
const LIPSCHITZ_OFFSETS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Sample a symbol and compare against its declared structure: evenness,
/// tail growth exponent on `[tail_threshold, xi_max]`, and the empirical
/// tail Lipschitz constant.
pub fn check_symbol_conditions(
    symbol: &Symbol,
    xi_max: f64,
    n_samples: usize,
) -> Result<ConditionReport> {
    if n_samples < 16 {
        return Err(Error::Config(format!(
            "condition check needs at least 16 samples, got {n_samples}"
        )));
    }
    let threshold = symbol.tail_threshold;
    if !(xi_max > threshold) {
        return Err(Error::Config(format!(
            "xi_max = {xi_max} must exceed the tail threshold {threshold}"
        )));
    }

    // Evenness over linearly spaced samples of the whole range.
    let mut evenness_defect: f64 = 0.0;
    for i in 1..=n_samples {
        let xi = xi_max * i as f64 / n_samples as f64;
        let defect = (symbol.eval(xi)? - symbol.eval(-xi)?).abs();
        evenness_defect = evenness_defect.max(defect);
    }

    // Tail samples are log-spaced so the exponent fit is well conditioned.
    let log_lo = threshold.ln();
    let log_hi = xi_max.ln();
    let mut fit_points = Vec::with_capacity(n_samples);
    let mut samples = Vec::with_capacity(n_samples);
    let mut lipschitz: Option<f64> = None;
    let mut lipschitz_violated = false;
    let gamma = symbol.tail_lipschitz_gamma;

    for i in 0..n_samples {
        let frac = i as f64 / (n_samples - 1) as f64;
        let xi = (log_lo + frac * (log_hi - log_lo)).exp();
        let m = symbol.eval(xi)?;
        if m.abs() > 0.0 && m.is_finite() {
            fit_points.push((xi, m.abs()));
        }

        let mut worst_ratio = f64::NAN;
        if let Some(g) = gamma {
            // Local spacing of the log-spaced ladder.
            let next = (log_lo + (i + 1) as f64 / (n_samples - 1) as f64 * (log_hi - log_lo)).exp();
            let spacing = (next - xi).abs().max(f64::MIN_POSITIVE);
            for offset in LIPSCHITZ_OFFSETS {
                let y = offset * spacing;
                let shifted = match symbol.eval(xi + y) {
                    Ok(v) => v,
                    Err(Error::SymbolOutOfRange { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let ratio = (shifted - m).abs() / (y * xi.powf(g - 1.0));
                if !ratio.is_finite() {
                    lipschitz_violated = true;
                    continue;
                }
                worst_ratio = if worst_ratio.is_nan() {
                    ratio
                } else {
                    worst_ratio.max(ratio)
                };
                lipschitz = Some(lipschitz.map_or(ratio, |c: f64| c.max(ratio)));
            }
        }
        samples.push((xi, m, worst_ratio));
    }

    if fit_points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "only {} usable tail samples for the exponent fit",
            fit_points.len()
        )));
    }
    let tail_exponent = if fit_points.len() >= 3 {
        fit_loglog_slope(&fit_points)?
    } else {
        // Two points still determine a slope, with no spread estimate.
        let (x0, y0) = fit_points[0];
        let (x1, y1) = fit_points[1];
        SlopeFit {
            slope: (y1.ln() - y0.ln()) / (x1.ln() - x0.ln()),
            halfwidth: f64::INFINITY,
        }
    };

    Ok(ConditionReport {
        evenness_defect,
        tail_samples: fit_points.len(),
        tail_exponent,
        lipschitz_constant: lipschitz,
        lipschitz_violated,
        gamma_in_window: gamma.map(|g| g < 2.0),
        declared_growth: symbol.growth_exponent,
        declared_gamma: gamma,
        declared_lower: symbol.lower_exponent,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn whitham_limit_at_zero_is_one() {
        let m = Symbol::whitham();
        assert_eq!(m.eval(0.0).unwrap(), 1.0);
        // Series and direct formula agree where they hand over.
        let x = 1.0001e-4_f64;
        let direct = (x.tanh() / x).sqrt();
        let x2 = x * x;
        let series = (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0).sqrt();
        assert!((direct - series).abs() < 1e-15);
    }

    #[test]
    fn whitham_at_one_matches_sqrt_tanh() {
        // sqrt(tanh 1) to 20 digits: 0.87269362089782969154
        let m = Symbol::whitham();
        assert_relative_eq!(m.eval(1.0).unwrap(), 0.8726936208978297, epsilon = 1e-15);
    }

    #[test]
    fn whitham_is_strictly_decreasing() {
        let m = Symbol::whitham();
        let mut prev = m.eval(0.0).unwrap();
        for i in 1..=1000 {
            let v = m.eval(i as f64 * 0.05).unwrap();
            assert!(v < prev, "not decreasing at xi = {}", i as f64 * 0.05);
            prev = v;
        }
    }

    #[test]
    fn whitham_tail_approaches_inverse_sqrt() {
        // tanh(100) = 1 to double precision, so m(100) * 10 = 1.
        let m = Symbol::whitham();
        let product = m.eval(100.0).unwrap() * 100.0_f64.sqrt();
        assert!((product - 1.0).abs() < 1e-8);
    }

    #[test]
    fn builtin_values() {
        assert_eq!(Symbol::fkdv(2.0).unwrap().eval(-3.0).unwrap(), 9.0);
        assert_eq!(Symbol::benjamin_ono().eval(5.0).unwrap(), 5.0);
        assert_eq!(Symbol::kdv().eval(-2.0).unwrap(), 4.0);
        assert_eq!(Symbol::zero().eval(7.0).unwrap(), 0.0);
        assert_eq!(Symbol::fkdv(0.0).unwrap().eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn builtin_evenness_is_exact() {
        let symbols = [
            Symbol::whitham(),
            Symbol::fkdv(1.5).unwrap(),
            Symbol::kdv(),
            Symbol::benjamin_ono(),
        ];
        for s in &symbols {
            for i in 0..1000 {
                let xi = (i as f64 + 0.5) * 0.731;
                assert_eq!(s.eval(xi).unwrap(), s.eval(-xi).unwrap());
            }
        }
    }

    #[test]
    fn fkdv_homogeneity() {
        let s = Symbol::fkdv(1.5).unwrap();
        for &xi in &[0.3, 1.0, 7.7, 41.0] {
            for &c in &[2.0, 5.5, 10.0] {
                let lhs = s.eval(c * xi).unwrap();
                let rhs = c.powf(1.5) * s.eval(xi).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn custom_table_interpolates_and_rejects_extrapolation() {
        let table = SymbolTable::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 5.0)]).unwrap();
        let s = Symbol::custom(table);
        assert_eq!(s.eval(0.5).unwrap(), 1.5);
        assert_eq!(s.eval(-1.5).unwrap(), 3.5);
        assert!(matches!(
            s.eval(3.0),
            Err(Error::SymbolOutOfRange { .. })
        ));
    }

    #[test]
    fn condition_check_fkdv() {
        let s = Symbol::fkdv(1.5).unwrap();
        let report = check_symbol_conditions(&s, 1e3, 256).unwrap();
        assert_eq!(report.evenness_defect, 0.0);
        assert!((report.tail_exponent.slope - 1.5).abs() < 0.01);
        assert!(report.exponent_consistent(0.01));
        let c = report.lipschitz_constant.unwrap();
        assert!((c - 1.5).abs() < 0.02, "empirical constant {c}");
        assert_eq!(report.gamma_in_window, Some(true));
    }

    #[test]
    fn condition_check_whitham_decays() {
        let s = Symbol::whitham();
        let report = check_symbol_conditions(&s, 1e3, 256).unwrap();
        assert_eq!(report.evenness_defect, 0.0);
        assert!((report.tail_exponent.slope + 0.5).abs() < 0.01);
        assert!(report.exponent_consistent(0.01));
        // Decaying symbol satisfies the gamma = 0 condition with a small constant.
        assert!(report.lipschitz_constant.unwrap() < 1.0);
        assert!(!report.lipschitz_violated);
    }

    #[test]
    fn condition_check_flags_kdv() {
        let report = check_symbol_conditions(&Symbol::kdv(), 1e3, 256).unwrap();
        assert!((report.tail_exponent.slope - 2.0).abs() < 0.01);
        assert_eq!(report.gamma_in_window, Some(false));
    }

    #[test]
    fn condition_check_validates_input() {
        assert!(check_symbol_conditions(&Symbol::whitham(), 1e3, 8).is_err());
        assert!(check_symbol_conditions(&Symbol::whitham(), 0.5, 64).is_err());
        // All-zero symbol has no usable tail samples.
        assert!(matches!(
            check_symbol_conditions(&Symbol::zero(), 1e3, 64),
            Err(Error::InsufficientData(_))
        ));
    }
}
