//! Uniform periodic collocation grids.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A uniform discretization of the torus of circumference `length`.
///
/// Collocation points are `x_j = j * length / n_modes`, `j = 0..n_modes`.
/// Wavenumbers are stored in FFT slot order: slot `j < n_modes/2` carries
/// `2*pi*j/length`, slot `j >= n_modes/2` carries `2*pi*(j - n_modes)/length`.
/// Slot `n_modes/2` is the unpaired Nyquist mode.
#[derive(Debug, Clone)]
pub struct Grid {
    length: f64,
    n_modes: usize,
    wavenumbers: Vec<f64>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.length.to_bits() == other.length.to_bits() && self.n_modes == other.n_modes
    }
}

impl Grid {
    /// Build a grid. `n_modes` must be a power of two and at least 8.
    pub fn new(length: f64, n_modes: usize) -> Result<Arc<Grid>> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!(
                "grid length must be positive and finite, got {length}"
            )));
        }
        if n_modes < 8 || !n_modes.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_modes must be a power of two >= 8, got {n_modes}"
            )));
        }
        let wavenumbers = (0..n_modes)
            .map(|j| {
                let k = if j < n_modes / 2 {
                    j as f64
                } else {
                    j as f64 - n_modes as f64
                };
                2.0 * PI * k / length
            })
            .collect();
        Ok(Arc::new(Grid {
            length,
            n_modes,
            wavenumbers,
        }))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Grid spacing `length / n_modes`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n_modes as f64
    }

    /// Wavenumbers in FFT slot order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Magnitude of the largest resolved wavenumber, `pi * n_modes / length`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n_modes as f64 / self.length
    }

    /// The j-th collocation point.
    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.length / self.n_modes as f64
    }

    /// All collocation points.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n_modes).map(|j| self.point(j)).collect()
    }

    /// Slot index of the unpaired Nyquist mode.
    pub fn nyquist_slot(&self) -> usize {
        self.n_modes / 2
    }

    /// FFT slot for a signed mode index, or `None` when out of band.
    pub fn slot_of(&self, k: isize) -> Option<usize> {
        let half = (self.n_modes / 2) as isize;
        if k >= -half && k < half {
            Some(if k >= 0 {
                k as usize
            } else {
                (k + self.n_modes as isize) as usize
            })
        } else {
            None
        }
    }

    /// Signed mode index of an FFT slot.
    pub fn signed_index(&self, slot: usize) -> isize {
        if slot < self.n_modes / 2 {
            slot as isize
        } else {
            slot as isize - self.n_modes as isize
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eight_point_grid_on_2pi() {
        let g = Grid::new(2.0 * PI, 8).unwrap();
        for j in 0..8 {
            assert!((g.point(j) - j as f64 * PI / 4.0).abs() < 1e-15);
        }
        let expected: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (k, e) in g.wavenumbers().iter().zip(&expected) {
            assert!((k - e).abs() < 1e-15);
        }
        assert_eq!(g.nyquist_slot(), 4);
    }

    #[test]
    fn wavenumber_spacing_follows_length() {
        let g = Grid::new(4.0 * PI, 16).unwrap();
        assert!((g.wavenumbers()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(2.0 * PI, 6).is_err());
        assert!(Grid::new(2.0 * PI, 4).is_err());
        assert!(Grid::new(-1.0, 8).is_err());
    }

    #[test]
    fn wavenumbers_antisymmetric_except_nyquist() {
        let g = Grid::new(5.0, 32).unwrap();
        for k in 1..16isize {
            let plus = g.wavenumbers()[g.slot_of(k).unwrap()];
            let minus = g.wavenumbers()[g.slot_of(-k).unwrap()];
            assert_eq!(plus, -minus);
        }
        assert!(g.slot_of(16).is_none());
        assert!(g.slot_of(-16).is_some());
    }

    #[test]
    fn slot_round_trip() {
        let g = Grid::new(1.0, 64).unwrap();
        for slot in 0..64 {
            let k = g.signed_index(slot);
            assert_eq!(g.slot_of(k), Some(slot));
        }
    }
}
