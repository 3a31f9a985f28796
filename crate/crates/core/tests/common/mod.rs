use std::sync::Arc;

use whitham::{Complex64, Field, Grid};

/// Seeded band-limited field: random coefficients up to `band`, conjugate
/// symmetric so the synthesis is real.
pub fn random_band_limited(grid: &Arc<Grid>, band: usize, rng: &mut impl rand::Rng) -> Field {
    let n = grid.n_modes();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    spectrum[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    for k in 1..=band.min(n / 2 - 1) {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        spectrum[k] = c;
        spectrum[n - k] = c.conj();
    }
    Field::from_spectrum(grid, spectrum).unwrap()
}
