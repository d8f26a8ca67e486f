//! Seeded smooth random fields, band-limited to the dealiased band.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::calculus::{gradient, leray_spectra};
use super::field::{ScalarField, Spectrum, VectorField};
use super::grid::TorusGrid;

fn random_spectrum(grid: TorusGrid, decay: f64, rng: &mut ChaCha8Rng) -> Spectrum {
    let mut s = Spectrum::zeros(grid, true);
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        if TorusGrid::norm_sq(k) == 0 || !grid.in_band(k) {
            continue;
        }
        let j = grid
            .index_of([-k[0], -k[1]])
            .expect("negated in-band mode is on the lattice");
        if j < i {
            continue;
        }
        let amp = (1.0 + TorusGrid::norm_sq(k) as f64).powf(-decay / 2.0);
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
        s.coeffs_mut()[i] = c;
        s.coeffs_mut()[j] = c.conj();
    }
    s
}

/// Mean-zero real field with coefficients decaying like `(1+|k|²)^{-decay/2}`.
pub fn random_scalar(grid: TorusGrid, decay: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_spectrum(grid, decay, &mut rng)
        .to_real()
        .expect("hermitian")
}

pub fn random_vector(grid: TorusGrid, decay: f64, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectra: Vec<Spectrum> = (0..grid.dim())
        .map(|_| random_spectrum(grid, decay, &mut rng))
        .collect();
    VectorField::from_spectra(&spectra).expect("hermitian")
}

/// Divergence-free, mean-zero random field (zero in one dimension).
pub fn random_solenoidal(grid: TorusGrid, decay: f64, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectra: Vec<Spectrum> = (0..grid.dim())
        .map(|_| random_spectrum(grid, decay, &mut rng))
        .collect();
    let (p, _) = leray_spectra(&spectra);
    VectorField::from_spectra(&p).expect("hermitian")
}

/// Gradient of a random potential.
pub fn random_gradient(grid: TorusGrid, decay: f64, seed: u64) -> VectorField {
    gradient(&random_scalar(grid, decay + 1.0, seed))
}
