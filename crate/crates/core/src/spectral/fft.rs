//! Multi-dimensional FFTs on the torus grid.
//!
//! Forward transforms are scaled by `1 / n^dim`, so the coefficients are the
//! Fourier-series coefficients of the sampled field: a constant `1` maps to a
//! unit mean mode and `cos(x)` to `1/2` at `k = ±1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

type Plan = Arc<dyn Fft<f64>>;

struct Plans {
    forward: Plan,
    inverse: Plan,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transform(grid: &TorusGrid, data: &mut [Complex64], forward: bool) {
    debug_assert_eq!(data.len(), grid.len());
    let n = grid.n();
    let p = plans(n);
    let plan = if forward { &p.forward } else { &p.inverse };
    // rows are contiguous
    plan.process(data);
    if grid.dim() == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                column[i] = data[i * n + j];
            }
            plan.process(&mut column);
            for i in 0..n {
                data[i * n + j] = column[i];
            }
        }
    }
}

/// In-place forward transform with `1 / n^dim` scaling.
pub fn forward(grid: &TorusGrid, data: &mut [Complex64]) {
    transform(grid, data, true);
    let scale = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// In-place unscaled inverse transform (exact inverse of [`forward`]).
pub fn inverse(grid: &TorusGrid, data: &mut [Complex64]) {
    transform(grid, data, false);
}

pub fn forward_real(grid: &TorusGrid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(grid, &mut buf);
    buf
}

/// Inverse transform keeping the real part.
pub fn inverse_real(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    inverse(grid, &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}
