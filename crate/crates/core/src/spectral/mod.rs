//! Torus geometry, Fourier transforms and spectral calculus.

pub mod calculus;
pub mod fft;
pub mod field;
pub mod grid;
pub mod random;
pub mod snapshot;

pub use calculus::{
    dealias, differentiate, divergence, gradient, laplacian, leray_decompose, norm, DiffKind,
    Field, NormKind,
};
pub use field::{ComplexField, ScalarField, Spectrum, VectorField};
pub use grid::{TorusGrid, Wavevector};

/// Forward transform of a scalar or vector field (one spectrum per component).
pub fn transform(f: &Field) -> Vec<Spectrum> {
    match f {
        Field::Scalar(s) => vec![s.transform()],
        Field::Vector(v) => v.transform(),
    }
}

#[cfg(test)]
mod tests {
    use super::random::random_scalar;
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_maps_to_mean_mode() {
        let g = TorusGrid::new(2, 8).unwrap();
        let s = ScalarField::constant(g, 1.0).transform();
        assert!((s.coeffs()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_coefficients() {
        let g = TorusGrid::new(1, 16).unwrap();
        let s = ScalarField::from_fn(g, |x| x[0].cos()).transform();
        for i in 0..g.len() {
            let k = g.wavevector(i)[0];
            let want = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!(
                (s.coeffs()[i] - Complex64::new(want, 0.0)).norm() < 1e-15,
                "k={k}"
            );
        }
    }

    #[test]
    fn round_trip_random() {
        for dim in [1, 2] {
            let g = TorusGrid::new(dim, 32).unwrap();
            let f =
                ScalarField::from_fn(g, |x| (3.0 * x[0]).sin() * (x[1] + 0.3).cos() + 0.1 * x[0]);
            let back = f.transform().to_real().unwrap();
            let err = back.sub(&f).unwrap().max_abs() / f.max_abs();
            assert!(err < 1e-12, "{err}");
            let r = random_scalar(g, 0.0, 8);
            let s = r.transform();
            assert!(s.hermitian_defect() < 1e-15);
        }
    }

    #[test]
    fn parseval() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = random_scalar(g, 0.5, 21);
        let l2sq = calculus::l2_norm(&f).powi(2);
        let spec = f.transform().energy() * g.volume();
        assert!((l2sq - spec).abs() <= 1e-10 * l2sq);
    }
}
