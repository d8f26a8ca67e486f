//! Spectral differentiation, Leray decomposition, dealiasing and norms.
//!
//! Every derivative multiplier vanishes on Nyquist modes.

use num_complex::Complex64;

use super::field::{ScalarField, Spectrum, VectorField};
use super::grid::{TorusGrid, Wavevector};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Scalar(ScalarField),
    Vector(VectorField),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    Gradient,
    Divergence,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// `(Σ_k (1+|k|²)^s |f̂_k|²)^{1/2}`, scaled so that `s = 0` is the L² norm.
    Sobolev(f64),
    /// Trapezoid-rule `L^p` norm; `p = ∞` gives the max norm.
    Lebesgue(f64),
}

pub fn differentiate(f: &Field, kind: DiffKind) -> Result<Field> {
    match (f, kind) {
        (Field::Scalar(s), DiffKind::Gradient) => Ok(Field::Vector(gradient(s))),
        (Field::Scalar(s), DiffKind::Laplacian) => Ok(Field::Scalar(laplacian(s))),
        (Field::Vector(v), DiffKind::Divergence) => Ok(Field::Scalar(divergence(v))),
        (Field::Vector(v), DiffKind::Laplacian) => Ok(Field::Vector(v.map_components(laplacian))),
        (Field::Scalar(_), DiffKind::Divergence) => {
            Err(Error::Arity("divergence of a scalar field".into()))
        }
        (Field::Vector(_), DiffKind::Gradient) => Err(Error::Arity(
            "gradient of a vector field (tensor output unsupported)".into(),
        )),
    }
}

#[inline]
fn ik(grid: &TorusGrid, k: Wavevector, d: usize) -> Complex64 {
    if grid.is_nyquist(k) {
        ZERO
    } else {
        I * k[d] as f64
    }
}

/// Spectrum of `∂_d f`.
pub fn partial_spectrum(s: &Spectrum, d: usize) -> Spectrum {
    let grid = *s.grid();
    s.apply_multiplier(|k| ik(&grid, k, d))
}

pub fn gradient_spectra(s: &Spectrum) -> Vec<Spectrum> {
    (0..s.grid().dim())
        .map(|d| partial_spectrum(s, d))
        .collect()
}

pub fn divergence_spectrum(spectra: &[Spectrum]) -> Spectrum {
    let grid = *spectra[0].grid();
    let mut out = Spectrum::zeros(grid, spectra[0].is_hermitian());
    for (d, s) in spectra.iter().enumerate() {
        for (i, (o, c)) in out.coeffs_mut().iter_mut().zip(s.coeffs()).enumerate() {
            *o += ik(&grid, grid.wavevector(i), d) * c;
        }
    }
    out
}

pub fn laplacian_spectrum(s: &Spectrum) -> Spectrum {
    let grid = *s.grid();
    s.apply_multiplier(|k| {
        if grid.is_nyquist(k) {
            ZERO
        } else {
            Complex64::new(-(TorusGrid::norm_sq(k) as f64), 0.0)
        }
    })
}

/// Mean-zero solution of `Δu = f` (the mean of `f` is discarded).
pub fn inverse_laplacian_spectrum(s: &Spectrum) -> Spectrum {
    let grid = *s.grid();
    s.apply_multiplier(|k| {
        let k2 = TorusGrid::norm_sq(k);
        if k2 == 0 || grid.is_nyquist(k) {
            ZERO
        } else {
            Complex64::new(-1.0 / k2 as f64, 0.0)
        }
    })
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let spectra = gradient_spectra(&f.transform());
    VectorField::from_spectra(&spectra).expect("gradient spectra are hermitian")
}

pub fn divergence(v: &VectorField) -> ScalarField {
    divergence_spectrum(&v.transform())
        .to_real()
        .expect("hermitian")
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    laplacian_spectrum(&f.transform())
        .to_real()
        .expect("hermitian")
}

pub fn partial(f: &ScalarField, d: usize) -> ScalarField {
    partial_spectrum(&f.transform(), d)
        .to_real()
        .expect("hermitian")
}

/// Spectra of `div(a ⊗ b)`, i.e. component `i` is `Σ_j ∂_j (a_i b_j)`.
pub fn div_tensor_spectra(a: &VectorField, b: &VectorField) -> Result<Vec<Spectrum>> {
    a.grid().check_same(b.grid())?;
    let grid = *a.grid();
    let dim = grid.dim();
    let mut out: Vec<Spectrum> = (0..dim).map(|_| Spectrum::zeros(grid, true)).collect();
    for i in 0..dim {
        for j in 0..dim {
            let prod: Vec<f64> = a
                .component(i)
                .iter()
                .zip(b.component(j))
                .map(|(x, y)| x * y)
                .collect();
            let s = ScalarField::new(grid, prod)?.transform();
            let dj = partial_spectrum(&s, j);
            for (o, c) in out[i].coeffs_mut().iter_mut().zip(dj.coeffs()) {
                *o += c;
            }
        }
    }
    Ok(out)
}

pub fn div_tensor(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    VectorField::from_spectra(&div_tensor_spectra(a, b)?)
}

/// Splits vector spectra into (divergence-free, gradient) parts.
///
/// The mean mode goes to the divergence-free part; per mode `k ≠ 0` the
/// gradient part is `(k·û)k/|k|²`.
pub fn leray_spectra(spectra: &[Spectrum]) -> (Vec<Spectrum>, Vec<Spectrum>) {
    let grid = *spectra[0].grid();
    let dim = grid.dim();
    let mut p: Vec<Spectrum> = spectra.to_vec();
    let mut q: Vec<Spectrum> = spectra
        .iter()
        .map(|s| Spectrum::zeros(grid, s.is_hermitian()))
        .collect();
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        let k2 = TorusGrid::norm_sq(k);
        if k2 == 0 {
            continue;
        }
        let mut kdotu = ZERO;
        for (d, s) in spectra.iter().enumerate() {
            kdotu += s.coeffs()[i] * k[d] as f64;
        }
        for d in 0..dim {
            let qd = kdotu * (k[d] as f64 / k2 as f64);
            q[d].coeffs_mut()[i] = qd;
            p[d].coeffs_mut()[i] -= qd;
        }
    }
    (p, q)
}

pub fn leray_decompose(u: &VectorField) -> (VectorField, VectorField) {
    let (p, q) = leray_spectra(&u.transform());
    (
        VectorField::from_spectra(&p).expect("hermitian"),
        VectorField::from_spectra(&q).expect("hermitian"),
    )
}

pub fn project_p(u: &VectorField) -> VectorField {
    leray_decompose(u).0
}

pub fn project_q(u: &VectorField) -> VectorField {
    leray_decompose(u).1
}

/// Zeroes modes outside the dealiased band.
pub fn dealias_spectrum(s: &Spectrum) -> Spectrum {
    let grid = *s.grid();
    s.apply_multiplier(|k| {
        if grid.in_band(k) {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}

pub fn dealias(f: &Field) -> Field {
    match f {
        Field::Scalar(s) => Field::Scalar(dealias_scalar(s)),
        Field::Vector(v) => Field::Vector(dealias_vector(v)),
    }
}

pub fn dealias_scalar(f: &ScalarField) -> ScalarField {
    dealias_spectrum(&f.transform())
        .to_real()
        .expect("hermitian")
}

pub fn dealias_vector(v: &VectorField) -> VectorField {
    v.map_components(dealias_scalar)
}

/// `Σ_k (1+|k|²)^s |c_k|²` times the torus volume.
pub fn sobolev_sq_spectrum(s: &Spectrum, order: f64) -> f64 {
    let grid = s.grid();
    let sum: f64 = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k2 = TorusGrid::norm_sq(grid.wavevector(i)) as f64;
            (1.0 + k2).powf(order) * c.norm_sqr()
        })
        .sum();
    sum * grid.volume()
}

fn lebesgue_pow_sum(values: &[f64], p: f64) -> f64 {
    values.iter().map(|v| v.abs().powf(p)).sum()
}

pub fn norm(f: &Field, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Sobolev(order) => {
            let sq = match f {
                Field::Scalar(s) => sobolev_sq_spectrum(&s.transform(), order),
                Field::Vector(v) => v
                    .transform()
                    .iter()
                    .map(|s| sobolev_sq_spectrum(s, order))
                    .sum(),
            };
            Ok(sq.sqrt())
        }
        NormKind::Lebesgue(p) => {
            if !(p >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "Lebesgue exponent p = {p} < 1"
                )));
            }
            let mag = match f {
                Field::Scalar(s) => s.clone(),
                Field::Vector(v) => v.magnitude(),
            };
            lebesgue_norm(&mag, p)
        }
    }
}

pub fn lebesgue_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Lebesgue exponent p = {p} < 1"
        )));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    Ok((lebesgue_pow_sum(f.values(), p) * f.grid().cell_volume()).powf(1.0 / p))
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    (f.values().iter().map(|v| v * v).sum::<f64>() * f.grid().cell_volume()).sqrt()
}

pub fn l2_norm_vector(v: &VectorField) -> f64 {
    (v.components().iter().flatten().map(|x| x * x).sum::<f64>() * v.grid().cell_volume()).sqrt()
}

pub fn sobolev_norm(f: &ScalarField, order: f64) -> f64 {
    sobolev_sq_spectrum(&f.transform(), order).sqrt()
}

pub fn sobolev_norm_vector(v: &VectorField, order: f64) -> f64 {
    v.transform()
        .iter()
        .map(|s| sobolev_sq_spectrum(s, order))
        .sum::<f64>()
        .sqrt()
}
