use num_complex::Complex64;

use super::fft;
use super::grid::{TorusGrid, Wavevector};
use crate::error::{Error, Result};

/// Real scalar samples on a [`TorusGrid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    data: Vec<f64>,
}

/// Real vector field with one [`ScalarField`]-sized component per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: TorusGrid,
    comps: Vec<Vec<f64>>,
}

/// Complex scalar samples (wave functions).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: TorusGrid,
    data: Vec<Complex64>,
}

/// Fourier coefficients indexed like the grid nodes (see [`TorusGrid::wavevector`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

fn check_len(grid: &TorusGrid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{len} samples for a grid with {} nodes",
            grid.len()
        )));
    }
    Ok(())
}

impl ScalarField {
    pub fn new(grid: TorusGrid, data: Vec<f64>) -> Result<Self> {
        check_len(&grid, data.len())?;
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: self.grid,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// Spatial mean `(2π)^-n ∫ f`.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Returns the field with its mean removed, and the removed mean.
    pub fn split_mean(&self) -> (Self, f64) {
        let m = self.mean();
        (self.map(|v| v - m), m)
    }

    /// `|mean| <= 1e-12 * ||f||_∞`.
    pub fn is_mean_zero(&self) -> bool {
        self.mean().abs() <= 1e-12 * self.max_abs()
    }

    /// L² inner product `∫ f g` by the trapezoid rule.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transform(&self) -> Spectrum {
        Spectrum {
            grid: self.grid,
            coeffs: fft::forward_real(&self.grid, &self.data),
            hermitian: true,
        }
    }
}

impl VectorField {
    pub fn new(grid: TorusGrid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::Arity(format!(
                "{} components for a {}-dimensional grid",
                comps.len(),
                grid.dim()
            )));
        }
        for c in &comps {
            check_len(&grid, c.len())?;
        }
        Ok(Self { grid, comps })
    }

    pub fn from_components(comps: Vec<ScalarField>) -> Result<Self> {
        let grid = *comps
            .first()
            .ok_or_else(|| Error::Arity("vector field needs at least one component".into()))?
            .grid();
        for c in &comps {
            grid.check_same(c.grid())?;
        }
        Self::new(
            grid,
            comps.into_iter().map(ScalarField::into_values).collect(),
        )
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            comps: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }

    pub fn constant(grid: TorusGrid, value: &[f64]) -> Result<Self> {
        if value.len() != grid.dim() {
            return Err(Error::Arity(format!(
                "constant with {} entries",
                value.len()
            )));
        }
        Ok(Self {
            grid,
            comps: value.iter().map(|&v| vec![v; grid.len()]).collect(),
        })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let mut comps = vec![vec![0.0; grid.len()]; grid.dim()];
        for i in 0..grid.len() {
            let v = f(grid.coords(i));
            for (d, c) in comps.iter_mut().enumerate() {
                c[i] = v[d];
            }
        }
        Self { grid, comps }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn component(&self, d: usize) -> &[f64] {
        &self.comps[d]
    }

    #[inline]
    pub fn component_mut(&mut self, d: usize) -> &mut [f64] {
        &mut self.comps[d]
    }

    pub fn component_field(&self, d: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            data: self.comps[d].clone(),
        }
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let comps = (0..self.dim())
            .map(|d| f(&self.component_field(d)).into_values())
            .collect();
        Self {
            grid: self.grid,
            comps,
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(Self {
            grid: self.grid,
            comps,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| v * s).collect())
            .collect();
        Self {
            grid: self.grid,
            comps,
        }
    }

    /// Pointwise product with a scalar field.
    pub fn mul_scalar(&self, f: &ScalarField) -> Result<Self> {
        self.grid.check_same(f.grid())?;
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(f.values()).map(|(a, b)| a * b).collect())
            .collect();
        Ok(Self {
            grid: self.grid,
            comps,
        })
    }

    pub fn mean(&self) -> Vec<f64> {
        self.comps
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let data = (0..self.grid.len())
            .map(|i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect();
        ScalarField {
            grid: self.grid,
            data,
        }
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flatten().all(|v| v.is_finite())
    }

    pub fn transform(&self) -> Vec<Spectrum> {
        (0..self.dim())
            .map(|d| self.component_field(d).transform())
            .collect()
    }

    pub fn from_spectra(spectra: &[Spectrum]) -> Result<Self> {
        let comps = spectra
            .iter()
            .map(Spectrum::to_real)
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(comps)
    }
}

impl ComplexField {
    pub fn new(grid: TorusGrid, data: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, data.len())?;
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn modulus_sq(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    /// `∫ |ψ|²`.
    pub fn mass(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn transform(&self) -> Spectrum {
        let mut buf = self.data.clone();
        fft::forward(&self.grid, &mut buf);
        Spectrum {
            grid: self.grid,
            coeffs: buf,
            hermitian: false,
        }
    }
}

impl Spectrum {
    pub fn new(grid: TorusGrid, coeffs: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        Ok(Self {
            grid,
            coeffs,
            hermitian,
        })
    }

    pub fn zeros(grid: TorusGrid, hermitian: bool) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            hermitian,
        }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn coeff(&self, k: Wavevector) -> Option<Complex64> {
        self.grid.index_of(k).map(|i| self.coeffs[i])
    }

    /// Multiplies each coefficient by `f(k)`.
    pub fn apply_multiplier(&self, f: impl Fn(Wavevector) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * f(self.grid.wavevector(i)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            hermitian: self.hermitian,
        }
    }

    /// Real-space samples. Fails when the coefficients are not flagged Hermitian.
    pub fn to_real(&self) -> Result<ScalarField> {
        if !self.hermitian {
            return Err(Error::InvalidArgument(
                "spectrum of a complex field has no real inverse".into(),
            ));
        }
        Ok(ScalarField {
            grid: self.grid,
            data: fft::inverse_real(&self.grid, &self.coeffs),
        })
    }

    pub fn to_complex(&self) -> ComplexField {
        let mut buf = self.coeffs.clone();
        fft::inverse(&self.grid, &mut buf);
        ComplexField {
            grid: self.grid,
            data: buf,
        }
    }

    /// Largest `|c(-k) - conj(c(k))|` over all lattice pairs (Nyquist self-pairs skipped).
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavevector(i);
            if self.grid.is_nyquist(k) {
                continue;
            }
            if let Some(j) = self.grid.index_of([-k[0], -k[1]]) {
                worst = worst.max((self.coeffs[j] - c.conj()).norm());
            }
        }
        worst
    }

    /// `Σ_k |c_k|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
