//! The averaged forms `B₁(v, V)` and `B₂(V₁, V₂)`.
//!
//! Both are evaluated as sums over exactly resonant interactions in the
//! `(c₊, c₋)` eigenbasis. Only the gradient part of a pair enters; outputs
//! have no divergence-free part. [`time_average_oracle`] evaluates the same
//! averages by brute-force quadrature over a finite window.

use std::sync::Arc;

use num_complex::Complex64;

use crate::acoustic::{AcousticModes, AcousticPair, PsiNormalization};
use crate::error::{Error, Result};
use crate::spectral::calculus::{
    dealias_vector, div_tensor_spectra, divergence, gradient_spectra, l2_norm, l2_norm_vector,
    sobolev_norm_vector,
};
use crate::spectral::{ScalarField, Spectrum, TorusGrid, VectorField};

use super::triples::{resonant_set, ResonantSet};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative divergence accepted for the slow velocity of `B₁`.
pub const DIVERGENCE_TOL: f64 = 1e-10;

/// The limit oscillation profile `V⁰` at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationProfile {
    pub value: AcousticPair,
    pub time: f64,
}

impl OscillationProfile {
    pub fn new(value: AcousticPair, time: f64) -> Self {
        Self { value, time }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            value: AcousticPair::zeros(grid),
            time: 0.0,
        }
    }
}

/// Resonant-sum evaluator bound to one grid and pressure law.
#[derive(Debug, Clone)]
pub struct ResonantForms {
    set: Arc<ResonantSet>,
    gamma: f64,
    pressure_coef: f64,
}

#[inline]
fn branch(m: &AcousticModes, sigma: i8, i: usize) -> Complex64 {
    if sigma > 0 {
        m.plus[i]
    } else {
        m.minus[i]
    }
}

#[inline]
fn branch_mut(m: &mut AcousticModes, sigma: i8, i: usize) -> &mut Complex64 {
    if sigma > 0 {
        &mut m.plus[i]
    } else {
        &mut m.minus[i]
    }
}

impl ResonantForms {
    /// The pressure coefficient is `(γ−1)/c²` with `c` the normalization factor
    /// of the scalar slot.
    pub fn new(grid: TorusGrid, gamma: f64, normalization: PsiNormalization) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        let c = normalization.factor();
        Ok(Self {
            set: resonant_set(&grid),
            gamma,
            pressure_coef: (gamma - 1.0) / (c * c),
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        self.set.grid()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pressure_coef(&self) -> f64 {
        self.pressure_coef
    }

    pub fn set(&self) -> &ResonantSet {
        &self.set
    }

    /// `B₁` on eigenbasis coefficients, with `vhat` the spectra of the slow velocity.
    pub fn b1_modes(&self, vhat: &[Spectrum], x: &AcousticModes) -> AcousticModes {
        let mut out = AcousticModes::zeros(*self.grid());
        for e in &self.set.linear {
            let mut kv = Complex64::new(0.0, 0.0);
            for (d, s) in vhat.iter().enumerate() {
                kv += s.coeffs()[e.m] * e.kvec[d] as f64;
            }
            let f = I * kv * e.weight;
            out.plus[e.k] += f * x.plus[e.l];
            out.minus[e.k] += f * x.minus[e.l];
        }
        out
    }

    /// Symmetric `B₂` on eigenbasis coefficients.
    pub fn b2_modes(&self, a: &AcousticModes, b: &AcousticModes) -> AcousticModes {
        let mut out = AcousticModes::zeros(*self.grid());
        let p = self.pressure_coef;
        for e in &self.set.bilinear {
            let c = branch(a, e.sigma_m, e.m) * branch(b, e.sigma_l, e.l);
            let w = e.transport + p * e.knorm;
            *branch_mut(&mut out, e.sigma_k, e.k) += I * (0.5 * e.sigma_k as f64 * w) * c;
        }
        out
    }

    fn check_grid(&self, g: &TorusGrid) -> Result<()> {
        self.grid().check_same(g)
    }

    pub fn b1_apply(&self, v: &VectorField, pair: &AcousticPair) -> Result<AcousticPair> {
        self.check_grid(v.grid())?;
        self.check_grid(pair.grid())?;
        check_solenoidal(v)?;
        let out = self.b1_modes(&v.transform(), &AcousticModes::from_pair(pair));
        Ok(out.to_pair())
    }

    pub fn b2_apply(&self, a: &AcousticPair, b: &AcousticPair) -> Result<AcousticPair> {
        self.check_grid(a.grid())?;
        self.check_grid(b.grid())?;
        let out = self.b2_modes(&AcousticModes::from_pair(a), &AcousticModes::from_pair(b));
        Ok(out.to_pair())
    }
}

/// Fails when `‖div v‖ > DIVERGENCE_TOL · ‖v‖_{H¹}`.
pub fn check_solenoidal(v: &VectorField) -> Result<()> {
    let h1 = sobolev_norm_vector(v, 1.0);
    if h1 == 0.0 {
        return Ok(());
    }
    let rel = l2_norm(&divergence(v)) / h1;
    if rel > DIVERGENCE_TOL {
        return Err(Error::NotDivergenceFree(rel));
    }
    Ok(())
}

/// Arguments of a form for [`time_average_oracle`].
#[derive(Debug, Clone, Copy)]
pub enum FormArgs<'a> {
    B1 {
        v: &'a VectorField,
        pair: &'a AcousticPair,
    },
    B2 {
        a: &'a AcousticPair,
        b: &'a AcousticPair,
    },
}

fn truncated_gradient_modes(p: &AcousticPair) -> AcousticModes {
    let mut m = AcousticModes::from_pair(p).without_solenoidal();
    m.truncate();
    m
}

fn real_parts(m: &AcousticModes) -> (ScalarField, VectorField) {
    let (phi, vel) = m.to_spectra();
    (
        phi.to_real().expect("hermitian"),
        VectorField::from_spectra(&vel).expect("hermitian"),
    )
}

fn add_spectra(acc: &mut [Spectrum], other: &[Spectrum], scale: f64) {
    for (a, b) in acc.iter_mut().zip(other) {
        for (x, y) in a.coeffs_mut().iter_mut().zip(b.coeffs()) {
            *x += y * scale;
        }
    }
}

/// `(1/τ)∫₀^τ L(−s)(0, F(s)) ds` by the trapezoid rule with `n_quad` nodes per unit time.
pub fn time_average_oracle(
    forms: &ResonantForms,
    args: FormArgs<'_>,
    tau_avg: f64,
    n_quad: usize,
) -> Result<AcousticPair> {
    if !(tau_avg > 0.0) || n_quad == 0 {
        return Err(Error::InvalidArgument(format!(
            "need tau_avg > 0 and n_quad > 0, got {tau_avg}, {n_quad}"
        )));
    }
    let grid = *forms.grid();
    let p = forms.pressure_coef();
    let intervals = (tau_avg * n_quad as f64).ceil() as usize;
    let h = tau_avg / intervals as f64;

    let integrand: Box<dyn Fn(f64) -> Result<AcousticModes>> = match args {
        FormArgs::B1 { v, pair } => {
            forms.check_grid(v.grid())?;
            forms.check_grid(pair.grid())?;
            let v = dealias_vector(v);
            let x0 = truncated_gradient_modes(pair);
            Box::new(move |s| {
                let (_, w) = real_parts(&x0.rotated(s));
                let mut f = div_tensor_spectra(&v, &w)?;
                add_spectra(&mut f, &div_tensor_spectra(&w, &v)?, 1.0);
                let mut m = AcousticModes::from_spectra(None, &f);
                m.truncate();
                m.rotate(-s);
                Ok(m)
            })
        }
        FormArgs::B2 { a, b } => {
            forms.check_grid(a.grid())?;
            forms.check_grid(b.grid())?;
            let a0 = truncated_gradient_modes(a);
            let b0 = truncated_gradient_modes(b);
            Box::new(move |s| {
                let (pa, wa) = real_parts(&a0.rotated(s));
                let (pb, wb) = real_parts(&b0.rotated(s));
                let mut f = div_tensor_spectra(&wa, &wb)?;
                add_spectra(&mut f, &div_tensor_spectra(&wb, &wa)?, 1.0);
                for s in f.iter_mut() {
                    s.coeffs_mut().iter_mut().for_each(|c| *c *= 0.5);
                }
                let pres = gradient_spectra(&pa.mul(&pb)?.transform());
                add_spectra(&mut f, &pres, p);
                let mut m = AcousticModes::from_spectra(None, &f);
                m.truncate();
                m.rotate(-s);
                Ok(m)
            })
        }
    };

    let mut acc = AcousticModes::zeros(grid);
    for j in 0..=intervals {
        let w = if j == 0 || j == intervals { 0.5 } else { 1.0 };
        acc.axpy(w * h / tau_avg, &integrand(j as f64 * h)?);
    }
    Ok(acc.to_pair())
}

/// The four pairings `∫B₁(v,V)·V`, `∫B₁(v,V₁)·V₂ + B₁(v,V₂)·V₁`, `∫B₂(V,V)·V`,
/// `∫B₂(V₁,V₁)·V₂ + 2B₂(V₁,V₂)·V₁`, with matching norm products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    pub values: [f64; 4],
    pub scales: [f64; 4],
}

impl OrthogonalityReport {
    /// Values divided by their norm products (zero when the product vanishes).
    pub fn relative(&self) -> [f64; 4] {
        let mut r = [0.0; 4];
        for i in 0..4 {
            r[i] = if self.scales[i] > 0.0 {
                self.values[i].abs() / self.scales[i]
            } else {
                self.values[i].abs()
            };
        }
        r
    }

    pub fn max_relative(&self) -> f64 {
        self.relative().iter().cloned().fold(0.0, f64::max)
    }
}

pub fn orthogonality_report(
    forms: &ResonantForms,
    v: &VectorField,
    pair: &AcousticPair,
    a: &AcousticPair,
    b: &AcousticPair,
) -> Result<OrthogonalityReport> {
    check_solenoidal(v)?;
    let vhat = v.transform();
    let x = AcousticModes::from_pair(pair);
    let ma = AcousticModes::from_pair(a);
    let mb = AcousticModes::from_pair(b);
    let values = [
        forms.b1_modes(&vhat, &x).inner(&x),
        forms.b1_modes(&vhat, &ma).inner(&mb) + forms.b1_modes(&vhat, &mb).inner(&ma),
        forms.b2_modes(&x, &x).inner(&x),
        forms.b2_modes(&ma, &ma).inner(&mb) + 2.0 * forms.b2_modes(&ma, &mb).inner(&ma),
    ];
    let (nv, nx, na, nb) = (l2_norm_vector(v), pair.l2_norm(), a.l2_norm(), b.l2_norm());
    let scales = [nv * nx * nx, nv * na * nb, nx * nx * nx, na * na * nb];
    Ok(OrthogonalityReport { values, scales })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::{
        random_gradient, random_scalar, random_solenoidal, random_vector,
    };

    fn pair(g: TorusGrid, seed: u64) -> AcousticPair {
        AcousticPair::new(
            random_scalar(g, 1.5, seed),
            random_gradient(g, 1.5, seed + 77),
        )
        .unwrap()
    }

    fn diff(a: &AcousticPair, b: &AcousticPair) -> f64 {
        a.sub(b).unwrap().l2_norm()
    }

    #[test]
    fn zero_arguments() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = ResonantForms::new(g, 2.0, PsiNormalization::Paper).unwrap();
        let v = random_solenoidal(g, 1.0, 1);
        let x = pair(g, 2);
        assert_eq!(
            f.b1_apply(&VectorField::zeros(g), &x).unwrap().l2_norm(),
            0.0
        );
        assert_eq!(
            f.b1_apply(&v, &AcousticPair::zeros(g)).unwrap().l2_norm(),
            0.0
        );
        assert_eq!(
            f.b2_apply(&AcousticPair::zeros(g), &x).unwrap().l2_norm(),
            0.0
        );
        let o = time_average_oracle(
            &f,
            FormArgs::B1 {
                v: &VectorField::zeros(g),
                pair: &x,
            },
            3.0,
            64,
        )
        .unwrap();
        assert_eq!(o.l2_norm(), 0.0);
        let r = orthogonality_report(
            &f,
            &VectorField::zeros(g),
            &AcousticPair::zeros(g),
            &AcousticPair::zeros(g),
            &AcousticPair::zeros(g),
        )
        .unwrap();
        assert_eq!(r.values, [0.0; 4]);
    }

    #[test]
    fn rejects_compressible_slow_velocity() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = ResonantForms::new(g, 2.0, PsiNormalization::Paper).unwrap();
        let v = random_vector(g, 1.0, 5);
        assert!(matches!(
            f.b1_apply(&v, &pair(g, 1)),
            Err(Error::NotDivergenceFree(_))
        ));
    }

    #[test]
    fn linear_and_bilinear() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = ResonantForms::new(g, 2.0, PsiNormalization::Paper).unwrap();
        let v = random_solenoidal(g, 1.0, 3);
        let (x, y, z) = (pair(g, 4), pair(g, 5), pair(g, 6));
        let xy = x.scale(2.0).add(&y.scale(-0.5)).unwrap();
        let lhs = f.b1_apply(&v, &xy).unwrap();
        let rhs = f
            .b1_apply(&v, &x)
            .unwrap()
            .scale(2.0)
            .add(&f.b1_apply(&v, &y).unwrap().scale(-0.5))
            .unwrap();
        assert!(diff(&lhs, &rhs) < 1e-11 * rhs.l2_norm().max(1.0));
        let lhs = f.b2_apply(&xy, &z).unwrap();
        let rhs = f
            .b2_apply(&x, &z)
            .unwrap()
            .scale(2.0)
            .add(&f.b2_apply(&y, &z).unwrap().scale(-0.5))
            .unwrap();
        assert!(diff(&lhs, &rhs) < 1e-11 * rhs.l2_norm().max(1.0));
        let s1 = f.b2_apply(&x, &y).unwrap();
        let s2 = f.b2_apply(&y, &x).unwrap();
        assert!(diff(&s1, &s2) < 1e-11 * s1.l2_norm().max(1.0));
    }

    fn right_wave(g: TorusGrid, a: f64, k: f64) -> AcousticPair {
        let c = ScalarField::from_fn(g, |x| a * (k * x[0]).cos());
        AcousticPair::new(c.clone(), VectorField::from_components(vec![c]).unwrap()).unwrap()
    }

    #[test]
    fn single_wave_self_interaction_closed_form() {
        let g = TorusGrid::new(1, 16).unwrap();
        let (a, k) = (0.7, 2.0);
        for norm in [PsiNormalization::Paper, PsiNormalization::Unit] {
            let f = ResonantForms::new(g, 2.0, norm).unwrap();
            let p = f.pressure_coef();
            let x = right_wave(g, a, k);
            let out = f.b2_apply(&x, &x).unwrap();
            let f0 =
                ScalarField::from_fn(g, |x| -0.5 * (1.0 + p) * a * a * k * (2.0 * k * x[0]).sin());
            assert!(out.phi().sub(&f0).unwrap().max_abs() < 1e-13);
            assert!(out.vel().component_field(0).sub(&f0).unwrap().max_abs() < 1e-13);
            // over whole periods of the non-resonant remainder the quadrature is exact
            let tau = std::f64::consts::PI / (2.0 * k) * 8.0;
            let o = time_average_oracle(&f, FormArgs::B2 { a: &x, b: &x }, tau, 64).unwrap();
            assert!(diff(&o, &out) < 1e-12, "{}", diff(&o, &out));
        }
    }

    #[test]
    fn orthogonality_on_random_inputs() {
        for (dim, n) in [(1, 16), (2, 16)] {
            let g = TorusGrid::new(dim, n).unwrap();
            let f = ResonantForms::new(g, 2.0, PsiNormalization::Paper).unwrap();
            let v = if dim == 1 {
                VectorField::constant(g, &[0.8]).unwrap()
            } else {
                random_solenoidal(g, 1.0, 9)
            };
            let r = orthogonality_report(&f, &v, &pair(g, 10), &pair(g, 11), &pair(g, 12)).unwrap();
            assert!(r.max_relative() < 1e-10, "{:?}", r);
        }
    }

    #[test]
    fn oracle_approaches_resonant_sum() {
        let g = TorusGrid::new(1, 16).unwrap();
        let f = ResonantForms::new(g, 2.0, PsiNormalization::Unit).unwrap();
        let x = pair(g, 31);
        let exact = f.b2_apply(&x, &x).unwrap();
        let o = time_average_oracle(&f, FormArgs::B2 { a: &x, b: &x }, 100.0, 64).unwrap();
        assert!(
            diff(&o, &exact) < 0.05 * exact.l2_norm(),
            "{} vs {}",
            diff(&o, &exact),
            exact.l2_norm()
        );
    }

    #[test]
    fn outputs_are_gradient_pairs() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = ResonantForms::new(g, 1.4, PsiNormalization::Paper).unwrap();
        let x = pair(g, 41);
        let out = f.b2_apply(&x, &x).unwrap();
        let p = crate::spectral::calculus::project_p(out.vel());
        assert!(p.max_abs() < 1e-13);
        let out = f.b1_apply(&random_solenoidal(g, 1.0, 2), &x).unwrap();
        assert!(crate::spectral::calculus::project_p(out.vel()).max_abs() < 1e-13);
    }
}
