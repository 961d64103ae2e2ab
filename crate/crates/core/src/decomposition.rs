//! Constructive decomposition `g = (-Δ)^{n/4} f_0 + Σ_j (-Δ)^{n/4} R̄_j f_j` of
//! zero-mean fields, and the smooth-complement variant
//! `f = φ + Σ_j R_j f_j`.
//!
//! At each frequency the constraint is a single row `a(m) · (f̂_0, …, f̂_n) = ĝ`
//! with `|a(m)|² = 2|m|^n`; the parts are its minimum-norm solution
//! `a(m)^* ĝ / |a(m)|²`. This gives `f_0 = ½ (-Δ)^{-n/4} g` and
//! `f_j = R_j f_0` (or `R̄_j f_0` for the unconjugated row). Consequently
//! `(Σ_j ‖f_j‖²_{Ḣ^{n/2}})^{1/2} = ‖g‖_{ℓ²}/√2` for every input.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::sobolev_norm;
use crate::operators::MultiplierOp;
use crate::spectral::{inverse_transform, project_zero_mean, FrequencyIndex, SpectralField};

/// `(Σ_j ‖f_j‖²_{Ḣ^{n/2}})^{1/2} / ‖g‖` realized by the minimum-norm solve.
pub const BOUND_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Parts of a decomposition with their norms.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult {
    /// `f_0, f_1, …, f_n`.
    pub parts: Vec<SpectralField>,
    pub conjugated: bool,
    /// `‖g - reconstruction‖_{ℓ²}`.
    pub residual: f64,
    /// `‖f_j‖_{Ḣ^{n/2}}`.
    pub norms: Vec<f64>,
    /// `max |f_j|` on a grid of `4N` points per axis.
    pub sup_norms: Vec<f64>,
    /// `‖g‖_{ℓ²}`, the normalized `L²` norm.
    pub g_norm: f64,
    /// `(Σ_j ‖f_j‖²_{Ḣ^{n/2}})^{1/2} / ‖g‖`; always [`BOUND_RATIO`].
    pub bound_ratio: f64,
    /// `Σ_j ‖f_j‖_{Ḣ^{n/2}} / ‖g‖`; equals 1 on the circle and is at most
    /// `((n+1)/2)^{1/2}` in general.
    pub sum_ratio: f64,
}

/// Serializable summary of a [`DecompositionResult`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub dim: usize,
    pub band: usize,
    pub conjugated: bool,
    pub residual: f64,
    pub norms: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub g_norm: f64,
    pub bound_ratio: f64,
    pub sum_ratio: f64,
}

impl DecompositionResult {
    pub fn report(&self) -> NormReport {
        NormReport {
            dim: self.parts[0].dim(),
            band: self.parts[0].band(),
            conjugated: self.conjugated,
            residual: self.residual,
            norms: self.norms.clone(),
            sup_norms: self.sup_norms.clone(),
            g_norm: self.g_norm,
            bound_ratio: self.bound_ratio,
            sum_ratio: self.sum_ratio,
        }
    }
}

/// The reconstruction map `(f_0, …, f_n) ↦ (-Δ)^{n/4}(f_0 + Σ_j R_j f_j)`,
/// with `R̄_j` when `conjugated`.
pub fn reconstruct(parts: &[SpectralField], conjugated: bool) -> Result<SpectralField> {
    let dim = parts[0].dim();
    if parts.len() != dim + 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} parts, got {}",
            dim + 1,
            parts.len()
        )));
    }
    let mut sum = parts[0].clone();
    for (j, p) in parts.iter().enumerate().skip(1) {
        sum = sum.try_add(&MultiplierOp::riesz(dim, j, conjugated)?.apply(p)?)?;
    }
    MultiplierOp::fractional_laplacian(dim, dim as f64 / 4.0)?.apply(&sum)
}

/// Minimum-norm per-frequency solution of
/// `g = (-Δ)^{n/4} f_0 + Σ_j (-Δ)^{n/4} R_j f_j`, using `R̄_j` when
/// `conjugated`.
pub fn solve_decomposition(g: &SpectralField, conjugated: bool) -> Result<DecompositionResult> {
    g.require_zero_mean()?;
    let g = project_zero_mean(g);
    let dim = g.dim();
    let f0 = MultiplierOp::fractional_laplacian(dim, -(dim as f64) / 4.0)?
        .apply(&g)?
        .scale(Complex64::new(0.5, 0.0));
    let mut parts = vec![f0.clone()];
    for j in 1..=dim {
        parts.push(MultiplierOp::riesz(dim, j, !conjugated)?.apply(&f0)?);
    }
    let parts: Vec<SpectralField> = parts.iter().map(project_zero_mean).collect();

    let residual = g.try_sub(&reconstruct(&parts, conjugated)?)?.l2_norm();
    let norms = parts
        .iter()
        .map(|p| sobolev_norm(p, dim as f64 / 2.0, true))
        .collect::<Result<Vec<f64>>>()?;
    let points = 4 * g.band();
    let sup_norms = parts
        .iter()
        .map(|p| inverse_transform(p, points).map(|grid| grid.sup_norm()))
        .collect::<Result<Vec<f64>>>()?;
    let g_norm = g.l2_norm();
    let (bound_ratio, sum_ratio) = if g_norm > 0.0 {
        (
            norms.iter().map(|x| x * x).sum::<f64>().sqrt() / g_norm,
            norms.iter().sum::<f64>() / g_norm,
        )
    } else {
        (0.0, 0.0)
    };
    Ok(DecompositionResult {
        parts,
        conjugated,
        residual,
        norms,
        sup_norms,
        g_norm,
        bound_ratio,
        sum_ratio,
    })
}

/// Output of [`smooth_complement`].
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothComplement {
    pub phi: SpectralField,
    pub parts: Vec<SpectralField>,
    /// `max_{m≠0} ‖φ̂(m)‖`; zero up to roundoff when the flavors match.
    pub leak: f64,
}

/// Writes `f = φ + Σ_{j=0}^{n} R_j f_j` with `R_0 = Id`.
///
/// The parts come from [`solve_decomposition`] on `(-Δ)^{n/4} f` with the
/// `solver_conjugated` row; the complement is formed with `R̄_j` when
/// `complement_conjugated`. Matching flavors leave `φ = f̂(0)`.
pub fn smooth_complement(
    f: &SpectralField,
    solver_conjugated: bool,
    complement_conjugated: bool,
) -> Result<SmoothComplement> {
    let dim = f.dim();
    let g = MultiplierOp::fractional_laplacian(dim, dim as f64 / 4.0)?.apply(&project_zero_mean(f))?;
    let parts = solve_decomposition(&g, solver_conjugated)?.parts;
    let mut phi = f.try_sub(&parts[0])?;
    for (j, p) in parts.iter().enumerate().skip(1) {
        phi = phi.try_sub(&MultiplierOp::riesz(dim, j, complement_conjugated)?.apply(p)?)?;
    }
    let zero = FrequencyIndex::zero(dim);
    let leak = phi
        .iter()
        .filter(|(m, _)| **m != zero)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    Ok(SmoothComplement { phi, parts, leak })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_single_mode() {
        let g = SpectralField::from_scalar_modes(1, 2, &[(vec![1], c(1.0, 0.0))]).unwrap();
        let r = solve_decomposition(&g, true).unwrap();
        let m = FrequencyIndex::new(vec![1]);
        assert_abs_diff_eq!(
            (r.parts[0].scalar_coefficient(&m) - c(0.5, 0.0)).norm(),
            0.0,
            epsilon = 1e-16
        );
        assert_abs_diff_eq!(
            (r.parts[1].scalar_coefficient(&m) - c(0.0, 0.5)).norm(),
            0.0,
            epsilon = 1e-16
        );
        assert!(r.residual < 1e-15);
        assert_abs_diff_eq!(r.sum_ratio, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn torus_single_mode() {
        let g = SpectralField::from_scalar_modes(2, 2, &[(vec![1, 0], c(1.0, 0.0))]).unwrap();
        let r = solve_decomposition(&g, true).unwrap();
        let m = FrequencyIndex::new(vec![1, 0]);
        assert_abs_diff_eq!(
            (r.parts[0].scalar_coefficient(&m) - c(0.5, 0.0)).norm(),
            0.0,
            epsilon = 1e-16
        );
        assert_abs_diff_eq!(
            (r.parts[1].scalar_coefficient(&m) - c(0.0, 0.5)).norm(),
            0.0,
            epsilon = 1e-16
        );
        assert!(r.parts[2].is_empty());
    }

    #[test]
    fn zero_input() {
        let r = solve_decomposition(&SpectralField::zeros(2, 3).unwrap(), false).unwrap();
        assert!(r.parts.iter().all(|p| p.is_empty()));
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn rejects_mean() {
        let g = SpectralField::from_scalar_modes(1, 1, &[(vec![0], c(1.0, 0.0))]).unwrap();
        assert!(matches!(
            solve_decomposition(&g, true),
            Err(Error::NonZeroMean(_))
        ));
    }

    #[test]
    fn complement_examples() {
        let f = SpectralField::from_scalar_modes(2, 2, &[(vec![1, 0], c(1.0, 0.0))]).unwrap();
        assert!(smooth_complement(&f, true, true).unwrap().leak < 1e-15);
        assert!(smooth_complement(&f, false, false).unwrap().leak < 1e-15);
        assert!(smooth_complement(&f, true, false).unwrap().leak > 0.1);

        let k = SpectralField::from_scalar_modes(2, 2, &[(vec![0, 0], c(3.0, 0.0))]).unwrap();
        let sc = smooth_complement(&k, true, true).unwrap();
        assert_eq!(sc.phi, k);
        assert!(sc.parts.iter().all(|p| p.is_empty()));
    }
}
