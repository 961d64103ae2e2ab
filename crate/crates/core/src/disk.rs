//! Holomorphic functions on the unit disk as truncated power series, the
//! Bergman norm, boundary traces, and the boundary `H^{-1/2}` norms.
//!
//! The disk-side `H^{-1/2}(S¹)` norm uses the weight `1/(1+n)`, under which
//! `‖f_r‖²_{L²(D)} = π ‖f_r‖²_{H^{-1/2}}` holds exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{l1_norm, sum_space_norm_with, SobolevWeight, SumSpaceOptions, SumSpaceSplit, Tolerance};
use crate::spectral::{inverse_transform, FrequencyIndex, SpectralField};

/// `f(z) = Σ_{n=0}^{M} a_n zⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a_n`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Truncation order `M` (index of the last stored coefficient).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    /// Exact `‖f‖_{L²(D)} = (2π Σ |a_n|²/(2n+2))^{1/2}`.
    pub fn bergman_norm(&self) -> f64 {
        (2.0 * PI
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| a.norm_sqr() / (2 * n + 2) as f64)
                .sum::<f64>())
        .sqrt()
    }

    /// `f_r(z) = f(rz)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| a * r.powi(n as i32))
                .collect(),
        ))
    }

    /// Trace `θ ↦ f(re^{iθ})` as a one-sided spectrum on the circle with band
    /// `max(M, 1)`.
    pub fn boundary_trace(&self, r: f64) -> Result<SpectralField> {
        check_radius(r)?;
        let mut out = SpectralField::zeros(1, self.order().max(1))?;
        for (n, a) in self.coeffs.iter().enumerate() {
            out.insert_scalar(FrequencyIndex::new(vec![n as i64]), a * r.powi(n as i32))?;
        }
        Ok(out)
    }

    /// `(Σ |a_n|² r^{2n}/(1+n))^{1/2}`.
    pub fn hminus_half_boundary_norm(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a.norm_sqr() * r.powi(2 * n as i32) / (1 + n) as f64)
            .sum::<f64>()
            .sqrt())
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius {r} outside (0, 1]")))
    }
}

/// Solver options for the boundary norm `L¹ + H^{-1/2}` with the disk
/// weight `(1+|n|)^{-1}`.
pub fn boundary_options(tol: Tolerance) -> SumSpaceOptions {
    SumSpaceOptions::new(-0.5, SobolevWeight::Shifted).with_tol(tol)
}

/// `‖f(re^{iθ})‖_{L¹ + H^{-1/2}}` via the sum-space solver.
pub fn mixed_boundary_norm(f: &PowerSeries, r: f64, tol: Tolerance) -> Result<SumSpaceSplit> {
    mixed_boundary_norm_with(f, r, &boundary_options(tol))
}

pub fn mixed_boundary_norm_with(f: &PowerSeries, r: f64, opts: &SumSpaceOptions) -> Result<SumSpaceSplit> {
    sum_space_norm_with(&f.boundary_trace(r)?, opts)
}

/// One radius of a [`bbb_ratio`] run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BergmanRow {
    pub r: f64,
    /// `‖f_r‖_{L²(D)}`.
    pub bergman: f64,
    /// Quadrature `∫ |f(re^{iθ})| dθ` on the solver grid.
    pub l1: f64,
    pub hminushalf: f64,
    pub mixed: f64,
    pub gap: f64,
    /// `bergman / mixed`.
    pub ratio: f64,
}

/// Ratios `‖f_r‖_{L²(D)} / ‖f_r‖_{L¹ + H^{-1/2}}` over a radius ladder.
pub fn bbb_ratio(f: &PowerSeries, radii: &[f64], opts: &SumSpaceOptions) -> Result<Vec<BergmanRow>> {
    radii
        .iter()
        .map(|&r| {
            let trace = f.boundary_trace(r)?;
            let points = opts.points.unwrap_or(4 * trace.band()).max(2 * trace.band() + 1);
            let split = sum_space_norm_with(&trace, opts)?;
            let bergman = f.dilate(r)?.bergman_norm();
            Ok(BergmanRow {
                r,
                bergman,
                l1: l1_norm(&inverse_transform(&trace, points)?),
                hminushalf: f.hminus_half_boundary_norm(r)?,
                mixed: split.value,
                gap: split.gap,
                ratio: bergman / split.value,
            })
        })
        .collect()
}

/// Splits a zero-mean circle field into `f⁺(z) = Σ_{n≥1} n^{1/2} u_n zⁿ` and
/// `f⁻(z) = Σ_{n≥1} n^{1/2} u_{-n} zⁿ`.
pub fn analytic_projection(u: &SpectralField) -> Result<(PowerSeries, PowerSeries)> {
    if u.dim() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: u.dim(),
        });
    }
    u.require_zero_mean()?;
    let band = u.support_band();
    let mut plus = vec![Complex64::new(0.0, 0.0); band + 1];
    let mut minus = plus.clone();
    for (m, c) in u.iter() {
        let n = m.as_slice()[0];
        let w = (n.unsigned_abs() as f64).sqrt();
        if n > 0 {
            plus[n as usize] = c.p0() * w;
        } else if n < 0 {
            minus[(-n) as usize] = c.p0() * w;
        }
    }
    Ok((PowerSeries::new(plus), PowerSeries::new(minus)))
}

/// Random series with `|a_n| = (1+n)^{-β}` and uniform phases, deterministic
/// in `(seed, index)`.
pub fn random_series(order: usize, decay: f64, seed: u64, index: u64) -> PowerSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    PowerSeries::new(
        (0..=order)
            .map(|n| {
                let phase = rng.random::<f64>() * 2.0 * PI;
                Complex64::from_polar((1.0 + n as f64).powf(-decay), phase)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bergman_examples() {
        assert_eq!(PowerSeries::from_real(&[1.0]).bergman_norm(), PI.sqrt());
        assert_abs_diff_eq!(
            PowerSeries::from_real(&[0.0, 1.0]).bergman_norm(),
            (PI / 2.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            PowerSeries::from_real(&[1.0, 1.0]).bergman_norm(),
            (1.5 * PI).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn dilation_and_trace() {
        let f = PowerSeries::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(f.dilate(0.5).unwrap().coeff(2), Complex64::new(0.25, 0.0));
        assert_eq!(f.dilate(1.0).unwrap(), f);
        assert!(f.dilate(0.0).is_err());
        assert!(f.dilate(1.5).is_err());

        let t = PowerSeries::from_real(&[1.0]).boundary_trace(0.3).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(
            t.scalar_coefficient(&FrequencyIndex::zero(1)),
            Complex64::new(1.0, 0.0)
        );
        let t = PowerSeries::from_real(&[0.0, 1.0]).boundary_trace(0.5).unwrap();
        assert_eq!(
            t.scalar_coefficient(&FrequencyIndex::new(vec![1])),
            Complex64::new(0.5, 0.0)
        );
        assert!(t.iter().all(|(m, _)| m.as_slice()[0] >= 0));
    }

    #[test]
    fn hminus_half_examples() {
        assert_eq!(
            PowerSeries::from_real(&[1.0])
                .hminus_half_boundary_norm(0.7)
                .unwrap(),
            1.0
        );
        let v = PowerSeries::from_real(&[0.0, 1.0])
            .hminus_half_boundary_norm(0.5)
            .unwrap();
        assert_abs_diff_eq!(v, (1.0f64 / 8.0).sqrt(), epsilon = 1e-16);
    }

    #[test]
    fn mixed_norm_examples() {
        let tol = Tolerance::Absolute(1e-8);
        assert_eq!(
            mixed_boundary_norm(&PowerSeries::zero(), 0.5, tol).unwrap().value,
            0.0
        );
        let f = PowerSeries::from_real(&[0.3, -1.0, 0.5, 0.25]);
        for r in [0.5, 0.9, 1.0] {
            let split = mixed_boundary_norm(&f, r, tol).unwrap();
            let hmh = f.hminus_half_boundary_norm(r).unwrap();
            assert!(split.value <= hmh + 1e-8);
            let trace = f.boundary_trace(r).unwrap();
            let l1 = l1_norm(&inverse_transform(&trace, 4 * trace.band()).unwrap());
            assert!(split.value <= l1 + 1e-8);
        }
    }

    #[test]
    fn projection_examples() {
        let u = SpectralField::from_scalar_modes(
            1,
            2,
            &[
                (vec![1], Complex64::new(0.5, 0.0)),
                (vec![-1], Complex64::new(0.5, 0.0)),
            ],
        )
        .unwrap();
        let (p, m) = analytic_projection(&u).unwrap();
        assert_eq!(p.coeff(1), Complex64::new(0.5, 0.0));
        assert_eq!(m.coeff(1), Complex64::new(0.5, 0.0));
        assert_eq!(p.coeff(0), Complex64::new(0.0, 0.0));

        let e = SpectralField::from_scalar_modes(1, 2, &[(vec![1], Complex64::new(1.0, 0.0))]).unwrap();
        let (p, m) = analytic_projection(&e).unwrap();
        assert_eq!(p.coeff(1), Complex64::new(1.0, 0.0));
        assert!(m.coeffs().iter().all(|z| *z == Complex64::new(0.0, 0.0)));

        let c = SpectralField::from_scalar_modes(1, 2, &[(vec![0], Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(analytic_projection(&c), Err(Error::NonZeroMean(_))));
    }

    #[test]
    fn random_series_is_deterministic() {
        let a = random_series(8, 1.0, 3, 5);
        assert_eq!(a, random_series(8, 1.0, 3, 5));
        assert_ne!(a, random_series(8, 1.0, 3, 6));
        assert_abs_diff_eq!(a.coeff(3).norm(), 0.25, epsilon = 1e-15);
    }
}
