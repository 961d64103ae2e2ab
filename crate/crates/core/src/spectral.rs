//! Band-limited fields on the torus `T^n = [0, 2π)^n`.
//!
//! Fourier coefficients use the normalization
//! `û(m) = (2π)^{-n} ∫ u(x) e^{-i⟨m,x⟩} dx`, so synthesis is
//! `u(x) = Σ_m û(m) e^{i⟨m,x⟩}`. Grids are uniform with `P` points per axis at
//! `x_k = 2πk/P`, stored row-major with the last axis fastest.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::clifford::{Blade, CliffordElement};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Generator count of the Clifford algebra carried by fields on `T^dim`.
///
/// On the circle all fields are complex scalars. On `T^n` with `n ≥ 2` the
/// Dirac operators need the algebra on `n` generators.
pub fn generators_for_dim(dim: usize) -> usize {
    if dim <= 1 {
        0
    } else {
        dim
    }
}

/// A lattice point `m ∈ Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrequencyIndex(Vec<i64>);

impl FrequencyIndex {
    pub fn new(m: Vec<i64>) -> Self {
        Self(m)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|&x| (x * x) as f64).sum()
    }

    /// Euclidean norm `|m|`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `max_j |m_j|`.
    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn in_band(&self, band: usize) -> bool {
        self.max_abs() <= band as u64
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64).collect()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

impl From<Vec<i64>> for FrequencyIndex {
    fn from(m: Vec<i64>) -> Self {
        Self(m)
    }
}

/// All frequencies of the cube `|m_j| ≤ band` in lexicographic order.
pub fn band_cube(dim: usize, band: usize) -> impl Iterator<Item = FrequencyIndex> {
    let side = 2 * band + 1;
    let total = side.pow(dim as u32);
    (0..total).map(move |mut flat| {
        let mut m = vec![0i64; dim];
        for a in (0..dim).rev() {
            m[a] = (flat % side) as i64 - band as i64;
            flat /= side;
        }
        FrequencyIndex(m)
    })
}

/// Band-limited Clifford-valued field on `T^n` stored as a sparse
/// frequency-to-coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    dim: usize,
    band: usize,
    coeffs: BTreeMap<FrequencyIndex, CliffordElement>,
    zero_mean: bool,
}

impl SpectralField {
    pub fn zeros(dim: usize, band: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if band == 0 {
            return Err(Error::InvalidParameter("band must be at least 1".into()));
        }
        if generators_for_dim(dim) > crate::clifford::MAX_GENERATORS {
            return Err(Error::TooManyGenerators {
                got: dim,
                max: crate::clifford::MAX_GENERATORS,
            });
        }
        Ok(Self {
            dim,
            band,
            coeffs: BTreeMap::new(),
            zero_mean: false,
        })
    }

    /// Scalar field with `û(m) = f(m)` on the whole band cube.
    pub fn from_scalar_fn(
        dim: usize,
        band: usize,
        mut f: impl FnMut(&FrequencyIndex) -> Complex64,
    ) -> Result<Self> {
        let mut out = Self::zeros(dim, band)?;
        for m in band_cube(dim, band) {
            let z = f(&m);
            out.insert_scalar(m, z)?;
        }
        Ok(out)
    }

    /// Scalar field with the listed modes.
    pub fn from_scalar_modes(dim: usize, band: usize, modes: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut out = Self::zeros(dim, band)?;
        for (m, z) in modes {
            out.insert_scalar(FrequencyIndex::new(m.clone()), *z)?;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn generators(&self) -> usize {
        generators_for_dim(self.dim)
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_index(&self, m: &FrequencyIndex) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: m.dim(),
            });
        }
        if !m.in_band(self.band) {
            return Err(Error::OutOfBand {
                index: m.as_slice().to_vec(),
                band: self.band,
            });
        }
        Ok(())
    }

    /// Stores `value` at `m`; a zero value removes the entry.
    pub fn insert(&mut self, m: FrequencyIndex, value: CliffordElement) -> Result<()> {
        self.check_index(&m)?;
        if value.generators() != self.generators() {
            return Err(Error::GeneratorMismatch {
                left: self.generators(),
                right: value.generators(),
            });
        }
        if m.is_zero() && !value.is_zero() {
            self.zero_mean = false;
        }
        if value.is_zero() {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, value);
        }
        Ok(())
    }

    pub fn insert_scalar(&mut self, m: FrequencyIndex, z: Complex64) -> Result<()> {
        let value = CliffordElement::scalar(self.generators(), z)?;
        self.insert(m, value)
    }

    pub fn get(&self, m: &FrequencyIndex) -> Option<&CliffordElement> {
        self.coeffs.get(m)
    }

    /// Coefficient at `m`, zero when absent.
    pub fn coefficient(&self, m: &FrequencyIndex) -> CliffordElement {
        self.coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(|| CliffordElement::zero(self.generators()).expect("validated"))
    }

    /// Scalar (`e_∅`) part of the coefficient at `m`.
    pub fn scalar_coefficient(&self, m: &FrequencyIndex) -> Complex64 {
        self.coeffs.get(m).map(|c| c.p0()).unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FrequencyIndex, &CliffordElement)> {
        self.coeffs.iter()
    }

    /// Applies `f` to every stored coefficient. Zero results are dropped.
    pub fn map(&self, mut f: impl FnMut(&FrequencyIndex, &CliffordElement) -> CliffordElement) -> Self {
        let mut out = Self {
            dim: self.dim,
            band: self.band,
            coeffs: BTreeMap::new(),
            zero_mean: self.zero_mean,
        };
        for (m, c) in &self.coeffs {
            let v = f(m, c);
            if !v.is_zero() {
                out.coeffs.insert(m.clone(), v);
            }
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.band != other.band {
            return Err(Error::BandMismatch {
                left: self.band,
                right: other.band,
            });
        }
        Ok(())
    }

    /// `self + t · other`.
    pub fn axpy(&self, t: Complex64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            let v = &out.coefficient(m) + &c.scale(t);
            out.coeffs.remove(m);
            if !v.is_zero() {
                out.coeffs.insert(m.clone(), v);
            }
        }
        out.zero_mean = self.zero_mean && other.zero_mean;
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, t: Complex64) -> Self {
        self.map(|_, c| c.scale(t))
    }

    /// Coefficient `ℓ²` norm `(Σ_m ‖û(m)‖²)^{1/2}`, equal to the normalized
    /// `L²` norm `((2π)^{-n} ∫ ‖u‖²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm of the mean coefficient `û(0)`.
    pub fn mean_norm(&self) -> f64 {
        self.coeffs
            .get(&FrequencyIndex::zero(self.dim))
            .map(|c| c.norm())
            .unwrap_or(0.0)
    }

    /// Errors unless `û(0)` is negligible relative to the field.
    pub fn require_zero_mean(&self) -> Result<()> {
        let mean = self.mean_norm();
        if mean > MEAN_TOLERANCE * self.l2_norm().max(1.0) {
            return Err(Error::NonZeroMean(mean));
        }
        Ok(())
    }

    /// Re-bands the field. Shrinking drops modes outside the new band.
    pub fn with_band(&self, band: usize) -> Result<Self> {
        let mut out = Self::zeros(self.dim, band)?;
        for (m, c) in &self.coeffs {
            if m.in_band(band) {
                out.coeffs.insert(m.clone(), c.clone());
            }
        }
        out.zero_mean = self.zero_mean;
        Ok(out)
    }

    /// Largest `max_j |m_j|` over stored modes.
    pub fn support_band(&self) -> usize {
        self.coeffs.keys().map(|m| m.max_abs()).max().unwrap_or(0) as usize
    }
}

/// Relative threshold below which a mean coefficient counts as zero.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Removes the `m = 0` coefficient and flags the result zero-mean.
pub fn project_zero_mean(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    out.coeffs.remove(&FrequencyIndex::zero(f.dim));
    out.zero_mean = true;
    out
}

/// Coefficients `(2π)^n f̂(m) ĝ(m)` of the periodic convolution `f ∗ g`, with
/// Clifford factors multiplied in the order `f̂(m) ĝ(m)`.
pub fn convolve(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_compatible(g)?;
    let factor = (2.0 * PI).powi(f.dim as i32);
    let mut out = SpectralField::zeros(f.dim, f.band)?;
    for (m, a) in &f.coeffs {
        if let Some(b) = g.coeffs.get(m) {
            let v = a.try_mul(b)?.scale_real(factor);
            if !v.is_zero() {
                out.coeffs.insert(m.clone(), v);
            }
        }
    }
    out.zero_mean = f.zero_mean || g.zero_mean;
    Ok(out)
}

/// Samples of a Clifford-valued function on the uniform grid, one complex
/// plane per basis blade.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    dim: usize,
    points: usize,
    planes: Vec<Vec<Complex64>>,
}

impl GridField {
    pub fn zeros(dim: usize, points: usize) -> Result<Self> {
        if dim == 0 || points == 0 {
            return Err(Error::InvalidParameter(
                "grid needs a positive dimension and point count".into(),
            ));
        }
        let gens = generators_for_dim(dim);
        if gens > crate::clifford::MAX_GENERATORS {
            return Err(Error::TooManyGenerators {
                got: gens,
                max: crate::clifford::MAX_GENERATORS,
            });
        }
        let len = grid_len(dim, points)?;
        Ok(Self {
            dim,
            points,
            planes: vec![vec![ZERO; len]; 1 << gens],
        })
    }

    pub fn from_planes(dim: usize, points: usize, planes: Vec<Vec<Complex64>>) -> Result<Self> {
        let template = Self::zeros(dim, points)?;
        if planes.len() != template.planes.len() || planes.iter().any(|p| p.len() != template.len()) {
            return Err(Error::InvalidParameter(format!(
                "expected {} planes of {} samples",
                template.planes.len(),
                template.len()
            )));
        }
        Ok(Self { dim, points, planes })
    }

    /// Samples `f(x_k)` for a Clifford-valued function.
    pub fn from_fn(dim: usize, points: usize, mut f: impl FnMut(&[f64]) -> CliffordElement) -> Result<Self> {
        let mut out = Self::zeros(dim, points)?;
        let gens = generators_for_dim(dim);
        let mut x = vec![0.0; dim];
        for k in 0..out.len() {
            out.point_into(k, &mut x);
            let v = f(&x);
            if v.generators() != gens {
                return Err(Error::GeneratorMismatch {
                    left: gens,
                    right: v.generators(),
                });
            }
            for (plane, z) in out.planes.iter_mut().zip(v.components()) {
                plane[k] = *z;
            }
        }
        Ok(out)
    }

    /// Samples `f(x_k)` for a complex scalar function.
    pub fn from_scalar_fn(dim: usize, points: usize, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let mut out = Self::zeros(dim, points)?;
        let mut x = vec![0.0; dim];
        for k in 0..out.len() {
            out.point_into(k, &mut x);
            out.planes[0][k] = f(&x);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn generators(&self) -> usize {
        generators_for_dim(self.dim)
    }

    /// Number of grid points `P^n`.
    pub fn len(&self) -> usize {
        self.planes[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn planes(&self) -> &[Vec<Complex64>] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.planes
    }

    pub fn plane(&self, blade: Blade) -> &[Complex64] {
        &self.planes[blade.0 as usize]
    }

    /// Clifford value at flat index `k`.
    pub fn sample(&self, k: usize) -> CliffordElement {
        let comps = self.planes.iter().map(|p| p[k]).collect();
        CliffordElement::from_components(self.generators(), comps).expect("validated")
    }

    /// `‖u(x_k)‖`.
    pub fn sample_norm(&self, k: usize) -> f64 {
        self.planes.iter().map(|p| p[k].norm_sqr()).sum::<f64>().sqrt()
    }

    /// Per-axis integer coordinates of flat index `k`.
    pub fn coords(&self, mut k: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            c[a] = k % self.points;
            k /= self.points;
        }
        c
    }

    /// Grid point `x_k`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        self.point_into(k, &mut x);
        x
    }

    fn point_into(&self, mut k: usize, x: &mut [f64]) {
        let h = 2.0 * PI / self.points as f64;
        for a in (0..self.dim).rev() {
            x[a] = (k % self.points) as f64 * h;
            k /= self.points;
        }
    }

    /// Quadrature cell volume `(2π/P)^n`.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * PI / self.points as f64).powi(self.dim as i32)
    }

    /// `max_k ‖u(x_k)‖`.
    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).map(|k| self.sample_norm(k)).fold(0.0, f64::max)
    }

    /// `self + t · other`.
    pub fn axpy(&self, t: Complex64, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.points != other.points {
            return Err(Error::InvalidParameter("grid shapes differ".into()));
        }
        let planes = self
            .planes
            .iter()
            .zip(&other.planes)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + t * y).collect())
            .collect();
        Ok(Self {
            dim: self.dim,
            points: self.points,
            planes,
        })
    }

    pub fn scale(&self, t: Complex64) -> Self {
        Self {
            dim: self.dim,
            points: self.points,
            planes: self
                .planes
                .iter()
                .map(|p| p.iter().map(|z| z * t).collect())
                .collect(),
        }
    }
}

fn grid_len(dim: usize, points: usize) -> Result<usize> {
    points
        .checked_pow(dim as u32)
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::InvalidParameter(format!("grid {points}^{dim} is too large")))
}

/// Signed frequency represented by DFT slot `j` on a grid of `points`.
/// The Nyquist slot of an even grid maps to `+points/2`.
pub fn signed_frequency(j: usize, points: usize) -> i64 {
    if 2 * j <= points {
        j as i64
    } else {
        j as i64 - points as i64
    }
}

/// Flat DFT slot holding frequency `m` on a grid of `points` per axis.
pub fn frequency_slot(m: &[i64], points: usize) -> usize {
    let p = points as i64;
    m.iter()
        .fold(0usize, |acc, &mj| acc * points + mj.rem_euclid(p) as usize)
}

/// Reusable multidimensional FFT plans for a fixed grid shape.
#[derive(Clone)]
pub struct GridFft {
    dim: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub fn new(dim: usize, points: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// In-place unnormalized forward transform `Σ_k u_k e^{-2πi jk/P}` over
    /// every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(&self.forward, data);
    }

    /// In-place unnormalized inverse transform `Σ_j c_j e^{+2πi jk/P}` over
    /// every axis.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(&self.inverse, data);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let p = self.points;
        debug_assert_eq!(data.len(), p.pow(self.dim as u32));
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        // Last axis is contiguous.
        fft.process_with_scratch(data, &mut scratch);
        if self.dim == 1 {
            return;
        }
        let mut line = vec![ZERO; p];
        for axis in 0..self.dim - 1 {
            let stride = p.pow((self.dim - 1 - axis) as u32);
            let block = stride * p;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

fn check_alias(points: usize, band: usize) -> Result<()> {
    if points < 2 * band + 1 {
        return Err(Error::Aliasing { points, band });
    }
    Ok(())
}

/// Fourier coefficients `û(m)`, `|m_j| ≤ band`, by uniform-grid quadrature.
pub fn forward_transform(g: &GridField, band: usize) -> Result<SpectralField> {
    check_alias(g.points, band)?;
    let fft = GridFft::new(g.dim, g.points);
    forward_transform_with(&fft, g, band)
}

pub(crate) fn forward_transform_with(fft: &GridFft, g: &GridField, band: usize) -> Result<SpectralField> {
    check_alias(g.points, band)?;
    let scale = 1.0 / g.len() as f64;
    let planes: Vec<Vec<Complex64>> = g
        .planes
        .iter()
        .map(|p| {
            let mut buf = p.clone();
            fft.forward(&mut buf);
            buf
        })
        .collect();
    let gens = g.generators();
    let mut out = SpectralField::zeros(g.dim, band)?;
    for m in band_cube(g.dim, band) {
        let slot = frequency_slot(m.as_slice(), g.points);
        let comps: Vec<Complex64> = planes.iter().map(|p| p[slot] * scale).collect();
        let c = CliffordElement::from_components(gens, comps)?;
        if !c.is_zero() {
            out.coeffs.insert(m, c);
        }
    }
    Ok(out)
}

/// Grid samples `u(x_k) = Σ_m û(m) e^{i⟨m, x_k⟩}`.
pub fn inverse_transform(f: &SpectralField, points: usize) -> Result<GridField> {
    check_alias(points, f.band)?;
    let fft = GridFft::new(f.dim, points);
    inverse_transform_with(&fft, f)
}

pub(crate) fn inverse_transform_with(fft: &GridFft, f: &SpectralField) -> Result<GridField> {
    let points = fft.points();
    check_alias(points, f.band)?;
    let mut out = GridField::zeros(f.dim, points)?;
    for (m, c) in &f.coeffs {
        let slot = frequency_slot(m.as_slice(), points);
        for (plane, z) in out.planes.iter_mut().zip(c.components()) {
            plane[slot] += *z;
        }
    }
    for plane in out.planes.iter_mut() {
        fft.inverse(plane);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_forward() {
        let g = GridField::from_scalar_fn(1, 8, |x| Complex64::from_polar(1.0, x[0])).unwrap();
        let f = forward_transform(&g, 3).unwrap();
        for m in band_cube(1, 3) {
            let want = if m.as_slice() == [1] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            };
            assert_abs_diff_eq!((f.scalar_coefficient(&m) - want).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_forward() {
        let g = GridField::from_scalar_fn(1, 5, |_| c(1.0, 0.0)).unwrap();
        let f = forward_transform(&g, 2).unwrap();
        assert_abs_diff_eq!(
            f.scalar_coefficient(&FrequencyIndex::zero(1)).re,
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(f.l2_norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cosine_on_torus() {
        let g = GridField::from_scalar_fn(2, 16, |x| c((2.0 * x[0]).cos(), 0.0)).unwrap();
        let f = forward_transform(&g, 4).unwrap();
        for m in band_cube(2, 4) {
            let want = match m.as_slice() {
                [2, 0] | [-2, 0] => 0.5,
                _ => 0.0,
            };
            assert_abs_diff_eq!((f.scalar_coefficient(&m) - want).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn aliasing_is_rejected() {
        let g = GridField::zeros(1, 6).unwrap();
        assert!(matches!(forward_transform(&g, 3), Err(Error::Aliasing { .. })));
        let f = SpectralField::zeros(2, 4).unwrap();
        assert!(matches!(inverse_transform(&f, 8), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn inverse_single_mode_and_empty() {
        let f = SpectralField::from_scalar_modes(1, 1, &[(vec![1], c(1.0, 0.0))]).unwrap();
        let g = inverse_transform(&f, 7).unwrap();
        for k in 0..7 {
            let x = g.point(k)[0];
            assert_abs_diff_eq!(
                (g.planes()[0][k] - Complex64::from_polar(1.0, x)).norm(),
                0.0,
                epsilon = 1e-14
            );
        }
        let z = inverse_transform(&SpectralField::zeros(2, 2).unwrap(), 5).unwrap();
        assert_eq!(z.sup_norm(), 0.0);
    }

    #[test]
    fn convolve_examples() {
        let e1 = SpectralField::from_scalar_modes(1, 2, &[(vec![1], c(1.0, 0.0))]).unwrap();
        let h = convolve(&e1, &e1).unwrap();
        assert_abs_diff_eq!(
            h.scalar_coefficient(&FrequencyIndex::new(vec![1])).re,
            2.0 * PI,
            epsilon = 1e-14
        );
        assert_eq!(h.len(), 1);

        let zero = SpectralField::zeros(1, 2).unwrap();
        assert!(convolve(&e1, &zero).unwrap().is_empty());

        let e10 = SpectralField::from_scalar_modes(2, 2, &[(vec![1, 0], c(1.0, 0.0))]).unwrap();
        let h = convolve(&e10, &e10).unwrap();
        assert_abs_diff_eq!(
            h.scalar_coefficient(&FrequencyIndex::new(vec![1, 0])).re,
            4.0 * PI * PI,
            epsilon = 1e-12
        );

        let other = SpectralField::zeros(2, 2).unwrap();
        assert!(matches!(
            convolve(&e1, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn project_zero_mean_examples() {
        let f = SpectralField::from_scalar_modes(1, 2, &[(vec![0], c(5.0, 0.0)), (vec![1], c(2.0, 0.0))])
            .unwrap();
        let p = project_zero_mean(&f);
        assert!(p.is_zero_mean());
        assert_eq!(p.len(), 1);
        assert_eq!(p.scalar_coefficient(&FrequencyIndex::new(vec![1])), c(2.0, 0.0));
        assert!(project_zero_mean(&SpectralField::zeros(1, 1).unwrap()).is_empty());
    }

    #[test]
    fn band_checks() {
        let mut f = SpectralField::zeros(1, 2).unwrap();
        assert!(matches!(
            f.insert_scalar(FrequencyIndex::new(vec![3]), c(1.0, 0.0)),
            Err(Error::OutOfBand { .. })
        ));
        f.insert_scalar(FrequencyIndex::new(vec![2]), c(1.0, 0.0))
            .unwrap();
        f.insert_scalar(FrequencyIndex::new(vec![2]), c(0.0, 0.0))
            .unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn cube_enumeration() {
        let all: Vec<_> = band_cube(2, 1).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].as_slice(), &[-1, -1]);
        assert_eq!(all[8].as_slice(), &[1, 1]);
        assert_eq!(signed_frequency(3, 6), 3);
        assert_eq!(signed_frequency(4, 6), -2);
        assert_eq!(frequency_slot(&[-1, 2], 5), 4 * 5 + 2);
    }
}
