//! Convolution kernels inverting `D²`.
//!
//! On the circle the kernel is `K = -k/2` with the sawtooth `k`. On `T^n` the
//! kernel is assembled from the directional kernels with coefficients
//! `m_j/|m|^{n+1}`, whose Fourier series only converge conditionally; grid
//! evaluation therefore pairs `m` with `(-m_j, m̃)` into sine sums and adds
//! dyadic blocks in increasing `(k₁, k̃)` order.
//!
//! Dyadic level `k ≥ 1` covers `[2^{k-1}, 2^k)`; level `0` covers `[0, 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::{Blade, CliffordElement};
use crate::error::{Error, Result};
use crate::spectral::{
    band_cube, frequency_slot, inverse_transform, FrequencyIndex, GridFft, GridField, SpectralField,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest consecutive-sup ratio accepted as "bounded" by [`sup_norm_scan`].
pub const BOUNDED_RATIO: f64 = 1.25;

/// The sawtooth `k(x) = x + π` for `x < 0`, `x - π` for `x > 0` on `(-π, π]`,
/// extended periodically, with `k(0) = 0`.
pub fn sawtooth_eval(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y == 0.0 {
        0.0
    } else if y < 0.0 {
        y + PI
    } else {
        y - PI
    }
}

/// Sawtooth coefficients `k̂(n) = i/n`.
pub fn kernel_sawtooth(band: usize) -> Result<SpectralField> {
    SpectralField::from_scalar_fn(1, band, |m| {
        let n = m.as_slice()[0];
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            I / n as f64
        }
    })
}

/// `K̂(n) = -i/(2n)`, the 1-D inverse of `D²` as a convolution kernel.
pub fn kernel_k_1d(band: usize) -> Result<SpectralField> {
    kernel_sawtooth(band).map(|k| k.scale(Complex64::new(-0.5, 0.0)))
}

/// Directional kernel coefficients `m_j/|m|^{n+1}` (1-based axis), `n ≥ 2`.
pub fn kernel_component_nd(dim: usize, axis: usize, band: usize) -> Result<SpectralField> {
    if dim < 2 {
        return Err(Error::InvalidParameter(
            "directional kernels need dimension at least 2; use the 1-D kernel".into(),
        ));
    }
    if axis == 0 || axis > dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    SpectralField::from_scalar_fn(dim, band, |m| {
        Complex64::new(directional_coefficient(m.as_slice(), axis), 0.0)
    })
}

fn directional_coefficient(m: &[i64], axis: usize) -> f64 {
    let r2: f64 = m.iter().map(|&x| (x * x) as f64).sum();
    if r2 == 0.0 {
        return 0.0;
    }
    m[axis - 1] as f64 / r2.sqrt().powi(m.len() as i32 + 1)
}

/// `K̂(m) = (1/2i) m/|m|^{n+1}` as a grade-1 Clifford field, `n ≥ 2`.
pub fn kernel_k_nd(dim: usize, band: usize) -> Result<SpectralField> {
    if dim < 2 {
        return Err(Error::InvalidParameter(
            "the Clifford kernel needs dimension at least 2; use the 1-D kernel".into(),
        ));
    }
    let mut out = SpectralField::zeros(dim, band)?;
    for m in band_cube(dim, band) {
        if m.is_zero() {
            continue;
        }
        let mut x = CliffordElement::zero(dim)?;
        for j in 1..=dim {
            let c = directional_coefficient(m.as_slice(), j);
            x.set(Blade::generator(j), Complex64::new(0.0, -0.5 * c));
        }
        out.insert(m, x)?;
    }
    Ok(out)
}

/// Which kernel a [`KernelSpec`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// The sawtooth `k` on the circle.
    Sawtooth,
    /// `K = -k/2` on the circle.
    InverseDiracSquared,
    /// `Σ m_j/|m|^{n+1} e^{i⟨m,x⟩}` on `T^n` (1-based axis).
    Directional {
        axis: usize,
    },
    Zero,
}

/// How grid values are assembled from coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assembly {
    /// Sine-paired sums added in increasing dyadic `(k₁, k̃)` block order.
    DyadicBlocks,
    /// Plain inverse FFT of the truncated coefficient cube.
    Direct,
}

/// A truncated kernel together with its grid assembly rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KernelSpec {
    pub dim: usize,
    pub kind: KernelKind,
    pub band: usize,
    pub assembly: Assembly,
}

impl KernelSpec {
    pub fn sawtooth(band: usize) -> Self {
        Self {
            dim: 1,
            kind: KernelKind::Sawtooth,
            band,
            assembly: Assembly::DyadicBlocks,
        }
    }

    pub fn inverse_dirac_squared_1d(band: usize) -> Self {
        Self {
            dim: 1,
            kind: KernelKind::InverseDiracSquared,
            band,
            assembly: Assembly::DyadicBlocks,
        }
    }

    pub fn directional(dim: usize, axis: usize, band: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(
                "directional kernels need dimension at least 2".into(),
            ));
        }
        if axis == 0 || axis > dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        Ok(Self {
            dim,
            kind: KernelKind::Directional { axis },
            band,
            assembly: Assembly::DyadicBlocks,
        })
    }

    pub fn zero(dim: usize, band: usize) -> Self {
        Self {
            dim,
            kind: KernelKind::Zero,
            band,
            assembly: Assembly::DyadicBlocks,
        }
    }

    pub fn with_band(self, band: usize) -> Self {
        Self { band, ..self }
    }

    pub fn with_assembly(self, assembly: Assembly) -> Self {
        Self { assembly, ..self }
    }

    /// Truncated coefficient table on the band cube.
    pub fn coefficients(&self) -> Result<SpectralField> {
        match self.kind {
            KernelKind::Sawtooth => kernel_sawtooth(self.band),
            KernelKind::InverseDiracSquared => kernel_k_1d(self.band),
            KernelKind::Directional { axis } => kernel_component_nd(self.dim, axis, self.band),
            KernelKind::Zero => SpectralField::zeros(self.dim, self.band),
        }
    }

    /// Grid values of the truncated kernel on `points` per axis.
    pub fn evaluate(&self, points: usize) -> Result<GridField> {
        if points < 2 * self.band + 1 {
            return Err(Error::Aliasing {
                points,
                band: self.band,
            });
        }
        match (self.kind, self.assembly) {
            (KernelKind::Zero, _) => GridField::zeros(self.dim, points),
            (_, Assembly::Direct) => inverse_transform(&self.coefficients()?, points),
            (KernelKind::Directional { axis }, Assembly::DyadicBlocks) => {
                directional_dyadic_grid(self.dim, axis, self.band, points)
            }
            (kind, Assembly::DyadicBlocks) => {
                let c = if kind == KernelKind::Sawtooth {
                    |n: f64| I / n
                } else {
                    |n: f64| -I / (2.0 * n)
                };
                circle_dyadic_grid(self.band, points, c)
            }
        }
    }
}

/// Range of positive integers in dyadic level `k`, clipped to `[lo, hi]`.
fn level_range(k: u32, lo: i64, hi: i64) -> std::ops::RangeInclusive<i64> {
    let (a, b) = if k == 0 {
        (0, 0)
    } else {
        (1i64 << (k - 1), (1i64 << k) - 1)
    };
    a.max(lo)..=b.min(hi)
}

/// Dyadic level of a nonnegative real `t`: `0` for `t < 1`, else
/// `⌊log₂ t⌋ + 1`.
fn level_of(t: f64) -> u32 {
    if t < 1.0 {
        0
    } else {
        t.log2().floor() as u32 + 1
    }
}

fn levels_for(band: usize) -> u32 {
    level_of(band as f64)
}

fn sin_table(points: usize) -> Vec<f64> {
    (0..points)
        .map(|r| (2.0 * PI * r as f64 / points as f64).sin())
        .collect()
}

/// `Σ_{0<n≤band} c(n)(e^{inx} - e^{-inx}) = 2i Σ c(n) sin(nx)` for an odd
/// coefficient sequence, added in dyadic blocks.
fn circle_dyadic_grid(band: usize, points: usize, c: impl Fn(f64) -> Complex64) -> Result<GridField> {
    let mut out = GridField::zeros(1, points)?;
    let table = sin_table(points);
    let values = &mut out.planes_mut()[0];
    for k1 in 1..=levels_for(band) {
        for n in level_range(k1, 1, band as i64) {
            let w = 2.0 * I * c(n as f64);
            for (k, v) in values.iter_mut().enumerate() {
                *v += w * table[(n as usize * k) % points];
            }
        }
    }
    Ok(out)
}

/// Grid values of the directional kernel from the paired form
/// `2i Σ_{m_j>0} Σ_{m̃} c(m) sin(m_j x_j) e^{i⟨m̃,x̃⟩}`.
///
/// The inner sum over a block of `m̃` is symmetric under `m̃ ↦ -m̃`, so only
/// its real (cosine) part is kept and the result is exactly imaginary.
fn directional_dyadic_grid(dim: usize, axis: usize, band: usize, points: usize) -> Result<GridField> {
    let mut out = GridField::zeros(dim, points)?;
    let rest_dim = dim - 1;
    let rest_fft = GridFft::new(rest_dim, points);
    let rest_len = points.pow(rest_dim as u32);
    let table = sin_table(points);

    // For each flat grid index: coordinate along `axis` and flat index of the
    // remaining coordinates.
    let total = out.len();
    let mut along = vec![0usize; total];
    let mut rest = vec![0usize; total];
    for k in 0..total {
        let coords = out.coords(k);
        along[k] = coords[axis - 1];
        rest[k] = coords
            .iter()
            .enumerate()
            .filter(|(a, _)| *a != axis - 1)
            .fold(0, |acc, (_, &c)| acc * points + c);
    }

    // Group the transverse frequencies of the cube by dyadic level of |m̃|.
    let tilde_all: Vec<FrequencyIndex> = band_cube(rest_dim, band).collect();
    let max_kt = tilde_all.iter().map(|m| level_of(m.norm())).max().unwrap_or(0);
    let mut tilde_levels: Vec<Vec<&FrequencyIndex>> = vec![Vec::new(); max_kt as usize + 1];
    for m in &tilde_all {
        tilde_levels[level_of(m.norm()) as usize].push(m);
    }

    let mut acc = vec![0.0f64; total];
    let mut buf = vec![Complex64::new(0.0, 0.0); rest_len];
    let mut full = vec![0i64; dim];
    for k1 in 1..=levels_for(band) {
        for level in &tilde_levels {
            if level.is_empty() {
                continue;
            }
            for mj in level_range(k1, 1, band as i64) {
                buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for mt in level {
                    let mut t = mt.as_slice().iter();
                    for (a, slot) in full.iter_mut().enumerate() {
                        *slot = if a == axis - 1 { mj } else { *t.next().unwrap() };
                    }
                    buf[frequency_slot(mt.as_slice(), points)] += directional_coefficient(&full, axis);
                }
                rest_fft.inverse(&mut buf);
                for k in 0..total {
                    acc[k] += 2.0 * table[(mj as usize * along[k]) % points] * buf[rest[k]].re;
                }
            }
        }
    }
    let plane = &mut out.planes_mut()[0];
    for (v, a) in plane.iter_mut().zip(acc) {
        *v = Complex64::new(0.0, a);
    }
    Ok(out)
}

/// Inner dyadic block value
/// `Σ_{m_j ∈ L(k1)} Σ_{|m̃| ∈ L(k̃)} m_j/|m|^{n+1} sin(m_j x_j) e^{i⟨m̃, x̃⟩}`
/// of the directional kernel along a 1-based axis, without band truncation.
pub fn dyadic_block_sum(dim: usize, axis: usize, k1: u32, ktilde: u32, x: &[f64]) -> Result<Complex64> {
    if dim < 2 {
        return Err(Error::InvalidParameter(
            "dyadic blocks need dimension at least 2".into(),
        ));
    }
    if axis == 0 || axis > dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: x.len(),
        });
    }
    if k1 >= 62 || ktilde >= 31 {
        return Err(Error::InvalidParameter("dyadic level too large".into()));
    }
    let reach = if ktilde == 0 { 0 } else { (1i64 << ktilde) - 1 };
    let lo = if ktilde == 0 {
        0.0
    } else {
        (1u64 << (ktilde - 1)) as f64
    };
    let hi = (1u64 << ktilde) as f64;
    let xt: Vec<f64> = (0..dim).filter(|&a| a != axis - 1).map(|a| x[a]).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut full = vec![0i64; dim];
    for mj in level_range(k1, 1, i64::MAX) {
        let s = (mj as f64 * x[axis - 1]).sin();
        for mt in band_cube(dim - 1, reach as usize) {
            let r = mt.norm();
            if r < lo || r >= hi {
                continue;
            }
            let mut t = mt.as_slice().iter();
            for (a, slot) in full.iter_mut().enumerate() {
                *slot = if a == axis - 1 { mj } else { *t.next().unwrap() };
            }
            let phase: f64 = mt.as_slice().iter().zip(&xt).map(|(&m, &y)| m as f64 * y).sum();
            total += Complex64::from_polar(directional_coefficient(&full, axis) * s, phase);
        }
    }
    Ok(total)
}

/// One band of a [`ScanReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub band: usize,
    pub points: usize,
    pub sup: f64,
    /// `sup(band) / sup(previous band)`; absent for the first band or when the
    /// previous sup is zero.
    pub ratio: Option<f64>,
}

/// Empirical sup norms of a truncated kernel across bands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub kernel: KernelSpec,
    pub oversample: usize,
    pub rows: Vec<ScanRow>,
    pub max_ratio: Option<f64>,
    /// False when some consecutive ratio exceeds [`BOUNDED_RATIO`].
    pub bounded: bool,
}

/// Sup of `|truncated kernel|` on a grid of `oversample · band` points per
/// axis, for each band in increasing order.
pub fn sup_norm_scan(kernel: &KernelSpec, bands: &[usize], oversample: usize) -> Result<ScanReport> {
    if bands.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "bands must be strictly increasing".into(),
        ));
    }
    if oversample < 3 {
        return Err(Error::InvalidParameter(
            "oversampling factor must be at least 3".into(),
        ));
    }
    let mut rows: Vec<ScanRow> = Vec::with_capacity(bands.len());
    for &band in bands {
        let points = oversample * band;
        let grid = kernel.with_band(band).evaluate(points)?;
        let sup = grid.sup_norm();
        let ratio = rows
            .last()
            .filter(|prev| prev.sup > 0.0)
            .map(|prev| sup / prev.sup);
        rows.push(ScanRow {
            band,
            points,
            sup,
            ratio,
        });
    }
    let max_ratio = rows.iter().filter_map(|r| r.ratio).reduce(f64::max);
    Ok(ScanReport {
        kernel: *kernel,
        oversample,
        bounded: max_ratio.is_none_or(|r| r <= BOUNDED_RATIO),
        max_ratio,
        rows,
    })
}
