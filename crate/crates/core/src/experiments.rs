//! Verification harness: the bilinear operator `A`, Dirac-pair partial sums,
//! randomized estimation of the constants in the fractional Bourgain-Brezis
//! inequalities on `T^n`, and the disk corpus.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::disk::{bbb_ratio, boundary_options, random_series, BergmanRow};
use crate::error::{Error, Result};
use crate::norms::{sum_space_norm_with, SobolevWeight, SumSpaceOptions, Tolerance};
use crate::operators::MultiplierOp;
use crate::spectral::{FrequencyIndex, SpectralField};

/// Largest tolerated fraction of samples whose optimizer did not converge.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// Parameters of a randomized experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub band: usize,
    pub samples: usize,
    pub seed: u64,
    /// Coefficient magnitudes `|m|^{-decay}`.
    pub decay: f64,
    /// Relative tolerance of each sum-space solve.
    pub tol: f64,
    /// Solver grid points per axis; defaults to `4 · band`.
    pub points: Option<usize>,
    pub max_iter: usize,
    /// Every sample is multiplied by this factor (scale-invariance checks).
    pub scale: f64,
}

impl ExperimentConfig {
    pub fn new(dim: usize, band: usize, samples: usize, seed: u64) -> Self {
        Self {
            dim,
            band,
            samples,
            seed,
            decay: 1.0,
            tol: 1e-6,
            points: None,
            max_iter: SumSpaceOptions::DEFAULT_MAX_ITER,
            scale: 1.0,
        }
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Zero-mean scalar field supported on the ball `0 < |m| ≤ band`, with
/// `|û(m)| = |m|^{-decay}` and independent uniform phases. Deterministic in
/// `(seed, index)`.
pub fn random_field(cfg: &ExperimentConfig, index: u64) -> Result<SpectralField> {
    let mut rng = sample_rng(cfg.seed, index);
    let radius2 = (cfg.band * cfg.band) as f64;
    let mut out = SpectralField::from_scalar_fn(cfg.dim, cfg.band, |m| {
        let r2 = m.norm_sqr();
        let phase = rng.random::<f64>() * 2.0 * PI;
        if m.is_zero() || r2 > radius2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(cfg.scale * r2.sqrt().powf(-cfg.decay), phase)
        }
    })?;
    out = crate::spectral::project_zero_mean(&out);
    Ok(out)
}

/// One sample of an [`InequalityReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub id: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Certificate gap of each sum-space solve, `j = 0..=n`.
    pub gaps: Vec<f64>,
    pub iterations: Vec<usize>,
}

/// Distribution of the ratio `LHS/RHS`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSummary {
    pub min: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
    pub max: f64,
}

impl RatioSummary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let idx = ((v.len() - 1) as f64 * p).round() as usize;
            v[idx]
        };
        Some(Self {
            min: v[0],
            q10: q(0.10),
            median: q(0.5),
            q90: q(0.9),
            q99: q(0.99),
            max: v[v.len() - 1],
        })
    }
}

/// Empirical constant of `‖u - ū‖_{L²} ≤ C Σ_j ‖(-Δ)^{n/4} R_j u‖_{L¹+Ḣ^{-n/2}}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub config: ExperimentConfig,
    pub samples: Vec<SampleRecord>,
    /// Ids of samples skipped because an optimizer did not converge.
    pub failed_ids: Vec<u64>,
    pub failure_rate: f64,
    /// True when the failure rate exceeds [`MAX_FAILURE_RATE`].
    pub failed: bool,
    pub summary: Option<RatioSummary>,
}

/// Solver options used for every right-hand-side term.
pub fn bb_options(cfg: &ExperimentConfig) -> SumSpaceOptions {
    let mut opts = SumSpaceOptions::new(-(cfg.dim as f64) / 2.0, SobolevWeight::Homogeneous)
        .with_tol(Tolerance::Relative(cfg.tol))
        .with_max_iter(cfg.max_iter);
    opts.points = cfg.points;
    opts
}

/// LHS `‖u - ū‖_{ℓ²}` and RHS `Σ_j ‖op_j u‖_{L¹+Ḣ^{-n/2}}` for one field.
/// Returns `None` when a solve does not converge.
pub fn evaluate_bb(
    u: &SpectralField,
    id: u64,
    ops: &[MultiplierOp],
    opts: &SumSpaceOptions,
) -> Result<Option<SampleRecord>> {
    let lhs = crate::spectral::project_zero_mean(u).l2_norm();
    let mut rhs = 0.0;
    let mut gaps = Vec::with_capacity(ops.len());
    let mut iterations = Vec::with_capacity(ops.len());
    for op in ops {
        let term = op.apply(u)?;
        match sum_space_norm_with(&term, opts) {
            Ok(split) => {
                rhs += split.value;
                gaps.push(split.gap);
                iterations.push(split.iterations);
            }
            Err(Error::NonConvergence { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(SampleRecord {
        id,
        lhs,
        rhs,
        ratio: lhs / rhs,
        gaps,
        iterations,
    }))
}

/// The operators `(-Δ)^{n/4} R_j`, `j = 0..=n`, with `R_0 = Id`.
pub fn bb_operators(dim: usize) -> Result<Vec<MultiplierOp>> {
    let lap = MultiplierOp::fractional_laplacian(dim, dim as f64 / 4.0)?;
    let mut ops = vec![lap.clone()];
    for j in 1..=dim {
        ops.push(MultiplierOp::riesz(dim, j, false)?.then(&lap)?);
    }
    Ok(ops)
}

/// Runs the randomized check of the fractional Bourgain-Brezis inequality.
pub fn verify_bb(cfg: &ExperimentConfig) -> Result<InequalityReport> {
    if cfg.dim == 0 || cfg.band == 0 || cfg.samples == 0 {
        return Err(Error::InvalidParameter(
            "dim, band and samples must be positive".into(),
        ));
    }
    if !(cfg.scale.is_finite() && cfg.scale != 0.0) {
        return Err(Error::InvalidParameter("scale must be finite and nonzero".into()));
    }
    let ops = bb_operators(cfg.dim)?;
    let opts = bb_options(cfg);
    let results: Vec<(u64, Option<SampleRecord>)> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|id| {
            let u = random_field(cfg, id)?;
            evaluate_bb(&u, id, &ops, &opts).map(|r| (id, r))
        })
        .collect::<Result<_>>()?;
    let mut samples = Vec::new();
    let mut failed_ids = Vec::new();
    for (id, r) in results {
        match r {
            Some(rec) => samples.push(rec),
            None => failed_ids.push(id),
        }
    }
    let failure_rate = failed_ids.len() as f64 / cfg.samples as f64;
    let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    Ok(InequalityReport {
        config: cfg.clone(),
        summary: RatioSummary::from_values(&ratios),
        samples,
        failed_ids,
        failure_rate,
        failed: failure_rate > MAX_FAILURE_RATE,
    })
}

/// Partial sum of `A(g¹, g²) = Σ_{0<|n|≤N} sign(n) g¹_n g²_{-n} / (i|n|)`.
pub fn bilinear_a(
    g1: impl Fn(i64) -> Complex64,
    g2: impl Fn(i64) -> Complex64,
    truncation: usize,
) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut total = Complex64::new(0.0, 0.0);
    for n in 1..=truncation as i64 {
        total += g1(n) * g2(-n) / (i * n as f64);
        total -= g1(-n) * g2(n) / (i * n as f64);
    }
    total
}

/// [`bilinear_a`] on coefficient tables of circle fields, truncated at the
/// smaller band.
pub fn bilinear_a_fields(g1: &SpectralField, g2: &SpectralField) -> Result<Complex64> {
    if g1.dim() != 1 || g2.dim() != 1 {
        return Err(Error::InvalidParameter(
            "bilinear A is defined on the circle".into(),
        ));
    }
    let at = |g: &SpectralField, n: i64| g.scalar_coefficient(&FrequencyIndex::new(vec![n]));
    Ok(bilinear_a(|n| at(g1, n), |n| at(g2, n), g1.band().min(g2.band())))
}

/// Coefficients `(2π)^{-1} e^{-ina}` of the Dirac mass at `a`, band-limited.
///
/// With these coefficients `A(δ_a, δ_b)` equals `(2π)^{-2}` times the Dirac-pair
/// series at `b - a`; [`bilinear_a_diracs`] instead uses `g_n = e^{ina}`.
pub fn dirac_coefficients(a: f64, band: usize) -> Result<SpectralField> {
    SpectralField::from_scalar_fn(1, band, |m| {
        Complex64::from_polar(1.0 / (2.0 * PI), -(m.as_slice()[0] as f64) * a)
    })
}

/// Partial sums of `A` on a pair of Dirac masses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiracTrace {
    /// `(a - b) mod 2π` in `[0, 2π)`.
    pub theta: f64,
    /// `(N, S_N)` at the requested truncations.
    pub partial_sums: Vec<(usize, f64)>,
    /// `max_{N ≤ N_max} |S_N|`.
    pub sup_abs: f64,
    /// `π - θ` for `θ ∈ (0, 2π)`, zero for `θ = 0`.
    pub limit: f64,
}

/// Partial sums `S_N = 2 Σ_{n≤N} sin(n(a-b))/n` of `A(δ_a, δ_b)` with
/// `g_n = e^{ina}`.
pub fn bilinear_a_diracs(a: f64, b: f64, n_list: &[usize]) -> DiracTrace {
    let theta = (a - b).rem_euclid(2.0 * PI);
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let mut wanted: Vec<usize> = n_list.to_vec();
    wanted.sort_unstable();
    let mut partial_sums = Vec::with_capacity(wanted.len());
    let mut next = wanted.iter().peekable();
    while next.peek() == Some(&&0) {
        partial_sums.push((0, 0.0));
        next.next();
    }
    let mut sum = 0.0;
    let mut sup_abs = 0.0f64;
    for n in 1..=n_max {
        sum += 2.0 * (n as f64 * theta).sin() / n as f64;
        sup_abs = sup_abs.max(sum.abs());
        while next.peek() == Some(&&n) {
            partial_sums.push((n, sum));
            next.next();
        }
    }
    DiracTrace {
        theta,
        partial_sums,
        sup_abs,
        limit: if theta == 0.0 { 0.0 } else { PI - theta },
    }
}

/// Parameters of the disk corpus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BergmanConfig {
    pub corpus_size: usize,
    pub order: usize,
    /// Decay laws cycled through the corpus.
    pub decays: Vec<f64>,
    pub radii: Vec<f64>,
    pub seed: u64,
    /// Relative tolerance of each boundary-norm solve.
    pub tol: f64,
}

impl BergmanConfig {
    pub fn new(corpus_size: usize, seed: u64) -> Self {
        Self {
            corpus_size,
            order: 32,
            decays: vec![0.75, 1.0, 1.5],
            radii: vec![0.9, 0.99, 0.999, 0.9999],
            seed,
            tol: 1e-6,
        }
    }
}

/// One `(series, radius)` row of a [`BergmanReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BergmanRecord {
    pub series_id: u64,
    pub decay: f64,
    #[serde(flatten)]
    pub row: BergmanRow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BergmanReport {
    pub config: BergmanConfig,
    pub rows: Vec<BergmanRecord>,
    /// `max ‖f_r‖_{L²(D)} / ‖f_r‖_{L¹+H^{-1/2}}` over the corpus.
    pub max_ratio: f64,
    /// `max ‖f_r‖_{L²(D)} / ‖f_r‖_{L¹(S¹)}` over the corpus.
    pub max_l1_ratio: f64,
    /// Running max of the ratio along the radius ladder, per radius.
    pub ladder_max: Vec<(f64, f64)>,
}

/// Evaluates [`bbb_ratio`] over a seeded random corpus.
pub fn verify_bergman(cfg: &BergmanConfig) -> Result<BergmanReport> {
    if cfg.corpus_size == 0 || cfg.decays.is_empty() || cfg.radii.is_empty() {
        return Err(Error::InvalidParameter(
            "empty corpus, decay list or radius ladder".into(),
        ));
    }
    let opts = boundary_options(Tolerance::Relative(cfg.tol));
    let per_series: Vec<Vec<BergmanRecord>> = (0..cfg.corpus_size as u64)
        .into_par_iter()
        .map(|id| {
            let decay = cfg.decays[id as usize % cfg.decays.len()];
            let f = random_series(cfg.order, decay, cfg.seed, id);
            Ok(bbb_ratio(&f, &cfg.radii, &opts)?
                .into_iter()
                .map(|row| BergmanRecord {
                    series_id: id,
                    decay,
                    row,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<BergmanRecord> = per_series.into_iter().flatten().collect();
    let max_ratio = rows.iter().map(|r| r.row.ratio).fold(0.0, f64::max);
    let max_l1_ratio = rows.iter().map(|r| r.row.bergman / r.row.l1).fold(0.0, f64::max);
    let mut running = 0.0f64;
    let ladder_max = cfg
        .radii
        .iter()
        .map(|&r| {
            let at_r = rows
                .iter()
                .filter(|x| x.row.r == r)
                .map(|x| x.row.ratio)
                .fold(0.0, f64::max);
            running = running.max(at_r);
            (r, running)
        })
        .collect();
    Ok(BergmanReport {
        config: cfg.clone(),
        rows,
        max_ratio,
        max_l1_ratio,
        ladder_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn random_field_band_one_has_2n_modes() {
        for dim in 1..=3 {
            let f = random_field(&ExperimentConfig::new(dim, 1, 1, 9), 0).unwrap();
            assert_eq!(f.len(), 2 * dim);
            assert!(f.is_zero_mean());
        }
    }

    #[test]
    fn random_field_is_deterministic() {
        let cfg = ExperimentConfig::new(2, 4, 1, 11);
        assert_eq!(random_field(&cfg, 3).unwrap(), random_field(&cfg, 3).unwrap());
        assert_ne!(random_field(&cfg, 3).unwrap(), random_field(&cfg, 4).unwrap());
    }

    #[test]
    fn bilinear_examples() {
        let one = |n: i64| {
            if n.abs() == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        assert_eq!(bilinear_a(one, one, 3), Complex64::new(0.0, 0.0));
        assert_eq!(
            bilinear_a(one, |_| Complex64::new(0.0, 0.0), 3),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn dirac_trace_examples() {
        let t = bilinear_a_diracs(PI, 0.0, &[1, 10, 100]);
        assert!(t.partial_sums.iter().all(|(_, s)| s.abs() < 1e-12));
        let t = bilinear_a_diracs(PI / 2.0, 0.0, &[100_000]);
        assert_abs_diff_eq!(t.partial_sums[0].1, PI / 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(t.limit, PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn dirac_coefficients_rescale_a() {
        let (a, b) = (0.7, 2.1);
        let n = 40;
        let da = dirac_coefficients(a, n).unwrap();
        let db = dirac_coefficients(b, n).unwrap();
        let got = bilinear_a_fields(&da, &db).unwrap();
        let series = bilinear_a_diracs(b, a, &[n]).partial_sums[0].1;
        assert_abs_diff_eq!(got.re, series / (4.0 * PI * PI), epsilon = 1e-13);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn single_mode_bb_sample() {
        let ops = bb_operators(1).unwrap();
        let cfg = ExperimentConfig::new(1, 1, 1, 0);
        let u = SpectralField::from_scalar_modes(1, 1, &[(vec![1], Complex64::new(1.0, 0.0))]).unwrap();
        let rec = evaluate_bb(&u, 0, &ops, &bb_options(&cfg)).unwrap().unwrap();
        assert_eq!(rec.lhs, 1.0);
        // Both terms are unit-modulus single modes with Ḣ^{-1/2} norm 1.
        assert!(rec.rhs <= 2.0 + 1e-9);
        assert!(rec.ratio.is_finite() && rec.ratio > 0.0);
    }
}
