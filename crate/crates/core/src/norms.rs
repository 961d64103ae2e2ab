//! Norms: quadrature `L¹`/`L²`, Sobolev norms from coefficients, and the
//! sum-space norm `‖f‖_{L¹ + H^s} = inf_{g+h=f} ‖g‖_{L¹} + ‖h‖_{H^s}`.
//!
//! The sum-space norm is computed by a primal-dual splitting on a uniform
//! grid with `P` points per axis. The integrable part `g` lives on the grid,
//! the Sobolev part `h = f - g` on the DFT frequencies of that grid. Frequencies
//! where the Sobolev weight is infinite (the mean for homogeneous `s < 0`, and
//! the Nyquist planes of even grids) are excluded from `h`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::{Blade, CliffordElement};
use crate::error::{Error, Result};
use crate::spectral::{
    band_cube, frequency_slot, generators_for_dim, signed_frequency, GridFft, GridField, SpectralField,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frequency weight of a Sobolev norm `‖h‖² = Σ_m w(m)² ‖ĥ(m)‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevWeight {
    /// `w(m)² = |m|^{2s}`; at `m = 0` infinite for `s < 0`, one for `s = 0`,
    /// zero for `s > 0`.
    Homogeneous,
    /// `w(m)² = (1 + |m|²)^s`.
    Bessel,
    /// `w(m)² = (1 + |m|)^{2s}`, the boundary convention used on the disk.
    Shifted,
}

impl SobolevWeight {
    /// `w(m)²` at `|m| = r`, or `None` where the weight is infinite.
    pub fn weight_sqr(self, r: f64, s: f64) -> Option<f64> {
        match self {
            SobolevWeight::Homogeneous if r == 0.0 => {
                if s < 0.0 {
                    None
                } else if s == 0.0 {
                    Some(1.0)
                } else {
                    Some(0.0)
                }
            }
            SobolevWeight::Homogeneous => Some(r.powf(2.0 * s)),
            SobolevWeight::Bessel => Some((1.0 + r * r).powf(s)),
            SobolevWeight::Shifted => Some((1.0 + r).powf(2.0 * s)),
        }
    }

    pub fn from_homogeneous_flag(homogeneous: bool) -> Self {
        if homogeneous {
            SobolevWeight::Homogeneous
        } else {
            SobolevWeight::Bessel
        }
    }
}

/// Sobolev norm with the homogeneous `|m|^{2s}` or Bessel `(1+|m|²)^s` weight.
pub fn sobolev_norm(u: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    sobolev_norm_weighted(u, s, SobolevWeight::from_homogeneous_flag(homogeneous))
}

pub fn sobolev_norm_weighted(u: &SpectralField, s: f64, weight: SobolevWeight) -> Result<f64> {
    let mut total = 0.0;
    for (m, c) in u.iter() {
        match weight.weight_sqr(m.norm(), s) {
            Some(w2) => total += w2 * c.norm_sqr(),
            None => {
                u.require_zero_mean()?;
            }
        }
    }
    Ok(total.sqrt())
}

/// `∫ ‖u(x)‖ dx` by the uniform-grid rule.
pub fn l1_norm(u: &GridField) -> f64 {
    u.cell_volume() * (0..u.len()).map(|k| u.sample_norm(k)).sum::<f64>()
}

/// `(∫ ‖u(x)‖² dx)^{1/2}` by the uniform-grid rule.
pub fn l2_norm(u: &GridField) -> f64 {
    let s: f64 = u
        .planes()
        .iter()
        .flat_map(|p| p.iter())
        .map(|z| z.norm_sqr())
        .sum();
    (u.cell_volume() * s).sqrt()
}

/// Stopping rule for the sum-space solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// Stop when `gap ≤ tol`.
    Absolute(f64),
    /// Stop when `gap ≤ tol · value`; scale invariant.
    Relative(f64),
}

impl Tolerance {
    pub fn value(self) -> f64 {
        match self {
            Tolerance::Absolute(t) | Tolerance::Relative(t) => t,
        }
    }
}

/// Parameters of [`sum_space_norm_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumSpaceOptions {
    /// Sobolev exponent of the `h` part.
    pub s: f64,
    pub weight: SobolevWeight,
    pub tol: Tolerance,
    /// Grid points per axis; defaults to `4N`.
    pub points: Option<usize>,
    pub max_iter: usize,
    /// Iterations between certificate evaluations.
    pub check_every: usize,
}

impl SumSpaceOptions {
    pub const DEFAULT_TOL: f64 = 1e-6;
    pub const DEFAULT_MAX_ITER: usize = 100_000;

    pub fn new(s: f64, weight: SobolevWeight) -> Self {
        Self {
            s,
            weight,
            tol: Tolerance::Absolute(Self::DEFAULT_TOL),
            points: None,
            max_iter: Self::DEFAULT_MAX_ITER,
            check_every: 50,
        }
    }

    pub fn with_tol(self, tol: Tolerance) -> Self {
        Self { tol, ..self }
    }

    pub fn with_points(self, points: usize) -> Self {
        Self {
            points: Some(points),
            ..self
        }
    }

    pub fn with_max_iter(self, max_iter: usize) -> Self {
        Self { max_iter, ..self }
    }
}

/// An (approximately) optimal split `f = g + h` with its certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct SumSpaceSplit {
    /// Integrable part on the grid.
    pub g: GridField,
    /// Sobolev part on the band `⌊(P-1)/2⌋` of the grid.
    pub h: SpectralField,
    /// `‖g‖_{L¹} + ‖h‖_{H^s}`.
    pub value: f64,
    pub l1_part: f64,
    pub sobolev_part: f64,
    /// Best dual objective; a lower bound on the discrete norm.
    pub lower_bound: f64,
    /// `value - lower_bound ≥ 0`.
    pub gap: f64,
    pub iterations: usize,
}

/// Sum-space norm `L¹ + Ḣ^s` (or `L¹ + H^s`) with an absolute tolerance.
pub fn sum_space_norm(f: &SpectralField, s: f64, homogeneous: bool, tol: f64) -> Result<SumSpaceSplit> {
    let opts = SumSpaceOptions::new(s, SobolevWeight::from_homogeneous_flag(homogeneous))
        .with_tol(Tolerance::Absolute(tol));
    sum_space_norm_with(f, &opts)
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    /// `h` must vanish; the dual variable is unconstrained.
    Free,
    /// Zero Sobolev cost; the dual variable must vanish.
    Pinned,
    /// Finite positive weight `w²`.
    Normal(f64),
}

struct Problem {
    fft: GridFft,
    dim: usize,
    points: usize,
    len: usize,
    cell: f64,
    /// `(2π)^{-n}`, radius of the dual Sobolev ball in coefficient units.
    rho: f64,
    slots: Vec<Slot>,
    /// Active blades and the normalized `f̂` on every slot.
    blades: Vec<usize>,
    fhat: Vec<Vec<Complex64>>,
    fgrid: Vec<Vec<Complex64>>,
    /// Normalization `‖f‖_{ℓ²}`; the solver works on `f / scale`.
    scale: f64,
}

impl Problem {
    fn fft_forward(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        self.fft.forward(&mut out);
        let scale = 1.0 / self.len as f64;
        out.iter_mut().for_each(|z| *z *= scale);
        out
    }

    fn fft_inverse(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        self.fft.inverse(&mut out);
        out
    }

    /// Evaluates the primal objective at `g` after forcing `ĝ = f̂` on free
    /// slots. Returns the value, its two parts and the corrected `g`.
    fn primal(&self, g: &[Vec<Complex64>]) -> (f64, f64, f64, Vec<Vec<Complex64>>) {
        let mut corrected = Vec::with_capacity(g.len());
        let mut sob = 0.0;
        for (c, gc) in g.iter().enumerate() {
            let mut ghat = self.fft_forward(gc);
            let mut touched = false;
            for (j, slot) in self.slots.iter().enumerate() {
                match *slot {
                    Slot::Free => {
                        if ghat[j] != self.fhat[c][j] {
                            ghat[j] = self.fhat[c][j];
                            touched = true;
                        }
                    }
                    Slot::Normal(w2) => sob += w2 * (self.fhat[c][j] - ghat[j]).norm_sqr(),
                    Slot::Pinned => {}
                }
            }
            corrected.push(if touched {
                self.fft_inverse(&ghat)
            } else {
                gc.clone()
            });
        }
        let l1 = self.cell * pointwise_norms(&corrected).sum::<f64>();
        let sob = sob.sqrt();
        (l1 + sob, l1, sob, corrected)
    }

    /// Dual objective `-Re⟨f, φ⟩` after scaling `φ` into the `L^∞` unit ball.
    fn dual(&self, phi: &[Vec<Complex64>]) -> f64 {
        let sup = pointwise_norms(phi).fold(0.0, f64::max);
        let scale = 1.0 / sup.max(1.0);
        let inner: f64 = phi
            .iter()
            .zip(&self.fgrid)
            .flat_map(|(p, f)| p.iter().zip(f))
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        -self.cell * inner * scale
    }

    /// Projection of coefficient planes onto the dual Sobolev ball
    /// `(2π)^n (Σ ‖φ̂(m)‖²/w(m)²)^{1/2} ≤ 1`.
    fn project_dual_ball(&self, vhat: &mut [Vec<Complex64>]) {
        let mut terms: Vec<(f64, f64)> = Vec::new();
        for (j, slot) in self.slots.iter().enumerate() {
            match *slot {
                Slot::Pinned => vhat.iter_mut().for_each(|v| v[j] = ZERO),
                Slot::Normal(w2) => {
                    let a: f64 = vhat.iter().map(|v| v[j].norm_sqr()).sum();
                    if a > 0.0 {
                        terms.push((1.0 / w2, a));
                    }
                }
                Slot::Free => {}
            }
        }
        let rho2 = self.rho * self.rho;
        let psi = |mu: f64| -> (f64, f64) {
            let mut v = -rho2;
            let mut dv = 0.0;
            for &(om, a) in &terms {
                let d = 1.0 / (1.0 + mu * om);
                v += om * a * d * d;
                dv -= 2.0 * om * om * a * d * d * d;
            }
            (v, dv)
        };
        let (v0, _) = psi(0.0);
        if v0 <= 0.0 {
            return;
        }
        // psi is convex and decreasing, so Newton from 0 increases
        // monotonically to the root.
        let mut mu = 0.0;
        for _ in 0..200 {
            let (v, dv) = psi(mu);
            if v <= 0.0 {
                break;
            }
            let next = mu - v / dv;
            if next <= mu || next.is_nan() || (next - mu) <= 1e-15 * next {
                mu = next.max(mu);
                break;
            }
            mu = next;
        }
        for (j, slot) in self.slots.iter().enumerate() {
            if let Slot::Normal(w2) = *slot {
                let d = 1.0 / (1.0 + mu / w2);
                vhat.iter_mut().for_each(|v| v[j] *= d);
            }
        }
    }
}

fn pointwise_norms(planes: &[Vec<Complex64>]) -> impl Iterator<Item = f64> + '_ {
    (0..planes[0].len()).map(move |k| planes.iter().map(|p| p[k].norm_sqr()).sum::<f64>().sqrt())
}

/// Sum-space norm `inf_{g+h=f} ‖g‖_{L¹} + ‖h‖_{H^s}` with explicit options.
pub fn sum_space_norm_with(f: &SpectralField, opts: &SumSpaceOptions) -> Result<SumSpaceSplit> {
    let dim = f.dim();
    let points = opts.points.unwrap_or(4 * f.band()).max(2 * f.band() + 1);
    if !opts.s.is_finite() {
        return Err(Error::InvalidParameter("Sobolev exponent must be finite".into()));
    }
    if opts.check_every == 0 || opts.tol.value() < 0.0 || !opts.tol.value().is_finite() {
        return Err(Error::InvalidParameter(
            "invalid solver tolerance or schedule".into(),
        ));
    }
    if opts.weight.weight_sqr(0.0, opts.s).is_none() {
        f.require_zero_mean()?;
    }
    let h_band = (points - 1) / 2;
    let gens = generators_for_dim(dim);
    let scale = f.l2_norm();
    if scale == 0.0 {
        return Ok(SumSpaceSplit {
            g: GridField::zeros(dim, points)?,
            h: SpectralField::zeros(dim, h_band.max(1))?,
            value: 0.0,
            l1_part: 0.0,
            sobolev_part: 0.0,
            lower_bound: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }

    let fft = GridFft::new(dim, points);
    let len = points.pow(dim as u32);
    let mut slots = Vec::with_capacity(len);
    let mut m = vec![0i64; dim];
    for mut flat in 0..len {
        let mut nyquist = false;
        for a in (0..dim).rev() {
            let j = flat % points;
            flat /= points;
            nyquist |= points % 2 == 0 && 2 * j == points;
            m[a] = signed_frequency(j, points);
        }
        let r = m.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        slots.push(match (nyquist, opts.weight.weight_sqr(r, opts.s)) {
            (true, _) | (_, None) => Slot::Free,
            (false, Some(0.0)) => Slot::Pinned,
            (false, Some(w2)) => Slot::Normal(w2),
        });
    }

    // Active blades and normalized data.
    let mut blades: Vec<usize> = (0..1usize << gens)
        .filter(|&b| f.iter().any(|(_, c)| c.components()[b] != ZERO))
        .collect();
    if blades.is_empty() {
        blades.push(0);
    }
    let mut fhat = vec![vec![ZERO; len]; blades.len()];
    for (mm, c) in f.iter() {
        let j = frequency_slot(mm.as_slice(), points);
        for (ci, &b) in blades.iter().enumerate() {
            fhat[ci][j] = c.components()[b] / scale;
        }
    }
    let mut problem = Problem {
        fft,
        dim,
        points,
        len,
        cell: (2.0 * PI / points as f64).powi(dim as i32),
        rho: (2.0 * PI).powi(-(dim as i32)),
        slots,
        blades,
        fhat,
        fgrid: Vec::new(),
        scale,
    };
    problem.fgrid = problem.fhat.iter().map(|p| problem.fft_inverse(p)).collect();
    let free_content = problem
        .slots
        .iter()
        .enumerate()
        .any(|(j, s)| *s == Slot::Free && problem.fhat.iter().any(|p| p[j] != ZERO));
    if free_content {
        return Err(Error::NonZeroMean(f.mean_norm()));
    }

    let (iterations, converged, best) = solve(&problem, opts);
    let split = assemble_split(&problem, h_band, &best, iterations)?;
    if converged {
        Ok(split)
    } else {
        Err(Error::NonConvergence {
            iterations,
            gap: split.gap,
            partial: Box::new(split),
        })
    }
}

struct Best {
    primal: f64,
    l1: f64,
    sob: f64,
    g: Vec<Vec<Complex64>>,
    dual: f64,
}

impl Best {
    fn gap(&self) -> f64 {
        (self.primal - self.dual).max(0.0)
    }
}

/// `τσ`; the steps are `τ = STEP^{1/2} ν` and `σ = STEP^{1/2} / ν`.
const STEP: f64 = 0.99;
/// Initial primal weight `ν = (τ/σ)^{1/2}`, rebalanced at every restart.
const INITIAL_WEIGHT: f64 = 3.0;
const RESTART_FACTOR: f64 = 0.2;

fn solve(p: &Problem, opts: &SumSpaceOptions) -> (usize, bool, Best) {
    let comps = p.blades.len();
    let len = p.len;

    // Warm start: g = 0 (pure Sobolev split) and the Sobolev-dual maximizer.
    let mut g = vec![vec![ZERO; len]; comps];
    let sob_f: f64 = p
        .slots
        .iter()
        .enumerate()
        .map(|(j, s)| match *s {
            Slot::Normal(w2) => w2 * p.fhat.iter().map(|v| v[j].norm_sqr()).sum::<f64>(),
            _ => 0.0,
        })
        .sum::<f64>()
        .sqrt();
    let mut phi_hat = vec![vec![ZERO; len]; comps];
    if sob_f > 0.0 {
        let c = p.rho / sob_f;
        for (j, s) in p.slots.iter().enumerate() {
            if let Slot::Normal(w2) = *s {
                for (ph, fh) in phi_hat.iter_mut().zip(&p.fhat) {
                    ph[j] = -fh[j] * (c * w2);
                }
            }
        }
    }
    let mut phi: Vec<Vec<Complex64>> = phi_hat.iter().map(|v| p.fft_inverse(v)).collect();
    let sup = pointwise_norms(&phi).fold(0.0, f64::max);
    if sup > 1.0 {
        phi.iter_mut().flatten().for_each(|z| *z /= sup);
    }

    let mut best = {
        let (v0, l0, s0, g0) = p.primal(&g);
        let (v1, l1, s1, g1) = p.primal(&p.fgrid);
        let dual = p.dual(&phi);
        if v1 < v0 {
            Best {
                primal: v1,
                l1,
                sob: s1,
                g: g1,
                dual,
            }
        } else {
            Best {
                primal: v0,
                l1: l0,
                sob: s0,
                g: g0,
                dual,
            }
        }
    };
    let target = |b: &Best| match opts.tol {
        Tolerance::Absolute(t) => t / p.scale,
        Tolerance::Relative(t) => t * b.primal,
    };
    if best.gap() <= target(&best) {
        return (0, true, best);
    }

    let mut g_bar = g.clone();
    let mut g_sum = vec![vec![ZERO; len]; comps];
    let mut phi_sum = vec![vec![ZERO; len]; comps];
    let mut n_avg = 0usize;
    let mut restart_gap = best.gap();
    let mut weight = INITIAL_WEIGHT;
    let (mut tau, mut sigma) = (STEP.sqrt() * weight, STEP.sqrt() / weight);
    let mut g_anchor = g.clone();
    let mut phi_anchor = phi.clone();
    let mut v = vec![ZERO; len];
    let mut iter = 0usize;
    while iter < opts.max_iter {
        iter += 1;
        // Dual step: φ ← Proj_{B*}(φ + σ ḡ - σ f), done on coefficients.
        let mut vhat: Vec<Vec<Complex64>> = Vec::with_capacity(comps);
        for ci in 0..comps {
            for k in 0..len {
                v[k] = phi[ci][k] + g_bar[ci][k] * sigma;
            }
            let mut h = p.fft_forward(&v);
            for (hj, fj) in h.iter_mut().zip(&p.fhat[ci]) {
                *hj -= fj * sigma;
            }
            vhat.push(h);
        }
        p.project_dual_ball(&mut vhat);
        for ci in 0..comps {
            phi[ci] = p.fft_inverse(&vhat[ci]);
        }
        // Primal step: pointwise group soft-threshold of g - τ φ.
        for k in 0..len {
            let nrm = (0..comps)
                .map(|ci| (g[ci][k] - phi[ci][k] * tau).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let shrink = if nrm > tau { 1.0 - tau / nrm } else { 0.0 };
            for ci in 0..comps {
                let new = (g[ci][k] - phi[ci][k] * tau) * shrink;
                g_bar[ci][k] = new * 2.0 - g[ci][k];
                g[ci][k] = new;
            }
        }
        for ci in 0..comps {
            for k in 0..len {
                g_sum[ci][k] += g[ci][k];
                phi_sum[ci][k] += phi[ci][k];
            }
        }
        n_avg += 1;

        if iter % opts.check_every == 0 || iter == opts.max_iter {
            let inv = 1.0 / n_avg as f64;
            let g_avg: Vec<Vec<Complex64>> = g_sum
                .iter()
                .map(|v| v.iter().map(|z| z * inv).collect())
                .collect();
            let phi_avg: Vec<Vec<Complex64>> = phi_sum
                .iter()
                .map(|v| v.iter().map(|z| z * inv).collect())
                .collect();
            let cur = p.primal(&g);
            let avg = p.primal(&g_avg);
            let d_cur = p.dual(&phi);
            let d_avg = p.dual(&phi_avg);
            let local_cur = cur.0 - d_cur;
            let local_avg = avg.0 - d_avg;
            for cand in [cur, avg] {
                if cand.0 < best.primal {
                    best.primal = cand.0;
                    best.l1 = cand.1;
                    best.sob = cand.2;
                    best.g = cand.3;
                }
            }
            best.dual = best.dual.max(d_cur).max(d_avg);
            if best.gap() <= target(&best) {
                return (iter, true, best);
            }
            if best.gap() <= RESTART_FACTOR * restart_gap {
                if local_avg < local_cur {
                    g = g_avg;
                    phi = phi_avg;
                }
                // Rebalance the steps toward the observed primal/dual movement.
                let dg = distance(&g, &g_anchor);
                let dphi = distance(&phi, &phi_anchor);
                if dg > 0.0 && dphi > 0.0 {
                    weight = (weight * dg / dphi).sqrt().clamp(1e-3, 1e3);
                    tau = STEP.sqrt() * weight;
                    sigma = STEP.sqrt() / weight;
                }
                g_anchor = g.clone();
                phi_anchor = phi.clone();
                g_bar = g.clone();
                g_sum.iter_mut().flatten().for_each(|z| *z = ZERO);
                phi_sum.iter_mut().flatten().for_each(|z| *z = ZERO);
                n_avg = 0;
                restart_gap = best.gap();
            }
        }
    }
    (iter, false, best)
}

fn distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn assemble_split(p: &Problem, h_band: usize, best: &Best, iterations: usize) -> Result<SumSpaceSplit> {
    let scale = p.scale;
    let gens = generators_for_dim(p.dim);
    let mut planes = vec![vec![ZERO; p.len]; 1 << gens];
    for (ci, &b) in p.blades.iter().enumerate() {
        planes[b] = best.g[ci].iter().map(|z| z * scale).collect();
    }
    let g = GridField::from_planes(p.dim, p.points, planes)?;

    let ghat: Vec<Vec<Complex64>> = best.g.iter().map(|v| p.fft_forward(v)).collect();
    let mut h = SpectralField::zeros(p.dim, h_band)?;
    for m in band_cube(p.dim, h_band) {
        let j = frequency_slot(m.as_slice(), p.points);
        let mut x = CliffordElement::zero(gens)?;
        for (ci, &b) in p.blades.iter().enumerate() {
            x.set(Blade(b as u16), (p.fhat[ci][j] - ghat[ci][j]) * scale);
        }
        h.insert(m, x)?;
    }
    Ok(SumSpaceSplit {
        g,
        h,
        value: best.primal * scale,
        l1_part: best.l1 * scale,
        sobolev_part: best.sob * scale,
        lower_bound: best.dual * scale,
        gap: best.gap() * scale,
        iterations,
    })
}
