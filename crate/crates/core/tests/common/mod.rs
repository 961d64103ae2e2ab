//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use fracbb_core::{Complex64, SobolevWeight, SpectralField};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small circle instance for the sum-space oracle.
#[derive(Clone, Debug)]
pub struct OracleInstance {
    pub s: f64,
    pub weight: SobolevWeight,
    pub band: usize,
    pub points: usize,
    pub modes: Vec<(i64, Complex64)>,
}

impl OracleInstance {
    pub fn field(&self) -> SpectralField {
        let modes: Vec<(Vec<i64>, Complex64)> = self.modes.iter().map(|&(m, z)| (vec![m], z)).collect();
        SpectralField::from_scalar_modes(1, self.band, &modes).unwrap()
    }
}

/// Ten three-mode instances on band 3 with a 12-point grid.
pub fn oracle_instances() -> Vec<OracleInstance> {
    let exponents = [-0.5, 0.5, 1.5, 1.75, 2.0];
    (0..10u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let mut support: Vec<i64> = vec![-3, -2, -1, 1, 2, 3];
            support.shuffle(&mut rng);
            let modes = support[..3]
                .iter()
                .map(|&m| {
                    (
                        m,
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    )
                })
                .collect();
            OracleInstance {
                s: exponents[i as usize % 5],
                weight: if i < 5 {
                    SobolevWeight::Homogeneous
                } else {
                    SobolevWeight::Bessel
                },
                band: 3,
                points: 12,
                modes,
            }
        })
        .collect()
}

fn signed(j: usize, p: usize) -> i64 {
    if 2 * j < p {
        j as i64
    } else {
        j as i64 - p as i64
    }
}

/// `w(m)²`, or `None` where `h̃(m)` is forced to vanish.
fn weight_sqr(inst: &OracleInstance, m: i64, p: usize) -> Option<f64> {
    if p % 2 == 0 && m.unsigned_abs() as usize * 2 == p {
        return None;
    }
    let r = m.unsigned_abs() as f64;
    match inst.weight {
        SobolevWeight::Homogeneous if m == 0 => {
            if inst.s < 0.0 {
                None
            } else if inst.s == 0.0 {
                Some(1.0)
            } else {
                Some(0.0)
            }
        }
        SobolevWeight::Homogeneous => Some(r.powf(2.0 * inst.s)),
        SobolevWeight::Bessel => Some((1.0 + r * r).powf(inst.s)),
        SobolevWeight::Shifted => Some((1.0 + r).powf(2.0 * inst.s)),
    }
}

/// `ĝ(m) = P^{-1} Σ_k g_k e^{-imx_k}` by direct summation.
fn dft(g: &[Complex64]) -> Vec<Complex64> {
    let p = g.len();
    (0..p)
        .map(|j| {
            let m = signed(j, p) as f64;
            g.iter()
                .enumerate()
                .map(|(k, z)| z * Complex64::from_polar(1.0, -m * 2.0 * PI * k as f64 / p as f64))
                .sum::<Complex64>()
                / p as f64
        })
        .collect()
}

/// `Σ_m c(m) e^{imx_k}` by direct summation.
fn synth(c: &[Complex64]) -> Vec<Complex64> {
    let p = c.len();
    (0..p)
        .map(|k| {
            c.iter()
                .enumerate()
                .map(|(j, z)| {
                    z * Complex64::from_polar(1.0, signed(j, p) as f64 * 2.0 * PI * k as f64 / p as f64)
                })
                .sum()
        })
        .collect()
}

/// Discrete sum-space norm by projected subgradient descent with normalized
/// steps. Each phase restarts from the best iterate with the step shrunk by
/// `0.7`; returns the best objective seen.
pub fn subgradient_oracle(inst: &OracleInstance, iterations: usize) -> f64 {
    let p = inst.points;
    let cell = 2.0 * PI / p as f64;
    let mut fhat = vec![Complex64::new(0.0, 0.0); p];
    for &(m, z) in &inst.modes {
        fhat[m.rem_euclid(p as i64) as usize] += z;
    }
    let w2: Vec<Option<f64>> = (0..p).map(|j| weight_sqr(inst, signed(j, p), p)).collect();

    let project = |g: &mut Vec<Complex64>| {
        let ghat = dft(g);
        let mut fix = vec![Complex64::new(0.0, 0.0); p];
        for j in 0..p {
            if w2[j].is_none() {
                fix[j] = fhat[j] - ghat[j];
            }
        }
        for (gk, d) in g.iter_mut().zip(synth(&fix)) {
            *gk += d;
        }
    };
    let objective = |g: &[Complex64]| -> (f64, Vec<Complex64>) {
        let ghat = dft(g);
        let r: Vec<Complex64> = (0..p)
            .map(|j| (fhat[j] - ghat[j]) * w2[j].unwrap_or(0.0))
            .collect();
        let sob: f64 = (0..p)
            .map(|j| (fhat[j] - ghat[j]).norm_sqr() * w2[j].unwrap_or(0.0))
            .sum::<f64>()
            .sqrt();
        (
            cell * g.iter().map(|z| z.norm()).sum::<f64>() + sob,
            r.into_iter().map(|z| z / sob.max(1e-300)).collect(),
        )
    };

    let mut g = vec![Complex64::new(0.0, 0.0); p];
    project(&mut g);
    let mut best = objective(&g).0;
    let mut best_g = g.clone();
    let phases = 40;
    let per_phase = iterations / phases;
    let mut step = 0.5;
    for _ in 0..phases {
        g = best_g.clone();
        for _ in 0..per_phase {
            let (value, weighted) = objective(&g);
            if value < best {
                best = value;
                best_g = g.clone();
            }
            let adj = synth(&weighted);
            let d: Vec<Complex64> = g
                .iter()
                .zip(&adj)
                .map(|(z, a)| {
                    let l1 = if z.norm() > 0.0 {
                        z / z.norm() * cell
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    l1 - a / p as f64
                })
                .collect();
            let dn = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if dn == 0.0 {
                break;
            }
            for (gk, dk) in g.iter_mut().zip(&d) {
                *gk -= dk * (step / dn);
            }
            project(&mut g);
        }
        step *= 0.7;
    }
    best.min(objective(&g).0)
}

/// Random Clifford-valued field with every coefficient in the band cube drawn
/// uniformly from the unit box; the mean is removed when `zero_mean`.
pub fn random_clifford_field(dim: usize, band: usize, seed: u64, zero_mean: bool) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = fracbb_core::spectral::generators_for_dim(dim);
    let mut out = SpectralField::zeros(dim, band).unwrap();
    for m in fracbb_core::spectral::band_cube(dim, band) {
        let comps = (0..1usize << gens)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        out.insert(
            m,
            fracbb_core::CliffordElement::from_components(gens, comps).unwrap(),
        )
        .unwrap();
    }
    if zero_mean {
        fracbb_core::project_zero_mean(&out)
    } else {
        out
    }
}

/// Random scalar field with uniform coefficients in the unit box.
pub fn random_scalar_field(dim: usize, band: usize, seed: u64, zero_mean: bool) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = SpectralField::from_scalar_fn(dim, band, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .unwrap();
    if zero_mean {
        fracbb_core::project_zero_mean(&out)
    } else {
        out
    }
}

/// Random Clifford element with components in the unit box.
pub fn random_element(gens: usize, rng: &mut impl Rng) -> fracbb_core::CliffordElement {
    let comps = (0..1usize << gens)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    fracbb_core::CliffordElement::from_components(gens, comps).unwrap()
}

/// `max_m ‖a(m) - b(m)‖` over the union of supports.
pub fn max_coeff_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.iter()
        .map(|(m, x)| (x - &b.coefficient(m)).norm())
        .chain(b.iter().map(|(m, y)| (&a.coefficient(m) - y).norm()))
        .fold(0.0, f64::max)
}

/// `‖f‖_{L²(D)}` by polar quadrature: Richardson-extrapolated midpoint rule
/// in the radius and a uniform rule in the angle with `angles` nodes.
pub fn bergman_quadrature(f: &fracbb_core::PowerSeries, radial: usize, angles: usize) -> f64 {
    let integral = |n: usize| -> f64 {
        let h = 1.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let rho = (i as f64 + 0.5) * h;
            let ring: f64 = (0..angles)
                .map(|k| {
                    let z = Complex64::from_polar(rho, 2.0 * PI * k as f64 / angles as f64);
                    f.evaluate(z).norm_sqr()
                })
                .sum::<f64>()
                * (2.0 * PI / angles as f64);
            total += ring * rho * h;
        }
        total
    };
    ((4.0 * integral(2 * radial) - integral(radial)) / 3.0).sqrt()
}
