//! Fourier multiplier operators: fractional Laplacian, Riesz transforms, the
//! Dirac-type operators `D`, `D̄`, and the closed-form inverses of `D` and `D²`.
//!
//! Symbols act by left multiplication on each coefficient. Every operator
//! except the identity sends the `m = 0` mode to zero.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::clifford::{Blade, CliffordElement};
use crate::error::{Error, Result};
use crate::spectral::{generators_for_dim, FrequencyIndex, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

type Symbol = dyn Fn(&FrequencyIndex) -> CliffordElement + Send + Sync;

/// A Fourier multiplier with a Clifford-valued symbol.
#[derive(Clone)]
pub struct MultiplierOp {
    dim: usize,
    name: String,
    symbol: Arc<Symbol>,
    keeps_mean: bool,
}

impl fmt::Debug for MultiplierOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierOp")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .finish()
    }
}

fn scalar(dim: usize, z: Complex64) -> CliffordElement {
    CliffordElement::scalar(generators_for_dim(dim), z).expect("dimension validated")
}

/// Grade-1 element `Σ_j c_j e_j`.
fn vector(dim: usize, coeffs: impl Iterator<Item = Complex64>) -> CliffordElement {
    let mut x = CliffordElement::zero(dim).expect("dimension validated");
    for (j, cj) in coeffs.enumerate() {
        x.set(Blade::generator(j + 1), cj);
    }
    x
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if generators_for_dim(dim) > crate::clifford::MAX_GENERATORS {
        return Err(Error::TooManyGenerators {
            got: dim,
            max: crate::clifford::MAX_GENERATORS,
        });
    }
    Ok(())
}

impl MultiplierOp {
    /// Builds an operator from a symbol defined on nonzero frequencies.
    pub fn new(
        dim: usize,
        name: impl Into<String>,
        symbol: impl Fn(&FrequencyIndex) -> CliffordElement + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            name: name.into(),
            symbol: Arc::new(symbol),
            keeps_mean: false,
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::new(dim, "id", move |_| scalar(dim, Complex64::new(1.0, 0.0)))?;
        op.keeps_mean = true;
        Ok(op)
    }

    /// `(-Δ)^s` with symbol `|m|^{2s}`.
    pub fn fractional_laplacian(dim: usize, s: f64) -> Result<Self> {
        Self::new(dim, format!("fraclap({s})"), move |m| {
            scalar(dim, Complex64::new(m.norm().powf(2.0 * s), 0.0))
        })
    }

    /// Riesz transform `R_j` with symbol `i m_j/|m|`, or its conjugate
    /// `-i m_j/|m|`. Axes are 1-based.
    pub fn riesz(dim: usize, axis: usize, conjugated: bool) -> Result<Self> {
        if axis == 0 || axis > dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let sign = if conjugated { -1.0 } else { 1.0 };
        Self::new(
            dim,
            format!("riesz{axis}{}", if conjugated { "*" } else { "" }),
            move |m| {
                let mj = m.as_slice()[axis - 1] as f64;
                scalar(dim, I * (sign * mj / m.norm()))
            },
        )
    }

    fn dirac_with_sign(dim: usize, sign: f64, name: &str) -> Result<Self> {
        Self::new(dim, name, move |m| {
            let r = m.norm();
            let amp = r.powf(dim as f64 / 2.0);
            if dim == 1 {
                let sg = m.as_slice()[0].signum() as f64;
                scalar(dim, Complex64::new(1.0, sign * sg) * amp)
            } else {
                let mut x = vector(dim, m.as_slice().iter().map(|&mj| I * (sign * mj as f64 / r)));
                x.set(Blade::SCALAR, Complex64::new(1.0, 0.0));
                x.scale_real(amp)
            }
        })
    }

    /// `D = (-Δ)^{n/4}(Id + Σ e_j R_j)`; on the circle the scalar symbol
    /// `|m|^{1/2}(1 + i sign m)`.
    pub fn dirac(dim: usize) -> Result<Self> {
        Self::dirac_with_sign(dim, 1.0, "D")
    }

    /// `D̄ = (-Δ)^{n/4}(Id - Σ e_j R_j)`.
    pub fn dirac_bar(dim: usize) -> Result<Self> {
        Self::dirac_with_sign(dim, -1.0, "Dbar")
    }

    /// Inverse of `D` on zero-mean fields, symbol
    /// `(1 - Σ e_j i m_j/|m|) / (2|m|^{n/2})`.
    pub fn inverse_dirac(dim: usize) -> Result<Self> {
        let d = Self::dirac_bar(dim)?;
        Self::new(dim, "invD", move |m| {
            let amp = m.norm().powf(dim as f64);
            (d.symbol)(m).scale_real(0.5 / amp)
        })
    }

    /// Inverse of `D²` on zero-mean fields, symbol `(1/2i) m/|m|^{n+1}`; on
    /// the circle `-i/(2m)`.
    pub fn inverse_dirac_squared(dim: usize) -> Result<Self> {
        Self::new(dim, "invD2", move |m| {
            let r = m.norm();
            let c = Complex64::new(0.0, -0.5) / r.powi(dim as i32 + 1);
            if dim == 1 {
                scalar(dim, c * m.as_slice()[0] as f64)
            } else {
                vector(dim, m.as_slice().iter().map(|&mj| c * mj as f64))
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Symbol value at `m`, zero at `m = 0` unless the operator is the
    /// identity.
    pub fn symbol(&self, m: &FrequencyIndex) -> CliffordElement {
        if m.is_zero() && !self.keeps_mean {
            return scalar(self.dim, Complex64::new(0.0, 0.0));
        }
        (self.symbol)(m)
    }

    /// The operator `other ∘ self`: apply `self` first, then `other`. Its
    /// symbol is `other(m) · self(m)`.
    pub fn then(&self, other: &MultiplierOp) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let mut op = Self::new(self.dim, format!("{}∘{}", other.name, self.name), move |m| {
            &b.symbol(m) * &a.symbol(m)
        })?;
        op.keeps_mean = self.keeps_mean && other.keeps_mean;
        Ok(op)
    }

    /// Left-multiplies every coefficient by the symbol.
    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: u.dim(),
            });
        }
        Ok(u.map(|m, c| &self.symbol(m) * c))
    }
}

/// `(-Δ)^s u`.
pub fn fractional_laplacian(u: &SpectralField, s: f64) -> Result<SpectralField> {
    MultiplierOp::fractional_laplacian(u.dim(), s)?.apply(u)
}

/// `R_j u` (1-based axis), or `R̄_j u` when `conjugated`.
pub fn riesz(u: &SpectralField, axis: usize, conjugated: bool) -> Result<SpectralField> {
    MultiplierOp::riesz(u.dim(), axis, conjugated)?.apply(u)
}

pub fn dirac_d(u: &SpectralField) -> Result<SpectralField> {
    MultiplierOp::dirac(u.dim())?.apply(u)
}

pub fn dirac_dbar(u: &SpectralField) -> Result<SpectralField> {
    MultiplierOp::dirac_bar(u.dim())?.apply(u)
}

/// `F` with `D F = f`. Requires `f̂(0) = 0`.
pub fn invert_d(f: &SpectralField) -> Result<SpectralField> {
    f.require_zero_mean()?;
    MultiplierOp::inverse_dirac(f.dim())?.apply(f)
}

/// `w` with `D(D(w)) = g`. Requires `ĝ(0) = 0`.
pub fn invert_d2(g: &SpectralField) -> Result<SpectralField> {
    g.require_zero_mean()?;
    MultiplierOp::inverse_dirac_squared(g.dim())?.apply(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode(dim: usize, band: usize, m: &[i64]) -> SpectralField {
        SpectralField::from_scalar_modes(dim, band, &[(m.to_vec(), c(1.0, 0.0))]).unwrap()
    }

    fn at(f: &SpectralField, m: &[i64]) -> CliffordElement {
        f.coefficient(&FrequencyIndex::new(m.to_vec()))
    }

    #[test]
    fn fraclap_examples() {
        let u = fractional_laplacian(&mode(1, 4, &[3]), 0.25).unwrap();
        assert_abs_diff_eq!(at(&u, &[3]).p0().re, 3f64.sqrt(), epsilon = 1e-15);
        assert!(fractional_laplacian(&mode(1, 4, &[0]), 0.7).unwrap().is_empty());
    }

    #[test]
    fn riesz_examples() {
        assert_eq!(
            at(&riesz(&mode(1, 2, &[1]), 1, false).unwrap(), &[1]).p0(),
            c(0.0, 1.0)
        );
        assert_eq!(
            at(&riesz(&mode(1, 2, &[-1]), 1, false).unwrap(), &[-1]).p0(),
            c(0.0, -1.0)
        );
        let r = riesz(&mode(2, 2, &[1, 1]), 1, false).unwrap();
        assert_abs_diff_eq!(at(&r, &[1, 1]).p0().im, 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(
            riesz(&mode(2, 2, &[1, 1]), 3, false),
            Err(Error::AxisOutOfRange { .. })
        ));
        assert_eq!(
            at(&riesz(&mode(1, 2, &[1]), 1, true).unwrap(), &[1]).p0(),
            c(0.0, -1.0)
        );
    }

    #[test]
    fn dirac_examples() {
        assert_eq!(at(&dirac_d(&mode(1, 2, &[1])).unwrap(), &[1]).p0(), c(1.0, 1.0));
        let d = dirac_d(&mode(2, 2, &[1, 0])).unwrap();
        let v = at(&d, &[1, 0]);
        assert_eq!(v.p0(), c(1.0, 0.0));
        assert_eq!(v.get(Blade::generator(1)), c(0.0, 1.0));
        assert_eq!(v.get(Blade::generator(2)), c(0.0, 0.0));
    }

    #[test]
    fn inverse_examples() {
        let f = invert_d(&mode(1, 2, &[1])).unwrap();
        assert_abs_diff_eq!((at(&f, &[1]).p0() - c(0.5, -0.5)).norm(), 0.0, epsilon = 1e-15);
        assert!(invert_d(&SpectralField::zeros(1, 3).unwrap()).unwrap().is_empty());
        assert!(matches!(invert_d(&mode(1, 2, &[0])), Err(Error::NonZeroMean(_))));

        let w = invert_d2(&mode(1, 2, &[1])).unwrap();
        assert_abs_diff_eq!((at(&w, &[1]).p0() - c(0.0, -0.5)).norm(), 0.0, epsilon = 1e-15);
        let w = invert_d2(&mode(1, 2, &[-1])).unwrap();
        assert_abs_diff_eq!((at(&w, &[-1]).p0() - c(0.0, 0.5)).norm(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            invert_d2(&mode(2, 2, &[0, 0])),
            Err(Error::NonZeroMean(_))
        ));
    }

    #[test]
    fn d_squared_symbol_is_grade_one() {
        for dim in 1..=3usize {
            let d = MultiplierOp::dirac(dim).unwrap();
            let dd = d.then(&d).unwrap();
            for m in crate::spectral::band_cube(dim, 3).filter(|m| !m.is_zero()) {
                let got = dd.symbol(&m);
                let scale = Complex64::new(0.0, 2.0) * m.norm().powi(dim as i32 - 1);
                let want = if dim == 1 {
                    scalar(1, scale * m.as_slice()[0] as f64)
                } else {
                    vector(dim, m.as_slice().iter().map(|&mj| scale * mj as f64))
                };
                assert!((&got - &want).norm() <= 1e-12 * want.norm());
            }
        }
    }

    #[test]
    fn then_composes_in_order() {
        let a = MultiplierOp::riesz(2, 1, false).unwrap();
        let b = MultiplierOp::dirac(2).unwrap();
        let ab = a.then(&b).unwrap();
        let m = FrequencyIndex::new(vec![2, -1]);
        assert_eq!(ab.symbol(&m), &b.symbol(&m) * &a.symbol(&m));
        assert!(ab.symbol(&FrequencyIndex::zero(2)).is_zero());
        let id = MultiplierOp::identity(2).unwrap();
        assert_eq!(id.symbol(&FrequencyIndex::zero(2)).p0(), c(1.0, 0.0));
    }
}
