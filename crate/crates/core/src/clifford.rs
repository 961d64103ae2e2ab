//! The universal complex Clifford algebra with generators satisfying
//! `e_j e_k + e_k e_j = 2 δ_jk`.
//!
//! Basis elements `e_α` are indexed by bitmasks: bit `j - 1` set means `e_j`
//! occurs in the ordered product. Elements store all `2^n` coefficients
//! densely.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported generator count.
pub const MAX_GENERATORS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A basis subset `α ⊆ {1, …, n}` encoded as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blade(pub u16);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Builds a blade from 1-based, strictly increasing generator indices.
    pub fn from_indices(indices: &[usize], gens: usize) -> Result<Self> {
        let mut mask = 0u16;
        let mut prev = 0usize;
        for &j in indices {
            if j <= prev || j > gens {
                return Err(Error::InvalidBlade(indices.to_vec()));
            }
            mask |= 1 << (j - 1);
            prev = j;
        }
        Ok(Blade(mask))
    }

    /// The single generator `e_j` (1-based).
    pub fn generator(j: usize) -> Self {
        Blade(1 << (j - 1))
    }

    /// 1-based generator indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..16)
            .filter(|b| self.0 & (1 << b) != 0)
            .map(|b| b + 1)
            .collect()
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    /// Sign of `e_a e_b` relative to `e_{a xor b}`, counting the transpositions
    /// needed to sort the concatenated index list. Repeated generators square
    /// to `+1` and contribute no sign.
    pub fn product_sign(a: Blade, b: Blade) -> f64 {
        let mut hi = a.0 >> 1;
        let mut swaps = 0u32;
        while hi != 0 {
            swaps += (hi & b.0).count_ones();
            hi >>= 1;
        }
        if swaps % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign picked up by reversing the generator order, `(-1)^{k(k-1)/2}`.
    pub fn reversion_sign(self) -> f64 {
        let k = self.grade();
        if (k * k.saturating_sub(1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Label such as `e`, `e1`, `e12` used in CSV headers.
    pub fn label(self) -> String {
        let mut s = String::from("e");
        for j in self.indices() {
            s.push_str(&j.to_string());
        }
        s
    }
}

/// An element `x = Σ_α x_α e_α` of the complex Clifford algebra on `n`
/// generators.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    gens: usize,
    comps: Vec<Complex64>,
}

impl CliffordElement {
    pub fn zero(gens: usize) -> Result<Self> {
        if gens > MAX_GENERATORS {
            return Err(Error::TooManyGenerators {
                got: gens,
                max: MAX_GENERATORS,
            });
        }
        Ok(Self {
            gens,
            comps: vec![ZERO; 1 << gens],
        })
    }

    /// `z · 1`.
    pub fn scalar(gens: usize, z: Complex64) -> Result<Self> {
        let mut x = Self::zero(gens)?;
        x.comps[0] = z;
        Ok(x)
    }

    /// `z · e_α` for a blade `α`.
    pub fn basis(gens: usize, blade: Blade, z: Complex64) -> Result<Self> {
        let mut x = Self::zero(gens)?;
        if blade.0 as usize >= x.comps.len() {
            return Err(Error::InvalidBlade(blade.indices()));
        }
        x.comps[blade.0 as usize] = z;
        Ok(x)
    }

    /// Embeds a real vector as the grade-1 element `Σ v_j e_j`.
    pub fn vector(v: &[f64]) -> Result<Self> {
        let mut x = Self::zero(v.len())?;
        for (j, &vj) in v.iter().enumerate() {
            x.comps[1 << j] = Complex64::new(vj, 0.0);
        }
        Ok(x)
    }

    /// Builds an element from a full coefficient vector of length `2^gens`.
    pub fn from_components(gens: usize, comps: Vec<Complex64>) -> Result<Self> {
        if gens > MAX_GENERATORS {
            return Err(Error::TooManyGenerators {
                got: gens,
                max: MAX_GENERATORS,
            });
        }
        if comps.len() != 1 << gens {
            return Err(Error::InvalidParameter(format!(
                "expected {} components for {} generators, got {}",
                1 << gens,
                gens,
                comps.len()
            )));
        }
        Ok(Self { gens, comps })
    }

    pub fn generators(&self) -> usize {
        self.gens
    }

    pub fn components(&self) -> &[Complex64] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Complex64] {
        &mut self.comps
    }

    pub fn get(&self, blade: Blade) -> Complex64 {
        self.comps.get(blade.0 as usize).copied().unwrap_or(ZERO)
    }

    pub fn set(&mut self, blade: Blade, z: Complex64) {
        self.comps[blade.0 as usize] = z;
    }

    /// Nonzero components with their blades.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, Complex64)> + '_ {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(a, z)| (Blade(a as u16), *z))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|z| *z == ZERO)
    }

    /// Scalar part `P_0(x) = x_∅`.
    pub fn p0(&self) -> Complex64 {
        self.comps[0]
    }

    /// `‖x‖² = Σ_α |x_α|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.comps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            gens: self.gens,
            comps: self.comps.iter().map(|c| c * z).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        Self {
            gens: self.gens,
            comps: self.comps.iter().map(|c| c * t).collect(),
        }
    }

    /// Clifford product `self · other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.gens != other.gens {
            return Err(Error::GeneratorMismatch {
                left: self.gens,
                right: other.gens,
            });
        }
        let mut out = vec![ZERO; self.comps.len()];
        for (a, &xa) in self.comps.iter().enumerate() {
            if xa == ZERO {
                continue;
            }
            for (b, &yb) in other.comps.iter().enumerate() {
                if yb == ZERO {
                    continue;
                }
                let sign = Blade::product_sign(Blade(a as u16), Blade(b as u16));
                out[a ^ b] += xa * yb * sign;
            }
        }
        Ok(Self {
            gens: self.gens,
            comps: out,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.gens != other.gens {
            return Err(Error::GeneratorMismatch {
                left: self.gens,
                right: other.gens,
            });
        }
        Ok(Self {
            gens: self.gens,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Clifford conjugation: order reversal of every basis product combined
    /// with complex conjugation of the coefficients.
    pub fn conjugate(&self) -> Self {
        Self {
            gens: self.gens,
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(a, z)| z.conj() * Blade(a as u16).reversion_sign())
                .collect(),
        }
    }

    /// Inverse `m / |m|²` of a nonzero real vector.
    pub fn invert_vector(m: &[f64]) -> Result<Self> {
        let n2: f64 = m.iter().map(|x| x * x).sum();
        if n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        let scaled: Vec<f64> = m.iter().map(|x| x / n2).collect();
        Self::vector(&scaled)
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (blade, z) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i){}", z.re, z.im, blade.label())?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;

    /// Panics on a generator-count mismatch; use [`CliffordElement::try_mul`]
    /// for fallible code paths.
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_mul(rhs).expect("Clifford generator mismatch")
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;

    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(rhs).expect("Clifford generator mismatch")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;

    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(&-rhs).expect("Clifford generator mismatch")
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&CliffordElement> for CliffordElement {
    fn add_assign(&mut self, rhs: &CliffordElement) {
        assert_eq!(self.gens, rhs.gens, "Clifford generator mismatch");
        for (a, b) in self.comps.iter_mut().zip(&rhs.comps) {
            *a += b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(gens: usize, idx: &[usize]) -> CliffordElement {
        CliffordElement::basis(gens, Blade::from_indices(idx, gens).unwrap(), c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn generators_anticommute() {
        let e1 = e(2, &[1]);
        let e2 = e(2, &[2]);
        assert!((&(&e1 * &e2) + &(&e2 * &e1)).is_zero());
    }

    #[test]
    fn generator_squares_to_one() {
        let e1 = e(2, &[1]);
        assert_eq!(&e1 * &e1, CliffordElement::scalar(2, c(1.0, 0.0)).unwrap());
    }

    #[test]
    fn bivector_squares_to_minus_one() {
        let e12 = e(2, &[1, 2]);
        assert_eq!(&e12 * &e12, CliffordElement::scalar(2, c(-1.0, 0.0)).unwrap());
    }

    #[test]
    fn conjugation_examples() {
        let e1 = e(2, &[1]);
        assert_eq!(e1.conjugate(), e1);
        let i = CliffordElement::scalar(2, c(0.0, 1.0)).unwrap();
        assert_eq!(i.conjugate(), CliffordElement::scalar(2, c(0.0, -1.0)).unwrap());
        let e12 = e(2, &[1, 2]);
        assert_eq!(e12.conjugate(), -&e12);
    }

    #[test]
    fn p0_examples() {
        let x = &CliffordElement::scalar(1, c(3.0, 0.0)).unwrap() + &e(1, &[1]).scale_real(2.0);
        assert_eq!(x.p0(), c(3.0, 0.0));
        let y = &CliffordElement::scalar(1, c(1.0, 0.0)).unwrap() + &e(1, &[1]);
        assert_eq!((&y.conjugate() * &y).p0(), c(2.0, 0.0));
        assert_eq!(e(2, &[1, 2]).p0(), c(0.0, 0.0));
    }

    #[test]
    fn invert_vector_examples() {
        let inv = CliffordElement::invert_vector(&[2.0, 0.0]).unwrap();
        assert_eq!(inv, e(2, &[1]).scale_real(0.5));
        let prod = &inv * &CliffordElement::vector(&[2.0, 0.0]).unwrap();
        assert_eq!(prod, CliffordElement::scalar(2, c(1.0, 0.0)).unwrap());

        let inv = CliffordElement::invert_vector(&[1.0, 1.0]).unwrap();
        assert_eq!(inv, (&e(2, &[1]) + &e(2, &[2])).scale_real(0.5));

        assert!(matches!(
            CliffordElement::invert_vector(&[0.0, 0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn rejects_bad_blades_and_mismatch() {
        assert!(Blade::from_indices(&[2, 1], 2).is_err());
        assert!(Blade::from_indices(&[3], 2).is_err());
        assert!(CliffordElement::zero(9).is_err());
        let a = CliffordElement::zero(2).unwrap();
        let b = CliffordElement::zero(3).unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::GeneratorMismatch { .. })));
    }

    #[test]
    fn labels() {
        assert_eq!(Blade::SCALAR.label(), "e");
        assert_eq!(Blade::from_indices(&[1, 3], 3).unwrap().label(), "e13");
    }
}
