//! Shared value types: complex vectors and decibel conversions.

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A non-empty vector of finite complex amplitudes.
///
/// One representation serves for precoder weights, channel gains and PA
/// inputs/outputs; the role is given by the owning type.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec(Vec<Complex64>);

impl ComplexVec {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("complex vector must have at least one entry"));
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param(format!("entry {i} is not finite")));
        }
        Ok(ComplexVec(values))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Sum of squared magnitudes.
    pub fn power(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Multiply every entry by the same complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        ComplexVec(self.0.iter().map(|z| z * factor).collect())
    }
}

impl Index<usize> for ComplexVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a ComplexVec {
    type Item = &'a Complex64;
    type IntoIter = std::slice::Iter<'a, Complex64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A power ratio expressed in decibels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Decibel(pub f64);

impl Decibel {
    pub fn from_linear(x: f64) -> Self {
        Decibel(linear_to_db(x))
    }

    pub fn to_linear(self) -> f64 {
        db_to_linear(self)
    }
}

pub fn db_to_linear(x: Decibel) -> f64 {
    10f64.powf(x.0 / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn db_examples() {
        assert_eq!(db_to_linear(Decibel(0.0)), 1.0);
        assert!((db_to_linear(Decibel(10.0)) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(Decibel(26.0)) - 398.107_170_553_497_25).abs() < 1e-9);
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(ComplexVec::new(vec![]).is_err());
        assert!(ComplexVec::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVec::new(vec![Complex64::new(0.0, f64::INFINITY)]).is_err());
    }

    proptest! {
        #[test]
        fn db_round_trip(x in -300.0f64..300.0) {
            let back = Decibel::from_linear(Decibel(x).to_linear()).0;
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
