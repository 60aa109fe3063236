use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::exp;

/// Scalar kernel `x ↦ Σ c_k·exp(−r_k·|x|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpKernel {
    terms: Vec<(f64, f64)>,
}

impl ExpKernel {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        for &(c, r) in &terms {
            if !(r > 0.0) || !r.is_finite() || !c.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "kernel term ({c}, {r}) needs a finite coefficient and positive rate"
                )));
            }
        }
        Ok(ExpKernel { terms })
    }

    /// `c·exp(−r|x|)`.
    pub fn single(c: f64, r: f64) -> Result<Self> {
        Self::new(alloc::vec![(c, r)])
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, r)| c * exp(-r * x.abs())).sum()
    }

    /// `Σ 2|c_k|/r_k`, equal to the L¹ norm when all coefficients share a sign.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(c, r)| 2.0 * c.abs() / r).sum()
    }

    /// `∫ K dx = Σ 2c_k/r_k`.
    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|(c, r)| 2.0 * c / r).sum()
    }

    pub fn min_rate(&self) -> f64 {
        self.terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_exponential_has_unit_mass() {
        let k = ExpKernel::single(0.5, 1.0).unwrap();
        assert!((k.l1_norm() - 1.0).abs() < 1e-15);
        assert_eq!(k.eval(0.0), 0.5);
    }

    #[test]
    fn nonpositive_rate_rejected() {
        assert!(ExpKernel::single(1.0, 0.0).is_err());
        assert!(ExpKernel::single(1.0, -1.0).is_err());
    }
}
