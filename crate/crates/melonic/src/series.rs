//! Truncated formal power series in an expansion variable with [`IntPoly`]
//! coefficients.
//!
//! All the closed-form families in [`crate::families`] are defined through
//! rational generating functions with denominator of degree two; expanding
//! them is a linear recurrence on the coefficient polynomials, which is what
//! [`PolySeries::rational_expand`] implements.

use thiserror::Error;

use crate::polyring::{Basis, IntPoly, PolyError};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("denominator constant term must be the constant polynomial 1")]
    DenominatorNotUnit,
    #[error("series coefficients use mixed bases")]
    MixedBases,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Coefficients for exponents `0..=order` of a series in one expansion
/// variable; every coefficient is an [`IntPoly`] in the same basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySeries {
    coeffs: Vec<IntPoly>,
}

impl PolySeries {
    pub fn new(coeffs: Vec<IntPoly>) -> Result<Self, SeriesError> {
        if coeffs.windows(2).any(|w| w[0].basis() != w[1].basis()) {
            return Err(SeriesError::MixedBases);
        }
        Ok(PolySeries { coeffs })
    }

    /// Highest retained exponent.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[IntPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &IntPoly {
        &self.coeffs[n]
    }

    /// The unique series `s` with `denominator * s == numerator` modulo
    /// `r^(order+1)`, computed by the linear recurrence the denominator
    /// induces. The denominator must have constant term 1.
    ///
    /// Numerator and denominator are given as short coefficient lists in the
    /// expansion variable (index = power of `r`). The result is verified by
    /// multiplying back against the denominator before returning.
    pub fn rational_expand(
        numerator: &[IntPoly],
        denominator: &[IntPoly],
        order: usize,
    ) -> Result<Self, SeriesError> {
        let basis = denominator.first().map(IntPoly::basis).unwrap_or(Basis::T);
        if !denominator.first().is_some_and(IntPoly::is_one) {
            return Err(SeriesError::DenominatorNotUnit);
        }
        let zero = IntPoly::zero(basis);
        let mut coeffs: Vec<IntPoly> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = numerator.get(n).cloned().unwrap_or_else(|| zero.clone());
            for k in 1..=n.min(denominator.len().saturating_sub(1)) {
                acc = acc.sub(&denominator[k].mul(&coeffs[n - k])?)?;
            }
            coeffs.push(acc);
        }
        let series = PolySeries { coeffs };
        debug_assert!(series.check_against(numerator, denominator));
        Ok(series)
    }

    /// Multiply back by the denominator and compare with the numerator
    /// modulo `r^(order+1)`.
    pub fn check_against(&self, numerator: &[IntPoly], denominator: &[IntPoly]) -> bool {
        let basis = match self.coeffs.first() {
            Some(c) => c.basis(),
            None => return true,
        };
        let zero = IntPoly::zero(basis);
        for n in 0..=self.order() {
            let mut acc = zero.clone();
            for (k, d) in denominator.iter().enumerate() {
                if k > n {
                    break;
                }
                acc = &acc + &(d * &self.coeffs[n - k]);
            }
            let expect = numerator.get(n).unwrap_or(&zero);
            if acc != *expect {
                return false;
            }
        }
        true
    }

    /// Substitute `r = T(T+1)^2 rho`: the coefficient of `rho^n` is
    /// `T^n (T+1)^(2n)` times the coefficient of `r^n`. Coefficients must be
    /// in basis `T`.
    pub fn substitute_rho(&self) -> Self {
        let t = IntPoly::variable(Basis::T);
        let tp1 = IntPoly::linear(Basis::T, 1);
        let step = &t * &(&tp1 * &tp1);
        let mut factor = IntPoly::one(Basis::T);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            debug_assert_eq!(c.basis(), Basis::T);
            coeffs.push(&factor * c);
            factor = &factor * &step;
        }
        PolySeries { coeffs }
    }

    /// Drop coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        PolySeries {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }
}
