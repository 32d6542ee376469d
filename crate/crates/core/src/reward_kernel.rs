//! Normal density and the transformable Gaussian reward function (TGRF).
//!
//! A TGRF term is a Gaussian rescaled so that its peak equals the weight `w`:
//!
//! ```text
//! tgrf(x) = w * N(x; mu, sigma) / max_x' N(x'; mu, sigma) = w * exp(-(x - mu)^2 / (2 sigma^2))
//! ```
//!
//! Because the normalizer is the density itself evaluated at the mean, any
//! positive prefactor of the density cancels. [`DensityConvention`] makes that
//! explicit so both conventions can be evaluated side by side.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Positive prefactor multiplying `exp(-(x - mu)^2 / (2 sigma^2))`.
pub trait DensityConvention {
    fn prefactor<T: Scalar>(sigma: T) -> T;
}

/// The conventional normal density prefactor `1 / (sigma * sqrt(2 pi))`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardNormal;

/// The prefactor `1 / sqrt(2 pi sigma)`, which integrates to unit mass only
/// for `sigma = 1`. Useful to demonstrate that TGRF does not depend on it.
#[derive(Clone, Copy, Debug, Default)]
pub struct SqrtSigmaPrefactor;

impl DensityConvention for StandardNormal {
    #[inline]
    fn prefactor<T: Scalar>(sigma: T) -> T {
        T::one() / (sigma * (T::lit(2.0) * T::PI()).sqrt())
    }
}

impl DensityConvention for SqrtSigmaPrefactor {
    #[inline]
    fn prefactor<T: Scalar>(sigma: T) -> T {
        T::one() / (T::lit(2.0) * T::PI() * sigma).sqrt()
    }
}

fn check_sigma<T: Scalar>(sigma: T) -> Result<()> {
    if !sigma.is_finite() || sigma <= T::zero() {
        return Err(Error::Domain(format!(
            "sigma must be finite and > 0, got {sigma}"
        )));
    }
    Ok(())
}

fn check_finite<T: Scalar>(name: &str, v: T) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

#[inline]
fn unnormalized<T: Scalar>(x: T, mu: T, sigma: T) -> T {
    let z = x - mu;
    (-(z * z) / (T::lit(2.0) * sigma * sigma)).exp()
}

/// Normal density `N(x; mu, sigma)` under the convention `D`.
pub fn density_with<D: DensityConvention, T: Scalar>(x: T, mu: T, sigma: T) -> Result<T> {
    check_finite("x", x)?;
    check_finite("mu", mu)?;
    check_sigma(sigma)?;
    Ok(D::prefactor(sigma) * unnormalized(x, mu, sigma))
}

/// Standard normal density `N(x; mu, sigma)`.
pub fn gaussian_density<T: Scalar>(x: T, mu: T, sigma: T) -> Result<T> {
    density_with::<StandardNormal, T>(x, mu, sigma)
}

/// Weight, mean and width of one transformable Gaussian reward term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TgrfParams<T> {
    weight: T,
    mean: T,
    sigma: T,
}

impl<T: Scalar> TgrfParams<T> {
    pub fn new(weight: T, mean: T, sigma: T) -> Result<Self> {
        check_finite("weight", weight)?;
        check_finite("mean", mean)?;
        check_sigma(sigma)?;
        Ok(Self {
            weight,
            mean,
            sigma,
        })
    }

    /// Skips validation; callers guarantee `sigma > 0`.
    pub(crate) fn new_unchecked(weight: T, mean: T, sigma: T) -> Self {
        Self {
            weight,
            mean,
            sigma,
        }
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Same shape with a different weight.
    pub fn with_weight(self, weight: T) -> Result<Self> {
        Self::new(weight, self.mean, self.sigma)
    }

    /// `C_norm` under convention `D`: the density's maximum, attained at the mean.
    pub fn c_norm_with<D: DensityConvention>(&self) -> T {
        D::prefactor(self.sigma)
    }

    pub fn c_norm(&self) -> T {
        self.c_norm_with::<StandardNormal>()
    }

    /// Evaluates `w * N(x) / C_norm` with both density factors taken from `D`.
    pub fn eval_with<D: DensityConvention>(&self, x: T) -> Result<T> {
        let density = density_with::<D, T>(x, self.mean, self.sigma)?;
        Ok(self.weight * density / self.c_norm_with::<D>())
    }

    /// Infallible evaluation for the hot path; a non-finite `x` propagates as NaN.
    #[inline]
    pub fn value(&self, x: T) -> T {
        self.weight * unnormalized(x, self.mean, self.sigma)
    }
}

/// Transformable Gaussian reward `w * N(x; mu, sigma) / C_norm`.
pub fn tgrf<T: Scalar>(params: &TgrfParams<T>, x: T) -> Result<T> {
    params.eval_with::<StandardNormal>(x)
}
