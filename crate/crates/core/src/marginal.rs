use num_complex::Complex;

use crate::error::{Error, Result};
use crate::factor::{Domain, Location};
use crate::scalar::Scalar;

/// Marginal function at one edge or vertex. For nonnegative models it is a
/// PMF; for signed or complex models it still sums to one but entries may be
/// negative or complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal<T> {
    values: Vec<Complex<T>>,
    location: Location,
    domain: Domain,
}

impl<T: Scalar> Marginal<T> {
    pub fn new(values: Vec<Complex<T>>, location: Location, domain: Domain) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::AlphabetTooSmall(values.len()));
        }
        Ok(Self {
            values,
            location,
            domain,
        })
    }

    pub fn from_real(values: &[T], location: Location, domain: Domain) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
            location,
            domain,
        )
    }

    /// Normalizes unnormalized sums by their total.
    pub fn from_sums(sums: &[Complex<T>], location: Location, domain: Domain) -> Result<Self> {
        let total: Complex<T> = sums
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
        if total.norm() == T::zero() {
            return Err(Error::InvalidModel(format!(
                "{domain} partition function vanishes; marginal at {location} undefined"
            )));
        }
        Self::new(sums.iter().map(|&s| s / total).collect(), location, domain)
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn get(&self, a: usize) -> Complex<T> {
        self.values[a]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn location(&self) -> Location {
        self.location
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn sum(&self) -> Complex<T> {
        self.values
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b)
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_imag(&self) -> T {
        self.values
            .iter()
            .map(|v| v.im.abs())
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// Real, entries in `[-tol, 1 + tol]`, and summing to one within `tol`.
    pub fn is_pmf(&self, tol: T) -> bool {
        (self.sum() - Complex::new(T::one(), T::zero())).norm() <= tol
            && self
                .values
                .iter()
                .all(|v| v.im.abs() <= tol && v.re >= -tol && v.re <= T::one() + tol)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// Same values relabelled to another domain.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }
}
