use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::graph::Alphabet;
use crate::scalar::{root_of_unity, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Edge(usize),
    Vertex(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Edge(e) => write!(f, "edge {e}"),
            Location::Vertex(v) => write!(f, "vertex {v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Primal,
    Dual,
}

impl Domain {
    pub fn flip(self) -> Self {
        match self {
            Domain::Primal => Domain::Dual,
            Domain::Dual => Domain::Primal,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Primal => "primal",
            Domain::Dual => "dual",
        })
    }
}

/// Absolute tolerance for treating an imaginary part as round-off.
pub const IMAG_TOL: f64 = 1e-12;

/// A length-`q` table over `Z/qZ` attached to an edge or a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T> {
    values: Vec<Complex<T>>,
    location: Location,
    domain: Domain,
}

impl<T: Scalar> Factor<T> {
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

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn get(&self, a: usize) -> Complex<T> {
        self.values[a % self.values.len()]
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

    pub fn real_parts(&self) -> Vec<T> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self) -> bool {
        let tol = T::lit(IMAG_TOL);
        self.values.iter().all(|v| v.im.abs() < tol)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.is_real() && self.values.iter().all(|v| v.re >= T::zero())
    }

    /// `f(a) == f(-a)` for every `a`, the condition under which the DFT is real.
    pub fn is_reflection_symmetric(&self) -> bool {
        let q = self.len();
        let scale = self.max_abs().max(T::one());
        let tol = T::lit(IMAG_TOL) * scale;
        (1..q).all(|a| (self.values[a] - self.values[q - a]).norm() <= tol)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// Index of the first entry with zero magnitude, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.values.iter().position(|v| v.norm() == T::zero())
    }
}

fn check_len<T>(f: &Factor<T>, a: Alphabet) -> Result<()> {
    if f.values.len() != a.size() {
        return Err(Error::DimensionMismatch {
            expected: a.size(),
            got: f.values.len(),
        });
    }
    Ok(())
}

/// Unnormalized forward DFT `F(k) = sum_y f(y) w^(yk)` with `w = exp(-2 pi i / q)`.
pub fn dft<T: Scalar>(f: &Factor<T>, a: Alphabet) -> Result<Factor<T>> {
    check_len(f, a)?;
    let values = transform(&f.values, false);
    Ok(Factor {
        values,
        location: f.location,
        domain: f.domain.flip(),
    })
}

/// Inverse DFT `f(y) = (1/q) sum_k F(k) w^(-yk)`.
pub fn idft<T: Scalar>(f: &Factor<T>, a: Alphabet) -> Result<Factor<T>> {
    check_len(f, a)?;
    let values = transform(&f.values, true);
    Ok(Factor {
        values,
        location: f.location,
        domain: f.domain.flip(),
    })
}

pub(crate) fn transform<T: Scalar>(values: &[Complex<T>], inverse: bool) -> Vec<Complex<T>> {
    let q = values.len();
    let norm = if inverse {
        T::one() / T::from_usize_lossy(q)
    } else {
        T::one()
    };
    (0..q)
        .map(|k| {
            let s: Complex<T> = values
                .iter()
                .enumerate()
                .map(|(y, &v)| {
                    let idx = if inverse { (q - (y * k) % q) % q } else { y * k };
                    v * root_of_unity::<T>(idx, q)
                })
                .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + x);
            s * norm
        })
        .collect()
}

/// Forward DFT of a table whose output is known to be real; residual imaginary
/// parts below `IMAG_TOL * max(1, max|F|)` are cleared, larger ones are kept.
pub(crate) fn dft_truncating<T: Scalar>(f: &Factor<T>, a: Alphabet) -> Result<Factor<T>> {
    let mut out = dft(f, a)?;
    if f.is_reflection_symmetric() && f.is_real() {
        let tol = T::lit(IMAG_TOL) * out.max_abs().max(T::one());
        for v in &mut out.values {
            if v.im.abs() < tol {
                v.im = T::zero();
            }
        }
    }
    Ok(out)
}
