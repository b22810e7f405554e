//! Local maps between primal and dual marginals at a single edge or vertex,
//! and the quantities derived from them.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::factor::{transform, Domain, Factor, Location};
use crate::marginal::Marginal;
use crate::model::{DualNfg, PrimalNfg};
use crate::scalar::Scalar;

/// Entries with `|f(a)| <= SINGULAR_TOL * max|f|` are treated as zeros.
pub const SINGULAR_TOL: f64 = 1e-12;

fn check_singular<T: Scalar>(f: &Factor<T>) -> Result<()> {
    let tol = T::lit(SINGULAR_TOL) * f.max_abs();
    match f.values().iter().position(|v| v.norm() <= tol) {
        Some(index) => Err(Error::SingularMap {
            location: f.location(),
            index,
        }),
        None => Ok(()),
    }
}

fn check_inputs<T: Scalar>(
    mv: &Marginal<T>,
    expected: Domain,
    psi: &Factor<T>,
    psi_dual: &Factor<T>,
) -> Result<()> {
    if mv.domain() != expected {
        return Err(Error::DomainMismatch(format!(
            "expected a {expected} marginal, got {}",
            mv.domain()
        )));
    }
    if psi.domain() != Domain::Primal || psi_dual.domain() != Domain::Dual {
        return Err(Error::DomainMismatch(
            "factors must be given as (primal, dual)".into(),
        ));
    }
    for f in [psi, psi_dual] {
        if f.location() != mv.location() {
            return Err(Error::LocationMismatch {
                marginal: mv.location(),
                factor: f.location(),
            });
        }
        if f.len() != mv.len() {
            return Err(Error::DimensionMismatch {
                expected: mv.len(),
                got: f.len(),
            });
        }
    }
    Ok(())
}

/// `pi_p(a) = psi(a) * sum_k (pi_d(k) / psi~(k)) w^(ak)`, with `w = exp(-2 pi i / q)`.
/// Works unchanged at vertices with `(phi, phi~)` in place of `(psi, psi~)`.
pub fn map_dual_to_primal<T: Scalar>(
    mv: &Marginal<T>,
    psi: &Factor<T>,
    psi_dual: &Factor<T>,
) -> Result<Marginal<T>> {
    check_inputs(mv, Domain::Dual, psi, psi_dual)?;
    check_singular(psi_dual)?;
    let ratio: Vec<Complex<T>> = mv
        .values()
        .iter()
        .zip(psi_dual.values())
        .map(|(p, f)| p / f)
        .collect();
    let values = transform(&ratio, false)
        .into_iter()
        .zip(psi.values())
        .map(|(r, f)| r * f)
        .collect();
    Marginal::new(values, mv.location(), Domain::Primal)
}

/// `pi_d(k) = psi~(k) * (1/q) sum_a (pi_p(a) / psi(a)) w^(-ak)`.
pub fn map_primal_to_dual<T: Scalar>(
    mv: &Marginal<T>,
    psi: &Factor<T>,
    psi_dual: &Factor<T>,
) -> Result<Marginal<T>> {
    check_inputs(mv, Domain::Primal, psi, psi_dual)?;
    check_singular(psi)?;
    let ratio: Vec<Complex<T>> = mv
        .values()
        .iter()
        .zip(psi.values())
        .map(|(p, f)| p / f)
        .collect();
    let values = transform(&ratio, true)
        .into_iter()
        .zip(psi_dual.values())
        .map(|(r, f)| r * f)
        .collect();
    Marginal::new(values, mv.location(), Domain::Dual)
}

/// Maps a dual marginal using the factors of `p` and `d` at its location.
pub fn map_model_dual_to_primal<T: Scalar>(
    p: &PrimalNfg<T>,
    d: &DualNfg<T>,
    mv: &Marginal<T>,
) -> Result<Marginal<T>> {
    let loc = mv.location();
    map_dual_to_primal(mv, p.factor(loc), d.factor(loc))
}

/// Maps a primal marginal using the factors of `p` and `d` at its location.
pub fn map_model_primal_to_dual<T: Scalar>(
    p: &PrimalNfg<T>,
    d: &DualNfg<T>,
    mv: &Marginal<T>,
) -> Result<Marginal<T>> {
    let loc = mv.location();
    map_primal_to_dual(mv, p.factor(loc), d.factor(loc))
}

/// The vector left unchanged by the dual-to-primal map,
/// `pi*(a) = psi(a) psi~(a) / sum_b psi(b) psi~(b)`.
pub fn fixed_point<T: Scalar>(psi: &Factor<T>, psi_dual: &Factor<T>) -> Result<Marginal<T>> {
    if psi.len() != psi_dual.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            got: psi_dual.len(),
        });
    }
    let prod: Vec<Complex<T>> = psi
        .values()
        .iter()
        .zip(psi_dual.values())
        .map(|(a, b)| a * b)
        .collect();
    Marginal::from_sums(&prod, psi.location(), Domain::Primal)
}

/// Critical couplings of the two-dimensional homogeneous models.
#[derive(Debug, Clone, Copy)]
pub struct CriticalityConstants;

impl CriticalityConstants {
    /// `ln(1 + sqrt 2) / 2`.
    pub fn ising<T: Scalar>() -> T {
        (T::one() + T::SQRT_2()).ln() / T::lit(2.0)
    }

    /// `ln(1 + sqrt q)`.
    pub fn potts<T: Scalar>(q: usize) -> T {
        (T::one() + T::from_usize_lossy(q).sqrt()).ln()
    }

    /// `ln(1 + sqrt 2)` for the four-state clock model.
    pub fn clock4<T: Scalar>() -> T {
        (T::one() + T::SQRT_2()).ln()
    }
}

/// Lower bounds `(pi_p,e(0), pi_d,e(0))` for a ferromagnetic Ising edge:
/// `1 / (1 + e^-2J)` and `(1 + e^-2J) / 2`.
pub fn ising_lower_bounds<T: Scalar>(coupling: T) -> (T, T) {
    let x = (-T::lit(2.0) * coupling).exp();
    (T::one() / (T::one() + x), (T::one() + x) / T::lit(2.0))
}

/// Lower bounds for a ferromagnetic Potts edge:
/// `e^J / (e^J - 1 + q)` and `(e^J - 1 + q) / (q e^J)`.
pub fn potts_lower_bounds<T: Scalar>(q: usize, coupling: T) -> (T, T) {
    let e = coupling.exp();
    let q = T::from_usize_lossy(q);
    let a = e - T::one() + q;
    (e / a, a / (q * e))
}

/// Binary edge marginals expressed through the magnetizations
/// `Delta = pi(0) - pi(1)` in both domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnetizations<T> {
    pub delta_p: T,
    pub delta_d: T,
    pub primal: [T; 2],
    pub dual: [T; 2],
}

fn magnetizations<T: Scalar>(delta_p: T, delta_d: T) -> Magnetizations<T> {
    let h = T::lit(0.5);
    Magnetizations {
        delta_p,
        delta_d,
        primal: [h * (T::one() + delta_p), h * (T::one() - delta_p)],
        dual: [h * (T::one() + delta_d), h * (T::one() - delta_d)],
    }
}

/// `Delta_p = (cosh 2J - Delta_d) / sinh 2J` for an Ising edge with `J != 0`.
pub fn magnetization_from_dual<T: Scalar>(delta_d: T, coupling: T) -> Result<Magnetizations<T>> {
    let s = (T::lit(2.0) * coupling).sinh();
    if s == T::zero() {
        return Err(Error::SingularMap {
            location: Location::Edge(0),
            index: 1,
        });
    }
    let delta_p = ((T::lit(2.0) * coupling).cosh() - delta_d) / s;
    Ok(magnetizations(delta_p, delta_d))
}

/// `Delta_d = cosh 2J - Delta_p sinh 2J`.
pub fn magnetization_from_primal<T: Scalar>(delta_p: T, coupling: T) -> Magnetizations<T> {
    let two_j = T::lit(2.0) * coupling;
    let delta_d = two_j.cosh() - delta_p * two_j.sinh();
    magnetizations(delta_p, delta_d)
}
