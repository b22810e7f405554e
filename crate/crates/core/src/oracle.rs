//! Exhaustive enumeration in both domains and closed-form chain/ring results.

use std::ops::{Add, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factor::{dft, Domain, Factor, Location};
use crate::graph::{scale_factor, Alphabet};
use crate::marginal::Marginal;
use crate::model::{DomainTag, DualNfg, Nfg, PrimalNfg};
use crate::scalar::{root_of_unity, Scalar};

/// Default cap on the number of enumerated configurations.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "NFG_DUAL_BUDGET";

const CHUNK: u64 = 1 << 14;

/// Enumeration settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub budget: u64,
}

impl Default for Oracle {
    /// Reads the budget from `NFG_DUAL_BUDGET`, falling back to `2^26`.
    fn default() -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Self { budget }
    }
}

/// Unnormalized sums from one enumeration pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSums<T> {
    pub domain: Domain,
    /// Partition function.
    pub z: Complex<T>,
    /// `edge[e][a]`: total weight of configurations with edge variable `a` at `e`.
    pub edge: Vec<Vec<Complex<T>>>,
    /// `vertex[v][a]`: total weight with vertex variable `a` at `v`.
    pub vertex: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> ExactSums<T> {
    pub fn edge_marginal(&self, e: usize) -> Result<Marginal<T>> {
        Marginal::from_sums(&self.edge[e], Location::Edge(e), self.domain)
    }

    pub fn vertex_marginal(&self, v: usize) -> Result<Marginal<T>> {
        Marginal::from_sums(&self.vertex[v], Location::Vertex(v), self.domain)
    }

    pub fn marginal(&self, loc: Location) -> Result<Marginal<T>> {
        match loc {
            Location::Edge(e) => self.edge_marginal(e),
            Location::Vertex(v) => self.vertex_marginal(v),
        }
    }

    pub fn edge_marginals(&self) -> Result<Vec<Marginal<T>>> {
        (0..self.edge.len()).map(|e| self.edge_marginal(e)).collect()
    }

    pub fn vertex_marginals(&self) -> Result<Vec<Marginal<T>>> {
        (0..self.vertex.len()).map(|v| self.vertex_marginal(v)).collect()
    }
}

trait Weight<T>:
    Copy + Send + Sync + Zero + One + Add<Output = Self> + Mul<Output = Self>
{
    fn to_complex(self) -> Complex<T>;
}

impl<T: Scalar> Weight<T> for T {
    fn to_complex(self) -> Complex<T> {
        Complex::new(self, T::zero())
    }
}

impl<T: Scalar> Weight<T> for Complex<T> {
    fn to_complex(self) -> Complex<T> {
        self
    }
}

struct Partial<W> {
    z: W,
    edge: Vec<W>,
    vertex: Vec<W>,
}

impl<W: Copy + Zero + Add<Output = W>> Partial<W> {
    fn zeros(ne: usize, nv: usize, q: usize) -> Self {
        Self {
            z: W::zero(),
            edge: vec![W::zero(); ne * q],
            vertex: vec![W::zero(); nv * q],
        }
    }

    fn absorb(&mut self, other: &Self) {
        self.z = self.z + other.z;
        for (a, &b) in self.edge.iter_mut().zip(&other.edge) {
            *a = *a + b;
        }
        for (a, &b) in self.vertex.iter_mut().zip(&other.vertex) {
            *a = *a + b;
        }
    }
}

/// Which variables are free and how the other labels follow from them.
#[derive(Clone, Copy)]
enum Space<'a> {
    /// Free vertex variables `x`, edge labels `y = M x`.
    Primal(&'a [(usize, usize)]),
    /// Free edge variables `y~`, vertex labels `x~ = M^T y~`.
    Dual(&'a [(usize, usize)]),
}

fn state_count(q: usize, n: usize) -> Option<u128> {
    (q as u128).checked_pow(u32::try_from(n).ok()?)
}

fn check_budget(q: usize, n: usize, budget: u64) -> Result<u64> {
    let states = state_count(q, n).unwrap_or(u128::MAX);
    if states > budget as u128 {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(states as u64)
}

fn enumerate<T: Scalar, W: Weight<T>>(
    space: Space<'_>,
    q: usize,
    edge_tables: &[Vec<W>],
    vertex_tables: &[Vec<W>],
    total: u64,
) -> (W, Vec<W>, Vec<W>) {
    let ne = edge_tables.len();
    let nv = vertex_tables.len();
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<Partial<W>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = Partial::zeros(ne, nv, q);
            let (mut el, mut vl) = (vec![0usize; ne], vec![0usize; nv]);
            let free = match space {
                Space::Primal(_) => nv,
                Space::Dual(_) => ne,
            };
            let mut digits = vec![0usize; free];
            let mut rem = start;
            for d in digits.iter_mut() {
                *d = (rem % q as u64) as usize;
                rem /= q as u64;
            }
            for _ in start..end {
                fill_labels(space, q, &digits, &mut el, &mut vl);
                let mut w = W::one();
                for (e, &a) in el.iter().enumerate() {
                    w = w * edge_tables[e][a];
                }
                for (v, &a) in vl.iter().enumerate() {
                    w = w * vertex_tables[v][a];
                }
                acc.z = acc.z + w;
                for (e, &a) in el.iter().enumerate() {
                    let s = &mut acc.edge[e * q + a];
                    *s = *s + w;
                }
                for (v, &a) in vl.iter().enumerate() {
                    let s = &mut acc.vertex[v * q + a];
                    *s = *s + w;
                }
                for d in digits.iter_mut() {
                    *d += 1;
                    if *d < q {
                        break;
                    }
                    *d = 0;
                }
            }
            acc
        })
        .collect();
    let mut total_acc = Partial::zeros(ne, nv, q);
    for p in &partials {
        total_acc.absorb(p);
    }
    (total_acc.z, total_acc.edge, total_acc.vertex)
}

fn fill_labels(space: Space<'_>, q: usize, digits: &[usize], el: &mut [usize], vl: &mut [usize]) {
    match space {
        Space::Primal(edges) => {
            vl.copy_from_slice(digits);
            for (y, &(t, h)) in el.iter_mut().zip(edges) {
                *y = (digits[t] + q - digits[h]) % q;
            }
        }
        Space::Dual(edges) => {
            el.copy_from_slice(digits);
            vl.iter_mut().for_each(|x| *x = 0);
            for (&ye, &(t, h)) in digits.iter().zip(edges) {
                vl[t] += ye;
                vl[h] += q - ye;
            }
            vl.iter_mut().for_each(|x| *x %= q);
        }
    }
}

fn run<T: Scalar, D: DomainTag>(model: &Nfg<T, D>, space: Space<'_>, free: usize, oracle: Oracle) -> Result<ExactSums<T>> {
    let q = model.q();
    let total = check_budget(q, free, oracle.budget)?;
    let ne = model.graph().num_edges();
    let nv = model.graph().num_vertices();
    let (z, edge, vertex) = if model.is_real() {
        let tab = |f: &Factor<T>| f.real_parts();
        let et: Vec<Vec<T>> = model.edge_factors().iter().map(tab).collect();
        let vt: Vec<Vec<T>> = model.vertex_factors().iter().map(tab).collect();
        let (z, e, v) = enumerate::<T, T>(space, q, &et, &vt, total);
        let c = |xs: Vec<T>| xs.into_iter().map(|x| x.to_complex()).collect::<Vec<_>>();
        (z.to_complex(), c(e), c(v))
    } else {
        let tab = |f: &Factor<T>| f.values().to_vec();
        let et: Vec<Vec<Complex<T>>> = model.edge_factors().iter().map(tab).collect();
        let vt: Vec<Vec<Complex<T>>> = model.vertex_factors().iter().map(tab).collect();
        enumerate::<T, Complex<T>>(space, q, &et, &vt, total)
    };
    let split = |flat: Vec<Complex<T>>, n: usize| -> Vec<Vec<Complex<T>>> {
        (0..n).map(|i| flat[i * q..(i + 1) * q].to_vec()).collect()
    };
    Ok(ExactSums {
        domain: D::DOMAIN,
        z,
        edge: split(edge, ne),
        vertex: split(vertex, nv),
    })
}

impl Oracle {
    pub fn with_budget(budget: u64) -> Self {
        Self { budget }
    }

    pub fn exact_primal<T: Scalar>(&self, p: &PrimalNfg<T>) -> Result<ExactSums<T>> {
        run(p, Space::Primal(p.graph().edges()), p.graph().num_vertices(), *self)
    }

    pub fn exact_dual<T: Scalar>(&self, d: &DualNfg<T>) -> Result<ExactSums<T>> {
        run(d, Space::Dual(d.graph().edges()), d.graph().num_edges(), *self)
    }
}

pub fn exact_primal<T: Scalar>(p: &PrimalNfg<T>) -> Result<ExactSums<T>> {
    Oracle::default().exact_primal(p)
}

pub fn exact_dual<T: Scalar>(d: &DualNfg<T>) -> Result<ExactSums<T>> {
    Oracle::default().exact_dual(d)
}

pub fn partition_primal<T: Scalar>(p: &PrimalNfg<T>) -> Result<Complex<T>> {
    Ok(exact_primal(p)?.z)
}

pub fn partition_dual<T: Scalar>(d: &DualNfg<T>) -> Result<Complex<T>> {
    Ok(exact_dual(d)?.z)
}

pub fn edge_marginals_primal<T: Scalar>(p: &PrimalNfg<T>, e: usize) -> Result<Marginal<T>> {
    exact_primal(p)?.edge_marginal(e)
}

pub fn vertex_marginals_primal<T: Scalar>(p: &PrimalNfg<T>, v: usize) -> Result<Marginal<T>> {
    exact_primal(p)?.vertex_marginal(v)
}

pub fn edge_marginals_dual<T: Scalar>(d: &DualNfg<T>, e: usize) -> Result<Marginal<T>> {
    exact_dual(d)?.edge_marginal(e)
}

pub fn vertex_marginals_dual<T: Scalar>(d: &DualNfg<T>, v: usize) -> Result<Marginal<T>> {
    exact_dual(d)?.vertex_marginal(v)
}

/// Ratio `Z_d / Z_p` for a dual obtained by [`crate::model::dualize`]:
/// `q^|E|` when every factor is reflection symmetric.
pub fn duality_scale<T: Scalar>(p: &PrimalNfg<T>) -> Result<T> {
    let ne = i32::try_from(p.graph().num_edges()).map_err(|_| Error::Overflow("duality scale"))?;
    Ok(T::from_usize_lossy(p.q()).powi(ne))
}

/// `|Z_d / alpha - Z_p| / |Z_p|` with `alpha` from [`duality_scale`].
pub fn duality_check<T: Scalar>(p: &PrimalNfg<T>) -> Result<T> {
    duality_check_with(p, duality_scale(p)?, Oracle::default())
}

/// `|Z_d / alpha - Z_p| / |Z_p|` for a caller-supplied `alpha`. Dividing by
/// `alpha` first keeps the residual at rounding level however large `alpha` is.
pub fn duality_check_with<T: Scalar>(p: &PrimalNfg<T>, alpha: T, oracle: Oracle) -> Result<T> {
    let zp = oracle.exact_primal(p)?.z;
    let zd = oracle.exact_dual(&crate::model::dualize(p))?.z;
    Ok((zd / alpha - zp).norm() / zp.norm())
}

/// `q^betti(G)` as a scalar, from [`scale_factor`].
pub fn betti_scale<T: Scalar>(p: &PrimalNfg<T>) -> Result<T> {
    let s = scale_factor(p.graph(), p.alphabet())?;
    T::from_u128(s).ok_or(Error::Overflow("scale factor"))
}

/// `S_e(a)`: the primal sum with `psi_e` struck out and `y_e = a` held fixed.
pub fn extrinsic_sums<T: Scalar>(p: &PrimalNfg<T>, e: usize, oracle: Oracle) -> Result<Vec<Complex<T>>> {
    let struck = crate::model::with_edge_table(
        p,
        e,
        vec![Complex::new(T::one(), T::zero()); p.q()],
    )?;
    Ok(oracle.exact_primal(&struck)?.edge[e].clone())
}

/// Dual partition function of the intermediate model in which `psi~_e` is
/// replaced by the DFT of the indicator `delta(y - a)`.
pub fn intermediate_dual_partition<T: Scalar>(
    p: &PrimalNfg<T>,
    e: usize,
    a: usize,
    oracle: Oracle,
) -> Result<Complex<T>> {
    let q = p.q();
    let mut d = crate::model::dualize(p);
    let mut indicator = vec![Complex::new(T::zero(), T::zero()); q];
    indicator[a % q] = Complex::new(T::one(), T::zero());
    let delta = Factor::new(indicator, Location::Edge(e), Domain::Primal)?;
    let replaced = dft(&delta, Alphabet::new(q)?)?;
    d = replace_dual_edge(d, e, replaced)?;
    Ok(oracle.exact_dual(&d)?.z)
}

fn replace_dual_edge<T: Scalar>(d: DualNfg<T>, e: usize, f: Factor<T>) -> Result<DualNfg<T>> {
    let mut edges = d.edge_factors().to_vec();
    edges[e] = f;
    DualNfg::new(
        d.graph().clone(),
        d.alphabet(),
        edges,
        d.vertex_factors().to_vec(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Free,
    Periodic,
}

/// Closed-form zero-field Ising marginals on a chain or ring.
#[derive(Debug, Clone)]
pub struct ChainMarginals<T> {
    pub edge_primal: Vec<Marginal<T>>,
    pub edge_dual: Vec<Marginal<T>>,
    pub vertex_primal: Vec<Marginal<T>>,
}

/// Maximum number of edges for products with sign changes.
pub const SIGNED_PRODUCT_CAP: usize = 64;

/// `prod tanh(J_e)` over all edges, and over all edges but `e` for each `e`.
fn tanh_products<T: Scalar>(couplings: &[T]) -> Result<(T, Vec<T>)> {
    let t: Vec<T> = couplings.iter().map(|j| j.tanh()).collect();
    let n = t.len();
    if t.iter().all(|&x| x > T::zero()) {
        let logs: Vec<T> = t.iter().map(|x| x.ln()).collect();
        let total: T = logs.iter().copied().sum();
        let excl = logs.iter().map(|&l| (total - l).exp()).collect();
        return Ok((total.exp(), excl));
    }
    if n > SIGNED_PRODUCT_CAP {
        return Err(Error::OutOfRange(format!(
            "signed closed form limited to {SIGNED_PRODUCT_CAP} edges, got {n}"
        )));
    }
    let all = t.iter().fold(T::one(), |a, &b| a * b);
    let excl = (0..n)
        .map(|e| {
            t.iter()
                .enumerate()
                .filter(|&(i, _)| i != e)
                .fold(T::one(), |a, (_, &b)| a * b)
        })
        .collect();
    Ok((all, excl))
}

/// Zero-field Ising marginals from the closed forms. A free chain with `n`
/// couplings has `n + 1` vertices; a periodic ring has `n >= 3` vertices.
pub fn chain_ising_marginals<T: Scalar>(boundary: Boundary, couplings: &[T]) -> Result<ChainMarginals<T>> {
    let n = couplings.len();
    if n == 0 || (boundary == Boundary::Periodic && n < 3) {
        return Err(Error::InvalidGraph(format!(
            "{boundary:?} chain with {n} edges is not supported"
        )));
    }
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let nv = if boundary == Boundary::Free { n + 1 } else { n };
    let vertex_primal = (0..nv)
        .map(|v| Marginal::from_real(&[half, half], Location::Vertex(v), Domain::Primal))
        .collect::<Result<Vec<_>>>()?;
    let mut edge_primal = Vec::with_capacity(n);
    let mut edge_dual = Vec::with_capacity(n);
    match boundary {
        Boundary::Free => {
            for (e, &j) in couplings.iter().enumerate() {
                let c = two * j.cosh();
                let loc = Location::Edge(e);
                edge_primal.push(Marginal::from_real(
                    &[j.exp() / c, (-j).exp() / c],
                    loc,
                    Domain::Primal,
                )?);
                edge_dual.push(Marginal::from_real(&[T::one(), T::zero()], loc, Domain::Dual)?);
            }
        }
        Boundary::Periodic => {
            let (p, excl) = tanh_products(couplings)?;
            let denom = T::one() + p;
            for (e, &j) in couplings.iter().enumerate() {
                let c = two * j.cosh();
                let loc = Location::Edge(e);
                let pe = excl[e];
                edge_primal.push(Marginal::from_real(
                    &[
                        j.exp() / c * (T::one() + pe) / denom,
                        (-j).exp() / c * (T::one() - pe) / denom,
                    ],
                    loc,
                    Domain::Primal,
                )?);
                edge_dual.push(Marginal::from_real(
                    &[T::one() / denom, p / denom],
                    loc,
                    Domain::Dual,
                )?);
            }
        }
    }
    Ok(ChainMarginals {
        edge_primal,
        edge_dual,
        vertex_primal,
    })
}

/// Closed-form edge marginals `(primal, dual)` of the homogeneous zero-field
/// `q`-state Potts ring with `num_edges` edges.
pub fn ring_potts_marginals<T: Scalar>(q: usize, coupling: T, num_edges: usize) -> Result<(Marginal<T>, Marginal<T>)> {
    Alphabet::new(q)?;
    if num_edges < 3 {
        return Err(Error::InvalidGraph(format!(
            "ring needs at least 3 edges, got {num_edges}"
        )));
    }
    let n = i32::try_from(num_edges).map_err(|_| Error::Overflow("ring length"))?;
    let qm1 = T::from_usize_lossy(q - 1);
    let ej = coupling.exp();
    let a = ej + qm1;
    let r = (ej - T::one()) / a;
    // Ratios to A^n keep every term bounded since |B| < A.
    let d = T::one() + qm1 * r.powi(n);
    let rn1 = r.powi(n - 1);
    let mut dual = vec![r.powi(n) / d; q];
    dual[0] = T::one() / d;
    let mut primal = vec![(T::one() - rn1) / (a * d); q];
    primal[0] = ej * (T::one() + qm1 * rn1) / (a * d);
    let loc = Location::Edge(0);
    Ok((
        Marginal::from_real(&primal, loc, Domain::Primal)?,
        Marginal::from_real(&dual, loc, Domain::Dual)?,
    ))
}

/// `exp(-2 pi i a k / q)` summed against `table`, exposed for tests of the map.
pub fn dft_eval<T: Scalar>(table: &[Complex<T>], k: usize) -> Complex<T> {
    let q = table.len();
    table
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (y, &v)| {
            acc + v * root_of_unity::<T>(y * k, q)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::{dualize, ising_model, potts_model};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_edge_partition() {
        let j = 0.8f64;
        let p = ising_model(Graph::path(2).unwrap(), &[j], &[0.0, 0.0]).unwrap();
        let z = partition_primal(&p).unwrap();
        assert_abs_diff_eq!(z.re, 2.0 * j.exp() + 2.0 * (-j).exp(), epsilon = 1e-13);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn zero_coupling_partition_counts_states() {
        let g = Graph::grid(2, 3, false).unwrap();
        let p = potts_model(g.clone(), 3, &vec![0.0; g.num_edges()], &[0.0; 6]).unwrap();
        assert_abs_diff_eq!(partition_primal(&p).unwrap().re, 729.0, epsilon = 1e-9);
        let m = vertex_marginals_primal(&p, 4).unwrap();
        for v in m.values() {
            assert_abs_diff_eq!(v.re, 1.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn ring_dual_partition_two_terms() {
        let js = [0.3f64, 0.5, 0.9, 1.1];
        let p = ising_model(Graph::ring(4).unwrap(), &js, &[0.0; 4]).unwrap();
        let zd = partition_dual(&dualize(&p)).unwrap();
        let c: f64 = js.iter().map(|j| j.cosh()).product();
        let s: f64 = js.iter().map(|j| j.sinh()).product();
        // 2^|V| from the field-free vertex factors [2, 0].
        let expected = 16.0 * 16.0 * (c + s);
        assert_abs_diff_eq!(zd.re / expected, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn duality_with_vertex_factors() {
        let g = Graph::grid(2, 3, false).unwrap();
        let js: Vec<f64> = (0..g.num_edges()).map(|i| 0.1 + 0.13 * i as f64).collect();
        let p = potts_model(g, 3, &js, &[0.2, 0.0, 0.1, 0.0, 0.3, 0.0]).unwrap();
        assert!(duality_check(&p).unwrap() < 1e-12);
        let tri = ising_model(Graph::ring(3).unwrap(), &[0.5; 3], &[0.0; 3]).unwrap();
        assert!(duality_check(&tri).unwrap() < 1e-12);
        let wrong = duality_check_with(&tri, betti_scale(&tri).unwrap(), Oracle::default()).unwrap();
        assert!(wrong > 0.5);
    }

    #[test]
    fn budget_is_enforced() {
        let g = Graph::grid(3, 3, true).unwrap();
        let p = ising_model(g.clone(), &vec![0.1; 18], &[0.0; 9]).unwrap();
        assert!(Oracle::with_budget(512).exact_primal(&p).is_ok());
        assert!(matches!(
            Oracle::with_budget(100).exact_primal(&p),
            Err(Error::BudgetExceeded { states: 512, budget: 100 })
        ));
        assert!(matches!(
            Oracle::with_budget(1 << 17).exact_dual(&dualize(&p)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sum_product_rule_and_intermediate_model() {
        let p = potts_model(Graph::ring(4).unwrap(), 3, &[0.4, 0.7, 0.2, 0.9], &[0.1, 0.0, 0.0, 0.2])
            .unwrap();
        let o = Oracle::default();
        let z = o.exact_primal(&p).unwrap().z;
        let alpha = duality_scale(&p).unwrap();
        for e in 0..4 {
            let s = extrinsic_sums(&p, e, o).unwrap();
            let recon = s
                .iter()
                .zip(p.edge_factor(e).values())
                .fold(Complex::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
            assert!((recon - z).norm() / z.norm() < 1e-12);
            for a in 0..3 {
                let zi = intermediate_dual_partition(&p, e, a, o).unwrap();
                assert!((zi - s[a] * alpha).norm() / (s[a] * alpha).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn free_chain_closed_form() {
        let js = [0.2f64, 0.9, 1.4];
        let cm = chain_ising_marginals(Boundary::Free, &js).unwrap();
        let p = ising_model(Graph::path(4).unwrap(), &js, &[0.0; 4]).unwrap();
        let ex = exact_primal(&p).unwrap();
        let exd = exact_dual(&dualize(&p)).unwrap();
        for e in 0..3 {
            assert!(cm.edge_primal[e].max_abs_diff(&ex.edge_marginal(e).unwrap()) < 1e-12);
            assert!(cm.edge_dual[e].max_abs_diff(&exd.edge_marginal(e).unwrap()) < 1e-12);
        }
        for v in 0..4 {
            assert!(cm.vertex_primal[v].max_abs_diff(&ex.vertex_marginal(v).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn ring_closed_forms() {
        let js = [0.3f64, -0.4, 1.2, 0.8, 0.5];
        let cm = chain_ising_marginals(Boundary::Periodic, &js).unwrap();
        let p = ising_model(Graph::ring(5).unwrap(), &js, &[0.0; 5]).unwrap();
        let ex = exact_primal(&p).unwrap();
        let exd = exact_dual(&dualize(&p)).unwrap();
        for e in 0..5 {
            assert!(cm.edge_primal[e].max_abs_diff(&ex.edge_marginal(e).unwrap()) < 1e-12);
            assert!(cm.edge_dual[e].max_abs_diff(&exd.edge_marginal(e).unwrap()) < 1e-12);
        }

        let (pp, pd) = ring_potts_marginals(3, 0.7f64, 4).unwrap();
        let pm = potts_model(Graph::ring(4).unwrap(), 3, &[0.7; 4], &[0.0; 4]).unwrap();
        let exp = exact_primal(&pm).unwrap().edge_marginal(2).unwrap();
        let exd = exact_dual(&dualize(&pm)).unwrap().edge_marginal(2).unwrap();
        assert!(pp.max_abs_diff(&exp) < 1e-12);
        assert!(pd.max_abs_diff(&exd) < 1e-12);
    }

    #[test]
    fn ring_potts_q2_matches_ising_ring() {
        // Potts with coupling 2J is Ising with coupling J up to a constant.
        let j = 0.45f64;
        let (pp, pd) = ring_potts_marginals(2, 2.0 * j, 6).unwrap();
        let cm = chain_ising_marginals(Boundary::Periodic, &[j; 6]).unwrap();
        assert!(pp.max_abs_diff(&cm.edge_primal[0]) < 1e-14);
        assert!(pd.max_abs_diff(&cm.edge_dual[0]) < 1e-14);
    }

    #[test]
    fn long_ring_does_not_underflow() {
        let cm = chain_ising_marginals(Boundary::Periodic, &vec![0.05f64; 5000]).unwrap();
        assert!(cm.edge_dual[0].is_pmf(1e-12));
        assert!(chain_ising_marginals(Boundary::Periodic, &vec![-0.05f64; 65]).is_err());
    }

    #[test]
    fn enumeration_is_deterministic() {
        let g = Graph::grid(3, 3, true).unwrap();
        let js: Vec<f64> = (0..18).map(|i| 0.05 * i as f64).collect();
        let p = ising_model(g, &js, &[0.1; 9]).unwrap();
        let a = exact_dual(&dualize(&p)).unwrap();
        let b = exact_dual(&dualize(&p)).unwrap();
        assert_eq!(a, b);
    }
}
