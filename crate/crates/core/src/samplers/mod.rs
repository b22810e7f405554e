//! Markov chain Monte Carlo estimators of primal and dual marginals.
//!
//! Every chain owns a `ChaCha8Rng` seeded with `seed_from_u64`, so estimates
//! are bit-identical for a given model and configuration.

mod gibbs;
mod swp;

pub use gibbs::{gibbs_dual, gibbs_primal};
pub use swp::{swp, swp_weight, SubgraphState, SwpChain};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bp::{run_bp, BpConfig};
use crate::error::{Error, Result};
use crate::factor::{Domain, Location};
use crate::mapping::{map_dual_to_primal, SINGULAR_TOL};
use crate::marginal::Marginal;
use crate::model::{dualize, PrimalNfg};
use crate::scalar::Scalar;

/// Name of the generator behind every sampler.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan {
    /// Ascending index order.
    Systematic,
    /// Uniformly random site per update, `n` updates per sweep.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Sweeps discarded before recording; `None` means ten per sampled variable.
    pub burn_in: Option<usize>,
    /// Number of recorded samples.
    pub samples: usize,
    /// Sweeps between recorded samples.
    pub thinning: usize,
    pub scan: Scan,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            burn_in: None,
            samples: 10_000,
            thinning: 1,
            scan: Scan::Systematic,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::OutOfRange("samples must be at least 1".into()));
        }
        if self.thinning == 0 {
            return Err(Error::OutOfRange("thinning must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn burn_in_for(&self, variables: usize) -> usize {
        self.burn_in.unwrap_or(10 * variables)
    }
}

/// Empirical marginals from one chain.
#[derive(Debug, Clone)]
pub struct Estimates<T> {
    pub domain: Domain,
    pub edge: Vec<Marginal<T>>,
    pub vertex: Vec<Marginal<T>>,
    pub samples: usize,
}

impl<T: Scalar> Estimates<T> {
    pub fn marginal(&self, loc: Location) -> &Marginal<T> {
        match loc {
            Location::Edge(e) => &self.edge[e],
            Location::Vertex(v) => &self.vertex[v],
        }
    }
}

/// Frequency tables `counts[i][a]` for edges and vertices.
pub(crate) struct Counts {
    q: usize,
    edge: Vec<u64>,
    vertex: Vec<u64>,
    samples: usize,
}

impl Counts {
    pub(crate) fn new(q: usize, ne: usize, nv: usize) -> Self {
        Self {
            q,
            edge: vec![0; ne * q],
            vertex: vec![0; nv * q],
            samples: 0,
        }
    }

    pub(crate) fn record(&mut self, edge_labels: &[usize], vertex_labels: &[usize]) {
        for (e, &a) in edge_labels.iter().enumerate() {
            self.edge[e * self.q + a] += 1;
        }
        for (v, &a) in vertex_labels.iter().enumerate() {
            self.vertex[v * self.q + a] += 1;
        }
        self.samples += 1;
    }

    pub(crate) fn into_estimates<T: Scalar>(self, domain: Domain) -> Result<Estimates<T>> {
        let q = self.q;
        let n = T::from_usize_lossy(self.samples);
        let build = |flat: &[u64], loc: fn(usize) -> Location| -> Result<Vec<Marginal<T>>> {
            flat.chunks(q)
                .enumerate()
                .map(|(i, c)| {
                    let vals: Vec<T> = c.iter().map(|&k| T::from_u64(k).unwrap_or(T::zero()) / n).collect();
                    Marginal::from_real(&vals, loc(i), domain)
                })
                .collect()
        };
        Ok(Estimates {
            domain,
            edge: build(&self.edge, Location::Edge)?,
            vertex: build(&self.vertex, Location::Vertex)?,
            samples: self.samples,
        })
    }
}

/// Draws an index with probability proportional to `weights` (all `>= 0`).
pub(crate) fn draw<T: Scalar>(rng: &mut ChaCha8Rng, weights: &[T]) -> usize {
    let total = weights.iter().fold(T::zero(), |a, &b| a + b);
    let mut u = T::lit(rng.random::<f64>()) * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u = u - w;
    }
    weights.iter().rposition(|&w| w > T::zero()).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualMethod {
    Swp,
    GibbsDual,
    BpDual(BpConfig),
}

/// Dual estimates and their images under the dual-to-primal map.
#[derive(Debug, Clone)]
pub struct ViaDual<T> {
    pub dual_edge: Vec<Marginal<T>>,
    pub dual_vertex: Vec<Marginal<T>>,
    pub edge: Vec<Marginal<T>>,
    /// `None` where `phi~_v` has a zero entry and the vertex map is singular.
    pub vertex: Vec<Option<Marginal<T>>>,
    /// BP convergence flag; always `true` for samplers.
    pub converged: bool,
}

/// Estimates dual marginals with `method`, then maps each one to the primal.
pub fn estimate_primal_via_dual<T: Scalar>(
    p: &PrimalNfg<T>,
    method: DualMethod,
    cfg: &SamplerConfig,
) -> Result<ViaDual<T>> {
    let d = dualize(p);
    let (dual_edge, dual_vertex, converged) = match method {
        DualMethod::Swp => {
            let est = swp(p, cfg)?;
            (est.edge, est.vertex, true)
        }
        DualMethod::GibbsDual => {
            let est = gibbs_dual(&d, cfg)?;
            (est.edge, est.vertex, true)
        }
        DualMethod::BpDual(bp) => {
            let r = run_bp(&d, &bp)?;
            (r.edge_beliefs, r.vertex_beliefs, r.converged)
        }
    };
    let edge = dual_edge
        .iter()
        .enumerate()
        .map(|(e, m)| map_dual_to_primal(m, p.edge_factor(e), d.edge_factor(e)))
        .collect::<Result<Vec<_>>>()?;
    let vertex = dual_vertex
        .iter()
        .enumerate()
        .map(|(v, m)| {
            let f = d.vertex_factor(v);
            let tol = T::lit(SINGULAR_TOL) * f.max_abs();
            if f.values().iter().any(|x| x.norm() <= tol) {
                Ok(None)
            } else {
                map_dual_to_primal(m, p.vertex_factor(v), f).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ViaDual {
        dual_edge,
        dual_vertex,
        edge,
        vertex,
        converged,
    })
}
