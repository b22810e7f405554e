use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Estimates, SamplerConfig, Scan};
use crate::error::{Error, Result};
use crate::factor::{Domain, Location};
use crate::graph::Graph;
use crate::marginal::Marginal;
use crate::model::PrimalNfg;
use crate::scalar::Scalar;

/// An edge subset `U` with the parity of every vertex's degree in `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphState {
    member: Vec<bool>,
    odd: Vec<bool>,
}

impl SubgraphState {
    pub fn empty(g: &Graph) -> Self {
        Self {
            member: vec![false; g.num_edges()],
            odd: vec![false; g.num_vertices()],
        }
    }

    pub fn member(&self) -> &[bool] {
        &self.member
    }

    pub fn odd(&self) -> &[bool] {
        &self.odd
    }

    pub fn toggle(&mut self, g: &Graph, e: usize) {
        let (t, h) = g.edge(e);
        self.member[e] = !self.member[e];
        self.odd[t] = !self.odd[t];
        self.odd[h] = !self.odd[h];
    }

    /// Parities computed from scratch.
    pub fn recompute_parity(&self, g: &Graph) -> Vec<bool> {
        let mut odd = vec![false; g.num_vertices()];
        for (e, &m) in self.member.iter().enumerate() {
            if m {
                let (t, h) = g.edge(e);
                odd[t] = !odd[t];
                odd[h] = !odd[h];
            }
        }
        odd
    }

    /// Bit `e` set iff edge `e` is in `U`; defined for at most 64 edges.
    pub fn index(&self) -> u64 {
        self.member
            .iter()
            .enumerate()
            .fold(0u64, |acc, (e, &m)| if m { acc | (1 << e) } else { acc })
    }
}

/// `(psi(0) - psi(1)) / (psi(0) + psi(1))`, i.e. `tanh J` for an Ising table.
fn tanh_of<T: Scalar>(table: &[T]) -> T {
    (table[0] - table[1]) / (table[0] + table[1])
}

/// Metropolis chain over edge subsets with stationary weight
/// `w(U) = prod_{e in U} tanh J_e * prod_{v in odd(U)} tanh H_v`.
#[derive(Debug, Clone)]
pub struct SwpChain<T> {
    graph: Graph,
    t_edge: Vec<T>,
    t_vertex: Vec<T>,
    state: SubgraphState,
    rng: ChaCha8Rng,
}

impl<T: Scalar> SwpChain<T> {
    pub fn new(p: &PrimalNfg<T>, seed: u64) -> Result<Self> {
        if p.q() != 2 {
            return Err(Error::SamplerRefused(format!(
                "subgraphs-world process needs q = 2, got {}",
                p.q()
            )));
        }
        let t_edge: Vec<T> = p.edge_factors().iter().map(|f| tanh_of(&f.real_parts())).collect();
        let t_vertex: Vec<T> = p.vertex_factors().iter().map(|f| tanh_of(&f.real_parts())).collect();
        if let Some(e) = t_edge.iter().position(|&t| !(t > T::zero())) {
            return Err(Error::SamplerRefused(format!(
                "subgraphs-world process needs a positive coupling at edge {e}"
            )));
        }
        if let Some(v) = t_vertex.iter().position(|&t| !(t > T::zero())) {
            return Err(Error::SamplerRefused(format!(
                "subgraphs-world process needs a positive field at vertex {v}"
            )));
        }
        Ok(Self {
            state: SubgraphState::empty(p.graph()),
            graph: p.graph().clone(),
            t_edge,
            t_vertex,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &SubgraphState {
        &self.state
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// One toggle proposal on a uniformly chosen edge; returns whether it was accepted.
    pub fn step(&mut self) -> bool {
        let e = self.rng.random_range(0..self.graph.num_edges());
        self.propose(e)
    }

    /// Metropolis toggle of edge `e`; returns whether it was accepted.
    pub fn propose(&mut self, e: usize) -> bool {
        let (t, h) = self.graph.edge(e);
        let factor = |x: T, on: bool| if on { x } else { T::one() / x };
        let mut ratio = factor(self.t_edge[e], !self.state.member[e]);
        ratio = ratio * factor(self.t_vertex[t], !self.state.odd[t]);
        ratio = ratio * factor(self.t_vertex[h], !self.state.odd[h]);
        let accept = ratio >= T::one() || T::lit(self.rng.random::<f64>()) < ratio;
        if accept {
            self.state.toggle(&self.graph, e);
        }
        accept
    }

    /// `|E|` proposals, in edge order or at uniformly random edges.
    pub fn sweep(&mut self, scan: Scan) {
        for e in 0..self.graph.num_edges() {
            match scan {
                Scan::Systematic => self.propose(e),
                Scan::Random => self.step(),
            };
        }
    }
}

/// Unnormalized weight of a subgraph state.
pub fn swp_weight<T: Scalar>(p: &PrimalNfg<T>, s: &SubgraphState) -> T {
    let mut w = T::one();
    for (f, &m) in p.edge_factors().iter().zip(s.member()) {
        if m {
            w = w * tanh_of(&f.real_parts());
        }
    }
    for (f, &o) in p.vertex_factors().iter().zip(s.odd()) {
        if o {
            w = w * tanh_of(&f.real_parts());
        }
    }
    w
}

/// Dual marginals of a ferromagnetic Ising model in a positive field:
/// `pi_d,e(1)` is the frequency of `e in U`, `pi_d,v(1)` that of `v in odd(U)`.
pub fn swp<T: Scalar>(p: &PrimalNfg<T>, cfg: &SamplerConfig) -> Result<Estimates<T>> {
    cfg.validate()?;
    let mut chain = SwpChain::new(p, cfg.seed)?;
    let (ne, nv) = (p.graph().num_edges(), p.graph().num_vertices());
    let mut in_u = vec![0u64; ne];
    let mut odd = vec![0u64; nv];
    let burn = cfg.burn_in_for(ne);
    for _ in 0..burn {
        chain.sweep(cfg.scan);
    }
    for _ in 0..cfg.samples {
        for _ in 0..cfg.thinning {
            chain.sweep(cfg.scan);
        }
        for (c, &m) in in_u.iter_mut().zip(chain.state.member()) {
            *c += m as u64;
        }
        for (c, &o) in odd.iter_mut().zip(chain.state.odd()) {
            *c += o as u64;
        }
    }
    let n = T::from_usize_lossy(cfg.samples);
    let pair = |k: u64, loc: Location| {
        let f = T::from_u64(k).unwrap_or(T::zero()) / n;
        Marginal::from_real(&[T::one() - f, f], loc, Domain::Dual)
    };
    Ok(Estimates {
        domain: Domain::Dual,
        edge: in_u
            .iter()
            .enumerate()
            .map(|(e, &k)| pair(k, Location::Edge(e)))
            .collect::<Result<_>>()?,
        vertex: odd
            .iter()
            .enumerate()
            .map(|(v, &k)| pair(k, Location::Vertex(v)))
            .collect::<Result<_>>()?,
        samples: cfg.samples,
    })
}
