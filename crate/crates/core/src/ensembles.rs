//! Seeded random graphs and models for validation sweeps and experiments.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{Alphabet, Graph};
use crate::model::{ising_model, potts_model, PrimalNfg};
use crate::scalar::{cos_turn, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ising,
    Potts,
    Clock,
}

/// Ranges for [`random_model`]. Couplings and fields are drawn uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub families: Vec<Family>,
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Largest alphabet for Potts and clock draws; Ising is always binary.
    pub max_q: usize,
    pub coupling: (f64, f64),
    pub field: (f64, f64),
}

impl EnsembleConfig {
    /// Mixed Ising/Potts/clock models with couplings of either sign.
    pub fn mixed() -> Self {
        Self {
            families: vec![Family::Ising, Family::Potts, Family::Clock],
            max_vertices: 8,
            max_edges: 12,
            max_q: 4,
            coupling: (-1.0, 1.0),
            field: (0.0, 1.0),
        }
    }

    /// Ferromagnetic Ising/Potts models.
    pub fn ferromagnetic() -> Self {
        Self {
            families: vec![Family::Ising, Family::Potts],
            max_vertices: 10,
            max_edges: 14,
            max_q: 4,
            coupling: (1e-3, 2.0),
            field: (0.0, 1.0),
        }
    }
}

/// Seed for realization `index` of a run with `master` seed.
pub fn realization_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Connected simple graph: a random spanning tree on 2..=`max_vertices`
/// vertices plus extra edges, at most `max_edges` in total, random orientations.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Result<Graph> {
    if max_vertices < 2 || max_edges + 1 < max_vertices.min(2) {
        return Err(Error::OutOfRange(format!(
            "need max_vertices >= 2 and max_edges >= 1, got {max_vertices} and {max_edges}"
        )));
    }
    let n = rng.random_range(2..=max_vertices);
    let n = n.min(max_edges + 1);
    let orient = |rng: &mut R, a: usize, b: usize| if rng.random::<bool>() { (a, b) } else { (b, a) };
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push(orient(rng, u, v));
    }
    let mut spare: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !edges.iter().any(|&(s, t)| (s.min(t), s.max(t)) == (a, b)))
        .collect();
    spare.shuffle(rng);
    let room = spare.len().min(max_edges - edges.len());
    let extra = rng.random_range(0..=room);
    for &(a, b) in &spare[..extra] {
        edges.push(orient(rng, a, b));
    }
    Graph::new(n, edges)
}

fn uniform<T: Scalar, R: Rng>(rng: &mut R, (lo, hi): (f64, f64), n: usize) -> Vec<T> {
    (0..n).map(|_| T::lit(lo + (hi - lo) * rng.random::<f64>())).collect()
}

/// Clock model with a vertex field table `exp(H cos(2 pi x / q))`.
pub fn clock_model_with_fields<T: Scalar>(g: Graph, q: usize, couplings: &[T], fields: &[T]) -> Result<PrimalNfg<T>> {
    let a = Alphabet::new(q)?;
    let table = |x: T| (0..q).map(|y| (x * cos_turn::<T>(y, q)).exp()).collect::<Vec<T>>();
    let edges: Vec<Vec<T>> = couplings.iter().map(|&j| table(j)).collect();
    let vertices: Vec<Vec<T>> = fields.iter().map(|&h| table(h)).collect();
    if edges.len() != g.num_edges() {
        return Err(Error::DimensionMismatch { expected: g.num_edges(), got: edges.len() });
    }
    if vertices.len() != g.num_vertices() {
        return Err(Error::DimensionMismatch { expected: g.num_vertices(), got: vertices.len() });
    }
    PrimalNfg::from_tables(g, a, &edges, &vertices)
}

/// One model drawn from `cfg`.
pub fn random_model<T: Scalar, R: Rng>(rng: &mut R, cfg: &EnsembleConfig) -> Result<PrimalNfg<T>> {
    if cfg.families.is_empty() {
        return Err(Error::OutOfRange("ensemble has no families".into()));
    }
    let family = cfg.families[rng.random_range(0..cfg.families.len())];
    let g = random_graph(rng, cfg.max_vertices, cfg.max_edges)?;
    let j = uniform(rng, cfg.coupling, g.num_edges());
    let h = uniform(rng, cfg.field, g.num_vertices());
    let q = if cfg.max_q > 2 { rng.random_range(2..=cfg.max_q) } else { 2 };
    match family {
        Family::Ising => ising_model(g, &j, &h),
        Family::Potts => potts_model(g, q, &j, &h),
        Family::Clock => clock_model_with_fields(g, q, &j, &h),
    }
}

/// `|N(0, variance)|` draws.
pub fn half_normal_couplings<T: Scalar, R: Rng>(rng: &mut R, n: usize, variance: f64) -> Result<Vec<T>> {
    let d = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::OutOfRange(format!("half-normal variance {variance}: {e}")))?;
    Ok((0..n).map(|_| T::lit(d.sample(rng).abs())).collect())
}

/// Uniform draws on `[lo, hi]`.
pub fn uniform_couplings<T: Scalar, R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Result<Vec<T>> {
    if !(lo <= hi) {
        return Err(Error::OutOfRange(format!("empty coupling range [{lo}, {hi}]")));
    }
    Ok(uniform(rng, (lo, hi), n))
}
