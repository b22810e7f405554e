//! Primal and dual normal factor graphs for pairwise models on `Z/qZ`:
//! exact enumeration, local DFT maps between primal and dual marginals,
//! belief propagation, Monte Carlo samplers and the Gaussian analogue.

pub mod bp;
pub mod error;
pub mod ensembles;
pub mod factor;
pub mod gaussian;
pub mod graph;
pub mod mapping;
pub mod marginal;
pub mod model;
pub mod oracle;
pub mod samplers;
mod scalar;

pub use bp::{l1_error, relative_error, run_bp, BpConfig, BpResult, Schedule};
pub use error::{Error, Result};
pub use factor::{dft, idft, Domain, Factor, Location};
pub use gaussian::{
    dual_precision, dual_vertex_variances, exact_variances, gibbs_gaussian, gibbs_gaussian_dual,
    gibbs_gaussian_dual_trace, gibbs_gaussian_trace,
    map_variance_dual_to_primal, primal_precision, GaussianEstimates, GmrfModel,
};
pub use graph::{
    betti, build_incidence, dual_vertex_config, edge_config, scale_factor, Alphabet, EdgeConfig,
    Graph, IncidenceMatrix, VertexConfig,
};
pub use mapping::{
    fixed_point, ising_lower_bounds, magnetization_from_dual, magnetization_from_primal,
    map_dual_to_primal, map_primal_to_dual, potts_lower_bounds, CriticalityConstants,
};
pub use marginal::Marginal;
pub use model::{
    clock_model, dualize, ising_model, is_nonnegative, potts_model, DualNfg, DualTag, Nfg,
    PrimalNfg, PrimalTag,
};
pub use scalar::Scalar;

pub type Factor64 = Factor<f64>;
pub type Factor32 = Factor<f32>;
pub type Marginal64 = Marginal<f64>;
pub type Marginal32 = Marginal<f32>;
pub type PrimalNfg64 = PrimalNfg<f64>;
pub type PrimalNfg32 = PrimalNfg<f32>;
pub type DualNfg64 = DualNfg<f64>;
pub type DualNfg32 = DualNfg<f32>;
pub type GmrfModel64 = GmrfModel<f64>;
pub type GmrfModel32 = GmrfModel<f32>;
