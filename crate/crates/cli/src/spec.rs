//! JSON model descriptions. See `docs/model-spec.schema.json`.

use std::path::Path;

use nfg_core::ensembles::{clock_model_with_fields, half_normal_couplings, uniform_couplings};
use nfg_core::{clock_model, ising_model, potts_model, Graph, GmrfModel, PrimalNfg};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ising,
    Potts,
    Clock,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Topology {
    Grid { rows: usize, cols: usize, periodic: bool },
    Ring { n: usize },
    Path { n: usize },
    Complete { n: usize },
    EdgeList { num_vertices: usize, edges: Vec<(usize, usize)> },
}

impl Topology {
    pub fn build(&self) -> CliResult<Graph> {
        let g = match self {
            Topology::Grid { rows, cols, periodic } => Graph::grid(*rows, *cols, *periodic),
            Topology::Ring { n } => Graph::ring(*n),
            Topology::Path { n } => Graph::path(*n),
            Topology::Complete { n } => Graph::complete(*n),
            Topology::EdgeList { num_vertices, edges } => Graph::new(*num_vertices, edges.clone()),
        };
        g.map_err(|e| CliError::Spec(format!("topology: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfNormal {
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCouplings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_normal: Option<HalfNormal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<Uniform>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Couplings {
    Scalar(f64),
    PerEdge(Vec<f64>),
    Random { random: RandomCouplings },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fields {
    Scalar(f64),
    PerVertex(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    pub s: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub schema_version: u32,
    pub family: Family,
    pub topology: Topology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Couplings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Fields>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<GaussianParams>,
}

/// A model built from a spec.
#[derive(Debug, Clone)]
pub enum Built {
    Discrete(PrimalNfg<f64>),
    Gaussian(GmrfModel<f64>),
}

fn spec_err(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}

fn check_finite(name: &str, xs: &[f64]) -> CliResult<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(spec_err(format!("{name}[{i}] is not finite"))),
        None => Ok(()),
    }
}

impl ModelSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: ModelSpec = serde_json::from_str(text).map_err(|e| spec_err(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text)
    }

    /// Structural checks that do not need the graph.
    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(spec_err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match self.family {
            Family::Gaussian => {
                let g = self.gaussian.ok_or_else(|| spec_err("family gaussian needs \"gaussian\": {s, sigma}"))?;
                if !(g.s > 0.0 && g.s.is_finite()) || !(g.sigma > 0.0 && g.sigma.is_finite()) {
                    return Err(spec_err("gaussian s and sigma must be positive and finite"));
                }
                if self.q.is_some() || self.couplings.is_some() || self.fields.is_some() {
                    return Err(spec_err("family gaussian takes no q, couplings or fields"));
                }
            }
            family => {
                if self.gaussian.is_some() {
                    return Err(spec_err("\"gaussian\" is only valid for family gaussian"));
                }
                if self.couplings.is_none() {
                    return Err(spec_err("discrete families need \"couplings\""));
                }
                match (family, self.q) {
                    (Family::Ising, Some(q)) if q != 2 => {
                        return Err(spec_err(format!("ising models are binary, got q = {q}")));
                    }
                    (Family::Potts | Family::Clock, None) => {
                        return Err(spec_err("potts and clock models need q"));
                    }
                    (_, Some(q)) if q < 2 => return Err(spec_err(format!("q must be at least 2, got {q}"))),
                    _ => {}
                }
                if let Some(Couplings::Random { random }) = &self.couplings {
                    match (random.half_normal, random.uniform) {
                        (Some(h), None) => {
                            if !(h.variance > 0.0 && h.variance.is_finite()) {
                                return Err(spec_err("half_normal variance must be positive"));
                            }
                        }
                        (None, Some(u)) => {
                            if !(u.lo <= u.hi && u.lo.is_finite() && u.hi.is_finite()) {
                                return Err(spec_err(format!("uniform range [{}, {}] is empty", u.lo, u.hi)));
                            }
                        }
                        _ => return Err(spec_err("random couplings need exactly one of half_normal or uniform")),
                    }
                }
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        match self.family {
            Family::Ising => 2,
            _ => self.q.unwrap_or(2),
        }
    }

    fn coupling_values(&self, g: &Graph) -> CliResult<Vec<f64>> {
        let ne = g.num_edges();
        let values = match self.couplings.as_ref().ok_or_else(|| spec_err("missing couplings"))? {
            Couplings::Scalar(j) => vec![*j; ne],
            Couplings::PerEdge(js) => {
                if js.len() != ne {
                    return Err(spec_err(format!("couplings has {} entries for {ne} edges", js.len())));
                }
                js.clone()
            }
            Couplings::Random { random } => {
                let mut rng = ChaCha8Rng::seed_from_u64(random.seed);
                match (random.half_normal, random.uniform) {
                    (Some(h), _) => half_normal_couplings(&mut rng, ne, h.variance)?,
                    (_, Some(u)) => uniform_couplings(&mut rng, ne, u.lo, u.hi)?,
                    _ => unreachable!("validated"),
                }
            }
        };
        check_finite("couplings", &values)?;
        Ok(values)
    }

    fn field_values(&self, g: &Graph) -> CliResult<Vec<f64>> {
        let nv = g.num_vertices();
        let values = match &self.fields {
            None => vec![0.0; nv],
            Some(Fields::Scalar(h)) => vec![*h; nv],
            Some(Fields::PerVertex(hs)) => {
                if hs.len() != nv {
                    return Err(spec_err(format!("fields has {} entries for {nv} vertices", hs.len())));
                }
                hs.clone()
            }
        };
        check_finite("fields", &values)?;
        Ok(values)
    }

    pub fn build(&self) -> CliResult<Built> {
        self.validate()?;
        let g = self.topology.build()?;
        let wrap = |r: nfg_core::Result<PrimalNfg<f64>>| r.map(Built::Discrete).map_err(|e| spec_err(e.to_string()));
        match self.family {
            Family::Gaussian => {
                let p = self.gaussian.expect("validated");
                GmrfModel::new(g, p.s, p.sigma)
                    .map(Built::Gaussian)
                    .map_err(|e| spec_err(e.to_string()))
            }
            Family::Ising => {
                let (j, h) = (self.coupling_values(&g)?, self.field_values(&g)?);
                wrap(ising_model(g, &j, &h))
            }
            Family::Potts => {
                let (j, h) = (self.coupling_values(&g)?, self.field_values(&g)?);
                wrap(potts_model(g, self.q(), &j, &h))
            }
            Family::Clock => {
                let (j, h) = (self.coupling_values(&g)?, self.field_values(&g)?);
                if h.iter().all(|&x| x == 0.0) {
                    wrap(clock_model(g, self.q(), &j))
                } else {
                    wrap(clock_model_with_fields(g, self.q(), &j, &h))
                }
            }
        }
    }

    pub fn build_discrete(&self) -> CliResult<PrimalNfg<f64>> {
        match self.build()? {
            Built::Discrete(p) => Ok(p),
            Built::Gaussian(_) => Err(spec_err("this command needs an ising, potts or clock model")),
        }
    }

    pub fn build_gaussian(&self) -> CliResult<GmrfModel<f64>> {
        match self.build()? {
            Built::Gaussian(m) => Ok(m),
            Built::Discrete(_) => Err(spec_err("this command needs a gaussian model")),
        }
    }
}
