//! Subcommands that print JSON.

use nfg_core::mapping::{fixed_point, map_model_dual_to_primal, map_model_primal_to_dual};
use nfg_core::oracle::{betti_scale, chain_ising_marginals, duality_check_with, duality_scale, Boundary, Oracle};
use nfg_core::samplers::{estimate_primal_via_dual, gibbs_primal, DualMethod, SamplerConfig, ViaDual};
use nfg_core::{
    dual_vertex_variances, dualize, exact_variances, gibbs_gaussian, gibbs_gaussian_dual, ising_lower_bounds,
    map_variance_dual_to_primal, potts_lower_bounds, primal_precision, run_bp, scale_factor, BpConfig, BpResult,
    Factor, Graph, Marginal, PrimalNfg,
};
use num_complex::Complex;
use serde_json::{json, Value};

use crate::error::{budget_guidance, CliResult};
use crate::spec::{Built, Family, ModelSpec, Topology};

pub const DEFAULT_SAMPLES: usize = 10_000;

/// Flags shared by the model subcommands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub samples: Option<usize>,
    pub bp: BpConfig,
}

impl RunOptions {
    fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            ..Default::default()
        }
    }
}

fn complex(z: Complex<f64>) -> Value {
    json!([z.re, z.im])
}

fn table(values: &[Complex<f64>]) -> Value {
    json!({
        "re": values.iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": values.iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

fn factor(f: &Factor<f64>) -> Value {
    let mut v = table(f.values());
    v["location"] = json!(f.location().to_string());
    v
}

fn marginal(m: &Marginal<f64>) -> Value {
    let mut v = table(m.values());
    v["location"] = json!(m.location().to_string());
    v
}

fn marginals(ms: &[Marginal<f64>]) -> Value {
    Value::Array(ms.iter().map(marginal).collect())
}

fn optional_marginals(ms: &[Option<Marginal<f64>>]) -> Value {
    Value::Array(ms.iter().map(|m| m.as_ref().map_or(Value::Null, marginal)).collect())
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Ising => "ising",
        Family::Potts => "potts",
        Family::Clock => "clock",
        Family::Gaussian => "gaussian",
    }
}

fn graph_summary(g: &Graph) -> Value {
    let m = nfg_core::build_incidence(g);
    json!({
        "num_vertices": g.num_vertices(),
        "num_edges": g.num_edges(),
        "betti": g.betti(),
        "edges": g.edges(),
        "incidence": (0..m.rows()).map(|e| m.row(e).to_vec()).collect::<Vec<_>>(),
    })
}

pub fn model(spec: &ModelSpec) -> CliResult<Value> {
    let mut out = json!({ "family": family_name(spec.family) });
    match spec.build()? {
        Built::Gaussian(m) => {
            out["graph"] = graph_summary(m.graph());
            out["s"] = json!(m.s());
            out["sigma"] = json!(m.sigma());
        }
        Built::Discrete(p) => {
            let d = dualize(&p);
            out["q"] = json!(p.q());
            out["graph"] = graph_summary(p.graph());
            out["alpha"] = json!(scale_factor(p.graph(), p.alphabet())?);
            out["duality_scale"] = json!(duality_scale::<f64>(&p)?);
            out["primal"] = json!({
                "edge_factors": p.edge_factors().iter().map(factor).collect::<Vec<_>>(),
                "vertex_factors": p.vertex_factors().iter().map(factor).collect::<Vec<_>>(),
            });
            out["dual"] = json!({
                "nonnegative": d.is_nonnegative(),
                "edge_factors": d.edge_factors().iter().map(factor).collect::<Vec<_>>(),
                "vertex_factors": d.vertex_factors().iter().map(factor).collect::<Vec<_>>(),
            });
        }
    }
    Ok(out)
}

/// Closed-form comparison for zero-field Ising chains and rings.
fn closed_form_error(spec: &ModelSpec, p: &PrimalNfg<f64>, exact: &[Marginal<f64>]) -> CliResult<Option<f64>> {
    if spec.family != Family::Ising || p.vertex_factors().iter().any(|f| f.get(0) != f.get(1)) {
        return Ok(None);
    }
    let boundary = match spec.topology {
        Topology::Path { .. } => Boundary::Free,
        Topology::Ring { .. } => Boundary::Periodic,
        _ => return Ok(None),
    };
    let couplings: Vec<f64> = p.edge_factors().iter().map(|f| f.get(0).re.ln()).collect();
    let cf = chain_ising_marginals(boundary, &couplings)?;
    Ok(Some(
        cf.edge_primal.iter().zip(exact).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max),
    ))
}

pub fn exact(spec: &ModelSpec) -> CliResult<Value> {
    let p = spec.build_discrete()?;
    let d = dualize(&p);
    let oracle = Oracle::default();
    let ep = oracle.exact_primal(&p).map_err(|e| budget_guidance(e, "exact"))?;
    let ed = oracle.exact_dual(&d).map_err(|e| budget_guidance(e, "exact"))?;
    let scale = duality_scale::<f64>(&p)?;
    let betti_alpha = betti_scale::<f64>(&p)?;
    let primal_edges = ep.edge_marginals()?;
    Ok(json!({
        "budget": oracle.budget,
        "z_primal": complex(ep.z),
        "z_dual": complex(ed.z),
        "duality_scale": scale,
        "duality_residual": duality_check_with(&p, scale, oracle)?,
        "alpha": betti_alpha,
        "duality_residual_alpha": (ed.z - ep.z * betti_alpha).norm() / ep.z.norm(),
        "closed_form_max_error": closed_form_error(spec, &p, &primal_edges)?,
        "primal": { "edges": marginals(&primal_edges), "vertices": marginals(&ep.vertex_marginals()?) },
        "dual": { "edges": marginals(&ed.edge_marginals()?), "vertices": marginals(&ed.vertex_marginals()?) },
    }))
}

fn bp_json(r: &BpResult<f64>) -> Value {
    json!({
        "converged": r.converged,
        "iterations": r.iterations,
        "residual": r.residual,
        "edges": marginals(&r.edge_beliefs),
        "vertices": marginals(&r.vertex_beliefs),
    })
}

/// Maps each dual belief to the primal, `null` where the map is singular.
fn map_all(p: &PrimalNfg<f64>, ms: &[Marginal<f64>]) -> Vec<Option<Marginal<f64>>> {
    let d = dualize(p);
    ms.iter().map(|m| map_model_dual_to_primal(p, &d, m).ok()).collect()
}

pub fn bp(spec: &ModelSpec, opts: &RunOptions) -> CliResult<Value> {
    let p = spec.build_discrete()?;
    let d = dualize(&p);
    let rp = run_bp(&p, &opts.bp)?;
    let rd = run_bp(&d, &opts.bp)?;
    Ok(json!({
        "config": { "damping": opts.bp.damping, "tol": opts.bp.tol, "max_iters": opts.bp.max_iters },
        "primal": bp_json(&rp),
        "dual": bp_json(&rd),
        "dual_mapped": {
            "edges": optional_marginals(&map_all(&p, &rd.edge_beliefs)),
            "vertices": optional_marginals(&map_all(&p, &rd.vertex_beliefs)),
        },
    }))
}

fn via_dual_json(v: &ViaDual<f64>) -> Value {
    json!({
        "dual": { "edges": marginals(&v.dual_edge), "vertices": marginals(&v.dual_vertex) },
        "mapped": { "edges": marginals(&v.edge), "vertices": optional_marginals(&v.vertex) },
    })
}

pub fn gibbs(spec: &ModelSpec, opts: &RunOptions) -> CliResult<Value> {
    let p = spec.build_discrete()?;
    let cfg = opts.sampler();
    let primal = gibbs_primal(&p, &cfg)?;
    let dual = estimate_primal_via_dual(&p, DualMethod::GibbsDual, &cfg)?;
    Ok(json!({
        "seed": cfg.seed,
        "samples": cfg.samples,
        "rng": nfg_core::samplers::RNG_NAME,
        "primal": { "edges": marginals(&primal.edge), "vertices": marginals(&primal.vertex) },
        "via_dual": via_dual_json(&dual),
    }))
}

pub fn swp(spec: &ModelSpec, opts: &RunOptions) -> CliResult<Value> {
    let p = spec.build_discrete()?;
    let cfg = opts.sampler();
    let est = estimate_primal_via_dual(&p, DualMethod::Swp, &cfg)?;
    Ok(json!({
        "seed": cfg.seed,
        "samples": cfg.samples,
        "rng": nfg_core::samplers::RNG_NAME,
        "via_dual": via_dual_json(&est),
    }))
}

pub fn map(spec: &ModelSpec) -> CliResult<Value> {
    let p = spec.build_discrete()?;
    let d = dualize(&p);
    let oracle = Oracle::default();
    let ep = oracle.exact_primal(&p).map_err(|e| budget_guidance(e, "map"))?;
    let ed = oracle.exact_dual(&d).map_err(|e| budget_guidance(e, "map"))?;
    let mut worst: f64 = 0.0;
    let mut edges = Vec::new();
    for e in 0..p.graph().num_edges() {
        let (mp, md) = (ep.edge_marginal(e)?, ed.edge_marginal(e)?);
        let to_primal = map_model_dual_to_primal(&p, &d, &md)?;
        let to_dual = map_model_primal_to_dual(&p, &d, &mp)?;
        let err = to_primal.max_abs_diff(&mp).max(to_dual.max_abs_diff(&md));
        worst = worst.max(err);
        let psi = p.edge_factor(e).real_parts();
        let coupling = psi[0].ln();
        let bounds = match spec.family {
            Family::Ising if coupling >= 0.0 => Some(ising_lower_bounds(coupling)),
            Family::Potts if coupling >= 0.0 => Some(potts_lower_bounds(p.q(), coupling)),
            _ => None,
        };
        edges.push(json!({
            "edge": e,
            "primal": marginal(&mp),
            "dual": marginal(&md),
            "dual_mapped_to_primal": marginal(&to_primal),
            "primal_mapped_to_dual": marginal(&to_dual),
            "fixed_point": marginal(&fixed_point(p.edge_factor(e), d.edge_factor(e))?),
            "lower_bounds": bounds.map(|(a, b)| json!({ "primal": a, "dual": b })),
            "uncertainty_product": mp.get(0).re * md.get(0).re,
            "max_abs_error": err,
        }));
    }
    let mut vertices = Vec::new();
    for v in 0..p.graph().num_vertices() {
        let (mp, md) = (ep.vertex_marginal(v)?, ed.vertex_marginal(v)?);
        let mapped = map_model_dual_to_primal(&p, &d, &md).ok();
        if let Some(m) = &mapped {
            worst = worst.max(m.max_abs_diff(&mp));
        }
        vertices.push(json!({
            "vertex": v,
            "primal": marginal(&mp),
            "dual": marginal(&md),
            "dual_mapped_to_primal": mapped.as_ref().map_or(Value::Null, marginal),
        }));
    }
    Ok(json!({ "max_abs_error": worst, "edges": edges, "vertices": vertices }))
}

pub fn gaussian(spec: &ModelSpec, opts: &RunOptions) -> CliResult<Value> {
    let m = spec.build_gaussian()?;
    let exact = exact_variances(&primal_precision(&m))?;
    let via_dual = dual_vertex_variances(&m)?
        .into_iter()
        .map(|v| map_variance_dual_to_primal(m.sigma(), v))
        .collect::<nfg_core::Result<Vec<_>>>()?;
    let cfg = SamplerConfig {
        samples: opts.samples.unwrap_or(1000),
        ..opts.sampler()
    };
    let primal = gibbs_gaussian(&primal_precision(&m), &cfg)?;
    let dual = gibbs_gaussian_dual(&m, &cfg)?;
    let dual_vertex = dual.vertex_variances.clone().unwrap_or_default();
    let mapped: Vec<Option<f64>> = dual_vertex.iter().map(|&v| map_variance_dual_to_primal(m.sigma(), v).ok()).collect();
    Ok(json!({
        "seed": cfg.seed,
        "samples": cfg.samples,
        "exact": exact,
        "exact_via_dual": via_dual,
        "gibbs_primal": primal.variances,
        "gibbs_dual_vertex": dual_vertex,
        "gibbs_dual_mapped": mapped,
    }))
}
