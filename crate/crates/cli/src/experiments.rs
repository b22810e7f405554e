//! Runners that regenerate the data behind each figure.
//!
//! Exact reference columns always come from enumeration or dense algebra.
//! Realization `r` of a sweep uses the seed `realization_seed(master, r)` at
//! every x value, so neighbouring points share their random draws.

use nfg_core::ensembles::{half_normal_couplings, realization_seed, uniform_couplings};
use nfg_core::gaussian::{gibbs_gaussian_dual_trace, gibbs_gaussian_trace};
use nfg_core::mapping::{fixed_point, map_model_dual_to_primal, CriticalityConstants};
use nfg_core::oracle::Oracle;
use nfg_core::samplers::{estimate_primal_via_dual, DualMethod, SamplerConfig};
use nfg_core::{
    clock_model, dualize, exact_variances, ising_lower_bounds, ising_model, map_variance_dual_to_primal,
    potts_lower_bounds, potts_model, primal_precision, relative_error, run_bp, BpConfig, Graph, GmrfModel,
    Marginal, PrimalNfg,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{budget_guidance, CliError, CliResult};
use crate::report::{Cell, Table};

pub const EXPERIMENTS: &[&str] = &[
    "fig-ising-hom",
    "fig-ising-halfnormal",
    "fig-ising-fully",
    "fig-potts-frustrated",
    "fig-gaussian",
    "fig-fixed-points",
    "fig-bounds",
];

pub const HOM_FIELD: f64 = 0.15;
pub const SWP_SAMPLES: usize = 100_000;
pub const FULLY_N: usize = 10;
pub const FULLY_LOW: f64 = 0.05;
pub const FRUSTRATION: f64 = -0.25;
pub const GAUSSIAN_SIDE: usize = 15;
pub const GAUSSIAN_SIGMA: f64 = 5.0;
pub const GAUSSIAN_S: [f64; 3] = [1.0, 20.0, 40.0];
pub const GAUSSIAN_CHAINS: usize = 7;
pub const GAUSSIAN_CHECKPOINTS: [usize; 10] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000];
pub const POTTS_QS: [usize; 5] = [3, 4, 5, 10, 100];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentOptions {
    pub seed: u64,
    pub quick: bool,
    /// Overrides the sampler length (SWP samples, or the last Gaussian checkpoint).
    pub samples: Option<usize>,
    pub bp: BpConfig,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            quick: false,
            samples: None,
            bp: BpConfig::default(),
        }
    }
}

impl ExperimentOptions {
    /// Lattice side for the 6x6 figures; 4x4 in quick mode.
    pub fn lattice_side(&self) -> usize {
        if self.quick { 4 } else { 6 }
    }

    fn realizations(&self, full: usize, quick: usize) -> usize {
        if self.quick { quick } else { full }
    }
}

/// `start + k * step` for `k < count`, rounded to remove accumulated drift.
pub fn sweep(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| ((start + step * k as f64) * 1e9).round() / 1e9).collect()
}

pub fn hom_grid() -> Vec<f64> {
    sweep(0.05, 0.05, 15)
}

pub fn halfnormal_grid() -> Vec<f64> {
    sweep(0.05, 0.1, 19)
}

pub fn fully_grid() -> Vec<f64> {
    sweep(0.05, 0.05, 13)
}

pub fn frustrated_grid() -> Vec<f64> {
    sweep(0.15, 0.15, 19)
}

pub fn curve_grid() -> Vec<f64> {
    sweep(0.01, 0.01, 300)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn exact_edges(p: &PrimalNfg<f64>, what: &str) -> CliResult<Vec<Marginal<f64>>> {
    let sums = Oracle::default().exact_primal(p).map_err(|e| budget_guidance(e, what))?;
    Ok(sums.edge_marginals()?)
}

fn p0(m: &Marginal<f64>) -> f64 {
    m.get(0).re
}

/// Errors of primal BP and of dual BP mapped back, on `pi_p,e(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpComparison {
    pub primal_p0: f64,
    pub dual_p0: f64,
    pub rel_primal: f64,
    pub rel_dual: f64,
    pub max_rel_primal: f64,
    pub max_rel_dual: f64,
    pub l1_primal: f64,
    pub l1_dual: f64,
    pub converged_primal: bool,
    pub converged_dual: bool,
    pub iterations_primal: usize,
    pub iterations_dual: usize,
}

/// Runs BP in both domains and scores edge `edge` plus the worst edge.
pub fn compare_bp(
    p: &PrimalNfg<f64>,
    exact: &[Marginal<f64>],
    edge: usize,
    cfg: &BpConfig,
) -> CliResult<BpComparison> {
    let d = dualize(p);
    let bp = run_bp(p, cfg)?;
    let bd = run_bp(&d, cfg)?;
    let mapped = bd
        .edge_beliefs
        .iter()
        .map(|m| map_model_dual_to_primal(p, &d, m))
        .collect::<nfg_core::Result<Vec<_>>>()?;
    let worst = |est: &[Marginal<f64>]| {
        est.iter()
            .zip(exact)
            .map(|(a, b)| relative_error(a, b))
            .fold(0.0, f64::max)
    };
    Ok(BpComparison {
        primal_p0: p0(&bp.edge_beliefs[edge]),
        dual_p0: p0(&mapped[edge]),
        rel_primal: relative_error(&bp.edge_beliefs[edge], &exact[edge]),
        rel_dual: relative_error(&mapped[edge], &exact[edge]),
        max_rel_primal: worst(&bp.edge_beliefs),
        max_rel_dual: worst(&mapped),
        l1_primal: nfg_core::l1_error(&bp.edge_beliefs[edge], &exact[edge]),
        l1_dual: nfg_core::l1_error(&mapped[edge], &exact[edge]),
        converged_primal: bp.converged,
        converged_dual: bd.converged,
        iterations_primal: bp.iterations,
        iterations_dual: bd.iterations,
    })
}

pub fn homogeneous_model(side: usize, coupling: f64) -> CliResult<PrimalNfg<f64>> {
    let g = Graph::grid(side, side, true)?;
    let (ne, nv) = (g.num_edges(), g.num_vertices());
    Ok(ising_model(g, &vec![coupling; ne], &vec![HOM_FIELD; nv])?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint {
    pub exact_p0: f64,
    pub bp: BpComparison,
    pub swp_p0: f64,
    pub rel_swp: f64,
    pub max_rel_swp: f64,
}

pub fn hom_point(side: usize, coupling: f64, samples: usize, seed: u64, bp: &BpConfig) -> CliResult<HomPoint> {
    let p = homogeneous_model(side, coupling)?;
    let exact = exact_edges(&p, "fig-ising-hom")?;
    let cmp = compare_bp(&p, &exact, 0, bp)?;
    let cfg = SamplerConfig { seed, samples, ..Default::default() };
    let swp = estimate_primal_via_dual(&p, DualMethod::Swp, &cfg)?;
    let max_rel_swp = swp
        .edge
        .iter()
        .zip(&exact)
        .map(|(a, b)| relative_error(a, b))
        .fold(0.0, f64::max);
    Ok(HomPoint {
        exact_p0: p0(&exact[0]),
        bp: cmp,
        swp_p0: p0(&swp.edge[0]),
        rel_swp: relative_error(&swp.edge[0], &exact[0]),
        max_rel_swp,
    })
}

pub fn halfnormal_model(side: usize, variance: f64, seed: u64) -> CliResult<PrimalNfg<f64>> {
    let g = Graph::grid(side, side, true)?;
    let (ne, nv) = (g.num_edges(), g.num_vertices());
    let j = half_normal_couplings(&mut ChaCha8Rng::seed_from_u64(seed), ne, variance)?;
    Ok(ising_model(g, &j, &vec![0.0; nv])?)
}

pub fn fully_model(n: usize, upper: f64, seed: u64) -> CliResult<PrimalNfg<f64>> {
    let g = Graph::complete(n)?;
    let ne = g.num_edges();
    let j = uniform_couplings(&mut ChaCha8Rng::seed_from_u64(seed), ne, FULLY_LOW, upper)?;
    Ok(ising_model(g, &j, &vec![0.0; n])?)
}

/// Free-boundary 3-state Potts lattice where horizontal edges in even rows
/// carry the antiferromagnetic coupling, so every plaquette has exactly one.
pub fn frustrated_potts(side: usize, ferro: f64) -> CliResult<(PrimalNfg<f64>, usize)> {
    let g = Graph::grid(side, side, false)?;
    let j: Vec<f64> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let horizontal = a / side == b / side;
            if horizontal && (a / side).is_multiple_of(2) { FRUSTRATION } else { ferro }
        })
        .collect();
    let mid = (side - 2) / 2;
    let edge = g
        .find_edge(mid * side + mid, (mid + 1) * side + mid)
        .expect("grid has the middle plaquette's left edge");
    let nv = g.num_vertices();
    Ok((potts_model(g, 3, &j, &vec![0.0; nv])?, edge))
}

/// Statistics over realizations of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPoint {
    pub rel_primal: Vec<f64>,
    pub rel_dual: Vec<f64>,
    pub max_rel_primal: Vec<f64>,
    pub max_rel_dual: Vec<f64>,
    pub converged_primal: usize,
    pub converged_dual: usize,
}

pub fn random_point<F>(realizations: usize, master: u64, bp: &BpConfig, what: &str, build: F) -> CliResult<RandomPoint>
where
    F: Fn(u64) -> CliResult<PrimalNfg<f64>> + Sync,
{
    let runs = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let p = build(realization_seed(master, r))?;
            let exact = exact_edges(&p, what)?;
            compare_bp(&p, &exact, 0, bp)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(RandomPoint {
        rel_primal: runs.iter().map(|c| c.rel_primal).collect(),
        rel_dual: runs.iter().map(|c| c.rel_dual).collect(),
        max_rel_primal: runs.iter().map(|c| c.max_rel_primal).collect(),
        max_rel_dual: runs.iter().map(|c| c.max_rel_dual).collect(),
        converged_primal: runs.iter().filter(|c| c.converged_primal).count(),
        converged_dual: runs.iter().filter(|c| c.converged_dual).count(),
    })
}

/// Pooled relative errors of one Gaussian chain pair at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChain {
    pub primal: Vec<f64>,
    /// `None` where the pooled dual estimate lies outside the map's domain.
    pub dual: Vec<Option<f64>>,
}

pub fn gaussian_model(s: f64) -> CliResult<GmrfModel<f64>> {
    Ok(GmrfModel::new(Graph::grid(GAUSSIAN_SIDE, GAUSSIAN_SIDE, true)?, s, GAUSSIAN_SIGMA)?)
}

pub fn gaussian_exact(m: &GmrfModel<f64>) -> CliResult<f64> {
    Ok(mean(&exact_variances(&primal_precision(m))?))
}

pub fn gaussian_chain(m: &GmrfModel<f64>, exact: f64, seed: u64, checkpoints: &[usize]) -> CliResult<GaussianChain> {
    let cfg = SamplerConfig { seed, burn_in: Some(0), ..Default::default() };
    let primal = gibbs_gaussian_trace(&primal_precision(m), &cfg, checkpoints)?
        .iter()
        .map(|t| (mean(&t.variances) - exact).abs() / exact)
        .collect();
    let dual = gibbs_gaussian_dual_trace(m, &cfg, checkpoints)?
        .iter()
        .map(|t| {
            let pooled = mean(t.vertex_variances.as_deref().expect("dual traces observe vertices"));
            map_variance_dual_to_primal(m.sigma(), pooled).ok().map(|v| (v - exact).abs() / exact)
        })
        .collect();
    Ok(GaussianChain { primal, dual })
}

pub fn gaussian_checkpoints(samples: Option<usize>) -> Vec<usize> {
    match samples {
        None => GAUSSIAN_CHECKPOINTS.to_vec(),
        Some(n) => {
            let mut c: Vec<usize> = GAUSSIAN_CHECKPOINTS.iter().copied().filter(|&k| k < n).collect();
            c.push(n);
            c
        }
    }
}

pub fn single_edge_fixed_point(p: &PrimalNfg<f64>) -> CliResult<Vec<f64>> {
    let d = dualize(p);
    Ok(fixed_point(p.edge_factor(0), d.edge_factor(0))?.real_parts())
}

pub fn ising_fixed_point(j: f64) -> CliResult<Vec<f64>> {
    single_edge_fixed_point(&ising_model(Graph::path(2)?, &[j], &[0.0; 2])?)
}

pub fn potts_fixed_point(q: usize, j: f64) -> CliResult<Vec<f64>> {
    single_edge_fixed_point(&potts_model(Graph::path(2)?, q, &[j], &[0.0; 2])?)
}

pub fn clock4_fixed_point(j: f64) -> CliResult<Vec<f64>> {
    single_edge_fixed_point(&clock_model(Graph::path(2)?, 4, &[j])?)
}

pub fn run_experiment(name: &str, opts: &ExperimentOptions) -> CliResult<Table> {
    opts.bp.validate()?;
    if opts.samples == Some(0) {
        return Err(CliError::Core(nfg_core::Error::OutOfRange("samples must be at least 1".into())));
    }
    match name {
        "fig-ising-hom" => ising_hom(opts),
        "fig-ising-halfnormal" => ising_halfnormal(opts),
        "fig-ising-fully" => ising_fully(opts),
        "fig-potts-frustrated" => potts_frustrated(opts),
        "fig-gaussian" => gaussian(opts),
        "fig-fixed-points" => fixed_points(opts),
        "fig-bounds" => bounds(opts),
        other => Err(CliError::Spec(format!(
            "unknown experiment {other:?}; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

fn size_note(opts: &ExperimentOptions) -> String {
    let s = opts.lattice_side();
    format!("{s}x{s} lattice{}", if opts.quick { " (quick mode)" } else { "" })
}

fn ising_hom(opts: &ExperimentOptions) -> CliResult<Table> {
    let mut t = Table::new(
        "fig-ising-hom",
        opts.seed,
        opts.quick,
        &[
            ("beta_j", "coupling on every edge"),
            ("exact_p0", "pi_p,e(0) on the first edge, exact enumeration"),
            ("bp_primal_p0", "primal BP belief"),
            ("bp_dual_p0", "dual BP belief mapped to the primal domain"),
            ("swp_p0", "subgraphs-world estimate mapped to the primal domain"),
            ("rel_err_bp_primal", "|estimate - exact| / exact on the first edge"),
            ("rel_err_bp_dual", "same, dual BP"),
            ("rel_err_swp", "same, subgraphs-world process"),
            ("max_rel_err_bp_primal", "largest relative error over all edges"),
            ("max_rel_err_bp_dual", "same, dual BP"),
            ("max_rel_err_swp", "same, subgraphs-world process"),
            ("bp_primal_converged", "primal BP met the tolerance"),
            ("bp_dual_converged", "dual BP met the tolerance"),
            ("seed", "sampler seed for this row"),
        ],
    );
    let side = opts.lattice_side();
    let samples = opts.samples.unwrap_or(SWP_SAMPLES);
    t.notes = vec![
        size_note(opts),
        format!("periodic boundaries, field {HOM_FIELD} on every vertex, {samples} SWP samples"),
    ];
    let grid = hom_grid();
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(k, &j)| {
            let seed = realization_seed(opts.seed, k as u64);
            hom_point(side, j, samples, seed, &opts.bp).map(|p| (seed, p))
        })
        .collect::<CliResult<Vec<_>>>()?;
    for (&j, (seed, p)) in grid.iter().zip(points) {
        t.push(vec![
            j.into(),
            p.exact_p0.into(),
            p.bp.primal_p0.into(),
            p.bp.dual_p0.into(),
            p.swp_p0.into(),
            p.bp.rel_primal.into(),
            p.bp.rel_dual.into(),
            p.rel_swp.into(),
            p.bp.max_rel_primal.into(),
            p.bp.max_rel_dual.into(),
            p.max_rel_swp.into(),
            p.bp.converged_primal.into(),
            p.bp.converged_dual.into(),
            seed.into(),
        ]);
    }
    Ok(t)
}

const RANDOM_COLUMNS: [(&str, &str); 10] = [
    ("median_rel_err_bp_primal", "median over realizations of the first-edge relative error, primal BP"),
    ("median_rel_err_bp_dual", "same, dual BP mapped to the primal domain"),
    ("mean_rel_err_bp_primal", "mean over realizations, primal BP"),
    ("mean_rel_err_bp_dual", "mean over realizations, dual BP"),
    ("median_max_rel_err_bp_primal", "median of the largest relative error over edges, primal BP"),
    ("median_max_rel_err_bp_dual", "same, dual BP"),
    ("converged_bp_primal", "realizations where primal BP met the tolerance"),
    ("converged_bp_dual", "realizations where dual BP met the tolerance"),
    ("realizations", "number of independent realizations"),
    ("seed", "master seed; realization r uses realization_seed(seed, r)"),
];

fn random_row(x: f64, p: &RandomPoint, realizations: usize, seed: u64) -> Vec<Cell> {
    vec![
        x.into(),
        median(&p.rel_primal).into(),
        median(&p.rel_dual).into(),
        mean(&p.rel_primal).into(),
        mean(&p.rel_dual).into(),
        median(&p.max_rel_primal).into(),
        median(&p.max_rel_dual).into(),
        p.converged_primal.into(),
        p.converged_dual.into(),
        realizations.into(),
        seed.into(),
    ]
}

fn random_table(name: &str, x: (&str, &str), opts: &ExperimentOptions) -> Table {
    let mut cols = vec![x];
    cols.extend(RANDOM_COLUMNS);
    Table::new(name, opts.seed, opts.quick, &cols)
}

fn ising_halfnormal(opts: &ExperimentOptions) -> CliResult<Table> {
    let mut t = random_table("fig-ising-halfnormal", ("sigma2", "variance of the underlying normal"), opts);
    let side = opts.lattice_side();
    let r = opts.realizations(200, 20);
    t.notes = vec![size_note(opts), "periodic boundaries, zero field, couplings |N(0, sigma2)|".into()];
    for s2 in halfnormal_grid() {
        let p = random_point(r, opts.seed, &opts.bp, "fig-ising-halfnormal", |seed| {
            halfnormal_model(side, s2, seed)
        })?;
        t.push(random_row(s2, &p, r, opts.seed));
    }
    Ok(t)
}

fn ising_fully(opts: &ExperimentOptions) -> CliResult<Table> {
    let mut t = random_table("fig-ising-fully", ("beta_jx", "upper end of the uniform coupling range"), opts);
    let r = opts.realizations(50, 10);
    t.notes = vec![format!("complete graph on {FULLY_N} vertices, zero field, couplings U[{FULLY_LOW}, beta_jx]")];
    for jx in fully_grid() {
        let p = random_point(r, opts.seed, &opts.bp, "fig-ising-fully", |seed| fully_model(FULLY_N, jx, seed))?;
        t.push(random_row(jx, &p, r, opts.seed));
    }
    Ok(t)
}

fn potts_frustrated(opts: &ExperimentOptions) -> CliResult<Table> {
    let mut t = Table::new(
        "fig-potts-frustrated",
        opts.seed,
        opts.quick,
        &[
            ("beta_j_ferr", "ferromagnetic coupling on three edges of every plaquette"),
            ("exact_p0", "pi_p,e(0) on the reported edge, exact enumeration"),
            ("bp_primal_p0", "primal BP belief"),
            ("bp_dual_p0", "dual BP belief mapped to the primal domain"),
            ("rel_err_bp_primal", "|estimate - exact| / exact"),
            ("rel_err_bp_dual", "same, dual BP"),
            ("l1_err_bp_primal", "l1 distance between belief and exact marginal"),
            ("l1_err_bp_dual", "same, dual BP"),
            ("bp_primal_converged", "primal BP met the tolerance"),
            ("bp_dual_converged", "dual BP met the tolerance"),
            ("bp_primal_iterations", "iterations used by primal BP"),
            ("bp_dual_iterations", "iterations used by dual BP"),
            ("edge", "index of the reported edge"),
        ],
    );
    let side = opts.lattice_side();
    t.notes = vec![
        size_note(opts),
        format!("q = 3, free boundaries, zero field; horizontal edges in even rows have coupling {FRUSTRATION}"),
        "reported edge: left edge of the middle plaquette".into(),
    ];
    for j in frustrated_grid() {
        let (p, edge) = frustrated_potts(side, j)?;
        let exact = exact_edges(&p, "fig-potts-frustrated")?;
        let c = compare_bp(&p, &exact, edge, &opts.bp)?;
        t.push(vec![
            j.into(),
            p0(&exact[edge]).into(),
            c.primal_p0.into(),
            c.dual_p0.into(),
            c.rel_primal.into(),
            c.rel_dual.into(),
            c.l1_primal.into(),
            c.l1_dual.into(),
            c.converged_primal.into(),
            c.converged_dual.into(),
            c.iterations_primal.into(),
            c.iterations_dual.into(),
            edge.into(),
        ]);
    }
    Ok(t)
}

fn gaussian(opts: &ExperimentOptions) -> CliResult<Table> {
    let names: Vec<(String, String)> = [("s", "edge standard deviation"), ("samples", "sweeps recorded so far"), ("exact", "vertex variance from the dense inverse")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .chain((0..GAUSSIAN_CHAINS).map(|c| (format!("rel_err_primal_{c}"), format!("primal chain {c}, pooled over vertices"))))
        .chain((0..GAUSSIAN_CHAINS).map(|c| {
            (
                format!("rel_err_dual_{c}"),
                format!("dual chain {c} mapped to the primal; empty while the estimate is outside the map's domain"),
            )
        }))
        .chain([
            ("median_rel_err_primal".to_string(), "median over chains".to_string()),
            ("median_rel_err_dual".to_string(), "median over chains with a defined value".to_string()),
            ("seed".to_string(), "master seed; chain c at s index i uses realization_seed(seed, 7 i + c)".to_string()),
        ])
        .collect();
    let cols: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let mut t = Table::new("fig-gaussian", opts.seed, opts.quick, &cols);
    t.notes = vec![format!(
        "{GAUSSIAN_SIDE}x{GAUSSIAN_SIDE} torus, sigma = {GAUSSIAN_SIGMA}, systematic scan, chains start at zero without burn-in"
    )];
    let checkpoints = gaussian_checkpoints(opts.samples);
    for (i, &s) in GAUSSIAN_S.iter().enumerate() {
        let m = gaussian_model(s)?;
        let exact = gaussian_exact(&m)?;
        let chains = (0..GAUSSIAN_CHAINS)
            .into_par_iter()
            .map(|c| gaussian_chain(&m, exact, realization_seed(opts.seed, (i * GAUSSIAN_CHAINS + c) as u64), &checkpoints))
            .collect::<CliResult<Vec<_>>>()?;
        for (k, &n) in checkpoints.iter().enumerate() {
            let mut row: Vec<Cell> = vec![s.into(), n.into(), exact.into()];
            row.extend(chains.iter().map(|c| Cell::from(c.primal[k])));
            row.extend(chains.iter().map(|c| Cell::from(c.dual[k])));
            let primal: Vec<f64> = chains.iter().map(|c| c.primal[k]).collect();
            let dual: Vec<f64> = chains.iter().filter_map(|c| c.dual[k]).collect();
            row.push(median(&primal).into());
            row.push(if dual.is_empty() { None.into() } else { Some(median(&dual)).into() });
            row.push(opts.seed.into());
            t.push(row);
        }
    }
    Ok(t)
}

/// Curve grid plus the named critical couplings, sorted by coupling.
fn with_markers(marks: &[(&str, f64)]) -> Vec<(f64, String)> {
    let mut rows: Vec<(f64, String)> = curve_grid().into_iter().map(|j| (j, String::new())).collect();
    rows.extend(marks.iter().map(|&(m, j)| (j, m.to_owned())));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows
}

fn fixed_points(opts: &ExperimentOptions) -> CliResult<Table> {
    let mut names: Vec<(String, String)> = vec![("beta_j".into(), "coupling".into())];
    names.push(("ising_p0".into(), "Ising fixed point pi*(0)".into()));
    names.push(("ising_p1".into(), "Ising fixed point pi*(1)".into()));
    for q in POTTS_QS {
        names.push((format!("potts{q}_p0"), format!("{q}-state Potts pi*(0)")));
        names.push((format!("potts{q}_p1"), format!("{q}-state Potts pi*(t), any t != 0")));
    }
    for a in 0..4 {
        names.push((format!("clock4_p{a}"), format!("4-state clock pi*({a})")));
    }
    names.push(("marker".into(), "name of the critical coupling on this row, empty on grid rows".into()));
    let cols: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let mut t = Table::new("fig-fixed-points", opts.seed, opts.quick, &cols);
    t.notes = vec!["grid step 0.01; critical couplings appear as extra rows".into()];

    let potts_marks: Vec<(String, f64)> =
        POTTS_QS.iter().map(|&q| (format!("potts{q}_critical"), CriticalityConstants::potts(q))).collect();
    let mut marks: Vec<(&str, f64)> = vec![("ising_critical", CriticalityConstants::ising())];
    marks.extend(potts_marks.iter().map(|(m, j)| (m.as_str(), *j)));
    marks.push(("clock4_critical", CriticalityConstants::clock4()));
    for (j, marker) in with_markers(&marks) {
        let mut row: Vec<Cell> = vec![j.into()];
        let ising = ising_fixed_point(j)?;
        row.extend([ising[0].into(), ising[1].into()]);
        for q in POTTS_QS {
            let p = potts_fixed_point(q, j)?;
            row.extend([p[0].into(), p[1].into()]);
        }
        row.extend(clock4_fixed_point(j)?.into_iter().map(Cell::from));
        row.push(marker.as_str().into());
        t.push(row);
    }
    Ok(t)
}

fn bounds(opts: &ExperimentOptions) -> CliResult<Table> {
    let mut t = Table::new(
        "fig-bounds",
        opts.seed,
        opts.quick,
        &[
            ("beta_j", "coupling"),
            ("ising_primal_bound", "lower bound on pi_p,e(0), 1 / (1 + exp(-2 beta_j))"),
            ("ising_dual_bound", "lower bound on pi_d,e(0), (1 + exp(-2 beta_j)) / 2"),
            ("ising_fixed_point", "Ising fixed point pi*(0), for reference"),
            ("potts3_primal_bound", "3-state Potts lower bound on pi_p,e(0)"),
            ("potts3_dual_bound", "3-state Potts lower bound on pi_d,e(0)"),
            ("marker", "name of the critical coupling on this row, empty on grid rows"),
        ],
    );
    t.notes = vec!["grid step 0.01; critical couplings appear as extra rows".into()];
    let marks = [("ising_critical", CriticalityConstants::ising()), ("potts3_critical", CriticalityConstants::potts(3))];
    for (j, marker) in with_markers(&marks) {
        let (ip, id) = ising_lower_bounds(j);
        let (pp, pd) = potts_lower_bounds(3, j);
        t.push(vec![
            j.into(),
            ip.into(),
            id.into(),
            ising_fixed_point(j)?[0].into(),
            pp.into(),
            pd.into(),
            marker.as_str().into(),
        ]);
    }
    Ok(t)
}
