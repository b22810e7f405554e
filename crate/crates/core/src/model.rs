//! Normal factor graph models in the primal and dual domain.

use std::marker::PhantomData;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::factor::{dft_truncating, Domain, Factor, Location};
use crate::graph::{build_incidence, Alphabet, Graph, IncidenceMatrix};
use crate::scalar::{cos_turn, Scalar};

/// Type-level domain tag.
pub trait DomainTag: Clone + std::fmt::Debug + Send + Sync + 'static {
    const DOMAIN: Domain;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimalTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualTag;

impl DomainTag for PrimalTag {
    const DOMAIN: Domain = Domain::Primal;
}

impl DomainTag for DualTag {
    const DOMAIN: Domain = Domain::Dual;
}

/// A pairwise model on `graph`: one table per edge over the edge variable
/// `y_e` (primal) or `y~_e` (dual), and one per vertex over `x_v` or `x~_v`.
#[derive(Debug, Clone)]
pub struct Nfg<T, D> {
    graph: Graph,
    alphabet: Alphabet,
    incidence: IncidenceMatrix,
    edge_factors: Vec<Factor<T>>,
    vertex_factors: Vec<Factor<T>>,
    _domain: PhantomData<D>,
}

pub type PrimalNfg<T> = Nfg<T, PrimalTag>;
pub type DualNfg<T> = Nfg<T, DualTag>;

impl<T: Scalar, D: DomainTag> Nfg<T, D> {
    pub fn new(
        graph: Graph,
        alphabet: Alphabet,
        edge_factors: Vec<Factor<T>>,
        vertex_factors: Vec<Factor<T>>,
    ) -> Result<Self> {
        if edge_factors.len() != graph.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_edges(),
                got: edge_factors.len(),
            });
        }
        if vertex_factors.len() != graph.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_vertices(),
                got: vertex_factors.len(),
            });
        }
        let locations = edge_factors
            .iter()
            .enumerate()
            .map(|(e, f)| (f, Location::Edge(e)))
            .chain(
                vertex_factors
                    .iter()
                    .enumerate()
                    .map(|(v, f)| (f, Location::Vertex(v))),
            );
        for (f, loc) in locations {
            if f.len() != alphabet.size() {
                return Err(Error::DimensionMismatch {
                    expected: alphabet.size(),
                    got: f.len(),
                });
            }
            if f.location() != loc {
                return Err(Error::InvalidModel(format!(
                    "factor for {loc} is tagged {}",
                    f.location()
                )));
            }
            if f.domain() != D::DOMAIN {
                return Err(Error::DomainMismatch(format!(
                    "{} factor at {loc} in a {} model",
                    f.domain(),
                    D::DOMAIN
                )));
            }
        }
        if D::DOMAIN == Domain::Primal {
            if let Some(f) = edge_factors
                .iter()
                .chain(&vertex_factors)
                .find(|f| !f.is_nonnegative())
            {
                return Err(Error::InvalidModel(format!(
                    "primal factor at {} must be real and nonnegative",
                    f.location()
                )));
            }
        }
        let incidence = build_incidence(&graph);
        Ok(Self {
            graph,
            alphabet,
            incidence,
            edge_factors,
            vertex_factors,
            _domain: PhantomData,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn q(&self) -> usize {
        self.alphabet.size()
    }

    pub fn incidence(&self) -> &IncidenceMatrix {
        &self.incidence
    }

    pub fn edge_factors(&self) -> &[Factor<T>] {
        &self.edge_factors
    }

    pub fn vertex_factors(&self) -> &[Factor<T>] {
        &self.vertex_factors
    }

    pub fn edge_factor(&self, e: usize) -> &Factor<T> {
        &self.edge_factors[e]
    }

    pub fn vertex_factor(&self, v: usize) -> &Factor<T> {
        &self.vertex_factors[v]
    }

    pub fn factor(&self, loc: Location) -> &Factor<T> {
        match loc {
            Location::Edge(e) => &self.edge_factors[e],
            Location::Vertex(v) => &self.vertex_factors[v],
        }
    }

    pub fn domain(&self) -> Domain {
        D::DOMAIN
    }

    pub fn is_real(&self) -> bool {
        self.all_factors().all(Factor::is_real)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.all_factors().all(Factor::is_nonnegative)
    }

    pub fn all_factors(&self) -> impl Iterator<Item = &Factor<T>> {
        self.edge_factors.iter().chain(&self.vertex_factors)
    }
}

impl<T: Scalar> PrimalNfg<T> {
    /// Builds a primal model from real tables. `edge_tables[e]` is `psi_e`
    /// and `vertex_tables[v]` is `phi_v`.
    pub fn from_tables(
        graph: Graph,
        alphabet: Alphabet,
        edge_tables: &[Vec<T>],
        vertex_tables: &[Vec<T>],
    ) -> Result<Self> {
        let edges = edge_tables
            .iter()
            .enumerate()
            .map(|(e, t)| Factor::from_real(t, Location::Edge(e), Domain::Primal))
            .collect::<Result<Vec<_>>>()?;
        let vertices = vertex_tables
            .iter()
            .enumerate()
            .map(|(v, t)| Factor::from_real(t, Location::Vertex(v), Domain::Primal))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph, alphabet, edges, vertices)
    }
}

fn check_params<T>(g: &Graph, couplings: &[T], fields: &[T]) -> Result<()> {
    if couplings.len() != g.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: g.num_edges(),
            got: couplings.len(),
        });
    }
    if fields.len() != g.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.num_vertices(),
            got: fields.len(),
        });
    }
    Ok(())
}

/// Ising model with `psi_e = [e^J, e^-J]` and `phi_v = [e^H, e^-H]`, where
/// `J` and `H` already include the inverse temperature.
pub fn ising_model<T: Scalar>(g: Graph, couplings: &[T], fields: &[T]) -> Result<PrimalNfg<T>> {
    check_params(&g, couplings, fields)?;
    let pair = |x: T| vec![x.exp(), (-x).exp()];
    let edges: Vec<Vec<T>> = couplings.iter().map(|&j| pair(j)).collect();
    let vertices: Vec<Vec<T>> = fields.iter().map(|&h| pair(h)).collect();
    PrimalNfg::from_tables(g, Alphabet::binary(), &edges, &vertices)
}

/// `q`-state Potts model: `psi_e(0) = e^J`, `phi_v(0) = e^H`, every other entry 1.
pub fn potts_model<T: Scalar>(
    g: Graph,
    q: usize,
    couplings: &[T],
    fields: &[T],
) -> Result<PrimalNfg<T>> {
    let a = Alphabet::new(q)?;
    check_params(&g, couplings, fields)?;
    let table = |x: T| {
        let mut t = vec![T::one(); q];
        t[0] = x.exp();
        t
    };
    let edges: Vec<Vec<T>> = couplings.iter().map(|&j| table(j)).collect();
    let vertices: Vec<Vec<T>> = fields.iter().map(|&h| table(h)).collect();
    PrimalNfg::from_tables(g, a, &edges, &vertices)
}

/// `q`-state clock model in zero field: `psi_e(y) = exp(J cos(2 pi y / q))`.
pub fn clock_model<T: Scalar>(g: Graph, q: usize, couplings: &[T]) -> Result<PrimalNfg<T>> {
    let a = Alphabet::new(q)?;
    let zeros = vec![T::zero(); g.num_vertices()];
    check_params(&g, couplings, &zeros)?;
    let edges: Vec<Vec<T>> = couplings
        .iter()
        .map(|&j| (0..q).map(|y| (j * cos_turn::<T>(y, q)).exp()).collect())
        .collect();
    let vertices = vec![vec![T::one(); q]; g.num_vertices()];
    PrimalNfg::from_tables(g, a, &edges, &vertices)
}

/// Replaces every factor by its DFT on the same graph.
pub fn dualize<T: Scalar>(p: &PrimalNfg<T>) -> DualNfg<T> {
    let a = p.alphabet();
    let tr = |f: &Factor<T>| dft_truncating(f, a).expect("model factors have length q");
    DualNfg {
        graph: p.graph.clone(),
        alphabet: a,
        incidence: p.incidence.clone(),
        edge_factors: p.edge_factors.iter().map(tr).collect(),
        vertex_factors: p.vertex_factors.iter().map(tr).collect(),
        _domain: PhantomData,
    }
}

pub fn is_nonnegative<T: Scalar>(d: &DualNfg<T>) -> bool {
    d.is_nonnegative()
}

/// Primal model with one factor replaced, used for perturbation checks.
pub fn with_edge_table<T: Scalar>(p: &PrimalNfg<T>, e: usize, table: Vec<Complex<T>>) -> Result<PrimalNfg<T>> {
    let mut edges = p.edge_factors.clone();
    edges[e] = Factor::new(table, Location::Edge(e), Domain::Primal)?;
    PrimalNfg::new(p.graph.clone(), p.alphabet, edges, p.vertex_factors.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> Graph {
        Graph::ring(3).unwrap()
    }

    fn re(f: &Factor<f64>) -> Vec<f64> {
        f.real_parts()
    }

    #[test]
    fn ising_tables() {
        let p = ising_model(triangle(), &[0.0, 0.44, 1.0], &[0.15, 0.0, 0.0]).unwrap();
        assert_eq!(re(p.edge_factor(0)), vec![1.0, 1.0]);
        let t = re(p.edge_factor(1));
        assert_abs_diff_eq!(t[0], 1.5527, epsilon = 1e-4);
        assert_abs_diff_eq!(t[1], 0.6440, epsilon = 1e-4);
        let h = re(p.vertex_factor(0));
        assert_abs_diff_eq!(h[0], 1.1618, epsilon = 1e-4);
        assert_abs_diff_eq!(h[1], 0.8607, epsilon = 1e-4);
    }

    #[test]
    fn potts_tables() {
        let p = potts_model(triangle(), 3, &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        let t = re(p.edge_factor(0));
        assert_abs_diff_eq!(t[0], std::f64::consts::E, epsilon = 1e-15);
        assert_eq!(&t[1..], &[1.0, 1.0]);
        assert_eq!(re(p.edge_factor(1)), vec![1.0; 3]);
        let p5 = potts_model(triangle(), 5, &[2f64.ln(); 3], &[0.0; 3]).unwrap();
        let t5 = re(p5.edge_factor(2));
        assert_abs_diff_eq!(t5[0], 2.0, epsilon = 1e-15);
        assert_eq!(&t5[1..], &[1.0; 4]);
    }

    #[test]
    fn clock_tables() {
        let p = clock_model(triangle(), 4, &[1.0; 3]).unwrap();
        let e = std::f64::consts::E;
        let t = re(p.edge_factor(0));
        for (x, y) in t.iter().zip([e, 1.0, 1.0 / e, 1.0]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
        let p3 = clock_model(triangle(), 3, &[1.0; 3]).unwrap();
        let t3 = re(p3.edge_factor(1));
        let half = (-0.5f64).exp();
        for (x, y) in t3.iter().zip([e, half, half]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
        let p2 = clock_model(triangle(), 2, &[0.3; 3]).unwrap();
        let i2 = ising_model(triangle(), &[0.3; 3], &[0.0; 3]).unwrap();
        assert_eq!(re(p2.edge_factor(0)), re(i2.edge_factor(0)));
    }

    #[test]
    fn dual_tables() {
        let (j, h) = (0.7f64, 0.2f64);
        let d = dualize(&ising_model(triangle(), &[j; 3], &[h; 3]).unwrap());
        assert_eq!(d.domain(), Domain::Dual);
        let t = re(d.edge_factor(0));
        assert_abs_diff_eq!(t[0], 2.0 * j.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(t[1], 2.0 * j.sinh(), epsilon = 1e-14);
        let v = re(d.vertex_factor(2));
        assert_abs_diff_eq!(v[0], 2.0 * h.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], 2.0 * h.sinh(), epsilon = 1e-14);

        let q = 5;
        let dp = dualize(&potts_model(triangle(), q, &[j; 3], &[0.0; 3]).unwrap());
        let t = re(dp.edge_factor(1));
        assert_abs_diff_eq!(t[0], j.exp() - 1.0 + q as f64, epsilon = 1e-13);
        for &x in &t[1..] {
            assert_abs_diff_eq!(x, j.exp() - 1.0, epsilon = 1e-13);
        }
        assert!(dp.edge_factor(1).values().iter().all(|v| v.im == 0.0));

        let dc = dualize(&clock_model(triangle(), 4, &[j; 3]).unwrap());
        let t = re(dc.edge_factor(0));
        let expected = [
            2.0 * (j.cosh() + 1.0),
            2.0 * j.sinh(),
            2.0 * (j.cosh() - 1.0),
            2.0 * j.sinh(),
        ];
        for (x, y) in t.iter().zip(expected) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_coupling_builders_are_all_ones() {
        for q in 2..6 {
            let p = potts_model(triangle(), q, &[0.0; 3], &[0.0; 3]).unwrap();
            let c = clock_model(triangle(), q, &[0.0; 3]).unwrap();
            for m in [&p, &c] {
                assert!(m.all_factors().all(|f| f.real_parts().iter().all(|&x| x == 1.0)));
                let d = dualize(m);
                for f in d.all_factors() {
                    let mut expected = vec![0.0; q];
                    expected[0] = q as f64;
                    for (x, y) in f.values().iter().zip(&expected) {
                        assert_abs_diff_eq!(x.re, *y, epsilon = 1e-13);
                        assert_abs_diff_eq!(x.im, 0.0, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn nonnegativity_gate() {
        assert!(is_nonnegative(&dualize(
            &ising_model(triangle(), &[0.4; 3], &[0.1; 3]).unwrap()
        )));
        assert!(!is_nonnegative(&dualize(
            &ising_model(triangle(), &[0.4, -0.2, 0.4], &[0.0; 3]).unwrap()
        )));
        assert!(!is_nonnegative(&dualize(
            &potts_model(triangle(), 3, &[0.5, -0.25, 0.5], &[0.0; 3]).unwrap()
        )));
    }

    #[test]
    fn rejects_mismatched_inputs() {
        assert!(ising_model(triangle(), &[0.1; 2], &[0.0; 3]).is_err());
        assert!(potts_model(triangle(), 3, &[0.1; 3], &[0.0; 4]).is_err());
        assert!(PrimalNfg::<f64>::from_tables(
            triangle(),
            Alphabet::binary(),
            &[vec![1.0, -1.0], vec![1.0, 1.0], vec![1.0, 1.0]],
            &vec![vec![1.0, 1.0]; 3],
        )
        .is_err());
    }
}
