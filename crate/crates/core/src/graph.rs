//! Finite simple connected graphs, their oriented incidence matrix and
//! configuration arithmetic over `Z/qZ`.
//!
//! Edge orientation is the order given at construction: edge `(tail, head)`
//! leaves `tail` and enters `head`, so row `e` of the incidence matrix has
//! `+1` at `tail` and `-1` at `head`.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

/// The alphabet `Z/qZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    q: usize,
}

impl Alphabet {
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::AlphabetTooSmall(q));
        }
        Ok(Self { q })
    }

    pub fn binary() -> Self {
        Self { q: 2 }
    }

    pub fn size(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.q
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        (a + self.q - b % self.q) % self.q
    }

    pub fn neg(&self, a: usize) -> usize {
        (self.q - a % self.q) % self.q
    }

    /// `sign * a` for `sign` in `{-1, 0, +1}`.
    pub fn scale(&self, sign: i8, a: usize) -> usize {
        match sign {
            1 => a % self.q,
            -1 => self.neg(a),
            _ => 0,
        }
    }
}

/// Vertex configuration `x` in `A^|V|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexConfig(pub Vec<usize>);

/// Edge configuration `y` in `A^|E|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeConfig(pub Vec<usize>);

impl VertexConfig {
    pub fn validate(&self, a: Alphabet) -> Result<()> {
        check_range(&self.0, a)
    }
}

impl EdgeConfig {
    pub fn validate(&self, a: Alphabet) -> Result<()> {
        check_range(&self.0, a)
    }
}

fn check_range(values: &[usize], a: Alphabet) -> Result<()> {
    match values.iter().find(|&&v| v >= a.size()) {
        Some(v) => Err(Error::OutOfRange(format!(
            "configuration entry {v} not in [0, {})",
            a.size()
        ))),
        None => Ok(()),
    }
}

/// A finite, simple, connected graph with oriented edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// Per vertex: `(edge, sign)` with sign `+1` if the vertex is the tail.
    incident: Vec<Vec<(usize, i8)>>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); num_vertices];
        for (e, &(t, h)) in edges.iter().enumerate() {
            if t >= num_vertices || h >= num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge {e} = ({t}, {h}) references a vertex outside [0, {num_vertices})"
                )));
            }
            if t == h {
                return Err(Error::InvalidGraph(format!("edge {e} is a self-loop at {t}")));
            }
            if !seen.insert((t.min(h), t.max(h))) {
                return Err(Error::InvalidGraph(format!(
                    "edge {e} = ({t}, {h}) duplicates an earlier edge"
                )));
            }
            incident[t].push((e, 1));
            incident[h].push((e, -1));
        }
        let g = Self {
            num_vertices,
            edges,
            incident,
        };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// Cycle on `n >= 3` vertices, edges `(i, i+1 mod n)`.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!(
                "a simple ring needs at least 3 vertices, got {n}"
            )));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    /// `rows x cols` grid in row-major vertex order. Edges are emitted per
    /// vertex, right neighbour first and then the neighbour below; periodic
    /// grids wrap both directions and need at least 3 rows and columns.
    pub fn grid(rows: usize, cols: usize, periodic: bool) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGraph("grid dimensions must be positive".into()));
        }
        if periodic && (rows < 3 || cols < 3) {
            return Err(Error::InvalidGraph(format!(
                "periodic {rows}x{cols} grid would have multi-edges; need at least 3x3"
            )));
        }
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                } else if periodic {
                    edges.push((id(r, c), id(r, 0)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                } else if periodic {
                    edges.push((id(r, c), id(0, c)));
                }
            }
        }
        Self::new(rows * cols, edges)
    }

    /// Complete graph, edges `(i, j)` with `i < j` in lexicographic order.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::new(n, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Edges incident to `v` with their incidence sign.
    pub fn incident(&self, v: usize) -> &[(usize, i8)] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Index of the edge joining `a` and `b` in either orientation.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.incident
            .get(a)?
            .iter()
            .map(|&(e, _)| e)
            .find(|&e| {
                let (t, h) = self.edges[e];
                (t == a && h == b) || (t == b && h == a)
            })
    }

    /// First Betti (cyclomatic) number `|E| - |V| + 1`.
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.num_vertices
    }

    pub fn is_tree(&self) -> bool {
        self.betti() == 0
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(e, _) in &self.incident[v] {
                let (t, h) = self.edges[e];
                let w = if t == v { h } else { t };
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.num_vertices
    }

    /// Edges not in the BFS spanning tree rooted at vertex 0, each paired with
    /// its fundamental cycle as signed edges (`+1` traversed along its orientation).
    pub fn fundamental_cycles(&self) -> Vec<Vec<(usize, i8)>> {
        let n = self.num_vertices;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut depth = vec![0usize; n];
        let mut seen = vec![false; n];
        let mut in_tree = vec![false; self.edges.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(e, _) in &self.incident[v] {
                let (t, h) = self.edges[e];
                let w = if t == v { h } else { t };
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    depth[w] = depth[v] + 1;
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
        // Walking from u towards the root along tree edge e = (parent -> u)
        // traverses it against or along its orientation.
        let step = |u: usize| -> (usize, usize, i8) {
            let (p, e) = parent[u].expect("non-root vertex has a parent");
            let (t, _) = self.edges[e];
            // moving u -> p: along orientation iff tail == u
            (p, e, if t == u { 1 } else { -1 })
        };
        let mut cycles = Vec::with_capacity(self.betti());
        for (e, &(t, h)) in self.edges.iter().enumerate() {
            if in_tree[e] {
                continue;
            }
            // cycle: t -> h along e, then h -> ... -> lca -> ... -> t
            let mut cycle = vec![(e, 1i8)];
            let mut from_h = Vec::new();
            let mut to_t = Vec::new();
            let (mut a, mut b) = (h, t);
            while depth[a] > depth[b] {
                let (p, ea, s) = step(a);
                from_h.push((ea, s));
                a = p;
            }
            while depth[b] > depth[a] {
                let (p, eb, s) = step(b);
                to_t.push((eb, -s));
                b = p;
            }
            while a != b {
                let (pa, ea, sa) = step(a);
                from_h.push((ea, sa));
                a = pa;
                let (pb, eb, sb) = step(b);
                to_t.push((eb, -sb));
                b = pb;
            }
            cycle.extend(from_h);
            cycle.extend(to_t.into_iter().rev());
            cycles.push(cycle);
        }
        cycles
    }

    /// Longest shortest path between two vertices.
    pub fn diameter(&self) -> usize {
        (0..self.num_vertices)
            .map(|s| {
                let mut dist = vec![usize::MAX; self.num_vertices];
                dist[s] = 0;
                let mut queue = VecDeque::from([s]);
                let mut far = 0;
                while let Some(v) = queue.pop_front() {
                    far = far.max(dist[v]);
                    for &(e, _) in &self.incident[v] {
                        let (t, h) = self.edges[e];
                        let w = if t == v { h } else { t };
                        if dist[w] == usize::MAX {
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                far
            })
            .max()
            .unwrap_or(0)
    }
}

/// Dense `|E| x |V|` oriented incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

pub fn build_incidence(g: &Graph) -> IncidenceMatrix {
    let rows = g.num_edges();
    let cols = g.num_vertices();
    let mut entries = vec![0i8; rows * cols];
    for (e, &(t, h)) in g.edges().iter().enumerate() {
        entries[e * cols + t] = 1;
        entries[e * cols + h] = -1;
    }
    IncidenceMatrix {
        rows,
        cols,
        entries,
    }
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, e: usize, v: usize) -> i8 {
        self.entries[e * self.cols + v]
    }

    pub fn row(&self, e: usize) -> &[i8] {
        &self.entries[e * self.cols..(e + 1) * self.cols]
    }

    /// Rank over the rationals, by fraction-free elimination on `i64`.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<i64>> = (0..self.rows)
            .map(|e| self.row(e).iter().map(|&x| x as i64).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..self.rows {
                if m[r][col] != 0 {
                    let (a, b) = (m[rank][col], m[r][col]);
                    for c in col..self.cols {
                        m[r][c] = m[r][c] * a - m[rank][c] * b;
                    }
                    let g = m[r].iter().fold(0i64, |g, &x| gcd(g, x.abs()));
                    if g > 1 {
                        m[r].iter_mut().for_each(|x| *x /= g);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `y = M x` over `Z/qZ`, i.e. `y_e = x_tail - x_head`.
pub fn edge_config(m: &IncidenceMatrix, x: &VertexConfig, a: Alphabet) -> Result<EdgeConfig> {
    if x.0.len() != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            got: x.0.len(),
        });
    }
    x.validate(a)?;
    let y = (0..m.rows)
        .map(|e| {
            m.row(e)
                .iter()
                .zip(&x.0)
                .fold(0, |acc, (&s, &xv)| a.add(acc, a.scale(s, xv)))
        })
        .collect();
    Ok(EdgeConfig(y))
}

/// `x~ = M^T y~` over `Z/qZ`: each dual vertex value is the signed sum of its incident dual edges.
pub fn dual_vertex_config(
    m: &IncidenceMatrix,
    y_dual: &EdgeConfig,
    a: Alphabet,
) -> Result<VertexConfig> {
    if y_dual.0.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            got: y_dual.0.len(),
        });
    }
    y_dual.validate(a)?;
    let mut x = vec![0usize; m.cols];
    for (e, &ye) in y_dual.0.iter().enumerate() {
        for (v, &s) in m.row(e).iter().enumerate() {
            if s != 0 {
                x[v] = a.add(x[v], a.scale(s, ye));
            }
        }
    }
    Ok(VertexConfig(x))
}

pub fn betti(g: &Graph) -> usize {
    g.betti()
}

/// `q^betti(g)`: the ratio `Z_d / Z_p` for the field-free realization, where
/// the dual carries no vertex-weighing factors and `Z_p` sums over realizable
/// edge configurations `y = M x`. See [`crate::oracle::duality_scale`] for the
/// realization with vertex-weighing factors.
pub fn scale_factor(g: &Graph, a: Alphabet) -> Result<u128> {
    let exp = u32::try_from(g.betti()).map_err(|_| Error::Overflow("scale factor"))?;
    (a.size() as u128)
        .checked_pow(exp)
        .ok_or(Error::Overflow("scale factor"))
}
