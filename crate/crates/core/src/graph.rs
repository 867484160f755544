//! Weighted signed graphs, the two Laplacian kinds, and the Dirichlet
//! host-graph embedding of a diagonal potential.
//!
//! Every Hamiltonian handled by this crate is stored as `H = L_q + W`: a
//! graph whose edge weights may be negative, a Laplacian kind that fixes the
//! vertex masses `q_u`, and a diagonal potential `W`. The dense symmetric
//! realization is
//!
//! ```text
//! M = Q^{-1/2} L Q^{-1/2} + diag(W),   Q = diag(q_u)
//! ```
//!
//! which is `L + W` for the combinatorial kind (`q_u = 1`) and `𝓛 + W` for
//! the normalized kind (`q_u = d_u`). An eigenvector `f` of `M` corresponds
//! to the q-weighted eigenfunction `φ = Q^{-1/2} f` solving
//! `(λ - W_u) q_u φ(u) = Σ_v w_uv (φ(u) - φ(v))`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected graph with real (possibly negative) edge weights.
///
/// Vertices are dense ids `0..n`. Zero-weight edges are dropped at
/// construction, so `weight(u, v) == 0.0` means "no edge".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedWeightedGraph {
    vertex_count: usize,
    /// Canonical edge list, `u < v`, sorted.
    edges: Vec<(usize, usize, f64)>,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl SignedWeightedGraph {
    /// Builds a graph, rejecting self-loops, duplicates, out-of-range ids and
    /// non-finite weights.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut canonical = Vec::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(w));
            }
            canonical.push((u.min(v), u.max(v), w));
        }
        canonical.sort_by_key(|a| (a.0, a.1));
        for pair in canonical.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::DuplicateEdge(pair[0].0, pair[0].1));
            }
        }
        canonical.retain(|e| e.2 != 0.0);
        Ok(Self::from_canonical(vertex_count, canonical))
    }

    fn from_canonical(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v, w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Self {
            vertex_count,
            edges,
            adjacency,
        }
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(vertex_count: usize) -> Result<Self> {
        Self::from_edges(vertex_count, std::iter::empty())
    }

    /// Path `0 - 1 - ... - (n-1)` with unit weights.
    pub fn path(vertex_count: usize) -> Result<Self> {
        Self::from_edges(vertex_count, (1..vertex_count).map(|i| (i - 1, i, 1.0)))
    }

    /// Cycle on `n >= 3` vertices with unit weights.
    pub fn cycle(vertex_count: usize) -> Result<Self> {
        if vertex_count < 3 {
            return Err(Error::InvalidArgument(
                "cycle needs at least 3 vertices".into(),
            ));
        }
        Self::from_edges(
            vertex_count,
            (0..vertex_count).map(|i| (i, (i + 1) % vertex_count, 1.0)),
        )
    }

    /// `cols x rows` grid, vertex id `row * cols + col`, unit weights.
    pub fn grid(cols: usize, rows: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                if c + 1 < cols {
                    edges.push((id, id + 1, 1.0));
                }
                if r + 1 < rows {
                    edges.push((id, id + cols, 1.0));
                }
            }
        }
        Self::from_edges(cols * rows, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    /// `w(u, v)`, zero when the edge is absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .map(|i| self.adjacency[u][i].1)
            .unwrap_or(0.0)
    }

    /// `d_u = Σ_v w_uv` (signed).
    pub fn degree(&self, u: usize) -> f64 {
        self.adjacency[u].iter().map(|&(_, w)| w).sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.vertex_count).map(|u| self.degree(u)).collect()
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn positive_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().copied().filter(|e| e.2 > 0.0)
    }

    pub fn negative_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().copied().filter(|e| e.2 < 0.0)
    }

    pub fn has_negative_edges(&self) -> bool {
        self.edges.iter().any(|e| e.2 < 0.0)
    }

    /// Same topology with every weight replaced by `f(u, v, w)`; zero results
    /// drop the edge.
    pub fn map_weights<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, usize, f64) -> f64,
    {
        let edges = self
            .edges
            .iter()
            .map(|&(u, v, w)| (u, v, f(u, v, w)))
            .filter(|e| e.2 != 0.0)
            .collect();
        Self::from_canonical(self.vertex_count, edges)
    }

    /// Connected components by breadth-first search, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut out = Vec::new();
        for root in 0..self.vertex_count {
            if label[root] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![root];
            label[root] = id;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// `Σ_{u<v} w_uv (f(u) - f(v))^2`.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v, w)| w * (f[u] - f[v]).powi(2))
            .sum()
    }

    /// Rebuilds the adjacency after deserialization.
    pub fn rebuild(self) -> Self {
        Self::from_canonical(self.vertex_count, self.edges)
    }
}

/// The diagonal part `W` of `H = L_q + W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPotential(pub Vec<f64>);

impl DiagonalPotential {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for DiagonalPotential {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
}

impl LaplacianKind {
    /// Vertex mass `q_u`: 1 or `d_u`.
    pub fn q_weight(self, degree: f64) -> f64 {
        match self {
            LaplacianKind::Combinatorial => 1.0,
            LaplacianKind::Normalized => degree,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LaplacianKind::Combinatorial => "combinatorial",
            LaplacianKind::Normalized => "normalized",
        }
    }
}

impl std::str::FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            "normalized" => Ok(LaplacianKind::Normalized),
            other => Err(Error::InvalidArgument(format!(
                "unknown Laplacian kind `{other}`"
            ))),
        }
    }
}

fn check_normalized_degrees(graph: &SignedWeightedGraph) -> Result<()> {
    for u in 0..graph.vertex_count() {
        let d = graph.degree(u);
        if d <= 0.0 {
            return Err(Error::ZeroDegree {
                vertex: u,
                degree: d,
            });
        }
    }
    Ok(())
}

/// `H = L_q + W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianDecomposition {
    pub graph: SignedWeightedGraph,
    pub kind: LaplacianKind,
    pub potential: DiagonalPotential,
}

impl HamiltonianDecomposition {
    pub fn new(
        graph: SignedWeightedGraph,
        kind: LaplacianKind,
        potential: DiagonalPotential,
    ) -> Result<Self> {
        if potential.len() != graph.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: graph.vertex_count(),
                found: potential.len(),
            });
        }
        if let Some(&bad) = potential.0.iter().find(|w| !w.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        if kind == LaplacianKind::Normalized {
            check_normalized_degrees(&graph)?;
        }
        Ok(Self {
            graph,
            kind,
            potential,
        })
    }

    /// Decomposition with `W = 0`.
    pub fn laplacian_only(graph: SignedWeightedGraph, kind: LaplacianKind) -> Result<Self> {
        let n = graph.vertex_count();
        Self::new(graph, kind, DiagonalPotential::zeros(n))
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Vertex masses `q_u`.
    pub fn q_weights(&self) -> Vec<f64> {
        self.graph
            .degrees()
            .into_iter()
            .map(|d| self.kind.q_weight(d))
            .collect()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        dense_hamiltonian(self).expect("validated decomposition")
    }

    /// Reads a real symmetric matrix as `L + W` with `w_uv = -M_uv` and
    /// `W_u = M_uu - d_u`; positive off-diagonal entries become negative edges.
    pub fn from_dense_combinatorial(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
        let scale = m.amax().max(1.0);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let asym = (m[(u, v)] - m[(v, u)]).abs();
                if asym > 1e-12 * scale {
                    return Err(Error::NotSymmetric(asym));
                }
                let w = -0.5 * (m[(u, v)] + m[(v, u)]);
                if w != 0.0 {
                    edges.push((u, v, w));
                }
            }
        }
        let graph = SignedWeightedGraph::from_edges(n, edges)?;
        let potential: Vec<f64> = (0..n).map(|u| m[(u, u)] - graph.degree(u)).collect();
        Self::new(
            graph,
            LaplacianKind::Combinatorial,
            DiagonalPotential(potential),
        )
    }

    /// Same graph and kind with the potential removed.
    pub fn without_potential(&self) -> Self {
        Self {
            graph: self.graph.clone(),
            kind: self.kind,
            potential: DiagonalPotential::zeros(self.vertex_count()),
        }
    }

    /// Maps an eigenvector `f` of the dense realization to `φ = Q^{-1/2} f`.
    pub fn to_q_weighted(&self, f: &DVector<f64>) -> DVector<f64> {
        let q = self.q_weights();
        DVector::from_iterator(f.len(), f.iter().zip(&q).map(|(x, qu)| x / qu.sqrt()))
    }

    /// Inverse of [`Self::to_q_weighted`].
    pub fn from_q_weighted(&self, phi: &DVector<f64>) -> DVector<f64> {
        let q = self.q_weights();
        DVector::from_iterator(phi.len(), phi.iter().zip(&q).map(|(x, qu)| x * qu.sqrt()))
    }
}

/// Dense Laplacian of the given kind.
///
/// Combinatorial: `d_u` on the diagonal and `-w_uv` off it. Normalized:
/// `1` on the diagonal and `-w_uv / sqrt(d_u d_v)` off it.
pub fn build_laplacian(graph: &SignedWeightedGraph, kind: LaplacianKind) -> Result<DMatrix<f64>> {
    let n = graph.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    match kind {
        LaplacianKind::Combinatorial => {
            for u in 0..n {
                m[(u, u)] = graph.degree(u);
            }
            for &(u, v, w) in graph.edges() {
                m[(u, v)] = -w;
                m[(v, u)] = -w;
            }
        }
        LaplacianKind::Normalized => {
            check_normalized_degrees(graph)?;
            let d = graph.degrees();
            for u in 0..n {
                m[(u, u)] = 1.0;
            }
            for &(u, v, w) in graph.edges() {
                let x = -w / (d[u] * d[v]).sqrt();
                m[(u, v)] = x;
                m[(v, u)] = x;
            }
        }
    }
    Ok(m)
}

/// Dense symmetric realization `Q^{-1/2}(L + QW)Q^{-1/2}` of a decomposition.
pub fn dense_hamiltonian(decomp: &HamiltonianDecomposition) -> Result<DMatrix<f64>> {
    let n = decomp.vertex_count();
    if decomp.potential.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: decomp.potential.len(),
        });
    }
    let mut m = build_laplacian(&decomp.graph, decomp.kind)?;
    for (u, w) in decomp.potential.values().iter().enumerate() {
        m[(u, u)] += w;
    }
    Ok(m)
}

/// `G` embedded in a host graph `G'` with one absorbing boundary vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HostGraphEmbedding {
    pub host: SignedWeightedGraph,
    /// Id of the added vertex `x` (always `n`).
    pub boundary_vertex: usize,
    /// `(u, x, W_u)` for every `u` with `W_u != 0`.
    pub boundary_edges: Vec<(usize, usize, f64)>,
    /// Host id of each original vertex.
    pub original_vertices: Vec<usize>,
}

impl HostGraphEmbedding {
    /// Host quadratic form `Σ_{E ∪ ∂G} w_uv (f(u) - f(v))^2` with `f(x) = 0`.
    pub fn dirichlet_form(&self, f: &[f64]) -> f64 {
        let mut extended = f.to_vec();
        extended.push(0.0);
        self.host.quadratic_form(&extended)
    }
}

/// Turns the potential into boundary edges `(u, x, W_u)` so that host degrees
/// become `d_u + W_u`.
pub fn embed_dirichlet(decomp: &HamiltonianDecomposition) -> Result<HostGraphEmbedding> {
    let n = decomp.vertex_count();
    let x = n;
    let mut boundary_edges = Vec::new();
    for (u, &w) in decomp.potential.values().iter().enumerate() {
        if w < 0.0 {
            return Err(Error::NegativePotentialUnsupported {
                vertex: u,
                value: w,
            });
        }
        if w > 0.0 {
            boundary_edges.push((u, x, w));
        }
    }
    let host = SignedWeightedGraph::from_edges(
        n + 1,
        decomp
            .graph
            .edges()
            .iter()
            .copied()
            .chain(boundary_edges.iter().copied()),
    )?;
    Ok(HostGraphEmbedding {
        host,
        boundary_vertex: x,
        boundary_edges,
        original_vertices: (0..n).collect(),
    })
}

/// `G⁺`: the same vertices with only the positive edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSubgraph {
    pub graph: SignedWeightedGraph,
    pub connected: bool,
}

pub fn positive_subgraph(graph: &SignedWeightedGraph) -> PositiveSubgraph {
    let g = graph.map_weights(|_, _, w| if w > 0.0 { w } else { 0.0 });
    let connected = g.is_connected();
    PositiveSubgraph {
        graph: g,
        connected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> SignedWeightedGraph {
        SignedWeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn single_edge_laplacians_agree() {
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(
            build_laplacian(&k2(), LaplacianKind::Combinatorial).unwrap(),
            expected
        );
        assert_eq!(
            build_laplacian(&k2(), LaplacianKind::Normalized).unwrap(),
            expected
        );
    }

    #[test]
    fn path_three_combinatorial() {
        let l = build_laplacian(
            &SignedWeightedGraph::path(3).unwrap(),
            LaplacianKind::Combinatorial,
        )
        .unwrap();
        let expected =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(l, expected);
    }

    #[test]
    fn figure_one_diagonal() {
        let d = HamiltonianDecomposition::new(
            SignedWeightedGraph::path(4).unwrap(),
            LaplacianKind::Combinatorial,
            vec![0.0, 1.0, 0.0, 9.0].into(),
        )
        .unwrap();
        let h = dense_hamiltonian(&d).unwrap();
        assert_eq!(h.diagonal().as_slice(), &[1.0, 3.0, 2.0, 10.0]);
    }

    #[test]
    fn uniform_shift_on_k2() {
        let d = HamiltonianDecomposition::new(
            k2(),
            LaplacianKind::Combinatorial,
            vec![5.0, 5.0].into(),
        )
        .unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[6.0, -1.0, -1.0, 6.0]);
        assert_eq!(dense_hamiltonian(&d).unwrap(), expected);
    }

    #[test]
    fn zero_potential_matches_laplacian() {
        let g = SignedWeightedGraph::cycle(5).unwrap();
        for kind in [LaplacianKind::Combinatorial, LaplacianKind::Normalized] {
            let d = HamiltonianDecomposition::laplacian_only(g.clone(), kind).unwrap();
            assert_eq!(
                dense_hamiltonian(&d).unwrap(),
                build_laplacian(&g, kind).unwrap()
            );
        }
    }

    #[test]
    fn normalized_rejects_isolated_vertex() {
        let g = SignedWeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            build_laplacian(&g, LaplacianKind::Normalized),
            Err(Error::ZeroDegree { vertex: 2, .. })
        ));
        assert_eq!(g.degree(2), 0.0);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            SignedWeightedGraph::from_edges(2, [(1, 1, 1.0)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            SignedWeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            SignedWeightedGraph::from_edges(2, [(0, 2, 1.0)]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            HamiltonianDecomposition::new(k2(), LaplacianKind::Combinatorial, vec![0.0].into()),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn symmetric_lookup_and_zero_weight_edges() {
        let g = SignedWeightedGraph::from_edges(3, [(2, 0, -0.5), (0, 1, 0.0)]).unwrap();
        assert_eq!(g.weight(0, 2), -0.5);
        assert_eq!(g.weight(2, 0), -0.5);
        assert_eq!(g.weight(0, 1), 0.0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn figure_one_embedding() {
        let d = HamiltonianDecomposition::new(
            SignedWeightedGraph::path(4).unwrap(),
            LaplacianKind::Combinatorial,
            vec![0.0, 1.0, 0.0, 9.0].into(),
        )
        .unwrap();
        let e = embed_dirichlet(&d).unwrap();
        assert_eq!(e.boundary_edges, vec![(1, 4, 1.0), (3, 4, 9.0)]);
        let host_degrees: Vec<f64> = (0..4).map(|u| e.host.degree(u)).collect();
        assert_eq!(host_degrees, vec![1.0, 3.0, 2.0, 10.0]);
    }

    #[test]
    fn embedding_edge_cases() {
        let d =
            HamiltonianDecomposition::laplacian_only(k2(), LaplacianKind::Combinatorial).unwrap();
        let e = embed_dirichlet(&d).unwrap();
        assert!(e.boundary_edges.is_empty());
        assert_eq!(e.host.neighbors(2).len(), 0);

        let single = HamiltonianDecomposition::new(
            SignedWeightedGraph::empty(1).unwrap(),
            LaplacianKind::Combinatorial,
            vec![3.0].into(),
        )
        .unwrap();
        let e = embed_dirichlet(&single).unwrap();
        assert_eq!(e.host.edges(), &[(0, 1, 3.0)]);

        let neg = HamiltonianDecomposition::new(
            k2(),
            LaplacianKind::Combinatorial,
            vec![0.0, -1.0].into(),
        )
        .unwrap();
        assert!(matches!(
            embed_dirichlet(&neg),
            Err(Error::NegativePotentialUnsupported { vertex: 1, .. })
        ));
    }

    #[test]
    fn positive_subgraph_cases() {
        let g = SignedWeightedGraph::cycle(4).unwrap();
        let p = positive_subgraph(&g);
        assert_eq!(p.graph, g);
        assert!(p.connected);

        let only_negative = SignedWeightedGraph::from_edges(2, [(0, 1, -1.0)]).unwrap();
        let p = positive_subgraph(&only_negative);
        assert_eq!(p.graph.edge_count(), 0);
        assert!(!p.connected);
    }
}
