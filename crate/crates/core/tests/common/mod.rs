//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use gapcert::stoquastic::HermitianMatrix;
use gapcert::{DiagonalPotential, HamiltonianDecomposition, LaplacianKind, SignedWeightedGraph};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random spanning tree plus each remaining pair with probability `density`.
pub fn connected_edges<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        let (u, v) = (parent.min(order[i]), parent.max(order[i]));
        edges.push((u, v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if !edges.contains(&(u, v)) && rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// `w ∈ (0, 1]`.
pub fn positive_weight<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Connected stoquastic instance with `w ∈ (0, 1]`, `W ∈ [0, w_max]`.
pub fn stoquastic_instance<R: Rng>(
    rng: &mut R,
    n: usize,
    kind: LaplacianKind,
    w_max: f64,
) -> HamiltonianDecomposition {
    let density = rng.random_range(0.0..0.6);
    let edges: Vec<(usize, usize, f64)> = connected_edges(rng, n, density)
        .into_iter()
        .map(|(u, v)| (u, v, positive_weight(rng)))
        .collect();
    let graph = SignedWeightedGraph::from_edges(n, edges).unwrap();
    let potential: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=w_max)).collect();
    HamiltonianDecomposition::new(graph, kind, DiagonalPotential(potential)).unwrap()
}

pub fn random_kind<R: Rng>(rng: &mut R) -> LaplacianKind {
    if rng.random_bool(0.5) {
        LaplacianKind::Combinatorial
    } else {
        LaplacianKind::Normalized
    }
}

/// Connected positive graph plus one to three negative edges of magnitude
/// at most `max_negative` between nonadjacent pairs.
pub fn signed_graph<R: Rng>(
    rng: &mut R,
    n: usize,
    max_negative: f64,
) -> Option<SignedWeightedGraph> {
    let density = rng.random_range(0.1..0.7);
    let positive = connected_edges(rng, n, density);
    let mut free: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|e| !positive.contains(e))
        .collect();
    if free.is_empty() {
        return None;
    }
    free.shuffle(rng);
    let count = rng.random_range(1..=3.min(free.len()));
    let mut edges: Vec<(usize, usize, f64)> = positive
        .into_iter()
        .map(|(u, v)| (u, v, positive_weight(rng)))
        .collect();
    for &(u, v) in &free[..count] {
        edges.push((u, v, -max_negative * positive_weight(rng)));
    }
    SignedWeightedGraph::from_edges(n, edges).ok()
}

/// Hermitian matrix on a connected support with entries `-r e^{iθ}`,
/// `r ∈ (0, 1]`, and diagonal in `[0, 5]`.
pub fn hermitian_instance<R: Rng>(rng: &mut R, n: usize) -> HermitianMatrix {
    let density = rng.random_range(0.0..0.7);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (u, v) in connected_edges(rng, n, density) {
        let r = positive_weight(rng);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let z = -Complex64::from_polar(r, theta);
        m[(u, v)] = z;
        m[(v, u)] = z.conj();
    }
    for u in 0..n {
        m[(u, u)] = Complex64::new(rng.random_range(0.0..5.0), 0.0);
    }
    HermitianMatrix::new(m).unwrap()
}
