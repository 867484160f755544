//! Routing negative edge weight along positive paths.
//!
//! A plan assigns every negative edge `{x, y}` a family of paths through
//! `G⁺` with fractions `α_p` summing to one. Each path edge `{u, v}` then
//! carries load `|w_xy| ℓ_p α_p` (`ℓ_p` = path length in edges), and the
//! residual weights `ω_uv = w_uv - load` define a positive graph whose
//! quadratic form is dominated by the original's.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cheeger::{Cut, CutProblem, ExhaustiveOptions};
use crate::error::{Error, Result};
use crate::graph::HamiltonianDecomposition;
use crate::graph::{build_laplacian, positive_subgraph, LaplacianKind, SignedWeightedGraph};
use crate::spectral::{eigendecompose, GroundState};

/// Residuals below this are treated as nonpositive.
pub const MIN_RESIDUAL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-12;
pub const MAX_PATHS_PER_EDGE: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutedPath {
    /// Vertex sequence from `x` to `y`.
    pub vertices: Vec<usize>,
    pub alpha: f64,
}

impl RoutedPath {
    /// `ℓ_p`, the number of edges.
    pub fn length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeEdgeRoute {
    pub x: usize,
    pub y: usize,
    pub paths: Vec<RoutedPath>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoutingPlan {
    pub routes: Vec<NegativeEdgeRoute>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingStrategy {
    ShortestPaths,
    GreedyDisjoint,
}

impl std::str::FromStr for RoutingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shortest" | "shortest-paths" | "shortest_paths" => Ok(Self::ShortestPaths),
            "greedy" | "greedy-disjoint" | "greedy_disjoint" => Ok(Self::GreedyDisjoint),
            other => Err(Error::InvalidArgument(format!(
                "unknown routing strategy `{other}`"
            ))),
        }
    }
}

/// One positive edge with its base weight and routed load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeLoad {
    pub u: usize,
    pub v: usize,
    pub base: f64,
    pub load: f64,
}

impl EdgeLoad {
    pub fn residual(&self) -> f64 {
        self.base - self.load
    }
}

/// Positive graph with weights `ω` produced by a validated plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutedGraph {
    pub graph: SignedWeightedGraph,
    pub loads: Vec<EdgeLoad>,
    pub min_residual: f64,
    /// `ε = min ω_uv / w_uv` over positive edges.
    pub min_residual_ratio: f64,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Structural checks shared by every validation mode, followed by load
/// accumulation. `scale` multiplies base weights by `s_u s_v` and loads by
/// `s_x s_y` (the ground-state weighting).
fn accumulate_loads(
    graph: &SignedWeightedGraph,
    plan: &RoutingPlan,
    scale: Option<&[f64]>,
) -> Result<Vec<EdgeLoad>> {
    let s = |u: usize| scale.map_or(1.0, |sc| sc[u]);
    let negatives: BTreeMap<(usize, usize), f64> = graph
        .negative_edges()
        .map(|(u, v, w)| ((u, v), w))
        .collect();
    let mut covered = BTreeSet::new();
    let mut loads: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for route in &plan.routes {
        let k = key(route.x, route.y);
        let Some(&w_neg) = negatives.get(&k) else {
            return Err(Error::InvalidArgument(format!(
                "route for {{{}, {}}}, which is not a negative edge",
                k.0, k.1
            )));
        };
        if !covered.insert(k) {
            return Err(Error::InvalidArgument(format!(
                "negative edge {{{}, {}}} routed twice",
                k.0, k.1
            )));
        }
        if route.paths.is_empty() {
            return Err(Error::IncompleteCover(k.0, k.1));
        }
        let sum: f64 = route.paths.iter().map(|p| p.alpha).sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::MassMismatch {
                x: k.0,
                y: k.1,
                sum,
            });
        }
        for p in &route.paths {
            if !(0.0..=1.0).contains(&p.alpha) {
                return Err(Error::MassMismatch {
                    x: k.0,
                    y: k.1,
                    sum,
                });
            }
            let ends = (p.vertices.first().copied(), p.vertices.last().copied());
            let joins =
                ends == (Some(route.x), Some(route.y)) || ends == (Some(route.y), Some(route.x));
            if !joins || p.length() == 0 || p.length() > graph.vertex_count() {
                return Err(Error::PathLeavesPositive { x: k.0, y: k.1 });
            }
            let amount = w_neg.abs() * s(route.x) * s(route.y) * p.length() as f64 * p.alpha;
            for (a, b) in p.edges() {
                if a >= graph.vertex_count()
                    || b >= graph.vertex_count()
                    || graph.weight(a, b) <= 0.0
                {
                    return Err(Error::PathLeavesPositive { x: k.0, y: k.1 });
                }
                *loads.entry((a, b)).or_insert(0.0) += amount;
            }
        }
    }
    if let Some(&(x, y)) = negatives.keys().find(|k| !covered.contains(k)) {
        return Err(Error::IncompleteCover(x, y));
    }
    Ok(graph
        .positive_edges()
        .map(|(u, v, w)| EdgeLoad {
            u,
            v,
            base: w * s(u) * s(v),
            load: loads.get(&(u, v)).copied().unwrap_or(0.0),
        })
        .collect())
}

fn routed_from_loads(vertex_count: usize, loads: Vec<EdgeLoad>) -> Result<RoutedGraph> {
    let mut min_residual = f64::INFINITY;
    let mut min_ratio: f64 = 1.0;
    for e in &loads {
        let r = e.residual();
        if e.load > 0.0 && r < MIN_RESIDUAL {
            return Err(Error::NonPositiveResidual {
                u: e.u,
                v: e.v,
                residual: r,
            });
        }
        min_residual = min_residual.min(r);
        min_ratio = min_ratio.min(r / e.base);
    }
    let graph = SignedWeightedGraph::from_edges(
        vertex_count,
        loads.iter().map(|e| (e.u, e.v, e.residual())),
    )?;
    Ok(RoutedGraph {
        graph,
        loads,
        min_residual,
        min_residual_ratio: min_ratio,
    })
}

/// Checks a plan and returns the positive graph with residual weights `ω`.
pub fn validate_plan(graph: &SignedWeightedGraph, plan: &RoutingPlan) -> Result<RoutedGraph> {
    if graph.has_negative_edges() && !positive_subgraph(graph).connected {
        return Err(Error::PositiveSubgraphDisconnected);
    }
    let loads = accumulate_loads(graph, plan, None)?;
    routed_from_loads(graph.vertex_count(), loads)
}

/// As [`validate_plan`] with ground-state weighting: base `w_uv φ(u)φ(v)` and
/// load `|w_xy| φ(x)φ(y) ℓ_p α_p`.
pub fn validate_plan_weighted(
    graph: &SignedWeightedGraph,
    plan: &RoutingPlan,
    phi: &[f64],
) -> Result<RoutedGraph> {
    if phi.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            found: phi.len(),
        });
    }
    if graph.has_negative_edges() && !positive_subgraph(graph).connected {
        return Err(Error::PositiveSubgraphDisconnected);
    }
    let loads = accumulate_loads(graph, plan, Some(phi))?;
    routed_from_loads(graph.vertex_count(), loads)
}

fn positive_adjacency(graph: &SignedWeightedGraph) -> Vec<Vec<usize>> {
    (0..graph.vertex_count())
        .map(|u| {
            graph
                .neighbors(u)
                .iter()
                .filter(|e| e.1 > 0.0)
                .map(|e| e.0)
                .collect()
        })
        .collect()
}

/// Breadth-first shortest path by hop count avoiding banned vertices/edges.
fn bfs_path(
    adj: &[Vec<usize>],
    src: usize,
    dst: usize,
    banned_nodes: &[bool],
    banned_edges: &BTreeSet<(usize, usize)>,
) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    parent[src] = src;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        if u == dst {
            break;
        }
        for &v in &adj[u] {
            if parent[v] != usize::MAX || banned_nodes[v] || banned_edges.contains(&key(u, v)) {
                continue;
            }
            parent[v] = u;
            queue.push_back(v);
        }
    }
    if parent[dst] == usize::MAX {
        return None;
    }
    let mut path = vec![dst];
    let mut v = dst;
    while v != src {
        v = parent[v];
        path.push(v);
    }
    path.reverse();
    Some(path)
}

/// Up to `k` loopless paths from `src` to `dst`, shortest first (Yen's
/// algorithm on hop count; equal lengths ordered by vertex sequence).
pub fn k_shortest_paths(adj: &[Vec<usize>], src: usize, dst: usize, k: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let none = BTreeSet::new();
    let Some(first) = bfs_path(adj, src, dst, &vec![false; n], &none) else {
        return Vec::new();
    };
    let mut found = vec![first];
    let mut pool: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    while found.len() < k {
        let last = found.last().expect("nonempty").clone();
        for i in 0..last.len() - 1 {
            let root = &last[..=i];
            let mut banned_edges = BTreeSet::new();
            for p in &found {
                if p.len() > i + 1 && &p[..=i] == root {
                    banned_edges.insert(key(p[i], p[i + 1]));
                }
            }
            let mut banned_nodes = vec![false; n];
            for &v in &root[..i] {
                banned_nodes[v] = true;
            }
            if let Some(spur) = bfs_path(adj, last[i], dst, &banned_nodes, &banned_edges) {
                let mut total = root[..i].to_vec();
                total.extend(spur);
                if !found.contains(&total) {
                    pool.insert((total.len(), total));
                }
            }
        }
        match pool.pop_first() {
            Some((_, p)) => found.push(p),
            None => break,
        }
    }
    found
}

fn uniform_plan(
    negatives: &[(usize, usize, f64)],
    candidates: &[Vec<Vec<usize>>],
    k: &[usize],
) -> RoutingPlan {
    RoutingPlan {
        routes: negatives
            .iter()
            .zip(candidates)
            .zip(k)
            .map(|((&(x, y, _), cands), &ki)| {
                let take = ki.min(cands.len());
                NegativeEdgeRoute {
                    x,
                    y,
                    paths: cands[..take]
                        .iter()
                        .map(|p| RoutedPath {
                            vertices: p.clone(),
                            alpha: 1.0 / take as f64,
                        })
                        .collect(),
                }
            })
            .collect(),
    }
}

fn route_shortest(graph: &SignedWeightedGraph) -> Result<RoutingPlan> {
    let adj = positive_adjacency(graph);
    let negatives: Vec<(usize, usize, f64)> = graph.negative_edges().collect();
    let candidates: Vec<Vec<Vec<usize>>> = negatives
        .iter()
        .map(|&(x, y, _)| k_shortest_paths(&adj, x, y, MAX_PATHS_PER_EDGE))
        .collect();
    let mut k = vec![1usize; negatives.len()];
    let mut best_residual = f64::NEG_INFINITY;
    loop {
        let plan = uniform_plan(&negatives, &candidates, &k);
        let loads = accumulate_loads(graph, &plan, None)?;
        let offending: BTreeSet<(usize, usize)> = loads
            .iter()
            .filter(|e| e.load > 0.0 && e.residual() < MIN_RESIDUAL)
            .map(|e| (e.u, e.v))
            .collect();
        let worst = loads
            .iter()
            .map(EdgeLoad::residual)
            .fold(f64::INFINITY, f64::min);
        best_residual = best_residual.max(worst);
        if offending.is_empty() {
            return Ok(plan);
        }
        let mut grew = false;
        for (i, route) in plan.routes.iter().enumerate() {
            let touches = route
                .paths
                .iter()
                .any(|p| p.edges().any(|e| offending.contains(&e)));
            if touches && k[i] < candidates[i].len() {
                k[i] += 1;
                grew = true;
            }
        }
        if !grew {
            return Err(Error::RoutingInfeasible { best_residual });
        }
    }
}

fn route_greedy(graph: &SignedWeightedGraph) -> Result<RoutingPlan> {
    let n = graph.vertex_count();
    let mut negatives: Vec<(usize, usize, f64)> = graph.negative_edges().collect();
    negatives.sort_by(|a, b| {
        b.2.abs()
            .total_cmp(&a.2.abs())
            .then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut routes = Vec::new();
    let mut best_residual = f64::INFINITY;
    for &(x, y, w) in &negatives {
        let mut chosen = None;
        for len in 1..=n {
            // Only edges that would keep a positive residual on a path of
            // this length are admissible.
            let need = w.abs() * len as f64 + MIN_RESIDUAL;
            let adj: Vec<Vec<usize>> = (0..n)
                .map(|u| {
                    graph
                        .neighbors(u)
                        .iter()
                        .filter(|&&(v, wt)| wt >= need && !used.contains(&key(u, v)))
                        .map(|e| e.0)
                        .collect()
                })
                .collect();
            if let Some(p) = bfs_path(&adj, x, y, &vec![false; n], &BTreeSet::new()) {
                if p.len() - 1 <= len {
                    chosen = Some(p);
                    break;
                }
            }
        }
        let Some(p) = chosen else {
            // Report what the unrestricted shortest path would have left.
            let adj = positive_adjacency(graph);
            let fallback = bfs_path(&adj, x, y, &vec![false; n], &used).map(|p| {
                let len = (p.len() - 1) as f64;
                p.windows(2)
                    .map(|e| graph.weight(e[0], e[1]) - w.abs() * len)
                    .fold(f64::INFINITY, f64::min)
            });
            best_residual = best_residual.min(fallback.unwrap_or(f64::NEG_INFINITY));
            return Err(Error::RoutingInfeasible { best_residual });
        };
        for win in p.windows(2) {
            used.insert(key(win[0], win[1]));
        }
        routes.push(NegativeEdgeRoute {
            x,
            y,
            paths: vec![RoutedPath {
                vertices: p,
                alpha: 1.0,
            }],
        });
    }
    routes.sort_by_key(|r| (r.x, r.y));
    Ok(RoutingPlan { routes })
}

/// Searches for a valid plan. The result always passes [`validate_plan`].
pub fn auto_route(graph: &SignedWeightedGraph, strategy: RoutingStrategy) -> Result<RoutingPlan> {
    if !graph.has_negative_edges() {
        return Ok(RoutingPlan::default());
    }
    if !positive_subgraph(graph).connected {
        return Err(Error::PositiveSubgraphDisconnected);
    }
    let plan = match strategy {
        RoutingStrategy::ShortestPaths => route_shortest(graph)?,
        RoutingStrategy::GreedyDisjoint => route_greedy(graph)?,
    };
    validate_plan(graph, &plan)?;
    Ok(plan)
}

fn combinatorial_gap(graph: &SignedWeightedGraph) -> Result<f64> {
    Ok(eigendecompose(&build_laplacian(graph, LaplacianKind::Combinatorial)?)?.gap())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplerVerdict {
    pub gamma_original: f64,
    pub gamma_routed: f64,
    pub holds: bool,
}

/// Single edge-disjoint paths with `w(e) - |w_xy| ℓ ≥ 0`: compares the
/// combinatorial gap of `G` with that of the reduced positive graph.
pub fn check_simpler_reduction(
    graph: &SignedWeightedGraph,
    plan: &RoutingPlan,
) -> Result<SimplerVerdict> {
    let mut seen = BTreeSet::new();
    for route in &plan.routes {
        if route.paths.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "negative edge {{{}, {}}} must use exactly one path",
                route.x, route.y
            )));
        }
        for e in route.paths[0].edges() {
            if !seen.insert(e) {
                return Err(Error::OverlappingPaths(e.0, e.1));
            }
        }
    }
    let loads = accumulate_loads(graph, plan, None)?;
    for e in &loads {
        if e.residual() < 0.0 {
            return Err(Error::ResidualNegative {
                u: e.u,
                v: e.v,
                residual: e.residual(),
            });
        }
    }
    let reduced = SignedWeightedGraph::from_edges(
        graph.vertex_count(),
        loads.iter().map(|e| (e.u, e.v, e.residual())),
    )?;
    let gamma_original = combinatorial_gap(graph)?;
    let gamma_routed = combinatorial_gap(&reduced)?;
    Ok(SimplerVerdict {
        gamma_original,
        gamma_routed,
        holds: gamma_original >= gamma_routed - 1e-9,
    })
}

/// Cheeger constant of the routed, ground-state-weighted graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributedCheeger {
    pub h_alpha: f64,
    pub argmin_cut: Cut,
    pub routed: RoutedGraph,
}

/// `h_α = min_S Σ_{∂S} ω_uv(α) / min(vol S, vol S̄)` with
/// `ω_uv(α) = w_uv φ(u)φ(v) - Σ |w_xy| φ(x)φ(y) ℓ_p α_p` and `vol = Σ q φ²`.
pub fn distributed_cheeger(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    plan: &RoutingPlan,
) -> Result<DistributedCheeger> {
    distributed_cheeger_with(decomp, ground, plan, ExhaustiveOptions::default())
}

pub fn distributed_cheeger_with(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    plan: &RoutingPlan,
    opts: ExhaustiveOptions,
) -> Result<DistributedCheeger> {
    let routed = validate_plan_weighted(&decomp.graph, plan, &ground.phi)?;
    let q = decomp.q_weights();
    let n = decomp.vertex_count();
    let mass = (0..n).map(|u| q[u] * ground.phi[u].powi(2)).collect();
    let problem = CutProblem::new(n, routed.graph.edges().to_vec(), mass)?;
    let report = problem.exhaustive(opts)?;
    Ok(DistributedCheeger {
        h_alpha: report.h,
        argmin_cut: report.argmin_cut,
        routed,
    })
}

/// The relaxed sandwich `2h ≥ γ ≥ ε(√(h²+Q²) - Q)` for the combinatorial
/// Laplacian with `W = 0`, where `h` and `Q = d_max` belong to `G⁺` and
/// `ε` is the smallest residual ratio `ω/w` of the plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxedSandwich {
    pub epsilon: f64,
    pub h_positive: f64,
    pub q: f64,
    pub gamma: f64,
    pub upper: f64,
    pub lower: f64,
    pub holds: bool,
}

pub fn check_relaxed_sandwich(
    graph: &SignedWeightedGraph,
    plan: &RoutingPlan,
    opts: ExhaustiveOptions,
) -> Result<RelaxedSandwich> {
    let routed = validate_plan(graph, plan)?;
    let positive = positive_subgraph(graph).graph;
    let n = graph.vertex_count();
    let problem = CutProblem::new(n, positive.edges().to_vec(), vec![1.0; n])?;
    let h = problem.exhaustive(opts)?.h;
    let q = positive.max_degree();
    let gamma = combinatorial_gap(graph)?;
    let epsilon = routed.min_residual_ratio;
    let upper = 2.0 * h;
    let lower = epsilon * ((h * h + q * q).sqrt() - q);
    let tol = |a: f64, b: f64| 1e-9 * a.abs().max(b.abs()).max(1.0);
    Ok(RelaxedSandwich {
        epsilon,
        h_positive: h,
        q,
        gamma,
        upper,
        lower,
        holds: upper - gamma >= -tol(upper, gamma) && gamma - lower >= -tol(gamma, lower),
    })
}

/// Grid with the edge between `a` and `b` replaced by weight `w`.
pub fn grid_with_edge(
    cols: usize,
    rows: usize,
    a: usize,
    b: usize,
    w: f64,
) -> Result<SignedWeightedGraph> {
    let grid = SignedWeightedGraph::grid(cols, rows)?;
    let k = key(a, b);
    if grid.weight(a, b) == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{{{}, {}}} is not a grid edge",
            k.0, k.1
        )));
    }
    Ok(grid.map_weights(|u, v, x| if (u, v) == k { w } else { x }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_crossing() -> SignedWeightedGraph {
        grid_with_edge(5, 5, 12, 17, -1.0 / 3.0).unwrap()
    }

    fn path(vertices: &[usize], alpha: f64) -> RoutedPath {
        RoutedPath {
            vertices: vertices.to_vec(),
            alpha,
        }
    }

    #[test]
    fn single_detour_has_zero_residual() {
        let plan = RoutingPlan {
            routes: vec![NegativeEdgeRoute {
                x: 12,
                y: 17,
                paths: vec![path(&[12, 11, 16, 17], 1.0)],
            }],
        };
        assert!(matches!(
            validate_plan(&grid_crossing(), &plan),
            Err(Error::NonPositiveResidual { residual, .. }) if residual == 0.0
        ));
    }

    #[test]
    fn two_detours_leave_half() {
        let plan = RoutingPlan {
            routes: vec![NegativeEdgeRoute {
                x: 12,
                y: 17,
                paths: vec![path(&[12, 11, 16, 17], 0.5), path(&[12, 13, 18, 17], 0.5)],
            }],
        };
        let routed = validate_plan(&grid_crossing(), &plan).unwrap();
        let halves: Vec<&EdgeLoad> = routed.loads.iter().filter(|e| e.load > 0.0).collect();
        assert_eq!(halves.len(), 6);
        assert!(halves.iter().all(|e| e.residual() == 0.5));
        assert_eq!(routed.min_residual, 0.5);
    }

    #[test]
    fn empty_plan_on_positive_graph() {
        let g = SignedWeightedGraph::cycle(5).unwrap();
        let routed = validate_plan(&g, &RoutingPlan::default()).unwrap();
        assert_eq!(routed.graph, g);
        assert_eq!(
            auto_route(&g, RoutingStrategy::ShortestPaths).unwrap(),
            RoutingPlan::default()
        );
    }

    #[test]
    fn plan_errors() {
        let g = grid_crossing();
        assert!(matches!(
            validate_plan(&g, &RoutingPlan::default()),
            Err(Error::IncompleteCover(12, 17))
        ));
        let bad_mass = RoutingPlan {
            routes: vec![NegativeEdgeRoute {
                x: 12,
                y: 17,
                paths: vec![path(&[12, 11, 16, 17], 0.6)],
            }],
        };
        assert!(matches!(
            validate_plan(&g, &bad_mass),
            Err(Error::MassMismatch { .. })
        ));
        let through_negative = RoutingPlan {
            routes: vec![NegativeEdgeRoute {
                x: 12,
                y: 17,
                paths: vec![path(&[12, 17], 1.0)],
            }],
        };
        assert!(matches!(
            validate_plan(&g, &through_negative),
            Err(Error::PathLeavesPositive { .. })
        ));
    }

    #[test]
    fn grid_routes_with_two_paths() {
        let plan = auto_route(&grid_crossing(), RoutingStrategy::ShortestPaths).unwrap();
        assert_eq!(plan.routes.len(), 1);
        assert_eq!(plan.routes[0].paths.len(), 2);
        assert!(plan.routes[0]
            .paths
            .iter()
            .all(|p| p.length() == 3 && p.alpha == 0.5));
        assert_eq!(
            validate_plan(&grid_crossing(), &plan).unwrap().min_residual,
            0.5
        );
    }

    #[test]
    fn star_with_heavy_negative_edge_is_infeasible() {
        let mut edges: Vec<(usize, usize, f64)> = (1..6).map(|leaf| (0, leaf, 0.01)).collect();
        edges.push((1, 2, -1.0));
        let g = SignedWeightedGraph::from_edges(6, edges).unwrap();
        for strategy in [
            RoutingStrategy::ShortestPaths,
            RoutingStrategy::GreedyDisjoint,
        ] {
            assert!(matches!(
                auto_route(&g, strategy),
                Err(Error::RoutingInfeasible { .. })
            ));
        }
    }

    #[test]
    fn yen_enumerates_in_length_order() {
        let g = SignedWeightedGraph::cycle(6).unwrap();
        let adj = positive_adjacency(&g);
        let paths = k_shortest_paths(&adj, 0, 2, 5);
        assert_eq!(paths, vec![vec![0, 1, 2], vec![0, 5, 4, 3, 2]]);
    }

    #[test]
    fn raised_detour_simpler_reduction() {
        let g = grid_crossing().map_weights(|u, v, w| {
            if [(11, 12), (11, 16), (16, 17)].contains(&(u, v)) {
                2.0
            } else {
                w
            }
        });
        let plan = RoutingPlan {
            routes: vec![NegativeEdgeRoute {
                x: 12,
                y: 17,
                paths: vec![path(&[12, 11, 16, 17], 1.0)],
            }],
        };
        let verdict = check_simpler_reduction(&g, &plan).unwrap();
        assert!(verdict.holds);
        let empty = check_simpler_reduction(
            &SignedWeightedGraph::cycle(4).unwrap(),
            &RoutingPlan::default(),
        )
        .unwrap();
        assert_eq!(empty.gamma_original, empty.gamma_routed);
    }

    #[test]
    fn distributed_cheeger_of_positive_graph_is_plain() {
        let g = SignedWeightedGraph::grid(3, 3).unwrap();
        let d = HamiltonianDecomposition::laplacian_only(g, LaplacianKind::Combinatorial).unwrap();
        let ground = GroundState::uniform(9);
        let dc = distributed_cheeger(&d, &ground, &RoutingPlan::default()).unwrap();
        let plain = crate::cheeger::cheeger_exhaustive(&d, &ground).unwrap();
        assert_eq!(dc.h_alpha, plain.h);
    }

    #[test]
    fn relaxed_sandwich_on_grid() {
        let g = grid_crossing();
        let plan = auto_route(&g, RoutingStrategy::ShortestPaths).unwrap();
        let opts = ExhaustiveOptions {
            limit: 25,
            record_ratios: false,
        };
        let check = check_relaxed_sandwich(&g, &plan, opts).unwrap();
        assert_eq!(check.epsilon, 0.5);
        assert!(check.holds);
    }
}
