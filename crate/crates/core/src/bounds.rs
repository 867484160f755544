//! Executable checks of the Cheeger-type inequalities for `H = L_q + W`.
//!
//! Each verifier recomputes every quantity from scratch (dense
//! eigendecomposition, exhaustive cuts) and returns a [`BoundCertificate`]
//! recording `lhs ≥ rhs`, the slack, the inputs, and any intermediate
//! inequalities replayed along the way.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cheeger::{CheegerReport, Cut, CutProblem, ExhaustiveOptions};
use crate::error::{Error, Result};
use crate::graph::{
    positive_subgraph, HamiltonianDecomposition, LaplacianKind, SignedWeightedGraph,
};
use crate::io::serialize_decomposition;
use crate::routing::{distributed_cheeger_with, RoutingPlan};
use crate::spectral::{
    dirichlet_ground, eigendecompose, ground_state_from, ground_weighted_gap_quotient, EigenSystem,
    GroundState, Orthogonality,
};

/// Relative slack tolerance shared by all certificates.
pub const SLACK_TOL: f64 = 1e-9;

fn tolerance(lhs: f64, rhs: f64) -> f64 {
    SLACK_TOL * 1f64.max(lhs.abs()).max(rhs.abs())
}

/// `lhs ≥ rhs` up to the relative tolerance.
pub fn holds(lhs: f64, rhs: f64) -> bool {
    lhs - rhs >= -tolerance(lhs, rhs)
}

/// One replayed intermediate inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds: holds(lhs, rhs),
        }
    }

    /// `lhs = rhs` up to the relative tolerance.
    pub fn equal(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds: holds(lhs, rhs) && holds(rhs, lhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub name: String,
    /// Human-readable form of the inequality.
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub inputs: BTreeMap<String, f64>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Problem text for reproduction, present only when the certificate fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
}

impl BoundCertificate {
    fn new(name: &str, statement: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            lhs,
            rhs,
            slack: lhs - rhs,
            inputs: BTreeMap::new(),
            holds: holds(lhs, rhs),
            checks: Vec::new(),
            notes: Vec::new(),
            instance: None,
        }
    }

    fn input(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.into(), value);
        self
    }

    fn check(mut self, c: Check) -> Self {
        self.holds &= c.holds;
        self.checks.push(c);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    fn finish(mut self, decomp: &HamiltonianDecomposition) -> Self {
        if !self.holds {
            self.instance = Some(serialize_decomposition(decomp));
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QMode {
    /// `Σ_S d_u φ₁² / Σ_S q_u φ₁²` over `S = {φ₁ ≥ 0}`.
    ExactExcited,
    /// `d_max` (combinatorial) or `1` (normalized).
    DegreeRelaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QValue {
    pub value: f64,
    pub mode: QMode,
    pub set: Vec<usize>,
}

/// `d_max` or `1`.
pub fn degree_relaxed_q(kind: LaplacianKind, graph: &SignedWeightedGraph) -> f64 {
    match kind {
        LaplacianKind::Combinatorial => graph.max_degree(),
        LaplacianKind::Normalized => 1.0,
    }
}

/// `√(h² + Q²) - Q`, evaluated as `h² / (√(h² + Q²) + Q)` to avoid
/// cancellation for small `h`.
pub fn cheeger_lower(h: f64, q: f64) -> f64 {
    let r = (h * h + q * q).sqrt();
    if r + q > 0.0 {
        h * h / (r + q)
    } else {
        0.0
    }
}

/// `h² / (2√(h² + Q²))`.
pub fn cheeger2_lower(h: f64, q: f64) -> f64 {
    let r = (h * h + q * q).sqrt();
    if r > 0.0 {
        h * h / (2.0 * r)
    } else {
        0.0
    }
}

/// `(Q + ρ) - √((Q + ρ)² - h²)`, or `None` outside the square-root domain.
pub fn nonstoquastic_lower(h: f64, q: f64, rho: f64) -> Option<f64> {
    let a = q + rho;
    let disc = a * a - h * h;
    if disc < 0.0 {
        return None;
    }
    // Rationalized form of a - √(a² - h²).
    let denom = a + disc.sqrt();
    Some(if denom > 0.0 { h * h / denom } else { 0.0 })
}

/// Spectrum, ground state and exact Cheeger constant of one instance,
/// shared between verifiers.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub decomp: HamiltonianDecomposition,
    pub system: EigenSystem,
    pub ground: GroundState,
    pub cheeger: CheegerReport,
    pub cut_problem: CutProblem,
}

impl Analysis {
    pub fn new(decomp: &HamiltonianDecomposition) -> Result<Self> {
        Self::with_options(decomp, ExhaustiveOptions::default())
    }

    pub fn with_options(
        decomp: &HamiltonianDecomposition,
        opts: ExhaustiveOptions,
    ) -> Result<Self> {
        let system = eigendecompose(&decomp.dense())?;
        let ground = ground_state_from(decomp, &system)?;
        let cut_problem = CutProblem::ground_weighted(decomp, &ground)?;
        let cheeger = cut_problem.exhaustive(opts)?;
        Ok(Self {
            decomp: decomp.clone(),
            system,
            ground,
            cheeger,
            cut_problem,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.system.gap()
    }

    pub fn h(&self) -> f64 {
        self.cheeger.h
    }

    /// `φ₁` in the q-weighted picture, oriented so that `S = {φ₁/φ₀ ≥ 0}`
    /// carries at most half of the `qφ₀²` mass.
    pub fn oriented_excited(&self) -> Vec<f64> {
        let mut phi1: Vec<f64> = self
            .decomp
            .to_q_weighted(&self.system.vector(1))
            .iter()
            .copied()
            .collect();
        let mass = self.cut_problem.mass();
        let total: f64 = mass.iter().sum();
        let pos: f64 = (0..phi1.len())
            .filter(|&u| phi1[u] >= 0.0)
            .map(|u| mass[u])
            .sum();
        if pos > total / 2.0 {
            phi1.iter_mut().for_each(|x| *x = -*x);
        }
        phi1
    }

    pub fn q_value(&self, mode: QMode) -> QValue {
        match mode {
            QMode::DegreeRelaxed => QValue {
                value: degree_relaxed_q(self.decomp.kind, &self.decomp.graph),
                mode,
                set: (0..self.decomp.vertex_count()).collect(),
            },
            QMode::ExactExcited => {
                let phi1 = self.oriented_excited();
                let d = self.decomp.graph.degrees();
                let q = self.decomp.q_weights();
                let set: Vec<usize> = (0..phi1.len()).filter(|&u| phi1[u] >= 0.0).collect();
                let num: f64 = set.iter().map(|&u| d[u] * phi1[u] * phi1[u]).sum();
                let den: f64 = set.iter().map(|&u| q[u] * phi1[u] * phi1[u]).sum();
                QValue {
                    value: if den > 0.0 { num / den } else { 0.0 },
                    mode,
                    set,
                }
            }
        }
    }

    /// `2h ≥ γ`, replaying the two-valued trial function
    /// `g = vol(S̄)` on `S`, `-vol(S)` off `S`, whose gap quotient sits
    /// between the two sides.
    pub fn upper(&self) -> Result<BoundCertificate> {
        let h = self.h();
        let gamma = self.gamma();
        let n = self.decomp.vertex_count();
        let mask = self.cheeger.argmin_cut.mask(n);
        let (_, vol_s, vol_c) = self.cut_problem.cut_parts(&mask);
        let g: Vec<f64> = mask
            .iter()
            .map(|&inside| if inside { vol_c } else { -vol_s })
            .collect();
        let trial =
            ground_weighted_gap_quotient(&self.decomp, &self.ground, &g, Orthogonality::Project)?;
        Ok(
            BoundCertificate::new("upper", "2h >= gamma", 2.0 * h, gamma)
                .input("h", h)
                .input("gamma", gamma)
                .input("trial_quotient", trial)
                .check(Check::new("trial quotient >= gamma", trial, gamma))
                .check(Check::new("2h >= trial quotient", 2.0 * h, trial))
                .finish(&self.decomp),
        )
    }

    /// `γ ≥ √(h² + Q²) - Q`, plus `√(h² + Q²) - Q ≥ h²/(2√(h² + Q²))`.
    pub fn lower_stoquastic(&self, mode: QMode) -> Result<BoundCertificate> {
        require_nonnegative_edges(&self.decomp.graph)?;
        let h = self.h();
        let gamma = self.gamma();
        let q = self.q_value(mode);
        let main = cheeger_lower(h, q.value);
        let weak = cheeger2_lower(h, q.value);
        let name = match mode {
            QMode::DegreeRelaxed => "lower_stoquastic",
            QMode::ExactExcited => "lower_stoquastic_exact_q",
        };
        Ok(
            BoundCertificate::new(name, "gamma >= sqrt(h^2+Q^2) - Q", gamma, main)
                .input("h", h)
                .input("gamma", gamma)
                .input("Q", q.value)
                .input("cheeger2_rhs", weak)
                .check(Check::new("gamma >= h^2/(2 sqrt(h^2+Q^2))", gamma, weak))
                .check(Check::new(
                    "sqrt(h^2+Q^2)-Q >= h^2/(2 sqrt(h^2+Q^2))",
                    main,
                    weak,
                ))
                .finish(&self.decomp),
        )
    }

    /// Replays the proof of the stoquastic lower bound with `f = φ₁/φ₀`,
    /// `g = max(f, 0)`, `ω = w φ₀φ₀` and the exact-excited `Q`.
    pub fn replay_cheeger_chain(&self) -> Result<Vec<Check>> {
        require_nonnegative_edges(&self.decomp.graph)?;
        let phi0 = &self.ground.phi;
        let phi1 = self.oriented_excited();
        let f: Vec<f64> = (0..phi0.len()).map(|u| phi1[u] / phi0[u]).collect();
        let q = self.q_value(QMode::ExactExcited).value;
        let gamma = self.gamma();
        let pieces = chain_pieces(&self.cut_problem, &f);
        let h = self.h();
        // Σ ω (g(u)+g(v))² = 2 Σ_S q f² φ₀² (W + d/q - λ₀) - Σ ω (Δg)².
        let d = self.decomp.graph.degrees();
        let qw = self.decomp.q_weights();
        let w = self.decomp.potential.values();
        let lambda0 = self.ground.lambda0;
        let mut s_weighted = 0.0;
        for u in 0..f.len() {
            if f[u] >= 0.0 {
                s_weighted +=
                    qw[u] * f[u] * f[u] * phi0[u] * phi0[u] * (w[u] + d[u] / qw[u] - lambda0);
            }
        }
        let sum_sq_identity = 2.0 * s_weighted - pieces.dirichlet;
        let bound = pieces.mass * (2.0 * gamma + 2.0 * q - pieces.phi);
        Ok(vec![
            Check::new("gamma >= Phi", gamma, pieces.phi),
            Check::new("Phi >= Cauchy-Schwarz ratio", pieces.phi, pieces.cs_ratio),
            Check::equal("sum w(g+g)^2 identity", sum_sq_identity, pieces.plus_sum),
            Check::new(
                "(2gamma+2Q-Phi) * mass >= sum w(g+g)^2",
                bound,
                pieces.plus_sum,
            ),
            Check::new(
                "coarea: sum w|g^2-g^2| >= h * mass",
                pieces.coarea,
                h * pieces.mass,
            ),
            Check::new(
                "Phi (2gamma+2Q-Phi) >= h^2",
                pieces.phi * (2.0 * gamma + 2.0 * q - pieces.phi),
                h * h,
            ),
            Check::new(
                "2Q gamma + gamma^2 >= h^2",
                2.0 * q * gamma + gamma * gamma,
                h * h,
            ),
        ])
    }

    /// Chain steps that hold for any nonnegative `g` whose support carries at
    /// most half of the `qφ²` mass: the `Σ ω (g+g)²` identity,
    /// Cauchy-Schwarz, the coarea bound and their composition.
    pub fn replay_test_vector_chain(&self, g: &[f64]) -> Result<Vec<Check>> {
        let n = self.decomp.vertex_count();
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
        if g.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidArgument(
                "test vector must be nonnegative".into(),
            ));
        }
        let mass = self.cut_problem.mass();
        let total: f64 = mass.iter().sum();
        let support: f64 = (0..n).filter(|&u| g[u] > 0.0).map(|u| mass[u]).sum();
        if support > total / 2.0 {
            return Err(Error::InvalidArgument(
                "test vector support carries more than half of the mass".into(),
            ));
        }
        let pieces = chain_pieces(&self.cut_problem, g);
        if !(pieces.mass > 0.0) {
            return Err(Error::ZeroVector);
        }
        let d = self.decomp.graph.degrees();
        let q = self.decomp.q_weights();
        let w = self.decomp.potential.values();
        let phi = &self.ground.phi;
        let lambda0 = self.ground.lambda0;
        let weighted: f64 = (0..n)
            .map(|u| q[u] * g[u] * g[u] * phi[u] * phi[u] * (w[u] + d[u] / q[u] - lambda0))
            .sum();
        let h = self.h();
        Ok(vec![
            Check::equal(
                "sum w(g+g)^2 identity",
                2.0 * weighted - pieces.dirichlet,
                pieces.plus_sum,
            ),
            Check::new("Phi >= Cauchy-Schwarz ratio", pieces.phi, pieces.cs_ratio),
            Check::new(
                "coarea: sum w|g^2-g^2| >= h * mass",
                pieces.coarea,
                h * pieces.mass,
            ),
            Check::new(
                "Phi >= h^2 mass / sum w(g+g)^2",
                pieces.phi,
                h * h * pieces.mass / pieces.plus_sum,
            ),
        ])
    }

    /// Both forms of the potential bound at eigen-index `level`.
    pub fn potential_bound(&self, level: usize) -> Result<BoundCertificate> {
        require_nonnegative_edges(&self.decomp.graph)?;
        let n = self.decomp.vertex_count();
        if level >= n {
            return Err(Error::VertexOutOfRange {
                vertex: level,
                vertex_count: n,
            });
        }
        let lambda = self.system.eigenvalues[level];
        let phi = self.decomp.to_q_weighted(&self.system.vector(level));
        let q = self.decomp.q_weights();
        let w = self.decomp.potential.values();
        let laplacian_only = self.decomp.without_potential();
        let s: Vec<usize> = (0..n).filter(|&u| phi[u] >= 0.0).collect();
        let c: Vec<usize> = (0..n).filter(|&u| phi[u] < 0.0).collect();

        let mut notes = Vec::new();
        let mut lemma = f64::NEG_INFINITY;
        let mut corollary = f64::NEG_INFINITY;
        let mut inputs = Vec::new();
        for (label, side) in [("S", &s), ("V-S", &c)] {
            let mass: f64 = side.iter().map(|&u| q[u] * phi[u] * phi[u]).sum();
            if side.is_empty() || mass <= 0.0 {
                notes.push(format!(
                    "{label} carries no mass; only the other side is certified"
                ));
                continue;
            }
            let (dirichlet, _) = dirichlet_ground(&laplacian_only, side)?;
            let pot: f64 = side
                .iter()
                .map(|&u| w[u] * q[u] * phi[u] * phi[u])
                .sum::<f64>()
                / mass;
            lemma = lemma.max(pot + dirichlet);
            corollary = corollary.max(pot);
            inputs.push((format!("dirichlet_{label}"), dirichlet));
            inputs.push((format!("potential_average_{label}"), pot));
        }
        let mut cert = BoundCertificate::new(
            "potential",
            "lambda_i >= max_S' avg_S'(W + lambda0^D(S'))",
            lambda,
            lemma,
        )
        .input("level", level as f64)
        .input("lambda", lambda)
        .input("corollary_rhs", corollary)
        .check(Check::new(
            "lambda_i >= max_S' avg_S'(W)",
            lambda,
            corollary,
        ))
        .check(Check::new("lemma rhs >= corollary rhs", lemma, corollary));
        for (k, v) in inputs {
            cert = cert.input(&k, v);
        }
        for note in notes {
            cert = cert.note(note);
        }
        Ok(cert.finish(&self.decomp))
    }

    /// `h_S ≥ λ₀^D(H, S) - λ₀(H)`.
    pub fn subgraph_bottleneck(&self, subset: &[usize]) -> Result<BoundCertificate> {
        require_nonnegative_edges(&self.decomp.graph)?;
        let n = self.decomp.vertex_count();
        let (dirichlet, _) = dirichlet_ground(&self.decomp, subset)?;
        let mut s: Vec<usize> = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        let lambda0 = self.ground.lambda0;
        let rhs = dirichlet - lambda0;
        let (h_s, note) = if s.len() == n {
            (0.0, Some("S = V: no boundary inside G, both sides vanish"))
        } else {
            (
                self.cut_problem.ratio(&Cut::new(n, s.iter().copied())?)?,
                None,
            )
        };
        let mut cert = BoundCertificate::new("subgraph", "h_S >= lambda0^D(S) - lambda0", h_s, rhs)
            .input("h_S", h_s)
            .input("dirichlet", dirichlet)
            .input("lambda0", lambda0);
        if let Some(note) = note {
            cert = cert.note(note);
        }
        Ok(cert.finish(&self.decomp))
    }

    /// `g ≤ h + λ₀ + εQ` with the minimal `ε` for the computed ground state.
    pub fn comparison(&self) -> Result<BoundCertificate> {
        require_nonnegative_edges(&self.decomp.graph)?;
        let n = self.decomp.vertex_count();
        let w_pot = self.decomp.potential.values();
        if let Some((u, &x)) = w_pot.iter().enumerate().find(|(_, x)| **x < 0.0) {
            return Err(Error::NegativePotentialUnsupported {
                vertex: u,
                value: x,
            });
        }
        let phi = &self.ground.phi;
        let d = self.decomp.graph.degrees();
        let mut epsilon: f64 = 0.0;
        for u in 0..n {
            let s: f64 = self
                .decomp
                .graph
                .neighbors(u)
                .iter()
                .map(|&(v, w)| w * (phi[u] - phi[v]).abs())
                .sum();
            if d[u] > 0.0 {
                epsilon = epsilon.max(2.0 * s / (d[u] * phi[u]));
            } else if s > 0.0 {
                epsilon = f64::INFINITY;
            }
        }
        let g = host_cheeger(&self.decomp)?;
        let h = self.h();
        let lambda0 = self.ground.lambda0;
        let q_value = degree_relaxed_q(self.decomp.kind, &self.decomp.graph);
        let rhs = h + lambda0 + epsilon * q_value;
        Ok(BoundCertificate::new("comparison", "h + lambda0 + eps Q >= g", rhs, g)
            .input("g", g)
            .input("h", h)
            .input("lambda0", lambda0)
            .input("epsilon", epsilon)
            .input("Q", q_value)
            .note(
                "g: host graph with an absorbing vertex of zero volume, boundary edges q_u W_u, \
                 volumes q_u of the original vertices",
            )
            .finish(&self.decomp))
    }
}

fn require_nonnegative_edges(graph: &SignedWeightedGraph) -> Result<()> {
    match graph.negative_edges().next() {
        Some((u, v, _)) => Err(Error::NotStoquastic(u, v)),
        None => Ok(()),
    }
}

/// Quantities along the Cauchy-Schwarz/coarea chain for `g = max(f, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainPieces {
    /// `Σ m g²`.
    pub mass: f64,
    /// `Σ ω (Δg)²`.
    pub dirichlet: f64,
    /// `Σ ω (g(u) + g(v))²`.
    pub plus_sum: f64,
    /// `Σ ω |g(u)² - g(v)²|`.
    pub coarea: f64,
    /// `Σ ω (Δg)² / Σ m g²`.
    pub phi: f64,
    /// `(Σ ω |Δg²|)² / (Σ m g² · Σ ω (g+g)²)`.
    pub cs_ratio: f64,
}

pub fn chain_pieces(problem: &CutProblem, f: &[f64]) -> ChainPieces {
    let g: Vec<f64> = f.iter().map(|&x| x.max(0.0)).collect();
    let m = problem.mass();
    let mass: f64 = (0..g.len()).map(|u| m[u] * g[u] * g[u]).sum();
    let mut dirichlet = 0.0;
    let mut plus_sum = 0.0;
    let mut coarea = 0.0;
    for &(u, v, w) in problem.edges() {
        dirichlet += w * (g[u] - g[v]).powi(2);
        plus_sum += w * (g[u] + g[v]).powi(2);
        coarea += w * (g[u] * g[u] - g[v] * g[v]).abs();
    }
    let phi = if mass > 0.0 { dirichlet / mass } else { 0.0 };
    let cs_ratio = if mass > 0.0 && plus_sum > 0.0 {
        coarea * coarea / (mass * plus_sum)
    } else {
        0.0
    };
    ChainPieces {
        mass,
        dirichlet,
        plus_sum,
        coarea,
        phi,
        cs_ratio,
    }
}

/// Host-graph Cheeger constant for the comparison theorem: original vertices
/// with volume `q_u`, one absorbing vertex of volume zero, boundary edges of
/// weight `q_u W_u`, and `φ ≡ 1`.
pub fn host_cheeger(decomp: &HamiltonianDecomposition) -> Result<f64> {
    let n = decomp.vertex_count();
    let q = decomp.q_weights();
    let mut edges = decomp.graph.edges().to_vec();
    for (u, &w) in decomp.potential.values().iter().enumerate() {
        if w != 0.0 {
            edges.push((u, n, q[u] * w));
        }
    }
    let mut mass = q;
    mass.push(0.0);
    let problem = CutProblem::new(n + 1, edges, mass)?;
    let opts = ExhaustiveOptions {
        limit: ExhaustiveOptions::default().limit + 1,
        record_ratios: false,
    };
    Ok(problem.exhaustive(opts)?.h)
}

/// Appendix-style replay for a signed graph: `f` minimizes the routed
/// `ω`-quotient, `g = max(f, 0)`, and the chain ends in
/// `Φ(2Q + 2ρ - Φ) ≥ h_routed²`.
fn replay_nonstoquastic_chain(
    analysis: &Analysis,
    routed: &CutProblem,
    h_routed: f64,
    q: f64,
    rho: f64,
) -> Result<Vec<Check>> {
    let n = routed.vertex_count();
    let m = routed.mass();
    let s: Vec<f64> = m.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for &(u, v, w) in routed.edges() {
        l[(u, u)] += w;
        l[(v, v)] += w;
        l[(u, v)] -= w;
        l[(v, u)] -= w;
    }
    let op = DMatrix::from_fn(n, n, |i, j| s[i] * l[(i, j)] * s[j]);
    let sys = eigendecompose(&op)?;
    let gamma_routed = sys.gap();
    let y: DVector<f64> = sys.vector(1);
    let mut f: Vec<f64> = (0..n).map(|u| y[u] * s[u]).collect();
    let total: f64 = m.iter().sum();
    let pos: f64 = (0..n).filter(|&u| f[u] >= 0.0).map(|u| m[u]).sum();
    if pos > total / 2.0 {
        f.iter_mut().for_each(|x| *x = -*x);
    }
    let p = chain_pieces(routed, &f);
    let gamma = analysis.gamma();
    Ok(vec![
        Check::new("gamma >= routed gap", gamma, gamma_routed),
        Check::new("routed gap >= Phi", gamma_routed, p.phi),
        Check::new("Phi >= Cauchy-Schwarz ratio", p.phi, p.cs_ratio),
        Check::new(
            "(2Q+2rho-Phi) * mass >= sum w(g+g)^2",
            p.mass * (2.0 * q + 2.0 * rho - p.phi),
            p.plus_sum,
        ),
        Check::new(
            "coarea: sum w|g^2-g^2| >= h_routed * mass",
            p.coarea,
            h_routed * p.mass,
        ),
        Check::new(
            "Phi (2Q+2rho-Phi) >= h_routed^2",
            p.phi * (2.0 * q + 2.0 * rho - p.phi),
            h_routed * h_routed,
        ),
    ])
}

/// `γ ≥ (Q + ρ) - √((Q + ρ)² - h_routed²)` for a real symmetric matrix with a
/// positive ground state, using a routing plan for its negative edges.
pub fn verify_lower_nonstoquastic(
    decomp: &HamiltonianDecomposition,
    plan: &RoutingPlan,
) -> Result<BoundCertificate> {
    verify_lower_nonstoquastic_with(&Analysis::new(decomp)?, plan)
}

pub fn verify_lower_nonstoquastic_with(
    analysis: &Analysis,
    plan: &RoutingPlan,
) -> Result<BoundCertificate> {
    let decomp = &analysis.decomp;
    let positive = positive_subgraph(&decomp.graph);
    if !positive.connected {
        return Err(Error::PositiveSubgraphDisconnected);
    }
    let opts = ExhaustiveOptions {
        limit: ExhaustiveOptions::default()
            .limit
            .max(decomp.vertex_count()),
        record_ratios: false,
    };
    let dc = distributed_cheeger_with(decomp, &analysis.ground, plan, opts)
        .map_err(|e| Error::RoutingInvalid(Box::new(e)))?;
    let h = dc.h_alpha;
    let rho = analysis.system.spread();
    let q = degree_relaxed_q(decomp.kind, &positive.graph);
    let gamma = analysis.gamma();
    let mut cert = match nonstoquastic_lower(h, q, rho) {
        Some(rhs) => BoundCertificate::new(
            "lower_nonstoquastic",
            "gamma >= (Q+rho) - sqrt((Q+rho)^2 - h_routed^2)",
            gamma,
            rhs,
        ),
        None => {
            let mut c =
                BoundCertificate::new("lower_nonstoquastic", "h_routed <= Q + rho", q + rho, h);
            c.holds = false;
            c.note("square-root domain violated: h_routed > Q + rho")
        }
    };
    cert = cert
        .input("gamma", gamma)
        .input("h_routed", h)
        .input("Q", q)
        .input("rho", rho)
        .input("epsilon", dc.routed.min_residual_ratio);
    let routed_problem = CutProblem::new(
        decomp.vertex_count(),
        dc.routed.graph.edges().to_vec(),
        analysis.cut_problem.mass().to_vec(),
    )?;
    for c in replay_nonstoquastic_chain(analysis, &routed_problem, h, q, rho)? {
        cert = cert.check(c);
    }
    Ok(cert.finish(decomp))
}

pub fn verify_upper(decomp: &HamiltonianDecomposition) -> Result<BoundCertificate> {
    Analysis::new(decomp)?.upper()
}

pub fn verify_lower_stoquastic(
    decomp: &HamiltonianDecomposition,
    mode: QMode,
) -> Result<BoundCertificate> {
    Analysis::new(decomp)?.lower_stoquastic(mode)
}

pub fn verify_potential_bound(
    decomp: &HamiltonianDecomposition,
    level: usize,
) -> Result<BoundCertificate> {
    Analysis::new(decomp)?.potential_bound(level)
}

pub fn verify_comparison(decomp: &HamiltonianDecomposition) -> Result<BoundCertificate> {
    Analysis::new(decomp)?.comparison()
}

pub fn verify_subgraph_bottleneck(
    decomp: &HamiltonianDecomposition,
    subset: &[usize],
) -> Result<BoundCertificate> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    Analysis::new(decomp)?.subgraph_bottleneck(subset)
}

/// Small-`h` expansion of the stoquastic lower bound:
/// `|(√(h²+Q²) - Q) - h²/(2Q)| ≤ h⁴/(8Q³) + 1e-12`.
pub fn expansion_check(h: f64, q: f64) -> Check {
    let exact = cheeger_lower(h, q);
    let deviation = (exact - h * h / (2.0 * q)).abs();
    let envelope = h.powi(4) / (8.0 * q.powi(3)) + 1e-12;
    Check {
        name: "expansion".into(),
        lhs: envelope,
        rhs: deviation,
        holds: deviation <= envelope,
    }
}
