//! Desk-scale simulator of the bashful adiabatic algorithm: Schrödinger
//! evolution along a linearly interpolated schedule, Cheeger estimation from
//! measurement samples, and checkpoint-by-checkpoint schedule refinement.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{cheeger_lower, degree_relaxed_q};
use crate::cheeger::{CutProblem, ExhaustiveOptions};
use crate::error::{Error, Result};
use crate::graph::{
    DiagonalPotential, HamiltonianDecomposition, LaplacianKind, SignedWeightedGraph,
};
use crate::spectral::eigendecompose;

/// `H(s) = (1 - s) H_init + s H_final` with a piecewise-linear map `t ↦ s`.
#[derive(Debug, Clone)]
pub struct Schedule {
    initial: HamiltonianDecomposition,
    final_: HamiltonianDecomposition,
    m_init: DMatrix<f64>,
    m_final: DMatrix<f64>,
    /// `(t, s)` pairs, strictly increasing in `s`, starting at `(0, 0)`.
    breakpoints: Vec<(f64, f64)>,
}

impl Schedule {
    /// Schedule with only the starting breakpoint; segments are appended
    /// with [`Schedule::push_segment`].
    pub fn open(
        initial: HamiltonianDecomposition,
        final_: HamiltonianDecomposition,
    ) -> Result<Self> {
        if initial.vertex_count() != final_.vertex_count() {
            return Err(Error::ScheduleMismatch(format!(
                "{} vs {} vertices",
                initial.vertex_count(),
                final_.vertex_count()
            )));
        }
        if initial.kind != final_.kind {
            return Err(Error::ScheduleMismatch("Laplacian kinds differ".into()));
        }
        if initial.graph.edges() != final_.graph.edges() {
            return Err(Error::ScheduleMismatch(
                "edge sets or weights differ".into(),
            ));
        }
        let m_init = initial.dense();
        let m_final = final_.dense();
        Ok(Self {
            initial,
            final_,
            m_init,
            m_final,
            breakpoints: vec![(0.0, 0.0)],
        })
    }

    /// Uniform-speed schedule of total time `total_time`.
    pub fn linear(
        initial: HamiltonianDecomposition,
        final_: HamiltonianDecomposition,
        total_time: f64,
    ) -> Result<Self> {
        let mut sched = Self::open(initial, final_)?;
        sched.push_segment(total_time, 1.0)?;
        Ok(sched)
    }

    pub fn initial(&self) -> &HamiltonianDecomposition {
        &self.initial
    }

    pub fn final_(&self) -> &HamiltonianDecomposition {
        &self.final_
    }

    pub fn vertex_count(&self) -> usize {
        self.initial.vertex_count()
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn total_time(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |b| b.0)
    }

    pub fn is_complete(&self) -> bool {
        self.breakpoints.last().is_some_and(|b| b.1 >= 1.0)
    }

    /// Appends a segment of duration `dt` advancing `s` by `ds`.
    pub fn push_segment(&mut self, dt: f64, ds: f64) -> Result<()> {
        let &(t, s) = self.breakpoints.last().expect("breakpoints start nonempty");
        if !(dt >= 0.0 && dt.is_finite()) || !(ds > 0.0) || s + ds > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "segment dt = {dt}, ds = {ds} from s = {s}"
            )));
        }
        let s_next = if s + ds >= 1.0 - 1e-12 { 1.0 } else { s + ds };
        self.breakpoints.push((t + dt, s_next));
        Ok(())
    }

    /// `s(t)`, clamped to the last breakpoint.
    pub fn s_at(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        if t <= 0.0 {
            return 0.0;
        }
        let i = bp.partition_point(|&(tb, _)| tb < t);
        if i == bp.len() {
            return bp[bp.len() - 1].1;
        }
        let ((t0, s0), (t1, s1)) = (bp[i - 1], bp[i]);
        if t1 == t0 {
            s1
        } else {
            s0 + (s1 - s0) * (t - t0) / (t1 - t0)
        }
    }

    /// Dense symmetric form of `H(s)`.
    pub fn hamiltonian(&self, s: f64) -> DMatrix<f64> {
        &self.m_init * (1.0 - s) + &self.m_final * s
    }

    /// `H_final - H_init`.
    pub fn difference(&self) -> DMatrix<f64> {
        &self.m_final - &self.m_init
    }

    /// `H(s)` as a decomposition: same graph, interpolated potential.
    pub fn decomposition(&self, s: f64) -> Result<HamiltonianDecomposition> {
        let w: Vec<f64> = self
            .initial
            .potential
            .values()
            .iter()
            .zip(self.final_.potential.values())
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect();
        HamiltonianDecomposition::new(
            self.initial.graph.clone(),
            self.initial.kind,
            DiagonalPotential(w),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub psi: DVector<Complex64>,
    pub time: f64,
    /// `|⟨φ₀(s(t)), ψ⟩|²`.
    pub fidelity_to_ground: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Bound on the leading local error `dt³/12 ‖[H, Ḣ]ψ‖` per step.
    pub step_tolerance: f64,
    pub max_halvings: u32,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            step_tolerance: 1e-7,
            max_halvings: 60,
        }
    }
}

/// `exp(-i M dt) ψ` via the eigendecomposition of `M`.
pub fn propagate(
    m: &DMatrix<f64>,
    dt: f64,
    psi: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    let sys = eigendecompose(m)?;
    let v = &sys.eigenvectors;
    let n = psi.len();
    let mut coeff = DVector::<Complex64>::zeros(n);
    for k in 0..n {
        let mut c = Complex64::new(0.0, 0.0);
        for u in 0..n {
            c += psi[u] * v[(u, k)];
        }
        coeff[k] = c * Complex64::from_polar(1.0, -sys.eigenvalues[k] * dt);
    }
    let mut out = DVector::<Complex64>::zeros(n);
    for u in 0..n {
        let mut c = Complex64::new(0.0, 0.0);
        for k in 0..n {
            c += coeff[k] * v[(u, k)];
        }
        out[u] = c;
    }
    Ok(out)
}

fn real_matvec(m: &DMatrix<f64>, psi: &DVector<Complex64>) -> DVector<Complex64> {
    let n = psi.len();
    DVector::from_fn(n, |i, _| (0..n).map(|j| psi[j] * m[(i, j)]).sum())
}

/// `|⟨φ₀(H), ψ⟩|²`.
pub fn ground_fidelity(m: &DMatrix<f64>, psi: &DVector<Complex64>) -> Result<f64> {
    let sys = eigendecompose(m)?;
    let phi = sys.vector(0);
    let overlap: Complex64 = (0..psi.len()).map(|u| psi[u] * phi[u]).sum();
    Ok(overlap.norm_sqr())
}

/// Integrates `i ψ' = H(s(t)) ψ` from `t_start` to `t_end` with
/// midpoint exponentials, never stepping across a breakpoint.
pub fn evolve(
    schedule: &Schedule,
    t_start: f64,
    t_end: f64,
    psi_in: &DVector<Complex64>,
    opts: EvolveOptions,
) -> Result<EvolutionState> {
    if psi_in.len() != schedule.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: schedule.vertex_count(),
            found: psi_in.len(),
        });
    }
    let norm = psi_in.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "initial state has norm {norm}"
        )));
    }
    if !(t_start <= t_end) {
        return Err(Error::InvalidArgument(format!(
            "t_start {t_start} > t_end {t_end}"
        )));
    }
    let diff = schedule.difference();
    let bp = schedule.breakpoints();
    let mut psi = psi_in.clone();
    let mut t = t_start;
    let mut steps = 0;
    let mut dt_guess = f64::INFINITY;
    // First breakpoint strictly after t.
    let mut idx = bp.partition_point(|&(tb, _)| tb <= t);
    while t < t_end {
        while idx < bp.len() && bp[idx].0 <= t {
            idx += 1;
        }
        // On a segment H is affine in t: H(t) = H(s0) + (t - t0) rate ΔH.
        let (t0, s0, seg_end, rate) = if idx == 0 || idx == bp.len() {
            (t, schedule.s_at(t), t_end, 0.0)
        } else {
            let ((t0, s0), (t1, s1)) = (bp[idx - 1], bp[idx]);
            (t0, s0, t1.min(t_end), (s1 - s0) / (t1 - t0))
        };
        let h_dot = &diff * rate;
        let span = seg_end - t;
        let mut dt = span.min(dt_guess * 2.0);
        let mut halvings = 0;
        loop {
            let mid = schedule.hamiltonian(s0 + (t + dt / 2.0 - t0) * rate);
            let err = if rate == 0.0 {
                0.0
            } else {
                let a = real_matvec(&mid, &real_matvec(&h_dot, &psi));
                let b = real_matvec(&h_dot, &real_matvec(&mid, &psi));
                dt.powi(3) / 12.0 * (a - b).norm()
            };
            if err <= opts.step_tolerance {
                psi = propagate(&mid, dt, &psi)?;
                break;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::StepTooLarge { t, step: dt });
            }
            dt /= 2.0;
        }
        steps += 1;
        dt_guess = if dt < span { dt } else { dt_guess.max(dt) };
        t = if dt >= span { seg_end } else { t + dt };
    }
    // No renormalization: the propagator is unitary and the norm is an
    // observable invariant.
    let fidelity = ground_fidelity(&schedule.hamiltonian(schedule.s_at(t_end)), &psi)?;
    Ok(EvolutionState {
        psi,
        time: t_end,
        fidelity_to_ground: fidelity,
        steps,
    })
}

/// Empirical measurement outcome: per-vertex counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Samples {
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Samples {
    pub fn from_draws(n: usize, draws: &[usize]) -> Result<Self> {
        let mut counts = vec![0; n];
        for &d in draws {
            if d >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: d,
                    vertex_count: n,
                });
            }
            counts[d] += 1;
        }
        Ok(Self {
            counts,
            total: draws.len(),
        })
    }

    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// Independent draws of vertex `u` with probability `|ψ(u)|²`.
pub fn sample_draws(psi: &DVector<Complex64>, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let probs: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| dist.sample(&mut rng)).collect())
}

pub fn sample_state(psi: &DVector<Complex64>, count: usize, seed: u64) -> Result<Samples> {
    Samples::from_draws(psi.len(), &sample_draws(psi, count, seed)?)
}

/// Additive smoothing for unseen vertices: `φ̂² = (count + β)/(N + βn)`.
pub const SMOOTHING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    SweepOnEmpirical,
    ExhaustiveOnEmpirical,
}

impl FromStr for EstimateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(Self::SweepOnEmpirical),
            "exhaustive" => Ok(Self::ExhaustiveOnEmpirical),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimate method {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HEstimate {
    pub h_hat: f64,
    pub cut: Vec<usize>,
    pub notes: Vec<String>,
}

/// Weighted Cheeger constant of the empirical ground state: `ω̂ = w φ̂φ̂`,
/// volumes `q φ̂²`, with `φ̂ = Q^{-1/2} √p̂` undoing the symmetric
/// similarity so that `q φ̂² = p̂`.
pub fn estimate_h_from_samples(
    decomp: &HamiltonianDecomposition,
    samples: &Samples,
    method: EstimateMethod,
) -> Result<HEstimate> {
    let n = decomp.vertex_count();
    if samples.counts.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: samples.counts.len(),
        });
    }
    if samples.total == 0 {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if samples.support_size() < 2 {
        return Err(Error::AllMassOneVertex);
    }
    let q = decomp.q_weights();
    let denom = samples.total as f64 + SMOOTHING * n as f64;
    let p: Vec<f64> = samples
        .counts
        .iter()
        .map(|&c| (c as f64 + SMOOTHING) / denom)
        .collect();
    let phi: Vec<f64> = (0..n).map(|u| (p[u] / q[u]).sqrt()).collect();
    let edges = decomp
        .graph
        .edges()
        .iter()
        .map(|&(u, v, w)| (u, v, w * phi[u] * phi[v]))
        .collect();
    let problem = CutProblem::new(n, edges, p)?;
    let mut notes = Vec::new();
    let unseen = n - samples.support_size();
    if unseen > 0 {
        notes.push(format!(
            "{unseen} unseen vertices smoothed with beta = {SMOOTHING}"
        ));
    }
    notes.push(format!("N = {}", samples.total));
    let report = match method {
        EstimateMethod::ExhaustiveOnEmpirical => problem.exhaustive(ExhaustiveOptions::default())?,
        EstimateMethod::SweepOnEmpirical => {
            notes.push(
                "sweep over the empirical Fiedler ordering; an upper estimate of the empirical h"
                    .into(),
            );
            problem.sweep(&problem.spectral_ordering()?)?
        }
    };
    Ok(HEstimate {
        h_hat: report.h,
        cut: report.argmin_cut.vertices().to_vec(),
        notes,
    })
}

/// Largest singular value of a symmetric matrix.
fn symmetric_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigendecompose(m)?.spectral_norm())
}

/// `max(0, γ̂ - 2‖H_next - H_now‖₂)`: Weyl moves every eigenvalue by at
/// most `‖ΔH‖₂`, so the gap moves by at most twice that.
pub fn weyl_step(gamma_now: f64, h_now: &DMatrix<f64>, h_next: &DMatrix<f64>) -> Result<f64> {
    if h_now.shape() != h_next.shape() {
        return Err(Error::DimensionMismatch {
            expected: h_now.nrows(),
            found: h_next.nrows(),
        });
    }
    let norm = symmetric_norm(&(h_next - h_now))?;
    Ok((gamma_now - 2.0 * norm).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaaOptions {
    pub gamma_min: f64,
    pub samples: usize,
    /// Target for `‖dH/dt‖ / bound²`.
    pub theta: f64,
    /// Fraction of the estimated gap the Weyl step may consume.
    pub kappa: f64,
    pub max_delta_tau: f64,
    pub max_checkpoints: usize,
    pub method: EstimateMethod,
    pub seed: u64,
    #[serde(skip)]
    pub evolve: EvolveOptions,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

impl Default for BaaOptions {
    fn default() -> Self {
        Self {
            gamma_min: 1e-9,
            samples: 10_000,
            theta: 0.1,
            kappa: 0.5,
            max_delta_tau: 0.05,
            max_checkpoints: 100_000,
            method: EstimateMethod::ExhaustiveOnEmpirical,
            seed: DEFAULT_SEED,
            evolve: EvolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    /// Schedule parameter `s` reached so far.
    pub tau: f64,
    /// Physical time at which `tau` is reached.
    pub time: f64,
    pub h_hat: f64,
    /// `√(ĥ² + Q²) - Q`.
    pub gap_estimate: f64,
    /// Weyl-extrapolated lower bound used on `[tau, tau + delta_tau]`.
    pub gap_bound: f64,
    pub delta_tau: f64,
    pub delta_t: f64,
    pub samples: usize,
    /// Ground-state fidelity of the evolved state at `tau`.
    pub fidelity: f64,
    /// Exact gap of `H(tau)`, for diagnostics only; the algorithm never reads it.
    pub true_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaaRun {
    pub checkpoints: Vec<Checkpoint>,
    pub q: f64,
    pub final_fidelity: f64,
    pub total_time: f64,
    /// `Σ_k N t_k`: every checkpoint restarts `N` copies from `t = 0`.
    pub cost: f64,
    pub completed: bool,
    pub options: BaaOptions,
}

impl BaaRun {
    pub fn min_delta_tau(&self) -> Option<(usize, f64)> {
        self.checkpoints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.delta_tau > 0.0)
            .min_by(|a, b| a.1.delta_tau.total_cmp(&b.1.delta_tau))
            .map(|(i, c)| (i, c.delta_tau))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,h_hat,gap_bound,delta_tau,fidelity\n");
        for c in &self.checkpoints {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?}",
                c.tau, c.h_hat, c.gap_bound, c.delta_tau, c.fidelity
            );
        }
        out
    }
}

/// Runs the checkpoint loop: estimate `ĥ` from samples of the evolved state,
/// turn it into a gap estimate, extend the schedule by a Weyl-safe `δτ`
/// travelled at the speed allowed by the adiabatic condition, and advance.
///
/// Each refinement only appends to the schedule, so the prefix evolution is
/// identical across restarts; the state is carried forward while the cost
/// still charges a full restart per checkpoint.
pub fn run_baa(
    initial: &HamiltonianDecomposition,
    final_: &HamiltonianDecomposition,
    opts: BaaOptions,
) -> Result<BaaRun> {
    if opts.samples == 0
        || !(opts.theta > 0.0)
        || !(opts.kappa > 0.0 && opts.kappa < 1.0)
        || !(opts.max_delta_tau > 0.0)
    {
        return Err(Error::InvalidArgument(
            "samples, theta, kappa and max_delta_tau must be positive, kappa < 1".into(),
        ));
    }
    let mut schedule = Schedule::open(initial.clone(), final_.clone())?;
    let diff_norm = symmetric_norm(&schedule.difference())?;
    let q = degree_relaxed_q(initial.kind, &initial.graph);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let start = eigendecompose(&schedule.hamiltonian(0.0))?;
    let mut psi: DVector<Complex64> = start.vector(0).map(|x| Complex64::new(x, 0.0));
    let mut run = BaaRun {
        checkpoints: Vec::new(),
        q,
        final_fidelity: 0.0,
        total_time: 0.0,
        cost: 0.0,
        completed: false,
        options: opts,
    };
    let (mut s, mut t) = (0.0f64, 0.0f64);
    while s < 1.0 {
        if run.checkpoints.len() >= opts.max_checkpoints {
            return Err(Error::CheckpointLimit(opts.max_checkpoints));
        }
        let h_now = schedule.hamiltonian(s);
        let sys = eigendecompose(&h_now)?;
        let phi0 = sys.vector(0);
        let overlap: Complex64 = (0..psi.len()).map(|u| psi[u] * phi0[u]).sum();
        let fidelity = overlap.norm_sqr();

        let samples = sample_state(&psi, opts.samples, rng.next_u64())?;
        let estimate = estimate_h_from_samples(&schedule.decomposition(s)?, &samples, opts.method)?;
        let gamma_hat = cheeger_lower(estimate.h_hat, q);
        let delta_tau = if diff_norm == 0.0 {
            1.0 - s
        } else {
            (opts.kappa * gamma_hat / (2.0 * diff_norm))
                .min(opts.max_delta_tau)
                .min(1.0 - s)
        };
        let h_next = schedule.hamiltonian(s + delta_tau);
        // The Weyl step always reserves at least the fraction kappa of the
        // estimate, also when delta_tau is capped, as a margin for sampling
        // error in h_hat.
        let bound = weyl_step(gamma_hat, &h_now, &h_next)?.min((1.0 - opts.kappa) * gamma_hat);
        let delta_t = if diff_norm == 0.0 || bound <= 0.0 {
            0.0
        } else {
            delta_tau * diff_norm / (opts.theta * bound * bound)
        };
        run.cost += opts.samples as f64 * t;
        run.checkpoints.push(Checkpoint {
            tau: s,
            time: t,
            h_hat: estimate.h_hat,
            gap_estimate: gamma_hat,
            gap_bound: bound,
            delta_tau,
            delta_t,
            samples: opts.samples,
            fidelity,
            true_gap: sys.gap(),
        });
        if bound < opts.gamma_min || delta_tau <= 0.0 {
            run.total_time = t;
            run.final_fidelity = fidelity;
            return Err(Error::GapCollapse {
                bound,
                gamma_min: opts.gamma_min,
                tau: s,
                run: Box::new(run),
            });
        }
        schedule.push_segment(delta_t, delta_tau)?;
        let state = evolve(&schedule, t, t + delta_t, &psi, opts.evolve)?;
        psi = state.psi;
        t += delta_t;
        s = schedule.breakpoints().last().unwrap().1;
    }
    run.total_time = t;
    run.final_fidelity = ground_fidelity(&schedule.hamiltonian(1.0), &psi)?;
    run.completed = true;
    Ok(run)
}

/// Named schedule families for experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Two vertices, weak edge, potentials crossing at `s = 1/2`.
    TwoLevel,
    /// Eight-vertex path with barrier potentials between the two ends.
    Path,
    /// `H_init = H_final`.
    Constant,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-level" => Ok(Self::TwoLevel),
            "path" => Ok(Self::Path),
            "constant" => Ok(Self::Constant),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

impl Family {
    pub fn endpoints(self) -> Result<(HamiltonianDecomposition, HamiltonianDecomposition)> {
        match self {
            Family::TwoLevel => two_level_crossing(0.1),
            Family::Path => path_bottleneck(8, 0.1, 1.0, 0.3),
            Family::Constant => {
                let d = HamiltonianDecomposition::new(
                    SignedWeightedGraph::path(3)?,
                    LaplacianKind::Combinatorial,
                    vec![0.0, 1.0, 2.0].into(),
                )?;
                Ok((d.clone(), d))
            }
        }
    }

    /// Value of `s` where the exact gap is smallest (both families are
    /// mirror-symmetric about the midpoint).
    pub fn crossing(self) -> Option<f64> {
        match self {
            Family::TwoLevel | Family::Path => Some(0.5),
            Family::Constant => None,
        }
    }
}

/// `K₂` with edge weight `coupling`, `W` going from `(0, 2)` to `(2, 0)`.
/// The gap is `√((2 - 4s)² + 4 coupling²)`, smallest at `s = 1/2`.
pub fn two_level_crossing(
    coupling: f64,
) -> Result<(HamiltonianDecomposition, HamiltonianDecomposition)> {
    let g = SignedWeightedGraph::from_edges(2, [(0, 1, coupling)])?;
    let a = HamiltonianDecomposition::new(
        g.clone(),
        LaplacianKind::Combinatorial,
        vec![0.0, 2.0].into(),
    )?;
    let b = HamiltonianDecomposition::new(g, LaplacianKind::Combinatorial, vec![2.0, 0.0].into())?;
    Ok((a, b))
}

/// Barrier potential on the path `u₁ … u_n`: `c/x, x/c, 1, …, 1, 1/c, c`.
pub fn bottleneck_potential(n: usize, c: f64, x: f64) -> Result<Vec<f64>> {
    if n < 4 || !(c > 0.0) || !(x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bottleneck needs n >= 4, c > 0, x > 0 (n = {n}, c = {c}, x = {x})"
        )));
    }
    let mut w = vec![1.0; n];
    w[0] = c / x;
    w[1] = x / c;
    w[n - 2] = 1.0 / c;
    w[n - 1] = c;
    Ok(w)
}

/// Path with the barrier potential plus `shift` on the far end initially and
/// on the near end finally, so the ground state tunnels through the barrier
/// around `s = 1/2`.
pub fn path_bottleneck(
    n: usize,
    c: f64,
    x: f64,
    shift: f64,
) -> Result<(HamiltonianDecomposition, HamiltonianDecomposition)> {
    let base = bottleneck_potential(n, c, x)?;
    let g = SignedWeightedGraph::path(n)?;
    let mut w_init = base.clone();
    w_init[n - 1] += shift;
    let mut w_final = base;
    w_final[0] += shift;
    Ok((
        HamiltonianDecomposition::new(g.clone(), LaplacianKind::Combinatorial, w_init.into())?,
        HamiltonianDecomposition::new(g, LaplacianKind::Combinatorial, w_final.into())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit(v: &[f64]) -> DVector<Complex64> {
        let d = DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)));
        let n = d.norm();
        d / Complex64::new(n, 0.0)
    }

    #[test]
    fn stationary_state_keeps_its_overlap() {
        let (a, _) = two_level_crossing(0.3).unwrap();
        let sched = Schedule::linear(a.clone(), a.clone(), 7.0).unwrap();
        let phi = eigendecompose(&a.dense()).unwrap().vector(1);
        let psi = unit(phi.as_slice());
        let out = evolve(&sched, 0.0, 7.0, &psi, EvolveOptions::default()).unwrap();
        let overlap: Complex64 = (0..2).map(|u| out.psi[u].conj() * psi[u]).sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn quench_is_identity() {
        let (a, b) = two_level_crossing(0.1).unwrap();
        let sched = Schedule::linear(a, b, 0.0).unwrap();
        let psi = unit(&[0.6, 0.8]);
        let out = evolve(&sched, 0.0, 0.0, &psi, EvolveOptions::default()).unwrap();
        assert_eq!(out.psi, psi);
    }

    #[test]
    fn concentrated_state_samples_one_vertex() {
        let psi = unit(&[0.0, 1.0, 0.0]);
        let s = sample_state(&psi, 100, 1).unwrap();
        assert_eq!(s.counts, vec![0, 100, 0]);
        assert_eq!(
            sample_draws(&unit(&[1.0, 1.0, 1.0]), 50, 9).unwrap(),
            sample_draws(&unit(&[1.0, 1.0, 1.0]), 50, 9).unwrap()
        );
    }

    #[test]
    fn uniform_k2_estimate_is_one() {
        let d = HamiltonianDecomposition::laplacian_only(
            SignedWeightedGraph::path(2).unwrap(),
            LaplacianKind::Combinatorial,
        )
        .unwrap();
        let s = Samples {
            counts: vec![500, 500],
            total: 1000,
        };
        let est = estimate_h_from_samples(&d, &s, EstimateMethod::ExhaustiveOnEmpirical).unwrap();
        assert_abs_diff_eq!(est.h_hat, 1.0, epsilon = 1e-12);
        let one = Samples {
            counts: vec![1, 0],
            total: 1,
        };
        assert!(matches!(
            estimate_h_from_samples(&d, &one, EstimateMethod::SweepOnEmpirical),
            Err(Error::AllMassOneVertex)
        ));
    }

    #[test]
    fn weyl_examples() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 2.0]);
        assert_eq!(weyl_step(0.7, &h, &h).unwrap(), 0.7);
        let shifted = &h + DMatrix::identity(2, 2) * 0.1;
        assert_abs_diff_eq!(weyl_step(0.7, &h, &shifted).unwrap(), 0.5, epsilon = 1e-12);
        assert!(matches!(
            weyl_step(0.7, &h, &DMatrix::zeros(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constant_schedule_single_pass() {
        let (a, b) = Family::Constant.endpoints().unwrap();
        let run = run_baa(&a, &b, BaaOptions::default()).unwrap();
        assert_eq!(run.checkpoints.len(), 1);
        assert_abs_diff_eq!(run.final_fidelity, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schedule_rejects_mismatched_graphs() {
        let (a, _) = two_level_crossing(0.1).unwrap();
        let (_, b) = two_level_crossing(0.2).unwrap();
        assert!(matches!(
            Schedule::open(a, b),
            Err(Error::ScheduleMismatch(_))
        ));
    }

    #[test]
    fn csv_header() {
        let (a, b) = Family::Constant.endpoints().unwrap();
        let run = run_baa(&a, &b, BaaOptions::default()).unwrap();
        let csv = run.to_csv();
        assert!(csv.starts_with("tau,h_hat,gap_bound,delta_tau,fidelity\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
