//! Weighted Cheeger constants: per-cut ratios, exhaustive and sweep minima,
//! and the functional (median) characterization.
//!
//! Every routine works on a [`CutProblem`]: edge weights `ω_uv` and vertex
//! masses `m_u`, with ratio `Σ_{∂S} ω / min(m(S), m(S̄))`. The ground-state
//! weighted constant uses `ω = w_uv φ(u)φ(v)` and `m = q_u φ(u)^2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::HamiltonianDecomposition;
use crate::spectral::{eigendecompose, GroundState};

pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 24;
const HARD_LIMIT: usize = 30;
/// Relative tolerance under which two cut ratios count as tied.
const TIE_TOL: f64 = 1e-12;

/// A proper nonempty vertex subset `S`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cut {
    vertices: Vec<usize>,
}

impl Cut {
    pub fn new(vertex_count: usize, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if let Some(&bad) = v.iter().find(|&&u| u >= vertex_count) {
            return Err(Error::VertexOutOfRange {
                vertex: bad,
                vertex_count,
            });
        }
        if v.is_empty() || v.len() == vertex_count {
            return Err(Error::ImproperCut);
        }
        Ok(Self { vertices: v })
    }

    fn from_mask(vertex_count: usize, mask: &[bool]) -> Self {
        Self {
            vertices: (0..vertex_count).filter(|&u| mask[u]).collect(),
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn contains(&self, u: usize) -> bool {
        self.vertices.binary_search(&u).is_ok()
    }

    pub fn mask(&self, vertex_count: usize) -> Vec<bool> {
        let mut m = vec![false; vertex_count];
        for &u in &self.vertices {
            m[u] = true;
        }
        m
    }

    pub fn complement(&self, vertex_count: usize) -> Self {
        let mask = self.mask(vertex_count);
        Self {
            vertices: (0..vertex_count).filter(|&u| !mask[u]).collect(),
        }
    }

    /// Representative containing vertex 0; `S` and `S̄` give the same ratio.
    pub fn canonical(&self, vertex_count: usize) -> Self {
        if self.contains(0) {
            self.clone()
        } else {
            self.complement(vertex_count)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerMethod {
    Exhaustive,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRatio {
    pub cut: Vec<usize>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerReport {
    pub h: f64,
    pub argmin_cut: Cut,
    pub method: CheegerMethod,
    /// Every examined cut with its ratio, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<CutRatio>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveOptions {
    pub limit: usize,
    pub record_ratios: bool,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_EXHAUSTIVE_LIMIT,
            record_ratios: false,
        }
    }
}

/// Edge weights and vertex masses defining a Cheeger ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct CutProblem {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
    mass: Vec<f64>,
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

impl CutProblem {
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize, f64)>,
        mass: Vec<f64>,
    ) -> Result<Self> {
        if vertex_count < 2 {
            return Err(Error::ImproperCut);
        }
        if mass.len() != vertex_count {
            return Err(Error::DimensionMismatch {
                expected: vertex_count,
                found: mass.len(),
            });
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v, w) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::VertexOutOfRange {
                    vertex: u.max(v),
                    vertex_count,
                });
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        Ok(Self {
            vertex_count,
            edges,
            adjacency,
            mass,
        })
    }

    /// `ω = w_uv φ(u)φ(v)`, `m = q_u φ(u)^2`.
    pub fn ground_weighted(
        decomp: &HamiltonianDecomposition,
        ground: &GroundState,
    ) -> Result<Self> {
        let n = decomp.vertex_count();
        let phi = &ground.phi;
        if phi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phi.len(),
            });
        }
        let q = decomp.q_weights();
        let edges = decomp
            .graph
            .edges()
            .iter()
            .map(|&(u, v, w)| (u, v, w * phi[u] * phi[v]))
            .collect();
        let mass = (0..n).map(|u| q[u] * phi[u] * phi[u]).collect();
        Self::new(n, edges, mass)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// `(|∂S|, m(S), m(S̄))`.
    pub fn cut_parts(&self, mask: &[bool]) -> (f64, f64, f64) {
        let boundary = self
            .edges
            .iter()
            .filter(|&&(u, v, _)| mask[u] != mask[v])
            .map(|e| e.2)
            .sum();
        let mut vol = 0.0;
        let mut rest = 0.0;
        for (&inside, &m) in mask.iter().zip(&self.mass) {
            if inside {
                vol += m;
            } else {
                rest += m;
            }
        }
        (boundary, vol, rest)
    }

    pub fn ratio(&self, cut: &Cut) -> Result<f64> {
        let (b, vs, vc) = self.cut_parts(&cut.mask(self.vertex_count));
        let denom = vs.min(vc);
        if !(denom > 0.0) {
            return Err(Error::ZeroDenominator);
        }
        Ok(b / denom)
    }

    /// Global minimum over all `2^(n-1) - 1` cut classes, walked in Gray-code
    /// order with incremental boundary and volume updates. The winner is
    /// re-evaluated from scratch; ties go to the lexicographically smallest
    /// `S`, and the representative always contains vertex 0.
    pub fn exhaustive(&self, opts: ExhaustiveOptions) -> Result<CheegerReport> {
        let n = self.vertex_count;
        let limit = opts.limit.min(HARD_LIMIT);
        if n > limit {
            return Err(Error::TooLarge {
                vertex_count: n,
                limit,
            });
        }
        // Every quantity is read from subset-sum tables over the two halves of
        // the vertex set, so each is a sum of nonnegative terms. Running
        // add/subtract updates lose tiny volumes to cancellation.
        let lo_bits = n / 2;
        let hi_bits = n - lo_bits;
        let lo_mask = (1usize << lo_bits) - 1;
        let hi_mask = (1usize << hi_bits) - 1;
        let mass_lo = subset_sums(lo_bits, |i| self.mass[i]);
        let mass_hi = subset_sums(hi_bits, |i| self.mass[lo_bits + i]);
        let mut weight = vec![vec![0.0; n]; n];
        for &(u, v, w) in &self.edges {
            weight[u][v] += w;
            weight[v][u] += w;
        }
        // out_lo[u][x]: weight from u into the low-half vertices in x.
        let out_lo: Vec<Vec<f64>> = (0..n)
            .map(|u| subset_sums(lo_bits, |i| weight[u][i]))
            .collect();
        let out_hi: Vec<Vec<f64>> = (0..n)
            .map(|u| subset_sums(hi_bits, |i| weight[u][lo_bits + i]))
            .collect();

        let mut best = f64::INFINITY;
        let mut candidates: Vec<Vec<bool>> = Vec::new();
        let mut ratios = opts.record_ratios.then(Vec::new);
        let all = (1usize << n) - 1;
        let mut members = Vec::with_capacity(n);

        // Vertex 0 is always in S, which enumerates each cut once.
        for m in (1..all).step_by(2) {
            let (s_lo, s_hi) = (m & lo_mask, m >> lo_bits);
            let (c_lo, c_hi) = (!s_lo & lo_mask, !s_hi & hi_mask);
            let vol = mass_lo[s_lo] + mass_hi[s_hi];
            let rest = mass_lo[c_lo] + mass_hi[c_hi];
            let denom = vol.min(rest);
            if !(denom > 0.0) {
                continue;
            }
            members.clear();
            members.extend((0..n).filter(|&u| (m >> u) & 1 == 1));
            let boundary: f64 = members
                .iter()
                .map(|&u| out_lo[u][c_lo] + out_hi[u][c_hi])
                .sum();
            let r = boundary / denom;
            let in_s = || (0..n).map(|u| (m >> u) & 1 == 1).collect::<Vec<bool>>();
            if let Some(list) = ratios.as_mut() {
                list.push(CutRatio {
                    cut: members.clone(),
                    ratio: r,
                });
            }
            // Keep everything near the running best for exact re-evaluation.
            if r < best - 1e-9 * best.abs() {
                best = r;
                candidates.retain(|c| {
                    let (b, a, c) = self.cut_parts(c);
                    b / a.min(c) <= r + 1e-9 * r.abs()
                });
                candidates.push(in_s());
            } else if r <= best + 1e-9 * best.abs() {
                best = best.min(r);
                if candidates.len() < 4096 {
                    candidates.push(in_s());
                }
            }
        }
        if candidates.is_empty() {
            return Err(Error::ZeroDenominator);
        }
        let (h, cut) = self.pick(candidates);
        if let Some(list) = ratios.as_mut() {
            list.sort_by(|a, b| a.cut.cmp(&b.cut));
        }
        Ok(CheegerReport {
            h,
            argmin_cut: cut,
            method: CheegerMethod::Exhaustive,
            ratios,
        })
    }

    fn pick(&self, candidates: Vec<Vec<bool>>) -> (f64, Cut) {
        let n = self.vertex_count;
        let mut scored: Vec<(f64, Cut)> = candidates
            .iter()
            .map(|m| {
                let (b, a, c) = self.cut_parts(m);
                (b / a.min(c), Cut::from_mask(n, m).canonical(n))
            })
            .collect();
        let min = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        scored.retain(|s| ties(s.0, min) || s.0 == min);
        scored.sort_by(|a, b| a.1.cmp(&b.1));
        scored.swap_remove(0)
    }

    /// Minimum over the `n - 1` prefix cuts of `ordering` (ascending, ties by
    /// vertex id). Always an upper bound on the exhaustive minimum.
    pub fn sweep(&self, ordering: &[f64]) -> Result<CheegerReport> {
        let n = self.vertex_count;
        if ordering.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ordering.len(),
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| ordering[a].total_cmp(&ordering[b]).then(a.cmp(&b)));
        let mut mask = vec![false; n];
        let mut candidates = Vec::new();
        let mut best = f64::INFINITY;
        for &v in order.iter().take(n - 1) {
            mask[v] = true;
            let (b, a, c) = self.cut_parts(&mask);
            let denom = a.min(c);
            if !(denom > 0.0) {
                continue;
            }
            let r = b / denom;
            if best.is_infinite() || (r < best && !ties(r, best)) {
                best = r;
                candidates.clear();
                candidates.push(mask.clone());
            } else if ties(r, best) {
                candidates.push(mask.clone());
            }
        }
        if candidates.is_empty() {
            return Err(Error::ZeroDenominator);
        }
        let (h, cut) = self.pick(candidates);
        Ok(CheegerReport {
            h,
            argmin_cut: cut,
            method: CheegerMethod::Sweep,
            ratios: None,
        })
    }

    /// Second eigenvector of `M^{-1/2} L_ω M^{-1/2}` mapped back by `M^{-1/2}`.
    pub fn spectral_ordering(&self) -> Result<Vec<f64>> {
        let n = self.vertex_count;
        if let Some(u) = self.mass.iter().position(|m| !(*m > 0.0)) {
            return Err(Error::ZeroAmplitude {
                vertex: u,
                value: self.mass[u],
            });
        }
        let s: Vec<f64> = self.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let mut l = DMatrix::<f64>::zeros(n, n);
        for &(u, v, w) in &self.edges {
            l[(u, u)] += w;
            l[(v, v)] += w;
            l[(u, v)] -= w;
            l[(v, u)] -= w;
        }
        let op = DMatrix::from_fn(n, n, |i, j| s[i] * l[(i, j)] * s[j]);
        let sys = eigendecompose(&op)?;
        let y: DVector<f64> = sys.vector(1);
        Ok((0..n).map(|u| y[u] * s[u]).collect())
    }

    /// `Σ ω |f(u) - f(v)| / Σ m_u |f(u) - C|` with `C` the `m`-weighted median
    /// of `f`, which minimizes the denominator.
    pub fn functional_ratio(&self, f: &[f64]) -> Result<f64> {
        let n = self.vertex_count;
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.len(),
            });
        }
        let c = weighted_median(f, &self.mass);
        let denom: f64 = (0..n).map(|u| self.mass[u] * (f[u] - c).abs()).sum();
        if f.iter().all(|&x| x == f[0]) {
            return Err(Error::ConstantFunction);
        }
        if !(denom > 0.0) {
            return Err(Error::ZeroDenominator);
        }
        let numer: f64 = self
            .edges
            .iter()
            .map(|&(u, v, w)| w * (f[u] - f[v]).abs())
            .sum();
        Ok(numer / denom)
    }
}

/// Table of sums of `value(i)` over the set bits of every `bits`-wide mask.
fn subset_sums(bits: usize, value: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut sums = vec![0.0; 1 << bits];
    for x in 1..sums.len() {
        let low = x.trailing_zeros() as usize;
        sums[x] = sums[x & (x - 1)] + value(low);
    }
    sums
}

/// Weighted median of `f` under `mass`; when the cumulative mass hits exactly
/// one half, the midpoint of the bracketing values.
pub fn weighted_median(f: &[f64], mass: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let total: f64 = mass.iter().sum();
    let half = total / 2.0;
    let mut cum = 0.0;
    for (k, &u) in order.iter().enumerate() {
        cum += mass[u];
        if cum >= half {
            let exact = (cum - half).abs() <= 1e-14 * total;
            if exact && k + 1 < order.len() {
                return 0.5 * (f[u] + f[order[k + 1]]);
            }
            return f[u];
        }
    }
    f[order[order.len() - 1]]
}

/// `h_S = Σ_{∂S} w φφ / min(vol S, vol S̄)` with `vol = Σ q φ²`.
pub fn cut_ratio(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    cut: &Cut,
) -> Result<f64> {
    CutProblem::ground_weighted(decomp, ground)?.ratio(cut)
}

pub fn cheeger_exhaustive(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
) -> Result<CheegerReport> {
    cheeger_exhaustive_with(decomp, ground, ExhaustiveOptions::default())
}

pub fn cheeger_exhaustive_with(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    opts: ExhaustiveOptions,
) -> Result<CheegerReport> {
    CutProblem::ground_weighted(decomp, ground)?.exhaustive(opts)
}

/// Sweep over `ordering`, or over the second eigenvector of the
/// ground-weighted operator when `None`.
pub fn cheeger_sweep(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    ordering: Option<&[f64]>,
) -> Result<CheegerReport> {
    let p = CutProblem::ground_weighted(decomp, ground)?;
    match ordering {
        Some(o) => p.sweep(o),
        None => {
            let o = p.spectral_ordering()?;
            p.sweep(&o)
        }
    }
}

pub fn functional_ratio(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    f: &[f64],
) -> Result<f64> {
    CutProblem::ground_weighted(decomp, ground)?.functional_ratio(f)
}
