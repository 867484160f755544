//! Stoquasticity via cycle signatures, the diagonal stoquastizing unitary, and
//! the pointwise phase rotation that maps a Hermitian matrix to a real one.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Modulus and argument tolerance for "signature equals 1".
pub const PHASE_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix with `H = H†` (relative tolerance `1e-12`).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(bad) = m.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(if bad.re.is_finite() {
                bad.im
            } else {
                bad.re
            }));
        }
        let scale = m.iter().fold(1.0f64, |a, z| a.max(z.norm()));
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if worst > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(worst));
        }
        Ok(Self(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Real part, if every imaginary part is zero.
    pub fn as_real(&self) -> Option<DMatrix<f64>> {
        self.0
            .iter()
            .all(|z| z.im == 0.0)
            .then(|| self.0.map(|z| z.re))
    }
}

/// `Θ = H / |H|` off the diagonal, zero where `H_uv = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePattern(DMatrix<Complex64>);

impl PhasePattern {
    pub fn of(h: &HermitianMatrix) -> Self {
        let m = h.matrix();
        let n = m.nrows();
        Self(DMatrix::from_fn(n, n, |i, j| {
            let z = m[(i, j)];
            if i == j || z.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z / z.norm()
            }
        }))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `∏_k (-Θ_{k, next(k)})` around a closed cycle.
///
/// The cycle is given as its vertex sequence; a repeated first vertex at the
/// end is accepted and ignored.
pub fn cycle_signature(pattern: &PhasePattern, cycle: &[usize]) -> Result<Complex64> {
    let mut c = cycle;
    if c.len() > 1 && c.first() == c.last() {
        c = &c[..c.len() - 1];
    }
    if c.len() < 2 {
        return Err(Error::InvalidArgument(
            "a cycle needs at least two vertices".into(),
        ));
    }
    let n = pattern.dim();
    let mut sig = Complex64::new(1.0, 0.0);
    for k in 0..c.len() {
        let (a, b) = (c[k], c[(k + 1) % c.len()]);
        if a >= n || b >= n {
            return Err(Error::VertexOutOfRange {
                vertex: a.max(b),
                vertex_count: n,
            });
        }
        let theta = pattern.get(a, b);
        if theta.norm() == 0.0 {
            return Err(Error::BrokenCycle(a, b));
        }
        sig *= -theta;
    }
    Ok(sig)
}

/// Whether a unit complex number equals 1 within [`PHASE_TOL`] in modulus and
/// argument.
pub fn is_unit_one(z: Complex64) -> bool {
    (z.norm() - 1.0).abs() <= PHASE_TOL && z.arg().abs() <= PHASE_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StoquasticWitness {
    /// Diagonal of `U`; `U† H U` has real nonpositive off-diagonals.
    Unitary { phases: Vec<Complex64> },
    /// A cycle whose signature is not 1.
    FrustratedCycle {
        cycle: Vec<usize>,
        signature: Complex64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoquasticityReport {
    pub is_stoquastic: bool,
    pub witness: StoquasticWitness,
}

fn support_neighbors(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && m[(i, j)].norm() != 0.0)
                .collect()
        })
        .collect()
}

fn tree_path_to_root(parent: &[usize], mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while parent[v] != v {
        v = parent[v];
        path.push(v);
    }
    path
}

/// Decides whether `H` has frustration index zero by propagating phases along
/// a breadth-first spanning tree of its off-diagonal support.
pub fn stoquasticity_check(h: &HermitianMatrix) -> Result<StoquasticityReport> {
    let m = h.matrix();
    let n = h.dim();
    let pattern = PhasePattern::of(h);
    let adj = support_neighbors(m);

    let zero = Complex64::new(0.0, 0.0);
    let mut u = vec![zero; n];
    let mut parent = vec![usize::MAX; n];
    u[0] = Complex64::new(1.0, 0.0);
    parent[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &j in &adj[i] {
            if parent[j] == usize::MAX {
                parent[j] = i;
                // Makes conj(U_i) Θ_ij U_j = -1.
                u[j] = -(pattern.get(i, j).conj()) * u[i];
                queue.push_back(j);
            }
        }
    }
    if order.len() != n {
        return Err(Error::DisconnectedSupport);
    }

    for i in 0..n {
        for &j in &adj[i] {
            if j < i || parent[j] == i || parent[i] == j {
                continue;
            }
            let z = -(u[i].conj() * pattern.get(i, j) * u[j]);
            if is_unit_one(z) {
                continue;
            }
            // Cycle: i up to the common ancestor, down to j, then the edge j-i.
            let up_i = tree_path_to_root(&parent, i);
            let up_j = tree_path_to_root(&parent, j);
            let lca = *up_i.iter().find(|x| up_j.contains(x)).expect("shared root");
            let mut cycle: Vec<usize> = up_i.iter().copied().take_while(|&x| x != lca).collect();
            cycle.push(lca);
            let down: Vec<usize> = up_j.iter().copied().take_while(|&x| x != lca).collect();
            cycle.extend(down.into_iter().rev());
            let signature = cycle_signature(&pattern, &cycle)?;
            return Ok(StoquasticityReport {
                is_stoquastic: false,
                witness: StoquasticWitness::FrustratedCycle { cycle, signature },
            });
        }
    }
    Ok(StoquasticityReport {
        is_stoquastic: true,
        witness: StoquasticWitness::Unitary { phases: u },
    })
}

/// `U† H U` for diagonal `U`.
pub fn conjugate_diagonal(h: &DMatrix<Complex64>, phases: &[Complex64]) -> DMatrix<Complex64> {
    let n = h.nrows();
    DMatrix::from_fn(n, n, |i, j| phases[i].conj() * h[(i, j)] * phases[j])
}

fn phases_of(ground_state: &DVector<Complex64>) -> Result<Vec<Complex64>> {
    let scale = ground_state.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    ground_state
        .iter()
        .enumerate()
        .map(|(u, z)| {
            let r = z.norm();
            if !(r > 1e-14 * scale) {
                Err(Error::ZeroAmplitude {
                    vertex: u,
                    value: r,
                })
            } else {
                Ok(z / r)
            }
        })
        .collect()
}

/// `Re(U† H U)` with `U = diag(φ₀ / |φ₀|)`, so that `U† φ₀ ≥ 0`.
pub fn rotate_to_real(
    h: &HermitianMatrix,
    ground_state: &DVector<Complex64>,
) -> Result<DMatrix<f64>> {
    if ground_state.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: ground_state.len(),
        });
    }
    let phases = phases_of(ground_state)?;
    Ok(conjugate_diagonal(h.matrix(), &phases).map(|z| z.re))
}

/// Real special case of [`rotate_to_real`]: `S M S` with `S = diag(sign φ₀)`.
pub fn sign_rotate(m: &DMatrix<f64>, ground_state: &DVector<f64>) -> Result<DMatrix<f64>> {
    let scale = ground_state.amax();
    let mut signs = Vec::with_capacity(ground_state.len());
    for (u, &x) in ground_state.iter().enumerate() {
        if !(x.abs() > 1e-14 * scale) {
            return Err(Error::ZeroAmplitude {
                vertex: u,
                value: x,
            });
        }
        signs.push(x.signum());
    }
    let n = m.nrows();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        signs[i] * m[(i, j)] * signs[j]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigendecompose, hermitian_eigen};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: usize, data: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_real(&DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn signature_examples() {
        let two = PhasePattern::of(&real(2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(cycle_signature(&two, &[0, 1]).unwrap(), c(1.0, 0.0));
        let tri_pos = PhasePattern::of(&real(3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]));
        assert_eq!(cycle_signature(&tri_pos, &[0, 1, 2]).unwrap(), c(-1.0, 0.0));
        let tri_neg = PhasePattern::of(&real(
            3,
            &[0.0, -1.0, -1.0, -1.0, 0.0, -1.0, -1.0, -1.0, 0.0],
        ));
        assert_eq!(
            cycle_signature(&tri_neg, &[0, 1, 2, 0]).unwrap(),
            c(1.0, 0.0)
        );
        let path = PhasePattern::of(&real(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]));
        assert!(matches!(
            cycle_signature(&path, &[0, 1, 2]),
            Err(Error::BrokenCycle(2, 0))
        ));
    }

    #[test]
    fn bipartite_flip() {
        let report = stoquasticity_check(&real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(report.is_stoquastic);
        let StoquasticWitness::Unitary { phases } = report.witness else {
            panic!()
        };
        assert_eq!(phases, vec![c(1.0, 0.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn frustrated_triangle() {
        let report =
            stoquasticity_check(&real(3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(!report.is_stoquastic);
        let StoquasticWitness::FrustratedCycle { cycle, signature } = report.witness else {
            panic!()
        };
        assert_eq!(cycle.len(), 3);
        assert_abs_diff_eq!(signature.re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn already_stoquastic_gets_identity() {
        let h = real(3, &[1.0, -0.5, -2.0, -0.5, 0.0, -1.0, -2.0, -1.0, 3.0]);
        let report = stoquasticity_check(&h).unwrap();
        let StoquasticWitness::Unitary { phases } = report.witness else {
            panic!()
        };
        assert!(phases.iter().all(|&z| z == c(1.0, 0.0)));
    }

    #[test]
    fn complex_phases_conjugate_to_nonpositive() {
        let i = c(0.0, 1.0);
        let a = c(0.3, 0.4);
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0, 0.0),
                i,
                c(0.0, 0.0),
                -i,
                c(1.0, 0.0),
                a,
                c(0.0, 0.0),
                a.conj(),
                c(2.0, 0.0),
            ],
        );
        let h = HermitianMatrix::new(m.clone()).unwrap();
        let report = stoquasticity_check(&h).unwrap();
        let StoquasticWitness::Unitary { phases } = report.witness else {
            panic!()
        };
        let r = conjugate_diagonal(&m, &phases);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(r[(i, j)].re <= 1e-12 && r[(i, j)].im.abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotation_example() {
        let i = c(0.0, 1.0);
        let z = c(0.0, 0.0);
        let h = HermitianMatrix::new(DMatrix::from_row_slice(2, 2, &[z, i, -i, z])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = DVector::from_vec(vec![c(s, 0.0), c(0.0, s)]);
        let r = rotate_to_real(&h, &phi).unwrap();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        let (values, _) = hermitian_eigen(h.matrix()).unwrap();
        let rotated = eigendecompose(&r).unwrap();
        assert_abs_diff_eq!(values[1] - values[0], rotated.gap(), epsilon = 1e-12);
    }

    #[test]
    fn rotation_leaves_positive_real_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let h = HermitianMatrix::from_real(&m).unwrap();
        let phi = DVector::from_vec(vec![c(0.7, 0.0), c(0.7, 0.0)]);
        assert_eq!(rotate_to_real(&h, &phi).unwrap(), m);
        let d = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let hd = HermitianMatrix::from_real(&d).unwrap();
        assert_eq!(
            rotate_to_real(&hd, &DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)])).unwrap(),
            d
        );
        assert!(matches!(
            rotate_to_real(&hd, &DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])),
            Err(Error::ZeroAmplitude { vertex: 1, .. })
        ));
    }
}
