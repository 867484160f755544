//! Dense symmetric eigendecomposition, Rayleigh quotients, Dirichlet ground
//! states of vertex subsets, and the ground-state-weighted gap quotient.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::HamiltonianDecomposition;

const MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius mass is below this fraction
/// of `‖M‖_F`.
const OFF_TOL: f64 = 1e-14;
const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Sorted eigenpairs of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns aligned with `eigenvalues`, each sign-normalized.
    pub eigenvectors: DMatrix<f64>,
    /// `max_i ‖M v_i - λ_i v_i‖`.
    pub residual_bound: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda0(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `γ = λ₁ - λ₀`, zero for 1×1 matrices.
    pub fn gap(&self) -> f64 {
        if self.dim() < 2 {
            0.0
        } else {
            (self.eigenvalues[1] - self.eigenvalues[0]).max(0.0)
        }
    }

    /// `ρ = λ_{n-1} - λ₀`.
    pub fn spread(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.eigenvectors.column(i).into_owned()
    }

    /// Spectral norm `max |λ_i|`.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if let Some(&bad) = m.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(worst));
    }
    Ok(())
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Flips `v` so its largest-magnitude entry is positive; near-ties (within
/// `1e-9` relative) go to the lowest index.
pub fn sign_normalize(v: &mut DVector<f64>) {
    let max = v.amax();
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn eigendecompose(m: &DMatrix<f64>) -> Result<EigenSystem> {
    check_symmetric(m)?;
    let n = m.nrows();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    // Symmetrize exactly so rounding asymmetry cannot leak into the result.
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.norm();
    let tolerance = OFF_TOL * norm;

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > tolerance && off > 0.0 {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps,
                off_norm: off,
                tolerance,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Entries negligible against both diagonals are dropped once
                // the early sweeps have done the heavy lifting.
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    a[(k, p)] = np;
                    a[(p, k)] = np;
                    a[(k, q)] = nq;
                    a[(q, k)] = nq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut vec = v.column(i).into_owned();
        vec /= vec.norm();
        sign_normalize(&mut vec);
        eigenvectors.set_column(col, &vec);
    }
    let residual_bound = (0..n)
        .map(|i| {
            let x = eigenvectors.column(i);
            (m * x - x * eigenvalues[i]).norm()
        })
        .fold(0.0, f64::max);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        residual_bound,
    })
}

/// `⟨f, Mf⟩ / ⟨f, f⟩`.
pub fn rayleigh_quotient(m: &DMatrix<f64>, f: &DVector<f64>) -> Result<f64> {
    if m.nrows() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: f.len(),
        });
    }
    let denom = f.dot(f);
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(f.dot(&(m * f)) / denom)
}

/// Eigenvalues and orthonormal eigenvectors of a complex Hermitian matrix,
/// computed through the real embedding `[[A, -B], [B, A]]` of `A + iB`.
///
/// Every eigenvalue of the embedding appears twice; the complex vectors are
/// recovered as `x + iy` from the embedding's columns and Gram-Schmidt
/// discards the duplicate partner `i(x + iy)`.
pub fn hermitian_eigen(h: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.ncols(),
        });
    }
    let mut emb = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            emb[(i, j)] = z.re;
            emb[(i + n, j + n)] = z.re;
            emb[(i, j + n)] = -z.im;
            emb[(i + n, j)] = z.im;
        }
    }
    let sys = eigendecompose(&emb).map_err(|e| match e {
        Error::NotSymmetric(x) => Error::NotHermitian(x),
        other => other,
    })?;
    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for col in 0..2 * n {
        if vectors.len() == n {
            break;
        }
        let c = sys.eigenvectors.column(col);
        let mut z = DVector::from_iterator(n, (0..n).map(|k| Complex64::new(c[k], c[k + n])));
        for u in &vectors {
            let proj = u.dotc(&z);
            z -= u * proj;
        }
        let norm = z.norm();
        if norm < 0.5 {
            continue;
        }
        z /= Complex64::new(norm, 0.0);
        values.push((z.dotc(&(h * &z))).re);
        vectors.push(z);
    }
    if vectors.len() != n {
        return Err(Error::ConvergenceFailure {
            sweeps: 0,
            off_norm: f64::NAN,
            tolerance: 0.5,
        });
    }
    Ok((values, DMatrix::from_columns(&vectors)))
}

/// Principal Dirichlet eigenpair of a vertex subset: the lowest eigenpair of
/// the principal submatrix of the dense realization indexed by `subset`.
/// The returned vector lives on all vertices and is zero off the subset.
pub fn dirichlet_ground(
    decomp: &HamiltonianDecomposition,
    subset: &[usize],
) -> Result<(f64, DVector<f64>)> {
    let n = decomp.vertex_count();
    let mut s: Vec<usize> = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(&bad) = s.iter().find(|&&u| u >= n) {
        return Err(Error::VertexOutOfRange {
            vertex: bad,
            vertex_count: n,
        });
    }
    let h = decomp.dense();
    let sub = DMatrix::from_fn(s.len(), s.len(), |i, j| h[(s[i], s[j])]);
    let sys = eigendecompose(&sub)?;
    let mut f = DVector::zeros(n);
    for (i, &u) in s.iter().enumerate() {
        f[u] = sys.eigenvectors[(i, 0)];
    }
    Ok((sys.lambda0(), f))
}

/// Strictly positive ground state `φ` in the q-weighted picture together with
/// `λ₀` and the gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    /// `φ = Q^{-1/2} f₀`, normalized so `Σ q_u φ(u)^2 = 1`.
    pub phi: Vec<f64>,
    pub lambda0: f64,
    pub gap: f64,
}

impl GroundState {
    /// Wraps a caller-supplied positive `φ` (any scale).
    pub fn from_phi(phi: Vec<f64>, lambda0: f64, gap: f64) -> Result<Self> {
        if let Some((u, &x)) = phi.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
            return Err(Error::ZeroAmplitude {
                vertex: u,
                value: x,
            });
        }
        Ok(Self { phi, lambda0, gap })
    }

    /// Uniform `φ ≡ 1`, as for `W = 0` with the combinatorial kind.
    pub fn uniform(n: usize) -> Self {
        Self {
            phi: vec![1.0; n],
            lambda0: 0.0,
            gap: 0.0,
        }
    }
}

/// Ground state of a decomposition whose lowest eigenvalue is simple and whose
/// ground vector is strictly positive.
pub fn ground_state(decomp: &HamiltonianDecomposition) -> Result<GroundState> {
    let h = decomp.dense();
    let sys = eigendecompose(&h)?;
    ground_state_from(decomp, &sys)
}

/// As [`ground_state`], reusing an existing eigensystem of `decomp.dense()`.
pub fn ground_state_from(
    decomp: &HamiltonianDecomposition,
    sys: &EigenSystem,
) -> Result<GroundState> {
    let gap = sys.gap();
    let scale = sys.spectral_norm().max(1.0);
    if sys.dim() > 1 && gap <= 1e-12 * scale {
        return Err(Error::DegenerateGround { gap });
    }
    let phi = decomp.to_q_weighted(&sys.vector(0));
    GroundState::from_phi(phi.iter().copied().collect(), sys.lambda0(), gap)
}

/// Whether [`ground_weighted_gap_quotient`] rejects or projects a test
/// function that is not orthogonal to `qφ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orthogonality {
    #[default]
    Strict,
    Project,
}

/// `Σ w_uv φ(u)φ(v)(g(u)-g(v))^2 / Σ q_u g(u)^2 φ(u)^2` for `g ⊥ qφ²`.
///
/// Its infimum over admissible `g` is the spectral gap.
pub fn ground_weighted_gap_quotient(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    g: &[f64],
    mode: Orthogonality,
) -> Result<f64> {
    let n = decomp.vertex_count();
    if g.len() != n || ground.phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.len(),
        });
    }
    let q = decomp.q_weights();
    let phi = &ground.phi;
    let mass: Vec<f64> = (0..n).map(|u| q[u] * phi[u] * phi[u]).collect();
    let total: f64 = mass.iter().sum();
    let inner: f64 = (0..n).map(|u| mass[u] * g[u]).sum();
    let g_norm: f64 = (0..n).map(|u| mass[u] * g[u] * g[u]).sum::<f64>().sqrt();
    let g: Vec<f64> = match mode {
        Orthogonality::Strict => {
            if inner.abs() > ORTHOGONALITY_TOL * g_norm * total.sqrt() {
                return Err(Error::NotOrthogonal(inner));
            }
            g.to_vec()
        }
        Orthogonality::Project => {
            let mean = inner / total;
            g.iter().map(|x| x - mean).collect()
        }
    };
    let denom: f64 = (0..n).map(|u| mass[u] * g[u] * g[u]).sum();
    if !(denom > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let numer: f64 = decomp
        .graph
        .edges()
        .iter()
        .map(|&(u, v, w)| w * phi[u] * phi[v] * (g[u] - g[v]).powi(2))
        .sum();
    Ok(numer / denom)
}

/// Both sides of the identity
/// `Σ w (gφ(u) - gφ(v))^2 = Σ_u (λ₀ - W_u) q_u g^2 φ^2 + Σ w (g(u)-g(v))^2 φ(u)φ(v)`,
/// valid for the ground state `φ` of `L_q + W` and any `g`.
pub fn ground_product_identity(
    decomp: &HamiltonianDecomposition,
    ground: &GroundState,
    g: &[f64],
) -> (f64, f64) {
    let q = decomp.q_weights();
    let phi = &ground.phi;
    let w_pot = decomp.potential.values();
    let mut lhs = 0.0;
    let mut cross = 0.0;
    for &(u, v, w) in decomp.graph.edges() {
        lhs += w * (g[u] * phi[u] - g[v] * phi[v]).powi(2);
        cross += w * (g[u] - g[v]).powi(2) * phi[u] * phi[v];
    }
    let diag: f64 = (0..phi.len())
        .map(|u| (ground.lambda0 - w_pot[u]) * q[u] * g[u] * g[u] * phi[u] * phi[u])
        .sum();
    (lhs, diag + cross)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LaplacianKind, SignedWeightedGraph};
    use approx::assert_abs_diff_eq;

    fn decomp(g: SignedWeightedGraph, w: Vec<f64>) -> HamiltonianDecomposition {
        HamiltonianDecomposition::new(g, LaplacianKind::Combinatorial, w.into()).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0, 10.0]));
        let sys = eigendecompose(&m).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0, 2.0, 3.0, 10.0]);
    }

    #[test]
    fn k2_and_p3_spectra() {
        let k2 = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let sys = eigendecompose(&k2).unwrap();
        assert_abs_diff_eq!(sys.eigenvalues[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sys.gap(), 2.0, epsilon = 1e-14);

        let p3 = decomp(SignedWeightedGraph::path(3).unwrap(), vec![0.0; 3]).dense();
        let sys = eigendecompose(&p3).unwrap();
        for (got, want) in sys.eigenvalues.iter().zip([0.0, 1.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(eigendecompose(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn matches_reference_solver() {
        let n = 9;
        let m = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 7 + i * j) % 11) as f64 - 5.0);
        let sys = eigendecompose(&m).unwrap();
        let mut reference: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in sys.eigenvalues.iter().zip(&reference) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert!(sys.residual_bound < 1e-10);
        let gram = sys.eigenvectors.transpose() * &sys.eigenvectors;
        assert!((gram - DMatrix::identity(n, n)).amax() < 1e-12);
    }

    #[test]
    fn rayleigh_examples() {
        let k2 = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(
            rayleigh_quotient(&k2, &DVector::from_vec(vec![1.0, 1.0])).unwrap(),
            0.0
        );
        assert_eq!(
            rayleigh_quotient(&k2, &DVector::from_vec(vec![1.0, 0.0])).unwrap(),
            1.0
        );
        assert!(matches!(
            rayleigh_quotient(&k2, &DVector::zeros(2)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn dirichlet_examples() {
        let k2 = decomp(SignedWeightedGraph::path(2).unwrap(), vec![0.0; 2]);
        assert_abs_diff_eq!(
            dirichlet_ground(&k2, &[0, 1]).unwrap().0,
            0.0,
            epsilon = 1e-14
        );
        assert_eq!(dirichlet_ground(&k2, &[0]).unwrap().0, 1.0);
        let p3 = decomp(SignedWeightedGraph::path(3).unwrap(), vec![0.0; 3]);
        let (lambda, f) = dirichlet_ground(&p3, &[1]).unwrap();
        assert_eq!(lambda, 2.0);
        assert_eq!(f.as_slice(), &[0.0, 1.0, 0.0]);
        assert!(matches!(
            dirichlet_ground(&p3, &[]),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn gap_quotient_examples() {
        let k2 = decomp(SignedWeightedGraph::path(2).unwrap(), vec![0.0; 2]);
        let ground = ground_state(&k2).unwrap();
        let r = ground_weighted_gap_quotient(&k2, &ground, &[1.0, -1.0], Orthogonality::Strict)
            .unwrap();
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-12);
        assert!(matches!(
            ground_weighted_gap_quotient(&k2, &ground, &[1.0, 1.0], Orthogonality::Strict),
            Err(Error::NotOrthogonal(_))
        ));
        assert!(matches!(
            ground_weighted_gap_quotient(&k2, &ground, &[1.0, 1.0], Orthogonality::Project),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn excited_ratio_attains_gap() {
        let g = SignedWeightedGraph::from_edges(
            4,
            [
                (0, 1, 0.7),
                (1, 2, 0.2),
                (2, 3, 0.9),
                (0, 3, 0.4),
                (0, 2, 0.1),
            ],
        )
        .unwrap();
        for kind in [LaplacianKind::Combinatorial, LaplacianKind::Normalized] {
            let d = HamiltonianDecomposition::new(g.clone(), kind, vec![0.3, 2.0, 0.0, 1.1].into())
                .unwrap();
            let sys = eigendecompose(&d.dense()).unwrap();
            let ground = ground_state_from(&d, &sys).unwrap();
            let phi1 = d.to_q_weighted(&sys.vector(1));
            let gfun: Vec<f64> = (0..4).map(|u| phi1[u] / ground.phi[u]).collect();
            let r =
                ground_weighted_gap_quotient(&d, &ground, &gfun, Orthogonality::Strict).unwrap();
            assert_abs_diff_eq!(r, sys.gap(), epsilon = 1e-10);
            let (lhs, rhs) = ground_product_identity(&d, &ground, &[0.3, -1.0, 2.0, 0.5]);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn hermitian_embedding_recovers_spectrum() {
        let i = Complex64::i();
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, 0.0), i, -i, Complex64::new(0.0, 0.0)],
        );
        let (values, vectors) = hermitian_eigen(&h).unwrap();
        assert_abs_diff_eq!(values[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], 1.0, epsilon = 1e-12);
        let gram = vectors.adjoint() * &vectors;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_ground_reported() {
        let d = decomp(SignedWeightedGraph::empty(2).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(
            ground_state(&d),
            Err(Error::DegenerateGround { .. })
        ));
    }
}
