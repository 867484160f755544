mod common;

use approx::assert_abs_diff_eq;
use gapcert::bounds::{cheeger2_lower, cheeger_lower, expansion_check, Analysis, QMode};
use gapcert::cheeger::{Cut, CutProblem, ExhaustiveOptions};
use gapcert::graph::build_laplacian;
use gapcert::routing::{auto_route, validate_plan, RoutingStrategy};
use gapcert::spectral::{eigendecompose, ground_state, hermitian_eigen};
use gapcert::stoquastic::{rotate_to_real, stoquasticity_check};
use gapcert::{HamiltonianDecomposition, LaplacianKind, SignedWeightedGraph};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize) -> HamiltonianDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = common::random_kind(&mut rng);
    common::stoquastic_instance(&mut rng, n, kind, 5.0)
}

fn brute_h(p: &CutProblem) -> f64 {
    let n = p.vertex_count();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) - 1 {
        let m: Vec<bool> = (0..n).map(|u| (mask >> u) & 1 == 1).collect();
        let (b, a, c) = p.cut_parts(&m);
        best = best.min(b / a.min(c));
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sandwich_holds(seed in any::<u64>(), n in 2usize..10) {
        let d = instance(seed, n);
        let a = Analysis::new(&d).unwrap();
        prop_assert!(a.upper().unwrap().holds);
        prop_assert!(a.lower_stoquastic(QMode::DegreeRelaxed).unwrap().holds);
        prop_assert!(a.lower_stoquastic(QMode::ExactExcited).unwrap().holds);
    }

    #[test]
    fn exhaustive_is_the_minimum(seed in any::<u64>(), n in 2usize..9) {
        let d = instance(seed, n);
        let p = CutProblem::ground_weighted(&d, &ground_state(&d).unwrap()).unwrap();
        let r = p.exhaustive(ExhaustiveOptions::default()).unwrap();
        prop_assert_eq!(r.h, p.ratio(&r.argmin_cut).unwrap());
        prop_assert!((r.h - brute_h(&p)).abs() <= 1e-12 * r.h.max(1.0));
        let sweep = p.sweep(&p.spectral_ordering().unwrap()).unwrap();
        prop_assert!(sweep.h >= r.h - 1e-12);
    }

    #[test]
    fn cut_ratio_is_complement_symmetric(seed in any::<u64>(), n in 3usize..9, pick in any::<u32>()) {
        let d = instance(seed, n);
        let p = CutProblem::ground_weighted(&d, &ground_state(&d).unwrap()).unwrap();
        let members: Vec<usize> = (0..n).filter(|u| (pick >> u) & 1 == 1).collect();
        prop_assume!(!members.is_empty() && members.len() < n);
        let cut = Cut::new(n, members).unwrap();
        prop_assert_eq!(p.ratio(&cut).unwrap(), p.ratio(&cut.complement(n)).unwrap());
    }

    #[test]
    fn gap_is_invariant_under_potential_shift(seed in any::<u64>(), n in 2usize..9, c in 0.0f64..3.0) {
        let d = instance(seed, n);
        let shifted = HamiltonianDecomposition::new(
            d.graph.clone(),
            d.kind,
            d.potential.values().iter().map(|w| w + c).collect::<Vec<_>>().into(),
        ).unwrap();
        let (a, b) = (Analysis::new(&d).unwrap(), Analysis::new(&shifted).unwrap());
        prop_assert!((a.gamma() - b.gamma()).abs() <= 1e-9);
        prop_assert!((a.h() - b.h()).abs() <= 1e-9 * a.h().max(1.0));
    }

    #[test]
    fn laplacian_is_psd_with_kernel(seed in any::<u64>(), n in 2usize..10) {
        let d = instance(seed, n);
        let l = build_laplacian(&d.graph, d.kind).unwrap();
        let sys = eigendecompose(&l).unwrap();
        prop_assert!(sys.eigenvalues[0].abs() <= 1e-10);
        prop_assert!(sys.eigenvalues[1] > 1e-12);
    }

    #[test]
    fn ground_state_is_positive(seed in any::<u64>(), n in 2usize..10) {
        let d = instance(seed, n);
        let g = ground_state(&d).unwrap();
        prop_assert!(g.phi.iter().all(|&x| x > 0.0));
        let q = d.q_weights();
        let norm: f64 = (0..n).map(|u| q[u] * g.phi[u] * g.phi[u]).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn bound_formulas_are_ordered(h in 0.0f64..10.0, q in 0.01f64..10.0) {
        let exact = (h * h + q * q).sqrt() - q;
        prop_assert!(cheeger_lower(h, q) <= 2.0 * h + 1e-12);
        prop_assert!((cheeger_lower(h, q) - exact).abs() <= 1e-12 * exact.max(1.0));
        prop_assert!(cheeger2_lower(h, q) <= cheeger_lower(h, q) * (1.0 + 1e-12));
        if h <= 0.5 * q {
            prop_assert!(expansion_check(h, q).holds);
        }
    }

    #[test]
    fn routing_never_raises_the_gap(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(g) = common::signed_graph(&mut rng, n, 0.3) else { return Ok(()) };
        let Ok(plan) = auto_route(&g, RoutingStrategy::ShortestPaths) else { return Ok(()) };
        let routed = validate_plan(&g, &plan).unwrap();
        prop_assert!(routed.min_residual > 0.0);
        prop_assert!(!routed.graph.has_negative_edges());
        let gap = |g: &SignedWeightedGraph| {
            eigendecompose(&build_laplacian(g, LaplacianKind::Combinatorial).unwrap()).unwrap().gap()
        };
        prop_assert!(gap(&g) >= gap(&routed.graph) - 1e-9);
    }

    #[test]
    fn rotation_keeps_the_ground_state(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::hermitian_instance(&mut rng, n);
        let (values, vectors) = hermitian_eigen(h.matrix()).unwrap();
        let phi0: DVector<Complex64> = vectors.column(0).into_owned();
        prop_assume!(phi0.iter().all(|z| z.norm() > 1e-6));
        prop_assume!(values[1] - values[0] > 1e-6);
        let real = rotate_to_real(&h, &phi0).unwrap();
        let modulus = phi0.map(|z| z.norm());
        let residual = (&real * &modulus - &modulus * values[0]).norm();
        prop_assert!(residual <= 1e-9);
        let rotated = eigendecompose(&real).unwrap();
        prop_assert!((rotated.eigenvalues[0] - values[0]).abs() <= 1e-9);
        prop_assert!(rotated.gap() >= values[1] - values[0] - 1e-10);
    }
}

#[test]
fn k2_is_tight() {
    let d = HamiltonianDecomposition::laplacian_only(
        SignedWeightedGraph::path(2).unwrap(),
        LaplacianKind::Combinatorial,
    )
    .unwrap();
    let a = Analysis::new(&d).unwrap();
    assert_abs_diff_eq!(a.h(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(a.gamma(), 2.0, epsilon = 1e-12);
}

#[test]
fn real_stoquastic_input_passes_the_check() {
    let d = instance(3, 5);
    let h = gapcert::stoquastic::HermitianMatrix::from_real(&d.dense()).unwrap();
    assert!(stoquasticity_check(&h).unwrap().is_stoquastic);
}
