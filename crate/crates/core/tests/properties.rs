mod common;

use dopwalk_core::measurement::Effect;
use dopwalk_core::operator::{build_projector, build_reflection, build_swap};
use dopwalk_core::oracle::{
    compare, dense_build, dense_evolve, DenseOperator, DEFAULT_DIMENSION_CAP,
};
use dopwalk_core::{
    build_psi, build_walk_unitary, check_state, collapse, evolve, hs_inner, is_projection,
    is_reflection, is_unitary, pure_evolve, purity, run_paper_example, step, vertex_distribution,
    BlockOperator, DensityOperator, EvolveOptions, LineWalkConfig, C64,
};
use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_vectors_are_orthonormal(seed in any::<u64>()) {
        let inst = random_instance(seed, 7, 3);
        let psis: Vec<_> = inst.graph.vertices().iter()
            .filter(|v| inst.graph.out_degree(**v) > 0)
            .map(|&v| build_psi(&inst.graph, &inst.coins, v).unwrap())
            .collect();
        for (a, pa) in psis.iter().enumerate() {
            for (b, pb) in psis.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((pa.inner(pb) - C64::new(want, 0.0)).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn operators_have_their_algebraic_shape(seed in any::<u64>()) {
        let inst = random_instance(seed, 8, 3);
        let (g, f) = (&inst.graph, &inst.coins);
        prop_assert!(is_projection(&build_projector(g, f).unwrap(), 1e-10));
        prop_assert!(is_reflection(&build_reflection(g, f).unwrap(), 1e-10));
        let s = build_swap(g.pair_basis(), f.coin_dim());
        prop_assert_eq!(s.adjoint(), s.clone());
        prop_assert_eq!(s.mul(&s), BlockOperator::identity(g.pair_basis(), f.coin_dim()));
        let u = build_walk_unitary(g, f).unwrap();
        prop_assert!(is_unitary(u.operator(), 1e-10));
    }

    #[test]
    fn channel_is_linear(seed in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let inst = random_instance(seed, 5, 2);
        let walk = build_walk_unitary(&inst.graph, &inst.coins).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let basis = inst.graph.pair_basis();
        let n = inst.coins.coin_dim();
        let rho = random_hermitian(&mut r, basis.clone(), n);
        let sigma = random_hermitian(&mut r, basis, n);
        let (a, b) = (C64::new(a, 0.0), C64::new(b, 0.0));
        let lhs = step(&walk, &rho.linear_combination(a, &sigma, b).unwrap()).unwrap();
        let rhs = step(&walk, &rho).unwrap()
            .linear_combination(a, &step(&walk, &sigma).unwrap(), b).unwrap();
        prop_assert!(lhs.operator().max_abs_diff(rhs.operator()) <= 1e-12);
    }

    #[test]
    fn pure_states_keep_unit_norm(seed in any::<u64>()) {
        let inst = random_instance(seed, 6, 3);
        let walk = build_walk_unitary(&inst.graph, &inst.coins).unwrap();
        let mut r = rng(seed);
        let v = random_unit_vector(&mut r, inst.graph.pair_basis(), inst.coins.coin_dim());
        for t in [1, 7, 50] {
            let vt = pure_evolve(&walk, &v, t).unwrap();
            prop_assert!((vt.norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn measurement_invariants(seed in any::<u64>(), steps in 0usize..6) {
        let inst = random_instance(seed, 6, 2);
        let walk = build_walk_unitary(&inst.graph, &inst.coins).unwrap();
        let mut r = rng(seed);
        let rho0 = random_mixed_state(&mut r, inst.graph.pair_basis(), inst.coins.coin_dim(), 2);
        let traj = evolve(&walk, &rho0, steps, EvolveOptions::default()).unwrap();
        let rho = traj.final_state();

        let probs: Vec<f64> = Effect::all(rho.basis()).map(|e| e.probability(rho)).collect();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!(probs.iter().all(|&p| p >= -1e-10));

        let dist = vertex_distribution(rho).unwrap();
        prop_assert!((dist.total() - 1.0).abs() <= 1e-10);

        // off-diagonal blocks do not matter
        let mut diag = BlockOperator::zeros(rho.basis().clone(), rho.coin_dim());
        for ((k, b), blk) in rho.operator().blocks() {
            if k == b {
                diag.set_block(k, b, blk.clone());
            }
        }
        let diag_dist = vertex_distribution(&DensityOperator::from_operator(diag)).unwrap();
        prop_assert!(dist.max_abs_diff(&diag_dist) == 0.0);

        let (i, p) = probs.iter().enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        prop_assume!(*p > 1e-6);
        let pair = rho.basis().pair(i);
        let once = collapse(rho, pair).unwrap();
        let twice = collapse(&once, pair).unwrap();
        prop_assert!(once.operator().max_abs_diff(twice.operator()) <= 1e-12);
        prop_assert!(check_state(&once, 1e-10).is_valid());
    }

    #[test]
    fn states_stay_valid(seed in any::<u64>()) {
        let inst = random_instance(seed, 5, 2);
        let walk = build_walk_unitary(&inst.graph, &inst.coins).unwrap();
        let mut r = rng(seed);
        let rho0 = random_mixed_state(&mut r, inst.graph.pair_basis(), inst.coins.coin_dim(), 3);
        let p0 = purity(&rho0);
        let traj = evolve(&walk, &rho0, 50, EvolveOptions::default()).unwrap();
        for rho in traj.states() {
            prop_assert!(rho.operator().hermiticity_residual() <= 1e-10);
            prop_assert!((purity(rho) - p0).abs() <= 1e-10);
        }
        let diag = check_state(traj.final_state(), 1e-10);
        prop_assert!(diag.is_valid(), "{:?}", diag);
    }

    #[test]
    fn sparse_and_dense_paths_agree(seed in any::<u64>(), steps in 0usize..=10) {
        let inst = random_instance(seed, 6, 3);
        let (g, f) = (&inst.graph, &inst.coins);
        let dense = dense_build(g, f, DEFAULT_DIMENSION_CAP).unwrap();
        prop_assert!(dense.unitary.unitarity_residual() <= 1e-12);
        prop_assert!(dense.projector.matmul(&dense.projector).max_abs_diff(&dense.projector) <= 1e-12);
        let walk = build_walk_unitary(g, f).unwrap();
        prop_assert!(compare(walk.operator(), &dense.unitary, 1e-12).unwrap().passed());
        prop_assert!(compare(&build_projector(g, f).unwrap(), &dense.projector, 1e-12).unwrap().passed());

        let mut r = rng(seed);
        let rho0 = random_mixed_state(&mut r, g.pair_basis(), f.coin_dim(), 2);
        let traj = evolve(&walk, &rho0, steps, EvolveOptions::default()).unwrap();
        let reference = dense_evolve(&dense.unitary, &DenseOperator::from_blocks(rho0.operator()), steps).unwrap();
        prop_assert!(compare(traj.final_state(), &reference, 1e-10).unwrap().passed());
    }
}

#[test]
fn oracle_detects_a_one_step_offset() {
    let g = four_cycle();
    let f = four_cycle_family(&g);
    let walk = build_walk_unitary(&g, &f).unwrap();
    let dense = dense_build(&g, &f, DEFAULT_DIMENSION_CAP).unwrap();
    let mut r = rng(3);
    let rho0 = random_mixed_state(&mut r, g.pair_basis(), 2, 1);
    let traj = evolve(&walk, &rho0, 3, EvolveOptions::default()).unwrap();
    let dense0 = DenseOperator::from_blocks(rho0.operator());
    let reference = dense_evolve(&dense.unitary, &dense0, 2).unwrap();
    assert!(compare(traj.state(2).unwrap(), &reference, 1e-10)
        .unwrap()
        .passed());
    assert!(!compare(traj.state(3).unwrap(), &reference, 1e-10)
        .unwrap()
        .passed());
}

#[test]
fn four_cycle_random_family_five_steps_matches_oracle() {
    for seed in 0..10 {
        let g = four_cycle();
        let mut r = rng(seed);
        let f = random_family(&mut r, &g, 2);
        let walk = build_walk_unitary(&g, &f).unwrap();
        assert!(walk.residual() <= 1e-12);
        let rho0 = random_mixed_state(&mut r, g.pair_basis(), 2, 2);
        let traj = evolve(&walk, &rho0, 5, EvolveOptions::default()).unwrap();
        let dense = dense_build(&g, &f, DEFAULT_DIMENSION_CAP).unwrap();
        let reference = dense_evolve(
            &dense.unitary,
            &DenseOperator::from_blocks(rho0.operator()),
            5,
        )
        .unwrap();
        assert!(compare(traj.final_state(), &reference, 1e-10)
            .unwrap()
            .passed());
    }
}

#[test]
fn line_walk_parity_and_light_cone() {
    let run = run_paper_example(LineWalkConfig::new(12)).unwrap();
    let basis = run.graph.pair_basis();
    for (t, (rho, dist)) in run
        .trajectory
        .states()
        .iter()
        .zip(&run.distributions)
        .enumerate()
    {
        for (v, p) in dist.iter() {
            if (v.0 - t as i64).rem_euclid(2) != 0 {
                assert_eq!(p, 0.0, "t={t} j={v}");
            }
        }
        for ((k, b), _) in rho.operator().blocks() {
            for pair in [basis.pair(k), basis.pair(b)] {
                assert!(pair.first.0.abs() <= t as i64 + 1 && pair.second.0.abs() <= t as i64 + 1);
            }
        }
    }
}

#[test]
fn line_walk_t3_distribution() {
    let run = run_paper_example(LineWalkConfig::new(3)).unwrap();
    let dist = &run.distributions[3];
    assert!((dist.total() - 1.0).abs() <= 1e-12);
    let support: Vec<i64> = dist.support(1e-15).map(|v| v.0).collect();
    assert!(
        support.iter().all(|j| [-3, -1, 1, 3].contains(j)),
        "{support:?}"
    );

    // independent route: dense oracle on the same window
    let dense = dense_build(&run.graph, &run.coins, DEFAULT_DIMENSION_CAP).unwrap();
    let rho0 = DenseOperator::from_blocks(run.trajectory.state(0).unwrap().operator());
    let rho3 = dense_evolve(&dense.unitary, &rho0, 3).unwrap();
    let basis = run.graph.pair_basis();
    for j in -3..=3i64 {
        let mut p = 0.0;
        for (i, pair) in basis.pairs().iter().enumerate() {
            if pair.first.0 == j {
                p += rho3.get(2 * i, 2 * i).re + rho3.get(2 * i + 1, 2 * i + 1).re;
            }
        }
        assert!((p - dist.get(j.into())).abs() <= 1e-12);
    }
}

#[test]
fn line_walk_t1_purity_via_hs_inner() {
    let run = run_paper_example(LineWalkConfig::new(2)).unwrap();
    let rho1 = run.trajectory.state(1).unwrap();
    let hs = hs_inner(rho1, rho1).unwrap();
    assert!((hs - C64::new(1.0, 0.0)).norm() <= 1e-12);
    let diag = check_state(run.trajectory.state(2).unwrap(), 1e-12);
    assert!(diag.hermiticity_residual <= 1e-12 && diag.trace_residual <= 1e-12);
    assert!(diag.min_eigenvalue >= -1e-12);
}

#[test]
fn line_unitary_matches_rho1_block() {
    // U([1/√2, 1/√2]ᵀ ⊗ |0,1⟩) has coin part on (1,0) whose projector is ρ₁'s (1,0) block
    let run = run_paper_example(LineWalkConfig::new(1)).unwrap();
    let v = dopwalk_core::line::paper_initial_vector(run.graph.pair_basis()).unwrap();
    let v1 = pure_evolve(&run.walk, &v, 1).unwrap();
    let outer = DensityOperator::from_pure(&v1);
    let rho1 = run.trajectory.state(1).unwrap();
    assert!(outer.operator().max_abs_diff(rho1.operator()) <= 1e-12);
}

#[test]
fn window_radius_changes_nothing_inside_the_cone() {
    let small = run_paper_example(LineWalkConfig::with_margin(6, 1)).unwrap();
    let large = run_paper_example(LineWalkConfig::with_margin(6, 6)).unwrap();
    let (sb, lb) = (small.graph.pair_basis(), large.graph.pair_basis());
    let (rs, rl) = (
        small.trajectory.final_state(),
        large.trajectory.final_state(),
    );
    assert_eq!(rs.operator().num_blocks(), rl.operator().num_blocks());
    for ((k, b), blk) in rs.operator().blocks() {
        let other = rl.block_at(sb.pair(k), sb.pair(b)).unwrap();
        assert!(blk.max_abs_diff(other) <= 1e-14);
    }
    assert!(lb.len() > sb.len());
}
