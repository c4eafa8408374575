mod common;

use common::{gaussian_h, ones, tri};
use nsc_core::combinatorics::Combinations;
use nsc_core::ensembles::gaussian;
use nsc_core::{
    alpha_exact_on_set, cheap_upper_bound, exhaustive_alpha, lp_upper_bound, null_space_basis,
    pick_l_bound, pick_l_optimized_bound, pick_one_bound, sandwich, score_all_subsets, DenseMatrix,
    SandwichTrace, Settings,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn settings() -> Settings {
    Settings::default()
}

fn exact_alpha(h: &DenseMatrix, k: usize, l: usize) -> (f64, SandwichTrace, u64) {
    let mut trace = SandwichTrace::default();
    let out = sandwich(h, k, l, &settings(), &mut trace).unwrap();
    (out.alpha.alpha, trace, out.report.steps_examined.unwrap())
}

#[test]
fn sandwich_matches_oracle_12x6() {
    let h = gaussian_h(12, 6, 1206);
    let (alpha, trace, steps) = exact_alpha(&h, 3, 2);
    let (oracle, _) = exhaustive_alpha(&h, 3, &settings()).unwrap();
    assert!(
        (alpha - oracle.alpha).abs() <= 1e-8,
        "{alpha} vs {}",
        oracle.alpha
    );
    assert!(steps <= 220);
    let last = trace.rows.last().unwrap();
    assert_eq!(last.gub, last.glb);
}

#[test]
fn sandwich_matches_oracle_10x5() {
    let h = gaussian_h(10, 5, 105);
    let (alpha, _, _) = exact_alpha(&h, 2, 1);
    let (oracle, _) = exhaustive_alpha(&h, 2, &settings()).unwrap();
    assert!((alpha - oracle.alpha).abs() <= 1e-8);
}

#[test]
fn optimized_bound_sits_between_exact_and_pick_l() {
    let h = gaussian_h(10, 4, 104);
    let s = settings();
    let table = score_all_subsets(&h, 2, &s).unwrap();
    let opt = pick_l_optimized_bound(&table, 4, &s).unwrap().bound;
    let pl = pick_l_bound(&table, 4).unwrap().bound;
    let (exact, _) = exhaustive_alpha(&h, 4, &s).unwrap();
    assert!(opt <= pl + 1e-9, "{opt} > {pl}");
    assert!(opt >= exact.alpha - 1e-9, "{opt} < {}", exact.alpha);
}

#[test]
fn bounds_are_sound_and_ordered() {
    let s = settings();
    for (n, seed) in [(8usize, 1u64), (8, 2), (10, 3), (10, 4)] {
        let h = gaussian_h(n, n / 2, seed);
        let tables: Vec<_> = (1..=3)
            .map(|l| score_all_subsets(&h, l, &s).unwrap())
            .collect();
        for k in 1..=4 {
            let (exact, _) = exhaustive_alpha(&h, k, &s).unwrap();
            let p1 = pick_one_bound(&tables[0], k).unwrap().bound;
            assert!(p1 >= exact.alpha - 1e-8);
            let mut prev_opt = f64::INFINITY;
            for l in 1..=k.min(3) {
                let pl = pick_l_bound(&tables[l - 1], k).unwrap().bound;
                let opt = pick_l_optimized_bound(&tables[l - 1], k, &s).unwrap().bound;
                assert!(pl >= exact.alpha - 1e-8, "n={n} k={k} l={l}");
                assert!(opt >= exact.alpha - 1e-8, "n={n} k={k} l={l}");
                assert!(opt <= pl + 1e-9, "n={n} k={k} l={l}: {opt} > {pl}");
                assert!(
                    opt <= prev_opt + 1e-9,
                    "n={n} k={k} l={l}: {opt} > {prev_opt}"
                );
                prev_opt = opt;
            }
        }
    }
}

#[test]
fn pick_l_is_exact_when_l_equals_k() {
    let s = settings();
    for seed in 0..3 {
        let h = gaussian_h(9, 4, 900 + seed);
        for k in 1..=3 {
            let table = score_all_subsets(&h, k, &s).unwrap();
            let bound = pick_l_bound(&table, k).unwrap().bound;
            let (exact, _) = exhaustive_alpha(&h, k, &s).unwrap();
            assert!((bound - exact.alpha).abs() <= 1e-10);
        }
    }
}

#[test]
fn scores_and_bounds_are_scale_invariant() {
    let s = settings();
    let h = gaussian_h(9, 4, 77);
    for factor in [-3.5, 1e-3, 250.0] {
        let hs = h.scaled(factor);
        for l in 1..=2 {
            let a = score_all_subsets(&h, l, &s).unwrap();
            let b = score_all_subsets(&hs, l, &s).unwrap();
            for (x, y) in a.scores().iter().zip(b.scores()) {
                assert!((x.score.alpha - y.score.alpha).abs() <= 1e-10);
            }
            let k = 3;
            let pa = pick_l_bound(&a, k).unwrap().bound;
            let pb = pick_l_bound(&b, k).unwrap().bound;
            assert!((pa - pb).abs() <= 1e-10);
        }
    }
}

#[test]
fn row_permutation_permutes_scores() {
    let s = settings();
    let h = gaussian_h(8, 3, 31);
    let mut perm: Vec<usize> = (0..8).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    // Row i of hp is row perm[i] of h.
    let hp = h.select_rows(&perm);
    let a = score_all_subsets(&h, 2, &s).unwrap();
    let b = score_all_subsets(&hp, 2, &s).unwrap();
    for sc in b.scores() {
        let mut orig: Vec<usize> = sc.set.iter().map(|&i| perm[i]).collect();
        orig.sort_unstable();
        assert!((sc.score.alpha - a.alpha_of(&orig)).abs() <= 1e-10);
    }
    for k in 2..=4 {
        let x = pick_l_bound(&a, k).unwrap().bound;
        let y = pick_l_bound(&b, k).unwrap().bound;
        assert!((x - y).abs() <= 1e-10);
        let x = pick_l_optimized_bound(&a, k, &s).unwrap().bound;
        let y = pick_l_optimized_bound(&b, k, &s).unwrap().bound;
        assert!((x - y).abs() <= 1e-9);
    }
}

#[test]
fn per_support_bound_chain() {
    let s = settings();
    let h = gaussian_h(10, 5, 2024);
    let t1 = score_all_subsets(&h, 1, &s).unwrap();
    let t2 = score_all_subsets(&h, 2, &s).unwrap();
    for set in Combinations::new(10, 3) {
        let exact = alpha_exact_on_set(&h, &set, s.feas_tol).unwrap().alpha;
        for t in [&t1, &t2] {
            let lpub = lp_upper_bound(t, &set, s.feas_tol).unwrap();
            let cub = cheap_upper_bound(t, &set).unwrap();
            assert!(exact <= lpub + 1e-9, "{set:?}: {exact} > {lpub}");
            assert!(lpub <= cub + 1e-9, "{set:?}: {lpub} > {cub}");
        }
    }
}

#[test]
fn sandwich_envelope_is_monotone_and_alpha_grows_with_k() {
    let h = gaussian_h(10, 5, 55);
    let mut prev = 0.0;
    for k in 1..=4 {
        let (alpha, trace, steps) = exact_alpha(&h, k, k.min(2));
        for w in trace.rows.windows(2) {
            assert!(w[1].gub <= w[0].gub, "{w:?}");
            assert!(w[1].glb >= w[0].glb, "{w:?}");
        }
        for r in &trace.rows {
            assert!(r.glb <= r.gub + 1e-9);
        }
        let last = trace.rows.last().unwrap();
        assert_eq!(last.gub, last.glb);
        assert_eq!(last.glb, alpha);
        assert!(steps as usize == trace.rows.len());
        assert!(alpha >= prev - 1e-12 && alpha <= 1.0);
        prev = alpha;
    }
}

#[test]
fn closed_form_and_unbounded_families() {
    for n in 4..=7 {
        for k in 1..n {
            let (alpha, _, _) = exact_alpha(&ones(n), k, 1);
            assert!((alpha - k as f64 / n as f64).abs() <= 1e-10);
        }
    }
    assert!((exact_alpha(&tri(), 1, 1).0 - 0.5).abs() < 1e-12);
    assert_eq!(exact_alpha(&tri(), 2, 1).0, 1.0);
    assert_eq!(exact_alpha(&tri(), 2, 2).0, 1.0);
}

#[test]
fn alpha_depends_only_on_the_null_space() {
    let s = settings();
    for seed in 0..3u64 {
        let a = gaussian(6, 12, 40 + seed, 1.0);
        let h1 = null_space_basis(&a, s.basis_tol).unwrap().h;
        let r = gaussian(6, 6, 90 + seed, 1.0);
        let h2 = h1.matmul(&r).unwrap();
        for (k, l) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            let (x, _, _) = exact_alpha(&h1, k, l);
            let (y, _, _) = exact_alpha(&h2, k, l);
            assert!((x - y).abs() <= 1e-7, "seed {seed} k={k}: {x} vs {y}");
        }
    }
}

#[test]
fn identical_inputs_give_identical_runs() {
    let h = gaussian_h(9, 4, 3);
    let (a1, t1, s1) = exact_alpha(&h, 3, 2);
    let (a2, t2, s2) = exact_alpha(&h, 3, 2);
    assert_eq!(a1.to_bits(), a2.to_bits());
    assert_eq!(t1, t2);
    assert_eq!(s1, s2);
}
