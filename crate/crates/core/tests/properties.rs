//! Property tests for the algebra, information, region and simulation layers.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use coset_mac::algebra::{for_each_vector, Field, GroupSpec, Matrix};
use coset_mac::codesim::{
    mac_params_for_rate, sample_mac_pair, sample_nested_code, simulate_mac, MacParams, SimParams,
};
use coset_mac::info::{
    group_mi_source_abelian, group_mi_source_zpr, is_typical, upper_convex_envelope, JointPmf,
    DEFAULT_WEIGHT_GRID,
};
use coset_mac::regions::families::bdd_linear;
use coset_mac::regions::{
    alpha_bounds, bdd, best_sum_rate, beta_f_sum_rate, example1, rsf_bounds, tau_grid, ChannelSpec,
    SearchFamily, SearchOptions, TestChannel, UserConditional, VAlgebra,
};

fn random_pmf(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    // Cubing spreads the draws so some entries get close to zero.
    let mut p: Vec<f64> = (0..len)
        .map(|_| rng.random::<f64>().powi(3) + 1e-6)
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// A random test channel on `ch` with random p(u, v | s) and a random map x = f(u, v, s).
fn random_test_channel(
    ch: &Arc<ChannelSpec>,
    u_size: usize,
    v_size: usize,
    seed: u64,
) -> TestChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = [0, 1].map(|j| {
        let ns = ch.state_sizes()[j];
        let nx = ch.input_sizes()[j];
        let puv: Vec<Vec<f64>> = (0..ns)
            .map(|_| random_pmf(&mut rng, u_size * v_size))
            .collect();
        let map: Vec<usize> = (0..ns * u_size * v_size)
            .map(|_| rng.random_range(0..nx))
            .collect();
        UserConditional::from_fn(ns, u_size, v_size, nx, |u, v, x, s| {
            if map[(s * u_size + u) * v_size + v] == x {
                puv[s][u * v_size + v]
            } else {
                0.0
            }
        })
    });
    let f2 = Arc::new(Field::new(2, 1).unwrap());
    TestChannel::new(ch.clone(), VAlgebra::Field(f2), users).unwrap()
}

// ---- algebra ----

#[test]
fn field_axioms_for_small_orders() {
    for q in [2u64, 3, 4, 5, 7, 8] {
        let f = Field::of_order(q).unwrap();
        let q = q as u8;
        for x in 0..q {
            assert_eq!(f.add(x, 0), x);
            assert_eq!(f.mul(x, 1), x);
            assert_eq!(f.add(x, f.neg(x)), 0);
            if x != 0 {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1, "q = {q}, x = {x}");
            } else {
                assert_eq!(f.inv(0), None);
            }
            for y in 0..q {
                assert_eq!(f.add(x, y), f.add(y, x));
                assert_eq!(f.mul(x, y), f.mul(y, x));
                assert_eq!(f.sub(f.add(x, y), y), x);
                for z in 0..q {
                    assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                    assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                    assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                }
            }
        }
    }
}

#[test]
fn subgroup_cosets_partition_small_groups() {
    for spec in [
        "Z2", "Z4", "Z8", "Z16", "Z3", "Z9", "Z5", "Z2xZ2", "Z2xZ4", "Z2xZ2xZ2", "Z4xZ4", "Z3xZ3",
        "Z2xZ8",
    ] {
        let g = GroupSpec::parse(spec).unwrap();
        let elems: Vec<Vec<u32>> = (0..g.order()).map(|i| g.element(i)).collect();
        for theta in g.subgroup_indices() {
            let h: Vec<&Vec<u32>> = elems.iter().filter(|x| g.in_subgroup(&theta, x)).collect();
            assert_eq!(h.len(), g.subgroup_order(&theta), "{spec} {:?}", theta.0);
            for a in &h {
                assert!(g.in_subgroup(&theta, &g.neg(a)));
                for b in &h {
                    assert!(g.in_subgroup(&theta, &g.add(a, b)));
                }
            }
            let mut sizes = vec![0usize; g.coset_count(&theta)];
            for x in &elems {
                sizes[g.coset_label(&theta, x)] += 1;
                // Same label exactly when the difference lies in the subgroup.
                for y in &elems {
                    let same = g.coset_label(&theta, x) == g.coset_label(&theta, y);
                    assert_eq!(same, g.in_subgroup(&theta, &g.add(x, &g.neg(y))));
                }
            }
            assert!(sizes.iter().all(|&s| s == g.subgroup_order(&theta)));
        }
        let zeros = vec![0; g.factors().len()];
        let full: Vec<u32> = g.factors().iter().map(|f| f.r).collect();
        let all = g.subgroup_indices();
        let find = |t: &Vec<u32>| all.iter().find(|x| &x.0 == t).unwrap();
        assert_eq!(g.subgroup_order(find(&zeros)), g.order());
        assert_eq!(g.subgroup_order(find(&full)), 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codeword_is_affine_and_cosets_fill_the_outer_code(
        n in 1usize..=4,
        k in 0usize..=2,
        l in 0usize..=2,
        seed in any::<u64>(),
    ) {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let code = sample_nested_code(f.clone(), n, k, l, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let mut union = BTreeSet::new();
        let mut ms = Vec::new();
        for_each_vector(2, l, |m| ms.push(m.to_vec()));
        for m in &ms {
            let base = code.codeword(&vec![0; k], m).unwrap();
            let diff = |a: &[u8]| f.add_vec(&code.codeword(a, m).unwrap(), &base);
            let mut a_all = Vec::new();
            for_each_vector(2, k, |a| a_all.push(a.to_vec()));
            for a in &a_all {
                for b in &a_all {
                    let ab = f.add_vec(a, b);
                    prop_assert_eq!(diff(&ab), f.add_vec(&diff(a), &diff(b)));
                }
            }
            let coset = code.enumerate_coset(m, 1 << 20).unwrap();
            prop_assert_eq!(coset.len(), 1usize << code.g_inner().rank(&f));
            union.extend(coset);
        }
        // The outer code: span of [g_I; g_O/I] shifted by b.
        let stacked = code.g_inner().vstack(code.g_outer()).unwrap();
        let mut outer = BTreeSet::new();
        for_each_vector(2, k + l, |c| {
            outer.insert(f.add_vec(&stacked.left_mul(&f, c), code.bias()));
        });
        prop_assert_eq!(union, outer);
    }

    #[test]
    fn sum_of_user_codewords_is_in_the_sum_code(
        n in 1usize..=5,
        k1 in 0usize..=2,
        k2 in 0usize..=2,
        l1 in 0usize..=2,
        l2 in 0usize..=2,
        q in prop::sample::select(vec![2u64, 3, 4]),
        seed in any::<u64>(),
    ) {
        let f = Arc::new(Field::of_order(q).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = sample_mac_pair(f.clone(), n, [k1, k2], [l1, l2], &mut rng).unwrap();
        let c1 = pair.user_code(0).unwrap();
        let c2 = pair.user_code(1).unwrap();
        let sum = pair.sum_code().unwrap();
        let qq = q as u8;
        for _ in 0..20 {
            let mut draw = |len: usize| -> Vec<u8> { (0..len).map(|_| rng.random_range(0..qq)).collect() };
            let (a1, a2, m1, m2) = (draw(k1), draw(k2), draw(l1), draw(l2));
            let lhs = f.add_vec(&c1.codeword(&a1, &m1).unwrap(), &c2.codeword(&a2, &m2).unwrap());
            let m: Vec<u8> = m1.iter().chain(&m2).copied().collect();
            prop_assert_eq!(lhs, sum.codeword(&pair.sum_inner_index(&a1, &a2), &m).unwrap());
        }
    }
}

/// chi-square test of the codeword marginal over 10^5 seeded draws.
fn chi_square_uniform(q: u64, n: usize, k: usize, l: usize, seed: u64) -> (f64, f64) {
    let f = Arc::new(Field::of_order(q).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (q as usize).pow(n as u32);
    let mut counts = vec![0u64; cells];
    let draws = 100_000;
    let a: Vec<u8> = (0..k).map(|i| (i % q as usize) as u8).collect();
    let m: Vec<u8> = (0..l).map(|i| ((i + 1) % q as usize) as u8).collect();
    for _ in 0..draws {
        let v = sample_nested_code(f.clone(), n, k, l, &mut rng)
            .unwrap()
            .codeword(&a, &m)
            .unwrap();
        let idx = v
            .iter()
            .fold(0usize, |acc, &x| acc * q as usize + x as usize);
        counts[idx] += 1;
    }
    let expect = draws as f64 / cells as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum();
    let crit = ChiSquared::new((cells - 1) as f64)
        .unwrap()
        .inverse_cdf(0.99);
    (stat, crit)
}

#[test]
fn sampled_codewords_are_uniform() {
    for (q, n, k, l, seed) in [(2, 3, 1, 1, 1), (3, 2, 1, 1, 2), (4, 2, 2, 0, 3)] {
        let (stat, crit) = chi_square_uniform(q, n, k, l, seed);
        assert!(stat <= crit, "q = {q}: chi2 {stat} above {crit}");
    }
}

// ---- information measures ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chain_rule_and_nonnegative_information(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = JointPmf::new(&[("A", 2), ("B", 2), ("C", 2)], random_pmf(&mut rng, 8)).unwrap();
        let hab = p.entropy(&["A", "B"]).unwrap();
        let chain = p.entropy(&["A"]).unwrap() + p.conditional_entropy(&["B"], &["A"]).unwrap();
        prop_assert!((hab - chain).abs() < 1e-12);
        let habc = p.entropy(&["A", "B", "C"]).unwrap();
        let chain3 = hab + p.conditional_entropy(&["C"], &["A", "B"]).unwrap();
        prop_assert!((habc - chain3).abs() < 1e-12);
        prop_assert!(p.mutual_information(&["A"], &["B"]).unwrap() >= -1e-12);
        prop_assert!(p.conditional_mi(&["A"], &["B"], &["C"]).unwrap() >= -1e-12);
    }

    #[test]
    fn data_processing_on_composed_kernels(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pa = random_pmf(&mut rng, 2);
        let kb: Vec<Vec<f64>> = (0..2).map(|_| random_pmf(&mut rng, 2)).collect();
        let kc: Vec<Vec<f64>> = (0..2).map(|_| random_pmf(&mut rng, 2)).collect();
        let p = JointPmf::from_fn(&[("A", 2), ("B", 2), ("C", 2)], |i| pa[i[0]] * kb[i[0]][i[1]] * kc[i[1]][i[2]]).unwrap();
        let iab = p.mutual_information(&["A"], &["B"]).unwrap();
        let iac = p.mutual_information(&["A"], &["C"]).unwrap();
        let ibc = p.mutual_information(&["B"], &["C"]).unwrap();
        prop_assert!(iac <= iab + 1e-12);
        prop_assert!(iac <= ibc + 1e-12);
        prop_assert!(p.conditional_mi(&["A"], &["C"], &["B"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn marginals_keep_the_mass(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = JointPmf::new(&[("A", 3), ("B", 2), ("C", 4)], random_pmf(&mut rng, 24)).unwrap();
        for keep in [vec!["A"], vec!["C", "A"], vec!["B"], vec![]] {
            let m = p.marginal(&keep).unwrap();
            prop_assert!((m.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn group_quantity_dominates_the_plain_ones_on_z4(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let p = JointPmf::new(&[("V", 4), ("S", 3)], random_pmf(&mut rng, 12)).unwrap();
        let i_s = group_mi_source_zpr(&p, "V", &["S"], &g).unwrap();
        let mi = p.mutual_information(&["V"], &["S"]).unwrap();
        prop_assert!(i_s >= mi - 1e-12);
        let abelian = group_mi_source_abelian(&p, "V", &["S"], &g, DEFAULT_WEIGHT_GRID).unwrap();
        prop_assert!((abelian - i_s).abs() < 1e-12);
        // log|V| - H(V|S) equals I(V;S) only when V is uniform, so that bound needs
        // a uniform marginal.
        let ps: Vec<Vec<f64>> = (0..4).map(|_| random_pmf(&mut rng, 3)).collect();
        let u = JointPmf::from_fn(&[("V", 4), ("S", 3)], |i| 0.25 * ps[i[0]][i[1]]).unwrap();
        let i_u = group_mi_source_zpr(&u, "V", &["S"], &g).unwrap();
        prop_assert!(i_u >= 2.0 - u.conditional_entropy(&["V"], &["S"]).unwrap() - 1e-12);
    }

    #[test]
    fn typical_sets_grow_with_delta(
        seq in prop::collection::vec(0usize..3, 1..60),
        d1 in 0.01f64..2.0,
        d2 in 0.01f64..2.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pmf = random_pmf(&mut rng, 3);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        if is_typical(&seq, &pmf, lo).unwrap() {
            prop_assert!(is_typical(&seq, &pmf, hi).unwrap());
        }
    }

    #[test]
    fn envelope_is_a_concave_idempotent_majorant(
        ys in prop::collection::vec(-2.0f64..2.0, 1..25),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = 0.0;
        let pts: Vec<(f64, f64)> = ys
            .iter()
            .map(|&y| {
                x += 0.01 + rng.random::<f64>();
                (x, y)
            })
            .collect();
        let env = upper_convex_envelope(&pts).unwrap();
        for &(px, py) in &pts {
            prop_assert!(env.eval(px).unwrap() >= py - 1e-12);
        }
        let v = env.vertices();
        for w in v.windows(3) {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            prop_assert!(s2 <= s1 + 1e-9);
        }
        let again = upper_convex_envelope(v).unwrap();
        prop_assert_eq!(again.vertices(), v);
    }
}

// ---- regions ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn constant_v_reduces_the_superposition_bounds(seed in any::<u64>(), ch_pick in 0usize..2) {
        let ch = Arc::new(if ch_pick == 0 { bdd() } else { example1() });
        let tc = random_test_channel(&ch, 2, 1, seed);
        let a = alpha_bounds(&tc).unwrap();
        let r = rsf_bounds(&tc).unwrap();
        prop_assert!((a.r1 - r.r1).abs() < 1e-12);
        prop_assert!((a.r2 - r.r2).abs() < 1e-12);
        prop_assert!((a.sum - r.sum).abs() < 1e-12);
    }

    #[test]
    fn constant_u_reduces_to_the_linear_sum_rate(seed in any::<u64>(), ch_pick in 0usize..2) {
        let ch = Arc::new(if ch_pick == 0 { bdd() } else { example1() });
        let tc = random_test_channel(&ch, 1, 2, seed);
        let r = rsf_bounds(&tc).unwrap();
        prop_assert!((r.sum - beta_f_sum_rate(&tc).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn best_sum_rate_is_monotone_and_reproducible() {
    let grid = tau_grid(0.0, 0.5, 0.05).unwrap();
    let opts = SearchOptions {
        step: 0.25,
        ..Default::default()
    };
    for (ch, fam) in [
        (bdd(), SearchFamily::Alpha),
        (example1(), SearchFamily::BetaF),
    ] {
        let a = best_sum_rate(&ch, fam, &grid, &opts).unwrap();
        let b = best_sum_rate(&ch, fam, &grid, &opts).unwrap();
        assert_eq!(a, b);
        let r = a.sum_rates();
        assert!(r.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{r:?}");
        assert!(a.taus.windows(2).all(|w| w[1] >= w[0]));
        for (e, p) in r.iter().zip(&a.pre_envelope) {
            assert!(*e >= p - 1e-12);
        }
    }
}

// ---- simulation ----

#[test]
fn encoded_types_approach_the_markov_product() {
    let tc = bdd_linear(0.25).unwrap();
    let rate = 0.6 * beta_f_sum_rate(&tc).unwrap();
    let tv: Vec<f64> = [12, 24, 36]
        .into_iter()
        .map(|n| {
            let dims = mac_params_for_rate(&tc, n, rate, 0.05).unwrap();
            let mut p = SimParams::new(n, dims, 2.0, 10_000, 7);
            p.markov_tv = true;
            simulate_mac(&tc, &p).unwrap().markov_tv.unwrap()
        })
        .collect();
    assert!(tv[0] > tv[1] && tv[1] > tv[2], "{tv:?}");
}

#[test]
fn zero_rate_error_falls_with_block_length() {
    let tc = bdd_linear(0.25).unwrap();
    let err: Vec<f64> = [12, 18, 24]
        .into_iter()
        .map(|n| {
            let dims = mac_params_for_rate(&tc, n, 0.0, 0.2).unwrap();
            assert_eq!(dims.l, [0, 0]);
            // At delta = 2 there are no errors left to see at any of these lengths.
            simulate_mac(&tc, &SimParams::new(n, dims, 1.5, 10_000, 3))
                .unwrap()
                .dec_err_rate()
        })
        .collect();
    assert!(err[0] > err[1] && err[1] > err[2], "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reports_are_consistent_and_seed_determined(
        n in 4usize..=10,
        k in 1usize..=4,
        l in 0usize..=2,
        seed in any::<u64>(),
    ) {
        let tc = bdd_linear(0.25).unwrap();
        let p = SimParams::new(n, MacParams { k: [k, k], l: [l, l] }, 1.0, 200, seed);
        let a = simulate_mac(&tc, &p).unwrap();
        let b = simulate_mac(&tc, &p).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.enc_failures.iter().all(|&c| c <= a.trials));
        prop_assert!(a.typical_state_failures.iter().zip(&a.enc_failures).all(|(t, e)| t <= e));
        prop_assert!(a.dec_errors <= a.trials && a.competitor_events <= a.trials);
    }
}

#[test]
fn matrix_left_mul_matches_rows() {
    let f = Field::new(3, 1).unwrap();
    let g = Matrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 1]], 3).unwrap();
    assert_eq!(g.left_mul(&f, &[2, 1]), vec![2, 2, 1]);
}
