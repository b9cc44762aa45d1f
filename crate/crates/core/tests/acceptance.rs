//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p coset-mac --test acceptance`.

use std::sync::Arc;
use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coset_mac::algebra::{Field, GroupSpec};
use coset_mac::codesim::{
    check_coset_independence, check_pairwise_independence, decoder_error_bound_mac,
    encoder_failure_bound, mac_params_for_rate, simulate_mac, LemmaOptions, MacParams, SimParams,
    SimReport,
};
use coset_mac::info::{
    group_mi_source_abelian, group_mi_source_zpr, sanov_bound, JointPmf, TypicalityTest,
    DEFAULT_WEIGHT_GRID,
};
use coset_mac::regions::families::{bdd_linear, example3_ternary, qdd_uniform_noise, QddLabel};
use coset_mac::regions::{
    alpha_bounds, alpha_bounds_raw, bdd, best_sum_rate, beta_f_sum_rate, beta_f_sum_rate_raw,
    blackwell, example1, example2, qdd_closed_forms, rsg_bounds, tau_grid, ChannelSpec,
    SearchFamily, SearchOptions,
};

// Tolerances.
const TOL_C1: f64 = 1e-9;
const TOL_C2: f64 = 0.03;
const TOL_C3: f64 = 0.02;
const C4_TARGET: f64 = 0.0017;
const TOL_C4: f64 = 1e-4;
const TOL_C5: f64 = 1e-9;
const TOL_C6: f64 = 1e-12;
const C8_TRIALS: u64 = 10_000;
const C8_SEED: u64 = 7;
const C8_DELTA: f64 = 2.0;
const C8_MARGIN: f64 = 0.05;
const C8_OVERLOAD_FLOOR: f64 = 0.2;
const C9_SIGMAS: f64 = 3.0;
const C9_BOUND_CEILING: f64 = 0.5;

type Outcome = Result<String, String>;

/// Binary entropy, written out here so the suite does not lean on the library's.
fn hb(p: f64) -> f64 {
    let t = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    t(p) + t(1.0 - p)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..=9 {
        let tau = 0.05 * i as f64;
        let v = beta_f_sum_rate(&bdd_linear(tau).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst = worst.max((v - hb(tau)).abs());
    }
    ensure(
        worst <= TOL_C1,
        format!("max |beta_f - h_b| = {worst:.2e} over tau = 0.05..0.45"),
    )
}

/// Least concave majorant of max(0, 2 h_b(t) - 1) on [0, 1/2]: the line from the
/// origin tangent to 2 h_b - 1, then the curve itself.
fn bdd_unstructured_oracle(tau: f64) -> f64 {
    let f = |t: f64| 2.0 * hb(t) - 1.0;
    let df = |t: f64| 2.0 * ((1.0 - t) / t).log2();
    // g(t) = t f'(t) - f(t) is decreasing on (0, 1/2); its root is the tangent point.
    let (mut lo, mut hi) = (0.11, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * df(mid) - f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t0 = 0.5 * (lo + hi);
    if tau <= t0 {
        tau * f(t0) / t0
    } else {
        f(tau)
    }
}

fn c2() -> Outcome {
    let grid = tau_grid(0.0, 0.5, 0.05).map_err(|e| e.to_string())?;
    let curve = best_sum_rate(
        &bdd(),
        SearchFamily::Alpha,
        &grid,
        &SearchOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for tau in [0.15, 0.25, 0.35] {
        let got = curve.value_at(tau).map_err(|e| e.to_string())?;
        let want = bdd_unstructured_oracle(tau);
        ok &= (got - want).abs() <= TOL_C2;
        parts.push(format!("tau {tau}: {got:.4} vs {want:.4}"));
    }
    ensure(ok, parts.join("; "))
}

fn c3() -> Outcome {
    let grid = tau_grid(0.0, 0.5, 0.05).map_err(|e| e.to_string())?;
    let curve = best_sum_rate(
        &example1(),
        SearchFamily::BetaF,
        &grid,
        &SearchOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for tau in [0.05, 0.1, 0.15, 0.2, 0.3] {
        // h_b(2 tau)/2 is concave and reaches 1/2 at tau = 1/4, so it is its own envelope.
        let want = if tau <= 0.25 {
            hb(2.0 * tau) / 2.0
        } else {
            0.5
        };
        worst = worst.max((curve.value_at(tau).map_err(|e| e.to_string())? - want).abs());
    }
    ensure(
        worst <= TOL_C3,
        format!("max deviation {worst:.2e} at tau = 0.05, 0.1, 0.15, 0.2, 0.3"),
    )
}

fn c4() -> Outcome {
    let tc = example3_ternary().map_err(|e| e.to_string())?;
    let beta = beta_f_sum_rate_raw(&tc).map_err(|e| e.to_string())?;
    let alpha = alpha_bounds_raw(&tc).map_err(|e| e.to_string())?.sum;
    ensure(
        (beta - C4_TARGET).abs() <= TOL_C4 && alpha < 0.0,
        format!("beta_f = {beta:.5}, unstructured sum bound = {alpha:.5}"),
    )
}

fn c5() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..=7 {
        let tau = 0.1 * i as f64;
        let cf = qdd_closed_forms(tau).map_err(|e| e.to_string())?;
        let field = qdd_uniform_noise(tau, QddLabel::Field).map_err(|e| e.to_string())?;
        let group = qdd_uniform_noise(tau, QddLabel::Group).map_err(|e| e.to_string())?;
        let alpha = alpha_bounds(&field)
            .map_err(|e| e.to_string())?
            .max_sum_rate();
        let beta_f = beta_f_sum_rate(&field).map_err(|e| e.to_string())?;
        let beta_g = rsg_bounds(&group)
            .map_err(|e| e.to_string())?
            .max_sum_rate();
        worst = worst
            .max((alpha - cf.alpha).abs())
            .max((beta_f - cf.beta_f).abs())
            .max((beta_g - cf.beta_g).abs());
    }
    let c = qdd_closed_forms(0.3).map_err(|e| e.to_string())?;
    ensure(
        worst <= TOL_C5 && c.beta_g > c.alpha.max(c.beta_f),
        format!(
            "max deviation {worst:.2e}; at tau 0.3 alpha {:.4}, beta_f {:.4}, beta_g {:.4}",
            c.alpha, c.beta_f, c.beta_g
        ),
    )
}

fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for (p, r) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        let g = GroupSpec::cyclic(p, r).map_err(|e| e.to_string())?;
        let q = g.order();
        for _ in 0..100 {
            let mut probs: Vec<f64> = (0..q * 3).map(|_| rng.random::<f64>().powi(3)).collect();
            let total: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|x| *x /= total);
            let pmf = JointPmf::new(&[("V", q), ("S", 3)], probs).map_err(|e| e.to_string())?;
            let a = group_mi_source_abelian(&pmf, "V", &["S"], &g, DEFAULT_WEIGHT_GRID)
                .map_err(|e| e.to_string())?;
            let z = group_mi_source_zpr(&pmf, "V", &["S"], &g).map_err(|e| e.to_string())?;
            worst = worst.max((a - z).abs());
        }
    }
    ensure(
        worst <= TOL_C6,
        format!("max |abelian - cyclic| = {worst:.2e} over 400 pmfs on Z2, Z4, Z8, Z9"),
    )
}

fn c7() -> Outcome {
    let f2 = Arc::new(Field::new(2, 1).map_err(|e| e.to_string())?);
    let opts = LemmaOptions::default();
    let control = LemmaOptions {
        negative_control: true,
        ..opts
    };
    let runs = [
        (
            "pairwise (2,1,0)",
            check_pairwise_independence(&f2, 2, 1, 0, opts),
            true,
        ),
        (
            "pairwise (3,1,1)",
            check_pairwise_independence(&f2, 3, 1, 1, opts),
            true,
        ),
        (
            "coset (2,1,1)",
            check_coset_independence(&f2, 2, 1, 1, opts),
            true,
        ),
        (
            "pairwise control",
            check_pairwise_independence(&f2, 3, 1, 1, control),
            false,
        ),
        (
            "coset control",
            check_coset_independence(&f2, 2, 1, 1, control),
            false,
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, r, expect) in runs {
        let r = r.map_err(|e| format!("{name}: {e}"))?;
        ok &= r.passed == expect;
        parts.push(format!(
            "{name} {} over {}",
            if r.passed { "holds" } else { "violated" },
            r.ensembles
        ));
    }
    ensure(ok, parts.join("; "))
}

struct SimRun {
    label: String,
    tau: f64,
    delta: f64,
    dims: MacParams,
    report: SimReport,
}

fn run_sim(
    label: String,
    tau: f64,
    n: usize,
    dims: MacParams,
    delta: f64,
    seed: u64,
) -> Result<SimRun, String> {
    let tc = bdd_linear(tau).map_err(|e| e.to_string())?;
    let report = simulate_mac(&tc, &SimParams::new(n, dims, delta, C8_TRIALS, seed))
        .map_err(|e| e.to_string())?;
    Ok(SimRun {
        label,
        tau,
        delta,
        dims,
        report,
    })
}

fn c8(runs: &mut Vec<SimRun>) -> Outcome {
    let tau = 0.25;
    let tc = bdd_linear(tau).map_err(|e| e.to_string())?;
    let mut errs = Vec::new();
    for n in [12, 24, 36] {
        let dims =
            mac_params_for_rate(&tc, n, 0.6 * hb(tau), C8_MARGIN).map_err(|e| e.to_string())?;
        let r = run_sim(format!("60% n={n}"), tau, n, dims, C8_DELTA, C8_SEED)?;
        errs.push(r.report.dec_err_rate());
        runs.push(r);
    }
    let dims = mac_params_for_rate(&tc, 36, 1.2 * hb(tau), C8_MARGIN).map_err(|e| e.to_string())?;
    let over = run_sim("120% n=36".into(), tau, 36, dims, C8_DELTA, C8_SEED)?;
    let over_err = over.report.dec_err_rate();
    runs.push(over);
    ensure(
        errs[0] > errs[1] && errs[1] > errs[2] && over_err > C8_OVERLOAD_FLOOR,
        format!(
            "60%: {:.4} > {:.4} > {:.4}; 120% at n=36: {over_err:.4}",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn within(rate: f64, bound: f64, trials: u64) -> bool {
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    rate <= bound + C9_SIGMAS * sigma
}

fn c9(runs: &mut Vec<SimRun>) -> Outcome {
    // Configurations where the bounds are informative at n = 36.
    runs.push(run_sim(
        "tau 0.25 delta 0.1".into(),
        0.25,
        36,
        MacParams {
            k: [9, 9],
            l: [5, 4],
        },
        0.1,
        11,
    )?);
    runs.push(run_sim(
        "tau 0.5 delta 0.2".into(),
        0.5,
        36,
        MacParams {
            k: [9, 9],
            l: [0, 0],
        },
        0.2,
        11,
    )?);
    let mut compared = 0;
    let mut violations = Vec::new();
    for run in runs.iter() {
        let tc = bdd_linear(run.tau).map_err(|e| e.to_string())?;
        let r = &run.report;
        for j in 0..2 {
            let b = encoder_failure_bound(&tc, j, r.n, run.dims.k[j], run.delta / 2.0)
                .map_err(|e| e.to_string())?;
            if b <= C9_BOUND_CEILING {
                compared += 1;
                let rate = r.typical_state_failure_rate(j);
                if !within(rate, b, r.trials) {
                    violations.push(format!("{} encoder {j}: {rate:.4} > {b:.4}", run.label));
                }
            }
        }
        let k = run.dims.k[0].max(run.dims.k[1]);
        let l = run.dims.l[0] + run.dims.l[1];
        let b = decoder_error_bound_mac(&tc, r.n, k, l, run.delta).map_err(|e| e.to_string())?;
        if b <= C9_BOUND_CEILING {
            compared += 1;
            let rate = r.competitor_rate();
            if !within(rate, b, r.trials) {
                violations.push(format!("{} decoder: {rate:.4} > {b:.4}", run.label));
            }
        }
    }
    if violations.is_empty() && compared > 0 {
        Ok(format!(
            "{compared} informative comparisons over {} runs, no violations",
            runs.len()
        ))
    } else if compared == 0 {
        Err("no informative bound to compare against".into())
    } else {
        Err(violations.join("; "))
    }
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // Probability sandwich on 10^3 typical sequences.
    let pmf = [0.2f64, 0.3, 0.5];
    let delta = 0.5;
    let h: f64 = pmf.iter().map(|p| -p * p.log2()).sum();
    let test = TypicalityTest::new(&pmf, delta).map_err(|e| e.to_string())?;
    let d = WeightedIndex::new(pmf).map_err(|e| e.to_string())?;
    let n = 100;
    let mut found = 0;
    let mut worst: f64 = 0.0;
    while found < 1000 {
        let seq: Vec<usize> = (0..n).map(|_| d.sample(&mut rng)).collect();
        if !test.accepts(&seq).map_err(|e| e.to_string())? {
            continue;
        }
        found += 1;
        let lp: f64 = seq.iter().map(|&x| pmf[x].log2()).sum();
        worst = worst.max((-lp / n as f64 - h).abs());
    }
    let sandwich = worst <= delta;

    // Size bound by listing every binary sequence.
    let bp = [0.3, 0.7];
    let bdelta = 0.2;
    let bh = hb(0.3);
    let btest = TypicalityTest::new(&bp, bdelta).map_err(|e| e.to_string())?;
    let mut size_ok = true;
    for n in 1..=20usize {
        let mut size = 0u64;
        let mut seq = vec![0usize; n];
        for word in 0u32..(1 << n) {
            for (t, s) in seq.iter_mut().enumerate() {
                *s = ((word >> t) & 1) as usize;
            }
            size += btest.accepts(&seq).map_err(|e| e.to_string())? as u64;
        }
        size_ok &= size as f64 <= (n as f64 * (bh + 2.0 * bdelta)).exp2();
    }

    // Exponential atypicality bound against 10^4 trials.
    let sd = WeightedIndex::new(bp).map_err(|e| e.to_string())?;
    let stest = TypicalityTest::new(&bp, 0.5).map_err(|e| e.to_string())?;
    let mut sanov_ok = true;
    let mut parts = Vec::new();
    for n in [100, 400] {
        let trials = 10_000u32;
        let mut misses = 0;
        for _ in 0..trials {
            let seq: Vec<usize> = (0..n).map(|_| sd.sample(&mut rng)).collect();
            misses += !stest.accepts(&seq).map_err(|e| e.to_string())? as u32;
        }
        let rate = misses as f64 / trials as f64;
        let b = sanov_bound(&bp, 0.5, n)
            .map_err(|e| e.to_string())?
            .min(1.0);
        sanov_ok &= within(rate, b, trials as u64);
        parts.push(format!("n={n} {rate:.4} vs {b:.4}"));
    }
    ensure(
        sandwich && size_ok && sanov_ok,
        format!(
            "sandwich deviation {worst:.3} <= {delta}: {sandwich}; size bound n <= 20: {size_ok}; atypicality {}",
            parts.join(", ")
        ),
    )
}

fn crossing(ch: &ChannelSpec) -> Result<(usize, usize, usize), String> {
    let grid = tau_grid(0.0, 0.5, 0.05).map_err(|e| e.to_string())?;
    let opts = SearchOptions::default();
    let a = best_sum_rate(ch, SearchFamily::Alpha, &grid, &opts)
        .map_err(|e| e.to_string())?
        .sum_rates();
    let b = best_sum_rate(ch, SearchFamily::BetaF, &grid, &opts)
        .map_err(|e| e.to_string())?
        .sum_rates();
    let beta_wins = a.iter().zip(&b).filter(|(x, y)| **y > **x + 1e-9).count();
    let alpha_wins = a.iter().zip(&b).filter(|(x, y)| **x > **y + 1e-9).count();
    Ok((beta_wins, alpha_wins, grid.len()))
}

fn c11() -> Outcome {
    let (e2_beta, e2_alpha, len) = crossing(&example2())?;
    let (bw_beta, bw_alpha, _) = crossing(&blackwell())?;
    ensure(
        e2_beta > 0 && e2_alpha > 0 && bw_beta > 0,
        format!(
            "example2: beta_f ahead at {e2_beta}/{len}, alpha ahead at {e2_alpha}/{len}; \
             blackwell: beta_f ahead at {bw_beta}/{len}, alpha ahead at {bw_alpha}/{len}"
        ),
    )
}

/// Prints the line for one criterion and returns whether it passed.
fn report(id: u32, out: Outcome, t: Instant) -> bool {
    let secs = t.elapsed().as_secs_f64();
    match out {
        Ok(d) => {
            println!("criterion {id:2}: PASS ({d}) [{secs:.1}s]");
            true
        }
        Err(d) => {
            println!("criterion {id:2}: FAIL ({d}) [{secs:.1}s]");
            false
        }
    }
}

fn main() {
    let mut runs = Vec::new();
    let mut failed = 0;
    let singles: [(u32, fn() -> Outcome); 7] = [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7)];
    for (id, f) in singles {
        let t = Instant::now();
        failed += !report(id, f(), t) as u32;
    }
    let t = Instant::now();
    failed += !report(8, c8(&mut runs), t) as u32;
    let t = Instant::now();
    failed += !report(9, c9(&mut runs), t) as u32;
    let t = Instant::now();
    failed += !report(10, c10(), t) as u32;
    let t = Instant::now();
    failed += !report(11, c11(), t) as u32;
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
