use std::io::Write;
use std::sync::Arc;

use clap::Args;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{io_err, EXIT_OK, EXIT_VERIFICATION};
use crate::algebra::Field;
use crate::codesim::{
    check_coset_independence, check_mac_coset_independence, check_pairwise_independence,
    check_sum_identity, LemmaOptions, LemmaReport, DEFAULT_LEMMA_CAP,
};
use crate::error::{Error, Result};
use crate::info::{entropy_of, sanov_bound, TypicalityTest};

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Also run the broken variants, which must fail.
    #[arg(long)]
    pub negative_controls: bool,
    /// Largest ensemble an exhaustive check may enumerate; larger ones are skipped.
    #[arg(long, default_value_t = DEFAULT_LEMMA_CAP)]
    pub cap: u128,
    /// Seed of the sampled checks.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A negative control that failed, as it should.
    ExpectedFail,
    /// A negative control that passed.
    UnexpectedPass,
    Skipped,
}

impl CheckStatus {
    fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::ExpectedFail => "XFAIL",
            CheckStatus::UnexpectedPass => "XPASS",
            CheckStatus::Skipped => "SKIP",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, CheckStatus::Fail | CheckStatus::UnexpectedPass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

fn from_lemma(name: &str, r: Result<LemmaReport>, negative: bool) -> CheckOutcome {
    match r {
        Ok(rep) => {
            let status = match (rep.passed, negative) {
                (true, false) => CheckStatus::Pass,
                (false, false) => CheckStatus::Fail,
                (false, true) => CheckStatus::ExpectedFail,
                (true, true) => CheckStatus::UnexpectedPass,
            };
            let detail = if rep.detail.is_empty() {
                format!("{} ensemble members", rep.ensembles)
            } else {
                format!("{} ensemble members; {}", rep.ensembles, rep.detail)
            };
            CheckOutcome {
                name: format!("{name}: {}", rep.name),
                status,
                detail,
            }
        }
        Err(Error::Budget {
            what,
            required,
            cap,
        }) => CheckOutcome {
            name: name.to_string(),
            status: CheckStatus::Skipped,
            detail: format!("{what} needs {required}, cap is {cap}"),
        },
        Err(e) => CheckOutcome {
            name: name.to_string(),
            status: CheckStatus::Fail,
            detail: e.to_string(),
        },
    }
}

fn sampled(name: &str, r: Result<(bool, String)>) -> CheckOutcome {
    match r {
        Ok((ok, detail)) => CheckOutcome {
            name: name.to_string(),
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail,
        },
        Err(e) => CheckOutcome {
            name: name.to_string(),
            status: CheckStatus::Fail,
            detail: e.to_string(),
        },
    }
}

fn sample_seq(d: &WeightedIndex<f64>, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Typical sequences have -(1/n) log p(x^n) within delta of H(X).
fn typical_probability_sandwich(seed: u64) -> Result<(bool, String)> {
    let pmf = [0.2, 0.3, 0.5];
    let delta = 0.5;
    let h = entropy_of(&pmf);
    let test = TypicalityTest::new(&pmf, delta)?;
    let d = WeightedIndex::new(pmf).map_err(|e| Error::Internal(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in [50, 200] {
        let mut found = 0;
        let mut attempts = 0;
        while found < 1000 && attempts < 1_000_000 {
            attempts += 1;
            let seq = sample_seq(&d, n, &mut rng);
            if !test.accepts(&seq)? {
                continue;
            }
            found += 1;
            let lp: f64 = seq.iter().map(|&x| pmf[x].log2()).sum();
            worst = worst.max((-lp / n as f64 - h).abs());
        }
        checked += found;
        if found < 1000 {
            return Ok((false, format!("only {found} typical sequences at n = {n}")));
        }
    }
    Ok((
        worst <= delta,
        format!("{checked} typical sequences, largest deviation {worst:.4} <= {delta}"),
    ))
}

/// |T_delta| <= 2^{n (H + 2 delta)} for a binary pmf and every n up to 20, counted
/// exactly by type.
fn typical_set_size(_: u64) -> Result<(bool, String)> {
    let pmf = [0.3, 0.7];
    let delta = 0.2;
    let h = entropy_of(&pmf);
    let test = TypicalityTest::new(&pmf, delta)?;
    let mut tightest = f64::INFINITY;
    for n in 1..=20usize {
        let mut size = 0u64;
        let mut binom = 1u64;
        for ones in 0..=n {
            if ones > 0 {
                binom = binom * (n - ones + 1) as u64 / ones as u64;
            }
            if test.accepts_counts(&[(n - ones) as u32, ones as u32], n) {
                size += binom;
            }
        }
        let bound = (n as f64 * (h + 2.0 * delta)).exp2();
        if size as f64 > bound {
            return Ok((false, format!("n = {n}: |T| = {size} exceeds {bound:.1}")));
        }
        tightest = tightest.min(bound - size as f64);
    }
    Ok((true, format!("n = 1..20, smallest margin {tightest:.1}")))
}

/// Empirical P(X^n not typical) stays below the exponential bound plus three
/// standard errors.
fn sanov_empirics(seed: u64) -> Result<(bool, String)> {
    let pmf = [0.3, 0.7];
    let delta = 0.5;
    let trials = 10_000u32;
    let test = TypicalityTest::new(&pmf, delta)?;
    let d = WeightedIndex::new(pmf).map_err(|e| Error::Internal(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [100, 400] {
        let mut misses = 0u32;
        for _ in 0..trials {
            if !test.accepts(&sample_seq(&d, n, &mut rng))? {
                misses += 1;
            }
        }
        let rate = misses as f64 / trials as f64;
        let bound = sanov_bound(&pmf, delta, n)?;
        let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / trials as f64).sqrt();
        ok &= rate <= bound + 3.0 * sigma;
        parts.push(format!("n = {n}: {rate:.4} vs {bound:.4}"));
    }
    Ok((ok, parts.join("; ")))
}

/// Runs every check and returns the outcomes in a fixed order.
pub fn run_battery(args: &VerifyArgs) -> Vec<CheckOutcome> {
    let f2 = Arc::new(Field::new(2, 1).expect("GF(2)"));
    let opts = LemmaOptions {
        cap: args.cap,
        negative_control: false,
    };
    let control = LemmaOptions {
        negative_control: true,
        ..opts
    };
    let mut out = vec![
        from_lemma(
            "uniform and pairwise independent codewords",
            check_pairwise_independence(&f2, 2, 1, 0, opts),
            false,
        ),
        from_lemma(
            "uniform and pairwise independent codewords",
            check_pairwise_independence(&f2, 3, 1, 1, opts),
            false,
        ),
        from_lemma(
            "coset independent of codewords in other cosets",
            check_coset_independence(&f2, 2, 1, 1, opts),
            false,
        ),
        from_lemma(
            "coset pair independent of sum-code codewords in other cosets",
            check_mac_coset_independence(&f2, 2, [1, 1], [1, 1], opts),
            false,
        ),
        from_lemma(
            "sum of user codewords lies in the sum code",
            check_sum_identity(&f2, 2, [1, 2], [1, 0], args.cap),
            false,
        ),
        sampled(
            "typical sequence probability sandwich",
            typical_probability_sandwich(args.seed),
        ),
        sampled("typical set size bound", typical_set_size(args.seed)),
        sampled(
            "exponential bound on atypicality",
            sanov_empirics(args.seed),
        ),
    ];
    if args.negative_controls {
        out.push(from_lemma(
            "control: codewords without bias",
            check_pairwise_independence(&f2, 3, 1, 1, control),
            true,
        ));
        out.push(from_lemma(
            "control: codeword from the same coset",
            check_coset_independence(&f2, 2, 1, 1, control),
            true,
        ));
        out.push(from_lemma(
            "control: sum-code codeword from the same coset pair",
            check_mac_coset_independence(&f2, 2, [1, 1], [1, 1], control),
            true,
        ));
    }
    out
}

pub(super) fn run(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let outcomes = run_battery(args);
    let mut failed = 0;
    for o in &outcomes {
        writeln!(out, "{:5} {} ({})", o.status.label(), o.name, o.detail).map_err(io_err)?;
        failed += o.status.is_failure() as usize;
    }
    let skipped = outcomes
        .iter()
        .filter(|o| o.status == CheckStatus::Skipped)
        .count();
    writeln!(
        out,
        "{} checks, {failed} failed, {skipped} skipped",
        outcomes.len()
    )
    .map_err(io_err)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}
