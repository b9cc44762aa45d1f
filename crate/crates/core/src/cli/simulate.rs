use std::io::Write;

use clap::Args;

use super::OutputArgs;
use crate::algebra::DEFAULT_ENUMERATION_CAP;
use crate::codesim::{
    mac_params_for_rate, simulate_mac, write_sim_csv, MacParams, SimParams, SimReport,
};
use crate::error::{invalid, Result};
use crate::regions::{beta_f_sum_rate, families, TestChannel};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Catalog channel; picks the default test channel when --test-channel is absent.
    #[arg(long, default_value = "bdd")]
    pub channel: String,
    /// Parametric test channel (V over a finite field).
    #[arg(long)]
    pub test_channel: Option<String>,
    /// Cost parameter of the test channel.
    #[arg(long, default_value_t = 0.25)]
    pub tau: f64,
    /// Block lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "12,24,36")]
    pub n: Vec<usize>,
    /// Target sum rate in bits per channel use.
    #[arg(long, conflicts_with = "rate_fraction")]
    pub rate_sum: Option<f64>,
    /// Target sum rate as a fraction of the test channel's linear-code sum rate.
    #[arg(long, default_value_t = 0.6)]
    pub rate_fraction: f64,
    /// Extra inner dimension per user, in bits per channel use.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    /// Inner dimensions k1,k2; overrides the rate-based choice (needs --l too).
    #[arg(long, value_delimiter = ',', requires = "l")]
    pub k: Option<Vec<usize>>,
    /// Message dimensions l1,l2.
    #[arg(long, value_delimiter = ',', requires = "k")]
    pub l: Option<Vec<usize>>,
    /// Decoder typicality parameter; the encoders use delta/2.
    #[arg(long, default_value_t = 2.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Draw one code and reuse it in every trial.
    #[arg(long)]
    pub fixed_code: bool,
    /// Largest coset or candidate list walked in one trial.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn test_channel(args: &SimulateArgs) -> Result<TestChannel> {
    let name = match &args.test_channel {
        Some(t) => t.clone(),
        None => match families::default_for_channel(&args.channel) {
            Some(t) => t.to_string(),
            None => {
                return invalid(format!(
                    "--test-channel is required for channel '{}'",
                    args.channel
                ))
            }
        },
    };
    families::named(&name, args.tau)
}

fn validate(args: &SimulateArgs) -> Result<()> {
    if args.trials == 0 {
        return invalid("--trials must be at least 1");
    }
    if args.n.is_empty() || args.n.contains(&0) {
        return invalid("--n must list positive block lengths");
    }
    if !(args.delta > 0.0) || !args.delta.is_finite() {
        return invalid("--delta must be positive and finite");
    }
    if !(args.margin >= 0.0) || !args.margin.is_finite() {
        return invalid("--margin must be finite and nonnegative");
    }
    if let Some(r) = args.rate_sum {
        if !(r >= 0.0) || !r.is_finite() {
            return invalid("--rate-sum must be finite and nonnegative");
        }
    }
    for (flag, v) in [("--k", &args.k), ("--l", &args.l)] {
        if v.as_ref().is_some_and(|v| v.len() != 2) {
            return invalid(format!("{flag} takes two comma-separated values"));
        }
    }
    if !(args.rate_fraction >= 0.0) || !args.rate_fraction.is_finite() {
        return invalid("--rate-fraction must be finite and nonnegative");
    }
    Ok(())
}

pub(super) fn reports(args: &SimulateArgs) -> Result<Vec<SimReport>> {
    validate(args)?;
    let tc = test_channel(args)?;
    let rate = match args.rate_sum {
        Some(r) => r,
        None => args.rate_fraction * beta_f_sum_rate(&tc)?,
    };
    let mut out = Vec::with_capacity(args.n.len());
    for &n in &args.n {
        let dims = match (&args.k, &args.l) {
            (Some(k), Some(l)) => MacParams {
                k: [k[0], k[1]],
                l: [l[0], l[1]],
            },
            _ => mac_params_for_rate(&tc, n, rate, args.margin)?,
        };
        let mut p = SimParams::new(n, dims, args.delta, args.trials, args.seed);
        p.fixed_code = args.fixed_code;
        p.cap = args.cap;
        out.push(simulate_mac(&tc, &p)?);
    }
    Ok(out)
}

pub(super) fn run(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let reports = reports(args)?;
    args.output.with_writer(out, |w| write_sim_csv(&reports, w))
}
