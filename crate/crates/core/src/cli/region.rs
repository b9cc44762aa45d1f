use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use super::{csv_err, OutputArgs};
use crate::error::{invalid, Error, Result};
use crate::info::RateCurve;
use crate::regions::{
    best_sum_rate, catalog, families, parse_channel_config, qdd_closed_forms, rsf_bounds,
    rsg_bounds, tau_grid, ChannelSpec, SearchFamily, SearchOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum RegionFamily {
    /// Unstructured codes, best over the test channel grid.
    Alpha,
    /// Linear coset codes, best over the test channel grid.
    BetaF,
    /// Superposition of coset codes on unstructured codes, for a named test channel.
    Rsf,
    /// Group-code version of rsf, for a named test channel.
    Rsg,
    /// Closed-form curves of the quaternary channel.
    ClosedForm,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    /// Catalog channel name.
    #[arg(long, conflicts_with = "config")]
    pub channel: Option<String>,
    /// Channel description file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: RegionFamily,
    /// Cost grid: `lo:hi:step`, a comma-separated list, or one value.
    #[arg(long, default_value = "0:0.5:0.05")]
    pub tau: String,
    /// Grid step of each conditional p(a | s) in the search.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Auxiliary alphabet size in the search (a prime power for beta_f).
    #[arg(long, default_value_t = 2)]
    pub aux_size: usize,
    /// Largest number of test channel pairs the search may evaluate.
    #[arg(long, default_value_t = 200_000_000)]
    pub budget: u128,
    /// Parametric test channel for rsf and rsg (default depends on the channel).
    #[arg(long)]
    pub test_channel: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `lo:hi:step`, `a,b,c` or a single value into a strictly increasing grid.
pub fn parse_tau_spec(spec: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("--tau: bad number '{}'", t.trim())))?;
        if !v.is_finite() || v < 0.0 {
            return invalid(format!("--tau: {v} must be finite and nonnegative"));
        }
        Ok(v)
    };
    let spec = spec.trim();
    if spec.is_empty() {
        return invalid("--tau: empty grid");
    }
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return invalid("--tau: range must be lo:hi:step");
        }
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || hi < lo {
            return invalid("--tau: need step > 0 and hi >= lo");
        }
        tau_grid(lo, hi, step)?
    } else {
        spec.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() {
        return invalid("--tau: empty grid");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("--tau: values must be strictly increasing");
    }
    Ok(grid)
}

fn load_channel(args: &RegionArgs) -> Result<Option<ChannelSpec>> {
    match (&args.channel, &args.config) {
        (Some(name), _) => catalog(name).map(Some),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Validation(format!("--config {}: {e}", path.display())))?;
            parse_channel_config(&text).map(Some)
        }
        (None, None) => Ok(None),
    }
}

fn named_curve(args: &RegionArgs, taus: &[f64], rsg: bool) -> Result<RateCurve> {
    if args.config.is_some() {
        return invalid("--family rsf/rsg needs a catalog --channel and a named --test-channel");
    }
    let channel = args.channel.as_deref();
    let tc_name = match (&args.test_channel, channel) {
        (Some(t), _) => t.clone(),
        (None, Some("qdd")) if rsg => "qdd-group".to_string(),
        (None, Some(c)) if !rsg => match families::default_for_channel(c) {
            Some(t) => t.to_string(),
            None => return invalid(format!("--test-channel is required for channel '{c}'")),
        },
        (None, _) => return invalid("--test-channel is required"),
    };
    let mut values = Vec::with_capacity(taus.len());
    for &tau in taus {
        let tc = families::named(&tc_name, tau)?;
        if let Some(c) = channel {
            let expected = catalog(c)?;
            if expected.name() != tc.channel().name() {
                return invalid(format!(
                    "--test-channel {tc_name} belongs to channel '{}', not '{c}'",
                    tc.channel().name()
                ));
            }
        }
        let b = if rsg {
            rsg_bounds(&tc)?
        } else {
            rsf_bounds(&tc)?
        };
        values.push(b.max_sum_rate());
    }
    RateCurve::new(if rsg { "rsg" } else { "rsf" }, taus.to_vec(), values)
}

struct Row {
    tau: f64,
    sum_rate: f64,
    method: String,
    pre_envelope: f64,
}

fn curve_rows(curve: &RateCurve) -> Vec<Row> {
    curve
        .rows()
        .into_iter()
        .map(|(tau, sum_rate, method, pre_envelope)| Row {
            tau,
            sum_rate,
            method,
            pre_envelope,
        })
        .collect()
}

/// Rows of the `region` subcommand.
fn compute(args: &RegionArgs) -> Result<Vec<Row>> {
    let taus = parse_tau_spec(&args.tau)?;
    if !(args.step > 0.0 && args.step <= 1.0) {
        return invalid("--step must lie in (0, 1]");
    }
    if args.aux_size < 1 {
        return invalid("--aux-size must be at least 1");
    }
    match args.family {
        RegionFamily::Alpha | RegionFamily::BetaF => {
            let Some(ch) = load_channel(args)? else {
                return invalid("--channel or --config is required");
            };
            let family = if args.family == RegionFamily::Alpha {
                SearchFamily::Alpha
            } else {
                SearchFamily::BetaF
            };
            let opts = SearchOptions {
                step: args.step,
                aux_size: args.aux_size,
                pair_budget: args.budget,
            };
            Ok(curve_rows(&best_sum_rate(&ch, family, &taus, &opts)?))
        }
        RegionFamily::Rsf => Ok(curve_rows(&named_curve(args, &taus, false)?)),
        RegionFamily::Rsg => Ok(curve_rows(&named_curve(args, &taus, true)?)),
        RegionFamily::ClosedForm => {
            if args.channel.as_deref() != Some("qdd") {
                return invalid("--family closed_form is only defined for --channel qdd");
            }
            // Formula values are reported as they are, without time sharing.
            let mut rows = Vec::with_capacity(3 * taus.len());
            for &tau in &taus {
                let c = qdd_closed_forms(tau)?;
                for (method, v) in [
                    ("alpha", c.alpha),
                    ("beta_f", c.beta_f),
                    ("beta_g", c.beta_g),
                ] {
                    rows.push(Row {
                        tau,
                        sum_rate: v,
                        method: method.to_string(),
                        pre_envelope: v,
                    });
                }
            }
            Ok(rows)
        }
    }
}

pub(super) fn run(args: &RegionArgs, out: &mut dyn Write) -> Result<()> {
    let rows = compute(args)?;
    args.output.with_writer(out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["tau", "sum_rate", "method", "pre_envelope"])
            .map_err(csv_err)?;
        for r in &rows {
            csv.write_record([
                r.tau.to_string(),
                r.sum_rate.to_string(),
                r.method.clone(),
                r.pre_envelope.to_string(),
            ])
            .map_err(csv_err)?;
        }
        csv.flush().map_err(super::io_err)
    })
}
