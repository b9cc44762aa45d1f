use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::coding::{allowed_sums, encode_with, sum_output_pmf, user_vs_pmf, SumDecoder};
use super::ensemble::{field_of, sample_mac_pair, MacParams};
use crate::algebra::{Field, MacCodePair, DEFAULT_ENUMERATION_CAP};
use crate::error::{invalid, Result};
use crate::info::TypicalityTest;
use crate::regions::TestChannel;

/// Settings of a Monte Carlo run over the random nested coset code ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub n: usize,
    pub dims: MacParams,
    /// Decoder typicality parameter; encoders use delta/2 and the state check delta/4.
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    /// Reuse one code for every trial instead of drawing a fresh one.
    pub fixed_code: bool,
    /// Largest coset or candidate set walked per trial.
    pub cap: u128,
    /// Also compute the total variation distance of the (V1, S1, S2, V2) type.
    pub markov_tv: bool,
}

impl SimParams {
    pub fn new(n: usize, dims: MacParams, delta: f64, trials: u64, seed: u64) -> Self {
        Self {
            n,
            dims,
            delta,
            trials,
            seed,
            fixed_code: false,
            cap: DEFAULT_ENUMERATION_CAP,
            markov_tv: false,
        }
    }
}

/// Aggregated outcome of [`simulate_mac`]. Rates are counts divided by `trials`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub n: usize,
    /// Realized sum rate (l1 + l2) log q / n in bits per channel use.
    pub rate_sum: f64,
    pub trials: u64,
    pub seed: u64,
    pub enc_failures: [u64; 2],
    pub dec_errors: u64,
    /// Trials where D held a message pair other than the transmitted one.
    pub competitor_events: u64,
    /// Trials where S_j was typical at delta/4 yet no coset word was typical with it.
    pub typical_state_failures: [u64; 2],
    /// Mean per-letter cost of each user.
    pub cost: [f64; 2],
    /// Mean total variation distance of the joint type of (V1, S1, S2, V2) from
    /// p(v1|s1) W(s1, s2) p(v2|s2), over trials where both encoders succeeded.
    pub markov_tv: Option<f64>,
}

impl SimReport {
    pub fn enc_fail_rate(&self, j: usize) -> f64 {
        self.enc_failures[j] as f64 / self.trials.max(1) as f64
    }

    pub fn dec_err_rate(&self) -> f64 {
        self.dec_errors as f64 / self.trials.max(1) as f64
    }

    pub fn competitor_rate(&self) -> f64 {
        self.competitor_events as f64 / self.trials.max(1) as f64
    }

    pub fn typical_state_failure_rate(&self, j: usize) -> f64 {
        self.typical_state_failures[j] as f64 / self.trials.max(1) as f64
    }

    pub const CSV_HEADER: [&'static str; 9] = [
        "n",
        "rate_sum",
        "trials",
        "enc_fail_1",
        "enc_fail_2",
        "dec_err",
        "cost_1",
        "cost_2",
        "seed",
    ];

    pub fn csv_record(&self) -> [String; 9] {
        [
            self.n.to_string(),
            self.rate_sum.to_string(),
            self.trials.to_string(),
            self.enc_fail_rate(0).to_string(),
            self.enc_fail_rate(1).to_string(),
            self.dec_err_rate().to_string(),
            self.cost[0].to_string(),
            self.cost[1].to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Writes reports as CSV with [`SimReport::CSV_HEADER`].
pub fn write_sim_csv<W: std::io::Write>(reports: &[SimReport], out: W) -> Result<()> {
    let io = |e: csv::Error| crate::Error::Internal(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SimReport::CSV_HEADER).map_err(io)?;
    for r in reports {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    w.flush()
        .map_err(|e| crate::Error::Internal(format!("csv: {e}")))?;
    Ok(())
}

#[derive(Default)]
struct TrialOutcome {
    enc_failed: [bool; 2],
    typical_state_failed: [bool; 2],
    dec_error: bool,
    competitor: bool,
    cost: [f64; 2],
    tv: Option<f64>,
}

/// Sampler for X_j given (V_j, S_j).
enum InputSampler {
    Draw(WeightedIndex<f64>),
    /// p(v | s) = 0: send the cheapest input.
    Fixed(usize),
}

struct Context<'a> {
    tc: &'a TestChannel,
    field: Arc<Field>,
    params: &'a SimParams,
    states: WeightedIndex<f64>,
    s_sizes: [usize; 2],
    enc_tests: [TypicalityTest; 2],
    state_tests: [TypicalityTest; 2],
    dec_test: TypicalityTest,
    allowed: Vec<Vec<u8>>,
    /// Indexed `[j][s * q + v]`.
    inputs: [Vec<InputSampler>; 2],
    /// Indexed by ((x1 * |X2| + x2) * |S1| + s1) * |S2| + s2.
    outputs: Vec<WeightedIndex<f64>>,
    /// p(v1, s1, s2, v2) under the Markov chain, indexed like the joint type.
    markov: Vec<f64>,
    fixed: Option<MacCodePair>,
}

fn input_samplers(tc: &TestChannel, j: usize, q: usize) -> Result<Vec<InputSampler>> {
    let ch = tc.channel();
    let ns = ch.state_sizes()[j];
    let nx = ch.input_sizes()[j];
    let nu = tc.user(j).u_size;
    let mut out = Vec::with_capacity(ns * q);
    for s in 0..ns {
        for v in 0..q {
            let w: Vec<f64> = (0..nx)
                .map(|x| (0..nu).map(|u| tc.conditional(j, u, v, x, s)).sum())
                .collect();
            match WeightedIndex::new(&w) {
                Ok(d) => out.push(InputSampler::Draw(d)),
                Err(_) => {
                    let cheapest = (0..nx)
                        .min_by(|&a, &b| ch.cost(j, a, s).total_cmp(&ch.cost(j, b, s)))
                        .expect("nonempty input alphabet");
                    out.push(InputSampler::Fixed(cheapest));
                }
            }
        }
    }
    Ok(out)
}

fn weighted(w: &[f64], what: &str) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(w).map_err(|e| crate::Error::Validation(format!("{what}: {e}")))
}

impl<'a> Context<'a> {
    fn new(tc: &'a TestChannel, params: &'a SimParams) -> Result<Self> {
        let field = field_of(tc)?;
        let q = field.order();
        if tc.user(0).v_size != q || tc.user(1).v_size != q {
            return invalid("V alphabets must match the field");
        }
        if params.n == 0 {
            return invalid("block length must be positive");
        }
        if !(params.delta > 0.0) || !params.delta.is_finite() {
            return invalid("delta must be positive and finite");
        }
        let ch = tc.channel();
        let s_sizes = ch.state_sizes();
        let x_sizes = ch.input_sizes();
        let ny = ch.output_size();
        let state_w: Vec<f64> = (0..s_sizes[0])
            .flat_map(|s1| (0..s_sizes[1]).map(move |s2| (s1, s2)))
            .map(|(s1, s2)| ch.state_prob(s1, s2))
            .collect();
        let states = weighted(&state_w, "state pmf")?;
        let p_vs = [user_vs_pmf(tc, 0)?, user_vs_pmf(tc, 1)?];
        let enc_tests = [
            TypicalityTest::new(&p_vs[0], params.delta / 2.0)?,
            TypicalityTest::new(&p_vs[1], params.delta / 2.0)?,
        ];
        let state_tests = [
            TypicalityTest::new(&ch.state_marginal(0), params.delta / 4.0)?,
            TypicalityTest::new(&ch.state_marginal(1), params.delta / 4.0)?,
        ];
        let p_wy = sum_output_pmf(tc)?;
        let dec_test = TypicalityTest::new(&p_wy, params.delta)?;
        let allowed = allowed_sums(&p_wy, q, ny);
        let inputs = [input_samplers(tc, 0, q)?, input_samplers(tc, 1, q)?];
        let mut outputs = Vec::with_capacity(x_sizes[0] * x_sizes[1] * s_sizes[0] * s_sizes[1]);
        for x1 in 0..x_sizes[0] {
            for x2 in 0..x_sizes[1] {
                for s1 in 0..s_sizes[0] {
                    for s2 in 0..s_sizes[1] {
                        outputs.push(weighted(ch.w_row(x1, x2, s1, s2), "channel row")?);
                    }
                }
            }
        }
        // p(v | s) from p(v, s) indexed v * |S| + s.
        let cond = |j: usize, v: usize, s: usize| {
            let ps: f64 = (0..q).map(|w| p_vs[j][w * s_sizes[j] + s]).sum();
            if ps > 0.0 {
                p_vs[j][v * s_sizes[j] + s] / ps
            } else {
                0.0
            }
        };
        let mut markov = Vec::with_capacity(q * q * s_sizes[0] * s_sizes[1]);
        for v1 in 0..q {
            for s1 in 0..s_sizes[0] {
                for s2 in 0..s_sizes[1] {
                    for v2 in 0..q {
                        markov.push(cond(0, v1, s1) * ch.state_prob(s1, s2) * cond(1, v2, s2));
                    }
                }
            }
        }
        let fixed = if params.fixed_code {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(u64::MAX);
            Some(sample_mac_pair(
                field.clone(),
                params.n,
                params.dims.k,
                params.dims.l,
                &mut rng,
            )?)
        } else {
            None
        };
        Ok(Self {
            tc,
            field,
            params,
            states,
            s_sizes,
            enc_tests,
            state_tests,
            dec_test,
            allowed,
            inputs,
            outputs,
            markov,
            fixed,
        })
    }

    fn trial(&self, trial: u64) -> Result<TrialOutcome> {
        let p = self.params;
        let n = p.n;
        let q = self.field.order();
        let ch = self.tc.channel();
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(trial);
        let drawn;
        let pair = match &self.fixed {
            Some(pair) => pair,
            None => {
                drawn = sample_mac_pair(self.field.clone(), n, p.dims.k, p.dims.l, &mut rng)?;
                &drawn
            }
        };
        let mut s = [vec![0usize; n], vec![0usize; n]];
        for t in 0..n {
            let idx = self.states.sample(&mut rng);
            s[0][t] = idx / self.s_sizes[1];
            s[1][t] = idx % self.s_sizes[1];
        }
        let m: [Vec<u8>; 2] = [0, 1].map(|j| {
            (0..p.dims.l[j])
                .map(|_| rng.random_range(0..q as u8))
                .collect()
        });
        let mut out = TrialOutcome::default();
        let mut v: [Vec<u8>; 2] = [Vec::new(), Vec::new()];
        for j in 0..2 {
            let code = pair.user_code(j)?;
            let enc = encode_with(
                &code,
                &m[j],
                &s[j],
                self.s_sizes[j],
                &self.enc_tests[j],
                p.cap,
                &mut rng,
            )?;
            out.enc_failed[j] = enc.failed;
            out.typical_state_failed[j] = enc.failed && self.state_tests[j].accepts(&s[j])?;
            v[j] = enc.codeword;
        }
        let mut x = [vec![0usize; n], vec![0usize; n]];
        for j in 0..2 {
            let mut total = 0.0;
            for t in 0..n {
                let st = s[j][t];
                x[j][t] = match &self.inputs[j][st * q + v[j][t] as usize] {
                    InputSampler::Draw(d) => d.sample(&mut rng),
                    InputSampler::Fixed(x) => *x,
                };
                total += ch.cost(j, x[j][t], st);
            }
            out.cost[j] = total / n as f64;
        }
        let x2_size = ch.input_sizes()[1];
        let y: Vec<usize> = (0..n)
            .map(|t| {
                let idx = ((x[0][t] * x2_size + x[1][t]) * self.s_sizes[0] + s[0][t])
                    * self.s_sizes[1]
                    + s[1][t];
                self.outputs[idx].sample(&mut rng)
            })
            .collect();
        let sum_code = pair.sum_code()?;
        let decoder = SumDecoder {
            code: &sum_code,
            test: &self.dec_test,
            y_size: ch.output_size(),
            allowed: &self.allowed,
            cap: p.cap,
        };
        let truth: Vec<u8> = m[0].iter().chain(&m[1]).copied().collect();
        let verdict = decoder.verdict(&y, &truth)?;
        out.dec_error = verdict.is_error();
        out.competitor = verdict.has_competitor;
        if p.markov_tv && !out.enc_failed[0] && !out.enc_failed[1] {
            let mut counts = vec![0u32; self.markov.len()];
            for t in 0..n {
                let idx = ((v[0][t] as usize * self.s_sizes[0] + s[0][t]) * self.s_sizes[1]
                    + s[1][t])
                    * q
                    + v[1][t] as usize;
                counts[idx] += 1;
            }
            let tv = counts
                .iter()
                .zip(&self.markov)
                .map(|(&c, &pm)| (c as f64 / n as f64 - pm).abs())
                .sum::<f64>()
                / 2.0;
            out.tv = Some(tv);
        }
        Ok(out)
    }
}

/// Runs `params.trials` independent transmissions over the two-user channel of
/// `tc` with random nested coset codes and the sum decoder.
///
/// Trial `i` draws everything from a ChaCha8 stream `i` under `params.seed`, so the
/// result does not depend on how many worker threads run it.
pub fn simulate_mac(tc: &TestChannel, params: &SimParams) -> Result<SimReport> {
    let ctx = Context::new(tc, params)?;
    let outcomes: Vec<TrialOutcome> = (0..params.trials)
        .into_par_iter()
        .map(|t| ctx.trial(t))
        .collect::<Result<_>>()?;
    let trials = params.trials;
    let mut r = SimReport {
        n: params.n,
        rate_sum: (params.dims.l[0] + params.dims.l[1]) as f64 * (ctx.field.order() as f64).log2()
            / params.n as f64,
        trials,
        seed: params.seed,
        enc_failures: [0; 2],
        dec_errors: 0,
        competitor_events: 0,
        typical_state_failures: [0; 2],
        cost: [0.0; 2],
        markov_tv: None,
    };
    let mut tv_sum = 0.0;
    let mut tv_count = 0u64;
    for o in &outcomes {
        for j in 0..2 {
            r.enc_failures[j] += o.enc_failed[j] as u64;
            r.typical_state_failures[j] += o.typical_state_failed[j] as u64;
            r.cost[j] += o.cost[j];
        }
        r.dec_errors += o.dec_error as u64;
        r.competitor_events += o.competitor as u64;
        if let Some(tv) = o.tv {
            tv_sum += tv;
            tv_count += 1;
        }
    }
    for c in &mut r.cost {
        *c /= trials.max(1) as f64;
    }
    if tv_count > 0 {
        r.markov_tv = Some(tv_sum / tv_count as f64);
    }
    Ok(r)
}
