//! Grid search over test channels for the largest sum rate at each cost.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use super::bounds::RateBounds;
use super::channel::ChannelSpec;
use super::test_channel::{TestChannel, UserConditional, VAlgebra};
use crate::algebra::Field;
use crate::error::{invalid, over_budget, Result};
use crate::info::{entropy_of, RateCurve, PROB_EPS};

/// Which sum-rate expression the search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchFamily {
    /// Unstructured bounds with auxiliary U_j.
    Alpha,
    /// Linear coset codes with V_j over a finite field.
    BetaF,
}

impl SearchFamily {
    pub fn label(&self) -> &'static str {
        match self {
            SearchFamily::Alpha => "alpha",
            SearchFamily::BetaF => "beta_f",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Grid step for each conditional p(a | s).
    pub step: f64,
    /// Size of the auxiliary alphabet; for `BetaF` it must be a prime power.
    pub aux_size: usize,
    /// Largest number of candidate pairs the search may visit.
    pub pair_budget: u128,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            step: 0.05,
            aux_size: 2,
            pair_budget: 200_000_000,
        }
    }
}

/// One user's candidate: a conditional p(a | s) on the grid and a map x = f(a, s).
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// p(a | s), indexed `[s][a]`.
    pub pa: Vec<f64>,
    /// f(a, s), indexed `[s][a]`; zero wherever p(a | s) = 0.
    pub fx: Vec<u8>,
    /// E[kappa(X, S)].
    pub cost: f64,
    /// H(A | S).
    pub h_a_given_s: f64,
}

/// Points of the probability simplex in `dim` coordinates whose first `dim - 1`
/// coordinates lie on the grid {0, step, 2 step, ...} or equal 1.
pub fn simplex_points(dim: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0 && step <= 1.0) {
        return invalid(format!("grid step {step} outside (0, 1]"));
    }
    if dim == 0 {
        return invalid("empty alphabet");
    }
    let k = (1.0 / step + 1e-9).floor() as usize;
    let mut levels: Vec<f64> = (0..=k).map(|i| (i as f64 * step).min(1.0)).collect();
    if levels[k] < 1.0 - 1e-9 {
        levels.push(1.0);
    }
    let mut out = Vec::new();
    let mut cur = vec![0.0; dim];
    fn rec(i: usize, used: f64, levels: &[f64], cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            cur[i] = (1.0 - used).max(0.0);
            out.push(cur.clone());
            return;
        }
        for &l in levels {
            if used + l > 1.0 + 1e-9 {
                break;
            }
            cur[i] = l;
            rec(i + 1, used + l, levels, cur, out);
        }
    }
    rec(0, 0.0, &levels, &mut cur, &mut out);
    Ok(out)
}

/// Every candidate of user `j` in a fixed order, without deduplication.
pub fn user_candidates(
    ch: &ChannelSpec,
    j: usize,
    aux: usize,
    step: f64,
) -> Result<Vec<Candidate>> {
    let ns = ch.state_sizes()[j];
    let nx = ch.input_sizes()[j];
    let points = simplex_points(aux, step)?;
    let maps = (nx as u128).saturating_pow((aux * ns) as u32);
    let total = (points.len() as u128)
        .saturating_pow(ns as u32)
        .saturating_mul(maps);
    if total > 50_000_000 {
        return over_budget("per-user candidates", total, 50_000_000);
    }
    let ws = ch.state_marginal(j);
    let mut out = Vec::with_capacity(total as usize);
    let mut point_idx = vec![0usize; ns];
    loop {
        let pa: Vec<f64> = point_idx
            .iter()
            .flat_map(|&i| points[i].iter().copied())
            .collect();
        let mut joint = vec![0.0; ns * aux];
        for s in 0..ns {
            for a in 0..aux {
                joint[s * aux + a] = ws[s] * pa[s * aux + a];
            }
        }
        let h_a_given_s = entropy_of(&joint) - entropy_of(&ws);
        let mut fx = vec![0u8; ns * aux];
        'maps: loop {
            let cost = (0..ns)
                .flat_map(|s| (0..aux).map(move |a| (s, a)))
                .map(|(s, a)| ws[s] * pa[s * aux + a] * ch.cost(j, fx[s * aux + a] as usize, s))
                .sum();
            out.push(Candidate {
                pa: pa.clone(),
                fx: fx.clone(),
                cost,
                h_a_given_s: h_a_given_s.max(0.0),
            });
            for d in fx.iter_mut() {
                *d += 1;
                if (*d as usize) < nx {
                    continue 'maps;
                }
                *d = 0;
            }
            break;
        }
        let mut i = 0;
        loop {
            if i == ns {
                return Ok(out);
            }
            point_idx[i] += 1;
            if point_idx[i] < points.len() {
                break;
            }
            point_idx[i] = 0;
            i += 1;
        }
    }
}

/// Drops candidates that induce the same joint law of (S, A, X) as an earlier one.
pub fn dedupe_candidates(cands: Vec<Candidate>) -> Vec<Candidate> {
    let mut seen = HashSet::new();
    cands
        .into_iter()
        .filter_map(|mut c| {
            for (f, &p) in c.fx.iter_mut().zip(&c.pa) {
                if p <= PROB_EPS {
                    *f = 0;
                }
            }
            let key: (Vec<u64>, Vec<u8>) =
                (c.pa.iter().map(|p| p.to_bits()).collect(), c.fx.clone());
            seen.insert(key).then_some(c)
        })
        .collect()
}

fn candidate_conditional(
    ch: &ChannelSpec,
    j: usize,
    c: &Candidate,
    aux: usize,
    family: SearchFamily,
) -> UserConditional {
    let ns = ch.state_sizes()[j];
    let nx = ch.input_sizes()[j];
    let (u_size, v_size) = match family {
        SearchFamily::Alpha => (aux, 1),
        SearchFamily::BetaF => (1, aux),
    };
    UserConditional::from_fn(ns, u_size, v_size, nx, |u, v, x, s| {
        let a = u.max(v);
        if c.fx[s * aux + a] as usize == x {
            c.pa[s * aux + a]
        } else {
            0.0
        }
    })
}

fn family_algebra(family: SearchFamily, aux: usize) -> Result<VAlgebra> {
    Ok(match family {
        SearchFamily::Alpha => VAlgebra::Plain,
        SearchFamily::BetaF => VAlgebra::Field(Arc::new(Field::of_order(aux as u64)?)),
    })
}

/// Lazily built test channels from the grid, restricted to E[kappa_j] <= tau_j.
pub struct TestChannelStream {
    channel: Arc<ChannelSpec>,
    family: SearchFamily,
    algebra: VAlgebra,
    aux: usize,
    tau: [f64; 2],
    cands: [Vec<Candidate>; 2],
    next: (usize, usize),
}

impl TestChannelStream {
    /// Number of pairs before the cost filter.
    pub fn raw_count(&self) -> u128 {
        self.cands[0].len() as u128 * self.cands[1].len() as u128
    }

    pub fn candidates(&self, j: usize) -> &[Candidate] {
        &self.cands[j]
    }
}

impl Iterator for TestChannelStream {
    type Item = TestChannel;

    fn next(&mut self) -> Option<TestChannel> {
        loop {
            let (i, k) = self.next;
            if i >= self.cands[0].len() {
                return None;
            }
            self.next = if k + 1 < self.cands[1].len() {
                (i, k + 1)
            } else {
                (i + 1, 0)
            };
            if self.cands[1].is_empty() {
                self.next = (i + 1, 0);
                continue;
            }
            let (c1, c2) = (&self.cands[0][i], &self.cands[1][k]);
            if c1.cost > self.tau[0] + 1e-9 || c2.cost > self.tau[1] + 1e-9 {
                continue;
            }
            let users = [
                candidate_conditional(&self.channel, 0, c1, self.aux, self.family),
                candidate_conditional(&self.channel, 1, c2, self.aux, self.family),
            ];
            return Some(
                TestChannel::new(self.channel.clone(), self.algebra.clone(), users)
                    .expect("grid candidates are valid test channels"),
            );
        }
    }
}

/// All grid test channels of the family for cost pair `tau`. Every deterministic map
/// f(a, s) is included, so the stream is exhaustive over the grid.
pub fn enumerate_test_channels(
    channel: Arc<ChannelSpec>,
    family: SearchFamily,
    tau: [f64; 2],
    opts: &SearchOptions,
) -> Result<TestChannelStream> {
    let algebra = family_algebra(family, opts.aux_size)?;
    let cands = [
        user_candidates(&channel, 0, opts.aux_size, opts.step)?,
        user_candidates(&channel, 1, opts.aux_size, opts.step)?,
    ];
    let raw = cands[0].len() as u128 * cands[1].len() as u128;
    if raw > opts.pair_budget {
        return over_budget("test channel pairs", raw, opts.pair_budget);
    }
    Ok(TestChannelStream {
        channel,
        family,
        algebra,
        aux: opts.aux_size,
        tau,
        cands,
        next: (0, 0),
    })
}

/// Fast evaluation of the family's sum rate for one candidate pair.
struct PairEvaluator<'a> {
    ch: &'a ChannelSpec,
    family: SearchFamily,
    aux: usize,
    add: Vec<usize>,
}

impl PairEvaluator<'_> {
    fn value(&self, c1: &Candidate, c2: &Candidate, table: &mut [f64], scratch: &mut [f64]) -> f64 {
        let ch = self.ch;
        let [ns1, ns2] = ch.state_sizes();
        let aux = self.aux;
        let ny = ch.output_size();
        table.iter_mut().for_each(|v| *v = 0.0);
        for s1 in 0..ns1 {
            for s2 in 0..ns2 {
                let ws = ch.state_prob(s1, s2);
                if ws == 0.0 {
                    continue;
                }
                for a1 in 0..aux {
                    let p1 = c1.pa[s1 * aux + a1];
                    if p1 == 0.0 {
                        continue;
                    }
                    let x1 = c1.fx[s1 * aux + a1] as usize;
                    for a2 in 0..aux {
                        let p2 = c2.pa[s2 * aux + a2];
                        if p2 == 0.0 {
                            continue;
                        }
                        let mass = ws * p1 * p2;
                        let row = ch.w_row(x1, c2.fx[s2 * aux + a2] as usize, s1, s2);
                        let base = (a1 * aux + a2) * ny;
                        for (t, &w) in table[base..base + ny].iter_mut().zip(row) {
                            *t += mass * w;
                        }
                    }
                }
            }
        }
        let h_all = entropy_of(table);
        let marg_y = &mut scratch[..ny];
        marg_y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &p) in table.iter().enumerate() {
            marg_y[i % ny] += p;
        }
        let h_y = entropy_of(marg_y);
        match self.family {
            SearchFamily::Alpha => {
                let mut a1y = vec![0.0; aux * ny];
                let mut a2y = vec![0.0; aux * ny];
                for a1 in 0..aux {
                    for a2 in 0..aux {
                        for y in 0..ny {
                            let p = table[(a1 * aux + a2) * ny + y];
                            a1y[a1 * ny + y] += p;
                            a2y[a2 * ny + y] += p;
                        }
                    }
                }
                let (h1, h2) = (c1.h_a_given_s, c2.h_a_given_s);
                RateBounds {
                    r1: h1 + entropy_of(&a2y) - h_all,
                    r2: h2 + entropy_of(&a1y) - h_all,
                    sum: h1 + h2 + h_y - h_all,
                }
                .max_sum_rate()
            }
            SearchFamily::BetaF => {
                let wy = &mut scratch[ny..ny + aux * ny];
                wy.iter_mut().for_each(|v| *v = 0.0);
                for a1 in 0..aux {
                    for a2 in 0..aux {
                        let w = self.add[a1 * aux + a2];
                        for y in 0..ny {
                            wy[w * ny + y] += table[(a1 * aux + a2) * ny + y];
                        }
                    }
                }
                let h_w_given_y = entropy_of(wy) - h_y;
                (c1.h_a_given_s.min(c2.h_a_given_s) - h_w_given_y).max(0.0)
            }
        }
    }
}

/// Best value found in one cost bin, with the candidate indices that reach it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinBest {
    pub value: f64,
    pub pair: Option<(usize, usize)>,
}

fn better(a: BinBest, b: BinBest) -> BinBest {
    match (a.pair, b.pair) {
        (None, _) => b,
        (_, None) => a,
        (Some(pa), Some(pb)) => {
            if b.value > a.value || (b.value == a.value && pb < pa) {
                b
            } else {
                a
            }
        }
    }
}

/// Full result of a search: the rate curve and the maximizing candidates.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub curve: RateCurve,
    /// For each grid point, the best pair among candidates with max cost <= tau.
    pub argmax: Vec<Option<(usize, usize)>>,
    pub candidates: [Vec<Candidate>; 2],
    pub pairs_evaluated: u128,
}

impl SearchOutcome {
    /// The test channel attaining the pre-envelope value at grid index `t`.
    pub fn best_test_channel(
        &self,
        channel: Arc<ChannelSpec>,
        family: SearchFamily,
        aux: usize,
        t: usize,
    ) -> Result<Option<TestChannel>> {
        let Some((i, k)) = self.argmax[t] else {
            return Ok(None);
        };
        let users = [
            candidate_conditional(&channel, 0, &self.candidates[0][i], aux, family),
            candidate_conditional(&channel, 1, &self.candidates[1][k], aux, family),
        ];
        Ok(Some(TestChannel::new(
            channel,
            family_algebra(family, aux)?,
            users,
        )?))
    }
}

fn check_grid(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return invalid("empty cost grid");
    }
    if taus.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return invalid("costs must be finite and nonnegative");
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("cost grid must be strictly increasing");
    }
    Ok(())
}

/// Searches every grid test channel pair with both costs at most tau (for each tau
/// in the grid) and returns the best sum rate before and after time sharing.
pub fn search_sum_rate(
    ch: &ChannelSpec,
    family: SearchFamily,
    taus: &[f64],
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    check_grid(taus)?;
    let aux = opts.aux_size;
    let add: Vec<usize> = match family {
        SearchFamily::Alpha => Vec::new(),
        SearchFamily::BetaF => {
            let f = Field::of_order(aux as u64)?;
            (0..aux * aux)
                .map(|i| f.add((i / aux) as u8, (i % aux) as u8) as usize)
                .collect()
        }
    };
    let tau_max = taus[taus.len() - 1];
    let cands: [Vec<Candidate>; 2] = [0, 1]
        .map(|j| {
            user_candidates(ch, j, aux, opts.step).map(|c| {
                dedupe_candidates(c)
                    .into_iter()
                    .filter(|c| c.cost <= tau_max + 1e-9)
                    .collect::<Vec<_>>()
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .try_into()
        .expect("two users");
    let pairs = cands[0].len() as u128 * cands[1].len() as u128;
    if pairs > opts.pair_budget {
        return over_budget("test channel pairs", pairs, opts.pair_budget);
    }
    let bin_of = |cost: f64| taus.iter().position(|&t| cost <= t + 1e-9);
    let eval = PairEvaluator {
        ch,
        family,
        aux,
        add,
    };
    let ny = ch.output_size();
    let empty = BinBest {
        value: 0.0,
        pair: None,
    };
    let bins: Vec<BinBest> = cands[0]
        .par_iter()
        .enumerate()
        .fold(
            || {
                (
                    vec![empty; taus.len()],
                    vec![0.0; aux * aux * ny],
                    vec![0.0; ny + aux * ny],
                )
            },
            |(mut bins, mut table, mut scratch), (i, c1)| {
                for (k, c2) in cands[1].iter().enumerate() {
                    let Some(b) = bin_of(c1.cost.max(c2.cost)) else {
                        continue;
                    };
                    let v = eval.value(c1, c2, &mut table, &mut scratch);
                    bins[b] = better(
                        bins[b],
                        BinBest {
                            value: v,
                            pair: Some((i, k)),
                        },
                    );
                }
                (bins, table, scratch)
            },
        )
        .map(|(bins, _, _)| bins)
        .reduce(
            || vec![empty; taus.len()],
            |a, b| a.into_iter().zip(b).map(|(x, y)| better(x, y)).collect(),
        );
    let mut running = empty;
    let mut pre = Vec::with_capacity(taus.len());
    let mut argmax = Vec::with_capacity(taus.len());
    for b in bins {
        running = better(running, b);
        pre.push(running.value.max(0.0));
        argmax.push(running.pair);
    }
    Ok(SearchOutcome {
        curve: RateCurve::new(family.label(), taus.to_vec(), pre)?,
        argmax,
        candidates: cands,
        pairs_evaluated: pairs,
    })
}

/// Best sum rate of the family on the cost grid, after time sharing.
pub fn best_sum_rate(
    ch: &ChannelSpec,
    family: SearchFamily,
    taus: &[f64],
    opts: &SearchOptions,
) -> Result<RateCurve> {
    Ok(search_sum_rate(ch, family, taus, opts)?.curve)
}

/// Evenly spaced grid lo, lo + step, ..., up to hi (inclusive within rounding).
pub fn tau_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || lo < 0.0 {
        return invalid("bad grid bounds");
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::bounds::{alpha_bounds_raw, beta_f_sum_rate};
    use crate::regions::channel::{bdd, example1};

    #[test]
    fn simplex_point_counts() {
        assert_eq!(simplex_points(2, 0.5).unwrap().len(), 3);
        assert_eq!(simplex_points(2, 0.05).unwrap().len(), 21);
        assert_eq!(simplex_points(3, 0.5).unwrap().len(), 6);
        let odd = simplex_points(2, 0.3).unwrap();
        assert_eq!(odd.len(), 5);
        assert!(odd
            .iter()
            .all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn raw_count_is_grid_times_maps() {
        let s = enumerate_test_channels(
            Arc::new(bdd()),
            SearchFamily::Alpha,
            [1.0, 1.0],
            &SearchOptions {
                step: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s.raw_count(), (9 * 16u128).pow(2));
        assert_eq!(s.count(), (9 * 16usize).pow(2));
    }

    #[test]
    fn fast_evaluator_matches_joint_pmf_route() {
        for (ch, family) in [
            (bdd(), SearchFamily::Alpha),
            (example1(), SearchFamily::Alpha),
            (bdd(), SearchFamily::BetaF),
            (example1(), SearchFamily::BetaF),
        ] {
            let ch = Arc::new(ch);
            let opts = SearchOptions {
                step: 0.25,
                ..Default::default()
            };
            let stream = enumerate_test_channels(ch.clone(), family, [0.5, 0.5], &opts).unwrap();
            let cands = stream.cands.clone();
            let eval = PairEvaluator {
                ch: &ch,
                family,
                aux: 2,
                add: vec![0, 1, 1, 0],
            };
            let mut table = vec![0.0; 8];
            let mut scratch = vec![0.0; 6];
            let mut checked = 0;
            for (i, c1) in cands[0].iter().enumerate().step_by(37) {
                for c2 in cands[1].iter().skip(i % 11).step_by(53) {
                    let fast = eval.value(c1, c2, &mut table, &mut scratch);
                    let users = [
                        candidate_conditional(&ch, 0, c1, 2, family),
                        candidate_conditional(&ch, 1, c2, 2, family),
                    ];
                    let tc =
                        TestChannel::new(ch.clone(), family_algebra(family, 2).unwrap(), users)
                            .unwrap();
                    let slow = match family {
                        SearchFamily::Alpha => alpha_bounds_raw(&tc).unwrap().max_sum_rate(),
                        SearchFamily::BetaF => beta_f_sum_rate(&tc).unwrap(),
                    };
                    assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
                    checked += 1;
                }
            }
            assert!(checked > 50);
        }
    }

    #[test]
    fn dedupe_keeps_distinct_laws() {
        let c = user_candidates(&bdd(), 0, 2, 0.5).unwrap();
        assert_eq!(c.len(), 144);
        // Per state: p in {0, 1} leaves 2 relevant maps, p = 1/2 leaves 4.
        assert_eq!(dedupe_candidates(c).len(), 8 * 8);
    }

    #[test]
    fn grid_checks() {
        let ch = bdd();
        assert!(best_sum_rate(
            &ch,
            SearchFamily::Alpha,
            &[0.2, 0.1],
            &SearchOptions::default()
        )
        .is_err());
        let tiny = SearchOptions {
            pair_budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            best_sum_rate(&ch, SearchFamily::Alpha, &[0.1], &tiny),
            Err(crate::Error::Budget { .. })
        ));
        assert_eq!(tau_grid(0.0, 0.5, 0.05).unwrap().len(), 11);
    }
}
