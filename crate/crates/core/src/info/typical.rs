use super::pmf::{MASS_TOL, PROB_EPS};
use crate::error::{invalid, Result};

/// Slack added to typicality comparisons so that exact boundary counts pass.
const BOUNDARY_TOL: f64 = 1e-12;

fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.is_empty() {
        return invalid("empty pmf");
    }
    if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return invalid("pmf has negative or non-finite entries");
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return invalid(format!("pmf sums to {total}"));
    }
    Ok(())
}

/// Precomputed robust-typicality test for one pmf and one delta.
///
/// A sequence is typical when |N(a)/n - p(a)| <= delta p(a) / log|X| for every
/// symbol a, so symbols of probability zero must not occur at all.
#[derive(Debug, Clone)]
pub struct TypicalityTest {
    probs: Vec<f64>,
    slack: Vec<f64>,
}

impl TypicalityTest {
    pub fn new(pmf: &[f64], delta: f64) -> Result<Self> {
        check_pmf(pmf)?;
        if !(delta >= 0.0) || !delta.is_finite() {
            return invalid(format!("delta must be finite and nonnegative, got {delta}"));
        }
        let log_size = (pmf.len() as f64).log2();
        let probs: Vec<f64> = pmf
            .iter()
            .map(|&p| if p < PROB_EPS { 0.0 } else { p })
            .collect();
        let slack = probs
            .iter()
            .map(|&p| {
                if p == 0.0 {
                    0.0
                } else if log_size == 0.0 {
                    f64::INFINITY
                } else {
                    delta * p / log_size
                }
            })
            .collect();
        Ok(Self { probs, slack })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    /// Typicality from symbol counts of a length-n sequence.
    pub fn accepts_counts(&self, counts: &[u32], n: usize) -> bool {
        let n = n as f64;
        counts
            .iter()
            .zip(&self.probs)
            .zip(&self.slack)
            .all(|((&c, &p), &s)| (c as f64 / n - p).abs() <= s + BOUNDARY_TOL)
    }

    pub fn accepts(&self, seq: &[usize]) -> Result<bool> {
        if seq.is_empty() {
            return invalid("empty sequence");
        }
        let mut counts = vec![0u32; self.probs.len()];
        for &x in seq {
            match counts.get_mut(x) {
                Some(c) => *c += 1,
                None => return invalid(format!("symbol {x} outside the alphabet")),
            }
        }
        Ok(self.accepts_counts(&counts, seq.len()))
    }
}

/// Whether `seq` is delta-typical with respect to `pmf`.
pub fn is_typical(seq: &[usize], pmf: &[f64], delta: f64) -> Result<bool> {
    TypicalityTest::new(pmf, delta)?.accepts(seq)
}

/// Upper bound 2^(-n lambda delta^2) on the probability that an iid sequence is not
/// delta-typical, with lambda = min_{p(a) > 0} p(a)^2 / (log|X|)^2, clamped to [0, 1].
pub fn sanov_bound(pmf: &[f64], delta: f64, n: usize) -> Result<f64> {
    check_pmf(pmf)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return invalid(format!("delta must be finite and nonnegative, got {delta}"));
    }
    let log_size = (pmf.len() as f64).log2();
    if log_size == 0.0 {
        return Ok(0.0);
    }
    let pmin = pmf
        .iter()
        .copied()
        .filter(|&p| p >= PROB_EPS)
        .fold(f64::INFINITY, f64::min);
    let lambda = pmin * pmin / (log_size * log_size);
    Ok((-(n as f64) * lambda * delta * delta)
        .exp2()
        .clamp(0.0, 1.0))
}
