use super::ensemble::field_of;
use crate::error::{invalid, Result};
use crate::regions::TestChannel;

fn check(n: usize, delta: f64) -> Result<()> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return invalid("delta must be finite and nonnegative");
    }
    Ok(())
}

fn clamp_exp2(exponent: f64) -> f64 {
    exponent.exp2().clamp(0.0, 1.0)
}

/// 2^{-n log q (k/n - (1 - h/log q + 3 delta / (2 log q)))}, clamped to [0, 1], for
/// conditional entropy `h` = H(V|S) in bits.
pub fn encoder_failure_bound_from(q: usize, h: f64, n: usize, k: usize, delta: f64) -> Result<f64> {
    check(n, delta)?;
    let lq = (q as f64).log2();
    let nf = n as f64;
    let gap = k as f64 / nf - (1.0 - h / lq + 3.0 * delta / (2.0 * lq));
    Ok(clamp_exp2(-nf * lq * gap))
}

/// Bound on P(S typical, no coset word typical with S) for user `user` of `tc`
/// with inner dimension k.
pub fn encoder_failure_bound(
    tc: &TestChannel,
    user: usize,
    n: usize,
    k: usize,
    delta: f64,
) -> Result<f64> {
    if user > 1 {
        return invalid("user index must be 0 or 1");
    }
    let q = field_of(tc)?.order();
    let (v, s) = if user == 0 {
        ("V1", "S1")
    } else {
        ("V2", "S2")
    };
    let h = tc.joint()?.conditional_entropy(&[v], &[s])?;
    encoder_failure_bound_from(q, h, n, k, delta)
}

/// 2^{-n log q (1 - h/log q - 3 delta / (2 log q) - (k + l)/n)}, clamped, for h = H(V|Y).
pub fn decoder_error_bound_ptp_from(
    q: usize,
    h: f64,
    n: usize,
    k: usize,
    l: usize,
    delta: f64,
) -> Result<f64> {
    check(n, delta)?;
    let lq = (q as f64).log2();
    let nf = n as f64;
    let gap = 1.0 - h / lq - 3.0 * delta / (2.0 * lq) - (k + l) as f64 / nf;
    Ok(clamp_exp2(-nf * lq * gap))
}

/// 2^{-n log q (1 - (h + 3 delta)/log q - (k + l)/n)}, clamped, for h = H(V1 + V2 | Y).
pub fn decoder_error_bound_mac_from(
    q: usize,
    h: f64,
    n: usize,
    k: usize,
    l: usize,
    delta: f64,
) -> Result<f64> {
    check(n, delta)?;
    let lq = (q as f64).log2();
    let nf = n as f64;
    let gap = 1.0 - (h + 3.0 * delta) / lq - (k + l) as f64 / nf;
    Ok(clamp_exp2(-nf * lq * gap))
}

/// Bound on the probability that a wrong message is decoded, point-to-point
/// form using H(V1 | Y).
pub fn decoder_error_bound(
    tc: &TestChannel,
    n: usize,
    k: usize,
    l: usize,
    delta: f64,
) -> Result<f64> {
    let q = field_of(tc)?.order();
    let h = tc.joint()?.conditional_entropy(&["V1"], &["Y"])?;
    decoder_error_bound_ptp_from(q, h, n, k, l, delta)
}

/// Two-user form using H(V1 + V2 | Y); `k` is the larger inner dimension and `l`
/// the total number of message symbols.
pub fn decoder_error_bound_mac(
    tc: &TestChannel,
    n: usize,
    k: usize,
    l: usize,
    delta: f64,
) -> Result<f64> {
    let q = field_of(tc)?.order();
    let h = tc.joint_with_sum()?.conditional_entropy(&["W"], &["Y"])?;
    decoder_error_bound_mac_from(q, h, n, k, l, delta)
}
