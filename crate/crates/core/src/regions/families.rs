//! Parametric test channels for the catalog channels.

use std::sync::Arc;

use super::channel::{bdd, example1, example3, qdd, ChannelSpec};
use super::test_channel::{TestChannel, UserConditional, VAlgebra};
use crate::algebra::{Field, GroupSpec};
use crate::error::{invalid, Result};

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn check_tau(tau: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&tau) {
        return invalid(format!("tau = {tau} outside [0, {hi}]"));
    }
    Ok(())
}

fn gf(q: u64) -> VAlgebra {
    VAlgebra::Field(Arc::new(Field::of_order(q).expect("small prime power")))
}

/// Binary doubly dirty MAC with X_j ~ Bern(tau) independent of S_j and V_j = X_j + S_j.
pub fn bdd_linear(tau: f64) -> Result<TestChannel> {
    check_tau(tau, 1.0)?;
    let user = UserConditional::from_fn(2, 1, 2, 2, |_, v, x, s| {
        let px = if x == 1 { tau } else { 1.0 - tau };
        px * ind(v == x ^ s)
    });
    TestChannel::new(Arc::new(bdd()), gf(2), [user.clone(), user])
}

/// Test channel for `example1`: with S = 0 the user sends V = X ~ Bern(2 tau);
/// with S = 1 it sends X = 0 and V = 1. Needs tau <= 1/2.
pub fn example1_linear(tau: f64) -> Result<TestChannel> {
    check_tau(tau, 0.5)?;
    let user = UserConditional::from_fn(2, 1, 2, 2, |_, v, x, s| {
        if s == 0 {
            let px = if x == 1 { 2.0 * tau } else { 1.0 - 2.0 * tau };
            px * ind(v == x)
        } else {
            ind(x == 0 && v == 1)
        }
    });
    TestChannel::new(Arc::new(example1()), gf(2), [user.clone(), user])
}

/// Fixed ternary test channel for `example3`: p(V, X | S = 0) puts 0.2944 on
/// (0, 0) and 0.7056 on (1, 1); with S = 1 the user sends X = 1 and V = 0.
pub fn example3_ternary() -> Result<TestChannel> {
    let user = UserConditional::from_fn(2, 1, 3, 2, |_, v, x, s| match (s, v, x) {
        (0, 0, 0) => 0.1472 / 0.5,
        (0, 1, 1) => 0.3528 / 0.5,
        (1, 0, 1) => 1.0,
        _ => 0.0,
    });
    TestChannel::new(Arc::new(example3()), gf(3), [user.clone(), user])
}

/// How V = X + S mod 4 is interpreted for the quaternary channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QddLabel {
    /// The integer labels read as elements of GF(4) (addition is XOR).
    Field,
    /// The integer labels read as elements of Z_4.
    Group,
}

/// Quaternary doubly dirty MAC with X = 0 w.p. 1 - tau and each nonzero symbol
/// w.p. tau/3, independent of S, and V = X + S mod 4. Needs tau <= 3/4.
pub fn qdd_uniform_noise(tau: f64, label: QddLabel) -> Result<TestChannel> {
    check_tau(tau, 0.75)?;
    let user = UserConditional::from_fn(4, 1, 4, 4, |_, v, x, s| {
        let px = if x == 0 { 1.0 - tau } else { tau / 3.0 };
        px * ind(v == (x + s) % 4)
    });
    let algebra = match label {
        QddLabel::Field => gf(4),
        QddLabel::Group => VAlgebra::Group(GroupSpec::cyclic(2, 2)?),
    };
    TestChannel::new(Arc::new(qdd()), algebra, [user.clone(), user])
}

/// Unstructured test channel with A_j = U_j over the alphabet of X_j, X_j = U_j
/// and U_j independent of the state with pmf `px`.
pub fn state_blind(channel: Arc<ChannelSpec>, px: [&[f64]; 2]) -> Result<TestChannel> {
    let users = [0, 1].map(|j| {
        let nx = channel.input_sizes()[j];
        let ns = channel.state_sizes()[j];
        let p = px[j];
        UserConditional::from_fn(ns, nx, 1, nx, |u, _, x, _| {
            if u == x {
                p.get(x).copied().unwrap_or(0.0)
            } else {
                0.0
            }
        })
    });
    TestChannel::new(channel, VAlgebra::Plain, users)
}

/// Names accepted by [`named`].
pub const FAMILY_NAMES: [&str; 5] = [
    "bdd-linear",
    "example1-linear",
    "example3-ternary",
    "qdd-field",
    "qdd-group",
];

/// Looks up a parametric test channel by name.
pub fn named(name: &str, tau: f64) -> Result<TestChannel> {
    match name {
        "bdd-linear" => bdd_linear(tau),
        "example1-linear" => example1_linear(tau),
        "example3-ternary" => example3_ternary(),
        "qdd-field" => qdd_uniform_noise(tau, QddLabel::Field),
        "qdd-group" => qdd_uniform_noise(tau, QddLabel::Group),
        other => invalid(format!(
            "unknown test channel '{other}'; known: {}",
            FAMILY_NAMES.join(", ")
        )),
    }
}

/// The test channel used by default for a catalog channel, if there is one.
pub fn default_for_channel(channel: &str) -> Option<&'static str> {
    match channel {
        "bdd" => Some("bdd-linear"),
        "example1" => Some("example1-linear"),
        "example3" => Some("example3-ternary"),
        "qdd" => Some("qdd-field"),
        _ => None,
    }
}
