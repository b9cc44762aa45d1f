use super::test_channel::{TestChannel, VAlgebra};
use crate::error::{invalid, Result};
use crate::info::{binary_entropy, group_entropy_source, JointPmf};

/// Individual and sum-rate bounds (R1, R2, R1 + R2) of one test channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

impl RateBounds {
    /// Each bound clamped at zero.
    pub fn clamped(self) -> Self {
        Self {
            r1: self.r1.max(0.0),
            r2: self.r2.max(0.0),
            sum: self.sum.max(0.0),
        }
    }

    /// Largest R1 + R2 in the pentagon; zero when the pentagon is empty.
    pub fn max_sum_rate(&self) -> f64 {
        const TOL: f64 = 1e-12;
        if self.r1 < -TOL || self.r2 < -TOL || self.sum < -TOL {
            return 0.0;
        }
        self.sum.min(self.r1.max(0.0) + self.r2.max(0.0)).max(0.0)
    }
}

/// Gelfand-Pinsker rate I(A; Y) - I(A; S), clamped at zero, for a point-to-point
/// test channel. The auxiliary A is the pair (U1, V1).
pub fn gp_rate(tc: &TestChannel) -> Result<f64> {
    if !tc.channel().is_point_to_point() {
        return invalid("gp_rate needs a point-to-point channel");
    }
    let j = tc.joint()?;
    let a = ["U1", "V1"];
    Ok((j.mutual_information(&a, &["Y"])? - j.mutual_information(&a, &["S1"])?).max(0.0))
}

/// The unstructured terms for auxiliaries `a1`, `a2`, without clamping.
fn unstructured_terms(j: &JointPmf, a1: &[&str], a2: &[&str]) -> Result<RateBounds> {
    let y_a2: Vec<&str> = a2.iter().copied().chain(["Y"]).collect();
    let y_a1: Vec<&str> = a1.iter().copied().chain(["Y"]).collect();
    let a12: Vec<&str> = a1.iter().chain(a2).copied().collect();
    let i1s = j.mutual_information(a1, &["S1"])?;
    let i2s = j.mutual_information(a2, &["S2"])?;
    Ok(RateBounds {
        r1: j.mutual_information(a1, &y_a2)? - i1s,
        r2: j.mutual_information(a2, &y_a1)? - i2s,
        sum: j.mutual_information(&a12, &["Y"])? + j.mutual_information(a1, a2)? - i1s - i2s,
    })
}

/// Unstructured (Gelfand-Pinsker style) bounds with auxiliary (U_j, V_j), unclamped.
pub fn alpha_bounds_raw(tc: &TestChannel) -> Result<RateBounds> {
    tc.require_deterministic()?;
    unstructured_terms(&tc.joint()?, &["U1", "V1"], &["U2", "V2"])
}

/// Unstructured bounds clamped at zero.
pub fn alpha_bounds(tc: &TestChannel) -> Result<RateBounds> {
    Ok(alpha_bounds_raw(tc)?.clamped())
}

fn require_field(tc: &TestChannel) -> Result<()> {
    match tc.algebra() {
        VAlgebra::Field(_) => Ok(()),
        _ => invalid("V alphabet must be a finite field"),
    }
}

fn require_group(tc: &TestChannel) -> Result<()> {
    match tc.algebra() {
        VAlgebra::Group(_) => Ok(()),
        _ => invalid("V alphabet must be an Abelian group"),
    }
}

/// Linear coset code sum rate min_j H(V_j | S_j) - H(V1 + V2 | Y), unclamped.
pub fn beta_f_sum_rate_raw(tc: &TestChannel) -> Result<f64> {
    require_field(tc)?;
    let j = tc.joint_with_sum()?;
    let h1 = j.conditional_entropy(&["V1"], &["S1"])?;
    let h2 = j.conditional_entropy(&["V2"], &["S2"])?;
    Ok(h1.min(h2) - j.conditional_entropy(&["W"], &["Y"])?)
}

/// Linear coset code sum rate, clamped at zero.
pub fn beta_f_sum_rate(tc: &TestChannel) -> Result<f64> {
    Ok(beta_f_sum_rate_raw(tc)?.max(0.0))
}

/// Bounds of the scheme that superimposes linear coset codes (V) on unstructured
/// codes (U): the unstructured terms in U plus the common gain
/// min_j H(V_j | U_j, S_j) - H(V1 + V2 | U1, U2, Y). Clamped at zero.
pub fn rsf_bounds(tc: &TestChannel) -> Result<RateBounds> {
    tc.require_deterministic()?;
    require_field(tc)?;
    let j = tc.joint_with_sum()?;
    let h1 = j.conditional_entropy(&["V1"], &["U1", "S1"])?;
    let h2 = j.conditional_entropy(&["V2"], &["U2", "S2"])?;
    let gain = h1.min(h2) - j.conditional_entropy(&["W"], &["U1", "U2", "Y"])?;
    Ok(with_gain(unstructured_terms(&j, &["U1"], &["U2"])?, gain).clamped())
}

/// Group-code version of [`rsf_bounds`]: the conditional entropies of V_j are
/// replaced by their group analogues and the sum uses group addition.
pub fn rsg_bounds(tc: &TestChannel) -> Result<RateBounds> {
    tc.require_deterministic()?;
    require_group(tc)?;
    let g = match tc.algebra() {
        VAlgebra::Group(g) => g,
        _ => unreachable!(),
    };
    let j = tc.joint_with_sum()?;
    let h1 = group_entropy_source(&j, "V1", &["U1", "S1"], g)?;
    let h2 = group_entropy_source(&j, "V2", &["U2", "S2"], g)?;
    let gain = h1.min(h2) - j.conditional_entropy(&["W"], &["U1", "U2", "Y"])?;
    Ok(with_gain(unstructured_terms(&j, &["U1"], &["U2"])?, gain).clamped())
}

fn with_gain(b: RateBounds, gain: f64) -> RateBounds {
    RateBounds {
        r1: b.r1 + gain,
        r2: b.r2 + gain,
        sum: b.sum + gain,
    }
}

/// Closed-form sum rates of the quaternary doubly dirty MAC when each user sends
/// X = 0 with probability 1 - tau and each nonzero symbol with probability tau/3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QddClosedForms {
    pub alpha: f64,
    pub beta_f: f64,
    pub beta_g: f64,
    /// Source-side group mutual information of V = X + S over Z_4.
    pub i_s: f64,
    /// H(X).
    pub h_x: f64,
}

pub fn qdd_closed_forms(tau: f64) -> Result<QddClosedForms> {
    if !(0.0..=0.75).contains(&tau) {
        return invalid(format!("tau = {tau} outside [0, 3/4]"));
    }
    let h_x = crate::info::entropy_of(&[1.0 - tau, tau / 3.0, tau / 3.0, tau / 3.0]);
    let h_odd = 2.0 * binary_entropy(2.0 * tau / 3.0)?;
    Ok(QddClosedForms {
        alpha: (2.0 * h_x - 2.0).max(0.0),
        beta_f: (h_x - 0.5).max(0.0),
        beta_g: h_x.min(h_odd).max(0.0),
        i_s: (2.0 - h_odd).max(2.0 - h_x),
        h_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::families;

    #[test]
    fn qdd_closed_form_endpoints() {
        let z = qdd_closed_forms(0.0).unwrap();
        assert_eq!((z.alpha, z.beta_f, z.beta_g), (0.0, 0.0, 0.0));
        assert!((z.i_s - 2.0).abs() < 1e-15);
        // X uniform: H(X) = 2 and 2 h_b(1/2) = 2.
        let u = qdd_closed_forms(0.75).unwrap();
        assert!((u.alpha - 2.0).abs() < 1e-12);
        assert!((u.beta_f - 1.5).abs() < 1e-12);
        assert!((u.beta_g - 2.0).abs() < 1e-12);
        assert!(qdd_closed_forms(0.8).is_err());
    }

    #[test]
    fn pentagon_sum() {
        let b = RateBounds {
            r1: 0.3,
            r2: 0.2,
            sum: 0.9,
        };
        assert!((b.max_sum_rate() - 0.5).abs() < 1e-15);
        let empty = RateBounds {
            r1: -0.1,
            r2: 0.2,
            sum: 0.9,
        };
        assert_eq!(empty.max_sum_rate(), 0.0);
        assert_eq!(empty.clamped().r1, 0.0);
    }

    #[test]
    fn structure_checks() {
        let tc = families::bdd_linear(0.2).unwrap();
        assert!(rsg_bounds(&tc).is_err());
        assert!(gp_rate(&tc).is_err());
        let g = families::qdd_uniform_noise(0.2, families::QddLabel::Group).unwrap();
        assert!(beta_f_sum_rate(&g).is_err());
    }
}
