use std::sync::Arc;

use rand::Rng;

use crate::algebra::{Field, MacCodePair, Matrix, NestedCosetCode};
use crate::error::{invalid, over_budget, Result};
use crate::regions::{TestChannel, VAlgebra};

/// Largest total generator size (rows times columns) the sampler accepts.
pub const MAX_GENERATOR_ENTRIES: usize = 1 << 20;

fn uniform_matrix<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let q = field.order() as u8;
    Matrix {
        rows,
        cols,
        data: (0..rows * cols).map(|_| rng.random_range(0..q)).collect(),
    }
}

fn uniform_vector<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Vec<u8> {
    let q = field.order() as u8;
    (0..n).map(|_| rng.random_range(0..q)).collect()
}

/// Draws g_I, g_{O/I} and b independently and uniformly.
pub fn sample_nested_code<R: Rng + ?Sized>(
    field: Arc<Field>,
    n: usize,
    k: usize,
    l: usize,
    rng: &mut R,
) -> Result<NestedCosetCode> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    if (k + l + 1).saturating_mul(n) > MAX_GENERATOR_ENTRIES {
        return over_budget(
            "generator entries",
            ((k + l + 1) * n) as u128,
            MAX_GENERATOR_ENTRIES as u128,
        );
    }
    let g_inner = uniform_matrix(&field, k, n, rng);
    let g_outer = uniform_matrix(&field, l, n, rng);
    let bias = uniform_vector(&field, n, rng);
    NestedCosetCode::new(field, g_inner, g_outer, bias)
}

/// Draws a code pair: one inner generator with max(k1, k2) rows whose leading rows
/// both users share, two outer generators and two biases, all uniform.
pub fn sample_mac_pair<R: Rng + ?Sized>(
    field: Arc<Field>,
    n: usize,
    k: [usize; 2],
    l: [usize; 2],
    rng: &mut R,
) -> Result<MacCodePair> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    let rows = k[0].max(k[1]) + l[0] + l[1] + 2;
    if rows.saturating_mul(n) > MAX_GENERATOR_ENTRIES {
        return over_budget(
            "generator entries",
            (rows * n) as u128,
            MAX_GENERATOR_ENTRIES as u128,
        );
    }
    let g_inner = uniform_matrix(&field, k[0].max(k[1]), n, rng);
    let g_outer = [
        uniform_matrix(&field, l[0], n, rng),
        uniform_matrix(&field, l[1], n, rng),
    ];
    let bias = [
        uniform_vector(&field, n, rng),
        uniform_vector(&field, n, rng),
    ];
    MacCodePair::new(field, k, g_inner, g_outer, bias)
}

/// Nested coset code dimensions (k, l) and whether l had to be clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    pub k: usize,
    pub l: usize,
    pub l_clamped: bool,
}

pub(crate) fn field_of(tc: &TestChannel) -> Result<Arc<Field>> {
    match tc.algebra() {
        VAlgebra::Field(f) => Ok(f.clone()),
        _ => invalid("coset-code simulation needs V over a finite field"),
    }
}

/// Point-to-point parameters k = ceil(n (1 - H(V|S)/log q + eta/(8 log q))) and
/// l = floor(n (1 - H(V|Y)/log q - eta/(8 log q))) - k, clamped at zero.
pub fn gp_code_params(tc: &TestChannel, n: usize, eta: f64) -> Result<CodeParams> {
    if !tc.channel().is_point_to_point() {
        return invalid("gp_code_params needs a point-to-point test channel");
    }
    if n == 0 || !(eta > 0.0) {
        return invalid("need n >= 1 and eta > 0");
    }
    let f = field_of(tc)?;
    let j = tc.joint()?;
    let h_vs = j.conditional_entropy(&["V1"], &["S1"])?;
    let h_vy = j.conditional_entropy(&["V1"], &["Y"])?;
    Ok(code_params_from_entropies(f.order(), n, h_vs, h_vy, eta))
}

/// The parameter formulas of [`gp_code_params`] on given entropies.
pub fn code_params_from_entropies(
    q: usize,
    n: usize,
    h_vs: f64,
    h_vy: f64,
    eta: f64,
) -> CodeParams {
    let lq = (q as f64).log2();
    let nf = n as f64;
    let k = (nf * (1.0 - h_vs / lq + eta / (8.0 * lq))).ceil().max(0.0) as usize;
    let outer = (nf * (1.0 - h_vy / lq - eta / (8.0 * lq))).floor();
    let l = outer - k as f64;
    CodeParams {
        k,
        l: l.max(0.0) as usize,
        l_clamped: l < 0.0,
    }
}

/// Code dimensions for the two-user simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacParams {
    pub k: [usize; 2],
    pub l: [usize; 2],
}

/// Chooses k_j = ceil(n (1 - H(V_j|S_j)/log q + margin/log q)) and splits
/// floor(n rate_sum / log q) message symbols evenly, user 2 taking any remainder.
pub fn mac_params_for_rate(
    tc: &TestChannel,
    n: usize,
    rate_sum: f64,
    margin: f64,
) -> Result<MacParams> {
    if n == 0 || !(rate_sum >= 0.0) || !(margin >= 0.0) {
        return invalid("need n >= 1, rate_sum >= 0 and margin >= 0");
    }
    let f = field_of(tc)?;
    let lq = (f.order() as f64).log2();
    let j = tc.joint()?;
    let k = [("V1", "S1"), ("V2", "S2")].map(|(v, s)| {
        j.conditional_entropy(&[v], &[s]).map(|h| {
            ((n as f64) * (1.0 - h / lq + margin / lq) - 1e-9)
                .ceil()
                .max(0.0) as usize
        })
    });
    let total = ((n as f64) * rate_sum / lq + 1e-9).floor() as usize;
    let [k1, k2] = k;
    Ok(MacParams {
        k: [k1?, k2?],
        l: [total / 2, total - total / 2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_code_is_the_bias() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_nested_code(f, 5, 0, 0, &mut rng).unwrap();
        assert_eq!(c.codeword(&[], &[]).unwrap(), c.bias());
        assert_eq!(c.enumerate_coset(&[], 1).unwrap().len(), 1);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        let a = sample_mac_pair(
            f.clone(),
            7,
            [2, 3],
            [1, 2],
            &mut ChaCha8Rng::seed_from_u64(9),
        )
        .unwrap();
        let b = sample_mac_pair(f, 7, [2, 3], [1, 2], &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parameter_formulas() {
        // V|S uniform: first term cancels.
        let p = code_params_from_entropies(2, 80, 1.0, 0.0, 0.4);
        assert_eq!(p.k, 4);
        // The ceiling of 50 + 12.5 eta is 51 for any eta > 0.
        let p = code_params_from_entropies(2, 100, 0.5, 0.0, 1e-9);
        assert_eq!(p.k, 51);
        let p = code_params_from_entropies(2, 100, 0.5, 0.2, 0.1);
        assert!(p.k + p.l <= (100.0 * (1.0 - 0.2 - 0.1 / 8.0)) as usize + 1);
        let clamp = code_params_from_entropies(2, 10, 0.1, 0.95, 0.1);
        assert!(clamp.l_clamped);
        assert_eq!(clamp.l, 0);
    }

    #[test]
    fn oversized_generators_rejected() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_nested_code(f, 1 << 12, 1 << 9, 0, &mut rng),
            Err(crate::Error::Budget { .. })
        ));
    }
}
