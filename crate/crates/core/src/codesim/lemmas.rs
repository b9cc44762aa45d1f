//! Exhaustive checks of the independence properties of random nested coset codes.
//!
//! Every check enumerates the whole ensemble of generator matrices and biases over
//! a small field and compares exact counts, with no tolerance.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{for_each_vector, Field, MacCodePair, Matrix, NestedCosetCode};
use crate::error::{invalid, over_budget, Result};

/// Largest ensemble enumerated by default.
pub const DEFAULT_LEMMA_CAP: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaOptions {
    /// Largest number of ensemble members to enumerate.
    pub cap: u128,
    /// Run the deliberately broken variant, which must fail.
    pub negative_control: bool,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_LEMMA_CAP,
            negative_control: false,
        }
    }
}

/// Outcome of one exhaustive check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub name: String,
    /// Number of ensemble members enumerated.
    pub ensembles: u128,
    pub passed: bool,
    /// First violation found, if any.
    pub detail: String,
}

impl LemmaReport {
    fn new(name: String, ensembles: u128, violation: Option<String>) -> Self {
        Self {
            name,
            ensembles,
            passed: violation.is_none(),
            detail: violation.unwrap_or_default(),
        }
    }
}

fn ensemble_size(q: usize, len: usize, cap: u128) -> Result<u128> {
    let size = (q as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if size > cap {
        return over_budget("ensemble members", size, cap);
    }
    Ok(size)
}

fn matrix(data: &[u8], rows: usize, cols: usize) -> Matrix {
    Matrix {
        rows,
        cols,
        data: data[..rows * cols].to_vec(),
    }
}

fn all_vectors(q: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for_each_vector(q, len, |v| out.push(v.to_vec()));
    out
}

type Counts = BTreeMap<Vec<u8>, u64>;

/// Whether a joint count table over (x, y) factorizes as the product of its marginals.
fn is_product(joint: &BTreeMap<(Vec<u8>, Vec<u8>), u64>, total: u64) -> bool {
    let mut left = Counts::new();
    let mut right = Counts::new();
    for ((x, y), &c) in joint {
        *left.entry(x.clone()).or_default() += c;
        *right.entry(y.clone()).or_default() += c;
    }
    left.iter().all(|(x, &cx)| {
        right.iter().all(|(y, &cy)| {
            let c = joint.get(&(x.clone(), y.clone())).copied().unwrap_or(0);
            c as u128 * total as u128 == cx as u128 * cy as u128
        })
    })
}

/// Checks that each codeword v(a, m) of a random nested coset code is uniform on
/// F_q^n and that any two codewords with different indices are independent.
///
/// The negative control drops the bias, so v(0, 0) = 0 in every code.
pub fn check_pairwise_independence(
    field: &Arc<Field>,
    n: usize,
    k: usize,
    l: usize,
    opts: LemmaOptions,
) -> Result<LemmaReport> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    let q = field.order();
    let bias_len = if opts.negative_control { 0 } else { n };
    let len = (k + l) * n + bias_len;
    let ensembles = ensemble_size(q, len, opts.cap)?;
    let words = q.pow(n as u32) as u64;
    let indices = all_vectors(q, k + l);
    let mut marginal: Vec<Counts> = vec![Counts::new(); indices.len()];
    let mut joint: BTreeMap<(usize, usize), BTreeMap<(Vec<u8>, Vec<u8>), u64>> = BTreeMap::new();
    let mut err = None;
    for_each_vector(q, len, |params| {
        if err.is_some() {
            return;
        }
        let bias = if opts.negative_control {
            vec![0; n]
        } else {
            params[(k + l) * n..].to_vec()
        };
        let code = match NestedCosetCode::new(
            field.clone(),
            matrix(params, k, n),
            matrix(&params[k * n..], l, n),
            bias,
        ) {
            Ok(c) => c,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let cw: Vec<Vec<u8>> = indices
            .iter()
            .map(|z| code.codeword(&z[..k], &z[k..]).expect("sizes match"))
            .collect();
        for (i, v) in cw.iter().enumerate() {
            *marginal[i].entry(v.clone()).or_default() += 1;
            for (j, w) in cw.iter().enumerate().skip(i + 1) {
                *joint
                    .entry((i, j))
                    .or_default()
                    .entry((v.clone(), w.clone()))
                    .or_default() += 1;
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let total = ensembles as u64;
    let mut violation = None;
    for (i, m) in marginal.iter().enumerate() {
        let uniform = m.len() as u64 == words && m.values().all(|&c| c * words == total);
        if !uniform {
            violation = Some(format!(
                "codeword {:?} is not uniform over the ensemble",
                indices[i]
            ));
            break;
        }
    }
    if violation.is_none() {
        for (&(i, j), table) in &joint {
            let product = table.len() as u64 == words * words
                && table.values().all(|&c| c * words * words == total);
            if !product {
                violation = Some(format!(
                    "codewords {:?} and {:?} are dependent",
                    indices[i], indices[j]
                ));
                break;
            }
        }
    }
    let name = format!(
        "pairwise independence{} (q={q}, n={n}, k={k}, l={l})",
        if opts.negative_control {
            " without bias"
        } else {
            ""
        }
    );
    Ok(LemmaReport::new(name, ensembles, violation))
}

/// Checks that the coset tuple C(m) = (v(a, m) : a in F_q^k) is independent of every
/// codeword v(a', m') with m' != m.
///
/// The negative control takes m' = m, where C(m) contains v(a', m) itself.
pub fn check_coset_independence(
    field: &Arc<Field>,
    n: usize,
    k: usize,
    l: usize,
    opts: LemmaOptions,
) -> Result<LemmaReport> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    if l == 0 && !opts.negative_control {
        return invalid("need l >= 1 for two distinct cosets");
    }
    let q = field.order();
    let len = (k + l + 1) * n;
    let ensembles = ensemble_size(q, len, opts.cap)?;
    let inner = all_vectors(q, k);
    let messages = all_vectors(q, l);
    // (m, m', a') triples to test.
    let mut cases = Vec::new();
    for m in &messages {
        for mh in &messages {
            if (mh == m) != opts.negative_control {
                continue;
            }
            for ah in &inner {
                cases.push((m.clone(), mh.clone(), ah.clone()));
            }
        }
    }
    let mut tables = vec![BTreeMap::<(Vec<u8>, Vec<u8>), u64>::new(); cases.len()];
    let mut err = None;
    for_each_vector(q, len, |params| {
        if err.is_some() {
            return;
        }
        let code = match NestedCosetCode::new(
            field.clone(),
            matrix(params, k, n),
            matrix(&params[k * n..], l, n),
            params[(k + l) * n..].to_vec(),
        ) {
            Ok(c) => c,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        for ((m, mh, ah), table) in cases.iter().zip(tables.iter_mut()) {
            let tuple: Vec<u8> = inner
                .iter()
                .flat_map(|a| code.codeword(a, m).expect("sizes match"))
                .collect();
            let v = code.codeword(ah, mh).expect("sizes match");
            *table.entry((tuple, v)).or_default() += 1;
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let violation = cases
        .iter()
        .zip(&tables)
        .find(|(_, t)| !is_product(t, ensembles as u64))
        .map(|((m, mh, ah), _)| format!("C({m:?}) depends on v({ah:?}, {mh:?})"));
    let name = format!(
        "coset independence{} (q={q}, n={n}, k={k}, l={l})",
        if opts.negative_control {
            " within one coset"
        } else {
            ""
        }
    );
    Ok(LemmaReport::new(name, ensembles, violation))
}

fn mac_pair_from(
    field: &Arc<Field>,
    params: &[u8],
    n: usize,
    k: [usize; 2],
    l: [usize; 2],
) -> Result<MacCodePair> {
    let kmax = k[0].max(k[1]);
    let mut at = 0;
    let mut take = |rows: usize| {
        let m = matrix(&params[at..], rows, n);
        at += rows * n;
        m
    };
    let g_inner = take(kmax);
    let g_outer = [take(l[0]), take(l[1])];
    let bias = [take(1).data, take(1).data];
    MacCodePair::new(field.clone(), k, g_inner, g_outer, bias)
}

/// Two-user version of [`check_coset_independence`]: the pair of coset tuples
/// (C1(m1), C2(m2)) must be independent of every codeword of the sum code in a
/// coset (m1', m2') != (m1, m2).
pub fn check_mac_coset_independence(
    field: &Arc<Field>,
    n: usize,
    k: [usize; 2],
    l: [usize; 2],
    opts: LemmaOptions,
) -> Result<LemmaReport> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    if l[0] + l[1] == 0 && !opts.negative_control {
        return invalid("need l1 + l2 >= 1 for two distinct cosets");
    }
    let q = field.order();
    let kmax = k[0].max(k[1]);
    let len = (kmax + l[0] + l[1] + 2) * n;
    let ensembles = ensemble_size(q, len, opts.cap)?;
    let inner = [all_vectors(q, k[0]), all_vectors(q, k[1])];
    let messages = [all_vectors(q, l[0]), all_vectors(q, l[1])];
    let sum_inner = all_vectors(q, kmax);
    let mut cases = Vec::new();
    for m1 in &messages[0] {
        for m2 in &messages[1] {
            for h1 in &messages[0] {
                for h2 in &messages[1] {
                    let same = h1 == m1 && h2 == m2;
                    if same != opts.negative_control {
                        continue;
                    }
                    let m: Vec<u8> = m1.iter().chain(m2).copied().collect();
                    let mh: Vec<u8> = h1.iter().chain(h2).copied().collect();
                    for ah in &sum_inner {
                        cases.push((m1.clone(), m2.clone(), m.clone(), mh.clone(), ah.clone()));
                    }
                }
            }
        }
    }
    let mut tables = vec![BTreeMap::<(Vec<u8>, Vec<u8>), u64>::new(); cases.len()];
    let mut err = None;
    for_each_vector(q, len, |params| {
        if err.is_some() {
            return;
        }
        let built = mac_pair_from(field, params, n, k, l).and_then(|p| {
            let codes = [p.user_code(0)?, p.user_code(1)?];
            Ok((codes, p.sum_code()?))
        });
        let (codes, sum) = match built {
            Ok(b) => b,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        for ((m1, m2, _, mh, ah), table) in cases.iter().zip(tables.iter_mut()) {
            let mut tuple = Vec::new();
            for a in &inner[0] {
                tuple.extend(codes[0].codeword(a, m1).expect("sizes match"));
            }
            for a in &inner[1] {
                tuple.extend(codes[1].codeword(a, m2).expect("sizes match"));
            }
            let v = sum.codeword(ah, mh).expect("sizes match");
            *table.entry((tuple, v)).or_default() += 1;
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let violation = cases
        .iter()
        .zip(&tables)
        .find(|(_, t)| !is_product(t, ensembles as u64))
        .map(|((_, _, m, mh, ah), _)| format!("(C1, C2) at {m:?} depends on v({ah:?}, {mh:?})"));
    let name = format!(
        "two-user coset independence{} (q={q}, n={n}, k={k:?}, l={l:?})",
        if opts.negative_control {
            " within one coset"
        } else {
            ""
        }
    );
    Ok(LemmaReport::new(name, ensembles, violation))
}

/// Checks v1(a1, m1) + v2(a2, m2) = v(a1 0 + a2, m1 m2) in the sum code for every
/// code pair in the ensemble and every argument.
pub fn check_sum_identity(
    field: &Arc<Field>,
    n: usize,
    k: [usize; 2],
    l: [usize; 2],
    cap: u128,
) -> Result<LemmaReport> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    let q = field.order();
    let kmax = k[0].max(k[1]);
    let len = (kmax + l[0] + l[1] + 2) * n;
    let ensembles = ensemble_size(q, len, cap)?;
    let args = [
        all_vectors(q, k[0]),
        all_vectors(q, k[1]),
        all_vectors(q, l[0]),
        all_vectors(q, l[1]),
    ];
    let mut result: Result<Option<String>> = Ok(None);
    for_each_vector(q, len, |params| {
        if !matches!(result, Ok(None)) {
            return;
        }
        result = (|| {
            let p = mac_pair_from(field, params, n, k, l)?;
            let (c1, c2, sum) = (p.user_code(0)?, p.user_code(1)?, p.sum_code()?);
            for a1 in &args[0] {
                for a2 in &args[1] {
                    for m1 in &args[2] {
                        for m2 in &args[3] {
                            let lhs = field.add_vec(&c1.codeword(a1, m1)?, &c2.codeword(a2, m2)?);
                            let m: Vec<u8> = m1.iter().chain(m2).copied().collect();
                            let rhs = sum.codeword(&p.sum_inner_index(a1, a2), &m)?;
                            if lhs != rhs {
                                return Ok(Some(format!(
                                    "fails at a1={a1:?} a2={a2:?} m1={m1:?} m2={m2:?}"
                                )));
                            }
                        }
                    }
                }
            }
            Ok(None)
        })();
    });
    let name = format!("sum identity (q={q}, n={n}, k={k:?}, l={l:?})");
    Ok(LemmaReport::new(name, ensembles, result?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Field> {
        Arc::new(Field::new(2, 1).unwrap())
    }

    fn control() -> LemmaOptions {
        LemmaOptions {
            negative_control: true,
            ..LemmaOptions::default()
        }
    }

    #[test]
    fn pairwise_small_cases() {
        let r = check_pairwise_independence(&f2(), 2, 1, 0, LemmaOptions::default()).unwrap();
        assert!(r.passed, "{}", r.detail);
        assert_eq!(r.ensembles, 16);
        let r = check_pairwise_independence(&f2(), 3, 1, 1, LemmaOptions::default()).unwrap();
        assert!(r.passed, "{}", r.detail);
        assert_eq!(r.ensembles, 512);
        let r = check_pairwise_independence(&f2(), 3, 1, 1, control()).unwrap();
        assert!(!r.passed);
        assert!(r.detail.contains("not uniform"));
    }

    #[test]
    fn coset_small_cases() {
        let r = check_coset_independence(&f2(), 2, 1, 1, LemmaOptions::default()).unwrap();
        assert!(r.passed, "{}", r.detail);
        let r = check_coset_independence(&f2(), 2, 1, 1, control()).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn ternary_coset_case() {
        let f3 = Arc::new(Field::new(3, 1).unwrap());
        let r = check_coset_independence(&f3, 1, 1, 1, LemmaOptions::default()).unwrap();
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn sum_identity_holds() {
        let r = check_sum_identity(&f2(), 2, [1, 2], [1, 0], 1 << 16).unwrap();
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = LemmaOptions {
            cap: 10,
            negative_control: false,
        };
        assert!(matches!(
            check_pairwise_independence(&f2(), 2, 1, 0, opts),
            Err(crate::Error::Budget {
                required: 16,
                cap: 10,
                ..
            })
        ));
    }
}
