use std::collections::BTreeSet;

use rand::Rng;

use crate::algebra::{solve_affine, AffineWalker, Field, MacCodePair, Matrix, NestedCosetCode};
use crate::error::{invalid, over_budget, Result};
use crate::info::{TypicalityTest, PROB_EPS};
use crate::regions::TestChannel;

/// Result of joint-typicality encoding within one coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOutcome {
    /// Inner index a of the chosen codeword.
    pub a: Vec<u8>,
    pub codeword: Vec<u8>,
    /// Number of inner indices whose codeword is typical with the state.
    pub list_size: u64,
    /// True when no codeword was typical and a uniform one was used instead.
    pub failed: bool,
}

/// p(v, s) of user `j`, indexed `v * |S_j| + s`.
pub fn user_vs_pmf(tc: &TestChannel, j: usize) -> Result<Vec<f64>> {
    let joint = tc.joint()?;
    let (v, s) = if j == 0 { ("V1", "S1") } else { ("V2", "S2") };
    Ok(joint.marginal(&[v, s])?.probs().to_vec())
}

/// p(w, y) with W = V1 + V2, indexed `w * |Y| + y`.
pub fn sum_output_pmf(tc: &TestChannel) -> Result<Vec<f64>> {
    Ok(tc.joint_with_sum()?.marginal(&["W", "Y"])?.probs().to_vec())
}

/// Encoder for a fixed typicality test on (V, S) pairs.
pub(crate) fn encode_with<R: Rng + ?Sized>(
    code: &NestedCosetCode,
    m: &[u8],
    states: &[usize],
    s_size: usize,
    test: &TypicalityTest,
    cap: u128,
    rng: &mut R,
) -> Result<EncodeOutcome> {
    let n = code.n();
    if states.len() != n {
        return invalid(format!(
            "state sequence has length {}, code has n = {n}",
            states.len()
        ));
    }
    if states.iter().any(|&s| s >= s_size) {
        return invalid("state symbol out of range");
    }
    let walk = code.coset_walk_len();
    if walk > cap {
        return over_budget("coset enumeration", walk, cap);
    }
    let mut walker = code.coset_walker(m)?;
    let mut counts = vec![0u32; test.alphabet_size()];
    let mut list_size = 0u64;
    let mut chosen: Option<Vec<u8>> = None;
    while let Some(v) = walker.next_vector() {
        counts.iter_mut().for_each(|c| *c = 0);
        for (&vt, &st) in v.iter().zip(states) {
            counts[vt as usize * s_size + st] += 1;
        }
        if test.accepts_counts(&counts, n) {
            list_size += 1;
            // Reservoir sampling keeps a uniform choice over the list.
            if rng.random_range(0..list_size) == 0 {
                chosen = Some(walker.coefficients().to_vec());
            }
        }
    }
    match chosen {
        Some(a) => Ok(EncodeOutcome {
            codeword: code.codeword(&a, m)?,
            a,
            list_size,
            failed: false,
        }),
        None => {
            let q = code.field().order() as u8;
            let a: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..q)).collect();
            let codeword = code.codeword(&a, m)?;
            Ok(EncodeOutcome {
                a,
                codeword,
                list_size: 0,
                failed: true,
            })
        }
    }
}

/// Picks uniformly among the words of coset `m` that are jointly typical with the
/// state sequence at `delta` under p(V_j, S_j); falls back to a uniform coset word
/// and flags a failure when there is none.
pub fn typicality_encode<R: Rng + ?Sized>(
    code: &NestedCosetCode,
    tc: &TestChannel,
    user: usize,
    m: &[u8],
    states: &[usize],
    delta: f64,
    cap: u128,
    rng: &mut R,
) -> Result<EncodeOutcome> {
    if user > 1 {
        return invalid("user index must be 0 or 1");
    }
    let p_vs = user_vs_pmf(tc, user)?;
    let s_size = tc.channel().state_sizes()[user];
    if p_vs.len() != code.field().order() * s_size {
        return invalid("code field does not match the V alphabet");
    }
    let test = TypicalityTest::new(&p_vs, delta)?;
    encode_with(code, m, states, s_size, &test, cap, rng)
}

/// What the sum decoder learned about one received sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecodeVerdict {
    /// The transmitted message pair was found in D.
    pub contains_truth: bool,
    /// Some other message pair was found in D.
    pub has_competitor: bool,
}

impl DecodeVerdict {
    /// Decoding succeeds only when D is exactly the transmitted pair.
    pub fn is_error(&self) -> bool {
        self.has_competitor || !self.contains_truth
    }
}

/// Sum decoder over a fixed code, with the typicality test and allowed sets precomputed.
pub(crate) struct SumDecoder<'a> {
    pub code: &'a NestedCosetCode,
    pub test: &'a TypicalityTest,
    pub y_size: usize,
    /// For each output y, the w with p(w, y) > 0.
    pub allowed: &'a [Vec<u8>],
    pub cap: u128,
}

/// Allowed sum symbols for each output.
pub(crate) fn allowed_sums(p_wy: &[f64], q: usize, y_size: usize) -> Vec<Vec<u8>> {
    (0..y_size)
        .map(|y| {
            (0..q)
                .filter(|&w| p_wy[w * y_size + y] > PROB_EPS)
                .map(|w| w as u8)
                .collect()
        })
        .collect()
}

enum Visit {
    Continue,
    Stop,
}

impl SumDecoder<'_> {
    /// Visits the message index of every codeword that is typical with y, stopping
    /// early when `visit` says so.
    fn scan(&self, y: &[usize], mut visit: impl FnMut(&[u8]) -> Visit) -> Result<()> {
        let code = self.code;
        let f: &Field = code.field();
        let n = code.n();
        if y.len() != n {
            return invalid(format!(
                "output sequence has length {}, code has n = {n}",
                y.len()
            ));
        }
        let (k, l) = (code.k(), code.l());
        let dims = k + l;
        // Generator of z = (a, m) to v, one row per unknown.
        let mut gen = Matrix::zeros(dims, n);
        for i in 0..k {
            gen.row_mut(i).copy_from_slice(code.g_inner().row(i));
        }
        for i in 0..l {
            gen.row_mut(k + i).copy_from_slice(code.g_outer().row(i));
        }
        // Positions whose output admits exactly one sum symbol fix v_t.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (t, &yt) in y.iter().enumerate() {
            let Some(allowed) = self.allowed.get(yt) else {
                return invalid("output symbol out of range");
            };
            match allowed.len() {
                0 => return Ok(()),
                1 => {
                    rows.push((0..dims).map(|i| gen.get(i, t)).collect::<Vec<u8>>());
                    rhs.push(f.sub(allowed[0], code.bias()[t]));
                }
                _ => {}
            }
        }
        let system = Matrix::from_rows(&rows, dims)?;
        let Some(sol) = solve_affine(f, &system, &rhs) else {
            return Ok(());
        };
        let size = (f.order() as u128).saturating_pow(sol.basis.len() as u32);
        if size > self.cap {
            return over_budget("sum decoder candidates", size, self.cap);
        }
        let base = {
            let mut v = gen.left_mul(f, &sol.particular);
            for (vt, &bt) in v.iter_mut().zip(code.bias()) {
                *vt = f.add(*vt, bt);
            }
            v
        };
        let images: Vec<Vec<u8>> = sol.basis.iter().map(|z| gen.left_mul(f, z)).collect();
        let refs: Vec<&[u8]> = images.iter().map(|r| r.as_slice()).collect();
        let mut walker = AffineWalker::new(f, &base, &refs);
        let mut counts = vec![0u32; self.test.alphabet_size()];
        while let Some(v) = walker.next_vector() {
            counts.iter_mut().for_each(|c| *c = 0);
            for (&vt, &yt) in v.iter().zip(y) {
                counts[vt as usize * self.y_size + yt] += 1;
            }
            if !self.test.accepts_counts(&counts, n) {
                continue;
            }
            let mut z = sol.particular.clone();
            for (c, basis) in walker.coefficients().iter().zip(&sol.basis) {
                f.axpy(&mut z, *c, basis);
            }
            if let Visit::Stop = visit(&z[k..]) {
                break;
            }
        }
        Ok(())
    }

    /// The full candidate set D.
    pub fn candidates(&self, y: &[usize]) -> Result<BTreeSet<Vec<u8>>> {
        let mut out = BTreeSet::new();
        self.scan(y, |m| {
            out.insert(m.to_vec());
            Visit::Continue
        })?;
        Ok(out)
    }

    /// Whether D contains `truth` and whether it contains anything else; stops at
    /// the first competitor.
    pub fn verdict(&self, y: &[usize], truth: &[u8]) -> Result<DecodeVerdict> {
        let mut out = DecodeVerdict::default();
        self.scan(y, |m| {
            if m == truth {
                out.contains_truth = true;
                Visit::Continue
            } else {
                out.has_competitor = true;
                Visit::Stop
            }
        })?;
        Ok(out)
    }
}

/// Outcome of [`decode_sum`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// D: every (m1, m2), concatenated, with a coset word typical with y.
    pub candidates: BTreeSet<Vec<u8>>,
    /// The decoded pair when D is a singleton.
    pub decoded: Option<(Vec<u8>, Vec<u8>)>,
}

/// Decodes the message pair from the sum code: D collects every message pair whose
/// coset in the sum code holds a word jointly typical with y at `delta` under
/// p(V1 + V2, Y). Positions where y leaves a single possible sum symbol are solved
/// as linear equations; the remaining freedom is enumerated.
pub fn decode_sum(
    pair: &MacCodePair,
    tc: &TestChannel,
    y: &[usize],
    delta: f64,
    cap: u128,
) -> Result<DecodeOutcome> {
    let code = pair.sum_code()?;
    let q = code.field().order();
    let y_size = tc.channel().output_size();
    let p_wy = sum_output_pmf(tc)?;
    if p_wy.len() != q * y_size {
        return invalid("code field does not match the V alphabet");
    }
    let test = TypicalityTest::new(&p_wy, delta)?;
    let allowed = allowed_sums(&p_wy, q, y_size);
    let decoder = SumDecoder {
        code: &code,
        test: &test,
        y_size,
        allowed: &allowed,
        cap,
    };
    let candidates = decoder.candidates(y)?;
    let decoded = if candidates.len() == 1 {
        let m = candidates.iter().next().expect("one element");
        let l1 = pair.l()[0];
        Some((m[..l1].to_vec(), m[l1..].to_vec()))
    } else {
        None
    };
    Ok(DecodeOutcome {
        candidates,
        decoded,
    })
}
