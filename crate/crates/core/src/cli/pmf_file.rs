//! Joint pmf files for `group-entropy`.
//!
//! ```text
//! # V over Z_4 and a four-valued S
//! vars = V:4 S:4
//! 0 0 = 0.25       # one line per nonzero entry, indices in the order of `vars`
//! 1 1 = 0.25
//! ```

use crate::error::{invalid, Error, Result};
use crate::info::{JointPmf, MASS_TOL};

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses a joint pmf file; entries not listed are zero.
pub fn parse_pmf_file(text: &str) -> Result<JointPmf> {
    let mut vars: Option<Vec<(String, usize)>> = None;
    let mut entries: Vec<(usize, Vec<usize>, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let Some((lhs, rhs)) = line.split_once('=') else {
            return invalid(format!("line {ln}: expected 'key = value'"));
        };
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if lhs == "vars" {
            if vars.is_some() {
                return invalid(format!("line {ln}: 'vars' given twice"));
            }
            let mut list = Vec::new();
            for tok in rhs.split_whitespace() {
                let Some((name, size)) = tok.split_once(':') else {
                    return invalid(format!(
                        "line {ln}: variable '{tok}' must look like NAME:SIZE"
                    ));
                };
                let size: usize = size
                    .parse()
                    .map_err(|_| Error::Validation(format!("line {ln}: bad size in '{tok}'")))?;
                if size == 0 {
                    return invalid(format!("line {ln}: variable {name} has an empty alphabet"));
                }
                list.push((name.to_string(), size));
            }
            if list.is_empty() {
                return invalid(format!("line {ln}: 'vars' lists no variables"));
            }
            vars = Some(list);
            continue;
        }
        let Some(v) = &vars else {
            return invalid(format!("line {ln}: entry before the 'vars' line"));
        };
        let idx: Vec<usize> = lhs
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Validation(format!("line {ln}: bad index '{t}'")))
            })
            .collect::<Result<_>>()?;
        if idx.len() != v.len() {
            return invalid(format!(
                "line {ln}: expected {} indices, got {}",
                v.len(),
                idx.len()
            ));
        }
        for (&x, (name, size)) in idx.iter().zip(v) {
            if x >= *size {
                return invalid(format!(
                    "line {ln}: index {x} of {name} is out of range (size {size})"
                ));
            }
        }
        let p: f64 = rhs
            .parse()
            .map_err(|_| Error::Validation(format!("line {ln}: bad probability '{rhs}'")))?;
        if !p.is_finite() || p < 0.0 {
            return invalid(format!(
                "line {ln}: probability {rhs} is negative or not finite"
            ));
        }
        entries.push((ln, idx, p));
    }
    let Some(vars) = vars else {
        return invalid("missing 'vars' line");
    };
    let sizes: Vec<usize> = vars.iter().map(|(_, s)| *s).collect();
    let total_len = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
    let Some(total_len) = total_len.filter(|&t| t <= crate::info::MAX_PMF_ENTRIES) else {
        return invalid("pmf has too many entries");
    };
    let mut probs = vec![0.0; total_len];
    let mut seen = vec![0usize; total_len];
    for (ln, idx, p) in entries {
        let pos = idx.iter().zip(&sizes).fold(0, |acc, (&x, &s)| acc * s + x);
        if seen[pos] != 0 {
            return invalid(format!(
                "line {ln}: entry {idx:?} repeats line {}",
                seen[pos]
            ));
        }
        seen[pos] = ln;
        probs[pos] = p;
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > MASS_TOL {
        return invalid(format!("probabilities sum to {sum}, not 1"));
    }
    let spec: Vec<(&str, usize)> = vars.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    JointPmf::new(&spec, probs)
}
