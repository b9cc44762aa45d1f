//! Plain-text channel description.
//!
//! ```text
//! # comments start with '#'
//! name = my-channel
//! states = 2 2        # |S1| |S2|; a single number means |S2| = 1
//! inputs = 2 2        # |X1| |X2|
//! outputs = 2
//!
//! [state_pmf]         # s1 s2 = probability; omitted pairs are zero
//! 0 0 = 0.25
//!
//! [kernel]            # s2 x2 s1 x1 = W(0|.) W(1|.) ...; every row is required
//! 0 0 0 0 = 0.92 0.08
//!
//! [cost1]             # x s = cost; omitted entries are zero
//! 1 0 = 1
//! [cost2]
//! ```
//!
//! For a point-to-point channel the kernel key may be just `s1 x1`. A key made of
//! four single digits may also be written without spaces, e.g. `0010`.

use super::channel::ChannelSpec;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    StatePmf,
    Kernel,
    Cost(usize),
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Validation(format!("line {line}: expected an integer, got '{tok}'")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Validation(format!("line {line}: expected a number, got '{tok}'")))?;
    if !v.is_finite() {
        return invalid(format!("line {line}: non-finite value '{tok}'"));
    }
    Ok(v)
}

fn parse_key(text: &str, line: usize) -> Result<Vec<usize>> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() == 1 && toks[0].len() > 1 && toks[0].chars().all(|c| c.is_ascii_digit()) {
        return Ok(toks[0].bytes().map(|b| (b - b'0') as usize).collect());
    }
    toks.iter().map(|t| parse_usize(t, line)).collect()
}

/// Parses a channel description.
pub fn parse_channel_config(text: &str) -> Result<ChannelSpec> {
    let mut name = String::from("custom");
    let mut states: Option<[usize; 2]> = None;
    let mut inputs: Option<[usize; 2]> = None;
    let mut outputs: Option<usize> = None;
    let mut section = Section::Header;
    let mut state_rows: Vec<(usize, [usize; 2], f64)> = Vec::new();
    let mut kernel_rows: Vec<(usize, Vec<usize>, Vec<f64>)> = Vec::new();
    let mut cost_rows: Vec<(usize, usize, [usize; 2], f64)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            section = match line {
                "[state_pmf]" => Section::StatePmf,
                "[kernel]" => Section::Kernel,
                "[cost1]" => Section::Cost(0),
                "[cost2]" => Section::Cost(1),
                other => return invalid(format!("line {line_no}: unknown section {other}")),
            };
            continue;
        }
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("line {line_no}: expected 'key = value'")))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        match section {
            Section::Header => {
                let nums = || -> Result<Vec<usize>> {
                    rhs.split_whitespace()
                        .map(|t| parse_usize(t, line_no))
                        .collect()
                };
                let pair = |v: Vec<usize>| -> Result<[usize; 2]> {
                    match v.as_slice() {
                        [a] => Ok([*a, 1]),
                        [a, b] => Ok([*a, *b]),
                        _ => invalid(format!("line {line_no}: expected one or two sizes")),
                    }
                };
                match lhs {
                    "name" => name = rhs.to_string(),
                    "states" => states = Some(pair(nums()?)?),
                    "inputs" => inputs = Some(pair(nums()?)?),
                    "outputs" | "output" => outputs = Some(parse_usize(rhs, line_no)?),
                    other => return invalid(format!("line {line_no}: unknown key '{other}'")),
                }
            }
            Section::StatePmf => {
                let key = parse_key(lhs, line_no)?;
                let key = match key.as_slice() {
                    [a] => [*a, 0],
                    [a, b] => [*a, *b],
                    _ => return invalid(format!("line {line_no}: state key needs s1 s2")),
                };
                state_rows.push((line_no, key, parse_f64(rhs, line_no)?));
            }
            Section::Kernel => {
                let key = parse_key(lhs, line_no)?;
                let probs = rhs
                    .split_whitespace()
                    .map(|t| parse_f64(t, line_no))
                    .collect::<Result<Vec<f64>>>()?;
                kernel_rows.push((line_no, key, probs));
            }
            Section::Cost(j) => {
                let key = parse_key(lhs, line_no)?;
                let key = match key.as_slice() {
                    [x] => [*x, 0],
                    [x, s] => [*x, *s],
                    _ => return invalid(format!("line {line_no}: cost key needs x s")),
                };
                cost_rows.push((line_no, j, key, parse_f64(rhs, line_no)?));
            }
        }
    }

    let states = states.ok_or_else(|| Error::Validation("missing 'states'".into()))?;
    let inputs = inputs.ok_or_else(|| Error::Validation("missing 'inputs'".into()))?;
    let outputs = outputs.ok_or_else(|| Error::Validation("missing 'outputs'".into()))?;
    let [ns1, ns2] = states;
    let [nx1, nx2] = inputs;
    let ptp = ns2 == 1 && nx2 == 1;

    if state_rows.is_empty() {
        return invalid("missing [state_pmf] section");
    }
    let mut state_pmf = vec![0.0; ns1 * ns2];
    let mut seen = vec![false; ns1 * ns2];
    for (ln, [s1, s2], p) in state_rows {
        if s1 >= ns1 || s2 >= ns2 {
            return invalid(format!("line {ln}: state ({s1}, {s2}) out of range"));
        }
        let pos = s1 * ns2 + s2;
        if std::mem::replace(&mut seen[pos], true) {
            return invalid(format!("line {ln}: duplicate state entry"));
        }
        state_pmf[pos] = p;
    }

    let row_len = outputs;
    let mut kernel = vec![f64::NAN; ns1 * ns2 * nx1 * nx2 * row_len];
    for (ln, key, probs) in kernel_rows {
        let [s2, x2, s1, x1] = match key.as_slice() {
            [s2, x2, s1, x1] => [*s2, *x2, *s1, *x1],
            [s1, x1] if ptp => [0, 0, *s1, *x1],
            _ => return invalid(format!("line {ln}: kernel key needs s2 x2 s1 x1")),
        };
        if s1 >= ns1 || s2 >= ns2 || x1 >= nx1 || x2 >= nx2 {
            return invalid(format!("line {ln}: kernel key out of range"));
        }
        if probs.len() != row_len {
            return invalid(format!(
                "line {ln}: expected {row_len} probabilities, got {}",
                probs.len()
            ));
        }
        let start = (((s1 * ns2 + s2) * nx1 + x1) * nx2 + x2) * row_len;
        if !kernel[start].is_nan() {
            return invalid(format!("line {ln}: duplicate kernel row"));
        }
        kernel[start..start + row_len].copy_from_slice(&probs);
    }
    if kernel.iter().any(|v| v.is_nan()) {
        return invalid("kernel is missing rows");
    }

    let mut costs = [vec![0.0; nx1 * ns1], vec![0.0; nx2 * ns2]];
    for (ln, j, [x, s], c) in cost_rows {
        if x >= inputs[j] || s >= states[j] {
            return invalid(format!("line {ln}: cost key out of range"));
        }
        costs[j][x * states[j] + s] = c;
    }

    ChannelSpec::new(name, states, inputs, outputs, state_pmf, kernel, costs)
}

/// Writes a channel in the format read by [`parse_channel_config`].
///
/// Numbers use the shortest representation that parses back to the same bits.
pub fn write_channel_config(ch: &ChannelSpec) -> String {
    let [ns1, ns2] = ch.state_sizes();
    let [nx1, nx2] = ch.input_sizes();
    let mut out = format!(
        "name = {}\nstates = {ns1} {ns2}\ninputs = {nx1} {nx2}\noutputs = {}\n\n[state_pmf]\n",
        ch.name(),
        ch.output_size()
    );
    for s1 in 0..ns1 {
        for s2 in 0..ns2 {
            out += &format!("{s1} {s2} = {:?}\n", ch.state_prob(s1, s2));
        }
    }
    out += "\n[kernel]\n";
    for s2 in 0..ns2 {
        for x2 in 0..nx2 {
            for s1 in 0..ns1 {
                for x1 in 0..nx1 {
                    let row: Vec<String> = ch
                        .w_row(x1, x2, s1, s2)
                        .iter()
                        .map(|p| format!("{p:?}"))
                        .collect();
                    out += &format!("{s2} {x2} {s1} {x1} = {}\n", row.join(" "));
                }
            }
        }
    }
    for j in 0..2 {
        out += &format!("\n[cost{}]\n", j + 1);
        for x in 0..ch.input_sizes()[j] {
            for s in 0..ch.state_sizes()[j] {
                out += &format!("{x} {s} = {:?}\n", ch.cost(j, x, s));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::catalog;
    use crate::regions::channel::{dirty_ptp, example2, CATALOG_NAMES};

    #[test]
    fn round_trip_catalog() {
        for name in CATALOG_NAMES {
            let ch = catalog(name).unwrap();
            let back = parse_channel_config(&write_channel_config(&ch)).unwrap();
            assert_eq!(back, ch, "{name}");
        }
    }

    #[test]
    fn compact_keys_and_ptp() {
        let text = "name = t\nstates = 2\ninputs = 2\noutputs = 2\n[state_pmf]\n0 = 0.5\n1 = 0.5\n\
                    [kernel]\n0 0 = 1 0\n0 1 = 0 1\n1 0 = 0 1\n1 1 = 1 0\n[cost1]\n1 0 = 1\n1 1 = 1\n";
        let ch = parse_channel_config(text).unwrap();
        assert_eq!(ch, dirty_ptp().renamed("t"));
    }

    #[test]
    fn table_digits_without_spaces() {
        let ch = example2();
        let text = write_channel_config(&ch).replace("0 0 1 0 = ", "0010 = ");
        assert_eq!(parse_channel_config(&text).unwrap(), ch);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "states = 1 1\ninputs = 1 1\noutputs = 2\n[state_pmf]\n0 0 = 1\n[kernel]\n0 0 0 0 = 0.5\n";
        let err = parse_channel_config(text).unwrap_err().to_string();
        assert!(err.contains("line 7"), "{err}");
        let missing = "states = 1 1\ninputs = 2 1\noutputs = 1\n[state_pmf]\n0 0 = 1\n[kernel]\n0 0 0 0 = 1\n";
        assert!(parse_channel_config(missing).is_err());
        assert!(parse_channel_config("bogus = 3\n").is_err());
    }
}
