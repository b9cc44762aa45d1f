use crate::error::{invalid, Result};
use crate::info::MASS_TOL;

/// Two-user state-dependent MAC W(y | x1, x2, s1, s2) with state pmf W_{S1 S2}
/// and per-user cost functions kappa_j(x_j, s_j).
///
/// A point-to-point channel is the special case where user 2 has a single state
/// and a single input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    name: String,
    state_sizes: [usize; 2],
    input_sizes: [usize; 2],
    output_size: usize,
    state_pmf: Vec<f64>,
    kernel: Vec<f64>,
    costs: [Vec<f64>; 2],
}

impl ChannelSpec {
    /// Builds and validates a channel.
    ///
    /// `state_pmf` is indexed `[s1][s2]`, `kernel` is indexed `[s1][s2][x1][x2][y]`
    /// and `costs[j]` is indexed `[x][s]`.
    pub fn new(
        name: impl Into<String>,
        state_sizes: [usize; 2],
        input_sizes: [usize; 2],
        output_size: usize,
        state_pmf: Vec<f64>,
        kernel: Vec<f64>,
        costs: [Vec<f64>; 2],
    ) -> Result<Self> {
        let ch = Self {
            name: name.into(),
            state_sizes,
            input_sizes,
            output_size,
            state_pmf,
            kernel,
            costs,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Builds a channel from closures.
    pub fn from_fn(
        name: impl Into<String>,
        state_sizes: [usize; 2],
        input_sizes: [usize; 2],
        output_size: usize,
        state_pmf: impl Fn(usize, usize) -> f64,
        kernel: impl Fn(usize, usize, usize, usize, usize) -> f64,
        cost: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let [ns1, ns2] = state_sizes;
        let [nx1, nx2] = input_sizes;
        let mut ws = Vec::with_capacity(ns1 * ns2);
        let mut w = Vec::with_capacity(ns1 * ns2 * nx1 * nx2 * output_size);
        for s1 in 0..ns1 {
            for s2 in 0..ns2 {
                ws.push(state_pmf(s1, s2));
                for x1 in 0..nx1 {
                    for x2 in 0..nx2 {
                        for y in 0..output_size {
                            w.push(kernel(y, x1, x2, s1, s2));
                        }
                    }
                }
            }
        }
        let costs = [0, 1].map(|j| {
            let (nx, ns) = (input_sizes[j], state_sizes[j]);
            let mut c = Vec::with_capacity(nx * ns);
            for x in 0..nx {
                for s in 0..ns {
                    c.push(cost(j, x, s));
                }
            }
            c
        });
        Self::new(name, state_sizes, input_sizes, output_size, ws, w, costs)
    }

    fn validate(&self) -> Result<()> {
        let [ns1, ns2] = self.state_sizes;
        let [nx1, nx2] = self.input_sizes;
        if ns1 == 0 || ns2 == 0 || nx1 == 0 || nx2 == 0 || self.output_size == 0 {
            return invalid("every alphabet must be nonempty");
        }
        if [ns1, ns2, nx1, nx2, self.output_size]
            .iter()
            .any(|&s| s > 255)
        {
            return invalid("alphabets are limited to 255 symbols");
        }
        if self.state_pmf.len() != ns1 * ns2 {
            return invalid("state pmf has the wrong size");
        }
        check_dist(&self.state_pmf, "state pmf")?;
        let row = self.output_size;
        if self.kernel.len() != ns1 * ns2 * nx1 * nx2 * row {
            return invalid("channel kernel has the wrong size");
        }
        for (i, r) in self.kernel.chunks(row).enumerate() {
            check_dist(r, &format!("kernel row {i}"))?;
        }
        for j in 0..2 {
            if self.costs[j].len() != self.input_sizes[j] * self.state_sizes[j] {
                return invalid(format!("cost table of user {} has the wrong size", j + 1));
            }
            if self.costs[j].iter().any(|c| !c.is_finite() || *c < 0.0) {
                return invalid(format!(
                    "cost of user {} must be finite and nonnegative",
                    j + 1
                ));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_sizes(&self) -> [usize; 2] {
        self.state_sizes
    }

    pub fn input_sizes(&self) -> [usize; 2] {
        self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn is_point_to_point(&self) -> bool {
        self.state_sizes[1] == 1 && self.input_sizes[1] == 1
    }

    pub fn state_prob(&self, s1: usize, s2: usize) -> f64 {
        self.state_pmf[s1 * self.state_sizes[1] + s2]
    }

    /// Marginal pmf of S_j (j = 0 or 1).
    pub fn state_marginal(&self, j: usize) -> Vec<f64> {
        let [ns1, ns2] = self.state_sizes;
        let mut out = vec![0.0; self.state_sizes[j]];
        for s1 in 0..ns1 {
            for s2 in 0..ns2 {
                out[if j == 0 { s1 } else { s2 }] += self.state_prob(s1, s2);
            }
        }
        out
    }

    fn row_start(&self, x1: usize, x2: usize, s1: usize, s2: usize) -> usize {
        let [_, ns2] = self.state_sizes;
        let [nx1, nx2] = self.input_sizes;
        (((s1 * ns2 + s2) * nx1 + x1) * nx2 + x2) * self.output_size
    }

    /// W(y | x1, x2, s1, s2).
    pub fn w(&self, y: usize, x1: usize, x2: usize, s1: usize, s2: usize) -> f64 {
        self.kernel[self.row_start(x1, x2, s1, s2) + y]
    }

    /// The output distribution for one input and state tuple.
    pub fn w_row(&self, x1: usize, x2: usize, s1: usize, s2: usize) -> &[f64] {
        let start = self.row_start(x1, x2, s1, s2);
        &self.kernel[start..start + self.output_size]
    }

    /// kappa_j(x, s) for user j (0 or 1).
    pub fn cost(&self, j: usize, x: usize, s: usize) -> f64 {
        self.costs[j][x * self.state_sizes[j] + s]
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn check_dist(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return invalid(format!("{what} has a negative or non-finite entry"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return invalid(format!("{what} sums to {total}"));
    }
    Ok(())
}

fn hamming(_: usize, x: usize, _: usize) -> f64 {
    if x == 0 {
        0.0
    } else {
        1.0
    }
}

fn deterministic(y: usize, value: usize) -> f64 {
    if y == value {
        1.0
    } else {
        0.0
    }
}

/// Binary doubly dirty MAC: Y = X1 + S1 + X2 + S2 over GF(2), uniform states, Hamming cost.
pub fn bdd() -> ChannelSpec {
    ChannelSpec::from_fn(
        "bdd",
        [2, 2],
        [2, 2],
        2,
        |_, _| 0.25,
        |y, x1, x2, s1, s2| deterministic(y, x1 ^ s1 ^ x2 ^ s2),
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Y = (X1 or S1) xor (X2 or S2), uniform states, Hamming cost.
pub fn example1() -> ChannelSpec {
    ChannelSpec::from_fn(
        "example1",
        [2, 2],
        [2, 2],
        2,
        |_, _| 0.25,
        |y, x1, x2, s1, s2| deterministic(y, (x1 | s1) ^ (x2 | s2)),
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Noisy doubly dirty binary MAC given by a table of W(0 | s2 x2 s1 x1).
pub fn example2() -> ChannelSpec {
    // Keyed by the bit string s2 x2 s1 x1.
    const W0: [(&str, f64); 16] = [
        ("0000", 0.92),
        ("0001", 0.08),
        ("0010", 0.06),
        ("0011", 0.94),
        ("1000", 0.07),
        ("1001", 0.92),
        ("1010", 0.96),
        ("1011", 0.10),
        ("0100", 0.10),
        ("0101", 0.92),
        ("0110", 0.95),
        ("0111", 0.06),
        ("1100", 0.88),
        ("1101", 0.08),
        ("1110", 0.11),
        ("1111", 0.91),
    ];
    let lookup = |x1: usize, x2: usize, s1: usize, s2: usize| {
        let key = format!("{s2}{x2}{s1}{x1}");
        W0.iter()
            .find(|(k, _)| *k == key)
            .map(|&(_, p)| p)
            .expect("full table")
    };
    ChannelSpec::from_fn(
        "example2",
        [2, 2],
        [2, 2],
        2,
        |_, _| 0.25,
        |y, x1, x2, s1, s2| {
            let p0 = lookup(x1, x2, s1, s2);
            if y == 0 {
                p0
            } else {
                1.0 - p0
            }
        },
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Y = (S1 xor X1) or (S2 xor X2), uniform states, Hamming cost.
pub fn example3() -> ChannelSpec {
    ChannelSpec::from_fn(
        "example3",
        [2, 2],
        [2, 2],
        2,
        |_, _| 0.25,
        |y, x1, x2, s1, s2| deterministic(y, (s1 ^ x1) | (s2 ^ x2)),
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Binary MAC where user j is erased by its state unless it transmits:
/// g = (s1 and not x1) xor (s2 and not x2), followed by an asymmetric binary
/// channel with crossovers 0.02 (0 to 1) and 0.04 (1 to 0).
/// States are uniform and costs are Hamming weights.
pub fn blackwell() -> ChannelSpec {
    ChannelSpec::from_fn(
        "blackwell",
        [2, 2],
        [2, 2],
        2,
        |_, _| 0.25,
        |y, x1, x2, s1, s2| {
            let g = (s1 & (1 - x1)) ^ (s2 & (1 - x2));
            match (g, y) {
                (0, 0) => 0.98,
                (0, _) => 0.02,
                (_, 0) => 0.04,
                _ => 0.96,
            }
        },
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Quaternary doubly dirty MAC: Y = X1 + S1 + X2 + S2 mod 4, uniform states,
/// unit cost for every nonzero input.
pub fn qdd() -> ChannelSpec {
    ChannelSpec::from_fn(
        "qdd",
        [4, 4],
        [4, 4],
        4,
        |_, _| 1.0 / 16.0,
        |y, x1, x2, s1, s2| deterministic(y, (x1 + s1 + x2 + s2) % 4),
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Point-to-point binary dirty channel Y = X xor S with a uniform state.
pub fn dirty_ptp() -> ChannelSpec {
    ChannelSpec::from_fn(
        "dirty-ptp",
        [2, 1],
        [2, 1],
        2,
        |_, _| 0.5,
        |y, x1, _, s1, _| deterministic(y, x1 ^ s1),
        hamming,
    )
    .expect("catalog channel is valid")
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 7] = [
    "bdd",
    "example1",
    "example2",
    "example3",
    "blackwell",
    "qdd",
    "dirty-ptp",
];

/// Looks up a built-in channel by name.
pub fn catalog(name: &str) -> Result<ChannelSpec> {
    match name.to_ascii_lowercase().as_str() {
        "bdd" => Ok(bdd()),
        "example1" => Ok(example1()),
        "example2" | "table1" => Ok(example2()),
        "example3" => Ok(example3()),
        "blackwell" => Ok(blackwell()),
        "qdd" => Ok(qdd()),
        "dirty-ptp" | "ptp" => Ok(dirty_ptp()),
        other => invalid(format!(
            "unknown channel '{other}'; known: {}",
            CATALOG_NAMES.join(", ")
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example2_lookup() {
        let ch = example2();
        // row 0010: s2 = 0, x2 = 0, s1 = 1, x1 = 0
        assert_eq!(ch.w(0, 0, 0, 1, 0), 0.06);
        assert_eq!(ch.w(1, 0, 0, 1, 0), 1.0 - 0.06);
        // row 1101: s2 = 1, x2 = 1, s1 = 0, x1 = 1
        assert_eq!(ch.w(0, 1, 1, 0, 1), 0.08);
    }

    #[test]
    fn catalog_entries_validate() {
        for name in CATALOG_NAMES {
            let ch = catalog(name).unwrap();
            assert_eq!(ch.name(), name);
        }
        assert!(catalog("nope").is_err());
        assert!(dirty_ptp().is_point_to_point());
        assert!(!bdd().is_point_to_point());
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = ChannelSpec::from_fn(
            "bad",
            [1, 1],
            [1, 1],
            2,
            |_, _| 1.0,
            |_, _, _, _, _| 0.6,
            |_, _, _| 0.0,
        );
        assert!(bad.is_err());
        let neg_cost = ChannelSpec::from_fn(
            "bad",
            [1, 1],
            [1, 1],
            1,
            |_, _| 1.0,
            |_, _, _, _, _| 1.0,
            |_, _, _| -1.0,
        );
        assert!(neg_cost.is_err());
    }

    #[test]
    fn qdd_costs() {
        let ch = qdd();
        assert_eq!(ch.cost(0, 2, 3), 1.0);
        assert_eq!(ch.cost(1, 0, 1), 0.0);
        assert_eq!(ch.state_marginal(0), vec![0.25; 4]);
    }
}
