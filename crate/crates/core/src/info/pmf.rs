use crate::error::{invalid, over_budget, Error, Result};

/// Largest table a [`JointPmf`] may hold.
pub const MAX_PMF_ENTRIES: usize = 10_000_000;

/// Probabilities below this are treated as exactly zero.
pub const PROB_EPS: f64 = 1e-15;

/// Tolerance on the total mass of a pmf.
pub const MASS_TOL: f64 = 1e-9;

/// Entropy in bits of a probability vector; entries below [`PROB_EPS`] count as zero.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > PROB_EPS)
        .map(|&p| -p * p.log2())
        .sum()
}

/// h_b(p) = -p log p - (1-p) log(1-p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("binary entropy argument {p} outside [0, 1]"));
    }
    Ok(entropy_of(&[p, 1.0 - p]))
}

/// Dense joint pmf over named finite variables.
///
/// The table is stored row-major: the last variable varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    names: Vec<String>,
    sizes: Vec<usize>,
    strides: Vec<usize>,
    probs: Vec<f64>,
}

fn strides_for(sizes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    strides
}

fn table_len(sizes: &[usize]) -> Result<usize> {
    let mut len: u128 = 1;
    for &s in sizes {
        if s == 0 {
            return invalid("variable with empty alphabet");
        }
        len = len.saturating_mul(s as u128);
    }
    if len > MAX_PMF_ENTRIES as u128 {
        return over_budget("joint pmf table", len, MAX_PMF_ENTRIES as u128);
    }
    Ok(len as usize)
}

impl JointPmf {
    pub fn new(vars: &[(&str, usize)], probs: Vec<f64>) -> Result<Self> {
        let names: Vec<String> = vars.iter().map(|(n, _)| n.to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return invalid(format!("duplicate variable name '{n}'"));
            }
        }
        let sizes: Vec<usize> = vars.iter().map(|&(_, s)| s).collect();
        let len = table_len(&sizes)?;
        if probs.len() != len {
            return invalid(format!(
                "table has {} entries, alphabets need {len}",
                probs.len()
            ));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return invalid(format!("invalid probability {p}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }
        Ok(Self {
            strides: strides_for(&sizes),
            names,
            sizes,
            probs,
        })
    }

    /// Builds the table by evaluating `f` on every assignment.
    pub fn from_fn(vars: &[(&str, usize)], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let sizes: Vec<usize> = vars.iter().map(|&(_, s)| s).collect();
        let len = table_len(&sizes)?;
        let mut idx = vec![0usize; sizes.len()];
        let mut probs = Vec::with_capacity(len);
        for _ in 0..len {
            probs.push(f(&idx));
            for i in (0..idx.len()).rev() {
                idx[i] += 1;
                if idx[i] < sizes[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
        Self::new(vars, probs)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Validation(format!("unknown variable '{name}'")))
    }

    pub fn size_of(&self, name: &str) -> Result<usize> {
        Ok(self.sizes[self.var_index(name)?])
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for n in names {
            let i = self.var_index(n)?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Decodes a flat table position into one index per variable.
    pub fn assignment(&self, mut pos: usize) -> Vec<usize> {
        let mut idx = vec![0; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            idx[i] = pos % self.sizes[i];
            pos /= self.sizes[i];
        }
        idx
    }

    /// Probability of a full assignment.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        let pos: usize = idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum();
        self.probs[pos]
    }

    fn marginal_table(&self, keep: &[usize]) -> Vec<f64> {
        let out_sizes: Vec<usize> = keep.iter().map(|&i| self.sizes[i]).collect();
        let out_strides = strides_for(&out_sizes);
        let mut out = vec![0.0; out_sizes.iter().product()];
        for (pos, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut o = 0;
            for (k, &v) in keep.iter().enumerate() {
                o += (pos / self.strides[v] % self.sizes[v]) * out_strides[k];
            }
            out[o] += p;
        }
        out
    }

    /// Marginal over the listed variables, in the listed order.
    pub fn marginal(&self, names: &[&str]) -> Result<JointPmf> {
        let keep = self.indices(names)?;
        let table = self.marginal_table(&keep);
        let vars: Vec<(&str, usize)> = keep
            .iter()
            .map(|&i| (self.names[i].as_str(), self.sizes[i]))
            .collect();
        Ok(JointPmf {
            names: vars.iter().map(|(n, _)| n.to_string()).collect(),
            sizes: vars.iter().map(|&(_, s)| s).collect(),
            strides: strides_for(&vars.iter().map(|&(_, s)| s).collect::<Vec<_>>()),
            probs: table,
        })
    }

    /// Appends a variable that is a deterministic function of the others.
    pub fn with_derived(
        &self,
        name: &str,
        size: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<JointPmf> {
        if self.names.iter().any(|n| n == name) {
            return invalid(format!("variable '{name}' already exists"));
        }
        let mut sizes = self.sizes.clone();
        sizes.push(size);
        let len = table_len(&sizes)?;
        let mut probs = vec![0.0; len];
        for (pos, &p) in self.probs.iter().enumerate() {
            let v = f(&self.assignment(pos));
            if v >= size {
                return invalid(format!("derived value {v} outside alphabet of size {size}"));
            }
            probs[pos * size + v] = p;
        }
        let mut names = self.names.clone();
        names.push(name.to_string());
        Ok(JointPmf {
            strides: strides_for(&sizes),
            names,
            sizes,
            probs,
        })
    }

    /// Joint entropy H(names) in bits; the empty set has entropy zero.
    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        let keep = self.indices(names)?;
        if keep.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_of(&self.marginal_table(&keep)))
    }

    /// H(a | b).
    pub fn conditional_entropy(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        let ab: Vec<&str> = a.iter().chain(b).copied().collect();
        Ok((self.entropy(&ab)? - self.entropy(b)?).max(0.0))
    }

    /// I(a; b).
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        let ab: Vec<&str> = a.iter().chain(b).copied().collect();
        Ok((self.entropy(a)? + self.entropy(b)? - self.entropy(&ab)?).max(0.0))
    }

    /// I(a; b | c).
    pub fn conditional_mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
        Ok(
            (self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(&abc)? - self.entropy(c)?)
                .max(0.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn independent_bits(p: f64, q: f64) -> JointPmf {
        JointPmf::from_fn(&[("A", 2), ("B", 2)], |i| {
            let a = if i[0] == 1 { p } else { 1.0 - p };
            let b = if i[1] == 1 { q } else { 1.0 - q };
            a * b
        })
        .unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!((binary_entropy(0.11).unwrap() - 0.4999165).abs() < 1e-6);
    }

    #[test]
    fn independent_variables() {
        let p = independent_bits(0.3, 0.2);
        assert!(p.mutual_information(&["A"], &["B"]).unwrap() < 1e-12);
        let h = p.entropy(&["A", "B"]).unwrap();
        let expect = binary_entropy(0.3).unwrap() + binary_entropy(0.2).unwrap();
        assert!((h - expect).abs() < 1e-12);
        assert_eq!(p.entropy(&[]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(JointPmf::new(&[("A", 2)], vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(&[("A", 2)], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(&[("A", 2)], vec![1.0]).is_err());
        assert!(JointPmf::new(&[("A", 2), ("A", 1)], vec![0.5, 0.5]).is_err());
        assert!(matches!(
            JointPmf::new(&[("A", 10_000), ("B", 10_000)], vec![]),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn derived_xor_and_conditional_terms() {
        let p = independent_bits(0.5, 0.1);
        let q = p.with_derived("C", 2, |i| i[0] ^ i[1]).unwrap();
        // C = A xor B with A uniform is uniform and independent of B
        assert!((q.entropy(&["C"]).unwrap() - 1.0).abs() < 1e-12);
        assert!(q.mutual_information(&["C"], &["B"]).unwrap() < 1e-12);
        let h = binary_entropy(0.1).unwrap();
        assert!((q.conditional_entropy(&["C"], &["A"]).unwrap() - h).abs() < 1e-12);
        assert!((q.conditional_mi(&["A"], &["B"], &["C"]).unwrap() - h).abs() < 1e-12);
        let m = q.marginal(&["C", "A"]).unwrap();
        assert_eq!(m.names(), &["C".to_string(), "A".to_string()]);
        assert!((m.prob(&[1, 0]) - 0.5 * 0.1).abs() < 1e-15);
    }
}
