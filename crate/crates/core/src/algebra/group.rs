use super::field::prime_power_decomposition;
use crate::error::{invalid, Result};

/// One cyclic factor Z_{p^r} of a finite Abelian group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicFactor {
    pub p: u32,
    pub r: u32,
}

impl CyclicFactor {
    pub fn modulus(&self) -> u32 {
        self.p.pow(self.r)
    }
}

/// A finite Abelian group written as a direct sum of cyclic p-power factors.
///
/// Elements are tuples with one residue per factor. They are also indexed as
/// mixed-radix integers with the first factor as the least significant digit,
/// which is the labeling used for pmf tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    factors: Vec<CyclicFactor>,
    moduli: Vec<u32>,
    order: usize,
}

/// Exponent vector theta with 0 <= theta_i <= r_i, naming H_theta = sum_i p_i^theta_i Z.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgroupIndex(pub Vec<u32>);

impl GroupSpec {
    pub fn new(factors: Vec<CyclicFactor>) -> Result<Self> {
        if factors.is_empty() {
            return invalid("a group needs at least one factor");
        }
        let mut order: u128 = 1;
        for f in &factors {
            if f.r == 0 || prime_power_decomposition(f.p as u64) != Some((f.p, 1)) {
                return invalid(format!("bad cyclic factor Z_{}^{}", f.p, f.r));
            }
            order = order.saturating_mul((f.p as u128).saturating_pow(f.r));
        }
        if order > u32::MAX as u128 {
            return invalid("group order too large");
        }
        let moduli = factors.iter().map(CyclicFactor::modulus).collect();
        Ok(Self {
            factors,
            moduli,
            order: order as usize,
        })
    }

    /// Z_{p^r}.
    pub fn cyclic(p: u32, r: u32) -> Result<Self> {
        Self::new(vec![CyclicFactor { p, r }])
    }

    /// Z_m for a prime power m.
    pub fn cyclic_of_order(m: u64) -> Result<Self> {
        match prime_power_decomposition(m) {
            Some((p, r)) => Self::cyclic(p, r),
            None => invalid(format!("Z_{m} is not a cyclic p-group")),
        }
    }

    /// Parses a list like `Z4xZ2` or `4,2`; each entry must be a prime power.
    pub fn parse(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for part in text.split(['x', ',', '+', '*']) {
            let part = part.trim().trim_start_matches('Z').trim_start_matches('z');
            if part.is_empty() {
                continue;
            }
            let m: u64 = part
                .parse()
                .map_err(|_| crate::Error::Validation(format!("bad group factor '{part}'")))?;
            match prime_power_decomposition(m) {
                Some((p, r)) => factors.push(CyclicFactor { p, r }),
                None => return invalid(format!("factor Z_{m} is not a cyclic p-group")),
            }
        }
        Self::new(factors)
    }

    pub fn factors(&self) -> &[CyclicFactor] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_cyclic_p_group(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn element(&self, mut index: usize) -> Vec<u32> {
        self.moduli
            .iter()
            .map(|&m| {
                let d = (index % m as usize) as u32;
                index /= m as usize;
                d
            })
            .collect()
    }

    pub fn index_of(&self, x: &[u32]) -> usize {
        x.iter()
            .zip(&self.moduli)
            .rev()
            .fold(0, |acc, (&d, &m)| acc * m as usize + (d % m) as usize)
    }

    pub fn add(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        x.iter()
            .zip(y)
            .zip(&self.moduli)
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect()
    }

    pub fn neg(&self, x: &[u32]) -> Vec<u32> {
        x.iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| (m - a % m) % m)
            .collect()
    }

    /// Group addition on mixed-radix indices.
    pub fn add_index(&self, i: usize, j: usize) -> usize {
        let (mut i, mut j) = (i, j);
        let mut out = 0;
        let mut scale = 1;
        for &m in &self.moduli {
            let m = m as usize;
            out += ((i % m + j % m) % m) * scale;
            scale *= m;
            i /= m;
            j /= m;
        }
        out
    }

    /// Every valid theta, in lexicographic order.
    pub fn subgroup_indices(&self) -> Vec<SubgroupIndex> {
        let mut out = vec![Vec::new()];
        for f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=f.r).map(move |t| {
                        let mut v = prefix.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(SubgroupIndex).collect()
    }

    pub fn check_theta(&self, theta: &SubgroupIndex) -> Result<()> {
        if theta.0.len() != self.factors.len()
            || theta.0.iter().zip(&self.factors).any(|(&t, f)| t > f.r)
        {
            return invalid(format!("theta {:?} does not fit the group", theta.0));
        }
        Ok(())
    }

    /// Number of cosets of H_theta, i.e. prod_i p_i^theta_i.
    pub fn coset_count(&self, theta: &SubgroupIndex) -> usize {
        theta
            .0
            .iter()
            .zip(&self.factors)
            .map(|(&t, f)| f.p.pow(t) as usize)
            .product()
    }

    /// Order of H_theta.
    pub fn subgroup_order(&self, theta: &SubgroupIndex) -> usize {
        self.order / self.coset_count(theta)
    }

    /// Whether `x` lies in H_theta.
    pub fn in_subgroup(&self, theta: &SubgroupIndex, x: &[u32]) -> bool {
        x.iter()
            .zip(&theta.0)
            .zip(&self.factors)
            .all(|((&v, &t), f)| v % f.p.pow(t) == 0)
    }

    /// Coset label [x]_theta: the tuple (x_i mod p_i^theta_i) as a mixed-radix index.
    pub fn coset_label(&self, theta: &SubgroupIndex, x: &[u32]) -> usize {
        let mut out = 0;
        let mut scale = 1;
        for ((&v, &t), f) in x.iter().zip(&theta.0).zip(&self.factors) {
            let m = f.p.pow(t) as usize;
            out += (v as usize % m) * scale;
            scale *= m;
        }
        out
    }

    /// Coset label of the element with mixed-radix index `i`.
    pub fn coset_label_of_index(&self, theta: &SubgroupIndex, i: usize) -> usize {
        self.coset_label(theta, &self.element(i))
    }

    /// The weight w_theta = sum_i (r_i - theta_i)/r_i * w_i.
    pub fn theta_weight(&self, theta: &SubgroupIndex, w: &[f64]) -> f64 {
        theta
            .0
            .iter()
            .zip(&self.factors)
            .zip(w)
            .map(|((&t, f), &wi)| (f.r - t) as f64 / f.r as f64 * wi)
            .sum()
    }
}
