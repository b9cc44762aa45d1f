use crate::error::{invalid, over_budget, Result};

/// Largest field order accepted unless a caller raises it.
pub const DEFAULT_FIELD_CAP: u32 = 16;

/// Arithmetic over F_q with q = p^e, elements encoded as integers 0..q.
///
/// Element `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` stands for the polynomial
/// `c_0 + c_1 x + ... + c_{e-1} x^{e-1}` reduced modulo the defining polynomial.
/// For GF(4) this gives 0, 1, 2 = x, 3 = x + 1 and addition is XOR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u32,
    e: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `Some((p, e))` when `q = p^e` for a prime p.
pub fn prime_power_decomposition(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

/// Smallest prime power that is at least `a`.
pub fn smallest_prime_power_geq(a: u64) -> Result<u64> {
    if a < 2 {
        return invalid(format!("alphabet size must be at least 2, got {a}"));
    }
    let mut q = a;
    while prime_power_decomposition(q).is_none() {
        q += 1;
    }
    Ok(q)
}

fn digits(mut v: usize, p: usize, e: usize) -> Vec<usize> {
    let mut d = vec![0; e];
    for slot in d.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    d
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiplies two residues given as coefficient vectors modulo a monic polynomial.
/// `modulus` holds the low coefficients c_0..c_{e-1} of x^e + ... + c_0.
fn poly_mul_mod(a: &[usize], b: &[usize], modulus: &[u32], p: usize) -> Vec<usize> {
    let e = a.len();
    let mut prod = vec![0usize; 2 * e.max(1)];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    for deg in (e..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        // x^e = -(c_0 + ... + c_{e-1} x^{e-1})
        for (k, &mk) in modulus.iter().enumerate() {
            let sub = c * mk as usize % p;
            prod[deg - e + k] = (prod[deg - e + k] + p - sub) % p;
        }
    }
    prod.truncate(e);
    prod
}

impl Field {
    /// Builds F_{p^e} with the lexicographically first irreducible modulus.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        Self::with_cap(p, e, DEFAULT_FIELD_CAP)
    }

    /// Like [`Field::new`] with an explicit cap on the field order.
    pub fn with_cap(p: u32, e: u32, cap: u32) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if e == 0 {
            return invalid("field extension degree must be positive");
        }
        let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if q > cap as u128 {
            return over_budget("field order", q, cap as u128);
        }
        let q = q as usize;
        if e == 1 {
            return Ok(Self::build(p, e, Vec::new()).expect("prime fields always build"));
        }
        // Scan monic polynomials of degree e in order of their low coefficients.
        for code in 0..q {
            let modulus: Vec<u32> = digits(code, p as usize, e as usize)
                .into_iter()
                .map(|c| c as u32)
                .collect();
            if let Some(f) = Self::build(p, e, modulus) {
                return Ok(f);
            }
        }
        invalid(format!(
            "no irreducible polynomial of degree {e} over F_{p}"
        ))
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Self> {
        match prime_power_decomposition(q) {
            Some((p, e)) => Self::new(p, e),
            None => invalid(format!("{q} is not a prime power")),
        }
    }

    /// Builds the field for an explicit modulus; fails if the modulus is reducible.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) || modulus.is_empty() || modulus.iter().any(|&c| c >= p) {
            return invalid("modulus must have coefficients in 0..p and degree at least 1");
        }
        let e = modulus.len() as u32;
        match Self::build(p, e, modulus) {
            Some(f) => Ok(f),
            None => invalid("modulus is reducible"),
        }
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Option<Self> {
        let q = (p as usize).pow(e);
        let pu = p as usize;
        let eu = e as usize;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, pu, eu);
            for b in 0..q {
                let db = digits(b, pu, eu);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % pu).collect();
                add[a * q + b] = undigits(&sum, pu) as u8;
                let prod = if eu == 1 {
                    vec![da[0] * db[0] % pu]
                } else {
                    poly_mul_mod(&da, &db, &modulus, pu)
                };
                mul[a * q + b] = undigits(&prod, pu) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0)? as u8;
            if a != 0 {
                // No inverse means a zero divisor, so the modulus is reducible.
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1)? as u8;
            }
        }
        Some(Self {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Low coefficients of the monic defining polynomial (empty for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.inv[a as usize])
    }

    /// `acc += c * row` elementwise.
    pub fn axpy(&self, acc: &mut [u8], c: u8, row: &[u8]) {
        if c == 0 {
            return;
        }
        for (a, &r) in acc.iter_mut().zip(row) {
            *a = self.add(*a, self.mul(c, r));
        }
    }

    /// Elementwise sum of two vectors.
    pub fn add_vec(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_labels() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1]);
        // x * x = x + 1
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        for a in 0..4u8 {
            for b in 0..4u8 {
                assert_eq!(f.add(a, b), a ^ b);
            }
        }
    }

    #[test]
    fn prime_power_lookup() {
        assert_eq!(smallest_prime_power_geq(5).unwrap(), 5);
        assert_eq!(smallest_prime_power_geq(6).unwrap(), 7);
        assert_eq!(smallest_prime_power_geq(15).unwrap(), 16);
        assert_eq!(smallest_prime_power_geq(2).unwrap(), 2);
        assert!(smallest_prime_power_geq(1).is_err());
        assert_eq!(prime_power_decomposition(9), Some((3, 2)));
        assert_eq!(prime_power_decomposition(12), None);
    }

    #[test]
    fn rejects_non_prime_and_oversized() {
        assert!(Field::new(6, 1).is_err());
        assert!(matches!(
            Field::new(2, 5),
            Err(crate::Error::Budget { required: 32, .. })
        ));
        assert!(Field::with_cap(2, 5, 32).is_ok());
        assert!(Field::of_order(6).is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(Field::with_modulus(2, vec![1, 0]).is_err());
        // x^2 + 1 is irreducible over F_3
        assert!(Field::with_modulus(3, vec![1, 0]).is_ok());
    }

    #[test]
    fn axioms_for_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::of_order(q).unwrap();
            let n = q as u8;
            for a in 0..n {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..n {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..n {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }
}
