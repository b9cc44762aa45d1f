use std::collections::BTreeSet;
use std::sync::Arc;

use super::field::Field;
use super::linear::{AffineWalker, Matrix};
use crate::error::{invalid, over_budget, Result};

/// Default cap on the number of coset members enumerated in one call.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 22;

/// Nested coset code over F_q: v(a, m) = a g_I + m g_{O/I} + b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedCosetCode {
    field: Arc<Field>,
    g_inner: Matrix,
    g_outer: Matrix,
    bias: Vec<u8>,
}

impl NestedCosetCode {
    pub fn new(field: Arc<Field>, g_inner: Matrix, g_outer: Matrix, bias: Vec<u8>) -> Result<Self> {
        let n = bias.len();
        if n == 0 {
            return invalid("block length must be positive");
        }
        if (g_inner.rows > 0 && g_inner.cols != n) || (g_outer.rows > 0 && g_outer.cols != n) {
            return invalid("generator width does not match the bias length");
        }
        let q = field.order() as u8;
        if g_inner
            .data
            .iter()
            .chain(&g_outer.data)
            .chain(&bias)
            .any(|&v| v >= q)
        {
            return invalid("entry outside the field");
        }
        Ok(Self {
            field,
            g_inner: Matrix { cols: n, ..g_inner },
            g_outer: Matrix { cols: n, ..g_outer },
            bias,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.bias.len()
    }

    pub fn k(&self) -> usize {
        self.g_inner.rows
    }

    pub fn l(&self) -> usize {
        self.g_outer.rows
    }

    pub fn g_inner(&self) -> &Matrix {
        &self.g_inner
    }

    pub fn g_outer(&self) -> &Matrix {
        &self.g_outer
    }

    pub fn bias(&self) -> &[u8] {
        &self.bias
    }

    pub fn codeword(&self, a: &[u8], m: &[u8]) -> Result<Vec<u8>> {
        if a.len() != self.k() || m.len() != self.l() {
            return invalid(format!(
                "index lengths ({}, {}) do not match (k, l) = ({}, {})",
                a.len(),
                m.len(),
                self.k(),
                self.l()
            ));
        }
        let q = self.field.order() as u8;
        if a.iter().chain(m).any(|&v| v >= q) {
            return invalid("index entry outside the field");
        }
        let mut v = self.bias.clone();
        for (i, &c) in a.iter().enumerate() {
            self.field.axpy(&mut v, c, self.g_inner.row(i));
        }
        for (i, &c) in m.iter().enumerate() {
            self.field.axpy(&mut v, c, self.g_outer.row(i));
        }
        Ok(v)
    }

    /// Start of coset m, i.e. v(0, m).
    pub fn coset_base(&self, m: &[u8]) -> Result<Vec<u8>> {
        self.codeword(&vec![0; self.k()], m)
    }

    /// Walker over the q^k words of coset m (with repetition if g_I is rank deficient).
    pub fn coset_walker(&self, m: &[u8]) -> Result<AffineWalker<'_>> {
        let base = self.coset_base(m)?;
        let rows: Vec<&[u8]> = (0..self.k()).map(|i| self.g_inner.row(i)).collect();
        Ok(AffineWalker::new(&self.field, &base, &rows))
    }

    /// Number of words the coset walk visits, q^k.
    pub fn coset_walk_len(&self) -> u128 {
        (self.field.order() as u128).saturating_pow(self.k() as u32)
    }

    /// The distinct words of coset m.
    pub fn enumerate_coset(&self, m: &[u8], cap: u128) -> Result<BTreeSet<Vec<u8>>> {
        let len = self.coset_walk_len();
        if len > cap {
            return over_budget("coset enumeration", len, cap);
        }
        let mut walker = self.coset_walker(m)?;
        let mut out = BTreeSet::new();
        while let Some(v) = walker.next_vector() {
            out.insert(v.to_vec());
        }
        Ok(out)
    }
}

/// Pair of nested coset codes for two users sharing the inner generator rows.
///
/// The user with the smaller k takes the first rows of the larger inner generator,
/// so the sum of the two codebooks sits inside one nested coset code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacCodePair {
    field: Arc<Field>,
    k: [usize; 2],
    g_inner: Matrix,
    g_outer: [Matrix; 2],
    bias: [Vec<u8>; 2],
}

impl MacCodePair {
    pub fn new(
        field: Arc<Field>,
        k: [usize; 2],
        g_inner: Matrix,
        g_outer: [Matrix; 2],
        bias: [Vec<u8>; 2],
    ) -> Result<Self> {
        let n = bias[0].len();
        if bias[1].len() != n {
            return invalid("bias lengths differ");
        }
        if g_inner.rows != k[0].max(k[1]) {
            return invalid("inner generator must have max(k1, k2) rows");
        }
        let pair = Self {
            field,
            k,
            g_inner,
            g_outer,
            bias,
        };
        pair.user_code(0)?;
        pair.user_code(1)?;
        Ok(pair)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.bias[0].len()
    }

    pub fn k(&self) -> [usize; 2] {
        self.k
    }

    pub fn l(&self) -> [usize; 2] {
        [self.g_outer[0].rows, self.g_outer[1].rows]
    }

    /// Code of user `j` (0 or 1).
    pub fn user_code(&self, j: usize) -> Result<NestedCosetCode> {
        NestedCosetCode::new(
            self.field.clone(),
            self.g_inner.top_rows(self.k[j]),
            self.g_outer[j].clone(),
            self.bias[j].clone(),
        )
    }

    /// Code whose cosets are indexed by (m1, m2) and contain every sum v1 + v2.
    pub fn sum_code(&self) -> Result<NestedCosetCode> {
        NestedCosetCode::new(
            self.field.clone(),
            self.g_inner.clone(),
            self.g_outer[0].vstack(&self.g_outer[1])?,
            self.field.add_vec(&self.bias[0], &self.bias[1]),
        )
    }

    /// Inner index of v1(a1, .) + v2(a2, .) in the sum code.
    pub fn sum_inner_index(&self, a1: &[u8], a2: &[u8]) -> Vec<u8> {
        let kmax = self.g_inner.rows;
        let mut out = vec![0u8; kmax];
        for (i, &c) in a1.iter().enumerate() {
            out[i] = self.field.add(out[i], c);
        }
        for (i, &c) in a2.iter().enumerate() {
            out[i] = self.field.add(out[i], c);
        }
        out
    }
}
