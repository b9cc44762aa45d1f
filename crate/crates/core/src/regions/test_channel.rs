use std::sync::Arc;

use super::channel::ChannelSpec;
use crate::algebra::{Field, GroupSpec};
use crate::error::{invalid, Result};
use crate::info::{JointPmf, MASS_TOL, PROB_EPS};

/// Algebraic structure carried by the V alphabets of a test channel.
#[derive(Debug, Clone, PartialEq)]
pub enum VAlgebra {
    /// No structure; only the unstructured bounds apply.
    Plain,
    Field(Arc<Field>),
    Group(GroupSpec),
}

impl VAlgebra {
    /// Addition of two V symbols, if the alphabet has one.
    pub fn add(&self, a: usize, b: usize) -> Option<usize> {
        match self {
            VAlgebra::Plain => None,
            VAlgebra::Field(f) => Some(f.add(a as u8, b as u8) as usize),
            VAlgebra::Group(g) => Some(g.add_index(a, b)),
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            VAlgebra::Plain => None,
            VAlgebra::Field(f) => Some(f.order()),
            VAlgebra::Group(g) => Some(g.order()),
        }
    }
}

/// Per-user conditional p(u, v, x | s), stored as `[s][u][v][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserConditional {
    pub u_size: usize,
    pub v_size: usize,
    pub table: Vec<f64>,
}

impl UserConditional {
    /// Builds the table from a closure `p(u, v, x | s)`.
    pub fn from_fn(
        s_size: usize,
        u_size: usize,
        v_size: usize,
        x_size: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut table = Vec::with_capacity(s_size * u_size * v_size * x_size);
        for s in 0..s_size {
            for u in 0..u_size {
                for v in 0..v_size {
                    for x in 0..x_size {
                        table.push(f(u, v, x, s));
                    }
                }
            }
        }
        Self {
            u_size,
            v_size,
            table,
        }
    }

    fn x_size(&self, s_size: usize) -> usize {
        self.table.len() / (s_size * self.u_size * self.v_size).max(1)
    }
}

/// A two-user test channel: independent per-user conditionals p(u_j, v_j, x_j | s_j)
/// composed with the channel. The unstructured auxiliary of user j is the pair
/// (U_j, V_j); the coset-code auxiliary is V_j.
#[derive(Debug, Clone, PartialEq)]
pub struct TestChannel {
    channel: Arc<ChannelSpec>,
    algebra: VAlgebra,
    users: [UserConditional; 2],
}

/// Variable names in [`TestChannel::joint`].
pub const JOINT_VARS: [&str; 9] = ["S1", "S2", "U1", "V1", "X1", "U2", "V2", "X2", "Y"];

impl TestChannel {
    pub fn new(
        channel: Arc<ChannelSpec>,
        algebra: VAlgebra,
        users: [UserConditional; 2],
    ) -> Result<Self> {
        for (j, user) in users.iter().enumerate() {
            let s_size = channel.state_sizes()[j];
            let x_size = channel.input_sizes()[j];
            if user.u_size == 0 || user.v_size == 0 {
                return invalid("auxiliary alphabets must be nonempty");
            }
            if user.table.len() != s_size * user.u_size * user.v_size * x_size {
                return invalid(format!("conditional of user {} has the wrong size", j + 1));
            }
            if user.table.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return invalid(format!("conditional of user {} has invalid entries", j + 1));
            }
            let row = user.u_size * user.v_size * x_size;
            for (s, r) in user.table.chunks(row).enumerate() {
                let total: f64 = r.iter().sum();
                if (total - 1.0).abs() > MASS_TOL {
                    return invalid(format!(
                        "p(u, v, x | s = {s}) of user {} sums to {total}",
                        j + 1
                    ));
                }
            }
            if let Some(order) = algebra.order() {
                if user.v_size != order && user.v_size != 1 {
                    return invalid(format!(
                        "V alphabet of user {} has {} symbols but the algebra has order {order}",
                        j + 1,
                        user.v_size
                    ));
                }
            }
        }
        if algebra.order().is_some() && users[0].v_size != users[1].v_size {
            return invalid("both users must share the structured V alphabet");
        }
        Ok(Self {
            channel,
            algebra,
            users,
        })
    }

    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn channel_arc(&self) -> &Arc<ChannelSpec> {
        &self.channel
    }

    pub fn algebra(&self) -> &VAlgebra {
        &self.algebra
    }

    pub fn user(&self, j: usize) -> &UserConditional {
        &self.users[j]
    }

    fn cond(&self, j: usize, s: usize, u: usize, v: usize, x: usize) -> f64 {
        let user = &self.users[j];
        let nx = self.channel.input_sizes()[j];
        user.table[((s * user.u_size + u) * user.v_size + v) * nx + x]
    }

    /// p(u, v, x | s) of user j.
    pub fn conditional(&self, j: usize, u: usize, v: usize, x: usize, s: usize) -> f64 {
        self.cond(j, s, u, v, x)
    }

    /// Whether X_j is a function of (S_j, U_j, V_j) on the support.
    pub fn is_deterministic(&self) -> bool {
        (0..2).all(|j| {
            let user = &self.users[j];
            let nx = self.channel.input_sizes()[j];
            debug_assert_eq!(nx, user.x_size(self.channel.state_sizes()[j]));
            user.table
                .chunks(nx)
                .all(|row| row.iter().filter(|&&p| p > PROB_EPS).count() <= 1)
        })
    }

    pub fn require_deterministic(&self) -> Result<()> {
        if self.is_deterministic() {
            Ok(())
        } else {
            invalid("X_j must be a deterministic function of (S_j, U_j, V_j)")
        }
    }

    /// E[kappa_j(X_j, S_j)].
    pub fn expected_cost(&self, j: usize) -> f64 {
        let ws = self.channel.state_marginal(j);
        let user = &self.users[j];
        let nx = self.channel.input_sizes()[j];
        let mut total = 0.0;
        for (s, &ps) in ws.iter().enumerate() {
            for u in 0..user.u_size {
                for v in 0..user.v_size {
                    for x in 0..nx {
                        total += ps * self.cond(j, s, u, v, x) * self.channel.cost(j, x, s);
                    }
                }
            }
        }
        total
    }

    /// Joint pmf of (S1, S2, U1, V1, X1, U2, V2, X2, Y).
    pub fn joint(&self) -> Result<JointPmf> {
        let ch = &self.channel;
        let [ns1, ns2] = ch.state_sizes();
        let [nx1, nx2] = ch.input_sizes();
        let vars = [
            ("S1", ns1),
            ("S2", ns2),
            ("U1", self.users[0].u_size),
            ("V1", self.users[0].v_size),
            ("X1", nx1),
            ("U2", self.users[1].u_size),
            ("V2", self.users[1].v_size),
            ("X2", nx2),
            ("Y", ch.output_size()),
        ];
        JointPmf::from_fn(&vars, |i| {
            let [s1, s2, u1, v1, x1, u2, v2, x2, y] =
                [i[0], i[1], i[2], i[3], i[4], i[5], i[6], i[7], i[8]];
            ch.state_prob(s1, s2)
                * self.cond(0, s1, u1, v1, x1)
                * self.cond(1, s2, u2, v2, x2)
                * ch.w(y, x1, x2, s1, s2)
        })
    }

    /// Joint pmf extended with W = V1 + V2 under the V algebra.
    pub fn joint_with_sum(&self) -> Result<JointPmf> {
        let order = match self.algebra.order() {
            Some(o) => o,
            None => return invalid("V alphabet has no addition"),
        };
        let joint = self.joint()?;
        let (i1, i2) = (joint.var_index("V1")?, joint.var_index("V2")?);
        joint.with_derived("W", order, |idx| {
            self.algebra
                .add(idx[i1], idx[i2])
                .expect("structured algebra")
        })
    }
}
