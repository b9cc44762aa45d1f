//! Finite fields, finite Abelian groups with their p-power subgroups, and nested
//! coset codes.

mod code;
mod field;
mod group;
mod linear;

pub use code::{MacCodePair, NestedCosetCode, DEFAULT_ENUMERATION_CAP};
pub use field::{prime_power_decomposition, smallest_prime_power_geq, Field, DEFAULT_FIELD_CAP};
pub use group::{CyclicFactor, GroupSpec, SubgroupIndex};
pub use linear::{for_each_vector, solve_affine, AffineSolution, AffineWalker, Matrix};
