//! Entropy and mutual information on dense joint pmfs, robust typicality, concave
//! envelopes of rate curves, and the group-code information quantities.

mod envelope;
mod group;
mod pmf;
mod typical;

pub use envelope::{upper_convex_envelope, Envelope, RateCurve};
pub use group::{
    coset_mi, group_entropy_source, group_mi_channel_zpr, group_mi_source_abelian,
    group_mi_source_zpr, simplex_grid, DEFAULT_WEIGHT_GRID,
};
pub use pmf::{binary_entropy, entropy_of, JointPmf, MASS_TOL, MAX_PMF_ENTRIES, PROB_EPS};
pub use typical::{is_typical, sanov_bound, TypicalityTest};
