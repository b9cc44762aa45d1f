//! Channels, test channels, the achievable sum-rate expressions and the grid
//! search that turns them into rate-cost curves.

mod bounds;
mod channel;
mod config;
pub mod families;
mod search;
mod test_channel;

pub use bounds::{
    alpha_bounds, alpha_bounds_raw, beta_f_sum_rate, beta_f_sum_rate_raw, gp_rate,
    qdd_closed_forms, rsf_bounds, rsg_bounds, QddClosedForms, RateBounds,
};
pub use channel::{
    bdd, blackwell, catalog, dirty_ptp, example1, example2, example3, qdd, ChannelSpec,
    CATALOG_NAMES,
};
pub use config::{parse_channel_config, write_channel_config};
pub use search::{
    best_sum_rate, dedupe_candidates, enumerate_test_channels, search_sum_rate, simplex_points,
    tau_grid, user_candidates, BinBest, Candidate, SearchFamily, SearchOptions, SearchOutcome,
    TestChannelStream,
};
pub use test_channel::{TestChannel, UserConditional, VAlgebra, JOINT_VARS};
