//! Random nested coset codes, typicality encoding and sum decoding at small block
//! lengths, analytic error bounds, and exhaustive checks of the ensemble's
//! independence properties.

mod bounds;
mod coding;
mod ensemble;
mod lemmas;
mod simulate;

pub use bounds::{
    decoder_error_bound, decoder_error_bound_mac, decoder_error_bound_mac_from,
    decoder_error_bound_ptp_from, encoder_failure_bound, encoder_failure_bound_from,
};
pub use coding::{
    decode_sum, sum_output_pmf, typicality_encode, user_vs_pmf, DecodeOutcome, DecodeVerdict,
    EncodeOutcome,
};
pub use ensemble::{
    code_params_from_entropies, gp_code_params, mac_params_for_rate, sample_mac_pair,
    sample_nested_code, CodeParams, MacParams, MAX_GENERATOR_ENTRIES,
};
pub use lemmas::{
    check_coset_independence, check_mac_coset_independence, check_pairwise_independence,
    check_sum_identity, LemmaOptions, LemmaReport, DEFAULT_LEMMA_CAP,
};
pub use simulate::{simulate_mac, write_sim_csv, SimParams, SimReport};
