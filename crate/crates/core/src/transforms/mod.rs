//! The inverse Cartier and Cartier transforms with their supporting solvers.

mod cartier;
mod descent;
mod gauge;
mod inverse;
mod space;

pub use cartier::{cartier, cartier_traced, CartierTrace};
pub use descent::{chart_frame, default_degree_bound, flat_sections, verify_frame, DescentResult};
pub use gauge::{
    gauge_compare, gauge_compare_flat, lift_independence, measure_epsilon, roundtrip, roundtrip_check,
    verify_flat_witness, verify_higgs_witness, witness_text, Epsilon, GaugeWitness, RoundTrip,
};
pub use inverse::{
    canonical_connection, inverse_cartier, inverse_cartier_with, lift_cocycle_report, twist, LiftChoice,
};
