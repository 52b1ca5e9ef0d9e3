//! Synthetic experiments: data generators, frameworks, and scoring.

pub mod generate;
pub mod interactions;
pub mod metrics;
pub mod ols;
pub mod poly;
pub mod stats;
pub mod table;

pub use generate::{
    gen_beta_inter, gen_beta_main, gen_interaction_data, gen_poly_data, inter_magnitude,
    sample_active_interactions, InterSimConfig, InteractionData, InteractionTruth, PolyTruth,
    Polynomial,
};
pub use interactions::{run_interaction_experiment, Framework, InterFitOptions};
pub use metrics::{evaluate_selection, even_grid, rmse, rmse_estimation, SelectionMetrics};
pub use ols::ols;
pub use poly::{run_poly_experiment, PolySimConfig, PolyTuning};
pub use stats::{paired_t_test, PairedTest};
pub use table::{
    check_unique, compare, read_rows, summarize, write_csv, write_rows, Comparison, SimRow,
    SimSummary, SummaryRow, SCHEMA_VERSION,
};
