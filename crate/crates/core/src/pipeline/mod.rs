//! Ingestion, per-condition fitting, hybrid scoring, ROC and export.

mod data;
mod export;
mod roc;
mod scores;

pub use data::{
    center, load_csv, load_gold, load_matrix_csv, read_csv, read_gold, sample_covariance, CenterMode,
    ObservationSet, CONDITION_COLUMN, TIME_COLUMN,
};
pub use export::{
    fmt_sig, read_scores, write_edges, write_observations, write_roc, write_scores, Format,
};
pub use roc::{roc_auc, RocResult};
pub use scores::{
    fit_condition, hybrid_edge_scores, parse_rho_path, run_hybrid, ConditionFit, EdgeScoreMatrix,
    FitOptions, GgcemVariant, GgimFit, GgimVariant, HybridResult,
};
