//! Configuration-driven runs: problem assembly, pipelines and report files.

mod assemble;
mod catalog;
mod config;
mod run;

pub use assemble::{assemble, Assembled, Layout};
pub use catalog::{catalog, lookup, CatalogEntry};
pub use config::{ExperimentConfig, GridConfig, ProblemConfig, RunConfig, RunMode};
pub use run::{
    branch_table, is_config_error, run, state_checksum, state_table, BranchSummary, Check, Provenance, RunReport,
};

/// ` (did you mean `x`?)` for the closest candidate, or an empty string.
pub fn suggestion(name: &str, candidates: &[&str]) -> String {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(name, c), *c))
        .filter(|(d, c)| *d <= c.len().max(3) / 2)
        .min()
        .map(|(_, c)| format!(" (did you mean `{c}`?)"))
        .unwrap_or_default()
}
