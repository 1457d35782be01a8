//! Core library for clinical-trial table reasoning: benchmark construction
//! from seed queries, a restricted read-only SQL dialect, a deterministic
//! truth oracle, an LLM gateway with a scripted mock backend, the three-stage
//! planner-executor pipeline with direct-prompting baselines, and row-aligned
//! evaluation metrics.

pub mod sql;
pub mod table;
pub mod value;

pub use table::{load_table, table_stats, ClinicalTable, Row, TableFormat, TableStats, TypeHints};
pub use value::{canonical_text, CellValue};
