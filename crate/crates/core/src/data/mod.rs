//! Dataset ingestion, standardization and the grouped design container.

pub mod dataset;
pub mod design;
pub mod standardize;

pub use dataset::{load_dataset, Dataset, Family};
pub use design::{BaseScaling, ColumnMeta, Group, GroupedDesign};
pub use standardize::{destandardize, standardize, StandardizationParams};
