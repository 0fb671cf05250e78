//! FRED-MD-style panel ingestion and supervised-set construction.

mod month;
mod normalize;
mod prepare;
mod splits;
mod supervised;
mod table;
mod transform;

pub use month::Month;
pub use normalize::Normalizer;
pub use prepare::{prepare, PrepareOptions, PreparedDataset};
pub use splits::{SampleSplits, SplitSpec};
pub use supervised::{build_supervised, PredictorChoice, SupervisedSet};
pub use table::{load_table, Group, RawSeriesTable, TableMeta};
pub use transform::{apply_tcode, impute_missing, tcode_order, transform_panel, COMMON_TRIM};
