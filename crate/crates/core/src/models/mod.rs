//! The five forecasting architectures and their parameter accounting.

mod assemble;
mod checkpoint;
mod memory;
mod select;
mod spec;

pub use assemble::{AssembledModel, ModelCache, PreparedInput};
pub use checkpoint::{load_model, save_model};
pub use memory::{extract_internal_memory, InternalMemory};
pub use select::{select_by_validation, TrainedInstance};
pub use spec::{ModelKind, NetworkSpec};
