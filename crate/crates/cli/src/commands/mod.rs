pub mod evaluate;
pub mod gridsearch;
pub mod importance;
pub mod memory;
pub mod prepare;
pub mod run;
