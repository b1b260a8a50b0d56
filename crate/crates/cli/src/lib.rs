//! Experiment driver for EDA² and C-EDA²: configuration, batch runs,
//! result records and summary tables.

pub mod config;
pub mod records;
pub mod runner;
pub mod summary;
