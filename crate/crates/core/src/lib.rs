//! Procedural museum layouts from personal artifact archives.

pub mod bspca;
pub mod catalog;
pub mod config;
pub mod footprint;
pub mod generate;
pub mod growth;
pub mod rng;
pub mod roomgen;
pub mod scene;
pub mod session;
#[cfg(feature = "server")]
pub mod service;
pub mod sizing;
