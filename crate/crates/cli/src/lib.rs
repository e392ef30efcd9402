//! Batch front end for the real-clock quantum library: JSON experiment
//! configs in, CSV tables, JSON reports, and SVG plots out.

pub mod config;
pub mod output;
pub mod runner;
pub mod svg;
pub mod sweep;
