//! File formats, dataset ingestion and the command-line pipeline built on
//! [`trackmine_core`].
//!
//! A dataset directory holds `tracklets.jsonl` and `timeline.jsonl` (tracker
//! output), `tracks.jsonl` (merged tracks), `annotations.csv`, and `EMB1`
//! embedding matrices. Each pipeline stage reads and writes these files; see
//! [`cli`] for the stages and [`formats`] for the layouts.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;

pub use error::{Error, Location, Result};
pub use ingest::{ingest_validate, ingest_validate_with, Adapter, IngestReport, NativeAdapter};
