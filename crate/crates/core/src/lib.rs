//! Revision analysis for versioned scientific documents.
//!
//! The pipeline reads article groups (all versions of a paper), aligns
//! paragraphs and sentences between adjacent versions, classifies the
//! resulting document-level operations, extracts span-level edits inside
//! revised sentences, and evaluates each stage against gold annotations.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod docops;
pub mod edits;
pub mod error;
pub mod intention;
pub mod metrics;
pub mod paragraph;
pub mod pipeline;
pub mod sentence;
pub mod similarity;

pub use error::{Error, Result};
