//! Path checking for quantitative temporal logics over data words.
//!
//! A *data word* is a sequence of (proposition set, natural number) pairs.
//! This crate decides whether finite, infinite-periodic or SLP-compressed
//! data words satisfy formulas of MTL, SMTL, TPTL and FreezeLTL, extracts
//! computations of deterministic one-counter machines as data words, and
//! generates self-validating hard instances from circuits, QBF and
//! quantified subset-sum games.

pub mod checker;
pub mod cli;
pub mod dataword;
pub mod docm;
pub mod formula;
pub mod generators;
pub mod slp;

pub use checker::{check_auto, Engine, Verdict};
pub use dataword::{DataPoint, DataWord, PeriodicWord};
pub use formula::Formula;
pub use slp::Slp;
