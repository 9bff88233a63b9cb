//! Hardness-reduction constructions as instance generators.
//!
//! Each generator emits a word/formula pair whose checker verdict is known
//! from an independent direct oracle (circuit evaluation, QBF recursion,
//! subset-sum game search), so generated instances are self-validating.

mod circuit;
mod pqss;
mod qbf;

pub use circuit::{
    eval_circuit, gen_circuit_mtl, gen_circuit_mtl_infinite, gen_circuit_smtl, parse_circuit,
    GateKind, Sam2Circuit,
};
pub use pqss::{
    eval_pqss, gen_pqss_freezeltl, gen_pqss_tptl2, parse_pqss, pqss_counting_word, PqssInstance,
};
pub use qbf::{eval_qbf, gen_qbf, parse_qbf, QbfInstance, Quantifier};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("QBF is not closed: {0}")]
    NonClosedQbf(String),
    #[error("PQSS instance needs an even, positive number of choices")]
    OddChoices,
    #[error("PQSS numbers must be positive")]
    NonPositive,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
