//! Nonclassical structures of the N-qubit Pauli group: identity products
//! (IDs), their representative classes and census, NKS and KS contextuality
//! sets, critical NKS structures (CNSs), stabilizer groups, and a dense
//! matrix oracle for small qubit counts.
//!
//! The library is organized around a few carriers:
//!
//! * [`pauli::PauliWord`] — bit-packed unsigned Pauli observable.
//! * [`id::IdTable`] — a validated M x N identity product with derived sign,
//!   Odd-SQP count, and column classes.
//! * [`contextuality::IdSet`] — an ordered collection of IDs, the carrier of
//!   NKS/KS properties.
//! * [`cns::CnsMatrix`] — an R x Q grid over {O, I} abstracting a set of
//!   generalized IDs.
//!
//! All types are immutable values and every operation is pure; the heavy
//! searches parallelize internally with results independent of thread count.

pub mod budget;
pub mod pauli;
pub mod sqp;
pub mod id;
pub mod criticality;
pub mod equivalence;
pub mod enumeration;
pub mod gf2;
pub mod contextuality;
pub mod cns;
pub mod stabilizer;
pub mod oracle;
pub mod io;
pub mod catalog;

pub use budget::{Budget, BudgetError};
pub use criticality::{
    entangled_set_check, is_critical_id, is_odd_critical, minimal_generators_check,
    CriticalityReport, SplitWitness,
};
pub use id::{analyze_id, eigenbasis_rank, IdError, IdTable};
pub use pauli::{
    commutes, letter_product, word_product, PauliError, PauliLetter, PauliWord, PhaseExponent,
    Sign,
};
pub use sqp::{classify_sqp, SqpClass, SqpColumn};
