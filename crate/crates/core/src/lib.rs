//! Decide which unitary group is generated when passive bosonic linear
//! optics, passive fermionic linear optics or active fermionic linear optics
//! is supplemented by one extra Hamiltonian or gate.
//!
//! The closed-form criteria (invariant bilinear forms, normalizer and
//! automorphism tests) live in [`classifier`]; [`closure`] provides an
//! independent brute-force Lie-closure oracle to check them against.

pub mod classifier;
pub mod closure;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod models;
pub mod reps;
pub mod secondq;
pub mod sectors;

pub use classifier::{
    classify, classify_gate, classify_hamiltonian, cross_kerr_predicate, cross_validate, ClassificationResult,
    CrossValidation, Evidence, Extension, OracleEvidence, Scenario, ScenarioOptions, Verdict,
};
pub use closure::{gate_closure_seeds, identify_group, lie_closure, ClosureOptions, ClosureResult, GroupId};
pub use error::{Error, Result};
pub use invariants::{
    annihilation_residual, eigenvector_residual, invariant_vector, psi_b, psi_f, psi_flo, FormType, InvariantVector,
};
pub use linalg::{kron, matexp, CMatrix, HermitianBasis, C64};
pub use reps::{automorphism_type, group_gate, lie_basis, normalizes, AutomorphismType, Family, LieAlgebraBasis};
pub use secondq::{build_matrix, build_operator, FactorToken, HamiltonianSpec, Term};
pub use sectors::{enumerate_basis, sector_dim, BasisState, Operator, SectorBasis, SectorDescriptor, SectorKind};
