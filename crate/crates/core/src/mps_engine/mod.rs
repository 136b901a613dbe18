//! Matrix-product states for the atom plus chain: construction, MPOs,
//! contractions, two-site DMRG and Trotterized time evolution.
//!
//! Site 0 is the two-level atom (basis `|g⟩ = 0`, `|e⟩ = 1`), sites
//! `1..=m` are the chain modes in Lanczos order with occupation basis
//! `|0⟩..|n_b - 1⟩`.

mod apply;
mod dmrg;
mod env;
mod expectation;
mod hamiltonian;
mod layout;
mod mpo;
mod mps;
mod tebd;

pub use apply::{apply_mpo, AppliedMpo};
pub use dmrg::{dmrg_minimize, DmrgOptions, DmrgResult};
pub use expectation::{expectation, local_expectation, local_profile, sandwich, two_point};
pub use hamiltonian::{
    bond_hamiltonians, chain_creation_mpo, excitation_number_mpo, field_terms, hamiltonian_mpos,
    hamiltonian_terms, mode_creation_mpo, number_mpo, total_number_mpo, HamiltonianSet, HamiltonianTerms,
    Variant,
};
pub use layout::{
    annihilation, creation, excited_projector, identity, number, sigma_minus, sigma_plus, sigma_x, sigma_z,
    SiteLayout, EXCITED, GROUND,
};
pub use mpo::{identity_mpo, MpoOperator, MpoSite, MpoTag, OperatorSum, Term};
pub use mps::{
    overlap, product_state, product_state_from_vectors, random_state, MpsState, Sweep, TruncationPolicy,
};
pub use tebd::{tebd_evolve, tebd_run, EvolutionConfig, Observer, TebdRun, TrotterPropagator};
