//! Independent oracles: exact diagonalization of small truncated systems,
//! the single-excitation propagator and the dark-state closed forms.

mod bell;
mod dark_state;
mod ed;
mod single_excitation;

pub use bell::{bell_state_emission, BellEmission, BellState, BraidedPair};
pub use dark_state::{
    bound_population, dark_state_amplitude, dark_state_conditions, dark_state_solutions, DarkStateParams,
    DarkStateSolution, Parity,
};
pub use ed::{
    ed_operator, ed_oracle, EdHamiltonian, EdOperator, EdOutput, EdTask, ED_DENSE_LIMIT, ED_DIMENSION_CAP,
};
pub use single_excitation::{
    single_excitation_evolve, single_excitation_states, PointEmitter, SingleExcitationSetup, WaveguideBand,
    SE_DENSE_LIMIT,
};
