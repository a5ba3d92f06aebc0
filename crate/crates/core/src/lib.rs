//! Optional public goods game with cooperators, defectors and loners.
//!
//! * [`game`]: 2x2 matrix games, mixed strategies and the `a > b > c`
//!   mixed equilibrium.
//! * [`payoffs`]: sample-level and expected payoffs of the optional game.
//! * [`dynamics`]: replicator, replicator-mutator and network-scaled flows
//!   with a fixed-step RK4 integrator.
//! * [`network`]: Erdős–Rényi graphs and social-tie density.
//! * [`agent`]: finite-population imitation/exploration simulator.
//! * [`analysis`]: time averages, oscillation and fixation diagnostics.
//! * [`io`]: configuration, CSV/SVG output and the command layer.

pub mod agent;
pub mod analysis;
pub mod dynamics;
pub mod game;
pub mod io;
pub mod network;
pub mod payoffs;
pub mod rng;

pub use agent::{
    combinations, fermi_probability, gillespie_select, pairwise_switch_rate, play_round, run_abm,
    step_generation, update_event, AbmTrajectory, EventOutcome, LearningParams, Population,
    Strategy,
};
pub use analysis::{stats, trajectory_distance, TrajectoryStats};
pub use dynamics::{
    integrate, mutator_rhs, network_scaled_rhs, replicator_rhs, DynamicsMode, IntegrateOptions,
    Trajectory,
};
pub use network::{degree_sum, density_factor, generate_er, is_connected, Graph, GraphParams};
pub use payoffs::{
    closed_form_average, expected_defector_payoff, expected_profile, sample_payoffs, PayoffProfile,
    PggParams, SampleComposition, SimplexState,
};
