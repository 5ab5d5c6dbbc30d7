//! Solitary traveling waves of the fourth-order beam equation and of the
//! fourth-order NLS standing-wave problem: profile computation, branch
//! continuation, spectral stability, direct simulation and tail analysis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod continuation;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod nonlinearity;
pub mod params;
pub mod profile;
pub mod stability;

pub use error::{Error, Result};
pub use grid::{make_grid, PeriodicGrid, RealField};
pub use nonlinearity::Nonlinearity;
pub use params::{BeamParameters, Family, NlsParameters, WaveParameters};
pub use profile::{
    homotopy_solve, newton_cg_solve, seed_profile, solve_wave, HomotopyPlan, NewtonOptions, ProfileEquation,
    TravelingWave,
};
