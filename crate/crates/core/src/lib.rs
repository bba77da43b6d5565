//! Simulation of spin-chain quantum batteries under local and correlated
//! GKSL noise: dephasing and zero-temperature amplitude damping.
//!
//! Basis convention: site 0 is the leftmost tensor factor and bit 0 of a
//! site means spin up (`sigma^z = +1`). Units have `hbar = 1`.

pub mod dissipation;
pub mod error;
pub mod evolver;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod oracles;
pub mod spin;
pub mod state;

pub use dissipation::{build_gamma, validate_cptp, Channel, CptpReport, GammaMatrix, NoiseSpec, Topology};
pub use error::{Error, Result};
pub use evolver::{evolve, evolve_with, EvolutionConfig, Integrator};
pub use observables::{coherence_l1_energy_basis, ergotropy, extraction_ratio, EnergyBasis, Ergotropy, ErgotropyReport};
pub use model::{BatteryModel, CouplingRange, EffectiveCoupling};
pub use spin::{OperatorMatrix, Pauli};
pub use state::DensityMatrix;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
