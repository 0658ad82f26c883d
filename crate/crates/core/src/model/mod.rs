//! Physical model of a circular foil interacting with a point source.

pub mod dynamics;
pub mod force;
pub mod hamiltonian;
pub mod lagrangian;
mod params;
pub mod potential;
pub mod reduced;
mod source;
mod state;

pub use params::FoilParams;
pub use source::{CustomIntensity, Intensity, SourceSpec};
pub use state::{wrap_angle, FullState, Integrals, MomentumChart, ReducedChart, ReducedState};

pub use dynamics::{full_rhs, FullSystem};
pub use force::{sedov_force, sedov_force_quadrature};
pub use hamiltonian::{angular_momentum_k, hamiltonian, hamiltonian_rhs, CanonicalSystem};
pub use lagrangian::{lagrangian_forms_check, KinematicSample, LagrangianResidual};
pub use potential::{complex_potential, flow_velocity};
pub use reduced::{
    from_reduced, impact_parameter, momentum_on_energy_level, reduced_hamiltonian, reduced_rhs,
    to_reduced, Branch, ReducedSystem,
};
