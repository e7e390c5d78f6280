//! Finite-volume assembly: fluxes, interface coupling and inner-iteration systems.

mod interface;
mod system;
mod tpfa;

pub use interface::{
    init_interface, interface_trace, update_g, InterfaceFormulation, InterfaceState, RobinCoupling,
};
pub use system::{
    apply_bc, assemble_ldd, assemble_monolithic, step_residual, MonolithicKind, Ordering,
    StepContext, SubdomainSystem, Unknown,
};
pub use tpfa::{
    face_transmissibility, flux_field, half_transmissibility, harmonic, FaceDirection, FluxField,
};
