//! Periodic grids, discrete Fourier transforms and Fourier-multiplier
//! operators.

pub mod cutoff;
pub mod fft;
mod field;
pub mod flux;
mod grid;
pub mod ops;
mod trajectory;

pub use cutoff::{eta, modulation_levels, phi, phi_n, psi_l, DyadicBand};
pub use field::{check_resolved, PhysicalField, SpectralField};
pub use flux::{nonlinear_flux, Dealias, FluxEvaluator};
pub use grid::Grid;
pub use ops::{
    airy_propagate, bessel_potential, dealiased_product, dissipative_propagate, inverse_transform, lp_project,
    lp_project_below, pairing, pseudoproduct, riesz_potential, spatial_derivative, transform,
};
pub use trajectory::Trajectory;
