//! Transmutation operators for one-dimensional Schrödinger and Dirac operators.
//!
//! Kernels are computed from the Goursat problem, moved between values of
//! the parameter `h`, carried through Darboux transformations and applied
//! to sampled functions on a symmetric grid `[-a, a]`.

pub mod closed_forms;
pub mod darboux;
pub mod dirac;
pub mod error;
pub mod goursat;
pub mod grid;
pub mod kernel;
pub mod powers;
pub mod quadrature;
pub mod transmute;

pub use num_complex::Complex64;

pub use closed_forms::{reference_kernel, ReferenceKernel, REFERENCE_KERNELS};
pub use darboux::{
    apply_t1_from_t2, apply_t2_direct, commutation_residuals, darboux_kernel,
    darboux_kernel_triangle, darboux_ladder, darboux_transform, generalized_derivative,
    DarbouxPair, LadderRung,
};
pub use dirac::{
    dirac_kernels, dirac_profile, dirac_residual, dirac_transmute, dirac_untransmute,
    free_dirac_solution, DiracConfig, DiracTransmutation, Spinor,
};
pub use error::{Result, TransmutantError};
pub use goursat::{
    kernel_from_field, partial_t_kernel, solve_goursat, solve_kernel, DiamondField, GoursatOptions,
};
pub use grid::{
    cumulative_integral, first_derivative, interpolate, make_grid, second_derivative, Grid, Samples,
};
pub use kernel::{
    goursat_residual, odd_part_difference, reparametrize_h, DerivativeSource, Provenance,
    TransmutationKernel,
};
pub use powers::{
    base_kernel_image, build_potential, build_table, monomial, spps_solution, verify_power_mapping,
    verify_psi_mapping, FormalPowerTable, Potential,
};
pub use transmute::{
    apply_t, apply_t_inverse, derivative_at_origin, even_part, half_line_kernels, odd_part,
    solution_c, solution_e0, solution_s, transmutation_identity_residual, HalfLineKernel,
    HalfLineKind,
};
