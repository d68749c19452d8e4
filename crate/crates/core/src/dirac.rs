//! One-dimensional Dirac system with a Lorentz scalar potential,
//!
//! ```text
//! ( ∂ + η) ψ₁ = E ψ₂
//! (-∂ + η) ψ₂ = E ψ₁,   η = m + S(x)
//! ```
//!
//! transmuted from the free system `u₁' = E u₂`, `u₂' = -E u₁` by the pair
//! `diag(T₁, T₂)` of the factorized Schrödinger operators.

use num_complex::Complex64;

use crate::darboux::{darboux_kernel, darboux_transform, DarbouxPair};
use crate::error::{Result, TransmutantError};
use crate::goursat::{solve_kernel, GoursatOptions};
use crate::grid::{cumulative_from, first_derivative, Grid, Samples};
use crate::kernel::TransmutationKernel;
use crate::powers::Potential;

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DiracConfig {
    grid: Grid,
    mass: f64,
    scalar: Samples,
    eta: Samples,
    energies: Vec<C>,
}

impl DiracConfig {
    pub fn new(mass: f64, scalar: Samples, energies: Vec<C>) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(TransmutantError::invalid(format!(
                "mass must be positive, got {mass}"
            )));
        }
        let eta = scalar.map(|s| s + mass);
        Ok(Self {
            grid: *scalar.grid(),
            mass,
            scalar,
            eta,
            energies,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn scalar(&self) -> &Samples {
        &self.scalar
    }

    pub fn eta(&self) -> &Samples {
        &self.eta
    }

    pub fn energies(&self) -> &[C] {
        &self.energies
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    pub psi1: Samples,
    pub psi2: Samples,
}

impl Spinor {
    pub fn new(psi1: Samples, psi2: Samples) -> Result<Self> {
        psi1.grid().check_same(psi2.grid(), "spinor")?;
        Ok(Self { psi1, psi2 })
    }

    pub fn grid(&self) -> &Grid {
        self.psi1.grid()
    }

    pub fn max_diff(&self, other: &Spinor) -> f64 {
        self.psi1
            .max_diff(&other.psi1)
            .max(self.psi2.max_diff(&other.psi2))
    }
}

/// `f = exp(-∫₀ˣ η)`, `f' = -η f`, `q₁ = η² - η'`, `h = -η(0)`.
pub fn dirac_profile(cfg: &DiracConfig) -> Result<Potential> {
    let eta = &cfg.eta;
    let c = cfg.grid.center();
    let f = cumulative_from(eta, c).map(|v| (-v).exp());
    let f_prime = eta.zip_map(&f, |e, v| -e * v);
    let s0 = cfg.scalar.at(0);
    let constant = cfg.scalar.values().iter().all(|&s| s == s0);
    let q1 = if constant {
        eta.map(|e| e * e)
    } else {
        eta.zip_map(&first_derivative(eta), |e, d| e * e - d)
    };
    Potential::from_parts(&q1, &f, &f_prime)
}

/// `u₁ = c₁ cos Ex + c₂ sin Ex`, `u₂ = -c₁ sin Ex + c₂ cos Ex`.
pub fn free_dirac_solution(energy: C, c1: C, c2: C, grid: Grid) -> Spinor {
    let u1 = Samples::from_fn(grid, |x| c1 * (energy * x).cos() + c2 * (energy * x).sin());
    let u2 = Samples::from_fn(grid, |x| -c1 * (energy * x).sin() + c2 * (energy * x).cos());
    Spinor { psi1: u1, psi2: u2 }
}

/// `T₁` (Goursat kernel of `q₁` at `h = -η(0)`) and `T₂` (its Darboux kernel at `-h`).
#[derive(Debug, Clone)]
pub struct DiracTransmutation {
    pub pair: DarbouxPair,
    pub k1: TransmutationKernel,
    pub k2: TransmutationKernel,
}

pub fn dirac_kernels(cfg: &DiracConfig, options: &GoursatOptions) -> Result<DiracTransmutation> {
    let potential = dirac_profile(cfg)?;
    let pair = darboux_transform(&potential)?;
    let k1 = solve_kernel(potential.q(), potential.h(), options)?;
    let k2 = darboux_kernel(&k1, &pair)?;
    Ok(DiracTransmutation { pair, k1, k2 })
}

pub fn dirac_transmute(
    k1: &TransmutationKernel,
    k2: &TransmutationKernel,
    u: &Spinor,
) -> Result<Spinor> {
    k1.grid().check_same(k2.grid(), "dirac kernels")?;
    Spinor::new(k1.apply(&u.psi1)?, k2.apply(&u.psi2)?)
}

pub fn dirac_untransmute(
    k1: &TransmutationKernel,
    k2: &TransmutationKernel,
    psi: &Spinor,
) -> Result<Spinor> {
    k1.grid().check_same(k2.grid(), "dirac kernels")?;
    Spinor::new(k1.apply_inverse(&psi.psi1)?, k2.apply_inverse(&psi.psi2)?)
}

/// Interior max of `|ψ₁' + ηψ₁ - Eψ₂|` and `|-ψ₂' + ηψ₂ - Eψ₁|`.
pub fn dirac_residual(cfg: &DiracConfig, psi: &Spinor, energy: C) -> f64 {
    let d1 = first_derivative(&psi.psi1);
    let d2 = first_derivative(&psi.psi2);
    let n = cfg.grid.len();
    let eta = cfg.eta.values();
    let margin = 2.min(n / 2);
    (margin..n - margin)
        .map(|i| {
            let r1 = d1.at(i) + eta[i] * psi.psi1.at(i) - energy * psi.psi2.at(i);
            let r2 = -d2.at(i) + eta[i] * psi.psi2.at(i) - energy * psi.psi1.at(i);
            r1.norm().max(r2.norm())
        })
        .fold(0.0, f64::max)
}
