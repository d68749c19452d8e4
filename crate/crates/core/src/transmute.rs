//! Half-line operators `T_c`, `T_s` and the solutions they produce from
//! `cos ωx`, `sin ωx / ω` and `e^{iωx}`.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TransmutantError};
use crate::grid::{Grid, Samples};
use crate::kernel::{reparametrize_h, TransmutationKernel};
use crate::quadrature;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLineKind {
    Cosine,
    Sine,
}

/// `K_c(x,t;h)` or `K_s(x,t;∞)` on the grid square.
///
/// The operators only read `t` between `0` and `x`; whole rows are kept so
/// the one-cell rows next to the origin can use a cubic rule.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineKernel {
    grid: Grid,
    kind: HalfLineKind,
    values: Array2<C>,
    h: Option<C>,
}

impl HalfLineKernel {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> HalfLineKind {
        self.kind
    }

    pub fn values(&self) -> &Array2<C> {
        &self.values
    }

    /// The `h` of the cosine kernel; `None` for the sine kernel.
    pub fn h(&self) -> Option<C> {
        self.h
    }

    pub fn max_diff(&self, other: &HalfLineKernel) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `u(x) + ∫₀ˣ K(x,t) u(t) dt`.
    pub fn apply(&self, u: &Samples) -> Result<Samples> {
        self.grid.check_same(u.grid(), "half-line apply")?;
        let uv = u.values();
        Ok(self.integrate(|j| uv[j], Some(uv)))
    }

    /// `g(x) + ∫₀ˣ K(x,t) w(t) dt` with `w = weight(t)`, `g` the same weight.
    fn integrate(&self, weight: impl Fn(usize) -> C + Sync, base: Option<&[C]>) -> Samples {
        let grid = self.grid;
        let c = grid.center();
        let step = grid.spacing();
        let out: Vec<C> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let start = base.map_or_else(|| weight(i), |b| b[i]);
                if i == c {
                    return start;
                }
                let f = |j: usize| self.values[[i, j]] * weight(j);
                if i.abs_diff(c) == 1 && grid.len() >= 5 {
                    let (a, b) = if i > c {
                        (c - 1, c + 2)
                    } else {
                        (c - 2, c + 1)
                    };
                    let s: Vec<C> = (a..=b).map(f).collect();
                    let cell = (s[1] * 13.0 + s[2] * 13.0 - s[0] - s[3]) * (step / 24.0);
                    return start + if i > c { cell } else { -cell };
                }
                let (lo, hi) = if i > c { (c, i) } else { (i, c) };
                let integrand: Vec<C> = (lo..=hi).map(f).collect();
                let integral = quadrature::simpson(&integrand, step);
                start + if i > c { integral } else { -integral }
            })
            .collect();
        Samples::from_vec_unchecked(grid, out)
    }
}

/// Builds `K_c = h + K + K(x,-t) + h∫_t^x (K(x,ξ) - K(x,-ξ)) dξ` (base `K` at `h = 0`)
/// and `K_s = K(x,t) - K(x,-t)`.
///
/// Both follow from the even and odd parts in `t` of `K(x,t;h)` for any `h`,
/// so no reparametrization is needed.
pub fn half_line_kernels(kernel: &TransmutationKernel) -> (HalfLineKernel, HalfLineKernel) {
    let grid = *kernel.grid();
    let n = grid.len();
    let k = kernel.values();
    let mut cos = Array2::zeros((n, n));
    let mut sin = Array2::zeros((n, n));
    cos.axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(sin.axis_iter_mut(Axis(0)).into_par_iter())
        .enumerate()
        .for_each(|(i, (mut kc, mut ks))| {
            for j in 0..n {
                let m = grid.mirror(j);
                kc[j] = k[[i, j]] + k[[i, m]];
                ks[j] = k[[i, j]] - k[[i, m]];
            }
        });
    (
        HalfLineKernel {
            grid,
            kind: HalfLineKind::Cosine,
            values: cos,
            h: Some(kernel.h()),
        },
        HalfLineKernel {
            grid,
            kind: HalfLineKind::Sine,
            values: sin,
            h: None,
        },
    )
}

/// `P_e u(x) = (u(x) + u(-x)) / 2`.
pub fn even_part(u: &Samples) -> Samples {
    u.zip_map(&u.reflect(), |a, b| (a + b) * 0.5)
}

/// `P_o u(x) = (u(x) - u(-x)) / 2`.
pub fn odd_part(u: &Samples) -> Samples {
    u.zip_map(&u.reflect(), |a, b| (a - b) * 0.5)
}

/// `sin(ωt)/ω`, continuous through `ω = 0`.
fn sin_over(omega: C, t: f64) -> C {
    let z = omega * t;
    if z.norm() < 1e-3 {
        let z2 = z * z;
        // t(1 - z²/6 + z⁴/120 - z⁶/5040)
        (C::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0) * t
    } else {
        (z).sin() / omega
    }
}

/// `c(ω,x;h) = cos ωx + ∫₀ˣ K_c(x,t;h) cos ωt dt`: `c(0) = 1`, `c'(0) = h`.
pub fn solution_c(kernel: &TransmutationKernel, omega: C) -> Samples {
    let (kc, _) = half_line_kernels(kernel);
    let nodes = kernel.grid().nodes();
    kc.integrate(|j| (omega * nodes[j]).cos(), None)
}

/// `s(ω,x;∞) = sin ωx/ω + ∫₀ˣ K_s(x,t) sin ωt/ω dt`: `s(0) = 0`, `s'(0) = 1`.
pub fn solution_s(kernel: &TransmutationKernel, omega: C) -> Samples {
    let (_, ks) = half_line_kernels(kernel);
    let nodes = kernel.grid().nodes();
    ks.integrate(|j| sin_over(omega, nodes[j]), None)
}

/// `e₀(iω,x) = T₀[e^{iωx}]` with `e₀(0) = 1`, `e₀'(0) = iω`.
///
/// A kernel at `h ≠ 0` is first moved to `h = 0`.
pub fn solution_e0(kernel: &TransmutationKernel, omega: C) -> Samples {
    let moved;
    let base = if kernel.h().norm() == 0.0 {
        kernel
    } else {
        moved = reparametrize_h(kernel, C::new(0.0, 0.0));
        &moved
    };
    let u = Samples::from_fn(*kernel.grid(), |x| (C::i() * omega * x).exp());
    base.apply(&u).expect("samples built on the kernel grid")
}

/// `T_h u`.
pub fn apply_t(kernel: &TransmutationKernel, u: &Samples) -> Result<Samples> {
    kernel.apply(u)
}

/// `T_h⁻¹ v`.
pub fn apply_t_inverse(kernel: &TransmutationKernel, v: &Samples) -> Result<Samples> {
    kernel.apply_inverse(v)
}

/// Interior max of `|(-D² + q) T u - T[-u'']|` `D²` by the fourth-order five-point stencil.
pub fn transmutation_identity_residual(
    kernel: &TransmutationKernel,
    q: &Samples,
    u: &Samples,
    u_second: &Samples,
) -> Result<f64> {
    kernel
        .grid()
        .check_same(q.grid(), "transmutation identity")?;
    let n = kernel.grid().len();
    if n < 5 {
        return Err(TransmutantError::invalid(
            "transmutation identity needs at least 5 nodes",
        ));
    }
    let tu = kernel.apply(u)?;
    let rhs = kernel.apply(&u_second.map(|v| -v))?;
    let inv = 1.0 / (12.0 * kernel.grid().spacing().powi(2));
    let v = tu.values();
    Ok((2..n - 2)
        .map(|i| {
            let d2 = quadrature::second_difference4(|d| v[i + 2 - d]) * inv;
            (-d2 + q.at(i) * v[i] - rhs.at(i)).norm()
        })
        .fold(0.0, f64::max))
}

/// Fourth-order central difference at `x = 0`.
pub fn derivative_at_origin(u: &Samples) -> C {
    let c = u.grid().center();
    let step = u.grid().spacing();
    let v = u.values();
    (v[c - 2] - v[c - 1] * 8.0 + v[c + 1] * 8.0 - v[c + 2]) / (12.0 * step)
}
