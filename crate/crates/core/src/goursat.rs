//! Successive approximation for the Goursat integral equation
//!
//! ```text
//! H(u,v;h) = h/2 + ½∫₀ᵘ q(s) ds + ∫₀ᵘ dα ∫₀ᵛ q(α+β) H(α,β;h) dβ
//! ```
//!
//! on the characteristic diamond `|u| + |v| <= a`, all four triangles at once
//! (signed integration limits), followed by the change of variables
//! `K(x,t;h) = H((x+t)/2, (x-t)/2; h)` onto the full square.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TransmutantError};
use crate::grid::{interpolate, Grid, Samples};
use crate::kernel::{DerivativeSource, Provenance, TransmutationKernel};
use crate::quadrature;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoursatOptions {
    /// Nodes per characteristic axis; defaults to the potential's grid size.
    /// `m_points - 1` must be a multiple of `n_points - 1`.
    pub m_points: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GoursatOptions {
    fn default() -> Self {
        Self {
            m_points: None,
            tol: 1e-12,
            max_iter: 60,
        }
    }
}

/// Converged samples of `H(u_i, v_j; h)` on the characteristic diamond.
#[derive(Debug, Clone)]
pub struct DiamondField {
    grid: Grid,
    m_points: usize,
    step: f64,
    /// Zero outside the diamond.
    values: Array2<C>,
    /// `q` at the characteristic nodes `-a + k·step`.
    q_char: Vec<C>,
    h: C,
    iterations_used: usize,
    residual: f64,
    history: Vec<f64>,
    converged: bool,
}

impl DiamondField {
    pub fn half_width(&self) -> f64 {
        self.grid.half_width()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn m_points(&self) -> usize {
        self.m_points
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn h(&self) -> C {
        self.h
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Max-norm of the last successive-approximation update.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Update norm recorded at every sweep.
    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn is_converged(&self) -> bool {
        self.converged
    }

    pub fn values(&self) -> &Array2<C> {
        &self.values
    }

    /// Characteristic coordinate of node `i`.
    pub fn coordinate(&self, i: usize) -> f64 {
        let cm = (self.m_points - 1) / 2;
        if i == 0 {
            -self.grid.half_width()
        } else if i == self.m_points - 1 {
            self.grid.half_width()
        } else {
            (i as f64 - cm as f64) * self.step
        }
    }

    pub fn in_diamond(&self, i: usize, j: usize) -> bool {
        let cm = (self.m_points - 1) / 2;
        i.abs_diff(cm) + j.abs_diff(cm) <= cm
    }

    /// `∂_t K = (H_u - H_v)/2` on the diamond, with
    /// `H_u = q(u)/2 + ∫₀ᵛ q(u+β)H(u,β)dβ` and `H_v = ∫₀ᵘ q(α+v)H(α,v)dα`.
    fn kt_on_diamond(&self) -> Array2<C> {
        let cm = (self.m_points - 1) / 2;
        let weighted = weight_by_potential(&self.values, &self.q_char, cm);
        let along_v = cumulate_rows(&weighted, cm, self.step);
        let along_u = cumulate_columns(&weighted, cm, self.step);
        let mut out = Array2::zeros(self.values.dim());
        out.indexed_iter_mut().for_each(|((i, j), v)| {
            if i.abs_diff(cm) + j.abs_diff(cm) <= cm {
                let h_u = self.q_char[i] * 0.5 + along_v[[i, j]];
                *v = (h_u - along_u[[i, j]]) * 0.5;
            }
        });
        out
    }
}

/// Row `i` of the diamond spans columns `lo..=hi`.
fn row_span(i: usize, cm: usize) -> (usize, usize) {
    let lo = i.abs_diff(cm);
    (lo, 2 * cm - lo)
}

fn weight_by_potential(values: &Array2<C>, q_char: &[C], cm: usize) -> Array2<C> {
    let mut out = Array2::zeros(values.dim());
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let (lo, hi) = row_span(i, cm);
            for j in lo..=hi {
                row[j] = q_char[i + j - cm] * values[[i, j]];
            }
        });
    out
}

/// `∫₀^{v_j} g(u_i, β) dβ` for every diamond node.
fn cumulate_rows(g: &Array2<C>, cm: usize, step: f64) -> Array2<C> {
    let mut out = Array2::zeros(g.dim());
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let (lo, hi) = row_span(i, cm);
            let segment: Vec<C> = (lo..=hi).map(|j| g[[i, j]]).collect();
            let acc = quadrature::cumulative(&segment, step, cm - lo);
            for (k, v) in acc.into_iter().enumerate() {
                row[lo + k] = v;
            }
        });
    out
}

/// `∫₀^{u_i} g(α, v_j) dα` for every diamond node.
fn cumulate_columns(g: &Array2<C>, cm: usize, step: f64) -> Array2<C> {
    let transposed = g.t().as_standard_layout().into_owned();
    cumulate_rows(&transposed, cm, step)
        .t()
        .as_standard_layout()
        .into_owned()
}

/// Solves the Goursat integral equation for `H(u, v; h)` by successive approximation.
pub fn solve_goursat(q: &Samples, h: C, options: &GoursatOptions) -> Result<DiamondField> {
    let grid = *q.grid();
    let n = grid.len();
    let m = options.m_points.unwrap_or(n);
    if m.is_multiple_of(2) || m < 5 {
        return Err(TransmutantError::invalid(format!(
            "characteristic node count must be odd and >= 5, got {m}"
        )));
    }
    if !(m - 1).is_multiple_of(n - 1) {
        return Err(TransmutantError::invalid(format!(
            "characteristic node count {m} is not a refinement of the {n}-node grid"
        )));
    }
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(TransmutantError::invalid("tolerance must be positive"));
    }
    let cm = (m - 1) / 2;
    let a = grid.half_width();
    let step = a / cm as f64;

    let q_char: Vec<C> = (0..m)
        .map(|k| {
            let s = match k {
                0 => -a,
                _ if k == m - 1 => a,
                _ => (k as f64 - cm as f64) * step,
            };
            interpolate(q, s)
        })
        .collect::<Result<_>>()?;
    let q_primitive = quadrature::cumulative(&q_char, step, cm);

    let mut base = Array2::zeros((m, m));
    for i in 0..m {
        let (lo, hi) = row_span(i, cm);
        let value = h * 0.5 + q_primitive[i] * 0.5;
        for j in lo..=hi {
            base[[i, j]] = value;
        }
    }

    let mut current = base.clone();
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..options.max_iter {
        let weighted = weight_by_potential(&current, &q_char, cm);
        let mut next = cumulate_columns(&cumulate_rows(&weighted, cm, step), cm, step);
        next += &base;
        let update = next
            .iter()
            .zip(current.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        current = next;
        history.push(update);
        if update < options.tol {
            converged = true;
            break;
        }
    }
    let residual = history.last().copied().unwrap_or(0.0);
    if !converged {
        return Err(TransmutantError::ConvergenceFailure {
            iterations: history.len(),
            residual,
        });
    }
    Ok(DiamondField {
        grid,
        m_points: m,
        step,
        values: current,
        q_char,
        h,
        iterations_used: history.len(),
        residual,
        history,
        converged,
    })
}

/// Maps diamond samples onto the square `(x_i, t_j)`.
///
/// With an odd refinement ratio only node pairs with `i + j` even land on
/// diamond nodes; the rest are filled by cubic interpolation along `t`.
fn diamond_to_square(field: &Array2<C>, grid: &Grid, m: usize) -> Array2<C> {
    let n = grid.len();
    let ratio = (m - 1) / (n - 1);
    let cm = ((m - 1) / 2) as isize;
    let mut out = Array2::zeros((n, n));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let on_node = |j: usize| ratio.is_multiple_of(2) || (i + j).is_multiple_of(2);
            let lookup = |j: usize| {
                let u = ((i + j) * ratio / 2) as isize;
                let v = cm + (i as isize - j as isize) * ratio as isize / 2;
                field[[u as usize, v as usize]]
            };
            let known: Vec<usize> = (0..n).filter(|&j| on_node(j)).collect();
            for &j in &known {
                row[j] = lookup(j);
            }
            if known.len() == n {
                return;
            }
            for j in (0..n).filter(|&j| !on_node(j)) {
                let p = known.partition_point(|&k| k < j);
                let width = known.len().min(4);
                let start = p.saturating_sub(2).min(known.len() - width);
                let stencil = &known[start..start + width];
                let xs: Vec<f64> = stencil.iter().map(|&k| k as f64).collect();
                let ys: Vec<C> = stencil.iter().map(|&k| row[k]).collect();
                row[j] = quadrature::lagrange(&xs, &ys, j as f64);
            }
        });
    out
}

/// `∂_t K` on the square, by quadrature of the differentiated integral equation.
pub fn partial_t_kernel(field: &DiamondField) -> Result<Array2<C>> {
    if !field.converged {
        return Err(TransmutantError::InvalidState(
            "Goursat field has not converged".into(),
        ));
    }
    Ok(diamond_to_square(
        &field.kt_on_diamond(),
        &field.grid,
        field.m_points,
    ))
}

/// `K(x,t;h) = H((x+t)/2, (x-t)/2; h)` on the full square, with `∂_t K` filled.
pub fn kernel_from_field(field: &DiamondField) -> Result<TransmutationKernel> {
    if !field.converged {
        return Err(TransmutantError::InvalidState(
            "Goursat field has not converged".into(),
        ));
    }
    let values = diamond_to_square(&field.values, &field.grid, field.m_points);
    let kt = partial_t_kernel(field)?;
    TransmutationKernel::from_parts(
        field.grid,
        field.h,
        values,
        Some(kt),
        DerivativeSource::Quadrature,
        Provenance::Goursat,
    )
}

/// Convenience: solve and map in one call.
pub fn solve_kernel(q: &Samples, h: C, options: &GoursatOptions) -> Result<TransmutationKernel> {
    kernel_from_field(&solve_goursat(q, h, options)?)
}
