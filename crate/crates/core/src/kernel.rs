//! Sampled transmutation kernels `K(x, t; h)` on the full square `[-a, a]²`.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TransmutantError};
use crate::grid::{cumulative_from, Grid, Samples};
use crate::quadrature;

type C = Complex64;

/// Where a kernel came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Goursat,
    ClosedForm,
    Darboux,
    /// Darboux kernel built from triangle data only; rows with `x <= 0` are not populated.
    DarbouxTriangle,
    Reparametrized,
    Imported,
    Perturbed,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Goursat => "goursat",
            Provenance::ClosedForm => "closed-form",
            Provenance::Darboux => "darboux",
            Provenance::DarbouxTriangle => "darboux-triangle",
            Provenance::Reparametrized => "reparametrized",
            Provenance::Imported => "imported",
            Provenance::Perturbed => "perturbed",
        }
    }
}

/// How the `∂_t K` samples were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeSource {
    Quadrature,
    Analytic,
    FiniteDifference,
    Imported,
    Missing,
}

impl DerivativeSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            DerivativeSource::Quadrature => "quadrature",
            DerivativeSource::Analytic => "analytic",
            DerivativeSource::FiniteDifference => "finite-difference",
            DerivativeSource::Imported => "imported",
            DerivativeSource::Missing => "missing",
        }
    }
}

/// `K(x_i, t_j; h)` and `∂_t K` on every node pair of a grid. Row index is `x`, column is `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmutationKernel {
    grid: Grid,
    h: C,
    values: Array2<C>,
    kt: Option<Array2<C>>,
    kt_source: DerivativeSource,
    provenance: Provenance,
}

impl TransmutationKernel {
    pub fn from_parts(
        grid: Grid,
        h: C,
        values: Array2<C>,
        kt: Option<Array2<C>>,
        kt_source: DerivativeSource,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = grid.len();
        let check = |a: &Array2<C>, what: &str| -> Result<()> {
            if a.dim() != (n, n) {
                return Err(TransmutantError::invalid(format!(
                    "{what} has shape {:?}, expected ({n}, {n})",
                    a.dim()
                )));
            }
            if a.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(TransmutantError::invalid(format!(
                    "{what} has non-finite entries"
                )));
            }
            Ok(())
        };
        check(&values, "kernel")?;
        if let Some(kt) = &kt {
            check(kt, "kernel t-derivative")?;
        }
        let kt_source = if kt.is_none() {
            DerivativeSource::Missing
        } else {
            kt_source
        };
        Ok(Self {
            grid,
            h,
            values,
            kt,
            kt_source,
            provenance,
        })
    }

    /// Samples a kernel given as a function of `(x, t)`, with an optional analytic `∂_t K`.
    pub fn from_fn(
        grid: Grid,
        h: C,
        kernel: impl Fn(f64, f64) -> C + Sync,
        kt: Option<&(dyn Fn(f64, f64) -> C + Sync)>,
        provenance: Provenance,
    ) -> Self {
        let nodes = grid.nodes();
        let sample = |f: &(dyn Fn(f64, f64) -> C + Sync)| {
            let n = nodes.len();
            let mut out = Array2::zeros((n, n));
            out.axis_iter_mut(Axis(0))
                .into_par_iter()
                .enumerate()
                .for_each(|(i, mut row)| {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = f(nodes[i], nodes[j]);
                    }
                });
            out
        };
        let values = sample(&kernel);
        let (kt, source) = match kt {
            Some(f) => (Some(sample(f)), DerivativeSource::Analytic),
            None => (
                Some(t_derivative(&values, grid.spacing())),
                DerivativeSource::FiniteDifference,
            ),
        };
        Self {
            grid,
            h,
            values,
            kt,
            kt_source: source,
            provenance,
        }
    }

    /// Kernel identically zero at `h = 0` (the identity transmutation for `q ≡ 0`).
    pub fn zero(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            h: C::new(0.0, 0.0),
            values: Array2::zeros((n, n)),
            kt: Some(Array2::zeros((n, n))),
            kt_source: DerivativeSource::Analytic,
            provenance: Provenance::ClosedForm,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn h(&self) -> C {
        self.h
    }

    pub fn values(&self) -> &Array2<C> {
        &self.values
    }

    pub fn kt(&self) -> Option<&Array2<C>> {
        self.kt.as_ref()
    }

    pub fn kt_source(&self) -> DerivativeSource {
        self.kt_source
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `K(x_i, t_j)`.
    pub fn at(&self, i: usize, j: usize) -> C {
        self.values[[i, j]]
    }

    /// Value at a node pair given by coordinates.
    pub fn at_point(&self, x: f64, t: f64) -> Result<C> {
        let idx = |v: f64| {
            self.grid
                .node_index(v)
                .ok_or_else(|| TransmutantError::invalid(format!("{v} is not a grid node")))
        };
        Ok(self.values[[idx(x)?, idx(t)?]])
    }

    /// Max-norm distance to another kernel on the same grid.
    pub fn max_diff(&self, other: &TransmutationKernel) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }

    /// Max-norm distance to an analytic kernel over the whole square.
    pub fn max_error_against(&self, exact: impl Fn(f64, f64) -> C) -> f64 {
        let nodes = self.grid.nodes();
        self.values
            .indexed_iter()
            .map(|((i, j), v)| (v - exact(nodes[i], nodes[j])).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm distance of `∂_t K` to an analytic derivative; infinite when `∂_t K` is missing.
    pub fn max_kt_error_against(&self, exact: impl Fn(f64, f64) -> C) -> f64 {
        let Some(kt) = &self.kt else {
            return f64::INFINITY;
        };
        let nodes = self.grid.nodes();
        kt.indexed_iter()
            .map(|((i, j), v)| (v - exact(nodes[i], nodes[j])).norm())
            .fold(0.0, f64::max)
    }

    /// Max over nodes of `|K(x,-x) - h/2|` and of `|K(x,x) - h/2 - ½∫₀ˣ q|`.
    pub fn boundary_defects(&self, q: &Samples) -> Result<(f64, f64)> {
        self.grid.check_same(q.grid(), "boundary check")?;
        let half_q = cumulative_from(q, self.grid.center());
        let half_h = self.h * 0.5;
        let n = self.grid.len();
        let mut anti = 0.0_f64;
        let mut diag = 0.0_f64;
        for i in 0..n {
            anti = anti.max((self.values[[i, self.grid.mirror(i)]] - half_h).norm());
            diag = diag.max((self.values[[i, i]] - half_h - half_q.at(i) * 0.5).norm());
        }
        Ok((anti, diag))
    }

    /// `K(x,t) - K(x,-t)`, which does not depend on `h`.
    pub fn odd_part(&self) -> Array2<C> {
        let n = self.grid.len();
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.values[[i, j]] - self.values[[i, n - 1 - j]]
        })
    }

    /// Same kernel shifted by a constant; used to check that diagnostics notice corruption.
    pub fn perturbed(&self, delta: C) -> Self {
        let mut out = self.clone();
        out.values.mapv_inplace(|v| v + delta);
        out.provenance = Provenance::Perturbed;
        out
    }

    /// Applies `T_h u(x) = u(x) + ∫_{-x}^{x} K(x, t) u(t) dt`.
    pub fn apply(&self, u: &Samples) -> Result<Samples> {
        self.grid.check_same(u.grid(), "apply")?;
        Ok(self.volterra(u, |i, j| self.values[[i, j]], 1.0))
    }

    /// Applies `T_h⁻¹ v(x) = v(x) - ∫_{-x}^{x} K(t, x) v(t) dt`.
    pub fn apply_inverse(&self, v: &Samples) -> Result<Samples> {
        self.grid.check_same(v.grid(), "apply_inverse")?;
        Ok(self.volterra(v, |i, j| self.values[[j, i]], -1.0))
    }

    fn volterra(
        &self,
        u: &Samples,
        kernel: impl Fn(usize, usize) -> C + Sync,
        sign: f64,
    ) -> Samples {
        let grid = self.grid;
        let c = grid.center();
        let step = grid.spacing();
        let uv = u.values();
        let out: Vec<C> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                if i == c {
                    return uv[i];
                }
                let (lo, hi) = if i > c {
                    (grid.mirror(i), i)
                } else {
                    (i, grid.mirror(i))
                };
                let integrand: Vec<C> = (lo..=hi).map(|j| kernel(i, j) * uv[j]).collect();
                let integral = quadrature::simpson(&integrand, step);
                let oriented = if i > c { integral } else { -integral };
                uv[i] + oriented * sign
            })
            .collect();
        Samples::from_vec_unchecked(grid, out)
    }
}

pub(crate) fn max_abs_diff(a: &Array2<C>, b: &Array2<C>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Fourth-order finite-difference `∂_t` along every row.
pub(crate) fn t_derivative(values: &Array2<C>, step: f64) -> Array2<C> {
    let mut out = Array2::zeros(values.dim());
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(values.axis_iter(Axis(0)).into_par_iter())
        .for_each(|(mut dst, src)| {
            let row: Vec<C> = src.to_vec();
            for (d, v) in dst.iter_mut().zip(quadrature::derivative4(&row, step)) {
                *d = v;
            }
        });
    out
}

/// `K(x,t;h_new)` from `K(x,t;h)`:
/// `K_new = Δ/2 + K + (Δ/2) ∫_t^x (K(x,s) - K(x,-s)) ds`, `Δ = h_new - h`.
pub fn reparametrize_h(kernel: &TransmutationKernel, h_new: C) -> TransmutationKernel {
    let grid = kernel.grid;
    let n = grid.len();
    let c = grid.center();
    let step = grid.spacing();
    let half_delta = (h_new - kernel.h) * 0.5;
    let odd = kernel.odd_part();

    let mut values = kernel.values.clone();
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(odd.axis_iter(Axis(0)).into_par_iter())
        .enumerate()
        .for_each(|(i, (mut row, odd_row))| {
            let odd_row = odd_row.to_vec();
            let primitive = quadrature::cumulative(&odd_row, step, c);
            for j in 0..n {
                row[j] += half_delta + half_delta * (primitive[i] - primitive[j]);
            }
        });
    let kt = kernel.kt.as_ref().map(|kt| {
        let mut kt = kt.clone();
        kt.indexed_iter_mut()
            .for_each(|((i, j), v)| *v -= half_delta * odd[[i, j]]);
        kt
    });
    TransmutationKernel {
        grid,
        h: h_new,
        values,
        kt,
        kt_source: kernel.kt_source,
        provenance: Provenance::Reparametrized,
    }
}

/// Max over interior nodes of `|(∂²_x - q(x)) K - ∂²_t K|` plus the larger boundary defect.
///
/// Second derivatives use the fourth-order five-point stencil, two nodes away from the edges.
pub fn goursat_residual(kernel: &TransmutationKernel, q: &Samples) -> Result<f64> {
    let grid = kernel.grid;
    grid.check_same(q.grid(), "goursat_residual")?;
    let n = grid.len();
    if n < 5 {
        return Err(TransmutantError::invalid(
            "goursat_residual needs at least 5 nodes",
        ));
    }
    let inv = 1.0 / (12.0 * grid.spacing() * grid.spacing());
    let k = &kernel.values;
    let pde = (2..n - 2)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0_f64;
            for j in 2..n - 2 {
                let kxx = quadrature::second_difference4(|d| k[[i + 2 - d, j]]) * inv;
                let ktt = quadrature::second_difference4(|d| k[[i, j + 2 - d]]) * inv;
                worst = worst.max((kxx - q.at(i) * k[[i, j]] - ktt).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let (anti, diag) = kernel.boundary_defects(q)?;
    Ok(pde + anti.max(diag))
}

/// Max over the square of `|(K₁(x,t) - K₁(x,-t)) - (K₂(x,t) - K₂(x,-t))|`.
pub fn odd_part_difference(a: &TransmutationKernel, b: &TransmutationKernel) -> Result<f64> {
    a.grid.check_same(&b.grid, "odd_part_difference")?;
    Ok(max_abs_diff(&a.odd_part(), &b.odd_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn rational(grid: Grid) -> TransmutationKernel {
        TransmutationKernel::from_fn(
            grid,
            re(-1.0),
            |x, t| re((t - 1.0) / (2.0 * (x + 1.0))),
            Some(&|x, _t| re(1.0 / (2.0 * (x + 1.0)))),
            Provenance::ClosedForm,
        )
    }

    #[test]
    fn zero_kernel_is_identity() {
        let g = make_grid(1.0, 21).unwrap();
        let k = TransmutationKernel::zero(g);
        let u = Samples::from_real_fn(g, f64::cos);
        assert_eq!(k.apply(&u).unwrap(), u);
        assert_eq!(k.apply_inverse(&u).unwrap(), u);
    }

    #[test]
    fn rational_kernel_maps_one_to_reciprocal() {
        let g = make_grid(1.0, 201).unwrap();
        let k = rational(g);
        let v = k.apply(&Samples::constant(g, re(1.0))).unwrap();
        assert!((v.at(200).re - 0.5).abs() < 1e-8);
        let exact = Samples::from_real_fn(g, |x| 1.0 / (x + 1.0));
        assert!(v.max_diff(&exact) < 1e-8);
    }

    #[test]
    fn rational_kernel_maps_cosine() {
        let g = make_grid(1.0, 201).unwrap();
        let k = rational(g);
        let v = k.apply(&Samples::from_real_fn(g, f64::cos)).unwrap();
        let exact = 1f64.cos() - 1f64.sin() / 2.0;
        assert!((v.at(200).re - exact).abs() < 1e-8);
        assert!((exact - 0.119_566).abs() < 1e-6);
    }

    #[test]
    fn inverse_recovers_constant() {
        let g = make_grid(0.5, 201).unwrap();
        let k = rational(g);
        let v = Samples::from_real_fn(g, |x| 1.0 / (x + 1.0));
        let u = k.apply_inverse(&v).unwrap();
        assert!(u.max_diff(&Samples::constant(g, re(1.0))) < 1e-8);
    }

    #[test]
    fn inverse_of_forward_on_cubic() {
        let g = make_grid(0.5, 201).unwrap();
        let k = rational(g);
        let u = Samples::from_real_fn(g, |x| x * x * x);
        let back = k.apply_inverse(&k.apply(&u).unwrap()).unwrap();
        assert!(back.max_diff(&u) < 1e-7);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let k = rational(make_grid(0.5, 21).unwrap());
        let u = Samples::constant(make_grid(0.5, 23).unwrap(), re(1.0));
        assert!(matches!(
            k.apply(&u),
            Err(TransmutantError::InvalidArgument(_))
        ));
    }

    #[test]
    fn reparametrize_zero_kernel_gives_half() {
        let g = make_grid(1.0, 41).unwrap();
        let k = reparametrize_h(&TransmutationKernel::zero(g), re(1.0));
        assert!(k.values().iter().all(|v| (v - re(0.5)).norm() < 1e-15));
        assert_eq!(k.h(), re(1.0));
    }

    #[test]
    fn reparametrize_rational_to_two() {
        let g = make_grid(0.5, 201).unwrap();
        let k2 = reparametrize_h(&rational(g), re(2.0));
        let err = k2.max_error_against(|x, t| {
            re((3.0 * x * x + 6.0 * x + 4.0 - 3.0 * t * t + 2.0 * t) / (4.0 * (x + 1.0)))
        });
        assert!(err < 1e-8, "err = {err:e}");
        let kt_err = k2.max_kt_error_against(|x, t| re((2.0 - 6.0 * t) / (4.0 * (x + 1.0))));
        assert!(kt_err < 1e-8, "kt err = {kt_err:e}");
    }

    #[test]
    fn reparametrize_same_h_is_identity() {
        let g = make_grid(0.5, 51).unwrap();
        let k = rational(g);
        let same = reparametrize_h(&k, k.h());
        assert_eq!(same.values(), k.values());
    }

    #[test]
    fn residual_of_exact_kernels() {
        let g = make_grid(1.0, 41).unwrap();
        let k = reparametrize_h(&TransmutationKernel::zero(g), re(1.0));
        let q = Samples::constant(g, re(0.0));
        assert!(goursat_residual(&k, &q).unwrap() < 1e-12);

        let g = make_grid(0.5, 401).unwrap();
        let q = Samples::from_real_fn(g, |x| 2.0 / (x + 1.0).powi(2));
        let r = goursat_residual(&rational(g), &q).unwrap();
        assert!(r <= 5e-4, "residual {r:e}");
    }

    #[test]
    fn perturbation_shifts_every_entry() {
        let g = make_grid(0.5, 11).unwrap();
        let k = rational(g);
        let p = k.perturbed(re(1e-2));
        assert!((p.max_diff(&k) - 1e-2).abs() < 1e-15);
        assert_eq!(p.provenance(), Provenance::Perturbed);
    }
}
