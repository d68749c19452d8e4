//! Darboux transformation `q₂ = 2(f'/f)² - q₁` and the transmutation kernel
//! it induces for the transformed operator.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TransmutantError};
use crate::grid::{cumulative_from, first_derivative, Samples};
use crate::kernel::{
    reparametrize_h, t_derivative, DerivativeSource, Provenance, TransmutationKernel,
};
use crate::powers::Potential;
use crate::quadrature;

type C = Complex64;

/// `A₁ = ∂² - q₁` with solution `f`, and `A₂ = ∂² - q₂` with solution `1/f`.
#[derive(Debug, Clone)]
pub struct DarbouxPair {
    p1: Potential,
    p2: Potential,
}

impl DarbouxPair {
    pub fn p1(&self) -> &Potential {
        &self.p1
    }

    pub fn p2(&self) -> &Potential {
        &self.p2
    }

    pub fn q1(&self) -> &Samples {
        self.p1.q()
    }

    pub fn q2(&self) -> &Samples {
        self.p2.q()
    }

    pub fn f(&self) -> &Samples {
        self.p1.f()
    }

    pub fn h(&self) -> C {
        self.p1.h()
    }
}

pub fn darboux_transform(p1: &Potential) -> Result<DarbouxPair> {
    let f = p1.f();
    let fp = p1.f_prime();
    let log_derivative = fp.zip_map(f, |d, v| d / v);
    let q2 = log_derivative.zip_map(p1.q(), |l, q| l * l * 2.0 - q);
    let inv_f = f.map(|v| v.inv());
    let inv_f_prime = fp.zip_map(f, |d, v| -d / (v * v));
    let p2 = Potential::from_parts(&q2, &inv_f, &inv_f_prime)?;
    Ok(DarbouxPair { p1: p1.clone(), p2 })
}

fn check_kernel(k1: &TransmutationKernel, pair: &DarbouxPair) -> Result<()> {
    k1.grid().check_same(pair.p1.grid(), "darboux kernel")?;
    let h = pair.h();
    if (k1.h() - h).norm() > 1e-6 * h.norm().max(1.0) {
        return Err(TransmutantError::invalid(format!(
            "kernel is at h = {}, the solution has h = {h}",
            k1.h()
        )));
    }
    Ok(())
}

fn weighted_kt(k1: &TransmutationKernel, pair: &DarbouxPair) -> Result<Array2<C>> {
    let kt = k1
        .kt()
        .ok_or_else(|| TransmutantError::invalid("Darboux kernel needs the t-derivative of K₁"))?;
    let f = pair.f().values();
    let mut out = kt.clone();
    out.axis_iter_mut(Axis(0))
        .zip(f)
        .for_each(|(mut row, fv)| row.mapv_inplace(|v| v * fv));
    Ok(out)
}

/// ```text
/// K₂(x,t;-h) = -(1/f(x)) (∫_{-t}^x ∂_t K₁(s,t;h) f(s) ds + (h/2) f(-t))
/// ```
/// on the full square. `∂_t K₂` is taken by finite differences.
pub fn darboux_kernel(k1: &TransmutationKernel, pair: &DarbouxPair) -> Result<TransmutationKernel> {
    check_kernel(k1, pair)?;
    let grid = *k1.grid();
    let n = grid.len();
    let step = grid.spacing();
    let f = pair.f().values();
    let half_h = pair.h() * 0.5;
    let weighted = weighted_kt(k1, pair)?;

    let mut values = Array2::zeros((n, n));
    values
        .axis_iter_mut(Axis(1))
        .into_par_iter()
        .zip(weighted.axis_iter(Axis(1)).into_par_iter())
        .enumerate()
        .for_each(|(j, (mut column, integrand))| {
            let m = grid.mirror(j);
            let primitive = quadrature::cumulative(&integrand.to_vec(), step, m);
            for i in 0..n {
                column[i] = -(primitive[i] + half_h * f[m]) / f[i];
            }
        });
    let kt = t_derivative(&values, step);
    TransmutationKernel::from_parts(
        grid,
        -pair.h(),
        values,
        Some(kt),
        DerivativeSource::FiniteDifference,
        Provenance::Darboux,
    )
}

/// The same kernel from triangle data `|t| <= x` only, for rows `x > 0`:
///
/// ```text
/// t >= 0: -(1/f(x)) (f'(t) + ∫_{|t|}^x ∂_t K₁(s,t) f(s) ds - (h/2) f(t) - (f(t)/2) ∫₀ᵗ q₁)
/// t <  0: -(1/f(x)) (∫_{|t|}^x ∂_t K₁(s,t) f(s) ds + (h/2) f(-t))
/// ```
/// Every other entry is zero and no `∂_t K₂` is produced.
pub fn darboux_kernel_triangle(
    k1: &TransmutationKernel,
    pair: &DarbouxPair,
) -> Result<TransmutationKernel> {
    check_kernel(k1, pair)?;
    let grid = *k1.grid();
    let n = grid.len();
    let c = grid.center();
    let step = grid.spacing();
    let f = pair.f().values();
    let fp = pair.p1.f_prime().values();
    let h = pair.h();
    let q_primitive = cumulative_from(pair.q1(), c);
    let weighted = weighted_kt(k1, pair)?;

    let mut values = Array2::zeros((n, n));
    values
        .axis_iter_mut(Axis(1))
        .into_par_iter()
        .zip(weighted.axis_iter(Axis(1)).into_par_iter())
        .enumerate()
        .for_each(|(j, (mut column, integrand))| {
            // the column is read only from s = |t| upwards
            let start = j.max(grid.mirror(j));
            let tail: Vec<C> = integrand.iter().skip(start).copied().collect();
            let primitive = quadrature::cumulative(&tail, step, 0);
            let extra = if j >= c {
                fp[j] - h * 0.5 * f[j] - f[j] * 0.5 * q_primitive.at(j)
            } else {
                h * 0.5 * f[grid.mirror(j)]
            };
            for i in start.max(c + 1)..n {
                column[i] = -(primitive[i - start] + extra) / f[i];
            }
        });
    TransmutationKernel::from_parts(
        grid,
        -h,
        values,
        None,
        DerivativeSource::Missing,
        Provenance::DarbouxTriangle,
    )
}

/// `T₂[u](x) = (1/f(x)) (∫₀ˣ f T₁[u'] + u(0))`, with `u'` by fourth-order differences.
pub fn apply_t2_direct(
    k1: &TransmutationKernel,
    pair: &DarbouxPair,
    u: &Samples,
) -> Result<Samples> {
    let du = first_derivative(u);
    let image = k1.apply(&du)?;
    let f = pair.f();
    let integral = cumulative_from(&(f * &image), f.grid().center());
    let u0 = u.at_origin();
    Ok(integral.zip_map(f, |v, fv| (v + u0) / fv))
}

/// `T₁[u](x) = f(x) (∫₀ˣ (1/f) T₂[u'] + u(0))`, the mirrored formula.
pub fn apply_t1_from_t2(
    k2: &TransmutationKernel,
    pair: &DarbouxPair,
    u: &Samples,
) -> Result<Samples> {
    let du = first_derivative(u);
    let image = k2.apply(&du)?;
    let f = pair.f();
    let integral = cumulative_from(&image.zip_map(f, |v, fv| v / fv), f.grid().center());
    let u0 = u.at_origin();
    Ok(integral.zip_map(f, |v, fv| (v + u0) * fv))
}

/// Interior max of `|∂(f T₂u) - f T₁u'|` and `|∂((1/f) T₁u) - (1/f) T₂u'|`.
pub fn commutation_residuals(
    k1: &TransmutationKernel,
    k2: &TransmutationKernel,
    pair: &DarbouxPair,
    u: &Samples,
) -> Result<(f64, f64)> {
    let f = pair.f();
    let du = first_derivative(u);
    let t1u = k1.apply(u)?;
    let t2u = k2.apply(u)?;
    let t1du = k1.apply(&du)?;
    let t2du = k2.apply(&du)?;
    let lhs1 = first_derivative(&(f * &t2u));
    let rhs1 = f * &t1du;
    let lhs2 = first_derivative(&t1u.zip_map(f, |v, fv| v / fv));
    let rhs2 = t2du.zip_map(f, |v, fv| v / fv);
    Ok((
        lhs1.max_diff_interior(&rhs1, 2),
        lhs2.max_diff_interior(&rhs2, 2),
    ))
}

/// `γ₀(g) = g`, `γ_k(g) = (f²)^{(-1)^{k-1}} γ_{k-1}(g)'`.
pub fn generalized_derivative(pair: &DarbouxPair, g: &Samples, k: usize) -> Samples {
    let f2 = pair.f().map(|v| v * v);
    let mut out = g.clone();
    for step in 1..=k {
        let d = first_derivative(&out);
        out = if step % 2 == 1 {
            &d * &f2
        } else {
            d.zip_map(&f2, |v, w| v / w)
        };
    }
    out
}

/// One step of an iterated Darboux chain.
#[derive(Debug, Clone)]
pub struct LadderRung {
    /// `K_r` moved to `h_r = f_r'(0)`.
    pub kernel_in: TransmutationKernel,
    pub pair: DarbouxPair,
    /// `K_{r+1}` at `-h_r`.
    pub kernel_out: TransmutationKernel,
}

/// Iterates reparametrize → Darboux kernel, starting from the kernel of `q₀`.
///
/// Rung `r` uses the solution of `f'' = q_r f` with `f(0) = 1`, `f'(0) = slopes[r]`.
pub fn darboux_ladder(
    q0: &Samples,
    k0: &TransmutationKernel,
    slopes: &[C],
) -> Result<Vec<LadderRung>> {
    let mut rungs = Vec::with_capacity(slopes.len());
    let mut q = q0.clone();
    let mut kernel = k0.clone();
    for &h in slopes {
        let potential = Potential::from_initial_slope(&q, h)?;
        let pair = darboux_transform(&potential)?;
        let kernel_in = reparametrize_h(&kernel, h);
        let kernel_out = darboux_kernel(&kernel_in, &pair)?;
        q = pair.q2().clone();
        kernel = kernel_out.clone();
        rungs.push(LadderRung {
            kernel_in,
            pair,
            kernel_out,
        });
    }
    Ok(rungs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grid};

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn free_pair(g: Grid) -> (TransmutationKernel, DarbouxPair) {
        let q = Samples::constant(g, re(0.0));
        let p = Potential::from_initial_slope(&q, re(1.0)).unwrap();
        let k = reparametrize_h(&TransmutationKernel::zero(g), re(1.0));
        (k, darboux_transform(&p).unwrap())
    }

    #[test]
    fn free_chain_gives_rational_potential_and_kernel() {
        let g = make_grid(0.5, 201).unwrap();
        let (k, pair) = free_pair(g);
        let q2 = Samples::from_real_fn(g, |x| 2.0 / (x + 1.0).powi(2));
        assert!(pair.q2().max_diff(&q2) < 1e-12);
        assert_eq!(pair.p2().h(), re(-1.0));
        let k2 = darboux_kernel(&k, &pair).unwrap();
        assert_eq!(k2.h(), re(-1.0));
        let err = k2.max_error_against(|x, t| re((t - 1.0) / (2.0 * (x + 1.0))));
        assert!(err < 1e-10, "err = {err:e}");
    }

    #[test]
    fn triangle_variant_agrees_on_positive_rows() {
        let g = make_grid(0.5, 201).unwrap();
        let (k, pair) = free_pair(g);
        let tri = darboux_kernel_triangle(&k, &pair).unwrap();
        assert!(tri.kt().is_none());
        let nodes = g.nodes();
        let mut worst = 0.0_f64;
        for i in g.center() + 1..g.len() {
            for j in g.mirror(i)..=i {
                let exact = (nodes[j] - 1.0) / (2.0 * (nodes[i] + 1.0));
                worst = worst.max((tri.at(i, j) - exact).norm());
            }
        }
        assert!(worst < 1e-7, "worst = {worst:e}");
    }

    #[test]
    fn direct_form_maps_one_to_reciprocal() {
        let g = make_grid(0.5, 101).unwrap();
        let (k, pair) = free_pair(g);
        let v = apply_t2_direct(&k, &pair, &Samples::constant(g, re(1.0))).unwrap();
        assert!(v.max_diff(&pair.f().map(|f| f.inv())) < 1e-14);
    }

    #[test]
    fn trivial_pair_has_zero_kernel_and_residuals() {
        let g = make_grid(1.0, 101).unwrap();
        let q = Samples::constant(g, re(0.0));
        let p = Potential::from_initial_slope(&q, re(0.0)).unwrap();
        let pair = darboux_transform(&p).unwrap();
        let k = TransmutationKernel::zero(g);
        let k2 = darboux_kernel(&k, &pair).unwrap();
        assert!(k2.values().iter().all(|v| v.norm() == 0.0));
        let (r1, r2) =
            commutation_residuals(&k, &k2, &pair, &Samples::from_real_fn(g, f64::cos)).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }

    #[test]
    fn unit_f_derivatives_are_plain() {
        let g = make_grid(1.0, 201).unwrap();
        let p = Potential::from_initial_slope(&Samples::constant(g, re(0.0)), re(0.0)).unwrap();
        let pair = darboux_transform(&p).unwrap();
        let d2 = generalized_derivative(&pair, &Samples::from_real_fn(g, f64::sin), 2);
        assert!(d2.max_diff(&Samples::from_real_fn(g, |x| -x.sin())) < 1e-6);
    }

    #[test]
    fn kernel_h_mismatch_is_rejected() {
        let g = make_grid(0.5, 41).unwrap();
        let (_, pair) = free_pair(g);
        assert!(darboux_kernel(&TransmutationKernel::zero(g), &pair).is_err());
    }
}
