//! Nonvanishing particular solutions, recursive integrals and formal powers.

use num_complex::Complex64;

use crate::error::{Result, TransmutantError};
use crate::grid::{
    cumulative_from, first_derivative, interpolate, second_derivative, Grid, Samples,
};
use crate::kernel::TransmutationKernel;

type C = Complex64;

/// Nodes where `|f|` falls below this are treated as zeros of `f`.
pub const VANISHING_THRESHOLD: f64 = 1e-8;

/// Bound on `|f'' - q f|` relative to `max(1, ‖f‖∞)`.
pub const RESIDUAL_THRESHOLD: f64 = 5e-4;

/// A potential `q` together with a nonvanishing solution `f` of `f'' = q f`,
/// normalized so that `f(0) = 1`; `h = f'(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    q: Samples,
    f: Samples,
    f_prime: Samples,
    h: C,
    min_abs_f: f64,
}

impl Potential {
    /// Integrates `f'' = q f` from `f(0) = 1`, `f'(0) = h` in both directions.
    pub fn from_initial_slope(q: &Samples, h: C) -> Result<Self> {
        let (f, f_prime) = integrate_solution(q, h)?;
        Self::checked(q.clone(), f, f_prime)
    }

    /// Uses a supplied solution; `f'` is taken by fourth-order differences.
    pub fn from_solution(q: &Samples, f: &Samples) -> Result<Self> {
        q.grid().check_same(f.grid(), "potential")?;
        let f0 = f.at_origin();
        if f0.norm() < VANISHING_THRESHOLD {
            return Err(TransmutantError::VanishingSolution {
                x: 0.0,
                magnitude: f0.norm(),
            });
        }
        let f = f.scale(f0.inv());
        let f_prime = first_derivative(&f);
        Self::checked(q.clone(), f, f_prime)
    }

    /// Uses a supplied solution and its exact derivative, normalized by `f(0)`.
    pub fn from_parts(q: &Samples, f: &Samples, f_prime: &Samples) -> Result<Self> {
        q.grid().check_same(f.grid(), "potential")?;
        q.grid().check_same(f_prime.grid(), "potential")?;
        let f0 = f.at_origin();
        if f0.norm() < VANISHING_THRESHOLD {
            return Err(TransmutantError::VanishingSolution {
                x: 0.0,
                magnitude: f0.norm(),
            });
        }
        Self::checked(q.clone(), f.scale(f0.inv()), f_prime.scale(f0.inv()))
    }

    fn checked(q: Samples, f: Samples, f_prime: Samples) -> Result<Self> {
        let grid = *q.grid();
        let min_abs_f = check_nonvanishing(&f)?;
        let defect = solution_defect(&q, &f);
        if defect > RESIDUAL_THRESHOLD * f.max_norm().max(1.0) {
            return Err(TransmutantError::InconsistentInput {
                what: "f does not solve f'' = q f".into(),
                defect,
            });
        }
        let h = f_prime.at(grid.center());
        Ok(Self {
            q,
            f,
            f_prime,
            h,
            min_abs_f,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.q.grid()
    }

    pub fn q(&self) -> &Samples {
        &self.q
    }

    pub fn f(&self) -> &Samples {
        &self.f
    }

    pub fn f_prime(&self) -> &Samples {
        &self.f_prime
    }

    pub fn h(&self) -> C {
        self.h
    }

    pub fn min_abs_f(&self) -> f64 {
        self.min_abs_f
    }

    /// Interior max of `|f'' - q f|` by fourth-order differences.
    pub fn residual(&self) -> f64 {
        solution_defect(&self.q, &self.f)
    }
}

/// Either computes `f` from `h` or validates a supplied `f`.
pub fn build_potential(q: &Samples, f: Option<&Samples>, h: Option<C>) -> Result<Potential> {
    match (f, h) {
        (Some(f), _) => Potential::from_solution(q, f),
        (None, Some(h)) => Potential::from_initial_slope(q, h),
        (None, None) => Err(TransmutantError::invalid("either f or h must be given")),
    }
}

fn solution_defect(q: &Samples, f: &Samples) -> f64 {
    let n = f.grid().len();
    if n < 5 {
        let fxx = second_derivative(f);
        return (1..n - 1)
            .map(|i| (fxx.at(i) - q.at(i) * f.at(i)).norm())
            .fold(0.0, f64::max);
    }
    let v = f.values();
    let inv = 1.0 / (12.0 * f.grid().spacing().powi(2));
    (2..n - 2)
        .map(|i| {
            let fxx =
                (-v[i - 2] + v[i - 1] * 16.0 - v[i] * 30.0 + v[i + 1] * 16.0 - v[i + 2]) * inv;
            (fxx - q.at(i) * v[i]).norm()
        })
        .fold(0.0, f64::max)
}

fn check_nonvanishing(f: &Samples) -> Result<f64> {
    let grid = f.grid();
    let mut min = f64::INFINITY;
    for (i, v) in f.values().iter().enumerate() {
        let m = v.norm();
        if m < VANISHING_THRESHOLD {
            return Err(TransmutantError::VanishingSolution {
                x: grid.node(i),
                magnitude: m,
            });
        }
        min = min.min(m);
    }
    // a real solution changing sign between nodes has a zero there
    for (i, w) in f.values().windows(2).enumerate() {
        if w[0].im == 0.0 && w[1].im == 0.0 && w[0].re * w[1].re < 0.0 {
            let k = if w[0].norm() < w[1].norm() { i } else { i + 1 };
            return Err(TransmutantError::VanishingSolution {
                x: grid.node(k),
                magnitude: f.at(k).norm(),
            });
        }
    }
    Ok(min)
}

/// RK4 for `(f, f')' = (f', q f)` marching out from the origin.
fn integrate_solution(q: &Samples, h: C) -> Result<(Samples, Samples)> {
    let grid = *q.grid();
    let n = grid.len();
    let c = grid.center();
    let mut f = vec![C::new(0.0, 0.0); n];
    let mut fp = vec![C::new(0.0, 0.0); n];
    f[c] = C::new(1.0, 0.0);
    fp[c] = h;
    let step_once = |i: usize, j: usize, f: &[C], fp: &[C]| -> Result<(C, C)> {
        let (x0, x1) = (grid.node(i), grid.node(j));
        let dx = x1 - x0;
        let q0 = q.at(i);
        let qm = interpolate(q, 0.5 * (x0 + x1))?;
        let q1 = q.at(j);
        let (y, z) = (f[i], fp[i]);
        let (k1y, k1z) = (z, q0 * y);
        let (k2y, k2z) = (z + k1z * (dx / 2.0), qm * (y + k1y * (dx / 2.0)));
        let (k3y, k3z) = (z + k2z * (dx / 2.0), qm * (y + k2y * (dx / 2.0)));
        let (k4y, k4z) = (z + k3z * dx, q1 * (y + k3y * dx));
        Ok((
            y + (k1y + k2y * 2.0 + k3y * 2.0 + k4y) * (dx / 6.0),
            z + (k1z + k2z * 2.0 + k3z * 2.0 + k4z) * (dx / 6.0),
        ))
    };
    for i in c..n - 1 {
        (f[i + 1], fp[i + 1]) = step_once(i, i + 1, &f, &fp)?;
    }
    for i in (1..=c).rev() {
        (f[i - 1], fp[i - 1]) = step_once(i, i - 1, &f, &fp)?;
    }
    if let Some(bad) = f.iter().chain(fp.iter()).find(|v| !v.is_finite()) {
        return Err(TransmutantError::InconsistentInput {
            what: "solution of f'' = q f overflowed".into(),
            defect: bad.norm(),
        });
    }
    Ok((
        Samples::from_vec_unchecked(grid, f),
        Samples::from_vec_unchecked(grid, fp),
    ))
}

/// `X^(n)`, `X̃^(n)`, `φ_k` and `ψ_k` up to `k_max`, anchored at `x0`.
#[derive(Debug, Clone)]
pub struct FormalPowerTable {
    potential: Potential,
    x0: usize,
    k_max: usize,
    x: Vec<Samples>,
    x_tilde: Vec<Samples>,
    phi: Vec<Samples>,
    psi: Vec<Samples>,
}

impl FormalPowerTable {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Grid index of the anchor point.
    pub fn x0(&self) -> usize {
        self.x0
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn x(&self, n: usize) -> &Samples {
        &self.x[n]
    }

    pub fn x_tilde(&self, n: usize) -> &Samples {
        &self.x_tilde[n]
    }

    pub fn phi(&self, k: usize) -> &Samples {
        &self.phi[k]
    }

    pub fn psi(&self, k: usize) -> &Samples {
        &self.psi[k]
    }

    pub fn phis(&self) -> &[Samples] {
        &self.phi
    }

    pub fn psis(&self) -> &[Samples] {
        &self.psi
    }
}

/// ```text
/// X̃^(n) = n ∫_{x0}^x X̃^(n-1) (f²)^{(-1)^{n-1}},   X^(n) = n ∫_{x0}^x X^(n-1) (f²)^{(-1)^n}
/// φ_k = f X^(k) (k odd), f X̃^(k) (k even);  ψ_k = X^(k)/f (k even), X̃^(k)/f (k odd)
/// ```
pub fn build_table(p: &Potential, x0: f64, k_max: usize) -> Result<FormalPowerTable> {
    let grid = *p.grid();
    let origin = grid
        .node_index(x0)
        .ok_or_else(|| TransmutantError::invalid(format!("x0 = {x0} is not a grid node")))?;
    let f2 = p.f.map(|v| v * v);
    let inv_f2 = p.f.map(|v| (v * v).inv());
    let one = Samples::constant(grid, C::new(1.0, 0.0));
    let mut x = vec![one.clone()];
    let mut x_tilde = vec![one];
    for n in 1..=k_max {
        let (for_tilde, for_x) = if n % 2 == 1 {
            (&f2, &inv_f2)
        } else {
            (&inv_f2, &f2)
        };
        let scale = C::new(n as f64, 0.0);
        x_tilde.push(cumulative_from(&(&x_tilde[n - 1] * for_tilde), origin).scale(scale));
        x.push(cumulative_from(&(&x[n - 1] * for_x), origin).scale(scale));
    }
    let inv_f = p.f.map(|v| v.inv());
    let phi = (0..=k_max)
        .map(|k| &p.f * if k % 2 == 1 { &x[k] } else { &x_tilde[k] })
        .collect();
    let psi = (0..=k_max)
        .map(|k| &inv_f * if k % 2 == 0 { &x[k] } else { &x_tilde[k] })
        .collect();
    Ok(FormalPowerTable {
        potential: p.clone(),
        x0: origin,
        k_max,
        x,
        x_tilde,
        phi,
        psi,
    })
}

/// Solutions of `u'' - q u = λ u`:
/// `u₁ = Σ λ^k/(2k)! φ_{2k}`, `u₂ = Σ λ^k/(2k+1)! φ_{2k+1}`, using powers up to `k_max`.
pub fn spps_solution(p: &Potential, lambda: C, k_max: usize) -> Result<(Samples, Samples)> {
    let table = build_table(p, 0.0, k_max)?;
    Ok((spps_sum(&table, lambda, 0), spps_sum(&table, lambda, 1)))
}

fn spps_sum(table: &FormalPowerTable, lambda: C, parity: usize) -> Samples {
    let mut sum = table.phi[parity].clone();
    let mut coeff = C::new(1.0, 0.0);
    let mut k = parity;
    while k + 2 <= table.k_max {
        k += 2;
        coeff *= lambda / ((k * (k - 1)) as f64);
        let term = table.phi[k].scale(coeff);
        sum = &sum + &term;
        if term.max_norm() < 1e-15 * sum.max_norm() {
            break;
        }
    }
    sum
}

/// `x^k` sampled on the grid.
pub fn monomial(grid: Grid, k: usize) -> Samples {
    Samples::from_real_fn(grid, |x| x.powi(k as i32))
}

fn check_h(kernel_h: C, expected: C) -> Result<()> {
    if (kernel_h - expected).norm() > 1e-6 * expected.norm().max(1.0) {
        return Err(TransmutantError::invalid(format!(
            "kernel parameter h = {kernel_h} does not match the solution's {expected}"
        )));
    }
    Ok(())
}

/// `‖T_h[x^k] - φ_k‖∞`; the kernel must be built at `h = f'(0)`.
pub fn verify_power_mapping(
    kernel: &TransmutationKernel,
    table: &FormalPowerTable,
    k: usize,
) -> Result<f64> {
    check_h(kernel.h(), table.potential.h)?;
    check_index(table, k)?;
    let image = kernel.apply(&monomial(*kernel.grid(), k))?;
    Ok(image.max_diff(&table.phi[k]))
}

/// `‖T_{-h}[x^k] - ψ_k‖∞` for the kernel of the Darboux-transformed operator.
pub fn verify_psi_mapping(
    kernel: &TransmutationKernel,
    table: &FormalPowerTable,
    k: usize,
) -> Result<f64> {
    check_h(kernel.h(), -table.potential.h)?;
    check_index(table, k)?;
    let image = kernel.apply(&monomial(*kernel.grid(), k))?;
    Ok(image.max_diff(&table.psi[k]))
}

fn check_index(table: &FormalPowerTable, k: usize) -> Result<()> {
    if k > table.k_max {
        return Err(TransmutantError::invalid(format!(
            "power {k} exceeds table size {}",
            table.k_max
        )));
    }
    Ok(())
}

/// Image of `x^k` under the `h = 0` kernel: `φ_k` for odd `k`,
/// `φ_k - h/(k+1) φ_{k+1}` for even `k` (needs `k + 1 <= k_max`).
pub fn base_kernel_image(table: &FormalPowerTable, k: usize) -> Result<Samples> {
    if k % 2 == 1 {
        check_index(table, k)?;
        return Ok(table.phi[k].clone());
    }
    check_index(table, k + 1)?;
    let factor = table.potential.h / (k as f64 + 1.0);
    Ok(&table.phi[k] - &table.phi[k + 1].scale(factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn free_solution_is_linear() {
        let g = make_grid(0.5, 101).unwrap();
        let p = Potential::from_initial_slope(&Samples::constant(g, re(0.0)), re(1.0)).unwrap();
        let exact = Samples::from_real_fn(g, |x| 1.0 + x);
        assert!(p.f().max_diff(&exact) < 1e-13);
        assert_eq!(p.h(), re(1.0));
    }

    #[test]
    fn rk4_solutions_match_closed_forms() {
        let g = make_grid(0.5, 401).unwrap();
        let q = Samples::from_real_fn(g, |x| 2.0 / (x + 1.0).powi(2));
        let p = Potential::from_initial_slope(&q, re(2.0)).unwrap();
        assert!(
            p.f()
                .max_diff(&Samples::from_real_fn(g, |x| (x + 1.0).powi(2)))
                < 1e-8
        );
        assert!(
            p.f_prime()
                .max_diff(&Samples::from_real_fn(g, |x| 2.0 * (x + 1.0)))
                < 1e-8
        );

        let g = make_grid(1.0, 201).unwrap();
        let p = Potential::from_initial_slope(&Samples::constant(g, re(1.0)), re(0.0)).unwrap();
        assert!(p.f().max_diff(&Samples::from_real_fn(g, f64::cosh)) < 1e-8);
    }

    #[test]
    fn zero_crossing_is_rejected() {
        let g = make_grid(2.0, 101).unwrap();
        let q = Samples::constant(g, re(-1.0));
        // f = cos x vanishes at ±π/2
        let err = Potential::from_initial_slope(&q, re(0.0)).unwrap_err();
        assert!(
            matches!(err, TransmutantError::VanishingSolution { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn wrong_solution_is_inconsistent() {
        let g = make_grid(1.0, 101).unwrap();
        let q = Samples::constant(g, re(1.0));
        let f = Samples::from_real_fn(g, |x| 1.0 + x * x);
        let err = Potential::from_solution(&q, &f).unwrap_err();
        assert!(matches!(err, TransmutantError::InconsistentInput { .. }));
    }

    #[test]
    fn unit_f_gives_monomials() {
        let g = make_grid(1.0, 201).unwrap();
        let p = Potential::from_initial_slope(&Samples::constant(g, re(0.0)), re(0.0)).unwrap();
        let t = build_table(&p, 0.0, 8).unwrap();
        for k in 0..=8 {
            assert!(t.phi(k).max_diff(&monomial(g, k)) < 1e-8, "k={k}");
            assert!(t.psi(k).max_diff(&monomial(g, k)) < 1e-8, "k={k}");
        }
    }

    #[test]
    fn reciprocal_rational_powers() {
        let g = make_grid(0.5, 201).unwrap();
        let q = Samples::from_real_fn(g, |x| 2.0 / (x + 1.0).powi(2));
        let f = Samples::from_real_fn(g, |x| 1.0 / (x + 1.0));
        let fp = Samples::from_real_fn(g, |x| -1.0 / (x + 1.0).powi(2));
        let p = Potential::from_parts(&q, &f, &fp).unwrap();
        assert_eq!(p.h(), re(-1.0));
        let t = build_table(&p, 0.0, 2).unwrap();
        let phi1 = Samples::from_real_fn(g, |x| {
            (x.powi(3) + 3.0 * x * x + 3.0 * x) / (3.0 * (x + 1.0))
        });
        let phi2 =
            Samples::from_real_fn(g, |x| (2.0 * x.powi(3) + 3.0 * x * x) / (3.0 * (x + 1.0)));
        assert!(t.phi(0).max_diff(&f) < 1e-15);
        assert!(t.phi(1).max_diff(&phi1) < 1e-8);
        assert!(t.phi(2).max_diff(&phi2) < 1e-8);
    }

    #[test]
    fn spps_recovers_trigonometric_pair() {
        let g = make_grid(1.0, 201).unwrap();
        let p = Potential::from_initial_slope(&Samples::constant(g, re(0.0)), re(0.0)).unwrap();
        let (u1, u2) = spps_solution(&p, re(-1.0), 20).unwrap();
        assert!(u1.max_diff(&Samples::from_real_fn(g, f64::cos)) < 1e-10);
        assert!(u2.max_diff(&Samples::from_real_fn(g, f64::sin)) < 1e-10);
    }
}
