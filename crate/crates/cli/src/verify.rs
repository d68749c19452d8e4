//! Self-checks against closed-form kernels and the Dirac system.

use num_complex::Complex64;
use serde::Serialize;
use transmutant::{
    build_table, darboux_kernel, darboux_transform, dirac_kernels, dirac_residual, dirac_transmute,
    dirac_untransmute, free_dirac_solution, goursat_residual, reference_kernel, solve_kernel,
    transmutation_identity_residual, verify_power_mapping, DiracConfig, GoursatOptions, Grid,
    Potential, Samples, Spinor, TransmutationKernel,
};

use crate::config::JobConfig;
use crate::error::CliError;
use crate::potentials::sample_scalar;

type C = Complex64;

/// Half-width used by the rational suite; the potentials have a pole at `x = -1`.
pub const RATIONAL_A: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Rational,
    Dirac,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub n_points: usize,
    pub perturbation: f64,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn into_result(self) -> Result<Self, CliError> {
        if self.failed > 0 {
            Err(CliError::VerifyFailed {
                failed: self.failed,
                total: self.checks.len(),
                report: self.to_json(),
            })
        } else {
            Ok(self)
        }
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            tolerance,
            // NaN fails.
            pass: value <= tolerance,
        });
    }
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

fn options(cfg: &JobConfig) -> GoursatOptions {
    GoursatOptions {
        m_points: cfg.m_points,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
    }
}

pub fn run(cfg: &JobConfig, suite: Suite, perturbation: f64) -> Result<Report, CliError> {
    let mut checks = Checks(Vec::new());
    if matches!(suite, Suite::Rational | Suite::All) {
        rational_suite(cfg, perturbation, &mut checks)?;
    }
    if matches!(suite, Suite::Dirac | Suite::All) {
        dirac_suite(cfg, perturbation, &mut checks)?;
    }
    let checks = checks.0;
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(Report {
        suite: format!("{suite:?}").to_lowercase(),
        n_points: cfg.n_points,
        perturbation,
        failed: checks.len() - passed,
        passed,
        checks,
    })
}

fn rational_suite(cfg: &JobConfig, eps: f64, checks: &mut Checks) -> Result<(), CliError> {
    let grid = Grid::new(RATIONAL_A, cfg.n_points)?;
    let opts = options(cfg);
    let delta = re(eps);
    let solve = |name: &str| -> Result<(Samples, TransmutationKernel), CliError> {
        let r = reference_kernel(name).expect("builtin reference");
        let q = Samples::from_real_fn(grid, r.q);
        let k = solve_kernel(&q, re(r.h), &opts)?;
        Ok((q, if eps != 0.0 { k.perturbed(delta) } else { k }))
    };

    let mut n1_h2 = None;
    for name in ["rational_n1", "rational_n1_h2", "rational_n2"] {
        let r = reference_kernel(name).expect("builtin reference");
        let (q, k) = solve(name)?;
        checks.push(
            format!("{name}/kernel"),
            k.max_error_against(r.kernel),
            1e-6,
        );
        checks.push(
            format!("{name}/goursat_residual"),
            goursat_residual(&k, &q)?,
            1e-2,
        );
        let u = Samples::from_real_fn(grid, f64::cos);
        let back = k.apply_inverse(&k.apply(&u)?)?;
        checks.push(format!("{name}/inverse"), back.max_diff(&u), 1e-6);
        let u2 = u.map(|v| -v);
        checks.push(
            format!("{name}/identity"),
            transmutation_identity_residual(&k, &q, &u, &u2)?,
            5e-4,
        );
        if name == "rational_n1" {
            let p = Potential::from_initial_slope(&q, re(r.h))?;
            let table = build_table(&p, 0.0, cfg.k_max)?;
            let worst = (0..=cfg.k_max)
                .map(|j| verify_power_mapping(&k, &table, j))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            checks.push(format!("{name}/formal_powers"), worst, 1e-6);
        }
        if name == "rational_n1_h2" {
            n1_h2 = Some((q, k));
        }
    }

    let (q, k) = n1_h2.expect("solved above");
    let p = Potential::from_initial_slope(&q, re(2.0))?;
    let pair = darboux_transform(&p)?;
    let k2 = darboux_kernel(&k, &pair)?;
    let target = reference_kernel("rational_n2").expect("builtin reference");
    checks.push(
        "darboux/n1_to_n2",
        k2.max_error_against(target.kernel),
        1e-5,
    );
    Ok(())
}

fn dirac_suite(cfg: &JobConfig, eps: f64, checks: &mut Checks) -> Result<(), CliError> {
    let grid = Grid::new(cfg.a, cfg.n_points)?;
    let opts = options(cfg);
    let spec = &cfg.dirac;
    let [c1, c2] = spec.coefficients;
    let energies: Vec<C> = spec.energies.iter().map(|e| e.0).collect();
    let scalar = sample_scalar(&spec.scalar, spec.mass, grid)?;
    let dirac = DiracConfig::new(spec.mass, scalar, energies.clone())?;
    let tr = dirac_kernels(&dirac, &opts)?;
    let zero_mode = Spinor::new(tr.pair.f().clone(), Samples::constant(grid, re(0.0)))?;
    checks.push(
        "dirac/zero_mode",
        dirac_residual(&dirac, &zero_mode, re(0.0)),
        5e-5,
    );
    let (k1, k2) = if eps != 0.0 {
        (tr.k1.perturbed(re(eps)), tr.k2.perturbed(re(eps)))
    } else {
        (tr.k1, tr.k2)
    };
    for (idx, &e) in energies.iter().enumerate() {
        let u = free_dirac_solution(e, c1.0, c2.0, grid);
        let psi = dirac_transmute(&k1, &k2, &u)?;
        checks.push(
            format!("dirac/E{idx}/residual"),
            dirac_residual(&dirac, &psi, e),
            1e-5,
        );
        let back = dirac_untransmute(&k1, &k2, &psi)?;
        checks.push(format!("dirac/E{idx}/inverse"), back.max_diff(&u), 1e-6);
    }
    Ok(())
}
