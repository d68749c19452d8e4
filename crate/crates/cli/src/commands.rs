//! Subcommands. Each returns a JSON summary that `main` prints.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use transmutant::{
    build_table, darboux_ladder, dirac_kernels, dirac_residual, dirac_transmute,
    free_dirac_solution, goursat_residual, kernel_from_field, solve_goursat, spps_solution,
    DiracConfig, GoursatOptions, Grid, Potential, Samples, TransmutationKernel, REFERENCE_KERNELS,
};

use crate::config::{ComplexValue, JobConfig, OutputFormat, PotentialSpec};
use crate::error::CliError;
use crate::export::{
    create, meta_path, open, read_curve_csv, read_kernel_csv, write_curve_csv, write_json,
    write_kernel_csv, write_spinor_csv, write_table_csv, KernelMeta,
};
use crate::potentials::{
    default_slopes, matching_reference, sample_function, sample_potential, sample_scalar,
};
use crate::verify::{self, Suite};

type C = Complex64;

#[derive(Debug, Parser)]
#[command(
    name = "transmutant",
    version,
    about = "Transmutation kernels for Schrödinger and Dirac operators"
)]
pub struct Cli {
    /// JSON job file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// zero, rational_n:N, const_q:Q, soliton or file:PATH.
    #[arg(long, global = true)]
    pub potential: Option<PotentialSpec>,
    /// Builtin potential by name; parameters come from --order and --q.
    #[arg(long, global = true, conflicts_with = "potential")]
    pub builtin: Option<String>,
    /// Order n of rational_n.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Value of const_q.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<ComplexValue>,
    /// Half-width of the interval [-a, a].
    #[arg(long, global = true)]
    pub a: Option<f64>,
    #[arg(long, global = true, visible_alias = "n")]
    pub n_points: Option<usize>,
    /// Initial slope f'(0), e.g. `1`, `-2`, `0.5+1i`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<ComplexValue>,
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub m_points: Option<usize>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut JobConfig) -> Result<(), CliError> {
        if let Some(v) = self.potential {
            cfg.potential = v;
        }
        if let Some(name) = &self.builtin {
            cfg.potential = match name.as_str() {
                "zero" => PotentialSpec::Zero,
                "soliton" => PotentialSpec::Soliton,
                "rational_n" => PotentialSpec::RationalN { order: 1 },
                "const_q" => PotentialSpec::ConstQ { q: 1.0.into() },
                other => {
                    return Err(CliError::Config(format!(
                        "unknown builtin {other:?}; expected zero, rational_n, const_q or soliton"
                    )))
                }
            };
        }
        match (&mut cfg.potential, self.order, self.q) {
            (PotentialSpec::RationalN { order }, Some(v), None) => *order = v,
            (PotentialSpec::ConstQ { q }, None, Some(v)) => *q = v,
            (_, None, None) => {}
            _ => {
                return Err(CliError::Config(
                    "--order needs rational_n and --q needs const_q".into(),
                ))
            }
        }
        if let Some(v) = self.a {
            cfg.a = v;
        }
        if let Some(v) = self.n_points {
            cfg.n_points = v;
        }
        if let Some(v) = self.h {
            cfg.h = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.m_points {
            cfg.m_points = Some(v);
        }
        if let Some(v) = self.output_dir {
            cfg.output_dir = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Goursat problem and write K and K_t.
    Kernel,
    /// Apply T_h (or its inverse) to a sampled function.
    Apply {
        /// Kernel CSV; computed from the potential when absent.
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Curve CSV `x,re,im` on the job grid.
        #[arg(long, conflicts_with = "function")]
        input: Option<PathBuf>,
        /// cos:W, sin:W, exp:W, monomial:K or file:PATH.
        #[arg(long, visible_alias = "fn")]
        function: Option<String>,
        #[arg(long)]
        inverse: bool,
    },
    /// Iterated Darboux transformation of the kernel.
    Darboux {
        #[arg(long, default_value_t = 1)]
        rungs: usize,
        /// Comma-separated initial slopes, one per rung.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        slopes: Option<Vec<ComplexValue>>,
    },
    /// Formal powers and their generators.
    FormalPowers {
        /// Base point of the recursive integrals.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
    },
    /// Spectral-parameter power series solutions.
    Spps {
        #[arg(long, allow_hyphen_values = true)]
        lambda: ComplexValue,
    },
    /// Transmute free Dirac solutions.
    Dirac,
    /// Sample a closed-form kernel; lists them when no name is given.
    Reference { name: Option<String> },
    /// Run the self-check suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Shift every kernel value by this amount before checking.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
}

pub fn load_config(path: Option<&Path>, overrides: Overrides) -> Result<JobConfig, CliError> {
    let mut cfg = match path {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<Value, CliError> {
    let cfg = load_config(cli.config.as_deref(), cli.overrides)?;
    match cli.command {
        Command::Verify { suite, perturb } => {
            let report = verify::run(&cfg, suite, perturb)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            write_json(&report, &cfg.output_dir.join("verify.json"))?;
            let value = serde_json::to_value(&report).expect("report serializes");
            report.into_result()?;
            Ok(value)
        }
        Command::Reference { name: None } => Ok(json!(REFERENCE_KERNELS
            .iter()
            .map(|r| json!({"name": r.name, "h": r.h, "q": r.q_description, "a_max": r.a_max}))
            .collect::<Vec<_>>())),
        command => {
            std::fs::create_dir_all(&cfg.output_dir)?;
            let job = Job {
                cfg: &cfg,
                grid: Grid::new(cfg.a, cfg.n_points)?,
            };
            match command {
                Command::Kernel => job.kernel(),
                Command::Apply {
                    kernel,
                    input,
                    function,
                    inverse,
                } => job.apply(
                    kernel.as_deref(),
                    input.as_deref(),
                    function.as_deref(),
                    inverse,
                ),
                Command::Darboux { rungs, slopes } => job.darboux(rungs, slopes),
                Command::FormalPowers { x0 } => job.formal_powers(x0),
                Command::Spps { lambda } => job.spps(lambda.0),
                Command::Dirac => job.dirac(),
                Command::Reference { name: Some(name) } => job.reference(&name),
                Command::Reference { name: None } | Command::Verify { .. } => unreachable!(),
            }
        }
    }
}

fn str_refs(s: &[String]) -> Vec<&str> {
    s.iter().map(String::as_str).collect()
}

struct Job<'a> {
    cfg: &'a JobConfig,
    grid: Grid,
}

impl Job<'_> {
    fn options(&self) -> GoursatOptions {
        GoursatOptions {
            m_points: self.cfg.m_points,
            tol: self.cfg.tol,
            max_iter: self.cfg.max_iter,
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn q(&self) -> Result<Samples, CliError> {
        sample_potential(&self.cfg.potential, self.grid)
    }

    fn h(&self) -> C {
        self.cfg.h.0
    }

    fn write_kernel(
        &self,
        stem: &str,
        kernel: &TransmutationKernel,
        meta: &KernelMeta,
    ) -> Result<Vec<String>, CliError> {
        match self.cfg.format {
            OutputFormat::Csv => {
                let csv = self.path(&format!("{stem}.csv"));
                write_kernel_csv(kernel, create(&csv)?)?;
                let meta_file = meta_path(&csv);
                write_json(meta, &meta_file)?;
                Ok(vec![
                    csv.display().to_string(),
                    meta_file.display().to_string(),
                ])
            }
            OutputFormat::Json => {
                let file = self.path(&format!("{stem}.json"));
                let nodes = kernel.grid().nodes();
                let k: Vec<Vec<[f64; 2]>> = kernel
                    .values()
                    .rows()
                    .into_iter()
                    .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
                    .collect();
                let kt: Option<Vec<Vec<[f64; 2]>>> = kernel.kt().map(|kt| {
                    kt.rows()
                        .into_iter()
                        .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
                        .collect()
                });
                write_json(
                    &json!({"meta": meta, "nodes": nodes, "K": k, "Kt": kt}),
                    &file,
                )?;
                Ok(vec![file.display().to_string()])
            }
        }
    }

    fn write_curves(
        &self,
        stem: &str,
        names: &[&str],
        curves: &[&Samples],
    ) -> Result<String, CliError> {
        match self.cfg.format {
            OutputFormat::Csv => {
                let file = self.path(&format!("{stem}.csv"));
                if curves.len() == 1 {
                    write_curve_csv(curves[0], create(&file)?)?;
                } else {
                    let cols: Vec<Samples> = curves.iter().map(|&c| c.clone()).collect();
                    write_table_csv(names, &cols, create(&file)?)?;
                }
                Ok(file.display().to_string())
            }
            OutputFormat::Json => {
                let file = self.path(&format!("{stem}.json"));
                let mut obj = serde_json::Map::new();
                obj.insert("x".into(), json!(self.grid.nodes()));
                for (name, c) in names.iter().zip(curves) {
                    let v: Vec<[f64; 2]> = c.values().iter().map(|v| [v.re, v.im]).collect();
                    obj.insert((*name).to_string(), json!(v));
                }
                write_json(&Value::Object(obj), &file)?;
                Ok(file.display().to_string())
            }
        }
    }

    fn kernel(&self) -> Result<Value, CliError> {
        let q = self.q()?;
        let field = solve_goursat(&q, self.h(), &self.options())?;
        let kernel = kernel_from_field(&field)?;
        let mut meta = KernelMeta::describe(&kernel, self.cfg.potential.name());
        meta.iterations = Some(field.iterations_used());
        meta.residual = Some(field.residual());
        meta.goursat_residual = Some(goursat_residual(&kernel, &q)?);
        let files = self.write_kernel("kernel", &kernel, &meta)?;
        let reference_error = matching_reference(&self.cfg.potential, self.h())
            .filter(|r| self.cfg.a < r.a_max)
            .map(|r| json!({"name": r.name, "max_error": kernel.max_error_against(r.kernel)}));
        Ok(json!({"meta": meta, "reference": reference_error, "files": files}))
    }

    fn apply(
        &self,
        kernel_file: Option<&Path>,
        input: Option<&Path>,
        function: Option<&str>,
        inverse: bool,
    ) -> Result<Value, CliError> {
        let kernel = match kernel_file {
            Some(path) => {
                let meta_file = meta_path(path);
                let h = if meta_file.exists() {
                    let text = std::fs::read_to_string(&meta_file)?;
                    let meta: KernelMeta = serde_json::from_str(&text)
                        .map_err(|e| CliError::Io(format!("bad kernel metadata: {e}")))?;
                    C::new(meta.h[0], meta.h[1])
                } else {
                    self.h()
                };
                read_kernel_csv(open(path)?, h)?
            }
            None => transmutant::solve_kernel(&self.q()?, self.h(), &self.options())?,
        };
        let grid = *kernel.grid();
        let u = match (input, function) {
            (Some(path), _) => read_curve_csv(open(path)?, grid)?,
            (None, Some(spec)) => sample_function(spec, grid)?,
            (None, None) => {
                return Err(CliError::Config("apply needs --input or --function".into()))
            }
        };
        let out = if inverse {
            kernel.apply_inverse(&u)?
        } else {
            kernel.apply(&u)?
        };
        let stem = if inverse { "apply_inverse" } else { "apply" };
        let file = self.write_curves(stem, &["value"], &[&out])?;
        Ok(
            json!({"inverse": inverse, "n_points": grid.len(), "a": grid.half_width(), "files": [file]}),
        )
    }

    fn darboux(&self, rungs: usize, slopes: Option<Vec<ComplexValue>>) -> Result<Value, CliError> {
        let slopes: Vec<C> = match slopes {
            Some(s) => s.into_iter().map(|c| c.0).collect(),
            None => default_slopes(&self.cfg.potential, rungs),
        };
        let q = self.q()?;
        let k0 = transmutant::solve_kernel(&q, self.h(), &self.options())?;
        let ladder = darboux_ladder(&q, &k0, &slopes)?;
        let mut summary = Vec::new();
        for (r, rung) in ladder.iter().enumerate() {
            let stem = format!("darboux_{}", r + 1);
            let meta = KernelMeta::describe(&rung.kernel_out, self.cfg.potential.name());
            let mut files = self.write_kernel(&stem, &rung.kernel_out, &meta)?;
            files.push(self.write_curves(&format!("q_{}", r + 1), &["q"], &[rung.pair.q2()])?);
            summary.push(json!({
                "rung": r + 1,
                "slope": [slopes[r].re, slopes[r].im],
                "min_abs_f": rung.pair.p1().min_abs_f(),
                "goursat_residual": goursat_residual(&rung.kernel_out, rung.pair.q2())?,
                "files": files,
            }));
        }
        Ok(json!({"rungs": summary}))
    }

    fn formal_powers(&self, x0: f64) -> Result<Value, CliError> {
        let q = self.q()?;
        let p = Potential::from_initial_slope(&q, self.h())?;
        let table = build_table(&p, x0, self.cfg.k_max)?;
        let names: Vec<String> = (0..=self.cfg.k_max).map(|k| format!("phi{k}")).collect();
        let psi_names: Vec<String> = (0..=self.cfg.k_max).map(|k| format!("psi{k}")).collect();
        let phis: Vec<&Samples> = table.phis().iter().collect();
        let psis: Vec<&Samples> = table.psis().iter().collect();
        let f1 = self.write_curves("phi", &str_refs(&names), &phis)?;
        let f2 = self.write_curves("psi", &str_refs(&psi_names), &psis)?;
        Ok(json!({
            "k_max": self.cfg.k_max,
            "x0": x0,
            "min_abs_f": p.min_abs_f(),
            "solution_residual": p.residual(),
            "files": [f1, f2],
        }))
    }

    fn spps(&self, lambda: C) -> Result<Value, CliError> {
        let q = self.q()?;
        let p = Potential::from_initial_slope(&q, self.h())?;
        let (u1, u2) = spps_solution(&p, lambda, self.cfg.k_max)?;
        let file = self.write_curves("spps", &["u1", "u2"], &[&u1, &u2])?;
        Ok(json!({"lambda": [lambda.re, lambda.im], "k_max": self.cfg.k_max, "files": [file]}))
    }

    fn dirac(&self) -> Result<Value, CliError> {
        let spec = &self.cfg.dirac;
        let scalar = sample_scalar(&spec.scalar, spec.mass, self.grid)?;
        let energies: Vec<C> = spec.energies.iter().map(|e| e.0).collect();
        let cfg = DiracConfig::new(spec.mass, scalar, energies.clone())?;
        let tr = dirac_kernels(&cfg, &self.options())?;
        let [c1, c2] = spec.coefficients;
        let mut out = Vec::new();
        for (idx, &e) in energies.iter().enumerate() {
            let u = free_dirac_solution(e, c1.0, c2.0, self.grid);
            let psi = dirac_transmute(&tr.k1, &tr.k2, &u)?;
            let file = match self.cfg.format {
                OutputFormat::Csv => {
                    let file = self.path(&format!("dirac_E{idx}.csv"));
                    write_spinor_csv(&psi.psi1, &psi.psi2, create(&file)?)?;
                    file.display().to_string()
                }
                OutputFormat::Json => self.write_curves(
                    &format!("dirac_E{idx}"),
                    &["psi1", "psi2"],
                    &[&psi.psi1, &psi.psi2],
                )?,
            };
            out.push(json!({
                "energy": [e.re, e.im],
                "residual": dirac_residual(&cfg, &psi, e),
                "file": file,
            }));
        }
        Ok(json!({"mass": spec.mass, "h": [tr.k1.h().re, tr.k1.h().im], "energies": out}))
    }

    fn reference(&self, name: &str) -> Result<Value, CliError> {
        let r = transmutant::reference_kernel(name)
            .ok_or_else(|| CliError::Config(format!("unknown reference kernel {name:?}")))?;
        if self.cfg.a >= r.a_max {
            return Err(CliError::Config(format!("{name} needs a < {}", r.a_max)));
        }
        let kernel = r.sample(self.grid);
        let meta = KernelMeta::describe(&kernel, name);
        let files = self.write_kernel(&format!("reference_{name}"), &kernel, &meta)?;
        Ok(json!({"name": name, "h": r.h, "q": r.q_description, "files": files}))
    }
}
