//! Acceptance suite: one PASS/FAIL line per criterion with pinned tolerances.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use transmutant::{
    build_table, commutation_residuals, darboux_kernel, darboux_kernel_triangle, darboux_ladder,
    darboux_transform, dirac_kernels, dirac_residual, dirac_transmute, dirac_untransmute,
    free_dirac_solution, generalized_derivative, goursat_residual, reference_kernel,
    reparametrize_h, solve_kernel, spps_solution, transmutation_identity_residual,
    verify_power_mapping, verify_psi_mapping, DiracConfig, GoursatOptions, Grid, Potential,
    Samples, Spinor, TransmutationKernel,
};

type C = Complex64;

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

struct Outcome {
    lines: Vec<String>,
    failed: usize,
}

impl Outcome {
    /// Passes when every `(label, value, tolerance)` has `value <= tolerance`; NaN fails.
    fn record(&mut self, id: usize, title: &str, parts: &[(String, f64, f64)]) {
        let pass = parts.iter().all(|(_, v, tol)| *v <= *tol);
        if !pass {
            self.failed += 1;
        }
        let detail: Vec<String> = parts
            .iter()
            .map(|(label, v, tol)| format!("{label}={v:.3e} (tol {tol:.0e})"))
            .collect();
        let line = format!(
            "{} {id:>2} {title}: {}",
            if pass { "PASS" } else { "FAIL" },
            detail.join(", ")
        );
        println!("{line}");
        self.lines.push(line);
    }
}

fn part(label: impl Into<String>, value: f64, tol: f64) -> (String, f64, f64) {
    (label.into(), value, tol)
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> (T, f64) {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    pool.install(|| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64())
    })
}

fn options(m: usize) -> GoursatOptions {
    GoursatOptions {
        m_points: Some(m),
        ..GoursatOptions::default()
    }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc, v| if v.is_nan() { f64::NAN } else { acc.max(v) })
}

/// Test potentials: name, reference entry, half-width.
const POTENTIALS: [(&str, &str, f64); 4] = [
    ("rational n=1", "rational_n1", 0.5),
    ("rational n=2", "rational_n2", 0.5),
    ("const q=1", "const_q1", 1.0),
    ("soliton", "soliton", 1.0),
];

struct Case {
    label: &'static str,
    q: Samples,
    potential: Potential,
    kernel: TransmutationKernel,
}

fn case(label: &'static str, reference: &str, a: f64, n: usize) -> Case {
    let r = reference_kernel(reference).unwrap();
    let grid = Grid::new(a, n).unwrap();
    let q = Samples::from_real_fn(grid, r.q);
    let potential = Potential::from_initial_slope(&q, re(r.h)).unwrap();
    let kernel = solve_kernel(&q, re(r.h), &GoursatOptions::default()).unwrap();
    Case {
        label,
        q,
        potential,
        kernel,
    }
}

fn rational_oracle(out: &mut Outcome) {
    let r = reference_kernel("rational_n1").unwrap();
    let grid = Grid::new(0.5, 401).unwrap();
    let q = Samples::from_real_fn(grid, r.q);
    let (kernel, secs) = single_threaded(|| solve_kernel(&q, re(-1.0), &options(401)).unwrap());
    out.record(
        1,
        "rational kernel oracle (q=2/(x+1)^2, h=-1, a=0.5, m=401)",
        &[
            part("max_err", kernel.max_error_against(r.kernel), 1e-6),
            part("seconds", secs, 5.0),
        ],
    );
}

fn bessel_oracle(out: &mut Outcome) {
    let r = reference_kernel("const_q1").unwrap();
    let grid = Grid::new(1.0, 401).unwrap();
    let q = Samples::from_real_fn(grid, r.q);
    let (kernel, secs) = single_threaded(|| solve_kernel(&q, re(0.0), &options(401)).unwrap());
    // The printed expression carries the opposite overall sign; report the distance to it.
    let printed = kernel.max_error_against(|x, t| -(r.kernel)(x, t));
    println!("     2 note: distance to the sign-flipped expression = {printed:.3e}");
    out.record(
        2,
        "Bessel kernel oracle (q=1, h=0, a=1, m=401)",
        &[
            part("max_err", kernel.max_error_against(r.kernel), 1e-6),
            part("seconds", secs, 10.0),
        ],
    );
}

fn reparametrization_oracle(out: &mut Outcome) {
    let grid = Grid::new(0.5, 401).unwrap();
    let k1 = reference_kernel("rational_n1").unwrap().sample(grid);
    let moved = reparametrize_h(&k1, re(2.0));
    let target = reference_kernel("rational_n1_h2").unwrap();
    out.record(
        3,
        "h-reparametrization -1 -> 2 of the rational kernel",
        &[part(
            "max_err",
            moved.max_error_against(target.kernel),
            1e-7,
        )],
    );
}

fn darboux_oracle(out: &mut Outcome) {
    let grid = Grid::new(0.5, 401).unwrap();
    let source = reference_kernel("rational_n1_h2").unwrap();
    let k1 = source.sample(grid);
    let q = Samples::from_real_fn(grid, source.q);
    let f = Samples::from_real_fn(grid, source.f);
    let pair = darboux_transform(&Potential::from_solution(&q, &f).unwrap()).unwrap();
    let k2 = darboux_kernel(&k1, &pair).unwrap();
    let target = reference_kernel("rational_n2").unwrap();
    let triangle = darboux_kernel_triangle(&k1, &pair).unwrap();
    let c = grid.center();
    let n = grid.len();
    let gap = worst(
        (c + 1..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, t) = (grid.node(i), grid.node(j));
                if t.abs() <= x {
                    (triangle.at(i, j) - k2.at(i, j)).norm()
                } else {
                    0.0
                }
            }),
    );
    out.record(
        4,
        "Darboux kernel from K1(x,t;2) with f=(x+1)^2",
        &[
            part("max_err", k2.max_error_against(target.kernel), 1e-7),
            part("triangle_vs_square", gap, 1e-6),
        ],
    );
}

fn worked_example(out: &mut Outcome) {
    let grid = Grid::new(0.5, 401).unwrap();
    let r = reference_kernel("rational_n1").unwrap();
    let q = Samples::from_real_fn(grid, r.q);
    let kernel = solve_kernel(&q, re(-1.0), &GoursatOptions::default()).unwrap();
    let table = build_table(
        &Potential::from_initial_slope(&q, re(-1.0)).unwrap(),
        0.0,
        2,
    )
    .unwrap();
    let cases: [(&str, Samples, Samples); 4] = [
        (
            "T[1]",
            Samples::from_real_fn(grid, |_| 1.0),
            Samples::from_real_fn(grid, |x| 1.0 / (x + 1.0)),
        ),
        (
            "T[x]",
            Samples::from_real_fn(grid, |x| x),
            Samples::from_real_fn(grid, |x| {
                (x * x * x + 3.0 * x * x + 3.0 * x) / (3.0 * (x + 1.0))
            }),
        ),
        (
            "T[cos]",
            Samples::from_real_fn(grid, f64::cos),
            Samples::from_real_fn(grid, |x| x.cos() - x.sin() / (x + 1.0)),
        ),
        (
            "T[x^2]",
            Samples::from_real_fn(grid, |x| x * x),
            table.phi(2).clone(),
        ),
    ];
    let mut parts = Vec::new();
    let mut inverse = 0.0_f64;
    for (label, u, expected) in &cases {
        let image = kernel.apply(u).unwrap();
        parts.push(part(*label, image.max_diff(expected), 1e-7));
        inverse = inverse.max(kernel.apply_inverse(&image).unwrap().max_diff(u));
    }
    parts.push(part("inverse", inverse, 1e-7));
    out.record(5, "worked example T_{-1} on 1, x, cos x, x^2", &parts);
}

fn power_mapping(out: &mut Outcome, cases: &[Case]) {
    let mut parts = Vec::new();
    for c in cases {
        let table = build_table(&c.potential, 0.0, 6).unwrap();
        let phi = worst((0..=6).map(|k| verify_power_mapping(&c.kernel, &table, k).unwrap()));
        let pair = darboux_transform(&c.potential).unwrap();
        let k2 = darboux_kernel(&c.kernel, &pair).unwrap();
        let psi = worst((0..=6).map(|k| verify_psi_mapping(&k2, &table, k).unwrap()));
        parts.push(part(format!("{} phi", c.label), phi, 1e-6));
        parts.push(part(format!("{} psi", c.label), psi, 1e-6));
    }
    out.record(
        6,
        "powers map to phi_k (T_h) and psi_k (T_2), k=0..6",
        &parts,
    );
}

fn identity(out: &mut Outcome) {
    type Fns = (&'static str, fn(f64) -> f64, fn(f64) -> f64);
    let functions: [Fns; 4] = [
        ("x^2", |x| x * x, |_| 2.0),
        ("x^3", |x| x * x * x, |x| 6.0 * x),
        ("cos2x", |x| (2.0 * x).cos(), |x| -4.0 * (2.0 * x).cos()),
        ("e^x", f64::exp, f64::exp),
    ];
    let mut coarse = 0.0_f64;
    let mut min_ratio = f64::INFINITY;
    for (_, name, a) in POTENTIALS {
        let residuals: Vec<Vec<f64>> = [401, 801]
            .into_iter()
            .map(|n| {
                let c = case("", name, a, n);
                let grid = *c.q.grid();
                functions
                    .iter()
                    .map(|(_, u, u2)| {
                        let u = Samples::from_real_fn(grid, *u);
                        let u2 = Samples::from_real_fn(grid, *u2);
                        transmutation_identity_residual(&c.kernel, &c.q, &u, &u2).unwrap()
                    })
                    .collect()
            })
            .collect();
        for (r401, r801) in residuals[0].iter().zip(&residuals[1]) {
            coarse = coarse.max(*r401);
            min_ratio = min_ratio.min(r401 / r801);
        }
    }
    out.record(
        7,
        "transmutation identity on x^2, x^3, cos 2x, e^x, all potentials",
        &[
            part("residual_n401", coarse, 5e-4),
            // Written as 1/ratio so that the common "value <= tol" test applies.
            part("inverse_refinement_ratio", 1.0 / min_ratio, 1.0 / 3.0),
        ],
    );
}

fn commutation(out: &mut Outcome, cases: &[Case]) {
    let mut parts = Vec::new();
    let mut gamma = 0.0_f64;
    for c in cases
        .iter()
        .filter(|c| c.label.starts_with("rational") || c.label == "soliton")
    {
        let grid = *c.q.grid();
        let pair = darboux_transform(&c.potential).unwrap();
        let k2 = darboux_kernel(&c.kernel, &pair).unwrap();
        let u = Samples::from_real_fn(grid, |x| (2.0 * x).cos() + x * x * x);
        let (r1, r2) = commutation_residuals(&c.kernel, &k2, &pair, &u).unwrap();
        parts.push(part(format!("{} commutation", c.label), r1.max(r2), 5e-4));

        let derivatives: [fn(f64) -> f64; 4] = [
            |x| (2.0 * x).cos() + x * x * x,
            |x| -2.0 * (2.0 * x).sin() + 3.0 * x * x,
            |x| -4.0 * (2.0 * x).cos() + 6.0 * x,
            |x| 8.0 * (2.0 * x).sin() + 6.0,
        ];
        let f = pair.f();
        let g = c.kernel.apply(&u).unwrap().zip_map(f, |v, fv| v / fv);
        for (k, dk) in derivatives.iter().enumerate().skip(1) {
            let uk = Samples::from_real_fn(grid, *dk);
            let expected = if k % 2 == 1 {
                f * &k2.apply(&uk).unwrap()
            } else {
                c.kernel.apply(&uk).unwrap().zip_map(f, |v, fv| v / fv)
            };
            let got = generalized_derivative(&pair, &g, k);
            gamma = gamma.max(got.max_diff_interior(&expected, 2 * k));
        }
    }
    parts.push(part("gamma_k k=1..3", gamma, 5e-3));
    out.record(
        8,
        "commutation relations and generalized derivatives",
        &parts,
    );
}

fn ode_residual(u: &Samples, q: &Samples, lambda: C) -> f64 {
    let v = u.values();
    let n = v.len();
    let inv = 1.0 / (12.0 * u.grid().spacing().powi(2));
    worst((2..n - 2).map(|i| {
        let d2 = (-v[i - 2] + v[i - 1] * 16.0 - v[i] * 30.0 + v[i + 1] * 16.0 - v[i + 2]) * inv;
        (d2 - q.at(i) * v[i] - lambda * v[i]).norm()
    }))
}

fn spps(out: &mut Outcome) {
    let grid = Grid::new(1.0, 401).unwrap();
    let free = Potential::from_initial_slope(&Samples::constant(grid, re(0.0)), re(0.0)).unwrap();
    let (c, s) = spps_solution(&free, re(-1.0), 40).unwrap();
    let trig = c
        .max_diff(&Samples::from_real_fn(grid, f64::cos))
        .max(s.max_diff(&Samples::from_real_fn(grid, f64::sin)));

    let grid = Grid::new(0.5, 401).unwrap();
    let r = reference_kernel("rational_n1").unwrap();
    let q = Samples::from_real_fn(grid, r.q);
    let p = Potential::from_initial_slope(&q, re(-1.0)).unwrap();
    let (u1, _) = spps_solution(&p, re(-1.0), 40).unwrap();
    let rational = u1.max_diff(&Samples::from_real_fn(grid, |x| {
        x.cos() - x.sin() / (x + 1.0)
    }));
    let residual = worst([-4.0, -1.0, 1.0].into_iter().flat_map(|l| {
        let (u1, u2) = spps_solution(&p, re(l), 40).unwrap();
        [ode_residual(&u1, &q, re(l)), ode_residual(&u2, &q, re(l))]
    }));
    out.record(
        9,
        "SPPS solutions",
        &[
            part("q=0 cos/sin", trig, 1e-10),
            part("rational lambda=-1", rational, 1e-8),
            part("ode_residual", residual, 5e-4),
        ],
    );
}

fn dirac(out: &mut Outcome) {
    let grid = Grid::new(1.0, 401).unwrap();
    let cfg = DiracConfig::new(
        1.0,
        Samples::constant(grid, re(0.0)),
        vec![re(1.0), re(2.0)],
    )
    .unwrap();
    let tr = dirac_kernels(&cfg, &GoursatOptions::default()).unwrap();
    let mut residual = 0.0_f64;
    let mut round_trip = 0.0_f64;
    for &e in cfg.energies() {
        let u = free_dirac_solution(e, re(1.0), re(0.5), grid);
        let psi = dirac_transmute(&tr.k1, &tr.k2, &u).unwrap();
        residual = residual.max(dirac_residual(&cfg, &psi, e));
        round_trip = round_trip.max(
            dirac_untransmute(&tr.k1, &tr.k2, &psi)
                .unwrap()
                .max_diff(&u),
        );
    }
    let zero_mode = Spinor::new(tr.pair.f().clone(), Samples::constant(grid, re(0.0))).unwrap();
    out.record(
        10,
        "Dirac system, S=0, m=1, E in {1, 2}",
        &[
            part("residual", residual, 5e-4),
            part("round_trip", round_trip, 1e-6),
            part("zero_mode", dirac_residual(&cfg, &zero_mode, re(0.0)), 5e-5),
        ],
    );
}

fn ladder(out: &mut Outcome) {
    let grid = Grid::new(0.5, 401).unwrap();
    let q0 = Samples::constant(grid, re(0.0));
    let rungs = darboux_ladder(
        &q0,
        &TransmutationKernel::zero(grid),
        &[re(1.0), re(2.0), re(3.0)],
    )
    .unwrap();
    let q3 = Samples::from_real_fn(grid, |x| 12.0 / (x + 1.0).powi(2));
    let pde = goursat_residual(&rungs[2].kernel_out, &q3).unwrap();
    let r1 = reference_kernel("rational_n1").unwrap();
    let r1h2 = reference_kernel("rational_n1_h2").unwrap();
    let r2 = reference_kernel("rational_n2").unwrap();
    out.record(
        11,
        "three-rung Darboux ladder from q=0",
        &[
            part(
                "rung1_vs_K1",
                rungs[0].kernel_out.max_error_against(r1.kernel),
                1e-6,
            ),
            part(
                "rung2_in_vs_K1(h=2)",
                rungs[1].kernel_in.max_error_against(r1h2.kernel),
                1e-7,
            ),
            part(
                "rung2_vs_K2",
                rungs[1].kernel_out.max_error_against(r2.kernel),
                1e-7,
            ),
            part("rung3_goursat_residual", pde, 5e-4),
        ],
    );
}

fn determinism(out: &mut Outcome) {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let output = Command::new(env!("CARGO_BIN_EXE_transmutant"))
            .args(["verify", "--output-dir"])
            .arg(dir.path())
            .output()
            .unwrap();
        let file = std::fs::read(dir.path().join("verify.json")).unwrap();
        (output.status.code(), output.stdout, file)
    };
    let (code_a, stdout_a, file_a) = run();
    let (code_b, stdout_b, file_b) = run();
    let identical =
        code_a == code_b && stdout_a == stdout_b && file_a == file_b && !file_a.is_empty();
    out.record(
        12,
        "verify twice gives byte-identical reports",
        &[
            part("differs", if identical { 0.0 } else { 1.0 }, 0.0),
            part("verify_exit", f64::from(code_a.unwrap_or(-1)), 0.0),
        ],
    );
}

fn main() {
    let mut out = Outcome {
        lines: Vec::new(),
        failed: 0,
    };
    rational_oracle(&mut out);
    bessel_oracle(&mut out);
    reparametrization_oracle(&mut out);
    darboux_oracle(&mut out);
    worked_example(&mut out);
    let cases: Vec<Case> = POTENTIALS
        .iter()
        .map(|&(label, name, a)| case(label, name, a, 401))
        .collect();
    power_mapping(&mut out, &cases);
    identity(&mut out);
    commutation(&mut out, &cases);
    spps(&mut out);
    dirac(&mut out);
    ladder(&mut out);
    determinism(&mut out);
    println!(
        "acceptance: {} of {} criteria passed",
        out.lines.len() - out.failed,
        out.lines.len()
    );
    if out.failed > 0 {
        std::process::exit(1);
    }
}
