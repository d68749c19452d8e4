//! Kernels known in closed form and the modified Bessel functions they need.

use num_complex::Complex64;

use crate::grid::Grid;
use crate::kernel::{Provenance, TransmutationKernel};
use crate::quadrature;

type C = Complex64;

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// `Σ (z/2)^{2k+ν} / (k! (k+ν)!)` until the terms drop below 1e-17 of the sum.
fn bessel_series(nu: u32, z: C) -> C {
    let half = z * 0.5;
    let quarter = half * half;
    let mut term = (0..nu).fold(re(1.0), |acc, k| acc * half / f64::from(k + 1));
    let mut sum = term;
    for k in 1..500 {
        term *= quarter / (f64::from(k) * f64::from(k + nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Power series; the terms grow like `e^|z|`, so precision is lost where `|I_0(z)|` is much
/// smaller than that (large `|Im z|`).
pub fn bessel_i0(z: C) -> C {
    bessel_series(0, z)
}

pub fn bessel_i1(z: C) -> C {
    bessel_series(1, z)
}

/// `I_0(z)` and `I_1(z)` by downward recurrence `I_{k-1} = (2k/z) I_k + I_{k+1}`,
/// normalized with `e^z = I_0 + 2 Σ_{k≥1} I_k`.
///
/// For `Re z < 0` the sum cancels to the tiny `e^z`, so `I_0(z) = I_0(-z)`,
/// `I_1(z) = -I_1(-z)` are used instead.
pub fn bessel_i01_miller(z: C) -> (C, C) {
    if z.norm() == 0.0 {
        return (re(1.0), re(0.0));
    }
    if z.re < 0.0 {
        let (i0, i1) = bessel_i01_miller(-z);
        return (i0, -i1);
    }
    let start = 2 * ((z.norm() as usize) + 30);
    let (mut above, mut current) = (re(0.0), re(1e-30));
    let mut total = re(0.0);
    let mut i1 = re(0.0);
    for k in (1..=start).rev() {
        let below = current * (2.0 * k as f64) / z + above;
        total += current * 2.0;
        if k == 1 {
            i1 = current;
        }
        above = current;
        current = below;
        if current.norm() > 1e250 {
            above /= 1e250;
            current /= 1e250;
            total /= 1e250;
            i1 /= 1e250;
        }
    }
    total += current;
    let scale = z.exp() / total;
    (current * scale, i1 * scale)
}

/// `G(z) = I₁(√z)/√z = Σ z^k / (2·4^k k! (k+1)!)`, entire in `z`.
pub fn bessel_ratio(z: C) -> C {
    let mut term = re(0.5);
    let mut sum = term;
    for k in 1..500 {
        let k = k as f64;
        term *= z / (4.0 * k * (k + 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `G'(z) = Σ_{k≥1} k z^{k-1} / (2·4^k k! (k+1)!)`.
pub fn bessel_ratio_derivative(z: C) -> C {
    // G'(z) = Σ_{j≥0} z^j / (2·4^{j+1} j! (j+2)!)
    let mut term = re(1.0 / 16.0);
    let mut sum = term;
    for j in 1..500 {
        let j = j as f64;
        term *= z / (4.0 * j * (j + 2.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `K₁(x,t;-1) = (t-1)/(2(x+1))` for `q = 2/(x+1)²`.
pub fn ref_rational_n1(x: f64, t: f64) -> C {
    re((t - 1.0) / (2.0 * (x + 1.0)))
}

/// `K₁(x,t;2) = (3x²+6x+4-3t²+2t)/(4(x+1))` for `q = 2/(x+1)²`.
pub fn ref_rational_n1_h2(x: f64, t: f64) -> C {
    re((3.0 * x * x + 6.0 * x + 4.0 - 3.0 * t * t + 2.0 * t) / (4.0 * (x + 1.0)))
}

/// `K₂(x,t;-2) = ((3t-1)(x+1)² - 3(t-1)²(t+1))/(4(x+1)²)` for `q = 6/(x+1)²`.
pub fn ref_rational_n2(x: f64, t: f64) -> C {
    let x1 = (x + 1.0).powi(2);
    re(((3.0 * t - 1.0) * x1 - 3.0 * (t - 1.0).powi(2) * (t + 1.0)) / (4.0 * x1))
}

/// `K(x,t;0) = ½ √(x²-t²) I₁(√(x²-t²)) / (x-t) = ½ (x+t) G(x²-t²)` for `q ≡ 1`.
pub fn ref_const_q1(x: f64, t: f64) -> C {
    bessel_ratio(re(x * x - t * t)) * (0.5 * (x + t))
}

fn const_q1_kt(x: f64, t: f64) -> C {
    let z = re(x * x - t * t);
    bessel_ratio(z) * 0.5 - bessel_ratio_derivative(z) * (t * (x + t))
}

/// Soliton integrand `½[-t I₀(w)/(s-t) + w I₁(w)/(s-t)²]`, `w = √(s²-t²)`.
///
/// Near `s = t` both terms blow up and cancel; there the equivalent
/// `G/2 - t(s+t)G'` form is used.
pub fn soliton_integrand(s: f64, t: f64) -> C {
    let d = s - t;
    let z = re(s * s - t * t);
    if d.abs() < 1e-4 {
        return bessel_ratio(z) * 0.5 - bessel_ratio_derivative(z) * (t * (s + t));
    }
    let w = z.sqrt();
    (bessel_i1(w) * w / (d * d) - bessel_i0(w) * (t / d)) * 0.5
}

const SOLITON_PANELS: usize = 8;
const SOLITON_ORDER: usize = 10;

/// `K₂(x,t;0) = -(1/cosh x) ∫_{-t}^x soliton_integrand(s,t) cosh s ds`
/// for `q = 1 - 2 sech² x`, by composite Gauss–Legendre quadrature.
pub fn ref_soliton(x: f64, t: f64) -> C {
    let (nodes, weights) = quadrature::gauss_legendre(SOLITON_ORDER);
    let (lo, hi) = (-t, x);
    let width = (hi - lo) / SOLITON_PANELS as f64;
    let mut acc = re(0.0);
    for p in 0..SOLITON_PANELS {
        let mid = lo + (p as f64 + 0.5) * width;
        for (r, w) in nodes.iter().zip(&weights) {
            let s = mid + 0.5 * width * r;
            acc += soliton_integrand(s, t) * (w * 0.5 * width * s.cosh());
        }
    }
    -acc / x.cosh()
}

/// A kernel known in closed form, with the potential it belongs to.
#[derive(Clone, Copy)]
pub struct ReferenceKernel {
    pub name: &'static str,
    pub h: f64,
    pub q_description: &'static str,
    /// Evaluators are finite on `|x|, |t| < a_max`.
    pub a_max: f64,
    pub q: fn(f64) -> f64,
    /// Nonvanishing solution of `f'' = q f` with `f(0) = 1`, `f'(0) = h`.
    pub f: fn(f64) -> f64,
    pub f_prime: fn(f64) -> f64,
    pub kernel: fn(f64, f64) -> C,
    pub kt: Option<fn(f64, f64) -> C>,
}

impl std::fmt::Debug for ReferenceKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceKernel")
            .field("name", &self.name)
            .field("h", &self.h)
            .field("q", &self.q_description)
            .field("a_max", &self.a_max)
            .finish()
    }
}

impl ReferenceKernel {
    pub fn sample(&self, grid: Grid) -> TransmutationKernel {
        let kernel = self.kernel;
        let kt = self.kt;
        let kt_fn = move |x: f64, t: f64| (kt.expect("checked"))(x, t);
        TransmutationKernel::from_fn(
            grid,
            re(self.h),
            kernel,
            kt.is_some()
                .then_some(&kt_fn as &(dyn Fn(f64, f64) -> C + Sync)),
            Provenance::ClosedForm,
        )
    }
}

fn sech2(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}

pub const REFERENCE_KERNELS: [ReferenceKernel; 5] = [
    ReferenceKernel {
        name: "rational_n1",
        h: -1.0,
        q_description: "2/(x+1)^2",
        a_max: 1.0,
        q: |x| 2.0 / (x + 1.0).powi(2),
        f: |x| 1.0 / (x + 1.0),
        f_prime: |x| -1.0 / (x + 1.0).powi(2),
        kernel: ref_rational_n1,
        kt: Some(|x, _| re(1.0 / (2.0 * (x + 1.0)))),
    },
    ReferenceKernel {
        name: "rational_n1_h2",
        h: 2.0,
        q_description: "2/(x+1)^2",
        a_max: 1.0,
        q: |x| 2.0 / (x + 1.0).powi(2),
        f: |x| (x + 1.0).powi(2),
        f_prime: |x| 2.0 * (x + 1.0),
        kernel: ref_rational_n1_h2,
        kt: Some(|x, t| re((2.0 - 6.0 * t) / (4.0 * (x + 1.0)))),
    },
    ReferenceKernel {
        name: "rational_n2",
        h: -2.0,
        q_description: "6/(x+1)^2",
        a_max: 1.0,
        q: |x| 6.0 / (x + 1.0).powi(2),
        f: |x| 1.0 / (x + 1.0).powi(2),
        f_prime: |x| -2.0 / (x + 1.0).powi(3),
        kernel: ref_rational_n2,
        kt: Some(|x, t| {
            let x1 = (x + 1.0).powi(2);
            re((3.0 * x1 - 3.0 * (t - 1.0) * (3.0 * t + 1.0)) / (4.0 * x1))
        }),
    },
    ReferenceKernel {
        name: "const_q1",
        h: 0.0,
        q_description: "1",
        a_max: f64::INFINITY,
        q: |_| 1.0,
        f: f64::cosh,
        f_prime: f64::sinh,
        kernel: ref_const_q1,
        kt: Some(const_q1_kt),
    },
    ReferenceKernel {
        name: "soliton",
        h: 0.0,
        q_description: "1 - 2 sech^2 x",
        a_max: f64::INFINITY,
        q: |x| 1.0 - 2.0 * sech2(x),
        f: |x| 1.0 / x.cosh(),
        f_prime: |x| -x.tanh() / x.cosh(),
        kernel: ref_soliton,
        kt: None,
    },
];

pub fn reference_kernel(name: &str) -> Option<&'static ReferenceKernel> {
    REFERENCE_KERNELS.iter().find(|k| k.name == name)
}
