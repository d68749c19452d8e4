//! Slice-level rules on uniform nodes.
//!
//! Everything here works on plain slices so the same code serves 1D samples,
//! kernel rows and the masked segments of the characteristic diamond.

use num_complex::Complex64;

type C = Complex64;

const CUBIC_FIRST: [f64; 4] = [9.0, 19.0, -5.0, 1.0];
const CUBIC_MIDDLE: [f64; 4] = [-1.0, 13.0, 13.0, -1.0];
const CUBIC_LAST: [f64; 4] = [1.0, -5.0, 19.0, 9.0];

/// Quintic weights (×1440) for the interval starting at stencil offset 0..=4.
const QUINTIC: [[f64; 6]; 5] = [
    [475.0, 1427.0, -798.0, 482.0, -173.0, 27.0],
    [-27.0, 637.0, 1022.0, -258.0, 77.0, -11.0],
    [11.0, -93.0, 802.0, 802.0, -93.0, 11.0],
    [-11.0, 77.0, -258.0, 1022.0, 637.0, -27.0],
    [27.0, -173.0, 482.0, -798.0, 1427.0, 475.0],
];

/// Integral over the single interval `[k, k + 1]` from the local quintic through
/// six neighbouring nodes (a cubic or lower when the slice is shorter).
fn interval_integral(values: &[C], step: f64, k: usize) -> C {
    let len = values.len();
    debug_assert!(k + 1 < len);
    match len {
        2 => (values[0] + values[1]) * (0.5 * step),
        3 => {
            let w = if k == 0 {
                [5.0, 8.0, -1.0]
            } else {
                [-1.0, 8.0, 5.0]
            };
            (values[0] * w[0] + values[1] * w[1] + values[2] * w[2]) * (step / 12.0)
        }
        4 | 5 => {
            let start = k.saturating_sub(1).min(len - 4);
            let weights = match k - start {
                0 => &CUBIC_FIRST,
                1 => &CUBIC_MIDDLE,
                _ => &CUBIC_LAST,
            };
            let s = &values[start..start + 4];
            (s[0] * weights[0] + s[1] * weights[1] + s[2] * weights[2] + s[3] * weights[3])
                * (step / 24.0)
        }
        _ => {
            let start = k.saturating_sub(2).min(len - 6);
            let w = &QUINTIC[k - start];
            let s = &values[start..start + 6];
            s.iter().zip(w).map(|(v, w)| v * w).sum::<C>() * (step / 1440.0)
        }
    }
}

/// Running integral `F[k] = ∫_{origin}^{k} values` on a uniform slice, `F[origin] = 0`.
///
/// Each interval uses the same local rule, so the O(step⁶) error is a
/// smooth function of the endpoint with no even/odd alternation.
pub fn cumulative(values: &[C], step: f64, origin: usize) -> Vec<C> {
    let len = values.len();
    assert!(
        origin < len,
        "origin {origin} outside slice of length {len}"
    );
    let mut out = vec![C::new(0.0, 0.0); len];
    for k in origin..len.saturating_sub(1) {
        out[k + 1] = out[k] + interval_integral(values, step, k);
    }
    for k in (0..origin).rev() {
        out[k] = out[k + 1] - interval_integral(values, step, k);
    }
    out
}

/// Composite Simpson over the whole slice. An odd interval count closes with
/// the 3/8 rule on the last three intervals.
pub fn simpson(values: &[C], step: f64) -> C {
    let intervals = values.len().saturating_sub(1);
    match intervals {
        0 => C::new(0.0, 0.0),
        1 => (values[0] + values[1]) * (0.5 * step),
        2 => (values[0] + values[1] * 4.0 + values[2]) * (step / 3.0),
        _ => {
            let simpson_part = if intervals.is_multiple_of(2) {
                intervals
            } else {
                intervals - 3
            };
            let mut acc = C::new(0.0, 0.0);
            if simpson_part > 0 {
                acc += values[0] + values[simpson_part];
                for (i, v) in values[1..simpson_part].iter().enumerate() {
                    acc += *v * if i % 2 == 0 { 4.0 } else { 2.0 };
                }
                acc *= step / 3.0;
            }
            if simpson_part < intervals {
                let s = &values[simpson_part..];
                acc += (s[0] + s[1] * 3.0 + s[2] * 3.0 + s[3]) * (3.0 * step / 8.0);
            }
            acc
        }
    }
}

/// Lagrange interpolation through `(xs[i], ys[i])` evaluated at `x`.
pub fn lagrange(xs: &[f64], ys: &[C], x: f64) -> C {
    let mut acc = C::new(0.0, 0.0);
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (xi - xj);
            }
        }
        acc += yi * w;
    }
    acc
}

/// `-v₋₂ + 16v₋₁ - 30v₀ + 16v₁ - v₂` with `v(d)` giving the node at offset `2 - d`;
/// divide by `12 step²` for a fourth-order second derivative.
pub fn second_difference4(v: impl Fn(usize) -> C) -> C {
    -v(0) + v(1) * 16.0 - v(2) * 30.0 + v(3) * 16.0 - v(4)
}

/// Fourth-order first derivative on a uniform slice (five-point stencils,
/// one-sided at the two nodes nearest each end).
pub fn derivative4(values: &[C], step: f64) -> Vec<C> {
    let n = values.len();
    assert!(
        n >= 5,
        "need at least 5 nodes for a fourth-order derivative"
    );
    let inv = 1.0 / (12.0 * step);
    let v = values;
    let mut out = vec![C::new(0.0, 0.0); n];
    out[0] = (v[0] * -25.0 + v[1] * 48.0 - v[2] * 36.0 + v[3] * 16.0 - v[4] * 3.0) * inv;
    out[1] = (v[0] * -3.0 - v[1] * 10.0 + v[2] * 18.0 - v[3] * 6.0 + v[4]) * inv;
    for i in 2..n - 2 {
        out[i] = (v[i - 2] - v[i - 1] * 8.0 + v[i + 1] * 8.0 - v[i + 2]) * inv;
    }
    let m = n - 1;
    out[m] =
        (v[m] * 25.0 - v[m - 1] * 48.0 + v[m - 2] * 36.0 - v[m - 3] * 16.0 + v[m - 4] * 3.0) * inv;
    out[m - 1] = (v[m] * 3.0 + v[m - 1] * 10.0 - v[m - 2] * 18.0 + v[m - 3] * 6.0 - v[m - 4]) * inv;
    out
}

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else { p1 };
            dp = n * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}
