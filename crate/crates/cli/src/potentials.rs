//! Builtin potentials sampled on the job grid.

use std::str::FromStr;

use num_complex::Complex64;
use transmutant::{monomial, reference_kernel, Grid, ReferenceKernel, Samples};

use crate::config::{ComplexValue, PotentialSpec, ScalarSpec};
use crate::error::CliError;
use crate::export::{open, read_curve_csv};

type C = Complex64;

pub fn sample_potential(spec: &PotentialSpec, grid: Grid) -> Result<Samples, CliError> {
    Ok(match spec {
        PotentialSpec::Zero => Samples::constant(grid, C::new(0.0, 0.0)),
        PotentialSpec::RationalN { order } => {
            let c = f64::from(order * (order + 1));
            Samples::from_real_fn(grid, |x| c / (x + 1.0).powi(2))
        }
        PotentialSpec::ConstQ { q } => Samples::constant(grid, q.0),
        PotentialSpec::Soliton => Samples::from_real_fn(grid, |x| 1.0 - 2.0 / x.cosh().powi(2)),
        PotentialSpec::File { path } => read_curve_csv(open(path)?, grid)?,
    })
}

/// Closed-form kernel matching the potential and `h`, when one is known.
pub fn matching_reference(spec: &PotentialSpec, h: C) -> Option<&'static ReferenceKernel> {
    if h.im != 0.0 {
        return None;
    }
    let name = match spec {
        PotentialSpec::RationalN { order: 1 } if h.re == -1.0 => "rational_n1",
        PotentialSpec::RationalN { order: 1 } if h.re == 2.0 => "rational_n1_h2",
        PotentialSpec::RationalN { order: 2 } if h.re == -2.0 => "rational_n2",
        PotentialSpec::ConstQ { q } if q.0 == C::new(1.0, 0.0) && h.re == 0.0 => "const_q1",
        PotentialSpec::Soliton if h.re == 0.0 => "soliton",
        _ => return None,
    };
    reference_kernel(name)
}

/// Initial slopes `f'(0)` used by `darboux` when none are given.
///
/// For `n(n+1)/(x+1)²` (including `n = 0`) the slope `n+1` selects `f = (x+1)^{n+1}`,
/// which keeps the chain rational.
pub fn default_slopes(spec: &PotentialSpec, rungs: usize) -> Vec<C> {
    (0..rungs)
        .map(|r| match spec {
            PotentialSpec::Zero => C::new(1.0 + r as f64, 0.0),
            PotentialSpec::RationalN { order } => C::new(f64::from(*order) + 1.0 + r as f64, 0.0),
            _ => C::new(0.0, 0.0),
        })
        .collect()
}

pub fn sample_scalar(spec: &ScalarSpec, mass: f64, grid: Grid) -> Result<Samples, CliError> {
    Ok(match spec {
        ScalarSpec::Constant { value } => Samples::constant(grid, C::new(*value, 0.0)),
        ScalarSpec::TanhShift => Samples::from_real_fn(grid, |x| x.tanh() - mass),
        ScalarSpec::File { path } => read_curve_csv(open(path)?, grid)?,
    })
}

/// Parses `zero`, `rational_n:2`, `const_q:1.5`, `soliton` or `file:path.csv`.
impl FromStr for PotentialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("zero", None) => Ok(PotentialSpec::Zero),
            ("soliton", None) => Ok(PotentialSpec::Soliton),
            ("rational_n", Some(a)) => a
                .parse()
                .map(|order| PotentialSpec::RationalN { order })
                .map_err(|_| format!("bad order {a:?}")),
            ("const_q", Some(a)) => Ok(PotentialSpec::ConstQ {
                q: a.parse::<ComplexValue>()?,
            }),
            ("file", Some(a)) => Ok(PotentialSpec::File { path: a.into() }),
            _ => Err(format!(
                "unknown potential {s:?}; expected zero, rational_n:N, const_q:Q, soliton or file:PATH"
            )),
        }
    }
}

/// Test functions for `apply`: `cos:W`, `sin:W`, `exp:W` (complex `W`, e.g. `exp:2i`),
/// `monomial:K` or a curve CSV `file:PATH`.
pub fn sample_function(spec: &str, grid: Grid) -> Result<Samples, CliError> {
    let bad = || {
        CliError::Config(format!(
            "unknown function {spec:?}; expected cos:W, sin:W, exp:W, monomial:K or file:PATH"
        ))
    };
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    if kind == "file" {
        return read_curve_csv(open(std::path::Path::new(arg))?, grid);
    }
    if kind == "monomial" {
        let k: usize = arg.parse().map_err(|_| bad())?;
        return Ok(monomial(grid, k));
    }
    let w = arg.parse::<ComplexValue>().map_err(|_| bad())?.0;
    match kind {
        "cos" => Ok(Samples::from_fn(grid, |x| (w * x).cos())),
        "sin" => Ok(Samples::from_fn(grid, |x| (w * x).sin())),
        "exp" => Ok(Samples::from_fn(grid, |x| (w * x).exp())),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_strings() {
        assert_eq!("zero".parse::<PotentialSpec>(), Ok(PotentialSpec::Zero));
        assert_eq!(
            "rational_n:2".parse::<PotentialSpec>(),
            Ok(PotentialSpec::RationalN { order: 2 })
        );
        assert_eq!(
            "const_q:1-2i".parse::<PotentialSpec>(),
            Ok(PotentialSpec::ConstQ {
                q: ComplexValue(C::new(1.0, -2.0))
            })
        );
        assert!("rational_n".parse::<PotentialSpec>().is_err());
        assert!("cubic".parse::<PotentialSpec>().is_err());
    }

    #[test]
    fn references_match_their_potentials() {
        let g = Grid::new(0.5, 101).unwrap();
        for (spec, h) in [
            (PotentialSpec::RationalN { order: 1 }, -1.0),
            (PotentialSpec::RationalN { order: 2 }, -2.0),
            (PotentialSpec::Soliton, 0.0),
        ] {
            let r = matching_reference(&spec, C::new(h, 0.0)).unwrap();
            let q = sample_potential(&spec, g).unwrap();
            assert!(q.max_diff(&Samples::from_real_fn(g, r.q)) < 1e-14);
        }
        assert!(matching_reference(&PotentialSpec::Zero, C::new(0.0, 0.0)).is_none());
    }

    #[test]
    fn function_specs() {
        let g = Grid::new(1.0, 21).unwrap();
        let u = sample_function("monomial:2", g).unwrap();
        assert!(u.max_diff(&Samples::from_real_fn(g, |x| x * x)) < 1e-15);
        let e = sample_function("exp:1i", g).unwrap();
        assert!(e.max_diff(&Samples::from_fn(g, |x| C::new(0.0, x).exp())) < 1e-15);
        assert!(sample_function("tan:1", g).is_err());
        assert!(sample_function("monomial:-1", g).is_err());
    }

    #[test]
    fn zero_chain_starts_at_x_plus_one() {
        let s = default_slopes(&PotentialSpec::Zero, 3);
        assert_eq!(
            s,
            vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(3.0, 0.0)]
        );
    }

    #[test]
    fn rational_slopes_climb() {
        let s = default_slopes(&PotentialSpec::RationalN { order: 1 }, 3);
        assert_eq!(
            s,
            vec![C::new(2.0, 0.0), C::new(3.0, 0.0), C::new(4.0, 0.0)]
        );
    }
}
