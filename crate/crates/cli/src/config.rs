//! Job configuration, loadable from JSON and overridable from flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Complex number accepted as `1.5`, `"0.5-2i"` or `[re, im]`; always written as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "[f64; 2]")]
pub struct ComplexValue(pub Complex64);

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Text(String),
    Pair([f64; 2]),
}

impl TryFrom<ComplexRepr> for ComplexValue {
    type Error = String;

    fn try_from(r: ComplexRepr) -> Result<Self, Self::Error> {
        match r {
            ComplexRepr::Real(x) => Ok(Self(Complex64::new(x, 0.0))),
            ComplexRepr::Pair([re, im]) => Ok(Self(Complex64::new(re, im))),
            ComplexRepr::Text(s) => s.parse(),
        }
    }
}

impl From<ComplexValue> for [f64; 2] {
    fn from(c: ComplexValue) -> Self {
        [c.0.re, c.0.im]
    }
}

impl FromStr for ComplexValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        Complex64::from_str(&compact)
            .map(Self)
            .map_err(|_| format!("cannot parse complex number {s:?}"))
    }
}

impl From<f64> for ComplexValue {
    fn from(x: f64) -> Self {
        Self(Complex64::new(x, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// `q = n(n+1)/(x+1)²`.
    RationalN {
        order: u32,
    },
    ConstQ {
        q: ComplexValue,
    },
    /// `q = 1 - 2 sech² x`.
    Soliton,
    /// Curve CSV `x,re,im` on the job grid.
    File {
        path: PathBuf,
    },
}

impl PotentialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Zero => "zero",
            PotentialSpec::RationalN { .. } => "rational_n",
            PotentialSpec::ConstQ { .. } => "const_q",
            PotentialSpec::Soliton => "soliton",
            PotentialSpec::File { .. } => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Lorentz scalar `S(x)` for the Dirac system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarSpec {
    Constant {
        value: f64,
    },
    /// `S = tanh x - m`, so that `m + S = tanh x`.
    TanhShift,
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSpec {
    pub mass: f64,
    pub scalar: ScalarSpec,
    pub energies: Vec<ComplexValue>,
    /// Free-solution coefficients `(c₁, c₂)`.
    #[serde(default = "default_coefficients")]
    pub coefficients: [ComplexValue; 2],
}

fn default_coefficients() -> [ComplexValue; 2] {
    [1.0.into(), 0.0.into()]
}

impl Default for DiracSpec {
    fn default() -> Self {
        Self {
            mass: 1.0,
            scalar: ScalarSpec::Constant { value: 0.0 },
            energies: vec![1.0.into(), 2.0.into()],
            coefficients: default_coefficients(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub potential: PotentialSpec,
    pub a: f64,
    pub n_points: usize,
    pub h: ComplexValue,
    pub k_max: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Characteristic nodes per axis; defaults to `n_points`.
    pub m_points: Option<usize>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub dirac: DiracSpec,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSpec::Zero,
            a: 1.0,
            n_points: 201,
            h: 0.0.into(),
            k_max: 10,
            tol: 1e-12,
            max_iter: 60,
            m_points: None,
            output_dir: PathBuf::from("."),
            format: OutputFormat::Csv,
            dirac: DiracSpec::default(),
        }
    }
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if self.n_points < 5 || self.n_points.is_multiple_of(2) {
            return bad(format!(
                "n_points must be odd and at least 5, got {}",
                self.n_points
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        match &self.potential {
            PotentialSpec::RationalN { order } if *order == 0 => {
                return bad("rational_n needs order >= 1".into());
            }
            PotentialSpec::RationalN { .. } if self.a >= 1.0 => {
                return bad(format!(
                    "rational_n has a pole at x = -1; need a < 1, got {}",
                    self.a
                ));
            }
            _ => {}
        }
        Ok(())
    }
}
