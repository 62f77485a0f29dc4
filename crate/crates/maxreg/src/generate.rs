//! Deterministic test-field generators with analytic gradients.
//!
//! Every generator is a closed-form function of position, so checks that
//! need exact derivatives or exact support geometry can ask for them
//! instead of differencing. All kinds except `indicator` are smooth.

use serde::{Deserialize, Serialize};

use crate::lattice::{Mask, ScalarField};
use crate::{Error, Result};
use std::sync::Arc;

/// Region for indicator fields.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Disk { center: Vec<f64>, radius: f64 },
    Rect { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Disk { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 < radius * radius
            }
            Region::Rect { lo, hi } => x.iter().enumerate().all(|(i, &v)| lo[i] < v && v < hi[i]),
        }
    }
}

/// A deterministic field generator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `f = value` everywhere.
    Constant { value: f64 },
    /// `f = amplitude * exp(-|x - center|^2 / (2 width^2))`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// `f = amplitude * (offset + prod_i cos(2 pi k_i x_i)) / (offset + 1)`,
    /// nonnegative whenever `offset >= 1`.
    Trig {
        frequencies: Vec<f64>,
        amplitude: f64,
        #[serde(default = "default_trig_offset")]
        offset: f64,
    },
    /// Characteristic function of a region (not smooth).
    Indicator { region: Region },
    /// Smooth compactly supported bump:
    /// `amplitude * exp(1 - 1/(1 - s^2))` for `s = |x - center|/radius < 1`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// Pointwise sum of sub-generators.
    Sum { parts: Vec<Generator> },
    /// A sub-generator scaled by a constant factor.
    Scaled { factor: f64, part: Box<Generator> },
}

fn default_trig_offset() -> f64 {
    1.25
}

impl Generator {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Generator::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidParameter("constant value not finite".into()));
                }
            }
            Generator::Gaussian { center, width, .. } => {
                if center.len() != dim {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian center has {} coords, domain is {dim}-d",
                        center.len()
                    )));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::InvalidParameter("gaussian width must be > 0".into()));
                }
            }
            Generator::Trig {
                frequencies,
                offset,
                ..
            } => {
                if frequencies.len() != dim {
                    return Err(Error::InvalidParameter(format!(
                        "trig needs {dim} frequencies, got {}",
                        frequencies.len()
                    )));
                }
                if !(*offset >= 1.0) {
                    return Err(Error::InvalidParameter(
                        "trig offset must be >= 1 to keep the field nonnegative".into(),
                    ));
                }
            }
            Generator::Indicator { region } => match region {
                Region::Disk { center, radius } => {
                    if center.len() != dim || !(radius.is_finite() && *radius > 0.0) {
                        return Err(Error::InvalidParameter("bad indicator disk".into()));
                    }
                }
                Region::Rect { lo, hi } => {
                    if lo.len() != dim || hi.len() != dim {
                        return Err(Error::InvalidParameter("bad indicator rect".into()));
                    }
                }
            },
            Generator::Bump { center, radius, .. } => {
                if center.len() != dim || !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidParameter("bad bump parameters".into()));
                }
            }
            Generator::Sum { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidParameter("empty sum generator".into()));
                }
                for p in parts {
                    p.validate(dim)?;
                }
            }
            Generator::Scaled { factor, part } => {
                if !factor.is_finite() {
                    return Err(Error::InvalidParameter("scale factor not finite".into()));
                }
                part.validate(dim)?;
            }
        }
        Ok(())
    }

    pub fn is_smooth(&self) -> bool {
        match self {
            Generator::Indicator { .. } => false,
            Generator::Sum { parts } => parts.iter().all(|p| p.is_smooth()),
            Generator::Scaled { part, .. } => part.is_smooth(),
            _ => true,
        }
    }

    /// Smallest known disk containing the support, when compact.
    pub fn compact_support(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            Generator::Bump { center, radius, .. } => Some((center.clone(), *radius)),
            Generator::Indicator { region } => match region {
                Region::Disk { center, radius } => Some((center.clone(), *radius)),
                Region::Rect { lo, hi } => {
                    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                    let r = lo
                        .iter()
                        .zip(hi)
                        .map(|(a, b)| 0.5 * (b - a) * 0.5 * (b - a))
                        .sum::<f64>()
                        .sqrt();
                    Some((center, r))
                }
            },
            Generator::Constant { value } if *value == 0.0 => None,
            Generator::Scaled { part, .. } => part.compact_support(),
            Generator::Sum { parts } => {
                // Supported only when every part is compact: enclosing disk.
                let mut balls = Vec::new();
                for p in parts {
                    balls.push(p.compact_support()?);
                }
                let (c0, mut r0) = balls[0].clone();
                for (c, r) in &balls[1..] {
                    let d: f64 = c0
                        .iter()
                        .zip(c)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    r0 = r0.max(d + r);
                }
                Some((c0, r0))
            }
            _ => None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Generator::Constant { value } => *value,
            Generator::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                amplitude * (-d2 / (2.0 * width * width)).exp()
            }
            Generator::Trig {
                frequencies,
                amplitude,
                offset,
            } => {
                let tau = std::f64::consts::TAU;
                let prod: f64 = x
                    .iter()
                    .zip(frequencies)
                    .map(|(xi, ki)| (tau * ki * xi).cos())
                    .product();
                amplitude * (offset + prod) / (offset + 1.0)
            }
            Generator::Indicator { region } => {
                if region.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Generator::Bump {
                center,
                radius,
                amplitude,
            } => {
                let s2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    / (radius * radius);
                if s2 < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - s2)).exp()
                } else {
                    0.0
                }
            }
            Generator::Sum { parts } => parts.iter().map(|p| p.value(x)).sum(),
            Generator::Scaled { factor, part } => factor * part.value(x),
        }
    }

    /// Analytic gradient; zero for indicator fields (defined a.e.).
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self {
            Generator::Constant { .. } | Generator::Indicator { .. } => vec![0.0; n],
            Generator::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                let w2 = width * width;
                let v = amplitude * (-d2 / (2.0 * w2)).exp();
                x.iter()
                    .zip(center)
                    .map(|(a, b)| -v * (a - b) / w2)
                    .collect()
            }
            Generator::Trig {
                frequencies,
                amplitude,
                offset,
            } => {
                let tau = std::f64::consts::TAU;
                (0..n)
                    .map(|l| {
                        let mut d = amplitude / (offset + 1.0);
                        for (i, (&xi, &ki)) in x.iter().zip(frequencies).enumerate() {
                            if i == l {
                                d *= -tau * ki * (tau * ki * xi).sin();
                            } else {
                                d *= (tau * ki * xi).cos();
                            }
                        }
                        d
                    })
                    .collect()
            }
            Generator::Bump {
                center,
                radius,
                amplitude,
            } => {
                let r2 = radius * radius;
                let s2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    / r2;
                if s2 >= 1.0 {
                    return vec![0.0; n];
                }
                let v = amplitude * (1.0 - 1.0 / (1.0 - s2)).exp();
                let chain = -1.0 / ((1.0 - s2) * (1.0 - s2));
                x.iter()
                    .zip(center)
                    .map(|(a, b)| v * chain * 2.0 * (a - b) / r2)
                    .collect()
            }
            Generator::Sum { parts } => {
                let mut g = vec![0.0; n];
                for p in parts {
                    for (gi, pi) in g.iter_mut().zip(p.gradient(x)) {
                        *gi += pi;
                    }
                }
                g
            }
            Generator::Scaled { factor, part } => {
                part.gradient(x).into_iter().map(|g| factor * g).collect()
            }
        }
    }

    /// Realizes the field on the inside nodes of a mask.
    pub fn realize(&self, mask: Arc<Mask>) -> Result<ScalarField> {
        self.validate(mask.grid.dim())?;
        ScalarField::from_fn(mask, |x| self.value(x))
    }

    /// Euclidean norm of the analytic gradient, as a field.
    pub fn realize_gradient_magnitude(&self, mask: Arc<Mask>) -> Result<ScalarField> {
        self.validate(mask.grid.dim())?;
        ScalarField::from_fn(mask, |x| {
            self.gradient(x).iter().map(|g| g * g).sum::<f64>().sqrt()
        })
    }

    /// One component of the analytic gradient, as a field.
    pub fn realize_partial(&self, mask: Arc<Mask>, axis: usize) -> Result<ScalarField> {
        self.validate(mask.grid.dim())?;
        ScalarField::from_fn(mask, |x| self.gradient(x)[axis])
    }
}

/// Parses a generator spec from JSON and realizes it on a mask. Unknown
/// kinds are reported as such.
pub fn generate_field(spec: &serde_json::Value, mask: Arc<Mask>) -> Result<ScalarField> {
    let gen: Generator = serde_json::from_value(spec.clone())
        .map_err(|e| Error::InvalidParameter(format!("unknown or malformed generator: {e}")))?;
    gen.realize(mask)
}
