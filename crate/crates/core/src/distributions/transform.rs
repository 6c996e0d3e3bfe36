use super::DistSpec;
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// A one-to-one change of variable `x -> z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariableChange {
    /// `z = intercept + slope * x`
    Affine { intercept: f64, slope: f64 },
    /// `z = intercept + slope * ln x`
    LogAffine { intercept: f64, slope: f64 },
    /// `z = x^exponent`
    Power { exponent: f64 },
    /// `z = 1 / x`
    Reciprocal,
}

impl VariableChange {
    pub const IDENTITY: Self = Self::Affine { intercept: 0.0, slope: 1.0 };

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Self::Affine { intercept, slope } => intercept + slope * x,
            Self::LogAffine { intercept, slope } => intercept + slope * x.ln(),
            Self::Power { exponent } => x.powf(exponent),
            Self::Reciprocal => 1.0 / x,
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Self::Affine { intercept, slope } => {
                Self::Affine { intercept: -intercept / slope, slope: 1.0 / slope }
            }
            // x = exp((z - a) / b) has no LogAffine form; callers use `invert`.
            Self::LogAffine { .. } => *self,
            Self::Power { exponent } => Self::Power { exponent: 1.0 / exponent },
            Self::Reciprocal => Self::Reciprocal,
        }
    }

    /// Maps `z` back to `x`.
    pub fn invert(&self, z: f64) -> f64 {
        match *self {
            Self::LogAffine { intercept, slope } => ((z - intercept) / slope).exp(),
            other => other.inverse().apply(z),
        }
    }
}

impl fmt::Display for VariableChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Affine { intercept, slope } if intercept == 0.0 && slope == 1.0 => write!(f, "z = x"),
            Self::Affine { intercept, slope } => write!(f, "z = {intercept} + {slope}*x"),
            Self::LogAffine { intercept, slope } => write!(f, "z = {intercept} + {slope}*ln(x)"),
            Self::Power { exponent } => write!(f, "z = x^{exponent}"),
            Self::Reciprocal => write!(f, "z = 1/x"),
        }
    }
}

/// `x ~ source` implies `change(x) ~ target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mapping {
    pub target: DistSpec,
    pub change: VariableChange,
}

impl Mapping {
    fn new(target: DistSpec, change: VariableChange) -> Self {
        Self { target, change }
    }
}

/// Equivalent representations of `dist` under a change of variable.
///
/// - GPD(κ > 0, σ): `y = σ - κx` ~ InvPareto(1/κ, σ)
/// - GPD(κ < 0, σ): `y = σ - κx` ~ Pareto(-1/κ, σ)
/// - GPD(0, σ) is Exponential(1/σ)
/// - Pareto(α, β): `z = y - β` ~ GPD(-1/α, β/α); `x = α(y - β)` ~ GPD(-1/α, β)
///   (inverse of the reflection above); `1/y` ~ InvPareto(α, 1/β)
/// - InvPareto(α, β): `α(β - y)` ~ GPD(1/α, β); `ln(β/y)` ~ Exponential(α);
///   `-ln y` ~ LocExp(α, -ln β); `y^α` ~ Uniform(β^α); `1/y` ~ Pareto(α, 1/β);
///   and for α = 1 the law is Uniform(β) itself.
pub fn transform(dist: &DistSpec) -> Result<Vec<Mapping>> {
    dist.validate()?;
    let out = match *dist {
        DistSpec::Gpd { kappa, sigma } => {
            let reflect = VariableChange::Affine { intercept: sigma, slope: -kappa };
            if kappa > 0.0 {
                vec![Mapping::new(DistSpec::InvPareto { alpha: 1.0 / kappa, beta: sigma }, reflect)]
            } else if kappa < 0.0 {
                vec![Mapping::new(DistSpec::Pareto { alpha: -1.0 / kappa, beta: sigma }, reflect)]
            } else {
                vec![Mapping::new(DistSpec::Exponential { rate: 1.0 / sigma }, VariableChange::IDENTITY)]
            }
        }
        DistSpec::Pareto { alpha, beta } => vec![
            Mapping::new(
                DistSpec::Gpd { kappa: -1.0 / alpha, sigma: beta / alpha },
                VariableChange::Affine { intercept: -beta, slope: 1.0 },
            ),
            Mapping::new(
                DistSpec::Gpd { kappa: -1.0 / alpha, sigma: beta },
                VariableChange::Affine { intercept: -alpha * beta, slope: alpha },
            ),
            Mapping::new(DistSpec::InvPareto { alpha, beta: 1.0 / beta }, VariableChange::Reciprocal),
        ],
        DistSpec::InvPareto { alpha, beta } => {
            let mut maps = vec![
                Mapping::new(
                    DistSpec::Gpd { kappa: 1.0 / alpha, sigma: beta },
                    VariableChange::Affine { intercept: alpha * beta, slope: -alpha },
                ),
                Mapping::new(
                    DistSpec::Exponential { rate: alpha },
                    VariableChange::LogAffine { intercept: beta.ln(), slope: -1.0 },
                ),
                Mapping::new(
                    DistSpec::LocExp { alpha, theta: -beta.ln() },
                    VariableChange::LogAffine { intercept: 0.0, slope: -1.0 },
                ),
                Mapping::new(DistSpec::Uniform { upper: beta.powf(alpha) }, VariableChange::Power { exponent: alpha }),
                Mapping::new(DistSpec::Pareto { alpha, beta: 1.0 / beta }, VariableChange::Reciprocal),
            ];
            if alpha == 1.0 {
                maps.push(Mapping::new(DistSpec::Uniform { upper: beta }, VariableChange::IDENTITY));
            }
            maps
        }
        other => {
            return Err(Error::Domain(format!("no variable changes defined for {other:?}")));
        }
    };
    Ok(out)
}

/// Target family names accepted by [`transform_into`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gpd,
    Pareto,
    InvPareto,
    LocExp,
    Exponential,
    Uniform,
}

impl Family {
    fn of(d: &DistSpec) -> Self {
        match d {
            DistSpec::Gpd { .. } => Self::Gpd,
            DistSpec::Pareto { .. } => Self::Pareto,
            DistSpec::InvPareto { .. } => Self::InvPareto,
            DistSpec::LocExp { .. } => Self::LocExp,
            DistSpec::Exponential { .. } => Self::Exponential,
            DistSpec::Uniform { .. } => Self::Uniform,
        }
    }
}

/// The first mapping of `dist` into `family`; a domain error when the
/// parameters put the request outside the mapping's validity region.
pub fn transform_into(dist: &DistSpec, family: Family) -> Result<Mapping> {
    transform(dist)?
        .into_iter()
        .find(|m| Family::of(&m.target) == family)
        .ok_or_else(|| Error::Domain(format!("{dist:?} has no {family:?} representation")))
}
