//! Run configuration: one JSON document, every section optional, unknown keys rejected.

use std::path::Path;

use anyhow::{Context, Result};
use barrier_rhs::quadrature::QuadratureSpec;
use barrier_rhs::testspace::FamilyDescriptor;
use barrier_rhs::verify::Check;
use barrier_rhs::{BarrierModel, Channel, SignLabel};
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Explicit values or `count` points from `start` to `stop`, linear or logarithmic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range(GridRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Grid::Range(GridRange {
            start,
            stop,
            count,
            log: false,
        })
    }

    pub fn points(&self) -> Result<Vec<f64>, UsageError> {
        let pts = match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range(GridRange { start, stop, count, log }) => {
                if count == 0 || (log && !(start > 0.0 && stop > 0.0)) {
                    return Err(UsageError(format!(
                        "grid needs count >= 1 and positive ends when logarithmic (start {start}, stop {stop}, count {count})"
                    )));
                }
                if count == 1 {
                    vec![start]
                } else {
                    let step = |i: usize| i as f64 / (count - 1) as f64;
                    if log {
                        (0..count).map(|i| (start.ln() + (stop.ln() - start.ln()) * step(i)).exp()).collect()
                    } else {
                        (0..count).map(|i| start + (stop - start) * step(i)).collect()
                    }
                }
            }
        };
        if pts.is_empty() || pts.iter().any(|x| !x.is_finite()) {
            return Err(UsageError("grid must contain finite values".into()));
        }
        Ok(pts)
    }

    /// Parses `a,b,c` or `start:stop:count`.
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let bad = || UsageError(format!("cannot parse grid {text:?}; use a,b,c or start:stop:count"));
        if let [start, stop, count] = text.split(':').collect::<Vec<_>>()[..] {
            return Ok(Grid::linear(
                start.trim().parse().map_err(|_| bad())?,
                stop.trim().parse().map_err(|_| bad())?,
                count.trim().parse().map_err(|_| bad())?,
            ));
        }
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()
            .map(Grid::Values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoeffsConfig {
    pub energies: Grid,
}

impl Default for CoeffsConfig {
    fn default() -> Self {
        Self {
            energies: Grid::Range(GridRange {
                start: 0.01,
                stop: 100.0,
                count: 50,
                log: true,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigfunConfig {
    pub energy: f64,
    pub channel: Channel,
    pub sign: SignLabel,
    pub x: Grid,
}

impl Default for EigfunConfig {
    fn default() -> Self {
        Self {
            energy: 1.0,
            channel: Channel::Left,
            sign: SignLabel::Plus,
            x: Grid::linear(-5.0, 6.0, 221),
        }
    }
}

/// Spectral representation a state is expanded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformBasis {
    EnergyPlus,
    EnergyMinus,
    Momentum,
}

impl TransformBasis {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        serde_json::from_value(serde_json::Value::String(text.into()))
            .map_err(|_| UsageError(format!("unknown basis {text:?}; use energy_plus, energy_minus or momentum")))
    }
}

fn default_packet() -> FamilyDescriptor {
    FamilyDescriptor::packet(-20.0, 1.0, 3.0, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformConfig {
    pub packet: FamilyDescriptor,
    pub basis: TransformBasis,
    /// Energies for the energy bases, momenta for the momentum basis.
    pub grid: Grid,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            packet: default_packet(),
            basis: TransformBasis::EnergyPlus,
            grid: Grid::linear(0.5, 20.0, 40),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructConfig {
    pub packet: FamilyDescriptor,
    pub basis: TransformBasis,
    pub x: Grid,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            packet: default_packet(),
            basis: TransformBasis::EnergyPlus,
            x: Grid::linear(-30.0, 30.0, 61),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    /// Normalized before use.
    pub packet: FamilyDescriptor,
    pub e_lo: f64,
    /// `null` means the whole half-line above `e_lo`.
    pub e_hi: Option<f64>,
    pub sign: SignLabel,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            packet: default_packet(),
            e_lo: 0.0,
            e_hi: None,
            sign: SignLabel::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub checks: Vec<Check>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: BarrierModel,
    pub quadrature: QuadratureSpec,
    pub coeffs: CoeffsConfig,
    pub eigfun: EigfunConfig,
    pub transform: TransformConfig,
    pub reconstruct: ReconstructConfig,
    pub probe: ProbeConfig,
    pub verify: VerifyConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let config: RunConfig = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| UsageError(format!("invalid config {}: {e}", p.display())))?
            }
        };
        config.quadrature.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }
}
