//! Scenario files: TOML describing coils, terminations, body and sweep.

use crate::coil::{self_inductance, CoilPair, Loop, Vec3};
use crate::link::{infer_load_capacitance, LinkModel, TerminationCase, TerminationParams};
use crate::tissue::TissueDb;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    #[default]
    Link,
    Tissue,
    Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    #[default]
    Frequency,
    Distance,
    Offset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Svg,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilSpec {
    pub radius: f64,
    pub wire_radius: f64,
    #[serde(default = "one")]
    pub turns: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilsSection {
    pub tx: CoilSpec,
    pub rx: CoilSpec,
    /// Axial distance between the loop planes (m).
    pub separation: f64,
    #[serde(default)]
    pub lateral_offset: f64,
    /// Replaces the computed self inductance of both loops (H).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inductance: Option<f64>,
    /// Replaces the computed mutual inductance (H).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    #[serde(default = "default_cases")]
    pub cases: Vec<String>,
    #[serde(default = "default_z0")]
    pub z0: f64,
    #[serde(default = "default_low_source")]
    pub low_source_resistance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_capacitance: Option<f64>,
    /// Alternative to `load_capacitance`: the receiver resonance it should produce (Hz).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance_frequency: Option<f64>,
}

fn default_cases() -> Vec<String> {
    vec![TerminationCase::Vna50.as_str().to_string()]
}

fn default_z0() -> f64 {
    50.0
}

fn default_low_source() -> f64 {
    TerminationParams::default().low_source_resistance
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            cases: default_cases(),
            z0: default_z0(),
            low_source_resistance: default_low_source(),
            load_capacitance: None,
            resonance_frequency: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySection {
    #[serde(default = "default_tissue")]
    pub tissue: String,
    /// Characteristic body dimension for regime classification (m).
    #[serde(default = "default_dimension")]
    pub dimension: f64,
    /// Cylinder radius for the eddy-current factor (m).
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Multiply link gain by the on-axis eddy transmission.
    #[serde(default)]
    pub enabled: bool,
    /// Use the linearly interpolated permittivity below 10 MHz.
    #[serde(default)]
    pub interpolated: bool,
}

fn default_tissue() -> String {
    "muscle".into()
}

fn default_dimension() -> f64 {
    0.08
}

fn default_radius() -> f64 {
    0.04
}

impl Default for BodySection {
    fn default() -> Self {
        Self {
            tissue: default_tissue(),
            dimension: default_dimension(),
            radius: default_radius(),
            enabled: false,
            interpolated: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl RangeSpec {
    pub fn validate(&self, what: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Scenario(format!("{what}: bounds must be finite")));
        }
        if self.points < 2 {
            return Err(Error::Scenario(format!("{what}: points must be >= 2, got {}", self.points)));
        }
        if !(self.max > self.min) {
            return Err(Error::Scenario(format!(
                "{what}: max ({}) must exceed min ({})",
                self.max, self.min
            )));
        }
        let positive = match self.spacing {
            Spacing::Log => self.min > 0.0,
            Spacing::Linear => self.min >= 0.0,
        };
        if !positive {
            return Err(Error::Scenario(format!("{what}: min must be positive, got {}", self.min)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        match self.spacing {
            Spacing::Log => crate::grid::log_space(self.min, self.max, self.points),
            Spacing::Linear => crate::grid::lin_space(self.min, self.max, self.points),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub axis: Axis,
    #[serde(default = "default_min")]
    pub min: f64,
    #[serde(default = "default_max")]
    pub max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Operating frequency for distance and offset sweeps (Hz).
    #[serde(default = "default_fixed_frequency")]
    pub frequency: f64,
    /// Distances for a distance-by-offset grid; absent means `coils.separation` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<RangeSpec>,
}

fn default_min() -> f64 {
    crate::BAND_MIN_HZ
}

fn default_max() -> f64 {
    crate::BAND_MAX_HZ
}

fn default_points() -> usize {
    400
}

fn default_fixed_frequency() -> f64 {
    30e6
}

impl SweepSection {
    pub fn range(&self) -> RangeSpec {
        RangeSpec {
            min: self.min,
            max: self.max,
            points: self.points,
            spacing: self.spacing,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: Axis::Frequency,
            min: default_min(),
            max: default_max(),
            points: default_points(),
            spacing: Spacing::Log,
            frequency: default_fixed_frequency(),
            distance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output path without extension, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub analysis: Analysis,
    pub coils: CoilsSection,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub body: BodySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory of the file the scenario came from.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Scenario {
    /// Two 5 cm, 14 AWG single-turn loops 10 cm apart, 50 ohm terminated.
    pub fn anchored(name: impl Into<String>) -> Self {
        let coil = CoilSpec {
            radius: 0.05,
            wire_radius: crate::coil::AWG14_RADIUS,
            turns: 1,
        };
        Self {
            name: name.into(),
            description: String::new(),
            analysis: Analysis::Link,
            coils: CoilsSection {
                tx: coil.clone(),
                rx: coil,
                separation: 0.1,
                lateral_offset: 0.0,
                inductance: None,
                mutual: None,
            },
            link: LinkSection::default(),
            body: BodySection::default(),
            sweep: SweepSection::default(),
            output: OutputSection::default(),
            base_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut s = Self::from_toml(&text).map_err(|e| match e {
            Error::Scenario(m) => Error::Scenario(format!("{}: {m}", path.display())),
            other => other,
        })?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    /// Canonical TOML text; the config hash is taken over this.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn config_hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Output stem resolved against the scenario directory.
    pub fn output_stem(&self) -> PathBuf {
        let stem = self.output.stem.clone().unwrap_or_else(|| self.name.clone());
        match &self.base_dir {
            Some(dir) => dir.join(stem),
            None => PathBuf::from(stem),
        }
    }

    pub fn cases(&self) -> Result<Vec<TerminationCase>> {
        if self.link.cases.is_empty() {
            return Err(Error::Scenario("link.cases must not be empty".into()));
        }
        self.link.cases.iter().map(|c| c.parse()).collect()
    }

    /// Checks everything that can be checked without running the sweep.
    pub fn validate(&self, db: &TissueDb) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Scenario("name must not be empty".into()));
        }
        self.sweep.range().validate("sweep")?;
        if let Some(d) = &self.sweep.distance {
            d.validate("sweep.distance")?;
        }
        if !(self.sweep.frequency > 0.0) {
            return Err(Error::Scenario("sweep.frequency must be positive".into()));
        }
        if self.sweep.axis == Axis::Frequency && self.sweep.min <= 0.0 {
            return Err(Error::Scenario("frequency sweep needs min > 0".into()));
        }
        if self.analysis != Analysis::Link && self.sweep.axis != Axis::Frequency {
            return Err(Error::Scenario("tissue and regime reports sweep frequency only".into()));
        }
        db.get(&self.body.tissue)?;
        if !(self.body.dimension > 0.0) {
            return Err(Error::Scenario("body.dimension must be positive".into()));
        }
        if !(self.body.radius > 0.0) {
            return Err(Error::Scenario("body.radius must be positive".into()));
        }
        if self.analysis == Analysis::Link {
            let cases = self.cases()?;
            self.pair_at(self.coils.separation, self.coils.lateral_offset)?;
            if cases.iter().any(|c| c.capacitive())
                && self.link.load_capacitance.is_none()
                && self.link.resonance_frequency.is_none()
            {
                return Err(Error::MissingParameter("load_capacitance"));
            }
            if self.link.load_capacitance.is_some() && self.link.resonance_frequency.is_some() {
                return Err(Error::Scenario(
                    "give either link.load_capacitance or link.resonance_frequency, not both".into(),
                ));
            }
            self.termination_params()?;
            self.link_model(self.coils.mutual.unwrap_or(0.0))?;
        }
        Ok(())
    }

    pub fn tx_loop(&self) -> Result<Loop> {
        let c = &self.coils.tx;
        Loop::new(c.radius, c.wire_radius, c.turns, Vec3::zeros(), Vec3::z())
    }

    pub fn rx_loop_at(&self, separation: f64, offset: f64) -> Result<Loop> {
        let c = &self.coils.rx;
        Loop::new(c.radius, c.wire_radius, c.turns, Vec3::new(offset, 0.0, separation), Vec3::z())
    }

    pub fn pair_at(&self, separation: f64, offset: f64) -> Result<CoilPair> {
        CoilPair::new(self.tx_loop()?, self.rx_loop_at(separation, offset)?)
    }

    /// `(L_tx, L_rx)`.
    pub fn inductances(&self) -> Result<(f64, f64)> {
        match self.coils.inductance {
            Some(l) if l > 0.0 => Ok((l, l)),
            Some(l) => Err(Error::Scenario(format!("coils.inductance must be positive, got {l}"))),
            None => Ok((self_inductance(&self.tx_loop()?)?, self_inductance(&self.rx_loop_at(0.0, 0.0)?)?)),
        }
    }

    pub fn termination_params(&self) -> Result<TerminationParams> {
        let load_capacitance = match (self.link.load_capacitance, self.link.resonance_frequency) {
            (Some(c), _) => Some(c),
            (None, Some(f)) => Some(infer_load_capacitance(f, self.inductances()?.1)?),
            (None, None) => None,
        };
        Ok(TerminationParams {
            z0: self.link.z0,
            low_source_resistance: self.link.low_source_resistance,
            load_capacitance,
        })
    }

    /// `Z0`-terminated link with the given mutual inductance; specialize per case.
    pub fn link_model(&self, mutual: f64) -> Result<LinkModel> {
        let (lt, lr) = self.inductances()?;
        let z0 = crate::link::Termination::resistive(self.link.z0)?;
        LinkModel::new(lt, lr, mutual, z0, z0)
    }
}
