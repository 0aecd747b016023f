//! Coupled-inductor link between a transmitter and a receiver loop.
//!
//! With source voltage `Vi` behind `Z_S` and load `Z_L`, the steady-state
//! loop equations give
//!
//! ```text
//! D      = (Z_S + jw L_tx)(Z_L + jw L_rx) + w^2 M^2
//! I_tx   = (Z_L + jw L_rx) / D
//! I_rx   = jw M / D
//! Vo/Vi  = jw M Z_L / D
//! ```
//!
//! per unit source voltage. The determinant form is algebraically the same
//! as the reflected-impedance expression for `I_tx` and stays finite when the
//! receiver loop alone is resonant.

use crate::tissue::check_frequency;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Source or load impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Resistive { resistance: f64 },
    Complex { resistance: f64, reactance: f64 },
    /// Pure capacitance, e.g. a buffer input.
    Capacitive { capacitance: f64 },
    /// Infinite impedance.
    Open,
}

impl Termination {
    pub fn resistive(resistance: f64) -> Result<Self> {
        let t = Termination::Resistive { resistance };
        t.validate()?;
        Ok(t)
    }

    pub fn capacitive(capacitance: f64) -> Result<Self> {
        let t = Termination::Capacitive { capacitance };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Termination::Resistive { resistance } | Termination::Complex { resistance, .. }
                if !(resistance >= 0.0 && resistance.is_finite()) =>
            {
                Err(Error::InvalidInput(format!("termination resistance must be >= 0, got {resistance}")))
            }
            Termination::Complex { reactance, .. } if !reactance.is_finite() => {
                Err(Error::InvalidInput("termination reactance must be finite".into()))
            }
            Termination::Capacitive { capacitance } if !(capacitance > 0.0 && capacitance.is_finite()) => {
                Err(Error::InvalidInput(format!("termination capacitance must be > 0, got {capacitance}")))
            }
            _ => Ok(()),
        }
    }

    /// Impedance at angular frequency `omega`; `None` for an open circuit.
    pub fn impedance(&self, omega: f64) -> Option<Complex64> {
        match *self {
            Termination::Resistive { resistance } => Some(Complex64::new(resistance, 0.0)),
            Termination::Complex { resistance, reactance } => Some(Complex64::new(resistance, reactance)),
            Termination::Capacitive { capacitance } => Some(Complex64::new(0.0, -1.0 / (omega * capacitance))),
            Termination::Open => None,
        }
    }

    fn resistance_only(&self) -> Option<f64> {
        match *self {
            Termination::Resistive { resistance } => Some(resistance),
            _ => None,
        }
    }
}

/// Two coupled inductors with their terminations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    l_tx: f64,
    l_rx: f64,
    mutual: f64,
    source: Termination,
    load: Termination,
}

impl LinkModel {
    pub fn new(l_tx: f64, l_rx: f64, mutual: f64, source: Termination, load: Termination) -> Result<Self> {
        if !(l_tx > 0.0 && l_rx > 0.0) {
            return Err(Error::InvalidInput(format!(
                "inductances must be positive (L_tx = {l_tx}, L_rx = {l_rx})"
            )));
        }
        if !mutual.is_finite() || mutual * mutual > l_tx * l_rx * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "mutual inductance {mutual} violates M^2 <= L_tx L_rx"
            )));
        }
        source.validate()?;
        load.validate()?;
        Ok(Self {
            l_tx,
            l_rx,
            mutual,
            source,
            load,
        })
    }

    /// Identical coils, both ports terminated in `z0`.
    pub fn symmetric(l: f64, mutual: f64, z0: f64) -> Result<Self> {
        let t = Termination::resistive(z0)?;
        Self::new(l, l, mutual, t, t)
    }

    pub fn l_tx(&self) -> f64 {
        self.l_tx
    }

    pub fn l_rx(&self) -> f64 {
        self.l_rx
    }

    pub fn mutual(&self) -> f64 {
        self.mutual
    }

    pub fn source(&self) -> Termination {
        self.source
    }

    pub fn load(&self) -> Termination {
        self.load
    }

    pub fn with_mutual(&self, mutual: f64) -> Result<Self> {
        Self::new(self.l_tx, self.l_rx, mutual, self.source, self.load)
    }

    pub fn with_terminations(&self, source: Termination, load: Termination) -> Result<Self> {
        Self::new(self.l_tx, self.l_rx, self.mutual, source, load)
    }

    /// Transmitter and receiver swapped (coil and termination together).
    pub fn swapped(&self) -> Self {
        Self {
            l_tx: self.l_rx,
            l_rx: self.l_tx,
            mutual: self.mutual,
            source: self.load,
            load: self.source,
        }
    }

    pub fn coupling(&self) -> f64 {
        self.mutual / (self.l_tx * self.l_rx).sqrt()
    }

    /// `(I_tx, I_rx)` per volt of source EMF.
    pub fn currents(&self, frequency: f64) -> Result<(Complex64, Complex64)> {
        check_frequency(frequency)?;
        let omega = 2.0 * PI * frequency;
        let z_tx_coil = J * omega * self.l_tx;
        let z_rx_coil = J * omega * self.l_rx;
        let jwm = J * omega * self.mutual;

        let Some(zs) = self.source.impedance(omega) else {
            return Ok((Complex64::default(), Complex64::default()));
        };
        let Some(zl) = self.load.impedance(omega) else {
            // open receiver loop carries no current and reflects nothing
            let z = zs + z_tx_coil;
            if is_zero(z, zs.norm() + z_tx_coil.norm()) {
                return Err(Error::Singular { frequency });
            }
            return Ok((z.inv(), Complex64::default()));
        };

        let rx_loop = zl + z_rx_coil;
        let det = (zs + z_tx_coil) * rx_loop + omega * omega * self.mutual * self.mutual;
        let scale = (zs.norm() + z_tx_coil.norm()) * (zl.norm() + z_rx_coil.norm());
        if is_zero(det, scale) {
            return Err(Error::Singular { frequency });
        }
        Ok((rx_loop / det, jwm / det))
    }

    /// `Vo / Vi`: load voltage per volt of source EMF.
    pub fn voltage_gain(&self, frequency: f64) -> Result<Complex64> {
        let omega = 2.0 * PI * frequency;
        let (i_tx, i_rx) = self.currents(frequency)?;
        Ok(match self.load.impedance(omega) {
            Some(zl) => zl * i_rx,
            // open load: the full induced EMF appears across the terminals
            None => J * omega * self.mutual * i_tx,
        })
    }

    /// `S21 = 2 Vo / Vi` for a common resistive reference on both ports.
    pub fn s21(&self, frequency: f64) -> Result<Complex64> {
        s21_from_gain(self.voltage_gain(frequency)?, self.source, self.load)
    }

    /// Evaluates currents, gain and (when defined) S21 over `frequencies`.
    pub fn frequency_response(&self, frequencies: &[f64]) -> Result<FrequencyResponse> {
        if frequencies.is_empty() || frequencies.windows(2).any(|w| !(w[1] > w[0])) || !(frequencies[0] > 0.0) {
            return Err(Error::InvalidInput(
                "frequencies must be positive and strictly increasing".into(),
            ));
        }
        let with_s21 = s21_reference(self.source, self.load).is_ok();
        let points: Vec<(Complex64, Complex64, Complex64)> = frequencies
            .par_iter()
            .map(|&f| {
                let (i_tx, i_rx) = self.currents(f)?;
                Ok((self.voltage_gain(f)?, i_tx, i_rx))
            })
            .collect::<Result<_>>()?;
        let gain: Vec<Complex64> = points.iter().map(|p| p.0).collect();
        Ok(FrequencyResponse {
            frequencies: frequencies.to_vec(),
            s21: with_s21.then(|| gain.iter().map(|g| g * 2.0).collect()),
            gain,
            tx_current: points.iter().map(|p| p.1).collect(),
            rx_current: points.iter().map(|p| p.2).collect(),
        })
    }
}

fn is_zero(z: Complex64, scale: f64) -> bool {
    z.norm() <= 1e-14 * scale || z.norm() == 0.0
}

fn s21_reference(source: Termination, load: Termination) -> Result<f64> {
    match (source.resistance_only(), load.resistance_only()) {
        (Some(rs), Some(rl)) if rs == rl && rs > 0.0 => Ok(rs),
        (Some(rs), Some(rl)) => Err(Error::S21Convention(format!(
            "source {rs} ohm and load {rl} ohm differ"
        ))),
        _ => Err(Error::S21Convention(format!("terminations are {source:?} / {load:?}"))),
    }
}

/// Converts a source-EMF voltage gain to S21 (`S21 = 2 Vo / Vi`).
///
/// `Vi` is the open-circuit source voltage behind `Z_S = Z0`, so a matched
/// direct connection has `Vo / Vi = 1/2` and `S21 = 1`.
pub fn s21_from_gain(gain: Complex64, source: Termination, load: Termination) -> Result<Complex64> {
    s21_reference(source, load)?;
    Ok(gain * 2.0)
}

/// Voltage gain of a direct source-to-load connection (no coupled pair),
/// used as the thru calibration standard.
pub fn thru_voltage_gain(source: Termination, load: Termination, frequency: f64) -> Result<Complex64> {
    check_frequency(frequency)?;
    let omega = 2.0 * PI * frequency;
    match (source.impedance(omega), load.impedance(omega)) {
        (Some(zs), Some(zl)) => Ok(zl / (zs + zl)),
        (Some(_), None) => Ok(Complex64::new(1.0, 0.0)),
        (None, _) => Ok(Complex64::default()),
    }
}

/// Sampled link response, per volt of source EMF.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub frequencies: Vec<f64>,
    pub gain: Vec<Complex64>,
    pub s21: Option<Vec<Complex64>>,
    pub tx_current: Vec<Complex64>,
    pub rx_current: Vec<Complex64>,
}

/// Termination regimes for a link built from identical-reference ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationCase {
    /// `Z_S = Z_L = Z0` (network analyzer).
    Vna50,
    /// Low source impedance, `Z_L = Z0`.
    LowSource,
    /// `Z_S = Z0`, capacitive load.
    CapacitiveLoad,
    /// Low source impedance and capacitive load.
    LowSourceCapacitiveLoad,
}

impl TerminationCase {
    pub const ALL: [TerminationCase; 4] = [
        TerminationCase::Vna50,
        TerminationCase::LowSource,
        TerminationCase::CapacitiveLoad,
        TerminationCase::LowSourceCapacitiveLoad,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TerminationCase::Vna50 => "vna_50",
            TerminationCase::LowSource => "low_source",
            TerminationCase::CapacitiveLoad => "capacitive_load",
            TerminationCase::LowSourceCapacitiveLoad => "low_source_capacitive_load",
        }
    }

    pub fn low_source(self) -> bool {
        matches!(self, TerminationCase::LowSource | TerminationCase::LowSourceCapacitiveLoad)
    }

    pub fn capacitive(self) -> bool {
        matches!(self, TerminationCase::CapacitiveLoad | TerminationCase::LowSourceCapacitiveLoad)
    }
}

impl fmt::Display for TerminationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TerminationCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown termination case `{s}`")))
    }
}

/// Parameters consumed by [`specialize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminationParams {
    /// Reference impedance for the resistive ports (ohm).
    pub z0: f64,
    /// Source resistance of the low-impedance driver (ohm). A buffer output
    /// is not ideal, hence 1 ohm by default; 0 is allowed.
    pub low_source_resistance: f64,
    /// Load capacitance for the capacitive cases (F).
    pub load_capacitance: Option<f64>,
}

impl Default for TerminationParams {
    fn default() -> Self {
        Self {
            z0: 50.0,
            low_source_resistance: 1.0,
            load_capacitance: None,
        }
    }
}

/// The same coils and coupling under one of the four termination regimes.
pub fn specialize(link: &LinkModel, case: TerminationCase, params: &TerminationParams) -> Result<LinkModel> {
    let source = if case.low_source() {
        Termination::resistive(params.low_source_resistance)?
    } else {
        Termination::resistive(params.z0)?
    };
    let load = if case.capacitive() {
        let c = params.load_capacitance.ok_or(Error::MissingParameter("load_capacitance"))?;
        Termination::capacitive(c)?
    } else {
        Termination::resistive(params.z0)?
    };
    link.with_terminations(source, load)
}

/// Small-coupling peak of the symmetric `Z0`-terminated response, `Z0 / (2 pi L)`.
pub fn peak_frequency_approx(inductance: f64, z0: f64) -> Result<f64> {
    if !(inductance > 0.0 && z0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "peak frequency needs L > 0 and Z0 > 0 (L = {inductance}, Z0 = {z0})"
        )));
    }
    Ok(z0 / (2.0 * PI * inductance))
}

/// LC resonance `1 / (2 pi sqrt(L C))`.
pub fn resonance_frequency(inductance: f64, capacitance: f64) -> Result<f64> {
    if !(inductance > 0.0 && capacitance > 0.0) {
        return Err(Error::InvalidInput(format!(
            "resonance needs L > 0 and C > 0 (L = {inductance}, C = {capacitance})"
        )));
    }
    Ok(1.0 / (2.0 * PI * (inductance * capacitance).sqrt()))
}

/// Capacitance that resonates with `inductance` at `frequency`.
pub fn infer_load_capacitance(frequency: f64, inductance: f64) -> Result<f64> {
    if !(frequency > 0.0 && inductance > 0.0) {
        return Err(Error::InvalidInput(format!(
            "capacitance inference needs f > 0 and L > 0 (f = {frequency}, L = {inductance})"
        )));
    }
    let omega = 2.0 * PI * frequency;
    Ok(1.0 / (omega * omega * inductance))
}

/// Reduced closed forms of the general gain for the four termination
/// regimes, written out independently of [`LinkModel`].
pub mod reduced {
    use super::J;
    use num_complex::Complex64;

    /// Identical coils, `Z_S = Z_L = Z0`: `jwMZ0 / ((jwL + Z0)^2 + w^2 M^2)`.
    pub fn symmetric_z0(l: f64, m: f64, z0: f64, omega: f64) -> Complex64 {
        let a = J * omega * l + z0;
        J * omega * m * z0 / (a * a + omega * omega * m * m)
    }

    /// `Z_S = 0`, resistive load: `jwM R_L / (jwL_tx (jwL_rx + R_L) + w^2 M^2)`.
    pub fn zero_source(l_tx: f64, l_rx: f64, m: f64, r_load: f64, omega: f64) -> Complex64 {
        J * omega * m * r_load / (J * omega * l_tx * (J * omega * l_rx + r_load) + omega * omega * m * m)
    }

    /// Resistive source, capacitive load:
    /// `jwM / ((1 - w^2 L_rx C_L)(jwL_tx + R_S) + j w^3 C_L M^2)`.
    pub fn capacitive_load(l_tx: f64, l_rx: f64, m: f64, c_load: f64, r_source: f64, omega: f64) -> Complex64 {
        let w2 = omega * omega;
        J * omega * m / ((1.0 - w2 * l_rx * c_load) * (J * omega * l_tx + r_source) + J * omega * w2 * c_load * m * m)
    }

    /// `Z_S = 0`, capacitive load:
    /// `jwM / (jwL_tx (1 - w^2 L_rx C_L) + j w^3 C_L M^2)`.
    pub fn zero_source_capacitive_load(l_tx: f64, l_rx: f64, m: f64, c_load: f64, omega: f64) -> Complex64 {
        let w2 = omega * omega;
        J * omega * m / (J * omega * l_tx * (1.0 - w2 * l_rx * c_load) + J * omega * w2 * c_load * m * m)
    }
}
