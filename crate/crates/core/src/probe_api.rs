//! The narrow interface between a line system and the probing engine.
//!
//! Everything the probe engine and the diagnosis code know about a route
//! comes through [`BlackBoxProbe`]: the slot boundaries and Q readings.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::formats::{CatalogEntry, GsnrSample};
use crate::num::{db, Scalar};
use crate::spectral::SignalSpectrum;

/// Roll-off of the probing transceivers.
pub const DEFAULT_ROLL_OFF: f64 = 0.19;

/// A frequency slot carrying a transparent lightpath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct MediaChannel<T> {
    /// Absolute center, GHz.
    pub center: T,
    /// GHz.
    pub width: T,
    #[serde(default)]
    pub guard_band_each_side: T,
}

impl<T: Scalar> MediaChannel<T> {
    pub fn new(center: T, width: T) -> Self {
        Self {
            center,
            width,
            guard_band_each_side: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(config("media channel center must be finite"));
        }
        if !(self.width > T::zero() && self.width.is_finite()) {
            return Err(config(format!(
                "media channel width must be > 0, got {}",
                self.width
            )));
        }
        let g = self.guard_band_each_side;
        if !(g >= T::zero()) || !(g + g < self.width) {
            return Err(config(format!(
                "guard bands must be >= 0 and sum below the width {}, got {g} each side",
                self.width
            )));
        }
        Ok(())
    }

    pub fn start(&self) -> T {
        self.center - self.width / T::lit(2.0)
    }

    pub fn end(&self) -> T {
        self.center + self.width / T::lit(2.0)
    }

    pub fn contains(&self, f: T) -> bool {
        // tolerate rounding on grid points that land exactly on an edge
        let slack = T::lit(1e-9) * self.width.max(T::one());
        f >= self.start() - slack && f <= self.end() + slack
    }
}

/// Constant power-to-symbol-rate launch rule: `P(SR) = p_ref + 10·log10(SR/sr_ref)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct PowerRule<T> {
    pub p_ref_dbm: T,
    /// GBd.
    pub sr_ref: T,
}

impl<T: Scalar> Default for PowerRule<T> {
    fn default() -> Self {
        Self {
            p_ref_dbm: T::zero(),
            sr_ref: T::lit(69.0),
        }
    }
}

impl<T: Scalar> PowerRule<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.p_ref_dbm.is_finite() {
            return Err(config("power rule p_ref_dbm must be finite"));
        }
        if !(self.sr_ref > T::zero() && self.sr_ref.is_finite()) {
            return Err(config(format!(
                "power rule sr_ref must be > 0, got {}",
                self.sr_ref
            )));
        }
        Ok(())
    }

    /// Launch power in dBm at `symbol_rate`.
    pub fn power_dbm(&self, symbol_rate: T) -> T {
        self.p_ref_dbm + db(symbol_rate / self.sr_ref)
    }
}

fn default_roll_off<T: Scalar>() -> T {
    T::lit(DEFAULT_ROLL_OFF)
}

/// One transceiver configuration used for probing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct ProbeConfig<T> {
    pub entry: CatalogEntry<T>,
    #[serde(default = "default_roll_off")]
    pub roll_off: T,
    #[serde(default)]
    pub power_rule: PowerRule<T>,
}

impl<T: Scalar> ProbeConfig<T> {
    pub fn new(entry: CatalogEntry<T>) -> Self {
        Self {
            entry,
            roll_off: default_roll_off(),
            power_rule: PowerRule::default(),
        }
    }

    pub fn id(&self) -> &str {
        &self.entry.id
    }

    pub fn symbol_rate(&self) -> T {
        self.entry.symbol_rate
    }

    pub fn occupied_width(&self) -> T {
        (T::one() + self.roll_off) * self.entry.symbol_rate
    }

    pub fn power_dbm(&self) -> T {
        self.power_rule.power_dbm(self.entry.symbol_rate)
    }

    pub fn spectrum_at(&self, carrier: T) -> Result<SignalSpectrum<T>> {
        SignalSpectrum::new(self.entry.symbol_rate, self.roll_off, carrier)
    }

    pub fn validate(&self) -> Result<()> {
        self.entry.validate()?;
        if !(self.roll_off >= T::zero() && self.roll_off <= T::one()) {
            return Err(config(format!(
                "{}: roll_off must lie in [0, 1], got {}",
                self.id(),
                self.roll_off
            )));
        }
        self.power_rule.validate()
    }
}

/// What a transceiver reports at one setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading<T> {
    QDb(T),
    Outage,
}

impl<T: Scalar> Reading<T> {
    pub fn q_db(&self) -> Option<T> {
        match *self {
            Reading::QDb(q) => Some(q),
            Reading::Outage => None,
        }
    }
}

/// One black-box reading at one carrier frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementResult<T> {
    pub carrier: T,
    pub probe_id: String,
    pub trial: u64,
    pub reading: Reading<T>,
    /// Normalized GSNR, filled in by the probe engine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gsnr: Option<GsnrSample<T>>,
}

/// A tunable transceiver attached to a media channel.
///
/// Implementations hide the line system: callers only see the slot they
/// were given and the Q values the receiver reports. A session is used
/// sequentially by one caller.
pub trait BlackBoxProbe<T: Scalar> {
    /// The media channel this session is attached to.
    fn slot(&self) -> MediaChannel<T>;

    fn set_carrier(&mut self, carrier: T) -> Result<()>;

    fn set_probe(&mut self, probe: &ProbeConfig<T>) -> Result<()>;

    /// Reads the receiver once. Identical settings and `trial` give identical results.
    fn read_q(&mut self, trial: u64) -> Result<MeasurementResult<T>>;
}

/// A multi-slot line where every slot carries one carrier, used for
/// adjacent-channel crosstalk scans.
pub trait ChannelTestbed<T: Scalar> {
    type Session: BlackBoxProbe<T>;

    /// Slots in ascending frequency order.
    fn slots(&self) -> Vec<MediaChannel<T>>;

    /// Lights `carriers[i]` (frequency and configuration) in slot `i` and
    /// returns a session reading the receiver of slot `observed`.
    fn open(&self, carriers: &[(T, ProbeConfig<T>)], observed: usize) -> Result<Self::Session>;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::builtin_catalog;

    #[test]
    fn media_channel_geometry() {
        let mc = MediaChannel::new(193_100.0, 400.0);
        assert_eq!(mc.start(), 192_900.0);
        assert_eq!(mc.end(), 193_300.0);
        assert!(mc.contains(193_300.0));
        assert!(!mc.contains(193_301.0));
        let mut bad = mc;
        bad.guard_band_each_side = 200.0;
        assert!(bad.validate().is_err());
        assert!(MediaChannel::new(0.0, -1.0).validate().is_err());
    }

    #[test]
    fn constant_psd_power_rule() {
        let rule = PowerRule {
            p_ref_dbm: 1.0_f64,
            sr_ref: 69.0,
        };
        assert_eq!(rule.power_dbm(69.0), 1.0);
        assert!((rule.power_dbm(34.5) - (1.0 - 3.0103)).abs() < 1e-4);
    }

    #[test]
    fn probe_defaults() {
        let p = ProbeConfig::new(builtin_catalog::<f64>().remove(0));
        assert_eq!(p.roll_off, 0.19);
        assert_eq!(p.id(), "200G-69GBd-DP-QPSK");
        assert!((p.occupied_width() - 82.11).abs() < 1e-12);
        p.validate().unwrap();
    }
}
