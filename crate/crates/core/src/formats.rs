//! Modulation formats, the transceiver catalog and the BER ↔ SNR ↔ Q ↔
//! normalized-GSNR conversion chain.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::num::Scalar;
use crate::special::{erfc, erfc_inv};

/// Reference noise bandwidth of the normalized GSNR, GHz.
pub const REFERENCE_BANDWIDTH_GHZ: f64 = 12.5;
/// Default pre-FEC BER threshold.
pub const DEFAULT_FEC_THRESHOLD_BER: f64 = 2e-2;
/// Default BER above which a reading is an outage.
pub const DEFAULT_OUTAGE_BER: f64 = 5e-2;
/// Lower end of the SNR search interval, also the saturation value, dB.
pub const SNR_SEARCH_MIN_DB: f64 = -30.0;
/// Upper end of the SNR search interval, dB.
pub const SNR_SEARCH_MAX_DB: f64 = 60.0;

/// Gray-coded AWGN bit-error-rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BerCurve {
    Qpsk,
    /// Geometric mean of the QPSK and 16QAM curves.
    Hybrid8,
    Qam16,
}

impl BerCurve {
    pub fn ber<T: Scalar>(self, snr_db: T) -> T {
        let s = T::lit(10.0).powf(snr_db / T::lit(10.0));
        match self {
            BerCurve::Qpsk => ber_qpsk(s),
            BerCurve::Qam16 => ber_qam16(s),
            BerCurve::Hybrid8 => (ber_qpsk(s) * ber_qam16(s)).sqrt(),
        }
    }
}

fn ber_qpsk<T: Scalar>(s: T) -> T {
    T::lit(0.5) * erfc((s / T::lit(2.0)).sqrt())
}

fn ber_qam16<T: Scalar>(s: T) -> T {
    T::lit(0.375) * erfc((s / T::lit(10.0)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationFormat {
    pub name: String,
    pub bits_per_symbol: u32,
    pub ber_curve: BerCurve,
}

impl ModulationFormat {
    pub fn dp_qpsk() -> Self {
        Self {
            name: "DP-QPSK".into(),
            bits_per_symbol: 4,
            ber_curve: BerCurve::Qpsk,
        }
    }

    /// The 6 bit/symbol hybrid of QPSK and 16QAM.
    pub fn dp_p_16qam() -> Self {
        Self {
            name: "DP-P-16QAM".into(),
            bits_per_symbol: 6,
            ber_curve: BerCurve::Hybrid8,
        }
    }

    pub fn dp_16qam() -> Self {
        Self {
            name: "DP-16QAM".into(),
            bits_per_symbol: 8,
            ber_curve: BerCurve::Qam16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(config("format name must not be empty"));
        }
        if self.bits_per_symbol == 0 {
            return Err(config(format!(
                "format {}: bits_per_symbol must be > 0",
                self.name
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ModulationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn default_margin<T: Scalar>() -> T {
    T::one()
}

/// A transceiver mode that can be deployed in the slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct CatalogEntry<T> {
    pub id: String,
    pub format: ModulationFormat,
    /// GBd.
    pub symbol_rate: T,
    /// Gbit/s.
    pub net_data_rate: T,
    #[serde(default = "default_margin")]
    pub margin_db: T,
}

impl<T: Scalar> CatalogEntry<T> {
    pub fn new(id: &str, format: ModulationFormat, symbol_rate: T, net_data_rate: T) -> Self {
        Self {
            id: id.into(),
            format,
            symbol_rate,
            net_data_rate,
            margin_db: T::one(),
        }
    }

    pub fn with_margin(mut self, margin_db: T) -> Self {
        self.margin_db = margin_db;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.format.validate()?;
        if self.id.trim().is_empty() {
            return Err(config("catalog entry id must not be empty"));
        }
        if !(self.symbol_rate > T::zero() && self.symbol_rate.is_finite()) {
            return Err(config(format!("{}: symbol_rate must be > 0", self.id)));
        }
        if !(self.net_data_rate > T::zero() && self.net_data_rate.is_finite()) {
            return Err(config(format!("{}: net_data_rate must be > 0", self.id)));
        }
        if !self.margin_db.is_finite() {
            return Err(config(format!("{}: margin_db must be finite", self.id)));
        }
        Ok(())
    }
}

/// Probe and plan transceiver modes: 200G at 69/46/34 GBd plus 300G and 100G variants.
pub fn builtin_catalog<T: Scalar>() -> Vec<CatalogEntry<T>> {
    let e = |id: &str, f: ModulationFormat, sr: f64, rate: f64| {
        CatalogEntry::new(id, f, T::lit(sr), T::lit(rate))
    };
    vec![
        e(
            "200G-69GBd-DP-QPSK",
            ModulationFormat::dp_qpsk(),
            69.0,
            200.0,
        ),
        e(
            "200G-46GBd-DP-P-16QAM",
            ModulationFormat::dp_p_16qam(),
            46.0,
            200.0,
        ),
        e(
            "200G-34GBd-DP-16QAM",
            ModulationFormat::dp_16qam(),
            34.0,
            200.0,
        ),
        e(
            "300G-69GBd-DP-P-16QAM",
            ModulationFormat::dp_p_16qam(),
            69.0,
            300.0,
        ),
        e(
            "300G-52GBd-DP-16QAM",
            ModulationFormat::dp_16qam(),
            52.0,
            300.0,
        ),
        e(
            "100G-34GBd-DP-QPSK",
            ModulationFormat::dp_qpsk(),
            34.0,
            100.0,
        ),
    ]
}

/// Thresholds that turn a BER into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct MetricConfig<T> {
    #[serde(default = "default_fec")]
    pub fec_threshold_ber: T,
    #[serde(default = "default_outage")]
    pub outage_ber: T,
}

fn default_fec<T: Scalar>() -> T {
    T::lit(DEFAULT_FEC_THRESHOLD_BER)
}

fn default_outage<T: Scalar>() -> T {
    T::lit(DEFAULT_OUTAGE_BER)
}

impl<T: Scalar> Default for MetricConfig<T> {
    fn default() -> Self {
        Self {
            fec_threshold_ber: default_fec(),
            outage_ber: default_outage(),
        }
    }
}

impl<T: Scalar> MetricConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let half = T::lit(0.5);
        for (name, v) in [
            ("fec_threshold_ber", self.fec_threshold_ber),
            ("outage_ber", self.outage_ber),
        ] {
            if !(v > T::zero() && v < half) {
                return Err(config(format!("{name} must lie in (0, 0.5), got {v}")));
            }
        }
        Ok(())
    }
}

/// One normalized-GSNR reading, or an outage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GsnrSample<T> {
    GsnrDb(T),
    Outage,
}

impl<T: Scalar> GsnrSample<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            GsnrSample::GsnrDb(v) => Some(v),
            GsnrSample::Outage => None,
        }
    }

    pub fn is_outage(&self) -> bool {
        matches!(self, GsnrSample::Outage)
    }
}

/// Pre-FEC BER of `format` at in-band SNR `snr_db`.
pub fn ber_from_snr<T: Scalar>(format: &ModulationFormat, snr_db: T) -> T {
    format.ber_curve.ber(snr_db)
}

/// Result of inverting a BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrEstimate<T> {
    pub snr_db: T,
    /// The BER lies beyond the search interval and `snr_db` is clamped to its edge.
    pub saturated: bool,
}

/// In-band SNR at which `format` reaches `ber`, by bisection on
/// [−30, 60] dB to 1e−4 dB. BERs beyond the interval clamp to its edges
/// with `saturated` set.
pub fn snr_from_ber<T: Scalar>(format: &ModulationFormat, ber: T) -> Result<SnrEstimate<T>> {
    if !(ber > T::zero() && ber < T::lit(0.5)) {
        return Err(domain(format!("BER must lie in (0, 0.5), got {ber}")));
    }
    let curve = format.ber_curve;
    let (mut lo, mut hi) = (T::lit(SNR_SEARCH_MIN_DB), T::lit(SNR_SEARCH_MAX_DB));
    if curve.ber(lo) <= ber {
        return Ok(SnrEstimate {
            snr_db: lo,
            saturated: true,
        });
    }
    if curve.ber(hi) >= ber {
        return Ok(SnrEstimate {
            snr_db: hi,
            saturated: true,
        });
    }
    // compare in the log domain so tiny BERs keep their resolution
    let target = ber.ln();
    let tol = T::lit(1e-6).max(T::epsilon() * T::lit(64.0));
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if curve.ber(mid).ln() > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok(SnrEstimate {
        snr_db: (lo + hi) / T::lit(2.0),
        saturated: false,
    })
}

/// `Q_dB = 20·log10(√2 · erfc⁻¹(2·ber))`.
pub fn q_db_from_ber<T: Scalar>(ber: T) -> Result<T> {
    if !(ber > T::zero() && ber < T::lit(0.5)) {
        return Err(domain(format!("BER must lie in (0, 0.5), got {ber}")));
    }
    Ok(T::lit(20.0) * (T::SQRT_2() * erfc_inv(T::lit(2.0) * ber)).log10())
}

/// Inverse of [`q_db_from_ber`].
pub fn ber_from_q_db<T: Scalar>(q_db: T) -> Result<T> {
    if !q_db.is_finite() {
        return Err(domain(format!("Q must be finite, got {q_db}")));
    }
    let q = T::lit(10.0).powf(q_db / T::lit(20.0));
    Ok(T::lit(0.5) * erfc(q / T::SQRT_2()))
}

/// In-band SNR to GSNR normalized to the 12.5 GHz reference bandwidth.
/// `symbol_rate` must be positive.
pub fn normalize_gsnr<T: Scalar>(snr_db: T, symbol_rate: T) -> T {
    snr_db + T::lit(10.0) * (symbol_rate / T::lit(REFERENCE_BANDWIDTH_GHZ)).log10()
}

/// Inverse of [`normalize_gsnr`].
pub fn denormalize_gsnr<T: Scalar>(gsnr_db: T, symbol_rate: T) -> T {
    gsnr_db - T::lit(10.0) * (symbol_rate / T::lit(REFERENCE_BANDWIDTH_GHZ)).log10()
}

/// Normalized GSNR an entry needs at the FEC threshold, plus its margin.
pub fn required_gsnr<T: Scalar>(entry: &CatalogEntry<T>, metric: &MetricConfig<T>) -> Result<T> {
    let snr = snr_from_ber(&entry.format, metric.fec_threshold_ber)?;
    Ok(normalize_gsnr(snr.snr_db, entry.symbol_rate) + entry.margin_db)
}

/// Normalized GSNR implied by a Q reading taken with `format` at `symbol_rate`.
pub fn gsnr_from_q_db<T: Scalar>(format: &ModulationFormat, symbol_rate: T, q_db: T) -> Result<T> {
    let ber = ber_from_q_db(q_db)?;
    if !(ber > T::zero()) {
        // Q beyond the double-precision BER range: the reading saturates high
        return Ok(normalize_gsnr(T::lit(SNR_SEARCH_MAX_DB), symbol_rate));
    }
    Ok(normalize_gsnr(
        snr_from_ber(format, ber)?.snr_db,
        symbol_rate,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ber_examples() {
        let qpsk = ModulationFormat::dp_qpsk();
        let qam = ModulationFormat::dp_16qam();
        assert!(ber_from_snr(&qpsk, 40.0) < 1e-12);
        for snr in [0.0, 5.0, 10.0, 15.0] {
            assert!(ber_from_snr(&qam, snr) > ber_from_snr(&qpsk, snr));
        }
        assert!(ber_from_snr(&qpsk, -200.0_f64) <= 0.5);
    }

    #[test]
    fn snr_from_ber_saturates_near_half() {
        let qpsk = ModulationFormat::dp_qpsk();
        let est = snr_from_ber(&qpsk, 0.499_999).unwrap();
        assert!(est.saturated);
        assert_eq!(est.snr_db, -30.0);
        assert!(snr_from_ber(&qpsk, 0.5).is_err());
        assert!(snr_from_ber(&qpsk, 0.0).is_err());
        assert!(!snr_from_ber(&qpsk, 1e-3).unwrap().saturated);
    }

    #[test]
    fn q_examples() {
        assert_relative_eq!(q_db_from_ber(2.3e-2).unwrap(), 6.00, epsilon = 0.01);
        assert_relative_eq!(q_db_from_ber(1e-3).unwrap(), 9.80, epsilon = 0.01);
        assert!(q_db_from_ber(0.5).is_err());
        assert!(ber_from_q_db(f64::NEG_INFINITY).is_err());
        assert_relative_eq!(
            ber_from_q_db(q_db_from_ber(2.3e-2).unwrap()).unwrap(),
            2.3e-2,
            max_relative = 1e-9
        );
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_gsnr(10.0, 12.5), 10.0);
        assert_relative_eq!(normalize_gsnr(10.0, 25.0), 13.0103, epsilon = 1e-4);
        assert_relative_eq!(normalize_gsnr(10.0, 69.0), 17.42, epsilon = 0.005);
        assert_relative_eq!(
            denormalize_gsnr(normalize_gsnr(10.0, 69.0), 69.0),
            10.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn required_gsnr_composition() {
        let metric = MetricConfig::default();
        let e = CatalogEntry::new("q", ModulationFormat::dp_qpsk(), 12.5, 50.0).with_margin(0.0);
        let base = snr_from_ber(&e.format, 2e-2).unwrap().snr_db;
        assert_eq!(required_gsnr(&e, &metric).unwrap(), base);
        let e1 = e.clone().with_margin(1.0);
        assert_relative_eq!(
            required_gsnr(&e1, &metric).unwrap(),
            base + 1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gsnr_from_q_inverts_forward_chain() {
        for e in builtin_catalog::<f64>() {
            let g = 17.3;
            let ber = ber_from_snr(&e.format, denormalize_gsnr(g, e.symbol_rate));
            let q = q_db_from_ber(ber).unwrap();
            let back = gsnr_from_q_db(&e.format, e.symbol_rate, q).unwrap();
            assert!((back - g).abs() < 1e-3, "{}: {back}", e.id);
        }
    }

    #[test]
    fn builtin_catalog_is_valid() {
        let cat = builtin_catalog::<f64>();
        assert_eq!(cat.len(), 6);
        for e in &cat {
            e.validate().unwrap();
            assert!([4, 6, 8].contains(&e.format.bits_per_symbol));
        }
    }

    #[test]
    fn single_precision_chain() {
        let qpsk = ModulationFormat::dp_qpsk();
        let ber: f32 = ber_from_snr(&qpsk, 8.0);
        let snr = snr_from_ber(&qpsk, ber).unwrap().snr_db;
        assert!((snr - 8.0).abs() < 0.01);
    }

    #[test]
    fn sample_accessors() {
        assert_eq!(GsnrSample::GsnrDb(12.5).value(), Some(12.5));
        assert!(GsnrSample::<f64>::Outage.is_outage());
        assert_eq!(GsnrSample::<f64>::Outage.value(), None);
    }
}
