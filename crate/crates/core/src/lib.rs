//! Black-box assessment of leased optical spectrum.
//!
//! A deterministic line-system simulator ([`line`]) sits behind a narrow
//! transceiver interface ([`probe_api`]). The probe engine ([`probe`]) sweeps
//! carriers with several symbol-rate/format configurations and converts Q
//! readings to symbol-rate-normalized GSNR; [`diagnosis`] turns the sweeps
//! into bandwidth, misalignment, tilt and crosstalk findings and a carrier plan.
//!
//! Everything numeric is generic over [`Scalar`] (`f32`/`f64`). The aliases
//! at the crate root fix it to `f64`, which is what absolute optical
//! frequencies need.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnosis;
pub mod error;
pub mod formats;
pub mod line;
pub mod num;
pub mod probe;
pub mod probe_api;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use num::Scalar;

pub type FrequencyGrid = spectral::FrequencyGrid<f64>;
pub type SignalSpectrum = spectral::SignalSpectrum<f64>;
pub type FilterElement = spectral::FilterElement<f64>;
pub type Ripple = spectral::Ripple<f64>;
pub type CatalogEntry = formats::CatalogEntry<f64>;
pub type MetricConfig = formats::MetricConfig<f64>;
pub type GsnrSample = formats::GsnrSample<f64>;
pub type MediaChannel = probe_api::MediaChannel<f64>;
pub type PowerRule = probe_api::PowerRule<f64>;
pub type ProbeConfig = probe_api::ProbeConfig<f64>;
pub type MeasurementResult = probe_api::MeasurementResult<f64>;
pub type Scenario = line::Scenario<f64>;
pub type GsnrProfile = line::GsnrProfile<f64>;
pub type NeighborChannel = line::NeighborChannel<f64>;
pub type Session = line::Session<f64>;
pub type MultiChannelBed = line::MultiChannelBed<f64>;
pub type SweepPlan = probe::SweepPlan<f64>;
pub type SweepResult = probe::SweepResult<f64>;
pub type CrosstalkScan = probe::CrosstalkScan<f64>;
