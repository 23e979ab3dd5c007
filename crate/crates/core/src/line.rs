//! Ground-truth line-system model and the measurement function behind the
//! black-box probe interface.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::formats::{ber_from_q_db, ber_from_snr, denormalize_gsnr, q_db_from_ber, MetricConfig};
use crate::num::{db, undb, Scalar};
use crate::probe_api::{
    BlackBoxProbe, ChannelTestbed, MeasurementResult, MediaChannel, PowerRule, ProbeConfig, Reading,
};
use crate::spectral::{
    cascade_power_response, integrate, overlap_coefficient, FilterElement, FrequencyGrid, Ripple,
    SignalSpectrum,
};

/// GSNR across the media channel: a level, a linear tilt and sinusoidal ripple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct GsnrProfile<T> {
    /// Normalized GSNR at the channel center, dB.
    pub base_gsnr_db: T,
    /// End-to-end change across the channel width, dB.
    #[serde(default)]
    pub tilt_db: T,
    #[serde(default)]
    pub ripple_components: Vec<Ripple<T>>,
}

impl<T: Scalar> GsnrProfile<T> {
    pub fn flat(base_gsnr_db: T) -> Self {
        Self {
            base_gsnr_db,
            tilt_db: T::zero(),
            ripple_components: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_gsnr_db.is_finite() && self.tilt_db.is_finite()) {
            return Err(config("GSNR profile base and tilt must be finite"));
        }
        for r in &self.ripple_components {
            r.validate()?;
        }
        Ok(())
    }
}

/// A foreign carrier sharing the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct NeighborChannel<T> {
    /// Absolute center.
    pub spectrum: SignalSpectrum<T>,
    /// Relative to the scenario's constant-PSD power rule.
    #[serde(default)]
    pub power_offset_db: T,
}

fn default_one<T: Scalar>() -> T {
    T::one()
}

fn default_beta<T: Scalar>() -> T {
    T::lit(2.0)
}

fn default_sigma<T: Scalar>() -> T {
    T::lit(0.1)
}

/// One route's full parametrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct Scenario<T> {
    pub media_channels: Vec<MediaChannel<T>>,
    /// Filter cascade along the probed path.
    #[serde(default)]
    pub filters: Vec<FilterElement<T>>,
    pub gsnr_profile: GsnrProfile<T>,
    #[serde(default)]
    pub neighbors: Vec<NeighborChannel<T>>,
    /// κ.
    #[serde(default = "default_one")]
    pub crosstalk_coupling: T,
    /// β.
    #[serde(default = "default_beta")]
    pub filtering_exponent: T,
    #[serde(default = "default_sigma")]
    pub measurement_noise_sigma_db: T,
    pub seed: u64,
    /// Simulated optical band and integration resolution.
    pub grid: FrequencyGrid<T>,
    /// Launch rule the neighbors' power offsets refer to.
    #[serde(default)]
    pub neighbor_power_rule: PowerRule<T>,
    #[serde(default)]
    pub metric: MetricConfig<T>,
}

impl<T: Scalar> Scenario<T> {
    /// Single media channel, flat profile, no impairments, no noise, with a
    /// grid reaching 100 GHz beyond the channel at the default resolution.
    pub fn ideal(channel: MediaChannel<T>, base_gsnr_db: T) -> Self {
        let margin = T::lit(100.0);
        Self {
            media_channels: vec![channel],
            filters: Vec::new(),
            gsnr_profile: GsnrProfile::flat(base_gsnr_db),
            neighbors: Vec::new(),
            crosstalk_coupling: T::one(),
            filtering_exponent: default_beta(),
            measurement_noise_sigma_db: T::zero(),
            seed: 0,
            grid: FrequencyGrid {
                start: channel.start() - margin,
                stop: channel.end() + margin,
                resolution: T::lit(crate::spectral::DEFAULT_RESOLUTION_GHZ),
            },
            neighbor_power_rule: PowerRule::default(),
            metric: MetricConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.media_channels.is_empty() {
            return Err(config("scenario needs at least one media channel"));
        }
        for mc in &self.media_channels {
            mc.validate()?;
        }
        for f in &self.filters {
            f.validate()?;
        }
        self.gsnr_profile.validate()?;
        for n in &self.neighbors {
            n.spectrum.validate()?;
            if !n.power_offset_db.is_finite() {
                return Err(config("neighbor power_offset_db must be finite"));
            }
        }
        if !(self.crosstalk_coupling >= T::zero() && self.crosstalk_coupling.is_finite()) {
            return Err(config(format!(
                "crosstalk_coupling must be >= 0, got {}",
                self.crosstalk_coupling
            )));
        }
        if !(self.filtering_exponent >= T::one() && self.filtering_exponent.is_finite()) {
            return Err(config(format!(
                "filtering_exponent must be >= 1, got {}",
                self.filtering_exponent
            )));
        }
        if !(self.measurement_noise_sigma_db >= T::zero()
            && self.measurement_noise_sigma_db.is_finite())
        {
            return Err(config(format!(
                "measurement_noise_sigma_db must be >= 0, got {}",
                self.measurement_noise_sigma_db
            )));
        }
        self.grid.validate()?;
        let span = self.span();
        if self.grid.start > span.start() || self.grid.stop < span.end() {
            return Err(config(format!(
                "grid [{}, {}] must cover the media channels [{}, {}]",
                self.grid.start,
                self.grid.stop,
                span.start(),
                span.end()
            )));
        }
        self.neighbor_power_rule.validate()?;
        self.metric.validate()
    }

    /// The smallest media channel covering every configured one.
    pub fn span(&self) -> MediaChannel<T> {
        let start = self
            .media_channels
            .iter()
            .map(|m| m.start())
            .fold(T::infinity(), T::min);
        let end = self
            .media_channels
            .iter()
            .map(|m| m.end())
            .fold(T::neg_infinity(), T::max);
        MediaChannel::new((start + end) / T::lit(2.0), end - start)
    }

    fn integration_step(&self, spectrum: &SignalSpectrum<T>) -> T {
        self.grid
            .resolution
            .min(spectrum.symbol_rate / T::lit(20.0))
    }

    // victim support clipped to the simulated band
    fn window(&self, spectrum: &SignalSpectrum<T>) -> (T, T) {
        (
            spectrum.lower_edge().max(self.grid.start),
            spectrum.upper_edge().min(self.grid.stop),
        )
    }
}

/// Profile GSNR in dB at absolute frequency `f`; extrapolates linearly
/// outside the channel.
pub fn local_gsnr_db<T: Scalar>(scenario: &Scenario<T>, f: T) -> T {
    let span = scenario.span();
    let p = &scenario.gsnr_profile;
    let ripple = p
        .ripple_components
        .iter()
        .fold(T::zero(), |acc, r| acc + r.value_db(f));
    p.base_gsnr_db + p.tilt_db * (f - span.center) / span.width + ripple
}

/// Fraction ρ of the signal power passed by the filter cascade.
pub fn filter_transmission<T: Scalar>(scenario: &Scenario<T>, spectrum: &SignalSpectrum<T>) -> T {
    if scenario.filters.is_empty() {
        return T::one();
    }
    let h = scenario.integration_step(spectrum);
    let (lo, hi) = scenario.window(spectrum);
    let passed = integrate(lo, hi, h, |f| {
        spectrum.psd_at(f) * cascade_power_response(&scenario.filters, f)
    });
    let total = integrate(spectrum.lower_edge(), spectrum.upper_edge(), h, |f| {
        spectrum.psd_at(f)
    });
    (passed / total).min(T::one())
}

/// Filtering penalty `−β·10·log10 ρ` in dB; `+inf` when nothing passes.
pub fn filtering_penalty_db<T: Scalar>(scenario: &Scenario<T>, spectrum: &SignalSpectrum<T>) -> T {
    let rho = filter_transmission(scenario, spectrum);
    if !(rho > T::zero()) {
        return T::infinity();
    }
    (-scenario.filtering_exponent * db(rho)).max(T::zero())
}

/// Crosstalk noise-to-signal ratio `κ·Σ (P_n/P_v)·χ` seen by `victim`.
pub fn crosstalk_lin<T: Scalar>(
    scenario: &Scenario<T>,
    victim: &SignalSpectrum<T>,
    victim_power_dbm: T,
) -> Result<T> {
    let mut sum = T::zero();
    for n in &scenario.neighbors {
        let s = &n.spectrum;
        let step = scenario
            .grid
            .resolution
            .min(victim.symbol_rate.min(s.symbol_rate) / T::lit(20.0));
        let chi = overlap_coefficient(victim, s, (s.center - victim.center).abs(), step)?;
        if chi > T::zero() {
            let p_n = scenario.neighbor_power_rule.power_dbm(s.symbol_rate) + n.power_offset_db;
            sum = sum + undb(p_n - victim_power_dbm) * chi;
        }
    }
    Ok(scenario.crosstalk_coupling * sum)
}

// S·T-weighted linear average of the profile over the received band
fn profile_gsnr_lin<T: Scalar>(scenario: &Scenario<T>, spectrum: &SignalSpectrum<T>) -> T {
    let h = scenario.integration_step(spectrum);
    let (lo, hi) = scenario.window(spectrum);
    let weight = |f: T| spectrum.psd_at(f) * cascade_power_response(&scenario.filters, f);
    let num = integrate(lo, hi, h, |f| weight(f) * undb(local_gsnr_db(scenario, f)));
    let den = integrate(lo, hi, h, weight);
    num / den
}

/// Effective normalized GSNR (dB) of `probe` at `carrier` before receiver
/// noise; `None` when the filters block the signal entirely.
pub fn effective_gsnr_db<T: Scalar>(
    scenario: &Scenario<T>,
    carrier: T,
    probe: &ProbeConfig<T>,
) -> Result<Option<T>> {
    let victim = probe.spectrum_at(carrier)?;
    let penalty = filtering_penalty_db(scenario, &victim);
    if !penalty.is_finite() {
        return Ok(None);
    }
    let g_profile = profile_gsnr_lin(scenario, &victim);
    let x_t = crosstalk_lin(scenario, &victim, probe.power_dbm())?;
    let inv = (g_profile * undb(-penalty)).recip() + x_t;
    Ok(Some(-db(inv)))
}

// Q before receiver noise; None for a blocked signal
fn noiseless_q_db<T: Scalar>(
    scenario: &Scenario<T>,
    carrier: T,
    probe: &ProbeConfig<T>,
) -> Result<Option<T>> {
    let Some(gsnr) = effective_gsnr_db(scenario, carrier, probe)? else {
        return Ok(None);
    };
    let snr = denormalize_gsnr(gsnr, probe.symbol_rate());
    let ber = ber_from_snr(&probe.entry.format, snr);
    if !(ber < T::lit(0.5)) {
        return Ok(None);
    }
    Ok(Some(q_db_from_ber(ber.max(T::min_positive_value()))?))
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Standard normal deviate keyed by the measurement inputs. The key fills
/// the 256-bit ChaCha seed directly, so distinct inputs give independent streams.
fn noise_deviate(seed: u64, carrier: f64, probe_id: &str, trial: u64) -> f64 {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&carrier.to_bits().to_le_bytes());
    key[16..24].copy_from_slice(&fnv1a(probe_id).to_le_bytes());
    key[24..].copy_from_slice(&trial.to_le_bytes());
    StandardNormal.sample(&mut ChaCha8Rng::from_seed(key))
}

fn noisy_reading<T: Scalar>(
    scenario: &Scenario<T>,
    carrier: T,
    probe_id: &str,
    trial: u64,
    q: Option<T>,
) -> Result<Reading<T>> {
    let Some(q) = q else {
        return Ok(Reading::Outage);
    };
    let sigma = scenario.measurement_noise_sigma_db;
    let q = if sigma > T::zero() {
        q + sigma
            * T::lit(noise_deviate(
                scenario.seed,
                carrier.to_f64_lossy(),
                probe_id,
                trial,
            ))
    } else {
        q
    };
    if ber_from_q_db(q)? > scenario.metric.outage_ber {
        Ok(Reading::Outage)
    } else {
        Ok(Reading::QDb(q))
    }
}

/// One receiver reading. Pure in `(scenario, carrier, probe, trial)`.
pub fn measure<T: Scalar>(
    scenario: &Scenario<T>,
    carrier: T,
    probe: &ProbeConfig<T>,
    trial: u64,
) -> Result<MeasurementResult<T>> {
    probe.validate()?;
    let span = scenario.span();
    if !span.contains(carrier) {
        return Err(domain(format!(
            "carrier {carrier} GHz outside the media channel span [{}, {}]",
            span.start(),
            span.end()
        )));
    }
    let q = noiseless_q_db(scenario, carrier, probe)?;
    let reading = noisy_reading(scenario, carrier, probe.id(), trial, q)?;
    Ok(MeasurementResult {
        carrier,
        probe_id: probe.id().to_owned(),
        trial,
        reading,
        gsnr: None,
    })
}

/// Opens a black-box session on a validated scenario.
pub fn open_session<T: Scalar>(scenario: &Scenario<T>) -> Result<Session<T>> {
    scenario.validate()?;
    Ok(Session::new(Arc::new(scenario.clone())))
}

type CacheKey = (u64, String, u64, u64, u64);

/// Transceiver attached to a simulated line. Exposes only the
/// [`BlackBoxProbe`] surface.
#[derive(Debug)]
pub struct Session<T> {
    scenario: Arc<Scenario<T>>,
    carrier: Option<T>,
    probe: Option<ProbeConfig<T>>,
    cache: HashMap<CacheKey, Option<T>>,
}

impl<T: Scalar> Session<T> {
    fn new(scenario: Arc<Scenario<T>>) -> Self {
        Self {
            scenario,
            carrier: None,
            probe: None,
            cache: HashMap::new(),
        }
    }
}

impl<T: Scalar> BlackBoxProbe<T> for Session<T> {
    fn slot(&self) -> MediaChannel<T> {
        self.scenario.span()
    }

    fn set_carrier(&mut self, carrier: T) -> Result<()> {
        let span = self.scenario.span();
        if !span.contains(carrier) {
            return Err(domain(format!(
                "carrier {carrier} GHz outside the slot [{}, {}]",
                span.start(),
                span.end()
            )));
        }
        self.carrier = Some(carrier);
        Ok(())
    }

    fn set_probe(&mut self, probe: &ProbeConfig<T>) -> Result<()> {
        probe.validate()?;
        self.probe = Some(probe.clone());
        Ok(())
    }

    fn read_q(&mut self, trial: u64) -> Result<MeasurementResult<T>> {
        let carrier = self.carrier.ok_or_else(|| config("carrier not set"))?;
        let probe = self.probe.as_ref().ok_or_else(|| config("probe not set"))?;
        let key = (
            carrier.to_f64_lossy().to_bits(),
            probe.id().to_owned(),
            probe.roll_off.to_f64_lossy().to_bits(),
            probe.power_dbm().to_f64_lossy().to_bits(),
            probe.symbol_rate().to_f64_lossy().to_bits(),
        );
        let q = match self.cache.get(&key) {
            Some(q) => *q,
            None => {
                let q = noiseless_q_db(&self.scenario, carrier, probe)?;
                self.cache.insert(key, q);
                q
            }
        };
        let reading = noisy_reading(&self.scenario, carrier, probe.id(), trial, q)?;
        Ok(MeasurementResult {
            carrier,
            probe_id: probe.id().to_owned(),
            trial,
            reading,
            gsnr: None,
        })
    }
}

/// A line whose media channels each carry one carrier. The scenario's
/// `media_channels` are the slots; its filters, profile and static neighbors
/// apply to every slot.
#[derive(Debug, Clone)]
pub struct MultiChannelBed<T> {
    template: Scenario<T>,
}

impl<T: Scalar> MultiChannelBed<T> {
    pub fn new(template: Scenario<T>) -> Result<Self> {
        template.validate()?;
        let mut slots = template.media_channels.clone();
        slots.sort_by(|a, b| a.center.partial_cmp(&b.center).expect("finite centers"));
        for w in slots.windows(2) {
            if w[0].end() > w[1].start() + T::lit(1e-9) {
                return Err(config("testbed slots must not overlap"));
            }
        }
        let template = Scenario {
            media_channels: slots,
            ..template
        };
        Ok(Self { template })
    }

    pub fn template(&self) -> &Scenario<T> {
        &self.template
    }

    /// Scenario seen by the receiver of slot `observed`: the other carriers
    /// become neighbors at the power their own launch rule sets.
    pub fn scenario_for(
        &self,
        carriers: &[(T, ProbeConfig<T>)],
        observed: usize,
    ) -> Result<Scenario<T>> {
        let slots = &self.template.media_channels;
        if carriers.len() != slots.len() {
            return Err(config(format!(
                "expected {} carriers, got {}",
                slots.len(),
                carriers.len()
            )));
        }
        if observed >= slots.len() {
            return Err(domain(format!("slot index {observed} out of range")));
        }
        let mut s = self.template.clone();
        s.media_channels = vec![slots[observed]];
        let rule = s.neighbor_power_rule;
        for (i, (f, p)) in carriers.iter().enumerate() {
            if i == observed {
                continue;
            }
            let offset = p.power_dbm() - rule.power_dbm(p.symbol_rate());
            s.neighbors.push(NeighborChannel {
                spectrum: p.spectrum_at(*f)?,
                power_offset_db: offset,
            });
        }
        Ok(s)
    }
}

impl<T: Scalar> ChannelTestbed<T> for MultiChannelBed<T> {
    type Session = Session<T>;

    fn slots(&self) -> Vec<MediaChannel<T>> {
        self.template.media_channels.clone()
    }

    fn open(&self, carriers: &[(T, ProbeConfig<T>)], observed: usize) -> Result<Session<T>> {
        open_session(&self.scenario_for(carriers, observed)?)
    }
}
