//! Extended channel probing: multi-format frequency sweeps against a
//! [`BlackBoxProbe`] and adjacent-channel crosstalk scans against a
//! [`ChannelTestbed`].
//!
//! Nothing here sees the line model; only `probe_api` and `formats` are used.

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::formats::{gsnr_from_q_db, GsnrSample};
use crate::num::Scalar;
use crate::probe_api::{BlackBoxProbe, ChannelTestbed, MediaChannel, ProbeConfig};

/// Sweep step of the field procedure, GHz.
pub const DEFAULT_STEP_GHZ: f64 = 6.25;

fn default_step<T: Scalar>() -> T {
    T::lit(DEFAULT_STEP_GHZ)
}

fn default_trials() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct SweepPlan<T> {
    pub slot: MediaChannel<T>,
    pub probes: Vec<ProbeConfig<T>>,
    #[serde(default = "default_step")]
    pub step: T,
    #[serde(default = "default_trials")]
    pub trials_per_point: u32,
}

impl<T: Scalar> SweepPlan<T> {
    pub fn new(slot: MediaChannel<T>, probes: Vec<ProbeConfig<T>>) -> Self {
        Self {
            slot,
            probes,
            step: default_step(),
            trials_per_point: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.slot.validate()?;
        if self.probes.is_empty() {
            return Err(config("sweep plan has no probes"));
        }
        for p in &self.probes {
            p.validate()?;
        }
        if !(self.step > T::zero() && self.step.is_finite()) {
            return Err(config(format!("sweep step must be > 0, got {}", self.step)));
        }
        if self.trials_per_point == 0 {
            return Err(config("trials_per_point must be >= 1"));
        }
        Ok(())
    }

    /// Carrier grid from the slot start to the last step at or before its end.
    pub fn carriers(&self) -> Vec<T> {
        step_grid(self.slot.start(), self.slot.end(), self.step)
    }
}

fn step_grid<T: Scalar>(start: T, end: T, step: T) -> Vec<T> {
    let n = ((end - start) / step * (T::one() + T::lit(1e-12)))
        .floor()
        .to_usize()
        .unwrap_or(0);
    (0..=n).map(|i| start + step * T::count(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct SweepPoint<T> {
    pub carrier: T,
    pub sample: GsnrSample<T>,
    /// Median raw Q over the trials; absent on outage.
    pub q_db: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct ProbeCurve<T> {
    pub probe: ProbeConfig<T>,
    pub points: Vec<SweepPoint<T>>,
}

impl<T: Scalar> ProbeCurve<T> {
    pub fn finite_points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.points
            .iter()
            .filter_map(|p| p.sample.value().map(|g| (p.carrier, g)))
    }

    pub fn finite_count(&self) -> usize {
        self.finite_points().count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct SweepResult<T> {
    pub slot: MediaChannel<T>,
    pub step: T,
    pub trials_per_point: u32,
    pub curves: Vec<ProbeCurve<T>>,
}

impl<T: Scalar> SweepResult<T> {
    pub fn carriers(&self) -> Vec<T> {
        self.curves
            .first()
            .map(|c| c.points.iter().map(|p| p.carrier).collect())
            .unwrap_or_default()
    }

    pub fn curve(&self, probe_id: &str) -> Option<&ProbeCurve<T>> {
        self.curves.iter().find(|c| c.probe.id() == probe_id)
    }
}

/// Median of the readings, an outage counting as −∞. A strict majority of
/// outages yields an outage; for an even count with one infinite middle
/// element the finite one is taken.
fn aggregate<T: Scalar>(readings: &[Option<T>]) -> Option<T> {
    let n = readings.len();
    let outages = readings.iter().filter(|r| r.is_none()).count();
    if n == 0 || 2 * outages > n {
        return None;
    }
    let mut v: Vec<T> = readings
        .iter()
        .map(|r| r.unwrap_or(T::neg_infinity()))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("Q readings are not NaN"));
    if n % 2 == 1 {
        return Some(v[n / 2]);
    }
    let (a, b) = (v[n / 2 - 1], v[n / 2]);
    Some(if a.is_finite() {
        (a + b) / T::lit(2.0)
    } else {
        b
    })
}

/// Normalized GSNR at one carrier from the median of `trials` readings,
/// plus the median raw Q.
pub fn probe_point<T: Scalar, S: BlackBoxProbe<T> + ?Sized>(
    session: &mut S,
    carrier: T,
    probe: &ProbeConfig<T>,
    trials: u32,
) -> Result<(GsnrSample<T>, Option<T>)> {
    if trials == 0 {
        return Err(config("trials must be >= 1"));
    }
    session.set_carrier(carrier)?;
    session.set_probe(probe)?;
    let mut readings = Vec::with_capacity(trials as usize);
    for t in 0..u64::from(trials) {
        readings.push(session.read_q(t)?.reading.q_db());
    }
    match aggregate(&readings) {
        None => Ok((GsnrSample::Outage, None)),
        Some(q) => {
            let g = gsnr_from_q_db(&probe.entry.format, probe.symbol_rate(), q)?;
            Ok((GsnrSample::GsnrDb(g), Some(q)))
        }
    }
}

/// Sweeps every probe over the plan's carrier grid, edges included.
pub fn run_sweep<T: Scalar, S: BlackBoxProbe<T> + ?Sized>(
    session: &mut S,
    plan: &SweepPlan<T>,
) -> Result<SweepResult<T>> {
    plan.validate()?;
    let carriers = plan.carriers();
    let mut curves = Vec::with_capacity(plan.probes.len());
    for probe in &plan.probes {
        let mut points = Vec::with_capacity(carriers.len());
        for &carrier in &carriers {
            let (sample, q_db) = probe_point(session, carrier, probe, plan.trials_per_point)?;
            points.push(SweepPoint {
                carrier,
                sample,
                q_db,
            });
        }
        curves.push(ProbeCurve {
            probe: probe.clone(),
            points,
        });
    }
    Ok(SweepResult {
        slot: plan.slot,
        step: plan.step,
        trials_per_point: plan.trials_per_point,
        curves,
    })
}

/// Penalty relative to the aligned-grid reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty<T> {
    PenaltyDb(T),
    Outage,
}

impl<T: Scalar> Penalty<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            Penalty::PenaltyDb(v) => Some(v),
            Penalty::Outage => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct ChannelScan<T> {
    pub index: usize,
    pub slot: MediaChannel<T>,
    pub probe_id: String,
    pub reference: GsnrSample<T>,
    /// One entry per offset.
    pub gsnr: Vec<GsnrSample<T>>,
    pub penalty: Vec<Penalty<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct CrosstalkScan<T> {
    pub offsets: Vec<T>,
    /// Index of the swept slot in `channels`.
    pub center_index: usize,
    pub channels: Vec<ChannelScan<T>>,
}

impl<T: Scalar> CrosstalkScan<T> {
    pub fn penalty(&self, channel: usize, offset: T) -> Option<Penalty<T>> {
        let i = self
            .offsets
            .iter()
            .position(|&o| (o - offset).abs() <= T::lit(1e-9))?;
        self.channels.get(channel).map(|c| c.penalty[i])
    }
}

/// Offsets from −slot/2 to +slot/2 in `step` increments, symmetric about 0.
pub fn symmetric_offsets<T: Scalar>(slot_width: T, step: T) -> Vec<T> {
    let half = slot_width / T::lit(2.0);
    let k = (half / step * (T::one() + T::lit(1e-12)))
        .floor()
        .to_i64()
        .unwrap_or(0);
    (-k..=k).map(|i| T::lit(i as f64) * step).collect()
}

/// Moves the carrier of the middle slot across its slot while every other
/// slot keeps a centered `side_probe` carrier, and reports the GSNR
/// penalty of every channel against the aligned (offset 0) reading.
pub fn crosstalk_scan<T: Scalar, B: ChannelTestbed<T>>(
    bed: &B,
    center_probe: &ProbeConfig<T>,
    side_probe: &ProbeConfig<T>,
    offsets: &[T],
    trials: u32,
) -> Result<CrosstalkScan<T>> {
    let slots = bed.slots();
    if slots.len() < 3 || slots.len() % 2 == 0 {
        return Err(config(format!(
            "crosstalk scan needs an odd number (>= 3) of slots, got {}",
            slots.len()
        )));
    }
    let mid = slots.len() / 2;
    let half = slots[mid].width / T::lit(2.0);
    if let Some(o) = offsets.iter().find(|o| !(o.abs() <= half)) {
        return Err(domain(format!(
            "offset {o} GHz exceeds the middle slot half-width {half} GHz"
        )));
    }
    let layout = |offset: T| -> Vec<(T, ProbeConfig<T>)> {
        slots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i == mid {
                    (s.center + offset, center_probe.clone())
                } else {
                    (s.center, side_probe.clone())
                }
            })
            .collect()
    };
    let read = |carriers: &[(T, ProbeConfig<T>)], i: usize| -> Result<GsnrSample<T>> {
        let mut session = bed.open(carriers, i)?;
        let (f, probe) = &carriers[i];
        Ok(probe_point(&mut session, *f, probe, trials)?.0)
    };

    let aligned = layout(T::zero());
    let mut channels = Vec::with_capacity(slots.len());
    for (i, slot) in slots.iter().enumerate() {
        channels.push(ChannelScan {
            index: i,
            slot: *slot,
            probe_id: aligned[i].1.id().to_owned(),
            reference: read(&aligned, i)?,
            gsnr: Vec::with_capacity(offsets.len()),
            penalty: Vec::with_capacity(offsets.len()),
        });
    }
    for &offset in offsets {
        let carriers = layout(offset);
        for (i, ch) in channels.iter_mut().enumerate() {
            let g = read(&carriers, i)?;
            let penalty = match (ch.reference.value(), g.value()) {
                (Some(r), Some(v)) => Penalty::PenaltyDb(r - v),
                _ => Penalty::Outage,
            };
            ch.gsnr.push(g);
            ch.penalty.push(penalty);
        }
    }
    Ok(CrosstalkScan {
        offsets: offsets.to_vec(),
        center_index: mid,
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe_api::{MeasurementResult, Reading};

    /// Scripted receiver: Q depends on the trial index only.
    struct Scripted {
        q: Vec<Option<f64>>,
        carrier: f64,
        probe: String,
    }

    impl BlackBoxProbe<f64> for Scripted {
        fn slot(&self) -> MediaChannel<f64> {
            MediaChannel::new(0.0, 100.0)
        }
        fn set_carrier(&mut self, carrier: f64) -> Result<()> {
            self.carrier = carrier;
            Ok(())
        }
        fn set_probe(&mut self, probe: &ProbeConfig<f64>) -> Result<()> {
            self.probe = probe.id().to_owned();
            Ok(())
        }
        fn read_q(&mut self, trial: u64) -> Result<MeasurementResult<f64>> {
            let reading = match self.q[trial as usize] {
                Some(q) => Reading::QDb(q),
                None => Reading::Outage,
            };
            Ok(MeasurementResult {
                carrier: self.carrier,
                probe_id: self.probe.clone(),
                trial,
                reading,
                gsnr: None,
            })
        }
    }

    fn qpsk() -> ProbeConfig<f64> {
        ProbeConfig::new(crate::formats::builtin_catalog::<f64>().remove(0))
    }

    #[test]
    fn carrier_grid_counts() {
        let plan = SweepPlan::new(MediaChannel::new(0.0, 100.0), vec![qpsk()]);
        let c = plan.carriers();
        assert_eq!(c.len(), 17);
        assert_eq!(c[0], -50.0);
        assert_eq!(*c.last().unwrap(), 50.0);
        let plan = SweepPlan { step: 30.0, ..plan };
        assert_eq!(plan.carriers(), vec![-50.0, -20.0, 10.0, 40.0]);
    }

    #[test]
    fn majority_outage_and_median() {
        let mut s = Scripted {
            q: vec![None, Some(8.0), None],
            carrier: 0.0,
            probe: String::new(),
        };
        assert_eq!(
            probe_point(&mut s, 0.0, &qpsk(), 3).unwrap(),
            (GsnrSample::Outage, None)
        );
        s.q = vec![Some(9.0), None, Some(8.0)];
        assert_eq!(probe_point(&mut s, 0.0, &qpsk(), 3).unwrap().1, Some(8.0));
        s.q = vec![Some(9.0), None];
        assert_eq!(probe_point(&mut s, 0.0, &qpsk(), 2).unwrap().1, Some(9.0));
        s.q = vec![Some(9.0), Some(7.0), Some(8.0), Some(10.0)];
        assert_eq!(probe_point(&mut s, 0.0, &qpsk(), 4).unwrap().1, Some(8.5));
        assert!(probe_point(&mut s, 0.0, &qpsk(), 0).is_err());
    }

    #[test]
    fn empty_plan_rejected() {
        let mut s = Scripted {
            q: vec![Some(8.0)],
            carrier: 0.0,
            probe: String::new(),
        };
        let plan = SweepPlan::new(MediaChannel::new(0.0, 100.0), vec![]);
        assert!(matches!(
            run_sweep(&mut s, &plan),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn offsets_cover_slot() {
        let o = symmetric_offsets(75.0, 6.25);
        assert_eq!(o.len(), 13);
        assert_eq!(o[0], -37.5);
        assert_eq!(o[6], 0.0);
    }
}
