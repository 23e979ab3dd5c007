//! Findings derived from sweep curves: effective bandwidth, center-frequency
//! misalignment, tilt and ripple, carrier plans, guard bands and
//! pre-emphasis.
//!
//! Works on [`SweepResult`] data only.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, undiagnosable, Result};
use crate::formats::{required_gsnr, CatalogEntry, MetricConfig};
use crate::num::{db, undb, Scalar};
use crate::probe::{Penalty, ProbeCurve, SweepResult};
use crate::probe_api::DEFAULT_ROLL_OFF;
use crate::spectral::{overlap_coefficient, SignalSpectrum};

/// Default "noticeable penalty" threshold, dB.
pub const DEFAULT_PENALTY_THRESHOLD_DB: f64 = 0.5;
/// Peaks flatter than this second difference (dB) carry no position information.
pub const MIN_PEAK_CURVATURE_DB: f64 = 0.05;
/// Share of finite samples a curve needs to be used for tilt estimation.
pub const TILT_MIN_FINITE_FRACTION: f64 = 0.8;
pub const DEFAULT_GUARD_PENALTY_DB: f64 = 0.1;
pub const DEFAULT_PRE_EMPHASIS_CLIP_DB: f64 = 3.0;

const GUARD_TOLERANCE_GHZ: f64 = 0.01;
const OVERLAP_RESOLUTION_GHZ: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct OffsetEstimate<T> {
    /// Fitted peak minus nominal slot center, GHz.
    pub offset: T,
    /// No probe had a usable peak; `offset` is 0.
    pub low_confidence: bool,
    pub probes_used: Vec<String>,
}

fn finite_index<T: Scalar>(curve: &ProbeCurve<T>) -> Vec<(usize, T, T)> {
    curve
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.sample.value().map(|g| (i, p.carrier, g)))
        .collect()
}

fn argmax<T: Scalar>(points: &[(usize, T, T)]) -> Option<(usize, T, T)> {
    points.iter().copied().fold(None, |best, p| match best {
        Some(b) if b.2 >= p.2 => Some(b),
        _ => Some(p),
    })
}

// vertex and its variance (unit noise per sample) of the parabola through
// (−h, a), (0, b), (h, c)
fn parabola_vertex<T: Scalar>(h: T, a: T, b: T, c: T) -> Option<(T, T)> {
    let two = T::lit(2.0);
    let d = a - two * b + c;
    if !(-d >= T::lit(MIN_PEAK_CURVATURE_DB)) {
        return None;
    }
    let n = a - c;
    let delta = h * n / (two * d);
    let d2 = d * d;
    let da = h * (d - n) / (two * d2);
    let db_ = h * n / d2;
    let dc = -h * (d + n) / (two * d2);
    Some((delta, da * da + db_ * db_ + dc * dc))
}

/// Center-frequency misalignment from three-point parabolic peak fits,
/// averaged over probes with inverse-variance weights.
pub fn estimate_center_offset<T: Scalar>(sweep: &SweepResult<T>) -> Result<OffsetEstimate<T>> {
    if !sweep.curves.iter().any(|c| c.finite_count() >= 3) {
        return Err(undiagnosable(
            "no probe has three finite samples to locate a peak",
        ));
    }
    let mut num = T::zero();
    let mut den = T::zero();
    let mut used = Vec::new();
    for curve in &sweep.curves {
        let finite = finite_index(curve);
        if finite.len() < 3 {
            continue;
        }
        let Some((i, f0, y0)) = argmax(&finite) else {
            continue;
        };
        if i == 0 || i + 1 == curve.points.len() {
            continue;
        }
        let (Some(ym), Some(yp)) = (
            curve.points[i - 1].sample.value(),
            curve.points[i + 1].sample.value(),
        ) else {
            continue;
        };
        let h = curve.points[i + 1].carrier - f0;
        let Some((delta, var)) = parabola_vertex(h, ym, y0, yp) else {
            continue;
        };
        let w = var.recip();
        num = num + w * (f0 + delta - sweep.slot.center);
        den = den + w;
        used.push(curve.probe.id().to_owned());
    }
    if used.is_empty() {
        return Ok(OffsetEstimate {
            offset: T::zero(),
            low_confidence: true,
            probes_used: used,
        });
    }
    Ok(OffsetEstimate {
        offset: num / den,
        low_confidence: false,
        probes_used: used,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct BandwidthBounds<T> {
    pub lower_bound: T,
    pub upper_bound: T,
    pub threshold_db: T,
    /// Probe whose penalty-free range sets the upper bound.
    pub reference_probe: String,
    /// Carrier range (GHz) over which that probe stays within the threshold.
    pub penalty_free_extent: T,
    /// The upper bound is below the slot width.
    pub filter_limited: bool,
    /// Only one finite sample was available.
    pub degenerate: bool,
}

/// Bounds on the effective optical channel bandwidth.
///
/// The upper bound is the narrowest probe's occupied width plus the carrier
/// range over which it stays within `threshold_db` of its peak, plus one
/// step. The lower bound is the occupied width of the widest probe whose
/// best reading is within `threshold_db` of the narrowest probe's peak
/// (it passes essentially unfiltered), capped at the upper bound.
pub fn estimate_effective_bandwidth<T: Scalar>(
    sweep: &SweepResult<T>,
    threshold_db: T,
) -> Result<BandwidthBounds<T>> {
    if !(threshold_db > T::zero()) {
        return Err(domain(format!(
            "penalty threshold must be > 0, got {threshold_db}"
        )));
    }
    let width = |c: &ProbeCurve<T>| c.probe.occupied_width();
    let narrowest = sweep
        .curves
        .iter()
        .filter(|c| c.finite_count() > 0)
        .min_by(|a, b| width(a).partial_cmp(&width(b)).unwrap_or(Ordering::Equal))
        .ok_or_else(|| undiagnosable("no finite readings in the sweep"))?;
    let finite = finite_index(narrowest);
    let (ipk, _, peak) = argmax(&finite).expect("curve has finite points");
    let within = |i: usize| {
        narrowest.points[i]
            .sample
            .value()
            .is_some_and(|g| peak - g <= threshold_db)
    };
    let mut lo = ipk;
    while lo > 0 && within(lo - 1) {
        lo -= 1;
    }
    let mut hi = ipk;
    while hi + 1 < narrowest.points.len() && within(hi + 1) {
        hi += 1;
    }
    let extent = narrowest.points[hi].carrier - narrowest.points[lo].carrier;
    let upper = width(narrowest) + extent + sweep.step;

    let lower = sweep
        .curves
        .iter()
        .filter(|c| {
            let best = c
                .finite_points()
                .map(|(_, g)| g)
                .fold(T::neg_infinity(), T::max);
            best.is_finite() && peak - best <= threshold_db
        })
        .map(width)
        .fold(width(narrowest), T::max)
        .min(upper);

    Ok(BandwidthBounds {
        lower_bound: lower,
        upper_bound: upper,
        threshold_db,
        reference_probe: narrowest.probe.id().to_owned(),
        penalty_free_extent: extent,
        filter_limited: upper < sweep.slot.width,
        degenerate: finite.len() == 1,
    })
}

/// The curve tilt and pre-emphasis are read from: the widest probe with at
/// least 80 % finite samples, else the narrowest.
pub fn reference_curve<T: Scalar>(sweep: &SweepResult<T>) -> Option<&ProbeCurve<T>> {
    let width = |c: &&ProbeCurve<T>| c.probe.occupied_width();
    let cmp = |a: &&ProbeCurve<T>, b: &&ProbeCurve<T>| {
        width(a).partial_cmp(&width(b)).unwrap_or(Ordering::Equal)
    };
    let frac = T::lit(TILT_MIN_FINITE_FRACTION);
    sweep
        .curves
        .iter()
        .filter(|c| {
            !c.points.is_empty() && T::count(c.finite_count()) >= frac * T::count(c.points.len())
        })
        .max_by(cmp)
        .or_else(|| sweep.curves.iter().min_by(cmp))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TiltRipple<T> {
    /// Fitted slope times the slot width, dB.
    pub tilt_db: T,
    /// Peak-to-peak residual of the linear fit, dB.
    pub ripple_pp_db: T,
    pub reference_probe: String,
}

/// Least-squares tilt and residual ripple of the reference curve.
pub fn estimate_tilt_ripple<T: Scalar>(sweep: &SweepResult<T>) -> Result<TiltRipple<T>> {
    let curve = reference_curve(sweep).ok_or_else(|| undiagnosable("sweep has no curves"))?;
    let pts: Vec<(T, T)> = curve.finite_points().collect();
    if pts.len() < 4 {
        return Err(undiagnosable(format!(
            "{} has {} finite samples, tilt needs at least 4",
            curve.probe.id(),
            pts.len()
        )));
    }
    let n = T::count(pts.len());
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxy = pts
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = pts
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let slope = sxy / sxx;
    let (rmin, rmax) = pts
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
            let r = p.1 - (my + slope * (p.0 - mx));
            (lo.min(r), hi.max(r))
        });
    Ok(TiltRipple {
        tilt_db: slope * sweep.slot.width,
        ripple_pp_db: rmax - rmin,
        reference_probe: curve.probe.id().to_owned(),
    })
}

/// Suggested launch-power offsets `clip(peak − GSNR(f), 0, clip_db)` for
/// every finite sample of the reference curve.
pub fn pre_emphasis<T: Scalar>(sweep: &SweepResult<T>, clip_db: T) -> Result<Vec<(T, T)>> {
    if !(clip_db >= T::zero()) {
        return Err(domain(format!("clip must be >= 0, got {clip_db}")));
    }
    let Some(curve) = reference_curve(sweep) else {
        return Ok(Vec::new());
    };
    let peak = curve
        .finite_points()
        .map(|(_, g)| g)
        .fold(T::neg_infinity(), T::max);
    Ok(curve
        .finite_points()
        .map(|(f, g)| (f, (peak - g).max(T::zero()).min(clip_db)))
        .collect())
}

/// Penalty of every sample against the probe's own peak.
pub fn penalty_curves<T: Scalar>(sweep: &SweepResult<T>) -> Vec<PenaltyCurve<T>> {
    sweep
        .curves
        .iter()
        .map(|c| {
            let peak = c
                .finite_points()
                .map(|(_, g)| g)
                .fold(T::neg_infinity(), T::max);
            let points = c
                .points
                .iter()
                .map(|p| {
                    let pen = match p.sample.value() {
                        Some(g) => Penalty::PenaltyDb(peak - g),
                        None => Penalty::Outage,
                    };
                    (p.carrier, pen)
                })
                .collect();
            PenaltyCurve {
                probe_id: c.probe.id().to_owned(),
                points,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PlannedCarrier<T> {
    pub center: T,
    pub entry_id: String,
    pub symbol_rate: T,
    pub net_data_rate: T,
    pub occupied_width: T,
    pub predicted_gsnr_db: T,
    pub required_gsnr_db: T,
    /// Predicted minus required, ≥ 0.
    pub margin_db: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Shortfall<T> {
    pub entry_id: String,
    pub required_gsnr_db: T,
    /// Best predicted minus required over all positions; `None` when the
    /// entry never fits spectrally.
    pub best_margin_db: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct CarrierPlan<T> {
    pub guard: T,
    pub carriers: Vec<PlannedCarrier<T>>,
    /// Entries that were never feasible anywhere in the slot.
    pub shortfalls: Vec<Shortfall<T>>,
}

impl<T: Scalar> CarrierPlan<T> {
    pub fn total_rate(&self) -> T {
        self.carriers
            .iter()
            .fold(T::zero(), |a, c| a + c.net_data_rate)
    }
}

// linear interpolation on finite samples; None if x is off the curve or
// next to an outage
fn interpolate<T: Scalar>(curve: &ProbeCurve<T>, x: T) -> Option<T> {
    let pts = &curve.points;
    let eps = T::lit(1e-9);
    if pts.is_empty() || x < pts[0].carrier - eps || x > pts[pts.len() - 1].carrier + eps {
        return None;
    }
    let j = pts.iter().position(|p| p.carrier >= x - eps)?;
    if (pts[j].carrier - x).abs() <= eps {
        return pts[j].sample.value();
    }
    let (a, b) = (&pts[j - 1], &pts[j]);
    let (ya, yb) = (a.sample.value()?, b.sample.value()?);
    let t = (x - a.carrier) / (b.carrier - a.carrier);
    Some(ya + (yb - ya) * t)
}

// minimum of the curve over probe centers [c − s, c + s], grid points included
fn min_over<T: Scalar>(curve: &ProbeCurve<T>, center: T, half_span: T) -> Option<T> {
    let (lo, hi) = (center - half_span, center + half_span);
    let mut m = interpolate(curve, lo)?.min(interpolate(curve, hi)?);
    for p in curve
        .points
        .iter()
        .filter(|p| p.carrier > lo && p.carrier < hi)
    {
        m = m.min(p.sample.value()?);
    }
    Some(m)
}

struct Candidate<'a, T> {
    entry: &'a CatalogEntry<T>,
    required: T,
    width: T,
    curve: &'a ProbeCurve<T>,
}

impl<T: Scalar> Candidate<'_, T> {
    // GSNR predicted for the entry centered at `c`: the nearest-rate probe's
    // curve over the centers where that probe's band stays inside the entry's
    fn predicted(&self, c: T) -> Option<T> {
        let half = ((self.width - self.curve.probe.occupied_width()) / T::lit(2.0)).max(T::zero());
        min_over(self.curve, c, half)
    }
}

/// Greedy left-to-right carrier packing.
///
/// From the packing cursor, each catalog entry is tried at the first sweep
/// carrier where its occupied band starts at or after the cursor and ends
/// inside the slot. Among entries whose predicted GSNR clears
/// `required_gsnr`, the highest net rate wins, then the lower symbol rate,
/// then the id. The cursor then moves past the placed band plus `guard`.
/// If nothing fits, the cursor advances one sweep step.
pub fn recommend_carriers<T: Scalar>(
    sweep: &SweepResult<T>,
    catalog: &[CatalogEntry<T>],
    guard: T,
    metric: &MetricConfig<T>,
) -> Result<CarrierPlan<T>> {
    if catalog.is_empty() {
        return Err(config("catalog is empty"));
    }
    if !(guard >= T::zero()) {
        return Err(domain(format!("guard must be >= 0, got {guard}")));
    }
    if sweep.curves.is_empty() {
        return Err(undiagnosable("sweep has no curves"));
    }
    let mut cands = Vec::with_capacity(catalog.len());
    for entry in catalog {
        entry.validate()?;
        let curve = sweep
            .curves
            .iter()
            .min_by(|a, b| {
                let da = (a.probe.symbol_rate() - entry.symbol_rate).abs();
                let db_ = (b.probe.symbol_rate() - entry.symbol_rate).abs();
                da.partial_cmp(&db_).unwrap_or(Ordering::Equal)
            })
            .expect("non-empty curves");
        cands.push(Candidate {
            entry,
            required: required_gsnr(entry, metric)?,
            width: (T::one() + curve.probe.roll_off) * entry.symbol_rate,
            curve,
        });
    }
    cands.sort_by(|a, b| {
        b.entry
            .net_data_rate
            .partial_cmp(&a.entry.net_data_rate)
            .unwrap_or(Ordering::Equal)
            .then(
                a.entry
                    .symbol_rate
                    .partial_cmp(&b.entry.symbol_rate)
                    .unwrap_or(Ordering::Equal),
            )
            .then_with(|| a.entry.id.cmp(&b.entry.id))
    });

    let carriers_grid = sweep.carriers();
    let eps = T::lit(1e-9);
    let slot_end = sweep.slot.end() - sweep.slot.guard_band_each_side;
    let first_center = |cand: &Candidate<'_, T>, cursor: T| -> Option<T> {
        let half = cand.width / T::lit(2.0);
        carriers_grid
            .iter()
            .copied()
            .find(|&c| c - half >= cursor - eps)
            .filter(|&c| c + half <= slot_end + eps)
    };

    let mut plan = Vec::new();
    let mut cursor = sweep.slot.start() + sweep.slot.guard_band_each_side;
    while cursor < slot_end {
        let pick = cands.iter().find_map(|cand| {
            let c = first_center(cand, cursor)?;
            let g = cand.predicted(c)?;
            (g >= cand.required).then_some((cand, c, g))
        });
        match pick {
            Some((cand, c, g)) => {
                plan.push(PlannedCarrier {
                    center: c,
                    entry_id: cand.entry.id.clone(),
                    symbol_rate: cand.entry.symbol_rate,
                    net_data_rate: cand.entry.net_data_rate,
                    occupied_width: cand.width,
                    predicted_gsnr_db: g,
                    required_gsnr_db: cand.required,
                    margin_db: g - cand.required,
                });
                cursor = c + cand.width / T::lit(2.0) + guard;
            }
            None => cursor = cursor + sweep.step,
        }
    }

    let shortfalls = cands
        .iter()
        .filter_map(|cand| {
            let half = cand.width / T::lit(2.0);
            let best = carriers_grid
                .iter()
                .filter(|&&c| {
                    c - half >= sweep.slot.start() - eps && c + half <= sweep.slot.end() + eps
                })
                .filter_map(|&c| cand.predicted(c))
                .fold(None, |m: Option<T>, g| Some(m.map_or(g, |m| m.max(g))));
            let margin = best.map(|g| g - cand.required);
            match margin {
                Some(m) if m >= T::zero() => None,
                _ => Some(Shortfall {
                    entry_id: cand.entry.id.clone(),
                    required_gsnr_db: cand.required,
                    best_margin_db: margin,
                }),
            }
        })
        .collect();

    Ok(CarrierPlan {
        guard,
        carriers: plan,
        shortfalls,
    })
}

/// One side of a guard-band computation: a catalog entry and its roll-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Shaped<T> {
    pub entry: CatalogEntry<T>,
    pub roll_off: T,
}

impl<T: Scalar> Shaped<T> {
    pub fn new(entry: CatalogEntry<T>, roll_off: T) -> Self {
        Self { entry, roll_off }
    }

    fn spectrum(&self) -> Result<SignalSpectrum<T>> {
        SignalSpectrum::new(self.entry.symbol_rate, self.roll_off, T::zero())
    }
}

/// Crosstalk penalty (dB) between two equal-power carriers spaced `spacing`
/// GHz apart on a link of normalized GSNR `link_gsnr_db`, worst of the two
/// directions: `10·log10(1 + g·χ)`.
pub fn pair_penalty_db<T: Scalar>(
    a: &Shaped<T>,
    b: &Shaped<T>,
    spacing: T,
    link_gsnr_db: T,
) -> Result<T> {
    let (sa, sb) = (a.spectrum()?, b.spectrum()?);
    let res = T::lit(OVERLAP_RESOLUTION_GHZ).min(sa.symbol_rate.min(sb.symbol_rate) / T::lit(20.0));
    let chi = overlap_coefficient(&sa, &sb, spacing, res)?
        .max(overlap_coefficient(&sb, &sa, spacing, res)?);
    Ok(db(T::one() + undb(link_gsnr_db) * chi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct GuardBand<T> {
    pub entry_a: String,
    pub entry_b: String,
    /// Smallest center spacing meeting the penalty limit, GHz.
    pub min_spacing: T,
    /// `min_spacing` minus the two Nyquist half-widths `(SR_a + SR_b)/2`, floored at 0.
    pub guard: T,
    pub max_penalty_db: T,
    pub link_gsnr_db: T,
}

/// Smallest spacing (bisection to 0.01 GHz) at which one equal-power
/// neighbor costs at most `max_penalty_db`, and the guard band it implies.
pub fn guard_band<T: Scalar>(
    a: &Shaped<T>,
    b: &Shaped<T>,
    max_penalty_db: T,
    link_gsnr_db: T,
) -> Result<GuardBand<T>> {
    if !(max_penalty_db > T::zero()) {
        return Err(domain(format!(
            "max_penalty_db must be > 0, got {max_penalty_db}"
        )));
    }
    if !link_gsnr_db.is_finite() {
        return Err(domain("link GSNR must be finite"));
    }
    let (sa, sb) = (a.spectrum()?, b.spectrum()?);
    let disjoint = (sa.occupied_width() + sb.occupied_width()) / T::lit(2.0);
    let ok =
        |d: T| -> Result<bool> { Ok(pair_penalty_db(a, b, d, link_gsnr_db)? <= max_penalty_db) };
    let min_spacing = if ok(T::zero())? {
        T::zero()
    } else {
        let (mut bad, mut good) = (T::zero(), disjoint);
        while good - bad > T::lit(GUARD_TOLERANCE_GHZ) {
            let mid = (bad + good) / T::lit(2.0);
            if ok(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let nyquist = (sa.symbol_rate + sb.symbol_rate) / T::lit(2.0);
    Ok(GuardBand {
        entry_a: a.entry.id.clone(),
        entry_b: b.entry.id.clone(),
        min_spacing,
        guard: (min_spacing - nyquist).max(T::zero()),
        max_penalty_db,
        link_gsnr_db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct DiagnosisOptions<T> {
    #[serde(default = "default_threshold")]
    pub penalty_threshold_db: T,
    /// Guard between planned carriers, GHz.
    #[serde(default)]
    pub plan_guard: T,
    #[serde(default = "default_guard_penalty")]
    pub guard_max_penalty_db: T,
    /// Link GSNR for guard bands; the sweep's best reading when absent.
    #[serde(default)]
    pub guard_link_gsnr_db: Option<T>,
    #[serde(default = "default_clip")]
    pub pre_emphasis_clip_db: T,
    #[serde(default)]
    pub metric: MetricConfig<T>,
}

fn default_threshold<T: Scalar>() -> T {
    T::lit(DEFAULT_PENALTY_THRESHOLD_DB)
}

fn default_guard_penalty<T: Scalar>() -> T {
    T::lit(DEFAULT_GUARD_PENALTY_DB)
}

fn default_clip<T: Scalar>() -> T {
    T::lit(DEFAULT_PRE_EMPHASIS_CLIP_DB)
}

impl<T: Scalar> Default for DiagnosisOptions<T> {
    fn default() -> Self {
        Self {
            penalty_threshold_db: default_threshold(),
            plan_guard: T::zero(),
            guard_max_penalty_db: default_guard_penalty(),
            guard_link_gsnr_db: None,
            pre_emphasis_clip_db: default_clip(),
            metric: MetricConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PenaltyCurve<T> {
    pub probe_id: String,
    pub points: Vec<(T, Penalty<T>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DiagnosisReport<T> {
    pub options: DiagnosisOptions<T>,
    pub effective_bandwidth: BandwidthBounds<T>,
    pub center_offset: OffsetEstimate<T>,
    pub tilt_ripple: Option<TiltRipple<T>>,
    pub per_probe_penalty_curves: Vec<PenaltyCurve<T>>,
    pub carrier_plan: CarrierPlan<T>,
    pub guard_band_recommendations: Vec<GuardBand<T>>,
    pub pre_emphasis: Vec<(T, T)>,
}

/// Runs every estimator on one sweep. Tilt is reported as absent when the
/// sweep has too few finite points for it; bandwidth and offset failures
/// are errors.
pub fn diagnose<T: Scalar>(
    sweep: &SweepResult<T>,
    catalog: &[CatalogEntry<T>],
    options: &DiagnosisOptions<T>,
) -> Result<DiagnosisReport<T>> {
    let effective_bandwidth = estimate_effective_bandwidth(sweep, options.penalty_threshold_db)?;
    let center_offset = estimate_center_offset(sweep)?;
    let tilt_ripple = match estimate_tilt_ripple(sweep) {
        Ok(t) => Some(t),
        Err(crate::Error::Undiagnosable(_)) => None,
        Err(e) => return Err(e),
    };
    let carrier_plan = recommend_carriers(sweep, catalog, options.plan_guard, &options.metric)?;
    let link = match options.guard_link_gsnr_db {
        Some(g) => g,
        None => sweep
            .curves
            .iter()
            .flat_map(|c| c.finite_points().map(|(_, g)| g))
            .fold(T::neg_infinity(), T::max),
    };
    let roll_off_for = |e: &CatalogEntry<T>| {
        sweep
            .curves
            .iter()
            .min_by(|a, b| {
                let da = (a.probe.symbol_rate() - e.symbol_rate).abs();
                let db_ = (b.probe.symbol_rate() - e.symbol_rate).abs();
                da.partial_cmp(&db_).unwrap_or(Ordering::Equal)
            })
            .map_or(T::lit(DEFAULT_ROLL_OFF), |c| c.probe.roll_off)
    };
    let mut guard_band_recommendations = Vec::new();
    for (i, a) in catalog.iter().enumerate() {
        for b in &catalog[i..] {
            let sa = Shaped::new(a.clone(), roll_off_for(a));
            let sb = Shaped::new(b.clone(), roll_off_for(b));
            guard_band_recommendations.push(guard_band(
                &sa,
                &sb,
                options.guard_max_penalty_db,
                link,
            )?);
        }
    }
    Ok(DiagnosisReport {
        options: *options,
        effective_bandwidth,
        center_offset,
        tilt_ripple,
        per_probe_penalty_curves: penalty_curves(sweep),
        carrier_plan,
        guard_band_recommendations,
        pre_emphasis: pre_emphasis(sweep, options.pre_emphasis_clip_db)?,
    })
}
