//! Frequency-domain primitives: raised-cosine signal spectra, super-Gaussian
//! filters and their cascades, trapezoidal integration and spectral overlap.
//!
//! All frequencies are in GHz, symbol rates in GBd. Power spectral densities
//! are normalized to unit total power, so a PSD value is in 1/GHz.

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::num::{undb, Scalar};

/// Default integration resolution in GHz.
pub const DEFAULT_RESOLUTION_GHZ: f64 = 0.05;

/// Uniform sampling of a frequency interval used for numeric integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct FrequencyGrid<T> {
    pub start: T,
    pub stop: T,
    #[serde(default = "default_resolution")]
    pub resolution: T,
}

fn default_resolution<T: Scalar>() -> T {
    T::lit(DEFAULT_RESOLUTION_GHZ)
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(start: T, stop: T, resolution: T) -> Result<Self> {
        let grid = Self {
            start,
            stop,
            resolution,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid over `[start, stop]` whose step is the largest value not exceeding
    /// `max_resolution` that lands exactly on both endpoints.
    pub fn spanning(start: T, stop: T, max_resolution: T) -> Result<Self> {
        if !(stop > start) {
            return Err(domain(format!("empty interval [{start}, {stop}]")));
        }
        let intervals = ((stop - start) / max_resolution).ceil().max(T::one());
        Self::new(start, stop, (stop - start) / intervals)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(config("grid bounds must be finite"));
        }
        if !(self.start < self.stop) {
            return Err(config(format!(
                "grid start ({}) must be below stop ({})",
                self.start, self.stop
            )));
        }
        if !(self.resolution > T::zero()) {
            return Err(config(format!(
                "grid resolution must be > 0, got {}",
                self.resolution
            )));
        }
        if self.len() < 2 {
            return Err(config("grid must contain at least two points"));
        }
        Ok(())
    }

    /// Point count, `floor((stop − start)/resolution) + 1`.
    pub fn len(&self) -> usize {
        // a hair of slack so spans that are exact multiples of the step keep their last point
        let n = ((self.stop - self.start) / self.resolution
            * (T::one() + T::epsilon() * T::lit(8.0)))
        .floor();
        n.to_usize().unwrap_or(0) + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> T {
        self.start + self.resolution * T::count(i)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Trapezoidal integral of `f` over the grid points.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        let n = self.len();
        let half = T::lit(0.5);
        let mut sum = T::zero();
        for i in 0..n {
            let w = if i == 0 || i + 1 == n { half } else { T::one() };
            sum = sum + w * f(self.point(i));
        }
        sum * self.resolution
    }
}

/// Trapezoidal integral over `[a, b]` on an endpoint-aligned grid with step at
/// most `max_step`. An empty or reversed interval integrates to zero.
pub fn integrate<T: Scalar>(a: T, b: T, max_step: T, f: impl FnMut(T) -> T) -> T {
    match FrequencyGrid::spanning(a, b, max_step) {
        Ok(grid) => grid.integrate(f),
        Err(_) => T::zero(),
    }
}

/// Power spectrum of an RRC-shaped optical carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct SignalSpectrum<T> {
    /// GBd.
    pub symbol_rate: T,
    pub roll_off: T,
    /// GHz.
    pub center: T,
}

impl<T: Scalar> SignalSpectrum<T> {
    pub fn new(symbol_rate: T, roll_off: T, center: T) -> Result<Self> {
        let s = Self {
            symbol_rate,
            roll_off,
            center,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate_roll_off(self.symbol_rate, self.roll_off)?;
        if !self.center.is_finite() {
            return Err(config("spectrum center must be finite"));
        }
        Ok(())
    }

    /// `(1 + roll_off) · symbol_rate`.
    pub fn occupied_width(&self) -> T {
        (T::one() + self.roll_off) * self.symbol_rate
    }

    pub fn lower_edge(&self) -> T {
        self.center - self.occupied_width() / T::lit(2.0)
    }

    pub fn upper_edge(&self) -> T {
        self.center + self.occupied_width() / T::lit(2.0)
    }

    /// PSD at absolute frequency `f`.
    pub fn psd_at(&self, f: T) -> T {
        signal_psd(f - self.center, self)
    }

    /// The same spectrum moved to another center frequency.
    pub fn at(&self, center: T) -> Self {
        Self { center, ..*self }
    }
}

fn check_rate_roll_off<T: Scalar>(symbol_rate: T, roll_off: T) -> Result<()> {
    if !(symbol_rate > T::zero() && symbol_rate.is_finite()) {
        return Err(domain(format!(
            "symbol rate must be > 0, got {symbol_rate}"
        )));
    }
    if !(roll_off >= T::zero() && roll_off <= T::one()) {
        return Err(domain(format!(
            "roll-off must lie in [0, 1], got {roll_off}"
        )));
    }
    Ok(())
}

/// Occupied optical bandwidth `(1 + roll_off) · symbol_rate` in GHz.
pub fn occupied_width<T: Scalar>(symbol_rate: T, roll_off: T) -> Result<T> {
    check_rate_roll_off(symbol_rate, roll_off)?;
    Ok((T::one() + roll_off) * symbol_rate)
}

/// Raised-cosine PSD with unit total power at `offset` GHz from the carrier.
///
/// Flat at `1/SR` for `|offset| ≤ (1−r)·SR/2`, zero for `|offset| ≥ (1+r)·SR/2`
/// and a cosine-squared transition in between.
pub fn signal_psd<T: Scalar>(offset: T, spectrum: &SignalSpectrum<T>) -> T {
    let sr = spectrum.symbol_rate;
    let r = spectrum.roll_off;
    let half = T::lit(0.5);
    let a = offset.abs();
    let flat_edge = (T::one() - r) * sr * half;
    let stop_edge = (T::one() + r) * sr * half;
    if a <= flat_edge {
        sr.recip()
    } else if a >= stop_edge {
        T::zero()
    } else {
        let phase = T::PI() / (r * sr) * (a - flat_edge);
        half / sr * (T::one() + phase.cos())
    }
}

/// Sinusoidal passband ripple, in dB, riding on a filter's power response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct Ripple<T> {
    pub amplitude_db: T,
    /// GHz.
    pub period: T,
    /// rad.
    #[serde(default)]
    pub phase: T,
}

impl<T: Scalar> Ripple<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_db >= T::zero() && self.amplitude_db.is_finite()) {
            return Err(config(format!(
                "ripple amplitude must be >= 0, got {}",
                self.amplitude_db
            )));
        }
        if !(self.period > T::zero() && self.period.is_finite()) {
            return Err(config(format!(
                "ripple period must be > 0, got {}",
                self.period
            )));
        }
        if !self.phase.is_finite() {
            return Err(config("ripple phase must be finite"));
        }
        Ok(())
    }

    /// `amplitude · sin(2π·x/period + phase)`.
    pub fn value_db(&self, x: T) -> T {
        self.amplitude_db * (T::TAU() * x / self.period + self.phase).sin()
    }
}

/// One optical filter (AWG port, WSS pass) with a super-Gaussian power response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct FilterElement<T> {
    /// GHz.
    pub center: T,
    /// Full width at −3.01 dB, GHz.
    pub bandwidth_3db: T,
    /// Super-Gaussian order; 1 is Gaussian.
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insertion_ripple: Option<Ripple<T>>,
}

impl<T: Scalar> FilterElement<T> {
    pub fn new(center: T, bandwidth_3db: T, order: u32) -> Result<Self> {
        let f = Self {
            center,
            bandwidth_3db,
            order,
            insertion_ripple: None,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_3db > T::zero() && self.bandwidth_3db.is_finite()) {
            return Err(config(format!(
                "filter bandwidth_3db must be > 0, got {}",
                self.bandwidth_3db
            )));
        }
        if self.order < 1 {
            return Err(config("filter order must be >= 1"));
        }
        if !self.center.is_finite() {
            return Err(config("filter center must be finite"));
        }
        if let Some(r) = &self.insertion_ripple {
            r.validate()?;
        }
        Ok(())
    }

    /// Copy of the filter moved by `delta` GHz.
    pub fn shifted(&self, delta: T) -> Self {
        Self {
            center: self.center + delta,
            ..*self
        }
    }
}

/// Power transmission `|H|²` at `offset` GHz from the filter center.
///
/// `exp(−ln2 · (2·offset/B)^(2n))`; an insertion ripple of amplitude `A` adds
/// a loss of `A·(sin(·) − 1)` dB, which keeps the response within `(0, 1]`.
pub fn filter_power_response<T: Scalar>(offset: T, filter: &FilterElement<T>) -> T {
    let x = T::lit(2.0) * offset / filter.bandwidth_3db;
    let exponent = i32::try_from(2 * filter.order).unwrap_or(i32::MAX);
    let base = (-T::LN_2() * x.powi(exponent)).exp();
    match &filter.insertion_ripple {
        Some(r) => base * undb(r.value_db(offset) - r.amplitude_db),
        None => base,
    }
}

/// Product of the power responses of every filter at absolute frequency `f`.
pub fn cascade_power_response<T: Scalar>(filters: &[FilterElement<T>], f: T) -> T {
    filters.iter().fold(T::one(), |acc, flt| {
        acc * filter_power_response(f - flt.center, flt)
    })
}

/// Full width between the outermost −3.01 dB points of a cascade, found by
/// bisection on each side of `center`. `None` when the cascade never drops
/// below one half within `search_half_width` or is already below it at `center`.
pub fn cascade_bandwidth_3db<T: Scalar>(
    filters: &[FilterElement<T>],
    center: T,
    search_half_width: T,
) -> Option<T> {
    let half = T::lit(0.5);
    let response = |f: T| cascade_power_response(filters, f);
    if response(center) < half {
        return None;
    }
    let edge = |dir: T| -> Option<T> {
        let far = center + dir * search_half_width;
        if response(far) >= half {
            return None;
        }
        let (mut inside, mut outside) = (center, far);
        for _ in 0..200 {
            let mid = (inside + outside) * half;
            if response(mid) >= half {
                inside = mid;
            } else {
                outside = mid;
            }
            if (outside - inside).abs() <= T::epsilon() * T::lit(16.0) * center.abs().max(T::one())
            {
                break;
            }
        }
        Some((inside + outside) * half)
    };
    let hi = edge(T::one())?;
    let lo = edge(-T::one())?;
    Some(hi - lo)
}

/// Spectral overlap coefficient
/// `χ(Δ) = ∫ S̄_v(f)·S̄_i(f−Δ) df / ∫ S̄_v(f)² df`
/// of an interferer spaced `spacing` GHz from the victim, both unit-power.
///
/// Identical co-located spectra give 1; disjoint supports give 0. Equal
/// symbol rates stay within [0, 1], while a narrower interferer on the
/// victim's flat top reaches `1/(1 − r/4)`. Only the shapes matter, the
/// `center` fields are ignored.
pub fn overlap_coefficient<T: Scalar>(
    victim: &SignalSpectrum<T>,
    interferer: &SignalSpectrum<T>,
    spacing: T,
    resolution: T,
) -> Result<T> {
    victim.validate()?;
    interferer.validate()?;
    if !(spacing >= T::zero()) {
        return Err(domain(format!("spacing must be >= 0, got {spacing}")));
    }
    let finest = victim.symbol_rate.min(interferer.symbol_rate) / T::lit(20.0);
    if !(resolution > T::zero()) || resolution > finest {
        return Err(config(format!(
            "integration resolution {resolution} GHz too coarse, must be <= {finest} GHz"
        )));
    }
    let v = victim.at(T::zero());
    let i = interferer.at(spacing);
    let lo = v.lower_edge().max(i.lower_edge());
    let hi = v.upper_edge().min(i.upper_edge());
    if !(hi > lo) {
        return Ok(T::zero());
    }
    let cross = integrate(lo, hi, resolution, |f| v.psd_at(f) * i.psd_at(f));
    let own = integrate(v.lower_edge(), v.upper_edge(), resolution, |f| {
        let s = v.psd_at(f);
        s * s
    });
    Ok((cross / own).max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(sr: f64, r: f64) -> SignalSpectrum<f64> {
        SignalSpectrum::new(sr, r, 0.0).unwrap()
    }

    #[test]
    fn occupied_width_examples() {
        assert_eq!(occupied_width(69.0, 0.19).unwrap(), (1.0 + 0.19) * 69.0);
        assert_relative_eq!(occupied_width(69.0, 0.19).unwrap(), 82.11, epsilon = 1e-12);
        assert_relative_eq!(occupied_width(34.0, 0.19).unwrap(), 40.46, epsilon = 1e-12);
        assert_eq!(occupied_width(46.0, 0.0).unwrap(), 46.0);
        assert!(occupied_width(0.0, 0.19).is_err());
        assert!(occupied_width(34.0, 1.5).is_err());
        assert!(occupied_width(34.0, -0.1).is_err());
    }

    #[test]
    fn psd_examples() {
        let s = spec(34.0, 0.19);
        assert_relative_eq!(signal_psd(0.0, &s), 1.0 / 34.0);
        assert_relative_eq!(signal_psd(17.0, &s), 0.5 / 34.0, epsilon = 1e-15);
        assert_eq!(signal_psd(0.60 * 34.0, &s), 0.0);
    }

    #[test]
    fn psd_unit_power_on_default_grid() {
        for sr in [34.0, 46.0, 52.0, 69.0] {
            for r in [0.0, 0.19, 0.5] {
                let s = spec(sr, r);
                let p = integrate(
                    s.lower_edge(),
                    s.upper_edge(),
                    DEFAULT_RESOLUTION_GHZ,
                    |f| s.psd_at(f),
                );
                assert!((p - 1.0).abs() < 1e-6, "SR {sr} r {r}: {p}");
            }
        }
    }

    #[test]
    fn psd_zero_outside_occupied_band() {
        let s = spec(46.0, 0.19);
        let w = s.occupied_width();
        assert_eq!(s.psd_at(w / 2.0), 0.0);
        assert_eq!(s.psd_at(-w / 2.0 - 1e-9), 0.0);
        assert!(s.psd_at(w / 2.0 - 1e-6) > 0.0);
    }

    #[test]
    fn filter_examples() {
        let f = FilterElement::new(0.0_f64, 50.0, 1).unwrap();
        assert_eq!(filter_power_response(0.0, &f), 1.0);
        assert_relative_eq!(filter_power_response(25.0, &f), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            10.0 * filter_power_response(25.0, &f).log10(),
            -3.0103,
            epsilon = 1e-4
        );
        // (2·50/50)^2 = 4 for a Gaussian; order 2 raises it to 16
        assert_relative_eq!(
            filter_power_response(50.0, &f),
            0.0625,
            max_relative = 1e-12
        );
        let f2 = FilterElement::new(0.0, 50.0, 2).unwrap();
        assert_relative_eq!(
            filter_power_response(50.0, &f2),
            1.525_878_906_25e-5,
            max_relative = 1e-12
        );
        for order in 1..=6 {
            let g = FilterElement::new(0.0_f64, 37.5, order).unwrap();
            let db = 10.0 * filter_power_response(18.75, &g).log10();
            assert!((db + 3.01).abs() <= 0.01, "order {order}: {db}");
        }
    }

    #[test]
    fn filter_validation() {
        assert!(FilterElement::new(0.0, -1.0, 1).is_err());
        assert!(FilterElement::new(0.0, 50.0, 0).is_err());
    }

    #[test]
    fn ripple_keeps_response_bounded() {
        let mut f = FilterElement::new(0.0, 100.0, 4).unwrap();
        f.insertion_ripple = Some(Ripple {
            amplitude_db: 0.5,
            period: 12.5,
            phase: 0.3,
        });
        for i in -200..=200 {
            let v = filter_power_response(i as f64 * 0.25, &f);
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn cascade_examples() {
        assert_eq!(cascade_power_response::<f64>(&[], 193_100.0), 1.0);
        let f = FilterElement::new(193_100.0, 50.0, 2).unwrap();
        for k in -40..=40 {
            let x = 193_100.0 + k as f64;
            let one = cascade_power_response(&[f], x);
            assert_relative_eq!(
                cascade_power_response(&[f, f], x),
                one * one,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn cascade_width_by_bisection() {
        // N identical order-n filters: N·(2f/B)^(2n) = 1 at the -3 dB point
        let f = FilterElement::new(0.0, 50.0, 2).unwrap();
        let closed_form = 50.0 * 4.0_f64.powf(-1.0 / 4.0);
        let w = cascade_bandwidth_3db(&[f; 4], 0.0, 200.0).unwrap();
        assert_relative_eq!(w, closed_form, epsilon = 1e-9);
        assert!(w < 50.0);
        assert_relative_eq!(
            cascade_bandwidth_3db(&[f], 0.0, 200.0).unwrap(),
            50.0,
            epsilon = 1e-9
        );
        assert_eq!(cascade_bandwidth_3db::<f64>(&[], 0.0, 200.0), None);
    }

    #[test]
    fn cascade_width_shrinks_with_depth() {
        let f = FilterElement::new(0.0, 62.5, 3).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..=10 {
            let w = cascade_bandwidth_3db(&vec![f; n], 0.0, 500.0).unwrap();
            assert!(w <= last);
            last = w;
        }
    }

    fn overlap_oracle(v: &SignalSpectrum<f64>, i: &SignalSpectrum<f64>, d: f64) -> f64 {
        // brute-force trapezoid on a fixed fine grid over a generous window
        let h = 0.001;
        let n = (400.0 / h) as usize;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..=n {
            let f = -200.0 + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            let sv = signal_psd(f, v);
            num += w * sv * signal_psd(f - d, i);
            den += w * sv * sv;
        }
        num / den
    }

    #[test]
    fn overlap_examples() {
        let a = spec(69.0, 0.19);
        assert_relative_eq!(
            overlap_coefficient(&a, &a, 0.0, 0.05).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        assert_eq!(overlap_coefficient(&a, &a, 82.11, 0.05).unwrap(), 0.0);
        let chi = overlap_coefficient(&a, &a, 75.0, 0.05).unwrap();
        let oracle = overlap_oracle(&a, &a, 75.0);
        assert!(chi > 0.0);
        assert_relative_eq!(chi, oracle, max_relative = 1e-4);
        let b = spec(34.0, 0.19);
        assert_relative_eq!(
            overlap_coefficient(&b, &a, 50.0, 0.05).unwrap(),
            overlap_oracle(&b, &a, 50.0),
            max_relative = 1e-4
        );
    }

    #[test]
    fn narrow_interferer_inside_plateau_exceeds_one() {
        // χ = plateau / ∫S_v² = 1/(1 − r/4) once the interferer sits on the flat top
        let v = spec(69.0, 0.19);
        let i = spec(20.0, 0.0);
        let chi = overlap_coefficient(&v, &i, 0.0, 0.05).unwrap();
        assert_relative_eq!(chi, 1.0 / (1.0 - 0.19 / 4.0), max_relative = 1e-6);
    }

    #[test]
    fn overlap_rejects_coarse_grid_and_negative_spacing() {
        let a = spec(34.0, 0.19);
        assert!(matches!(
            overlap_coefficient(&a, &a, 10.0, 2.0),
            Err(crate::Error::Config(_))
        ));
        assert!(overlap_coefficient(&a, &a, -1.0, 0.05).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s = SignalSpectrum::new(34.0_f32, 0.19, 0.0).unwrap();
        let p = integrate(s.lower_edge(), s.upper_edge(), 0.05, |f| s.psd_at(f));
        assert!((p - 1.0).abs() < 1e-4);
        let chi = overlap_coefficient(&s, &s, 0.0, 0.05).unwrap();
        assert!((chi - 1.0).abs() < 1e-4);
    }

    #[test]
    fn grid_point_count() {
        let g = FrequencyGrid::new(0.0, 100.0, 6.25).unwrap();
        assert_eq!(g.len(), 17);
        let g = FrequencyGrid::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert!(FrequencyGrid::new(1.0, 0.0, 0.1).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn psd_and_filter_are_even(off in -120.0f64..120.0, sr in 10.0f64..100.0, r in 0.0f64..1.0,
                                   bw in 10.0f64..200.0, order in 1u32..8) {
            let s = spec(sr, r);
            prop_assert_eq!(signal_psd(off, &s), signal_psd(-off, &s));
            let f = FilterElement::new(0.0, bw, order).unwrap();
            prop_assert_eq!(filter_power_response(off, &f), filter_power_response(-off, &f));
        }

        #[test]
        fn overlap_symmetric_for_equal_rates(sr in 20.0f64..80.0, r in 0.0f64..0.6, d in 0.0f64..100.0) {
            let a = SignalSpectrum::new(sr, r, 193_000.0).unwrap();
            let b = SignalSpectrum::new(sr, r, 0.0).unwrap();
            let ab = overlap_coefficient(&a, &b, d, 0.05).unwrap();
            let ba = overlap_coefficient(&b, &a, d, 0.05).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-9);
        }

        #[test]
        fn overlap_non_increasing_in_spacing(srv in 20.0f64..80.0, sri in 20.0f64..80.0, r in 0.0f64..0.6,
                                             d in 0.0f64..90.0, dd in 0.0f64..10.0) {
            let v = spec(srv, r);
            let i = spec(sri, r);
            let near = overlap_coefficient(&v, &i, d, 0.05).unwrap();
            let far = overlap_coefficient(&v, &i, d + dd, 0.05).unwrap();
            prop_assert!(far <= near + 1e-6, "{} > {}", far, near);
            prop_assert!(near >= 0.0);
            if srv == sri {
                prop_assert!(near <= 1.0 + 1e-9);
            }
        }
    }
}
