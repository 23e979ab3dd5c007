// Cross-checks against independent reference implementations: statrs for the
// error function, plain bisection for curve inversion, brute-force
// trapezoids for spectral integrals.

use approx::assert_relative_eq;
use osaas_core::formats::{
    ber_from_q_db, ber_from_snr, builtin_catalog, denormalize_gsnr, normalize_gsnr, q_db_from_ber,
    required_gsnr, snr_from_ber, BerCurve, MetricConfig, ModulationFormat,
};
use osaas_core::line::{effective_gsnr_db, filter_transmission};
use osaas_core::spectral::{cascade_bandwidth_3db, overlap_coefficient};
use osaas_core::{special, FilterElement, MediaChannel, ProbeConfig, Scenario, SignalSpectrum};
use statrs::function::erf;

fn oracle_ber(curve: BerCurve, snr_db: f64) -> f64 {
    let s = 10f64.powf(snr_db / 10.0);
    let qpsk = 0.5 * erf::erfc((s / 2.0).sqrt());
    let qam = 0.375 * erf::erfc((s / 10.0).sqrt());
    match curve {
        BerCurve::Qpsk => qpsk,
        BerCurve::Qam16 => qam,
        BerCurve::Hybrid8 => (qpsk * qam).sqrt(),
    }
}

// linear-domain bisection, deliberately different from the library's log search
fn oracle_snr(curve: BerCurve, ber: f64) -> f64 {
    let (mut lo, mut hi) = (-30.0, 60.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if oracle_ber(curve, mid) > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn formats() -> [ModulationFormat; 3] {
    [
        ModulationFormat::dp_qpsk(),
        ModulationFormat::dp_p_16qam(),
        ModulationFormat::dp_16qam(),
    ]
}

#[test]
fn erfc_matches_statrs() {
    for i in -400..=600 {
        let x = f64::from(i) * 0.01;
        let (ours, theirs) = (special::erfc(x), erf::erfc(x));
        // statrs itself is only good to ~1e-10 relative here
        assert_relative_eq!(ours, theirs, max_relative = 5e-10, epsilon = 1e-300);
    }
}

#[test]
fn erfc_inv_matches_statrs() {
    for k in 1..200 {
        let y = f64::from(k) * 0.01;
        assert_relative_eq!(
            special::erfc_inv(y),
            erf::erfc_inv(y),
            max_relative = 1e-10,
            epsilon = 1e-12
        );
    }
    for e in 3..=300 {
        let y = 10f64.powi(-e);
        assert_relative_eq!(special::erfc_inv(y), erf::erfc_inv(y), max_relative = 1e-10);
    }
}

#[test]
fn ber_curves_match_closed_forms() {
    for f in formats() {
        for i in -50..=300 {
            let snr = f64::from(i) * 0.1;
            assert_relative_eq!(
                ber_from_snr(&f, snr),
                oracle_ber(f.ber_curve, snr),
                max_relative = 5e-10
            );
        }
    }
}

#[test]
fn ber_snr_round_trip_against_bisection_oracle() {
    for f in formats() {
        for e in 0..=60 {
            let ber = 0.049 * 10f64.powf(-f64::from(e) / 10.0);
            let ours = snr_from_ber(&f, ber).unwrap();
            assert!(!ours.saturated);
            let oracle = oracle_snr(f.ber_curve, ber);
            assert!(
                (ours.snr_db - oracle).abs() < 0.01,
                "{} ber {ber}: {} vs {oracle}",
                f.name,
                ours.snr_db
            );
            let back = ber_from_snr(&f, ours.snr_db);
            assert_relative_eq!(back, ber, max_relative = 1e-3);
        }
    }
}

#[test]
fn q_round_trip_against_error_function_oracle() {
    for e in 0..=120 {
        let ber = 0.45 * 10f64.powf(-f64::from(e) / 10.0);
        let oracle = 20.0 * (std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * ber)).log10();
        let q = q_db_from_ber(ber).unwrap();
        assert!((q - oracle).abs() < 1e-9, "ber {ber}: {q} vs {oracle}");
        let back = ber_from_q_db(q).unwrap();
        assert_relative_eq!(back, ber, max_relative = 1e-6);
    }
    // frozen from the oracle
    assert!((q_db_from_ber(2.3e-2_f64).unwrap() - 6.0006).abs() < 1e-3);
    assert!((q_db_from_ber(1e-3_f64).unwrap() - 9.7998).abs() < 1e-3);
}

#[test]
fn normalization_round_trip_is_exact() {
    for sr in [12.5, 25.0, 34.0, 46.0, 52.0, 69.0] {
        for i in -20..=40 {
            let snr = f64::from(i) * 0.73;
            let back = denormalize_gsnr(normalize_gsnr(snr, sr), sr);
            assert!((back - snr).abs() <= 1e-12);
        }
    }
}

#[test]
fn required_gsnr_matches_oracle_composition() {
    let metric = MetricConfig::default();
    for e in builtin_catalog::<f64>() {
        let oracle =
            oracle_snr(e.format.ber_curve, 2e-2) + 10.0 * (e.symbol_rate / 12.5).log10() + 1.0;
        assert!(
            (required_gsnr(&e, &metric).unwrap() - oracle).abs() < 0.01,
            "{}",
            e.id
        );
    }
}

#[test]
fn cascade_width_matches_closed_form() {
    // n identical order-k stages: B·n^(−1/(2k))
    for k in 1..=6u32 {
        for n in 1..=5usize {
            let f = FilterElement::new(0.0, 50.0, k).unwrap();
            let w = cascade_bandwidth_3db(&vec![f; n], 0.0, 500.0).unwrap();
            let closed = 50.0 * (n as f64).powf(-1.0 / (2.0 * f64::from(k)));
            assert_relative_eq!(w, closed, max_relative = 1e-9);
        }
    }
}

fn rc_psd(f: f64, sr: f64, r: f64) -> f64 {
    let a = f.abs();
    let (f1, f2) = ((1.0 - r) * sr / 2.0, (1.0 + r) * sr / 2.0);
    if a <= f1 {
        1.0 / sr
    } else if a <= f2 {
        0.5 / sr * (1.0 + (std::f64::consts::PI / (r * sr) * (a - f1)).cos())
    } else {
        0.0
    }
}

fn trapezoid(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

#[test]
fn overlap_matches_brute_force_integral() {
    let cases = [
        (69.0, 69.0, 0.19, 75.0),
        (34.0, 69.0, 0.19, 40.0),
        (69.0, 34.0, 0.19, 40.0),
        (46.0, 52.0, 0.3, 20.0),
    ];
    for (sv, si, r, d) in cases {
        let v = SignalSpectrum::new(sv, r, 0.0).unwrap();
        let i = SignalSpectrum::new(si, r, 0.0).unwrap();
        let ours = overlap_coefficient(&v, &i, d, 0.05).unwrap();
        let num = trapezoid(-100.0, 100.0, 200_000, |f| {
            rc_psd(f, sv, r) * rc_psd(f - d, si, r)
        });
        let den = trapezoid(-100.0, 100.0, 200_000, |f| rc_psd(f, sv, r).powi(2));
        assert_relative_eq!(ours, num / den, max_relative = 1e-4, epsilon = 1e-9);
    }
    // two 69 GBd carriers on a 75 GHz grid overlap in the roll-off
    let s = SignalSpectrum::new(69.0, 0.19, 0.0).unwrap();
    assert!(overlap_coefficient(&s, &s, 75.0, 0.05).unwrap() > 0.0);
}

#[test]
fn filtering_and_gsnr_match_independent_integration() {
    let fc = 193_100.0;
    let mut s = Scenario::ideal(MediaChannel::new(fc, 100.0), 18.0);
    s.filters = vec![FilterElement::new(fc, 60.0, 2).unwrap(); 2];
    let probe = ProbeConfig::new(builtin_catalog::<f64>().remove(2));
    for off in [0.0, 6.25, 12.5, 18.75] {
        let spec = probe.spectrum_at(fc + off).unwrap();
        let h = |f: f64| {
            (-std::f64::consts::LN_2 * (2.0 * (f - fc) / 60.0).powi(4))
                .exp()
                .powi(2)
        };
        let rho = trapezoid(-25.0, 25.0, 100_000, |x| {
            rc_psd(x, 34.0, 0.19) * h(fc + off + x)
        });
        assert_relative_eq!(filter_transmission(&s, &spec), rho, max_relative = 1e-5);
        // flat profile: g = g0 · ρ^β
        let g = effective_gsnr_db(&s, fc + off, &probe).unwrap().unwrap();
        assert!((g - (18.0 + 2.0 * 10.0 * rho.log10())).abs() < 1e-4);
    }
}
