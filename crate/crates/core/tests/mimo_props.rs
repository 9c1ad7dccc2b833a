use pilot_overhead::efficiency::optimize_overhead;
use pilot_overhead::expansions::mimo_overhead_expansion;
use pilot_overhead::mimo::*;
use pilot_overhead::special::SnrLinear;
use pilot_overhead::spectra::{DopplerSpec, SpectralShape};
use pilot_overhead::FadingModel;

fn snr(v: f64) -> SnrLinear {
    SnrLinear::new(v).unwrap()
}

fn cfg(n: u32) -> AntennaConfig {
    AntennaConfig::new(n, n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn capacity_agrees_with_monte_carlo() {
    for (t, r) in [(2, 2), (3, 1), (2, 4)] {
        let c = AntennaConfig::new(t, r).unwrap();
        let mc = monte_carlo_capacity(c, snr(10.0), 1_000_000, 2024).unwrap();
        let q = capacity_mimo(c, snr(10.0));
        assert!(
            (mc.mean - q).abs() < 3.0 * mc.std_error,
            "{t}x{r}: {mc:?} vs {q}"
        );
    }
}

#[test]
fn boosted_power_equals_single_antenna_at_scaled_doppler() {
    let f = 1e-3;
    for n in [2u32, 4] {
        let spec = DopplerSpec::new(f, SpectralShape::ClarkeJakes).unwrap();
        let mimo = optimize_overhead_mimo(cfg(n), &spec, snr(10.0), true).unwrap();
        let siso = FadingModel::continuous(n as f64 * f, SpectralShape::ClarkeJakes).unwrap();
        let single = optimize_overhead(&siso, snr(10.0), true).unwrap();
        assert!((mimo.rho_p_star - single.rho_p_star).abs() <= 1e-7 * single.rho_p_star);
        assert_eq!(mimo.alpha_star, cfg(n).alpha_min(f));
    }
}

#[test]
fn mimo_overhead_is_close_to_scalar_capacity_equivalent() {
    for f in [1e-3, 1e-2] {
        for n in [1u32, 2, 3, 4] {
            let spec = DopplerSpec::new(f, SpectralShape::Rectangular).unwrap();
            let mimo = optimize_overhead_mimo(cfg(n), &spec, snr(10.0), false).unwrap();
            let siso = FadingModel::continuous(n as f64 * f, SpectralShape::Rectangular).unwrap();
            let single = optimize_overhead(&siso, snr(10.0), false).unwrap();
            assert!(
                rel(mimo.alpha_star, single.alpha_star) < 0.02,
                "n={n} f={f}"
            );
        }
    }
}

#[test]
fn mimo_expansion_tracks_numeric_overhead() {
    for n in [1u32, 2, 4] {
        let spec = DopplerSpec::new(1e-3, SpectralShape::Rectangular).unwrap();
        let num = optimize_overhead_mimo(cfg(n), &spec, snr(10.0), false).unwrap();
        let e =
            mimo_overhead_expansion(&SpectralShape::Rectangular, snr(10.0), 1e-3, cfg(n)).unwrap();
        assert!(rel(e.value, num.alpha_star) < 0.1, "n={n}");
        assert_eq!(e.clamp.lo, 2.0 * n as f64 * 1e-3);
    }
}
