//! Small-Doppler expansions of the optimum pilot overhead, power allocation
//! and spectral efficiency, plus the derivative identities they rest on.

use crate::error::{Error, Result};
use crate::estimation::PowerAllocation;
use crate::mimo::AntennaConfig;
use crate::special::{CapacityCurve, ScalarRayleigh, SnrLinear};
use crate::spectra::{check_doppler, SpectralShape};

/// Closed interval `[lo, hi]` used to clamp an expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ClampInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::domain("lo", lo, "clamp interval needs lo <= hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, z: f64) -> bool {
        self.lo <= z && z <= self.hi
    }
}

/// `[z]_lo^hi`.
pub fn clamp(z: f64, interval: ClampInterval) -> f64 {
    if z <= interval.lo {
        interval.lo
    } else if z >= interval.hi {
        interval.hi
    } else {
        z
    }
}

/// A clamped two-term expansion `[a √f + b f]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResult {
    pub value: f64,
    /// The `√f_D` term, evaluated.
    pub leading_term: f64,
    /// The `f_D` term, evaluated.
    pub first_order_term: f64,
    pub clamp: ClampInterval,
    pub clamped: bool,
}

impl ExpansionResult {
    fn new(leading_term: f64, first_order_term: f64, clamp_to: ClampInterval) -> Self {
        let raw = leading_term + first_order_term;
        let value = clamp(raw, clamp_to);
        Self {
            value,
            leading_term,
            first_order_term,
            clamp: clamp_to,
            clamped: value != raw,
        }
    }

    /// Sum of the two terms before clamping.
    pub fn unclamped(&self) -> f64 {
        self.leading_term + self.first_order_term
    }
}

fn check_snr_f(snr: SnrLinear, f_d: f64) -> Result<(f64, f64)> {
    check_doppler(f_d)?;
    Ok((snr.value(), f_d))
}

/// Optimum unboosted pilot overhead to first order in `f_D`:
///
/// `α* ≈ [√((1+SNR) Ċ/C · 2f_D) − ((1+SNR) C̈/Ċ + 2 + ∫dξ/S̃ / (2 SNR)) f_D]`
/// clamped to `[2f_D, 1]`.
pub fn overhead_expansion(
    shape: &SpectralShape,
    snr: SnrLinear,
    f_d: f64,
) -> Result<ExpansionResult> {
    let (s, f) = check_snr_f(snr, f_d)?;
    overhead_expansion_with(&ScalarRayleigh, shape.inverse_integral()?, s, f)
}

/// [`overhead_expansion`] for an arbitrary capacity family and an effective
/// Doppler `f_eff`.
pub fn overhead_expansion_with<C: CapacityCurve + ?Sized>(
    capacity: &C,
    inverse_integral: f64,
    snr: f64,
    f_eff: f64,
) -> Result<ExpansionResult> {
    let (c, c1, c2) = (
        capacity.capacity(snr),
        capacity.capacity_d1(snr),
        capacity.capacity_d2(snr),
    );
    let leading = ((1.0 + snr) * (c1 / c) * 2.0 * f_eff).sqrt();
    let first = -((1.0 + snr) * c2 / c1 + 2.0 + inverse_integral / (2.0 * snr)) * f_eff;
    let interval = ClampInterval::new((2.0 * f_eff).min(1.0), 1.0)?;
    Ok(ExpansionResult::new(leading, first, interval))
}

/// Optimized unboosted spectral efficiency.
///
/// `C − √(8f_D (1+SNR) C Ċ)` while the overhead expansion stays above
/// `2f_D`; otherwise `(1 − 2f_D) C((SNR−1)/2)`, which needs `SNR > 1`.
pub fn se_expansion_no_boost(shape: &SpectralShape, snr: SnrLinear, f_d: f64) -> Result<f64> {
    let alpha = overhead_expansion(shape, snr, f_d)?;
    let (s, f) = (snr.value(), f_d);
    let cap = ScalarRayleigh;
    if alpha.unclamped() > 2.0 * f {
        let (c, c1) = (cap.capacity(s), cap.capacity_d1(s));
        Ok(c - (8.0 * f * (1.0 + s) * c * c1).sqrt())
    } else if s > 1.0 {
        Ok((1.0 - 2.0 * f) * cap.capacity((s - 1.0) / 2.0))
    } else {
        Err(Error::OutOfRegime(format!(
            "overhead pinned at 2f_D needs SNR > 1, got {s}"
        )))
    }
}

/// The two first-order loss terms of the unboosted efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySplit {
    /// `α C(SNR)`: symbols spent on pilots.
    pub overhead_loss: f64,
    /// `(1+SNR) Ċ(SNR) 2f_D / α`: imperfect channel knowledge.
    pub estimation_loss: f64,
}

impl PenaltySplit {
    pub fn total(&self) -> f64 {
        self.overhead_loss + self.estimation_loss
    }
}

pub fn penalty_decomposition(snr: SnrLinear, alpha: f64, f_d: f64) -> Result<PenaltySplit> {
    let (s, f) = check_snr_f(snr, f_d)?;
    if !(alpha >= 2.0 * f && alpha <= 1.0) {
        return Err(Error::domain("alpha", alpha, "must lie in [2 f_D, 1]"));
    }
    let cap = ScalarRayleigh;
    Ok(PenaltySplit {
        overhead_loss: alpha * cap.capacity(s),
        estimation_loss: (1.0 + s) * cap.capacity_d1(s) * 2.0 * f / alpha,
    })
}

/// Leading-order optimum boosted power allocation at `α = 2f_D`:
/// `ρ_p = √((1 + 1/SNR)/(2f_D))`, `ρ_d = 1 − √((1 + 1/SNR) 2f_D)`.
pub fn power_allocation_expansion(snr: SnrLinear, f_d: f64) -> Result<PowerAllocation> {
    let (s, f) = check_snr_f(snr, f_d)?;
    let k = 1.0 + 1.0 / s;
    let rho_d = 1.0 - (k * 2.0 * f).sqrt();
    if rho_d <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "expanded data power ratio {rho_d} is not positive at f_D = {f}"
        )));
    }
    Ok(PowerAllocation {
        rho_p: (k / (2.0 * f)).sqrt(),
        rho_d,
    })
}

/// Optimized boosted spectral efficiency `C − √(8f_D SNR (1+SNR)) Ċ`.
pub fn se_expansion_boost(snr: SnrLinear, f_d: f64) -> Result<f64> {
    let (s, f) = check_snr_f(snr, f_d)?;
    let cap = ScalarRayleigh;
    Ok(cap.capacity(s) - (8.0 * f * s * (1.0 + s)).sqrt() * cap.capacity_d1(s))
}

/// Efficiency gained by boosting, `√(8f_D (1+SNR) Ċ) (√C − √(SNR Ċ))`.
pub fn boosting_gain(snr: SnrLinear, f_d: f64) -> Result<f64> {
    let (s, f) = check_snr_f(snr, f_d)?;
    let cap = ScalarRayleigh;
    let (c, c1) = (cap.capacity(s), cap.capacity_d1(s));
    Ok((8.0 * f * (1.0 + s) * c1).sqrt() * (c.sqrt() - (s * c1).sqrt()))
}

/// Fraction of the transmit energy spent on pilots at the optimum:
/// `√((1 + 1/SNR) 2f_D)` with boosting, `√((1+SNR) Ċ/C · 2f_D)` without.
pub fn pilot_power_fraction(snr: SnrLinear, f_d: f64, boost: bool) -> Result<f64> {
    let (s, f) = check_snr_f(snr, f_d)?;
    if boost {
        Ok(((1.0 + 1.0 / s) * 2.0 * f).sqrt())
    } else {
        let cap = ScalarRayleigh;
        Ok(((1.0 + s) * cap.capacity_d1(s) / cap.capacity(s) * 2.0 * f).sqrt())
    }
}

/// Boosted over unboosted pilot power fraction, `√(C/(SNR Ċ))`.
pub fn pilot_power_fraction_ratio(snr: SnrLinear) -> f64 {
    let s = snr.value();
    let cap = ScalarRayleigh;
    (cap.capacity(s) / (s * cap.capacity_d1(s))).sqrt()
}

/// Analytic derivatives in `f_D` at `f_D = 0` used by the expansions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDopplerDerivatives {
    /// `∂MMSE/∂f_D = 2/(α SNR)` at fixed `α`, `ρ_p = 1`.
    pub mmse_d1: f64,
    /// `∂²MMSE/∂f_D² = −2 ∫dξ/S̃ / (α SNR)²`.
    pub mmse_d2: f64,
    /// `∂MMSE/∂f_D = 2/(SNR (1 − ρ_d))` along the boosted path
    /// `α = 2f_D`, `ρ_p = (1 − ρ_d (1 − 2f_D))/(2f_D)`.
    pub boosted_mmse_d1: f64,
    /// `−2 (4ρ_d + ∫dξ/S̃ / SNR) / (SNR (1 − ρ_d)²)` along the same path.
    pub boosted_mmse_d2: f64,
    /// Coefficients of `1, f_D, f_D²` in the boosted effective SNR.
    pub snr_eff_boost: [f64; 3],
}

pub fn derivative_identities(
    shape: &SpectralShape,
    snr: SnrLinear,
    alpha: f64,
    rho_d: f64,
) -> Result<SmallDopplerDerivatives> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("alpha", alpha, "must lie in (0, 1]"));
    }
    if !(rho_d > 0.0 && rho_d < 1.0) {
        return Err(Error::domain(
            "rho_d",
            rho_d,
            "boosted expansions need 0 < rho_d < 1 (singular at 1)",
        ));
    }
    let s = snr.value();
    let i = shape.inverse_integral()?;
    let q = 1.0 - rho_d;
    let a = rho_d * (1.0 + rho_d * s);
    Ok(SmallDopplerDerivatives {
        mmse_d1: 2.0 / (alpha * s),
        mmse_d2: -2.0 * i / (alpha * s).powi(2),
        boosted_mmse_d1: 2.0 / (s * q),
        boosted_mmse_d2: -2.0 / (s * q * q) * (4.0 * rho_d + i / s),
        snr_eff_boost: [rho_d * s, -2.0 * a / q, a / (q * q) * (8.0 * rho_d + i / s)],
    })
}

/// Second-order expansion in `f_D` of the unboosted efficiency at fixed `α`:
///
/// `(1−α)(1+SNR) [C/(1+SNR) − Ċ 2f_D/α + (2(1+SNR) C̈ + Ċ (∫dξ/S̃ / SNR + 4)) f_D²/α²]`.
pub fn se_taylor(shape: &SpectralShape, snr: SnrLinear, alpha: f64, f_d: f64) -> Result<f64> {
    let (s, f) = check_snr_f(snr, f_d)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("alpha", alpha, "must lie in (0, 1]"));
    }
    let i = shape.inverse_integral()?;
    let cap = ScalarRayleigh;
    let (c, c1, c2) = (cap.capacity(s), cap.capacity_d1(s), cap.capacity_d2(s));
    let r = f / alpha;
    Ok((1.0 - alpha)
        * (1.0 + s)
        * (c / (1.0 + s) - c1 * 2.0 * r + (2.0 * (1.0 + s) * c2 + c1 * (i / s + 4.0)) * r * r))
}

/// Quadratic expansion in `f_D` of the effective SNR along the boosted path
/// `α = 2f_D`, `ρ_p = (1 − ρ_d (1 − 2f_D))/(2f_D)`.
pub fn snr_eff_boost_taylor(
    shape: &SpectralShape,
    snr: SnrLinear,
    rho_d: f64,
    f_d: f64,
) -> Result<f64> {
    check_doppler(f_d)?;
    let d = derivative_identities(shape, snr, 1.0, rho_d)?;
    let [k0, k1, k2] = d.snr_eff_boost;
    Ok(k0 + k1 * f_d + k2 * f_d * f_d)
}

/// MIMO optimum overhead: the first-order expansion with the `(n_T, n_R)`
/// capacity family and Doppler `n_T f_D`, clamped to `[2 n_T f_D, 1]`.
pub fn mimo_overhead_expansion(
    shape: &SpectralShape,
    snr: SnrLinear,
    f_d: f64,
    cfg: AntennaConfig,
) -> Result<ExpansionResult> {
    let (s, f) = check_snr_f(snr, f_d)?;
    overhead_expansion_with(&cfg, shape.inverse_integral()?, s, cfg.n_t() as f64 * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{mmse, snr_eff, FadingModel};
    use std::f64::consts::PI;

    fn snr(v: f64) -> SnrLinear {
        SnrLinear::new(v).unwrap()
    }

    fn interval(lo: f64, hi: f64) -> ClampInterval {
        ClampInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp(0.5, interval(0.1, 1.0)), 0.5);
        assert_eq!(clamp(0.05, interval(0.1, 1.0)), 0.1);
        assert_eq!(clamp(2.0, interval(0.1, 1.0)), 1.0);
        assert!(ClampInterval::new(1.0, 0.5).is_err());
    }

    #[test]
    fn leading_term_ignores_the_shape() {
        let a = overhead_expansion(&SpectralShape::ClarkeJakes, snr(10.0), 1e-3).unwrap();
        let b = overhead_expansion(&SpectralShape::Rectangular, snr(10.0), 1e-3).unwrap();
        assert_eq!(a.leading_term, b.leading_term);
        assert!(a.first_order_term != b.first_order_term);
        assert!(!a.clamped && a.value == a.unclamped());
    }

    #[test]
    fn overhead_expansion_terms_by_hand() {
        let (s, f) = (10.0, 1e-3);
        let cap = ScalarRayleigh;
        let (c, c1, c2) = (cap.capacity(s), cap.capacity_d1(s), cap.capacity_d2(s));
        let e = overhead_expansion(&SpectralShape::Rectangular, snr(s), f).unwrap();
        assert!((e.leading_term - (11.0 * c1 / c * 2e-3).sqrt()).abs() < 1e-15);
        let first = -(11.0 * c2 / c1 + 2.0 + 4.0 / 20.0) * f;
        assert!((e.first_order_term - first).abs() < 1e-15);
    }

    #[test]
    fn large_doppler_hits_lower_clamp() {
        let e = overhead_expansion(&SpectralShape::ClarkeJakes, snr(0.1), 0.3).unwrap();
        assert!(e.clamped);
        assert_eq!(e.value, 0.6);
    }

    #[test]
    fn se_expansion_branches() {
        let cap = ScalarRayleigh;
        let v = se_expansion_no_boost(&SpectralShape::ClarkeJakes, snr(10.0), 1e-9).unwrap();
        assert!((v - cap.capacity(10.0)).abs() < 1e-3);
        let clamped = se_expansion_no_boost(&SpectralShape::ClarkeJakes, snr(10.0), 0.3).unwrap();
        assert_eq!(clamped, 0.4 * cap.capacity(4.5));
        assert!(matches!(
            se_expansion_no_boost(&SpectralShape::ClarkeJakes, snr(0.5), 0.3),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn penalty_terms_balance_at_leading_order_optimum() {
        let (s, f) = (10.0, 1e-3);
        let e = overhead_expansion(&SpectralShape::ClarkeJakes, snr(s), f).unwrap();
        let p = penalty_decomposition(snr(s), e.leading_term, f).unwrap();
        assert!((p.overhead_loss - p.estimation_loss).abs() < 1e-9);
        let full = penalty_decomposition(snr(s), 1.0, f).unwrap();
        assert_eq!(full.overhead_loss, ScalarRayleigh.capacity(s));
        assert!(penalty_decomposition(snr(s), 1e-3, f).is_err());
    }

    #[test]
    fn power_allocation_example() {
        let a = power_allocation_expansion(snr(10.0), 1e-3).unwrap();
        assert!((a.rho_p - (1.1f64 / 0.002).sqrt()).abs() < 1e-12);
        assert!((a.rho_p - 23.452).abs() < 1e-3);
        assert!((a.rho_d - (1.0 - (1.1f64 * 0.002).sqrt())).abs() < 1e-15);
        // Power constraint holds only up to O(f_D).
        assert!(a.constraint_residual(2e-3).abs() < 10.0 * 1e-3);
        assert!(matches!(
            power_allocation_expansion(snr(0.1), 0.2),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn boosting_gain_identity() {
        for s in [0.5, 1.0, 10.0, 100.0] {
            for f in [1e-4, 1e-3, 2e-2] {
                let no = se_expansion_no_boost(&SpectralShape::ClarkeJakes, snr(s), f)
                    .unwrap_or(f64::NAN);
                let alpha = overhead_expansion(&SpectralShape::ClarkeJakes, snr(s), f).unwrap();
                if alpha.unclamped() <= 2.0 * f {
                    continue;
                }
                let yes = se_expansion_boost(snr(s), f).unwrap();
                let gain = boosting_gain(snr(s), f).unwrap();
                assert!((yes - no - gain).abs() < 1e-12, "s={s} f={f}");
            }
        }
    }

    #[test]
    fn boosting_gain_vanishes_at_low_snr() {
        let g: Vec<f64> = [1e-6, 1e-3, 1e-1, 1.0, 10.0]
            .iter()
            .map(|&s| boosting_gain(snr(s), 1e-3).unwrap())
            .collect();
        assert!(g[0] < 1e-5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn pilot_power_fractions() {
        let b = pilot_power_fraction(snr(10.0), 1e-3, true).unwrap();
        assert!((b - 0.046904).abs() < 1e-6);
        for boost in [false, true] {
            let one = pilot_power_fraction(snr(10.0), 1e-3, boost).unwrap();
            let four = pilot_power_fraction(snr(10.0), 4e-3, boost).unwrap();
            assert!((four - 2.0 * one).abs() < 1e-15);
        }
        let ratios: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&s| pilot_power_fraction_ratio(snr(s)))
            .collect();
        assert!(ratios[0] > 1.0 && ratios.windows(2).all(|w| w[1] > w[0]));
        let (u, b) = (
            pilot_power_fraction(snr(10.0), 1e-3, false).unwrap(),
            pilot_power_fraction(snr(10.0), 1e-3, true).unwrap(),
        );
        assert!((b / u - ratios[1]).abs() < 1e-12);
    }

    #[test]
    fn derivative_identity_arithmetic() {
        let d = derivative_identities(&SpectralShape::ClarkeJakes, snr(10.0), 0.1, 0.9).unwrap();
        assert!((d.mmse_d1 - 2.0).abs() < 1e-15);
        assert!((d.mmse_d2 + PI * PI).abs() < 1e-9);
        assert!(derivative_identities(&SpectralShape::ClarkeJakes, snr(10.0), 0.1, 1.0).is_err());
    }

    fn central_d1(g: &dyn Fn(f64) -> f64, f: f64, h: f64) -> f64 {
        (g(f + h) - g(f - h)) / (2.0 * h)
    }

    fn central_d2(g: &dyn Fn(f64) -> f64, f: f64, h: f64) -> f64 {
        (g(f + h) - 2.0 * g(f) + g(f - h)) / (h * h)
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn derivative_identities_match_finite_differences() {
        let (s, alpha, rho_d) = (10.0, 0.1, 0.9);
        for shape in [SpectralShape::ClarkeJakes, SpectralShape::Rectangular] {
            let d = derivative_identities(&shape, snr(s), alpha, rho_d).unwrap();
            let fixed = |f: f64| {
                let m = FadingModel::continuous(f, shape.clone()).unwrap();
                mmse(&m, snr(s), alpha, 1.0).unwrap()
            };
            let boosted_alloc = |f: f64| PowerAllocation::from_data_ratio(2.0 * f, rho_d).unwrap();
            let boosted = |f: f64| {
                let m = FadingModel::continuous(f, shape.clone()).unwrap();
                mmse(&m, snr(s), 2.0 * f, boosted_alloc(f).rho_p).unwrap()
            };
            let eff = |f: f64| snr_eff(snr(s), boosted(f), rho_d).unwrap();
            let (f0, h) = (1e-6, 1e-7);
            assert!(rel(central_d1(&fixed, f0, h), d.mmse_d1) < 1e-3);
            assert!(rel(central_d1(&boosted, f0, h), d.boosted_mmse_d1) < 1e-3);
            assert!(rel(central_d1(&eff, f0, h), d.snr_eff_boost[1]) < 1e-3);
            let (f2, h2) = (f0, 5e-7);
            assert!(
                rel(central_d2(&fixed, f2, h2), d.mmse_d2) < 1e-3,
                "{}",
                shape.name()
            );
            assert!(
                rel(central_d2(&boosted, f2, h2), d.boosted_mmse_d2) < 1e-3,
                "{}",
                shape.name()
            );
            assert!(
                rel(central_d2(&eff, f2, h2) / 2.0, d.snr_eff_boost[2]) < 1e-3,
                "{}",
                shape.name()
            );
        }
    }

    #[test]
    fn single_antenna_mimo_expansion_is_scalar() {
        let one = AntennaConfig::new(1, 1).unwrap();
        let a = mimo_overhead_expansion(&SpectralShape::Rectangular, snr(10.0), 1e-3, one).unwrap();
        let b = overhead_expansion(&SpectralShape::Rectangular, snr(10.0), 1e-3).unwrap();
        assert!((a.value - b.value).abs() < 1e-7);
        assert_eq!(a.clamp, b.clamp);
    }

    #[test]
    fn mimo_leading_term_grows_like_root_nt() {
        let lead = |n| {
            let cfg = AntennaConfig::new(n, n).unwrap();
            mimo_overhead_expansion(&SpectralShape::Rectangular, snr(10.0), 1e-3, cfg)
                .unwrap()
                .leading_term
        };
        let ratio = lead(4) / lead(1);
        assert!((ratio / 2.0 - 1.0).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn se_taylor_is_quadratic_in_doppler() {
        let shape = SpectralShape::Rectangular;
        let exact = |f: f64| {
            let m = FadingModel::continuous(f, shape.clone()).unwrap();
            crate::efficiency::pilot_se(&m, snr(10.0), 0.05, PowerAllocation::UNBOOSTED).unwrap()
        };
        let err = |f: f64| (se_taylor(&shape, snr(10.0), 0.05, f).unwrap() - exact(f)).abs();
        let (e1, e2) = (err(2e-3), err(1e-3));
        assert!(e1 / e2 > 6.0, "{e1} {e2}");
    }
}
