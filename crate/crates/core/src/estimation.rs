//! Pilot-based channel estimation error and the effective SNR seen by a
//! nearest-neighbor decoder that treats the estimate as the true channel.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};
use crate::special::SnrLinear;
use crate::spectra::{DopplerSpec, SpectralShape};

// Relative slack on α ≥ α_min, so that α_min computed along a different
// floating-point path is still accepted.
const ALPHA_SLACK: f64 = 1e-12;
const CONSTRAINT_TOL: f64 = 1e-12;
// |1 − x²| below which the closed-form Clarke-Jakes MMSE switches to its
// power series around the removable singularity at x = 1.
const SERIES_BAND: f64 = 0.1;

/// Pilot and data power ratios relative to the average power.
///
/// Paired with an overhead `α`, they must satisfy `ρ_p α + ρ_d (1 − α) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub rho_p: f64,
    pub rho_d: f64,
}

impl PowerAllocation {
    pub const UNBOOSTED: PowerAllocation = PowerAllocation {
        rho_p: 1.0,
        rho_d: 1.0,
    };

    pub fn new(rho_p: f64, rho_d: f64) -> Result<Self> {
        if !(rho_p >= 0.0 && rho_p.is_finite()) {
            return Err(Error::domain("rho_p", rho_p, "must be finite and >= 0"));
        }
        if !(rho_d >= 0.0 && rho_d.is_finite()) {
            return Err(Error::domain("rho_d", rho_d, "must be finite and >= 0"));
        }
        Ok(PowerAllocation { rho_p, rho_d })
    }

    /// The allocation with data ratio `rho_d` that meets the power constraint
    /// at overhead `alpha`.
    pub fn from_data_ratio(alpha: f64, rho_d: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain("alpha", alpha, "must lie in (0, 1]"));
        }
        Self::new((1.0 - rho_d * (1.0 - alpha)) / alpha, rho_d)
    }

    /// `ρ_p α + ρ_d (1 − α) − 1`
    pub fn constraint_residual(&self, alpha: f64) -> f64 {
        self.rho_p * alpha + self.rho_d * (1.0 - alpha) - 1.0
    }

    /// Fraction of the transmit power spent on pilots, `ρ_p α`.
    pub fn pilot_power_fraction(&self, alpha: f64) -> f64 {
        self.rho_p * alpha
    }

    pub(crate) fn check(&self, alpha: f64) -> Result<()> {
        let r = self.constraint_residual(alpha);
        if r.abs() > CONSTRAINT_TOL {
            return Err(Error::domain(
                "power constraint residual",
                r,
                "rho_p*alpha + rho_d*(1-alpha) must equal 1",
            ));
        }
        Ok(())
    }
}

/// How the fading process evolves in time.
#[derive(Debug, Clone, PartialEq)]
pub enum FadingModel {
    /// IID blocks of `n_b` symbols, constant within a block.
    Block { n_b: u32 },
    /// Stationary fading with a bandlimited Doppler spectrum.
    Continuous(DopplerSpec),
}

impl FadingModel {
    pub fn block(n_b: u32) -> Result<Self> {
        if n_b == 0 {
            return Err(Error::domain("n_b", 0.0, "block length must be >= 1"));
        }
        Ok(FadingModel::Block { n_b })
    }

    pub fn continuous(f_d: f64, shape: SpectralShape) -> Result<Self> {
        Ok(FadingModel::Continuous(DopplerSpec::new(f_d, shape)?))
    }

    /// Smallest admissible pilot overhead: `1/n_b` or `2 f_D`.
    pub fn alpha_min(&self) -> f64 {
        match self {
            FadingModel::Block { n_b } => 1.0 / *n_b as f64,
            FadingModel::Continuous(spec) => spec.alpha_min(),
        }
    }

    pub(crate) fn check_alpha(&self, alpha: f64) -> Result<()> {
        let alpha_min = self.alpha_min();
        if alpha.is_nan() || alpha > 1.0 {
            return Err(Error::domain("alpha", alpha, "pilot overhead must be <= 1"));
        }
        if alpha < alpha_min * (1.0 - ALPHA_SLACK) {
            return Err(Error::Aliasing { alpha, alpha_min });
        }
        Ok(())
    }
}

/// Channel-estimation MMSE `E[|H̃|²]` for pilot overhead `alpha` and pilot
/// power ratio `rho_p`.
///
/// Block fading: `1 / (1 + α n_b ρ_p SNR)`. Continuous fading:
/// `1 − ∫ S̃² / (f_D/(α ρ_p SNR) + S̃) dξ`.
pub fn mmse(model: &FadingModel, snr: SnrLinear, alpha: f64, rho_p: f64) -> Result<f64> {
    model.check_alpha(alpha)?;
    if !(rho_p >= 0.0 && rho_p.is_finite()) {
        return Err(Error::domain("rho_p", rho_p, "must be finite and >= 0"));
    }
    Ok(mmse_unchecked(model, snr.value(), alpha, rho_p))
}

pub(crate) fn mmse_unchecked(model: &FadingModel, snr: f64, alpha: f64, rho_p: f64) -> f64 {
    let pilot_snr = alpha * rho_p * snr;
    if pilot_snr <= 0.0 {
        return 1.0;
    }
    match model {
        FadingModel::Block { n_b } => 1.0 / (1.0 + pilot_snr * *n_b as f64),
        FadingModel::Continuous(spec) => {
            let c = spec.f_d() / pilot_snr;
            if c.is_infinite() {
                return 1.0;
            }
            (c * spec.shape().estimation_integral(c)).min(1.0)
        }
    }
}

/// Closed-form MMSE for the Clarke-Jakes spectrum.
///
/// With `x = α ρ_p SNR / (π f_D)` the error is `1 − (2/π) x g(1 − x²)` where
/// `g(w) = artanh(√w)/√w` for `w > 0` and its continuation
/// `arctan(√−w)/√−w` for `w < 0`. Near `x = 1` the series
/// `g(w) = Σ wᵏ/(2k+1)` covers both sides of the removable singularity.
pub fn mmse_clarke_jakes_closed(snr: SnrLinear, alpha: f64, f_d: f64, rho_p: f64) -> Result<f64> {
    let spec = DopplerSpec::new(f_d, SpectralShape::ClarkeJakes)?;
    FadingModel::Continuous(spec).check_alpha(alpha)?;
    if !(rho_p >= 0.0 && rho_p.is_finite()) {
        return Err(Error::domain("rho_p", rho_p, "must be finite and >= 0"));
    }
    let x = alpha * rho_p * snr.value() / (PI * f_d);
    if x == 0.0 {
        return Ok(1.0);
    }
    let w = 1.0 - x * x;
    let g = if w.abs() < SERIES_BAND {
        let mut sum = 0.0;
        let mut power = 1.0;
        for k in 0..40 {
            sum += power / (2 * k + 1) as f64;
            power *= w;
        }
        sum
    } else if w > 0.0 {
        // artanh(u) = ln((1 + u)/x) when u = √(1 − x²)
        let u = w.sqrt();
        ((1.0 + u) / x).ln() / u
    } else {
        let v = (-w).sqrt();
        v.atan() / v
    };
    Ok((1.0 - FRAC_2_PI * x * g).max(0.0))
}

/// Effective SNR `SNR (1 − MMSE) / (1/ρ_d + SNR · MMSE)`.
pub fn snr_eff(snr: SnrLinear, mmse: f64, rho_d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mmse) {
        return Err(Error::domain("mmse", mmse, "must lie in [0, 1]"));
    }
    if !(rho_d > 0.0 && rho_d.is_finite()) {
        return Err(Error::domain("rho_d", rho_d, "must be finite and > 0"));
    }
    Ok(snr_eff_unchecked(snr.value(), mmse, rho_d))
}

pub(crate) fn snr_eff_unchecked(snr: f64, mmse: f64, rho_d: f64) -> f64 {
    if rho_d <= 0.0 {
        return 0.0;
    }
    snr * (1.0 - mmse) / (1.0 / rho_d + snr * mmse)
}
