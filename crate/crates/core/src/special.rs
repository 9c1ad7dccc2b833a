//! Exponential integrals and the ergodic capacity of a Rayleigh-faded scalar
//! channel with perfect receiver CSI.

use crate::error::{Error, Result};

pub use std::f64::consts::LOG2_E;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

// Below this SNR the capacity and its derivatives are evaluated from the
// asymptotic series of e^x E_1(x) at large x, which avoids the cancellation
// in the derivative recursions.
const SMALL_SNR: f64 = 1e-2;
const SMALL_SNR_TERMS: usize = 40;

/// Linear signal-to-noise ratio P/N0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrLinear(f64);

impl SnrLinear {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(SnrLinear(value))
        } else {
            Err(Error::domain("snr", value, "must be finite and > 0"))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(db_to_linear(db))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        linear_to_db(self.0)
    }

    /// Scales the SNR, e.g. by a pilot power boost.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::new(self.0 * factor)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Exponential integral `E_q(x) = ∫₁^∞ t^{-q} e^{-xt} dt`.
pub fn exp_integral(q: u32, x: f64) -> Result<f64> {
    Ok(exp_integral_scaled(q, x)? * (-x).exp())
}

/// `e^x · E_q(x)`, which stays representable for large `x`.
///
/// Power series for `x < 1`, modified Lentz continued fraction otherwise.
pub fn exp_integral_scaled(q: u32, x: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("q", 0.0, "order must be >= 1"));
    }
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::domain("x", x, "must be finite and > 0"));
    }
    Ok(scaled_unchecked(q, x))
}

fn scaled_unchecked(q: u32, x: f64) -> f64 {
    if x < 1.0 {
        x.exp() * exp_integral_series(q, x)
    } else {
        exp_integral_scaled_cf(q, x)
    }
}

fn exp_integral_series(q: u32, x: f64) -> f64 {
    let nm1 = (q - 1) as f64;
    let mut sum = if q == 1 {
        -x.ln() - EULER_GAMMA
    } else {
        1.0 / nm1
    };
    let mut fact = 1.0;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        fact *= -x / fi;
        let del = if i as u32 != q - 1 {
            -fact / (fi - nm1)
        } else {
            let psi = -EULER_GAMMA + (1..q).map(|k| 1.0 / k as f64).sum::<f64>();
            fact * (-x.ln() + psi)
        };
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

fn exp_integral_scaled_cf(q: u32, x: f64) -> f64 {
    let nm1 = (q - 1) as f64;
    let mut b = x + q as f64;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let an = -fi * (nm1 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

// Asymptotic series g(s) = e^{1/s} E_1(1/s) = Σ (-1)^k k! s^{k+1} and its
// first two derivatives, for small s.
fn scaled_e1_small_snr(s: f64) -> (f64, f64, f64) {
    let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
    // term_k = (-1)^k k! s^k
    let mut term = 1.0;
    for k in 0..SMALL_SNR_TERMS {
        let kf = k as f64;
        g += term * s;
        g1 += term * (kf + 1.0);
        if k >= 1 {
            g2 += term * (kf + 1.0) * kf / s;
        }
        term *= -(kf + 1.0) * s;
    }
    (g, g1, g2)
}

/// Ergodic capacity (bits/s/Hz) at a raw linear SNR; `snr = 0` gives 0.
pub(crate) fn capacity_raw(snr: f64) -> f64 {
    if snr <= 0.0 {
        0.0
    } else if snr < SMALL_SNR {
        LOG2_E * scaled_e1_small_snr(snr).0
    } else {
        LOG2_E * scaled_unchecked(1, 1.0 / snr)
    }
}

pub(crate) fn capacity_d1_raw(snr: f64) -> f64 {
    if snr <= 0.0 {
        LOG2_E
    } else if snr < SMALL_SNR {
        LOG2_E * scaled_e1_small_snr(snr).1
    } else {
        (LOG2_E - capacity_raw(snr) / snr) / snr
    }
}

pub(crate) fn capacity_d2_raw(snr: f64) -> f64 {
    if snr <= 0.0 {
        -2.0 * LOG2_E
    } else if snr < SMALL_SNR {
        LOG2_E * scaled_e1_small_snr(snr).2
    } else {
        let c = capacity_raw(snr);
        let d1 = (LOG2_E - c / snr) / snr;
        -(LOG2_E + d1 - 2.0 * c / snr) / (snr * snr)
    }
}

/// `C(SNR) = E[log₂(1 + SNR |H|²)] = log₂(e) e^{1/SNR} E₁(1/SNR)`.
pub fn capacity_csi(snr: SnrLinear) -> f64 {
    capacity_raw(snr.value())
}

/// First derivative `(1/SNR)(log₂e − C/SNR)`.
pub fn capacity_csi_d1(snr: SnrLinear) -> f64 {
    capacity_d1_raw(snr.value())
}

/// Second derivative `−(1/SNR²)(log₂e + Ċ − 2C/SNR)`.
pub fn capacity_csi_d2(snr: SnrLinear) -> f64 {
    capacity_d2_raw(snr.value())
}

/// A perfect-CSI capacity function together with its first two derivatives.
///
/// The pilot spectral efficiency and the overhead expansions only see the
/// channel through this triple, which is how the multi-antenna capacity is
/// swapped in for the scalar one. Implementations must accept `snr = 0`.
pub trait CapacityCurve: Sync {
    fn capacity(&self, snr: f64) -> f64;
    fn capacity_d1(&self, snr: f64) -> f64;
    fn capacity_d2(&self, snr: f64) -> f64;
}

/// The single-antenna Rayleigh capacity `C(SNR)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScalarRayleigh;

impl CapacityCurve for ScalarRayleigh {
    fn capacity(&self, snr: f64) -> f64 {
        capacity_raw(snr)
    }
    fn capacity_d1(&self, snr: f64) -> f64 {
        capacity_d1_raw(snr)
    }
    fn capacity_d2(&self, snr: f64) -> f64 {
        capacity_d2_raw(snr)
    }
}
