//! Ergodic capacity of IID Rayleigh MIMO channels with perfect CSI, and the
//! MIMO form of the pilot overhead problem.

use nalgebra::Complex;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::efficiency::{optimize_overhead_with, OverheadSolution};
use crate::error::{Error, Result};
use crate::estimation::{mmse, FadingModel};
use crate::quad;
use crate::special::{CapacityCurve, SnrLinear, LOG2_E};
use crate::spectra::{check_doppler, DopplerSpec};

const TAIL_TOL: f64 = 1e-17;
const MAX_UPPER: f64 = 65_536.0;
const MC_CHUNK: usize = 16_384;

/// Numbers of transmit and receive antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntennaConfig {
    n_t: u32,
    n_r: u32,
}

impl AntennaConfig {
    pub fn new(n_t: u32, n_r: u32) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::domain(
                "antennas",
                n_t.min(n_r) as f64,
                "need at least one antenna on each side",
            ));
        }
        Ok(Self { n_t, n_r })
    }

    pub fn n_t(&self) -> u32 {
        self.n_t
    }

    pub fn n_r(&self) -> u32 {
        self.n_r
    }

    /// Pilot overhead below which the per-entry channel is aliased,
    /// `2 n_T f_D`.
    pub fn alpha_min(&self, f_d: f64) -> f64 {
        2.0 * self.n_t as f64 * f_d
    }

    // Expectation of g(λ) over the unordered eigenvalue λ of H†H (or HH†),
    // scaled by m = min(n_T, n_R):
    //   ∫ g(λ) Σ_{k<m} k!/(k+d)! [L_k^d(λ)]² λ^d e^{−λ} dλ.
    fn eigen_expectation<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let m = self.n_t.min(self.n_r) as usize;
        let d = self.n_t.abs_diff(self.n_r) as usize;
        let integrand = |x: f64| g(x) * self.density(x, m, d);
        let mut total = 0.0;
        let (mut a, mut b) = (0.0, 1.0);
        let bulk = 4.0 * (m + d) as f64 + 40.0;
        loop {
            let part = quad::integrate(integrand, a, b, 0.0, 1e-13).value;
            total += part;
            if (b >= bulk && part.abs() <= TAIL_TOL * total.abs()) || b >= MAX_UPPER {
                break;
            }
            a = b;
            b *= 2.0;
        }
        total
    }

    fn density(&self, x: f64, m: usize, d: usize) -> f64 {
        let weight = if d == 0 {
            (-x).exp()
        } else if x == 0.0 {
            0.0
        } else {
            (d as f64 * x.ln() - x).exp()
        };
        if weight == 0.0 {
            return 0.0;
        }
        // Orthonormalized Laguerre: ℓ_k = √(k!/(k+d)!) L_k^d, by recurrence.
        let df = d as f64;
        let mut sum = 0.0;
        let (mut prev, mut cur) = (0.0, 1.0);
        let mut norm = 1.0 / (1..=d).map(|i| i as f64).product::<f64>();
        for k in 0..m {
            sum += norm * cur * cur;
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0 + df - x) * cur - (kf + df) * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
            norm *= (kf + 1.0) / (kf + 1.0 + df);
        }
        sum * weight
    }
}

impl CapacityCurve for AntennaConfig {
    fn capacity(&self, snr: f64) -> f64 {
        let a = snr / self.n_t as f64;
        self.eigen_expectation(|x| (a * x).ln_1p() * LOG2_E)
    }

    fn capacity_d1(&self, snr: f64) -> f64 {
        let nt = self.n_t as f64;
        let a = snr / nt;
        self.eigen_expectation(|x| LOG2_E * (x / nt) / (1.0 + a * x))
    }

    fn capacity_d2(&self, snr: f64) -> f64 {
        let nt = self.n_t as f64;
        let a = snr / nt;
        self.eigen_expectation(|x| -LOG2_E * ((x / nt) / (1.0 + a * x)).powi(2))
    }
}

/// `E[log₂ det(I + (SNR/n_T) H H†)]` for `H` with IID `CN(0, 1)` entries.
pub fn capacity_mimo(cfg: AntennaConfig, snr: SnrLinear) -> f64 {
    cfg.capacity(snr.value())
}

pub fn capacity_mimo_d1(cfg: AntennaConfig, snr: SnrLinear) -> f64 {
    cfg.capacity_d1(snr.value())
}

pub fn capacity_mimo_d2(cfg: AntennaConfig, snr: SnrLinear) -> f64 {
    cfg.capacity_d2(snr.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Sample mean of `log₂ det(I + (SNR/n_T) H H†)`.
///
/// Samples are drawn in fixed-size chunks, chunk `i` from a ChaCha8 stream
/// `i` under `seed`, so the estimate depends only on `(seed, samples)`.
pub fn monte_carlo_capacity(
    cfg: AntennaConfig,
    snr: SnrLinear,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < 2 {
        return Err(Error::domain(
            "samples",
            samples as f64,
            "need at least 2 samples",
        ));
    }
    let a = snr.value() / cfg.n_t as f64;
    let chunks = samples.div_ceil(MC_CHUNK);
    let stats: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let n = MC_CHUNK.min(samples - i * MC_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (mut mean, mut m2) = (0.0, 0.0);
            for j in 0..n {
                let v = log2det_sample(&mut rng, cfg, a);
                let delta = v - mean;
                mean += delta / (j + 1) as f64;
                m2 += delta * (v - mean);
            }
            (n as f64, mean, m2)
        })
        .collect();
    let (n, mean, m2) = stats
        .into_iter()
        .fold((0.0, 0.0, 0.0), |(na, ma, sa), (nb, mb, sb)| {
            let n = na + nb;
            let delta = mb - ma;
            (
                n,
                ma + delta * nb / n,
                sa + sb + delta * delta * na * nb / n,
            )
        });
    let variance = m2 / (n - 1.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (variance / n).sqrt(),
        samples,
    })
}

fn log2det_sample(rng: &mut ChaCha8Rng, cfg: AntennaConfig, a: f64) -> f64 {
    let (rows, cols) = (cfg.n_r as usize, cfg.n_t as usize);
    let h = DMatrix::<Complex<f64>>::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let gram = if cols <= rows {
        h.adjoint() * &h
    } else {
        &h * h.adjoint()
    };
    let k = gram.nrows();
    let m = DMatrix::<Complex<f64>>::identity(k, k) + gram * Complex::new(a, 0.0);
    let l = m
        .cholesky()
        .expect("I + a·Gram is Hermitian positive definite")
        .unpack();
    2.0 * (0..k).map(|i| l[(i, i)].re.log2()).sum::<f64>()
}

/// Per-entry channel-estimation MMSE with `n_T` orthogonal pilot streams:
/// the single-antenna MMSE at Doppler `n_T f_D`.
pub fn mimo_mmse(
    cfg: AntennaConfig,
    spec: &DopplerSpec,
    snr: SnrLinear,
    alpha: f64,
    rho_p: f64,
) -> Result<f64> {
    let model = equivalent_model(cfg, spec)?;
    mmse(&model, snr, alpha, rho_p)
}

/// Single-antenna model at Doppler `n_T f_D`.
pub fn equivalent_model(cfg: AntennaConfig, spec: &DopplerSpec) -> Result<FadingModel> {
    let f_eff = cfg.n_t as f64 * spec.f_d();
    check_doppler(f_eff)
        .map_err(|_| Error::domain("n_T f_D", f_eff, "effective Doppler must stay below 1/2"))?;
    Ok(FadingModel::Continuous(spec.with_doppler(f_eff)?))
}

/// Optimum MIMO pilot overhead: the single-antenna problem at Doppler
/// `n_T f_D` with the MIMO capacity in place of the scalar one.
pub fn optimize_overhead_mimo(
    cfg: AntennaConfig,
    spec: &DopplerSpec,
    snr: SnrLinear,
    boost: bool,
) -> Result<OverheadSolution> {
    optimize_overhead_with(&equivalent_model(cfg, spec)?, snr, boost, &cfg)
}

/// Boosted MIMO pilot power fraction `√((1 + 1/SNR) 2 n_T f_D)`.
pub fn mimo_pilot_power_fraction(snr: SnrLinear, f_d: f64, cfg: AntennaConfig) -> Result<f64> {
    check_doppler(f_d)?;
    let s = snr.value();
    Ok(((1.0 + 1.0 / s) * 2.0 * cfg.n_t as f64 * f_d).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{capacity_csi, capacity_csi_d1, capacity_csi_d2};
    use crate::spectra::SpectralShape;

    fn snr(v: f64) -> SnrLinear {
        SnrLinear::new(v).unwrap()
    }

    fn cfg(t: u32, r: u32) -> AntennaConfig {
        AntennaConfig::new(t, r).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn single_antenna_reduces_to_scalar() {
        for s in [0.1, 1.0, 10.0, 100.0] {
            let one = cfg(1, 1);
            assert!((capacity_mimo(one, snr(s)) - capacity_csi(snr(s))).abs() < 1e-6);
            assert!(rel(capacity_mimo_d1(one, snr(s)), capacity_csi_d1(snr(s))) < 1e-5);
            assert!(rel(capacity_mimo_d2(one, snr(s)), capacity_csi_d2(snr(s))) < 1e-5);
        }
    }

    #[test]
    fn reference_values() {
        // Frozen from an independent mpmath evaluation of the same integral.
        assert!(rel(capacity_mimo(cfg(2, 2), snr(10.0)), 5.5492276) < 1e-6);
        assert!(rel(capacity_mimo(cfg(4, 4), snr(10.0)), 10.941422) < 1e-6);
    }

    #[test]
    fn two_by_two_is_bracketed() {
        let c = capacity_mimo(cfg(2, 2), snr(10.0));
        assert!(c > capacity_csi(snr(10.0)) && c < 2.0 * 11f64.log2());
    }

    #[test]
    fn density_integrates_to_rank() {
        for (t, r) in [(1, 1), (2, 3), (4, 4), (8, 2)] {
            let c = cfg(t, r);
            assert!((c.eigen_expectation(|_| 1.0) - t.min(r) as f64).abs() < 1e-10);
            // E[tr(H†H)] = n_T n_R.
            assert!((c.eigen_expectation(|x| x) - (t * r) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for c in [cfg(2, 2), cfg(1, 3), cfg(4, 2)] {
            for s in [1.0, 10.0] {
                let h = 1e-3 * s;
                let f = |x: f64| c.capacity(x);
                let d1 = |h: f64| (f(s + h) - f(s - h)) / (2.0 * h);
                let d2 = |h: f64| (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
                let r1 = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
                let r2 = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
                assert!(rel(r1, c.capacity_d1(s)) < 1e-4);
                assert!(rel(r2, c.capacity_d2(s)) < 1e-4);
                assert!(c.capacity_d1(s) > 0.0 && c.capacity_d2(s) < 0.0);
            }
        }
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = monte_carlo_capacity(cfg(2, 2), snr(10.0), 40_000, 7).unwrap();
        let b = monte_carlo_capacity(cfg(2, 2), snr(10.0), 40_000, 7).unwrap();
        assert_eq!(a, b);
        let c = capacity_mimo(cfg(2, 2), snr(10.0));
        assert!((a.mean - c).abs() < 4.0 * a.std_error);
    }

    #[test]
    fn mmse_uses_effective_doppler() {
        let rect = |f| DopplerSpec::new(f, SpectralShape::Rectangular).unwrap();
        let v = mimo_mmse(cfg(2, 2), &rect(0.01), snr(10.0), 0.2, 1.0).unwrap();
        assert!((v - 1.0 / 51.0).abs() < 1e-15);
        let cj = |f| DopplerSpec::new(f, SpectralShape::ClarkeJakes).unwrap();
        let two = mimo_mmse(cfg(2, 1), &cj(0.01), snr(10.0), 0.1, 2.0).unwrap();
        let one = mimo_mmse(cfg(1, 1), &cj(0.02), snr(10.0), 0.1, 2.0).unwrap();
        assert_eq!(two, one);
        assert!(matches!(
            mimo_mmse(cfg(4, 4), &cj(0.01), snr(10.0), 0.05, 1.0),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn boosted_power_fraction_scales_with_root_nt() {
        let base = mimo_pilot_power_fraction(snr(10.0), 1e-3, cfg(1, 1)).unwrap();
        for n in [2u32, 4, 9] {
            let v = mimo_pilot_power_fraction(snr(10.0), 1e-3, cfg(n, n)).unwrap();
            assert!((v - (n as f64).sqrt() * base).abs() < 1e-15);
        }
    }
}
