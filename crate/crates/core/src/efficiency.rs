//! Pilot-assisted spectral efficiency `(1 − α) C(SNR_eff)` and its exact
//! numerical maximization over the pilot overhead and the pilot power boost.

use crate::error::{Error, Result};
use crate::estimation::{mmse_unchecked, snr_eff_unchecked, FadingModel, PowerAllocation};
use crate::optim::{log_grid, maximize, scan};
use crate::special::{capacity_csi, CapacityCurve, ScalarRayleigh, SnrLinear};

/// Log-spaced scan points used to bracket the maximum.
pub const SCAN_POINTS: usize = 256;
/// Absolute tolerance of the golden-section refinement.
pub const ALPHA_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 500;

// Lower end of the boosted search, `ρ_d ∈ (EPS, 1/(1 − α_min)]`.
const RHO_D_EPS: f64 = 1e-9;
// Smallest pilot-side margin `1/(1 − α_min) − ρ_d` scanned.
const MARGIN_MIN: f64 = 1e-12;
const MARGIN_TOL: f64 = 1e-14;

/// Result of an overhead optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadSolution {
    pub alpha_star: f64,
    /// 1 when boosting is disabled.
    pub rho_p_star: f64,
    pub rho_d_star: f64,
    /// Maximized spectral efficiency, bits/s/Hz.
    pub se_star: f64,
    pub iterations: usize,
    /// Interval handed to the golden-section refinement.
    pub bracket: (f64, f64),
    pub converged: bool,
}

impl OverheadSolution {
    pub fn allocation(&self) -> PowerAllocation {
        PowerAllocation {
            rho_p: self.rho_p_star,
            rho_d: self.rho_d_star,
        }
    }
}

/// Spectral efficiency `(1 − α) C(SNR_eff)` achieved with pilot-based
/// channel estimation and nearest-neighbor decoding.
pub fn pilot_se(
    model: &FadingModel,
    snr: SnrLinear,
    alpha: f64,
    alloc: PowerAllocation,
) -> Result<f64> {
    pilot_se_with(model, snr, alpha, alloc, &ScalarRayleigh)
}

/// [`pilot_se`] with an arbitrary perfect-CSI capacity function.
pub fn pilot_se_with<C: CapacityCurve + ?Sized>(
    model: &FadingModel,
    snr: SnrLinear,
    alpha: f64,
    alloc: PowerAllocation,
    capacity: &C,
) -> Result<f64> {
    model.check_alpha(alpha)?;
    alloc.check(alpha)?;
    Ok(se_unchecked(model, snr.value(), alpha, alloc, capacity))
}

fn se_unchecked<C: CapacityCurve + ?Sized>(
    model: &FadingModel,
    snr: f64,
    alpha: f64,
    alloc: PowerAllocation,
    capacity: &C,
) -> f64 {
    if alpha >= 1.0 {
        return 0.0;
    }
    let m = mmse_unchecked(model, snr, alpha, alloc.rho_p);
    (1.0 - alpha) * capacity.capacity(snr_eff_unchecked(snr, m, alloc.rho_d))
}

/// Maximizes the pilot spectral efficiency.
///
/// Without boosting the overhead is searched over `[α_min, 1]`. With boosting
/// the overhead is pinned at `α_min` and the data/pilot split is chosen to
/// maximize `SNR_eff`.
pub fn optimize_overhead(
    model: &FadingModel,
    snr: SnrLinear,
    boost: bool,
) -> Result<OverheadSolution> {
    optimize_overhead_with(model, snr, boost, &ScalarRayleigh)
}

pub fn optimize_overhead_with<C: CapacityCurve + ?Sized>(
    model: &FadingModel,
    snr: SnrLinear,
    boost: bool,
    capacity: &C,
) -> Result<OverheadSolution> {
    let alpha_min = model.alpha_min();
    if alpha_min >= 1.0 {
        // Every symbol is a pilot.
        return Ok(OverheadSolution {
            alpha_star: 1.0,
            rho_p_star: 1.0,
            rho_d_star: 1.0,
            se_star: 0.0,
            iterations: 0,
            bracket: (1.0, 1.0),
            converged: true,
        });
    }
    if boost {
        optimize_boosted(model, snr.value(), capacity)
    } else {
        optimize_unboosted(model, snr.value(), capacity)
    }
}

fn optimize_unboosted<C: CapacityCurve + ?Sized>(
    model: &FadingModel,
    snr: f64,
    capacity: &C,
) -> Result<OverheadSolution> {
    let objective =
        |alpha: f64| se_unchecked(model, snr, alpha, PowerAllocation::UNBOOSTED, capacity);
    let grid = log_grid(model.alpha_min(), 1.0, SCAN_POINTS);
    let m = maximize(&objective, &grid, ALPHA_TOL, MAX_ITERATIONS)?;
    Ok(OverheadSolution {
        alpha_star: m.x,
        rho_p_star: 1.0,
        rho_d_star: 1.0,
        se_star: m.value,
        iterations: m.iterations,
        bracket: m.bracket,
        converged: true,
    })
}

// The search runs over the margin u = 1/(1 − α) − ρ_d, log-spaced so that
// both strong boosts (u ≈ 1) and weak ones (u ≪ 1) are resolved; ρ_p is
// then u (1 − α)/α exactly.
fn optimize_boosted<C: CapacityCurve + ?Sized>(
    model: &FadingModel,
    snr: f64,
    capacity: &C,
) -> Result<OverheadSolution> {
    let alpha = model.alpha_min();
    let rho_d_max = 1.0 / (1.0 - alpha);
    let rho_p_of = |u: f64| u * (1.0 - alpha) / alpha;
    let objective = |u: f64| {
        let m = mmse_unchecked(model, snr, alpha, rho_p_of(u));
        snr_eff_unchecked(snr, m, rho_d_max - u)
    };
    let grid = log_grid(MARGIN_MIN, rho_d_max - RHO_D_EPS, SCAN_POINTS);
    let m = maximize(&objective, &grid, MARGIN_TOL, MAX_ITERATIONS)?;
    let rho_d = rho_d_max - m.x;
    let rho_p = rho_p_of(m.x);
    Ok(OverheadSolution {
        alpha_star: alpha,
        rho_p_star: rho_p,
        rho_d_star: rho_d,
        se_star: (1.0 - alpha) * capacity.capacity(m.value),
        iterations: m.iterations,
        bracket: (rho_d_max - m.bracket.1, rho_d_max - m.bracket.0),
        converged: true,
    })
}

/// Gap to the perfect-CSI capacity, `C(SNR) − Ī*`.
pub fn penalty(model: &FadingModel, snr: SnrLinear, boost: bool) -> Result<f64> {
    Ok(capacity_csi(snr) - optimize_overhead(model, snr, boost)?.se_star)
}

/// Counts local maxima of the unboosted efficiency on a log grid over
/// `[α_min, 1]`, ignoring steps smaller than `noise`. A maximum sitting on
/// the left boundary counts.
pub fn count_local_maxima(
    model: &FadingModel,
    snr: SnrLinear,
    points: usize,
    noise: f64,
) -> Result<usize> {
    if points < 3 {
        return Err(Error::domain(
            "points",
            points as f64,
            "need at least 3 grid points",
        ));
    }
    let grid = log_grid(model.alpha_min(), 1.0, points);
    let objective = |alpha: f64| {
        se_unchecked(
            model,
            snr.value(),
            alpha,
            PowerAllocation::UNBOOSTED,
            &ScalarRayleigh,
        )
    };
    let values = scan(&objective, &grid);
    let signs: Vec<bool> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > noise)
        .map(|d| d > 0.0)
        .collect();
    let Some((&first, &last)) = signs.first().zip(signs.last()) else {
        return Ok(1);
    };
    let interior = signs.windows(2).filter(|w| w[0] && !w[1]).count();
    Ok(interior + usize::from(!first) + usize::from(last))
}

/// Best point of a brute-force grid over both the overhead and the data
/// power ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSearch {
    pub alpha: f64,
    pub rho_d: f64,
    pub se: f64,
}

/// Grid search over `α ∈ [α_min, 1)` × `ρ_d ∈ (0, 1/(1 − α))`, used to check
/// that pinning `α = α_min` under boosting loses nothing.
pub fn joint_boost_search(
    model: &FadingModel,
    snr: SnrLinear,
    alpha_points: usize,
    rho_points: usize,
) -> Result<JointSearch> {
    if alpha_points < 2 || rho_points < 2 {
        return Err(Error::domain(
            "points",
            1.0,
            "need at least 2 points per axis",
        ));
    }
    let alpha_min = model.alpha_min();
    if alpha_min >= 1.0 {
        return Ok(JointSearch {
            alpha: 1.0,
            rho_d: 1.0,
            se: 0.0,
        });
    }
    let alphas = log_grid(alpha_min, 1.0 - 1e-6, alpha_points);
    let per_alpha = |alpha: f64| {
        let rho_d_max = 1.0 / (1.0 - alpha);
        log_grid(MARGIN_MIN, rho_d_max - RHO_D_EPS, rho_points)
            .into_iter()
            .map(|u| {
                let rho_p = u * (1.0 - alpha) / alpha;
                let alloc = PowerAllocation {
                    rho_p,
                    rho_d: rho_d_max - u,
                };
                let se = se_unchecked(model, snr.value(), alpha, alloc, &ScalarRayleigh);
                (alloc.rho_d, se)
            })
            .fold(
                (f64::NAN, f64::NEG_INFINITY),
                |b, p| if p.1 > b.1 { p } else { b },
            )
    };
    let best_rho: Vec<f64> = scan(&|a| per_alpha(a).0, &alphas);
    let best_se: Vec<f64> = scan(&|a| per_alpha(a).1, &alphas);
    let i = best_se
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > best_se[b] { i } else { b });
    Ok(JointSearch {
        alpha: alphas[i],
        rho_d: best_rho[i],
        se: best_se[i],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::capacity_csi;
    use crate::spectra::SpectralShape;

    fn snr(v: f64) -> SnrLinear {
        SnrLinear::new(v).unwrap()
    }

    fn cj(f_d: f64) -> FadingModel {
        FadingModel::continuous(f_d, SpectralShape::ClarkeJakes).unwrap()
    }

    #[test]
    fn no_data_symbols_at_full_overhead() {
        let v = pilot_se(&cj(0.02), snr(10.0), 1.0, PowerAllocation::UNBOOSTED).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn block_example_composes_oracle_values() {
        let model = FadingModel::block(50).unwrap();
        let v = pilot_se(&model, snr(10.0), 0.02, PowerAllocation::UNBOOSTED).unwrap();
        let expected = 0.98 * capacity_csi(snr(100.0 / 21.0));
        assert!((v - expected).abs() < 1e-13);
    }

    #[test]
    fn violated_power_constraint_is_rejected() {
        let alloc = PowerAllocation::new(5.0, 1.0).unwrap();
        assert!(pilot_se(&cj(0.02), snr(10.0), 0.1, alloc).is_err());
        assert!(matches!(
            pilot_se(&cj(0.02), snr(10.0), 0.01, PowerAllocation::UNBOOSTED),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn unboosted_optimum_is_a_local_maximum() {
        let model = cj(0.02);
        let s = snr(10.0);
        let sol = optimize_overhead(&model, s, false).unwrap();
        assert!(sol.converged);
        assert!(sol.alpha_star > model.alpha_min() && sol.alpha_star < 1.0);
        for d in [-1e-4, 1e-4] {
            let v = pilot_se(&model, s, sol.alpha_star + d, PowerAllocation::UNBOOSTED).unwrap();
            assert!(v <= sol.se_star + 1e-12);
        }
        assert!(sol.se_star < capacity_csi(s));
    }

    #[test]
    fn boosted_solution_pins_alpha_min() {
        let model = cj(0.02);
        let sol = optimize_overhead(&model, snr(10.0), true).unwrap();
        assert_eq!(sol.alpha_star, model.alpha_min());
        assert!(sol.rho_p_star > 1.0 && sol.rho_d_star < 1.0);
        assert!(sol.allocation().constraint_residual(sol.alpha_star).abs() < 1e-12);
        let check = pilot_se(&model, snr(10.0), sol.alpha_star, sol.allocation()).unwrap();
        assert!((check - sol.se_star).abs() < 1e-12);
    }

    #[test]
    fn single_symbol_blocks_carry_no_data() {
        let model = FadingModel::block(1).unwrap();
        for boost in [false, true] {
            let sol = optimize_overhead(&model, snr(10.0), boost).unwrap();
            assert_eq!(sol.se_star, 0.0);
            assert_eq!(sol.alpha_star, 1.0);
        }
    }

    #[test]
    fn clarke_jakes_curve_is_single_peaked() {
        let n = count_local_maxima(&cj(0.02), snr(10.0), 2000, 1e-12).unwrap();
        assert_eq!(n, 1);
    }
}
