//! Expansion-versus-exact and cross-model consistency checks.
//!
//! Each criterion returns one or more [`Check`]s of the form
//! `observed <= tolerance`.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use pilot_overhead::efficiency::optimize_overhead;
use pilot_overhead::estimation::{
    mmse, mmse_clarke_jakes_closed, snr_eff, FadingModel, PowerAllocation,
};
use pilot_overhead::expansions::{
    boosting_gain, derivative_identities, mimo_overhead_expansion, overhead_expansion,
    power_allocation_expansion,
};
use pilot_overhead::mimo::{
    capacity_mimo, monte_carlo_capacity, optimize_overhead_mimo, AntennaConfig,
};
use pilot_overhead::special::{capacity_csi, SnrLinear};
use pilot_overhead::spectra::{DopplerSpec, SpectralShape};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    fn new(criterion: u8, name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            tolerance,
            observed,
            // NaN never passes.
            pass: observed <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            mc_samples: 1_000_000,
            seed: 20_240_229,
        }
    }
}

pub type Criterion = fn(&VerifyOptions) -> Result<Vec<Check>>;

pub const CRITERIA: [(u8, &str, Criterion); 9] = [
    (1, "closed-form vs quadrature MMSE", closed_form_mmse),
    (2, "block vs continuous equivalence", block_equivalence),
    (3, "inverse shape integrals", inverse_integrals),
    (4, "overhead expansion accuracy", overhead_accuracy),
    (5, "power allocation expansion accuracy", power_accuracy),
    (
        6,
        "derivative identities vs finite differences",
        derivative_checks,
    ),
    (7, "square-root Doppler scaling", root_doppler_scaling),
    (8, "boosting dominance and gain", boosting),
    (9, "MIMO equivalence", mimo_equivalence),
];

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let (_, _, f) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| anyhow::anyhow!("criterion: no criterion numbered {id}"))?;
    f(opts)
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (id, _, _) in CRITERIA {
        checks.extend(run_criterion(id, opts)?);
    }
    Ok(checks)
}

fn snr(v: f64) -> SnrLinear {
    SnrLinear::new(v).expect("positive SNR")
}

fn db(v: f64) -> SnrLinear {
    SnrLinear::from_db(v).expect("finite dB")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn grid(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

// NaN if any value is NaN or there are none, so a vacuous check fails.
fn max(it: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = it.into_iter().collect();
    if v.is_empty() || v.iter().any(|x| x.is_nan()) {
        return f64::NAN;
    }
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn cj(f: f64) -> FadingModel {
    FadingModel::continuous(f, SpectralShape::ClarkeJakes).expect("valid Doppler")
}

fn closed_form_mmse(_: &VerifyOptions) -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut cases = Vec::new();
    for f in [0.001, 0.02] {
        for alpha in grid(2.0 * f, 1.0, 20, true) {
            for s in grid(0.1, 100.0, 20, true) {
                for rho_p in [0.5, 1.0, 5.0] {
                    cases.push((f, alpha, s, rho_p));
                }
            }
        }
    }
    let errors: Vec<f64> = cases
        .par_iter()
        .map(|&(f, alpha, s, rho_p)| -> Result<f64> {
            let closed = mmse_clarke_jakes_closed(snr(s), alpha, f, rho_p)?;
            let quad = mmse(&cj(f), snr(s), alpha, rho_p)?;
            Ok((closed - quad).abs())
        })
        .collect::<Result<_>>()?;
    Ok(vec![
        Check::new(1, "max |closed - quadrature|", max(errors), 1e-8),
        Check::new(1, "runtime (s)", start.elapsed().as_secs_f64(), 10.0),
    ])
}

fn block_equivalence(_: &VerifyOptions) -> Result<Vec<Check>> {
    let (mut mmse_err, mut alpha_err) = (0.0f64, 0.0f64);
    for n_b in [10u32, 50, 500] {
        let block = FadingModel::block(n_b)?;
        let rect = FadingModel::continuous(0.5 / n_b as f64, SpectralShape::Rectangular)?;
        for s in [1.0, 10.0] {
            for alpha in grid(block.alpha_min(), 1.0, 10, true) {
                for rho_p in [1.0, 4.0] {
                    let a = mmse(&block, snr(s), alpha, rho_p)?;
                    let b = mmse(&rect, snr(s), alpha, rho_p)?;
                    mmse_err = mmse_err.max((a - b).abs());
                }
            }
            for boost in [false, true] {
                let a = optimize_overhead(&block, snr(s), boost)?;
                let b = optimize_overhead(&rect, snr(s), boost)?;
                alpha_err = alpha_err.max((a.alpha_star - b.alpha_star).abs());
            }
        }
    }
    Ok(vec![
        Check::new(2, "max |MMSE block - rectangular|", mmse_err, 1e-10),
        Check::new(2, "max |alpha* block - rectangular|", alpha_err, 1e-7),
    ])
}

fn inverse_integrals(_: &VerifyOptions) -> Result<Vec<Check>> {
    Ok(vec![
        Check::new(
            3,
            "|Clarke-Jakes - pi^2/2|",
            (SpectralShape::ClarkeJakes.inverse_integral()? - PI * PI / 2.0).abs(),
            1e-9,
        ),
        Check::new(
            3,
            "|rectangular - 4|",
            (SpectralShape::Rectangular.inverse_integral()? - 4.0).abs(),
            1e-9,
        ),
    ])
}

// Relative error of the overhead expansion on the Doppler grid shared by
// criteria 4 and 8, in (SNR dB, f_D) order.
fn doppler_grid() -> Vec<(f64, f64)> {
    [0.0, 10.0]
        .into_iter()
        .flat_map(|d| grid(1e-4, 0.05, 10, true).into_iter().map(move |f| (d, f)))
        .collect()
}

fn overhead_accuracy(_: &VerifyOptions) -> Result<Vec<Check>> {
    let start = Instant::now();
    let errors: Vec<(f64, f64)> = doppler_grid()
        .par_iter()
        .map(|&(d, f)| -> Result<(f64, f64)> {
            let exact = optimize_overhead(&cj(f), db(d), false)?.alpha_star;
            let approx = overhead_expansion(&SpectralShape::ClarkeJakes, db(d), f)?.value;
            Ok((f, rel(approx, exact)))
        })
        .collect::<Result<_>>()?;
    let at_min = max(errors.iter().filter(|e| e.0 == 1e-4).map(|e| e.1));
    debug_assert_eq!(errors.iter().filter(|e| e.0 == 1e-4).count(), 2);
    let mut checks = vec![
        Check::new(
            4,
            "max relative error, f_D in [1e-4, 0.05]",
            max(errors.iter().map(|e| e.1)),
            0.10,
        ),
        Check::new(4, "max relative error at f_D = 1e-4", at_min, 0.02),
    ];
    for d in [0.0, 10.0] {
        let worst = errors
            .iter()
            .zip(doppler_grid())
            .filter(|(_, p)| p.0 == d)
            .map(|(e, _)| e.1);
        checks.push(Check::new(
            4,
            format!("max relative error at {d} dB"),
            max(worst),
            0.10,
        ));
    }
    checks.push(Check::new(
        4,
        "runtime (s)",
        start.elapsed().as_secs_f64(),
        60.0,
    ));
    Ok(checks)
}

fn power_accuracy(_: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (f, tol) in [(0.001, 0.03), (0.02, 0.10)] {
        let errors: Vec<f64> = grid(0.0, 20.0, 5, false)
            .par_iter()
            .map(|&d| -> Result<f64> {
                let exact = optimize_overhead(&cj(f), db(d), true)?.rho_p_star;
                let approx = power_allocation_expansion(db(d), f)?.rho_p;
                Ok(rel(approx, exact))
            })
            .collect::<Result<_>>()?;
        checks.push(Check::new(
            5,
            format!("max relative rho_p error at f_D = {f}"),
            max(errors),
            tol,
        ));
    }
    Ok(checks)
}

fn derivative_checks(_: &VerifyOptions) -> Result<Vec<Check>> {
    let (f0, h) = (1e-6, 1e-7);
    let d1 = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        Ok((g(f0 + h)? - g(f0 - h)?) / (2.0 * h))
    };
    let d2 = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        Ok((g(f0 + h)? - 2.0 * g(f0)? + g(f0 - h)?) / (h * h))
    };
    let mut worst = [0.0f64; 5];
    for shape in [SpectralShape::ClarkeJakes, SpectralShape::Rectangular] {
        let model = |f: f64| FadingModel::continuous(f, shape.clone());
        for alpha in [0.05, 0.2] {
            for s in [1.0, 10.0] {
                for rho_d in [0.8, 0.95] {
                    let oracle = derivative_identities(&shape, snr(s), alpha, rho_d)?;
                    let fixed = |f: f64| Ok(mmse(&model(f)?, snr(s), alpha, 1.0)?);
                    let boosted = |f: f64| {
                        let alloc = PowerAllocation::from_data_ratio(2.0 * f, rho_d)?;
                        Ok(mmse(&model(f)?, snr(s), 2.0 * f, alloc.rho_p)?)
                    };
                    let eff = |f: f64| Ok(snr_eff(snr(s), boosted(f)?, rho_d)?);
                    let errs = [
                        rel(d1(&fixed)?, oracle.mmse_d1),
                        rel(d2(&fixed)?, oracle.mmse_d2),
                        rel(d1(&boosted)?, oracle.boosted_mmse_d1),
                        rel(d2(&boosted)?, oracle.boosted_mmse_d2),
                        rel(d1(&eff)?, oracle.snr_eff_boost[1]),
                    ];
                    for (w, e) in worst.iter_mut().zip(errs) {
                        *w = w.max(e);
                    }
                }
            }
        }
    }
    let names = [
        "dMMSE/df_D, fixed overhead",
        "d2MMSE/df_D2, fixed overhead",
        "dMMSE/df_D, boosted",
        "d2MMSE/df_D2, boosted",
        "dSNR_eff/df_D, boosted",
    ];
    Ok(names
        .iter()
        .zip(worst)
        .map(|(n, w)| Check::new(6, format!("max relative error {n}"), w, 1e-3))
        .collect())
}

fn root_doppler_scaling(_: &VerifyOptions) -> Result<Vec<Check>> {
    let c = capacity_csi(snr(10.0));
    let lo = optimize_overhead(&cj(1e-4), snr(10.0), false)?;
    let hi = optimize_overhead(&cj(4e-4), snr(10.0), false)?;
    let penalty_ratio = (c - hi.se_star) / (c - lo.se_star);
    let alpha_ratio = hi.alpha_star / lo.alpha_star;
    Ok(vec![
        Check::new(7, "|penalty ratio - 2|", (penalty_ratio - 2.0).abs(), 0.2),
        Check::new(7, "|alpha* ratio - 2|", (alpha_ratio - 2.0).abs(), 0.2),
    ])
}

fn boosting(_: &VerifyOptions) -> Result<Vec<Check>> {
    let deficits: Vec<f64> = doppler_grid()
        .par_iter()
        .map(|&(d, f)| -> Result<f64> {
            let plain = optimize_overhead(&cj(f), db(d), false)?.se_star;
            let boosted = optimize_overhead(&cj(f), db(d), true)?.se_star;
            Ok(plain - boosted)
        })
        .collect::<Result<_>>()?;
    let f = 0.001;
    let gain = optimize_overhead(&cj(f), db(10.0), true)?.se_star
        - optimize_overhead(&cj(f), db(10.0), false)?.se_star;
    let predicted = boosting_gain(db(10.0), f)?;
    Ok(vec![
        Check::new(
            8,
            "max (unboosted - boosted) efficiency",
            max(deficits),
            1e-12,
        ),
        Check::new(
            8,
            "relative gain error at f_D = 0.001, 10 dB",
            rel(predicted, gain),
            0.25,
        ),
    ])
}

fn mimo_equivalence(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let s = db(10.0);
    let mut cases = Vec::new();
    for f in [0.001, 0.01] {
        for n in [1u32, 2, 4, 8] {
            cases.push((f, n));
        }
    }
    let results: Vec<[f64; 3]> = cases
        .par_iter()
        .map(|&(f, n)| -> Result<[f64; 3]> {
            let cfg = AntennaConfig::new(n, n)?;
            let spec = DopplerSpec::new(f, SpectralShape::Rectangular)?;
            let mimo = optimize_overhead_mimo(cfg, &spec, s, false)?.alpha_star;
            let equivalent = FadingModel::continuous(n as f64 * f, SpectralShape::Rectangular)?;
            let same_capacity =
                pilot_overhead::efficiency::optimize_overhead_with(&equivalent, s, false, &cfg)?;
            let scalar = optimize_overhead(&equivalent, s, false)?;
            let expansion = mimo_overhead_expansion(&SpectralShape::Rectangular, s, f, cfg)?;
            Ok([
                rel(same_capacity.alpha_star, mimo),
                rel(scalar.alpha_star, mimo),
                rel(expansion.value, mimo),
            ])
        })
        .collect::<Result<_>>()?;
    let mut checks = vec![
        Check::new(
            9,
            "max relative alpha* gap, equivalent with C_{n,n}",
            max(results.iter().map(|r| r[0])),
            0.02,
        ),
        Check::new(
            9,
            "max relative alpha* gap, equivalent with scalar C",
            max(results.iter().map(|r| r[1])),
            0.02,
        ),
        Check::new(
            9,
            "max relative error of MIMO overhead expansion",
            max(results.iter().map(|r| r[2])),
            0.10,
        ),
    ];
    for n in [2u32, 4, 8] {
        let cfg = AntennaConfig::new(n, n)?;
        let mc = monte_carlo_capacity(cfg, s, opts.mc_samples, opts.seed)?;
        let exact = capacity_mimo(cfg, s);
        checks.push(Check::new(
            9,
            format!("|capacity - Monte Carlo| / std error, {n}x{n}"),
            (exact - mc.mean).abs() / mc.std_error,
            3.0,
        ));
    }
    Ok(checks)
}
