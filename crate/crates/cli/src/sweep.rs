//! Parameter sweeps over one axis, evaluated numerically and/or through the
//! closed-form expansions.

use anyhow::{bail, ensure, Result};
use pilot_overhead::efficiency::{optimize_overhead, pilot_se};
use pilot_overhead::estimation::{FadingModel, PowerAllocation};
use pilot_overhead::expansions::{
    mimo_overhead_expansion, overhead_expansion, power_allocation_expansion, se_expansion_boost,
    se_expansion_no_boost, se_taylor,
};
use pilot_overhead::mimo::{optimize_overhead_mimo, AntennaConfig};
use pilot_overhead::special::{capacity_csi, db_to_linear, SnrLinear};
use pilot_overhead::spectra::{DopplerSpec, SpectralShape};
use pilot_overhead::Error;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    #[value(alias = "se_vs_alpha")]
    SeVsAlpha,
    #[value(alias = "alpha_star_vs_doppler")]
    AlphaStarVsDoppler,
    #[value(alias = "alpha_star_vs_snr")]
    AlphaStarVsSnr,
    #[value(alias = "se_star_vs_doppler")]
    SeStarVsDoppler,
    #[value(alias = "se_star_vs_snr")]
    SeStarVsSnr,
    #[value(alias = "rho_p_vs_snr")]
    RhoPVsSnr,
    #[value(alias = "se_boost_vs_doppler")]
    SeBoostVsDoppler,
    #[value(alias = "se_boost_vs_snr")]
    SeBoostVsSnr,
    #[value(alias = "alpha_star_vs_antennas")]
    AlphaStarVsAntennas,
}

/// What the sweep axis stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Alpha,
    Doppler,
    Snr,
    Antennas,
}

impl Quantity {
    pub fn axis_kind(self) -> AxisKind {
        use Quantity::*;
        match self {
            SeVsAlpha => AxisKind::Alpha,
            AlphaStarVsDoppler | SeStarVsDoppler | SeBoostVsDoppler => AxisKind::Doppler,
            AlphaStarVsSnr | SeStarVsSnr | RhoPVsSnr | SeBoostVsSnr => AxisKind::Snr,
            AlphaStarVsAntennas => AxisKind::Antennas,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Linear,
    Log,
    /// Evenly spaced in dB; only meaningful for SNR axes.
    Db,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.points >= 2,
            "grid: `points` must be at least 2, got {}",
            self.points
        );
        ensure!(
            self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi,
            "grid: need finite `lo` < `hi`, got [{}, {}]",
            self.lo,
            self.hi
        );
        if self.scale == Scale::Log {
            ensure!(
                self.lo > 0.0,
                "grid: log scale needs `lo` > 0, got {}",
                self.lo
            );
        }
        Ok(())
    }

    /// The grid as written on the x column (dB values for a dB axis).
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let step = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
        let mut v: Vec<f64> = match self.scale {
            Scale::Linear | Scale::Db => (0..n).map(|i| step(self.lo, self.hi, i)).collect(),
            Scale::Log => (0..n)
                .map(|i| step(self.lo.ln(), self.hi.ln(), i).exp())
                .collect(),
        };
        v[0] = self.lo;
        v[n - 1] = self.hi;
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Numeric,
    Expansion,
    /// Single antenna with Doppler `n_T f_D` and the scalar capacity.
    SisoEquivalent,
    PerfectCsi,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::Expansion => "expansion",
            Method::SisoEquivalent => "siso-equivalent",
            Method::PerfectCsi => "perfect-csi",
        }
    }
}

/// Parameters not swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fixed {
    pub snr_db: f64,
    pub doppler: f64,
    pub block_length: Option<u32>,
    pub n_t: u32,
    pub n_r: u32,
}

impl Default for Fixed {
    fn default() -> Self {
        Self {
            snr_db: 10.0,
            doppler: 0.02,
            block_length: None,
            n_t: 1,
            n_r: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub quantity: Quantity,
    pub axis: Axis,
    pub shape: SpectralShape,
    pub fixed: Fixed,
    pub methods: Vec<Method>,
    pub series: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub series: String,
    pub x: f64,
    pub method: Method,
    pub y: f64,
    pub clamped: Option<bool>,
}

// Evaluation point after the swept value has been substituted.
struct Point {
    snr: SnrLinear,
    doppler: f64,
    alpha: f64,
    antennas: u32,
}

impl SweepRequest {
    pub fn validate(&self) -> Result<()> {
        self.axis.validate()?;
        ensure!(
            !self.methods.is_empty(),
            "methods: at least one method is required"
        );
        let kind = self.quantity.axis_kind();
        if self.axis.scale == Scale::Db {
            ensure!(
                kind == AxisKind::Snr,
                "grid: the dB scale applies to SNR axes only"
            );
        }
        let f = &self.fixed;
        ensure!(f.snr_db.is_finite(), "snr_db: must be finite");
        ensure!(
            f.n_t >= 1 && f.n_r >= 1,
            "nt/nr: need at least one antenna on each side"
        );
        if let Some(n_b) = f.block_length {
            ensure!(n_b >= 1, "block_length: must be at least 1");
            ensure!(
                matches!(kind, AxisKind::Alpha | AxisKind::Snr),
                "block_length: a block-fading model has no Doppler or antenna axis"
            );
        } else if kind != AxisKind::Doppler {
            ensure!(
                f.doppler > 0.0 && f.doppler < 0.5,
                "doppler: must lie in (0, 1/2), got {}",
                f.doppler
            );
        }
        match kind {
            AxisKind::Alpha => {
                let alpha_min = self.model(f.doppler)?.alpha_min();
                ensure!(
                    self.axis.lo >= alpha_min * (1.0 - 1e-12) && self.axis.hi <= 1.0,
                    "grid: alpha must lie in [{alpha_min}, 1]"
                );
            }
            AxisKind::Doppler => ensure!(
                self.axis.lo > 0.0 && self.axis.hi < 0.5,
                "grid: Doppler must lie in (0, 1/2)"
            ),
            AxisKind::Snr => {
                if self.axis.scale != Scale::Db {
                    ensure!(self.axis.lo > 0.0, "grid: linear SNR must be > 0");
                }
            }
            AxisKind::Antennas => {
                ensure!(
                    self.axis.scale == Scale::Linear
                        && self.axis.lo >= 1.0
                        && self.axis.values().iter().all(|n| n.fract() == 0.0),
                    "grid: antenna counts must be whole numbers >= 1 on a linear axis"
                );
                ensure!(
                    self.axis.hi * f.doppler < 0.5,
                    "grid: n_T f_D must stay below 1/2"
                );
            }
        }
        Ok(())
    }

    fn model(&self, doppler: f64) -> Result<FadingModel> {
        Ok(match self.fixed.block_length {
            Some(n_b) => FadingModel::block(n_b)?,
            None => FadingModel::continuous(doppler, self.shape.clone())?,
        })
    }

    // Shape and Doppler fed to the expansions; a block model is its
    // rectangular equivalent.
    fn expansion_shape(&self, doppler: f64) -> (SpectralShape, f64) {
        match self.fixed.block_length {
            Some(n_b) => (SpectralShape::Rectangular, 0.5 / n_b as f64),
            None => (self.shape.clone(), doppler),
        }
    }

    fn point(&self, x: f64) -> Result<Point> {
        let f = &self.fixed;
        let mut p = Point {
            snr: SnrLinear::from_db(f.snr_db)?,
            doppler: f.doppler,
            alpha: f64::NAN,
            antennas: f.n_t,
        };
        match self.quantity.axis_kind() {
            AxisKind::Alpha => p.alpha = x,
            AxisKind::Doppler => p.doppler = x,
            AxisKind::Snr => {
                let s = if self.axis.scale == Scale::Db {
                    db_to_linear(x)
                } else {
                    x
                };
                p.snr = SnrLinear::new(s)?;
            }
            AxisKind::Antennas => p.antennas = x as u32,
        }
        Ok(p)
    }

    fn evaluate(&self, x: f64, method: Method) -> Result<(f64, Option<bool>)> {
        use Quantity::*;
        let p = self.point(x)?;
        if method == Method::PerfectCsi {
            return Ok((capacity_csi(p.snr), None));
        }
        let (shape, f_exp) = self.expansion_shape(p.doppler);
        let numeric = |boost: bool| -> Result<_> {
            Ok(optimize_overhead(&self.model(p.doppler)?, p.snr, boost)?)
        };
        let value = match (self.quantity, method) {
            (SeVsAlpha, Method::Numeric) => {
                let model = self.model(p.doppler)?;
                pilot_se(&model, p.snr, p.alpha, PowerAllocation::UNBOOSTED)?
            }
            (SeVsAlpha, Method::Expansion) => regime(se_taylor(&shape, p.snr, p.alpha, f_exp))?,
            (AlphaStarVsDoppler | AlphaStarVsSnr, Method::Numeric) => numeric(false)?.alpha_star,
            (AlphaStarVsDoppler | AlphaStarVsSnr, Method::Expansion) => {
                let e = overhead_expansion(&shape, p.snr, f_exp)?;
                return Ok((e.value, Some(e.clamped)));
            }
            (SeStarVsDoppler | SeStarVsSnr, Method::Numeric) => numeric(false)?.se_star,
            (SeStarVsDoppler | SeStarVsSnr, Method::Expansion) => {
                let clamped = overhead_expansion(&shape, p.snr, f_exp)?.unclamped() <= 2.0 * f_exp;
                let y = regime(se_expansion_no_boost(&shape, p.snr, f_exp))?;
                return Ok((y, Some(clamped)));
            }
            (RhoPVsSnr, Method::Numeric) => numeric(true)?.rho_p_star,
            (RhoPVsSnr, Method::Expansion) => {
                regime(power_allocation_expansion(p.snr, f_exp).map(|a| a.rho_p))?
            }
            (SeBoostVsDoppler | SeBoostVsSnr, Method::Numeric) => numeric(true)?.se_star,
            (SeBoostVsDoppler | SeBoostVsSnr, Method::Expansion) => {
                regime(se_expansion_boost(p.snr, f_exp))?
            }
            (AlphaStarVsAntennas, m) => {
                let n = p.antennas;
                let cfg = AntennaConfig::new(n, n)?;
                match m {
                    Method::Numeric => {
                        let spec = DopplerSpec::new(p.doppler, self.shape.clone())?;
                        optimize_overhead_mimo(cfg, &spec, p.snr, false)?.alpha_star
                    }
                    Method::Expansion => {
                        let e = mimo_overhead_expansion(&self.shape, p.snr, p.doppler, cfg)?;
                        return Ok((e.value, Some(e.clamped)));
                    }
                    _ => {
                        let siso =
                            FadingModel::continuous(n as f64 * p.doppler, self.shape.clone())?;
                        optimize_overhead(&siso, p.snr, false)?.alpha_star
                    }
                }
            }
            (q, m) => bail!("method `{}` is not available for {q:?}", m.name()),
        };
        Ok((value, None))
    }
}

// Expansions outside their regime are reported as missing values.
fn regime(r: pilot_overhead::Result<f64>) -> Result<f64> {
    match r {
        Err(Error::OutOfRegime(_)) => Ok(f64::NAN),
        other => Ok(other?),
    }
}

/// One row per grid point per method, ordered by grid index then method.
pub fn run_sweep(req: &SweepRequest) -> Result<Vec<Row>> {
    req.validate()?;
    let tasks: Vec<(f64, Method)> = req
        .axis
        .values()
        .into_iter()
        .flat_map(|x| req.methods.iter().map(move |&m| (x, m)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(x, method)| {
            let (y, clamped) = req.evaluate(x, method)?;
            Ok(Row {
                series: req.series.clone(),
                x,
                method,
                y,
                clamped,
            })
        })
        .collect()
}
