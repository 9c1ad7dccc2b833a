//! Normalized Doppler spectral shapes `S̃(ξ)`, supported on `ξ ∈ [-1, 1]`.
//!
//! A physical spectrum with maximum normalized Doppler `f_D` is recovered as
//! `S(ν) = S̃(ν / f_D) / f_D`. Only the shape enters the estimation error, so
//! the shape is the unit the rest of the crate works with.
//!
//! The Clarke-Jakes shape has inverse-square-root singularities at `ξ = ±1`.
//! Every integral over it is evaluated under `ξ = sin θ`, which turns
//! `S̃(ξ) dξ` into the constant `dθ / π`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use crate::error::{Error, Result};
use crate::quad;

const QUAD_ABS_TOL: f64 = 1e-15;
const QUAD_REL_TOL: f64 = 1e-14;
const KNOT_TOL: f64 = 1e-12;
const NORMALIZATION_WARN: f64 = 1e-3;

/// A unit-power Doppler spectral shape, bandlimited to `±1` and strictly
/// positive inside the band.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralShape {
    /// `1 / (π √(1 − ξ²))`
    ClarkeJakes,
    /// `1/2` on `[-1, 1]`
    Rectangular,
    Tabulated(TabulatedShape),
}

/// A piecewise-linear shape through user-supplied samples, rescaled to unit
/// power at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedShape {
    knots: Vec<f64>,
    values: Vec<f64>,
    raw_power: f64,
}

impl TabulatedShape {
    /// Builds a shape from samples of an unnormalized spectrum.
    ///
    /// The grid must start at -1, end at +1 and be strictly increasing. Values
    /// must be non-negative and strictly positive at interior knots.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::InvalidShape(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.len() < 2 {
            return Err(Error::InvalidShape("need at least two samples".into()));
        }
        if let Some(i) = knots.iter().chain(&values).position(|v| !v.is_finite()) {
            return Err(Error::InvalidShape(format!(
                "non-finite entry at position {i}"
            )));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidShape(format!(
                "grid is not strictly increasing at sample {} (ξ = {})",
                i + 1,
                knots[i + 1]
            )));
        }
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if (first + 1.0).abs() > KNOT_TOL || (last - 1.0).abs() > KNOT_TOL {
            return Err(Error::InvalidShape(format!(
                "grid must span [-1, 1], got [{first}, {last}]"
            )));
        }
        if let Some(i) = values.iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidShape(format!(
                "negative value {} at ξ = {}",
                values[i], knots[i]
            )));
        }
        let n = values.len();
        if let Some(i) = (1..n - 1).find(|&i| values[i] == 0.0) {
            return Err(Error::InvalidShape(format!(
                "shape vanishes at interior point ξ = {}",
                knots[i]
            )));
        }
        let mut knots = knots;
        knots[0] = -1.0;
        knots[n - 1] = 1.0;

        let raw_power: f64 = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum();
        if raw_power <= 0.0 {
            return Err(Error::InvalidShape("shape has zero power".into()));
        }
        if (raw_power - 1.0).abs() > NORMALIZATION_WARN {
            log::warn!("tabulated spectrum integrates to {raw_power}; rescaling to unit power");
        }
        let values = values.into_iter().map(|v| v / raw_power).collect();
        Ok(TabulatedShape {
            knots,
            values,
            raw_power,
        })
    }

    /// Parses whitespace-separated `ξ value` pairs, one per line. Blank lines
    /// and anything after `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::InvalidShape(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidShape(format!("line {}: {s:?}: {e}", lineno + 1)))
            };
            knots.push(parse(fields[0])?);
            values.push(parse(fields[1])?);
        }
        Self::new(knots, values)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Normalized sample values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Integral of the samples before rescaling.
    pub fn raw_power(&self) -> f64 {
        self.raw_power
    }

    fn eval(&self, xi: f64) -> f64 {
        if !(-1.0..=1.0).contains(&xi) {
            return 0.0;
        }
        let i = self
            .knots
            .partition_point(|&k| k <= xi)
            .clamp(1, self.knots.len() - 1);
        let (x0, x1) = (self.knots[i - 1], self.knots[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        y0 + (y1 - y0) * (xi - x0) / (x1 - x0)
    }

    // Integrates g(S̃(ξ)) over [lo, hi], one segment at a time so the kinks at
    // the knots never fall inside a quadrature panel.
    fn integrate_over<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for (x, y) in self.knots.windows(2).zip(self.values.windows(2)) {
            let a = x[0].max(lo);
            let b = x[1].min(hi);
            if b <= a {
                continue;
            }
            let slope = (y[1] - y[0]) / (x[1] - x[0]);
            let s = |xi: f64| y[0] + slope * (xi - x[0]);
            total += quad::integrate(|xi| g(s(xi)), a, b, QUAD_ABS_TOL, QUAD_REL_TOL).value;
        }
        total
    }
}

impl SpectralShape {
    /// Shape value `S̃(ξ)`; zero outside `[-1, 1]`.
    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            SpectralShape::ClarkeJakes => {
                let a = xi.abs();
                if a > 1.0 {
                    0.0
                } else if a == 1.0 {
                    f64::INFINITY
                } else {
                    1.0 / (PI * (1.0 - xi * xi).sqrt())
                }
            }
            SpectralShape::Rectangular => {
                if xi.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            SpectralShape::Tabulated(t) => t.eval(xi),
        }
    }

    /// `∫_lo^hi S̃(ξ) dξ`, with the limits clipped to `[-1, 1]`.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
        if hi <= lo {
            return 0.0;
        }
        match self {
            SpectralShape::ClarkeJakes => {
                quad::integrate(
                    |_| 1.0 / PI,
                    lo.asin(),
                    hi.asin(),
                    QUAD_ABS_TOL,
                    QUAD_REL_TOL,
                )
                .value
            }
            SpectralShape::Rectangular => 0.5 * (hi - lo),
            SpectralShape::Tabulated(t) => t.integrate_over(|s| s, lo, hi),
        }
    }

    /// `∫ S̃(ξ) dξ` over the whole band; 1 for every valid shape.
    pub fn total_power(&self) -> f64 {
        self.band_power(-1.0, 1.0)
    }

    /// `∫_{-1}^{1} dξ / S̃(ξ)`, the only way the shape enters the first-order
    /// overhead correction.
    pub fn inverse_integral(&self) -> Result<f64> {
        match self {
            SpectralShape::ClarkeJakes => {
                // dξ / S̃ = π cos²θ dθ
                Ok(quad::integrate(
                    |t: f64| PI * t.cos().powi(2),
                    -FRAC_PI_2,
                    FRAC_PI_2,
                    QUAD_ABS_TOL,
                    QUAD_REL_TOL,
                )
                .value)
            }
            SpectralShape::Rectangular => Ok(4.0),
            SpectralShape::Tabulated(t) => {
                let n = t.values.len();
                if let Some(i) = [0, n - 1].into_iter().find(|&i| t.values[i] == 0.0) {
                    return Err(Error::Divergent(format!(
                        "∫ dξ/S̃(ξ) diverges logarithmically: the shape vanishes at ξ = {}",
                        t.knots[i]
                    )));
                }
                Ok(t.integrate_over(|s| 1.0 / s, -1.0, 1.0))
            }
        }
    }

    /// `∫ S̃(ξ) / (c + S̃(ξ)) dξ` for `c > 0`.
    ///
    /// The channel-estimation MMSE is `c` times this integral with
    /// `c = f_D / (α ρ_p SNR)`. Written this way the MMSE never suffers the
    /// cancellation of `1 − ∫ S̃² / (c + S̃)` when the error is small.
    pub(crate) fn estimation_integral(&self, c: f64) -> f64 {
        match self {
            SpectralShape::ClarkeJakes => {
                // S̃/(c+S̃) dξ = cos θ / (1 + cπ cos θ) dθ
                quad::integrate(
                    |t: f64| {
                        let ct = t.cos();
                        ct / (1.0 + c * PI * ct)
                    },
                    -FRAC_PI_2,
                    FRAC_PI_2,
                    1e-16,
                    QUAD_REL_TOL,
                )
                .value
            }
            SpectralShape::Rectangular => 2.0 / (1.0 + 2.0 * c),
            SpectralShape::Tabulated(t) => t.integrate_over(|s| s / (c + s), -1.0, 1.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpectralShape::ClarkeJakes => "clarke-jakes",
            SpectralShape::Rectangular => "rectangular",
            SpectralShape::Tabulated(_) => "tabulated",
        }
    }
}

/// A shape together with the maximum normalized Doppler frequency
/// `f_D = f_m T` (cycles per symbol).
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerSpec {
    f_d: f64,
    shape: SpectralShape,
}

impl DopplerSpec {
    /// Requires `0 < f_D < 1/2`, so that the minimum pilot rate `2 f_D` is
    /// below one.
    pub fn new(f_d: f64, shape: SpectralShape) -> Result<Self> {
        check_doppler(f_d)?;
        Ok(DopplerSpec { f_d, shape })
    }

    pub fn f_d(&self) -> f64 {
        self.f_d
    }

    pub fn shape(&self) -> &SpectralShape {
        &self.shape
    }

    /// Same shape at a different Doppler.
    pub fn with_doppler(&self, f_d: f64) -> Result<Self> {
        Self::new(f_d, self.shape.clone())
    }

    /// Smallest unaliased pilot overhead, `2 f_D`.
    pub fn alpha_min(&self) -> f64 {
        2.0 * self.f_d
    }
}

pub(crate) fn check_doppler(f_d: f64) -> Result<()> {
    if f_d > 0.0 && f_d < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(
            "f_D",
            f_d,
            "normalized Doppler must lie in (0, 1/2)",
        ))
    }
}

pub fn eval_shape(shape: &SpectralShape, xi: f64) -> f64 {
    shape.eval(xi)
}

pub fn inverse_shape_integral(shape: &SpectralShape) -> Result<f64> {
    shape.inverse_integral()
}

/// Doppler spectrum `S(ν) = S̃(ν / f_D) / f_D`.
pub fn scaled_spectrum(spec: &DopplerSpec, nu: f64) -> f64 {
    spec.shape.eval(nu / spec.f_d) / spec.f_d
}
