//! Parameters of the nine published figures, one table entry per figure.

use anyhow::{bail, Result};
use pilot_overhead::spectra::SpectralShape;

use crate::sweep::{run_sweep, Axis, AxisKind, Fixed, Method, Quantity, Row, Scale, SweepRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    ClarkeJakes,
    Rectangular,
}

#[derive(Debug, Clone, Copy)]
pub struct Figure {
    pub number: u8,
    pub title: &'static str,
    pub quantity: Quantity,
    pub shape: Shape,
    pub axis: Axis,
    /// One curve per `(SNR dB, f_D)` pair; the swept coordinate is ignored.
    pub series: &'static [(f64, f64)],
    pub methods: &'static [Method],
}

const BOTH: &[Method] = &[Method::Numeric, Method::Expansion];
const WITH_CSI: &[Method] = &[Method::Numeric, Method::Expansion, Method::PerfectCsi];
const DOPPLER_AXIS: Axis = Axis {
    lo: 1e-4,
    hi: 0.05,
    points: 40,
    scale: Scale::Log,
};
const SNR_AXIS: Axis = Axis {
    lo: 0.0,
    hi: 20.0,
    points: 41,
    scale: Scale::Db,
};

pub const FIGURES: [Figure; 9] = [
    Figure {
        number: 1,
        title: "spectral efficiency vs pilot overhead",
        quantity: Quantity::SeVsAlpha,
        shape: Shape::ClarkeJakes,
        axis: Axis {
            lo: 0.04,
            hi: 1.0,
            points: 200,
            scale: Scale::Log,
        },
        series: &[(10.0, 0.02)],
        methods: &[Method::Numeric],
    },
    Figure {
        number: 2,
        title: "optimum pilot overhead vs Doppler",
        quantity: Quantity::AlphaStarVsDoppler,
        shape: Shape::ClarkeJakes,
        axis: DOPPLER_AXIS,
        series: &[(0.0, 0.0), (10.0, 0.0)],
        methods: BOTH,
    },
    Figure {
        number: 3,
        title: "optimum pilot overhead vs SNR",
        quantity: Quantity::AlphaStarVsSnr,
        shape: Shape::ClarkeJakes,
        axis: SNR_AXIS,
        series: &[(0.0, 0.001), (0.0, 0.02)],
        methods: BOTH,
    },
    Figure {
        number: 4,
        title: "optimized spectral efficiency vs Doppler",
        quantity: Quantity::SeStarVsDoppler,
        shape: Shape::ClarkeJakes,
        axis: DOPPLER_AXIS,
        series: &[(10.0, 0.0)],
        methods: BOTH,
    },
    Figure {
        number: 5,
        title: "optimized spectral efficiency vs SNR",
        quantity: Quantity::SeStarVsSnr,
        shape: Shape::ClarkeJakes,
        axis: SNR_AXIS,
        series: &[(0.0, 0.001), (0.0, 0.02)],
        methods: WITH_CSI,
    },
    Figure {
        number: 6,
        title: "optimum pilot power boost vs SNR",
        quantity: Quantity::RhoPVsSnr,
        shape: Shape::ClarkeJakes,
        axis: SNR_AXIS,
        series: &[(0.0, 0.001), (0.0, 0.02)],
        methods: BOTH,
    },
    Figure {
        number: 7,
        title: "boosted spectral efficiency vs Doppler",
        quantity: Quantity::SeBoostVsDoppler,
        shape: Shape::ClarkeJakes,
        axis: DOPPLER_AXIS,
        series: &[(10.0, 0.0)],
        methods: BOTH,
    },
    Figure {
        number: 8,
        title: "boosted spectral efficiency vs SNR",
        quantity: Quantity::SeBoostVsSnr,
        shape: Shape::ClarkeJakes,
        axis: SNR_AXIS,
        series: &[(0.0, 0.001), (0.0, 0.02)],
        methods: WITH_CSI,
    },
    Figure {
        number: 9,
        title: "optimum pilot overhead vs number of antennas",
        quantity: Quantity::AlphaStarVsAntennas,
        shape: Shape::Rectangular,
        axis: Axis {
            lo: 1.0,
            hi: 8.0,
            points: 8,
            scale: Scale::Linear,
        },
        series: &[(10.0, 0.001), (10.0, 0.01)],
        methods: &[Method::Numeric, Method::Expansion, Method::SisoEquivalent],
    },
];

pub fn figure(number: u8) -> Result<&'static Figure> {
    match FIGURES.iter().find(|f| f.number == number) {
        Some(f) => Ok(f),
        None => bail!("figure: expected a number from 1 to 9, got {number}"),
    }
}

impl Figure {
    pub fn requests(&self) -> Vec<SweepRequest> {
        let kind = self.quantity.axis_kind();
        self.series
            .iter()
            .map(|&(snr_db, doppler)| {
                let label = match kind {
                    AxisKind::Doppler => format!("SNR={snr_db}dB"),
                    AxisKind::Snr | AxisKind::Antennas => format!("f_D={doppler}"),
                    AxisKind::Alpha => format!("SNR={snr_db}dB f_D={doppler}"),
                };
                SweepRequest {
                    quantity: self.quantity,
                    axis: self.axis,
                    shape: match self.shape {
                        Shape::ClarkeJakes => SpectralShape::ClarkeJakes,
                        Shape::Rectangular => SpectralShape::Rectangular,
                    },
                    fixed: Fixed {
                        snr_db,
                        // Placeholder for the swept coordinate; never read.
                        doppler: if kind == AxisKind::Doppler {
                            0.01
                        } else {
                            doppler
                        },
                        ..Fixed::default()
                    },
                    methods: self.methods.to_vec(),
                    series: label,
                }
            })
            .collect()
    }

    pub fn run(&self) -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for req in self.requests() {
            rows.extend(run_sweep(&req)?);
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_is_reachable() {
        for n in 1..=9 {
            let f = figure(n).unwrap();
            for req in f.requests() {
                req.validate().unwrap();
            }
        }
        assert!(figure(0).is_err() && figure(10).is_err());
    }

    #[test]
    fn caption_values() {
        let f1 = figure(1).unwrap();
        assert_eq!(f1.series, &[(10.0, 0.02)]);
        assert_eq!(f1.axis.lo, 0.04);
        assert_eq!(figure(9).unwrap().shape, Shape::Rectangular);
        for n in [3, 5, 6, 8] {
            let dopplers: Vec<f64> = figure(n).unwrap().series.iter().map(|s| s.1).collect();
            assert_eq!(dopplers, vec![0.001, 0.02]);
        }
    }
}
