use anyhow::{ensure, Result};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Normalized Doppler `f_D = f_m T` with `f_m = v f_c / c` and
/// `T = 1 / symbol_rate`.
pub fn doppler_from_physical(velocity: f64, carrier_freq: f64, symbol_rate: f64) -> Result<f64> {
    for (name, v) in [
        ("velocity", velocity),
        ("carrier frequency", carrier_freq),
        ("symbol rate", symbol_rate),
    ] {
        ensure!(
            v > 0.0 && v.is_finite(),
            "{name} must be finite and > 0, got {v}"
        );
    }
    let f_d = velocity * carrier_freq / SPEED_OF_LIGHT / symbol_rate;
    ensure!(f_d < 0.5, "normalized Doppler {f_d} is not below 1/2");
    Ok(f_d)
}
