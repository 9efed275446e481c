//! Physical constants and conversions between SI and Heaviside–Lorentz
//! natural units (ħ = c = ε₀ = μ₀ = 1, energies in eV).
//!
//! In natural units a field has dimension eV², an energy density or an
//! intensity eV⁴, and a length eV⁻¹. All conversion factors below derive from
//! the single table in [`CODATA`]; nothing downstream hard-codes a numeric
//! conversion.
//!
//! | quantity             | SI unit | natural unit | factor                    |
//! |----------------------|---------|--------------|---------------------------|
//! | energy density       | J/m³    | eV⁴          | e / (ħc)³                 |
//! | electric field       | V/m     | eV²          | √(ε₀ / (e/(ħc)³))         |
//! | intensity            | W/m²    | eV⁴          | 1 / (c · e/(ħc)³)         |
//! | length               | m       | eV⁻¹         | 1 / ħc                    |
//! | temperature          | K       | eV           | k_B / e                   |

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The fixed constant table (CODATA 2018).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// ħc in eV·nm.
    pub hbar_c: f64,
    /// One electron volt in joules.
    pub electron_volt: f64,
    /// ε₀ in F/m.
    pub vacuum_permittivity: f64,
    /// c in m/s.
    pub speed_of_light: f64,
    /// k_B in J/K.
    pub boltzmann: f64,
}

const PLANCK_J_S: f64 = 6.626_070_15e-34;
const ELECTRON_VOLT_J: f64 = 1.602_176_634e-19;
const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

pub const CODATA: Constants = Constants {
    hbar_c: PLANCK_J_S * SPEED_OF_LIGHT_M_S / (2.0 * PI * ELECTRON_VOLT_J) * 1e9,
    electron_volt: ELECTRON_VOLT_J,
    vacuum_permittivity: 8.854_187_812_8e-12,
    speed_of_light: SPEED_OF_LIGHT_M_S,
    boltzmann: 1.380_649e-23,
};

/// ħc in eV·m.
pub const HBAR_C_EV_M: f64 = CODATA.hbar_c * 1e-9;

/// ħc in J·m.
pub const HBAR_C_J_M: f64 = HBAR_C_EV_M * CODATA.electron_volt;

/// 2πħc in eV·m, the photon energy–wavelength product.
pub const HC_EV_M: f64 = 2.0 * PI * HBAR_C_EV_M;

/// J/m³ per eV⁴ (≈ 20.85).
pub const EV4_IN_J_PER_M3: f64 = CODATA.electron_volt / (HBAR_C_EV_M * HBAR_C_EV_M * HBAR_C_EV_M);

/// eV⁴ per (V/m)²: the natural-unit value of E² for a 1 V/m field.
pub const FIELD_SQUARED_SI_TO_NATURAL: f64 = CODATA.vacuum_permittivity / EV4_IN_J_PER_M3;

/// eV⁴ per W/m².
pub const INTENSITY_SI_TO_NATURAL: f64 = 1.0 / (CODATA.speed_of_light * EV4_IN_J_PER_M3);

/// k_B in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = CODATA.boltzmann / CODATA.electron_volt;

/// Photon energy ħω = 2πħc/λ in eV for a wavelength in metres.
pub fn wavelength_to_photon_energy(lambda_m: f64) -> Result<f64> {
    if !(lambda_m > 0.0) || !lambda_m.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength must be positive and finite, got {lambda_m}"
        )));
    }
    Ok(HC_EV_M / lambda_m)
}

/// Inverse of [`wavelength_to_photon_energy`].
pub fn photon_energy_to_wavelength(energy_ev: f64) -> Result<f64> {
    if !(energy_ev > 0.0) || !energy_ev.is_finite() {
        return Err(Error::Domain(format!(
            "photon energy must be positive and finite, got {energy_ev}"
        )));
    }
    Ok(HC_EV_M / energy_ev)
}

/// Electric field in V/m to natural units (eV²). The sign is preserved and
/// `E_nat² = ε₀ E²` holds as an energy density in eV⁴.
pub fn efield_si_to_natural(e_v_per_m: f64) -> f64 {
    e_v_per_m * FIELD_SQUARED_SI_TO_NATURAL.sqrt()
}

pub fn efield_natural_to_si(e_nat: f64) -> f64 {
    e_nat / FIELD_SQUARED_SI_TO_NATURAL.sqrt()
}

/// Intensity in W/m² to natural units (eV⁴), via the energy density I/c.
pub fn intensity_si_to_natural(i_w_per_m2: f64) -> Result<f64> {
    if !(i_w_per_m2 >= 0.0) {
        return Err(Error::Domain(format!(
            "intensity must be non-negative, got {i_w_per_m2}"
        )));
    }
    Ok(i_w_per_m2 * INTENSITY_SI_TO_NATURAL)
}

pub fn intensity_natural_to_si(i_nat: f64) -> Result<f64> {
    if !(i_nat >= 0.0) {
        return Err(Error::Domain(format!(
            "intensity must be non-negative, got {i_nat}"
        )));
    }
    Ok(i_nat / INTENSITY_SI_TO_NATURAL)
}

pub fn energy_density_natural_to_si(u_ev4: f64) -> f64 {
    u_ev4 * EV4_IN_J_PER_M3
}

pub fn energy_density_si_to_natural(u_j_per_m3: f64) -> f64 {
    u_j_per_m3 / EV4_IN_J_PER_M3
}

/// Length in metres to eV⁻¹.
pub fn length_si_to_natural(l_m: f64) -> f64 {
    l_m / HBAR_C_EV_M
}

pub fn length_natural_to_si(l_per_ev: f64) -> f64 {
    l_per_ev * HBAR_C_EV_M
}

/// Temperature in kelvin to the thermal energy k_B T in eV.
pub fn temperature_to_energy(t_kelvin: f64) -> f64 {
    t_kelvin * BOLTZMANN_EV_PER_K
}

pub fn energy_to_temperature(kt_ev: f64) -> f64 {
    kt_ev / BOLTZMANN_EV_PER_K
}
