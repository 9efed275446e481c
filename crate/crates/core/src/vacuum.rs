//! Zero-point and thermal energies of the free field in a dielectric.
//!
//! With `ω_k = |k|/n` every mode energy is the vacuum one divided by `n`, so
//! the Casimir force between ideal plates drops by `n`. The density of states
//! per unit frequency grows by `n³`, and so does the black-body energy
//! density.
//!
//! # Casimir mode sum
//!
//! The plates impose `k_z = mπ/L`. Counting both polarisations (one for the
//! TM `m = 0` mode) and regulating with `exp(−δω)`, the transverse integral is
//! elementary:
//!
//! ```text
//! E(δ)/A = ħc/(nπδ³) · [ Σ'_{m≥0} g(m s) − (1/s)∫₀^∞ g ],   s = πδ/L
//! g(x)   = e^{−x}(1 + x + x²/2),                             ∫₀^∞ g = 3
//! ```
//!
//! where `Σ'` halves the `m = 0` term. The bracket is a tiny difference of two
//! numbers of size `3/s` (at `δ = L/320` the ratio is about 4·10⁻¹²), so the
//! sum is accumulated with compensation and the continuum is subtracted as a
//! two-term quotient. The force uses `−∂E/∂L` at fixed `δ`, which replaces `g`
//! by `x³e^{−x}/2`. Both ladders are extrapolated to `δ → 0` by a polynomial
//! fit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dispersion::solve_k;
use crate::error::{Error, Result, Warning};
use crate::medium::Medium;
use crate::numerics::{div_two_term, integrate, polyfit, CompensatedSum};
use crate::units::{energy_density_natural_to_si, temperature_to_energy, HBAR_C_EV_M, HBAR_C_J_M};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CasimirMethod {
    Closed,
    Numeric,
}

/// Exponential-cutoff ladder `δ_i = cutoff_start · L / 2^i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regulator {
    /// First cutoff in units of the gap.
    pub cutoff_start: f64,
    pub cutoff_steps: usize,
    pub poly_degree: usize,
}

impl Default for Regulator {
    fn default() -> Self {
        Regulator {
            cutoff_start: 0.1,
            cutoff_steps: 6,
            poly_degree: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegulatorInfo {
    pub regulator: Regulator,
    /// δ/L for each rung.
    pub cutoffs: Vec<f64>,
    /// Regulated energy × L³ n/ħc per rung (dimensionless).
    pub energy_rungs: Vec<f64>,
    /// Successive δ → 0 extrapolations of the dimensionless energy.
    pub energy_extrapolations: Vec<f64>,
    pub force_extrapolations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasimirResult {
    pub gap_m: f64,
    pub n: f64,
    pub energy_per_area: f64,
    pub force_per_area: f64,
    pub method: CasimirMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regulator_info: Option<RegulatorInfo>,
    /// `|F| · ħc/(LM)`, the size of a possible surface-term correction.
    pub surface_scale_estimate: f64,
}

fn check_gap(gap_m: f64) -> Result<()> {
    if !(gap_m > 0.0) || !gap_m.is_finite() {
        return Err(Error::Domain(format!(
            "plate separation must be positive, got {gap_m}"
        )));
    }
    Ok(())
}

fn surface_scale(force: f64, gap_m: f64, medium: &Medium) -> f64 {
    force.abs() * HBAR_C_EV_M / (gap_m * medium.m_scale)
}

/// Closed form `F/A = −π²ħc/(240 n L⁴)`, `E/A = −π²ħc/(720 n L³)`.
pub fn casimir_closed(gap_m: f64, medium: &Medium) -> Result<CasimirResult> {
    check_gap(gap_m)?;
    let pi2 = PI * PI;
    let force = -pi2 * HBAR_C_J_M / (240.0 * medium.n * gap_m.powi(4));
    Ok(CasimirResult {
        gap_m,
        n: medium.n,
        energy_per_area: -pi2 * HBAR_C_J_M / (720.0 * medium.n * gap_m.powi(3)),
        force_per_area: force,
        method: CasimirMethod::Closed,
        regulator_info: None,
        surface_scale_estimate: surface_scale(force, gap_m, medium),
    })
}

/// Regulated, continuum-subtracted energy and `L`-derivative at cutoff
/// `δ = rel_cutoff · L`, in units of `ħc/(nL³)` and `ħc/(nL⁴)`.
fn regulated_mode_sum(rel_cutoff: f64) -> (f64, f64) {
    let s = PI * rel_cutoff;
    let (cont_hi, cont_lo) = div_two_term(3.0, s);
    let mut energy = CompensatedSum::new();
    let mut slope = CompensatedSum::new();
    energy.add(0.5);
    let m_max = (90.0 / s).ceil() as u64;
    for m in 1..=m_max {
        let x = m as f64 * s;
        let decay = (-x).exp();
        energy.add(decay * (1.0 + x * (1.0 + 0.5 * x)));
        slope.add(0.5 * decay * x * x * x);
    }
    for acc in [&mut energy, &mut slope] {
        acc.add(-cont_hi);
        acc.add(-cont_lo);
    }
    let norm = PI * rel_cutoff.powi(3);
    (energy.value() / norm, -slope.value() / norm)
}

/// Cutoff-extrapolated mode sum. Converged when the last two extrapolations
/// (fits over the first `j` and `j+1` rungs) agree to 1e-4 for both energy
/// and force.
pub fn casimir_numeric(gap_m: f64, medium: &Medium, regulator: Regulator) -> Result<CasimirResult> {
    check_gap(gap_m)?;
    if !(regulator.cutoff_start > 0.0) || regulator.cutoff_steps == 0 {
        return Err(Error::Domain(
            "regulator cutoff_start and cutoff_steps must be positive".into(),
        ));
    }
    let cutoffs: Vec<f64> = (0..regulator.cutoff_steps)
        .map(|i| regulator.cutoff_start / 2f64.powi(i as i32))
        .collect();
    let (energy_rungs, force_rungs): (Vec<f64>, Vec<f64>) =
        cutoffs.iter().map(|&d| regulated_mode_sum(d)).unzip();

    let mut energy_extrapolations = Vec::new();
    let mut force_extrapolations = Vec::new();
    for used in (regulator.poly_degree + 1)..=cutoffs.len() {
        energy_extrapolations.push(polyfit(&cutoffs[..used], &energy_rungs[..used], regulator.poly_degree)?[0]);
        force_extrapolations.push(polyfit(&cutoffs[..used], &force_rungs[..used], regulator.poly_degree)?[0]);
    }

    let settled = |seq: &[f64]| match seq {
        [.., prev, last] => (last - prev).abs() <= 1e-4 * last.abs(),
        _ => false,
    };
    if !settled(&energy_extrapolations) || !settled(&force_extrapolations) {
        let mut trace = energy_extrapolations.clone();
        trace.extend(&force_extrapolations);
        return Err(Error::numerical(
            format!(
                "cutoff extrapolation did not settle over {} rungs (degree {})",
                regulator.cutoff_steps, regulator.poly_degree
            ),
            trace,
        ));
    }

    let energy_hat = *energy_extrapolations.last().unwrap();
    let force_hat = *force_extrapolations.last().unwrap();
    let energy = HBAR_C_J_M * energy_hat / (medium.n * gap_m.powi(3));
    let force = HBAR_C_J_M * force_hat / (medium.n * gap_m.powi(4));
    Ok(CasimirResult {
        gap_m,
        n: medium.n,
        energy_per_area: energy,
        force_per_area: force,
        method: CasimirMethod::Numeric,
        regulator_info: Some(RegulatorInfo {
            regulator,
            cutoffs,
            energy_rungs,
            energy_extrapolations,
            force_extrapolations,
        }),
        surface_scale_estimate: surface_scale(force, gap_m, medium),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSample {
    #[serde(rename = "omega_eV")]
    pub omega_ev: f64,
    /// Spectral energy density in eV³.
    pub u_natural: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalResult {
    pub temperature_k: f64,
    /// Energy density in J/m³.
    pub total_energy_density: f64,
    /// `n³ π²(k_BT)⁴/15` in J/m³.
    pub closed_form_density: f64,
    pub dispersive: bool,
    /// Dispersive over non-dispersive energy density (1 when off).
    pub correction_factor: f64,
    /// `1 − 5d₁·(20ζ(6)/ζ(4))·(k_BT/M)²`.
    pub analytic_correction_factor: f64,
    /// `(k_BT/M)²`.
    pub correction_scale: f64,
    /// Fraction of the energy carried by modes above the `M/2` cap.
    pub truncation_fraction: f64,
    pub quadrature_error: f64,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
    pub spectrum: Vec<SpectrumSample>,
}

const QUAD_REL_TOL: f64 = 1e-10;
const X_MAX: f64 = 64.0;
const SPECTRUM_POINTS: usize = 200;

fn planck(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x * x / x.exp_m1()
    }
}

/// `n³ π²(k_BT)⁴/15` in J/m³.
pub fn stefan_boltzmann_density(t_kelvin: f64, n: f64) -> f64 {
    let kt = temperature_to_energy(t_kelvin);
    energy_density_natural_to_si(n.powi(3) * PI * PI * kt.powi(4) / 15.0)
}

/// Mode density factor `n(ω)² n_g(ω)` with the integrand frozen beyond `M/2`.
struct ModeDensity<'a> {
    medium: &'a Medium,
    cap: f64,
    capped_value: f64,
}

impl<'a> ModeDensity<'a> {
    fn new(medium: &'a Medium) -> Result<Self> {
        let cap = medium.validity_limit();
        let p = solve_k(cap, medium)?;
        Ok(ModeDensity {
            medium,
            cap,
            capped_value: p.phase_index * p.phase_index * p.group_index,
        })
    }

    fn at(&self, omega: f64) -> f64 {
        if omega >= self.cap {
            return self.capped_value;
        }
        // bracketed solve cannot fail below the cap once it succeeded at the cap
        match solve_k(omega, self.medium) {
            Ok(p) => p.phase_index * p.phase_index * p.group_index,
            Err(_) => f64::NAN,
        }
    }
}

/// Black-body energy density in the medium at temperature `t_kelvin`.
///
/// Without dispersion the mode density is `n³`; with it, `n(ω)² n_g(ω)` from
/// the exact dispersion relation. The integral runs over `x = ω/k_BT` up to
/// 64, beyond which the Planck weight is below 10⁻²².
pub fn blackbody_density(t_kelvin: f64, medium: &Medium, dispersive: bool) -> Result<ThermalResult> {
    if !(t_kelvin > 0.0) || !t_kelvin.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {t_kelvin}"
        )));
    }
    let kt = temperature_to_energy(t_kelvin);
    let n3 = medium.n.powi(3);
    let prefactor = kt.powi(4) / (PI * PI);
    let closed = stefan_boltzmann_density(t_kelvin, medium.n);
    let ratio_scale = (kt / medium.m_scale).powi(2);
    let analytic = 1.0 - 5.0 * medium.d1 * (40.0 * PI * PI / 21.0) * ratio_scale;

    let mut warnings = Vec::new();
    let (total_nat, correction, truncation, qerr, density): (f64, f64, f64, f64, Box<dyn Fn(f64) -> f64 + '_>) =
        if !dispersive {
            let r = integrate(|x| n3 * planck(x), 0.0, X_MAX, QUAD_REL_TOL, 0.0, 2000)?;
            (prefactor * r.value, 1.0, 0.0, prefactor * r.error, Box::new(move |_| n3))
        } else {
            let modes = ModeDensity::new(medium)?;
            let x_cap = (modes.cap / kt).min(X_MAX);
            let excess = |x: f64| (modes.at(x * kt) - n3) * planck(x);
            let below = integrate(excess, 0.0, x_cap, QUAD_REL_TOL, 0.0, 2000)?;
            let above = if x_cap < X_MAX {
                integrate(excess, x_cap, X_MAX, QUAD_REL_TOL, 0.0, 2000)?
            } else {
                crate::numerics::QuadResult { value: 0.0, error: 0.0, intervals: 0 }
            };
            let base = integrate(|x| n3 * planck(x), 0.0, X_MAX, QUAD_REL_TOL, 0.0, 2000)?;
            let total = base.value + below.value + above.value;
            if !total.is_finite() {
                return Err(Error::numerical("dispersive mode density is not finite", vec![total]));
            }
            let tail = if x_cap < X_MAX {
                integrate(|x| modes.capped_value * planck(x), x_cap, X_MAX, QUAD_REL_TOL, 0.0, 2000)?.value
                    / total
            } else {
                0.0
            };
            if tail > 1e-12 {
                warnings.push(Warning::SpectrumTruncated { fraction: tail });
            }
            let err = base.error + below.error + above.error;
            let correction = 1.0 + (below.value + above.value) / base.value;
            (prefactor * total, correction, tail, prefactor * err, Box::new(move |w| modes.at(w)))
        };

    let spectrum = (0..SPECTRUM_POINTS)
        .map(|i| {
            let omega = 20.0 * kt * i as f64 / (SPECTRUM_POINTS - 1) as f64;
            SpectrumSample {
                omega_ev: omega,
                u_natural: density(omega) * kt.powi(3) * planck(omega / kt) / (PI * PI),
            }
        })
        .collect();

    Ok(ThermalResult {
        temperature_k: t_kelvin,
        total_energy_density: energy_density_natural_to_si(total_nat),
        closed_form_density: closed,
        dispersive,
        correction_factor: correction,
        analytic_correction_factor: analytic,
        correction_scale: ratio_scale,
        truncation_fraction: truncation,
        quadrature_error: energy_density_natural_to_si(qerr),
        warnings,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn medium(n: f64) -> Medium {
        Medium::dielectric(n, 10.0, 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let vac = casimir_closed(1e-6, &medium(1.0)).unwrap();
        let oracle = -PI * PI * 3.161_526_8e-26 / (240.0 * 1e-24);
        assert_relative_eq!(vac.force_per_area, oracle, max_relative = 1e-7);
        assert_relative_eq!(vac.force_per_area, -1.300e-3, max_relative = 5e-3);
        let glass = casimir_closed(1e-6, &medium(1.5)).unwrap();
        assert_relative_eq!(glass.force_per_area, vac.force_per_area / 1.5, max_relative = 1e-15);
        assert_relative_eq!(glass.force_per_area, -8.67e-4, max_relative = 1e-3);
        let half = casimir_closed(0.5e-6, &medium(1.0)).unwrap();
        assert_relative_eq!(half.force_per_area, 16.0 * vac.force_per_area, max_relative = 1e-15);
        assert!(matches!(casimir_closed(0.0, &medium(1.0)), Err(Error::Domain(_))));
        assert!(vac.energy_per_area < 0.0);
    }

    #[test]
    fn surface_estimate_is_one_over_lm() {
        let r = casimir_closed(10e-9, &medium(1.5)).unwrap();
        let lm = 10e-9 * 10.0 / HBAR_C_EV_M;
        assert_relative_eq!(r.surface_scale_estimate, r.force_per_area.abs() / lm, max_relative = 1e-12);
    }

    #[test]
    fn regulated_sum_approaches_finite_part() {
        let (e, f) = regulated_mode_sum(0.1 / 32.0);
        assert_relative_eq!(e, -PI * PI / 720.0, max_relative = 1e-4);
        assert_relative_eq!(f, -PI * PI / 240.0, max_relative = 1e-4);
    }

    #[test]
    fn numeric_matches_closed_form() {
        for n in [1.0, 2.0] {
            let m = medium(n);
            let num = casimir_numeric(1e-6, &m, Regulator::default()).unwrap();
            let closed = casimir_closed(1e-6, &m).unwrap();
            assert_relative_eq!(num.energy_per_area, closed.energy_per_area, max_relative = 1e-3);
            assert_relative_eq!(num.force_per_area, closed.force_per_area, max_relative = 1e-3);
        }
    }

    #[test]
    fn short_ladder_does_not_converge() {
        let reg = Regulator {
            cutoff_steps: 4,
            ..Regulator::default()
        };
        assert!(matches!(casimir_numeric(1e-6, &medium(1.0), reg), Err(Error::Numerical { .. })));
    }

    #[test]
    fn blackbody_room_temperature() {
        let vac = blackbody_density(300.0, &medium(1.0), false).unwrap();
        assert_relative_eq!(vac.total_energy_density, 7.5657e-16 * 300f64.powi(4), max_relative = 1e-4);
        assert_relative_eq!(vac.total_energy_density, 6.13e-6, max_relative = 1e-3);
        let glass = blackbody_density(300.0, &medium(1.5), false).unwrap();
        assert_relative_eq!(glass.total_energy_density, 3.375 * vac.total_energy_density, max_relative = 1e-9);
        assert_relative_eq!(glass.total_energy_density, 2.07e-5, max_relative = 1e-3);
        assert_eq!(glass.correction_factor, 1.0);
        assert_eq!(glass.spectrum.len(), SPECTRUM_POINTS);
        assert!(blackbody_density(0.0, &medium(1.0), false).is_err());
    }

    #[test]
    fn dispersive_correction_matches_expansion() {
        let kt = 0.005 * 10.0;
        let t = crate::units::energy_to_temperature(kt);
        let m = Medium::dielectric(1.5, 10.0, -0.1, 0.0, 0.0).unwrap();
        let r = blackbody_density(t, &m, true).unwrap();
        assert_relative_eq!(r.analytic_correction_factor - 1.0, 2.35e-4, max_relative = 1e-2);
        assert_relative_eq!(r.correction_factor - 1.0, r.analytic_correction_factor - 1.0, max_relative = 1e-2);
        assert_eq!(r.truncation_fraction, 0.0);
    }

    #[test]
    fn hot_dispersive_spectrum_is_capped() {
        let m = Medium::dielectric(1.5, 1.0, -0.1, 0.0, 0.0).unwrap();
        let t = crate::units::energy_to_temperature(0.2);
        let r = blackbody_density(t, &m, true).unwrap();
        assert!(r.truncation_fraction > 0.0);
        assert!(matches!(r.warnings[0], Warning::SpectrumTruncated { .. }));
    }
}
