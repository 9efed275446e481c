//! DC and AC Kerr effects from the quartic coupling `(a/M⁴)(E·E)²`.
//!
//! Replacing one factor of `E·E` by a background (a static field or the beam
//! intensity) leaves a linear equation for the probe with
//!
//! ```text
//! n(E) = n + 2aE²/(nM⁴)       λK = 2a/(nM⁴)
//! n(I) = n + n₂I              n₂ = a/(n³M⁴)
//! ```
//!
//! and hence `λK = 2n²n₂` independently of `a`. Intensities follow
//! `I = ε⟨E²⟩` with the cycle average `⟨E²⟩ = E₀²/2`.
//!
//! These are the substitution formulas. Expanding `(E·E)²` fully for a probe
//! polarised parallel to the background gives three times the shift; for a
//! perpendicular probe the substitution result is exact. The simulator in
//! `wave_sim` works at equation-of-motion level and sees the factor 3.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::units::{
    efield_si_to_natural, intensity_si_to_natural, FIELD_SQUARED_SI_TO_NATURAL,
    INTENSITY_SI_TO_NATURAL,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrConstant {
    /// λK in eV⁻⁴.
    pub lambda_k_natural: f64,
    /// K in m/V².
    pub k_si: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearIndex {
    /// n₂ in eV⁻⁴.
    pub natural: f64,
    /// n₂ in m²/W.
    pub si: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrReport {
    pub n_dc: f64,
    pub n_ac: f64,
    /// AC index with the parallel-polarisation degeneracy factor 3 applied.
    pub n_ac_parallel_eom: f64,
    pub lambda_k_natural: f64,
    #[serde(rename = "K_m_per_V2")]
    pub k_si: f64,
    pub n2_natural: f64,
    pub n2_m2_per_w: f64,
    pub consistency_residual: f64,
}

fn quartic_scale(m: &Medium) -> f64 {
    m.m_scale.powi(4)
}

/// DC Kerr index for a static field in natural units (eV²).
pub fn dc_kerr_index(e_ext: f64, medium: &Medium) -> f64 {
    medium.n + 2.0 * medium.a * e_ext * e_ext / (medium.n * quartic_scale(medium))
}

pub fn dc_kerr_index_si(e_v_per_m: f64, medium: &Medium) -> f64 {
    dc_kerr_index(efield_si_to_natural(e_v_per_m), medium)
}

/// `λK` in natural units and `K` in m/V² at wavelength `lambda_m`.
pub fn kerr_constant(medium: &Medium, lambda_m: f64) -> Result<KerrConstant> {
    if !(lambda_m > 0.0) || !lambda_m.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {lambda_m}"
        )));
    }
    let lambda_k_natural = 2.0 * medium.a / (medium.n * quartic_scale(medium));
    Ok(KerrConstant {
        lambda_k_natural,
        k_si: lambda_k_natural * FIELD_SQUARED_SI_TO_NATURAL / lambda_m,
    })
}

pub fn n2_coefficient(medium: &Medium) -> NonlinearIndex {
    let natural = medium.a / (medium.n.powi(3) * quartic_scale(medium));
    NonlinearIndex {
        natural,
        si: natural * INTENSITY_SI_TO_NATURAL,
    }
}

/// AC Kerr index for an intensity in natural units (eV⁴).
pub fn ac_kerr_index(intensity: f64, medium: &Medium) -> Result<f64> {
    if !(intensity >= 0.0) {
        return Err(Error::Domain(format!(
            "intensity must be non-negative, got {intensity}"
        )));
    }
    Ok(medium.n + n2_coefficient(medium).natural * intensity)
}

pub fn ac_kerr_index_si(i_w_per_m2: f64, medium: &Medium) -> Result<f64> {
    ac_kerr_index(intensity_si_to_natural(i_w_per_m2)?, medium)
}

/// `|λK − 2n²n₂| / λK`, defined as 0 when `a = 0`.
pub fn consistency_residual(lambda_k_natural: f64, n2_natural: f64, n: f64) -> f64 {
    if lambda_k_natural == 0.0 {
        return 0.0;
    }
    ((lambda_k_natural - 2.0 * n * n * n2_natural) / lambda_k_natural).abs()
}

/// Full Kerr summary for a static field `e_v_per_m` and beam intensity
/// `i_w_per_m2` at wavelength `lambda_m`.
pub fn kerr_report(
    medium: &Medium,
    lambda_m: f64,
    e_v_per_m: f64,
    i_w_per_m2: f64,
) -> Result<KerrReport> {
    let kc = kerr_constant(medium, lambda_m)?;
    let n2 = n2_coefficient(medium);
    let n_ac = ac_kerr_index_si(i_w_per_m2, medium)?;
    Ok(KerrReport {
        n_dc: dc_kerr_index_si(e_v_per_m, medium),
        n_ac,
        n_ac_parallel_eom: medium.n + 3.0 * (n_ac - medium.n),
        lambda_k_natural: kc.lambda_k_natural,
        k_si: kc.k_si,
        n2_natural: n2.natural,
        n2_m2_per_w: n2.si,
        consistency_residual: consistency_residual(kc.lambda_k_natural, n2.natural, medium.n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::EV4_IN_J_PER_M3;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn glass() -> Medium {
        Medium::dielectric(1.5, 6.667, -0.0964, 0.0, 1.744e-7).unwrap()
    }

    #[test]
    fn dc_index_trivial_cases() {
        let m = glass();
        assert_eq!(dc_kerr_index(0.0, &m), 1.5);
        let linear = Medium::dielectric(1.5, 6.667, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(dc_kerr_index(123.0, &linear), 1.5);
    }

    #[test]
    fn dc_index_for_strong_static_field() {
        // independent unit chain: ε₀E²[J/m³] / (J/m³ per eV⁴)
        let e_nat2 = 8.854_187_812_8e-12 * 1e18 / EV4_IN_J_PER_M3;
        assert_relative_eq!(e_nat2, 4.247e5, max_relative = 1e-3);
        let dn = dc_kerr_index_si(1e9, &glass()) - 1.5;
        assert_relative_eq!(dn, 2.0 * 1.744e-7 * e_nat2 / (1.5 * 6.667f64.powi(4)), max_relative = 1e-9);
        assert_relative_eq!(dn, 5.00e-5, max_relative = 5e-3);
    }

    #[test]
    fn kerr_constant_of_glass() {
        let kc = kerr_constant(&glass(), 500e-9).unwrap();
        assert_relative_eq!(kc.lambda_k_natural, 1.177e-10, max_relative = 1e-3);
        assert_relative_eq!(kc.k_si, 1.0e-16, max_relative = 5e-3);
        let zero = Medium::dielectric(1.5, 6.667, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(kerr_constant(&zero, 500e-9).unwrap().k_si, 0.0);
        assert!(matches!(kerr_constant(&glass(), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn kerr_constant_is_linear_in_a() {
        let m = glass();
        let mut doubled = m.clone();
        doubled.a *= 2.0;
        let k1 = kerr_constant(&m, 633e-9).unwrap().k_si;
        let k2 = kerr_constant(&doubled, 633e-9).unwrap().k_si;
        assert_eq!(k2, 2.0 * k1);
    }

    #[test]
    fn nonlinear_index_of_glass() {
        let n2 = n2_coefficient(&glass());
        assert_relative_eq!(n2.natural, 2.62e-11, max_relative = 2e-3);
        assert_relative_eq!(n2.si, 4.2e-21, max_relative = 1e-2);
        assert_eq!(ac_kerr_index(0.0, &glass()).unwrap(), 1.5);
        assert!(ac_kerr_index(-1.0, &glass()).is_err());
        let kc = kerr_constant(&glass(), 500e-9).unwrap();
        assert_relative_eq!(kc.lambda_k_natural / n2.natural, 2.0 * 1.5 * 1.5, max_relative = 1e-14);
    }

    #[test]
    fn report_for_vacuum_and_glass() {
        let vac = kerr_report(&Medium::vacuum(), 500e-9, 1e9, 1e16).unwrap();
        assert_eq!(vac.n_dc, 1.0);
        assert_eq!(vac.n_ac, 1.0);
        assert_eq!(vac.consistency_residual, 0.0);

        let r = kerr_report(&glass(), 500e-9, 1e9, 1e16).unwrap();
        assert!(r.consistency_residual <= 1e-14);
        assert_relative_eq!(r.n_dc - 1.5, 5.0e-5, max_relative = 5e-3);
        assert_relative_eq!(r.n_ac_parallel_eom - 1.5, 3.0 * (r.n_ac - 1.5), max_relative = 1e-9);
    }

    #[test]
    fn si_scalings() {
        let m = glass();
        let k1 = kerr_constant(&m, 400e-9).unwrap().k_si;
        let k2 = kerr_constant(&m, 800e-9).unwrap().k_si;
        assert_relative_eq!(k1, 2.0 * k2, max_relative = 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn kerr_identity_holds(n in 1.0f64..4.0, m_scale in 1.0f64..50.0, a in -1e-3f64..1e-3,
                               lambda in 1e-7f64..1e-5) {
            prop_assume!(a != 0.0);
            let m = Medium::dielectric(n, m_scale, 0.0, 0.0, a).unwrap();
            let lk = kerr_constant(&m, lambda).unwrap().lambda_k_natural;
            let n2 = n2_coefficient(&m).natural;
            prop_assert!(consistency_residual(lk, n2, n) <= 1e-14);
            let r = kerr_report(&m, lambda, 1e8, 1e12).unwrap();
            prop_assert!(r.consistency_residual <= 1e-14);
        }

        #[test]
        fn indices_monotone_for_positive_a(a in 1e-9f64..1e-3, x in 0.0f64..1e3, dx in 0.0f64..1e3) {
            let m = Medium::dielectric(1.5, 8.0, 0.0, 0.0, a).unwrap();
            prop_assert!(dc_kerr_index(x + dx, &m) >= dc_kerr_index(x, &m));
            prop_assert!(ac_kerr_index(x + dx, &m).unwrap() >= ac_kerr_index(x, &m).unwrap());
        }
    }
}
