//! Closed-form inversion of optical data into the couplings at fixed `n` and
//! `M`, and the forward predictions used to check it.
//!
//! The Cauchy `B` fixes `d₁`; a Kerr constant `K` or a nonlinear index `n₂`
//! fixes `a`; an optional Cauchy `C` fixes `d₂`. Only the ratios `d₁/M²` and
//! `a/M⁴` are observable, so `M` is an input.

use serde::Serialize;

use crate::dispersion::{cauchy_from_eft, eft_from_cauchy, eft_from_cauchy_with_c, CauchyCoefficients};
use crate::error::{Error, Flagged, Result, Warning};
use crate::kerr::{kerr_constant, n2_coefficient};
use crate::medium::Medium;
use crate::units::{CODATA, FIELD_SQUARED_SI_TO_NATURAL, INTENSITY_SI_TO_NATURAL};

/// Measured optical data for one material, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurements {
    pub material: String,
    pub n: f64,
    #[serde(rename = "M_eV")]
    pub m_scale: f64,
    #[serde(rename = "B_m2")]
    pub b_m2: f64,
    #[serde(rename = "C_m4", skip_serializing_if = "Option::is_none")]
    pub c_m4: Option<f64>,
    #[serde(rename = "K_m_per_V2")]
    pub k_m_per_v2: Option<f64>,
    pub n2_m2_per_w: Option<f64>,
    pub lambda_ref_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predicted {
    #[serde(rename = "B_m2")]
    pub b_m2: f64,
    #[serde(rename = "C_m4")]
    pub c_m4: f64,
    #[serde(rename = "K_m_per_V2")]
    pub k_m_per_v2: f64,
    pub n2_m2_per_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings {
    pub d1: f64,
    pub d2: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRecord {
    pub measured: Measurements,
    pub d1_fit: f64,
    pub d2_fit: f64,
    pub a_fit: f64,
    pub predicted: Predicted,
    /// `|λK − 2n²n₂|/λK` when both Kerr observables were supplied.
    pub consistency: Option<f64>,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

impl CalibrationRecord {
    pub fn medium(&self) -> Result<Medium> {
        let m = &self.measured;
        Medium::new(m.material.clone(), m.n, 1.0, m.m_scale, self.d1_fit, self.d2_fit, self.a_fit)
    }
}

fn lambda_k_natural(k_si: f64, lambda_m: f64) -> f64 {
    k_si * lambda_m / FIELD_SQUARED_SI_TO_NATURAL
}

fn n2_natural(n2_si: f64) -> f64 {
    n2_si / INTENSITY_SI_TO_NATURAL
}

fn check_inputs(m: &Measurements) -> Result<()> {
    for (label, v) in [("n", m.n), ("M", m.m_scale), ("B", m.b_m2), ("lambda_ref", m.lambda_ref_m)] {
        if !v.is_finite() {
            return Err(Error::Validation(format!("{label} is not finite")));
        }
    }
    if m.n < 1.0 {
        return Err(Error::Validation("n < 1".into()));
    }
    if m.m_scale <= 0.0 {
        return Err(Error::Validation("M <= 0".into()));
    }
    if m.lambda_ref_m <= 0.0 {
        return Err(Error::Domain("reference wavelength must be positive".into()));
    }
    Ok(())
}

/// `(d₁, d₂, a)` from the measurements. `d₂` is zero unless `C` is given.
pub fn fit_couplings(m: &Measurements) -> Result<Flagged<Couplings>> {
    check_inputs(m)?;
    let (d1, d2) = match m.c_m4 {
        Some(c) => {
            let (_, d1, d2) = eft_from_cauchy_with_c(CauchyCoefficients { a: m.n, b: m.b_m2, c }, m.m_scale)?;
            (d1, d2)
        }
        None => (eft_from_cauchy(m.n, m.b_m2, m.m_scale)?.1, 0.0),
    };
    let m4 = m.m_scale.powi(4);
    let from_k = m.k_m_per_v2.map(|k| 0.5 * lambda_k_natural(k, m.lambda_ref_m) * m.n * m4);
    let from_n2 = m.n2_m2_per_w.map(|n2| n2_natural(n2) * m.n.powi(3) * m4);
    let a = match (from_k, from_n2) {
        (Some(x), Some(y)) => 0.5 * (x + y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => {
            return Err(Error::InsufficientData(format!(
                "{}: need a Kerr constant or a nonlinear index to fix a",
                m.material
            )))
        }
    };
    let mut warnings = Vec::new();
    if m.b_m2 < 0.0 {
        warnings.push(Warning::AnomalousDispersion { cauchy_b_m2: m.b_m2 });
    }
    Ok(Flagged {
        value: Couplings { d1, d2, a },
        warnings,
    })
}

/// Forward map from couplings to `B`, `C`, `K` (at `lambda_ref_m`) and `n₂`.
pub fn predict_observables(n: f64, m_scale: f64, couplings: Couplings, lambda_ref_m: f64) -> Result<Predicted> {
    let medium = Medium::dielectric(n, m_scale, couplings.d1, couplings.d2, couplings.a)?;
    let cauchy = cauchy_from_eft(&medium);
    Ok(Predicted {
        b_m2: cauchy.b,
        c_m4: cauchy.c,
        k_m_per_v2: kerr_constant(&medium, lambda_ref_m)?.k_si,
        n2_m2_per_w: n2_coefficient(&medium).si,
    })
}

pub fn calibrate(m: &Measurements) -> Result<CalibrationRecord> {
    let fit = fit_couplings(m)?;
    let c = fit.value;
    let predicted = predict_observables(m.n, m.m_scale, c, m.lambda_ref_m)?;
    let consistency = match (m.k_m_per_v2, m.n2_m2_per_w) {
        (Some(k), Some(n2)) => {
            let lk = lambda_k_natural(k, m.lambda_ref_m);
            Some(crate::kerr::consistency_residual(lk, n2_natural(n2), m.n))
        }
        _ => None,
    };
    Ok(CalibrationRecord {
        measured: m.clone(),
        d1_fit: c.d1,
        d2_fit: c.d2,
        a_fit: c.a,
        predicted,
        consistency,
        warnings: fit.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub name: String,
    /// `λK/(2n²n₂)`; 1 means the measured Kerr data obey the identity.
    pub ratio: f64,
}

/// `λK/(2n²n₂)` from natural-unit values.
pub fn consistency_ratio_natural(k_m_per_v2: f64, n2_m2_per_w: f64, lambda_m: f64, n: f64) -> f64 {
    lambda_k_natural(k_m_per_v2, lambda_m) / (2.0 * n * n * n2_natural(n2_m2_per_w))
}

/// The same ratio evaluated directly in SI, `Kλ/(2n²n₂ε₀c)`.
pub fn consistency_ratio_si(k_m_per_v2: f64, n2_m2_per_w: f64, lambda_m: f64, n: f64) -> f64 {
    k_m_per_v2 * lambda_m / (2.0 * n * n * n2_m2_per_w * CODATA.vacuum_permittivity * CODATA.speed_of_light)
}

/// One row per record that carries both `K` and `n₂`.
pub fn consistency_report(records: &[Measurements]) -> Vec<ConsistencyRow> {
    records
        .iter()
        .filter_map(|m| match (m.k_m_per_v2, m.n2_m2_per_w) {
            (Some(k), Some(n2)) => Some(ConsistencyRow {
                name: m.material.clone(),
                ratio: consistency_ratio_natural(k, n2, m.lambda_ref_m, m.n),
            }),
            _ => None,
        })
        .collect()
}

/// Calibration table `name,d1,a,consistency`.
pub fn write_calibration_csv(records: &[CalibrationRecord], mut out: impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "name,d1,a,consistency")?;
    for r in records {
        let consistency = r.consistency.map(|c| c.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", r.measured.material, r.d1_fit, r.a_fit, consistency)?;
    }
    Ok(())
}
