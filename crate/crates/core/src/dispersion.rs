//! Dispersion relation of the effective theory.
//!
//! Varying the effective Lagrangian in temporal gauge gives, for a plane wave
//! `E ∝ exp(i(kz − ωt))`,
//!
//! ```text
//! F(ω, k) = n²ω² − k² − (2d₁/M²) ω²k² + (2d₂/M⁴) ω²k⁴ = 0
//! ```
//!
//! The `d₂` term follows from `(d₂/M⁴)(∇²E)²`: its Euler–Lagrange contribution
//! is `(2d₂/M⁴) ∂ₜ∇⁴A`, which enters with the same sign as `n²` in the
//! constitutive symbol `n² − 2d₁k²/M² + 2d₂k⁴/M⁴` (see `wave_sim`).
//!
//! For fixed `k` the relation is linear in `ω²` and solved in closed form; for
//! fixed `ω` the wave number is found by a bracketed Newton iteration.

use serde::Serialize;

use crate::error::{Error, Flagged, Result, Warning};
use crate::medium::Medium;
use crate::units::HC_EV_M;

const ROOT_REL_TOL: f64 = 1e-14;
const ROOT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    /// Angular frequency in eV.
    pub omega: f64,
    /// Wave number in eV.
    pub k: f64,
    pub phase_index: f64,
    pub group_index: f64,
}

/// Cauchy law `n(λ) = A + B/λ² + C/λ⁴` with `B` in m² and `C` in m⁴.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyCoefficients {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B_m2")]
    pub b: f64,
    #[serde(rename = "C_m4")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexOrder {
    Exact,
    FirstOrder,
}

/// Constitutive symbol `n² − 2d₁k²/M² + 2d₂k⁴/M⁴`.
pub fn constitutive_symbol(k: f64, medium: &Medium) -> f64 {
    let x2 = (k / medium.m_scale).powi(2);
    medium.n * medium.n - 2.0 * medium.d1 * x2 + 2.0 * medium.d2 * x2 * x2
}

fn raw_residual(omega: f64, k: f64, m: &Medium) -> f64 {
    let w2 = omega * omega;
    let k2 = k * k;
    let mm2 = m.m_scale * m.m_scale;
    m.n * m.n * w2 - k2 - 2.0 * m.d1 * w2 * k2 / mm2 + 2.0 * m.d2 * w2 * k2 * k2 / (mm2 * mm2)
}

/// `F(ω, k)` normalised by `n²ω² + k²`; zero on shell.
pub fn dispersion_residual(omega: f64, k: f64, medium: &Medium) -> f64 {
    let scale = medium.n * medium.n * omega * omega + k * k;
    if scale == 0.0 {
        return 0.0;
    }
    raw_residual(omega, k, medium) / scale
}

/// Group index `dk/dω` by implicit differentiation of `F`.
fn group_index(omega: f64, k: f64, m: &Medium) -> Result<f64> {
    if k == 0.0 {
        return Ok(constitutive_symbol(0.0, m).sqrt());
    }
    let mm2 = m.m_scale * m.m_scale;
    let w2 = omega * omega;
    let denom = 1.0 + 2.0 * m.d1 * w2 / mm2 - 4.0 * m.d2 * w2 * k * k / (mm2 * mm2);
    if denom <= 0.0 {
        return Err(Error::Validity(format!(
            "group velocity diverges at k = {k} eV; keep k well below M = {} eV",
            m.m_scale
        )));
    }
    Ok(omega * constitutive_symbol(k, m) / (k * denom))
}

/// Frequency of a mode with wave number `k ≥ 0`.
pub fn solve_omega(k: f64, medium: &Medium) -> Result<DispersionPoint> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("wave number must be >= 0, got {k}")));
    }
    let symbol = constitutive_symbol(k, medium);
    if symbol <= 0.0 {
        return Err(Error::Validity(format!(
            "dispersion denominator {symbol} <= 0 at k = {k} eV; the effective theory needs k << M = {} eV",
            medium.m_scale
        )));
    }
    let root = symbol.sqrt();
    let omega = k / root;
    let phase_index = if k == 0.0 { root } else { k / omega };
    Ok(DispersionPoint {
        omega,
        k,
        phase_index,
        group_index: group_index(omega, k, medium)?,
    })
}

/// Wave number of a mode with frequency `ω ≥ 0`, by safeguarded Newton
/// iteration on `F(ω, ·)` seeded at `k = nω`.
pub fn solve_k(omega: f64, medium: &Medium) -> Result<DispersionPoint> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be >= 0, got {omega}")));
    }
    if omega == 0.0 {
        return solve_omega(0.0, medium);
    }
    let f = |k: f64| raw_residual(omega, k, medium);
    let df = |k: f64| {
        let mm2 = medium.m_scale * medium.m_scale;
        let w2 = omega * omega;
        -2.0 * k - 4.0 * medium.d1 * w2 * k / mm2 + 8.0 * medium.d2 * w2 * k.powi(3) / (mm2 * mm2)
    };
    let no_root = || {
        Error::Validity(format!(
            "no propagating mode at omega = {omega} eV; the effective theory needs omega << M = {} eV",
            medium.m_scale
        ))
    };

    let (mut lo, mut hi) = bracket(omega, medium, &f).ok_or_else(no_root)?;
    let mut k = (medium.n * omega).clamp(lo, hi);
    let mut trace = Vec::new();
    for _ in 0..ROOT_MAX_ITER {
        let fk = f(k);
        trace.push(fk);
        if fk == 0.0 {
            return finish(omega, k, medium);
        }
        if fk > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let slope = df(k);
        let newton = k - fk / slope;
        let next = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - k).abs();
        k = next;
        if step <= ROOT_REL_TOL * k || hi - lo <= ROOT_REL_TOL * hi {
            return finish(omega, k, medium);
        }
    }
    Err(Error::numerical(
        format!("wave-number iteration did not converge at omega = {omega} eV"),
        trace,
    ))
}

/// Finds `[lo, hi]` with `F(lo) > 0 ≥ F(hi)` around the physical branch.
fn bracket(omega: f64, m: &Medium, f: &impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    let y = (omega / m.m_scale).powi(2);
    if m.d2 > 0.0 {
        // F is a concave-up quadratic in k²; the physical root lies below its vertex.
        let vertex = (1.0 + 2.0 * m.d1 * y) / (4.0 * m.d2 * y / (m.m_scale * m.m_scale));
        if vertex <= 0.0 {
            return None;
        }
        let hi = vertex.sqrt();
        return (f(hi) <= 0.0).then_some((0.0, hi));
    }
    let mut lo = 0.0;
    let mut f_lo = f(0.0);
    let mut hi = m.n * omega;
    for _ in 0..200 {
        let f_hi = f(hi);
        if f_hi <= 0.0 {
            return Some((lo, hi));
        }
        if f_hi >= f_lo {
            return None;
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
    }
    None
}

fn finish(omega: f64, k: f64, m: &Medium) -> Result<DispersionPoint> {
    Ok(DispersionPoint {
        omega,
        k,
        phase_index: k / omega,
        group_index: group_index(omega, k, m)?,
    })
}

/// Phase index `n(ω) = k/ω`, either exact or to first order in `(ω/M)²`,
/// where it reduces to `n(1 − d₁ω²/M²)`.
pub fn phase_index(omega: f64, medium: &Medium, order: IndexOrder) -> Result<Flagged<f64>> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be >= 0, got {omega}")));
    }
    let value = match order {
        IndexOrder::FirstOrder => {
            medium.n * (1.0 - medium.d1 * (omega / medium.m_scale).powi(2))
        }
        IndexOrder::Exact => solve_k(omega, medium)?.phase_index,
    };
    let mut out = Flagged::clean(value);
    if omega > medium.validity_limit() {
        out.warnings.push(Warning::BeyondValidity {
            omega_ev: omega,
            limit_ev: medium.validity_limit(),
        });
    }
    Ok(out)
}

/// Cauchy coefficients implied by the couplings. `B` comes from the `(ω/M)²`
/// term and `C` from the full `(ω/M)⁴` term of the exact index,
/// `n(ω) = n[1 − d₁y + (3d₁²/2 + n²d₂)y² + …]` with `y = ω²/M²`.
pub fn cauchy_from_eft(medium: &Medium) -> CauchyCoefficients {
    let n = medium.n;
    let hc2 = (HC_EV_M / medium.m_scale).powi(2);
    CauchyCoefficients {
        a: n,
        b: -n * medium.d1 * hc2,
        c: n * (1.5 * medium.d1 * medium.d1 + n * n * medium.d2) * hc2 * hc2,
    }
}

/// Inverts `A` and `B` into `(n, d₁)` at a given scale `M`.
pub fn eft_from_cauchy(a: f64, b: f64, m_scale: f64) -> Result<(f64, f64)> {
    if !(a >= 1.0) {
        return Err(Error::Validation("n < 1".into()));
    }
    if !(m_scale > 0.0) {
        return Err(Error::Validation("M <= 0".into()));
    }
    let d1 = -b * (m_scale / HC_EV_M).powi(2) / a;
    Ok((a, d1))
}

/// Inverts a full `(A, B, C)` triple into `(n, d₁, d₂)`.
pub fn eft_from_cauchy_with_c(coeffs: CauchyCoefficients, m_scale: f64) -> Result<(f64, f64, f64)> {
    let (n, d1) = eft_from_cauchy(coeffs.a, coeffs.b, m_scale)?;
    let s4 = (m_scale / HC_EV_M).powi(4);
    let d2 = (coeffs.c * s4 / n - 1.5 * d1 * d1) / (n * n);
    Ok((n, d1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::wavelength_to_photon_energy;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn glass(d1: f64) -> Medium {
        Medium::dielectric(1.5, 6.667, d1, 0.0, 0.0).unwrap()
    }

    /// Plain bisection on the unnormalised relation, independent of the solver.
    fn bisect_k(omega: f64, m: &Medium, mut lo: f64, mut hi: f64) -> f64 {
        let f = |k: f64| raw_residual(omega, k, m);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn lowest_order_shell_is_on_shell() {
        let m = Medium::dielectric(1.7, 8.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(dispersion_residual(2.0 / 1.7, 2.0, &m), 0.0);
        assert!(dispersion_residual(1.0, 0.0, &m) != 0.0);
        assert_eq!(dispersion_residual(0.0, 0.0, &m), 0.0);
    }

    #[test]
    fn glass_root_matches_rearrangement_and_bisection() {
        let m = glass(-0.5);
        let k = 3.72;
        let p = solve_omega(k, &m).unwrap();
        let closed = (k * k / (2.25 + 2.0 * 0.5 * k * k / (6.667f64 * 6.667))).sqrt();
        assert_relative_eq!(p.omega, closed, max_relative = 1e-14);
        assert!(dispersion_residual(p.omega, k, &m).abs() <= 1e-12);
        let k_bisect = bisect_k(p.omega, &m, 0.0, 10.0);
        assert_relative_eq!(k_bisect, k, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_mode() {
        let p = solve_omega(1.0, &Medium::vacuum()).unwrap();
        assert_eq!(p.omega, 1.0);
        assert_eq!(p.phase_index, 1.0);
        assert_eq!(p.group_index, 1.0);
    }

    #[test]
    fn long_wavelength_limit() {
        let m = Medium::dielectric(1.4, 7.0, -0.8, 0.3, 0.0).unwrap();
        let p = solve_omega(1e-6, &m).unwrap();
        assert_relative_eq!(p.phase_index, 1.4, max_relative = 1e-12);
        assert_relative_eq!(p.group_index, 1.4, max_relative = 1e-12);
        let z = solve_omega(0.0, &m).unwrap();
        assert_eq!(z.omega, 0.0);
        assert_eq!(z.phase_index, 1.4);
    }

    #[test]
    fn first_order_error_is_fourth_order() {
        let m = glass(-0.5);
        let mut k = 3.72;
        let mut errs = Vec::new();
        for _ in 0..4 {
            let p = solve_omega(k, &m).unwrap();
            let first = m.n * (1.0 - m.d1 * (p.omega / m.m_scale).powi(2));
            errs.push((p.phase_index - first).abs());
            k /= 2.0;
        }
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 4.0).abs() < 0.25, "slope {slope}");
        }
    }

    #[test]
    fn first_order_glass_example() {
        let m = glass(-0.5);
        let omega = wavelength_to_photon_energy(500e-9).unwrap();
        let v = phase_index(omega, &m, IndexOrder::FirstOrder).unwrap();
        assert_relative_eq!(v.value, 1.5 * (1.0 + 0.5 * (omega / 6.667).powi(2)), max_relative = 1e-15);
        assert!((v.value - 1.6037).abs() < 1e-4);
        assert!(v.warnings.is_empty());
        assert_eq!(phase_index(0.0, &m, IndexOrder::Exact).unwrap().value, 1.5);
    }

    #[test]
    fn exact_index_matches_closed_form_root() {
        // with d₂ the relation is a quadratic in k²; take the branch through k = nω
        let m = Medium::dielectric(1.6, 9.0, -0.4, 0.2, 0.0).unwrap();
        let omega = 2.0;
        let y = (omega / m.m_scale).powi(2);
        let qa = 2.0 * m.d2 * y / (m.m_scale * m.m_scale);
        let qb = 1.0 + 2.0 * m.d1 * y;
        let qc = m.n * m.n * omega * omega;
        let u = 2.0 * qc / (qb + (qb * qb - 4.0 * qa * qc).sqrt());
        let exact = phase_index(omega, &m, IndexOrder::Exact).unwrap().value;
        assert_relative_eq!(exact, u.sqrt() / omega, max_relative = 1e-13);
    }

    #[test]
    fn beyond_half_scale_warns() {
        let m = glass(-0.5);
        let v = phase_index(4.0, &m, IndexOrder::Exact).unwrap();
        assert!(matches!(v.warnings[0], Warning::BeyondValidity { .. }));
    }

    #[test]
    fn breakdown_is_a_validity_error() {
        let m = Medium::dielectric(1.2, 1.0, 2.0, 0.0, 0.0).unwrap();
        assert!(matches!(solve_omega(5.0, &m), Err(Error::Validity(_))));
        // strongly normal dispersion: k(ω) runs off to infinity before ω = 5 eV
        let steep = Medium::dielectric(1.2, 1.0, -2.0, 0.0, 0.0).unwrap();
        assert!(matches!(solve_k(5.0, &steep), Err(Error::Validity(_))));
        let bumpy = Medium::dielectric(1.2, 1.0, 0.0, 5.0, 0.0).unwrap();
        assert!(matches!(solve_k(3.0, &bumpy), Err(Error::Validity(_))));
        assert!(matches!(solve_omega(-1.0, &m), Err(Error::Domain(_))));
    }

    #[test]
    fn normal_dispersion_for_negative_d1() {
        let m = glass(-0.3);
        let mut last = 0.0;
        for i in 0..50 {
            let w = 0.06 * i as f64;
            let v = phase_index(w, &m, IndexOrder::FirstOrder).unwrap().value;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy_from_eft(&glass(0.0)).b, 0.0);
        let c = cauchy_from_eft(&glass(-0.0964));
        let oracle = 1.5 * 0.0964 * (1239.84e-9f64).powi(2) / 6.667f64.powi(2);
        assert_relative_eq!(c.b, oracle, max_relative = 1e-5);
        assert_relative_eq!(c.b, 5.0e-15, max_relative = 2e-3);
        let (n, d1) = eft_from_cauchy(1.5, 5e-15, 10.0 / 1.5).unwrap();
        assert_eq!(n, 1.5);
        assert!((d1 + 0.096).abs() < 1e-3);
        assert!((0.05..=1.0).contains(&-d1));
        assert!(eft_from_cauchy(0.5, 1e-15, 5.0).is_err());
    }

    /// Least-squares fit of `Σ c_j x^j` to samples; test-only oracle.
    fn polyfit(x: &[f64], y: &[f64], terms: usize) -> Vec<f64> {
        let a = nalgebra::DMatrix::from_fn(x.len(), terms, |i, j| x[i].powi(j as i32));
        let b = nalgebra::DVector::from_column_slice(y);
        let sol = a.svd(true, true).solve(&b, 1e-300).unwrap();
        sol.iter().copied().collect()
    }

    fn sample_index(m: &Medium) -> (Vec<f64>, Vec<f64>) {
        // λ from 400 nm to 2 µm; abscissa 1/λ² scaled to µm⁻²
        let lams: Vec<f64> = (0..=80).map(|i| 400e-9 + i as f64 * 20e-9).collect();
        let x = lams.iter().map(|l| 1e-12 / (l * l)).collect();
        let y = lams
            .iter()
            .map(|&l| {
                let w = wavelength_to_photon_energy(l).unwrap();
                phase_index(w, m, IndexOrder::Exact).unwrap().value
            })
            .collect();
        (x, y)
    }

    #[test]
    fn cauchy_fit_recovers_b_and_c() {
        // |d₁|(ω/M)² = 0.02 at 400 nm
        let m = glass(-0.0964);
        let w400 = wavelength_to_photon_energy(400e-9).unwrap();
        assert!((m.d1.abs() * (w400 / m.m_scale).powi(2) - 0.02).abs() < 1e-3);
        let (x, y) = sample_index(&m);
        let fit = polyfit(&x, &y, 3);
        let c = cauchy_from_eft(&m);
        assert_relative_eq!(fit[0], c.a, max_relative = 1e-4);
        assert_relative_eq!(fit[1] * 1e-12, c.b, max_relative = 5e-3);
        assert_relative_eq!(fit[2] * 1e-24, c.c, max_relative = 0.1);
    }

    #[test]
    fn two_term_cauchy_fit_needs_weaker_dispersion() {
        // the neglected (ω/M)⁴ term biases a two-term fit by ~1.5|d₁|(ω/M)²
        let m = glass(-0.012);
        let (x, y) = sample_index(&m);
        let fit = polyfit(&x, &y, 2);
        assert_relative_eq!(fit[1] * 1e-12, cauchy_from_eft(&m).b, max_relative = 5e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn solved_modes_are_on_shell(n in 1.0f64..3.0, m_scale in 1.0f64..20.0, d1 in -2.0f64..0.5,
                                     d2 in -0.5f64..0.5, kx in 0.0f64..0.4) {
            let m = Medium::dielectric(n, m_scale, d1, d2, 0.0).unwrap();
            let p = solve_omega(kx * m_scale, &m).unwrap();
            prop_assert!(dispersion_residual(p.omega, p.k, &m).abs() <= 1e-12);
            let back = solve_k(p.omega, &m).unwrap();
            prop_assert!((back.k - p.k).abs() <= 1e-12 * p.k.max(1e-300));
        }

        #[test]
        fn cauchy_round_trip(n in 1.0f64..3.0, m_scale in 1.0f64..20.0, d1 in -2.0f64..2.0, d2 in -1.0f64..1.0) {
            let m = Medium::dielectric(n, m_scale, d1, d2, 0.0).unwrap();
            let c = cauchy_from_eft(&m);
            let (n_back, d1_back) = eft_from_cauchy(c.a, c.b, m_scale).unwrap();
            prop_assert_eq!(n_back, n);
            prop_assert!((d1_back - d1).abs() <= 1e-12 * d1.abs().max(1e-3));
            let (_, _, d2_back) = eft_from_cauchy_with_c(c, m_scale).unwrap();
            prop_assert!((d2_back - d2).abs() <= 1e-11);
        }

        #[test]
        fn first_order_is_close_below_quarter_scale(n in 1.0f64..2.0, d1 in -1.0f64..1.0, d2 in -1.0f64..1.0,
                                                    wx in 0.0f64..0.25) {
            let m = Medium::dielectric(n, 8.0, d1, d2, 0.0).unwrap();
            let w = wx * 8.0;
            let exact = phase_index(w, &m, IndexOrder::Exact).unwrap().value;
            let first = phase_index(w, &m, IndexOrder::FirstOrder).unwrap().value;
            prop_assert!(((exact - first) / exact).abs() <= 10.0 * wx.powi(4) + 2.0 * ROOT_REL_TOL);
        }
    }
}
