//! The dielectric medium: index, permittivity, permeability, the cutoff scale
//! `M` and the three effective couplings, plus the free-field observables and
//! photon kinematics under the material Lorentz group (invariant speed `1/n`).

use serde::Serialize;

use crate::error::{Error, Result, Warning};

pub type Vec3 = [f64; 3];

/// A homogeneous, isotropic dielectric in its rest frame.
///
/// `epsilon` is always derived as `n² / mu`, so `n² = ε μ` cannot be violated.
/// The couplings multiply the operators `E·∇²E / M²`, `(∇²E)² / M⁴` and
/// `(E·E)² / M⁴` of the effective Lagrangian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Medium {
    pub name: String,
    pub n: f64,
    pub epsilon: f64,
    pub mu: f64,
    /// Cutoff energy scale in eV.
    #[serde(rename = "M_eV")]
    pub m_scale: f64,
    pub d1: f64,
    pub d2: f64,
    pub a: f64,
}

impl Medium {
    /// Validating constructor (`make_medium`).
    pub fn new(
        name: impl Into<String>,
        n: f64,
        mu: f64,
        m_scale: f64,
        d1: f64,
        d2: f64,
        a: f64,
    ) -> Result<Self> {
        for (label, v) in [
            ("n", n),
            ("mu", mu),
            ("M", m_scale),
            ("d1", d1),
            ("d2", d2),
            ("a", a),
        ] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{label} is not finite")));
            }
        }
        if n < 1.0 {
            return Err(Error::Validation("n < 1".into()));
        }
        if mu <= 0.0 {
            return Err(Error::Validation("mu <= 0".into()));
        }
        if m_scale <= 0.0 {
            return Err(Error::Validation("M <= 0".into()));
        }
        Ok(Medium {
            name: name.into(),
            n,
            epsilon: n * n / mu,
            mu,
            m_scale,
            d1,
            d2,
            a,
        })
    }

    /// A non-magnetic dielectric (μ = 1, ε = n²).
    pub fn dielectric(n: f64, m_scale: f64, d1: f64, d2: f64, a: f64) -> Result<Self> {
        Medium::new("", n, 1.0, m_scale, d1, d2, a)
    }

    pub fn vacuum() -> Self {
        Medium::new("vacuum", 1.0, 1.0, 10.0, 0.0, 0.0, 0.0).expect("vacuum is valid")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Range checks that flag suspicious but admissible parameters.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        if !(1.0..=100.0).contains(&self.m_scale) {
            out.push(Warning::EnergyScaleOutOfRange {
                m_ev: self.m_scale,
            });
        }
        if self.d1.abs() > 10.0 {
            out.push(Warning::LargeCoupling {
                name: "d1",
                value: self.d1,
            });
        }
        if self.a.abs() > 1.0 {
            out.push(Warning::LargeCoupling {
                name: "a",
                value: self.a,
            });
        }
        out
    }

    /// Frequency above which results carry a validity warning.
    pub fn validity_limit(&self) -> f64 {
        0.5 * self.m_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldObservables {
    pub energy_density: f64,
    pub poynting: Vec3,
    pub momentum_density: Vec3,
}

/// Energy density `(n²E² + B²)/2μ`, Poynting vector `E×H` and momentum density
/// `D×B = n² E×H` for fields given in natural units.
pub fn field_observables(e: Vec3, b: Vec3, medium: &Medium) -> FieldObservables {
    let n2 = medium.n * medium.n;
    let energy_density = (n2 * dot(e, e) + dot(b, b)) / (2.0 * medium.mu);
    let h = b.map(|c| c / medium.mu);
    let poynting = cross(e, h);
    FieldObservables {
        energy_density,
        poynting,
        momentum_density: poynting.map(|c| n2 * c),
    }
}

/// A four-vector `(n·E, p)` of the material Lorentz group, metric (+,−,−,−).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialFourVector {
    pub time_component: f64,
    pub spatial: Vec3,
}

impl MaterialFourVector {
    pub fn norm_squared(&self) -> f64 {
        self.time_component * self.time_component - dot(self.spatial, self.spatial)
    }
}

/// Four-momentum of a free photon with wave vector `k` (eV): energy `|k|/n`,
/// momentum `k`. Its norm vanishes identically.
pub fn photon_four_momentum(k: Vec3, medium: &Medium) -> MaterialFourVector {
    let omega = norm(k) / medium.n;
    MaterialFourVector {
        time_component: medium.n * omega,
        spatial: k,
    }
}

pub(crate) fn dot(u: Vec3, v: Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

pub(crate) fn cross(u: Vec3, v: Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn norm(u: Vec3) -> f64 {
    u[0].hypot(u[1]).hypot(u[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vacuum_medium() {
        let m = Medium::new("vac", 1.0, 1.0, 10.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(m.epsilon, 1.0);
        assert!(m.warnings().is_empty());
    }

    #[test]
    fn epsilon_is_n_squared_for_dielectric() {
        let m = Medium::dielectric(1.5, 6.667, -0.1, 0.0, 1e-7).unwrap();
        assert_eq!(m.epsilon, 2.25);
        assert_eq!(m.mu, 1.0);
    }

    #[test]
    fn permeability_enters_epsilon() {
        let m = Medium::new("m", 2.0, 2.0, 10.0, 0.0, 0.0, 0.0).unwrap();
        assert!((m.n * m.n - m.epsilon * m.mu).abs() <= 1e-12 * m.n * m.n);
        assert_eq!(m.epsilon, 2.0);
    }

    #[test]
    fn invalid_media_rejected() {
        let err = Medium::dielectric(0.9, 10.0, 0.0, 0.0, 0.0).unwrap_err();
        assert_eq!(err.to_string(), "validation: n < 1");
        assert!(Medium::new("x", 1.5, 0.0, 10.0, 0.0, 0.0, 0.0).is_err());
        assert!(Medium::new("x", 1.5, 1.0, -1.0, 0.0, 0.0, 0.0).is_err());
        assert!(Medium::new("x", 1.5, 1.0, 10.0, f64::NAN, 0.0, 0.0).is_err());
        assert!(Medium::new("x", f64::INFINITY, 1.0, 10.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn out_of_range_parameters_warn() {
        let m = Medium::dielectric(1.5, 200.0, -20.0, 0.0, 2.0).unwrap();
        let w = m.warnings();
        assert_eq!(w.len(), 3);
        assert!(matches!(w[0], Warning::EnergyScaleOutOfRange { .. }));
    }

    #[test]
    fn observables_by_substitution() {
        let m = Medium::dielectric(2.0, 10.0, 0.0, 0.0, 0.0).unwrap();
        let obs = field_observables([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], &m);
        assert_eq!(obs.energy_density, 2.5);
        assert_eq!(obs.poynting, [0.0, 0.0, 1.0]);
        assert_eq!(obs.momentum_density, [0.0, 0.0, 4.0]);

        let zero = field_observables([0.0; 3], [0.0; 3], &m);
        assert_eq!(zero.energy_density, 0.0);
        assert_eq!(zero.poynting, [0.0; 3]);
        assert_eq!(zero.momentum_density, [0.0; 3]);
    }

    #[test]
    fn photon_examples() {
        let m = Medium::dielectric(1.5, 10.0, 0.0, 0.0, 0.0).unwrap();
        let p = photon_four_momentum([1.0, 0.0, 0.0], &m);
        assert!((p.time_component - 1.0).abs() < 1e-15);
        assert!(p.norm_squared().abs() < 1e-15);
        let z = photon_four_momentum([0.0; 3], &m);
        assert_eq!(z.time_component, 0.0);
        assert_eq!(z.norm_squared(), 0.0);
    }

    fn vec3(scale: f64) -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-scale..scale)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn momentum_is_n_squared_poynting(e in vec3(1e3), b in vec3(1e3), n in 1.0f64..4.0, mu in 0.2f64..3.0) {
            let m = Medium::new("r", n, mu, 10.0, 0.0, 0.0, 0.0).unwrap();
            let obs = field_observables(e, b, &m);
            for i in 0..3 {
                let g = obs.momentum_density[i];
                let target = n * n * obs.poynting[i];
                prop_assert!((g - target).abs() <= 1e-12 * target.abs().max(f64::MIN_POSITIVE));
            }
            prop_assert!(obs.energy_density >= 0.0);
        }

        #[test]
        fn vacuum_momentum_equals_poynting(e in vec3(10.0), b in vec3(10.0)) {
            let obs = field_observables(e, b, &Medium::vacuum());
            prop_assert_eq!(obs.momentum_density, obs.poynting);
        }

        #[test]
        fn energy_vanishes_only_for_zero_fields(e in vec3(1.0), b in vec3(1.0)) {
            let obs = field_observables(e, b, &Medium::vacuum());
            let zero = e == [0.0; 3] && b == [0.0; 3];
            prop_assert_eq!(obs.energy_density == 0.0, zero);
        }

        #[test]
        fn photon_is_null(k in vec3(1e6), n in 1.0f64..10.0) {
            let m = Medium::dielectric(n, 10.0, 0.0, 0.0, 0.0).unwrap();
            let p = photon_four_momentum(k, &m);
            let k2 = dot(k, k);
            prop_assert!(p.norm_squared().abs() <= 1e-12 * k2);
        }
    }
}
