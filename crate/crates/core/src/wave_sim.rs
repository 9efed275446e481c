//! One-dimensional pseudo-spectral solver for the full nonlinear field
//! equations, in units with `M = 1`.
//!
//! # Equations
//!
//! Take a single polarisation `E = E_x(z, t)`, `B = B_y(z, t)` in temporal
//! gauge (`E = −∂ₜA`, `B = ∂_z A`). The effective Lagrangian density is
//!
//! ```text
//! ℒ = ½n²E² + d₁ E∂²E + d₂(∂²E)² + aE⁴ − ½B²
//! ```
//!
//! and its Euler–Lagrange equation for `A` reads `∂ₜQ = −∂_z B` with the
//! auxiliary field
//!
//! ```text
//! Q = δℒ/δE = n²E + 2d₁∂²E + 2d₂∂⁴E + 4aE³ = L[E] + 4aE³.
//! ```
//!
//! Together with `∂ₜB = −∂_z E` this gives `∂ₜ²Q = ∂²E`. `L` is diagonal in
//! Fourier space with symbol `n² − 2d₁k² + 2d₂k⁴`; for `a = 0` the plane waves
//! obey the dispersion relation of [`crate::dispersion`]. The conserved energy
//! is `H = ∫ ½E·L[E] + 3aE⁴ + ½B² dz` and the momentum is `∫ QB dz`.
//!
//! # Scheme
//!
//! `Q` is advanced by the leapfrog `Q⁺ = 2Q − Q⁻ + dt²∂²E`, `B` lives on half
//! steps and `E` is recovered from `Q` by fixed-point iteration on
//! `E = L⁻¹(Q − 4aE³)`. Derivatives are spectral on a periodic grid. A linear
//! mode of frequency `ω` propagates at the leapfrog frequency
//! `(2/dt)·asin(ωdt/2)`, so the scheme is stable for `ω_max·dt < 2`; the
//! configuration guard `|dt| ≤ 0.5·n·Δz` keeps well inside that for every
//! symbol with `d₁ ≤ 0`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;

const INVERSION_TOL: f64 = 1e-12;
const INVERSION_MAX_ITER: usize = 50;
const DOMINANT_POWER_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialCondition {
    Plane {
        amplitude: f64,
        mode_index: usize,
    },
    /// `A·exp(−((z−c)/w)²)·cos(k_c(z−c))`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        carrier_mode: usize,
    },
}

/// How `B` is initialised from `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Launch {
    /// Every Fourier mode travels towards `+z`.
    #[default]
    Right,
    /// Equal left and right movers, i.e. `∂ₜE = 0` at `t = 0`.
    Standing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n: f64,
    pub d1: f64,
    pub d2: f64,
    pub a: f64,
    pub grid_points: usize,
    pub domain_length: f64,
    pub dt: f64,
    pub steps: usize,
    pub initial_condition: InitialCondition,
    pub output_every: usize,
    pub launch: Launch,
}

impl SimConfig {
    pub fn dz(&self) -> f64 {
        self.domain_length / self.grid_points as f64
    }

    pub fn wave_number(&self, mode: usize) -> f64 {
        2.0 * PI * mode as f64 / self.domain_length
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        for (label, v) in [
            ("n", self.n),
            ("d1", self.d1),
            ("d2", self.d2),
            ("a", self.a),
            ("domain_length", self.domain_length),
            ("dt", self.dt),
        ] {
            if !v.is_finite() {
                return bad(format!("{label} is not finite"));
            }
        }
        if self.n < 1.0 {
            return bad("n < 1".into());
        }
        if self.grid_points < 4 || !self.grid_points.is_power_of_two() {
            return bad(format!(
                "grid_points must be a power of two >= 4, got {}",
                self.grid_points
            ));
        }
        if self.domain_length <= 0.0 {
            return bad("domain_length <= 0".into());
        }
        if self.dt == 0.0 {
            return bad("dt must be non-zero".into());
        }
        let limit = 0.5 * self.n * self.dz();
        if self.dt.abs() > limit {
            return bad(format!("|dt| = {} exceeds 0.5*n*dz = {limit}", self.dt.abs()));
        }
        if self.output_every == 0 {
            return bad("output_every must be >= 1".into());
        }
        let half = self.grid_points / 2;
        match self.initial_condition {
            InitialCondition::Plane { amplitude, mode_index } => {
                if !amplitude.is_finite() {
                    return bad("amplitude is not finite".into());
                }
                if mode_index >= half {
                    return bad(format!("mode_index {mode_index} >= grid_points/2"));
                }
            }
            InitialCondition::Gaussian { amplitude, center, width, carrier_mode } => {
                if !amplitude.is_finite() || !center.is_finite() {
                    return bad("gaussian amplitude and center must be finite".into());
                }
                if !(width > 0.0) || !width.is_finite() {
                    return bad("gaussian width must be positive".into());
                }
                if carrier_mode >= half {
                    return bad(format!("carrier_mode {carrier_mode} >= grid_points/2"));
                }
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` format. Blank lines and `#` comments are
    /// ignored; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<SimConfig> {
        let mut values: Vec<(&str, &str, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected key = value, got '{line}'"),
                });
            };
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown key '{key}'"),
                });
            }
            if values.iter().any(|(k, _, _)| *k == key) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key '{key}'"),
                });
            }
            values.push((key, value.trim(), line_no));
        }
        let cfg = ConfigValues(values);
        for &(key, _, _) in &cfg.0 {
            match key {
                "initial_condition" | "launch" => {}
                "grid_points" | "steps" | "output_every" | "mode_index" | "carrier_mode" => {
                    cfg.count(key)?;
                }
                _ => {
                    cfg.float(key)?;
                }
            }
        }
        let domain_length = cfg.float("domain_length")?.ok_or_else(|| missing("domain_length"))?;
        let initial_condition = match cfg.raw("initial_condition").map(|(v, _)| v).unwrap_or("plane") {
            "plane" => InitialCondition::Plane {
                amplitude: cfg.float("amplitude")?.ok_or_else(|| missing("amplitude"))?,
                mode_index: cfg.count("mode_index")?.ok_or_else(|| missing("mode_index"))?,
            },
            "gaussian" => InitialCondition::Gaussian {
                amplitude: cfg.float("amplitude")?.ok_or_else(|| missing("amplitude"))?,
                center: cfg.float("center")?.unwrap_or(0.5 * domain_length),
                width: cfg.float("width")?.ok_or_else(|| missing("width"))?,
                carrier_mode: cfg.count("carrier_mode")?.unwrap_or(0),
            },
            other => {
                return Err(Error::Parse {
                    line: cfg.raw("initial_condition").map_or(0, |(_, l)| l),
                    message: format!("initial_condition must be plane or gaussian, got '{other}'"),
                })
            }
        };
        let launch = match cfg.raw("launch") {
            None | Some(("right", _)) => Launch::Right,
            Some(("standing", _)) => Launch::Standing,
            Some((other, line)) => {
                return Err(Error::Parse {
                    line,
                    message: format!("launch must be right or standing, got '{other}'"),
                })
            }
        };
        let config = SimConfig {
            n: cfg.float("n")?.unwrap_or(1.0),
            d1: cfg.float("d1")?.unwrap_or(0.0),
            d2: cfg.float("d2")?.unwrap_or(0.0),
            a: cfg.float("a")?.unwrap_or(0.0),
            grid_points: cfg.count("grid_points")?.ok_or_else(|| missing("grid_points"))?,
            domain_length,
            dt: cfg.float("dt")?.ok_or_else(|| missing("dt"))?,
            steps: cfg.count("steps")?.ok_or_else(|| missing("steps"))?,
            initial_condition,
            output_every: cfg.count("output_every")?.unwrap_or(1),
            launch,
        };
        config.validate()?;
        Ok(config)
    }
}

const CONFIG_KEYS: [&str; 16] = [
    "n",
    "d1",
    "d2",
    "a",
    "grid_points",
    "domain_length",
    "dt",
    "steps",
    "output_every",
    "initial_condition",
    "launch",
    "amplitude",
    "mode_index",
    "center",
    "width",
    "carrier_mode",
];

fn missing(key: &str) -> Error {
    Error::Validation(format!("missing config key {key}"))
}

struct ConfigValues<'a>(Vec<(&'a str, &'a str, usize)>);

impl<'a> ConfigValues<'a> {
    fn raw(&self, key: &str) -> Option<(&'a str, usize)> {
        self.0.iter().find(|(k, _, _)| *k == key).map(|&(_, v, l)| (v, l))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|(v, line)| {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("{key}: '{v}' is not a number"),
                })
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.raw(key)
            .map(|(v, line)| {
                v.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    message: format!("{key}: '{v}' is not a non-negative integer"),
                })
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub time: f64,
    pub energy: f64,
    pub momentum: f64,
    pub peak_amplitude: f64,
    /// Index of the strongest positive-frequency Fourier bin of `E`.
    #[serde(skip)]
    pub carrier_bin: usize,
    #[serde(skip)]
    pub carrier_k: f64,
    /// Complex amplitude of that bin.
    #[serde(skip)]
    pub carrier: Complex64,
    /// Share of the total spectral power in the `±carrier_bin` pair.
    #[serde(skip)]
    pub carrier_power_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub e: Vec<f64>,
    /// `B` at `time − dt/2`.
    pub b: Vec<f64>,
    pub q_current: Vec<f64>,
    /// `Q` at `time − dt`.
    pub q_previous: Vec<f64>,
    pub time: f64,
    pub samples: Vec<Sample>,
}

struct Spectral {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    symbol: Vec<f64>,
}

impl Spectral {
    fn new(config: &SimConfig) -> Result<Self> {
        let len = config.grid_points;
        let mut planner = FftPlanner::new();
        let k: Vec<f64> = (0..len)
            .map(|j| {
                let m = if j <= len / 2 { j as f64 } else { j as f64 - len as f64 };
                2.0 * PI * m / config.domain_length
            })
            .collect();
        let symbol: Vec<f64> = k
            .iter()
            .map(|&kk| {
                let k2 = kk * kk;
                config.n * config.n - 2.0 * config.d1 * k2 + 2.0 * config.d2 * k2 * k2
            })
            .collect();
        if let Some((j, s)) = symbol.iter().enumerate().find(|(_, s)| **s <= 0.0) {
            return Err(Error::Validity(format!(
                "constitutive symbol {s} <= 0 at k = {}; the grid resolves modes beyond the theory's range",
                k[j]
            )));
        }
        let omega_max = k
            .iter()
            .zip(&symbol)
            .map(|(kk, s)| kk.abs() / s.sqrt())
            .fold(0.0, f64::max);
        if omega_max * config.dt.abs() >= 2.0 {
            return Err(Error::Validation(format!(
                "dt = {} is unstable for the fastest resolved mode (omega = {omega_max})",
                config.dt
            )));
        }
        Ok(Spectral {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            k,
            symbol,
        })
    }

    fn to_spectrum(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn to_grid(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spec);
        let scale = 1.0 / self.len as f64;
        spec.iter().map(|c| c.re * scale).collect()
    }

    fn nyquist(&self, j: usize) -> bool {
        j == self.len / 2
    }

    fn d1z(&self, spec: &[Complex64]) -> Vec<f64> {
        let out = spec
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if self.nyquist(j) {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, self.k[j])
                }
            })
            .collect();
        self.to_grid(out)
    }

    fn d2z(&self, spec: &[Complex64]) -> Vec<f64> {
        let out = spec.iter().zip(&self.k).map(|(c, kk)| c * (-kk * kk)).collect();
        self.to_grid(out)
    }

    fn apply_symbol(&self, spec: &[Complex64]) -> Vec<f64> {
        let out = spec.iter().zip(&self.symbol).map(|(c, s)| c * s).collect();
        self.to_grid(out)
    }

    fn solve_symbol(&self, x: &[f64]) -> Vec<f64> {
        let mut spec = self.to_spectrum(x);
        for (c, s) in spec.iter_mut().zip(&self.symbol) {
            *c /= s;
        }
        self.to_grid(spec)
    }
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub struct Simulator {
    config: SimConfig,
    spectral: Spectral,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let spectral = Spectral::new(&config)?;
        Ok(Simulator { config, spectral })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.config.grid_points)
            .map(|j| j as f64 * self.config.dz())
            .collect()
    }

    fn initial_field(&self) -> Vec<f64> {
        let cfg = &self.config;
        let z = self.grid();
        match cfg.initial_condition {
            InitialCondition::Plane { amplitude, mode_index } => {
                let k = cfg.wave_number(mode_index);
                z.iter().map(|&x| amplitude * (k * x).cos()).collect()
            }
            InitialCondition::Gaussian { amplitude, center, width, carrier_mode } => {
                let k = cfg.wave_number(carrier_mode);
                z.iter()
                    .map(|&x| {
                        // nearest periodic image of the center
                        let mut d = x - center;
                        d -= cfg.domain_length * (d / cfg.domain_length).round();
                        amplitude * (-(d / width).powi(2)).exp() * (k * d).cos()
                    })
                    .collect()
            }
        }
    }

    /// Builds the state at `t = 0`: `E` from the initial condition, `B` at
    /// `−dt/2` from the exact leapfrog solution of the linearised equations,
    /// and `Q` one step back so that `∂ₜQ = −∂_z B` holds discretely.
    pub fn init_state(&self) -> Result<FieldState> {
        let cfg = &self.config;
        let sp = &self.spectral;
        let e = self.initial_field();
        let e_hat = sp.to_spectrum(&e);
        let b_hat: Vec<Complex64> = e_hat
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let kk = sp.k[j];
                if kk == 0.0 || sp.nyquist(j) {
                    return Complex64::new(0.0, 0.0);
                }
                let root = sp.symbol[j].sqrt();
                let omega = kk.abs() / root;
                let half_phase = (0.5 * omega * cfg.dt).asin();
                let sign = kk.signum();
                match cfg.launch {
                    Launch::Right => c * root * Complex64::from_polar(1.0, sign * half_phase),
                    Launch::Standing => c * root * Complex64::new(0.0, sign * half_phase.sin()),
                }
            })
            .collect();
        let b = sp.to_grid(b_hat);
        let q_current: Vec<f64> = sp
            .apply_symbol(&e_hat)
            .iter()
            .zip(&e)
            .map(|(l, x)| l + 4.0 * cfg.a * x * x * x)
            .collect();
        let db = sp.d1z(&sp.to_spectrum(&b));
        let q_previous = q_current
            .iter()
            .zip(&db)
            .map(|(q, d)| q + cfg.dt * d)
            .collect();
        let mut state = FieldState {
            e,
            b,
            q_current,
            q_previous,
            time: 0.0,
            samples: Vec::new(),
        };
        let s = self.sample(&state);
        state.samples.push(s);
        Ok(state)
    }

    /// Solves `Q = L[E] + 4aE³` for `E`, starting from `guess`. Returns the
    /// field and the residual after every iteration.
    pub fn invert_auxiliary(&self, q: &[f64], guess: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let a = self.config.a;
        if a == 0.0 {
            return Ok((self.spectral.solve_symbol(q), vec![0.0]));
        }
        let target = INVERSION_TOL * max_abs(q).max(f64::MIN_POSITIVE);
        let mut e = guess.to_vec();
        let mut trace = Vec::new();
        for _ in 0..INVERSION_MAX_ITER {
            let rhs: Vec<f64> = q.iter().zip(&e).map(|(q, x)| q - 4.0 * a * x * x * x).collect();
            let next = self.spectral.solve_symbol(&rhs);
            // Q − L[next] − 4a·next³ = 4a(e³ − next³) because L[next] = rhs exactly
            let residual = e
                .iter()
                .zip(&next)
                .fold(0.0f64, |m, (x, y)| m.max((4.0 * a * (x * x * x - y * y * y)).abs()));
            trace.push(residual);
            e = next;
            if residual <= target {
                return Ok((e, trace));
            }
            if trace.len() >= 4 && residual >= trace[trace.len() - 4] {
                break;
            }
        }
        Err(Error::numerical(
            format!("auxiliary inversion stalled after {} iterations", trace.len()),
            trace,
        ))
    }

    pub fn step(&self, state: &mut FieldState) -> Result<()> {
        let dt = self.config.dt;
        let sp = &self.spectral;
        let e_hat = sp.to_spectrum(&state.e);
        let lap = sp.d2z(&e_hat);
        let grad = sp.d1z(&e_hat);
        let q_next: Vec<f64> = state
            .q_current
            .iter()
            .zip(&state.q_previous)
            .zip(&lap)
            .map(|((q, qp), l)| 2.0 * q - qp + dt * dt * l)
            .collect();
        for (b, g) in state.b.iter_mut().zip(&grad) {
            *b -= dt * g;
        }
        let (e_next, _) = self.invert_auxiliary(&q_next, &state.e)?;
        state.q_previous = std::mem::replace(&mut state.q_current, q_next);
        state.e = e_next;
        state.time += dt;
        Ok(())
    }

    /// Re-centres the leapfrog on the other side of the current time level and
    /// flips the sign of `dt`, so further steps retrace the trajectory.
    pub fn reverse(&mut self, state: &mut FieldState) {
        let dt = self.config.dt;
        let sp = &self.spectral;
        let e_hat = sp.to_spectrum(&state.e);
        let lap = sp.d2z(&e_hat);
        let grad = sp.d1z(&e_hat);
        for ((qp, q), l) in state.q_previous.iter_mut().zip(&state.q_current).zip(&lap) {
            *qp = 2.0 * q - *qp + dt * dt * l;
        }
        for (b, g) in state.b.iter_mut().zip(&grad) {
            *b -= dt * g;
        }
        self.config.dt = -dt;
    }

    pub fn sample(&self, state: &FieldState) -> Sample {
        let cfg = &self.config;
        let sp = &self.spectral;
        let dz = cfg.dz();
        let e_hat = sp.to_spectrum(&state.e);
        let le = sp.apply_symbol(&e_hat);
        let grad = sp.d1z(&e_hat);
        let mut energy = CompensatedSum::new();
        let mut momentum = CompensatedSum::new();
        for j in 0..sp.len {
            let e = state.e[j];
            let b_mid = state.b[j] - 0.5 * cfg.dt * grad[j];
            energy.add(0.5 * e * le[j] + 3.0 * cfg.a * e.powi(4) + 0.5 * b_mid * b_mid);
            momentum.add(state.q_current[j] * b_mid);
        }
        let total_power: f64 = e_hat.iter().map(|c| c.norm_sqr()).sum();
        let (bin, power) = (1..sp.len / 2)
            .map(|j| (j, e_hat[j].norm_sqr()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        Sample {
            time: state.time,
            energy: energy.value() * dz,
            momentum: momentum.value() * dz,
            peak_amplitude: max_abs(&state.e),
            carrier_bin: bin,
            carrier_k: sp.k.get(bin).copied().unwrap_or(0.0),
            carrier: e_hat.get(bin).copied().unwrap_or_default(),
            carrier_power_fraction: if total_power > 0.0 {
                2.0 * power / total_power
            } else {
                0.0
            },
        }
    }

    /// Runs `steps` steps from `state`, sampling every `output_every`.
    pub fn advance(&self, state: &mut FieldState, steps: usize) -> Result<()> {
        for i in 1..=steps {
            self.step(state)?;
            if i % self.config.output_every == 0 {
                let s = self.sample(state);
                state.samples.push(s);
            }
        }
        Ok(())
    }
}

pub fn init_state(config: &SimConfig) -> Result<FieldState> {
    Simulator::new(config.clone())?.init_state()
}

/// Full run of `config.steps` steps. Deterministic for a fixed configuration.
pub fn run(config: &SimConfig) -> Result<FieldState> {
    let sim = Simulator::new(config.clone())?;
    let mut state = sim.init_state()?;
    sim.advance(&mut state, config.steps)?;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseMeasurement {
    pub k: f64,
    pub omega_measured: f64,
    pub v_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearShift {
    pub omega_measured: f64,
    pub v_phase: f64,
    pub delta_n_eff: f64,
}

/// Carrier frequency from a linear fit of the unwrapped phase of the dominant
/// Fourier bin. Samples must be dense enough that the phase advances by less
/// than π between them.
pub fn measure_phase(series: &[Sample]) -> Result<PhaseMeasurement> {
    let Some(first) = series.first() else {
        return Err(Error::Analysis("empty diagnostics series".into()));
    };
    if series.len() < 3 {
        return Err(Error::Analysis("need at least three samples".into()));
    }
    for s in series {
        if s.carrier_bin == 0 || s.carrier_power_fraction < DOMINANT_POWER_FRACTION {
            return Err(Error::Analysis(format!(
                "no dominant spectral bin at t = {} (fraction {:.3}); signal is broadband",
                s.time, s.carrier_power_fraction
            )));
        }
        if s.carrier_bin != first.carrier_bin {
            return Err(Error::Analysis(format!(
                "dominant bin moved from {} to {}",
                first.carrier_bin, s.carrier_bin
            )));
        }
    }
    let mut phases = Vec::with_capacity(series.len());
    let mut offset = 0.0;
    let mut last = first.carrier.arg();
    for s in series {
        let raw = s.carrier.arg();
        let mut jump = raw - last;
        while jump > PI {
            jump -= 2.0 * PI;
            offset -= 2.0 * PI;
        }
        while jump < -PI {
            jump += 2.0 * PI;
            offset += 2.0 * PI;
        }
        phases.push(raw + offset);
        last = raw;
    }
    let count = series.len() as f64;
    let t_mean = series.iter().map(|s| s.time).sum::<f64>() / count;
    let p_mean = phases.iter().sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (s, p) in series.iter().zip(&phases) {
        let dt = s.time - t_mean;
        sxy += dt * (p - p_mean);
        sxx += dt * dt;
    }
    if sxx == 0.0 {
        return Err(Error::Analysis("samples span no time".into()));
    }
    // the positive bin of a right-moving wave rotates as exp(−iωt)
    let omega = -sxy / sxx;
    Ok(PhaseMeasurement {
        k: first.carrier_k,
        omega_measured: omega,
        v_phase: omega / first.carrier_k,
    })
}

/// Index shift of `series` relative to `reference`, a run with the same
/// configuration but `a = 0`.
pub fn measure_phase_and_nonlinear_shift(series: &[Sample], reference: &[Sample]) -> Result<NonlinearShift> {
    let m = measure_phase(series)?;
    let r = measure_phase(reference)?;
    if m.k != r.k {
        return Err(Error::Analysis(format!(
            "carrier wave numbers differ: {} vs {}",
            m.k, r.k
        )));
    }
    Ok(NonlinearShift {
        omega_measured: m.omega_measured,
        v_phase: m.v_phase,
        delta_n_eff: m.k / m.omega_measured - r.k / r.omega_measured,
    })
}

pub fn write_diagnostics_csv(samples: &[Sample], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "time,energy,momentum,peak_amplitude")?;
    for s in samples {
        writeln!(out, "{},{},{},{}", s.time, s.energy, s.momentum, s.peak_amplitude)?;
    }
    Ok(())
}

/// Field snapshot `z,E,B`; `B` is the staggered half-step value.
pub fn write_snapshot_csv(state: &FieldState, config: &SimConfig, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "z,E,B")?;
    for (j, (e, b)) in state.e.iter().zip(&state.b).enumerate() {
        writeln!(out, "{},{},{}", j as f64 * config.dz(), e, b)?;
    }
    Ok(())
}
