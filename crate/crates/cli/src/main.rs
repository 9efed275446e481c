//! `dielfet`: command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 validation/domain/validity/parse,
//! 3 numerical non-convergence. Failures print one `kind: reason` line to
//! stderr.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dielfet::calibration::{calibrate as calibrate_record, CalibrationRecord, Measurements};
use dielfet::dispersion::{cauchy_from_eft, phase_index, solve_k, CauchyCoefficients, IndexOrder};
use dielfet::kerr::kerr_report;
use dielfet::materials::load_materials;
use dielfet::units::wavelength_to_photon_energy;
use dielfet::vacuum::{blackbody_density, casimir_closed, casimir_numeric, Regulator, RegulatorInfo};
use dielfet::wave_sim::{measure_phase, run, write_diagnostics_csv, write_snapshot_csv, PhaseMeasurement, SimConfig};
use dielfet::{Error, Medium, Warning};

use render::{cell, OutputMode, Report, Table};

const MATERIALS_ENV: &str = "DIELFET_MATERIALS";

#[derive(Parser)]
#[command(name = "dielfet", version, about = "Light in dielectrics: dispersion, Kerr effects, vacuum energies, wave propagation")]
#[command(args_conflicts_with_subcommands = true, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    output: OutputMode,
}

#[derive(Subcommand)]
enum Command {
    /// Phase and group index at a wavelength or photon energy.
    #[command(allow_negative_numbers = true)]
    Dispersion(DispersionArgs),
    /// DC and AC Kerr indices, Kerr constant and nonlinear index.
    #[command(allow_negative_numbers = true)]
    Kerr(KerrArgs),
    /// Casimir pressure between ideal plates filling the gap with the medium.
    #[command(allow_negative_numbers = true)]
    Casimir(CasimirArgs),
    /// Black-body energy density and spectrum in the medium.
    #[command(allow_negative_numbers = true)]
    Blackbody(BlackbodyArgs),
    /// Run the 1D nonlinear wave simulator from a key = value config file.
    Propagate(PropagateArgs),
    /// Fit d1 and a from Cauchy B and a Kerr observable.
    ///
    /// Only two couplings are fitted: d1 from B, a from K and/or n2. The
    /// third coupling d2 would need a Cauchy C coefficient, which the
    /// materials schema does not carry, so it is held at 0.
    #[command(allow_negative_numbers = true)]
    Calibrate(CalibrateArgs),
    /// List and validate a materials database.
    Materials(MaterialsArgs),
}

#[derive(Args, Clone)]
struct MediumArgs {
    /// Refractive index.
    #[arg(long, default_value_t = 1.0)]
    n: f64,
    /// Energy scale M in eV [default: 10/n].
    #[arg(long = "M")]
    m_scale: Option<f64>,
    /// Relative permeability.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0)]
    d1: f64,
    #[arg(long, default_value_t = 0.0)]
    d2: f64,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
}

impl MediumArgs {
    fn medium(&self) -> Result<Medium, Error> {
        let m = self.m_scale.unwrap_or(10.0 / self.n);
        Medium::new("", self.n, self.mu, m, self.d1, self.d2, self.a)
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Order {
    Exact,
    FirstOrder,
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Vacuum wavelength in nm.
    #[arg(long = "lambda-nm", required_unless_present = "omega_ev", conflicts_with = "omega_ev")]
    lambda_nm: Option<f64>,
    /// Photon energy in eV.
    #[arg(long = "omega-eV")]
    omega_ev: Option<f64>,
    #[arg(long, value_enum, default_value = "first-order")]
    order: Order,
}

#[derive(Args)]
struct KerrArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Wavelength for the Kerr constant, in nm.
    #[arg(long = "lambda-nm", default_value_t = 500.0)]
    lambda_nm: f64,
    /// Static field in V/m.
    #[arg(long = "E-v-per-m", default_value_t = 0.0)]
    e_v_per_m: f64,
    /// Beam intensity in W/m^2.
    #[arg(long = "I-w-per-m2", default_value_t = 0.0)]
    i_w_per_m2: f64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Closed,
    Numeric,
}

#[derive(Args)]
struct CasimirArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Plate separation in micrometres.
    #[arg(long = "gap-um")]
    gap_um: f64,
    #[arg(long, value_enum, default_value = "closed")]
    method: Method,
    /// First regulator cutoff as a fraction of the gap.
    #[arg(long = "cutoff-start", default_value_t = Regulator::default().cutoff_start)]
    cutoff_start: f64,
    /// Number of cutoff halvings.
    #[arg(long = "cutoff-steps", default_value_t = Regulator::default().cutoff_steps)]
    cutoff_steps: usize,
    /// Degree of the extrapolating polynomial.
    #[arg(long = "poly-degree", default_value_t = Regulator::default().poly_degree)]
    poly_degree: usize,
}

#[derive(Args)]
struct BlackbodyArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[arg(long = "T-kelvin")]
    t_kelvin: f64,
    /// Use the dispersive mode density n(ω)² n_g(ω).
    #[arg(long)]
    dispersive: bool,
}

#[derive(Args)]
struct PropagateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Diagnostics CSV (time,energy,momentum,peak_amplitude).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final field snapshot CSV (z,E,B).
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Materials CSV; falls back to $DIELFET_MATERIALS when no single record is given.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long = "name", default_value = "sample")]
    name: String,
    #[arg(long, default_value_t = 1.5)]
    n: f64,
    /// Energy scale M in eV [default: 10/n].
    #[arg(long = "M")]
    m_scale: Option<f64>,
    /// Cauchy B in m^2.
    #[arg(long = "B-m2", conflicts_with = "file")]
    b_m2: Option<f64>,
    /// Cauchy C in m^4 (enables a d2 fit).
    #[arg(long = "C-m4")]
    c_m4: Option<f64>,
    /// Kerr constant in m/V^2.
    #[arg(long = "K-m-per-V2")]
    k_m_per_v2: Option<f64>,
    /// Nonlinear index in m^2/W.
    #[arg(long = "n2-m2-per-W")]
    n2_m2_per_w: Option<f64>,
    /// Reference wavelength in nm.
    #[arg(long = "lambda-nm", default_value_t = 500.0)]
    lambda_nm: f64,
}

#[derive(Args)]
struct MaterialsArgs {
    /// Materials CSV [default: $DIELFET_MATERIALS].
    #[arg(long)]
    file: Option<PathBuf>,
}

fn warning_strings(w: &[Warning]) -> Vec<String> {
    w.iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
struct DispersionOut {
    #[serde(rename = "omega_eV")]
    omega_ev: f64,
    lambda_nm: f64,
    order: Order,
    phase_index: f64,
    phase_index_exact: f64,
    group_index: f64,
    #[serde(rename = "k_eV")]
    k_ev: f64,
    cauchy: CauchyCoefficients,
}

fn dispersion(args: &DispersionArgs) -> Result<Report, Error> {
    let medium = args.medium.medium()?;
    let omega = match (args.lambda_nm, args.omega_ev) {
        (Some(l), _) => wavelength_to_photon_energy(l * 1e-9)?,
        (None, Some(w)) => w,
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let order = match args.order {
        Order::Exact => IndexOrder::Exact,
        Order::FirstOrder => IndexOrder::FirstOrder,
    };
    let index = phase_index(omega, &medium, order)?;
    let exact = solve_k(omega, &medium)?;
    let mut warnings = medium.warnings();
    warnings.extend(index.warnings);
    let out = DispersionOut {
        omega_ev: omega,
        lambda_nm: args.lambda_nm.unwrap_or_else(|| {
            dielfet::units::photon_energy_to_wavelength(omega).map_or(f64::INFINITY, |l| l * 1e9)
        }),
        order: args.order,
        phase_index: index.value,
        phase_index_exact: exact.phase_index,
        group_index: exact.group_index,
        k_ev: exact.k,
        cauchy: cauchy_from_eft(&medium),
    };
    Ok(Report::new(&out, warning_strings(&warnings)))
}

fn kerr(args: &KerrArgs) -> Result<Report, Error> {
    let medium = args.medium.medium()?;
    let report = kerr_report(&medium, args.lambda_nm * 1e-9, args.e_v_per_m, args.i_w_per_m2)?;
    Ok(Report::new(&report, warning_strings(&medium.warnings())))
}

#[derive(Serialize)]
struct CasimirOut {
    gap_um: f64,
    n: f64,
    method: Method,
    force_pa: f64,
    energy_per_area_j_per_m2: f64,
    surface_scale_estimate_pa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regulator: Option<RegulatorInfo>,
}

fn casimir(args: &CasimirArgs) -> Result<Report, Error> {
    let medium = args.medium.medium()?;
    let gap = args.gap_um * 1e-6;
    let result = match args.method {
        Method::Closed => casimir_closed(gap, &medium)?,
        Method::Numeric => casimir_numeric(
            gap,
            &medium,
            Regulator {
                cutoff_start: args.cutoff_start,
                cutoff_steps: args.cutoff_steps,
                poly_degree: args.poly_degree,
            },
        )?,
    };
    let out = CasimirOut {
        gap_um: args.gap_um,
        n: medium.n,
        method: args.method,
        force_pa: result.force_per_area,
        energy_per_area_j_per_m2: result.energy_per_area,
        surface_scale_estimate_pa: result.surface_scale_estimate,
        regulator: result.regulator_info,
    };
    Ok(Report::new(&out, warning_strings(&medium.warnings())))
}

fn blackbody(args: &BlackbodyArgs) -> Result<Report, Error> {
    let medium = args.medium.medium()?;
    let result = blackbody_density(args.t_kelvin, &medium, args.dispersive)?;
    let mut warnings = medium.warnings();
    warnings.extend(result.warnings.iter().cloned());
    let mut table = Table::new(&["omega_eV", "u_natural"]);
    for s in &result.spectrum {
        table.push(vec![cell(s.omega_ev), cell(s.u_natural)]);
    }
    Ok(Report::new(&result, warning_strings(&warnings)).with_table(table))
}

#[derive(Serialize)]
struct PropagateOut {
    steps: usize,
    final_time: f64,
    samples: usize,
    energy_initial: f64,
    energy_final: f64,
    max_relative_energy_drift: f64,
    momentum_final: f64,
    peak_amplitude_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    carrier: Option<PhaseMeasurement>,
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn propagate(args: &PropagateArgs) -> Result<Report, Error> {
    let config = SimConfig::parse(&read_text(&args.config)?)?;
    let state = run(&config)?;
    let first = state.samples.first().expect("run records the initial sample");
    let last = state.samples.last().expect("run records the initial sample");
    let e0 = first.energy;
    let drift = if e0 == 0.0 {
        0.0
    } else {
        state
            .samples
            .iter()
            .map(|s| ((s.energy - e0) / e0).abs())
            .fold(0.0, f64::max)
    };
    if let Some(path) = &args.out {
        write_diagnostics_csv(&state.samples, std::fs::File::create(path)?)?;
    }
    if let Some(path) = &args.snapshot {
        write_snapshot_csv(&state, &config, std::fs::File::create(path)?)?;
    }
    let out = PropagateOut {
        steps: config.steps,
        final_time: state.time,
        samples: state.samples.len(),
        energy_initial: e0,
        energy_final: last.energy,
        max_relative_energy_drift: drift,
        momentum_final: last.momentum,
        peak_amplitude_final: last.peak_amplitude,
        carrier: measure_phase(&state.samples).ok(),
    };
    let mut table = Table::new(&["time", "energy", "momentum", "peak_amplitude"]);
    for s in &state.samples {
        table.push(vec![cell(s.time), cell(s.energy), cell(s.momentum), cell(s.peak_amplitude)]);
    }
    Ok(Report::new(&out, Vec::new()).with_table(table))
}

fn materials_path(explicit: &Option<PathBuf>) -> Result<PathBuf, Error> {
    explicit
        .clone()
        .or_else(|| std::env::var_os(MATERIALS_ENV).map(PathBuf::from))
        .ok_or_else(|| Error::Validation(format!("no materials file: pass --file or set {MATERIALS_ENV}")))
}

#[derive(Serialize)]
struct CalibrationOut {
    records: Vec<CalibrationRecord>,
}

fn calibrate(args: &CalibrateArgs) -> Result<Report, Error> {
    let records = match args.b_m2 {
        Some(b) => vec![calibrate_record(&Measurements {
            material: args.name.clone(),
            n: args.n,
            m_scale: args.m_scale.unwrap_or(10.0 / args.n),
            b_m2: b,
            c_m4: args.c_m4,
            k_m_per_v2: args.k_m_per_v2,
            n2_m2_per_w: args.n2_m2_per_w,
            lambda_ref_m: args.lambda_nm * 1e-9,
        })?],
        None => load_materials(materials_path(&args.file)?)?
            .into_iter()
            .map(|m| m.record)
            .collect(),
    };
    let warnings: Vec<String> = records
        .iter()
        .flat_map(|r| r.warnings.iter().map(move |w| format!("{}: {w}", r.measured.material)))
        .collect();
    let mut table = Table::new(&["name", "d1", "a", "consistency"]);
    for r in &records {
        table.push(vec![
            r.measured.material.clone(),
            cell(r.d1_fit),
            cell(r.a_fit),
            r.consistency.map(cell).unwrap_or_default(),
        ]);
    }
    Ok(Report::new(&CalibrationOut { records }, warnings).with_table(table))
}

#[derive(Serialize)]
struct MaterialRow {
    name: String,
    n: f64,
    #[serde(rename = "M_eV")]
    m_ev: f64,
    d1: f64,
    a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    consistency: Option<f64>,
}

#[derive(Serialize)]
struct MaterialsOut {
    count: usize,
    materials: Vec<MaterialRow>,
}

fn materials(args: &MaterialsArgs) -> Result<Report, Error> {
    let list = load_materials(materials_path(&args.file)?)?;
    let rows: Vec<MaterialRow> = list
        .iter()
        .map(|m| MaterialRow {
            name: m.medium.name.clone(),
            n: m.medium.n,
            m_ev: m.medium.m_scale,
            d1: m.medium.d1,
            a: m.medium.a,
            consistency: m.record.consistency,
        })
        .collect();
    let mut warnings = Vec::new();
    for m in &list {
        for w in m.medium.warnings().iter().chain(&m.record.warnings) {
            warnings.push(format!("{}: {w}", m.medium.name));
        }
    }
    let mut table = Table::new(&["name", "n", "M_eV", "d1", "a"]);
    for r in &rows {
        table.push(vec![r.name.clone(), cell(r.n), cell(r.m_ev), cell(r.d1), cell(r.a)]);
    }
    Ok(Report::new(&MaterialsOut { count: rows.len(), materials: rows }, warnings).with_table(table))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_)
        | Error::Domain(_)
        | Error::Validity(_)
        | Error::Parse { .. }
        | Error::InsufficientData(_) => 2,
        Error::Numerical { .. } | Error::Analysis(_) => 3,
        Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let reason = text
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("usage: {reason}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Dispersion(a) => dispersion(a),
        Command::Kerr(a) => kerr(a),
        Command::Casimir(a) => casimir(a),
        Command::Blackbody(a) => blackbody(a),
        Command::Propagate(a) => propagate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Materials(a) => materials(a),
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(cli.output));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}
