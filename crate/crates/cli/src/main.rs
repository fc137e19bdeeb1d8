//! `magpol` command-line front end.
//!
//! Exit codes: 0 success, 1 domain error or failed check, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use magpol::fit::{self, peaks::crossing_splitting, FitReport};
use magpol::io::{self, RunConfig};
use magpol::physics::{self, CouplingBudget};
use magpol::spectrum::polariton_branches;
use magpol::transmission::{damping_sweep, spectrum_map};
use magpol::{units, validate_system, Map, SpectrumData, System};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "MAGPOL_OUT_DIR";

#[derive(Parser)]
#[command(name = "magpol", version, about = "Cavity magnon-polariton spectra: simulate, fit, derive")]
struct Cli {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print the effective config as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission map and polariton branches on the config grid.
    Simulate {
        /// Run configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gaussian dB noise added to the map (drawn from the seed).
        #[arg(long)]
        noise_db: Option<f64>,
    },
    /// Fit the coupled-mode model to a spectrum CSV.
    Fit {
        /// Spectrum CSV to fit.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Start from this config's cavity and magnons instead of the
        /// automatic guess.
        #[arg(long)]
        guess: Option<PathBuf>,
        /// Drop the weakest magnon when the data do not support it.
        #[arg(long)]
        select: bool,
    },
    /// Derived quantities as `key=value` lines.
    Derive {
        #[arg(long)]
        config: PathBuf,
    },
    /// One map per damping multiplier of a magnon mode.
    SweepDamping {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated factors applied to the mode's γ_m, e.g. `1,10,100`.
        #[arg(long, value_delimiter = ',', required = true)]
        multipliers: Vec<f64>,
        /// Magnon label whose damping is swept.
        #[arg(long, default_value = "MS")]
        label: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter validity, magnetostatic regime and low-excitation checks.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

impl Command {
    fn config_path(&self) -> &Path {
        match self {
            Command::Simulate { config, .. }
            | Command::Fit { config, .. }
            | Command::Derive { config }
            | Command::SweepDamping { config, .. }
            | Command::Check { config } => config,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let path = cli.command.config_path();
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.dump_config {
        print!("{}", config.to_toml_string()?);
        return Ok(true);
    }
    match &cli.command {
        Command::Simulate { out, noise_db, .. } => simulate(&config, out.as_deref(), *noise_db),
        Command::Fit {
            data,
            out,
            guess,
            select,
            ..
        } => fit_command(&config, data, out.as_deref(), guess.as_deref(), *select),
        Command::Derive { .. } => derive(&config),
        Command::SweepDamping {
            multipliers,
            label,
            out,
            ..
        } => sweep(&config, multipliers, label, out.as_deref()),
        Command::Check { .. } => check(&config),
    }
}

fn out_dir(config: &RunConfig, flag: Option<&Path>) -> Result<PathBuf> {
    let dir = match (flag, &config.output.directory) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// Simulated map in the configured output format.
fn simulated(config: &RunConfig, system: &System) -> Result<Map> {
    let map = spectrum_map(system, &config.grid()?)?;
    Ok(if config.output.complex { map } else { map.to_db_map() })
}

fn simulate(config: &RunConfig, out: Option<&Path>, noise_db: Option<f64>) -> Result<bool> {
    let system = config.system();
    let mut map = simulated(config, &system)?;
    if let Some(sigma) = noise_db {
        map = fit::add_db_noise(&map, sigma, config.seed)?;
    }
    let dir = out_dir(config, out)?;
    let spectrum = dir.join("spectrum.csv");
    io::save_spectrum_csv(&map, &spectrum)?;
    let branches = polariton_branches(&system, map.grid().field_values())?;
    let branch_path = dir.join("branches.csv");
    let file = fs::File::create(&branch_path).with_context(|| format!("creating {}", branch_path.display()))?;
    io::write_branches_csv(&branches, std::io::BufWriter::new(file))?;
    println!("spectrum={}", spectrum.display());
    println!("branches={}", branch_path.display());
    Ok(true)
}

fn fit_command(config: &RunConfig, data: &Path, out: Option<&Path>, guess: Option<&Path>, select: bool) -> Result<bool> {
    let map = io::load_spectrum_csv(data).with_context(|| format!("reading {}", data.display()))?;
    let start = match guess {
        Some(p) => RunConfig::load(p)?.system(),
        None => {
            let g = fit::initial_guess(&map, &config.guess_options())?;
            for w in &g.warnings {
                eprintln!("warning: {w}");
            }
            g.system
        }
    };
    let fit_config = config.fit_config();
    let report = if select {
        let sel = fit::select_magnon_model(&map, &fit_config, &start)?;
        if let Some(label) = &sel.dropped {
            eprintln!("note: dropped magnon `{label}`, not supported by the data");
        }
        sel.chosen
    } else {
        fit::fit_hybrid(&map, &fit_config, &start)?
    };

    let dir = out_dir(config, out)?;
    let report_path = dir.join("fit_report.toml");
    fs::write(&report_path, io::fit_report_toml(&report)?).with_context(|| format!("writing {}", report_path.display()))?;
    let fitted_path = dir.join("fitted_config.toml");
    fs::write(&fitted_path, config.with_system(&report.fitted).to_toml_string()?)
        .with_context(|| format!("writing {}", fitted_path.display()))?;
    let map_path = dir.join("fit_map.csv");
    io::save_spectrum_csv(&overlay(&map, &report)?, &map_path)?;

    print_report(&report);
    println!("report={}", report_path.display());
    println!("fitted_config={}", fitted_path.display());
    println!("fit_map={}", map_path.display());
    Ok(true)
}

/// Best-fit map on the data grid, dB offset applied.
fn overlay(data: &Map, report: &FitReport) -> Result<Map> {
    let model = spectrum_map(&report.fitted, data.grid())?;
    let db = model.db_values().into_iter().map(|v| v + report.db_offset).collect();
    let mut map = Map::new(data.grid().clone(), SpectrumData::MagnitudeDb(db))?;
    map.metadata = model.metadata;
    Ok(map)
}

fn print_report(report: &FitReport) {
    println!("residual_rms_db={}", report.residual_rms);
    println!("converged={}", report.converged);
    println!("iterations={}", report.iterations);
    for p in &report.parameters {
        match p.uncertainty {
            Some(u) => println!("{}={} +- {}", p.name, p.value, sig(u)),
            None => println!("{}={}", p.name, p.value),
        }
    }
    for m in &report.fitted.magnons {
        if let Some(c) = report.cooperativity(&m.label) {
            println!("C_{}={}", m.label, c);
        }
    }
}

/// Three significant digits, plain notation for moderate magnitudes.
fn sig(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return v.to_string();
    }
    let sci = format!("{v:.2e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..6).contains(&exp) {
        format!("{:.*}", (2 - exp).max(0) as usize, v)
    } else {
        sci
    }
}

/// Magnetostatic regime at the cavity frequency.
fn regime(config: &RunConfig) -> Result<magpol::Regime> {
    let constants = config.constants();
    let m = &config.material;
    let wc = config.system().cavity.omega_c;
    let k_ms = m
        .k_ms_rad_per_m
        .unwrap_or_else(|| physics::magnetostatic_midpoint(wc, m.relative_permittivity, &constants));
    Ok(physics::magnetostatic_regime_check(
        wc,
        m.relative_permittivity,
        k_ms,
        &constants,
        m.regime_threshold,
    )?)
}

/// Photon number under the configured drive, if any.
fn drive_photons(config: &RunConfig) -> Result<Option<f64>> {
    let Some(dbm) = config.physics.input_power_dbm else {
        return Ok(None);
    };
    let cavity = config.system().cavity;
    let detuning = config.physics.detuning_mhz * 1e6;
    Ok(Some(physics::drive_photon_number(
        units::dbm_to_watts(dbm),
        cavity.omega_c + detuning,
        &cavity,
        detuning,
        &config.constants(),
    )?))
}

/// Per-magnon `(label, budget, total spin)`.
fn budgets(config: &RunConfig) -> Result<Vec<(String, CouplingBudget<f64>, f64)>> {
    let system = config.system();
    let constants = config.constants();
    let p = &config.physics;
    system
        .magnons
        .iter()
        .map(|m| {
            let b = CouplingBudget::compute(
                p.eta,
                system.cavity.omega_c,
                p.mode_volume_m3,
                m.g_tilde,
                system.kappa_tot(),
                m.gamma_m,
                &constants,
            )?;
            let spin = m.total_spin.unwrap_or_else(|| b.total_spin(constants.spin_per_ion));
            Ok((m.label.clone(), b, spin))
        })
        .collect()
}

/// Magnon occupation for the low-excitation check: the configured value,
/// else the drive photon number as an upper estimate.
fn magnon_number(config: &RunConfig) -> Result<Option<f64>> {
    Ok(match config.physics.mean_magnon_number {
        Some(n) => Some(n),
        None => drive_photons(config)?,
    })
}

fn derive(config: &RunConfig) -> Result<bool> {
    let system = config.system();
    let constants = config.constants();
    let c = &system.cavity;
    println!("cavity={}", c.label);
    println!("omega_c_ghz={}", c.omega_c / 1e9);
    println!("kappa_tot_mhz={}", sig(system.kappa_tot() / 1e6));
    println!("eta={}", config.physics.eta);
    println!(
        "g_single_millihz={}",
        sig(physics::single_spin_coupling(config.physics.eta, c.omega_c, config.physics.mode_volume_m3, &constants)? * 1e3)
    );
    let occupation = magnon_number(config)?;
    for (label, b, spin) in budgets(config)? {
        println!("C_{label}={}", sig(b.cooperativity));
        println!("N_{label}={}", sig(b.n_spins));
        println!("S_{label}={}", sig(spin));
        if let Some(n) = occupation {
            println!("low_excitation_ratio_{label}={}", sig(physics::low_excitation_ratio(n, spin)?));
        }
    }
    if let Some(t) = config.physics.temperature_k {
        println!("n_thermal={}", sig(physics::thermal_photon_number(c.omega_c, t, &constants)?));
    }
    if let Some(n) = drive_photons(config)? {
        println!("n_drive={}", sig(n));
    }
    let r = regime(config)?;
    println!("k0_rad_per_m={}", sig(r.k0));
    println!("k_ms_rad_per_m={}", sig(r.k_ms));
    println!("exchange_cutoff_rad_per_m={}", sig(r.exchange_cutoff));
    println!("regime_lower_ratio={}", sig(r.lower_ratio));
    println!("regime_upper_ratio={}", sig(r.upper_ratio));
    println!("regime_ok={}", r.passed());
    Ok(true)
}

fn sweep(config: &RunConfig, multipliers: &[f64], label: &str, out: Option<&Path>) -> Result<bool> {
    let system = config.system();
    let grid = config.grid()?;
    let maps = damping_sweep(&system, label, multipliers, &grid)?;
    let dir = out_dir(config, out)?;
    for (&k, map) in multipliers.iter().zip(&maps) {
        let map = if config.output.complex { map.clone() } else { map.to_db_map() };
        let path = dir.join(format!("spectrum_x{k}.csv"));
        io::save_spectrum_csv(&map, &path)?;
        println!("spectrum_x{k}={}", path.display());
        let scaled = system.with_scaled_damping(label, k)?;
        for m in &scaled.magnons {
            let split = crossing_splitting(&map, &scaled, &m.label, 0.5)?;
            println!("splitting_{}_x{k}_mhz={}", m.label, sig(split / 1e6));
        }
    }
    Ok(true)
}

fn check(config: &RunConfig) -> Result<bool> {
    let mut ok = true;
    let mut report = |name: &str, pass: Option<bool>| {
        let word = match pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "skipped",
        };
        println!("{name}={word}");
        ok &= pass != Some(false);
    };

    let violations = validate_system(&config.system());
    for v in &violations {
        eprintln!("violation: {v}");
    }
    report("system", Some(violations.is_empty()));
    let constants = config.constants().validate();
    for v in &constants {
        eprintln!("violation: {v}");
    }
    report("constants", Some(constants.is_empty()));

    let r = regime(config)?;
    report("magnetostatic_regime", Some(r.passed()));

    let occupation = magnon_number(config)?;
    for (label, _, spin) in budgets(config)? {
        let pass = match occupation {
            Some(n) => Some(physics::low_excitation_ratio(n, spin)? < config.material.low_excitation_threshold),
            None => None,
        };
        report(&format!("low_excitation_{label}"), pass);
    }
    Ok(ok)
}
