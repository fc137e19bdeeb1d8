//! Long-format spectrum CSV and TOML run configuration.
//!
//! CSV header: `field_T,freq_Hz,s21_db` or `field_T,freq_Hz,s21_db,s21_re,s21_im`,
//! one row per grid cell, sorted by field then frequency. Axes and complex
//! parts use the shortest representation that parses back to the same
//! `f64`; dB values carry 9 significant digits.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{FitConfig, FitReport, GuessOptions};
use crate::physics::{
    DEFAULT_LOW_EXCITATION_THRESHOLD, DEFAULT_MODE_VOLUME, DEFAULT_REGIME_THRESHOLD, ETA_TE101,
};
use crate::{Cavity, Complex, Constants, Grid, Magnon, Map, SpectrumData, System};

pub const HEADER_DB: [&str; 3] = ["field_T", "freq_Hz", "s21_db"];
pub const HEADER_COMPLEX: [&str; 5] = ["field_T", "freq_Hz", "s21_db", "s21_re", "s21_im"];

/// `v` with 9 significant digits; plain notation for moderate magnitudes.
pub fn format_db(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..15).contains(&exp) {
        format!("{:.*}", (8 - exp).max(0) as usize, v)
    } else {
        sci
    }
}

pub fn write_spectrum_csv<W: Write>(map: &Map, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let complex = map.is_complex();
    let csv_err = |e: csv::Error| Error::SpectrumFile(e.to_string());
    if complex {
        w.write_record(HEADER_COMPLEX).map_err(csv_err)?;
    } else {
        w.write_record(HEADER_DB).map_err(csv_err)?;
    }
    let grid = map.grid();
    for (i, b) in grid.field_values().iter().enumerate() {
        for (j, f) in grid.freq_values().iter().enumerate() {
            let db = format_db(map.db(i, j));
            if let Some(z) = map.complex(i, j) {
                w.write_record([b.to_string(), f.to_string(), db, z.re.to_string(), z.im.to_string()])
                    .map_err(csv_err)?;
            } else {
                w.write_record([b.to_string(), f.to_string(), db]).map_err(csv_err)?;
            }
        }
    }
    w.flush().map_err(|e| Error::SpectrumFile(e.to_string()))?;
    Ok(())
}

pub fn save_spectrum_csv(map: &Map, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_spectrum_csv(map, &mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn parse_cell(s: &str, row: usize, column: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::MalformedRow {
        row,
        message: format!("{column}: cannot parse `{s}` as a number"),
    })
}

/// Parses a long-format spectrum. Row numbers in errors count the header
/// as row 1.
pub fn read_spectrum_csv<R: Read>(reader: R) -> Result<Map> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::SpectrumFile(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let complex = if header == HEADER_COMPLEX {
        true
    } else if header == HEADER_DB {
        false
    } else {
        return Err(Error::SpectrumFile(format!(
            "header must be `{}` or `{}`, got `{}`",
            HEADER_DB.join(","),
            HEADER_COMPLEX.join(","),
            header.join(",")
        )));
    };
    let width = header.len();

    let mut cells: BTreeMap<(u64, u64), (usize, f64, Option<Complex>)> = BTreeMap::new();
    let mut fields = BTreeSet::new();
    let mut freqs = BTreeSet::new();
    for (k, rec) in r.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != width {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected {width} columns, got {}", rec.len()),
            });
        }
        let b = parse_cell(&rec[0], row, "field_T")?;
        let f = parse_cell(&rec[1], row, "freq_Hz")?;
        let db = parse_cell(&rec[2], row, "s21_db")?;
        if !b.is_finite() || !f.is_finite() {
            return Err(Error::MalformedRow {
                row,
                message: "field and frequency must be finite".into(),
            });
        }
        let z = if complex {
            Some(Complex::new(parse_cell(&rec[3], row, "s21_re")?, parse_cell(&rec[4], row, "s21_im")?))
        } else {
            None
        };
        // -0.0 and 0.0 name the same axis point
        let key = ((b + 0.0).to_bits(), (f + 0.0).to_bits());
        if let Some((first, _, _)) = cells.insert(key, (row, db, z)) {
            return Err(Error::MalformedRow {
                row,
                message: format!("duplicate cell (field {b} T, freq {f} Hz), first seen in row {first}"),
            });
        }
        fields.insert(key.0);
        freqs.insert(key.1);
    }
    if cells.is_empty() {
        return Err(Error::SpectrumFile("no data rows".into()));
    }
    let mut field_axis: Vec<f64> = fields.into_iter().map(f64::from_bits).collect();
    let mut freq_axis: Vec<f64> = freqs.into_iter().map(f64::from_bits).collect();
    field_axis.sort_by(f64::total_cmp);
    freq_axis.sort_by(f64::total_cmp);

    let mut missing = Vec::new();
    let mut db = Vec::with_capacity(field_axis.len() * freq_axis.len());
    let mut zs = Vec::with_capacity(if complex { db.capacity() } else { 0 });
    for &b in &field_axis {
        for &f in &freq_axis {
            match cells.get(&(b.to_bits(), f.to_bits())) {
                Some(&(_, v, z)) => {
                    db.push(v);
                    if let Some(z) = z {
                        zs.push(z);
                    }
                }
                None => missing.push(format!("(field {b} T, freq {f} Hz)")),
            }
        }
    }
    if !missing.is_empty() {
        let n = missing.len();
        let mut shown: Vec<String> = missing.into_iter().take(20).collect();
        if n > shown.len() {
            shown.push(format!("... {} more", n - shown.len()));
        }
        return Err(Error::NonRectangular(shown.join(", ")));
    }
    let grid = Grid::new(field_axis, freq_axis)?;
    let data = if complex {
        SpectrumData::Complex(zs)
    } else {
        SpectrumData::MagnitudeDb(db)
    };
    let mut map = Map::new(grid, data)?;
    map.metadata.insert("source".into(), "csv".into());
    Ok(map)
}

pub fn load_spectrum_csv(path: impl AsRef<Path>) -> Result<Map> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_spectrum_csv(std::io::BufReader::new(file))
}

/// Branch table: `field_T,branch_index,freq_Hz,cavity_weight`.
pub fn write_branches_csv<W: Write>(branches: &crate::Branches, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let csv_err = |e: csv::Error| Error::SpectrumFile(e.to_string());
    w.write_record(["field_T", "branch_index", "freq_Hz", "cavity_weight"])
        .map_err(csv_err)?;
    for (i, b) in branches.field_values.iter().enumerate() {
        for (k, f) in branches.branches[i].iter().enumerate() {
            w.write_record([
                b.to_string(),
                k.to_string(),
                f.to_string(),
                branches.cavity_weight(i, k).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::SpectrumFile(e.to_string()))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Run configuration

const MHZ: f64 = 1e6;
const GHZ: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    #[serde(default = "default_cavity_label")]
    pub label: String,
    pub omega_c_ghz: f64,
    pub kappa_in_mhz: f64,
    pub kappa_out_mhz: f64,
    pub kappa_int_mhz: f64,
}

impl From<&Cavity> for CavitySection {
    fn from(c: &Cavity) -> Self {
        Self {
            label: c.label.clone(),
            omega_c_ghz: c.omega_c / GHZ,
            kappa_in_mhz: c.kappa_in / MHZ,
            kappa_out_mhz: c.kappa_out / MHZ,
            kappa_int_mhz: c.kappa_int / MHZ,
        }
    }
}

fn default_cavity_label() -> String {
    "cavity".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnonSection {
    pub label: String,
    pub g_tilde_mhz: f64,
    pub gamma_mhz: f64,
    #[serde(default = "default_slope")]
    pub dispersion_slope_ghz_per_t: f64,
    #[serde(default)]
    pub dispersion_offset_t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_spin: Option<f64>,
}

impl From<&Magnon> for MagnonSection {
    fn from(m: &Magnon) -> Self {
        Self {
            label: m.label.clone(),
            g_tilde_mhz: m.g_tilde / MHZ,
            gamma_mhz: m.gamma_m / MHZ,
            dispersion_slope_ghz_per_t: m.dispersion_slope / GHZ,
            dispersion_offset_t: m.dispersion_offset,
            total_spin: m.total_spin,
        }
    }
}

fn default_slope() -> f64 {
    28.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub field_min_t: f64,
    pub field_max_t: f64,
    pub field_points: usize,
    pub freq_min_ghz: f64,
    pub freq_max_ghz: f64,
    pub freq_points: usize,
}

/// Overrides of [`Constants`]; unset keys keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_bar_j_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_b_j_per_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_0_h_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_0_f_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_b_j_per_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_e_ghz_per_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_per_ion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_ex_m2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_power_dbm: Option<f64>,
    #[serde(default)]
    pub detuning_mhz: f64,
    /// Filling/polarization factor of the single-spin coupling.
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_mode_volume")]
    pub mode_volume_m3: f64,
    /// Magnon occupation for the low-excitation check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_magnon_number: Option<f64>,
}

fn default_eta() -> f64 {
    ETA_TE101
}

fn default_mode_volume() -> f64 {
    DEFAULT_MODE_VOLUME
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self {
            temperature_k: None,
            input_power_dbm: None,
            detuning_mhz: 0.0,
            eta: default_eta(),
            mode_volume_m3: default_mode_volume(),
            mean_magnon_number: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(default = "default_permittivity")]
    pub relative_permittivity: f64,
    /// Magnetostatic wavenumber; the geometric mean of k₀ and the exchange
    /// cutoff when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_ms_rad_per_m: Option<f64>,
    #[serde(default = "default_regime_threshold")]
    pub regime_threshold: f64,
    #[serde(default = "default_low_excitation")]
    pub low_excitation_threshold: f64,
}

fn default_permittivity() -> f64 {
    15.0
}

fn default_regime_threshold() -> f64 {
    DEFAULT_REGIME_THRESHOLD
}

fn default_low_excitation() -> f64 {
    DEFAULT_LOW_EXCITATION_THRESHOLD
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            relative_permittivity: default_permittivity(),
            k_ms_rad_per_m: None,
            regime_threshold: default_regime_threshold(),
            low_excitation_threshold: default_low_excitation(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_parameters: Option<Vec<String>>,
    /// `[lower, upper]` in SI units.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bounds_si: BTreeMap<String, [f64; 2]>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub restarts: usize,
    /// Labels assigned to detected trajectories in order of crossing field;
    /// the configured magnon labels when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_modes: Option<Vec<String>>,
}

fn default_max_iterations() -> usize {
    200
}

fn default_tolerance() -> f64 {
    1e-10
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            free_parameters: None,
            bounds_si: BTreeMap::new(),
            max_iterations: default_max_iterations(),
            tolerance: default_tolerance(),
            restarts: 0,
            expected_modes: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    /// Adds `s21_re`/`s21_im` columns to simulated maps.
    #[serde(default)]
    pub complex: bool,
}

/// Everything a CLI run needs, in the units spelled out by each key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub cavity: CavitySection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub magnons: Vec<MagnonSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub constants: ConstantsSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub material: MaterialSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every section against the module-level invariants.
    pub fn validate(&self) -> Result<()> {
        let system = self.system();
        let violations = crate::validate_system(&system);
        if !violations.is_empty() {
            let joined: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Config(joined.join("; ")));
        }
        let constants = self.constants();
        let violations = constants.validate();
        if !violations.is_empty() {
            let joined: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Config(joined.join("; ")));
        }
        if let Some(g) = &self.grid {
            self.build_grid(g)
                .map_err(|e| Error::Config(format!("grid: {e}")))?;
        }
        self.fit_config()
            .validate()
            .map_err(|e| Error::Config(format!("fit: {e}")))?;
        let p = &self.physics;
        if !(p.eta >= 0.0 && p.eta <= 1.0) {
            return Err(Error::Config("physics.eta: must lie in [0, 1]".into()));
        }
        if !(p.mode_volume_m3 > 0.0 && p.mode_volume_m3.is_finite()) {
            return Err(Error::Config("physics.mode_volume_m3: must be finite and > 0".into()));
        }
        if let Some(t) = p.temperature_k {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config("physics.temperature_k: must be finite and > 0".into()));
            }
        }
        let m = &self.material;
        if !(m.relative_permittivity >= 1.0 && m.relative_permittivity.is_finite()) {
            return Err(Error::Config("material.relative_permittivity: must be finite and >= 1".into()));
        }
        if let Some(k) = m.k_ms_rad_per_m {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Config("material.k_ms_rad_per_m: must be finite and > 0".into()));
            }
        }
        Ok(())
    }

    /// Same run with the cavity and magnon sections replaced by `system`.
    pub fn with_system(&self, system: &System) -> Self {
        Self {
            cavity: CavitySection::from(&system.cavity),
            magnons: system.magnons.iter().map(MagnonSection::from).collect(),
            ..self.clone()
        }
    }

    pub fn system(&self) -> System {
        let c = &self.cavity;
        System::new(
            Cavity::new(
                c.label.clone(),
                c.omega_c_ghz * GHZ,
                c.kappa_in_mhz * MHZ,
                c.kappa_out_mhz * MHZ,
                c.kappa_int_mhz * MHZ,
            ),
            self.magnons
                .iter()
                .map(|m| {
                    let mut mode = Magnon::new(m.label.clone(), m.g_tilde_mhz * MHZ, m.gamma_mhz * MHZ)
                        .with_dispersion(m.dispersion_slope_ghz_per_t * GHZ, m.dispersion_offset_t);
                    mode.total_spin = m.total_spin;
                    mode
                })
                .collect(),
        )
    }

    fn build_grid(&self, g: &GridSection) -> Result<Grid> {
        Grid::linspace(
            (g.field_min_t, g.field_max_t, g.field_points),
            (g.freq_min_ghz * GHZ, g.freq_max_ghz * GHZ, g.freq_points),
        )
    }

    /// The sweep grid; errors when the config has no `[grid]` section.
    pub fn grid(&self) -> Result<Grid> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| Error::Config("missing [grid] section".into()))?;
        self.build_grid(g)
    }

    pub fn constants(&self) -> Constants {
        let mut k = Constants::default();
        let o = &self.constants;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut k.h_bar, o.h_bar_j_s);
        set(&mut k.k_b, o.k_b_j_per_k);
        set(&mut k.mu_0, o.mu_0_h_per_m);
        set(&mut k.epsilon_0, o.epsilon_0_f_per_m);
        set(&mut k.mu_b, o.mu_b_j_per_t);
        set(&mut k.gamma_e, o.gamma_e_ghz_per_t.map(|v| v * GHZ));
        set(&mut k.spin_per_ion, o.spin_per_ion);
        set(&mut k.lambda_ex, o.lambda_ex_m2);
        k
    }

    pub fn fit_config(&self) -> FitConfig {
        let f = &self.fit;
        FitConfig {
            free_parameters: f.free_parameters.clone(),
            bounds: f.bounds_si.iter().map(|(k, v)| (k.clone(), (v[0], v[1]))).collect(),
            max_iterations: f.max_iterations,
            tolerance: f.tolerance,
            seed: self.seed,
            restarts: f.restarts,
            db_offset: 0.0,
        }
    }

    pub fn guess_options(&self) -> GuessOptions {
        let c = &self.cavity;
        GuessOptions {
            expected_modes: self
                .fit
                .expected_modes
                .clone()
                .unwrap_or_else(|| self.magnons.iter().map(|m| m.label.clone()).collect()),
            dispersion_slope: self
                .magnons
                .first()
                .map_or(self.constants().gamma_e, |m| m.dispersion_slope_ghz_per_t * GHZ),
            port_ratio: c.kappa_out_mhz / c.kappa_in_mhz,
            cavity_label: c.label.clone(),
            ..GuessOptions::default()
        }
    }
}

// ---------------------------------------------------------------------------
// Fit report

#[derive(Serialize)]
struct ReportFile<'a> {
    residual_rms_db: f64,
    iterations: usize,
    converged: bool,
    termination: String,
    db_offset: f64,
    best_start: usize,
    cavity: CavitySection,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    magnons: Vec<MagnonSection>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    cooperativity: BTreeMap<String, f64>,
    parameters: Vec<ReportParameter<'a>>,
    rms_history_db: &'a [f64],
    fit: FitSection,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    input: &'a BTreeMap<String, String>,
}

#[derive(Serialize)]
struct ReportParameter<'a> {
    name: &'a str,
    value_si: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    uncertainty_si: Option<f64>,
    lower_si: f64,
    upper_si: f64,
}

/// Fit report as TOML, in the same units as [`RunConfig`].
pub fn fit_report_toml(report: &FitReport) -> Result<String> {
    let s = &report.fitted;
    let cfg = &report.config;
    let file = ReportFile {
        residual_rms_db: report.residual_rms,
        iterations: report.iterations,
        converged: report.converged,
        termination: format!("{:?}", report.termination),
        db_offset: report.db_offset,
        best_start: report.best_start,
        cavity: CavitySection::from(&s.cavity),
        magnons: s.magnons.iter().map(MagnonSection::from).collect(),
        cooperativity: s
            .magnons
            .iter()
            .filter_map(|m| Some((m.label.clone(), report.cooperativity(&m.label)?)))
            .collect(),
        parameters: report
            .parameters
            .iter()
            .map(|p| ReportParameter {
                name: &p.name,
                value_si: p.value,
                uncertainty_si: p.uncertainty,
                lower_si: p.lower,
                upper_si: p.upper,
            })
            .collect(),
        rms_history_db: &report.rms_history,
        fit: FitSection {
            free_parameters: cfg.free_parameters.clone(),
            bounds_si: cfg.bounds.iter().map(|(k, v)| (k.clone(), [v.0, v.1])).collect(),
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
            restarts: cfg.restarts,
            expected_modes: None,
        },
        input: &report.metadata,
    };
    toml::to_string(&file).map_err(|e| Error::Config(e.to_string()))
}
