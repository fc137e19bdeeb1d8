//! Full-map least-squares fit of the coupled-mode transmission model.
//!
//! The objective is `Σ (model_dB + db_offset − data_dB)²` over every finite
//! cell of the map. With `D = i(f − ω_c) − κ_tot + Σ_m g̃²/E_m`,
//! `E_m = i(f − ω_m(B)) − γ_m` and `c = 20/ln 10`,
//!
//! ```text
//! model_dB = c·ln(2√(κ_in·κ_out)) − c·ln|D|
//! ∂model/∂p = c·∂ln N/∂p − c·Re(D̄·∂D/∂p)/|D|²
//! ```
//!
//! and the Jacobian is analytic:
//!
//! | parameter            | ∂D/∂p          | ∂ln N/∂p |
//! |----------------------|----------------|----------|
//! | `omega_c`            | −i             | 0        |
//! | `kappa_in` (ports)   | −(1 + ρ)       | 1/κ_in   |
//! | `kappa_int`          | −1             | 0        |
//! | `g_tilde`            | 2g̃/E           | 0        |
//! | `gamma_m`            | g̃²/E²          | 0        |
//! | `dispersion_slope`   | i·g̃²/E²·(B−b)  | 0        |
//! | `dispersion_offset`  | −i·g̃²/E²·s     | 0        |
//!
//! ρ = κ_out/κ_in is held at its guess value; floating `kappa_in` or
//! `kappa_out` scales both ports together.
//!
//! Free parameters are optimized in units of their bound width so that the
//! damping in [`lm::minimize`] sees comparable columns.

use std::collections::BTreeMap;
use std::f64::consts::LN_10;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lm::{self, accumulate_chunks, LeastSquares, LmError, LmOptions, Termination};
use crate::error::{Error, Result};
use crate::{Complex, Map, System};

const C_DB: f64 = 20.0 / LN_10;

/// Which parameters float and how far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// Parameter names; `None` selects [`default_free_parameters`].
    pub free_parameters: Option<Vec<String>>,
    /// Per-parameter `(lower, upper)` in SI units (Hz, T, Hz/T, dB).
    /// Parameters without an entry get automatic bounds from the grid.
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub max_iterations: usize,
    /// Relative decrease of the residual sum of squares treated as converged.
    pub tolerance: f64,
    /// Seed for the restart perturbations.
    pub seed: u64,
    /// Extra starts from perturbed guesses; the lowest residual wins.
    pub restarts: usize,
    /// Starting value of the additive dB offset.
    pub db_offset: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            free_parameters: None,
            bounds: BTreeMap::new(),
            max_iterations: 200,
            tolerance: 1e-10,
            seed: 0,
            restarts: 0,
            db_offset: 0.0,
        }
    }
}

impl FitConfig {
    pub fn with_free(mut self, names: &[&str]) -> Self {
        self.free_parameters = Some(names.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::FitConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::FitConfig("max_iterations must be at least 1".into()));
        }
        for (name, &(lo, hi)) in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::FitConfig(format!(
                    "bounds for {name} must be finite with lower < upper, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

/// `omega_c`, `kappa_in`, `kappa_int` and per magnon `g_tilde`, `gamma_m`,
/// `dispersion_offset`.
pub fn default_free_parameters(system: &System) -> Vec<String> {
    let mut v: Vec<String> = ["omega_c", "kappa_in", "kappa_int"].iter().map(|s| s.to_string()).collect();
    for m in &system.magnons {
        for p in ["g_tilde", "gamma_m", "dispersion_offset"] {
            v.push(format!("{}.{p}", m.label));
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedParameter {
    pub name: String,
    pub value: f64,
    /// Standard error; present only for converged fits.
    pub uncertainty: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fitted: System,
    pub db_offset: f64,
    /// dB.
    pub residual_rms: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub parameters: Vec<FittedParameter>,
    /// RMS residual at the start and after every accepted step.
    pub rms_history: Vec<f64>,
    pub config: FitConfig,
    /// Input map metadata.
    pub metadata: BTreeMap<String, String>,
    /// Index of the start (0 = guess) that produced the result.
    pub best_start: usize,
}

impl FitReport {
    pub fn parameter(&self, name: &str) -> Option<&FittedParameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn uncertainty(&self, name: &str) -> Option<f64> {
        self.parameter(name)?.uncertainty
    }

    /// `C = g̃²/(κ_tot·γ)` of the fitted magnon.
    pub fn cooperativity(&self, label: &str) -> Option<f64> {
        let m = self.fitted.magnon(label)?;
        Some(m.g_tilde * m.g_tilde / (self.fitted.kappa_tot() * m.gamma_m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    OmegaC,
    /// Port scale with the κ_out/κ_in ratio held; `true` when named `kappa_out`.
    Port(bool),
    KappaInt,
    DbOffset,
    G(usize),
    Gamma(usize),
    Slope(usize),
    Offset(usize),
}

fn parse_slot(name: &str, system: &System) -> Result<Slot> {
    Ok(match name {
        "omega_c" => Slot::OmegaC,
        "kappa_in" => Slot::Port(false),
        "kappa_out" => Slot::Port(true),
        "kappa_int" => Slot::KappaInt,
        "db_offset" => Slot::DbOffset,
        _ => {
            let (label, field) = name
                .rsplit_once('.')
                .ok_or_else(|| Error::FitConfig(format!("unknown parameter `{name}`")))?;
            let k = system
                .magnon_index(label)
                .ok_or_else(|| Error::FitConfig(format!("parameter `{name}` names unknown magnon `{label}`")))?;
            match field {
                "g_tilde" => Slot::G(k),
                "gamma_m" => Slot::Gamma(k),
                "dispersion_slope" => Slot::Slope(k),
                "dispersion_offset" => Slot::Offset(k),
                _ => return Err(Error::FitConfig(format!("unknown parameter `{name}`"))),
            }
        }
    })
}

/// Full parameter vector: `[ω_c, κ_in, κ_out, κ_int, db, (g̃, γ, s, b)…]`.
fn pack(system: &System, db_offset: f64) -> Vec<f64> {
    let c = &system.cavity;
    let mut v = vec![c.omega_c, c.kappa_in, c.kappa_out, c.kappa_int, db_offset];
    for m in &system.magnons {
        v.extend_from_slice(&[m.g_tilde, m.gamma_m, m.dispersion_slope, m.dispersion_offset]);
    }
    v
}

fn unpack(template: &System, p: &[f64]) -> (System, f64) {
    let mut s = template.clone();
    s.cavity.omega_c = p[0];
    s.cavity.kappa_in = p[1];
    s.cavity.kappa_out = p[2];
    s.cavity.kappa_int = p[3];
    for (k, m) in s.magnons.iter_mut().enumerate() {
        let q = &p[5 + 4 * k..9 + 4 * k];
        m.g_tilde = q[0];
        m.gamma_m = q[1];
        m.dispersion_slope = q[2];
        m.dispersion_offset = q[3];
    }
    (s, p[4])
}

fn slot_value(slot: Slot, p: &[f64]) -> f64 {
    match slot {
        Slot::OmegaC => p[0],
        Slot::Port(false) => p[1],
        Slot::Port(true) => p[2],
        Slot::KappaInt => p[3],
        Slot::DbOffset => p[4],
        Slot::G(k) => p[5 + 4 * k],
        Slot::Gamma(k) => p[6 + 4 * k],
        Slot::Slope(k) => p[7 + 4 * k],
        Slot::Offset(k) => p[8 + 4 * k],
    }
}

/// Automatic bounds around the guess value `v`, from the grid extent.
fn auto_bounds(slot: Slot, v: f64, map: &Map) -> (f64, f64) {
    let f = map.grid().freq_values();
    let b = map.grid().field_values();
    let (f0, f1) = (f[0], f[f.len() - 1]);
    let fspan = (f1 - f0).abs().max(f64::MIN_POSITIVE);
    let bspan = (b[b.len() - 1] - b[0]).abs();
    match slot {
        Slot::OmegaC => (f0.min(v) - fspan, f1.max(v) + fspan),
        Slot::Port(_) => (1e-6 * fspan, fspan.max(2.0 * v)),
        Slot::KappaInt => (0.0, fspan.max(2.0 * v)),
        Slot::DbOffset => (v - 100.0, v + 100.0),
        Slot::G(_) => (0.0, fspan.max(2.0 * v)),
        Slot::Gamma(_) => (1e-6 * fspan, (10.0 * fspan).max(2.0 * v)),
        Slot::Slope(_) => {
            let (a, c) = (0.5 * v, 2.0 * v);
            (a.min(c), a.max(c))
        }
        Slot::Offset(_) => {
            // guess slope is not at hand here; the caller widens by fspan/slope
            (v - bspan, v + bspan)
        }
    }
}

/// Problem in scaled coordinates `x_k = value_k / width_k`.
struct HybridProblem<'a> {
    template: &'a System,
    base: Vec<f64>,
    slots: Vec<Slot>,
    width: Vec<f64>,
    /// κ_out/κ_in held fixed.
    ratio: f64,
    fields: &'a [f64],
    freqs: &'a [f64],
    data: Vec<f64>,
    /// Finite-data columns per row.
    valid: Vec<Vec<u32>>,
    n_valid: usize,
}

impl HybridProblem<'_> {
    fn full(&self, x: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for ((&slot, &xk), &w) in self.slots.iter().zip(x).zip(&self.width) {
            let v = xk * w;
            match slot {
                Slot::Port(false) => {
                    p[1] = v;
                    p[2] = v * self.ratio;
                }
                Slot::Port(true) => {
                    p[2] = v;
                    p[1] = v / self.ratio;
                }
                Slot::OmegaC => p[0] = v,
                Slot::KappaInt => p[3] = v,
                Slot::DbOffset => p[4] = v,
                Slot::G(k) => p[5 + 4 * k] = v,
                Slot::Gamma(k) => p[6 + 4 * k] = v,
                Slot::Slope(k) => p[7 + 4 * k] = v,
                Slot::Offset(k) => p[8 + 4 * k] = v,
            }
        }
        p
    }

    fn scaled(&self, p: &[f64]) -> Vec<f64> {
        self.slots
            .iter()
            .zip(&self.width)
            .map(|(&s, &w)| slot_value(s, p) / w)
            .collect()
    }

    /// Residuals (and Jacobian rows when `jac`) of one field row.
    fn row(&self, p: &[f64], i: usize, jac: bool) -> (Vec<f64>, Vec<f64>) {
        let n_mag = self.template.magnons.len();
        let b = self.fields[i];
        let (wc, ki, ko, kint, db) = (p[0], p[1], p[2], p[3], p[4]);
        let ktot = ki + ko + kint;
        let ln_n = (2.0 * (ki * ko).sqrt()).ln();
        let wm: Vec<f64> = (0..n_mag).map(|k| p[7 + 4 * k] * (b - p[8 + 4 * k])).collect();
        let cols = &self.valid[i];
        let nf = self.freqs.len();
        let nx = self.slots.len();
        let mut r = Vec::with_capacity(cols.len());
        let mut j = Vec::with_capacity(if jac { cols.len() * nx } else { 0 });
        let mut e = vec![Complex::new(0.0, 0.0); n_mag];
        for &jj in cols {
            let jj = jj as usize;
            let f = self.freqs[jj];
            let mut d = Complex::new(-ktot, f - wc);
            for k in 0..n_mag {
                let g = p[5 + 4 * k];
                e[k] = Complex::new(-p[6 + 4 * k], f - wm[k]);
                d += g * g / e[k];
            }
            let nd = d.norm_sqr();
            r.push(C_DB * (ln_n - 0.5 * nd.ln()) + db - self.data[i * nf + jj]);
            if !jac {
                continue;
            }
            // c·Re(D̄·dD)/|D|²
            let dln = |dd: Complex| C_DB * (d.re * dd.re + d.im * dd.im) / nd;
            for (&slot, &w) in self.slots.iter().zip(&self.width) {
                let v = match slot {
                    Slot::OmegaC => -dln(Complex::new(0.0, -1.0)),
                    Slot::Port(false) => C_DB / ki + dln(Complex::new(1.0 + ko / ki, 0.0)),
                    Slot::Port(true) => C_DB / ko + dln(Complex::new(1.0 + ki / ko, 0.0)),
                    Slot::KappaInt => dln(Complex::new(1.0, 0.0)),
                    Slot::DbOffset => 1.0,
                    Slot::G(k) => -dln(2.0 * p[5 + 4 * k] / e[k]),
                    Slot::Gamma(k) => {
                        let g = p[5 + 4 * k];
                        -dln(g * g / (e[k] * e[k]))
                    }
                    Slot::Slope(k) => {
                        let g = p[5 + 4 * k];
                        -dln(Complex::new(0.0, g * g * (b - p[8 + 4 * k])) / (e[k] * e[k]))
                    }
                    Slot::Offset(k) => {
                        let g = p[5 + 4 * k];
                        -dln(Complex::new(0.0, -g * g * p[7 + 4 * k]) / (e[k] * e[k]))
                    }
                };
                j.push(v * w);
            }
        }
        (r, j)
    }
}

impl LeastSquares for HybridProblem<'_> {
    fn n_params(&self) -> usize {
        self.slots.len()
    }

    fn n_residuals(&self) -> usize {
        self.n_valid
    }

    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let p = self.full(x);
        let rows: Vec<Vec<f64>> = (0..self.fields.len())
            .into_par_iter()
            .map(|i| self.row(&p, i, false).0)
            .collect();
        rows.concat()
    }

    fn normal_equations(&self, x: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64) {
        let p = self.full(x);
        accumulate_chunks(self.fields.len(), self.slots.len(), |i| self.row(&p, i, true))
    }
}

type FreeSet = (Vec<String>, Vec<Slot>, Vec<(f64, f64)>);

/// Resolved free set: names, slots, bounds (SI) for a guess and map.
fn resolve(map: &Map, config: &FitConfig, guess: &System) -> Result<FreeSet> {
    let names = config
        .free_parameters
        .clone()
        .unwrap_or_else(|| default_free_parameters(guess));
    if names.is_empty() {
        return Err(Error::FitConfig("no free parameters".into()));
    }
    let base = pack(guess, config.db_offset);
    let mut slots = Vec::with_capacity(names.len());
    for name in &names {
        let s = parse_slot(name, guess)?;
        if slots.contains(&s) {
            return Err(Error::FitConfig(format!("parameter `{name}` listed twice")));
        }
        slots.push(s);
    }
    if slots.contains(&Slot::Port(false)) && slots.contains(&Slot::Port(true)) {
        return Err(Error::FitConfig(
            "kappa_in and kappa_out cannot both float: transmission fixes only their product".into(),
        ));
    }
    if let Some(name) = config.bounds.keys().find(|k| !names.contains(k)) {
        return Err(Error::FitConfig(format!("bounds given for `{name}`, which is not free")));
    }
    let fspan = {
        let f = map.grid().freq_values();
        (f[f.len() - 1] - f[0]).abs()
    };
    let mut bounds = Vec::with_capacity(names.len());
    for (name, &slot) in names.iter().zip(&slots) {
        let v = slot_value(slot, &base);
        let bd = match config.bounds.get(name) {
            Some(&b) => b,
            None => {
                let (mut lo, mut hi) = auto_bounds(slot, v, map);
                if let Slot::Offset(k) = slot {
                    let s = guess.magnons[k].dispersion_slope.abs().max(f64::MIN_POSITIVE);
                    lo -= fspan / s;
                    hi += fspan / s;
                }
                (lo, hi)
            }
        };
        if !(v >= bd.0 && v <= bd.1) {
            return Err(Error::FitConfig(format!(
                "starting value {v} of `{name}` lies outside its bounds ({}, {})",
                bd.0, bd.1
            )));
        }
        bounds.push(bd);
    }
    Ok((names, slots, bounds))
}

fn describe_null(dir: &[(usize, f64)], names: &[String]) -> String {
    let terms: Vec<String> = dir.iter().map(|(i, w)| format!("{w:+.3}·{}", names[*i])).collect();
    format!("null direction {}", terms.join(" "))
}

/// Least-squares fit of `guess` to `map`.
pub fn fit_hybrid(map: &Map, config: &FitConfig, guess: &System) -> Result<FitReport> {
    config.validate()?;
    guess.ensure_valid()?;
    let (names, slots, bounds_si) = resolve(map, config, guess)?;

    let grid = map.grid();
    let db = map.db_values();
    let (nb, nf) = grid.shape();
    let valid: Vec<Vec<u32>> = (0..nb)
        .map(|i| (0..nf).filter(|&j| db[i * nf + j].is_finite()).map(|j| j as u32).collect())
        .collect();
    let n_valid: usize = valid.iter().map(Vec::len).sum();
    if n_valid <= slots.len() {
        return Err(Error::FitConfig(format!(
            "{n_valid} finite cells cannot constrain {} parameters",
            slots.len()
        )));
    }

    let width: Vec<f64> = bounds_si
        .iter()
        .map(|&(lo, hi)| (hi - lo).max(lo.abs().max(hi.abs()) * 1e-12).max(f64::MIN_POSITIVE))
        .collect();
    let base = pack(guess, config.db_offset);
    let problem = HybridProblem {
        template: guess,
        ratio: guess.cavity.kappa_out / guess.cavity.kappa_in,
        base,
        slots,
        width,
        fields: grid.field_values(),
        freqs: grid.freq_values(),
        data: db,
        valid,
        n_valid,
    };
    let bounds: Vec<(f64, f64)> = bounds_si
        .iter()
        .zip(&problem.width)
        .map(|(&(lo, hi), &w)| (lo / w, hi / w))
        .collect();
    let opts = LmOptions {
        max_iterations: config.max_iterations,
        tolerance: config.tolerance,
        ..LmOptions::default()
    };

    let x0 = problem.scaled(&problem.base);
    let mut starts = vec![x0.clone()];
    if config.restarts > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.restarts {
            let x: Vec<f64> = x0
                .iter()
                .zip(&problem.slots)
                .zip(&bounds)
                .map(|((&v, &slot), &(lo, hi))| {
                    let u: f64 = rng.random_range(-1.0..=1.0);
                    let t = match slot {
                        Slot::OmegaC | Slot::Offset(_) | Slot::DbOffset => v + 0.02 * u * (hi - lo),
                        _ => v * (1.0 + 0.2 * u),
                    };
                    t.clamp(lo, hi)
                })
                .collect();
            starts.push(x);
        }
    }

    let mut best: Option<(usize, lm::LmOutcome)> = None;
    for (k, x) in starts.iter().enumerate() {
        let out = match lm::minimize(&problem, x, &bounds, &opts) {
            Ok(o) => o,
            Err(LmError::Degenerate(dir)) => {
                if k == 0 {
                    return Err(Error::Degenerate(describe_null(&dir, &names)));
                }
                continue;
            }
            Err(LmError::NonFinite) => {
                if k == 0 {
                    return Err(Error::FitConfig("model is non-finite at the starting point".into()));
                }
                continue;
            }
        };
        if best.as_ref().is_none_or(|(_, b)| out.ssr < b.ssr) {
            best = Some((k, out));
        }
    }
    let (best_start, out) = best.expect("the unperturbed start always yields an outcome");

    let m = problem.n_valid;
    let cov = if out.converged {
        lm::covariance(&out.jtj, out.ssr, m)
    } else {
        None
    };
    let p = problem.full(&out.x);
    let (fitted, db_offset) = unpack(guess, &p);
    let parameters = names
        .iter()
        .enumerate()
        .map(|(k, name)| FittedParameter {
            name: name.clone(),
            value: slot_value(problem.slots[k], &p),
            uncertainty: cov
                .as_ref()
                .map(|c| c[(k, k)].max(0.0).sqrt() * problem.width[k]),
            lower: bounds_si[k].0,
            upper: bounds_si[k].1,
        })
        .collect();

    Ok(FitReport {
        fitted,
        db_offset,
        residual_rms: (out.ssr / m as f64).sqrt(),
        iterations: out.iterations,
        converged: out.converged,
        termination: out.termination,
        parameters,
        rms_history: out.ssr_history.iter().map(|s| (s / m as f64).sqrt()).collect(),
        config: config.clone(),
        metadata: map.metadata.clone(),
        best_start,
    })
}

/// Root-mean-square dB difference between `system` (+ `db_offset`) and the
/// finite cells of `map`.
pub fn residual_norm(map: &Map, system: &System, db_offset: f64) -> f64 {
    let grid = map.grid();
    let freqs = grid.freq_values();
    let (acc, n) = grid
        .field_values()
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            let mut acc = 0.0;
            let mut n = 0usize;
            for (j, &f) in freqs.iter().enumerate() {
                let y = map.db(i, j);
                if !y.is_finite() {
                    continue;
                }
                let model = crate::transmission::s21_unchecked(system, f, b);
                let r = crate::units::amplitude_db(model.norm()) + db_offset - y;
                acc += r * r;
                n += 1;
            }
            (acc, n)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0usize), |(a, n), (b, m)| (a + b, n + m));
    if n == 0 {
        0.0
    } else {
        (acc / n as f64).sqrt()
    }
}

/// Outcome of comparing a model with one magnon fewer.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelection {
    pub chosen: FitReport,
    pub full: FitReport,
    pub reduced: Option<FitReport>,
    /// Label of the magnon dropped in the reduced hypothesis.
    pub dropped: Option<String>,
}

/// Parsimony rule: fits `guess` and the hypothesis without its weakest
/// magnon (lowest guessed cooperativity) and keeps the full model only when
/// `‖r_reduced‖ − ‖r_full‖` exceeds three times the per-point noise
/// estimate (the full fit's RMS residual).
pub fn select_magnon_model(map: &Map, config: &FitConfig, guess: &System) -> Result<ModelSelection> {
    let full = fit_hybrid(map, config, guess)?;
    let Some(weakest) = guess
        .magnons
        .iter()
        .map(|m| (m.label.clone(), m.g_tilde * m.g_tilde / m.gamma_m))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(l, _)| l)
    else {
        return Ok(ModelSelection {
            chosen: full.clone(),
            full,
            reduced: None,
            dropped: None,
        });
    };
    let mut reduced_guess = guess.clone();
    reduced_guess.magnons.retain(|m| m.label != weakest);
    let mut reduced_config = config.clone();
    let prefix = format!("{weakest}.");
    if let Some(names) = &mut reduced_config.free_parameters {
        names.retain(|n| !n.starts_with(&prefix));
    }
    reduced_config.bounds.retain(|n, _| !n.starts_with(&prefix));
    let reduced = fit_hybrid(map, &reduced_config, &reduced_guess)?;

    let m = map.db_values().iter().filter(|v| v.is_finite()).count() as f64;
    let norm = |r: &FitReport| r.residual_rms * m.sqrt();
    let keep_full = norm(&reduced) - norm(&full) > 3.0 * full.residual_rms;
    Ok(ModelSelection {
        chosen: if keep_full { full.clone() } else { reduced.clone() },
        full,
        reduced: Some(reduced),
        dropped: Some(weakest),
    })
}
