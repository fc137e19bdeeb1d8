//! Domain types shared by every other module.
//!
//! Every rate and frequency is stored as an ordinary frequency in Hz (the
//! "divided by 2π" value). Formulas written in angular frequency go through
//! [`units::to_angular`] / [`units::from_angular`] and nowhere else.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Scalar};

pub mod units {
    use crate::scalar::Scalar;

    /// Hz → rad/s.
    #[inline]
    pub fn to_angular<T: Scalar>(freq: T) -> T {
        freq * T::TAU()
    }

    /// rad/s → Hz.
    #[inline]
    pub fn from_angular<T: Scalar>(omega: T) -> T {
        omega / T::TAU()
    }

    /// Power in dBm → watts.
    #[inline]
    pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
        let ten = T::from_f64(10.0).unwrap();
        ten.powf(dbm / ten) * T::from_f64(1e-3).unwrap()
    }

    /// Amplitude ratio → dB (20·log₁₀).
    #[inline]
    pub fn amplitude_db<T: Scalar>(amplitude: T) -> T {
        T::from_f64(20.0).unwrap() * amplitude.log10()
    }

    /// dB → amplitude ratio.
    #[inline]
    pub fn db_amplitude<T: Scalar>(db: T) -> T {
        T::from_f64(10.0).unwrap().powf(db / T::from_f64(20.0).unwrap())
    }
}

/// Physical constants in SI units. `gamma_e` is the ordinary-frequency
/// gyromagnetic ratio (Hz/T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    pub h_bar: T,
    pub k_b: T,
    pub mu_0: T,
    pub epsilon_0: T,
    pub mu_b: T,
    pub gamma_e: T,
    pub spin_per_ion: T,
    pub lambda_ex: T,
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            h_bar: lit(1.054_571_817e-34),
            k_b: lit(1.380_649e-23),
            mu_0: lit(1.256_637_062_12e-6),
            epsilon_0: lit(8.854_187_812_8e-12),
            mu_b: lit(9.274_010_078_3e-24),
            gamma_e: lit(28.0e9),
            spin_per_ion: lit(2.5),
            lambda_ex: lit(3e-16),
        }
    }
}

impl<T: Scalar> PhysicalConstants<T> {
    /// Full Planck constant, J·s.
    pub fn planck(&self) -> T {
        self.h_bar * T::TAU()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let named = [
            ("h_bar", self.h_bar),
            ("k_b", self.k_b),
            ("mu_0", self.mu_0),
            ("epsilon_0", self.epsilon_0),
            ("mu_b", self.mu_b),
            ("gamma_e", self.gamma_e),
            ("spin_per_ion", self.spin_per_ion),
            ("lambda_ex", self.lambda_ex),
        ];
        named
            .iter()
            .filter(|(_, v)| !(v.is_finite() && *v > T::zero()))
            .map(|(name, _)| Violation::new(format!("constants.{name}"), "must be finite and > 0"))
            .collect()
    }
}

/// One cavity resonance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityMode<T> {
    pub label: String,
    /// Resonance frequency, Hz.
    pub omega_c: T,
    pub kappa_in: T,
    pub kappa_out: T,
    pub kappa_int: T,
}

impl<T: Scalar> CavityMode<T> {
    pub fn new(label: impl Into<String>, omega_c: T, kappa_in: T, kappa_out: T, kappa_int: T) -> Self {
        Self {
            label: label.into(),
            omega_c,
            kappa_in,
            kappa_out,
            kappa_int,
        }
    }

    /// κ_tot = κ_in + κ_out + κ_int. Never stored.
    #[inline]
    pub fn kappa_tot(&self) -> T {
        self.kappa_in + self.kappa_out + self.kappa_int
    }
}

/// One collective spin mode with affine dispersion
/// `ω_m(B) = dispersion_slope · (B − dispersion_offset)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnonMode<T> {
    pub label: String,
    /// Collective coupling g̃, Hz.
    pub g_tilde: T,
    /// Damping rate, Hz.
    pub gamma_m: T,
    /// Hz/T.
    pub dispersion_slope: T,
    /// T.
    pub dispersion_offset: T,
    pub total_spin: Option<T>,
}

impl<T: Scalar> MagnonMode<T> {
    /// Mode with the default dispersion (slope γ_e, zero offset).
    pub fn new(label: impl Into<String>, g_tilde: T, gamma_m: T) -> Self {
        Self {
            label: label.into(),
            g_tilde,
            gamma_m,
            dispersion_slope: PhysicalConstants::<T>::default().gamma_e,
            dispersion_offset: T::zero(),
            total_spin: None,
        }
    }

    pub fn with_dispersion(mut self, slope: T, offset: T) -> Self {
        self.dispersion_slope = slope;
        self.dispersion_offset = offset;
        self
    }

    /// Unchecked affine dispersion; see [`crate::physics::magnon_frequency`]
    /// for the checked variant.
    #[inline]
    pub fn frequency(&self, field: T) -> T {
        self.dispersion_slope * (field - self.dispersion_offset)
    }

    /// Field at which `ω_m(B) = freq`.
    #[inline]
    pub fn resonant_field(&self, freq: T) -> T {
        freq / self.dispersion_slope + self.dispersion_offset
    }
}

/// One cavity mode plus the magnon modes it couples to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridSystem<T> {
    pub cavity: CavityMode<T>,
    pub magnons: Vec<MagnonMode<T>>,
}

impl<T: Scalar> HybridSystem<T> {
    pub fn new(cavity: CavityMode<T>, magnons: Vec<MagnonMode<T>>) -> Self {
        Self { cavity, magnons }
    }

    pub fn bare(cavity: CavityMode<T>) -> Self {
        Self {
            cavity,
            magnons: Vec::new(),
        }
    }

    pub fn kappa_tot(&self) -> T {
        self.cavity.kappa_tot()
    }

    pub fn magnon_index(&self, label: &str) -> Option<usize> {
        self.magnons.iter().position(|m| m.label == label)
    }

    pub fn magnon(&self, label: &str) -> Option<&MagnonMode<T>> {
        self.magnons.iter().find(|m| m.label == label)
    }

    /// Number of coupled modes (cavity included).
    pub fn dim(&self) -> usize {
        1 + self.magnons.len()
    }

    /// Copy with the named magnon's damping multiplied by `factor`.
    pub fn with_scaled_damping(&self, label: &str, factor: T) -> Result<Self> {
        let idx = self
            .magnon_index(label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))?;
        let mut out = self.clone();
        out.magnons[idx].gamma_m = out.magnons[idx].gamma_m * factor;
        Ok(out)
    }

    /// Errors with every violation joined when the system is invalid.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_system(self);
        if violations.is_empty() {
            Ok(())
        } else {
            let joined: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidSystem(joined.join("; ")))
        }
    }

    /// Magnon frequencies must be non-negative at every field of a sweep.
    pub fn ensure_valid_on(&self, fields: &[T]) -> Result<()> {
        self.ensure_valid()?;
        for m in &self.magnons {
            for &b in fields {
                if m.frequency(b) < T::zero() {
                    return Err(Error::InvalidSystem(format!(
                        "magnons[{}].dispersion: negative frequency at field {} T (offset {} T)",
                        m.label,
                        wide(b),
                        wide(m.dispersion_offset)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A single broken invariant: which field, which rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Lists every broken invariant of `system`; empty when valid.
pub fn validate_system<T: Scalar>(system: &HybridSystem<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let c = &system.cavity;
    if !(c.omega_c.is_finite() && c.omega_c > T::zero()) {
        out.push(Violation::new("cavity.omega_c", "must be finite and > 0"));
    }
    for (name, v) in [
        ("kappa_in", c.kappa_in),
        ("kappa_out", c.kappa_out),
        ("kappa_int", c.kappa_int),
    ] {
        if !(v.is_finite() && v >= T::zero()) {
            out.push(Violation::new(format!("cavity.{name}"), "must be finite and >= 0"));
        }
    }

    let mut seen = BTreeSet::new();
    for (i, m) in system.magnons.iter().enumerate() {
        let at = |field: &str| format!("magnons[{i}].{field}");
        if !seen.insert(m.label.as_str()) {
            out.push(Violation::new(
                at("label"),
                format!("label `{}` is not unique", m.label),
            ));
        }
        if !(m.g_tilde.is_finite() && m.g_tilde >= T::zero()) {
            out.push(Violation::new(at("g_tilde"), "must be finite and >= 0"));
        }
        if !(m.gamma_m.is_finite() && m.gamma_m > T::zero()) {
            out.push(Violation::new(at("gamma_m"), "must be finite and > 0"));
        }
        if !(m.dispersion_slope.is_finite() && m.dispersion_slope > T::zero()) {
            out.push(Violation::new(at("dispersion_slope"), "must be finite and > 0"));
        }
        if !m.dispersion_offset.is_finite() {
            out.push(Violation::new(at("dispersion_offset"), "must be finite"));
        }
        if let Some(s) = m.total_spin {
            if !(s.is_finite() && s > T::zero()) {
                out.push(Violation::new(at("total_spin"), "must be finite and > 0"));
            }
        }
    }
    out
}

/// Axes of a 2-D sweep: static field (T) × probe frequency (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    field_values: Vec<T>,
    freq_values: Vec<T>,
}

impl<T: Scalar> SweepGrid<T> {
    pub fn new(field_values: Vec<T>, freq_values: Vec<T>) -> Result<Self> {
        check_axis("field_values", &field_values)?;
        check_axis("freq_values", &freq_values)?;
        Ok(Self {
            field_values,
            freq_values,
        })
    }

    /// Evenly spaced grid including both endpoints.
    pub fn linspace(field: (T, T, usize), freq: (T, T, usize)) -> Result<Self> {
        Self::new(linspace(field.0, field.1, field.2), linspace(freq.0, freq.1, freq.2))
    }

    pub fn field_values(&self) -> &[T] {
        &self.field_values
    }

    pub fn freq_values(&self) -> &[T] {
        &self.freq_values
    }

    /// (fields, frequencies).
    pub fn shape(&self) -> (usize, usize) {
        (self.field_values.len(), self.freq_values.len())
    }

    pub fn len(&self) -> usize {
        self.field_values.len() * self.freq_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_axis<T: Scalar>(name: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} is empty")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name}[{i}] is not finite")));
    }
    if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "{name} not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace<T: Scalar>(start: T, stop: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / lit::<T>((n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        start + step * lit::<T>(i as f64)
                    }
                })
                .collect()
        }
    }
}

/// Row-major cell values of a [`SpectrumMap`].
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumData<T> {
    Complex(Vec<Complex<T>>),
    /// Magnitude-only data such as a VNA dB export.
    MagnitudeDb(Vec<T>),
}

/// 2-D transmission map; row = field index, column = frequency index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMap<T> {
    grid: SweepGrid<T>,
    data: SpectrumData<T>,
    pub metadata: BTreeMap<String, String>,
}

impl<T: Scalar> SpectrumMap<T> {
    pub fn new(grid: SweepGrid<T>, data: SpectrumData<T>) -> Result<Self> {
        let n = match &data {
            SpectrumData::Complex(v) => {
                if let Some(i) = v.iter().position(|z| !z.norm().is_finite()) {
                    return Err(Error::InvalidGrid(format!("cell {i} has non-finite magnitude")));
                }
                v.len()
            }
            SpectrumData::MagnitudeDb(v) => {
                if let Some(i) = v.iter().position(|x| x.is_nan() || *x == T::infinity()) {
                    return Err(Error::InvalidGrid(format!("cell {i} has non-finite magnitude")));
                }
                v.len()
            }
        };
        if n != grid.len() {
            let (r, c) = grid.shape();
            return Err(Error::InvalidGrid(format!(
                "expected {r}x{c} = {} values, got {n}",
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            data,
            metadata: BTreeMap::new(),
        })
    }

    pub fn grid(&self) -> &SweepGrid<T> {
        &self.grid
    }

    pub fn data(&self) -> &SpectrumData<T> {
        &self.data
    }

    pub fn shape(&self) -> (usize, usize) {
        self.grid.shape()
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.data, SpectrumData::Complex(_))
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.grid.freq_values.len() + j
    }

    pub fn complex(&self, i: usize, j: usize) -> Option<Complex<T>> {
        match &self.data {
            SpectrumData::Complex(v) => Some(v[self.index(i, j)]),
            SpectrumData::MagnitudeDb(_) => None,
        }
    }

    /// 20·log₁₀|S₂₁| of one cell.
    pub fn db(&self, i: usize, j: usize) -> T {
        let k = self.index(i, j);
        match &self.data {
            SpectrumData::Complex(v) => units::amplitude_db(v[k].norm()),
            SpectrumData::MagnitudeDb(v) => v[k],
        }
    }

    pub fn db_values(&self) -> Vec<T> {
        match &self.data {
            SpectrumData::Complex(v) => v.iter().map(|z| units::amplitude_db(z.norm())).collect(),
            SpectrumData::MagnitudeDb(v) => v.clone(),
        }
    }

    pub fn row_db(&self, i: usize) -> Vec<T> {
        (0..self.grid.freq_values.len()).map(|j| self.db(i, j)).collect()
    }

    /// Magnitude-only copy.
    pub fn to_db_map(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            data: SpectrumData::MagnitudeDb(self.db_values()),
            metadata: self.metadata.clone(),
        }
    }

    /// Sub-map restricted to fields in `field_range` and frequencies in
    /// `freq_range` (both inclusive).
    pub fn window(&self, field_range: (T, T), freq_range: (T, T)) -> Result<Self> {
        let rows: Vec<usize> = (0..self.grid.field_values.len())
            .filter(|&i| {
                let b = self.grid.field_values[i];
                b >= field_range.0 && b <= field_range.1
            })
            .collect();
        let cols: Vec<usize> = (0..self.grid.freq_values.len())
            .filter(|&j| {
                let f = self.grid.freq_values[j];
                f >= freq_range.0 && f <= freq_range.1
            })
            .collect();
        let grid = SweepGrid::new(
            rows.iter().map(|&i| self.grid.field_values[i]).collect(),
            cols.iter().map(|&j| self.grid.freq_values[j]).collect(),
        )?;
        let data = match &self.data {
            SpectrumData::Complex(v) => SpectrumData::Complex(
                rows.iter()
                    .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| v[self.index(i, j)])
                    .collect(),
            ),
            SpectrumData::MagnitudeDb(v) => SpectrumData::MagnitudeDb(
                rows.iter()
                    .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| v[self.index(i, j)])
                    .collect(),
            ),
        };
        let mut out = Self::new(grid, data)?;
        out.metadata = self.metadata.clone();
        Ok(out)
    }
}
