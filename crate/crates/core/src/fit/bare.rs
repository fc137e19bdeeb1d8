//! Lorentzian fit of a single bare-cavity transmission trace.
//!
//! With no magnons, `|S21|² = 4·κ_in·κ_out / ((f − ω_c)² + κ_tot²)`, so in dB
//! `model = L − 10·log₁₀((f − ω_c)² + κ_tot²)` with `L = 20·log₁₀(2√(κ_in·κ_out))`.
//! κ_tot is the half-width at half-maximum of the power response.

use std::f64::consts::LN_10;

use nalgebra::{DMatrix, DVector};

use super::lm::{accumulate_chunks, minimize, LeastSquares, LmOptions};
use super::peaks::median;
use crate::error::{Error, Result};
use crate::Cavity;

/// Minimum peak-to-floor contrast, dB, for a trace to count as resonant.
pub const MIN_CONTRAST_DB: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BareCavityFit {
    pub omega_c: f64,
    pub kappa_tot: f64,
    /// κ_in·κ_out, Hz². Only the product is constrained by a magnitude trace.
    pub port_product: f64,
    /// κ_out/κ_in when supplied; `None` marks the split as unresolved.
    pub port_ratio: Option<f64>,
    pub residual_rms: f64,
    pub converged: bool,
}

impl BareCavityFit {
    /// `(κ_in, κ_out)` when the port ratio is known.
    pub fn ports(&self) -> Option<(f64, f64)> {
        let rho = self.port_ratio?;
        let k_in = (self.port_product / rho).sqrt();
        Some((k_in, rho * k_in))
    }

    /// Full cavity description; needs the port ratio and a non-negative
    /// intrinsic loss.
    pub fn cavity(&self, label: &str) -> Option<Cavity> {
        let (k_in, k_out) = self.ports()?;
        let k_int = self.kappa_tot - k_in - k_out;
        (k_int >= 0.0).then(|| Cavity::new(label, self.omega_c, k_in, k_out, k_int))
    }

    /// Peak transmission `2√(κ_in·κ_out)/κ_tot`.
    pub fn peak_amplitude(&self) -> f64 {
        2.0 * self.port_product.sqrt() / self.kappa_tot
    }

    /// Model trace in dB at `f`.
    pub fn model_db(&self, f: f64) -> f64 {
        lorentzian_db(&[self.omega_c, self.kappa_tot, level_db(self.port_product)], f)
    }
}

fn level_db(port_product: f64) -> f64 {
    20.0 * (2.0 * port_product.sqrt()).log10()
}

#[inline]
fn lorentzian_db(x: &[f64], f: f64) -> f64 {
    let d = f - x[0];
    x[2] - 10.0 * (d * d + x[1] * x[1]).log10()
}

struct Lorentzian<'a> {
    freqs: &'a [f64],
    db: &'a [f64],
}

const CHUNK: usize = 256;

impl LeastSquares for Lorentzian<'_> {
    fn n_params(&self) -> usize {
        3
    }

    fn n_residuals(&self) -> usize {
        self.freqs.len()
    }

    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.freqs
            .iter()
            .zip(self.db)
            .map(|(&f, &y)| lorentzian_db(x, f) - y)
            .collect()
    }

    fn normal_equations(&self, x: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64) {
        let n = self.freqs.len();
        accumulate_chunks(n.div_ceil(CHUNK), 3, |c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(n);
            let mut r = Vec::with_capacity(range.len());
            let mut j = Vec::with_capacity(3 * range.len());
            for k in range {
                let f = self.freqs[k];
                let d = f - x[0];
                let den = d * d + x[1] * x[1];
                r.push(x[2] - 10.0 * den.log10() - self.db[k]);
                let s = 10.0 / LN_10 / den;
                j.extend_from_slice(&[s * 2.0 * d, -s * 2.0 * x[1], 1.0]);
            }
            (r, j)
        })
    }
}

/// Fits ω_c, κ_tot and κ_in·κ_out to a single-field trace.
pub fn fit_bare_cavity(freqs: &[f64], db: &[f64], port_ratio: Option<f64>) -> Result<BareCavityFit> {
    if freqs.len() != db.len() {
        return Err(Error::InvalidArgument("frequency and dB traces differ in length".into()));
    }
    if freqs.len() < 7 {
        return Err(Error::InvalidArgument("trace needs at least 7 points".into()));
    }
    if let Some(r) = port_ratio {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument("port ratio must be positive".into()));
        }
    }
    let n = freqs.len();
    let (imax, &peak) = db
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::NoResonance("empty trace".into()))?;
    let floor = median(db).unwrap_or(peak);
    if peak - floor < MIN_CONTRAST_DB {
        return Err(Error::NoResonance(format!(
            "peak stands only {:.3} dB above the trace median",
            peak - floor
        )));
    }
    if imax == 0 || imax == n - 1 {
        return Err(Error::NoResonance("maximum sits at the trace endpoint".into()));
    }

    // −3 dB crossings for the half-width seed
    let half = peak - 10.0 * 2f64.log10();
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imax;
        for k in range {
            if db[k] <= half {
                let t = (db[prev] - half) / (db[prev] - db[k]);
                return Some(freqs[prev] + (freqs[k] - freqs[prev]) * t);
            }
            prev = k;
        }
        None
    };
    let lo = cross(&mut (0..imax).rev());
    let hi = cross(&mut (imax + 1..n));
    let span = freqs[n - 1] - freqs[0];
    let kappa0 = match (lo, hi) {
        (Some(l), Some(h)) => 0.5 * (h - l),
        (Some(l), None) => freqs[imax] - l,
        (None, Some(h)) => h - freqs[imax],
        (None, None) => 0.25 * span,
    }
    .max(span * 1e-6);
    let x0 = [freqs[imax], kappa0, peak + 20.0 * kappa0.log10()];
    let bounds = [
        (freqs[0], freqs[n - 1]),
        (span * 1e-9, 10.0 * span),
        (x0[2] - 200.0, x0[2] + 200.0),
    ];

    let problem = Lorentzian { freqs, db };
    let opts = LmOptions {
        tolerance: 1e-14,
        ..LmOptions::default()
    };
    let out = minimize(&problem, &x0, &bounds, &opts).map_err(|e| Error::Degenerate(format!("{e:?}")))?;
    let amp = 10f64.powf(out.x[2] / 20.0) / 2.0;
    Ok(BareCavityFit {
        omega_c: out.x[0],
        kappa_tot: out.x[1],
        port_product: amp * amp,
        port_ratio,
        residual_rms: (out.ssr / n as f64).sqrt(),
        converged: out.converged,
    })
}
