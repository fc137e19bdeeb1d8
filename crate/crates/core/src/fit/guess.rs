//! Starting values for [`fit_hybrid`](super::fit_hybrid) from map structure.
//!
//! 1. The column-wise median over field rows is close to the bare cavity
//!    response, since each magnon trajectory crosses a given frequency in
//!    only a few rows. A Lorentzian fit of that profile gives ω_c, κ_tot and
//!    the transmission level; the port ratio splits the level into κ_in, κ_out.
//! 2. Trajectories are found one at a time. The deviation of the data from
//!    the current model is averaged along straight lines `f = s·(B − b)` of
//!    the known dispersion slope `s`, relative to each row's mean deviation;
//!    the strongest line whose crossing with ω_c lies inside the field range
//!    gives the next offset `b`.
//! 3. g̃ is half the smallest splitting of the two transmission maxima that
//!    bracket `(ω_c + ω_m)/2` near the crossing; when no splitting is
//!    resolved it follows from the dip depth at the crossing,
//!    `g̃²/γ = κ_tot·(1/r − 1)`, taking γ = κ_tot.
//! 4. After each new trajectory, golden-section line searches on a
//!    subsampled map polish ω_c, the port scale, κ_int and every (b, g̃, γ).
//!
//! Detected trajectories are labelled from `expected_modes` in order of
//! increasing offset; leftover labels are reported absent.

use crate::error::{Error, Result};
use crate::fit::bare::fit_bare_cavity;
use crate::fit::hybrid::residual_norm;
use crate::fit::peaks::{axis_at, local_maxima, median, refine_peak};
use crate::{Cavity, Grid, Magnon, Map, SpectrumData, System};

#[derive(Debug, Clone, PartialEq)]
pub struct GuessOptions {
    /// Labels assigned to detected trajectories in order of increasing
    /// crossing field.
    pub expected_modes: Vec<String>,
    /// Hz/T, shared by all trajectories.
    pub dispersion_slope: f64,
    /// κ_out/κ_in used to split the fitted port product.
    pub port_ratio: f64,
    pub cavity_label: String,
    /// Golden-section polish rounds (0 disables).
    pub polish_rounds: usize,
}

impl Default for GuessOptions {
    fn default() -> Self {
        Self {
            expected_modes: vec!["FMR".into(), "MS".into()],
            dispersion_slope: 28e9,
            port_ratio: 1.0,
            cavity_label: "cavity".into(),
            polish_rounds: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialGuess {
    pub system: System,
    pub db_offset: f64,
    /// Per-point noise estimate, dB.
    pub noise_db: f64,
    /// Human-readable notes on under-determined parts of the guess.
    pub warnings: Vec<String>,
    /// Expected modes with no detected trajectory.
    pub absent: Vec<String>,
}

/// Cap on per-cell deviation in the trajectory scan, dB; keeps the
/// anticrossing region from dominating every nearby line.
const DEVIATION_CAP_DB: f64 = 3.0;

pub fn initial_guess(map: &Map, options: &GuessOptions) -> Result<InitialGuess> {
    if !(options.dispersion_slope.is_finite() && options.dispersion_slope > 0.0) {
        return Err(Error::InvalidArgument("dispersion slope must be positive".into()));
    }
    if !(options.port_ratio.is_finite() && options.port_ratio > 0.0) {
        return Err(Error::InvalidArgument("port ratio must be positive".into()));
    }
    let grid = map.grid();
    let fields = grid.field_values();
    let freqs = grid.freq_values();
    let (nb, nf) = grid.shape();
    let db = map.db_values();
    let mut warnings = Vec::new();

    // 1. bare cavity from the column-wise median profile
    let profile: Vec<f64> = (0..nf)
        .map(|j| {
            let col: Vec<f64> = (0..nb).map(|i| db[i * nf + j]).filter(|v| v.is_finite()).collect();
            median(&col).unwrap_or(f64::NEG_INFINITY)
        })
        .collect();
    let bare = fit_bare_cavity(freqs, &profile, Some(options.port_ratio))?;
    // second differences along frequency: var = 6σ² for white noise
    let noise = {
        let d2: Vec<f64> = (0..nb)
            .flat_map(|i| {
                let row = &db[i * nf..(i + 1) * nf];
                row.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).collect::<Vec<_>>()
            })
            .filter(|v| v.is_finite())
            .collect();
        1.4826 * median(&d2).unwrap_or(0.0) / 6f64.sqrt()
    };
    let (kappa_in, kappa_out) = bare.ports().expect("port ratio supplied");
    let mut kappa_int = bare.kappa_tot - kappa_in - kappa_out;
    if kappa_int < 0.0 {
        warnings.push(format!(
            "fitted linewidth {:.6e} Hz is below the port rates implied by the peak level; intrinsic loss set to zero",
            bare.kappa_tot
        ));
        kappa_int = 0.0;
    }
    let omega_c = bare.omega_c;
    let kappa_tot = bare.kappa_tot;
    let mut system = System::bare(Cavity::new(
        options.cavity_label.clone(),
        omega_c,
        kappa_in,
        kappa_out,
        kappa_int,
    ));

    // 2. trajectories, strongest first, each scanned against the model so far
    let s = options.dispersion_slope;
    let (f0, f1) = (freqs[0], freqs[nf - 1]);
    let (b_lo, b_hi) = (fields[0], fields[nb - 1]);
    let df = (f1 - f0) / (nf - 1).max(1) as f64;
    let off_min = b_lo - f1 / s;
    let off_max = b_hi - f0 / s;
    let n_off = (((off_max - off_min) * s / df).ceil() as usize + 1).max(2);
    let offsets: Vec<f64> = (0..n_off)
        .map(|k| off_min + (off_max - off_min) * k as f64 / (n_off - 1) as f64)
        .collect();
    let sub = subsample(map, 101)?;
    let mut found: Vec<f64> = Vec::new();
    for _ in 0..options.expected_modes.len() {
        let model = model_db(&system, grid);
        let dev: Vec<f64> = db
            .iter()
            .zip(&model)
            .map(|(d, m)| {
                let v = (d - m).abs();
                if v.is_finite() {
                    v.min(DEVIATION_CAP_DB)
                } else {
                    DEVIATION_CAP_DB
                }
            })
            .collect();
        let scores = line_scores(&dev, fields, freqs, &offsets, s);
        let med = median(&scores).unwrap_or(0.0);
        let margin = MIN_LINE_SCORE_DB.max(5.0 * noise / (nb as f64).sqrt());
        let exclusion = 4.0 * system.magnons.iter().map(|m| m.g_tilde).fold(kappa_tot, f64::max) / s;
        let best = local_maxima(&scores, margin)
            .into_iter()
            .filter(|&k| scores[k] > med + margin)
            .map(|k| (axis_at(&offsets, refine_peak(&scores, k)), scores[k]))
            .filter(|&(b, _)| {
                let crossing = b + omega_c / s;
                crossing >= b_lo && crossing <= b_hi && found.iter().all(|q| (q - b).abs() > exclusion)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((b, _)) = best else {
            break;
        };
        found.push(b);
        let g = coupling_from_splitting(map, &db, omega_c, s, b, &found[..found.len() - 1], noise)
            .unwrap_or_else(|| coupling_from_depth(map, &db, &model, omega_c, kappa_tot, s, b))
            .max(1e-3 * kappa_tot);
        let label = format!("mode{}", found.len());
        system.magnons.push(Magnon::new(label, g, kappa_tot).with_dispersion(s, b));
        if options.polish_rounds > 0 {
            polish(&sub, &mut system, options.polish_rounds)?;
        }
    }

    system
        .magnons
        .sort_by(|a, b| a.dispersion_offset.total_cmp(&b.dispersion_offset));
    for (m, label) in system.magnons.iter_mut().zip(&options.expected_modes) {
        m.label = label.clone();
    }
    let absent: Vec<String> = options.expected_modes[system.magnons.len()..].to_vec();
    if !absent.is_empty() {
        warnings.push(format!(
            "under-determined: {} trajectories found for {} expected modes; absent: {}",
            system.magnons.len(),
            options.expected_modes.len(),
            absent.join(", ")
        ));
    }
    system.ensure_valid()?;
    Ok(InitialGuess {
        system,
        db_offset: 0.0,
        noise_db: noise,
        warnings,
        absent,
    })
}

/// Floor on a detectable line score, dB.
const MIN_LINE_SCORE_DB: f64 = 0.01;

fn model_db(system: &System, grid: &Grid) -> Vec<f64> {
    let freqs = grid.freq_values();
    grid.field_values()
        .iter()
        .flat_map(|&b| {
            freqs
                .iter()
                .map(move |&f| crate::units::amplitude_db(crate::transmission::s21_unchecked(system, f, b).norm()))
        })
        .collect()
}

/// Mean deviation along `f = s·(B − b)` for every offset `b`, relative to
/// each row's mean deviation.
fn line_scores(dev: &[f64], fields: &[f64], freqs: &[f64], offsets: &[f64], s: f64) -> Vec<f64> {
    let (nb, nf) = (fields.len(), freqs.len());
    let (f0, f1) = (freqs[0], freqs[nf - 1]);
    let df = (f1 - f0) / (nf - 1).max(1) as f64;
    let row_mean: Vec<f64> = (0..nb)
        .map(|i| dev[i * nf..(i + 1) * nf].iter().sum::<f64>() / nf as f64)
        .collect();
    let min_rows = 3.min(nb);
    offsets
        .iter()
        .map(|&b| {
            let mut acc = 0.0;
            let mut n = 0usize;
            for i in 0..nb {
                let f = s * (fields[i] - b);
                if f < f0 || f > f1 {
                    continue;
                }
                acc += axis_at(&dev[i * nf..(i + 1) * nf], (f - f0) / df) - row_mean[i];
                n += 1;
            }
            if n >= min_rows {
                acc / n as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// Half the smallest splitting between the maxima that bracket the
/// midpoint of cavity and magnon near the crossing.
fn coupling_from_splitting(map: &Map, db: &[f64], omega_c: f64, s: f64, b: f64, others: &[f64], noise: f64) -> Option<f64> {
    let grid = map.grid();
    let fields = grid.field_values();
    let freqs = grid.freq_values();
    let nf = freqs.len();
    let half_span = 0.5 * (freqs[nf - 1] - freqs[0]);
    // other trajectories bound the search window
    let sep = others
        .iter()
        .map(|o| 0.5 * s * (o - b).abs())
        .fold(half_span, f64::min);
    let crossing = b + omega_c / s;
    let prominence = (5.0 * noise).max(0.5);
    let mut best: Option<f64> = None;
    for (i, &bf) in fields.iter().enumerate() {
        if (bf - crossing).abs() * s > sep {
            continue;
        }
        let wm = s * (bf - b);
        let mid = 0.5 * (omega_c + wm);
        let row = &db[i * nf..(i + 1) * nf];
        let peaks: Vec<f64> = local_maxima(row, prominence)
            .into_iter()
            .map(|j| axis_at(freqs, refine_peak(row, j)))
            .filter(|f| (f - mid).abs() <= sep)
            .collect();
        let below = peaks.iter().copied().filter(|&f| f < mid).fold(f64::NAN, f64::max);
        let above = peaks.iter().copied().filter(|&f| f > mid).fold(f64::NAN, f64::min);
        if below.is_finite() && above.is_finite() {
            let gap = above - below;
            best = Some(best.map_or(gap, |g: f64| g.min(gap)));
        }
    }
    best.map(|gap| 0.5 * gap)
}

/// Coupling from the transmission drop at the crossing point relative to
/// `model`, averaged over the neighbouring cells.
fn coupling_from_depth(map: &Map, db: &[f64], model: &[f64], omega_c: f64, kappa_tot: f64, s: f64, b: f64) -> f64 {
    let grid = map.grid();
    let fields = grid.field_values();
    let freqs = grid.freq_values();
    let nf = freqs.len();
    let crossing = b + omega_c / s;
    let nearest = |axis: &[f64], v: f64| {
        axis.iter()
            .enumerate()
            .min_by(|x, y| (x.1 - v).abs().total_cmp(&(y.1 - v).abs()))
            .map(|(k, _)| k)
            .unwrap()
    };
    let (ic, jc) = (nearest(fields, crossing), nearest(freqs, omega_c));
    let mut acc = 0.0;
    let mut n = 0;
    for i in ic.saturating_sub(1)..=(ic + 1).min(fields.len() - 1) {
        for j in jc.saturating_sub(1)..=(jc + 1).min(nf - 1) {
            let d = db[i * nf + j] - model[i * nf + j];
            if d.is_finite() {
                acc += d;
                n += 1;
            }
        }
    }
    let drop = if n > 0 { (acc / n as f64).min(0.0) } else { 0.0 };
    let r = 10f64.powf(drop / 20.0);
    // g²/γ = κ(1/r − 1) with γ = κ
    kappa_tot * (1.0 / r - 1.0).max(0.0).sqrt()
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden(mut a: f64, mut b: f64, f: &mut dyn FnMut(f64) -> f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..24 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

fn subsample(map: &Map, max_points: usize) -> Result<Map> {
    let grid = map.grid();
    let (nb, nf) = grid.shape();
    let si = nb.div_ceil(max_points).max(1);
    let sj = nf.div_ceil(max_points).max(1);
    if si == 1 && sj == 1 {
        return Ok(map.to_db_map());
    }
    let rows: Vec<usize> = (0..nb).step_by(si).collect();
    let cols: Vec<usize> = (0..nf).step_by(sj).collect();
    let sub = Grid::new(
        rows.iter().map(|&i| grid.field_values()[i]).collect(),
        cols.iter().map(|&j| grid.freq_values()[j]).collect(),
    )?;
    let data = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| map.db(i, j)))
        .collect();
    Map::new(sub, SpectrumData::MagnitudeDb(data))
}

fn polish(sub: &Map, system: &mut System, rounds: usize) -> Result<()> {
    let kappa = system.kappa_tot();
    for _ in 0..rounds {
        {
            let v = system.cavity.omega_c;
            let mut trial = system.clone();
            system.cavity.omega_c = golden(v - kappa, v + kappa, &mut |x| {
                trial.cavity.omega_c = x;
                residual_norm(sub, &trial, 0.0)
            });
        }
        {
            let v = system.cavity.kappa_in.ln();
            let ratio = system.cavity.kappa_out / system.cavity.kappa_in;
            let mut trial = system.clone();
            let k = golden(v - 2f64.ln(), v + 2f64.ln(), &mut |x| {
                trial.cavity.kappa_in = x.exp();
                trial.cavity.kappa_out = x.exp() * ratio;
                residual_norm(sub, &trial, 0.0)
            })
            .exp();
            system.cavity.kappa_in = k;
            system.cavity.kappa_out = k * ratio;
        }
        {
            let v = system.cavity.kappa_int.max(0.1 * kappa);
            let mut trial = system.clone();
            system.cavity.kappa_int = golden(0.0, 3.0 * v, &mut |x| {
                trial.cavity.kappa_int = x;
                residual_norm(sub, &trial, 0.0)
            });
        }
        for k in 0..system.magnons.len() {
            let s = system.magnons[k].dispersion_slope;
            let v = system.magnons[k].dispersion_offset;
            let kappa = system.kappa_tot();
            let mut trial = system.clone();
            system.magnons[k].dispersion_offset = golden(v - 2.0 * kappa / s, v + 2.0 * kappa / s, &mut |x| {
                trial.magnons[k].dispersion_offset = x;
                residual_norm(sub, &trial, 0.0)
            });

            let v = system.magnons[k].g_tilde.ln();
            let mut trial = system.clone();
            system.magnons[k].g_tilde = golden(v - 2f64.ln(), v + 2f64.ln(), &mut |x| {
                trial.magnons[k].g_tilde = x.exp();
                residual_norm(sub, &trial, 0.0)
            })
            .exp();

            let v = system.magnons[k].gamma_m.ln();
            let mut trial = system.clone();
            system.magnons[k].gamma_m = golden(v - 10f64.ln(), v + 10f64.ln(), &mut |x| {
                trial.magnons[k].gamma_m = x.exp();
                residual_norm(sub, &trial, 0.0)
            })
            .exp();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let x = golden(0.0, 10.0, &mut |x| (x - 3.7).powi(2));
        assert!((x - 3.7).abs() < 1e-3);
    }
}
