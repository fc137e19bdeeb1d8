//! Peak picking on single frequency traces.

use crate::error::{Error, Result};
use crate::{Map, System};

/// Indices of local maxima whose topographic prominence is at least
/// `min_prominence`, in ascending index order. Plateaus report their first
/// sample. Endpoints are never maxima.
pub fn local_maxima(values: &[f64], min_prominence: f64) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            // walk across a plateau
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] && prominence(values, i, j) >= min_prominence {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(values: &[f64], start: usize, end: usize) -> f64 {
    let peak = values[start];
    let mut left_min = peak;
    for k in (0..start).rev() {
        if values[k] > peak {
            break;
        }
        left_min = left_min.min(values[k]);
    }
    let mut right_min = peak;
    for &v in &values[end + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

/// Sub-sample position of a maximum from the parabola through its two
/// neighbours, returned as a fractional index.
pub fn refine_peak(values: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= values.len() {
        return i as f64;
    }
    let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return i as f64;
    }
    i as f64 + 0.5 * (a - c) / denom
}

/// Linear interpolation of an axis at a fractional index.
pub fn axis_at(axis: &[f64], pos: f64) -> f64 {
    let lo = (pos.floor().max(0.0) as usize).min(axis.len() - 1);
    let hi = (lo + 1).min(axis.len() - 1);
    let t = pos - lo as f64;
    axis[lo] + (axis[hi] - axis[lo]) * t
}

/// Peak frequencies (refined) with prominence ≥ `min_prominence` dB.
pub fn peak_frequencies(freqs: &[f64], db: &[f64], min_prominence: f64) -> Vec<f64> {
    local_maxima(db, min_prominence)
        .into_iter()
        .map(|i| axis_at(freqs, refine_peak(db, i)))
        .collect()
}

/// Splitting between the two strongest peaks within `center ± half_window`;
/// 0 when fewer than two peaks are resolved there.
pub fn peak_splitting(freqs: &[f64], db: &[f64], center: f64, half_window: f64, min_prominence: f64) -> f64 {
    let mut peaks: Vec<(f64, f64)> = local_maxima(db, min_prominence)
        .into_iter()
        .map(|i| (axis_at(freqs, refine_peak(db, i)), db[i]))
        .filter(|(f, _)| (f - center).abs() <= half_window)
        .collect();
    if peaks.len() < 2 {
        return 0.0;
    }
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    (peaks[0].0 - peaks[1].0).abs()
}

/// Peak splitting of a map at the field where `label` is resonant with the
/// cavity: the row nearest that field, peaks within ±max(3·g̃, 3·κ_tot) of
/// ω_c, capped at half the frequency distance to any other magnon line.
/// Returns 0 when the crossing is not resolved.
pub fn crossing_splitting(map: &Map, system: &System, label: &str, min_prominence: f64) -> Result<f64> {
    let mode = system.magnon(label).ok_or_else(|| Error::UnknownMode(label.to_string()))?;
    let wc = system.cavity.omega_c;
    let field = mode.resonant_field(wc);
    let grid = map.grid();
    let fields = grid.field_values();
    let i = (0..fields.len())
        .min_by(|&a, &b| (fields[a] - field).abs().total_cmp(&(fields[b] - field).abs()))
        .ok_or_else(|| Error::InvalidArgument("empty map".into()))?;
    let mut half_window = (3.0 * mode.g_tilde).max(3.0 * system.kappa_tot());
    for other in system.magnons.iter().filter(|m| m.label != label) {
        half_window = half_window.min(0.5 * (other.frequency(fields[i]) - wc).abs());
    }
    Ok(peak_splitting(grid.freq_values(), &map.row_db(i), wc, half_window, min_prominence))
}

/// Median of a slice (NaN-free), `None` when empty.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}
