mod common;

use common::*;
use magpol::fit::peaks::{crossing_splitting, peak_frequencies};
use magpol::transmission::{damping_sweep, spectrum_map};
use magpol::Grid;

/// Rows count as far from the MS crossing when the MS mode's own dispersive
/// pull on the cavity, g̃²/|Δ|, is below a tenth of κ_tot.
#[test]
fn fmr_peaks_unchanged_far_from_ms_crossing() {
    let cfg = room_te102_ms(3);
    let sys = &cfg.system;
    let wc = sys.cavity.omega_c;
    let kappa = sys.kappa_tot();
    let fmr_field = sys.magnons[0].resonant_field(wc);
    let grid = Grid::linspace((fmr_field - 6e-3, fmr_field + 1.5e-3, 151), (wc - 150.0 * MHZ, wc + 150.0 * MHZ, 1201)).unwrap();
    let maps = damping_sweep(sys, "MS", &[1.0, 10.0, 100.0], &grid).unwrap();
    let ms = &sys.magnons[1];
    let far = ms.g_tilde * ms.g_tilde / (0.1 * kappa);
    let fields = grid.field_values();
    let freqs = grid.freq_values();
    let mut compared = 0;
    for (i, &b) in fields.iter().enumerate() {
        if (ms.frequency(b) - wc).abs() < far {
            continue;
        }
        // the MS line itself is what the sweep changes; compare the rest
        let keep = |f: &f64| (f - ms.frequency(b)).abs() > 4.0 * ms.g_tilde;
        let reference: Vec<f64> = peak_frequencies(freqs, &maps[0].row_db(i), 0.5).into_iter().filter(keep).collect();
        assert!(!reference.is_empty());
        for map in &maps[1..] {
            let peaks = peak_frequencies(freqs, &map.row_db(i), 0.5);
            for p in &reference {
                let shift = peaks.iter().map(|q| (q - p).abs()).fold(f64::INFINITY, f64::min);
                assert!(shift < 0.1 * kappa, "B={b}: shift {shift} at {p}");
                compared += 1;
            }
        }
    }
    assert!(compared > 50, "{compared}");
}

#[test]
fn sweep_resolves_then_hides_ms_crossing() {
    let cfg = room_te102_ms(201);
    let sys = &cfg.system;
    let kappa = sys.kappa_tot();
    let splits: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&k| {
            let scaled = sys.with_scaled_damping("MS", k).unwrap();
            let map = spectrum_map(&scaled, &cfg.grid).unwrap();
            crossing_splitting(&map, &scaled, "MS", 0.5).unwrap()
        })
        .collect();
    assert!(rel(splits[0], 2.0 * 8.3 * MHZ) < 0.15, "{splits:?}");
    assert!(splits[2] < kappa, "{splits:?}");
}

#[test]
fn sweep_maps_are_distinct_and_labelled() {
    let cfg = room_te102_ms(21);
    let maps = damping_sweep(&cfg.system, "MS", &[1.0, 100.0], &cfg.grid).unwrap();
    assert_ne!(maps[0].db_values(), maps[1].db_values());
    assert_eq!(maps[1].metadata["damping_multiplier.MS"], "100");
    assert!(damping_sweep(&cfg.system, "MS", &[0.0], &cfg.grid).is_err());
}
