mod common;

use common::*;
use magpol::fit::{
    fit_bare_cavity, fit_hybrid, initial_guess, residual_norm, select_magnon_model, FitConfig, FitReport,
};
use magpol::transmission::spectrum_map;
use magpol::{Cavity, Error, Grid, Map, System};

fn guess_and_fit(map: &Map, cfg: &Config, seed: u64) -> FitReport {
    let guess = initial_guess(map, &cfg.guess_options()).unwrap();
    let config = FitConfig {
        seed,
        db_offset: guess.db_offset,
        ..FitConfig::default()
    };
    fit_hybrid(map, &config, &guess.system).unwrap()
}

#[test]
fn bare_cavity_survives_noise() {
    let cav = Cavity::new("TE101", 8.855e9, 0.19 * MHZ, 0.20 * MHZ, 0.71 * MHZ);
    let grid = Grid::linspace((0.0, 0.0, 1), (8.845e9, 8.865e9, 401)).unwrap();
    let clean = spectrum_map(&System::bare(cav.clone()), &grid).unwrap();
    let freqs = grid.freq_values();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let db = noisy(&clean, 0.1, seed).db_values();
        let fit = fit_bare_cavity(freqs, &db, Some(cav.kappa_out / cav.kappa_in)).unwrap();
        worst = worst.max((fit.omega_c - cav.omega_c).abs() / cav.kappa_tot());
        worst = worst.max(rel(fit.kappa_tot, cav.kappa_tot()));
        let (ki, ko) = fit.ports().unwrap();
        worst = worst.max(rel(ki, cav.kappa_in)).max(rel(ko, cav.kappa_out));
    }
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn initial_guess_is_close_enough() {
    for cfg in [cryo_te101(101), cryo_te102(101), room_te102_ms(101)] {
        let map = cfg.map().to_db_map();
        let guess = initial_guess(&map, &cfg.guess_options()).unwrap();
        assert!(guess.absent.is_empty(), "{}: {:?}", cfg.name, guess.absent);
        let (s, t) = (&guess.system, &cfg.system);
        assert!(rel(s.cavity.omega_c, t.cavity.omega_c) < 1e-4, "{}", cfg.name);
        assert!(rel(s.kappa_tot(), t.kappa_tot()) < 0.3, "{}", cfg.name);
        for (g, m) in s.magnons.iter().zip(&t.magnons) {
            assert_eq!(g.label, m.label);
            assert!(rel(g.g_tilde, m.g_tilde) < 0.3, "{} {}", cfg.name, m.label);
            assert!(rel(g.gamma_m, m.gamma_m) < 0.3, "{} {}", cfg.name, m.label);
            assert!((g.dispersion_offset - m.dispersion_offset).abs() < 2e-4, "{} {}", cfg.name, m.label);
        }
    }
}

#[test]
fn windowed_map_reports_missing_mode() {
    let cfg = cryo_te102(201);
    let map = cfg.map().to_db_map();
    let wc = cfg.system.cavity.omega_c;
    let b_fmr = cfg.system.magnons[0].resonant_field(wc);
    let b_ms = cfg.system.magnons[1].resonant_field(wc);
    let cut = map
        .window((b_fmr - 1.2e-3, 0.5 * (b_fmr + b_ms)), (wc - 30.0 * MHZ, wc + 30.0 * MHZ))
        .unwrap();
    let guess = initial_guess(&cut, &cfg.guess_options()).unwrap();
    let labels: Vec<_> = guess.system.magnons.iter().map(|m| m.label.as_str()).collect();
    assert_eq!(labels, ["FMR"]);
    assert_eq!(guess.absent, ["MS"]);
}

#[test]
fn uncoupled_map_yields_bare_cavity() {
    let mut cfg = cryo_te101(61);
    for m in &mut cfg.system.magnons {
        m.g_tilde = 0.0;
    }
    let map = noisy(&cfg.map(), 0.05, 3);
    let guess = initial_guess(&map, &cfg.guess_options()).unwrap();
    assert!(guess.system.magnons.is_empty(), "{:?}", guess.system.magnons);
    assert_eq!(guess.absent, ["FMR", "MS"]);
}

#[test]
fn noisy_maps_round_trip() {
    let mut failures = Vec::new();
    for cfg in [cryo_te101(101), cryo_te102(101)] {
        for seed in 0..10 {
            let map = noisy(&cfg.map(), 0.1, 100 + seed);
            let rep = guess_and_fit(&map, &cfg, seed);
            for p in &rep.parameters {
                let t = truth_value(&cfg.system, &p.name);
                let tol = if p.name.ends_with("dispersion_offset") || p.name == "omega_c" {
                    1e-3
                } else {
                    0.05
                };
                if rel(p.value, t) > tol {
                    failures.push(format!("{} seed {seed} {}: {} vs {t}", cfg.name, p.name, p.value));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn heavy_ms_damping_leaves_weak_coupling() {
    let cfg = room_te102_ms(121);
    let damped = cfg.system.with_scaled_damping("MS", 100.0).unwrap();
    let map = spectrum_map(&damped, &cfg.grid).unwrap();
    let mut consistent_with_zero = 0;
    let seeds = 10;
    for seed in 0..seeds {
        let data = noisy(&map, 0.1, seed);
        let config = FitConfig { seed, ..FitConfig::default() };
        let rep = fit_hybrid(&data, &config, &damped).unwrap();
        assert!(rep.cooperativity("MS").unwrap() < 1.0, "seed {seed}");
        let g = rep.parameter("MS.g_tilde").unwrap();
        if g.value - 3.0 * g.uncertainty.unwrap() <= 0.0 {
            consistent_with_zero += 1;
        }
    }
    assert!(consistent_with_zero * 10 >= seeds * 8, "{consistent_with_zero}/{seeds}");
}

#[test]
fn uncoupled_magnon_is_degenerate() {
    let mut sys = cryo_te101(3).system;
    sys.magnons[1].g_tilde = 0.0;
    let grid = cryo_te101(41).grid;
    let map = spectrum_map(&sys, &grid).unwrap();
    let cfg = FitConfig::default().with_free(&["kappa_int", "MS.gamma_m"]);
    match fit_hybrid(&map, &cfg, &sys) {
        Err(Error::Degenerate(msg)) => assert!(msg.contains("MS.gamma_m"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn frequency_scale_invariance() {
    let cfg = cryo_te102(41);
    let scale = 1024.0;
    let mut big = cfg.system.clone();
    big.cavity.omega_c *= scale;
    big.cavity.kappa_in *= scale;
    big.cavity.kappa_out *= scale;
    big.cavity.kappa_int *= scale;
    for m in &mut big.magnons {
        m.g_tilde *= scale;
        m.gamma_m *= scale;
        m.dispersion_slope *= scale;
    }
    let big_grid = Grid::new(
        cfg.grid.field_values().to_vec(),
        cfg.grid.freq_values().iter().map(|f| f * scale).collect(),
    )
    .unwrap();
    let small_map = noisy(&cfg.map(), 0.1, 9);
    let big_map = noisy(&spectrum_map(&big, &big_grid).unwrap(), 0.1, 9);
    let start = |s: &System| {
        let mut g = s.clone();
        g.cavity.kappa_int *= 1.2;
        for m in &mut g.magnons {
            m.g_tilde *= 0.9;
            m.gamma_m *= 1.15;
        }
        g
    };
    let a = fit_hybrid(&small_map, &FitConfig::default(), &start(&cfg.system)).unwrap();
    let b = fit_hybrid(&big_map, &FitConfig::default(), &start(&big)).unwrap();
    for (pa, pb) in a.parameters.iter().zip(&b.parameters) {
        assert_eq!(pa.name, pb.name);
        let expected = if pa.name.ends_with("dispersion_offset") { pa.value } else { pa.value * scale };
        assert!(rel(pb.value, expected) < 1e-9, "{}: {} vs {expected}", pa.name, pb.value);
    }
    assert!(rel(b.residual_rms, a.residual_rms) < 1e-9);
}

#[test]
fn fits_are_deterministic_and_monotone() {
    let cfg = cryo_te101(61);
    let map = noisy(&cfg.map(), 0.2, 4);
    let a = guess_and_fit(&map, &cfg, 11);
    let b = guess_and_fit(&map, &cfg, 11);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    assert!(a.rms_history.len() >= 2);
    assert!(a.rms_history.windows(2).all(|w| w[1] <= w[0]), "{:?}", a.rms_history);
    assert_eq!(*a.rms_history.last().unwrap(), a.residual_rms);
}

#[test]
fn constant_offset_residual() {
    let cfg = cryo_te101(21);
    let map = cfg.map().to_db_map();
    let shifted: Vec<f64> = map.db_values().iter().map(|v| v - 9.01).collect();
    let shifted = Map::new(map.grid().clone(), magpol::model::SpectrumData::MagnitudeDb(shifted)).unwrap();
    assert!((residual_norm(&shifted, &cfg.system, 0.0) - 9.01).abs() < 1e-9);
    assert!(residual_norm(&shifted, &cfg.system, -9.01) < 1e-9);
}

#[test]
fn parsimony_drops_unresolved_magnon() {
    let cfg = cryo_te101(81);
    let mut faint = cfg.system.clone();
    faint.magnons[1].g_tilde = 0.02 * MHZ;
    let map = noisy(&spectrum_map(&faint, &cfg.grid).unwrap(), 0.2, 1);
    let mut start = faint.clone();
    start.magnons[1].g_tilde = 0.5 * MHZ;
    let sel = select_magnon_model(&map, &FitConfig::default(), &start).unwrap();
    assert_eq!(sel.dropped.as_deref(), Some("MS"));
    assert_eq!(sel.chosen.fitted.magnons.len(), 1);

    let map = noisy(&cfg.map(), 0.2, 1);
    let sel = select_magnon_model(&map, &FitConfig::default(), &cfg.system).unwrap();
    assert_eq!(sel.chosen.fitted.magnons.len(), 2);
}
