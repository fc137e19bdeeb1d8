#![allow(dead_code)]

use magpol::fit::GuessOptions;
use magpol::transmission::spectrum_map;
use magpol::{Cavity, Grid, Magnon, Map, System};

pub const MHZ: f64 = 1e6;
pub const SLOPE: f64 = 28e9;
pub const FMR_OFFSET: f64 = 5.0e-3;
pub const MS_OFFSET: f64 = 7.5e-3;

/// One measured configuration: system, grid and guess options.
pub struct Config {
    pub name: &'static str,
    pub system: System,
    pub grid: Grid,
    pub modes: Vec<&'static str>,
}

impl Config {
    pub fn guess_options(&self) -> GuessOptions {
        GuessOptions {
            expected_modes: self.modes.iter().map(|s| s.to_string()).collect(),
            dispersion_slope: SLOPE,
            port_ratio: self.system.cavity.kappa_out / self.system.cavity.kappa_in,
            cavity_label: self.system.cavity.label.clone(),
            ..GuessOptions::default()
        }
    }

    pub fn map(&self) -> Map {
        spectrum_map(&self.system, &self.grid).unwrap()
    }
}

fn fmr(g: f64, gamma: f64) -> Magnon {
    Magnon::new("FMR", g * MHZ, gamma * MHZ).with_dispersion(SLOPE, FMR_OFFSET)
}

fn ms(g: f64, gamma: f64) -> Magnon {
    Magnon::new("MS", g * MHZ, gamma * MHZ).with_dispersion(SLOPE, MS_OFFSET)
}

fn grid(system: &System, below: f64, above: f64, half_window: f64, n: usize) -> Grid {
    let wc = system.cavity.omega_c;
    let first = system.magnons.first().unwrap().resonant_field(wc);
    let last = system.magnons.last().unwrap().resonant_field(wc);
    Grid::linspace((first - below, last + above, n), (wc - half_window, wc + half_window, n)).unwrap()
}

pub fn cryo_te101(n: usize) -> Config {
    let system = System::new(
        Cavity::new("TE101", 8.855e9, 0.19 * MHZ, 0.20 * MHZ, 0.71 * MHZ),
        vec![fmr(5.4, 1.2), ms(1.4, 2.7)],
    );
    let grid = grid(&system, 1.2e-3, 1.2e-3, 20.0 * MHZ, n);
    Config { name: "cryo TE101", system, grid, modes: vec!["FMR", "MS"] }
}

pub fn cryo_te102(n: usize) -> Config {
    let system = System::new(
        Cavity::new("TE102", 10.306e9, 0.85 * MHZ, 0.99 * MHZ, 0.56 * MHZ),
        vec![fmr(7.5, 1.3), ms(8.3, 3.3)],
    );
    let grid = grid(&system, 1.2e-3, 1.2e-3, 30.0 * MHZ, n);
    Config { name: "cryo TE102", system, grid, modes: vec!["FMR", "MS"] }
}

pub fn room_te101(n: usize) -> Config {
    let system = System::new(
        Cavity::new("TE101", 8.822e9, 0.19 * MHZ, 0.20 * MHZ, 2.11 * MHZ),
        vec![fmr(5.2, 1.3)],
    );
    let grid = grid(&system, 1.5e-3, 1.5e-3, 25.0 * MHZ, n);
    Config { name: "room TE101", system, grid, modes: vec!["FMR"] }
}

pub fn room_te102(n: usize) -> Config {
    let system = System::new(
        Cavity::new("TE102", 10.265e9, 0.85 * MHZ, 0.99 * MHZ, 4.06 * MHZ),
        vec![fmr(9.6, 1.5)],
    );
    let grid = grid(&system, 1.5e-3, 1.5e-3, 40.0 * MHZ, n);
    Config { name: "room TE102", system, grid, modes: vec!["FMR"] }
}

/// Room-temperature TE102 cavity with both FMR and MS modes.
pub fn room_te102_ms(n: usize) -> Config {
    let system = System::new(
        Cavity::new("TE102", 10.265e9, 0.85 * MHZ, 0.99 * MHZ, 4.06 * MHZ),
        vec![fmr(9.6, 1.5), ms(8.3, 3.3)],
    );
    let grid = grid(&system, 1.5e-3, 1.5e-3, 40.0 * MHZ, n);
    Config { name: "room TE102 with MS", system, grid, modes: vec!["FMR", "MS"] }
}

pub fn measured_configs(n: usize) -> Vec<Config> {
    vec![cryo_te101(n), cryo_te102(n), room_te101(n), room_te102(n)]
}

/// dB map with additive Gaussian noise of `sigma` dB.
pub fn noisy(map: &Map, sigma: f64, seed: u64) -> Map {
    magpol::fit::add_db_noise(map, sigma, seed).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Truth value of a fit parameter name such as `FMR.g_tilde`.
pub fn truth_value(system: &System, name: &str) -> f64 {
    let c = &system.cavity;
    match name {
        "omega_c" => c.omega_c,
        "kappa_in" => c.kappa_in,
        "kappa_out" => c.kappa_out,
        "kappa_int" => c.kappa_int,
        _ => {
            let (label, field) = name.split_once('.').unwrap();
            let m = system.magnon(label).unwrap();
            match field {
                "g_tilde" => m.g_tilde,
                "gamma_m" => m.gamma_m,
                "dispersion_slope" => m.dispersion_slope,
                "dispersion_offset" => m.dispersion_offset,
                _ => panic!("unknown parameter {name}"),
            }
        }
    }
}

/// Characteristic polynomial `det(λ − M)` of the cavity-magnon arrowhead
/// matrix, written out from the system parameters, in a frame shifted by ω_c.
fn char_poly(system: &System, field: f64, lambda: f64) -> f64 {
    let wc = system.cavity.omega_c;
    let diag: Vec<f64> = system.magnons.iter().map(|m| m.frequency(field) - wc).collect();
    let mut det = lambda * diag.iter().map(|d| lambda - d).product::<f64>();
    for (i, m) in system.magnons.iter().enumerate() {
        let rest: f64 = diag
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, d)| lambda - d)
            .product();
        det -= m.g_tilde * m.g_tilde * rest;
    }
    det
}

/// Branch frequencies by bisection on the characteristic polynomial.
/// Requires distinct magnon frequencies and non-zero couplings, where each
/// interval between consecutive bare magnon frequencies holds one root.
pub fn oracle_eigenvalues(system: &System, field: f64) -> Vec<f64> {
    let wc = system.cavity.omega_c;
    let mut marks: Vec<f64> = system.magnons.iter().map(|m| m.frequency(field) - wc).collect();
    marks.sort_by(f64::total_cmp);
    let reach: f64 = system.magnons.iter().map(|m| m.g_tilde).sum::<f64>() + 1.0;
    let lo = marks.first().copied().unwrap_or(0.0).min(0.0) - reach;
    let hi = marks.last().copied().unwrap_or(0.0).max(0.0) + reach;
    let mut edges = vec![lo];
    edges.extend(marks);
    edges.push(hi);
    edges
        .windows(2)
        .map(|w| {
            let (mut a, mut b) = (w[0], w[1]);
            let fa = char_poly(system, field, a);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (char_poly(system, field, mid) > 0.0) == (fa > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b) + wc
        })
        .collect()
}
