//! Input–output transmission of a cavity loaded by magnon modes.
//!
//! ```text
//! S21(ω) = 2·√(κ_in·κ_out) / ( i(ω − ω_c) − κ_tot + Σ(ω) )
//! Σ(ω)   = Σ_m g̃_m² / ( i(ω − ω_m(B)) − γ_m )
//! ```
//!
//! Every frequency and rate enters in Hz; the expression is homogeneous of
//! degree zero, so the 2π factors cancel.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{units, HybridSystem, MagnonMode, SpectrumData, SpectrumMap, SweepGrid};
use crate::scalar::{lit, wide, Scalar};

/// Complex transmission plus its dB magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexResponse<T> {
    pub value: Complex<T>,
    pub magnitude_db: T,
}

impl<T: Scalar> ComplexResponse<T> {
    pub fn new(value: Complex<T>) -> Self {
        Self {
            value,
            magnitude_db: units::amplitude_db(value.norm()),
        }
    }
}

/// Complex frequency shift the magnons impose on the cavity, Hz.
pub fn self_energy<T: Scalar>(magnons: &[MagnonMode<T>], probe_freq: T, field: T) -> Complex<T> {
    magnons
        .iter()
        .map(|m| {
            let denom = Complex::new(-m.gamma_m, probe_freq - m.frequency(field));
            Complex::new(m.g_tilde * m.g_tilde, T::zero()) / denom
        })
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

/// Transmission at one (frequency, field) point.
pub fn s21<T: Scalar>(system: &HybridSystem<T>, probe_freq: T, field: T) -> Result<ComplexResponse<T>> {
    let c = &system.cavity;
    if c.kappa_tot() <= T::zero() {
        return Err(Error::SingularModel);
    }
    Ok(ComplexResponse::new(s21_unchecked(system, probe_freq, field)))
}

#[inline]
pub(crate) fn s21_unchecked<T: Scalar>(system: &HybridSystem<T>, probe_freq: T, field: T) -> Complex<T> {
    let c = &system.cavity;
    let numer = lit::<T>(2.0) * (c.kappa_in * c.kappa_out).sqrt();
    let denom = Complex::new(-c.kappa_tot(), probe_freq - c.omega_c)
        + self_energy(&system.magnons, probe_freq, field);
    Complex::new(numer, T::zero()) / denom
}

/// Upper bound on |S21|: 2√(κ_in·κ_out)/κ_tot.
pub fn passivity_bound<T: Scalar>(system: &HybridSystem<T>) -> T {
    let c = &system.cavity;
    lit::<T>(2.0) * (c.kappa_in * c.kappa_out).sqrt() / c.kappa_tot()
}

/// Evaluates S21 over every cell of `grid`; rows are computed in parallel
/// and assembled in field order.
pub fn spectrum_map<T: Scalar>(system: &HybridSystem<T>, grid: &SweepGrid<T>) -> Result<SpectrumMap<T>> {
    system.ensure_valid_on(grid.field_values())?;
    if system.kappa_tot() <= T::zero() {
        let (b, f) = (grid.field_values()[0], grid.freq_values()[0]);
        return Err(Error::AtGridPoint {
            field: wide(b),
            freq: wide(f),
            source: Box::new(Error::SingularModel),
        });
    }
    let freqs = grid.freq_values();
    let values: Vec<Complex<T>> = grid
        .field_values()
        .par_iter()
        .flat_map_iter(|&b| freqs.iter().map(move |&f| s21_unchecked(system, f, b)))
        .collect();
    let mut map = SpectrumMap::new(grid.clone(), SpectrumData::Complex(values))?;
    map.metadata = system_metadata(system);
    map.metadata.insert("source".into(), "simulated".into());
    Ok(map)
}

/// One map per multiplier, with the named magnon's damping scaled.
pub fn damping_sweep<T: Scalar>(
    system: &HybridSystem<T>,
    magnon_label: &str,
    multipliers: &[T],
    grid: &SweepGrid<T>,
) -> Result<Vec<SpectrumMap<T>>> {
    if system.magnon_index(magnon_label).is_none() {
        return Err(Error::UnknownMode(magnon_label.to_string()));
    }
    if let Some(bad) = multipliers.iter().find(|m| !(m.is_finite() && **m > T::zero())) {
        return Err(Error::InvalidArgument(format!(
            "damping multiplier must be positive, got {bad}"
        )));
    }
    multipliers
        .iter()
        .map(|&k| {
            let scaled = system.with_scaled_damping(magnon_label, k)?;
            let mut map = spectrum_map(&scaled, grid)?;
            map.metadata
                .insert(format!("damping_multiplier.{magnon_label}"), k.to_string());
            Ok(map)
        })
        .collect()
}

/// Flat key/value description of a system for map metadata.
pub fn system_metadata<T: Scalar>(system: &HybridSystem<T>) -> std::collections::BTreeMap<String, String> {
    let c = &system.cavity;
    let mut md = std::collections::BTreeMap::new();
    md.insert("cavity.label".into(), c.label.clone());
    md.insert("cavity.omega_c_hz".into(), c.omega_c.to_string());
    md.insert("cavity.kappa_in_hz".into(), c.kappa_in.to_string());
    md.insert("cavity.kappa_out_hz".into(), c.kappa_out.to_string());
    md.insert("cavity.kappa_int_hz".into(), c.kappa_int.to_string());
    for m in &system.magnons {
        let key = |k: &str| format!("magnon.{}.{k}", m.label);
        md.insert(key("g_tilde_hz"), m.g_tilde.to_string());
        md.insert(key("gamma_hz"), m.gamma_m.to_string());
        md.insert(key("dispersion_slope_hz_per_t"), m.dispersion_slope.to_string());
        md.insert(key("dispersion_offset_t"), m.dispersion_offset.to_string());
    }
    md
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CavityMode;
    use proptest::prelude::*;

    fn te101() -> CavityMode<f64> {
        CavityMode::new("TE101", 8.855e9, 0.19e6, 0.20e6, 0.71e6)
    }

    #[test]
    fn empty_self_energy_is_zero() {
        assert_eq!(self_energy::<f64>(&[], 8.8e9, 0.3), Complex::new(0.0, 0.0));
    }

    #[test]
    fn resonant_self_energy_is_real_negative() {
        let m = MagnonMode::<f64>::new("FMR", 5.4e6, 1.2e6);
        let b = m.resonant_field(8.855e9);
        let s = self_energy(std::slice::from_ref(&m), m.frequency(b), b);
        assert!((s.re + 24.3e6).abs() < 1e-3, "{s}");
        assert!(s.im.abs() < 1e-6);
    }

    #[test]
    fn self_energy_decays_with_detuning() {
        let m = MagnonMode::<f64>::new("FMR", 5.4e6, 1.2e6);
        let b = 0.3;
        let w = m.frequency(b);
        let mags: Vec<f64> = (1..20)
            .map(|k| self_energy(std::slice::from_ref(&m), w + k as f64 * 10e6, b).norm())
            .collect();
        assert!(mags.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn bare_resonance_value() {
        let sys = HybridSystem::bare(te101());
        let r = s21(&sys, 8.855e9, 0.0).unwrap();
        let want = 2.0 * (0.19f64 * 0.20).sqrt() / 1.1;
        assert!((r.value.norm() - want).abs() < 1e-12);
        assert!((r.magnitude_db + 9.01).abs() < 5e-3, "{}", r.magnitude_db);
    }

    #[test]
    fn double_resonance_dip() {
        let sys = HybridSystem::new(te101(), vec![MagnonMode::new("FMR", 5.4e6, 1.2e6)]);
        let b = sys.magnons[0].resonant_field(8.855e9);
        let r = s21(&sys, 8.855e9, b).unwrap();
        let want = 2.0 * (0.19f64 * 0.20).sqrt() / (1.1 + 24.3);
        assert!((r.value.norm() / want - 1.0).abs() < 1e-6);
        assert!((r.magnitude_db + 36.3).abs() < 0.05, "{}", r.magnitude_db);
    }

    #[test]
    fn far_detuned_tail() {
        let sys = HybridSystem::bare(te101());
        let r = s21(&sys, 9.855e9, 0.0).unwrap();
        assert!(r.magnitude_db < -60.0);
        let approx = 2.0 * (0.19e6f64 * 0.20e6).sqrt() / 1e9;
        assert!((r.value.norm() / approx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_loss_is_singular() {
        let sys = HybridSystem::bare(CavityMode::new("x", 1e9, 0.0, 0.0, 0.0));
        assert!(matches!(s21(&sys, 1e9, 0.0), Err(Error::SingularModel)));
        let grid = SweepGrid::new(vec![0.1], vec![1e9]).unwrap();
        assert!(matches!(spectrum_map(&sys, &grid), Err(Error::AtGridPoint { .. })));
    }

    #[test]
    fn one_cell_map_matches_point() {
        let sys = HybridSystem::new(te101(), vec![MagnonMode::new("FMR", 5.4e6, 1.2e6)]);
        let grid = SweepGrid::new(vec![0.3162], vec![8.854e9]).unwrap();
        let map = spectrum_map(&sys, &grid).unwrap();
        assert_eq!(map.complex(0, 0).unwrap(), s21(&sys, 8.854e9, 0.3162).unwrap().value);
        assert_eq!(map.metadata["cavity.label"], "TE101");
    }

    #[test]
    fn sweep_identity_and_unknown_label() {
        let sys = HybridSystem::new(te101(), vec![MagnonMode::new("FMR", 5.4e6, 1.2e6)]);
        let grid = SweepGrid::linspace((0.315, 0.3181, 5), (8.84e9, 8.87e9, 7)).unwrap();
        let maps = damping_sweep(&sys, "FMR", &[1.0], &grid).unwrap();
        assert_eq!(maps[0].data(), spectrum_map(&sys, &grid).unwrap().data());
        assert!(matches!(damping_sweep(&sys, "MS", &[1.0], &grid), Err(Error::UnknownMode(_))));
        assert!(damping_sweep(&sys, "FMR", &[0.0], &grid).is_err());
    }

    #[test]
    fn negative_magnon_frequency_rejected_on_sweep() {
        let sys = HybridSystem::new(
            te101(),
            vec![MagnonMode::new("FMR", 5.4e6, 1.2e6).with_dispersion(28e9, 0.5)],
        );
        let grid = SweepGrid::new(vec![0.3], vec![8.8e9]).unwrap();
        assert!(matches!(spectrum_map(&sys, &grid), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn self_energy_imaginary_sign_flips_at_resonance() {
        let m = MagnonMode::<f64>::new("MS", 8.3e6, 3.3e6).with_dispersion(28e9, 2.5e-3);
        let b = 0.37;
        let w = m.frequency(b);
        let below = self_energy(std::slice::from_ref(&m), w - 1e3, b).im;
        let at = self_energy(std::slice::from_ref(&m), w, b).im;
        let above = self_energy(std::slice::from_ref(&m), w + 1e3, b).im;
        assert!(below > 0.0 && above < 0.0 && at.abs() < 1e-9 * below.abs().max(1.0));
    }

    fn arb_system() -> impl Strategy<Value = HybridSystem<f64>> {
        (
            (8e9..11e9f64, 1e4..3e6f64, 1e4..3e6f64, 0.0..5e6f64),
            prop::collection::vec((0.0..2e7f64, 1e4..5e7f64, -0.01..0.01f64), 0..4),
        )
            .prop_map(|((wc, ki, ko, kint), mags)| {
                let magnons = mags
                    .into_iter()
                    .enumerate()
                    .map(|(i, (g, gam, off))| {
                        MagnonMode::new(format!("m{i}"), g, gam).with_dispersion(28e9, off)
                    })
                    .collect();
                HybridSystem::new(CavityMode::new("c", wc, ki, ko, kint), magnons)
            })
    }

    proptest! {
        #[test]
        fn passive(sys in arb_system(), df in -1e8..1e8f64, db in -0.02..0.02f64) {
            let f = sys.cavity.omega_c + df;
            let b = sys.cavity.omega_c / 28e9 + db;
            let r = s21(&sys, f, b).unwrap();
            prop_assert!(r.value.norm() <= passivity_bound(&sys) * (1.0 + 1e-12));
            prop_assert!(r.value.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn port_swap_reciprocal(sys in arb_system(), df in -1e8..1e8f64) {
            let mut swapped = sys.clone();
            std::mem::swap(&mut swapped.cavity.kappa_in, &mut swapped.cavity.kappa_out);
            let f = sys.cavity.omega_c + df;
            let a = s21(&sys, f, 0.33).unwrap().value.norm();
            let b = s21(&swapped, f, 0.33).unwrap().value.norm();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }
}
