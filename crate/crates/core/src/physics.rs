//! Derived scalars: single-spin coupling, spin count, cooperativity, photon
//! occupations, and the regime checks that license the linear magnon model.

use crate::error::{Error, Result};
use crate::model::{units, CavityMode, MagnonMode, PhysicalConstants};
use crate::scalar::{lit, wide, Scalar};

/// Overlap coefficient that reproduces the 15.8 mHz single-spin coupling of
/// the 50×18×3 mm³ cavity's fundamental mode at 8.855 GHz.
pub const ETA_TE101: f64 = 0.684;

/// Geometric volume of the 50×18×3 mm³ cavity, m³.
pub const DEFAULT_MODE_VOLUME: f64 = 2.7e-6;

/// Default meaning of "≫" for the wavenumber ordering.
pub const DEFAULT_REGIME_THRESHOLD: f64 = 100.0;

/// Default ceiling on ⟨b†b⟩/2S for the linearized magnon model.
pub const DEFAULT_LOW_EXCITATION_THRESHOLD: f64 = 1e-3;

/// Checked affine dispersion `slope · (B − offset)`.
pub fn magnon_frequency<T: Scalar>(mode: &MagnonMode<T>, field: T) -> Result<T> {
    let f = mode.frequency(field);
    if !(f >= T::zero()) {
        return Err(Error::Unphysical(format!(
            "magnon `{}` frequency {} Hz at field {} T is negative",
            mode.label,
            wide(f),
            wide(field)
        )));
    }
    Ok(f)
}

/// Single-spin coupling `η·γ_e·√(ħ·ω_c·μ₀/V_c)/2`, returned in Hz.
///
/// `γ_e` is stored as Hz/T, so the formula is evaluated with the angular
/// cavity frequency under the root and the ordinary gyromagnetic ratio
/// outside; the result is already an ordinary frequency.
pub fn single_spin_coupling<T: Scalar>(
    eta: T,
    omega_c: T,
    mode_volume: T,
    constants: &PhysicalConstants<T>,
) -> Result<T> {
    if !(eta >= T::zero() && eta <= T::one()) {
        return Err(Error::InvalidArgument(format!("eta must lie in [0, 1], got {}", wide(eta))));
    }
    if !(mode_volume > T::zero()) {
        return Err(Error::InvalidArgument("mode volume must be > 0".into()));
    }
    let b_vac = (constants.h_bar * units::to_angular(omega_c) * constants.mu_0 / mode_volume).sqrt();
    Ok(eta * constants.gamma_e * b_vac / lit(2.0))
}

/// Spin count `N = (g̃/g)² / (2s)`.
pub fn spin_count<T: Scalar>(g_collective: T, g_single: T, spin_per_ion: T) -> Result<T> {
    if !(g_single > T::zero()) {
        return Err(Error::InvalidArgument("single-spin coupling must be > 0".into()));
    }
    if !(spin_per_ion > T::zero()) {
        return Err(Error::InvalidArgument("spin per ion must be > 0".into()));
    }
    let ratio = g_collective / g_single;
    Ok(ratio * ratio / (lit::<T>(2.0) * spin_per_ion))
}

/// `C = g̃² / (κ_tot·γ)`.
pub fn cooperativity<T: Scalar>(g_collective: T, kappa_tot: T, gamma_m: T) -> Result<T> {
    if !(kappa_tot > T::zero() && gamma_m > T::zero()) {
        return Err(Error::InvalidArgument("kappa_tot and gamma must be > 0".into()));
    }
    Ok(g_collective * g_collective / (kappa_tot * gamma_m))
}

/// Bose–Einstein occupation `1/(exp(h·f/k_B·T) − 1)`. Underflows to 0 for
/// `h·f ≫ k_B·T`.
pub fn thermal_photon_number<T: Scalar>(freq: T, temperature: T, constants: &PhysicalConstants<T>) -> Result<T> {
    if !(freq > T::zero() && temperature > T::zero()) {
        return Err(Error::InvalidArgument("frequency and temperature must be > 0".into()));
    }
    let x = constants.planck() * freq / (constants.k_b * temperature);
    Ok(T::one() / x.exp_m1())
}

/// Steady-state intracavity photon number under a coherent drive.
///
/// Angular form `n = 2·κ_in·P / (ħω·(Δ² + κ_tot²))`; this normalization
/// reproduces 0.8 photons at −130 dBm, 800 at −100 dBm (22 mK parameters)
/// and 1.8×10¹⁰ at −20 dBm (room temperature) for the fundamental mode.
pub fn drive_photon_number<T: Scalar>(
    input_power: T,
    probe_freq: T,
    cavity: &CavityMode<T>,
    detuning: T,
    constants: &PhysicalConstants<T>,
) -> Result<T> {
    if !(input_power >= T::zero()) {
        return Err(Error::InvalidArgument("input power must be >= 0".into()));
    }
    if !(probe_freq > T::zero()) {
        return Err(Error::InvalidArgument("probe frequency must be > 0".into()));
    }
    let kappa_in = units::to_angular(cavity.kappa_in);
    let kappa_tot = units::to_angular(cavity.kappa_tot());
    let delta = units::to_angular(detuning);
    let photon_energy = constants.h_bar * units::to_angular(probe_freq);
    Ok(lit::<T>(2.0) * kappa_in * input_power / (photon_energy * (delta * delta + kappa_tot * kappa_tot)))
}

/// Outcome of the `k₀ ≪ k_MS ≪ 1/√Λ_ex` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport<T> {
    /// Wavenumber of the microwave in the material, rad/m.
    pub k0: T,
    pub k_ms: T,
    /// `1/√Λ_ex`, rad/m.
    pub exchange_cutoff: T,
    /// `k_MS / k₀`.
    pub lower_ratio: T,
    /// `(1/√Λ_ex) / k_MS`.
    pub upper_ratio: T,
    pub threshold: T,
    pub k_ms_lower_ok: bool,
    pub k_ms_upper_ok: bool,
}

impl<T: Scalar> RegimeReport<T> {
    pub fn passed(&self) -> bool {
        self.k_ms_lower_ok && self.k_ms_upper_ok
    }
}

/// Magnetostatic-regime check. `threshold` is the ratio that counts as "≫".
pub fn magnetostatic_regime_check<T: Scalar>(
    probe_freq: T,
    relative_permittivity: T,
    k_ms: T,
    constants: &PhysicalConstants<T>,
    threshold: T,
) -> Result<RegimeReport<T>> {
    if !(relative_permittivity >= T::one()) {
        return Err(Error::InvalidArgument("relative permittivity must be >= 1".into()));
    }
    if !(k_ms > T::zero()) {
        return Err(Error::InvalidArgument("k_ms must be > 0".into()));
    }
    let k0 = units::to_angular(probe_freq) * (constants.mu_0 * constants.epsilon_0 * relative_permittivity).sqrt();
    let exchange_cutoff = T::one() / constants.lambda_ex.sqrt();
    let lower_ratio = k_ms / k0;
    let upper_ratio = exchange_cutoff / k_ms;
    Ok(RegimeReport {
        k0,
        k_ms,
        exchange_cutoff,
        lower_ratio,
        upper_ratio,
        threshold,
        k_ms_lower_ok: lower_ratio >= threshold,
        k_ms_upper_ok: upper_ratio >= threshold,
    })
}

/// Geometric mean of `k₀` and the exchange cutoff: the wavenumber deepest
/// inside the magnetostatic window.
pub fn magnetostatic_midpoint<T: Scalar>(probe_freq: T, relative_permittivity: T, constants: &PhysicalConstants<T>) -> T {
    let k0 = units::to_angular(probe_freq) * (constants.mu_0 * constants.epsilon_0 * relative_permittivity).sqrt();
    (k0 / constants.lambda_ex.sqrt()).sqrt()
}

/// `⟨b†b⟩ / 2S`.
pub fn low_excitation_ratio<T: Scalar>(mean_magnon_number: T, total_spin: T) -> Result<T> {
    if !(total_spin > T::zero()) {
        return Err(Error::InvalidArgument("total spin must be > 0".into()));
    }
    if !(mean_magnon_number >= T::zero()) {
        return Err(Error::InvalidArgument("mean magnon number must be >= 0".into()));
    }
    Ok(mean_magnon_number / (lit::<T>(2.0) * total_spin))
}

/// Single-spin coupling, spin count, and cooperativity for one magnon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingBudget<T> {
    pub g_single: T,
    pub eta: T,
    pub mode_volume: T,
    pub n_spins: T,
    pub g_collective: T,
    pub cooperativity: T,
}

impl<T: Scalar> CouplingBudget<T> {
    pub fn compute(
        eta: T,
        omega_c: T,
        mode_volume: T,
        g_collective: T,
        kappa_tot: T,
        gamma_m: T,
        constants: &PhysicalConstants<T>,
    ) -> Result<Self> {
        let g_single = single_spin_coupling(eta, omega_c, mode_volume, constants)?;
        Ok(Self {
            g_single,
            eta,
            mode_volume,
            n_spins: spin_count(g_collective, g_single, constants.spin_per_ion)?,
            g_collective,
            cooperativity: cooperativity(g_collective, kappa_tot, gamma_m)?,
        })
    }

    /// Collective spin `S = N·s`.
    pub fn total_spin(&self, spin_per_ion: T) -> T {
        self.n_spins * spin_per_ion
    }
}
