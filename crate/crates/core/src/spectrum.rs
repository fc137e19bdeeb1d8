//! Polariton branches of the coupled cavity–magnon mode matrix.
//!
//! The Hamiltonian conserves the total excitation number, so the branch
//! frequencies are the eigenvalues of the one-excitation block: a
//! `(1 + n_magnons)` square arrowhead matrix with the cavity in slot 0.

use rayon::prelude::*;

use crate::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::model::HybridSystem;
use crate::scalar::{lit, wide, Scalar};

/// One-excitation mode matrix at a fixed static field, Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix<T> {
    pub dim: usize,
    /// Row-major `dim × dim`.
    pub entries: Vec<T>,
}

impl<T: Scalar> ModeMatrix<T> {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest |A − Aᵀ| entry.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Builds the mode matrix: diagonal = bare frequencies, first row/column =
/// collective couplings, magnon–magnon block zero.
pub fn build_mode_matrix<T: Scalar>(system: &HybridSystem<T>, field: T) -> Result<ModeMatrix<T>> {
    system.ensure_valid()?;
    if !field.is_finite() {
        return Err(Error::InvalidArgument("field must be finite".into()));
    }
    Ok(mode_matrix_unchecked(system, field))
}

fn mode_matrix_unchecked<T: Scalar>(system: &HybridSystem<T>, field: T) -> ModeMatrix<T> {
    let dim = system.dim();
    let mut entries = vec![T::zero(); dim * dim];
    entries[0] = system.cavity.omega_c;
    for (k, m) in system.magnons.iter().enumerate() {
        let i = k + 1;
        entries[i * dim + i] = m.frequency(field);
        entries[i] = m.g_tilde;
        entries[i * dim] = m.g_tilde;
    }
    ModeMatrix { dim, entries }
}

/// Eigen-branches versus field.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDiagram<T> {
    pub field_values: Vec<T>,
    /// `branches[i]` holds the ascending eigenfrequencies at `field_values[i]`.
    pub branches: Vec<Vec<T>>,
    /// `weights[i][b][k]`: squared amplitude of mode `k` (0 = cavity) in
    /// branch `b` at field `i`.
    pub weights: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> BranchDiagram<T> {
    pub fn cavity_weight(&self, field_index: usize, branch: usize) -> T {
        self.weights[field_index][branch][0]
    }

    pub fn n_branches(&self) -> usize {
        self.branches.first().map_or(0, Vec::len)
    }
}

/// Sorted eigenfrequencies and mode weights at one field.
pub fn branches_at<T: Scalar>(system: &HybridSystem<T>, field: T) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let mut mat = mode_matrix_unchecked(system, field);
    let dim = mat.dim;
    // Diagonalize relative to the cavity frequency; eigenvalues are shift-covariant.
    let shift = system.cavity.omega_c;
    for i in 0..dim {
        mat.entries[i * dim + i] = mat.entries[i * dim + i] - shift;
    }
    let eig = symmetric_eigen(&mat.entries, dim).ok_or(Error::EigenNonConvergence { field: wide(field) })?;

    let mut order: Vec<(T, Vec<T>)> = (0..dim)
        .map(|b| {
            let w: Vec<T> = (0..dim).map(|k| eig.vector(k, b).powi(2)).collect();
            let norm: T = w.iter().copied().sum();
            (eig.values[b] + shift, w.into_iter().map(|x| x / norm).collect())
        })
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    // Degenerate pairs: larger cavity weight first.
    let scale = order.iter().fold(T::zero(), |acc, (v, _)| acc.max(v.abs()));
    let tol = lit::<T>(8.0) * T::epsilon() * scale;
    for i in 1..order.len() {
        if (order[i].0 - order[i - 1].0).abs() <= tol && order[i].1[0] > order[i - 1].1[0] {
            order.swap(i, i - 1);
        }
    }
    Ok(order.into_iter().unzip())
}

/// Diagonalizes the mode matrix at every field (in parallel, assembled in
/// field order).
pub fn polariton_branches<T: Scalar>(system: &HybridSystem<T>, fields: &[T]) -> Result<BranchDiagram<T>> {
    system.ensure_valid()?;
    if fields.is_empty() {
        return Err(Error::InvalidArgument("field list is empty".into()));
    }
    if fields.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidArgument("field values must be finite".into()));
    }
    let per_field: Vec<(Vec<T>, Vec<Vec<T>>)> = fields
        .par_iter()
        .map(|&b| branches_at(system, b))
        .collect::<Result<_>>()?;
    let (branches, weights) = per_field.into_iter().unzip();
    Ok(BranchDiagram {
        field_values: fields.to_vec(),
        branches,
        weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidedCrossing<T> {
    /// Hz.
    pub min_gap: T,
    /// T.
    pub field_at_min: T,
    /// The discrete minimum sits on the first or last field; the true
    /// minimum may lie outside the sweep.
    pub at_boundary: bool,
}

/// Minimum separation between two branches over the field sweep, refined by
/// a three-point parabola through the discrete minimum.
pub fn avoided_crossing<T: Scalar>(
    system: &HybridSystem<T>,
    fields: &[T],
    branch_pair: (usize, usize),
) -> Result<AvoidedCrossing<T>> {
    let (a, b) = branch_pair;
    let dim = system.dim();
    if a >= dim || b >= dim || a == b {
        return Err(Error::InvalidArgument(format!(
            "branch pair ({a}, {b}) invalid for {dim} branches"
        )));
    }
    let diagram = polariton_branches(system, fields)?;
    let gaps: Vec<T> = diagram
        .branches
        .iter()
        .map(|br| (br[b] - br[a]).abs())
        .collect();
    let k = gaps
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);

    if k == 0 || k + 1 == gaps.len() {
        return Ok(AvoidedCrossing {
            min_gap: gaps[k],
            field_at_min: fields[k],
            at_boundary: true,
        });
    }

    let (x0, x1, x2) = (fields[k - 1], fields[k], fields[k + 1]);
    let (y0, y1, y2) = (gaps[k - 1], gaps[k], gaps[k + 1]);
    let refined = parabola_vertex((x0, y0), (x1, y1), (x2, y2));
    let (field_at_min, min_gap) = match refined {
        Some((xv, yv)) if xv >= x0 && xv <= x2 => (xv, yv.max(T::zero()).min(y1)),
        _ => (x1, y1),
    };
    Ok(AvoidedCrossing {
        min_gap,
        field_at_min,
        at_boundary: false,
    })
}

/// Vertex of the parabola through three points, if it opens upward.
fn parabola_vertex<T: Scalar>(p0: (T, T), p1: (T, T), p2: (T, T)) -> Option<(T, T)> {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if !(curv > T::zero()) {
        return None;
    }
    // y = y1 + s·(x − x1) + curv·(x − x1)²  with s the slope at x1
    let s = d01 + curv * (x1 - x0);
    let dx = -s / (lit::<T>(2.0) * curv);
    Some((x1 + dx, y1 + s * dx + curv * dx * dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{linspace, CavityMode, MagnonMode};

    fn te101_fmr(g: f64) -> HybridSystem<f64> {
        HybridSystem::new(
            CavityMode::new("TE101", 8.855e9, 0.19e6, 0.20e6, 0.71e6),
            vec![MagnonMode::new("FMR", g, 1.2e6)],
        )
    }

    #[test]
    fn bare_cavity_is_one_by_one() {
        let sys = HybridSystem::bare(CavityMode::new("TE101", 8.855e9, 0.19e6, 0.20e6, 0.71e6));
        let m = build_mode_matrix(&sys, 0.3).unwrap();
        assert_eq!(m.dim, 1);
        assert_eq!(m.entries, vec![8.855e9]);
    }

    #[test]
    fn three_mode_layout() {
        let mut sys = te101_fmr(5.4e6);
        sys.magnons.push(MagnonMode::new("MS", 1.4e6, 2.7e6).with_dispersion(28.0e9, 2.5e-3));
        let b = 8.855e9 / 28.0e9;
        let m = build_mode_matrix(&sys, b).unwrap();
        assert_eq!(m.dim, 3);
        assert_eq!(m.get(0, 0), 8.855e9);
        assert!((m.get(1, 1) - 8.855e9).abs() < 1e-3);
        assert!((m.get(2, 2) - 28.0e9 * (b - 2.5e-3)).abs() < 1e-3);
        assert_eq!((m.get(0, 1), m.get(0, 2)), (5.4e6, 1.4e6));
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn invalid_system_rejected() {
        let sys = te101_fmr(-1.0);
        assert!(matches!(build_mode_matrix(&sys, 0.3), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn uncoupled_branches_are_bare() {
        let sys = te101_fmr(0.0);
        let fields = linspace(0.30, 0.33, 7);
        let d = polariton_branches(&sys, &fields).unwrap();
        for (i, &b) in fields.iter().enumerate() {
            let mut bare = [8.855e9, 28.0e9 * b];
            bare.sort_by(f64::total_cmp);
            assert_eq!(d.branches[i], bare.to_vec());
        }
    }

    #[test]
    fn resonant_two_mode_split() {
        let sys = te101_fmr(5.4e6);
        let b = 8.855e9 / 28.0e9;
        let (vals, w) = branches_at(&sys, b).unwrap();
        assert!((vals[0] - (8.855e9 - 5.4e6)).abs() < 1e-3);
        assert!((vals[1] - (8.855e9 + 5.4e6)).abs() < 1e-3);
        assert!((w[0][0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn crossing_field_and_gap() {
        let sys = te101_fmr(5.4e6);
        let b0 = 8.855 / 28.0;
        let fields = linspace(b0 - 2e-3, b0 + 2e-3, 401);
        let x = avoided_crossing(&sys, &fields, (0, 1)).unwrap();
        assert!(!x.at_boundary);
        assert!((x.field_at_min - 0.3163).abs() < 1e-4);
        assert!((x.min_gap / 10.8e6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn boundary_minimum_flagged() {
        let sys = te101_fmr(5.4e6);
        let fields = linspace(0.30, 0.31, 11);
        let x = avoided_crossing(&sys, &fields, (0, 1)).unwrap();
        assert!(x.at_boundary);
    }

    #[test]
    fn zero_coupling_crosses() {
        let sys = te101_fmr(0.0);
        let b0 = 8.855e9 / 28.0e9;
        let fields = vec![b0 - 2e-4, b0 - 1e-4, b0, b0 + 1e-4, b0 + 2e-4];
        let x = avoided_crossing(&sys, &fields, (0, 1)).unwrap();
        assert!(x.min_gap.abs() < 1.0, "{x:?}");
    }

    #[test]
    fn bad_branch_pair() {
        let sys = te101_fmr(5.4e6);
        assert!(avoided_crossing(&sys, &[0.3, 0.31, 0.32], (0, 2)).is_err());
    }
}
