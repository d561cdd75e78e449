//! Dense complex linear algebra used by every module: singular values and
//! Hermitian spectra through nalgebra.

use nalgebra::DMatrix;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

/// Singular values in ascending order; `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// `inf_{‖x‖=1} ‖Mx‖`; zero for wide matrices, which always have a kernel.
pub fn sigma_min(m: &CMatrix) -> f64 {
    if m.ncols() > m.nrows() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn sigma_max(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Eigenvalues of the Hermitian part `(M + M*)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}
