//! Finite matrices for the Toeplitz, Hankel, dual Toeplitz, truncated
//! Toeplitz and dual truncated Toeplitz operators, the compressed shift,
//! the off-diagonal block `B_φ` (through its Gram matrix) and the
//! conjugation `C_u`.
//!
//! Coordinates on `K_u^⊥ = uH² ⊕ H²_-` are taken in the frame
//! `{u zⁿ}_{n≥0} ⊕ {z̄ⁿ}_{n≥1}`, so the dual truncated Toeplitz operator is
//! assembled as the block matrix `[[T_φ, H*_{uφ̄}], [H_{uφ}, S_φ]]`.

use serde::Serialize;

use crate::error::{check_tol, Error, Result};
use crate::fourier::{
    symbol_to_window, window_conjugate, window_inner_product, window_multiply, BlaschkeProduct,
    FourierWindow, SymbolExpr,
};
use crate::linalg::CMatrix;
use crate::modelspace::ModelBasis;
use crate::C64;

/// Which basis the rows or columns of an [`OperatorMatrix`] refer to.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisLabel {
    /// `z^from, …, z^{from+len-1}`.
    Analytic {
        from: usize,
        len: usize,
    },
    /// `z̄^from, …, z̄^{from+len-1}`, `from ≥ 1`.
    AntiAnalytic {
        from: usize,
        len: usize,
    },
    /// An orthonormal basis of `K_u`.
    ModelSpace {
        dim: usize,
    },
    /// `u z^from, …` inside `K_u^⊥`.
    InnerMultiple {
        from: usize,
        len: usize,
    },
    DirectSum {
        parts: Vec<BasisLabel>,
    },
}

impl BasisLabel {
    pub fn dim(&self) -> usize {
        match self {
            BasisLabel::Analytic { len, .. }
            | BasisLabel::AntiAnalytic { len, .. }
            | BasisLabel::InnerMultiple { len, .. } => *len,
            BasisLabel::ModelSpace { dim } => *dim,
            BasisLabel::DirectSum { parts } => parts.iter().map(BasisLabel::dim).sum(),
        }
    }
}

/// Dense matrix of an operator between labeled finite bases, with a uniform
/// bound on the error of each entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
    in_basis: BasisLabel,
    out_basis: BasisLabel,
    entry_error: f64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    rows: usize,
    cols: usize,
    in_basis: &'a BasisLabel,
    out_basis: &'a BasisLabel,
    entry_error: f64,
    entries: Vec<Vec<[f64; 2]>>,
}

impl OperatorMatrix {
    pub fn new(
        entries: CMatrix,
        in_basis: BasisLabel,
        out_basis: BasisLabel,
        entry_error: f64,
    ) -> Result<Self> {
        if entries.ncols() != in_basis.dim() || entries.nrows() != out_basis.dim() {
            return Err(Error::InvalidArgument(format!(
                "{}x{} matrix does not match bases of dimension {} -> {}",
                entries.nrows(),
                entries.ncols(),
                in_basis.dim(),
                out_basis.dim()
            )));
        }
        if !(entry_error >= 0.0 && entry_error.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "entry error {entry_error} is not finite"
            )));
        }
        Ok(Self {
            entries,
            in_basis,
            out_basis,
            entry_error,
        })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn in_basis(&self) -> &BasisLabel {
        &self.in_basis
    }

    pub fn out_basis(&self) -> &BasisLabel {
        &self.out_basis
    }

    pub fn entry_error(&self) -> f64 {
        self.entry_error
    }

    /// Bound on how far any singular value can sit from the exact one:
    /// `entry_error · √(rows · cols)`.
    pub fn perturbation_bound(&self) -> f64 {
        self.entry_error * ((self.rows() * self.cols()) as f64).sqrt()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            in_basis: self.out_basis.clone(),
            out_basis: self.in_basis.clone(),
            entry_error: self.entry_error,
        }
    }

    /// Row-major CSV, one `"re,im"` cell per entry.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(vec![]);
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let c = self.entries[(i, j)];
                    format!("{},{}", c.re, c.im)
                })
                .collect();
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }

    /// JSON envelope carrying basis labels and the entry error.
    pub fn to_json(&self) -> String {
        let entries = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| [self.entries[(i, j)].re, self.entries[(i, j)].im])
                    .collect()
            })
            .collect();
        serde_json::to_string(&Envelope {
            rows: self.rows(),
            cols: self.cols(),
            in_basis: &self.in_basis,
            out_basis: &self.out_basis,
            entry_error: self.entry_error,
            entries,
        })
        .expect("envelope serializes")
    }
}

/// Error in the stored coefficients themselves. Only products are
/// approximated inside the window; every other variant stores exact values.
fn coefficient_error(phi: &SymbolExpr, w: &FourierWindow) -> f64 {
    fn has_product(s: &SymbolExpr) -> bool {
        match s {
            SymbolExpr::Product(..) => true,
            SymbolExpr::Conjugate(x) | SymbolExpr::Sum(x, _) => has_product(x),
            _ => false,
        }
    }
    if has_product(phi) {
        w.tail_bound()
    } else {
        0.0
    }
}

/// `T_φ` from `span{z⁰..z^{cols-1}}` to `span{z⁰..z^{rows-1}}`: entry `(j,k) = φ̂(j-k)`.
pub fn toeplitz_matrix(
    phi: &SymbolExpr,
    rows: usize,
    cols: usize,
    tol: f64,
) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    let w = symbol_to_window(
        phi,
        -(cols as i64 - 1).max(0)..=(rows as i64 - 1).max(0),
        tol,
    )?;
    let entries = CMatrix::from_fn(rows, cols, |j, k| w.coeff(j as i64 - k as i64));
    OperatorMatrix::new(
        entries,
        BasisLabel::Analytic { from: 0, len: cols },
        BasisLabel::Analytic { from: 0, len: rows },
        coefficient_error(phi, &w),
    )
}

/// `H_φ = P_-(φ ·)` from `span{z⁰..z^{cols-1}}` to `span{z̄¹..z̄^{out_rows}}`:
/// entry `(j,k) = φ̂(-j-k)` for output `z̄^j`.
pub fn hankel_matrix(
    phi: &SymbolExpr,
    out_rows: usize,
    cols: usize,
    tol: f64,
) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    let deepest = -((out_rows + cols) as i64 - 1).max(1);
    let w = symbol_to_window(phi, deepest..=-1, tol)?;
    let entries = CMatrix::from_fn(out_rows, cols, |j, k| w.coeff(-(j as i64 + 1) - k as i64));
    OperatorMatrix::new(
        entries,
        BasisLabel::Analytic { from: 0, len: cols },
        BasisLabel::AntiAnalytic {
            from: 1,
            len: out_rows,
        },
        coefficient_error(phi, &w),
    )
}

/// `S_φ = P_- M_φ|_{H²_-}` on `span{z̄¹..z̄^size}`: entry `(j,k) = φ̂(k-j)`.
pub fn dual_toeplitz_matrix(phi: &SymbolExpr, size: usize, tol: f64) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    let span = (size as i64 - 1).max(0);
    let w = symbol_to_window(phi, -span..=span, tol)?;
    let entries = CMatrix::from_fn(size, size, |j, k| w.coeff(k as i64 - j as i64));
    OperatorMatrix::new(
        entries,
        BasisLabel::AntiAnalytic { from: 1, len: size },
        BasisLabel::AntiAnalytic { from: 1, len: size },
        coefficient_error(phi, &w),
    )
}

/// `A_φ = P_{K_u} M_φ|_{K_u}` in the given orthonormal basis:
/// entry `(j,k) = ⟨φ e_k, e_j⟩`.
pub fn truncated_toeplitz(
    basis: &ModelBasis,
    phi: &SymbolExpr,
    tol: f64,
) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    let d = basis.dim();
    let reach = basis.max_index();
    // ⟨φ e_k, e_j⟩ only sees φ̂ on [-reach, reach]
    let w = symbol_to_window(phi, -reach..=reach, tol)?;
    let coeff_err = coefficient_error(phi, &w);
    let sup = phi.sup_bound();
    let mut entries = CMatrix::zeros(d, d);
    let mut err: f64 = 0.0;
    for (k, ek) in basis.basis().iter().enumerate() {
        let image = window_multiply(&w.restrict(-reach, reach), ek);
        for (j, ej) in basis.basis().iter().enumerate() {
            entries[(j, k)] = window_inner_product(&image, ej);
            let trunc = sup * (ek.tail_bound() + ek.norm_l2() * ej.tail_bound());
            err = err.max(trunc + coeff_err * ek.norm_l1() * ej.norm_l1());
        }
    }
    let label = BasisLabel::ModelSpace { dim: d };
    OperatorMatrix::new(entries, label.clone(), label, err)
}

/// Compressed shift `S_u = A_z`.
pub fn compressed_shift(basis: &ModelBasis) -> Result<OperatorMatrix> {
    truncated_toeplitz(basis, &SymbolExpr::z(), 1e-12)
}

/// Images of the orthonormal basis under the two pieces of
/// `B_φ = M_u T_{ūφ}|_{K_u} + H_φ|_{K_u}`.
#[derive(Debug, Clone)]
pub struct BImages {
    /// Coefficients of `P(ūφ e_k)` on `z⁰, z¹, …`.
    pub toeplitz: OperatorMatrix,
    /// Coefficients of `P_-(φ e_k)` on `z̄¹, z̄², …`.
    pub hankel: OperatorMatrix,
    /// ℓ² error bound per column, shared by both pieces.
    pub column_error: f64,
}

/// `B_φ` split into its `uH²` and `H²_-` components, one column per basis
/// vector.
pub fn b_images(basis: &ModelBasis, phi: &SymbolExpr, tol: f64) -> Result<BImages> {
    check_tol(tol)?;
    let u_sym = SymbolExpr::from(basis.inner());
    let tilted = u_sym.conj().times(phi.clone());
    let reach = basis.max_index();
    let mut inner_tol = tol / (8.0 * (1.0 + phi.sup_bound()));
    let mut best: Option<BImages> = None;
    for _ in 0..6 {
        let tw = symbol_to_window(&tilted, -reach..=reach, inner_tol)?;
        let pw = symbol_to_window(phi, -reach..=reach, inner_tol)?;
        let mut t_cols = Vec::with_capacity(basis.dim());
        let mut h_cols = Vec::with_capacity(basis.dim());
        let mut col_err: f64 = 0.0;
        for ek in basis.basis() {
            let t = window_multiply(&tw, ek).analytic_part().trimmed();
            let h = window_multiply(&pw, ek).coanalytic_part().trimmed();
            col_err = col_err.max(t.tail_bound()).max(h.tail_bound());
            t_cols.push(t);
            h_cols.push(h);
        }
        let t_rows = t_cols.iter().map(|w| w.hi().max(0) + 1).max().unwrap_or(1) as usize;
        let h_rows = h_cols.iter().map(|w| (-w.lo()).max(1)).max().unwrap_or(1) as usize;
        let tm = CMatrix::from_fn(t_rows, basis.dim(), |i, k| t_cols[k].coeff(i as i64));
        let hm = CMatrix::from_fn(h_rows, basis.dim(), |i, k| h_cols[k].coeff(-(i as i64) - 1));
        let label = BasisLabel::ModelSpace { dim: basis.dim() };
        let images = BImages {
            toeplitz: OperatorMatrix::new(
                tm,
                label.clone(),
                BasisLabel::Analytic {
                    from: 0,
                    len: t_rows,
                },
                col_err,
            )?,
            hankel: OperatorMatrix::new(
                hm,
                label,
                BasisLabel::AntiAnalytic {
                    from: 1,
                    len: h_rows,
                },
                col_err,
            )?,
            column_error: col_err,
        };
        let done = col_err * 3.0 * (1.0 + phi.sup_bound()) <= tol;
        let improved = best.as_ref().is_none_or(|b| col_err < b.column_error * 0.5);
        if done || !improved {
            return Ok(if improved { images } else { best.unwrap() });
        }
        best = Some(images);
        inner_tol *= 1e-3;
    }
    Ok(best.expect("at least one pass"))
}

impl BImages {
    fn gram_error(&self, m: &OperatorMatrix) -> f64 {
        let norm = (0..m.cols())
            .map(|k| m.entries().column(k).norm())
            .fold(0.0, f64::max);
        2.0 * norm * self.column_error + self.column_error * self.column_error
    }

    /// `⟨T_{ūφ} e_k, T_{ūφ} e_j⟩`.
    pub fn toeplitz_gram(&self) -> OperatorMatrix {
        let e = self.toeplitz.entries();
        let label = self.toeplitz.in_basis().clone();
        OperatorMatrix::new(
            e.adjoint() * e,
            label.clone(),
            label,
            self.gram_error(&self.toeplitz),
        )
        .expect("square gram")
    }

    /// `⟨H_φ e_k, H_φ e_j⟩`.
    pub fn hankel_gram(&self) -> OperatorMatrix {
        let e = self.hankel.entries();
        let label = self.hankel.in_basis().clone();
        OperatorMatrix::new(
            e.adjoint() * e,
            label.clone(),
            label,
            self.gram_error(&self.hankel),
        )
        .expect("square gram")
    }
}

/// Gram matrix `B_φ* B_φ` on `K_u`, assembled from the orthogonal ranges
/// `uH²` and `H²_-`.
pub fn b_gram(basis: &ModelBasis, phi: &SymbolExpr, tol: f64) -> Result<OperatorMatrix> {
    let images = b_images(basis, phi, tol)?;
    let t = images.toeplitz_gram();
    let h = images.hankel_gram();
    let err = t.entry_error() + h.entry_error();
    let label = t.in_basis().clone();
    OperatorMatrix::new(t.entries() + h.entries(), label.clone(), label, err)
}

fn analytic_and_anti(n: usize) -> BasisLabel {
    BasisLabel::DirectSum {
        parts: vec![
            BasisLabel::InnerMultiple { from: 0, len: n },
            BasisLabel::AntiAnalytic { from: 1, len: n },
        ],
    }
}

/// `(2N)×(2N)` Galerkin compression of `U* D_φ U` on
/// `{zⁿ}_{0}^{N-1} ⊕ {z̄ⁿ}_{1}^{N}`.
pub fn dtto_block(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    n: usize,
    tol: f64,
) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation must be at least 1".into(),
        ));
    }
    let u_sym = SymbolExpr::from(u);
    let tl = toeplitz_matrix(phi, n, n, tol)?;
    let bl = hankel_matrix(&u_sym.clone().times(phi.clone()), n, n, tol)?;
    let tr = hankel_matrix(&u_sym.times(phi.conj()), n, n, tol)?.adjoint();
    let br = dual_toeplitz_matrix(phi, n, tol)?;
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(tl.entries());
    m.view_mut((0, n), (n, n)).copy_from(tr.entries());
    m.view_mut((n, 0), (n, n)).copy_from(bl.entries());
    m.view_mut((n, n), (n, n)).copy_from(br.entries());
    let err = [
        tl.entry_error(),
        tr.entry_error(),
        bl.entry_error(),
        br.entry_error(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    OperatorMatrix::new(m, analytic_and_anti(n), analytic_and_anti(n), err)
}

/// `D_φ` on the `2N`-dimensional input block `{u zⁿ}_{0}^{N-1} ⊕ {z̄ⁿ}_{1}^{N}`
/// with the output widened until each column's omitted image is `≤ tol/√(2N)`.
///
/// Rows are `{u zⁿ}_{0}^{Ra-1} ⊕ {z̄ⁿ}_{1}^{Rb}` in the same frame.
pub fn dtto_rectangular(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    n: usize,
    tol: f64,
) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation must be at least 1".into(),
        ));
    }
    let u_sym = SymbolExpr::from(u);
    let col_tol = tol / (2.0 * (2 * n) as f64).sqrt();
    let span = if phi.has_piecewise_part() {
        8 * n as i64
    } else {
        n as i64
    };
    let pw = symbol_to_window(phi, -span..=span, col_tol)?;
    let up = symbol_to_window(&u_sym.clone().times(phi.clone()), -span..=span, col_tol)?;
    let ubp = symbol_to_window(&u_sym.conj().times(phi.clone()), -span..=span, col_tol)?;
    let nn = n as i64;
    let ra = (nn - 1 + pw.hi()).max(ubp.hi() - 1).max(nn - 1) + 1;
    let rb = (nn - pw.lo()).max(-up.lo()).max(nn);
    let (ra, rb) = (ra as usize, rb as usize);
    let mut m = CMatrix::zeros(ra + rb, 2 * n);
    for k in 0..n {
        let kk = k as i64;
        for j in 0..ra {
            m[(j, k)] = pw.coeff(j as i64 - kk);
        }
        for j in 1..=rb {
            m[(ra + j - 1, k)] = up.coeff(-(j as i64) - kk);
        }
    }
    for k in 1..=n {
        let kk = k as i64;
        for j in 0..ra {
            m[(j, n + k - 1)] = ubp.coeff(j as i64 + kk);
        }
        for j in 1..=rb {
            m[(ra + j - 1, n + k - 1)] = pw.coeff(kk - j as i64);
        }
    }
    let col_err = pw.tail_bound() + up.tail_bound().max(ubp.tail_bound());
    let out = BasisLabel::DirectSum {
        parts: vec![
            BasisLabel::InnerMultiple { from: 0, len: ra },
            BasisLabel::AntiAnalytic { from: 1, len: rb },
        ],
    };
    OperatorMatrix::new(m, analytic_and_anti(n), out, col_err)
}

/// Matrix `M` of the conjugation `C_u f = u·conj(z f)` on the block
/// `{u zⁿ}_{0}^{N-1} ⊕ {z̄ⁿ}_{1}^{N}`: `C_u(x) = M · conj(x)` in coordinates.
///
/// Each column is computed from Fourier windows of `u`; the result is the
/// swap `u zⁿ ↔ z̄^{n+1}` up to `entry_error`.
pub fn conjugation_action(u: &BlaschkeProduct, n: usize, tol: f64) -> Result<OperatorMatrix> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation must be at least 1".into(),
        ));
    }
    let uw = u.window(tol / 4.0)?;
    let z = FourierWindow::monomial(1, C64::new(1.0, 0.0));
    let inputs: Vec<FourierWindow> = (0..n)
        .map(|k| uw.shift(k as i64))
        .chain((1..=n).map(|k| FourierWindow::monomial(-(k as i64), C64::new(1.0, 0.0))))
        .collect();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    let mut err: f64 = 0.0;
    for (col, f) in inputs.iter().enumerate() {
        let g = window_multiply(&uw, &window_conjugate(&window_multiply(&z, f)));
        for k in 0..n {
            let target = uw.shift(k as i64);
            m[(k, col)] = window_inner_product(&g, &target);
            err = err.max(crate::fourier::inner_product_error(&g, &target));
        }
        for k in 1..=n {
            m[(n + k - 1, col)] = g.coeff(-(k as i64));
            err = err.max(g.tail_bound());
        }
    }
    OperatorMatrix::new(m, analytic_and_anti(n), analytic_and_anti(n), err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::LaurentPoly;
    use crate::linalg::{hermitian_eigenvalues, identity, max_abs};
    use crate::modelspace::{project_onto_ku, tm_basis};
    use crate::test_util::random_inner;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one() -> SymbolExpr {
        SymbolExpr::constant(c(1.0, 0.0))
    }

    fn zbar() -> SymbolExpr {
        SymbolExpr::monomial(-1, c(1.0, 0.0))
    }

    #[test]
    fn toeplitz_of_one_and_z() {
        let t = toeplitz_matrix(&one(), 4, 4, 1e-12).unwrap();
        assert_eq!(t.entries(), &identity(4));
        let s = toeplitz_matrix(&SymbolExpr::z(), 4, 4, 1e-12).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let want = if j == k + 1 { 1.0 } else { 0.0 };
                assert_eq!(s.entries()[(j, k)], c(want, 0.0));
            }
        }
        assert_eq!(s.entry_error(), 0.0);
    }

    #[test]
    fn toeplitz_zbar_cubed_kills_degree_one() {
        let t = toeplitz_matrix(&SymbolExpr::monomial(-3, c(1.0, 0.0)), 6, 2, 1e-12).unwrap();
        assert_eq!(max_abs(t.entries()), 0.0);
    }

    #[test]
    fn hankel_examples() {
        let analytic =
            SymbolExpr::laurent(0, vec![c(1.0, 2.0), c(0.5, 0.0), c(0.0, -3.0)]).unwrap();
        assert_eq!(
            max_abs(hankel_matrix(&analytic, 5, 5, 1e-12).unwrap().entries()),
            0.0
        );

        let h = hankel_matrix(&zbar(), 3, 2, 1e-12).unwrap();
        assert_eq!(h.entries()[(0, 0)], c(1.0, 0.0));
        assert_eq!(h.entries().column(1).norm(), 0.0);
        assert_eq!(h.entries().column(0).norm(), 1.0);
    }

    #[test]
    fn hankel_column_norm_for_blaschke_example() {
        let alpha = 0.5;
        let phi = SymbolExpr::blaschke_quotient(c(1.0, 0.0), -1, vec![c(alpha, 0.0)]).unwrap();
        let h = hankel_matrix(&phi.conj(), 80, 1, 1e-14).unwrap();
        let norm2 = h.entries().column(0).norm_squared();
        assert!((norm2 - alpha * alpha * (1.0 - alpha * alpha)).abs() < 1e-13);
    }

    #[test]
    fn dual_toeplitz_examples() {
        assert_eq!(
            dual_toeplitz_matrix(&one(), 5, 1e-12).unwrap().entries(),
            &identity(5)
        );
        let q = dual_toeplitz_matrix(&SymbolExpr::z(), 5, 1e-12).unwrap();
        assert_eq!(q.entries().column(0).norm(), 0.0);
        for k in 1..5 {
            assert_eq!(q.entries()[(k - 1, k)], c(1.0, 0.0));
            assert_eq!(q.entries().column(k).norm(), 1.0);
        }
        let qa = dual_toeplitz_matrix(&zbar(), 5, 1e-12).unwrap();
        assert_eq!(qa.entries(), &q.entries().adjoint());
    }

    #[test]
    fn truncated_toeplitz_examples() {
        let b = tm_basis(&BlaschkeProduct::monomial(2), 1e-12).unwrap();
        let a = truncated_toeplitz(&b, &SymbolExpr::z(), 1e-12).unwrap();
        assert!((a.entries()[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(
            a.entries()[(0, 0)].norm() + a.entries()[(0, 1)].norm() + a.entries()[(1, 1)].norm()
                < 1e-15
        );

        let lambda = c(0.3, -0.4);
        let b = tm_basis(&BlaschkeProduct::factor(lambda).unwrap(), 1e-13).unwrap();
        let a = truncated_toeplitz(&b, &SymbolExpr::z(), 1e-12).unwrap();
        assert!((a.entries()[(0, 0)].norm() - lambda.norm()).abs() < 1e-12);
    }

    #[test]
    fn truncated_toeplitz_of_inner_symbol_vanishes() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let u = random_inner(&mut rng, 5, 0.85);
            let b = tm_basis(&u, 1e-13).unwrap();
            let a = truncated_toeplitz(&b, &SymbolExpr::from(&u), 1e-12).unwrap();
            assert!(max_abs(a.entries()) < 1e-10, "{}", max_abs(a.entries()));
        }
    }

    #[test]
    fn compressed_shift_defect() {
        let s = compressed_shift(&tm_basis(&BlaschkeProduct::monomial(2), 1e-12).unwrap()).unwrap();
        let defect = identity(2) - s.entries().adjoint() * s.entries();
        let ev = hermitian_eigenvalues(&defect);
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);

        let s = compressed_shift(
            &tm_basis(&BlaschkeProduct::factor(c(0.5, 0.0)).unwrap(), 1e-13).unwrap(),
        )
        .unwrap();
        let ss = s.entries().adjoint() * s.entries();
        assert!((ss[(0, 0)].re - 0.25).abs() < 1e-12);

        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let zeros = vec![
                C64::from_polar(
                    rng.gen_range(0.05..0.9),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ),
                C64::from_polar(
                    rng.gen_range(0.05..0.9),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ),
            ];
            let u = BlaschkeProduct::from_zeros(zeros).unwrap();
            let s = compressed_shift(&tm_basis(&u, 1e-13).unwrap()).unwrap();
            let ev = hermitian_eigenvalues(&(s.entries().adjoint() * s.entries()));
            let u0 = u.abs_at_zero();
            assert!(
                (ev[0] - u0 * u0).abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10,
                "{ev:?}"
            );
        }
    }

    #[test]
    fn compressed_shift_defect_is_backward_shift_of_u() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..10 {
            let u = random_inner(&mut rng, 5, 0.85);
            let b = tm_basis(&u, 1e-13).unwrap();
            let s = compressed_shift(&b).unwrap();
            let uw = u.window(1e-15).unwrap();
            let back = uw.restrict(1, uw.hi()).shift(-1);
            let x = nalgebra::DVector::from_vec(project_onto_ku(&b, &back));
            let rank_one = &x * x.adjoint();
            let defect = identity(b.dim()) - s.entries().adjoint() * s.entries();
            assert!(max_abs(&(defect - rank_one)) < 1e-10);
        }
    }

    #[test]
    fn b_gram_constant_symbol_is_zero() {
        let b = tm_basis(
            &BlaschkeProduct::from_zeros(vec![c(0.4, 0.1), c(-0.2, 0.6)]).unwrap(),
            1e-13,
        )
        .unwrap();
        let g = b_gram(&b, &SymbolExpr::constant(C64::from_polar(1.0, 0.7)), 1e-10).unwrap();
        assert!(max_abs(g.entries()) < 1e-10);
    }

    #[test]
    fn b_gram_completes_truncated_toeplitz() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..8 {
            let u = random_inner(&mut rng, 4, 0.8);
            let b = tm_basis(&u, 1e-14).unwrap();
            let zeros = (0..rng.gen_range(0..3))
                .map(|_| {
                    C64::from_polar(
                        rng.gen_range(0.0..0.8),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            let phi = SymbolExpr::blaschke_quotient(
                C64::from_polar(1.0, 1.1),
                rng.gen_range(-2..=2),
                zeros,
            )
            .unwrap();
            let a = truncated_toeplitz(&b, &phi, 1e-12).unwrap();
            let g = b_gram(&b, &phi, 1e-10).unwrap();
            assert!(g.entry_error() <= 1e-10, "{}", g.entry_error());
            let sum = g.entries() + a.entries().adjoint() * a.entries();
            assert!(max_abs(&(sum - identity(b.dim()))) < 1e-9);
        }
    }

    #[test]
    fn b_gram_of_zbar_on_z_squared() {
        let b = tm_basis(&BlaschkeProduct::monomial(2), 1e-12).unwrap();
        let g = b_gram(&b, &zbar(), 1e-12).unwrap();
        let ev = hermitian_eigenvalues(g.entries());
        assert!((ev[1] - 1.0).abs() < 1e-14 && ev[0].abs() < 1e-14);
    }

    #[test]
    fn dtto_block_examples() {
        let u = BlaschkeProduct::from_zeros(vec![c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
        let d = dtto_block(&u, &one(), 6, 1e-12).unwrap();
        assert!(max_abs(&(d.entries() - identity(12))) < 1e-12);

        let n = 6;
        let d = dtto_block(&u, &SymbolExpr::z(), n, 1e-13).unwrap();
        let tr = d.entries().view((0, n), (n, n)).clone_owned();
        let mut want = CMatrix::zeros(n, n);
        want[(0, 0)] = u.value_at_zero().conj();
        assert!(max_abs(&(tr - want)) < 1e-12);

        let u0 = BlaschkeProduct::from_zeros(vec![c(0.0, 0.0), c(0.5, 0.5)]).unwrap();
        let d = dtto_block(&u0, &SymbolExpr::z(), n, 1e-13).unwrap();
        assert!(max_abs(&d.entries().view((0, n), (n, n)).clone_owned()) < 1e-13);
    }

    #[test]
    fn dtto_defect_identity_on_interior() {
        let mut rng = StdRng::seed_from_u64(5);
        let n = 64;
        for _ in 0..4 {
            let u = random_inner(&mut rng, 4, 0.9);
            let d = dtto_block(&u, &SymbolExpr::z(), n, 1e-12).unwrap();
            let dd = d.entries().adjoint() * d.entries();
            let u0 = u.abs_at_zero();
            let mut want = identity(2 * n);
            want[(n, n)] -= c(1.0 - u0 * u0, 0.0);
            let interior: Vec<usize> = (0..n - 1).chain(n..2 * n - 1).collect();
            for &i in &interior {
                for &j in &interior {
                    assert!((dd[(i, j)] - want[(i, j)]).norm() < 1e-12 + d.entry_error());
                }
            }
        }
    }

    #[test]
    fn conjugation_swaps_coordinates() {
        let n = 4;
        let m = conjugation_action(&BlaschkeProduct::monomial(2), n, 1e-12).unwrap();
        for k in 0..n {
            assert!((m.entries()[(n + k, k)] - c(1.0, 0.0)).norm() < 1e-12);
            assert!((m.entries()[(k, n + k)] - c(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(max_abs(&(m.entries() * m.entries().map(|x| x.conj()) - identity(2 * n))) < 1e-12);
    }

    #[test]
    fn conjugation_is_an_involution_and_symmetrizes_dtto() {
        let mut rng = StdRng::seed_from_u64(8);
        let n = 12;
        for _ in 0..5 {
            let u = random_inner(&mut rng, 4, 0.8);
            let m = conjugation_action(&u, n, 1e-12).unwrap();
            assert!(m.entry_error() < 1e-10);
            let unitary = m.entries().adjoint() * m.entries();
            assert!(max_abs(&(unitary - identity(2 * n))) < 1e-10);
            for _ in 0..20 {
                let x = nalgebra::DVector::from_fn(2 * n, |_, _| {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let once = m.entries() * x.map(|v| v.conj());
                let twice = m.entries() * once.map(|v| v.conj());
                assert!((twice - &x).norm() < 1e-10);
            }
            let phi = SymbolExpr::laurent(
                -2,
                vec![
                    c(0.3, 0.1),
                    c(0.0, 1.0),
                    c(0.5, 0.0),
                    c(-0.2, 0.4),
                    c(0.1, 0.1),
                ],
            )
            .unwrap();
            let d = dtto_block(&u, &phi, n, 1e-13).unwrap();
            let cdc = m.entries() * d.entries().map(|v| v.conj()) * m.entries().map(|v| v.conj());
            assert!(max_abs(&(cdc - d.entries().adjoint())) < 1e-9);
        }
    }

    #[test]
    fn rectangular_block_contains_square_block() {
        let u = BlaschkeProduct::from_zeros(vec![c(0.2, 0.3), c(-0.6, 0.0)]).unwrap();
        let phi = SymbolExpr::blaschke_quotient(c(1.0, 0.0), -1, vec![c(0.5, 0.0)]).unwrap();
        let n = 5;
        let sq = dtto_block(&u, &phi, n, 1e-13).unwrap();
        let rect = dtto_rectangular(&u, &phi, n, 1e-12).unwrap();
        let ra = match rect.out_basis() {
            BasisLabel::DirectSum { parts } => parts[0].dim(),
            _ => unreachable!(),
        };
        for j in 0..n {
            for k in 0..2 * n {
                assert!((rect.entries()[(j, k)] - sq.entries()[(j, k)]).norm() < 1e-12);
                assert!((rect.entries()[(ra + j, k)] - sq.entries()[(n + j, k)]).norm() < 1e-12);
            }
        }
        for k in 0..2 * n {
            assert!((rect.entries().column(k).norm() - 1.0).abs() < 1.0);
        }
    }

    #[test]
    fn exports() {
        let t = toeplitz_matrix(&SymbolExpr::monomial(1, c(0.5, -1.0)), 2, 2, 1e-12).unwrap();
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().nth(1).unwrap(), "\"0.5,-1\",\"0,0\"");
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["rows"], 2);
        assert_eq!(v["entry_error"], 0.0);
        assert_eq!(v["in_basis"]["kind"], "analytic");
        assert_eq!(v["entries"][1][0][1], -1.0);
        assert_eq!(t.perturbation_bound(), 0.0);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let e = OperatorMatrix::new(
            identity(2),
            BasisLabel::ModelSpace { dim: 3 },
            BasisLabel::ModelSpace { dim: 2 },
            0.0,
        );
        assert!(matches!(e, Err(Error::InvalidArgument(_))));
    }

    fn laurent() -> impl Strategy<Value = SymbolExpr> {
        (
            -4i64..=2,
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        )
            .prop_map(|(off, cs)| {
                SymbolExpr::Laurent(
                    LaurentPoly::new(off, cs.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap(),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn toeplitz_adjoint_symmetry(phi in laurent(), n in 1usize..8) {
            let t = toeplitz_matrix(&phi, n, n, 1e-12).unwrap();
            let ta = toeplitz_matrix(&phi.conj(), n, n, 1e-12).unwrap();
            prop_assert!(max_abs(&(ta.entries() - t.entries().adjoint())) < 1e-15);
        }

        #[test]
        fn unimodular_defect_per_basis_vector(seed in 0u64..1000, power in -2i64..=2, arg in 0.0f64..std::f64::consts::TAU) {
            let mut rng = StdRng::seed_from_u64(seed);
            let u = random_inner(&mut rng, 4, 0.8);
            let b = tm_basis(&u, 1e-14).unwrap();
            let zeros = vec![C64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..std::f64::consts::TAU))];
            let phi = SymbolExpr::blaschke_quotient(C64::from_polar(1.0, arg), power, zeros).unwrap();
            let a = truncated_toeplitz(&b, &phi, 1e-12).unwrap();
            let g = b_gram(&b, &phi, 1e-10).unwrap();
            for k in 0..b.dim() {
                let af = a.entries().column(k).norm_squared();
                prop_assert!((af + g.entries()[(k, k)].re - 1.0).abs() < 1e-8);
            }
        }

        #[test]
        fn rank_one_spectrum(seed in 0u64..1000, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
            let mut rng = StdRng::seed_from_u64(seed);
            let u = random_inner(&mut rng, 5, 0.9);
            let b = tm_basis(&u, 1e-13).unwrap();
            let s = compressed_shift(&b).unwrap();
            let defect = identity(b.dim()) - s.entries().adjoint() * s.entries();
            let x2 = defect.trace().re;
            let t = identity(b.dim()) * c(alpha, 0.0) + defect * c(beta, 0.0);
            let ev = hermitian_eigenvalues(&t);
            if ev.len() == 1 {
                prop_assert!((ev[0] - alpha - beta * x2).abs() < 1e-10);
                return Ok(());
            }
            let (lo, hi) = if beta >= 0.0 { (alpha, alpha + beta * x2) } else { (alpha + beta * x2, alpha) };
            prop_assert!((ev[0] - lo).abs() < 1e-10);
            prop_assert!((ev[ev.len() - 1] - hi).abs() < 1e-10);
            for e in &ev[1..ev.len() - 1] {
                prop_assert!((e - alpha).abs() < 1e-10);
            }
        }
    }
}
