//! Minimum moduli and reduced minimum moduli.
//!
//! The authoritative values come from finite reductions to `K_u`, which has
//! dimension `deg u`. The Galerkin sweep on `K_u^⊥` is a consistency probe:
//! its values are upper bounds that settle as the truncation grows.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_tol, Error, Result};
use crate::fourier::{symbol_to_window, window_multiply, BlaschkeProduct, SymbolExpr};
use crate::linalg::{hermitian_eigenvalues, max_abs, sigma_max, singular_values, CMatrix};
use crate::modelspace::{tm_basis, ModelBasis};
use crate::operators::{b_images, dtto_rectangular, truncated_toeplitz, OperatorMatrix};

/// Default relative rank threshold for kernel detection.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Zeros closer than this are treated as the same point when testing
/// whether `u` divides an inner symbol.
const ZERO_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FiniteExact,
    GalerkinSweep,
    Oracle,
    Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinModReport {
    pub value: f64,
    pub method: Method,
    pub truncation: Option<usize>,
    pub entry_error: f64,
    pub oracle: Option<f64>,
    pub discrepancy: Option<f64>,
    pub operator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub cross_checks: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MinModReport {
    pub fn new(operator: &str, value: f64, method: Method, entry_error: f64) -> Self {
        Self {
            value: value.max(0.0),
            method,
            truncation: None,
            entry_error,
            oracle: None,
            discrepancy: None,
            operator: operator.to_string(),
            lower: None,
            upper: None,
            cross_checks: BTreeMap::new(),
            note: None,
        }
    }

    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.oracle = Some(oracle);
        self.discrepancy = Some((self.value - oracle).abs());
        self
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn with_cross_check(mut self, name: &str, value: f64) -> Self {
        self.cross_checks.insert(name.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Smallest singular value together with the perturbation it may carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEstimate {
    pub value: f64,
    pub perturbation: f64,
}

pub fn sigma_min(m: &OperatorMatrix) -> Result<SingularEstimate> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    Ok(SingularEstimate {
        value: crate::linalg::sigma_min(m.entries()),
        perturbation: m.perturbation_bound(),
    })
}

fn basis_for(u: &BlaschkeProduct, tol: f64) -> Result<ModelBasis> {
    if u.degree() == 0 {
        return Err(Error::ConstantInner);
    }
    tm_basis(u, (tol * 1e-2).max(1e-15))
}

fn require_unimodular(phi: &SymbolExpr) -> Result<()> {
    if phi.is_unimodular() {
        Ok(())
    } else {
        Err(Error::NotUnimodular)
    }
}

/// `m(D_φ) = σ_min(A_φ̄)` for unimodular `φ`, computed on `K_u`.
pub fn min_modulus_unimodular(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    tol: f64,
) -> Result<MinModReport> {
    check_tol(tol)?;
    require_unimodular(phi)?;
    let basis = basis_for(u, tol)?;
    let a = truncated_toeplitz(&basis, &phi.conj(), tol)?;
    let s = sigma_min(&a)?;
    Ok(MinModReport::new(
        "D_phi",
        s.value,
        Method::FiniteExact,
        s.perturbation,
    ))
}

/// `m(D_φ) = √(1 − λ_max(G))` with `G` the Gram matrix of
/// `f ↦ (T_{ūφ̄} f, H_φ̄ f)` on `K_u`.
pub fn min_modulus_thm55(u: &BlaschkeProduct, phi: &SymbolExpr, tol: f64) -> Result<MinModReport> {
    check_tol(tol)?;
    require_unimodular(phi)?;
    let basis = basis_for(u, tol)?;
    let images = b_images(&basis, &phi.conj(), tol)?;
    let t = images.toeplitz_gram();
    let h = images.hankel_gram();
    let gram = t.entries() + h.entries();
    let lambda = *hermitian_eigenvalues(&gram).last().expect("nonempty");
    let gram_err = (t.entry_error() + h.entry_error()) * basis.dim() as f64;
    let value = (1.0 - lambda).max(0.0).sqrt();
    // √ is not Lipschitz at 0, so near zero the error is √(gram_err)
    let err = if value > 0.0 {
        (gram_err / value).min(gram_err.sqrt())
    } else {
        gram_err.sqrt()
    };
    Ok(MinModReport::new("D_phi", value, Method::FiniteExact, err))
}

/// Two-sided bracket for `m(D_φ)` from the separate norms of the Toeplitz
/// and Hankel pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinModBounds {
    pub lower: f64,
    pub upper: f64,
    pub toeplitz_norm: f64,
    pub hankel_norm: f64,
}

pub fn min_modulus_bounds(u: &BlaschkeProduct, phi: &SymbolExpr, tol: f64) -> Result<MinModBounds> {
    check_tol(tol)?;
    require_unimodular(phi)?;
    let basis = basis_for(u, tol)?;
    let images = b_images(&basis, &phi.conj(), tol)?;
    let t = sigma_max(images.toeplitz.entries());
    let h = sigma_max(images.hankel.entries());
    let root = |x: f64| (1.0 - x).max(0.0).sqrt();
    Ok(MinModBounds {
        lower: root(t * t + h * h),
        upper: root(t * t).min(root(h * h)),
        toeplitz_norm: t,
        hankel_norm: h,
    })
}

/// `m(B_φ)` for unimodular or analytic `φ`.
///
/// Analytic symbols use `σ_min(T_{ūφ}|_{K_u})` directly; unimodular ones use
/// `√(1 − ‖A_φ‖²)`. When both apply, the second is kept as a cross-check.
pub fn min_modulus_b(u: &BlaschkeProduct, phi: &SymbolExpr, tol: f64) -> Result<MinModReport> {
    check_tol(tol)?;
    let unimodular = phi.is_unimodular();
    let analytic = phi.is_analytic();
    if !unimodular && !analytic {
        return Err(Error::Unsupported(
            "m(B_phi) needs a unimodular or analytic symbol".into(),
        ));
    }
    let basis = basis_for(u, tol)?;
    let via_norm = if unimodular {
        let a = truncated_toeplitz(&basis, phi, tol)?;
        let s = sigma_max(a.entries());
        Some(((1.0 - s * s).max(0.0).sqrt(), a.perturbation_bound()))
    } else {
        None
    };
    let mut report = if analytic {
        let images = b_images(&basis, phi, tol)?;
        let value = crate::linalg::sigma_min(images.toeplitz.entries());
        let err = images.column_error * (basis.dim() as f64).sqrt();
        let mut r = MinModReport::new("B_phi", value, Method::FiniteExact, err);
        if let Some((v, _)) = via_norm {
            r = r.with_cross_check("sqrt_one_minus_norm_a_squared", v);
        }
        r
    } else {
        let (v, e) = via_norm.expect("unimodular");
        let err = if v > 0.0 {
            (2.0 * e / v).min((2.0 * e).sqrt())
        } else {
            (2.0 * e).sqrt()
        };
        MinModReport::new("B_phi", v, Method::FiniteExact, err)
    };
    if phi.is_inner() {
        let h = nehari_norm(u, phi, tol)?;
        report = report.with_cross_check(
            "sqrt_one_minus_nehari_squared",
            (1.0 - h * h).max(0.0).sqrt(),
        );
    }
    Ok(report)
}

/// `σ_max` of a truncated Hankel matrix of `ūφ`, sized from its window.
fn nehari_norm(u: &BlaschkeProduct, phi: &SymbolExpr, tol: f64) -> Result<f64> {
    let tilted = SymbolExpr::from(u).conj().times(phi.clone());
    let w = symbol_to_window(&tilted, -1..=0, tol)?;
    let n = (-w.lo()).max(1) as usize;
    let h = crate::operators::hankel_matrix(&tilted, n, n, tol)?;
    Ok(sigma_max(h.entries()))
}

/// `m(D_φ) = m(T_φ̄|_{K_u})` for an inner symbol `φ`.
pub fn min_modulus_inner_symbol(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    tol: f64,
) -> Result<MinModReport> {
    check_tol(tol)?;
    let inner = match phi {
        SymbolExpr::BlaschkeQuotient(q) if q.net_z_power() >= 0 => phi.as_blaschke_product(),
        _ => None,
    }
    .ok_or_else(|| Error::InvalidArgument("expected an analytic Blaschke quotient".into()))?;
    let basis = basis_for(u, tol)?;
    let pw = symbol_to_window(&phi.conj(), -basis.max_index()..=0, tol)?;
    let cols: Vec<_> = basis
        .basis()
        .iter()
        .map(|e| window_multiply(&pw, e).analytic_part())
        .collect();
    let rows = cols.iter().map(|w| w.hi().max(0) + 1).max().unwrap_or(1) as usize;
    let m = CMatrix::from_fn(rows, basis.dim(), |i, k| cols[k].coeff(i as i64));
    let col_err = cols.iter().map(|w| w.tail_bound()).fold(0.0, f64::max);
    let numeric = crate::linalg::sigma_min(&m);
    let err = col_err * (basis.dim() as f64).sqrt();
    let mut report = if crate::oracle::divides(u, &inner, ZERO_MATCH_TOL) {
        MinModReport::new("D_phi", 0.0, Method::Oracle, 0.0)
            .with_note("u divides phi")
            .with_cross_check("sigma_min_t_phi_bar", numeric)
    } else {
        MinModReport::new("D_phi", numeric, Method::FiniteExact, err)
    };
    if u.degree() == 1 {
        report = report.with_oracle(inner.eval(u.zeros()[0]).norm());
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedMinModulus {
    pub value: f64,
    pub kernel_dim: usize,
    pub degenerate: bool,
}

/// Smallest singular value above `rank_tol · ‖M‖`, with the numerical kernel
/// dimension. A matrix with nothing above the threshold reports `0` and
/// `degenerate = true`.
pub fn reduced_min_modulus(m: &OperatorMatrix, rank_tol: f64) -> Result<ReducedMinModulus> {
    check_tol(rank_tol)?;
    let sv = singular_values(m.entries());
    let top = sv.last().copied().unwrap_or(0.0);
    let threshold = rank_tol * top.max(f64::MIN_POSITIVE);
    let small = sv.iter().filter(|&&s| s <= threshold).count();
    let kernel_dim = small + m.cols().saturating_sub(sv.len());
    Ok(match sv.iter().find(|&&s| s > threshold) {
        Some(&v) => ReducedMinModulus {
            value: v,
            kernel_dim,
            degenerate: false,
        },
        None => ReducedMinModulus {
            value: 0.0,
            kernel_dim: m.cols(),
            degenerate: true,
        },
    })
}

/// `σ_min` of `D_φ` on the `2N`-dimensional input block, for each `N` in the
/// schedule. Each value is an upper bound for `m(D_φ)` up to `entry_error`.
pub fn galerkin_sweep(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    schedule: &[usize],
    tol: f64,
) -> Result<Vec<MinModReport>> {
    check_tol(tol)?;
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty truncation schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        return Err(Error::InvalidArgument(
            "truncations must be positive and strictly increasing".into(),
        ));
    }
    schedule
        .par_iter()
        .map(|&n| {
            let m = dtto_rectangular(u, phi, n, tol)?;
            let value = crate::linalg::sigma_min(m.entries());
            let err = m.entry_error() * ((2 * n) as f64).sqrt();
            Ok(MinModReport::new("D_phi", value, Method::GalerkinSweep, err).with_truncation(n))
        })
        .collect()
}

/// Indices `i` where the sweep rises by more than `2·tol` from step `i-1`.
pub fn monotonicity_violations(sweep: &[MinModReport], tol: f64) -> Vec<usize> {
    (1..sweep.len())
        .filter(|&i| sweep[i].value > sweep[i - 1].value + 2.0 * tol)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointCheck {
    pub sigma_min: f64,
    pub sigma_min_adjoint: f64,
    pub difference: f64,
    pub kernel_dim: usize,
    pub adjoint_kernel_dim: usize,
}

pub fn check_minmod_adjoint(m: &OperatorMatrix, rank_tol: f64) -> Result<AdjointCheck> {
    if m.rows() != m.cols() || m.rows() == 0 {
        return Err(Error::InvalidArgument(
            "square nonempty matrix required".into(),
        ));
    }
    let a = sigma_min(m)?.value;
    let b = sigma_min(&m.adjoint())?.value;
    Ok(AdjointCheck {
        sigma_min: a,
        sigma_min_adjoint: b,
        difference: (a - b).abs(),
        kernel_dim: reduced_min_modulus(m, rank_tol)?.kernel_dim,
        adjoint_kernel_dim: reduced_min_modulus(&m.adjoint(), rank_tol)?.kernel_dim,
    })
}

/// `max |M·conj(D)·conj(M) − D*|` for a conjugation matrix `M` in the same
/// coordinates as `D`.
pub fn complex_symmetry_residual(d: &OperatorMatrix, conjugation: &OperatorMatrix) -> Result<f64> {
    if d.rows() != d.cols() || conjugation.rows() != d.rows() || conjugation.cols() != d.cols() {
        return Err(Error::InvalidArgument(
            "matching square matrices required".into(),
        ));
    }
    let m = conjugation.entries();
    let cdc = m * d.entries().map(|x| x.conj()) * m.map(|x| x.conj());
    Ok(max_abs(&(cdc - d.entries().adjoint())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::operators::{
        compressed_shift, conjugation_action, dtto_block, dual_toeplitz_matrix, BasisLabel,
    };
    use crate::test_util::random_inner;
    use crate::C64;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn square(m: CMatrix) -> OperatorMatrix {
        let n = m.nrows();
        OperatorMatrix::new(
            m,
            BasisLabel::Analytic { from: 0, len: n },
            BasisLabel::Analytic { from: 0, len: n },
            0.0,
        )
        .unwrap()
    }

    fn random_matrix(rng: &mut StdRng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Largest eigenvalue of the form `α²|c₁|² + α²(1−α²)|c₀+αc₁|²`.
    fn blaschke_example_oracle(alpha: f64) -> f64 {
        let a = alpha * alpha * (1.0 - alpha * alpha);
        let (p, q, r) = (a, alpha * alpha + a * alpha * alpha, a * alpha);
        let lambda = 0.5 * (p + q + ((p - q) * (p - q) + 4.0 * r * r).sqrt());
        (1.0 - lambda).sqrt()
    }

    fn blaschke_example_symbol(alpha: f64) -> SymbolExpr {
        SymbolExpr::blaschke_quotient(c(1.0, 0.0), -1, vec![c(alpha, 0.0)]).unwrap()
    }

    #[test]
    fn sigma_min_basics() {
        assert!((sigma_min(&square(identity(5))).unwrap().value - 1.0).abs() < 1e-15);
        let mut m = identity(4);
        m.column_mut(2).fill(c(0.0, 0.0));
        assert_eq!(sigma_min(&square(m)).unwrap().value, 0.0);
    }

    #[test]
    fn z_on_z_squared_is_zero_both_routes() {
        let u = BlaschkeProduct::monomial(2);
        assert_eq!(
            min_modulus_unimodular(&u, &SymbolExpr::z(), 1e-10)
                .unwrap()
                .value,
            0.0
        );
        assert_eq!(
            min_modulus_thm55(&u, &SymbolExpr::z(), 1e-10)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn inner_symbol_equal_to_u_is_zero() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..10 {
            let u = random_inner(&mut rng, 6, 0.9);
            let r = min_modulus_unimodular(&u, &SymbolExpr::from(&u), 1e-10).unwrap();
            assert!(r.value < 1e-10, "{}", r.value);
        }
    }

    #[test]
    fn constant_unimodular_symbol_gives_one() {
        let u = BlaschkeProduct::from_zeros(vec![c(0.3, 0.2), c(0.0, -0.7)]).unwrap();
        let phi = SymbolExpr::constant(C64::from_polar(1.0, 2.0));
        assert!((min_modulus_unimodular(&u, &phi, 1e-10).unwrap().value - 1.0).abs() < 1e-12);
        let b = min_modulus_bounds(&u, &phi, 1e-10).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-10 && (b.upper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_unimodular_rejected() {
        let u = BlaschkeProduct::monomial(2);
        let phi = SymbolExpr::z().plus(c(1.0, 0.0));
        assert_eq!(
            min_modulus_unimodular(&u, &phi, 1e-10),
            Err(Error::NotUnimodular)
        );
        assert_eq!(
            min_modulus_thm55(&u, &phi, 1e-10),
            Err(Error::NotUnimodular)
        );
    }

    #[test]
    fn blaschke_example_matches_closed_form() {
        let u = BlaschkeProduct::monomial(2);
        for alpha in [0.25, 0.5, 0.75] {
            let phi = blaschke_example_symbol(alpha);
            let want = blaschke_example_oracle(alpha);
            let got = min_modulus_thm55(&u, &phi, 1e-12).unwrap().value;
            assert!((got - want).abs() < 1e-9, "{alpha}: {got} vs {want}");
            let exact = min_modulus_unimodular(&u, &phi, 1e-12).unwrap().value;
            assert!((exact - want).abs() < 1e-9);
        }
    }

    #[test]
    fn routes_agree_on_random_inner_pairs() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..20 {
            let u = random_inner(&mut rng, 5, 0.85);
            let phi = SymbolExpr::from(&random_inner(&mut rng, 3, 0.85));
            let a = min_modulus_unimodular(&u, &phi, 1e-11).unwrap();
            let b = min_modulus_thm55(&u, &phi, 1e-11).unwrap();
            assert!(
                (a.value - b.value).abs() < 1e-7 + a.entry_error + b.entry_error,
                "{} {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn bounds_examples() {
        let u = BlaschkeProduct::monomial(2);
        let b = min_modulus_bounds(&u, &SymbolExpr::z(), 1e-10).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));

        let u = BlaschkeProduct::from_zeros(vec![c(0.4, 0.0), c(-0.1, 0.5)]).unwrap();
        let psi = SymbolExpr::from(&BlaschkeProduct::from_zeros(vec![c(0.2, 0.3)]).unwrap());
        let phi = psi.conj();
        let b = min_modulus_bounds(&u, &phi, 1e-11).unwrap();
        assert!(
            b.hankel_norm < 1e-10,
            "conjugate-analytic φ̄ = ψ is analytic"
        );
        let exact = min_modulus_unimodular(&u, &phi, 1e-11).unwrap().value;
        let t = b.toeplitz_norm;
        assert!((exact - (1.0 - t * t).sqrt()).abs() < 1e-9);
        assert!((b.upper - exact).abs() < 1e-9);
    }

    #[test]
    fn b_of_z() {
        for deg in 2..=4 {
            let zeros = (0..deg)
                .map(|k| C64::from_polar(0.3 + 0.1 * k as f64, k as f64))
                .collect();
            let u = BlaschkeProduct::from_zeros(zeros).unwrap();
            let r = min_modulus_b(&u, &SymbolExpr::z(), 1e-12).unwrap();
            assert!(r.value < 1e-10, "deg {deg}: {}", r.value);
        }
        for lambda in [0.2, 0.7] {
            let u = BlaschkeProduct::factor(c(lambda, 0.0)).unwrap();
            let r = min_modulus_b(&u, &SymbolExpr::z(), 1e-12).unwrap();
            let want = (1.0 - lambda * lambda).sqrt();
            assert!((r.value - want).abs() < 1e-10);
            let a = min_modulus_unimodular(&u, &SymbolExpr::z().conj(), 1e-12).unwrap();
            let s_u =
                truncated_toeplitz(&tm_basis(&u, 1e-14).unwrap(), &SymbolExpr::z(), 1e-12).unwrap();
            let m_a = crate::linalg::sigma_min(s_u.entries());
            assert!((r.value.powi(2) + m_a.powi(2) - 1.0).abs() < 1e-10);
            assert!(a.value >= 0.0);
        }
    }

    #[test]
    fn b_rejects_other_symbols() {
        let phi = SymbolExpr::laurent(-1, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            min_modulus_b(&BlaschkeProduct::monomial(2), &phi, 1e-10),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn inner_symbol_cases() {
        let u = BlaschkeProduct::from_zeros(vec![c(0.3, 0.1), c(-0.2, 0.5)]).unwrap();
        let r = min_modulus_inner_symbol(&u, &SymbolExpr::from(&u), 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.method, Method::Oracle);
        assert!(r.cross_checks["sigma_min_t_phi_bar"] < 1e-10);

        let r = min_modulus_inner_symbol(
            &BlaschkeProduct::monomial(2),
            &SymbolExpr::blaschke_quotient(c(1.0, 0.0), 1, vec![]).unwrap(),
            1e-12,
        )
        .unwrap();
        assert_eq!(r.method, Method::FiniteExact);
        assert!(r.value < 1e-14);

        let (lambda, mu) = (c(0.4, 0.2), c(-0.3, 0.5));
        let u = BlaschkeProduct::factor(lambda).unwrap();
        let phi = SymbolExpr::from(&BlaschkeProduct::factor(mu).unwrap());
        let r = min_modulus_inner_symbol(&u, &phi, 1e-12).unwrap();
        let want = ((lambda - mu) / (c(1.0, 0.0) - mu.conj() * lambda)).norm();
        assert!((r.oracle.unwrap() - want).abs() < 1e-14);
        assert!(r.discrepancy.unwrap() < 1e-10);

        assert!(min_modulus_inner_symbol(&u, &SymbolExpr::z().conj(), 1e-12).is_err());
    }

    #[test]
    fn reduced_min_modulus_examples() {
        let q = dual_toeplitz_matrix(&SymbolExpr::z(), 10, 1e-12).unwrap();
        let r = reduced_min_modulus(&q, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.kernel_dim, 1);
        assert_eq!(
            reduced_min_modulus(&square(identity(4)), DEFAULT_RANK_TOL)
                .unwrap()
                .value,
            1.0
        );
        let x = nalgebra::DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]);
        let p = reduced_min_modulus(&square(&x * x.adjoint()), DEFAULT_RANK_TOL).unwrap();
        assert!((p.value - 1.0).abs() < 1e-14);
        assert_eq!(p.kernel_dim, 2);
        let z = reduced_min_modulus(&square(CMatrix::zeros(3, 3)), DEFAULT_RANK_TOL).unwrap();
        assert!(z.degenerate && z.value == 0.0);
    }

    #[test]
    fn sweep_examples() {
        let u = BlaschkeProduct::from_zeros(vec![c(0.3, 0.0), c(0.6, 0.0)]).unwrap();
        let sweep =
            galerkin_sweep(&u, &SymbolExpr::constant(c(0.0, 1.0)), &[2, 4, 8], 1e-10).unwrap();
        assert!(sweep.iter().all(|r| (r.value - 1.0).abs() < 1e-10));

        let sweep = galerkin_sweep(&u, &SymbolExpr::z(), &[4, 16, 64], 1e-10).unwrap();
        assert!(monotonicity_violations(&sweep, 1e-10).is_empty());
        assert!((sweep[2].value - 0.18).abs() < 1e-8);
        assert_eq!(sweep[2].truncation, Some(64));

        let sweep = galerkin_sweep(
            &BlaschkeProduct::monomial(2),
            &SymbolExpr::z(),
            &[4, 64],
            1e-10,
        )
        .unwrap();
        assert!(sweep[1].value < 1e-10);

        assert!(galerkin_sweep(&u, &SymbolExpr::z(), &[], 1e-10).is_err());
        assert!(galerkin_sweep(&u, &SymbolExpr::z(), &[4, 4], 1e-10).is_err());
    }

    #[test]
    fn sweep_stays_above_exact_value() {
        let u = BlaschkeProduct::from_zeros(vec![c(0.2, 0.3), c(-0.5, 0.1), c(0.0, 0.6)]).unwrap();
        let phi = blaschke_example_symbol(0.4);
        let exact = min_modulus_unimodular(&u, &phi, 1e-10).unwrap().value;
        let tol = 1e-8;
        let sweep = galerkin_sweep(&u, &phi, &[2, 6, 12, 24], tol).unwrap();
        assert!(monotonicity_violations(&sweep, tol).is_empty());
        for r in &sweep {
            assert!(r.value >= exact - tol, "{} < {exact}", r.value);
        }
    }

    #[test]
    fn adjoint_checks() {
        let mut rng = StdRng::seed_from_u64(1);
        let m = square(random_matrix(&mut rng, 8));
        assert!(
            check_minmod_adjoint(&m, DEFAULT_RANK_TOL)
                .unwrap()
                .difference
                < 1e-12
        );

        let u = BlaschkeProduct::from_zeros(vec![c(0.5, 0.1), c(-0.3, 0.4), c(0.1, -0.7)]).unwrap();
        let s = compressed_shift(&tm_basis(&u, 1e-14).unwrap()).unwrap();
        let chk = check_minmod_adjoint(&s, DEFAULT_RANK_TOL).unwrap();
        assert!((chk.sigma_min - u.abs_at_zero()).abs() < 1e-10);
        assert!((chk.sigma_min_adjoint - u.abs_at_zero()).abs() < 1e-10);

        let d = dtto_block(&u, &blaschke_example_symbol(0.3), 10, 1e-13).unwrap();
        let cu = conjugation_action(&u, 10, 1e-13).unwrap();
        assert!(
            complex_symmetry_residual(&d, &cu).unwrap()
                < 1e-10 + d.entry_error() + cu.entry_error()
        );
    }

    #[test]
    fn report_json_keys() {
        let r = MinModReport::new("D_phi", 0.5, Method::FiniteExact, 1e-12)
            .with_truncation(3)
            .with_oracle(0.25);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["method"], "finite_exact");
        assert_eq!(v["oracle"], 0.25);
        assert_eq!(v["discrepancy"], 0.25);
        assert_eq!(v["truncation"], 3);
        assert_eq!(v["entry_error"], 1e-12);
        assert!(v.get("lower").is_none());
    }

    fn random_unitary(rng: &mut StdRng, n: usize) -> CMatrix {
        random_matrix(rng, n).qr().q()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn unitary_invariance(seed in 0u64..10_000, n in 1usize..7) {
            let mut rng = StdRng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, n);
            let (v, w) = (random_unitary(&mut rng, n), random_unitary(&mut rng, n));
            let a = crate::linalg::sigma_min(&m);
            let b = crate::linalg::sigma_min(&(v * &m * w));
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn bounds_bracket_exact(seed in 0u64..10_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let u = random_inner(&mut rng, 4, 0.85);
            let zeros = vec![C64::from_polar(rng.gen_range(0.0..0.85), rng.gen_range(0.0..std::f64::consts::TAU))];
            let phi = SymbolExpr::blaschke_quotient(c(1.0, 0.0), rng.gen_range(-2..=2), zeros).unwrap();
            let exact = min_modulus_unimodular(&u, &phi, 1e-10).unwrap().value;
            let b = min_modulus_bounds(&u, &phi, 1e-10).unwrap();
            prop_assert!(b.lower <= exact + 1e-8 && exact <= b.upper + 1e-8, "{} {} {}", b.lower, exact, b.upper);
        }

        #[test]
        fn dual_route_agreement(seed in 0u64..10_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let u = random_inner(&mut rng, 5, 0.85);
            let zeros = (0..rng.gen_range(0..3)).map(|_| C64::from_polar(rng.gen_range(0.0..0.85), rng.gen_range(0.0..std::f64::consts::TAU))).collect();
            let phi = SymbolExpr::blaschke_quotient(C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)), rng.gen_range(-2..=2), zeros).unwrap();
            let a = min_modulus_unimodular(&u, &phi, 1e-11).unwrap();
            let b = min_modulus_thm55(&u, &phi, 1e-11).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-7 + a.entry_error + b.entry_error);
        }

        #[test]
        fn compressed_shift_formula(seed in 0u64..10_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let u = random_inner(&mut rng, 6, 0.9);
            let s = compressed_shift(&tm_basis(&u, 1e-14).unwrap()).unwrap();
            prop_assert!((crate::linalg::sigma_min(s.entries()) - u.abs_at_zero()).abs() < 1e-9);
        }
    }
}
