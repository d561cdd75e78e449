use std::f64::consts::PI;

use minmod_core::fourier::{symbol_to_window, Arc, BlaschkeProduct, SymbolExpr, SymbolJson};
use minmod_core::minmod::{
    check_minmod_adjoint, complex_symmetry_residual, galerkin_sweep, min_modulus_b,
    min_modulus_bounds, min_modulus_inner_symbol, min_modulus_thm55, min_modulus_unimodular,
    monotonicity_violations, Method, DEFAULT_RANK_TOL,
};
use minmod_core::modelspace::tm_basis;
use minmod_core::operators::{
    compressed_shift, conjugation_action, dtto_block, truncated_toeplitz,
};
use minmod_core::oracle::{normal_dtto_bounds, oracle_m_compressed_shift, oracle_m_dual_shift};
use minmod_core::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn two_zeros() -> BlaschkeProduct {
    BlaschkeProduct::from_zeros(vec![c(0.3, 0.2), c(-0.5, 0.4)]).unwrap()
}

#[test]
fn json_round_trip_feeds_the_pipeline() {
    let text = r#"{"kind":"blaschke_quotient","constant":[1,0],"zeros":[[0.3,0.2],[-0.5,0.4]]}"#;
    let u: BlaschkeProduct = serde_json::from_str(text).unwrap();
    assert_eq!(u.degree(), 2);
    let phi: SymbolExpr =
        serde_json::from_str(r#"{"kind":"laurent","offset":1,"coeffs":[[1,0]]}"#).unwrap();
    let again: SymbolExpr =
        serde_json::from_str(&serde_json::to_string(&SymbolJson::from(&phi)).unwrap()).unwrap();
    let r = min_modulus_unimodular(&u, &again, 1e-10).unwrap();
    assert!((r.value - oracle_m_dual_shift(&u).unwrap()).abs() < 1e-9);
    let report: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(report["method"], "finite_exact");
}

#[test]
fn compressed_shift_matches_oracle_and_adjoint() {
    let u = two_zeros();
    let s = compressed_shift(&tm_basis(&u, 1e-14).unwrap()).unwrap();
    let chk = check_minmod_adjoint(&s, DEFAULT_RANK_TOL).unwrap();
    let want = oracle_m_compressed_shift(&u).unwrap();
    assert!((chk.sigma_min - want).abs() < 1e-10 && (chk.sigma_min_adjoint - want).abs() < 1e-10);
}

#[test]
fn both_unimodular_routes_agree() {
    let u = two_zeros();
    let phi = SymbolExpr::blaschke_quotient(c(0.0, 1.0), -1, vec![c(0.4, -0.1)]).unwrap();
    let a = min_modulus_unimodular(&u, &phi, 1e-12).unwrap().value;
    let b = min_modulus_thm55(&u, &phi, 1e-12).unwrap().value;
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    let bounds = min_modulus_bounds(&u, &phi, 1e-12).unwrap();
    assert!(bounds.lower <= a + 1e-9 && a <= bounds.upper + 1e-9);
}

#[test]
fn inner_symbol_divisible_by_u() {
    let u = BlaschkeProduct::factor(c(0.4, 0.0)).unwrap();
    let phi =
        SymbolExpr::from(&BlaschkeProduct::from_zeros(vec![c(0.4, 0.0), c(0.0, 0.7)]).unwrap());
    let r = min_modulus_inner_symbol(&u, &phi, 1e-10).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.method, Method::Oracle);
}

#[test]
fn b_phi_for_analytic_symbol() {
    let u = BlaschkeProduct::factor(c(0.6, 0.0)).unwrap();
    let r = min_modulus_b(&u, &SymbolExpr::z(), 1e-12).unwrap();
    assert!((r.value - 0.8).abs() < 1e-10);
    let basis = tm_basis(&u, 1e-14).unwrap();
    let a = truncated_toeplitz(&basis, &SymbolExpr::z(), 1e-12).unwrap();
    assert!((a.entries()[(0, 0)] - c(0.6, 0.0)).norm() < 1e-10);
}

#[test]
fn dtto_is_complex_symmetric() {
    let u = two_zeros();
    let n = 12;
    let phi = SymbolExpr::z().plus(c(0.1, 0.3));
    let d = dtto_block(&u, &phi, n, 1e-12).unwrap();
    let m = conjugation_action(&u, n, 1e-12).unwrap();
    assert!(complex_symmetry_residual(&d, &m).unwrap() < 1e-8);
}

#[test]
fn sweep_is_monotone_and_converges() {
    let u = BlaschkeProduct::factor(c(0.0, 0.5)).unwrap();
    let sweep = galerkin_sweep(&u, &SymbolExpr::z(), &[4, 8, 16, 32], 1e-9).unwrap();
    assert!(monotonicity_violations(&sweep, 1e-9).is_empty());
    assert!((sweep.last().unwrap().value - 0.5).abs() < 1e-6);
    assert!(galerkin_sweep(&u, &SymbolExpr::z(), &[8, 8], 1e-9).is_err());
}

#[test]
fn normal_bounds_and_windows() {
    let step = SymbolExpr::piecewise(vec![
        Arc {
            from: 0.0,
            to: PI,
            value: c(2.0, 0.0),
        },
        Arc {
            from: PI,
            to: 2.0 * PI,
            value: c(5.0, 0.0),
        },
    ])
    .unwrap();
    let b = normal_dtto_bounds(&step, 64, false).unwrap();
    assert!((b.lower - 2.0).abs() < 1e-12 && (b.upper - 2.0).abs() < 1e-12);
    assert_eq!(b.exact, Some(b.lower));

    let w = symbol_to_window(&step, -3..=3, 1e-12).unwrap();
    assert!((w.coeff(0) - c(3.5, 0.0)).norm() < 1e-12);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(
        BlaschkeProduct::factor(c(1.0, 0.0)),
        Err(Error::OutsideDisc { .. })
    ));
    assert!(tm_basis(&two_zeros(), -1.0).is_err());
    assert!(serde_json::from_str::<SymbolExpr>(r#"{"kind":"laurent","offset":0}"#).is_err());
}
