//! Catalog of worked examples with known values, run by `minmod verify`.

use std::f64::consts::PI;

use minmod_core::fourier::{symbol_to_window, Arc, BlaschkeProduct, SymbolExpr};
use minmod_core::linalg::{hermitian_eigenvalues, identity, max_abs, sigma_max, sigma_min};
use minmod_core::minmod::{
    check_minmod_adjoint, complex_symmetry_residual, galerkin_sweep, min_modulus_b,
    min_modulus_bounds, min_modulus_thm55, min_modulus_unimodular, reduced_min_modulus,
    DEFAULT_RANK_TOL,
};
use minmod_core::modelspace::{reproducing_kernel, tm_basis};
use minmod_core::operators::{
    b_gram, compressed_shift, conjugation_action, dtto_block, dual_toeplitz_matrix, hankel_matrix,
    toeplitz_matrix, truncated_toeplitz,
};
use minmod_core::oracle::{
    ess_range, norm_aphi_nehari, normal_dtto_bounds, oracle_constant_symbol,
    oracle_m_compressed_shift, oracle_m_dual_shift, oracle_rank_one_spectrum,
};
use minmod_core::{Result, C64};

use crate::{cmd_minmod, JobConfig};

type Compute = Box<dyn Fn() -> Result<f64> + Send + Sync>;

pub struct VerifyItem {
    pub id: &'static str,
    pub expected: f64,
    pub tolerance: f64,
    compute: Compute,
}

impl VerifyItem {
    fn new(
        id: &'static str,
        expected: f64,
        tolerance: f64,
        compute: impl Fn() -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id,
            expected,
            tolerance,
            compute: Box::new(compute),
        }
    }

    pub fn compute(&self) -> Result<f64> {
        (self.compute)()
    }
}

/// Shifts the expected value of every item whose id starts with `prefix`.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub prefix: String,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub id: String,
    pub expected: f64,
    pub computed: Option<f64>,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl VerifyOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match (&self.computed, &self.error) {
            (Some(v), _) => format!(
                "{status} {:<44} expected={:.12e} computed={:.12e} discrepancy={:.3e} tol={:.1e}",
                self.id, self.expected, v, self.discrepancy, self.tolerance
            ),
            (None, e) => format!(
                "{status} {:<44} error: {}",
                self.id,
                e.as_deref().unwrap_or("unknown")
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub outcomes: Vec<VerifyOutcome>,
}

impl VerifySummary {
    pub fn executed(&self) -> usize {
        self.outcomes.len()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }

    /// An empty run never passes.
    pub fn passed(&self) -> bool {
        self.executed() > 0 && self.failures() == 0
    }

    pub fn report(&self) -> String {
        let mut s: String = self.outcomes.iter().map(|o| o.line() + "\n").collect();
        s.push_str(&format!(
            "{} executed, {} failed\n",
            self.executed(),
            self.failures()
        ));
        s
    }
}

pub fn run_catalog(items: &[VerifyItem], perturbation: Option<&Perturbation>) -> VerifySummary {
    let outcomes = items
        .iter()
        .map(|item| {
            let shift = perturbation
                .filter(|p| item.id.starts_with(p.prefix.as_str()))
                .map_or(0.0, |p| p.delta);
            let expected = item.expected + shift;
            match item.compute() {
                Ok(v) => {
                    let d = (v - expected).abs();
                    VerifyOutcome {
                        id: item.id.to_string(),
                        expected,
                        computed: Some(v),
                        discrepancy: d,
                        tolerance: item.tolerance,
                        passed: d <= item.tolerance,
                        error: None,
                    }
                }
                Err(e) => VerifyOutcome {
                    id: item.id.to_string(),
                    expected,
                    computed: None,
                    discrepancy: f64::INFINITY,
                    tolerance: item.tolerance,
                    passed: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    VerifySummary { outcomes }
}

/// Runs the full catalog.
pub fn cmd_verify(perturbation: Option<&Perturbation>) -> VerifySummary {
    run_catalog(&catalog(), perturbation)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn one() -> C64 {
    c(1.0, 0.0)
}

/// `z̄ · b_α`.
fn zbar_b(alpha: f64) -> SymbolExpr {
    SymbolExpr::blaschke_quotient(one(), -1, vec![c(alpha, 0.0)]).expect("valid zero")
}

fn step(lo: C64, hi: C64) -> SymbolExpr {
    SymbolExpr::piecewise(vec![
        Arc {
            from: 0.0,
            to: PI,
            value: hi,
        },
        Arc {
            from: PI,
            to: 2.0 * PI,
            value: lo,
        },
    ])
    .expect("valid arcs")
}

fn cosine_plus_2i() -> SymbolExpr {
    SymbolExpr::laurent(-1, vec![one(), c(0.0, 0.0), one()])
        .expect("valid")
        .plus(c(0.0, 2.0))
}

fn b(zeros: &[(f64, f64)]) -> BlaschkeProduct {
    BlaschkeProduct::from_zeros(zeros.iter().map(|&(r, i)| c(r, i)).collect())
        .expect("zeros in disc")
}

fn z2() -> BlaschkeProduct {
    BlaschkeProduct::monomial(2)
}

fn b05() -> BlaschkeProduct {
    b(&[(0.5, 0.0)])
}

fn b36() -> BlaschkeProduct {
    b(&[(0.3, 0.0), (0.6, 0.0)])
}

/// Largest eigenvalue of `[[a, aα], [aα, α² + aα²]]`, `a = α²(1−α²)`.
fn blaschke_example_value(alpha: f64) -> f64 {
    let a = alpha * alpha * (1.0 - alpha * alpha);
    let (p, q, r) = (a, alpha * alpha + a * alpha * alpha, a * alpha);
    (1.0 - 0.5 * (p + q + ((p - q).powi(2) + 4.0 * r * r).sqrt())).sqrt()
}

fn upper_right_block(u: &BlaschkeProduct, n: usize) -> Result<minmod_core::linalg::CMatrix> {
    let d = dtto_block(u, &SymbolExpr::z(), n, 1e-13)?;
    Ok(d.entries().view((0, n), (n, n)).clone_owned())
}

pub fn catalog() -> Vec<VerifyItem> {
    let alpha = 0.5;
    vec![
        // Fourier data
        VerifyItem::new("fourier.conj_zbar_b.analytic_z", -alpha, 1e-14, move || {
            Ok(symbol_to_window(&zbar_b(alpha).conj(), -6..=6, 1e-12)?
                .coeff(1)
                .re)
        }),
        VerifyItem::new(
            "fourier.conj_zbar_b.constant",
            1.0 - alpha * alpha,
            1e-14,
            move || {
                Ok(symbol_to_window(&zbar_b(alpha).conj(), -6..=6, 1e-12)?
                    .coeff(0)
                    .re)
            },
        ),
        VerifyItem::new(
            "fourier.conj_zbar_b.coanalytic_3",
            (1.0 - alpha * alpha) * alpha.powi(3),
            1e-14,
            move || {
                Ok(symbol_to_window(&zbar_b(alpha).conj(), -6..=6, 1e-12)?
                    .coeff(-3)
                    .re)
            },
        ),
        VerifyItem::new("fourier.eval.cosine_plus_2i", 2.0, 1e-14, || {
            Ok(cosine_plus_2i().eval(PI / 2.0)?.im)
        }),
        VerifyItem::new("fourier.eval.step_plus_3i", 10f64.sqrt(), 1e-14, || {
            Ok(step(c(-1.0, 0.0), one())
                .plus(c(0.0, 3.0))
                .eval(PI / 2.0)?
                .norm())
        }),
        // model space
        VerifyItem::new("modelspace.kernel_norm.b05", 0.75, 1e-12, || {
            Ok(reproducing_kernel(&b05(), c(0.0, 0.0), 1e-14)?
                .norm_l2()
                .powi(2))
        }),
        VerifyItem::new("modelspace.z2_basis.dim_plus_tail", 2.0, 1e-15, || {
            let basis = tm_basis(&z2(), 1e-12)?;
            Ok(basis.dim() as f64 + basis.max_tail())
        }),
        // operators
        VerifyItem::new("operators.toeplitz.zbar3_on_span_1_z", 0.0, 1e-15, || {
            Ok(max_abs(
                toeplitz_matrix(&SymbolExpr::monomial(-3, one()), 6, 2, 1e-12)?.entries(),
            ))
        }),
        VerifyItem::new("operators.hankel.zbar_input_1", 1.0, 1e-15, || {
            Ok(hankel_matrix(&SymbolExpr::z().conj(), 4, 2, 1e-12)?.entries()[(0, 0)].re)
        }),
        VerifyItem::new("operators.hankel.zbar_input_z", 0.0, 1e-15, || {
            Ok(hankel_matrix(&SymbolExpr::z().conj(), 4, 2, 1e-12)?
                .entries()
                .column(1)
                .norm())
        }),
        VerifyItem::new(
            "operators.hankel.s0_norm_squared",
            alpha * alpha * (1.0 - alpha * alpha),
            1e-12,
            move || {
                Ok(hankel_matrix(&zbar_b(alpha).conj(), 80, 1, 1e-14)?
                    .entries()
                    .column(0)
                    .norm_squared())
            },
        ),
        VerifyItem::new("operators.dual_toeplitz.q_kernel_dim", 1.0, 0.0, || {
            Ok(reduced_min_modulus(
                &dual_toeplitz_matrix(&SymbolExpr::z(), 16, 1e-12)?,
                DEFAULT_RANK_TOL,
            )?
            .kernel_dim as f64)
        }),
        VerifyItem::new("operators.truncated_toeplitz.a_z_dim1", 0.5, 1e-12, || {
            let basis = tm_basis(&b(&[(0.3, -0.4)]), 1e-14)?;
            Ok(truncated_toeplitz(&basis, &SymbolExpr::z(), 1e-12)?.entries()[(0, 0)].norm())
        }),
        VerifyItem::new(
            "operators.truncated_toeplitz.a_u_vanishes",
            0.0,
            1e-10,
            || {
                let u = b(&[(0.2, 0.5), (-0.6, 0.1), (0.0, -0.3)]);
                Ok(max_abs(
                    truncated_toeplitz(&tm_basis(&u, 1e-14)?, &SymbolExpr::from(&u), 1e-12)?
                        .entries(),
                ))
            },
        ),
        VerifyItem::new(
            "operators.compressed_shift.z2_defect_rank",
            1.0,
            0.0,
            || {
                let s = compressed_shift(&tm_basis(&z2(), 1e-12)?)?;
                let defect = identity(2) - s.entries().adjoint() * s.entries();
                Ok(hermitian_eigenvalues(&defect)
                    .iter()
                    .filter(|&&e| e > 1e-8)
                    .count() as f64)
            },
        ),
        VerifyItem::new(
            "operators.compressed_shift.defect_spectrum_min",
            0.18 * 0.18,
            1e-12,
            || {
                let s = compressed_shift(&tm_basis(&b36(), 1e-14)?)?;
                Ok(hermitian_eigenvalues(&(s.entries().adjoint() * s.entries()))[0])
            },
        ),
        VerifyItem::new(
            "operators.compressed_shift.defect_spectrum_max",
            1.0,
            1e-12,
            || {
                let s = compressed_shift(&tm_basis(&b36(), 1e-14)?)?;
                Ok(hermitian_eigenvalues(&(s.entries().adjoint() * s.entries()))[1])
            },
        ),
        VerifyItem::new("operators.b_gram.constant_symbol", 0.0, 1e-10, || {
            let basis = tm_basis(&b36(), 1e-14)?;
            Ok(max_abs(
                b_gram(&basis, &SymbolExpr::constant(c(0.0, 1.0)), 1e-11)?.entries(),
            ))
        }),
        VerifyItem::new("operators.b_gram.isometry_identity", 0.0, 1e-8, || {
            let u = b(&[(0.2, 0.5), (-0.6, 0.1), (0.0, -0.3)]);
            let basis = tm_basis(&u, 1e-14)?;
            let phi = zbar_b(0.4);
            let a = truncated_toeplitz(&basis, &phi, 1e-12)?;
            let g = b_gram(&basis, &phi, 1e-11)?;
            Ok(max_abs(
                &(g.entries() + a.entries().adjoint() * a.entries() - identity(basis.dim())),
            ))
        }),
        VerifyItem::new(
            "operators.b_gram.zbar_on_z2_top_eigenvalue",
            1.0,
            1e-14,
            || {
                let g = b_gram(&tm_basis(&z2(), 1e-12)?, &SymbolExpr::z().conj(), 1e-12)?;
                Ok(hermitian_eigenvalues(g.entries())[1])
            },
        ),
        VerifyItem::new(
            "operators.dtto_block.upper_right_rank_one",
            0.18,
            1e-12,
            || {
                let tr = upper_right_block(&b36(), 8)?;
                let mut rest = tr.clone();
                rest[(0, 0)] = c(0.0, 0.0);
                Ok(tr[(0, 0)].norm() + max_abs(&rest))
            },
        ),
        VerifyItem::new("operators.dtto_block.upper_right_zero", 0.0, 1e-14, || {
            Ok(max_abs(&upper_right_block(&z2(), 8)?))
        }),
        VerifyItem::new("operators.conjugation.symmetrizes_dtto", 0.0, 1e-9, || {
            let u = b(&[(0.2, 0.5), (-0.6, 0.1)]);
            let d = dtto_block(&u, &zbar_b(0.3), 12, 1e-13)?;
            complex_symmetry_residual(&d, &conjugation_action(&u, 12, 1e-13)?)
        }),
        // minimum moduli
        VerifyItem::new("minmod.unimodular.z_on_z2", 0.0, 1e-15, || {
            Ok(min_modulus_unimodular(&z2(), &SymbolExpr::z(), 1e-10)?.value)
        }),
        VerifyItem::new("minmod.unimodular.phi_equals_u", 0.0, 1e-10, || {
            let u = b(&[(0.2, 0.5), (-0.6, 0.1), (0.0, -0.3)]);
            Ok(min_modulus_unimodular(&u, &SymbolExpr::from(&u), 1e-10)?.value)
        }),
        VerifyItem::new(
            "minmod.unimodular.unimodular_constant",
            oracle_constant_symbol(&SymbolExpr::constant(c(0.0, 1.0))).unwrap_or(f64::NAN),
            1e-12,
            || Ok(min_modulus_unimodular(&b36(), &SymbolExpr::constant(c(0.0, 1.0)), 1e-10)?.value),
        ),
        VerifyItem::new("minmod.gram_route.z_on_z2", 0.0, 1e-15, || {
            Ok(min_modulus_thm55(&z2(), &SymbolExpr::z(), 1e-10)?.value)
        }),
        VerifyItem::new(
            "minmod.gram_route.blaschke_example_alpha_0.5",
            blaschke_example_value(0.5),
            1e-9,
            || Ok(min_modulus_thm55(&z2(), &zbar_b(0.5), 1e-12)?.value),
        ),
        VerifyItem::new("minmod.bounds.coanalytic_hankel_bound", 1.0, 1e-10, || {
            let psi = SymbolExpr::from(&b(&[(0.2, 0.3)]));
            Ok((1.0
                - min_modulus_bounds(&b(&[(0.4, 0.0), (-0.1, 0.5)]), &psi.conj(), 1e-11)?
                    .hankel_norm
                    .powi(2))
            .sqrt())
        }),
        VerifyItem::new("minmod.bounds.coanalytic_exact_gap", 0.0, 1e-9, || {
            let u = b(&[(0.4, 0.0), (-0.1, 0.5)]);
            let phi = SymbolExpr::from(&b(&[(0.2, 0.3)])).conj();
            let t = min_modulus_bounds(&u, &phi, 1e-11)?.toeplitz_norm;
            Ok((min_modulus_unimodular(&u, &phi, 1e-11)?.value - (1.0 - t * t).sqrt()).abs())
        }),
        VerifyItem::new("minmod.b.z_dim3", 0.0, 1e-10, || {
            Ok(min_modulus_b(
                &b(&[(0.3, 0.0), (0.2, 0.4), (-0.5, 0.1)]),
                &SymbolExpr::z(),
                1e-12,
            )?
            .value)
        }),
        VerifyItem::new("minmod.b.z_dim1", (1.0f64 - 0.49).sqrt(), 1e-10, || {
            Ok(min_modulus_b(&b(&[(0.7, 0.0)]), &SymbolExpr::z(), 1e-12)?.value)
        }),
        VerifyItem::new("minmod.b.z_dim1_pythagoras", 1.0, 1e-10, || {
            let u = b(&[(0.7, 0.0)]);
            let mb = min_modulus_b(&u, &SymbolExpr::z(), 1e-12)?.value;
            let ma = sigma_min(compressed_shift(&tm_basis(&u, 1e-14)?)?.entries());
            Ok(mb * mb + ma * ma)
        }),
        VerifyItem::new("minmod.reduced.truncated_q", 1.0, 0.0, || {
            Ok(reduced_min_modulus(
                &dual_toeplitz_matrix(&SymbolExpr::z(), 32, 1e-12)?,
                DEFAULT_RANK_TOL,
            )?
            .value)
        }),
        VerifyItem::new(
            "minmod.sweep.dual_shift_b36",
            oracle_m_dual_shift(&b36()).unwrap_or(f64::NAN),
            1e-8,
            || Ok(galerkin_sweep(&b36(), &SymbolExpr::z(), &[8, 16, 32, 64], 1e-10)?[3].value),
        ),
        VerifyItem::new(
            "minmod.sweep.dual_shift_z2",
            oracle_m_dual_shift(&z2()).unwrap_or(f64::NAN),
            1e-8,
            || Ok(galerkin_sweep(&z2(), &SymbolExpr::z(), &[8, 64], 1e-10)?[1].value),
        ),
        VerifyItem::new(
            "minmod.adjoint.compressed_shift_deg3",
            0.5 * 0.4 * 0.3,
            1e-10,
            || {
                let u = b(&[(0.5, 0.0), (0.0, 0.4), (-0.3, 0.0)]);
                let chk = check_minmod_adjoint(
                    &compressed_shift(&tm_basis(&u, 1e-14)?)?,
                    DEFAULT_RANK_TOL,
                )?;
                Ok(chk.sigma_min.max(chk.sigma_min_adjoint))
            },
        ),
        // oracles against numerics
        VerifyItem::new(
            "oracle.compressed_shift.b05",
            oracle_m_compressed_shift(&b05()).unwrap_or(f64::NAN),
            1e-10,
            || {
                Ok(sigma_min(
                    compressed_shift(&tm_basis(&b05(), 1e-14)?)?.entries(),
                ))
            },
        ),
        VerifyItem::new(
            "oracle.rank_one.defect_spectrum",
            oracle_rank_one_spectrum(one(), c(-1.0, 0.0), 1.0 - 0.18 * 0.18)
                .map(|s| s[1].re)
                .unwrap_or(f64::NAN),
            1e-12,
            || {
                let s = compressed_shift(&tm_basis(&b36(), 1e-14)?)?;
                Ok(hermitian_eigenvalues(&(s.entries().adjoint() * s.entries()))[0])
            },
        ),
        VerifyItem::new(
            "oracle.dual_shift.b05",
            oracle_m_dual_shift(&b05()).unwrap_or(f64::NAN),
            1e-8,
            || Ok(galerkin_sweep(&b05(), &SymbolExpr::z(), &[64], 1e-10)?[0].value),
        ),
        VerifyItem::new("oracle.ess_range.step_plus_3i", 0.0, 1e-15, || {
            let r = ess_range(&step(c(-1.0, 0.0), one()).plus(c(0.0, 3.0)), 64)?;
            let mut p = r.points.clone();
            p.sort_by(|a, b| a.re.total_cmp(&b.re));
            Ok((p.len() as f64 - 2.0).abs()
                + (p[0] - c(-1.0, 3.0)).norm()
                + (p[1] - c(1.0, 3.0)).norm())
        }),
        VerifyItem::new("oracle.ess_range.cosine_plus_2i", 0.0, 1e-12, || {
            let r = ess_range(&cosine_plus_2i(), 64)?;
            Ok((r.points[0] - c(-2.0, 2.0)).norm() + (r.points[1] - c(2.0, 2.0)).norm())
        }),
        VerifyItem::new("oracle.normal.step_lower", 3.0, 1e-12, || {
            Ok(normal_dtto_bounds(&step(c(-1.0, 0.0), one()).plus(c(0.0, 3.0)), 64, false)?.lower)
        }),
        VerifyItem::new("oracle.normal.step_upper", 10f64.sqrt(), 1e-12, || {
            Ok(normal_dtto_bounds(&step(c(-1.0, 0.0), one()).plus(c(0.0, 3.0)), 64, false)?.upper)
        }),
        VerifyItem::new("oracle.normal.cosine_exact", 2.0, 1e-10, || {
            normal_dtto_bounds(&cosine_plus_2i(), 4096, false)?
                .exact
                .ok_or_else(|| minmod_core::Error::Numerical("no exact value".into()))
        }),
        VerifyItem::new("oracle.normal.one_sign_real_gap", 0.0, 1e-15, || {
            let b = normal_dtto_bounds(&step(c(0.5, 0.0), c(2.0, 0.0)), 64, false)?;
            Ok((b.upper - b.lower).abs() + (b.upper - 0.5).abs())
        }),
        VerifyItem::new("oracle.nehari.phi_in_u_hinf", 0.0, 0.0, || {
            let u = b(&[(0.2, 0.5), (-0.6, 0.1)]);
            Ok(norm_aphi_nehari(&u, &SymbolExpr::from(&u), 16, 1e-12)?.value)
        }),
        VerifyItem::new("oracle.nehari.z_dim1", 0.5, 1e-12, || {
            Ok(norm_aphi_nehari(&b(&[(0.3, -0.4)]), &SymbolExpr::z(), 40, 1e-13)?.value)
        }),
        VerifyItem::new("oracle.nehari.matches_a_norm", 0.0, 1e-7, || {
            let u = b(&[(0.2, 0.5), (-0.6, 0.1)]);
            let phi = SymbolExpr::laurent(0, vec![c(0.3, 0.0), c(-0.5, 0.2), c(0.1, 0.7)])?;
            let a = sigma_max(truncated_toeplitz(&tm_basis(&u, 1e-14)?, &phi, 1e-12)?.entries());
            Ok((a - norm_aphi_nehari(&u, &phi, 160, 1e-13)?.value).abs())
        }),
        // command-level examples
        VerifyItem::new("cli.minmod.z_on_z2", 0.0, 1e-15, || {
            let r =
                cmd_minmod(&JobConfig::new(Some(z2()), SymbolExpr::z())).map_err(cli_to_core)?;
            Ok(r.value + r.discrepancy.unwrap_or(f64::NAN))
        }),
        VerifyItem::new("cli.minmod.b05_z", 0.5, 1e-9, || {
            let r =
                cmd_minmod(&JobConfig::new(Some(b05()), SymbolExpr::z())).map_err(cli_to_core)?;
            r.cross_checks
                .get("galerkin_sweep")
                .copied()
                .ok_or_else(|| minmod_core::Error::Numerical("no sweep value".into()))
        }),
        VerifyItem::new("cli.minmod.step_lower", 3.0, 1e-12, || {
            let phi = step(c(-1.0, 0.0), one()).plus(c(0.0, 3.0));
            cmd_minmod(&JobConfig::new(None, phi))
                .map_err(cli_to_core)?
                .lower
                .ok_or_else(|| minmod_core::Error::Numerical("no bound".into()))
        }),
        VerifyItem::new("cli.minmod.step_upper", 10f64.sqrt(), 1e-12, || {
            let phi = step(c(-1.0, 0.0), one()).plus(c(0.0, 3.0));
            cmd_minmod(&JobConfig::new(None, phi))
                .map_err(cli_to_core)?
                .upper
                .ok_or_else(|| minmod_core::Error::Numerical("no bound".into()))
        }),
    ]
}

fn cli_to_core(e: crate::CliError) -> minmod_core::Error {
    minmod_core::Error::Numerical(e.to_string())
}
