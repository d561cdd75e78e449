//! Library side of the `minmod` binary: job configuration, the `minmod` and
//! `sweep` commands, and the verification catalog behind `verify`.

use std::fs;
use std::path::PathBuf;

use minmod_core::fourier::{BlaschkeProduct, SymbolExpr};
use minmod_core::minmod::{
    galerkin_sweep, min_modulus_b, min_modulus_inner_symbol, min_modulus_thm55,
    min_modulus_unimodular, monotonicity_violations, Method, MinModReport,
};
use minmod_core::oracle::{
    normal_dtto_bounds, oracle_constant_symbol, oracle_m_dual_shift, MIN_RESOLUTION,
};
use minmod_core::{Error, C64};
use serde::de::DeserializeOwned;

pub mod verify;

pub use verify::{
    catalog, cmd_verify, run_catalog, Perturbation, VerifyItem, VerifyOutcome, VerifySummary,
};

/// Truncation used when a single Galerkin value is requested.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Samples for continuous essential ranges.
pub const DEFAULT_RESOLUTION: usize = 4096;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("unsupported symbol class: {0}; supported: unimodular constants, unimodular symbols, analytic symbols, real symbols plus a constant")]
    Unsupported(String),
    #[error("computation failed: {0}")]
    Failed(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) | CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(m) => CliError::Unsupported(m),
            Error::NotUnimodular => CliError::Unsupported(e.to_string()),
            Error::Numerical(m) => CliError::Failed(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ForcedMethod {
    FiniteExact,
    GalerkinSweep,
    Oracle,
    Bounds,
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub inner: Option<BlaschkeProduct>,
    pub symbol: SymbolExpr,
    pub tol: f64,
    pub truncations: Vec<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub force_method: Option<ForcedMethod>,
}

impl JobConfig {
    pub fn new(inner: Option<BlaschkeProduct>, symbol: SymbolExpr) -> Self {
        Self {
            inner,
            symbol,
            tol: 1e-9,
            truncations: vec![],
            output: None,
            format: Format::Json,
            force_method: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Input(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        if self.truncations.windows(2).any(|w| w[0] >= w[1]) || self.truncations.first() == Some(&0)
        {
            return Err(CliError::Input(
                "truncations must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }

    fn inner(&self) -> Result<&BlaschkeProduct, CliError> {
        self.inner
            .as_ref()
            .ok_or_else(|| CliError::Input("--inner is required for this symbol".into()))
    }
}

/// Parses a JSON argument given inline or as a path to a file.
pub fn load_json<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
}

fn constant_report(c: C64) -> MinModReport {
    // D_c = c·I
    MinModReport::new("D_phi", c.norm(), Method::Oracle, 0.0).with_oracle(c.norm())
}

fn unimodular_report(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    tol: f64,
) -> Result<MinModReport, CliError> {
    let mut report = min_modulus_unimodular(u, phi, tol)?;
    if let Ok(alt) = min_modulus_thm55(u, phi, tol) {
        report = report.with_cross_check("gram_route", alt.value);
    }
    if let Some(o) = oracle_constant_symbol(phi) {
        report = report.with_oracle(o);
    }
    if matches!(phi.as_monomial(), Some((1, c)) if (c - C64::new(1.0, 0.0)).norm() == 0.0) {
        report = report.with_oracle(oracle_m_dual_shift(u)?);
        let sweep = galerkin_sweep(u, phi, &[DEFAULT_TRUNCATION], tol)?;
        report = report.with_cross_check("galerkin_sweep", sweep[0].value);
    }
    if phi.is_inner() && matches!(phi, SymbolExpr::BlaschkeQuotient(_)) {
        let inner = min_modulus_inner_symbol(u, phi, tol)?;
        report = report.with_cross_check("inner_symbol", inner.value);
        if inner.method == Method::Oracle {
            report = report.with_oracle(0.0).with_note("u divides phi");
        } else if let Some(o) = inner.oracle {
            report = report.with_oracle(o);
        }
    }
    Ok(report)
}

fn bounds_report(phi: &SymbolExpr, assert_normal: bool) -> Result<MinModReport, CliError> {
    let b = normal_dtto_bounds(phi, DEFAULT_RESOLUTION.max(MIN_RESOLUTION), assert_normal)?;
    let mut r = MinModReport::new("D_phi", b.exact.unwrap_or(b.lower), Method::Bounds, 0.0);
    r.lower = Some(b.lower);
    r.upper = Some(b.upper);
    if let Some(e) = b.exact {
        r = r.with_oracle(e);
    } else {
        r = r.with_note("value is the lower bound");
    }
    Ok(r)
}

fn sweep_report(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    config: &JobConfig,
) -> Result<MinModReport, CliError> {
    let n = config
        .truncations
        .last()
        .copied()
        .unwrap_or(DEFAULT_TRUNCATION);
    let r = galerkin_sweep(u, phi, &[n], config.tol)?.remove(0);
    Ok(
        if matches!(phi.as_monomial(), Some((1, c)) if c == C64::new(1.0, 0.0)) {
            r.with_oracle(oracle_m_dual_shift(u)?)
        } else {
            r
        },
    )
}

/// Computes `m(D_φ)` (or `m(B_φ)` for analytic, non-unimodular `φ`) with the
/// most specific applicable method, attaching oracle values where known.
pub fn cmd_minmod(config: &JobConfig) -> Result<MinModReport, CliError> {
    config.validate()?;
    let phi = &config.symbol;
    if let Some(forced) = config.force_method {
        return match forced {
            ForcedMethod::FiniteExact => unimodular_report(config.inner()?, phi, config.tol),
            ForcedMethod::GalerkinSweep => sweep_report(config.inner()?, phi, config),
            ForcedMethod::Bounds => bounds_report(phi, true),
            ForcedMethod::Oracle => match phi.constant_value() {
                Some(c) => Ok(constant_report(c)),
                None => Err(CliError::Unsupported(
                    "no closed form for this symbol".into(),
                )),
            },
        };
    }
    if let Some(c) = phi.constant_value() {
        return Ok(constant_report(c));
    }
    if phi.is_unimodular() {
        return unimodular_report(config.inner()?, phi, config.tol);
    }
    if phi.is_analytic() {
        return Ok(min_modulus_b(config.inner()?, phi, config.tol)?);
    }
    if phi.real_plus_constant().is_some() {
        return bounds_report(phi, false);
    }
    Err(CliError::Unsupported(
        "symbol is neither unimodular, analytic, nor a real function plus a constant".into(),
    ))
}

pub fn cmd_sweep(config: &JobConfig) -> Result<Vec<MinModReport>, CliError> {
    config.validate()?;
    if config.truncations.is_empty() {
        return Err(CliError::Input(
            "--truncations is required for sweep".into(),
        ));
    }
    let u = config.inner()?;
    let mut reports = galerkin_sweep(u, &config.symbol, &config.truncations, config.tol)?;
    if let Some(o) = oracle_constant_symbol(&config.symbol) {
        reports = reports.into_iter().map(|r| r.with_oracle(o)).collect();
    }
    Ok(reports)
}

fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// `N,value,entry_error` table; rises beyond `2·tol` are listed in a final
/// `#` comment row.
pub fn sweep_to_csv(reports: &[MinModReport], tol: f64) -> String {
    let mut out = String::from("N,value,entry_error\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{}\n",
            r.truncation.unwrap_or(0),
            sig12(r.value),
            sig12(r.entry_error)
        ));
    }
    let bad = monotonicity_violations(reports, tol);
    if !bad.is_empty() {
        let ns: Vec<String> = bad
            .iter()
            .map(|&i| reports[i].truncation.unwrap_or(0).to_string())
            .collect();
        out.push_str(&format!(
            "# monotonicity violations at N={}\n",
            ns.join(";")
        ));
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

pub fn report_to_csv(r: &MinModReport) -> String {
    let method = serde_json::to_value(r.method)
        .expect("tag")
        .as_str()
        .unwrap_or_default()
        .to_string();
    format!(
        "operator,value,method,truncation,entry_error,oracle,discrepancy,lower,upper\n{},{},{},{},{},{},{},{},{}\n",
        r.operator,
        sig12(r.value),
        method,
        r.truncation.map(|n| n.to_string()).unwrap_or_default(),
        sig12(r.entry_error),
        opt(r.oracle),
        opt(r.discrepancy),
        opt(r.lower),
        opt(r.upper)
    )
}

/// Writes to the configured output file, or stdout when none is set.
pub fn emit(config: &JobConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use minmod_core::fourier::Arc;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dispatch_z_on_z_squared() {
        let cfg = JobConfig::new(Some(BlaschkeProduct::monomial(2)), SymbolExpr::z());
        let r = cmd_minmod(&cfg).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.oracle, Some(0.0));
        assert_eq!(r.discrepancy, Some(0.0));
        assert_eq!(r.method, Method::FiniteExact);
    }

    #[test]
    fn dispatch_constant_and_bounds() {
        let r = cmd_minmod(&JobConfig::new(None, SymbolExpr::constant(c(0.0, 1.0)))).unwrap();
        assert_eq!((r.value, r.method), (1.0, Method::Oracle));

        let step = SymbolExpr::piecewise(vec![
            Arc {
                from: 0.0,
                to: PI,
                value: c(1.0, 0.0),
            },
            Arc {
                from: PI,
                to: 2.0 * PI,
                value: c(-1.0, 0.0),
            },
        ])
        .unwrap()
        .plus(c(0.0, 3.0));
        let r = cmd_minmod(&JobConfig::new(None, step)).unwrap();
        assert_eq!(r.method, Method::Bounds);
        assert!(
            (r.lower.unwrap() - 3.0).abs() < 1e-12
                && (r.upper.unwrap() - 10f64.sqrt()).abs() < 1e-12
        );
    }

    #[test]
    fn dispatch_errors() {
        let phi = SymbolExpr::laurent(-1, vec![c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let e = cmd_minmod(&JobConfig::new(Some(BlaschkeProduct::monomial(2)), phi)).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let e = cmd_minmod(&JobConfig::new(None, SymbolExpr::z())).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let mut cfg = JobConfig::new(Some(BlaschkeProduct::monomial(2)), SymbolExpr::z());
        cfg.tol = -1.0;
        assert_eq!(cmd_minmod(&cfg).unwrap_err().exit_code(), 2);
        assert_eq!(
            load_json::<SymbolExpr>("{\"kind\": \"nope\"}")
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn sweep_csv_layout() {
        let mut cfg = JobConfig::new(
            Some(BlaschkeProduct::factor(c(0.5, 0.0)).unwrap()),
            SymbolExpr::constant(c(1.0, 0.0)),
        );
        cfg.truncations = vec![2, 4];
        let reports = cmd_sweep(&cfg).unwrap();
        let csv = sweep_to_csv(&reports, cfg.tol);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,value,entry_error");
        assert!(lines[1].starts_with("2,1.00000000000e0,"));
        assert_eq!(lines.len(), 3);

        let mut fake = reports.clone();
        fake[1].value = 2.0;
        assert!(sweep_to_csv(&fake, 1e-9)
            .lines()
            .last()
            .unwrap()
            .starts_with("# monotonicity violations at N=4"));
    }
}
