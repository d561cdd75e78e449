use std::f64::consts::PI;
use std::ops::RangeInclusive;

use crate::error::{check_tol, Error, Result};
use crate::fourier::blaschke::{
    check_in_disc, normalize_unimodular, AnalyticRational, BlaschkeProduct, UNIMODULAR_TOL,
};
use crate::fourier::{window_conjugate, window_multiply, FourierWindow};
use crate::C64;

const TWO_PI: f64 = 2.0 * PI;
/// Angles closer than this to an arc endpoint are treated as the endpoint.
const ENDPOINT_TOL: f64 = 1e-14;

/// A Laurent polynomial `Σ coeffs[k] z^{offset+k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    pub offset: i64,
    pub coeffs: Vec<C64>,
}

/// Unimodular rational symbol `c · z^m · Π b_{λ_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeQuotient {
    pub constant: C64,
    pub z_power: i64,
    pub zeros: Vec<C64>,
}

/// A constant value on the arc from `from` to `to` (counterclockwise,
/// half-open). `from > to` wraps through angle 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: f64,
    pub to: f64,
    pub value: C64,
}

/// A symbol on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolExpr {
    Laurent(LaurentPoly),
    BlaschkeQuotient(BlaschkeQuotient),
    Conjugate(Box<SymbolExpr>),
    /// `left + constant`
    Sum(Box<SymbolExpr>, C64),
    PiecewiseArcs(Vec<Arc>),
    /// Pointwise product; lets operators ask for windows of `u φ`, `ū φ`.
    Product(Box<SymbolExpr>, Box<SymbolExpr>),
}

impl LaurentPoly {
    pub fn new(offset: i64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "Laurent polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidArgument(
                "non-finite Laurent coefficient".into(),
            ));
        }
        Ok(Self { offset, coeffs })
    }

    fn window(&self) -> FourierWindow {
        FourierWindow::raw(self.offset, self.coeffs.clone(), 0.0)
    }
}

impl BlaschkeQuotient {
    pub fn new(constant: C64, z_power: i64, zeros: Vec<C64>) -> Result<Self> {
        let dev = (constant.norm() - 1.0).abs();
        if dev.is_nan() || dev > UNIMODULAR_TOL {
            return Err(Error::InvalidArgument(format!(
                "constant {constant} is not unimodular"
            )));
        }
        for z in &zeros {
            check_in_disc(*z)?;
        }
        Ok(Self {
            constant: normalize_unimodular(constant),
            z_power,
            zeros,
        })
    }

    /// z-power after absorbing zeros sitting exactly at the origin.
    pub fn net_z_power(&self) -> i64 {
        self.z_power + self.zeros.iter().filter(|a| a.norm() == 0.0).count() as i64
    }

    pub fn nonzero_zeros(&self) -> Vec<C64> {
        self.zeros
            .iter()
            .copied()
            .filter(|a| a.norm() != 0.0)
            .collect()
    }

    fn rational(&self) -> AnalyticRational {
        AnalyticRational {
            scale: self.constant,
            zeros: self.zeros.clone(),
            poles: vec![],
        }
    }
}

impl From<&BlaschkeProduct> for SymbolExpr {
    fn from(u: &BlaschkeProduct) -> Self {
        SymbolExpr::BlaschkeQuotient(BlaschkeQuotient {
            constant: u.constant(),
            z_power: 0,
            zeros: u.zeros().to_vec(),
        })
    }
}

/// Arcs split at angle 0 into plain intervals `[a, b)` with `0 ≤ a < b ≤ 2π`.
fn arc_pieces(arcs: &[Arc]) -> Vec<(f64, f64, C64)> {
    let mut out = Vec::with_capacity(arcs.len() + 1);
    for a in arcs {
        if a.from < a.to {
            out.push((a.from, a.to, a.value));
        } else {
            if a.from < TWO_PI {
                out.push((a.from, TWO_PI, a.value));
            }
            if a.to > 0.0 {
                out.push((0.0, a.to, a.value));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

pub(crate) fn validate_arcs(arcs: &[Arc]) -> Result<()> {
    if arcs.is_empty() {
        return Err(Error::BadArcs("no arcs".into()));
    }
    for a in arcs {
        if !(a.from.is_finite()
            && a.to.is_finite()
            && a.value.re.is_finite()
            && a.value.im.is_finite())
        {
            return Err(Error::BadArcs("non-finite arc data".into()));
        }
        if a.from < 0.0 || a.from > TWO_PI || a.to < 0.0 || a.to > TWO_PI {
            return Err(Error::BadArcs(format!(
                "arc [{}, {}) leaves [0, 2π]",
                a.from, a.to
            )));
        }
        if (a.from - a.to).abs() <= ENDPOINT_TOL || (a.from == TWO_PI && a.to == 0.0) {
            return Err(Error::BadArcs(format!(
                "degenerate arc [{}, {})",
                a.from, a.to
            )));
        }
    }
    let pieces = arc_pieces(arcs);
    let mut cursor = 0.0;
    for (a, b, _) in &pieces {
        if (a - cursor).abs() > 1e-12 {
            return Err(Error::BadArcs(if *a > cursor {
                format!("gap between {cursor} and {a}")
            } else {
                format!("overlap at {a}")
            }));
        }
        cursor = *b;
    }
    if (cursor - TWO_PI).abs() > 1e-12 {
        return Err(Error::BadArcs(format!(
            "arcs stop at {cursor}, short of 2π"
        )));
    }
    Ok(())
}

/// Sum of `|jump|` over the breakpoints of a piecewise-constant symbol.
fn total_jump(pieces: &[(f64, f64, C64)]) -> f64 {
    let n = pieces.len();
    (0..n)
        .map(|k| (pieces[k].2 - pieces[(k + n - 1) % n].2).norm())
        .sum()
}

/// Closed-form `φ̂(n)` of a piecewise-constant symbol.
fn piecewise_coeff(pieces: &[(f64, f64, C64)], n: i64) -> C64 {
    if n == 0 {
        return pieces.iter().map(|(a, b, v)| v * ((b - a) / TWO_PI)).sum();
    }
    let nf = n as f64;
    let denom = C64::new(0.0, TWO_PI * nf);
    pieces
        .iter()
        .map(|(a, b, v)| {
            v * (C64::from_polar(1.0, -nf * a) - C64::from_polar(1.0, -nf * b)) / denom
        })
        .sum()
}

/// Σ_{n ≥ a} 1/n² bounded by `1/a² + 1/a`, `a ≥ 1`.
fn inv_sq_tail(a: i64) -> f64 {
    let a = a as f64;
    1.0 / (a * a) + 1.0 / a
}

fn inv_sq_span(a: i64, b: i64) -> f64 {
    (a..=b).map(|n| 1.0 / (n as f64).powi(2)).sum()
}

fn piecewise_window(pieces: &[(f64, f64, C64)], lo: i64, hi: i64) -> FourierWindow {
    let coeffs: Vec<C64> = (lo..=hi).map(|n| piecewise_coeff(pieces, n)).collect();
    // |φ̂(n)| ≤ J / (2π|n|) for n ≠ 0
    let jump = total_jump(pieces) / TWO_PI;
    let mut omitted = 0.0;
    // positive side: indices ≥ 1 outside [lo, hi]
    if hi >= 1 {
        omitted += inv_sq_tail(hi + 1);
        if lo > 1 {
            omitted += inv_sq_span(1, lo - 1);
        }
    } else {
        omitted += inv_sq_tail(1);
    }
    // negative side, mirrored
    if lo <= -1 {
        omitted += inv_sq_tail(-lo + 1);
        if hi < -1 {
            omitted += inv_sq_span(1, -hi - 1);
        }
    } else {
        omitted += inv_sq_tail(1);
    }
    let mut tail_sq = jump * jump * omitted;
    if lo > 0 || hi < 0 {
        tail_sq += piecewise_coeff(pieces, 0).norm_sqr();
    }
    FourierWindow::raw(lo, coeffs, tail_sq.sqrt())
}

impl SymbolExpr {
    pub fn laurent(offset: i64, coeffs: Vec<C64>) -> Result<Self> {
        Ok(SymbolExpr::Laurent(LaurentPoly::new(offset, coeffs)?))
    }

    /// `c zⁿ`.
    pub fn monomial(n: i64, c: C64) -> Self {
        SymbolExpr::Laurent(LaurentPoly {
            offset: n,
            coeffs: vec![c],
        })
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    /// The identity symbol `z`.
    pub fn z() -> Self {
        Self::monomial(1, C64::new(1.0, 0.0))
    }

    pub fn blaschke_quotient(constant: C64, z_power: i64, zeros: Vec<C64>) -> Result<Self> {
        Ok(SymbolExpr::BlaschkeQuotient(BlaschkeQuotient::new(
            constant, z_power, zeros,
        )?))
    }

    pub fn piecewise(arcs: Vec<Arc>) -> Result<Self> {
        validate_arcs(&arcs)?;
        Ok(SymbolExpr::PiecewiseArcs(arcs))
    }

    /// `φ̄`, collapsing double conjugation.
    pub fn conj(&self) -> Self {
        match self {
            SymbolExpr::Conjugate(inner) => (**inner).clone(),
            other => SymbolExpr::Conjugate(Box::new(other.clone())),
        }
    }

    pub fn plus(self, c: C64) -> Self {
        SymbolExpr::Sum(Box::new(self), c)
    }

    pub fn times(self, other: SymbolExpr) -> Self {
        SymbolExpr::Product(Box::new(self), Box::new(other))
    }

    /// `φ(e^{iθ})`. Undefined (error) at an arc endpoint of a piecewise part.
    pub fn eval(&self, theta: f64) -> Result<C64> {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "angle {theta} is not finite"
            )));
        }
        let theta = theta.rem_euclid(TWO_PI);
        let z = C64::from_polar(1.0, theta);
        match self {
            SymbolExpr::Laurent(p) => Ok(p.window().eval(theta)),
            SymbolExpr::BlaschkeQuotient(q) => Ok(q.rational().eval(z) * z.powi(q.z_power as i32)),
            SymbolExpr::Conjugate(inner) => Ok(inner.eval(theta)?.conj()),
            SymbolExpr::Sum(inner, c) => Ok(inner.eval(theta)? + c),
            SymbolExpr::Product(a, b) => Ok(a.eval(theta)? * b.eval(theta)?),
            SymbolExpr::PiecewiseArcs(arcs) => {
                for (a, b, v) in arc_pieces(arcs) {
                    let near = |e: f64| {
                        (theta - e).abs() <= ENDPOINT_TOL
                            || (TWO_PI - (theta - e).abs()) <= ENDPOINT_TOL
                    };
                    if near(a) || near(b) {
                        return Err(Error::ArcEndpoint(theta));
                    }
                    if theta > a && theta < b {
                        return Ok(v);
                    }
                }
                Err(Error::ArcEndpoint(theta))
            }
        }
    }

    /// Angles at which a piecewise part jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            SymbolExpr::PiecewiseArcs(arcs) => arcs
                .iter()
                .flat_map(|a| [a.from.rem_euclid(TWO_PI), a.to.rem_euclid(TWO_PI)])
                .collect(),
            SymbolExpr::Conjugate(x) | SymbolExpr::Sum(x, _) => x.breakpoints(),
            SymbolExpr::Product(a, b) => {
                let mut v = a.breakpoints();
                v.extend(b.breakpoints());
                v
            }
            _ => vec![],
        };
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= ENDPOINT_TOL);
        out
    }

    pub fn has_piecewise_part(&self) -> bool {
        match self {
            SymbolExpr::PiecewiseArcs(_) => true,
            SymbolExpr::Conjugate(x) | SymbolExpr::Sum(x, _) => x.has_piecewise_part(),
            SymbolExpr::Product(a, b) => a.has_piecewise_part() || b.has_piecewise_part(),
            _ => false,
        }
    }

    /// True when every leaf is piecewise constant (constants included).
    pub fn is_piecewise_constant(&self) -> bool {
        match self {
            SymbolExpr::PiecewiseArcs(_) => true,
            SymbolExpr::Conjugate(x) | SymbolExpr::Sum(x, _) => x.is_piecewise_constant(),
            SymbolExpr::Product(a, b) => a.is_piecewise_constant() && b.is_piecewise_constant(),
            other => other.constant_value().is_some(),
        }
    }

    /// Upper bound on `‖φ‖_∞`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            SymbolExpr::Laurent(p) => p.coeffs.iter().map(|c| c.norm()).sum(),
            SymbolExpr::BlaschkeQuotient(_) => 1.0,
            SymbolExpr::Conjugate(x) => x.sup_bound(),
            SymbolExpr::Sum(x, c) => x.sup_bound() + c.norm(),
            SymbolExpr::Product(a, b) => a.sup_bound() * b.sup_bound(),
            SymbolExpr::PiecewiseArcs(arcs) => {
                arcs.iter().map(|a| a.value.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// `Some(c)` when the symbol is structurally the constant `c`.
    pub fn constant_value(&self) -> Option<C64> {
        match self {
            SymbolExpr::Laurent(p) => {
                let nz: Vec<(i64, C64)> = p
                    .coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() != 0.0)
                    .map(|(k, c)| (p.offset + k as i64, *c))
                    .collect();
                match nz.as_slice() {
                    [] => Some(C64::new(0.0, 0.0)),
                    [(0, c)] => Some(*c),
                    _ => None,
                }
            }
            SymbolExpr::BlaschkeQuotient(q) => {
                (q.net_z_power() == 0 && q.nonzero_zeros().is_empty()).then_some(q.constant)
            }
            SymbolExpr::Conjugate(x) => x.constant_value().map(|c| c.conj()),
            SymbolExpr::Sum(x, c) => x.constant_value().map(|v| v + c),
            SymbolExpr::Product(a, b) => Some(a.constant_value()? * b.constant_value()?),
            SymbolExpr::PiecewiseArcs(arcs) => {
                let v = arcs[0].value;
                arcs.iter().all(|a| a.value == v).then_some(v)
            }
        }
    }

    /// `Some((n, c))` when the symbol is structurally `c zⁿ`.
    pub fn as_monomial(&self) -> Option<(i64, C64)> {
        match self {
            SymbolExpr::Laurent(p) => {
                let nz: Vec<(i64, C64)> = p
                    .coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() != 0.0)
                    .map(|(k, c)| (p.offset + k as i64, *c))
                    .collect();
                match nz.as_slice() {
                    [(n, c)] => Some((*n, *c)),
                    _ => None,
                }
            }
            SymbolExpr::BlaschkeQuotient(q) => q
                .nonzero_zeros()
                .is_empty()
                .then_some((q.net_z_power(), q.constant)),
            SymbolExpr::Conjugate(x) => x.as_monomial().map(|(n, c)| (-n, c.conj())),
            SymbolExpr::Sum(x, c) if c.norm() == 0.0 => x.as_monomial(),
            SymbolExpr::Sum(x, c) => x.constant_value().map(|v| (0, v + c)),
            SymbolExpr::Product(a, b) => {
                let (n, c) = a.as_monomial()?;
                let (m, d) = b.as_monomial()?;
                Some((n + m, c * d))
            }
            SymbolExpr::PiecewiseArcs(_) => self.constant_value().map(|c| (0, c)),
        }
    }

    /// `|φ| = 1` a.e., decided structurally.
    pub fn is_unimodular(&self) -> bool {
        if let Some((_, c)) = self.as_monomial() {
            return (c.norm() - 1.0).abs() <= UNIMODULAR_TOL;
        }
        match self {
            SymbolExpr::BlaschkeQuotient(_) => true,
            SymbolExpr::Conjugate(x) => x.is_unimodular(),
            SymbolExpr::Sum(x, c) => c.norm() == 0.0 && x.is_unimodular(),
            SymbolExpr::Product(a, b) => a.is_unimodular() && b.is_unimodular(),
            SymbolExpr::PiecewiseArcs(arcs) => arcs
                .iter()
                .all(|a| (a.value.norm() - 1.0).abs() <= UNIMODULAR_TOL),
            SymbolExpr::Laurent(_) => false,
        }
    }

    /// `φ ∈ H^∞`, decided structurally.
    pub fn is_analytic(&self) -> bool {
        if self.constant_value().is_some() {
            return true;
        }
        match self {
            SymbolExpr::Laurent(p) => p
                .coeffs
                .iter()
                .enumerate()
                .all(|(k, c)| c.norm() == 0.0 || p.offset + k as i64 >= 0),
            SymbolExpr::BlaschkeQuotient(q) => q.net_z_power() >= 0,
            SymbolExpr::Conjugate(_) => self.as_monomial().is_some_and(|(n, _)| n >= 0),
            SymbolExpr::Sum(x, _) => x.is_analytic(),
            SymbolExpr::Product(a, b) => a.is_analytic() && b.is_analytic(),
            SymbolExpr::PiecewiseArcs(_) => false,
        }
    }

    pub fn is_inner(&self) -> bool {
        self.is_analytic() && self.is_unimodular()
    }

    /// `Some(β)` when `φ = ψ + β` with `ψ` real-valued, decided structurally.
    pub fn real_plus_constant(&self) -> Option<C64> {
        if let Some(c) = self.constant_value() {
            return Some(c);
        }
        match self {
            SymbolExpr::Laurent(p) => {
                let w = p.window();
                let m = w.lo().abs().max(w.hi().abs());
                let hermitian = (1..=m).all(|n| {
                    (w.coeff(n) - w.coeff(-n).conj()).norm() <= 1e-15 * (1.0 + w.coeff(n).norm())
                });
                hermitian.then(|| C64::new(0.0, w.coeff(0).im))
            }
            SymbolExpr::PiecewiseArcs(arcs) => {
                let im = arcs[0].value.im;
                arcs.iter()
                    .all(|a| (a.value.im - im).abs() <= 1e-15 * (1.0 + im.abs()))
                    .then_some(C64::new(0.0, im))
            }
            SymbolExpr::Conjugate(x) => x.real_plus_constant().map(|b| b.conj()),
            SymbolExpr::Sum(x, c) => x.real_plus_constant().map(|b| b + c),
            SymbolExpr::Product(a, b) => {
                // real constant times (real + β)
                let scale_real = |s: &SymbolExpr| s.constant_value().filter(|c| c.im == 0.0);
                if let Some(k) = scale_real(a) {
                    b.real_plus_constant().map(|beta| beta * k)
                } else if let Some(k) = scale_real(b) {
                    a.real_plus_constant().map(|beta| beta * k)
                } else {
                    None
                }
            }
            SymbolExpr::BlaschkeQuotient(_) => None,
        }
    }

    /// Zeros (with multiplicity, origin included) and constant of an inner
    /// symbol, when it is a finite Blaschke product.
    pub fn as_blaschke_product(&self) -> Option<BlaschkeProduct> {
        if !self.is_inner() {
            return None;
        }
        match self {
            SymbolExpr::BlaschkeQuotient(q) => {
                let mut zeros = vec![C64::new(0.0, 0.0); q.net_z_power() as usize];
                zeros.extend(q.nonzero_zeros());
                BlaschkeProduct::new(q.constant, zeros).ok()
            }
            _ => {
                let (n, c) = self.as_monomial()?;
                BlaschkeProduct::new(c, vec![C64::new(0.0, 0.0); n as usize]).ok()
            }
        }
    }
}

/// Fourier window of `φ` covering at least `range`.
///
/// Rational variants are widened until the certified tail is `≤ tol`;
/// piecewise parts use closed-form coefficients on exactly the requested
/// range and report their `O(1/n)` tail without forcing it under `tol`.
pub fn symbol_to_window(
    phi: &SymbolExpr,
    range: RangeInclusive<i64>,
    tol: f64,
) -> Result<FourierWindow> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Err(Error::EmptyRange { lo, hi });
    }
    check_tol(tol)?;
    window_rec(phi, lo, hi, tol).map(|w| w.covering(lo, hi))
}

fn window_rec(phi: &SymbolExpr, lo: i64, hi: i64, tol: f64) -> Result<FourierWindow> {
    match phi {
        SymbolExpr::Laurent(p) => Ok(p.window()),
        SymbolExpr::BlaschkeQuotient(q) => {
            let m = q.z_power;
            let min_terms = (hi - m + 1).max(1) as usize;
            Ok(q.rational().window(min_terms, tol).shift(m))
        }
        SymbolExpr::Conjugate(x) => Ok(window_conjugate(&window_rec(x, -hi, -lo, tol)?)),
        SymbolExpr::Sum(x, c) => {
            let w = window_rec(x, lo.min(0), hi.max(0), tol)?;
            Ok(w.add(&FourierWindow::constant(*c)))
        }
        SymbolExpr::PiecewiseArcs(arcs) => Ok(piecewise_window(&arc_pieces(arcs), lo, hi)),
        SymbolExpr::Product(a, b) => product_window(a, b, lo, hi, tol),
    }
}

fn product_window(
    a: &SymbolExpr,
    b: &SymbolExpr,
    lo: i64,
    hi: i64,
    tol: f64,
) -> Result<FourierWindow> {
    let mut inner = tol * 0.1;
    let mut best: Option<FourierWindow> = None;
    let mut last_tails = (f64::NAN, f64::NAN);
    for _ in 0..12 {
        let wb = window_rec(b, lo, hi, inner)?;
        let wa = window_rec(a, lo - wb.hi(), hi - wb.lo(), inner)?;
        let p = window_multiply(&wa, &wb);
        let tails = (wa.tail_bound(), wb.tail_bound());
        if p.tail_bound() <= tol {
            return Ok(p);
        }
        let stalled = tails == last_tails;
        if best
            .as_ref()
            .is_none_or(|w| p.tail_bound() < w.tail_bound())
        {
            best = Some(p.clone());
        }
        if stalled {
            break;
        }
        last_tails = tails;
        inner *= (tol / p.tail_bound()).min(0.1) * 0.5;
        if inner < 1e-300 {
            break;
        }
    }
    Ok(best.expect("at least one iteration"))
}

/// Pointwise value `φ(e^{iθ})`.
pub fn eval_symbol(phi: &SymbolExpr, theta: f64) -> Result<C64> {
    phi.eval(theta)
}
