//! Closed-form values used to check the numerics, and the essential-range
//! machinery behind the bounds for normal dual truncated Toeplitz operators.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{check_tol, Error, Result};
use crate::fourier::{BlaschkeProduct, SymbolExpr};
use crate::linalg::sigma_max;
use crate::operators::hankel_matrix;
use crate::C64;

/// Minimum number of samples for a continuous essential range.
pub const MIN_RESOLUTION: usize = 64;

const SAME_VALUE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EssRangeKind {
    FiniteSet,
    SampledCurve,
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssRangeModel {
    pub kind: EssRangeKind,
    pub points: Vec<C64>,
    /// Arc measure carried by each point (`finite_set` only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<f64>,
}

/// `{α, α + β‖x‖²}`, the spectrum of `αI + β x⊗x`.
pub fn oracle_rank_one_spectrum(alpha: C64, beta: C64, x_norm_sq: f64) -> Result<Vec<C64>> {
    if x_norm_sq.is_nan() || x_norm_sq <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "squared norm {x_norm_sq} must be positive"
        )));
    }
    if beta == C64::new(0.0, 0.0) {
        return Ok(vec![alpha]);
    }
    Ok(vec![alpha, alpha + beta * x_norm_sq])
}

fn abs_at_origin(u: &BlaschkeProduct) -> Result<f64> {
    if u.degree() == 0 {
        return Err(Error::ConstantInner);
    }
    Ok(u.constant().norm() * u.zeros().iter().map(|z| z.norm()).product::<f64>())
}

/// `m(S_u) = |u(0)|`.
pub fn oracle_m_compressed_shift(u: &BlaschkeProduct) -> Result<f64> {
    abs_at_origin(u)
}

/// `m(D_u)`: `0` when `u(0) = 0`, otherwise `|u(0)|`.
pub fn oracle_m_dual_shift(u: &BlaschkeProduct) -> Result<f64> {
    let v = abs_at_origin(u)?;
    Ok(if u.zeros().iter().any(|z| z.norm() == 0.0) {
        0.0
    } else {
        v
    })
}

/// `Some(1)` when `φ` is structurally a unimodular constant.
pub fn oracle_constant_symbol(phi: &SymbolExpr) -> Option<f64> {
    phi.constant_value()
        .filter(|c| (c.norm() - 1.0).abs() <= 1e-12)
        .map(|_| 1.0)
}

fn sample_angles(resolution: usize) -> impl Iterator<Item = f64> {
    (0..resolution).map(move |k| TAU * k as f64 / resolution as f64)
}

/// Model of the essential range of `φ`.
///
/// Piecewise-constant symbols give the finite set of values with their arc
/// measures. A continuous real symbol plus a constant gives a segment between
/// the sampled extrema. Anything else is sampled at `resolution` points.
pub fn ess_range(phi: &SymbolExpr, resolution: usize) -> Result<EssRangeModel> {
    if let Some(c) = phi.constant_value() {
        return Ok(EssRangeModel {
            kind: EssRangeKind::FiniteSet,
            points: vec![c],
            measures: vec![TAU],
        });
    }
    if phi.is_piecewise_constant() {
        let cuts = phi.breakpoints();
        let mut points: Vec<C64> = Vec::new();
        let mut measures: Vec<f64> = Vec::new();
        for (i, &a) in cuts.iter().enumerate() {
            let b = if i + 1 < cuts.len() {
                cuts[i + 1]
            } else {
                cuts[0] + TAU
            };
            if b - a <= 0.0 {
                continue;
            }
            let v = phi.eval(0.5 * (a + b))?;
            match points.iter().position(|p| (p - v).norm() <= SAME_VALUE_TOL) {
                Some(j) => measures[j] += b - a,
                None => {
                    points.push(v);
                    measures.push(b - a);
                }
            }
        }
        return Ok(EssRangeModel {
            kind: EssRangeKind::FiniteSet,
            points,
            measures,
        });
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} is below {MIN_RESOLUTION}"
        )));
    }
    if !phi.has_piecewise_part() {
        if let Some(beta) = phi.real_plus_constant() {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for t in sample_angles(resolution) {
                let x = (phi.eval(t)? - beta).re;
                lo = lo.min(x);
                hi = hi.max(x);
            }
            return Ok(EssRangeModel {
                kind: EssRangeKind::Segment,
                points: vec![C64::new(lo, 0.0) + beta, C64::new(hi, 0.0) + beta],
                measures: vec![],
            });
        }
    }
    // half-step offset keeps samples off arc endpoints
    let points = sample_angles(resolution)
        .filter_map(|t| phi.eval(t + 0.5 * TAU / resolution as f64).ok())
        .collect::<Vec<_>>();
    if points.len() < MIN_RESOLUTION {
        return Err(Error::Numerical(
            "too few valid samples of the symbol".into(),
        ));
    }
    Ok(EssRangeModel {
        kind: EssRangeKind::SampledCurve,
        points,
        measures: vec![],
    })
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counter-clockwise convex hull by monotone chain. Collinear input gives
/// the two extreme points.
pub fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut p: Vec<C64> = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup_by(|a, b| (*a - *b).norm() <= SAME_VALUE_TOL);
    if p.len() <= 2 {
        return p;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &C64>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0
            {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // all points coincide after rounding
        return vec![p[0]];
    }
    hull
}

fn segment_distance(a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

/// Distance from the origin to the convex hull of `points`.
pub fn distance_to_hull(points: &[C64]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => f64::INFINITY,
        1 => hull[0].norm(),
        2 => segment_distance(hull[0], hull[1]),
        n => {
            let origin = C64::new(0.0, 0.0);
            let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], origin) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n)
                    .map(|i| segment_distance(hull[i], hull[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalBounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
}

/// `dist(0, conv ess ran φ) ≤ m(D_φ) ≤ ess inf |φ|` for a normal `D_φ`.
///
/// Normality is accepted structurally for `φ = real + constant`; otherwise
/// the caller must assert it. `exact` is set when the model is convex or the
/// two bounds coincide.
pub fn normal_dtto_bounds(
    phi: &SymbolExpr,
    resolution: usize,
    assert_normal: bool,
) -> Result<NormalBounds> {
    if !assert_normal && phi.real_plus_constant().is_none() {
        return Err(Error::Unsupported(
            "symbol is not a real function plus a constant".into(),
        ));
    }
    let model = ess_range(phi, resolution)?;
    let lower = distance_to_hull(&model.points);
    let upper = match model.kind {
        EssRangeKind::Segment => segment_distance(model.points[0], model.points[1]),
        _ => model
            .points
            .iter()
            .map(|p| p.norm())
            .fold(f64::INFINITY, f64::min),
    };
    let convex = model.kind == EssRangeKind::Segment || model.points.len() == 1;
    let tight = (upper - lower).abs() <= 1e-12 * upper.max(1.0);
    Ok(NormalBounds {
        lower,
        upper,
        exact: (convex || tight).then_some(lower),
    })
}

/// `true` when every zero of `u` appears among the zeros of `φ` with at
/// least the same multiplicity (zeros matched within `match_tol`).
pub fn divides(u: &BlaschkeProduct, phi: &BlaschkeProduct, match_tol: f64) -> bool {
    let mut pool: Vec<C64> = phi.zeros().to_vec();
    for z in u.zeros() {
        match pool.iter().position(|w| (w - z).norm() <= match_tol) {
            Some(i) => {
                pool.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NehariEstimate {
    pub value: f64,
    /// Hankel truncation size; `None` when the value is exact.
    pub truncation: Option<usize>,
    /// `true` when `value` is exact rather than a truncation lower bound.
    pub exact: bool,
}

/// `‖A_φ‖ = ‖H_{ūφ}‖`, estimated as `σ_max` of the `size × size` Hankel
/// matrix of `ūφ`. This increases to the true norm with `size`. When `u`
/// divides an inner `φ` the value is exactly `0`.
pub fn norm_aphi_nehari(
    u: &BlaschkeProduct,
    phi: &SymbolExpr,
    size: usize,
    tol: f64,
) -> Result<NehariEstimate> {
    check_tol(tol)?;
    if !phi.is_analytic() {
        return Err(Error::InvalidArgument("symbol must be analytic".into()));
    }
    if size == 0 {
        return Err(Error::InvalidArgument(
            "truncation must be at least 1".into(),
        ));
    }
    if let Some(b) = phi.as_blaschke_product() {
        if divides(u, &b, 1e-12) {
            return Ok(NehariEstimate {
                value: 0.0,
                truncation: None,
                exact: true,
            });
        }
    }
    let tilted = SymbolExpr::from(u).conj().times(phi.clone());
    let h = hankel_matrix(&tilted, size, size, tol)?;
    Ok(NehariEstimate {
        value: sigma_max(h.entries()),
        truncation: Some(size),
        exact: false,
    })
}
