use crate::error::{check_tol, Error, Result};
use crate::fourier::FourierWindow;
use crate::C64;

/// Tolerance on `|constant| = 1` and on matching zeros.
pub(crate) const UNIMODULAR_TOL: f64 = 1e-12;

/// Rescale onto the circle; values already within a few ulps are kept as is
/// so that serialization round-trips bit for bit.
pub(crate) fn normalize_unimodular(c: C64) -> C64 {
    if (c.norm() - 1.0).abs() <= 4.0 * f64::EPSILON {
        c
    } else {
        c / c.norm()
    }
}

pub(crate) fn check_in_disc(lambda: C64) -> Result<()> {
    if lambda.re.is_finite() && lambda.im.is_finite() && lambda.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc {
            re: lambda.re,
            im: lambda.im,
        })
    }
}

/// `b_λ(z) = (z - λ) / (1 - λ̄ z)`.
pub fn blaschke_factor(lambda: C64, z: C64) -> C64 {
    (z - lambda) / (C64::new(1.0, 0.0) - lambda.conj() * z)
}

/// Coefficients of `b_λ` on `0..=n_max` with the exact ℓ² tail of the
/// remaining geometric series.
pub fn blaschke_factor_coeffs(lambda: C64, n_max: usize) -> Result<FourierWindow> {
    check_in_disc(lambda)?;
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let r2 = lambda.norm_sqr();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(-lambda);
    let mut p = C64::new(1.0 - r2, 0.0);
    for _ in 1..=n_max {
        coeffs.push(p);
        p *= lambda.conj();
    }
    // Σ_{n>n_max} (1-|λ|²)² |λ|^{2(n-1)} = (1-|λ|²) |λ|^{2 n_max}
    let tail = (1.0 - r2) * lambda.norm().powi(n_max as i32) / (1.0 - r2).sqrt();
    Ok(FourierWindow::raw(0, coeffs, tail))
}

/// `scale · Π b_{a}(z) · Π 1/(1 - ā z)`: every analytic rational function
/// the crate needs to expand (Blaschke products, Takenaka–Malmquist
/// functions, reproducing kernels).
#[derive(Debug, Clone)]
pub(crate) struct AnalyticRational {
    pub scale: C64,
    pub zeros: Vec<C64>,
    pub poles: Vec<C64>,
}

impl AnalyticRational {
    fn origin_order(&self) -> usize {
        self.zeros.iter().filter(|a| a.norm() == 0.0).count()
    }

    fn nonzero_zeros(&self) -> impl Iterator<Item = &C64> {
        self.zeros.iter().filter(|a| a.norm() != 0.0)
    }

    fn nonzero_poles(&self) -> impl Iterator<Item = &C64> {
        self.poles.iter().filter(|a| a.norm() != 0.0)
    }

    fn rho(&self) -> f64 {
        self.nonzero_zeros()
            .chain(self.nonzero_poles())
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        let mut v = self.scale;
        for a in &self.zeros {
            v *= blaschke_factor(*a, z);
        }
        for a in &self.poles {
            v /= one - a.conj() * z;
        }
        v
    }

    /// Taylor coefficients at indices `0..n`, exact up to rounding.
    pub fn coeffs(&self, n: usize) -> Vec<C64> {
        let zero = C64::new(0.0, 0.0);
        let mut f = vec![zero; n.max(1)];
        f[0] = self.scale;
        for a in &self.zeros {
            // multiply by (z - a), then divide by (1 - ā z)
            let mut prev_in = zero;
            let mut prev_out = zero;
            for fk in f.iter_mut() {
                let g = prev_in - a * *fk;
                prev_in = *fk;
                let h = g + a.conj() * prev_out;
                *fk = h;
                prev_out = h;
            }
        }
        for a in self.nonzero_poles() {
            let mut prev = zero;
            for c in f.iter_mut() {
                let h = *c + a.conj() * prev;
                *c = h;
                prev = h;
            }
        }
        f.truncate(n);
        f
    }

    /// Sup of `|g|` on `|z| = r` bounded through the factors, where `g`
    /// omits the zeros at the origin.
    fn cauchy_majorant(&self, r: f64) -> f64 {
        let mut m = self.scale.norm();
        for a in self.nonzero_zeros() {
            let s = a.norm();
            m *= (r + s) / (1.0 - s * r);
        }
        for a in self.nonzero_poles() {
            m /= 1.0 - a.norm() * r;
        }
        m
    }

    fn radii(&self) -> Vec<f64> {
        let rho = self.rho();
        let top = 1.0 / rho;
        (1..64)
            .map(|k| 1.0 + (top - 1.0) * k as f64 / 64.0)
            .collect()
    }

    /// Certified ℓ² norm of the coefficients at indices `≥ n`.
    pub fn tail_after(&self, n: usize) -> f64 {
        let s = self.origin_order();
        if self.rho() == 0.0 {
            return if n > s { 0.0 } else { self.scale.norm() };
        }
        let m = n.saturating_sub(s) as i32;
        self.radii()
            .into_iter()
            .map(|r| self.cauchy_majorant(r) * r.powi(-m) / (1.0 - r.powi(-2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest `n` with `tail_after(n) <= tol`.
    pub fn terms_for(&self, tol: f64) -> usize {
        let s = self.origin_order();
        if self.rho() == 0.0 {
            return s + 1;
        }
        let best = self
            .radii()
            .into_iter()
            .map(|r| {
                let lead = self.cauchy_majorant(r) / (tol * (1.0 - r.powi(-2)).sqrt());
                if lead <= 1.0 {
                    0.0
                } else {
                    (lead.ln() / r.ln()).ceil()
                }
            })
            .fold(f64::INFINITY, f64::min);
        let mut n = s + best as usize;
        // the closed-form count can be off by one through rounding
        while self.tail_after(n) > tol {
            n += 1;
        }
        n.max(1)
    }

    /// Window on `0..n` with `n` large enough for `tol` and covering `min_terms`.
    pub fn window(&self, min_terms: usize, tol: f64) -> FourierWindow {
        let n = self.terms_for(tol).max(min_terms).max(1);
        FourierWindow::raw(0, self.coeffs(n), self.tail_after(n))
    }
}

/// A finite Blaschke product `c · Π b_{λ_i}`, `|c| = 1`, `|λ_i| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    constant: C64,
    zeros: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(constant: C64, zeros: Vec<C64>) -> Result<Self> {
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
            zeros,
        })
    }

    pub fn from_zeros(zeros: Vec<C64>) -> Result<Self> {
        Self::new(C64::new(1.0, 0.0), zeros)
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        Self {
            constant: C64::new(1.0, 0.0),
            zeros: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// The single factor `b_λ`.
    pub fn factor(lambda: C64) -> Result<Self> {
        Self::from_zeros(vec![lambda])
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.constant, |acc, a| acc * blaschke_factor(*a, z))
    }

    /// `u(0) = c · Π (-λ_i)`.
    pub fn value_at_zero(&self) -> C64 {
        self.zeros.iter().fold(self.constant, |acc, a| -acc * a)
    }

    /// `|u(0)| = Π |λ_i|`.
    pub fn abs_at_zero(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).product()
    }

    /// Largest zero modulus; sets the geometric decay of every expansion.
    pub fn decay_rate(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn rational(&self) -> AnalyticRational {
        AnalyticRational {
            scale: self.constant,
            zeros: self.zeros.clone(),
            poles: vec![],
        }
    }

    /// Taylor window of `u` with certified tail `≤ tol`.
    pub fn window(&self, tol: f64) -> Result<FourierWindow> {
        check_tol(tol)?;
        Ok(self.rational().window(1, tol))
    }
}
