use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A finite run of Laurent coefficients `f̂(offset), …, f̂(offset + len - 1)`
/// together with an ℓ² bound on everything that was left out.
///
/// Coefficients follow `f̂(n) = (1/2π) ∫ f(e^{iθ}) e^{-inθ} dθ`, so negative
/// indices span `H²_-`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierWindow {
    offset: i64,
    coeffs: Vec<C64>,
    tail_bound: f64,
}

impl FourierWindow {
    pub fn new(offset: i64, coeffs: Vec<C64>, tail_bound: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "window needs at least one coefficient".into(),
            ));
        }
        if !(tail_bound >= 0.0 && tail_bound.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tail bound {tail_bound} is not a finite nonnegative number"
            )));
        }
        Ok(Self {
            offset,
            coeffs,
            tail_bound,
        })
    }

    /// Internal constructor for callers that already uphold the invariants.
    pub(crate) fn raw(offset: i64, coeffs: Vec<C64>, tail_bound: f64) -> Self {
        debug_assert!(!coeffs.is_empty());
        debug_assert!(tail_bound >= 0.0 && tail_bound.is_finite());
        Self {
            offset,
            coeffs,
            tail_bound,
        }
    }

    pub fn monomial(index: i64, value: C64) -> Self {
        Self::raw(index, vec![value], 0.0)
    }

    pub fn constant(value: C64) -> Self {
        Self::monomial(0, value)
    }

    pub fn zeros(lo: i64, hi: i64) -> Self {
        let len = (hi - lo + 1).max(1) as usize;
        Self::raw(lo, vec![C64::new(0.0, 0.0); len], 0.0)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Lowest stored index.
    pub fn lo(&self) -> i64 {
        self.offset
    }

    /// Highest stored index.
    pub fn hi(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    /// Coefficient at `n`, zero outside the stored range.
    pub fn coeff(&self, n: i64) -> C64 {
        let k = n - self.offset;
        if k < 0 || k >= self.coeffs.len() as i64 {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[k as usize]
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ℓ¹ norm of the stored coefficients; bounds the sup norm of the
    /// trigonometric polynomial they define.
    pub fn norm_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn with_tail(mut self, tail_bound: f64) -> Self {
        self.tail_bound = tail_bound;
        self
    }

    /// Value of the stored trigonometric polynomial at `e^{iθ}`.
    pub fn eval(&self, theta: f64) -> C64 {
        let step = C64::from_polar(1.0, theta);
        let mut z = C64::from_polar(1.0, theta * self.offset as f64);
        let mut acc = C64::new(0.0, 0.0);
        for c in &self.coeffs {
            acc += c * z;
            z *= step;
        }
        acc
    }

    /// Zero-padded copy whose stored range contains `[lo, hi]`.
    pub fn covering(&self, lo: i64, hi: i64) -> Self {
        let new_lo = lo.min(self.lo());
        let new_hi = hi.max(self.hi());
        if new_lo == self.lo() && new_hi == self.hi() {
            return self.clone();
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); (new_hi - new_lo + 1) as usize];
        let start = (self.offset - new_lo) as usize;
        coeffs[start..start + self.coeffs.len()].copy_from_slice(&self.coeffs);
        Self::raw(new_lo, coeffs, self.tail_bound)
    }

    /// Keep only indices in `[lo, hi]`; the discarded ℓ² mass joins the tail.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        if lo > hi {
            return Self::raw(
                lo,
                vec![C64::new(0.0, 0.0)],
                (self.tail_bound.powi(2) + self.norm_l2().powi(2)).sqrt(),
            );
        }
        let mut dropped = 0.0;
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for n in lo..=hi {
            coeffs.push(self.coeff(n));
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            let n = self.offset + k as i64;
            if n < lo || n > hi {
                dropped += c.norm_sqr();
            }
        }
        Self::raw(lo, coeffs, (self.tail_bound.powi(2) + dropped).sqrt())
    }

    /// Riesz projection `P`: indices `≥ 0`.
    pub fn analytic_part(&self) -> Self {
        self.keep(|n| n >= 0)
    }

    /// Projection `P_-` onto `H²_-`: indices `< 0`.
    pub fn coanalytic_part(&self) -> Self {
        self.keep(|n| n < 0)
    }

    fn keep(&self, pred: impl Fn(i64) -> bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if pred(self.offset + k as i64) {
                    *c
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Self::raw(self.offset, coeffs, self.tail_bound)
    }

    /// Multiply by `z^m`.
    pub fn shift(&self, m: i64) -> Self {
        Self::raw(self.offset + m, self.coeffs.clone(), self.tail_bound)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::raw(
            self.offset,
            self.coeffs.iter().map(|c| c * s).collect(),
            self.tail_bound * s.norm(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo().min(other.lo());
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|n| self.coeff(n) + other.coeff(n)).collect();
        Self::raw(lo, coeffs, self.tail_bound + other.tail_bound)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Drop exact-zero coefficients at both ends, keeping at least one entry.
    pub fn trimmed(&self) -> Self {
        let first = self.coeffs.iter().position(|c| *c != C64::new(0.0, 0.0));
        match first {
            None => Self::raw(0, vec![C64::new(0.0, 0.0)], self.tail_bound),
            Some(first) => {
                let last = self
                    .coeffs
                    .iter()
                    .rposition(|c| *c != C64::new(0.0, 0.0))
                    .unwrap();
                Self::raw(
                    self.offset + first as i64,
                    self.coeffs[first..=last].to_vec(),
                    self.tail_bound,
                )
            }
        }
    }
}

/// Cauchy product of two windows.
///
/// The tail follows `‖f‖·tail(g) + ‖g‖·tail(f) + tail(f)·tail(g)` with `‖·‖`
/// taken as the ℓ¹ norm of the stored coefficients, which dominates the sup
/// norm of the stored part.
pub fn window_multiply(f: &FourierWindow, g: &FourierWindow) -> FourierWindow {
    let mut out = vec![C64::new(0.0, 0.0); f.coeffs.len() + g.coeffs.len() - 1];
    for (i, a) in f.coeffs.iter().enumerate() {
        if *a == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    let tail =
        f.norm_l1() * g.tail_bound + g.norm_l1() * f.tail_bound + f.tail_bound * g.tail_bound;
    FourierWindow::raw(f.offset + g.offset, out, tail)
}

/// Coefficients of `f̄`: `ĝ(n) = conj(f̂(-n))`.
pub fn window_conjugate(f: &FourierWindow) -> FourierWindow {
    let coeffs = f.coeffs.iter().rev().map(|c| c.conj()).collect();
    FourierWindow::raw(-f.hi(), coeffs, f.tail_bound)
}

/// `⟨f, g⟩ = Σ f̂(n) conj(ĝ(n))` over the common support.
pub fn window_inner_product(f: &FourierWindow, g: &FourierWindow) -> C64 {
    let lo = f.lo().max(g.lo());
    let hi = f.hi().min(g.hi());
    (lo..=hi).map(|n| f.coeff(n) * g.coeff(n).conj()).sum()
}

/// Certified bound on `|⟨f, g⟩_{L²} - window_inner_product(f, g)|`.
pub fn inner_product_error(f: &FourierWindow, g: &FourierWindow) -> f64 {
    f.norm_l2() * g.tail_bound + g.norm_l2() * f.tail_bound + f.tail_bound * g.tail_bound
}
