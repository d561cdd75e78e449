//! Orthonormal Takenaka–Malmquist bases, reproducing kernels and the
//! orthogonal projection for `K_u = H² ⊖ uH²`, `u` a finite Blaschke product.

use serde::Serialize;

use crate::error::{check_tol, Error, Result};
use crate::fourier::{
    inner_product_error, window_inner_product, AnalyticRational, BlaschkeProduct, FourierWindow,
};
use crate::C64;

/// Gram defect that triggers widening of the basis windows.
const GRAM_DEFECT_LIMIT: f64 = 1e-8;

/// Orthonormal basis `e_1, …, e_d` of `K_u`, `d = deg u`.
#[derive(Debug, Clone, Serialize)]
pub struct ModelBasis {
    inner: BlaschkeProduct,
    basis: Vec<FourierWindow>,
    dim: usize,
    #[serde(skip)]
    functions: Vec<AnalyticRational>,
}

impl ModelBasis {
    pub fn inner(&self) -> &BlaschkeProduct {
        &self.inner
    }

    pub fn basis(&self) -> &[FourierWindow] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest tail over the basis windows.
    pub fn max_tail(&self) -> f64 {
        self.basis
            .iter()
            .map(|w| w.tail_bound())
            .fold(0.0, f64::max)
    }

    /// Highest stored Taylor index over the basis windows.
    pub fn max_index(&self) -> i64 {
        self.basis.iter().map(|w| w.hi()).max().unwrap_or(0)
    }

    /// `e_k(z)` for `|z| ≤ 1`, evaluated in closed form (`k` is 0-based).
    pub fn eval(&self, k: usize, z: C64) -> C64 {
        self.functions[k].eval(z)
    }

    /// `Σ coords[k] e_k` as a window.
    pub fn synthesize(&self, coords: &[C64]) -> FourierWindow {
        coords.iter().zip(&self.basis).fold(
            FourierWindow::constant(C64::new(0.0, 0.0)),
            |acc, (c, e)| acc.add(&e.scale(*c)),
        )
    }

    /// `max |⟨e_k, e_j⟩ - δ_kj|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, ej) in self.basis.iter().enumerate() {
            for (k, ek) in self.basis.iter().enumerate() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((window_inner_product(ek, ej) - target).norm());
            }
        }
        worst
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("basis serializes")
    }
}

/// `e_k(z) = √(1-|λ_k|²)/(1-λ̄_k z) · Π_{i<k} b_{λ_i}(z)`, zeros taken in the
/// given order. For `u = z^N` this is `1, z, …, z^{N-1}`.
pub fn tm_basis(u: &BlaschkeProduct, tol: f64) -> Result<ModelBasis> {
    check_tol(tol)?;
    if u.degree() == 0 {
        return Err(Error::ConstantInner);
    }
    let zeros = u.zeros();
    let functions: Vec<AnalyticRational> = (0..zeros.len())
        .map(|k| AnalyticRational {
            scale: C64::new((1.0 - zeros[k].norm_sqr()).sqrt(), 0.0),
            zeros: zeros[..k].to_vec(),
            poles: vec![zeros[k]],
        })
        .collect();
    let mut t = tol;
    for _ in 0..4 {
        let basis: Vec<FourierWindow> = functions.iter().map(|f| f.window(1, t)).collect();
        let mb = ModelBasis {
            inner: u.clone(),
            basis,
            dim: zeros.len(),
            functions: functions.clone(),
        };
        if mb.gram_defect() <= GRAM_DEFECT_LIMIT {
            return Ok(mb);
        }
        t *= 1e-2;
    }
    Err(Error::Numerical(format!(
        "Takenaka–Malmquist Gram defect stays above {GRAM_DEFECT_LIMIT}"
    )))
}

/// `k_λ^u(z) = (1 - conj(u(λ)) u(z)) / (1 - λ̄ z)`.
pub fn reproducing_kernel(u: &BlaschkeProduct, lambda: C64, tol: f64) -> Result<FourierWindow> {
    check_tol(tol)?;
    if lambda.norm().is_nan() || lambda.norm() >= 1.0 {
        return Err(Error::OutsideDisc {
            re: lambda.re,
            im: lambda.im,
        });
    }
    let szego = AnalyticRational {
        scale: C64::new(1.0, 0.0),
        zeros: vec![],
        poles: vec![lambda],
    };
    let weight = -u.eval(lambda).conj();
    let tilted = AnalyticRational {
        scale: u.constant() * weight,
        zeros: u.zeros().to_vec(),
        poles: vec![lambda],
    };
    let a = szego.window(1, tol / 2.0);
    let b = tilted.window(1, tol / 2.0);
    Ok(a.add(&b).trimmed())
}

/// Coordinates `⟨f, e_k⟩` of `P_{K_u} f`.
pub fn project_onto_ku(basis: &ModelBasis, f: &FourierWindow) -> Vec<C64> {
    basis
        .basis
        .iter()
        .map(|e| window_inner_product(f, e))
        .collect()
}

/// Bound on the error of each coordinate returned by [`project_onto_ku`].
pub fn projection_error(basis: &ModelBasis, f: &FourierWindow) -> f64 {
    basis
        .basis
        .iter()
        .map(|e| inner_product_error(f, e))
        .fold(0.0, f64::max)
}
