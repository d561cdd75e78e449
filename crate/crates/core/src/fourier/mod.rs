//! Laurent coefficients on the unit circle for every supported symbol class.

mod blaschke;
mod json;
mod symbol;
mod window;

pub(crate) use blaschke::AnalyticRational;
pub use blaschke::{blaschke_factor, blaschke_factor_coeffs, BlaschkeProduct};
pub use json::{ArcJson, SymbolJson};
pub use symbol::{eval_symbol, symbol_to_window, Arc, BlaschkeQuotient, LaurentPoly, SymbolExpr};
pub use window::{
    inner_product_error, window_conjugate, window_inner_product, window_multiply, FourierWindow,
};
