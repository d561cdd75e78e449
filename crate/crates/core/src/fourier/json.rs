//! JSON form of symbols and Blaschke products.
//!
//! ```text
//! {"kind":"blaschke_quotient","constant":[re,im],"z_power":m,"zeros":[[re,im],...]}
//! {"kind":"laurent","offset":n0,"coeffs":[[re,im],...]}
//! {"kind":"conjugate","of":...}
//! {"kind":"sum","left":...,"constant":[re,im]}
//! {"kind":"piecewise","arcs":[{"from":t0,"to":t1,"value":[re,im]},...]}
//! {"kind":"product","left":...,"right":...}
//! ```
//!
//! A `BlaschkeProduct` uses the `blaschke_quotient` object with
//! `z_power ≥ 0`; the z-power becomes that many zeros at the origin.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fourier::symbol::{validate_arcs, Arc, BlaschkeQuotient, LaurentPoly};
use crate::fourier::{BlaschkeProduct, SymbolExpr};
use crate::C64;

type Pair = [f64; 2];

fn pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn cplx(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcJson {
    pub from: f64,
    pub to: f64,
    pub value: Pair,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolJson {
    BlaschkeQuotient {
        constant: Pair,
        #[serde(default)]
        z_power: i64,
        #[serde(default)]
        zeros: Vec<Pair>,
    },
    Laurent {
        offset: i64,
        coeffs: Vec<Pair>,
    },
    Conjugate {
        of: Box<SymbolJson>,
    },
    Sum {
        left: Box<SymbolJson>,
        constant: Pair,
    },
    Piecewise {
        arcs: Vec<ArcJson>,
    },
    Product {
        left: Box<SymbolJson>,
        right: Box<SymbolJson>,
    },
}

impl TryFrom<SymbolJson> for SymbolExpr {
    type Error = Error;

    fn try_from(j: SymbolJson) -> Result<Self, Error> {
        Ok(match j {
            SymbolJson::BlaschkeQuotient {
                constant,
                z_power,
                zeros,
            } => SymbolExpr::BlaschkeQuotient(BlaschkeQuotient::new(
                cplx(constant),
                z_power,
                zeros.into_iter().map(cplx).collect(),
            )?),
            SymbolJson::Laurent { offset, coeffs } => SymbolExpr::Laurent(LaurentPoly::new(
                offset,
                coeffs.into_iter().map(cplx).collect(),
            )?),
            SymbolJson::Conjugate { of } => SymbolExpr::Conjugate(Box::new((*of).try_into()?)),
            SymbolJson::Sum { left, constant } => {
                SymbolExpr::Sum(Box::new((*left).try_into()?), cplx(constant))
            }
            SymbolJson::Piecewise { arcs } => {
                let arcs: Vec<Arc> = arcs
                    .into_iter()
                    .map(|a| Arc {
                        from: a.from,
                        to: a.to,
                        value: cplx(a.value),
                    })
                    .collect();
                validate_arcs(&arcs)?;
                SymbolExpr::PiecewiseArcs(arcs)
            }
            SymbolJson::Product { left, right } => SymbolExpr::Product(
                Box::new((*left).try_into()?),
                Box::new((*right).try_into()?),
            ),
        })
    }
}

impl From<&SymbolExpr> for SymbolJson {
    fn from(s: &SymbolExpr) -> Self {
        match s {
            SymbolExpr::Laurent(p) => SymbolJson::Laurent {
                offset: p.offset,
                coeffs: p.coeffs.iter().copied().map(pair).collect(),
            },
            SymbolExpr::BlaschkeQuotient(q) => SymbolJson::BlaschkeQuotient {
                constant: pair(q.constant),
                z_power: q.z_power,
                zeros: q.zeros.iter().copied().map(pair).collect(),
            },
            SymbolExpr::Conjugate(x) => SymbolJson::Conjugate {
                of: Box::new((&**x).into()),
            },
            SymbolExpr::Sum(x, c) => SymbolJson::Sum {
                left: Box::new((&**x).into()),
                constant: pair(*c),
            },
            SymbolExpr::PiecewiseArcs(arcs) => SymbolJson::Piecewise {
                arcs: arcs
                    .iter()
                    .map(|a| ArcJson {
                        from: a.from,
                        to: a.to,
                        value: pair(a.value),
                    })
                    .collect(),
            },
            SymbolExpr::Product(a, b) => SymbolJson::Product {
                left: Box::new((&**a).into()),
                right: Box::new((&**b).into()),
            },
        }
    }
}

impl Serialize for SymbolExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymbolJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymbolExpr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        SymbolJson::deserialize(deserializer)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for BlaschkeProduct {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymbolJson::BlaschkeQuotient {
            constant: pair(self.constant()),
            z_power: 0,
            zeros: self.zeros().iter().copied().map(pair).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BlaschkeProduct {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match SymbolJson::deserialize(deserializer)? {
            SymbolJson::BlaschkeQuotient {
                constant,
                z_power,
                zeros,
            } => {
                if z_power < 0 {
                    return Err(D::Error::custom("an inner function needs z_power >= 0"));
                }
                let mut all = vec![C64::new(0.0, 0.0); z_power as usize];
                all.extend(zeros.into_iter().map(cplx));
                BlaschkeProduct::new(cplx(constant), all).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!(
                "expected a blaschke_quotient object, got {other:?}"
            ))),
        }
    }
}
