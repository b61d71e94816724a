//! Innovation margins.
//!
//! Five univariate families drive the ARMAX recursion. Each supports CDF,
//! quantile and inverse-transform sampling, and reports the max-domain of
//! attraction that decides whether the margin clusters at high levels.
//!
//! `neg_log_cdf` is the workhorse for the process-level computations: the
//! stationary distribution is an infinite product of innovation CDFs whose
//! factors approach 1, so all products are accumulated as sums of `-log G`.

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude the GPD shape is treated as zero (exponential branch).
pub const GPD_SHAPE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginSpec {
    /// `exp(-x^-alpha)` on `x > 0`.
    Frechet { alpha: f64 },
    /// `1 - exp(-rate x)` on `x >= 0`.
    Exponential { rate: f64 },
    Uniform01,
    /// `1 - (1 + shape x / scale)^(-1/shape)` on `x >= 0`.
    Gpd { shape: f64, scale: f64 },
    /// Weibull law of minima, `1 - exp(-x^k)` on `x >= 0`.
    WeibullMin { k: f64 },
}

/// Max-domain of attraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttractionDomain {
    Frechet { alpha: f64 },
    Gumbel,
    Weibull,
}

impl AttractionDomain {
    pub fn frechet_alpha(&self) -> Option<f64> {
        match *self {
            AttractionDomain::Frechet { alpha } => Some(alpha),
            _ => None,
        }
    }
}

impl MarginSpec {
    pub fn unit_frechet() -> Self {
        MarginSpec::Frechet { alpha: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            MarginSpec::Frechet { alpha } if !ok(alpha) => {
                Err(Error::config(format!("frechet alpha must be > 0, got {alpha}")))
            }
            MarginSpec::Exponential { rate } if !ok(rate) => {
                Err(Error::config(format!("exponential rate must be > 0, got {rate}")))
            }
            MarginSpec::Gpd { scale, .. } if !ok(scale) => {
                Err(Error::config(format!("gpd scale must be > 0, got {scale}")))
            }
            MarginSpec::Gpd { shape, .. } if !shape.is_finite() => {
                Err(Error::config("gpd shape must be finite"))
            }
            MarginSpec::WeibullMin { k } if !ok(k) => {
                Err(Error::config(format!("weibull_min k must be > 0, got {k}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_unit_frechet(&self) -> bool {
        matches!(*self, MarginSpec::Frechet { alpha } if alpha == 1.0)
    }

    /// Upper end of the support; `+inf` for the heavy and light tailed
    /// families, exact otherwise.
    pub fn right_endpoint(&self) -> f64 {
        match *self {
            MarginSpec::Uniform01 => 1.0,
            MarginSpec::Gpd { shape, scale } if shape < -GPD_SHAPE_EPS => -scale / shape,
            _ => f64::INFINITY,
        }
    }

    /// Survival function `1 - G(x)`, computed without cancellation where the
    /// closed form allows it.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            MarginSpec::Frechet { alpha } => {
                if x <= 0.0 {
                    1.0
                } else {
                    -(-x.powf(-alpha)).exp_m1()
                }
            }
            MarginSpec::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            MarginSpec::Uniform01 => 1.0 - x.clamp(0.0, 1.0),
            MarginSpec::Gpd { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else if shape.abs() < GPD_SHAPE_EPS {
                    (-x / scale).exp()
                } else {
                    let z = shape * x / scale;
                    if z <= -1.0 {
                        0.0
                    } else {
                        (-z.ln_1p() / shape).exp()
                    }
                }
            }
            MarginSpec::WeibullMin { k } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x.powf(k)).exp()
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            MarginSpec::Frechet { alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-alpha)).exp()
                }
            }
            MarginSpec::Uniform01 => x.clamp(0.0, 1.0),
            _ => 1.0 - self.sf(x),
        }
    }

    /// `-log G(x)`; `+inf` below the support.
    pub fn neg_log_cdf(&self, x: f64) -> f64 {
        match *self {
            MarginSpec::Frechet { alpha } => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    x.powf(-alpha)
                }
            }
            MarginSpec::Uniform01 => {
                if x <= 0.0 {
                    f64::INFINITY
                } else if x >= 1.0 {
                    0.0
                } else {
                    -x.ln()
                }
            }
            _ => {
                if x <= 0.0 {
                    return f64::INFINITY;
                }
                -(-self.sf(x)).ln_1p()
            }
        }
    }

    /// Generalized inverse of the CDF on the open unit interval.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile probability must lie in (0,1), got {p}")));
        }
        // -log(1-p), accurate for small p
        let tail = -(-p).ln_1p();
        Ok(match *self {
            MarginSpec::Frechet { alpha } => (-p.ln()).powf(-1.0 / alpha),
            MarginSpec::Exponential { rate } => tail / rate,
            MarginSpec::Uniform01 => p,
            MarginSpec::Gpd { shape, scale } => {
                if shape.abs() < GPD_SHAPE_EPS {
                    scale * tail
                } else {
                    scale / shape * (shape * tail).exp_m1()
                }
            }
            MarginSpec::WeibullMin { k } => tail.powf(1.0 / k),
        })
    }

    /// Inverse-transform draw from one uniform of `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u).expect("Open01 draws lie in (0,1)")
    }

    pub fn attraction_domain(&self) -> AttractionDomain {
        match *self {
            MarginSpec::Frechet { alpha } => AttractionDomain::Frechet { alpha },
            MarginSpec::Gpd { shape, .. } if shape >= GPD_SHAPE_EPS => {
                AttractionDomain::Frechet { alpha: 1.0 / shape }
            }
            MarginSpec::Gpd { shape, .. } if shape <= -GPD_SHAPE_EPS => AttractionDomain::Weibull,
            MarginSpec::Uniform01 => AttractionDomain::Weibull,
            // exponential, gpd(0) and weibull_min: unbounded support, light tail
            _ => AttractionDomain::Gumbel,
        }
    }
}
