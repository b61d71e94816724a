//! Extreme-value copulas for the innovation vector and for the attractors of
//! the process.
//!
//! Every copula here is max-stable, so it is fully described by its exponent
//! function `V(x) = -log C(exp(-x_1), ..., exp(-x_d))` (the stable tail
//! dependence function), which is homogeneous of order one. Evaluation goes
//! through the exponent, which keeps tiny `u_j` from underflowing.

use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CopulaSpec {
    /// `exp(-(sum (-log u_j)^gamma)^(1/gamma))`, `gamma >= 1`.
    Gumbel { gamma: f64 },
    Independence,
    /// The minimum copula.
    Comonotone,
}

/// Common surface of the base copulas and of copulas built by the ratio rule.
pub trait ExtremeValueCopula {
    /// `-log C(exp(-x))` for `x` in `[0, inf]^d`.
    fn exponent(&self, x: &[f64]) -> f64;

    /// Number of coordinates the copula is bound to, if any.
    fn fixed_dim(&self) -> Option<usize> {
        None
    }

    fn cdf(&self, u: &[f64]) -> Result<f64> {
        if u.is_empty() {
            return Err(Error::domain("copula argument must be nonempty"));
        }
        if let Some(d) = self.fixed_dim() {
            if d != u.len() {
                return Err(Error::domain(format!("copula has dimension {d}, argument has {}", u.len())));
            }
        }
        if let Some(bad) = u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::domain(format!("copula argument {bad} outside [0,1]")));
        }
        if u.iter().any(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let x: Vec<f64> = u.iter().map(|v| -v.ln()).collect();
        Ok((-self.exponent(&x)).exp())
    }
}

impl CopulaSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CopulaSpec::Gumbel { gamma } if !(gamma >= 1.0 && gamma.is_finite()) => {
                Err(Error::config(format!("gumbel gamma must be finite and >= 1, got {gamma}")))
            }
            _ => Ok(()),
        }
    }

    fn is_product(&self) -> bool {
        match *self {
            CopulaSpec::Independence => true,
            CopulaSpec::Gumbel { gamma } => gamma == 1.0,
            CopulaSpec::Comonotone => false,
        }
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        self.cdf(u)
    }

    /// One draw from the copula in `[0,1]^d`.
    ///
    /// Gumbel uses the Marshall-Olkin frailty construction: with `S` positive
    /// stable of index `1/gamma` (Laplace transform `exp(-s^(1/gamma))`) and
    /// `E_j` i.i.d. standard exponential, `U_j = exp(-(E_j / S)^(1/gamma))`.
    pub fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        match *self {
            CopulaSpec::Comonotone => {
                let u: f64 = rng.sample(Open01);
                vec![u; d]
            }
            _ if self.is_product() => (0..d).map(|_| rng.sample(Open01)).collect(),
            CopulaSpec::Gumbel { gamma } => {
                let a = 1.0 / gamma;
                let s = positive_stable(a, rng);
                (0..d)
                    .map(|_| {
                        let e = -rng.sample::<f64, _>(Open01).ln();
                        (-(e / s).powf(a)).exp()
                    })
                    .collect()
            }
            CopulaSpec::Independence => unreachable!(),
        }
    }
}

impl ExtremeValueCopula for CopulaSpec {
    fn exponent(&self, x: &[f64]) -> f64 {
        if x.iter().any(|v| v.is_infinite()) {
            return f64::INFINITY;
        }
        match *self {
            CopulaSpec::Comonotone => x.iter().copied().fold(0.0, f64::max),
            _ if self.is_product() => x.iter().sum(),
            CopulaSpec::Gumbel { gamma } => {
                let m = x.iter().copied().fold(0.0, f64::max);
                if m == 0.0 {
                    return 0.0;
                }
                m * x.iter().map(|v| (v / m).powf(gamma)).sum::<f64>().powf(1.0 / gamma)
            }
            CopulaSpec::Independence => unreachable!(),
        }
    }
}

/// Positive stable variate with Laplace transform `exp(-s^a)`, `0 < a <= 1`,
/// by the Kanter / Chambers-Mallows-Stuck representation.
pub fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a >= 1.0 {
        return 1.0;
    }
    let theta = PI * rng.sample::<f64, _>(Open01);
    let w = -rng.sample::<f64, _>(Open01).ln();
    let part1 = (a * theta).sin() / theta.sin().powf(1.0 / a);
    let part2 = (((1.0 - a) * theta).sin() / w).powf((1.0 - a) / a);
    part1 * part2
}

/// Copula produced from a base extreme-value copula `C` and exponents
/// `theta_j` in `(0,1]` by the ratio rule
///
/// ```text
/// C_V(u) = C(u_1^(1/theta_1), ..., u_d^(1/theta_d))
///        / C(u_1^(1/theta_1 - 1), ..., u_d^(1/theta_d - 1))
/// ```
///
/// The rule does not guarantee a valid copula for every `(C, theta)`;
/// [`rectangle_mass_min`] probes an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCopula {
    pub base: CopulaSpec,
    pub theta: Vec<f64>,
}

impl DerivedCopula {
    pub fn new(base: CopulaSpec, theta: Vec<f64>) -> Result<Self> {
        let dc = DerivedCopula { base, theta };
        dc.validate()?;
        Ok(dc)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.theta.is_empty() {
            return Err(Error::config("derived copula needs at least one theta"));
        }
        if let Some(t) = self.theta.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::config(format!("derived copula theta {t} outside (0,1]")));
        }
        Ok(())
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        self.cdf(u)
    }
}

impl ExtremeValueCopula for DerivedCopula {
    fn exponent(&self, x: &[f64]) -> f64 {
        if x.iter().any(|v| v.is_infinite()) {
            return f64::INFINITY;
        }
        let num: Vec<f64> = x.iter().zip(&self.theta).map(|(v, t)| v / t).collect();
        let den: Vec<f64> = x.iter().zip(&self.theta).map(|(v, t)| v * (1.0 / t - 1.0)).collect();
        self.base.exponent(&num) - self.base.exponent(&den)
    }

    fn fixed_dim(&self) -> Option<usize> {
        Some(self.theta.len())
    }
}

/// Extremal coefficient `|J|^(1/gamma)` of a Gumbel copula on a subset of
/// size `m`.
pub fn extremal_coefficient(gamma: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("subset size must be >= 1"));
    }
    CopulaSpec::Gumbel { gamma }.validate()?;
    Ok(CopulaSpec::Gumbel { gamma }.exponent(&vec![1.0; m]))
}

/// Extremal coefficient of the ratio-rule copula built on Gumbel(gamma),
/// restricted to the coordinates whose exponents are `theta`:
/// `(sum (1/theta_j)^gamma)^(1/gamma) - (sum (1/theta_j - 1)^gamma)^(1/gamma)`.
pub fn extremal_coefficient_derived(gamma: f64, theta: &[f64]) -> Result<f64> {
    let dc = DerivedCopula::new(CopulaSpec::Gumbel { gamma }, theta.to_vec())?;
    Ok(dc.exponent(&vec![1.0; theta.len()]))
}

/// Most negative rectangle mass `C(b1,b2) - C(a1,b2) - C(b1,a2) + C(a1,a2)`
/// over all cells of a regular `grid x grid` partition of the unit square.
/// Nonnegative (up to rounding) for a bivariate copula.
pub fn rectangle_mass_min<C: ExtremeValueCopula + ?Sized>(copula: &C, grid: usize) -> Result<f64> {
    let pts: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let mut values = vec![vec![0.0; grid + 1]; grid + 1];
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate() {
            values[i][j] = copula.cdf(&[a, b])?;
        }
    }
    let mut worst = f64::INFINITY;
    for i in 0..grid {
        for j in 0..grid {
            let m = values[i + 1][j + 1] - values[i][j + 1] - values[i + 1][j] + values[i][j];
            worst = worst.min(m);
        }
    }
    Ok(worst)
}
