use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};

/// Degree law of a configuration-model vertex.
///
/// The tail families are defined on integers `m >= 3` exactly through their
/// tail function, `P(d >= m) = 1` for `m <= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DegreeDistribution {
    Deterministic(usize),
    /// `P(d = m) = (1-p)^(m-1) p` on `m >= 1`.
    Geometric(f64),
    /// `P(d >= m) = 3^a m^-a` for `m >= 3`.
    PowerLawTail(f64),
    /// `P(d >= m) = exp(-m^(1/b) + 3^(1/b))` for `m >= 3`.
    StretchedExpTail(f64),
}

impl DegreeDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Deterministic(_) => Ok(()),
            Self::Geometric(p) if p > 0.0 && p < 1.0 => Ok(()),
            Self::Geometric(p) => Err(Error::invalid(format!("geometric p={p} must lie in (0, 1)"))),
            Self::PowerLawTail(a) if a > 2.0 && a.is_finite() => Ok(()),
            Self::PowerLawTail(a) => Err(Error::invalid(format!(
                "power-law tail exponent a={a} must exceed 2 (finite second moment)"
            ))),
            Self::StretchedExpTail(b) if b > 1.0 && b.is_finite() => Ok(()),
            Self::StretchedExpTail(b) => {
                Err(Error::invalid(format!("stretched-exponential b={b} must exceed 1")))
            }
        }
    }

    /// Smallest value in the support.
    pub fn min_support(&self) -> usize {
        match *self {
            Self::Deterministic(d) => d,
            Self::Geometric(_) => 1,
            Self::PowerLawTail(_) | Self::StretchedExpTail(_) => 3,
        }
    }

    /// `P(d >= m)`.
    pub fn tail(&self, m: usize) -> f64 {
        match *self {
            Self::Deterministic(d) => f64::from(u8::from(m <= d)),
            Self::Geometric(p) => {
                if m <= 1 {
                    1.0
                } else {
                    (1.0 - p).powi((m - 1) as i32)
                }
            }
            Self::PowerLawTail(a) => {
                if m <= 3 {
                    1.0
                } else {
                    (3.0 / m as f64).powf(a)
                }
            }
            Self::StretchedExpTail(b) => {
                if m <= 3 {
                    1.0
                } else {
                    (-(m as f64).powf(1.0 / b) + 3f64.powf(1.0 / b)).exp()
                }
            }
        }
    }

    /// `P(d = m)`.
    pub fn pmf(&self, m: usize) -> f64 {
        self.tail(m) - self.tail(m + 1)
    }

    /// Inverse-tail sample: the largest `m` with `P(d >= m) >= u`, `u ~ U(0, 1]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = 1.0 - rng.random::<f64>();
        self.inverse_tail(u)
    }

    /// Largest `m` in the support with `P(d >= m) >= u`, for `u` in `(0, 1]`.
    pub fn inverse_tail(&self, u: f64) -> usize {
        let guess = match *self {
            Self::Deterministic(d) => return d,
            Self::Geometric(p) => 1.0 + (u.ln() / (1.0 - p).ln()).floor(),
            Self::PowerLawTail(a) => (3.0 * u.powf(-1.0 / a)).floor(),
            Self::StretchedExpTail(b) => (3f64.powf(1.0 / b) - u.ln()).powf(b).floor(),
        };
        let floor = self.min_support();
        let mut m = if guess.is_finite() && guess < 9.0e15 { guess as usize } else { usize::MAX / 2 };
        m = m.max(floor);
        // Closed-form inversions can be off by one at integer boundaries.
        while self.tail(m + 1) >= u {
            m += 1;
        }
        while m > floor && self.tail(m) < u {
            m -= 1;
        }
        m
    }

    /// `E d`.
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.moments().0)
    }

    /// Mean `nu = E[d(d-1)] / E[d]` of the size-biased offspring law.
    pub fn size_biased_mean(&self) -> Result<f64> {
        self.validate()?;
        let (m1, fact2) = self.moments();
        if m1 == 0.0 {
            return Err(Error::invalid("size-biased law undefined when E d = 0"));
        }
        Ok(fact2 / m1)
    }

    /// `(E d, E d(d-1))`, via `E d = sum_{m>=1} P(d>=m)` and
    /// `E d(d-1) = 2 sum_{m>=1} (m-1) P(d>=m)`.
    fn moments(&self) -> (f64, f64) {
        match *self {
            Self::Deterministic(d) => {
                let d = d as f64;
                (d, d * (d - 1.0))
            }
            Self::Geometric(p) => (1.0 / p, 2.0 * (1.0 - p) / (p * p)),
            Self::PowerLawTail(a) => {
                let c = 3f64.powf(a);
                let z_a = hurwitz_zeta(a, 3.0);
                let z_a1 = hurwitz_zeta(a - 1.0, 3.0);
                (2.0 + c * z_a, 2.0 * (1.0 + c * (z_a1 - z_a)))
            }
            Self::StretchedExpTail(b) => stretched_moments(b),
        }
    }
}

/// Sums the stretched-exponential tail directly, then closes the remainder
/// with the incomplete-gamma integral of the continuous tail.
fn stretched_moments(b: f64) -> (f64, f64) {
    const MAX_TERMS: usize = 2_000_000;
    let shift = 3f64.powf(1.0 / b);
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut m = 3usize;
    loop {
        let t = (shift - (m as f64).powf(1.0 / b)).exp();
        s1 += t;
        s2 += (m as f64 - 1.0) * t;
        m += 1;
        if (m as f64) * t < 1e-17 * s1 || m >= MAX_TERMS {
            break;
        }
    }
    // Remaining terms m, m+1, ... by the midpoint rule on [m - 1/2, inf).
    let u = (m as f64 - 0.5).powf(1.0 / b);
    let tail0 = shift.exp() * b * gamma(b) * gamma_ur(b, u);
    let tail_x = shift.exp() * b * gamma(2.0 * b) * gamma_ur(2.0 * b, u);
    let s1 = s1 + tail0;
    let s2 = s2 + tail_x - tail0;
    (2.0 + s1, 2.0 * (1.0 + s2))
}

/// Hurwitz zeta `sum_{m>=0} (m + q)^-s` for `s > 1`, `q > 0`, by
/// Euler-Maclaurin summation after 30 explicit terms.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1, q > 0");
    const B2J: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    const N: usize = 30;
    let mut sum: f64 = (0..N).map(|m| (q + m as f64).powf(-s)).sum();
    let x = q + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // t_j = s (s+1) ... (s+2j-2) x^(-s-2j+1) / (2j)!
    let mut t = s * x.powf(-s - 1.0) / 2.0;
    sum += B2J[0] * t;
    for (j, b) in B2J.iter().enumerate().skip(1) {
        let k = 2.0 * (j as f64 + 1.0);
        t *= (s + k - 3.0) * (s + k - 2.0) / (x * x * (k - 1.0) * k);
        sum += b * t;
    }
    sum
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Deterministic(d) => write!(f, "det:d={d}"),
            Self::Geometric(p) => write!(f, "geom:p={p}"),
            Self::PowerLawTail(a) => write!(f, "plaw:a={a}"),
            Self::StretchedExpTail(b) => write!(f, "sexp:b={b}"),
        }
    }
}

impl FromStr for DegreeDistribution {
    type Err = Error;

    /// Parses `geom:p=0.5`, `plaw:a=2.5`, `sexp:b=2.0` or `det:d=3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("degree distribution `{s}`; expected geom:p=, plaw:a=, sexp:b= or det:d="));
        let (family, param) = s.trim().split_once(':').ok_or_else(bad)?;
        let (key, value) = param.split_once('=').ok_or_else(bad)?;
        let dist = match (family, key) {
            ("det", "d") => Self::Deterministic(value.parse().map_err(|_| bad())?),
            ("geom", "p") => Self::Geometric(value.parse().map_err(|_| bad())?),
            ("plaw", "a") => Self::PowerLawTail(value.parse().map_err(|_| bad())?),
            ("sexp", "b") => Self::StretchedExpTail(value.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

impl TryFrom<String> for DegreeDistribution {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DegreeDistribution> for String {
    fn from(d: DegreeDistribution) -> String {
        d.to_string()
    }
}

/// Offspring law of a Galton-Watson tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffspringDistribution {
    /// Any degree law used as a child count.
    Law(DegreeDistribution),
    /// `P(c = j) = (1-p)^j p` on `j >= 0`.
    ShiftedGeometric(f64),
}

impl OffspringDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Law(d) => d.validate(),
            Self::ShiftedGeometric(p) if p > 0.0 && p < 1.0 => Ok(()),
            Self::ShiftedGeometric(p) => {
                Err(Error::invalid(format!("shifted geometric p={p} must lie in (0, 1)")))
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self {
            Self::Law(d) => d.sample(rng),
            Self::ShiftedGeometric(p) => DegreeDistribution::Geometric(p).sample(rng) - 1,
        }
    }

    /// Mean offspring number `mu`.
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            Self::Law(d) => d.mean(),
            Self::ShiftedGeometric(p) => Ok((1.0 - p) / p),
        }
    }
}

impl fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Law(d) => d.fmt(f),
            Self::ShiftedGeometric(p) => write!(f, "sgeom:p={p}"),
        }
    }
}

impl FromStr for OffspringDistribution {
    type Err = Error;

    /// Any degree-law string, or `sgeom:p=0.5` for the geometric law on `{0, 1, ...}`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(p) = s.trim().strip_prefix("sgeom:p=") {
            let p = p.parse().map_err(|_| Error::Parse(format!("offspring distribution `{s}`")))?;
            let d = Self::ShiftedGeometric(p);
            d.validate()?;
            return Ok(d);
        }
        Ok(Self::Law(s.parse()?))
    }
}

impl From<DegreeDistribution> for OffspringDistribution {
    fn from(d: DegreeDistribution) -> Self {
        Self::Law(d)
    }
}
