//! The reduced star chain `Y_n`: infected-leaf count watched only at times
//! the centre is infected, with the up-rate frozen at the cap `floor(L)`.
//!
//! From height `y` one step moves
//! - to `y - 1` with probability `pk / D`,
//! - to `min(y + 1, floor(L))` with probability `lambda (1 - p) k / D`,
//! - to `max(y - N, 0)` with probability `1 / D`,
//!
//! where `N` is shifted geometric with `P(N = j) = q^j (1 - q)`,
//! `q = 1 / (1 + lambda)`, counting leaves lost while the centre is healthy.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::rng::replica_rng;
use crate::stats::ProportionEstimate;

/// Largest number of transient heights the exact hitting solver accepts.
pub const HITTING_DIM_CAP: usize = 10_000;

/// How the up-fraction `p` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// `p = lambda / (1 + 2 lambda)`.
    FixedP,
    /// `p = (1 - epsilon) lambda / (1 + lambda)`, for small `lambda`; needs
    /// `lambda / (1 + 2 lambda) < epsilon`.
    SmallLambda { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub lambda: f64,
    pub k: usize,
    pub mode: ChainMode,
    pub p: f64,
    /// Real cap `L = pk`.
    pub l: f64,
    /// Integer cap used by the chain.
    pub floor_l: usize,
    /// Total jump weight `D = pk + lambda (1 - p) k + 1`.
    pub d: f64,
    /// `theta*` with `exp(theta*) = 1 / (1 + lambda / 2)`.
    pub theta_star: f64,
}

/// Integer part of a real threshold, tolerant of rounding just below an integer.
pub fn int_floor(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

pub fn make_params(lambda: f64, k: usize, mode: ChainMode) -> Result<ChainParams> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be finite and > 0, got {lambda}")));
    }
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let kf = k as f64;
    let (p, l) = match mode {
        ChainMode::FixedP => (lambda / (1.0 + 2.0 * lambda), lambda * kf / (1.0 + 2.0 * lambda)),
        ChainMode::SmallLambda { epsilon } => {
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
            }
            let ratio = lambda / (1.0 + 2.0 * lambda);
            if !(ratio < epsilon) {
                return Err(Error::invalid(format!(
                    "small-lambda chain (super2) needs lambda/(1+2 lambda) < epsilon; got {ratio} >= {epsilon}"
                )));
            }
            let p = (1.0 - epsilon) * lambda / (1.0 + lambda);
            (p, p * kf)
        }
    };
    Ok(ChainParams {
        lambda,
        k,
        mode,
        p,
        l,
        floor_l: int_floor(l),
        d: p * kf + lambda * (1.0 - p) * kf + 1.0,
        theta_star: -(1.0 + lambda / 2.0).ln(),
    })
}

impl ChainParams {
    pub fn down_prob(&self) -> f64 {
        self.p * self.k as f64 / self.d
    }

    pub fn up_prob(&self) -> f64 {
        self.lambda * (1.0 - self.p) * self.k as f64 / self.d
    }

    pub fn jump_prob(&self) -> f64 {
        1.0 / self.d
    }

    /// Ratio `q = 1 / (1 + lambda)` of the geometric loss `N`.
    pub fn loss_ratio(&self) -> f64 {
        1.0 / (1.0 + self.lambda)
    }

    /// Smaller root `p / (lambda (1 - p))` of the drift quadratic in `e^theta`.
    pub fn smaller_root(&self) -> f64 {
        self.p / (self.lambda * (1.0 - self.p))
    }
}

/// Draws the number of leaves lost while the centre is healthy.
pub fn sample_n<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> usize {
    let g = Geometric::new(lambda / (1.0 + lambda)).expect("lambda > 0");
    g.sample(rng).min(usize::MAX as u64) as usize
}

pub fn step_y<R: Rng + ?Sized>(y: usize, params: &ChainParams, rng: &mut R) -> usize {
    let kf = params.k as f64;
    let u = rng.random::<f64>() * params.d;
    let down = params.p * kf;
    if u < down {
        y.saturating_sub(1)
    } else if u < down + params.lambda * (1.0 - params.p) * kf {
        (y + 1).min(params.floor_l)
    } else {
        y.saturating_sub(sample_n(params.lambda, rng))
    }
}

/// Closed-form one-step drift of `exp(theta Y)` at an interior height,
/// `E[e^{theta Y'} - e^{theta y} | Y = y]`, with the geometric loss summed exactly.
pub fn exact_drift(theta: f64, y: usize, params: &ChainParams) -> Result<f64> {
    let yf = y as f64;
    if !(y > 0 && yf < params.l) {
        return Err(Error::invalid(format!("height {y} is not in the interior (0, {})", params.l)));
    }
    Ok((theta * yf).exp() * drift_factor(theta, params)?)
}

/// The drift divided by `e^{theta y}`; its sign is the sign of the drift at every interior height.
pub fn drift_factor(theta: f64, params: &ChainParams) -> Result<f64> {
    let lam = params.lambda;
    let em = (-theta).exp();
    if !(em < 1.0 + lam) {
        return Err(Error::invalid(format!(
            "exp(-theta) = {em} must be below 1 + lambda = {} for the loss series to converge",
            1.0 + lam
        )));
    }
    let kf = params.k as f64;
    let e = theta.exp();
    let bracket = (em - 1.0) / (1.0 + lam - em);
    Ok(((e - 1.0) * lam * (1.0 - params.p) * kf + (em - 1.0) * params.p * kf + bracket) / params.d)
}

/// Smallest `k` for which `exp(theta* Y)` has non-positive drift, or `None`
/// when the per-leaf coefficient is non-negative (no `k` works).
pub fn supermartingale_min_k(lambda: f64, mode: ChainMode) -> Result<Option<usize>> {
    let probe = make_params(lambda, 1, mode)?;
    let theta = probe.theta_star;
    let (e, em) = (theta.exp(), (-theta).exp());
    let per_leaf = (e - 1.0) * lambda * (1.0 - probe.p) + (em - 1.0) * probe.p;
    let constant = (em - 1.0) / (1.0 + lambda - em);
    if per_leaf >= 0.0 {
        return Ok(None);
    }
    let mut k = ((constant / -per_leaf).floor() as usize).max(1);
    // Step down then up so rounding in the estimate cannot miss the boundary.
    while k > 1 && drift_factor(theta, &make_params(lambda, k - 1, mode)?)? <= 0.0 {
        k -= 1;
    }
    while drift_factor(theta, &make_params(lambda, k, mode)?)? > 0.0 {
        k += 1;
    }
    Ok(Some(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub lambda: f64,
    pub k: usize,
    pub y: usize,
    pub theta: f64,
    pub drift: f64,
}

/// Drift at every integer height in `(0, L)`.
pub fn drift_profile(params: &ChainParams, theta: f64) -> Result<Vec<DriftRow>> {
    let top = (params.l.ceil() as usize).saturating_sub(1);
    (1..=top)
        .filter(|&y| (y as f64) < params.l)
        .map(|y| {
            Ok(DriftRow { lambda: params.lambda, k: params.k, y, theta, drift: exact_drift(theta, y, params)? })
        })
        .collect()
}

pub fn drift_profile_csv(rows: &[DriftRow]) -> String {
    let mut s = String::from("lambda,k,y,theta,drift\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{:e}\n", r.lambda, r.k, r.y, r.theta, r.drift));
    }
    s
}

fn check_targets(params: &ChainParams, b: usize, l_int: usize) -> Result<()> {
    if l_int > params.floor_l {
        return Err(Error::invalid(format!("upper target {l_int} exceeds the cap floor(L) = {}", params.floor_l)));
    }
    if b >= l_int {
        return Err(Error::invalid(format!("lower target {b} must be below the upper target {l_int}")));
    }
    let interior = l_int - b - 1;
    if interior > HITTING_DIM_CAP {
        return Err(Error::DimensionCap { requested: interior, cap: HITTING_DIM_CAP });
    }
    Ok(())
}

/// `h[y] = P_y(reach <= b before >= l_int)` for `y` in `0..=l_int`.
///
/// The full system has a dense geometric tail from the loss jumps.
/// Subtracting `q` times the previous row cancels that tail and leaves a
/// band with two sub-diagonals and one super-diagonal.
fn hitting_vector(params: &ChainParams, b: usize, l_int: usize) -> Result<Vec<f64>> {
    check_targets(params, b, l_int)?;
    let (dn, up, s, q) = (params.down_prob(), params.up_prob(), params.jump_prob(), params.loss_ratio());
    // Unknowns are heights b..=l_int, at index y - b.
    let n = l_int - b + 1;
    let mut a = BandMatrix::zeros(n, 2, 1);
    let mut rhs = vec![0.0; n];
    a.add(0, 0, 1.0);
    rhs[0] = 1.0;
    a.add(n - 1, n - 1, 1.0);
    // First interior row kept whole: every loss of size >= 1 lands at or below b.
    if n > 2 {
        a.add(1, 1, 1.0 - s * (1.0 - q));
        a.add(1, 0, -dn);
        a.add(1, 2, -up);
        rhs[1] = s * q;
    }
    for r in 2..n - 1 {
        a.add(r, r, 1.0 + q * up - s * (1.0 - q));
        a.add(r, r - 1, -(dn + q));
        a.add(r, r - 2, q * dn);
        a.add(r, r + 1, -up);
    }
    let x = a.solve(&rhs)?;
    let mut h = vec![1.0; l_int + 1];
    h[b..].copy_from_slice(&x);
    Ok(h)
}

/// Exact `P_a(T^-_b < T^+_{l_int})` for the chain, where `T^-_b` is the first
/// time `Y <= b` and `T^+_m` the first time `Y >= m`.
pub fn hitting_prob_exact(params: &ChainParams, a: usize, b: usize, l_int: usize) -> Result<f64> {
    check_targets(params, b, l_int)?;
    if a <= b {
        return Ok(1.0);
    }
    if a >= l_int {
        return Ok(0.0);
    }
    Ok(hitting_vector(params, b, l_int)?[a])
}

fn check_interior(params: &ChainParams, a: usize, b: usize, l_int: usize, reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("replica count must be >= 1"));
    }
    check_targets(params, b, l_int)?;
    if !(b < a && a < l_int) {
        return Err(Error::invalid(format!("start {a} must satisfy b = {b} < a < {l_int}")));
    }
    Ok(())
}

/// Monte Carlo estimate of [`hitting_prob_exact`]; replica `r` uses stream `(seed, r)`.
pub fn hitting_prob_mc(
    params: &ChainParams,
    a: usize,
    b: usize,
    l_int: usize,
    reps: u64,
    seed: u64,
) -> Result<ProportionEstimate> {
    check_interior(params, a, b, l_int, reps)?;
    let hits = (0..reps)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = replica_rng(seed, r);
            let mut y = a;
            while y > b && y < l_int {
                y = step_y(y, params, &mut rng);
            }
            y <= b
        })
        .count();
    Ok(ProportionEstimate::new(hits as u64, reps))
}

fn check_return(params: &ChainParams, b: usize, reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("replica count must be >= 1"));
    }
    if b >= params.floor_l {
        return Err(Error::invalid(format!("b = {b} must be below floor(L) = {}", params.floor_l)));
    }
    Ok(())
}

/// Monte Carlo estimate of `P_{floor L}(T^-_b < R_L)`, where `R_L` is the
/// first return to `floor(L)` after the chain first steps below it.
pub fn return_prob_mc(params: &ChainParams, b: usize, reps: u64, seed: u64) -> Result<ProportionEstimate> {
    check_return(params, b, reps)?;
    let top = params.floor_l;
    let hits = (0..reps)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = replica_rng(seed, r);
            let mut y = top;
            while y == top {
                y = step_y(y, params, &mut rng);
            }
            while y > b && y < top {
                y = step_y(y, params, &mut rng);
            }
            y <= b
        })
        .count();
    Ok(ProportionEstimate::new(hits as u64, reps))
}

/// Exact value of the quantity estimated by [`return_prob_mc`], by
/// conditioning on the first downward move and reusing the hitting vector.
pub fn return_prob_exact(params: &ChainParams, b: usize) -> Result<f64> {
    check_return(params, b, 1)?;
    let top = params.floor_l;
    let h = hitting_vector(params, b, top)?;
    let (dn, s, q) = (params.down_prob(), params.jump_prob(), params.loss_ratio());
    // Loss of size j in 1..top-b lands at top - j; larger losses land at or below b.
    let mut from_loss = q.powi((top - b) as i32);
    let mut w = q * (1.0 - q);
    for j in 1..top - b {
        from_loss += w * h[top - j];
        w *= q;
    }
    Ok((dn * h[top - 1] + s * from_loss) / (dn + s * q))
}
