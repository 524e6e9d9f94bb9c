//! L2-optimal interpolation kernels `H_L`.
//!
//! On each half-unit segment `[n/2, (n+1)/2)` the optimal kernel is
//! `sinc(x) + T_n(x)`, where the aliasing term `T_n` spreads the partition of
//! unity defect of the `2L` sinc samples sharing that phase evenly over them.

use nalgebra::{DMatrix, DVector};

use crate::kernels::sinc;
use crate::{Error, Result};

/// Argument of the `k`-th sinc sample in the aliasing sum of segment `n`:
/// `(−1)^(k+n)·x + ⌊(k+1)/2⌋ + (−1)^(k+n+1)·⌊(n+1)/2⌋`.
#[inline]
fn alias_argument(k: usize, n: usize, x: f64) -> f64 {
    let sign = if (k + n).is_multiple_of(2) { 1.0 } else { -1.0 };
    let k_shift = k.div_ceil(2) as f64;
    let n_shift = n.div_ceil(2) as f64;
    sign * x + k_shift - sign * n_shift
}

/// Aliasing term `T_n(x)` of segment `n` for support `L`, evaluated at
/// `x ≥ 0` without checking that `x` actually lies in that segment.
pub fn segment_aliasing(support: usize, n: usize, x: f64) -> f64 {
    let sum: f64 = (0..2 * support).map(|k| sinc(alias_argument(k, n, x))).sum();
    (1.0 - sum) / (2 * support) as f64
}

/// Index `n` of the half-open segment `[n/2, (n+1)/2)` containing `x ≥ 0`.
#[inline]
fn segment_of(x: f64) -> usize {
    (2.0 * x).floor() as usize
}

/// The L2-optimal kernel `H_L(x)`; zero for `|x| ≥ L`.
pub fn eval_hl(support: usize, x: f64) -> f64 {
    let x = x.abs();
    if support == 0 || x >= support as f64 {
        return 0.0;
    }
    sinc(x) + segment_aliasing(support, segment_of(x), x)
}

/// Closed forms of `H_1`, `H_2` and `H_3`.
pub fn eval_cor2(support: usize, x: f64) -> Result<f64> {
    let x = x.abs();
    let s = sinc;
    let v = match support {
        1 => {
            if x > 1.0 {
                return Ok(0.0);
            }
            0.5 * (1.0 + s(x) - s(1.0 - x))
        }
        2 => {
            if x > 2.0 {
                return Ok(0.0);
            }
            let head = 1.0 + 3.0 * s(x) - s(1.0 - x);
            let tail = if x <= 1.0 {
                s(1.0 + x) + s(2.0 - x)
            } else {
                s(2.0 - x) + s(3.0 - x)
            };
            0.25 * (head - tail)
        }
        3 => {
            if x > 3.0 {
                return Ok(0.0);
            }
            let head = 1.0 + 5.0 * s(x) - s(1.0 - x);
            let tail = if x <= 1.0 {
                s(1.0 + x) + s(2.0 - x) + s(2.0 + x) + s(3.0 - x)
            } else if x <= 2.0 {
                s(1.0 + x) + s(2.0 - x) + s(3.0 - x) + s(4.0 - x)
            } else {
                s(2.0 - x) + s(3.0 - x) + s(4.0 - x) + s(5.0 - x)
            };
            (head - tail) / 6.0
        }
        other => {
            return Err(Error::invalid(format!(
                "closed forms exist only for L in {{1, 2, 3}}, got {other}"
            )))
        }
    };
    Ok(v)
}

/// `T_L(x) = H_L(x) − sinc(x)` on `0 ≤ |x| < L`.
pub fn aliasing_term(support: usize, x: f64) -> f64 {
    eval_hl(support, x) - sinc(x)
}

/// Samples of the least-squares kernel solved on a uniform grid over `[0, L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedKernel {
    pub support: usize,
    pub grid_step: f64,
    /// Weights at `x = 0, step, 2·step, …, L`.
    pub samples: Vec<f64>,
}

impl DiscretizedKernel {
    pub fn x_at(&self, j: usize) -> f64 {
        let per_unit = (self.samples.len() - 1) / self.support;
        j as f64 / per_unit as f64
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().enumerate().map(|(j, &v)| (self.x_at(j), v))
    }
}

/// Minimizes the discretized near-field error `Σ (h(x_j) − sinc(x_j))²`
/// over grid samples on `[0, L]` subject to partition of unity at every
/// grid phase.
///
/// The `2L` grid points sharing a phase `x ∈ [0, 1/2]` are
/// `⌊(k+1)/2⌋ + (−1)^k·x`, `k = 0..2L`, and each constraint touches only
/// its own group, so the problem splits into one small system per phase.
/// Eliminating the last member through the constraint leaves the normal
/// equations `(I + 11ᵀ)·h = 1 + s_k − s_{2L−1}` in `2L − 1` unknowns, which
/// are solved by LU factorization.
pub fn solve_discrete_optimal(support: usize, grid_step: f64) -> Result<DiscretizedKernel> {
    if support == 0 {
        return Err(Error::invalid("support must be at least 1"));
    }
    if !(grid_step > 0.0 && grid_step <= 0.125) {
        return Err(Error::invalid(format!(
            "grid step must lie in (0, 1/8], got {grid_step}"
        )));
    }
    let per_half = 0.5 / grid_step;
    if (per_half - per_half.round()).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "grid step {grid_step} does not divide 1/2 evenly"
        )));
    }
    let per_half = per_half.round() as usize;
    let per_unit = 2 * per_half;
    let len = support * per_unit + 1;
    let x_of = |j: usize| j as f64 / per_unit as f64;

    let unknowns = 2 * support - 1;
    let mut system = DMatrix::<f64>::from_element(unknowns, unknowns, 1.0);
    for i in 0..unknowns {
        system[(i, i)] += 1.0;
    }
    let lu = system.lu();

    let mut samples = vec![0.0; len];
    let mut rhs = DVector::<f64>::zeros(unknowns);
    for phase in 0..=per_half {
        let index = |k: usize| -> usize {
            let base = k.div_ceil(2) * per_unit;
            if k.is_multiple_of(2) {
                base + phase
            } else {
                base - phase
            }
        };
        let s: Vec<f64> = (0..2 * support).map(|k| sinc(x_of(index(k)))).collect();
        let last = s[unknowns];
        for k in 0..unknowns {
            rhs[k] = 1.0 + s[k] - last;
        }
        let h = lu
            .solve(&rhs)
            .ok_or_else(|| Error::invalid("singular normal equations"))?;
        let mut rest = 1.0;
        for k in 0..unknowns {
            samples[index(k)] = h[k];
            rest -= h[k];
        }
        samples[index(unknowns)] = rest;
    }

    Ok(DiscretizedKernel {
        support,
        grid_step,
        samples,
    })
}
