//! Q-rational interpolation look-up tables.
//!
//! An [`Ilut`] stores a kernel sampled at `x = r/Q` for `r = 0..=Q·L`. Any
//! interpolation whose source positions are multiples of `1/Q` reads its
//! weights from the table and produces exactly what continuous evaluation
//! of the kernel would.

use std::fmt::Write as _;

use crate::format::sig9;
use crate::kernels::{Kernel, KernelId};
use crate::resample::{self, Boundary, ImageBuffer, ZoomSpec};
use crate::{Error, Result};

/// Table resolution used when none is given: 1% zoom steps.
pub const DEFAULT_Q: u32 = 100;

/// Scale of the fixed-point weights produced by [`Ilut::to_fixed`].
pub const FIXED_POINT_SHIFT: u32 = 16;
pub const FIXED_POINT_SCALE: i32 = 1 << FIXED_POINT_SHIFT;

const MAGIC: &[u8; 4] = b"ILUT";

/// Largest partition-of-unity residual a kernel may show before the
/// renormalization pass refuses to run.
const RENORMALIZE_LIMIT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Ilut {
    q: u32,
    support: usize,
    weights: Vec<f64>,
    source: Option<KernelId>,
}

/// Builds the table for `kernel` at resolution `q`. Kernels that form a
/// partition of unity get the renormalization pass; truncated sinc does not.
pub fn build_ilut(kernel: &KernelId, q: u32) -> Result<Ilut> {
    Ilut::build(kernel, q, kernel.partitions_unity())
}

impl Ilut {
    /// Samples `kernel` at `r/q`. With `renormalize`, every phase class
    /// `{r, r ± q, r ± 2q, …}` is rescaled to sum to exactly one; the raw
    /// residual must already be below 1e-9.
    pub fn build(kernel: &KernelId, q: u32, renormalize: bool) -> Result<Ilut> {
        if q == 0 {
            return Err(Error::invalid("table resolution Q must be at least 1"));
        }
        kernel.validate()?;
        let support = kernel.support();
        let len = q as usize * support + 1;
        let weights = (0..len).map(|r| kernel.eval(r as f64 / q as f64)).collect();
        let mut table = Ilut {
            q,
            support,
            weights,
            source: Some(kernel.clone()),
        };
        if renormalize {
            table.renormalize()?;
        }
        Ok(table)
    }

    /// Wraps raw one-sided weights, e.g. decoded from a blob.
    pub fn from_weights(q: u32, support: usize, weights: Vec<f64>) -> Result<Ilut> {
        if q == 0 || support == 0 {
            return Err(Error::invalid("Q and L must both be at least 1"));
        }
        if weights.len() != q as usize * support + 1 {
            return Err(Error::invalid(format!(
                "expected {} weights for Q={q}, L={support}, got {}",
                q as usize * support + 1,
                weights.len()
            )));
        }
        Ok(Ilut {
            q,
            support,
            weights,
            source: None,
        })
    }

    fn renormalize(&mut self) -> Result<()> {
        let q = self.q as i64;
        let l = self.support as i64;
        let last = q * l;
        let mut members = Vec::with_capacity(2 * self.support + 1);
        // Classes r and q − r hold the same entries; visit each once. The
        // r = 0 class is the cardinal condition and is left untouched.
        for r in 1..=q / 2 {
            members.clear();
            let mut sum = 0.0;
            for k in -l..=l {
                let idx = (r + k * q).abs();
                if idx <= last {
                    sum += self.weights[idx as usize];
                    members.push(idx as usize);
                }
            }
            let residual = (sum - 1.0).abs();
            if residual > RENORMALIZE_LIMIT {
                return Err(Error::NonConforming {
                    kernel: self
                        .source
                        .as_ref()
                        .map_or_else(|| "table".to_string(), ToString::to_string),
                    phase: r as usize,
                    residual,
                });
            }
            members.sort_unstable();
            members.dedup();
            for &i in &members {
                self.weights[i] /= sum;
            }
        }
        Ok(())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn support(&self) -> usize {
        self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn source(&self) -> Option<&KernelId> {
        self.source.as_ref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weight at offset `r/Q`; symmetric, zero outside the support.
    #[inline]
    pub fn lookup(&self, r: i64) -> f64 {
        self.weights.get(r.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Rows `r,x,weight` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,x,weight\n");
        for (r, w) in self.weights.iter().enumerate() {
            let x = r as f64 / self.q as f64;
            let _ = writeln!(out, "{r},{},{}", sig9(x), sig9(*w));
        }
        out
    }

    /// `ILUT`, then Q and L as little-endian u32, then the weights as
    /// little-endian f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * self.weights.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.q.to_le_bytes());
        out.extend_from_slice(&(self.support as u32).to_le_bytes());
        for w in &self.weights {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Ilut> {
        let bad = |msg: &str| Error::Format(format!("ILUT blob: {msg}"));
        if bytes.len() < 12 || &bytes[..4] != MAGIC {
            return Err(bad("missing ILUT magic"));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
        let (q, support) = (word(4), word(8) as usize);
        if q == 0 || support == 0 {
            return Err(bad("Q and L must be positive"));
        }
        let body = &bytes[12..];
        let expected = (q as usize)
            .checked_mul(support)
            .and_then(|n| n.checked_add(1))
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| bad("table size overflows"))?;
        if body.len() != expected {
            return Err(bad(&format!("expected {expected} weight bytes, found {}", body.len())));
        }
        let weights = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ilut::from_weights(q, support, weights)
    }

    /// Integer weights scaled by `2^16`, for integer-only inner loops.
    pub fn to_fixed(&self) -> FixedIlut {
        FixedIlut {
            q: self.q,
            support: self.support,
            weights: self
                .weights
                .iter()
                .map(|w| (w * FIXED_POINT_SCALE as f64).round() as i32)
                .collect(),
        }
    }
}

/// Fixed-point counterpart of [`Ilut`]; weights are `round(w · 2^16)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedIlut {
    q: u32,
    support: usize,
    weights: Vec<i32>,
}

impl FixedIlut {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn support(&self) -> usize {
        self.support
    }

    #[inline]
    pub fn lookup(&self, r: i64) -> i32 {
        self.weights.get(r.unsigned_abs() as usize).copied().unwrap_or(0)
    }
}

/// Zooms `image` by `m/q` through continuous kernel evaluation and through
/// table look-ups, and returns the largest difference between the two
/// results before quantization.
pub fn verify_theorem2(kernel: &KernelId, q: u32, m: u32, image: &ImageBuffer) -> Result<f64> {
    let spec = |use_ilut| ZoomSpec {
        m,
        q,
        kernel: kernel.clone(),
        boundary: Boundary::Clamp,
        use_ilut,
    };
    let continuous = resample::zoom_plane(image, &spec(false))?;
    let tabulated = resample::zoom_plane(image, &spec(true))?;
    Ok(continuous.max_abs_diff(&tabulated))
}
