//! Objective image comparison: MAE, PSNR and maximum absolute difference.
//!
//! The reference protocol box-averages the input down by an integer factor
//! and zooms it back up, so no interpolation kernel takes part in building
//! the reference.

use crate::kernels::KernelId;
use crate::resample::{zoom, Boundary, ImageBuffer, ZoomSpec};
use crate::{Error, Result};

/// Difference statistics between two equally sized images.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub mae: f64,
    /// dB. Infinite when the images are identical.
    pub psnr: f64,
    pub max_abs: u32,
}

pub fn metrics(a: &ImageBuffer, b: &ImageBuffer) -> Result<Metrics> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::invalid(format!(
            "cannot compare {}x{} with {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if a.depth() != b.depth() {
        return Err(Error::invalid("cannot compare images of different bit depth"));
    }
    let (mut abs_sum, mut sq_sum, mut max_abs) = (0.0, 0.0, 0u32);
    for (&x, &y) in a.samples().iter().zip(b.samples()) {
        let d = u32::from(x.abs_diff(y));
        abs_sum += f64::from(d);
        sq_sum += f64::from(d) * f64::from(d);
        max_abs = max_abs.max(d);
    }
    let n = a.samples().len() as f64;
    let mse = sq_sum / n;
    let peak = f64::from(a.depth().max_value());
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    };
    Ok(Metrics {
        mae: abs_sum / n,
        psnr,
        max_abs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub method_a: KernelId,
    pub method_b: KernelId,
    pub mae: f64,
    pub psnr: f64,
    pub max_abs: u32,
}

/// Scores of both methods against the downscale-then-upscale reference.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceScores {
    pub factor: u32,
    pub a: Metrics,
    pub b: Metrics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub report: CompareReport,
    pub reference: Option<ReferenceScores>,
}

/// Averages `factor × factor` blocks, dropping any partial blocks at the
/// right and bottom edges. Averages round half up.
pub fn box_downscale(img: &ImageBuffer, factor: u32) -> Result<ImageBuffer> {
    let f = factor as usize;
    if f == 0 {
        return Err(Error::invalid("downscale factor must be at least 1"));
    }
    let (w, h) = (img.width() / f, img.height() / f);
    if w == 0 || h == 0 {
        return Err(Error::invalid(format!(
            "{}x{} image is smaller than the downscale factor {factor}",
            img.width(),
            img.height()
        )));
    }
    let area = (f * f) as u64;
    ImageBuffer::from_fn(w, h, img.depth(), |x, y| {
        let mut sum = 0u64;
        for yy in y * f..(y + 1) * f {
            for xx in x * f..(x + 1) * f {
                sum += u64::from(img.get(xx, yy));
            }
        }
        ((2 * sum + area) / (2 * area)) as u16
    })
}

pub fn crop(img: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    if width > img.width() || height > img.height() {
        return Err(Error::invalid("crop larger than the image"));
    }
    ImageBuffer::from_fn(width, height, img.depth(), |x, y| img.get(x, y))
}

/// Zooms `input` by `m/q` with both kernels and compares the results.
///
/// With `with_reference` the zoom must be an integer magnification `f`.
/// The input is then box-downscaled by `f`, zoomed back with each kernel
/// and scored against the matching crop of the original.
pub fn compare(
    input: &ImageBuffer,
    m: u32,
    q: u32,
    kernel_a: &KernelId,
    kernel_b: &KernelId,
    boundary: Boundary,
    with_reference: bool,
) -> Result<Comparison> {
    let spec = |k: &KernelId| ZoomSpec::new(m, q, k.clone()).with_boundary(boundary);
    let za = zoom(input, &spec(kernel_a))?;
    let zb = zoom(input, &spec(kernel_b))?;
    let pair = metrics(&za, &zb)?;
    let report = CompareReport {
        method_a: kernel_a.clone(),
        method_b: kernel_b.clone(),
        mae: pair.mae,
        psnr: pair.psnr,
        max_abs: pair.max_abs,
    };

    let reference = if with_reference {
        if q == 0 || !m.is_multiple_of(q) || m / q < 2 {
            return Err(Error::invalid(format!(
                "the reference protocol needs an integer magnification of at least 2, got {m}/{q}"
            )));
        }
        let factor = m / q;
        let small = box_downscale(input, factor)?;
        let ra = zoom(&small, &spec(kernel_a))?;
        let rb = zoom(&small, &spec(kernel_b))?;
        let original = crop(input, ra.width(), ra.height())?;
        Some(ReferenceScores {
            factor,
            a: metrics(&ra, &original)?,
            b: metrics(&rb, &original)?,
        })
    } else {
        None
    };
    Ok(Comparison { report, reference })
}
