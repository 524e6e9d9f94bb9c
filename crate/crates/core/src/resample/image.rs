use std::fmt;

use crate::{Error, Result};

/// Sample precision of a grayscale image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    pub fn from_bits(bits: u32) -> Result<BitDepth> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::invalid(format!("bit depth must be 8 or 16, got {other}"))),
        }
    }
}

impl fmt::Display for BitDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-bit", self.bits())
    }
}

/// Row-major grayscale image with 8- or 16-bit samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    depth: BitDepth,
    samples: Vec<u16>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, depth: BitDepth, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!("image must be non-empty, got {width}x{height}")));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("image dimensions overflow"))?;
        if samples.len() != expected {
            return Err(Error::invalid(format!(
                "{width}x{height} image needs {expected} samples, got {}",
                samples.len()
            )));
        }
        let max = depth.max_value();
        if let Some(v) = samples.iter().find(|&&v| v > max) {
            return Err(Error::invalid(format!("sample {v} exceeds {depth} range")));
        }
        Ok(ImageBuffer {
            width,
            height,
            depth,
            samples,
        })
    }

    pub fn from_fn<F>(width: usize, height: usize, depth: BitDepth, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> u16,
    {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        ImageBuffer::new(width, height, depth, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u16> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.samples[y * self.width + x]
    }

    pub fn to_plane(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.samples.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// Real-valued samples produced by interpolation before quantization.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub(crate) fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Plane {
        debug_assert_eq!(data.len(), width * height);
        Plane { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn transpose(&self) -> Plane {
        let mut data = Vec::with_capacity(self.data.len());
        for x in 0..self.width {
            for y in 0..self.height {
                data.push(self.get(x, y));
            }
        }
        Plane {
            width: self.height,
            height: self.width,
            data,
        }
    }

    /// Largest absolute difference; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        if self.width != other.width || self.height != other.height {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn quantize(&self, depth: BitDepth) -> ImageBuffer {
        ImageBuffer {
            width: self.width,
            height: self.height,
            depth,
            samples: self.data.iter().map(|&v| quantize_sample(v, depth)).collect(),
        }
    }
}

/// Rounds half away from zero and clamps to the depth range.
///
/// Values are first snapped to a 2⁻²⁰ grid so that results which agree to
/// within floating-point noise (e.g. continuous and tabulated weights for
/// the same phase) quantize identically, including at exact half-way ties.
pub fn quantize_sample(v: f64, depth: BitDepth) -> u16 {
    const SNAP: f64 = (1u64 << 20) as f64;
    if v.is_nan() {
        return 0;
    }
    let snapped = (v * SNAP).round() / SNAP;
    snapped.round().clamp(0.0, f64::from(depth.max_value())) as u16
}
