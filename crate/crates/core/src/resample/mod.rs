//! Separable interpolation of grayscale images.
//!
//! A zoom by `m/Q` produces `⌈n·m/Q⌉` samples per axis; output index `u`
//! reads the source at the rational position `u·Q/m`. Positions are kept as
//! integer numerators throughout, so every phase is exact and table
//! look-ups reproduce continuous kernel evaluation. Interpolation runs in
//! `f64` and is quantized once, at the very end.

mod image;
mod rotate;

use std::fmt;
use std::str::FromStr;

pub use image::{quantize_sample, BitDepth, ImageBuffer, Plane};
pub use rotate::{approximate_rotation, orthogonal_transform, rotate, rotate_plane, Orthogonal, RationalRotation};

use crate::ilut::{build_ilut, FixedIlut, Ilut};
use crate::kernels::{Kernel, KernelId};
use crate::{Error, Result};

/// How source indices outside the image are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Repeat the edge sample.
    #[default]
    Clamp,
    /// Reflect about the edge sample without repeating it.
    Mirror,
}

impl Boundary {
    #[inline]
    pub fn resolve(self, i: i64, len: usize) -> usize {
        let last = len as i64 - 1;
        match self {
            Boundary::Clamp => i.clamp(0, last) as usize,
            Boundary::Mirror => {
                if last == 0 {
                    return 0;
                }
                let period = 2 * last;
                let m = i.rem_euclid(period);
                (if m > last { period - m } else { m }) as usize
            }
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Clamp => "clamp",
            Boundary::Mirror => "mirror",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(Boundary::Clamp),
            "mirror" => Ok(Boundary::Mirror),
            other => Err(Error::invalid(format!("unknown boundary policy `{other}`"))),
        }
    }
}

/// Zoom by the rational factor `m/q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZoomSpec {
    pub m: u32,
    pub q: u32,
    pub kernel: KernelId,
    pub boundary: Boundary,
    pub use_ilut: bool,
}

impl ZoomSpec {
    pub fn new(m: u32, q: u32, kernel: KernelId) -> Self {
        ZoomSpec {
            m,
            q,
            kernel,
            boundary: Boundary::default(),
            use_ilut: true,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_ilut(mut self, use_ilut: bool) -> Self {
        self.use_ilut = use_ilut;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.q == 0 {
            return Err(Error::invalid(format!(
                "zoom factor {}/{} needs a positive numerator and denominator",
                self.m, self.q
            )));
        }
        self.kernel.validate()
    }
}

/// `⌈len·m/q⌉`.
pub fn output_len(len: usize, m: u32, q: u32) -> usize {
    let num = len as u128 * u128::from(m);
    num.div_ceil(u128::from(q)) as usize
}

/// Interpolates `row` at position `r/Q`, `Q` being the table resolution:
/// `Σ_k row[k]·h^Q(r − k·Q)` over the `2L` samples nearest to the position.
#[inline]
pub fn convolve_sample(row: &[f64], r: i64, ilut: &Ilut, boundary: Boundary) -> f64 {
    let q = i64::from(ilut.q());
    let l = ilut.support() as i64;
    let base = r.div_euclid(q);
    let mut acc = 0.0;
    for k in base - l + 1..=base + l {
        acc += row[boundary.resolve(k, row.len())] * ilut.lookup(r - k * q);
    }
    acc
}

/// Interpolates `row` at position `num/den`, evaluating the kernel for
/// every tap.
#[inline]
pub fn convolve_sample_continuous<K: Kernel + ?Sized>(
    row: &[f64],
    num: i64,
    den: i64,
    kernel: &K,
    boundary: Boundary,
) -> f64 {
    let l = kernel.support() as i64;
    let base = num.div_euclid(den);
    let mut acc = 0.0;
    for k in base - l + 1..=base + l {
        let offset = (num - k * den) as f64 / den as f64;
        acc += row[boundary.resolve(k, row.len())] * kernel.eval(offset);
    }
    acc
}

/// Integer-only variant of [`convolve_sample`]; the result carries the
/// table's `2^16` scale.
#[inline]
pub fn convolve_sample_fixed(row: &[u16], r: i64, ilut: &FixedIlut, boundary: Boundary) -> i64 {
    let q = i64::from(ilut.q());
    let l = ilut.support() as i64;
    let base = r.div_euclid(q);
    let mut acc = 0i64;
    for k in base - l + 1..=base + l {
        acc += i64::from(row[boundary.resolve(k, row.len())]) * i64::from(ilut.lookup(r - k * q));
    }
    acc
}

/// Order of the two one-dimensional passes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PassOrder {
    #[default]
    RowsFirst,
    ColumnsFirst,
}

/// Weight source for one axis of a zoom by `m/q`.
enum AxisSampler<'a> {
    // Phases of u·q/m have denominator m/g; the table is built at that
    // resolution and position u·q/m is read as (u·q/g)/(m/g).
    Table { table: Ilut, step: i64 },
    Continuous { kernel: &'a KernelId, q: i64, m: i64 },
}

impl<'a> AxisSampler<'a> {
    fn new(spec: &'a ZoomSpec) -> Result<Self> {
        let (m, q) = (i64::from(spec.m), i64::from(spec.q));
        if spec.use_ilut {
            let g = gcd(m, q);
            let table = build_ilut(&spec.kernel, (m / g) as u32)?;
            Ok(AxisSampler::Table { table, step: q / g })
        } else {
            Ok(AxisSampler::Continuous {
                kernel: &spec.kernel,
                q,
                m,
            })
        }
    }

    #[inline]
    fn sample(&self, row: &[f64], u: usize, boundary: Boundary) -> f64 {
        match self {
            AxisSampler::Table { table, step } => convolve_sample(row, u as i64 * step, table, boundary),
            AxisSampler::Continuous { kernel, q, m } => {
                convolve_sample_continuous(row, u as i64 * q, *m, *kernel, boundary)
            }
        }
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

fn resample_rows(src: &Plane, out_width: usize, sampler: &AxisSampler<'_>, boundary: Boundary) -> Plane {
    let mut data = Vec::with_capacity(out_width * src.height());
    for y in 0..src.height() {
        let row = src.row(y);
        data.extend((0..out_width).map(|u| sampler.sample(row, u, boundary)));
    }
    Plane::from_vec(out_width, src.height(), data)
}

/// Zoom without quantization, rows first.
pub fn zoom_plane(img: &ImageBuffer, spec: &ZoomSpec) -> Result<Plane> {
    zoom_plane_ordered(img, spec, PassOrder::RowsFirst)
}

/// Zoom without quantization with an explicit pass order.
pub fn zoom_plane_ordered(img: &ImageBuffer, spec: &ZoomSpec, order: PassOrder) -> Result<Plane> {
    spec.validate()?;
    let out_w = output_len(img.width(), spec.m, spec.q);
    let out_h = output_len(img.height(), spec.m, spec.q);
    if out_w == 0 || out_h == 0 {
        return Err(Error::invalid(format!(
            "zoom {}/{} of {}x{} gives an empty image",
            spec.m,
            spec.q,
            img.width(),
            img.height()
        )));
    }
    let sampler = AxisSampler::new(spec)?;
    let plane = img.to_plane();
    let out = match order {
        PassOrder::RowsFirst => {
            let rows = resample_rows(&plane, out_w, &sampler, spec.boundary);
            resample_rows(&rows.transpose(), out_h, &sampler, spec.boundary).transpose()
        }
        PassOrder::ColumnsFirst => {
            let cols = resample_rows(&plane.transpose(), out_h, &sampler, spec.boundary);
            resample_rows(&cols.transpose(), out_w, &sampler, spec.boundary)
        }
    };
    Ok(out)
}

/// Zooms `img` by `spec.m / spec.q` and quantizes to the input bit depth.
pub fn zoom(img: &ImageBuffer, spec: &ZoomSpec) -> Result<ImageBuffer> {
    Ok(zoom_plane(img, spec)?.quantize(img.depth()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray8(w: usize, h: usize, f: impl FnMut(usize, usize) -> u16) -> ImageBuffer {
        ImageBuffer::from_fn(w, h, BitDepth::Eight, f).unwrap()
    }

    #[test]
    fn boundary_resolution() {
        let clamp: Vec<usize> = (-3..7).map(|i| Boundary::Clamp.resolve(i, 4)).collect();
        assert_eq!(clamp, [0, 0, 0, 0, 1, 2, 3, 3, 3, 3]);
        let mirror: Vec<usize> = (-3..7).map(|i| Boundary::Mirror.resolve(i, 4)).collect();
        assert_eq!(mirror, [3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(Boundary::Mirror.resolve(-5, 1), 0);
        assert_eq!("mirror".parse::<Boundary>().unwrap(), Boundary::Mirror);
        assert!("wrap".parse::<Boundary>().is_err());
    }

    #[test]
    fn output_sizes() {
        assert_eq!(output_len(256, 200, 100), 512);
        assert_eq!(output_len(16, 137, 100), 22);
        assert_eq!(output_len(5, 1, 4), 2);
        assert_eq!(output_len(7, 100, 100), 7);
    }

    #[test]
    fn convolution_examples() {
        let linear = build_ilut(&KernelId::Linear, 4).unwrap();
        let h2 = build_ilut(&KernelId::L2Optimal { support: 2 }, 100).unwrap();
        let constant = vec![37.0; 9];
        for r in [0, 13, 250, 377, 800] {
            assert!((convolve_sample(&constant, r, &h2, Boundary::Clamp) - 37.0).abs() < 1e-12);
        }
        let mut impulse = vec![0.0; 9];
        impulse[4] = 1.0;
        assert_eq!(convolve_sample(&impulse, 400, &h2, Boundary::Clamp), 1.0);
        assert_eq!(convolve_sample(&impulse, 16, &linear, Boundary::Clamp), 1.0);
        assert_eq!(convolve_sample(&impulse, 18, &linear, Boundary::Clamp), 0.5);
        assert_eq!(convolve_sample(&impulse, 14, &linear, Boundary::Mirror), 0.5);
    }

    #[test]
    fn continuous_and_table_convolution_agree_bitwise_without_polish() {
        let id = KernelId::L2Optimal { support: 3 };
        let table = Ilut::build(&id, 7, false).unwrap();
        let row: Vec<f64> = (0..11).map(|i| ((i * 37) % 11) as f64).collect();
        for r in -20..90 {
            let a = convolve_sample(&row, r, &table, Boundary::Mirror);
            let b = convolve_sample_continuous(&row, r, 7, &id, Boundary::Mirror);
            assert_eq!(a.to_bits(), b.to_bits(), "r={r}");
        }
    }

    #[test]
    fn fixed_point_convolution_tracks_float() {
        let table = build_ilut(&KernelId::L2Optimal { support: 2 }, 100).unwrap();
        let fixed = table.to_fixed();
        let row: Vec<u16> = (0..12).map(|i| (i * 500) as u16).collect();
        let rowf: Vec<f64> = row.iter().map(|&v| f64::from(v)).collect();
        for r in 0..1100 {
            let exact = convolve_sample(&rowf, r, &table, Boundary::Clamp);
            let approx = convolve_sample_fixed(&row, r, &fixed, Boundary::Clamp) as f64 / 65536.0;
            // Four taps, each off by at most half a unit of 2^-16 times 5500.
            assert!((exact - approx).abs() <= 4.0 * 5500.0 * 0.5 / 65536.0 + 1e-9);
        }
    }

    #[test]
    fn identity_zoom_reproduces_input() {
        let img = gray8(7, 5, |x, y| ((x * 31 + y * 17) % 256) as u16);
        for id in KernelId::builtins() {
            for boundary in [Boundary::Clamp, Boundary::Mirror] {
                for use_ilut in [true, false] {
                    let spec = ZoomSpec::new(100, 100, id.clone())
                        .with_boundary(boundary)
                        .with_ilut(use_ilut);
                    let plane = zoom_plane(&img, &spec).unwrap();
                    assert_eq!(plane, img.to_plane(), "{id} {boundary} {use_ilut}");
                    assert_eq!(zoom(&img, &spec).unwrap(), img);
                }
            }
        }
    }

    #[test]
    fn linear_impulse_zoom_is_a_tent() {
        let img = gray8(5, 5, |x, y| if (x, y) == (2, 2) { 1 } else { 0 });
        let spec = ZoomSpec::new(2, 1, KernelId::Linear);
        let p = zoom_plane(&img, &spec).unwrap();
        assert_eq!((p.width(), p.height()), (10, 10));
        assert_eq!(p.get(4, 4), 1.0);
        for (x, y) in [(3, 4), (5, 4), (4, 3), (4, 5)] {
            assert_eq!(p.get(x, y), 0.5);
        }
        for (x, y) in [(3, 3), (5, 3), (3, 5), (5, 5)] {
            assert_eq!(p.get(x, y), 0.25);
        }
        assert_eq!(p.get(2, 4), 0.0);
    }

    #[test]
    fn rejects_degenerate_zooms() {
        let img = gray8(3, 3, |_, _| 0);
        assert!(zoom(&img, &ZoomSpec::new(0, 100, KernelId::Linear)).is_err());
        assert!(zoom(&img, &ZoomSpec::new(1, 0, KernelId::Linear)).is_err());
        let bad = ZoomSpec::new(
            1,
            1,
            KernelId::Blend {
                weight: 2.0,
                left: Box::new(KernelId::Linear),
                right: Box::new(KernelId::Linear),
            },
        );
        assert!(zoom(&img, &bad).is_err());
    }

    #[test]
    fn zoom_out_keeps_at_least_one_pixel() {
        let img = gray8(3, 2, |x, _| x as u16);
        let out = zoom(&img, &ZoomSpec::new(1, 100, KernelId::Linear)).unwrap();
        assert_eq!((out.width(), out.height()), (1, 1));
    }

    #[test]
    fn sixteen_bit_overshoot_is_clamped() {
        let img = ImageBuffer::from_fn(8, 1, BitDepth::Sixteen, |x, _| if x < 4 { 0 } else { 65535 }).unwrap();
        let spec = ZoomSpec::new(300, 100, KernelId::L2Optimal { support: 3 });
        let plane = zoom_plane(&img, &spec).unwrap();
        assert!(plane.data().iter().any(|&v| v > 65535.0));
        assert!(plane.data().iter().any(|&v| v < 0.0));
        let out = zoom(&img, &spec).unwrap();
        assert_eq!(out.depth(), BitDepth::Sixteen);
        assert!(out.samples().contains(&65535));
        assert!(out.samples().contains(&0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn constant_images_stay_constant(
            value in 0u16..=255,
            m in 25u32..=400,
            idx in 0usize..8,
            mirror in any::<bool>(),
            use_ilut in any::<bool>(),
        ) {
            let id = KernelId::builtins()[idx].clone();
            prop_assume!(id.partitions_unity());
            let img = gray8(6, 5, |_, _| value);
            let boundary = if mirror { Boundary::Mirror } else { Boundary::Clamp };
            let spec = ZoomSpec::new(m, 100, id).with_boundary(boundary).with_ilut(use_ilut);
            let p = zoom_plane(&img, &spec).unwrap();
            let dev = p.data().iter().map(|v| (v - f64::from(value)).abs()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-9 * f64::from(value.max(1)), "deviation {dev}");
            prop_assert!(zoom(&img, &spec).unwrap().samples().iter().all(|&v| v == value));
        }

        #[test]
        fn pass_order_does_not_matter(m in 30u32..=300, idx in 0usize..8, seed in 0u64..1000) {
            let id = KernelId::builtins()[idx].clone();
            let img = gray8(7, 6, |x, y| ((x as u64 * 7919 + y as u64 * 104729 + seed * 31) % 256) as u16);
            let spec = ZoomSpec::new(m, 100, id);
            let a = zoom_plane_ordered(&img, &spec, PassOrder::RowsFirst).unwrap();
            let b = zoom_plane_ordered(&img, &spec, PassOrder::ColumnsFirst).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-9);
        }

        #[test]
        fn table_path_matches_continuous_path(m in 1u32..=400, idx in 0usize..8, seed in 0u64..1000) {
            let id = KernelId::builtins()[idx].clone();
            let img = gray8(6, 5, |x, y| ((x as u64 * 7919 + y as u64 * 104729 + seed * 31) % 256) as u16);
            let spec = ZoomSpec::new(m, 100, id);
            let a = zoom_plane(&img, &spec.clone().with_ilut(true)).unwrap();
            let b = zoom_plane(&img, &spec.clone().with_ilut(false)).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-12);
            prop_assert_eq!(zoom(&img, &spec.clone().with_ilut(true)).unwrap(), zoom(&img, &spec.with_ilut(false)).unwrap());
        }
    }
}
