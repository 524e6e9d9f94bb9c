use std::fmt;
use std::str::FromStr;

use super::{convolve_sample, Boundary, ImageBuffer, Plane};
use crate::ilut::build_ilut;
use crate::kernels::{Kernel, KernelId};
use crate::{Error, Result};

/// Rotation matrix `[n/Q m/Q; −m/Q n/Q]` approximating a requested angle.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalRotation {
    pub n: i64,
    pub m: i64,
    pub q: u32,
    /// Degrees.
    pub requested_angle: f64,
    /// `requested_angle − atan2(m, n)` in degrees, wrapped to `(−180, 180]`.
    pub angle_deviation: f64,
    /// `sqrt(n² + m²)/Q`.
    pub implied_scale: f64,
}

impl RationalRotation {
    pub fn from_parts(n: i64, m: i64, q: u32, requested_angle: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("rotation denominator Q must be at least 1"));
        }
        let realized = (m as f64).atan2(n as f64).to_degrees();
        Ok(RationalRotation {
            n,
            m,
            q,
            requested_angle,
            angle_deviation: wrap_degrees(requested_angle - realized),
            implied_scale: (n as f64).hypot(m as f64) / f64::from(q),
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.n == 0 && self.m == 0
    }
}

fn wrap_degrees(d: f64) -> f64 {
    let w = d.rem_euclid(360.0);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Rounds `Q·cos α` and `Q·sin α` to the nearest integers.
pub fn approximate_rotation(angle_deg: f64, q: u32) -> Result<RationalRotation> {
    if !angle_deg.is_finite() {
        return Err(Error::invalid(format!(
            "rotation angle must be finite, got {angle_deg}"
        )));
    }
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let qf = f64::from(q);
    RationalRotation::from_parts((qf * cos).round() as i64, (qf * sin).round() as i64, q, angle_deg)
}

/// Rotates about the image center onto a canvas of the input size.
///
/// Output pixel `p` samples the source at `M_Q·(p − c) + c`. With the center
/// `c` on the half-pixel grid every source position is a multiple of
/// `1/(2Q)`, so the kernel weights come from a table of that resolution.
/// For `n = Q·cos α`, `m = Q·sin α` the content turns by `α` clockwise as
/// displayed (rows top to bottom).
pub fn rotate_plane(img: &ImageBuffer, rot: &RationalRotation, kernel: &KernelId, boundary: Boundary) -> Result<Plane> {
    if rot.is_degenerate() {
        return Err(Error::invalid("degenerate rotation with n = m = 0"));
    }
    if rot.q == 0 {
        return Err(Error::invalid("rotation denominator Q must be at least 1"));
    }
    let denom = 2 * i64::from(rot.q);
    let table = build_ilut(kernel, denom as u32)?;
    let l = kernel.support() as i64;
    let (w, h) = (img.width(), img.height());
    let (w1, h1) = (w as i64 - 1, h as i64 - 1);
    let q = i64::from(rot.q);
    let plane = img.to_plane();

    let mut data = Vec::with_capacity(w * h);
    for y in 0..h as i64 {
        let dy = 2 * y - h1;
        for x in 0..w as i64 {
            let dx = 2 * x - w1;
            let rx = rot.n * dx + rot.m * dy + w1 * q;
            let ry = -rot.m * dx + rot.n * dy + h1 * q;
            let base = ry.div_euclid(denom);
            let mut acc = 0.0;
            for j in base - l + 1..=base + l {
                let wy = table.lookup(ry - j * denom);
                if wy == 0.0 {
                    continue;
                }
                let row = plane.row(boundary.resolve(j, h));
                acc += wy * convolve_sample(row, rx, &table, boundary);
            }
            data.push(acc);
        }
    }
    Ok(Plane::from_vec(w, h, data))
}

pub fn rotate(img: &ImageBuffer, rot: &RationalRotation, kernel: &KernelId, boundary: Boundary) -> Result<ImageBuffer> {
    Ok(rotate_plane(img, rot, kernel, boundary)?.quantize(img.depth()))
}

/// Lossless quarter turns and flips. Turns are clockwise as displayed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orthogonal {
    Rot90,
    Rot180,
    Rot270,
    FlipH,
    FlipV,
}

impl FromStr for Orthogonal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rot90" => Ok(Orthogonal::Rot90),
            "rot180" => Ok(Orthogonal::Rot180),
            "rot270" => Ok(Orthogonal::Rot270),
            "fliph" => Ok(Orthogonal::FlipH),
            "flipv" => Ok(Orthogonal::FlipV),
            other => Err(Error::invalid(format!("unknown orthogonal transform `{other}`"))),
        }
    }
}

impl fmt::Display for Orthogonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orthogonal::Rot90 => "rot90",
            Orthogonal::Rot180 => "rot180",
            Orthogonal::Rot270 => "rot270",
            Orthogonal::FlipH => "fliph",
            Orthogonal::FlipV => "flipv",
        })
    }
}

pub fn orthogonal_transform(img: &ImageBuffer, op: Orthogonal) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let (out_w, out_h) = match op {
        Orthogonal::Rot90 | Orthogonal::Rot270 => (h, w),
        _ => (w, h),
    };
    let source = |x: usize, y: usize| -> (usize, usize) {
        match op {
            Orthogonal::Rot90 => (y, h - 1 - x),
            Orthogonal::Rot180 => (w - 1 - x, h - 1 - y),
            Orthogonal::Rot270 => (w - 1 - y, x),
            Orthogonal::FlipH => (w - 1 - x, y),
            Orthogonal::FlipV => (x, h - 1 - y),
        }
    };
    let mut samples = Vec::with_capacity(w * h);
    for y in 0..out_h {
        for x in 0..out_w {
            let (sx, sy) = source(x, y);
            samples.push(img.get(sx, sy));
        }
    }
    ImageBuffer::new(out_w, out_h, img.depth(), samples).expect("permutation of a valid image")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resample::BitDepth;

    fn sample_image(w: usize, h: usize) -> ImageBuffer {
        ImageBuffer::from_fn(w, h, BitDepth::Eight, |x, y| ((x * 13 + y * 7 + x * y) % 256) as u16).unwrap()
    }

    #[test]
    fn rational_angles() {
        let r = approximate_rotation(90.0, 100).unwrap();
        assert_eq!((r.n, r.m), (0, 100));
        assert_eq!(r.angle_deviation, 0.0);
        assert_eq!(r.implied_scale, 1.0);

        // n = round(86.60) = 87, m = 50; atan2(50, 87) = 29.8865°.
        let r = approximate_rotation(30.0, 100).unwrap();
        assert_eq!((r.n, r.m), (87, 50));
        assert!((r.angle_deviation - 0.1135).abs() < 5e-4, "{r:?}");
        assert!((r.implied_scale - 10069f64.sqrt() / 100.0).abs() < 1e-15);
        assert!((r.implied_scale - 1.00344).abs() < 5e-6);

        let fine = approximate_rotation(30.0, 10_000).unwrap();
        assert!(fine.angle_deviation.abs() < r.angle_deviation.abs());
        assert!((fine.implied_scale - 1.0).abs() < (r.implied_scale - 1.0).abs());

        let r = approximate_rotation(270.0, 100).unwrap();
        assert_eq!((r.n, r.m), (0, -100));
        assert_eq!(r.angle_deviation, 0.0);
        assert!(approximate_rotation(f64::NAN, 100).is_err());
        assert!(approximate_rotation(10.0, 0).is_err());
    }

    #[test]
    fn orthogonal_group_identities() {
        let img = sample_image(5, 3);
        let apply = |img: &ImageBuffer, ops: &[Orthogonal]| {
            ops.iter().fold(img.clone(), |acc, &op| orthogonal_transform(&acc, op))
        };
        use Orthogonal::*;
        assert_eq!(apply(&img, &[Rot90, Rot90, Rot90, Rot90]), img);
        assert_eq!(apply(&img, &[FlipH, FlipH]), img);
        assert_eq!(apply(&img, &[FlipV, FlipV]), img);
        assert_eq!(apply(&img, &[Rot180]), apply(&img, &[FlipH, FlipV]));
        assert_eq!(apply(&img, &[Rot90, Rot270]), img);
        let r = orthogonal_transform(&img, Rot90);
        assert_eq!((r.width(), r.height()), (3, 5));
        // The left column, read bottom to top, becomes the top row.
        assert_eq!(r.get(0, 0), img.get(0, 2));
        assert_eq!(r.get(2, 0), img.get(0, 0));
        let mut a = img.samples().to_vec();
        let mut b = r.samples().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn quarter_turn_matches_orthogonal_transform() {
        let img = sample_image(6, 6);
        for (angle, op) in [
            (90.0, Orthogonal::Rot90),
            (180.0, Orthogonal::Rot180),
            (-90.0, Orthogonal::Rot270),
        ] {
            let rot = approximate_rotation(angle, 100).unwrap();
            for id in KernelId::builtins() {
                let out = rotate(&img, &rot, &id, Boundary::Clamp).unwrap();
                assert_eq!(out, orthogonal_transform(&img, op), "{angle} {id}");
            }
        }
        let odd = sample_image(5, 5);
        let rot = approximate_rotation(90.0, 100).unwrap();
        let out = rotate(&odd, &rot, &KernelId::L2Optimal { support: 2 }, Boundary::Mirror).unwrap();
        assert_eq!(out, orthogonal_transform(&odd, Orthogonal::Rot90));
    }

    #[test]
    fn identity_rotation_is_exact() {
        let img = sample_image(7, 4);
        let rot = approximate_rotation(0.0, 100).unwrap();
        assert_eq!((rot.n, rot.m), (100, 0));
        for id in KernelId::builtins() {
            let plane = rotate_plane(&img, &rot, &id, Boundary::Clamp).unwrap();
            assert_eq!(plane, img.to_plane(), "{id}");
        }
    }

    #[test]
    fn constant_image_survives_any_rotation() {
        let img = ImageBuffer::from_fn(9, 7, BitDepth::Eight, |_, _| 77).unwrap();
        for angle in [0.0, 17.0, 30.0, 90.0, 133.0] {
            let rot = approximate_rotation(angle, 100).unwrap();
            let out = rotate(&img, &rot, &KernelId::L2Optimal { support: 2 }, Boundary::Clamp).unwrap();
            assert_eq!(out, img);
        }
    }

    #[test]
    fn thirty_degree_round_trip() {
        let (w, h) = (64, 64);
        let img = ImageBuffer::from_fn(w, h, BitDepth::Eight, |x, y| {
            let (x, y) = (x as f64, y as f64);
            (128.0 + 50.0 * (x * 0.21).sin() * (y * 0.17).cos() + 30.0 * ((x + y) * 0.11).cos()).round() as u16
        })
        .unwrap();
        let k = KernelId::L2Optimal { support: 2 };
        let there = approximate_rotation(30.0, 100).unwrap();
        let back = approximate_rotation(-30.0, 100).unwrap();
        let out = rotate(
            &rotate(&img, &there, &k, Boundary::Clamp).unwrap(),
            &back,
            &k,
            Boundary::Clamp,
        )
        .unwrap();
        let border = 3 * 2;
        let (mut se, mut n) = (0.0, 0.0);
        for y in border..h - border {
            for x in border..w - border {
                let d = f64::from(img.get(x, y)) - f64::from(out.get(x, y));
                se += d * d;
                n += 1.0;
            }
        }
        let psnr = 10.0 * (255.0f64.powi(2) / (se / n)).log10();
        // Measured 42.9 dB.
        assert!(psnr >= 40.0, "{psnr}");
    }

    #[test]
    fn degenerate_rotation_is_rejected() {
        let img = sample_image(3, 3);
        let rot = RationalRotation::from_parts(0, 0, 100, 0.0).unwrap();
        assert!(rotate(&img, &rot, &KernelId::Linear, Boundary::Clamp).is_err());
    }
}
