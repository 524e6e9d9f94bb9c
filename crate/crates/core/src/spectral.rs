//! Frequency approximation error (FAE) of interpolation kernels.
//!
//! For a kernel `h` with support `L` the error against the ideal box
//! response is computed in the spatial domain as
//!
//! ```text
//! E(h)² = 2·∫₀ᴸ (h(x) − sinc(x))² dx + 2·∫ᴸ^∞ sinc²(x) dx = 2·(E₁ + E₂)
//! ```
//!
//! and, for cross-checking, directly in the frequency domain from sampled
//! Fourier transforms. Tails are never integrated numerically: `E₂` uses
//! `∫₀^∞ sinc² = 1/2`.

use std::cell::Cell;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::kernels::{sinc, Kernel, KernelId};
use crate::l2opt;
use crate::{Error, Result};

/// Default relative tolerance of [`integrate`].
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Default frequency cutoff of [`fae_frequency_domain`]. Kernels here are
/// at least continuous, so `|F_h(t)|` decays like `t⁻²` and the neglected
/// tail of `∫(F_h − Π)²` is `O(t_max⁻³)`.
pub const DEFAULT_T_MAX: f64 = 50.0;

const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 20;

// Tighter tolerances for the quantities reported to users.
const FAE_REL_TOL: f64 = 1e-10;
const TAIL_REL_TOL: f64 = 1e-13;
const FOURIER_REL_TOL: f64 = 1e-9;
const SPECTRUM_REL_TOL: f64 = 1e-7;
const SPECTRUM_ABS_TOL: f64 = 1e-12;

/// Composite Simpson quadrature of `f` over `[a, b]`.
///
/// The panel count doubles until two successive estimates differ by at most
/// `rel_tol` times the estimate of `∫|f|` (which is the integral itself for
/// non-negative integrands). At least `2^MIN_LEVEL` panels are always used.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_tol(f, a, b, rel_tol, 0.0)
}

// As `integrate`, but also accepts a change of at most `abs_tol`. Needed for
// integrands that are themselves only known to a few ulps and vanish almost
// everywhere on the interval.
fn integrate_tol<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!("invalid integration interval [{a}, {b}]")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::invalid(format!(
            "relative tolerance must be positive, got {rel_tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let ends = fa + fb;
    let ends_abs = fa.abs() + fb.abs();
    let (mut even, mut even_abs) = (0.0, 0.0);
    let (mut odd, mut odd_abs) = (fm, fm.abs());

    let mut panels: usize = 2;
    let mut h = 0.5 * (b - a);
    let mut estimate = h / 3.0 * (ends + 4.0 * odd);

    for level in 2..=MAX_LEVEL {
        panels *= 2;
        h *= 0.5;
        even += odd;
        even_abs += odd_abs;
        odd = 0.0;
        odd_abs = 0.0;
        for i in 0..panels / 2 {
            let v = f(a + (2 * i + 1) as f64 * h);
            odd += v;
            odd_abs += v.abs();
        }

        let next = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        let scale = h / 3.0 * (ends_abs + 4.0 * odd_abs + 2.0 * even_abs);
        let converged = (next - estimate).abs() <= rel_tol * scale + abs_tol;
        estimate = next;
        if level >= MIN_LEVEL && converged {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature { a, b, panels })
}

/// [`integrate`] over consecutive pieces `[breaks[i], breaks[i+1]]`.
pub fn integrate_pieces<F>(f: F, breaks: &[f64], rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    breaks.windows(2).map(|w| integrate(&f, w[0], w[1], rel_tol)).sum()
}

fn half_unit_breaks(support: usize) -> Vec<f64> {
    (0..=2 * support).map(|i| i as f64 * 0.5).collect()
}

/// `∫_L^∞ sinc²(x) dx`, computed as `1/2 − ∫₀ᴸ sinc²(x) dx`.
pub fn sinc_tail(support: f64) -> f64 {
    if !(support > 0.0) {
        return 0.5;
    }
    let mut breaks: Vec<f64> = (0..).map(|i| i as f64 * 0.5).take_while(|&x| x < support).collect();
    breaks.push(support);
    let head =
        integrate_pieces(|x| sinc(x).powi(2), &breaks, TAIL_REL_TOL).expect("sinc² is smooth on half-unit pieces");
    0.5 - head
}

/// Ideal low-pass response `Π(t)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoxResponse;

impl BoxResponse {
    pub fn value(&self, t: f64) -> f64 {
        let t = t.abs();
        if t < 0.5 {
            1.0
        } else if t == 0.5 {
            0.5
        } else {
            0.0
        }
    }
}

/// Frequency approximation error of a kernel and its two components.
#[derive(Clone, Debug, PartialEq)]
pub struct FaeReport {
    pub kernel_id: KernelId,
    pub support: usize,
    /// `sqrt(2·(e1 + e2))`.
    pub e: f64,
    /// Near-field mismatch `∫₀ᴸ (h − sinc)²`.
    pub e1: f64,
    /// Sinc tail `∫ᴸ^∞ sinc²`.
    pub e2: f64,
}

/// `(E₁, E₂)` for any kernel.
pub fn fae_parts<K: Kernel + ?Sized>(k: &K) -> Result<(f64, f64)> {
    let support = k.support();
    let e1 = integrate_pieces(
        |x| (k.eval(x) - sinc(x)).powi(2),
        &half_unit_breaks(support),
        FAE_REL_TOL,
    )?;
    Ok((e1, sinc_tail(support as f64)))
}

/// Spatial-domain FAE of any kernel.
pub fn fae_value<K: Kernel + ?Sized>(k: &K) -> Result<f64> {
    let (e1, e2) = fae_parts(k)?;
    Ok((2.0 * (e1 + e2)).sqrt())
}

pub fn fae(id: &KernelId) -> Result<FaeReport> {
    let (e1, e2) = fae_parts(id)?;
    Ok(FaeReport {
        kernel_id: id.clone(),
        support: id.support(),
        e: (2.0 * (e1 + e2)).sqrt(),
        e1,
        e2,
    })
}

/// Minimal FAE attainable with support `L`; `L = 0` is the no-interpolation
/// case and evaluates to exactly 1.
pub fn optimal_fae(support: usize) -> Result<f64> {
    if support == 0 {
        return Ok((2.0 * sinc_tail(0.0)).sqrt());
    }
    Ok(fae(&KernelId::L2Optimal { support })?.e)
}

/// [`optimal_fae`] assembled from the per-segment aliasing terms `T_n`
/// instead of the kernel itself.
pub fn optimal_fae_by_segments(support: usize) -> Result<f64> {
    if support == 0 {
        return Ok((2.0 * sinc_tail(0.0)).sqrt());
    }
    let aliasing: f64 = (0..2 * support)
        .map(|n| {
            let lo = n as f64 * 0.5;
            integrate(
                |x| l2opt::segment_aliasing(support, n, x).powi(2),
                lo,
                lo + 0.5,
                FAE_REL_TOL,
            )
        })
        .sum::<Result<f64>>()?;
    Ok((2.0 * (aliasing + sinc_tail(support as f64))).sqrt())
}

/// Power-law fit `0.335·L^(−0.5258)` of the optimal error curve.
pub fn fae_approx(support: usize) -> f64 {
    0.335 * (support as f64).powf(-0.5258)
}

/// `F_h(t) = 2·∫₀ᴸ h(x)·cos(2πxt) dx` for an even real kernel.
pub fn fourier_sample<K: Kernel + ?Sized>(k: &K, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("frequency must be finite, got {t}")));
    }
    // Each half-unit piece is cut so that no sub-piece spans more than half
    // a period of the cosine.
    let sub = t.abs().ceil() as usize + 1;
    let support = k.support();
    let mut breaks = Vec::with_capacity(2 * support * sub + 1);
    for i in 0..2 * support * sub {
        breaks.push(i as f64 * 0.5 / sub as f64);
    }
    breaks.push(support as f64);
    let w = 2.0 * PI * t;
    Ok(2.0 * integrate_pieces(|x| k.eval(x) * (w * x).cos(), &breaks, FOURIER_REL_TOL)?)
}

/// `sqrt(∫_{−t_max}^{t_max} (F(t) − Π(t))² dt)` for an even spectrum `F`.
pub fn frequency_l2_distance<F>(spectrum: F, t_max: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(t_max > 0.5) {
        return Err(Error::invalid(format!("t_max must exceed 1/2, got {t_max}")));
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    // Π jumps at 1/2, which is a piece boundary. Each piece uses the
    // one-sided limit of Π so that no integrand sees the jump.
    let integrand = |t: f64, target: f64| match spectrum(t) {
        Ok(v) => (v - target).powi(2),
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let mut breaks = vec![0.0, 0.5];
    breaks.extend((1..).map(|i| i as f64).take_while(|&t| t < t_max));
    breaks.push(t_max);
    // F(t) is itself a quadrature result, so near the passband (F − Π)² is
    // noise-dominated and a purely relative criterion cannot be met.
    let half = breaks
        .windows(2)
        .map(|w| {
            let target = BoxResponse.value(0.5 * (w[0] + w[1]));
            integrate_tol(|t| integrand(t, target), w[0], w[1], SPECTRUM_REL_TOL, SPECTRUM_ABS_TOL)
        })
        .sum::<Result<f64>>()?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((2.0 * half).sqrt())
}

// Gauss–Legendre nodes per sub-piece of the precomputed transform.
const GL_DEGREE: usize = 12;

/// Fixed quadrature rule for `F_h` on `[0, t_max]`, with the kernel
/// evaluated once. Pieces are as in [`fourier_sample`] for `t = t_max`.
struct SampledTransform {
    x: Vec<f64>,
    weighted: Vec<f64>,
}

impl SampledTransform {
    fn new<K: Kernel + ?Sized>(k: &K, t_max: f64) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(GL_DEGREE).expect("nonzero degree"));
        let sub = t_max.ceil() as usize + 1;
        let width = 0.5 / sub as f64;
        let pieces = 2 * k.support() * sub;
        let mut x = Vec::with_capacity(pieces * GL_DEGREE);
        let mut weighted = Vec::with_capacity(pieces * GL_DEGREE);
        for p in 0..pieces {
            let a = p as f64 * width;
            for &(node, w) in rule.as_node_weight_pairs() {
                let xi = a + 0.5 * width * (node + 1.0);
                x.push(xi);
                weighted.push(0.5 * width * w * k.eval(xi));
            }
        }
        SampledTransform { x, weighted }
    }

    fn at(&self, t: f64) -> f64 {
        let w = 2.0 * PI * t;
        2.0 * self
            .x
            .iter()
            .zip(&self.weighted)
            .map(|(x, h)| h * (w * x).cos())
            .sum::<f64>()
    }
}

/// FAE computed from the kernel's Fourier transform on `[−t_max, t_max]`.
///
/// The transform comes from a fixed Gauss–Legendre rule rather than
/// [`fourier_sample`], so this shares no quadrature with [`fae`].
pub fn fae_frequency_domain<K: Kernel + ?Sized>(k: &K, t_max: f64) -> Result<f64> {
    if !(t_max >= 10.0) || !t_max.is_finite() {
        return Err(Error::invalid(format!("t_max must be at least 10, got {t_max}")));
    }
    let transform = SampledTransform::new(k, t_max);
    frequency_l2_distance(|t| Ok(transform.at(t)), t_max)
}

/// `(t, F_h(t))` for `t = 0, step, …` up to and including `t_max`.
pub fn fourier_curve<K: Kernel + ?Sized>(k: &K, t_max: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(t_max > 0.0) || !(step > 0.0) {
        return Err(Error::invalid("t_max and step must be positive"));
    }
    let count = (t_max / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            let t = i as f64 * step;
            fourier_sample(k, t).map(|f| (t, f))
        })
        .collect()
}

/// `(L, E_L, Ê_L)` rows for `L = 1..=max_support`.
pub fn optimal_error_curve(max_support: usize) -> Result<Vec<(usize, f64, f64)>> {
    (1..=max_support)
        .map(|l| optimal_fae(l).map(|e| (l, e, fae_approx(l))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::FnKernel;

    // Midpoint rule on a fixed uniform grid: a deliberately crude,
    // independent reference.
    fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    #[test]
    fn integrate_basics() {
        assert!((integrate(|_| 1.0, 0.0, 3.0, 1e-8).unwrap() - 3.0).abs() < 1e-14);
        let third = integrate(|x| x * x, 0.0, 1.0, 1e-8).unwrap();
        assert!((third - 1.0 / 3.0).abs() <= 1e-8 / 3.0);
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-8).unwrap(), 0.0);
        assert_eq!(integrate(|_| 0.0, 0.0, 1.0, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn integrate_sinc_squared_against_two_resolutions() {
        let coarse = midpoint(|x| sinc(x).powi(2), 0.0, 1.0, 20_000);
        let fine = midpoint(|x| sinc(x).powi(2), 0.0, 1.0, 200_000);
        assert!((coarse - fine).abs() < 1e-9);
        let v = integrate(|x| sinc(x).powi(2), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - fine).abs() < 1e-10);
        assert!((v - 0.451_412).abs() < 1e-6);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }

    #[test]
    fn integrate_reports_non_convergence() {
        // A jump inside the interval defeats Simpson at a tolerance this tight.
        let err = integrate(|x| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 1e-15).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn sinc_tail_values() {
        assert_eq!(sinc_tail(0.0), 0.5);
        let head = midpoint(|x| sinc(x).powi(2), 0.0, 1.0, 200_000);
        assert!((sinc_tail(1.0) - (0.5 - head)).abs() < 1e-10);
        assert!((sinc_tail(1.0) - 0.048_588).abs() < 1e-6);
        let t50 = sinc_tail(50.0);
        assert!(t50 > 0.0 && t50 <= 1.0 / (PI * PI * 50.0));
        assert!(sinc_tail(60.0) < t50);
    }

    #[test]
    fn box_response_takes_three_values() {
        assert_eq!(BoxResponse.value(0.2), 1.0);
        assert_eq!(BoxResponse.value(-0.5), 0.5);
        assert_eq!(BoxResponse.value(0.7), 0.0);
    }

    #[test]
    fn reference_fae_values() {
        let h2 = fae(&KernelId::L2Optimal { support: 2 }).unwrap();
        assert!((h2.e - 0.2301).abs() <= 5e-4, "{h2:?}");
        assert!((h2.e - (2.0 * (h2.e1 + h2.e2)).sqrt()).abs() < 1e-15);
        let c6 = fae(&KernelId::Cubic6).unwrap();
        assert!((c6.e - 0.2299).abs() <= 5e-4, "{c6:?}");
        assert!((h2.e - c6.e).abs() < 1e-3);
    }

    #[test]
    fn zero_kernel_has_unit_error() {
        let zero = FnKernel::new(1, |_| 0.0);
        let e = fae_value(&zero).unwrap();
        // E₁ = ∫₀¹ sinc², E₂ = the tail beyond 1; together one half.
        assert!((e - 1.0).abs() < 1e-9);
        assert_eq!(optimal_fae(0).unwrap(), 1.0);
    }

    #[test]
    fn truncated_sinc_error_vanishes_with_support() {
        let values: Vec<f64> = [1, 2, 4, 8, 16, 64]
            .iter()
            .map(|&l| fae(&KernelId::TruncatedSinc { support: l }).unwrap().e)
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
        assert!(values[5] < 0.06);
    }

    #[test]
    fn optimal_error_paths_agree() {
        for l in 1..=6 {
            let a = optimal_fae(l).unwrap();
            let b = optimal_fae_by_segments(l).unwrap();
            assert!((a - b).abs() <= 1e-6, "L={l}: {a} vs {b}");
        }
    }

    #[test]
    fn optimal_kernels_beat_classical_ones() {
        let e = |id: KernelId| fae(&id).unwrap().e;
        assert!(e(KernelId::L2Optimal { support: 1 }) < e(KernelId::Linear));
        assert!(e(KernelId::L2Optimal { support: 2 }) < e(KernelId::keys()));
        assert!(e(KernelId::L2Optimal { support: 3 }) < e(KernelId::Cubic6));
        let h2 = e(KernelId::L2Optimal { support: 2 });
        for a in [-1.0, -0.75, -0.5, -0.25] {
            assert!(h2 <= e(KernelId::Keys { a }), "a = {a}");
        }
    }

    #[test]
    fn power_law_values() {
        assert_eq!(fae_approx(1), 0.335);
        assert!((fae_approx(4) - 0.1616).abs() < 1e-4);
    }

    #[test]
    fn fourier_samples() {
        for id in KernelId::builtins() {
            if matches!(id, KernelId::TruncatedSinc { .. }) {
                continue;
            }
            let f0 = fourier_sample(&id, 0.0).unwrap();
            assert!((f0 - 1.0).abs() <= 1e-6, "{id}: {f0}");
        }
        // The triangle transforms to sinc², which vanishes at t = 1.
        assert!(fourier_sample(&KernelId::Linear, 1.0).unwrap().abs() <= 1e-6);
        let t = 0.3;
        let tri = fourier_sample(&KernelId::Linear, t).unwrap();
        assert!((tri - sinc(t).powi(2)).abs() < 1e-9);
        // Long truncated sinc approaches the box in the pass band.
        let f = fourier_sample(&KernelId::TruncatedSinc { support: 200 }, 0.25).unwrap();
        assert!((f - 1.0).abs() < 0.01, "{f}");
        assert!(fourier_sample(&KernelId::Linear, f64::NAN).is_err());
    }

    #[test]
    fn distance_of_a_known_spectrum() {
        // F(t) = e^(−|t|): ∫₀^½ (e^(−t) − 1)² + ∫_½^50 e^(−2t), doubled.
        let e = std::f64::consts::E;
        let pass = (1.0 - 1.0 / e) / 2.0 - 2.0 * (1.0 - e.powf(-0.5)) + 0.5;
        let stop = (1.0 / e - (-100.0f64).exp()) / 2.0;
        let exact = (2.0 * (pass + stop)).sqrt();
        let d = frequency_l2_distance(|t| Ok((-t.abs()).exp()), 50.0).unwrap();
        assert!(((d - exact) / exact).abs() < 1e-7, "{d} vs {exact}");
        assert!(frequency_l2_distance(|_| Ok(0.0), 0.5).is_err());
        assert!(frequency_l2_distance(|_| Err(Error::invalid("boom")), 10.0).is_err());
    }

    #[test]
    fn parseval_cross_check_for_two_kernels() {
        for id in [KernelId::Linear, KernelId::L2Optimal { support: 2 }] {
            let spatial = fae(&id).unwrap().e;
            let spectral = fae_frequency_domain(&id, DEFAULT_T_MAX).unwrap();
            assert!(
                ((spectral - spatial) / spatial).abs() <= 0.01,
                "{id}: {spectral} vs {spatial}"
            );
        }
        assert!(fae_frequency_domain(&KernelId::Linear, 5.0).is_err());
    }

    #[test]
    fn h2_spectrum_peaks_near_a_fifth() {
        let curve = fourier_curve(&KernelId::L2Optimal { support: 2 }, 0.5, 0.01).unwrap();
        let (peak, _) = curve
            .iter()
            .skip(1)
            .take_while(|(t, _)| *t < 0.45)
            .fold((0.0, f64::MIN), |acc, &(t, f)| if f > acc.1 { (t, f) } else { acc });
        assert!((peak - 0.2).abs() <= 0.06, "peak at {peak}");
        assert!(curve[0].1 < curve.iter().map(|p| p.1).fold(f64::MIN, f64::max));
    }
}
