//! Interpolation kernel contract and the classical analytic kernels.
//!
//! Every kernel is even, vanishes outside `[-L, L]`, is cardinal
//! (`h(n) = δ_n` at integers) and forms a partition of unity. The evaluators
//! take `|x|` first and then apply the one-sided piecewise formula; the
//! support test is strict, so `|x| = L` is evaluated by the formula (all
//! kernels here are zero there).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::l2opt;
use crate::{Error, Result};

/// Default Keys parameter; the only choice with third-order accuracy.
pub const KEYS_DEFAULT_A: f64 = -0.5;

/// A symmetric finite-support interpolation kernel.
pub trait Kernel {
    /// Half-width of the support in sample units.
    fn support(&self) -> usize;

    /// Weight at offset `x` (sample units).
    fn eval(&self, x: f64) -> f64;
}

/// `sin(πx)` with the argument reduced to `[-1/2, 1/2]` first, so that the
/// result is exactly zero at every integer.
#[inline]
fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let s = (PI * (x - n)).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Normalized sinc, `sin(πx)/(πx)`, with the removable singularity filled in.
/// Evaluated at `|x|` so that it is even bit for bit.
#[inline]
pub fn sinc(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

pub fn eval_linear(x: f64) -> f64 {
    let x = x.abs();
    if x > 1.0 {
        0.0
    } else {
        1.0 - x
    }
}

/// Keys cubic convolution with free parameter `a` (support 2).
pub fn eval_keys(a: f64, x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x <= 2.0 {
        a * (((x - 5.0) * x + 8.0) * x - 4.0)
    } else {
        0.0
    }
}

/// Six-point piecewise cubic on support 3.
pub fn eval_cubic6(x: f64) -> f64 {
    let x = x.abs();
    let p = if x <= 1.0 {
        (6.0 * x - 11.0) * x * x + 5.0
    } else if x <= 2.0 {
        ((-3.0 * x + 16.0) * x - 27.0) * x + 14.0
    } else if x <= 3.0 {
        ((x - 8.0) * x + 21.0) * x - 18.0
    } else {
        return 0.0;
    };
    p / 5.0
}

pub fn eval_truncated_sinc(support: usize, x: f64) -> f64 {
    // `>=` keeps the edge sample a positive zero on both sides.
    if x.abs() >= support as f64 {
        0.0
    } else {
        sinc(x)
    }
}

/// `w·k1(x) + (1−w)·k2(x)` for `0 < w < 1`.
pub fn eval_blend<A, B>(w: f64, k1: &A, k2: &B, x: f64) -> Result<f64>
where
    A: Kernel + ?Sized,
    B: Kernel + ?Sized,
{
    check_blend_weight(w)?;
    Ok(blend(w, k1.eval(x), k2.eval(x)))
}

// Written as b + w(a − b) so that a = b gives b exactly; this keeps blends of
// cardinal kernels exactly cardinal.
#[inline]
fn blend(w: f64, a: f64, b: f64) -> f64 {
    b + w * (a - b)
}

fn check_blend_weight(w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "blend weight must lie strictly inside (0, 1), got {w}"
        )))
    }
}

/// Identifies one of the built-in kernels.
///
/// The canonical text form (see [`fmt::Display`] and [`FromStr`]) is
/// `linear`, `keys:a=-0.5`, `cubic6`, `tsinc:L=3`, `l2opt:L=2` and
/// `blend:w=0.5,<left>,<right>`, where the blend operands are themselves
/// kernel ids.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelId {
    Linear,
    Keys {
        a: f64,
    },
    Cubic6,
    TruncatedSinc {
        support: usize,
    },
    L2Optimal {
        support: usize,
    },
    Blend {
        weight: f64,
        left: Box<KernelId>,
        right: Box<KernelId>,
    },
}

impl KernelId {
    pub fn keys() -> Self {
        KernelId::Keys { a: KEYS_DEFAULT_A }
    }

    pub fn l2_optimal(support: usize) -> Result<Self> {
        if support == 0 {
            return Err(Error::invalid("l2opt support must be at least 1"));
        }
        Ok(KernelId::L2Optimal { support })
    }

    pub fn truncated_sinc(support: usize) -> Result<Self> {
        if support == 0 {
            return Err(Error::invalid("tsinc support must be at least 1"));
        }
        Ok(KernelId::TruncatedSinc { support })
    }

    pub fn blend(weight: f64, left: KernelId, right: KernelId) -> Result<Self> {
        check_blend_weight(weight)?;
        Ok(KernelId::Blend {
            weight,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// Checks the parameters of a directly constructed id.
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelId::Linear | KernelId::Cubic6 => Ok(()),
            KernelId::Keys { a } if a.is_finite() => Ok(()),
            KernelId::Keys { a } => Err(Error::invalid(format!("keys parameter {a} is not finite"))),
            KernelId::TruncatedSinc { support } | KernelId::L2Optimal { support } => {
                if *support == 0 {
                    Err(Error::invalid("support must be at least 1"))
                } else {
                    Ok(())
                }
            }
            KernelId::Blend { weight, left, right } => {
                check_blend_weight(*weight)?;
                left.validate()?;
                right.validate()
            }
        }
    }

    /// Whether integer shifts of the kernel sum to one. Truncated sinc is
    /// cardinal but not a partition of unity.
    pub fn partitions_unity(&self) -> bool {
        match self {
            KernelId::TruncatedSinc { .. } => false,
            KernelId::Blend { left, right, .. } => left.partitions_unity() && right.partitions_unity(),
            _ => true,
        }
    }

    /// Every kernel the library ships, at its customary parameters.
    pub fn builtins() -> Vec<KernelId> {
        vec![
            KernelId::Linear,
            KernelId::keys(),
            KernelId::Cubic6,
            KernelId::TruncatedSinc { support: 3 },
            KernelId::L2Optimal { support: 1 },
            KernelId::L2Optimal { support: 2 },
            KernelId::L2Optimal { support: 3 },
            KernelId::Blend {
                weight: 0.5,
                left: Box::new(KernelId::L2Optimal { support: 3 }),
                right: Box::new(KernelId::Cubic6),
            },
        ]
    }
}

impl Kernel for KernelId {
    fn support(&self) -> usize {
        match self {
            KernelId::Linear => 1,
            KernelId::Keys { .. } => 2,
            KernelId::Cubic6 => 3,
            KernelId::TruncatedSinc { support } | KernelId::L2Optimal { support } => *support,
            KernelId::Blend { left, right, .. } => left.support().max(right.support()),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            KernelId::Linear => eval_linear(x),
            KernelId::Keys { a } => eval_keys(*a, x),
            KernelId::Cubic6 => eval_cubic6(x),
            KernelId::TruncatedSinc { support } => eval_truncated_sinc(*support, x),
            KernelId::L2Optimal { support } => l2opt::eval_hl(*support, x),
            KernelId::Blend { weight, left, right } => blend(*weight, left.eval(x), right.eval(x)),
        }
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn support(&self) -> usize {
        (**self).support()
    }

    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
}

/// Adapts a closure to the [`Kernel`] contract. The closure is responsible
/// for symmetry; values outside the support are forced to zero.
pub struct FnKernel<F> {
    support: usize,
    f: F,
}

impl<F: Fn(f64) -> f64> FnKernel<F> {
    pub fn new(support: usize, f: F) -> Self {
        FnKernel { support, f }
    }
}

impl<F: Fn(f64) -> f64> Kernel for FnKernel<F> {
    fn support(&self) -> usize {
        self.support
    }

    fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.support as f64 {
            0.0
        } else {
            (self.f)(x)
        }
    }
}

/// Largest deviations from the cardinal condition and from partition of
/// unity found by [`check_kernel_conditions`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport {
    pub cardinal: f64,
    pub partition: f64,
}

impl ConditionReport {
    pub fn within(&self, tol: f64) -> bool {
        self.cardinal <= tol && self.partition <= tol
    }
}

/// Measures the cardinal condition over the integers in `[-L, L]` and
/// partition of unity over `x ∈ [0, 1]` sampled every `grid_step`.
pub fn check_kernel_conditions<K: Kernel + ?Sized>(k: &K, grid_step: f64) -> Result<ConditionReport> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::invalid(format!("grid step must be positive, got {grid_step}")));
    }
    let l = k.support() as i64;

    let cardinal = (-l..=l)
        .map(|n| {
            let target = if n == 0 { 1.0 } else { 0.0 };
            (k.eval(n as f64) - target).abs()
        })
        .fold(0.0, f64::max);

    let steps = (1.0 / grid_step).ceil() as usize;
    let mut partition: f64 = 0.0;
    for i in 0..=steps {
        let x = (i as f64 * grid_step).min(1.0);
        let sum: f64 = (-l..=l).map(|j| k.eval(x + j as f64)).sum();
        partition = partition.max((sum - 1.0).abs());
    }

    Ok(ConditionReport { cardinal, partition })
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelId::Linear => f.write_str("linear"),
            KernelId::Keys { a } => write!(f, "keys:a={a}"),
            KernelId::Cubic6 => f.write_str("cubic6"),
            KernelId::TruncatedSinc { support } => write!(f, "tsinc:L={support}"),
            KernelId::L2Optimal { support } => write!(f, "l2opt:L={support}"),
            KernelId::Blend { weight, left, right } => write!(f, "blend:w={weight},{left},{right}"),
        }
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: String| Error::KernelParse {
            input: s.to_string(),
            reason,
        };
        let (id, rest) = parse_prefix(s.trim()).map_err(fail)?;
        if !rest.is_empty() {
            return Err(fail(format!("unexpected trailing input `{rest}`")));
        }
        Ok(id)
    }
}

/// Parses one kernel id from the front of `s`, returning the unconsumed tail.
fn parse_prefix(s: &str) -> std::result::Result<(KernelId, &str), String> {
    let name_end = s.find([':', ',']).unwrap_or(s.len());
    let name = &s[..name_end];
    let after_name = &s[name_end..];

    // Non-blend parameters run up to the next comma.
    let param = |key: &str| -> std::result::Result<(&str, &str), String> {
        let body = after_name
            .strip_prefix(':')
            .ok_or_else(|| format!("`{name}` requires parameter `{key}=`"))?;
        let end = body.find(',').unwrap_or(body.len());
        let value = body[..end]
            .strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .ok_or_else(|| format!("`{name}` expects `{key}=<value>`, got `{}`", &body[..end]))?;
        Ok((value, &body[end..]))
    };
    let support = |value: &str| -> std::result::Result<usize, String> {
        match value.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("support must be a positive integer, got `{value}`")),
            Ok(l) => Ok(l),
        }
    };

    match name {
        "linear" => Ok((KernelId::Linear, after_name)),
        "cubic6" => Ok((KernelId::Cubic6, after_name)),
        "keys" if !after_name.starts_with(':') => Ok((KernelId::keys(), after_name)),
        "keys" => {
            let (value, rest) = param("a")?;
            let a: f64 = value
                .parse()
                .map_err(|_| format!("keys parameter `{value}` is not a number"))?;
            if !a.is_finite() {
                return Err(format!("keys parameter `{value}` is not finite"));
            }
            Ok((KernelId::Keys { a }, rest))
        }
        "tsinc" => {
            let (value, rest) = param("L")?;
            Ok((
                KernelId::TruncatedSinc {
                    support: support(value)?,
                },
                rest,
            ))
        }
        "l2opt" => {
            let (value, rest) = param("L")?;
            Ok((
                KernelId::L2Optimal {
                    support: support(value)?,
                },
                rest,
            ))
        }
        "blend" => {
            let (value, rest) = param("w")?;
            let weight: f64 = value
                .parse()
                .map_err(|_| format!("blend weight `{value}` is not a number"))?;
            if !(weight > 0.0 && weight < 1.0) {
                return Err(format!("blend weight must lie strictly inside (0, 1), got {value}"));
            }
            let rest = rest.strip_prefix(',').ok_or("blend needs two operand kernels")?;
            let (left, rest) = parse_prefix(rest)?;
            let rest = rest.strip_prefix(',').ok_or("blend needs two operand kernels")?;
            let (right, rest) = parse_prefix(rest)?;
            Ok((
                KernelId::Blend {
                    weight,
                    left: Box::new(left),
                    right: Box::new(right),
                },
                rest,
            ))
        }
        "" => Err("empty kernel id".to_string()),
        other => Err(format!("unknown kernel `{other}`")),
    }
}
