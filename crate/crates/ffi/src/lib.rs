//! C ABI over `l2interp`.
//!
//! Every fallible function returns an [`L2iStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`l2i_last_error`] on the same thread until the next failing call.
//! Objects are opaque handles released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use l2interp::resample::{self, BitDepth, RationalRotation};
use l2interp::spectral;
use l2interp::{Boundary, Error, Ilut, ImageBuffer, Kernel, KernelId, ZoomSpec};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L2iStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    KernelParse = 3,
    Io = 4,
    Format = 5,
    UnsupportedFormat = 6,
    Quadrature = 7,
    NonConforming = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L2iBoundary {
    Clamp = 0,
    Mirror = 1,
}

impl From<L2iBoundary> for Boundary {
    fn from(b: L2iBoundary) -> Self {
        match b {
            L2iBoundary::Clamp => Boundary::Clamp,
            L2iBoundary::Mirror => Boundary::Mirror,
        }
    }
}

/// Rational rotation actually applied by [`l2i_rotate`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct L2iRotation {
    pub n: i64,
    pub m: i64,
    pub q: u32,
    /// Degrees.
    pub angle_deviation: f64,
    pub implied_scale: f64,
}

impl From<&RationalRotation> for L2iRotation {
    fn from(r: &RationalRotation) -> Self {
        L2iRotation {
            n: r.n,
            m: r.m,
            q: r.q,
            angle_deviation: r.angle_deviation,
            implied_scale: r.implied_scale,
        }
    }
}

/// Parsed interpolation kernel.
pub struct L2iKernel(KernelId);

/// Interpolation lookup table.
pub struct L2iIlut(Ilut);

/// Grayscale image with 8- or 16-bit samples.
pub struct L2iImage(ImageBuffer);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> L2iStatus {
    match err {
        Error::InvalidArgument(_) => L2iStatus::InvalidArgument,
        Error::KernelParse { .. } => L2iStatus::KernelParse,
        Error::Quadrature { .. } => L2iStatus::Quadrature,
        Error::NonConforming { .. } => L2iStatus::NonConforming,
        Error::Format(_) => L2iStatus::Format,
        Error::UnsupportedFormat(_) => L2iStatus::UnsupportedFormat,
        Error::Io(_) => L2iStatus::Io,
    }
}

struct Failure(L2iStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(L2iStatus::NullPointer, format!("{what} is NULL"))
}

// Runs `f`, turning errors and panics into a status plus last-error message.
fn guard<F>(f: F) -> L2iStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => L2iStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            L2iStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(L2iStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the most recent failure on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn l2i_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a kernel id such as `l2opt:L=2` or `blend:w=0.5,l2opt:L=3,cubic6`.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out_kernel` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn l2i_kernel_parse(id: *const c_char, out_kernel: *mut *mut L2iKernel) -> L2iStatus {
    guard(|| {
        let slot = out(out_kernel, "out_kernel")?;
        let kernel: KernelId = c_str(id, "id")?.parse()?;
        *slot = boxed(L2iKernel(kernel));
        Ok(())
    })
}

/// # Safety
/// `kernel` must come from [`l2i_kernel_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn l2i_kernel_free(kernel: *mut L2iKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Writes the canonical id, NUL-terminated, into `buf` when it fits.
/// `*needed` receives the length including the terminator.
///
/// # Safety
/// `buf` must hold `len` bytes (or be NULL with `len` 0).
#[no_mangle]
pub unsafe extern "C" fn l2i_kernel_name(
    kernel: *const L2iKernel,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> L2iStatus {
    guard(|| {
        let k = deref(kernel, "kernel")?;
        let name = k.0.to_string();
        let total = name.len() + 1;
        if let Some(n) = needed.as_mut() {
            *n = total;
        }
        if buf.is_null() || len < total {
            return Err(Failure(
                L2iStatus::InvalidArgument,
                format!("buffer of {len} bytes cannot hold {total}"),
            ));
        }
        ptr::copy_nonoverlapping(name.as_ptr(), buf.cast::<u8>(), name.len());
        *buf.add(name.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_kernel_support(kernel: *const L2iKernel, out_support: *mut usize) -> L2iStatus {
    guard(|| {
        *out(out_support, "out_support")? = deref(kernel, "kernel")?.0.support();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_kernel_eval(kernel: *const L2iKernel, x: f64, out_value: *mut f64) -> L2iStatus {
    guard(|| {
        *out(out_value, "out_value")? = deref(kernel, "kernel")?.0.eval(x);
        Ok(())
    })
}

/// Frequency approximation error `E` and its parts `E1`, `E2`.
/// `out_e1` and `out_e2` may be NULL.
///
/// # Safety
/// Non-NULL pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_kernel_fae(
    kernel: *const L2iKernel,
    out_e: *mut f64,
    out_e1: *mut f64,
    out_e2: *mut f64,
) -> L2iStatus {
    guard(|| {
        let slot = out(out_e, "out_e")?;
        let r = spectral::fae(&deref(kernel, "kernel")?.0)?;
        *slot = r.e;
        if let Some(p) = out_e1.as_mut() {
            *p = r.e1;
        }
        if let Some(p) = out_e2.as_mut() {
            *p = r.e2;
        }
        Ok(())
    })
}

/// Least FAE reachable with support `L`. `L = 0` gives 1.
///
/// # Safety
/// `out_e` must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_optimal_fae(support: usize, out_e: *mut f64) -> L2iStatus {
    guard(|| {
        *out(out_e, "out_e")? = spectral::optimal_fae(support)?;
        Ok(())
    })
}

/// Samples `kernel` at `r/q` for `r = 0..=q·L`. With `renormalize`, each
/// phase is rescaled to sum to one (kernels that are no partition of unity
/// are rejected).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_ilut_build(
    kernel: *const L2iKernel,
    q: u32,
    renormalize: bool,
    out_ilut: *mut *mut L2iIlut,
) -> L2iStatus {
    guard(|| {
        let slot = out(out_ilut, "out_ilut")?;
        let table = Ilut::build(&deref(kernel, "kernel")?.0, q, renormalize)?;
        *slot = boxed(L2iIlut(table));
        Ok(())
    })
}

/// # Safety
/// `ilut` must come from [`l2i_ilut_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn l2i_ilut_free(ilut: *mut L2iIlut) {
    if !ilut.is_null() {
        drop(Box::from_raw(ilut));
    }
}

/// Number of stored one-sided entries, `q·L + 1`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_ilut_len(ilut: *const L2iIlut, out_len: *mut usize) -> L2iStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(ilut, "ilut")?.0.len();
        Ok(())
    })
}

/// `h(r/q)` for any integer `r`; zero outside the support.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_ilut_lookup(ilut: *const L2iIlut, r: i64, out_value: *mut f64) -> L2iStatus {
    guard(|| {
        *out(out_value, "out_value")? = deref(ilut, "ilut")?.0.lookup(r);
        Ok(())
    })
}

/// Borrows the weight array. It lives as long as the table.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_ilut_weights(
    ilut: *const L2iIlut,
    out_weights: *mut *const f64,
    out_len: *mut usize,
) -> L2iStatus {
    guard(|| {
        let t = &deref(ilut, "ilut")?.0;
        let (w, n) = (out(out_weights, "out_weights")?, out(out_len, "out_len")?);
        *w = t.weights().as_ptr();
        *n = t.len();
        Ok(())
    })
}

/// Copies `width·height` row-major samples into a new image.
///
/// # Safety
/// `samples` must point to `width·height` values.
#[no_mangle]
pub unsafe extern "C" fn l2i_image_new(
    width: usize,
    height: usize,
    bit_depth: u32,
    samples: *const u16,
    out_image: *mut *mut L2iImage,
) -> L2iStatus {
    guard(|| {
        let slot = out(out_image, "out_image")?;
        if samples.is_null() {
            return Err(null("samples"));
        }
        let depth = BitDepth::from_bits(bit_depth)?;
        let count = width
            .checked_mul(height)
            .ok_or_else(|| Failure(L2iStatus::InvalidArgument, "image dimensions overflow".into()))?;
        let data = std::slice::from_raw_parts(samples, count).to_vec();
        *slot = boxed(L2iImage(ImageBuffer::new(width, height, depth, data)?));
        Ok(())
    })
}

/// Reads a PGM file (P2 or P5).
///
/// # Safety
/// `path` must be NUL-terminated and `out_image` valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_image_read(path: *const c_char, out_image: *mut *mut L2iImage) -> L2iStatus {
    guard(|| {
        let slot = out(out_image, "out_image")?;
        let img = l2interp::pgm::read_image(c_str(path, "path")?)?;
        *slot = boxed(L2iImage(img));
        Ok(())
    })
}

/// Writes a binary PGM file.
///
/// # Safety
/// `path` must be NUL-terminated and `image` valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_image_write(image: *const L2iImage, path: *const c_char) -> L2iStatus {
    guard(|| {
        let img = deref(image, "image")?;
        l2interp::pgm::write_image(&img.0, c_str(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `image` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn l2i_image_free(image: *mut L2iImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Width, height and bit depth. Any out-pointer may be NULL.
///
/// # Safety
/// `image` must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_image_info(
    image: *const L2iImage,
    out_width: *mut usize,
    out_height: *mut usize,
    out_bit_depth: *mut u32,
) -> L2iStatus {
    guard(|| {
        let img = &deref(image, "image")?.0;
        if let Some(p) = out_width.as_mut() {
            *p = img.width();
        }
        if let Some(p) = out_height.as_mut() {
            *p = img.height();
        }
        if let Some(p) = out_bit_depth.as_mut() {
            *p = img.depth().bits();
        }
        Ok(())
    })
}

/// Copies the samples into `buf`, which must hold `width·height` values.
///
/// # Safety
/// `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn l2i_image_copy_samples(image: *const L2iImage, buf: *mut u16, len: usize) -> L2iStatus {
    guard(|| {
        let samples = deref(image, "image")?.0.samples();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < samples.len() {
            return Err(Failure(
                L2iStatus::InvalidArgument,
                format!("buffer holds {len} samples, image has {}", samples.len()),
            ));
        }
        ptr::copy_nonoverlapping(samples.as_ptr(), buf, samples.len());
        Ok(())
    })
}

/// Zooms by `m/q`; the output has `ceil(n·m/q)` samples per axis.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_zoom(
    image: *const L2iImage,
    m: u32,
    q: u32,
    kernel: *const L2iKernel,
    boundary: L2iBoundary,
    use_ilut: bool,
    out_image: *mut *mut L2iImage,
) -> L2iStatus {
    guard(|| {
        let slot = out(out_image, "out_image")?;
        let spec = ZoomSpec::new(m, q, deref(kernel, "kernel")?.0.clone())
            .with_boundary(boundary.into())
            .with_ilut(use_ilut);
        *slot = boxed(L2iImage(resample::zoom(&deref(image, "image")?.0, &spec)?));
        Ok(())
    })
}

/// Rotates about the center by the rational approximation of `angle_deg`
/// with denominator `q`. `out_rotation` may be NULL.
///
/// # Safety
/// Non-NULL pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn l2i_rotate(
    image: *const L2iImage,
    angle_deg: f64,
    q: u32,
    kernel: *const L2iKernel,
    boundary: L2iBoundary,
    out_image: *mut *mut L2iImage,
    out_rotation: *mut L2iRotation,
) -> L2iStatus {
    guard(|| {
        let slot = out(out_image, "out_image")?;
        let rot = resample::approximate_rotation(angle_deg, q)?;
        let img = resample::rotate(
            &deref(image, "image")?.0,
            &rot,
            &deref(kernel, "kernel")?.0,
            boundary.into(),
        )?;
        *slot = boxed(L2iImage(img));
        if let Some(p) = out_rotation.as_mut() {
            *p = L2iRotation::from(&rot);
        }
        Ok(())
    })
}
