//! C interface to `expsamp`.
//!
//! Kernels are exposed through the opaque `ExpsampKernel` handle. Every
//! fallible function returns an `ExpsampStatus`; on failure a description is
//! available from `expsamp_last_error_message` on the same thread.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use expsamp::combinations::CombinationScheme;
use expsamp::functions::TestFunction;
use expsamp::kernels::{Kernel, KernelSpec};
use expsamp::moments::{absolute_moment_sup, algebraic_moment, DEFAULT_SUP_GRID};
use expsamp::operator::{apply_from_samples, sample_window, OperatorConfig, SampleSeries};
use expsamp::Error;

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpsampStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    DomainError = 4,
    PreconditionFailed = 5,
    MissingSample = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque kernel handle. Create with `expsamp_kernel_new`, release with
/// `expsamp_kernel_free`.
pub struct ExpsampKernel {
    inner: Box<dyn Kernel>,
}

/// Real function evaluated by the operator: `f(x, user_data)`.
pub type ExpsampFunction = Option<extern "C" fn(x: f64, user_data: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> ExpsampStatus {
    match err {
        Error::Parse { .. } => ExpsampStatus::ParseError,
        Error::Domain(_) => ExpsampStatus::DomainError,
        Error::Precondition(_) | Error::MissingDerivative { .. } => {
            ExpsampStatus::PreconditionFailed
        }
        Error::MissingSample(_) => ExpsampStatus::MissingSample,
        Error::SplineOrder(_)
        | Error::DegenerateTranslates(_)
        | Error::InvalidArgument(_)
        | Error::MissingTransform(_) => ExpsampStatus::InvalidArgument,
        _ => ExpsampStatus::Internal,
    }
}

struct Failure(ExpsampStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ExpsampStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, converting errors and panics into status codes.
fn guard<F>(body: F) -> ExpsampStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            ExpsampStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("panic inside expsamp");
            ExpsampStatus::Panic
        }
    }
}

unsafe fn kernel_ref<'a>(k: *const ExpsampKernel) -> Result<&'a dyn Kernel, Failure> {
    k.as_ref()
        .map(|k| k.inner.as_ref())
        .ok_or_else(|| null("kernel"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Parses a kernel spec such as `bspline:4` or `combo:4:e^1:e^2` and
/// stores a new handle in `*out`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expsamp_kernel_new(
    spec: *const c_char,
    out: *mut *mut ExpsampKernel,
) -> ExpsampStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(spec).to_str().map_err(|_| {
            Failure(
                ExpsampStatus::ParseError,
                "kernel spec is not valid UTF-8".into(),
            )
        })?;
        let inner = text.parse::<KernelSpec>()?.build()?;
        out.write(Box::into_raw(Box::new(ExpsampKernel { inner })));
        Ok(())
    })
}

/// Releases a handle. Null is accepted and ignored.
///
/// # Safety
/// `kernel` must come from `expsamp_kernel_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn expsamp_kernel_free(kernel: *mut ExpsampKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Kernel value at `u > 0`.
///
/// # Safety
/// `kernel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expsamp_kernel_eval(
    kernel: *const ExpsampKernel,
    u: f64,
    out: *mut f64,
) -> ExpsampStatus {
    guard(|| {
        let k = kernel_ref(kernel)?;
        let v = k.eval(u)?;
        write(out, v, "out")
    })
}

/// Support of the kernel in the logarithmic variable.
///
/// # Safety
/// `kernel` must be a live handle; `lo` and `hi` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn expsamp_kernel_log_support(
    kernel: *const ExpsampKernel,
    lo: *mut f64,
    hi: *mut f64,
) -> ExpsampStatus {
    guard(|| {
        let s = kernel_ref(kernel)?.log_support();
        if lo.is_null() || hi.is_null() {
            return Err(null("lo/hi"));
        }
        lo.write(s.lo);
        hi.write(s.hi);
        Ok(())
    })
}

/// Discrete algebraic moment `m_nu(chi, u)`.
///
/// # Safety
/// `kernel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expsamp_kernel_algebraic_moment(
    kernel: *const ExpsampKernel,
    nu: usize,
    u: f64,
    out: *mut f64,
) -> ExpsampStatus {
    guard(|| {
        let v = algebraic_moment(kernel_ref(kernel)?, nu, u)?;
        write(out, v, "out")
    })
}

/// Absolute moment `M_nu(chi)`, the supremum over `u`.
///
/// # Safety
/// `kernel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expsamp_kernel_absolute_moment(
    kernel: *const ExpsampKernel,
    nu: usize,
    out: *mut f64,
) -> ExpsampStatus {
    guard(|| {
        let v = absolute_moment_sup(kernel_ref(kernel)?, nu, DEFAULT_SUP_GRID)?;
        write(out, v, "out")
    })
}

/// Range of cell indices `k_min..=k_max` whose means are needed to evaluate
/// the operator at every point of `xs`.
///
/// # Safety
/// `xs` must point to `len` values; `k_min` and `k_max` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn expsamp_sample_window(
    kernel: *const ExpsampKernel,
    w: f64,
    xs: *const f64,
    len: usize,
    k_min: *mut i64,
    k_max: *mut i64,
) -> ExpsampStatus {
    guard(|| {
        let k = kernel_ref(kernel)?;
        if xs.is_null() {
            return Err(null("xs"));
        }
        let range = sample_window(k, w, std::slice::from_raw_parts(xs, len))?;
        write(k_min, *range.start(), "k_min")?;
        write(k_max, *range.end(), "k_max")
    })
}

/// Operator value at `x` from precomputed cell means: `means[j]` is the mean
/// of `f(e^u)` over `[(k_min + j)/w, (k_min + j + 1)/w]`.
///
/// # Safety
/// `means` must point to `len` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expsamp_apply_samples(
    kernel: *const ExpsampKernel,
    w: f64,
    k_min: i64,
    means: *const f64,
    len: usize,
    x: f64,
    out: *mut f64,
) -> ExpsampStatus {
    guard(|| {
        let k = kernel_ref(kernel)?;
        if means.is_null() {
            return Err(null("means"));
        }
        let series = SampleSeries::new(w, k_min, std::slice::from_raw_parts(means, len).to_vec())?;
        let v = apply_from_samples(&series, k, x)?;
        write(out, v, "out")
    })
}

struct Callback {
    f: extern "C" fn(f64, *mut c_void) -> f64,
    user_data: *mut c_void,
}

// The caller promises the callback may be invoked from worker threads.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl TestFunction for Callback {
    fn label(&self) -> String {
        "callback".into()
    }

    fn value(&self, x: f64) -> f64 {
        (self.f)(x, self.user_data)
    }

    fn theta(&self, order: usize, x: f64) -> Option<f64> {
        (order == 0).then(|| self.value(x))
    }

    fn max_theta_order(&self) -> usize {
        0
    }

    fn eval_interval(&self) -> (f64, f64) {
        (0.5, 3.0)
    }
}

/// `sum_i c_i (I_{iw} f)(x)` with the order-raising coefficients for `p`
/// (`p = 1` is the plain operator). Cell means are computed with
/// `quad_nodes` Gauss-Legendre nodes (0 selects the default). For `p > 1`
/// the callback may run concurrently on several threads.
///
/// # Safety
/// `f` must be safe to call with `user_data`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn expsamp_apply_function(
    kernel: *const ExpsampKernel,
    f: ExpsampFunction,
    user_data: *mut c_void,
    w: f64,
    p: usize,
    quad_nodes: usize,
    x: f64,
    out: *mut f64,
) -> ExpsampStatus {
    guard(|| {
        let k = kernel_ref(kernel)?;
        let f = f.ok_or_else(|| null("f"))?;
        let function = Callback { f, user_data };
        let nodes = if quad_nodes == 0 {
            expsamp::operator::DEFAULT_QUAD_NODES
        } else {
            quad_nodes
        };
        let cfg = OperatorConfig::new(w, nodes)?;
        let scheme = CombinationScheme::solve(p)?;
        let v = expsamp::combinations::apply_combo_with(&function, k, &scheme, &cfg, x)?;
        write(out, v, "out")
    })
}

/// Exact coefficients `c_i = numerators[i] / denominators[i]` of the
/// `p`-term order-raising combination. `capacity` is the length of both
/// arrays and must be at least `p`.
///
/// # Safety
/// Both arrays must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn expsamp_combination_coefficients(
    p: usize,
    numerators: *mut i64,
    denominators: *mut i64,
    capacity: usize,
) -> ExpsampStatus {
    guard(|| {
        let scheme = CombinationScheme::solve(p)?;
        if capacity < p {
            return Err(Failure(
                ExpsampStatus::BufferTooSmall,
                format!("need room for {p} coefficients, got {capacity}"),
            ));
        }
        if numerators.is_null() || denominators.is_null() {
            return Err(null("numerators/denominators"));
        }
        for (i, c) in scheme.coefficients().iter().enumerate() {
            let n = i64::try_from(*c.numer()).map_err(|_| {
                Failure(
                    ExpsampStatus::Internal,
                    "coefficient exceeds 64 bits".into(),
                )
            })?;
            let d = i64::try_from(*c.denom()).map_err(|_| {
                Failure(
                    ExpsampStatus::Internal,
                    "coefficient exceeds 64 bits".into(),
                )
            })?;
            numerators.add(i).write(n);
            denominators.add(i).write(d);
        }
        Ok(())
    })
}

/// Message for the most recent failure on this thread, or an empty string.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn expsamp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn expsamp_status_name(status: ExpsampStatus) -> *const c_char {
    let text: &'static CStr = match status {
        ExpsampStatus::Ok => c"ok",
        ExpsampStatus::NullPointer => c"null pointer",
        ExpsampStatus::InvalidArgument => c"invalid argument",
        ExpsampStatus::ParseError => c"parse error",
        ExpsampStatus::DomainError => c"domain error",
        ExpsampStatus::PreconditionFailed => c"precondition failed",
        ExpsampStatus::MissingSample => c"missing sample",
        ExpsampStatus::BufferTooSmall => c"buffer too small",
        ExpsampStatus::Internal => c"internal error",
        ExpsampStatus::Panic => c"panic",
    };
    text.as_ptr()
}
