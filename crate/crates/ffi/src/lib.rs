//! C ABI for `luinv`.
//!
//! Every function returns an [`LuStatus`]. On failure a message is available
//! from [`lu_last_error`] on the same thread. Objects are opaque handles that
//! must be released with their `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use luinv::decomposition::{fidelity, mps_factor, mps_reconstruct, MpsChain, TruncationPolicy};
use luinv::entropy::{renyi, von_neumann, Spectrum};
use luinv::invariant::{canonicalize, enumerate_invariants, evaluate_fast, verify_invariance, PermTuple};
use luinv::state::{load_state, partial_trace, random_density, random_pure_state, save_state, QuantumState};
use luinv::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LuStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Parse = 4,
    Io = 5,
    Validation = 6,
    Numerical = 7,
    Label = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// A pure state or density operator.
pub struct LuState(QuantumState);

/// A permutation-tuple label.
pub struct LuLabel(PermTuple);

/// A matrix product state.
pub struct LuChain(MpsChain);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LuStatus {
    match e {
        Error::Shape(_) | Error::DimensionMismatch { .. } | Error::DuplicateLeg(_) => LuStatus::Shape,
        Error::InvalidPermutation(_) | Error::Label(_) => LuStatus::Label,
        Error::InvalidArgument(_) => LuStatus::InvalidArgument,
        Error::NonFinite | Error::Numerical(_) => LuStatus::Numerical,
        Error::Validation { .. } => LuStatus::Validation,
        Error::Parse(_) => LuStatus::Parse,
        Error::Io(_) => LuStatus::Io,
    }
}

struct Fail(LuStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LuStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LuStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LuStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LuStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LuStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Copies `values` into `buf`, always reporting the full length in `out_len`.
unsafe fn fill<T: Copy>(values: &[T], buf: *mut T, cap: usize, out_len: *mut usize) -> Result<(), Fail> {
    write(out_len, values.len(), "out_len")?;
    if values.len() > cap {
        return Err(Fail(
            LuStatus::BufferTooSmall,
            format!("need {} elements, have {cap}", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn lu_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads and validates a state file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_state_load(path: *const c_char, out: *mut *mut LuState) -> LuStatus {
    guard(|| {
        let state = load_state(text(path, "path")?)?;
        write(out, boxed(LuState(state)), "out")
    })
}

/// # Safety
/// `state` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lu_state_save(state: *const LuState, path: *const c_char) -> LuStatus {
    guard(|| {
        save_state(&borrow(state, "state")?.0, text(path, "path")?)?;
        Ok(())
    })
}

/// Seeded random pure state, or a random density operator if `density` is nonzero.
///
/// # Safety
/// `dims` must point to `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_state_random(
    dims: *const usize,
    n: usize,
    seed: u64,
    density: i32,
    out: *mut *mut LuState,
) -> LuStatus {
    guard(|| {
        let dims = slice(dims, n, "dims")?;
        let state = if density != 0 {
            QuantumState::density(dims.to_vec(), random_density(dims, seed)?)?
        } else {
            QuantumState::pure(random_pure_state(dims, seed)?)?
        };
        write(out, boxed(LuState(state)), "out")
    })
}

/// Writes the subsystem dimensions into `buf`.
///
/// # Safety
/// `state` must be a live handle; `buf` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn lu_state_dims(
    state: *const LuState,
    buf: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> LuStatus {
    guard(|| fill(borrow(state, "state")?.0.dims(), buf, cap, out_len))
}

/// Sets `out` to 1 for a pure state, 0 for a density operator.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lu_state_is_pure(state: *const LuState, out: *mut i32) -> LuStatus {
    guard(|| {
        let pure = matches!(borrow(state, "state")?.0, QuantumState::Pure { .. });
        write(out, pure as i32, "out")
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lu_state_free(state: *mut LuState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Parses a label such as `"3; (123) | (12)"`.
///
/// # Safety
/// `label` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_label_parse(label: *const c_char, out: *mut *mut LuLabel) -> LuStatus {
    guard(|| {
        let t: PermTuple = text(label, "label")?.parse()?;
        write(out, boxed(LuLabel(t)), "out")
    })
}

/// Canonical representative of the label's class.
///
/// # Safety
/// `label` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_label_canonical(label: *const LuLabel, out: *mut *mut LuLabel) -> LuStatus {
    guard(|| {
        let t = canonicalize(&borrow(label, "label")?.0);
        write(out, boxed(LuLabel(t)), "out")
    })
}

/// Writes the label text including its NUL terminator; `out_len` receives the
/// required size in bytes.
///
/// # Safety
/// `label` must be a live handle; `buf` must hold `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn lu_label_to_string(
    label: *const LuLabel,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> LuStatus {
    guard(|| {
        let s = CString::new(borrow(label, "label")?.0.to_string()).expect("labels have no NUL");
        let bytes: Vec<c_char> = s.as_bytes_with_nul().iter().map(|&b| b as c_char).collect();
        fill(&bytes, buf, cap, out_len)
    })
}

/// # Safety
/// `label` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lu_label_free(label: *mut LuLabel) {
    if !label.is_null() {
        drop(Box::from_raw(label));
    }
}

/// Number of canonical classes for `n` subsystems at degree `k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_invariant_class_count(n: usize, k: usize, out: *mut usize) -> LuStatus {
    guard(|| write(out, enumerate_invariants(n, k)?.len(), "out"))
}

/// Invariant value on the state.
///
/// # Safety
/// Handles must be live; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_invariant_eval(
    state: *const LuState,
    label: *const LuLabel,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LuStatus {
    guard(|| {
        let state = &borrow(state, "state")?.0;
        let v = evaluate_fast(&borrow(label, "label")?.0, &state.to_density(), state.dims())?;
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// Largest relative deviation under `trials` random local unitaries.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_invariant_verify(
    state: *const LuState,
    label: *const LuLabel,
    trials: usize,
    seed: u64,
    out: *mut f64,
) -> LuStatus {
    guard(|| {
        let state = &borrow(state, "state")?.0;
        let dev = verify_invariance(
            &borrow(label, "label")?.0,
            &state.to_density(),
            state.dims(),
            trials,
            seed,
        )?;
        write(out, dev, "out")
    })
}

unsafe fn reduced_spectrum(state: *const LuState, keep: *const usize, nkeep: usize) -> Result<Spectrum, Fail> {
    let state = &borrow(state, "state")?.0;
    let keep = slice(keep, nkeep, "keep")?;
    let reduced = partial_trace(&state.to_density(), state.dims(), keep)?;
    Ok(Spectrum::from_density(&reduced)?)
}

/// Rényi entropy of order `alpha` of the subsystems in `keep`.
///
/// # Safety
/// `state` must be live; `keep` must point to `nkeep` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lu_entropy_renyi(
    state: *const LuState,
    keep: *const usize,
    nkeep: usize,
    alpha: f64,
    out: *mut f64,
) -> LuStatus {
    guard(|| {
        let spectrum = reduced_spectrum(state, keep, nkeep)?;
        write(out, renyi(&spectrum, alpha)?, "out")
    })
}

/// Von Neumann entropy of the subsystems in `keep`.
///
/// # Safety
/// As for [`lu_entropy_renyi`].
#[no_mangle]
pub unsafe extern "C" fn lu_entropy_von_neumann(
    state: *const LuState,
    keep: *const usize,
    nkeep: usize,
    out: *mut f64,
) -> LuStatus {
    guard(|| {
        let spectrum = reduced_spectrum(state, keep, nkeep)?;
        write(out, von_neumann(&spectrum), "out")
    })
}

/// Factors a pure state. `max_chi == 0` and `cutoff <= 0` disable the
/// respective truncation; setting both is an error.
///
/// # Safety
/// `state` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_mps_factor(
    state: *const LuState,
    max_chi: usize,
    cutoff: f64,
    out: *mut *mut LuChain,
) -> LuStatus {
    guard(|| {
        let QuantumState::Pure { psi, .. } = &borrow(state, "state")?.0 else {
            return Err(Fail(
                LuStatus::InvalidArgument,
                "factorization needs a pure state".into(),
            ));
        };
        let policy = match (max_chi, cutoff > 0.0) {
            (0, false) => TruncationPolicy::none(),
            (chi, false) => TruncationPolicy::max_chi(chi),
            (0, true) => TruncationPolicy::cutoff(cutoff),
            _ => return Err(Fail(LuStatus::InvalidArgument, "give either max_chi or cutoff".into())),
        };
        write(out, boxed(LuChain(mps_factor(psi, &policy)?)), "out")
    })
}

/// Number of sites.
///
/// # Safety
/// `chain` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_chain_len(chain: *const LuChain, out: *mut usize) -> LuStatus {
    guard(|| write(out, borrow(chain, "chain")?.0.len(), "out"))
}

/// Singular values across bond `bond` (between sites `bond` and `bond + 1`).
///
/// # Safety
/// `chain` must be live; `buf` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn lu_chain_bond_sigmas(
    chain: *const LuChain,
    bond: usize,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> LuStatus {
    guard(|| {
        let sigmas = borrow(chain, "chain")?.0.bond_sigmas();
        let Some(s) = sigmas.get(bond) else {
            return Err(Fail(
                LuStatus::InvalidArgument,
                format!("bond {bond} out of range 0..{}", sigmas.len()),
            ));
        };
        fill(s, buf, cap, out_len)
    })
}

/// Fidelity between the reconstructed chain and a pure state.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_chain_fidelity(chain: *const LuChain, state: *const LuState, out: *mut f64) -> LuStatus {
    guard(|| {
        let QuantumState::Pure { psi, .. } = &borrow(state, "state")?.0 else {
            return Err(Fail(LuStatus::InvalidArgument, "fidelity needs a pure state".into()));
        };
        let rebuilt = mps_reconstruct(&borrow(chain, "chain")?.0)?;
        write(out, fidelity(psi, &rebuilt)?, "out")
    })
}

/// # Safety
/// `chain` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lu_chain_free(chain: *mut LuChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}
