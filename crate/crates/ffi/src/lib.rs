//! C ABI for `pconc`.
//!
//! States and reports are opaque handles created by `pc_*` constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PcStatus`] and writes results through out-pointers; on failure
//! [`pc_last_error_message`] describes what went wrong on the calling thread.
//! Strings returned by the library must be released with [`pc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pconc::io::StateFile;
use pconc::measures::{eof_pure, i_concurrence, purity, wootters_concurrence, StateRef};
use pconc::states::{make_max_entangled, make_spdc_qudit, make_spdc_qutrit, SpdcParams};
use pconc::tomography::budget;
use pconc::witness::{count_subspaces, pconcurrence_search, SearchMode, WitnessReport};
use pconc::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input is not a valid quantum state (normalization, trace, positivity).
    InvalidState = 3,
    Json = 4,
    Numerical = 5,
    Panic = 6,
}

/// How the subspace pairing is chosen.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcSearchMode {
    Known = 0,
    BruteForce = 1,
    Assignment = 2,
    Auto = 3,
}

impl From<PcSearchMode> for SearchMode {
    fn from(m: PcSearchMode) -> Self {
        match m {
            PcSearchMode::Known => SearchMode::Known,
            PcSearchMode::BruteForce => SearchMode::BruteForce,
            PcSearchMode::Assignment => SearchMode::Assignment,
            PcSearchMode::Auto => SearchMode::Auto,
        }
    }
}

/// Bipartite state (ket or density matrix).
pub struct PcState {
    inner: StateFile,
}

/// Witness report: matched subspaces and their product.
pub struct PcReport {
    inner: WitnessReport,
}

/// One matched subspace of a report.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PcSubspaceRow {
    pub a_lo: usize,
    pub a_hi: usize,
    pub b_lo: usize,
    pub b_hi: usize,
    pub concurrence: f64,
    pub fidelity: f64,
    pub weight: f64,
}

/// Measurement budget of the subspace witness vs full tomography.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PcBudget {
    pub d: usize,
    pub k: usize,
    pub pconc_measurements: u64,
    pub qst_measurements: u64,
    pub pconc_hours: f64,
    pub qst_hours: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PcStatus {
    match e {
        Error::NotHermitian { .. }
        | Error::NotPsd { .. }
        | Error::Trace { .. }
        | Error::NotNormalized { .. }
        | Error::NonFinite(_)
        | Error::NotPure { .. } => PcStatus::InvalidState,
        Error::Json(_) => PcStatus::Json,
        Error::RankDeficient { .. } | Error::NoConvergence { .. } => PcStatus::Numerical,
        _ => PcStatus::InvalidArgument,
    }
}

struct Failure(PcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            PcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("json has no nul").into_raw()
}

unsafe fn new_state(out: *mut *mut PcState, f: impl FnOnce() -> Result<StateFile, Failure>) -> PcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = Box::new(PcState { inner: f()? });
        out.write(Box::into_raw(s));
        Ok(())
    })
}

/// Message for the last failed call on this thread ("" after a success).
/// Valid until the next `pc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a state file (`{"type", "dimA", "dimB", "data"}`).
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_state_from_json(json: *const c_char, out: *mut *mut PcState) -> PcStatus {
    new_state(out, || {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(PcStatus::InvalidArgument, format!("json is not utf-8: {e}")))?;
        Ok(StateFile::from_json_str(s)?)
    })
}

/// SPDC qutrit ket with amplitudes proportional to `(alpha, 1, beta)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_state_spdc_qutrit(alpha: f64, beta: f64, out: *mut *mut PcState) -> PcStatus {
    new_state(out, || Ok(StateFile::Ket(make_spdc_qutrit(SpdcParams::new(alpha, beta)?))))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_state_max_entangled(d: usize, out: *mut *mut PcState) -> PcStatus {
    new_state(out, || Ok(StateFile::Ket(make_max_entangled(d)?)))
}

/// Qudit ket with a Gaussian OAM spectrum of width `decay`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_state_spdc_qudit(d: usize, decay: f64, out: *mut *mut PcState) -> PcStatus {
    new_state(out, || Ok(StateFile::Ket(make_spdc_qudit(d, decay)?)))
}

/// # Safety
/// `s` must come from a `pc_state_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pc_state_free(s: *mut PcState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live state; `dim_a` and `dim_b` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_state_dims(s: *const PcState, dim_a: *mut usize, dim_b: *mut usize) -> PcStatus {
    guard(|| {
        let (a, b) = deref(s, "state")?.inner.dims();
        write_out(dim_a, a)?;
        write_out(dim_b, b)
    })
}

/// Serializes a state; release the result with [`pc_string_free`].
///
/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_state_to_json(s: *const PcState, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        let json = deref(s, "state")?.inner.to_json_string();
        write_out(out, into_c_string(json))
    })
}

unsafe fn state_value(s: *const PcState, out: *mut f64, f: impl FnOnce(&StateFile) -> pconc::Result<f64>) -> PcStatus {
    guard(|| {
        let v = f(&deref(s, "state")?.inner)?;
        write_out(out, v)
    })
}

fn state_ref(f: &StateFile) -> StateRef<'_> {
    match f {
        StateFile::Ket(k) => k.into(),
        StateFile::Density(r) => r.into(),
    }
}

/// Wootters concurrence of a two-qubit state.
///
/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_wootters_concurrence(s: *const PcState, out: *mut f64) -> PcStatus {
    state_value(s, out, |f| wootters_concurrence(&f.to_density()))
}

/// I-concurrence of a pure state (unnormalized).
///
/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_i_concurrence(s: *const PcState, out: *mut f64) -> PcStatus {
    state_value(s, out, |f| i_concurrence(state_ref(f)))
}

/// Entanglement entropy of a pure state in bits.
///
/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_eof_pure(s: *const PcState, out: *mut f64) -> PcStatus {
    state_value(s, out, |f| eof_pure(state_ref(f)))
}

/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_purity(s: *const PcState, out: *mut f64) -> PcStatus {
    state_value(s, out, |f| Ok(purity(&f.to_density())))
}

/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_pconcurrence(s: *const PcState, mode: PcSearchMode, out: *mut f64) -> PcStatus {
    state_value(s, out, |f| Ok(pconcurrence_search(&f.to_density(), mode.into())?.pconcurrence))
}

/// Full witness report; release with [`pc_report_free`].
///
/// # Safety
/// `s` must be a live state; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_witness_report(s: *const PcState, mode: PcSearchMode, out: *mut *mut PcReport) -> PcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = pconcurrence_search(&deref(s, "state")?.inner.to_density(), mode.into())?;
        out.write(Box::into_raw(Box::new(PcReport { inner })));
        Ok(())
    })
}

/// # Safety
/// `r` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_report_pconcurrence(r: *const PcReport, out: *mut f64) -> PcStatus {
    guard(|| write_out(out, deref(r, "report")?.inner.pconcurrence))
}

/// Number of matched subspaces.
///
/// # Safety
/// `r` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_report_len(r: *const PcReport, out: *mut usize) -> PcStatus {
    guard(|| write_out(out, deref(r, "report")?.inner.subspace_rows.len()))
}

/// # Safety
/// `r` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_report_row(r: *const PcReport, index: usize, out: *mut PcSubspaceRow) -> PcStatus {
    guard(|| {
        let rows = &deref(r, "report")?.inner.subspace_rows;
        let row = rows.get(index).ok_or_else(|| {
            Failure(PcStatus::InvalidArgument, format!("row {index} out of range (report has {})", rows.len()))
        })?;
        write_out(
            out,
            PcSubspaceRow {
                a_lo: row.a.lo(),
                a_hi: row.a.hi(),
                b_lo: row.b.lo(),
                b_hi: row.b.hi(),
                concurrence: row.concurrence,
                fidelity: row.fidelity,
                weight: row.weight,
            },
        )
    })
}

/// Report JSON; release the result with [`pc_string_free`].
///
/// # Safety
/// `r` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_report_to_json(r: *const PcReport, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        let json = deref(r, "report")?.inner.to_json_string();
        write_out(out, into_c_string(json))
    })
}

/// # Safety
/// `r` must come from [`pc_witness_report`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pc_report_free(r: *mut PcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `d(d-1)/2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_count_subspaces(d: usize, out: *mut usize) -> PcStatus {
    guard(|| write_out(out, count_subspaces(d)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_budget(d: usize, integration_time_s: f64, out: *mut PcBudget) -> PcStatus {
    guard(|| {
        let b = budget(d, integration_time_s)?;
        write_out(
            out,
            PcBudget {
                d: b.d,
                k: b.k,
                pconc_measurements: b.pconc_measurements,
                qst_measurements: b.qst_measurements,
                pconc_hours: b.pconc_hours(),
                qst_hours: b.qst_hours(),
            },
        )
    })
}
