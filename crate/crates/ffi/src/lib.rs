//! C ABI over the `mtrnn` crate.
//!
//! Every fallible function returns an [`MtrnnStatus`] and writes results
//! through pointer arguments. After a failure, [`mtrnn_last_error`] describes
//! it (per thread, until the next failing call). Models are opaque handles
//! released with [`mtrnn_model_free`]. Panics never cross the boundary.
//!
//! Matrices are row-major `double` arrays: `steps x channels` for sensor
//! sequences and `count x dim` for pattern sets.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mtrnn::assembly::MultiModalModel;
use mtrnn::cli::{Checkpoint, ExperimentConfig};
use mtrnn::encoders::{EncodingSpec, Lexicon};
use mtrnn::metrics::{d_rel, edit_distance};
use mtrnn::{Error, Matrix};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtrnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Checkpoint = 4,
    Config = 5,
    Data = 6,
    /// The output buffer is too small; the needed size was reported.
    BufferTooSmall = 7,
    Panic = 8,
}

/// A trained model with the encoding it was trained with.
pub struct MtrnnModel {
    model: MultiModalModel,
    encoding: EncodingSpec,
    lexicon: Lexicon,
}

/// Sizes a caller needs to prepare inputs for a model.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MtrnnDims {
    pub proprio_channels: usize,
    pub vision_channels: usize,
    pub auditory_csc: usize,
    pub somatosensory_csc: usize,
    pub visual_csc: usize,
    pub training_scenes: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type Failure = (MtrnnStatus, String);

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn from_error(e: Error) -> Failure {
    let status = match e {
        Error::Config(_) => MtrnnStatus::Config,
        Error::Argument(_) => MtrnnStatus::InvalidArgument,
        Error::Checkpoint { .. } => MtrnnStatus::Checkpoint,
        Error::Io { .. } => MtrnnStatus::Io,
        _ => MtrnnStatus::Data,
    };
    (status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MtrnnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MtrnnStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MtrnnStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (MtrnnStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (MtrnnStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn matrix(p: *const f64, rows: usize, cols: usize, what: &str) -> Result<Matrix, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let len = rows.checked_mul(cols).ok_or_else(|| (MtrnnStatus::InvalidArgument, format!("{what} size overflows")))?;
    Matrix::from_vec(rows, cols, std::slice::from_raw_parts(p, len).to_vec()).map_err(from_error)
}

/// Message of the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mtrnn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mtrnn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a checkpoint written by `mtrnn train`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mtrnn_model_load(path: *const c_char, out: *mut *mut MtrnnModel) -> MtrnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = c_str(path, "path")?;
        let ck = Checkpoint::load(Path::new(path)).map_err(from_error)?;
        let cfg = ExperimentConfig::resolve(Some(&ck.config), &[]).map_err(from_error)?;
        let handle = MtrnnModel { model: ck.model, encoding: cfg.encoding, lexicon: Lexicon::default() };
        *out = Box::into_raw(Box::new(handle));
        Ok(())
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must come from [`mtrnn_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mtrnn_model_free(model: *mut MtrnnModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mtrnn_model_dims(model: *const MtrnnModel, out: *mut MtrnnDims) -> MtrnnStatus {
    guard(|| {
        let m = &model.as_ref().ok_or_else(|| null("model"))?.model;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = MtrnnDims {
            proprio_channels: m.somatosensory.topology.io_count,
            vision_channels: m.visual.topology.io_count,
            auditory_csc: m.auditory.topology.csc_count,
            somatosensory_csc: m.somatosensory.topology.csc_count,
            visual_csc: m.visual.topology.csc_count,
            training_scenes: m.scene_ids.len(),
        };
        Ok(())
    })
}

/// Perceives a proprioceptive and a visual sequence and writes the produced
/// sentence into `text` (NUL-terminated). `needed` receives the buffer size
/// required including the NUL; with a short buffer nothing is written and
/// `MTRNN_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// The sequences must hold `steps x channels` doubles (see
/// [`mtrnn_model_dims`]); `text` must hold `capacity` bytes; `needed` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn mtrnn_model_describe(
    model: *const MtrnnModel,
    proprio: *const f64,
    proprio_steps: usize,
    vision: *const f64,
    vision_steps: usize,
    text: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> MtrnnStatus {
    guard(|| {
        let h = model.as_ref().ok_or_else(|| null("model"))?;
        let needed = needed.as_mut().ok_or_else(|| null("needed"))?;
        let m = &h.model;
        let p = matrix(proprio, proprio_steps, m.somatosensory.topology.io_count, "proprio")?;
        let v = matrix(vision, vision_steps, m.visual.topology.io_count, "vision")?;
        let produced = m.perceive_and_describe(&p, &v, &h.encoding, &h.lexicon).map_err(from_error)?;
        let bytes = produced.decoded.text.into_bytes();
        *needed = bytes.len() + 1;
        if text.is_null() || capacity < bytes.len() + 1 {
            return Err((MtrnnStatus::BufferTooSmall, format!("text needs {} bytes", bytes.len() + 1)));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), text, bytes.len());
        *text.add(bytes.len()) = 0;
        Ok(())
    })
}

/// Edit distance between two whitespace-separated token strings
/// (insertion and deletion cost 1, substitution 2).
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mtrnn_edit_distance(
    produced: *const c_char,
    target: *const c_char,
    out: *mut usize,
) -> MtrnnStatus {
    guard(|| {
        let a: Vec<&str> = c_str(produced, "produced")?.split_whitespace().collect();
        let b: Vec<&str> = c_str(target, "target")?.split_whitespace().collect();
        *out.as_mut().ok_or_else(|| null("out"))? = edit_distance(&a, &b);
        Ok(())
    })
}

/// Relative pattern distance of `count` patterns of `dim` values. A set with
/// a zero pair distance gives 0.
///
/// # Safety
/// `patterns` must hold `count * dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mtrnn_d_rel(patterns: *const f64, count: usize, dim: usize, out: *mut f64) -> MtrnnStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = matrix(patterns, count, dim, "patterns")?;
        *out = d_rel(&m.to_rows()).map_err(from_error)?.value;
        Ok(())
    })
}
