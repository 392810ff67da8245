//! C interface to lexlab.
//!
//! Every function returns a [`LexlabStatus`]; results come back through out
//! pointers. On failure, [`lexlab_last_error`] describes what went wrong on
//! the calling thread. Objects are opaque handles released with their own
//! `_free` function. Strings returned to the caller are released with
//! [`lexlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lexlab::acquisition::{
    acquire_function_content, threshold_classify, AcquiredClass, AcquisitionParams, LabelMint, PerMil,
};
use lexlab::avm::{parse_structure, subsumes, unify, FeatureStructure};
use lexlab::daughter::{DaughterLexicon, WordClass};
use lexlab::evaluation::{fisher_exact_two_tailed, ContingencyTable2x2};
use lexlab::runner::{load_config, run_experiment};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnifyFailure = 4,
    InvalidArgument = 5,
    ConfigError = 6,
    PipelineError = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexlabClass {
    Unknown = 0,
    Functional = 1,
    Content = 2,
}

impl From<WordClass> for LexlabClass {
    fn from(c: WordClass) -> Self {
        match c {
            WordClass::Functional => LexlabClass::Functional,
            WordClass::Content => LexlabClass::Content,
            WordClass::Unknown => LexlabClass::Unknown,
        }
    }
}

/// A parsed feature structure.
pub struct LexlabFeatureStructure(FeatureStructure);

/// A daughter lexicon with its label mint.
pub struct LexlabDaughter {
    lexicon: DaughterLexicon,
    mint: LabelMint,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("NULs removed")));
}

struct Fail(LexlabStatus, String);

fn fail(status: LexlabStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LexlabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LexlabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LexlabStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(LexlabStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(LexlabStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(LexlabStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(LexlabStatus::NullPointer, format!("{name} is null")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NULs removed").into_raw()
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next lexlab call on the same thread.
#[no_mangle]
pub extern "C" fn lexlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn lexlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses bracket notation, e.g. `[CAT:det, NUMBER:?N]`.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_fs_parse(src: *const c_char, out: *mut *mut LexlabFeatureStructure) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let fs = parse_structure(str_arg(src, "src")?).map_err(|e| fail(LexlabStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(LexlabFeatureStructure(fs)));
        Ok(())
    })
}

/// # Safety
/// `fs` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn lexlab_fs_free(fs: *mut LexlabFeatureStructure) {
    if !fs.is_null() {
        drop(Box::from_raw(fs));
    }
}

/// Renders a structure in bracket notation.
///
/// # Safety
/// `fs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_fs_to_string(fs: *const LexlabFeatureStructure, out: *mut *mut c_char) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = c_string(ref_arg(fs, "fs")?.0.to_string());
        Ok(())
    })
}

/// Unifies two structures. On conflict returns `UNIFY_FAILURE`; the error
/// message names the failing path.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_fs_unify(
    a: *const LexlabFeatureStructure,
    b: *const LexlabFeatureStructure,
    out: *mut *mut LexlabFeatureStructure,
) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let u = unify(&ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0)
            .map_err(|e| fail(LexlabStatus::UnifyFailure, e.to_string()))?;
        *out = Box::into_raw(Box::new(LexlabFeatureStructure(u.structure)));
        Ok(())
    })
}

/// # Safety
/// `general` and `specific` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_fs_subsumes(
    general: *const LexlabFeatureStructure,
    specific: *const LexlabFeatureStructure,
    out: *mut bool,
) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = subsumes(&ref_arg(general, "general")?.0, &ref_arg(specific, "specific")?.0);
        Ok(())
    })
}

fn per_mil(num: u64, den: u64) -> Result<PerMil, Fail> {
    PerMil::new(num, den).map_err(|e| fail(LexlabStatus::InvalidArgument, e.to_string()))
}

/// Classifies a word with frequency `f` out of `total` tokens against a
/// threshold of `threshold_num / threshold_den` per mil.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_threshold_classify(
    f: u64,
    total: u64,
    threshold_num: u64,
    threshold_den: u64,
    out: *mut LexlabClass,
) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if f == 0 || f > total {
            return Err(fail(LexlabStatus::InvalidArgument, "need 1 <= f <= total"));
        }
        *out = match threshold_classify(f, total, per_mil(threshold_num, threshold_den)?) {
            AcquiredClass::Functional => LexlabClass::Functional,
            AcquiredClass::Content => LexlabClass::Content,
        };
        Ok(())
    })
}

/// Two-sided Fisher exact test on `[[a, b], [c, d]]`. A zero row or column
/// gives p = 1.
///
/// # Safety
/// `out_p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_fisher_exact(a: u64, b: u64, c: u64, d: u64, out_p: *mut f64) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out_p, "out_p")?;
        let r = fisher_exact_two_tailed(&ContingencyTable2x2::new(a, b, c, d))
            .map_err(|e| fail(LexlabStatus::InvalidArgument, e.to_string()))?;
        *out = r.p;
        Ok(())
    })
}

/// A new, empty daughter lexicon.
#[no_mangle]
pub extern "C" fn lexlab_daughter_new(session_id: u64) -> *mut LexlabDaughter {
    Box::into_raw(Box::new(LexlabDaughter { lexicon: DaughterLexicon::new(session_id), mint: LabelMint::new() }))
}

/// # Safety
/// `d` must come from [`lexlab_daughter_new`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn lexlab_daughter_free(d: *mut LexlabDaughter) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Ingests one utterance of `n` tokens.
///
/// # Safety
/// `d` must be a live handle; `tokens` must point to `n` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn lexlab_daughter_ingest(
    d: *mut LexlabDaughter,
    tokens: *const *const c_char,
    n: usize,
) -> LexlabStatus {
    guard(|| {
        let d = out_arg(d, "daughter")?;
        if tokens.is_null() {
            return Err(fail(LexlabStatus::NullPointer, "tokens is null"));
        }
        let words = std::slice::from_raw_parts(tokens, n)
            .iter()
            .map(|&t| str_arg(t, "token"))
            .collect::<Result<Vec<_>, _>>()?;
        d.lexicon.ingest_utterance(&words).map_err(|e| fail(LexlabStatus::InvalidArgument, e.to_string()))
    })
}

/// Attempts function/content acquisition. `out_fired` reports whether it
/// fired on this call.
///
/// # Safety
/// `d` must be a live handle; `out_fired` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_daughter_acquire(
    d: *mut LexlabDaughter,
    min_exemplars: u64,
    threshold_num: u64,
    threshold_den: u64,
    out_fired: *mut bool,
) -> LexlabStatus {
    guard(|| {
        let d = out_arg(d, "daughter")?;
        let out = out_arg(out_fired, "out_fired")?;
        let params = AcquisitionParams {
            min_exemplars,
            threshold: per_mil(threshold_num, threshold_den)?,
            ..AcquisitionParams::default()
        };
        let r = acquire_function_content(&mut d.lexicon, &params, &mut d.mint)
            .map_err(|e| fail(LexlabStatus::InvalidArgument, e.to_string()))?;
        *out = r.fired;
        Ok(())
    })
}

/// # Safety
/// `d` must be a live handle; `phonform` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_daughter_classify(
    d: *const LexlabDaughter,
    phonform: *const c_char,
    out: *mut LexlabClass,
) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ref_arg(d, "daughter")?.lexicon.classify_word(str_arg(phonform, "phonform")?).into();
        Ok(())
    })
}

/// The lexicon as JSON lines.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_daughter_dump(d: *const LexlabDaughter, out: *mut *mut c_char) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = c_string(ref_arg(d, "daughter")?.lexicon.to_jsonl());
        Ok(())
    })
}

/// Runs an experiment from config text (`key = value` lines) and returns
/// its log as JSON. Relative paths are taken relative to the working
/// directory.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexlab_run_experiment(config: *const c_char, out_json: *mut *mut c_char) -> LexlabStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let cfg =
            load_config(str_arg(config, "config")?).map_err(|e| fail(LexlabStatus::ConfigError, e.to_string()))?;
        let outcome = run_experiment(&cfg).map_err(|e| {
            let status = if e.is_config_error() { LexlabStatus::ConfigError } else { LexlabStatus::PipelineError };
            fail(status, e.to_string())
        })?;
        let json = serde_json::to_string(&outcome.log).map_err(|e| fail(LexlabStatus::PipelineError, e.to_string()))?;
        *out = c_string(json);
        Ok(())
    })
}
