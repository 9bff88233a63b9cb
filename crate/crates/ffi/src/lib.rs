//! C ABI for the path-checking engines.
//!
//! All objects cross the boundary as opaque pointers created and destroyed
//! here; functions return `1` for satisfied, `0` for unsatisfied, and a
//! negative [`PcStatus`] code on failure, with a per-thread error message
//! available through [`pc_last_error`].

use pathcheck::checker::{check_with_engine, Engine, WordSource};
use pathcheck::dataword::{parse_word, WordInput};
use pathcheck::docm::{parse_ocm, Ocm};
use pathcheck::formula::{parse as parse_formula, Formula};
use pathcheck::slp::parse_slp;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes returned by the checking entry points. Non-negative values
/// are verdicts.
#[repr(C)]
pub enum PcStatus {
    /// The word satisfies the formula.
    PcSat = 1,
    /// The word does not satisfy the formula.
    PcUnsat = 0,
    /// A parse error; see `pc_last_error`.
    PcErrParse = -1,
    /// A null pointer or invalid handle was passed.
    PcErrArgument = -2,
    /// The selected engine cannot handle the input.
    PcErrUnsupported = -3,
    /// The engine panicked on out-of-range inputs.
    PcErrInternal = -4,
}

/// Engine selector mirroring the library's `--engine` flag.
#[repr(C)]
#[derive(Clone, Copy)]
pub enum PcEngine {
    PcEngineAuto = 0,
    PcEngineNaive = 1,
    PcEngineFinite = 2,
    PcEnginePeriodic = 3,
    PcEngineSlp = 4,
    PcEngineTptl1 = 5,
    PcEngineQuasimono = 6,
}

/// An opaque data word in any supported representation.
pub struct PcWord {
    source: WordSource,
}

/// An opaque parsed formula.
pub struct PcFormula {
    formula: Formula,
}

/// An opaque one-counter machine.
pub struct PcOcm {
    machine: Ocm,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn c_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().ok()
}

/// Returns the error message of the last failing call on this thread, or
/// null. The string is owned by the library and valid until the next
/// failing call.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a word in the `word finite`, `word periodic` or `slp` text
/// format. Returns null on failure.
#[no_mangle]
pub extern "C" fn pc_word_parse(text: *const c_char) -> *mut PcWord {
    let Some(text) = c_str(text) else {
        set_error("null or non-UTF-8 word text".to_string());
        return ptr::null_mut();
    };
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    let source = if header.starts_with("slp") {
        match parse_slp(text) {
            Ok(g) => WordSource::SlpFinite(g),
            Err(e) => {
                set_error(e.to_string());
                return ptr::null_mut();
            }
        }
    } else {
        match parse_word(text) {
            Ok(WordInput::Finite(w)) => WordSource::Finite(w),
            Ok(WordInput::Periodic(w)) => WordSource::Periodic(w),
            Err(e) => {
                set_error(e.to_string());
                return ptr::null_mut();
            }
        }
    };
    Box::into_raw(Box::new(PcWord { source }))
}

/// Frees a word handle. Null is ignored.
///
/// # Safety
/// `word` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pc_word_free(word: *mut PcWord) {
    if !word.is_null() {
        drop(unsafe { Box::from_raw(word) });
    }
}

/// Parses a formula in the ASCII grammar. Returns null on failure.
#[no_mangle]
pub extern "C" fn pc_formula_parse(text: *const c_char) -> *mut PcFormula {
    let Some(text) = c_str(text) else {
        set_error("null or non-UTF-8 formula text".to_string());
        return ptr::null_mut();
    };
    match parse_formula(text.trim()) {
        Ok(formula) => Box::into_raw(Box::new(PcFormula { formula })),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Frees a formula handle. Null is ignored.
///
/// # Safety
/// `formula` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pc_formula_free(formula: *mut PcFormula) {
    if !formula.is_null() {
        drop(unsafe { Box::from_raw(formula) });
    }
}

/// Parses a machine in the `ocm unary|binary` text format. Returns null on
/// failure.
#[no_mangle]
pub extern "C" fn pc_ocm_parse(text: *const c_char) -> *mut PcOcm {
    let Some(text) = c_str(text) else {
        set_error("null or non-UTF-8 machine text".to_string());
        return ptr::null_mut();
    };
    match parse_ocm(text) {
        Ok(machine) => Box::into_raw(Box::new(PcOcm { machine })),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Frees a machine handle. Null is ignored.
///
/// # Safety
/// `ocm` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pc_ocm_free(ocm: *mut PcOcm) {
    if !ocm.is_null() {
        drop(unsafe { Box::from_raw(ocm) });
    }
}

fn engine_of(engine: c_int) -> Option<Engine> {
    Some(match engine {
        0 => Engine::Auto,
        1 => Engine::Naive,
        2 => Engine::Finite,
        3 => Engine::Periodic,
        4 => Engine::Slp,
        5 => Engine::Tptl1,
        6 => Engine::Quasimono,
        _ => return None,
    })
}

/// Checks a word against a formula with the selected engine. Returns 1
/// when satisfied, 0 when not, and a negative status code on failure.
///
/// # Safety
/// `word` and `formula` must be live handles from this library.
#[no_mangle]
pub unsafe extern "C" fn pc_check(
    word: *const PcWord,
    formula: *const PcFormula,
    engine: c_int,
) -> c_int {
    let (Some(word), Some(formula)) = (unsafe { word.as_ref() }, unsafe { formula.as_ref() })
    else {
        set_error("null handle".to_string());
        return PcStatus::PcErrArgument as c_int;
    };
    let Some(engine) = engine_of(engine) else {
        set_error(format!("unknown engine selector {engine}"));
        return PcStatus::PcErrArgument as c_int;
    };
    let result = catch_unwind(AssertUnwindSafe(|| {
        check_with_engine(engine, &word.source, &formula.formula)
    }));
    match result {
        Ok(Ok(v)) => {
            if v.satisfied {
                PcStatus::PcSat as c_int
            } else {
                PcStatus::PcUnsat as c_int
            }
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            PcStatus::PcErrUnsupported as c_int
        }
        Err(_) => {
            set_error("engine panicked; input out of supported range".to_string());
            PcStatus::PcErrInternal as c_int
        }
    }
}

/// Extracts the machine's computation and checks it against the formula.
/// Returns 1/0 verdicts and negative status codes as in [`pc_check`].
///
/// # Safety
/// `ocm` and `formula` must be live handles from this library.
#[no_mangle]
pub unsafe extern "C" fn pc_ocm_check(ocm: *const PcOcm, formula: *const PcFormula) -> c_int {
    let (Some(ocm), Some(formula)) = (unsafe { ocm.as_ref() }, unsafe { formula.as_ref() }) else {
        set_error("null handle".to_string());
        return PcStatus::PcErrArgument as c_int;
    };
    let result = catch_unwind(AssertUnwindSafe(|| {
        ocm.machine.model_check(&formula.formula)
    }));
    match result {
        Ok(Ok(v)) => {
            if v.satisfied {
                PcStatus::PcSat as c_int
            } else {
                PcStatus::PcUnsat as c_int
            }
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            PcStatus::PcErrUnsupported as c_int
        }
        Err(_) => {
            set_error("engine panicked; input out of supported range".to_string());
            PcStatus::PcErrInternal as c_int
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn roundtrip_through_the_c_surface() {
        let word =
            pc_word_parse(cstr("word periodic offset=1\nprefix:\n{} 0\nperiod:\n{} 1\n").as_ptr());
        assert!(!word.is_null());
        let sat = pc_formula_parse(cstr("x.(F(x = 5))").as_ptr());
        let unsat = pc_formula_parse(cstr("F(x = -1)").as_ptr());
        unsafe {
            assert_eq!(pc_check(word, sat, 0), 1);
            assert_eq!(pc_check(word, sat, 3), 1);
            assert_eq!(pc_check(word, unsat, 0), 0);
            pc_formula_free(sat);
            pc_formula_free(unsat);
            pc_word_free(word);
        }
    }

    #[test]
    fn errors_set_messages() {
        let bad = pc_formula_parse(cstr("F(x = ").as_ptr());
        assert!(bad.is_null());
        let msg = pc_last_error();
        assert!(!msg.is_null());
        let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap();
        assert!(text.contains("syntax"));

        let word = pc_word_parse(cstr("word finite\n{} 1\n{} 3\n").as_ptr());
        let f = pc_formula_parse(cstr("x.(X(x = 2))").as_ptr());
        unsafe {
            assert_eq!(pc_check(word, f, 99), PcStatus::PcErrArgument as c_int);
            assert_eq!(
                pc_check(std::ptr::null(), f, 0),
                PcStatus::PcErrArgument as c_int
            );
            assert_eq!(pc_check(word, f, 0), 1);
            pc_word_free(word);
            pc_formula_free(f);
        }
    }

    #[test]
    fn machine_checking() {
        let m = pc_ocm_parse(cstr("ocm unary\ninit q0\nq0 add(1) q0\n").as_ptr());
        assert!(!m.is_null());
        let f = pc_formula_parse(cstr("G(x >= 0)").as_ptr());
        unsafe {
            assert_eq!(pc_ocm_check(m, f), 1);
            pc_ocm_free(m);
            pc_formula_free(f);
        }
    }
}
