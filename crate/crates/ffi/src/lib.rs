//! C ABI over the `hocomp` core.
//!
//! Terms and oracle tables cross the boundary as opaque handles owned by the
//! caller and released with the matching `_free` function. Every fallible
//! call returns an [`HcStatus`]; on anything but `HC_STATUS_OK` the message
//! is available from [`hc_last_error_message`] on the same thread. Strings
//! handed out by the library are released with [`hc_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hocomp::domains::FinModel;
use hocomp::optree::{check_equiv, eval_op, Model, Outcome, Verdict};
use hocomp::oracles::OracleTable;
use hocomp::syntax::{parse, parse_type, typecheck, Term};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    TypeError = 4,
    EvalError = 5,
    OracleError = 6,
    BudgetExceeded = 7,
    Panic = 8,
}

/// How a run ended.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcOutcomeKind {
    Value = 0,
    NoValueWithinFuel = 1,
    OracleRefusal = 2,
    Overflow = 3,
    StuckIllTyped = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcVerdict {
    Agree = 0,
    Disagree = 1,
    InconclusiveFuel = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HcOutcome {
    pub kind: HcOutcomeKind,
    /// The value for `VALUE`, the fuel for `NO_VALUE_WITHIN_FUEL`, else 0.
    pub value: u64,
    pub steps: u64,
    /// Nonzero if some oracle answered from a bounded search.
    pub approximate: u8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HcEquivReport {
    pub verdict: HcVerdict,
    /// Nonzero if the denotation is a number.
    pub has_denotation: u8,
    pub denotation: u32,
    pub operational: HcOutcome,
}

/// A parsed term.
pub struct HcTerm(Term);

/// A table of oracle plugins with their configuration.
pub struct HcOracles(OracleTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let s = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

type Res<T> = Result<T, (HcStatus, String)>;

/// Runs `f`, records the error message and turns panics into a status.
fn guard(f: impl FnOnce() -> Res<()>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return Err((HcStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (HcStatus::InvalidUtf8, e.to_string()))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| (HcStatus::NullArgument, format!("null {what}")))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Res<&'a mut T> {
    p.as_mut().ok_or_else(|| (HcStatus::NullArgument, "null output pointer".into()))
}

fn builtins() -> OracleTable {
    OracleTable::with_builtins()
}

fn model(bound: u32) -> Model {
    if bound == 0 {
        Model::Infinite
    } else {
        Model::Finite(FinModel::new(bound))
    }
}

fn outcome(o: &Outcome, steps: u64, approximate: bool) -> HcOutcome {
    let (kind, value) = match o {
        Outcome::Value(v) => (HcOutcomeKind::Value, *v),
        Outcome::NoValueWithinFuel(f) => (HcOutcomeKind::NoValueWithinFuel, *f),
        Outcome::OracleRefusal { .. } => (HcOutcomeKind::OracleRefusal, 0),
        Outcome::Overflow => (HcOutcomeKind::Overflow, 0),
        Outcome::StuckIllTyped(_) => (HcOutcomeKind::StuckIllTyped, 0),
    };
    HcOutcome { kind, value, steps, approximate: u8::from(approximate) }
}

/// Parses `src` into a new term handle stored in `*out`.
#[no_mangle]
pub unsafe extern "C" fn hc_parse(src: *const c_char, out: *mut *mut HcTerm) -> HcStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let t = parse(str_arg(src)?).map_err(|e| (HcStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(HcTerm(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_term_free(t: *mut HcTerm) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Creates a table holding the built-in oracles.
#[no_mangle]
pub extern "C" fn hc_oracles_new() -> *mut HcOracles {
    Box::into_raw(Box::new(HcOracles(builtins())))
}

/// Sets configuration `key = value` of oracle `name`.
#[no_mangle]
pub unsafe extern "C" fn hc_oracles_set(
    o: *mut HcOracles,
    name: *const c_char,
    key: *const c_char,
    value: *const c_char,
) -> HcStatus {
    guard(|| {
        let o = o.as_mut().ok_or((HcStatus::NullArgument, "null oracle table".to_string()))?;
        o.0.set_config(str_arg(name)?, str_arg(key)?, str_arg(value)?)
            .map_err(|e| (HcStatus::OracleError, e.to_string()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hc_oracles_free(o: *mut HcOracles) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Typechecks a closed term and stores its type, as a string to be freed
/// with `hc_string_free`, in `*type_out`.
#[no_mangle]
pub unsafe extern "C" fn hc_typecheck(t: *const HcTerm, type_out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        let out = out_arg(type_out)?;
        *out = ptr::null_mut();
        let t = ref_arg(t, "term")?;
        let ty = typecheck(&t.0, &builtins().typing_context()).map_err(|e| (HcStatus::TypeError, e.to_string()))?;
        *out = CString::new(ty.to_string()).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// Evaluates a closed term of type `0` by its computation tree with the
/// given fuel. `bound` 0 selects the infinite model, otherwise the finite
/// model with base values `0..=bound`. `oracles` may be null for the
/// built-in defaults.
#[no_mangle]
pub unsafe extern "C" fn hc_eval(
    t: *const HcTerm,
    oracles: *const HcOracles,
    bound: u32,
    fuel: u64,
    out: *mut HcOutcome,
) -> HcStatus {
    guard(|| {
        let out = out_arg(out)?;
        let t = ref_arg(t, "term")?;
        let table = match oracles.as_ref() {
            Some(o) => o.0.clone(),
            None => builtins(),
        };
        let ty = typecheck(&t.0, &table.typing_context()).map_err(|e| (HcStatus::TypeError, e.to_string()))?;
        if !ty.is_base() {
            return Err((HcStatus::TypeError, format!("term has type {ty}, expected 0")));
        }
        let r = eval_op(&t.0, &model(bound), &table, fuel);
        *out = outcome(&r.outcome, r.steps, r.approximate);
        Ok(())
    })
}

/// Compares the denotation of a closed term of type `0` in the finite model
/// of the given bound with its computation tree.
#[no_mangle]
pub unsafe extern "C" fn hc_check_equiv(
    t: *const HcTerm,
    oracles: *const HcOracles,
    bound: u32,
    fuel: u64,
    out: *mut HcEquivReport,
) -> HcStatus {
    guard(|| {
        let out = out_arg(out)?;
        let t = ref_arg(t, "term")?;
        if bound == 0 {
            return Err((HcStatus::EvalError, "equivalence needs a finite bound".into()));
        }
        let table = match oracles.as_ref() {
            Some(o) => o.0.clone(),
            None => builtins(),
        };
        let r = check_equiv(&t.0, &FinModel::new(bound), &table, fuel).map_err(|e| {
            let status = match e {
                hocomp::fineval::EvalError::Type(_) => HcStatus::TypeError,
                hocomp::fineval::EvalError::Domain(_) => HcStatus::BudgetExceeded,
                hocomp::fineval::EvalError::Oracle(_) => HcStatus::OracleError,
                _ => HcStatus::EvalError,
            };
            (status, e.to_string())
        })?;
        *out = HcEquivReport {
            verdict: match r.verdict {
                Verdict::Agree => HcVerdict::Agree,
                Verdict::Disagree => HcVerdict::Disagree,
                Verdict::InconclusiveFuel => HcVerdict::InconclusiveFuel,
            },
            has_denotation: u8::from(r.denotation.is_some()),
            denotation: r.denotation.unwrap_or(0),
            operational: outcome(&r.operational, r.steps, false),
        };
        Ok(())
    })
}

/// Size of the space of type `ty` in the finite model of the given bound:
/// hereditarily monotone partial elements if `partial` is nonzero, total
/// functionals otherwise.
#[no_mangle]
pub unsafe extern "C" fn hc_enumerate_count(ty: *const c_char, bound: u32, partial: u8, out: *mut u64) -> HcStatus {
    guard(|| {
        let out = out_arg(out)?;
        let ty = parse_type(str_arg(ty)?).map_err(|e| (HcStatus::ParseError, e.to_string()))?;
        let m = FinModel::new(bound);
        let n = if partial != 0 {
            m.partial_space(&ty).map(|s| s.len())
        } else {
            m.total_space(&ty).map(|s| s.len())
        }
        .map_err(|e| (HcStatus::BudgetExceeded, e.to_string()))?;
        *out = n as u64;
        Ok(())
    })
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
