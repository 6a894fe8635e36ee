//! C ABI over `relcon`.
//!
//! Objects cross the boundary as opaque handles created by `relcon_*` calls
//! and released with the matching `*_free`. Every fallible call returns a
//! [`RelconStatus`]; on failure the message is available from
//! [`relcon_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relcon::cli::Workspace;
use relcon::minors::tight_minor_relations;
use relcon::satisfaction::{image_of_relation, preserves, satisfies};
use relcon::{Constraint, Error, Relation};

/// Status codes. `RELCON_FALSE` is a valid negative answer, not an error.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelconStatus {
    RelconOk = 0,
    RelconFalse = 1,
    RelconInvalid = 2,
    RelconBudget = 3,
    RelconNullPointer = 4,
    RelconInvalidUtf8 = 5,
    RelconNotFound = 6,
    RelconOutOfBounds = 7,
    RelconPanic = 8,
}

/// Parsed declarations: domains, relations, functions, constraints, schemes.
pub struct RelconWorkspace {
    inner: Workspace,
}

/// A relation owned by the caller.
pub struct RelconRelation {
    inner: Relation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(RelconStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = if e.is_budget() {
            RelconStatus::RelconBudget
        } else if matches!(e, Error::Unknown { .. }) {
            RelconStatus::RelconNotFound
        } else {
            RelconStatus::RelconInvalid
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RelconStatus::RelconNullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<RelconStatus, Fail>) -> RelconStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RelconStatus::RelconPanic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(RelconStatus::RelconInvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn workspace<'a>(ws: *const RelconWorkspace) -> Result<&'a Workspace, Fail> {
    ws.as_ref().map(|w| &w.inner).ok_or_else(|| null("workspace"))
}

fn lookup<'a, T>(
    map: &'a std::collections::BTreeMap<String, T>,
    kind: &'static str,
    name: &str,
) -> Result<&'a T, Fail> {
    map.get(name).ok_or_else(|| {
        Fail::from(Error::Unknown {
            kind,
            name: name.to_string(),
        })
    })
}

fn answer(yes: bool) -> RelconStatus {
    if yes {
        RelconStatus::RelconOk
    } else {
        RelconStatus::RelconFalse
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

fn give_relation(out: *mut *mut RelconRelation, r: Relation) -> Result<RelconStatus, Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null above; the caller provides writable storage.
    unsafe { *out = Box::into_raw(Box::new(RelconRelation { inner: r })) };
    Ok(RelconStatus::RelconOk)
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next `relcon_*` call on the same thread.
#[no_mangle]
pub extern "C" fn relcon_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn relcon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relcon_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses workspace text into a new handle stored in `*out`.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn relcon_workspace_parse(source: *const c_char, out: *mut *mut RelconWorkspace) -> RelconStatus {
    guard(|| {
        let source = text(source, "source")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Workspace::parse(source)?;
        *out = Box::into_raw(Box::new(RelconWorkspace { inner }));
        Ok(RelconStatus::RelconOk)
    })
}

/// Adds the declarations in `source` to an existing workspace.
///
/// # Safety
/// `ws` must be a live handle and `source` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn relcon_workspace_extend(ws: *mut RelconWorkspace, source: *const c_char) -> RelconStatus {
    guard(|| {
        let source = text(source, "source")?;
        let ws = ws.as_mut().ok_or_else(|| null("workspace"))?;
        ws.inner.extend_from_text(source)?;
        Ok(RelconStatus::RelconOk)
    })
}

/// # Safety
/// `ws` must be NULL or a handle from [`relcon_workspace_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relcon_workspace_free(ws: *mut RelconWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Canonical text of the workspace; free with [`relcon_string_free`].
///
/// # Safety
/// `ws` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn relcon_workspace_serialize(ws: *const RelconWorkspace, out: *mut *mut c_char) -> RelconStatus {
    guard(|| {
        let ws = workspace(ws)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(ws.serialize());
        Ok(RelconStatus::RelconOk)
    })
}

/// Copies the named relation into a new handle.
///
/// # Safety
/// `ws` must be a live handle, `name` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn relcon_workspace_relation(
    ws: *const RelconWorkspace,
    name: *const c_char,
    out: *mut *mut RelconRelation,
) -> RelconStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let r = lookup(&ws.relations, "relation", text(name, "name")?)?;
        give_relation(out, r.clone())
    })
}

/// `RELCON_OK` if `f` maps every matrix with columns in `antecedent` to a
/// tuple of `consequent`, `RELCON_FALSE` if not.
///
/// # Safety
/// `ws` must be a live handle and the names NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn relcon_satisfies(
    ws: *const RelconWorkspace,
    function: *const c_char,
    antecedent: *const c_char,
    consequent: *const c_char,
) -> RelconStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let f = lookup(&ws.functions, "function", text(function, "function")?)?;
        let r = lookup(&ws.relations, "relation", text(antecedent, "antecedent")?)?;
        let s = lookup(&ws.relations, "relation", text(consequent, "consequent")?)?;
        let c = Constraint::new(r.clone(), s.clone())?;
        Ok(answer(satisfies(f, &c)?))
    })
}

/// # Safety
/// `ws` must be a live handle and the names NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn relcon_preserves(
    ws: *const RelconWorkspace,
    function: *const c_char,
    relation: *const c_char,
) -> RelconStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let f = lookup(&ws.functions, "function", text(function, "function")?)?;
        let r = lookup(&ws.relations, "relation", text(relation, "relation")?)?;
        Ok(answer(preserves(f, r)?))
    })
}

/// Image of a relation under a function, as a new handle.
///
/// # Safety
/// `ws` must be a live handle, the names NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn relcon_image(
    ws: *const RelconWorkspace,
    function: *const c_char,
    relation: *const c_char,
    out: *mut *mut RelconRelation,
) -> RelconStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let f = lookup(&ws.functions, "function", text(function, "function")?)?;
        let r = lookup(&ws.relations, "relation", text(relation, "relation")?)?;
        give_relation(out, image_of_relation(f, r)?)
    })
}

/// Tight minor of the relations `names[0..count]` via the named scheme.
///
/// # Safety
/// `ws` must be a live handle, `scheme` NUL-terminated, `names` an array of
/// `count` NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn relcon_tight_minor(
    ws: *const RelconWorkspace,
    scheme: *const c_char,
    names: *const *const c_char,
    count: usize,
    out: *mut *mut RelconRelation,
) -> RelconStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let h = lookup(&ws.schemes, "scheme", text(scheme, "scheme")?)?;
        if names.is_null() && count > 0 {
            return Err(null("names"));
        }
        let mut rels = Vec::with_capacity(count);
        for i in 0..count {
            let name = text(*names.add(i), "relation name")?;
            rels.push(lookup(&ws.relations, "relation", name)?.clone());
        }
        give_relation(out, tight_minor_relations(h, &rels)?)
    })
}

/// # Safety
/// `r` must be NULL or a relation handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relcon_relation_free(r: *mut RelconRelation) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Arity, or 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live relation handle.
#[no_mangle]
pub unsafe extern "C" fn relcon_relation_arity(r: *const RelconRelation) -> usize {
    r.as_ref().map_or(0, |r| r.inner.arity())
}

/// Number of tuples, or 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live relation handle.
#[no_mangle]
pub unsafe extern "C" fn relcon_relation_len(r: *const RelconRelation) -> usize {
    r.as_ref().map_or(0, |r| r.inner.len())
}

/// Size of the underlying domain, or 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live relation handle.
#[no_mangle]
pub unsafe extern "C" fn relcon_relation_domain_size(r: *const RelconRelation) -> usize {
    r.as_ref().map_or(0, |r| r.inner.domain().size())
}

/// Writes the `index`-th tuple in lexicographic order to `buf`, which must
/// hold at least `arity` elements.
///
/// # Safety
/// `r` must be a live relation handle and `buf` writable for `capacity`
/// elements.
#[no_mangle]
pub unsafe extern "C" fn relcon_relation_tuple(
    r: *const RelconRelation,
    index: usize,
    buf: *mut usize,
    capacity: usize,
) -> RelconStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("relation"))?.inner;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if capacity < r.arity() {
            return Err(Fail(
                RelconStatus::RelconOutOfBounds,
                format!("buffer holds {capacity} elements, arity is {}", r.arity()),
            ));
        }
        let t = r.tuples().nth(index).ok_or_else(|| {
            Fail(
                RelconStatus::RelconOutOfBounds,
                format!("tuple {index} of a relation with {} tuples", r.len()),
            )
        })?;
        ptr::copy_nonoverlapping(t.as_ptr(), buf, t.len());
        Ok(RelconStatus::RelconOk)
    })
}

/// Runs the command-line interface on `argv[0..argc]` (including the program
/// name) and returns its exit code. Captured output is stored in `*out` and
/// `*err` when those are non-NULL; free them with [`relcon_string_free`].
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out` and `err` must be
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn relcon_run(
    argc: c_int,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> c_int {
    clear_error();
    let args = (|| {
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return Err(null("argv"));
        }
        (0..argc as usize)
            .map(|i| text(*argv.add(i), "argument").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()
    })();
    let args = match args {
        Ok(a) => a,
        Err(Fail(_, message)) => {
            set_error(message);
            return 2;
        }
    };
    let Ok(outcome) = catch_unwind(|| relcon::cli::run(args)) else {
        set_error("internal panic".into());
        return 2;
    };
    if !out.is_null() {
        *out = into_c_string(outcome.stdout);
    }
    if !err.is_null() {
        *err = into_c_string(outcome.stderr);
    }
    outcome.code
}
