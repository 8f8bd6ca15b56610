//! C ABI over `utm-core`.
//!
//! Conventions:
//! - every fallible function returns a [`UtmStatus`]; on anything but
//!   `UTM_STATUS_OK` a message is available from [`utm_last_error`] on the
//!   same thread;
//! - strings passed in are NUL-terminated UTF-8; strings handed out are
//!   owned by the caller and released with [`utm_string_free`];
//! - handles are opaque and released with their `_free` function;
//! - structured values travel as JSON, in the same shapes the CLI writes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use utm_core::economics;
use utm_core::ledger::{AccountId, Call, Ledger, LedgerConfig, Role};
use utm_core::persistence::{self, ChainLog};
use utm_core::rid::{self, Nonce, PlanCommitment, RidMessage, NONCE_LEN};
use utm_core::sim::{presets, RunOptions, World};
use utm_core::units::{Amount, Fixed};
use utm_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    SchemaMismatch = 4,
    CorruptPayload = 5,
    MalformedRid = 6,
    InvalidDms = 7,
    ScenarioInvalid = 8,
    ChainBroken = 9,
    UnknownAccount = 10,
    Io = 11,
    Json = 12,
    /// A read-only contract call reverted; the reason is the last error.
    Reverted = 13,
    InvalidArgument = 14,
    Panic = 99,
}

/// Ledger handle.
pub struct UtmLedger(Ledger);

/// Simulation handle.
pub struct UtmWorld(World);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(UtmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => UtmStatus::Parse,
            Error::SchemaMismatch(_) => UtmStatus::SchemaMismatch,
            Error::CorruptPayload(_) => UtmStatus::CorruptPayload,
            Error::MalformedRid(_) => UtmStatus::MalformedRid,
            Error::InvalidDms(_) => UtmStatus::InvalidDms,
            Error::ScenarioInvalid(_) => UtmStatus::ScenarioInvalid,
            Error::ChainBroken { .. } => UtmStatus::ChainBroken,
            Error::UnknownAccount(_) => UtmStatus::UnknownAccount,
            Error::Io(_) => UtmStatus::Io,
            Error::Json(_) => UtmStatus::Json,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(UtmStatus::Json, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UtmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            UtmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            UtmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(UtmStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(UtmStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(UtmStatus::InvalidArgument, e.to_string()))?;
    put(out, c.into_raw(), "out")
}

unsafe fn handle<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn account(s: &str) -> Result<AccountId, Failure> {
    s.parse::<AccountId>().map_err(Failure::from)
}

fn utf8(v: Vec<u8>) -> String {
    String::from_utf8(v).expect("serializers emit UTF-8")
}

/// Library version, a static string the caller must not free.
#[no_mangle]
pub extern "C" fn utm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn utm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn utm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a ledger. `config_json` may be null for the defaults.
///
/// # Safety
/// Pointer arguments must be valid; `out` receives the handle.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_new(config_json: *const c_char, out: *mut *mut UtmLedger) -> UtmStatus {
    guard(|| {
        let config = if config_json.is_null() {
            LedgerConfig::default()
        } else {
            serde_json::from_str(text(config_json, "config_json")?)?
        };
        let ledger = Ledger::new(config)?;
        put(out, Box::into_raw(Box::new(UtmLedger(ledger))), "out")
    })
}

/// # Safety
/// `ledger` must be null or a live handle from [`utm_ledger_new`].
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_free(ledger: *mut UtmLedger) {
    if !ledger.is_null() {
        drop(Box::from_raw(ledger));
    }
}

/// Opens an account. `role` is "operator", "reporter", "authority" or
/// "uss"; the new address is written to `out_id`.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_create_account(
    ledger: *mut UtmLedger,
    role: *const c_char,
    balance: u64,
    out_id: *mut *mut c_char,
) -> UtmStatus {
    guard(|| {
        let ledger = &mut handle(ledger, "ledger")?.0;
        let role: Role = text(role, "role")?.parse()?;
        let id = ledger.create_funded_account(role, Amount(balance));
        put_string(out_id, id.to_string())
    })
}

/// Executes one call. `call_json` is `{"op": ..., "args": {...}}`; the
/// executed transaction, success or revert, is written to `out_tx_json`.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_submit(
    ledger: *mut UtmLedger,
    caller: *const c_char,
    call_json: *const c_char,
    value: u64,
    out_tx_json: *mut *mut c_char,
) -> UtmStatus {
    guard(|| {
        let ledger = &mut handle(ledger, "ledger")?.0;
        let caller = account(text(caller, "caller")?)?;
        let call: Call = serde_json::from_str(text(call_json, "call_json")?)?;
        let tx = ledger.submit(caller, call, Amount(value))?;
        put_string(out_tx_json, serde_json::to_string(tx)?)
    })
}

/// Fee quote as JSON. A contract revert returns `UTM_STATUS_REVERTED`.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_quote(
    ledger: *mut UtmLedger,
    caller: *const c_char,
    drone_id: u64,
    out_quote_json: *mut *mut c_char,
) -> UtmStatus {
    guard(|| {
        let ledger = &handle(ledger, "ledger")?.0;
        let caller = account(text(caller, "caller")?)?;
        let quote = ledger.quote(&caller, drone_id).map_err(|r| Failure(UtmStatus::Reverted, r.0))?;
        put_string(out_quote_json, serde_json::to_string(&quote)?)
    })
}

/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_balance(ledger: *mut UtmLedger, id: *const c_char, out: *mut u64) -> UtmStatus {
    guard(|| {
        let ledger = &handle(ledger, "ledger")?.0;
        let id = account(text(id, "id")?)?;
        let balance = ledger.balance(&id).ok_or_else(|| Failure(UtmStatus::UnknownAccount, id.to_string()))?;
        put(out, balance.0, "out")
    })
}

/// Sets the ledger clock, in seconds since the epoch. The clock never
/// runs backwards.
///
/// # Safety
/// `ledger` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_set_time(ledger: *mut UtmLedger, now: u64) -> UtmStatus {
    guard(|| {
        let ledger = &mut handle(ledger, "ledger")?.0;
        if now < ledger.now() {
            return Err(Failure(UtmStatus::InvalidArgument, format!("clock is at {}", ledger.now())));
        }
        ledger.set_time(now);
        Ok(())
    })
}

/// Seals pending transactions into a block; `out_sealed` is set to false
/// when nothing was pending.
///
/// # Safety
/// Pointer arguments must be valid; `out_sealed` may be null.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_seal_block(ledger: *mut UtmLedger, out_sealed: *mut bool) -> UtmStatus {
    guard(|| {
        let sealed = handle(ledger, "ledger")?.0.seal_block().is_some();
        if !out_sealed.is_null() {
            out_sealed.write(sealed);
        }
        Ok(())
    })
}

/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_head_hash(ledger: *mut UtmLedger, out_hex: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let ledger = &handle(ledger, "ledger")?.0;
        put_string(out_hex, ledger.head_hash().to_hex())
    })
}

/// Re-derives every block hash and link of the sealed chain.
///
/// # Safety
/// `ledger` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_verify(ledger: *mut UtmLedger) -> UtmStatus {
    guard(|| Ok(handle(ledger, "ledger")?.0.verify_chain_detailed()?))
}

/// The sealed chain in `.chain.jsonl` form.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_ledger_chain_jsonl(ledger: *mut UtmLedger, out: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let ledger = &handle(ledger, "ledger")?.0;
        put_string(out, utf8(ChainLog::of(ledger).to_jsonl()))
    })
}

/// Parses and verifies a `.chain.jsonl` buffer. `out_blocks` may be null.
///
/// # Safety
/// `data` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn utm_chain_verify(data: *const u8, len: usize, out_blocks: *mut u64) -> UtmStatus {
    guard(|| {
        let log = ChainLog::from_jsonl(bytes(data, len, "data")?)?;
        log.verify()?;
        if !out_blocks.is_null() {
            out_blocks.write(log.blocks.len() as u64);
        }
        Ok(())
    })
}

unsafe fn nonce_arg(nonce: *const u8) -> Result<Nonce, Failure> {
    let b = bytes(nonce, NONCE_LEN, "nonce")?;
    Ok(b.try_into().expect("length checked"))
}

/// RID-VC of a plan: 32 bytes into `out`. `plan_json` holds owner,
/// source, destination, date and time.
///
/// # Safety
/// `nonce` must point to 16 bytes and `out` to 32 writable bytes.
#[no_mangle]
pub unsafe extern "C" fn utm_rid_vc(nonce: *const u8, plan_json: *const c_char, out: *mut u8) -> UtmStatus {
    guard(|| {
        let nonce = nonce_arg(nonce)?;
        let plan: PlanCommitment = serde_json::from_str(text(plan_json, "plan_json")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let vc = rid::compute_rid_vc(&nonce, &plan);
        ptr::copy_nonoverlapping(vc.0.as_ptr(), out, vc.0.len());
        Ok(())
    })
}

/// Checks a candidate RID-VC of any length against a plan.
///
/// # Safety
/// `candidate` must point to `len` bytes and `nonce` to 16.
#[no_mangle]
pub unsafe extern "C" fn utm_rid_verify(
    candidate: *const u8,
    len: usize,
    nonce: *const u8,
    plan_json: *const c_char,
    out_valid: *mut bool,
) -> UtmStatus {
    guard(|| {
        let candidate = bytes(candidate, len, "candidate")?;
        let nonce = nonce_arg(nonce)?;
        let plan: PlanCommitment = serde_json::from_str(text(plan_json, "plan_json")?)?;
        put(out_valid, rid::verify_rid_vc(candidate, &nonce, &plan), "out_valid")
    })
}

/// Encodes a RID message given as JSON to its hex wire form.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_rid_encode(message_json: *const c_char, out_hex: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let msg: RidMessage = serde_json::from_str(text(message_json, "message_json")?)?;
        put_string(out_hex, rid::encode_rid_hex(&msg)?)
    })
}

/// Decodes a hex wire RID message to JSON.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_rid_decode(hex: *const c_char, out_json: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let msg = rid::decode_rid_hex(text(hex, "hex")?)?;
        put_string(out_json, serde_json::to_string(&msg)?)
    })
}

/// Mission fee for multiplier `k` in millionths.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn utm_dynamic_fee(
    k_micros: i64,
    base_cost: u64,
    rcd: u64,
    surcharge: u64,
    out: *mut u64,
) -> UtmStatus {
    guard(|| {
        if k_micros < 0 {
            return Err(Failure(UtmStatus::InvalidArgument, "k must be non-negative".into()));
        }
        let fee =
            economics::dynamic_fee(Fixed::from_micros(k_micros), Amount(base_cost), Amount(rcd), Amount(surcharge));
        put(out, fee.0, "out")
    })
}

/// Reputation from reward and penalty counts, in millionths.
#[no_mangle]
pub extern "C" fn utm_reputation(rewards: u64, penalties: u64) -> i64 {
    economics::reputation(rewards, penalties).micros()
}

/// Next fee multiplier, all values in millionths.
#[no_mangle]
pub extern "C" fn utm_update_k(reputation: i64, k_prev: i64, alpha: i64, k_min: i64) -> i64 {
    economics::update_k(
        Fixed::from_micros(reputation),
        Fixed::from_micros(k_prev),
        Fixed::from_micros(alpha),
        Fixed::from_micros(k_min),
    )
    .micros()
}

/// A bundled scenario ("compliant", "deviating", "no-reporter",
/// "pressure", "demo") as scenario JSON.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_scenario_preset(name: *const c_char, out_json: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let name = text(name, "name")?;
        let s = presets::by_name(name)
            .ok_or_else(|| Failure(UtmStatus::InvalidArgument, format!("unknown preset {name}")))?;
        put_string(out_json, utf8(persistence::scenario_to_json(&s)))
    })
}

/// Runs a scenario to completion and returns its metrics JSON.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_scenario_run(
    scenario_json: *const c_char,
    parallel: bool,
    out_metrics_json: *mut *mut c_char,
) -> UtmStatus {
    guard(|| {
        let s = persistence::scenario_from_json(text(scenario_json, "scenario_json")?.as_bytes())?;
        let out = utm_core::sim::run_with(s, RunOptions { parallel })?;
        put_string(out_metrics_json, utf8(persistence::metrics_to_json(&out.metrics)))
    })
}

/// Builds a world at tick 0 for stepwise driving.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_world_new(
    scenario_json: *const c_char,
    parallel: bool,
    out: *mut *mut UtmWorld,
) -> UtmStatus {
    guard(|| {
        let s = persistence::scenario_from_json(text(scenario_json, "scenario_json")?.as_bytes())?;
        let world = World::new(s, RunOptions { parallel })?;
        put(out, Box::into_raw(Box::new(UtmWorld(world))), "out")
    })
}

/// # Safety
/// `world` must be null or a live handle from [`utm_world_new`].
#[no_mangle]
pub unsafe extern "C" fn utm_world_free(world: *mut UtmWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

/// Advances one tick; `out_finished` reports whether the run is over.
///
/// # Safety
/// Pointer arguments must be valid; `out_finished` may be null.
#[no_mangle]
pub unsafe extern "C" fn utm_world_step(world: *mut UtmWorld, out_finished: *mut bool) -> UtmStatus {
    guard(|| {
        let world = &mut handle(world, "world")?.0;
        if !world.is_finished() {
            world.step();
        }
        if !out_finished.is_null() {
            out_finished.write(world.is_finished());
        }
        Ok(())
    })
}

/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_world_tick(world: *mut UtmWorld, out: *mut u64) -> UtmStatus {
    guard(|| {
        let tick = handle(world, "world")?.0.tick();
        put(out, tick, "out")
    })
}

/// Metrics of the run so far.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_world_metrics(world: *mut UtmWorld, out_json: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let world = &handle(world, "world")?.0;
        put_string(out_json, utf8(persistence::metrics_to_json(&world.metrics())))
    })
}

/// The world's sealed chain in `.chain.jsonl` form.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn utm_world_chain_jsonl(world: *mut UtmWorld, out: *mut *mut c_char) -> UtmStatus {
    guard(|| {
        let world = &handle(world, "world")?.0;
        put_string(out, utf8(ChainLog::of(world.ledger()).to_jsonl()))
    })
}
