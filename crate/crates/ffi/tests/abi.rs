use std::ffi::{c_char, CStr, CString};
use std::ptr;

use serde_json::{json, Value};
use utm_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    utm_string_free(p);
    s
}

fn last_error() -> String {
    let p = utm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn account(ledger: *mut UtmLedger, role: &str, balance: u64) -> String {
    let mut out = ptr::null_mut();
    assert_eq!(utm_ledger_create_account(ledger, c(role).as_ptr(), balance, &mut out), UtmStatus::Ok);
    take(out)
}

unsafe fn submit(ledger: *mut UtmLedger, caller: &str, call: Value, value: u64) -> Value {
    let mut out = ptr::null_mut();
    let status = utm_ledger_submit(ledger, c(caller).as_ptr(), c(&call.to_string()).as_ptr(), value, &mut out);
    assert_eq!(status, UtmStatus::Ok, "{}", last_error());
    serde_json::from_str(&take(out)).unwrap()
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(utm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn ledger_round_trip() {
    unsafe {
        let mut ledger = ptr::null_mut();
        assert_eq!(utm_ledger_new(ptr::null(), &mut ledger), UtmStatus::Ok);
        let op = account(ledger, "operator", 10_000);
        let reporter = account(ledger, "reporter", 0);

        let tx = submit(
            ledger,
            &op,
            json!({"op": "registerDrone", "args": {"serial": "SN-1", "ownerNationalId": "784-1990-1234567-1", "signTac": true}}),
            0,
        );
        assert_eq!(tx["result"]["status"], "success", "{tx}");
        let tx = submit(ledger, &op, json!({"op": "subscribeToUSS", "args": {"droneId": 0}}), 100);
        assert_eq!(tx["result"]["status"], "success", "{tx}");

        let mut quote = ptr::null_mut();
        assert_eq!(utm_ledger_quote(ledger, c(&op).as_ptr(), 0, &mut quote), UtmStatus::Ok);
        let quote: Value = serde_json::from_str(&take(quote)).unwrap();
        assert_eq!(quote["fee"], "1500");

        let mut quote = ptr::null_mut();
        assert_eq!(utm_ledger_quote(ledger, c(&reporter).as_ptr(), 0, &mut quote), UtmStatus::Reverted);
        assert!(quote.is_null());
        assert!(!last_error().is_empty());

        let tx = submit(ledger, &op, json!({"op": "subscribeToUSS", "args": {"droneId": 0}}), 100);
        assert_eq!(tx["writes"], 0);
        assert_ne!(tx["result"]["status"], "success");

        let mut balance = 0;
        assert_eq!(utm_ledger_balance(ledger, c(&op).as_ptr(), &mut balance), UtmStatus::Ok);
        assert_eq!(balance, 9_900);

        let mut sealed = false;
        assert_eq!(utm_ledger_seal_block(ledger, &mut sealed), UtmStatus::Ok);
        assert!(sealed);
        assert_eq!(utm_ledger_seal_block(ledger, &mut sealed), UtmStatus::Ok);
        assert!(!sealed);
        assert_eq!(utm_ledger_verify(ledger), UtmStatus::Ok);
        assert!(utm_last_error().is_null());

        let mut head = ptr::null_mut();
        assert_eq!(utm_ledger_head_hash(ledger, &mut head), UtmStatus::Ok);
        let head = take(head);
        assert_eq!(head.len(), 64);

        let mut log = ptr::null_mut();
        assert_eq!(utm_ledger_chain_jsonl(ledger, &mut log), UtmStatus::Ok);
        let log = take(log);
        assert!(log.contains(&head));
        let mut blocks = 0;
        assert_eq!(utm_chain_verify(log.as_ptr(), log.len(), &mut blocks), UtmStatus::Ok);
        assert!(blocks >= 1);
        let doctored = log.replacen("SN-1", "SN-2", 1);
        assert_eq!(utm_chain_verify(doctored.as_ptr(), doctored.len(), ptr::null_mut()), UtmStatus::ChainBroken);
        assert!(last_error().contains("block"));
        assert_eq!(utm_chain_verify(ptr::null(), 0, ptr::null_mut()), UtmStatus::Parse);

        assert_eq!(utm_ledger_set_time(ledger, 50), UtmStatus::Ok);
        assert_eq!(utm_ledger_set_time(ledger, 10), UtmStatus::InvalidArgument);

        utm_ledger_free(ledger);
        utm_ledger_free(ptr::null_mut());
    }
}

#[test]
fn bad_arguments_map_to_status_codes() {
    unsafe {
        assert_eq!(utm_ledger_new(ptr::null(), ptr::null_mut()), UtmStatus::NullArgument);
        assert_eq!(utm_ledger_new(c("{").as_ptr(), &mut ptr::null_mut()), UtmStatus::Json);
        let mut ledger = ptr::null_mut();
        assert_eq!(utm_ledger_new(ptr::null(), &mut ledger), UtmStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(utm_ledger_create_account(ledger, c("pilot").as_ptr(), 0, &mut out), UtmStatus::Parse);
        let op = account(ledger, "operator", 1);
        let unknown = json!({"op": "launchMissiles", "args": {}}).to_string();
        assert_eq!(utm_ledger_submit(ledger, c(&op).as_ptr(), c(&unknown).as_ptr(), 0, &mut out), UtmStatus::Json);
        let call = json!({"op": "requestMissionQuote", "args": {"droneId": 0}}).to_string();
        let stranger = format!("0x{}", "ee".repeat(20));
        assert_eq!(
            utm_ledger_submit(ledger, c(&stranger).as_ptr(), c(&call).as_ptr(), 0, &mut out),
            UtmStatus::UnknownAccount
        );
        assert_eq!(utm_ledger_submit(ledger, c("0x12").as_ptr(), c(&call).as_ptr(), 0, &mut out), UtmStatus::Parse);
        let invalid = [0xff, 0xfe, 0];
        assert_eq!(
            utm_ledger_submit(ledger, invalid.as_ptr().cast(), c(&call).as_ptr(), 0, &mut out),
            UtmStatus::InvalidUtf8
        );
        assert_eq!(utm_ledger_verify(ptr::null_mut()), UtmStatus::NullArgument);
        utm_ledger_free(ledger);
    }
}

#[test]
fn rid_codec_and_commitment() {
    let plan = json!({
        "owner": format!("0x{}", "ab".repeat(20)),
        "source": "+24°26′30″,+054°22′05″",
        "destination": "+24°26′30″,+054°22′40″",
        "date": "01012025",
        "time": "0010"
    })
    .to_string();
    let nonce = [9u8; 16];
    unsafe {
        let mut vc = [0u8; 32];
        assert_eq!(utm_rid_vc(nonce.as_ptr(), c(&plan).as_ptr(), vc.as_mut_ptr()), UtmStatus::Ok);
        let mut valid = false;
        assert_eq!(utm_rid_verify(vc.as_ptr(), 32, nonce.as_ptr(), c(&plan).as_ptr(), &mut valid), UtmStatus::Ok);
        assert!(valid);
        vc[0] ^= 1;
        assert_eq!(utm_rid_verify(vc.as_ptr(), 32, nonce.as_ptr(), c(&plan).as_ptr(), &mut valid), UtmStatus::Ok);
        assert!(!valid);
        assert_eq!(utm_rid_verify(vc.as_ptr(), 31, nonce.as_ptr(), c(&plan).as_ptr(), &mut valid), UtmStatus::Ok);
        assert!(!valid);
        assert_eq!(utm_rid_vc(ptr::null(), c(&plan).as_ptr(), vc.as_mut_ptr()), UtmStatus::NullArgument);

        let message = json!({
            "faa": {
                "timestamp": 600,
                "droneLocation": "+024°26′30″,+054°22′05″",
                "controlStation": "+024°26′30″,+054°22′05″",
                "altitudeCm": 12000,
                "velocityCms": 1000
            },
            "ridVc": hex(&vc)
        });
        let mut wire = ptr::null_mut();
        assert_eq!(utm_rid_encode(c(&message.to_string()).as_ptr(), &mut wire), UtmStatus::Ok, "{}", last_error());
        let wire = take(wire);
        let mut back = ptr::null_mut();
        assert_eq!(utm_rid_decode(c(&wire).as_ptr(), &mut back), UtmStatus::Ok);
        assert_eq!(serde_json::from_str::<Value>(&take(back)).unwrap(), message);
        assert_eq!(utm_rid_decode(c(&wire[..wire.len() - 2]).as_ptr(), &mut back), UtmStatus::MalformedRid);
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn economics() {
    let mut fee = 0;
    assert_eq!(unsafe { utm_dynamic_fee(750_000, 10, 5, 2, &mut fee) }, UtmStatus::Ok);
    assert_eq!(fee, 15);
    assert_eq!(unsafe { utm_dynamic_fee(-1, 10, 5, 2, &mut fee) }, UtmStatus::InvalidArgument);
    assert_eq!(utm_reputation(8, 2), 500_000);
    assert_eq!(utm_reputation(0, 0), 0);
    assert_eq!(utm_update_k(0, 1_000_000, 500_000, 50_000), 750_000);
}

#[test]
fn scenarios_run_and_step() {
    unsafe {
        let mut scenario = ptr::null_mut();
        assert_eq!(utm_scenario_preset(c("compliant").as_ptr(), &mut scenario), UtmStatus::Ok);
        let scenario = take(scenario);
        let mut metrics = ptr::null_mut();
        assert_eq!(utm_scenario_run(c(&scenario).as_ptr(), false, &mut metrics), UtmStatus::Ok);
        let metrics = take(metrics);
        let parsed: Value = serde_json::from_str(&metrics).unwrap();
        assert_eq!(parsed["missions"][0]["payout"], "1500");

        let mut world = ptr::null_mut();
        assert_eq!(utm_world_new(c(&scenario).as_ptr(), true, &mut world), UtmStatus::Ok);
        let mut finished = false;
        let mut steps = 0;
        while !finished {
            assert_eq!(utm_world_step(world, &mut finished), UtmStatus::Ok);
            steps += 1;
        }
        let mut tick = 0;
        assert_eq!(utm_world_tick(world, &mut tick), UtmStatus::Ok);
        assert_eq!(tick, steps);
        let mut stepped = ptr::null_mut();
        assert_eq!(utm_world_metrics(world, &mut stepped), UtmStatus::Ok);
        assert_eq!(take(stepped), metrics);
        let mut log = ptr::null_mut();
        assert_eq!(utm_world_chain_jsonl(world, &mut log), UtmStatus::Ok);
        let log = take(log);
        assert_eq!(utm_chain_verify(log.as_ptr(), log.len(), ptr::null_mut()), UtmStatus::Ok);
        utm_world_free(world);

        let mut out = ptr::null_mut();
        assert_eq!(utm_scenario_preset(c("nope").as_ptr(), &mut out), UtmStatus::InvalidArgument);
        let future = scenario.replacen("\"schema\":\"1.0\"", "\"schema\":\"2.0\"", 1);
        assert_eq!(utm_scenario_run(c(&future).as_ptr(), false, &mut out), UtmStatus::SchemaMismatch);
        let broken = json!({"schema": "1.0", "cellSize": 0}).to_string();
        assert_eq!(utm_world_new(c(&broken).as_ptr(), false, &mut world), UtmStatus::ScenarioInvalid);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(utm_scenario_preset(c("nope").as_ptr(), &mut out), UtmStatus::InvalidArgument);
    }
    std::thread::spawn(|| assert!(utm_last_error().is_null())).join().unwrap();
    assert!(last_error().contains("nope"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/utm.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct UtmLedger UtmLedger;"));
    assert!(header.contains("UTM_STATUS_OK = 0"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile_dir();
    let main = dir.join("main.c");
    std::fs::write(
        &main,
        "#include \"utm.h\"\nint main(void) { UtmLedger *l = 0; return utm_ledger_new(0, &l) == UTM_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&main)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| std::process::Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("utm-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
