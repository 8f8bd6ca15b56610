#ifndef UTM_H
#define UTM_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum UtmStatus {
  UTM_STATUS_OK = 0,
  UTM_STATUS_NULL_ARGUMENT = 1,
  UTM_STATUS_INVALID_UTF8 = 2,
  UTM_STATUS_PARSE = 3,
  UTM_STATUS_SCHEMA_MISMATCH = 4,
  UTM_STATUS_CORRUPT_PAYLOAD = 5,
  UTM_STATUS_MALFORMED_RID = 6,
  UTM_STATUS_INVALID_DMS = 7,
  UTM_STATUS_SCENARIO_INVALID = 8,
  UTM_STATUS_CHAIN_BROKEN = 9,
  UTM_STATUS_UNKNOWN_ACCOUNT = 10,
  UTM_STATUS_IO = 11,
  UTM_STATUS_JSON = 12,
  /**
   * A read-only contract call reverted; the reason is the last error.
   */
  UTM_STATUS_REVERTED = 13,
  UTM_STATUS_INVALID_ARGUMENT = 14,
  UTM_STATUS_PANIC = 99,
} UtmStatus;

/**
 * Ledger handle.
 */
typedef struct UtmLedger UtmLedger;

/**
 * Simulation handle.
 */
typedef struct UtmWorld UtmWorld;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string the caller must not free.
 */
const char *utm_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on this thread.
 */
const char *utm_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void utm_string_free(char *s);

/**
 * Creates a ledger. `config_json` may be null for the defaults.
 *
 * # Safety
 * Pointer arguments must be valid; `out` receives the handle.
 */
enum UtmStatus utm_ledger_new(const char *config_json, struct UtmLedger **out);

/**
 * # Safety
 * `ledger` must be null or a live handle from [`utm_ledger_new`].
 */
void utm_ledger_free(struct UtmLedger *ledger);

/**
 * Opens an account. `role` is "operator", "reporter", "authority" or
 * "uss"; the new address is written to `out_id`.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_ledger_create_account(struct UtmLedger *ledger,
                                         const char *role,
                                         uint64_t balance,
                                         char **out_id);

/**
 * Executes one call. `call_json` is `{"op": ..., "args": {...}}`; the
 * executed transaction, success or revert, is written to `out_tx_json`.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_ledger_submit(struct UtmLedger *ledger,
                                 const char *caller,
                                 const char *call_json,
                                 uint64_t value,
                                 char **out_tx_json);

/**
 * Fee quote as JSON. A contract revert returns `UTM_STATUS_REVERTED`.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_ledger_quote(struct UtmLedger *ledger,
                                const char *caller,
                                uint64_t drone_id,
                                char **out_quote_json);

/**
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_ledger_balance(struct UtmLedger *ledger, const char *id, uint64_t *out);

/**
 * Sets the ledger clock, in seconds since the epoch. The clock never
 * runs backwards.
 *
 * # Safety
 * `ledger` must be a live handle.
 */
enum UtmStatus utm_ledger_set_time(struct UtmLedger *ledger, uint64_t now);

/**
 * Seals pending transactions into a block; `out_sealed` is set to false
 * when nothing was pending.
 *
 * # Safety
 * Pointer arguments must be valid; `out_sealed` may be null.
 */
enum UtmStatus utm_ledger_seal_block(struct UtmLedger *ledger, bool *out_sealed);

/**
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_ledger_head_hash(struct UtmLedger *ledger, char **out_hex);

/**
 * Re-derives every block hash and link of the sealed chain.
 *
 * # Safety
 * `ledger` must be a live handle.
 */
enum UtmStatus utm_ledger_verify(struct UtmLedger *ledger);

/**
 * The sealed chain in `.chain.jsonl` form.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_ledger_chain_jsonl(struct UtmLedger *ledger, char **out);

/**
 * Parses and verifies a `.chain.jsonl` buffer. `out_blocks` may be null.
 *
 * # Safety
 * `data` must point to `len` readable bytes.
 */
enum UtmStatus utm_chain_verify(const uint8_t *data, size_t len, uint64_t *out_blocks);

/**
 * RID-VC of a plan: 32 bytes into `out`. `plan_json` holds owner,
 * source, destination, date and time.
 *
 * # Safety
 * `nonce` must point to 16 bytes and `out` to 32 writable bytes.
 */
enum UtmStatus utm_rid_vc(const uint8_t *nonce, const char *plan_json, uint8_t *out);

/**
 * Checks a candidate RID-VC of any length against a plan.
 *
 * # Safety
 * `candidate` must point to `len` bytes and `nonce` to 16.
 */
enum UtmStatus utm_rid_verify(const uint8_t *candidate,
                              size_t len,
                              const uint8_t *nonce,
                              const char *plan_json,
                              bool *out_valid);

/**
 * Encodes a RID message given as JSON to its hex wire form.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_rid_encode(const char *message_json, char **out_hex);

/**
 * Decodes a hex wire RID message to JSON.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_rid_decode(const char *hex, char **out_json);

/**
 * Mission fee for multiplier `k` in millionths.
 *
 * # Safety
 * `out` must be writable.
 */
enum UtmStatus utm_dynamic_fee(int64_t k_micros,
                               uint64_t base_cost,
                               uint64_t rcd,
                               uint64_t surcharge,
                               uint64_t *out);

/**
 * Reputation from reward and penalty counts, in millionths.
 */
int64_t utm_reputation(uint64_t rewards, uint64_t penalties);

/**
 * Next fee multiplier, all values in millionths.
 */
int64_t utm_update_k(int64_t reputation, int64_t k_prev, int64_t alpha, int64_t k_min);

/**
 * A bundled scenario ("compliant", "deviating", "no-reporter",
 * "pressure", "demo") as scenario JSON.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_scenario_preset(const char *name, char **out_json);

/**
 * Runs a scenario to completion and returns its metrics JSON.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_scenario_run(const char *scenario_json, bool parallel, char **out_metrics_json);

/**
 * Builds a world at tick 0 for stepwise driving.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_world_new(const char *scenario_json, bool parallel, struct UtmWorld **out);

/**
 * # Safety
 * `world` must be null or a live handle from [`utm_world_new`].
 */
void utm_world_free(struct UtmWorld *world);

/**
 * Advances one tick; `out_finished` reports whether the run is over.
 *
 * # Safety
 * Pointer arguments must be valid; `out_finished` may be null.
 */
enum UtmStatus utm_world_step(struct UtmWorld *world, bool *out_finished);

/**
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_world_tick(struct UtmWorld *world, uint64_t *out);

/**
 * Metrics of the run so far.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_world_metrics(struct UtmWorld *world, char **out_json);

/**
 * The world's sealed chain in `.chain.jsonl` form.
 *
 * # Safety
 * Pointer arguments must be valid.
 */
enum UtmStatus utm_world_chain_jsonl(struct UtmWorld *world, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UTM_H */
