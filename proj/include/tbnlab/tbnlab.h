// Copyright 2026 The tbnlab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/* C interface to tbnlab. Every function returning int returns a TBN_* status;
 * on failure tbn_last_error() describes it. Strings returned through char**
 * are owned by the caller and released with tbn_string_free. */
#ifndef TBNLAB_TBNLAB_H
#define TBNLAB_TBNLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TBN_API __declspec(dllexport)
#else
#define TBN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  TBN_OK = 0,
  TBN_E_INVALID_ARGUMENT = 1,
  TBN_E_PARSE = 2,
  TBN_E_IO = 3,
  TBN_E_EMPTY_COLLECTION = 10,
  TBN_E_BUDGET_EXCEEDED = 11,
  TBN_E_NOT_SATURATED = 12,
  TBN_E_ENTROPY_BELOW_BOUND = 13,
  TBN_E_BAD_ANCHOR = 14,
  TBN_E_INVALID_TM = 20,
  TBN_E_NONDETERMINISTIC_ATTACHMENT = 21,
  TBN_E_INPUT_TOO_LONG = 22,
  TBN_E_NOT_HALTING_WITHIN_BOUNDS = 23,
  TBN_E_COUNTS_VIOLATION = 24,
  TBN_E_OUT_OF_GRID = 25,
  TBN_E_SIMULATION_VIOLATED = 26,
  TBN_E_ARITY_MISMATCH = 30,
  TBN_E_INVALID_CIRCUIT = 31,
  TBN_E_WITNESS_INVALID = 40,
  TBN_E_NOT_COMPLETE = 50,
  TBN_E_MALFORMED_POLYMER = 51,
  TBN_E_NONDETERMINISTIC_CORNER = 52,
  TBN_E_INTERNAL = 99
};

TBN_API const char* tbn_status_name(int status);
/* Message of the last failing call on this thread; empty after a success. */
TBN_API const char* tbn_last_error(void);
TBN_API void tbn_string_free(char* s);
TBN_API const char* tbn_version(void);

typedef struct tbn_counts {
  int64_t seed;
  int64_t comp; /* computation, gate and end monomers */
  int64_t cap;
} tbn_counts;

typedef struct tbn_limits {
  int threads;          /* 0: TBNLAB_THREADS if set, else 1 */
  int64_t max_nodes;    /* 0: library default */
  double time_budget_s; /* 0: library default */
} tbn_limits;

enum { TBN_VERIFY_ENUMERATE = 0, TBN_VERIFY_CERTIFICATE = 1 };

/* ---- Turing machines ---- */
typedef struct tbn_tm tbn_tm;
TBN_API int tbn_tm_parse(const char* text, tbn_tm** out);
TBN_API void tbn_tm_free(tbn_tm* tm);
TBN_API int tbn_tm_print(const tbn_tm* tm, char** out);
/* Tape with surrounding blanks removed, and the symbol under the halted head. */
TBN_API int tbn_tm_run(const tbn_tm* tm, const char* input, int64_t max_steps, char** output, char* head_symbol);

/* ---- Collections and configurations ---- */
typedef struct tbn_document tbn_document;
TBN_API int tbn_document_parse(const char* text, tbn_document** out);
TBN_API void tbn_document_free(tbn_document* doc);
TBN_API int tbn_document_dump(const tbn_document* doc, char** out);
TBN_API int tbn_document_validate(const tbn_document* doc, int* valid, int* saturated);
TBN_API int tbn_document_energy(const tbn_document* doc, int64_t* enthalpy, int64_t* entropy);

typedef struct tbn_solve_result tbn_solve_result;
/* Stable configurations of the document's collection; its bonds are ignored. */
TBN_API int tbn_solve(const tbn_document* doc, const tbn_limits* limits, tbn_solve_result** out);
TBN_API void tbn_solve_result_free(tbn_solve_result* r);
TBN_API int64_t tbn_solve_result_enthalpy(const tbn_solve_result* r);
TBN_API int64_t tbn_solve_result_entropy(const tbn_solve_result* r);
TBN_API size_t tbn_solve_result_count(const tbn_solve_result* r);
TBN_API int tbn_solve_result_document(const tbn_solve_result* r, size_t index, char** out);
TBN_API int tbn_solve_result_summary(const tbn_solve_result* r, char** out);

/* ---- Verification reports ---- */
typedef struct tbn_report tbn_report;
TBN_API void tbn_report_free(tbn_report* r);
/* TBN_OK when the simulation was verified, otherwise the failing status. */
TBN_API int tbn_report_status(const tbn_report* r);
TBN_API int tbn_report_text(const tbn_report* r, char** out);

/* ---- Turing machine compilation ---- */
typedef struct tbn_tm_tbn tbn_tm_tbn;
TBN_API int tbn_compile_tm(const tbn_tm* tm, const char* input, int64_t space, int64_t time, int location_free,
                           tbn_tm_tbn** out);
TBN_API void tbn_tm_tbn_free(tbn_tm_tbn* c);
TBN_API int64_t tbn_tm_tbn_type_count(const tbn_tm_tbn* c);
TBN_API int64_t tbn_tm_tbn_expected_type_count(const tbn_tm_tbn* c);
TBN_API int tbn_tm_tbn_collection(const tbn_tm_tbn* c, const tbn_counts* counts, char** out);
/* The intended stable configuration as a document. */
TBN_API int tbn_tm_tbn_canonical(const tbn_tm_tbn* c, const tbn_counts* counts, char** out);
/* One line per step: index, H, S, description. */
TBN_API int tbn_tm_tbn_alpha(const tbn_tm_tbn* c, const tbn_counts* counts, char** out);
TBN_API int tbn_verify_tm(const tbn_tm_tbn* c, const tbn_counts* counts, int mode, const tbn_limits* limits,
                          tbn_report** out);

/* ---- Circuits ---- */
typedef struct tbn_circuit tbn_circuit;
TBN_API int tbn_circuit_parse(const char* text, tbn_circuit** out);
TBN_API void tbn_circuit_free(tbn_circuit* c);
TBN_API int tbn_circuit_inputs(const tbn_circuit* c, size_t* n);
TBN_API int tbn_circuit_eval(const tbn_circuit* c, const char* input, char** out);

typedef struct tbn_circuit_tbn tbn_circuit_tbn;
TBN_API int tbn_compile_circuit(const tbn_circuit* c, const char* input, tbn_circuit_tbn** out);
TBN_API void tbn_circuit_tbn_free(tbn_circuit_tbn* c);
TBN_API int64_t tbn_circuit_tbn_type_count(const tbn_circuit_tbn* c);
TBN_API int tbn_circuit_tbn_collection(const tbn_circuit_tbn* c, const tbn_counts* counts, char** out);
TBN_API int tbn_circuit_tbn_canonical(const tbn_circuit_tbn* c, const tbn_counts* counts, char** out);
TBN_API int tbn_verify_circuit(const tbn_circuit_tbn* c, const tbn_counts* counts, int mode, const tbn_limits* limits,
                               tbn_report** out);

/* ---- Splicing ---- */
/* Searches the candidate inputs for a splice and writes the demonstration
 * report. *violation is 1 when the spliced configuration is as stable as the
 * intended one but decodes a different output. TBN_E_WITNESS_INVALID when no
 * witness is found. */
TBN_API int tbn_splice_demo(const tbn_tm* tm, const char* const* candidates, size_t n_candidates, int64_t space,
                            int64_t time, int threads, char** report, int* violation);

/* ---- Geometric networks ---- */
typedef struct tbn_gtbn_run tbn_gtbn_run;
/* Compiles, grows `seeds` computations (an even number) and pairs them. */
TBN_API int tbn_gtbn_run_tm(const tbn_tm* tm, const char* input, int64_t max_steps, int64_t seeds,
                            tbn_gtbn_run** out);
TBN_API void tbn_gtbn_run_free(tbn_gtbn_run* r);
TBN_API int64_t tbn_gtbn_run_steps(const tbn_gtbn_run* r);
/* Summary lines: baseline, per-step deltas, pairing, readout and invariants. */
TBN_API int tbn_gtbn_run_summary(const tbn_gtbn_run* r, char** out);
TBN_API int tbn_gtbn_run_trace(const tbn_gtbn_run* r, char** out);
/* 1 when every step was neutral, pairing gained one polymer per pair, the
 * readout matched the machine and the no-rotation property held. */
TBN_API int tbn_gtbn_run_consistent(const tbn_gtbn_run* r);
TBN_API char tbn_gtbn_run_output(const tbn_gtbn_run* r);
/* SVG of the placements after step `up_to` (all steps when negative). */
TBN_API int tbn_gtbn_render(const char* trace_text, int64_t up_to, char** svg);

/* Text formats understood by the parsers, for humans. */
TBN_API const char* tbn_formats_help(void);

#ifdef __cplusplus
}
#endif

#endif /* TBNLAB_TBNLAB_H */
