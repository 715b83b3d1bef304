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
#include "tbnlab/tbnlab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>

#include "tbnlab/circuit.hpp"
#include "tbnlab/gtbn.hpp"
#include "tbnlab/splice.hpp"

using namespace tbnlab;

struct tbn_tm {
  TMSpec spec;
};
struct tbn_document {
  Collection collection;
  Configuration config;
};
struct tbn_solve_result {
  Collection collection;
  SolveResult result;
};
struct tbn_report {
  VerifyReport report;
};
struct tbn_tm_tbn {
  TbnConstruction cons;
};
struct tbn_circuit {
  CircuitSpec spec;
};
struct tbn_circuit_tbn {
  CircuitTbn tbn;
};
struct tbn_gtbn_run {
  std::string summary, trace;
  int64_t steps = 0;
  bool consistent = false;
  char output = '_';
};

namespace {

thread_local std::string g_error;

template <class F>
int guard(F&& f) {
  try {
    g_error.clear();
    f();
    return TBN_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return TBN_E_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return TBN_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

CountsPolicy policy(const tbn_counts* c) {
  CountsPolicy p;
  if (c) {
    p.seed = c->seed;
    p.comp = c->comp;
    p.cap = c->cap;
  }
  return p;
}

SolveLimits limits_of(const tbn_limits* l) {
  SolveLimits s;
  if (l) {
    s.threads = l->threads;
    if (l->max_nodes > 0) s.maxBranchNodes = l->max_nodes;
    if (l->time_budget_s > 0) s.timeBudgetSeconds = l->time_budget_s;
  }
  return s;
}

VerifyMode mode_of(int mode) {
  if (mode == TBN_VERIFY_ENUMERATE) return VerifyMode::Enumerate;
  if (mode == TBN_VERIFY_CERTIFICATE) return VerifyMode::Certificate;
  throw Error(ErrorCode::InvalidArgument, "unknown verification mode");
}

std::string report_text(const VerifyReport& r) {
  std::ostringstream os;
  os << "status " << error_code_name(r.code) << "\n";
  os << "stable-classes " << r.stableClasses << "\n";
  os << "H " << r.H << "\nS " << r.S << "\n";
  os << "expected-output \"" << r.expectedOutput << "\"\n";
  os << "decoded-output \"" << r.decodedOutput << "\"\n";
  if (!r.message.empty()) os << "message " << r.message << "\n";
  if (!r.counterexample.empty()) os << "counterexample\n" << r.counterexample;
  return os.str();
}

}  // namespace

extern "C" {

const char* tbn_status_name(int status) {
  if (status == TBN_E_INTERNAL) return "Internal";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* tbn_last_error(void) { return g_error.c_str(); }
void tbn_string_free(char* s) { std::free(s); }
const char* tbn_version(void) { return "0.1.0"; }

int tbn_tm_parse(const char* text, tbn_tm** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    auto* h = new tbn_tm{parse_tm(text)};
    *out = h;
  });
}

void tbn_tm_free(tbn_tm* tm) { delete tm; }

int tbn_tm_print(const tbn_tm* tm, char** out) {
  return guard([&] {
    need(tm, "tm");
    need(out, "out");
    *out = dup(print_tm(tm->spec));
  });
}

int tbn_tm_run(const tbn_tm* tm, const char* input, int64_t max_steps, char** output, char* head_symbol) {
  return guard([&] {
    need(tm, "tm");
    need(input, "input");
    check_input(tm->spec, input);
    TMRun r = run_tm(tm->spec, input, max_steps);
    if (output) *output = dup(r.output);
    if (head_symbol) *head_symbol = r.headSymbol;
  });
}

int tbn_document_parse(const char* text, tbn_document** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    auto [c, a] = parse_document(text);
    *out = new tbn_document{std::move(c), std::move(a)};
  });
}

void tbn_document_free(tbn_document* doc) { delete doc; }

int tbn_document_dump(const tbn_document* doc, char** out) {
  return guard([&] {
    need(doc, "document");
    need(out, "out");
    *out = dup(dump_document(doc->collection, doc->config));
  });
}

int tbn_document_validate(const tbn_document* doc, int* valid, int* saturated) {
  return guard([&] {
    need(doc, "document");
    bool ok = validate_configuration(doc->collection, doc->config).empty();
    if (valid) *valid = ok;
    if (saturated) *saturated = ok && is_saturated(doc->collection, doc->config);
  });
}

int tbn_document_energy(const tbn_document* doc, int64_t* enthalpy, int64_t* entropy) {
  return guard([&] {
    need(doc, "document");
    if (enthalpy) *enthalpy = tbnlab::enthalpy(doc->config);
    if (entropy) *entropy = tbnlab::entropy(doc->collection, doc->config);
  });
}

int tbn_solve(const tbn_document* doc, const tbn_limits* limits, tbn_solve_result** out) {
  return guard([&] {
    need(doc, "document");
    need(out, "out");
    auto r = enumerate_stable(doc->collection, limits_of(limits));
    *out = new tbn_solve_result{doc->collection, std::move(r)};
  });
}

void tbn_solve_result_free(tbn_solve_result* r) { delete r; }
int64_t tbn_solve_result_enthalpy(const tbn_solve_result* r) { return r ? r->result.enthalpy : 0; }
int64_t tbn_solve_result_entropy(const tbn_solve_result* r) { return r ? r->result.entropy : 0; }
size_t tbn_solve_result_count(const tbn_solve_result* r) { return r ? r->result.stable.size() : 0; }

int tbn_solve_result_document(const tbn_solve_result* r, size_t index, char** out) {
  return guard([&] {
    need(r, "result");
    need(out, "out");
    if (index >= r->result.stable.size()) throw Error(ErrorCode::InvalidArgument, "configuration index out of range");
    *out = dup(dump_document(r->collection, r->result.stable[index]));
  });
}

int tbn_solve_result_summary(const tbn_solve_result* r, char** out) {
  return guard([&] {
    need(r, "result");
    need(out, "out");
    *out = dup(format_summary(r->result));
  });
}

void tbn_report_free(tbn_report* r) { delete r; }
int tbn_report_status(const tbn_report* r) { return r ? static_cast<int>(r->report.code) : TBN_E_INVALID_ARGUMENT; }

int tbn_report_text(const tbn_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup(report_text(r->report));
  });
}

int tbn_compile_tm(const tbn_tm* tm, const char* input, int64_t space, int64_t time, int location_free,
                   tbn_tm_tbn** out) {
  return guard([&] {
    need(tm, "tm");
    need(input, "input");
    need(out, "out");
    auto cons = location_free ? compile_tm_locationfree(tm->spec, input, space, time)
                              : compile_tm(tm->spec, input, space, time);
    *out = new tbn_tm_tbn{std::move(cons)};
  });
}

void tbn_tm_tbn_free(tbn_tm_tbn* c) { delete c; }
int64_t tbn_tm_tbn_type_count(const tbn_tm_tbn* c) { return c ? c->cons.types.num_types() : 0; }
int64_t tbn_tm_tbn_expected_type_count(const tbn_tm_tbn* c) { return c ? expected_type_count(c->cons) : 0; }

int tbn_tm_tbn_collection(const tbn_tm_tbn* c, const tbn_counts* counts, char** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    *out = dup(dump_collection(apply_counts(c->cons, policy(counts))));
  });
}

int tbn_tm_tbn_canonical(const tbn_tm_tbn* c, const tbn_counts* counts, char** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    auto cc = canonical_stable_config(c->cons, policy(counts));
    *out = dup(dump_document(cc.collection, cc.config));
  });
}

int tbn_tm_tbn_alpha(const tbn_tm_tbn* c, const tbn_counts* counts, char** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    auto steps = build_alpha_sequence(c->cons, policy(counts));
    std::ostringstream os;
    for (size_t i = 0; i < steps.size(); ++i)
      os << i << " H=" << steps[i].H << " S=" << steps[i].S << " " << steps[i].what << "\n";
    *out = dup(os.str());
  });
}

int tbn_verify_tm(const tbn_tm_tbn* c, const tbn_counts* counts, int mode, const tbn_limits* limits,
                  tbn_report** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    auto coll = apply_counts(c->cons, policy(counts));
    *out = new tbn_report{verify_simulation(coll, c->cons, mode_of(mode), limits_of(limits))};
  });
}

int tbn_circuit_parse(const char* text, tbn_circuit** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new tbn_circuit{parse_circuit(text)};
  });
}

void tbn_circuit_free(tbn_circuit* c) { delete c; }

int tbn_circuit_inputs(const tbn_circuit* c, size_t* n) {
  return guard([&] {
    need(c, "circuit");
    need(n, "n");
    *n = c->spec.inputs.size();
  });
}

int tbn_circuit_eval(const tbn_circuit* c, const char* input, char** out) {
  return guard([&] {
    need(c, "circuit");
    need(input, "input");
    need(out, "out");
    *out = dup(eval_circuit(c->spec, input));
  });
}

int tbn_compile_circuit(const tbn_circuit* c, const char* input, tbn_circuit_tbn** out) {
  return guard([&] {
    need(c, "circuit");
    need(input, "input");
    need(out, "out");
    *out = new tbn_circuit_tbn{compile_circuit(c->spec, input)};
  });
}

void tbn_circuit_tbn_free(tbn_circuit_tbn* c) { delete c; }
int64_t tbn_circuit_tbn_type_count(const tbn_circuit_tbn* c) { return c ? c->tbn.types.num_types() : 0; }

int tbn_circuit_tbn_collection(const tbn_circuit_tbn* c, const tbn_counts* counts, char** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    *out = dup(dump_collection(apply_circuit_counts(c->tbn, policy(counts))));
  });
}

int tbn_circuit_tbn_canonical(const tbn_circuit_tbn* c, const tbn_counts* counts, char** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    auto cc = canonical_circuit_config(c->tbn, policy(counts));
    *out = dup(dump_document(cc.collection, cc.config));
  });
}

int tbn_verify_circuit(const tbn_circuit_tbn* c, const tbn_counts* counts, int mode, const tbn_limits* limits,
                       tbn_report** out) {
  return guard([&] {
    need(c, "construction");
    need(out, "out");
    auto coll = apply_circuit_counts(c->tbn, policy(counts));
    *out = new tbn_report{verify_circuit_simulation(coll, c->tbn, mode_of(mode), limits_of(limits))};
  });
}

int tbn_splice_demo(const tbn_tm* tm, const char* const* candidates, size_t n_candidates, int64_t space,
                    int64_t time, int threads, char** report, int* violation) {
  return guard([&] {
    need(tm, "tm");
    need(report, "report");
    if (n_candidates && !candidates) throw Error(ErrorCode::InvalidArgument, "candidates is null");
    std::vector<std::string> cands;
    for (size_t i = 0; i < n_candidates; ++i) {
      need(candidates[i], "candidate");
      cands.emplace_back(candidates[i]);
    }
    SpliceSearchLimits lim;
    lim.threads = threads;
    auto w = find_splice_witness(tm->spec, cands, space, time, lim);
    if (!w) throw Error(ErrorCode::WitnessInvalid, "no splice among the candidate inputs");
    auto cons = compile_tm_locationfree(tm->spec, w->i, space, time);
    auto r = demonstrate_failure(*w, cons);
    *report = dup(format_splice_report(r));
    if (violation) *violation = r.violation();
  });
}

int tbn_gtbn_run_tm(const tbn_tm* tm, const char* input, int64_t max_steps, int64_t seeds, tbn_gtbn_run** out) {
  return guard([&] {
    need(tm, "tm");
    need(input, "input");
    need(out, "out");
    if (seeds < 2 || seeds % 2) throw Error(ErrorCode::InvalidArgument, "seeds must be a positive even number");
    auto cons = compile_tm_gtbn(tm->spec, input);
    GtbnCounts counts;
    counts.seeds = seeds;
    auto steps = grow_computation(cons, counts, max_steps);
    auto paired = pair_computations(cons, steps.back().state);
    int64_t pairs = seeds / 2;

    auto run = std::make_unique<tbn_gtbn_run>();
    run->steps = static_cast<int64_t>(steps.size()) - 1;
    bool neutral = true, rigid = true;
    for (size_t i = 1; i < steps.size(); ++i) {
      neutral &= steps[i].H == steps[0].H && steps[i].S == steps[0].S;
      rigid &= no_rotation_holds(cons, steps[i].state.seeded[steps[i].polymer]);
    }
    int64_t pH = gtbn_enthalpy(cons, paired), pS = gtbn_entropy(cons, paired);
    char expected = run_tm(tm->spec, input, 1000000).headSymbol;
    bool agree = true;
    for (const auto& p : paired.seeded) {
      rigid &= no_rotation_holds(cons, p);
      agree &= read_output(cons, p) == expected;
    }
    run->output = read_output(cons, paired.seeded[0]);
    bool paidOff = pH == steps[0].H && pS == steps[0].S + pairs;
    run->consistent = neutral && rigid && agree && paidOff;

    std::ostringstream os;
    os << "types " << cons.types.size() << " transition-types " << cons.transitionTypes << "\n";
    os << "baseline H=" << steps[0].H << " S=" << steps[0].S << "\n";
    os << "steps " << run->steps << " neutral=" << (neutral ? "yes" : "no") << "\n";
    os << "paired H=" << pH << " S=" << pS << " dH=" << pH - steps[0].H << " dS=" << pS - steps[0].S << "\n";
    os << "output " << run->output << " expected " << expected << "\n";
    os << "no-rotation " << (rigid ? "holds" : "violated") << "\n";
    os << "verdict " << (run->consistent ? "consistent" : "inconsistent") << "\n";
    run->summary = os.str();
    run->trace = format_trace(trace_steps(cons, steps, paired));
    *out = run.release();
  });
}

void tbn_gtbn_run_free(tbn_gtbn_run* r) { delete r; }
int64_t tbn_gtbn_run_steps(const tbn_gtbn_run* r) { return r ? r->steps : 0; }
int tbn_gtbn_run_consistent(const tbn_gtbn_run* r) { return r && r->consistent; }
char tbn_gtbn_run_output(const tbn_gtbn_run* r) { return r ? r->output : '\0'; }

int tbn_gtbn_run_summary(const tbn_gtbn_run* r, char** out) {
  return guard([&] {
    need(r, "run");
    need(out, "out");
    *out = dup(r->summary);
  });
}

int tbn_gtbn_run_trace(const tbn_gtbn_run* r, char** out) {
  return guard([&] {
    need(r, "run");
    need(out, "out");
    *out = dup(r->trace);
  });
}

int tbn_gtbn_render(const char* trace_text, int64_t up_to, char** svg) {
  return guard([&] {
    need(trace_text, "trace");
    need(svg, "svg");
    *svg = dup(render_svg(replay_trace(parse_trace(trace_text), up_to)));
  });
}

const char* tbn_formats_help(void) {
  return R"(Turing machine (.tm)
  states: A,B,H        input: 0,1        tape: 0,1,_
  blank: _             start: A          halt: H
  A,0 -> B,1,R         one line per transition: state,read -> next,write,move
  '#' starts a comment.

Circuit (.circ), one node per line
  input a
  gate d in=a,b table=00:1,01:0,10:0,11:1     rows give the gate's output bits
  output z from=d.0                            name.port; a bare name is port 0

Document (.tbn)
  name [xN] [@role]: dom1,dom2*,...            monomer type with N copies
  ---
  (#i.s)-(#j.t)                                bond between slot s of instance i
                                               and slot t of instance j
  Instances are numbered by type, then copy; slots follow the listed order.

GTBN trace
  step <k> <init|attach|pair> polymer=<p> H=<h> S=<s> piece=<name|->
  <x> <y> <rot> <monomer>                      placements made by that step
  init and pair steps list the whole polymer; rot counts clockwise quarter turns.
)";
}

}  // extern "C"
