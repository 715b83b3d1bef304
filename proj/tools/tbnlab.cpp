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
// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 a verification or consistency check failed,
// 2 usage, input or library error.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tbnlab/tbnlab.h"

namespace fs = std::filesystem;

namespace {

constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct Failure {
  int exit;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kUsage, "cannot write " + path};
}

void check(int status) {
  if (status == TBN_OK) return;
  std::string msg = tbn_last_error();
  throw Failure{kUsage, msg.empty() ? tbn_status_name(status) : msg};
}

std::string take(char* s) {
  std::string out(s ? s : "");
  tbn_string_free(s);
  return out;
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};

using Tm = Handle<tbn_tm, tbn_tm_free>;
using Doc = Handle<tbn_document, tbn_document_free>;
using Solved = Handle<tbn_solve_result, tbn_solve_result_free>;
using Report = Handle<tbn_report, tbn_report_free>;
using TmTbn = Handle<tbn_tm_tbn, tbn_tm_tbn_free>;
using Circ = Handle<tbn_circuit, tbn_circuit_free>;
using CircTbn = Handle<tbn_circuit_tbn, tbn_circuit_tbn_free>;
using GtbnRun = Handle<tbn_gtbn_run, tbn_gtbn_run_free>;

struct Common {
  std::string input;
  std::vector<int64_t> counts{1, 1, 1};
  std::string mode = "enumerate";
  int threads = 0;
  int64_t maxNodes = 0;
  double budget = 0;
  std::string out;
};

tbn_counts counts_of(const Common& c) {
  if (c.counts.size() != 3) throw Failure{kUsage, "--counts takes seed,comp,cap"};
  return {c.counts[0], c.counts[1], c.counts[2]};
}

tbn_limits limits_of(const Common& c) { return {c.threads, c.maxNodes, c.budget}; }

int mode_of(const Common& c) { return c.mode == "certificate" ? TBN_VERIFY_CERTIFICATE : TBN_VERIFY_ENUMERATE; }

void add_counts(CLI::App* sub, Common& c) {
  sub->add_option("--counts", c.counts, "copies per seed,computation,cap type")->delimiter(',')->expected(3);
}

void add_limits(CLI::App* sub, Common& c) {
  sub->add_option("--mode", c.mode, "enumerate or certificate")
      ->check(CLI::IsMember({"enumerate", "certificate"}));
  sub->add_option("--threads", c.threads, "worker threads (0: TBNLAB_THREADS or 1)");
  sub->add_option("--max-nodes", c.maxNodes, "branch-and-bound node budget");
  sub->add_option("--time-budget", c.budget, "seconds before giving up");
}

Tm load_tm(const std::string& path) {
  Tm tm;
  check(tbn_tm_parse(read_text(path).c_str(), tm.out()));
  return tm;
}

int report(tbn_report* r) {
  char* text = nullptr;
  check(tbn_report_text(r, &text));
  std::cout << take(text);
  return tbn_report_status(r) == TBN_OK ? 0 : kVerifyFailed;
}

// Domain names (uncomplemented) appearing in a collection dump, one per line.
std::string domain_list(const std::string& collection) {
  std::set<std::string> names;
  std::istringstream in(collection);
  for (std::string line; std::getline(in, line);) {
    size_t colon = line.find(": ");
    if (colon == std::string::npos) continue;
    // names may contain commas inside brackets
    std::string d;
    int depth = 0;
    for (char ch : line.substr(colon + 2) + ",") {
      if (ch == '(' || ch == '[') ++depth;
      if (ch == ')' || ch == ']') --depth;
      if (ch != ',' || depth > 0) {
        d += ch;
        continue;
      }
      if (!d.empty() && d.back() == '*') d.pop_back();
      if (!d.empty()) names.insert(d);
      d.clear();
    }
  }
  std::string out;
  for (const auto& n : names) out += n + "\n";
  return out;
}

void write_tm_tables(tbn_tm_tbn* c, const tbn_counts& counts, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kUsage, "cannot create " + dir};
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  char* text = nullptr;
  check(tbn_tm_tbn_collection(c, &counts, &text));
  std::string coll = take(text);
  write_text(path("collection.tbn"), coll);
  write_text(path("domains.txt"), domain_list(coll));
  check(tbn_tm_tbn_canonical(c, &counts, &text));
  write_text(path("canonical.tbn"), take(text));
  check(tbn_tm_tbn_alpha(c, &counts, &text));
  write_text(path("alpha.txt"), take(text));
  std::ostringstream os;
  os << "seed " << counts.seed << "\ncomp " << counts.comp << "\ncap " << counts.cap << "\n";
  write_text(path("counts.txt"), os.str());
  os.str("");
  os << "types " << tbn_tm_tbn_type_count(c) << " expected " << tbn_tm_tbn_expected_type_count(c) << "\n";
  write_text(path("types.txt"), os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tbnlab: thermodynamic binding network toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tbn_version()));

  Common opt;
  std::string file, emit = "collection", candidates;
  int64_t space = 0, time = 0, maxSteps = 100000, seeds = 2, upTo = -1;
  bool locationFree = false, all = false;
  std::string traceDir, svgPath, outDir;

  auto* compileTm = app.add_subcommand("compile-tm", "compile a Turing machine run into a TBN");
  compileTm->add_option("machine,--tm", file, "machine file")->required();
  compileTm->add_option("--input", opt.input, "input word");
  compileTm->add_option("--space", space, "tape cells")->required();
  compileTm->add_option("--time", time, "time steps")->required();
  compileTm->add_flag("--location-free", locationFree, "omit position labels");
  compileTm->add_option("--emit", emit, "collection, canonical, alpha or types")
      ->check(CLI::IsMember({"collection", "canonical", "alpha", "types"}));
  compileTm->add_option("-o,--output", opt.out, "output file");
  compileTm->add_option("--out", outDir, "write every table into this directory");
  add_counts(compileTm, opt);

  auto* verifyTm = app.add_subcommand("verify-tm", "check that the stable configurations decode the run");
  verifyTm->add_option("machine,--tm", file, "machine file")->required();
  verifyTm->add_option("--input", opt.input, "input word");
  verifyTm->add_option("--space", space, "tape cells")->required();
  verifyTm->add_option("--time", time, "time steps")->required();
  verifyTm->add_flag("--location-free", locationFree, "omit position labels");
  add_counts(verifyTm, opt);
  add_limits(verifyTm, opt);

  auto* compileCirc = app.add_subcommand("compile-circuit", "compile a circuit evaluation into a TBN");
  compileCirc->add_option("circuit,--circuit", file, "circuit file")->required();
  compileCirc->add_option("--input", opt.input, "input bits")->required();
  compileCirc->add_option("--emit", emit, "collection, canonical or types")
      ->check(CLI::IsMember({"collection", "canonical", "types"}));
  compileCirc->add_option("-o,--output", opt.out, "output file");
  add_counts(compileCirc, opt);

  auto* verifyCirc = app.add_subcommand("verify-circuit", "check that the stable configurations decode the circuit");
  verifyCirc->add_option("circuit,--circuit", file, "circuit file")->required();
  verifyCirc->add_option("--input", opt.input, "input bits")->required();
  add_counts(verifyCirc, opt);
  add_limits(verifyCirc, opt);

  auto* solve = app.add_subcommand("solve", "enumerate the stable configurations of a document");
  solve->add_option("document", file, "document file")->required();
  solve->add_flag("--all", all, "print every stable configuration");
  solve->add_option("-o,--output", opt.out, "write the first stable configuration here");
  add_limits(solve, opt);

  auto* splice = app.add_subcommand("splice-demo", "find a splice among inputs and show the resulting failure");
  splice->add_option("machine,--tm", file, "machine file")->required();
  splice->add_option("--inputs,--candidates", candidates, "comma separated inputs to scan")->required();
  splice->add_option("--space", space, "tape cells")->required();
  splice->add_option("--time", time, "time steps")->required();
  splice->add_option("--threads", opt.threads, "worker threads (0: TBNLAB_THREADS or 1)");

  auto* gtbnRun = app.add_subcommand("gtbn-run", "grow and pair the geometric construction for a machine");
  gtbnRun->add_option("machine,--tm", file, "machine file")->required();
  gtbnRun->add_option("--input", opt.input, "input word");
  gtbnRun->add_option("--seeds", seeds, "seed copies, even");
  gtbnRun->add_option("--max-steps", maxSteps, "attachment budget");
  gtbnRun->add_option("--trace", traceDir, "directory for trace.txt and final.svg");

  auto* render = app.add_subcommand("gtbn-render", "draw a trace as SVG");
  render->add_option("trace", file, "trace file")->required();
  render->add_option("--step", upTo, "last step to draw (-1: all)");
  render->add_option("-o,--output", svgPath, "svg file");

  auto* formats = app.add_subcommand("dump-formats", "describe the input formats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (compileTm->parsed() || verifyTm->parsed()) {
      Tm tm = load_tm(file);
      TmTbn c;
      check(tbn_compile_tm(tm, opt.input.c_str(), space, time, locationFree, c.out()));
      tbn_counts counts = counts_of(opt);
      if (verifyTm->parsed()) {
        Report r;
        tbn_limits lim = limits_of(opt);
        check(tbn_verify_tm(c, &counts, mode_of(opt), &lim, r.out()));
        return report(r);
      }
      char* text = nullptr;
      if (!outDir.empty()) {
        write_tm_tables(c, counts, outDir);
        return 0;
      }
      if (emit == "types") {
        std::ostringstream os;
        os << "types " << tbn_tm_tbn_type_count(c) << " expected " << tbn_tm_tbn_expected_type_count(c) << "\n";
        write_text(opt.out, os.str());
        return 0;
      }
      if (emit == "collection") check(tbn_tm_tbn_collection(c, &counts, &text));
      if (emit == "canonical") check(tbn_tm_tbn_canonical(c, &counts, &text));
      if (emit == "alpha") check(tbn_tm_tbn_alpha(c, &counts, &text));
      write_text(opt.out, take(text));
      return 0;
    }

    if (compileCirc->parsed() || verifyCirc->parsed()) {
      Circ circ;
      check(tbn_circuit_parse(read_text(file).c_str(), circ.out()));
      CircTbn c;
      check(tbn_compile_circuit(circ, opt.input.c_str(), c.out()));
      tbn_counts counts = counts_of(opt);
      if (verifyCirc->parsed()) {
        Report r;
        tbn_limits lim = limits_of(opt);
        check(tbn_verify_circuit(c, &counts, mode_of(opt), &lim, r.out()));
        return report(r);
      }
      if (emit == "types") {
        write_text(opt.out, "types " + std::to_string(tbn_circuit_tbn_type_count(c)) + "\n");
        return 0;
      }
      char* text = nullptr;
      if (emit == "collection") check(tbn_circuit_tbn_collection(c, &counts, &text));
      if (emit == "canonical") check(tbn_circuit_tbn_canonical(c, &counts, &text));
      write_text(opt.out, take(text));
      return 0;
    }

    if (solve->parsed()) {
      Doc d;
      check(tbn_document_parse(read_text(file).c_str(), d.out()));
      Solved r;
      tbn_limits lim = limits_of(opt);
      check(tbn_solve(d, &lim, r.out()));
      char* text = nullptr;
      check(tbn_solve_result_summary(r, &text));
      std::cout << take(text) << "\n";
      size_t n = tbn_solve_result_count(r);
      for (size_t i = 0; i < n; ++i) {
        if (!all && !(i == 0 && !opt.out.empty())) break;
        check(tbn_solve_result_document(r, i, &text));
        if (i == 0 && !opt.out.empty()) {
          std::string doc = take(text);
          write_text(opt.out, doc);
          if (all) std::cout << "# configuration 0\n" << doc;
        } else {
          std::cout << "# configuration " << i << "\n" << take(text);
        }
      }
      return 0;
    }

    if (splice->parsed()) {
      Tm tm = load_tm(file);
      std::vector<std::string> words;
      std::stringstream ss(candidates);
      for (std::string w; std::getline(ss, w, ',');) words.push_back(w);
      std::vector<const char*> ptrs;
      for (auto& w : words) ptrs.push_back(w.c_str());
      char* text = nullptr;
      int violation = 0;
      check(tbn_splice_demo(tm, ptrs.data(), ptrs.size(), space, time, opt.threads, &text, &violation));
      std::cout << take(text);
      return violation ? 0 : kVerifyFailed;
    }

    if (gtbnRun->parsed()) {
      Tm tm = load_tm(file);
      GtbnRun run;
      check(tbn_gtbn_run_tm(tm, opt.input.c_str(), maxSteps, seeds, run.out()));
      char* text = nullptr;
      check(tbn_gtbn_run_summary(run, &text));
      std::cout << take(text);
      if (!traceDir.empty()) {
        std::error_code ec;
        fs::create_directories(traceDir, ec);
        if (ec) throw Failure{kUsage, "cannot create " + traceDir};
        check(tbn_gtbn_run_trace(run, &text));
        std::string trace = take(text);
        write_text((fs::path(traceDir) / "trace.txt").string(), trace);
        check(tbn_gtbn_render(trace.c_str(), -1, &text));
        write_text((fs::path(traceDir) / "final.svg").string(), take(text));
      }
      return tbn_gtbn_run_consistent(run) ? 0 : kVerifyFailed;
    }

    if (render->parsed()) {
      char* svg = nullptr;
      check(tbn_gtbn_render(read_text(file).c_str(), upTo, &svg));
      write_text(svgPath, take(svg));
      return 0;
    }

    if (formats->parsed()) {
      std::cout << tbn_formats_help();
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "tbnlab: " << f.message << "\n";
    return f.exit;
  }
  return kUsage;
}
