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
#include "tbnlab/splice.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "tbnlab/solver.hpp"
#include "util.hpp"

namespace tbnlab {

std::vector<std::vector<int>> zigzag_grid(const ZigzagSystem& zz, const Assembly& a, int64_t s, int64_t t) {
  std::map<std::string, int> index;
  for (size_t k = 0; k < zz.tiles.size(); ++k) index[zz.tiles[k].name] = static_cast<int>(k);
  std::vector<std::vector<int>> g(2 * t, std::vector<int>(s, -1));
  for (int64_t x = 1; x <= 2 * t; ++x)
    for (int64_t y = 0; y < s; ++y) {
      const TileType* tile = a.tile(x, s - 1 - y);
      if (!tile) throw Error(ErrorCode::NotHaltingWithinBounds, "column " + std::to_string(x) + " is incomplete");
      g[x - 1][y] = index.at(tile->name);
    }
  return g;
}

namespace {

struct Run {
  std::string input, output;
  Assembly a;
  std::vector<std::vector<int>> grid;
};

Run run_candidate(const TMSpec& tm, const ZigzagSystem& zz, const std::string& input, int64_t s, int64_t t) {
  check_input(tm, input);
  if (static_cast<int64_t>(input.size()) > s)
    throw Error(ErrorCode::InputTooLong, "candidate '" + input + "' exceeds the space bound");
  Run r;
  r.input = input;
  try {
    r.a = assemble_zigzag(zz, input, {(2 * t + 1) * s + 1, 2 * t});
  } catch (const Error& e) {
    throw Error(ErrorCode::NotHaltingWithinBounds, "candidate '" + input + "': " + e.what());
  }
  r.grid = zigzag_grid(zz, r.a, s, t);
  if (column_snapshot(r.a, 2 * t, s).state != tm.halt)
    throw Error(ErrorCode::NotHaltingWithinBounds, "candidate '" + input + "' has not halted by column " +
                                                       std::to_string(2 * t));
  r.output = run_tm(tm, input, 4 * t + 4).output;
  return r;
}

// The single row where two columns hold different tiles with different west
// glues, or -1.
int64_t single_west_difference(const ZigzagSystem& zz, const std::vector<int>& p, const std::vector<int>& q) {
  int64_t row = -1;
  for (size_t y = 0; y < p.size(); ++y) {
    if (p[y] == q[y]) continue;
    if (row >= 0) return -1;
    row = static_cast<int64_t>(y);
  }
  if (row < 0) return -1;
  if (zz.tiles[p[row]].glues[kWest].label == zz.tiles[q[row]].glues[kWest].label) return -1;
  return row;
}

struct SplicePlan {
  std::vector<std::vector<int>> layout;
  WestOverrides west;
};

SplicePlan plan(const SpliceWitness& w, const TbnConstruction& cons) {
  const int64_t cols = 2 * cons.t;
  if (cons.input != w.i)
    throw Error(ErrorCode::WitnessInvalid, "construction is for input '" + cons.input + "', witness for '" + w.i + "'");
  if (!(1 <= w.c1 && w.c1 < w.c2 && w.c2 <= cols) || w.l1 < 0 || w.l1 >= cons.s || w.l2 < 0 || w.l2 >= cons.s)
    throw Error(ErrorCode::WitnessInvalid, "witness columns or rows outside the construction");
  auto lj = layout_for_input(cons, w.j);
  auto lk = layout_for_input(cons, w.k);
  SplicePlan p;
  p.layout = cons.layout;
  const int64_t g1 = w.c1 - 1, g2 = w.c2 - 1;
  for (int64_t x = g1; x <= cols; ++x) p.layout[x] = x < g2 ? lj[x] : lk[x];
  // The two cut points trade west partners.
  p.west[{g1, w.l1}] = {g2 - 1, w.l2};
  p.west[{g2, w.l2}] = {g1 - 1, w.l1};
  return p;
}

std::string seed_output(const CanonicalConfig& cc, int64_t s) {
  const Collection& c = cc.collection;
  for (auto& p : polymers(c, cc.config)) {
    std::vector<MonomerType> ms;
    bool seed = false;
    for (int m : p.members) {
      ms.push_back(c.instance_type(m));
      seed |= ms.back().role == Role::Seed;
    }
    if (!seed) continue;
    auto out = e_output(ms, s);
    if (!out) throw Error(ErrorCode::MalformedPolymer, "seed polymer has no readable output");
    return *out;
  }
  throw Error(ErrorCode::MalformedPolymer, "no seed polymer");
}

}  // namespace

std::optional<SpliceWitness> find_splice_witness(const TMSpec& tm, const std::vector<std::string>& candidates,
                                                 int64_t s, int64_t t, const SpliceSearchLimits& limits) {
  validate_tm(tm);
  if (s < 1 || t < 1) throw Error(ErrorCode::InvalidArgument, "space and time bounds must be positive");
  ZigzagSystem zz = build_zigzag_tileset(tm, {s, true});
  std::vector<Run> runs;
  for (auto& in : candidates) runs.push_back(run_candidate(tm, zz, in, s, t));
  const int n = static_cast<int>(runs.size());
  const int64_t cols = 2 * t;

  // diff[a][b][x]: row where column x of run a and run b differ, see above.
  std::vector<std::vector<std::vector<int64_t>>> diff(n, std::vector<std::vector<int64_t>>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int64_t x = 0; x < cols; ++x) diff[a][b].push_back(single_west_difference(zz, runs[a].grid[x], runs[b].grid[x]));

  struct Hit {
    int k;
    int64_t c1, c2, l1, l2;
  };
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && runs[i].input != runs[j].input) pairs.push_back({i, j});
  std::vector<std::optional<Hit>> found(pairs.size());
  std::atomic<int64_t> checks{0};
  std::atomic<size_t> nextPair{0};
  std::atomic<size_t> bestPair{pairs.size()};
  std::exception_ptr failure;
  std::mutex failMu;

  auto scan_pair = [&](size_t pi) {
    auto [i, j] = pairs[pi];
    for (int k = 0; k < n; ++k) {
      if (k == i || k == j || runs[k].input == runs[i].input || runs[k].input == runs[j].input) continue;
      if (runs[i].output == runs[k].output) continue;
      for (int64_t c1 = 1; c1 <= cols; ++c1) {
        int64_t l1 = diff[i][j][c1 - 1];
        if (l1 < 0) continue;
        for (int64_t c2 = c1 + 1; c2 <= cols; ++c2) {
          if (checks.fetch_add(1) >= limits.maxChecks)
            throw Error(ErrorCode::BudgetExceeded, "splice scan exceeded " + std::to_string(limits.maxChecks) + " checks");
          int64_t l2 = diff[j][k][c2 - 1];
          if (l2 < 0) continue;
          if (runs[i].grid[c1 - 1][l1] != runs[k].grid[c2 - 1][l2]) continue;
          if (runs[j].grid[c1 - 1][l1] != runs[j].grid[c2 - 1][l2]) continue;
          if (runs[i].grid[c2 - 1] == runs[k].grid[c2 - 1]) continue;
          found[pi] = Hit{k, c1, c2, l1, l2};
          return;
        }
      }
    }
  };
  auto worker = [&] {
    try {
      while (true) {
        size_t pi = nextPair.fetch_add(1);
        if (pi >= pairs.size() || pi > bestPair.load()) return;
        scan_pair(pi);
        if (found[pi]) {
          size_t cur = bestPair.load();
          while (pi < cur && !bestPair.compare_exchange_weak(cur, pi)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failMu);
      if (!failure) failure = std::current_exception();
      nextPair = pairs.size();
    }
  };
  int threads = std::max(1, std::min<int>(resolve_threads(limits.threads), static_cast<int>(pairs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // Pairs before the winner were all scanned, so the winner is the first in order.
  size_t best = bestPair.load();
  if (best == pairs.size() && failure) std::rethrow_exception(failure);
  if (best == pairs.size()) return std::nullopt;

  const Hit& h = *found[best];
  auto [i, j] = pairs[best];
  SpliceWitness w;
  w.i = runs[i].input;
  w.j = runs[j].input;
  w.k = runs[h.k].input;
  w.c1 = h.c1;
  w.c2 = h.c2;
  w.l1 = h.l1;
  w.l2 = h.l2;
  w.outI = runs[i].output;
  w.outK = runs[h.k].output;
  w.assemblies = {runs[i].a, runs[j].a, runs[h.k].a};
  w.grids = {runs[i].grid, runs[j].grid, runs[h.k].grid};
  return w;
}

CanonicalConfig build_spliced_configuration(const SpliceWitness& w, const TbnConstruction& cons,
                                            const CountsPolicy& counts) {
  SplicePlan p = plan(w, cons);
  return configuration_for_layout(cons, counts, p.layout, p.west);
}

CountsPolicy splice_counts(const SpliceWitness& w, const TbnConstruction& cons) {
  const SplicePlan p = plan(w, cons);
  int64_t most = 1;
  for (auto* layout : {&cons.layout, &p.layout}) {
    std::map<int, int64_t> uses;
    for (auto& col : *layout)
      for (int type : col) most = std::max(most, ++uses[type]);
  }
  CountsPolicy c;
  c.seed = 1;
  c.comp = most;
  c.cap = most;
  return c;
}

SpliceReport demonstrate_failure(const SpliceWitness& w, const TbnConstruction& cons,
                                 const std::optional<CountsPolicy>& counts) {
  CountsPolicy cp = counts ? *counts : splice_counts(w, cons);
  SpliceReport r;
  r.i = w.i;
  r.j = w.j;
  r.k = w.k;
  r.c1 = w.c1;
  r.c2 = w.c2;
  r.l1 = w.l1;
  r.l2 = w.l2;
  r.correct = canonical_stable_config(cons, cp);
  r.spliced = build_spliced_configuration(w, cons, cp);
  auto fill = [&](const CanonicalConfig& cc, int64_t& H, int64_t& S, bool& valid, std::string& out) {
    H = enthalpy(cc.config);
    S = entropy(cc.collection, cc.config);
    valid = validate_configuration(cc.collection, cc.config).empty() && is_saturated(cc.collection, cc.config);
    out = seed_output(cc, cons.s);
  };
  fill(r.correct, r.correctH, r.correctS, r.correctValid, r.correctOutput);
  fill(r.spliced, r.splicedH, r.splicedS, r.splicedValid, r.splicedOutput);
  r.expectedOutput = run_tm(cons.tm, cons.input, 4 * cons.t + 4).output;
  return r;
}

namespace {

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string unquote(const std::string& s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') throw Error(ErrorCode::Parse, "expected quoted value: " + s);
  return s.substr(1, s.size() - 2);
}

int64_t rows_of(const Collection& c) {
  for (auto& m : c.types())
    if (m.role == Role::Seed) {
      int64_t n = 0;
      for (auto& d : m.domains) n += !d.star && d.name.base == "g";
      return n;
    }
  throw Error(ErrorCode::Parse, "document has no seed monomer");
}

}  // namespace

std::string format_splice_report(const SpliceReport& r) {
  std::ostringstream o;
  o << "splice i=" << quoted(r.i) << " j=" << quoted(r.j) << " k=" << quoted(r.k) << " c1=" << r.c1
    << " c2=" << r.c2 << " l1=" << r.l1 << " l2=" << r.l2 << "\n";
  auto line = [&](const char* what, int64_t H, int64_t S, bool valid, const std::string& out) {
    o << what << " H=" << H << " S=" << S << " valid=" << (valid ? "yes" : "no") << " output=" << quoted(out) << "\n";
  };
  line("correct", r.correctH, r.correctS, r.correctValid, r.correctOutput);
  line("spliced", r.splicedH, r.splicedS, r.splicedValid, r.splicedOutput);
  o << "expected output=" << quoted(r.expectedOutput) << "\n";
  o << "verdict " << (r.violation() ? "violation" : "no-violation") << "\n";
  o << "=== correct\n" << dump_document(r.correct.collection, r.correct.config);
  o << "=== spliced\n" << dump_document(r.spliced.collection, r.spliced.config);
  return o.str();
}

SpliceReport parse_splice_report(std::string_view text) {
  std::map<std::string, std::map<std::string, std::string>> head;
  std::string correctDoc, splicedDoc, verdict;
  std::string* doc = nullptr;
  for (auto& raw : split_lines(text)) {
    if (raw == "=== correct") {
      doc = &correctDoc;
      continue;
    }
    if (raw == "=== spliced") {
      doc = &splicedDoc;
      continue;
    }
    if (doc) {
      *doc += raw + "\n";
      continue;
    }
    auto parts = split_ws(raw);
    if (parts.empty()) continue;
    if (parts[0] == "verdict" && parts.size() == 2) {
      verdict = parts[1];
      continue;
    }
    auto& kv = head[parts[0]];
    for (size_t p = 1; p < parts.size(); ++p) {
      auto eq = parts[p].find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::Parse, "bad report field '" + parts[p] + "'");
      kv[parts[p].substr(0, eq)] = parts[p].substr(eq + 1);
    }
  }
  auto field = [&](const std::string& line, const std::string& key) -> const std::string& {
    auto l = head.find(line);
    if (l == head.end() || !l->second.count(key))
      throw Error(ErrorCode::Parse, "report lacks " + line + " " + key);
    return l->second.at(key);
  };
  SpliceReport r;
  r.i = unquote(field("splice", "i"));
  r.j = unquote(field("splice", "j"));
  r.k = unquote(field("splice", "k"));
  r.c1 = parse_int(field("splice", "c1"));
  r.c2 = parse_int(field("splice", "c2"));
  r.l1 = parse_int(field("splice", "l1"));
  r.l2 = parse_int(field("splice", "l2"));
  r.expectedOutput = unquote(field("expected", "output"));
  auto load = [&](const std::string& name, const std::string& d, CanonicalConfig& cc, int64_t& H, int64_t& S,
                  bool& valid, std::string& out) {
    auto [c, a] = parse_document(d);
    cc.collection = std::move(c);
    cc.config = std::move(a);
    H = enthalpy(cc.config);
    S = entropy(cc.collection, cc.config);
    valid = validate_configuration(cc.collection, cc.config).empty() && is_saturated(cc.collection, cc.config);
    out = seed_output(cc, rows_of(cc.collection));
    if (parse_int(field(name, "H")) != H || parse_int(field(name, "S")) != S ||
        (field(name, "valid") == "yes") != valid || unquote(field(name, "output")) != out)
      throw Error(ErrorCode::Parse, "summary of the " + name + " configuration disagrees with its document");
  };
  load("correct", correctDoc, r.correct, r.correctH, r.correctS, r.correctValid, r.correctOutput);
  load("spliced", splicedDoc, r.spliced, r.splicedH, r.splicedS, r.splicedValid, r.splicedOutput);
  if (verdict != (r.violation() ? "violation" : "no-violation"))
    throw Error(ErrorCode::Parse, "verdict line disagrees with the documents");
  return r;
}

}  // namespace tbnlab
