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
// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "geo_oracle.hpp"
#include "oracles.hpp"
#include "tbnlab/atam.hpp"
#include "tbnlab/circuit.hpp"
#include "tbnlab/gtbn.hpp"
#include "tbnlab/solver.hpp"
#include "tbnlab/splice.hpp"
#include "tbnlab/tm_compiler.hpp"
#include "util.hpp"

using namespace tbnlab;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail.str("");
      detail << "failed: " << what;
    }
  }
};

std::string data(const char* name) { return read_file(std::string(TBNLAB_TEST_DATA) + "/" + name); }
TMSpec load_tm(const char* name) { return parse_tm(data(name)); }

const Polymer* seed_polymer(const Collection& c, const std::vector<Polymer>& ps, int which = 0) {
  for (auto& p : ps)
    for (int m : p.members)
      if (c.instance_type(m).role == Role::Seed && which-- == 0) return &p;
  return nullptr;
}

std::vector<MonomerType> member_types(const Collection& c, const Polymer& p) {
  std::vector<MonomerType> out;
  for (int m : p.members) out.push_back(c.instance_type(m));
  return out;
}

std::vector<std::string> words(int len) {
  std::vector<std::string> out;
  for (int m = 0; m < (1 << len); ++m) {
    std::string s;
    for (int k = len - 1; k >= 0; --k) s.push_back((m >> k) & 1 ? '1' : '0');
    out.push_back(s);
  }
  return out;
}

struct RoleCounts {
  int64_t seed = 0, comp = 0, end = 0, cap = 0;
};

RoleCounts role_counts(const Collection& c) {
  RoleCounts r;
  for (int t = 0; t < c.num_types(); ++t) {
    switch (c.type(t).role) {
      case Role::Seed: r.seed += c.count(t); break;
      case Role::Comp: r.comp += c.count(t); break;
      case Role::End: r.end += c.count(t); break;
      default: r.cap += c.count(t); break;
    }
  }
  return r;
}

// 1. Pruned search against the naive enumerator.
void solver_vs_naive(Outcome& o) {
  auto start = std::chrono::steady_clock::now();
  const uint64_t seed = 20260101;
  std::mt19937_64 rng(seed);
  int n = 0;
  for (; n < 220 && o.ok; ++n) {
    Collection c = oracle::random_collection(rng, 6, 3, 2);
    auto fast = enumerate_stable(c);
    auto slow = oracle::naive_stable(c);
    std::set<std::string> got;
    for (auto& cfg : fast.stable) got.insert(oracle::brute_canon(c, cfg));
    o.require(fast.enthalpy == slow.maxBonds, "enthalpy differs on " + dump_collection(c));
    o.require(fast.entropy == slow.entropy, "entropy differs on " + dump_collection(c));
    o.require(got.size() == fast.stable.size() && got == slow.classes, "classes differ on " + dump_collection(c));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 60, "took longer than 60 s");
  if (o.ok) o.detail << n << " random collections agree (seed " << seed << "), " << secs << " s";
}

// 2. Desk-scale simulation with enumeration.
void desk_scale(Outcome& o) {
  TMSpec tm = load_tm("bitflip.tm");
  int runs = 0;
  for (auto [s, t] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}})
    for (const char* in : {"0", "1"})
      for (CountsPolicy counts : {CountsPolicy{1, 1, 1, {}}, CountsPolicy{1, 1, 2, {}}}) {
        std::string tag = std::string("s=") + std::to_string(s) + " t=" + std::to_string(t) + " in=" + in;
        auto cons = compile_tm(tm, in, s, t);
        auto cc = canonical_stable_config(cons, counts);
        const Collection& c = cc.collection;
        auto r = enumerate_stable(c);
        o.require(r.stable.size() == 1, tag + ": stable classes != 1");
        if (r.stable.size() != 1) return;
        auto ps = polymers(c, r.stable[0]);
        const Polymer* p = seed_polymer(c, ps);
        o.require(p != nullptr, tag + ": no seed polymer");
        if (!p) return;
        auto ms = member_types(c, *p);
        o.require(e_input(ms) == std::optional<std::string>(in), tag + ": input decode");
        o.require(e_output(ms, s, tm.blank) == std::optional<std::string>(run_tm(tm, in, 1000).output),
                  tag + ": output decode");
        RoleCounts rc = role_counts(c);
        o.require(r.enthalpy == 2 * rc.comp + 2 * rc.end + s, tag + ": enthalpy formula");
        o.require(r.entropy == rc.seed + rc.cap, tag + ": entropy formula");
        ++runs;
      }
  if (o.ok) o.detail << runs << " runs: one stable class each, decoded, H and S match the closed forms";
}

// 3. Assembly sequence.
void alpha_sequence(Outcome& o) {
  TMSpec tm = load_tm("bitflip.tm");
  for (auto [in, s, t] : std::vector<std::tuple<std::string, int, int>>{{"1", 2, 1}, {"10", 3, 2}, {"10", 4, 3}}) {
    std::string tag = "s=" + std::to_string(s) + " t=" + std::to_string(t);
    auto cons = compile_tm(tm, in, s, t);
    CountsPolicy counts{};
    auto seq = build_alpha_sequence(cons, counts);
    auto cc = canonical_stable_config(cons, counts);
    o.require(seq.size() == static_cast<size_t>(2 + 2 * t * s + s), tag + ": sequence length");
    for (size_t i = 1; i < seq.size(); ++i) o.require(seq[i].H == seq[i - 1].H, tag + ": enthalpy changes");
    for (size_t i = 1; i + 1 < seq.size(); ++i) o.require(seq[i].S == seq[i - 1].S, tag + ": entropy changes on a swap");
    // the endpoints fix the last step: S(first) = seeds + caps - s*seeds, S(last) = seeds + caps
    RoleCounts rc = role_counts(cc.collection);
    o.require(seq.front().S == rc.seed + rc.cap - s * rc.seed, tag + ": first entropy");
    o.require(seq.back().S - seq[seq.size() - 2].S == s * rc.seed, tag + ": rebind entropy");
    o.require(seq.back().config == cc.config, tag + ": last element is not the canonical configuration");
    o.require(check_entropy_certificate(cc.collection, seq.back().config, cc.cert).ok(), tag + ": certificate");
  }
  if (o.ok)
    o.detail << "3 fixtures incl. s=4 t=3: dH=0 every step, dS=0 every swap, rebind dS=+s per seed, certificate ok";
}

// 4. Counts robustness.
void counts_robustness(Outcome& o) {
  TMSpec tm = load_tm("bitflip.tm");
  auto cons = compile_tm(tm, "1", 2, 1);
  std::string want;
  int checked = 0;
  for (int seed = 1; seed <= 3; ++seed)
    for (int comp = 1; comp <= 3; ++comp)
      for (int cap = 1; cap <= 3; ++cap) {
        if (!(seed <= comp && comp <= cap)) continue;
        Collection c = apply_counts(cons, {seed, comp, cap, {}});
        auto rep = verify_simulation(c, cons, VerifyMode::Enumerate);
        std::string got = std::string(error_code_name(rep.code)) + "/" + std::to_string(rep.stableClasses) + "/" +
                          rep.decodedOutput;
        if (want.empty()) want = got;
        o.require(rep.ok() && got == want, "counts " + std::to_string(seed) + "," + std::to_string(comp) + "," +
                                               std::to_string(cap) + " gave " + got);
        ++checked;
      }
  bool rejected = false;
  try {
    apply_counts(cons, {1, 3, 2, {}});
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::CountsViolation;
  }
  o.require(rejected, "k_min < c_min was accepted");
  if (o.ok) o.detail << checked << " valid vectors give " << want << "; k_min < c_min rejected";
}

// 5. Circuit simulation.
void circuit(Outcome& o) {
  CircuitSpec spec = parse_circuit(data("three_gate.circ"));
  auto reference = [](const std::string& in) {
    int a = in[0] - '0', b = in[1] - '0', c = in[2] - '0';
    int notParity = !(a ^ b ^ c), all = a & b & c;
    return std::string{static_cast<char>('0' + notParity), static_cast<char>('0' + (all | notParity))};
  };
  size_t gateMonomers = 0, gateEdges = 0, inputEdges = 0;
  for (const auto& nd : spec.nodes) {
    if (nd.kind == NodeKind::Gate) gateMonomers += size_t(1) << nd.in.size();
    for (const auto& src : nd.in) (spec.nodes[src.node].kind == NodeKind::Input ? inputEdges : gateEdges)++;
  }
  size_t n = spec.inputs.size(), m = spec.outputs.size();
  o.require(inputEdges == n, "fixture inputs fan out");
  for (const auto& in : words(3)) {
    auto tbn = compile_circuit(spec, in);
    o.require(eval_circuit(spec, in) == reference(in), "eval_circuit disagrees with the hand evaluation on " + in);
    o.require(tbn.gateMonomers.size() == gateMonomers, "gate monomer count");
    auto cc = canonical_circuit_config(tbn, {});
    auto rep = verify_circuit_simulation(cc.collection, tbn, VerifyMode::Enumerate);
    o.require(rep.ok() && rep.stableClasses >= 1, "verification failed on " + in + ": " + rep.message);
    o.require(rep.decodedOutput == eval_circuit(spec, in), "decoded output on " + in);
    auto ps = polymers(cc.collection, cc.config);
    const Polymer* p = seed_polymer(cc.collection, ps);
    o.require(p && p->bonds.size() == gateEdges + n + m, "seed polymer bond count on " + in);
  }
  for (const auto& nd : spec.nodes)
    if (nd.name == "d") o.require(nd.table.at(0b010) == "10", "gate d on 010");
  if (o.ok)
    o.detail << "8 inputs decode; gate monomers " << gateMonomers << "; seed polymer bonds " << gateEdges << "+" << n
             << "+" << m;
}

// 6. Splicing.
void splicing(Outcome& o) {
  TMSpec tm = load_tm("restore.tm");
  const int64_t s = 5, t = 5;
  auto w = find_splice_witness(tm, {"0000", "0010", "0001"}, s, t);
  o.require(w.has_value(), "no witness");
  if (!w) return;
  auto cons = compile_tm_locationfree(tm, w->i, s, t);
  CountsPolicy counts = splice_counts(*w, cons);
  auto correct = canonical_stable_config(cons, counts);
  auto spliced = build_spliced_configuration(*w, cons, counts);
  o.require(validate_configuration(spliced.collection, spliced.config).empty(), "spliced configuration invalid");
  o.require(is_saturated(spliced.collection, spliced.config), "spliced configuration not saturated");
  int64_t sc = entropy(correct.collection, correct.config), ss = entropy(spliced.collection, spliced.config);
  o.require(sc == ss, "entropies differ");
  auto ps = polymers(spliced.collection, spliced.config);
  const Polymer* p = seed_polymer(spliced.collection, ps);
  o.require(p != nullptr, "no seed polymer");
  if (!p) return;
  auto out = e_output(member_types(spliced.collection, *p), s, tm.blank);
  std::string mk = run_tm(tm, w->k, 10000).output, mi = run_tm(tm, w->i, 10000).output;
  o.require(out == std::optional<std::string>(mk), "spliced output is not M(k)");
  o.require(mk != mi, "M(k) equals M(i)");
  if (o.ok)
    o.detail << "i=" << w->i << " j=" << w->j << " k=" << w->k << " H=" << enthalpy(spliced.config) << " S=" << ss
             << " output " << *out << " vs " << mi;
}

// 7. Geometric construction.
void geometric(Outcome& o) {
  int runs = 0;
  for (const char* name : {"bitflip.tm", "parity.tm"}) {
    TMSpec tm = load_tm(name);
    std::vector<std::string> ins{""};
    for (int len = 1; len <= 3; ++len)
      for (auto& w : words(len)) ins.push_back(w);
    for (const auto& in : ins) {
      std::string tag = std::string(name) + " \"" + in + "\"";
      auto c = compile_tm_gtbn(tm, in);
      auto steps = grow_computation(c, {}, 100000);
      for (size_t i = 1; i < steps.size(); ++i) {
        o.require(steps[i].H == steps[i - 1].H && steps[i].S == steps[i - 1].S, tag + ": step not neutral");
        o.require(no_rotation_holds(c, steps[i].state.seeded[steps[i].polymer]), tag + ": rotation");
      }
      auto paired = pair_computations(c, steps.back().state);
      o.require(gtbn_enthalpy(c, paired) == steps.back().H, tag + ": pairing dH");
      o.require(gtbn_entropy(c, paired) == steps.back().S + 1, tag + ": pairing dS");
      for (const auto& p : paired.seeded) {
        o.require(no_rotation_holds(c, p), tag + ": rotation after pairing");
        o.require(read_output(c, p) == run_tm(tm, in, 100000).headSymbol, tag + ": readout");
      }
      ++runs;
    }
  }

  // small-fixture stability against the naive geometric oracle
  auto P = [](const char* s) { return std::optional<Domain>(Domain(DomainName(s), false)); };
  auto St = [](const char* s) { return std::optional<Domain>(Domain(DomainName(s), true)); };
  GeoTypes types = {{"c", {P("n"), St("e"), std::nullopt, std::nullopt}},
                    {"d", {std::nullopt, P("e"), St("n"), std::nullopt}},
                    {"k", {std::nullopt, std::nullopt, St("n"), std::nullopt}}};
  std::vector<int64_t> counts = {4, 4, 4};
  auto fast = enumerate_geometric_stable(types, counts);
  auto slow = geo_oracle::naive_geo(types, counts);
  std::set<std::vector<std::array<int, 4>>> got(fast.stable.begin(), fast.stable.end());
  o.require(fast.H == slow.H && fast.S == slow.S && got == slow.stable, "12-monomer stability differs from oracle");

  // seedless audit fixtures
  auto c = compile_tm_gtbn(load_tm("bitflip.tm"), "0");
  int64_t nextId = 0;
  auto add = [&](GeoPolymer& p, const std::string& unitName, int64_t x, int64_t y, bool withCap) {
    int u = c.unit_index(unitName);
    const auto& unit = c.units[u];
    int64_t id = nextId++;
    int base = static_cast<int>(p.members.size());
    for (const auto& m : unit.members) p.members.push_back({m.type, x + m.x, y + m.y, 0, u, id});
    for (const auto& b : unit.bonds) p.bonds.push_back({b.a + base, b.fa, b.b + base, b.fb});
    if (withCap) {
      int cu = unit.cap;
      int64_t cid = nextId++;
      int cb = static_cast<int>(p.members.size());
      for (const auto& m : c.units[cu].members) p.members.push_back({m.type, x + m.x, y + m.y, 0, cu, cid});
      for (const auto& b : c.units[cu].bonds) p.bonds.push_back({b.a + cb, b.fa, b.b + cb, b.fb});
      p.bonds.push_back({base + unit.inputMember, unit.inputFaces[0], cb, (unit.inputFaces[0] + 2) % 4});
      p.bonds.push_back({base + unit.inputMember, unit.inputFaces[1], cb + 2, (unit.inputFaces[1] + 2) % 4});
    }
    return base;
  };
  auto freeCap = [&](const std::string& unitName) {
    GeoPolymer p;
    int cu = c.units[c.unit_index(unitName)].cap;
    int64_t id = nextId++;
    for (const auto& m : c.units[cu].members) p.members.push_back({m.type, m.x, m.y, 0, cu, id});
    p.bonds = c.units[cu].bonds;
    return p;
  };
  GeoPolymer row;
  int a = add(row, "(0),R", 0, 0, true);
  int b = add(row, "(0),R", 1, 0, false);
  row.bonds.push_back({a, kEast, b, kWest});
  auto exposed = audit_seedless(c, {{row, freeCap("(0),R")}});
  o.require(exposed.size() == 1 && exposed[0].kind == "exposed-input" && exposed[0].dH < 0,
            "exposed-input fixture not classified as an enthalpy gap");
  GeoPolymer block = row;
  int l = add(block, "(0),L", 1, -1, true);
  block.bonds.push_back({l, kNorth, b, kSouth});
  auto capped = audit_seedless(c, {{block, freeCap("(0),R")}});
  o.require(capped.size() == 1 && capped[0].kind == "entropy-gap" && capped[0].dH == 0 && capped[0].dS < 0,
            "fully capped fixture not classified as an entropy gap");
  if (o.ok)
    o.detail << runs << " runs neutral, pairing +1, readout ok; 12-monomer fixture H=" << fast.H << " S=" << fast.S
             << " matches oracle; audit dH=" << exposed[0].dH << " / dS=" << capped[0].dS;
}

// 8. Type counts.
void type_counts(Outcome& o) {
  TMSpec tm = load_tm("bitflip.tm");
  std::ostringstream got;
  for (auto [in, s, t] : std::vector<std::tuple<std::string, int, int>>{{"1", 2, 1}, {"1", 3, 2}, {"0", 2, 2}, {"10", 4, 3}}) {
    auto cons = compile_tm(tm, in, s, t);
    int64_t tiles = static_cast<int64_t>(build_zigzag_tileset(tm, {s, true}).tiles.size());
    // end contents are a tape symbol or a halted head on one, in each of four row classes
    int64_t ends = static_cast<int64_t>(tm.tapeAlphabet.size()) * 2 * 4 * s;
    int64_t closed = tiles * 2 * t * s + ends + (tiles * 2 * t * s + ends);
    o.require(cons.types.num_types() == 1 + closed, "type count for s=" + std::to_string(s));
    got << " " << cons.types.num_types();
  }
  for (const char* name : {"bitflip.tm", "parity.tm"}) {
    TMSpec tm = load_tm(name);
    auto c = compile_tm_gtbn(tm, "01");
    int64_t bound = 3 * static_cast<int64_t>(tm.states.size() * tm.tapeAlphabet.size()) * 2;
    o.require(c.transitionTypes <= bound, std::string("transition types for ") + name);
    got << " " << name << ":" << c.transitionTypes << "<=" << bound;
  }
  if (o.ok) o.detail << "types (seed + closed form):" << got.str();
}

}  // namespace

int main() {
  std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"solver equals naive enumeration", solver_vs_naive},
      {"desk-scale TM simulation", desk_scale},
      {"assembly sequence", alpha_sequence},
      {"counts robustness", counts_robustness},
      {"circuit simulation", circuit},
      {"splicing failure", splicing},
      {"geometric construction", geometric},
      {"type-count scaling", type_counts},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail.str("");
      o.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.ok;
    std::printf("%s %zu %s (%.1fs): %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
