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
#include <set>

#include "doctest.h"
#include "tbnlab/atam.hpp"
#include "util.hpp"

using namespace tbnlab;

namespace {
TMSpec load(const char* name) { return parse_tm(read_file(std::string(TBNLAB_TEST_DATA) + "/" + name)); }

std::vector<std::string> all_inputs(int maxLen) {
  std::vector<std::string> out{""};
  for (int len = 1; len <= maxLen; ++len)
    for (int m = 0; m < (1 << len); ++m) {
      std::string s;
      for (int k = 0; k < len; ++k) s.push_back((m >> (len - 1 - k)) & 1 ? '1' : '0');
      out.push_back(s);
    }
  return out;
}

// Snapshot of a reference-interpreter configuration over cells [0, height).
ColumnSnapshot ref_snapshot(const TMSpec& tm, const TMConfig& c, int64_t height) {
  ColumnSnapshot s;
  for (int64_t k = 0; k < height; ++k) s.tape.push_back(c.read(k, tm.blank));
  s.head = c.head;
  s.state = c.state;
  return s;
}
}  // namespace

TEST_CASE("tm text format round trips and validates") {
  TMSpec tm = load("bitflip.tm");
  CHECK(tm.states.size() == 2);
  CHECK(parse_tm(print_tm(tm)).delta.size() == tm.delta.size());
  CHECK(print_tm(parse_tm(print_tm(tm))) == print_tm(tm));
  CHECK_THROWS_AS(parse_tm("states: A,H\ninput: 0\ntape: 0,_\nstart: A\nhalt: H\nA,0 -> H,0,R\n"), Error);
}

TEST_CASE("run_tm reference examples") {
  TMSpec tm = load("bitflip.tm");
  auto r = run_tm(tm, "1", 100);
  CHECK(r.halted);
  CHECK(r.output == "0");
  CHECK(r.steps == 2);
  CHECK(r.cellsUsed == 2);
  CHECK(run_tm(tm, "1011", 100).output == "0100");
  TMSpec h = load("halt_now.tm");
  auto e = run_tm(h, "", 0);
  CHECK(e.steps == 0);
  CHECK(e.output.empty());
  CHECK(run_tm(h, "101", 0).output == "101");
  CHECK_THROWS_AS(run_tm(tm, "1", 0), Error);
}

TEST_CASE("seed alone with no tiles") {
  TileType seed;
  seed.name = "seed";
  seed.glues[kEast] = {"x", 1};
  auto a = assemble({}, seed);
  CHECK(a.at.size() == 1);
  CHECK(a.order.size() == 1);
}

TEST_CASE("tile complexity is linear in |Q||Gamma|") {
  for (const char* f : {"bitflip.tm", "parity.tm"}) {
    TMSpec tm = load(f);
    auto sys = build_zigzag_tileset(tm, {4, true});
    size_t Q = tm.states.size(), G = tm.tapeAlphabet.size();
    // per (direction, class): |G| * (1 + |Q|) symbol tiles plus |Q||G| head tiles
    size_t bound = 2 * 4 * (G * (1 + Q) + Q * G);
    CHECK(sys.tiles.size() <= bound);
    CHECK(sys.tiles.size() <= 20 * Q * G);
    std::map<std::string, int> strength;
    for (auto& t : sys.tiles)
      for (auto& g : t.glues) {
        if (g.empty()) continue;
        auto [it, fresh] = strength.emplace(g.label, g.strength);
        CHECK(it->second == g.strength);
      }
  }
}

TEST_CASE("initial column for input 1011 with space 6") {
  TMSpec tm = load("bitflip.tm");
  auto sys = build_zigzag_tileset(tm, {6, true});
  auto fam = input_tile_family(sys, "1011");
  REQUIRE(fam.size() == 6);
  auto a = assemble_zigzag(sys, "1011", {1000, 0});
  auto col = column_snapshot(a, 0, 6);
  CHECK(col.tape == "1011__");
  CHECK(col.head == 0);
  CHECK(col.state == "A");
  // second column applies (A,1) -> (A,0,R)
  auto b = assemble_zigzag(sys, "1011", {1000, 1});
  auto c1 = column_snapshot(b, 1, 6);
  CHECK(c1.tape == "0011__");
  CHECK(c1.head == 1);
  CHECK(c1.state == "A");
  CHECK_THROWS_AS(input_tile_family(sys, "1011011"), Error);
}

TEST_CASE("bounded zig-zag columns replay the reference interpreter") {
  for (const char* f : {"bitflip.tm", "parity.tm"}) {
    TMSpec tm = load(f);
    for (auto& in : all_inputs(4)) {
      CAPTURE(f);
      CAPTURE(in);
      auto tr = trace_tm(tm, in, 1000);
      auto run = run_tm(tm, in, 1000);
      if (run.minCell < 0) continue;
      int64_t s = std::max<int64_t>(run.maxCell + 1, 1);
      auto sys = build_zigzag_tileset(tm, {s, false});
      auto a = assemble_zigzag(sys, in, {100000});
      int64_t cols = a.max_x() + 1;
      // full rectangle, zig-zag attachment order
      CHECK(static_cast<int64_t>(a.at.size()) == cols * s);
      for (size_t i = 0; i < a.order.size(); ++i) CHECK(a.order[i].first == static_cast<int64_t>(i) / s);
      // distinct consecutive snapshots equal the interpreter's trace
      std::vector<ColumnSnapshot> seen;
      for (int64_t x = 0; x < cols; ++x) {
        auto snap = column_snapshot(a, x, s);
        if (seen.empty() || !(seen.back() == snap)) seen.push_back(snap);
      }
      REQUIRE(seen.size() == tr.size());
      for (size_t k = 0; k < tr.size(); ++k) CHECK(seen[k] == ref_snapshot(tm, tr[k], s));
      CHECK(cols - 1 <= 2 * run.steps);
      // exactly one head per column
      for (int64_t x = 0; x < cols; ++x) {
        int heads = 0;
        for (int64_t y = 0; y < s; ++y) heads += !a.tile(x, y)->state.empty();
        CHECK(heads == 1);
      }
    }
  }
}

TEST_CASE("bit-flip on input 1 with s=2") {
  TMSpec tm = load("bitflip.tm");
  auto sys = build_zigzag_tileset(tm, {2, false});
  auto a = assemble_zigzag(sys, "1");
  auto last = column_snapshot(a, a.max_x(), 2);
  CHECK(last.state == "H");
  CHECK(last.tape.substr(0, 1) == run_tm(tm, "1", 10).output);
}

TEST_CASE("noop columns continue after halting") {
  TMSpec tm = load("bitflip.tm");
  auto sys = build_zigzag_tileset(tm, {2, true});
  auto a = assemble_zigzag(sys, "1", {1000, 6});
  CHECK(a.max_x() == 6);
  CHECK(column_snapshot(a, 6, 2) == column_snapshot(a, 2, 2));
  CHECK_THROWS_AS(assemble_zigzag(sys, "1", {10}), Error);
}

TEST_CASE("unbounded variant extends the tape") {
  TMSpec tm = load("bitflip.tm");
  auto sys = build_zigzag_tileset(tm, {std::nullopt, false});
  for (auto& in : all_inputs(4)) {
    CAPTURE(in);
    auto run = run_tm(tm, in, 100);
    if (run.minCell < 0) continue;  // falls off the left end
    auto a = assemble_zigzag(sys, in, {100000});
    int64_t h = std::max<int64_t>(1, static_cast<int64_t>(in.size()));
    auto last = column_snapshot(a, a.max_x(), h);
    CHECK(last.state == "H");
    CHECK(last.head == run.final.head);
    CHECK(last.tape.substr(0, in.size()) == run.tape.substr(0, in.size()));
  }
}
